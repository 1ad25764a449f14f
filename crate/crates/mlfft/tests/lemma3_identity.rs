//! End-to-end aliasing identity: reconstructing a band-limited function from
//! lattice samples misses the truth exactly by the folded exterior mass, and
//! the total folded mass never exceeds `L` times the exterior coefficient sum.

use mlfft::analysis::aliasing_error_exact;
use mlfft::construct::{build_multiple_lattice, ConstructionParams};
use mlfft::index_sets::{generate_hc, FrequencyIndexSet, DEFAULT_CARD_CAP};
use mlfft::transform::{evaluate_on_lattice, reconstruct_multiple};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};

type C = Complex<f64>;

struct Instance {
    set: FrequencyIndexSet,
    interior: Vec<C>,
    exterior: Vec<(Vec<i64>, C)>,
    params: ConstructionParams,
}

fn make_instance(inst: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e33a + inst);
    let (d, n): (usize, f64) = if inst % 2 == 0 {
        (2, [4.0, 8.0, 16.0][(inst as usize / 2) % 3])
    } else {
        (3, [2.0, 4.0][(inst as usize / 2) % 2])
    };
    let set = generate_hc(d, n, 0.0, DEFAULT_CARD_CAP).unwrap();
    assert!(set.len() <= 300, "instance sets stay small");

    let interior: Vec<C> = (0..set.len())
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();

    // Exterior support disjoint from the set: uniform draws from a box large
    // enough that most of them alias somewhere without being engineered to.
    let mut exterior: Vec<(Vec<i64>, C)> = Vec::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let count = 20 + (inst as usize % 31);
    while exterior.len() < count {
        let k: Vec<i64> = (0..d).map(|_| rng.gen_range(-600..=600)).collect();
        if set.contains(&k) || !seen.insert(k.clone()) {
            continue;
        }
        exterior.push((k, C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    }

    let params = ConstructionParams::new(2.0, 0.5, rng.gen()).unwrap();
    Instance { set, interior, exterior, params }
}

#[test]
fn reconstruction_defect_is_the_folded_exterior_mass() {
    for inst in 0..25u64 {
        let Instance { set, interior, exterior, params } = make_instance(inst);
        let d = set.dim();
        let (ml, _) = build_multiple_lattice(&set, &params).unwrap();

        // The test polynomial lives on the union spectrum; its lattice samples
        // come from the exact residue-bucket evaluator, so the identity below
        // is checked free of pointwise phase roundoff.
        let mut coeff_of: HashMap<Vec<i64>, C> = HashMap::new();
        for (c, k) in interior.iter().zip(set.iter()) {
            coeff_of.insert(k.to_vec(), *c);
        }
        for (k, c) in &exterior {
            coeff_of.insert(k.clone(), *c);
        }
        let union =
            FrequencyIndexSet::from_rows(d, coeff_of.keys().cloned().collect()).unwrap();
        let union_coeffs: Vec<C> = union.iter().map(|k| coeff_of[k]).collect();

        let samples: Vec<Vec<C>> = ml
            .components()
            .iter()
            .map(|lat| evaluate_on_lattice(&union_coeffs, &union, lat))
            .collect();
        let approx = reconstruct_multiple(&ml, &samples, &set).unwrap();
        let alias = aliasing_error_exact(&ml, &exterior, &set);

        let max_dev = approx
            .iter()
            .zip(&interior)
            .zip(&alias)
            .map(|((a, t), al)| (a - t + al).norm())
            .fold(0.0, f64::max);
        assert!(
            max_dev <= 1e-10,
            "instance {inst}: reconstruction defect departs from the aliasing formula by {max_dev:.3e}"
        );

        let l1: f64 = alias.iter().map(|a| a.norm()).sum();
        let ext_mass: f64 = exterior.iter().map(|(_, c)| c.norm()).sum();
        let bound = ml.components().len() as f64 * ext_mass;
        assert!(l1 <= bound + 1e-12, "instance {inst}: folded mass {l1} above {bound}");
    }
}
