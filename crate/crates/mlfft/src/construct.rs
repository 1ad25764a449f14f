//! Probabilistic construction of reconstructing multiple rank-1 lattices,
//! plus a greedy component-by-component search for single ones.
//!
//! The multiple-lattice builder draws candidate components at random: the
//! l-th draw uses the l-th eligible prime as lattice size and a uniformly
//! random generating vector. A draw is kept exactly when it reconstructs at
//! least one frequency that no kept component covers yet. With sizes above
//! `lambda = c (|I| - 1)` each draw covers every fixed frequency with
//! probability at least `1 - 1/c`, which is what makes the default draw
//! budget `L_max` logarithmic in `|I| / delta`.

use crate::index_sets::{expansion, FrequencyIndexSet};
use crate::lattice::{aliasing_free_positions, MultipleLattice, Rank1Lattice};
use crate::primes::next_prime_after;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("construction requires a nonempty index set")]
    EmptySet,
    #[error("invalid construction parameters: {0}")]
    InvalidParams(String),
    #[error(
        "not all frequencies covered after {} draws ({} uncovered)",
        .0.primes_tried,
        .0.uncovered.len()
    )]
    NotCovered(Box<ConstructionReport>),
    #[error("no reconstructing single lattice found up to size {last_m}")]
    SingleSearchExhausted { last_m: u64 },
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
    #[error(transparent)]
    IndexSet(#[from] crate::index_sets::IndexSetError),
}

/// Knobs of the randomized construction.
#[derive(Clone, Copy, Debug)]
pub struct ConstructionParams {
    c: f64,
    delta: f64,
    seed: u64,
    l_max_override: Option<usize>,
}

impl ConstructionParams {
    /// Requires an oversampling factor `c > 1` and a failure budget
    /// `delta in (0, 1)`.
    pub fn new(c: f64, delta: f64, seed: u64) -> Result<Self, ConstructError> {
        if !(c.is_finite() && c > 1.0) {
            return Err(ConstructError::InvalidParams(format!("c must exceed 1, got {c}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(ConstructError::InvalidParams(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(ConstructionParams {
            c,
            delta,
            seed,
            l_max_override: None,
        })
    }

    /// Replaces the derived draw budget with a fixed one.
    pub fn with_l_max(mut self, l_max: usize) -> Self {
        self.l_max_override = Some(l_max);
        self
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draw budget `ceil((c/(c-1))^2 (ln|I| - ln delta) / 2)`, at least 1.
    pub fn l_max(&self, card: usize) -> usize {
        if let Some(l) = self.l_max_override {
            return l;
        }
        let ratio = self.c / (self.c - 1.0);
        let draws = ratio * ratio * ((card as f64).ln() - self.delta.ln()) / 2.0;
        (draws.ceil() as usize).max(1)
    }

    /// Size threshold `lambda = c (|I| - 1)`; component sizes are primes
    /// strictly above it.
    pub fn lambda(&self, card: usize) -> f64 {
        self.c * (card as f64 - 1.0)
    }
}

/// Outcome bookkeeping of one randomized construction run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructionReport {
    /// Components kept.
    #[serde(rename = "L")]
    pub l: usize,
    /// Draw budget.
    #[serde(rename = "L_max")]
    pub l_max: usize,
    pub lambda: f64,
    /// Draws made; the prime cursor advances once per draw.
    pub primes_tried: usize,
    /// Draws discarded for covering nothing new.
    pub rejected_components: usize,
    pub covered: bool,
    /// Frequencies still uncovered when the run stopped.
    pub uncovered: Vec<Vec<i64>>,
}

fn residue_vectors_distinct(set: &FrequencyIndexSet, p: u64) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(set.len());
    for k in set.iter() {
        let reduced: Vec<u64> = k.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
        if !seen.insert(reduced) {
            return false;
        }
    }
    true
}

/// The first `count` primes `p > lambda` on which the members of `set` stay
/// pairwise distinct after componentwise reduction mod `p`. Any prime above
/// the coordinate expansion of the set is eligible outright, so the walk
/// always terminates.
pub fn eligible_primes(
    set: &FrequencyIndexSet,
    lambda: f64,
    count: usize,
) -> Result<Vec<u64>, ConstructError> {
    if set.is_empty() {
        return Err(ConstructError::EmptySet);
    }
    let span = expansion(set)?;
    let mut out = Vec::with_capacity(count);
    let mut p = lambda.max(0.0).floor() as u64;
    while out.len() < count {
        p = next_prime_after(p);
        if p > span || residue_vectors_distinct(set, p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Randomized construction of a reconstructing multiple rank-1 lattice for
/// `set`. Each draw takes the next eligible prime as size and a uniform
/// generating vector; it is kept exactly when it newly covers at least one
/// frequency. Stops as soon as every frequency is covered, fails with the
/// full report after `L_max` draws otherwise.
pub fn build_multiple_lattice(
    set: &FrequencyIndexSet,
    params: &ConstructionParams,
) -> Result<(MultipleLattice, ConstructionReport), ConstructError> {
    if set.is_empty() {
        return Err(ConstructError::EmptySet);
    }
    let card = set.len();
    let d = set.dim();
    let l_max = params.l_max(card);
    let lambda = params.lambda(card);
    let primes = eligible_primes(set, lambda, l_max)?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut covered = vec![false; card];
    let mut n_covered = 0usize;
    let mut components: Vec<Rank1Lattice> = Vec::new();
    let mut draws = 0usize;
    let mut rejected = 0usize;

    for &m in &primes {
        if n_covered == card {
            break;
        }
        draws += 1;
        let z: Vec<u64> = (0..d).map(|_| rng.gen_range(0..m)).collect();
        let lat = Rank1Lattice::new(z, m)?;
        let mut newly = 0usize;
        for &pos in &aliasing_free_positions(set, &lat) {
            if !covered[pos as usize] {
                covered[pos as usize] = true;
                newly += 1;
            }
        }
        if newly > 0 {
            n_covered += newly;
            components.push(lat);
        } else {
            rejected += 1;
        }
    }

    let report = ConstructionReport {
        l: components.len(),
        l_max,
        lambda,
        primes_tried: draws,
        rejected_components: rejected,
        covered: n_covered == card,
        uncovered: set
            .iter()
            .enumerate()
            .filter(|(i, _)| !covered[*i])
            .map(|(_, k)| k.to_vec())
            .collect(),
    };
    if !report.covered {
        return Err(ConstructError::NotCovered(Box::new(report)));
    }
    let ml = MultipleLattice::bind(components, set)?;
    Ok((ml, report))
}

/// Outcome of the single-lattice search.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SingleConstructionReport {
    pub m: u64,
    pub primes_tried: usize,
}

/// Greedy choice of one coordinate of the generating vector: the scan starts
/// at a seeded offset and keeps the first candidate maximizing the number of
/// distinct residues. Returns the winner and the updated residues.
fn pick_coordinate(
    partial: &mut [u64],
    kt: &[u64],
    m: u64,
    offset: u64,
    stamp: &mut [u32],
    epoch: &mut u32,
) -> u64 {
    let n = partial.len();
    let mut best_z = 0u64;
    let mut best = 0usize;
    for i in 0..m {
        let cand = (offset + i) % m;
        *epoch += 1;
        let mut distinct = 0usize;
        for (&r, &k) in partial.iter().zip(kt) {
            let nr = ((r + k * cand) % m) as usize;
            if stamp[nr] != *epoch {
                stamp[nr] = *epoch;
                distinct += 1;
            }
        }
        if distinct > best {
            best = distinct;
            best_z = cand;
            if best == n {
                break;
            }
        }
    }
    for (r, &k) in partial.iter_mut().zip(kt) {
        *r = (*r + k * best_z) % m;
    }
    best_z
}

fn cbc_attempt(set: &FrequencyIndexSet, m: u64, rng: &mut ChaCha8Rng) -> Option<Vec<u64>> {
    let d = set.dim();
    let n = set.len();
    let mut partial = vec![0u64; n];
    let mut stamp = vec![0u32; m as usize];
    let mut epoch = 0u32;
    let mut z = Vec::with_capacity(d);
    for t in 0..d {
        let kt: Vec<u64> = set
            .iter()
            .map(|k| k[t].rem_euclid(m as i64) as u64)
            .collect();
        let offset = rng.gen_range(0..m);
        z.push(pick_coordinate(&mut partial, &kt, m, offset, &mut stamp, &mut epoch));
    }
    let mut seen = std::collections::HashSet::with_capacity(n);
    if partial.iter().all(|&r| seen.insert(r)) {
        Some(z)
    } else {
        None
    }
}

/// Searches for a single reconstructing rank-1 lattice by component-by-
/// component greedy choice of the generating vector, growing the candidate
/// prime size until either the greedy succeeds or the size ceiling falls.
/// The greedy is a heuristic: a failed attempt at one size says nothing
/// about that size, so the search just moves on to a larger prime.
pub fn build_single_lattice_cbc(
    set: &FrequencyIndexSet,
    seed: u64,
) -> Result<(Rank1Lattice, SingleConstructionReport), ConstructError> {
    if set.is_empty() {
        return Err(ConstructError::EmptySet);
    }
    let d = set.dim();
    let n = set.len();
    if n == 1 {
        let lat = Rank1Lattice::new(vec![0; d], 1)?;
        return Ok((lat, SingleConstructionReport { m: 1, primes_tried: 0 }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ceiling = 64 * n as u64 + 1024;
    let mut m = next_prime_after(2 * (n as u64 - 1));
    let mut tried = 0usize;
    loop {
        tried += 1;
        if let Some(z) = cbc_attempt(set, m, &mut rng) {
            let lat = Rank1Lattice::new(z, m)?;
            return Ok((lat, SingleConstructionReport { m, primes_tried: tried }));
        }
        if m > ceiling {
            return Err(ConstructError::SingleSearchExhausted { last_m: m });
        }
        m = next_prime_after(m + m / 5);
    }
}
