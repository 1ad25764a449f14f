//! Rank-1 lattices, their residue maps, and unions of several of them.
//!
//! A rank-1 lattice with generating vector `z` and size `M` is the node set
//! `x_j = (j/M) z mod 1` for `j = 0..M`. Sampling a frequency `k` along it
//! only sees the residue `k . z mod M`, so two frequencies alias exactly when
//! their residues agree. Everything in this module is bookkeeping on that
//! map: which frequencies of a set survive unaliased on one lattice, and how
//! several lattices together cover a whole set.

use crate::index_sets::FrequencyIndexSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("lattice dimension {lattice} does not match index set dimension {set}")]
    DimMismatch { lattice: usize, set: usize },
    #[error("lattice size must be positive")]
    ZeroSize,
    #[error("component count must be positive")]
    NoComponents,
}

/// A single rank-1 lattice `Lambda(z, M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank1Lattice {
    z: Vec<u64>,
    m: u64,
}

impl Rank1Lattice {
    /// The generating vector is stored reduced mod `M`.
    pub fn new(z: Vec<u64>, m: u64) -> Result<Self, LatticeError> {
        if m == 0 {
            return Err(LatticeError::ZeroSize);
        }
        let z = z.into_iter().map(|v| v % m).collect();
        Ok(Rank1Lattice { z, m })
    }

    pub fn z(&self) -> &[u64] {
        &self.z
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// The `j`-th node `(j z / M) mod 1`, componentwise in `[0, 1)`.
    pub fn node(&self, j: u64) -> Vec<f64> {
        let j = j % self.m;
        self.z
            .iter()
            .map(|&zs| ((j as u128 * zs as u128) % self.m as u128) as f64 / self.m as f64)
            .collect()
    }

    /// All `M` nodes in order of `j`.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|j| self.node(j)).collect()
    }
}

/// `k . z mod M`, with each component of `k` reduced into `[0, M)` first so
/// the accumulation stays in unsigned arithmetic.
pub fn residue(k: &[i64], lat: &Rank1Lattice) -> u64 {
    debug_assert_eq!(k.len(), lat.dim());
    let m = lat.m as u128;
    let mut acc: u128 = 0;
    for (&ks, &zs) in k.iter().zip(lat.z.iter()) {
        let ks = (ks.rem_euclid(lat.m as i64)) as u128;
        acc = (acc + ks * zs as u128) % m;
    }
    acc as u64
}

/// Positions (into the set's iteration order) of the frequencies whose
/// residue is unique within the set, i.e. that do not alias with any other
/// member on this lattice. Positions come back strictly increasing.
pub(crate) fn aliasing_free_positions(set: &FrequencyIndexSet, lat: &Rank1Lattice) -> Vec<u32> {
    let mut pairs: Vec<(u64, u32)> = set
        .iter()
        .enumerate()
        .map(|(i, k)| (residue(k, lat), i as u32))
        .collect();
    pairs.sort_unstable();
    let mut keep = Vec::new();
    let n = pairs.len();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pairs[j].0 == pairs[i].0 {
            j += 1;
        }
        if j == i + 1 {
            keep.push(pairs[i].1);
        }
        i = j;
    }
    keep.sort_unstable();
    keep
}

/// The frequencies of `set` that can be recovered from samples along `lat`
/// alone: those whose residue `k . z mod M` collides with no other member.
pub fn aliasing_free_subset(set: &FrequencyIndexSet, lat: &Rank1Lattice) -> FrequencyIndexSet {
    set.select(&aliasing_free_positions(set, lat))
}

/// Whether `lat` reconstructs all of `set` on its own: all residues pairwise
/// distinct.
pub fn is_reconstructing_single(set: &FrequencyIndexSet, lat: &Rank1Lattice) -> bool {
    aliasing_free_positions(set, lat).len() == set.len()
}

/// A union of rank-1 lattices together with, per component, the positions of
/// the set members that component reconstructs, and per set member the count
/// of components covering it.
#[derive(Clone, Debug)]
pub struct MultipleLattice {
    components: Vec<Rank1Lattice>,
    aliasing_free: Vec<Vec<u32>>,
    counters: Vec<u32>,
}

impl MultipleLattice {
    /// Binds components to `set`, computing the aliasing-free positions of
    /// every component and the per-frequency coverage counters.
    pub fn bind(
        components: Vec<Rank1Lattice>,
        set: &FrequencyIndexSet,
    ) -> Result<Self, LatticeError> {
        if components.is_empty() {
            return Err(LatticeError::NoComponents);
        }
        for lat in &components {
            if lat.dim() != set.dim() {
                return Err(LatticeError::DimMismatch {
                    lattice: lat.dim(),
                    set: set.dim(),
                });
            }
        }
        let aliasing_free: Vec<Vec<u32>> = components
            .iter()
            .map(|lat| aliasing_free_positions(set, lat))
            .collect();
        let mut counters = vec![0u32; set.len()];
        for positions in &aliasing_free {
            for &p in positions {
                counters[p as usize] += 1;
            }
        }
        Ok(MultipleLattice {
            components,
            aliasing_free,
            counters,
        })
    }

    pub fn components(&self) -> &[Rank1Lattice] {
        &self.components
    }

    /// Positions reconstructed by component `l`.
    pub fn aliasing_free(&self, l: usize) -> &[u32] {
        &self.aliasing_free[l]
    }

    /// For each set position, how many components reconstruct it.
    pub fn counters(&self) -> &[u32] {
        &self.counters
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    /// Total sample count `sum_l M_l` when every component is sampled in
    /// full, origin included each time.
    pub fn total_samples(&self) -> u128 {
        self.components.iter().map(|lat| lat.m as u128).sum()
    }
}

/// Whether every frequency of `set` is covered by at least one component,
/// plus the sub-set of uncovered frequencies. Coverage is recomputed from
/// scratch here, independently of the counters cached in `ml`.
pub fn coverage_check(ml: &MultipleLattice, set: &FrequencyIndexSet) -> (bool, FrequencyIndexSet) {
    let mut covered = vec![false; set.len()];
    for lat in ml.components() {
        for &p in &aliasing_free_positions(set, lat) {
            covered[p as usize] = true;
        }
    }
    let uncovered: Vec<u32> = (0..set.len() as u32)
        .filter(|&p| !covered[p as usize])
        .collect();
    (uncovered.is_empty(), set.select(&uncovered))
}

/// Upper bound `1 - L + sum_l M_l` on the number of distinct nodes of the
/// union; all components share the origin.
pub fn node_count_bound(ml: &MultipleLattice) -> u128 {
    let l = ml.components().len() as u128;
    ml.total_samples() + 1 - l
}

/// Exact number of distinct points in the union of the component node sets.
/// Nodes are compared as exact reduced fractions `(j z_s mod M) / M`.
pub fn distinct_node_count(ml: &MultipleLattice) -> usize {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    let mut seen = std::collections::HashSet::new();
    for lat in ml.components() {
        for j in 0..lat.m() {
            let node: Vec<(u64, u64)> = lat
                .z()
                .iter()
                .map(|&zs| {
                    let num = ((j as u128 * zs as u128) % lat.m() as u128) as u64;
                    if num == 0 {
                        (0, 1)
                    } else {
                        let g = gcd(num, lat.m());
                        (num / g, lat.m() / g)
                    }
                })
                .collect();
            seen.insert(node);
        }
    }
    seen.len()
}
