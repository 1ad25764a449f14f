//! Fast evaluation and reconstruction of trigonometric polynomials along
//! rank-1 lattices.
//!
//! Along `Lambda(z, M)` a multivariate exponential `e^(2 pi i k.x)` collapses
//! to the univariate one `e^(2 pi i j (k.z mod M) / M)`, so evaluating a
//! polynomial at all `M` nodes is one length-`M` FFT over residue buckets,
//! and the adjoint map recovers each coefficient from the FFT bin of its
//! residue. For a multiple lattice the per-component adjoint estimates of a
//! frequency are averaged over the components that reconstruct it.

use crate::fft::{plan, Direction};
use crate::index_sets::FrequencyIndexSet;
use crate::lattice::{residue, MultipleLattice, Rank1Lattice};
use crate::scalar::FloatScalar;
use num_complex::Complex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{uncovered} frequencies are covered by no component")]
    CoverageViolation { uncovered: usize },
}

/// Evaluates the polynomial with coefficients `coeffs` on `set` at all `M`
/// nodes of `lat`, in node order `j = 0..M`. Costs one length-`M` FFT after
/// accumulating coefficients into residue buckets.
pub fn evaluate_on_lattice<T: FloatScalar>(
    coeffs: &[Complex<T>],
    set: &FrequencyIndexSet,
    lat: &Rank1Lattice,
) -> Vec<Complex<T>> {
    assert_eq!(coeffs.len(), set.len(), "one coefficient per frequency");
    let m = lat.m();
    let mut buckets = vec![Complex::new(T::zero(), T::zero()); m as usize];
    for (c, k) in coeffs.iter().zip(set.iter()) {
        buckets[residue(k, lat) as usize] += *c;
    }
    plan::<T>(m as usize).process(&mut buckets, Direction::Inverse);
    buckets
}

/// Adjoint reconstruction from one lattice: `out_k = (1/M) sum_j f(x_j)
/// e^(-2 pi i j (k.z mod M) / M)`, one value per member of `set`. The value
/// at `k` equals the sum of the true coefficients over everything congruent
/// to `k`, so it is exact precisely on frequencies free of aliasing.
pub fn adjoint_single<T: FloatScalar>(
    samples: &[Complex<T>],
    lat: &Rank1Lattice,
    set: &FrequencyIndexSet,
) -> Vec<Complex<T>> {
    assert_eq!(samples.len(), lat.m() as usize, "one sample per node");
    let m = lat.m();
    let scale = T::one() / T::from_u64(m).unwrap();
    let mut bins = samples.to_vec();
    plan::<T>(m as usize).process(&mut bins, Direction::Forward);
    set.iter()
        .map(|k| bins[residue(k, lat) as usize] * scale)
        .collect()
}

/// Averaged reconstruction over all components of a multiple lattice:
/// each frequency takes the mean of its single-lattice estimates over the
/// components on which it is aliasing-free.
pub fn reconstruct_multiple<T: FloatScalar>(
    ml: &MultipleLattice,
    samples: &[Vec<Complex<T>>],
    set: &FrequencyIndexSet,
) -> Result<Vec<Complex<T>>, TransformError> {
    let l = ml.components().len();
    if samples.len() != l {
        return Err(TransformError::LengthMismatch {
            expected: l,
            got: samples.len(),
        });
    }
    let uncovered = ml.counters().iter().filter(|&&c| c == 0).count();
    if uncovered > 0 {
        return Err(TransformError::CoverageViolation { uncovered });
    }
    let mut acc = vec![Complex::new(T::zero(), T::zero()); set.len()];
    for (li, lat) in ml.components().iter().enumerate() {
        let m = lat.m();
        if samples[li].len() != m as usize {
            return Err(TransformError::LengthMismatch {
                expected: m as usize,
                got: samples[li].len(),
            });
        }
        let scale = T::one() / T::from_u64(m).unwrap();
        let mut bins = samples[li].clone();
        plan::<T>(m as usize).process(&mut bins, Direction::Forward);
        for &pos in ml.aliasing_free(li) {
            let k = set.freq(pos as usize);
            acc[pos as usize] += bins[residue(k, lat) as usize] * scale;
        }
    }
    for (a, &c) in acc.iter_mut().zip(ml.counters()) {
        *a = *a / T::from_u32(c).unwrap();
    }
    Ok(acc)
}

/// Samples `f` at every node of every component and reconstructs its
/// coefficients on `set`. Returns the coefficients and the total number of
/// point evaluations `sum_l M_l`.
pub fn approximate<T, F>(
    f: F,
    set: &FrequencyIndexSet,
    ml: &MultipleLattice,
) -> Result<(Vec<Complex<T>>, u128), TransformError>
where
    T: FloatScalar,
    F: Fn(&[f64]) -> Complex<T>,
{
    let d = ml.dim();
    let mut samples = Vec::with_capacity(ml.components().len());
    let mut x = vec![0.0f64; d];
    for lat in ml.components() {
        let m = lat.m();
        let mut row = Vec::with_capacity(m as usize);
        for j in 0..m {
            for (xs, &zs) in x.iter_mut().zip(lat.z()) {
                *xs = ((j as u128 * zs as u128) % m as u128) as f64 / m as f64;
            }
            row.push(f(&x));
        }
        samples.push(row);
    }
    let coeffs = reconstruct_multiple(ml, &samples, set)?;
    Ok((coeffs, ml.total_samples()))
}
