//! Error measurement, the exact aliasing oracle, and reference bound curves.
//!
//! The aliasing oracle recomputes, by brute force over a known exterior
//! support, exactly which foreign coefficients fold onto each wanted
//! frequency under averaged multiple-lattice reconstruction. Relative errors
//! split into a truncation tail outside the index set and an in-set
//! coefficient mismatch. Bound curves evaluate the error-decay shapes of the
//! competing sampling methods for use as figure overlays; they carry a free
//! fitted prefactor, so only their slopes are meaningful.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index_sets::FrequencyIndexSet;
use crate::lattice::{residue, MultipleLattice};
use crate::testfuncs::{KahanSum, TensorTestFunction};

/// Errors from record fitting and bound-curve selection.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("rate fit needs at least {need} records, got {got}")]
    InsufficientRecords { need: usize, got: usize },
    #[error("rate fit needs strictly increasing sample counts, found duplicate M = {m}")]
    DuplicateSampleCount { m: u128 },
    #[error("unknown bound curve {0:?}")]
    UnknownBoundKind(String),
    #[error("invalid bound parameters: {0}")]
    InvalidBoundParams(&'static str),
}

/// Which reconstruction scheme produced a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeTag {
    Single,
    Multiple,
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeTag::Single => "single",
            SchemeTag::Multiple => "multiple",
        })
    }
}

impl FromStr for SchemeTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(SchemeTag::Single),
            "multiple" => Ok(SchemeTag::Multiple),
            other => Err(format!("unknown scheme {other:?}, expected single or multiple")),
        }
    }
}

/// One measured experiment point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub d: usize,
    pub cardinality: usize,
    /// Total sample count, summed over lattice components.
    #[serde(rename = "M")]
    pub m: u128,
    /// Number of lattice components (1 for the single scheme).
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "rel_err_A")]
    pub rel_err_a: f64,
    #[serde(rename = "rel_err_L2")]
    pub rel_err_l2: f64,
    pub seed: u64,
    pub scheme: SchemeTag,
}

/// Which error column of a record a fit runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorMetric {
    A,
    L2,
}

/// Exact aliasing contribution folded onto each in-set frequency.
///
/// For every frequency `k` of `set`, sums the exterior coefficients whose
/// offset from `k` lies in the dual of a component covering `k`, averaged
/// over the covering components and negated, so that
/// `reconstructed - true = -result` holds exactly for a function whose
/// spectrum is the union of `set` and the exterior support.
pub fn aliasing_error_exact(
    ml: &MultipleLattice,
    exterior: &[(Vec<i64>, Complex<f64>)],
    set: &FrequencyIndexSet,
) -> Vec<Complex<f64>> {
    let dim = set.dim();
    assert_eq!(ml.dim(), dim, "lattice dimension mismatch");
    for (k, _) in exterior {
        assert_eq!(k.len(), dim, "exterior frequency dimension mismatch");
        assert!(!set.contains(k), "exterior support must be disjoint from the index set");
    }
    assert!(
        ml.counters().iter().all(|&c| c > 0),
        "every in-set frequency must be covered by some component"
    );

    let mut acc = vec![Complex::new(0.0, 0.0); set.len()];
    let mut diff = vec![0i64; dim];
    for (l, lat) in ml.components().iter().enumerate() {
        for &pos in ml.aliasing_free(l) {
            let k = set.freq(pos as usize);
            for (kp, c) in exterior {
                for ((d, a), b) in diff.iter_mut().zip(kp).zip(k) {
                    *d = a - b;
                }
                if residue(&diff, lat) == 0 {
                    acc[pos as usize] += c;
                }
            }
        }
    }
    for (a, &count) in acc.iter_mut().zip(ml.counters()) {
        *a *= -1.0 / f64::from(count);
    }
    acc
}

/// Relative approximation errors of coefficients `approx` on `set`.
///
/// The absolute errors combine the mass outside the set with the in-set
/// mismatch: sum of absolute differences plus the absolute tail for the
/// A-norm, root of sum of squared differences plus the squared-L2 tail for
/// L2. Each is divided by the corresponding norm of the function.
pub fn relative_errors(
    f: &TensorTestFunction,
    set: &FrequencyIndexSet,
    approx: &[Complex<f64>],
) -> (f64, f64) {
    assert_eq!(approx.len(), set.len(), "approximant not aligned with the index set");
    assert_eq!(set.dim(), f.dim(), "index set dimension mismatch");

    let tail_a = f.tail_a_sum(set);
    let tail_l2 = f.tail_l2_sq(set);
    let mut diff_abs = KahanSum::default();
    let mut diff_sq = KahanSum::default();
    for (i, k) in set.iter().enumerate() {
        let d = (f.tensor_coeff_truncated(k) - approx[i]).norm();
        diff_abs.add(d);
        diff_sq.add(d * d);
    }
    let abs_a = tail_a + diff_abs.value();
    let abs_l2 = (tail_l2 + diff_sq.value()).sqrt();
    let norm_a = f.a_norm_1d().powi(f.dim() as i32);
    let norm_l2 = f.l2_norm_1d().powi(f.dim() as i32);
    (abs_a / norm_a, abs_l2 / norm_l2)
}

/// Smoothness and shape parameters for the reference bound curves.
///
/// `alpha`/`beta` describe the source class (isotropic and mixed orders),
/// `r`/`t` the target norm, `lambda` the summability offset paid when passing
/// from square-summable to absolutely summable coefficients, `shape` the
/// index-set shape parameter, and `epsilon` an extra rate offset. `scale` is
/// a fitted prefactor with no claimed meaning.
#[derive(Clone, Copy, Debug)]
pub struct BoundParams {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
    pub t: f64,
    pub lambda: f64,
    pub shape: f64,
    pub epsilon: f64,
    pub scale: f64,
}

impl BoundParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d: usize,
        alpha: f64,
        beta: f64,
        r: f64,
        t: f64,
        lambda: f64,
        shape: f64,
        epsilon: f64,
        scale: f64,
    ) -> Result<Self, AnalysisError> {
        if d == 0 {
            return Err(AnalysisError::InvalidBoundParams("dimension must be at least 1"));
        }
        if !(beta >= 0.0) {
            return Err(AnalysisError::InvalidBoundParams("beta must be nonnegative"));
        }
        if !(alpha > -beta) {
            return Err(AnalysisError::InvalidBoundParams("alpha must exceed -beta"));
        }
        if !(lambda > 0.5) {
            return Err(AnalysisError::InvalidBoundParams("lambda must exceed 1/2"));
        }
        if shape.is_nan() || shape >= 1.0 {
            return Err(AnalysisError::InvalidBoundParams("shape parameter must be below 1"));
        }
        if !(epsilon >= 0.0) {
            return Err(AnalysisError::InvalidBoundParams("epsilon must be nonnegative"));
        }
        if !(scale > 0.0) {
            return Err(AnalysisError::InvalidBoundParams("scale must be positive"));
        }
        Ok(BoundParams { d, alpha, beta, r, t, lambda, shape, epsilon, scale })
    }
}

/// The competing error-decay shapes available as overlays.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Averaged multiple-lattice reconstruction, absolute-coefficient norm.
    MultipleA,
    /// Averaged multiple-lattice reconstruction, L2 norm (general target).
    MultipleL2,
    /// Single reconstructing lattice, uniform norm.
    SingleA,
    /// Single reconstructing lattice, L2 norm.
    SingleL2,
    /// Best linear sampling operators, L2 norm.
    LinearL2,
    /// Sparse-grid interpolation, L2 norm.
    SparseGridL2,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::MultipleA,
        BoundKind::MultipleL2,
        BoundKind::SingleA,
        BoundKind::SingleL2,
        BoundKind::LinearL2,
        BoundKind::SparseGridL2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::MultipleA => "multiple-a",
            BoundKind::MultipleL2 => "multiple-l2",
            BoundKind::SingleA => "single-a",
            BoundKind::SingleL2 => "single-l2",
            BoundKind::LinearL2 => "linear-l2",
            BoundKind::SparseGridL2 => "sparse-grid-l2",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, AnalysisError> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| AnalysisError::UnknownBoundKind(s.to_string()))
    }
}

/// Evaluates the selected bound shape at sample count `m >= 3`.
///
/// The multiple-lattice L2 shape depends on the index-set shape parameter:
/// the ratio `log M / M` (or `log^d M / M` for the unweighted hyperbolic
/// cross) is raised to the achievable smoothness surplus, minus the epsilon
/// offset, with one extra `log M` factor. The single-lattice shapes halve the
/// main rate; the linear and sparse-grid shapes keep the full rate without
/// the one-half summability offset.
pub fn bound_curve(params: &BoundParams, kind: BoundKind, m: f64) -> f64 {
    assert!(m >= 3.0, "bound curves are evaluated for M >= 3");
    let &BoundParams { d, alpha, beta, r, t, lambda, shape, epsilon, scale } = params;
    let df = d as f64;
    let lg = m.ln();

    let value = match kind {
        BoundKind::MultipleA => {
            let body = if alpha > 0.0 {
                (lg / m).powf(alpha / df + beta - epsilon)
            } else if alpha == 0.0 {
                (lg.powf(df) / m).powf(beta - epsilon)
            } else {
                (lg / m).powf(alpha + beta - epsilon)
            };
            lg * body
        }
        BoundKind::MultipleL2 => {
            let surplus = alpha - r + beta - t - lambda;
            let body = if shape == f64::NEG_INFINITY {
                (lg / m).powf((alpha - r + beta - lambda) / df - epsilon)
            } else if shape < 0.0 {
                let squeeze = (shape / df - 1.0) / (shape - 1.0);
                (lg / m).powf(squeeze * surplus - epsilon)
            } else if shape == 0.0 {
                (lg.powf(df) / m).powf(surplus - epsilon)
            } else {
                (lg / m).powf(surplus - epsilon)
            };
            lg * body
        }
        BoundKind::SingleL2 => {
            if alpha == 0.0 {
                (lg.powf(df - 2.0) / m).powf(beta / 2.0) * lg.powf((df - 1.0) / 2.0)
            } else {
                m.powf(-(alpha + beta) / 2.0)
            }
        }
        BoundKind::SingleA => {
            if alpha == 0.0 {
                (lg.powf(df - 2.0) / m).powf(beta / 2.0 - 0.25) * lg.powf((df - 1.0) / 2.0)
            } else {
                m.powf(-(alpha + beta - 0.5) / 2.0)
            }
        }
        BoundKind::LinearL2 => {
            if alpha == 0.0 {
                (lg.powf(df - 1.0) / m).powf(beta) * lg.powf((df - 1.0) / 2.0)
            } else {
                m.powf(-(alpha + beta))
            }
        }
        BoundKind::SparseGridL2 => m.powf(-beta) * lg.powf((df - 1.0) * (beta + 0.5)),
    };
    scale * value
}

/// Least-squares slope of `log(rel_err)` against `log(M)` over the last
/// `tail_count` records after sorting by sample count.
pub fn fit_rate(
    records: &[ErrorRecord],
    tail_count: usize,
    metric: ErrorMetric,
) -> Result<f64, AnalysisError> {
    if records.len() < 3 {
        return Err(AnalysisError::InsufficientRecords { need: 3, got: records.len() });
    }
    if tail_count < 2 {
        return Err(AnalysisError::InsufficientRecords { need: 2, got: tail_count });
    }
    let mut sorted: Vec<&ErrorRecord> = records.iter().collect();
    sorted.sort_by_key(|rec| rec.m);
    for pair in sorted.windows(2) {
        if pair[0].m == pair[1].m {
            return Err(AnalysisError::DuplicateSampleCount { m: pair[0].m });
        }
    }
    let tail = &sorted[sorted.len().saturating_sub(tail_count)..];

    // Zero errors would send the logarithm to -inf; floor them instead so an
    // all-zero tail fits as constant.
    let points: Vec<(f64, f64)> = tail
        .iter()
        .map(|rec| {
            let err = match metric {
                ErrorMetric::A => rec.rel_err_a,
                ErrorMetric::L2 => rec.rel_err_l2,
            };
            ((rec.m as f64).ln(), err.max(1e-300).ln())
        })
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    Ok(sxy / sxx)
}
