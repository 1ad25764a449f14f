//! Floating-point scalar abstraction for the FFT and transform kernels.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::Debug;

/// Scalar types the FFT and lattice transforms are generic over.
///
/// Implemented for `f32` and `f64`. The bound collects what the kernels
/// actually use: arithmetic with assignment, π constants, and conversions
/// from integer loop indices.
pub trait FloatScalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Send + Sync + 'static
{
    /// Lossless widening to `f64` for diagnostics and error reporting.
    fn to_f64_lossy(self) -> f64;
}

impl FloatScalar for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl FloatScalar for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}
