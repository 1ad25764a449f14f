//! One-dimensional FFT kernels at arbitrary lengths.
//!
//! Power-of-two lengths run an iterative radix-2 transform. Every other
//! length, in particular the primes produced by the lattice construction,
//! goes through the Bluestein chirp-z reduction to a power-of-two cyclic
//! convolution of length at least `2n - 1`. Plans carry the precomputed
//! twiddle and chirp tables and are cached per (scalar type, length).
//!
//! Transforms are unnormalized: `forward` computes
//! `X_k = sum_j x_j e^(-2 pi i jk/n)` and `inverse` the conjugate-kernel sum,
//! so `inverse(forward(x)) = n * x`.

use crate::scalar::FloatScalar;
use num_complex::Complex;
use num_traits::Zero;
use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Transform direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

struct Pow2Plan<T> {
    log2: u32,
    /// Forward roots `e^(-2 pi i j/n)` for `j < n/2`.
    twiddles: Vec<Complex<T>>,
}

struct BluesteinPlan<T> {
    /// `c_j = e^(-pi i j^2 / n)` for `j < n`.
    chirp: Vec<Complex<T>>,
    /// Forward transform of the wrapped conjugate chirp, length `inner.len()`.
    kernel_fft: Vec<Complex<T>>,
    inner: Arc<FftPlan<T>>,
}

enum PlanKind<T> {
    Pow2(Pow2Plan<T>),
    Bluestein(BluesteinPlan<T>),
}

/// Precomputed transform of one fixed length.
pub struct FftPlan<T> {
    len: usize,
    kind: PlanKind<T>,
}

fn unit<T: FloatScalar>(angle: f64) -> Complex<T> {
    let (s, c) = angle.sin_cos();
    Complex::new(
        T::from_f64(c).expect("angle cosine representable"),
        T::from_f64(s).expect("angle sine representable"),
    )
}

fn build_pow2<T: FloatScalar>(n: usize) -> Pow2Plan<T> {
    let log2 = n.trailing_zeros();
    let twiddles = (0..n / 2)
        .map(|j| unit(-2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect();
    Pow2Plan { log2, twiddles }
}

/// Chirp root of order `2n` at index `j^2`, with the square reduced mod `2n`
/// so the angle stays small and full precision survives large `j`.
fn chirp_entry<T: FloatScalar>(j: usize, n: usize, sign: f64) -> Complex<T> {
    let two_n = 2 * n as u128;
    let sq = (j as u128 * j as u128 % two_n) as f64;
    unit(sign * std::f64::consts::PI * sq / n as f64)
}

fn build_bluestein<T: FloatScalar>(n: usize) -> BluesteinPlan<T> {
    let inner_len = (2 * n - 1).next_power_of_two();
    let inner = plan::<T>(inner_len);
    let chirp: Vec<Complex<T>> = (0..n).map(|j| chirp_entry(j, n, -1.0)).collect();
    let mut kernel = vec![Complex::zero(); inner_len];
    for j in 0..n {
        let b = chirp_entry(j, n, 1.0);
        kernel[j] = b;
        if j > 0 {
            kernel[inner_len - j] = b;
        }
    }
    inner.process(&mut kernel, Direction::Forward);
    BluesteinPlan {
        chirp,
        kernel_fft: kernel,
        inner,
    }
}

impl<T: FloatScalar> FftPlan<T> {
    fn build(len: usize) -> Self {
        assert!(len >= 1, "transform length must be positive");
        let kind = if len.is_power_of_two() {
            PlanKind::Pow2(build_pow2(len))
        } else {
            PlanKind::Bluestein(build_bluestein(len))
        };
        FftPlan { len, kind }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transforms `buf` in place. `buf.len()` must equal the plan length.
    pub fn process(&self, buf: &mut [Complex<T>], dir: Direction) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match dir {
            Direction::Forward => self.forward_in_place(buf),
            Direction::Inverse => {
                for v in buf.iter_mut() {
                    *v = v.conj();
                }
                self.forward_in_place(buf);
                for v in buf.iter_mut() {
                    *v = v.conj();
                }
            }
        }
    }

    fn forward_in_place(&self, buf: &mut [Complex<T>]) {
        match &self.kind {
            PlanKind::Pow2(p) => pow2_forward(p, buf),
            PlanKind::Bluestein(p) => bluestein_forward(p, buf),
        }
    }
}

fn pow2_forward<T: FloatScalar>(p: &Pow2Plan<T>, buf: &mut [Complex<T>]) {
    let n = buf.len();
    if n == 1 {
        return;
    }
    let shift = usize::BITS - p.log2;
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if i < j {
            buf.swap(i, j);
        }
    }
    for stage in 1..=p.log2 {
        let block = 1usize << stage;
        let half = block >> 1;
        let stride = n >> stage;
        let mut base = 0;
        while base < n {
            for j in 0..half {
                let w = p.twiddles[j * stride];
                let t = w * buf[base + half + j];
                let u = buf[base + j];
                buf[base + j] = u + t;
                buf[base + half + j] = u - t;
            }
            base += block;
        }
    }
}

fn bluestein_forward<T: FloatScalar>(p: &BluesteinPlan<T>, buf: &mut [Complex<T>]) {
    let n = buf.len();
    let m = p.inner.len();
    let mut work = vec![Complex::zero(); m];
    for j in 0..n {
        work[j] = buf[j] * p.chirp[j];
    }
    p.inner.process(&mut work, Direction::Forward);
    for (w, k) in work.iter_mut().zip(&p.kernel_fft) {
        *w *= *k;
    }
    p.inner.process(&mut work, Direction::Inverse);
    let scale = T::one() / T::from_usize(m).expect("length representable");
    for k in 0..n {
        buf[k] = work[k] * p.chirp[k] * scale;
    }
}

static PLAN_CACHE: OnceLock<Mutex<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>> =
    OnceLock::new();

/// Returns the cached plan for `len`, building it on first use.
pub fn plan<T: FloatScalar>(len: usize) -> Arc<FftPlan<T>> {
    let cache = PLAN_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (TypeId::of::<T>(), len);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone().downcast::<FftPlan<T>>().expect("cache type key");
    }
    // Built outside the lock: Bluestein construction recurses into `plan`
    // for its inner power-of-two length.
    let built: Arc<FftPlan<T>> = Arc::new(FftPlan::build(len));
    let mut map = cache.lock().unwrap();
    let entry = map
        .entry(key)
        .or_insert_with(|| built.clone() as Arc<dyn Any + Send + Sync>);
    entry.clone().downcast::<FftPlan<T>>().expect("cache type key")
}

/// One-shot transform of a copy of `input`.
#[must_use = "fft_1d transforms a copy; the input slice is left untouched"]
pub fn fft_1d<T: FloatScalar>(input: &[Complex<T>], dir: Direction) -> Vec<Complex<T>> {
    let mut buf = input.to_vec();
    plan::<T>(buf.len()).process(&mut buf, dir);
    buf
}
