//! Frequency index sets and the weights that carve them out.
//!
//! The central family is the hyperbolic cross with refinement `N >= 1` and
//! shape `T < 1`,
//!
//! ```text
//! I = { k in Z^d : max(1, ||k||_1)^(-T) * prod_s max(1, |k_s|) <= N^(1-T) }
//! ```
//!
//! where `T = -inf` degenerates to the l1-ball of radius `N`. Membership on
//! the boundary shell is decided exactly: for rational `T` the comparison is
//! carried out in big integers against the dyadic expansion of `N`, and only
//! unrecognized shape parameters fall back to floating point with a 1e-12
//! relative tolerance. Dyadic (non-symmetric) crosses `H_n^d` follow the
//! nested-box convention `Q_0 = {0}`, `Q_j = {1-2^(j-1), ..., 2^(j-1)}`.
//!
//! Sets iterate in lexicographic order and round-trip bit-exactly through a
//! plain text format, which also defines the digest that lattice files are
//! bound to.

use num_bigint::BigUint;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use thiserror::Error;

/// Hard default for the enumeration guard. Callers with known-small sets can
/// pass something tighter, batch drivers may override it upward.
pub const DEFAULT_CARD_CAP: usize = 4_000_000;

#[derive(Debug, Error)]
pub enum IndexSetError {
    #[error("dimension must be at least 1")]
    InvalidDim,
    #[error("refinement must be a finite real >= 1, got {0}")]
    InvalidRefinement(f64),
    #[error("shape parameter must satisfy T < 1, got {0}")]
    InvalidShape(f64),
    #[error("cardinality cap {cap} exceeded during enumeration")]
    CapExceeded { cap: usize },
    #[error("operation requires a nonempty index set")]
    EmptySet,
    #[error("malformed index-set data: {0}")]
    Format(String),
}

/// Smoothness parameters of the weight `omega^(alpha,beta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightParams {
    pub alpha: f64,
    pub beta: f64,
}

impl WeightParams {
    /// Requires `beta >= 0` and `alpha >= -beta`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self, IndexSetError> {
        if !(beta >= 0.0) {
            return Err(IndexSetError::Format(format!("beta must be >= 0, got {beta}")));
        }
        if !(alpha >= -beta) {
            return Err(IndexSetError::Format(format!(
                "alpha must be >= -beta, got alpha {alpha}, beta {beta}"
            )));
        }
        Ok(WeightParams { alpha, beta })
    }
}

/// `omega^(alpha,beta)(k) = max(1, ||k||_1)^alpha * prod_s max(1, |k_s|)^beta`.
pub fn weight(k: &[i64], p: &WeightParams) -> f64 {
    assert!(!k.is_empty(), "weight of an empty frequency");
    let l1: u128 = k.iter().map(|&x| x.unsigned_abs() as u128).sum();
    let prod: f64 = k
        .iter()
        .map(|&x| (x.unsigned_abs().max(1)) as f64)
        .product();
    ((l1.max(1)) as f64).powf(p.alpha) * prod.powf(p.beta)
}

/// Provenance of a set: how it was generated, used to pick structured
/// truncation-tail formulas and to echo configurations.
#[derive(Clone, Debug, PartialEq)]
pub enum SetSpec {
    /// Hyperbolic cross with refinement `n` and shape `t` (`t = -inf` is the
    /// l1-ball).
    HyperbolicCross { n: f64, t: f64 },
    /// Dyadic cross `H_n^d` with total level `level`.
    Dyadic { level: u32 },
    /// Result of keeping only all-even frequencies of the inner set.
    EvenFiltered(Box<SetSpec>),
    /// Loaded from a file or assembled by hand.
    Explicit,
}

/// An ordered, duplicate-free collection of d-dimensional integer
/// frequencies. Iteration order is lexicographic and deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyIndexSet {
    dim: usize,
    flat: Vec<i64>,
    spec: SetSpec,
}

impl FrequencyIndexSet {
    /// Builds an explicit set from rows, sorting them lexicographically.
    /// Duplicate rows or rows of the wrong length are rejected.
    pub fn from_rows(dim: usize, mut rows: Vec<Vec<i64>>) -> Result<Self, IndexSetError> {
        if dim == 0 {
            return Err(IndexSetError::InvalidDim);
        }
        for row in &rows {
            if row.len() != dim {
                return Err(IndexSetError::Format(format!(
                    "row of length {} in a dimension-{} set",
                    row.len(),
                    dim
                )));
            }
        }
        rows.sort();
        for w in rows.windows(2) {
            if w[0] == w[1] {
                return Err(IndexSetError::Format(format!("duplicate frequency {:?}", w[0])));
            }
        }
        let mut flat = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            flat.extend_from_slice(&row);
        }
        Ok(FrequencyIndexSet {
            dim,
            flat,
            spec: SetSpec::Explicit,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn spec(&self) -> &SetSpec {
        &self.spec
    }

    /// The `i`-th frequency in lexicographic order.
    pub fn freq(&self, i: usize) -> &[i64] {
        &self.flat[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.flat.chunks_exact(self.dim)
    }

    /// Position of `k` in iteration order, if present.
    pub fn position(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.freq(mid).cmp(k) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        self.position(k).is_some()
    }

    /// Sub-set of the rows at the given positions, in their existing order.
    /// Positions must be strictly increasing.
    pub fn select(&self, positions: &[u32]) -> FrequencyIndexSet {
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        let mut flat = Vec::with_capacity(positions.len() * self.dim);
        for &p in positions {
            flat.extend_from_slice(self.freq(p as usize));
        }
        FrequencyIndexSet {
            dim: self.dim,
            flat,
            spec: SetSpec::Explicit,
        }
    }

    /// Canonical text encoding: header `d <dim> count <n>`, then one
    /// frequency per line, lexicographically sorted.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        writeln!(out, "d {} count {}", self.dim, self.len()).unwrap();
        for k in self.iter() {
            let mut first = true;
            for &x in k {
                if !first {
                    out.push(' ');
                }
                write!(out, "{x}").unwrap();
                first = false;
            }
            out.push('\n');
        }
        out.into_bytes()
    }

    /// SHA-256 of [`Self::canonical_bytes`], hex encoded. Lattice files store
    /// this digest to stay bound to the set they were built for.
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.canonical_bytes());
        let mut s = String::with_capacity(64);
        for byte in digest {
            write!(s, "{byte:02x}").unwrap();
        }
        s
    }

    /// Parses the canonical text encoding. Rows must be sorted and free of
    /// duplicates; anything else is rejected rather than repaired, so that
    /// read and write round-trip bit-exactly.
    pub fn parse(text: &str) -> Result<Self, IndexSetError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| IndexSetError::Format("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let (d_tag, dim_s, count_tag, count_s) =
            match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), Some(c), Some(e)) => (a, b, c, e),
                _ => return Err(IndexSetError::Format(format!("bad header: {header:?}"))),
            };
        if d_tag != "d" || count_tag != "count" || parts.next().is_some() {
            return Err(IndexSetError::Format(format!("bad header: {header:?}")));
        }
        let dim: usize = dim_s
            .parse()
            .map_err(|_| IndexSetError::Format(format!("bad dimension: {dim_s:?}")))?;
        if dim == 0 {
            return Err(IndexSetError::InvalidDim);
        }
        let count: usize = count_s
            .parse()
            .map_err(|_| IndexSetError::Format(format!("bad count: {count_s:?}")))?;
        let mut flat = Vec::with_capacity(count * dim);
        let mut prev: Option<Vec<i64>> = None;
        let mut rows = 0usize;
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
            let row =
                row.map_err(|_| IndexSetError::Format(format!("bad frequency line: {line:?}")))?;
            if row.len() != dim {
                return Err(IndexSetError::Format(format!(
                    "expected {dim} components, got {} in {line:?}",
                    row.len()
                )));
            }
            if let Some(p) = &prev {
                if *p >= row {
                    return Err(IndexSetError::Format(format!(
                        "rows not strictly lexicographically increasing near {line:?}"
                    )));
                }
            }
            flat.extend_from_slice(&row);
            prev = Some(row);
            rows += 1;
        }
        if rows != count {
            return Err(IndexSetError::Format(format!(
                "header promises {count} rows, found {rows}"
            )));
        }
        Ok(FrequencyIndexSet {
            dim,
            flat,
            spec: SetSpec::Explicit,
        })
    }
}

/// Largest coordinate span of the set: `max_s (max_k k_s - min_k k_s)`.
pub fn expansion(set: &FrequencyIndexSet) -> Result<u64, IndexSetError> {
    if set.is_empty() {
        return Err(IndexSetError::EmptySet);
    }
    let d = set.dim();
    let mut span = 0u64;
    for s in 0..d {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for k in set.iter() {
            lo = lo.min(k[s]);
            hi = hi.max(k[s]);
        }
        span = span.max((hi as i128 - lo as i128) as u64);
    }
    Ok(span)
}

/// Keeps exactly the frequencies whose components are all even.
pub fn filter_even(set: &FrequencyIndexSet) -> FrequencyIndexSet {
    let d = set.dim();
    let mut flat = Vec::new();
    for k in set.iter() {
        if k.iter().all(|&x| x % 2 == 0) {
            flat.extend_from_slice(k);
        }
    }
    FrequencyIndexSet {
        dim: d,
        flat,
        spec: SetSpec::EvenFiltered(Box::new(set.spec.clone())),
    }
}

// ---------------------------------------------------------------------------
// Hyperbolic cross membership
// ---------------------------------------------------------------------------

/// `N` as an exact dyadic `mantissa / 2^shift`. Valid for finite `N >= 1`,
/// which is always a normal double.
fn dyadic_parts(n: f64) -> (BigUint, u32) {
    let bits = n.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023 - 52;
    let mant = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
    if exp >= 0 {
        (BigUint::from(mant) << exp as u32, 0)
    } else {
        (BigUint::from(mant), (-exp) as u32)
    }
}

/// Recognizes `t` as a small rational `p/q` (`q <= 64`) within 1e-12
/// relative, via its continued fraction expansion.
fn recognize_rational(t: f64) -> Option<(i64, u64)> {
    if !t.is_finite() {
        return None;
    }
    let tol = 1e-12 * t.abs().max(1.0);
    let (mut h0, mut k0, mut h1, mut k1) = (1i128, 0i128, t.floor() as i128, 1i128);
    let mut x = t - t.floor();
    for _ in 0..40 {
        if k1 > 0 && k1 <= 64 {
            let approx = h1 as f64 / k1 as f64;
            if (approx - t).abs() <= tol {
                return Some((h1 as i64, k1 as u64));
            }
        }
        if x.abs() < 1e-15 {
            break;
        }
        x = 1.0 / x;
        let a = x.floor();
        if !(a.is_finite() && a.abs() < 1e18) {
            break;
        }
        let a = a as i128;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        if k1 > 64 {
            break;
        }
        x -= x.floor();
    }
    None
}

enum HcMembership {
    /// `T` rational `p/q`: compare `prod^q * S^max(0,-p) * 2^(shift*(q-p))`
    /// against `mant^(q-p) * S^max(0,p)` in exact integers.
    Exact {
        p: i64,
        q: u64,
        mant: BigUint,
        shift: u32,
    },
    /// Unrecognized shape: floating comparison, 1e-12 relative tolerance.
    Float,
}

struct HcPredicate {
    n: f64,
    t: f64,
    kind: HcMembership,
}

impl HcPredicate {
    fn new(n: f64, t: f64) -> Self {
        let kind = match recognize_rational(t) {
            Some((p, q)) => {
                let (mant, shift) = dyadic_parts(n);
                HcMembership::Exact { p, q, mant, shift }
            }
            None => HcMembership::Float,
        };
        HcPredicate { n, t, kind }
    }

    /// Log of the membership ratio; negative means inside. Used to classify
    /// clear cases cheaply so exact arithmetic only runs on the boundary band.
    fn log_ratio(&self, k: &[i64]) -> f64 {
        let l1: f64 = k.iter().map(|&x| x.unsigned_abs() as f64).sum();
        let log_prod: f64 = k
            .iter()
            .map(|&x| ((x.unsigned_abs().max(1)) as f64).ln())
            .sum();
        log_prod - self.t * l1.max(1.0).ln() - (1.0 - self.t) * self.n.ln()
    }

    fn member(&self, k: &[i64]) -> bool {
        let band = 1e-9;
        let lr = self.log_ratio(k);
        match &self.kind {
            HcMembership::Float => lr <= 1e-12,
            HcMembership::Exact { .. } if lr < -band => true,
            HcMembership::Exact { .. } if lr > band => false,
            HcMembership::Exact { p, q, mant, shift } => {
                let s: u128 = k.iter().map(|&x| x.unsigned_abs() as u128).sum();
                let s1 = BigUint::from(s.max(1));
                let mut prod = BigUint::from(1u32);
                for &x in k {
                    prod *= BigUint::from(x.unsigned_abs().max(1));
                }
                let qp = (*q as i64 - p) as u32; // q - p > 0 since T < 1
                let mut lhs = prod.pow(*q as u32) << (*shift as u64 * qp as u64);
                let mut rhs = mant.pow(qp);
                if *p >= 0 {
                    rhs *= s1.pow(*p as u32);
                } else {
                    lhs *= s1.pow((-p) as u32);
                }
                lhs <= rhs
            }
        }
    }
}

/// Accumulates enumerated frequencies under the cardinality cap.
struct Enumerator {
    dim: usize,
    flat: Vec<i64>,
    cap: usize,
    count: usize,
}

impl Enumerator {
    fn push(&mut self, k: &[i64]) -> Result<(), IndexSetError> {
        if self.count == self.cap {
            return Err(IndexSetError::CapExceeded { cap: self.cap });
        }
        self.flat.extend_from_slice(k);
        self.count += 1;
        Ok(())
    }
}

/// Largest admissible remaining product for a DFS prefix with product `p`,
/// l1-mass `s`, and `r` open coordinates. Uses the relaxation that a
/// completion of product `x` has l1-mass at most `x + r - 1` (attained by
/// `(x, +-1, ..., +-1)`), which keeps the bound valid although the sets are
/// not downward closed for `T > 0`. Returns 0 when the subtree is empty.
fn remaining_product_bound(p: f64, s: f64, r: f64, n: f64, t: f64) -> u64 {
    let cap = 1e15f64;
    if t == 0.0 {
        return (n / p).min(cap).floor() as u64 + 2;
    }
    if t < 0.0 {
        let bound = n.powf(1.0 - t) * s.max(1.0).powf(t) / p;
        if bound < 1.0 {
            return 0;
        }
        return bound.min(cap).floor() as u64 + 2;
    }
    // T in (0,1): f(x) = N^(1-T) (s + x + r - 1)^T - p x is concave.
    let f = |x: f64| n.powf(1.0 - t) * (s + x + r - 1.0).max(1.0).powf(t) - p * x;
    let vertex = (t * n.powf(1.0 - t) / p).powf(1.0 / (1.0 - t)) - (s + r - 1.0);
    let vertex = vertex.max(1.0);
    if f(vertex) < 0.0 && f(1.0) < 0.0 {
        return 0;
    }
    let mut hi = vertex.max(1.0);
    let mut iterations = 0;
    while f(hi) >= 0.0 {
        hi *= 2.0;
        iterations += 1;
        if hi > cap || iterations > 80 {
            return cap as u64;
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.floor() as u64 + 2
}

fn hc_dfs(
    prefix: &mut Vec<i64>,
    prod: f64,
    l1: u64,
    d: usize,
    pred: &HcPredicate,
    out: &mut Enumerator,
) -> Result<(), IndexSetError> {
    let s = prefix.len();
    if s == d {
        if pred.member(prefix) {
            out.push(prefix)?;
        }
        return Ok(());
    }
    let r = (d - s) as f64;
    let bound = remaining_product_bound(prod, l1 as f64, r, pred.n, pred.t);
    if bound == 0 {
        return Ok(());
    }
    let bound = bound as i64;
    for a in -bound..=bound {
        prefix.push(a);
        hc_dfs(
            prefix,
            prod * (a.unsigned_abs().max(1)) as f64,
            l1 + a.unsigned_abs(),
            d,
            pred,
            out,
        )?;
        prefix.pop();
    }
    Ok(())
}

fn l1_dfs(
    prefix: &mut Vec<i64>,
    budget: i64,
    d: usize,
    out: &mut Enumerator,
) -> Result<(), IndexSetError> {
    if prefix.len() == d {
        return out.push(prefix);
    }
    for a in -budget..=budget {
        prefix.push(a);
        l1_dfs(prefix, budget - a.abs(), d, out)?;
        prefix.pop();
    }
    Ok(())
}

/// Generates the hyperbolic cross `I_N^{d,T}`; `t = f64::NEG_INFINITY` gives
/// the l1-ball of radius `N`. Frequencies come out in lexicographic order.
pub fn generate_hc(
    d: usize,
    n: f64,
    t: f64,
    cap: usize,
) -> Result<FrequencyIndexSet, IndexSetError> {
    if d == 0 {
        return Err(IndexSetError::InvalidDim);
    }
    if !(n.is_finite() && n >= 1.0) {
        return Err(IndexSetError::InvalidRefinement(n));
    }
    if t.is_nan() || t >= 1.0 {
        return Err(IndexSetError::InvalidShape(t));
    }
    let mut out = Enumerator {
        dim: d,
        flat: Vec::new(),
        cap,
        count: 0,
    };
    let mut prefix = Vec::with_capacity(d);
    if t == f64::NEG_INFINITY {
        l1_dfs(&mut prefix, n.floor() as i64, d, &mut out)?;
    } else {
        let pred = HcPredicate::new(n, t);
        hc_dfs(&mut prefix, 1.0, 0, d, &pred, &mut out)?;
    }
    Ok(FrequencyIndexSet {
        dim: out.dim,
        flat: out.flat,
        spec: SetSpec::HyperbolicCross { n, t },
    })
}

// ---------------------------------------------------------------------------
// Dyadic crosses
// ---------------------------------------------------------------------------

/// Smallest level `j` with `k` in `Q_j` under the convention `Q_0 = {0}`,
/// `Q_j = {1-2^(j-1), ..., 2^(j-1)}`.
pub fn dyadic_level(k: i64) -> u32 {
    if k == 0 {
        return 0;
    }
    let m = if k > 0 { k as u64 } else { k.unsigned_abs() + 1 };
    64 - (m - 1).leading_zeros() + 1
}

fn dyadic_dfs(
    prefix: &mut Vec<i64>,
    budget: u32,
    d: usize,
    out: &mut Enumerator,
) -> Result<(), IndexSetError> {
    if prefix.len() == d {
        return out.push(prefix);
    }
    let (lo, hi) = if budget == 0 {
        (0i64, 0i64)
    } else {
        (1 - (1i64 << (budget - 1)), 1i64 << (budget - 1))
    };
    for a in lo..=hi {
        let lev = dyadic_level(a);
        debug_assert!(lev <= budget);
        prefix.push(a);
        dyadic_dfs(prefix, budget - lev, d, out)?;
        prefix.pop();
    }
    Ok(())
}

/// Generates the dyadic cross `H_n^d`, the union of boxes `X_s Q_(j_s)` over
/// all level splits `||j||_1 = n`. The nesting `Q_0 c Q_1 c ...` makes this
/// exactly the set of `k` whose per-coordinate levels sum to at most `n`.
pub fn generate_dyadic(d: usize, n: u32, cap: usize) -> Result<FrequencyIndexSet, IndexSetError> {
    if d == 0 {
        return Err(IndexSetError::InvalidDim);
    }
    if n > 40 {
        return Err(IndexSetError::CapExceeded { cap });
    }
    let mut out = Enumerator {
        dim: d,
        flat: Vec::new(),
        cap,
        count: 0,
    };
    let mut prefix = Vec::with_capacity(d);
    dyadic_dfs(&mut prefix, n, d, &mut out)?;
    Ok(FrequencyIndexSet {
        dim: out.dim,
        flat: out.flat,
        spec: SetSpec::Dyadic { level: n },
    })
}
