//! Weighted sequence spaces attached to a zero sequence.
//!
//! Traces live in `l^p` spaces weighted by the boundary gaps `1 - |a_k|`;
//! the radially-ordered space additionally weights entry `k` (1-based) by
//! its index. The counterexample construction pairs a summable nonnegative
//! `gamma` with the trace `w_k = B'(a_k) gamma_k`, whose tilde partner is
//! computable in closed form without the transform machinery.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::blaschke::{BlaschkeProduct, ZeroSequence};
use crate::disk::one_minus_mul_conj;
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// ValueSequence
// ---------------------------------------------------------------------------

/// Complex trace values `w_k`, one per zero. JSON form: array of
/// `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValueSequence(Vec<Complex64>);

impl ValueSequence {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self(values)
    }

    pub fn from_reals(values: &[f64]) -> Self {
        Self(values.iter().map(|&re| Complex64::new(re, 0.0)).collect())
    }

    pub fn constant(value: Complex64, n: usize) -> Self {
        Self(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> Result<Complex64> {
        self.0.get(k).copied().ok_or(Error::IndexOutOfBounds {
            index: k,
            len: self.0.len(),
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    /// Largest `|w_k|`; 0 for the empty sequence.
    pub fn sup_norm(&self) -> f64 {
        self.0.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation `max_k |self_k - other_k|`.
    pub fn max_deviation(&self, other: &ValueSequence) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                values: self.len(),
                zeros: other.len(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl Serialize for ValueSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.0.iter().map(|v| [v.re, v.im]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ValueSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        Ok(Self(
            pairs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        ))
    }
}

// ---------------------------------------------------------------------------
// GammaSequence
// ---------------------------------------------------------------------------

/// Strictly positive coefficients for the counterexample trace; the
/// defaults `gamma_k = k^-2` are summable while `sum k gamma_k` diverges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaSequence(Vec<f64>);

impl GammaSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidGamma { index, value });
            }
        }
        Ok(Self(values))
    }

    /// `gamma_k = 1/k^2` for `k = 1..=n`.
    pub fn inverse_square(n: usize) -> Self {
        Self((1..=n).map(|k| 1.0 / (k as f64 * k as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `sum_k k gamma_k` with 1-based `k`.
    pub fn index_weighted_sum(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &g)| (i + 1) as f64 * g)
            .sum()
    }

    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.0.len() {
            return Err(Error::IndexOutOfBounds {
                index: n,
                len: self.0.len(),
            });
        }
        Ok(Self(self.0[..n].to_vec()))
    }
}

impl<'de> Deserialize<'de> for GammaSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let values = Vec::<f64>::deserialize(deserializer)?;
        GammaSequence::new(values).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

fn check_lengths(values: usize, zeros: usize) -> Result<()> {
    if values != zeros {
        return Err(Error::LengthMismatch { values, zeros });
    }
    Ok(())
}

/// `( sum_k |w_k|^p (1 - |a_k|) )^(1/p)` for finite `p >= 1`; the sup norm
/// (no weights) for `p = infinity`.
pub fn weighted_lp_norm(w: &ValueSequence, zeros: &ZeroSequence, p: f64) -> Result<f64> {
    check_lengths(w.len(), zeros.len())?;
    if p.is_infinite() && p > 0.0 {
        return Ok(w.sup_norm());
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::UnsupportedParameter(format!(
            "exponent {p} must be >= 1 or infinity"
        )));
    }
    let sum: f64 = w
        .iter()
        .zip(zeros.points())
        .map(|(v, a)| v.norm().powf(p) * a.gap())
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// `sum_k k |w_k| (1 - a_k)` with 1-based `k`; requires radially sorted
/// zeros, since the index weight is meaningless in any other order.
pub fn m_space_norm(w: &ValueSequence, zeros: &ZeroSequence) -> Result<f64> {
    check_lengths(w.len(), zeros.len())?;
    if !zeros.radial_sorted() {
        return Err(Error::NotRadialSorted);
    }
    Ok(w.iter()
        .zip(zeros.points())
        .enumerate()
        .map(|(i, (v, a))| (i + 1) as f64 * v.norm() * a.gap())
        .sum())
}

// ---------------------------------------------------------------------------
// counterexample trace
// ---------------------------------------------------------------------------

/// Trace `w_k = B'(a_k) gamma_k` together with its closed-form tilde
/// partner `w~_k = sum_j gamma_j / (1 - a_j a_k)`.
#[derive(Debug, Clone)]
pub struct CounterexampleValues {
    pub values: ValueSequence,
    pub tilde: ValueSequence,
}

/// Builds the counterexample pair on radially sorted zeros.
///
/// The tilde partner follows from expanding `w~_k = sum_j w_j /
/// (B'(a_j)(1 - a_j a_k))` with the derivative factors cancelling; it is
/// evaluated in gap arithmetic (`1 - a_j a_k = e_j + e_k - e_j e_k`), so it
/// stays fully accurate where the matrix route would have to divide two
/// near-singular quantities.
pub fn counterexample_values(
    zeros: &ZeroSequence,
    gamma: &GammaSequence,
) -> Result<CounterexampleValues> {
    check_lengths(gamma.len(), zeros.len())?;
    if !zeros.radial_sorted() {
        return Err(Error::NotRadialSorted);
    }
    let product = BlaschkeProduct::new(zeros.clone());
    let mut values = Vec::with_capacity(zeros.len());
    for (k, &g) in gamma.values().iter().enumerate() {
        values.push(product.derivative_at_zero(k)? * g);
    }
    let mut tilde = Vec::with_capacity(zeros.len());
    for k in 0..zeros.len() {
        let ak = zeros.point(k)?;
        let mut acc = 0.0;
        for (j, &g) in gamma.values().iter().enumerate() {
            // zeros are radial, so 1 - a_j a_k is real and positive
            acc += g / one_minus_mul_conj(zeros.point(j)?, ak).re;
        }
        tilde.push(Complex64::new(acc, 0.0));
    }
    Ok(CounterexampleValues {
        values: ValueSequence::new(values),
        tilde: ValueSequence::new(tilde),
    })
}
