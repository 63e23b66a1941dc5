//! The tilde transform on traces and its closed-form inverse.
//!
//! For a trace `w` on the zeros of `B`, the transform is
//! `w~_k = sum_j w_j / (B'(a_j)(1 - a_j conj(a_k)))`; the inverse has the
//! same shape with every coefficient conjugated, so the two matrices are
//! entrywise conjugates of one another and compose to the identity. Both
//! are assembled entrywise with gap-aware kernels; nothing here ever
//! inverts a matrix numerically.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::blaschke::{BlaschkeProduct, ZeroSequence};
use crate::disk::one_minus_mul_conj;
use crate::error::{Error, Result};
use crate::seq::ValueSequence;

/// Forward and inverse transform matrices for one zero sequence.
///
/// `forward[(k, j)] = 1 / (B'(a_j)(1 - a_j conj(a_k)))` and the inverse is
/// its entrywise conjugate; `inverse * forward = I` up to conditioning.
#[derive(Debug, Clone)]
pub struct TildeMatrices {
    pub forward: DMatrix<Complex64>,
    pub inverse: DMatrix<Complex64>,
}

fn derivative_column(zeros: &ZeroSequence) -> Result<Vec<Complex64>> {
    let product = BlaschkeProduct::new(zeros.clone());
    (0..zeros.len())
        .map(|j| product.derivative_at_zero(j))
        .collect()
}

/// Applies the transform without materializing the matrix.
pub fn tilde_apply(w: &ValueSequence, zeros: &ZeroSequence) -> Result<ValueSequence> {
    if w.len() != zeros.len() {
        return Err(Error::LengthMismatch {
            values: w.len(),
            zeros: zeros.len(),
        });
    }
    let derivs = derivative_column(zeros)?;
    let mut out = Vec::with_capacity(zeros.len());
    for ak in zeros.points() {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((wj, dj), aj) in w.iter().zip(&derivs).zip(zeros.points()) {
            acc += wj / (dj * one_minus_mul_conj(aj, ak));
        }
        out.push(acc);
    }
    Ok(ValueSequence::new(out))
}

/// Applies the closed-form inverse: conjugate every coefficient of the
/// forward kernel.
pub fn tilde_invert(wt: &ValueSequence, zeros: &ZeroSequence) -> Result<ValueSequence> {
    if wt.len() != zeros.len() {
        return Err(Error::LengthMismatch {
            values: wt.len(),
            zeros: zeros.len(),
        });
    }
    let derivs = derivative_column(zeros)?;
    let mut out = Vec::with_capacity(zeros.len());
    for ak in zeros.points() {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((vj, dj), aj) in wt.iter().zip(&derivs).zip(zeros.points()) {
            acc += vj / (dj.conj() * one_minus_mul_conj(aj, ak).conj());
        }
        out.push(acc);
    }
    Ok(ValueSequence::new(out))
}

/// Materializes both transform matrices.
pub fn tilde_matrices(zeros: &ZeroSequence) -> Result<TildeMatrices> {
    let n = zeros.len();
    let derivs = derivative_column(zeros)?;
    let mut forward = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            let kernel = one_minus_mul_conj(zeros.point(j)?, zeros.point(k)?);
            forward[(k, j)] = Complex64::new(1.0, 0.0) / (derivs[j] * kernel);
        }
    }
    let inverse = forward.map(|v| v.conj());
    Ok(TildeMatrices { forward, inverse })
}

impl TildeMatrices {
    pub fn dim(&self) -> usize {
        self.forward.nrows()
    }

    /// Largest entry of `inverse * forward - I`; conditioning probe used by
    /// the round-trip acceptance check.
    pub fn composition_defect(&self) -> f64 {
        let n = self.dim();
        let prod = &self.inverse * &self.forward;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for j in 0..n {
                let expect = if k == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(k, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }
}

/// Singular-value bounds of the transform between gap-weighted `l^2`
/// spaces: returns `(sigma_min, sigma_max)` of `D^(1/2) T D^(-1/2)` with
/// `D = diag(1 - |a_k|)`.
///
/// For `p = 1` and `p = infinity` the returned pair brackets the induced
/// norm instead: weighted column and row sup-sums. Those are upper bounds
/// ("bound", not "norm") and are labeled so in reports.
pub fn weighted_operator_bounds(zeros: &ZeroSequence, p: f64) -> Result<(f64, f64)> {
    let matrices = tilde_matrices(zeros)?;
    let n = zeros.len();
    let gaps: Vec<f64> = zeros.points().iter().map(|a| a.gap()).collect();
    if p == 2.0 {
        let mut m = matrices.forward.clone();
        for k in 0..n {
            for j in 0..n {
                m[(k, j)] *= (gaps[k] / gaps[j]).sqrt();
            }
        }
        let sv = m.svd(false, false).singular_values;
        let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
        let smin = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        return Ok((smin, smax));
    }
    if p == 1.0 {
        // induced weighted l^1 bound: sup_j (1/d_j) sum_k d_k |T_kj|
        let bound = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| gaps[k] * matrices.forward[(k, j)].norm())
                    .sum::<f64>()
                    / gaps[j]
            })
            .fold(0.0f64, f64::max);
        return Ok((0.0, bound));
    }
    if p.is_infinite() && p > 0.0 {
        // induced sup-norm bound: sup_k sum_j |T_kj|
        let bound = (0..n)
            .map(|k| (0..n).map(|j| matrices.forward[(k, j)].norm()).sum::<f64>())
            .fold(0.0f64, f64::max);
        return Ok((0.0, bound));
    }
    Err(Error::UnsupportedParameter(format!(
        "operator bounds support p = 1, 2, infinity, got {p}"
    )))
}
