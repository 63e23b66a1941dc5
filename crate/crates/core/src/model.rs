//! Model-space elements, boundary quadrature, and dual-route norms.
//!
//! The trace space of `K_B` for a finite product `B` is spanned by the
//! basis `h_j(z) = B(z) / (B'(a_j)(z - a_j))` with `h_j(a_k) = delta_jk`;
//! an element is evaluated from one `B(z)` per point, so a full evaluation
//! costs O(n) after the O(n^2) basis setup. Boundary integrals use the
//! uniform circle grid with node doubling until two successive grids agree;
//! every quadrature result carries its node count and a convergence flag,
//! and nothing downstream hides that flag.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::blaschke::{BlaschkeProduct, ZeroSequence};
use crate::disk::one_minus_mul_conj;
use crate::error::{Error, Result};
use crate::seq::ValueSequence;
use crate::tilde::tilde_apply;

/// Successive-grid relative tolerance for Hardy norms.
pub const HARDY_RTOL: f64 = 1e-10;
/// Successive-grid relative tolerance for Cauchy-kernel traces; tighter
/// than [`HARDY_RTOL`] because the acceptance comparisons sit at 1e-10.
pub const CAUCHY_RTOL: f64 = 1e-12;
/// Pseudo-hyperbolic radius below which basis evaluation switches to the
/// first-order series around the removable singularity.
const SERIES_RADIUS: f64 = 1e-6;
/// First grid size tried by the doubling loops (halved when the cap is
/// smaller, so at least one comparison always happens).
const FIRST_GRID: usize = 256;

// ---------------------------------------------------------------------------
// quadrature grid
// ---------------------------------------------------------------------------

/// Uniform grid `zeta_i = exp(2 pi i k / N)` with equal weights `1/N`.
///
/// Node counts are powers of two so a refined grid reuses every coarse node
/// bit-for-bit. In the doubling loops the grid passed in acts as the *cap*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    node_count: usize,
}

impl QuadratureGrid {
    pub const MIN_NODES: usize = 8;
    pub const MAX_NODES: usize = 1 << 20;

    pub fn new(node_count: usize) -> Result<Self> {
        if !node_count.is_power_of_two()
            || !(Self::MIN_NODES..=Self::MAX_NODES).contains(&node_count)
        {
            return Err(Error::UnsupportedParameter(format!(
                "node count {node_count} must be a power of two in [{}, {}]",
                Self::MIN_NODES,
                Self::MAX_NODES
            )));
        }
        Ok(Self { node_count })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.node_count as f64
    }

    pub fn node(index: usize, node_count: usize) -> Complex64 {
        // index/node_count is exact for power-of-two counts
        Complex64::from_polar(
            1.0,
            std::f64::consts::TAU * (index as f64 / node_count as f64),
        )
    }

    pub fn nodes(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.node_count).map(move |i| Self::node(i, self.node_count))
    }

    /// `(1/N) sum f(zeta_i)` on this fixed grid, no refinement.
    pub fn mean<F>(&self, mut f: F) -> Result<Complex64>
    where
        F: FnMut(Complex64) -> Result<Complex64>,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for z in self.nodes() {
            acc += f(z)?;
        }
        Ok(acc * self.weight())
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { node_count: 1 << 16 }
    }
}

/// A quadrature result together with the grid it stabilized on.
///
/// `converged == false` means the doubling loop hit the cap before two
/// successive grids agreed; the value is the cap-grid value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converged<T> {
    pub value: T,
    pub node_count: usize,
    pub converged: bool,
}

fn first_grid(cap: &QuadratureGrid) -> usize {
    if cap.node_count <= FIRST_GRID {
        cap.node_count / 2
    } else {
        FIRST_GRID
    }
}

// ---------------------------------------------------------------------------
// Hardy norms on the boundary
// ---------------------------------------------------------------------------

fn p_power(v: Complex64, p: f64) -> f64 {
    if p == 1.0 {
        v.norm()
    } else if p == 2.0 {
        v.norm_sqr()
    } else {
        v.norm().powf(p)
    }
}

fn p_root(mean: f64, p: f64) -> f64 {
    if p == 1.0 {
        mean
    } else if p == 2.0 {
        mean.sqrt()
    } else {
        mean.powf(1.0 / p)
    }
}

/// Boundary `H^p` norm by node doubling, successive grids agreeing to
/// `rtol` relatively; `p` is any positive real, the grid is the cap.
pub fn hardy_norm_with_tol<F>(
    mut f: F,
    p: f64,
    cap: &QuadratureGrid,
    rtol: f64,
) -> Result<Converged<f64>>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::UnsupportedParameter(format!(
            "Hardy exponent {p} must be a positive real"
        )));
    }
    if !(rtol.is_finite() && rtol > 0.0) {
        return Err(Error::UnsupportedParameter(format!(
            "quadrature tolerance {rtol} must be a positive real"
        )));
    }
    let mut n = first_grid(cap);
    let mut total = 0.0;
    for i in 0..n {
        total += p_power(f(QuadratureGrid::node(i, n))?, p);
    }
    let mut prev = {
        if !total.is_finite() {
            return Err(Error::NonFiniteSample);
        }
        p_root(total / n as f64, p)
    };
    loop {
        // odd nodes of the doubled grid are the only new ones
        for i in 0..n {
            total += p_power(f(QuadratureGrid::node(2 * i + 1, 2 * n))?, p);
        }
        n *= 2;
        if !total.is_finite() {
            return Err(Error::NonFiniteSample);
        }
        let norm = p_root(total / n as f64, p);
        if (norm - prev).abs() <= rtol * (1.0 + norm.abs()) {
            return Ok(Converged {
                value: norm,
                node_count: n,
                converged: true,
            });
        }
        if n >= cap.node_count {
            return Ok(Converged {
                value: norm,
                node_count: n,
                converged: false,
            });
        }
        prev = norm;
    }
}

/// [`hardy_norm_with_tol`] at the standard tolerance [`HARDY_RTOL`].
pub fn hardy_norm<F>(f: F, p: f64, cap: &QuadratureGrid) -> Result<Converged<f64>>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    hardy_norm_with_tol(f, p, cap, HARDY_RTOL)
}

// ---------------------------------------------------------------------------
// basis and elements
// ---------------------------------------------------------------------------

fn basis_value(
    a: Complex64,
    deriv: Complex64,
    slope: Complex64,
    z: Complex64,
    b_at_z: Complex64,
) -> Complex64 {
    let dz = z - a;
    // pseudo-hyperbolic proximity: |z - a| < eps |1 - conj(a) z|
    let den = Complex64::new(1.0, 0.0) - a.conj() * z;
    if dz.norm() < SERIES_RADIUS * den.norm() {
        Complex64::new(1.0, 0.0) + slope * dz
    } else {
        b_at_z / (deriv * dz)
    }
}

#[derive(Debug, Clone)]
struct KbBasis {
    product: BlaschkeProduct,
    derivs: Vec<Complex64>,
    slopes: Vec<Complex64>,
}

impl KbBasis {
    fn new(zeros: ZeroSequence) -> Result<Self> {
        let product = BlaschkeProduct::new(zeros);
        let n = product.zeros().len();
        let mut derivs = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        for j in 0..n {
            derivs.push(product.derivative_at_zero(j)?);
            slopes.push(product.basis_slope_at_zero(j)?);
        }
        Ok(Self {
            product,
            derivs,
            slopes,
        })
    }

    fn h(&self, j: usize, z: Complex64, b_at_z: Complex64) -> Complex64 {
        basis_value(
            self.product.zeros().points()[j].value(),
            self.derivs[j],
            self.slopes[j],
            z,
            b_at_z,
        )
    }
}

/// Single basis function `h_j(z)`, with the removable singularity at `a_j`
/// filled by its series; `h_j(a_k) = delta_jk` exactly.
pub fn lagrange_eval(zeros: &ZeroSequence, j: usize, z: Complex64) -> Result<Complex64> {
    let product = BlaschkeProduct::new(zeros.clone());
    let deriv = product.derivative_at_zero(j)?;
    let slope = product.basis_slope_at_zero(j)?;
    let b = product.eval(z)?;
    Ok(basis_value(zeros.point(j)?.value(), deriv, slope, z, b))
}

/// The unique element of `K_B` taking value `w_k` at `a_k`.
#[derive(Debug, Clone)]
pub struct ModelSpaceElement {
    basis: KbBasis,
    trace: ValueSequence,
}

/// Builds `sum_j w_j h_j` after validating lengths.
pub fn interpolate_in_kb(zeros: &ZeroSequence, w: &ValueSequence) -> Result<ModelSpaceElement> {
    if w.len() != zeros.len() {
        return Err(Error::LengthMismatch {
            values: w.len(),
            zeros: zeros.len(),
        });
    }
    Ok(ModelSpaceElement {
        basis: KbBasis::new(zeros.clone())?,
        trace: w.clone(),
    })
}

impl ModelSpaceElement {
    pub fn zeros(&self) -> &ZeroSequence {
        self.basis.product.zeros()
    }

    pub fn trace(&self) -> &ValueSequence {
        &self.trace
    }

    pub fn product(&self) -> &BlaschkeProduct {
        &self.basis.product
    }

    pub fn derivative_at_zero(&self, j: usize) -> Result<Complex64> {
        self.basis
            .derivs
            .get(j)
            .copied()
            .ok_or(Error::IndexOutOfBounds {
                index: j,
                len: self.basis.derivs.len(),
            })
    }

    /// `f(z)` and `B(z)` from one pass over the factors.
    pub fn evaluate_with_product(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let b = self.basis.product.eval(z)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, w) in self.trace.iter().enumerate() {
            acc += w * self.basis.h(j, z, b);
        }
        Ok((acc, b))
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.evaluate_with_product(z)?.0)
    }

    /// Largest deviation `|f(a_k) - w_k|`; zero up to rounding by
    /// construction, used as a self-check in reports.
    pub fn trace_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (k, a) in self.zeros().points().iter().enumerate() {
            let v = self.evaluate(a.value())?;
            worst = worst.max((v - self.trace.get(k)?).norm());
        }
        Ok(worst)
    }

    /// Boundary samples as CSV rows `theta,re_f,im_f` on a fixed grid.
    pub fn boundary_csv(&self, grid: &QuadratureGrid) -> Result<String> {
        let mut out = String::from("theta,re_f,im_f\n");
        let n = grid.node_count();
        for i in 0..n {
            let theta = std::f64::consts::TAU * (i as f64 / n as f64);
            let v = self.evaluate(QuadratureGrid::node(i, n))?;
            out.push_str(&format!("{theta},{},{}\n", v.re, v.im));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Cauchy-kernel traces and residue identity
// ---------------------------------------------------------------------------

/// Trace of the tilde partner via boundary quadrature.
///
/// The partner `g` of `f` has boundary values `conj(zeta) conj(f(zeta))
/// B(zeta)`, and `g(a_k)` is recovered by the Szego kernel mean
/// `(1/N) sum_i g(zeta_i) / (1 - a_k conj(zeta_i))`. The returned values
/// are `g(a_k)`, the entrywise conjugate of the trace-side transform; this
/// is the quadrature route that double-checks [`tilde_apply`].
pub fn tilde_trace_via_cauchy(
    f: &ModelSpaceElement,
    cap: &QuadratureGrid,
) -> Result<Converged<ValueSequence>> {
    let zeros = f.zeros().clone();
    let nz = zeros.len();
    let mut n = first_grid(cap);
    let mut totals = vec![Complex64::new(0.0, 0.0); nz];
    let accumulate = |totals: &mut [Complex64], z: Complex64| -> Result<()> {
        let (fv, bv) = f.evaluate_with_product(z)?;
        let g = z.conj() * fv.conj() * bv;
        for (t, a) in totals.iter_mut().zip(zeros.points()) {
            *t += g / (Complex64::new(1.0, 0.0) - a.value() * z.conj());
        }
        Ok(())
    };
    for i in 0..n {
        accumulate(&mut totals, QuadratureGrid::node(i, n))?;
    }
    let mut prev: Vec<Complex64> = totals.iter().map(|t| t / n as f64).collect();
    loop {
        for i in 0..n {
            accumulate(&mut totals, QuadratureGrid::node(2 * i + 1, 2 * n))?;
        }
        n *= 2;
        let cur: Vec<Complex64> = totals.iter().map(|t| t / n as f64).collect();
        if cur.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFiniteSample);
        }
        let scale = cur.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let step = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if step <= CAUCHY_RTOL * (1.0 + scale) {
            return Ok(Converged {
                value: ValueSequence::new(cur),
                node_count: n,
                converged: true,
            });
        }
        if n >= cap.node_count {
            return Ok(Converged {
                value: ValueSequence::new(cur),
                node_count: n,
                converged: false,
            });
        }
        prev = cur;
    }
}

/// Both sides of the residue identity at index `k`.
#[derive(Debug, Clone)]
pub struct ResidueCheck {
    /// Boundary mean `(1/N) sum_i zeta_i f(zeta_i) / (B(zeta_i)(1 - zeta_i conj(a_k)))`.
    pub quadrature: Converged<Complex64>,
    /// Residue sum `sum_j w_j / (B'(a_j)(1 - a_j conj(a_k)))`, the `k`-th
    /// transform entry.
    pub residues: Complex64,
}

/// Contour integral of `f / (B (1 - conj(a_k) z))` against its residue sum.
pub fn residue_identity_check(
    zeros: &ZeroSequence,
    w: &ValueSequence,
    k: usize,
    cap: &QuadratureGrid,
) -> Result<ResidueCheck> {
    let ak = *zeros.point(k)?;
    let f = interpolate_in_kb(zeros, w)?;
    let residues = tilde_apply(w, zeros)?.get(k)?;
    let mut n = first_grid(cap);
    let mut total = Complex64::new(0.0, 0.0);
    let accumulate = |total: &mut Complex64, z: Complex64| -> Result<()> {
        let (fv, bv) = f.evaluate_with_product(z)?;
        if bv.norm() < 1e-300 {
            return Err(Error::PoleProximity);
        }
        *total += z * fv / (bv * (Complex64::new(1.0, 0.0) - z * ak.value().conj()));
        Ok(())
    };
    for i in 0..n {
        accumulate(&mut total, QuadratureGrid::node(i, n))?;
    }
    let mut prev = total / n as f64;
    loop {
        for i in 0..n {
            accumulate(&mut total, QuadratureGrid::node(2 * i + 1, 2 * n))?;
        }
        n *= 2;
        let cur = total / n as f64;
        if !cur.re.is_finite() || !cur.im.is_finite() {
            return Err(Error::NonFiniteSample);
        }
        let done = (cur - prev).norm() <= CAUCHY_RTOL * (1.0 + cur.norm());
        if done || n >= cap.node_count {
            return Ok(ResidueCheck {
                quadrature: Converged {
                    value: cur,
                    node_count: n,
                    converged: done,
                },
                residues,
            });
        }
        prev = cur;
    }
}

// ---------------------------------------------------------------------------
// Gram-matrix H^2 oracle
// ---------------------------------------------------------------------------

/// `H^2` norm of the interpolant through the reproducing kernels.
///
/// Solves the Cauchy-kernel system `sum_j c_j / (1 - conj(a_j) a_i) = w_i`
/// and returns `sqrt(c^H G c)` with the same kernel Gram matrix `G`. For
/// zeros of `B` the kernel span *is* the model space, so this must match
/// the boundary-quadrature norm of [`interpolate_in_kb`]; the two routes
/// share no code and cross-check each other.
pub fn h2_norm_via_gram(zeros: &ZeroSequence, w: &ValueSequence) -> Result<f64> {
    if w.len() != zeros.len() {
        return Err(Error::LengthMismatch {
            values: w.len(),
            zeros: zeros.len(),
        });
    }
    let n = zeros.len();
    let mut gram = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = Complex64::new(1.0, 0.0)
                / one_minus_mul_conj(zeros.point(i)?, zeros.point(j)?);
        }
    }
    let rhs = DVector::from_iterator(n, w.iter().copied());
    let coeffs = gram
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("kernel Gram matrix".into()))?;
    let norm_sq = coeffs.dotc(&(&gram * &coeffs)).re;
    Ok(norm_sq.max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// squared-basis interpolant
// ---------------------------------------------------------------------------

/// Interpolant through the squared basis, `sum_j w_j h_j(z)^2`.
///
/// The squares still satisfy `h_j(a_k)^2 = delta_jk`, but they live in the
/// model space of `B^2`, where summability of traces against the gaps is
/// the full story; its `H^1` norm is the quantity of interest.
#[derive(Debug, Clone)]
pub struct VinogradovInterpolant {
    basis: KbBasis,
    trace: ValueSequence,
}

impl VinogradovInterpolant {
    pub fn zeros(&self) -> &ZeroSequence {
        self.basis.product.zeros()
    }

    pub fn trace(&self) -> &ValueSequence {
        &self.trace
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let b = self.basis.product.eval(z)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, w) in self.trace.iter().enumerate() {
            let h = self.basis.h(j, z, b);
            acc += w * h * h;
        }
        Ok(acc)
    }

    pub fn trace_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (k, a) in self.zeros().points().iter().enumerate() {
            let v = self.evaluate(a.value())?;
            worst = worst.max((v - self.trace.get(k)?).norm());
        }
        Ok(worst)
    }
}

/// Builds the squared-basis interpolant and measures its `H^1` norm.
pub fn vinogradov_interpolant(
    zeros: &ZeroSequence,
    w: &ValueSequence,
    cap: &QuadratureGrid,
) -> Result<(VinogradovInterpolant, Converged<f64>)> {
    if w.len() != zeros.len() {
        return Err(Error::LengthMismatch {
            values: w.len(),
            zeros: zeros.len(),
        });
    }
    let interpolant = VinogradovInterpolant {
        basis: KbBasis::new(zeros.clone())?,
        trace: w.clone(),
    };
    let probe = interpolant.clone();
    let h1 = hardy_norm(move |z| probe.evaluate(z), 1.0, cap)?;
    Ok((interpolant, h1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::DiskPoint;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn radial(vals: &[f64]) -> ZeroSequence {
        ZeroSequence::new(
            vals.iter()
                .map(|&re| DiskPoint::new(c(re, 0.0)).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn grid_validation_and_exactness() {
        assert!(QuadratureGrid::new(100).is_err());
        assert!(QuadratureGrid::new(4).is_err());
        let g = QuadratureGrid::new(256).unwrap();
        // integrates constants exactly
        assert_eq!(g.mean(|_| Ok(c(1.0, 0.0))).unwrap(), c(1.0, 0.0));
        // kills pure frequencies 0 < m < N up to rounding
        let m5 = g.mean(|z| Ok(z.powu(5))).unwrap();
        assert!(m5.norm() < 1e-13);
        let mneg = g.mean(|z| Ok(z.conj().powu(3))).unwrap();
        assert!(mneg.norm() < 1e-13);
        // nodes sit on the circle
        for z in g.nodes() {
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hardy_norm_hand_values() {
        let cap = QuadratureGrid::new(1 << 14).unwrap();
        // constants and monomials have unit modulus on the circle
        let one = hardy_norm(|_| Ok(c(0.5, 0.0)), 1.0, &cap).unwrap();
        assert_eq!(one.value, 0.5);
        assert!(one.converged);
        assert_eq!(one.node_count, 512);
        let z5 = hardy_norm(|z| Ok(z.powu(5)), 3.0, &cap).unwrap();
        assert_relative_eq!(z5.value, 1.0, max_relative = 1e-12);
        // geometric kernel: |1/(1 - z/2)|_2 = sqrt(4/3)
        let k = hardy_norm(
            |z| Ok(Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - z * 0.5)),
            2.0,
            &cap,
        )
        .unwrap();
        assert!(k.converged);
        assert!((k.value - (4.0f64 / 3.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn hardy_norm_flags_non_convergence_at_the_cap() {
        // pole at 1/0.97: decay too slow for a 512-node cap
        let cap = QuadratureGrid::new(512).unwrap();
        let r = hardy_norm(
            |z| Ok(Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - z * 0.97)),
            2.0,
            &cap,
        )
        .unwrap();
        assert!(!r.converged);
        assert_eq!(r.node_count, 512);
        // a generous cap converges on the same integrand
        let wide = hardy_norm(
            |z| Ok(Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - z * 0.97)),
            2.0,
            &QuadratureGrid::new(1 << 16).unwrap(),
        )
        .unwrap();
        assert!(wide.converged);
    }

    #[test]
    fn hardy_norm_rejects_bad_exponents() {
        let cap = QuadratureGrid::default();
        assert!(hardy_norm(|_| Ok(c(1.0, 0.0)), 0.0, &cap).is_err());
        assert!(hardy_norm(|_| Ok(c(1.0, 0.0)), -1.0, &cap).is_err());
        assert!(hardy_norm(|_| Ok(c(1.0, 0.0)), f64::NAN, &cap).is_err());
        assert!(hardy_norm_with_tol(|_| Ok(c(1.0, 0.0)), 1.0, &cap, 0.0).is_err());
    }

    #[test]
    fn interpolation_hand_values() {
        // zeros {0, 1/2}, w = (1, 0): f = h_0, f(1/4) = (1 - 2z)/(1 - z/2) at 1/4 = 4/7
        let zeros = radial(&[0.0, 0.5]);
        let w = ValueSequence::from_reals(&[1.0, 0.0]);
        let f = interpolate_in_kb(&zeros, &w).unwrap();
        let v = f.evaluate(c(0.25, 0.0)).unwrap();
        assert_relative_eq!(v.re, 4.0 / 7.0, max_relative = 1e-14);
        assert_eq!(v.im, 0.0);
        // values at the zeros reproduce the trace exactly
        assert_eq!(f.evaluate(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(f.evaluate(c(0.5, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(f.trace_defect().unwrap(), 0.0);
    }

    #[test]
    fn series_branch_agrees_with_direct_branch() {
        let zeros = radial(&[0.0, 0.5]);
        let w = ValueSequence::from_reals(&[1.0, -2.0]);
        let f = interpolate_in_kb(&zeros, &w).unwrap();
        // inside the series radius around a = 1/2 the evaluator switches to
        // 1 + s (z - a); the raw quotient is still good to ~1e-9 there, so
        // the two branches must agree to that accuracy
        let z = c(0.5 + 4e-7, 3e-7);
        let via_series = f.evaluate(z).unwrap();
        let product = BlaschkeProduct::new(zeros.clone());
        let raw_h1 = product.eval(z).unwrap()
            / (product.derivative_at_zero(1).unwrap() * (z - c(0.5, 0.0)));
        let raw = w.get(0).unwrap() * lagrange_eval(&zeros, 0, z).unwrap()
            + w.get(1).unwrap() * raw_h1;
        assert!((via_series - raw).norm() < 1e-8);
    }

    #[test]
    fn lagrange_eval_is_the_unit_trace_element() {
        let zeros = radial(&[0.0, 0.5, 0.8]);
        for j in 0..3 {
            for (k, a) in zeros.points().iter().enumerate() {
                let v = lagrange_eval(&zeros, j, a.value()).unwrap();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert_eq!(v, c(expect, 0.0));
            }
        }
        let h1 = lagrange_eval(&zeros, 1, c(0.25, 0.0)).unwrap();
        let w = ValueSequence::from_reals(&[0.0, 1.0, 0.0]);
        let f = interpolate_in_kb(&zeros, &w).unwrap();
        assert_eq!(h1, f.evaluate(c(0.25, 0.0)).unwrap());
        assert!(lagrange_eval(&zeros, 5, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn cauchy_trace_matches_conjugated_transform() {
        let zeros = radial(&[0.0, 0.5]);
        let w = ValueSequence::from_reals(&[1.0, 0.0]);
        let f = interpolate_in_kb(&zeros, &w).unwrap();
        let cap = QuadratureGrid::new(1 << 14).unwrap();
        let traced = tilde_trace_via_cauchy(&f, &cap).unwrap();
        assert!(traced.converged);
        // w~ = (2, 2) for this data, and the Cauchy route returns conj(w~)
        let expect = tilde_apply(&w, &zeros).unwrap();
        for k in 0..2 {
            let got = traced.value.get(k).unwrap();
            let want = expect.get(k).unwrap().conj();
            assert!((got - want).norm() < 1e-10);
        }
    }

    #[test]
    fn residue_identity_on_hand_example() {
        let zeros = radial(&[0.0, 0.5]);
        let w = ValueSequence::from_reals(&[1.0, 0.0]);
        let cap = QuadratureGrid::new(1 << 14).unwrap();
        for k in 0..2 {
            let check = residue_identity_check(&zeros, &w, k, &cap).unwrap();
            assert!(check.quadrature.converged);
            assert_eq!(check.residues, c(2.0, 0.0));
            assert!((check.quadrature.value - check.residues).norm() < 1e-10);
        }
        assert!(residue_identity_check(&zeros, &w, 2, &cap).is_err());
    }

    #[test]
    fn gram_oracle_hand_value_and_cross_check() {
        // f = h_0 on zeros {0, 1/2} has H^2 norm exactly 2
        let zeros = radial(&[0.0, 0.5]);
        let w = ValueSequence::from_reals(&[1.0, 0.0]);
        let gram = h2_norm_via_gram(&zeros, &w).unwrap();
        assert_relative_eq!(gram, 2.0, max_relative = 1e-12);
        let f = interpolate_in_kb(&zeros, &w).unwrap();
        let quad = hardy_norm(
            |z| f.evaluate(z),
            2.0,
            &QuadratureGrid::new(1 << 14).unwrap(),
        )
        .unwrap();
        assert!(quad.converged);
        assert!((quad.value - gram).abs() < 1e-9);
    }

    #[test]
    fn vinogradov_on_single_zero_is_constant() {
        // B(z) = z: h_0 = 1 identically, so the squared interpolant is the
        // constant trace value and its H^1 norm is that modulus
        let zeros = radial(&[0.0]);
        let w = ValueSequence::new(vec![c(0.3, -0.4)]);
        let cap = QuadratureGrid::new(1 << 12).unwrap();
        let (f, h1) = vinogradov_interpolant(&zeros, &w, &cap).unwrap();
        assert!((f.evaluate(c(0.2, 0.1)).unwrap() - c(0.3, -0.4)).norm() < 1e-12);
        assert!(h1.converged);
        assert_relative_eq!(h1.value, 0.5, max_relative = 1e-10);
    }

    #[test]
    fn vinogradov_interpolates_squared_basis() {
        let zeros = radial(&[0.0, 0.5, 0.75]);
        let w = ValueSequence::from_reals(&[1.0, 1.0, 1.0]);
        let cap = QuadratureGrid::new(1 << 14).unwrap();
        let (f, h1) = vinogradov_interpolant(&zeros, &w, &cap).unwrap();
        assert!(f.trace_defect().unwrap() < 1e-12);
        assert!(h1.converged);
        assert!(h1.value > 0.0);
    }

    proptest! {
        // Parseval oracle: for a polynomial, the quadrature H^2 norm equals
        // sqrt(sum |coeff|^2) and the grid is exact once N exceeds the degree
        #[test]
        fn hardy_matches_parseval_for_polynomials(
            coeffs in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..6),
        ) {
            let cap = QuadratureGrid::new(1 << 12).unwrap();
            let cs: Vec<Complex64> = coeffs.iter().map(|&(a, b)| c(a, b)).collect();
            let eval = |z: Complex64| {
                let mut acc = Complex64::new(0.0, 0.0);
                for ck in cs.iter().rev() {
                    acc = acc * z + ck;
                }
                Ok(acc)
            };
            let norm = hardy_norm(eval, 2.0, &cap).unwrap();
            let parseval = cs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(norm.converged);
            prop_assert!((norm.value - parseval).abs() <= 1e-10 * (1.0 + parseval));
        }

        // interpolation is linear in the trace
        #[test]
        fn interpolation_is_linear(
            w1 in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 3),
            s in -2.0..2.0f64,
            t in 0.0..std::f64::consts::TAU,
        ) {
            let zeros = radial(&[0.1, 0.5, 0.8]);
            let u = ValueSequence::new(w1.iter().map(|&(a, b)| c(a, b)).collect());
            let su = ValueSequence::new(u.iter().map(|v| v * s).collect());
            let z = Complex64::from_polar(0.93, t);
            let fu = interpolate_in_kb(&zeros, &u).unwrap().evaluate(z).unwrap();
            let fsu = interpolate_in_kb(&zeros, &su).unwrap().evaluate(z).unwrap();
            prop_assert!((fsu - fu * s).norm() <= 1e-10 * (1.0 + fu.norm()));
        }

        // the model-space element is bounded by its kernel expansion on the
        // closed disk: |f(z)| stays finite right up to the boundary
        #[test]
        fn evaluation_is_finite_on_the_closed_disk(
            t in 0.0..std::f64::consts::TAU,
            r in 0.0..=1.0f64,
        ) {
            let zeros = radial(&[0.0, 0.6, 0.9]);
            let w = ValueSequence::from_reals(&[1.0, -1.0, 1.0]);
            let f = interpolate_in_kb(&zeros, &w).unwrap();
            let v = f.evaluate(Complex64::from_polar(r, t)).unwrap();
            prop_assert!(v.re.is_finite() && v.im.is_finite());
        }
    }
}
