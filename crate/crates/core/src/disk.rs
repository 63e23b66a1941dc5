//! Points of the open unit disk with an optional exact boundary gap.
//!
//! Radial families like `a_k = 1 - 2^-k` are specified by their gap
//! `1 - a_k`; reconstructing the gap by subtraction from a stored value is
//! exact only while the value itself is representable below 1.0, and all
//! precision-critical pair quantities (`1 - a_j a_k`, `1 - |a|^2`,
//! pseudo-hyperbolic distances) have cancellation-free forms in the gaps.
//! `DiskPoint` therefore carries the gap alongside the value whenever the
//! caller supplied one, and the helpers here pick the gap route whenever
//! both operands admit it.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest admissible stored gap, 2^-52: thinner gaps leave `1 - gap`
/// with no relative accuracy (and below 2^-54 it rounds to 1.0 outright).
pub const MIN_GAP: f64 = f64::EPSILON;

/// A point of the open unit disk `|z| < 1`.
///
/// Radial points built through [`DiskPoint::from_gap`] remember the exact
/// distance `1 - |a|` to the boundary; geometric helpers use it to avoid
/// catastrophic cancellation near the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    value: Complex64,
    gap: Option<f64>,
}

impl DiskPoint {
    /// Wraps a complex value, rejecting points on or outside the circle.
    pub fn new(value: Complex64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() || value.norm() >= 1.0 {
            return Err(Error::PointOutsideDisk(value));
        }
        Ok(Self { value, gap: None })
    }

    /// Radial point `1 - gap` on the nonnegative real axis, keeping `gap`
    /// exact. `gap = 1` is the origin.
    pub fn from_gap(gap: f64) -> Result<Self> {
        if !(gap > 0.0 && gap <= 1.0) {
            return Err(Error::GapOutOfRange(gap));
        }
        if gap < MIN_GAP {
            return Err(Error::GapTooSmall(gap));
        }
        Ok(Self {
            value: Complex64::new(1.0 - gap, 0.0),
            gap: Some(gap),
        })
    }

    /// Wraps a value together with an externally computed gap; the pair must
    /// agree with `1 - |value|` to a few ulps.
    pub fn with_gap(value: Complex64, gap: f64) -> Result<Self> {
        let point = Self::new(value)?;
        if !(gap > 0.0 && gap <= 1.0) {
            return Err(Error::GapOutOfRange(gap));
        }
        let computed = 1.0 - point.value.norm();
        if (gap - computed).abs() > 4.0 * f64::EPSILON * gap.max(computed) {
            return Err(Error::GapInconsistent { gap, computed });
        }
        Ok(Self {
            value,
            gap: Some(gap),
        })
    }

    pub fn origin() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            gap: Some(1.0),
        }
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    /// Distance to the unit circle, `1 - |a|`: the stored gap when one was
    /// supplied, otherwise computed (exact for `|a| >= 1/2` by Sterbenz).
    pub fn gap(&self) -> f64 {
        self.gap.unwrap_or_else(|| 1.0 - self.value.norm())
    }

    pub fn stored_gap(&self) -> Option<f64> {
        self.gap
    }

    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    pub fn is_origin(&self) -> bool {
        self.value.re == 0.0 && self.value.im == 0.0
    }

    /// True for points on the nonnegative real axis; these are the points
    /// whose pair products stay in exact gap arithmetic.
    pub fn is_radial(&self) -> bool {
        self.value.im == 0.0 && self.value.re >= 0.0
    }
}

// ---------------------------------------------------------------------------
// cancellation-free pair quantities
// ---------------------------------------------------------------------------

/// `1 - p * conj(q)`, routed through `e_p + e_q - e_p e_q` when both points
/// are radial so the result keeps full relative accuracy near the boundary.
pub fn one_minus_mul_conj(p: &DiskPoint, q: &DiskPoint) -> Complex64 {
    if p.is_radial() && q.is_radial() {
        let (ep, eq) = (p.gap(), q.gap());
        Complex64::new(ep + eq - ep * eq, 0.0)
    } else {
        Complex64::new(1.0, 0.0) - p.value * q.value.conj()
    }
}

/// `1 - |p|^2` as `gap * (2 - gap)`.
pub fn one_minus_abs_sq(p: &DiskPoint) -> f64 {
    let g = p.gap();
    g * (2.0 - g)
}

/// Pseudo-hyperbolic distance `|z - w| / |1 - conj(w) z|`.
///
/// Symmetric by construction (numerator and denominator are evaluated the
/// same way under operand swap) and exact in the radial gap route.
pub fn pseudo_hyperbolic(z: &DiskPoint, w: &DiskPoint) -> f64 {
    if z.value == w.value {
        return 0.0;
    }
    if z.is_radial() && w.is_radial() {
        let (ez, ew) = (z.gap(), w.gap());
        return (ez - ew).abs() / (ez + ew - ez * ew);
    }
    let num = (z.value - w.value).norm();
    let den = one_minus_mul_conj(z, w).norm();
    num / den
}

/// Single Blaschke factor `(|a|/a) (a - z) / (1 - conj(a) z)`, with the
/// factor for `a = 0` taken to be `z` itself.
pub fn blaschke_factor(a: &DiskPoint, z: Complex64) -> Result<Complex64> {
    if a.is_origin() {
        return Ok(z);
    }
    let den = Complex64::new(1.0, 0.0) - a.value.conj() * z;
    if den.norm() < 1e-300 {
        return Err(Error::PoleProximity);
    }
    // |a|/a = conj(a)/|a|, one division instead of a complex reciprocal
    let phase = a.value.conj() / a.modulus();
    Ok(phase * (a.value - z) / den)
}

/// Blaschke factor of `a` evaluated at another disk point, taking the gap
/// route for radial pairs: `(e_z - e_a) / (e_a + e_z - e_a e_z)`.
pub(crate) fn blaschke_factor_at_point(a: &DiskPoint, z: &DiskPoint) -> Complex64 {
    if a.is_origin() {
        return z.value;
    }
    if a.is_radial() && z.is_radial() {
        let (ea, ez) = (a.gap(), z.gap());
        // phase |a|/a = 1 on the positive real axis
        return Complex64::new((ez - ea) / (ea + ez - ea * ez), 0.0);
    }
    let phase = a.value.conj() / a.modulus();
    // 1 - z * conj(a) is the factor's denominator 1 - conj(a) z
    phase * (a.value - z.value) / one_minus_mul_conj(z, a)
}
