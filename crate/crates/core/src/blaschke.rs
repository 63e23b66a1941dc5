//! Finite Blaschke products and their separation diagnostics.
//!
//! A [`ZeroSequence`] is a validated list of distinct disk points; a
//! [`BlaschkeProduct`] multiplies the factors in increasing-modulus order so
//! evaluation is deterministic regardless of input order. Derivatives at the
//! zeros use the closed form `B'(a_j) = b_j'(a_j) * prod_{k != j} b_k(a_j)`
//! with `b_j'(a_j) = -(|a_j|/a_j) / (1 - |a_j|^2)`, which stays accurate in
//! gap arithmetic where finite differences lose everything near the circle.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::disk::{
    blaschke_factor, blaschke_factor_at_point, one_minus_abs_sq, one_minus_mul_conj,
    pseudo_hyperbolic, DiskPoint,
};
use crate::error::{Error, Result};

/// Hard cap on the number of zeros; everything here is dense and O(n^2) or
/// worse, and the experiments never need more.
pub const MAX_ZEROS: usize = 64;

/// Conditioning threshold: below this product separation the tilde system
/// is close enough to singular that reports carry a warning.
pub const CONDITIONING_DELTA: f64 = 0.05;

// ---------------------------------------------------------------------------
// ZeroSequence
// ---------------------------------------------------------------------------

/// Distinct zeros of a finite Blaschke product.
///
/// `radial_sorted` is detected, not declared: it is true exactly when every
/// point lies on the nonnegative real axis in strictly increasing order,
/// which is the precondition for the radially-ordered sequence operations.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSequence {
    points: Vec<DiskPoint>,
    radial_sorted: bool,
}

impl ZeroSequence {
    pub fn new(points: Vec<DiskPoint>) -> Result<Self> {
        if points.is_empty() || points.len() > MAX_ZEROS {
            return Err(Error::SequenceLength {
                got: points.len(),
                max: MAX_ZEROS,
            });
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i].value() == points[j].value() {
                    return Err(Error::DuplicateZeros(i, j));
                }
            }
        }
        let radial_sorted = points.iter().all(|p| p.is_radial())
            && points.windows(2).all(|w| w[0].value().re < w[1].value().re);
        Ok(Self {
            points,
            radial_sorted,
        })
    }

    /// Radial sequence from boundary gaps; gaps must strictly decrease so the
    /// points `1 - gap` strictly increase.
    pub fn from_gaps(gaps: &[f64]) -> Result<Self> {
        let points = gaps
            .iter()
            .map(|&g| DiskPoint::from_gap(g))
            .collect::<Result<Vec<_>>>()?;
        let seq = Self::new(points)?;
        if !seq.radial_sorted {
            return Err(Error::NotRadialSorted);
        }
        Ok(seq)
    }

    /// The family `a_k = 1 - q^k`, `k = 1..=n`, for `0 < q < 1`.
    pub fn geometric_radial(q: f64, n: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::UnsupportedParameter(format!(
                "geometric ratio {q} must lie in (0, 1)"
            )));
        }
        let mut gaps = Vec::with_capacity(n);
        let mut g = 1.0;
        for _ in 0..n {
            g *= q;
            gaps.push(g);
        }
        Self::from_gaps(&gaps)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> Result<&DiskPoint> {
        self.points.get(k).ok_or(Error::IndexOutOfBounds {
            index: k,
            len: self.points.len(),
        })
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.points
    }

    pub fn radial_sorted(&self) -> bool {
        self.radial_sorted
    }

    /// First `n` points as a new sequence.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.points.len() {
            return Err(Error::IndexOutOfBounds {
                index: n,
                len: self.points.len(),
            });
        }
        Self::new(self.points[..n].to_vec())
    }

    /// Sum of the boundary gaps; finite Blaschke condition placeholder used
    /// as the m = 0 Carleson box mass.
    pub fn gap_sum(&self) -> f64 {
        self.points.iter().map(|p| p.gap()).sum()
    }
}

// JSON form: array of {"re": .., "im": ..} or {"gap": ..} objects. Gap
// entries round-trip bit-exactly, which the radial families rely on.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointSpec {
    Gap { gap: f64 },
    Cartesian { re: f64, im: f64 },
}

impl Serialize for ZeroSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let specs: Vec<PointSpec> = self
            .points
            .iter()
            .map(|p| match p.stored_gap() {
                Some(gap) if p.is_radial() => PointSpec::Gap { gap },
                _ => PointSpec::Cartesian {
                    re: p.value().re,
                    im: p.value().im,
                },
            })
            .collect();
        specs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ZeroSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let specs = Vec::<PointSpec>::deserialize(deserializer)?;
        let points = specs
            .into_iter()
            .map(|s| match s {
                PointSpec::Gap { gap } => DiskPoint::from_gap(gap),
                PointSpec::Cartesian { re, im } => DiskPoint::new(Complex64::new(re, im)),
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ZeroSequence::new(points).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// BlaschkeProduct
// ---------------------------------------------------------------------------

/// Product of the factors of a [`ZeroSequence`], evaluated in increasing
/// modulus order (ties by index) for run-to-run determinism.
#[derive(Debug, Clone)]
pub struct BlaschkeProduct {
    zeros: ZeroSequence,
    eval_order: Vec<usize>,
}

impl BlaschkeProduct {
    pub fn new(zeros: ZeroSequence) -> Self {
        let mut eval_order: Vec<usize> = (0..zeros.len()).collect();
        // modulus ties broken by value so the order (and hence the rounding)
        // is invariant under permutations of the input
        eval_order.sort_by(|&i, &j| {
            let (p, q) = (zeros.points[i].value(), zeros.points[j].value());
            zeros.points[i]
                .modulus()
                .total_cmp(&zeros.points[j].modulus())
                .then(p.re.total_cmp(&q.re))
                .then(p.im.total_cmp(&q.im))
        });
        Self { zeros, eval_order }
    }

    pub fn zeros(&self) -> &ZeroSequence {
        &self.zeros
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for &k in &self.eval_order {
            acc *= blaschke_factor(&self.zeros.points[k], z)?;
        }
        Ok(acc)
    }

    /// `sum_k ln |b_k(z)|`; diagnostic companion to [`eval`](Self::eval) for
    /// magnitudes too small to represent as a product.
    pub fn eval_log_modulus(&self, z: Complex64) -> Result<f64> {
        let mut acc = 0.0;
        for &k in &self.eval_order {
            acc += blaschke_factor(&self.zeros.points[k], z)?.norm().ln();
        }
        Ok(acc)
    }

    /// Closed-form `B'(a_j)`; never differentiates numerically.
    pub fn derivative_at_zero(&self, j: usize) -> Result<Complex64> {
        let a = self.zeros.point(j)?;
        let own = if a.is_origin() {
            Complex64::new(1.0, 0.0)
        } else {
            // b_j'(a_j) = -(|a_j|/a_j) / (1 - |a_j|^2)
            -(a.value().conj() / a.modulus()) / one_minus_abs_sq(a)
        };
        let mut prod = Complex64::new(1.0, 0.0);
        for &k in &self.eval_order {
            if k != j {
                prod *= blaschke_factor_at_point(&self.zeros.points[k], a);
            }
        }
        Ok(own * prod)
    }

    /// First-order coefficient `s_j` of `h_j(z) = 1 + s_j (z - a_j) + ...`
    /// around `a_j`, i.e. `B''(a_j) / (2 B'(a_j))`; used by evaluators to
    /// switch to a series branch near the removable singularity.
    pub(crate) fn basis_slope_at_zero(&self, j: usize) -> Result<Complex64> {
        let a = self.zeros.point(j)?;
        let mut s = a.value().conj() / one_minus_abs_sq(a);
        for (k, b) in self.zeros.points.iter().enumerate() {
            if k == j {
                continue;
            }
            // (|a_k|^2 - 1) / ((1 - conj(a_k) a_j)(a_k - a_j))
            let num = -one_minus_abs_sq(b);
            let den = one_minus_mul_conj(a, b) * (b.value() - a.value());
            s += num / den;
        }
        Ok(s)
    }
}

// ---------------------------------------------------------------------------
// separation diagnostics
// ---------------------------------------------------------------------------

/// Separation and Carleson diagnostics of a zero sequence.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    /// `min_j |B'(a_j)| (1 - |a_j|)`.
    pub delta_derivative: f64,
    /// `min_j prod_{k != j} rho(a_j, a_k)`; 1.0 for a single zero.
    pub delta_product: f64,
    /// Brute-force dyadic-box Carleson constant of `sum (1 - |a_k|) delta_{a_k}`.
    pub carleson_constant: f64,
    /// `sum_k (1 - |a_k|)`.
    pub gap_sum: f64,
    /// Whether `delta_derivative` clears the caller's threshold.
    pub is_interpolating: bool,
    pub threshold: f64,
    /// Set when `delta_product` is under [`CONDITIONING_DELTA`]; tilde-system
    /// results should be read with suspicion.
    pub conditioning_warning: bool,
}

/// Computes both separation quantities, the Carleson constant, and the
/// interpolation verdict at `threshold`.
pub fn separation_report(zeros: &ZeroSequence, threshold: f64) -> Result<SeparationReport> {
    if !(threshold >= 0.0 && threshold <= 1.0) {
        return Err(Error::UnsupportedParameter(format!(
            "separation threshold {threshold} must lie in [0, 1]"
        )));
    }
    let product = BlaschkeProduct::new(zeros.clone());
    let mut delta_derivative = f64::INFINITY;
    let mut delta_product = f64::INFINITY;
    for j in 0..zeros.len() {
        let d = product.derivative_at_zero(j)?.norm() * zeros.points[j].gap();
        delta_derivative = delta_derivative.min(d);
        let mut prod = 1.0;
        for k in 0..zeros.len() {
            if k != j {
                prod *= pseudo_hyperbolic(&zeros.points[j], &zeros.points[k]);
            }
        }
        delta_product = delta_product.min(prod);
    }
    let carleson_constant = carleson_constant(zeros);
    Ok(SeparationReport {
        delta_derivative,
        delta_product,
        carleson_constant,
        gap_sum: zeros.gap_sum(),
        is_interpolating: delta_derivative >= threshold,
        threshold,
        conditioning_warning: delta_product < CONDITIONING_DELTA,
    })
}

/// Largest ratio `mass(box) / side` over dyadic Carleson boxes.
///
/// Generation `m` splits the circle into `2^m` arcs of length `2^-m` (plus a
/// half-shifted copy so mass straddling an aligned boundary is not missed);
/// the box over an arc `I` collects the points with `1 - |a_k| <= |I|` whose
/// angle lies in `I`. Generations below the smallest gap see at most one
/// point per box and cannot increase the ratio, so the scan stops there.
pub fn carleson_constant(zeros: &ZeroSequence) -> f64 {
    let min_gap = zeros
        .points
        .iter()
        .map(|p| p.gap())
        .fold(f64::INFINITY, f64::min);
    let max_generation = (1.0 / min_gap).log2().ceil() as i32 + 1;
    let fractions: Vec<f64> = zeros
        .points
        .iter()
        .map(|p| {
            let t = p.value().arg() / std::f64::consts::TAU;
            if t < 0.0 {
                t + 1.0
            } else {
                t
            }
        })
        .collect();
    let mut best: f64 = 0.0;
    for m in 0..=max_generation {
        let side = 2.0_f64.powi(-m);
        let cells = 1usize << m.min(62);
        for shift in [0.0, 0.5] {
            let mut mass = std::collections::HashMap::<usize, f64>::new();
            for (p, &frac) in zeros.points.iter().zip(&fractions) {
                if p.gap() <= side {
                    let cell =
                        ((frac / side + shift).floor() as i64).rem_euclid(cells as i64) as usize;
                    *mass.entry(cell).or_insert(0.0) += p.gap();
                }
            }
            for cell_mass in mass.values() {
                best = best.max(cell_mass / side);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn seq(vals: &[(f64, f64)]) -> ZeroSequence {
        ZeroSequence::new(
            vals.iter()
                .map(|&(re, im)| DiskPoint::new(c(re, im)).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_empty_duplicate_and_oversized() {
        assert!(ZeroSequence::new(vec![]).is_err());
        let p = DiskPoint::new(c(0.5, 0.0)).unwrap();
        assert_eq!(
            ZeroSequence::new(vec![p, p]),
            Err(Error::DuplicateZeros(0, 1))
        );
        let many: Vec<_> = (0..65)
            .map(|k| DiskPoint::new(c(0.0, k as f64 / 100.0)).unwrap())
            .collect();
        assert!(ZeroSequence::new(many).is_err());
    }

    #[test]
    fn radial_sorted_detection() {
        assert!(seq(&[(0.0, 0.0), (0.5, 0.0), (0.75, 0.0)]).radial_sorted());
        assert!(!seq(&[(0.5, 0.0), (0.25, 0.0)]).radial_sorted());
        assert!(!seq(&[(0.0, 0.0), (0.5, 0.1)]).radial_sorted());
        assert!(!seq(&[(-0.5, 0.0), (0.5, 0.0)]).radial_sorted());
    }

    #[test]
    fn geometric_family_gaps_are_exact_powers() {
        let z = ZeroSequence::geometric_radial(0.5, 10).unwrap();
        assert_eq!(z.len(), 10);
        assert!(z.radial_sorted());
        for (k, p) in z.points().iter().enumerate() {
            assert_eq!(p.gap(), 2.0_f64.powi(-(k as i32 + 1)));
        }
        assert!(ZeroSequence::geometric_radial(1.0, 3).is_err());
        // q^n below 2^-52 is rejected by the gap constructor
        assert!(ZeroSequence::geometric_radial(0.5, 60).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let z = ZeroSequence::new(vec![
            DiskPoint::from_gap(0.37).unwrap(),
            DiskPoint::new(c(0.1, -0.63)).unwrap(),
            DiskPoint::from_gap(2.0_f64.powi(-45)).unwrap(),
        ])
        .unwrap();
        let text = serde_json::to_string(&z).unwrap();
        let back: ZeroSequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back.len(), 3);
        for (p, q) in z.points().iter().zip(back.points()) {
            assert_eq!(p.value().re.to_bits(), q.value().re.to_bits());
            assert_eq!(p.value().im.to_bits(), q.value().im.to_bits());
            assert_eq!(p.stored_gap(), q.stored_gap());
        }
        // and gap entries serialize as gaps, not lossy cartesian values
        assert!(text.contains("\"gap\""));
    }

    #[test]
    fn deserialization_validates() {
        assert!(serde_json::from_str::<ZeroSequence>("[]").is_err());
        assert!(serde_json::from_str::<ZeroSequence>(r#"[{"re": 1.5, "im": 0.0}]"#).is_err());
        assert!(serde_json::from_str::<ZeroSequence>(
            r#"[{"re": 0.5, "im": 0.0}, {"re": 0.5, "im": 0.0}]"#
        )
        .is_err());
    }

    #[test]
    fn product_evaluation_hand_values() {
        // B(z) = z (1/2 - z) / (1 - z/2): B(0) = 0, B(1/4) = 1/4 * 2/7
        let b = BlaschkeProduct::new(seq(&[(0.0, 0.0), (0.5, 0.0)]));
        assert_eq!(b.eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let v = b.eval(c(0.25, 0.0)).unwrap();
        assert_relative_eq!(v.re, 0.25 * (0.5 - 0.25) / (1.0 - 0.125), max_relative = 1e-15);
        assert_eq!(v.im, 0.0);
        // radial products are exactly (-1)^n at z = 1
        let g = BlaschkeProduct::new(ZeroSequence::geometric_radial(0.5, 7).unwrap());
        assert_eq!(g.eval(c(1.0, 0.0)).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn derivative_hand_values() {
        // zeros {0, 1/2}: B'(0) = b_2(0) = 1/2; B'(1/2) = -(1/(1-1/4)) * b_1(1/2) = -2/3
        let b = BlaschkeProduct::new(seq(&[(0.0, 0.0), (0.5, 0.0)]));
        assert_eq!(b.derivative_at_zero(0).unwrap(), c(0.5, 0.0));
        let d1 = b.derivative_at_zero(1).unwrap();
        assert_relative_eq!(d1.re, -2.0 / 3.0, max_relative = 1e-15);
        assert_eq!(d1.im, 0.0);
        assert!(b.derivative_at_zero(2).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // central second-order differences with h = 1e-6 should agree to ~1e-8
        let b = BlaschkeProduct::new(seq(&[(0.3, 0.1), (-0.2, 0.4), (0.5, -0.3)]));
        let h = 1e-6;
        for j in 0..3 {
            let a = b.zeros().point(j).unwrap().value();
            let fd = (b.eval(a + c(h, 0.0)).unwrap() - b.eval(a - c(h, 0.0)).unwrap())
                / c(2.0 * h, 0.0);
            let exact = b.derivative_at_zero(j).unwrap();
            assert!((fd - exact).norm() < 1e-8 * (1.0 + exact.norm()));
        }
    }

    #[test]
    fn basis_slope_matches_finite_differences() {
        // s_j = B''(a_j) / (2 B'(a_j)); compare against FD on h_j itself:
        // h_j(a_j + h) ~ 1 + s_j h
        let b = BlaschkeProduct::new(seq(&[(0.3, 0.1), (-0.2, 0.4), (0.5, -0.3)]));
        let h = 1e-5;
        for j in 0..3 {
            let a = b.zeros().point(j).unwrap().value();
            let d = b.derivative_at_zero(j).unwrap();
            let hj = |z: Complex64| b.eval(z).unwrap() / (d * (z - a));
            let fd = (hj(a + c(h, 0.0)) - hj(a - c(h, 0.0))) / c(2.0 * h, 0.0);
            let exact = b.basis_slope_at_zero(j).unwrap();
            assert!((fd - exact).norm() < 1e-4 * (1.0 + exact.norm()));
        }
    }

    #[test]
    fn separation_hand_values() {
        // zeros {0, 1/2}: rho = 1/2, delta_derivative = min(1/2, 2/3 * 1/2) = 1/3
        let z = seq(&[(0.0, 0.0), (0.5, 0.0)]);
        let r = separation_report(&z, 0.05).unwrap();
        assert_eq!(r.delta_product, 0.5);
        assert_relative_eq!(r.delta_derivative, 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(r.gap_sum, 1.5);
        assert!(r.is_interpolating);
        assert!(!r.conditioning_warning);
        // single zero: empty product convention
        let single = separation_report(&seq(&[(0.0, 0.0)]), 0.5).unwrap();
        assert_eq!(single.delta_product, 1.0);
        assert_eq!(single.delta_derivative, 1.0);
        assert_eq!(single.carleson_constant, 1.0);
    }

    #[test]
    fn carleson_hand_values() {
        // single mass at the origin: box m = 0 holds gap 1 over side 1
        assert_eq!(carleson_constant(&seq(&[(0.0, 0.0)])), 1.0);
        // {0, 1/2}: best box is m = 0 with mass 1.5
        assert_eq!(carleson_constant(&seq(&[(0.0, 0.0), (0.5, 0.0)])), 1.5);
        // geometric family q = 1/2, n = 10: generation m = 1 collects every
        // point, mass 1 - 2^-10 over side 1/2
        let g = ZeroSequence::geometric_radial(0.5, 10).unwrap();
        assert_eq!(carleson_constant(&g), 2.0 - 2.0_f64.powi(-9));
    }

    #[test]
    fn truncate_keeps_prefix() {
        let z = ZeroSequence::geometric_radial(0.5, 8).unwrap();
        let t = z.truncate(3).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.points()[2].gap(), 0.125);
        assert!(z.truncate(0).is_err());
        assert!(z.truncate(9).is_err());
    }

    fn arb_zeros() -> impl Strategy<Value = ZeroSequence> {
        proptest::collection::vec((0.0..0.95f64, 0.0..std::f64::consts::TAU), 1..8).prop_filter_map(
            "distinct",
            |polar| {
                let points: Vec<_> = polar
                    .iter()
                    .map(|&(r2, t)| {
                        DiskPoint::new(Complex64::from_polar(0.95 * r2.sqrt(), t)).unwrap()
                    })
                    .collect();
                ZeroSequence::new(points).ok()
            },
        )
    }

    proptest! {
        // classical identity: (1 - |a_j|^2) |B'(a_j)| = prod_{k != j} rho(a_j, a_k)
        #[test]
        fn derivative_modulus_identity(z in arb_zeros()) {
            let b = BlaschkeProduct::new(z.clone());
            for j in 0..z.len() {
                let lhs = one_minus_abs_sq(z.point(j).unwrap())
                    * b.derivative_at_zero(j).unwrap().norm();
                let mut rhs = 1.0;
                for k in 0..z.len() {
                    if k != j {
                        rhs *= pseudo_hyperbolic(z.point(j).unwrap(), z.point(k).unwrap());
                    }
                }
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
            }
        }

        // |B| < 1 inside, = 1 on the circle
        #[test]
        fn product_is_inner(z in arb_zeros(), t in 0.0..std::f64::consts::TAU, r2 in 0.0..0.99f64) {
            let b = BlaschkeProduct::new(z);
            let inside = Complex64::from_polar(r2.sqrt() * 0.995, t);
            prop_assert!(b.eval(inside).unwrap().norm() < 1.0 + 1e-12);
            let on = Complex64::from_polar(1.0, t);
            prop_assert!((b.eval(on).unwrap().norm() - 1.0).abs() < 1e-12);
        }

        // evaluation order is canonical: shuffling input zeros changes nothing
        #[test]
        fn evaluation_is_order_independent(z in arb_zeros(), t in 0.0..std::f64::consts::TAU) {
            let mut rev = z.points().to_vec();
            rev.reverse();
            let b1 = BlaschkeProduct::new(z);
            let b2 = BlaschkeProduct::new(ZeroSequence::new(rev).unwrap());
            let p = Complex64::from_polar(0.7, t);
            prop_assert_eq!(b1.eval(p).unwrap(), b2.eval(p).unwrap());
        }

        // carleson constant dominates the gap sum and is monotone under
        // appending a point
        #[test]
        fn carleson_dominates_gap_sum(z in arb_zeros()) {
            let c = carleson_constant(&z);
            prop_assert!(c >= z.gap_sum() - 1e-15);
        }
    }
}
