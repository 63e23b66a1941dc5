//! Seeded experiment drivers over truncation size `n`.
//!
//! Four scans share one config shape: the divergence counterexample on
//! radial families, the exploratory trace-sum ratio scan, the embedding
//! consequence check for random normalized traces, and the weighted
//! operator bounds of the transform. Randomness is keyed on
//! `(seed, stream, n, trial)` only, so reports are bit-reproducible under
//! any thread count, and every report echoes its config.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::{separation_report, ZeroSequence};
use crate::error::{Error, Result};
use crate::families::{random_separated, random_uniformly_separated, trial_rng};
use crate::model::{hardy_norm, interpolate_in_kb, QuadratureGrid};
use crate::report::{ExperimentReport, ReportMeta, Row};
use crate::seq::{counterexample_values, weighted_lp_norm, GammaSequence, ValueSequence};
use crate::tilde::{tilde_apply, weighted_operator_bounds};

// rng stream tags, one per consumer of randomness
const STREAM_FAMILY: u64 = 1;
const STREAM_CONJECTURE: u64 = 2;
const STREAM_NECESSITY: u64 = 3;

/// Factor in the classical Carleson embedding consequence: normalized
/// traces must satisfy `sum |w_k| (1 - |a_k|) <= EMBEDDING_FACTOR * C`.
pub const EMBEDDING_FACTOR: f64 = 8.0;

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

/// Zero family, reproducible from `(family, seed, n)` alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `a_k = 1 - q^k`.
    RadialGeometric { q: f64 },
    /// Radial points from explicit gaps (strictly decreasing).
    RadialGaps { gaps: Vec<f64> },
    /// Rejection-sampled with a pairwise separation floor; prefix-stable
    /// in `n` for a fixed seed.
    RandomSeparated {
        delta_min: f64,
        #[serde(default = "default_max_radius")]
        max_radius: f64,
    },
    /// Jittered-ring samples with a *product* separation floor.
    RandomRing { delta_product_min: f64 },
}

fn default_max_radius() -> f64 {
    0.95
}

impl Family {
    pub fn zeros(&self, n: usize, seed: u64) -> Result<ZeroSequence> {
        match self {
            Family::RadialGeometric { q } => ZeroSequence::geometric_radial(*q, n),
            Family::RadialGaps { gaps } => {
                if gaps.len() < n {
                    return Err(Error::InvalidConfig(format!(
                        "family lists {} gaps but the scan needs n = {n}",
                        gaps.len()
                    )));
                }
                ZeroSequence::from_gaps(&gaps[..n])
            }
            Family::RandomSeparated {
                delta_min,
                max_radius,
            } => {
                let mut rng = trial_rng(seed, STREAM_FAMILY, 0, 0);
                random_separated(&mut rng, n, *delta_min, *max_radius)
            }
            Family::RandomRing { delta_product_min } => {
                let mut rng = trial_rng(seed, STREAM_FAMILY, n as u64, 0);
                random_uniformly_separated(&mut rng, n, *delta_product_min)
            }
        }
    }
}

/// Coefficients for the counterexample trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSpec {
    /// `gamma_k = k^-2`: summable, index-weighted sum divergent.
    InverseSquare,
    Custom(Vec<f64>),
}

impl GammaSpec {
    pub fn gammas(&self, n: usize) -> Result<GammaSequence> {
        match self {
            GammaSpec::InverseSquare => Ok(GammaSequence::inverse_square(n)),
            GammaSpec::Custom(values) => {
                if values.len() < n {
                    return Err(Error::InvalidConfig(format!(
                        "gamma lists {} entries but the scan needs n = {n}",
                        values.len()
                    )));
                }
                GammaSequence::new(values[..n].to_vec())
            }
        }
    }
}

/// Trace source for the ratio scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceSpec {
    /// Independent complex standard normals per `(n, trial)`.
    RandomNormal,
    /// The counterexample trace for the configured gamma (radial only).
    Counterexample,
    /// Fixed values, truncated to each `n`.
    Custom(Vec<[f64; 2]>),
}

fn default_n_values() -> Vec<usize> {
    vec![5, 10, 20, 40]
}
fn default_trials() -> usize {
    64
}
fn default_grid_cap() -> usize {
    1 << 16
}
fn default_threshold() -> f64 {
    0.05
}
fn default_gamma() -> GammaSpec {
    GammaSpec::InverseSquare
}
fn default_traces() -> TraceSpec {
    TraceSpec::RandomNormal
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_grid_cap")]
    pub grid_cap: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_gamma")]
    pub gamma: GammaSpec,
    #[serde(default = "default_traces")]
    pub traces: TraceSpec,
}

impl ExperimentConfig {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            n_values: default_n_values(),
            trials: default_trials(),
            seed: 0,
            grid_cap: default_grid_cap(),
            threshold: default_threshold(),
            gamma: default_gamma(),
            traces: default_traces(),
        }
    }

    pub fn validate(&self) -> Result<QuadratureGrid> {
        if self.n_values.is_empty() {
            return Err(Error::InvalidConfig("n_values is empty".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "n_values must be strictly increasing".into(),
            ));
        }
        if *self.n_values.last().unwrap() > crate::blaschke::MAX_ZEROS {
            return Err(Error::InvalidConfig(format!(
                "largest n exceeds the zero cap {}",
                crate::blaschke::MAX_ZEROS
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidConfig(format!(
                "threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        QuadratureGrid::new(self.grid_cap)
            .map_err(|_| Error::InvalidConfig(format!("grid cap {} invalid", self.grid_cap)))
    }

    fn meta(&self, experiment: &str, caveat: Option<&str>) -> ReportMeta {
        ReportMeta {
            experiment: experiment.to_string(),
            seed: self.seed,
            config_echo: serde_json::to_value(self).expect("config serializes"),
            caveat: caveat.map(str::to_string),
        }
    }
}

fn random_normal_trace<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ValueSequence {
    ValueSequence::new(
        (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect(),
    )
}

fn trace_for(
    spec: &TraceSpec,
    config: &ExperimentConfig,
    zeros: &ZeroSequence,
    trial: usize,
) -> Result<ValueSequence> {
    let n = zeros.len();
    match spec {
        TraceSpec::RandomNormal => {
            let mut rng = trial_rng(config.seed, STREAM_CONJECTURE, n as u64, trial as u64);
            Ok(random_normal_trace(&mut rng, n))
        }
        TraceSpec::Counterexample => {
            let gamma = config.gamma.gammas(n)?;
            Ok(counterexample_values(zeros, &gamma)?.values)
        }
        TraceSpec::Custom(values) => {
            if values.len() < n {
                return Err(Error::InvalidConfig(format!(
                    "trace lists {} values but the scan needs n = {n}",
                    values.len()
                )));
            }
            Ok(ValueSequence::new(
                values[..n]
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect(),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// counterexample
// ---------------------------------------------------------------------------

/// Tracks the two trace sums of the counterexample pair along `n`.
///
/// Emits, per `n`: `l1_sum_w` (bounded by `gamma_sum`), `l1_sum_wtilde`
/// (bounded below by `lower_bound = (1/2) sum k gamma_k`), both asserted,
/// and their `ratio`. A failed assertion aborts the run with the offending
/// `n` rather than emitting a row.
pub fn run_counterexample(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let max_n = *config.n_values.last().unwrap();
    let zeros_full = config.family.zeros(max_n, config.seed)?;
    if !zeros_full.radial_sorted() {
        return Err(Error::NotRadialSorted);
    }
    let gamma_full = config.gamma.gammas(max_n)?;
    let mut rows = Vec::new();
    for &n in &config.n_values {
        let zeros = zeros_full.truncate(n)?;
        let gamma = gamma_full.truncate(n)?;
        let pair = counterexample_values(&zeros, &gamma)?;
        let sum_w = weighted_lp_norm(&pair.values, &zeros, 1.0)?;
        let sum_wt = weighted_lp_norm(&pair.tilde, &zeros, 1.0)?;
        let gamma_sum = gamma.sum();
        let lower = 0.5 * gamma.index_weighted_sum();
        if sum_w > gamma_sum {
            return Err(Error::ExperimentAssertion {
                n,
                detail: format!("l1_sum_w = {sum_w} exceeds gamma_sum = {gamma_sum}"),
            });
        }
        if sum_wt < lower {
            return Err(Error::ExperimentAssertion {
                n,
                detail: format!("l1_sum_wtilde = {sum_wt} fell under lower_bound = {lower}"),
            });
        }
        rows.push(Row::aggregate(n, "l1_sum_w", sum_w));
        rows.push(Row::aggregate(n, "l1_sum_wtilde", sum_wt));
        rows.push(Row::aggregate(n, "gamma_sum", gamma_sum));
        rows.push(Row::aggregate(n, "lower_bound", lower));
        rows.push(Row::aggregate(n, "ratio", sum_wt / sum_w));
    }
    Ok(ExperimentReport {
        meta: config.meta("counterexample", None),
        rows,
    })
}

// ---------------------------------------------------------------------------
// conjecture ratio scan
// ---------------------------------------------------------------------------

const CONJECTURE_CAVEAT: &str = "exploratory: ratios compare an H^1 norm against a conjectured \
     trace expression; stability over these n is evidence, not a theorem, and says nothing \
     about larger truncations";

/// Ratio `|f|_H1 / sum_k (1-|a_k|)(|w_k| + |w~_k|)` over trials and `n`.
///
/// Never passes or fails: emits per-trial ratios plus min/median/max
/// aggregates, and counts quadrature non-convergence per `n`.
pub fn conjecture_ratio_scan(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let grid = config.validate()?;
    let mut rows = Vec::new();
    for &n in &config.n_values {
        let zeros = config.family.zeros(n, config.seed)?;
        let outcomes: Vec<(usize, Option<f64>, bool)> = (0..config.trials)
            .into_par_iter()
            .map(|trial| -> Result<(usize, Option<f64>, bool)> {
                let w = trace_for(&config.traces, config, &zeros, trial)?;
                let wt = tilde_apply(&w, &zeros)?;
                let denom = weighted_lp_norm(&w, &zeros, 1.0)?
                    + weighted_lp_norm(&wt, &zeros, 1.0)?;
                if denom <= f64::MIN_POSITIVE {
                    return Ok((trial, None, true));
                }
                let f = interpolate_in_kb(&zeros, &w)?;
                let h1 = hardy_norm(|z| f.evaluate(z), 1.0, &grid)?;
                Ok((trial, Some(h1.value / denom), h1.converged))
            })
            .collect::<Result<_>>()?;
        let mut ratios = Vec::new();
        let mut failures = 0usize;
        for (trial, ratio, converged) in outcomes {
            if !converged {
                failures += 1;
            }
            match ratio {
                Some(r) => {
                    rows.push(Row::trial(n, trial, "ratio", r));
                    ratios.push(r);
                }
                None => rows.push(Row::trial(n, trial, "skipped_zero_data", 1.0)),
            }
        }
        if !ratios.is_empty() {
            ratios.sort_by(f64::total_cmp);
            let median = if ratios.len() % 2 == 1 {
                ratios[ratios.len() / 2]
            } else {
                0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
            };
            rows.push(Row::aggregate(n, "ratio_min", ratios[0]));
            rows.push(Row::aggregate(n, "ratio_median", median));
            rows.push(Row::aggregate(n, "ratio_max", *ratios.last().unwrap()));
        }
        rows.push(Row::aggregate(n, "quadrature_failures", failures as f64));
    }
    Ok(ExperimentReport {
        meta: config.meta("conjecture_ratio", Some(CONJECTURE_CAVEAT)),
        rows,
    })
}

// ---------------------------------------------------------------------------
// necessity embedding scan
// ---------------------------------------------------------------------------

const NECESSITY_CAVEAT: &str = "sample maxima only probe the embedding constant from below; \
     a clean pass is consistency, not proof, while a bound violation is a genuine failure";

/// Checks the embedding consequence on random normalized traces.
///
/// Traces of `H^1`-normalized elements must have gap-weighted sums, on both
/// sides of the transform, below [`EMBEDDING_FACTOR`] times the Carleson
/// constant. Violations are flagged in the `bound_ok` row, not raised as
/// errors; `doubling_drift_*` rows track how the per-`n` maxima move when
/// `n` doubles.
pub fn necessity_embedding_scan(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let grid = config.validate()?;
    let mut rows = Vec::new();
    let mut prev: Option<(usize, f64, f64)> = None;
    for &n in &config.n_values {
        let zeros = config.family.zeros(n, config.seed)?;
        let sep = separation_report(&zeros, config.threshold)?;
        let outcomes: Vec<(usize, Option<(f64, f64)>, bool)> = (0..config.trials)
            .into_par_iter()
            .map(|trial| -> Result<(usize, Option<(f64, f64)>, bool)> {
                let mut rng = trial_rng(config.seed, STREAM_NECESSITY, n as u64, trial as u64);
                let g = random_normal_trace(&mut rng, n);
                let f = interpolate_in_kb(&zeros, &g)?;
                let h1 = hardy_norm(|z| f.evaluate(z), 1.0, &grid)?;
                if h1.value <= f64::MIN_POSITIVE {
                    return Ok((trial, None, h1.converged));
                }
                let w = ValueSequence::new(g.iter().map(|v| v / h1.value).collect());
                let sum_w = weighted_lp_norm(&w, &zeros, 1.0)?;
                let sum_wt = weighted_lp_norm(&tilde_apply(&w, &zeros)?, &zeros, 1.0)?;
                Ok((trial, Some((sum_w, sum_wt)), h1.converged))
            })
            .collect::<Result<_>>()?;
        let mut max_w: f64 = 0.0;
        let mut max_wt: f64 = 0.0;
        let mut failures = 0usize;
        for (trial, sums, converged) in outcomes {
            if !converged {
                failures += 1;
            }
            match sums {
                Some((sum_w, sum_wt)) => {
                    rows.push(Row::trial(n, trial, "l1_sum_w", sum_w));
                    rows.push(Row::trial(n, trial, "l1_sum_wtilde", sum_wt));
                    max_w = max_w.max(sum_w);
                    max_wt = max_wt.max(sum_wt);
                }
                None => rows.push(Row::trial(n, trial, "skipped_zero_data", 1.0)),
            }
        }
        let bound = EMBEDDING_FACTOR * sep.carleson_constant;
        rows.push(Row::aggregate(n, "max_l1_sum_w", max_w));
        rows.push(Row::aggregate(n, "max_l1_sum_wtilde", max_wt));
        rows.push(Row::aggregate(n, "carleson_constant", sep.carleson_constant));
        rows.push(Row::aggregate(n, "embedding_bound", bound));
        rows.push(Row::aggregate(
            n,
            "bound_ok",
            f64::from(u8::from(max_w <= bound && max_wt <= bound)),
        ));
        rows.push(Row::aggregate(
            n,
            "conditioning_warning",
            f64::from(u8::from(sep.conditioning_warning)),
        ));
        rows.push(Row::aggregate(n, "quadrature_failures", failures as f64));
        if let Some((pn, pw, pwt)) = prev {
            if n == 2 * pn && pw > 0.0 && pwt > 0.0 {
                rows.push(Row::aggregate(n, "doubling_drift_w", (max_w - pw).abs() / pw));
                rows.push(Row::aggregate(
                    n,
                    "doubling_drift_wtilde",
                    (max_wt - pwt).abs() / pwt,
                ));
            }
        }
        prev = Some((n, max_w, max_wt));
    }
    Ok(ExperimentReport {
        meta: config.meta("necessity_embedding", Some(NECESSITY_CAVEAT)),
        rows,
    })
}

// ---------------------------------------------------------------------------
// operator bounds scan
// ---------------------------------------------------------------------------

const OPERATOR_CAVEAT: &str = "sigma rows are singular values of the gap-weighted transform; \
     l1_bound and linf_bound are induced-norm upper bounds, not norms";

/// Weighted singular-value range of the transform along `n`, plus induced
/// `l^1`/sup bound rows and separation diagnostics.
pub fn operator_bounds_scan(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut rows = Vec::new();
    for &n in &config.n_values {
        let zeros = config.family.zeros(n, config.seed)?;
        let sep = separation_report(&zeros, config.threshold)?;
        let (sigma_min, sigma_max) = weighted_operator_bounds(&zeros, 2.0)?;
        let (_, l1_bound) = weighted_operator_bounds(&zeros, 1.0)?;
        let (_, linf_bound) = weighted_operator_bounds(&zeros, f64::INFINITY)?;
        rows.push(Row::aggregate(n, "sigma_min", sigma_min));
        rows.push(Row::aggregate(n, "sigma_max", sigma_max));
        rows.push(Row::aggregate(n, "sigma_ratio", sigma_max / sigma_min));
        rows.push(Row::aggregate(n, "l1_bound", l1_bound));
        rows.push(Row::aggregate(n, "linf_bound", linf_bound));
        rows.push(Row::aggregate(n, "delta_product", sep.delta_product));
        rows.push(Row::aggregate(n, "delta_derivative", sep.delta_derivative));
        rows.push(Row::aggregate(
            n,
            "conditioning_warning",
            f64::from(u8::from(sep.conditioning_warning)),
        ));
    }
    Ok(ExperimentReport {
        meta: config.meta("operator_bounds", Some(OPERATOR_CAVEAT)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric_config() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(Family::RadialGeometric { q: 0.5 });
        c.n_values = vec![5, 10, 20, 40];
        c
    }

    #[test]
    fn config_validation_rejects_bad_shapes() {
        let mut c = geometric_config();
        c.n_values = vec![];
        assert!(c.validate().is_err());
        c.n_values = vec![5, 5];
        assert!(c.validate().is_err());
        c.n_values = vec![5, 70];
        assert!(c.validate().is_err());
        c.n_values = vec![5, 10];
        c.trials = 0;
        assert!(c.validate().is_err());
        c.trials = 1;
        c.grid_cap = 1000;
        assert!(c.validate().is_err());
        c.grid_cap = 1024;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn config_json_round_trip_with_defaults() {
        let text = r#"{"family": {"radial_geometric": {"q": 0.5}}}"#;
        let c: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(c.n_values, vec![5, 10, 20, 40]);
        assert_eq!(c.trials, 64);
        assert_eq!(c.grid_cap, 1 << 16);
        assert_eq!(c.gamma, GammaSpec::InverseSquare);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"trials": 3}"#).is_err());
        // unknown keys are config errors, not silent typos
        assert!(serde_json::from_str::<ExperimentConfig>(
            r#"{"family": {"radial_geometric": {"q": 0.5}}, "trails": 3}"#
        )
        .is_err());
    }

    #[test]
    fn counterexample_tracks_divergence() {
        let report = run_counterexample(&geometric_config()).unwrap();
        // bounded side stays under the gamma tail, divergent side clears the
        // half-harmonic lower bound, and the ratio strictly grows
        let ratios = report.values("ratio");
        assert_eq!(ratios.len(), 4);
        assert!(ratios.windows(2).all(|w| w[1] > w[0]));
        for &n in &[5usize, 10, 20, 40] {
            let a = report.find(n, None, "l1_sum_w").unwrap();
            let g = report.find(n, None, "gamma_sum").unwrap();
            let b = report.find(n, None, "l1_sum_wtilde").unwrap();
            let l = report.find(n, None, "lower_bound").unwrap();
            assert!(a <= g && b >= l);
        }
    }

    #[test]
    fn counterexample_rejects_non_radial_families() {
        let mut c = geometric_config();
        c.family = Family::RandomSeparated {
            delta_min: 0.3,
            max_radius: 0.9,
        };
        c.n_values = vec![3];
        assert!(matches!(
            run_counterexample(&c),
            Err(Error::NotRadialSorted)
        ));
    }

    #[test]
    fn conjecture_scan_is_deterministic_and_aggregated() {
        let mut c = geometric_config();
        c.n_values = vec![3, 6];
        c.trials = 5;
        c.grid_cap = 1 << 12;
        c.seed = 11;
        let a = conjecture_ratio_scan(&c).unwrap();
        let b = conjecture_ratio_scan(&c).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.values("ratio").len(), 10);
        let min = a.find(6, None, "ratio_min").unwrap();
        let med = a.find(6, None, "ratio_median").unwrap();
        let max = a.find(6, None, "ratio_max").unwrap();
        assert!(0.0 < min && min <= med && med <= max);
        assert!(a.meta.caveat.is_some());
    }

    #[test]
    fn conjecture_scan_single_zero_has_exact_ratio() {
        // B(z) = z: f is the constant w_0, |f|_H1 = |w_0|, w~ = w, weights 1:
        // ratio = |w|/(2|w|) = 1/2 exactly for every trial
        let mut c = ExperimentConfig::new(Family::RadialGaps { gaps: vec![1.0] });
        c.n_values = vec![1];
        c.trials = 3;
        c.grid_cap = 1 << 10;
        let report = conjecture_ratio_scan(&c).unwrap();
        for r in report.values("ratio") {
            assert!((r - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn necessity_scan_respects_bound_on_tame_family() {
        // gap 2^-10 peaks need ~2^15 boundary nodes, hence the wide cap
        let mut c = geometric_config();
        c.n_values = vec![5, 10];
        c.trials = 4;
        c.grid_cap = 1 << 16;
        c.seed = 3;
        let report = necessity_embedding_scan(&c).unwrap();
        for &n in &[5usize, 10] {
            assert_eq!(report.find(n, None, "bound_ok"), Some(1.0));
            let maxw = report.find(n, None, "max_l1_sum_w").unwrap();
            let bound = report.find(n, None, "embedding_bound").unwrap();
            assert!(0.0 < maxw && maxw <= bound);
        }
        // n doubled once: drift row present and moderate
        let drift = report.find(10, None, "doubling_drift_w").unwrap();
        assert!(drift < 0.5, "doubling drift {drift} out of range");
        assert_eq!(report.find(10, None, "quadrature_failures"), Some(0.0));
        assert_eq!(report.find(5, None, "quadrature_failures"), Some(0.0));
    }

    #[test]
    fn necessity_scan_reports_honest_quadrature_failures() {
        // a 2^12 cap cannot resolve the 2^-10 boundary peaks to 1e-10; the
        // scan must say so per n instead of failing or pretending
        let mut c = geometric_config();
        c.n_values = vec![10];
        c.trials = 2;
        c.grid_cap = 1 << 12;
        let report = necessity_embedding_scan(&c).unwrap();
        assert_eq!(report.find(10, None, "quadrature_failures"), Some(2.0));
        // the capped values are still finite and within the loose bound
        assert_eq!(report.find(10, None, "bound_ok"), Some(1.0));
    }

    #[test]
    fn operator_scan_rows_are_consistent() {
        let report = operator_bounds_scan(&geometric_config()).unwrap();
        for &n in &[5usize, 10, 20, 40] {
            let lo = report.find(n, None, "sigma_min").unwrap();
            let hi = report.find(n, None, "sigma_max").unwrap();
            let ratio = report.find(n, None, "sigma_ratio").unwrap();
            assert!(0.0 < lo && lo <= hi);
            assert!((ratio - hi / lo).abs() < 1e-12 * ratio);
            // weighted l2 bounds are sandwiched by the induced l1/linf rows
            let l1 = report.find(n, None, "l1_bound").unwrap();
            let linf = report.find(n, None, "linf_bound").unwrap();
            assert!(hi <= (l1 * linf).sqrt() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn trace_spec_sources() {
        let zeros = ZeroSequence::geometric_radial(0.5, 3).unwrap();
        let mut c = geometric_config();
        c.n_values = vec![3];
        // custom traces truncate and validate length
        c.traces = TraceSpec::Custom(vec![[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]]);
        let w = trace_for(&c.traces, &c, &zeros, 0).unwrap();
        assert_eq!(w.len(), 3);
        c.traces = TraceSpec::Custom(vec![[1.0, 0.0]]);
        assert!(trace_for(&c.traces, &c, &zeros, 0).is_err());
        // counterexample traces are the derivative-scaled gammas
        c.traces = TraceSpec::Counterexample;
        let w = trace_for(&c.traces, &c, &zeros, 0).unwrap();
        assert_eq!(w.len(), 3);
        // random traces depend on the trial index
        c.traces = TraceSpec::RandomNormal;
        let w0 = trace_for(&c.traces, &c, &zeros, 0).unwrap();
        let w1 = trace_for(&c.traces, &c, &zeros, 1).unwrap();
        let w0_again = trace_for(&c.traces, &c, &zeros, 0).unwrap();
        assert_eq!(w0, w0_again);
        assert_ne!(w0, w1);
    }
}
