//! Monte Carlo experiments for the distributional claims about frame
//! thresholding. Every trial draws its noise from its own counter-keyed
//! stream, so reports do not depend on the number of threads.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::evt::{
    evt_threshold, gumbel_cdf, norms_chi, ti_threshold_from_z, GumbelNorms, ThresholdRule,
    ThresholdSpec,
};
use crate::frame::{dual_synthesize, frame_bounds, Frame, FrameStructure, Subspace};
use crate::norms::{evaluate, is_monotone, MonotonicityCertificate, NormSpec};
use crate::shrink::{denoise_with_threshold, shrink_in_place, shrink_value, ShrinkageRule};
use crate::signal::{CoefficientVector, Signal};
use crate::transforms::TIWaveletFrame;

use super::rng::{fill_normal, normal_two_sided_tail, standard_normal, trial_rng};
use super::stats::{
    gumbel_inverse_cdf, ks_distance, proportion_se, qq_data, EmpiricalDistribution, Proportion,
};

/// Statistical slack, in Monte Carlo standard errors, of every check.
pub const MC_SLACK: f64 = 3.0;

pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    pub sigma: f64,
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

impl McConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            sigma: 1.0,
            parallel: true,
        }
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        Self { sigma, ..self }
    }

    pub fn serial(self) -> Self {
        Self {
            parallel: false,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid(
                "sigma",
                format!("{} must be finite and >= 0", self.sigma),
            ));
        }
        Ok(())
    }

    fn positive_sigma(&self) -> Result<()> {
        self.validate()?;
        if self.sigma > 0.0 {
            Ok(())
        } else {
            Err(invalid("sigma", "must be positive for this experiment"))
        }
    }
}

/// Runs `body` once per trial with that trial's generator; results are in
/// trial order. `init` builds per-worker scratch state.
pub fn run_trials<S, T>(
    cfg: &McConfig,
    init: impl Fn() -> S + Sync + Send,
    body: impl Fn(&mut S, &mut ChaCha8Rng) -> T + Sync + Send,
) -> Vec<T>
where
    T: Send,
{
    let one = |state: &mut S, trial: usize| {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        body(state, &mut rng)
    };
    if cfg.parallel {
        (0..cfg.trials)
            .into_par_iter()
            .map_init(&init, one)
            .collect()
    } else {
        let mut state = init();
        (0..cfg.trials).map(|t| one(&mut state, t)).collect()
    }
}

/// `(2Φ(t) - 1)^m`: probability that `m` independent standard normals all
/// have magnitude at most `t`.
pub fn independent_coverage(t: f64, m: usize) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    (m as f64 * (-normal_two_sided_tail(t)).ln_1p()).exp()
}

fn selected_count<F: Frame + ?Sized>(frame: &F, subspace: Subspace) -> usize {
    frame
        .layout()
        .scaling_mask()
        .iter()
        .filter(|s| subspace.includes(**s))
        .count()
}

/// Samples of `max_ω |<φ_ω, ε>|` over `subspace` for white noise of level `σ`.
pub fn sample_max_abs<F: Frame + ?Sized>(
    frame: &F,
    subspace: Subspace,
    cfg: &McConfig,
) -> Result<EmpiricalDistribution> {
    cfg.validate()?;
    let n = frame.signal_len();
    let samples = run_trials(
        cfg,
        || vec![0.0; n],
        |noise, rng| {
            fill_normal(rng, cfg.sigma, noise);
            frame.max_abs_coefficient(noise, subspace)
        },
    );
    EmpiricalDistribution::new(samples)
}

/// Maps each sample `M` to `(M / σ - b) / a`.
pub fn rescale_to_gumbel(
    dist: &EmpiricalDistribution,
    norms: &GumbelNorms,
    sigma: f64,
) -> Result<EmpiricalDistribution> {
    if !(norms.a > 0.0) {
        return Err(invalid("a", format!("{} must be positive", norms.a)));
    }
    if !(sigma > 0.0) {
        return Err(invalid("sigma", format!("{sigma} must be positive")));
    }
    dist.map(|x| (x / sigma - norms.b) / norms.a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GumbelReport {
    pub frame: String,
    pub m: usize,
    pub norms: GumbelNorms,
    pub trials: usize,
    pub ks_distance: f64,
    pub rescaled_mean: f64,
}

#[derive(Debug, Clone)]
pub struct GumbelOutcome {
    pub report: GumbelReport,
    pub rescaled: EmpiricalDistribution,
}

impl GumbelOutcome {
    /// Q-Q pairs of the rescaled maxima against the standard Gumbel law.
    pub fn qq(&self) -> Vec<(f64, f64)> {
        qq_data(&self.rescaled, gumbel_inverse_cdf)
    }
}

/// Rescales simulated maxima with chi normalizers for the effective atom
/// count and measures the distance to the Gumbel law.
pub fn gumbel_experiment<F: Frame + ?Sized>(
    frame: &F,
    subspace: Subspace,
    cfg: &McConfig,
) -> Result<GumbelOutcome> {
    cfg.positive_sigma()?;
    let m = frame.effective_count(subspace);
    let norms = norms_chi(m)?;
    let rescaled = rescale_to_gumbel(&sample_max_abs(frame, subspace, cfg)?, &norms, cfg.sigma)?;
    Ok(GumbelOutcome {
        report: GumbelReport {
            frame: frame.name(),
            m,
            norms,
            trials: cfg.trials,
            ks_distance: ks_distance(&rescaled, gumbel_cdf),
            rescaled_mean: rescaled.mean(),
        },
        rescaled,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub alpha: f64,
    pub threshold: f64,
    /// Count the threshold was evaluated at.
    pub m: usize,
    pub coverage: Proportion,
    /// `(2Φ(T/σ) - 1)^k` over the `k` selected coefficients of an orthonormal frame.
    pub exact: Option<f64>,
    /// `coverage >= 1 - α - 3 s.e.`
    pub one_sided_holds: bool,
    /// `|coverage - exact| <= 3 s.e.`
    pub exact_agrees: Option<bool>,
}

/// Empirical probability that `‖Φε‖_∞ <= T` on `subspace`.
pub fn coverage_experiment<F: Frame + ?Sized>(
    frame: &F,
    rule: ThresholdRule,
    subspace: Subspace,
    cfg: &McConfig,
) -> Result<CoverageReport> {
    cfg.positive_sigma()?;
    let alpha = rule
        .alpha()
        .ok_or_else(|| invalid("rule", "coverage needs a rule with a significance level"))?;
    let spec = ThresholdSpec::for_frame(rule, cfg.sigma, frame, subspace);
    let threshold = spec.resolve()?;
    let dist = sample_max_abs(frame, subspace, cfg)?;
    let hits = dist.samples().partition_point(|x| *x <= threshold);
    let coverage = Proportion::from_count(hits, cfg.trials);
    let exact = (frame.structure() == FrameStructure::Orthonormal)
        .then(|| independent_coverage(threshold / cfg.sigma, selected_count(frame, subspace)));
    Ok(CoverageReport {
        alpha,
        threshold,
        m: spec.m,
        one_sided_holds: coverage.value >= 1.0 - alpha - MC_SLACK * coverage.se,
        // the standard error of the exact law stays positive when every trial is covered
        exact_agrees: exact
            .map(|e| (coverage.value - e).abs() <= MC_SLACK * proportion_se(e, cfg.trials)),
        coverage,
        exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidakRow {
    /// Level in units of `σ`.
    pub t: f64,
    pub dependent: Proportion,
    pub independent: f64,
    /// `dependent >= independent - 3 s.e.`
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidakReport {
    pub frame: String,
    pub reference_m: usize,
    pub rows: Vec<SidakRow>,
}

/// Compares `P{‖Φε‖_∞ <= σT}` with the independent value `(2Φ(T) - 1)^{reference_m}`.
pub fn sidak_experiment<F: Frame + ?Sized>(
    frame: &F,
    subspace: Subspace,
    reference_m: usize,
    t_list: &[f64],
    cfg: &McConfig,
) -> Result<SidakReport> {
    cfg.positive_sigma()?;
    if reference_m == 0 {
        return Err(invalid("reference_m", "must be positive"));
    }
    let dist = sample_max_abs(frame, subspace, cfg)?;
    let rows = t_list
        .iter()
        .map(|&t| {
            let hits = dist.samples().partition_point(|x| *x <= t * cfg.sigma);
            let dependent = Proportion::from_count(hits, cfg.trials);
            let independent = independent_coverage(t, reference_m);
            SidakRow {
                t,
                dependent,
                independent,
                holds: dependent.value >= independent - MC_SLACK * dependent.se,
            }
        })
        .collect();
    Ok(SidakReport {
        frame: frame.name(),
        reference_m,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiBoundRow {
    pub z: f64,
    pub threshold: f64,
    pub gumbel: f64,
    pub empirical: Proportion,
    /// `empirical >= gumbel - 3 s.e.`
    pub holds: bool,
    /// `σ (a z + b)` with chi normalizers for `n log2 n` atoms.
    pub naive_threshold: f64,
    pub naive_empirical: Proportion,
    pub threshold_below_naive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiBoundReport {
    pub n: usize,
    pub c: f64,
    pub naive_count: usize,
    pub rows: Vec<TiBoundRow>,
}

/// Probability that the detail coefficients of the translation invariant
/// transform stay below the TI threshold, against the Gumbel lower bound
/// and against the naive threshold for `n log2 n` atoms.
pub fn ti_bound_experiment(
    frame: &TIWaveletFrame,
    c: f64,
    z_list: &[f64],
    cfg: &McConfig,
) -> Result<TiBoundReport> {
    cfg.positive_sigma()?;
    let n = frame.signal_len();
    let naive_count = n * n.trailing_zeros() as usize;
    let naive = norms_chi(naive_count)?;
    let dist = sample_max_abs(frame, Subspace::Detail, cfg)?;
    let below =
        |t: f64| Proportion::from_count(dist.samples().partition_point(|x| *x <= t), cfg.trials);
    let rows = z_list
        .iter()
        .map(|&z| {
            let threshold = ti_threshold_from_z(cfg.sigma, z, n, c)?;
            let naive_threshold = naive.threshold(cfg.sigma, z);
            let empirical = below(threshold);
            let gumbel = gumbel_cdf(z);
            Ok(TiBoundRow {
                z,
                threshold,
                gumbel,
                empirical,
                holds: empirical.value >= gumbel - MC_SLACK * empirical.se,
                naive_threshold,
                naive_empirical: below(naive_threshold),
                threshold_below_naive: threshold < naive_threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TiBoundReport {
        n,
        c,
        naive_count,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub alpha: f64,
    pub threshold: f64,
    pub functional: NormSpec,
    pub certificate: MonotonicityCertificate,
    /// `J(x)` of the clean coefficients.
    pub clean_value: f64,
    /// Frequency of `J(x̂) <= J(x)`.
    pub frequency: Proportion,
    /// Frequency of `‖Φε‖_∞ <= T` on the thresholded coefficients.
    pub coverage: Proportion,
    /// `frequency >= 1 - α - 3 s.e.`
    pub holds: bool,
}

/// Frequency with which the thresholded coefficients are at least as smooth
/// as the clean ones under a monotone functional.
pub fn smoothness_experiment<F: Frame + ?Sized>(
    frame: &F,
    clean: &Signal,
    rule: ShrinkageRule,
    alpha: f64,
    functional: &NormSpec,
    subspace: Subspace,
    cfg: &McConfig,
) -> Result<SmoothnessReport> {
    cfg.positive_sigma()?;
    if !rule.satisfies_shrinkage_property() {
        return Err(invalid(
            "rule",
            format!("{rule:?} does not satisfy |F(y ± T, T)| <= |y|"),
        ));
    }
    let certificate = is_monotone(functional, cfg.seed)?;
    if !certificate.monotone {
        return Err(invalid("functional", "failed the monotonicity certificate"));
    }
    let n = frame.signal_len();
    if clean.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: clean.len(),
        });
    }
    let threshold = evt_threshold(cfg.sigma, alpha, frame.effective_count(subspace))?;
    let layout = Arc::clone(frame.layout());
    let mut clean_coeffs = vec![0.0; frame.atom_count()];
    frame.analyze_into(clean.samples(), &mut clean_coeffs);
    let clean_vec = CoefficientVector::new(clean_coeffs.clone(), Arc::clone(&layout))?;
    let clean_value = evaluate(functional, &clean_vec)?;
    let slack = 1e-12 * clean_value.max(1.0);
    let mask = layout.scaling_mask();

    let outcomes = run_trials(
        cfg,
        || (vec![0.0; n], CoefficientVector::zeros(Arc::clone(&layout))),
        |(data, coeffs), rng| -> Result<(bool, bool)> {
            fill_normal(rng, cfg.sigma, data);
            data.iter_mut()
                .zip(clean.samples())
                .for_each(|(d, u)| *d += u);
            frame.analyze_into(data, coeffs.values_mut());
            let covered = coeffs
                .values()
                .iter()
                .zip(&clean_coeffs)
                .zip(mask)
                .filter(|(_, s)| subspace.includes(**s))
                .all(|((y, x), _)| (y - x).abs() <= threshold);
            shrink_in_place(coeffs, threshold, rule, subspace);
            let smoother = evaluate(functional, coeffs)? <= clean_value + slack;
            Ok((smoother, covered))
        },
    );
    let mut smoother = 0;
    let mut covered = 0;
    for o in outcomes {
        let (s, c) = o?;
        smoother += usize::from(s);
        covered += usize::from(c);
    }
    let frequency = Proportion::from_count(smoother, cfg.trials);
    Ok(SmoothnessReport {
        alpha,
        threshold,
        functional: functional.clone(),
        certificate,
        clean_value,
        holds: frequency.value >= 1.0 - alpha - MC_SLACK * frequency.se,
        frequency,
        coverage: Proportion::from_count(covered, cfg.trials),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub alpha: f64,
    pub threshold: f64,
    pub m: usize,
    pub lower_frame_bound: f64,
    /// Trial average of `‖u - û‖²`.
    pub empirical_risk: f64,
    pub risk_se: f64,
    /// `(σ²/a) log(1/(1-α)) √(π log m)`.
    pub noise_term: f64,
    /// `(σ²/a) (1 + 2 log m) Σ min{1, |<φ, u>|²/σ²}`.
    pub signal_term: f64,
    pub bound: f64,
    /// Whether `T <= σ √(2 log m)`, the assumption of the inequality.
    pub assumption_holds: bool,
    /// `empirical_risk <= bound + 3 s.e.`
    pub holds: bool,
}

/// Risk of full-space soft thresholding at the extreme value threshold
/// against the oracle inequality.
pub fn oracle_risk_experiment<F: Frame + ?Sized>(
    frame: &F,
    clean: &Signal,
    alpha: f64,
    cfg: &McConfig,
) -> Result<RiskReport> {
    cfg.positive_sigma()?;
    let n = frame.signal_len();
    if clean.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: clean.len(),
        });
    }
    let sigma = cfg.sigma;
    let m = frame.effective_count(Subspace::Full);
    let threshold = evt_threshold(sigma, alpha, m)?;
    let lower = frame_bounds(frame)?.lower;
    let log_m = (m as f64).ln();

    let mut clean_coeffs = vec![0.0; frame.atom_count()];
    frame.analyze_into(clean.samples(), &mut clean_coeffs);
    let sparsity: f64 = clean_coeffs
        .iter()
        .map(|x| (x * x / (sigma * sigma)).min(1.0))
        .sum();
    let scale = sigma * sigma / lower;
    let noise_term = scale * (1.0 / (1.0 - alpha)).ln() * (PI * log_m).sqrt();
    let signal_term = scale * (1.0 + 2.0 * log_m) * sparsity;
    let bound = noise_term + signal_term;

    let losses = run_trials(
        cfg,
        || vec![0.0; n],
        |data, rng| -> Result<f64> {
            fill_normal(rng, sigma, data);
            data.iter_mut()
                .zip(clean.samples())
                .for_each(|(d, u)| *d += u);
            let est = denoise_with_threshold(
                frame,
                &Signal::new(data.clone())?,
                threshold,
                ShrinkageRule::Soft,
                Subspace::Full,
            )?;
            est.estimate.squared_distance(clean)
        },
    )
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let (mean, se) = mean_and_se(&losses);
    Ok(RiskReport {
        alpha,
        threshold,
        m,
        lower_frame_bound: lower,
        empirical_risk: mean,
        risk_se: se,
        noise_term,
        signal_term,
        bound,
        assumption_holds: threshold <= sigma * (2.0 * log_m).sqrt(),
        holds: mean <= bound + MC_SLACK * se,
    })
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Risk1dRow {
    pub mu: f64,
    pub t: f64,
    pub empirical: f64,
    pub se: f64,
    /// `e^{-T²/2} + min{1 + T², μ²}`.
    pub bound: f64,
    pub holds: bool,
}

/// Monte Carlo check of `E|μ - S(y, T)|² <= e^{-T²/2} + min{1 + T², μ²}` for
/// `y ~ N(μ, 1)` and the soft rule. All pairs share the trial's draw.
pub fn risk_1d_check(mu_list: &[f64], t_list: &[f64], cfg: &McConfig) -> Result<Vec<Risk1dRow>> {
    cfg.validate()?;
    if let Some(t) = t_list.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(invalid("T", format!("{t} must be finite and >= 0")));
    }
    let draws = run_trials(cfg, || (), |_, rng| standard_normal(rng));
    let mut rows = Vec::with_capacity(mu_list.len() * t_list.len());
    for &mu in mu_list {
        for &t in t_list {
            let losses: Vec<f64> = draws
                .iter()
                .map(|z| {
                    let err = mu - shrink_value(mu + z, t, ShrinkageRule::Soft);
                    err * err
                })
                .collect();
            let (empirical, se) = mean_and_se(&losses);
            let bound = (-t * t / 2.0).exp() + (1.0 + t * t).min(mu * mu);
            rows.push(Risk1dRow {
                mu,
                t,
                empirical,
                se,
                bound,
                holds: empirical <= bound + MC_SLACK * se,
            });
        }
    }
    Ok(rows)
}

/// Draws per counter stream in [`comparison_experiment`].
pub const COMPARISON_BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub t: f64,
    /// `P̂{‖η‖_∞ <= T}` with `η ~ N(0, G)`.
    pub dependent: Proportion,
    /// `P̂{‖ξ‖_∞ <= T}` with `ξ ~ N(0, I)`.
    pub independent: Proportion,
    pub difference: f64,
    pub joint_se: f64,
    pub bound: f64,
    /// `difference <= bound + 3 joint s.e.`
    pub holds: bool,
}

/// Two-sample Monte Carlo estimate of the distance between the distribution
/// functions of `‖η‖_∞` and `‖ξ‖_∞`, with the chi-flavor comparison bound.
pub fn comparison_experiment(
    gram: &DMatrix<f64>,
    t_list: &[f64],
    draws: usize,
    seed: u64,
) -> Result<Vec<ComparisonRow>> {
    if draws == 0 {
        return Err(invalid("draws", "must be positive"));
    }
    let dim = gram.nrows();
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidFrame("correlation matrix is not positive definite".into()))?;
    let lower = chol.l();
    let blocks = draws.div_ceil(COMPARISON_BLOCK);
    let k = t_list.len();
    let counts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = trial_rng(seed, b as u64);
            let mut z = vec![0.0; dim];
            let mut hits = vec![(0usize, 0usize); k];
            let len = COMPARISON_BLOCK.min(draws - b * COMPARISON_BLOCK);
            for _ in 0..len {
                z.iter_mut().for_each(|v| *v = standard_normal(&mut rng));
                let mut dep = 0.0_f64;
                for r in 0..dim {
                    let mut s = 0.0;
                    for c in 0..=r {
                        s += lower[(r, c)] * z[c];
                    }
                    dep = dep.max(s.abs());
                }
                let ind = (0..dim)
                    .map(|_| standard_normal(&mut rng).abs())
                    .fold(0.0, f64::max);
                for (h, t) in hits.iter_mut().zip(t_list) {
                    h.0 += usize::from(dep <= *t);
                    h.1 += usize::from(ind <= *t);
                }
            }
            hits
        })
        .reduce(
            || vec![(0, 0); k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| {
                    x.0 += y.0;
                    x.1 += y.1;
                });
                a
            },
        );
    t_list
        .iter()
        .zip(counts)
        .map(|(&t, (dep, ind))| {
            let dependent = Proportion::from_count(dep, draws);
            let independent = Proportion::from_count(ind, draws);
            let joint_se = dependent.se.hypot(independent.se);
            let bound =
                crate::diagnostics::comparison_bound(gram, t, crate::evt::Flavor::Chi)?.value;
            let difference = (dependent.value - independent.value).abs();
            Ok(ComparisonRow {
                t,
                dependent,
                independent,
                difference,
                joint_se,
                bound,
                holds: difference <= bound + MC_SLACK * joint_se,
            })
        })
        .collect()
}

/// Random correlation matrix `D^{-1/2} A Aᵀ D^{-1/2}` with Gaussian `A`.
pub fn random_correlation_matrix(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = trial_rng(seed, 0);
    let a = DMatrix::from_fn(dim, dim, |_, _| standard_normal(&mut rng));
    let cov = &a * a.transpose();
    let d: Vec<f64> = (0..dim).map(|i| cov[(i, i)].sqrt()).collect();
    DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            1.0
        } else {
            cov[(r, c)] / (d[r] * d[c])
        }
    })
}

/// Amplitude of each sine wave in the two-tone test signal.
pub const SINE_AMPLITUDE: f64 = 5.0 * std::f64::consts::SQRT_2 / 16.0;

/// `A (sin(π ω₁ k / n) + sin(π ω₂ k / n))` for `k = 0..n`.
pub fn two_sine_signal(n: usize, omega1: f64, omega2: f64) -> Result<Signal> {
    Signal::new(
        (0..n)
            .map(|k| {
                let x = PI * k as f64 / n as f64;
                SINE_AMPLITUDE * ((omega1 * x).sin() + (omega2 * x).sin())
            })
            .collect(),
    )
}

/// Step function with breakpoints at fixed fractions of the length.
pub fn piecewise_constant_signal(n: usize) -> Result<Signal> {
    const BREAKS: [f64; 6] = [0.11, 0.23, 0.4, 0.57, 0.72, 0.86];
    const LEVELS: [f64; 7] = [0.0, 4.0, -2.0, 6.0, 1.0, -3.0, 2.0];
    Signal::new(
        (0..n)
            .map(|k| {
                let x = k as f64 / n as f64;
                LEVELS[BREAKS.iter().filter(|b| x >= **b).count()]
            })
            .collect(),
    )
}

/// Signal whose coefficients in an orthonormal `frame` are `1σ, 2σ, …, count·σ`
/// at evenly spread detail positions and zero elsewhere.
pub fn graded_sparse_signal<F: Frame + ?Sized>(
    frame: &F,
    count: usize,
    sigma: f64,
) -> Result<Signal> {
    if frame.structure() != FrameStructure::Orthonormal {
        return Err(Error::Unsupported(
            "graded sparse signals need an orthonormal frame".into(),
        ));
    }
    let layout = Arc::clone(frame.layout());
    let detail: Vec<usize> = (0..layout.len())
        .filter(|p| !layout.is_scaling(*p))
        .collect();
    if count == 0 || count > detail.len() {
        return Err(invalid(
            "count",
            format!("{count} is outside 1..={}", detail.len()),
        ));
    }
    let mut values = vec![0.0; layout.len()];
    for i in 0..count {
        values[detail[i * detail.len() / count + detail.len() / (2 * count)]] =
            (i + 1) as f64 * sigma;
    }
    dual_synthesize(frame, &CoefficientVector::new(values, layout)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineComparison {
    pub n: usize,
    pub omega1: f64,
    pub omega2: f64,
    pub sigma: f64,
    pub seed: u64,
    pub basis_threshold: f64,
    pub frame_threshold: f64,
    pub basis_kept: usize,
    pub frame_kept: usize,
    /// `‖û - u‖² / n`.
    pub basis_mse: f64,
    pub frame_mse: f64,
}

/// One seeded noisy copy of the two-tone signal, soft thresholded at the
/// universal threshold in the sine basis and in the oversampled sine frame.
pub fn sine_frame_comparison(
    n: usize,
    omega1: f64,
    omega2: f64,
    oversample: usize,
    sigma: f64,
    seed: u64,
) -> Result<SineComparison> {
    use crate::transforms::SineFrame;
    let clean = two_sine_signal(n, omega1, omega2)?;
    let mut data = vec![0.0; n];
    fill_normal(&mut trial_rng(seed, 0), sigma, &mut data);
    data.iter_mut()
        .zip(clean.samples())
        .for_each(|(d, u)| *d += u);
    let data = Signal::new(data)?;
    let run = |frame: &SineFrame| -> Result<(f64, usize, f64)> {
        let spec = ThresholdSpec::for_frame(ThresholdRule::Universal, sigma, frame, Subspace::Full);
        let t = spec.resolve()?;
        let out = denoise_with_threshold(frame, &data, t, ShrinkageRule::Soft, Subspace::Full)?;
        Ok((
            t,
            out.kept_count,
            out.estimate.squared_distance(&clean)? / n as f64,
        ))
    };
    let (basis_threshold, basis_kept, basis_mse) = run(&SineFrame::new(n, 1)?)?;
    let (frame_threshold, frame_kept, frame_mse) = run(&SineFrame::new(n, oversample)?)?;
    Ok(SineComparison {
        n,
        omega1,
        omega2,
        sigma,
        seed,
        basis_threshold,
        frame_threshold,
        basis_kept,
        frame_kept,
        basis_mse,
        frame_mse,
    })
}
