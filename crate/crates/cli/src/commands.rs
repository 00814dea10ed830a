use std::path::{Path, PathBuf};

use serde::Serialize;

use framethresh::diagnostics::{
    comparison_bound, rest_split, rest_sum, stability_check, ComparisonBound, RestSplit,
    StabilityReport,
};
use framethresh::evt::{
    evt_threshold, ti_constant_c, Flavor, ThresholdRule, ThresholdSpec, MIN_TI_GRID,
};
use framethresh::frame::{Frame, Subspace};
use framethresh::io::{read_signal, write_coefficients, write_signal};
use framethresh::norms::{NormKind, NormSpec};
use framethresh::shrink::{denoise_with_threshold, ShrinkageRule};
use framethresh::simulate::{
    coverage_experiment, graded_sparse_signal, gumbel_experiment, oracle_risk_experiment,
    piecewise_constant_signal, sidak_experiment, smoothness_experiment, ti_bound_experiment,
    McConfig,
};
use framethresh::transforms::{FrameSpec, WaveletFilterPair};
use framethresh::{Error, GramView, Signal};

use crate::args::{
    DenoiseArgs, DiagnoseArgs, Experiment, RunConfig, ShrinkName, SimulateArgs, SubspaceName,
    ThresholdRuleName, ThresholdsArgs,
};
use crate::error::{CliError, CliResult};

/// Files written by a command, primary output first, plus anything meant
/// for standard output.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub stdout: Option<String>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    std::fs::write(path, to_json(value)).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Parses `--frame-spec`: inline JSON when it starts with `{`, a file path otherwise.
pub fn load_frame_spec(arg: &str) -> CliResult<FrameSpec> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        FrameSpec::from_json(trimmed).map_err(|e| match e {
            Error::Parse(m) => CliError::parse(Path::new("--frame-spec"), m),
            other => other.into(),
        })
    } else {
        let path = Path::new(arg);
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
    }
}

fn inline_spec(arg: &mut String) -> CliResult<()> {
    let spec = load_frame_spec(arg)?;
    *arg = serde_json::to_string(&spec).expect("frame specs serialize");
    Ok(())
}

/// Inlines frame specs so the configuration no longer depends on spec files.
pub fn resolve(mut config: RunConfig) -> CliResult<RunConfig> {
    match &mut config {
        RunConfig::Thresholds(_) => {}
        RunConfig::Denoise(a) => inline_spec(&mut a.frame_spec)?,
        RunConfig::Simulate(a) => inline_spec(&mut a.frame_spec)?,
        RunConfig::Diagnose(a) => inline_spec(&mut a.frame_spec)?,
    }
    Ok(config)
}

/// Moves every output of `config` into `dir`, keeping file names.
pub fn redirect_outputs(config: &mut RunConfig, dir: &Path) {
    let mut paths: Vec<&mut PathBuf> = Vec::new();
    match config {
        RunConfig::Thresholds(a) => paths.extend(a.out.as_mut()),
        RunConfig::Denoise(a) => {
            paths.push(&mut a.output);
            paths.extend(a.report.as_mut());
            paths.extend(a.coefficients.as_mut());
        }
        RunConfig::Simulate(a) => {
            paths.push(&mut a.out);
            paths.extend(a.qq.as_mut());
        }
        RunConfig::Diagnose(a) => paths.push(&mut a.out),
    }
    for p in paths {
        if let Some(name) = p.file_name() {
            *p = dir.join(name);
        }
    }
}

pub fn run(config: &RunConfig) -> CliResult<RunOutput> {
    match config {
        RunConfig::Thresholds(a) => cmd_thresholds(a),
        RunConfig::Denoise(a) => cmd_denoise(a),
        RunConfig::Simulate(a) => cmd_simulate(a),
        RunConfig::Diagnose(a) => cmd_diagnose(a),
    }
}

fn subspace(name: SubspaceName) -> Subspace {
    match name {
        SubspaceName::Full => Subspace::Full,
        SubspaceName::Detail => Subspace::Detail,
    }
}

fn shrinkage(name: ShrinkName) -> ShrinkageRule {
    match name {
        ShrinkName::Soft => ShrinkageRule::Soft,
        ShrinkName::Hard => ShrinkageRule::Hard,
        ShrinkName::Garrote => ShrinkageRule::Garrote,
    }
}

fn filters_of(spec: &FrameSpec) -> Option<&str> {
    match spec {
        FrameSpec::Wavelet { filters, .. }
        | FrameSpec::Cyclespin { filters, .. }
        | FrameSpec::Ti { filters, .. } => Some(filters),
        _ => None,
    }
}

/// `--c` when given, the computed constant of the spec's filters otherwise.
fn ti_constant(c: Option<f64>, spec: &FrameSpec) -> CliResult<f64> {
    if let Some(c) = c {
        return Ok(c);
    }
    let filters = filters_of(spec).ok_or_else(|| {
        CliError::validation("c", "needs a wavelet-based frame spec or an explicit value")
    })?;
    Ok(ti_constant_c(&WaveletFilterPair::by_name(filters)?, MIN_TI_GRID)?.c)
}

struct RuleParams {
    alpha: f64,
    z: Option<f64>,
    threshold: Option<f64>,
    c: Option<f64>,
}

fn threshold_rule(
    name: ThresholdRuleName,
    params: &RuleParams,
    spec: &FrameSpec,
) -> CliResult<ThresholdRule> {
    let alpha = params.alpha;
    Ok(match name {
        ThresholdRuleName::Universal => ThresholdRule::Universal,
        ThresholdRuleName::Evt => ThresholdRule::Evt { alpha },
        ThresholdRuleName::FromZn => ThresholdRule::FromZn {
            z: params
                .z
                .ok_or_else(|| CliError::validation("z", "required by the from-zn rule"))?,
        },
        ThresholdRuleName::Cyclespin => match spec {
            FrameSpec::Cyclespin { shifts, .. } => ThresholdRule::Cyclespin {
                alpha,
                shifts: *shifts,
            },
            _ => {
                return Err(CliError::validation(
                    "threshold-rule",
                    "cyclespin needs a cyclespin frame spec",
                ))
            }
        },
        ThresholdRuleName::Ti => ThresholdRule::Ti {
            alpha,
            c: ti_constant(params.c, spec)?,
        },
        ThresholdRuleName::Fixed => ThresholdRule::Fixed {
            value: params
                .threshold
                .ok_or_else(|| CliError::validation("threshold", "required by the fixed rule"))?,
        },
    })
}

#[derive(Debug, Serialize)]
struct ThresholdRow {
    rule: &'static str,
    alpha: Option<f64>,
    m: usize,
    threshold: f64,
}

#[derive(Debug, Serialize)]
struct ThresholdTable {
    sigma: f64,
    n: usize,
    #[serde(rename = "M")]
    shifts: Option<usize>,
    wavelet: String,
    c: Option<f64>,
    /// Why the translation-invariant rows are missing, if they are.
    #[serde(skip_serializing_if = "Option::is_none")]
    ti_note: Option<String>,
    rows: Vec<ThresholdRow>,
}

fn cmd_thresholds(a: &ThresholdsArgs) -> CliResult<RunOutput> {
    if a.alpha.is_empty() {
        return Err(CliError::validation("alpha", "needs at least one value"));
    }
    if !(a.sigma > 0.0 && a.sigma.is_finite()) {
        return Err(CliError::validation(
            "sigma",
            format!("{} must be positive", a.sigma),
        ));
    }
    if a.n < 2 {
        return Err(CliError::validation(
            "n",
            format!("{} must be at least 2", a.n),
        ));
    }
    let (c, ti_note) = match a.c {
        Some(c) => (Some(c), None),
        None => match ti_constant_c(&WaveletFilterPair::by_name(&a.wavelet)?, MIN_TI_GRID) {
            Ok(k) => (Some(k.c), None),
            Err(Error::NotDifferentiable(reason)) => (None, Some(reason)),
            Err(e) => return Err(e.into()),
        },
    };
    let resolve = |rule: ThresholdRule, m: usize| ThresholdSpec::new(rule, a.sigma, m).resolve();
    let mut rows = vec![ThresholdRow {
        rule: "universal",
        alpha: None,
        m: a.n,
        threshold: resolve(ThresholdRule::Universal, a.n)?,
    }];
    for &alpha in &a.alpha {
        let row = |rule: &'static str, threshold: f64, m: usize| ThresholdRow {
            rule,
            alpha: Some(alpha),
            m,
            threshold,
        };
        rows.push(row("evt", resolve(ThresholdRule::Evt { alpha }, a.n)?, a.n));
        if let Some(shifts) = a.shifts {
            let t = resolve(ThresholdRule::Cyclespin { alpha, shifts }, a.n)
                .map_err(|e| flag_error(e, "M"))?;
            rows.push(row("cyclespin", t, a.n));
        }
        if let Some(c) = c {
            rows.push(row(
                "ti",
                resolve(ThresholdRule::Ti { alpha, c }, a.n)?,
                a.n,
            ));
            if a.n.is_power_of_two() {
                let naive = a.n * a.n.trailing_zeros() as usize;
                rows.push(row(
                    "ti_naive_count",
                    evt_threshold(a.sigma, alpha, naive)?,
                    naive,
                ));
            }
        }
    }
    let table = ThresholdTable {
        sigma: a.sigma,
        n: a.n,
        shifts: a.shifts,
        wavelet: a.wavelet.clone(),
        c,
        ti_note,
        rows,
    };
    match &a.out {
        Some(path) => {
            write_json(path, &table)?;
            Ok(RunOutput {
                files: vec![path.clone()],
                stdout: None,
            })
        }
        None => Ok(RunOutput {
            files: Vec::new(),
            stdout: Some(to_json(&table)),
        }),
    }
}

/// Renames a core parameter error after the flag that carried it.
fn flag_error(e: Error, flag: &str) -> CliError {
    match e {
        Error::InvalidParameter { reason, .. } => CliError::validation(flag, reason),
        other => other.into(),
    }
}

#[derive(Debug, Serialize)]
struct DenoiseReport {
    frame: String,
    n: usize,
    sigma: f64,
    rule: ShrinkageRule,
    threshold_rule: ThresholdRule,
    subspace: Subspace,
    m: usize,
    threshold_used: f64,
    kept_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    mse: Option<f64>,
}

pub fn denoise_report_path(a: &DenoiseArgs) -> PathBuf {
    a.report.clone().unwrap_or_else(|| {
        let stem = a
            .output
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "denoise".into());
        a.output.with_file_name(format!("{stem}.report.json"))
    })
}

fn cmd_denoise(a: &DenoiseArgs) -> CliResult<RunOutput> {
    let spec = load_frame_spec(&a.frame_spec)?;
    let frame = spec.build()?;
    let data = read_signal(&a.input)?;
    if data.len() != frame.signal_len() {
        return Err(CliError::validation(
            "input",
            format!(
                "{} samples, the frame expects {}",
                data.len(),
                frame.signal_len()
            ),
        ));
    }
    let params = RuleParams {
        alpha: a.alpha,
        z: a.z,
        threshold: a.threshold,
        c: a.c,
    };
    let rule = threshold_rule(a.threshold_rule, &params, &spec)?;
    let sub = subspace(a.subspace);
    let tspec = ThresholdSpec::for_frame(rule, a.sigma, frame.as_ref(), sub);
    let threshold = tspec.resolve()?;
    let out = denoise_with_threshold(frame.as_ref(), &data, threshold, shrinkage(a.rule), sub)?;
    let mse = match &a.clean {
        Some(path) => {
            let clean = read_signal(path)?;
            let d = out
                .estimate
                .squared_distance(&clean)
                .map_err(|e| flag_error(e, "clean"))?;
            Some(d / clean.len() as f64)
        }
        None => None,
    };
    let report = DenoiseReport {
        frame: frame.name(),
        n: frame.signal_len(),
        sigma: a.sigma,
        rule: shrinkage(a.rule),
        threshold_rule: rule,
        subspace: sub,
        m: tspec.m,
        threshold_used: out.threshold_used,
        kept_count: out.kept_count,
        mse,
    };
    write_signal(&a.output, &out.estimate)?;
    let report_path = denoise_report_path(a);
    write_json(&report_path, &report)?;
    let mut files = vec![a.output.clone(), report_path];
    if let Some(path) = &a.coefficients {
        write_coefficients(path, &out.thresholded_coeffs)?;
        files.push(path.clone());
    }
    Ok(RunOutput {
        files,
        stdout: None,
    })
}

#[derive(Debug, Serialize)]
struct SimulationReport<R: Serialize> {
    experiment: Experiment,
    frame: FrameSpec,
    config: McConfig,
    report: R,
}

fn envelope<R: Serialize>(
    experiment: Experiment,
    spec: &FrameSpec,
    cfg: McConfig,
    report: R,
) -> String {
    to_json(&SimulationReport {
        experiment,
        frame: spec.clone(),
        config: cfg,
        report,
    })
}

fn clean_signal(
    arg: Option<&str>,
    default: &str,
    frame: &dyn Frame,
    sigma: f64,
) -> CliResult<Signal> {
    let n = frame.signal_len();
    let arg = arg.unwrap_or(default);
    if arg == "zero" {
        return Ok(Signal::zeros(n));
    }
    if arg == "piecewise" {
        return Ok(piecewise_constant_signal(n)?);
    }
    if let Some(count) = arg.strip_prefix("sparse:") {
        let count: usize = count
            .parse()
            .map_err(|_| CliError::validation("signal", format!("`{count}` is not a count")))?;
        return Ok(graded_sparse_signal(frame, count, sigma)?);
    }
    Ok(read_signal(Path::new(arg))?)
}

fn norm_spec(arg: Option<&str>) -> CliResult<NormSpec> {
    let Some(text) = arg else {
        return Ok(NormSpec::pqr_wavelet(2.0, 2.0, 0.5));
    };
    let mut spec: NormSpec =
        serde_json::from_str(text).map_err(|e| CliError::parse(Path::new("--norm"), e))?;
    if let NormKind::WeightedL2 {
        weights,
        weights_path: Some(path),
    } = &mut spec.kind
    {
        if weights.is_none() {
            *weights = Some(read_signal(path)?.samples().to_vec());
        }
    }
    Ok(spec)
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<RunOutput> {
    let spec = load_frame_spec(&a.frame_spec)?;
    let cfg = McConfig::new(a.trials, a.seed).with_sigma(a.sigma);
    if a.qq.is_some() && a.experiment != Experiment::Gumbel {
        return Err(CliError::validation(
            "qq",
            "only the gumbel experiment has Q-Q data",
        ));
    }
    let sub = subspace(a.subspace);
    let mut files = vec![a.out.clone()];
    let json = match a.experiment {
        Experiment::Ti => {
            let frame = spec.build_ti().map_err(|e| flag_error(e, "frame-spec"))?;
            let c = ti_constant(a.c, &spec)?;
            envelope(
                a.experiment,
                &spec,
                cfg,
                ti_bound_experiment(&frame, c, &a.z_list, &cfg)?,
            )
        }
        other => {
            let frame = spec.build()?;
            let frame = frame.as_ref();
            match other {
                Experiment::Gumbel => {
                    let outcome = gumbel_experiment(frame, sub, &cfg)?;
                    if let Some(path) = &a.qq {
                        let mut csv = String::from("gumbel_quantile,rescaled_sample\n");
                        for (q, s) in outcome.qq() {
                            csv.push_str(&format!("{q:?},{s:?}\n"));
                        }
                        write_text(path, &csv)?;
                        files.push(path.clone());
                    }
                    envelope(a.experiment, &spec, cfg, outcome.report)
                }
                Experiment::Coverage => {
                    let params = RuleParams {
                        alpha: a.alpha,
                        z: None,
                        threshold: None,
                        c: a.c,
                    };
                    let rule = threshold_rule(a.threshold_rule, &params, &spec)?;
                    envelope(
                        a.experiment,
                        &spec,
                        cfg,
                        coverage_experiment(frame, rule, sub, &cfg)?,
                    )
                }
                Experiment::Sidak => {
                    let reference = a.reference_m.unwrap_or_else(|| frame.effective_count(sub));
                    envelope(
                        a.experiment,
                        &spec,
                        cfg,
                        sidak_experiment(frame, sub, reference, &a.t_list, &cfg)?,
                    )
                }
                Experiment::Smoothness => {
                    let clean = clean_signal(a.signal.as_deref(), "piecewise", frame, a.sigma)?;
                    let norm = norm_spec(a.norm.as_deref())?;
                    envelope(
                        a.experiment,
                        &spec,
                        cfg,
                        smoothness_experiment(
                            frame,
                            &clean,
                            shrinkage(a.rule),
                            a.alpha,
                            &norm,
                            sub,
                            &cfg,
                        )?,
                    )
                }
                Experiment::Risk => {
                    let clean = clean_signal(a.signal.as_deref(), "sparse:10", frame, a.sigma)?;
                    envelope(
                        a.experiment,
                        &spec,
                        cfg,
                        oracle_risk_experiment(frame, &clean, a.alpha, &cfg)?,
                    )
                }
                Experiment::Ti => unreachable!("handled above"),
            }
        }
    };
    write_text(&a.out, &json)?;
    Ok(RunOutput {
        files,
        stdout: None,
    })
}

#[derive(Debug, Serialize)]
struct RemainderRow {
    n: usize,
    m: usize,
    rest_sum: f64,
    split: RestSplit,
}

#[derive(Debug, Serialize)]
struct ComparisonTable {
    n: usize,
    bounds: Vec<ComparisonBound>,
}

#[derive(Debug, Serialize)]
struct DiagnoseReport {
    frame: FrameSpec,
    delta: f64,
    stability: StabilityReport,
    remainders: Vec<RemainderRow>,
    comparison: Vec<ComparisonTable>,
}

fn cmd_diagnose(a: &DiagnoseArgs) -> CliResult<RunOutput> {
    let spec = load_frame_spec(&a.frame_spec)?;
    let specs = if a.n_list.is_empty() {
        vec![spec.clone()]
    } else {
        a.n_list
            .iter()
            .map(|&n| spec.with_len(n).map_err(|e| flag_error(e, "n-list")))
            .collect::<CliResult<Vec<_>>>()?
    };
    let frames = specs
        .iter()
        .map(|s| s.build())
        .collect::<framethresh::Result<Vec<_>>>()?;
    let family: Vec<&dyn Frame> = frames.iter().map(|f| f.as_ref()).collect();
    let dedup = !a.keep_duplicates;
    let stability = stability_check(&family, a.rho, dedup)?;
    let mut remainders = Vec::with_capacity(frames.len());
    let mut comparison = Vec::with_capacity(frames.len());
    for frame in &family {
        let view = if dedup {
            GramView::deduplicated(*frame)
        } else {
            GramView::new(*frame)
        };
        let m = view.len();
        remainders.push(RemainderRow {
            n: frame.signal_len(),
            m,
            rest_sum: rest_sum(&view, m)?,
            split: rest_split(&view, m, a.rho, a.delta)?,
        });
        let bounds = a
            .t_list
            .iter()
            .map(|t| comparison_bound(&view, *t, Flavor::Chi))
            .collect::<framethresh::Result<Vec<_>>>()
            .map_err(|e| flag_error(e, "T-list"))?;
        comparison.push(ComparisonTable {
            n: frame.signal_len(),
            bounds,
        });
    }
    let report = DiagnoseReport {
        frame: spec,
        delta: a.delta,
        stability,
        remainders,
        comparison,
    };
    write_json(&a.out, &report)?;
    Ok(RunOutput {
        files: vec![a.out.clone()],
        stdout: None,
    })
}
