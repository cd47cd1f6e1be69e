//! The four subcommands.

use std::path::Path;

use adiakit::bounds::{constant_c, BoundReport, PowerLawFit};
use adiakit::davies::{detailed_balance_certificate, gibbs_state};
use adiakit::linalg;
use adiakit::models::{Example2, FamilySpec};
use adiakit::propagate::{intertwiner_ode, intertwining_residuals};
use adiakit::spectral::gap_report;
use adiakit::superop::is_cptp;
use adiakit::sweep::{run_sweep, SweepConfig, SweepResult};
use adiakit::{semisimplicity_defect, zero_projector, AdiaError, LiouvillianFamily, C64};
use log::info;
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt_f64, Sink};
use crate::{plot, CliError, Outcome};

fn build_family(spec: &FamilySpec) -> Result<Box<dyn LiouvillianFamily>, CliError> {
    spec.build().map_err(|e| CliError::Config(ConfigError::Invalid(format!("family: {e}"))))
}

fn sweep_config(cfg: &ExperimentConfig) -> SweepConfig {
    SweepConfig {
        propagator: cfg.tolerances.propagator.clone(),
        spectral: cfg.tolerances.spectral,
        tabulate: cfg.tolerances.tabulate,
    }
}

fn unit_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| k as f64 / (points - 1) as f64).collect()
}

/// Reorders `next` so that entry `j` is the nearest unused neighbour of
/// `prev[j]`, taking pairs in order of increasing distance.
pub fn match_tracks(prev: &[C64], next: &[C64]) -> Vec<C64> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(prev.len() * next.len());
    for (i, a) in prev.iter().enumerate() {
        for (j, b) in next.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut out = vec![None; prev.len()];
    let mut used = vec![false; next.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !used[j] {
            out[i] = Some(next[j]);
            used[j] = true;
        }
    }
    out.into_iter().map(|z| z.expect("square assignment")).collect()
}

pub fn spectrum(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let family = build_family(&cfg.family)?;
    let sink = Sink::new(out, cfg)?;
    let mut prev: Option<Vec<C64>> = None;
    let mut rows = Vec::new();
    let mut n = 0;
    for s in unit_grid(cfg.spectrum.points) {
        let l = family.generator(s)?;
        let mut evals = linalg::eigvals(l.matrix())?.to_vec();
        let tracked = match &prev {
            None => {
                evals.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
                evals
            }
            Some(p) => match_tracks(p, &evals),
        };
        let gap = gap_report(&l, s, &cfg.tolerances.spectral)?;
        n = tracked.len();
        let mut row = vec![fmt_f64(s)];
        row.extend(tracked.iter().map(|z| fmt_f64(z.norm())));
        row.push(fmt_f64(gap.gap));
        row.push(fmt_f64(gap.semisimple_defect));
        rows.push(row);
        prev = Some(tracked);
    }
    let mut columns = vec!["s".to_string()];
    columns.extend((0..n).map(|j| format!("abs_lambda_{j}")));
    columns.push("gap".into());
    columns.push("semisimple_defect".into());
    let mut files = vec![sink.write_csv("spectrum.csv", &columns, &rows)?];
    if cfg.outputs.plot_scripts {
        let script = plot::spectrum_script(&sink.file_name("spectrum.csv"), &sink.file_name("spectrum.png"));
        files.push(sink.write_bytes("plot_spectrum.py", script.as_bytes())?);
    }
    info!("spectrum: {} points, {n} tracks", rows.len());
    Ok(Outcome { files, passed: true, summary: format!("{} points, {n} eigenvalue tracks", rows.len()) })
}

fn sweep_rows(result: &SweepResult) -> (Vec<String>, Vec<Vec<String>>) {
    let columns = ["t", "error", "steps", "discrepancy", "flagged"].map(String::from).to_vec();
    let rows = result
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.error),
                r.steps.to_string(),
                fmt_f64(r.discrepancy),
                u8::from(r.flagged).to_string(),
            ]
        })
        .collect();
    (columns, rows)
}

#[derive(Serialize)]
struct FitFile<'a> {
    family: &'a str,
    fit: Option<PowerLawFit>,
    fit_error: Option<String>,
    flagged_rows: usize,
}

pub fn sweep(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let family = build_family(&cfg.family)?;
    let sink = Sink::new(out, cfg)?;
    let ladder = cfg.sweep.ladder().values();
    let result = run_sweep(family.as_ref(), &ladder, &sweep_config(cfg))?;
    let (columns, rows) = sweep_rows(&result);
    let mut files = vec![sink.write_csv("sweep.csv", &columns, &rows)?];
    let flagged_rows = result.rows.iter().filter(|r| r.flagged).count();
    let (fit, fit_error) = match result.fit(cfg.sweep.fit) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    files.push(sink.write_json("sweep_fit.json", &FitFile { family: &result.family, fit, fit_error: fit_error.clone(), flagged_rows })?);
    if cfg.outputs.plot_scripts {
        let script = plot::sweep_script(
            &sink.file_name("sweep.csv"),
            &sink.file_name("sweep_fit.json"),
            &sink.file_name("sweep.png"),
        );
        files.push(sink.write_bytes("plot_sweep.py", script.as_bytes())?);
    }
    let summary = match (fit, fit_error) {
        (Some(f), _) => format!("error ≈ {:.4e}/T^{:.4} ({} rows, {flagged_rows} flagged)", f.prefactor, f.exponent, f.rows),
        (None, Some(e)) => format!("no fit: {e}"),
        _ => unreachable!(),
    };
    info!("sweep: {summary}");
    Ok(Outcome { files, passed: true, summary })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Suite {
    pub name: &'static str,
    pub status: Status,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Suite {
    fn measured(name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        let status = if measured <= tolerance { Status::Pass } else { Status::Fail };
        Self { name, status, measured: Some(measured), tolerance: Some(tolerance), detail }
    }

    fn skipped(name: &'static str, reason: &str) -> Self {
        Self { name, status: Status::Skipped, measured: None, tolerance: None, detail: reason.into() }
    }

    fn errored(name: &'static str, e: &AdiaError) -> Self {
        Self { name, status: Status::Fail, measured: None, tolerance: None, detail: e.to_string() }
    }

    fn from_result(name: &'static str, r: Result<Suite, AdiaError>) -> Self {
        r.unwrap_or_else(|e| Self::errored(name, &e))
    }
}

fn suite_cptp(family: &dyn LiouvillianFamily, grid: &[f64], tol: f64) -> Result<Suite, AdiaError> {
    if family.space() != adiakit::StateSpace::Liouville {
        return Ok(Suite::skipped("cptp", "Hilbert-space family"));
    }
    let mut worst: f64 = 0.0;
    for &s in grid {
        let l = family.generator(s)?;
        for h in [1e-3, 0.1, 1.0, 10.0] {
            let r = is_cptp(&l.expm(h), tol);
            worst = worst.max(r.cp_violation).max(r.tp_violation);
        }
    }
    Ok(Suite::measured("cptp", worst, tol, "max CP/TP violation of exp(hL), h in {1e-3, 0.1, 1, 10}".into()))
}

fn suite_intertwining(family: &dyn LiouvillianFamily, cfg: &ExperimentConfig) -> Result<Suite, AdiaError> {
    let spectral = &cfg.tolerances.spectral;
    let mut worst: f64 = 0.0;
    let mut used = Vec::new();
    for s in [0.25, 0.5, 0.75, 1.0] {
        let w = match intertwiner_ode(family, s, 1e-11, spectral) {
            Ok(w) => w,
            Err(AdiaError::GapTooSmall { .. }) => continue,
            Err(e) => return Err(e),
        };
        let (a, b) = intertwining_residuals(family, s, &w, spectral.zero_tol)?;
        worst = worst.max(a).max(b);
        used.push(s);
    }
    if used.is_empty() {
        return Ok(Suite::skipped("intertwining", "gap closes at every test point"));
    }
    Ok(Suite::measured("intertwining", worst, cfg.tolerances.checks.intertwining, format!("max of |P(s)W - W|, |W P(0) - W| at s = {used:?}")))
}

fn suite_semisimplicity(family: &dyn LiouvillianFamily, grid: &[f64], cfg: &ExperimentConfig) -> Result<Suite, AdiaError> {
    let mut worst: f64 = 0.0;
    for &s in grid {
        let l = family.generator(s)?;
        let scale = l.norm2();
        if scale == 0.0 {
            continue;
        }
        let p = zero_projector(&l, cfg.tolerances.spectral.zero_tol)?;
        worst = worst.max(semisimplicity_defect(&l, &p) / scale);
    }
    Ok(Suite::measured("semisimplicity", worst, cfg.tolerances.checks.semisimplicity, "max |L P| / |L| over the grid".into()))
}

fn suite_kms(ex2: Option<&Example2>, grid: &[f64], cfg: &ExperimentConfig) -> Result<Suite, AdiaError> {
    let Some(f) = ex2 else {
        return Ok(Suite::skipped("kms", "family has no thermal bath"));
    };
    let bath = &f.params_ref().bath;
    let beta = bath.beta;
    let omegas: Vec<f64> = grid.iter().map(|&s| f.delta(s)).collect();
    let rates = bath.kms_violation(&omegas);
    let (mut stationarity, mut normality): (f64, f64) = (0.0, 0.0);
    for &s in grid {
        let l = f.generator(s)?;
        let rho = gibbs_state(&f.system_hamiltonian(s), beta)?;
        let cert = detailed_balance_certificate(&l, &rho)?;
        let scale = l.norm2();
        stationarity = stationarity.max(cert.stationarity / scale);
        normality = normality.max(cert.normality_defect / (scale * scale));
    }
    let worst = rates.max(stationarity).max(normality);
    Ok(Suite::measured(
        "kms",
        worst,
        cfg.tolerances.checks.kms,
        format!(
            "rate asymmetry {} at the Bohr frequencies, Gibbs stationarity {}, normality defect {} (relative)",
            fmt_f64(rates),
            fmt_f64(stationarity),
            fmt_f64(normality)
        ),
    ))
}

fn suite_closed_form(ex2: Option<&Example2>, cfg: &ExperimentConfig) -> Result<Suite, AdiaError> {
    let Some(f) = ex2 else {
        return Ok(Suite::skipped("closed_form_spectrum", "no closed-form spectrum for this family"));
    };
    let mut worst: f64 = 0.0;
    for k in 1..20 {
        let s = k as f64 / 20.0;
        let numeric = linalg::eigvals(f.generator(s)?.matrix())?.to_vec();
        let closed = f.closed_form_spectrum(s)?;
        let scale = numeric.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let paired = match_tracks(&closed, &numeric);
        for (a, b) in closed.iter().zip(&paired) {
            worst = worst.max((a - b).norm() / scale);
        }
    }
    Ok(Suite::measured(
        "closed_form_spectrum",
        worst,
        cfg.tolerances.checks.closed_form,
        "relative eigenvalue mismatch at s = 0.05, 0.10, ..., 0.95".into(),
    ))
}

struct BoundRun {
    report: BoundReport,
    sweep: SweepResult,
    rows: Vec<BoundRow>,
}

#[derive(Serialize)]
struct BoundRow {
    t: f64,
    error: f64,
    c_over_t: f64,
    threshold: f64,
    pass: bool,
}

fn bound_run(family: &dyn LiouvillianFamily, ladder: &[f64], cfg: &ExperimentConfig) -> Result<BoundRun, AdiaError> {
    let report = constant_c(family, 1.0, &cfg.tolerances.bound)?;
    let sweep = run_sweep(family, ladder, &sweep_config(cfg))?;
    let rows = sweep
        .rows
        .iter()
        .map(|r| {
            let c_over_t = report.c / r.t;
            let threshold = cfg.tolerances.safety * c_over_t + cfg.tolerances.bound_floor;
            BoundRow { t: r.t, error: r.error, c_over_t, threshold, pass: !r.flagged && r.error <= threshold }
        })
        .collect();
    Ok(BoundRun { report, sweep, rows })
}

fn suite_bound(family: &dyn LiouvillianFamily, cfg: &ExperimentConfig) -> Result<Suite, AdiaError> {
    if !cfg.family.is_gapped() {
        return Ok(Suite::skipped("bound_validity", "gap closes on [0, 1]; the 1/T bound does not apply"));
    }
    let run = bound_run(family, &cfg.verify.bound_ladder.values(), cfg)?;
    let worst = run
        .rows
        .iter()
        .map(|r| if r.error.is_nan() { f64::INFINITY } else { r.error / r.threshold })
        .fold(0.0, f64::max);
    Ok(Suite::measured(
        "bound_validity",
        worst,
        1.0,
        format!("C = {}, max error / (safety C/T + floor) over {} rows", fmt_f64(run.report.c), run.sweep.rows.len()),
    ))
}

#[derive(Serialize)]
struct VerifyFile<'a> {
    family: &'a str,
    passed: bool,
    suites: &'a [Suite],
}

pub fn verify(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let family = build_family(&cfg.family)?;
    let sink = Sink::new(out, cfg)?;
    let ex2 = match &cfg.family {
        FamilySpec::Example2(p) => Some(Example2::new(p.clone())?),
        _ => None,
    };
    let grid = unit_grid(cfg.verify.grid_points.max(2));
    let f = family.as_ref();
    let suites = vec![
        Suite::from_result("cptp", suite_cptp(f, &grid, cfg.tolerances.checks.cptp)),
        Suite::from_result("intertwining", suite_intertwining(f, cfg)),
        Suite::from_result("semisimplicity", suite_semisimplicity(f, &grid, cfg)),
        Suite::from_result("kms", suite_kms(ex2.as_ref(), &grid, cfg)),
        Suite::from_result("closed_form_spectrum", suite_closed_form(ex2.as_ref(), cfg)),
        Suite::from_result("bound_validity", suite_bound(f, cfg)),
    ];
    let passed = suites.iter().all(|s| s.status != Status::Fail);
    let file = sink.write_json("verify.json", &VerifyFile { family: f.name(), passed, suites: &suites })?;
    let failed: Vec<&str> = suites.iter().filter(|s| s.status == Status::Fail).map(|s| s.name).collect();
    let summary = if passed { "all suites passed".to_string() } else { format!("failed: {}", failed.join(", ")) };
    info!("verify: {summary}");
    Ok(Outcome { files: vec![file], passed, summary })
}

#[derive(Serialize)]
struct BoundFile<'a> {
    family: &'a str,
    c: f64,
    report: &'a BoundReport,
    safety: f64,
    passed: bool,
}

pub fn bound(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    let family = build_family(&cfg.family)?;
    let sink = Sink::new(out, cfg)?;
    let run = bound_run(family.as_ref(), &cfg.sweep.ladder().values(), cfg)?;
    let columns = ["t", "error", "c_over_t", "threshold", "verdict"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = run
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.error),
                fmt_f64(r.c_over_t),
                fmt_f64(r.threshold),
                if r.pass { "pass" } else { "fail" }.to_string(),
            ]
        })
        .collect();
    let passed = run.rows.iter().all(|r| r.pass);
    let mut files = vec![sink.write_csv("bound.csv", &columns, &rows)?];
    files.push(sink.write_json(
        "bound.json",
        &BoundFile { family: family.name(), c: run.report.c, report: &run.report, safety: cfg.tolerances.safety, passed },
    )?);
    if cfg.outputs.plot_scripts {
        let script = plot::bound_script(&sink.file_name("bound.csv"), &sink.file_name("bound.png"));
        files.push(sink.write_bytes("plot_bound.py", script.as_bytes())?);
    }
    let failing = run.rows.iter().filter(|r| !r.pass).count();
    let summary = format!("C = {}, {failing} of {} rows above safety·C/T", fmt_f64(run.report.c), run.rows.len());
    info!("bound: {summary}");
    Ok(Outcome { files, passed, summary })
}
