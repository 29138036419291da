//! Executes a validated experiment and collects CSV rows and per-report summaries.

use fluctlim::convergence::{
    sweep_capped, verify_beta_bound, verify_moment_growth, verify_hermite_growth, verify_strong_convergence,
    verify_tail_decay, verify_uniform_operator_bound, BetaGrid, BoundReport, ConvergenceReport, MomentGrowthGrid,
    StrongGrid, TailGrid, Tolerances, UniformGrid, MIN_FIT_POINTS,
};
use fluctlim::dynamics::QuadraticHamiltonian;
use fluctlim::exec::Exec;
use fluctlim::fock::TruncatedOperator;
use fluctlim::moments::{expectation_finite, Observable};
use fluctlim::qubits::{fluctuation_quadratures, random_symmetric_state};
use fluctlim::states::{brute_force_decompose, default_d_max};
use fluctlim::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Kind, ToleranceSpec, Validated};
use crate::error::CliError;

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Row {
    pub kind: &'static str,
    pub observable: String,
    pub lambda: Option<f64>,
    pub t: Option<f64>,
    pub m: Option<u32>,
    pub two_j: Option<u32>,
    pub finite: Option<C64>,
    pub limit: Option<C64>,
    pub abs_error: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub kind: &'static str,
    pub name: String,
    pub pass: bool,
    pub rows: usize,
    pub valid_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_at: Option<String>,
    /// Error code when the report could not be completed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ReportSummary {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("{verdict} {} [{}] rows={}/{}", self.kind, self.name, self.valid_rows, self.rows);
        if let Some(v) = self.slope {
            s.push_str(&format!(" slope={v:.4}"));
        }
        if let Some(v) = self.max_error {
            s.push_str(&format!(" max_error={v:.3e}"));
        }
        if let Some(v) = self.worst_slack {
            s.push_str(&format!(" worst_slack={v:.3e}"));
        }
        if let Some(e) = &self.error {
            s.push_str(&format!(" error={e}"));
        }
        s
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub rows: Vec<Row>,
    pub reports: Vec<ReportSummary>,
}

impl RunOutcome {
    /// 0 when everything passes, 3 if any report failed numerically, else 2.
    pub fn exit_code(&self) -> i32 {
        if self.reports.iter().any(|r| r.error.is_some()) {
            3
        } else if self.reports.iter().all(|r| r.pass) {
            0
        } else {
            2
        }
    }

    pub fn error_codes(&self) -> Vec<String> {
        let mut codes: Vec<String> = self.reports.iter().filter_map(|r| r.error.clone()).collect();
        codes.dedup();
        codes
    }
}

pub struct RunContext {
    pub seed: u64,
    pub d_max: Option<usize>,
}

pub fn run(v: &Validated, tol: &ToleranceSpec, ctx: &RunContext) -> Result<RunOutcome, CliError> {
    match v.kind {
        Kind::Moments => run_sweeps(v, tol, ctx, &[None]),
        Kind::Dynamics => {
            let h = v.hamiltonian.expect("validated dynamics config has a hamiltonian");
            let dyn_: Vec<Option<(QuadraticHamiltonian, f64)>> = v.times.iter().map(|&t| Some((h, t))).collect();
            run_sweeps(v, tol, ctx, &dyn_)
        }
        Kind::Bounds => run_bounds(v),
        Kind::Decompose => run_decompose(v, tol, ctx),
    }
}

fn tolerances(tol: &ToleranceSpec) -> Tolerances {
    Tolerances {
        expected_slope: tol.expected_slope,
        slope_tol: tol.slope_tol,
        abs_tol: tol.abs_tol,
        error_constant: tol.error_constant,
    }
}

fn run_sweeps(
    v: &Validated,
    tol: &ToleranceSpec,
    ctx: &RunContext,
    dynamics: &[Option<(QuadraticHamiltonian, f64)>],
) -> Result<RunOutcome, CliError> {
    let rho = v.state.as_ref().expect("validated sweep config has a state");
    let d_max = ctx.d_max.unwrap_or_else(default_d_max);
    let kind = v.kind.as_str();
    let tols = tolerances(tol);
    let mut out = RunOutcome::default();
    for obs in &v.observables {
        for d in dynamics {
            let name = match d {
                Some((_, t)) => format!("{obs} t={t}"),
                None => obs.to_string(),
            };
            let dref = d.as_ref().map(|(h, t)| (h, *t));
            match sweep_capped(rho, v.lambda, obs, dref, &v.ms, Exec::Parallel, d_max) {
                Ok(report) => {
                    out.rows.extend(sweep_rows(kind, &report));
                    out.reports.push(sweep_summary(kind, name, &report, &tols));
                }
                Err(e) if e.is_numerical() => out.reports.push(ReportSummary {
                    kind,
                    name,
                    pass: false,
                    rows: 0,
                    valid_rows: 0,
                    slope: None,
                    max_error: None,
                    worst_slack: None,
                    worst_at: None,
                    error: Some(e.code().to_string()),
                    notes: vec![e.to_string()],
                }),
                Err(e) => return Err(CliError::from_core(e)),
            }
        }
    }
    Ok(out)
}

fn sweep_rows(kind: &'static str, r: &ConvergenceReport) -> Vec<Row> {
    r.rows
        .iter()
        .map(|row| Row {
            kind,
            observable: r.observable.clone(),
            lambda: Some(r.lambda),
            t: r.t,
            m: Some(row.m),
            two_j: row.two_j,
            finite: row.finite,
            limit: Some(row.limit),
            abs_error: row.abs_error,
            status: row.status.to_string(),
        })
        .collect()
}

fn sweep_summary(kind: &'static str, name: String, r: &ConvergenceReport, tols: &Tolerances) -> ReportSummary {
    let exhausted = r.valid_rows() < MIN_FIT_POINTS;
    ReportSummary {
        kind,
        name,
        pass: r.passes(tols),
        rows: r.rows.len(),
        valid_rows: r.valid_rows(),
        slope: r.fit.map(|f| f.slope),
        max_error: Some(r.max_error()),
        worst_slack: None,
        worst_at: None,
        error: exhausted.then(|| "projection_annihilates".to_string()),
        notes: if exhausted {
            vec![format!("only {} valid rows, at least {MIN_FIT_POINTS} required", r.valid_rows())]
        } else {
            Vec::new()
        },
    }
}

fn run_bounds(v: &Validated) -> Result<RunOutcome, CliError> {
    let h = v.hamiltonian.unwrap_or_else(QuadraticHamiltonian::squeezing);
    let exec = Exec::Parallel;
    let mut out = RunOutcome::default();
    for suite in &v.suites {
        let report: BoundReport = match suite.as_str() {
            "beta" => verify_beta_bound(&BetaGrid::default()),
            "hermite" => verify_hermite_growth(24, 6),
            "moment" => verify_moment_growth(&h, &MomentGrowthGrid::default(), exec).map_err(CliError::from_core)?,
            "tail" => verify_tail_decay(&h, &TailGrid::default(), exec).map_err(CliError::from_core)?,
            "uniform" => verify_uniform_operator_bound(&h, &UniformGrid::default(), exec).map_err(CliError::from_core)?,
            "strong" => verify_strong_convergence(&StrongGrid::default(), exec).map_err(CliError::from_core)?,
            other => return Err(CliError::Config(format!("unknown suite `{other}`"))),
        };
        for s in &report.samples {
            out.rows.push(Row {
                kind: "bounds",
                observable: format!("{}: {}", report.name, s.label),
                finite: Some(C64::new(s.value, 0.0)),
                limit: Some(C64::new(s.bound, 0.0)),
                abs_error: Some(s.slack()),
                status: if s.slack() >= -fluctlim::tol::SLACK { "ok".into() } else { "violated".into() },
                ..Default::default()
            });
        }
        out.reports.push(ReportSummary {
            kind: "bounds",
            name: report.name.to_string(),
            pass: report.pass,
            rows: report.checks(),
            valid_rows: report.checks(),
            slope: None,
            max_error: None,
            worst_slack: Some(report.worst_slack),
            worst_at: Some(report.worst_at.clone()),
            error: None,
            notes: report.notes.clone(),
        });
    }
    Ok(out)
}

/// Full-space matrix of an observable built from the fluctuation ladder pair.
fn full_observable(obs: &Observable, a: &TruncatedOperator) -> TruncatedOperator {
    obs.matrix(a, &a.adjoint())
}

fn run_decompose(v: &Validated, tol: &ToleranceSpec, ctx: &RunContext) -> Result<RunOutcome, CliError> {
    let abs_tol = tol.abs_tol.unwrap_or(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut out = RunOutcome::default();
    let mut worst = vec![0.0f64; v.observables.len()];
    let mut count = vec![0usize; v.observables.len()];
    for &m in &v.ms {
        let (_, _, a) = fluctuation_quadratures(v.lambda, m).map_err(CliError::from_core)?;
        let a = TruncatedOperator::from_matrix(a).map_err(CliError::from_core)?;
        let fulls: Vec<TruncatedOperator> = v.observables.iter().map(|o| full_observable(o, &a)).collect();
        for sample in 0..v.samples {
            let rho = random_symmetric_state(m, 2, &mut rng).map_err(CliError::from_core)?;
            let state = brute_force_decompose(&rho, m).map_err(CliError::from_core)?;
            let rho = TruncatedOperator::from_matrix(rho).map_err(CliError::from_core)?;
            for (k, (obs, full)) in v.observables.iter().zip(&fulls).enumerate() {
                let block = expectation_finite(&state, obs, None).map_err(CliError::from_core)?;
                let direct = rho.trace_product(full);
                let err = (block - direct).norm();
                worst[k] = worst[k].max(err);
                count[k] += 1;
                out.rows.push(Row {
                    kind: "decompose",
                    observable: format!("{obs} [sample {sample}]"),
                    lambda: Some(v.lambda),
                    m: Some(m),
                    finite: Some(block),
                    limit: Some(direct),
                    abs_error: Some(err),
                    status: if err <= abs_tol { "ok".into() } else { "mismatch".into() },
                    ..Default::default()
                });
            }
        }
    }
    for (k, obs) in v.observables.iter().enumerate() {
        out.reports.push(ReportSummary {
            kind: "decompose",
            name: obs.to_string(),
            pass: worst[k] <= abs_tol,
            rows: count[k],
            valid_rows: count[k],
            slope: None,
            max_error: Some(worst[k]),
            worst_slack: None,
            worst_at: None,
            error: None,
            notes: Vec::new(),
        });
    }
    Ok(out)
}
