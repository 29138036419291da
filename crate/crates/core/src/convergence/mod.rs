//! Sweep harness for the large-`M` limit and numerical certificates for the
//! supporting inequalities.

mod bounds;
mod fit;
mod uniform;

pub use bounds::{
    verify_beta_bound, verify_moment_growth, verify_hermite_growth, verify_tail_decay, BetaGrid, BoundReport, BoundSample,
    MomentGrowthGrid, TailGrid,
};
pub use fit::{fit_rate, RateFit, FIT_FLOOR, MIN_FIT_POINTS};
pub use uniform::{
    uniform_operator_norm, verify_strong_convergence, verify_uniform_operator_bound, StrongGrid, UniformGrid,
};

use crate::dynamics::{check_time, QuadraticHamiltonian};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::TruncatedOperator;
use crate::moments::{expectation_finite, expectation_limit, Observable};
use crate::states::{default_d_max, single_block_sequence_capped};
use crate::C64;

/// Outcome of one `M` in a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub m: u32,
    pub two_j: Option<u32>,
    pub finite: Option<C64>,
    pub limit: C64,
    pub abs_error: Option<f64>,
    /// `"ok"` or the error code of a skipped row.
    pub status: &'static str,
}

impl SweepRow {
    pub fn is_valid(&self) -> bool {
        self.abs_error.is_some()
    }
}

/// Acceptance thresholds for a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub expected_slope: f64,
    pub slope_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    /// Requires `error <= error_constant / M` on every valid row.
    pub error_constant: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { expected_slope: -1.0, slope_tol: Some(0.1), abs_tol: None, error_constant: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub observable: String,
    pub lambda: f64,
    pub t: Option<f64>,
    pub rows: Vec<SweepRow>,
    pub fit: Option<RateFit>,
}

impl ConvergenceReport {
    pub fn valid_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.is_valid()).count()
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().filter_map(|r| r.abs_error).fold(0.0, f64::max)
    }

    /// Whether every configured check holds. Needs at least four valid rows.
    pub fn passes(&self, tol: &Tolerances) -> bool {
        if self.valid_rows() < MIN_FIT_POINTS {
            return false;
        }
        if let (Some(fit), Some(st)) = (self.fit, tol.slope_tol) {
            if (fit.slope - tol.expected_slope).abs() > st {
                return false;
            }
        }
        self.rows.iter().filter(|r| r.is_valid()).all(|r| {
            let e = r.abs_error.unwrap_or(0.0);
            tol.abs_tol.is_none_or(|a| e <= a) && tol.error_constant.is_none_or(|k| e <= k / r.m as f64)
        })
    }
}

/// Evaluates both sides along the single-block sequence for every `M`.
///
/// Rows where the projection annihilates `rho_inf` are kept with their error code
/// and no values; other failures abort the sweep.
pub fn sweep(
    rho_inf: &TruncatedOperator,
    lambda: f64,
    obs: &Observable,
    dynamics: Option<(&QuadraticHamiltonian, f64)>,
    ms: &[u32],
    exec: Exec,
) -> Result<ConvergenceReport> {
    sweep_capped(rho_inf, lambda, obs, dynamics, ms, exec, default_d_max())
}

/// [`sweep`] with an explicit cap on the stored block dimension.
pub fn sweep_capped(
    rho_inf: &TruncatedOperator,
    lambda: f64,
    obs: &Observable,
    dynamics: Option<(&QuadraticHamiltonian, f64)>,
    ms: &[u32],
    exec: Exec,
    d_max: usize,
) -> Result<ConvergenceReport> {
    if ms.is_empty() {
        return Err(Error::InvalidArgument("empty list of qubit counts".into()));
    }
    if ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("qubit counts must be strictly ascending".into()));
    }
    if let Some((h, t)) = dynamics {
        check_time(h, t)?;
    }
    let limit = expectation_limit(rho_inf, lambda, obs, dynamics)?;
    let rows = exec.try_map(ms, |&m| -> Result<SweepRow> {
        match single_block_sequence_capped(rho_inf, lambda, m, d_max) {
            Ok(state) => {
                let finite = expectation_finite(&state, obs, dynamics)?;
                Ok(SweepRow {
                    m,
                    two_j: Some(state.blocks()[0].index.two_j()),
                    finite: Some(finite),
                    limit,
                    abs_error: Some((finite - limit).norm()),
                    status: "ok",
                })
            }
            Err(e @ Error::ProjectionAnnihilates { .. }) => {
                Ok(SweepRow { m, two_j: None, finite: None, limit, abs_error: None, status: e.code() })
            }
            Err(e) => Err(e),
        }
    })?;
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.abs_error.map(|e| (r.m as f64, e))).collect();
    Ok(ConvergenceReport {
        observable: obs.to_string(),
        lambda,
        t: dynamics.map(|d| d.1),
        fit: fit_rate(&pts),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn number_operator_sweep() {
        let rho = TruncatedOperator::outer(3, 2, 2);
        let obs: Observable = "ad a".parse().unwrap();
        let ms: Vec<u32> = (4..=10).map(|k| 1 << k).collect();
        let r = sweep(&rho, 1.0, &obs, None, &ms, Exec::Sequential).unwrap();
        for row in &r.rows {
            assert!((row.abs_error.unwrap() - 2.0 / row.m as f64).abs() < 1e-12);
        }
        assert!((r.fit.unwrap().slope + 1.0).abs() < 1e-3);
        assert!(r.passes(&Tolerances { slope_tol: Some(0.02), ..Default::default() }));
        let v = sweep(&TruncatedOperator::outer(1, 0, 0), 1.0, &obs, None, &ms, Exec::Parallel).unwrap();
        assert!(v.fit.is_none());
        assert_eq!(v.max_error(), 0.0);
    }

    #[test]
    fn skipped_rows_are_reported() {
        let rho = TruncatedOperator::outer(3, 2, 2);
        let obs: Observable = "ad a".parse().unwrap();
        let r = sweep(&rho, 0.5, &obs, None, &[2, 3, 4, 8, 16, 32], Exec::Sequential).unwrap();
        assert_eq!(r.rows[0].status, "projection_annihilates");
        assert!(r.rows[0].finite.is_none());
        assert_eq!(r.valid_rows(), 4);
        assert!(sweep(&rho, 0.5, &obs, None, &[4, 2], Exec::Sequential).is_err());
    }

    #[test]
    fn harmonic_dynamics_sweep() {
        let rho = TruncatedOperator::pure(&[c(1.0), c(1.0)]).unwrap();
        let obs: Observable = "a".parse().unwrap();
        let h = QuadraticHamiltonian::harmonic();
        let ms: Vec<u32> = (16..=64).collect();
        let r = sweep(&rho, 0.5, &obs, Some((&h, 0.02)), &ms, Exec::Parallel).unwrap();
        for row in &r.rows {
            let x = row.two_j.unwrap() as f64 / row.m as f64;
            let expected = C64::from_polar(0.5 * x.sqrt(), -0.02 * x);
            assert!((row.finite.unwrap() - expected).norm() < 1e-12);
            assert!(row.abs_error.unwrap() <= 2.0 / row.m as f64);
        }
    }
}
