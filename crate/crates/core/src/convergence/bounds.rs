//! Pointwise certificates: deformation bound, Hermite growth, moment growth
//! along the dynamics and tail decay of evolved basis vectors.

use crate::dynamics::{t0_threshold, QuadraticHamiltonian};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kets::{apply_hamiltonian, apply_word, basis, norm, taylor_evolve};
use crate::moments::{Letter, OperatorWord};
use crate::spin::{beta, Ensemble};
use crate::tol::SLACK;

/// One checked inequality `value <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSample {
    pub label: String,
    pub value: f64,
    pub bound: f64,
}

impl BoundSample {
    pub fn slack(&self) -> f64 {
        self.bound - self.value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub samples: Vec<BoundSample>,
    pub worst_slack: f64,
    pub worst_at: String,
    pub pass: bool,
    /// Free-form diagnostics (fitted rates, suprema).
    pub notes: Vec<String>,
}

impl BoundReport {
    /// Report whose pass flag is `worst slack >= -1e-15`.
    pub(crate) fn from_samples(name: &'static str, samples: Vec<BoundSample>) -> Self {
        let (worst_slack, worst_at) = samples
            .iter()
            .map(|s| (s.slack(), &s.label))
            .fold((f64::INFINITY, String::new()), |acc, (s, l)| if s < acc.0 { (s, l.clone()) } else { acc });
        let pass = samples.iter().all(|s| s.slack() >= -SLACK && s.value.is_finite());
        Self { name, samples, worst_slack, worst_at, pass, notes: Vec::new() }
    }

    pub fn checks(&self) -> usize {
        self.samples.len()
    }
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

fn ensemble_label(ens: Ensemble) -> String {
    match ens {
        Ensemble::Finite(m) => m.to_string(),
        Ensemble::Limit => "inf".into(),
    }
}

/// Grid for the deformation bound `|sqrt(x) - beta_M(x, n)| <= sqrt(n / M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaGrid {
    pub ms: Vec<u32>,
    pub xs: Vec<f64>,
    pub n_max: u32,
}

impl Default for BetaGrid {
    fn default() -> Self {
        Self { ms: vec![4, 16, 64, 256, 1024], xs: (0..=100).map(|k| k as f64 / 100.0).collect(), n_max: 64 }
    }
}

pub fn verify_beta_bound(grid: &BetaGrid) -> BoundReport {
    let mut samples = Vec::new();
    for &m in &grid.ms {
        for &x in &grid.xs {
            for n in 0..=grid.n_max.min(m) {
                samples.push(BoundSample {
                    label: format!("M={m} x={x} n={n}"),
                    value: (x.sqrt() - beta(m, x, n as usize)).abs(),
                    bound: (n as f64 / m as f64).sqrt(),
                });
            }
        }
    }
    BoundReport::from_samples("beta_bound", samples)
}

/// `||a^R psi_n|| <= 2^{n/2} 4^d d!` for every word with `|R| = d <= d_max`, `n <= n_max`.
pub fn verify_hermite_growth(n_max: usize, d_max: usize) -> BoundReport {
    let mut samples = Vec::new();
    for d in 0..=d_max {
        let bound_d = 4f64.powi(d as i32) * factorial(d);
        for word in OperatorWord::all_of_degree(d) {
            for n in 0..=n_max {
                let v = apply_word(&basis(n), &word.letters, Ensemble::Limit, 1.0);
                samples.push(BoundSample {
                    label: format!("R={word} n={n}"),
                    value: norm(&v),
                    bound: 2f64.powf(n as f64 / 2.0) * bound_d,
                });
            }
        }
    }
    BoundReport::from_samples("hermite_growth", samples)
}

/// Grid for the moment-growth bound
/// `||a^S H_M(x)^m psi_n|| <= 2^{3d + n/2} d! m! (32 cmax)^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentGrowthGrid {
    pub d_max: usize,
    pub n_max: usize,
    pub m_max: u32,
    pub ensembles: Vec<Ensemble>,
    pub xs: Vec<f64>,
}

impl Default for MomentGrowthGrid {
    fn default() -> Self {
        Self {
            d_max: 2,
            n_max: 16,
            m_max: 4,
            ensembles: vec![
                Ensemble::Finite(4),
                Ensemble::Finite(16),
                Ensemble::Finite(64),
                Ensemble::Finite(256),
                Ensemble::Limit,
            ],
            xs: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

/// Words are canonical ladders; `H_M(x)` is the deformed Hamiltonian (for the limit
/// ensemble, `x H`).
pub fn verify_moment_growth(h: &QuadraticHamiltonian, grid: &MomentGrowthGrid, exec: Exec) -> Result<BoundReport> {
    if grid.m_max > 6 {
        return Err(Error::InvalidArgument(format!("power m_max = {} above 6", grid.m_max)));
    }
    let words = OperatorWord::all_up_to_degree(grid.d_max);
    let cm = 32.0 * h.cmax();
    let mut keys = Vec::new();
    for &ens in &grid.ensembles {
        for &x in &grid.xs {
            for n in 0..=grid.n_max {
                keys.push((ens, x, n));
            }
        }
    }
    let chunks = exec.map(&keys, |&(ens, x, n)| {
        let mut out = Vec::new();
        let mut v = basis(n);
        for m in 0..=grid.m_max {
            if m > 0 {
                v = apply_hamiltonian(&v, h, ens, x);
            }
            for w in &words {
                let d = w.degree();
                let value = norm(&apply_word(&v, &w.letters, Ensemble::Limit, 1.0));
                let bound = 2f64.powf(3.0 * d as f64 + n as f64 / 2.0)
                    * factorial(d)
                    * factorial(m as usize)
                    * cm.powi(m as i32);
                out.push(BoundSample {
                    label: format!("M={} x={x} n={n} m={m} S={w}", ensemble_label(ens)),
                    value,
                    bound,
                });
            }
        }
        out
    });
    Ok(BoundReport::from_samples("moment_growth", chunks.into_iter().flatten().collect()))
}

/// Grid for the tail estimate of `a^S U*_{M,t}(x) psi_n` outside the window
/// `[n/2, 3n/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailGrid {
    pub d_max: usize,
    pub t: f64,
    pub ns: Vec<usize>,
    pub ensembles: Vec<Ensemble>,
    pub xs: Vec<f64>,
}

impl Default for TailGrid {
    fn default() -> Self {
        Self {
            d_max: 2,
            t: 0.01,
            ns: (1..=8).map(|k| 8 * k).collect(),
            ensembles: vec![Ensemble::Finite(16), Ensemble::Finite(64), Ensemble::Finite(256), Ensemble::Limit],
            xs: vec![0.25, 0.5, 1.0],
        }
    }
}

/// `(K1, K2)` of the tail estimate for `|S| = d` at `q = 32 |t| cmax`.
pub fn tail_constants(q: f64, d: usize) -> (f64, f64) {
    let k1 = 2f64.powi(3 * d as i32) * factorial(d) * q.powf((2.0 - d as f64) / 2.0) / (1.0 - q);
    let k2 = -(2f64.sqrt().ln() + 0.25 * q.ln());
    (k1, k2)
}

/// Norm of the part of `v` outside the number window `[n/2, 3n/2]`.
pub(crate) fn outside_window(v: &[f64], n: usize) -> f64 {
    let (lo, hi) = (n as f64 / 2.0, 1.5 * n as f64);
    v.iter()
        .enumerate()
        .filter(|(k, _)| (*k as f64) < lo || (*k as f64) > hi)
        .map(|(_, a)| a * a)
        .sum::<f64>()
        .sqrt()
}

pub fn verify_tail_decay(h: &QuadraticHamiltonian, grid: &TailGrid, exec: Exec) -> Result<BoundReport> {
    let q = 32.0 * grid.t.abs() * h.cmax();
    if q >= 0.25 {
        return Err(Error::InvalidArgument(format!(
            "tail estimate needs 32 |t| cmax < 1/4, got {q} (|t| must stay below {})",
            t0_threshold(h)? / 4.0
        )));
    }
    let words = OperatorWord::all_up_to_degree(grid.d_max);
    let mut keys = Vec::new();
    for &ens in &grid.ensembles {
        for &x in &grid.xs {
            for &n in &grid.ns {
                keys.push((ens, x, n));
            }
        }
    }
    let chunks = exec.map(&keys, |&(ens, x, n)| {
        let evolved = taylor_evolve(&basis(n), h, ens, x, -grid.t);
        words
            .iter()
            .map(|w| {
                let phi = apply_word(&evolved, &w.letters, Ensemble::Limit, 1.0);
                let mods: Vec<f64> = phi.iter().map(|z| z.norm()).collect();
                let value = outside_window(&mods, n);
                let bound = if q == 0.0 {
                    f64::INFINITY
                } else {
                    let (k1, k2) = tail_constants(q, w.degree());
                    k1 * (-k2 * n as f64).exp()
                };
                BoundSample { label: format!("M={} x={x} n={n} S={w}", ensemble_label(ens)), value, bound }
            })
            .collect::<Vec<_>>()
    });
    let mut report = BoundReport::from_samples("tail_decay", chunks.into_iter().flatten().collect());
    report.notes.push(format!("q = {q}"));
    Ok(report)
}

/// Canonical word for one letter, used by the uniform and strong-convergence scans.
pub(crate) fn single_letters() -> Vec<OperatorWord> {
    vec![OperatorWord::new(vec![Letter::Annihilate]), OperatorWord::new(vec![Letter::Create])]
}
