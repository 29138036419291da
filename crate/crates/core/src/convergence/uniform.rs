//! Operator-norm scans: the weighted conjugated ladder bound and strong
//! convergence of deformed words.

use super::bounds::{outside_window, single_letters, BoundReport, BoundSample};
use super::fit::fit_rate;
use crate::dynamics::{BandedHamiltonian, QuadraticHamiltonian};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kets::{apply_word, basis, taylor_evolve, word_coefficient};
use crate::krylov::{chebyshev_evolve, lanczos_top};
use crate::moments::OperatorWord;
use crate::spin::Ensemble;
use crate::tol::SLACK;
use crate::C64;

/// Lanczos iteration cap for the low block.
const LANCZOS_ITER: usize = 200;
/// How far past the block support the tail supremum is scanned.
const TAIL_SCAN: usize = 4096;

/// `|| (N + p)^{-p/2} U_{M,t}(x) a^S U*_{M,t}(x) ||` with canonical `a^S`.
///
/// `U` is the identity above the block support, so the norm splits into the low
/// block (Lanczos on `W U D U^dag W`, `D = a^S a^S^dag` diagonal) and a diagonal tail.
pub fn uniform_operator_norm(h: &QuadraticHamiltonian, word: &OperatorWord, m: u32, x: f64, t: f64, p: u32) -> Result<f64> {
    let d = word.degree();
    if (p as usize) < d {
        return Ok(f64::INFINITY);
    }
    let s = Ensemble::Finite(m).support(x).expect("finite ensembles have a support");
    let w = word.weight() as i64;
    let weight = |r: usize| if p == 0 { 1.0 } else { (r as f64 + p as f64).powf(-(p as f64) / 2.0) };
    // |c|^2 of the row r: a^S maps psi_{r - w} to c psi_r.
    let row_coef = |r: usize| -> f64 {
        let n = r as i64 - w;
        if n < 0 {
            return 0.0;
        }
        match word_coefficient(&word.letters, n as usize, Ensemble::Limit, 1.0) {
            (c, Some(target)) if target == r => c,
            _ => 0.0,
        }
    };
    let mut tail: f64 = (s..s + TAIL_SCAN).map(|r| weight(r) * row_coef(r)).fold(0.0, f64::max);
    if p as usize == d {
        tail = tail.max(1.0);
    }
    let wts: Vec<f64> = (0..s).map(weight).collect();
    let dd: Vec<f64> = (0..s).map(|r| row_coef(r).powi(2)).collect();
    let low = if t == 0.0 {
        wts.iter().zip(&dd).map(|(w, c)| w * w * c).fold(0.0, f64::max)
    } else {
        let band = BandedHamiltonian::new(h, Ensemble::Finite(m), x, s);
        let apply = |v: &[C64]| -> Vec<C64> {
            let y: Vec<C64> = v.iter().zip(&wts).map(|(z, w)| z * w).collect();
            let y = chebyshev_evolve(&band, &y, -t);
            let y: Vec<C64> = y.iter().zip(&dd).map(|(z, c)| z * c).collect();
            let y = chebyshev_evolve(&band, &y, t);
            y.iter().zip(&wts).map(|(z, w)| z * w).collect()
        };
        lanczos_top(s, apply, LANCZOS_ITER, 0x5eed).max(0.0)
    };
    Ok(low.sqrt().max(tail))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    pub t: f64,
    pub ms: Vec<u32>,
    pub xs: Vec<f64>,
    pub words: Vec<OperatorWord>,
    /// Weight exponent; `None` uses `|S|`.
    pub p: Option<u32>,
    /// Basis indices for the windowed growth check.
    pub window_ns: Vec<usize>,
}

impl Default for UniformGrid {
    fn default() -> Self {
        Self {
            t: 0.02,
            ms: (6..=12).map(|k| 1 << k).collect(),
            xs: vec![0.25, 0.5, 1.0],
            words: single_letters(),
            p: None,
            window_ns: vec![8, 16, 32, 64],
        }
    }
}

/// Scans the weighted norm over the grid; passes when the running supremum over
/// `M` grows by less than 1% across the last octave at every `(x, S)`, and every
/// windowed growth bound `||E Phi|| <= (3n/2 + 2d)^{d/2}` holds.
pub fn verify_uniform_operator_bound(h: &QuadraticHamiltonian, grid: &UniformGrid, exec: Exec) -> Result<BoundReport> {
    if grid.ms.len() < 2 || grid.ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("need at least two ascending qubit counts".into()));
    }
    let mut keys = Vec::new();
    for (wi, word) in grid.words.iter().enumerate() {
        for &x in &grid.xs {
            for &m in &grid.ms {
                keys.push((wi, word.clone(), x, m));
            }
        }
    }
    let norms = exec.try_map(&keys, |(_, word, x, m)| {
        let p = grid.p.unwrap_or(word.degree() as u32);
        uniform_operator_norm(h, word, *m, *x, grid.t, p)
    })?;

    let mut samples = Vec::new();
    let mut notes = Vec::new();
    let mut stable = true;
    let per = grid.ms.len();
    for (chunk, norms) in keys.chunks(per).zip(norms.chunks(per)) {
        let (_, word, x, _) = &chunk[0];
        let mut sup: f64 = 0.0;
        let mut sups = Vec::with_capacity(per);
        for ((_, _, _, m), &v) in chunk.iter().zip(norms) {
            sup = sup.max(v);
            sups.push(sup);
            samples.push(BoundSample { label: format!("norm S={word} x={x} M={m}"), value: v, bound: f64::INFINITY });
        }
        let growth = sups[per - 1] / sups[per - 2] - 1.0;
        stable &= growth.is_finite() && growth < 0.01;
        notes.push(format!("S={word} x={x} sup={:.12} last-octave growth={growth:.3e}", sups[per - 1]));
    }

    let mut wkeys = Vec::new();
    for word in &grid.words {
        for &x in &grid.xs {
            for &m in &grid.ms {
                for &n in &grid.window_ns {
                    wkeys.push((word.clone(), x, m, n));
                }
            }
        }
    }
    let windowed = exec.map(&wkeys, |(word, x, m, n)| {
        let evolved = taylor_evolve(&basis(*n), h, Ensemble::Finite(*m), *x, -grid.t);
        let phi = apply_word(&evolved, &word.letters, Ensemble::Limit, 1.0);
        let mods: Vec<f64> = phi.iter().map(|z| z.norm()).collect();
        let total = mods.iter().map(|a| a * a).sum::<f64>();
        let outside = outside_window(&mods, *n);
        let inside = (total - outside * outside).max(0.0).sqrt();
        let d = word.degree() as f64;
        BoundSample {
            label: format!("window S={word} x={x} M={m} n={n}"),
            value: inside,
            bound: (1.5 * *n as f64 + 2.0 * d).powf(d / 2.0),
        }
    });
    samples.extend(windowed);

    let mut report = BoundReport::from_samples("uniform_operator_bound", samples);
    report.pass = report.pass && stable;
    report.notes = notes;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongGrid {
    pub ms: Vec<u32>,
    pub xs: Vec<f64>,
    pub words: Vec<OperatorWord>,
    /// Largest accepted ratio between suprema at consecutive octaves.
    pub max_ratio: f64,
}

impl Default for StrongGrid {
    fn default() -> Self {
        Self {
            ms: (6..=12).map(|k| 1 << k).collect(),
            xs: vec![0.05, 0.1, 0.25, 0.5, 0.75, 1.0],
            words: OperatorWord::all_up_to_degree(2).into_iter().filter(|w| w.degree() > 0).collect(),
            max_ratio: 0.75,
        }
    }
}

/// `|| (a_M^R(x) - x^{|R|/2} a^R) (N + 2|R|)^{-|R|} ||`, a weighted shift whose norm is
/// the supremum of its coefficients.
pub fn strong_difference_norm(word: &OperatorWord, m: u32, x: f64) -> f64 {
    let d = word.degree();
    let scale = x.powf(d as f64 / 2.0);
    let n_max = 8 * m as usize + 64;
    (0..=n_max)
        .map(|n| {
            let (cm, _) = word_coefficient(&word.letters, n, Ensemble::Finite(m), x);
            let (ci, _) = word_coefficient(&word.letters, n, Ensemble::Limit, 1.0);
            (cm - scale * ci).abs() * (n as f64 + 2.0 * d as f64).powf(-(d as f64))
        })
        .fold(0.0, f64::max)
}

/// For each word, the supremum over `x` must shrink by `max_ratio` per octave of `M`.
pub fn verify_strong_convergence(grid: &StrongGrid, exec: Exec) -> Result<BoundReport> {
    if grid.ms.len() < 2 {
        return Err(Error::InvalidArgument("need at least two qubit counts".into()));
    }
    let mut keys = Vec::new();
    for word in &grid.words {
        for &m in &grid.ms {
            keys.push((word.clone(), m));
        }
    }
    let sups = exec.map(&keys, |(word, m)| {
        grid.xs.iter().map(|&x| strong_difference_norm(word, *m, x)).fold(0.0, f64::max)
    });
    let per = grid.ms.len();
    let mut samples = Vec::new();
    let mut notes = Vec::new();
    for (chunk, sups) in keys.chunks(per).zip(sups.chunks(per)) {
        let word = &chunk[0].0;
        for k in 1..per {
            samples.push(BoundSample {
                label: format!("R={word} M={}", chunk[k].1),
                value: sups[k],
                bound: grid.max_ratio * sups[k - 1],
            });
        }
        let pts: Vec<(f64, f64)> = chunk.iter().zip(sups).map(|((_, m), &s)| (*m as f64, s)).collect();
        if let Some(fit) = fit_rate(&pts) {
            notes.push(format!("R={word} rate M^{:.3}", fit.slope));
        }
    }
    let mut report = BoundReport::from_samples("strong_convergence", samples);
    report.pass = report.samples.iter().all(|s| s.slack() >= -SLACK);
    report.notes = notes;
    Ok(report)
}
