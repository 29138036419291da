//! Quadratic Hamiltonians, their block deformations and the resulting evolutions.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::fock::{Propagator, TruncatedOperator};
use crate::spin::Ensemble;
use crate::{c, C64, I};

/// `H = c0 a^2 + c1 a a^dagger + c2 a^dagger a + c3 a^dagger^2` with `c3 = conj(c0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticHamiltonian {
    c0: C64,
    c1: f64,
    c2: f64,
}

impl QuadraticHamiltonian {
    /// Validates self-adjointness; `c1`, `c2` must be real within `1e-14`.
    pub fn new(c0: C64, c1: C64, c2: C64, c3: C64) -> Result<Self> {
        let defect = (c3 - c0.conj()).norm().max(c1.im.abs()).max(c2.im.abs());
        if defect > 1e-14 {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { c0, c1: c1.re, c2: c2.re })
    }

    pub fn from_real(c0: C64, c1: f64, c2: f64) -> Self {
        Self { c0, c1, c2 }
    }

    /// `H = N`.
    pub fn harmonic() -> Self {
        Self::from_real(C64::default(), 0.0, 1.0)
    }

    /// `H = -(QP + PQ)/2`, i.e. `c = (i/2, 0, 0, -i/2)`.
    pub fn squeezing() -> Self {
        Self::from_real(I * 0.5, 0.0, 0.0)
    }

    pub fn coefficients(&self) -> [C64; 4] {
        [self.c0, c(self.c1), c(self.c2), self.c0.conj()]
    }

    pub fn cmax(&self) -> f64 {
        self.c0.norm().max(self.c1.abs()).max(self.c2.abs())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_real(self.c0 * s, self.c1 * s, self.c2 * s)
    }

    /// Diagonal entry `(n, n)` of `H_M(x)`.
    pub fn diagonal(&self, ens: Ensemble, x: f64, n: usize) -> f64 {
        let b0 = ens.beta(x, n as i64);
        let b1 = ens.beta(x, n as i64 - 1);
        self.c1 * b0 * b0 * (n as f64 + 1.0) + self.c2 * b1 * b1 * n as f64
    }

    /// Entry `(n, n + 2)` of `H_M(x)`; entry `(n + 2, n)` is its conjugate.
    pub fn upper(&self, ens: Ensemble, x: f64, n: usize) -> C64 {
        let nf = n as f64;
        let b = ens.beta(x, n as i64) * ens.beta(x, n as i64 + 1);
        self.c0 * (b * ((nf + 1.0) * (nf + 2.0)).sqrt())
    }

    /// `(s + 2 alpha, -2 beta; -2 beta, s - 2 alpha)` with `s = c1 + c2`, `c0 = alpha + i beta`:
    /// the classical symbol is `z^T K z / 2` up to a constant.
    pub fn symbol(&self) -> Matrix2<f64> {
        let s = self.c1 + self.c2;
        let (a, b) = (self.c0.re, self.c0.im);
        Matrix2::new(s + 2.0 * a, -2.0 * b, -2.0 * b, s - 2.0 * a)
    }
}

/// `H_M(x)` compressed to the first `dim` levels. Entries are closed-form, so the
/// compression is exact and Hermitian.
pub fn ensemble_hamiltonian(h: &QuadraticHamiltonian, ens: Ensemble, x: f64, dim: usize) -> Result<TruncatedOperator> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(TruncatedOperator::from_fn(dim, |i, k| {
        if i == k {
            c(h.diagonal(ens, x, i))
        } else if k == i + 2 {
            h.upper(ens, x, i)
        } else if i == k + 2 {
            h.upper(ens, x, k).conj()
        } else {
            C64::default()
        }
    }))
}

pub fn block_hamiltonian(h: &QuadraticHamiltonian, m: u32, x: f64, dim: usize) -> Result<TruncatedOperator> {
    ensemble_hamiltonian(h, Ensemble::Finite(m), x, dim)
}

/// `sum_k c_k A_k` on `dim` levels. The top two rows and columns agree with the
/// product of truncated ladder matrices only on the interior, since those products
/// lose the couplings to levels beyond the truncation.
pub fn limit_hamiltonian(h: &QuadraticHamiltonian, dim: usize) -> Result<TruncatedOperator> {
    ensemble_hamiltonian(h, Ensemble::Limit, 1.0, dim)
}

/// Pentadiagonal Hermitian matrix with bands at offsets `0` and `+-2`.
#[derive(Debug, Clone)]
pub struct BandedHamiltonian {
    pub diag: Vec<f64>,
    /// `upper[n]` is entry `(n, n + 2)`.
    pub upper: Vec<C64>,
}

impl BandedHamiltonian {
    pub fn new(h: &QuadraticHamiltonian, ens: Ensemble, x: f64, dim: usize) -> Self {
        let diag = (0..dim).map(|n| h.diagonal(ens, x, n)).collect();
        let upper = (0..dim.saturating_sub(2)).map(|n| h.upper(ens, x, n)).collect();
        Self { diag, upper }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, v: &[C64], out: &mut [C64]) {
        let d = self.dim();
        for n in 0..d {
            let mut acc = v[n] * self.diag[n];
            if n + 2 < d {
                acc += self.upper[n] * v[n + 2];
            }
            if n >= 2 {
                acc += self.upper[n - 2].conj() * v[n - 2];
            }
            out[n] = acc;
        }
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let d = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for n in 0..d {
            let mut r = 0.0;
            if n + 2 < d {
                r += self.upper[n].norm();
            }
            if n >= 2 {
                r += self.upper[n - 2].norm();
            }
            lo = lo.min(self.diag[n] - r);
            hi = hi.max(self.diag[n] + r);
        }
        (lo, hi)
    }
}

/// `(32 max |c_k|)^{-1}`.
pub fn t0_threshold(h: &QuadraticHamiltonian) -> Result<f64> {
    let cmax = h.cmax();
    if cmax == 0.0 {
        return Err(Error::InvalidArgument("all Hamiltonian coefficients vanish".into()));
    }
    Ok(1.0 / (32.0 * cmax))
}

/// Warns beyond `t0`, rejects beyond `4 t0`.
pub fn check_time(h: &QuadraticHamiltonian, t: f64) -> Result<()> {
    if h.cmax() == 0.0 {
        return Ok(());
    }
    let t0 = t0_threshold(h)?;
    if t.abs() > 4.0 * t0 {
        return Err(Error::TimeBeyondThreshold { t, limit: 4.0 * t0 });
    }
    if t.abs() > t0 {
        log::warn!("|t| = {t} exceeds t0 = {t0}; convergence is not covered by the small-time estimate");
    }
    Ok(())
}

/// Growth schedule for adaptively truncated evolutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    pub step: usize,
    pub window: usize,
    pub max_dim: usize,
    pub tol: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { step: 16, window: 8, max_dim: 2048, tol: 1e-10 }
    }
}

fn evolve_adaptive(
    rho: &TruncatedOperator,
    h: &QuadraticHamiltonian,
    ens: Ensemble,
    x: f64,
    t: f64,
    cfg: &TruncationConfig,
) -> Result<TruncatedOperator> {
    let exact = ens.support(x).map(|s| s.max(rho.dim()));
    let mut dim = rho.dim() + cfg.step;
    loop {
        if let Some(e) = exact {
            dim = dim.min(e);
        }
        let gen = ensemble_hamiltonian(h, ens, x, dim)?;
        let evolved = Propagator::new(&gen)?.conjugate(&rho.resized(dim), t);
        if exact == Some(dim) || evolved.tail_mass(dim.saturating_sub(cfg.window)) < cfg.tol {
            return Ok(evolved);
        }
        dim += cfg.step;
        if dim > cfg.max_dim {
            return Err(Error::TruncationDiverged(dim));
        }
    }
}

/// `U rho U^dagger` with `U = exp(-i t H_M(x))` on an adaptively sized span. The
/// span is exact once it covers the support of `H_M(x)`.
pub fn evolve_block(block: &TruncatedOperator, h: &QuadraticHamiltonian, m: u32, x: f64, t: f64) -> Result<TruncatedOperator> {
    evolve_block_with(block, h, Ensemble::Finite(m), x, t, &TruncationConfig::default())
}

pub fn evolve_block_with(
    block: &TruncatedOperator,
    h: &QuadraticHamiltonian,
    ens: Ensemble,
    x: f64,
    t: f64,
    cfg: &TruncationConfig,
) -> Result<TruncatedOperator> {
    if t == 0.0 {
        return Ok(block.clone());
    }
    evolve_adaptive(block, h, ens, x, t, cfg)
}

/// `exp(-i t lambda H) rho exp(i t lambda H)`.
pub fn limit_evolution(rho: &TruncatedOperator, lambda: f64, h: &QuadraticHamiltonian, t: f64) -> Result<TruncatedOperator> {
    limit_evolution_with(rho, lambda, h, t, &TruncationConfig::default())
}

pub fn limit_evolution_with(
    rho: &TruncatedOperator,
    lambda: f64,
    h: &QuadraticHamiltonian,
    t: f64,
    cfg: &TruncationConfig,
) -> Result<TruncatedOperator> {
    check_time(h, t)?;
    if t == 0.0 {
        return Ok(rho.clone());
    }
    evolve_adaptive(rho, h, Ensemble::Limit, lambda, t, cfg)
}

/// Symplectic map `F_t = exp(lambda t J K)` acting on `(Q, P)` in the Heisenberg
/// picture, `J = (0, 1; -1, 0)`.
pub fn classical_flow(h: &QuadraticHamiltonian, lambda: f64, t: f64) -> Matrix2<f64> {
    let k = h.symbol();
    let j = Matrix2::new(0.0, 1.0, -1.0, 0.0);
    let a = j * k * (lambda * t);
    // a is traceless, so a^2 = -det(a) 1.
    let delta = -a.determinant();
    let (ch, sh) = if delta > 0.0 {
        let r = delta.sqrt();
        (r.cosh(), r.sinh() / r)
    } else if delta < 0.0 {
        let r = (-delta).sqrt();
        (r.cos(), r.sin() / r)
    } else {
        (1.0, 1.0)
    };
    Matrix2::identity() * ch + a * sh
}

/// `F Sigma F^T` for a symmetrized covariance matrix of `(Q, P)`.
pub fn transport_covariance(flow: &Matrix2<f64>, sigma: &Matrix2<f64>) -> Matrix2<f64> {
    flow * sigma * flow.transpose()
}
