//! Schwartz-operator diagnostics: seminorms, matrix-element decay and
//! characteristic functions.

use super::single_block_sequence;
use crate::error::{Error, Result};
use crate::fock::{canonical_operators, trace_norm, weyl_operator, TruncatedOperator};
use crate::C64;

/// `|| P^alpha Q^beta rho Q^beta' P^alpha' ||_1`, on a span large enough that
/// every product is exact.
pub fn schwartz_seminorm(rho: &TruncatedOperator, alpha: u32, alpha_p: u32, beta: u32, beta_p: u32) -> f64 {
    let support = rho.support();
    if support == 0 {
        return 0.0;
    }
    let pad = (alpha + beta).max(alpha_p + beta_p) as usize;
    let dim = support + pad + 1;
    let ops = canonical_operators(dim).expect("dimension is positive");
    let mut x = rho.resized(dim);
    for _ in 0..beta {
        x = &ops.position * &x;
    }
    for _ in 0..alpha {
        x = &ops.momentum * &x;
    }
    for _ in 0..beta_p {
        x = &x * &ops.position;
    }
    for _ in 0..alpha_p {
        x = &x * &ops.momentum;
    }
    trace_norm(&x)
}

/// Largest seminorm with all four indices at most `max_index`.
pub fn seminorm_profile(rho: &TruncatedOperator, max_index: u32) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..=max_index {
        for ap in 0..=max_index {
            for b in 0..=max_index {
                for bp in 0..=max_index {
                    worst = worst.max(schwartz_seminorm(rho, a, ap, b, bp));
                }
            }
        }
    }
    worst
}

/// `sup_{n,m} |rho_nm| (n + m)^k`, with `(n + m)^0 = 1` at the origin.
pub fn decay_sup(rho: &TruncatedOperator, k: u32) -> f64 {
    let d = rho.dim();
    let mut worst: f64 = 0.0;
    for n in 0..d {
        for m in 0..d {
            let w = if k == 0 { 1.0 } else { ((n + m) as f64).powi(k as i32) };
            worst = worst.max(rho.get(n, m).norm() * w);
        }
    }
    worst
}

/// Largest truncation tried by [`characteristic_function`].
pub const MAX_PADDING: usize = 512;

/// `Tr(rho W(x1, x2))`, padding the truncation by 10 levels at a time until the
/// value moves by less than `1e-8`.
pub fn characteristic_function(rho: &TruncatedOperator, x1: f64, x2: f64) -> Result<C64> {
    let eval = |dim: usize| -> Result<C64> {
        let w = weyl_operator(dim, x1, x2)?;
        Ok(rho.resized(dim).trace_product(&w))
    };
    let mut dim = rho.dim() + 10;
    let mut prev = eval(dim)?;
    loop {
        dim += 10;
        if dim > MAX_PADDING {
            return Err(Error::PaddingDiverged(MAX_PADDING));
        }
        let next = eval(dim)?;
        if (next - prev).norm() < 1e-8 {
            return Ok(next);
        }
        prev = next;
    }
}

/// Convergence diagnostics of a single-block sequence at one `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDiagnostic {
    pub m: u32,
    pub two_j: u32,
    /// `|x_j - lambda|`, at most `1/M`.
    pub atom_offset: f64,
    /// Largest seminorm of the block with indices up to 3.
    pub seminorm_max: f64,
}

/// Rows for every `M` at which the projection keeps some of `rho_inf`.
pub fn sequence_diagnostics(rho_inf: &TruncatedOperator, lambda: f64, ms: &[u32]) -> Result<Vec<SequenceDiagnostic>> {
    let mut rows = Vec::new();
    for &m in ms {
        match single_block_sequence(rho_inf, lambda, m) {
            Ok(state) => {
                let b = &state.blocks()[0];
                rows.push(SequenceDiagnostic {
                    m,
                    two_j: b.index.two_j(),
                    atom_offset: (b.index.x() - lambda).abs(),
                    seminorm_max: seminorm_profile(&b.rho, 3),
                });
            }
            Err(Error::ProjectionAnnihilates { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}
