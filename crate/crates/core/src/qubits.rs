//! Brute-force `M`-qubit tensor algebra, used as an oracle for the block picture.
//!
//! Qubit 0 is the most significant bit of a basis index. Local basis state 0 is
//! spin up (`sigma_3 = +1`), so the collective raising operator maps a down spin
//! at bit value 1 to an up spin at bit value 0.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::{c, C64, I};

/// Largest qubit count accepted by the dense oracle.
pub const MAX_QUBITS: u32 = 10;

pub fn pauli_x() -> Matrix2<C64> {
    Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0))
}

pub fn pauli_y() -> Matrix2<C64> {
    Matrix2::new(c(0.0), -I, I, c(0.0))
}

pub fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

/// Reference one-qubit state `diag((1 + lambda)/2, (1 - lambda)/2)`.
pub fn reference_state(lambda: f64) -> Matrix2<C64> {
    Matrix2::new(c((1.0 + lambda) / 2.0), c(0.0), c(0.0), c((1.0 - lambda) / 2.0))
}

fn check_size(m: u32) -> Result<usize> {
    if m == 0 || m > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("qubit count {m} outside 1..={MAX_QUBITS}")));
    }
    Ok(1usize << m)
}

/// `op` acting on qubit `site` of `m`.
pub fn site_operator(op: &Matrix2<C64>, site: u32, m: u32) -> Result<DMatrix<C64>> {
    let dim = check_size(m)?;
    if site >= m {
        return Err(Error::InvalidArgument(format!("site {site} out of range for {m} qubits")));
    }
    let shift = m - 1 - site;
    Ok(DMatrix::from_fn(dim, dim, |r, k| {
        let rest = (r ^ k) & !(1 << shift);
        if rest != 0 {
            return C64::default();
        }
        op[((r >> shift) & 1, (k >> shift) & 1)]
    }))
}

/// `sum_i op^(i)`.
pub fn collective(op: &Matrix2<C64>, m: u32) -> Result<DMatrix<C64>> {
    let dim = check_size(m)?;
    let mut out = DMatrix::zeros(dim, dim);
    for site in 0..m {
        out += site_operator(op, site, m)?;
    }
    Ok(out)
}

/// Image of a basis index under the transposition of qubits `i` and `k`.
fn swap_bits(b: usize, i: u32, k: u32, m: u32) -> usize {
    let si = m - 1 - i;
    let sk = m - 1 - k;
    let bi = (b >> si) & 1;
    let bk = (b >> sk) & 1;
    if bi == bk {
        b
    } else {
        b ^ (1 << si) ^ (1 << sk)
    }
}

/// `tau rho tau` for the transposition `tau` of qubits `i` and `k`.
pub fn conjugate_by_swap(rho: &DMatrix<C64>, i: u32, k: u32, m: u32) -> DMatrix<C64> {
    let dim = rho.nrows();
    DMatrix::from_fn(dim, dim, |r, s| rho[(swap_bits(r, i, k, m), swap_bits(s, i, k, m))])
}

/// Largest entrywise change under adjacent transpositions.
pub fn permutation_defect(rho: &DMatrix<C64>, m: u32) -> f64 {
    (0..m.saturating_sub(1))
        .map(|i| {
            let swapped = conjugate_by_swap(rho, i, i + 1, m);
            (&swapped - rho).iter().map(|z| z.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Average over the full symmetric group, built up one qubit at a time.
pub fn symmetrize(rho: &DMatrix<C64>, m: u32) -> DMatrix<C64> {
    let mut out = rho.clone();
    for k in 1..m {
        let mut acc = out.clone();
        for i in 0..k {
            acc += conjugate_by_swap(&out, i, k, m);
        }
        out = acc / c((k + 1) as f64);
    }
    out
}

/// Mixture of `rank` symmetrized Haar-like random pure states.
pub fn random_symmetric_state<R: Rng + ?Sized>(m: u32, rank: usize, rng: &mut R) -> Result<DMatrix<C64>> {
    let dim = check_size(m)?;
    let rank = rank.max(1);
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut rho = DMatrix::zeros(dim, dim);
    for w in weights {
        let v = DVector::from_fn(dim, |_, _| {
            C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        });
        let v = &v / c(v.norm());
        rho += &v * v.adjoint() * c(w);
    }
    Ok(symmetrize(&rho, m))
}

/// `|psi><psi|^{(x) m}` for a one-qubit state.
pub fn product_density(theta: &Matrix2<C64>, m: u32) -> Result<DMatrix<C64>> {
    let dim = check_size(m)?;
    Ok(DMatrix::from_fn(dim, dim, |r, k| {
        (0..m).fold(c(1.0), |acc, site| {
            let shift = m - 1 - site;
            acc * theta[((r >> shift) & 1, (k >> shift) & 1)]
        })
    }))
}

/// `L_- v`: flips each up spin down with unit coefficient.
pub fn lower(v: &DVector<C64>, m: u32) -> DVector<C64> {
    let mut out = DVector::zeros(v.len());
    for (b, &amp) in v.iter().enumerate() {
        if amp == C64::default() {
            continue;
        }
        for s in 0..m {
            let bit = 1 << s;
            if b & bit == 0 {
                out[b | bit] += amp;
            }
        }
    }
    out
}

/// `L_+` restricted to basis states with `down` spins down.
pub fn raising_in_sector(m: u32, down: u32) -> (Vec<usize>, Vec<usize>, DMatrix<C64>) {
    let dim = 1usize << m;
    let cols: Vec<usize> = (0..dim).filter(|b| b.count_ones() == down).collect();
    let rows: Vec<usize> = (0..dim).filter(|b| down > 0 && b.count_ones() == down - 1).collect();
    let mut mat = DMatrix::zeros(rows.len(), cols.len());
    for (ci, &b) in cols.iter().enumerate() {
        for s in 0..m {
            let bit = 1 << s;
            if b & bit != 0 {
                let target = b ^ bit;
                let ri = rows.binary_search(&target).expect("target lies in the lower sector");
                mat[(ri, ci)] += c(1.0);
            }
        }
    }
    (rows, cols, mat)
}

/// `F_M(A) = M^{-1/2} sum_i (A^(i) - Tr(A theta))` on `m` qubits.
pub fn fluctuation_operator_full(a: &Matrix2<C64>, lambda: f64, m: u32) -> Result<DMatrix<C64>> {
    let dim = check_size(m)?;
    let mean = (a * reference_state(lambda)).trace();
    let sum = collective(a, m)? - DMatrix::<C64>::identity(dim, dim) * (mean * m as f64);
    Ok(sum / c((m as f64).sqrt()))
}

/// Qubit-level `(Q_M, P_M, a_M)` as fluctuations of `sigma_1/sqrt 2` and `sigma_2/sqrt 2`.
pub fn fluctuation_quadratures(lambda: f64, m: u32) -> Result<(DMatrix<C64>, DMatrix<C64>, DMatrix<C64>)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = fluctuation_operator_full(&(pauli_x() * c(s)), lambda, m)?;
    let p = fluctuation_operator_full(&(pauli_y() * c(s)), lambda, m)?;
    let a = (&q + &p * I) * c(s);
    Ok((q, p, a))
}
