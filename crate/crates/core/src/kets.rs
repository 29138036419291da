//! Exact action of ladder words and quadratic Hamiltonians on finite Hermite
//! expansions. Vectors grow as needed, so no truncation error enters.

use crate::dynamics::QuadraticHamiltonian;
use crate::moments::Letter;
use crate::spin::Ensemble;
use crate::{c, C64};

/// `psi_n` as a coefficient vector.
pub fn basis(n: usize) -> Vec<C64> {
    let mut v = vec![C64::default(); n + 1];
    v[n] = c(1.0);
    v
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// One deformed ladder letter; `Ensemble::Limit` with `x = 1` gives the canonical ladder.
pub fn apply_letter(v: &[C64], letter: Letter, ens: Ensemble, x: f64) -> Vec<C64> {
    match letter {
        Letter::Annihilate => {
            let mut out = vec![C64::default(); v.len().saturating_sub(1).max(1)];
            for n in 1..v.len() {
                out[n - 1] = v[n] * (ens.beta(x, n as i64 - 1) * (n as f64).sqrt());
            }
            out
        }
        Letter::Create => {
            let mut out = vec![C64::default(); v.len() + 1];
            for (n, &z) in v.iter().enumerate() {
                out[n + 1] = z * (ens.beta(x, n as i64) * (n as f64 + 1.0).sqrt());
            }
            out
        }
    }
}

/// `a^R v`, letters applied right to left.
pub fn apply_word(v: &[C64], word: &[Letter], ens: Ensemble, x: f64) -> Vec<C64> {
    word.iter().rev().fold(v.to_vec(), |acc, &l| apply_letter(&acc, l, ens, x))
}

/// `H_M(x) v`; the result is two entries longer.
pub fn apply_hamiltonian(v: &[C64], h: &QuadraticHamiltonian, ens: Ensemble, x: f64) -> Vec<C64> {
    let len = v.len() + 2;
    let mut out = vec![C64::default(); len];
    for (n, o) in out.iter_mut().enumerate() {
        let mut acc = C64::default();
        if n < v.len() {
            acc += v[n] * h.diagonal(ens, x, n);
        }
        if n + 2 < v.len() {
            acc += h.upper(ens, x, n) * v[n + 2];
        }
        if n >= 2 && n - 2 < v.len() {
            acc += h.upper(ens, x, n - 2).conj() * v[n - 2];
        }
        *o = acc;
    }
    out
}

/// `exp(-i t H_M(x)) v` by its Taylor series, summed until terms drop below
/// `1e-18` relative to the running sum. Only suitable for small `|t| |H|` on the
/// reached span.
pub fn taylor_evolve(v: &[C64], h: &QuadraticHamiltonian, ens: Ensemble, x: f64, t: f64) -> Vec<C64> {
    let mut sum = v.to_vec();
    let mut term = v.to_vec();
    let scale = C64::new(0.0, -t);
    for k in 1..2000 {
        term = apply_hamiltonian(&term, h, ens, x);
        let f = scale / k as f64;
        term.iter_mut().for_each(|z| *z *= f);
        sum.resize(term.len(), C64::default());
        for (s, z) in sum.iter_mut().zip(&term) {
            *s += z;
        }
        let tn = norm(&term);
        if tn <= 1e-18 * norm(&sum).max(1e-300) || tn == 0.0 {
            break;
        }
    }
    sum
}

/// Modulus of the coefficient `c_n` in `a^R psi_n = c_n psi_{n + w(R)}`, together
/// with the target index (`None` when the word annihilates `psi_n`).
pub fn word_coefficient(word: &[Letter], n: usize, ens: Ensemble, x: f64) -> (f64, Option<usize>) {
    let mut idx = n as i64;
    let mut coef = 1.0;
    for &l in word.iter().rev() {
        match l {
            Letter::Annihilate => {
                if idx == 0 {
                    return (0.0, None);
                }
                coef *= ens.beta(x, idx - 1) * (idx as f64).sqrt();
                idx -= 1;
            }
            Letter::Create => {
                coef *= ens.beta(x, idx) * (idx as f64 + 1.0).sqrt();
                idx += 1;
            }
        }
    }
    (coef, Some(idx as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ensemble_hamiltonian;
    use crate::fock::hermitian_evolve;

    const CANON: Ensemble = Ensemble::Limit;

    #[test]
    fn ladder_norms() {
        let v = apply_word(&basis(0), &[Letter::Create, Letter::Create], CANON, 1.0);
        assert!((norm(&v) - 2f64.sqrt()).abs() < 1e-15);
        let v = apply_word(&basis(0), &[Letter::Annihilate], CANON, 1.0);
        assert_eq!(norm(&v), 0.0);
        let v = apply_word(&basis(3), &[Letter::Create, Letter::Annihilate], CANON, 1.0);
        assert!((v[3].re - 3.0).abs() < 1e-14);
        let (coef, idx) = word_coefficient(&[Letter::Create, Letter::Annihilate], 3, CANON, 1.0);
        assert!((coef - 3.0).abs() < 1e-14);
        assert_eq!(idx, Some(3));
    }

    #[test]
    fn hamiltonian_action_matches_matrix() {
        let h = QuadraticHamiltonian::from_real(C64::new(0.3, 0.2), 0.5, -0.1);
        let ens = Ensemble::Finite(9);
        let x = 7.0 / 9.0;
        let v: Vec<C64> = (0..5).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let hv = apply_hamiltonian(&v, &h, ens, x);
        let mat = ensemble_hamiltonian(&h, ens, x, 7).unwrap();
        for i in 0..7 {
            let expected: C64 = (0..5).map(|k| mat.get(i, k) * v[k]).sum();
            assert!((hv[i] - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn taylor_matches_eigendecomposition() {
        let h = QuadraticHamiltonian::squeezing();
        let ens = Ensemble::Finite(16);
        let x = 0.5;
        let v = taylor_evolve(&basis(2), &h, ens, x, 0.3);
        let mat = ensemble_hamiltonian(&h, ens, x, 9).unwrap();
        let u = hermitian_evolve(&mat, 0.3).unwrap();
        for i in 0..9 {
            let z = if i < v.len() { v[i] } else { C64::default() };
            assert!((z - u.get(i, 2)).norm() < 1e-12);
        }
    }
}
