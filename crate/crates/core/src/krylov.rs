//! Matrix-free propagation and extremal eigenvalues for large banded blocks.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::BandedHamiltonian;
use crate::{c, C64};

/// Bessel functions `J_0..=J_kmax` at `z >= 0`, by Miller's backward recurrence
/// normalized with `J_0 + 2 sum J_2k = 1`.
pub fn bessel_j(kmax: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = 2 * ((kmax.max(z as usize) + 16 + (40.0 * (kmax as f64 + z)).sqrt() as usize) / 2);
    let (mut jp, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let jm = 2.0 * k as f64 / z * j - jp;
        jp = j;
        j = jm;
        if jp.abs() > 1e250 {
            // Rescale to avoid overflow; ratios are all that matter.
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
        if k - 1 <= kmax {
            out[k - 1] = j;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// `exp(-i t H) v` by a Chebyshev expansion on the Gershgorin interval of `H`.
pub fn chebyshev_evolve(h: &BandedHamiltonian, v: &[C64], t: f64) -> Vec<C64> {
    let d = h.dim();
    assert_eq!(v.len(), d, "vector length must match the Hamiltonian");
    let (lo, hi) = h.spectral_bounds();
    let center = 0.5 * (hi + lo);
    let radius = (0.5 * (hi - lo)).max(1e-300);
    let tau = t.abs() * radius;
    let kmax = (tau + 12.0 * tau.cbrt() + 30.0).ceil() as usize;
    let jk = bessel_j(kmax, tau);
    // exp(-i s y) = J_0(s) + 2 sum (-i)^k J_k(s) T_k(y) for s >= 0; for t < 0 use i^k.
    let unit = if t >= 0.0 { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
    let mut scratch = vec![C64::default(); d];
    let apply_scaled = |x: &[C64], out: &mut Vec<C64>, scratch: &mut Vec<C64>| {
        h.apply(x, scratch);
        for n in 0..d {
            out[n] = (scratch[n] - x[n] * center) / radius;
        }
    };
    let mut t_prev = v.to_vec();
    let mut t_cur = vec![C64::default(); d];
    apply_scaled(&t_prev, &mut t_cur, &mut scratch);
    let mut acc: Vec<C64> = v.iter().map(|z| z * jk[0]).collect();
    let mut phase = unit;
    for (a, z) in acc.iter_mut().zip(&t_cur) {
        *a += z * (phase * 2.0 * jk[1]);
    }
    let mut t_next = vec![C64::default(); d];
    for (k, &j) in jk.iter().enumerate().skip(2) {
        apply_scaled(&t_cur, &mut t_next, &mut scratch);
        for n in 0..d {
            t_next[n] = t_next[n] * 2.0 - t_prev[n];
        }
        phase *= unit;
        let coef = phase * 2.0 * j;
        for (a, z) in acc.iter_mut().zip(&t_next) {
            *a += z * coef;
        }
        std::mem::swap(&mut t_prev, &mut t_cur);
        std::mem::swap(&mut t_cur, &mut t_next);
        if j.abs() < 1e-18 && k as f64 > tau {
            break;
        }
    }
    let global = C64::from_polar(1.0, -t * center);
    acc.iter_mut().for_each(|z| *z *= global);
    acc
}

/// Largest eigenvalue of a Hermitian positive semidefinite operator given as a
/// matrix-vector product, by Lanczos with full reorthogonalization.
pub fn lanczos_top<F>(dim: usize, apply: F, max_iter: usize, seed: u64) -> f64
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    if dim == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<C64> = (0..dim).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let n0 = crate::kets::norm(&q);
    q.iter_mut().for_each(|z| *z /= n0);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    let mut stable = 0;
    let steps = max_iter.min(dim);
    for it in 0..steps {
        let mut w = apply(&q);
        let alpha: f64 = q.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        basis.push(q.clone());
        alphas.push(alpha);
        for _ in 0..2 {
            for b in &basis {
                let proj: C64 = b.iter().zip(&w).map(|(a, z)| a.conj() * z).sum();
                for (z, a) in w.iter_mut().zip(b) {
                    *z -= a * proj;
                }
            }
        }
        let beta = crate::kets::norm(&w);
        let k = alphas.len();
        let tri = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let top = SymmetricEigen::new(tri).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if (top - last).abs() <= 1e-13 * top.abs().max(1e-300) {
            stable += 1;
        } else {
            stable = 0;
        }
        last = top;
        if beta <= 1e-14 * top.abs().max(1.0) || (stable >= 3 && it >= 6) {
            break;
        }
        betas.push(beta);
        q = w.into_iter().map(|z| z / beta).collect();
    }
    last
}

/// Dense form of a banded Hamiltonian.
pub fn to_dense(h: &BandedHamiltonian) -> DMatrix<C64> {
    let d = h.dim();
    DMatrix::from_fn(d, d, |i, k| {
        if i == k {
            c(h.diag[i])
        } else if k == i + 2 {
            h.upper[i]
        } else if i == k + 2 {
            h.upper[k].conj()
        } else {
            C64::default()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::QuadraticHamiltonian;
    use crate::fock::{hermitian_evolve, TruncatedOperator};
    use crate::spin::Ensemble;

    #[test]
    fn bessel_values() {
        let j = bessel_j(5, 1.0);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((j[5] - 2.497_577_302_112_344e-4).abs() < 1e-17);
        let j = bessel_j(40, 20.0);
        assert!((j[0] - 0.167_024_664_340_583_2).abs() < 1e-14);
        assert!((j[20] - 0.164_747_773_775_326_6).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_matches_dense() {
        let h = QuadraticHamiltonian::from_real(C64::new(0.4, -0.3), 0.7, 0.2);
        let band = BandedHamiltonian::new(&h, Ensemble::Finite(40), 0.8, 34);
        let dense = TruncatedOperator::from_matrix(to_dense(&band)).unwrap();
        let v: Vec<C64> = (0..34).map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
        for t in [0.3, -1.7, 4.0] {
            let u = hermitian_evolve(&dense, t).unwrap();
            let w = chebyshev_evolve(&band, &v, t);
            for i in 0..34 {
                let expected: C64 = (0..34).map(|k| u.get(i, k) * v[k]).sum();
                assert!((w[i] - expected).norm() < 1e-11, "t={t} i={i}");
            }
        }
    }

    #[test]
    fn lanczos_finds_top_eigenvalue() {
        let diag: Vec<f64> = (0..200).map(|k| (k as f64 * 0.731).sin().abs() * 3.0).collect();
        let top = diag.iter().copied().fold(0.0, f64::max);
        let got = lanczos_top(200, |v| v.iter().zip(&diag).map(|(z, d)| z * *d).collect(), 200, 1);
        assert!((got - top).abs() < 1e-10);
    }
}
