//! Block weights of product states and brute-force block extraction.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{Block, PermInvariantState};
use crate::error::{Error, Result};
use crate::fock::TruncatedOperator;
use crate::qubits::{lower, permutation_defect, raising_in_sector, MAX_QUBITS};
use crate::spin::BlockIndex;
use crate::{c, C64};

/// Largest `M` accepted by [`product_state_weights`].
pub const MAX_PRODUCT_QUBITS: u32 = 64;

/// Multiplicity of every sector `2j = 0..=m` of `m` qubits, built by adding one
/// qubit at a time (`2j -> 2j +- 1`).
pub fn multiplicities(m: u32) -> Vec<u128> {
    let mut mult = vec![0u128; m as usize + 1];
    mult[0] = 1;
    for k in 0..m as usize {
        let mut next = vec![0u128; m as usize + 1];
        for (tj, &n) in mult.iter().enumerate().take(k + 1) {
            if n == 0 {
                continue;
            }
            next[tj + 1] += n;
            if tj > 0 {
                next[tj - 1] += n;
            }
        }
        mult = next;
    }
    mult
}

fn populations(lambda: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} outside [0, 1]")));
    }
    Ok(((1.0 + lambda) / 2.0, (1.0 - lambda) / 2.0))
}

fn check_product_size(m: u32) -> Result<()> {
    if m == 0 || m > MAX_PRODUCT_QUBITS {
        return Err(Error::InvalidArgument(format!("product states need 1 <= M <= {MAX_PRODUCT_QUBITS}, got {m}")));
    }
    Ok(())
}

/// Sector weights of `theta^{(x) M}`, ascending in `2j`, zero weights omitted.
pub fn product_state_weights(lambda: f64, m: u32) -> Result<Vec<(u32, f64)>> {
    check_product_size(m)?;
    let (p, q) = populations(lambda)?;
    let mult = multiplicities(m);
    let mut out = Vec::new();
    for two_j in (m % 2..=m).step_by(2) {
        let up = (m + two_j) / 2;
        let down = (m - two_j) / 2;
        let chain: f64 = (0..=two_j).map(|n| p.powi((up - n) as i32) * q.powi((down + n) as i32)).sum();
        let w = mult[two_j as usize] as f64 * chain;
        if w > 0.0 {
            out.push((two_j, w));
        }
    }
    Ok(out)
}

/// `theta^{(x) M}` in the block picture; each block is diagonal with entries
/// proportional to `(q / p)^n`.
pub fn product_state(lambda: f64, m: u32) -> Result<PermInvariantState> {
    let (p, q) = populations(lambda)?;
    let weights = product_state_weights(lambda, m)?;
    let blocks = weights
        .into_iter()
        .map(|(two_j, w)| {
            let r = q / p;
            let diag: Vec<f64> = (0..=two_j as i32).map(|n| r.powi(n)).collect();
            let total: f64 = diag.iter().sum();
            let diag: Vec<f64> = diag.iter().map(|d| d / total).collect();
            let index = BlockIndex::new(two_j, m)?;
            Ok(Block { index, weight: w, rho: TruncatedOperator::from_real_diagonal(&diag), capped_dim: index.dim() })
        })
        .collect::<Result<Vec<_>>>()?;
    PermInvariantState::new(m, blocks)
}

/// Orthonormal highest-weight vectors of sector `2j` (kernel of `L_+` on the states
/// with `(M - 2j)/2` spins down), embedded in the full space.
fn highest_weight_vectors(m: u32, two_j: u32) -> Vec<DVector<C64>> {
    let dim = 1usize << m;
    let down = (m - two_j) / 2;
    let (_, cols, raise) = raising_in_sector(m, down);
    let embed = |coeffs: &[C64]| {
        let mut v = DVector::zeros(dim);
        for (&b, &z) in cols.iter().zip(coeffs) {
            v[b] = z;
        }
        v
    };
    if down == 0 {
        return vec![embed(&[c(1.0)])];
    }
    let gram = raise.adjoint() * &raise;
    let eig = SymmetricEigen::new(gram);
    eig.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &e)| e < 0.5)
        .map(|(k, _)| {
            let col: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            embed(&col)
        })
        .collect()
}

/// Extracts block weights and states of a permutation-invariant `2^M` density.
pub fn brute_force_decompose(rho_full: &DMatrix<C64>, m: u32) -> Result<PermInvariantState> {
    if m == 0 || m > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("brute force needs 1 <= M <= {MAX_QUBITS}, got {m}")));
    }
    let dim = 1usize << m;
    if rho_full.nrows() != dim || rho_full.ncols() != dim {
        return Err(Error::DimensionMismatch(rho_full.nrows(), dim));
    }
    let defect = permutation_defect(rho_full, m);
    if defect > 1e-10 {
        return Err(Error::NotPermutationInvariant(defect));
    }
    let mut blocks = Vec::new();
    for two_j in (m % 2..=m).step_by(2) {
        let d = two_j as usize + 1;
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for hw in highest_weight_vectors(m, two_j) {
            let mut chain = vec![hw];
            for _ in 0..two_j {
                let next = lower(chain.last().expect("chain is nonempty"), m);
                let n = next.norm();
                chain.push(next / c(n));
            }
            let images: Vec<DVector<C64>> = chain.iter().map(|v| rho_full * v).collect();
            for i in 0..d {
                for k in 0..d {
                    acc[(i, k)] += chain[i].dotc(&images[k]);
                }
            }
        }
        let w = acc.trace().re;
        if w <= 1e-14 {
            continue;
        }
        let herm = (&acc + acc.adjoint()) * c(0.5 / w);
        let index = BlockIndex::new(two_j, m)?;
        blocks.push((index, w, TruncatedOperator::from_matrix(herm)?));
    }
    let total: f64 = blocks.iter().map(|b| b.1).sum();
    let blocks = blocks
        .into_iter()
        .map(|(index, w, rho)| Block { index, weight: w / total, rho, capped_dim: index.dim() })
        .collect();
    PermInvariantState::new(m, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubits::{product_density, reference_state};

    fn singlet() -> DMatrix<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = DVector::from_vec(vec![c(0.0), c(s), c(-s), c(0.0)]);
        &v * v.adjoint()
    }

    #[test]
    fn multiplicities_match_binomials() {
        assert_eq!(multiplicities(1), vec![0, 1]);
        assert_eq!(multiplicities(2), vec![1, 0, 1]);
        assert_eq!(multiplicities(4), vec![2, 0, 3, 0, 1]);
        let m = multiplicities(64);
        let dim: u128 = m.iter().enumerate().map(|(tj, &n)| n * (tj as u128 + 1)).sum();
        assert_eq!(dim, 1u128 << 64);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(product_state_weights(0.3, 1).unwrap(), vec![(1, 1.0)]);
        let w = product_state_weights(0.0, 2).unwrap();
        assert_eq!(w, vec![(0, 0.25), (2, 0.75)]);
        assert_eq!(product_state_weights(1.0, 2).unwrap(), vec![(2, 1.0)]);
        for m in [3u32, 17, 64] {
            for lambda in [0.0, 0.4, 0.9] {
                let total: f64 = product_state_weights(lambda, m).unwrap().iter().map(|w| w.1).sum();
                assert!((total - 1.0).abs() < 1e-12, "M={m} lambda={lambda}");
            }
        }
        assert!(product_state_weights(0.5, 65).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let up = product_density(&reference_state(1.0), 2).unwrap();
        let s = brute_force_decompose(&up, 2).unwrap();
        assert_eq!(s.blocks().len(), 1);
        assert_eq!(s.blocks()[0].index.two_j(), 2);
        assert!(s.blocks()[0].rho.max_abs_diff(&TruncatedOperator::outer(3, 0, 0)) < 1e-14);

        let mixed = DMatrix::<C64>::identity(4, 4) * c(0.25);
        let s = brute_force_decompose(&mixed, 2).unwrap();
        assert_eq!(s.blocks().len(), 2);
        assert!((s.blocks()[0].weight - 0.25).abs() < 1e-14);
        assert!((s.blocks()[1].weight - 0.75).abs() < 1e-14);
        let third = TruncatedOperator::identity(3).scale(c(1.0 / 3.0));
        assert!(s.blocks()[1].rho.max_abs_diff(&third) < 1e-14);

        let s = brute_force_decompose(&singlet(), 2).unwrap();
        assert_eq!(s.blocks().len(), 1);
        assert_eq!(s.blocks()[0].index.two_j(), 0);
    }

    #[test]
    fn brute_force_rejects_asymmetric() {
        let mut rho = DMatrix::<C64>::zeros(4, 4);
        rho[(1, 1)] = c(1.0);
        assert!(matches!(brute_force_decompose(&rho, 2), Err(Error::NotPermutationInvariant(_))));
    }

    #[test]
    fn product_state_agrees_with_brute_force() {
        for m in 1..=6u32 {
            for lambda in [0.0, 0.35, 1.0] {
                let full = product_density(&reference_state(lambda), m).unwrap();
                let brute = brute_force_decompose(&full, m).unwrap();
                let fast = product_state(lambda, m).unwrap();
                assert_eq!(brute.blocks().len(), fast.blocks().len());
                for (a, b) in brute.blocks().iter().zip(fast.blocks()) {
                    assert_eq!(a.index, b.index);
                    assert!((a.weight - b.weight).abs() < 1e-12);
                    assert!(a.rho.max_abs_diff(&b.rho) < 1e-12);
                }
            }
        }
    }
}
