//! Spin-`j` sectors embedded into the Hermite basis.
//!
//! Basis vector `n` of a spin-`j` block is the `L3 = j - n` eigenvector, so the fully
//! polarized state sits at index 0 and the block identifies with the first `2j + 1`
//! Hermite functions. On that span the collective ladder `L_+ / sqrt(M)` becomes the
//! deformed annihilator `beta(x, N) a` with `x = 2j / M`.

use crate::error::{Error, Result};
use crate::fock::{quadratures, TruncatedOperator};
use crate::{c, C64};

/// A spin sector `j = two_j / 2` of `m` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockIndex {
    two_j: u32,
    m: u32,
}

impl BlockIndex {
    pub fn new(two_j: u32, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("qubit count must be positive".into()));
        }
        if two_j > m || (m - two_j) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "2j = {two_j} is not an admissible sector of {m} qubits"
            )));
        }
        Ok(Self { two_j, m })
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Rescaled spin `x_j = 2j / M`.
    pub fn x(&self) -> f64 {
        self.two_j as f64 / self.m as f64
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }
}

/// Finite qubit count or the limit `M = infinity`, where `beta(x, n) = sqrt(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Finite(u32),
    Limit,
}

impl Ensemble {
    /// `beta(x, n)`, zero for negative `n`.
    pub fn beta(self, x: f64, n: i64) -> f64 {
        match self {
            Ensemble::Finite(m) => beta_shifted(m, x, n),
            Ensemble::Limit => {
                if n < 0 {
                    0.0
                } else {
                    x.max(0.0).sqrt()
                }
            }
        }
    }

    /// Number of Hermite levels on which the deformed ladder acts nontrivially,
    /// i.e. one past the last index with `beta(x, n - 1) > 0`.
    pub fn support(self, x: f64) -> Option<usize> {
        match self {
            Ensemble::Finite(m) => {
                let mut n = (m as f64 * x).floor() as usize;
                while self.beta(x, n as i64) > 0.0 {
                    n += 1;
                }
                Some(n + 1)
            }
            Ensemble::Limit => None,
        }
    }
}

/// `sqrt(x - n/M)` if the argument lies in `[0, 1]`, else 0.
pub fn beta(m: u32, x: f64, n: usize) -> f64 {
    let arg = x - n as f64 / m as f64;
    if (0.0..=1.0).contains(&arg) {
        arg.sqrt()
    } else {
        0.0
    }
}

/// [`beta`] extended by zero to negative shifts.
pub fn beta_shifted(m: u32, x: f64, n: i64) -> f64 {
    if n < 0 {
        0.0
    } else {
        beta(m, x, n as usize)
    }
}

/// Angular momentum matrices of one spin-`j` block.
#[derive(Debug, Clone)]
pub struct SpinLadder {
    pub plus: TruncatedOperator,
    pub minus: TruncatedOperator,
    pub z: TruncatedOperator,
}

/// `L_+ psi_n = sqrt(n (2j - n + 1)) psi_{n-1}` and `L3 psi_n = (j - n) psi_n`.
pub fn spin_ladder(two_j: u32) -> SpinLadder {
    let d = two_j as usize + 1;
    let tj = two_j as f64;
    let plus = TruncatedOperator::from_fn(d, |i, k| {
        if k == i + 1 {
            let n = k as f64;
            c((n * (tj - n + 1.0)).sqrt())
        } else {
            C64::default()
        }
    });
    let minus = plus.adjoint();
    let z = TruncatedOperator::from_real_diagonal(&(0..d).map(|n| tj / 2.0 - n as f64).collect::<Vec<_>>());
    SpinLadder { plus, minus, z }
}

/// Deformed ladder pair on `dim` levels.
#[derive(Debug, Clone)]
pub struct DeformedLadder {
    pub annihilator: TruncatedOperator,
    pub creator: TruncatedOperator,
}

impl DeformedLadder {
    /// `(Q_M, P_M)` built from the pair.
    pub fn quadratures(&self) -> (TruncatedOperator, TruncatedOperator) {
        quadratures(&self.annihilator, &self.creator)
    }
}

/// `a_M(x) = beta(x, N - 1) a`, i.e. `<n-1| a_M(x) |n> = beta(x, n-1) sqrt(n)`.
pub fn deformed_ladder(m: u32, x: f64, dim: usize) -> Result<DeformedLadder> {
    ensemble_ladder(Ensemble::Finite(m), x, dim)
}

/// [`deformed_ladder`] for either a finite or the limiting ensemble.
pub fn ensemble_ladder(ens: Ensemble, x: f64, dim: usize) -> Result<DeformedLadder> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let annihilator = TruncatedOperator::from_fn(dim, |i, k| {
        if k == i + 1 {
            c(ens.beta(x, i as i64) * (k as f64).sqrt())
        } else {
            C64::default()
        }
    });
    let creator = annihilator.adjoint();
    Ok(DeformedLadder { annihilator, creator })
}

/// `[Q_M, P_M] = i 2 L3 / M` on one block, as a diagonal.
pub fn commutator_diagonal(idx: BlockIndex) -> Vec<f64> {
    let m = idx.m() as f64;
    (0..idx.dim()).map(|n| (idx.two_j() as f64 - 2.0 * n as f64) / m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::TIGHT;

    #[test]
    fn block_index_validation() {
        assert!(BlockIndex::new(3, 5).is_ok());
        assert!(BlockIndex::new(2, 5).is_err());
        assert!(BlockIndex::new(7, 5).is_err());
        assert!(BlockIndex::new(0, 0).is_err());
        assert_eq!(BlockIndex::new(2, 4).unwrap().x(), 0.5);
    }

    #[test]
    fn beta_examples() {
        for m in [1, 4, 100] {
            for x in [0.0, 0.3, 1.0] {
                assert_eq!(beta(m, x, 0), x.sqrt());
            }
        }
        assert_eq!(beta(4, 0.5, 2), 0.0);
        assert!((beta(100, 0.99, 1) - 0.98f64.sqrt()).abs() < 1e-15);
        assert_eq!(beta_shifted(4, 0.5, -1), 0.0);
    }

    #[test]
    fn beta_vanishes_at_top_of_block() {
        for m in 1..=64u32 {
            for two_j in (m % 2..=m).step_by(2) {
                let x = two_j as f64 / m as f64;
                assert_eq!(beta(m, x, two_j as usize), 0.0);
                if two_j > 0 {
                    assert!(beta(m, x, two_j as usize - 1) > 0.0);
                }
                assert_eq!(Ensemble::Finite(m).support(x), Some(two_j as usize + 1));
            }
        }
    }

    #[test]
    fn spin_half_and_one() {
        let s = spin_ladder(1);
        assert_eq!(s.plus.get(0, 1), c(1.0));
        assert_eq!(s.plus.get(1, 0), C64::default());
        assert_eq!(s.z.get(0, 0), c(0.5));
        assert_eq!(s.z.get(1, 1), c(-0.5));
        let s = spin_ladder(2);
        assert!((s.plus.get(0, 1).re - 2f64.sqrt()).abs() < TIGHT);
        assert!((s.plus.get(1, 2).re - 2f64.sqrt()).abs() < TIGHT);
    }

    #[test]
    fn casimir() {
        for two_j in 0..=12 {
            let s = spin_ladder(two_j);
            let j = two_j as f64 / 2.0;
            let cas = &(&s.z * &s.z) + &(&(&s.plus * &s.minus) + &(&s.minus * &s.plus)).scale(c(0.5));
            let expected = TruncatedOperator::identity(s.z.dim()).scale(c(j * (j + 1.0)));
            assert!(cas.max_abs_diff(&expected) < TIGHT);
        }
    }

    #[test]
    fn deformed_examples() {
        let d = deformed_ladder(4, 0.5, 3).unwrap();
        assert!((d.annihilator.get(0, 1).re - 0.5f64.sqrt()).abs() < 1e-15);
        let big = deformed_ladder(1_000_000, 1.0, 5).unwrap();
        let a = crate::fock::annihilator(5);
        assert!(big.annihilator.max_abs_diff(&a) < 1e-3);
    }

    #[test]
    fn embedding_identity() {
        for m in [1u32, 2, 7, 16, 33, 64] {
            for two_j in (m % 2..=m).step_by(2) {
                let idx = BlockIndex::new(two_j, m).unwrap();
                let d = deformed_ladder(m, idx.x(), idx.dim()).unwrap();
                let s = spin_ladder(two_j);
                let scaled = s.plus.scale(c(1.0 / (m as f64).sqrt()));
                assert!(d.annihilator.max_abs_diff(&scaled) < 1e-14, "M={m} 2j={two_j}");
            }
        }
    }

    #[test]
    fn commutator_is_l3() {
        for (two_j, m) in [(4u32, 4u32), (3, 9), (10, 20), (0, 6)] {
            let idx = BlockIndex::new(two_j, m).unwrap();
            let d = deformed_ladder(m, idx.x(), idx.dim()).unwrap();
            let comm = &(&d.annihilator * &d.creator) - &(&d.creator * &d.annihilator);
            let l3 = spin_ladder(two_j).z.scale(c(2.0 / m as f64));
            assert!(comm.max_abs_diff(&l3) < TIGHT);
            let diag = commutator_diagonal(idx);
            let expected = TruncatedOperator::from_real_diagonal(&diag);
            assert!(expected.max_abs_diff(&l3) < TIGHT);
        }
    }

    #[test]
    fn creator_kills_top_state() {
        for (two_j, m) in [(6u32, 8u32), (5, 5), (1, 9)] {
            let idx = BlockIndex::new(two_j, m).unwrap();
            let d = deformed_ladder(m, idx.x(), idx.dim() + 1).unwrap();
            let top = two_j as usize;
            assert_eq!(d.creator.get(top + 1, top), C64::default());
        }
    }
}
