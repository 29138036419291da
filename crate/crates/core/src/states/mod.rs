//! Permutation-invariant states in the block picture and their limit objects.
//!
//! A permutation-invariant density of `M` qubits is `sum_j w_j rho_j (x) 1/mult_j`,
//! one density `rho_j` per spin sector. Each `rho_j` is stored in the embedded
//! Hermite basis, so blocks of different `j` share their leading indices.

mod decompose;
mod presets;
mod schwartz;

pub use decompose::{brute_force_decompose, multiplicities, product_state, product_state_weights};
pub use presets::{parse_state, state_from_elements};
pub use schwartz::{
    characteristic_function, decay_sup, sequence_diagnostics, schwartz_seminorm, seminorm_profile, SequenceDiagnostic,
};

use crate::error::{Error, Result};
use crate::fock::TruncatedOperator;
use crate::spin::BlockIndex;
use crate::tol::TIGHT;

/// Default cap on stored block dimensions.
pub const DEFAULT_D_MAX: usize = 4097;

/// Block dimension cap, overridable through `FLUCTLIM_DMAX`.
pub fn default_d_max() -> usize {
    std::env::var("FLUCTLIM_DMAX")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&d| d > 0)
        .unwrap_or(DEFAULT_D_MAX)
}

/// One-qubit reference state `diag((1 + lambda)/2, (1 - lambda)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceState {
    lambda: f64,
}

impl ReferenceState {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} outside [0, 1]")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Probabilities of spin up and spin down.
    pub fn populations(&self) -> (f64, f64) {
        ((1.0 + self.lambda) / 2.0, (1.0 - self.lambda) / 2.0)
    }
}

/// One spin sector of a permutation-invariant state.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub index: BlockIndex,
    pub weight: f64,
    pub rho: TruncatedOperator,
    pub capped_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermInvariantState {
    m: u32,
    blocks: Vec<Block>,
}

impl PermInvariantState {
    /// Validates and sorts the blocks by `2j`.
    pub fn new(m: u32, mut blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("a state needs at least one block".into()));
        }
        blocks.sort_by_key(|b| b.index.two_j());
        let mut total = 0.0;
        for (i, b) in blocks.iter().enumerate() {
            if b.index.m() != m {
                return Err(Error::InvalidArgument(format!("block belongs to M = {}, not {m}", b.index.m())));
            }
            if i > 0 && blocks[i - 1].index == b.index {
                return Err(Error::InvalidArgument(format!("duplicate block 2j = {}", b.index.two_j())));
            }
            if !(b.weight >= 0.0) {
                return Err(Error::InvalidArgument(format!("negative block weight {}", b.weight)));
            }
            if b.rho.dim() > b.index.dim() || b.rho.dim() > b.capped_dim {
                return Err(Error::DimensionMismatch(b.rho.dim(), b.index.dim().min(b.capped_dim)));
            }
            b.rho.check_density()?;
            total += b.weight;
        }
        if (total - 1.0).abs() > TIGHT {
            return Err(Error::NotDensity(format!("block weights sum to {total}")));
        }
        Ok(Self { m, blocks })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }
}

/// Parity-admissible `2j` nearest to `lambda M`; ties go to the smaller value.
pub fn nearest_two_j(lambda: f64, m: u32) -> u32 {
    let base = m % 2;
    let target = lambda * m as f64;
    let k = ((target - base as f64) / 2.0).floor().max(0.0) as u32;
    let lo = base + 2 * k;
    let hi = lo + 2;
    let pick = if target - lo as f64 <= hi as f64 - target { lo } else { hi };
    pick.clamp(base, m)
}

/// Projects `rho_inf` onto the first `2j + 1` levels of the sector nearest to
/// `lambda M` and renormalizes.
pub fn single_block_sequence(rho_inf: &TruncatedOperator, lambda: f64, m: u32) -> Result<PermInvariantState> {
    single_block_sequence_capped(rho_inf, lambda, m, default_d_max())
}

pub fn single_block_sequence_capped(rho_inf: &TruncatedOperator, lambda: f64, m: u32, d_max: usize) -> Result<PermInvariantState> {
    if m == 0 {
        return Err(Error::InvalidArgument("qubit count must be positive".into()));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} outside (0, 1]")));
    }
    let tr = rho_inf.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::NotDensity(format!("trace {tr} differs from 1")));
    }
    let two_j = nearest_two_j(lambda, m);
    let index = BlockIndex::new(two_j, m)?;
    let capped_dim = index.dim().min(d_max.max(1));
    let keep = capped_dim.min(rho_inf.dim());
    let kept = rho_inf.resized(keep);
    let trace = kept.trace().re;
    if trace < 1e-12 {
        return Err(Error::ProjectionAnnihilates { m, dim: index.dim(), trace });
    }
    if capped_dim < index.dim() {
        let leak = rho_inf.tail_mass(capped_dim.saturating_sub(8).min(rho_inf.dim()));
        if leak > 1e-10 {
            log::warn!("block cap {capped_dim} below 2j + 1 = {}: mass {leak:e} near the cap", index.dim());
        }
    }
    let rho = kept.scale(crate::c(1.0 / trace));
    PermInvariantState::new(m, vec![Block { index, weight: 1.0, rho, capped_dim }])
}

/// Discrete measure `mu_M` with atoms at `x_j = 2j / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if atoms.iter().any(|a| a.1 < 0.0 || !(0.0..=1.0).contains(&a.0)) || (total - 1.0).abs() > TIGHT {
            return Err(Error::InvalidArgument("atoms must lie in [0, 1] with masses summing to 1".into()));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * f(x)).sum()
    }
}

pub fn measure_of(state: &PermInvariantState) -> DiscreteMeasure {
    DiscreteMeasure {
        atoms: state.blocks().iter().map(|b| (b.index.x(), b.weight)).collect(),
    }
}

/// Piecewise-linear interpolation `R_M(x)` of the block states.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralRepresentation {
    grid: Vec<(f64, TruncatedOperator)>,
}

impl IntegralRepresentation {
    pub fn new(mut grid: Vec<(f64, TruncatedOperator)>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidArgument("interpolation grid is empty".into()));
        }
        grid.sort_by(|a, b| a.0.total_cmp(&b.0));
        let dim = grid.iter().map(|g| g.1.dim()).max().unwrap_or(1);
        let grid = grid.into_iter().map(|(x, r)| (x, r.resized(dim))).collect();
        Ok(Self { grid })
    }

    pub fn from_state(state: &PermInvariantState) -> Self {
        Self::new(state.blocks().iter().map(|b| (b.index.x(), b.rho.clone())).collect())
            .expect("states have at least one block")
    }

    pub fn grid(&self) -> &[(f64, TruncatedOperator)] {
        &self.grid
    }
}

/// Entrywise linear interpolation, constant beyond the grid ends, renormalized
/// to unit trace. Grid points return the stored block unchanged.
pub fn interpolate_block(rep: &IntegralRepresentation, x: f64) -> TruncatedOperator {
    let g = rep.grid();
    if let Some((_, r)) = g.iter().find(|(gx, _)| *gx == x) {
        return r.clone();
    }
    if x <= g[0].0 {
        return g[0].1.clone();
    }
    if x >= g[g.len() - 1].0 {
        return g[g.len() - 1].1.clone();
    }
    let hi = g.iter().position(|(gx, _)| *gx > x).expect("x lies inside the grid");
    let (x0, r0) = &g[hi - 1];
    let (x1, r1) = &g[hi];
    let s = (x - x0) / (x1 - x0);
    let mix = &r0.scale(crate::c(1.0 - s)) + &r1.scale(crate::c(s));
    let tr = mix.trace().re;
    mix.scale(crate::c(1.0 / tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn nearest_two_j_rules() {
        assert_eq!(nearest_two_j(1.0, 8), 8);
        assert_eq!(nearest_two_j(0.5, 100), 50);
        assert_eq!(nearest_two_j(0.5, 2), 0);
        assert_eq!(nearest_two_j(0.5, 6), 2);
        assert_eq!(nearest_two_j(0.5, 5), 3);
        assert_eq!(nearest_two_j(0.5, 7), 3);
        assert_eq!(nearest_two_j(0.01, 7), 1);
        assert_eq!(nearest_two_j(0.25, 16), 4);
    }

    #[test]
    fn sequence_examples() {
        let vac = TruncatedOperator::outer(1, 0, 0);
        let s = single_block_sequence(&vac, 1.0, 8).unwrap();
        assert_eq!(s.blocks().len(), 1);
        assert_eq!(s.blocks()[0].index.two_j(), 8);
        assert_eq!(s.blocks()[0].rho, vac);
        assert_eq!(s.blocks()[0].weight, 1.0);
        let psi2 = TruncatedOperator::outer(3, 2, 2);
        let s = single_block_sequence(&psi2, 0.5, 100).unwrap();
        assert_eq!(s.blocks()[0].index.two_j(), 50);
        assert_eq!(s.blocks()[0].rho, psi2);
        assert!(matches!(
            single_block_sequence(&psi2, 0.5, 2),
            Err(Error::ProjectionAnnihilates { m: 2, .. })
        ));
        assert!(single_block_sequence(&psi2, 0.0, 10).is_err());
    }

    #[test]
    fn sequence_renormalizes_and_caps() {
        let rho = TruncatedOperator::from_real_diagonal(&[0.5, 0.25, 0.25]);
        let s = single_block_sequence(&rho, 1.0, 1).unwrap();
        let b = &s.blocks()[0];
        assert_eq!(b.rho.dim(), 2);
        assert!((b.rho.get(0, 0).re - 2.0 / 3.0).abs() < 1e-15);
        let s = single_block_sequence_capped(&rho, 1.0, 10, 2).unwrap();
        assert_eq!(s.blocks()[0].capped_dim, 2);
    }

    #[test]
    fn measure_examples() {
        let vac = TruncatedOperator::outer(1, 0, 0);
        let s = single_block_sequence(&vac, 0.5, 10).unwrap();
        let mu = measure_of(&s);
        assert_eq!(mu.atoms(), &[(0.4, 1.0)]);
        assert!((mu.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
        let s = product_state(0.0, 2).unwrap();
        let mu = measure_of(&s);
        assert_eq!(mu.atoms(), &[(0.0, 0.25), (1.0, 0.75)]);
    }

    #[test]
    fn interpolation_examples() {
        let p0 = TruncatedOperator::outer(2, 0, 0);
        let p1 = TruncatedOperator::outer(2, 1, 1);
        let rep = IntegralRepresentation::new(vec![(0.2, p0.clone()), (0.6, p1.clone())]).unwrap();
        assert_eq!(interpolate_block(&rep, 0.2), p0);
        assert_eq!(interpolate_block(&rep, 0.0), p0);
        assert_eq!(interpolate_block(&rep, 0.9), p1);
        let mid = interpolate_block(&rep, 0.4);
        assert!(mid.max_abs_diff(&TruncatedOperator::from_real_diagonal(&[0.5, 0.5])) < 1e-15);
        let same = IntegralRepresentation::new(vec![(0.0, p0.clone()), (1.0, p0.clone())]).unwrap();
        assert!(interpolate_block(&same, 0.5).max_abs_diff(&p0) < 1e-15);
        let padded = IntegralRepresentation::new(vec![(0.0, TruncatedOperator::outer(1, 0, 0)), (1.0, p1)]).unwrap();
        assert_eq!(padded.grid()[0].1.dim(), 2);
        assert_eq!(interpolate_block(&padded, 0.5).get(1, 1), c(0.5));
    }

    #[test]
    fn state_validation() {
        let idx = BlockIndex::new(2, 2).unwrap();
        let good = Block { index: idx, weight: 1.0, rho: TruncatedOperator::outer(1, 0, 0), capped_dim: 3 };
        assert!(PermInvariantState::new(2, vec![good.clone()]).is_ok());
        let heavy = Block { weight: 1.5, ..good.clone() };
        assert!(PermInvariantState::new(2, vec![heavy]).is_err());
        let twice = vec![Block { weight: 0.5, ..good.clone() }, Block { weight: 0.5, ..good }];
        assert!(PermInvariantState::new(2, twice).is_err());
    }
}
