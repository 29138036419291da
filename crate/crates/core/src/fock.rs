//! Dense operator algebra on the leading `D` Hermite functions.
//!
//! Index `n` of every matrix means the Hermite function `psi_n`. Operators are the
//! compression of their infinite-dimensional counterparts to the first `D` levels;
//! the number operator is defined diagonally so its boundary entry is exact.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tol::{EIG, TIGHT};
use crate::{c, C64, I};

/// Dense complex `D x D` matrix on the truncated Hermite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    entries: DMatrix<C64>,
}

impl TruncatedOperator {
    pub fn from_matrix(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch(entries.nrows(), entries.ncols()));
        }
        if entries.nrows() == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { entries })
    }

    pub(crate) fn wrap(entries: DMatrix<C64>) -> Self {
        debug_assert!(entries.is_square() && entries.nrows() > 0);
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::wrap(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::wrap(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::wrap(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { c(diag[i]) } else { C64::default() })
    }

    /// `|psi_row><psi_col|` on `dim` levels.
    pub fn outer(dim: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.entries[(row, col)] = c(1.0);
        m
    }

    /// Rank-one density `|phi><phi|` of the normalized amplitude vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero amplitude vector".into()));
        }
        let v: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        Ok(Self::from_fn(v.len(), |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.entries.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let d = self.dim().min(other.dim());
        let mut acc = C64::default();
        for i in 0..d {
            for k in 0..d {
                acc += self.entries[(i, k)] * other.entries[(k, i)];
            }
        }
        acc
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::wrap(&self.entries * s)
    }

    /// `max |A - A^dagger|` entrywise.
    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Entrywise max distance; the smaller operator is zero-padded.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self.dim().max(other.dim());
        let a = self.resized(d);
        let b = other.resized(d);
        a.entries
            .iter()
            .zip(b.entries.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Leading `dim x dim` block, zero-padded if `dim` exceeds the current size.
    pub fn resized(&self, dim: usize) -> Self {
        let d = self.dim();
        if dim == d {
            return self.clone();
        }
        let m = d.min(dim);
        let mut out = DMatrix::zeros(dim, dim);
        out.view_mut((0, 0), (m, m)).copy_from(&self.entries.view((0, 0), (m, m)));
        Self::wrap(out)
    }

    /// Real diagonal mass on indices `from..`.
    pub fn tail_mass(&self, from: usize) -> f64 {
        (from..self.dim()).map(|n| self.entries[(n, n)].re).sum()
    }

    /// Largest index carrying a nonzero entry, plus one.
    pub fn support(&self) -> usize {
        let d = self.dim();
        (0..d)
            .rev()
            .find(|&n| (0..d).any(|k| self.entries[(n, k)] != C64::default() || self.entries[(k, n)] != C64::default()))
            .map_or(0, |n| n + 1)
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let asym = self.max_asymmetry();
        if asym > tol {
            return Err(Error::NotHermitian(asym));
        }
        Ok(())
    }

    /// Eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = self.hermitian_part();
        SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn check_density(&self) -> Result<()> {
        self.check_hermitian(TIGHT).map_err(|e| Error::NotDensity(e.to_string()))?;
        let tr = self.trace();
        if (tr.re - 1.0).abs() > EIG || tr.im.abs() > EIG {
            return Err(Error::NotDensity(format!("trace {tr} differs from 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -EIG {
            return Err(Error::NotDensity(format!("minimum eigenvalue {min:e}")));
        }
        Ok(())
    }

    fn hermitian_part(&self) -> DMatrix<C64> {
        (&self.entries + self.entries.adjoint()) * c(0.5)
    }
}

impl Mul for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn mul(self, rhs: Self) -> TruncatedOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        TruncatedOperator::wrap(&self.entries * &rhs.entries)
    }
}

impl Add for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn add(self, rhs: Self) -> TruncatedOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        TruncatedOperator::wrap(&self.entries + &rhs.entries)
    }
}

impl Sub for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn sub(self, rhs: Self) -> TruncatedOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        TruncatedOperator::wrap(&self.entries - &rhs.entries)
    }
}

/// Ladder, number and quadrature operators on `D` levels.
#[derive(Debug, Clone)]
pub struct CanonicalOperators {
    pub annihilator: TruncatedOperator,
    pub creator: TruncatedOperator,
    pub number: TruncatedOperator,
    pub position: TruncatedOperator,
    pub momentum: TruncatedOperator,
}

/// `a` with `<n-1|a|n> = sqrt(n)`.
pub fn annihilator(dim: usize) -> TruncatedOperator {
    TruncatedOperator::from_fn(dim, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { C64::default() })
}

/// Quadratures `((a + a^dagger)/sqrt 2, (a - a^dagger)/(i sqrt 2))` of a ladder pair.
pub fn quadratures(
    annihilator: &TruncatedOperator,
    creator: &TruncatedOperator,
) -> (TruncatedOperator, TruncatedOperator) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (annihilator + creator).scale(c(s));
    let p = (annihilator - creator).scale(-I * s);
    (q, p)
}

pub fn canonical_operators(dim: usize) -> Result<CanonicalOperators> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let annihilator = annihilator(dim);
    let creator = annihilator.adjoint();
    let number = TruncatedOperator::from_real_diagonal(&(0..dim).map(|n| n as f64).collect::<Vec<_>>());
    let (position, momentum) = quadratures(&annihilator, &creator);
    Ok(CanonicalOperators { annihilator, creator, number, position, momentum })
}

/// Cached eigendecomposition of a Hermitian generator, for repeated exponentials.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(h: &TruncatedOperator) -> Result<Self> {
        let asym = h.max_asymmetry();
        if asym > EIG {
            return Err(Error::NotHermitian(asym));
        }
        let eig = SymmetricEigen::new(h.hermitian_part());
        Ok(Self {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `exp(-i t H)`.
    pub fn unitary(&self, t: f64) -> TruncatedOperator {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let phase = C64::from_polar(1.0, -t * e);
            scaled.column_mut(k).scale_mut_complex(phase);
        }
        TruncatedOperator::wrap(scaled * v.adjoint())
    }

    /// `U rho U^dagger` with `U = exp(-i t H)`.
    pub fn conjugate(&self, rho: &TruncatedOperator, t: f64) -> TruncatedOperator {
        let u = self.unitary(t);
        TruncatedOperator::wrap(&u.entries * &rho.entries * u.entries.adjoint())
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, s: C64);
}

impl<S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>> ScaleComplex
    for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
{
    fn scale_mut_complex(&mut self, s: C64) {
        for z in self.iter_mut() {
            *z *= s;
        }
    }
}

/// `exp(-i t H)` for Hermitian `H`, via eigendecomposition.
pub fn hermitian_evolve(h: &TruncatedOperator, t: f64) -> Result<TruncatedOperator> {
    Ok(Propagator::new(h)?.unitary(t))
}

/// Weyl operator `exp(i (x2 Q - x1 P))` on the `D`-level truncation.
///
/// The generator is the compression of the exact quadrature combination, so the
/// result is unitary on the truncation; accuracy degrades only for matrix elements
/// near the boundary.
pub fn weyl_operator(dim: usize, x1: f64, x2: f64) -> Result<TruncatedOperator> {
    let ops = canonical_operators(dim)?;
    let generator = &ops.position.scale(c(x2)) - &ops.momentum.scale(c(x1));
    hermitian_evolve(&generator, -1.0)
}

/// `max |U^dagger U - 1|` entrywise.
pub fn unitarity_defect(u: &TruncatedOperator) -> f64 {
    let prod = &u.adjoint() * u;
    prod.max_abs_diff(&TruncatedOperator::identity(u.dim()))
}

/// Sum of singular values.
pub fn trace_norm(a: &TruncatedOperator) -> f64 {
    a.entries.clone().svd(false, false).singular_values.iter().sum()
}

/// Largest singular value.
pub fn operator_norm(a: &TruncatedOperator) -> f64 {
    a.entries.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn rejects_zero_dimension() {
        assert_eq!(canonical_operators(0).unwrap_err(), Error::ZeroDimension);
        assert!(TruncatedOperator::from_matrix(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn vacuum_only_truncation() {
        let ops = canonical_operators(1).unwrap();
        assert_eq!(ops.annihilator.get(0, 0), C64::default());
        assert_eq!(ops.number.get(0, 0), C64::default());
    }

    #[test]
    fn ladder_matrix_elements() {
        let ops = canonical_operators(3).unwrap();
        let a = &ops.annihilator;
        for i in 0..3 {
            for j in 0..3 {
                let expected = match (i, j) {
                    (0, 1) => 1.0,
                    (1, 2) => 2f64.sqrt(),
                    _ => 0.0,
                };
                assert_eq!(a.get(i, j), c(expected));
            }
        }
        assert_eq!(ops.creator, a.adjoint());
    }

    #[test]
    fn ccr_on_interior() {
        let d = 4;
        let ops = canonical_operators(d).unwrap();
        let q2 = &ops.position * &ops.position;
        let p2 = &ops.momentum * &ops.momentum;
        let lhs = &(&q2 + &p2) - &ops.number.scale(c(2.0));
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { c(1.0) } else { C64::default() };
                assert!(approx(lhs.get(i, j), e, TIGHT), "({i},{j}) = {}", lhs.get(i, j));
            }
        }
        let comm = &(&ops.annihilator * &ops.creator) - &(&ops.creator * &ops.annihilator);
        for i in 0..d - 1 {
            assert!(approx(comm.get(i, i), c(1.0), TIGHT));
        }
    }

    #[test]
    fn evolve_number_by_pi() {
        let ops = canonical_operators(3).unwrap();
        let u = hermitian_evolve(&ops.number, std::f64::consts::PI).unwrap();
        let expected = [1.0, -1.0, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { c(expected[i]) } else { C64::default() };
                assert!(approx(u.get(i, j), e, EIG));
            }
        }
    }

    #[test]
    fn evolve_at_zero_is_identity_and_inverse_cancels() {
        let ops = canonical_operators(6).unwrap();
        let h = &(&ops.position * &ops.momentum) + &(&ops.momentum * &ops.position);
        let u0 = hermitian_evolve(&h, 0.0).unwrap();
        assert!(u0.max_abs_diff(&TruncatedOperator::identity(6)) < EIG);
        let u = hermitian_evolve(&h, 0.7).unwrap();
        let back = hermitian_evolve(&h, -0.7).unwrap();
        assert!((&u * &back).max_abs_diff(&TruncatedOperator::identity(6)) < EIG);
        assert!(unitarity_defect(&u) < EIG);
    }

    #[test]
    fn evolve_rejects_non_hermitian() {
        let a = annihilator(4);
        assert!(matches!(hermitian_evolve(&a, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn weyl_identity_and_adjoint() {
        let w0 = weyl_operator(7, 0.0, 0.0).unwrap();
        assert!(w0.max_abs_diff(&TruncatedOperator::identity(7)) < EIG);
        let w = weyl_operator(40, 1.0, 0.0).unwrap();
        let wm = weyl_operator(40, -1.0, 0.0).unwrap();
        assert!(w.max_abs_diff(&wm.adjoint()) < EIG);
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&TruncatedOperator::identity(5)) - 5.0).abs() < TIGHT);
        assert!((trace_norm(&TruncatedOperator::outer(3, 0, 1)) - 1.0).abs() < TIGHT);
        let d = TruncatedOperator::from_real_diagonal(&[1.0, -2.0, 3.0]);
        assert!((trace_norm(&d) - 6.0).abs() < TIGHT);
    }

    #[test]
    fn density_checks() {
        assert!(TruncatedOperator::outer(3, 1, 1).check_density().is_ok());
        assert!(TruncatedOperator::from_real_diagonal(&[1.5, -0.5]).check_density().is_err());
        assert!(TruncatedOperator::outer(3, 0, 1).check_density().is_err());
    }

    fn random_hermitian(dim: usize, seed: &[f64]) -> TruncatedOperator {
        let m = TruncatedOperator::from_fn(dim, |i, j| {
            let k = (i * dim + j) % seed.len();
            C64::new(seed[k], seed[(k + 1) % seed.len()])
        });
        (&m + &m.adjoint()).scale(c(0.5))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn evolution_is_a_group(seed in prop::collection::vec(-1.0f64..1.0, 8..20),
                                s in -3.0f64..3.0, t in -3.0f64..3.0) {
            let h = random_hermitian(6, &seed);
            let p = Propagator::new(&h).unwrap();
            let lhs = &p.unitary(s) * &p.unitary(t);
            prop_assert!(lhs.max_abs_diff(&p.unitary(s + t)) < 1e-9);
        }

        #[test]
        fn trace_norm_is_unitarily_invariant(seed in prop::collection::vec(-1.0f64..1.0, 8..20),
                                            s in -2.0f64..2.0, t in -2.0f64..2.0) {
            let a = TruncatedOperator::from_fn(5, |i, j| C64::new(seed[(i + 2 * j) % seed.len()], seed[(3 * i + j) % seed.len()]));
            let h1 = random_hermitian(5, &seed);
            let h2 = random_hermitian(5, &seed[1..]);
            let u = hermitian_evolve(&h1, s).unwrap();
            let v = hermitian_evolve(&h2, t).unwrap();
            let rotated = &(&u * &a) * &v;
            prop_assert!((trace_norm(&rotated) - trace_norm(&a)).abs() < 1e-9);
        }
    }
}
