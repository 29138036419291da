//! Observables and expectation values on both sides of the large-`M` limit.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{evolve_block, limit_evolution, QuadraticHamiltonian};
use crate::error::{Error, Result};
use crate::fock::{quadratures, TruncatedOperator};
use crate::spin::{commutator_diagonal, ensemble_ladder, Ensemble};
use crate::states::PermInvariantState;
use crate::{c, C64, I};

/// Ladder letter: `+1` creates, `-1` annihilates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    Create,
    Annihilate,
}

impl Letter {
    pub fn sign(self) -> i32 {
        match self {
            Letter::Create => 1,
            Letter::Annihilate => -1,
        }
    }
}

/// `a^R = a^(R_1) ... a^(R_d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct OperatorWord {
    pub letters: Vec<Letter>,
}

impl OperatorWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn from_signs(signs: &[i32]) -> Self {
        Self::new(signs.iter().map(|&s| if s > 0 { Letter::Create } else { Letter::Annihilate }).collect())
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    pub fn weight(&self) -> i32 {
        self.letters.iter().map(|l| l.sign()).sum()
    }

    /// Every word of length exactly `d`, in lexicographic order with `Create` first.
    pub fn all_of_degree(d: usize) -> Vec<OperatorWord> {
        (0..1usize << d)
            .map(|bits| {
                Self::new(
                    (0..d)
                        .map(|i| if bits >> (d - 1 - i) & 1 == 0 { Letter::Create } else { Letter::Annihilate })
                        .collect(),
                )
            })
            .collect()
    }

    /// Every word of length at most `d`.
    pub fn all_up_to_degree(d: usize) -> Vec<OperatorWord> {
        (0..=d).flat_map(Self::all_of_degree).collect()
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<&str> = self
            .letters
            .iter()
            .map(|l| match l {
                Letter::Create => "ad",
                Letter::Annihilate => "a",
            })
            .collect();
        write!(f, "{}", s.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    Q,
    P,
}

/// `f(q, p) = sum coef * word` in non-commuting `q`, `p`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CanonicalPolynomial {
    pub terms: Vec<(C64, Vec<Quadrature>)>,
}

impl CanonicalPolynomial {
    pub fn monomial(word: Vec<Quadrature>) -> Self {
        Self { terms: vec![(c(1.0), word)] }
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }
}

/// Left-to-right product of ladder matrices.
pub fn word_matrix(word: &OperatorWord, ann: &TruncatedOperator, cre: &TruncatedOperator) -> Result<TruncatedOperator> {
    if ann.dim() != cre.dim() {
        return Err(Error::DimensionMismatch(ann.dim(), cre.dim()));
    }
    Ok(word.letters.iter().fold(TruncatedOperator::identity(ann.dim()), |acc, l| match l {
        Letter::Create => &acc * cre,
        Letter::Annihilate => &acc * ann,
    }))
}

pub fn polynomial_matrix(poly: &CanonicalPolynomial, q: &TruncatedOperator, p: &TruncatedOperator) -> Result<TruncatedOperator> {
    if q.dim() != p.dim() {
        return Err(Error::DimensionMismatch(q.dim(), p.dim()));
    }
    let mut out = TruncatedOperator::zeros(q.dim());
    for (coef, word) in &poly.terms {
        let m = word.iter().fold(TruncatedOperator::identity(q.dim()), |acc, s| match s {
            Quadrature::Q => &acc * q,
            Quadrature::P => &acc * p,
        });
        out = &out + &m.scale(*coef);
    }
    Ok(out)
}

/// Letter of the observable mini-language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    A,
    Ad,
    Q,
    P,
}

/// Linear combination of words over `a`, `a^dagger`, `q`, `p`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Observable {
    pub terms: Vec<(C64, Vec<Symbol>)>,
}

impl Observable {
    pub fn single(coef: C64, word: Vec<Symbol>) -> Self {
        Self { terms: vec![(coef, word)] }
    }

    /// Adds `coef * word`, where `word` is a space-separated string like `"ad a q"`.
    pub fn push_parsed(&mut self, coef: C64, word: &str) -> Result<()> {
        self.terms.push((coef, parse_word(word)?));
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }

    /// Builds the observable from a ladder pair; `q`, `p` are derived from it.
    pub fn matrix(&self, ann: &TruncatedOperator, cre: &TruncatedOperator) -> TruncatedOperator {
        let (q, p) = quadratures(ann, cre);
        let mut out = TruncatedOperator::zeros(ann.dim());
        for (coef, word) in &self.terms {
            let m = word.iter().fold(TruncatedOperator::identity(ann.dim()), |acc, s| match s {
                Symbol::A => &acc * ann,
                Symbol::Ad => &acc * cre,
                Symbol::Q => &acc * &q,
                Symbol::P => &acc * &p,
            });
            out = &out + &m.scale(*coef);
        }
        out
    }

    /// Exact compression to `dim` levels of the observable built from the
    /// (deformed) ladder of `ens` at `x`.
    pub fn compressed(&self, ens: Ensemble, x: f64, dim: usize) -> Result<TruncatedOperator> {
        let work = dim + self.degree();
        let l = ensemble_ladder(ens, x, work)?;
        Ok(self.matrix(&l.annihilator, &l.creator).resized(dim))
    }
}

impl From<&OperatorWord> for Observable {
    fn from(w: &OperatorWord) -> Self {
        let word = w
            .letters
            .iter()
            .map(|l| match l {
                Letter::Create => Symbol::Ad,
                Letter::Annihilate => Symbol::A,
            })
            .collect();
        Self::single(c(1.0), word)
    }
}

impl From<&CanonicalPolynomial> for Observable {
    fn from(p: &CanonicalPolynomial) -> Self {
        let terms = p
            .terms
            .iter()
            .map(|(coef, w)| {
                (*coef, w.iter().map(|s| if *s == Quadrature::Q { Symbol::Q } else { Symbol::P }).collect())
            })
            .collect();
        Self { terms }
    }
}

fn parse_word(s: &str) -> Result<Vec<Symbol>> {
    s.split_whitespace()
        .filter(|t| *t != "1")
        .map(|t| match t {
            "a" => Ok(Symbol::A),
            "ad" | "adag" => Ok(Symbol::Ad),
            "q" => Ok(Symbol::Q),
            "p" => Ok(Symbol::P),
            other => Err(Error::Parse(format!("unknown symbol `{other}` (expected a, ad, q or p)"))),
        })
        .collect()
}

impl FromStr for Observable {
    type Err = Error;

    /// Terms joined by `+`, each an optional real coefficient followed by a word,
    /// e.g. `"ad a + 0.5 q q"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut obs = Self::default();
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in `{s}`")));
            }
            let (coef, word) = match term.split_once(char::is_whitespace) {
                Some((head, rest)) if head.parse::<f64>().is_ok() => (head.parse::<f64>().unwrap_or(1.0), rest),
                _ => match term.parse::<f64>() {
                    Ok(v) => (v, ""),
                    Err(_) => (1.0, term),
                },
            };
            obs.push_parsed(c(coef), word)?;
        }
        Ok(obs)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(coef, w)| {
                let word = if w.is_empty() {
                    "1".to_string()
                } else {
                    w.iter()
                        .map(|s| match s {
                            Symbol::A => "a",
                            Symbol::Ad => "ad",
                            Symbol::Q => "q",
                            Symbol::P => "p",
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                if *coef == c(1.0) {
                    word
                } else {
                    format!("({}{:+}i)*{}", coef.re, coef.im, word)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Optional quadratic dynamics `(H, t)` applied before measuring.
pub type Dynamics<'a> = Option<(&'a QuadraticHamiltonian, f64)>;

/// `sum_j w_j Tr(U rho_j U^dagger O_M(x_j))`, summed in ascending `2j`.
pub fn expectation_finite(state: &PermInvariantState, obs: &Observable, dynamics: Dynamics<'_>) -> Result<C64> {
    let mut acc = C64::default();
    for b in state.blocks() {
        let x = b.index.x();
        let rho = match dynamics {
            Some((h, t)) => evolve_block(&b.rho, h, state.m(), x, t)?,
            None => b.rho.clone(),
        };
        let o = obs.compressed(Ensemble::Finite(state.m()), x, rho.dim())?;
        acc += rho.trace_product(&o) * b.weight;
    }
    Ok(acc)
}

/// `Tr(U_lambda rho U_lambda^dagger f(sqrt(lambda) a, sqrt(lambda) a^dagger))`.
pub fn expectation_limit(rho: &TruncatedOperator, lambda: f64, obs: &Observable, dynamics: Dynamics<'_>) -> Result<C64> {
    let evolved = match dynamics {
        Some((h, t)) => limit_evolution(rho, lambda, h, t)?,
        None => rho.clone(),
    };
    let o = obs.compressed(Ensemble::Limit, lambda, evolved.dim())?;
    Ok(evolved.trace_product(&o))
}

/// `Tr(rho_M [Q_M, P_M]) - i lambda`, using `[Q_M, P_M] = i 2 L3 / M` per block.
///
/// The imaginary part is assembled as `(sum_j w_j (2j - 2<n>) - lambda M) / M`, so
/// it vanishes exactly when every block sits at `2j = lambda M` with `<n> = 0`.
pub fn commutator_residual(state: &PermInvariantState, lambda: f64) -> C64 {
    let m = state.m() as f64;
    let mut acc = 0.0;
    for b in state.blocks() {
        let mean_n: f64 = (0..b.rho.dim()).map(|n| n as f64 * b.rho.get(n, n).re).sum();
        acc += b.weight * (b.index.two_j() as f64 - 2.0 * mean_n);
    }
    I * ((acc - lambda * m) / m)
}

/// Same quantity from the explicit commutator matrix, for cross-checks.
pub fn commutator_expectation(state: &PermInvariantState) -> C64 {
    let mut acc = C64::default();
    for b in state.blocks() {
        let diag = commutator_diagonal(b.index);
        let tr: f64 = (0..b.rho.dim()).map(|n| diag[n] * b.rho.get(n, n).re).sum();
        acc += I * (tr * b.weight);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::canonical_operators;
    use crate::states::single_block_sequence;
    use crate::tol::TIGHT;

    #[test]
    fn word_matrix_examples() {
        let ops = canonical_operators(5).unwrap();
        let id = word_matrix(&OperatorWord::default(), &ops.annihilator, &ops.creator).unwrap();
        assert_eq!(id, TruncatedOperator::identity(5));
        let n = word_matrix(&OperatorWord::from_signs(&[1, -1]), &ops.annihilator, &ops.creator).unwrap();
        assert!(n.max_abs_diff(&ops.number) < TIGHT);
        let aad = word_matrix(&OperatorWord::from_signs(&[-1, 1]), &ops.annihilator, &ops.creator).unwrap();
        let comm = &aad - &n;
        for k in 0..4 {
            assert!((comm.get(k, k) - c(1.0)).norm() < TIGHT);
        }
    }

    #[test]
    fn polynomial_examples() {
        let ops = canonical_operators(6).unwrap();
        let (q, p) = (&ops.position, &ops.momentum);
        let poly = CanonicalPolynomial {
            terms: vec![(c(1.0), vec![Quadrature::Q, Quadrature::P]), (c(-1.0), vec![Quadrature::P, Quadrature::Q])],
        };
        let m = polynomial_matrix(&poly, q, p).unwrap();
        for k in 0..5 {
            assert!((m.get(k, k) - I).norm() < TIGHT);
        }
        let ops4 = canonical_operators(4).unwrap();
        let q2 = polynomial_matrix(&CanonicalPolynomial::monomial(vec![Quadrature::Q, Quadrature::Q]), &ops4.position, &ops4.momentum).unwrap();
        assert!((q2.get(0, 0) - c(0.5)).norm() < TIGHT);
        let scaled = ops.position.scale(c(0.5));
        let lin = polynomial_matrix(&CanonicalPolynomial::monomial(vec![Quadrature::Q]), &scaled, p).unwrap();
        assert!(lin.max_abs_diff(&ops.position.scale(c(0.5))) < TIGHT);
    }

    #[test]
    fn parse_and_display() {
        let o: Observable = "ad a ad a".parse().unwrap();
        assert_eq!(o.terms[0].1, vec![Symbol::Ad, Symbol::A, Symbol::Ad, Symbol::A]);
        assert_eq!(o.to_string(), "ad a ad a");
        assert!("ad b".parse::<Observable>().is_err());
        assert_eq!("1".parse::<Observable>().unwrap().degree(), 0);
        let sum: Observable = "ad a + 0.5 q q + 2".parse().unwrap();
        assert_eq!(sum.terms.len(), 3);
        assert_eq!(sum.terms[1], (c(0.5), vec![Symbol::Q, Symbol::Q]));
        assert_eq!(sum.terms[2], (c(2.0), vec![]));
        assert!("a +".parse::<Observable>().is_err());
    }

    #[test]
    fn words_enumerate() {
        assert_eq!(OperatorWord::all_of_degree(3).len(), 8);
        assert_eq!(OperatorWord::all_up_to_degree(4).len(), 31);
        assert_eq!(OperatorWord::from_signs(&[1, 1, -1]).weight(), 1);
    }

    #[test]
    fn finite_expectation_examples() {
        let number: Observable = "ad a".parse().unwrap();
        let vac = TruncatedOperator::outer(1, 0, 0);
        for m in [1, 5, 64] {
            let s = single_block_sequence(&vac, 1.0, m).unwrap();
            assert_eq!(expectation_finite(&s, &number, None).unwrap(), C64::default());
        }
        let psi2 = TruncatedOperator::outer(3, 2, 2);
        let s = single_block_sequence(&psi2, 1.0, 100).unwrap();
        let v = expectation_finite(&s, &number, None).unwrap();
        assert!((v - c(1.98)).norm() < TIGHT);
    }

    #[test]
    fn limit_expectation_examples() {
        let number: Observable = "ad a".parse().unwrap();
        let psi2 = TruncatedOperator::outer(3, 2, 2);
        assert!((expectation_limit(&psi2, 1.0, &number, None).unwrap() - c(2.0)).norm() < TIGHT);
        assert!((expectation_limit(&psi2, 0.5, &number, None).unwrap() - c(1.0)).norm() < TIGHT);
        let phi = TruncatedOperator::pure(&[c(1.0), c(1.0)]).unwrap();
        let a: Observable = "a".parse().unwrap();
        let h = QuadraticHamiltonian::harmonic();
        let t = 0.07;
        let v = expectation_limit(&phi, 1.0, &a, Some((&h, t))).unwrap();
        assert!((v - C64::from_polar(0.5, -t)).norm() < 1e-10);
    }

    #[test]
    fn commutator_residual_examples() {
        let vac = TruncatedOperator::outer(1, 0, 0);
        let psi1 = TruncatedOperator::outer(2, 1, 1);
        for (lambda, m) in [(0.5, 16u32), (0.25, 64), (1.0, 4), (0.5, 100)] {
            let s = single_block_sequence(&vac, lambda, m).unwrap();
            assert_eq!(commutator_residual(&s, lambda), C64::default());
            let s1 = single_block_sequence(&psi1, lambda, m).unwrap();
            let r = commutator_residual(&s1, lambda);
            assert!((r - I * (-2.0 / m as f64)).norm() < 1e-15);
            assert!((commutator_expectation(&s1) - I * lambda - r).norm() < 1e-14);
        }
    }
}
