//! Named limit states and matrix-element input.

use crate::error::{Error, Result};
use crate::fock::TruncatedOperator;
use crate::{c, C64};

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
}

/// Parses `fock:n`, `superposition:c0,c1,...`, `coherent:re,im` or `thermal:nbar:D`.
pub fn parse_state(spec: &str) -> Result<TruncatedOperator> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("state `{spec}` has no `kind:` prefix")))?;
    match kind.trim() {
        "fock" => {
            let n: usize = number(args, "Fock index")?;
            Ok(TruncatedOperator::outer(n + 1, n, n))
        }
        "superposition" => {
            let amps = args
                .split(',')
                .map(|s| number::<f64>(s, "amplitude").map(c))
                .collect::<Result<Vec<C64>>>()?;
            TruncatedOperator::pure(&amps)
        }
        "coherent" => {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("coherent state needs `re,im`, got `{args}`")));
            }
            let alpha = C64::new(number(parts[0], "real part")?, number(parts[1], "imaginary part")?);
            coherent(alpha)
        }
        "thermal" => {
            let parts: Vec<&str> = args.split(':').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("thermal state needs `nbar:D`, got `{args}`")));
            }
            let nbar: f64 = number(parts[0], "mean occupation")?;
            let dim: usize = number(parts[1], "dimension")?;
            thermal(nbar, dim)
        }
        other => Err(Error::Parse(format!("unknown state kind `{other}`"))),
    }
}

/// Coherent state truncated where the Poisson tail is below double precision, then
/// renormalized.
fn coherent(alpha: C64) -> Result<TruncatedOperator> {
    let r = alpha.norm();
    let dim = (r * r + 12.0 * r + 30.0).ceil() as usize;
    let mut amps = Vec::with_capacity(dim);
    let mut a = c((-r * r / 2.0).exp());
    for n in 0..dim {
        if n > 0 {
            a = a * alpha / (n as f64).sqrt();
        }
        amps.push(a);
    }
    TruncatedOperator::pure(&amps)
}

fn thermal(nbar: f64, dim: usize) -> Result<TruncatedOperator> {
    if !(nbar >= 0.0) || dim == 0 {
        return Err(Error::InvalidArgument(format!("thermal state needs nbar >= 0 and D >= 1, got {nbar}, {dim}")));
    }
    let r = nbar / (nbar + 1.0);
    let diag: Vec<f64> = (0..dim as i32).map(|n| r.powi(n)).collect();
    let total: f64 = diag.iter().sum();
    Ok(TruncatedOperator::from_real_diagonal(&diag.iter().map(|d| d / total).collect::<Vec<_>>()))
}

/// Density from `(n, m, re, im)` entries; must be Hermitian, trace one and positive.
pub fn state_from_elements(elements: &[(usize, usize, f64, f64)]) -> Result<TruncatedOperator> {
    let dim = elements.iter().map(|e| e.0.max(e.1) + 1).max().ok_or(Error::ZeroDimension)?;
    let mut rho = nalgebra::DMatrix::zeros(dim, dim);
    for &(n, m, re, im) in elements {
        rho[(n, m)] = C64::new(re, im);
    }
    let rho = TruncatedOperator::from_matrix(rho)?;
    rho.check_density()?;
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        assert_eq!(parse_state("fock:2").unwrap(), TruncatedOperator::outer(3, 2, 2));
        let s = parse_state("superposition:1,1").unwrap();
        assert!((s.get(0, 1).re - 0.5).abs() < 1e-15);
        let coh = parse_state("coherent:1.0,0.5").unwrap();
        coh.check_density().unwrap();
        let n: f64 = (0..coh.dim()).map(|k| k as f64 * coh.get(k, k).re).sum();
        assert!((n - 1.25).abs() < 1e-12);
        let th = parse_state("thermal:1:3").unwrap();
        assert!((th.get(0, 0).re - 4.0 / 7.0).abs() < 1e-15);
        assert!(parse_state("squeezed:1").is_err());
        assert!(parse_state("fock").is_err());
        assert!(parse_state("fock:x").is_err());
    }

    #[test]
    fn elements_build_density() {
        let rho = state_from_elements(&[(0, 0, 0.5, 0.0), (1, 1, 0.5, 0.0), (0, 1, 0.0, 0.5), (1, 0, 0.0, -0.5)]).unwrap();
        assert_eq!(rho.dim(), 2);
        assert!(state_from_elements(&[(0, 0, 2.0, 0.0)]).is_err());
        assert!(state_from_elements(&[]).is_err());
    }
}
