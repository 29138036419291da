//! Experiment configuration (JSON) and its validation.

use std::path::{Path, PathBuf};

use fluctlim::dynamics::{check_time, QuadraticHamiltonian};
use fluctlim::fock::TruncatedOperator;
use fluctlim::moments::Observable;
use fluctlim::states::{parse_state, state_from_elements};
use fluctlim::C64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Moments,
    Dynamics,
    Bounds,
    Decompose,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Moments => "moments",
            Kind::Dynamics => "dynamics",
            Kind::Bounds => "bounds",
            Kind::Decompose => "decompose",
        }
    }
}

/// A preset string or explicit `[n, m, re, im]` matrix elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset(String),
    Elements(Vec<(usize, usize, f64, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MsSpec {
    List(Vec<u32>),
    Range { range: (u32, u32) },
    PowersOfTwo { powers_of_two: (u32, u32) },
}

impl MsSpec {
    pub fn expand(&self) -> Result<Vec<u32>, CliError> {
        let ms: Vec<u32> = match self {
            MsSpec::List(v) => v.clone(),
            MsSpec::Range { range: (lo, hi) } => (*lo..=*hi).collect(),
            MsSpec::PowersOfTwo { powers_of_two: (lo, hi) } => {
                if *hi > 31 {
                    return Err(CliError::Config(format!("power of two exponent {hi} too large")));
                }
                (*lo..=*hi).map(|k| 1u32 << k).collect()
            }
        };
        if ms.is_empty() {
            return Err(CliError::Config("empty qubit-count list".into()));
        }
        if ms.contains(&0) {
            return Err(CliError::Config("qubit counts must be positive".into()));
        }
        if ms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("qubit counts must be strictly ascending".into()));
        }
        Ok(ms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: [f64; 2],
    pub word: String,
}

/// A text form like `"ad a + 0.5 q q"` or an explicit term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    Text(String),
    Terms(Vec<Term>),
}

impl ObservableSpec {
    pub fn build(&self) -> Result<Observable, CliError> {
        match self {
            ObservableSpec::Text(s) => s.parse().map_err(CliError::from_core),
            ObservableSpec::Terms(terms) => {
                if terms.is_empty() {
                    return Err(CliError::Config("observable with no terms".into()));
                }
                let mut obs = Observable::default();
                for t in terms {
                    obs.push_parsed(C64::new(t.coef[0], t.coef[1]), &t.word).map_err(CliError::from_core)?;
                }
                Ok(obs)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "default_slope_tol")]
    pub slope_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default = "default_expected_slope")]
    pub expected_slope: f64,
    #[serde(default)]
    pub error_constant: Option<f64>,
}

fn default_slope_tol() -> Option<f64> {
    Some(0.1)
}

fn default_expected_slope() -> f64 {
    -1.0
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self { slope_tol: default_slope_tol(), abs_tol: None, expected_slope: -1.0, error_constant: None }
    }
}

/// Names accepted in `suites` for bounds runs.
pub const SUITES: [&str; 6] = ["beta", "hermite", "moment", "tail", "uniform", "strong"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub state: Option<StateSpec>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub ms: Option<MsSpec>,
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    #[serde(default)]
    pub hamiltonian: Option<[[f64; 2]; 4]>,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub d_max: Option<usize>,
    /// Bound suites to run; all of them when absent.
    #[serde(default)]
    pub suites: Option<Vec<String>>,
    /// Random states per `M` in decompose runs.
    #[serde(default)]
    pub samples: Option<usize>,
}

/// Everything a run needs, checked against the kind-specific requirements.
#[derive(Debug, Clone)]
pub struct Validated {
    pub kind: Kind,
    pub state: Option<TruncatedOperator>,
    pub lambda: f64,
    pub ms: Vec<u32>,
    pub observables: Vec<Observable>,
    pub hamiltonian: Option<QuadraticHamiltonian>,
    pub times: Vec<f64>,
    pub suites: Vec<String>,
    pub samples: usize,
}

fn require<T: Clone>(v: &Option<T>, field: &str, kind: Kind) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("`{field}` is required for {} runs", kind.as_str())))
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn validate(&self) -> Result<Validated, CliError> {
        let kind = self.kind;
        let needs_limit = matches!(kind, Kind::Moments | Kind::Dynamics);
        let lambda = match (kind, self.lambda) {
            (Kind::Bounds, l) => l.unwrap_or(1.0),
            (_, l) => require(&l, "lambda", kind)?,
        };
        if needs_limit && !(lambda > 0.0 && lambda <= 1.0) {
            return Err(CliError::Config(format!(
                "lambda = {lambda} is outside (0, 1]: the limit system of {} runs is only defined for \
                 0 < lambda <= 1, and at lambda = 0 every limit observable vanishes",
                kind.as_str()
            )));
        }
        if kind == Kind::Decompose && !(0.0..=1.0).contains(&lambda) {
            return Err(CliError::Config(format!("lambda = {lambda} is outside [0, 1]")));
        }

        let state = if needs_limit {
            let spec = require(&self.state, "state", kind)?;
            let rho = match &spec {
                StateSpec::Preset(s) => parse_state(s),
                StateSpec::Elements(e) => state_from_elements(e),
            }
            .map_err(CliError::from_core)?;
            rho.check_density().map_err(CliError::from_core)?;
            Some(rho)
        } else {
            None
        };

        let ms = match kind {
            Kind::Bounds => Vec::new(),
            _ => require(&self.ms, "ms", kind)?.expand()?,
        };
        if kind == Kind::Decompose {
            if let Some(&m) = ms.iter().find(|&&m| m > fluctlim::qubits::MAX_QUBITS) {
                return Err(CliError::Config(format!(
                    "decompose runs build 2^M matrices and accept M <= {}, got {m}",
                    fluctlim::qubits::MAX_QUBITS
                )));
            }
        }

        let observables = self.observables.iter().map(ObservableSpec::build).collect::<Result<Vec<_>, _>>()?;
        if kind != Kind::Bounds && observables.is_empty() {
            return Err(CliError::Config(format!("`observables` is required for {} runs", kind.as_str())));
        }

        let hamiltonian = match &self.hamiltonian {
            Some(c) => {
                let z = |k: usize| C64::new(c[k][0], c[k][1]);
                Some(QuadraticHamiltonian::new(z(0), z(1), z(2), z(3)).map_err(|e| {
                    CliError::Config(format!("hamiltonian coefficients are not self-adjoint ({e})"))
                })?)
            }
            None => None,
        };
        if kind == Kind::Dynamics {
            let h = require(&hamiltonian, "hamiltonian", kind)?;
            if self.times.is_empty() {
                return Err(CliError::Config("`times` is required for dynamics runs".into()));
            }
            for &t in &self.times {
                check_time(&h, t).map_err(CliError::from_core)?;
            }
        }

        let suites = match &self.suites {
            Some(s) => {
                if let Some(bad) = s.iter().find(|n| !SUITES.contains(&n.as_str())) {
                    return Err(CliError::Config(format!("unknown suite `{bad}` (known: {})", SUITES.join(", "))));
                }
                s.clone()
            }
            None => SUITES.iter().map(|s| s.to_string()).collect(),
        };

        Ok(Validated {
            kind,
            state,
            lambda,
            ms,
            observables,
            hamiltonian,
            times: self.times.clone(),
            suites,
            samples: self.samples.unwrap_or(5),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ms_forms() {
        let r: MsSpec = serde_json::from_str(r#"{"range":[3,6]}"#).unwrap();
        assert_eq!(r.expand().unwrap(), vec![3, 4, 5, 6]);
        let p: MsSpec = serde_json::from_str(r#"{"powers_of_two":[4,6]}"#).unwrap();
        assert_eq!(p.expand().unwrap(), vec![16, 32, 64]);
        let l: MsSpec = serde_json::from_str("[8, 4]").unwrap();
        assert!(l.expand().is_err());
    }

    #[test]
    fn moments_config_validates() {
        let c = ExperimentConfig::from_json(
            r#"{"kind":"moments","state":"fock:2","lambda":1.0,"ms":{"range":[16,20]},
                "observables":[[{"coef":[1,0],"word":"ad a"}], "q q"]}"#,
        )
        .unwrap();
        let v = c.validate().unwrap();
        assert_eq!(v.observables.len(), 2);
        assert_eq!(v.ms.len(), 5);
    }

    #[test]
    fn lambda_zero_is_rejected() {
        let c = ExperimentConfig::from_json(
            r#"{"kind":"moments","state":"fock:2","lambda":0.0,"ms":[16],"observables":["a"]}"#,
        )
        .unwrap();
        let e = c.validate().unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("(0, 1]"));
    }

    #[test]
    fn non_hermitian_dynamics_rejected() {
        let c = ExperimentConfig::from_json(
            r#"{"kind":"dynamics","state":"fock:0","lambda":0.5,"ms":[16],"observables":["a"],
                "hamiltonian":[[1,0],[0,0],[0,0],[0,1]],"times":[0.01]}"#,
        )
        .unwrap();
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"moments","bogus":1}"#).is_err());
    }
}
