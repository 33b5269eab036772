//! Model files: a TOML list of `[[state]]` tables plus an optional `[tail]` block.
//!
//! ```toml
//! name = "example"
//!
//! [[state]]
//! family = "zeta"          # linear_fractional | poisson | bounded | zeta
//! beta = 2.5
//! zero_mass = 0.0
//! probability = 0.5
//!
//! [[state]]
//! family = "bounded"
//! pmf = [0.0, 0.4, 0.6]
//! probability = 0.5
//!
//! [tail]
//! beta = 2.5
//! d = 1.0
//! ```

use std::path::Path;

use serde::Deserialize;

use super::env::EnvironmentModel;
use super::law::OffspringLaw;
use super::tail::TailAssumption;
use crate::error::{Error, Result};

/// Tolerance on the sum of state probabilities read from a file.
pub const FILE_PROB_TOL: f64 = 1e-9;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    name: Option<String>,
    #[serde(rename = "state", default)]
    states: Vec<StateSpec>,
    tail: Option<TailSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSpec {
    family: String,
    probability: f64,
    zero_mass: Option<f64>,
    q: Option<f64>,
    rate: Option<f64>,
    pmf: Option<Vec<f64>>,
    beta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailSpec {
    beta: f64,
    d: f64,
}

/// A parsed model file.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub env: EnvironmentModel,
    pub tail: Option<TailAssumption>,
}

impl Model {
    /// Tail exponent to use for the rate function: the declared one, else the
    /// heaviest power-law state.
    pub fn beta(&self) -> Option<f64> {
        self.tail
            .map(|t| t.beta)
            .or_else(|| self.env.heavy_tail_exponent())
    }
}

fn required(value: Option<f64>, family: &str, key: &str, idx: usize) -> Result<f64> {
    value.ok_or_else(|| Error::Config(format!("state {idx} ({family}) is missing `{key}`")))
}

impl StateSpec {
    fn build(&self, idx: usize) -> Result<OffspringLaw> {
        let fam = self.family.as_str();
        let allowed: &[&str] = match fam {
            "linear_fractional" => &["zero_mass", "q"],
            "poisson" => &["rate"],
            "bounded" => &["pmf"],
            "zeta" => &["beta", "zero_mass"],
            other => {
                return Err(Error::Config(format!(
                    "state {idx}: unknown family `{other}`"
                )))
            }
        };
        let present = [
            ("zero_mass", self.zero_mass.is_some()),
            ("q", self.q.is_some()),
            ("rate", self.rate.is_some()),
            ("pmf", self.pmf.is_some()),
            ("beta", self.beta.is_some()),
        ];
        if let Some((key, _)) = present
            .iter()
            .find(|(key, set)| *set && !allowed.contains(key))
        {
            return Err(Error::Config(format!(
                "state {idx}: parameter `{key}` does not apply to family `{fam}`"
            )));
        }
        let law =
            match fam {
                "linear_fractional" => OffspringLaw::linear_fractional(
                    required(self.zero_mass, fam, "zero_mass", idx)?,
                    required(self.q, fam, "q", idx)?,
                ),
                "poisson" => OffspringLaw::poisson(required(self.rate, fam, "rate", idx)?),
                "bounded" => OffspringLaw::bounded(self.pmf.clone().ok_or_else(|| {
                    Error::Config(format!("state {idx} (bounded) is missing `pmf`"))
                })?),
                _ => OffspringLaw::zeta(
                    required(self.beta, fam, "beta", idx)?,
                    self.zero_mass.unwrap_or(0.0),
                ),
            };
        law.map_err(|e| Error::Config(format!("state {idx}: {e}")))
    }
}

/// Parses a model from TOML text.
pub fn parse_model(text: &str) -> Result<Model> {
    let file: ModelFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if file.states.is_empty() {
        return Err(Error::Config("model declares no [[state]] entries".into()));
    }
    let mut states = Vec::with_capacity(file.states.len());
    for (i, spec) in file.states.iter().enumerate() {
        states.push((spec.build(i)?, spec.probability));
    }
    let env = EnvironmentModel::with_tolerance(states, FILE_PROB_TOL)
        .map_err(|e| Error::Config(e.to_string()))?;
    let tail = file
        .tail
        .map(|t| TailAssumption::new(t.beta, t.d))
        .transpose()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(Model {
        name: file.name.unwrap_or_else(|| "model".into()),
        env,
        tail,
    })
}

/// Reads and parses a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}
