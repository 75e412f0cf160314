//! Configuration files.
//!
//! Configurations are TOML documents with exactly one model section and an
//! optional sweep section:
//!
//! ```toml
//! [model2]            # or [model1]
//! n = 80
//! epsilon = 0.5
//! seed = 7            # master seed; drawn from the OS when absent
//!
//! [sweep]             # optional: turns the file into a parameter sweep
//! ratio = 2.0         # size-to-interactions ratio for mode = fixed-ratio
//! [sweep.axes]
//! epsilon = [0.2, 0.5, 1.0, 2.0]
//! ```
//!
//! Keys inside a model section are the same keys accepted by `--set` on the
//! command line; see [`ModelConfig::set`]. Every key is optional and missing
//! keys take the documented defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reinforcement::Model1Config;
use crate::sweep::{Axis, SweepSpec};
use crate::tribes::Model2Config;

pub const MODEL1_KEYS: &[&str] = &[
    "n", "shocks", "periods", "p", "reward", "initial_fitness", "m0", "m", "shuffle_arrival", "replications", "seed",
];
pub const MODEL2_KEYS: &[&str] = &[
    "n", "shocks", "periods", "alpha", "epsilon", "kernel", "out_weight", "group_gap", "strict_eq4", "rewire_endpoint", "m0",
    "m", "shuffle_arrival", "replications", "seed",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelConfig {
    Model1(Model1Config),
    Model2(Model2Config),
}

fn parse<T: std::str::FromStr>(field: &str, value: &str, expected: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::validation(field, format!("expected {expected}, got `{value}`")))
}

impl ModelConfig {
    pub fn n(&self) -> usize {
        match self {
            ModelConfig::Model1(c) => c.n,
            ModelConfig::Model2(c) => c.n,
        }
    }

    pub fn replications(&self) -> usize {
        match self {
            ModelConfig::Model1(c) => c.replications,
            ModelConfig::Model2(c) => c.replications,
        }
    }

    pub fn master_seed(&self) -> u64 {
        match self {
            ModelConfig::Model1(c) => c.master_seed,
            ModelConfig::Model2(c) => c.master_seed,
        }
    }

    pub fn section(&self) -> &'static str {
        match self {
            ModelConfig::Model1(_) => "model1",
            ModelConfig::Model2(_) => "model2",
        }
    }

    pub fn keys(&self) -> &'static [&'static str] {
        match self {
            ModelConfig::Model1(_) => MODEL1_KEYS,
            ModelConfig::Model2(_) => MODEL2_KEYS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::Model1(c) => c.validate(),
            ModelConfig::Model2(c) => c.validate(),
        }
    }

    /// Assign one key from its textual value. Does not validate cross-field
    /// invariants; call [`ModelConfig::validate`] afterwards.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        const COUNT: &str = "a nonnegative integer";
        const REAL: &str = "a number";
        const BOOL: &str = "true or false";
        match self {
            ModelConfig::Model1(c) => match key {
                "n" => c.n = parse(key, value, COUNT)?,
                "shocks" => c.shocks = parse(key, value, COUNT)?,
                "periods" => c.periods = parse(key, value, COUNT)?,
                "p" => c.scheme.p = parse(key, value, REAL)?,
                "reward" => c.scheme.reward = parse(key, value, REAL)?,
                "initial_fitness" => c.initial_fitness = parse(key, value, REAL)?,
                "m0" => c.bb.m0 = parse(key, value, COUNT)?,
                "m" => c.bb.m = parse(key, value, COUNT)?,
                "shuffle_arrival" => c.bb.shuffle_arrival = parse(key, value, BOOL)?,
                "replications" => c.replications = parse(key, value, COUNT)?,
                "seed" => c.master_seed = parse(key, value, "a 64-bit unsigned integer")?,
                _ => return Err(unknown_key(key, MODEL1_KEYS)),
            },
            ModelConfig::Model2(c) => match key {
                "n" => c.n = parse(key, value, COUNT)?,
                "shocks" => c.shocks = parse(key, value, COUNT)?,
                "periods" => c.periods = parse(key, value, COUNT)?,
                "alpha" => c.alpha = parse(key, value, REAL)?,
                "epsilon" => c.epsilon = parse(key, value, REAL)?,
                "kernel" => c.kernel = value.trim().parse()?,
                "out_weight" => c.out_weight = parse(key, value, REAL)?,
                "group_gap" => c.group_gap = parse(key, value, REAL)?,
                "strict_eq4" => c.strict_eq4 = parse(key, value, BOOL)?,
                "rewire_endpoint" => c.rewire_endpoint = value.trim().parse()?,
                "m0" => c.bb.m0 = parse(key, value, COUNT)?,
                "m" => c.bb.m = parse(key, value, COUNT)?,
                "shuffle_arrival" => c.bb.shuffle_arrival = parse(key, value, BOOL)?,
                "replications" => c.replications = parse(key, value, COUNT)?,
                "seed" => c.master_seed = parse(key, value, "a 64-bit unsigned integer")?,
                _ => return Err(unknown_key(key, MODEL2_KEYS)),
            },
        }
        Ok(())
    }
}

fn unknown_key(key: &str, known: &[&str]) -> Error {
    Error::validation(key, format!("unknown key; expected one of {}", known.join(", ")))
}

/// Parse a `key=value` override.
pub fn parse_override(text: &str) -> Result<(String, String)> {
    match text.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(Error::InvalidArgument(format!("override `{text}` is not of the form key=value"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigKind {
    Model1(Model1Config),
    Model2(Model2Config),
    Sweep(SweepSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedConfig {
    pub kind: ConfigKind,
    /// Model keys that were absent and took their default.
    pub defaulted: Vec<&'static str>,
    /// Whether the file fixed the master seed.
    pub seed_given: bool,
}

impl LoadedConfig {
    pub fn model(&self) -> ModelConfig {
        match &self.kind {
            ConfigKind::Model1(c) => ModelConfig::Model1(c.clone()),
            ConfigKind::Model2(c) => ModelConfig::Model2(c.clone()),
            ConfigKind::Sweep(s) => s.base.clone(),
        }
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn scalar_text(field: &str, value: &toml::Value) -> Result<String> {
    match value {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(Error::validation(field, format!("expected a scalar, got {}", other.type_str()))),
    }
}

/// Parse configuration text; `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<LoadedConfig> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        Error::Parse {
            path: origin.to_string(),
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;

    for key in doc.keys() {
        if !matches!(key.as_str(), "model1" | "model2" | "sweep") {
            return Err(Error::validation(key, "unknown section; expected [model1], [model2] or [sweep]"));
        }
    }
    let (mut model, section) = match (doc.get("model1"), doc.get("model2")) {
        (Some(t), None) => (ModelConfig::Model1(Model1Config::default()), t),
        (None, Some(t)) => (ModelConfig::Model2(Model2Config::default()), t),
        (Some(_), Some(_)) => return Err(Error::validation("model", "give exactly one of [model1] or [model2]")),
        (None, None) => return Err(Error::validation("model", "missing [model1] or [model2] section")),
    };
    let section = section
        .as_table()
        .ok_or_else(|| Error::validation(model.section(), "must be a table"))?;

    for (key, value) in section {
        model.set(key, &scalar_text(key, value)?)?;
    }
    let defaulted: Vec<&'static str> = model
        .keys()
        .iter()
        .copied()
        .filter(|k| !section.contains_key(*k))
        .collect();
    let seed_given = section.contains_key("seed");
    model.validate()?;

    let kind = match doc.get("sweep") {
        None => match model {
            ModelConfig::Model1(c) => ConfigKind::Model1(c),
            ModelConfig::Model2(c) => ConfigKind::Model2(c),
        },
        Some(sweep) => ConfigKind::Sweep(parse_sweep(model, sweep)?),
    };
    Ok(LoadedConfig { kind, defaulted, seed_given })
}

fn parse_sweep(base: ModelConfig, sweep: &toml::Value) -> Result<SweepSpec> {
    let table = sweep.as_table().ok_or_else(|| Error::validation("sweep", "must be a table"))?;
    let mut spec = SweepSpec::single(base);
    for (key, value) in table {
        match key.as_str() {
            "ratio" => {
                let text = scalar_text("sweep.ratio", value)?;
                spec.ratio = Some(parse("sweep.ratio", &text, "a number")?);
            }
            "axes" => {
                let axes = value
                    .as_table()
                    .ok_or_else(|| Error::validation("sweep.axes", "must be a table"))?;
                for (name, values) in axes {
                    let field = format!("sweep.axes.{name}");
                    let list = values
                        .as_array()
                        .ok_or_else(|| Error::validation(&field, "must be an array"))?;
                    let values = list.iter().map(|v| scalar_text(&field, v)).collect::<Result<Vec<_>>>()?;
                    spec.axes.push(Axis { key: name.clone(), values });
                }
            }
            other => return Err(Error::validation(format!("sweep.{other}"), "unknown key; expected ratio or axes")),
        }
    }
    // surface bad axis values now rather than mid-run
    spec.grid()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tribes::Kernel;

    #[test]
    fn minimal_model2_takes_defaults() {
        let loaded = parse_config("[model2]\nn = 40\nepsilon = 1.5\n", "mem").unwrap();
        let ConfigKind::Model2(c) = &loaded.kind else { panic!("wrong kind") };
        assert_eq!((c.n, c.epsilon), (40, 1.5));
        assert_eq!((c.alpha, c.out_weight, c.bb.m0, c.bb.m), (0.9, 0.01, 3, 2));
        assert_eq!(c.kernel, Kernel::Reciprocal);
        assert!(loaded.defaulted.contains(&"alpha"));
        assert!(!loaded.defaulted.contains(&"epsilon"));
        assert!(!loaded.seed_given);
    }

    #[test]
    fn invariant_violation_names_field() {
        let err = parse_config("[model2]\nalpha = 1.5\n", "mem").unwrap_err();
        assert_eq!(err.to_string(), "invalid value for `alpha`: alpha ∈ (0,1)");
        let err = parse_config("[model1]\nn = \"many\"\n", "mem").unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "n"));
        let err = parse_config("[model1]\nbogus = 1\n", "mem").unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "bogus"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_config("[model1]\nn = 10\nshocks = = 3\n", "cfg.toml").unwrap_err();
        match err {
            Error::Parse { path, line, .. } => {
                assert_eq!(path, "cfg.toml");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn section_rules() {
        assert!(parse_config("", "mem").is_err());
        assert!(parse_config("[model1]\n[model2]\n", "mem").is_err());
        assert!(parse_config("[model1]\n[extra]\n", "mem").is_err());
    }

    #[test]
    fn sweep_section() {
        let text = "[model1]\nn = 100\nseed = 3\n[sweep]\nratio = 2.0\n[sweep.axes]\nn = [50, 100]\nmode = [\"fixed-ratio\"]\n";
        let loaded = parse_config(text, "mem").unwrap();
        assert!(loaded.seed_given);
        let ConfigKind::Sweep(spec) = loaded.kind else { panic!("wrong kind") };
        assert_eq!(spec.ratio, Some(2.0));
        assert_eq!(spec.master_seed(), 3);
        assert_eq!(spec.grid().unwrap().len(), 2);

        let bad = "[model1]\n[sweep.axes]\nmode = [\"sideways\"]\n";
        assert!(parse_config(bad, "mem").is_err());
    }

    #[test]
    fn overrides() {
        assert_eq!(parse_override("alpha=0.99").unwrap(), ("alpha".into(), "0.99".into()));
        assert!(parse_override("alpha").is_err());
        assert!(parse_override("=3").is_err());
        let mut m = ModelConfig::Model2(Model2Config::default());
        m.set("kernel", "ingroup").unwrap();
        m.set("strict_eq4", "true").unwrap();
        assert!(m.set("kernel", "other").is_err());
        assert!(m.set("p", "0.5").is_err());
    }
}
