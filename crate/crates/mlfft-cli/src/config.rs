//! Experiment configuration, loaded from JSON.

use crate::error::CliError;
use mlfft::analysis::SchemeTag;
use mlfft::testfuncs::TestFunctionKind;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Test function name: g34, g3, or kink.
    pub function: String,
    pub dims: Vec<usize>,
    pub family: Family,
    /// Refinement sweep: `N` values for hyperbolic crosses, integral levels
    /// `n` for dyadic ones.
    pub refinements: Vec<f64>,
    pub scheme: SchemeChoice,
    pub c: f64,
    pub delta: f64,
    pub seed: u64,
    #[serde(default = "default_retries")]
    pub retries: u32,
    /// Cardinality cap; the MLFFT_MAX_CARD environment variable overrides it.
    #[serde(default)]
    pub max_card: Option<usize>,
    /// Cap on the total sample count of one sweep point.
    #[serde(default)]
    pub max_samples: Option<u64>,
}

fn default_retries() -> u32 {
    3
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Family {
    Hc {
        #[serde(rename = "T", with = "shape_t")]
        t: f64,
        #[serde(default)]
        even: bool,
    },
    Dyadic {
        #[serde(default)]
        even: bool,
    },
}

/// JSON has no negative-infinity literal, so the shape parameter crosses the
/// file boundary as either a number or the string "-inf".
mod shape_t {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(t: &f64, s: S) -> Result<S::Ok, S::Error> {
        if t.is_finite() {
            s.serialize_f64(*t)
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "bad shape parameter {s:?}, expected a number or \"-inf\""
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    Single,
    Multiple,
    Both,
}

impl SchemeChoice {
    pub fn tags(self) -> &'static [SchemeTag] {
        match self {
            SchemeChoice::Single => &[SchemeTag::Single],
            SchemeChoice::Multiple => &[SchemeTag::Multiple],
            SchemeChoice::Both => &[SchemeTag::Single, SchemeTag::Multiple],
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        TestFunctionKind::from_str(&self.function).map_err(CliError::usage)?;
        if self.dims.is_empty() {
            return Err(CliError::Usage("dims list is empty".into()));
        }
        if self.dims.iter().any(|&d| d == 0) {
            return Err(CliError::Usage("dims must be at least 1".into()));
        }
        if self.refinements.is_empty() {
            return Err(CliError::Usage("refinement sweep is empty".into()));
        }
        if let Family::Dyadic { .. } = self.family {
            for &r in &self.refinements {
                if !(r.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&r)) {
                    return Err(CliError::Usage(format!(
                        "dyadic level {r} is not a small nonnegative integer"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> TestFunctionKind {
        TestFunctionKind::from_str(&self.function).expect("validated at load")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "function": "g34",
        "dims": [2],
        "family": {"type": "hc", "T": 0.0},
        "refinements": [1, 2, 4],
        "scheme": "multiple",
        "c": 2.0,
        "delta": 0.5,
        "seed": 7
    }"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.retries, 3);
        assert_eq!(cfg.max_card, None);
        assert!(matches!(cfg.family, Family::Hc { t, even: false } if t == 0.0));
    }

    #[test]
    fn shape_parameter_accepts_minus_inf_and_round_trips() {
        let cfg: ExperimentConfig = serde_json::from_str(
            &MINIMAL.replace("\"T\": 0.0", "\"T\": \"-inf\""),
        )
        .unwrap();
        let Family::Hc { t, .. } = cfg.family else { panic!("hc family expected") };
        assert_eq!(t, f64::NEG_INFINITY);
        let echoed = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&echoed).unwrap();
        let Family::Hc { t, .. } = back.family else { panic!("hc family expected") };
        assert_eq!(t, f64::NEG_INFINITY);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for (field, replacement) in [
            ("\"function\": \"g34\"", "\"function\": \"g35\""),
            ("\"dims\": [2]", "\"dims\": []"),
            ("\"refinements\": [1, 2, 4]", "\"refinements\": []"),
            ("\"dims\": [2]", "\"dims\": [0]"),
        ] {
            let text = MINIMAL.replace(field, replacement);
            let cfg: ExperimentConfig = serde_json::from_str(&text).unwrap();
            assert!(cfg.validate().is_err(), "{replacement} should fail validation");
        }
        assert!(serde_json::from_str::<ExperimentConfig>(
            &MINIMAL.replace("\"seed\": 7", "\"seed\": 7, \"unknown\": 1")
        )
        .is_err());
    }

    #[test]
    fn dyadic_levels_must_be_integral() {
        let text = MINIMAL
            .replace("{\"type\": \"hc\", \"T\": 0.0}", "{\"type\": \"dyadic\"}")
            .replace("[1, 2, 4]", "[1, 2.5]");
        let cfg: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn scheme_both_expands_to_two_tags() {
        assert_eq!(SchemeChoice::Both.tags().len(), 2);
        assert_eq!(SchemeChoice::Single.tags(), &[SchemeTag::Single]);
    }
}
