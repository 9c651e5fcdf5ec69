//! JSON configuration schema (versioned with `"schema": 1`) and the
//! `--set key=value` override mechanism.

use serde::{Deserialize, Serialize};

use gla_core::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Graphene3,
    Graphene4,
    GrapheneChain,
    WaveguideSerial,
    WaveguideBraided,
    WaveguideNested,
    SquareBraided,
    SquareNested,
    LiebPair,
    LiebMismatched,
    Custom,
}

impl ScenarioName {
    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidArgument(format!("unknown scenario '{s}'")))
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioName::Graphene3 => "graphene3",
            ScenarioName::Graphene4 => "graphene4",
            ScenarioName::GrapheneChain => "graphene_chain",
            ScenarioName::WaveguideSerial => "waveguide_serial",
            ScenarioName::WaveguideBraided => "waveguide_braided",
            ScenarioName::WaveguideNested => "waveguide_nested",
            ScenarioName::SquareBraided => "square_braided",
            ScenarioName::SquareNested => "square_nested",
            ScenarioName::LiebPair => "lieb_pair",
            ScenarioName::LiebMismatched => "lieb_mismatched",
            ScenarioName::Custom => "custom",
        }
    }
}

/// Reference to a bath site: flat index, or lattice coordinates
/// `[cell_a, cell_b, sublattice]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteRef {
    Index(usize),
    Cell(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub site: SiteRef,
    pub g_re: f64,
    #[serde(default)]
    pub g_im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub omega0: f64,
    pub couplings: Vec<CouplingSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Chain,
    Graphene,
    Square,
    Lieb,
}

impl LatticeKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(LatticeKind::Chain),
            "graphene" => Ok(LatticeKind::Graphene),
            "square" => Ok(LatticeKind::Square),
            "lieb" => Ok(LatticeKind::Lieb),
            _ => Err(Error::InvalidArgument(format!("unknown lattice '{s}'"))),
        }
    }
}

/// Scenario parameters; unset fields fall back to scenario defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Per-point coupling amplitude g (default 0.05·J).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Hopping rate J (default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    /// Emitter frequency override.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    /// Chain length / lattice side in cells.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    /// Lieb string length (5 + 6ν family).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    /// Coupling-point spacing for two-point waveguide emitters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    /// Offset of the second emitter along the waveguide.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x21: Option<i64>,
    /// Evolution horizon (in units of 1/J).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Explicit lattice for the custom scenario.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeKind>,
    /// Explicit atoms for the custom scenario.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    SelfEnergy,
    Ldos,
    BoundStates,
    Vds,
    Rates,
    DfhReport,
    Lindblad,
    ExactEvolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u32,
    pub scenario: ScenarioName,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<Artifact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl Config {
    pub fn for_scenario(name: ScenarioName) -> Self {
        Config {
            schema: SCHEMA_VERSION,
            scenario: name,
            params: Params::default(),
            outputs: None,
            sweep: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("config parse error: {e}")))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported config schema {} (expected {SCHEMA_VERSION})",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Apply one `key=value` override.
    pub fn apply_set(&mut self, kv: &str) -> Result<()> {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("--set expects key=value, got '{kv}'")))?;
        let fval = || -> Result<f64> {
            value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("'{value}' is not a number")))
        };
        let ival = || -> Result<i64> {
            value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("'{value}' is not an integer")))
        };
        match key {
            "g" => self.params.g = Some(fval()?),
            "j" => self.params.j = Some(fval()?),
            "omega0" => self.params.omega0 = Some(fval()?),
            "cells" => self.params.cells = Some(ival()? as usize),
            "length" => self.params.length = Some(ival()? as usize),
            "d" => self.params.d = Some(ival()?),
            "x21" => self.params.x21 = Some(ival()?),
            "t_max" => self.params.t_max = Some(fval()?),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown parameter '{key}' (known: g, j, omega0, cells, length, d, x21, t_max)"
                )))
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = Config::for_scenario(ScenarioName::WaveguideBraided);
        cfg.params.g = Some(0.1);
        cfg.params.d = Some(2);
        let text = cfg.to_json();
        let back = Config::from_json(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn schema_enforced() {
        assert!(Config::from_json(r#"{"schema": 2, "scenario": "graphene3"}"#).is_err());
        assert!(Config::from_json(r#"{"schema": 1, "scenario": "graphene3"}"#).is_ok());
        assert!(Config::from_json(r#"{"schema": 1, "scenario": "nope"}"#).is_err());
    }

    #[test]
    fn set_overrides() {
        let mut cfg = Config::for_scenario(ScenarioName::WaveguideBraided);
        cfg.apply_set("g=0.2").unwrap();
        cfg.apply_set("cells=501").unwrap();
        assert_eq!(cfg.params.g, Some(0.2));
        assert_eq!(cfg.params.cells, Some(501));
        assert!(cfg.apply_set("bogus=1").is_err());
        assert!(cfg.apply_set("g").is_err());
    }

    #[test]
    fn atom_spec_site_forms() {
        let text = r#"{
            "schema": 1, "scenario": "custom",
            "params": { "lattice": "chain", "atoms": [
                { "omega0": 0.0, "couplings": [
                    {"site": 7, "g_re": 0.05},
                    {"site": [1, 2, 0], "g_re": 0.05, "g_im": 0.01}
                ]}
            ]}
        }"#;
        let cfg = Config::from_json(text).unwrap();
        let atoms = cfg.params.atoms.unwrap();
        assert_eq!(atoms[0].couplings.len(), 2);
        assert!(matches!(atoms[0].couplings[0].site, SiteRef::Index(7)));
        assert!(matches!(atoms[0].couplings[1].site, SiteRef::Cell(_)));
    }
}
