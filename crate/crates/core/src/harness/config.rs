use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{
    lambda_of, scaled_family, v_star, EquationVariant, KinkParams, Orientation, SolitonParams, TrainSpec,
};
use crate::spectral::Grid;
use crate::trains::SEPARATION_GATE;

/// One experiment, as read from a TOML file plus `KEY=VALUE` overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub train: TrainConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub variant: EquationVariant,
    #[serde(default)]
    pub b: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solitons: Vec<SolitonConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kink: Option<KinkConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonConfig {
    pub omega: f64,
    pub c: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub x0: f64,
}

/// `c_j = M d_j`, `ω_j = (h_j² + c_j²)/4`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub d: Vec<f64>,
    pub h: Vec<f64>,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KinkConfig {
    pub c0: f64,
    #[serde(default)]
    pub theta0: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "falling")]
    pub orientation: Orientation,
}

fn falling() -> Orientation {
    Orientation::Falling
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub n: usize,
    #[serde(default)]
    pub center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub t0: f64,
    pub t1: f64,
    /// Field-equation step.
    pub dt: f64,
    /// Duhamel quadrature step.
    pub dt_s: f64,
    /// Residual sample count on `[t0, t1]`.
    pub samples: usize,
    pub record_every: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t0: 0.0,
            t1: 5.0,
            dt: 1e-3,
            dt_s: 1e-2,
            samples: 17,
            record_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub separation_gate: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            separation_gate: SEPARATION_GATE,
            picard_tol: 1e-10,
            picard_max_iters: 30,
        }
    }
}

/// Runs `command` once per value of `key`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub command: String,
    pub key: String,
    pub values: Vec<toml::Value>,
}

impl ExperimentConfig {
    /// Reads `path`, applies `overrides` in order and checks the result.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, overrides)
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Self::from_table(table)
    }

    fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// A copy with one more override applied.
    pub fn with_override(&self, key: &str, value: toml::Value) -> Result<Self> {
        let mut table = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        set_path(&mut table, key, value)?;
        Self::from_table(table)
    }

    fn check(&self) -> Result<()> {
        let t = &self.time;
        if !(t.t1 > t.t0) || !(t.dt > 0.0) || !(t.dt_s > 0.0) {
            return Err(Error::Config(format!(
                "time window needs t1 > t0, dt > 0 and dt_s > 0 (t0 = {}, t1 = {}, dt = {}, dt_s = {})",
                t.t0, t.t1, t.dt, t.dt_s
            )));
        }
        if !(self.tolerances.picard_tol > 0.0) || !(self.tolerances.separation_gate > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        self.grid()?;
        self.spec()?.validate()
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::centered(self.grid.length, self.grid.n, self.grid.center)
    }

    /// The train described by `[train]`; explicit solitons and a family are
    /// mutually exclusive.
    pub fn spec(&self) -> Result<TrainSpec> {
        let tc = &self.train;
        let solitons = match (&tc.family, tc.solitons.is_empty()) {
            (Some(_), false) => {
                return Err(Error::Config("give either train.solitons or train.family, not both".into()))
            }
            (None, true) => return Err(Error::Config("train needs train.solitons or train.family".into())),
            (Some(f), true) => scaled_family(tc.variant, &f.d, &f.h, f.m, tc.b)?,
            (None, false) => tc
                .solitons
                .iter()
                .map(|s| {
                    SolitonParams::new(tc.variant, s.omega, s.c, tc.b)
                        .with_phase(s.theta)
                        .with_offset(s.x0)
                })
                .collect(),
        };
        let mut spec = TrainSpec::new(tc.variant, tc.b, solitons);
        if let Some(k) = &tc.kink {
            spec = spec.with_kink(
                KinkParams::new(k.c0, tc.b, k.orientation)
                    .with_phase(k.theta0)
                    .with_offset(k.x0),
            );
        }
        Ok(spec)
    }
}

/// Quantities derived from a train, embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    pub gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub members: Vec<DerivedMember>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivedMember {
    pub label: String,
    pub omega: f64,
    pub c: f64,
    pub h: f64,
}

impl Derived {
    pub fn of(spec: &TrainSpec) -> Result<Self> {
        let multi = spec.len() > 1;
        let first = usize::from(spec.kink.is_none());
        Ok(Derived {
            gamma: spec.gamma(),
            v_star: if multi { Some(v_star(spec)?) } else { None },
            lambda: if multi { Some(lambda_of(spec)?) } else { None },
            members: spec
                .members()
                .iter()
                .enumerate()
                .map(|(i, m)| DerivedMember {
                    label: m.label(i + first),
                    omega: m.omega(),
                    c: m.speed(),
                    h: m.h(),
                })
                .collect(),
        })
    }
}

fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not KEY=VALUE")))?;
    set_path(table, key.trim(), parse_value(raw.trim()))
}

/// A TOML literal if `raw` parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Sets a dotted key; a numeric segment indexes into an array.
fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("malformed override key {key:?}")));
    }
    let bad = |what: &str| Error::Config(format!("override key {key:?}: {what}"));
    let mut node = table
        .entry(parts[0].to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    for part in &parts[1..] {
        node = match node {
            toml::Value::Table(t) => t
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new())),
            toml::Value::Array(a) => {
                let i: usize = part.parse().map_err(|_| bad("array segments must be indices"))?;
                a.get_mut(i).ok_or_else(|| bad("index out of range"))?
            }
            _ => return Err(bad("descends into a scalar")),
        };
    }
    // integer literals may replace float fields
    *node = match (&*node, value) {
        (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    };
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAMILY: &str = r#"
[train]
variant = "dnls1"
b = 0.0
family = { d = [-1.0, -2.0], h = [1.0, 1.0], m = 8.0 }

[grid]
length = 192.0
n = 4096
center = -64.0
"#;

    #[test]
    fn family_config_resolves() {
        let cfg = ExperimentConfig::parse(FAMILY, &[]).unwrap();
        let d = Derived::of(&cfg.spec().unwrap()).unwrap();
        assert_eq!(d.v_star, Some(8.0));
        assert_eq!(d.lambda, Some(0.5));
        assert_eq!(d.members[1].omega, 64.25);
        assert_eq!(d.members[0].label, "soliton 1");
        assert_eq!(cfg.time, TimeConfig::default());
    }

    #[test]
    fn overrides_set_nested_and_indexed_keys() {
        let cfg = ExperimentConfig::parse(
            FAMILY,
            &["train.family.m=16".into(), "grid.n = 2048".into(), "train.family.h.1=2".into()],
        )
        .unwrap();
        assert_eq!(cfg.train.family.as_ref().unwrap().m, 16.0);
        assert_eq!(cfg.train.family.as_ref().unwrap().h, vec![1.0, 2.0]);
        assert_eq!(cfg.grid.n, 2048);
    }

    #[test]
    fn bad_configs_are_rejected() {
        for o in ["grid.n=0", "train.family.m=-1", "time.t1=-1", "nonsense=1", "train.family.d.7=1", "novalue"] {
            assert!(ExperimentConfig::parse(FAMILY, &[o.to_string()]).is_err(), "{o}");
        }
        let both = format!("{FAMILY}\n[[train.solitons]]\nomega = 1.0\nc = 0.5\n");
        assert!(matches!(ExperimentConfig::parse(&both, &[]), Err(Error::Config(_))));
    }

    #[test]
    fn kink_train_labels() {
        let text = r#"
[train]
variant = "dnls2"
kink = { c0 = 1.0 }
family = { d = [1.0], h = [1.0], m = 8.0 }
[grid]
length = 192.0
n = 1024
center = 32.0
"#;
        let cfg = ExperimentConfig::parse(text, &[]).unwrap();
        let d = Derived::of(&cfg.spec().unwrap()).unwrap();
        let labels: Vec<&str> = d.members.iter().map(|m| m.label.as_str()).collect();
        assert_eq!(labels, ["kink", "soliton 1"]);
        assert!((d.gamma - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn string_fallback_for_non_literals() {
        assert_eq!(parse_value("dnls2"), toml::Value::String("dnls2".into()));
        assert_eq!(parse_value("2"), toml::Value::Integer(2));
        assert_eq!(parse_value("[1.0, 2.0]").as_array().unwrap().len(), 2);
    }
}
