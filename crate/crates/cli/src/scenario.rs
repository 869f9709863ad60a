//! Scenario files: one JSON document describing a run, strict about keys.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use gradest::bound::EstimateContext;
use gradest::coefficient::CoefficientPreset;
use gradest::manifolds::RadialSolverConfig;
use serde::Deserialize;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub ctx: EstimateContext,
    #[serde(default)]
    pub bounds: Vec<FamilyEntry>,
    #[serde(default)]
    pub coefficient: Option<Coefficient>,
    #[serde(default)]
    pub data: Option<DataSpec>,
    #[serde(default)]
    pub grid: Option<TimeGrid>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyEntry {
    pub family: gradest::bound::Family,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Preset(CoefficientPreset),
    Table { table: PathBuf },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSpec {
    Euclidean,
    H3,
    RadialSolve { config: RadialSolverConfig },
    RadialCsv { path: PathBuf },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_lo: Option<f64>,
    pub t_hi: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    50
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance on G; overrides the data-dependent default.
    pub verify_abs: Option<f64>,
    /// Relative tolerance on G; overrides the data-dependent default.
    pub verify_rel: Option<f64>,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub margin: Option<PathBuf>,
    pub alpha_csv: Option<PathBuf>,
}

impl Scenario {
    pub fn load(path: &Path) -> anyhow::Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario {}", path.display()))?;
        let sc: Scenario = serde_json::from_str(&text)
            .with_context(|| format!("malformed scenario {}", path.display()))?;
        if sc.version != SCENARIO_VERSION {
            bail!(
                "scenario version {} is not supported (expected {SCENARIO_VERSION})",
                sc.version
            );
        }
        sc.ctx.validate()?;
        // relative paths are taken from the scenario's directory
        let base = path.parent().unwrap_or(Path::new("."));
        let sc = sc.rebase(base);
        if let Some(Coefficient::Table { table }) = &sc.coefficient {
            if !table.exists() {
                bail!("coefficient table {} does not exist", table.display());
            }
        }
        if let Some(DataSpec::RadialCsv { path }) = &sc.data {
            if !path.exists() {
                bail!("solver output {} does not exist", path.display());
            }
        }
        Ok(sc)
    }

    fn rebase(mut self, base: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(Coefficient::Table { table }) = &mut self.coefficient {
            fix(table);
        }
        if let Some(DataSpec::RadialCsv { path }) = &mut self.data {
            fix(path);
        }
        for p in [
            &mut self.outputs.csv,
            &mut self.outputs.json,
            &mut self.outputs.margin,
            &mut self.outputs.alpha_csv,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_keys() {
        let ok = r#"{"version":1,"ctx":{"n":3,"k":1.0,"T":5.0},"bounds":[{"family":"lyd","params":[0.5]}],
            "coefficient":{"preset":"theta-power","theta":0.5},"data":{"model":"h3"}}"#;
        let sc: Scenario = serde_json::from_str(ok).unwrap();
        assert_eq!(sc.bounds.len(), 1);
        assert!(matches!(
            sc.coefficient,
            Some(Coefficient::Preset(CoefficientPreset::ThetaPower { .. }))
        ));
        let typo = r#"{"version":1,"ctx":{"n":3,"k":1.0,"T":5.0},"bounds":[{"family":"lyd","parms":[0.5]}]}"#;
        assert!(serde_json::from_str::<Scenario>(typo).is_err());
        let typo = r#"{"version":1,"ctx":{"n":3,"k":1.0,"T":5.0},"coefficient":{"preset":"theta-power","thetta":0.5}}"#;
        assert!(serde_json::from_str::<Scenario>(typo).is_err());
    }
}
