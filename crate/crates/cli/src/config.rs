//! Scenario files: TOML with one table per concern.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use arcplan::baseline::FullStateConfig;
use arcplan::kinematics::rotate_azimuth;
use arcplan::map::{generate_environment, load_map, EnvKind, EnvParams};
use arcplan::motion::SweepConfig;
use arcplan::planner::{PlanMode, PlannerConfig};
use arcplan::{ChainParams, FullConfig, OccupancyMap, ShapeConfig, Vec3};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub map: MapSection,
    pub environment: EnvParams,
    pub chain: ChainParams,
    pub task: TaskSection,
    pub planner: PlannerSection,
    pub baseline: BaselineSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapSection {
    /// ARCMAP file; takes precedence over the generator.
    pub file: Option<PathBuf>,
    pub generator: EnvKind,
}

impl Default for MapSection {
    fn default() -> Self {
        MapSection {
            file: None,
            generator: EnvKind::RoomWindow,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSection {
    pub start: [f64; 3],
    /// Azimuth of the straight start shape.
    pub start_yaw: f64,
    pub goal: [f64; 3],
    pub goal_radius: f64,
}

impl Default for TaskSection {
    fn default() -> Self {
        TaskSection {
            start: [4.0, 5.0, 1.5],
            start_yaw: 0.0,
            goal: [16.0, 5.0, 1.5],
            goal_radius: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSection {
    pub mode: String,
    pub m_v: usize,
    pub r_t: f64,
    pub d_c: Option<f64>,
    pub prefer_pn: bool,
    pub n_srs: usize,
    pub r_s: f64,
    pub srs_seed: u64,
    /// ARCSRS file used by `plan`.
    pub srs_file: Option<PathBuf>,
}

impl Default for PlannerSection {
    fn default() -> Self {
        PlannerSection {
            mode: "both".into(),
            m_v: 1500,
            r_t: 3.0,
            d_c: None,
            prefer_pn: false,
            n_srs: 500,
            r_s: 2.5,
            srs_seed: 42,
            srs_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSection {
    pub m_f: usize,
    pub radius: f64,
    pub lambda: f64,
    pub max_neighbors: usize,
    pub goal_samples: usize,
}

impl Default for BaselineSection {
    fn default() -> Self {
        let d = FullStateConfig::default();
        BaselineSection {
            m_f: d.m_f,
            radius: d.radius,
            lambda: d.lambda,
            max_neighbors: d.max_neighbors,
            goal_samples: d.goal_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seeds: Vec<u64>,
    /// Chain sizes swept; empty means the `chain` table's size.
    pub units: Vec<usize>,
    pub modes: Vec<String>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seeds: vec![1],
            units: Vec::new(),
            modes: vec!["lsc_only".into(), "srs_only".into(), "both".into()],
        }
    }
}

impl ScenarioConfig {
    /// Reads a scenario and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: ScenarioConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.map.file, &mut cfg.planner.srs_file].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.chain.validate()?;
        self.mode()?;
        for m in &self.run.modes {
            m.parse::<PlanMode>()?;
        }
        for p in [&self.map.file, &self.planner.srs_file].into_iter().flatten() {
            if !p.exists() {
                bail!("referenced file {} does not exist", p.display());
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> Result<PlanMode> {
        Ok(self.planner.mode.parse()?)
    }

    pub fn load_map(&self) -> Result<OccupancyMap> {
        Ok(match &self.map.file {
            Some(f) => load_map(f)?,
            None => generate_environment(self.map.generator, &self.environment)?,
        })
    }

    pub fn start(&self, params: &ChainParams) -> FullConfig {
        let [x, y, z] = self.task.start;
        FullConfig::new(
            Vec3::new(x, y, z),
            rotate_azimuth(&ShapeConfig::straight(params.n_units), self.task.start_yaw),
        )
    }

    pub fn goal(&self) -> Vec3 {
        let [x, y, z] = self.task.goal;
        Vec3::new(x, y, z)
    }

    pub fn planner_config(&self, mode: PlanMode, seed: u64) -> PlannerConfig {
        PlannerConfig {
            mode,
            m_v: self.planner.m_v,
            r_t: self.planner.r_t,
            seed,
            d_c: self.planner.d_c,
            prefer_pn: self.planner.prefer_pn,
            sweep: SweepConfig::default(),
        }
    }

    pub fn fullstate_config(&self, seed: u64) -> FullStateConfig {
        FullStateConfig {
            m_f: self.baseline.m_f,
            radius: self.baseline.radius,
            lambda: self.baseline.lambda,
            max_neighbors: self.baseline.max_neighbors,
            goal_samples: self.baseline.goal_samples,
            seed,
            sweep: SweepConfig::default(),
        }
    }

    /// The scenario as TOML, one string per line, for echoing into outputs.
    pub fn echo(&self) -> Vec<String> {
        toml::to_string(self)
            .unwrap_or_default()
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::to_string)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_parses_back() {
        let cfg = ScenarioConfig::default();
        let text = cfg.echo().join("\n");
        let back: ScenarioConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<ScenarioConfig>("[chain]\nn_unit = 3\n").is_err());
        let cfg: ScenarioConfig = toml::from_str("[chain]\nn_units = 4\n[planner]\nmode = \"srs_only\"\n").unwrap();
        assert_eq!(cfg.chain.n_units, 4);
        assert_eq!(cfg.mode().unwrap(), PlanMode::SrsOnly);
    }
}
