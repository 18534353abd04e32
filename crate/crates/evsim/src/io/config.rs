//! Scenario configuration: a single JSON file with an embedded schema
//! version, describing inputs and run parameters.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adoption::{scale_curve_to_grid, AdoptionCurve, RealizationMode};
use crate::driving::DistanceDistribution;
use crate::emissions::{DecayMode, EmissionSeries};
use crate::error::{Result, SimError};
use crate::fleet::{Catalog, DEFAULT_HOUSEHOLD_LIMIT_KW};
use crate::grid::GridConfig;
use crate::io::consumption::ConsumptionDataset;
use crate::timeutil::Timestamp;

pub const SCHEMA_VERSION: u32 = 1;

fn default_sim_start() -> Timestamp {
    crate::timeutil::year_start(2020)
}

fn default_hard_end() -> Timestamp {
    crate::timeutil::year_start(2033)
}

fn default_limit() -> f64 {
    DEFAULT_HOUSEHOLD_LIMIT_KW
}

/// Default transformer rating for the 126-household preset: a standard
/// 400 kVA 10/0.4 kV unit. This value is an assumption, not measured data.
fn default_capacity() -> f64 {
    400.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdoptionSection {
    /// CSV of `year,cumulative_evs`.
    pub curve_csv: PathBuf,
    pub mode: RealizationMode,
    /// When set, the curve is national and is scaled down to the grid's
    /// household count by this fleet size. Absent: the curve is local.
    #[serde(default)]
    pub national_fleet: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default = "default_sim_start")]
    pub sim_start: Timestamp,
    #[serde(default = "default_hard_end")]
    pub hard_end: Timestamp,
    pub seed: u64,
    pub adoption: AdoptionSection,
    pub catalog_csv: PathBuf,
    #[serde(default = "default_limit")]
    pub household_power_limit_kw: f64,
    pub consumption_csv: PathBuf,
    pub intensity_csv: PathBuf,
    pub distance_csv: PathBuf,
    #[serde(default = "default_capacity")]
    pub transformer_capacity_kw: f64,
    #[serde(default)]
    pub decay: DecayMode,
}

impl ScenarioConfig {
    /// Loads a config file, resolving relative input paths against the
    /// config file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| SimError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut config: ScenarioConfig =
            serde_json::from_str(&text).map_err(|e| SimError::Config(format!(
                "{}: {e}",
                path.display()
            )))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(SimError::config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        if config.sim_start >= config.hard_end {
            return Err(SimError::config("sim_start must precede hard_end"));
        }
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut config.adoption.curve_csv,
            &mut config.catalog_csv,
            &mut config.consumption_csv,
            &mut config.intensity_csv,
            &mut config.distance_csv,
        ] {
            if p.is_relative() {
                *p = base.join(&p);
            }
            if !p.exists() {
                return Err(SimError::config(format!(
                    "input file not found: {}",
                    p.display()
                )));
            }
        }
        Ok(config)
    }

    pub fn input_paths(&self) -> Vec<&Path> {
        vec![
            &self.adoption.curve_csv,
            &self.catalog_csv,
            &self.consumption_csv,
            &self.intensity_csv,
            &self.distance_csv,
        ]
    }
}

/// Fully loaded and validated simulation inputs.
pub struct ScenarioInputs {
    pub local_curve: AdoptionCurve,
    pub mode: RealizationMode,
    pub catalog: Catalog,
    pub consumption: ConsumptionDataset,
    pub intensity: EmissionSeries,
    pub distances: DistanceDistribution,
    pub grid: GridConfig,
    pub sim_start: Timestamp,
    pub hard_end: Timestamp,
    pub seed: u64,
    pub decay: DecayMode,
}

impl ScenarioInputs {
    pub fn load(config: &ScenarioConfig) -> Result<Self> {
        let consumption = ConsumptionDataset::from_csv(&config.consumption_csv)?;
        let households = consumption.household_count() as u64;
        let curve = AdoptionCurve::from_csv(&config.adoption.curve_csv)?;
        let local_curve = match config.adoption.national_fleet {
            Some(fleet) => scale_curve_to_grid(&curve, fleet, households)?,
            None => {
                if curve.yearly_counts.iter().any(|&(_, c)| c > households) {
                    return Err(SimError::config(
                        "local adoption curve exceeds household count",
                    ));
                }
                curve
            }
        };
        let grid = GridConfig {
            transformer_capacity_kw: config.transformer_capacity_kw,
            household_count: consumption.household_count(),
        };
        grid.validate()?;
        Ok(ScenarioInputs {
            local_curve,
            mode: config.adoption.mode,
            catalog: Catalog::from_csv(&config.catalog_csv, config.household_power_limit_kw)?,
            consumption,
            intensity: EmissionSeries::from_csv(&config.intensity_csv)?,
            distances: DistanceDistribution::from_csv(&config.distance_csv)?,
            grid,
            sim_start: config.sim_start,
            hard_end: config.hard_end,
            seed: config.seed,
            decay: config.decay,
        })
    }
}
