//! EV model catalog, purchase-share sampling, and household charging limits.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Default household connection limit: three phases of 25 A at 400 V.
pub const DEFAULT_HOUSEHOLD_LIMIT_KW: f64 = 17.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvModel {
    pub name: String,
    pub battery_capacity_kwh: f64,
    pub mileage_kwh_per_km: f64,
    pub max_charge_power_kw: f64,
    /// Renormalized purchase share; raw values are scaled to sum to 1 at load.
    pub purchase_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub models: Vec<EvModel>,
    pub household_power_limit_kw: f64,
}

#[derive(Debug, Deserialize)]
struct CatalogRow {
    name: String,
    capacity_kwh: f64,
    mileage_kwh_per_km: f64,
    max_power_kw: f64,
    share: f64,
}

impl Catalog {
    pub fn from_models(models: Vec<EvModel>, household_power_limit_kw: f64) -> Result<Self> {
        let mut catalog = Catalog {
            models,
            household_power_limit_kw,
        };
        catalog.validate_and_renormalize()?;
        Ok(catalog)
    }

    /// Reads `name,capacity_kwh,mileage_kwh_per_km,max_power_kw,share` CSV.
    pub fn from_csv(path: &Path, household_power_limit_kw: f64) -> Result<Self> {
        let display = path.display().to_string();
        let mut reader = csv::Reader::from_path(path).map_err(|e| SimError::Parse {
            path: display.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        let mut models = Vec::new();
        for (idx, row) in reader.deserialize::<CatalogRow>().enumerate() {
            let row = row.map_err(|e| SimError::Parse {
                path: display.clone(),
                line: idx as u64 + 2,
                message: e.to_string(),
            })?;
            models.push(EvModel {
                name: row.name,
                battery_capacity_kwh: row.capacity_kwh,
                mileage_kwh_per_km: row.mileage_kwh_per_km,
                max_charge_power_kw: row.max_power_kw,
                purchase_share: row.share,
            });
        }
        Catalog::from_models(models, household_power_limit_kw)
    }

    fn validate_and_renormalize(&mut self) -> Result<()> {
        if self.models.is_empty() {
            return Err(SimError::validation("catalog has no models"));
        }
        if self.household_power_limit_kw <= 0.0 {
            return Err(SimError::validation("household power limit must be > 0"));
        }
        for m in &self.models {
            if m.battery_capacity_kwh <= 0.0
                || m.mileage_kwh_per_km <= 0.0
                || m.max_charge_power_kw <= 0.0
                || m.purchase_share <= 0.0
            {
                return Err(SimError::validation(format!(
                    "model {} has a non-positive field",
                    m.name
                )));
            }
        }
        let total: f64 = self.models.iter().map(|m| m.purchase_share).sum();
        for m in &mut self.models {
            m.purchase_share /= total;
        }
        Ok(())
    }
}

/// Categorical draw over the catalog by renormalized purchase share.
/// Returns the model index.
pub fn sample_model<R: Rng>(catalog: &Catalog, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, m) in catalog.models.iter().enumerate() {
        acc += m.purchase_share;
        if u < acc {
            return i;
        }
    }
    catalog.models.len() - 1
}

/// Charging power available to an EV under the household connection limit.
pub fn effective_charge_power(model: &EvModel, limit_kw: f64) -> f64 {
    model.max_charge_power_kw.min(limit_kw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvStatus {
    HomeIdle,
    Away,
    Charging,
}

/// Mutable per-EV simulation state.
#[derive(Debug, Clone)]
pub struct EvState {
    /// Index into the catalog's model list.
    pub model_idx: usize,
    pub soc_kwh: f64,
    pub status: EvStatus,
    /// Owning household index.
    pub owner: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn reference_catalog() -> Catalog {
        Catalog::from_models(
            vec![
                model("Tesla Model 3", 50.0, 0.151, 11.0, 0.405),
                model("VW e-Golf", 35.8, 0.168, 7.2, 0.180),
                model("Hyundai Kona", 42.0, 0.154, 11.0, 0.083),
                model("Renault Zoe", 44.1, 0.161, 22.0, 0.060),
                model("Nissan Leaf", 40.0, 0.164, 3.68, 0.058),
            ],
            DEFAULT_HOUSEHOLD_LIMIT_KW,
        )
        .unwrap()
    }

    fn model(name: &str, cap: f64, mileage: f64, power: f64, share: f64) -> EvModel {
        EvModel {
            name: name.to_string(),
            battery_capacity_kwh: cap,
            mileage_kwh_per_km: mileage,
            max_charge_power_kw: power,
            purchase_share: share,
        }
    }

    #[test]
    fn shares_renormalize_to_one() {
        let catalog = reference_catalog();
        let total: f64 = catalog.models.iter().map(|m| m.purchase_share).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
        // Raw shares sum to 0.786, so Tesla becomes 0.405 / 0.786.
        assert_relative_eq!(
            catalog.models[0].purchase_share,
            0.405 / 0.786,
            max_relative = 1e-12
        );
    }

    #[test]
    fn single_model_share_is_one() {
        let catalog =
            Catalog::from_models(vec![model("only", 40.0, 0.15, 11.0, 0.3)], 17.3).unwrap();
        assert_relative_eq!(catalog.models[0].purchase_share, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(sample_model(&catalog, &mut rng), 0);
        }
    }

    #[test]
    fn zero_capacity_rejected() {
        let err = Catalog::from_models(vec![model("bad", 0.0, 0.15, 11.0, 0.3)], 17.3);
        assert!(err.is_err());
    }

    #[test]
    fn sampling_frequencies_match_shares() {
        let catalog = reference_catalog();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut counts = vec![0u64; catalog.models.len()];
        for _ in 0..n {
            counts[sample_model(&catalog, &mut rng)] += 1;
        }
        for (i, m) in catalog.models.iter().enumerate() {
            let freq = counts[i] as f64 / n as f64;
            assert!(
                (freq - m.purchase_share).abs() < 0.01,
                "{}: freq {freq} vs share {}",
                m.name,
                m.purchase_share
            );
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let catalog = reference_catalog();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| sample_model(&catalog, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
    }

    #[test]
    fn charge_power_caps_at_household_limit() {
        let catalog = reference_catalog();
        let zoe = &catalog.models[3];
        assert_relative_eq!(effective_charge_power(zoe, 17.3), 17.3);
        let leaf = &catalog.models[4];
        assert_relative_eq!(effective_charge_power(leaf, 17.3), 3.68);
        let at_limit = model("x", 40.0, 0.15, 17.3, 0.5);
        assert_relative_eq!(effective_charge_power(&at_limit, 17.3), 17.3);
        // Idempotent under repeated capping.
        let capped = effective_charge_power(zoe, 17.3);
        assert!(capped <= zoe.max_charge_power_kw && capped <= 17.3);
    }
}
