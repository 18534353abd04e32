//! Logistic adoption curves, growth-rate calibration, grid scaling, and
//! realization of adoption events in time.

use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::timeutil::{self, Timestamp};

/// Parameters of the logistic growth function.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogisticParams {
    /// Carrying capacity (total vehicle fleet), vehicles.
    pub carrying_capacity: f64,
    /// Population at t = 0, vehicles.
    pub initial_population: f64,
    /// Growth rate, per year.
    pub growth_rate: f64,
    /// Calendar year corresponding to t = 0.
    pub t0_year: i32,
}

impl LogisticParams {
    pub fn validate(&self) -> Result<()> {
        if self.initial_population <= 0.0 {
            return Err(SimError::validation("initial population must be > 0"));
        }
        if self.carrying_capacity <= self.initial_population {
            return Err(SimError::validation(
                "carrying capacity must exceed initial population",
            ));
        }
        if self.growth_rate <= 0.0 {
            return Err(SimError::validation("growth rate must be > 0"));
        }
        Ok(())
    }
}

/// Logistic population at `t` years after t0.
pub fn logistic_population(t: f64, params: &LogisticParams) -> f64 {
    let a = params.carrying_capacity;
    let p0 = params.initial_population;
    a / (1.0 + (a / p0 - 1.0) * (-params.growth_rate * t).exp())
}

/// Growth rate that makes the logistic curve through (0, p0) reach
/// `p_target` at `t_target` years, with carrying capacity `a`.
pub fn fit_growth_rate(p0: f64, a: f64, t_target: f64, p_target: f64) -> Result<f64> {
    if !(p0 > 0.0 && a > p0 && t_target > 0.0) {
        return Err(SimError::domain("need 0 < p0 < a and t_target > 0"));
    }
    if p_target <= p0 || p_target >= a {
        return Err(SimError::domain(format!(
            "target population {p_target} must lie strictly between p0={p0} and A={a}"
        )));
    }
    let ratio = (a / p_target - 1.0) / (a / p0 - 1.0);
    Ok(-(ratio.ln()) / t_target)
}

/// Cumulative EV count per calendar year.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdoptionCurve {
    /// Ordered (calendar_year, cumulative_ev_count).
    pub yearly_counts: Vec<(i32, u64)>,
}

impl AdoptionCurve {
    pub fn new(yearly_counts: Vec<(i32, u64)>) -> Result<Self> {
        let curve = AdoptionCurve { yearly_counts };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.yearly_counts.is_empty() {
            return Err(SimError::validation("adoption curve is empty"));
        }
        for pair in self.yearly_counts.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(SimError::validation("curve years must strictly increase"));
            }
            if pair[1].1 < pair[0].1 {
                return Err(SimError::validation(format!(
                    "cumulative count decreases in year {}",
                    pair[1].0
                )));
            }
        }
        Ok(())
    }

    /// Samples a logistic function at integer years, rounding half-up.
    pub fn from_logistic(params: &LogisticParams, first_year: i32, last_year: i32) -> Result<Self> {
        params.validate()?;
        if first_year < params.t0_year || last_year < first_year {
            return Err(SimError::domain("year range must start at or after t0"));
        }
        let counts = (first_year..=last_year)
            .map(|y| {
                let t = (y - params.t0_year) as f64;
                (y, (logistic_population(t, params) + 0.5).floor() as u64)
            })
            .collect();
        AdoptionCurve::new(counts)
    }

    /// Reads `year,cumulative_evs` CSV.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let mut reader = csv::Reader::from_path(path).map_err(|e| SimError::Parse {
            path: display.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        let mut yearly_counts = Vec::new();
        for (idx, record) in reader.deserialize::<(i32, u64)>().enumerate() {
            let (year, count) = record.map_err(|e| SimError::Parse {
                path: display.clone(),
                line: idx as u64 + 2,
                message: e.to_string(),
            })?;
            yearly_counts.push((year, count));
        }
        AdoptionCurve::new(yearly_counts)
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| SimError::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e),
        })?;
        writer
            .write_record(["year", "cumulative_evs"])
            .and_then(|_| {
                self.yearly_counts.iter().try_for_each(|(y, c)| {
                    writer.write_record([y.to_string(), c.to_string()])
                })
            })
            .map_err(|e| SimError::Io {
                path: path.display().to_string(),
                source: std::io::Error::other(e),
            })
    }
}

/// Scales a national curve onto a local grid of `grid_households` consumers.
///
/// Per-year local count is round-half-up of the proportional share, made
/// monotone by running max, saturating at the household count.
pub fn scale_curve_to_grid(
    national: &AdoptionCurve,
    national_fleet: u64,
    grid_households: u64,
) -> Result<AdoptionCurve> {
    if grid_households == 0 || national_fleet == 0 {
        return Err(SimError::domain("fleet and household counts must be >= 1"));
    }
    let mut running_max = 0u64;
    let yearly_counts = national
        .yearly_counts
        .iter()
        .map(|&(year, count)| {
            let scaled =
                (count as f64 * grid_households as f64 / national_fleet as f64 + 0.5).floor();
            let local = (scaled as u64).min(grid_households).max(running_max);
            running_max = local;
            (year, local)
        })
        .collect();
    AdoptionCurve::new(yearly_counts)
}

/// Adoption rate: new EVs per calendar year, plus the pre-history count
/// carried into the first year.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YearlyRates {
    /// Cumulative count already present at the start of the first year.
    pub initial: (i32, u64),
    /// (calendar_year, new_evs_that_year) for every year after the first.
    pub rates: Vec<(i32, u64)>,
}

impl YearlyRates {
    pub fn total_new(&self) -> u64 {
        self.rates.iter().map(|(_, n)| n).sum()
    }
}

/// First differences of the cumulative curve.
pub fn yearly_adoption_rates(curve: &AdoptionCurve) -> YearlyRates {
    let initial = curve.yearly_counts[0];
    let rates = curve
        .yearly_counts
        .windows(2)
        .map(|pair| (pair[1].0, pair[1].1 - pair[0].1))
        .collect();
    YearlyRates { initial, rates }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealizationMode {
    Poisson,
    Deterministic,
}

/// Ordered hourly timestamps at which one household acquires an EV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdoptionSchedule {
    pub events: Vec<Timestamp>,
}

/// Realizes yearly rates as concrete adoption instants.
///
/// Pre-history EVs (the first year's cumulative count) are placed at the
/// first hour of the first year. Poisson mode draws each year's event count
/// from Poisson(rate) and places events uniformly within the year;
/// deterministic mode places exactly `rate` events evenly through the year.
/// Cumulative adoptions are truncated at `household_cap`.
pub fn realize_schedule<R: Rng>(
    rates: &YearlyRates,
    mode: RealizationMode,
    household_cap: u64,
    rng: &mut R,
) -> AdoptionSchedule {
    let mut events: Vec<Timestamp> = Vec::new();
    let first_year_start = timeutil::year_start(rates.initial.0);
    for _ in 0..rates.initial.1.min(household_cap) {
        events.push(first_year_start);
    }
    for &(year, rate) in &rates.rates {
        let start = timeutil::year_start(year);
        let hours = timeutil::hours_in_year(year) as u64;
        let count = match mode {
            RealizationMode::Deterministic => rate,
            RealizationMode::Poisson => {
                if rate == 0 {
                    0
                } else {
                    let dist = Poisson::new(rate as f64).expect("positive rate");
                    dist.sample(rng).round() as u64
                }
            }
        };
        match mode {
            RealizationMode::Deterministic => {
                // Evenly spaced: offset_i = (i + 1) * H / (n + 1), integer division.
                for i in 0..count {
                    let offset = (i + 1) * hours / (count + 1);
                    events.push(timeutil::add_hours(start, offset as i64));
                }
            }
            RealizationMode::Poisson => {
                let mut offsets: Vec<u64> =
                    (0..count).map(|_| rng.random_range(0..hours)).collect();
                offsets.sort_unstable();
                for offset in offsets {
                    events.push(timeutil::add_hours(start, offset as i64));
                }
            }
        }
    }
    events.sort();
    // Timestamps must strictly increase; bump collisions to the next hour.
    for i in 1..events.len() {
        if events[i] <= events[i - 1] {
            events[i] = timeutil::add_hours(events[i - 1], 1);
        }
    }
    events.truncate(household_cap as usize);
    AdoptionSchedule { events }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use chrono::Datelike;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reference_params() -> LogisticParams {
        LogisticParams {
            carrying_capacity: 2_500_000.0,
            initial_population: 124.0,
            growth_rate: 0.526,
            t0_year: 2011,
        }
    }

    #[test]
    fn logistic_at_zero_is_p0() {
        let p = reference_params();
        assert_relative_eq!(logistic_population(0.0, &p), 124.0, max_relative = 1e-12);
    }

    #[test]
    fn logistic_approaches_capacity() {
        let p = LogisticParams {
            carrying_capacity: 1000.0,
            initial_population: 1.0,
            growth_rate: 0.5,
            t0_year: 2000,
        };
        assert_relative_eq!(
            logistic_population(1000.0, &p),
            1000.0,
            max_relative = 1e-6
        );
    }

    #[test]
    fn logistic_reaches_1_3_million_by_2030() {
        // 2030 is t = 19 from the 2011 origin.
        let pop = logistic_population(19.0, &reference_params());
        assert!((pop - 1.30e6).abs() / 1.30e6 < 0.02, "pop = {pop}");
    }

    // Independent oracle: bisection on logistic_population over r.
    fn bisect_growth_rate(p0: f64, a: f64, t: f64, target: f64) -> f64 {
        let params = |r| LogisticParams {
            carrying_capacity: a,
            initial_population: p0,
            growth_rate: r,
            t0_year: 0,
        };
        let (mut lo, mut hi) = (1e-12, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if logistic_population(t, &params(mid)) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn fit_growth_rate_matches_bisection_oracle() {
        let r = fit_growth_rate(124.0, 2.5e6, 10.0, 16_687.0).unwrap();
        assert!((r - 0.491).abs() < 1e-3, "r = {r}");
        let oracle = bisect_growth_rate(124.0, 2.5e6, 10.0, 16_687.0);
        assert_relative_eq!(r, oracle, max_relative = 1e-9);
    }

    #[test]
    fn fit_growth_rate_hand_case() {
        let r = fit_growth_rate(1.0, 100.0, 1.0, 50.0).unwrap();
        assert_relative_eq!(r, 99.0_f64.ln(), max_relative = 1e-12);
        let oracle = bisect_growth_rate(1.0, 100.0, 1.0, 50.0);
        assert_relative_eq!(r, oracle, max_relative = 1e-9);
    }

    #[test]
    fn fit_round_trips_through_logistic() {
        let p = LogisticParams {
            carrying_capacity: 1e6,
            initial_population: 500.0,
            growth_rate: 0.3,
            t0_year: 0,
        };
        let target = logistic_population(5.0, &p);
        let r = fit_growth_rate(500.0, 1e6, 5.0, target).unwrap();
        assert_relative_eq!(r, 0.3, max_relative = 1e-9);
        assert_relative_eq!(
            logistic_population(5.0, &LogisticParams { growth_rate: r, ..p }),
            target,
            max_relative = 1e-9
        );
    }

    #[test]
    fn fit_rejects_out_of_range_target() {
        assert!(fit_growth_rate(124.0, 2.5e6, 10.0, 2.5e6).is_err());
        assert!(fit_growth_rate(124.0, 2.5e6, 10.0, 100.0).is_err());
    }

    #[test]
    fn scaling_worked_example() {
        let national = AdoptionCurve::new(vec![(2030, 1_300_000)]).unwrap();
        let local = scale_curve_to_grid(&national, 2_500_000, 126).unwrap();
        // round(1.3e6 * 126 / 2.5e6) = round(65.52) = 66
        assert_eq!(local.yearly_counts, vec![(2030, 66)]);
    }

    #[test]
    fn scaling_zero_curve() {
        let national = AdoptionCurve::new(vec![(2020, 0), (2021, 0)]).unwrap();
        let local = scale_curve_to_grid(&national, 2_500_000, 126).unwrap();
        assert!(local.yearly_counts.iter().all(|&(_, c)| c == 0));
    }

    #[test]
    fn scaling_saturates_at_household_count() {
        let national = AdoptionCurve::new(vec![(2030, 2_500_000), (2031, 2_500_000)]).unwrap();
        let local = scale_curve_to_grid(&national, 2_500_000, 126).unwrap();
        assert!(local.yearly_counts.iter().all(|&(_, c)| c == 126));
    }

    #[test]
    fn rates_are_first_differences() {
        let curve = AdoptionCurve::new(vec![(2020, 2), (2021, 5), (2022, 9)]).unwrap();
        let rates = yearly_adoption_rates(&curve);
        assert_eq!(rates.initial, (2020, 2));
        assert_eq!(rates.rates, vec![(2021, 3), (2022, 4)]);
        // Re-integration reproduces the cumulative curve.
        let mut cumulative = rates.initial.1;
        let mut rebuilt = vec![(rates.initial.0, cumulative)];
        for (y, n) in &rates.rates {
            cumulative += n;
            rebuilt.push((*y, cumulative));
        }
        assert_eq!(rebuilt, curve.yearly_counts);
    }

    #[test]
    fn constant_curve_has_zero_rates() {
        let curve = AdoptionCurve::new(vec![(2020, 4), (2021, 4), (2022, 4)]).unwrap();
        let rates = yearly_adoption_rates(&curve);
        assert!(rates.rates.iter().all(|&(_, n)| n == 0));
    }

    #[test]
    fn zero_rates_give_empty_schedule() {
        let rates = YearlyRates {
            initial: (2020, 0),
            rates: vec![(2021, 0), (2022, 0)],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let schedule = realize_schedule(&rates, RealizationMode::Poisson, 126, &mut rng);
        assert!(schedule.events.is_empty());
    }

    #[test]
    fn deterministic_mode_places_exact_counts_evenly() {
        let rates = YearlyRates {
            initial: (2020, 0),
            rates: vec![(2021, 4)],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let schedule = realize_schedule(&rates, RealizationMode::Deterministic, 126, &mut rng);
        assert_eq!(schedule.events.len(), 4);
        let expected: Vec<Timestamp> = (1..=4u64)
            .map(|i| timeutil::add_hours(timeutil::year_start(2021), (i * 8760 / 5) as i64))
            .collect();
        assert_eq!(schedule.events, expected);
    }

    #[test]
    fn poisson_mode_mean_matches_rate() {
        // Law-of-large-numbers oracle across seeds.
        let rates = YearlyRates {
            initial: (2020, 0),
            rates: vec![(2021, 10)],
        };
        let mut total = 0u64;
        let n = 10_000;
        for seed in 0..n {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            total += realize_schedule(&rates, RealizationMode::Poisson, 10_000, &mut rng)
                .events
                .len() as u64;
        }
        let mean = total as f64 / n as f64;
        assert!((9.8..=10.2).contains(&mean), "mean = {mean}");
    }

    #[test]
    fn schedule_is_reproducible_and_capped() {
        let rates = YearlyRates {
            initial: (2020, 3),
            rates: vec![(2021, 50), (2022, 80)],
        };
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            realize_schedule(&rates, RealizationMode::Poisson, 60, &mut rng)
        };
        assert_eq!(run(7), run(7));
        let schedule = run(7);
        assert!(schedule.events.len() <= 60);
        assert!(schedule.events.windows(2).all(|w| w[0] < w[1]));
        assert!(schedule.events.iter().all(|e| e.year() >= 2020));
    }
}
