//! Departure/arrival inference from daily consumption profiles, randomized
//! fallbacks, and trip-distance sampling.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

pub const DEPARTURE_WINDOW: (usize, usize) = (5, 9);
pub const ARRIVAL_WINDOW: (usize, usize) = (14, 22);

/// One day of hourly consumption, kW averaged over each hour.
#[derive(Debug, Clone, Copy)]
pub struct DayProfile {
    pub loads: [f64; 24],
}

/// Average load over hours 0..=5 (inclusive, six samples).
pub fn idle_load(profile: &DayProfile) -> f64 {
    profile.loads[0..=5].iter().sum::<f64>() / 6.0
}

/// Activity threshold: 80% above the idle load.
pub fn significance_threshold(idle: f64) -> f64 {
    1.8 * idle
}

/// Departure hour: within the window, find the first hour with load above
/// the threshold (residents awake), then the first later in-window hour at
/// or below it (residents departed). None if no such pattern exists.
pub fn infer_departure(profile: &DayProfile, threshold: f64) -> Option<usize> {
    let (lo, hi) = DEPARTURE_WINDOW;
    let rise = (lo..=hi).find(|&h| profile.loads[h] > threshold)?;
    ((rise + 1)..=hi).find(|&h| profile.loads[h] <= threshold)
}

/// Arrival hour: first in-window hour where the load crosses above the
/// threshold. If the window already starts above it, the crossing happened
/// earlier and the window start is returned.
pub fn infer_arrival(profile: &DayProfile, threshold: f64) -> Option<usize> {
    let (lo, hi) = ARRIVAL_WINDOW;
    (lo..=hi).find(|&h| {
        profile.loads[h] > threshold && (h == lo || profile.loads[h - 1] <= threshold)
    })
}

/// Random fallback pair: departure uniform over 5..=9, arrival over 14..=22.
pub fn fallback_times<R: Rng>(rng: &mut R) -> (usize, usize) {
    let departure = rng.random_range(DEPARTURE_WINDOW.0..=DEPARTURE_WINDOW.1);
    let arrival = rng.random_range(ARRIVAL_WINDOW.0..=ARRIVAL_WINDOW.1);
    (departure, arrival)
}

/// Discrete trip-distance distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceDistribution {
    /// (distance_km, probability) bins; probabilities sum to 1.
    pub bins: Vec<(f64, f64)>,
}

impl DistanceDistribution {
    pub fn new(bins: Vec<(f64, f64)>) -> Result<Self> {
        if bins.is_empty() {
            return Err(SimError::validation("distance distribution is empty"));
        }
        if bins.iter().any(|&(d, p)| d <= 0.0 || p < 0.0) {
            return Err(SimError::validation(
                "distances must be > 0 and probabilities >= 0",
            ));
        }
        let total: f64 = bins.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(SimError::validation(format!(
                "distance probabilities sum to {total}, expected 1"
            )));
        }
        Ok(DistanceDistribution { bins })
    }

    /// Reads `distance_km,probability` CSV.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let mut reader = csv::Reader::from_path(path).map_err(|e| SimError::Parse {
            path: display.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        let mut bins = Vec::new();
        for (idx, row) in reader.deserialize::<(f64, f64)>().enumerate() {
            let bin = row.map_err(|e| SimError::Parse {
                path: display.clone(),
                line: idx as u64 + 2,
                message: e.to_string(),
            })?;
            bins.push(bin);
        }
        DistanceDistribution::new(bins)
    }

    pub fn mean(&self) -> f64 {
        self.bins.iter().map(|&(d, p)| d * p).sum()
    }
}

/// Categorical draw over the distance bins.
pub fn sample_distance<R: Rng>(dist: &DistanceDistribution, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(d, p) in &dist.bins {
        acc += p;
        if u < acc {
            return d;
        }
    }
    dist.bins.last().expect("non-empty").0
}

/// A household's plan for one simulated day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripPlan {
    pub departure_hour: usize,
    pub arrival_hour: usize,
    pub distance_km: f64,
}

/// Builds the day's trip plan: inferred times where detection succeeds,
/// random fallbacks for the hours it cannot find, then a distance draw.
pub fn plan_day<R: Rng>(
    profile: &DayProfile,
    dist: &DistanceDistribution,
    rng: &mut R,
) -> TripPlan {
    let threshold = significance_threshold(idle_load(profile));
    let inferred_dep = infer_departure(profile, threshold);
    let inferred_arr = infer_arrival(profile, threshold);
    let (departure_hour, arrival_hour) = match (inferred_dep, inferred_arr) {
        (Some(d), Some(a)) => (d, a),
        _ => {
            let (fd, fa) = fallback_times(rng);
            (inferred_dep.unwrap_or(fd), inferred_arr.unwrap_or(fa))
        }
    };
    TripPlan {
        departure_hour,
        arrival_hour,
        distance_km: sample_distance(dist, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn profile_with(hours: &[(usize, f64)]) -> DayProfile {
        let mut loads = [0.0; 24];
        for &(h, v) in hours {
            loads[h] = v;
        }
        DayProfile { loads }
    }

    #[test]
    fn idle_load_cases() {
        assert_relative_eq!(idle_load(&DayProfile { loads: [0.0; 24] }), 0.0);
        let mut loads = [5.0; 24];
        loads[..6].copy_from_slice(&[1.0; 6]);
        assert_relative_eq!(idle_load(&DayProfile { loads }), 1.0);
        let p = profile_with(&[(0, 0.2), (1, 0.2), (2, 0.3), (3, 0.3), (4, 0.4), (5, 0.4)]);
        assert_relative_eq!(idle_load(&p), 0.3, max_relative = 1e-12);
    }

    #[test]
    fn threshold_is_80_percent_above_idle() {
        assert_relative_eq!(significance_threshold(0.0), 0.0);
        assert_relative_eq!(significance_threshold(0.3), 0.54, max_relative = 1e-12);
        assert_relative_eq!(significance_threshold(1.0), 1.8);
    }

    #[test]
    fn departure_detected_after_morning_activity() {
        // Hours 5..9 = [0.2, 0.9, 0.9, 0.3, 0.3], threshold 0.54:
        // rise at 6, first sub-threshold hour after it is 8.
        let p = profile_with(&[(5, 0.2), (6, 0.9), (7, 0.9), (8, 0.3), (9, 0.3)]);
        assert_eq!(infer_departure(&p, 0.54), Some(8));
    }

    #[test]
    fn departure_none_without_rise_or_drop() {
        let flat_low = profile_with(&[(5, 0.1), (6, 0.2), (7, 0.1), (8, 0.2), (9, 0.1)]);
        assert_eq!(infer_departure(&flat_low, 0.54), None);
        let always_high = profile_with(&[(5, 0.9), (6, 0.9), (7, 0.9), (8, 0.9), (9, 0.9)]);
        assert_eq!(infer_departure(&always_high, 0.54), None);
    }

    #[test]
    fn arrival_detected_at_evening_rise() {
        let mut loads = [0.3; 24];
        loads[17..24].fill(0.9);
        assert_eq!(infer_arrival(&DayProfile { loads }, 0.54), Some(17));
    }

    #[test]
    fn arrival_none_when_flat() {
        let p = DayProfile { loads: [0.3; 24] };
        assert_eq!(infer_arrival(&p, 0.54), None);
    }

    #[test]
    fn arrival_at_window_start_when_already_high() {
        let p = DayProfile { loads: [0.9; 24] };
        assert_eq!(infer_arrival(&p, 0.54), Some(14));
    }

    #[test]
    fn inference_windows_keep_arrival_after_departure() {
        // Departure window ends before the arrival window starts.
        assert!(DEPARTURE_WINDOW.1 < ARRIVAL_WINDOW.0);
    }

    #[test]
    fn fallback_is_uniform_and_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let mut dep_counts = [0u32; 24];
        for _ in 0..n {
            let (d, a) = fallback_times(&mut rng);
            assert!((5..=9).contains(&d));
            assert!((14..=22).contains(&a));
            assert!(a > d);
            dep_counts[d] += 1;
        }
        for (h, &count) in dep_counts.iter().enumerate().take(10).skip(5) {
            let freq = count as f64 / n as f64;
            assert!((freq - 0.2).abs() < 0.02, "hour {h}: {freq}");
        }
    }

    #[test]
    fn fallback_is_reproducible() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| fallback_times(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
    }

    #[test]
    fn single_bin_distance_is_constant() {
        let dist = DistanceDistribution::new(vec![(30.0, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_relative_eq!(sample_distance(&dist, &mut rng), 30.0);
    }

    #[test]
    fn distance_mean_matches_expectation() {
        let dist = DistanceDistribution::new(vec![(20.0, 0.5), (60.0, 0.5)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mean = (0..n).map(|_| sample_distance(&dist, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 40.0).abs() < 0.5, "mean = {mean}");
    }

    #[test]
    fn constant_profile_takes_fallback_path() {
        let p = DayProfile { loads: [0.4; 24] };
        let threshold = significance_threshold(idle_load(&p));
        assert_eq!(infer_departure(&p, threshold), None);
        assert_eq!(infer_arrival(&p, threshold), None);
        let dist = DistanceDistribution::new(vec![(30.0, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let plan = plan_day(&p, &dist, &mut rng);
        assert!((5..=9).contains(&plan.departure_hour));
        assert!((14..=22).contains(&plan.arrival_hour));
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(DistanceDistribution::new(vec![]).is_err());
        assert!(DistanceDistribution::new(vec![(30.0, 0.5)]).is_err());
        assert!(DistanceDistribution::new(vec![(-1.0, 1.0)]).is_err());
    }
}
