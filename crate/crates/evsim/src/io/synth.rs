//! Deterministic synthetic dataset generation. The shipped example data is
//! produced by these generators; the real TREFOR consumption data and
//! Energinet intensity data are not redistributable, so the repo carries
//! clearly labeled synthetic stand-ins with the same schemas.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};
use crate::timeutil;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |e| SimError::Io {
        path: path.display().to_string(),
        source: e,
    }
}

/// Shape parameters of one synthetic household.
struct HouseholdShape {
    idle_kw: f64,
    morning_peak_kw: f64,
    evening_peak_kw: f64,
    departure_hour: usize,
    arrival_hour: usize,
    /// Flat households have no morning/evening structure and exercise the
    /// random-fallback path of the trip inference.
    flat: bool,
}

fn shape_for(rng: &mut ChaCha8Rng) -> HouseholdShape {
    let idle = 0.15 + rng.random_range(0.0..0.2);
    let flat = rng.random_range(0.0..1.0) < 0.3;
    // Evening arrivals cluster at 17 to give the grid a coincident peak.
    let arrival = if rng.random_range(0.0..1.0) < 0.6 {
        17
    } else {
        14 + rng.random_range(0..9)
    };
    HouseholdShape {
        idle_kw: idle,
        morning_peak_kw: idle * (2.4 + rng.random_range(0.0..0.8)),
        evening_peak_kw: idle * (2.8 + rng.random_range(0.0..1.2)),
        departure_hour: 7 + rng.random_range(0..2),
        arrival_hour: arrival,
        flat,
    }
}

fn hourly_value(shape: &HouseholdShape, day_of_year: u32, hour: usize, noise: f64) -> f64 {
    let seasonal = 1.0 + 0.25 * (TAU * (day_of_year as f64 - 15.0) / 365.0).cos();
    let base = if shape.flat {
        shape.idle_kw * 1.2
    } else if hour >= 6 && hour < shape.departure_hour {
        shape.morning_peak_kw
    } else if hour >= shape.arrival_hour && hour < 23 {
        shape.evening_peak_kw
    } else {
        shape.idle_kw
    };
    (base * seasonal * (1.0 + noise)).max(0.01)
}

/// Writes `household_id,timestamp,kwh` for `n` synthetic households over one
/// calendar year. Gzip-compressed when the path ends in `.gz`.
pub fn write_synth_consumption(path: &Path, n: usize, year: i32, seed: u64) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out: Box<dyn Write> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(BufWriter::new(flate2::write::GzEncoder::new(
            file,
            flate2::Compression::default(),
        )))
    } else {
        Box::new(BufWriter::new(file))
    };
    writeln!(out, "household_id,timestamp,kwh").map_err(io_err(path))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hours = timeutil::hours_in_year(year) as i64;
    for i in 0..n {
        let shape = shape_for(&mut rng);
        let mut noise_rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9));
        for h in 0..hours {
            let ts = timeutil::add_hours(timeutil::year_start(year), h);
            use chrono::Datelike;
            let value = hourly_value(
                &shape,
                ts.ordinal(),
                (h % 24) as usize,
                noise_rng.random_range(-0.05..0.05),
            );
            writeln!(
                out,
                "hh_{i:03},{},{:.4}",
                ts.format("%Y-%m-%dT%H:%M:%S"),
                value
            )
            .map_err(io_err(path))?;
        }
    }
    out.flush().map_err(io_err(path))
}

/// Writes a synthetic hourly CO2-eq intensity year: seasonal plus diurnal
/// structure around a Danish-like 2019 level.
pub fn write_synth_intensity(path: &Path, year: i32, seed: u64) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "timestamp,co2_g_per_kwh").map_err(io_err(path))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hours = timeutil::hours_in_year(year) as i64;
    for h in 0..hours {
        let ts = timeutil::add_hours(timeutil::year_start(year), h);
        use chrono::Datelike;
        let seasonal = 80.0 * (TAU * (ts.ordinal() as f64 + 10.0) / 365.0).cos();
        let diurnal = 40.0 * (TAU * ((h % 24) as f64 - 4.0) / 24.0).cos();
        let value = (150.0 + seasonal + diurnal + rng.random_range(-15.0..15.0)).max(10.0);
        writeln!(out, "{},{:.2}", ts.format("%Y-%m-%dT%H:%M:%S"), value).map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}
