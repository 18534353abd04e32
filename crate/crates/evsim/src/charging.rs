//! Trip energy accounting and the Traditional charging strategy: charge at
//! full effective power immediately upon arrival until the battery is full.

use crate::fleet::{EvState, EvStatus};

/// Energy consumed by a trip of `distance_km` at `mileage_kwh_per_km`.
pub fn trip_energy(distance_km: f64, mileage_kwh_per_km: f64) -> f64 {
    distance_km * mileage_kwh_per_km
}

/// Outcome of depleting an EV battery for a trip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripOutcome {
    pub new_soc_kwh: f64,
    /// True when the trip demanded more energy than was stored; the SoC is
    /// clamped to zero and the event should be logged as a diagnostic.
    pub infeasible: bool,
}

/// Removes trip energy from the battery, clamping at empty.
pub fn apply_trip(soc_kwh: f64, energy_kwh: f64) -> TripOutcome {
    if energy_kwh > soc_kwh {
        TripOutcome {
            new_soc_kwh: 0.0,
            infeasible: true,
        }
    } else {
        TripOutcome {
            new_soc_kwh: soc_kwh - energy_kwh,
            infeasible: false,
        }
    }
}

/// One hour of Traditional charging at `power_kw`, limited by the remaining
/// battery deficit and the fraction of the hour the EV is plugged in.
/// Returns (average load over the hour in kW, energy delivered in kWh).
pub fn charging_energy_for_hour(
    soc_kwh: f64,
    capacity_kwh: f64,
    power_kw: f64,
    hour_fraction: f64,
) -> f64 {
    (power_kw * hour_fraction).min((capacity_kwh - soc_kwh).max(0.0))
}

/// Advances a charging EV by one hour; flips it back to idle once full.
/// Returns the hourly average load in kW (numerically equal to the energy).
pub fn step_charging(ev: &mut EvState, capacity_kwh: f64, power_kw: f64) -> f64 {
    debug_assert_eq!(ev.status, EvStatus::Charging);
    let energy = charging_energy_for_hour(ev.soc_kwh, capacity_kwh, power_kw, 1.0);
    ev.soc_kwh += energy;
    if ev.soc_kwh >= capacity_kwh {
        ev.soc_kwh = capacity_kwh;
        ev.status = EvStatus::HomeIdle;
    }
    energy
}
