//! The hourly simulation loop: adoption events, daily trips, Traditional
//! charging, transformer aggregation, emission accounting, and the
//! one-year-after-first-overload stop rule.

use chrono::{Datelike, NaiveDate, Timelike};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charging::{apply_trip, step_charging, trip_energy};
use crate::driving::{plan_day, TripPlan};
use crate::emissions::{intensity_at, EmissionLedger};
use crate::error::Result;
use crate::fleet::{effective_charge_power, sample_model, EvState, EvStatus};
use crate::grid::{load_factor, overload_stats, LoadTrace, OverloadEvent, OverloadStats};
use crate::io::config::ScenarioInputs;
use crate::timeutil::{self, Timestamp};
use crate::adoption::{realize_schedule, yearly_adoption_rates};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct YearSummary {
    pub year: i32,
    pub evs_at_year_end: usize,
    /// EVs owned at any point during the year (mid-year adopters count).
    pub evs_present: usize,
    pub total_emitted_kg: f64,
    pub avg_emitted_kg_per_ev: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EvAnnualEmissions {
    pub ev_id: usize,
    pub model: String,
    pub by_year: Vec<(i32, f64)>,
}

/// Everything a run produces. The trace, ledger, and event list are carried
/// alongside the summary so every summary field can be recomputed from them.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimulationResult {
    pub sim_start: Timestamp,
    pub stop_time: Timestamp,
    pub seed: u64,
    pub first_overload: Option<OverloadEvent>,
    pub overload_stats: Option<OverloadStats>,
    pub load_factor_first_overload_day: Option<f64>,
    pub coincidence_factor_year_after: Option<f64>,
    pub coincidence_excluded_consumers: usize,
    pub evs_at_first_overload: Option<usize>,
    pub years: Vec<YearSummary>,
    pub per_ev_annual: Vec<EvAnnualEmissions>,
    pub model_distribution_end: Vec<(String, usize)>,
    pub total_charging_energy_kwh: f64,
    pub total_emitted_kg: f64,
    pub infeasible_trips: usize,
    #[serde(skip)]
    pub trace: LoadTrace,
    #[serde(skip)]
    pub charging_ev_counts: Vec<usize>,
    #[serde(skip)]
    pub overload_events: Vec<OverloadEvent>,
    #[serde(skip)]
    pub ledger: EmissionLedger,
}

/// Stop at one year after the first overload, bounded by the hard end.
pub fn stop_time(first_overload: Option<Timestamp>, hard_end: Timestamp) -> Timestamp {
    match first_overload {
        Some(t) => timeutil::plus_one_year(t).min(hard_end),
        None => hard_end,
    }
}

/// Runs one scenario. Identical inputs and seed give identical results.
///
/// Randomness is consumed from a single seeded master stream in a fixed
/// order: adoption realization, household adoption-order shuffle, one model
/// draw per adoption event, then one substream seed per household for the
/// daily trip draws. Daily plans are drawn for every household every day so
/// a household's trips do not depend on when (or whether) it owns an EV.
pub fn run(inputs: &ScenarioInputs) -> Result<SimulationResult> {
    let n_households = inputs.consumption.household_count();
    let mut rng = ChaCha8Rng::seed_from_u64(inputs.seed);

    let rates = yearly_adoption_rates(&inputs.local_curve);
    let schedule = realize_schedule(&rates, inputs.mode, n_households as u64, &mut rng);

    let mut adoption_order: Vec<usize> = (0..n_households).collect();
    adoption_order.shuffle(&mut rng);

    let event_models: Vec<usize> = (0..schedule.events.len())
        .map(|_| sample_model(&inputs.catalog, &mut rng))
        .collect();

    let mut day_rngs: Vec<ChaCha8Rng> = (0..n_households)
        .map(|_| ChaCha8Rng::seed_from_u64(rng.random()))
        .collect();

    let mut evs: Vec<EvState> = Vec::new();
    let mut ev_adopted_at: Vec<Timestamp> = Vec::new();
    let mut household_ev: Vec<Option<usize>> = vec![None; n_households];
    let mut plans: Vec<TripPlan> = Vec::with_capacity(n_households);
    let mut next_event = 0usize;

    let mut trace = LoadTrace::new(inputs.sim_start);
    let mut charging_ev_counts: Vec<usize> = Vec::new();
    let mut overload_events: Vec<OverloadEvent> = Vec::new();
    let mut first_overload: Option<OverloadEvent> = None;
    let mut evs_at_first_overload = None;
    let mut ledger = EmissionLedger::default();
    let mut infeasible_trips = 0usize;

    // Per-household loads recorded from the first overload onward, for the
    // coincidence factor over the following year.
    let mut window_traces: Vec<Vec<f64>> = Vec::new();

    let mut stop = inputs.hard_end;
    let mut t = inputs.sim_start;
    let mut current_day: Option<NaiveDate> = None;
    let mut hourly_charge = vec![0.0f64; n_households];
    let mut ev_energy: Vec<(usize, f64)> = Vec::new();

    while t < stop {
        let hour = t.hour() as usize;
        let day = t.date();

        // New day: draw every household's plan, owner or not.
        if current_day != Some(day) {
            current_day = Some(day);
            plans.clear();
            for (h, day_rng) in day_rngs.iter_mut().enumerate() {
                let profile = crate::driving::DayProfile {
                    loads: inputs.consumption.day_profile(h, day),
                };
                plans.push(plan_day(&profile, &inputs.distances, day_rng));
            }
        }

        // 1. Adoption events due this hour.
        while next_event < schedule.events.len() && schedule.events[next_event] <= t {
            let household = adoption_order[evs.len()];
            let model_idx = event_models[next_event];
            household_ev[household] = Some(evs.len());
            evs.push(EvState {
                model_idx,
                soc_kwh: inputs.catalog.models[model_idx].battery_capacity_kwh,
                status: EvStatus::HomeIdle,
                owner: household,
            });
            ev_adopted_at.push(t);
            next_event += 1;
        }

        let day_start = timeutil::start_of_day(t);
        // EVs drive on days they were owned from the day's start.
        let drives_today =
            |ev_id: usize, adopted: &[Timestamp]| adopted[ev_id] <= day_start;

        // 2. Departures: mark owners away, truncating unfinished sessions.
        for (h, plan) in plans.iter().enumerate() {
            if plan.departure_hour == hour {
                if let Some(ev_id) = household_ev[h] {
                    if drives_today(ev_id, &ev_adopted_at) && evs[ev_id].status != EvStatus::Away {
                        evs[ev_id].status = EvStatus::Away;
                    }
                }
            }
        }

        // 3. Arrivals: deplete trip energy, open a Traditional session.
        for (h, plan) in plans.iter().enumerate() {
            if plan.arrival_hour == hour {
                if let Some(ev_id) = household_ev[h] {
                    if evs[ev_id].status == EvStatus::Away {
                        let model = &inputs.catalog.models[evs[ev_id].model_idx];
                        let energy = trip_energy(plan.distance_km, model.mileage_kwh_per_km);
                        let outcome = apply_trip(evs[ev_id].soc_kwh, energy);
                        if outcome.infeasible {
                            infeasible_trips += 1;
                        }
                        evs[ev_id].soc_kwh = outcome.new_soc_kwh;
                        evs[ev_id].status = if evs[ev_id].soc_kwh
                            < model.battery_capacity_kwh
                        {
                            EvStatus::Charging
                        } else {
                            EvStatus::HomeIdle
                        };
                    }
                }
            }
        }

        // 4. Charging loads for this hour.
        hourly_charge.iter_mut().for_each(|v| *v = 0.0);
        ev_energy.clear();
        let mut charging_sum = 0.0;
        let mut charging_count = 0usize;
        for ev_id in 0..evs.len() {
            if evs[ev_id].status == EvStatus::Charging {
                let model = &inputs.catalog.models[evs[ev_id].model_idx];
                let power = effective_charge_power(model, inputs.catalog.household_power_limit_kw);
                let energy =
                    step_charging(&mut evs[ev_id], model.battery_capacity_kwh, power);
                if energy > 0.0 {
                    charging_count += 1;
                    charging_sum += energy;
                    hourly_charge[evs[ev_id].owner] += energy;
                    ev_energy.push((ev_id, energy));
                }
            }
        }

        // 5. Aggregate with baseline.
        let mut baseline_sum = 0.0;
        for h in 0..n_households {
            baseline_sum += inputs.consumption.load_at(h, t);
        }
        trace.push(baseline_sum, charging_sum);
        charging_ev_counts.push(charging_count);
        let total = baseline_sum + charging_sum;

        // 6. Intensity-weighted emissions for every EV that charged.
        if !ev_energy.is_empty() {
            let intensity = intensity_at(&inputs.intensity, t, inputs.sim_start, inputs.decay);
            for &(ev_id, energy) in &ev_energy {
                ledger.record(ev_id, t, energy, intensity);
            }
        }

        // 7. Overload detection and the stop rule.
        if total > inputs.grid.transformer_capacity_kw {
            let event = OverloadEvent {
                timestamp: t,
                magnitude_kw: total - inputs.grid.transformer_capacity_kw,
                simultaneous_charging_evs: charging_count,
                total_charging_load_kw: charging_sum,
            };
            overload_events.push(event);
            if first_overload.is_none() {
                first_overload = Some(event);
                evs_at_first_overload = Some(evs.len());
                stop = stop_time(Some(t), inputs.hard_end);
                window_traces = vec![Vec::new(); n_households];
            }
        }

        // Per-household loads within the year after the first overload.
        if first_overload.is_some() {
            for h in 0..n_households {
                window_traces[h].push(inputs.consumption.load_at(h, t) + hourly_charge[h]);
            }
        }

        t = timeutil::add_hours(t, 1);
    }

    finalize(
        inputs,
        trace,
        charging_ev_counts,
        overload_events,
        first_overload,
        evs_at_first_overload,
        window_traces,
        &evs,
        &ev_adopted_at,
        ledger,
        infeasible_trips,
        stop,
    )
}

#[allow(clippy::too_many_arguments)]
fn finalize(
    inputs: &ScenarioInputs,
    trace: LoadTrace,
    charging_ev_counts: Vec<usize>,
    overload_events: Vec<OverloadEvent>,
    first_overload: Option<OverloadEvent>,
    evs_at_first_overload: Option<usize>,
    window_traces: Vec<Vec<f64>>,
    evs: &[EvState],
    ev_adopted_at: &[Timestamp],
    ledger: EmissionLedger,
    infeasible_trips: usize,
    stop: Timestamp,
) -> Result<SimulationResult> {
    let load_factor_first_overload_day = first_overload
        .map(|event| {
            let day_start = timeutil::start_of_day(event.timestamp);
            let start_idx = trace.index_of(day_start).expect("overload day in trace");
            let end_idx = (start_idx + 24).min(trace.len());
            let totals: Vec<f64> = (start_idx..end_idx).map(|i| trace.total_at(i)).collect();
            load_factor(&totals)
        })
        .transpose()?;

    let (coincidence_factor_year_after, coincidence_excluded_consumers) = match first_overload {
        Some(_) => {
            let result = crate::grid::coincidence_factor(&window_traces)?;
            (Some(result.factor), result.excluded_consumers)
        }
        None => (None, 0),
    };

    // Per-year tallies.
    let mut years = Vec::new();
    for year in inputs.sim_start.year()..=stop.year() {
        let year_end = timeutil::year_start(year + 1);
        if timeutil::year_start(year) >= stop {
            break;
        }
        let evs_at_year_end = ev_adopted_at.iter().filter(|&&a| a < year_end).count();
        let evs_present = evs_at_year_end; // all adoptions up to year end were present
        let total_emitted_kg = ledger.emitted_in_year(year);
        years.push(YearSummary {
            year,
            evs_at_year_end,
            evs_present,
            total_emitted_kg,
            avg_emitted_kg_per_ev: (evs_present > 0)
                .then(|| total_emitted_kg / evs_present as f64),
        });
    }

    let mut per_ev_annual: Vec<EvAnnualEmissions> = evs
        .iter()
        .enumerate()
        .map(|(ev_id, ev)| EvAnnualEmissions {
            ev_id,
            model: inputs.catalog.models[ev.model_idx].name.clone(),
            by_year: Vec::new(),
        })
        .collect();
    for record in &ledger.records {
        let year = record.timestamp.year();
        let entry = &mut per_ev_annual[record.ev_id].by_year;
        match entry.iter_mut().find(|(y, _)| *y == year) {
            Some((_, kg)) => *kg += record.emitted_kg,
            None => entry.push((year, record.emitted_kg)),
        }
    }

    let mut model_distribution_end: Vec<(String, usize)> = inputs
        .catalog
        .models
        .iter()
        .map(|m| (m.name.clone(), 0))
        .collect();
    for ev in evs {
        model_distribution_end[ev.model_idx].1 += 1;
    }

    Ok(SimulationResult {
        sim_start: inputs.sim_start,
        stop_time: stop,
        seed: inputs.seed,
        first_overload,
        overload_stats: first_overload
            .map(|e| overload_stats(&overload_events, e.timestamp)),
        load_factor_first_overload_day,
        coincidence_factor_year_after,
        coincidence_excluded_consumers,
        evs_at_first_overload,
        years,
        per_ev_annual,
        model_distribution_end,
        total_charging_energy_kwh: trace.charging_kw.iter().sum(),
        total_emitted_kg: ledger.total_emitted_kg(),
        infeasible_trips,
        trace,
        charging_ev_counts,
        overload_events,
        ledger,
    })
}

/// One row of a scenario-comparison report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub first_overload: Option<Timestamp>,
    pub overloads_following_year: Option<usize>,
    pub days_with_overload: Option<usize>,
    pub evs_at_first_overload: Option<usize>,
    pub avg_emissions_2031_kg: Option<f64>,
}

/// Runs each labeled scenario and tabulates the headline outputs.
pub fn compare_scenarios(scenarios: &[(String, ScenarioInputs)]) -> Result<Vec<ComparisonRow>> {
    scenarios
        .iter()
        .map(|(label, inputs)| {
            let result = run(inputs)?;
            Ok(ComparisonRow {
                label: label.clone(),
                first_overload: result.first_overload.map(|e| e.timestamp),
                overloads_following_year: result.overload_stats.map(|s| s.count_following_year),
                days_with_overload: result.overload_stats.map(|s| s.days_with_overload),
                evs_at_first_overload: result.evs_at_first_overload,
                avg_emissions_2031_kg: result
                    .years
                    .iter()
                    .find(|y| y.year == 2031)
                    .and_then(|y| y.avg_emitted_kg_per_ev),
            })
        })
        .collect()
}
