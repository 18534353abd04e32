#!/usr/bin/env python3
"""Generates the 10-household golden fixture and its expected result.

Writes the fixture input files under data/fixture10/ and an independently
computed golden summary JSON under crates/evsim/tests/golden/. The summary
is produced by re-simulating the fixture here, in Python, following the
documented engine semantics step by step; it is not a copy of the Rust
tool's output.

The fixture is constructed so that no random draw can influence the result:
all ten households share one consumption profile whose departure/arrival
inference always succeeds, the catalog has a single model, the distance
distribution has a single bin, adoption is deterministic, and the carbon
intensity is constant with decay disabled. Every arithmetic step below uses
IEEE doubles in the same evaluation order as the engine, so the comparison
in the test suite is exact.
"""

import csv
import gzip
import io
import json
import os
from datetime import date, datetime, timedelta

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURE_DIR = os.path.join(ROOT, "data", "fixture10")
GOLDEN_DIR = os.path.join(ROOT, "crates", "evsim", "tests", "golden")

N_HOUSEHOLDS = 10
SOURCE_YEAR = 2019
SIM_START = datetime(2020, 1, 1)
HARD_END = datetime(2027, 1, 1)
SEED = 7
CAPACITY_KW = 25.0
BATTERY_KWH = 40.0
MILEAGE = 0.15
POWER_KW = 11.0
LIMIT_KW = 17.3
DISTANCE_KM = 30.0
INTENSITY = 100.0
CURVE = [(2020, 0), (2021, 2), (2022, 4), (2023, 6), (2024, 8), (2025, 10), (2026, 10)]

# Shared daily profile: idle 0.25 kW, morning activity 6-7, evening 17-22.
DAY_PROFILE = [0.25] * 24
DAY_PROFILE[6] = 0.75
DAY_PROFILE[7] = 0.75
for h in range(17, 23):
    DAY_PROFILE[h] = 0.75


def is_leap(year):
    return (year % 4 == 0 and year % 100 != 0) or year % 400 == 0


def hours_in_year(year):
    return (366 if is_leap(year) else 365) * 24


def iso(t):
    return t.strftime("%Y-%m-%dT%H:%M:%S")


def write_fixture_inputs():
    os.makedirs(FIXTURE_DIR, exist_ok=True)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["household_id", "timestamp", "kwh"])
    start = datetime(SOURCE_YEAR, 1, 1)
    for i in range(N_HOUSEHOLDS):
        for h in range(hours_in_year(SOURCE_YEAR)):
            t = start + timedelta(hours=h)
            w.writerow([f"hh_{i:02d}", iso(t), DAY_PROFILE[t.hour]])
    path = os.path.join(FIXTURE_DIR, "consumption_10_2019.csv.gz")
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(buf.getvalue().encode())

    with open(os.path.join(FIXTURE_DIR, "intensity_2019_const.csv"), "w") as f:
        f.write("timestamp,co2_g_per_kwh\n")
        for h in range(hours_in_year(SOURCE_YEAR)):
            f.write(f"{iso(start + timedelta(hours=h))},{INTENSITY}\n")

    with open(os.path.join(FIXTURE_DIR, "curve_local.csv"), "w") as f:
        f.write("year,cumulative_evs\n")
        for year, count in CURVE:
            f.write(f"{year},{count}\n")

    with open(os.path.join(FIXTURE_DIR, "catalog_single.csv"), "w") as f:
        f.write("name,capacity_kwh,mileage_kwh_per_km,max_power_kw,share\n")
        f.write(f"Compact EV,{BATTERY_KWH},{MILEAGE},{POWER_KW},1.0\n")

    with open(os.path.join(FIXTURE_DIR, "distance_30km.csv"), "w") as f:
        f.write("distance_km,probability\n")
        f.write(f"{DISTANCE_KM},1.0\n")

    config = {
        "schema_version": 1,
        "sim_start": iso(SIM_START),
        "hard_end": iso(HARD_END),
        "seed": SEED,
        "adoption": {"curve_csv": "curve_local.csv", "mode": "deterministic"},
        "catalog_csv": "catalog_single.csv",
        "household_power_limit_kw": LIMIT_KW,
        "consumption_csv": "consumption_10_2019.csv.gz",
        "intensity_csv": "intensity_2019_const.csv",
        "distance_csv": "distance_30km.csv",
        "transformer_capacity_kw": CAPACITY_KW,
        "decay": "disabled",
    }
    with open(os.path.join(FIXTURE_DIR, "fixture10.json"), "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")


def infer_times(profile):
    """Departure/arrival inference, mirroring the documented rules."""
    idle = sum(profile[0:6]) / 6.0
    threshold = 1.8 * idle
    departure = None
    rise = None
    for h in range(5, 10):
        if profile[h] > threshold:
            rise = h
            break
    if rise is not None:
        for h in range(rise + 1, 10):
            if profile[h] <= threshold:
                departure = h
                break
    arrival = None
    for h in range(14, 23):
        if profile[h] > threshold and (h == 14 or profile[h - 1] <= threshold):
            arrival = h
            break
    return departure, arrival


def adoption_events():
    events = []
    initial_year, initial = CURVE[0]
    for _ in range(initial):
        events.append(datetime(initial_year, 1, 1))
    for (y0, c0), (y1, c1) in zip(CURVE, CURVE[1:]):
        rate = c1 - c0
        hours = hours_in_year(y1)
        for i in range(rate):
            offset = (i + 1) * hours // (rate + 1)
            events.append(datetime(y1, 1, 1) + timedelta(hours=offset))
    events.sort()
    return events


def simulate():
    events = adoption_events()
    dep_hour, arr_hour = infer_times(DAY_PROFILE)
    assert dep_hour is not None and arr_hour is not None
    trip_kwh = DISTANCE_KM * MILEAGE
    power = min(POWER_KW, LIMIT_KW)

    evs = []  # dicts: soc, status, adopted
    next_event = 0
    stop = HARD_END
    t = SIM_START
    ledger = []  # (ev_id, timestamp, energy, intensity, emitted_kg)
    trace = []  # (timestamp, baseline, charging)
    overloads = []  # (timestamp, magnitude, n_charging, charging_sum)
    first_overload = None
    evs_at_first_overload = None
    window = None  # per-household load lists from first overload on

    while t < stop:
        hour = t.hour
        day_start = datetime(t.year, t.month, t.day)

        while next_event < len(events) and events[next_event] <= t:
            evs.append({"soc": BATTERY_KWH, "status": "idle", "adopted": t})
            next_event += 1

        if hour == dep_hour:
            for ev in evs:
                if ev["adopted"] <= day_start and ev["status"] != "away":
                    ev["status"] = "away"

        if hour == arr_hour:
            for ev in evs:
                if ev["status"] == "away":
                    ev["soc"] = ev["soc"] - trip_kwh  # always feasible here
                    ev["status"] = "charging" if ev["soc"] < BATTERY_KWH else "idle"

        charging_sum = 0.0
        n_charging = 0
        ev_energy = []
        per_household_charge = [0.0] * N_HOUSEHOLDS
        for ev_id, ev in enumerate(evs):
            if ev["status"] == "charging":
                energy = min(power, BATTERY_KWH - ev["soc"])
                ev["soc"] += energy
                if ev["soc"] >= BATTERY_KWH:
                    ev["soc"] = BATTERY_KWH
                    ev["status"] = "idle"
                if energy > 0.0:
                    n_charging += 1
                    charging_sum += energy
                    per_household_charge[ev_id] += energy
                    ev_energy.append((ev_id, energy))

        baseline_sum = 0.0
        for _ in range(N_HOUSEHOLDS):
            baseline_sum += DAY_PROFILE[hour]
        trace.append((t, baseline_sum, charging_sum))
        total = baseline_sum + charging_sum

        for ev_id, energy in ev_energy:
            ledger.append((ev_id, t, energy, INTENSITY, energy * INTENSITY / 1000.0))

        if total > CAPACITY_KW:
            event = (t, total - CAPACITY_KW, n_charging, charging_sum)
            overloads.append(event)
            if first_overload is None:
                first_overload = event
                evs_at_first_overload = len(evs)
                one_year = t.replace(year=t.year + 1)
                stop = min(HARD_END, one_year)
                window = [[] for _ in range(N_HOUSEHOLDS)]

        if first_overload is not None:
            for h in range(N_HOUSEHOLDS):
                window[h].append(DAY_PROFILE[hour] + per_household_charge[h])

        t += timedelta(hours=1)

    return summarize(evs, ledger, trace, overloads, first_overload, evs_at_first_overload, window, stop)


def summarize(evs, ledger, trace, overloads, first_overload, evs_at_first_overload, window, stop):
    t0 = first_overload[0]
    window_end = t0.replace(year=t0.year + 1)
    following = [e for e in overloads if t0 < e[0] <= window_end]
    days = sorted({e[0].date() for e in following})

    day0 = datetime(t0.year, t0.month, t0.day)
    day_totals = [b + c for (ts, b, c) in trace if day0 <= ts < day0 + timedelta(hours=24)]
    mean = 0.0
    for v in day_totals:
        mean += v
    mean /= len(day_totals)
    load_factor = mean / max(day_totals)

    peaks = [max(w) for w in window]
    individual_sum = 0.0
    excluded = 0
    for p in peaks:
        if p > 0.0:
            individual_sum += p
        else:
            excluded += 1
    agg_peak = max(sum(w[i] for w in window) for i in range(len(window[0])))
    coincidence = agg_peak / individual_sum

    years = []
    for year in range(SIM_START.year, stop.year + 1):
        if datetime(year, 1, 1) >= stop:
            break
        year_end = datetime(year + 1, 1, 1)
        present = sum(1 for ev in evs if ev["adopted"] < year_end)
        total_kg = 0.0
        for (_, ts, _, _, kg) in ledger:
            if ts.year == year:
                total_kg += kg
        years.append({
            "year": year,
            "evs_at_year_end": present,
            "evs_present": present,
            "total_emitted_kg": total_kg,
            "avg_emitted_kg_per_ev": (total_kg / present) if present > 0 else None,
        })

    per_ev = []
    for ev_id in range(len(evs)):
        by_year = []
        for (rid, ts, _, _, kg) in ledger:
            if rid != ev_id:
                continue
            for entry in by_year:
                if entry[0] == ts.year:
                    entry[1] += kg
                    break
            else:
                by_year.append([ts.year, kg])
        per_ev.append({"ev_id": ev_id, "model": "Compact EV", "by_year": by_year})

    total_charging = 0.0
    for (_, _, c) in trace:
        total_charging += c
    total_emitted = 0.0
    for (_, _, _, _, kg) in ledger:
        total_emitted += kg

    return {
        "sim_start": iso(SIM_START),
        "stop_time": iso(stop),
        "seed": SEED,
        "first_overload": {
            "timestamp": iso(t0),
            "magnitude_kw": first_overload[1],
            "simultaneous_charging_evs": first_overload[2],
            "total_charging_load_kw": first_overload[3],
        },
        "overload_stats": {
            "count_following_year": len(following),
            "days_with_overload": len(days),
        },
        "load_factor_first_overload_day": load_factor,
        "coincidence_factor_year_after": coincidence,
        "coincidence_excluded_consumers": excluded,
        "evs_at_first_overload": evs_at_first_overload,
        "years": years,
        "per_ev_annual": per_ev,
        "model_distribution_end": [["Compact EV", len(evs)]],
        "total_charging_energy_kwh": total_charging,
        "total_emitted_kg": total_emitted,
        "infeasible_trips": 0,
    }


def main():
    write_fixture_inputs()
    summary = simulate()
    os.makedirs(GOLDEN_DIR, exist_ok=True)
    with open(os.path.join(GOLDEN_DIR, "golden_summary.json"), "w") as f:
        json.dump(summary, f, indent=2)
        f.write("\n")
    print("first overload:", summary["first_overload"]["timestamp"])
    print("stop:", summary["stop_time"])
    print("overloads following year:", summary["overload_stats"])


if __name__ == "__main__":
    main()
