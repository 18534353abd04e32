use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::Datelike;
use clap::{Args, Parser, Subcommand};

use evsim::adoption::fit_growth_rate;
use evsim::emissions::{fleet_projection, required_evs_for_cap, FleetProjectionInputs, KG_PER_MEGATON};
use evsim::engine::{self, SimulationResult};
use evsim::io::config::{ScenarioConfig, ScenarioInputs};
use evsim::io::manifest::RunManifest;
use evsim::io::{export, plot, synth};
use evsim::timeutil;

#[derive(Parser)]
#[command(
    name = "evsim",
    version,
    about = "Hourly EV adoption, distribution-grid loading, and charging-emission simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and export summary, traces, ledger, and plots
    Run(RunArgs),
    /// Run several scenarios sharing a seed and tabulate the results
    Compare(CompareArgs),
    /// Fleet-level annual emission projection and required-EV threshold
    Project(ProjectArgs),
    /// Fit a logistic growth rate through two population points
    Fit(FitArgs),
    /// Generate the synthetic consumption and intensity example datasets
    SynthData(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config file
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: $EVSIM_OUT_DIR or ./out)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, num_args = 1.., required = true)]
    configs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectArgs {
    /// Number of EVs in the fleet
    #[arg(long)]
    evs: u64,
    /// Annual kg CO2-eq per EV
    #[arg(long = "ev-kg")]
    ev_kg: f64,
    /// Total car fleet size
    #[arg(long)]
    fleet: u64,
    /// Annual kg CO2-eq per conventional car
    #[arg(long = "ice-kg")]
    ice_kg: f64,
    /// Emission cap in kg; when given, also prints the required EV count
    #[arg(long)]
    cap: Option<f64>,
}

#[derive(Args)]
struct FitArgs {
    /// Initial population at t = 0
    #[arg(long)]
    p0: f64,
    /// Carrying capacity
    #[arg(long)]
    a: f64,
    /// Years between the two points
    #[arg(long)]
    t: f64,
    /// Population at t
    #[arg(long)]
    pt: f64,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 126)]
    households: usize,
    #[arg(long, default_value_t = 2019)]
    year: i32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn out_dir(arg: Option<PathBuf>) -> PathBuf {
    arg.or_else(|| std::env::var_os("EVSIM_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = serde_json::json!({ "error": e.to_string() });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Project(args) => cmd_project(args),
        Command::Fit(args) => cmd_fit(args),
        Command::SynthData(args) => cmd_synth(args),
    }
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let mut config = ScenarioConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = out_dir(args.out);
    std::fs::create_dir_all(&out)?;
    let inputs = ScenarioInputs::load(&config)?;
    let result = engine::run(&inputs)?;

    export::write_summary_json(&result, &out.join("summary.json"))?;
    export::write_trace_csv(
        &result.trace,
        inputs.grid.transformer_capacity_kw,
        &out.join("trace.csv"),
    )?;
    export::write_ledger_csv(&result.ledger, &out.join("ledger.csv"))?;
    write_plots(&result, inputs.grid.transformer_capacity_kw, &out)?;
    RunManifest::build(&args.config, &config.input_paths(), config.seed)?
        .write(&out.join("manifest.json"))?;

    match &result.first_overload {
        Some(e) => println!(
            "first overload {} ({:.2} kW over, {} EVs charging); {} overloads on {} days the following year",
            e.timestamp,
            e.magnitude_kw,
            e.simultaneous_charging_evs,
            result.overload_stats.map_or(0, |s| s.count_following_year),
            result.overload_stats.map_or(0, |s| s.days_with_overload),
        ),
        None => println!("no overload before {}", result.stop_time),
    }
    println!("results written to {}", out.display());
    Ok(())
}

fn write_plots(result: &SimulationResult, capacity: f64, out: &Path) -> anyhow::Result<()> {
    let plots = out.join("plots");
    std::fs::create_dir_all(&plots)?;
    if let Some(event) = &result.first_overload {
        let day_start = timeutil::start_of_day(event.timestamp);
        if let Some(start) = result.trace.index_of(day_start) {
            let end = (start + 24).min(result.trace.len());
            let totals: Vec<f64> = (start..end).map(|i| result.trace.total_at(i)).collect();
            let charging = result.trace.charging_kw[start..end].to_vec();
            plot::line_chart(
                &plots.join("first_overload_day.svg"),
                &format!("Grid load on {}", day_start.date()),
                "hour of day",
                "kW",
                &[
                    ("total", &totals, "black"),
                    ("charging", &charging, "steelblue"),
                ],
                Some(capacity),
            )?;
        }
        if let Some(start) = result.trace.index_of(event.timestamp) {
            let end = result.trace.len();
            let totals: Vec<f64> = (start..end).map(|i| result.trace.total_at(i)).collect();
            plot::line_chart(
                &plots.join("year_after_first_overload.svg"),
                "Grid load for the year after the first overload",
                "hours since first overload",
                "kW",
                &[("total", &totals, "black")],
                Some(capacity),
            )?;
        }
        // Per-EV annual emissions for the year after the first overload year.
        let year = event.timestamp.year() + 1;
        let bars: Vec<(String, f64)> = result
            .per_ev_annual
            .iter()
            .filter_map(|ev| {
                ev.by_year
                    .iter()
                    .find(|(y, _)| *y == year)
                    .map(|(_, kg)| (format!("ev{}", ev.ev_id), *kg))
            })
            .collect();
        if !bars.is_empty() {
            plot::bar_chart(
                &plots.join("per_ev_emissions.svg"),
                &format!("Annual CO2-eq emissions per EV, {year}"),
                "EV",
                "kg CO2-eq",
                &bars,
            )?;
        }
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> anyhow::Result<()> {
    let out = out_dir(args.out);
    std::fs::create_dir_all(&out)?;
    let mut scenarios = Vec::new();
    for path in &args.configs {
        let config = ScenarioConfig::from_file(path)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        scenarios.push((label, ScenarioInputs::load(&config)?));
    }
    let rows = engine::compare_scenarios(&scenarios)?;
    export::write_comparison_csv(&rows, &out.join("comparison.csv"))?;
    std::fs::write(
        out.join("comparison.json"),
        serde_json::to_string_pretty(&rows)? + "\n",
    )?;
    for row in &rows {
        println!(
            "{}: first overload {}, {} overloads following year, {} EVs at overload",
            row.label,
            row.first_overload
                .map_or("none".into(), |t| t.to_string()),
            row.overloads_following_year
                .map_or("-".into(), |v| v.to_string()),
            row.evs_at_first_overload
                .map_or("-".into(), |v| v.to_string()),
        );
    }
    Ok(())
}

fn cmd_project(args: ProjectArgs) -> anyhow::Result<()> {
    let inputs = FleetProjectionInputs {
        n_ev: args.evs,
        ev_annual_kg: args.ev_kg,
        fleet_size: args.fleet,
        ice_annual_kg: args.ice_kg,
        emission_cap_kg: args.cap.unwrap_or(0.0),
    };
    let total_kg = fleet_projection(&inputs);
    println!(
        "fleet emission: {:.3} Mt CO2-eq ({:.0} kg)",
        total_kg / KG_PER_MEGATON,
        total_kg
    );
    if let Some(cap) = args.cap {
        let required = required_evs_for_cap(&FleetProjectionInputs {
            emission_cap_kg: cap,
            ..inputs
        })?;
        println!(
            "EVs required to stay within {:.3} Mt: {required}",
            cap / KG_PER_MEGATON
        );
    }
    Ok(())
}

fn cmd_fit(args: FitArgs) -> anyhow::Result<()> {
    let r = fit_growth_rate(args.p0, args.a, args.t, args.pt)?;
    println!("growth rate r = {r:.6} per year ({:.2}%)", r * 100.0);
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> anyhow::Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let consumption = args.out.join(format!(
        "consumption_{}hh_{}.csv.gz",
        args.households, args.year
    ));
    synth::write_synth_consumption(&consumption, args.households, args.year, args.seed)?;
    let intensity = args.out.join(format!("intensity_{}.csv", args.year));
    synth::write_synth_intensity(&intensity, args.year, args.seed + 1)?;
    println!(
        "wrote {} and {}",
        consumption.display(),
        intensity.display()
    );
    Ok(())
}
