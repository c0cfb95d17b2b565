//! `hydrotherm` command line: run scenario configs, emit the built-in
//! scenario builders, benchmark parallel scaling and run the analytical
//! verification suite.

mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use hydrotherm::io::{BenchReport, RunBundle};
use hydrotherm::scenarios::{
    build_ates_benchmark, build_pile_field, AtesPreset, PileFieldScale, ScenarioConfig,
};
use hydrotherm::sim::PerfReport;
use hydrotherm::{Error, Result};

#[derive(Parser)]
#[command(
    name = "hydrotherm",
    version,
    about = "Coupled groundwater-flow and heat-transport finite element engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write VTK/CSV/perf outputs.
    Run {
        /// Scenario config (JSON), e.g. from `hydrotherm scenario`.
        config: PathBuf,
        /// Worker count; falls back to HYDROTHERM_WORKERS, then the config,
        /// then 1.
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the config's snapshot cadence (steps between outputs).
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Write a built-in scenario config to a file.
    Scenario {
        /// One of: ates, pile-desk, pile-full.
        name: String,
        /// Where to write the config JSON.
        #[arg(long)]
        emit: PathBuf,
    },
    /// Run the same config at several worker counts and write a speedup
    /// table.
    Bench {
        config: PathBuf,
        /// Comma-separated worker counts, e.g. 1,2,4,8.
        #[arg(long, default_value = "1,2,4")]
        workers: String,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        /// Truncate the run to this many steps (timing studies rarely need
        /// the full duration).
        #[arg(long)]
        steps: Option<usize>,
        /// Repetitions per worker count; the fastest run enters the table.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Run the analytical verification suite and print pass/fail lines.
    Verify,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage error reported with exit code 1.
            let _ = e.print();
            let code = if e.use_stderr() { 1 } else { 0 };
            std::process::exit(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Run {
            config,
            workers,
            out,
            snapshot_every,
        } => run(config, workers, out, snapshot_every).map(|()| 0),
        Command::Scenario { name, emit } => scenario(&name, &emit).map(|()| 0),
        Command::Bench {
            config,
            workers,
            out,
            steps,
            repeat,
        } => bench(config, &workers, out, steps, repeat).map(|()| 0),
        Command::Verify => Ok(run_verify()),
    }
}

fn read_config(path: &PathBuf) -> Result<(String, ScenarioConfig)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let cfg = ScenarioConfig::from_json_str(&text)?;
    Ok((text, cfg))
}

fn resolve_workers(flag: Option<usize>, config_default: Option<usize>) -> Result<usize> {
    if let Some(w) = flag {
        if w == 0 {
            return Err(Error::config("--workers must be at least 1".to_string()));
        }
        return Ok(w);
    }
    if let Ok(value) = std::env::var("HYDROTHERM_WORKERS") {
        let w: usize = value.trim().parse().map_err(|_| {
            Error::config(format!("HYDROTHERM_WORKERS must be a positive integer, got '{value}'"))
        })?;
        if w == 0 {
            return Err(Error::config("HYDROTHERM_WORKERS must be at least 1".to_string()));
        }
        return Ok(w);
    }
    Ok(config_default.unwrap_or(1).max(1))
}

fn run(
    config_path: PathBuf,
    workers: Option<usize>,
    out: PathBuf,
    snapshot_every: Option<usize>,
) -> Result<()> {
    let (text, mut cfg) = read_config(&config_path)?;
    if let Some(every) = snapshot_every {
        cfg.time.snapshot_every = every;
    }
    let workers = resolve_workers(workers, cfg.workers)?;
    let sim = cfg.to_simulation(workers)?;
    let mut bundle = RunBundle::create(&out, &text, cfg.observation_lines.clone(), workers)?;
    let (state, report) = sim.run(&mut [&mut bundle])?;
    bundle.finalize(&report)?;
    println!(
        "{}: {} steps to t = {:.0} s, {} dofs, {} workers, {:.3} s total -> {}",
        cfg.name,
        state.step,
        state.time,
        report.total_dofs,
        workers,
        report.total_s,
        out.display()
    );
    Ok(())
}

fn scenario(name: &str, emit: &PathBuf) -> Result<()> {
    let cfg = match name {
        "ates" => build_ates_benchmark(AtesPreset::Coarse),
        "ates-paper" => build_ates_benchmark(AtesPreset::PaperLike),
        "pile-desk" => build_pile_field(PileFieldScale::Desk),
        "pile-full" => build_pile_field(PileFieldScale::Full),
        other => {
            return Err(Error::config(format!(
                "unknown scenario '{other}' (expected ates, pile-desk or pile-full)"
            )))
        }
    };
    std::fs::write(emit, cfg.to_json_pretty() + "\n")
        .map_err(|e| Error::io(emit.display().to_string(), e))?;
    println!("wrote {} scenario to {}", cfg.name, emit.display());
    Ok(())
}

fn bench(
    config_path: PathBuf,
    workers_arg: &str,
    out: PathBuf,
    steps: Option<usize>,
    repeat: usize,
) -> Result<()> {
    let (_, mut cfg) = read_config(&config_path)?;
    if let Some(steps) = steps {
        if steps == 0 {
            return Err(Error::config("--steps must be at least 1".to_string()));
        }
        cfg.time.t_end_s = cfg.time.step_s * steps as f64;
    }
    // No snapshot output during timing runs.
    cfg.time.snapshot_every = usize::MAX >> 1;
    let counts: Vec<usize> = workers_arg
        .split(',')
        .map(|part| {
            part.trim().parse::<usize>().ok().filter(|&w| w > 0).ok_or_else(|| {
                Error::config(format!("bad worker count '{part}' in --workers list"))
            })
        })
        .collect::<Result<_>>()?;
    if counts.is_empty() {
        return Err(Error::config("--workers list is empty".to_string()));
    }
    let repeat = repeat.max(1);

    let mut reports: Vec<PerfReport> = Vec::new();
    for &w in &counts {
        let sim = cfg.to_simulation(w)?;
        let mut best: Option<PerfReport> = None;
        for _ in 0..repeat {
            let (_, report) = sim.run(&mut [])?;
            if best.as_ref().is_none_or(|b| report.total_s < b.total_s) {
                best = Some(report);
            }
        }
        let report = best.expect("at least one repetition");
        println!(
            "workers {w}: total {:.3} s ({} steps, {} dofs)",
            report.total_s, report.steps, report.total_dofs
        );
        reports.push(report);
    }
    let bench = BenchReport::from_reports(cfg.name.clone(), reports);
    std::fs::create_dir_all(&out).map_err(|e| Error::io(out.display().to_string(), e))?;
    bench.write(&out.join("bench.json"))?;
    print!("{}", bench.table());
    println!("wrote {}", out.join("bench.json").display());
    Ok(())
}

fn run_verify() -> i32 {
    let checks = verify::run_all();
    let mut all_passed = true;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status}  {} — {}", check.name, check.detail);
        all_passed &= check.passed;
    }
    if all_passed {
        println!("verification suite: all {} checks passed", checks.len());
        0
    } else {
        eprintln!("verification suite: FAILURES above");
        2
    }
}
