//! `hhdx`: run the built-in scenarios and print reproducible reports.

mod report;
mod scenarios;

use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, ValueEnum};
use hhdx_core::tower::WeierstrassCurve;

use report::Report;
use scenarios::{parse_curve, run, AlgebraChoice, RunError, Scenario, ScenarioConfig};

#[derive(Debug, Clone, Copy)]
enum Selection {
    One(Scenario),
    All,
}

fn parse_selection(s: &str) -> Result<Selection, String> {
    if s == "all" {
        return Ok(Selection::All);
    }
    Scenario::from_str(s, false).map(Selection::One).map_err(|_| {
        let names: Vec<String> = Scenario::value_variants().iter().map(|v| v.name()).collect();
        format!("unknown scenario {s:?}; expected one of {} or all", names.join(", "))
    })
}

/// Batch runner for the divided-power Hochschild scenarios.
#[derive(Debug, Parser)]
#[command(name = "hhdx", version)]
struct Cli {
    /// Scenario name, or `all`
    #[arg(long, value_parser = parse_selection)]
    scenario: Selection,
    /// Prime p (default 2; 3 for the elliptic scenarios)
    #[arg(long)]
    prime: Option<u32>,
    /// Tower depth R
    #[arg(long, default_value_t = 2)]
    depth: u32,
    /// Degree bound D
    #[arg(long = "degree-bound", default_value_t = 16)]
    degree_bound: u32,
    /// Divided-power cap Q
    #[arg(long = "dp-cap", default_value_t = 8)]
    dp_cap: u32,
    /// Emit the JSON report instead of text
    #[arg(long)]
    json: bool,
    /// Algebra for gs-point
    #[arg(long, value_enum, default_value_t = AlgebraChoice::M2)]
    algebra: AlgebraChoice,
    /// Weierstrass coefficients `a1,a2,a3,a4,a6` (or `a,b`) for elliptic
    #[arg(long, value_parser = parse_curve, default_value = "0,0,0,-1,0")]
    curve: WeierstrassCurve,
}

impl Cli {
    fn config(&self, scenario: Scenario) -> ScenarioConfig {
        ScenarioConfig {
            scenario,
            prime: self.prime.unwrap_or(scenario.default_prime()),
            depth: self.depth,
            degree_bound: self.degree_bound,
            dp_cap: self.dp_cap,
            algebra: self.algebra,
            curve: self.curve,
        }
    }
}

/// `HHDX_THREADS` caps how many scenarios run at once; unset means one per core.
fn thread_count() -> Result<usize, String> {
    match std::env::var("HHDX_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("HHDX_THREADS must be a positive integer, got {v:?}")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Each scenario is deterministic on its own; results are collected in
/// input order, so the output does not depend on the thread count.
fn run_all(configs: &[ScenarioConfig], threads: usize) -> Vec<(Report, Option<RunError>)> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<(Report, Option<RunError>)>>> = Mutex::new(vec![None; configs.len()]);
    std::thread::scope(|s| {
        for _ in 0..threads.min(configs.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = configs.get(k) else { break };
                let out = run(cfg);
                slots.lock().expect("poisoned")[k] = Some(out);
            });
        }
    });
    slots.into_inner().expect("poisoned").into_iter().map(|o| o.expect("ran")).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match thread_count() {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let configs: Vec<ScenarioConfig> = match cli.scenario {
        Selection::One(s) => vec![cli.config(s)],
        Selection::All => Scenario::value_variants().iter().map(|&s| cli.config(s)).collect(),
    };
    let results = run_all(&configs, threads);
    let reports: Vec<&Report> = results.iter().map(|(r, _)| r).collect();
    if cli.json {
        let text = match cli.scenario {
            Selection::One(_) => serde_json::to_string_pretty(reports[0]),
            Selection::All => serde_json::to_string_pretty(&reports),
        };
        println!("{}", text.expect("reports serialize"));
    } else {
        let texts: Vec<String> = reports.iter().map(|r| r.render_text()).collect();
        print!("{}", texts.join("\n"));
    }
    if let Some(e) = results.iter().find_map(|(_, e)| e.as_ref()) {
        eprintln!("error: {}", report_error(e));
        return ExitCode::from(e.exit_code() as u8);
    }
    if reports.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn report_error(e: &RunError) -> String {
    match e {
        RunError::InvalidPrime(m) => format!("invalid prime: {m}"),
        RunError::Capacity(m) => format!("capacity exceeded: {m}"),
        RunError::Engine(e) => e.to_string(),
    }
}
