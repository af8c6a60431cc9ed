use clap::Parser;
use lnpsi::runner::{emit_report, run_scenario, ScenarioConfig, ScenarioKind};
use std::path::PathBuf;
use std::process::ExitCode;

const OUT_DIR_ENV: &str = "LNPSI_OUT_DIR";

fn parse_scenario(name: &str) -> Result<ScenarioKind, String> {
    ScenarioKind::parse(name).ok_or_else(|| {
        let names: Vec<&str> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown scenario `{name}`; expected one of {}", names.join(", "))
    })
}

/// Runs a verification scenario and writes report.json, summary.csv and
/// plot-ready data files.
#[derive(Debug, Parser)]
#[command(name = "lnpsi", version)]
struct Cli {
    /// JSON scenario configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory. Overrides the config and the LNPSI_OUT_DIR variable.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scenario to run; overrides the config.
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<ScenarioKind>,
    /// Multiplies every check tolerance.
    #[arg(long)]
    tolerance_scale: Option<f64>,
    /// Print the available scenarios and exit.
    #[arg(long)]
    list: bool,
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("lnpsi: {message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for kind in ScenarioKind::ALL {
            println!("{:<14} {}", kind.name(), kind.description());
        }
        return ExitCode::SUCCESS;
    }

    let mut cfg = match (&cli.config, cli.scenario) {
        (Some(path), _) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail(format!("cannot read {}: {e}", path.display())),
            };
            match ScenarioConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => return fail(e),
            }
        }
        (None, Some(kind)) => ScenarioConfig::default_for(kind),
        (None, None) => return fail("give --config or --scenario (see --list)"),
    };
    if let Some(kind) = cli.scenario {
        cfg.scenario = Some(kind);
    }
    if let Some(scale) = cli.tolerance_scale {
        cfg.tolerance_scale = scale;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("lnpsi-out"));

    let report = match run_scenario(cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = emit_report(&report, &out) {
        return fail(e);
    }
    for c in report.failed_checks() {
        let computed = c.computed.map_or_else(|| "none".to_string(), |v| format!("{v:e}"));
        match &c.error {
            Some(e) => println!("FAIL {} ({}): {e}", c.name, c.anchor),
            None => println!("FAIL {} ({}): computed {computed}, tolerance {:e}", c.name, c.anchor, c.tolerance),
        }
    }
    println!(
        "{}: {}/{} checks passed in {:.0} ms, report in {}",
        report.scenario,
        report.summary.passed,
        report.summary.total,
        report.timestamp.runtime_ms,
        out.display()
    );
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
