// `!(x > 0.0)` rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod manifest;
mod output;
mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use activeris_core::config::{default_scenario, PhaseNoiseKind, ScenarioConfig};
use activeris_core::montecarlo::{GammaMode, SimOptions};
use activeris_core::validate::{run_validation, Fault, ValidationOptions, ValidationReport};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use manifest::{manifest_path, Job, RunManifest};
use output::{render, Format};
use table::{Cell, SweepKind, SweepRequest, Table};

#[derive(Parser)]
#[command(
    name = "activeris",
    version,
    about = "Sweeps and self-checks for active-RIS link analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Channel-estimation N-MSE versus transmit power.
    NmseSweep(SweepArgs),
    /// Outage probability versus transmit power.
    OutageSweep(SweepArgs),
    /// Ergodic capacity versus transmit power.
    CapacitySweep(SweepArgs),
    /// Run the oracle suite; exits nonzero on any tolerance violation.
    Validate(ValidateArgs),
    /// Re-run the job recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML, or JSON by extension). Defaults to the reference scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a scenario field, e.g. `transmit_power=20dBm`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Monte Carlo trials per grid point; 0 gives analytic values only.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; stdout when absent. A manifest is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Transmit powers in dBm: a comma list and/or `start:stop:step` ranges.
    #[arg(long, allow_hyphen_values = true, default_value = "-10:50:10")]
    rho_dbm: String,
    /// Common amplitude gains (linear). Defaults to the scenario's gains.
    #[arg(long)]
    beta: Option<String>,
    /// Phase-noise powers in rad^2. Defaults to the scenario's.
    #[arg(long)]
    sigma_p2: Option<String>,
    /// Phase-noise families, comma separated. Defaults to the scenario's.
    #[arg(long)]
    model: Option<String>,
    /// Element counts. Defaults to the scenario's.
    #[arg(long)]
    n: Option<String>,
    /// Per-trial SINR denominator.
    #[arg(long, value_enum, default_value_t = ModeArg::Expected)]
    mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Expected,
    Realized,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// Deliberately break a kernel to confirm the suite notices.
    #[arg(long, value_enum)]
    inject_fault: Option<FaultArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    LaguerreSign,
}

#[derive(Args)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Write here instead of the recorded output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compare against the recorded output instead of writing; exit 1 on mismatch.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::NmseSweep(a) => cmd_sweep(SweepKind::Nmse, a),
        Command::OutageSweep(a) => cmd_sweep(SweepKind::Outage, a),
        Command::CapacitySweep(a) => cmd_sweep(SweepKind::Capacity, a),
        Command::Validate(a) => cmd_validate(a),
        Command::Replay(a) => cmd_replay(a),
    }
}

fn load_scenario(common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            ScenarioConfig::load(path).with_context(|| format!("loading {}", path.display()))?
        }
        None => default_scenario(),
    };
    for item in &common.overrides {
        let (key, value) = item
            .split_once('=')
            .with_context(|| format!("`--set {item}` is not KEY=VALUE"))?;
        cfg.set(key, value)
            .with_context(|| format!("applying `--set {item}`"))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sim_options(common: &Common, mode: GammaMode) -> SimOptions {
    SimOptions {
        trials: common.trials,
        seed: common.seed,
        threads: common.threads,
        mode,
    }
}

/// Parses `a,b,c` where each item may also be a `start:stop:step` range.
fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(
                v.parse()
                    .with_context(|| format!("`{v}` is not a number"))?,
            ),
            [a, b, step] => {
                let (a, b, step): (f64, f64, f64) = (a.parse()?, b.parse()?, step.parse()?);
                if !(step > 0.0) || b < a {
                    bail!("range `{item}` needs start <= stop and a positive step");
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| a + step * i as f64));
            }
            _ => bail!("`{item}` is neither a number nor start:stop:step"),
        }
    }
    if out.is_empty() {
        bail!("empty grid `{text}`");
    }
    Ok(out)
}

fn build_request(kind: SweepKind, a: &SweepArgs, cfg: &ScenarioConfig) -> Result<SweepRequest> {
    let mode = match a.mode {
        ModeArg::Expected => GammaMode::Expected,
        ModeArg::Realized => GammaMode::Realized,
    };
    let model = match &a.model {
        Some(text) => text
            .split(',')
            .map(|m| m.trim().parse::<PhaseNoiseKind>())
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![cfg.phase_noise.kind()],
    };
    let n = match &a.n {
        Some(text) => parse_grid(text)?
            .into_iter()
            .map(|v| {
                if v >= 1.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    bail!("element count {v} is not a positive integer")
                }
            })
            .collect::<Result<Vec<_>>>()?,
        None => vec![cfg.n_elements()],
    };
    Ok(SweepRequest {
        kind,
        rho_dbm: parse_grid(&a.rho_dbm)?,
        beta: a.beta.as_deref().map(parse_grid).transpose()?,
        sigma_p2: match &a.sigma_p2 {
            Some(text) => parse_grid(text)?,
            None => vec![cfg.phase_noise.power()],
        },
        model,
        n,
        sim: sim_options(&a.common, mode),
    })
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

fn finish(
    command: &str,
    cfg: &ScenarioConfig,
    job: Job,
    common: &Common,
    bytes: &[u8],
) -> Result<()> {
    emit(bytes, common.out.as_deref())?;
    if let Some(out) = &common.out {
        let m = RunManifest::new(command, cfg, job, common.format, vec![out.clone()]);
        m.write(&manifest_path(out))?;
    }
    Ok(())
}

fn cmd_sweep(kind: SweepKind, a: SweepArgs) -> Result<ExitCode> {
    let cfg = load_scenario(&a.common)?;
    let req = build_request(kind, &a, &cfg)?;
    let table = table::run(&cfg, &req)?;
    let bytes = render(&table, a.common.format)?;
    finish(kind.command(), &cfg, Job::Sweep(req), &a.common, &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn validation_table(report: &ValidationReport) -> Table {
    Table {
        columns: vec!["check", "passed", "detail"],
        rows: report
            .checks
            .iter()
            .map(|c| {
                vec![
                    Cell::Text(c.name.clone()),
                    Cell::Text(c.passed.to_string()),
                    Cell::Text(c.detail.clone()),
                ]
            })
            .collect(),
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<ExitCode> {
    let cfg = load_scenario(&a.common)?;
    let opts = ValidationOptions {
        trials: a.common.trials,
        seed: a.common.seed,
        threads: a.common.threads,
        fault: match a.inject_fault {
            Some(FaultArg::LaguerreSign) => Fault::LaguerreSign,
            None => Fault::None,
        },
    };
    let report = run_validation(&opts);
    for c in &report.checks {
        eprintln!(
            "[{}] {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if a.common.out.is_some() {
        let bytes = render(&validation_table(&report), a.common.format)?;
        finish("validate", &cfg, Job::Validate(opts), &a.common, &bytes)?;
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_replay(a: ReplayArgs) -> Result<ExitCode> {
    let m = RunManifest::read(&a.manifest)?;
    let cfg = m.config()?;
    let bytes = match &m.job {
        Job::Sweep(req) => render(&table::run(&cfg, req)?, m.format)?,
        Job::Validate(opts) => render(&validation_table(&run_validation(opts)), m.format)?,
    };
    let recorded = m.outputs.first().context("manifest records no output")?;
    if a.check {
        let previous =
            std::fs::read(recorded).with_context(|| format!("reading {}", recorded.display()))?;
        if previous == bytes {
            eprintln!("replay matches {}", recorded.display());
            return Ok(ExitCode::SUCCESS);
        }
        eprintln!("replay differs from {}", recorded.display());
        return Ok(ExitCode::FAILURE);
    }
    emit(&bytes, Some(a.out.as_deref().unwrap_or(recorded)))?;
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(
            parse_grid("-10:50:10").unwrap(),
            vec![-10.0, 0.0, 10.0, 20.0, 30.0, 40.0, 50.0]
        );
        assert_eq!(parse_grid("1,2, 4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(
            parse_grid("0:1:0.25,7").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0, 7.0]
        );
        assert!(parse_grid("5:1:1").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn manifest_name() {
        assert_eq!(
            manifest_path(Path::new("/x/out.csv")),
            PathBuf::from("/x/out.csv.manifest.json")
        );
    }
}
