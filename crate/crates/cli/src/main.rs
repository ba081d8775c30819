mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use disparity::data::write_csv;
use disparity::inference::bootstrap_around;
use disparity::selfcheck::{selfcheck, LibrarySuite};
use disparity::synthetic::{generate, StructuralParams};
use disparity::decompose;

use config::Loaded;
use report::{InputSummary, Report, RunOutcome, RunReport};

#[derive(Parser)]
#[command(name = "disparity", version, about = "Decompose group disparities under hypothetical interventions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every decomposition listed in a TOML config.
    Run {
        config: PathBuf,
        /// Also print the JSON report to stdout.
        #[arg(long)]
        json: bool,
    },
    /// Check the cross-estimator identities on generated data.
    Selfcheck,
    /// Simulate a dataset from structural parameters.
    Generate { params: PathBuf, out: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, json } => run(&config, json),
        Command::Selfcheck => Ok(run_selfcheck()),
        Command::Generate { params, out } => run_generate(&params, &out).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(path: &std::path::Path, print_json: bool) -> anyhow::Result<ExitCode> {
    let loaded = Loaded::read(path)?;
    loaded.validate()?;
    let d = loaded.dataset()?;
    let cfg = &loaded.config;

    let reports: Vec<RunReport> = cfg
        .runs
        .par_iter()
        .map(|run| {
            let run = run.get_ref();
            let spec = loaded.spec(run);
            let estimate = decompose(&d, &spec).map_err(|e| e.to_string());
            let bootstrap = match (&estimate, &cfg.bootstrap) {
                (Ok(point), Some(opts)) => Some(bootstrap_around(&d, &spec, opts, point).map_err(|e| e.to_string())),
                _ => None,
            };
            RunReport::new(run.label(), &spec, RunOutcome { estimate, bootstrap })
        })
        .collect();

    let report = Report {
        input: InputSummary {
            path: cfg.input.path.display().to_string(),
            rows: d.n_rows(),
            columns: d.column_names().map(str::to_string).collect(),
        },
        bootstrap: cfg.bootstrap.clone(),
        runs: reports,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    let table = report::table(&report);

    if let Some(p) = &cfg.output.json {
        let p = loaded.resolve(p);
        std::fs::write(&p, &json).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = &cfg.output.table {
        let p = loaded.resolve(p);
        std::fs::write(&p, &table).with_context(|| format!("writing {}", p.display()))?;
    }
    print!("{table}");
    if print_json {
        print!("{json}");
    }
    let failed = report.runs.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed", report.runs.len());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn run_selfcheck() -> ExitCode {
    let report = selfcheck(&LibrarySuite);
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        match &c.error {
            Some(e) => println!("{status} {}: error: {e}", c.name),
            None => println!(
                "{status} {}: max deviation {:.3e} (tolerance {:.0e})",
                c.name, c.max_deviation, c.tolerance
            ),
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

#[derive(Deserialize)]
struct GenerateConfig {
    n: usize,
    #[serde(default)]
    seed: u64,
    #[serde(flatten)]
    params: StructuralParams,
}

fn run_generate(params: &std::path::Path, out: &std::path::Path) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(params).with_context(|| format!("reading {}", params.display()))?;
    let cfg: GenerateConfig = toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", params.display()))?;
    let d = generate(&cfg.params, cfg.n, cfg.seed)?;
    let file = std::fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(&d, std::io::BufWriter::new(file))?;
    Ok(())
}
