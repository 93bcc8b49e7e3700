use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qprob_core::maximal::SumSequence;
use qprob_harness::exit;
use qprob_harness::generate::{generate, GeneratorKind, GeneratorSpec};
use qprob_harness::remark::run_demo;
use qprob_harness::suite::{run_call, verifier_config, Call, ErrorInfo, Outcome, Status};
use qprob_harness::{HarnessError, Instance, SuiteConfig, VerifierKind};

#[derive(Parser)]
#[command(name = "qprob", version, about = "Maximal inequalities for matrix-algebra random variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verifier on an instance file.
    Verify {
        verifier: VerifierKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Suite configuration supplying tolerances and caps.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write a generated instance file.
    Generate {
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        n_vars: usize,
        #[arg(long)]
        shift: Option<f64>,
        #[arg(long)]
        symmetric: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a suite and write its run directory.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the non-commuting 3x3 example end to end.
    DemoRemark {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<SuiteConfig, HarnessError> {
    let mut cfg = match path {
        Some(p) => SuiteConfig::read(p)?,
        None => SuiteConfig::default(),
    };
    cfg.apply_env()?;
    cfg.validate()?;
    Ok(cfg)
}

fn write_json(path: &PathBuf, value: &impl serde::Serialize) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    std::fs::write(path, text + "\n").map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    match cli.command {
        Command::Verify { verifier, input, lambda, alpha, p, out, config } => {
            let cfg = load_config(config.as_ref())?;
            let vcfg = verifier_config(&cfg);
            let outcome = match Instance::read(&input, &cfg.tolerances)
                .and_then(|inst| Ok((SumSequence::new(inst.members(&cfg.caps)?)?, inst)))
            {
                Ok((seq, inst)) => run_call(&inst, &seq, &Call { verifier, lambda, alpha, exponent: p }, &vcfg),
                Err(e) => Outcome::Error(ErrorInfo::from_error(&e)),
            };
            write_json(&out, &outcome)?;
            let status = outcome.status();
            match &outcome {
                Outcome::Error(e) => eprintln!("{verifier}: {} error: {}", e.category, e.message),
                _ => println!("{verifier}: {status:?}, slack {:e}", outcome.slack().unwrap_or(f64::NAN)),
            }
            Ok(match status {
                Status::Pass | Status::Vacuous => exit::OK,
                Status::Fail => exit::INEQUALITY_FAILURE,
                Status::Error => exit::INPUT_ERROR,
            })
        }
        Command::Generate { kind, dims, seed, n_vars, shift, symmetric, out } => {
            let spec = GeneratorSpec { kind, dims, n_vars, seed, shift, symmetric };
            generate(&spec, &SuiteConfig::default().caps)?.write(&out)?;
            Ok(exit::OK)
        }
        Command::Suite { config, out } => {
            let cfg = load_config(config.as_ref())?;
            let report = qprob_harness::suite::run_configured(&cfg)?;
            let dir = report.write_run_dir(&out)?;
            let t = &report.totals;
            println!(
                "{} runs: {} passed, {} vacuous, {} failed, {} errors, {} setup errors; worst slack {:e}",
                t.runs, t.passed, t.vacuous, t.failed, t.errors, report.setup_errors, t.worst_slack
            );
            for (k, s) in &report.verifiers {
                println!("  {k:<24} {:>5} runs {:>5} pass {:>4} vacuous {:>3} fail {:>3} err  slack {:e}", s.runs, s.passed, s.vacuous, s.failed, s.errors, s.worst_slack);
            }
            println!("{}", dir.display());
            Ok(report.exit_code)
        }
        Command::DemoRemark { out } => {
            let r = run_demo()?;
            println!("|s_4 - 2I|_max            {:e}", r.total_deviation);
            println!("max_k |[s_k, s_4]|_max     {:e}", r.commutation_deviation);
            println!("|[x_1, x_2]|_max           {:.6}", r.commutator_x1_x2);
            for h in &r.levy.hypothesis_checks {
                println!("hypothesis {:<26} {} (deviation {:e})", h.name, if h.passed { "holds" } else { "fails" }, h.deviation);
            }
            println!("levy witnesses at lambda = {}: orthogonal {}", r.lambda, r.witnesses_orthogonal);
            println!("tau(p) = {:.6}, 2 tau(e_(lambda,inf)(s_4)) = {:.6}", r.levy.lhs, r.levy.rhs);
            if let Some(path) = out {
                write_json(&path, &r)?;
            }
            Ok(if r.mechanics_ok { exit::OK } else { exit::INEQUALITY_FAILURE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::INPUT_ERROR as u8)
        }
    }
}
