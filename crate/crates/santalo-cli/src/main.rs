use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use santalo::error::Result;
use santalo::fenchel::hj_flow;
use santalo::flows::fokker_planck_evolve;
use santalo::grid::{write_atomic, GridFunction};
use santalo::quadrature::QuadratureRule;
use santalo::verify::{self, parse_body, OutputFormat, Suite, SuiteConfig};
use santalo::volumes::{volume, volume_product, VolumeOptions};

/// Numerical checks of Gaussian hypercontractivity and volume-product inequalities.
#[derive(Parser)]
#[command(name = "santalo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exits 1 if any check fails.
    Check {
        suite: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// One check per parameter value, as CSV.
    Sweep {
        suite: String,
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Volume and volume product of a body such as `firey(cube(2),1)`.
    Volume {
        body: String,
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Hopf–Lax flow of a binary grid function.
    Hjflow {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        t: f64,
        /// Binary output path; CSV on stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fokker–Planck evolution of a binary grid density.
    Fpflow {
        #[arg(long)]
        v0: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 48)]
        nodes: usize,
        /// Binary output path; CSV on stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Key = value or JSON configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    quadrature_points: Option<usize>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    /// Keep wall-clock times in the reports.
    #[arg(long)]
    timing: bool,
}

impl CommonArgs {
    fn resolve(&self, suite: &str) -> Result<SuiteConfig> {
        let mut cfg = match &self.config {
            Some(path) => SuiteConfig::from_file(path)?,
            None => SuiteConfig::default(),
        };
        cfg.suite = suite.parse::<Suite>()?;
        if let Some(v) = self.dim {
            cfg.dim = v;
        }
        if let Some(v) = self.quadrature_points {
            cfg.quadrature_points = v;
        }
        if let Some(v) = self.mc_samples {
            cfg.mc_samples = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(p) = &self.out {
            cfg.output_path = Some(p.clone());
        }
        if let Some(f) = &self.format {
            cfg.format = f.parse::<OutputFormat>()?;
        }
        cfg.timing |= self.timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit_grid(g: &GridFunction, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => g.write_binary(path),
        None => {
            std::io::stdout().write_all(g.to_csv().as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { suite, common } => {
            let cfg = common.resolve(&suite)?;
            let reports = verify::run_suite(&cfg)?;
            for r in &reports {
                eprintln!("{}", r.summary_line());
            }
            let text = verify::emit(&reports, &cfg)?;
            if cfg.output_path.is_none() {
                print!("{text}");
            }
            Ok(verify::all_passed(&reports))
        }
        Command::Sweep { suite, axis, values, common } => {
            let cfg = common.resolve(&suite)?;
            let rows = verify::sweep(&cfg, &axis, &values)?;
            let text = verify::sweep_csv(&rows);
            match &cfg.output_path {
                Some(path) => write_atomic(path, text.as_bytes())?,
                None => print!("{text}"),
            }
            Ok(rows.iter().all(|r| r.report.passed))
        }
        Command::Volume { body, mc_samples, seed } => {
            let body = parse_body(&body)?;
            let defaults = VolumeOptions::default();
            let opts = VolumeOptions {
                mc_samples: mc_samples.unwrap_or(defaults.mc_samples),
                seed: seed.unwrap_or(defaults.seed),
                ..defaults
            };
            let out = serde_json::json!({
                "body": body.describe(),
                "volume": volume(&body, &opts)?,
                "volume_product": volume_product(&body, &opts)?,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::Hjflow { phi, t, out } => {
            let phi = GridFunction::read_binary(&phi)?;
            emit_grid(&hj_flow(&phi, t)?, out.as_deref())?;
            Ok(true)
        }
        Command::Fpflow { v0, beta, t, nodes, out } => {
            let v0 = GridFunction::read_binary(&v0)?;
            let rule = QuadratureRule::gauss_hermite(nodes, v0.dim())?;
            emit_grid(&fokker_planck_evolve(&v0, beta, t, &rule)?.v, out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            // Errors leave no verdict, so they share the configuration exit code.
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
