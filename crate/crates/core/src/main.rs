use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mmlink::cli::{
    load_config, render_plot_script, run_fig2, run_point, run_table2, run_validate, ConfigOverrides,
    ExperimentConfig,
};
use mmlink::{Error, Result};

/// Capacity of a Michaelis-Menten molecular link under a substrate perturbation budget.
#[derive(Parser)]
#[command(name = "mmlink", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Peak product per perturbation budget (defaults: km 0.1, s0 30, vmax 1, delta 0.1..0.5).
    Table2(Shared),
    /// Capacity sweep over (delta, q) as CSV.
    Fig2 {
        #[command(flatten)]
        shared: Shared,
        /// Also write a gnuplot script next to --out (extension .gp).
        #[arg(long)]
        plot_script: bool,
    },
    /// Slot design and capacity for one delta and one q.
    Point(Shared),
    /// Check the pseudo-steady-state condition, optionally against the full model.
    Validate {
        #[command(flatten)]
        shared: Shared,
        /// Initial free enzyme concentration.
        #[arg(long, allow_negative_numbers = true)]
        e0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        k1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        k_minus1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        k2: Option<f64>,
        /// Require the full mass-action comparison (needs --k1 --k-minus1 --k2).
        #[arg(long)]
        full_ode: bool,
    },
}

#[derive(Args)]
struct Shared {
    #[arg(long, allow_negative_numbers = true)]
    km: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    vmax: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    volume: Option<f64>,
    /// Comma-separated perturbation budgets.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    delta: Option<Vec<f64>>,
    /// Comma-separated membrane crossing probabilities.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    q: Option<Vec<f64>>,
    /// Capacity bound gap at which Blahut-Arimoto stops.
    #[arg(long, allow_negative_numbers = true)]
    tol_bits: Option<f64>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Shared {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            km: self.km,
            s0: self.s0,
            vmax: self.vmax,
            volume: self.volume,
            delta: self.delta.clone(),
            q: self.q.clone(),
            tol_bits: self.tol_bits,
            out: self.out.clone(),
            ..Default::default()
        }
    }

    fn resolve(&self, mut base: ExperimentConfig, extra: ConfigOverrides) -> Result<ExperimentConfig> {
        if let Some(path) = &self.config {
            base.apply(load_config(path)?);
        }
        base.apply(self.overrides());
        base.apply(extra);
        Ok(base)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Table2(shared) => {
            let cfg = shared.resolve(ExperimentConfig::table2_defaults(), ConfigOverrides::default())?;
            write_output(cfg.output_path.as_deref(), &run_table2(&cfg)?)
        }
        Command::Fig2 { shared, plot_script } => {
            let flags = ConfigOverrides {
                plot_script: plot_script.then_some(true),
                ..Default::default()
            };
            let cfg = shared.resolve(ExperimentConfig::fig2_defaults(), flags)?;
            if cfg.emit_plot_script && cfg.output_path.is_none() {
                return Err(Error::config("plot-script", "requires --out"));
            }
            let csv = run_fig2(&cfg)?;
            write_output(cfg.output_path.as_deref(), &csv)?;
            if let (true, Some(out)) = (cfg.emit_plot_script, &cfg.output_path) {
                let script = render_plot_script(&cfg, out);
                std::fs::write(out.with_extension("gp"), script)?;
            }
            Ok(())
        }
        Command::Point(shared) => {
            let cfg = shared.resolve(ExperimentConfig::fig2_defaults(), ConfigOverrides::default())?;
            write_output(cfg.output_path.as_deref(), &run_point(&cfg)?)
        }
        Command::Validate {
            shared,
            e0,
            k1,
            k_minus1,
            k2,
            full_ode,
        } => {
            let flags = ConfigOverrides {
                e0,
                k1,
                k_minus1,
                k2,
                full_ode: full_ode.then_some(true),
                ..Default::default()
            };
            let cfg = shared.resolve(ExperimentConfig::fig2_defaults(), flags)?;
            write_output(cfg.output_path.as_deref(), &run_validate(&cfg)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
