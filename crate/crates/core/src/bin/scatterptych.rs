use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scatterptych::commands::{self, exit, ReconOptions};
use scatterptych::config::ProbeInitChoice;
use scatterptych::Rect;

#[derive(Parser)]
#[command(
    name = "scatterptych",
    version,
    about = "Ptychography through scattering media"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a pattern stack from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the medium noise seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reconstruct object and probe from a stack manifest.
    Reconstruct {
        #[arg(long)]
        stack: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long = "max-iters")]
        max_iters: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long = "probe-init", value_enum)]
        probe_init: Option<ProbeInitChoice>,
        /// Crop patterns to x,y,w,h before reconstructing.
        #[arg(long)]
        crop: Option<Rect>,
    },
    /// Mean and standard deviation of an image region.
    Metrics {
        image: PathBuf,
        #[arg(long)]
        region: Rect,
        /// Simulate config; adds FOV extent and overlap rate.
        #[arg(long)]
        config: Option<PathBuf>,
        /// SSE log to reference in the report.
        #[arg(long)]
        sse: Option<PathBuf>,
    },
    /// Overlap area and rate of neighbouring pinhole positions.
    Overlap {
        /// Pinhole radius, meters.
        radius_m: f64,
        /// Scan step, meters.
        step_m: f64,
    },
}

fn run(cli: Cli) -> Result<i32, scatterptych::Error> {
    match cli.command {
        Command::Simulate { config, out, seed } => {
            let s = commands::cmd_simulate(&config, &out, seed)?;
            println!("patterns:     {}", s.m);
            println!("overlap rate: {:.3}", s.overlap_rate);
            println!(
                "fov extent:   {:.4e} m x {:.4e} m",
                s.fov_extent_m.0, s.fov_extent_m.1
            );
            println!("manifest:     {}", s.manifest.display());
            println!("sha256:       {}", s.payload_sha256);
            Ok(exit::SUCCESS)
        }
        Command::Reconstruct {
            stack,
            config,
            out,
            max_iters,
            epsilon,
            alpha,
            beta,
            probe_init,
            crop,
        } => {
            let opts = ReconOptions {
                config,
                max_iterations: max_iters,
                epsilon,
                alpha,
                beta,
                probe_init,
                crop,
            };
            let s = commands::cmd_reconstruct(&stack, &opts, &out)?;
            println!("iterations: {}", s.iterations_run);
            println!("final sse:  {:.6e}", s.final_sse);
            println!("converged:  {}", s.converged);
            Ok(if s.converged {
                exit::SUCCESS
            } else {
                exit::NOT_CONVERGED
            })
        }
        Command::Metrics {
            image,
            region,
            config,
            sse,
        } => {
            let report = commands::cmd_metrics(&image, region, config.as_deref(), sse.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(exit::SUCCESS)
        }
        Command::Overlap { radius_m, step_m } => {
            let r = commands::cmd_overlap(radius_m, step_m)?;
            println!("area: {:.6e} m^2", r.area_m2);
            println!("rate: {:.3}", r.rate);
            println!("{}", r.verdict);
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::SUCCESS
            };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e) as u8)
        }
    }
}
