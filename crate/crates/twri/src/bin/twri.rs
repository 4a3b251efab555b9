use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use twri::app::{execute, exit_code, Command};
use twri::io::load_config;
use twri::recon::Precision;

#[derive(Parser)]
#[command(name = "twri", version, about = "Semiclassical soliton ensembles for the three-wave equations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    precision: Option<PrecisionArg>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Packet spectra: Bohr–Sommerfeld eigenvalues, WKB norming constants, located eigenvalues.
    Scatter,
    /// Composed 3×3 soliton ensemble data.
    Ensemble,
    /// Reflectionless reconstruction on the config grid.
    Reconstruct,
    /// Direct simulation of the packets on the config grid.
    Simulate,
    /// Built-in consistency suite; exit status 1 on any failure.
    Validate,
    /// Heatmaps of |q1|, |q2|, |q3|.
    Plot,
}

#[derive(ValueEnum, Clone, Copy)]
enum PrecisionArg {
    Double,
    Extended,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let Some(path) = cli.config else {
        eprintln!("error: --config is required");
        return ExitCode::from(2);
    };
    let mut cfg = match load_config(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    if let Some(p) = cli.precision {
        cfg.run.precision = match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        };
    }
    let cmd = match cli.command {
        Cmd::Scatter => Command::Scatter,
        Cmd::Ensemble => Command::Ensemble,
        Cmd::Reconstruct => Command::Reconstruct,
        Cmd::Simulate => Command::Simulate,
        Cmd::Validate => Command::Validate,
        Cmd::Plot => Command::Plot,
    };
    let out = cfg.run.output_dir.as_ref().map(PathBuf::from).filter(|_| cli.out.as_os_str() == "out").unwrap_or(cli.out);
    let result = execute(cmd, &cfg, &out);
    match &result {
        Ok(rep) => {
            for l in &rep.lines {
                println!("{l}");
            }
            for f in &rep.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
