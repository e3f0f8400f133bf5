use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixed_mops::Exec;
use mixed_mops_cli::app::{self, Which, EXIT_SETUP};
use mixed_mops_cli::config::{self, Overrides};
use mixed_mops_cli::export::Format;

#[derive(Parser)]
#[command(name = "mops", version, about = "Mixed-type multiple orthogonal polynomials: build, export, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Arithmetic backend.
    #[arg(long, value_parser = ["rational", "float"])]
    backend: Option<String>,
    /// Float precision in bits.
    #[arg(long)]
    precision: Option<usize>,
    /// Truncation size.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Threshold for float checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            backend: self.backend.clone(),
            precision: self.precision,
            n: self.n,
            out: self.out.clone(),
            tol: self.tol,
            no_checks: false,
        }
    }

    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    G,
    S,
    Sbar,
    J,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline, write g, S, Sbar, J and report.json.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print compositions, staircase, band table and index sets without computing moments.
    Describe {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Scales at which to print the index sets.
        #[arg(long = "l")]
        scales: Vec<usize>,
    },
    /// Write one matrix.
    Export {
        config: PathBuf,
        #[arg(long, value_enum)]
        what: WhichArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Decimal digits in csv output.
        #[arg(long)]
        digits: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &PathBuf, common: &Common) -> Result<config::RunConfig, ExitCode> {
    config::load(path, &common.overrides()).map_err(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(EXIT_SETUP)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, common } => {
            let cfg = match config::load(&config, &common.overrides()) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    if let Some(out) = &common.out {
                        let _ = app::write_error_report(out, None, &format!("{e:#}"));
                    }
                    return ExitCode::from(EXIT_SETUP);
                }
            };
            match app::run(&cfg, common.exec()) {
                Ok(code) => ExitCode::from(code),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(EXIT_SETUP)
                }
            }
        }
        Command::Describe { config, common, scales } => {
            let cfg = match load(&config, &common) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let scales = if scales.is_empty() { app::default_scales(&cfg) } else { scales };
            print!("{}", app::describe(&cfg, &scales));
            ExitCode::SUCCESS
        }
        Command::Export { config, what, format, digits, common } => {
            let mut ov = common.overrides();
            ov.no_checks = true;
            let mut cfg = match config::load(&config, &ov) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(EXIT_SETUP);
                }
            };
            if let Some(d) = digits {
                cfg.digits = d;
            }
            let which = match what {
                WhichArg::G => Which::G,
                WhichArg::S => Which::S,
                WhichArg::Sbar => Which::Sbar,
                WhichArg::J => Which::J,
            };
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Text => Format::Text,
            };
            match app::export(&cfg, which, format, common.exec()) {
                Ok(Ok(path)) => {
                    println!("{}", path.display());
                    ExitCode::SUCCESS
                }
                Ok(Err(e)) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_SETUP)
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(EXIT_SETUP)
                }
            }
        }
    }
}
