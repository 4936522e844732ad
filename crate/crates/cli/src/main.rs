use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use acsm::commands::{self, Format, Input, RunConfig, EXIT_INPUT};
use acsm::spec_file::export_spec;
use acsm::zoo;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Validate and audit almost contact statistical structures on a chart.
#[derive(Parser)]
#[command(name = "acsm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the almost contact metric, statistical and compatibility axioms.
    Validate(RunArgs),
    /// Evaluate φ-sectional curvatures on given sections or a φ-basis sweep.
    Curvature {
        #[command(flatten)]
        run: RunArgs,
        /// Section vector as comma-separated expressions, e.g. "1,0,0"; repeatable.
        /// Without it every grid point is swept over a φ-basis.
        #[arg(long = "section")]
        sections: Vec<String>,
    },
    /// Run every curvature audit.
    Audit(RunArgs),
    /// Write a zoo entry as a spec file.
    ExportZoo {
        /// Zoo name, e.g. zoo:example_r3_negative.
        name: String,
        /// Destination file; stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// List the zoo entries.
    ListZoo,
}

#[derive(Args)]
struct RunArgs {
    /// Spec file path or zoo name (zoo:...).
    input: String,
    /// Residual tolerance, overriding the input's own.
    #[arg(long)]
    tol: Option<f64>,
    /// Points per coordinate.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Comma-separated check names or name prefixes to report.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Seed for random extra sections in sweeps.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Table,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            tol: self.tol,
            checks: self.checks.clone(),
            format: match self.format {
                FormatArg::Json => Format::Json,
                FormatArg::Table => Format::Table,
            },
            grid: self.grid,
            seed: self.seed,
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
            _ => Ok(()),
        },
    }
}

fn run_report(
    args: &RunArgs,
    f: impl FnOnce(&Input, &RunConfig) -> acsm::Result<acsm::AuditReport>,
) -> i32 {
    let cfg = args.config();
    let result = commands::load_input(&args.input).and_then(|input| {
        log::info!(
            "loaded {} (dim {})",
            input.manifold.name,
            input.manifold.dim()
        );
        f(&input, &cfg)
    });
    let code = commands::exit_code(&result);
    match result {
        Ok(rep) => {
            log::info!(
                "{} records, {} failed",
                rep.records.len(),
                rep.failures().count()
            );
            if let Err(e) = emit(&commands::render(&rep, cfg.format), args.output.as_ref()) {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    code
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ACSM_LOG")).init();
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Validate(a) => run_report(a, commands::cmd_validate),
        Command::Audit(a) => run_report(a, commands::cmd_audit),
        Command::Curvature { run, sections } => run_report(run, |input, cfg| {
            let s = (!sections.is_empty()).then_some(sections.as_slice());
            commands::cmd_curvature(input, s, cfg)
        }),
        Command::ExportZoo { name, output } => {
            match zoo::resolve(name).and_then(|e| export_spec(&e.manifold)) {
                Ok(text) => match emit(&text, output.as_ref()) {
                    Ok(()) => 0,
                    Err(e) => {
                        eprintln!("error: {e}");
                        EXIT_INPUT
                    }
                },
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Command::ListZoo => {
            for (name, about) in zoo::catalog() {
                println!("{name:<36} {about}");
            }
            0
        }
    };
    ExitCode::from(code as u8)
}
