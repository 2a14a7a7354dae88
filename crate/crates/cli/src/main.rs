use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use procosheaf_cli::demo::run_demo;
use procosheaf_cli::export::{export_fixture, import, ExportFormat};
use procosheaf_cli::suites::{DEFAULT_TRUNCATION, DEFAULT_WINDOW};
use procosheaf_cli::{run_suite, Ctx, Registry, VerificationReport, SUITES};

#[derive(Parser)]
#[command(name = "procosh", version, about = "Checks profinite cosheaf constructions on finite truncations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFmt {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite, or all of them.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: usize,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        /// Run only this fixture, including negative ones.
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a worked example.
    Demo {
        name: String,
        #[arg(long, default_value_t = 3)]
        truncation: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a fixture as JSON or DOT.
    Export {
        #[arg(long)]
        fixture: String,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFmt,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read an exported JSON file and check it.
    Import {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: usize,
    },
    /// List fixtures and suites.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, out: Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Verify { suite, seed, truncation, window, fixture, format, out } => {
            let registry = Registry::load()?;
            if let Some(f) = &fixture {
                registry.get(f)?;
            }
            let names: Vec<&str> = match suite.as_str() {
                "all" => SUITES.to_vec(),
                s if SUITES.contains(&s) => vec![s],
                s => bail!("unknown suite {s}; expected one of {} or all", SUITES.join(", ")),
            };
            let ctx = Ctx { seed, truncation, window, fixture, ..Ctx::new(registry) };
            let reports = names.iter().map(|s| run_suite(s, &ctx)).collect::<Result<Vec<VerificationReport>>>()?;
            let text = match format {
                Format::Text => reports.iter().map(VerificationReport::to_text).collect::<String>(),
                Format::Json => serde_json::to_string_pretty(&reports)? + "\n",
            };
            emit(&text, out)?;
            Ok(reports.iter().all(VerificationReport::ok))
        }
        Command::Demo { name, truncation, format, out } => {
            let r = run_demo(&name, truncation)?;
            let text = match format {
                Format::Text => r.to_text(),
                Format::Json => serde_json::to_string_pretty(&r)? + "\n",
            };
            emit(&text, out)?;
            Ok(r.ok())
        }
        Command::Export { fixture, format, truncation, out } => {
            let format = match format {
                ExportFmt::Json => ExportFormat::Json,
                ExportFmt::Dot => ExportFormat::Dot,
            };
            emit(&export_fixture(&Registry::load()?, &fixture, format, truncation)?, out)?;
            Ok(true)
        }
        Command::Import { file, truncation } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            println!("{}", import(&text)?.summary(truncation));
            Ok(true)
        }
        Command::List => {
            let registry = Registry::load()?;
            println!("suites: {}", SUITES.join(", "));
            for d in registry.descriptors() {
                let tag = if d.negative { " (negative)" } else { "" };
                println!("{:<32} {:?}{tag}", d.name, d.kind);
            }
            Ok(true)
        }
    }
}
