use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use geoprobe::dataset::TaskId;
use geoprobe::encoding::EncoderKind;
use geoprobe::eval::Variant;
use geoprobe::pipeline::{self, PipelineError, RunOptions};

#[derive(Parser)]
#[command(
    name = "geoprobe",
    version,
    about = "Probe WKT embeddings for spatial knowledge"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic geometry set
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute ground truth and task datasets
    Truth {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Embed geometries and relation phrases into a cache file
    Encode {
        #[arg(long)]
        encoder: EncoderKind,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cache: PathBuf,
    },
    /// Train and evaluate one task
    Run {
        #[arg(long)]
        task: TaskId,
        #[arg(long, default_value = "default")]
        variant: Variant,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Encoding to use when several were produced
        #[arg(long)]
        encoder: Option<String>,
    },
    /// Collect run files into results.json and table.md
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn execute(cmd: Command) -> Result<(), PipelineError> {
    match cmd {
        Command::Generate { config, out } => {
            let records = pipeline::generate(&config, &out)?;
            println!(
                "generated {} geometries in {}",
                records.len(),
                out.display()
            );
        }
        Command::Truth { input } => {
            let s = pipeline::truth(&input)?;
            println!(
                "{} triplets, {} location queries",
                s.triplet_counts.values().sum::<usize>(),
                s.query_counts.values().sum::<usize>()
            );
            for w in &s.shortfalls {
                println!("shortfall: {w}");
            }
        }
        Command::Encode {
            encoder,
            endpoint,
            input,
            cache,
        } => {
            let r = pipeline::encode(&input, encoder, endpoint.as_deref(), &cache)?;
            println!(
                "{} vectors for {} in {}",
                r.items,
                r.encoder_id,
                cache.display()
            );
        }
        Command::Run {
            task,
            variant,
            seed,
            input,
            out,
            encoder,
        } => {
            let opts = RunOptions {
                task,
                variant,
                seed,
                encoder,
            };
            let r = pipeline::run(&input, &opts, &out)?;
            let show = |v: Option<f64>| v.map_or("N/A".to_string(), |v| format!("{v:.6}"));
            println!(
                "{} {} {:?}: validation {} test {}",
                r.task,
                r.variant,
                r.metric,
                show(r.validation),
                show(r.test)
            );
        }
        Command::Report { input } => {
            let r = pipeline::report(&input)?;
            print!("{}", r.to_markdown());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
