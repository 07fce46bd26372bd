use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use halfgap::records::RecordFormat;
use halfgap::{emit_table, parse_pair, read_records, run_pipeline, summarize_records, write_records, Error, Format, PipelineConfig, Stage};
use halfgap_core::gap::{solve_gap, GapModel, Separation};
use halfgap_core::model::Arc;

#[derive(Parser)]
#[command(name = "halfgap", version, about = "Half-integer vertices of the ATSP subtour polytope and their integrality gaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all candidates for one node count and classify them.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write records here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        /// Resume from and keep updating this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        max_candidates: Option<u64>,
        /// Stop after this stage.
        #[arg(long, value_enum, default_value_t = Stage::Gap)]
        stage: Stage,
    },
    /// Exact integrality gap of one pair encoding.
    Gap {
        #[arg(long)]
        pair: String,
        /// Also print the optimal arc costs.
        #[arg(long)]
        costs: bool,
        /// Write the final LP, with the generated tour rows, in LP format.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
    },
    /// Cross-check the pipeline against brute-force oracles.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Summarize JSONL or CSV record files.
    Table {
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn open_output(path: Option<&PathBuf>) -> halfgap::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|source| Error::Io { path: p.clone(), source })?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> halfgap::Result<ExitCode> {
    match cli.command {
        Command::Enumerate { n, jobs, output, format, checkpoint, max_candidates, stage } => {
            let cfg = PipelineConfig { n, jobs, output, format, checkpoint, max_candidates, stage };
            let run = run_pipeline(&cfg)?;
            let mut out = open_output(cfg.output.as_ref())?;
            match format {
                Format::Jsonl => write_records(&run.records, RecordFormat::Jsonl, &mut out)?,
                Format::Csv => write_records(&run.records, RecordFormat::Csv, &mut out)?,
                Format::Table => {
                    let path = cfg.output.clone().unwrap_or_else(|| "<stdout>".into());
                    out.write_all(emit_table(std::slice::from_ref(&run.summary)).as_bytes())
                        .map_err(|source| Error::Io { path, source })?;
                }
            }
            if format != Format::Table {
                eprint!("{}", emit_table(&[run.summary]));
            }
        }
        Command::Gap { pair, costs, dump_lp } => {
            let pair = parse_pair(&pair)?;
            let x = halfgap::pipeline::half_point(&pair);
            let sol = solve_gap(&x, Separation::default())?;
            let gap = sol.gap();
            println!("gap = {gap} (≈ {:.6})", gap.to_f64());
            if costs {
                for (id, c) in sol.costs.iter().enumerate() {
                    println!("{} {c}", Arc::from_id(id, sol.n));
                }
            }
            if let Some(path) = dump_lp {
                let mut model = GapModel::build(&x)?;
                for t in &sol.tours {
                    model.add_tour(t)?;
                }
                std::fs::write(&path, model.to_lp_text()).map_err(|source| Error::Io { path, source })?;
            }
        }
        Command::Verify { n, jobs } => {
            let mut failed = false;
            for c in halfgap::verify::verify(n, jobs)? {
                let tag = match c.passed {
                    Some(true) => "ok",
                    Some(false) => "FAIL",
                    None => "skip",
                };
                failed |= c.passed == Some(false);
                println!("{tag:4} {}: {}", c.name, c.detail);
            }
            if failed {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Table { inputs } => {
            let mut records = Vec::new();
            for path in &inputs {
                records.extend(read_records(path)?);
            }
            print!("{}", emit_table(&summarize_records(&records)?));
        }
    }
    Ok(ExitCode::SUCCESS)
}
