use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use filtrate::{emit, parse_jobs, run, run_batch, batch_failure, Command, JobSpec, GRAMMAR};
use filtrate_core::filt::Route;

/// Filtrations of free groups: membership, Magnus expansions, unipotent
/// representations, recursive sampling and Massey ranks.
#[derive(Parser)]
#[command(name = "filtrate", version, after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Seed recorded in the report and used by `sample`
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Decide whether a word lies in level n of the filtration defined by an e-map
    #[command(after_help = GRAMMAR)]
    Member {
        #[arg(long)]
        word: String,
        #[arg(long)]
        emap: String,
        #[arg(long)]
        level: usize,
        /// Number of generators; defaults to the largest index in the word
        #[arg(long)]
        alphabet: Option<u32>,
        #[arg(long, default_value = "both")]
        route: Route,
    },
    /// Truncated Magnus expansion of a word
    #[command(after_help = GRAMMAR)]
    Magnus {
        #[arg(long)]
        word: String,
        #[arg(long, default_value = "Z")]
        ring: String,
        #[arg(long)]
        cap: usize,
        #[arg(long)]
        alphabet: Option<u32>,
    },
    /// Unipotent matrix of a word attached to a monomial
    #[command(after_help = GRAMMAR)]
    Rep {
        #[arg(long)]
        word: String,
        #[arg(long)]
        monomial: String,
        #[arg(long, default_value = "Z")]
        ring: String,
        #[arg(long)]
        alphabet: Option<u32>,
    },
    /// Random elements of a filtration level
    #[command(after_help = GRAMMAR)]
    Sample {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 30)]
        count: usize,
        /// Defaults to 2
        #[arg(long)]
        alphabet: Option<u32>,
    },
    /// Audit an e-map: descending, binomial and the p-adic sufficient condition
    #[command(after_help = GRAMMAR)]
    EmapCheck {
        #[arg(long)]
        emap: String,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Rank of the Massey pairing matrix against the necklace count
    Massey {
        #[arg(long)]
        alphabet: u32,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        emit_matrix: bool,
    },
    /// Run a JSON job file (a list of jobs, each tagged with "command")
    #[command(after_help = GRAMMAR)]
    Batch {
        #[arg(long)]
        jobs: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Sub::Member { word, emap, level, alphabet, route } => Command::Member { word, emap, level, alphabet, route },
        Sub::Magnus { word, ring, cap, alphabet } => Command::Magnus { word, ring, cap, alphabet },
        Sub::Rep { word, monomial, ring, alphabet } => Command::Rep { word, monomial, ring, alphabet },
        Sub::Sample { scheme, level, count, alphabet } => Command::Sample { scheme, level, count, alphabet },
        Sub::EmapCheck { emap, n_max } => Command::EmapCheck { emap, n_max },
        Sub::Massey { alphabet, level, emit_matrix } => Command::Massey { alphabet, level, emit_matrix },
        Sub::Batch { jobs } => return batch(&jobs, cli.output),
    };
    let job = JobSpec { command, seed: cli.seed, output: cli.output };
    let report = run(&job);
    finish(&report, job.output.as_deref())
}

fn batch(path: &std::path::Path, output: Option<PathBuf>) -> ExitCode {
    let jobs = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))
        .and_then(|text| parse_jobs(&text));
    let report = match jobs {
        Ok(jobs) => {
            let report = run_batch(&jobs);
            for (job, body) in jobs.iter().zip(report.body["jobs"].as_array().into_iter().flatten()) {
                if let Some(p) = &job.output {
                    let single = filtrate::Report { exit: report.exit, body: body.clone() };
                    if let Err(e) = emit(&single, Some(p)) {
                        eprintln!("filtrate: cannot write {}: {e}", p.display());
                    }
                }
            }
            report
        }
        Err(msg) => batch_failure(&msg),
    };
    finish(&report, output.as_deref())
}

fn finish(report: &filtrate::Report, output: Option<&std::path::Path>) -> ExitCode {
    if let Err(e) = emit(report, output) {
        eprintln!("filtrate: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if let Some(msg) = report.body.pointer("/error/message").and_then(|m| m.as_str()) {
        eprintln!("filtrate: {msg}");
    }
    ExitCode::from(report.exit.code())
}
