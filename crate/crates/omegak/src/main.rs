//! Command-line front end: space lookup, single-entry runs with optional
//! traces, and the full verification sweep.
//!
//! Exit codes are a stable contract: 0 for a clean run, 1 when a
//! verification check fails, 2 for usage or data errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use omegak::catalog::Catalog;
use omegak::presentation::Presentation;
use omegak::specseq::{reject_variant, run_entry};
use omegak::verify::{verify_all, verify_ids};
use omegak::Result;

#[derive(Parser)]
#[command(name = "omegak", version, about = "Verification engine for a catalog of graded Hopf algebras over F2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print a space's presentation, Verschiebung rules, and series.
    Show {
        /// Space name such as "KO:3" or "KR1:6"; indices reduce modulo the
        /// theory's period.
        space: String,
        #[arg(short = 'N', long = "max-degree", default_value_t = 40)]
        max_degree: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run one catalog entry and print the verdict.
    Ss {
        /// Entry id such as "OO01" or "KRR576".
        id: String,
        #[arg(short = 'N', long = "max-degree", default_value_t = 40)]
        max_degree: u64,
        /// Print the page-by-page story: kernel, cokernel, second page,
        /// each differential, each extension.
        #[arg(long)]
        trace: bool,
        /// Run the k-th recorded alternative first map (1-indexed) through
        /// the rejection screens instead of the entry itself.
        #[arg(long)]
        variant: Option<usize>,
    },
    /// Run catalog checks and print the report.
    Verify {
        /// Every check: entries, variants, cohomology-side runs, the
        /// connecting ladder, the exact chain, homotopy tables, coverage.
        #[arg(long, conflicts_with = "ids")]
        all: bool,
        /// Check only these entry ids.
        #[arg(long, num_args = 1..)]
        ids: Vec<String>,
        #[arg(short = 'N', long = "max-degree", default_value_t = 40)]
        max_degree: u64,
        /// Worker threads for the entry fan-out; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Show {
            space,
            max_degree,
            format,
        } => cmd_show(&space, max_degree, format),
        Command::Ss {
            id,
            max_degree,
            trace,
            variant,
        } => cmd_ss(&id, max_degree, trace, variant),
        Command::Verify {
            all,
            ids,
            max_degree,
            jobs,
            format,
        } => cmd_verify(all, &ids, max_degree, jobs, format),
    }
}

#[derive(Serialize)]
struct ShowOutput<'a> {
    name: String,
    pi0: String,
    presentation: &'a Presentation,
    /// Graded dimensions in degrees 0 through N, as decimal strings.
    dims: Vec<String>,
}

fn cmd_show(space: &str, n: u64, format: Format) -> Result<ExitCode> {
    let cat = Catalog::shipped()?;
    let s = cat.space(space)?;
    let series = s.presentation.series(n)?;
    let dims: Vec<String> = series.coeffs().iter().map(|c| c.to_string()).collect();
    match format {
        Format::Json => {
            let out = ShowOutput {
                name: s.name(),
                pi0: s.pi0.to_string(),
                presentation: &s.presentation,
                dims,
            };
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Text => {
            println!("{}  pi0 = {}", s.name(), s.pi0);
            println!("  {}", s.presentation);
            for v in &s.presentation.vrules {
                let pow = if v.pow == 1 {
                    String::new()
                } else {
                    format!("^{}", v.pow)
                };
                println!("  V: {}|{} -> {}{}", v.source, v.members, v.target, pow);
            }
            println!("  dims 0..={n}: {}", dims.join(", "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_ss(id: &str, n: u64, trace: bool, variant: Option<usize>) -> Result<ExitCode> {
    let cat = Catalog::shipped()?;
    let entry = cat.lookup_entry(id)?;
    println!(
        "{id}: {} -> {} -> {}",
        entry.fiber, entry.total, entry.base
    );

    if let Some(k) = variant {
        if k == 0 || k > entry.variants.len() {
            return Err(omegak::Error::NotFound(format!(
                "entry {id} has {} variant(s), asked for {k}",
                entry.variants.len()
            )));
        }
        return Ok(
            match reject_variant(&entry.variants[k - 1], &entry.spec.base, entry.spec.pi0, n) {
                Ok(reason) => {
                    println!("fail  variant {k}: {reason}");
                    ExitCode::from(1)
                }
                Err(err) => {
                    // The screens could not reject it; that is an engine
                    // verdict, not a usage error, but there is no pass here.
                    println!("inconclusive  variant {k}: {err}");
                    ExitCode::from(1)
                }
            },
        );
    }

    match run_entry(&entry.spec, n) {
        Ok(outcome) => {
            if trace {
                // The trace already ends with the final presentation.
                for line in &outcome.trace {
                    println!("  {line}");
                }
            } else {
                println!("  final: {}", outcome.final_page);
            }
            for note in &outcome.notes {
                println!("  note: {note}");
            }
            println!("pass  {id} through degree {n}");
            Ok(ExitCode::SUCCESS)
        }
        Err(err) => {
            println!("fail  {id}: {err}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_verify(
    all: bool,
    ids: &[String],
    n: u64,
    jobs: Option<usize>,
    format: Format,
) -> Result<ExitCode> {
    if !all && ids.is_empty() {
        return Err(omegak::Error::Catalog(
            "verify needs --all or --ids".into(),
        ));
    }
    if let Some(j) = jobs {
        // Ignore the error from a pool that is already running; it only
        // means a previous flag won.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let cat = Catalog::shipped()?;
    let report = if all {
        verify_all(&cat, n)?
    } else {
        verify_ids(&cat, ids, n)?
    };
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()?),
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
