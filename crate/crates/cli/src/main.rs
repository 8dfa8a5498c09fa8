//! `gainrig`: sparsity checks, construction sequences and isostatic
//! placements from the command line.
//!
//! Every command prints a one-line summary whose first word is the verdict,
//! followed by a JSON report (or writes the JSON to `-o`). Exit status is 0
//! on success, 1 on a FAIL verdict and 2 on usage or I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use gainrig::colouring::{geometric_verdict, monochrome_quotients};
use gainrig::constructor::{construct, decompose, random_tight, ConstructionSequence};
use gainrig::io::{self, FrameworkFile, GraphFile, IoError};
use gainrig::isomorphism::are_isomorphic;
use gainrig::linalg::RANK_TOLERANCE;
use gainrig::norm::Norm;
use gainrig::placement::{realize, RealisationConfig};
use gainrig::sparsity::{check_sparsity, SparsityParams};
use gainrig::symrigidity::analyse_with_tolerance;

#[derive(Parser, Debug)]
#[command(name = "gainrig", version, about = "Gain-sparsity and symmetric rigidity in normed planes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test a gain graph for (k,l,m)-gain-sparsity and tightness.
    Check {
        graph: PathBuf,
        #[arg(long, default_value = "2,2,0")]
        counts: SparsityParams,
    },
    /// Reduce a tight gain graph to base graphs.
    Decompose {
        graph: PathBuf,
        #[arg(long, default_value = "2,2,0")]
        counts: SparsityParams,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replay a construction sequence.
    Construct {
        sequence: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a random tight gain graph.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "2,2,0")]
        counts: SparsityParams,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rank-based rigidity report for one character.
    Analyse {
        framework: PathBuf,
        #[arg(long, default_value_t = 0)]
        character: usize,
        /// Relative singular-value cut-off for floating-point ranks.
        #[arg(long, default_value_t = RANK_TOLERANCE)]
        tolerance: f64,
    },
    /// Colour classes and the colouring-based verdicts.
    Colour { framework: PathBuf },
    /// Place a construction sequence as an isostatic framework.
    Realize {
        sequence: PathBuf,
        #[arg(long, default_value_t = 0)]
        character: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `linf`, `l1` or a JSON norm such as `{"facets":[[1,0],[1,2]]}`.
        #[arg(long, default_value = "linf", value_parser = parse_norm)]
        norm: Norm,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// gen → decompose → construct → isomorphism check over a seed range.
    Roundtrip {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "2,2,0")]
        counts: SparsityParams,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds to test.
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn parse_norm(s: &str) -> Result<Norm, String> {
    serde_json::from_value(Value::String(s.to_string()))
        .or_else(|_| serde_json::from_str(s))
        .map_err(|e| format!("unrecognised norm {s:?}: {e}"))
}

/// What a command produced: a verdict line, a JSON payload, and whether the
/// verdict counts as failure.
struct Report {
    summary: String,
    payload: Value,
    failed: bool,
}

impl Report {
    fn ok(summary: impl Into<String>, payload: Value) -> Report {
        Report {
            summary: summary.into(),
            payload,
            failed: false,
        }
    }

    fn fail(summary: impl Into<String>, payload: Value) -> Report {
        Report {
            summary: summary.into(),
            payload,
            failed: true,
        }
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialise")
}

fn run(cmd: Command) -> Result<(Report, Option<PathBuf>), IoError> {
    Ok(match cmd {
        Command::Check { graph, counts } => (check(&graph, counts)?, None),
        Command::Decompose { graph, counts, output } => {
            let g = io::parse_graph_file(&graph)?;
            let report = match decompose(&g, counts) {
                Ok(seq) => Report::ok(format!("OK {} steps", seq.steps.len()), to_json(&seq)),
                Err(e) => {
                    let witness = check_sparsity(&g, counts).ok().and_then(|r| r.witness);
                    Report::fail(format!("FAIL {e}"), json!({ "error": e.to_string(), "witness": witness }))
                }
            };
            (report, output)
        }
        Command::Construct { sequence, output } => {
            let seq: ConstructionSequence = io::read_json(&sequence)?;
            let report = match construct(&seq) {
                Ok(g) => Report::ok(
                    format!("OK {} vertices, {} edges", g.vertex_count(), g.edge_count()),
                    to_json(&GraphFile::from_graph(&g)),
                ),
                Err(e) => Report::fail(format!("FAIL {e}"), json!({ "error": e.to_string() })),
            };
            (report, output)
        }
        Command::Gen { n, counts, seed, output } => {
            let report = match random_tight(n, counts, seed) {
                Ok(g) => Report::ok(format!("OK {counts}-tight, {n} vertices"), to_json(&GraphFile::from_graph(&g))),
                Err(e) => Report::fail(format!("FAIL {e}"), json!({ "error": e.to_string() })),
            };
            (report, output)
        }
        Command::Analyse {
            framework,
            character,
            tolerance,
        } => {
            let fw = io::parse_framework_file(&framework)?;
            let report = match analyse_with_tolerance(&fw, character, tolerance) {
                Ok(r) => {
                    let word = if r.isostatic {
                        "ISOSTATIC"
                    } else if r.infinitesimally_rigid {
                        "RIGID"
                    } else if r.independent {
                        "INDEPENDENT"
                    } else {
                        "FLEXIBLE"
                    };
                    Report::ok(format!("{word} rank {} for character {character}", r.rank), to_json(&r))
                }
                Err(e) => Report::fail(format!("FAIL {e}"), json!({ "error": e.to_string() })),
            };
            (report, None)
        }
        Command::Colour { framework } => {
            let fw = io::parse_framework_file(&framework)?;
            let report = match monochrome_quotients(&fw).and_then(|c| Ok((c, geometric_verdict(&fw)?))) {
                Ok((c, v)) => Report::ok(
                    format!(
                        "COLOURED chi0-isostatic={} chi1-isostatic={} rigid={}",
                        v.chi0_isostatic, v.chi1_isostatic, v.infinitesimally_rigid
                    ),
                    json!({ "classes": c, "verdict": v }),
                ),
                Err(e) => Report::fail(format!("FAIL {e}"), json!({ "error": e.to_string() })),
            };
            (report, None)
        }
        Command::Realize {
            sequence,
            character,
            seed,
            norm,
            output,
        } => {
            let seq: ConstructionSequence = io::read_json(&sequence)?;
            let cfg = RealisationConfig {
                seed,
                norm,
                ..Default::default()
            };
            let report = match realize(&seq, character, &cfg) {
                Ok(fw) => Report::ok(
                    format!("ISOSTATIC for character {character}, {} vertices", fw.vertex_count()),
                    to_json(&FrameworkFile::from_framework(&fw)),
                ),
                Err(e) => Report::fail(format!("FAIL {e}"), json!({ "error": e.to_string() })),
            };
            (report, output)
        }
        Command::Roundtrip {
            n,
            counts,
            seed,
            count,
            jobs,
        } => (roundtrip(n, counts, seed, count, jobs), None),
    })
}

fn check(path: &Path, counts: SparsityParams) -> Result<Report, IoError> {
    let g = io::parse_graph_file(path)?;
    let report = match check_sparsity(&g, counts) {
        Ok(r) => r,
        Err(e) => return Ok(Report::fail(format!("FAIL {e}"), json!({ "error": e.to_string() }))),
    };
    let tight_count = i64::from(counts.k()) * g.vertex_count() as i64 - i64::from(counts.m());
    let tight = report.passed && g.edge_count() as i64 == tight_count;
    let payload = json!({
        "counts": counts.to_string(),
        "passed": report.passed,
        "tight": tight,
        "witness": report.witness,
    });
    Ok(match (report.passed, tight) {
        (true, true) => Report::ok("TIGHT", payload),
        (true, false) => Report::ok("PASS", payload),
        _ => Report::fail("FAIL", payload),
    })
}

fn roundtrip_one(n: usize, counts: SparsityParams, seed: u64) -> Result<(), String> {
    let g = random_tight(n, counts, seed).map_err(|e| e.to_string())?;
    let seq = decompose(&g, counts).map_err(|e| e.to_string())?;
    let h = construct(&seq).map_err(|e| e.to_string())?;
    if are_isomorphic(&g, &h) {
        Ok(())
    } else {
        Err("reconstruction is not isomorphic to the input".into())
    }
}

fn roundtrip(n: usize, counts: SparsityParams, seed: u64, count: u64, jobs: usize) -> Report {
    let seeds: Vec<u64> = (seed..seed.saturating_add(count)).collect();
    let chunk = seeds.len().div_ceil(jobs.max(1)).max(1);
    let mut failures: Vec<(u64, String)> = thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .filter_map(|&sd| roundtrip_one(n, counts, sd).err().map(|e| (sd, e)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("roundtrip worker panicked"))
            .collect()
    });
    failures.sort();
    let payload = json!({
        "n": n,
        "counts": counts.to_string(),
        "seeds": seeds.len(),
        "failures": failures.iter().map(|(s, e)| json!({ "seed": s, "error": e })).collect::<Vec<_>>(),
    });
    if failures.is_empty() {
        Report::ok(format!("PASS {} round trips", seeds.len()), payload)
    } else {
        Report::fail(format!("FAIL {} of {} round trips", failures.len(), seeds.len()), payload)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, output)) => {
            let text = serde_json::to_string_pretty(&report.payload).expect("json");
            let mut out = std::io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(out, "{}", report.summary);
            match output {
                Some(path) if !report.failed => {
                    if let Err(e) = io::write_text(&path, &text) {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
                _ => {
                    let _ = writeln!(out, "{text}");
                }
            }
            ExitCode::from(if report.failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
