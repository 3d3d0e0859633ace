mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use entangle_core::ame::minimize_deviation;
use entangle_core::canonical::{canonicalize, DEFAULT_RESTARTS};
use entangle_core::catalog::{make, CatalogId};
use entangle_core::measurement::{measure, robustness_report, MeasurementBasis};
use entangle_core::metrics::{entropy, pair_profile, party_letter, profile, reduced_spectrum};
use entangle_core::optimizer::{maximize, stationarity_report, OptConfig};
use entangle_core::random::stream_rng;
use entangle_core::sphere::AscentConfig;
use entangle_core::tensor::io::state_to_json;
use entangle_core::verify::run_all;
use entangle_core::Error;
use serde_json::{json, Value};

use output::{read_state, render, with_manifest, RunManifest};

#[derive(Parser)]
#[command(
    name = "entangle",
    version,
    about = "Entanglement of small multipartite pure states"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Indent JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Exit with status 1 when an iterative method does not converge.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a named state as a state file (M4, M4_BAR, C2, CAT_N(5), AME44, ...).
    Catalog { tag: String },
    /// Pair entropies of a state with three or more parties, or the entropy
    /// of one subsystem with --keep.
    Entropy {
        /// State file, or - for standard input.
        file: String,
        /// Parties to keep, e.g. AB or 0,1.
        #[arg(long)]
        keep: Option<String>,
    },
    /// The six pair entropies of a four-party state and their average.
    Profile { file: String },
    /// Closest-product-state canonical form.
    Canonicalize {
        file: String,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, env = "ENTANGLE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Smallest distance from an AME state over random starts.
    Ame {
        /// Comma-separated local dimensions.
        #[arg(long, default_value = "2,2,2,2", value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, env = "ENTANGLE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = AscentConfig::default().max_iters)]
        max_iters: usize,
        #[arg(long, default_value_t = AscentConfig::default().grad_tol)]
        grad_tol: f64,
    },
    /// Multi-start ascent of the average pair entropy of four qubits.
    Maximize {
        #[arg(long, default_value_t = OptConfig::default().restarts)]
        restarts: usize,
        #[arg(long, env = "ENTANGLE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = AscentConfig::default().max_iters)]
        max_iters: usize,
        #[arg(long, default_value_t = AscentConfig::default().grad_tol)]
        grad_tol: f64,
    },
    /// Gradient diagnostics of the average pair entropy at a state.
    Stationarity { file: String },
    /// Measure one party and list outcomes with residual states.
    Measure {
        file: String,
        /// Party letter (A, B, ...) or index.
        #[arg(long, default_value = "A")]
        party: String,
        #[arg(long, value_enum, default_value_t = BasisKind::Computational)]
        basis: BasisKind,
        #[arg(long, env = "ENTANGLE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Residual pair entropies after measuring each party in random bases.
    Robustness {
        file: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, env = "ENTANGLE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, env = "ENTANGLE_SEED", default_value_t = entangle_core::verify::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisKind {
    Computational,
    Plusminus,
    Random,
}

/// Payload, seed for the manifest, and whether the run converged.
struct Outcome {
    payload: Value,
    seed: Option<u64>,
    converged: bool,
}

impl Outcome {
    fn plain(payload: Value) -> Self {
        Self {
            payload,
            seed: None,
            converged: true,
        }
    }
}

fn parse_parties(text: &str, n: usize) -> Result<Vec<usize>, Error> {
    let parts: Vec<String> = if text.contains(',') {
        text.split(',').map(|p| p.trim().to_string()).collect()
    } else if text.chars().all(|c| c.is_ascii_alphabetic()) {
        text.chars().map(String::from).collect()
    } else {
        vec![text.trim().to_string()]
    };
    parts.iter().map(|p| parse_party(p, n)).collect()
}

fn parse_party(text: &str, n: usize) -> Result<usize, Error> {
    let p = match text.parse::<usize>() {
        Ok(i) => i,
        Err(_) => {
            let c = text.to_ascii_uppercase();
            let mut chars = c.chars();
            match (chars.next(), chars.next()) {
                (Some(l), None) if l.is_ascii_uppercase() => (l as u8 - b'A') as usize,
                _ => return Err(Error::Parse(format!("bad party `{text}`"))),
            }
        }
    };
    if p >= n {
        return Err(Error::Shape(format!(
            "party {text} out of range for {n} parties"
        )));
    }
    Ok(p)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serializes")
}

fn execute(command: &Command) -> Result<Outcome, Error> {
    Ok(match command {
        Command::Catalog { tag } => {
            let id: CatalogId = tag.parse()?;
            Outcome::plain(state_to_json(&make(id)?))
        }
        Command::Entropy { file, keep } => {
            let s = read_state(file)?;
            match keep {
                Some(k) => {
                    let parties = parse_parties(k, s.parties())?;
                    let e = entropy(&s.partial_trace(&parties)?)?;
                    let names: String = parties.iter().map(|&p| party_letter(p)).collect();
                    Outcome::plain(json!({
                        "keep": names,
                        "entropy": e,
                        "spectrum": reduced_spectrum(&s, &parties)?,
                    }))
                }
                None => Outcome::plain(to_value(&pair_profile(&s)?)),
            }
        }
        Command::Profile { file } => {
            let p = profile(&read_state(file)?)?;
            let mut v = to_value(&p);
            v["sorted"] = json!(p.sorted());
            Outcome::plain(v)
        }
        Command::Canonicalize {
            file,
            restarts,
            seed,
        } => {
            let c = canonicalize(&read_state(file)?, *restarts, *seed)?;
            Outcome {
                converged: c.converged,
                payload: c.to_json(),
                seed: Some(*seed),
            }
        }
        Command::Ame {
            dims,
            restarts,
            seed,
            max_iters,
            grad_tol,
        } => {
            let config = AscentConfig {
                max_iters: *max_iters,
                grad_tol: *grad_tol,
                ..AscentConfig::default()
            };
            let r = minimize_deviation(dims, *restarts, *seed, &config)?;
            let converged = r.restarts[r.best_restart].trajectory.converged();
            Outcome {
                payload: to_value(&r),
                seed: Some(*seed),
                converged,
            }
        }
        Command::Maximize {
            restarts,
            seed,
            max_iters,
            grad_tol,
        } => {
            let config = OptConfig {
                seed: *seed,
                restarts: *restarts,
                ascent: AscentConfig {
                    max_iters: *max_iters,
                    grad_tol: *grad_tol,
                    ..AscentConfig::default()
                },
                ..OptConfig::default()
            };
            let r = maximize(&config)?;
            Outcome {
                converged: r.converged_count() == r.restarts.len(),
                payload: to_value(&r),
                seed: Some(*seed),
            }
        }
        Command::Stationarity { file } => {
            Outcome::plain(to_value(&stationarity_report(&read_state(file)?)?))
        }
        Command::Measure {
            file,
            party,
            basis,
            seed,
        } => {
            let s = read_state(file)?;
            let p = parse_party(party, s.parties())?;
            let d = s.dims()[p];
            let b = match basis {
                BasisKind::Computational => MeasurementBasis::computational(p, d),
                BasisKind::Plusminus if d == 2 => MeasurementBasis::plus_minus(p),
                BasisKind::Plusminus => {
                    return Err(Error::Domain(format!(
                        "plus/minus basis needs a qubit, party has dimension {d}"
                    )))
                }
                BasisKind::Random => MeasurementBasis::random(&mut stream_rng(*seed, 0), p, d),
            };
            let outcomes = measure(&s, &b)?
                .into_iter()
                .map(|o| {
                    let profile = match &o.residual {
                        Some(r) if r.parties() >= 3 => Some(to_value(&pair_profile(r)?)),
                        _ => None,
                    };
                    Ok(json!({
                        "outcome_index": o.outcome_index,
                        "probability": o.probability,
                        "residual": o.residual,
                        "profile": profile,
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Outcome {
                payload: json!({ "basis": b, "outcomes": outcomes }),
                seed: matches!(basis, BasisKind::Random).then_some(*seed),
                converged: true,
            }
        }
        Command::Robustness { file, trials, seed } => Outcome {
            payload: to_value(&robustness_report(&read_state(file)?, *trials, *seed)?),
            seed: Some(*seed),
            converged: true,
        },
        Command::Verify { seed } => {
            let results = run_all(*seed);
            let passed = results.iter().all(|c| c.passed);
            for c in &results {
                eprintln!("{}", c.line());
            }
            Outcome {
                payload: json!({ "passed": passed, "criteria": results }),
                seed: Some(*seed),
                converged: passed,
            }
        }
    })
}

fn params(command: &Command) -> (&'static str, Value) {
    match command {
        Command::Catalog { tag } => ("catalog", json!({ "tag": tag })),
        Command::Entropy { file, keep } => ("entropy", json!({ "file": file, "keep": keep })),
        Command::Profile { file } => ("profile", json!({ "file": file })),
        Command::Canonicalize {
            file,
            restarts,
            seed,
        } => (
            "canonicalize",
            json!({ "file": file, "restarts": restarts, "seed": seed }),
        ),
        Command::Ame {
            dims,
            restarts,
            seed,
            max_iters,
            grad_tol,
        } => (
            "ame",
            json!({ "dims": dims, "restarts": restarts, "seed": seed, "max_iters": max_iters, "grad_tol": grad_tol }),
        ),
        Command::Maximize {
            restarts,
            seed,
            max_iters,
            grad_tol,
        } => (
            "maximize",
            json!({ "restarts": restarts, "seed": seed, "max_iters": max_iters, "grad_tol": grad_tol }),
        ),
        Command::Stationarity { file } => ("stationarity", json!({ "file": file })),
        Command::Measure {
            file,
            party,
            basis,
            seed,
        } => (
            "measure",
            json!({
                "file": file,
                "party": party,
                "basis": basis.to_possible_value().map(|v| v.get_name().to_string()),
                "seed": seed,
            }),
        ),
        Command::Robustness { file, trials, seed } => (
            "robustness",
            json!({ "file": file, "trials": trials, "seed": seed }),
        ),
        Command::Verify { seed } => ("verify", json!({ "seed": seed })),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let start = Instant::now();
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let (name, params) = params(&cli.command);
    let manifest = RunManifest::new(name, params, outcome.seed, start.elapsed());
    let text = render(&with_manifest(outcome.payload, manifest), cli.pretty);
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    let must_converge = cli.strict || matches!(cli.command, Command::Verify { .. });
    if must_converge && !outcome.converged {
        eprintln!("error: {name} did not converge");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
