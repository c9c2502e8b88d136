use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use superds::ds::{ds, ModuleJson};
use superds::field::Fp;
use superds::injectivity::{find_witness, free_decompose, OddModuleJson, WitnessOutcome};
use superds::lie::lie_centralizer_and_bracket;
use superds::report::{run_suite, Params, ReportError};
use superds::supergroups::Supergroup;
use superds::weights::{ell, interval, leq, Weight};
use superds::with_prime;

#[derive(Parser)]
#[command(name = "superds", version, about = "Exact DS-functor computations in odd characteristic")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite: derham, koszul, hopf, gl, gl-maxrank or q.
    Verify {
        suite: String,
        #[command(flatten)]
        params: SuiteArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Graded dimensions of M_x for a module file `{"p", "parity", "x"}`.
    Ds { module: PathBuf },
    /// Lie-level DS quotient of gl(m|n) or q(n).
    #[command(subcommand)]
    Lie(LieCommand),
    /// Injectivity and DS witnesses for purely odd abelian actions.
    #[command(subcommand)]
    Inject(InjectCommand),
    /// Order and intervals in the periplectic weight poset.
    #[command(subcommand)]
    Weights(WeightsCommand),
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    dmax: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Gl,
    Q,
}

#[derive(Subcommand)]
enum LieCommand {
    /// Centralizer, bracket image and the quotient g_x for an odd element.
    Dsquotient {
        #[arg(long, value_enum, default_value_t = Family::Gl)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: usize,
        /// Row of the rank-one element; omit both indices for the maximal-rank element of gl(n|n).
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
    },
}

#[derive(Subcommand)]
enum InjectCommand {
    /// Freeness and a DS witness for a module file `{"p", "parity", "actions"}`.
    Check {
        module: PathBuf,
        #[arg(long)]
        max_ext: Option<usize>,
    },
}

#[derive(Subcommand)]
enum WeightsCommand {
    /// Decide μ ≤ λ.
    Leq(WeightArgs),
    /// Enumerate [μ, λ].
    Interval {
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long)]
        dominant: bool,
    },
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Vec<i64>,
    #[arg(long = "lambda", value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Vec<i64>,
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::UnknownSuite(_) | ReportError::BadParams(_) => Failure::Usage(e.to_string()),
            other => Failure::Failed(other.to_string()),
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn failed(e: impl ToString) -> Failure {
    Failure::Failed(e.to_string())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn unsupported(p: u32) -> Failure {
    usage(format!("unsupported prime {p}; use 3, 5, 7, 11 or 13"))
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("json value serializes"),
        Format::Md => {
            let mut out = String::from("| key | value |\n|---|---|\n");
            if let Value::Object(map) = value {
                for (k, v) in map {
                    out.push_str(&format!("| {k} | {} |\n", v.to_string().replace('|', "\\|")));
                }
            }
            out
        }
    }
}

/// Output plus whether the command counts as passing.
fn run(cli: Cli) -> Result<(String, bool), Failure> {
    let format = cli.format;
    match cli.command {
        Command::Verify { suite, params, seed } => {
            let params = Params { p: params.p, s: params.s, m: params.m, n: params.n, i: params.i, j: params.j, t: params.t, dmax: params.dmax };
            let report = run_suite(&suite, &params, seed)?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Md => report.to_markdown(),
            };
            Ok((text, report.passed()))
        }
        Command::Ds { module } => {
            let m: ModuleJson = read_json(&module)?;
            let value = with_prime!(m.p, P => {
                let x = m.operator::<P>().map_err(usage)?;
                let r = ds(&x);
                json!({ "p": P, "dim": x.sdim(), "rank": x.rank(), "ds": r.sdim() })
            })
            .map_err(unsupported)?;
            Ok((render(&value, format), true))
        }
        Command::Lie(LieCommand::Dsquotient { family, p, m, n, i, j }) => {
            let value = with_prime!(p, P => {
                let g = match family {
                    Family::Gl => Supergroup::<Fp<P>>::gl(m.unwrap_or(n), n),
                    Family::Q => Supergroup::<Fp<P>>::q(n),
                }
                .map_err(usage)?;
                let x = match (i, j) {
                    (Some(i), Some(j)) => g.rank_one_element(i, j),
                    (None, None) => g.max_rank_element(),
                    _ => return Err(usage("give both --i and --j, or neither")),
                }
                .map_err(usage)?;
                let q = lie_centralizer_and_bracket(&g.lie, &x).map_err(failed)?;
                json!({
                    "p": P,
                    "dim_g": g.lie.dim(),
                    "dim_centralizer": q.centralizer.dim(),
                    "dim_bracket_image": q.bracket_image.dim(),
                    "g_x": q.sdim(),
                })
            })
            .map_err(unsupported)?;
            Ok((render(&value, format), true))
        }
        Command::Inject(InjectCommand::Check { module, max_ext }) => {
            let m: OddModuleJson = read_json(&module)?;
            let (value, ok) = with_prime!(m.p, P => {
                let module = m.module::<P>().map_err(usage)?;
                let dec = free_decompose(&module).map_err(failed)?;
                let outcome = find_witness::<P>(&module, max_ext).map_err(failed)?;
                let ok = !matches!(outcome, WitnessOutcome::Inconclusive { .. });
                let value = json!({
                    "p": P,
                    "dim": module.sdim(),
                    "generators": module.rank(),
                    "injective": module.is_free(),
                    "free_rank": dec.free_rank(),
                    "complement": dec.complement.sdim(),
                    "witness": outcome,
                });
                (value, ok)
            })
            .map_err(unsupported)?;
            Ok((render(&value, format), ok))
        }
        Command::Weights(cmd) => {
            let (args, dominant) = match &cmd {
                WeightsCommand::Leq(a) => (a, None),
                WeightsCommand::Interval { weights, dominant } => (weights, Some(*dominant)),
            };
            let (mu, lambda) = (Weight(args.mu.clone()), Weight(args.lambda.clone()));
            if let Some(n) = args.n {
                if mu.n() != n || lambda.n() != n {
                    return Err(usage(format!("--n {n} does not match the weight lengths {} and {}", mu.n(), lambda.n())));
                }
            }
            let below = leq(&mu, &lambda).map_err(usage)?;
            let value = match dominant {
                None => {
                    let l = if below { Some(ell(&mu, &lambda).map_err(failed)?) } else { None };
                    json!({ "mu": mu, "lambda": lambda, "leq": below, "ell": l })
                }
                Some(dominant) => {
                    let items = interval(&mu, &lambda, dominant).map_err(usage)?;
                    json!({ "mu": mu, "lambda": lambda, "dominant_only": dominant, "size": items.len(), "interval": items })
                }
            };
            Ok((render(&value, format), true))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((text, ok)) => {
            let _ = writeln!(std::io::stdout(), "{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
