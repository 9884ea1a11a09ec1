use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rug::{Integer, Rational};
use serde_json::{json, Value};

use linsep::arith::Mode;
use linsep::bench::{margin_sweep, parse_gammas, write_csv, Algo, SweepConfig};
use linsep::generate::{generate, GeneratorSpec};
use linsep::instance::{
    format_rational, parse_instance, parse_lp, parse_rational, parse_rational_vector, verify_solution_exact,
    write_instance, Relation,
};
use linsep::newton::{QPolicy, SolveStatus, SolverConfig};
use linsep::reductions::{feasibility_certificate, normalize_rows, solve_lp, Certificate};
use linsep::{solve_feasibility, Error};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "linsep", version, about = "Exact solver for Ax > 0 over the integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    Strict,
    Weak,
}

#[derive(Subcommand)]
enum Command {
    /// Solve Ax > 0 for an instance file.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// fixed:Q, from-omega or adaptive. Defaults to from-omega when the
        /// instance carries a planted witness, adaptive otherwise.
        #[arg(long)]
        q_policy: Option<String>,
        /// Bound on Ω; defaults to the planted ωᵀω, else 1 (the adaptive grid
        /// grows it as needed).
        #[arg(long)]
        omega_bound: Option<String>,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Per-step trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a feasible instance with a planted solution.
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        bits: u32,
        #[arg(long, default_value = "1/4")]
        margin: String,
        /// Optional upper bound on every row's cosine to the planted point.
        #[arg(long)]
        margin_cap: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Step counts of perceptron and Newton over a margin sweep, as CSV.
    Bench {
        #[arg(long, default_value = "margin-sweep")]
        family: String,
        #[arg(long, default_value = "2^-2..2^-7")]
        gammas: String,
        #[arg(long, default_value = "perceptron,newton")]
        algo: String,
        #[arg(long, default_value_t = 12)]
        m: usize,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        bits: u32,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Use the plain lower-bound generator instead of the [γ, 2γ) band.
        #[arg(long)]
        unbanded: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a solution exactly.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Whitespace-separated p/q values, or the JSON written by `solve`.
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, value_enum, default_value = "strict")]
        relation: RelationArg,
        /// Whitespace-separated integers b for Ax ⋈ b.
        #[arg(long)]
        rhs: Option<PathBuf>,
    },
    /// Solve an LP (instance plus `b:` and optional `c:` lines).
    Lp {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::StepBudgetExceeded { .. } | Error::NumericFailure => EXIT_BUDGET,
                _ => EXIT_INPUT,
            })
        }
    }
}

fn mode(arg: ModeArg) -> Mode {
    match arg {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    }
}

fn read(path: &Path) -> linsep::Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn emit(output: Option<&Path>, text: &str) -> linsep::Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn rational_arg(name: &str, text: &str) -> linsep::Result<Rational> {
    parse_rational(text.trim()).ok_or_else(|| Error::InvalidConfig(format!("--{name}: `{text}` is not p/q")))
}

fn q_policy(text: &str) -> linsep::Result<QPolicy> {
    match text {
        "from-omega" => Ok(QPolicy::FromOmega),
        "adaptive" => Ok(QPolicy::Adaptive { start: None }),
        _ => {
            let q = text
                .strip_prefix("fixed:")
                .and_then(|q| Integer::from_str_radix(q, 10).ok())
                .ok_or_else(|| Error::InvalidConfig(format!("unknown q policy `{text}`")))?;
            Ok(QPolicy::Fixed(q))
        }
    }
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn run(command: Command) -> linsep::Result<u8> {
    match command {
        Command::Solve {
            input,
            mode: m,
            q_policy: policy,
            omega_bound: omega,
            max_steps,
            trace,
            output,
        } => {
            let inst = parse_instance(&read(&input)?)?;
            let planted = inst.planted_norm_sq();
            let omega = match (omega, &planted) {
                (Some(text), _) => rational_arg("omega-bound", &text)?,
                (None, Some(w)) => w.clone(),
                (None, None) => Rational::from(1),
            };
            let policy = match policy {
                Some(p) => q_policy(&p)?,
                None if planted.is_some() => QPolicy::FromOmega,
                None => QPolicy::Adaptive { start: None },
            };
            let config = SolverConfig::new(mode(m), omega)
                .with_q_policy(policy)
                .with_max_steps(max_steps)
                .with_trace(trace.is_some());
            let norm = normalize_rows(inst.matrix())?;
            let report = solve_feasibility(&norm, &config)?;
            if let Some(path) = trace {
                let mut lines = String::new();
                for record in &report.trace {
                    lines.push_str(&serde_json::to_string(record).expect("trace record serializes"));
                    lines.push('\n');
                }
                fs::write(path, lines)?;
            }
            let verified = match &report.x {
                Some(x) => verify_solution_exact(&inst, x, Relation::Strict, None)?.ok,
                None => false,
            };
            let (status, code) = match report.status {
                SolveStatus::Solved if verified => ("solved", 0),
                SolveStatus::Solved => ("unverified", 1),
                SolveStatus::StepBudgetExceeded => ("step_budget_exceeded", EXIT_BUDGET),
                SolveStatus::NumericFailure => ("numeric_failure", EXIT_BUDGET),
            };
            let record = json!({
                "status": status,
                "x": report.x.as_deref().map(strings),
                "steps": report.steps_total,
                "verified": verified,
                "mode_used": report.mode_used,
                "restarts": report.restarts,
                "wall_ms": report.wall_ms,
            });
            emit(output.as_deref(), &format!("{record:#}\n"))?;
            Ok(code)
        }
        Command::Gen {
            m,
            n,
            bits,
            margin,
            margin_cap,
            seed,
            output,
        } => {
            let mut spec = GeneratorSpec::new(m, n, bits, rational_arg("margin", &margin)?, seed);
            if let Some(cap) = margin_cap {
                spec = spec.with_cap(rational_arg("margin-cap", &cap)?);
            }
            emit(output.as_deref(), &write_instance(&generate(&spec)?))?;
            Ok(0)
        }
        Command::Bench {
            family,
            gammas,
            algo,
            m,
            n,
            bits,
            seeds,
            mode: md,
            unbanded,
            output,
        } => {
            if family != "margin-sweep" {
                return Err(Error::InvalidConfig(format!("unknown family `{family}`")));
            }
            let config = SweepConfig {
                gammas: parse_gammas(&gammas)?,
                m,
                n,
                bits,
                seeds: (0..seeds).collect(),
                algos: algo.split(',').map(str::parse::<Algo>).collect::<linsep::Result<_>>()?,
                mode: mode(md),
                banded: !unbanded,
            };
            let rows = margin_sweep(&config)?;
            match output {
                Some(p) => write_csv(&rows, fs::File::create(p)?)?,
                None => write_csv(&rows, io::stdout())?,
            }
            Ok(0)
        }
        Command::Check {
            input,
            solution,
            relation,
            rhs,
        } => {
            let inst = parse_instance(&read(&input)?)?;
            let x = parse_solution(&read(&solution)?)?;
            let rhs = match rhs {
                Some(p) => Some(parse_integer_vector(&read(&p)?)?),
                None => None,
            };
            let relation = match relation {
                RelationArg::Strict => Relation::Strict,
                RelationArg::Weak => Relation::Weak,
            };
            let v = verify_solution_exact(&inst, &x, relation, rhs.as_deref())?;
            println!("{:#}", json!({ "ok": v.ok, "margin": format_rational(&v.margin) }));
            Ok(if v.ok { 0 } else { 1 })
        }
        Command::Lp { input, mode: md, output } => {
            let lp = parse_lp(&read(&input)?)?;
            let config = linsep::reductions::chain_config(mode(md));
            let cert = match &lp.c {
                Some(_) => solve_lp(&lp, &config)?,
                None => feasibility_certificate(&lp.a, &lp.b, &config)?,
            };
            let verified = cert.verify(&lp);
            let (record, code) = match &cert {
                Certificate::Solution { x, dual } => (
                    json!({
                        "status": "optimal",
                        "x": strings(x),
                        "dual": dual.as_deref().map(strings),
                        "value": lp.c.as_deref().and_then(|c| cert.objective(c)).map(|v| format_rational(&v)),
                    }),
                    0,
                ),
                Certificate::Infeasible { farkas, min_slack } => (
                    json!({
                        "status": "infeasible",
                        "farkas": strings(farkas),
                        "min_slack": format_rational(min_slack),
                    }),
                    EXIT_INFEASIBLE,
                ),
                Certificate::Unbounded { point, ray } => (
                    json!({ "status": "unbounded", "x": strings(point), "ray": strings(ray) }),
                    0,
                ),
            };
            let mut record = record;
            record["verified"] = Value::Bool(verified);
            emit(output.as_deref(), &format!("{record:#}\n"))?;
            Ok(code)
        }
    }
}

fn parse_solution(text: &str) -> linsep::Result<Vec<Rational>> {
    let bad = || Error::InvalidConfig("solution is neither p/q values nor solve output".into());
    if text.trim_start().starts_with('{') {
        let value: Value = serde_json::from_str(text).map_err(|_| bad())?;
        let xs = value["x"].as_array().ok_or_else(bad)?;
        return xs
            .iter()
            .map(|v| v.as_str().and_then(parse_rational).ok_or_else(bad))
            .collect();
    }
    parse_rational_vector(text).ok_or_else(bad)
}

fn parse_integer_vector(text: &str) -> linsep::Result<Vec<Integer>> {
    text.split_whitespace()
        .map(|t| {
            Integer::from_str_radix(t, 10).map_err(|_| Error::NonIntegerEntry {
                line: 1,
                token: t.to_string(),
            })
        })
        .collect()
}
