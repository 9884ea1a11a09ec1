//! Generate a separable instance and solve `Ax > 0` in exact arithmetic.
//!
//! cargo run --release --example solve_exact -- [m] [n] [seed]

use linsep::instance::{format_rational_vector, write_instance};
use linsep::{generate_feasible_instance, solve_strict_homogeneous, verify_solution_exact, Mode, Relation, SolverConfig};
use rug::Rational;

fn arg(i: usize, default: u64) -> u64 {
    std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> linsep::Result<()> {
    let (m, n, seed) = (arg(1, 10) as usize, arg(2, 4) as usize, arg(3, 1));
    let inst = generate_feasible_instance(m, n, 6, &Rational::from((1, 16)), seed)?;
    print!("{}", write_instance(&inst));

    let omega = inst.planted_norm_sq().expect("generator plants a witness");
    let report = solve_strict_homogeneous(inst.matrix(), &SolverConfig::new(Mode::Exact, omega))?;
    let x = report.x.as_ref().expect("solved");
    let check = verify_solution_exact(&inst, x, Relation::Strict, None)?;

    println!("steps      {} ({} in phase 1)", report.steps_total, report.phase1_steps);
    println!("grid Q     2^{}", report.grid.as_ref().map_or(0, |q| q.significant_bits() - 1));
    println!("x          {}", format_rational_vector(x));
    println!("min Ax     {} (ok = {})", check.margin.to_f64(), check.ok);
    Ok(())
}
