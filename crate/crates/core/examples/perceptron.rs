//! Perceptron baseline on the same normalized rows the Newton solver uses,
//! with the Cauchy ladder `xᵀx ≤ t ≤ ωᵀx` checked exactly along the run.

use linsep::perceptron::{cap_from_witness, perceptron_solve_observed};
use linsep::{generate_feasible_instance, normalize_rows, solve_strict_homogeneous, Mode, SolverConfig};
use rug::Rational;

fn main() -> linsep::Result<()> {
    let inst = generate_feasible_instance(12, 4, 4, &Rational::from((1, 8)), 3)?;
    let norm = normalize_rows(inst.matrix())?;
    let omega: Vec<Rational> = inst.meta.planted.clone().expect("planted");
    let lifted: Vec<Rational> = omega.iter().cloned().chain([Rational::new(), Rational::new()]).collect();
    let cap = cap_from_witness(&omega);

    let mut ladder_ok = true;
    let report = perceptron_solve_observed(&norm, cap, |s| {
        let t = Rational::from(s.steps());
        ladder_ok &= s.norm_sq(&norm) <= t && s.dot(&norm, &lifted) >= t;
    })?;
    println!("perceptron: {} steps (cap {cap}), ladder held: {ladder_ok}", report.steps);

    let omega_sq = inst.planted_norm_sq().expect("planted");
    let newton = solve_strict_homogeneous(inst.matrix(), &SolverConfig::new(Mode::Exact, omega_sq))?;
    println!("newton:     {} steps", newton.steps_total);
    Ok(())
}
