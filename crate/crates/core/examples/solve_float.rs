//! Float-mode Newton descent with a per-step trace. The float answer is
//! rationalized and re-checked exactly; on failure the solver falls back to
//! exact mode.

use linsep::newton::{QPolicy, SolveStatus};
use linsep::{generate_feasible_instance, normalize_rows, solve_feasibility, Mode, SolverConfig};
use rug::Rational;

fn main() -> linsep::Result<()> {
    let inst = generate_feasible_instance(24, 8, 8, &Rational::from((1, 16)), 7)?;
    // A planted witness is not required; the adaptive policy grows its
    // Ω guess as needed.
    let config = SolverConfig::new(Mode::Float, Rational::from(1))
        .with_q_policy(QPolicy::Adaptive { start: None })
        .with_trace(true);
    let report = solve_feasibility(&normalize_rows(inst.matrix())?, &config)?;
    assert_eq!(report.status, SolveStatus::Solved);

    println!("{:>4} {:>6} {:>12} {:>12} {:>10}", "step", "phase", "lambda", "F", "min res");
    for r in &report.trace {
        println!(
            "{:>4} {:>6?} {:>12.6} {:>12.6} {:>10.3e}",
            r.step, r.phase, r.lambda_hat, r.f_before, r.min_residual
        );
    }
    println!(
        "{} steps, mode used {:?}, exact check ok = {}",
        report.steps_total,
        report.mode_used,
        report.exact_check.as_ref().is_some_and(|c| c.ok)
    );
    Ok(())
}
