//! The exact-arithmetic primitives: power-of-two square-root witnesses,
//! grid sizes and upward rounding to a grid.

use linsep::arith::{ceil_to_grid, isqrt_factor2};
use linsep::newton::{choose_q, step_budget};
use rug::{Integer, Rational};

fn main() -> linsep::Result<()> {
    for rho in [Rational::from((1, 5)), Rational::from(1), Rational::from(5), Rational::from(1000)] {
        let w = isqrt_factor2(&rho)?;
        println!("isqrt_factor2({rho}) = {w}   (w² = {} ≤ ρ < 4w²)", Rational::from(w.square_ref()));
    }
    for (m, omega) in [(1, 1), (4, 4), (64, 1 << 20)] {
        let omega = Rational::from(omega);
        println!(
            "M = {m:>3}, Ω ≤ {omega:>8}: Q = {}, step budget {}",
            choose_q(m, &omega),
            step_budget(m, &omega)
        );
    }
    let v = [Rational::from((1, 3)), Rational::from((2, 7))];
    let g = ceil_to_grid(&v, &Integer::from(16))?;
    println!("ceil_16([1/3, 2/7]) = {:?} / {}", g.numerators, g.denominator);
    Ok(())
}
