//! Exact linear feasibility `Ax > 0` over the integers by damped Newton
//! descent on a self-concordant potential, with a perceptron baseline,
//! LP reductions and a seeded instance generator.

pub mod arith;
pub mod bench;
pub mod error;
pub mod generate;
pub mod instance;
pub mod newton;
pub mod perceptron;
pub mod potential;
pub mod reductions;

pub use arith::Mode;
pub use error::{Error, Result};
pub use generate::{generate_feasible_instance, GeneratorSpec};
pub use instance::{parse_instance, verify_solution_exact, write_instance, Instance, Lp, Relation, Verification};
pub use newton::{solve_feasibility, QPolicy, SolveReport, SolveStatus, SolverConfig};
pub use perceptron::perceptron_solve;
pub use potential::NormalizedInstance;
pub use reductions::{normalize_rows, solve_lp, solve_strict, solve_strict_homogeneous, solve_weak, Certificate};
