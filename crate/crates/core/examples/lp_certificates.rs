//! LPs through the feasibility reductions: optimal points with duals,
//! Farkas certificates and unbounded rays, all checked exactly.

use linsep::instance::{format_rational_vector, parse_lp};
use linsep::reductions::chain_config;
use linsep::{solve_lp, Certificate, Mode};

const PROBLEMS: [(&str, &str); 4] = [
    ("box corner", "2 2\n1 0\n0 1\nb: 1 1\nc: 1 2\n"),
    ("half line", "1 1\n1\nb: 3\nc: 1\n"),
    ("unbounded", "1 1\n1\nb: 0\nc: -1\n"),
    ("infeasible", "2 1\n1\n-1\nb: 1 1\nc: 1\n"),
];

fn main() -> linsep::Result<()> {
    let config = chain_config(Mode::Exact);
    for (name, text) in PROBLEMS {
        let lp = parse_lp(text)?;
        let cert = solve_lp(&lp, &config)?;
        let summary = match &cert {
            Certificate::Solution { x, dual } => format!(
                "optimal x = [{}], dual = [{}], value {}",
                format_rational_vector(x),
                dual.as_deref().map(format_rational_vector).unwrap_or_default(),
                cert.objective(lp.c.as_deref().expect("has c")).expect("solution")
            ),
            Certificate::Infeasible { farkas, .. } => format!("infeasible, y = [{}]", format_rational_vector(farkas)),
            Certificate::Unbounded { point, ray } => format!(
                "unbounded from [{}] along [{}]",
                format_rational_vector(point),
                format_rational_vector(ray)
            ),
        };
        println!("{name:<11} {summary}  (verified: {})", cert.verify(&lp));
    }
    Ok(())
}
