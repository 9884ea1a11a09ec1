//! Perceptron vs Newton step counts on the banded margin-sweep family.

use linsep::bench::{margin_sweep, median_steps, write_csv, Algo, SweepConfig};

fn main() -> linsep::Result<()> {
    let config = SweepConfig::default();
    let rows = margin_sweep(&config)?;
    write_csv(&rows, std::io::stdout())?;
    eprintln!("{:>8} {:>12} {:>8}", "gamma", "perceptron", "newton");
    for g in &config.gammas {
        let p = median_steps(&rows, g, Algo::Perceptron).unwrap_or(f64::NAN);
        let n = median_steps(&rows, g, Algo::Newton).unwrap_or(f64::NAN);
        eprintln!("{:>8} {:>12} {:>8}", g.to_string(), p, n);
    }
    Ok(())
}
