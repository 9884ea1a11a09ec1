//! Margin-sweep benchmark: perceptron vs Newton step counts as the margin
//! shrinks.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rug::Rational;
use serde::Serialize;

use crate::arith::Mode;
use crate::error::{Error, Result};
use crate::generate::{generate, GeneratorSpec};
use crate::instance::{format_rational, Instance};
use crate::newton::{SolveStatus, SolverConfig};
use crate::perceptron::{cap_from_witness, perceptron_solve};
use crate::reductions::{normalize_rows, solve_strict_homogeneous};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Perceptron,
    Newton,
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "perceptron" => Ok(Algo::Perceptron),
            "newton" => Ok(Algo::Newton),
            other => Err(Error::InvalidConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub gammas: Vec<Rational>,
    pub m: usize,
    pub n: usize,
    pub bits: u32,
    pub seeds: Vec<u64>,
    pub algos: Vec<Algo>,
    pub mode: Mode,
    /// Keep row cosines in `[γ, 2γ)` so that smaller margins give harder
    /// instances. Without the band most rows sit far above the margin.
    pub banded: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            gammas: powers_of_half(2, 7),
            m: 12,
            n: 6,
            bits: 5,
            seeds: (0..5).collect(),
            algos: vec![Algo::Perceptron, Algo::Newton],
            mode: Mode::Exact,
            banded: true,
        }
    }
}

/// `2^-lo, …, 2^-hi`.
pub fn powers_of_half(lo: u32, hi: u32) -> Vec<Rational> {
    (lo..=hi).map(|k| Rational::from((1, 1u64 << k))).collect()
}

/// Parses `2^-2..2^-8`, a comma list of `p/q` values, or a single value.
pub fn parse_gammas(text: &str) -> Result<Vec<Rational>> {
    let bad = || Error::InvalidConfig(format!("cannot parse gammas `{text}`"));
    if let Some((lo, hi)) = text.split_once("..") {
        let exp = |s: &str| -> Option<u32> { s.trim().strip_prefix("2^-")?.parse().ok() };
        let (lo, hi) = (exp(lo).ok_or_else(bad)?, exp(hi).ok_or_else(bad)?);
        if lo > hi || hi > 62 {
            return Err(bad());
        }
        return Ok(powers_of_half(lo, hi));
    }
    text.split(',')
        .map(|t| Rational::from_str(t.trim()).map_err(|_| bad()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub gamma: String,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub algo: Algo,
    pub steps: u64,
    pub wall_ms: f64,
}

pub fn sweep_instance(config: &SweepConfig, gamma: &Rational, seed: u64) -> Result<Instance> {
    let mut spec = GeneratorSpec::new(config.m, config.n, config.bits, gamma.clone(), seed);
    if config.banded {
        spec = spec.with_cap(Rational::from(gamma * 2u32).min(Rational::from(1)));
        if spec.margin_cap.as_ref().is_some_and(|c| *c <= *gamma) {
            spec.margin_cap = None;
        }
    }
    generate(&spec)
}

pub fn run_algo(inst: &Instance, algo: Algo, mode: Mode) -> Result<u64> {
    let omega = inst
        .meta
        .planted
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("instance has no planted witness".into()))?;
    match algo {
        Algo::Perceptron => {
            let norm = normalize_rows(inst.matrix())?;
            // The lifted witness (ω, 0, 0) has the same norm.
            Ok(perceptron_solve(&norm, cap_from_witness(omega))?.steps)
        }
        Algo::Newton => {
            let omega_sq = inst.planted_norm_sq().unwrap_or_else(|| Rational::from(1));
            let report = solve_strict_homogeneous(inst.matrix(), &SolverConfig::new(mode, omega_sq))?;
            match report.status {
                SolveStatus::Solved => Ok(report.steps_total),
                _ => Err(Error::StepBudgetExceeded { steps: report.steps_total }),
            }
        }
    }
}

/// Runs every (γ, seed, algorithm) combination.
pub fn margin_sweep(config: &SweepConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for gamma in &config.gammas {
        for &seed in &config.seeds {
            let inst = sweep_instance(config, gamma, seed)?;
            for &algo in &config.algos {
                let started = Instant::now();
                let steps = run_algo(&inst, algo, config.mode)?;
                rows.push(BenchRow {
                    gamma: format_rational(gamma),
                    m: config.m,
                    n: config.n,
                    seed,
                    algo,
                    steps,
                    wall_ms: started.elapsed().as_secs_f64() * 1e3,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(["gamma", "m", "n", "algo", "steps", "wall_ms"])
        .map_err(csv_err)?;
    for r in rows {
        let algo = match r.algo {
            Algo::Perceptron => "perceptron",
            Algo::Newton => "newton",
        };
        writer
            .write_record([
                r.gamma.clone(),
                r.m.to_string(),
                r.n.to_string(),
                algo.to_string(),
                r.steps.to_string(),
                format!("{:.3}", r.wall_ms),
            ])
            .map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Median step count of `algo` at margin `gamma`.
pub fn median_steps(rows: &[BenchRow], gamma: &Rational, algo: Algo) -> Option<f64> {
    let key = format_rational(gamma);
    let mut steps: Vec<u64> = rows
        .iter()
        .filter(|r| r.algo == algo && r.gamma == key)
        .map(|r| r.steps)
        .collect();
    if steps.is_empty() {
        return None;
    }
    steps.sort_unstable();
    let k = steps.len();
    Some(if k % 2 == 1 {
        steps[k / 2] as f64
    } else {
        (steps[k / 2 - 1] + steps[k / 2]) as f64 / 2.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_ranges() {
        let g = parse_gammas("2^-2..2^-4").unwrap();
        assert_eq!(g, vec![Rational::from((1, 4)), Rational::from((1, 8)), Rational::from((1, 16))]);
        assert_eq!(parse_gammas("1/3, 1/5").unwrap().len(), 2);
        assert!(parse_gammas("2^-4..2^-2").is_err());
    }

    #[test]
    fn small_sweep_writes_csv() {
        let config = SweepConfig {
            gammas: powers_of_half(2, 3),
            m: 4,
            n: 3,
            bits: 5,
            seeds: vec![0, 1],
            ..SweepConfig::default()
        };
        let rows = margin_sweep(&config).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("gamma,m,n,algo,steps,wall_ms\n"));
        assert_eq!(text.lines().count(), 9);
        assert!(median_steps(&rows, &config.gammas[0], Algo::Newton).is_some());
    }
}
