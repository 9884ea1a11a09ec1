//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::time::Instant;

use linsep::arith::{isqrt_factor2, GridVector, IntMatrix, Mode};
use linsep::bench::{margin_sweep, median_steps, powers_of_half, Algo, SweepConfig};
use linsep::instance::{verify_solution_exact, Instance, Lp, Relation};
use linsep::newton::{solve_feasibility_observed, DualIterate, QPolicy, SolveReport, SolveStatus, SolverConfig};
use linsep::perceptron::{cap_from_witness, perceptron_solve_observed};
use linsep::potential::{scalar_lemmas, NormalizedInstance};
use linsep::reductions::{chain_config, lift_solution, normalize_rows, solve_lp, solve_strict_homogeneous, Certificate};
use linsep::{generate_feasible_instance, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

use common::{delta, lp_oracle, Verdict};

// Pinned tolerances.
const DECREMENT_SLACK: f64 = 1e-9;
const START_BOUND_SLACK: f64 = 1e-9;
const GRAD_REL_TOL: f64 = 1e-6;
const HESS_REL_TOL: f64 = 1e-5;
const SELF_CONCORDANCE_SLACK: f64 = 1e-12;
const LEMMA_SLACK: f64 = 1e-12;
const NEWTON_RATIO_MAX: f64 = 1.6;
const PERCEPTRON_FACTOR_MIN: f64 = 4.0;
const EXACTNESS_SECONDS: f64 = 300.0;

const INSTANCES: usize = 200;
const LPS: usize = 100;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        println!("criterion {id:>2} {:<4} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

struct Case {
    inst: Instance,
    omega: Vec<Rational>,
    omega_sq: Rational,
}

fn criterion_one_cases() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut cases = Vec::with_capacity(INSTANCES);
    let mut seed = 0u64;
    while cases.len() < INSTANCES {
        let m = rng.gen_range(1..=40);
        let n = rng.gen_range(1..=20);
        let bits = rng.gen_range(1..=8);
        let gamma = if cases.len() % 2 == 0 {
            Rational::from((1, 4))
        } else {
            Rational::from((1, 16))
        };
        seed += 1;
        match generate_feasible_instance(m, n, bits, &gamma, seed) {
            Ok(inst) => {
                let omega = inst.meta.planted.clone().expect("planted");
                let omega_sq = inst.planted_norm_sq().expect("planted");
                cases.push(Case { inst, omega, omega_sq });
            }
            Err(Error::RejectionBudgetExceeded { .. }) => continue,
            Err(e) => panic!("generator: {e}"),
        }
    }
    cases
}

fn s_max(m_hat: usize, omega_sq: &Rational) -> u64 {
    let m = m_hat as f64;
    let ln_omega = omega_sq.to_f64().ln();
    (4.0 * (m * m.ln() + 1.0 + m * ln_omega) / delta()).ceil() as u64 + 16
}

/// Bit length bound for rounded numerators: `log₂Q + log₂(2√(M̂Ω)) + 1`.
fn numerator_bits_ok(g: &GridVector, q: &Integer, m_hat: usize, omega: &Rational) -> bool {
    if g.denominator != *q {
        return false;
    }
    let bound = (q.significant_bits() - 1) as f64 + (2.0 * (m_hat as f64 * omega.to_f64()).sqrt()).log2() + 1.0;
    g.numerators.iter().all(|n| (n.significant_bits() as f64) <= bound)
}

struct Runs {
    exact: Vec<SolveReport>,
    float: Vec<SolveReport>,
    all_verified: bool,
    seconds: f64,
    rounding_checks: u64,
    rounding_ok: bool,
}

fn run_criterion_one(cases: &[Case]) -> Runs {
    let started = Instant::now();
    let mut runs = Runs {
        exact: Vec::new(),
        float: Vec::new(),
        all_verified: true,
        seconds: 0.0,
        rounding_checks: 0,
        rounding_ok: true,
    };
    for case in cases {
        for mode in [Mode::Exact, Mode::Float] {
            let config = SolverConfig::new(mode, case.omega_sq.clone())
                .with_q_policy(QPolicy::FromOmega)
                .with_trace(true);
            let report = match mode {
                Mode::Float => solve_strict_homogeneous(case.inst.matrix(), &config),
                Mode::Exact => {
                    // Same pipeline as solve_strict_homogeneous, observing
                    // every rounded iterate.
                    let norm = normalize_rows(case.inst.matrix()).expect("normalizable");
                    let m_hat = norm.m();
                    let result = solve_feasibility_observed(&norm, &config, |state, q| {
                        if let DualIterate::Exact(g) = &state.v {
                            runs.rounding_checks += 1;
                            runs.rounding_ok &= numerator_bits_ok(g, q, m_hat, &case.omega_sq);
                        }
                    });
                    result.and_then(|r| {
                        if r.status != SolveStatus::Solved {
                            return Err(Error::StepBudgetExceeded { steps: r.steps_total });
                        }
                        lift_solution(&norm, r.normalized_x.as_ref().expect("solved"))?;
                        Ok(r)
                    })
                }
            };
            match report {
                Ok(r) => {
                    let x = r.x.as_ref().expect("solved");
                    let v = verify_solution_exact(&case.inst, x, Relation::Strict, None).expect("dims");
                    runs.all_verified &= v.ok;
                    match mode {
                        Mode::Exact => runs.exact.push(r),
                        Mode::Float => runs.float.push(r),
                    }
                }
                Err(e) => {
                    println!("  {mode:?} solve failed on {}x{}: {e}", case.inst.m(), case.inst.n());
                    runs.all_verified = false;
                }
            }
        }
    }
    runs.seconds = started.elapsed().as_secs_f64();
    runs
}

fn check_decrements(runs: &Runs) -> (bool, String) {
    let d = delta();
    let (mut float_checked, mut exact_checked, mut worst_float, mut worst_exact) = (0u64, 0u64, f64::INFINITY, f64::INFINITY);
    let mut ok = true;
    for r in runs.float.iter().chain(&runs.exact) {
        for rec in &r.trace {
            let dec = rec.f_before - rec.f_observed;
            match rec.mode {
                Mode::Float if rec.lambda_hat >= 0.5 => {
                    float_checked += 1;
                    worst_float = worst_float.min(dec);
                    ok &= dec >= d / 2.0 - DECREMENT_SLACK;
                }
                Mode::Exact if rec.phase == linsep::newton::Phase::One => {
                    exact_checked += 1;
                    worst_exact = worst_exact.min(dec);
                    ok &= dec >= d / 4.0 - DECREMENT_SLACK;
                }
                _ => {}
            }
        }
    }
    (
        ok && float_checked + exact_checked > 0,
        format!(
            "{float_checked} float steps (min decrease {worst_float:.5} vs {:.5}), {exact_checked} exact phase-1 steps (min {worst_exact:.5} vs {:.5})",
            d / 2.0,
            d / 4.0
        ),
    )
}

fn random_instance(rng: &mut ChaCha8Rng) -> NormalizedInstance {
    let m = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=4);
    let rows: Vec<Vec<Integer>> = (0..m)
        .map(|_| loop {
            let r: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
            if r.iter().any(|&x| x != 0) {
                break r.into_iter().map(Integer::from).collect();
            }
        })
        .collect();
    normalize_rows(&IntMatrix::from_rows(rows, n).unwrap()).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(0.2..2.0) / m as f64).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_derivatives() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let (mut worst_g, mut worst_h) = (0f64, 0f64);
    for _ in 0..50 {
        let inst = random_instance(&mut rng);
        let v = random_point(&mut rng, inst.m());
        let g = inst.grad_f64(&v).unwrap();
        let h = inst.hess_f64(&v).unwrap();
        let mut g_fd = vec![0.0; v.len()];
        let mut h_err = 0f64;
        let mut h_norm = 0f64;
        for j in 0..v.len() {
            let step = 1e-6 * v[j];
            let mut plus = v.clone();
            let mut minus = v.clone();
            plus[j] += step;
            minus[j] -= step;
            g_fd[j] = (inst.eval_f(&plus).unwrap() - inst.eval_f(&minus).unwrap()) / (2.0 * step);
            let gp = inst.grad_f64(&plus).unwrap();
            let gm = inst.grad_f64(&minus).unwrap();
            for i in 0..v.len() {
                let fd = (gp[i] - gm[i]) / (2.0 * step);
                h_err += (fd - h[(i, j)]).powi(2);
                h_norm += h[(i, j)].powi(2);
            }
        }
        let diff: Vec<f64> = g.iter().zip(&g_fd).map(|(a, b)| a - b).collect();
        worst_g = worst_g.max(norm(&diff) / norm(&g));
        worst_h = worst_h.max(h_err.sqrt() / h_norm.sqrt());
    }
    let mut worst_sc = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let inst = random_instance(&mut rng);
        let v = random_point(&mut rng, inst.m());
        let w: Vec<f64> = (0..inst.m()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, d2, d3) = inst.ray_derivatives(&v, &w, 0.0).unwrap();
        worst_sc = worst_sc.max(d3.abs() - 2.0 * d2.powf(1.5));
    }
    (
        worst_g <= GRAD_REL_TOL && worst_h <= HESS_REL_TOL && worst_sc <= SELF_CONCORDANCE_SLACK,
        format!("grad rel err {worst_g:.2e}, hess rel err {worst_h:.2e}, max |φ'''| − 2φ''^1.5 = {worst_sc:.2e} over 1000 rays"),
    )
}

fn check_scalar_lemmas() -> (bool, String) {
    let mut ok = true;
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut points = 0;
    for ai in 0..=100 {
        let alpha = ai as f64 * 0.1;
        for ti in 0..=500 {
            let t = ti as f64 * 0.01;
            let (phi, psi) = scalar_lemmas(alpha, t);
            // Independent evaluation.
            let phi_ref = 0.5 * alpha * t * t - (1.0 + t).ln();
            let psi_ref = 0.5 * (alpha + 1.0) * t * t - t;
            ok &= (phi - phi_ref).abs() <= 1e-12 && (psi - psi_ref).abs() <= 1e-12;
            ok &= phi <= psi + LEMMA_SLACK;
            worst = worst.max(phi - psi);
            points += 1;
        }
        let t = 1.0 / (alpha + 1.0);
        let (phi, _) = scalar_lemmas(alpha, t);
        ok &= phi <= -1.0 / (2.0 * alpha + 2.0) + LEMMA_SLACK;
    }
    (ok, format!("{points} grid points, max φ − ψ = {worst:.2e}; φ(1/(α+1)) ≤ −1/(2α+2) on 101 α values"))
}

fn check_perceptron(cases: &[Case]) -> (bool, String) {
    let mut ok = true;
    let (mut runs, mut total_steps, mut ladder_steps) = (0, 0u64, 0u64);
    for case in cases.iter().filter(|c| c.inst.n() <= 8) {
        let norm = normalize_rows(case.inst.matrix()).unwrap();
        let lifted: Vec<Rational> = case.omega.iter().cloned().chain([Rational::new(), Rational::new()]).collect();
        let cap = cap_from_witness(&case.omega);
        // With x = X/L and ω = W/d the ladder reads XᵀX ≤ t·L² and
        // WᵀX ≥ t·d·L, checked in integers.
        let l = norm.norm_lcm().clone();
        let d = lifted.iter().fold(Integer::from(1), |acc, w| acc.lcm(w.denom()));
        let w: Vec<Integer> = lifted.iter().map(|x| Rational::from(x * &d).numer().clone()).collect();
        let l_sq = Integer::from(l.square_ref());
        let dl = Integer::from(&d * &l);
        let mut ladder = true;
        let report = perceptron_solve_observed(&norm, cap, |s| {
            let x = s.scaled_x();
            let t = s.steps();
            let xx: Integer = x.iter().map(|v| Integer::from(v.square_ref())).sum();
            let wx: Integer = x.iter().zip(&w).map(|(a, b)| Integer::from(a * b)).sum();
            ladder &= xx <= Integer::from(&l_sq * t) && wx >= Integer::from(&dl * t);
            if t % 4096 == 0 {
                // Spot check against the rational accessors.
                let tq = Rational::from(t);
                ladder &= (s.norm_sq(&norm) <= tq) == (xx <= Integer::from(&l_sq * t));
                ladder &= (s.dot(&norm, &lifted) >= tq) == (wx >= Integer::from(&dl * t));
            }
            ladder_steps += 1;
        });
        runs += 1;
        match report {
            Ok(r) => {
                total_steps += r.steps;
                ok &= ladder && r.steps <= cap;
                // x = Σ counts·𝒜_m/ρ_m, rebuilt independently.
                let mut x = vec![Rational::new(); norm.n()];
                for (m, &c) in r.counts.iter().enumerate() {
                    for (j, a) in norm.rows().row(m).iter().enumerate() {
                        x[j] += Rational::from((Integer::from(a * c), norm.norms()[m].clone()));
                    }
                }
                ok &= x == r.x;
                ok &= norm.verify_lifted(&norm.lift(&r.x)).unwrap().ok;
            }
            Err(e) => {
                println!("  perceptron failed on {}x{}: {e}", case.inst.m(), case.inst.n());
                ok = false;
            }
        }
    }
    (ok, format!("{runs} instances with N ≤ 8, {total_steps} steps total, ladder checked on {ladder_steps} steps"))
}

fn check_scaling() -> (bool, String) {
    let config = SweepConfig {
        gammas: powers_of_half(2, 7),
        m: 12,
        n: 6,
        seeds: (0..5).collect(),
        algos: vec![Algo::Perceptron, Algo::Newton],
        mode: Mode::Exact,
        ..SweepConfig::default()
    };
    let rows = match margin_sweep(&config) {
        Ok(r) => r,
        Err(e) => return (false, format!("sweep failed: {e}")),
    };
    let p: Vec<f64> = config.gammas.iter().map(|g| median_steps(&rows, g, Algo::Perceptron).unwrap()).collect();
    let n: Vec<f64> = config.gammas.iter().map(|g| median_steps(&rows, g, Algo::Newton).unwrap()).collect();
    let monotone = p.windows(2).all(|w| w[1] >= w[0]);
    let last = p.len() - 1;
    let factor = p[last] / n[last];
    let mut ratios = Vec::new();
    let mut ratio_ok = n[last] > 0.0;
    for w in n.windows(2) {
        if w[0] > 0.0 {
            let r = w[1] / w[0];
            ratio_ok &= r <= NEWTON_RATIO_MAX;
            ratios.push(format!("{r:.2}"));
        } else {
            ratios.push("n/a (median 0)".into());
        }
    }
    (
        monotone && factor >= PERCEPTRON_FACTOR_MIN && ratio_ok,
        format!(
            "perceptron medians {p:?} (monotone {monotone}), newton medians {n:?}, factor at 2^-7 {factor:.0}, newton ratios [{}]",
            ratios.join(", ")
        ),
    )
}

fn check_rounding_and_isqrt(runs: &Runs) -> (bool, String) {
    let mut ok = runs.rounding_ok && runs.rounding_checks > 0;
    for rho in 1..=10_000u32 {
        let w = isqrt_factor2(&Rational::from(rho)).unwrap();
        // A power of two with w² ≤ ρ < 4w², found by plain search.
        let mut k = 1u32;
        while 4 * u64::from(k) * u64::from(k) <= u64::from(rho) {
            k *= 2;
        }
        ok &= w == k;
    }
    (ok, format!("{} rounded iterates checked; isqrt_factor2 exhaustive on [1, 10^4]", runs.rounding_checks))
}

fn random_lp(rng: &mut ChaCha8Rng) -> (Vec<Vec<i64>>, Vec<i64>, Vec<i64>) {
    let m = rng.gen_range(1..=6);
    let n = rng.gen_range(1..=3);
    let a: Vec<Vec<i64>> = (0..m)
        .map(|_| loop {
            let r: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=4)).collect();
            if r.iter().any(|&x| x != 0) {
                break r;
            }
        })
        .collect();
    let b = (0..m).map(|_| rng.gen_range(-4..=4)).collect();
    let c = (0..n).map(|_| rng.gen_range(-4..=4)).collect();
    (a, b, c)
}

fn verdict(cert: &Certificate, c: &[Integer]) -> Verdict {
    match cert {
        Certificate::Solution { .. } => Verdict::Optimal(cert.objective(c).unwrap()),
        Certificate::Infeasible { .. } => Verdict::Infeasible,
        Certificate::Unbounded { .. } => Verdict::Unbounded,
    }
}

fn check_lps() -> (bool, String) {
    let config = chain_config(Mode::Exact);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_000a);
    let mut ok = true;
    let mut counts = [0usize; 3];
    for _ in 0..LPS {
        let (a, b, c) = random_lp(&mut rng);
        let rows: Vec<&[i64]> = a.iter().map(Vec::as_slice).collect();
        let lp = Lp::from_i64(&rows, &b, Some(&c)).unwrap();
        let expected = lp_oracle(&a, &b, &c);
        counts[match expected {
            Verdict::Optimal(_) => 0,
            Verdict::Infeasible => 1,
            Verdict::Unbounded => 2,
        }] += 1;
        match solve_lp(&lp, &config) {
            Ok(cert) => {
                let got = verdict(&cert, lp.c.as_ref().unwrap());
                if got != expected || !cert.verify(&lp) {
                    println!("  LP mismatch: A={a:?} b={b:?} c={c:?}: got {got:?}, oracle {expected:?}");
                    ok = false;
                }
            }
            Err(e) => {
                println!("  LP error: A={a:?} b={b:?} c={c:?}: {e}");
                ok = false;
            }
        }
    }
    let hand: [(&[&[i64]], &[i64], &[i64], Verdict); 3] = [
        (&[&[1]], &[3], &[1], Verdict::Optimal(Rational::from(3))),
        (&[&[1]], &[0], &[-1], Verdict::Unbounded),
        (&[&[1, 0], &[0, 1]], &[1, 2], &[1, 1], Verdict::Optimal(Rational::from(3))),
    ];
    for (a, b, c, want) in hand {
        let lp = Lp::from_i64(a, b, Some(c)).unwrap();
        let cert = solve_lp(&lp, &config).unwrap();
        ok &= verdict(&cert, lp.c.as_ref().unwrap()) == want && cert.verify(&lp);
        if let (Certificate::Solution { x, dual }, 1) = (&cert, a.len()) {
            ok &= x == &[Rational::from(3)] && dual.as_deref() == Some(&[Rational::from(1)][..]);
        }
        if let (Certificate::Solution { x, .. }, 2) = (&cert, a.len()) {
            ok &= x == &[Rational::from(1), Rational::from(2)];
        }
    }
    (
        ok,
        format!("{LPS} random LPs ({} optimal, {} infeasible, {} unbounded) match the oracle; 3 hand LPs exact", counts[0], counts[1], counts[2]),
    )
}

fn check_normalization(cases: &[Case]) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_000b);
    let mut ok = true;
    for _ in 0..100 {
        let n = rng.gen_range(1..=20);
        let row: Vec<i64> = loop {
            let r: Vec<i64> = (0..n).map(|_| rng.gen_range(-256..=256)).collect();
            if r.iter().any(|&x| x != 0) {
                break r;
            }
        };
        let s: i64 = row.iter().map(|x| x * x).sum();
        let norm = normalize_rows(&IntMatrix::from_i64(&[&row])).unwrap();
        ok &= norm.m() == 4 && norm.n() == n + 2;
        for (m, emitted) in norm.rows().row_iter().enumerate() {
            let sq: Integer = emitted.iter().map(|x| Integer::from(x * x)).sum();
            ok &= sq == Integer::from(2 * s + 1).square();
            ok &= norm.norms()[m] == 2 * s + 1;
            ok &= emitted[..n].iter().zip(&row).all(|(a, &b)| *a == 2 * b);
            ok &= emitted[n].clone().abs() == 1 && emitted[n + 1].clone().abs() == 2 * s;
        }
    }
    // Planted witnesses: (ω, 0, 0) has normalized margin ≥ 1 and lifts back.
    for case in cases {
        let norm = normalize_rows(case.inst.matrix()).unwrap();
        let lifted: Vec<Rational> = case.omega.iter().cloned().chain([Rational::new(), Rational::new()]).collect();
        for (m, row) in norm.rows().row_iter().enumerate() {
            let dot = row.iter().zip(&lifted).fold(Rational::new(), |acc, (a, w)| acc + Rational::from(a * w));
            ok &= dot / Rational::from(&norm.norms()[m]) >= 1;
        }
        let back = lift_solution(&norm, &lifted);
        ok &= back.as_ref().is_ok_and(|x| *x == case.omega);
        ok &= verify_solution_exact(&case.inst, &case.omega, Relation::Strict, None).unwrap().ok;
    }
    (ok, format!("100 random rows; {} planted witnesses round-trip", cases.len()))
}

fn main() {
    let mut report = Report { failures: 0 };
    let cases = criterion_one_cases();
    let runs = run_criterion_one(&cases);

    report.line(
        1,
        "exactness",
        runs.all_verified && runs.exact.len() == INSTANCES && runs.float.len() == INSTANCES && runs.seconds < EXACTNESS_SECONDS,
        format!(
            "{}/{} exact and {}/{} float solutions verified in {:.1}s",
            runs.exact.len(),
            INSTANCES,
            runs.float.len(),
            INSTANCES,
            runs.seconds
        ),
    );

    let (ok, detail) = check_decrements(&runs);
    report.line(2, "phase-1 decrement", ok, detail);

    let mut budget_ok = true;
    let mut max_frac: f64 = 0.0;
    for (case, r) in cases.iter().zip(&runs.exact).chain(cases.iter().zip(&runs.float)) {
        let bound = s_max(4 * case.inst.m(), &case.omega_sq);
        budget_ok &= r.steps_total <= bound;
        max_frac = max_frac.max(r.steps_total as f64 / bound as f64);
    }
    report.line(3, "step budget", budget_ok, format!("max steps/S_max = {max_frac:.4}"));

    let mut start_ok = true;
    let mut worst: f64 = f64::NEG_INFINITY;
    for case in &cases {
        let norm = normalize_rows(case.inst.matrix()).unwrap();
        let m = norm.m() as f64;
        let f0 = norm.eval_f(&vec![1.0 / m; norm.m()]).unwrap();
        let bound = m * m.ln() + 1.0;
        start_ok &= f0 <= bound + START_BOUND_SLACK;
        worst = worst.max(f0 - bound);
    }
    report.line(4, "start-point bound", start_ok, format!("max F(v0) − (M log M + 1) = {worst:.3}"));

    let (ok, detail) = check_derivatives();
    report.line(5, "derivatives", ok, detail);

    let (ok, detail) = check_scalar_lemmas();
    report.line(6, "scalar lemmas", ok, detail);

    let started = Instant::now();
    let (ok, detail) = check_perceptron(&cases);
    report.line(7, "perceptron bound", ok, format!("{detail} ({:.1}s)", started.elapsed().as_secs_f64()));

    let started = Instant::now();
    let (ok, detail) = check_scaling();
    report.line(8, "scaling trend", ok, format!("{detail} ({:.1}s)", started.elapsed().as_secs_f64()));

    let (ok, detail) = check_rounding_and_isqrt(&runs);
    report.line(9, "exact representation", ok, detail);

    let started = Instant::now();
    let (ok, detail) = check_lps();
    report.line(10, "reductions oracle", ok, format!("{detail} ({:.1}s)", started.elapsed().as_secs_f64()));

    let (ok, detail) = check_normalization(&cases);
    report.line(11, "normalization identities", ok, detail);

    if report.failures > 0 {
        println!("{} criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
