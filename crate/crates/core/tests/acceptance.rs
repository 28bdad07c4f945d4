//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mmlink::capacity::{blahut_arimoto, capacity_grid_oracle, DEFAULT_MAX_ITER, DEFAULT_TOL_BITS};
use mmlink::channel::build_channel;
use mmlink::cli::{fig2_rows, table2_rows, ExperimentConfig};
use mmlink::kinetics::{
    pss_deviation, pss_validity, simulate_full, InitialState, KineticParams, PSS_VALID_THRESHOLD,
};
use mmlink::numerics::ToleranceConfig;
use mmlink::perturbation::{max_product, slot_time, PerturbationBudget};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn mm(km: f64) -> KineticParams {
    KineticParams::from_michaelis(km, 1.0, None).unwrap()
}

/// `(km, s0, delta)` with `delta` in `{0.05 s0, 0.10 s0, ..., 0.5 s0}`.
fn identity_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::new();
    for km in [0.01, 0.1, 1.0] {
        for s0 in [10.0, 30.0] {
            for k in 1..=10 {
                grid.push((km, s0, 0.05 * k as f64 * s0));
            }
        }
    }
    grid
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let rows = table2_rows(&ExperimentConfig::table2_defaults()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = [0.10, 0.20, 0.30, 0.40, 0.50];
    check(rows.len() == expected.len(), || format!("{} rows", rows.len()))?;
    let mut worst = 0.0_f64;
    for (row, want) in rows.iter().zip(expected) {
        let err = (row.p_max_quadrature - want).abs();
        worst = worst.max(err);
        check(err <= 0.005, || format!("delta {}: {} vs {want}", row.delta, row.p_max_quadrature))?;
    }
    within_budget(elapsed, Duration::from_secs(1))?;
    Ok(format!("max |error| {worst:.2e}, {elapsed:?}"))
}

fn product_identity() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for (km, s0, delta) in identity_grid() {
        let p = max_product(&mm(km), s0, &PerturbationBudget::new(delta).unwrap()).map_err(|e| e.to_string())?;
        let err = (p - delta).abs();
        worst = worst.max(err);
        check(err <= 1e-6, || format!("km {km}, s0 {s0}, delta {delta}: {p}"))?;
    }
    let elapsed = start.elapsed();
    within_budget(elapsed, Duration::from_secs(1))?;
    Ok(format!("max |p_max - delta| {worst:.2e}, {elapsed:?}"))
}

fn slot_time_oracle() -> Outcome {
    let mut worst = 0.0_f64;
    for (km, s0, delta) in identity_grid() {
        let t = slot_time(&mm(km), s0, &PerturbationBudget::new(delta).unwrap()).map_err(|e| e.to_string())?;
        let closed = delta + km * (s0 / (s0 - delta)).ln();
        let rel = (t - closed).abs() / closed;
        worst = worst.max(rel);
        check(rel <= 1e-8, || format!("km {km}, s0 {s0}, delta {delta}: {t} vs {closed}"))?;
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn capacity_oracles() -> Outcome {
    let start = Instant::now();
    let ba = |q: f64, n: usize| {
        let ch = build_channel(q, n).map_err(|e| e.to_string())?;
        let c = blahut_arimoto(&ch, DEFAULT_TOL_BITS, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?;
        Ok::<_, String>((ch, c.capacity_bits))
    };
    for n in [1, 3, 10, 50] {
        let (_, c) = ba(1.0, n)?;
        let want = ((n + 1) as f64).log2();
        check((c - want).abs() <= 1e-6, || format!("noiseless n_max {n}: {c} vs {want}"))?;
    }
    let (_, z) = ba(0.5, 1)?;
    check((z - 0.321928).abs() <= 1e-6, || format!("Z-channel: {z}"))?;
    let mut worst = 0.0_f64;
    for n in [1, 2] {
        for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let (ch, c) = ba(q, n)?;
            let oracle = capacity_grid_oracle(&ch, 2000).map_err(|e| e.to_string())?;
            worst = worst.max((c - oracle).abs());
            check((c - oracle).abs() <= 1e-4, || format!("n_max {n}, q {q}: BA {c} vs grid {oracle}"))?;
        }
    }
    let elapsed = start.elapsed();
    within_budget(elapsed, Duration::from_secs(10))?;
    Ok(format!("max |BA - grid| {worst:.2e}, {elapsed:?}"))
}

fn sweep_trends() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::fig2_defaults();
    let rows = fig2_rows(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let c = |delta: f64, q: f64| {
        rows.iter()
            .find(|r| (r.delta - delta).abs() < 1e-12 && r.q == q)
            .map(|r| r.capacity_bits)
            .expect("grid point present")
    };
    const SLACK: f64 = 1e-9;
    for &q in &cfg.q_list {
        for pair in cfg.delta_list.windows(2) {
            let (a, b) = (c(pair[0], q), c(pair[1], q));
            check(b >= a - SLACK, || format!("q {q}: C({}) = {b} < C({}) = {a}", pair[1], pair[0]))?;
        }
        let early = c(0.2, q) - c(0.1, q);
        let late = c(0.5, q) - c(0.4, q);
        check(early > late, || format!("q {q}: gain 0.1->0.2 {early} <= gain 0.4->0.5 {late}"))?;
    }
    for &delta in &cfg.delta_list {
        for pair in cfg.q_list.windows(2) {
            let (a, b) = (c(delta, pair[0]), c(delta, pair[1]));
            check(b >= a - SLACK, || format!("delta {delta}: C(q={}) = {b} < C(q={}) = {a}", pair[1], pair[0]))?;
        }
    }
    within_budget(elapsed, Duration::from_secs(60))?;
    Ok(format!("{} points, {elapsed:?}", rows.len()))
}

fn full_model_agreement() -> Outcome {
    // Km = (k_-1 + k2) / k1 = 0.1, Vmax = k2 E_T = 1
    let (k1, k_minus1, k2, e_total) = (110.0, 1.0, 10.0, 0.1);
    let params = KineticParams::from_rates(k1, k_minus1, k2, e_total).map_err(|e| e.to_string())?;
    check((params.km() - 0.1).abs() < 1e-14 && (params.vmax() - 1.0).abs() < 1e-14, || {
        format!("km {}, vmax {}", params.km(), params.vmax())
    })?;
    let tol = ToleranceConfig::new(1e-8, 1e-12, 1 << 22).map_err(|e| e.to_string())?;
    let (mut worst_dev, mut worst_cons) = (0.0_f64, 0.0_f64);
    for s0 in [10.0, 30.0] {
        let init = InitialState::new(s0, e_total, 0.0).map_err(|e| e.to_string())?;
        let validity = pss_validity(&params, &init);
        check(validity.enzyme_ratio <= PSS_VALID_THRESHOLD, || format!("ratio {}", validity.enzyme_ratio))?;
        for delta in [0.1, 0.3, 0.5] {
            let t_star = slot_time(&params, s0, &PerturbationBudget::new(delta).unwrap()).map_err(|e| e.to_string())?;
            let traj = simulate_full(&params, &init, t_star, &tol).map_err(|e| e.to_string())?;
            let dev = pss_deviation(&traj, &params, s0, t_star).map_err(|e| e.to_string())?;
            let cons = traj.enzyme_conservation_error().max(traj.substrate_conservation_error());
            worst_dev = worst_dev.max(dev);
            worst_cons = worst_cons.max(cons);
            check(dev <= 0.01, || format!("s0 {s0}, delta {delta}: deviation {dev}"))?;
            check(cons <= 1e-6, || format!("s0 {s0}, delta {delta}: conservation {cons}"))?;
        }
    }
    Ok(format!("max deviation {worst_dev:.2e} of s0, max conservation error {worst_cons:.2e}"))
}

fn certification() -> Outcome {
    let cfg = ExperimentConfig::fig2_defaults();
    let mut points: Vec<(f64, usize)> = Vec::new();
    for &q in cfg.q_list.iter().chain(&[0.0, 0.3, 0.7]) {
        for n in 0..=50 {
            points.push((q, n));
        }
    }
    let (mut worst_gap, mut worst_mass) = (0.0_f64, 0.0_f64);
    for (q, n) in points {
        let ch = build_channel(q, n).map_err(|e| e.to_string())?;
        let c = blahut_arimoto(&ch, DEFAULT_TOL_BITS, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?;
        let mass = (c.optimal_input.as_slice().iter().sum::<f64>() - 1.0).abs();
        worst_gap = worst_gap.max(c.gap_bits);
        worst_mass = worst_mass.max(mass);
        check(c.gap_bits <= 1e-9, || format!("q {q}, n_max {n}: gap {}", c.gap_bits))?;
        check(mass <= 1e-12, || format!("q {q}, n_max {n}: input mass off by {mass}"))?;
    }
    let rows = fig2_rows(&cfg).map_err(|e| e.to_string())?;
    check(rows.iter().all(|r| r.ba_gap_bits <= 1e-9), || "sweep row with gap above 1e-9".to_string())?;
    Ok(format!("max gap {worst_gap:.2e} bits, max |sum p - 1| {worst_mass:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 peak product table reproduction", table_reproduction),
        ("2 peak product equals budget", product_identity),
        ("3 slot time closed form", slot_time_oracle),
        ("4 capacity oracles", capacity_oracles),
        ("5 capacity sweep trends", sweep_trends),
        ("6 PSS vs full mass-action model", full_model_agreement),
        ("7 capacity certification", certification),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
