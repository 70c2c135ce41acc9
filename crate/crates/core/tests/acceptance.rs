//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails. Runtime budgets are part of each criterion.
//!
//! Run with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use clap::Parser;
use gravicollapse::cli::{render_with_workers, RunConfig};
use gravicollapse::criterion::{
    classify, critical_width, width_by_energy_min, width_by_force_balance,
};
use gravicollapse::deviation::{integrate_deviation, DeviationConfig, DeviationMode};
use gravicollapse::fields::{average, Field, QuadratureConfig};
use gravicollapse::reduction::{
    arccos_model, first_integral_residual, integrate_gravity_dominant, integrate_quantum_dominant,
    mass_sweep, parabolic_model, reduction_times, time_of_flight_elliptic, IntegratorConfig,
    RadialState, WidthMode,
};
use gravicollapse::units::UnitSystem;
use gravicollapse::wavepacket::PacketSpec;
use gravicollapse::Regime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn check(
    id: &'static str,
    title: &'static str,
    budget: Duration,
    body: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = body();
    let elapsed = start.elapsed();
    Outcome {
        id,
        title,
        pass: pass && elapsed <= budget,
        detail,
        elapsed,
        budget,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn planck(m: f64, s: f64) -> PacketSpec {
    PacketSpec::planck(m, s).unwrap()
}

fn c1_proton() -> (bool, String) {
    let m = 1.67e-27;
    let sc = critical_width(m, UnitSystem::SI).unwrap();
    let tau = reduction_times(&PacketSpec::new(m, sc, UnitSystem::SI).unwrap()).tau_mass_formula;
    let ok = (3.4e22..=3.8e22).contains(&sc) && (1e52..=4e52).contains(&tau);
    (
        ok,
        format!("sigma_c = {sc:.4e} m in [3.4e22, 3.8e22], tau_mass = {tau:.4e} s in [1e52, 4e52]"),
    )
}

fn c2_averages() -> (bool, String) {
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let m = 10f64.powf(rng.gen_range(-1.0..1.0));
        let s = 10f64.powf(rng.gen_range(-1.0..1.0));
        let p = planck(m, s);
        let expected = [
            (Field::QuantumPotential, 3.0 / (8.0 * m * s * s)),
            (
                Field::QuantumForce,
                0.5 * (2.0 / PI).sqrt() / (m * s.powi(3)),
            ),
            (Field::GravityForce, -m * m / (PI * s * s)),
        ];
        for (field, want) in expected {
            let got = average(field, &p, &cfg).unwrap().quadrature;
            worst = worst.max(rel(got, want));
        }
    }
    (
        worst < 1e-8,
        format!("max relative error {worst:.2e} over 10 (m, sigma0) pairs (tol 1e-8)"),
    )
}

fn c3_triangulation() -> (bool, String) {
    let cfg = QuadratureConfig::default();
    let want_fb = (PI / 2.0).sqrt();
    let want_em = 1.5 * PI.sqrt();
    let mut worst: f64 = 0.0;
    let mut fb = Vec::new();
    let mut em = Vec::new();
    for m in [0.5, 1.0, 2.0, 4.0] {
        let u = UnitSystem::PLANCK;
        let canon = 1.0 / (m * m * m);
        let c = critical_width(m, u).unwrap();
        let a = width_by_force_balance(m, u).unwrap() / c;
        let b = width_by_energy_min(m, u, &cfg).unwrap() / c;
        worst = worst
            .max(rel(c, canon))
            .max(rel(a, want_fb))
            .max(rel(b, want_em));
        fb.push(a);
        em.push(b);
    }
    let spread = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / lo
    };
    let drift = spread(&fb).max(spread(&em));
    (
        worst < 1e-8 && drift < 1e-8,
        format!("max relative error {worst:.2e}, prefactor spread over m {drift:.2e} (tol 1e-8)"),
    )
}

fn c4_sweep() -> (bool, String) {
    let rows = mass_sweep(
        &[2.0, 4.0, 5.0],
        1.0,
        UnitSystem::PLANCK,
        &IntegratorConfig::default(),
    );
    let times: Vec<f64> = rows
        .iter()
        .map(|r| r.result.as_ref().unwrap().fall_time_numeric)
        .collect();
    let decreasing = times.windows(2).all(|w| w[1] < w[0]);
    let scaled: Vec<f64> = rows
        .iter()
        .zip(&times)
        .map(|(r, t)| t * r.mass.sqrt())
        .collect();
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / lo;
    (
        decreasing && spread < 0.10,
        format!("fall times {times:.4?}, t*sqrt(m) spread {spread:.2e} (tol 0.10)"),
    )
}

/// Cubic Hermite interpolation of a series at `t`, using `u = dr/dt`.
fn hermite(series: &[RadialState], t: f64) -> f64 {
    let i = series
        .partition_point(|s| s.t <= t)
        .clamp(1, series.len() - 1);
    let (a, b) = (&series[i - 1], &series[i]);
    let h = b.t - a.t;
    let x = (t - a.t) / h;
    let h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
    let h10 = x * (1.0 - x) * (1.0 - x);
    let h01 = x * x * (3.0 - 2.0 * x);
    let h11 = x * x * (x - 1.0);
    h00 * a.r + h10 * h * a.u + h01 * b.r + h11 * h * b.u
}

fn c5_quantum_fan() -> (bool, String) {
    let ic = IntegratorConfig {
        t_max: 20.0,
        ..Default::default()
    };
    let runs: Vec<Vec<RadialState>> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&m| {
            integrate_quantum_dominant(&planck(m, 1.0), 1.0, 0.0, &ic)
                .unwrap()
                .series
        })
        .collect();
    let monotone = runs.iter().all(|s| s.windows(2).all(|w| w[1].r > w[0].r));
    let mut ordered = true;
    for k in 1..=400 {
        let t = ic.t_max * k as f64 / 400.0;
        let r: Vec<f64> = runs.iter().map(|s| hermite(s, t)).collect();
        ordered &= r[0] > r[1] && r[1] > r[2];
    }
    (
        monotone && ordered,
        format!(
            "monotone increasing: {monotone}, m=0.5 > m=1 > m=2 on 400 times in (0, 20]: {ordered}"
        ),
    )
}

fn fall(m: f64, eps: f64, max_step: f64) -> Vec<RadialState> {
    let ic = IntegratorConfig {
        event_epsilon: eps,
        max_step,
        ..Default::default()
    };
    integrate_gravity_dominant(&planck(m, 1.0), 1.0, 0.0, WidthMode::FrozenWidth, &ic)
        .unwrap()
        .series
}

fn c6a_parabola() -> (bool, String) {
    let p = planck(1.0, 1.0);
    let gap = fall(1.0, 1e-9, 1e-3)
        .iter()
        .filter(|s| s.t <= 0.1)
        .map(|s| (s.r - parabolic_model(&p, s.t)).abs())
        .fold(0.0, f64::max);
    (
        gap < 0.01,
        format!("max |r - parabola| = {gap:.3e} sigma0 for t <= 0.1 (tol 0.01)"),
    )
}

fn c6b_arccos() -> (bool, String) {
    let p = planck(1.0, 1.0);
    let gap = fall(1.0, 1e-9, 1e-3)
        .iter()
        .filter(|s| s.t <= 0.3)
        .map(|s| (s.r - arccos_model(&p, s.t)).abs())
        .fold(0.0, f64::max);
    (
        gap < 0.05,
        format!("max |r - arccos model| = {gap:.3e} sigma0 for t <= 0.3 (tol 0.05)"),
    )
}

fn c6c_elliptic() -> (bool, String) {
    let p = planck(1.0, 1.0);
    let qc = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for r in [0.25, 0.5, 0.75] {
        let crossing = fall(1.0, r, f64::INFINITY).last().unwrap().t;
        let model = time_of_flight_elliptic(&p, r, &qc).unwrap();
        let e = rel(model, crossing);
        worst = worst.max(e);
        parts.push(format!("r={r}: {model:.4} vs {crossing:.4}"));
    }
    (
        worst < 0.15,
        format!(
            "{}; max relative gap {worst:.3} (tol 0.15)",
            parts.join(", ")
        ),
    )
}

fn c7_first_integral() -> (bool, String) {
    let ic = IntegratorConfig::default();
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0, 4.0] {
        for (r0, u0) in [(1.0, 0.0), (1.5, 0.0), (0.7, -0.2)] {
            let p = planck(m, 1.0);
            let series = integrate_gravity_dominant(&p, r0, u0, WidthMode::FrozenWidth, &ic)
                .unwrap()
                .series;
            let peak = series.iter().map(|s| s.u * s.u).fold(0.0, f64::max);
            for s in &series {
                worst = worst.max(first_integral_residual(&p, r0, u0, s).abs() / peak);
            }
        }
    }
    (
        worst < 1e-7,
        format!("max residual / peak u^2 = {worst:.2e} (tol 1e-7)"),
    )
}

fn c8_sign_laws() -> (bool, String) {
    let ic = IntegratorConfig::default();
    let dc = DeviationConfig::default();
    let (xi0, v0) = (1e-3, 2e-4);

    // quantum-dominant: Omega = hbar^2/(4 m^2 sigma^4) at the center
    let mq: f64 = 0.5;
    let pq = planck(mq, 1.0);
    let rq = classify(&pq, 0.05).unwrap().regime;
    let kq = (1.0 / (4.0 * mq * mq)).sqrt();
    let run = integrate_deviation(&pq, rq.into(), xi0, v0, 3.0, &ic, &dc).unwrap();
    let q_sign = run.states.iter().all(|s| s.xi_ddot > 0.0);
    let q_err = run
        .states
        .iter()
        .map(|s| rel(s.xi, xi0 * (kq * s.t).cosh() + v0 / kq * (kq * s.t).sinh()))
        .fold(0.0, f64::max);

    // gravity-dominant: Omega = -(4 pi G m / 3) (2 pi)^(-3/2) sigma^(-3)
    let pg = planck(2.0, 1.0);
    let rg = classify(&pg, 0.05).unwrap().regime;
    let kg = (4.0 * PI * 2.0 / 3.0 * (2.0 * PI).powf(-1.5)).sqrt();
    let run = integrate_deviation(&pg, rg.into(), xi0, v0, 3.0, &ic, &dc).unwrap();
    let g_sign = run
        .states
        .iter()
        .filter(|s| s.xi > 0.0)
        .all(|s| s.xi_ddot < 0.0);
    let g_err = run
        .states
        .iter()
        .map(|s| (s.xi - (xi0 * (kg * s.t).cos() + v0 / kg * (kg * s.t).sin())).abs() / xi0)
        .fold(0.0, f64::max);

    let pt = planck(1.0, 1.0);
    let run = integrate_deviation(&pt, DeviationMode::Transition, xi0, v0, 3.0, &ic, &dc).unwrap();
    let linear = run
        .states
        .iter()
        .all(|s| s.xi == xi0 + v0 * s.t && s.xi_ddot == 0.0);

    let regimes_ok = rq == Regime::QuantumDominant && rg == Regime::GravityDominant;
    (
        regimes_ok && q_sign && g_sign && linear && q_err < 1e-6 && g_err < 1e-6,
        format!(
            "regimes {rq}/{rg}, xi'' > 0: {q_sign}, xi'' < 0: {g_sign}, linear: {linear}, cosh err {q_err:.2e}, cos err {g_err:.2e} (tol 1e-6)"
        ),
    )
}

fn c9_coherence() -> (bool, String) {
    let mut worst_eq: f64 = 0.0;
    let mut ratios = Vec::new();
    for m in [0.5, 1.0, 2.0] {
        let t = reduction_times(&planck(m, critical_width(m, UnitSystem::PLANCK).unwrap()));
        worst_eq = worst_eq.max(rel(t.tau_width_formula, t.tau_mass_formula));
        ratios.push(t.tau_dp / t.tau_width_formula);
        ratios.push(t.tau_avg / t.tau_width_formula);
    }
    let within = ratios.iter().all(|&r| (0.1..=10.0).contains(&r));
    (
        worst_eq <= 4.0 * f64::EPSILON && within,
        format!("max |tau_width/tau_mass - 1| = {worst_eq:.1e}, tau_dp and tau_avg ratios {ratios:.3?} (within 10x)"),
    )
}

fn c10_determinism() -> (bool, String) {
    let configs = [
        "sweep --masses 0.8,1,1.5,2,3,4,5,6,8 --sigma0 1",
        "sweep --masses 0.8,1,1.5,2,3,4,5,6,8 --sigma0 1 --out-format csv",
        "reduce --mass 2 --sigma0 1",
        "reduce --mass 2 --sigma0 1 --out-format csv --mode spreading",
    ];
    let mut ok = true;
    for args in configs {
        let cfg = RunConfig::try_parse_from(
            std::iter::once("gravicollapse").chain(args.split_whitespace()),
        )
        .unwrap();
        let reference = render_with_workers(&cfg, Some(1)).unwrap();
        for workers in [1, 2, 8] {
            for _ in 0..2 {
                ok &= render_with_workers(&cfg, Some(workers)).unwrap() == reference;
            }
        }
    }
    (
        ok,
        format!(
            "{} configs x workers {{1, 2, 8}} x 2 runs byte-identical: {ok}",
            configs.len()
        ),
    )
}

fn main() {
    let ms = Duration::from_millis;
    let outcomes = [
        check("1", "proton benchmark", ms(1), c1_proton),
        check("2", "closed-form averages", ms(1000), c2_averages),
        check("3", "criterion triangulation", ms(1000), c3_triangulation),
        check("4", "mass sweep scaling", ms(5000), c4_sweep),
        check("5", "quantum-dominant fan-out", ms(5000), c5_quantum_fan),
        check("6a", "early parabola", ms(5000), c6a_parabola),
        check("6b", "arccos model", ms(5000), c6b_arccos),
        check("6c", "elliptic time of flight", ms(5000), c6c_elliptic),
        check("7", "energy first integral", ms(2000), c7_first_integral),
        check("8", "regime sign laws", ms(2000), c8_sign_laws),
        check("9", "reduction-time coherence", ms(1), c9_coherence),
        check(
            "10",
            "determinism across workers",
            ms(10_000),
            c10_determinism,
        ),
    ];

    let mut failed = 0;
    for o in &outcomes {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>3} {verdict} {:<28} {} [{:.1?} of {:?}]",
            o.id, o.title, o.detail, o.elapsed, o.budget
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
