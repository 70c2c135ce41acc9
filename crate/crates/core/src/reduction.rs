//! Radial dynamics of the guided particle and the reduction time.
//!
//! In the gravity-dominant regime the particle falls under its own
//! self-gravity force
//! `r̈ = −√(2/π)(Gm/σ³)·r·exp(−r²/2σ²)`
//! until it reaches the packet center; the elapsed time is the reduction
//! time. With the width frozen at `σ₀` the motion has the first integral
//! `u² − 2√(2/π)(Gm/σ₀)(exp(−r²/2σ₀²) − exp(−r₀²/2σ₀²)) = u₀²`.
//! Analytic estimates (`(σ₀³/Gm)^½`, `ħ³/(G²m⁵)`, `ħ/ΔU`, `σ₀/√⟨u²⟩`) are
//! reported alongside the numeric fall time.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{non_negative, positive, Error, Result};
use crate::fields::{gravity_potential, QuadratureConfig};
use crate::numerics::ode::{self, Control, SolverConfig};
use crate::numerics::quadrature::integrate;
use crate::units::UnitSystem;
use crate::wavepacket::{density_at_width, width, PacketSpec};

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// `ħ²t²/(4m²σ₀⁴)` must stay below this at the fall time for the
/// frozen-width approximation to count as valid.
pub const VALIDITY_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    /// Absolute tolerance in units of σ₀ (positions) and σ₀ per natural
    /// timescale (velocities).
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_max: f64,
    /// Fall event threshold, in units of σ₀.
    pub event_epsilon: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            t_max: 1e3,
            event_epsilon: 1e-9,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    /// Defaults with `t_max` set to `factor` infall timescales of `p`.
    pub fn for_packet(p: &PacketSpec, factor: f64) -> Self {
        IntegratorConfig {
            t_max: factor * p.fall_timescale(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("t_max", self.t_max)?;
        positive("event_epsilon", self.event_epsilon)?;
        if self.max_step.is_nan() || self.max_step <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "max_step",
                value: self.max_step,
                reason: "must be positive",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WidthMode {
    /// σ = σ₀ throughout.
    FrozenWidth,
    /// σ = σ(t) of the free packet.
    SpreadingWidth,
}

impl WidthMode {
    pub fn label(&self) -> &'static str {
        match self {
            WidthMode::FrozenWidth => "FrozenWidth",
            WidthMode::SpreadingWidth => "SpreadingWidth",
        }
    }

    fn sigma(&self, p: &PacketSpec, t: f64) -> f64 {
        match self {
            WidthMode::FrozenWidth => p.sigma0,
            WidthMode::SpreadingWidth => width(p, t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialState {
    pub t: f64,
    pub r: f64,
    pub u: f64,
    pub sigma: f64,
}

/// Which `⟨u²⟩` enters the ensemble-averaged reduction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AveragePolicy {
    /// Start far outside the packet (`exp(−r₀²/2σ₀²)` dropped), average
    /// over all space.
    #[default]
    Envelope,
    /// Start at `r₀ = σ₀`, average over `[0, σ₀]` where `u²` is defined.
    FixedR0,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionTimes {
    /// `(σ₀³/Gm)^½`.
    pub tau_width_formula: f64,
    /// `ħ³/(G²m⁵)`.
    pub tau_mass_formula: f64,
    /// `ħ/|U_g(σ₀) − U_g(0)|`.
    pub tau_dp: f64,
    /// `σ₀/√⟨u²⟩`.
    pub tau_avg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub fall_time_numeric: f64,
    pub tau_width_formula: f64,
    pub tau_mass_formula: f64,
    pub tau_dp: f64,
    pub tau_avg: f64,
    pub series: Vec<RadialState>,
    pub mode: WidthMode,
    /// Whether `ħ²t²/(4m²σ₀⁴) < 0.1` held at the fall time.
    pub validity_flag: bool,
}

impl ReductionResult {
    pub fn times(&self) -> ReductionTimes {
        ReductionTimes {
            tau_width_formula: self.tau_width_formula,
            tau_mass_formula: self.tau_mass_formula,
            tau_dp: self.tau_dp,
            tau_avg: self.tau_avg,
        }
    }
}

/// `g_ψ = Gm/σ₀²`.
pub fn g_psi(p: &PacketSpec) -> f64 {
    p.g() * p.mass / (p.sigma0 * p.sigma0)
}

/// `√2(2/π)^{1/4}(Gm/σ₀³)^½`, the angular frequency of the cosine model.
pub fn arccos_frequency(p: &PacketSpec) -> f64 {
    2f64.sqrt() * SQRT_2_OVER_PI.sqrt() / p.fall_timescale()
}

/// `r(t) = σ₀·cos(√2(2/π)^{1/4}(Gm/σ₀³)^½ t)`, meaningful in the first
/// quarter period only.
pub fn arccos_model(p: &PacketSpec, t: f64) -> f64 {
    p.sigma0 * (arccos_frequency(p) * t).cos()
}

/// First zero of [`arccos_model`].
pub fn arccos_zero(p: &PacketSpec) -> f64 {
    0.5 * PI / arccos_frequency(p)
}

/// Leading-order fall `r(t) = σ₀ − ½g_ψt²`.
pub fn parabolic_model(p: &PacketSpec, t: f64) -> f64 {
    p.sigma0 - 0.5 * g_psi(p) * t * t
}

/// `2√(2/π)·Gm/σ₀`, the coefficient of the frozen-width first integral.
fn energy_coefficient(p: &PacketSpec) -> f64 {
    2.0 * SQRT_2_OVER_PI * p.g() * p.mass / p.sigma0
}

fn gauss(p: &PacketSpec, r: f64) -> f64 {
    (-r * r / (2.0 * p.sigma0 * p.sigma0)).exp()
}

/// Infall velocity at `r` of a particle released at rest from `r0`, from
/// the frozen-width first integral. Negative (inward) or zero.
pub fn velocity_field(p: &PacketSpec, r: f64, r0: f64) -> Result<f64> {
    non_negative("r", r)?;
    if r > r0 {
        return Err(Error::Domain {
            what: "velocity_field",
            value: r,
            domain: format!("[0, r0 = {r0}]"),
        });
    }
    let u2 = energy_coefficient(p) * (gauss(p, r) - gauss(p, r0));
    Ok(-u2.max(0.0).sqrt())
}

/// Residual of the frozen-width first integral at `s` for a trajectory
/// started from `(r0, u0)`.
pub fn first_integral_residual(p: &PacketSpec, r0: f64, u0: f64, s: &RadialState) -> f64 {
    s.u * s.u - energy_coefficient(p) * (gauss(p, s.r) - gauss(p, r0)) - u0 * u0
}

/// Fall time from `σ₀` to `r` using the quartic-truncated integrand
/// `1/√(σ₀² − r′² + r′⁴/2σ₀²)`, by adaptive quadrature.
pub fn time_of_flight_elliptic(p: &PacketSpec, r: f64, qc: &QuadratureConfig) -> Result<f64> {
    let s = p.sigma0;
    if !(0.0..=s).contains(&r) {
        return Err(Error::Domain {
            what: "time_of_flight_elliptic",
            value: r,
            domain: format!("[0, σ₀ = {s}]"),
        });
    }
    let integrand = |x: f64| 1.0 / (s * s - x * x + x.powi(4) / (2.0 * s * s)).sqrt();
    let res = integrate(integrand, r, s, qc.rel_tol, qc.abs_tol, qc.max_subdivisions)?;
    Ok(res.value * p.fall_timescale() / (2f64.sqrt() * SQRT_2_OVER_PI.sqrt()))
}

/// Exact frozen-width fall time from rest at `r0` down to `r`: the
/// quadrature of `dr/|u|` with `r′ = r0·cos θ` removing the turning-point
/// singularity.
pub fn time_of_flight_exact(p: &PacketSpec, r: f64, r0: f64, qc: &QuadratureConfig) -> Result<f64> {
    positive("r0", r0)?;
    if !(0.0..=r0).contains(&r) {
        return Err(Error::Domain {
            what: "time_of_flight_exact",
            value: r,
            domain: format!("[0, r0 = {r0}]"),
        });
    }
    let c = energy_coefficient(p);
    let a = r0 * r0 / (2.0 * p.sigma0 * p.sigma0);
    let theta_end = (r / r0).acos();
    // exp(−a cos²θ) − exp(−a) = exp(−a)·expm1(a sin²θ)
    let integrand = |th: f64| {
        let sn = th.sin();
        let du = (-a).exp() * (a * sn * sn).exp_m1();
        r0 * sn / (c * du).sqrt()
    };
    let res = integrate(
        integrand,
        0.0,
        theta_end,
        qc.rel_tol,
        qc.abs_tol * theta_end,
        qc.max_subdivisions,
    )?;
    Ok(res.value)
}

/// Analytic reduction-time estimates.
pub fn reduction_times(p: &PacketSpec) -> ReductionTimes {
    let (h, g, m) = (p.hbar(), p.g(), p.mass);
    let delta_u =
        (gravity_potential(p, p.sigma0, p.sigma0) - gravity_potential(p, 0.0, p.sigma0)).abs();
    // envelope: ⟨u²⟩ = 2√(2/π)(Gm/σ₀)·⟨exp(−r²/2σ₀²)⟩ = (1/√π)·Gm/σ₀
    let mean_u2 = g * m / (PI.sqrt() * p.sigma0);
    ReductionTimes {
        tau_width_formula: p.fall_timescale(),
        tau_mass_formula: h.powi(3) / (g * g * m.powi(5)),
        tau_dp: h / delta_u,
        tau_avg: p.sigma0 / mean_u2.sqrt(),
    }
}

/// `⟨u²⟩` by quadrature under the chosen policy.
pub fn mean_square_speed(
    p: &PacketSpec,
    policy: AveragePolicy,
    qc: &QuadratureConfig,
) -> Result<f64> {
    let s = p.sigma0;
    let c = energy_coefficient(p);
    let (upper, offset) = match policy {
        AveragePolicy::Envelope => (qc.upper_cutoff * s, 0.0),
        AveragePolicy::FixedR0 => (s, gauss(p, s)),
    };
    let f = |r: f64| density_at_width(s, r) * c * (gauss(p, r) - offset) * 4.0 * PI * r * r;
    let scale = c * 1e-2;
    Ok(integrate(
        f,
        0.0,
        upper,
        qc.rel_tol,
        qc.abs_tol * scale,
        qc.max_subdivisions,
    )?
    .value)
}

/// Like [`reduction_times`] with `tau_avg` taken from `policy`.
pub fn reduction_times_with(
    p: &PacketSpec,
    policy: AveragePolicy,
    qc: &QuadratureConfig,
) -> Result<ReductionTimes> {
    let mut t = reduction_times(p);
    if policy == AveragePolicy::FixedR0 {
        t.tau_avg = p.sigma0 / mean_square_speed(p, policy, qc)?.sqrt();
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumTrajectory {
    pub series: Vec<RadialState>,
    /// Set when the step budget ran out before `t_max`.
    pub truncated: bool,
}

/// Integrates `r̈ = ħ²r/(4m²σ(t)⁴)` (quantum force alone, spreading width)
/// from `(r0, u0)` to `ic.t_max`.
pub fn integrate_quantum_dominant(
    p: &PacketSpec,
    r0: f64,
    u0: f64,
    ic: &IntegratorConfig,
) -> Result<QuantumTrajectory> {
    non_negative("r0", r0)?;
    ic.validate()?;
    let k = p.hbar() * p.hbar() / (4.0 * p.mass * p.mass);
    let rhs = |t: f64, y: &[f64; 2]| [y[1], k * y[0] / width(p, t).powi(4)];
    let timescale = 1.0 / p.spreading_rate();
    let cfg = SolverConfig {
        rel_tol: ic.rel_tol,
        abs_tol: [ic.abs_tol * p.sigma0, ic.abs_tol * p.sigma0 / timescale],
        max_step: ic.max_step,
        max_steps: ic.max_steps,
    };

    let mut series = vec![RadialState {
        t: 0.0,
        r: r0,
        u: u0,
        sigma: p.sigma0,
    }];
    let out = ode::solve(rhs, 0.0, [r0, u0], ic.t_max, &cfg, |step| {
        series.push(RadialState {
            t: step.t1,
            r: step.y1[0],
            u: step.y1[1],
            sigma: width(p, step.t1),
        });
        Control::Continue
    });
    match out {
        Ok(_) => Ok(QuantumTrajectory {
            series,
            truncated: false,
        }),
        Err(Error::TooManySteps { .. }) => Ok(QuantumTrajectory {
            series,
            truncated: true,
        }),
        Err(e) => Err(e),
    }
}

/// Integrates the self-gravity infall from `(r0, u0)` until
/// `r ≤ event_epsilon·σ₀` with `u < 0`, locating the crossing by bisection on
/// the dense output.
pub fn integrate_gravity_dominant(
    p: &PacketSpec,
    r0: f64,
    u0: f64,
    mode: WidthMode,
    ic: &IntegratorConfig,
) -> Result<ReductionResult> {
    positive("r0", r0)?;
    ic.validate()?;
    let threshold = ic.event_epsilon * p.sigma0;
    let gm = p.g() * p.mass;
    let rhs = |t: f64, y: &[f64; 2]| {
        let s = mode.sigma(p, t);
        [
            y[1],
            -SQRT_2_OVER_PI * gm / s.powi(3) * y[0] * (-y[0] * y[0] / (2.0 * s * s)).exp(),
        ]
    };
    let timescale = p.fall_timescale();
    let cfg = SolverConfig {
        rel_tol: ic.rel_tol,
        abs_tol: [ic.abs_tol * p.sigma0, ic.abs_tol * p.sigma0 / timescale],
        max_step: ic.max_step,
        max_steps: ic.max_steps,
    };

    let state = |t: f64, y: &[f64; 2]| RadialState {
        t,
        r: y[0],
        u: y[1],
        sigma: mode.sigma(p, t),
    };
    let mut series = vec![state(0.0, &[r0, u0])];
    let fall_time = if r0 <= threshold {
        Some(0.0)
    } else {
        let mut found = None;
        let out = ode::solve(rhs, 0.0, [r0, u0], ic.t_max, &cfg, |step| {
            if step.y1[0] <= threshold && step.y1[1] < 0.0 {
                let tc = step
                    .locate(|y| y[0] - threshold, 1e-12)
                    .expect("r crossed the threshold within this step");
                let mut y = step.interpolate(tc);
                y[0] = threshold;
                series.push(state(tc, &y));
                found = Some(tc);
                return Control::StopAt(tc);
            }
            series.push(state(step.t1, &step.y1));
            Control::Continue
        })?;
        if found.is_none() {
            return Err(Error::NoFall {
                t_max: ic.t_max,
                t: out.t,
                r: out.y[0],
                u: out.y[1],
            });
        }
        found
    };
    let fall_time_numeric = fall_time.expect("set on every path that reaches here");

    let spread = p.spreading_rate() * fall_time_numeric;
    let times = reduction_times(p);
    Ok(ReductionResult {
        fall_time_numeric,
        tau_width_formula: times.tau_width_formula,
        tau_mass_formula: times.tau_mass_formula,
        tau_dp: times.tau_dp,
        tau_avg: times.tau_avg,
        series,
        mode,
        validity_flag: spread * spread < VALIDITY_THRESHOLD,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mass: f64,
    pub result: Result<ReductionResult>,
}

/// Frozen-width fall from rest at `r0 = σ₀` for each mass. Rows are
/// independent and run on the current rayon pool; output keeps input order.
pub fn mass_sweep(
    masses: &[f64],
    sigma0: f64,
    units: UnitSystem,
    ic: &IntegratorConfig,
) -> Vec<SweepRow> {
    masses
        .par_iter()
        .map(|&mass| SweepRow {
            mass,
            result: PacketSpec::new(mass, sigma0, units).and_then(|p| {
                integrate_gravity_dominant(&p, sigma0, 0.0, WidthMode::FrozenWidth, ic)
            }),
        })
        .collect()
}
