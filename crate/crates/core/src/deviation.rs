//! Geodesic-deviation analogue for Bohmian trajectories: `ξ̈ = Ω ξ` with the
//! isotropic scalar
//! `Ω = −(∇²Q/3m + 4πGmρ/3)`,
//! split into a non-negative quantum part and a non-positive gravity part.

use std::f64::consts::PI;

use crate::error::{positive, Result};
use crate::fields::laplacian_q;
use crate::numerics::ode::{self, Control, SolverConfig};
use crate::reduction::{IntegratorConfig, WidthMode};
use crate::wavepacket::{density_at_width, width, PacketSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaValue {
    pub omega: f64,
    /// `−∇²Q/3m = ħ²/(4m²σ⁴)`.
    pub quantum_part: f64,
    /// `−4πGmρ(r)/3`.
    pub gravity_part: f64,
}

pub fn omega(p: &PacketSpec, r: f64, sigma: f64) -> OmegaValue {
    let quantum_part = -laplacian_q(p, sigma) / (3.0 * p.mass);
    let gravity_part = -4.0 * PI * p.g() * p.mass * density_at_width(sigma, r) / 3.0;
    OmegaValue {
        omega: quantum_part + gravity_part,
        quantum_part,
        gravity_part,
    }
}

/// Which parts of Ω drive the deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviationMode {
    /// Ω = 0: the bundle stays parallel.
    Transition,
    QuantumDominant,
    GravityDominant,
    Full,
}

impl DeviationMode {
    fn retained(&self, w: &OmegaValue) -> f64 {
        match self {
            DeviationMode::Transition => 0.0,
            DeviationMode::QuantumDominant => w.quantum_part,
            DeviationMode::GravityDominant => w.gravity_part,
            DeviationMode::Full => w.omega,
        }
    }
}

impl From<crate::criterion::Regime> for DeviationMode {
    fn from(r: crate::criterion::Regime) -> Self {
        match r {
            crate::criterion::Regime::QuantumDominant => DeviationMode::QuantumDominant,
            crate::criterion::Regime::Transition => DeviationMode::Transition,
            crate::criterion::Regime::GravityDominant => DeviationMode::GravityDominant,
        }
    }
}

/// The trajectory along which Ω is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaPath {
    /// A fixed radius (the packet center by default).
    Frozen { radius: f64 },
    /// A reference trajectory integrated alongside ξ under the same
    /// retained forces.
    Coupled { r0: f64, u0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationConfig {
    pub path: OmegaPath,
    pub width: WidthMode,
}

impl Default for DeviationConfig {
    fn default() -> Self {
        DeviationConfig {
            path: OmegaPath::Frozen { radius: 0.0 },
            width: WidthMode::FrozenWidth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationState {
    pub t: f64,
    pub xi: f64,
    pub xi_dot: f64,
    pub xi_ddot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRun {
    pub states: Vec<DeviationState>,
    /// Time at which ξ first reached zero (the neighbouring trajectories
    /// meet); integration stops there.
    pub focused_at: Option<f64>,
}

const TRANSITION_SAMPLES: usize = 100;

pub fn integrate_deviation(
    p: &PacketSpec,
    mode: DeviationMode,
    xi0: f64,
    xi_dot0: f64,
    t_end: f64,
    ic: &IntegratorConfig,
    dc: &DeviationConfig,
) -> Result<DeviationRun> {
    let t_end = positive("t_end", t_end)?;
    ic.validate()?;

    if mode == DeviationMode::Transition {
        let states = (0..=TRANSITION_SAMPLES)
            .map(|i| {
                let t = t_end * i as f64 / TRANSITION_SAMPLES as f64;
                DeviationState {
                    t,
                    xi: xi_dot0 * t + xi0,
                    xi_dot: xi_dot0,
                    xi_ddot: 0.0,
                }
            })
            .collect();
        return Ok(DeviationRun {
            states,
            focused_at: None,
        });
    }

    let sigma_at = |t: f64| match dc.width {
        WidthMode::FrozenWidth => p.sigma0,
        WidthMode::SpreadingWidth => width(p, t),
    };
    let big_omega = |t: f64, r: f64| mode.retained(&omega(p, r, sigma_at(t)));

    let w0 = omega(p, 0.0, p.sigma0);
    let timescale = 1.0 / w0.quantum_part.abs().max(w0.gravity_part.abs()).sqrt();
    let xi_scale = xi0
        .abs()
        .max(xi_dot0.abs() * timescale)
        .max(f64::MIN_POSITIVE);
    let (r_init, u_init, coupled) = match dc.path {
        OmegaPath::Frozen { radius } => (radius, 0.0, false),
        OmegaPath::Coupled { r0, u0 } => (r0, u0, true),
    };
    let r_scale = r_init.abs().max(p.sigma0);

    // state: [ξ, ξ̇, r, u]; r is held fixed unless coupled
    let rhs = |t: f64, y: &[f64; 4]| {
        let w = big_omega(t, y[2]);
        if coupled {
            let s = sigma_at(t);
            let a_q = p.hbar() * p.hbar() / (4.0 * p.mass * p.mass * s.powi(4)) * y[2];
            let a_g = -(2.0 / PI).sqrt() * p.g() * p.mass / s.powi(3)
                * y[2]
                * (-y[2] * y[2] / (2.0 * s * s)).exp();
            let a = match mode {
                DeviationMode::QuantumDominant => a_q,
                DeviationMode::GravityDominant => a_g,
                _ => a_q + a_g,
            };
            [y[1], w * y[0], y[3], a]
        } else {
            [y[1], w * y[0], 0.0, 0.0]
        }
    };

    let cfg = SolverConfig {
        rel_tol: ic.rel_tol,
        abs_tol: [
            ic.abs_tol * xi_scale,
            ic.abs_tol * xi_scale / timescale,
            ic.abs_tol * r_scale,
            ic.abs_tol * r_scale / timescale,
        ],
        max_step: ic.max_step,
        max_steps: ic.max_steps,
    };

    let y0 = [xi0, xi_dot0, r_init, u_init];
    let state = |t: f64, y: &[f64; 4]| DeviationState {
        t,
        xi: y[0],
        xi_dot: y[1],
        xi_ddot: big_omega(t, y[2]) * y[0],
    };
    let mut states = vec![state(0.0, &y0)];
    let mut focused_at = None;
    let sign0 = xi0.signum();

    ode::solve(rhs, 0.0, y0, t_end, &cfg, |step| {
        if xi0 != 0.0 {
            if let Some(tz) = step.locate(|y| y[0] * sign0, 1e-12) {
                let mut y = step.interpolate(tz);
                y[0] = 0.0;
                states.push(state(tz, &y));
                focused_at = Some(tz);
                return Control::StopAt(tz);
            }
        }
        states.push(state(step.t1, &step.y1));
        Control::Continue
    })?;

    Ok(DeviationRun { states, focused_at })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ic() -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            ..IntegratorConfig::default()
        }
    }

    #[test]
    fn omega_examples() {
        let p = PacketSpec::planck(1.0, 1.0).unwrap();
        let w = omega(&p, 0.0, 1.0);
        assert_relative_eq!(w.quantum_part, 0.25, max_relative = 1e-15);
        assert_relative_eq!(
            w.gravity_part,
            -(4.0 * PI / 3.0) * (2.0 * PI).powf(-1.5),
            max_relative = 1e-15
        );
        assert_relative_eq!(w.omega, w.quantum_part + w.gravity_part);
    }

    #[test]
    fn omega_vanishes_at_sign_flip_width() {
        let m = 1.7;
        let s = 3.0 * (2.0 * PI).powf(1.5) / (16.0 * PI) / f64::powi(m, 3);
        let w = omega(&PacketSpec::planck(m, s).unwrap(), 0.0, s);
        assert!(w.omega.abs() < 1e-12 * w.quantum_part);
    }

    #[test]
    fn light_particle_limit() {
        let heavy = omega(&PacketSpec::planck(1.0, 1.0).unwrap(), 0.0, 1.0);
        let light = omega(&PacketSpec::planck(1e-6, 1.0).unwrap(), 0.0, 1.0);
        assert!(light.quantum_part > 1e11 * heavy.quantum_part);
        assert!(light.gravity_part < 0.0 && light.gravity_part > 1e-5 * heavy.gravity_part);
    }

    #[test]
    fn part_signs() {
        for (m, s, r) in [(1.0, 1.0, 0.0), (1e-3, 5.0, 2.0), (30.0, 0.01, 0.02)] {
            let w = omega(&PacketSpec::planck(m, s).unwrap(), r, s);
            assert!(w.quantum_part >= 0.0 && w.gravity_part <= 0.0);
        }
    }

    #[test]
    fn delta_limit_along_mass_ladder() {
        let mut last = 0.0;
        for m in [1.0, 10.0, 100.0] {
            let s = crate::criterion::critical_width(m, crate::units::UnitSystem::PLANCK).unwrap();
            let g = omega(&PacketSpec::planck(m, s).unwrap(), 0.0, s)
                .gravity_part
                .abs();
            assert!(g > 1e3 * last);
            last = g;
        }
    }

    #[test]
    fn transition_is_exactly_linear() {
        let p = PacketSpec::planck(1.0, 1.0).unwrap();
        let run = integrate_deviation(
            &p,
            DeviationMode::Transition,
            1.0,
            0.0,
            5.0,
            &ic(),
            &Default::default(),
        )
        .unwrap();
        assert!(run.states.iter().all(|s| s.xi == 1.0 && s.xi_ddot == 0.0));
        let run = integrate_deviation(
            &p,
            DeviationMode::Transition,
            1.0,
            0.5,
            4.0,
            &ic(),
            &Default::default(),
        )
        .unwrap();
        assert!(run.states.iter().all(|s| s.xi == 0.5 * s.t + 1.0));
    }

    #[test]
    fn quantum_dominant_matches_cosh() {
        let p = PacketSpec::planck(1.0, 1.0).unwrap();
        let run = integrate_deviation(
            &p,
            DeviationMode::QuantumDominant,
            1.0,
            0.0,
            6.0,
            &ic(),
            &Default::default(),
        )
        .unwrap();
        for s in &run.states {
            let exact = (s.t / 2.0).cosh();
            assert!(
                (s.xi - exact).abs() <= 1e-6 * exact,
                "t={} {} vs {}",
                s.t,
                s.xi,
                exact
            );
            assert!(s.xi_ddot > 0.0);
        }
        assert_eq!(run.focused_at, None);
    }

    #[test]
    fn gravity_dominant_matches_cos_until_focus() {
        let p = PacketSpec::planck(2.0, 1.0).unwrap();
        let w = (4.0 * PI * 2.0 * density_at_width(1.0, 0.0) / 3.0).sqrt();
        let run = integrate_deviation(
            &p,
            DeviationMode::GravityDominant,
            1.0,
            0.0,
            10.0,
            &ic(),
            &Default::default(),
        )
        .unwrap();
        let tz = run.focused_at.unwrap();
        assert!((tz - PI / (2.0 * w)).abs() < 1e-8);
        for s in &run.states[..run.states.len() - 1] {
            assert!((s.xi - (w * s.t).cos()).abs() < 1e-6);
            assert!(s.xi_ddot < 0.0);
        }
    }

    #[test]
    fn coupled_path_moves_reference() {
        let p = PacketSpec::planck(1.0, 1.0).unwrap();
        let dc = DeviationConfig {
            path: OmegaPath::Coupled { r0: 1.0, u0: 0.0 },
            width: WidthMode::SpreadingWidth,
        };
        let frozen = integrate_deviation(
            &p,
            DeviationMode::Full,
            1.0,
            0.0,
            3.0,
            &ic(),
            &Default::default(),
        )
        .unwrap();
        let coupled =
            integrate_deviation(&p, DeviationMode::Full, 1.0, 0.0, 3.0, &ic(), &dc).unwrap();
        let a = frozen.states.last().unwrap().xi;
        let b = coupled.states.last().unwrap().xi;
        assert!(a.is_finite() && b.is_finite() && (a - b).abs() > 1e-6);
    }
}
