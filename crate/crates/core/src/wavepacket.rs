//! The free isotropic Gaussian pilot wave: width spreading, probability
//! density, the exact free Bohmian trajectory, and a seeded sampler for
//! initial radii.
//!
//! `x` in the Cartesian free-particle formulas is treated as the radial
//! coordinate of an isotropic packet.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{positive, Result};
use crate::numerics::roots;
use crate::units::UnitSystem;

/// Mass and initial width of the packet, in `units`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub mass: f64,
    pub sigma0: f64,
    pub units: UnitSystem,
}

impl PacketSpec {
    pub fn new(mass: f64, sigma0: f64, units: UnitSystem) -> Result<Self> {
        Ok(PacketSpec {
            mass: positive("mass", mass)?,
            sigma0: positive("sigma0", sigma0)?,
            units,
        })
    }

    pub fn planck(mass: f64, sigma0: f64) -> Result<Self> {
        Self::new(mass, sigma0, UnitSystem::PLANCK)
    }

    pub fn hbar(&self) -> f64 {
        self.units.hbar
    }

    pub fn g(&self) -> f64 {
        self.units.g
    }

    /// `ħ / (2mσ₀²)`, the inverse spreading time.
    pub fn spreading_rate(&self) -> f64 {
        self.hbar() / (2.0 * self.mass * self.sigma0 * self.sigma0)
    }

    /// `(σ₀³/Gm)^½`, the natural infall timescale.
    pub fn fall_timescale(&self) -> f64 {
        (self.sigma0.powi(3) / (self.g() * self.mass)).sqrt()
    }
}

/// σ(t) = σ₀·√(1 + ħ²t²/(4m²σ₀⁴)).
pub fn width(p: &PacketSpec, t: f64) -> f64 {
    let s = p.spreading_rate() * t;
    p.sigma0 * (1.0 + s * s).sqrt()
}

/// Probability density of the packet of width `sigma` at radius `r`.
pub fn density_at_width(sigma: f64, r: f64) -> f64 {
    (2.0 * PI).powf(-1.5) * sigma.powi(-3) * (-r * r / (2.0 * sigma * sigma)).exp()
}

/// ρ(r, t) = (2π)^{-3/2} σ(t)^{-3} exp(−r²/2σ(t)²).
pub fn density(p: &PacketSpec, r: f64, t: f64) -> f64 {
    density_at_width(width(p, t), r)
}

/// Free Bohmian trajectory started at rest at `x0`: x(t) = x0·σ(t)/σ₀.
pub fn free_trajectory(p: &PacketSpec, x0: f64, t: f64) -> f64 {
    let s = p.spreading_rate() * t;
    x0 * (1.0 + s * s).sqrt()
}

/// Probability that the radius is below `r` for a packet of width `sigma`:
/// the regularized lower incomplete gamma `P(3/2, r²/2σ²)`.
pub fn radial_cdf(sigma: f64, r: f64) -> f64 {
    let x = r / sigma;
    libm::erf(x / std::f64::consts::SQRT_2) - (2.0 / PI).sqrt() * x * (-0.5 * x * x).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub packet: PacketSpec,
    pub count: usize,
    pub seed: u64,
}

/// Inverse-CDF sampler of the radial marginal `4πr²ρ(r, 0)`.
///
/// Each instance owns its generator; identical seeds give bitwise identical
/// sequences.
#[derive(Debug, Clone)]
pub struct RadialSampler {
    rng: ChaCha8Rng,
    sigma0: f64,
}

impl RadialSampler {
    pub fn new(packet: &PacketSpec, seed: u64) -> Self {
        RadialSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sigma0: packet.sigma0,
        }
    }

    pub fn next_radius(&mut self) -> f64 {
        let u: f64 = self.rng.gen();
        let sigma = self.sigma0;
        // F(40σ) rounds to 1, so every u in [0, 1) is bracketed
        roots::brent(
            |r| radial_cdf(sigma, r) - u,
            0.0,
            40.0 * sigma,
            1e-15 * sigma,
            200,
        )
        .expect("radial CDF spans [0, 1) on [0, 40σ]")
    }
}

impl Iterator for RadialSampler {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_radius())
    }
}

pub fn sample_initial_positions(e: &EnsembleSpec) -> Result<Vec<f64>> {
    positive("count", e.count as f64)?;
    Ok(RadialSampler::new(&e.packet, e.seed)
        .take(e.count)
        .collect())
}
