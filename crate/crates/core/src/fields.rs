//! Quantum potential and self-gravity of a Gaussian packet of width `σ`,
//! the forces they exert on the guided particle, and their ensemble
//! averages over the stationary density.
//!
//! The self-gravity potential uses the gauge
//! `U_g(r) = −√(2/π)(Gm²/σ)·exp(−r²/2σ²)`: it vanishes at infinity, is
//! negative everywhere and reproduces the model force
//! `f_g = −√(2/π)(Gm²/σ³)·r·exp(−r²/2σ²)` as `−∂U_g/∂r`. The average
//! `⟨U_g⟩ = −Gm²/(2√π σ₀)` is specific to this gauge.
//!
//! The true Newtonian potential of the Gaussian cloud is available as
//! [`newtonian_self_potential`] for comparison only.

use std::f64::consts::PI;

use crate::error::{positive, Error, Result};
use crate::numerics::quadrature::{gauss_kronrod_15, integrate};
use crate::wavepacket::{density_at_width, PacketSpec};

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Upper integration limit in multiples of σ.
    pub upper_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 200,
            upper_cutoff: 12.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("max_subdivisions", self.max_subdivisions as f64)?;
        let c = positive("upper_cutoff", self.upper_cutoff)?;
        // mass of the radial Gaussian beyond cσ
        if 1.0 - crate::wavepacket::radial_cdf(1.0, c) > 1e-30 || gaussian_tail(c) > 1e-30 {
            return Err(Error::InvalidParameter {
                name: "upper_cutoff",
                value: c,
                reason: "truncated Gaussian tail mass must stay below 1e-30",
            });
        }
        Ok(())
    }
}

// asymptotic tail of P(r > cσ) for the 3-D Gaussian; exact CDF rounds to 1
fn gaussian_tail(c: f64) -> f64 {
    SQRT_2_OVER_PI * (c + 1.0 / c) * (-0.5 * c * c).exp()
}

/// Q(r) = ħ²(6σ² − r²)/(8mσ⁴).
pub fn quantum_potential(p: &PacketSpec, r: f64, sigma: f64) -> f64 {
    let h = p.hbar();
    h * h * (6.0 * sigma * sigma - r * r) / (8.0 * p.mass * sigma.powi(4))
}

/// Radially outward quantum force ħ²r/(4mσ⁴).
pub fn quantum_force(p: &PacketSpec, r: f64, sigma: f64) -> f64 {
    let h = p.hbar();
    h * h * r / (4.0 * p.mass * sigma.powi(4))
}

pub fn gravity_potential(p: &PacketSpec, r: f64, sigma: f64) -> f64 {
    -SQRT_2_OVER_PI * p.g() * p.mass * p.mass / sigma * (-r * r / (2.0 * sigma * sigma)).exp()
}

pub fn gravity_force(p: &PacketSpec, r: f64, sigma: f64) -> f64 {
    -SQRT_2_OVER_PI * p.g() * p.mass * p.mass / sigma.powi(3)
        * r
        * (-r * r / (2.0 * sigma * sigma)).exp()
}

/// ∇²Q = −3ħ²/(4mσ⁴); independent of r and always negative.
pub fn laplacian_q(p: &PacketSpec, sigma: f64) -> f64 {
    let h = p.hbar();
    -3.0 * h * h / (4.0 * p.mass * sigma.powi(4))
}

/// Newtonian self-energy `−Gm²·erf(r/√2σ)/r` of the particle in its own
/// Gaussian cloud.
pub fn newtonian_self_potential(p: &PacketSpec, r: f64, sigma: f64) -> f64 {
    let gm2 = p.g() * p.mass * p.mass;
    let x = r / (std::f64::consts::SQRT_2 * sigma);
    if x < 1e-6 {
        // erf(x)/x → 2/√π (1 − x²/3)
        return -gm2 * SQRT_2_OVER_PI / sigma * (1.0 - x * x / 3.0);
    }
    -gm2 * libm::erf(x) / r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub r: f64,
    pub q: f64,
    pub f_q: f64,
    pub u_g: f64,
    pub f_g: f64,
    pub lap_q: f64,
    pub rho: f64,
}

pub fn sample(p: &PacketSpec, r: f64, sigma: f64) -> FieldSample {
    FieldSample {
        r,
        q: quantum_potential(p, r, sigma),
        f_q: quantum_force(p, r, sigma),
        u_g: gravity_potential(p, r, sigma),
        f_g: gravity_force(p, r, sigma),
        lap_q: laplacian_q(p, sigma),
        rho: density_at_width(sigma, r),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    QuantumPotential,
    GravityPotential,
    QuantumForce,
    GravityForce,
}

impl Field {
    pub const ALL: [Field; 4] = [
        Field::QuantumPotential,
        Field::GravityPotential,
        Field::QuantumForce,
        Field::GravityForce,
    ];

    pub fn eval(&self, p: &PacketSpec, r: f64, sigma: f64) -> f64 {
        match self {
            Field::QuantumPotential => quantum_potential(p, r, sigma),
            Field::GravityPotential => gravity_potential(p, r, sigma),
            Field::QuantumForce => quantum_force(p, r, sigma),
            Field::GravityForce => gravity_force(p, r, sigma),
        }
    }

    /// Exact ensemble average over the stationary packet of width `sigma`.
    pub fn closed_form_average(&self, p: &PacketSpec, sigma: f64) -> f64 {
        let (h, g, m) = (p.hbar(), p.g(), p.mass);
        match self {
            Field::QuantumPotential => 3.0 * h * h / (8.0 * m * sigma * sigma),
            Field::QuantumForce => 0.5 * SQRT_2_OVER_PI * h * h / (m * sigma.powi(3)),
            Field::GravityForce => -g * m * m / (PI * sigma * sigma),
            Field::GravityPotential => -g * m * m / (2.0 * PI.sqrt() * sigma),
        }
    }

    /// Order-of-magnitude form with the numeric prefactor dropped.
    pub fn rounded_average(&self, p: &PacketSpec, sigma: f64) -> f64 {
        let (h, g, m) = (p.hbar(), p.g(), p.mass);
        match self {
            Field::QuantumPotential => h * h / (m * sigma * sigma),
            Field::QuantumForce => h * h / (m * sigma.powi(3)),
            Field::GravityForce => -g * m * m / (sigma * sigma),
            Field::GravityPotential => -g * m * m / sigma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Average {
    pub quadrature: f64,
    pub error_estimate: f64,
    pub closed_form: f64,
    pub rounded: f64,
}

impl Average {
    pub fn relative_gap(&self) -> f64 {
        ((self.quadrature - self.closed_form) / self.closed_form).abs()
    }
}

/// `∫₀^∞ ρ·field·4πr² dr` over the stationary packet (σ = σ₀) by adaptive
/// quadrature, alongside the closed form.
pub fn average(field: Field, p: &PacketSpec, cfg: &QuadratureConfig) -> Result<Average> {
    cfg.validate()?;
    let sigma = p.sigma0;
    let integrand =
        |r: f64| density_at_width(sigma, r) * field.eval(p, r, sigma) * 4.0 * PI * r * r;
    let upper = cfg.upper_cutoff * sigma;
    let scale = gauss_kronrod_15(&integrand, 0.0, upper).abs_value;
    let res = integrate(
        integrand,
        0.0,
        upper,
        cfg.rel_tol,
        cfg.abs_tol * scale,
        cfg.max_subdivisions,
    )?;
    Ok(Average {
        quadrature: res.value,
        error_estimate: res.abs_error,
        closed_form: field.closed_form_average(p, sigma),
        rounded: field.rounded_average(p, sigma),
    })
}
