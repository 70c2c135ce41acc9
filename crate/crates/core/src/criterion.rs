//! The quantum–classical threshold, obtained three ways (canonical formula,
//! balance of ensemble-averaged forces, minimum of the mean energy), and the
//! regime classification of a `(m, σ₀)` pair.
//!
//! All three widths are `ħ²/(Gm³)` times an m-independent prefactor:
//! 1 (canonical), √(π/2) (force balance) and 3√π/2 (energy minimum).

use std::fmt;

use crate::deviation::{omega, OmegaValue};
use crate::error::{positive, Error, Result};
use crate::fields::{average, Field, QuadratureConfig};
use crate::numerics::{minimize, roots};
use crate::units::UnitSystem;
use crate::wavepacket::PacketSpec;

/// σ_c = ħ²/(Gm³).
pub fn critical_width(m: f64, u: UnitSystem) -> Result<f64> {
    let m = positive("mass", m)?;
    Ok(u.hbar * u.hbar / (u.g * m * m * m))
}

/// m_c = (ħ²/(Gσ₀))^{1/3}.
pub fn critical_mass(sigma0: f64, u: UnitSystem) -> Result<f64> {
    let s = positive("sigma0", sigma0)?;
    Ok((u.hbar * u.hbar / (u.g * s)).cbrt())
}

fn packet_at(m: f64, sigma: f64, u: UnitSystem) -> PacketSpec {
    PacketSpec {
        mass: m,
        sigma0: sigma,
        units: u,
    }
}

/// Width at which `⟨f_q⟩ + ⟨f_g⟩ = 0`, by Brent's method on the closed-form
/// averages.
pub fn width_by_force_balance(m: f64, u: UnitSystem) -> Result<f64> {
    let sc = critical_width(m, u)?;
    let net = |s: f64| {
        let p = packet_at(m, s, u);
        Field::QuantumForce.closed_form_average(&p, s)
            + Field::GravityForce.closed_form_average(&p, s)
    };
    let (lo, hi) = roots::expand_positive_bracket(&net, 0.1 * sc, 10.0 * sc)?;
    roots::brent(net, lo, hi, 1e-15 * sc, 200)
}

/// Mean energy `⟨Q⟩ + ⟨U_g⟩` of the stationary packet of width `sigma`.
pub fn mean_energy(m: f64, sigma: f64, u: UnitSystem) -> f64 {
    let p = packet_at(m, sigma, u);
    Field::QuantumPotential.closed_form_average(&p, sigma)
        + Field::GravityPotential.closed_form_average(&p, sigma)
}

/// `d⟨E⟩/dσ`, using `⟨Q⟩ ∝ σ⁻²` and `⟨U_g⟩ ∝ σ⁻¹`.
fn mean_energy_slope(m: f64, sigma: f64, u: UnitSystem) -> f64 {
    let p = packet_at(m, sigma, u);
    let q = Field::QuantumPotential.closed_form_average(&p, sigma);
    let ug = Field::GravityPotential.closed_form_average(&p, sigma);
    (-2.0 * q - ug) / sigma
}

fn mean_energy_curvature(m: f64, sigma: f64, u: UnitSystem) -> f64 {
    let p = packet_at(m, sigma, u);
    let q = Field::QuantumPotential.closed_form_average(&p, sigma);
    let ug = Field::GravityPotential.closed_form_average(&p, sigma);
    (6.0 * q + 2.0 * ug) / (sigma * sigma)
}

/// Width minimizing the mean energy.
///
/// A golden-section search in `ln σ` brackets the minimum, Brent's method
/// polishes the stationary point of `d⟨E⟩/dσ`, and the energy at the
/// optimum is re-evaluated by quadrature under `cfg` as a consistency check.
pub fn width_by_energy_min(m: f64, u: UnitSystem, cfg: &QuadratureConfig) -> Result<f64> {
    let sc = critical_width(m, u)?;
    let coarse = minimize::golden_section(
        |x: f64| mean_energy(m, sc * x.exp(), u) / mean_energy(m, sc, u).abs(),
        (1e-3f64).ln(),
        (1e3f64).ln(),
        1e-6,
        1000,
    )?;
    let guess = sc * coarse.x.exp();
    let lo = guess * 0.9;
    let hi = guess * 1.1;
    let sigma = roots::brent(|s| mean_energy_slope(m, s, u), lo, hi, 1e-15 * guess, 200)?;

    if mean_energy_curvature(m, sigma, u) <= 0.0 {
        return Err(Error::NotUnimodal(format!(
            "non-positive curvature at σ = {sigma}"
        )));
    }
    let near = mean_energy(m, sigma * 1e-3, u);
    let far = mean_energy(m, sigma * 1e3, u);
    if !(near > 0.0 && far < 0.0 && far > mean_energy(m, sigma, u)) {
        return Err(Error::NotUnimodal(format!(
            "mean energy does not rise to +∞ at small σ and decay to 0⁻ at large σ around {sigma}"
        )));
    }

    let p = packet_at(m, sigma, u);
    let q = average(Field::QuantumPotential, &p, cfg)?;
    let ug = average(Field::GravityPotential, &p, cfg)?;
    let e_quad = q.quadrature + ug.quadrature;
    let e_closed = q.closed_form + ug.closed_form;
    let tol = 10.0 * cfg.rel_tol * (q.closed_form.abs() + ug.closed_form.abs());
    if (e_quad - e_closed).abs() > tol {
        return Err(Error::Quadrature {
            value: e_quad,
            error_estimate: (e_quad - e_closed).abs(),
            subdivisions: cfg.max_subdivisions,
        });
    }
    Ok(sigma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prefactors {
    pub canonical: f64,
    pub force_balance: f64,
    pub energy_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionResult {
    pub mass: f64,
    pub units: UnitSystem,
    pub sigma_canonical: f64,
    pub sigma_force_balance: f64,
    pub sigma_energy_min: f64,
    /// Critical mass of a packet whose width equals `sigma_canonical`.
    pub m_c: f64,
    /// Each width in units of `ħ²/(Gm³)`.
    pub prefactors: Prefactors,
}

impl CriterionResult {
    pub fn compute(m: f64, u: UnitSystem, cfg: &QuadratureConfig) -> Result<Self> {
        let sigma_canonical = critical_width(m, u)?;
        let sigma_force_balance = width_by_force_balance(m, u)?;
        let sigma_energy_min = width_by_energy_min(m, u, cfg)?;
        Ok(CriterionResult {
            mass: m,
            units: u,
            sigma_canonical,
            sigma_force_balance,
            sigma_energy_min,
            m_c: critical_mass(sigma_canonical, u)?,
            prefactors: Prefactors {
                canonical: 1.0,
                force_balance: sigma_force_balance / sigma_canonical,
                energy_min: sigma_energy_min / sigma_canonical,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    QuantumDominant,
    Transition,
    GravityDominant,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::QuantumDominant => "QuantumDominant",
            Regime::Transition => "Transition",
            Regime::GravityDominant => "GravityDominant",
        })
    }
}

pub const DEFAULT_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Ω at the packet center.
    pub omega0: OmegaValue,
    pub fq_avg: f64,
    pub fg_avg: f64,
    /// `|⟨f_g⟩| / ⟨f_q⟩`.
    pub balance_ratio: f64,
    pub tolerance_band: f64,
}

/// Classifies the packet by the ratio of averaged self-gravity to quantum
/// force; ratios within `band` of 1 are the transition regime.
pub fn classify(p: &PacketSpec, band: f64) -> Result<RegimeReport> {
    let band = positive("band", band)?;
    let fq = Field::QuantumForce.closed_form_average(p, p.sigma0);
    let fg = Field::GravityForce.closed_form_average(p, p.sigma0);
    let ratio = fg.abs() / fq;
    let regime = if (ratio - 1.0).abs() <= band {
        Regime::Transition
    } else if ratio < 1.0 {
        Regime::QuantumDominant
    } else {
        Regime::GravityDominant
    };
    Ok(RegimeReport {
        regime,
        omega0: omega(p, 0.0, p.sigma0),
        fq_avg: fq,
        fg_avg: fg,
        balance_ratio: ratio,
        tolerance_band: band,
    })
}
