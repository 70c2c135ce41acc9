//! Unit systems, pinned physical constants and conversion between SI and
//! Planck units (`ħ = G = c = 1`).
//!
//! Physics modules never convert behind the caller's back: they read `ħ`, `G`
//! and `c` from the [`UnitSystem`] carried by the packet and compute in it.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Newtonian constant of gravitation, m³·kg⁻¹·s⁻² (CODATA 2018).
pub const G_SI: f64 = 6.674_30e-11;
/// Speed of light in vacuum, m/s (exact).
pub const C_SI: f64 = 2.997_924_58e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemName {
    Si,
    Planck,
}

/// A coherent unit system described by the numeric values it assigns to
/// `ħ`, `G` and `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub name: SystemName,
    pub hbar: f64,
    pub g: f64,
    pub c: f64,
}

impl UnitSystem {
    pub const SI: UnitSystem = UnitSystem {
        name: SystemName::Si,
        hbar: HBAR_SI,
        g: G_SI,
        c: C_SI,
    };

    pub const PLANCK: UnitSystem = UnitSystem {
        name: SystemName::Planck,
        hbar: 1.0,
        g: 1.0,
        c: 1.0,
    };

    pub fn label(&self) -> &'static str {
        match self.name {
            SystemName::Si => "si",
            SystemName::Planck => "planck",
        }
    }

    /// SI value of one unit of `dim` in this system.
    pub fn si_scale(&self, dim: Dimension) -> f64 {
        match self.name {
            SystemName::Si => 1.0,
            SystemName::Planck => planck_scale(dim),
        }
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem::PLANCK
    }
}

impl FromStr for UnitSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "si" => Ok(UnitSystem::SI),
            "planck" => Ok(UnitSystem::PLANCK),
            _ => Err(Error::Domain {
                what: "unit system",
                value: f64::NAN,
                domain: format!("{{si, planck}}, got `{s}`"),
            }),
        }
    }
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Mass,
    Length,
    Time,
    Energy,
    Force,
    Acceleration,
    Velocity,
    Dimensionless,
}

impl Dimension {
    pub const ALL: [Dimension; 8] = [
        Dimension::Mass,
        Dimension::Length,
        Dimension::Time,
        Dimension::Energy,
        Dimension::Force,
        Dimension::Acceleration,
        Dimension::Velocity,
        Dimension::Dimensionless,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Dimension::Mass => "mass",
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Energy => "energy",
            Dimension::Force => "force",
            Dimension::Acceleration => "acceleration",
            Dimension::Velocity => "velocity",
            Dimension::Dimensionless => "dimensionless",
        }
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::UnsupportedDimension(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub dimension: Dimension,
}

impl Quantity {
    pub fn new(value: f64, dimension: Dimension) -> Self {
        Quantity { value, dimension }
    }
}

pub fn planck_mass() -> f64 {
    (HBAR_SI * C_SI / G_SI).sqrt()
}

pub fn planck_length() -> f64 {
    (HBAR_SI * G_SI / C_SI.powi(3)).sqrt()
}

pub fn planck_time() -> f64 {
    (HBAR_SI * G_SI / C_SI.powi(5)).sqrt()
}

fn planck_scale(dim: Dimension) -> f64 {
    let (m, l, t) = (planck_mass(), planck_length(), planck_time());
    match dim {
        Dimension::Mass => m,
        Dimension::Length => l,
        Dimension::Time => t,
        Dimension::Energy => m * C_SI * C_SI,
        Dimension::Force => m * C_SI * C_SI / l,
        Dimension::Acceleration => l / (t * t),
        Dimension::Velocity => C_SI,
        Dimension::Dimensionless => 1.0,
    }
}

/// Rescales `q` from `from` units into `to` units.
pub fn convert(q: Quantity, from: UnitSystem, to: UnitSystem) -> Quantity {
    if from.name == to.name {
        return q;
    }
    let factor = from.si_scale(q.dimension) / to.si_scale(q.dimension);
    Quantity::new(q.value * factor, q.dimension)
}

/// Like [`convert`], with the dimension given by name (`"mass"`, `"length"`, ...).
pub fn convert_named(value: f64, dimension: &str, from: UnitSystem, to: UnitSystem) -> Result<f64> {
    let dim: Dimension = dimension.parse()?;
    Ok(convert(Quantity::new(value, dim), from, to).value)
}
