//! Bohmian-trajectory model of gravity-induced wave-function reduction.
//!
//! A particle of mass `m` guided by an isotropic Gaussian packet of width
//! `σ₀` feels a repulsive quantum force and an attractive self-gravity force
//! built from its own probability density. This crate evaluates both fields,
//! locates the width at which they balance, classifies the trajectory bundle
//! into quantum-dominant, transition or gravity-dominant regimes, and
//! integrates the radial infall that sets the reduction time.
//!
//! All physics routines compute in whatever [`UnitSystem`] the caller's
//! [`PacketSpec`] carries; conversion happens only through [`units::convert`].

pub mod cli;
pub mod criterion;
pub mod deviation;
pub mod error;
pub mod fields;
pub mod numerics;
pub mod reduction;
pub mod units;
pub mod wavepacket;

pub use criterion::{classify, CriterionResult, Regime, RegimeReport};
pub use error::{Error, Result};
pub use fields::QuadratureConfig;
pub use reduction::{IntegratorConfig, RadialState, ReductionResult, WidthMode};
pub use units::{Dimension, Quantity, UnitSystem};
pub use wavepacket::{EnsembleSpec, PacketSpec};
