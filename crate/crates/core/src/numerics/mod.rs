//! Numerical building blocks: adaptive quadrature, bracketed root finding,
//! one-dimensional minimization and an embedded Runge–Kutta integrator with
//! dense output and event location.

pub mod minimize;
pub mod ode;
pub mod quadrature;
pub mod roots;
