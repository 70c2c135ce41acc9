use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension `{0}`")]
    UnsupportedDimension(String),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{what}: argument {value} outside domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("quadrature did not converge: estimate {value}, error estimate {error_estimate} after {subdivisions} subdivisions")]
    Quadrature {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NotBracketed {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("minimum is not interior: {0}")]
    NotUnimodal(String),

    #[error("step size underflow at t = {t} (h = {h}); last accepted state {state:?}")]
    StepUnderflow { t: f64, h: f64, state: Vec<f64> },

    #[error("step budget of {max_steps} exhausted at t = {t}; last accepted state {state:?}")]
    TooManySteps {
        max_steps: usize,
        t: f64,
        state: Vec<f64>,
    },

    #[error("no fall to the center before t_max = {t_max}; final state t = {t}, r = {r}, u = {u}")]
    NoFall { t_max: f64, t: f64, r: f64, u: f64 },
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative and finite",
        })
    }
}
