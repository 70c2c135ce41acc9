//! Derivative-free one-dimensional minimization.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search on `[a, b]` until the bracket is narrower than
/// `xtol`. Fails if the best point sits on an end of the original bracket.
pub fn golden_section<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    xtol: f64,
    max_evals: usize,
) -> Result<Minimum> {
    let (a0, b0) = (a, b);
    let (mut a, mut b) = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;

    while (b - a).abs() > xtol && evals < max_evals {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }

    let (x, value) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    let edge = 1e-6 * (b0 - a0).abs();
    if (x - a0).abs() < edge || (b0 - x).abs() < edge {
        return Err(Error::NotUnimodal(format!(
            "golden-section minimum {x} hit the bracket edge [{a0}, {b0}]"
        )));
    }
    Ok(Minimum {
        x,
        value,
        evaluations: evals,
    })
}
