//! Dormand–Prince 5(4) integrator with the Shampine/Hairer fourth-order
//! continuous extension.
//!
//! The solver hands each accepted step to a caller-supplied observer as a
//! [`DenseStep`]; observers can record output, check invariants, or stop the
//! integration at an event located on the interpolant.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig<const N: usize> {
    pub rel_tol: f64,
    /// Absolute tolerance per component, in the component's own units.
    pub abs_tol: [f64; N],
    pub max_step: f64,
    pub max_steps: usize,
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    /// Derivative at `t1`.
    pub dy1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let theta = (t - self.t0) / h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])))
        })
    }

    /// Locates the first `t` in the step where `g(y(t))` changes sign from
    /// its value at `t0`, by bisection on the interpolant to `t_rel_tol`
    /// relative time accuracy.
    pub fn locate<G: Fn(&[f64; N]) -> f64>(&self, g: G, t_rel_tol: f64) -> Option<f64> {
        let g0 = g(&self.y0);
        let g1 = g(&self.y1);
        if g0.signum() == g1.signum() && g1 != 0.0 {
            return None;
        }
        let (mut lo, mut hi) = (self.t0, self.t1);
        let tol = t_rel_tol * self.t1.abs().max(f64::MIN_POSITIVE);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let gm = g(&self.interpolate(mid));
            if gm.signum() == g0.signum() && gm != 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }
}

/// What the observer wants after seeing an accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Control {
    Continue,
    /// Stop; the final state is interpolated at the given time.
    StopAt(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
    pub stopped_early: bool,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn error_norm<const N: usize>(
    err: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    cfg: &SolverConfig<N>,
) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = cfg.abs_tol[i] + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(
    rhs: &F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    span: f64,
    cfg: &SolverConfig<N>,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let sc: [f64; N] = std::array::from_fn(|i| cfg.abs_tol[i] + cfg.rel_tol * y0[i].abs());
    let norm =
        |v: &[f64; N]| ((0..N).map(|i| (v[i] / sc[i]).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = norm(y0);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(cfg.max_step).min(span);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = rhs(t0 + h0, &y1);
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * span)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(cfg.max_step).min(span)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end`, calling `observe` after
/// every accepted step.
pub fn solve<const N: usize, F, O>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    cfg: &SolverConfig<N>,
    mut observe: O,
) -> Result<Outcome<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&DenseStep<N>) -> Control,
{
    let span = t_end - t0;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = initial_step(&rhs, t, &y, &k1, span, cfg);
    let (mut accepted, mut rejected) = (0, 0);
    let mut last_rejected = false;

    while t < t_end {
        if accepted + rejected >= cfg.max_steps {
            return Err(Error::TooManySteps {
                max_steps: cfg.max_steps,
                t,
                state: y.to_vec(),
            });
        }
        if h < 1e-14 * t.abs().max(span.abs()) {
            return Err(Error::StepUnderflow {
                t,
                h,
                state: y.to_vec(),
            });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(
            t + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = rhs(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let y6 = axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = rhs(t + h, &y6);
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = rhs(t + h, &y_new);

        let err: [f64; N] = std::array::from_fn(|i| {
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let en = error_norm(&err, &y, &y_new, cfg);

        if en <= 1.0 {
            let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
            let step = DenseStep {
                t0: t,
                t1: t + h,
                y0: y,
                y1: y_new,
                dy1: k7,
                rcont: [
                    y,
                    ydiff,
                    bspl,
                    std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]),
                    std::array::from_fn(|i| {
                        h * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i])
                    }),
                ],
            };
            accepted += 1;
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;

            if let Control::StopAt(ts) = observe(&step) {
                return Ok(Outcome {
                    t: ts,
                    y: step.interpolate(ts),
                    accepted,
                    rejected,
                    stopped_early: true,
                });
            }

            let mut fac = 0.9 * en.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(cfg.max_step);
            last_rejected = false;
        } else {
            rejected += 1;
            last_rejected = true;
            h *= (0.9 * en.powf(-0.2)).max(0.2);
        }
    }

    Ok(Outcome {
        t,
        y,
        accepted,
        rejected,
        stopped_early: false,
    })
}
