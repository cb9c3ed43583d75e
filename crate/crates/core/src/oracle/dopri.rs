//! Dormand–Prince 5(4) for planar systems, with Hairer's continuous
//! extension for dense output.

use crate::error::{Error, Result};

pub type State = [f64; 2];

/// Right-hand side of an autonomous planar system.
pub trait PlanarField {
    fn eval(&self, y: State) -> State;
}

impl<F: Fn(State) -> State> PlanarField for F {
    fn eval(&self, y: State) -> State {
        self(y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub rtol: f64,
    pub atol: State,
    pub h_max: f64,
    pub max_steps: usize,
}

impl StepOptions {
    pub fn new(rtol: f64, atol: State) -> Self {
        StepOptions {
            rtol,
            atol,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

/// One accepted step with its interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    pub y0: State,
    pub y1: State,
    t_stop: f64,
    rcont: [State; 4],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t_stop
    }

    /// The same interpolant, ending at `t` instead of `t1`.
    pub fn truncated(step: &DenseStep, t: f64) -> DenseStep {
        let t = t.clamp(step.t0, step.t_stop);
        DenseStep {
            y1: step.eval(t),
            t_stop: t,
            ..*step
        }
    }

    /// Interpolated state at `t ∈ [t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> State {
        let th = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let [r2, r3, r4, r5] = self.rcont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = self.y0[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
        out
    }

    /// First `t` in the step where component `idx` changes sign, located by
    /// bisection on the interpolant to `t_tol`.
    pub fn locate_zero(&self, idx: usize, t_tol: f64) -> Option<f64> {
        let (a, b) = (self.y0[idx], self.y1[idx]);
        if a == 0.0 || !(a * b <= 0.0) {
            return None;
        }
        let (mut lo, mut hi) = (self.t0, self.t1());
        for _ in 0..200 {
            if hi - lo <= t_tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let v = self.eval(mid)[idx];
            if v == 0.0 {
                return Some(mid);
            }
            if (v > 0.0) == (a > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// What to do after an accepted step.
pub enum Control {
    Continue,
    Stop,
}

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

#[inline]
fn axpy(y: State, terms: &[(f64, State)], h: f64) -> State {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

fn norm(v: State, y0: State, y1: State, opts: &StepOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let sc = opts.atol[i] + opts.rtol * y0[i].abs().max(y1[i].abs());
        acc += (v[i] / sc).powi(2);
    }
    (acc / 2.0).sqrt()
}

fn initial_step<F: PlanarField>(field: &F, y0: State, f0: State, opts: &StepOptions) -> f64 {
    let d0 = norm(y0, y0, y0, opts);
    let d1 = norm(f0, y0, y0, opts);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(opts.h_max);
    let y1 = axpy(y0, &[(1.0, f0)], h0);
    let f1 = field.eval(y1);
    let d2 = norm([f1[0] - f0[0], f1[1] - f0[1]], y0, y0, opts) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(opts.h_max)
}

/// Integrates from `(t0, y0)` to `t_end`, handing every accepted step to
/// `on_step`. Returns the final time and state.
pub fn integrate<F, C>(
    field: &F,
    t0: f64,
    y0: State,
    t_end: f64,
    opts: &StepOptions,
    mut on_step: C,
) -> Result<(f64, State)>
where
    F: PlanarField,
    C: FnMut(&DenseStep) -> Result<Control>,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = field.eval(y);
    let mut h = initial_step(field, y, k1, opts).min(t_end - t0);
    let mut last_rejected = false;

    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Ok((t, y));
        }
        if h < 16.0 * f64::EPSILON * t.abs().max(1e-300) || h <= 1e-300 {
            return Err(Error::StepUnderflow { t, h });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = field.eval(axpy(y, &[(A21, k1)], h));
        let k3 = field.eval(axpy(y, &[(A31, k1), (A32, k2)], h));
        let k4 = field.eval(axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h));
        let k5 = field.eval(axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h));
        let k6 = field.eval(axpy(
            y,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
            h,
        ));
        let y1 = axpy(
            y,
            &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
            h,
        );
        let k7 = field.eval(y1);
        let err_vec = axpy(
            [0.0, 0.0],
            &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
            h,
        );
        let err = norm(err_vec, y, y1, opts);
        if !err.is_finite() || !y1[0].is_finite() || !y1[1].is_finite() {
            h *= 0.1;
            last_rejected = true;
            continue;
        }

        if err <= 1.0 {
            let ydiff = [y1[0] - y[0], y1[1] - y[1]];
            let bspl = [h * k1[0] - ydiff[0], h * k1[1] - ydiff[1]];
            let r4 = [
                ydiff[0] - h * k7[0] - bspl[0],
                ydiff[1] - h * k7[1] - bspl[1],
            ];
            let r5 = axpy(
                [0.0, 0.0],
                &[(D1, k1), (D3, k3), (D4, k4), (D5, k5), (D6, k6), (D7, k7)],
                h,
            );
            let t_next = if last { t_end } else { t + h };
            let step = DenseStep {
                t0: t,
                h,
                y0: y,
                y1,
                t_stop: t_next,
                rcont: [ydiff, bspl, r4, r5],
            };
            t = t_next;
            y = y1;
            k1 = k7;
            if let Control::Stop = on_step(&step)? {
                return Ok((t, y));
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(opts.h_max);
            last_rejected = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            h *= fac;
            last_rejected = true;
        }
    }
    Err(Error::StepUnderflow { t, h })
}
