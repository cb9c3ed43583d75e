//! The regularised family `-u'' = λu - a·g_ε(u)·u` with
//! `g_ε(u) = (ε + |u|)^{p-1}`, whose field is Lipschitz for `ε > 0`.
//!
//! Its positive solutions form a branch from `(λ₁(ε), 0)` to `(σ₁, ∞)`; here
//! the branch is sampled by symmetric shooting. This is the one-dimensional
//! case only.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Params;
use crate::oracle::dopri::{self, Control, DenseStep, State, StepOptions};
use crate::oracle::shooting::{first_root, shoot_field, Shot, SCAN_PER_DECADE, SHOT_TOL};
use crate::profiles::{Profile, ProfileKind, Segment};

/// Slope scan range in units of `u_H/T_H`.
pub const SLOPE_SCAN: (f64, f64) = (1e-8, 1e8);
/// Grid size of profiles attached by [`trace`].
pub const TRACE_GRID: usize = 1025;

/// `(ε + |u|)^{p-1}`.
pub fn g_eps(u: f64, eps: f64, p: f64) -> f64 {
    (eps + u.abs()).powf(p - 1.0)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveEps(eps))
    }
}

/// Principal eigenvalue of the linearisation at `u = 0`:
/// `λ₁(ε) = (π/L)² + a·ε^{p-1}`.
pub fn lambda1_eps(eps: f64, params: &Params) -> Result<f64> {
    check_eps(eps)?;
    Ok((PI / params.length()).powi(2) + params.a() * eps.powf(params.p() - 1.0))
}

/// `λ₁(ε)` computed by shooting on the linearised equation
/// `-u'' = (λ - a·g_ε(0))u`, `u(0) = 0`, `u'(0) = 1`, for the first `λ`
/// with `u(L) = 0`.
pub fn linear_shooting_eigenvalue(eps: f64, params: &Params) -> Result<f64> {
    check_eps(eps)?;
    let shift = params.a() * g_eps(0.0, eps, params.p());
    let length = params.length();
    let sigma1 = (PI / length).powi(2);
    let end_value = |lam: f64| -> Result<f64> {
        let field = move |y: State| [y[1], -(lam - shift) * y[0]];
        let opts = StepOptions::new(1e-14, [1e-16 * length, 1e-16]);
        Ok(
            dopri::integrate(&field, 0.0, [0.0, 1.0], length, &opts, |_| {
                Ok(Control::Continue)
            })?
            .1[0],
        )
    };
    // u(L) > 0 at λ = shift (u = x) and < 0 at shift + 2.25σ₁ (sin(3π/2) < 0).
    let (mut lo, mut hi) = (shift, shift + 2.25 * sigma1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if end_value(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Vector field of the regularised problem.
fn field(lam: f64, eps: f64, params: &Params) -> impl Fn(State) -> State {
    let (a, p) = (params.a(), params.p());
    move |y: State| [y[1], -(lam * y[0] - a * g_eps(y[0], eps, p) * y[0])]
}

/// Miss `u'(L/2)` of the shot `u(0) = 0, u'(0) = slope`.
pub fn shoot(lam: f64, eps: f64, slope: f64, params: &Params) -> Result<f64> {
    Ok(shot(lam, eps, slope, params)?.miss)
}

/// The full shot record, including positivity on `(0, L/2]`.
pub fn shot(lam: f64, eps: f64, slope: f64, params: &Params) -> Result<Shot> {
    check_eps(eps)?;
    shoot_field(
        &field(lam, eps, params),
        slope,
        0.5 * params.length(),
        SHOT_TOL,
    )
}

/// The first positive symmetric root of the miss over the slope scan, if any.
/// No window check, so it also answers "is there a solution at `lam`".
pub fn find_root(lam: f64, eps: f64, params: &Params) -> Result<Option<Shot>> {
    check_eps(eps)?;
    let at = params.with_lambda(lam)?;
    let scale = at.equilibria().velocity_scale();
    first_root(
        |s| shot(lam, eps, s, params),
        SLOPE_SCAN.0 * scale,
        SLOPE_SCAN.1 * scale,
        SCAN_PER_DECADE,
        1e-12,
    )
}

/// A point of the positive branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub eps: f64,
    pub lam: f64,
    /// `u'(0)`.
    pub slope: f64,
    pub sup_norm: f64,
    /// `max(sup|u|, sup|u'|)` on the grid.
    pub norm: f64,
    pub profile: Option<Profile>,
}

impl BranchPoint {
    /// `w = u/‖u‖²`; applying it twice returns the original point.
    pub fn invert(&self) -> Result<BranchPoint> {
        if !(self.norm > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let k = 1.0 / (self.norm * self.norm);
        let profile = self.profile.clone().map(|mut prof| {
            prof.grid.values.iter_mut().for_each(|u| *u *= k);
            prof.grid.slopes.iter_mut().for_each(|v| *v *= k);
            prof
        });
        Ok(BranchPoint {
            eps: self.eps,
            lam: self.lam,
            slope: self.slope * k,
            sup_norm: self.sup_norm * k,
            norm: 1.0 / self.norm,
            profile,
        })
    }

    pub fn w_norm(&self) -> Result<f64> {
        Ok(invert_point(self)?.1)
    }
}

/// `(λ, ‖w‖)` with `‖w‖ = 1/‖u‖`.
pub fn invert_point(bp: &BranchPoint) -> Result<(f64, f64)> {
    if !(bp.norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok((bp.lam, 1.0 / bp.norm))
}

/// [`solve_on_grid`] with the default grid.
pub fn solve(lam: f64, eps: f64, params: &Params) -> Result<BranchPoint> {
    solve_on_grid(lam, eps, params, crate::profiles::DEFAULT_GRID)
}

/// The positive symmetric solution at `lam ∈ (σ₁, λ₁(ε))`, sampled on `n`
/// uniform nodes.
pub fn solve_on_grid(lam: f64, eps: f64, params: &Params, n: usize) -> Result<BranchPoint> {
    let upper = lambda1_eps(eps, params)?;
    let lower = params.equilibria().sigma(1);
    if !(lam > lower && lam < upper) {
        return Err(Error::LambdaOutsideWindow {
            lambda: lam,
            lower,
            upper,
        });
    }
    let root = find_root(lam, eps, params)?.ok_or(Error::NoBracket { lambda: lam })?;
    let profile = profile_from_slope(lam, eps, root.slope, params, n)?;
    Ok(BranchPoint {
        eps,
        lam,
        slope: root.slope,
        sup_norm: profile.sup_norm(),
        norm: profile.c1_norm(),
        profile: Some(profile),
    })
}

/// Samples the shot with initial slope `slope` on `[0, L/2]` and reflects it.
pub fn profile_from_slope(
    lam: f64,
    eps: f64,
    slope: f64,
    params: &Params,
    n: usize,
) -> Result<Profile> {
    let at = params.with_lambda(lam)?;
    let length = at.length();
    let half = 0.5 * length;
    let f = field(lam, eps, &at);
    let opts = StepOptions::new(
        SHOT_TOL,
        [
            SHOT_TOL * 1e-3 * slope * half.min(1.0),
            SHOT_TOL * 1e-3 * slope,
        ],
    );
    let mut steps: Vec<DenseStep> = Vec::new();
    let (_, end) = dopri::integrate(&f, 0.0, [0.0, slope], half, &opts, |s| {
        steps.push(*s);
        Ok(Control::Continue)
    })?;
    let eval = |q: f64| -> State {
        if q <= 0.0 {
            return [0.0, slope];
        }
        if q >= half {
            return end;
        }
        let i = steps.partition_point(|s| s.t1() < q).min(steps.len() - 1);
        steps[i].eval(q)
    };
    let segments = vec![Segment::Arc {
        lo: 0.0,
        hi: length,
        peak: half,
    }];
    Profile::assemble(
        at,
        ProfileKind::Regularized { eps },
        segments,
        (0.0, length),
        n,
        &[half],
        |nodes| {
            let mut values = Vec::with_capacity(nodes.len());
            let mut slopes = Vec::with_capacity(nodes.len());
            for &x in nodes {
                let mirrored = x > half;
                let [u, v] = eval(if mirrored { length - x } else { x });
                let u = if x == 0.0 || x == length { 0.0 } else { u };
                values.push(u);
                slopes.push(if mirrored { -v } else { v });
            }
            Ok((values, slopes))
        },
    )
}

/// One [`BranchPoint`] per grid value, computed in parallel; failures are
/// kept in place so the trace continues past them.
pub fn trace(eps: f64, lam_grid: &[f64], params: &Params) -> Vec<Result<BranchPoint>> {
    lam_grid
        .par_iter()
        .map(|&lam| solve_on_grid(lam, eps, params, TRACE_GRID))
        .collect()
}
