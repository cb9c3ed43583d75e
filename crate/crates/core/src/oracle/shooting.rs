//! Symmetric shooting from `(u, u') = (0, s)` to the midpoint `L/2`.
//!
//! Starting on the `u`-axis with `s > 0` the solution is unique even for the
//! non-Lipschitz field, so the non-uniqueness ball never matters here. A
//! positive symmetric solution is a root of the miss `u'(L/2)` with `u > 0`
//! on `(0, L/2]`.

use serde::{Deserialize, Serialize};

use super::dopri::{self, Control, PlanarField, StepOptions};
use super::EVENT_TOL;
use crate::error::{Error, Result};
use crate::model::Params;

/// Relative integration tolerance of a shot.
pub const SHOT_TOL: f64 = 1e-12;
/// Scan density of the logarithmic slope scan.
pub const SCAN_PER_DECADE: usize = 8;
/// Slope scan range for the sublinear problem, in units of `u_H/T_H`.
pub const CLASSICAL_SCAN: (f64, f64) = (1e-16, 1e8);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub slope: f64,
    /// `u'(L/2)`; `-1` when `u` vanished before the midpoint.
    pub miss: f64,
    /// `u > 0` on `(0, L/2]`.
    pub positive: bool,
}

impl Shot {
    fn before_root(&self) -> bool {
        self.positive && self.miss > 0.0
    }
}

/// One shot of `field` with initial slope `slope` over `[0, half]`.
pub fn shoot_field<F: PlanarField>(field: &F, slope: f64, half: f64, rtol: f64) -> Result<Shot> {
    let opts = StepOptions::new(
        rtol,
        [rtol * 1e-3 * slope * half.min(1.0), rtol * 1e-3 * slope],
    );
    let mut positive = true;
    let (_, y) = dopri::integrate(field, 0.0, [0.0, slope], half, &opts, |step| {
        if step.y1[0] <= 0.0 || step.locate_zero(0, EVENT_TOL).is_some() {
            positive = false;
            return Ok(Control::Stop);
        }
        Ok(Control::Continue)
    })?;
    Ok(Shot {
        slope,
        miss: if positive { y[1] } else { -1.0 },
        positive,
    })
}

/// Scans slopes `lo·10^{k/per_decade}` up to `hi` for the first change from
/// "positive with miss > 0" to anything else, then bisects to `rel_tol`.
///
/// Returns `None` when the smallest slope already overshoots or no change is
/// seen. The returned shot is the lower end of the final bracket, so it is
/// positive.
pub fn first_root<S>(
    mut shoot: S,
    lo: f64,
    hi: f64,
    per_decade: usize,
    rel_tol: f64,
) -> Result<Option<Shot>>
where
    S: FnMut(f64) -> Result<Shot>,
{
    let first = shoot(lo)?;
    if !first.before_root() {
        return Ok(None);
    }
    let ratio = 10f64.powf(1.0 / per_decade as f64);
    let mut prev = first;
    let mut k = 1;
    loop {
        let s = lo * ratio.powi(k);
        if s > hi * (1.0 + 1e-12) {
            return Ok(None);
        }
        let shot = shoot(s)?;
        if shot.positive && shot.miss == 0.0 {
            return Ok(Some(shot));
        }
        if !shot.before_root() {
            let (mut a, mut b) = (prev, shot);
            while b.slope - a.slope > rel_tol * b.slope {
                let mid = shoot(0.5 * (a.slope + b.slope))?;
                if mid.slope <= a.slope || mid.slope >= b.slope {
                    break;
                }
                if mid.before_root() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(Some(a));
        }
        prev = shot;
        k += 1;
    }
}

/// One shot of the sublinear problem at spectral value `lam`.
pub fn shoot_classical(lam: f64, slope: f64, params: &Params) -> Result<Shot> {
    let at = params.with_lambda(lam)?;
    let field = super::field(&at);
    shoot_field(&field, slope, 0.5 * at.length(), SHOT_TOL)
}

/// The slope of the classical positive solution at `lam`, found without
/// the time map.
pub fn solve_classical_by_shooting(lam: f64, params: &Params) -> Result<Shot> {
    let at = params.with_lambda(lam)?;
    let scale = at.equilibria().velocity_scale();
    first_root(
        |s| shoot_classical(lam, s, &at),
        CLASSICAL_SCAN.0 * scale,
        CLASSICAL_SCAN.1 * scale,
        SCAN_PER_DECADE,
        1e-12,
    )?
    .ok_or(Error::NoBracket { lambda: lam })
}

/// Endpoints of the set of `λ` with a positive shooting root, located by
/// bisection to `rel_tol` from brackets `[σ₁/4, λ_in]` and `[λ_in, 4Σ₁]`,
/// `λ_in = √(σ₁Σ₁)`.
pub fn classical_window_by_shooting(params: &Params, rel_tol: f64) -> Result<(f64, f64)> {
    let eq = params.equilibria();
    let (s1, big) = (eq.sigma(1), eq.big_sigma(1));
    let exists = |lam: f64| -> Result<bool> {
        match solve_classical_by_shooting(lam, params) {
            Ok(_) => Ok(true),
            Err(Error::NoBracket { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    let inside = (s1 * big).sqrt();
    if !exists(inside)? {
        return Err(Error::NoBracket { lambda: inside });
    }
    let edge = |mut yes: f64, mut no: f64| -> Result<f64> {
        while (yes - no).abs() > rel_tol * yes.min(no) {
            let mid = (yes * no).sqrt();
            if exists(mid)? {
                yes = mid;
            } else {
                no = mid;
            }
        }
        Ok((yes * no).sqrt())
    };
    let lower = edge(inside, 0.25 * s1)?;
    let upper = edge(inside, 4.0 * big)?;
    Ok((lower, upper))
}
