//! The classical positive solution, sampled by inverting
//!
//! ```text
//! x(θ) = (1/√λ) ∫₀^θ cos φ / √D(sin φ) dφ,   u = c·sin θ,
//! D(s) = η(1 - s^{p+1}) + s^{p+1}(1 - s^{1-p}),
//! ```
//!
//! on the left half and reflecting. `θ = π/2` is the peak `x = L/2`.

use std::f64::consts::FRAC_PI_2;

use super::{Profile, ProfileKind, Segment};
use crate::error::{Error, Result};
use crate::model::Params;
use crate::timemap::{invert_amplitude, quad_endpoint_singular, Amplitude};

const PANEL_TOL: f64 = 1e-15;
const MAX_NEWTON: usize = 200;

/// `u_λ` on `n` uniform nodes (plus the midpoint), for `σ₁ < lam < Σ₁(p)`.
pub fn classical(lam: f64, params: &Params, n: usize) -> Result<Profile> {
    let amp = invert_amplitude(lam, params)?;
    let at = params.with_lambda(lam)?;
    let length = at.length();
    let segments = vec![Segment::Arc {
        lo: 0.0,
        hi: length,
        peak: 0.5 * length,
    }];
    Profile::assemble(
        at,
        ProfileKind::Classical,
        segments,
        (0.0, length),
        n,
        &[0.5 * length],
        |nodes| classical_values(&amp, &at, nodes),
    )
}

/// Values and slopes of the symmetric positive arc of amplitude `amp` on
/// `[0, L]`, at the given nodes.
pub fn classical_values(
    amp: &Amplitude,
    params: &Params,
    nodes: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let length = params.length();
    let half = 0.5 * length;
    let mut order: Vec<(f64, usize)> = nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| ((if x <= half { x } else { length - x }).clamp(0.0, half), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let arc = Arc::new(amp, params);
    let mut values = vec![0.0; nodes.len()];
    let mut slopes = vec![0.0; nodes.len()];
    let mut cursor = (0.0, 0.0);
    let mut last: Option<(f64, f64, f64)> = None;
    for &(q, i) in &order {
        let (u, v) = match last {
            Some((lq, lu, lv)) if lq == q => (lu, lv),
            _ => {
                let theta = if q >= half {
                    FRAC_PI_2
                } else {
                    arc.solve(q, &mut cursor)?
                };
                let (u, v) = arc.state(theta);
                last = Some((q, u, v));
                (u, v)
            }
        };
        values[i] = u;
        slopes[i] = if nodes[i] > half {
            -v
        } else if nodes[i] == half {
            0.0
        } else {
            v
        };
    }
    Ok((values, slopes))
}

struct Arc {
    c: f64,
    eta: f64,
    p: f64,
    sqrt_lambda: f64,
    x_scale: f64,
}

impl Arc {
    fn new(amp: &Amplitude, params: &Params) -> Self {
        Arc {
            c: amp.c,
            eta: amp.eta,
            p: params.p(),
            sqrt_lambda: params.lambda().sqrt(),
            x_scale: params.length().max(1.0),
        }
    }

    /// `D(sin φ)` from `φ` and `ψ = π/2 - φ`.
    fn d(&self, phi: f64, psi: f64) -> f64 {
        let s = phi.sin();
        let one_minus_s = 2.0 * (0.5 * psi).sin().powi(2);
        let ln_s = if s < 0.5 {
            s.ln()
        } else {
            (-one_minus_s).ln_1p()
        };
        let a = -((self.p + 1.0) * ln_s).exp_m1();
        let b = -((1.0 - self.p) * ln_s).exp_m1();
        self.eta * a + ((self.p + 1.0) * ln_s).exp() * b
    }

    /// `dx/dφ`.
    fn rate(&self, phi: f64, psi: f64) -> f64 {
        let d = self.d(phi, psi);
        if d > 0.0 {
            psi.sin() / (self.sqrt_lambda * d.sqrt())
        } else {
            0.0
        }
    }

    fn panel(&self, lo: f64, hi: f64) -> Result<f64> {
        let psi_hi = FRAC_PI_2 - hi;
        quad_endpoint_singular(
            |n| self.rate(n.x, psi_hi + n.to_hi),
            lo,
            hi,
            PANEL_TOL * self.x_scale,
        )
    }

    /// `(u, u')` at angle `θ` on the rising half.
    fn state(&self, theta: f64) -> (f64, f64) {
        let psi = FRAC_PI_2 - theta;
        let u = self.c * theta.sin();
        let v = self.sqrt_lambda * self.c * self.d(theta, psi).max(0.0).sqrt();
        (u, v)
    }

    /// Angle at position `target`, continuing from `cursor = (θ, x(θ))`.
    fn solve(&self, target: f64, cursor: &mut (f64, f64)) -> Result<f64> {
        let (phi0, x0) = *cursor;
        if target <= x0 {
            return Ok(phi0);
        }
        let tol = 1e-14 * self.x_scale;
        let (mut lo, mut hi) = (phi0, FRAC_PI_2);
        let mut phi =
            (phi0 + (target - x0) / self.rate(phi0, FRAC_PI_2 - phi0)).min(0.5 * (phi0 + hi));
        if !(phi > lo) {
            phi = 0.5 * (lo + hi);
        }
        let mut prev_r = f64::INFINITY;
        let mut x_at = x0;
        for _ in 0..MAX_NEWTON {
            x_at = x0 + self.panel(phi0, phi)?;
            let r = x_at - target;
            if r.abs() <= tol {
                break;
            }
            if r > 0.0 {
                hi = phi;
            } else {
                lo = phi;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
            let newton = phi - r / self.rate(phi, FRAC_PI_2 - phi);
            phi = if newton > lo && newton < hi && r.abs() < 0.5 * prev_r.abs() {
                newton
            } else {
                0.5 * (lo + hi)
            };
            prev_r = r;
        }
        if !x_at.is_finite() {
            return Err(Error::NonFinite { x: target });
        }
        *cursor = (phi, x_at);
        Ok(phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timemap::invert_c;
    use std::f64::consts::PI;

    fn base() -> Params {
        Params::new(4.0, 1.0, 0.5, PI).unwrap()
    }

    #[test]
    fn peak_and_symmetry() {
        let p = base();
        let prof = classical(4.0, &p, 1025).unwrap();
        let c = invert_c(4.0, &p).unwrap();
        let mid = prof.grid.nodes.iter().position(|&x| x == 0.5 * PI).unwrap();
        assert!((prof.grid.values[mid] - c).abs() <= 1e-8 * c);
        assert!((prof.sup_norm() - c).abs() <= 1e-8 * c);
        let n = prof.cells();
        for k in 0..=n {
            let a = prof.grid.values[prof.uniform[k]];
            let b = prof.grid.values[prof.uniform[n - k]];
            assert!((a - b).abs() < 1e-12 * c);
        }
        assert_eq!(prof.grid.values[0], 0.0);
        assert!(prof.grid.slopes[0] > 0.0);
        assert!(*prof.grid.slopes.last().unwrap() < 0.0);
        assert!(prof.grid.values[1..prof.grid.values.len() - 1]
            .iter()
            .all(|&u| u > 0.0));
    }

    #[test]
    fn energy_is_constant_along_samples() {
        let p = base();
        let prof = classical(9.0, &p, 513).unwrap();
        let at = p.with_lambda(9.0).unwrap();
        let e0 = at.energy(prof.sup_norm(), 0.0);
        for (&u, &v) in prof.grid.values.iter().zip(&prof.grid.slopes) {
            assert!((at.energy(u, v) - e0).abs() < 1e-10 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn near_top_of_window() {
        let p = base();
        let prof = classical(15.9, &p, 1025).unwrap();
        let u_h = p.with_lambda(15.9).unwrap().equilibria().u_h;
        assert!(prof.sup_norm() > u_h);
        assert!(prof.grid.values[1..prof.grid.values.len() - 1]
            .iter()
            .all(|&u| u > 0.0));
    }

    #[test]
    fn blows_up_towards_sigma_one() {
        let p = base();
        let mut last = 0.0;
        for lam in [2.0, 1.2, 1.02, 1.002] {
            let s = classical(lam, &p, 257).unwrap().sup_norm();
            assert!(s > last);
            last = s;
        }
        assert!(last > 1e3);
    }

    #[test]
    fn outside_window() {
        let p = base();
        assert!(matches!(
            classical(0.5, &p, 65),
            Err(Error::LambdaOutsideWindow { .. })
        ));
        assert!(matches!(
            classical(16.5, &p, 65),
            Err(Error::LambdaOutsideWindow { .. })
        ));
    }
}
