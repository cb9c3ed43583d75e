//! The time map `c ↦ T(c)` of the orbits through `(c, 0)`, `c > u_H`, and
//! its inverse `λ ↦ c(λ)` selecting the classical positive solution.
//!
//! All integrals are written in the normalised variable `s = u/c` and the
//! orbit is identified by its energy gap
//!
//! ```text
//! η = 1 - (u_H / c)^{1-p} ∈ (0, 1),
//! ```
//!
//! so that `√λ·T(c) = ∫₀¹ ds / √(η(1 - s^{p+1}) + s^{p+1}(1 - s^{1-p}))`.
//! Both terms under the root are non-negative, which keeps the integrand
//! free of cancellation all the way down to `η → 0` (the homoclinic loop,
//! `T → T_H`) and up to `η → 1` (`c → ∞`, `T → π/(2√λ)`).

pub mod quad;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{extinction_time, Params};
pub use quad::{quad_endpoint_singular, quad_fn, Node, DEFAULT_TOL};

/// Bisection budget for [`invert_c`].
pub const INVERSION_ITERATIONS: usize = 60;

/// `c` together with its half positivity interval `T(c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMapSample {
    pub c: f64,
    pub t: f64,
}

/// A value `Ψ(ξ)` of the bifurcation map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiSample {
    pub xi: f64,
    pub lam: f64,
}

/// Amplitude `c ≥ u_H` stored with its energy gap `η`, which carries the
/// information that `c` itself loses to rounding when `c ≈ u_H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub c: f64,
    pub eta: f64,
}

impl Amplitude {
    /// From the value `c`; requires `c > u_H`.
    pub fn from_value(c: f64, params: &Params) -> Result<Self> {
        let u_h = params.equilibria().u_h;
        if !(c > u_h) {
            return Err(Error::AmplitudeBelowHomoclinic { c, u_h });
        }
        let rho = (c - u_h) / u_h;
        let eta = -(-(1.0 - params.p()) * rho.ln_1p()).exp_m1();
        Ok(Amplitude { c, eta })
    }

    /// The homoclinic loop itself (`c = u_H`, `η = 0`).
    pub fn homoclinic(params: &Params) -> Self {
        Amplitude {
            c: params.equilibria().u_h,
            eta: 0.0,
        }
    }

    /// From the logit `z` of `η`, so that both `η` and `1 - η` are exact.
    fn from_logit(z: f64, params: &Params) -> Self {
        let eta = 1.0 / (1.0 + (-z).exp());
        // ln(1 - η) = -ln(1 + e^z)
        let ln_kappa = -softplus(z);
        let c = params.equilibria().u_h * (-ln_kappa / (1.0 - params.p())).exp();
        Amplitude { c, eta }
    }

    /// `ξ = u_H / c`.
    pub fn ratio(&self, params: &Params) -> f64 {
        params.equilibria().u_h / self.c
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Dimensionless time `√λ·T` of the orbit with energy gap `eta ∈ [0, 1]`.
///
/// `eta = 0` is the homoclinic loop and returns the closed form `π/(1-p)`
/// instead of integrating the degenerate integrand.
pub fn scaled_time(eta: f64, p: f64, tol: f64) -> Result<f64> {
    if eta <= 0.0 {
        return Ok(PI / (1.0 - p));
    }
    let eta = eta.min(1.0);
    quad_endpoint_singular(
        |n: Node| {
            let ln_s = if n.to_hi < 0.5 {
                (-n.to_hi).ln_1p()
            } else {
                n.x.ln()
            };
            let sp1 = ((p + 1.0) * ln_s).exp();
            let one_minus_sp1 = -((p + 1.0) * ln_s).exp_m1();
            let one_minus_s1mp = -((1.0 - p) * ln_s).exp_m1();
            let d = eta * one_minus_sp1 + sp1 * one_minus_s1mp;
            // d underflows only at nodes whose weight has underflowed too
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Which of the two algebraically equal singular integrands for `T_H` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtinctionForm {
    /// `s^{-(p+1)/2} (1 - s^{1-p})^{-1/2}`
    PowerRoot,
    /// `1 / (s √(s^{p-1} - 1))`
    Reciprocal,
}

/// `T_H(λ)` by quadrature, for checking against the closed form.
pub fn extinction_time_quadrature(
    lambda: f64,
    p: f64,
    form: ExtinctionForm,
    tol: f64,
) -> Result<f64> {
    let integral = match form {
        ExtinctionForm::PowerRoot => quad_endpoint_singular(
            |n: Node| {
                let ln_s = if n.to_hi < 0.5 {
                    (-n.to_hi).ln_1p()
                } else {
                    n.x.ln()
                };
                let one_minus = -((1.0 - p) * ln_s).exp_m1();
                (-0.5 * (p + 1.0) * ln_s).exp() / one_minus.sqrt()
            },
            0.0,
            1.0,
            tol,
        )?,
        ExtinctionForm::Reciprocal => quad_endpoint_singular(
            |n: Node| {
                let ln_s = if n.to_hi < 0.5 {
                    (-n.to_hi).ln_1p()
                } else {
                    n.x.ln()
                };
                1.0 / (n.x * ((p - 1.0) * ln_s).exp_m1().sqrt())
            },
            0.0,
            1.0,
            tol,
        )?,
    };
    Ok(integral / lambda.sqrt())
}

/// `T(c)` for `c > u_H`.
pub fn time_map(c: f64, params: &Params) -> Result<TimeMapSample> {
    let amp = Amplitude::from_value(c, params)?;
    Ok(TimeMapSample {
        c,
        t: time_map_amplitude(&amp, params)?,
    })
}

/// `T` for an [`Amplitude`]; the homoclinic amplitude gives `T_H`.
pub fn time_map_amplitude(amp: &Amplitude, params: &Params) -> Result<f64> {
    Ok(scaled_time(amp.eta, params.p(), DEFAULT_TOL)? / params.lambda().sqrt())
}

/// `Ψ(ξ) = (2/L)² (∫₀¹ ds / √((1-s²) - ξ^{1-p}(1-s^{p+1})))²`.
pub fn psi(xi: f64, p: f64, length: f64) -> Result<f64> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::RatioOutOfRange(xi));
    }
    let eta = -((1.0 - p) * xi.ln()).exp_m1();
    let i = scaled_time(eta, p, DEFAULT_TOL)?;
    Ok((2.0 * i / length).powi(2))
}

pub fn psi_sample(xi: f64, p: f64, length: f64) -> Result<PsiSample> {
    Ok(PsiSample {
        xi,
        lam: psi(xi, p, length)?,
    })
}

/// The open interval `(σ₁, Σ₁(p))` of classical positive solutions.
pub fn classical_window(params: &Params) -> (f64, f64) {
    let eq = params.equilibria();
    (eq.sigma(1), eq.big_sigma(1))
}

/// `c(λ)`, the unique amplitude with `T(c) = L/2` at spectral value `lam`.
pub fn invert_c(lam: f64, params: &Params) -> Result<f64> {
    Ok(invert_amplitude(lam, params)?.c)
}

/// [`invert_c`] keeping the exact energy gap.
///
/// Bisects on `z = logit(η)`; `√λ·T` is strictly decreasing in `η`, which is
/// equivalent to `Ψ` increasing in `ξ`.
pub fn invert_amplitude(lam: f64, params: &Params) -> Result<Amplitude> {
    let (lower, upper) = classical_window(params);
    if !(lam > lower && lam < upper) {
        return Err(Error::LambdaOutsideWindow {
            lambda: lam,
            lower,
            upper,
        });
    }
    let at = params.with_lambda(lam)?;
    let p = params.p();
    let target = lam.sqrt() * params.length() / 2.0;

    // √λ·T runs from π/(1-p) at z = -∞ to π/2 at z = +∞.
    let (mut lo, mut hi) = (-745.0_f64, 60.0_f64);
    for _ in 0..INVERSION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let eta = 1.0 / (1.0 + (-mid).exp());
        if scaled_time(eta, p, DEFAULT_TOL)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Amplitude::from_logit(0.5 * (lo + hi), &at))
}

/// Asymptotic lower bound `π/(2√λ)` of `T(c)` as `c → ∞`.
pub fn time_map_infimum(lambda: f64) -> f64 {
    FRAC_PI_2 / lambda.sqrt()
}

/// Supremum `T_H` of `T(c)`, attained in the limit `c ↓ u_H`.
pub fn time_map_supremum(params: &Params) -> f64 {
    extinction_time(params.lambda(), params.p())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Params {
        Params::new(1.0, 2.0, 0.5, 6.0 * PI).unwrap()
    }

    #[test]
    fn large_amplitude_limit() {
        let p = base();
        let u_h = p.equilibria().u_h;
        let s = time_map(1e6 * u_h, &p).unwrap();
        assert!((s.t - FRAC_PI_2).abs() < 1e-3);
        assert!(s.t > FRAC_PI_2);
    }

    // Reference values below come from mpmath quadrature at 30 digits.
    #[test]
    fn near_homoclinic_amplitude() {
        let p = base();
        let u_h = p.equilibria().u_h;
        let t = time_map(u_h * (1.0 + 1e-9), &p).unwrap().t;
        assert!((t - 6.185_974_312_986_433).abs() < 1e-8, "{t}");
        assert!(t < p.equilibria().t_h);
        // At p = 0.1 the approach to T_H is fast enough to see at 1e-9.
        let p01 = Params::new(1.0, 2.0, 0.1, 1.0).unwrap();
        let u_h = p01.equilibria().u_h;
        let t = time_map(u_h * (1.0 + 1e-9), &p01).unwrap().t;
        assert!((t - p01.equilibria().t_h).abs() < 1e-3, "{t}");
    }

    #[test]
    fn mpmath_reference_values() {
        let p = base();
        let u_h = p.equilibria().u_h;
        for &(r, expect) in &[
            (1e3, 1.591_948_879_532_177_6),
            (1e6, 1.571_452_255_355_234),
            (1.0 + 1e-6, 5.974_909_408_667_63),
            (1.001, 5.275_955_354_734_942),
        ] {
            let t = time_map(r * u_h, &p).unwrap().t;
            assert!((t - expect).abs() < 1e-9, "r={r}: {t} vs {expect}");
        }
    }

    #[test]
    fn amplitude_below_homoclinic_rejected() {
        let p = base();
        let u_h = p.equilibria().u_h;
        assert!(matches!(
            time_map(u_h, &p),
            Err(Error::AmplitudeBelowHomoclinic { .. })
        ));
        assert!(time_map(0.5 * u_h, &p).is_err());
        let h = Amplitude::homoclinic(&p);
        assert_eq!(time_map_amplitude(&h, &p).unwrap(), PI / 0.5);
    }

    #[test]
    fn psi_limits_and_order() {
        let (p, l) = (0.5, PI);
        assert!((psi(1e-12, p, l).unwrap() - 1.0).abs() < 1e-5);
        let top = psi(1.0 - 1e-15, p, l).unwrap();
        assert!(top < 16.0 && top > 15.0, "{top}");
        assert!(psi(0.3, p, l).unwrap() < psi(0.6, p, l).unwrap());
        assert!(matches!(psi(0.0, p, l), Err(Error::RatioOutOfRange(_))));
        assert!(matches!(psi(1.0, p, l), Err(Error::RatioOutOfRange(_))));
    }

    #[test]
    fn invert_near_window_edges() {
        let p = Params::new(1.0, 1.0, 0.5, PI).unwrap();
        let c_lo = invert_c(1.0001, &p).unwrap();
        let c_lo2 = invert_c(1.00001, &p).unwrap();
        let u_h_lo = p.with_lambda(1.0001).unwrap().equilibria().u_h;
        assert!(c_lo > 10.0 * u_h_lo);
        assert!(c_lo2 > c_lo);
        let lam = 16.0 * 0.9999;
        let c_hi = invert_c(lam, &p).unwrap();
        let u_h_sigma = p.with_lambda(16.0).unwrap().equilibria().u_h;
        assert!((c_hi - u_h_sigma).abs() <= 0.01 * u_h_sigma);
        assert!(matches!(
            invert_c(1.0, &p),
            Err(Error::LambdaOutsideWindow { .. })
        ));
        assert!(matches!(
            invert_c(16.0, &p),
            Err(Error::LambdaOutsideWindow { .. })
        ));
    }

    #[test]
    fn inversion_round_trip_mid_window() {
        let p = Params::new(1.0, 1.0, 0.5, PI).unwrap();
        let lam = 8.5;
        let amp = invert_amplitude(lam, &p).unwrap();
        let at = p.with_lambda(lam).unwrap();
        let t = time_map_amplitude(&amp, &at).unwrap();
        assert!((t - PI / 2.0).abs() <= 1e-10 * PI);
        let t2 = time_map(amp.c, &at).unwrap().t;
        assert!((t2 - PI / 2.0).abs() <= 1e-9);
        // Ψ(u_H/c) recovers λ.
        let psi_lam = psi(amp.ratio(&at), 0.5, PI).unwrap();
        assert!((psi_lam - lam).abs() <= 1e-9 * lam);
    }

    #[test]
    fn both_extinction_integrands_match_closed_form() {
        for &(lambda, p) in &[(1.0, 0.5), (0.25, 0.1), (16.0, 0.9), (3.0, 0.7)] {
            let exact = extinction_time(lambda, p);
            for form in [ExtinctionForm::PowerRoot, ExtinctionForm::Reciprocal] {
                let q = extinction_time_quadrature(lambda, p, form, 1e-12).unwrap();
                assert!(
                    (q - exact).abs() < 1e-10,
                    "{lambda} {p} {form:?}: {q} vs {exact}"
                );
            }
        }
    }
}
