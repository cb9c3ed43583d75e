//! Problem data for `-u'' = λu - a|u|^{p-1}u` on `[0, L]` with Dirichlet ends.
//!
//! Phase-plane quantities of the first-order system `u' = v, v' = -g(u)`:
//! the force `g`, its potential `G`, the energy `E = v²/2 + G(u)`, the
//! equilibria and the degenerate homoclinic loop through the origin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible exponent. The power `1/(1-p)` is numerically useless
/// beyond this point.
pub const MAX_EXPONENT: f64 = 1.0 - 1e-6;

/// Validated problem quadruple `(λ, a, p, L)`.
///
/// The derived constants are computed once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    lambda: f64,
    a: f64,
    p: f64,
    length: f64,
    eq: Equilibria,
}

/// Unvalidated wire form of [`Params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub lambda: f64,
    pub a: f64,
    pub p: f64,
    #[serde(rename = "L")]
    pub length: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.lambda, raw.a, raw.p, raw.length)
    }
}

impl From<Params> for RawParams {
    fn from(p: Params) -> Self {
        RawParams {
            lambda: p.lambda,
            a: p.a,
            p: p.p,
            length: p.length,
        }
    }
}

/// Checks the four raw numbers and builds [`Params`].
pub fn validate(lambda: f64, a: f64, p: f64, length: f64) -> Result<Params> {
    Params::new(lambda, a, p, length)
}

impl Params {
    pub fn new(lambda: f64, a: f64, p: f64, length: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::NonPositiveLambda(lambda));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::NonPositiveWeight(a));
        }
        if !(p.is_finite() && p > 0.0 && p <= MAX_EXPONENT) {
            return Err(Error::ExponentOutOfRange(p));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::NonPositiveLength(length));
        }
        let eq = Equilibria::compute(lambda, a, p, length);
        Ok(Params {
            lambda,
            a,
            p,
            length,
            eq,
        })
    }

    /// Same `(a, p, L)` at another value of the spectral parameter.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Params::new(lambda, self.a, self.p, self.length)
    }

    /// Same `(λ, a, p)` on another interval.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Params::new(self.lambda, self.a, self.p, length)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn equilibria(&self) -> &Equilibria {
        &self.eq
    }

    pub fn force(&self, u: f64) -> f64 {
        force(u, self)
    }
    pub fn potential(&self, u: f64) -> f64 {
        potential(u, self)
    }
    pub fn energy(&self, u: f64, v: f64) -> f64 {
        energy(u, v, self)
    }
}

/// Constants attached to one [`Params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibria {
    /// Abscissa of the positive centre `P₀⁺`.
    pub u0_plus: f64,
    /// Maximum of the homoclinic loop `𝒪⁺`, where it crosses the u-axis.
    pub u_h: f64,
    /// `λ`-free factor: `u_H = λ^{-1/(1-p)} w_H`.
    pub w_h: f64,
    /// Half the time needed to run through the homoclinic loop.
    pub t_h: f64,
    p: f64,
    length: f64,
}

impl Equilibria {
    fn compute(lambda: f64, a: f64, p: f64, length: f64) -> Self {
        let q = 1.0 / (1.0 - p);
        Equilibria {
            u0_plus: ((a / lambda).ln() * q).exp(),
            u_h: ((2.0 * a / (lambda * (p + 1.0))).ln() * q).exp(),
            w_h: ((2.0 * a / (p + 1.0)).ln() * q).exp(),
            t_h: extinction_time(lambda, p),
            p,
            length,
        }
    }

    /// `σ_j = (jπ/L)²`, the j-th Dirichlet eigenvalue of `-d²/dx²`.
    pub fn sigma(&self, j: u32) -> f64 {
        dirichlet_eigenvalue(j, self.length)
    }

    /// `Σ_j(p) = (2/(1-p))² σ_j`: `j` homoclinic bumps fit iff `λ ≥ Σ_j`.
    pub fn big_sigma(&self, j: u32) -> f64 {
        bump_threshold(j, self.p, self.length)
    }

    /// Scale of `u'` along the homoclinic loop, used to non-dimensionalise.
    pub fn velocity_scale(&self) -> f64 {
        self.u_h / self.t_h
    }
}

/// `T_H(λ) = π / (√λ (1-p))`.
pub fn extinction_time(lambda: f64, p: f64) -> f64 {
    PI / (lambda.sqrt() * (1.0 - p))
}

pub fn dirichlet_eigenvalue(j: u32, length: f64) -> f64 {
    let k = j as f64 * PI / length;
    k * k
}

pub fn bump_threshold(j: u32, p: f64, length: f64) -> f64 {
    let f = 2.0 / (1.0 - p);
    f * f * dirichlet_eigenvalue(j, length)
}

/// `u_H(λ) = (2a / (λ(p+1)))^{1/(1-p)}`.
pub fn homoclinic_amplitude(lambda: f64, a: f64, p: f64) -> f64 {
    ((2.0 * a / (lambda * (p + 1.0))).ln() / (1.0 - p)).exp()
}

/// `sign(u)|u|^p`, the odd power with value 0 at the origin.
#[inline]
pub fn odd_power(u: f64, p: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u.signum() * u.abs().powf(p)
    }
}

/// `g(u) = λu - a|u|^{p-1}u`.
pub fn force(u: f64, params: &Params) -> f64 {
    params.lambda * u - params.a * odd_power(u, params.p)
}

/// `G(u) = λu²/2 - a|u|^{p+1}/(p+1)`.
pub fn potential(u: f64, params: &Params) -> f64 {
    let p = params.p;
    0.5 * params.lambda * u * u - params.a * u.abs().powf(p + 1.0) / (p + 1.0)
}

pub fn energy(u: f64, v: f64, params: &Params) -> f64 {
    0.5 * v * v + potential(u, params)
}

/// A phase-plane point together with its energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPoint {
    pub u: f64,
    pub v: f64,
    pub e: f64,
}

impl EnergyPoint {
    pub fn new(u: f64, v: f64, params: &Params) -> Self {
        EnergyPoint {
            u,
            v,
            e: energy(u, v, params),
        }
    }
}

pub fn equilibria(params: &Params) -> Equilibria {
    params.eq
}

/// Phase `θ = (1-p)√λ x / 2` of the homoclinic profile; `|θ| = π/2` at `±T_H`.
#[inline]
fn homoclinic_phase(x: f64, params: &Params) -> f64 {
    0.5 * (1.0 - params.p) * params.lambda.sqrt() * x
}

/// `û_λ(x)`: the homoclinic solution with maximum `u_H` at `x = 0`,
/// extended by zero outside `[-T_H, T_H]`.
///
/// Evaluated as `u_H cos^{2/(1-p)}(θ)`, which equals the `tan²` form
/// without its overflow near `±T_H`.
pub fn homoclinic_value(x: f64, params: &Params) -> f64 {
    let eq = &params.eq;
    if x.abs() >= eq.t_h {
        return 0.0;
    }
    let c = homoclinic_phase(x, params).cos().max(0.0);
    eq.u_h * c.powf(2.0 / (1.0 - params.p))
}

/// `û_λ'(x) = -u_H √λ cos^{(1+p)/(1-p)}(θ) sin θ`, zero outside `(-T_H, T_H)`.
pub fn homoclinic_slope(x: f64, params: &Params) -> f64 {
    let eq = &params.eq;
    if x.abs() >= eq.t_h {
        return 0.0;
    }
    let theta = homoclinic_phase(x, params);
    let c = theta.cos().max(0.0);
    -eq.u_h * params.lambda.sqrt() * c.powf((1.0 + params.p) / (1.0 - params.p)) * theta.sin()
}

/// The closed form exactly as derived from the quadrature of the loop:
/// `(2a / (λ(p+1)(1 + tan²θ)))^{1/(1-p)}`. Kept as a cross-check for
/// [`homoclinic_value`].
pub fn homoclinic_value_tan_form(x: f64, params: &Params) -> f64 {
    if x.abs() >= params.eq.t_h {
        return 0.0;
    }
    let t = homoclinic_phase(x, params).tan();
    let base = 2.0 * params.a / (params.lambda * (params.p + 1.0) * (1.0 + t * t));
    base.powf(1.0 / (1.0 - params.p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_params() -> Params {
        Params::new(1.0, 2.0, 0.5, 6.0 * PI).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn validate_accepts_and_rejects() {
        assert!(validate(1.0, 2.0, 0.5, 6.0 * PI).is_ok());
        assert_eq!(
            validate(1.0, 2.0, 1.0, 1.0),
            Err(Error::ExponentOutOfRange(1.0))
        );
        assert_eq!(
            validate(0.0, 1.0, 0.5, 1.0),
            Err(Error::NonPositiveLambda(0.0))
        );
        assert_eq!(
            validate(1.0, 1.0, 0.0, 1.0),
            Err(Error::ExponentOutOfRange(0.0))
        );
        assert_eq!(
            validate(1.0, -1.0, 0.5, 1.0),
            Err(Error::NonPositiveWeight(-1.0))
        );
        assert_eq!(
            validate(1.0, 1.0, 0.5, 0.0),
            Err(Error::NonPositiveLength(0.0))
        );
        assert!(matches!(
            validate(1.0, 1.0, 1.0 - 1e-7, 1.0),
            Err(Error::ExponentOutOfRange(_))
        ));
        assert!(validate(f64::NAN, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn force_examples() {
        let p = fig_params();
        assert_eq!(force(0.0, &p), 0.0);
        assert!(close(force(4.0, &p), 0.0, 1e-15));
        assert!(close(force(1.0, &p), -1.0, 1e-15));
        assert!(close(force(-1.0, &p), 1.0, 1e-15));
    }

    #[test]
    fn potential_examples() {
        let p = fig_params();
        assert_eq!(potential(0.0, &p), 0.0);
        assert!(potential(64.0 / 9.0, &p).abs() < 1e-13);
        assert!(close(potential(4.0, &p), -8.0 / 3.0, 1e-14));
    }

    #[test]
    fn energy_examples() {
        let p = fig_params();
        assert_eq!(energy(0.0, 0.0, &p), 0.0);
        assert_eq!(energy(0.0, 1.0, &p), 0.5);
        let u_h = p.equilibria().u_h;
        assert!(energy(u_h, 0.0, &p).abs() < 1e-13);
        let pt = EnergyPoint::new(1.0, 2.0, &p);
        assert_eq!(pt.e, energy(1.0, 2.0, &p));
    }

    #[test]
    fn equilibria_closed_forms() {
        let eq = *fig_params().equilibria();
        assert!(close(eq.u_h, 64.0 / 9.0, 1e-14));
        assert!(close(eq.u0_plus, 4.0, 1e-14));
        assert!(close(eq.t_h, 2.0 * PI, 1e-15));
        let eq1 = *Params::new(1.0, 1.0, 0.5, 1.0).unwrap().equilibria();
        assert!(close(eq1.u_h, 16.0 / 9.0, 1e-14));
        assert!(eq.u_h > eq.u0_plus);
        for j in 1..6 {
            assert!(close(eq.big_sigma(j) / eq.sigma(j), 16.0, 1e-14));
        }
    }

    #[test]
    fn homoclinic_examples() {
        let p = fig_params();
        let eq = *p.equilibria();
        assert!(close(homoclinic_value(0.0, &p), eq.u_h, 1e-15));
        assert_eq!(homoclinic_value(eq.t_h, &p), 0.0);
        assert_eq!(homoclinic_value(-eq.t_h, &p), 0.0);
        assert!(close(homoclinic_value(PI, &p), 16.0 / 9.0, 1e-14));
        assert_eq!(homoclinic_slope(eq.t_h, &p), 0.0);
        assert_eq!(homoclinic_slope(0.0, &p), 0.0);
        assert!(homoclinic_value(1.5 * eq.t_h, &p) == 0.0);
    }

    #[test]
    fn homoclinic_slope_matches_finite_difference() {
        let p = Params::new(2.3, 0.7, 0.35, 1.0).unwrap();
        let t_h = p.equilibria().t_h;
        for k in 1..40 {
            let x = -0.98 * t_h + k as f64 * 0.049 * t_h;
            let h = 1e-6 * t_h;
            let fd = (homoclinic_value(x + h, &p) - homoclinic_value(x - h, &p)) / (2.0 * h);
            let exact = homoclinic_slope(x, &p);
            assert!(
                (fd - exact).abs() <= 1e-7 * p.equilibria().velocity_scale(),
                "x={x}"
            );
        }
    }

    #[test]
    fn both_closed_forms_agree() {
        for &(lambda, a, pp) in &[(1.0, 2.0, 0.5), (3.7, 0.4, 0.2), (0.3, 5.0, 0.85)] {
            let p = Params::new(lambda, a, pp, 1.0).unwrap();
            let t_h = p.equilibria().t_h;
            for k in 0..=200 {
                let x = -0.999 * t_h + k as f64 * (1.998 * t_h / 200.0);
                let a1 = homoclinic_value(x, &p);
                let a2 = homoclinic_value_tan_form(x, &p);
                assert!(
                    (a1 - a2).abs() <= 1e-12 * p.equilibria().u_h,
                    "{a1} vs {a2}"
                );
            }
        }
    }
}
