use serde::{Deserialize, Serialize};

use super::FIT_TOL;
use crate::error::{Error, Result};
use crate::model::Params;

/// Bump centres `x₁ < … < x_j` with their gap slacks `δ₁ … δ_{j+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpLayout {
    pub centers: Vec<f64>,
    pub slacks: Vec<f64>,
    pub lambda: f64,
    pub t_h: f64,
    pub length: f64,
}

impl BumpLayout {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// `L - 2jT_H`, the total slack shared by the gaps.
    pub fn free_length(&self) -> f64 {
        self.length - 2.0 * self.centers.len() as f64 * self.t_h
    }

    /// Euclidean diameter of the slack simplex `{δ ≥ 0, Σδ = L - 2jT_H}`.
    pub fn polytope_diameter(&self) -> f64 {
        if self.centers.is_empty() {
            0.0
        } else {
            std::f64::consts::SQRT_2 * self.free_length().max(0.0)
        }
    }
}

/// Computes the slacks of `centers` at `lam` and checks that every copy fits.
///
/// Slacks that are negative only by rounding (`|δ| ≤ 1e-12·L`) are clamped
/// to zero, so that touching bumps such as `{T_H, 3T_H}` on `L = 4T_H` are
/// accepted.
pub fn layout(centers: &[f64], lam: f64, params: &Params) -> Result<BumpLayout> {
    let at = params.with_lambda(lam)?;
    let t_h = at.equilibria().t_h;
    let length = at.length();
    if centers.is_empty()
        || centers.iter().any(|&x| !(x > 0.0 && x < length))
        || centers.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(Error::InvalidCenters);
    }
    let j = centers.len();
    let mut slacks = Vec::with_capacity(j + 1);
    slacks.push(centers[0] - t_h);
    for w in centers.windows(2) {
        slacks.push(w[1] - w[0] - 2.0 * t_h);
    }
    slacks.push(length - centers[j - 1] - t_h);

    let eps = FIT_TOL * length;
    for (i, d) in slacks.iter_mut().enumerate() {
        if *d < -eps {
            return Err(Error::Overlap {
                index: i + 1,
                slack: *d,
            });
        }
        if *d < 0.0 {
            *d = 0.0;
        }
    }
    Ok(BumpLayout {
        centers: centers.to_vec(),
        slacks,
        lambda: lam,
        t_h,
        length,
    })
}
