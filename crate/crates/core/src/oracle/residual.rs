//! Central-difference residual of a sampled profile on nested uniform grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::odd_power;
use crate::profiles::{Profile, ProfileKind, Segment};
use crate::regularized::g_eps;

/// Maximum residual per level and the order observed under refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Max residual over all interior nodes of the finest level.
    pub max_residual: f64,
    /// Spacing of the finest level.
    pub grid_h: f64,
    /// `log₂` of the fitted maxima ratio per halving, averaged over the
    /// whole refinement (NaN when the residual vanishes identically).
    pub observed_order: f64,
    /// `log₂(m_{k+1}/m_k)` for successive levels, finest first.
    pub orders: Vec<f64>,
    /// Maxima over the nodes used for the fit, finest first.
    pub fit_maxima: Vec<f64>,
    /// Fit maxima below this are round-off and count as an exact solution.
    pub floor: f64,
}

impl ResidualReport {
    /// Order within `2 ± tol`, or residual at round-off level.
    pub fn passes(&self, tol: f64) -> bool {
        self.is_exact() || (self.observed_order - 2.0).abs() <= tol
    }

    pub fn is_exact(&self) -> bool {
        self.fit_maxima.iter().all(|&m| m <= self.floor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualOptions {
    pub levels: usize,
    /// Target spacing of the finest level as a fraction of the profile's
    /// length scale (`T_H` for bumps, the half-width for arcs).
    pub finest: f64,
    /// Width of the layer next to arc endpoints left out of the fit, as a
    /// fraction of the arc length. `|u|^p` makes `u''''` blow up there (and
    /// `g_ε` puts a layer of width `O(ε/u'(0))` there).
    pub arc_layer: f64,
    /// Leave out nodes within one coarse cell of bump edges.
    pub exclude_junctions: bool,
}

impl ResidualOptions {
    pub fn for_profile(prof: &Profile, levels: usize) -> Self {
        ResidualOptions {
            levels,
            finest: 1.0 / 64.0,
            arc_layer: 0.25,
            exclude_junctions: matches!(prof.kind, ProfileKind::Chaotic { .. }),
        }
    }
}

/// [`residual_with`] at the default options for the profile's kind.
pub fn residual(prof: &Profile, levels: usize) -> Result<ResidualReport> {
    residual_with(prof, &ResidualOptions::for_profile(prof, levels))
}

/// Residual `-D²u - λu + a·|u|^{p-1}u` (or `+ a·g_ε(u)u` for regularised
/// profiles) on uniform sub-grids of strides `s, 2s, …, 2^{levels-1}s`.
pub fn residual_with(prof: &Profile, opts: &ResidualOptions) -> Result<ResidualReport> {
    let levels = opts.levels.max(2);
    let params = &prof.params;
    let (lam, a, p) = (params.lambda(), params.a(), params.p());
    let eps = match prof.kind {
        ProfileKind::Regularized { eps } => Some(eps),
        _ => None,
    };
    let t_h = params.equilibria().t_h;
    let scale = match prof.kind {
        ProfileKind::Classical | ProfileKind::Regularized { .. } => {
            0.5 * (prof.domain.1 - prof.domain.0)
        }
        _ => t_h,
    };
    let cells = prof.cells();
    let h0 = prof.spacing();
    let mut stride = 1usize;
    while 2.0 * stride as f64 * h0 <= opts.finest * scale {
        stride *= 2;
    }
    let coarsest = stride << (levels - 1);
    if !cells.is_multiple_of(coarsest) || cells / coarsest < 8 {
        return Err(Error::GridTooCoarse { levels });
    }

    let coarse_h = coarsest as f64 * h0;
    let mut excluded: Vec<(f64, f64)> = Vec::new();
    for seg in &prof.segments {
        match *seg {
            Segment::Arc { lo, hi, .. } => {
                let w = opts.arc_layer * (hi - lo);
                excluded.push((lo, lo + w));
                excluded.push((hi - w, hi));
            }
            Segment::Bump { center, .. } if opts.exclude_junctions => {
                for edge in [center - t_h, center + t_h] {
                    excluded.push((edge - coarse_h, edge + coarse_h));
                }
            }
            _ => {}
        }
    }
    let in_fit = |x: f64| {
        !excluded
            .iter()
            .any(|&(l, r)| x >= l - 1e-12 * coarse_h && x <= r + 1e-12 * coarse_h)
    };

    let u_scale = prof.sup_norm();
    let forcing = |u: f64| match eps {
        Some(e) => a * g_eps(u, e, p) * u,
        None => a * odd_power(u, p),
    };

    let mut all_max = 0.0;
    let mut fit_maxima = Vec::with_capacity(levels);
    let mut floor = 0.0;
    for level in 0..levels {
        let s = stride << level;
        let h = s as f64 * h0;
        let mut m_all: f64 = 0.0;
        let mut m_fit: f64 = 0.0;
        for k in (s..cells).step_by(s) {
            let (xl, xm, xr) = (prof.uniform[k - s], prof.uniform[k], prof.uniform[k + s]);
            let v = &prof.grid.values;
            let (ul, um, ur) = (v[xl], v[xm], v[xr]);
            let r = -(ur - 2.0 * um + ul) / (h * h) - lam * um + forcing(um);
            if !r.is_finite() {
                return Err(Error::NonFinite {
                    x: prof.grid.nodes[xm],
                });
            }
            m_all = m_all.max(r.abs());
            if in_fit(prof.grid.nodes[xm]) {
                m_fit = m_fit.max(r.abs());
            }
        }
        if level == 0 {
            all_max = m_all;
            floor = 1e3 * f64::EPSILON * u_scale / (h * h);
        }
        fit_maxima.push(m_fit);
    }
    let orders: Vec<f64> = fit_maxima
        .windows(2)
        .map(|w| (w[1] / w[0]).log2())
        .collect();
    let observed_order = (fit_maxima[levels - 1] / fit_maxima[0]).log2() / (levels - 1) as f64;
    Ok(ResidualReport {
        max_residual: all_max,
        grid_h: stride as f64 * h0,
        observed_order: if observed_order.is_finite() {
            observed_order
        } else {
            f64::NAN
        },
        orders,
        fit_maxima,
        floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Params;
    use crate::profiles::{classical, degenerate_single, layout, multibump, signed_multibump};
    use std::f64::consts::PI;

    fn fig7() -> Params {
        Params::new(1.0, 2.0, 0.5, 6.0 * PI).unwrap()
    }

    #[test]
    fn zero_profile_has_zero_residual() {
        let p = fig7();
        let mut prof = degenerate_single(1.0, 3.0 * PI, &p, 4097).unwrap();
        prof.grid.values.iter_mut().for_each(|u| *u = 0.0);
        let r = residual(&prof, 3).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert!(r.is_exact() && r.passes(0.2));
    }

    #[test]
    fn degenerate_single_is_second_order() {
        let p = fig7();
        let prof = degenerate_single(1.0, 3.0 * PI, &p, 4097).unwrap();
        let r = residual(&prof, 3).unwrap();
        assert!((r.observed_order - 2.0).abs() <= 0.2, "{r:?}");
    }

    #[test]
    fn corrupted_node_is_detected() {
        let p = fig7();
        let mut prof = degenerate_single(1.0, 3.0 * PI, &p, 4097).unwrap();
        let r0 = residual(&prof, 3).unwrap();
        let k = prof.uniform[2048];
        prof.grid.values[k] += 1e-3;
        let r = residual(&prof, 3).unwrap();
        assert!(
            r.max_residual >= 1e-3 / (r.grid_h * r.grid_h) * 0.99,
            "{r:?} {r0:?}"
        );
    }

    #[test]
    fn classical_and_multibump_orders() {
        let p = Params::new(4.0, 1.0, 0.5, PI).unwrap();
        let c = classical(4.0, &p, 4097).unwrap();
        let rc = residual(&c, 3).unwrap();
        assert!((rc.observed_order - 2.0).abs() <= 0.2, "{rc:?}");

        let lam = 16.0 * 4.0 * 1.2;
        let t_h = p.with_lambda(lam).unwrap().equilibria().t_h;
        let lay = layout(&[t_h * 1.1, PI - t_h * 1.1], lam, &p).unwrap();
        for prof in [
            multibump(&lay, &p, 4097).unwrap(),
            signed_multibump(&lay, &[1, -1], &p, 4097).unwrap(),
        ] {
            let r = residual(&prof, 3).unwrap();
            assert!((r.observed_order - 2.0).abs() <= 0.2, "{r:?}");
        }
    }

    #[test]
    fn too_coarse() {
        let p = fig7();
        let prof = degenerate_single(1.0, 3.0 * PI, &p, 17).unwrap();
        assert!(matches!(
            residual(&prof, 3),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
