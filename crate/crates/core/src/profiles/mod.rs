//! Explicit solution profiles of every non-negative family:
//! the classical positive solution, single degenerate bumps and their
//! shifts, multibump superpositions and signed concatenations.

mod classical;
mod layout;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{homoclinic_slope, homoclinic_value, Params};

pub use classical::{classical, classical_values};
pub use layout::{layout, BumpLayout};

/// Default number of uniform grid nodes.
pub const DEFAULT_GRID: usize = 4097;
/// Values at or below `BUMP_TOL · u_H` count as zero.
pub const BUMP_TOL: f64 = 1e-9;
/// Slack allowed for geometric constraints that hold with equality.
pub(crate) const FIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProfileKind {
    Classical,
    DegenerateSingle,
    Shifted,
    Multibump,
    SignedMultibump,
    /// Concatenation of `blocks` blocks of length `L`, the first with index `offset`.
    Chaotic {
        offset: i64,
        blocks: usize,
    },
    /// Positive solution of the `ε`-regularised equation.
    Regularized {
        eps: f64,
    },
}

/// One piece of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Segment {
    /// `sign · û_λ(x - center)` on `[center - T_H, center + T_H]`.
    Bump { center: f64, sign: i8 },
    /// Identically zero.
    Rest { lo: f64, hi: f64 },
    /// A positive arc vanishing with non-zero slope at both ends.
    Arc { lo: f64, hi: f64, peak: f64 },
}

impl Segment {
    pub fn span(&self, t_h: f64) -> (f64, f64) {
        match *self {
            Segment::Bump { center, .. } => (center - t_h, center + t_h),
            Segment::Rest { lo, hi } | Segment::Arc { lo, hi, .. } => (lo, hi),
        }
    }
}

/// Sampled values and slopes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

/// A solution candidate on `domain`, with its segment structure and a grid
/// made of `cells + 1` uniform nodes plus every segment breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub params: Params,
    pub kind: ProfileKind,
    pub segments: Vec<Segment>,
    pub domain: (f64, f64),
    pub grid: Grid,
    /// Index into `grid.nodes` of uniform node `k`, `k = 0..=cells`.
    pub uniform: Vec<usize>,
}

impl Profile {
    /// Builds the node set and evaluates `eval` on it (ascending order).
    pub(crate) fn assemble<E>(
        params: Params,
        kind: ProfileKind,
        segments: Vec<Segment>,
        domain: (f64, f64),
        n: usize,
        breakpoints: &[f64],
        eval: E,
    ) -> Result<Profile>
    where
        E: FnOnce(&[f64]) -> Result<(Vec<f64>, Vec<f64>)>,
    {
        if n < 3 {
            return Err(Error::GridTooSmall { min: 3, got: n });
        }
        let (lo, hi) = domain;
        let cells = n - 1;
        let h = (hi - lo) / cells as f64;
        let snap = 1e-12 * (hi - lo);

        let mut extra: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .filter(|&b| {
                let k = ((b - lo) / h).round();
                (lo + k * h - b).abs() > snap
            })
            .collect();
        extra.sort_by(f64::total_cmp);
        extra.dedup_by(|a, b| (*a - *b).abs() <= snap);

        let mut nodes = Vec::with_capacity(n + extra.len());
        let mut uniform = Vec::with_capacity(n);
        let mut e = 0;
        for k in 0..=cells {
            let x = if k == cells { hi } else { lo + k as f64 * h };
            while e < extra.len() && extra[e] < x {
                nodes.push(extra[e]);
                e += 1;
            }
            uniform.push(nodes.len());
            nodes.push(x);
        }
        let (values, slopes) = eval(&nodes)?;
        Ok(Profile {
            params,
            kind,
            segments,
            domain,
            grid: Grid {
                nodes,
                values,
                slopes,
            },
            uniform,
        })
    }

    pub fn cells(&self) -> usize {
        self.uniform.len() - 1
    }

    /// Spacing of the uniform sub-grid.
    pub fn spacing(&self) -> f64 {
        (self.domain.1 - self.domain.0) / self.cells() as f64
    }

    /// `(x, u)` at the uniform nodes.
    pub fn uniform_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.uniform
            .iter()
            .map(move |&i| (self.grid.nodes[i], self.grid.values[i]))
    }

    pub fn sup_norm(&self) -> f64 {
        self.grid.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max(sup|u|, sup|u'|)`, the computable stand-in for the C¹ norm.
    pub fn c1_norm(&self) -> f64 {
        let s = self.grid.slopes.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        self.sup_norm().max(s)
    }

    /// Linear interpolation of the grid values.
    pub fn value_at(&self, x: f64) -> f64 {
        let nodes = &self.grid.nodes;
        if x <= nodes[0] {
            return self.grid.values[0];
        }
        let i = nodes.partition_point(|&t| t < x);
        if i >= nodes.len() {
            return *self.grid.values.last().unwrap();
        }
        let (x0, x1) = (nodes[i - 1], nodes[i]);
        let (u0, u1) = (self.grid.values[i - 1], self.grid.values[i]);
        u0 + (u1 - u0) * (x - x0) / (x1 - x0)
    }

    /// Maximal runs of nodes with `|u| > tol`.
    pub fn bumps(&self, tol: f64) -> Vec<BumpInfo> {
        let mut out = Vec::new();
        let mut current: Option<BumpInfo> = None;
        for (i, (&x, &u)) in self.grid.nodes.iter().zip(&self.grid.values).enumerate() {
            if u.abs() > tol {
                let sign = if u > 0.0 { 1 } else { -1 };
                match current.as_mut() {
                    Some(b) if b.sign == sign => {
                        b.hi = x;
                        if u.abs() > b.max_abs {
                            b.max_abs = u.abs();
                            b.argmax = x;
                        }
                    }
                    _ => {
                        if let Some(b) = current.take() {
                            out.push(b);
                        }
                        current = Some(BumpInfo {
                            lo: x,
                            hi: x,
                            max_abs: u.abs(),
                            argmax: x,
                            sign,
                            first: i,
                        });
                    }
                }
            } else if let Some(b) = current.take() {
                out.push(b);
            }
        }
        out.extend(current);
        out
    }

    /// Number of bumps at the default threshold `1e-9 · u_H`.
    pub fn bump_count(&self) -> usize {
        self.bumps(BUMP_TOL * self.params.equilibria().u_h).len()
    }
}

/// One positivity (or negativity) run found by [`Profile::bumps`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpInfo {
    /// First and last node of the run.
    pub lo: f64,
    pub hi: f64,
    pub max_abs: f64,
    pub argmax: f64,
    pub sign: i8,
    first: usize,
}

/// Values and slopes of a sum of disjoint signed homoclinic copies.
fn bump_sum(params: &Params, bumps: &[(f64, i8)], nodes: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let t_h = params.equilibria().t_h;
    let mut values = vec![0.0; nodes.len()];
    let mut slopes = vec![0.0; nodes.len()];
    for (i, &x) in nodes.iter().enumerate() {
        for &(c, s) in bumps {
            let d = x - c;
            if d.abs() < t_h {
                values[i] += s as f64 * homoclinic_value(d, params);
                slopes[i] += s as f64 * homoclinic_slope(d, params);
            }
        }
    }
    (values, slopes)
}

/// Segments for bumps at `centers` (already validated) tiled by rest intervals.
fn tile(params: &Params, centers: &[f64], signs: &[i8]) -> (Vec<Segment>, Vec<f64>) {
    let t_h = params.equilibria().t_h;
    let length = params.length();
    let mut segments = Vec::new();
    let mut breaks = Vec::new();
    let mut cursor = 0.0;
    for (&c, &s) in centers.iter().zip(signs) {
        let (a, b) = ((c - t_h).max(0.0), (c + t_h).min(length));
        if a > cursor {
            segments.push(Segment::Rest { lo: cursor, hi: a });
        }
        segments.push(Segment::Bump { center: c, sign: s });
        breaks.extend([a, c, b]);
        cursor = b;
    }
    if cursor < length {
        segments.push(Segment::Rest {
            lo: cursor,
            hi: length,
        });
    }
    (segments, breaks)
}

/// `ũ_{λ,x₀}`: one homoclinic bump centred at `x0`, zero elsewhere.
pub fn degenerate_single(lam: f64, x0: f64, params: &Params, n: usize) -> Result<Profile> {
    let at = params.with_lambda(lam)?;
    single_bump(at, x0, n, ProfileKind::DegenerateSingle)
}

fn single_bump(at: Params, x0: f64, n: usize, kind: ProfileKind) -> Result<Profile> {
    let t_h = at.equilibria().t_h;
    let length = at.length();
    let slack = FIT_TOL * length;
    if 2.0 * t_h > length + slack || x0 < t_h - slack || x0 > length - t_h + slack {
        return Err(Error::BumpDoesNotFit {
            x0,
            half_width: t_h,
            length,
        });
    }
    let (segments, breaks) = tile(&at, &[x0], &[1]);
    Profile::assemble(at, kind, segments, (0.0, length), n, &breaks, |nodes| {
        Ok(bump_sum(&at, &[(x0, 1)], nodes))
    })
}

/// `w_{λ,ϑ}`: the central bump translated by `theta`.
pub fn shifted(lam: f64, theta: f64, params: &Params, n: usize) -> Result<Profile> {
    let at = params.with_lambda(lam)?;
    let limit = 0.5 * at.length() - at.equilibria().t_h;
    if !(theta.abs() <= limit + FIT_TOL * at.length()) {
        return Err(Error::ShiftOutOfRange { theta, limit });
    }
    single_bump(at, 0.5 * at.length() + theta, n, ProfileKind::Shifted)
}

/// `u_{λ,x₁,…,x_j}`: one positive homoclinic copy at every centre of `layout`.
pub fn multibump(layout: &BumpLayout, params: &Params, n: usize) -> Result<Profile> {
    let signs = vec![1; layout.centers.len()];
    signed_impl(layout, &signs, params, n, ProfileKind::Multibump)
}

/// `𝒲 = Σ δ_i ũ_{λ,x_i}` with `δ_i = ±1`.
pub fn signed_multibump(
    layout: &BumpLayout,
    signs: &[i8],
    params: &Params,
    n: usize,
) -> Result<Profile> {
    signed_impl(layout, signs, params, n, ProfileKind::SignedMultibump)
}

fn signed_impl(
    layout: &BumpLayout,
    signs: &[i8],
    params: &Params,
    n: usize,
    kind: ProfileKind,
) -> Result<Profile> {
    let j = layout.centers.len();
    if signs.len() != j {
        return Err(Error::SignCountMismatch {
            expected: j,
            got: signs.len(),
        });
    }
    if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::InvalidSymbol(bad as i64));
    }
    // Re-validate against the caller's (a, p, L); the layout may be stale.
    let checked = layout::layout(&layout.centers, layout.lambda, params)?;
    let at = params.with_lambda(checked.lambda)?;
    let threshold = at.equilibria().big_sigma(j as u32);
    if checked.lambda < threshold * (1.0 - FIT_TOL) {
        let slack = checked.slacks.iter().copied().fold(f64::INFINITY, f64::min);
        return Err(Error::Overlap { index: 0, slack });
    }
    let (segments, breaks) = tile(&at, &checked.centers, signs);
    let bumps: Vec<(f64, i8)> = checked
        .centers
        .iter()
        .copied()
        .zip(signs.iter().copied())
        .collect();
    Profile::assemble(
        at,
        kind,
        segments,
        (0.0, at.length()),
        n,
        &breaks,
        |nodes| Ok(bump_sum(&at, &bumps, nodes)),
    )
}
