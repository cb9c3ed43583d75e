//! Solutions coded by symbol sequences at the critical value `λ = Σ₁(p)`,
//! where one homoclinic bump fills a block `[(i-1)L, iL]` exactly.
//!
//! Infinite sequences are handled through finite windows; blocks outside a
//! window count as rest blocks, so every check here is window-local.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{homoclinic_slope, homoclinic_value, Params};
use crate::profiles::{Grid, Profile, ProfileKind, Segment, BUMP_TOL};

/// Default number of grid cells per block.
pub const BLOCK_CELLS: usize = 256;
/// Relative tolerance on `λ = Σ₁(p)`.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Symbols `s_{i₀}, …, s_{i₁}` over `{-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolWindow {
    pub offset: i64,
    pub symbols: Vec<i8>,
}

impl SymbolWindow {
    pub fn new(offset: i64, symbols: Vec<i8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyWindow);
        }
        if let Some(&s) = symbols.iter().find(|s| !(-1..=1).contains(*s)) {
            return Err(Error::InvalidSymbol(s as i64));
        }
        Ok(SymbolWindow { offset, symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Index of the last block.
    pub fn last_index(&self) -> i64 {
        self.offset + self.symbols.len() as i64 - 1
    }

    /// Symbol of block `i`, zero outside the window.
    pub fn get(&self, i: i64) -> i8 {
        usize::try_from(i - self.offset)
            .ok()
            .and_then(|k| self.symbols.get(k).copied())
            .unwrap_or(0)
    }

    /// Smallest `κ` with `s_{i+κ} = s_i` across the window.
    pub fn minimal_period(&self) -> usize {
        let n = self.symbols.len();
        (1..=n)
            .find(|&k| (0..n - k).all(|i| self.symbols[i] == self.symbols[i + k]))
            .unwrap_or(n)
    }
}

/// `ϑ`: `(ϑs)_i = s_{i+1}`, restricted to the blocks still known.
pub fn shift(window: &SymbolWindow) -> Result<SymbolWindow> {
    if window.len() < 2 {
        return Err(Error::WindowTooShort);
    }
    SymbolWindow::new(window.offset, window.symbols[1..].to_vec())
}

fn check_critical(params: &Params) -> Result<()> {
    let critical = params.equilibria().big_sigma(1);
    if (params.lambda() - critical).abs() > CRITICAL_TOL * critical {
        return Err(Error::LambdaNotCritical {
            lambda: params.lambda(),
            critical,
        });
    }
    Ok(())
}

/// [`build_with`] at [`BLOCK_CELLS`] cells per block.
pub fn build(window: &SymbolWindow, params: &Params) -> Result<Profile> {
    build_with(window, params, BLOCK_CELLS)
}

/// `u_s`: on block `i`, `s_i·û(x - (i-1)L - L/2)`.
///
/// Every block is sampled from the same local coordinates, so equal symbols
/// give bit-identical blocks and block edges are exact zeros.
pub fn build_with(window: &SymbolWindow, params: &Params, cells: usize) -> Result<Profile> {
    check_critical(params)?;
    if cells < 4 {
        return Err(Error::GridTooSmall { min: 4, got: cells });
    }
    let length = params.length();
    let half = 0.5 * length;
    let h = length / cells as f64;
    let local: Vec<(f64, f64)> = (0..=cells)
        .map(|r| {
            if r == 0 || r == cells {
                (0.0, 0.0)
            } else {
                let t = r as f64 * h - half;
                (homoclinic_value(t, params), homoclinic_slope(t, params))
            }
        })
        .collect();

    let blocks = window.len();
    let mut grid = Grid::default();
    let mut segments = Vec::with_capacity(blocks);
    for (b, &s) in window.symbols.iter().enumerate() {
        let i = window.offset + b as i64;
        let start = (i - 1) as f64 * length;
        let first = if b == 0 { 0 } else { 1 };
        for (r, &(u, v)) in local.iter().enumerate().skip(first) {
            grid.nodes.push(start + r as f64 * h);
            grid.values.push(s as f64 * u);
            grid.slopes.push(s as f64 * v);
        }
        segments.push(if s == 0 {
            Segment::Rest {
                lo: start,
                hi: start + length,
            }
        } else {
            Segment::Bump {
                center: start + half,
                sign: s,
            }
        });
    }
    let uniform = (0..grid.nodes.len()).collect();
    let domain = (
        (window.offset - 1) as f64 * length,
        window.last_index() as f64 * length,
    );
    Ok(Profile {
        params: *params,
        kind: ProfileKind::Chaotic {
            offset: window.offset,
            blocks,
        },
        segments,
        domain,
        grid,
        uniform,
    })
}

fn block_layout(prof: &Profile) -> Result<(i64, usize, usize)> {
    match prof.kind {
        ProfileKind::Chaotic { offset, blocks }
            if blocks > 0 && prof.cells().is_multiple_of(blocks) =>
        {
            Ok((offset, blocks, prof.cells() / blocks))
        }
        _ => Err(Error::NotBlockAligned),
    }
}

/// Per-block summary of a block-aligned profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockInfo {
    pub index: i64,
    pub symbol: i8,
    pub max_abs: f64,
}

/// `Π`: reads the symbol of every block back from the profile.
pub fn project(prof: &Profile) -> Result<SymbolWindow> {
    Ok(SymbolWindow {
        offset: block_layout(prof)?.0,
        symbols: blocks(prof)?.iter().map(|b| b.symbol).collect(),
    })
}

/// Zero blocks are those with `max |u| ≤ 1e-9·u_H`; any other block must be
/// a single run of one sign.
pub fn blocks(prof: &Profile) -> Result<Vec<BlockInfo>> {
    let (offset, count, m) = block_layout(prof)?;
    let tol = BUMP_TOL * prof.params.equilibria().u_h;
    let values = &prof.grid.values;
    (0..count)
        .map(|b| {
            let index = offset + b as i64;
            let slice = &values[b * m..=(b + 1) * m];
            let max_abs = slice.iter().fold(0.0_f64, |a, u| a.max(u.abs()));
            if max_abs <= tol {
                return Ok(BlockInfo {
                    index,
                    symbol: 0,
                    max_abs,
                });
            }
            let mut runs = 0;
            let mut sign = 0i8;
            let mut inside = false;
            for &u in slice {
                if u.abs() > tol {
                    let s = if u > 0.0 { 1 } else { -1 };
                    if !inside || s != sign {
                        runs += 1;
                    }
                    sign = s;
                    inside = true;
                } else {
                    inside = false;
                }
            }
            if runs != 1 {
                return Err(Error::BlockAmbiguous { index });
            }
            Ok(BlockInfo {
                index,
                symbol: sign,
                max_abs,
            })
        })
        .collect()
}

/// `Φ_L`: `u(· + L)` on blocks `i₀ … i₁ - 1`.
pub fn translate(prof: &Profile) -> Result<Profile> {
    let (offset, count, m) = block_layout(prof)?;
    if count < 2 {
        return Err(Error::WindowTooShort);
    }
    let length = prof.params.length();
    let h = length / m as f64;
    let keep = (count - 1) * m + 1;
    let mut grid = Grid::default();
    for k in 0..keep {
        // same node formula as `build_with`
        let (b, r) = if k == 0 {
            (0, 0)
        } else {
            ((k - 1) / m, (k - 1) % m + 1)
        };
        grid.nodes
            .push((offset - 1 + b as i64) as f64 * length + r as f64 * h);
        grid.values.push(prof.grid.values[k + m]);
        grid.slopes.push(prof.grid.slopes[k + m]);
    }
    let segments = prof.segments[1..]
        .iter()
        .map(|seg| match *seg {
            Segment::Bump { center, sign } => Segment::Bump {
                center: center - length,
                sign,
            },
            Segment::Rest { lo, hi } => Segment::Rest {
                lo: lo - length,
                hi: hi - length,
            },
            Segment::Arc { lo, hi, peak } => Segment::Arc {
                lo: lo - length,
                hi: hi - length,
                peak: peak - length,
            },
        })
        .collect();
    Ok(Profile {
        params: prof.params,
        kind: ProfileKind::Chaotic {
            offset,
            blocks: count - 1,
        },
        segments,
        domain: (prof.domain.0, prof.domain.1 - length),
        grid,
        uniform: (0..keep).collect(),
    })
}

/// `max |u(x + κL) - u(x)|` over the nodes where both sides are sampled.
pub fn period_defect(prof: &Profile, kappa: usize) -> Result<f64> {
    let (_, count, m) = block_layout(prof)?;
    if kappa >= count {
        return Err(Error::WindowTooShort);
    }
    let shift = kappa * m;
    let v = &prof.grid.values;
    Ok((0..v.len() - shift).fold(0.0, |acc, k| acc.max((v[k + shift] - v[k]).abs())))
}

/// The chaos manifest written next to a coded profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosManifest {
    pub window: SymbolWindow,
    pub lambda: f64,
    #[serde(rename = "L")]
    pub length: f64,
    pub blocks: Vec<BlockInfo>,
}

pub fn manifest(window: &SymbolWindow, prof: &Profile) -> Result<ChaosManifest> {
    Ok(ChaosManifest {
        window: window.clone(),
        lambda: prof.params.lambda(),
        length: prof.params.length(),
        blocks: blocks(prof)?,
    })
}
