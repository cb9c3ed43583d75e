//! Staged CSV/JSON output and the CLI error type.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sublin_core::oracle::{residual, ResidualReport};
use sublin_core::profiles::{Grid, BUMP_TOL};
use sublin_core::{Error, Params, Profile, ProfileKind, Segment};

/// Residual levels used to verify every emitted profile.
pub const RESIDUAL_LEVELS: usize = 3;
/// Accepted deviation of the observed order from 2.
pub const ORDER_TOL: f64 = 0.2;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Verification(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        use Error::*;
        match e {
            NonFinite { .. }
            | NoConvergence { .. }
            | StepUnderflow { .. }
            | EnteredNonUniquenessBall { .. }
            | NoEvent { .. }
            | NoBracket { .. }
            | BlockAmbiguous { .. }
            | ZeroNorm => CliError::Verification(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// One CSV field.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Real)
    }
}

fn push_cell(buf: &mut String, c: Cell) {
    match c {
        Cell::Real(x) => write!(buf, "{x:.16e}").unwrap(),
        Cell::Int(i) => write!(buf, "{i}").unwrap(),
        Cell::Empty => {}
    }
}

pub fn csv<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<Cell>>,
{
    let mut buf = header.join(",");
    buf.push('\n');
    for row in rows {
        for (k, c) in row.into_iter().enumerate() {
            if k > 0 {
                buf.push(',');
            }
            push_cell(&mut buf, c);
        }
        buf.push('\n');
    }
    buf
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

/// Files are collected first and written together once every check passed.
pub struct Staged {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Staged {
    pub fn new(dir: &Path) -> Self {
        Staged {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn commit(self) -> CliResult<Vec<PathBuf>> {
        std::fs::create_dir_all(&self.dir).map_err(|source| CliError::Io {
            path: self.dir.clone(),
            source,
        })?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, contents) in self.files {
            let path = self.dir.join(name);
            std::fs::write(&path, contents).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            written.push(path);
        }
        Ok(written)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub residual_levels: usize,
    pub residual_order_tol: f64,
    pub bump_tol: f64,
}

impl Tolerances {
    pub fn new(tol: f64) -> Self {
        Tolerances {
            tol,
            residual_levels: RESIDUAL_LEVELS,
            residual_order_tol: ORDER_TOL,
            bump_tol: BUMP_TOL,
        }
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    command: &'a str,
    seed: u64,
    tolerances: Tolerances,
    residual: &'a ResidualReport,
    sup_norm: f64,
    c1_norm: f64,
    norm: &'static str,
    bump_count: usize,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    extra: serde_json::Value,
}

#[derive(Serialize)]
struct ProfileDoc<'a> {
    params: &'a Params,
    kind: &'a ProfileKind,
    segments: &'a [Segment],
    domain: (f64, f64),
    grid: &'a Grid,
    metadata: Metadata<'a>,
}

/// Run-wide context stamped into every profile document.
#[derive(Debug, Clone, Copy)]
pub struct RunInfo<'a> {
    pub command: &'a str,
    pub seed: u64,
    pub tolerances: Tolerances,
}

/// Residual check of a profile; failing profiles are never written.
pub fn verify(prof: &Profile, what: &str) -> CliResult<ResidualReport> {
    let report = residual(prof, RESIDUAL_LEVELS).map_err(|e| match e {
        Error::GridTooCoarse { .. } => {
            CliError::Validation(format!("{what}: {e}; increase --grid-n"))
        }
        e => CliError::from(e),
    })?;
    if !report.passes(ORDER_TOL) {
        return Err(CliError::Verification(format!(
            "{what}: observed residual order {:.3} (max residual {:.3e})",
            report.observed_order, report.max_residual
        )));
    }
    Ok(report)
}

/// Verifies `prof` and stages `<stem>.csv` and `<stem>.json`.
pub fn stage_profile(
    out: &mut Staged,
    stem: &str,
    prof: &Profile,
    run: &RunInfo<'_>,
    extra: serde_json::Value,
) -> CliResult<ResidualReport> {
    let report = verify(prof, stem)?;
    let rows = prof
        .grid
        .nodes
        .iter()
        .zip(&prof.grid.values)
        .map(|(&x, &u)| vec![x.into(), u.into()]);
    out.add(format!("{stem}.csv"), csv(&["x", "u"], rows));
    let doc = ProfileDoc {
        params: &prof.params,
        kind: &prof.kind,
        segments: &prof.segments,
        domain: prof.domain,
        grid: &prof.grid,
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION"),
            command: run.command,
            seed: run.seed,
            tolerances: run.tolerances,
            residual: &report,
            sup_norm: prof.sup_norm(),
            c1_norm: prof.c1_norm(),
            norm: "c1_norm = max(sup|u|, sup|u'|) over the grid",
            bump_count: prof.bump_count(),
            extra,
        },
    };
    out.add(format!("{stem}.json"), json(&doc));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_format() {
        let s = csv(
            &["x", "u"],
            vec![
                vec![Cell::Real(0.1), Cell::Empty],
                vec![Cell::Int(3), Cell::Real(-2.0)],
            ],
        );
        assert_eq!(s, "x,u\n1.0000000000000001e-1,\n3,-2.0000000000000000e0\n");
        // 17 significant digits survive a round trip
        let x = std::f64::consts::PI / 7.0;
        let t = csv(&["x"], vec![vec![Cell::Real(x)]]);
        assert_eq!(t.lines().nth(1).unwrap().parse::<f64>().unwrap(), x);
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::InvalidCenters).exit_code(), 2);
        assert_eq!(
            CliError::from(Error::NoBracket { lambda: 1.0 }).exit_code(),
            3
        );
        let io = CliError::Io {
            path: "x".into(),
            source: std::io::Error::other("boom"),
        };
        assert_eq!(io.exit_code(), 4);
    }
}
