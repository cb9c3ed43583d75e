use thiserror::Error;

/// Everything that can go wrong while constructing or verifying a solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lambda must be positive and finite, got {0}")]
    NonPositiveLambda(f64),
    #[error("weight a must be positive and finite, got {0}")]
    NonPositiveWeight(f64),
    #[error("exponent p must lie in (0, 1 - 1e-6], got {0}")]
    ExponentOutOfRange(f64),
    #[error("interval length L must be positive and finite, got {0}")]
    NonPositiveLength(f64),

    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("quadrature did not converge after {levels} levels (last estimate {estimate}, change {change})")]
    NoConvergence {
        levels: u32,
        estimate: f64,
        change: f64,
    },

    #[error("amplitude {c} does not exceed the homoclinic crossing u_H = {u_h}")]
    AmplitudeBelowHomoclinic { c: f64, u_h: f64 },
    #[error("ratio xi = {0} outside (0, 1)")]
    RatioOutOfRange(f64),
    #[error("lambda = {lambda} outside the classical window ({lower}, {upper})")]
    LambdaOutsideWindow { lambda: f64, lower: f64, upper: f64 },

    #[error("bump of half-width {half_width} centred at {x0} does not fit in [0, {length}]")]
    BumpDoesNotFit {
        x0: f64,
        half_width: f64,
        length: f64,
    },
    #[error("shift {theta} exceeds the admissible range |theta| <= {limit}")]
    ShiftOutOfRange { theta: f64, limit: f64 },
    #[error("bumps overlap or leave the interval: slack delta_{index} = {slack} < 0")]
    Overlap { index: usize, slack: f64 },
    #[error("bump centres must be strictly increasing and inside (0, L)")]
    InvalidCenters,
    #[error("{expected} signs expected, got {got}")]
    SignCountMismatch { expected: usize, got: usize },
    #[error("grid needs at least {min} nodes, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("adaptive step underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("trajectory entered the non-uniqueness ball around the origin at t = {t}")]
    EnteredNonUniquenessBall { t: f64 },
    #[error("no event before t = {t_max}")]
    NoEvent { t_max: f64 },
    #[error("profile grid too coarse for {levels} residual levels")]
    GridTooCoarse { levels: usize },

    #[error("regularisation parameter eps must be positive, got {0}")]
    NonPositiveEps(f64),
    #[error("no sign change of the shooting miss distance at lambda = {lambda}")]
    NoBracket { lambda: f64 },
    #[error("norm is zero; the inversion u / |u|^2 is undefined")]
    ZeroNorm,

    #[error("lambda = {lambda} is not the critical value Sigma_1(p) = {critical}")]
    LambdaNotCritical { lambda: f64, critical: f64 },
    #[error("symbol {0} not in {{-1, 0, 1}}")]
    InvalidSymbol(i64),
    #[error("symbol window is empty")]
    EmptyWindow,
    #[error("block {index} is neither identically zero nor a clean homoclinic bump")]
    BlockAmbiguous { index: i64 },
    #[error("translation needs at least two blocks")]
    WindowTooShort,
    #[error("profile is not built on whole L-blocks")]
    NotBlockAligned,
}

pub type Result<T> = std::result::Result<T, Error>;
