//! Constructs, classifies and verifies the non-negative solutions of
//!
//! ```text
//! -u'' = λu - a|u|^{p-1}u  on [0, L],   u(0) = u(L) = 0,   0 < p < 1.
//! ```
//!
//! The sublinear term is not Lipschitz at `u = 0`, so besides the classical
//! positive solutions there are degenerate ones assembled from copies of a
//! homoclinic loop that reaches the origin in finite time.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod oracle;
pub mod profiles;
pub mod regularized;
pub mod symbolic;
pub mod timemap;

pub use error::{Error, Result};
pub use model::{EnergyPoint, Equilibria, Params};
pub use profiles::{BumpLayout, Profile, ProfileKind, Segment};
