//! Berry–Esséen rates and moderate deviations for associated sequences,
//! checked numerically on nonnegative-weight moving averages.
//!
//! * [`model`]: the moving-average family and its exact second-order algebra
//!   (`c_j`, `s_n²`, `u(n)`, `σ²`, decay exponents).
//! * [`simulate`]: deterministic parallel Monte Carlo, sample paths, the block
//!   decomposition and exact samplers of partial sums.
//! * [`rates`]: closed-form rate exponents, the blocking-exponent optimizer and
//!   the moderate-deviation parameter windows.
//! * [`charfn`]: empirical characteristic functions, Newman's inequality and
//!   the smoothing bound.
//! * [`empirics`]: Kolmogorov distances, coupling distances, remainder tails,
//!   moderate-deviation ratios and moment diagnostics of the coupling blocks.
//! * [`experiment`]: config files, validation and the CSV/JSON runner behind
//!   the `associated-clt` binary.
//!
//! ```
//! use associated_clt::model::{InnovationLaw, MAModel};
//!
//! let m = MAModel::geometric(0.5, 48, InnovationLaw::gaussian()).unwrap();
//! let (lhs, rhs) = m.variance_gap_identity(100).unwrap();
//! assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs());
//! ```

// `!(x > 0.0)` style guards are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfn;
pub mod empirics;
pub mod error;
pub mod experiment;
pub mod model;
pub mod quadrature;
pub mod rates;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
