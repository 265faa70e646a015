//! Exact computations around fractional parts of `lambda * (p/q)^n`.
//!
//! * [`circle`]: fractional parts, orbits and unions of closed arcs mod 1.
//! * [`cover`]: the small-measure cover `A(eps)` for ratios with `p > q^2`.
//! * [`survivor`]: branch-and-prune certificates for orbit constraints.
//! * [`census`]: the increasing enumeration of `{ p/q : p > q^2 }`.
//! * [`waring`]: integer checks of the `g(n)` threshold conditions.
//!
//! Every result on a correctness path is computed with arbitrary-precision
//! rationals; floating point appears only in human-readable reports.

pub mod census;
pub mod circle;
pub mod cover;
pub mod error;
pub mod rational;
pub mod survivor;
pub mod waring;

pub use circle::{dist_nearest_int, frac, orbit, CirclePoint, CircleSet, Interval};
pub use error::{Error, Result};
pub use rational::{rat, Rational};
