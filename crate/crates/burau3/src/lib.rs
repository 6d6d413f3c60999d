//! Exact arithmetic in the image of the reduced Burau representation of the
//! three-strand braid group.
//!
//! The crate is organized bottom-up:
//!
//! * [`laurent`]: sparse Laurent polynomials over exact coefficients, the
//!   bar involution `t -> t^-1`, and evaluation at roots of unity.
//! * [`burau`]: 3x3 Burau matrices, the defining conditions of the formal
//!   Burau group, and the two rank-reducing maps `phi` (to 2x2 matrices over
//!   a localization) and `rho` (to `GL(2, Z)` through `t = -1`).
//! * [`quaternionic`]: the projective group of 2x2 matrices of the shape
//!   `[[g1, g2], [-Phi*bar(g2), bar(g1)]]`, free on the elementary
//!   generators `g[r]`, with constructive word reduction.
//! * [`chains`]: minimal integral representatives, reductive factors, the
//!   chain calculus, and the pruned tree search for biminimal chains whose
//!   verified output certifies integral matrices with nonzero corner entry.
//! * [`selftest`]: seeded randomized suites exercising the documented
//!   invariants end to end, shared by the CLI and the acceptance tests.

pub mod burau;
pub mod chains;
pub mod laurent;
pub mod quaternionic;
pub mod selftest;

pub use laurent::{EisensteinValue, IntPoly, LaurentError, RatPoly};
