//! Exact calculus on intervals.
//!
//! Smoothness is tracked as a finite order `K`: a piecewise polynomial is
//! `C^K` when neighbouring pieces agree in value and in the first `K`
//! derivatives at every interior breakpoint. Vertex conditions on graphs are
//! checked to the same order.

mod piecewise;
mod polynomial;

pub use piecewise::{check_vertex_glue, glue_mismatch, make_bump, CalculusError, PiecewisePolynomial};
pub use polynomial::Polynomial;

/// Smoothness order used when none is given.
pub const DEFAULT_ORDER: u32 = 3;
/// Smallest order accepted at the user-facing layer.
pub const MIN_ORDER: u32 = 2;
