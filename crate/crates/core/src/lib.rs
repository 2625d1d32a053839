//! Exact differential forms, Dolbeault cohomology, harmonic maps and
//! tropicalizations on weighted metric graphs with boundary.
//!
//! All arithmetic is over the rationals. Smooth functions on edges are
//! piecewise polynomials with a finite smoothness order `K` (see
//! [`calculus`]).

pub mod calculus;
pub mod cohomology;
pub mod forms;
pub mod graph;
pub mod harmonic;
pub mod linalg;
pub mod quotient;
pub mod rational;
pub mod io;
pub mod report;
pub mod skeleton;
pub mod tropical;

pub use calculus::{PiecewisePolynomial, Polynomial};
pub use forms::{Bidegree, GraphForm};
pub use graph::{Edge, EdgeId, GraphPoint, Orientation, OrientedEdge, VertexId, WeightedMetricGraph};
pub use rational::Rational;
