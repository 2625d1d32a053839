//! Harmonic tropicalizations, polynomial Lagerberg forms and tropical cycles.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::calculus::Polynomial;
use crate::forms::{Bidegree, FormError, GraphForm};
use crate::graph::{EdgeId, EdgeInterval, GraphError, GraphPoint, VertexId, WeightedMetricGraph};
use crate::harmonic::{MapError, PLMap};
use crate::rational::{gcd_all, lcm_all, Rational};

mod certificate;
mod cycle;
mod poly;

pub use certificate::{local_pullback_certificate, polynomial_star_extension, LocalCase, LocalCertificate};
pub use cycle::{
    check_balancing, integration_compat_check, trop_boundary_integrate, trop_cycle, trop_integrate, CompatCheck,
    Imbalance, Segment, TropCycle,
};
pub use poly::{LagerbergPolyForm, MultiPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TropicalError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("expected dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("{op} is not defined in bidegree {bidegree:?}")]
    WrongBidegree { op: &'static str, bidegree: Bidegree },
    #[error("component {component}: slope on edge {edge} does not match the vertex values")]
    Inconsistent { component: usize, edge: usize },
    #[error("component {component} is not harmonic at vertex {vertex}")]
    NotHarmonic { component: usize, vertex: usize },
    #[error("component {component} has non-integral slope on edge {edge}")]
    NonIntegralSlope { component: usize, edge: usize },
    #[error("segment endpoints must be distinct points of the same dimension")]
    BadSegment,
    #[error("cycle is not refined: segments {0} and {1} overlap")]
    Unrefined(usize, usize),
    #[error("star extension: {0}")]
    StarHypothesis(String),
    #[error("edge length {0} is not in Γ")]
    LengthOutsideGamma(Rational),
    #[error("point is not on the graph")]
    PointNotOnGraph,
    #[error("no polynomial Lagerberg form pulls back to the form near this point: {0}")]
    NotPolynomialNear(String),
}

pub type Result<T> = std::result::Result<T, TropicalError>;

/// Subgroup of `ℝ` generated by finitely many positive rationals, optionally
/// replaced by its saturation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaGroup {
    generators: Vec<Rational>,
    saturated: bool,
}

impl GammaGroup {
    pub fn new(generators: Vec<Rational>, saturated: bool) -> Option<Self> {
        if generators.iter().any(|g| !g.is_positive()) {
            return None;
        }
        Some(GammaGroup { generators, saturated })
    }

    pub fn integers() -> Self {
        GammaGroup { generators: vec![Rational::from_integer(1.into())], saturated: false }
    }

    pub fn generators(&self) -> &[Rational] {
        &self.generators
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Positive generator `g` with `Γ = gℤ`, or `None` for `Γ = 0`.
    pub fn generator(&self) -> Option<Rational> {
        if self.generators.is_empty() {
            return None;
        }
        let dens: Vec<BigInt> = self.generators.iter().map(|g| g.denom().clone()).collect();
        let l = lcm_all(&dens);
        let nums: Vec<BigInt> = self.generators.iter().map(|g| (g * Rational::from_integer(l.clone())).to_integer()).collect();
        Some(Rational::new(gcd_all(&nums), l))
    }

    /// The saturation of a nonzero subgroup of `ℚ` is `ℚ`.
    pub fn saturation(&self) -> GammaGroup {
        GammaGroup { generators: self.generators.clone(), saturated: true }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match self.generator() {
            None => x.is_zero(),
            Some(_) if self.saturated => true,
            Some(g) => (x / g).is_integer(),
        }
    }
}


/// `h = (h_1, …, h_n)` on a graph: the value of every component at every
/// vertex and its slope along every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicTropicalization {
    values: Vec<Vec<Rational>>,
    slopes: Vec<Vec<Rational>>,
}

/// Restricted graph `U` inside a parent graph: edge `i` of `U` runs forward
/// over `intervals[i]` of a parent edge.
#[derive(Clone, Copy, Debug)]
pub struct Ambient<'a> {
    pub parent: &'a WeightedMetricGraph,
    pub intervals: &'a [EdgeInterval],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TropWitness {
    Unbalanced { component: usize, vertex: usize, sum: Rational },
    NonIntegralSlope { component: usize, edge: usize, slope: Rational },
    VertexValue { component: usize, vertex: usize, value: Rational },
    /// Value of the affine extension at an endpoint of the parent edge.
    AmbientValue { component: usize, edge: usize, value: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropCheck {
    pub harmonic: bool,
    pub integral: bool,
    pub gamma: bool,
    pub witnesses: Vec<TropWitness>,
}

impl HarmonicTropicalization {
    pub fn new(g: &WeightedMetricGraph, values: Vec<Vec<Rational>>, slopes: Vec<Vec<Rational>>) -> Result<Self> {
        if values.len() != slopes.len() {
            return Err(TropicalError::Dimension { expected: values.len(), got: slopes.len() });
        }
        for (i, (vals, sl)) in values.iter().zip(&slopes).enumerate() {
            if vals.len() != g.num_vertices() {
                return Err(TropicalError::Dimension { expected: g.num_vertices(), got: vals.len() });
            }
            if sl.len() != g.num_edges() {
                return Err(TropicalError::Dimension { expected: g.num_edges(), got: sl.len() });
            }
            for (k, e) in g.edges().iter().enumerate() {
                if &vals[e.tail.0] + &sl[k] * &e.length != vals[e.head.0] {
                    return Err(TropicalError::Inconsistent { component: i, edge: k });
                }
            }
        }
        Ok(HarmonicTropicalization { values, slopes })
    }

    /// Components given by their vertex values; slopes are derived.
    pub fn from_values(g: &WeightedMetricGraph, values: Vec<Vec<Rational>>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| v.len() != g.num_vertices()) {
            return Err(TropicalError::Dimension { expected: g.num_vertices(), got: v.len() });
        }
        let slopes = values
            .iter()
            .map(|vals| g.edges().iter().map(|e| (&vals[e.head.0] - &vals[e.tail.0]) / &e.length).collect())
            .collect();
        Ok(HarmonicTropicalization { values, slopes })
    }

    /// `h` given by the image point of every vertex in `ℚⁿ`.
    pub fn from_points(g: &WeightedMetricGraph, n: usize, points: &[Vec<Rational>]) -> Result<Self> {
        if points.len() != g.num_vertices() {
            return Err(TropicalError::Dimension { expected: g.num_vertices(), got: points.len() });
        }
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(TropicalError::Dimension { expected: n, got: p.len() });
        }
        Self::from_values(g, (0..n).map(|i| points.iter().map(|p| p[i].clone()).collect()).collect())
    }

    pub fn constant(g: &WeightedMetricGraph, point: &[Rational]) -> Self {
        HarmonicTropicalization {
            values: point.iter().map(|c| vec![c.clone(); g.num_vertices()]).collect(),
            slopes: point.iter().map(|_| vec![Rational::zero(); g.num_edges()]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn slopes(&self) -> &[Vec<Rational>] {
        &self.slopes
    }

    pub fn point(&self, v: VertexId) -> Vec<Rational> {
        self.values.iter().map(|c| c[v.0].clone()).collect()
    }

    pub fn slope_vector(&self, e: EdgeId) -> Vec<Rational> {
        self.slopes.iter().map(|c| c[e.0].clone()).collect()
    }

    pub fn value_at(&self, g: &WeightedMetricGraph, p: &GraphPoint) -> Vec<Rational> {
        match p {
            GraphPoint::Vertex(v) => self.point(*v),
            GraphPoint::OnEdge(e, x) => {
                let tail = g.edge(*e).tail;
                self.values.iter().zip(&self.slopes).map(|(v, s)| &v[tail.0] + &s[e.0] * x).collect()
            }
        }
    }

    /// Component `i` as a `(0,0)`-form.
    pub fn component_form(&self, g: &WeightedMetricGraph, i: usize, order: u32) -> Result<GraphForm> {
        let polys = g
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| Polynomial::new(vec![self.values[i][e.tail.0].clone(), self.slopes[i][k].clone()]))
            .collect();
        let mut f = GraphForm::from_polynomials(g, Bidegree::B00, polys, order)?;
        for v in g.vertex_ids().filter(|&v| g.is_isolated(v)) {
            f.set_isolated(v, self.values[i][v.0].clone());
        }
        Ok(f)
    }

    /// `c·h`.
    pub fn scaled(&self, c: &Rational) -> Self {
        let sc = |rows: &Vec<Vec<Rational>>| rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect();
        HarmonicTropicalization { values: sc(&self.values), slopes: sc(&self.slopes) }
    }

    /// `h∘ν` on the unweighting of `g`.
    pub fn on_unweighting(&self, g: &WeightedMetricGraph) -> Self {
        let slopes = self
            .slopes
            .iter()
            .map(|s| s.iter().zip(g.edges()).map(|(x, e)| x * e.weight_q()).collect())
            .collect();
        HarmonicTropicalization { values: self.values.clone(), slopes }
    }

    /// `h∘φ` on the source of `φ`, from the images of the source vertices.
    pub fn compose_map(&self, m: &PLMap) -> Result<Self> {
        let points = m
            .source()
            .vertex_ids()
            .map(|v| Ok(self.value_at(m.target(), &m.image_of_point(&GraphPoint::Vertex(v))?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(m.source(), self.dim(), &points)
    }
}

/// Harmonicity, integrality of slopes and `(ℤ,Γ)`-harmonicity. With an
/// ambient graph the `Γ` condition is checked on the affine extensions of
/// the components to the endpoints of the parent edges, otherwise on the
/// vertex values.
pub fn check_harmonic_trop(
    g: &WeightedMetricGraph,
    h: &HarmonicTropicalization,
    gamma: &GammaGroup,
    ambient: Option<Ambient<'_>>,
) -> Result<TropCheck> {
    if h.values.iter().any(|v| v.len() != g.num_vertices()) || h.slopes.iter().any(|s| s.len() != g.num_edges()) {
        return Err(TropicalError::Dimension { expected: g.num_vertices(), got: h.values.first().map_or(0, Vec::len) });
    }
    if let Some(a) = ambient {
        if a.intervals.len() != g.num_edges() {
            return Err(TropicalError::Dimension { expected: g.num_edges(), got: a.intervals.len() });
        }
    }
    let mut witnesses = Vec::new();
    let mut harmonic = true;
    for i in 0..h.dim() {
        if let Some((vertex, sum)) = unbalanced_vertex(g, &h.slopes[i]) {
            harmonic = false;
            witnesses.push(TropWitness::Unbalanced { component: i, vertex: vertex.0, sum });
        }
    }
    let mut integral = harmonic;
    for (i, s) in h.slopes.iter().enumerate() {
        if let Some(k) = s.iter().position(|x| !x.is_integer()) {
            integral = false;
            witnesses.push(TropWitness::NonIntegralSlope { component: i, edge: k, slope: s[k].clone() });
        }
    }
    let mut in_gamma = true;
    for i in 0..h.dim() {
        match ambient {
            None => {
                if let Some(v) = g.vertex_ids().find(|v| !gamma.contains(&h.values[i][v.0])) {
                    in_gamma = false;
                    witnesses.push(TropWitness::VertexValue { component: i, vertex: v.0, value: h.values[i][v.0].clone() });
                }
            }
            Some(a) => {
                for (k, e) in g.edges().iter().enumerate() {
                    let iv = &a.intervals[k];
                    let start = &h.values[i][e.tail.0] - &h.slopes[i][k] * &iv.start;
                    let end = &start + &h.slopes[i][k] * &a.parent.edge(iv.edge).length;
                    if let Some(bad) = [start, end].into_iter().find(|x| !gamma.contains(x)) {
                        in_gamma = false;
                        witnesses.push(TropWitness::AmbientValue { component: i, edge: k, value: bad });
                        break;
                    }
                }
                if let Some(v) = g.vertex_ids().find(|&v| g.is_isolated(v) && !gamma.contains(&h.values[i][v.0])) {
                    in_gamma = false;
                    witnesses.push(TropWitness::VertexValue { component: i, vertex: v.0, value: h.values[i][v.0].clone() });
                }
            }
        }
    }
    Ok(TropCheck { harmonic, integral, gamma: integral && in_gamma, witnesses })
}

/// First interior vertex where the weighted outgoing slopes do not cancel.
fn unbalanced_vertex(g: &WeightedMetricGraph, slopes: &[Rational]) -> Option<(VertexId, Rational)> {
    g.vertex_ids().filter(|&v| !g.is_boundary(v)).find_map(|v| {
        let sum = g.outgoing(v).iter().fold(Rational::zero(), |acc, oe| {
            let s = &slopes[oe.edge.0];
            let w = g.edge(oe.edge).weight_q();
            match oe.orientation {
                crate::graph::Orientation::Forward => acc + w * s,
                crate::graph::Orientation::Backward => acc - w * s,
            }
        });
        (!sum.is_zero()).then_some((v, sum))
    })
}

fn ensure_harmonic(g: &WeightedMetricGraph, h: &HarmonicTropicalization) -> Result<()> {
    for i in 0..h.dim() {
        if let Some((v, _)) = unbalanced_vertex(g, &h.slopes[i]) {
            return Err(TropicalError::NotHarmonic { component: i, vertex: v.0 });
        }
    }
    Ok(())
}

/// `h*η`. On an edge where `h(t) = c + t·a` the coefficient is `g(c+ta)`,
/// `Σ a_i g_i(c+ta)` or `Σ a_i a_j g_{ij}(c+ta)` by bidegree.
pub fn pullback_lagerberg(g: &WeightedMetricGraph, h: &HarmonicTropicalization, eta: &LagerbergPolyForm, order: u32) -> Result<GraphForm> {
    if h.dim() != eta.dim() {
        return Err(TropicalError::Dimension { expected: h.dim(), got: eta.dim() });
    }
    ensure_harmonic(g, h)?;
    let n = h.dim();
    let polys = g
        .edge_ids()
        .map(|e| {
            let c = h.point(g.edge(e).tail);
            let a = h.slope_vector(e);
            match eta.bidegree() {
                Bidegree::B00 => eta.coeff(0).along_line(&c, &a),
                Bidegree::B10 | Bidegree::B01 => (0..n)
                    .filter(|&i| !a[i].is_zero())
                    .fold(Polynomial::zero(), |acc, i| &acc + &eta.coeff(i).along_line(&c, &a).scale(&a[i])),
                Bidegree::B11 => {
                    let mut acc = Polynomial::zero();
                    for i in (0..n).filter(|&i| !a[i].is_zero()) {
                        for j in (0..n).filter(|&j| !a[j].is_zero()) {
                            acc = &acc + &eta.coeff11(i, j).along_line(&c, &a).scale(&(&a[i] * &a[j]));
                        }
                    }
                    acc
                }
            }
        })
        .collect();
    let mut f = GraphForm::from_polynomials(g, eta.bidegree(), polys, order)?;
    if eta.bidegree() == Bidegree::B00 {
        for v in g.vertex_ids().filter(|&v| g.is_isolated(v)) {
            f.set_isolated(v, eta.coeff(0).eval(&h.point(v)));
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests;
