//! Differential forms of bidegree `(p,q) ∈ {0,1}²` on a weighted metric graph.
//!
//! A form stores one coefficient per unoriented edge on the canonical
//! orientation. Reversed data is derived by the sign table
//! `(0,0): +`, `(1,0),(0,1): −`, `(1,1): +` applied to the reversed function.
//! `(0,0)`-forms also carry a value at each isolated vertex.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::calculus::{glue_mismatch, CalculusError, PiecewisePolynomial, Polynomial};
use crate::graph::{Edge, EdgeId, GraphCorrespondence, GraphPoint, OrientedEdge, Orientation, Subgraph, VertexId, WeightedMetricGraph};
use crate::rational::{pow, Rational};
use crate::report::{Location, Rule, ValidationReport};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bidegree {
    B00,
    B10,
    B01,
    B11,
}

impl Bidegree {
    pub fn from_pq(p: u8, q: u8) -> Option<Self> {
        match (p, q) {
            (0, 0) => Some(Bidegree::B00),
            (1, 0) => Some(Bidegree::B10),
            (0, 1) => Some(Bidegree::B01),
            (1, 1) => Some(Bidegree::B11),
            _ => None,
        }
    }

    pub fn pq(self) -> (u8, u8) {
        match self {
            Bidegree::B00 => (0, 0),
            Bidegree::B10 => (1, 0),
            Bidegree::B01 => (0, 1),
            Bidegree::B11 => (1, 1),
        }
    }

    pub fn total(self) -> u32 {
        let (p, q) = self.pq();
        (p + q) as u32
    }

    /// Sign relating the coefficient on `ē` to the reversed coefficient on `e`.
    pub fn reversal_sign(self) -> Rational {
        if self.total() % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        }
    }

    pub fn all() -> [Bidegree; 4] {
        [Bidegree::B00, Bidegree::B10, Bidegree::B01, Bidegree::B11]
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.pq();
        write!(f, "({p},{q})")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("form has {got} edge coefficients, graph has {expected} edges")]
    EdgeCount { expected: usize, got: usize },
    #[error("{op} is not defined on {bidegree}-forms")]
    WrongBidegree { op: &'static str, bidegree: Bidegree },
    #[error("bidegrees {0} and {1} differ")]
    BidegreeMismatch(Bidegree, Bidegree),
    #[error("wedge of {0} and {1} exceeds bidegree (1,1)")]
    Overflow(Bidegree, Bidegree),
    #[error("vertex {0} is not an isolated vertex")]
    NotIsolated(usize),
    #[error("invalid form:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

pub type Result<T> = std::result::Result<T, FormError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphForm {
    bidegree: Bidegree,
    coeffs: Vec<PiecewisePolynomial>,
    isolated: BTreeMap<VertexId, Rational>,
    order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StokesCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

impl GraphForm {
    /// Coefficients are brought to the common order `K`; raising the order of
    /// a coefficient re-checks its junctions.
    pub fn new(
        bidegree: Bidegree,
        coeffs: Vec<PiecewisePolynomial>,
        isolated: BTreeMap<VertexId, Rational>,
        order: u32,
    ) -> Result<Self> {
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.with_order(order))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let isolated = if bidegree == Bidegree::B00 { isolated } else { BTreeMap::new() };
        Ok(GraphForm { bidegree, coeffs, isolated, order })
    }

    fn raw(bidegree: Bidegree, coeffs: Vec<PiecewisePolynomial>, isolated: BTreeMap<VertexId, Rational>, order: u32) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c.with_order(order).unwrap()).collect();
        let isolated = if bidegree == Bidegree::B00 { isolated } else { BTreeMap::new() };
        GraphForm { bidegree, coeffs, isolated, order }
    }

    /// One polynomial per edge, each used on the whole edge.
    pub fn from_polynomials(g: &WeightedMetricGraph, bidegree: Bidegree, polys: Vec<Polynomial>, order: u32) -> Result<Self> {
        if polys.len() != g.num_edges() {
            return Err(FormError::EdgeCount { expected: g.num_edges(), got: polys.len() });
        }
        let coeffs = g
            .edges()
            .iter()
            .zip(polys)
            .map(|(e, p)| PiecewisePolynomial::from_polynomial(e.length.clone(), p, order))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let isolated = isolated_fill(g, bidegree, &Rational::zero());
        Self::new(bidegree, coeffs, isolated, order)
    }

    pub fn edge_constants(g: &WeightedMetricGraph, bidegree: Bidegree, values: &[Rational], order: u32) -> Result<Self> {
        Self::from_polynomials(g, bidegree, values.iter().map(|c| Polynomial::constant(c.clone())).collect(), order)
    }

    pub fn constant(g: &WeightedMetricGraph, c: Rational, order: u32) -> Result<Self> {
        let values = vec![c.clone(); g.num_edges()];
        let mut f = Self::edge_constants(g, Bidegree::B00, &values, order)?;
        f.isolated = isolated_fill(g, Bidegree::B00, &c);
        Ok(f)
    }

    pub fn zero(g: &WeightedMetricGraph, bidegree: Bidegree, order: u32) -> Result<Self> {
        Self::edge_constants(g, bidegree, &vec![Rational::zero(); g.num_edges()], order)
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeff(&self, e: EdgeId) -> &PiecewisePolynomial {
        &self.coeffs[e.0]
    }

    pub fn coeffs(&self) -> &[PiecewisePolynomial] {
        &self.coeffs
    }

    pub fn isolated(&self) -> &BTreeMap<VertexId, Rational> {
        &self.isolated
    }

    pub fn set_isolated(&mut self, v: VertexId, value: Rational) {
        if self.bidegree == Bidegree::B00 {
            self.isolated.insert(v, value);
        }
    }

    /// Coefficient seen along an oriented edge, in that edge's parameter.
    pub fn oriented_coeff(&self, oe: OrientedEdge) -> PiecewisePolynomial {
        let f = &self.coeffs[oe.edge.0];
        match oe.orientation {
            Orientation::Forward => f.clone(),
            Orientation::Backward => f.reverse().scale(&self.bidegree.reversal_sign()),
        }
    }

    /// Same bidegree, same edge functions, same isolated values; orders may differ.
    pub fn same_coefficients(&self, other: &GraphForm) -> bool {
        self.bidegree == other.bidegree
            && self.coeffs.len() == other.coeffs.len()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.same_function(b))
            && self.isolated == other.isolated
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(PiecewisePolynomial::is_zero) && self.isolated.values().all(Zero::is_zero)
    }

    fn check_edges(&self, g: &WeightedMetricGraph) -> Result<()> {
        if self.coeffs.len() != g.num_edges() {
            return Err(FormError::EdgeCount { expected: g.num_edges(), got: self.coeffs.len() });
        }
        Ok(())
    }

    fn zip_with(&self, other: &GraphForm, op: impl Fn(&PiecewisePolynomial, &PiecewisePolynomial) -> std::result::Result<PiecewisePolynomial, CalculusError>) -> Result<Vec<PiecewisePolynomial>> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(FormError::EdgeCount { expected: self.coeffs.len(), got: other.coeffs.len() });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| op(a, b))
            .collect::<std::result::Result<Vec<_>, _>>()?)
    }

    pub fn add(&self, other: &GraphForm) -> Result<GraphForm> {
        self.linear(other, &Rational::one())
    }

    pub fn sub(&self, other: &GraphForm) -> Result<GraphForm> {
        self.linear(other, &-Rational::one())
    }

    /// `self + c·other`.
    pub fn linear(&self, other: &GraphForm, c: &Rational) -> Result<GraphForm> {
        if self.bidegree != other.bidegree {
            return Err(FormError::BidegreeMismatch(self.bidegree, other.bidegree));
        }
        let coeffs = self.zip_with(other, |a, b| a.add(&b.scale(c)))?;
        let mut isolated = self.isolated.clone();
        for (v, x) in &other.isolated {
            *isolated.entry(*v).or_insert_with(Rational::zero) += c * x;
        }
        Ok(GraphForm::raw(self.bidegree, coeffs, isolated, self.order.min(other.order)))
    }

    pub fn scale(&self, c: &Rational) -> GraphForm {
        GraphForm {
            bidegree: self.bidegree,
            coeffs: self.coeffs.iter().map(|f| f.scale(c)).collect(),
            isolated: self.isolated.iter().map(|(v, x)| (*v, x * c)).collect(),
            order: self.order,
        }
    }

    /// `d''`: `(0,0) → (0,1)` with coefficient `f'`, `(1,0) → (1,1)` with `−f'`.
    pub fn d_second(&self) -> Result<GraphForm> {
        let (target, sign) = match self.bidegree {
            Bidegree::B00 => (Bidegree::B01, Rational::one()),
            Bidegree::B10 => (Bidegree::B11, -Rational::one()),
            b => return Err(FormError::WrongBidegree { op: "d''", bidegree: b }),
        };
        self.differentiated(target, &sign)
    }

    /// `d'`: `(0,0) → (1,0)` and `(0,1) → (1,1)`, both with coefficient `f'`.
    pub fn d_first(&self) -> Result<GraphForm> {
        let target = match self.bidegree {
            Bidegree::B00 => Bidegree::B10,
            Bidegree::B01 => Bidegree::B11,
            b => return Err(FormError::WrongBidegree { op: "d'", bidegree: b }),
        };
        self.differentiated(target, &Rational::one())
    }

    fn differentiated(&self, target: Bidegree, sign: &Rational) -> Result<GraphForm> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|f| f.differentiate().map(|d| d.scale(sign)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let order = self.order.checked_sub(1).ok_or(CalculusError::NotDifferentiable)?;
        Ok(GraphForm { bidegree: target, coeffs, isolated: BTreeMap::new(), order })
    }

    /// Alternating product; `(0,1)∧(1,0)` carries a minus sign.
    pub fn wedge(&self, other: &GraphForm) -> Result<GraphForm> {
        use Bidegree::*;
        let (p1, q1) = self.bidegree.pq();
        let (p2, q2) = other.bidegree.pq();
        let target = Bidegree::from_pq(p1 + p2, q1 + q2).ok_or(FormError::Overflow(self.bidegree, other.bidegree))?;
        let sign = if (self.bidegree, other.bidegree) == (B01, B10) { -Rational::one() } else { Rational::one() };
        let coeffs = self.zip_with(other, |a, b| a.mul(b).map(|c| c.scale(&sign)))?;
        let mut isolated = BTreeMap::new();
        if target == B00 {
            for (v, x) in &self.isolated {
                if let Some(y) = other.isolated.get(v) {
                    isolated.insert(*v, x * y);
                }
            }
        }
        Ok(GraphForm::raw(target, coeffs, isolated, self.order.min(other.order)))
    }

    /// `J`: identity on `(0,0)`, `−1` on `(1,1)`, swaps `(1,0)` and `(0,1)`.
    pub fn lagerberg_involution(&self) -> GraphForm {
        match self.bidegree {
            Bidegree::B00 => self.clone(),
            Bidegree::B10 => GraphForm { bidegree: Bidegree::B01, ..self.clone() },
            Bidegree::B01 => GraphForm { bidegree: Bidegree::B10, ..self.clone() },
            Bidegree::B11 => self.scale(&-Rational::one()),
        }
    }

    /// `Σ_e w(e) ∫₀^ℓ f_e` for a `(1,1)`-form.
    pub fn integrate_graph(&self, g: &WeightedMetricGraph) -> Result<Rational> {
        self.check_edges(g)?;
        if self.bidegree != Bidegree::B11 {
            return Err(FormError::WrongBidegree { op: "graph integral", bidegree: self.bidegree });
        }
        Ok(g.edges()
            .iter()
            .zip(&self.coeffs)
            .map(|(e, f)| e.weight_q() * f.integral())
            .fold(Rational::zero(), |a, b| a + b))
    }

    /// Boundary integral: for `(1,0)` the sum over boundary vertices of
    /// `w(e)·f_e(v)` over outgoing edges, for `(0,1)` over incoming edges.
    pub fn integrate_boundary(&self, g: &WeightedMetricGraph) -> Result<Rational> {
        self.check_edges(g)?;
        let incoming = match self.bidegree {
            Bidegree::B10 => false,
            Bidegree::B01 => true,
            b => return Err(FormError::WrongBidegree { op: "boundary integral", bidegree: b }),
        };
        let mut total = Rational::zero();
        for v in g.boundary_vertices() {
            for oe in g.outgoing(v) {
                let w = g.edge(oe.edge).weight_q();
                let value = if incoming {
                    // the incoming edge is the reverse of oe, and v is its head
                    let rev = OrientedEdge { edge: oe.edge, orientation: oe.orientation.reversed() };
                    let f = self.oriented_coeff(rev);
                    f.evaluate(&f.length().clone())?
                } else {
                    self.oriented_coeff(oe).evaluate(&Rational::zero())?
                };
                total += w * value;
            }
        }
        Ok(total)
    }

    /// The same boundary integral summed over every vertex; agrees with
    /// `integrate_boundary` for valid forms.
    pub fn integrate_boundary_all_vertices(&self, g: &WeightedMetricGraph) -> Result<Rational> {
        self.check_edges(g)?;
        let sign = match self.bidegree {
            Bidegree::B10 => Rational::one(),
            Bidegree::B01 => -Rational::one(),
            b => return Err(FormError::WrongBidegree { op: "boundary integral", bidegree: b }),
        };
        let mut total = Rational::zero();
        for (e, f) in g.edges().iter().zip(&self.coeffs) {
            let diff = f.evaluate(&Rational::zero())? - f.evaluate(&e.length)?;
            total += e.weight_q() * &sign * diff;
        }
        Ok(total)
    }

    pub fn stokes_check(&self, g: &WeightedMetricGraph) -> Result<StokesCheck> {
        let d = match self.bidegree {
            Bidegree::B10 => self.d_second()?,
            Bidegree::B01 => self.d_first()?,
            b => return Err(FormError::WrongBidegree { op: "Stokes check", bidegree: b }),
        };
        let lhs = d.integrate_graph(g)?;
        let rhs = self.integrate_boundary(g)?;
        let equal = lhs == rhs;
        Ok(StokesCheck { lhs, rhs, equal })
    }

    /// Value of a `(0,0)`-form at a point.
    pub fn value_at(&self, g: &WeightedMetricGraph, point: &GraphPoint) -> Result<Rational> {
        if self.bidegree != Bidegree::B00 {
            return Err(FormError::WrongBidegree { op: "point evaluation", bidegree: self.bidegree });
        }
        match point {
            GraphPoint::OnEdge(e, x) => Ok(self.coeffs[e.0].evaluate(x)?),
            GraphPoint::Vertex(v) => match g.outgoing(*v).first() {
                Some(oe) => Ok(self.oriented_coeff(*oe).evaluate(&Rational::zero())?),
                None => Ok(self.isolated.get(v).cloned().unwrap_or_else(Rational::zero)),
            },
        }
    }

    /// Transport to the unweighting: `f ↦ w^{p+q}·f(w·x₀)`.
    pub fn to_unweighted(&self, g: &WeightedMetricGraph) -> Result<GraphForm> {
        self.check_edges(g)?;
        let k = self.bidegree.total();
        let coeffs = g
            .edges()
            .iter()
            .zip(&self.coeffs)
            .map(|(e, f)| {
                let w = e.weight_q();
                f.reparametrize(&w, &Rational::zero(), &e.unweighted_length()).map(|h| h.scale(&pow(&w, k)))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(GraphForm { bidegree: self.bidegree, coeffs, isolated: self.isolated.clone(), order: self.order })
    }

    /// Inverse of `to_unweighted`; `g` is the weighted graph.
    pub fn from_unweighted(&self, g: &WeightedMetricGraph) -> Result<GraphForm> {
        self.check_edges(g)?;
        let k = self.bidegree.total();
        let coeffs = g
            .edges()
            .iter()
            .zip(&self.coeffs)
            .map(|(e, f)| {
                let w = e.weight_q();
                let inv = Rational::one() / &w;
                f.reparametrize(&inv, &Rational::zero(), &e.length).map(|h| h.scale(&pow(&inv, k)))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(GraphForm { bidegree: self.bidegree, coeffs, isolated: self.isolated.clone(), order: self.order })
    }

    /// Pulls the form on `target` back to `source` along a correspondence.
    /// Each source edge runs over `[a, b]` of a target edge with speed
    /// `s = (b−a)/ℓ`, and coefficients pick up `s^{p+q}`.
    pub fn along_correspondence(&self, source: &WeightedMetricGraph, target: &WeightedMetricGraph, corr: &GraphCorrespondence) -> Result<GraphForm> {
        self.check_edges(target)?;
        let k = self.bidegree.total();
        let coeffs = source
            .edges()
            .iter()
            .zip(&corr.edge_intervals)
            .map(|(e, iv)| {
                let s = (&iv.end - &iv.start) / &e.length;
                self.coeffs[iv.edge.0].reparametrize(&s, &iv.start, &e.length).map(|h| h.scale(&pow(&s, k)))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut isolated = BTreeMap::new();
        if self.bidegree == Bidegree::B00 {
            for v in source.vertex_ids().filter(|&v| source.is_isolated(v)) {
                isolated.insert(v, self.value_at(target, &corr.vertex_points[v.0])?);
            }
        }
        Ok(GraphForm { bidegree: self.bidegree, coeffs, isolated, order: self.order })
    }

    /// Inverse of `along_correspondence`: reassembles a form on `source`
    /// (a refinement of `target`) into a form on `target`.
    pub fn collapse_correspondence(&self, source: &WeightedMetricGraph, target: &WeightedMetricGraph, corr: &GraphCorrespondence) -> Result<GraphForm> {
        self.check_edges(source)?;
        let k = self.bidegree.total();
        let mut parts: Vec<Vec<(Rational, PiecewisePolynomial)>> = vec![Vec::new(); target.num_edges()];
        for ((e, iv), f) in source.edges().iter().zip(&corr.edge_intervals).zip(&self.coeffs) {
            let s = (&iv.end - &iv.start) / &e.length;
            let inv = Rational::one() / &s;
            let piece = f.reparametrize(&inv, &Rational::zero(), &(&iv.end - &iv.start))?.scale(&pow(&inv, k));
            parts[iv.edge.0].push((iv.start.clone(), piece));
        }
        let coeffs = parts
            .into_iter()
            .map(|mut ps| {
                ps.sort_by(|a, b| a.0.cmp(&b.0));
                let ps: Vec<PiecewisePolynomial> = ps.into_iter().map(|(_, p)| p).collect();
                PiecewisePolynomial::concat(&ps, self.order)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut isolated = BTreeMap::new();
        if self.bidegree == Bidegree::B00 {
            for (sv, pt) in corr.vertex_points.iter().enumerate() {
                if let GraphPoint::Vertex(v) = pt {
                    if target.is_isolated(*v) {
                        isolated.insert(*v, self.value_at(source, &GraphPoint::Vertex(VertexId(sv)))?);
                    }
                }
            }
        }
        Ok(GraphForm { bidegree: self.bidegree, coeffs, isolated, order: self.order })
    }

    /// Restriction to a subgraph (edges unchanged).
    pub fn restrict_to_subgraph(&self, g: &WeightedMetricGraph, sub: &Subgraph) -> Result<GraphForm> {
        self.check_edges(g)?;
        let coeffs = sub.edges.iter().map(|e| self.coeffs[e.0].clone()).collect();
        let mut isolated = BTreeMap::new();
        if self.bidegree == Bidegree::B00 {
            for (i, v) in sub.vertices.iter().enumerate() {
                if sub.graph.is_isolated(VertexId(i)) {
                    isolated.insert(VertexId(i), self.value_at(g, &GraphPoint::Vertex(*v))?);
                }
            }
        }
        Ok(GraphForm { bidegree: self.bidegree, coeffs, isolated, order: self.order })
    }
}

fn isolated_fill(g: &WeightedMetricGraph, bidegree: Bidegree, value: &Rational) -> BTreeMap<VertexId, Rational> {
    if bidegree != Bidegree::B00 {
        return BTreeMap::new();
    }
    g.vertex_ids().filter(|&v| g.is_isolated(v)).map(|v| (v, value.clone())).collect()
}

/// First pieces at `v` of the outgoing edges, pre-scaled as the glue
/// condition through a valence-2 vertex requires.
fn glue_inputs(form: &GraphForm, g: &WeightedMetricGraph, out: &[OrientedEdge]) -> (Polynomial, Polynomial, Rational, Rational) {
    let w1 = g.edge(out[0].edge).weight_q();
    let w2 = g.edge(out[1].edge).weight_q();
    let f1 = form.oriented_coeff(out[0]).first_piece().clone();
    let f2 = form.oriented_coeff(out[1]).first_piece().clone();
    let (s1, s2) = match form.bidegree {
        Bidegree::B00 => (Rational::one(), Rational::one()),
        Bidegree::B10 | Bidegree::B01 => (w1.clone(), -w2.clone()),
        Bidegree::B11 => (&w1 * &w1, &w2 * &w2),
    };
    (f1.scale(&s1), f2.scale(&s2), w1, w2)
}

/// Reports every violated vertex condition. Boundary vertices are exempt;
/// continuity of `(0,0)`-forms is required everywhere.
pub fn validate_form(g: &WeightedMetricGraph, form: &GraphForm) -> Result<ValidationReport> {
    form.check_edges(g)?;
    let mut r = ValidationReport::new();
    let zero = Rational::zero();
    for (i, (e, f)) in g.edges().iter().zip(&form.coeffs).enumerate() {
        if *f.length() != e.length {
            r.push(Rule::PieceLength, Location::Edge(i), format!("{} vs {}", f.length(), e.length));
        }
    }
    if !r.is_valid() {
        return Ok(r);
    }
    for v in g.vertex_ids() {
        let out = g.outgoing(v);
        let loc = || Location::Vertex(v.0);
        if form.bidegree == Bidegree::B00 {
            let has_value = form.isolated.contains_key(&v);
            if out.is_empty() != has_value {
                r.push(Rule::IsolatedValue, loc(), if has_value { "value on a non-isolated vertex" } else { "missing value" });
            }
            let values: Vec<Rational> = out.iter().map(|oe| form.oriented_coeff(*oe).first_piece().eval(&zero)).collect();
            if values.windows(2).any(|w| w[0] != w[1]) {
                r.push(Rule::Continuity, loc(), "");
            }
        }
        if g.is_boundary(v) || out.is_empty() {
            continue;
        }
        match out.len() {
            1 => {
                let p = form.oriented_coeff(out[0]).first_piece().clone();
                if form.bidegree == Bidegree::B00 {
                    if !p.is_constant() {
                        r.push(Rule::LeafNotConstant, loc(), "");
                    }
                } else if !p.is_zero() {
                    r.push(Rule::LeafNotZero, loc(), "");
                }
            }
            2 => {
                let (p1, p2, w1, w2) = glue_inputs(form, g, &out);
                if let Some(n) = glue_mismatch(&p1, &p2, &w1, &w2, form.order) {
                    r.push(Rule::ValenceTwoGlue, loc(), format!("derivative {n}"));
                }
            }
            _ => {
                let sum = match form.bidegree {
                    Bidegree::B00 => Some(out.iter().fold(Rational::zero(), |acc, oe| {
                        acc + g.edge(oe.edge).weight_q() * form.oriented_coeff(*oe).first_piece().derivative_at(1, &zero)
                    })),
                    Bidegree::B10 | Bidegree::B01 => Some(out.iter().fold(Rational::zero(), |acc, oe| {
                        acc + g.edge(oe.edge).weight_q() * form.oriented_coeff(*oe).first_piece().eval(&zero)
                    })),
                    Bidegree::B11 => None,
                };
                if let Some(s) = sum {
                    if !s.is_zero() {
                        r.push(Rule::WeightedSum, loc(), s.to_string());
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Checks that `form` is valid on `g`, turning violations into an error.
pub fn ensure_valid(g: &WeightedMetricGraph, form: &GraphForm) -> Result<()> {
    let r = validate_form(g, form)?;
    if r.is_valid() {
        Ok(())
    } else {
        Err(FormError::Invalid(r))
    }
}

/// `Edge` lengths of `g` as a convenience for building coefficient lists.
pub fn edge_lengths(g: &WeightedMetricGraph) -> Vec<Rational> {
    g.edges().iter().map(|e: &Edge| e.length.clone()).collect()
}
