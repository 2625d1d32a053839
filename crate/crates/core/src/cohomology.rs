//! Dolbeault cohomology of graphs: dimensions, explicit bases, `d''`-preimages,
//! class coordinates, the Poincaré pairing and induced maps.
//!
//! Linear algebra runs on the unweighting, where the incidence matrix is the
//! whole story; forms are moved back and forth with the `ν*` transport.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::calculus::{make_bump, PiecewisePolynomial};
use crate::forms::{Bidegree, FormError, GraphForm};
use crate::graph::{Components, EdgeId, Orientation, OrientedEdge, VertexId, WeightedMetricGraph};
use crate::harmonic::{pullback_form, MapError, PLMap};
use crate::linalg::Matrix;
use crate::rational::{rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("{op} is not defined in bidegree {bidegree}")]
    WrongBidegree { op: &'static str, bidegree: Bidegree },
    #[error("form is not d''-closed")]
    NotClosed,
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("class has no expression in the basis")]
    NotInSpan,
}

pub type Result<T> = std::result::Result<T, CohomologyError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Dimensions {
    pub h00: usize,
    pub h10: usize,
    pub h01: usize,
    pub h11: usize,
}

impl Dimensions {
    pub fn get(&self, b: Bidegree) -> usize {
        match b {
            Bidegree::B00 => self.h00,
            Bidegree::B10 => self.h10,
            Bidegree::B01 => self.h01,
            Bidegree::B11 => self.h11,
        }
    }

    fn plus(self, o: Dimensions) -> Dimensions {
        Dimensions { h00: self.h00 + o.h00, h10: self.h10 + o.h10, h01: self.h01 + o.h01, h11: self.h11 + o.h11 }
    }
}

impl fmt::Display for Dimensions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.h00, self.h10, self.h01, self.h11)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionTable {
    pub per_component: Vec<Dimensions>,
    pub total: Dimensions,
    /// Closed-form values from genus and boundary size, per component.
    pub closed_form: Vec<Dimensions>,
    pub agrees: bool,
}

/// Closed-form table for a connected graph.
pub fn closed_form_dimensions(genus: usize, boundary: usize, has_edges: bool) -> Dimensions {
    if boundary == 0 {
        Dimensions { h00: 1, h10: genus, h01: genus, h11: usize::from(has_edges) }
    } else {
        Dimensions { h00: 1, h10: genus + boundary - 1, h01: genus, h11: 0 }
    }
}

fn interior_rows(g: &WeightedMetricGraph) -> Vec<usize> {
    g.vertex_ids().filter(|&v| !g.is_boundary(v)).map(|v| v.0).collect()
}

/// `H[v][e] = 1` when `v` is the head of `e`.
fn head_matrix(g: &WeightedMetricGraph) -> Matrix {
    let mut h = Matrix::zeros(g.num_vertices(), g.num_edges());
    for (j, e) in g.edges().iter().enumerate() {
        h[(e.head.0, j)] = Rational::one();
    }
    h
}

/// Dimensions of a graph computed by linear algebra on its incidence matrix.
pub fn computed_dimensions(g: &WeightedMetricGraph) -> Dimensions {
    let b = g.incidence_matrix();
    let rank_b = b.rank();
    let rows = interior_rows(g);
    let b_int = b.select_rows(&rows);
    let rank_int = b_int.rank();
    let with_heads = b_int.hstack(&head_matrix(g).select_rows(&rows));
    Dimensions {
        h00: g.num_vertices() - rank_b,
        h10: g.num_edges() - rank_int,
        h01: g.num_edges() - rank_b,
        h11: with_heads.rank() - rank_int,
    }
}

pub fn dolbeault_dimensions(g: &WeightedMetricGraph) -> DimensionTable {
    let comps = g.components();
    let genus = g.genus();
    let mut per_component = Vec::new();
    let mut closed_form = Vec::new();
    for c in 0..comps.count {
        let sub = g.component_subgraph(&comps, c);
        per_component.push(computed_dimensions(&sub.graph));
        closed_form.push(closed_form_dimensions(
            genus[c].1 as usize,
            sub.graph.boundary_vertices().len(),
            sub.graph.num_edges() > 0,
        ));
    }
    let total = per_component.iter().fold(Dimensions::default(), |a, d| a.plus(*d));
    let agrees = per_component == closed_form;
    DimensionTable { per_component, total, closed_form, agrees }
}

/// Spanning forest grown from the lowest vertex of each component by adding
/// the lowest-id edge with exactly one endpoint already reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningForest {
    pub tree_edges: Vec<EdgeId>,
    pub non_tree_edges: Vec<EdgeId>,
    /// Oriented tree edge arriving at each vertex from the root side.
    pub parent: Vec<Option<OrientedEdge>>,
    pub root: Vec<VertexId>,
}

impl SpanningForest {
    pub fn new(g: &WeightedMetricGraph) -> Self {
        let comps = g.components();
        let n = g.num_vertices();
        let mut reached = vec![false; n];
        let mut in_tree = vec![false; g.num_edges()];
        let mut parent = vec![None; n];
        let mut root = vec![VertexId(0); n];
        for c in 0..comps.count {
            let vs = comps.vertices(c);
            let r = vs[0];
            reached[r.0] = true;
            loop {
                let next = g.edge_ids().find(|&e| {
                    let edge = g.edge(e);
                    !in_tree[e.0] && reached[edge.tail.0] != reached[edge.head.0]
                });
                let Some(e) = next else { break };
                let edge = g.edge(e);
                in_tree[e.0] = true;
                let (v, o) = if reached[edge.tail.0] {
                    (edge.head, Orientation::Forward)
                } else {
                    (edge.tail, Orientation::Backward)
                };
                reached[v.0] = true;
                parent[v.0] = Some(OrientedEdge { edge: e, orientation: o });
            }
            for v in vs {
                root[v.0] = r;
            }
        }
        let tree_edges = g.edge_ids().filter(|e| in_tree[e.0]).collect();
        let non_tree_edges = g.edge_ids().filter(|e| !in_tree[e.0]).collect();
        SpanningForest { tree_edges, non_tree_edges, parent, root }
    }

    /// Tree path from the root of `v`'s component to `v`.
    pub fn path_from_root(&self, g: &WeightedMetricGraph, v: VertexId) -> Vec<OrientedEdge> {
        let mut path = Vec::new();
        let mut at = v;
        while let Some(oe) = self.parent[at.0] {
            path.push(oe);
            at = g.oriented_tail(oe);
        }
        path.reverse();
        path
    }

    /// Root to tail, the edge forward, then head back to the root.
    pub fn fundamental_cycle(&self, g: &WeightedMetricGraph, e: EdgeId) -> Vec<OrientedEdge> {
        let edge = g.edge(e);
        let mut cycle = self.path_from_root(g, edge.tail);
        cycle.push(OrientedEdge { edge: e, orientation: Orientation::Forward });
        let back = self.path_from_root(g, edge.head);
        cycle.extend(back.into_iter().rev().map(|oe| OrientedEdge { edge: oe.edge, orientation: oe.orientation.reversed() }));
        cycle
    }
}

/// `∫_γ ω` of a `(0,1)`- or `(1,0)`-form along oriented edges.
pub fn path_integral(form: &GraphForm, path: &[OrientedEdge]) -> Rational {
    path.iter().map(|oe| form.oriented_coeff(*oe).integral()).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyBasis {
    pub order: u32,
    /// Indicator function of each component.
    pub h00: Vec<GraphForm>,
    /// Edge-constant `(1,0)`-forms.
    pub h10: Vec<GraphForm>,
    /// Bump `(0,1)`-form on each non-forest edge.
    pub h01: Vec<GraphForm>,
    /// Bump `(1,1)`-form of integral 1 on each boundaryless component with an edge.
    pub h11: Vec<GraphForm>,
    pub forest: SpanningForest,
    pub cycles: Vec<Vec<OrientedEdge>>,
    /// Component carrying each `h11` generator.
    pub h11_components: Vec<usize>,
    components: Components,
    /// Unweighted coefficient vectors of the `h10` forms.
    h10_vectors: Vec<Vec<Rational>>,
}

impl CohomologyBasis {
    pub fn dimensions(&self) -> Dimensions {
        Dimensions { h00: self.h00.len(), h10: self.h10.len(), h01: self.h01.len(), h11: self.h11.len() }
    }

    pub fn get(&self, b: Bidegree) -> &[GraphForm] {
        match b {
            Bidegree::B00 => &self.h00,
            Bidegree::B10 => &self.h10,
            Bidegree::B01 => &self.h01,
            Bidegree::B11 => &self.h11,
        }
    }
}

/// Bump on one edge, zero elsewhere, supported in the middle half.
fn single_bump(g: &WeightedMetricGraph, bidegree: Bidegree, e: EdgeId, target: &Rational, order: u32) -> Result<GraphForm> {
    let mut coeffs = Vec::with_capacity(g.num_edges());
    for (i, edge) in g.edges().iter().enumerate() {
        let l = &edge.length;
        coeffs.push(if i == e.0 {
            make_bump(l, &(l * rat(1, 4)), &(l * rat(3, 4)), order, target).map_err(FormError::from)?
        } else {
            PiecewisePolynomial::zero(l.clone(), order).map_err(FormError::from)?
        });
    }
    Ok(GraphForm::new(bidegree, coeffs, BTreeMap::new(), order)?)
}

fn h10_kernel(g: &WeightedMetricGraph) -> Vec<Vec<Rational>> {
    let b_int = g.incidence_matrix().select_rows(&interior_rows(g));
    if b_int.rows() == 0 {
        Matrix::zeros(1, g.num_edges()).kernel()
    } else {
        b_int.kernel()
    }
}

pub fn cohomology_basis(g: &WeightedMetricGraph, order: u32) -> Result<CohomologyBasis> {
    let comps = g.components();
    let mut h00 = Vec::new();
    for c in 0..comps.count {
        let polys: Vec<PiecewisePolynomial> = g
            .edges()
            .iter()
            .map(|e| {
                let v = if comps.of_vertex[e.tail.0] == c { Rational::one() } else { Rational::zero() };
                PiecewisePolynomial::constant(e.length.clone(), v, order)
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(FormError::from)?;
        let isolated = g
            .vertex_ids()
            .filter(|&v| g.is_isolated(v))
            .map(|v| (v, if comps.of_vertex[v.0] == c { Rational::one() } else { Rational::zero() }))
            .collect();
        h00.push(GraphForm::new(Bidegree::B00, polys, isolated, order)?);
    }
    let h10_vectors = h10_kernel(g);
    let (g0, _) = g.unweight();
    let mut h10 = Vec::new();
    for c0 in &h10_vectors {
        let f0 = GraphForm::edge_constants(&g0, Bidegree::B10, c0, order)?;
        h10.push(f0.from_unweighted(g)?);
    }
    let forest = SpanningForest::new(g);
    let mut h01 = Vec::new();
    let mut cycles = Vec::new();
    for &e in &forest.non_tree_edges {
        h01.push(single_bump(g, Bidegree::B01, e, &Rational::one(), order)?);
        cycles.push(forest.fundamental_cycle(g, e));
    }
    let mut h11 = Vec::new();
    let mut h11_components = Vec::new();
    for c in 0..comps.count {
        let vs = comps.vertices(c);
        if vs.iter().any(|&v| g.is_boundary(v)) {
            continue;
        }
        let Some(e) = g.edge_ids().find(|e| comps.of_vertex[g.edge(*e).tail.0] == c) else { continue };
        let target = Rational::one() / g.edge(e).weight_q();
        h11.push(single_bump(g, Bidegree::B11, e, &target, order)?);
        h11_components.push(c);
    }
    Ok(CohomologyBasis { order, h00, h10, h01, h11, forest, cycles, h11_components, components: comps, h10_vectors })
}

/// Outcome of a `d''`-antiderivative search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preimage {
    Exact(GraphForm),
    /// For `(1,1)`: the integral over each component (zero on components with
    /// boundary). For `(0,1)`: the integrals along the fundamental cycles.
    Obstructed(Vec<Rational>),
}

impl Preimage {
    pub fn exact(self) -> Option<GraphForm> {
        match self {
            Preimage::Exact(f) => Some(f),
            Preimage::Obstructed(_) => None,
        }
    }
}

/// Integral of a `(1,1)`-form over each component.
pub fn component_integrals(g: &WeightedMetricGraph, omega: &GraphForm) -> Vec<Rational> {
    let comps = g.components();
    let mut out = vec![Rational::zero(); comps.count];
    for (e, f) in g.edges().iter().zip(omega.coeffs()) {
        out[comps.of_vertex[e.tail.0]] += e.weight_q() * f.integral();
    }
    out
}

/// Solves `d''η = ω` for `ω` of bidegree `(1,1)` or `(0,1)`. The preimage has
/// smoothness order one more than `ω`.
pub fn dbar_preimage(g: &WeightedMetricGraph, omega: &GraphForm) -> Result<Preimage> {
    crate::forms::ensure_valid(g, omega)?;
    match omega.bidegree() {
        Bidegree::B11 => preimage_11(g, omega),
        Bidegree::B01 => preimage_01(g, omega),
        b => Err(CohomologyError::WrongBidegree { op: "d''-preimage", bidegree: b }),
    }
}

fn preimage_11(g: &WeightedMetricGraph, omega: &GraphForm) -> Result<Preimage> {
    let (g0, _) = g.unweight();
    let w0 = omega.to_unweighted(g)?;
    let mu: Vec<Rational> = w0.coeffs().iter().map(PiecewisePolynomial::integral).collect();
    let mut m = vec![Rational::zero(); g.num_vertices()];
    for (e, mu_e) in g0.edges().iter().zip(&mu) {
        m[e.head.0] += mu_e;
    }
    let rows = interior_rows(&g0);
    let b_int = g0.incidence_matrix().select_rows(&rows);
    let rhs: Vec<Rational> = rows.iter().map(|&v| m[v].clone()).collect();
    let solved = if rows.is_empty() { Some(vec![Rational::zero(); g.num_edges()]) } else { b_int.solve(&rhs) };
    let Some(c) = solved else {
        let comps = g.components();
        let mut totals = component_integrals(g, omega);
        for (k, t) in totals.iter_mut().enumerate() {
            if comps.vertices(k).iter().any(|&v| g.is_boundary(v)) {
                *t = Rational::zero();
            }
        }
        return Ok(Preimage::Obstructed(totals));
    };
    let order = omega.order() + 1;
    let coeffs = w0
        .coeffs()
        .iter()
        .zip(&c)
        .map(|(f, ce)| {
            let anti = f.antiderivative().neg();
            let shift = PiecewisePolynomial::constant(f.length().clone(), ce.clone(), order)?;
            anti.add(&shift)
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(FormError::from)?;
    let eta0 = GraphForm::new(Bidegree::B10, coeffs, BTreeMap::new(), order)?;
    Ok(Preimage::Exact(eta0.from_unweighted(g)?))
}

fn preimage_01(g: &WeightedMetricGraph, omega: &GraphForm) -> Result<Preimage> {
    let forest = SpanningForest::new(g);
    let obstruction: Vec<Rational> =
        forest.non_tree_edges.iter().map(|&e| path_integral(omega, &forest.fundamental_cycle(g, e))).collect();
    if obstruction.iter().any(|x| !x.is_zero()) {
        return Ok(Preimage::Obstructed(obstruction));
    }
    let values: Vec<Rational> = g.vertex_ids().map(|v| path_integral(omega, &forest.path_from_root(g, v))).collect();
    let order = omega.order() + 1;
    let coeffs = g
        .edges()
        .iter()
        .zip(omega.coeffs())
        .map(|(e, f)| {
            let anti = f.antiderivative();
            let shift = PiecewisePolynomial::constant(e.length.clone(), values[e.tail.0].clone(), order)?;
            anti.add(&shift)
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(FormError::from)?;
    let isolated = g.vertex_ids().filter(|&v| g.is_isolated(v)).map(|v| (v, Rational::zero())).collect();
    Ok(Preimage::Exact(GraphForm::new(Bidegree::B00, coeffs, isolated, order)?))
}

fn is_closed(omega: &GraphForm) -> Result<bool> {
    Ok(match omega.bidegree() {
        Bidegree::B00 | Bidegree::B10 => omega.d_second()?.is_zero(),
        _ => true,
    })
}

/// Coordinates of the class of a `d''`-closed form in the basis.
pub fn class_coordinates(g: &WeightedMetricGraph, basis: &CohomologyBasis, omega: &GraphForm) -> Result<Vec<Rational>> {
    crate::forms::ensure_valid(g, omega)?;
    if !is_closed(omega)? {
        return Err(CohomologyError::NotClosed);
    }
    match omega.bidegree() {
        Bidegree::B00 => (0..basis.components.count)
            .map(|c| {
                let v = basis.components.vertices(c)[0];
                Ok(omega.value_at(g, &crate::graph::GraphPoint::Vertex(v))?)
            })
            .collect(),
        Bidegree::B10 => {
            if basis.h10_vectors.is_empty() {
                return Ok(Vec::new());
            }
            let c0: Vec<Rational> =
                g.edges().iter().zip(omega.coeffs()).map(|(e, f)| e.weight_q() * f.first_piece().coeff(0)).collect();
            let k = Matrix::from_columns(&basis.h10_vectors, g.num_edges());
            k.solve(&c0).ok_or(CohomologyError::NotInSpan)
        }
        Bidegree::B01 => Ok(basis.cycles.iter().map(|c| path_integral(omega, c)).collect()),
        Bidegree::B11 => {
            let totals = component_integrals(g, omega);
            Ok(basis.h11_components.iter().map(|&c| totals[c].clone()).collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincarePairing {
    /// `∫ 1_c ∧ ω_c` per component.
    pub scalars: Vec<Rational>,
    /// `M_{ij} = ∫ η_i ∧ ω_j` for `η_i ∈ H^{1,0}`, `ω_j ∈ H^{0,1}`.
    pub gram: Matrix,
    pub determinant: Rational,
    pub perfect: bool,
}

/// The pairings `H^{0,0}×H^{1,1}` and `H^{1,0}×H^{0,1}` on a boundaryless
/// graph without isolated vertices.
pub fn poincare_pairing(g: &WeightedMetricGraph, basis: &CohomologyBasis) -> Result<PoincarePairing> {
    if !g.boundary_vertices().is_empty() {
        return Err(CohomologyError::NotApplicable("graph has boundary"));
    }
    if g.vertex_ids().any(|v| g.is_isolated(v)) {
        return Err(CohomologyError::NotApplicable("graph has isolated vertices"));
    }
    let mut scalars = Vec::new();
    for (gen, &c) in basis.h11.iter().zip(&basis.h11_components) {
        scalars.push(basis.h00[c].wedge(gen)?.integrate_graph(g)?);
    }
    let mut gram = Matrix::zeros(basis.h10.len(), basis.h01.len());
    for (i, eta) in basis.h10.iter().enumerate() {
        for (j, om) in basis.h01.iter().enumerate() {
            gram[(i, j)] = eta.wedge(om)?.integrate_graph(g)?;
        }
    }
    let determinant = if gram.rows() == gram.cols() { gram.determinant() } else { Rational::zero() };
    let perfect = scalars.len() == basis.h00.len()
        && scalars.iter().all(|s| !s.is_zero())
        && gram.rows() == gram.cols()
        && !determinant.is_zero();
    Ok(PoincarePairing { scalars, gram, determinant, perfect })
}

/// Matrices of `φ*` on each `H^{p,q}`; column `j` holds the coordinates of the
/// pullback of the `j`-th target basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyMaps {
    pub maps: [Matrix; 4],
}

impl CohomologyMaps {
    pub fn get(&self, b: Bidegree) -> &Matrix {
        &self.maps[bidegree_index(b)]
    }
}

fn bidegree_index(b: Bidegree) -> usize {
    match b {
        Bidegree::B00 => 0,
        Bidegree::B10 => 1,
        Bidegree::B01 => 2,
        Bidegree::B11 => 3,
    }
}

pub fn cohomology_pullback(m: &PLMap, source_basis: &CohomologyBasis, target_basis: &CohomologyBasis) -> Result<CohomologyMaps> {
    let mut maps = Vec::with_capacity(4);
    for b in Bidegree::all() {
        let rows = source_basis.get(b).len();
        let cols: Vec<Vec<Rational>> = target_basis
            .get(b)
            .iter()
            .map(|form| {
                let pulled = pullback_form(m, form)?;
                class_coordinates(m.source(), source_basis, &pulled)
            })
            .collect::<Result<_>>()?;
        maps.push(Matrix::from_columns(&cols, rows));
    }
    let maps: [Matrix; 4] = maps.try_into().expect("four bidegrees");
    Ok(CohomologyMaps { maps })
}

#[cfg(test)]
mod tests;
