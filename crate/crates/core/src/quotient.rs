//! Finite group actions by harmonic automorphisms and the quotient graph.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cohomology::{cohomology_basis, cohomology_pullback, dolbeault_dimensions, CohomologyError, Dimensions};
use crate::forms::Bidegree;
use crate::graph::{Edge, EdgeId, GraphCorrespondence, GraphError, GraphPoint, Orientation, VertexId, WeightedMetricGraph};
use crate::harmonic::{compose, harmonicity, validate_plmap, EdgeImage, HarmonicCertificate, MapError, PLMap};
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::report::{Location, Rule, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("element {0} is not a map of the acted-on graph to itself")]
    WrongGraph(usize),
    #[error("invalid action:\n{0}")]
    Invalid(ValidationReport),
    #[error("generated group exceeds {0} elements")]
    TooLarge(usize),
}

pub type Result<T> = std::result::Result<T, QuotientError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    graph: WeightedMetricGraph,
    elements: Vec<PLMap>,
}

/// Same vertex and edge images on the same working graphs.
fn same_map(a: &PLMap, b: &PLMap) -> bool {
    a.source_points() == b.source_points()
        && a.target_points() == b.target_points()
        && a.vertex_map() == b.vertex_map()
        && a.edge_map() == b.edge_map()
}

impl GroupAction {
    pub fn new(graph: WeightedMetricGraph, elements: Vec<PLMap>) -> Result<Self> {
        for (i, m) in elements.iter().enumerate() {
            if *m.source() != graph || *m.target() != graph {
                return Err(QuotientError::WrongGraph(i));
            }
        }
        Ok(GroupAction { graph, elements })
    }

    /// Closes a set of simplicial automorphisms under composition; the
    /// identity comes first.
    pub fn generate(graph: WeightedMetricGraph, generators: Vec<PLMap>) -> Result<Self> {
        const LIMIT: usize = 512;
        let mut elements = vec![PLMap::identity(&graph)];
        let mut frontier = elements.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for a in &frontier {
                for s in &generators {
                    let c = compose(a, s)?;
                    if !elements.iter().any(|e| same_map(e, &c)) {
                        elements.push(c.clone());
                        next.push(c);
                        if elements.len() > LIMIT {
                            return Err(QuotientError::TooLarge(LIMIT));
                        }
                    }
                }
            }
            frontier = next;
        }
        GroupAction::new(graph, elements)
    }

    pub fn graph(&self) -> &WeightedMetricGraph {
        &self.graph
    }

    pub fn elements(&self) -> &[PLMap] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// An action made simplicial, with no edge whose ends share an orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantSubdivision {
    pub graph: WeightedMetricGraph,
    pub correspondence: GraphCorrespondence,
    /// Points added to the original graph.
    pub points: Vec<(EdgeId, Rational)>,
    pub action: GroupAction,
}

/// Base-graph point set closed under every element.
fn closed_points(action: &GroupAction, seed: BTreeSet<(EdgeId, Rational)>) -> Result<BTreeSet<(EdgeId, Rational)>> {
    let mut points = seed;
    loop {
        let mut added = Vec::new();
        for m in &action.elements {
            for p in &points {
                if let GraphPoint::OnEdge(e, x) = m.image_of_point(&GraphPoint::OnEdge(p.0, p.1.clone()))? {
                    if !points.contains(&(e, x.clone())) {
                        added.push((e, x));
                    }
                }
            }
        }
        if added.is_empty() {
            return Ok(points);
        }
        points.extend(added);
    }
}

/// Every element rewritten as an unsubdivided map of `graph.subdivide(points)`.
fn transport(action: &GroupAction, points: &BTreeSet<(EdgeId, Rational)>, sub: &WeightedMetricGraph) -> Result<Vec<PLMap>> {
    let pts: Vec<_> = points.iter().cloned().collect();
    action
        .elements
        .iter()
        .map(|m| {
            let r = m.refine(&pts, &pts)?;
            if r.source_points() != pts.as_slice() || r.target_points() != pts.as_slice() {
                return Err(MapError::Refinement("point set is not invariant".into()).into());
            }
            Ok(PLMap::new(sub.clone(), sub.clone(), &[], &[], r.vertex_map().to_vec(), r.edge_map().to_vec())?)
        })
        .collect()
}

/// Vertex orbits as a representative (lowest id) per vertex.
fn vertex_orbits(g: &WeightedMetricGraph, elements: &[PLMap]) -> Vec<usize> {
    let mut rep: Vec<usize> = (0..g.num_vertices()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for m in elements {
            for v in g.vertex_ids() {
                let w = m.vertex_map()[v.0].0;
                let r = rep[v.0].min(rep[w]);
                if rep[v.0] != r || rep[w] != r {
                    rep[v.0] = r;
                    rep[w] = r;
                    changed = true;
                }
            }
        }
    }
    rep
}

fn edge_orbits(g: &WeightedMetricGraph, elements: &[PLMap]) -> Vec<usize> {
    let mut rep: Vec<usize> = (0..g.num_edges()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for m in elements {
            for e in g.edge_ids() {
                if let EdgeImage::Edge { edge, .. } = &m.edge_map()[e.0] {
                    let r = rep[e.0].min(rep[edge.0]);
                    if rep[e.0] != r || rep[edge.0] != r {
                        rep[e.0] = r;
                        rep[edge.0] = r;
                        changed = true;
                    }
                }
            }
        }
    }
    rep
}

pub fn equivariant_subdivision(action: &GroupAction) -> Result<EquivariantSubdivision> {
    let mut seed = BTreeSet::new();
    for m in &action.elements {
        seed.extend(m.source_points().iter().cloned());
        seed.extend(m.target_points().iter().cloned());
    }
    let mut points = closed_points(action, seed)?;
    let (g1, c1) = action.graph.subdivide(&points.iter().cloned().collect::<Vec<_>>())?;
    let el1 = transport(action, &points, &g1)?;
    let orbit = vertex_orbits(&g1, &el1);
    let mut mids = Vec::new();
    for (i, e) in g1.edges().iter().enumerate() {
        if orbit[e.tail.0] == orbit[e.head.0] {
            let iv = &c1.edge_intervals[i];
            mids.push((iv.edge, (&iv.start + &iv.end) / Rational::from_integer(2.into())));
        }
    }
    points.extend(mids);
    let pts: Vec<_> = points.iter().cloned().collect();
    let (graph, correspondence) = action.graph.subdivide(&pts)?;
    let elements = transport(action, &points, &graph)?;
    let action = GroupAction { graph: graph.clone(), elements };
    Ok(EquivariantSubdivision { graph, correspondence, points: pts, action })
}

/// Identity present, closed under composition, boundary preserved, every
/// element harmonic. Checked on the equivariant subdivision.
pub fn validate_action(action: &GroupAction) -> Result<ValidationReport> {
    let sub = equivariant_subdivision(action)?;
    let els = &sub.action.elements;
    let g = &sub.graph;
    let mut r = ValidationReport::new();
    let id = PLMap::identity(g);
    if !els.iter().any(|m| same_map(m, &id)) {
        r.push(Rule::NotInvariant, Location::Whole, "identity missing");
    }
    for (i, m) in els.iter().enumerate() {
        let vr = validate_plmap(m);
        if !vr.is_valid() {
            r.extend(vr);
            continue;
        }
        if harmonicity(m).is_err() {
            r.push(Rule::NotHarmonic, Location::Element(i), "");
        }
        for v in g.vertex_ids() {
            if g.is_boundary(v) != g.is_boundary(m.vertex_map()[v.0]) {
                r.push(Rule::BoundaryPreimage, Location::Element(i), format!("vertex {v} and its image differ"));
            }
        }
        for (j, n) in els.iter().enumerate() {
            let c = compose(m, n)?;
            if !els.iter().any(|e| same_map(e, &c)) {
                r.push(Rule::NotInvariant, Location::Element(i), format!("composite with {j} is not in the group"));
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    pub subdivision: EquivariantSubdivision,
    pub graph: WeightedMetricGraph,
    /// Projection from the subdivided graph.
    pub projection: PLMap,
    pub certificate: HarmonicCertificate,
    /// Quotient vertex of each vertex orbit representative.
    pub vertex_classes: Vec<VertexId>,
    /// `d_{v'}(π) = (Σ_{v''~v'} 1/d(v',v''))⁻¹` held at every interior vertex.
    pub degrees_consistent: bool,
}

pub fn quotient(action: &GroupAction) -> Result<Quotient> {
    let report = validate_action(action)?;
    if !report.is_valid() {
        return Err(QuotientError::Invalid(report));
    }
    let subdivision = equivariant_subdivision(action)?;
    let g = &subdivision.graph;
    let els = &subdivision.action.elements;
    let vorb = vertex_orbits(g, els);
    let eorb = edge_orbits(g, els);
    let mut vertex_index = BTreeMap::new();
    for &r in &vorb {
        let n = vertex_index.len();
        vertex_index.entry(r).or_insert(n);
    }
    let vertex_classes: Vec<VertexId> = vorb.iter().map(|r| VertexId(vertex_index[r])).collect();
    let mut boundary = vec![false; vertex_index.len()];
    for v in g.boundary_vertices() {
        boundary[vertex_classes[v.0].0] = true;
    }
    let mut edge_index = BTreeMap::new();
    for &r in &eorb {
        let n = edge_index.len();
        edge_index.entry(r).or_insert(n);
    }
    let mut inv_len = vec![Rational::zero(); edge_index.len()];
    for (i, e) in g.edges().iter().enumerate() {
        inv_len[edge_index[&eorb[i]]] += Rational::one() / e.unweighted_length();
    }
    let mut reps: Vec<usize> = edge_index.keys().copied().collect();
    reps.sort_by_key(|r| edge_index[r]);
    let edges: Vec<Edge> = reps
        .iter()
        .zip(&inv_len)
        .map(|(&r, il)| {
            let e = g.edge(EdgeId(r));
            Edge { tail: vertex_classes[e.tail.0], head: vertex_classes[e.head.0], length: Rational::one() / il, weight: 1 }
        })
        .collect();
    let qgraph = WeightedMetricGraph::new(boundary, edges)?;
    let edge_map = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let qe = EdgeId(edge_index[&eorb[i]]);
            let orientation = if vertex_classes[e.tail.0] == qgraph.edge(qe).tail { Orientation::Forward } else { Orientation::Backward };
            EdgeImage::Edge { edge: qe, orientation, expansion: &qgraph.edge(qe).length / &e.length }
        })
        .collect();
    let projection = PLMap::new(g.clone(), qgraph.clone(), &[], &[], vertex_classes.clone(), edge_map)?;
    let certificate = harmonicity(&projection)?;
    let degrees_consistent = check_degree_formula(g, els, &certificate)?;
    Ok(Quotient { subdivision, graph: qgraph, projection, certificate, vertex_classes, degrees_consistent })
}

/// Compares `d_{v'}(π)` with `(Σ_{v''} 1/d(v',v''))⁻¹`, where `d(v',v'')` is
/// the local degree at `v'` of any element sending `v'` to `v''`.
fn check_degree_formula(g: &WeightedMetricGraph, els: &[PLMap], cert: &HarmonicCertificate) -> Result<bool> {
    let certs: Vec<HarmonicCertificate> = els.iter().map(harmonicity).collect::<std::result::Result<_, _>>()?;
    for (v, d) in &cert.vertex_degrees {
        if g.is_isolated(*v) {
            continue;
        }
        let mut seen: BTreeMap<VertexId, Rational> = BTreeMap::new();
        for (m, c) in els.iter().zip(&certs) {
            let image = m.vertex_map()[v.0];
            let dv = c.vertex_degrees.get(v).cloned().unwrap_or_else(Rational::zero);
            seen.entry(image).or_insert(dv);
        }
        if seen.values().any(Zero::is_zero) {
            return Ok(false);
        }
        let s: Rational = seen.values().map(|x| Rational::one() / x).sum();
        if Rational::one() / s != *d {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `pi` from the subdivided graph of `sub` is a quotient map.
pub fn verify_quotient(sub: &EquivariantSubdivision, pi: &PLMap) -> Result<ValidationReport> {
    let mut r = ValidationReport::new();
    if *pi.source() != sub.graph {
        r.push(Rule::MapShape, Location::Whole, "projection does not start at the subdivided graph");
        return Ok(r);
    }
    let vr = validate_plmap(pi);
    if !vr.is_valid() {
        r.extend(vr);
        return Ok(r);
    }
    let pts = pi.source_points().to_vec();
    let mut els = Vec::new();
    for m in &sub.action.elements {
        let m = m.refine(&pts, &pts)?;
        if m.source_points() != pts.as_slice() {
            r.push(Rule::Refinement, Location::Whole, "projection subdivision is not invariant");
            return Ok(r);
        }
        els.push(m);
    }
    for (i, m) in els.iter().enumerate() {
        let c = compose(m, pi)?;
        let aligned = pi.refine(c.source_points(), c.target_points())?;
        if c.vertex_map() != aligned.vertex_map() || c.edge_map() != aligned.edge_map() {
            r.push(Rule::NotInvariant, Location::Element(i), "π∘σ ≠ π");
        }
    }
    let sw = pi.source_work();
    let tw = pi.target_work();
    let vorb = vertex_orbits(sw, &els);
    let eorb = edge_orbits(sw, &els);
    let mut vfib: BTreeMap<VertexId, BTreeSet<usize>> = BTreeMap::new();
    for v in sw.vertex_ids() {
        vfib.entry(pi.vertex_map()[v.0]).or_default().insert(vorb[v.0]);
    }
    for (v, orbits) in &vfib {
        if orbits.len() > 1 {
            r.push(Rule::FiberNotOrbit, Location::Vertex(v.0), format!("{} orbits", orbits.len()));
        }
    }
    let mut efib: BTreeMap<EdgeId, BTreeSet<usize>> = BTreeMap::new();
    for e in sw.edge_ids() {
        if let EdgeImage::Edge { edge, .. } = &pi.edge_map()[e.0] {
            efib.entry(*edge).or_default().insert(eorb[e.0]);
        }
    }
    for (e, orbits) in &efib {
        if orbits.len() > 1 {
            r.push(Rule::FiberNotOrbit, Location::Edge(e.0), format!("{} orbits", orbits.len()));
        }
    }
    for v in sw.vertex_ids() {
        if sw.is_boundary(v) != tw.is_boundary(pi.vertex_map()[v.0]) {
            r.push(Rule::BoundaryPreimage, Location::Vertex(v.0), "boundary is not the preimage of the boundary");
        }
    }
    if !pi.is_surjective() || tw.vertex_ids().any(|v| !vfib.contains_key(&v)) {
        r.push(Rule::NotSurjective, Location::Whole, "");
    }
    if let Err(e) = harmonicity(pi) {
        r.push(Rule::NotHarmonic, Location::Whole, e.to_string());
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCohomology {
    /// Rank of the averaged pullback in each bidegree.
    pub invariant: Dimensions,
    pub quotient: Dimensions,
    pub agrees: bool,
}

/// Ranks of `P = (1/|G|) Σ σ*` on each `H^{p,q}` against the quotient's
/// dimensions.
pub fn invariant_cohomology(action: &GroupAction, order: u32) -> Result<InvariantCohomology> {
    let q = quotient(action)?;
    let g = &q.subdivision.graph;
    let basis = cohomology_basis(g, order)?;
    let n = Rational::from_integer(q.subdivision.action.order().into());
    let maps = q
        .subdivision
        .action
        .elements
        .iter()
        .map(|m| cohomology_pullback(m, &basis, &basis))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut ranks = [0usize; 4];
    for (k, b) in Bidegree::all().into_iter().enumerate() {
        let dim = basis.get(b).len();
        let sum = maps.iter().fold(Matrix::zeros(dim, dim), |acc, m| acc.add(m.get(b)));
        ranks[k] = sum.scale(&(Rational::one() / &n)).rank();
    }
    let invariant = Dimensions { h00: ranks[0], h10: ranks[1], h01: ranks[2], h11: ranks[3] };
    let quotient = dolbeault_dimensions(&q.graph).total;
    Ok(InvariantCohomology { invariant, quotient, agrees: invariant == quotient })
}

/// Factors a `G`-invariant map from the subdivided graph through the
/// quotient.
pub fn factor_through_quotient(q: &Quotient, phi: &PLMap) -> Result<PLMap> {
    let g = &q.subdivision.graph;
    if phi.source() != g || !phi.source_points().is_empty() {
        return Err(MapError::Incompatible("map must start at the unsubdivided equivariant graph".into()).into());
    }
    let qg = &q.graph;
    let mut vertex_map = vec![VertexId(0); qg.num_vertices()];
    for v in g.vertex_ids() {
        vertex_map[q.vertex_classes[v.0].0] = phi.vertex_map()[v.0];
    }
    let mut edge_map: Vec<Option<EdgeImage>> = vec![None; qg.num_edges()];
    for e in g.edge_ids() {
        let EdgeImage::Edge { edge: qe, orientation: o, .. } = &q.projection.edge_map()[e.0] else { continue };
        if edge_map[qe.0].is_some() {
            continue;
        }
        let img = match &phi.edge_map()[e.0] {
            EdgeImage::Vertex(v) => EdgeImage::Vertex(*v),
            EdgeImage::Edge { edge, orientation, .. } => EdgeImage::Edge {
                edge: *edge,
                orientation: o.then(*orientation),
                expansion: &phi.target_work().edge(*edge).length / &qg.edge(*qe).length,
            },
        };
        edge_map[qe.0] = Some(img);
    }
    let edge_map = edge_map.into_iter().map(|x| x.expect("projection is surjective")).collect();
    Ok(PLMap::new(qg.clone(), phi.target().clone(), &[], phi.target_points(), vertex_map, edge_map)?)
}

#[cfg(test)]
mod tests;
