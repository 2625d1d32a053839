//! Harmonic functions, piecewise linear maps of graphs and pullback of forms.
//!
//! A [`PLMap`] is stored against subdivisions of its source and target. The
//! subdivision points are part of the data, so two maps that differ only in
//! how finely they were subdivided compare unequal but behave identically.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::calculus::{PiecewisePolynomial, Polynomial};
use crate::forms::{ensure_valid, validate_form, Bidegree, FormError, GraphForm};
use crate::graph::{
    Edge, EdgeId, GraphCorrespondence, GraphError, GraphPoint, Orientation, OrientedEdge, VertexId, WeightedMetricGraph,
};
use crate::linalg::Matrix;
use crate::rational::{pow, Rational};
use crate::report::{Location, Rule, ValidationReport};
use crate::tropical::GammaGroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("malformed map:\n{0}")]
    Invalid(ValidationReport),
    #[error("{0}")]
    NotHarmonic(HarmonicityFailure),
    #[error("maps are not composable: {0}")]
    Incompatible(String),
    #[error("map has no well-defined degree")]
    NoDegree,
    #[error("refinement failed: {0}")]
    Refinement(String),
}

pub type Result<T> = std::result::Result<T, MapError>;

/// Image of a (working) source edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeImage {
    /// Runs linearly over a target edge with speed `expansion`.
    Edge { edge: EdgeId, orientation: Orientation, expansion: Rational },
    /// Crushed to a vertex.
    Vertex(VertexId),
}

impl EdgeImage {
    pub fn expansion(&self) -> Rational {
        match self {
            EdgeImage::Edge { expansion, .. } => expansion.clone(),
            EdgeImage::Vertex(_) => Rational::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLMap {
    source: WeightedMetricGraph,
    target: WeightedMetricGraph,
    source_points: Vec<(EdgeId, Rational)>,
    target_points: Vec<(EdgeId, Rational)>,
    source_work: WeightedMetricGraph,
    source_corr: GraphCorrespondence,
    target_work: WeightedMetricGraph,
    target_corr: GraphCorrespondence,
    vertex_map: Vec<VertexId>,
    edge_map: Vec<EdgeImage>,
}

/// Local degrees of a harmonic map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicCertificate {
    /// `d_{v'}(φ)` for every interior vertex of the working source.
    pub vertex_degrees: BTreeMap<VertexId, Rational>,
    /// `d_e(φ)` for every edge of the working target.
    pub edge_degrees: Vec<Rational>,
    /// Common value of the `d_e(φ)`, when there is one.
    pub degree: Option<Rational>,
}

/// Interior source vertex at which two target edges see different sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicityFailure {
    pub vertex: VertexId,
    pub edges: (EdgeId, EdgeId),
    pub values: (Rational, Rational),
}

impl std::fmt::Display for HarmonicityFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "not harmonic at vertex {}: target edges {} and {} give {} and {}",
            self.vertex, self.edges.0, self.edges.1, self.values.0, self.values.1
        )
    }
}

fn sorted_points(points: &[(EdgeId, Rational)]) -> Vec<(EdgeId, Rational)> {
    let set: BTreeSet<(EdgeId, Rational)> = points.iter().cloned().collect();
    set.into_iter().collect()
}

/// Position of a base point inside a subdivision of the base graph.
fn locate(work: &WeightedMetricGraph, corr: &GraphCorrespondence, p: &GraphPoint) -> Option<GraphPoint> {
    match p {
        GraphPoint::Vertex(v) => Some(GraphPoint::Vertex(*v)),
        GraphPoint::OnEdge(e, x) => {
            for (i, iv) in corr.edge_intervals.iter().enumerate() {
                if iv.edge == *e && iv.start <= *x && *x < iv.end {
                    return Some(if *x == iv.start {
                        GraphPoint::Vertex(work.edge(EdgeId(i)).tail)
                    } else {
                        GraphPoint::OnEdge(EdgeId(i), x - &iv.start)
                    });
                }
            }
            None
        }
    }
}

fn lift(corr: &GraphCorrespondence, p: &GraphPoint) -> GraphPoint {
    match p {
        GraphPoint::Vertex(v) => corr.vertex_points[v.0].clone(),
        GraphPoint::OnEdge(e, x) => {
            let iv = &corr.edge_intervals[e.0];
            GraphPoint::OnEdge(iv.edge, &iv.start + x)
        }
    }
}

impl PLMap {
    /// Builds a map from data given on the subdivisions of `source` and
    /// `target` at the listed points. Only shapes and ids are checked here;
    /// see [`validate_plmap`] for the map conditions.
    pub fn new(
        source: WeightedMetricGraph,
        target: WeightedMetricGraph,
        source_points: &[(EdgeId, Rational)],
        target_points: &[(EdgeId, Rational)],
        vertex_map: Vec<VertexId>,
        edge_map: Vec<EdgeImage>,
    ) -> Result<Self> {
        let source_points = sorted_points(source_points);
        let target_points = sorted_points(target_points);
        let (source_work, source_corr) = source.subdivide(&source_points)?;
        let (target_work, target_corr) = target.subdivide(&target_points)?;
        let mut r = ValidationReport::new();
        if vertex_map.len() != source_work.num_vertices() {
            r.push(Rule::MapShape, Location::Whole, format!("{} vertex images for {} vertices", vertex_map.len(), source_work.num_vertices()));
        }
        if edge_map.len() != source_work.num_edges() {
            r.push(Rule::MapShape, Location::Whole, format!("{} edge images for {} edges", edge_map.len(), source_work.num_edges()));
        }
        for (i, v) in vertex_map.iter().enumerate() {
            if v.0 >= target_work.num_vertices() {
                r.push(Rule::MapShape, Location::Vertex(i), format!("unknown target vertex {v}"));
            }
        }
        for (i, im) in edge_map.iter().enumerate() {
            let bad = match im {
                EdgeImage::Edge { edge, expansion, .. } => edge.0 >= target_work.num_edges() || *expansion <= Rational::zero(),
                EdgeImage::Vertex(v) => v.0 >= target_work.num_vertices(),
            };
            if bad {
                r.push(Rule::MapShape, Location::Edge(i), "bad edge image");
            }
        }
        if !r.is_valid() {
            return Err(MapError::Invalid(r));
        }
        Ok(PLMap {
            source,
            target,
            source_points,
            target_points,
            source_work,
            source_corr,
            target_work,
            target_corr,
            vertex_map,
            edge_map,
        })
    }

    /// Map between unsubdivided graphs; expansion factors are read off the
    /// lengths.
    pub fn from_graph_maps(
        source: WeightedMetricGraph,
        target: WeightedMetricGraph,
        vertex_map: Vec<VertexId>,
        edge_map: Vec<Option<(EdgeId, Orientation)>>,
    ) -> Result<Self> {
        let images = edge_map
            .iter()
            .enumerate()
            .map(|(i, im)| match im {
                Some((e, o)) => {
                    let (Some(te), Some(se)) = (target.edges().get(e.0), source.edges().get(i)) else {
                        return EdgeImage::Vertex(VertexId(usize::MAX));
                    };
                    EdgeImage::Edge { edge: *e, orientation: *o, expansion: &te.length / &se.length }
                }
                None => {
                    let tail = source.edges().get(i).map(|e| e.tail.0).unwrap_or(usize::MAX);
                    EdgeImage::Vertex(vertex_map.get(tail).copied().unwrap_or(VertexId(usize::MAX)))
                }
            })
            .collect();
        PLMap::new(source, target, &[], &[], vertex_map, images)
    }

    pub fn identity(g: &WeightedMetricGraph) -> Self {
        let edges = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, _)| EdgeImage::Edge { edge: EdgeId(i), orientation: Orientation::Forward, expansion: Rational::one() })
            .collect();
        PLMap::new(g.clone(), g.clone(), &[], &[], g.vertex_ids().collect(), edges).expect("identity is well formed")
    }

    /// The canonical map `ν: Σ₀ → Σ` from the unweighting.
    pub fn unweighting(g: &WeightedMetricGraph) -> Self {
        let (g0, _) = g.unweight();
        let edges = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeImage::Edge { edge: EdgeId(i), orientation: Orientation::Forward, expansion: e.weight_q() })
            .collect();
        PLMap::new(g0, g.clone(), &[], &[], g.vertex_ids().collect(), edges).expect("unweighting is well formed")
    }

    /// Constant map onto a target vertex.
    pub fn constant(source: &WeightedMetricGraph, target: &WeightedMetricGraph, v: VertexId) -> Result<Self> {
        PLMap::new(
            source.clone(),
            target.clone(),
            &[],
            &[],
            vec![v; source.num_vertices()],
            vec![EdgeImage::Vertex(v); source.num_edges()],
        )
    }

    pub fn source(&self) -> &WeightedMetricGraph {
        &self.source
    }

    pub fn target(&self) -> &WeightedMetricGraph {
        &self.target
    }

    pub fn source_points(&self) -> &[(EdgeId, Rational)] {
        &self.source_points
    }

    pub fn target_points(&self) -> &[(EdgeId, Rational)] {
        &self.target_points
    }

    /// Subdivided source on which the map is simplicial.
    pub fn source_work(&self) -> &WeightedMetricGraph {
        &self.source_work
    }

    pub fn target_work(&self) -> &WeightedMetricGraph {
        &self.target_work
    }

    pub fn source_correspondence(&self) -> &GraphCorrespondence {
        &self.source_corr
    }

    pub fn target_correspondence(&self) -> &GraphCorrespondence {
        &self.target_corr
    }

    pub fn vertex_map(&self) -> &[VertexId] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[EdgeImage] {
        &self.edge_map
    }

    /// Image of a point of the working source in the working target.
    pub fn image_of_work_point(&self, p: &GraphPoint) -> GraphPoint {
        match p {
            GraphPoint::Vertex(v) => GraphPoint::Vertex(self.vertex_map[v.0]),
            GraphPoint::OnEdge(e, x) => match &self.edge_map[e.0] {
                EdgeImage::Vertex(u) => GraphPoint::Vertex(*u),
                EdgeImage::Edge { edge, orientation, expansion } => {
                    let y = expansion * x;
                    let y = match orientation {
                        Orientation::Forward => y,
                        Orientation::Backward => &self.target_work.edge(*edge).length - y,
                    };
                    self.target_work.point_on_edge(*edge, &y)
                }
            },
        }
    }

    /// Image of a point of the base source in the base target.
    pub fn image_of_point(&self, p: &GraphPoint) -> Result<GraphPoint> {
        let p = match p {
            GraphPoint::OnEdge(e, x) if e.0 < self.source.num_edges() => self.source.point_on_edge(*e, x),
            other => other.clone(),
        };
        let w = locate(&self.source_work, &self.source_corr, &p)
            .ok_or_else(|| MapError::Refinement(format!("point {p:?} is not on the source")))?;
        Ok(lift(&self.target_corr, &self.image_of_work_point(&w)))
    }

    /// Base-source points over a base-target point lying inside an edge of
    /// the current working target.
    fn preimages(&self, q: &(EdgeId, Rational)) -> Vec<(EdgeId, Rational)> {
        let Some(GraphPoint::OnEdge(te, y)) = locate(&self.target_work, &self.target_corr, &GraphPoint::OnEdge(q.0, q.1.clone())) else {
            return Vec::new();
        };
        let lt = &self.target_work.edge(te).length;
        let mut out = Vec::new();
        for (i, im) in self.edge_map.iter().enumerate() {
            if let EdgeImage::Edge { edge, orientation, expansion } = im {
                if *edge == te {
                    let x = match orientation {
                        Orientation::Forward => &y / expansion,
                        Orientation::Backward => (lt - &y) / expansion,
                    };
                    if let GraphPoint::OnEdge(e, x) = lift(&self.source_corr, &GraphPoint::OnEdge(EdgeId(i), x)) {
                        out.push((e, x));
                    }
                }
            }
        }
        out
    }

    /// The same map on finer subdivisions: adds the given points, the images
    /// of new source points and the preimages of new target points.
    pub fn refine(&self, extra_source: &[(EdgeId, Rational)], extra_target: &[(EdgeId, Rational)]) -> Result<PLMap> {
        let old_s: BTreeSet<(EdgeId, Rational)> = self.source_points.iter().cloned().collect();
        let old_t: BTreeSet<(EdgeId, Rational)> = self.target_points.iter().cloned().collect();
        let mut s = old_s.clone();
        let mut t = old_t.clone();
        s.extend(extra_source.iter().cloned());
        t.extend(extra_target.iter().cloned());
        for p in s.difference(&old_s) {
            if let GraphPoint::OnEdge(e, y) = self.image_of_point(&GraphPoint::OnEdge(p.0, p.1.clone()))? {
                t.insert((e, y));
            }
        }
        let new_t: Vec<(EdgeId, Rational)> = t.difference(&old_t).cloned().collect();
        for q in &new_t {
            s.extend(self.preimages(q));
        }
        if s == old_s && t == old_t {
            return Ok(self.clone());
        }
        let s: Vec<_> = s.into_iter().collect();
        let t: Vec<_> = t.into_iter().collect();
        let (sw, sc) = self.source.subdivide(&s)?;
        let (tw, tc) = self.target.subdivide(&t)?;
        let mut vertex_map = Vec::with_capacity(sw.num_vertices());
        for v in sw.vertex_ids() {
            let img = self.image_of_point(&sc.vertex_points[v.0])?;
            match locate(&tw, &tc, &img) {
                Some(GraphPoint::Vertex(u)) => vertex_map.push(u),
                _ => return Err(MapError::Refinement(format!("vertex {v} does not land on a vertex"))),
            }
        }
        let mut edge_map = Vec::with_capacity(sw.num_edges());
        for (i, iv) in sc.edge_intervals.iter().enumerate() {
            let mid = (&iv.start + &iv.end) / Rational::from_integer(2.into());
            let old = locate(&self.source_work, &self.source_corr, &GraphPoint::OnEdge(iv.edge, mid.clone()));
            let Some(GraphPoint::OnEdge(old_e, _)) = old else {
                return Err(MapError::Refinement(format!("edge {i} midpoint lost")));
            };
            let img = match &self.edge_map[old_e.0] {
                EdgeImage::Vertex(_) => EdgeImage::Vertex(vertex_map[sw.edge(EdgeId(i)).tail.0]),
                EdgeImage::Edge { orientation, expansion, .. } => {
                    let p = self.image_of_point(&GraphPoint::OnEdge(iv.edge, mid))?;
                    match locate(&tw, &tc, &p) {
                        Some(GraphPoint::OnEdge(te, _)) => {
                            EdgeImage::Edge { edge: te, orientation: *orientation, expansion: expansion.clone() }
                        }
                        _ => return Err(MapError::Refinement(format!("edge {i} image lost"))),
                    }
                }
            };
            edge_map.push(img);
        }
        PLMap::new(self.source.clone(), self.target.clone(), &s, &t, vertex_map, edge_map)
    }

    /// Companion map `Σ'₀ → Σ₀` between the unweightings.
    pub fn unweighted_companion(&self) -> PLMap {
        let (s0, _) = self.source.unweight();
        let (t0, _) = self.target.unweight();
        let scale_points = |g: &WeightedMetricGraph, pts: &[(EdgeId, Rational)]| -> Vec<(EdgeId, Rational)> {
            pts.iter().map(|(e, x)| (*e, x / g.edge(*e).weight_q())).collect()
        };
        let sp = scale_points(&self.source, &self.source_points);
        let tp = scale_points(&self.target, &self.target_points);
        let edge_map = self
            .edge_map
            .iter()
            .enumerate()
            .map(|(i, im)| match im {
                EdgeImage::Vertex(v) => EdgeImage::Vertex(*v),
                EdgeImage::Edge { edge, orientation, expansion } => {
                    let ws = self.source_work.edge(EdgeId(i)).weight_q();
                    let wt = self.target_work.edge(*edge).weight_q();
                    EdgeImage::Edge { edge: *edge, orientation: *orientation, expansion: expansion * ws / wt }
                }
            })
            .collect();
        PLMap::new(s0, t0, &sp, &tp, self.vertex_map.clone(), edge_map).expect("companion keeps the shape")
    }

    /// Target vertices and edges that are hit.
    fn image_sets(&self) -> (BTreeSet<VertexId>, BTreeSet<EdgeId>) {
        let vs = self.vertex_map.iter().copied().collect();
        let es = self
            .edge_map
            .iter()
            .filter_map(|im| match im {
                EdgeImage::Edge { edge, .. } => Some(*edge),
                EdgeImage::Vertex(_) => None,
            })
            .collect();
        (vs, es)
    }

    /// Surjective onto the target.
    pub fn is_surjective(&self) -> bool {
        let (vs, es) = self.image_sets();
        let tw = &self.target_work;
        es.len() == tw.num_edges() && tw.vertex_ids().all(|v| vs.contains(&v) || !tw.is_isolated(v))
    }
}

/// Checks the map conditions: endpoints, expansion factors and the boundary
/// condition.
pub fn validate_plmap(m: &PLMap) -> ValidationReport {
    let mut r = ValidationReport::new();
    let sw = &m.source_work;
    let tw = &m.target_work;
    for (i, (e, im)) in sw.edges().iter().zip(&m.edge_map).enumerate() {
        let (ft, fh) = (m.vertex_map[e.tail.0], m.vertex_map[e.head.0]);
        match im {
            EdgeImage::Vertex(v) => {
                if ft != *v || fh != *v {
                    r.push(Rule::EndpointMismatch, Location::Edge(i), format!("crushed to {v} but ends go to {ft}, {fh}"));
                }
            }
            EdgeImage::Edge { edge, orientation, expansion } => {
                let oe = OrientedEdge { edge: *edge, orientation: *orientation };
                if tw.oriented_tail(oe) != ft || tw.oriented_head(oe) != fh {
                    r.push(Rule::EndpointMismatch, Location::Edge(i), format!("ends go to {ft}, {fh}"));
                }
                let want = &tw.edge(*edge).length / &e.length;
                if *expansion != want {
                    r.push(Rule::ExpansionFactor, Location::Edge(i), format!("{expansion} but lengths give {want}"));
                }
            }
        }
    }
    for v in sw.vertex_ids() {
        let moving = sw.outgoing(v).iter().any(|oe| matches!(m.edge_map[oe.edge.0], EdgeImage::Edge { .. }));
        if moving && tw.is_boundary(m.vertex_map[v.0]) && !sw.is_boundary(v) {
            r.push(Rule::BoundaryPreimage, Location::Vertex(v.0), "interior vertex sent non-constantly to the boundary");
        }
    }
    r
}

fn check_valid(m: &PLMap) -> Result<()> {
    let r = validate_plmap(m);
    if r.is_valid() {
        Ok(())
    } else {
        Err(MapError::Invalid(r))
    }
}

/// Contribution `d_{e'}·w(e')/w(e)` of a working source edge to its image,
/// which equals `ℓ₀(e)/ℓ₀(e')`.
fn weighted_expansion(m: &PLMap, e: EdgeId) -> Option<(EdgeId, Orientation, Rational)> {
    match &m.edge_map[e.0] {
        EdgeImage::Vertex(_) => None,
        EdgeImage::Edge { edge, orientation, expansion } => {
            let ws = m.source_work.edge(e).weight_q();
            let wt = m.target_work.edge(*edge).weight_q();
            Some((*edge, *orientation, expansion * ws / wt))
        }
    }
}

/// Local degrees at interior vertices, or the first vertex where they are
/// not independent of the target edge.
pub fn harmonicity(m: &PLMap) -> Result<HarmonicCertificate> {
    check_valid(m)?;
    let sw = &m.source_work;
    let tw = &m.target_work;
    let mut vertex_degrees = BTreeMap::new();
    for v in sw.vertex_ids() {
        if sw.is_boundary(v) {
            continue;
        }
        let mut sums: BTreeMap<OrientedEdge, Rational> =
            tw.outgoing(m.vertex_map[v.0]).into_iter().map(|oe| (oe, Rational::zero())).collect();
        let mut moving = false;
        for oe in sw.outgoing(v) {
            if let Some((te, o, c)) = weighted_expansion(m, oe.edge) {
                moving = true;
                let key = OrientedEdge { edge: te, orientation: o.then(oe.orientation) };
                *sums.entry(key).or_insert_with(Rational::zero) += c;
            }
        }
        if !moving {
            vertex_degrees.insert(v, Rational::zero());
            continue;
        }
        let mut it = sums.iter();
        let (first_e, first) = it.next().expect("a moving vertex has an image edge");
        for (e, s) in it {
            if s != first {
                return Err(MapError::NotHarmonic(HarmonicityFailure {
                    vertex: v,
                    edges: (first_e.edge, e.edge),
                    values: (first.clone(), s.clone()),
                }));
            }
        }
        vertex_degrees.insert(v, first.clone());
    }
    let mut edge_degrees = vec![Rational::zero(); tw.num_edges()];
    for e in sw.edge_ids() {
        if let Some((te, _, c)) = weighted_expansion(m, e) {
            edge_degrees[te.0] += c;
        }
    }
    let degree = match edge_degrees.split_first() {
        Some((d, rest)) if rest.iter().all(|x| x == d) => Some(d.clone()),
        _ => None,
    };
    Ok(HarmonicCertificate { vertex_degrees, edge_degrees, degree })
}

pub fn is_harmonic(m: &PLMap) -> bool {
    harmonicity(m).is_ok()
}

/// Composite `outer ∘ inner`, first aligning the middle subdivisions.
pub fn compose(inner: &PLMap, outer: &PLMap) -> Result<PLMap> {
    if inner.target != outer.source {
        return Err(MapError::Incompatible("middle graphs differ".into()));
    }
    let mut a = inner.clone();
    let mut b = outer.clone();
    for _ in 0..8 {
        if a.target_points == b.source_points {
            break;
        }
        a = a.refine(&[], &b.source_points)?;
        b = b.refine(&a.target_points, &[])?;
    }
    if a.target_points != b.source_points {
        return Err(MapError::Incompatible("middle subdivisions do not stabilise".into()));
    }
    let vertex_map = a.vertex_map.iter().map(|v| b.vertex_map[v.0]).collect();
    let edge_map = a
        .edge_map
        .iter()
        .map(|im| match im {
            EdgeImage::Vertex(v) => EdgeImage::Vertex(b.vertex_map[v.0]),
            EdgeImage::Edge { edge, orientation, expansion } => match &b.edge_map[edge.0] {
                EdgeImage::Vertex(u) => EdgeImage::Vertex(*u),
                EdgeImage::Edge { edge: e2, orientation: o2, expansion: d2 } => {
                    EdgeImage::Edge { edge: *e2, orientation: orientation.then(*o2), expansion: expansion * d2 }
                }
            },
        })
        .collect();
    PLMap::new(a.source, b.target, &a.source_points, &b.target_points, vertex_map, edge_map)
}

/// Pullback of a form along a harmonic map. Edge coefficients become
/// `f∘φ·d_{e'}^{p+q}`; crushed edges carry the constant value in degree
/// `(0,0)` and zero otherwise.
pub fn pullback_form(m: &PLMap, omega: &GraphForm) -> Result<GraphForm> {
    harmonicity(m)?;
    pullback_unchecked(m, omega)
}

/// The pullback formula without the harmonicity check. The result is a form
/// only when the map is harmonic near the non-boundary vertices.
pub fn pullback_unchecked(m: &PLMap, omega: &GraphForm) -> Result<GraphForm> {
    let tw = &m.target_work;
    let sw = &m.source_work;
    let on_work = omega.along_correspondence(tw, &m.target, &m.target_corr)?;
    let bd = omega.bidegree();
    let k = bd.total();
    let order = omega.order();
    let mut coeffs = Vec::with_capacity(sw.num_edges());
    for (i, e) in sw.edges().iter().enumerate() {
        let c = match &m.edge_map[i] {
            EdgeImage::Vertex(v) => {
                let value = if bd == Bidegree::B00 {
                    on_work.value_at(tw, &GraphPoint::Vertex(*v))?
                } else {
                    Rational::zero()
                };
                PiecewisePolynomial::constant(e.length.clone(), value, order).map_err(FormError::from)?
            }
            EdgeImage::Edge { edge, orientation, expansion } => {
                let f = on_work.oriented_coeff(OrientedEdge { edge: *edge, orientation: *orientation });
                f.reparametrize(expansion, &Rational::zero(), &e.length)
                    .map_err(FormError::from)?
                    .scale(&pow(expansion, k))
            }
        };
        coeffs.push(c);
    }
    let mut isolated = BTreeMap::new();
    if bd == Bidegree::B00 {
        for v in sw.vertex_ids().filter(|&v| sw.is_isolated(v)) {
            isolated.insert(v, on_work.value_at(tw, &GraphPoint::Vertex(m.vertex_map[v.0]))?);
        }
    }
    let pulled = GraphForm::new(bd, coeffs, isolated, order)?;
    Ok(pulled.collapse_correspondence(sw, &m.source, &m.source_corr)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

/// `∫_{Σ'} φ*ω` against `d(φ)·∫_Σ ω`; the graph integral for `(1,1)`-forms
/// and the boundary integral for `(1,0)`- and `(0,1)`-forms.
pub fn integrate_pullback_check(m: &PLMap, omega: &GraphForm) -> Result<IntegralCheck> {
    let cert = harmonicity(m)?;
    let d = cert.degree.ok_or(MapError::NoDegree)?;
    let pulled = pullback_unchecked(m, omega)?;
    let (lhs, rhs) = match omega.bidegree() {
        Bidegree::B11 => (pulled.integrate_graph(&m.source)?, omega.integrate_graph(&m.target)?),
        Bidegree::B10 | Bidegree::B01 => (pulled.integrate_boundary(&m.source)?, omega.integrate_boundary(&m.target)?),
        Bidegree::B00 => {
            return Err(MapError::Form(FormError::WrongBidegree { op: "integration", bidegree: Bidegree::B00 }));
        }
    };
    let rhs = d * rhs;
    let equal = lhs == rhs;
    Ok(IntegralCheck { lhs, rhs, equal })
}

/// Harmonic function given by its vertex values; slopes are derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicFunction {
    pub values: Vec<Rational>,
    pub slopes: Vec<Rational>,
}

impl HarmonicFunction {
    pub fn from_values(g: &WeightedMetricGraph, values: Vec<Rational>) -> Self {
        let slopes = g.edges().iter().map(|e| (&values[e.head.0] - &values[e.tail.0]) / &e.length).collect();
        HarmonicFunction { values, slopes }
    }

    pub fn to_form(&self, g: &WeightedMetricGraph, order: u32) -> std::result::Result<GraphForm, FormError> {
        let polys = g
            .edges()
            .iter()
            .zip(&self.slopes)
            .map(|(e, s)| Polynomial::new(vec![self.values[e.tail.0].clone(), s.clone()]))
            .collect();
        let mut f = GraphForm::from_polynomials(g, Bidegree::B00, polys, order)?;
        for v in g.vertex_ids().filter(|&v| g.is_isolated(v)) {
            f.set_isolated(v, self.values[v.0].clone());
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeReport {
    /// Valid `(0,0)`-form that is linear on every edge.
    pub harmonic: bool,
    /// Slope of each edge, when the edge carries a single linear piece.
    pub slopes: Vec<Option<Rational>>,
    /// All slopes are integers.
    pub integral_slopes: bool,
    /// Integral slopes and vertex values in Γ; only computed when Γ is given.
    pub gamma_harmonic: Option<bool>,
}

pub fn is_harmonic_function(g: &WeightedMetricGraph, f: &GraphForm, gamma: Option<&GammaGroup>) -> std::result::Result<SlopeReport, FormError> {
    if f.bidegree() != Bidegree::B00 {
        return Err(FormError::WrongBidegree { op: "harmonicity", bidegree: f.bidegree() });
    }
    let valid = validate_form(g, f)?.is_valid();
    let slopes: Vec<Option<Rational>> = f
        .coeffs()
        .iter()
        .map(|c| (c.pieces().len() == 1 && c.first_piece().degree().unwrap_or(0) <= 1).then(|| c.first_piece().coeff(1)))
        .collect();
    let harmonic = valid && slopes.iter().all(Option::is_some);
    let integral_slopes = harmonic && slopes.iter().flatten().all(|s| s.is_integer());
    let gamma_harmonic = gamma.map(|gm| {
        integral_slopes
            && g.vertex_ids().all(|v| f.value_at(g, &GraphPoint::Vertex(v)).map(|x| gm.contains(&x)).unwrap_or(false))
    });
    Ok(SlopeReport { harmonic, slopes, integral_slopes, gamma_harmonic })
}

/// Basis of the harmonic functions on `g`, as the kernel of the weighted
/// balancing equations at interior vertices in the vertex values.
pub fn harmonic_function_space(g: &WeightedMetricGraph) -> Vec<HarmonicFunction> {
    let n = g.num_vertices();
    let mut rows = Vec::new();
    for v in g.vertex_ids() {
        if g.is_boundary(v) || g.is_isolated(v) {
            continue;
        }
        let mut row = vec![Rational::zero(); n];
        for oe in g.outgoing(v) {
            let e: &Edge = g.edge(oe.edge);
            let c = e.weight_q() / &e.length;
            let other = g.oriented_head(oe);
            row[other.0] += &c;
            row[v.0] -= c;
        }
        rows.push(row);
    }
    let kernel = if rows.is_empty() { Matrix::zeros(1, n).kernel() } else { Matrix::from_rows(rows).kernel() };
    kernel.into_iter().map(|vals| HarmonicFunction::from_values(g, vals)).collect()
}

/// A tree glued to a graph by identifying `root` with `at`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeAttachment {
    pub at: VertexId,
    pub tree: WeightedMetricGraph,
    pub root: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modification {
    pub graph: WeightedMetricGraph,
    /// Crushes every attached tree to its attachment vertex.
    pub retraction: PLMap,
    /// The original graph inside the modification.
    pub inclusion: PLMap,
}

/// Attaches trees at vertices. Old vertices and edges keep their ids; tree
/// vertices (other than the roots) and tree edges are appended in order. The
/// boundary is unchanged.
pub fn modify(g: &WeightedMetricGraph, trees: &[TreeAttachment]) -> Result<Modification> {
    let mut boundary = g.boundary_flags().to_vec();
    let mut edges = g.edges().to_vec();
    let mut vertex_map: Vec<VertexId> = g.vertex_ids().collect();
    let mut edge_map: Vec<EdgeImage> = g
        .edge_ids()
        .map(|e| EdgeImage::Edge { edge: e, orientation: Orientation::Forward, expansion: Rational::one() })
        .collect();
    for (k, t) in trees.iter().enumerate() {
        if t.at.0 >= g.num_vertices() {
            return Err(GraphError::UnknownVertex(t.at.0).into());
        }
        if t.root.0 >= t.tree.num_vertices() {
            return Err(GraphError::UnknownVertex(t.root.0).into());
        }
        let tree = &t.tree;
        if tree.components().count != 1 || tree.num_edges() + 1 != tree.num_vertices() {
            return Err(GraphError::NotATree(k).into());
        }
        let mut new_id = vec![t.at; tree.num_vertices()];
        for v in tree.vertex_ids().filter(|&v| v != t.root) {
            new_id[v.0] = VertexId(boundary.len());
            boundary.push(false);
            vertex_map.push(t.at);
        }
        for e in tree.edges() {
            edges.push(Edge { tail: new_id[e.tail.0], head: new_id[e.head.0], length: e.length.clone(), weight: e.weight });
            edge_map.push(EdgeImage::Vertex(t.at));
        }
    }
    let graph = WeightedMetricGraph::new(boundary, edges)?;
    let retraction = PLMap::new(graph.clone(), g.clone(), &[], &[], vertex_map, edge_map)?;
    let inclusion = PLMap::new(
        g.clone(),
        graph.clone(),
        &[],
        &[],
        g.vertex_ids().collect(),
        g.edge_ids()
            .map(|e| EdgeImage::Edge { edge: e, orientation: Orientation::Forward, expansion: Rational::one() })
            .collect(),
    )?;
    Ok(Modification { graph, retraction, inclusion })
}

/// Pulls back every harmonic basis function of the target and checks that the
/// results are harmonic on the source.
pub fn pulls_back_harmonic_functions(m: &PLMap, order: u32) -> Result<bool> {
    for h in harmonic_function_space(&m.target) {
        let f = h.to_form(&m.target, order)?;
        let Ok(pulled) = pullback_unchecked(m, &f) else {
            return Ok(false);
        };
        if ensure_valid(&m.source, &pulled).is_err() || !is_harmonic_function(&m.source, &pulled, None)?.harmonic {
            return Ok(false);
        }
    }
    Ok(true)
}
