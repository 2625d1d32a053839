//! Weighted metric graphs with boundary.
//!
//! A graph is a loop-free multigraph. Each edge is stored once with a
//! canonical orientation tail → head and carries a positive rational length
//! and a positive integer weight. The reverse edge is derived, with the
//! reversed parameter `x ↦ ℓ(e) − x`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::rational::{int, Rational};
use crate::report::{Location, Rule, ValidationReport};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Forward,
    Backward,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        }
    }

    /// Orientation of a composite of two orientation-preserving-or-reversing steps.
    pub fn then(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Forward
        } else {
            Orientation::Backward
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub length: Rational,
    pub weight: u32,
}

impl Edge {
    pub fn new(tail: usize, head: usize, length: Rational, weight: u32) -> Self {
        Edge { tail: VertexId(tail), head: VertexId(head), length, weight }
    }

    /// `ℓ₀(e) = ℓ(e)/w(e)`.
    pub fn unweighted_length(&self) -> Rational {
        &self.length / int(self.weight as i64)
    }

    pub fn weight_q(&self) -> Rational {
        int(self.weight as i64)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid graph:\n{0}")]
    Invalid(ValidationReport),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("position {position} is not strictly inside edge {edge}")]
    PositionOutsideEdge { edge: usize, position: Rational },
    #[error("position {position} repeated on edge {edge}")]
    DuplicatePosition { edge: usize, position: Rational },
    #[error("attached graph {0} is not a tree")]
    NotATree(usize),
}

/// A point of a graph: a vertex, or a parameter strictly inside an edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphPoint {
    Vertex(VertexId),
    OnEdge(EdgeId, Rational),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedMetricGraph {
    boundary: Vec<bool>,
    edges: Vec<Edge>,
}

/// Map from a derived graph onto the graph it came from: every source vertex
/// goes to a point, every source edge runs forward along a sub-interval of
/// one target edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphCorrespondence {
    pub vertex_points: Vec<GraphPoint>,
    pub edge_intervals: Vec<EdgeInterval>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeInterval {
    pub edge: EdgeId,
    pub start: Rational,
    pub end: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    /// Component index of each vertex; components are numbered by their
    /// lowest vertex.
    pub of_vertex: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn vertices(&self, c: usize) -> Vec<VertexId> {
        (0..self.of_vertex.len())
            .filter(|&v| self.of_vertex[v] == c)
            .map(VertexId)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: WeightedMetricGraph,
    /// Original id of each new vertex.
    pub vertices: Vec<VertexId>,
    /// Original id of each new edge.
    pub edges: Vec<EdgeId>,
}

impl WeightedMetricGraph {
    pub fn new(boundary: Vec<bool>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let g = Self::from_parts_unchecked(boundary, edges);
        let report = g.validate();
        if report.is_valid() {
            Ok(g)
        } else {
            Err(GraphError::Invalid(report))
        }
    }

    /// Builds a graph without checking it; `validate` reports what is wrong.
    pub fn from_parts_unchecked(boundary: Vec<bool>, edges: Vec<Edge>) -> Self {
        WeightedMetricGraph { boundary, edges }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let n = self.num_vertices();
        for (i, e) in self.edges.iter().enumerate() {
            let loc = || Location::Edge(i);
            if e.tail.0 >= n || e.head.0 >= n {
                r.push(Rule::DanglingEndpoint, loc(), format!("{} -> {}", e.tail, e.head));
            }
            if e.tail == e.head {
                r.push(Rule::LoopEdge, loc(), format!("at vertex {}", e.tail));
            }
            if e.length <= Rational::zero() {
                r.push(Rule::NonpositiveLength, loc(), e.length.to_string());
            }
            if e.weight == 0 {
                r.push(Rule::NonpositiveWeight, loc(), "0");
            }
        }
        r
    }

    pub fn num_vertices(&self) -> usize {
        self.boundary.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.num_vertices()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.num_edges()).map(EdgeId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary[v.0]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.is_boundary(v)).collect()
    }

    pub fn oriented_tail(&self, oe: OrientedEdge) -> VertexId {
        let e = self.edge(oe.edge);
        match oe.orientation {
            Orientation::Forward => e.tail,
            Orientation::Backward => e.head,
        }
    }

    pub fn oriented_head(&self, oe: OrientedEdge) -> VertexId {
        self.oriented_tail(OrientedEdge { edge: oe.edge, orientation: oe.orientation.reversed() })
    }

    /// Oriented edges starting at `v`, by increasing edge id.
    pub fn outgoing(&self, v: VertexId) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail == v {
                out.push(OrientedEdge { edge: EdgeId(i), orientation: Orientation::Forward });
            }
            if e.head == v {
                out.push(OrientedEdge { edge: EdgeId(i), orientation: Orientation::Backward });
            }
        }
        out
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.outgoing(v).len()
    }

    pub fn is_isolated(&self, v: VertexId) -> bool {
        self.valence(v) == 0
    }

    /// Normalised point at parameter `x` of edge `e` (vertices at the ends).
    pub fn point_on_edge(&self, e: EdgeId, x: &Rational) -> GraphPoint {
        let edge = self.edge(e);
        if x.is_zero() {
            GraphPoint::Vertex(edge.tail)
        } else if *x == edge.length {
            GraphPoint::Vertex(edge.head)
        } else {
            GraphPoint::OnEdge(e, x.clone())
        }
    }

    pub fn components(&self) -> Components {
        let n = self.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.tail.0), find(&mut parent, e.head.0));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut label = BTreeMap::new();
        let mut of_vertex = Vec::with_capacity(n);
        for v in 0..n {
            let root = find(&mut parent, v);
            let next = label.len();
            of_vertex.push(*label.entry(root).or_insert(next));
        }
        Components { of_vertex, count: label.len() }
    }

    /// `#E − #V + 1` per connected component.
    pub fn genus(&self) -> Vec<(usize, u64)> {
        let comps = self.components();
        let mut v = vec![0i64; comps.count];
        let mut e = vec![0i64; comps.count];
        for c in &comps.of_vertex {
            v[*c] += 1;
        }
        for edge in &self.edges {
            e[comps.of_vertex[edge.tail.0]] += 1;
        }
        (0..comps.count).map(|c| (c, (e[c] - v[c] + 1) as u64)).collect()
    }

    pub fn total_genus(&self) -> u64 {
        self.genus().iter().map(|(_, g)| g).sum()
    }

    /// Rows are vertices, columns edges, with `B e = (e⁺) − (e⁻)`.
    pub fn incidence_matrix(&self) -> Matrix {
        let mut b = Matrix::zeros(self.num_vertices(), self.num_edges());
        for (j, e) in self.edges.iter().enumerate() {
            b[(e.head.0, j)] += int(1);
            b[(e.tail.0, j)] -= int(1);
        }
        b
    }

    pub fn laplacian(&self) -> Matrix {
        let b = self.incidence_matrix();
        b.mul(&b.transpose())
    }

    /// Same combinatorics, weights 1, lengths `ℓ/w`; the correspondence is
    /// the canonical map back to `self`.
    pub fn unweight(&self) -> (WeightedMetricGraph, GraphCorrespondence) {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { tail: e.tail, head: e.head, length: e.unweighted_length(), weight: 1 })
            .collect();
        let g0 = WeightedMetricGraph { boundary: self.boundary.clone(), edges };
        let corr = GraphCorrespondence {
            vertex_points: self.vertex_ids().map(GraphPoint::Vertex).collect(),
            edge_intervals: self
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| EdgeInterval { edge: EdgeId(i), start: Rational::zero(), end: e.length.clone() })
                .collect(),
        };
        (g0, corr)
    }

    /// Splits edges at interior points. New vertices are appended in order of
    /// (edge id, position); the first piece of a split edge keeps the edge's
    /// id and the remaining pieces are appended in the same order.
    pub fn subdivide(&self, points: &[(EdgeId, Rational)]) -> Result<(WeightedMetricGraph, GraphCorrespondence), GraphError> {
        let mut by_edge: BTreeMap<EdgeId, Vec<Rational>> = BTreeMap::new();
        for (e, x) in points {
            if e.0 >= self.num_edges() {
                return Err(GraphError::UnknownEdge(e.0));
            }
            if *x <= Rational::zero() || *x >= self.edge(*e).length {
                return Err(GraphError::PositionOutsideEdge { edge: e.0, position: x.clone() });
            }
            by_edge.entry(*e).or_default().push(x.clone());
        }
        for (e, xs) in by_edge.iter_mut() {
            xs.sort();
            if let Some(w) = xs.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicatePosition { edge: e.0, position: w[0].clone() });
            }
        }
        let mut boundary = self.boundary.clone();
        let mut vertex_points: Vec<GraphPoint> = self.vertex_ids().map(GraphPoint::Vertex).collect();
        let mut edges = self.edges.clone();
        let mut intervals: Vec<EdgeInterval> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeInterval { edge: EdgeId(i), start: Rational::zero(), end: e.length.clone() })
            .collect();
        let mut extra_edges = Vec::new();
        let mut extra_intervals = Vec::new();
        for (e, xs) in &by_edge {
            let base = self.edge(*e).clone();
            let mut chain = vec![(base.tail, Rational::zero())];
            for x in xs {
                let v = VertexId(boundary.len());
                boundary.push(false);
                vertex_points.push(GraphPoint::OnEdge(*e, x.clone()));
                chain.push((v, x.clone()));
            }
            chain.push((base.head, base.length.clone()));
            for (k, w) in chain.windows(2).enumerate() {
                let piece = Edge { tail: w[0].0, head: w[1].0, length: &w[1].1 - &w[0].1, weight: base.weight };
                let iv = EdgeInterval { edge: *e, start: w[0].1.clone(), end: w[1].1.clone() };
                if k == 0 {
                    edges[e.0] = piece;
                    intervals[e.0] = iv;
                } else {
                    extra_edges.push(piece);
                    extra_intervals.push(iv);
                }
            }
        }
        edges.extend(extra_edges);
        intervals.extend(extra_intervals);
        Ok((
            WeightedMetricGraph { boundary, edges },
            GraphCorrespondence { vertex_points, edge_intervals: intervals },
        ))
    }

    /// Closed subgraph spanned by the given edges and extra vertices. Its
    /// boundary is the old boundary plus every kept vertex that touches a
    /// dropped edge.
    pub fn subgraph(&self, edge_ids: &[EdgeId], extra_vertices: &[VertexId]) -> Result<Subgraph, GraphError> {
        let mut keep_v = vec![false; self.num_vertices()];
        let mut keep_e = vec![false; self.num_edges()];
        for e in edge_ids {
            if e.0 >= self.num_edges() {
                return Err(GraphError::UnknownEdge(e.0));
            }
            keep_e[e.0] = true;
            let edge = self.edge(*e);
            keep_v[edge.tail.0] = true;
            keep_v[edge.head.0] = true;
        }
        for v in extra_vertices {
            if v.0 >= self.num_vertices() {
                return Err(GraphError::UnknownVertex(v.0));
            }
            keep_v[v.0] = true;
        }
        let vertices: Vec<VertexId> = self.vertex_ids().filter(|v| keep_v[v.0]).collect();
        let mut new_id = vec![usize::MAX; self.num_vertices()];
        for (i, v) in vertices.iter().enumerate() {
            new_id[v.0] = i;
        }
        let mut boundary: Vec<bool> = vertices.iter().map(|&v| self.is_boundary(v)).collect();
        for (i, e) in self.edges.iter().enumerate() {
            if keep_e[i] {
                continue;
            }
            for v in [e.tail, e.head] {
                if keep_v[v.0] {
                    boundary[new_id[v.0]] = true;
                }
            }
        }
        let edges_kept: Vec<EdgeId> = self.edge_ids().filter(|e| keep_e[e.0]).collect();
        let edges = edges_kept
            .iter()
            .map(|&e| {
                let edge = self.edge(e);
                Edge {
                    tail: VertexId(new_id[edge.tail.0]),
                    head: VertexId(new_id[edge.head.0]),
                    length: edge.length.clone(),
                    weight: edge.weight,
                }
            })
            .collect();
        Ok(Subgraph { graph: WeightedMetricGraph { boundary, edges }, vertices, edges: edges_kept })
    }

    /// The connected component `c` as a standalone graph.
    pub fn component_subgraph(&self, comps: &Components, c: usize) -> Subgraph {
        let edges: Vec<EdgeId> = self
            .edge_ids()
            .filter(|e| comps.of_vertex[self.edge(*e).tail.0] == c)
            .collect();
        self.subgraph(&edges, &comps.vertices(c)).expect("component ids are in range")
    }

    /// Copy with different boundary flags.
    pub fn with_boundary(&self, boundary: Vec<bool>) -> Result<Self, GraphError> {
        if boundary.len() != self.num_vertices() {
            return Err(GraphError::UnknownVertex(boundary.len()));
        }
        Ok(WeightedMetricGraph { boundary, edges: self.edges.clone() })
    }
}

impl GraphCorrespondence {
    pub fn identity(g: &WeightedMetricGraph) -> Self {
        GraphCorrespondence {
            vertex_points: g.vertex_ids().map(GraphPoint::Vertex).collect(),
            edge_intervals: g
                .edges()
                .iter()
                .enumerate()
                .map(|(i, e)| EdgeInterval { edge: EdgeId(i), start: Rational::zero(), end: e.length.clone() })
                .collect(),
        }
    }

    /// Checks shapes, endpoint compatibility and that the intervals over each
    /// target edge tile it exactly.
    pub fn check(&self, source: &WeightedMetricGraph, target: &WeightedMetricGraph) -> ValidationReport {
        let mut r = ValidationReport::new();
        if self.vertex_points.len() != source.num_vertices() || self.edge_intervals.len() != source.num_edges() {
            r.push(Rule::Tiling, Location::Whole, "shape differs from the source graph");
            return r;
        }
        let mut per_target: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); target.num_edges()];
        for (i, iv) in self.edge_intervals.iter().enumerate() {
            if iv.edge.0 >= target.num_edges() {
                r.push(Rule::Tiling, Location::Edge(i), "unknown target edge");
                continue;
            }
            let l = &target.edge(iv.edge).length;
            if iv.start < Rational::zero() || iv.start >= iv.end || iv.end > *l {
                r.push(Rule::Tiling, Location::Edge(i), "interval outside target edge");
                continue;
            }
            let se = source.edge(EdgeId(i));
            let tail_pt = target.point_on_edge(iv.edge, &iv.start);
            let head_pt = target.point_on_edge(iv.edge, &iv.end);
            if self.vertex_points.get(se.tail.0) != Some(&tail_pt) || self.vertex_points.get(se.head.0) != Some(&head_pt) {
                r.push(Rule::Tiling, Location::Edge(i), "endpoints do not match the interval");
            }
            per_target[iv.edge.0].push((iv.start.clone(), iv.end.clone()));
        }
        for (j, mut ivs) in per_target.into_iter().enumerate() {
            ivs.sort();
            let mut at = Rational::zero();
            for (a, b) in ivs {
                if a != at {
                    r.push(Rule::Tiling, Location::Edge(j), format!("gap or overlap at {at}"));
                }
                at = b;
            }
            if at != target.edge(EdgeId(j)).length {
                r.push(Rule::Tiling, Location::Edge(j), "target edge not covered");
            }
        }
        r
    }
}
