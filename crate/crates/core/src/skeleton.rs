//! Combinatorial skeleton data of a strictly semistable curve and the
//! cohomology table it determines.
//!
//! Components of the special fibre become vertices, singular points become
//! edges (length = valuation of the modulus, weight = residue degree) and
//! non-proper components make up the boundary.

use std::collections::BTreeMap;

use num_traits::Signed;
use thiserror::Error;

use crate::cohomology::{dolbeault_dimensions, Dimensions};
use crate::graph::{Edge, VertexId, WeightedMetricGraph};
use crate::harmonic::{modify, TreeAttachment};
use crate::rational::{one, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub id: u64,
    pub proper: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularPoint {
    pub id: u64,
    pub a: u64,
    pub b: u64,
    pub degree: u32,
    pub modulus: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SkeletonDescription {
    pub components: Vec<Component>,
    pub points: Vec<SingularPoint>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeletonError {
    #[error("a skeleton needs at least one component")]
    NoComponents,
    #[error("component {0} listed twice")]
    DuplicateComponent(u64),
    #[error("singular point {0} listed twice")]
    DuplicatePoint(u64),
    #[error("singular point {point} lies on unknown component {component}")]
    UnknownComponent { point: u64, component: u64 },
    #[error("singular point {0} joins a component to itself")]
    SelfPair(u64),
    #[error("singular point {0} has residue degree 0")]
    ZeroDegree(u64),
    #[error("singular point {0} has nonpositive modulus valuation")]
    NonpositiveModulus(u64),
}

impl SkeletonDescription {
    pub fn validate(&self) -> Result<(), SkeletonError> {
        if self.components.is_empty() {
            return Err(SkeletonError::NoComponents);
        }
        let mut seen = BTreeMap::new();
        for c in &self.components {
            if seen.insert(c.id, ()).is_some() {
                return Err(SkeletonError::DuplicateComponent(c.id));
            }
        }
        let mut points = BTreeMap::new();
        for p in &self.points {
            if points.insert(p.id, ()).is_some() {
                return Err(SkeletonError::DuplicatePoint(p.id));
            }
            for c in [p.a, p.b] {
                if !seen.contains_key(&c) {
                    return Err(SkeletonError::UnknownComponent { point: p.id, component: c });
                }
            }
            if p.a == p.b {
                return Err(SkeletonError::SelfPair(p.id));
            }
            if p.degree == 0 {
                return Err(SkeletonError::ZeroDegree(p.id));
            }
            if !p.modulus.is_positive() {
                return Err(SkeletonError::NonpositiveModulus(p.id));
            }
        }
        Ok(())
    }
}

/// Incidence graph: vertices in the order the components are listed, edges
/// in the order of the singular points, tail at `a`.
pub fn skeleton_to_graph(d: &SkeletonDescription) -> Result<WeightedMetricGraph, SkeletonError> {
    d.validate()?;
    let index: BTreeMap<u64, usize> = d.components.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
    let boundary = d.components.iter().map(|c| !c.proper).collect();
    let edges = d.points.iter().map(|p| Edge::new(index[&p.a], index[&p.b], p.modulus.clone(), p.degree)).collect();
    Ok(WeightedMetricGraph::new(boundary, edges).expect("validated skeleton gives a valid graph"))
}

/// Expected table of a connected curve with skeleton genus `g` and `b`
/// non-proper ends.
pub fn curve_table(g: usize, b: usize) -> Dimensions {
    if b == 0 {
        Dimensions { h00: 1, h10: g, h01: g, h11: 1 }
    } else {
        Dimensions { h00: 1, h10: g + b - 1, h01: g, h11: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveComponent {
    pub genus: usize,
    pub boundary: usize,
    pub computed: Dimensions,
    pub expected: Dimensions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveCohomology {
    /// Incidence graph, with a unit edge to a new proper component attached
    /// at every isolated proper component.
    pub graph: WeightedMetricGraph,
    pub blown_up: Vec<VertexId>,
    pub components: Vec<CurveComponent>,
    pub agrees: bool,
}

/// Graph cohomology of the skeleton, one table per connected component.
///
/// A smooth proper component meeting nothing has a one-point skeleton whose
/// graph carries no (1,1)-forms; blowing up a point on it gives a segment
/// with the right cohomology, so that is done first.
pub fn curve_cohomology(d: &SkeletonDescription) -> Result<CurveCohomology, SkeletonError> {
    let base = skeleton_to_graph(d)?;
    let blown_up: Vec<VertexId> = base.vertex_ids().filter(|&v| base.is_isolated(v) && !base.is_boundary(v)).collect();
    let graph = if blown_up.is_empty() {
        base
    } else {
        let tree = WeightedMetricGraph::new(vec![false, false], vec![Edge::new(0, 1, one(), 1)]).unwrap();
        let trees: Vec<TreeAttachment> = blown_up.iter().map(|&at| TreeAttachment { at, tree: tree.clone(), root: VertexId(0) }).collect();
        modify(&base, &trees).expect("attaching a segment at a vertex").graph
    };
    let table = dolbeault_dimensions(&graph);
    let comps = graph.components();
    let genus = graph.genus();
    let components: Vec<CurveComponent> = (0..comps.count)
        .map(|c| {
            let boundary = comps.vertices(c).iter().filter(|&&v| graph.is_boundary(v)).count();
            let g = genus[c].1 as usize;
            CurveComponent { genus: g, boundary, computed: table.per_component[c], expected: curve_table(g, boundary) }
        })
        .collect();
    let agrees = components.iter().all(|c| c.computed == c.expected);
    Ok(CurveCohomology { graph, blown_up, components, agrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn comp(id: u64, proper: bool) -> Component {
        Component { id, proper }
    }

    fn pt(id: u64, a: u64, b: u64, degree: u32, modulus: Rational) -> SingularPoint {
        SingularPoint { id, a, b, degree, modulus }
    }

    #[test]
    fn tate_curve() {
        let d = SkeletonDescription { components: vec![comp(0, true), comp(1, true)], points: vec![pt(0, 0, 1, 1, int(1)), pt(1, 1, 0, 1, int(1))] };
        let g = skeleton_to_graph(&d).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 2);
        assert!(g.boundary_vertices().is_empty());
        let c = curve_cohomology(&d).unwrap();
        assert!(c.agrees);
        assert_eq!(c.components[0].computed, Dimensions { h00: 1, h10: 1, h01: 1, h11: 1 });
    }

    #[test]
    fn invalid_descriptions() {
        let d = SkeletonDescription { components: vec![comp(0, true)], points: vec![pt(0, 0, 0, 1, int(1))] };
        assert_eq!(skeleton_to_graph(&d), Err(SkeletonError::SelfPair(0)));
        assert_eq!(skeleton_to_graph(&SkeletonDescription::default()), Err(SkeletonError::NoComponents));
        let d = SkeletonDescription { components: vec![comp(0, true), comp(1, false)], points: vec![pt(0, 0, 1, 1, int(0))] };
        assert_eq!(skeleton_to_graph(&d), Err(SkeletonError::NonpositiveModulus(0)));
        let d = SkeletonDescription { components: vec![comp(0, true)], points: vec![pt(0, 0, 4, 1, int(1))] };
        assert!(matches!(skeleton_to_graph(&d), Err(SkeletonError::UnknownComponent { component: 4, .. })));
    }

    #[test]
    fn boundary_configurations() {
        let d = SkeletonDescription { components: vec![comp(7, false)], points: vec![] };
        let g = skeleton_to_graph(&d).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.is_boundary(VertexId(0))), (1, 0, true));
        let c = curve_cohomology(&d).unwrap();
        assert_eq!(c.components[0].computed, Dimensions { h00: 1, h10: 0, h01: 0, h11: 0 });
        let d = SkeletonDescription { components: vec![comp(0, false), comp(1, false)], points: vec![pt(0, 0, 1, 2, rat(3, 2))] };
        let c = curve_cohomology(&d).unwrap();
        assert!(c.agrees);
        assert_eq!((c.components[0].computed.h10, c.components[0].computed.h11), (1, 0));
    }

    #[test]
    fn smooth_proper_component_is_blown_up() {
        let d = SkeletonDescription { components: vec![comp(0, true)], points: vec![] };
        let c = curve_cohomology(&d).unwrap();
        assert_eq!(c.blown_up, vec![VertexId(0)]);
        assert_eq!(c.components[0].computed, Dimensions { h00: 1, h10: 0, h01: 0, h11: 1 });
        assert!(c.agrees);
    }
}
