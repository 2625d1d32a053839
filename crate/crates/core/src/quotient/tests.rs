use super::*;
use crate::rational::{int, rat};

fn cycle(n: usize) -> WeightedMetricGraph {
    WeightedMetricGraph::new(vec![false; n], (0..n).map(|i| Edge::new(i, (i + 1) % n, int(1), 1)).collect()).unwrap()
}

fn rotation(n: usize, k: usize) -> PLMap {
    PLMap::from_graph_maps(
        cycle(n),
        cycle(n),
        (0..n).map(|i| VertexId((i + k) % n)).collect(),
        (0..n).map(|i| Some((EdgeId((i + k) % n), Orientation::Forward))).collect(),
    )
    .unwrap()
}

/// `v ↦ −v`; edge `i → i+1` goes to edge `−i−1 → −i` backwards.
fn reflection(n: usize) -> PLMap {
    PLMap::from_graph_maps(
        cycle(n),
        cycle(n),
        (0..n).map(|i| VertexId((n - i) % n)).collect(),
        (0..n).map(|i| Some((EdgeId((2 * n - i - 1) % n), Orientation::Backward))).collect(),
    )
    .unwrap()
}

/// Circle of circumference 2 with both vertices on the mirror axis.
fn circle_flip() -> GroupAction {
    let g = WeightedMetricGraph::new(vec![false, false], vec![Edge::new(0, 1, int(1), 1), Edge::new(0, 1, int(1), 1)]).unwrap();
    let flip = PLMap::from_graph_maps(
        g.clone(),
        g.clone(),
        vec![VertexId(0), VertexId(1)],
        vec![Some((EdgeId(1), Orientation::Forward)), Some((EdgeId(0), Orientation::Forward))],
    )
    .unwrap();
    GroupAction::generate(g, vec![flip]).unwrap()
}

#[test]
fn group_generation() {
    assert_eq!(GroupAction::generate(cycle(6), vec![rotation(6, 1)]).unwrap().order(), 6);
    assert_eq!(GroupAction::generate(cycle(6), vec![rotation(6, 2)]).unwrap().order(), 3);
    assert_eq!(GroupAction::generate(cycle(5), vec![rotation(5, 1), reflection(5)]).unwrap().order(), 10);
    assert_eq!(circle_flip().order(), 2);
}

#[test]
fn equivariant_subdivision_examples() {
    let trivial = GroupAction::generate(cycle(3), vec![]).unwrap();
    assert_eq!(equivariant_subdivision(&trivial).unwrap().graph, cycle(3));
    let flip = circle_flip();
    assert_eq!(equivariant_subdivision(&flip).unwrap().graph, *flip.graph());
    let seg = WeightedMetricGraph::new(vec![true, true], vec![Edge::new(0, 1, int(1), 1)]).unwrap();
    let rev = PLMap::from_graph_maps(seg.clone(), seg.clone(), vec![VertexId(1), VertexId(0)], vec![Some((EdgeId(0), Orientation::Backward))]).unwrap();
    let sub = equivariant_subdivision(&GroupAction::generate(seg, vec![rev]).unwrap()).unwrap();
    assert_eq!(sub.points, vec![(EdgeId(0), rat(1, 2))]);
    assert_eq!(sub.graph.num_edges(), 2);
}

#[test]
fn circle_quotient_is_a_half_length_segment() {
    let q = quotient(&circle_flip()).unwrap();
    assert_eq!(q.graph.num_edges(), 1);
    assert_eq!(q.graph.edge(EdgeId(0)).length, rat(1, 2));
    assert_eq!(q.graph.edge(EdgeId(0)).weight, 1);
    assert!(q.graph.boundary_vertices().is_empty());
    assert!(q.degrees_consistent);
    assert!(verify_quotient(&q.subdivision, &q.projection).unwrap().is_valid());
}

#[test]
fn trivial_and_rotation_quotients() {
    let w = WeightedMetricGraph::new(vec![true, false], vec![Edge::new(0, 1, int(3), 3)]).unwrap();
    let q = quotient(&GroupAction::generate(w.clone(), vec![]).unwrap()).unwrap();
    assert_eq!(q.graph, w.unweight().0);
    let q = quotient(&GroupAction::generate(cycle(4), vec![rotation(4, 2)]).unwrap()).unwrap();
    assert_eq!(q.graph.num_vertices(), 2);
    assert!(q.graph.edges().iter().all(|e| e.length == rat(1, 2)));
    assert!(q.degrees_consistent);
    assert!(verify_quotient(&q.subdivision, &q.projection).unwrap().is_valid());
}

#[test]
fn stabilisers_have_local_degree_one() {
    for action in [circle_flip(), GroupAction::generate(cycle(4), vec![rotation(4, 1), reflection(4)]).unwrap()] {
        let sub = equivariant_subdivision(&action).unwrap();
        for m in &sub.action.elements {
            let cert = harmonicity(m).unwrap();
            for (v, d) in &cert.vertex_degrees {
                if m.vertex_map()[v.0] == *v {
                    assert_eq!(*d, int(1));
                }
            }
        }
    }
}

#[test]
fn verify_accepts_rescaled_and_rejects_broken_projections() {
    let action = circle_flip();
    let sub = equivariant_subdivision(&action).unwrap();
    let unit = WeightedMetricGraph::new(vec![false, false], vec![Edge::new(0, 1, int(1), 1)]).unwrap();
    let to_unit = PLMap::from_graph_maps(
        sub.graph.clone(),
        unit.clone(),
        vec![VertexId(0), VertexId(1)],
        vec![Some((EdgeId(0), Orientation::Forward)), Some((EdgeId(0), Orientation::Forward))],
    )
    .unwrap();
    assert!(verify_quotient(&sub, &to_unit).unwrap().is_valid());

    let unit_b = unit.with_boundary(vec![true, false]).unwrap();
    let to_bd = PLMap::from_graph_maps(
        sub.graph.clone(),
        unit_b,
        vec![VertexId(0), VertexId(1)],
        vec![Some((EdgeId(0), Orientation::Forward)), Some((EdgeId(0), Orientation::Forward))],
    )
    .unwrap();
    let r = verify_quotient(&sub, &to_bd).unwrap();
    assert!(r.has(Rule::BoundaryPreimage));
}

#[test]
fn invariant_cohomology_examples() {
    let r = invariant_cohomology(&GroupAction::generate(cycle(3), vec![]).unwrap(), 3).unwrap();
    assert_eq!(r.invariant, dolbeault_dimensions(&cycle(3)).total);
    assert!(r.agrees);
    let r = invariant_cohomology(&circle_flip(), 3).unwrap();
    assert_eq!(r.invariant.h01, 0);
    assert!(r.agrees);
    let r = invariant_cohomology(&GroupAction::generate(cycle(4), vec![rotation(4, 2)]).unwrap(), 3).unwrap();
    assert_eq!(r.invariant.h01, 1);
    assert!(r.agrees);
    let r = invariant_cohomology(&GroupAction::generate(cycle(5), vec![reflection(5)]).unwrap(), 3).unwrap();
    assert!(r.agrees, "{r:?}");
}

#[test]
fn invariant_maps_factor_through_the_quotient() {
    let q = quotient(&circle_flip()).unwrap();
    let unit = WeightedMetricGraph::new(vec![false, false], vec![Edge::new(0, 1, int(1), 1)]).unwrap();
    let phi = PLMap::from_graph_maps(
        q.subdivision.graph.clone(),
        unit,
        vec![VertexId(0), VertexId(1)],
        vec![Some((EdgeId(0), Orientation::Forward)), Some((EdgeId(0), Orientation::Forward))],
    )
    .unwrap();
    let psi = factor_through_quotient(&q, &phi).unwrap();
    assert!(validate_plmap(&psi).is_valid());
    assert!(harmonicity(&psi).is_ok());
    let back = compose(&q.projection, &psi).unwrap();
    assert_eq!(back.vertex_map(), phi.vertex_map());
    assert_eq!(back.edge_map(), phi.edge_map());
}
