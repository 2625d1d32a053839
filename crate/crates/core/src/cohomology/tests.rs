use super::*;
use crate::calculus::Polynomial;
use crate::forms::ensure_valid;
use crate::graph::Edge;
use crate::harmonic::{modify, TreeAttachment};
use crate::rational::int;

fn parallel(k: usize) -> WeightedMetricGraph {
    WeightedMetricGraph::new(vec![false, false], (0..k).map(|_| Edge::new(0, 1, int(1), 1)).collect()).unwrap()
}

fn cycle(n: usize) -> WeightedMetricGraph {
    WeightedMetricGraph::new(vec![false; n], (0..n).map(|i| Edge::new(i, (i + 1) % n, int(1), 1)).collect()).unwrap()
}

fn dims(h00: usize, h10: usize, h01: usize, h11: usize) -> Dimensions {
    Dimensions { h00, h10, h01, h11 }
}

#[test]
fn dimension_examples() {
    let t = dolbeault_dimensions(&parallel(3));
    assert_eq!(t.total, dims(1, 2, 2, 1));
    assert!(t.agrees);
    let path = WeightedMetricGraph::new(vec![true, false, true], vec![Edge::new(0, 1, int(1), 2), Edge::new(1, 2, int(3), 1)]).unwrap();
    let t = dolbeault_dimensions(&path);
    assert_eq!(t.total, dims(1, 1, 0, 0));
    assert!(t.agrees);
    let point = WeightedMetricGraph::new(vec![false], vec![]).unwrap();
    assert_eq!(dolbeault_dimensions(&point).total, dims(1, 0, 0, 0));
    // a theta graph with a boundary leaf, next to an isolated boundary vertex
    let mixed = WeightedMetricGraph::new(
        vec![false, false, true, true],
        vec![Edge::new(0, 1, int(1), 1), Edge::new(0, 1, int(2), 1), Edge::new(1, 0, int(1), 3), Edge::new(1, 2, int(1), 1)],
    )
    .unwrap();
    let t = dolbeault_dimensions(&mixed);
    assert_eq!(t.per_component, vec![dims(1, 2, 2, 0), dims(1, 0, 0, 0)]);
    assert!(t.agrees);
}

#[test]
fn basis_examples() {
    let path = WeightedMetricGraph::new(vec![true, false, true], vec![Edge::new(0, 1, int(1), 1), Edge::new(1, 2, int(1), 1)]).unwrap();
    let b = cohomology_basis(&path, 3).unwrap();
    assert_eq!(b.h10.len(), 1);
    let c: Vec<Rational> = b.h10[0].coeffs().iter().map(|f| f.first_piece().coeff(0)).collect();
    assert_eq!(c, vec![int(1), int(1)]);
    let b = cohomology_basis(&parallel(2), 3).unwrap();
    assert_eq!(b.h01.len(), 1);
    assert_eq!(b.forest.non_tree_edges, vec![EdgeId(1)]);
    let b = cohomology_basis(&parallel(3), 3).unwrap();
    assert_eq!(b.h01.len(), 2);
    let theta = parallel(3);
    for g in [&theta, &path] {
        let b = cohomology_basis(g, 3).unwrap();
        for bd in Bidegree::all() {
            for f in b.get(bd) {
                assert!(crate::forms::validate_form(g, f).unwrap().is_valid());
                if matches!(bd, Bidegree::B00 | Bidegree::B10) {
                    assert!(f.d_second().unwrap().is_zero());
                }
            }
        }
    }
}

#[test]
fn weighted_h11_generator_has_unit_integral() {
    let g = WeightedMetricGraph::new(vec![false, false], vec![Edge::new(0, 1, int(2), 3), Edge::new(1, 0, int(1), 1)]).unwrap();
    let b = cohomology_basis(&g, 3).unwrap();
    assert_eq!(b.h11[0].integrate_graph(&g).unwrap(), int(1));
    assert_eq!(class_coordinates(&g, &b, &b.h11[0]).unwrap(), vec![int(1)]);
}

#[test]
fn preimage_examples() {
    let seg = WeightedMetricGraph::new(vec![true, true], vec![Edge::new(0, 1, int(1), 1)]).unwrap();
    let x = GraphForm::from_polynomials(&seg, Bidegree::B10, vec![Polynomial::from_ints(&[0, 1])], 3).unwrap();
    let omega = x.d_second().unwrap();
    let eta = dbar_preimage(&seg, &omega).unwrap().exact().unwrap();
    assert!(eta.d_second().unwrap().same_coefficients(&omega));

    let g = parallel(2);
    let bump = |e: usize| single_bump(&g, Bidegree::B11, EdgeId(e), &int(1), 3).unwrap();
    assert_eq!(dbar_preimage(&g, &bump(0)).unwrap(), Preimage::Obstructed(vec![int(1)]));
    let diff = bump(0).sub(&bump(1)).unwrap();
    let eta = dbar_preimage(&g, &diff).unwrap().exact().unwrap();
    ensure_valid(&g, &eta).unwrap();
    assert!(eta.d_second().unwrap().same_coefficients(&diff));
}

#[test]
fn preimage_of_01_forms() {
    let g = parallel(2);
    let b = cohomology_basis(&g, 3).unwrap();
    assert_eq!(dbar_preimage(&g, &b.h01[0]).unwrap(), Preimage::Obstructed(vec![int(1)]));
    let bump0 = single_bump(&g, Bidegree::B01, EdgeId(0), &int(1), 3).unwrap();
    let bump1 = single_bump(&g, Bidegree::B01, EdgeId(1), &int(1), 3).unwrap();
    let exact = bump0.add(&bump1).unwrap();
    let eta = dbar_preimage(&g, &exact).unwrap().exact().unwrap();
    ensure_valid(&g, &eta).unwrap();
    assert!(eta.d_second().unwrap().same_coefficients(&exact));
}

#[test]
fn coordinates() {
    let g = parallel(3);
    let b = cohomology_basis(&g, 3).unwrap();
    assert_eq!(class_coordinates(&g, &b, &b.h01[0]).unwrap(), vec![int(1), int(0)]);
    assert_eq!(class_coordinates(&g, &b, &b.h01[1]).unwrap(), vec![int(0), int(1)]);
    let eta0 = single_bump(&g, Bidegree::B00, EdgeId(2), &int(5), 3).unwrap();
    let exact = eta0.d_second().unwrap();
    assert_eq!(class_coordinates(&g, &b, &exact).unwrap(), vec![int(0), int(0)]);
    let mixed = b.h01[0].scale(&int(2)).add(&exact).unwrap();
    assert_eq!(class_coordinates(&g, &b, &mixed).unwrap(), vec![int(2), int(0)]);
    for (i, f) in b.h10.iter().enumerate() {
        let mut e = vec![int(0); b.h10.len()];
        e[i] = int(1);
        assert_eq!(class_coordinates(&g, &b, f).unwrap(), e);
    }
    assert_eq!(class_coordinates(&g, &b, &b.h00[0]).unwrap(), vec![int(1)]);
    let nonclosed = GraphForm::from_polynomials(&g, Bidegree::B10, vec![Polynomial::from_ints(&[1, 1]); 3], 3);
    if let Ok(f) = nonclosed {
        assert!(class_coordinates(&g, &b, &f).is_err());
    }
}

#[test]
fn pairing_examples() {
    let g = parallel(2);
    let p = poincare_pairing(&g, &cohomology_basis(&g, 3).unwrap()).unwrap();
    assert_eq!((p.gram.rows(), p.gram.cols()), (1, 1));
    assert!(p.perfect);
    let stick = WeightedMetricGraph::new(vec![false, false], vec![Edge::new(0, 1, int(1), 1)]).unwrap();
    let p = poincare_pairing(&stick, &cohomology_basis(&stick, 3).unwrap()).unwrap();
    assert_eq!(p.gram.rows(), 0);
    assert_eq!(p.scalars, vec![int(1)]);
    assert!(p.perfect);
    let theta = parallel(3);
    let p = poincare_pairing(&theta, &cohomology_basis(&theta, 3).unwrap()).unwrap();
    assert_eq!((p.gram.rows(), p.gram.cols()), (2, 2));
    assert!(!p.determinant.is_zero());
    let seg = WeightedMetricGraph::new(vec![true, false], vec![Edge::new(0, 1, int(1), 1)]).unwrap();
    assert!(matches!(poincare_pairing(&seg, &cohomology_basis(&seg, 3).unwrap()), Err(CohomologyError::NotApplicable(_))));
}

fn cover(n: usize, k: usize) -> PLMap {
    PLMap::from_graph_maps(
        cycle(n * k),
        cycle(n),
        (0..n * k).map(|i| VertexId(i % n)).collect(),
        (0..n * k).map(|i| Some((EdgeId(i % n), Orientation::Forward))).collect(),
    )
    .unwrap()
}

#[test]
fn induced_maps() {
    let g = parallel(3);
    let b = cohomology_basis(&g, 3).unwrap();
    let id = cohomology_pullback(&PLMap::identity(&g), &b, &b).unwrap();
    for bd in Bidegree::all() {
        assert_eq!(id.get(bd), &Matrix::identity(b.get(bd).len()));
    }
    let m = cover(2, 2);
    let bs = cohomology_basis(m.source(), 3).unwrap();
    let bt = cohomology_basis(m.target(), 3).unwrap();
    let maps = cohomology_pullback(&m, &bs, &bt).unwrap();
    assert_eq!(maps.get(Bidegree::B11), &Matrix::from_rows(vec![vec![int(2)]]));
    assert_eq!(maps.get(Bidegree::B00), &Matrix::from_rows(vec![vec![int(1)]]));

    let stick = WeightedMetricGraph::new(vec![false; 3], vec![Edge::new(0, 1, int(1), 1), Edge::new(1, 2, int(2), 1)]).unwrap();
    let md = modify(&g, &[TreeAttachment { at: VertexId(1), tree: stick, root: VertexId(0) }]).unwrap();
    let bm = cohomology_basis(&md.graph, 3).unwrap();
    let maps = cohomology_pullback(&md.retraction, &bm, &b).unwrap();
    for bd in Bidegree::all() {
        let mat = maps.get(bd);
        assert_eq!(mat.rows(), mat.cols());
        assert_eq!(mat.rank(), mat.rows(), "bidegree {bd}");
    }
}
