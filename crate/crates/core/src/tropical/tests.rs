use super::*;
use crate::graph::{Edge, Orientation};
use crate::harmonic::{harmonicity, pullback_form, PLMap};
use crate::rational::{int, rat};

fn segment(len: Rational, weight: u32, boundary: [bool; 2]) -> WeightedMetricGraph {
    WeightedMetricGraph::new(boundary.to_vec(), vec![Edge::new(0, 1, len, weight)]).unwrap()
}

fn two_cycle() -> WeightedMetricGraph {
    WeightedMetricGraph::new(vec![false, false], vec![Edge::new(0, 1, int(1), 1), Edge::new(1, 0, int(1), 1)]).unwrap()
}

/// Tripod with centre 0 and leaves 1, 2, 3, the leaves on the boundary.
fn tripod(lengths: [Rational; 3], weights: [u32; 3]) -> WeightedMetricGraph {
    let edges = (0..3).map(|i| Edge::new(0, i + 1, lengths[i].clone(), weights[i])).collect();
    WeightedMetricGraph::new(vec![false, true, true, true], edges).unwrap()
}

fn q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn poly(c: &[i64]) -> Polynomial {
    Polynomial::from_ints(c)
}

#[test]
fn gamma_membership() {
    let g = GammaGroup::new(vec![rat(1, 2), rat(1, 3)], false).unwrap();
    assert_eq!(g.generator(), Some(rat(1, 6)));
    assert!(g.contains(&rat(5, 6)));
    assert!(!g.contains(&rat(1, 12)));
    assert!(g.saturation().contains(&rat(1, 12)));
    assert!(GammaGroup::new(vec![int(-1)], false).is_none());
    let zero = GammaGroup::new(vec![], false).unwrap();
    assert!(zero.contains(&int(0)) && !zero.contains(&int(1)));
}

#[test]
fn harmonicity_flags() {
    let g = segment(int(1), 1, [true, true]);
    let z = GammaGroup::integers();
    let c = HarmonicTropicalization::constant(&g, &q(&[3]));
    let r = check_harmonic_trop(&g, &c, &z, None).unwrap();
    assert!(r.harmonic && r.integral && r.gamma);
    let x = HarmonicTropicalization::from_values(&g, vec![q(&[0, 1])]).unwrap();
    assert_eq!(x.slopes()[0], q(&[1]));
    let r = check_harmonic_trop(&g, &x, &z, None).unwrap();
    assert!(r.harmonic && r.integral && r.gamma);
    let half = HarmonicTropicalization::from_values(&g, vec![vec![int(0), rat(1, 2)]]).unwrap();
    let r = check_harmonic_trop(&g, &half, &z, None).unwrap();
    assert!(r.harmonic && !r.integral && !r.gamma);
    assert!(matches!(r.witnesses[0], TropWitness::NonIntegralSlope { .. }));
    // an interior end forces the slope to vanish
    let open = segment(int(1), 1, [true, false]);
    let r = check_harmonic_trop(&open, &x, &z, None).unwrap();
    assert!(!r.harmonic);
    assert!(matches!(r.witnesses[0], TropWitness::Unbalanced { vertex: 1, .. }));
    assert!(matches!(
        HarmonicTropicalization::new(&g, vec![q(&[0, 1])], vec![q(&[2])]),
        Err(TropicalError::Inconsistent { .. })
    ));
}

#[test]
fn ambient_extension_of_values() {
    // U is [1/4, 3/4] inside a unit edge; h = t has value 1/4 at the start
    // of U, yet the affine extension takes the values 0 and 1.
    let u = segment(rat(1, 2), 1, [true, true]);
    let parent = segment(int(1), 1, [true, true]);
    let iv = [EdgeInterval { edge: EdgeId(0), start: rat(1, 4), end: rat(3, 4) }];
    let h = HarmonicTropicalization::from_values(&u, vec![vec![rat(1, 4), rat(3, 4)]]).unwrap();
    let z = GammaGroup::integers();
    assert!(!check_harmonic_trop(&u, &h, &z, None).unwrap().gamma);
    let amb = Ambient { parent: &parent, intervals: &iv };
    assert!(check_harmonic_trop(&u, &h, &z, Some(amb)).unwrap().gamma);
    let shifted = HarmonicTropicalization::from_values(&u, vec![vec![rat(1, 2), int(1)]]).unwrap();
    assert!(!check_harmonic_trop(&u, &shifted, &z, Some(amb)).unwrap().gamma);
}

#[test]
fn multipoly_basics() {
    let x1 = MultiPoly::var(2, 0);
    let x2 = MultiPoly::var(2, 1);
    let p = x1.mul(&x1).add(&x2.scale(&int(3)));
    assert_eq!(p.eval(&q(&[2, 5])), int(19));
    assert_eq!(p.partial(0), x1.scale(&int(2)));
    assert_eq!(p.partial(1), MultiPoly::constant(2, int(3)));
    // along (1, 1) + t (2, -1): (1+2t)^2 + 3(1−t)
    assert_eq!(p.along_line(&q(&[1, 1]), &q(&[2, -1])), poly(&[4, 1, 4]));
    assert_eq!(p.degree(), Some(2));
    assert!(p.sub(&p).is_zero());
    assert_eq!(p.to_string(), "3*x2 + 1*x1^2");
}

#[test]
fn lagerberg_differentials_and_wedge() {
    let n = 2;
    let x1 = MultiPoly::var(n, 0);
    let x2 = MultiPoly::var(n, 1);
    let g = LagerbergPolyForm::function(x1.mul(&x2));
    let dg = g.d_second().unwrap();
    assert_eq!(dg.bidegree(), Bidegree::B01);
    assert_eq!(dg.coeffs(), &[x2.clone(), x1.clone()]);
    // d'd''g = −d''d'g for the sign conventions used
    let a = dg.d_first().unwrap();
    let b = g.d_first().unwrap().d_second().unwrap();
    assert_eq!(a, b.scale(&int(-1)));
    assert_eq!(a.coeff11(0, 1), &MultiPoly::constant(n, int(1)));
    let alpha = LagerbergPolyForm::new(n, Bidegree::B10, vec![x1.clone(), MultiPoly::zero(n)]).unwrap();
    let beta = LagerbergPolyForm::new(n, Bidegree::B01, vec![MultiPoly::zero(n), x2.clone()]).unwrap();
    let ab = alpha.wedge(&beta).unwrap();
    let ba = beta.wedge(&alpha).unwrap();
    assert_eq!(ab.coeff11(0, 1), &x1.mul(&x2));
    assert_eq!(ba, ab.scale(&int(-1)));
    assert!(alpha.wedge(&alpha).is_err());
    assert!(LagerbergPolyForm::new(n, Bidegree::B11, vec![x1]).is_err());
}

#[test]
fn pullback_examples() {
    let g = segment(int(1), 1, [true, true]);
    let h = HarmonicTropicalization::from_values(&g, vec![q(&[0, 1])]).unwrap();
    let eta = LagerbergPolyForm::new(1, Bidegree::B10, vec![MultiPoly::var(1, 0)]).unwrap();
    let f = pullback_lagerberg(&g, &h, &eta, 3).unwrap();
    assert_eq!(f.bidegree(), Bidegree::B10);
    assert_eq!(f.coeff(EdgeId(0)).first_piece(), &Polynomial::x());

    let h2 = HarmonicTropicalization::from_values(&g, vec![q(&[0, 1]), q(&[0, 2])]).unwrap();
    let eta = LagerbergPolyForm::elementary11(2, 0, 1, MultiPoly::constant(2, int(1)));
    let f = pullback_lagerberg(&g, &h2, &eta, 3).unwrap();
    assert_eq!(f.coeff(EdgeId(0)).first_piece(), &Polynomial::constant(int(2)));

    let c = HarmonicTropicalization::constant(&g, &q(&[5, 7]));
    for b in [Bidegree::B10, Bidegree::B01, Bidegree::B11] {
        let mut eta = LagerbergPolyForm::zero(2, b);
        eta = eta.add(&LagerbergPolyForm::new(2, b, vec![MultiPoly::var(2, 0); eta.coeffs().len()]).unwrap()).unwrap();
        assert!(pullback_lagerberg(&g, &c, &eta, 3).unwrap().is_zero());
    }
    assert!(matches!(pullback_lagerberg(&g, &h, &LagerbergPolyForm::zero(2, Bidegree::B00), 3), Err(TropicalError::Dimension { .. })));
}

#[test]
fn pullback_commutes_with_operators() {
    // tripod with h_1 = t on e_1 and −t on e_0
    let g = tripod([int(1), int(2), int(1)], [1, 1, 1]);
    let h = HarmonicTropicalization::from_points(&g, 2, &[q(&[0, 0]), q(&[-1, -1]), q(&[2, 0]), q(&[0, 1])]).unwrap();
    let x1 = MultiPoly::var(2, 0);
    let x2 = MultiPoly::var(2, 1);
    let g0 = LagerbergPolyForm::function(x1.mul(&x1).add(&x1.mul(&x2)).add(&MultiPoly::constant(2, int(3))));
    let k = 4;
    let pg = pullback_lagerberg(&g, &h, &g0, k).unwrap();
    assert!(crate::forms::validate_form(&g, &pg).unwrap().is_valid());
    let lhs = pullback_lagerberg(&g, &h, &g0.d_second().unwrap(), k).unwrap();
    assert!(lhs.same_coefficients(&pg.d_second().unwrap()));
    let lhs = pullback_lagerberg(&g, &h, &g0.d_first().unwrap(), k).unwrap();
    assert!(lhs.same_coefficients(&pg.d_first().unwrap()));
    let a = LagerbergPolyForm::new(2, Bidegree::B10, vec![x2.clone(), x1.mul(&x2)]).unwrap();
    let b = LagerbergPolyForm::new(2, Bidegree::B01, vec![x1.clone(), MultiPoly::constant(2, int(2))]).unwrap();
    let pa = pullback_lagerberg(&g, &h, &a, k).unwrap();
    let pb = pullback_lagerberg(&g, &h, &b, k).unwrap();
    let lhs = pullback_lagerberg(&g, &h, &a.wedge(&b).unwrap(), k).unwrap();
    assert!(lhs.same_coefficients(&pa.wedge(&pb).unwrap()));
    let lhs = pullback_lagerberg(&g, &h, &b.wedge(&a).unwrap(), k).unwrap();
    assert!(lhs.same_coefficients(&pb.wedge(&pa).unwrap()));
    let lhs = pullback_lagerberg(&g, &h, &a.d_second().unwrap(), k).unwrap();
    assert!(lhs.same_coefficients(&pa.d_second().unwrap()));
    let lhs = pullback_lagerberg(&g, &h, &b.d_first().unwrap(), k).unwrap();
    assert!(lhs.same_coefficients(&pb.d_first().unwrap()));
}

#[test]
fn functoriality_under_a_double_cover() {
    let g = two_cycle();
    let src = WeightedMetricGraph::new(vec![false; 4], (0..4).map(|i| Edge::new(i, (i + 1) % 4, int(1), 1)).collect()).unwrap();
    let m = PLMap::from_graph_maps(
        src,
        g.clone(),
        (0..4).map(|i| VertexId(i % 2)).collect(),
        (0..4).map(|i| Some((EdgeId(i % 2), Orientation::Forward))).collect(),
    )
    .unwrap();
    // harmonic functions on a closed graph are constant; use a constant h
    let h = HarmonicTropicalization::constant(&g, &q(&[2]));
    let hp = h.compose_map(&m).unwrap();
    let eta = LagerbergPolyForm::function(MultiPoly::var(1, 0).mul(&MultiPoly::var(1, 0)));
    let direct = pullback_lagerberg(m.source(), &hp, &eta, 3).unwrap();
    let via = pullback_form(&m, &pullback_lagerberg(&g, &h, &eta, 3).unwrap()).unwrap();
    assert!(direct.same_coefficients(&via));
}

#[test]
fn functoriality_with_boundary() {
    // Σ' = segment of length 2 mapping onto Σ = segment of length 1 with
    // expansion 1/2, both with boundary.
    let tgt = segment(int(1), 1, [true, true]);
    let src = segment(int(2), 1, [true, true]);
    let m = PLMap::from_graph_maps(src, tgt.clone(), vec![VertexId(0), VertexId(1)], vec![Some((EdgeId(0), Orientation::Forward))]).unwrap();
    assert!(harmonicity(&m).is_ok());
    let h = HarmonicTropicalization::from_values(&tgt, vec![q(&[1, 3]), q(&[0, -1])]).unwrap();
    let hp = h.compose_map(&m).unwrap();
    let x1 = MultiPoly::var(2, 0);
    let x2 = MultiPoly::var(2, 1);
    for eta in [
        LagerbergPolyForm::function(x1.mul(&x2)),
        LagerbergPolyForm::new(2, Bidegree::B10, vec![x2.clone(), x1.clone()]).unwrap(),
        LagerbergPolyForm::new(2, Bidegree::B01, vec![x1.mul(&x1), x2.clone()]).unwrap(),
        LagerbergPolyForm::elementary11(2, 1, 0, x1.clone()),
    ] {
        let direct = pullback_lagerberg(m.source(), &hp, &eta, 3).unwrap();
        let via = pullback_form(&m, &pullback_lagerberg(&tgt, &h, &eta, 3).unwrap()).unwrap();
        assert!(direct.same_coefficients(&via), "{:?}", eta.bidegree());
    }
}

#[test]
fn cycle_examples() {
    let g = segment(int(1), 2, [true, true]);
    let h = HarmonicTropicalization::from_values(&g, vec![q(&[0, 2]), q(&[1, 5])]).unwrap();
    let c = trop_cycle(&g, &h).unwrap();
    assert_eq!(c.segments().len(), 1);
    assert_eq!(c.segments()[0].start, q(&[0, 1]));
    assert_eq!(c.segments()[0].end, q(&[2, 5]));
    assert_eq!(c.segments()[0].multiplicity, BigInt::from(4));
    assert!(check_balancing(&c).is_empty());

    let k = HarmonicTropicalization::constant(&g, &q(&[1, 1]));
    assert!(trop_cycle(&g, &k).unwrap().is_empty());

    // 2-cycle with both vertices on the boundary: both edges map onto [0,1]
    let g2 = WeightedMetricGraph::new(vec![true, true], vec![Edge::new(0, 1, int(1), 1), Edge::new(1, 0, int(1), 1)]).unwrap();
    let h2 = HarmonicTropicalization::from_values(&g2, vec![q(&[0, 1])]).unwrap();
    assert_eq!(h2.slopes()[0], q(&[1, -1]));
    let c2 = trop_cycle(&g2, &h2).unwrap();
    assert_eq!(c2.segments(), &[Segment { start: q(&[0]), end: q(&[1]), multiplicity: BigInt::from(2) }]);
    assert_eq!(c2.excluded(), &[q(&[0]), q(&[1])]);
    assert!(check_balancing(&c2).is_empty());

    let half = HarmonicTropicalization::from_values(&g, vec![vec![int(0), rat(1, 2)]]).unwrap();
    assert!(matches!(trop_cycle(&g, &half), Err(TropicalError::NonIntegralSlope { .. })));
}

#[test]
fn refinement_and_balancing() {
    let seg = |a: &[i64], b: &[i64], m: i64| Segment { start: q(a), end: q(b), multiplicity: BigInt::from(m) };
    // crossing diagonals of a square
    let c = TropCycle::new(2, vec![seg(&[0, 0], &[2, 2], 1), seg(&[0, 2], &[2, 0], 1)], vec![]).unwrap();
    assert!(!c.is_refined());
    let r = c.refined();
    assert_eq!(r.segments().len(), 4);
    assert!(r.is_refined());
    let bad = check_balancing(&c);
    assert_eq!(bad.len(), 4);
    assert!(bad.iter().all(|b| b.point != q(&[1, 1])));
    // overlapping collinear pieces merge
    let c = TropCycle::new(1, vec![seg(&[0], &[2], 1), seg(&[1], &[3], 2)], vec![]).unwrap().refined();
    let m: Vec<i64> = c.segments().iter().map(|s| i64::try_from(&s.multiplicity).unwrap()).collect();
    assert_eq!(m, vec![1, 3, 2]);
    // dangling end
    let c = TropCycle::new(2, vec![seg(&[0, 0], &[1, 0], 1)], vec![q(&[0, 0])]).unwrap();
    let bad = check_balancing(&c);
    assert_eq!(bad, vec![Imbalance { point: q(&[1, 0]), sum: vec![BigInt::from(-1), BigInt::from(0)] }]);
    // tropical line
    let line = TropCycle::new(
        2,
        vec![seg(&[0, 0], &[1, 0], 1), seg(&[0, 0], &[0, 1], 1), seg(&[0, 0], &[-1, -1], 1)],
        vec![q(&[1, 0]), q(&[0, 1]), q(&[-1, -1])],
    )
    .unwrap();
    assert!(check_balancing(&line).is_empty());
    assert!(TropCycle::new(1, vec![seg(&[0], &[0], 1)], vec![]).is_err());
}

#[test]
fn tropical_integrals() {
    let seg = |m: i64| Segment { start: q(&[0, 0]), end: q(&[1, 0]), multiplicity: BigInt::from(m) };
    let eta = LagerbergPolyForm::elementary11(2, 0, 0, MultiPoly::constant(2, int(1)));
    let c1 = TropCycle::new(2, vec![seg(1)], vec![]).unwrap();
    let c4 = TropCycle::new(2, vec![seg(4)], vec![]).unwrap();
    assert_eq!(trop_integrate(&c1, &eta).unwrap(), int(1));
    assert_eq!(trop_integrate(&c4, &eta).unwrap(), int(4));
    assert_eq!(trop_integrate(&c1, &LagerbergPolyForm::zero(2, Bidegree::B11)).unwrap(), int(0));
    // lattice length of [0,(2,2)] is 2 along (1,1)
    let diag = TropCycle::new(2, vec![Segment { start: q(&[0, 0]), end: q(&[2, 2]), multiplicity: BigInt::from(1) }], vec![]).unwrap();
    assert_eq!(trop_integrate(&diag, &eta).unwrap(), int(2));
    let unrefined = TropCycle::new(2, vec![seg(1), seg(1)], vec![]).unwrap();
    assert!(matches!(trop_integrate(&unrefined, &eta), Err(TropicalError::Unrefined(..))));
    let a = LagerbergPolyForm::new(2, Bidegree::B10, vec![MultiPoly::var(2, 0), MultiPoly::zero(2)]).unwrap();
    assert_eq!(trop_boundary_integrate(&c1, &a).unwrap(), int(-1));
    let b = LagerbergPolyForm::new(2, Bidegree::B01, a.coeffs().to_vec()).unwrap();
    assert_eq!(trop_boundary_integrate(&c1, &b).unwrap(), int(1));
}

#[test]
fn compatibility_examples() {
    let g = segment(int(1), 1, [true, true]);
    let x = HarmonicTropicalization::from_values(&g, vec![q(&[0, 1])]).unwrap();
    let eta = LagerbergPolyForm::elementary11(1, 0, 0, MultiPoly::var(1, 0));
    let c = integration_compat_check(&g, &x, &eta).unwrap();
    assert_eq!((c.graph_side.clone(), c.trop_side.clone(), c.equal), (rat(1, 2), rat(1, 2), true));

    let k = HarmonicTropicalization::constant(&g, &q(&[3]));
    let c = integration_compat_check(&g, &k, &eta).unwrap();
    assert_eq!((c.graph_side, c.trop_side, c.equal), (int(0), int(0), true));

    // w = 2, slope 2: ∫_Σ = 2·∫₀¹ 4·(2t)dt = 8, and the segment [0,2] has
    // lattice length 2 and m = 4: 4·∫₀² x dx = 8.
    let w = segment(int(1), 2, [true, true]);
    let h = HarmonicTropicalization::from_values(&w, vec![q(&[0, 2])]).unwrap();
    let c = integration_compat_check(&w, &h, &eta).unwrap();
    assert_eq!(c.graph_side, int(8));
    assert!(c.equal);
    for b in [Bidegree::B10, Bidegree::B01] {
        let e = LagerbergPolyForm::new(1, b, vec![MultiPoly::var(1, 0).mul(&MultiPoly::var(1, 0))]).unwrap();
        let c = integration_compat_check(&w, &h, &e).unwrap();
        assert!(c.equal, "{b:?}: {} vs {}", c.graph_side, c.trop_side);
    }
}

#[test]
fn unweighting_preserves_trop() {
    let g = tripod([int(1), int(2), int(3)], [2, 1, 1]);
    // slopes (1, -1, -1): weighted sum 2 − 1 − 1 = 0 at the centre
    let h = HarmonicTropicalization::from_points(&g, 1, &[q(&[0]), q(&[1]), q(&[-2]), q(&[-3])]).unwrap();
    let (g0, _) = g.unweight();
    let h0 = h.on_unweighting(&g);
    assert!(HarmonicTropicalization::new(&g0, h0.values().to_vec(), h0.slopes().to_vec()).is_ok());
    let a = trop_cycle(&g, &h).unwrap();
    let b = trop_cycle(&g0, &h0).unwrap();
    assert!(a.same_support_and_weights(&b));
}

#[test]
fn star_extension_examples() {
    let f = polynomial_star_extension(&[poly(&[5]), poly(&[5]), poly(&[5])]).unwrap();
    assert_eq!(f, MultiPoly::constant(2, int(5)));
    let f = polynomial_star_extension(&[poly(&[0, -1]), poly(&[0, 1]), poly(&[])]).unwrap();
    assert_eq!(f, MultiPoly::var(2, 0));
    let sq = poly(&[0, 0, 1]);
    let f = polynomial_star_extension(&[sq.clone(), sq.clone(), sq.clone()]).unwrap();
    let dirs = [q(&[-1, -1]), q(&[1, 0]), q(&[0, 1])];
    for d in &dirs {
        assert_eq!(f.along_line(&q(&[0, 0]), d), sq);
    }
    assert!(polynomial_star_extension(&[poly(&[1]), poly(&[0]), poly(&[0])]).is_err());
    assert!(polynomial_star_extension(&[poly(&[0, 1]), poly(&[0, 1]), poly(&[0])]).is_err());
    assert!(polynomial_star_extension(&[poly(&[0]), poly(&[0])]).is_err());
}

fn check_certificate(g: &WeightedMetricGraph, omega: &GraphForm, x: GraphPoint, case: LocalCase) -> LocalCertificate {
    let gamma = GammaGroup::new(g.edges().iter().map(|e| e.length.clone()).collect(), false).unwrap();
    let c = local_pullback_certificate(g, omega, &x, &gamma).unwrap();
    assert_eq!(c.case, case);
    assert!(c.verified, "{case:?}");
    let u = &c.neighbourhood.graph;
    let flags = check_harmonic_trop(u, &c.tropicalization, &gamma, Some(Ambient { parent: g, intervals: &c.ambient })).unwrap();
    assert!(flags.gamma, "{:?}", flags.witnesses);
    c
}

#[test]
fn certificate_on_an_edge_interior() {
    let g = segment(int(1), 1, [true, true]);
    let f = GraphForm::from_polynomials(&g, Bidegree::B00, vec![poly(&[0, 0, 1])], 3).unwrap();
    let c = check_certificate(&g, &f, GraphPoint::OnEdge(EdgeId(0), rat(1, 3)), LocalCase::EdgeInterior);
    assert_eq!(c.eta, LagerbergPolyForm::function(MultiPoly::univariate(1, 0, &poly(&[0, 0, 1]))));
    assert_eq!(c.ambient[0].start, rat(1, 6));
    assert!(matches!(
        local_pullback_certificate(&g, &f, &GraphPoint::OnEdge(EdgeId(3), int(0)), &GammaGroup::integers()),
        Err(TropicalError::PointNotOnGraph)
    ));
}

#[test]
fn certificate_at_an_interior_leaf() {
    let g = segment(int(1), 1, [false, true]);
    let f = GraphForm::constant(&g, int(7), 3).unwrap();
    let c = check_certificate(&g, &f, GraphPoint::Vertex(VertexId(0)), LocalCase::InteriorLeaf);
    assert_eq!(c.eta, LagerbergPolyForm::function(MultiPoly::constant(1, int(7))));
    assert!(c.tropicalization.slopes()[0].iter().all(Zero::is_zero));
}

#[test]
fn certificate_at_a_valence_three_vertex() {
    let g = tripod([int(1), int(1), int(1)], [1, 1, 1]);
    let polys = vec![poly(&[0, 1, 3]), Polynomial::zero(), Polynomial::zero()];
    let omega = GraphForm::from_polynomials(&g, Bidegree::B11, polys, 3).unwrap();
    let c = check_certificate(&g, &omega, GraphPoint::Vertex(VertexId(0)), LocalCase::Star);
    assert_eq!(c.eta.dim(), 2);
    assert!(c.eta.coeff11(1, 0).is_zero());
    // the off-diagonal part only involves a constant
    for b in Bidegree::all() {
        let f = match b {
            Bidegree::B00 => GraphForm::from_polynomials(&g, b, vec![poly(&[2, 1, 1]), poly(&[2, -2]), poly(&[2, 1, 0, 4])], 3),
            Bidegree::B10 | Bidegree::B01 => {
                GraphForm::from_polynomials(&g, b, vec![poly(&[1, 1]), poly(&[2, 0, 1]), poly(&[-3, 5])], 3)
            }
            Bidegree::B11 => GraphForm::from_polynomials(&g, b, vec![poly(&[1, 1]), poly(&[2, 0, 1]), poly(&[-3, 5])], 3),
        }
        .unwrap();
        check_certificate(&g, &f, GraphPoint::Vertex(VertexId(0)), LocalCase::Star);
    }
}

#[test]
fn certificate_with_weights_and_boundary() {
    let g = tripod([int(2), int(1), int(3)], [2, 3, 1]);
    let b = GraphForm::from_polynomials(&g, Bidegree::B10, vec![poly(&[1, 1]), poly(&[-1, 2]), poly(&[1])], 3).unwrap();
    let c = check_certificate(&g, &b, GraphPoint::Vertex(VertexId(1)), LocalCase::BoundaryVertex);
    assert_eq!(c.scale, int(6));
    let f = GraphForm::from_polynomials(&g, Bidegree::B00, vec![poly(&[0, 3]), poly(&[0, -2, 1]), poly(&[0])], 3).unwrap();
    check_certificate(&g, &f, GraphPoint::Vertex(VertexId(0)), LocalCase::Star);
    check_certificate(&g, &f, GraphPoint::OnEdge(EdgeId(1), rat(1, 2)), LocalCase::EdgeInterior);
}

#[test]
fn certificate_at_a_valence_two_vertex() {
    // path 1 → 0 → 2 with f = (t−1)^2 along the whole path
    let g = WeightedMetricGraph::new(vec![false, true, true], vec![Edge::new(1, 0, int(1), 1), Edge::new(0, 2, int(1), 1)]).unwrap();
    let f = GraphForm::from_polynomials(&g, Bidegree::B00, vec![poly(&[1, -2, 1]), poly(&[0, 0, 1])], 3).unwrap();
    check_certificate(&g, &f, GraphPoint::Vertex(VertexId(0)), LocalCase::ValenceTwo);
    // glued to order K only
    let t4 = |c: i64| Polynomial::monomial(int(c), 5);
    let f = GraphForm::from_polynomials(&g, Bidegree::B00, vec![t4(1).compose_affine(&int(-1), &int(1)), t4(2)], 3).unwrap();
    let gamma = GammaGroup::integers();
    assert!(matches!(
        local_pullback_certificate(&g, &f, &GraphPoint::Vertex(VertexId(0)), &gamma),
        Err(TropicalError::NotPolynomialNear(_))
    ));
}

#[test]
fn certificate_at_isolated_vertices() {
    let g = WeightedMetricGraph::new(vec![true, false], vec![]).unwrap();
    let mut f = GraphForm::zero(&g, Bidegree::B00, 3).unwrap();
    f.set_isolated(VertexId(0), int(4));
    f.set_isolated(VertexId(1), int(-1));
    for v in 0..2 {
        check_certificate(&g, &f, GraphPoint::Vertex(VertexId(v)), LocalCase::Isolated);
    }
}
