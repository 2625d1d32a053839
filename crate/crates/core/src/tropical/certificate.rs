use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::calculus::Polynomial;
use crate::forms::{ensure_valid, Bidegree, GraphForm};
use crate::graph::{
    EdgeId, EdgeInterval, GraphCorrespondence, GraphPoint, Orientation, OrientedEdge, Subgraph, VertexId,
    WeightedMetricGraph,
};
use crate::rational::{int, lcm_all, Rational};

use super::{pullback_lagerberg, GammaGroup, HarmonicTropicalization, LagerbergPolyForm, MultiPoly, Result, TropicalError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalCase {
    EdgeInterior,
    ValenceTwo,
    InteriorLeaf,
    BoundaryVertex,
    Star,
    /// Isolated vertex, boundary or not.
    Isolated,
}

impl LocalCase {
    pub fn name(self) -> &'static str {
        match self {
            LocalCase::EdgeInterior => "edge-interior",
            LocalCase::ValenceTwo => "valence-two",
            LocalCase::InteriorLeaf => "interior-leaf",
            LocalCase::BoundaryVertex => "boundary-vertex",
            LocalCase::Star => "star",
            LocalCase::Isolated => "isolated",
        }
    }
}

/// Neighbourhood `U` of a point with a `(ℤ,Γ)`-harmonic tropicalization
/// `h` of `(U, ∂U)` and a polynomial Lagerberg form `η` such that
/// `h*η = ω|_U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCertificate {
    pub case: LocalCase,
    /// Subdivision of the input graph containing `U` as a subgraph.
    pub subdivision: WeightedMetricGraph,
    pub correspondence: GraphCorrespondence,
    pub neighbourhood: Subgraph,
    /// Interval of the input graph covered by each edge of `U`.
    pub ambient: Vec<EdgeInterval>,
    /// The point, in the coordinates of `U`.
    pub centre: GraphPoint,
    /// `N = lcm` of the edge weights; `h` is `N` times a unit speed map on the
    /// unweighting.
    pub scale: Rational,
    pub tropicalization: HarmonicTropicalization,
    pub eta: LagerbergPolyForm,
    pub restricted: GraphForm,
    /// `h*η` equals `restricted` exactly.
    pub verified: bool,
}

/// A polynomial `F` with `F(t·v_i) = f_i(t)` on the rays `v_1, …, v_n` (unit
/// vectors) and `v_0 = −(1, …, 1)`. Degree 1 is forced by the balancing
/// condition; in degree `j ≥ 2` the homogeneous part is
/// `Σ_i α_{i,j} x_i^j + γ_j x_1^{j−1} x_2` with `γ_j` fixed by the ray `v_0`.
pub fn polynomial_star_extension(rays: &[Polynomial]) -> Result<MultiPoly> {
    if rays.len() < 3 {
        return Err(TropicalError::StarHypothesis(format!("need at least three rays, got {}", rays.len())));
    }
    let n = rays.len() - 1;
    let c = rays[0].coeff(0);
    if let Some(i) = rays.iter().position(|f| f.coeff(0) != c) {
        return Err(TropicalError::StarHypothesis(format!("value at the origin on ray {i} differs from ray 0")));
    }
    let slope_sum = rays.iter().fold(Rational::zero(), |acc, f| acc + f.coeff(1));
    if !slope_sum.is_zero() {
        return Err(TropicalError::StarHypothesis(format!("first derivatives sum to {slope_sum}")));
    }
    let mut out = MultiPoly::constant(n, c);
    let top = rays.iter().filter_map(Polynomial::degree).max().unwrap_or(0);
    for j in 1..=top {
        let mut rest = Rational::zero();
        for (i, f) in rays.iter().enumerate().skip(1) {
            let mut e = vec![0; n];
            e[i - 1] = j as u32;
            out.add_term(e, f.coeff(j));
            rest += f.coeff(j);
        }
        if j >= 2 {
            let sign = if j % 2 == 0 { Rational::one() } else { -Rational::one() };
            let gamma = sign * rays[0].coeff(j) - rest;
            let mut e = vec![0; n];
            e[0] = (j - 1) as u32;
            e[1] = 1;
            out.add_term(e, gamma);
        }
    }
    Ok(out)
}

/// Distance from the start of an outgoing edge at which `U` stops: the first
/// breakpoint of the coefficient, or half the edge if there is none.
fn shrink(omega: &GraphForm, g: &WeightedMetricGraph, oe: OrientedEdge) -> Rational {
    let c = omega.oriented_coeff(oe);
    let len = &g.edge(oe.edge).length;
    let first = &c.breakpoints()[1];
    if first == len {
        len / int(2)
    } else {
        first.clone()
    }
}

fn position_from_tail(g: &WeightedMetricGraph, oe: OrientedEdge, d: &Rational) -> Rational {
    match oe.orientation {
        Orientation::Forward => d.clone(),
        Orientation::Backward => &g.edge(oe.edge).length - d,
    }
}

fn ensure_single_piece(f: &GraphForm, e: EdgeId) -> Result<()> {
    if f.coeff(e).pieces().len() != 1 {
        return Err(TropicalError::NotPolynomialNear(format!("edge {} of the neighbourhood carries several pieces", e.0)));
    }
    Ok(())
}

/// Builds a local pullback certificate at `x`.
///
/// The construction runs on the unweighting with unit speed coordinates
/// along the edges leaving `x`, then multiplies `h` by `N` and replaces `η`
/// by its pullback under `x ↦ x/N`. At a valence-two vertex the two edge
/// polynomials must be one polynomial across the vertex, and on an edge `x`
/// must not be a breakpoint; otherwise no polynomial `η` exists.
pub fn local_pullback_certificate(
    g: &WeightedMetricGraph,
    omega: &GraphForm,
    x: &GraphPoint,
    gamma: &GammaGroup,
) -> Result<LocalCertificate> {
    ensure_valid(g, omega)?;
    if let Some(e) = g.edges().iter().find(|e| !gamma.contains(&e.length)) {
        return Err(TropicalError::LengthOutsideGamma(e.length.clone()));
    }
    let x = match x {
        GraphPoint::Vertex(v) if v.0 < g.num_vertices() => x.clone(),
        GraphPoint::OnEdge(e, t) if e.0 < g.num_edges() && *t >= Rational::zero() && *t <= g.edge(*e).length => {
            g.point_on_edge(*e, t)
        }
        _ => return Err(TropicalError::PointNotOnGraph),
    };
    let weights: Vec<BigInt> = g.edges().iter().map(|e| BigInt::from(e.weight)).collect();
    let scale = Rational::from_integer(if weights.is_empty() { BigInt::one() } else { lcm_all(&weights) });

    // Cut points on the input graph, the case, and how to find U inside the
    // subdivision.
    let (case, cuts, x_vertex, edge_piece) = match &x {
        GraphPoint::OnEdge(e, a) => {
            let c = omega.coeff(*e);
            let br = c.breakpoints();
            if br.contains(a) {
                return Err(TropicalError::NotPolynomialNear("the point is a breakpoint of the coefficient".into()));
            }
            let k = br.windows(2).position(|w| w[0] < *a && *a < w[1]).expect("point inside the edge");
            let len = &g.edge(*e).length;
            let lo = if br[k].is_zero() { a / int(2) } else { br[k].clone() };
            let hi = if br[k + 1] == *len { (a + len) / int(2) } else { br[k + 1].clone() };
            (LocalCase::EdgeInterior, vec![(*e, lo.clone()), (*e, hi.clone())], None, Some((*e, lo, hi, a.clone())))
        }
        GraphPoint::Vertex(v) => {
            let out = g.outgoing(*v);
            let case = if out.is_empty() {
                LocalCase::Isolated
            } else if g.is_boundary(*v) {
                LocalCase::BoundaryVertex
            } else {
                match out.len() {
                    1 => LocalCase::InteriorLeaf,
                    2 => LocalCase::ValenceTwo,
                    _ => LocalCase::Star,
                }
            };
            let cuts = out.iter().map(|&oe| (oe.edge, position_from_tail(g, oe, &shrink(omega, g, oe)))).collect();
            (case, cuts, Some(*v), None)
        }
    };
    let (sub, corr) = g.subdivide(&cuts)?;
    let find_piece = |edge: EdgeId, start: &Rational, end: &Rational| {
        corr.edge_intervals
            .iter()
            .position(|iv| iv.edge == edge && iv.start == *start && iv.end == *end)
            .map(EdgeId)
            .expect("subdivision contains the piece")
    };
    let (u_edges, extra): (Vec<EdgeId>, Vec<VertexId>) = match (&edge_piece, x_vertex) {
        (Some((e, lo, hi, _)), _) => (vec![find_piece(*e, lo, hi)], vec![]),
        (None, Some(v)) => {
            let edges = g
                .outgoing(v)
                .iter()
                .zip(&cuts)
                .map(|(oe, (_, p))| match oe.orientation {
                    Orientation::Forward => find_piece(oe.edge, &Rational::zero(), p),
                    Orientation::Backward => find_piece(oe.edge, p, &g.edge(oe.edge).length),
                })
                .collect();
            (edges, vec![v])
        }
        (None, None) => unreachable!(),
    };
    let u = sub.subgraph(&u_edges, &extra)?;
    let ambient: Vec<EdgeInterval> = u.edges.iter().map(|e| corr.edge_intervals[e.0].clone()).collect();
    let restricted = omega.along_correspondence(&sub, g, &corr)?.restrict_to_subgraph(&sub, &u)?;
    let ug = &u.graph;
    let unweighted = restricted.to_unweighted(ug)?;
    for e in ug.edge_ids() {
        ensure_single_piece(&unweighted, e)?;
    }
    let bidegree = omega.bidegree();

    let (centre, n, points, eta0) = match case {
        LocalCase::EdgeInterior => {
            let (_, lo, _, a) = edge_piece.expect("edge case");
            let w = ug.edge(EdgeId(0)).weight_q();
            let lo0 = &lo / &w;
            let hi0 = &lo0 + ug.edge(EdgeId(0)).unweighted_length();
            let f = unweighted.coeff(EdgeId(0)).first_piece().compose_affine(&Rational::one(), &-lo0.clone());
            let eta = LagerbergPolyForm::new(1, bidegree, vec![MultiPoly::univariate(1, 0, &f)])?;
            let centre = GraphPoint::OnEdge(EdgeId(0), &a - &lo);
            let e = ug.edge(EdgeId(0));
            let mut pts = vec![vec![Rational::zero()]; 2];
            pts[e.tail.0] = vec![lo0];
            pts[e.head.0] = vec![hi0];
            (centre, 1, pts, eta)
        }
        _ => {
            let xv = VertexId(u.vertices.iter().position(|&w| Some(w) == x_vertex).expect("x is kept"));
            let out = ug.outgoing(xv);
            let rays: Vec<Polynomial> = out.iter().map(|&oe| unweighted.oriented_coeff(oe).first_piece().clone()).collect();
            let lens: Vec<Rational> = out.iter().map(|oe| ug.edge(oe.edge).unweighted_length()).collect();
            let n = match case {
                LocalCase::BoundaryVertex => out.len(),
                LocalCase::Star => out.len() - 1,
                _ => 1,
            };
            // Direction of the image of each outgoing edge.
            let dirs: Vec<Vec<Rational>> = (0..out.len())
                .map(|k| match case {
                    LocalCase::BoundaryVertex => unit(n, k),
                    LocalCase::Star if k == 0 => vec![-Rational::one(); n],
                    LocalCase::Star => unit(n, k - 1),
                    LocalCase::ValenceTwo if k == 1 => vec![-Rational::one()],
                    LocalCase::ValenceTwo => vec![Rational::one()],
                    _ => vec![Rational::zero()],
                })
                .collect();
            let mut pts = vec![vec![Rational::zero(); n]; ug.num_vertices()];
            for (k, &oe) in out.iter().enumerate() {
                let far = ug.oriented_head(oe);
                pts[far.0] = dirs[k].iter().map(|d| d * &lens[k]).collect();
            }
            let eta = match case {
                LocalCase::Isolated => {
                    let value = if bidegree == Bidegree::B00 {
                        restricted.isolated().get(&xv).cloned().unwrap_or_else(Rational::zero)
                    } else {
                        Rational::zero()
                    };
                    constant_or_zero(bidegree, value)
                }
                LocalCase::InteriorLeaf => constant_or_zero(bidegree, rays[0].coeff(0)),
                LocalCase::ValenceTwo => valence_two_eta(bidegree, &rays)?,
                LocalCase::BoundaryVertex => boundary_eta(bidegree, &rays),
                LocalCase::Star => star_eta(bidegree, &rays)?,
                LocalCase::EdgeInterior => unreachable!(),
            };
            (GraphPoint::Vertex(xv), n, pts, eta)
        }
    };
    let tropicalization = HarmonicTropicalization::from_points(ug, n, &points)?.scaled(&scale);
    let eta = eta0.rescale(&(Rational::one() / &scale));
    let pulled = pullback_lagerberg(ug, &tropicalization, &eta, omega.order())?;
    let verified = pulled.same_coefficients(&restricted);
    Ok(LocalCertificate {
        case,
        subdivision: sub.clone(),
        correspondence: corr.clone(),
        neighbourhood: u.clone(),
        ambient,
        centre,
        scale,
        tropicalization,
        eta,
        restricted,
        verified,
    })
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

fn constant_or_zero(bidegree: Bidegree, value: Rational) -> LagerbergPolyForm {
    if bidegree == Bidegree::B00 {
        LagerbergPolyForm::function(MultiPoly::constant(1, value))
    } else {
        LagerbergPolyForm::zero(1, bidegree)
    }
}

fn valence_two_eta(bidegree: Bidegree, rays: &[Polynomial]) -> Result<LagerbergPolyForm> {
    let across = rays[0].compose_affine(&-Rational::one(), &Rational::zero()).scale(&bidegree.reversal_sign());
    if across != rays[1] {
        return Err(TropicalError::NotPolynomialNear(
            "the coefficients on the two sides of the vertex are not one polynomial".into(),
        ));
    }
    LagerbergPolyForm::new(1, bidegree, vec![MultiPoly::univariate(1, 0, &rays[0])])
}

/// `g = f(x) + Σ (F_i(x_i) − f(x))`, `g_i = F_i(x_i)` or `g_{ii} = F_i(x_i)`.
fn boundary_eta(bidegree: Bidegree, rays: &[Polynomial]) -> LagerbergPolyForm {
    let n = rays.len();
    let mut coeffs = LagerbergPolyForm::zero(n, bidegree).coeffs().to_vec();
    match bidegree {
        Bidegree::B00 => {
            let value = rays[0].coeff(0);
            let mut g = MultiPoly::constant(n, value * int(1 - n as i64));
            for (i, f) in rays.iter().enumerate() {
                g = g.add(&MultiPoly::univariate(n, i, f));
            }
            coeffs[0] = g;
        }
        Bidegree::B10 | Bidegree::B01 => {
            for (i, f) in rays.iter().enumerate() {
                coeffs[i] = MultiPoly::univariate(n, i, f);
            }
        }
        Bidegree::B11 => {
            for (i, f) in rays.iter().enumerate() {
                coeffs[i * n + i] = MultiPoly::univariate(n, i, f);
            }
        }
    }
    LagerbergPolyForm::new(n, bidegree, coeffs).expect("shape is fixed")
}

fn linear(slope: Rational, value: Rational) -> Polynomial {
    Polynomial::new(vec![value, slope])
}

/// Ray data that is `special` on the listed rays and the constant `c`
/// elsewhere.
fn rays_with(count: usize, c: &Rational, special: &[(usize, Polynomial)]) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::constant(c.clone()); count];
    for (k, p) in special {
        out[*k] = p.clone();
    }
    out
}

/// Case of an interior vertex of valence at least three with outgoing edges
/// `e_0, …, e_r` and rays `F_0, …, F_r`; `h_i` follows `e_i` and runs
/// backwards along `e_0`.
fn star_eta(bidegree: Bidegree, rays: &[Polynomial]) -> Result<LagerbergPolyForm> {
    let count = rays.len();
    let n = count - 1;
    let at0 = |f: &Polynomial| f.coeff(0);
    let d0 = |f: &Polynomial| f.coeff(1);
    match bidegree {
        Bidegree::B00 => Ok(LagerbergPolyForm::function(polynomial_star_extension(rays)?)),
        Bidegree::B10 | Bidegree::B01 => {
            let mut coeffs = Vec::with_capacity(n);
            let (f0, f1) = (&rays[0], &rays[1]);
            let first = rays_with(
                count,
                &at0(f1),
                &[
                    (0, &(&f0.scale(&-Rational::one()) + &Polynomial::constant(at0(f0))) + &Polynomial::constant(at0(f1))),
                    (1, f1.clone()),
                    (2, linear(d0(f0) - d0(f1), at0(f1))),
                ],
            );
            coeffs.push(polynomial_star_extension(&first)?);
            for i in 2..=n {
                let fi = &rays[i];
                let data = rays_with(count, &at0(fi), &[(1, linear(-d0(fi), at0(fi))), (i, fi.clone())]);
                coeffs.push(polynomial_star_extension(&data)?);
            }
            LagerbergPolyForm::new(n, bidegree, coeffs)
        }
        Bidegree::B11 => {
            let mut coeffs = vec![MultiPoly::zero(n); n * n];
            for k in 1..=n {
                let f = &rays[k];
                let other = if k == 1 { 2 } else { 1 };
                let data = rays_with(count, &at0(f), &[(k, f.clone()), (other, linear(-d0(f), at0(f)))]);
                let (i, j) = (k - 1, other - 1);
                coeffs[i * n + i] = coeffs[i * n + i].add(&polynomial_star_extension(&data)?);
                coeffs[i * n + j] = coeffs[i * n + j].add(&MultiPoly::constant(n, -at0(f)));
            }
            let f0 = &rays[0];
            let data = rays_with(
                count,
                &Rational::zero(),
                &[(0, &f0.clone() - &Polynomial::constant(at0(f0))), (2, linear(-d0(f0), Rational::zero()))],
            );
            coeffs[0] = coeffs[0].add(&polynomial_star_extension(&data)?);
            coeffs[1] = coeffs[1].add(&MultiPoly::constant(n, at0(f0)));
            LagerbergPolyForm::new(n, bidegree, coeffs)
        }
    }
}
