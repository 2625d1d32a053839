//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropforms::calculus::{PiecewisePolynomial, Polynomial};
use tropforms::graph::{Edge, EdgeId, Orientation, VertexId, WeightedMetricGraph};
use tropforms::harmonic::{harmonic_function_space, PLMap};
use tropforms::linalg::Matrix;
use tropforms::rational::{int, rat, Rational};
use tropforms::tropical::{HarmonicTropicalization, LagerbergPolyForm, MultiPoly};
use tropforms::{Bidegree, GraphForm};

pub const K: u32 = 3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(r: &mut impl Rng) -> Rational {
    rat(r.gen_range(-6..=6), r.gen_range(1..=4))
}

pub fn positive_rational(r: &mut impl Rng) -> Rational {
    rat(r.gen_range(1..=6), r.gen_range(1..=4))
}

#[derive(Clone, Copy, Debug)]
pub struct GraphShape {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_weight: u32,
    /// Chance that a vertex is on the boundary.
    pub boundary: f64,
}

pub const CORPUS: GraphShape = GraphShape { max_vertices: 8, max_edges: 16, max_weight: 4, boundary: 0.3 };
pub const SMALL: GraphShape = GraphShape { max_vertices: 5, max_edges: 7, max_weight: 3, boundary: 0.3 };

/// Connected graph: a random spanning tree plus extra edges, no loops.
pub fn random_graph(r: &mut impl Rng, shape: GraphShape) -> WeightedMetricGraph {
    let n = r.gen_range(1..=shape.max_vertices);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = r.gen_range(0..v);
        edges.push((u, v));
    }
    if n >= 2 {
        let extra = r.gen_range(0..=shape.max_edges - edges.len());
        for _ in 0..extra {
            let a = r.gen_range(0..n);
            let mut b = r.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            edges.push((a, b));
        }
    }
    edges.shuffle(r);
    let edges = edges
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = if r.gen_bool(0.5) { (a, b) } else { (b, a) };
            Edge::new(a, b, positive_rational(r), r.gen_range(1..=shape.max_weight))
        })
        .collect();
    let boundary = (0..n).map(|_| r.gen_bool(shape.boundary)).collect();
    WeightedMetricGraph::new(boundary, edges).unwrap()
}

pub fn without_boundary(g: &WeightedMetricGraph) -> WeightedMetricGraph {
    g.with_boundary(vec![false; g.num_vertices()]).unwrap()
}

pub fn cycle(n: usize, len: Rational) -> WeightedMetricGraph {
    let edges = (0..n).map(|i| Edge::new(i, (i + 1) % n, len.clone(), 1)).collect();
    WeightedMetricGraph::new(vec![false; n], edges).unwrap()
}

pub fn theta() -> WeightedMetricGraph {
    WeightedMetricGraph::new(vec![false, false], (0..3).map(|_| Edge::new(0, 1, int(1), 1)).collect()).unwrap()
}

/// `C_{dn} → C_n` wrapping `d` times; both cycles have unit edges.
pub fn cycle_cover(n: usize, d: usize) -> PLMap {
    let src = cycle(n * d, int(1));
    let tgt = cycle(n, int(1));
    PLMap::from_graph_maps(
        src,
        tgt,
        (0..n * d).map(|i| VertexId(i % n)).collect(),
        (0..n * d).map(|i| Some((EdgeId(i % n), Orientation::Forward))).collect(),
    )
    .unwrap()
}

/// Rotation of an `n`-cycle by `k` steps.
pub fn rotation(n: usize, k: usize) -> PLMap {
    let g = cycle(n, int(1));
    PLMap::from_graph_maps(
        g.clone(),
        g,
        (0..n).map(|i| VertexId((i + k) % n)).collect(),
        (0..n).map(|i| Some((EdgeId((i + k) % n), Orientation::Forward))).collect(),
    )
    .unwrap()
}

/// Reflection `i ↦ k − i` of an `n`-cycle.
pub fn reflection(n: usize, k: usize) -> PLMap {
    let g = cycle(n, int(1));
    let vertex = |i: usize| (k + n - i % n) % n;
    PLMap::from_graph_maps(
        g.clone(),
        g,
        (0..n).map(|i| VertexId(vertex(i))).collect(),
        // edge i runs i → i+1, its image runs k−i → k−i−1, the reverse of edge k−i−1
        (0..n).map(|i| Some((EdgeId((k + 2 * n - i - 1) % n), Orientation::Backward))).collect(),
    )
    .unwrap()
}

// ------------------------------------------------------------------ forms

/// Jet `(f(0), f'(0), …, f^{(K)}(0))` of an outgoing coefficient.
type Jet = Vec<Rational>;

fn random_jet(r: &mut impl Rng) -> Jet {
    (0..=K).map(|_| small_rational(r)).collect()
}

fn taylor(jet: &[Rational]) -> Polynomial {
    let mut fact = Rational::one();
    let mut coeffs = Vec::new();
    for (n, d) in jet.iter().enumerate() {
        if n > 0 {
            fact *= int(n as i64);
        }
        coeffs.push(d / &fact);
    }
    Polynomial::new(coeffs)
}

fn power_at(m: usize, c: &Rational, n: usize, x: &Rational) -> Rational {
    Polynomial::new(vec![-c.clone(), Rational::one()]).pow(m as u32).derivative_at(n, x)
}

/// Three C^K pieces of degree ≤ 5 on `[0, ℓ]` with prescribed jets at both
/// ends. With `flat_tail` the first piece is the Taylor polynomial itself.
fn edge_coefficient(r: &mut impl Rng, len: &Rational, tail: &Jet, head: &Jet, flat_tail: bool) -> PiecewisePolynomial {
    loop {
        let a = len * rat(r.gen_range(1..=3), 8);
        let b = len * rat(r.gen_range(5..=7), 8);
        let mut p0 = taylor(tail);
        if !flat_tail {
            p0 = &p0 + &Polynomial::new(vec![int(0), int(0), int(0), int(0), small_rational(r), small_rational(r)]);
        }
        let rows: Vec<Vec<Rational>> = (0..=K as usize)
            .map(|n| vec![power_at(4, &a, n, len), power_at(5, &a, n, len), power_at(4, &b, n, len), power_at(5, &b, n, len)])
            .collect();
        let rhs: Vec<Rational> = (0..=K as usize).map(|n| &head[n] - p0.derivative_at(n, len)).collect();
        let Some(x) = Matrix::from_rows(rows).solve(&rhs) else { continue };
        let shift = |c: &Rational, m: usize, coef: &Rational| Polynomial::new(vec![-c.clone(), Rational::one()]).pow(m as u32).scale(coef);
        let p1 = &(&p0 + &shift(&a, 4, &x[0])) + &shift(&a, 5, &x[1]);
        let p2 = &(&p1 + &shift(&b, 4, &x[2])) + &shift(&b, 5, &x[3]);
        return PiecewisePolynomial::new(vec![int(0), a, b, len.clone()], vec![p0, p1, p2], K).unwrap();
    }
}

fn zero_jet() -> Jet {
    vec![Rational::zero(); K as usize + 1]
}

/// Outgoing jets at every vertex satisfying the vertex conditions for
/// `bidegree`, keyed by (edge, is_tail).
fn vertex_jets(r: &mut impl Rng, g: &WeightedMetricGraph, bidegree: Bidegree) -> BTreeMap<(usize, bool), (Jet, bool)> {
    let mut out = BTreeMap::new();
    let function = bidegree == Bidegree::B00;
    for v in g.vertex_ids() {
        let oes = g.outgoing(v);
        if oes.is_empty() {
            continue;
        }
        let mut jets: Vec<Jet> = oes.iter().map(|_| random_jet(r)).collect();
        let mut flat = false;
        let common = small_rational(r);
        if function {
            for j in &mut jets {
                j[0] = common.clone();
            }
        }
        if !g.is_boundary(v) {
            match oes.len() {
                1 => {
                    flat = true;
                    jets[0] = zero_jet();
                    if function {
                        jets[0][0] = common.clone();
                    }
                }
                2 => {
                    let w1 = g.edge(oes[0].edge).weight_q();
                    let w2 = g.edge(oes[1].edge).weight_q();
                    let (s1, s2) = match bidegree {
                        Bidegree::B00 => (int(1), int(1)),
                        Bidegree::B10 | Bidegree::B01 => (w1.clone(), -w2.clone()),
                        Bidegree::B11 => (&w1 * &w1, &w2 * &w2),
                    };
                    let mut ratio_pow = Rational::one();
                    for n in 0..=K as usize {
                        let sign = if n % 2 == 0 { int(1) } else { int(-1) };
                        jets[1][n] = &sign * &ratio_pow * &s1 / &s2 * &jets[0][n];
                        ratio_pow *= &w1 / &w2;
                    }
                }
                _ => {
                    let idx = if function { 1 } else { 0 };
                    if bidegree != Bidegree::B11 {
                        let last = oes.len() - 1;
                        let partial = (0..last).fold(Rational::zero(), |acc, i| acc + g.edge(oes[i].edge).weight_q() * &jets[i][idx]);
                        jets[last][idx] = -partial / g.edge(oes[last].edge).weight_q();
                    }
                }
            }
        }
        for (oe, jet) in oes.iter().zip(jets) {
            out.insert((oe.edge.0, oe.orientation == Orientation::Forward), (jet, flat));
        }
    }
    out
}

/// A valid form at order `K`: three pieces of degree ≤ 5 per edge (fewer when
/// identical pieces merge), meeting every vertex condition.
pub fn random_form(r: &mut impl Rng, g: &WeightedMetricGraph, bidegree: Bidegree) -> GraphForm {
    let jets = vertex_jets(r, g, bidegree);
    let sign = bidegree.reversal_sign();
    let mut coeffs = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        let (tail, tail_flat) = jets[&(i, true)].clone();
        let (out_head, head_flat) = jets[&(i, false)].clone();
        // outgoing at the head is sign·f(ℓ − t): f^{(n)}(ℓ) = sign·(−1)^n J[n]
        let conv = |j: &Jet| -> Jet {
            j.iter().enumerate().map(|(n, x)| if n % 2 == 0 { &sign * x } else { -(&sign * x) }).collect()
        };
        let head = conv(&out_head);
        let c = if tail_flat && head_flat {
            let value = if bidegree == Bidegree::B00 { tail[0].clone() } else { Rational::zero() };
            PiecewisePolynomial::constant(e.length.clone(), value, K).unwrap()
        } else if head_flat {
            // build from the head end and turn around
            let rev = edge_coefficient(r, &e.length, &out_head, &conv(&tail), true);
            rev.reverse().scale(&sign)
        } else {
            edge_coefficient(r, &e.length, &tail, &head, tail_flat)
        };
        coeffs.push(c);
    }
    let isolated = if bidegree == Bidegree::B00 {
        g.vertex_ids().filter(|&v| g.is_isolated(v)).map(|v| (v, small_rational(r))).collect()
    } else {
        BTreeMap::new()
    };
    GraphForm::new(bidegree, coeffs, isolated, K).unwrap()
}

pub fn random_bidegree(r: &mut impl Rng) -> Bidegree {
    Bidegree::all()[r.gen_range(0..4)]
}

// ------------------------------------------------------- tropicalizations

/// Random harmonic functions scaled to integer slopes, one per coordinate.
pub fn random_integral_tropicalization(r: &mut impl Rng, g: &WeightedMetricGraph, n: usize) -> HarmonicTropicalization {
    let basis = harmonic_function_space(g);
    let mut values = Vec::new();
    for _ in 0..n {
        let mut vals = vec![Rational::zero(); g.num_vertices()];
        let mut slopes = vec![Rational::zero(); g.num_edges()];
        for f in &basis {
            let c = int(r.gen_range(-3..=3));
            for (x, y) in vals.iter_mut().zip(&f.values) {
                *x += &c * y;
            }
            for (x, y) in slopes.iter_mut().zip(&f.slopes) {
                *x += &c * y;
            }
        }
        let denom = slopes.iter().fold(BigInt::one(), |acc, s| num_integer::lcm(acc, s.denom().clone()));
        let scale = Rational::from_integer(denom);
        let shift = small_rational(r);
        values.push(vals.iter().map(|v| v * &scale + &shift).collect());
    }
    HarmonicTropicalization::from_values(g, values).unwrap()
}

pub fn random_multipoly(r: &mut impl Rng, n: usize, max_degree: u32) -> MultiPoly {
    let mut p = MultiPoly::zero(n);
    for _ in 0..r.gen_range(1..=3) {
        let mut exps = vec![0u32; n];
        let mut budget = r.gen_range(0..=max_degree);
        while budget > 0 {
            exps[r.gen_range(0..n)] += 1;
            budget -= 1;
        }
        p = p.add(&MultiPoly::monomial(exps, int(r.gen_range(-3..=3))));
    }
    p
}

pub fn random_lagerberg(r: &mut impl Rng, n: usize, bidegree: Bidegree, max_degree: u32) -> LagerbergPolyForm {
    let count = n.pow(bidegree.total());
    let coeffs = (0..count).map(|_| random_multipoly(r, n, max_degree)).collect();
    LagerbergPolyForm::new(n, bidegree, coeffs).unwrap()
}
