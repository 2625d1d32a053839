use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::forms::Bidegree;
use crate::graph::WeightedMetricGraph;
use crate::linalg::Matrix;
use crate::rational::{gcd_all, lcm_all, Rational};

use super::{ensure_harmonic, pullback_lagerberg, HarmonicTropicalization, LagerbergPolyForm, Result, TropicalError};

type Point = Vec<Rational>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
    pub multiplicity: BigInt,
}

/// Weighted one-dimensional rational polyhedral complex in `ℚⁿ`, with the
/// points at which balancing is not required.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropCycle {
    n: usize,
    segments: Vec<Segment>,
    excluded: Vec<Point>,
}

/// Non-excluded vertex where `Σ m_σ u_σ ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Imbalance {
    pub point: Point,
    pub sum: Vec<BigInt>,
}

fn sub(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Rational::zero(), |s, t| s + t)
}

fn lerp(a: &[Rational], d: &[Rational], s: &Rational) -> Point {
    a.iter().zip(d).map(|(x, y)| x + y * s).collect()
}

/// Primitive integer vector in the direction of a nonzero rational vector.
pub fn primitive_direction(d: &[Rational]) -> Vec<BigInt> {
    let l = lcm_all(d.iter().map(|x| x.denom()));
    let ints: Vec<BigInt> = d.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = gcd_all(&ints);
    ints.iter().map(|x| x / &g).collect()
}

/// `(b, L)` with `end − start = L·b` and `b` primitive.
fn lattice_data(seg: &Segment) -> (Vec<BigInt>, Rational) {
    let d = sub(&seg.end, &seg.start);
    let b = primitive_direction(&d);
    let k = b.iter().position(|x| !x.is_zero()).expect("segments have distinct endpoints");
    let len = &d[k] / Rational::from_integer(b[k].clone());
    (b, len)
}

/// Parameter in `(0, 1)` at which `x` lies strictly inside the segment.
fn interior_parameter(start: &[Rational], d: &[Rational], x: &[Rational]) -> Option<Rational> {
    let s = dot(&sub(x, start), d) / dot(d, d);
    (s.is_positive() && s < Rational::one() && lerp(start, d, &s) == x).then_some(s)
}

/// Parameter on the first segment of a crossing of the two segments at a
/// point interior to the first.
fn crossing(a: &Segment, b: &Segment) -> Option<Rational> {
    let d1 = sub(&a.end, &a.start);
    let d2 = sub(&b.end, &b.start);
    let cols = vec![d1.clone(), d2.iter().map(|x| -x).collect()];
    let m = Matrix::from_columns(&cols, d1.len());
    if m.rank() < 2 {
        return None;
    }
    let sol = m.solve(&sub(&b.start, &a.start))?;
    let (s, u) = (&sol[0], &sol[1]);
    let unit = Rational::one();
    (s.is_positive() && *s < unit && !u.is_negative() && *u <= unit).then(|| s.clone())
}

impl TropCycle {
    pub fn new(n: usize, segments: Vec<Segment>, excluded: Vec<Point>) -> Result<Self> {
        for s in &segments {
            if s.start.len() != n || s.end.len() != n || s.start == s.end || s.multiplicity.is_negative() {
                return Err(TropicalError::BadSegment);
            }
        }
        if let Some(p) = excluded.iter().find(|p| p.len() != n) {
            return Err(TropicalError::Dimension { expected: n, got: p.len() });
        }
        let excluded: BTreeSet<Point> = excluded.into_iter().collect();
        Ok(TropCycle { n, segments, excluded: excluded.into_iter().collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn excluded(&self) -> &[Point] {
        &self.excluded
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Splits segments at every endpoint or crossing lying inside them,
    /// merges coincident pieces and drops multiplicity zero. Segments are
    /// stored with the lexicographically smaller endpoint first, sorted.
    pub fn refined(&self) -> TropCycle {
        self.refined_with(&[])
    }

    /// Refinement that also splits at the given points.
    pub fn refined_with(&self, extra: &[Point]) -> TropCycle {
        let mut points: BTreeSet<Point> = extra.iter().cloned().collect();
        for s in &self.segments {
            points.insert(s.start.clone());
            points.insert(s.end.clone());
        }
        let mut merged: BTreeMap<(Point, Point), BigInt> = BTreeMap::new();
        for (i, s) in self.segments.iter().enumerate() {
            if s.multiplicity.is_zero() {
                continue;
            }
            let d = sub(&s.end, &s.start);
            let mut cuts: BTreeSet<Rational> = BTreeSet::new();
            for p in &points {
                if let Some(t) = interior_parameter(&s.start, &d, p) {
                    cuts.insert(t);
                }
            }
            for (j, o) in self.segments.iter().enumerate() {
                if i != j && !o.multiplicity.is_zero() {
                    if let Some(t) = crossing(s, o) {
                        cuts.insert(t);
                    }
                }
            }
            let mut params = vec![Rational::zero()];
            params.extend(cuts);
            params.push(Rational::one());
            for w in params.windows(2) {
                let a = lerp(&s.start, &d, &w[0]);
                let b = lerp(&s.start, &d, &w[1]);
                let key = if a <= b { (a, b) } else { (b, a) };
                *merged.entry(key).or_insert_with(BigInt::zero) += &s.multiplicity;
            }
        }
        let segments = merged
            .into_iter()
            .map(|((start, end), multiplicity)| Segment { start, end, multiplicity })
            .collect();
        TropCycle { n: self.n, segments, excluded: self.excluded.clone() }
    }

    /// Pairwise intersections only at common endpoints and no repeated
    /// segments.
    pub fn is_refined(&self) -> bool {
        self.first_overlap().is_none()
    }

    fn first_overlap(&self) -> Option<(usize, usize)> {
        for (i, s) in self.segments.iter().enumerate() {
            let d = sub(&s.end, &s.start);
            for (j, o) in self.segments.iter().enumerate() {
                if i == j {
                    continue;
                }
                let same = (s.start == o.start && s.end == o.end) || (s.start == o.end && s.end == o.start);
                if same
                    || interior_parameter(&s.start, &d, &o.start).is_some()
                    || interior_parameter(&s.start, &d, &o.end).is_some()
                    || crossing(s, o).is_some()
                {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn scaled(&self, c: &BigInt) -> TropCycle {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment { multiplicity: &s.multiplicity * c, ..s.clone() })
            .collect();
        TropCycle { n: self.n, segments, excluded: self.excluded.clone() }
    }

    /// Equality of the weighted complexes, independent of subdivision and of
    /// the excluded points.
    pub fn same_support_and_weights(&self, other: &TropCycle) -> bool {
        if self.n != other.n {
            return false;
        }
        let mut joint = self.segments.clone();
        joint.extend(other.segments.iter().cloned());
        for s in &mut joint {
            s.multiplicity = BigInt::one();
        }
        let joint = TropCycle { n: self.n, segments: joint, excluded: Vec::new() }.refined();
        let pts: Vec<Point> = joint.segments.iter().flat_map(|s| [s.start.clone(), s.end.clone()]).collect();
        let a = self.refined_with(&pts);
        let b = other.refined_with(&pts);
        a.segments == b.segments
    }
}

/// `Trop_h(Σ)`: one segment per non-crushed edge with `m_e = w(e)·gcd` of
/// the slopes, images of boundary vertices excluded, then refined.
pub fn trop_cycle(g: &WeightedMetricGraph, h: &HarmonicTropicalization) -> Result<TropCycle> {
    ensure_harmonic(g, h)?;
    for i in 0..h.dim() {
        if let Some(k) = h.slopes()[i].iter().position(|s| !s.is_integer()) {
            return Err(TropicalError::NonIntegralSlope { component: i, edge: k });
        }
    }
    let mut segments = Vec::new();
    for e in g.edge_ids() {
        let a: Vec<BigInt> = h.slope_vector(e).iter().map(|s| s.to_integer()).collect();
        let m = gcd_all(&a);
        if m.is_zero() {
            continue;
        }
        let edge = g.edge(e);
        segments.push(Segment {
            start: h.point(edge.tail),
            end: h.point(edge.head),
            multiplicity: m * BigInt::from(edge.weight),
        });
    }
    let excluded = g.boundary_vertices().into_iter().map(|v| h.point(v)).collect();
    Ok(TropCycle::new(h.dim(), segments, excluded)?.refined())
}

/// Vertices of the refined cycle, outside the excluded set, at which the
/// multiplicity-weighted primitive outgoing directions do not sum to zero.
pub fn check_balancing(cycle: &TropCycle) -> Vec<Imbalance> {
    let refined = cycle.refined();
    let mut sums: BTreeMap<Point, Vec<BigInt>> = BTreeMap::new();
    for s in &refined.segments {
        let b = primitive_direction(&sub(&s.end, &s.start));
        let at_start = sums.entry(s.start.clone()).or_insert_with(|| vec![BigInt::zero(); refined.n]);
        for (acc, x) in at_start.iter_mut().zip(&b) {
            *acc += &s.multiplicity * x;
        }
        let at_end = sums.entry(s.end.clone()).or_insert_with(|| vec![BigInt::zero(); refined.n]);
        for (acc, x) in at_end.iter_mut().zip(&b) {
            *acc -= &s.multiplicity * x;
        }
    }
    let excluded: BTreeSet<&Point> = refined.excluded.iter().collect();
    sums.into_iter()
        .filter(|(p, s)| !excluded.contains(p) && s.iter().any(|x| !x.is_zero()))
        .map(|(point, sum)| Imbalance { point, sum })
        .collect()
}

fn check_refined(cycle: &TropCycle, eta: &LagerbergPolyForm) -> Result<()> {
    if eta.dim() != cycle.n {
        return Err(TropicalError::Dimension { expected: cycle.n, got: eta.dim() });
    }
    if let Some((i, j)) = cycle.first_overlap() {
        return Err(TropicalError::Unrefined(i, j));
    }
    Ok(())
}

fn big(b: &BigInt) -> Rational {
    Rational::from_integer(b.clone())
}

/// `Σ_σ m_σ ∫_σ η` for a `(1,1)`-form, each segment parametrized by lattice
/// length along its primitive direction `b`.
pub fn trop_integrate(cycle: &TropCycle, eta: &LagerbergPolyForm) -> Result<Rational> {
    if eta.bidegree() != Bidegree::B11 {
        return Err(TropicalError::WrongBidegree { op: "tropical integral", bidegree: eta.bidegree() });
    }
    check_refined(cycle, eta)?;
    let n = cycle.n;
    let mut total = Rational::zero();
    for s in &cycle.segments {
        let (b, len) = lattice_data(s);
        let br: Vec<Rational> = b.iter().map(big).collect();
        let mut seg = Rational::zero();
        for i in (0..n).filter(|&i| !b[i].is_zero()) {
            for j in (0..n).filter(|&j| !b[j].is_zero()) {
                let p = eta.coeff11(i, j).along_line(&s.start, &br);
                seg += &br[i] * &br[j] * p.integrate(&Rational::zero(), &len);
            }
        }
        total += big(&s.multiplicity) * seg;
    }
    Ok(total)
}

/// `Σ_σ m_σ ∫_{∂σ} η` with `∫_{∂σ} η = Σ_i b_i (g_i(σ⁻) − g_i(σ⁺))` for a
/// `(1,0)`-form; the endpoints are exchanged for a `(0,1)`-form.
pub fn trop_boundary_integrate(cycle: &TropCycle, eta: &LagerbergPolyForm) -> Result<Rational> {
    let sign = match eta.bidegree() {
        Bidegree::B10 => Rational::one(),
        Bidegree::B01 => -Rational::one(),
        b => return Err(TropicalError::WrongBidegree { op: "tropical boundary integral", bidegree: b }),
    };
    check_refined(cycle, eta)?;
    let mut total = Rational::zero();
    for s in &cycle.segments {
        let (b, _) = lattice_data(s);
        let mut seg = Rational::zero();
        for (i, bi) in b.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            seg += big(bi) * (eta.coeff(i).eval(&s.start) - eta.coeff(i).eval(&s.end));
        }
        total += big(&s.multiplicity) * seg;
    }
    Ok(sign * total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatCheck {
    pub graph_side: Rational,
    pub trop_side: Rational,
    pub equal: bool,
}

/// Compares `∫_Σ h*η` with `∫_{Trop(Σ)} η` for `(1,1)`-forms and the two
/// boundary integrals for `(1,0)`- and `(0,1)`-forms.
pub fn integration_compat_check(g: &WeightedMetricGraph, h: &HarmonicTropicalization, eta: &LagerbergPolyForm) -> Result<CompatCheck> {
    let cycle = trop_cycle(g, h)?;
    let pulled = pullback_lagerberg(g, h, eta, 0)?;
    let (graph_side, trop_side) = match eta.bidegree() {
        Bidegree::B11 => (pulled.integrate_graph(g)?, trop_integrate(&cycle, eta)?),
        Bidegree::B10 | Bidegree::B01 => (pulled.integrate_boundary(g)?, trop_boundary_integrate(&cycle, eta)?),
        b => return Err(TropicalError::WrongBidegree { op: "integration", bidegree: b }),
    };
    let equal = graph_side == trop_side;
    Ok(CompatCheck { graph_side, trop_side, equal })
}
