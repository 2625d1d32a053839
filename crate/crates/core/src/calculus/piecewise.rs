use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use super::Polynomial;
use crate::rational::{int, pow, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("domain length must be positive, got {0}")]
    NonPositiveLength(Rational),
    #[error("breakpoints must start at 0, increase strictly and end at the domain length")]
    BadBreakpoints,
    #[error("expected {expected} pieces, got {got}")]
    PieceCount { expected: usize, got: usize },
    #[error("pieces do not agree in derivative {derivative} at breakpoint {at}")]
    JunctionNotSmooth { at: Rational, derivative: usize },
    #[error("point {x} outside [0, {length}]")]
    OutsideDomain { x: Rational, length: Rational },
    #[error("smoothness order 0 cannot be differentiated")]
    NotDifferentiable,
    #[error("integration bounds {a}, {b} out of order or outside the domain")]
    BadBounds { a: Rational, b: Rational },
    #[error("operands live on domains of different lengths ({0} vs {1})")]
    LengthMismatch(Rational, Rational),
    #[error("bump interval [{a}, {b}] is empty or leaves [0, {length}]")]
    BadBumpInterval { a: Rational, b: Rational, length: Rational },
}

pub type Result<T> = std::result::Result<T, CalculusError>;

/// Exact function on `[0, ℓ]` made of polynomial pieces, each evaluated in
/// the global coordinate, with agreement up to derivative order `K` at
/// interior breakpoints. Adjacent identical pieces are merged on construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewisePolynomial {
    breaks: Vec<Rational>,
    pieces: Vec<Polynomial>,
    order: u32,
}

impl PiecewisePolynomial {
    pub fn new(breaks: Vec<Rational>, pieces: Vec<Polynomial>, order: u32) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(CalculusError::BadBreakpoints);
        }
        let length = breaks.last().unwrap().clone();
        if length <= Rational::zero() {
            return Err(CalculusError::NonPositiveLength(length));
        }
        if !breaks[0].is_zero() || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CalculusError::BadBreakpoints);
        }
        if pieces.len() != breaks.len() - 1 {
            return Err(CalculusError::PieceCount { expected: breaks.len() - 1, got: pieces.len() });
        }
        for i in 1..pieces.len() {
            if let Some(n) = first_mismatch(&pieces[i - 1], &pieces[i], &breaks[i], order) {
                return Err(CalculusError::JunctionNotSmooth { at: breaks[i].clone(), derivative: n });
            }
        }
        Ok(Self::merged(breaks, pieces, order))
    }

    fn merged(breaks: Vec<Rational>, pieces: Vec<Polynomial>, order: u32) -> Self {
        let mut b = vec![breaks[0].clone()];
        let mut p: Vec<Polynomial> = Vec::new();
        for (i, piece) in pieces.into_iter().enumerate() {
            if p.last() == Some(&piece) {
                *b.last_mut().unwrap() = breaks[i + 1].clone();
            } else {
                p.push(piece);
                b.push(breaks[i + 1].clone());
            }
        }
        PiecewisePolynomial { breaks: b, pieces: p, order }
    }

    pub fn from_polynomial(length: Rational, p: Polynomial, order: u32) -> Result<Self> {
        Self::new(vec![Rational::zero(), length], vec![p], order)
    }

    pub fn constant(length: Rational, c: Rational, order: u32) -> Result<Self> {
        Self::from_polynomial(length, Polynomial::constant(c), order)
    }

    pub fn zero(length: Rational, order: u32) -> Result<Self> {
        Self::from_polynomial(length, Polynomial::zero(), order)
    }

    pub fn length(&self) -> &Rational {
        self.breaks.last().unwrap()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    pub fn first_piece(&self) -> &Polynomial {
        &self.pieces[0]
    }

    pub fn last_piece(&self) -> &Polynomial {
        self.pieces.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(Polynomial::is_zero)
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().filter_map(Polynomial::degree).max().unwrap_or(0)
    }

    fn check_point(&self, x: &Rational) -> Result<()> {
        if *x < Rational::zero() || x > self.length() {
            return Err(CalculusError::OutsideDomain { x: x.clone(), length: self.length().clone() });
        }
        Ok(())
    }

    /// Index of the first piece whose closed interval contains `x`.
    pub fn piece_index(&self, x: &Rational) -> Result<usize> {
        self.check_point(x)?;
        Ok((0..self.pieces.len()).find(|&i| *x <= self.breaks[i + 1]).unwrap())
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational> {
        let i = self.piece_index(x)?;
        Ok(self.pieces[i].eval(x))
    }

    /// `n`-th derivative at `x`, taken from the piece on the right of `x`
    /// (from the left at `x = ℓ`). Only meaningful across breakpoints for
    /// `n ≤ K`.
    pub fn derivative_at(&self, x: &Rational, n: usize) -> Result<Rational> {
        self.check_point(x)?;
        let i = (0..self.pieces.len())
            .find(|&i| *x < self.breaks[i + 1])
            .unwrap_or(self.pieces.len() - 1);
        Ok(self.pieces[i].derivative_at(n, x))
    }

    pub fn differentiate(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(CalculusError::NotDifferentiable);
        }
        let pieces = self.pieces.iter().map(Polynomial::derivative).collect();
        Ok(Self::merged(self.breaks.clone(), pieces, self.order - 1))
    }

    /// Continuous antiderivative vanishing at 0; smoothness order rises by one.
    pub fn antiderivative(&self) -> Self {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut acc = Rational::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let a = p.antiderivative();
            let shift = &acc - a.eval(&self.breaks[i]);
            acc += p.integrate(&self.breaks[i], &self.breaks[i + 1]);
            pieces.push(&a + &Polynomial::constant(shift));
        }
        Self::merged(self.breaks.clone(), pieces, self.order + 1)
    }

    pub fn integrate(&self, a: &Rational, b: &Rational) -> Result<Rational> {
        if a > b || *a < Rational::zero() || b > self.length() {
            return Err(CalculusError::BadBounds { a: a.clone(), b: b.clone() });
        }
        let mut total = Rational::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let lo = self.breaks[i].clone().max(a.clone());
            let hi = self.breaks[i + 1].clone().min(b.clone());
            if lo < hi {
                total += p.integrate(&lo, &hi);
            }
        }
        Ok(total)
    }

    pub fn integral(&self) -> Rational {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| p.integrate(&self.breaks[i], &self.breaks[i + 1]))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// `x ↦ f(ℓ − x)`.
    pub fn reverse(&self) -> Self {
        let l = self.length().clone();
        let breaks = self.breaks.iter().rev().map(|b| &l - b).collect();
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| p.compose_affine(&-Rational::one(), &l))
            .collect();
        PiecewisePolynomial { breaks, pieces, order: self.order }
    }

    /// `y ↦ f(scale·y + shift)` on `[0, new_length]`; the image interval must
    /// lie inside the domain and `scale` must be positive.
    pub fn reparametrize(&self, scale: &Rational, shift: &Rational, new_length: &Rational) -> Result<Self> {
        let end = shift + scale * new_length;
        if *scale <= Rational::zero() || *new_length <= Rational::zero() {
            return Err(CalculusError::NonPositiveLength(new_length.clone()));
        }
        if *shift < Rational::zero() || end > *self.length() {
            return Err(CalculusError::BadBounds { a: shift.clone(), b: end });
        }
        let mut breaks = vec![Rational::zero()];
        for b in &self.breaks[1..self.breaks.len() - 1] {
            if b > shift && *b < end {
                breaks.push((b - shift) / scale);
            }
        }
        breaks.push(new_length.clone());
        let pieces = breaks
            .windows(2)
            .map(|w| {
                let mid = scale * (&w[0] + &w[1]) / int(2) + shift;
                let i = self.piece_index(&mid).expect("midpoint inside domain");
                self.pieces[i].compose_affine(scale, shift)
            })
            .collect();
        Ok(Self::merged(breaks, pieces, self.order))
    }

    /// Restriction to `[a, b]`, re-based so that `a` becomes 0.
    pub fn restrict(&self, a: &Rational, b: &Rational) -> Result<Self> {
        if a >= b {
            return Err(CalculusError::BadBounds { a: a.clone(), b: b.clone() });
        }
        self.reparametrize(&Rational::one(), a, &(b - a))
    }

    /// Joins functions end to end; junctions must satisfy the given order.
    pub fn concat(parts: &[PiecewisePolynomial], order: u32) -> Result<Self> {
        let mut breaks = vec![Rational::zero()];
        let mut pieces = Vec::new();
        let mut offset = Rational::zero();
        for part in parts {
            for (i, p) in part.pieces.iter().enumerate() {
                pieces.push(p.compose_affine(&Rational::one(), &-offset.clone()));
                breaks.push(&part.breaks[i + 1] + &offset);
            }
            offset += part.length();
        }
        Self::new(breaks, pieces, order)
    }

    /// Same function with a different smoothness order. Lowering always
    /// succeeds; raising re-checks the junctions.
    pub fn with_order(&self, order: u32) -> Result<Self> {
        if order <= self.order {
            return Ok(PiecewisePolynomial { order, ..self.clone() });
        }
        Self::new(self.breaks.clone(), self.pieces.clone(), order)
    }

    pub fn same_function(&self, other: &Self) -> bool {
        self.breaks == other.breaks && self.pieces == other.pieces
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let pieces = self.pieces.iter().map(|p| p.scale(c)).collect();
        Self::merged(self.breaks.clone(), pieces, self.order)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn map_pieces(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        let pieces = self.pieces.iter().map(f).collect();
        Self::merged(self.breaks.clone(), pieces, self.order)
    }

    fn combine(&self, other: &Self, op: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Result<Self> {
        if self.length() != other.length() {
            return Err(CalculusError::LengthMismatch(self.length().clone(), other.length().clone()));
        }
        let mut breaks: Vec<Rational> = self.breaks.iter().chain(&other.breaks).cloned().collect();
        breaks.sort();
        breaks.dedup();
        let pieces = breaks
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / int(2);
                let i = self.piece_index(&mid).unwrap();
                let j = other.piece_index(&mid).unwrap();
                op(&self.pieces[i], &other.pieces[j])
            })
            .collect();
        Ok(Self::merged(breaks, pieces, self.order.min(other.order)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a * b)
    }
}

/// First derivative order `n ≤ min(K, max degree)` where two polynomials
/// differ at `x`.
fn first_mismatch(p: &Polynomial, q: &Polynomial, x: &Rational, order: u32) -> Option<usize> {
    let top = (order as usize).min(p.degree().unwrap_or(0).max(q.degree().unwrap_or(0)));
    (0..=top).find(|&n| p.derivative_at(n, x) != q.derivative_at(n, x))
}

/// Decides `c₁ⁿ f₁⁽ⁿ⁾(0) = (−1)ⁿ c₂ⁿ f₂⁽ⁿ⁾(0)` for `0 ≤ n ≤ min(K, max degree)`,
/// using the first pieces of both functions.
pub fn check_vertex_glue(
    f1: &PiecewisePolynomial,
    f2: &PiecewisePolynomial,
    c1: &Rational,
    c2: &Rational,
    order: u32,
) -> bool {
    glue_mismatch(f1.first_piece(), f2.first_piece(), c1, c2, order).is_none()
}

/// Derivative order at which the glue condition first fails, if any.
pub fn glue_mismatch(p1: &Polynomial, p2: &Polynomial, c1: &Rational, c2: &Rational, order: u32) -> Option<usize> {
    let top = (order as usize).min(p1.degree().unwrap_or(0).max(p2.degree().unwrap_or(0)));
    let z = Rational::zero();
    (0..=top).find(|&n| {
        let lhs = pow(c1, n as u32) * p1.derivative_at(n, &z);
        let sign = if n % 2 == 0 { Rational::one() } else { -Rational::one() };
        let rhs = sign * pow(c2, n as u32) * p2.derivative_at(n, &z);
        lhs != rhs
    })
}

/// `c·(x−a)^{K+1}(b−x)^{K+1}` on `[a, b]`, zero elsewhere, normalised so the
/// integral over `[0, ℓ]` equals `target`.
pub fn make_bump(
    length: &Rational,
    a: &Rational,
    b: &Rational,
    order: u32,
    target: &Rational,
) -> Result<PiecewisePolynomial> {
    if a >= b || *a < Rational::zero() || b > length {
        return Err(CalculusError::BadBumpInterval { a: a.clone(), b: b.clone(), length: length.clone() });
    }
    let k = order + 1;
    let left = Polynomial::new(vec![-a.clone(), Rational::one()]).pow(k);
    let right = Polynomial::new(vec![b.clone(), -Rational::one()]).pow(k);
    let shape = &left * &right;
    let c = target / shape.integrate(a, b);
    let mut breaks = vec![Rational::zero()];
    let mut pieces = Vec::new();
    if !a.is_zero() {
        breaks.push(a.clone());
        pieces.push(Polynomial::zero());
    }
    breaks.push(b.clone());
    pieces.push(shape.scale(&c));
    if b != length {
        breaks.push(length.clone());
        pieces.push(Polynomial::zero());
    }
    PiecewisePolynomial::new(breaks, pieces, order)
}

impl fmt::Display for PiecewisePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| format!("{p} on [{}, {}]", self.breaks[i], self.breaks[i + 1]))
            .collect();
        write!(f, "{{{}}} (C^{})", parts.join("; "), self.order)
    }
}
