use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::calculus::Polynomial;
use crate::forms::Bidegree;
use crate::rational::{pow, Rational};

use super::TropicalError;

/// Polynomial in `n` variables with rational coefficients, keyed by exponent
/// vectors. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exponents: Vec<u32>, c: Rational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    /// `p(x_i)` for a univariate `p`.
    pub fn univariate(nvars: usize, i: usize, p: &Polynomial) -> Self {
        let mut out = Self::zero(nvars);
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0; nvars];
            e[i] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Result<Self, TropicalError> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(TropicalError::Dimension { expected: nvars, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: Rational) {
        debug_assert_eq!(exponents.len(), self.nvars);
        let v = self.terms.remove(&exponents).unwrap_or_else(Rational::zero) + c;
        if !v.is_zero() {
            self.terms.insert(exponents, v);
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> MultiPoly {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * Rational::from_integer(e[i].into()));
            }
        }
        out
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(c.clone(), |acc, (k, xi)| acc * pow(xi, *k)))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// `t ↦ p(base + t·dir)` as a univariate polynomial.
    pub fn along_line(&self, base: &[Rational], dir: &[Rational]) -> Polynomial {
        let lines: Vec<Polynomial> = base.iter().zip(dir).map(|(b, d)| Polynomial::new(vec![b.clone(), d.clone()])).collect();
        let mut out = Polynomial::zero();
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone());
            for (k, l) in e.iter().zip(&lines) {
                if *k > 0 {
                    term = &term * &l.pow(*k);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// `x ↦ p(c·x)`.
    pub fn rescale_variables(&self, c: &Rational) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * pow(c, e.iter().sum()))).collect(),
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        self.terms.retain(|_, v| !v.is_zero());
        self
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, p)?,
                }
            }
        }
        Ok(())
    }
}

/// Lagerberg form on `ℝⁿ` with polynomial coefficients. Coefficients are
/// `[g]` for `(0,0)`, `[g_1, …, g_n]` for `(1,0)` and `(0,1)`, and the
/// row-major `n×n` array `g_{ij}` of `d'x_i∧d''x_j` for `(1,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LagerbergPolyForm {
    n: usize,
    bidegree: Bidegree,
    coeffs: Vec<MultiPoly>,
}

fn coefficient_count(n: usize, b: Bidegree) -> usize {
    match b {
        Bidegree::B00 => 1,
        Bidegree::B10 | Bidegree::B01 => n,
        Bidegree::B11 => n * n,
    }
}

impl LagerbergPolyForm {
    pub fn new(n: usize, bidegree: Bidegree, coeffs: Vec<MultiPoly>) -> Result<Self, TropicalError> {
        let expected = coefficient_count(n, bidegree);
        if coeffs.len() != expected {
            return Err(TropicalError::CoefficientCount { expected, got: coeffs.len() });
        }
        if let Some(p) = coeffs.iter().find(|p| p.nvars() != n) {
            return Err(TropicalError::Dimension { expected: n, got: p.nvars() });
        }
        Ok(LagerbergPolyForm { n, bidegree, coeffs })
    }

    pub fn zero(n: usize, bidegree: Bidegree) -> Self {
        LagerbergPolyForm { n, bidegree, coeffs: vec![MultiPoly::zero(n); coefficient_count(n, bidegree)] }
    }

    pub fn function(g: MultiPoly) -> Self {
        LagerbergPolyForm { n: g.nvars(), bidegree: Bidegree::B00, coeffs: vec![g] }
    }

    /// `g·d'x_i∧d''x_j`.
    pub fn elementary11(n: usize, i: usize, j: usize, g: MultiPoly) -> Self {
        let mut out = Self::zero(n, Bidegree::B11);
        out.coeffs[i * n + j] = g;
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &MultiPoly {
        &self.coeffs[i]
    }

    pub fn coeff11(&self, i: usize, j: usize) -> &MultiPoly {
        &self.coeffs[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(MultiPoly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self, TropicalError> {
        self.same_shape(other)?;
        Ok(LagerbergPolyForm {
            n: self.n,
            bidegree: self.bidegree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LagerbergPolyForm { n: self.n, bidegree: self.bidegree, coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect() }
    }

    fn same_shape(&self, other: &Self) -> Result<(), TropicalError> {
        if self.n != other.n {
            return Err(TropicalError::Dimension { expected: self.n, got: other.n });
        }
        if self.bidegree != other.bidegree {
            return Err(TropicalError::WrongBidegree { op: "sum", bidegree: other.bidegree });
        }
        Ok(())
    }

    /// `d''`: `(0,0) → (0,1)` with `g_j = ∂_j g`; `(1,0) → (1,1)` with
    /// `g_{ij} = −∂_j g_i`.
    pub fn d_second(&self) -> Result<Self, TropicalError> {
        let n = self.n;
        match self.bidegree {
            Bidegree::B00 => Ok(LagerbergPolyForm {
                n,
                bidegree: Bidegree::B01,
                coeffs: (0..n).map(|j| self.coeffs[0].partial(j)).collect(),
            }),
            Bidegree::B10 => {
                let mut coeffs = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        coeffs.push(self.coeffs[i].partial(j).scale(&-Rational::one()));
                    }
                }
                Ok(LagerbergPolyForm { n, bidegree: Bidegree::B11, coeffs })
            }
            b => Err(TropicalError::WrongBidegree { op: "d''", bidegree: b }),
        }
    }

    /// `d'`: `(0,0) → (1,0)` with `g_i = ∂_i g`; `(0,1) → (1,1)` with
    /// `g_{ij} = ∂_i g_j`.
    pub fn d_first(&self) -> Result<Self, TropicalError> {
        let n = self.n;
        match self.bidegree {
            Bidegree::B00 => Ok(LagerbergPolyForm {
                n,
                bidegree: Bidegree::B10,
                coeffs: (0..n).map(|i| self.coeffs[0].partial(i)).collect(),
            }),
            Bidegree::B01 => {
                let mut coeffs = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        coeffs.push(self.coeffs[j].partial(i));
                    }
                }
                Ok(LagerbergPolyForm { n, bidegree: Bidegree::B11, coeffs })
            }
            b => Err(TropicalError::WrongBidegree { op: "d'", bidegree: b }),
        }
    }

    /// Wedge product restricted to total bidegree at most `(1,1)`.
    pub fn wedge(&self, other: &Self) -> Result<Self, TropicalError> {
        use Bidegree::*;
        if self.n != other.n {
            return Err(TropicalError::Dimension { expected: self.n, got: other.n });
        }
        let n = self.n;
        let (p1, q1) = self.bidegree.pq();
        let (p2, q2) = other.bidegree.pq();
        let target = Bidegree::from_pq(p1 + p2, q1 + q2)
            .ok_or(TropicalError::WrongBidegree { op: "wedge", bidegree: other.bidegree })?;
        let coeffs = match (self.bidegree, other.bidegree) {
            (B00, _) => other.coeffs.iter().map(|c| self.coeffs[0].mul(c)).collect(),
            (_, B00) => self.coeffs.iter().map(|c| c.mul(&other.coeffs[0])).collect(),
            (B10, B01) => {
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push(self.coeffs[i].mul(&other.coeffs[j]));
                    }
                }
                out
            }
            (B01, B10) => {
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push(other.coeffs[i].mul(&self.coeffs[j]).scale(&-Rational::one()));
                    }
                }
                out
            }
            _ => unreachable!("bidegree sum checked above"),
        };
        Ok(LagerbergPolyForm { n, bidegree: target, coeffs })
    }

    /// Pullback under `x ↦ c·x`: coefficients become `c^{p+q}·g(c·x)`.
    pub fn rescale(&self, c: &Rational) -> Self {
        let factor = pow(c, self.bidegree.total());
        LagerbergPolyForm {
            n: self.n,
            bidegree: self.bidegree,
            coeffs: self.coeffs.iter().map(|p| p.rescale_variables(c).scale(&factor)).collect(),
        }
    }
}
