//! Multivariate polynomials in canonical form, generic over the coefficient
//! ring. Terms are kept sorted in descending graded-lexicographic order with
//! no zero coefficients and no duplicate exponent vectors, so equal
//! polynomials compare equal structurally and rendering is deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, Rational};

/// Coefficient ring operations needed by the polynomial arithmetic, by
/// reference to avoid cloning arbitrary-precision values.
pub trait Coeff: Clone + PartialEq + Zero + One {
    fn add_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
}

impl Coeff for BigInt {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coeff for Rational {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            Self::zero()
        } else {
            self * other
        }
    }
}

impl Coeff for GaussianRational {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Term<C> {
    pub coeff: C,
    pub exps: Vec<u32>,
}

/// Graded-lexicographic comparison of exponent vectors.
pub fn cmp_graded_lex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| u64::from(e)).sum();
    let db: u64 = b.iter().map(|&e| u64::from(e)).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: Vec<Term<C>>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::from_terms(nvars, vec![(c, vec![0; nvars])])
    }

    /// The monomial x_{var} (0-based variable index).
    pub fn variable(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Self::from_terms(nvars, vec![(C::one(), exps)])
    }

    /// Canonicalize an arbitrary term list: merge duplicates, drop zeros,
    /// sort descending graded-lex.
    pub fn from_terms(nvars: usize, terms: Vec<(C, Vec<u32>)>) -> Self {
        let mut map: BTreeMap<Vec<u32>, C> = BTreeMap::new();
        for (c, exps) in terms {
            assert_eq!(exps.len(), nvars, "exponent vector arity");
            match map.get_mut(&exps) {
                Some(acc) => *acc = acc.add_ref(&c),
                None => {
                    map.insert(exps, c);
                }
            }
        }
        let mut out: Vec<Term<C>> = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(exps, coeff)| Term { coeff, exps })
            .collect();
        out.sort_by(|a, b| cmp_graded_lex(&b.exps, &a.exps));
        Self { nvars, terms: out }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term<C>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().map(|&e| u64::from(e)).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars, "variable count");
        let mut terms: Vec<(C, Vec<u32>)> = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        for t in self.terms.iter().chain(&rhs.terms) {
            terms.push((t.coeff.clone(), t.exps.clone()));
        }
        Self::from_terms(self.nvars, terms)
    }

    pub fn neg(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.neg_ref(),
                    exps: t.exps.clone(),
                })
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars, "variable count");
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let exps: Vec<u32> = a
                    .exps
                    .iter()
                    .zip(&b.exps)
                    .map(|(&x, &y)| x.checked_add(y).expect("exponent overflow"))
                    .collect();
                terms.push((a.coeff.mul_ref(&b.coeff), exps));
            }
        }
        Self::from_terms(self.nvars, terms)
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.mul_ref(s),
                    exps: t.exps.clone(),
                })
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.nvars, C::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluate at a point with coordinates in the coefficient ring.
    pub fn eval(&self, point: &[C]) -> Result<C> {
        if point.len() != self.nvars {
            return Err(Error::Arity {
                expected: self.nvars,
                got: point.len(),
            });
        }
        // Precompute coordinate powers up to the max exponent per variable.
        let mut powers: Vec<Vec<C>> = Vec::with_capacity(self.nvars);
        for (v, coord) in point.iter().enumerate() {
            let max = self.terms.iter().map(|t| t.exps[v]).max().unwrap_or(0);
            let mut col = Vec::with_capacity(max as usize + 1);
            col.push(C::one());
            for k in 1..=max {
                let prev = &col[(k - 1) as usize];
                col.push(prev.mul_ref(coord));
            }
            powers.push(col);
        }
        let mut acc = C::zero();
        for t in &self.terms {
            let mut m = t.coeff.clone();
            for (v, &e) in t.exps.iter().enumerate() {
                if e > 0 {
                    m = m.mul_ref(&powers[v][e as usize]);
                }
            }
            acc = acc.add_ref(&m);
        }
        Ok(acc)
    }

    /// Re-embed into a polynomial ring with more variables (existing
    /// variables keep their indices).
    pub fn pad_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        Self {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mut exps = t.exps.clone();
                    exps.resize(nvars, 0);
                    Term {
                        coeff: t.coeff.clone(),
                        exps,
                    }
                })
                .collect(),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(
            self.nvars,
            self.terms
                .iter()
                .map(|t| (f(&t.coeff), t.exps.clone()))
                .collect(),
        )
    }
}

impl Polynomial<GaussianRational> {
    /// Drop into the rational coefficient ring; every coefficient must have
    /// an exactly zero imaginary part.
    pub fn into_real(&self) -> Result<Polynomial<Rational>> {
        for t in &self.terms {
            if !t.coeff.is_real() {
                return Err(Error::Invalid(format!(
                    "polynomial has a complex coefficient {}",
                    t.coeff
                )));
            }
        }
        Ok(self.map_coeffs(|c| c.re.clone()))
    }
}

impl Polynomial<Rational> {
    /// Scale by the least common multiple of the coefficient denominators so
    /// all coefficients become integers. The zero set over integer points is
    /// unchanged because the factor is a positive integer.
    pub fn clear_denominators(&self) -> (Polynomial<BigInt>, BigInt) {
        let mut lcm = BigInt::one();
        for t in &self.terms {
            lcm = lcm.lcm(t.coeff.denom());
        }
        let poly = Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.numer() * (&lcm / t.coeff.denom()),
                    exps: t.exps.clone(),
                })
                .collect(),
        };
        (poly, lcm)
    }

    pub fn eval_at_integers(&self, point: &[BigInt]) -> Result<Rational> {
        let coords: Vec<Rational> = point
            .iter()
            .map(|n| Rational::from_integer(n.clone()))
            .collect();
        self.eval(&coords)
    }
}

/// A rational-coefficient polynomial whose variables carry names (policy
/// unknowns `p1..pP` and, for the accuracy-relaxed reduction, ancillas
/// `a1..a4`, `b1..b4`).
#[derive(Clone, PartialEq, Debug)]
pub struct RatPolynomial {
    vars: Vec<String>,
    pub poly: Polynomial<Rational>,
}

impl RatPolynomial {
    pub fn new(vars: Vec<String>, poly: Polynomial<Rational>) -> Self {
        assert_eq!(vars.len(), poly.nvars(), "one name per variable");
        Self { vars, poly }
    }

    /// Standard policy-variable names p1..pP.
    pub fn policy_vars(count: usize) -> Vec<String> {
        (1..=count).map(|k| format!("p{k}")).collect()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn eval_at_integers(&self, point: &[BigInt]) -> Result<Rational> {
        self.poly.eval_at_integers(point)
    }

    pub fn eval_at_u64(&self, point: &[u64]) -> Result<Rational> {
        let coords: Vec<BigInt> = point.iter().map(|&n| BigInt::from(n)).collect();
        self.eval_at_integers(&coords)
    }

    pub fn clear_denominators(&self) -> (Polynomial<BigInt>, BigInt) {
        self.poly.clear_denominators()
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (idx, t) in self.poly.terms().iter().enumerate() {
            let neg = t.coeff.is_negative();
            let mag = t.coeff.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || t.exps.iter().all(|&e| e == 0) {
                factors.push(mag.to_string());
            }
            for (v, &e) in t.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[v].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[v], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
