//! Integer polynomials as Diophantine equations: text grammar, exact
//! evaluation, the bounded brute-force solution oracle, and four-square
//! decompositions.
//!
//! Text grammar (whitespace ignored):
//!
//! ```text
//! polynomial := ['+'|'-']? term (('+'|'-') term)*
//! term       := factor ('*' factor)*
//! factor     := 'x' index ['^' exponent] | integer
//! ```
//!
//! Variables are 1-indexed `x1..xn`; the variable count of a parsed
//! polynomial is the highest index mentioned. Example:
//! `3*x1^2*x2 - 7*x3 + 5`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Multivariate polynomial with arbitrary-precision integer coefficients.
pub type DioPolynomial = Polynomial<BigInt>;

/// Whether solution components range over [1, X] or [0, X].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Positivity {
    Positive,
    Nonnegative,
}

impl Positivity {
    pub fn lower_bound(self) -> u64 {
        match self {
            Positivity::Positive => 1,
            Positivity::Nonnegative => 0,
        }
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected an integer");
        }
        let digits = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit run parses"))
    }

    fn small_integer(&mut self, what: &str) -> Result<u32> {
        let start = self.pos;
        let n = self.integer()?;
        match u32::try_from(&n) {
            Ok(v) => Ok(v),
            Err(_) => Err(Error::Syntax {
                offset: start,
                msg: format!("{what} {n} is too large"),
            }),
        }
    }

    /// factor := 'x' index ['^' exponent] | integer
    fn factor(&mut self, coeff: &mut BigInt, exps: &mut Vec<u32>) -> Result<()> {
        match self.peek() {
            Some(b'x') => {
                self.bump();
                let start = self.pos;
                let index = self.small_integer("variable index")? as usize;
                if index == 0 {
                    return Err(Error::Syntax {
                        offset: start,
                        msg: "variable index must be at least 1".into(),
                    });
                }
                if exps.len() < index {
                    exps.resize(index, 0);
                }
                let mut exponent = 1u32;
                if self.peek() == Some(b'^') {
                    self.bump();
                    exponent = self.small_integer("exponent")?;
                }
                exps[index - 1] =
                    exps[index - 1]
                        .checked_add(exponent)
                        .ok_or_else(|| Error::Syntax {
                            offset: start,
                            msg: "exponent too large".into(),
                        })?;
                Ok(())
            }
            Some(b) if b.is_ascii_digit() => {
                let n = self.integer()?;
                *coeff *= n;
                Ok(())
            }
            Some(b) => self.err(format!("unexpected character {:?}", b as char)),
            None => self.err("unexpected end of input"),
        }
    }

    /// term := factor ('*' factor)*
    fn term(&mut self) -> Result<(BigInt, Vec<u32>)> {
        let mut coeff = BigInt::one();
        let mut exps = Vec::new();
        self.factor(&mut coeff, &mut exps)?;
        while self.peek() == Some(b'*') {
            self.bump();
            self.factor(&mut coeff, &mut exps)?;
        }
        Ok((coeff, exps))
    }

    fn polynomial(&mut self) -> Result<DioPolynomial> {
        let mut terms: Vec<(BigInt, Vec<u32>)> = Vec::new();
        let mut sign = BigInt::one();
        match self.peek() {
            Some(b'+') => {
                self.bump();
            }
            Some(b'-') => {
                self.bump();
                sign = -sign;
            }
            _ => {}
        }
        loop {
            let (coeff, exps) = self.term()?;
            terms.push((&sign * coeff, exps));
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    sign = BigInt::one();
                }
                Some(b'-') => {
                    self.bump();
                    sign = -BigInt::one();
                }
                Some(b) => return self.err(format!("unexpected character {:?}", b as char)),
                None => break,
            }
        }
        let nvars = terms.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
        let terms = terms
            .into_iter()
            .map(|(c, mut e)| {
                e.resize(nvars, 0);
                (c, e)
            })
            .collect();
        Ok(DioPolynomial::from_terms(nvars, terms))
    }
}

/// Parse the Diophantine text grammar into canonical form. Errors carry the
/// byte offset of the offending character.
pub fn parse_dio(text: &str) -> Result<DioPolynomial> {
    let mut parser = Parser::new(text);
    if parser.peek().is_none() {
        return parser.err("empty polynomial");
    }
    parser.polynomial()
}

/// Exact evaluation at an integer point.
pub fn poly_eval(p: &DioPolynomial, point: &[BigInt]) -> Result<BigInt> {
    p.eval(point)
}

pub fn poly_eval_u64(p: &DioPolynomial, point: &[u64]) -> Result<BigInt> {
    let coords: Vec<BigInt> = point.iter().map(|&n| BigInt::from(n)).collect();
    p.eval(&coords)
}

/// Brute-force solution oracle: every tuple in the box with components in
/// `[1, bound]` (positive) or `[0, bound]` (nonnegative) where the
/// polynomial vanishes, in lexicographic order. This deliberately stays a
/// plain per-tuple evaluation loop; it is the independent oracle that every
/// roundtrip test compares against.
pub fn enumerate_solutions(
    p: &DioPolynomial,
    bound: u64,
    positivity: Positivity,
) -> Result<Vec<Vec<u64>>> {
    if bound < 1 {
        return Err(Error::Invalid(
            "enumeration bound must be at least 1".into(),
        ));
    }
    let lo = positivity.lower_bound();
    let n = p.nvars();
    let mut out = Vec::new();
    if n == 0 {
        if poly_eval(p, &[])?.is_zero() {
            out.push(Vec::new());
        }
        return Ok(out);
    }
    let mut tuple = vec![lo; n];
    loop {
        if poly_eval_u64(p, &tuple)?.is_zero() {
            out.push(tuple.clone());
        }
        // advance the odometer, last component fastest
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if tuple[k] < bound {
                tuple[k] += 1;
                for slot in &mut tuple[k + 1..] {
                    *slot = lo;
                }
                break;
            }
        }
    }
}

/// Substitute `x_l -> x_l + delta` in every variable. Bridges the two
/// solution conventions: nonnegative solutions of `p` in [0, X-1]^n are
/// positive solutions of `shift_arguments(p, -1)` in [1, X]^n, which the
/// level-register encodings certify directly.
pub fn shift_arguments(p: &DioPolynomial, delta: i64) -> DioPolynomial {
    let delta = BigInt::from(delta);
    let mut terms: Vec<(BigInt, Vec<u32>)> = Vec::new();
    for t in p.terms() {
        // expand coeff * prod_l (x_l + delta)^e_l one variable at a time
        let mut partial: Vec<(BigInt, Vec<u32>)> = vec![(t.coeff.clone(), Vec::new())];
        for &e in &t.exps {
            let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
            for (coeff, exps) in &partial {
                let mut binom = BigInt::one();
                let mut power = BigInt::one();
                // k runs over the kept exponent of this variable, from e down
                for k in (0..=e).rev() {
                    let mut exps = exps.clone();
                    exps.push(k);
                    next.push((coeff * &binom * &power, exps));
                    if k > 0 {
                        binom = binom * BigInt::from(k) / BigInt::from(e - k + 1);
                        power *= &delta;
                    }
                }
            }
            partial = next;
        }
        terms.extend(partial);
    }
    DioPolynomial::from_terms(p.nvars(), terms)
}

/// Lagrange four-square decomposition: a quadruple `a1 >= a2 >= a3 >= a4 >= 0`
/// with `a1^2 + a2^2 + a3^2 + a4^2 = m`, found by descending bounded search
/// from `a1 = isqrt(m)`. No number-theoretic speedups; desk scale only.
pub fn four_square(m: &BigUint) -> [BigUint; 4] {
    if m.is_zero() {
        return [
            BigUint::zero(),
            BigUint::zero(),
            BigUint::zero(),
            BigUint::zero(),
        ];
    }
    let mut a1 = m.sqrt();
    loop {
        let r1 = m - &a1 * &a1;
        let mut a2 = r1.sqrt().min(a1.clone());
        loop {
            let r2 = &r1 - &a2 * &a2;
            let mut a3 = r2.sqrt().min(a2.clone());
            loop {
                let r3 = &r2 - &a3 * &a3;
                let a4 = r3.sqrt();
                if &a4 * &a4 == r3 && a4 <= a3 {
                    return [a1, a2, a3, a4];
                }
                if a3.is_zero() {
                    break;
                }
                a3 -= BigUint::one();
            }
            if a2.is_zero() {
                break;
            }
            a2 -= BigUint::one();
        }
        assert!(!a1.is_zero(), "four-square search exhausted below isqrt");
        a1 -= BigUint::one();
    }
}

impl fmt::Display for DioPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, t) in self.terms().iter().enumerate() {
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
                    1 => factors.push(format!("x{}", v + 1)),
                    _ => factors.push(format!("x{}^{}", v + 1, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn terms_of(p: &DioPolynomial) -> Vec<(i64, Vec<u32>)> {
        p.terms()
            .iter()
            .map(|t| (i64::try_from(&t.coeff).unwrap(), t.exps.clone()))
            .collect()
    }

    #[test]
    fn parse_examples() {
        let p = parse_dio("x1^2 + x2 - 5").unwrap();
        assert_eq!(
            terms_of(&p),
            vec![(1, vec![2, 0]), (1, vec![0, 1]), (-5, vec![0, 0])]
        );

        let zero = parse_dio("0").unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.nvars(), 0);

        let pell = parse_dio("x1^2 - 4*x2^2 - 1").unwrap();
        assert_eq!(
            terms_of(&pell),
            vec![(1, vec![2, 0]), (-4, vec![0, 2]), (-1, vec![0, 0])]
        );
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match parse_dio("x1 + @") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_dio("x0 + 1") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse_dio("").is_err());
        assert!(parse_dio("3 x1").is_err());
    }

    #[test]
    fn eval_examples() {
        let p = parse_dio("x1^2 + x2 - 5").unwrap();
        assert_eq!(
            poly_eval(&p, &[BigInt::from(2), BigInt::from(1)]).unwrap(),
            BigInt::zero()
        );
        assert_eq!(
            poly_eval(&p, &[BigInt::zero(), BigInt::zero()]).unwrap(),
            BigInt::from(-5)
        );
        let pell = parse_dio("x1^2 - 4*x2^2 - 1").unwrap();
        assert_eq!(poly_eval_u64(&pell, &[3, 1]).unwrap(), BigInt::from(4));
        assert!(poly_eval_u64(&pell, &[3]).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let p = parse_dio("x1^2 + x2 - 5").unwrap();
        assert_eq!(
            enumerate_solutions(&p, 4, Positivity::Positive).unwrap(),
            vec![vec![1, 4], vec![2, 1]]
        );
        let pell = parse_dio("x1^2 - 4*x2^2 - 1").unwrap();
        assert_eq!(
            enumerate_solutions(&pell, 10, Positivity::Nonnegative).unwrap(),
            vec![vec![1, 0]]
        );
        let one = parse_dio("1").unwrap();
        assert!(enumerate_solutions(&one, 5, Positivity::Positive)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn enumeration_matches_filtering() {
        let p = parse_dio("x1*x2 - 2*x1 - 3").unwrap();
        let sols = enumerate_solutions(&p, 6, Positivity::Nonnegative).unwrap();
        let mut expected = Vec::new();
        for a in 0..=6u64 {
            for b in 0..=6u64 {
                if poly_eval_u64(&p, &[a, b]).unwrap().is_zero() {
                    expected.push(vec![a, b]);
                }
            }
        }
        assert_eq!(sols, expected);
    }

    #[test]
    fn shift_arguments_matches_pointwise() {
        let p = parse_dio("x1^2 - 4*x2^2 - 1").unwrap();
        let shifted = shift_arguments(&p, -1);
        for a in 0..5u64 {
            for b in 0..5u64 {
                assert_eq!(
                    poly_eval_u64(&shifted, &[a + 1, b + 1]).unwrap(),
                    poly_eval_u64(&p, &[a, b]).unwrap()
                );
            }
        }
        assert_eq!(shift_arguments(&shifted, 1), p);
    }

    #[test]
    fn four_square_examples() {
        assert_eq!(
            four_square(&BigUint::zero()),
            [
                BigUint::zero(),
                BigUint::zero(),
                BigUint::zero(),
                BigUint::zero()
            ]
        );
        let seven = four_square(&BigUint::from(7u32));
        assert_eq!(
            seven,
            [
                BigUint::from(2u32),
                BigUint::from(1u32),
                BigUint::from(1u32),
                BigUint::from(1u32)
            ]
        );
        let m = BigUint::from(310u32);
        let q = four_square(&m);
        let sum: BigUint = q.iter().map(|a| a * a).sum();
        assert_eq!(sum, m);
        assert!(q[0] >= q[1] && q[1] >= q[2] && q[2] >= q[3]);
    }

    fn arb_dio() -> impl Strategy<Value = DioPolynomial> {
        let term = (-9i64..10, proptest::collection::vec(0u32..4, 3));
        proptest::collection::vec(term, 0..6).prop_map(|ts| {
            DioPolynomial::from_terms(
                3,
                ts.into_iter().map(|(c, e)| (BigInt::from(c), e)).collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn render_parse_roundtrip(p in arb_dio()) {
            let text = p.to_string();
            let parsed = parse_dio(&text).unwrap();
            // parse infers nvars from the highest mentioned index, so pad back
            let parsed = parsed.pad_vars(3.max(parsed.nvars()));
            prop_assert_eq!(parsed, p.pad_vars(3));
        }
    }
}
