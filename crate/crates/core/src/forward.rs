//! Compilation of a control problem into an equivalent Diophantine equation.
//!
//! The channel family is interpolated by a matrix-valued Lagrange polynomial
//! through the Kraus operators, the propagated state becomes a matrix whose
//! entries are polynomials in the policy unknowns, and the objective becomes
//! a rational-coefficient polynomial that agrees with the exact objective at
//! every policy. Adding a vanishing accessibility term and clearing
//! denominators yields an integer-coefficient equation whose solutions are
//! precisely the accessible optimal policies.
//!
//! Policy unknowns take the same 0-based channel labels that policies use,
//! so solution tuples of the emitted equation can be read directly as
//! policies. The interpolation itself runs through the 1-based node
//! positions 1..N and is composed with a unit shift afterwards.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::channels::{Channel, ControlProblem, PolicySet, Target};
use crate::dio::DioPolynomial;
use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::poly::{Polynomial, RatPolynomial};
use crate::scalar::{GaussianRational, Rational};

/// Expansion cost grows with the Kraus count to the power of the policy
/// length; longer policies are refused instead of silently blowing up.
pub const MAX_SYMBOLIC_POLICY_LEN: usize = 6;

/// A polynomial in one integer variable with matrix coefficients:
/// `coeffs[k]` multiplies the k-th power of the argument.
#[derive(Clone, PartialEq, Debug)]
pub struct MatrixPolynomial {
    coeffs: Vec<RatMatrix>,
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    if k > n {
        BigInt::zero()
    } else {
        acc
    }
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<RatMatrix>) -> Self {
        assert!(!coeffs.is_empty(), "need at least a constant coefficient");
        let shape = (coeffs[0].rows(), coeffs[0].cols());
        assert!(
            coeffs.iter().all(|c| (c.rows(), c.cols()) == shape),
            "all coefficients share one shape"
        );
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[RatMatrix] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.coeffs[0].rows(), self.coeffs[0].cols())
    }

    /// Exact evaluation at an integer argument (Horner).
    pub fn eval_int(&self, arg: i64) -> RatMatrix {
        let x = GaussianRational::from_int(arg);
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &acc.scale(&x) + c;
        }
        acc
    }

    /// Compose with an argument shift: the returned polynomial q satisfies
    /// q(v) = p(v + offset) identically.
    pub fn shift_arg(&self, offset: i64) -> Self {
        let n = self.coeffs.len();
        let (rows, cols) = self.shape();
        let mut out = vec![RatMatrix::zeros(rows, cols); n];
        for (k, coeff) in self.coeffs.iter().enumerate() {
            let mut power = Rational::one();
            // contribute coeff * binom(k, m) * offset^(k-m) to degree m,
            // walking down from m = k
            for m in (0..=k).rev() {
                let factor = Rational::from_integer(binomial(k as u32, m as u32)) * &power;
                if !factor.is_zero() {
                    out[m] = &out[m] + &coeff.scale_rat(&factor);
                }
                power *= Rational::from_integer(BigInt::from(offset));
            }
        }
        Self::new(out)
    }
}

/// The matrix-valued Lagrange interpolation through the Kraus operators:
/// for each operator slot j the returned polynomial passes through
/// `(i, K_{i,j})` for node positions i = 1..N (1-based channel list
/// position). Channels with shorter Kraus lists are padded with zero
/// operators, which leave the channel action unchanged.
pub fn lagrange_interpolate(channels: &[Channel]) -> Result<Vec<MatrixPolynomial>> {
    let n = channels.len();
    if n == 0 {
        return Err(Error::Invalid(
            "interpolation needs at least one channel".into(),
        ));
    }
    let dim = channels[0].dim();
    if channels.iter().any(|c| c.dim() != dim) {
        return Err(Error::DimensionMismatch(
            "channels must share one dimension".into(),
        ));
    }
    let j_max = channels
        .iter()
        .map(|c| c.kraus().len())
        .max()
        .expect("nonempty");
    let zero = RatMatrix::zeros(dim, dim);

    // Scalar Lagrange basis L_l(i) = prod_{m != l} (i - m)/(l - m) as exact
    // rational coefficient vectors, nodes 1..N.
    let mut bases: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for l in 1..=n as i64 {
        let mut num = vec![Rational::one()];
        let mut denom = Rational::one();
        for m in 1..=n as i64 {
            if m == l {
                continue;
            }
            // multiply by (i - m)
            let mut next = vec![Rational::zero(); num.len() + 1];
            for (k, c) in num.iter().enumerate() {
                next[k + 1] += c;
                next[k] += c * Rational::from_integer(BigInt::from(-m));
            }
            num = next;
            denom *= Rational::from_integer(BigInt::from(l - m));
        }
        let inv = Rational::one() / denom;
        bases.push(num.into_iter().map(|c| c * &inv).collect());
    }

    let mut out = Vec::with_capacity(j_max);
    for j in 0..j_max {
        let mut coeffs = vec![zero.clone(); n];
        for (l, channel) in channels.iter().enumerate() {
            let k_lj = channel.kraus().get(j).unwrap_or(&zero);
            if k_lj.is_zero_matrix() {
                continue;
            }
            for (deg, c) in bases[l].iter().enumerate() {
                if !c.is_zero() {
                    coeffs[deg] = &coeffs[deg] + &k_lj.scale_rat(c);
                }
            }
        }
        out.push(MatrixPolynomial::new(coeffs));
    }
    Ok(out)
}

/// Multivariate polynomial with matrix coefficients over the policy
/// unknowns. Terms are canonical: descending graded-lex, no zero matrices.
#[derive(Clone, PartialEq, Debug)]
pub(crate) struct MatPoly {
    rows: usize,
    cols: usize,
    nvars: usize,
    terms: Vec<(Vec<u32>, RatMatrix)>,
}

impl MatPoly {
    fn from_terms(
        rows: usize,
        cols: usize,
        nvars: usize,
        terms: Vec<(Vec<u32>, RatMatrix)>,
    ) -> Self {
        use std::collections::BTreeMap;
        let mut map: BTreeMap<Vec<u32>, RatMatrix> = BTreeMap::new();
        for (exps, m) in terms {
            debug_assert_eq!(exps.len(), nvars);
            match map.get_mut(&exps) {
                Some(acc) => *acc = &*acc + &m,
                None => {
                    map.insert(exps, m);
                }
            }
        }
        let mut out: Vec<(Vec<u32>, RatMatrix)> = map
            .into_iter()
            .filter(|(_, m)| !m.is_zero_matrix())
            .collect();
        out.sort_by(|a, b| crate::poly::cmp_graded_lex(&b.0, &a.0));
        Self {
            rows,
            cols,
            nvars,
            terms: out,
        }
    }

    fn constant(m: RatMatrix, nvars: usize) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        Self::from_terms(rows, cols, nvars, vec![(vec![0; nvars], m)])
    }

    /// Inject a univariate matrix polynomial as a polynomial in variable
    /// `var` of an `nvars`-variable ring.
    fn from_univariate(p: &MatrixPolynomial, var: usize, nvars: usize) -> Self {
        let (rows, cols) = p.shape();
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(deg, m)| {
                let mut exps = vec![0u32; nvars];
                exps[var] = deg as u32;
                (exps, m.clone())
            })
            .collect();
        Self::from_terms(rows, cols, nvars, terms)
    }

    fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        Self::from_terms(self.rows, self.cols, self.nvars, terms)
    }

    fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape-compatible product");
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ma) in &self.terms {
            for (eb, mb) in &rhs.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
                terms.push((exps, ma.mat_mul(mb).expect("checked shape")));
            }
        }
        Self::from_terms(self.rows, self.cols, self.nvars, terms)
    }

    /// Conjugate transpose of every coefficient; valid because the
    /// variables only take real (integer) values.
    fn dagger(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, m)| (e.clone(), m.dagger()))
                .collect(),
        }
    }

    fn sub_constant(&self, m: &RatMatrix) -> Self {
        self.add(&Self::constant(-m, self.nvars))
    }

    /// Tr(left * self) as a scalar polynomial.
    fn trace_with_left(&self, left: &RatMatrix) -> Result<Polynomial<GaussianRational>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (exps, m) in &self.terms {
            terms.push((left.trace_product(m)?, exps.clone()));
        }
        Ok(Polynomial::from_terms(self.nvars, terms))
    }

    fn trace(&self) -> Result<Polynomial<GaussianRational>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (exps, m) in &self.terms {
            terms.push((m.trace()?, exps.clone()));
        }
        Ok(Polynomial::from_terms(self.nvars, terms))
    }
}

fn check_policy_len(p_len: usize) -> Result<()> {
    if p_len == 0 {
        return Err(Error::Invalid("policy length must be positive".into()));
    }
    if p_len > MAX_SYMBOLIC_POLICY_LEN {
        return Err(Error::Guard(format!(
            "symbolic expansion refuses policy length {p_len} > {MAX_SYMBOLIC_POLICY_LEN}"
        )));
    }
    Ok(())
}

/// The propagated state as a matrix of polynomials in the policy unknowns
/// p_1..p_P, where each unknown ranges over the 0-based channel labels.
fn symbolic_state(channels: &[Channel], rho0: &RatMatrix, p_len: usize) -> Result<MatPoly> {
    let phis = lagrange_interpolate(channels)?;
    // Compose with v -> v + 1 so the unknown equals the channel label.
    let shifted: Vec<MatrixPolynomial> = phis.iter().map(|p| p.shift_arg(1)).collect();
    let mut rho = MatPoly::constant(rho0.clone(), p_len);
    for step in 0..p_len {
        let mut next: Option<MatPoly> = None;
        for psi in &shifted {
            let factor = MatPoly::from_univariate(psi, step, p_len);
            let sandwich = factor.mul(&rho).mul(&factor.dagger());
            next = Some(match next {
                Some(acc) => acc.add(&sandwich),
                None => sandwich,
            });
        }
        rho = next.expect("at least one Kraus slot");
    }
    Ok(rho)
}

/// The state-preparation objective as a rational polynomial: its value at
/// any policy (as an integer tuple of channel labels) equals
/// `objective_f` of that policy.
pub fn symbolic_f(prob: &ControlProblem, p_len: usize) -> Result<RatPolynomial> {
    let Target::State(rho_f) = prob.target() else {
        return Err(Error::WrongTarget("symbolic F needs a state target".into()));
    };
    check_policy_len(p_len)?;
    let rho = symbolic_state(prob.channels(), prob.rho0().mat(), p_len)?;
    let diff = rho.sub_constant(rho_f.mat());
    let gram = diff.dagger().mul(&diff);
    let poly = gram.trace()?.into_real()?;
    Ok(RatPolynomial::new(RatPolynomial::policy_vars(p_len), poly))
}

/// The observable objective as a rational polynomial agreeing with
/// `objective_j` at every policy.
pub fn symbolic_j(prob: &ControlProblem, p_len: usize) -> Result<RatPolynomial> {
    let Target::Observable(obs) = prob.target() else {
        return Err(Error::WrongTarget(
            "symbolic J needs an observable target".into(),
        ));
    };
    check_policy_len(p_len)?;
    let rho = symbolic_state(prob.channels(), prob.rho0().mat(), p_len)?;
    let poly = rho.trace_with_left(obs)?.into_real()?;
    Ok(RatPolynomial::new(RatPolynomial::policy_vars(p_len), poly))
}

/// The accessibility constraint: a polynomial that is nonnegative on all
/// integer points and vanishes exactly on the accessible policy set.
///
/// Explicit sets use the literal product of per-policy square sums. A full
/// Cartesian grid would need |values|^P product factors, so it uses the
/// equivalent per-component form sum_k prod_v (p_k - v)^2 instead.
pub fn accessibility_term(ap: &PolicySet, p_len: usize) -> Result<RatPolynomial> {
    if ap.policy_length() != p_len {
        return Err(Error::Invalid(format!(
            "policy length {p_len} does not match the accessible set length {}",
            ap.policy_length()
        )));
    }
    let poly = match ap {
        PolicySet::Explicit(list) => {
            let mut acc = Polynomial::constant(p_len, Rational::one());
            for policy in list {
                let mut sum = Polynomial::zero(p_len);
                for (k, &step) in policy.steps().iter().enumerate() {
                    let var = Polynomial::variable(p_len, k);
                    let delta = var.sub(&Polynomial::constant(
                        p_len,
                        Rational::from_integer(BigInt::from(step)),
                    ));
                    sum = sum.add(&delta.mul(&delta));
                }
                acc = acc.mul(&sum);
            }
            acc
        }
        PolicySet::Grid { values, length } => {
            let mut acc = Polynomial::zero(*length);
            for k in 0..*length {
                let var = Polynomial::variable(*length, k);
                let mut prod = Polynomial::constant(*length, Rational::one());
                for &v in values {
                    let delta = var.sub(&Polynomial::constant(
                        *length,
                        Rational::from_integer(BigInt::from(v)),
                    ));
                    prod = prod.mul(&delta.mul(&delta));
                }
                acc = acc.add(&prod);
            }
            acc
        }
    };
    Ok(RatPolynomial::new(RatPolynomial::policy_vars(p_len), poly))
}

/// An emitted Diophantine equation together with its variable legend and
/// the denominator-clearing factor.
#[derive(Clone, PartialEq, Debug)]
pub struct ReductionResult {
    pub equation: DioPolynomial,
    pub policy_vars: usize,
    pub ancillas: Vec<String>,
    pub scale: Rational,
}

impl ReductionResult {
    /// Emitted variable names in file order: x1..xP are the policy
    /// unknowns, any remaining variables are the listed ancillas.
    pub fn variable_names(&self) -> Vec<String> {
        let mut names = RatPolynomial::policy_vars(self.policy_vars);
        names.extend(self.ancillas.iter().cloned());
        names
    }
}

/// Compile the exact-optimum equation: the cleared form of G(p) + acc(p)
/// where G is the state objective or the squared observable objective. An
/// integer tuple solves the equation iff it is an accessible policy whose
/// objective is exactly optimal (F = 0, respectively J = 0).
pub fn exact_equation(prob: &ControlProblem, p_len: usize) -> Result<ReductionResult> {
    let objective = match prob.target() {
        Target::State(_) => symbolic_f(prob, p_len)?,
        Target::Observable(_) => {
            let j = symbolic_j(prob, p_len)?;
            RatPolynomial::new(j.vars().to_vec(), j.poly.mul(&j.poly))
        }
    };
    let acc = accessibility_term(prob.ap(), p_len)?;
    let (equation, lcm) = objective.poly.add(&acc.poly).clear_denominators();
    Ok(ReductionResult {
        equation,
        policy_vars: p_len,
        ancillas: Vec::new(),
        scale: Rational::from_integer(lcm),
    })
}

const ANCILLA_NAMES: [&str; 8] = ["a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"];

/// Compile the accuracy-relaxed equation
/// `[(1 + sum b_i^2)(G(p) - eps) + (1 + sum a_i^2)]^2 + acc(p) = 0`,
/// solvable in (p, a, b) over nonnegative integers iff some accessible
/// policy has G(p) strictly below eps.
///
/// The literal published form admits the all-zero ancilla assignment, which
/// would satisfy the equation regardless of p; the unit offsets restore the
/// intended strict-inequality semantics while four-square decompositions
/// still realize every required positive a and b.
pub fn epsilon_equation(
    prob: &ControlProblem,
    p_len: usize,
    eps: &Rational,
) -> Result<ReductionResult> {
    if !eps.is_positive() {
        return Err(Error::Invalid(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    let objective = match prob.target() {
        Target::State(_) => symbolic_f(prob, p_len)?.poly,
        Target::Observable(_) => {
            let j = symbolic_j(prob, p_len)?.poly;
            j.mul(&j)
        }
    };
    let nvars = p_len + 8;
    let g = objective.pad_vars(nvars);
    let one = Polynomial::constant(nvars, Rational::one());
    let square_sum = |offset: usize| {
        let mut s = one.clone();
        for i in 0..4 {
            let v = Polynomial::variable(nvars, p_len + offset + i);
            s = s.add(&v.mul(&v));
        }
        s
    };
    let a_sum = square_sum(0);
    let b_sum = square_sum(4);
    let shifted = g.sub(&Polynomial::constant(nvars, eps.clone()));
    let bracket = b_sum.mul(&shifted).add(&a_sum);
    let acc = accessibility_term(prob.ap(), p_len)?.poly.pad_vars(nvars);
    let (equation, lcm) = bracket.mul(&bracket).add(&acc).clear_denominators();
    Ok(ReductionResult {
        equation,
        policy_vars: p_len,
        ancillas: ANCILLA_NAMES.iter().map(|s| s.to_string()).collect(),
        scale: Rational::from_integer(lcm),
    })
}
