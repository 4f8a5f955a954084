//! Compilation of a Diophantine equation into equivalent digitized control
//! problems: unitary cyclic shifts, amplitude-damping ladders, and a
//! symbolic multimode-coherent formulation, plus the named complexity
//! examples.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::channels::{Channel, ControlProblem, DensityMatrix, Policy, PolicySet, Target};
use crate::dio::{poly_eval_u64, DioPolynomial};
use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::scalar::{GaussianRational, Rational};

/// Largest encoded Hilbert-space dimension X^n accepted before refusing.
pub const MAX_ENCODING_DIM: usize = 10_000;

/// The cyclic X-by-X shift: S |e_k> = |e_{k+1}>, wrapping |e_X> to |e_1>.
pub fn shift_matrix(x: u64) -> RatMatrix {
    let x = x as usize;
    let mut m = RatMatrix::zeros(x, x);
    for k in 0..x {
        m.set((k + 1) % x, k, GaussianRational::one());
    }
    m
}

/// The level-index matrix diag(1, 2, ..., X).
pub fn xi_matrix(x: u64) -> RatMatrix {
    let values: Vec<GaussianRational> = (1..=x as i64).map(GaussianRational::from_int).collect();
    RatMatrix::diag(&values)
}

/// Embed a single-mode operator at mode `l` (0-based) of an `n`-mode
/// register, identity elsewhere. Mode 0 is the most significant factor.
pub fn embed_mode(op: &RatMatrix, l: usize, n: usize, x: u64) -> RatMatrix {
    let mut out = RatMatrix::identity(1);
    for mode in 0..n {
        if mode == l {
            out = out.kron(op);
        } else {
            out = out.kron(&RatMatrix::identity(x as usize));
        }
    }
    out
}

/// Evaluate an integer polynomial at a commuting family of square matrices.
pub fn eval_at_matrices(p: &DioPolynomial, mats: &[RatMatrix]) -> Result<RatMatrix> {
    if mats.len() != p.nvars() {
        return Err(Error::Arity {
            expected: p.nvars(),
            got: mats.len(),
        });
    }
    let dim = mats.first().map_or(1, RatMatrix::rows);
    if mats.iter().any(|m| m.rows() != dim || m.cols() != dim) {
        return Err(Error::DimensionMismatch(
            "matrix arguments must be square with a common dimension".into(),
        ));
    }
    // powers[v][e] = mats[v]^e
    let mut powers: Vec<Vec<RatMatrix>> = Vec::with_capacity(mats.len());
    for (v, m) in mats.iter().enumerate() {
        let max = p.terms().iter().map(|t| t.exps[v]).max().unwrap_or(0);
        let mut col = vec![RatMatrix::identity(dim)];
        for e in 1..=max {
            col.push(col[(e - 1) as usize].mat_mul(m)?);
        }
        powers.push(col);
    }
    let mut acc = RatMatrix::zeros(dim, dim);
    for t in p.terms() {
        let mut term = RatMatrix::identity(dim);
        for (v, &e) in t.exps.iter().enumerate() {
            if e > 0 {
                term = term.mat_mul(&powers[v][e as usize])?;
            }
        }
        let coeff = GaussianRational::from_rational(Rational::from_integer(t.coeff.clone()));
        acc = &acc + &term.scale(&coeff);
    }
    Ok(acc)
}

/// Which level-register construction a bounded encoding uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EncodingKind {
    /// Unitary cyclic shifts; the start state encodes the all-ones tuple and
    /// channel l increments component l (with wraparound at X).
    Shift,
    /// Amplitude-damping ladders; the start state encodes the all-X tuple
    /// and channel l decrements component l (level 1 is stationary).
    Damping,
}

/// A control problem encoding bounded solvability of a Diophantine
/// equation: the objective reaches zero exactly on policies whose decoded
/// tuples solve the equation within [1, X]^n.
#[derive(Clone, Debug)]
pub struct BoundedEncoding {
    pub problem: ControlProblem,
    pub dio: DioPolynomial,
    pub kind: EncodingKind,
    /// Number of unknowns / register modes.
    pub n: usize,
    /// Per-component solution bound.
    pub x: u64,
    /// Policy length.
    pub q: usize,
}

impl BoundedEncoding {
    /// Whether the policy length suffices to reach every tuple in the
    /// search box. Below n*X the equivalence only covers tuples reachable
    /// within q steps.
    pub fn q_covers_box(&self) -> bool {
        self.q >= self.n * (self.x as usize)
    }

    /// Hilbert-space dimension X^n.
    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    /// Decode a policy into the tuple its final state encodes, counting
    /// per-channel applications: component l is 1 + count_l for shifts and
    /// X - count_l for damping. Policies where any count exceeds X - 1 are
    /// aliases of shorter ones (wraparound or saturation) and decode to
    /// None.
    pub fn decode_policy(&self, policy: &Policy) -> Option<Vec<u64>> {
        let mut counts = vec![0u64; self.n];
        for &step in policy.steps() {
            if step == 0 {
                continue;
            }
            counts[step - 1] += 1;
        }
        if counts.iter().any(|&c| c > self.x.saturating_sub(1)) {
            return None;
        }
        Some(
            counts
                .iter()
                .map(|&c| match self.kind {
                    EncodingKind::Shift => 1 + c,
                    EncodingKind::Damping => self.x - c,
                })
                .collect(),
        )
    }
}

fn encoding_dims(d: &DioPolynomial, x: u64) -> Result<usize> {
    if x < 1 {
        return Err(Error::Invalid("bound X must be at least 1".into()));
    }
    let mut dim: usize = 1;
    for _ in 0..d.nvars() {
        dim = dim
            .checked_mul(x as usize)
            .filter(|&v| v <= MAX_ENCODING_DIM)
            .ok_or_else(|| {
                Error::Guard(format!(
                    "encoded dimension X^n = {x}^{} exceeds {MAX_ENCODING_DIM}",
                    d.nvars()
                ))
            })?;
    }
    Ok(dim)
}

/// The negated square of the polynomial evaluated at the level-index
/// matrices: maximal expectation 0, attained exactly on solution tuples.
fn encoding_observable(d: &DioPolynomial, x: u64, n: usize) -> Result<RatMatrix> {
    let xis: Vec<RatMatrix> = (0..n).map(|l| embed_mode(&xi_matrix(x), l, n, x)).collect();
    let dm = eval_at_matrices(d, &xis)?;
    Ok(-&dm.mat_mul(&dm)?)
}

fn encoding_policy_set(n: usize, q: usize) -> Result<PolicySet> {
    PolicySet::grid((0..=n).collect(), q)
}

/// Encode bounded positive solvability with unitary cyclic shifts:
/// channel 0 is the identity, channel l conjugates by the shift on mode l,
/// the start state encodes (1, ..., 1).
pub fn shift_encoding(d: &DioPolynomial, x: u64, q: usize) -> Result<BoundedEncoding> {
    let dim = encoding_dims(d, x)?;
    let n = d.nvars();
    let mut channels = vec![Channel::identity(dim)];
    for l in 0..n {
        channels.push(Channel::unitary(embed_mode(&shift_matrix(x), l, n, x))?);
    }
    let problem = ControlProblem::new(
        channels,
        DensityMatrix::basis(dim, 0),
        Target::Observable(encoding_observable(d, x, n)?),
        encoding_policy_set(n, q)?,
    )?;
    Ok(BoundedEncoding {
        problem,
        dio: d.clone(),
        kind: EncodingKind::Shift,
        n,
        x,
        q,
    })
}

/// Single-mode amplitude-damping Kraus family on X levels: K_1 = |e1><e1|,
/// K_i = |e_{i-1}><e_i| for i = 2..X. Moves population one level down with
/// level 1 stationary.
pub fn damping_kraus(x: u64) -> Vec<RatMatrix> {
    let x = x as usize;
    let mut out = Vec::with_capacity(x);
    let mut k1 = RatMatrix::zeros(x, x);
    k1.set(0, 0, GaussianRational::one());
    out.push(k1);
    for i in 1..x {
        let mut k = RatMatrix::zeros(x, x);
        k.set(i - 1, i, GaussianRational::one());
        out.push(k);
    }
    out
}

/// Encode bounded positive solvability with amplitude-damping channels:
/// the start state encodes (X, ..., X) and channel l decrements mode l.
pub fn damping_encoding(d: &DioPolynomial, x: u64, q: usize) -> Result<BoundedEncoding> {
    let dim = encoding_dims(d, x)?;
    let n = d.nvars();
    let mut channels = vec![Channel::identity(dim)];
    for l in 0..n {
        let kraus: Vec<RatMatrix> = damping_kraus(x)
            .iter()
            .map(|k| embed_mode(k, l, n, x))
            .collect();
        channels.push(Channel::new(kraus)?);
    }
    let problem = ControlProblem::new(
        channels,
        DensityMatrix::basis(dim, dim - 1),
        Target::Observable(encoding_observable(d, x, n)?),
        encoding_policy_set(n, q)?,
    )?;
    Ok(BoundedEncoding {
        problem,
        dio: d.clone(),
        kind: EncodingKind::Damping,
        n,
        x,
        q,
    })
}

/// Symbolic multimode-coherent control problem. The state is a tuple of
/// nonnegative integer displacement counts, one per mode, starting from the
/// vacuum (0, ..., 0); channel l increments count l by one; the objective
/// is J(c) = -D(c)^2, exact because coherent states are eigenstates of the
/// annihilation operators. Unbounded by construction: any nonnegative
/// tuple is reachable by a long enough policy.
#[derive(Clone, PartialEq, Debug)]
pub struct CoherentProblem {
    pub dio: DioPolynomial,
}

/// Wrap a Diophantine polynomial as a coherent-control problem.
pub fn coherent_encoding(d: &DioPolynomial) -> CoherentProblem {
    CoherentProblem { dio: d.clone() }
}

/// J(c) = -D(c)^2 for a tuple of displacement counts.
pub fn coherent_objective(prob: &CoherentProblem, counts: &[u64]) -> Result<Rational> {
    let v = poly_eval_u64(&prob.dio, counts)?;
    Ok(Rational::from_integer(-(&v * &v)))
}

/// The two-mode Kerr-type NP-hard family: D = alpha x1^2 + beta x2 - gamma.
pub fn kerr_example(alpha: u64, beta: u64, gamma: u64) -> Result<CoherentProblem> {
    if alpha < 1 || beta < 1 || gamma < 1 {
        return Err(Error::Invalid("Kerr coefficients must be positive".into()));
    }
    let terms = vec![
        (BigInt::from(alpha), vec![2u32, 0]),
        (BigInt::from(beta), vec![0, 1]),
        (-BigInt::from(gamma), vec![0, 0]),
    ];
    Ok(CoherentProblem {
        dio: DioPolynomial::from_terms(2, terms),
    })
}

/// The easy Pell family: D = x1^2 - n^2 x2^2 - 1, whose only nonnegative
/// solution is (1, 0).
pub fn pell_example(n: u64) -> Result<CoherentProblem> {
    if n < 1 {
        return Err(Error::Invalid("Pell parameter must be positive".into()));
    }
    let n = BigInt::from(n);
    let terms = vec![
        (BigInt::from(1), vec![2u32, 0]),
        (-(&n * &n), vec![0, 2]),
        (BigInt::from(-1), vec![0, 0]),
    ];
    Ok(CoherentProblem {
        dio: DioPolynomial::from_terms(2, terms),
    })
}

/// Double-precision cross-check of the symbolic coherent rule on a
/// truncated Fock space: builds the annihilation matrix and the
/// displacement exp(a^dagger - a) at truncation `m`, applies the
/// displacement sequence to the vacuum, computes the expectation of
/// -D(a)^dagger D(a) numerically, and returns the absolute deviation from
/// `coherent_objective`.
pub fn fock_validate(prob: &CoherentProblem, counts: &[u64], m: usize) -> Result<f64> {
    let n = prob.dio.nvars();
    if counts.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: counts.len(),
        });
    }
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let needed = 4 * (max_count * max_count) as usize + 16;
    if m < needed {
        return Err(Error::Guard(format!(
            "Fock truncation {m} too small; counts up to {max_count} need at least {needed}"
        )));
    }

    use nalgebra::{DMatrix, DVector};
    let lower = DMatrix::<f64>::from_fn(
        m,
        m,
        |r, c| {
            if r + 1 == c {
                (c as f64).sqrt()
            } else {
                0.0
            }
        },
    );
    let generator = lower.transpose() - &lower;
    let displacement = generator.exp();

    // Per-mode state after count_l displacements of the vacuum.
    let mut mode_states: Vec<DVector<f64>> = Vec::with_capacity(n);
    for &c in counts {
        let mut psi = DVector::<f64>::zeros(m);
        psi[0] = 1.0;
        for _ in 0..c {
            psi = &displacement * psi;
        }
        mode_states.push(psi);
    }

    // Gram tables <a^j psi, a^k psi> per mode, up to the polynomial degree.
    let mut grams: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
    for (l, psi) in mode_states.iter().enumerate() {
        let max_deg = prob
            .dio
            .terms()
            .iter()
            .map(|t| t.exps[l])
            .max()
            .unwrap_or(0) as usize;
        let mut ladder = vec![psi.clone()];
        for k in 1..=max_deg {
            ladder.push(&lower * &ladder[k - 1]);
        }
        let gram = (0..=max_deg)
            .map(|j| (0..=max_deg).map(|k| ladder[j].dot(&ladder[k])).collect())
            .collect();
        grams.push(gram);
    }

    // <v|v> for v = D(a) psi, factorized over modes.
    let mut norm_sq = 0.0f64;
    for t1 in prob.dio.terms() {
        for t2 in prob.dio.terms() {
            let mut prod = t1.coeff.to_f64().unwrap() * t2.coeff.to_f64().unwrap();
            for l in 0..n {
                prod *= grams[l][t1.exps[l] as usize][t2.exps[l] as usize];
            }
            norm_sq += prod;
        }
    }
    let numeric = -norm_sq;
    let exact = coherent_objective(prob, counts)?.to_f64().unwrap();
    Ok((numeric - exact).abs())
}
