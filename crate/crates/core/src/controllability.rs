//! Lie-closure controllability test for coherent control, the universal
//! reset channel, and the rich-control-set demonstration with an exactly
//! unitary Gaussian-rational gate alphabet.

use num_traits::{One, Signed, Zero};

use crate::channels::{expectation, Channel, DensityMatrix};
use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::scalar::{ratio, GaussianRational, Rational};
use crate::search::SearchReport;

/// Dimension guard for the closure computation.
pub const MAX_LIE_DIM: usize = 6;

/// Free and interaction Hamiltonians, both Hermitian with one dimension.
#[derive(Clone, PartialEq, Debug)]
pub struct HamiltonianPair {
    h0: RatMatrix,
    v: RatMatrix,
}

impl HamiltonianPair {
    pub fn new(h0: RatMatrix, v: RatMatrix) -> Result<Self> {
        if !h0.is_hermitian() || !v.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        if h0.rows() != v.rows() {
            return Err(Error::DimensionMismatch(
                "Hamiltonians must share one dimension".into(),
            ));
        }
        Ok(Self { h0, v })
    }

    pub fn dim(&self) -> usize {
        self.h0.rows()
    }

    pub fn h0(&self) -> &RatMatrix {
        &self.h0
    }

    pub fn v(&self) -> &RatMatrix {
        &self.v
    }
}

/// Incremental exact row echelon over the rationals for span membership.
struct RationalSpan {
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl RationalSpan {
    fn new() -> Self {
        Self {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Reduce against the current rows; if a nonzero remainder survives,
    /// absorb it and report independence.
    fn insert(&mut self, mut v: Vec<Rational>) -> bool {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let factor = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &factor * y;
                    }
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                let inv = Rational::one() / v[pivot].clone();
                for x in &mut v {
                    if !x.is_zero() {
                        *x *= &inv;
                    }
                }
                self.rows.push(v);
                self.pivots.push(pivot);
                true
            }
            None => false,
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// A skew-Hermitian matrix as a real vector of 2 d^2 rational coordinates.
fn vectorize(m: &RatMatrix) -> Vec<Rational> {
    let mut out = Vec::with_capacity(2 * m.rows() * m.cols());
    for e in m.entries() {
        out.push(e.re.clone());
        out.push(e.im.clone());
    }
    out
}

fn traceless(m: &RatMatrix) -> RatMatrix {
    let d = m.rows();
    let t = m.trace().expect("square input");
    let shift = t.mul_rat(&ratio(-1, d as i64));
    let mut out = m.clone();
    for k in 0..d {
        out.set(k, k, out.get(k, k) + &shift);
    }
    out
}

fn commutator(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    &a.mat_mul(b).expect("square") - &b.mat_mul(a).expect("square")
}

/// Dimension of the real Lie algebra generated by i*H0 and i*V (traceless
/// parts) under commutators: iterated commutator closure with exact
/// rational rank tests, terminating when a pass adds no new direction.
pub fn lie_closure_dim(pair: &HamiltonianPair) -> Result<usize> {
    let d = pair.dim();
    if d > MAX_LIE_DIM {
        return Err(Error::Guard(format!(
            "Lie closure limited to dimension {MAX_LIE_DIM}, got {d}"
        )));
    }
    let i = GaussianRational::i();
    let seeds = [
        traceless(pair.h0()).scale(&i),
        traceless(pair.v()).scale(&i),
    ];
    let mut span = RationalSpan::new();
    let mut basis: Vec<RatMatrix> = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();
    for g in seeds {
        if !g.is_zero_matrix() && span.insert(vectorize(&g)) {
            basis.push(g);
            frontier.push(basis.len() - 1);
        }
    }
    while let Some(idx) = frontier.pop() {
        let mut new_members = Vec::new();
        for other in 0..basis.len() {
            if other == idx {
                continue;
            }
            let c = commutator(&basis[idx], &basis[other]);
            if !c.is_zero_matrix() && span.insert(vectorize(&c)) {
                new_members.push(c);
            }
        }
        for m in new_members {
            basis.push(m);
            frontier.push(basis.len() - 1);
        }
    }
    Ok(span.dim())
}

/// Outcome of the controllability criterion. The implemented isomorphism
/// test is dimension comparison against su(d) and, for even d, sp(d/2);
/// subalgebra type disambiguation beyond dimension is not performed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ControllabilityVerdict {
    pub closure_dim: usize,
    pub su_dim: usize,
    pub sp_dim: Option<usize>,
    pub matches_su: bool,
    pub matches_sp: bool,
    pub controllable: bool,
    pub note: &'static str,
}

pub fn is_controllable(pair: &HamiltonianPair) -> Result<ControllabilityVerdict> {
    let d = pair.dim();
    let closure_dim = lie_closure_dim(pair)?;
    let su_dim = d * d - 1;
    let sp_dim = d.is_multiple_of(2).then(|| d * (d + 1) / 2);
    let matches_su = closure_dim == su_dim;
    let matches_sp = sp_dim == Some(closure_dim);
    Ok(ControllabilityVerdict {
        closure_dim,
        su_dim,
        sp_dim,
        matches_su,
        matches_sp,
        controllable: matches_su || matches_sp,
        note: "dimension match is the implemented proxy for algebra isomorphism",
    })
}

/// The universally optimal reset: Kraus operators |psi><e_i| over the
/// standard basis map every density matrix to |psi><psi| exactly.
pub fn universal_reset(psi: &[GaussianRational]) -> Result<Channel> {
    let norm: Rational = psi.iter().map(GaussianRational::norm_sq).sum();
    if !norm.is_one() {
        return Err(Error::NotNormalized);
    }
    let d = psi.len();
    let kraus: Vec<RatMatrix> = (0..d)
        .map(|i| {
            let mut e = vec![GaussianRational::zero(); d];
            e[i] = GaussianRational::one();
            RatMatrix::outer(psi, &e)
        })
        .collect();
    Channel::new(kraus)
}

/// A finite alphabet of exactly unitary gates.
#[derive(Clone, PartialEq, Debug)]
pub struct GateSet {
    gates: Vec<RatMatrix>,
}

impl GateSet {
    pub fn new(gates: Vec<RatMatrix>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::Invalid("gate set may not be empty".into()));
        }
        if gates.iter().any(|g| !g.is_unitary()) {
            return Err(Error::NotUnitary);
        }
        Ok(Self { gates })
    }

    pub fn gates(&self) -> &[RatMatrix] {
        &self.gates
    }

    /// The default qubit alphabet: the Pythagorean rotation
    /// R = [[3/5, 4/5], [-4/5, 3/5]], its phased partner
    /// S = [[3/5, 4i/5], [4i/5, 3/5]], and both adjoints. Exactly unitary
    /// over Gaussian rationals; the rotation angle atan(4/3) is an
    /// irrational multiple of pi, so generated words fill the circle.
    pub fn default_qubit() -> Self {
        let r = RatMatrix::from_rows(vec![
            vec![
                GaussianRational::from_parts(3, 5, 0, 1),
                GaussianRational::from_parts(4, 5, 0, 1),
            ],
            vec![
                GaussianRational::from_parts(-4, 5, 0, 1),
                GaussianRational::from_parts(3, 5, 0, 1),
            ],
        ])
        .expect("rectangular");
        let s = RatMatrix::from_rows(vec![
            vec![
                GaussianRational::from_parts(3, 5, 0, 1),
                GaussianRational::from_parts(0, 1, 4, 5),
            ],
            vec![
                GaussianRational::from_parts(0, 1, 4, 5),
                GaussianRational::from_parts(3, 5, 0, 1),
            ],
        ])
        .expect("rectangular");
        Self::new(vec![r.clone(), r.dagger(), s.clone(), s.dagger()]).expect("exact unitaries")
    }
}

/// Bounded word search for the rich-control-set demonstration: policies of
/// the form (reset to psi, g_1, ..., g_k) with k <= maxlen, searched in
/// breadth-first order (shorter words first, gate index order within one
/// length). Returns the first policy whose objective lies strictly within
/// eps of j0.
///
/// Reported optimizer steps use 0 for the reset and 1 + gate index for
/// alphabet members. When no word succeeds the report carries the closest
/// objective value encountered, an empty optimizer list, and
/// `exhausted = true`.
pub fn epsilon_reach(
    gates: &GateSet,
    psi: &[GaussianRational],
    rho0: &DensityMatrix,
    observable: &RatMatrix,
    j0: &Rational,
    eps: &Rational,
    maxlen: usize,
) -> Result<SearchReport> {
    if !eps.is_positive() {
        return Err(Error::Invalid("epsilon must be positive".into()));
    }
    if !observable.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    if psi.len() != rho0.dim() || observable.rows() != rho0.dim() {
        return Err(Error::DimensionMismatch(
            "reset state, initial state and observable must share one dimension".into(),
        ));
    }
    let reset = universal_reset(psi)?;
    let start = reset.apply_matrix(rho0.mat())?;

    let mut evaluations = 0u64;
    let mut closest: Option<(Rational, Rational)> = None; // (distance, value)
    let mut check = |word: &[usize], rho: &RatMatrix| -> Result<Option<SearchReport>> {
        evaluations += 1;
        let j = expectation(observable, rho)?;
        let dist = (&j - j0).abs();
        if closest.as_ref().is_none_or(|(best, _)| dist < *best) {
            closest = Some((dist.clone(), j.clone()));
        }
        if dist < *eps {
            let mut steps = vec![0u64];
            steps.extend(word.iter().map(|&g| g as u64 + 1));
            return Ok(Some(SearchReport {
                optimal_value: j,
                optimizers: vec![steps],
                evaluations,
                exhausted: false,
            }));
        }
        Ok(None)
    };

    if let Some(found) = check(&[], &start)? {
        return Ok(found);
    }
    let mut level: Vec<(Vec<usize>, RatMatrix)> = vec![(Vec::new(), start)];
    for _ in 1..=maxlen {
        let mut next = Vec::with_capacity(level.len() * gates.gates.len());
        for (word, rho) in &level {
            for (g_idx, gate) in gates.gates.iter().enumerate() {
                let rho_next = gate.mat_mul(rho)?.mat_mul(&gate.dagger())?;
                let mut word_next = word.clone();
                word_next.push(g_idx);
                if let Some(found) = check(&word_next, &rho_next)? {
                    return Ok(found);
                }
                next.push((word_next, rho_next));
            }
        }
        level = next;
    }
    let (_, value) = closest.expect("at least the empty word was evaluated");
    Ok(SearchReport {
        optimal_value: value,
        optimizers: Vec::new(),
        evaluations,
        exhausted: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::apply_channel;

    fn sigma_z() -> RatMatrix {
        RatMatrix::from_int_rows(&[&[1, 0], &[0, -1]])
    }

    fn sigma_x() -> RatMatrix {
        RatMatrix::from_int_rows(&[&[0, 1], &[1, 0]])
    }

    #[test]
    fn closure_dim_examples() {
        let abelian = HamiltonianPair::new(sigma_z(), sigma_z()).unwrap();
        assert_eq!(lie_closure_dim(&abelian).unwrap(), 1);

        let qubit = HamiltonianPair::new(sigma_z(), sigma_x()).unwrap();
        assert_eq!(lie_closure_dim(&qubit).unwrap(), 3);

        let drift_free = HamiltonianPair::new(RatMatrix::zeros(2, 2), sigma_x()).unwrap();
        assert_eq!(lie_closure_dim(&drift_free).unwrap(), 1);
        let nothing = HamiltonianPair::new(RatMatrix::zeros(2, 2), RatMatrix::identity(2)).unwrap();
        assert_eq!(lie_closure_dim(&nothing).unwrap(), 0);
    }

    #[test]
    fn closure_rejects_bad_input() {
        assert!(
            HamiltonianPair::new(RatMatrix::from_int_rows(&[&[0, 1], &[0, 0]]), sigma_x()).is_err()
        );
        let big = RatMatrix::identity(7);
        let pair = HamiltonianPair::new(big.clone(), big).unwrap();
        assert!(matches!(lie_closure_dim(&pair), Err(Error::Guard(_))));
    }

    #[test]
    fn closure_dim_is_bounded_by_su() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..10 {
            let d = rng.random_range(2..=3);
            let mk = |rng: &mut StdRng| {
                let mut m = RatMatrix::zeros(d, d);
                for r in 0..d {
                    for c in 0..d {
                        m.set(
                            r,
                            c,
                            GaussianRational::from_parts(
                                rng.random_range(-2..=2),
                                1,
                                rng.random_range(-2..=2),
                                1,
                            ),
                        );
                    }
                }
                &m + &m.dagger()
            };
            let pair = HamiltonianPair::new(mk(&mut rng), mk(&mut rng)).unwrap();
            let dim = lie_closure_dim(&pair).unwrap();
            assert!(dim < d * d, "dim {dim} exceeds su({d})");
        }
    }

    #[test]
    fn verdict_examples() {
        let qubit = HamiltonianPair::new(sigma_z(), sigma_x()).unwrap();
        let v = is_controllable(&qubit).unwrap();
        assert_eq!(v.closure_dim, 3);
        assert_eq!(v.su_dim, 3);
        assert_eq!(v.sp_dim, Some(3)); // both branches coincide at d = 2
        assert!(v.controllable && v.matches_su && v.matches_sp);

        let abelian = HamiltonianPair::new(sigma_z(), sigma_z()).unwrap();
        let v = is_controllable(&abelian).unwrap();
        assert_eq!(v.closure_dim, 1);
        assert!(!v.controllable);
    }

    fn reset_state() -> Vec<GaussianRational> {
        vec![
            GaussianRational::from_parts(3, 5, 0, 1),
            GaussianRational::from_parts(0, 1, 4, 5),
        ]
    }

    #[test]
    fn universal_reset_maps_everything_to_psi() {
        let psi = reset_state();
        let reset = universal_reset(&psi).unwrap();
        let target = DensityMatrix::pure(&psi).unwrap();

        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(apply_channel(&reset, &mixed).unwrap(), target);

        // d = 3 with a basis reset state and a random-ish mixed input
        let e2 = vec![
            GaussianRational::zero(),
            GaussianRational::one(),
            GaussianRational::zero(),
        ];
        let reset3 = universal_reset(&e2).unwrap();
        let rho = DensityMatrix::new(RatMatrix::diag(&[
            GaussianRational::from_parts(1, 2, 0, 1),
            GaussianRational::from_parts(1, 3, 0, 1),
            GaussianRational::from_parts(1, 6, 0, 1),
        ]))
        .unwrap();
        assert_eq!(
            apply_channel(&reset3, &rho).unwrap(),
            DensityMatrix::basis(3, 1)
        );

        assert!(universal_reset(&[GaussianRational::from_int(2)]).is_err());
    }

    #[test]
    fn reset_is_history_independent() {
        let psi = reset_state();
        let reset = universal_reset(&psi).unwrap();
        let gates = GateSet::default_qubit();
        let mut rho = apply_channel(&reset, &DensityMatrix::basis(2, 0)).unwrap();
        for g in gates.gates() {
            let u = Channel::unitary(g.clone()).unwrap();
            rho = apply_channel(&u, &rho).unwrap();
        }
        let again = apply_channel(&reset, &rho).unwrap();
        assert_eq!(again, DensityMatrix::pure(&psi).unwrap());
    }

    fn e1() -> Vec<GaussianRational> {
        vec![GaussianRational::one(), GaussianRational::zero()]
    }

    #[test]
    fn epsilon_reach_empty_word() {
        let gates = GateSet::default_qubit();
        let obs = RatMatrix::diag(&[GaussianRational::zero(), GaussianRational::from_int(-1)]);
        let report = epsilon_reach(
            &gates,
            &e1(),
            &DensityMatrix::maximally_mixed(2),
            &obs,
            &ratio(0, 1),
            &ratio(1, 100),
            4,
        )
        .unwrap();
        assert_eq!(report.optimal_value, ratio(0, 1));
        assert_eq!(report.optimizers, vec![vec![0]]);
        assert_eq!(report.evaluations, 1);
    }

    #[test]
    fn epsilon_reach_single_rotation_is_exact() {
        let gates = GateSet::default_qubit();
        let obs = -&RatMatrix::basis_projector(2, 0);
        let report = epsilon_reach(
            &gates,
            &e1(),
            &DensityMatrix::basis(2, 1),
            &obs,
            &ratio(-9, 25),
            &ratio(1, 1000),
            4,
        )
        .unwrap();
        assert_eq!(report.optimal_value, ratio(-9, 25));
        assert_eq!(report.optimizers, vec![vec![0, 1]]);
    }

    #[test]
    fn epsilon_reach_half_within_twentieth() {
        let gates = GateSet::default_qubit();
        let obs = -&RatMatrix::basis_projector(2, 0);
        let report = epsilon_reach(
            &gates,
            &e1(),
            &DensityMatrix::basis(2, 0),
            &obs,
            &ratio(-1, 2),
            &ratio(1, 20),
            8,
        )
        .unwrap();
        assert_eq!(report.optimizers.len(), 1);
        assert!((&report.optimal_value - ratio(-1, 2)).abs() < ratio(1, 20));
        assert!(!report.exhausted);
    }

    #[test]
    fn epsilon_reach_reports_miss() {
        // J ranges over [-1, 0]; a target of 5 is unreachable
        let gates = GateSet::default_qubit();
        let obs = -&RatMatrix::basis_projector(2, 0);
        let report = epsilon_reach(
            &gates,
            &e1(),
            &DensityMatrix::basis(2, 0),
            &obs,
            &ratio(5, 1),
            &ratio(1, 4),
            2,
        )
        .unwrap();
        assert!(report.optimizers.is_empty());
        assert!(report.exhausted);
        assert_eq!(report.evaluations, 1 + 4 + 16);
    }

    #[test]
    fn default_gates_generate_many_states() {
        let gates = GateSet::default_qubit();
        for g in gates.gates() {
            assert!(g.is_unitary());
        }
        let mut seen = std::collections::BTreeSet::new();
        let start = RatMatrix::basis_projector(2, 0);
        let mut level = vec![start.clone()];
        let key = |m: &RatMatrix| format!("{m:?}");
        seen.insert(key(&start));
        for _ in 1..=5 {
            let mut next = Vec::new();
            for rho in &level {
                for g in gates.gates() {
                    let r = g.mat_mul(rho).unwrap().mat_mul(&g.dagger()).unwrap();
                    seen.insert(key(&r));
                    next.push(r);
                }
            }
            level = next;
        }
        assert!(seen.len() >= 20, "only {} distinct states", seen.len());
    }
}
