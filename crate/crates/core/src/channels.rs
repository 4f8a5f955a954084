//! Digitized quantum control semantics: Kraus channels, integer control
//! policies, and the two objective functions (observable expectation and
//! squared Hilbert-Schmidt distance to a target state).

use num_traits::One;

use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::scalar::{GaussianRational, Rational};

/// A completely positive trace-preserving map in operator-sum form.
/// Construction checks the exact certificate sum_j K_j^dagger K_j = I.
#[derive(Clone, PartialEq, Debug)]
pub struct Channel {
    kraus: Vec<RatMatrix>,
}

impl Channel {
    pub fn new(kraus: Vec<RatMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Invalid("channel needs at least one Kraus operator".into()))?;
        let d = first.rows();
        if kraus.iter().any(|k| k.rows() != d || k.cols() != d) {
            return Err(Error::DimensionMismatch(
                "all Kraus operators must be square with a common dimension".into(),
            ));
        }
        let mut sum = RatMatrix::zeros(d, d);
        for k in &kraus {
            sum = &sum + &k.dagger().mat_mul(k)?;
        }
        if !sum.is_identity() {
            return Err(Error::NotTracePreserving);
        }
        Ok(Self { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![RatMatrix::identity(dim)],
        }
    }

    /// Single-Kraus channel rho -> U rho U^dagger.
    pub fn unitary(u: RatMatrix) -> Result<Self> {
        if !u.is_unitary() {
            return Err(Error::NotUnitary);
        }
        Ok(Self { kraus: vec![u] })
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].rows()
    }

    pub fn kraus(&self) -> &[RatMatrix] {
        &self.kraus
    }

    /// Apply to a raw matrix: sum_j K_j M K_j^dagger.
    pub fn apply_matrix(&self, m: &RatMatrix) -> Result<RatMatrix> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "channel dimension {} does not match state dimension {}",
                self.dim(),
                m.rows()
            )));
        }
        let mut out = RatMatrix::zeros(m.rows(), m.cols());
        for k in &self.kraus {
            if k.is_zero_matrix() {
                continue;
            }
            out = &out + &k.mat_mul(m)?.mat_mul(&k.dagger())?;
        }
        Ok(out)
    }
}

/// Hermitian, trace-one, positive-semidefinite state. Validated exactly at
/// construction.
#[derive(Clone, PartialEq, Debug)]
pub struct DensityMatrix {
    mat: RatMatrix,
}

impl DensityMatrix {
    pub fn new(mat: RatMatrix) -> Result<Self> {
        if !mat.is_hermitian() {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let t = mat.trace()?;
        if !(t.is_real() && t.re.is_one()) {
            return Err(Error::InvalidDensity(format!("trace is {t}, not 1")));
        }
        if !mat.psd_check()? {
            return Err(Error::InvalidDensity("not positive semidefinite".into()));
        }
        Ok(Self { mat })
    }

    /// Wrap a matrix that is guaranteed valid by exact construction (output
    /// of a trace-preserving channel on a valid state). Full validation
    /// still runs in debug builds.
    pub(crate) fn trusted(mat: RatMatrix) -> Self {
        debug_assert!(DensityMatrix::new(mat.clone()).is_ok());
        Self { mat }
    }

    /// The pure state |e_k><e_k|.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self {
            mat: RatMatrix::basis_projector(dim, k),
        }
    }

    /// The pure state |psi><psi| for an exactly normalized vector.
    pub fn pure(psi: &[GaussianRational]) -> Result<Self> {
        let norm: Rational = psi.iter().map(GaussianRational::norm_sq).sum();
        if !norm.is_one() {
            return Err(Error::NotNormalized);
        }
        Ok(Self {
            mat: RatMatrix::outer(psi, psi),
        })
    }

    /// The maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let frac = GaussianRational::from_parts(1, dim as i64, 0, 1);
        Self {
            mat: RatMatrix::identity(dim).scale(&frac),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &RatMatrix {
        &self.mat
    }
}

/// An integer control sequence; step values index channels, applied
/// left-to-right in time.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Policy(pub Vec<usize>);

impl Policy {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn as_u64s(&self) -> Vec<u64> {
        self.0.iter().map(|&s| s as u64).collect()
    }
}

/// The finite set of accessible policies.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PolicySet {
    /// An explicit, duplicate-free list; all members share one length.
    Explicit(Vec<Policy>),
    /// The full Cartesian power `values^length`.
    Grid { values: Vec<usize>, length: usize },
}

impl PolicySet {
    pub fn explicit(policies: Vec<Policy>) -> Result<Self> {
        if policies.is_empty() {
            return Err(Error::Invalid(
                "explicit policy set may not be empty".into(),
            ));
        }
        let len = policies[0].len();
        if policies.iter().any(|p| p.len() != len) {
            return Err(Error::Invalid(
                "explicit policy set members must share one length".into(),
            ));
        }
        let mut sorted = policies.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("explicit policy set has duplicates".into()));
        }
        Ok(Self::Explicit(policies))
    }

    pub fn grid(values: Vec<usize>, length: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("grid policy set needs values".into()));
        }
        if length == 0 {
            return Err(Error::Invalid("grid policy length must be positive".into()));
        }
        let mut values = values;
        values.sort_unstable();
        values.dedup();
        Ok(Self::Grid { values, length })
    }

    /// Common policy length P.
    pub fn policy_length(&self) -> usize {
        match self {
            Self::Explicit(list) => list[0].len(),
            Self::Grid { length, .. } => *length,
        }
    }

    /// Number of policies, or None on overflow past u128.
    pub fn size(&self) -> Option<u128> {
        match self {
            Self::Explicit(list) => Some(list.len() as u128),
            Self::Grid { values, length } => {
                let mut n: u128 = 1;
                for _ in 0..*length {
                    n = n.checked_mul(values.len() as u128)?;
                }
                Some(n)
            }
        }
    }

    pub fn max_index(&self) -> usize {
        match self {
            Self::Explicit(list) => list
                .iter()
                .flat_map(|p| p.steps().iter().copied())
                .max()
                .unwrap_or(0),
            Self::Grid { values, .. } => *values.last().expect("nonempty"),
        }
    }

    pub fn contains(&self, policy: &Policy) -> bool {
        match self {
            Self::Explicit(list) => list.contains(policy),
            Self::Grid { values, length } => {
                policy.len() == *length && policy.steps().iter().all(|s| values.contains(s))
            }
        }
    }

    /// All policies in lexicographic order.
    pub fn iter_lex(&self) -> Vec<Policy> {
        match self {
            Self::Explicit(list) => {
                let mut sorted = list.clone();
                sorted.sort();
                sorted
            }
            Self::Grid { values, length } => {
                let mut out = Vec::new();
                let mut idx = vec![0usize; *length];
                if *length == 0 {
                    return vec![Policy(Vec::new())];
                }
                loop {
                    out.push(Policy(idx.iter().map(|&i| values[i]).collect()));
                    let mut k = *length;
                    loop {
                        if k == 0 {
                            return out;
                        }
                        k -= 1;
                        if idx[k] + 1 < values.len() {
                            idx[k] += 1;
                            for slot in &mut idx[k + 1..] {
                                *slot = 0;
                            }
                            break;
                        }
                    }
                }
            }
        }
    }
}

/// The target of a control problem.
#[derive(Clone, PartialEq, Debug)]
pub enum Target {
    /// Maximize Tr(O rho(p)); O must be Hermitian.
    Observable(RatMatrix),
    /// Minimize || rho(p) - rho_f ||^2 in the Hilbert-Schmidt norm.
    State(DensityMatrix),
}

/// Channels, an initial state, a target, and the accessible policy set.
#[derive(Clone, PartialEq, Debug)]
pub struct ControlProblem {
    channels: Vec<Channel>,
    rho0: DensityMatrix,
    target: Target,
    ap: PolicySet,
}

impl ControlProblem {
    pub fn new(
        channels: Vec<Channel>,
        rho0: DensityMatrix,
        target: Target,
        ap: PolicySet,
    ) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::Invalid("control problem needs channels".into()));
        }
        let d = rho0.dim();
        if channels.iter().any(|c| c.dim() != d) {
            return Err(Error::DimensionMismatch(
                "channel and state dimensions disagree".into(),
            ));
        }
        match &target {
            Target::Observable(o) => {
                if o.rows() != d {
                    return Err(Error::DimensionMismatch(
                        "observable dimension disagrees with state".into(),
                    ));
                }
                if !o.is_hermitian() {
                    return Err(Error::NotHermitian);
                }
            }
            Target::State(s) => {
                if s.dim() != d {
                    return Err(Error::DimensionMismatch(
                        "target state dimension disagrees with initial state".into(),
                    ));
                }
            }
        }
        let max = ap.max_index();
        if max >= channels.len() {
            return Err(Error::InvalidIndex {
                index: max,
                n: channels.len(),
            });
        }
        Ok(Self {
            channels,
            rho0,
            target,
            ap,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho0.dim()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn rho0(&self) -> &DensityMatrix {
        &self.rho0
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn ap(&self) -> &PolicySet {
        &self.ap
    }
}

/// Apply one channel to a state; the result is re-wrapped as a valid
/// density matrix (exact trace-preserving maps keep all invariants).
pub fn apply_channel(channel: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::trusted(channel.apply_matrix(rho.mat())?))
}

/// Propagate the initial state through the policy, step 1 first. The empty
/// policy returns rho0 unchanged.
pub fn propagate(prob: &ControlProblem, policy: &Policy) -> Result<DensityMatrix> {
    let mut rho = prob.rho0().mat().clone();
    for &step in policy.steps() {
        let channel = prob.channels.get(step).ok_or(Error::InvalidIndex {
            index: step,
            n: prob.channels.len(),
        })?;
        rho = channel.apply_matrix(&rho)?;
    }
    Ok(DensityMatrix::trusted(rho))
}

/// Expectation value of a Hermitian observable on a state: always exactly
/// real.
pub fn expectation(observable: &RatMatrix, rho: &RatMatrix) -> Result<Rational> {
    let t = observable.trace_product(rho)?;
    if !t.is_real() {
        return Err(Error::Invalid(format!(
            "expectation of a Hermitian observable must be real, got {t}"
        )));
    }
    Ok(t.re)
}

/// J(p) = Tr(O rho(p)) for an observable target.
pub fn objective_j(prob: &ControlProblem, policy: &Policy) -> Result<Rational> {
    let Target::Observable(o) = prob.target() else {
        return Err(Error::WrongTarget(
            "objective J needs an observable target".into(),
        ));
    };
    let rho = propagate(prob, policy)?;
    expectation(o, rho.mat())
}

/// F(p) = || rho(p) - rho_f ||^2 for a state target; zero exactly when the
/// propagated state equals the target.
pub fn objective_f(prob: &ControlProblem, policy: &Policy) -> Result<Rational> {
    let Target::State(rho_f) = prob.target() else {
        return Err(Error::WrongTarget(
            "objective F needs a state target".into(),
        ));
    };
    let rho = propagate(prob, policy)?;
    Ok((rho.mat() - rho_f.mat()).hs_norm_sq())
}

/// The pure-state-transfer observable |psi_f><psi_f| - I: its expectation is
/// at most zero, with zero attained exactly at psi_f.
pub fn state_transfer_observable(psi_f: &[GaussianRational]) -> Result<RatMatrix> {
    let norm: Rational = psi_f.iter().map(GaussianRational::norm_sq).sum();
    if !norm.is_one() {
        return Err(Error::NotNormalized);
    }
    Ok(&RatMatrix::outer(psi_f, psi_f) - &RatMatrix::identity(psi_f.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_traits::Zero;

    fn bit_flip(dim: usize) -> Channel {
        // only used with dim 2
        assert_eq!(dim, 2);
        Channel::unitary(RatMatrix::from_int_rows(&[&[0, 1], &[1, 0]])).unwrap()
    }

    #[test]
    fn channel_construction_checks_certificate() {
        let bad = RatMatrix::from_int_rows(&[&[1, 0], &[0, 2]]);
        assert!(matches!(
            Channel::new(vec![bad]),
            Err(Error::NotTracePreserving)
        ));
        // a valid two-operator mixture: (3/5 I, 4/5 X)
        let k1 = RatMatrix::identity(2).scale_rat(&ratio(3, 5));
        let k2 = RatMatrix::from_int_rows(&[&[0, 1], &[1, 0]]).scale_rat(&ratio(4, 5));
        assert!(Channel::new(vec![k1, k2]).is_ok());
    }

    #[test]
    fn apply_channel_examples() {
        let rho = DensityMatrix::basis(2, 0);
        let id = Channel::identity(2);
        assert_eq!(apply_channel(&id, &rho).unwrap(), rho);

        // X = 2 cyclic shift moves e1 to e2
        let shift = Channel::unitary(RatMatrix::from_int_rows(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(
            apply_channel(&shift, &rho).unwrap(),
            DensityMatrix::basis(2, 1)
        );

        // amplitude damping on X = 2 moves e2 down to e1
        let k1 = RatMatrix::from_int_rows(&[&[1, 0], &[0, 0]]);
        let k2 = RatMatrix::from_int_rows(&[&[0, 1], &[0, 0]]);
        let damp = Channel::new(vec![k1, k2]).unwrap();
        assert_eq!(
            apply_channel(&damp, &DensityMatrix::basis(2, 1)).unwrap(),
            DensityMatrix::basis(2, 0)
        );
    }

    fn qubit_problem(target: Target) -> ControlProblem {
        ControlProblem::new(
            vec![Channel::identity(2), bit_flip(2)],
            DensityMatrix::basis(2, 0),
            target,
            PolicySet::grid(vec![0, 1], 2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn propagate_examples() {
        let prob = qubit_problem(Target::Observable(
            RatMatrix::identity(2).scale_rat(&ratio(1, 2)),
        ));
        assert_eq!(
            propagate(&prob, &Policy(vec![])).unwrap(),
            DensityMatrix::basis(2, 0)
        );
        assert_eq!(
            propagate(&prob, &Policy(vec![0])).unwrap(),
            DensityMatrix::basis(2, 0)
        );
        assert!(propagate(&prob, &Policy(vec![7])).is_err());

        // two shift steps on the X = 3 cycle: e1 -> e3
        let shift3 = Channel::unitary(RatMatrix::from_int_rows(&[
            &[0, 0, 1],
            &[1, 0, 0],
            &[0, 1, 0],
        ]))
        .unwrap();
        let prob3 = ControlProblem::new(
            vec![Channel::identity(3), shift3],
            DensityMatrix::basis(3, 0),
            Target::Observable(RatMatrix::zeros(3, 3)),
            PolicySet::grid(vec![0, 1], 2).unwrap(),
        )
        .unwrap();
        assert_eq!(
            propagate(&prob3, &Policy(vec![1, 1])).unwrap(),
            DensityMatrix::basis(3, 2)
        );
    }

    #[test]
    fn objective_j_examples() {
        let half_identity = RatMatrix::identity(2).scale_rat(&ratio(1, 2));
        let prob = qubit_problem(Target::Observable(half_identity));
        for policy in prob.ap().iter_lex() {
            assert_eq!(objective_j(&prob, &policy).unwrap(), ratio(1, 2));
        }

        // shift encoding of D = x1 - 2 at X = 3: O = -diag(1, 0, 1)
        let o = RatMatrix::diag(&[
            GaussianRational::from_int(-1),
            GaussianRational::zero(),
            GaussianRational::from_int(-1),
        ]);
        let shift3 = Channel::unitary(RatMatrix::from_int_rows(&[
            &[0, 0, 1],
            &[1, 0, 0],
            &[0, 1, 0],
        ]))
        .unwrap();
        let prob = ControlProblem::new(
            vec![Channel::identity(3), shift3],
            DensityMatrix::basis(3, 0),
            Target::Observable(o),
            PolicySet::grid(vec![0, 1], 2).unwrap(),
        )
        .unwrap();
        assert_eq!(objective_j(&prob, &Policy(vec![])).unwrap(), ratio(-1, 1));
        assert_eq!(objective_j(&prob, &Policy(vec![1])).unwrap(), ratio(0, 1));
        assert!(objective_f(&prob, &Policy(vec![])).is_err());
    }

    #[test]
    fn objective_f_examples() {
        let same = ControlProblem::new(
            vec![Channel::identity(2)],
            DensityMatrix::basis(2, 0),
            Target::State(DensityMatrix::basis(2, 0)),
            PolicySet::grid(vec![0], 1).unwrap(),
        )
        .unwrap();
        assert_eq!(objective_f(&same, &Policy(vec![])).unwrap(), ratio(0, 1));

        let prob = qubit_problem(Target::State(DensityMatrix::basis(2, 1)));
        assert_eq!(
            objective_f(&prob, &Policy(vec![0, 0])).unwrap(),
            ratio(2, 1)
        );
        assert_eq!(
            objective_f(&prob, &Policy(vec![0, 1])).unwrap(),
            ratio(0, 1)
        );

        // pure state vs maximally mixed target under unitaries: F = 1/2
        let mixed = qubit_problem(Target::State(DensityMatrix::maximally_mixed(2)));
        for policy in mixed.ap().iter_lex() {
            assert_eq!(objective_f(&mixed, &policy).unwrap(), ratio(1, 2));
        }
    }

    #[test]
    fn state_transfer_observable_examples() {
        let e1 = vec![GaussianRational::one(), GaussianRational::zero()];
        let o = state_transfer_observable(&e1).unwrap();
        assert_eq!(
            o,
            RatMatrix::diag(&[GaussianRational::zero(), GaussianRational::from_int(-1)])
        );
        let rho_f = DensityMatrix::basis(2, 0);
        assert_eq!(expectation(&o, rho_f.mat()).unwrap(), ratio(0, 1));
        let orthogonal = DensityMatrix::basis(2, 1);
        assert_eq!(expectation(&o, orthogonal.mat()).unwrap(), ratio(-1, 1));

        let not_unit = vec![GaussianRational::from_int(2), GaussianRational::zero()];
        assert!(state_transfer_observable(&not_unit).is_err());
    }

    #[test]
    fn transfer_observable_peaks_exactly_at_target() {
        // J is never positive and vanishes exactly when the state is psi_f
        let psi_f = vec![
            GaussianRational::from_parts(3, 5, 0, 1),
            GaussianRational::from_parts(0, 1, 4, 5),
        ];
        let o = state_transfer_observable(&psi_f).unwrap();
        let target = DensityMatrix::pure(&psi_f).unwrap();
        let rotation = RatMatrix::from_rows(vec![
            vec![
                GaussianRational::from_parts(3, 5, 0, 1),
                GaussianRational::from_parts(4, 5, 0, 1),
            ],
            vec![
                GaussianRational::from_parts(-4, 5, 0, 1),
                GaussianRational::from_parts(3, 5, 0, 1),
            ],
        ])
        .unwrap();
        let mut rho = DensityMatrix::basis(2, 0);
        for _ in 0..8 {
            let j = expectation(&o, rho.mat()).unwrap();
            assert!(j <= ratio(0, 1));
            assert_eq!(j == ratio(0, 1), rho == target);
            rho = apply_channel(&Channel::unitary(rotation.clone()).unwrap(), &rho).unwrap();
        }
        assert_eq!(expectation(&o, target.mat()).unwrap(), ratio(0, 1));
    }

    #[test]
    fn policy_set_validation() {
        assert!(PolicySet::explicit(vec![]).is_err());
        assert!(PolicySet::explicit(vec![Policy(vec![0]), Policy(vec![0])]).is_err());
        assert!(PolicySet::explicit(vec![Policy(vec![0]), Policy(vec![0, 1])]).is_err());
        assert!(PolicySet::grid(vec![], 2).is_err());
        let g = PolicySet::grid(vec![1, 0, 1], 2).unwrap();
        assert_eq!(g.size(), Some(4));
        assert_eq!(
            g.iter_lex(),
            vec![
                Policy(vec![0, 0]),
                Policy(vec![0, 1]),
                Policy(vec![1, 0]),
                Policy(vec![1, 1])
            ]
        );
        assert!(g.contains(&Policy(vec![0, 1])));
        assert!(!g.contains(&Policy(vec![0, 2])));
    }

    #[test]
    fn problem_validation() {
        // observable must be Hermitian
        let bad_obs = RatMatrix::from_int_rows(&[&[0, 1], &[0, 0]]);
        assert!(ControlProblem::new(
            vec![Channel::identity(2)],
            DensityMatrix::basis(2, 0),
            Target::Observable(bad_obs),
            PolicySet::grid(vec![0], 1).unwrap(),
        )
        .is_err());
        // policy alphabet must stay in range
        assert!(ControlProblem::new(
            vec![Channel::identity(2)],
            DensityMatrix::basis(2, 0),
            Target::Observable(RatMatrix::zeros(2, 2)),
            PolicySet::grid(vec![0, 1], 1).unwrap(),
        )
        .is_err());
    }
}
