//! Exact-arithmetic digitized quantum control.
//!
//! Simulates Kraus-channel dynamics driven by integer control policies,
//! compiles control problems into equivalent Diophantine equations, compiles
//! Diophantine equations back into control problems through three encodings,
//! and cross-checks every equivalence with brute-force oracles at desk
//! scale. All channel and objective arithmetic is exact over Gaussian
//! rationals; floating point appears only in the truncated-Fock numeric
//! validator.

pub mod backward;
pub mod channels;
pub mod controllability;
pub mod dio;
pub mod error;
pub mod forward;
pub mod io;
pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod search;

pub use backward::{
    coherent_encoding, coherent_objective, damping_encoding, eval_at_matrices, fock_validate,
    kerr_example, pell_example, shift_encoding, shift_matrix, xi_matrix, BoundedEncoding,
    CoherentProblem, EncodingKind,
};
pub use channels::{
    apply_channel, expectation, objective_f, objective_j, propagate, state_transfer_observable,
    Channel, ControlProblem, DensityMatrix, Policy, PolicySet, Target,
};
pub use controllability::{
    epsilon_reach, is_controllable, lie_closure_dim, universal_reset, ControllabilityVerdict,
    GateSet, HamiltonianPair,
};
pub use dio::{
    enumerate_solutions, four_square, parse_dio, poly_eval, shift_arguments, DioPolynomial,
    Positivity,
};
pub use error::{Error, Result};
pub use forward::{
    accessibility_term, epsilon_equation, exact_equation, lagrange_interpolate, symbolic_f,
    symbolic_j, MatrixPolynomial, ReductionResult,
};
pub use matrix::RatMatrix;
pub use poly::{Polynomial, RatPolynomial};
pub use scalar::{parse_rational, parse_scalar, ratio, GaussianRational, Rational};
pub use search::{
    coherent_search, default_policy_length, grid_search, verify_equivalence, EquivalenceReport,
    Scheme, SearchReport,
};
