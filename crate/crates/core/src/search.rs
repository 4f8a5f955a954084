//! Brute-force oracles: exhaustive policy search over accessible sets,
//! bounded coherent-count search, and the double-enumeration equivalence
//! verifier.
//!
//! Searches are deterministic regardless of worker count: work is
//! partitioned by the first policy step (or by explicit-list chunks) and
//! partial results are merged in partition order, so the serialized report
//! is bit-identical for any `--jobs` value.

use num_traits::Zero;

use crate::backward::{
    damping_encoding, shift_encoding, BoundedEncoding, CoherentProblem, EncodingKind,
};
use crate::channels::{ControlProblem, Policy, PolicySet, Target};
use crate::dio::{enumerate_solutions, DioPolynomial, Positivity};
use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::scalar::Rational;

/// Refuse exhaustive searches past this many policies.
pub const MAX_SEARCH_BUDGET: u128 = 10_000_000;

/// Result of an exhaustive search. `optimal_value` is the exact extremum
/// of the objective over the declared set (maximum of J, minimum of F);
/// `optimizers` lists every argument achieving it, lexicographically
/// sorted; `exhausted` records whether the whole declared set was
/// enumerated.
#[derive(Clone, PartialEq, Debug)]
pub struct SearchReport {
    pub optimal_value: Rational,
    pub optimizers: Vec<Vec<u64>>,
    pub evaluations: u64,
    pub exhausted: bool,
}

impl SearchReport {
    /// Optimizers achieving an exactly zero objective (the optimum
    /// convention used by all encodings); empty when the extremum is not
    /// zero.
    pub fn zero_optimizers(&self) -> Vec<Vec<u64>> {
        if self.optimal_value.is_zero() {
            self.optimizers.clone()
        } else {
            Vec::new()
        }
    }
}

/// Whether larger or smaller objective values win.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    fn better(self, candidate: &Rational, incumbent: &Rational) -> bool {
        match self {
            Direction::Maximize => candidate > incumbent,
            Direction::Minimize => candidate < incumbent,
        }
    }
}

struct SubResult {
    best: Option<Rational>,
    optimizers: Vec<Vec<u64>>,
    evaluations: u64,
}

impl SubResult {
    fn new() -> Self {
        Self {
            best: None,
            optimizers: Vec::new(),
            evaluations: 0,
        }
    }

    fn record(&mut self, value: Rational, arg: Vec<u64>, dir: Direction) {
        self.evaluations += 1;
        match &self.best {
            Some(b) if dir.better(&value, b) => {
                self.best = Some(value);
                self.optimizers = vec![arg];
            }
            Some(b) if value == *b => self.optimizers.push(arg),
            Some(_) => {}
            None => {
                self.best = Some(value);
                self.optimizers = vec![arg];
            }
        }
    }

    /// Merge in partition order; `self` comes first, so concatenation
    /// preserves global enumeration order.
    fn merge(mut self, other: SubResult, dir: Direction) -> SubResult {
        self.evaluations += other.evaluations;
        match (&self.best, &other.best) {
            (None, _) => SubResult {
                evaluations: self.evaluations,
                ..other
            },
            (Some(_), None) => self,
            (Some(a), Some(b)) => {
                if dir.better(b, a) {
                    SubResult {
                        evaluations: self.evaluations,
                        ..other
                    }
                } else {
                    if a == b {
                        self.optimizers.extend(other.optimizers);
                    }
                    self
                }
            }
        }
    }
}

fn leaf_value(prob: &ControlProblem, rho: &RatMatrix) -> Result<Rational> {
    match prob.target() {
        Target::Observable(o) => crate::channels::expectation(o, rho),
        Target::State(rho_f) => Ok((rho - rho_f.mat()).hs_norm_sq()),
    }
}

/// Depth-first enumeration of grid suffixes, reusing the propagated state
/// along the path so each policy costs one channel application instead of
/// a full re-propagation.
fn dfs_grid(
    prob: &ControlProblem,
    values: &[usize],
    prefix: &mut Vec<u64>,
    rho: &RatMatrix,
    remaining: usize,
    dir: Direction,
    acc: &mut SubResult,
) -> Result<()> {
    if remaining == 0 {
        acc.record(leaf_value(prob, rho)?, prefix.clone(), dir);
        return Ok(());
    }
    for &v in values {
        let next = prob.channels()[v].apply_matrix(rho)?;
        prefix.push(v as u64);
        dfs_grid(prob, values, prefix, &next, remaining - 1, dir, acc)?;
        prefix.pop();
    }
    Ok(())
}

fn direction_for(prob: &ControlProblem) -> Direction {
    match prob.target() {
        Target::Observable(_) => Direction::Maximize,
        Target::State(_) => Direction::Minimize,
    }
}

/// Exhaustive exact search over the accessible policy set: the maximum of
/// J for observable targets, the minimum of F for state targets, with
/// every optimizer listed. `jobs` controls parallel workers without
/// affecting the result.
pub fn grid_search(prob: &ControlProblem, jobs: usize) -> Result<SearchReport> {
    let size = prob
        .ap()
        .size()
        .ok_or_else(|| Error::Guard("accessible policy set size overflows the budget".into()))?;
    if size > MAX_SEARCH_BUDGET {
        return Err(Error::Guard(format!(
            "accessible policy set has {size} policies, budget is {MAX_SEARCH_BUDGET}"
        )));
    }
    let dir = direction_for(prob);
    let jobs = jobs.max(1);

    // Partition tasks in enumeration order.
    let tasks: Vec<(Vec<u64>, RatMatrix, usize)> = match prob.ap() {
        PolicySet::Grid { values, length } => {
            let rho0 = prob.rho0().mat();
            if *length == 0 {
                vec![(Vec::new(), rho0.clone(), 0)]
            } else {
                values
                    .iter()
                    .map(|&v| {
                        let rho = prob.channels()[v].apply_matrix(rho0)?;
                        Ok((vec![v as u64], rho, length - 1))
                    })
                    .collect::<Result<_>>()?
            }
        }
        PolicySet::Explicit(_) => Vec::new(),
    };

    let run_task = |task: &(Vec<u64>, RatMatrix, usize)| -> Result<SubResult> {
        let mut acc = SubResult::new();
        let (prefix, rho, remaining) = task;
        let values = match prob.ap() {
            PolicySet::Grid { values, .. } => values.clone(),
            PolicySet::Explicit(_) => unreachable!("explicit sets use list tasks"),
        };
        let mut prefix = prefix.clone();
        dfs_grid(prob, &values, &mut prefix, rho, *remaining, dir, &mut acc)?;
        Ok(acc)
    };

    let merged = match prob.ap() {
        PolicySet::Grid { .. } => run_partitioned(&tasks, jobs, run_task, dir)?,
        PolicySet::Explicit(list) => {
            let mut sorted: Vec<Policy> = list.clone();
            sorted.sort();
            let chunk = sorted.len().div_ceil(jobs);
            let chunks: Vec<&[Policy]> = sorted.chunks(chunk.max(1)).collect();
            let run_chunk = |policies: &&[Policy]| -> Result<SubResult> {
                let mut acc = SubResult::new();
                for policy in policies.iter() {
                    let rho = crate::channels::propagate(prob, policy)?;
                    acc.record(leaf_value(prob, rho.mat())?, policy.as_u64s(), dir);
                }
                Ok(acc)
            };
            run_partitioned(&chunks, jobs, run_chunk, dir)?
        }
    };

    let best = merged
        .best
        .ok_or_else(|| Error::Invalid("accessible policy set is empty".into()))?;
    let mut optimizers = merged.optimizers;
    optimizers.sort();
    Ok(SearchReport {
        optimal_value: best,
        optimizers,
        evaluations: merged.evaluations,
        exhausted: true,
    })
}

/// Run tasks (already in enumeration order) on up to `jobs` workers and
/// merge results in task order.
fn run_partitioned<T: Sync>(
    tasks: &[T],
    jobs: usize,
    run: impl Fn(&T) -> Result<SubResult> + Sync,
    dir: Direction,
) -> Result<SubResult> {
    let results: Vec<Result<SubResult>> = if jobs <= 1 || tasks.len() <= 1 {
        tasks.iter().map(&run).collect()
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::with_capacity(tasks.len());
            for task in tasks {
                handles.push(scope.spawn(|| run(task)));
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        })
    };
    let mut merged = SubResult::new();
    for r in results {
        merged = merged.merge(r?, dir);
    }
    Ok(merged)
}

/// Count tuples with components in [0, bound], enumerated in graded
/// lexicographic order (total count first, then lex).
fn graded_tuples(n: usize, bound: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut all = Vec::new();
    let mut tuple = vec![0u64; n];
    loop {
        all.push(tuple.clone());
        let mut k = n;
        loop {
            if k == 0 {
                all.sort_by(|a, b| {
                    let sa: u64 = a.iter().sum();
                    let sb: u64 = b.iter().sum();
                    sa.cmp(&sb).then_with(|| a.cmp(b))
                });
                return all;
            }
            k -= 1;
            if tuple[k] < bound {
                tuple[k] += 1;
                for slot in &mut tuple[k + 1..] {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

/// Bounded sweep over coherent count tuples: maximizes J(c) = -D(c)^2 over
/// the box [0, bound]^n. The declared set of a coherent problem is all of
/// N^n (policies of arbitrary length), so `exhausted` is always false:
/// absence of a zero within the bound proves nothing.
pub fn coherent_search(prob: &CoherentProblem, bound: u64) -> Result<SearchReport> {
    let n = prob.dio.nvars();
    let mut size: u128 = 1;
    for _ in 0..n {
        size = size
            .checked_mul(bound as u128 + 1)
            .ok_or_else(|| Error::Guard("coherent search box overflows the budget".into()))?;
    }
    if size > MAX_SEARCH_BUDGET {
        return Err(Error::Guard(format!(
            "coherent search box has {size} tuples, budget is {MAX_SEARCH_BUDGET}"
        )));
    }
    let mut acc = SubResult::new();
    for tuple in graded_tuples(n, bound) {
        let value = crate::backward::coherent_objective(prob, &tuple)?;
        acc.record(value, tuple, Direction::Maximize);
    }
    let best = acc.best.expect("box is never empty");
    let mut optimizers = acc.optimizers;
    optimizers.sort();
    Ok(SearchReport {
        optimal_value: best,
        optimizers,
        evaluations: acc.evaluations,
        exhausted: false,
    })
}

/// Which encoding a verification run exercises.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Scheme {
    Shift,
    Damping,
    Coherent,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Shift => "shift",
            Scheme::Damping => "damping",
            Scheme::Coherent => "coherent",
        }
    }

    /// Solution positivity the scheme encodes: level registers count from
    /// one, coherent counts from zero.
    pub fn positivity(self) -> Positivity {
        match self {
            Scheme::Shift | Scheme::Damping => Positivity::Positive,
            Scheme::Coherent => Positivity::Nonnegative,
        }
    }
}

/// Outcome of a double enumeration: the tuple set decoded from exactly
/// optimal policies of the encoding against the brute-force Diophantine
/// oracle over the same box.
#[derive(Clone, PartialEq, Debug)]
pub struct EquivalenceReport {
    pub scheme: Scheme,
    pub bound: u64,
    pub equal: bool,
    pub decoded: Vec<Vec<u64>>,
    pub oracle: Vec<Vec<u64>>,
    pub evaluations: u64,
}

fn decoded_zero_tuples(enc: &BoundedEncoding, report: &SearchReport) -> Vec<Vec<u64>> {
    let mut decoded: Vec<Vec<u64>> = report
        .zero_optimizers()
        .iter()
        .filter_map(|steps| enc.decode_policy(&Policy(steps.iter().map(|&s| s as usize).collect())))
        .collect();
    decoded.sort();
    decoded.dedup();
    decoded
}

/// Default policy length for a bounded encoding: n*X steps reach every
/// tuple in the box (at least one step so the policy set is nonempty).
pub fn default_policy_length(d: &DioPolynomial, x: u64) -> usize {
    (d.nvars() * x as usize).max(1)
}

/// Verify that an encoding is faithful by double enumeration: decode the
/// exactly optimal policies of the encoded problem and compare with the
/// brute-force solution set of the polynomial over the same box.
pub fn verify_equivalence(
    d: &DioPolynomial,
    x: u64,
    scheme: Scheme,
    q: Option<usize>,
    jobs: usize,
) -> Result<EquivalenceReport> {
    let (decoded, evaluations) = match scheme {
        Scheme::Shift | Scheme::Damping => {
            let q = q.unwrap_or_else(|| default_policy_length(d, x));
            let enc = match scheme {
                Scheme::Shift => shift_encoding(d, x, q)?,
                Scheme::Damping => damping_encoding(d, x, q)?,
                Scheme::Coherent => unreachable!(),
            };
            debug_assert!(matches!(
                (scheme, enc.kind),
                (Scheme::Shift, EncodingKind::Shift) | (Scheme::Damping, EncodingKind::Damping)
            ));
            let report = grid_search(&enc.problem, jobs)?;
            (decoded_zero_tuples(&enc, &report), report.evaluations)
        }
        Scheme::Coherent => {
            let prob = crate::backward::coherent_encoding(d);
            let report = coherent_search(&prob, x)?;
            let mut zeros = report.zero_optimizers();
            zeros.sort();
            // coherent counts from zero; drop tuples outside the oracle box
            // when positivity is nonnegative they all stay
            (zeros, report.evaluations)
        }
    };
    let oracle = enumerate_solutions(d, x, scheme.positivity())?;
    Ok(EquivalenceReport {
        scheme,
        bound: x,
        equal: decoded == oracle,
        decoded,
        oracle,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::DensityMatrix;
    use crate::dio::parse_dio;
    use crate::scalar::ratio;

    #[test]
    fn grid_search_identity_only() {
        let prob = ControlProblem::new(
            vec![crate::channels::Channel::identity(2)],
            DensityMatrix::basis(2, 0),
            Target::Observable(RatMatrix::diag(&[
                crate::scalar::GaussianRational::from_int(-1),
                crate::scalar::GaussianRational::zero(),
            ])),
            PolicySet::grid(vec![0], 2).unwrap(),
        )
        .unwrap();
        let report = grid_search(&prob, 1).unwrap();
        assert_eq!(report.optimal_value, ratio(-1, 1));
        assert_eq!(report.optimizers, vec![vec![0, 0]]);
        assert_eq!(report.evaluations, 1);
        assert!(report.exhausted);
    }

    #[test]
    fn grid_search_small_shift_instance() {
        let d = parse_dio("x1 - 2").unwrap();
        let enc = shift_encoding(&d, 3, 3).unwrap();
        let report = grid_search(&enc.problem, 1).unwrap();
        assert_eq!(report.optimal_value, ratio(0, 1));
        // exactly the policies applying channel 1 once
        assert_eq!(
            report.optimizers,
            vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]
        );
        assert_eq!(report.evaluations, 8);
        let decoded = decoded_zero_tuples(&enc, &report);
        assert_eq!(decoded, vec![vec![2]]);
    }

    #[test]
    fn grid_search_pell_with_nonnegative_offset() {
        // the shift register counts from one; searching for nonnegative
        // solutions of the Pell form means encoding the argument-shifted
        // polynomial and subtracting the offset from decoded tuples
        let pell = parse_dio("x1^2 - 4*x2^2 - 1").unwrap();
        let shifted = crate::dio::shift_arguments(&pell, -1);
        let enc = shift_encoding(&shifted, 3, 4).unwrap();
        let report = grid_search(&enc.problem, 1).unwrap();
        assert_eq!(report.optimal_value, ratio(0, 1));
        let mut decoded: Vec<Vec<u64>> = report
            .zero_optimizers()
            .iter()
            .filter_map(|steps| {
                enc.decode_policy(&Policy(steps.iter().map(|&s| s as usize).collect()))
            })
            .map(|tuple| tuple.iter().map(|&x| x - 1).collect())
            .collect();
        decoded.sort();
        decoded.dedup();
        assert_eq!(decoded, vec![vec![1, 0]]);
    }

    #[test]
    fn grid_search_explicit_set() {
        let d = parse_dio("x1 - 2").unwrap();
        let enc = shift_encoding(&d, 3, 2).unwrap();
        let prob = ControlProblem::new(
            enc.problem.channels().to_vec(),
            enc.problem.rho0().clone(),
            enc.problem.target().clone(),
            PolicySet::explicit(vec![
                Policy(vec![1, 1]),
                Policy(vec![0, 1]),
                Policy(vec![0, 0]),
            ])
            .unwrap(),
        )
        .unwrap();
        let report = grid_search(&prob, 1).unwrap();
        assert_eq!(report.optimal_value, ratio(0, 1));
        assert_eq!(report.optimizers, vec![vec![0, 1]]);
        assert_eq!(report.evaluations, 3);
    }

    #[test]
    fn workers_do_not_change_reports() {
        let d = parse_dio("x1^2 + x2 - 5").unwrap();
        let enc = shift_encoding(&d, 3, 4).unwrap();
        let base = grid_search(&enc.problem, 1).unwrap();
        for jobs in [2, 4] {
            assert_eq!(grid_search(&enc.problem, jobs).unwrap(), base);
        }
    }

    #[test]
    fn optimizers_reevaluate_to_reported_value() {
        let d = parse_dio("x1^2 + x2 - 5").unwrap();
        let enc = shift_encoding(&d, 3, 4).unwrap();
        let report = grid_search(&enc.problem, 2).unwrap();
        for steps in &report.optimizers {
            let policy = Policy(steps.iter().map(|&s| s as usize).collect());
            assert_eq!(
                crate::channels::objective_j(&enc.problem, &policy).unwrap(),
                report.optimal_value
            );
        }
    }

    #[test]
    fn coherent_search_cases() {
        let d = parse_dio("x1 - 2").unwrap();
        let report = coherent_search(&crate::backward::coherent_encoding(&d), 5).unwrap();
        assert_eq!(report.optimal_value, ratio(0, 1));
        assert_eq!(report.optimizers, vec![vec![2]]);
        assert!(!report.exhausted);
        assert_eq!(report.evaluations, 6);

        let kerr = crate::backward::kerr_example(1, 1, 5).unwrap();
        let report = coherent_search(&kerr, 5).unwrap();
        assert_eq!(report.optimal_value, ratio(0, 1));
        // positive filter drops the boundary tuple (0, 5)
        let positive: Vec<Vec<u64>> = report
            .zero_optimizers()
            .into_iter()
            .filter(|t| t.iter().all(|&c| c > 0))
            .collect();
        assert_eq!(positive, vec![vec![1, 4], vec![2, 1]]);
        assert_eq!(report.optimizers, vec![vec![0, 5], vec![1, 4], vec![2, 1]]);

        let one = parse_dio("1").unwrap();
        let report = coherent_search(&crate::backward::coherent_encoding(&one), 5).unwrap();
        assert_eq!(report.optimal_value, ratio(-1, 1));
        assert!(report.zero_optimizers().is_empty());
    }

    #[test]
    fn graded_order_is_total_count_then_lex() {
        let tuples = graded_tuples(2, 2);
        assert_eq!(
            tuples,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 0],
                vec![1, 2],
                vec![2, 1],
                vec![2, 2],
            ]
        );
    }

    #[test]
    fn verify_equivalence_examples() {
        let np5 = parse_dio("x1^2 + x2 - 5").unwrap();
        let r = verify_equivalence(&np5, 4, Scheme::Shift, None, 2).unwrap();
        assert!(r.equal);
        assert_eq!(r.decoded, vec![vec![1, 4], vec![2, 1]]);

        let pell = parse_dio("x1^2 - 4*x2^2 - 1").unwrap();
        let r = verify_equivalence(&pell, 6, Scheme::Coherent, None, 1).unwrap();
        assert!(r.equal);
        assert_eq!(r.decoded, vec![vec![1, 0]]);

        let one = parse_dio("1").unwrap();
        let r = verify_equivalence(&one, 3, Scheme::Damping, None, 1).unwrap();
        assert!(r.equal);
        assert!(r.decoded.is_empty());
        assert!(r.oracle.is_empty());
    }

    #[test]
    fn search_budget_guard() {
        let d = parse_dio("x1 + x2 - 3").unwrap();
        let enc = shift_encoding(&d, 3, 3).unwrap();
        let huge = ControlProblem::new(
            enc.problem.channels().to_vec(),
            enc.problem.rho0().clone(),
            enc.problem.target().clone(),
            PolicySet::grid(vec![0, 1, 2], 20).unwrap(),
        )
        .unwrap();
        assert!(matches!(grid_search(&huge, 1), Err(Error::Guard(_))));
    }
}
