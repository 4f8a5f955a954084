//! Deterministic generators of random exact instances shared by the
//! integration suites. Unitaries are products of signed permutations,
//! unit-phase diagonals and Pythagorean plane rotations, so every generated
//! object is exactly unitary / trace preserving / normalized over the
//! Gaussian rationals.

use dioqc::{ratio, Channel, DensityMatrix, DioPolynomial, GaussianRational, RatMatrix, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::Rng;

pub fn rand_unitary(rng: &mut StdRng, d: usize) -> RatMatrix {
    let mut u = RatMatrix::identity(d);
    for _ in 0..5 {
        match rng.random_range(0..3) {
            0 => {
                let a = rng.random_range(0..d);
                let b = rng.random_range(0..d);
                if a != b {
                    let mut p = RatMatrix::identity(d);
                    p.set(a, a, GaussianRational::zero());
                    p.set(b, b, GaussianRational::zero());
                    p.set(a, b, GaussianRational::one());
                    p.set(b, a, GaussianRational::one());
                    u = u.mat_mul(&p).unwrap();
                }
            }
            1 => {
                let phases = [
                    GaussianRational::one(),
                    GaussianRational::from_int(-1),
                    GaussianRational::i(),
                    GaussianRational::from_parts(0, 1, -1, 1),
                ];
                let diag: Vec<GaussianRational> = (0..d)
                    .map(|_| phases[rng.random_range(0..4)].clone())
                    .collect();
                u = u.mat_mul(&RatMatrix::diag(&diag)).unwrap();
            }
            _ => {
                if d >= 2 {
                    let triples = [(3i64, 4i64, 5i64), (5, 12, 13), (8, 15, 17)];
                    let (a, b, c) = triples[rng.random_range(0..3)];
                    let mut i = rng.random_range(0..d);
                    let mut j = rng.random_range(0..d);
                    if i == j {
                        j = (i + 1) % d;
                    }
                    if i > j {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let mut g = RatMatrix::identity(d);
                    g.set(i, i, GaussianRational::from_parts(a, c, 0, 1));
                    g.set(j, j, GaussianRational::from_parts(a, c, 0, 1));
                    g.set(i, j, GaussianRational::from_parts(b, c, 0, 1));
                    g.set(j, i, GaussianRational::from_parts(-b, c, 0, 1));
                    u = u.mat_mul(&g).unwrap();
                }
            }
        }
    }
    u
}

pub fn rand_channel(rng: &mut StdRng, d: usize) -> Channel {
    match rng.random_range(0..4) {
        0 => Channel::unitary(rand_unitary(rng, d)).unwrap(),
        1 => {
            // Pythagorean mixture of two unitaries
            let k1 = rand_unitary(rng, d).scale_rat(&ratio(3, 5));
            let k2 = rand_unitary(rng, d).scale_rat(&ratio(4, 5));
            Channel::new(vec![k1, k2]).unwrap()
        }
        2 => {
            // basis-relabeling channel K_i = |e_f(i)><e_i|
            let kraus: Vec<RatMatrix> = (0..d)
                .map(|i| {
                    let mut k = RatMatrix::zeros(d, d);
                    k.set(rng.random_range(0..d), i, GaussianRational::one());
                    k
                })
                .collect();
            Channel::new(kraus).unwrap()
        }
        _ => {
            // reset to a random exact pure state
            let psi = rand_state_vector(rng, d);
            let kraus: Vec<RatMatrix> = (0..d)
                .map(|i| {
                    let mut e = vec![GaussianRational::zero(); d];
                    e[i] = GaussianRational::one();
                    RatMatrix::outer(&psi, &e)
                })
                .collect();
            Channel::new(kraus).unwrap()
        }
    }
}

pub fn rand_state_vector(rng: &mut StdRng, d: usize) -> Vec<GaussianRational> {
    let u = rand_unitary(rng, d);
    (0..d).map(|r| u.get(r, 0).clone()).collect()
}

pub fn rand_density(rng: &mut StdRng, d: usize) -> DensityMatrix {
    let u = rand_unitary(rng, d);
    let mut weights: Vec<Rational> = (0..d).map(|_| ratio(rng.random_range(0..4), 1)).collect();
    if weights.iter().all(|w| w == &ratio(0, 1)) {
        weights[0] = ratio(1, 1);
    }
    let total: Rational = weights.iter().sum();
    let diag: Vec<GaussianRational> = weights
        .iter()
        .map(|w| GaussianRational::from_rational(w / &total))
        .collect();
    let rho = u
        .mat_mul(&RatMatrix::diag(&diag))
        .unwrap()
        .mat_mul(&u.dagger())
        .unwrap();
    DensityMatrix::new(rho).unwrap()
}

pub fn rand_hermitian(rng: &mut StdRng, d: usize) -> RatMatrix {
    let b = rand_unitary(rng, d);
    let scale = GaussianRational::from_int(rng.random_range(1..3));
    let b = b.scale(&scale);
    &b + &b.dagger()
}

pub fn rand_dio(rng: &mut StdRng, nvars: usize, max_degree: u32) -> DioPolynomial {
    let n_terms = rng.random_range(1..4);
    let terms: Vec<(BigInt, Vec<u32>)> = (0..n_terms)
        .map(|_| {
            let exps: Vec<u32> = (0..nvars)
                .map(|_| rng.random_range(0..=max_degree))
                .collect();
            (BigInt::from(rng.random_range(-5..=5i64)), exps)
        })
        .collect();
    DioPolynomial::from_terms(nvars, terms)
}
