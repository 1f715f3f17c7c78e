//! Ground-truth generation for end-to-end validation: random exact points
//! of the observable polytope, and seeded synthetic trials whose true
//! average causal effect is known by construction.
//!
//! All randomness comes from ChaCha8 seeded explicitly, so every output is
//! reproducible from its seed alone. Random response distributions are
//! integer compositions over a fixed grid (default denominator 10^4), which
//! keeps every downstream computation in exact arithmetic.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::constraints::iv_pushforward;
use crate::iv::iv_model;
use crate::observed::IvDistribution;
use crate::rational::Rational;

/// Default composition grid denominator.
pub const DEFAULT_GRID: u64 = 10_000;

/// A sampled population: how many of the `n` units fall in each joint
/// response cell (`r_d` major), and how many were assigned to each arm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    pub cell_counts: [u64; 16],
    pub arm_counts: [u64; 2],
    pub n: u64,
    pub seed: u64,
}

/// A random exact point of the 16-cell response simplex: a uniform draw of
/// grid cut points, differenced into a composition of `grid`.
pub fn random_q(seed: u64, grid: u64) -> [Rational; 16] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cuts: Vec<u64> = (0..15).map(|_| rng.gen_range(0..=grid)).collect();
    cuts.sort_unstable();
    let mut parts = [0u64; 16];
    let mut previous = 0u64;
    for (part, &cut) in parts.iter_mut().zip(&cuts) {
        *part = cut - previous;
        previous = cut;
    }
    parts[15] = grid - previous;
    core::array::from_fn(|i| Rational::new(parts[i].into(), grid.into()))
}

/// The exact observable distribution induced by a ground-truth `q`:
/// feasible by construction.
pub fn pushforward_distribution(q: &[Rational; 16], p_z1: Rational) -> IvDistribution {
    IvDistribution::new(iv_pushforward(q), p_z1).expect("pushforward rows are distributions")
}

/// A random feasible observable distribution (image of a random `q`), with
/// a non-degenerate random assignment probability from the same grid.
pub fn random_feasible_p(seed: u64) -> IvDistribution {
    let q = random_q(seed, DEFAULT_GRID);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let p_z1 = Rational::new(
        rng.gen_range(1..DEFAULT_GRID).into(),
        DEFAULT_GRID.into(),
    );
    pushforward_distribution(&q, p_z1)
}

/// Uniform `BigUint` below `bound` by masked rejection; deterministic given
/// the generator state.
fn uniform_below(rng: &mut ChaCha8Rng, bound: &BigUint) -> BigUint {
    let bits = bound.bits();
    loop {
        let mut candidate = BigUint::zero();
        let mut remaining = bits;
        while remaining > 0 {
            let take = remaining.min(32);
            let chunk = rng.next_u32() & (((1u64 << take) - 1) as u32);
            candidate = (candidate << take) | BigUint::from(chunk);
            remaining -= take;
        }
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Exact categorical sampler over rational weights summing to one.
struct CategoricalSampler {
    denominator: BigUint,
    cumulative: Vec<BigUint>,
}

impl CategoricalSampler {
    fn new(weights: &[Rational]) -> Self {
        let mut denominator = BigUint::one();
        for w in weights {
            denominator = denominator.lcm(&w.denom().magnitude().clone());
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = BigUint::zero();
        for w in weights {
            let scaled = w.numer().magnitude() * (&denominator / w.denom().magnitude());
            acc += scaled;
            cumulative.push(acc.clone());
        }
        CategoricalSampler {
            denominator,
            cumulative,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u = uniform_below(rng, &self.denominator);
        self.cumulative
            .iter()
            .position(|c| u < *c)
            .expect("weights sum to the denominator")
    }
}

/// Outcome of a synthetic trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedTrial {
    pub empirical: IvDistribution,
    pub population: Population,
    pub true_ace: Rational,
}

/// Samples `n` units i.i.d. from `q`, assigns arms with probability `p_z1`,
/// evaluates treatment and outcome through the model's response tables, and
/// returns the empirical conditionals together with the exact true effect.
///
/// An arm that receives no units keeps its exact pushforward values, so the
/// result is always a well-formed distribution.
pub fn simulate_trial(
    q: &[Rational; 16],
    p_z1: &Rational,
    n: u64,
    seed: u64,
) -> SimulatedTrial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cell_sampler = CategoricalSampler::new(q);
    let one_minus = Rational::one() - p_z1;
    let arm_sampler = CategoricalSampler::new(&[one_minus, p_z1.clone()]);

    let model = iv_model();
    let d_table = model.response_table("d").expect("iv model");
    let y_table = model.response_table("y").expect("iv model");

    let mut cell_counts = [0u64; 16];
    let mut arm_counts = [0u64; 2];
    let mut outcome_counts = [[0u64; 4]; 2]; // [z][y * 2 + d]
    for _ in 0..n {
        let cell = cell_sampler.draw(&mut rng);
        let z = arm_sampler.draw(&mut rng);
        cell_counts[cell] += 1;
        arm_counts[z] += 1;
        let (r_d, r_y) = (cell / 4, cell % 4);
        let d = d_table.mapping(r_d, &[z]).expect("in range");
        let y = y_table.mapping(r_y, &[d]).expect("in range");
        outcome_counts[z][y * 2 + d] += 1;
    }

    let exact = iv_pushforward(q);
    let mut entries: [Rational; 8] = core::array::from_fn(|i| exact[i].clone());
    for z in 0..2 {
        if arm_counts[z] > 0 {
            for yd in 0..4 {
                entries[z * 4 + yd] =
                    Rational::new(outcome_counts[z][yd].into(), arm_counts[z].into());
            }
        }
    }
    let empirical =
        IvDistribution::new(entries, p_z1.clone()).expect("empirical arms sum to one");

    SimulatedTrial {
        empirical,
        population: Population {
            cell_counts,
            arm_counts,
            n,
            seed,
        },
        true_ace: crate::bounds::true_ace(q),
    }
}
