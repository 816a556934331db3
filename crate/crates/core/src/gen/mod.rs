//! Instance generators: random profiles and the adversarial constructions.

mod cover;
mod monotone;
mod spiral;

pub use cover::{gen_from_cover, CoverInstance, CoverOptions, CoverProfile};
pub use monotone::{gen_monotonicity_gap, score_blocks, MonotoneGap, DEFAULT_GAP_A, DEFAULT_GAP_B};
pub use spiral::{gen_spiral, SpiralInstance, SpiralParams};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{arg, Result};
use crate::profile::{permutations, Candidate, PreferenceProfile, Ranking, SymmetricProfile};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` independent uniformly random rankings.
pub fn gen_random(m: usize, n: usize, seed: u64) -> Result<PreferenceProfile> {
    if m == 0 || n == 0 {
        return arg("need m ≥ 1 and n ≥ 1");
    }
    let mut rng = rng(seed);
    let mut order: Vec<Candidate> = (0..m).collect();
    let voters = (0..n)
        .map(|_| {
            order.shuffle(&mut rng);
            Ranking::from_order(&order)
        })
        .collect::<Result<Vec<_>>>()?;
    PreferenceProfile::new(m, voters, None)
}

/// One voter per ranking of `m ≤ 8` candidates.
pub fn gen_all_permutations(m: usize) -> Result<PreferenceProfile> {
    if m == 0 || m > 8 {
        return arg(format!(
            "all-permutation profiles are materialized only for 1 ≤ m ≤ 8 (got {m}); use a SymmetricProfile"
        ));
    }
    PreferenceProfile::from_orders(m, &permutations(m))
}

/// Committee size used with the core counterexample: `⌊√m⌋ − 1`.
pub fn core_counterexample_k(m: usize) -> usize {
    (m as f64).sqrt().floor() as usize - 1
}

/// Two critical candidates `c1 = 0`, `c2 = 1` in three equal groups:
/// `c1` first and `c2` second; `c2` first and `c1` last; `c2` second-to-last and `c1` last.
pub fn gen_core_counterexample(m: usize) -> Result<SymmetricProfile> {
    if m < 9 {
        return arg(format!("core counterexample needs m ≥ 9, got {m}"));
    }
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let mu = m as u32;
    let groups = [(1, 2), (mu, 1), (mu, mu - 1)]
        .into_iter()
        .map(|(r1, r2)| (third.clone(), BTreeMap::from([(0usize, r1), (1usize, r2)])))
        .collect();
    SymmetricProfile::new(m, vec![0, 1], groups)
}

/// `k/s` groups; group `j` ranks criticals `i·(k/s) + j` at rank `i + 1` for `i < s`
/// and the other criticals in the bottom block, in id order.
pub fn gen_sborda_bad(m: usize, k: usize, s: usize) -> Result<SymmetricProfile> {
    if s == 0 || k == 0 || k % s != 0 {
        return arg(format!("need s | k, got k={k}, s={s}"));
    }
    if m <= k {
        return arg(format!("need m > k, got m={m}, k={k}"));
    }
    let groups_n = k / s;
    let w = BigRational::new(BigInt::one(), BigInt::from(groups_n));
    let bottom = (m - (k - s)) as u32 + 1;
    let groups = (0..groups_n)
        .map(|j| {
            let mut ranks = vec![0u32; k];
            for i in 0..s {
                ranks[i * groups_n + j] = i as u32 + 1;
            }
            let mut next = bottom;
            for r in ranks.iter_mut().filter(|r| **r == 0) {
                *r = next;
                next += 1;
            }
            (w.clone(), ranks)
        })
        .collect();
    SymmetricProfile::from_rank_table(m, (0..k).collect(), groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{brute_force_opt, greedy};
    use crate::score::Score;
    use crate::scoring::{expected_score_symmetric, rand_benchmark, score_s_borda};

    #[test]
    fn random_is_seeded() {
        assert_eq!(gen_random(6, 5, 7).unwrap(), gen_random(6, 5, 7).unwrap());
        assert_ne!(gen_random(6, 5, 7).unwrap(), gen_random(6, 5, 8).unwrap());
    }

    #[test]
    fn all_permutations_score_rand() {
        assert!(gen_all_permutations(9).is_err());
        let p = gen_all_permutations(4).unwrap();
        let (_, opt) = brute_force_opt(&p, 2, 2).unwrap();
        assert_eq!(opt, Score::from_int(5));
        assert_eq!(opt, rand_benchmark(4, 2, 2).unwrap());
    }

    #[test]
    fn core_counterexample_closed_forms() {
        // the minimum of d uniform draws from N consecutive ranks averages (N+1)/(d+1)
        for m in [16usize, 25, 36, 49] {
            let sp = gen_core_counterexample(m).unwrap();
            let k = core_counterexample_k(m) as i64;
            let mi = m as i64;
            let both = expected_score_symmetric(&sp, &[0, 1], k as usize - 2, 1).unwrap();
            assert_eq!(both, Score::ratio(2, 3) + Score::ratio(mi - 1, 3 * (k - 1)));
            let c1 = expected_score_symmetric(&sp, &[0], k as usize - 1, 1).unwrap();
            assert_eq!(c1, Score::ratio(2, 3) + Score::ratio(2 * (mi - 1), 3 * k));
            let c2 = expected_score_symmetric(&sp, &[1], k as usize - 1, 1).unwrap();
            assert_eq!(c2, Score::from_int(1) + Score::ratio(mi - 1, 3 * k));
            let none = expected_score_symmetric(&sp, &[], k as usize, 1).unwrap();
            assert_eq!(none, Score::from_int(1) + Score::ratio(mi - 1, k + 1));
            assert!(c2 < both && both < c1 && c1 < none);
            // the large-m form (m+1)/(3(k-1)) + 2/3 differs by 2/(3(k-1))
            let limit = Score::ratio(mi + 1, 3 * (k - 1)) + Score::ratio(2, 3);
            assert_eq!(limit - both, Score::ratio(2, 3 * (k - 1)));
        }
    }

    #[test]
    fn core_counterexample_small_sibling_materializes() {
        // m = 9 has seven dummies; drop to the closest sibling with six by hand.
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        let groups = [(1u32, 2u32), (8, 1), (8, 7)]
            .into_iter()
            .map(|(a, b)| (third.clone(), BTreeMap::from([(0usize, a), (1usize, b)])))
            .collect();
        let sp = SymmetricProfile::new(8, vec![0, 1], groups).unwrap();
        let p = sp.materialize().unwrap();
        for k in 1..=4 {
            let (t, tr) = greedy(&sp, k, 1).unwrap();
            assert_eq!(score_s_borda(&p, &t, 1).unwrap(), *tr.final_score().unwrap());
        }
    }

    #[test]
    fn sborda_bad_layout() {
        let sp = gen_sborda_bad(20, 4, 2).unwrap();
        assert_eq!(sp.groups().len(), 2);
        // group 0: c0 at 1, c2 at 2; group 1: c1 at 1, c3 at 2
        assert_eq!(sp.groups()[0].ranks(), &[1, 19, 2, 20]);
        assert_eq!(sp.groups()[1].ranks(), &[19, 1, 20, 2]);
        let all = expected_score_symmetric(&sp, &[0, 1, 2, 3], 0, 2).unwrap();
        assert_eq!(all, Score::from_int(3));
        assert!(gen_sborda_bad(20, 5, 2).is_err());
    }
}
