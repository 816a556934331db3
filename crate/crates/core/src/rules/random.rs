use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::check_ksm;
use crate::error::{arg, Result};
use crate::profile::{Committee, Electorate};
use crate::score::Score;
use crate::scoring::score_committee;

#[derive(Clone, Debug)]
pub struct RandomSummary {
    pub mean: f64,
    pub stddev: f64,
    pub best: Committee,
    pub best_score: Score,
}

/// Scores `trials` uniformly random committees drawn from a seeded stream.
pub fn random_committee<E: Electorate + ?Sized>(
    profile: &E,
    k: usize,
    s: usize,
    seed: u64,
    trials: usize,
) -> Result<RandomSummary> {
    let m = profile.candidate_count();
    check_ksm(k, s, m)?;
    if trials == 0 {
        return arg("trials must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sumsq) = (0f64, 0f64);
    let mut best: Option<(Score, Committee)> = None;
    for _ in 0..trials {
        let t = Committee::new(sample(&mut rng, m, k).into_iter(), m)?;
        let sc = score_committee(profile, &t, s)?;
        let x = sc.to_f64();
        sum += x;
        sumsq += x * x;
        if best.as_ref().map_or(true, |(b, _)| sc < *b) {
            best = Some((sc, t));
        }
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 { ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    let (best_score, best) = best.unwrap();
    Ok(RandomSummary { mean, stddev: var.sqrt(), best, best_score })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::PreferenceProfile;

    #[test]
    fn full_committee_is_deterministic_value() {
        let p = PreferenceProfile::from_orders(3, &[vec![1, 0, 2], vec![2, 1, 0]]).unwrap();
        let r = random_committee(&p, 3, 2, 1, 1).unwrap();
        assert_eq!(r.mean, 3.0);
        assert_eq!(r.best_score, Score::from_int(3));
    }

    #[test]
    fn seeded_reruns_agree() {
        let p = PreferenceProfile::from_orders(4, &[vec![1, 0, 2, 3], vec![2, 1, 3, 0]]).unwrap();
        let a = random_committee(&p, 2, 1, 42, 50).unwrap();
        let b = random_committee(&p, 2, 1, 42, 50).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.best, b.best);
    }
}
