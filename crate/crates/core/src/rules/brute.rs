use num_bigint::BigInt;

use super::check_ksm;
use crate::error::{Error, Result};
use crate::profile::{Candidate, Committee, Electorate, PreferenceProfile, ProfileView, SymmetricProfile};
use crate::score::{binomial_u128, Numeric, Score};
use crate::scoring::{ratio_score, symmetric_total, weights_as};

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Exhaustive optimum; the lexicographically smallest committee wins ties.
pub fn brute_force_opt<E: Electorate + ?Sized>(profile: &E, k: usize, s: usize) -> Result<(Committee, Score)> {
    brute_force_opt_capped(profile, k, s, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_opt_capped<E: Electorate + ?Sized>(
    profile: &E,
    k: usize,
    s: usize,
    cap: u128,
) -> Result<(Committee, Score)> {
    check_ksm(k, s, profile.candidate_count())?;
    match profile.view() {
        ProfileView::Explicit(p) => {
            let required = binomial_u128(p.m() as u64, k as u64).unwrap_or(u128::MAX);
            if required > cap {
                return Err(Error::CapExceeded { required, cap });
            }
            Ok(brute_explicit(p, k, s))
        }
        ProfileView::Symmetric(p) => brute_symmetric(p, k, s, cap),
    }
}

struct Search<'a> {
    p: &'a PreferenceProfile,
    k: usize,
    s: usize,
    /// Per depth, per voter: the s smallest ranks so far (padded), sorted.
    tops: Vec<Vec<u32>>,
    stack: Vec<Candidate>,
    best: Option<(u128, Vec<Candidate>)>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, from: usize) {
        let n = self.p.voters().len();
        let s = self.s;
        if depth == self.k {
            let top = &self.tops[depth];
            let cost: u128 = (0..n)
                .map(|v| self.p.weights()[v] as u128 * top[v * s..(v + 1) * s].iter().map(|&r| r as u128).sum::<u128>())
                .sum();
            if self.best.as_ref().map_or(true, |(b, _)| cost < *b) {
                self.best = Some((cost, self.stack.clone()));
            }
            return;
        }
        let m = self.p.m();
        for c in from..=m - (self.k - depth) {
            let (lo, hi) = self.tops.split_at_mut(depth + 1);
            let (cur, next) = (&lo[depth], &mut hi[0]);
            next.copy_from_slice(cur);
            for (v, voter) in self.p.voters().iter().enumerate() {
                let slot = &mut next[v * s..(v + 1) * s];
                let r = voter.rank(c);
                if r < slot[s - 1] {
                    let mut i = s - 1;
                    while i > 0 && slot[i - 1] > r {
                        slot[i] = slot[i - 1];
                        i -= 1;
                    }
                    slot[i] = r;
                }
            }
            self.stack.push(c);
            self.run(depth + 1, c + 1);
            self.stack.pop();
        }
    }
}

fn brute_explicit(p: &PreferenceProfile, k: usize, s: usize) -> (Committee, Score) {
    let n = p.voters().len();
    let pad = p.m() as u32 + 1;
    let mut search = Search {
        p,
        k,
        s,
        tops: vec![vec![pad; n * s]; k + 1],
        stack: Vec::with_capacity(k),
        best: None,
    };
    search.run(0, 0);
    let (cost, members) = search.best.expect("at least one committee");
    (Committee::from_sorted_unchecked(members), ratio_score(cost, p.total_weight() as u128))
}

fn brute_symmetric(sp: &SymmetricProfile, k: usize, s: usize, cap: u128) -> Result<(Committee, Score)> {
    let kc = sp.critical().len();
    let free = sp.free_count();
    let required: u128 = (0..=k.min(kc))
        .filter(|&j| k - j <= free)
        .map(|j| binomial_u128(kc as u64, j as u64).unwrap_or(u128::MAX))
        .fold(0u128, |a, b| a.saturating_add(b));
    if required > cap {
        return Err(Error::CapExceeded { required, cap });
    }
    let (w, wd) = weights_as::<BigInt>(sp);
    let mut best: Option<(Score, Vec<Candidate>)> = None;
    let mut mask = vec![false; kc];
    let mut visit = |mask: &[bool]| {
        let j = mask.iter().filter(|&&x| x).count();
        if j > k || k - j > free {
            return;
        }
        let (n, d) = symmetric_total(sp, mask, k - j, s, &w, &wd);
        let score = BigInt::to_score(&n, &d);
        let mut members: Vec<Candidate> = sp
            .critical()
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask[i])
            .map(|(_, &c)| c)
            .chain(sp.dummies()[..k - j].iter().copied())
            .collect();
        members.sort_unstable();
        let better = match &best {
            None => true,
            Some((bs, bm)) => score < *bs || (score == *bs && members < *bm),
        };
        if better {
            best = Some((score, members));
        }
    };
    subsets(&mut mask, 0, k, &mut visit);
    let (score, members) = best.expect("at least one committee");
    Ok((Committee::from_sorted_unchecked(members), score))
}

fn subsets(mask: &mut Vec<bool>, i: usize, budget: usize, visit: &mut impl FnMut(&[bool])) {
    if i == mask.len() {
        visit(mask);
        return;
    }
    subsets(mask, i + 1, budget, visit);
    if budget > 0 {
        mask[i] = true;
        subsets(mask, i + 1, budget - 1, visit);
        mask[i] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::{score_s_borda, score_symmetric};
    use rand::{seq::SliceRandom, SeedableRng};

    #[test]
    fn one_voter_pair() {
        let p = PreferenceProfile::from_orders(4, &[vec![2, 0, 3, 1]]).unwrap();
        let (t, sc) = brute_force_opt(&p, 2, 1).unwrap();
        assert_eq!(t.members(), &[0, 2]);
        assert_eq!(sc, Score::from_int(1));
    }

    #[test]
    fn matches_plain_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let orders: Vec<Vec<usize>> = (0..6)
                .map(|_| {
                    let mut o: Vec<usize> = (0..7).collect();
                    o.shuffle(&mut rng);
                    o
                })
                .collect();
            let p = PreferenceProfile::from_orders(7, &orders).unwrap();
            let (t, sc) = brute_force_opt(&p, 3, 2).unwrap();
            let mut best: Option<(Score, Vec<usize>)> = None;
            for a in 0..7 {
                for b in a + 1..7 {
                    for c in b + 1..7 {
                        let cm = Committee::new([a, b, c], 7).unwrap();
                        let v = score_s_borda(&p, &cm, 2).unwrap();
                        if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                            best = Some((v, vec![a, b, c]));
                        }
                    }
                }
            }
            let (bv, bm) = best.unwrap();
            assert_eq!(sc, bv);
            assert_eq!(t.members(), &bm[..]);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let p = PreferenceProfile::from_orders(3, &[vec![0, 1, 2]]).unwrap();
        assert!(matches!(brute_force_opt_capped(&p, 1, 1, 2), Err(Error::CapExceeded { required: 3, cap: 2 })));
    }

    #[test]
    fn symmetric_matches_materialized() {
        use num_rational::BigRational;
        use std::collections::BTreeMap;
        let half = BigRational::new(1.into(), 2.into());
        let groups = vec![
            (half.clone(), BTreeMap::from([(0usize, 1u32), (1, 6)])),
            (half, BTreeMap::from([(0usize, 6u32), (1, 2)])),
        ];
        let sp = SymmetricProfile::new(6, vec![0, 1], groups).unwrap();
        let p = sp.materialize().unwrap();
        for k in 1..=4 {
            let (ts, a) = brute_force_opt(&sp, k, 1).unwrap();
            let (_, b) = brute_force_opt(&p, k, 1).unwrap();
            assert_eq!(a, b);
            assert_eq!(score_symmetric(&sp, &ts, 1).unwrap(), a);
        }
    }
}
