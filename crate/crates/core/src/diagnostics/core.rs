use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{arg, Result};
use crate::profile::{Candidate, Committee, Electorate, PreferenceProfile, ProfileView, SymmetricProfile};
use crate::score::{binomial, Score};
use crate::scoring::score_committee;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Blocking {
    pub candidate: Candidate,
    /// Weight of voters ranking the candidate above every committee member.
    pub support: Score,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoreReport {
    pub alpha: Score,
    pub k: usize,
    /// Total voter weight `n` (1 for symmetric profiles).
    pub total: Score,
    /// `α·n/k`; a candidate blocks when its support reaches it.
    pub threshold: Score,
    pub blocking: Vec<Blocking>,
    pub in_core: bool,
}

/// Support of every candidate outside the committee, exactly.
pub fn supporter_weights<E: Electorate + ?Sized>(
    profile: &E,
    committee: &Committee,
) -> Result<Vec<(Candidate, BigRational)>> {
    let m = profile.candidate_count();
    if committee.k() == 0 || committee.members().last().is_some_and(|&c| c >= m) {
        return arg("committee must be non-empty and within range");
    }
    Ok(match profile.view() {
        ProfileView::Explicit(p) => explicit_support(p, committee),
        ProfileView::Symmetric(sp) => symmetric_support(sp, committee),
    })
}

fn explicit_support(p: &PreferenceProfile, t: &Committee) -> Vec<(Candidate, BigRational)> {
    let mut sup = vec![0u64; p.m()];
    for (v, &w) in p.voters().iter().zip(p.weights()) {
        let best = t.members().iter().map(|&c| v.rank(c)).min().unwrap_or(u32::MAX);
        for r in 1..best {
            sup[v.at(r)] += w;
        }
    }
    (0..p.m()).filter(|&c| !t.contains(c)).map(|c| (c, BigRational::from_integer(sup[c].into()))).collect()
}

fn symmetric_support(sp: &SymmetricProfile, t: &Committee) -> Vec<(Candidate, BigRational)> {
    let m = sp.m() as u64;
    let f = sp.free_count() as u64;
    let (crit, td) = sp.split(t);
    let td = td as u64;
    let mut chosen = vec![false; sp.critical().len()];
    for i in crit {
        chosen[i] = true;
    }
    let mut crit_sup = vec![BigRational::zero(); sp.critical().len()];
    let mut dummy_sup = BigRational::zero();
    for g in sp.groups() {
        let cstar = g.ranks().iter().zip(&chosen).filter(|(_, &c)| c).map(|(&r, _)| r as u64).min().unwrap_or(m + 1);
        // free slots below a rank r: (r - 1) minus the critical ranks below r
        let free_below = |r: u64| (r - 1) - g.ranks().iter().filter(|&&x| (x as u64) < r).count() as u64;
        for (i, &r) in g.ranks().iter().enumerate() {
            let r = r as u64;
            if !chosen[i] && r < cstar {
                // every committee dummy lands in one of the free slots after r
                let after = f - free_below(r);
                let p = BigRational::new(binomial(after, td), binomial(f, td));
                crit_sup[i] += p * g.weight();
            }
        }
        if f > td {
            // the dummy sits at the i-th free slot (i ≤ L, below c*) and all committee
            // dummies after it: Σ_{i≤L} C(F−i, t) = C(F, t+1) − C(F−L, t+1)
            let l = free_below(cstar.min(m + 1));
            let num = binomial(f, td + 1) - binomial(f - l, td + 1);
            let den = BigInt::from(f) * binomial(f - 1, td);
            dummy_sup += BigRational::new(num, den) * g.weight();
        }
    }
    let mut out: Vec<(Candidate, BigRational)> = sp
        .critical()
        .iter()
        .enumerate()
        .filter(|(i, _)| !chosen[*i])
        .map(|(i, &c)| (c, crit_sup[i].clone()))
        .collect();
    out.extend(sp.dummies().iter().filter(|&&d| !t.contains(d)).map(|&d| (d, dummy_sup.clone())));
    out.sort_by_key(|x| x.0);
    out
}

fn total_weight<E: Electorate + ?Sized>(profile: &E) -> BigRational {
    match profile.view() {
        ProfileView::Explicit(p) => BigRational::from_integer(p.total_weight().into()),
        ProfileView::Symmetric(_) => BigRational::one(),
    }
}

/// Every candidate outside `committee` supported by at least `α·n/k` voters (compared exactly).
pub fn core_blocking<E: Electorate + ?Sized>(profile: &E, committee: &Committee, alpha: &BigRational) -> Result<CoreReport> {
    if *alpha <= BigRational::zero() {
        return arg("alpha must be positive");
    }
    let k = committee.k();
    let total = total_weight(profile);
    let threshold = alpha * &total / BigRational::from_integer(k.into());
    let blocking: Vec<Blocking> = supporter_weights(profile, committee)?
        .into_iter()
        .filter(|(_, s)| *s >= threshold)
        .map(|(candidate, s)| Blocking { candidate, support: Score::Exact(s) })
        .collect();
    Ok(CoreReport {
        alpha: Score::Exact(alpha.clone()),
        k,
        total: Score::Exact(total),
        threshold: Score::Exact(threshold),
        in_core: blocking.is_empty(),
        blocking,
    })
}

/// `k·max_support/n`: the committee is in the α-core exactly for α above this value.
pub fn min_core_alpha<E: Electorate + ?Sized>(profile: &E, committee: &Committee) -> Result<BigRational> {
    let max = supporter_weights(profile, committee)?.into_iter().map(|x| x.1).max().unwrap_or_else(BigRational::zero);
    Ok(max * BigRational::from_integer(committee.k().into()) / total_weight(profile))
}

/// Checks `score(T) ≤ α·(k+1)/k·(m+1)/(k+1)` for 1-Borda on a committee in the α-core.
/// The counting argument behind it gives `score ≤ 1 + α(m−k)/k`, which implies the
/// stated bound only for `α ≥ k/(k+1)`; smaller α is rejected.
pub fn verify_core_score_bound<E: Electorate + ?Sized>(profile: &E, committee: &Committee, alpha: &BigRational) -> Result<bool> {
    let k = committee.k() as i64;
    if *alpha < BigRational::new(k.into(), (k + 1).into()) {
        return arg(format!("alpha = {alpha} is below k/(k+1); the bound is not implied there"));
    }
    if !core_blocking(profile, committee, alpha)?.in_core {
        return arg("committee is not in the alpha-core");
    }
    let m = profile.candidate_count() as i64;
    let bound = alpha * BigRational::new((m + 1).into(), k.into());
    let score = score_committee(profile, committee, 1)?;
    Ok(score.cmp_tol(&Score::Exact(bound)).is_le())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{core_counterexample_k, gen_core_counterexample, gen_random, gen_sborda_bad};
    use crate::profile::Ranking;
    use crate::rules::brute_force_opt;
    use num_traits::FromPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn tops_committee_is_always_in_core() {
        let p = PreferenceProfile::from_orders(4, &[vec![0, 1, 2, 3], vec![2, 0, 1, 3]]).unwrap();
        let t = Committee::new([0, 2], 4).unwrap();
        let r = core_blocking(&p, &t, &q(1, 1000)).unwrap();
        assert!(r.in_core);
        assert_eq!(min_core_alpha(&p, &t).unwrap(), BigRational::zero());
    }

    #[test]
    fn single_voter_second_choice() {
        let p = PreferenceProfile::new(3, vec![Ranking::from_order(&[1, 0, 2]).unwrap()], None).unwrap();
        let t = Committee::new([0], 3).unwrap();
        let r = core_blocking(&p, &t, &q(1, 1)).unwrap();
        assert_eq!(r.blocking, vec![Blocking { candidate: 1, support: Score::from_int(1) }]);
        // threshold is compared with ≥: α·n/k = 1 exactly still blocks
        assert!(!r.in_core);
        assert!(core_blocking(&p, &t, &q(11, 10)).unwrap().in_core);
    }

    #[test]
    fn symmetric_support_matches_materialized() {
        for (sp, k) in [(gen_sborda_bad(8, 4, 2).unwrap(), 3), (gen_sborda_bad(9, 3, 3).unwrap(), 4)] {
            let p = sp.materialize().unwrap();
            let n = BigRational::from_u64(p.total_weight()).unwrap();
            for members in [vec![0, 5], vec![4, 6], vec![1, 2, 7], vec![0, 1, 2]] {
                let members: Vec<_> = members.into_iter().filter(|&c| c < sp.m()).take(k).collect();
                let t = Committee::new(members, sp.m()).unwrap();
                let a = supporter_weights(&sp, &t).unwrap();
                let b = supporter_weights(&p, &t).unwrap();
                assert_eq!(a.len(), b.len());
                for ((c1, s1), (c2, s2)) in a.iter().zip(&b) {
                    assert_eq!(c1, c2);
                    assert_eq!(s1.clone(), s2 / &n, "candidate {c1}");
                }
            }
        }
    }

    #[test]
    fn counterexample_committee_is_blocked_by_c1() {
        for m in [16, 25, 36] {
            let sp = gen_core_counterexample(m).unwrap();
            let k = core_counterexample_k(m);
            let t = Committee::new(std::iter::once(1).chain(sp.dummies()[..k - 1].iter().copied()), m).unwrap();
            let alpha = q(k as i64, 3);
            let r = core_blocking(&sp, &t, &alpha).unwrap();
            assert!(r.blocking.iter().any(|b| b.candidate == 0 && b.support == Score::ratio(1, 3)));
        }
    }

    #[test]
    fn score_bound_on_certified_committees() {
        for seed in 0..40 {
            let p = gen_random(7, 5, seed).unwrap();
            let (t, _) = brute_force_opt(&p, 3, 1).unwrap();
            let a = min_core_alpha(&p, &t).unwrap() + q(1, 100);
            let a = a.max(q(3, 4));
            assert!(verify_core_score_bound(&p, &t, &a).unwrap());
        }
        let p = gen_random(6, 3, 1).unwrap();
        let t = Committee::new([0, 1], 6).unwrap();
        assert!(verify_core_score_bound(&p, &t, &q(1, 2)).is_err());
    }

    #[test]
    fn blocking_shrinks_with_alpha() {
        let p = gen_random(6, 7, 3).unwrap();
        let t = Committee::new([0, 3], 6).unwrap();
        let mut prev = usize::MAX;
        for a in 1..8 {
            let n = core_blocking(&p, &t, &q(a, 4)).unwrap().blocking.len();
            assert!(n <= prev);
            prev = n;
        }
    }
}
