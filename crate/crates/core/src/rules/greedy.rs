use std::cmp::Ordering;

use num_bigint::BigInt;

use super::{check_ksm, Selection, SelectionTrace};
use crate::error::Result;
use crate::kernel::{sweep, Kind};
use crate::profile::{Committee, Electorate, PreferenceProfile, ProfileView, SymmetricProfile};
use crate::score::{Arithmetic, Numeric, Score};
use crate::scoring::{ratio_score, weights_as};

/// Repeatedly adds the candidate giving the lowest s-Borda score; ties go to the lowest id.
pub fn greedy<E: Electorate + ?Sized>(profile: &E, k: usize, s: usize) -> Result<Selection> {
    greedy_with(profile, k, s, Arithmetic::auto(profile.candidate_count()))
}

/// Explicit profiles are always scored with exact integers; `mode` applies to symmetric ones.
pub fn greedy_with<E: Electorate + ?Sized>(
    profile: &E,
    k: usize,
    s: usize,
    mode: Arithmetic,
) -> Result<Selection> {
    check_ksm(k, s, profile.candidate_count())?;
    Ok(match profile.view() {
        ProfileView::Explicit(p) => greedy_explicit(p, k, s),
        ProfileView::Symmetric(p) => match mode {
            Arithmetic::Exact => greedy_symmetric::<BigInt>(p, k, s),
            Arithmetic::Float => greedy_symmetric::<f64>(p, k, s),
        },
    })
}

fn greedy_explicit(p: &PreferenceProfile, k: usize, s: usize) -> Selection {
    let m = p.m();
    let pad = m as u32 + 1;
    let total_w = p.total_weight() as u128;
    // Per voter: the s smallest chosen ranks, padded with m + 1, kept sorted.
    let mut tops: Vec<Vec<u32>> = vec![vec![pad; s]; p.voters().len()];
    let mut cost: u128 = total_w * (s as u128) * pad as u128;
    let mut chosen = vec![false; m];
    let mut gain = vec![0u128; m];
    let mut trace = SelectionTrace::new("greedy", k, s);
    let mut prev = ratio_score(cost, total_w);
    for _ in 0..k {
        gain.iter_mut().for_each(|g| *g = 0);
        for ((v, &w), top) in p.voters().iter().zip(p.weights()).zip(&tops) {
            let thr = top[s - 1];
            for r in 1..thr {
                let c = v.at(r);
                gain[c] += w as u128 * (thr - r) as u128;
            }
        }
        let best = (0..m)
            .filter(|&c| !chosen[c])
            .fold(None, |best: Option<usize>, c| match best {
                Some(b) if gain[b] >= gain[c] => Some(b),
                _ => Some(c),
            })
            .expect("k ≤ m leaves a candidate");
        chosen[best] = true;
        cost -= gain[best];
        for (v, top) in p.voters().iter().zip(tops.iter_mut()) {
            let r = v.rank(best);
            if r < top[s - 1] {
                top[s - 1] = r;
                top.sort_unstable();
            }
        }
        let score = ratio_score(cost, total_w);
        trace.push(best, &prev, score.clone(), false);
        prev = score;
    }
    let members = (0..m).filter(|&c| chosen[c]).collect();
    (Committee::from_sorted_unchecked(members), trace)
}

fn greedy_symmetric<N: Numeric>(sp: &SymmetricProfile, k: usize, s: usize) -> Selection {
    let m = sp.m() as u32;
    let ncrit = sp.critical().len();
    let pool = sp.free_count() as u64;
    let (weights, wden) = weights_as::<N>(sp);
    let mut chosen = vec![false; ncrit];
    let mut dummies = 0usize;
    let mut trace = SelectionTrace::new("greedy", k, s);
    let mut prev = Score::from_int((s as i64) * (m as i64 + 1));
    let mut gain = vec![N::zero(); ncrit];
    for _ in 0..k {
        gain.iter_mut().for_each(|g| *g = N::zero());
        let mut cur = N::zero();
        let mut scale = N::one();
        for (g, group) in sp.groups().iter().enumerate() {
            let marks = group.marks().iter().map(|&(r, ci)| {
                (r, if chosen[ci as usize] { Kind::Fixed } else { Kind::Other })
            });
            let sw = sweep::<N>(m, marks, Kind::Pool, pool, dummies as u64, s as u32, true);
            for (i, &(_, ci)) in group.marks().iter().enumerate().take(sw.cum.len()) {
                if !chosen[ci as usize] {
                    let t = sw.tail_after(i);
                    if t.is_positive() {
                        gain[ci as usize] += &(t * &weights[g]);
                    }
                }
            }
            cur += &(sw.total * &weights[g]);
            scale = sw.scale;
        }
        let den = scale * &wden;
        // Candidates in id order: criticals, and the lowest unchosen dummy as representative.
        let rep = sp.dummies().get(dummies).copied();
        let dummy_val = rep.map(|_| {
            let mut num = N::zero();
            let mut scale = N::one();
            for (g, group) in sp.groups().iter().enumerate() {
                let marks = group.marks().iter().map(|&(r, ci)| {
                    (r, if chosen[ci as usize] { Kind::Fixed } else { Kind::Other })
                });
                let sw = sweep::<N>(m, marks, Kind::Pool, pool, dummies as u64 + 1, s as u32, false);
                num += &(sw.total * &weights[g]);
                scale = sw.scale;
            }
            (num, scale * &wden)
        });
        let mut best: Option<(usize, N, N, bool)> = None;
        let mut consider = |id: usize, num: N, den: &N, dummy: bool| {
            let better = match &best {
                None => true,
                Some((bid, bn, bd, _)) => match N::cmp_frac(&num, den, bn, bd) {
                    Ordering::Less => true,
                    Ordering::Equal => id < *bid,
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((id, num, den.clone(), dummy));
            }
        };
        for (ci, &c) in sp.critical().iter().enumerate() {
            if !chosen[ci] {
                consider(c, cur.clone() - gain[ci].clone(), &den, false);
            }
        }
        if let (Some(id), Some((num, dden))) = (rep, dummy_val) {
            consider(id, num, &dden, true);
        }
        let (id, num, den, dummy) = best.expect("k ≤ m leaves a candidate");
        if dummy {
            dummies += 1;
        } else {
            chosen[sp.critical_index(id).unwrap()] = true;
        }
        let score = N::to_score(&num, &den);
        trace.push(id, &prev, score.clone(), dummy);
        prev = score;
    }
    let mut members: Vec<usize> = sp
        .critical()
        .iter()
        .enumerate()
        .filter(|&(i, _)| chosen[i])
        .map(|(_, &c)| c)
        .chain(sp.dummies()[..dummies].iter().copied())
        .collect();
    members.sort_unstable();
    (Committee::from_sorted_unchecked(members), trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::permutations;
    use crate::scoring::{score_s_borda, score_symmetric};
    use num_rational::BigRational;
    use std::collections::BTreeMap;

    #[test]
    fn two_voters_tie_goes_to_lowest_id() {
        let p = PreferenceProfile::from_orders(2, &[vec![0, 1], vec![1, 0]]).unwrap();
        let (t, trace) = greedy(&p, 1, 1).unwrap();
        assert_eq!(t.members(), &[0]);
        assert_eq!(trace.picks[0].score, Score::ratio(3, 2));
    }

    #[test]
    fn full_committee_scores_top_s() {
        let p = PreferenceProfile::from_orders(4, &permutations(4)[..7]).unwrap();
        for s in 1..=4 {
            let (t, trace) = greedy(&p, 4, s).unwrap();
            assert_eq!(t.k(), 4);
            assert_eq!(trace.final_score().unwrap(), &Score::from_int((s * (s + 1) / 2) as i64));
        }
    }

    /// Brute-force oracle: at each step try every candidate with `score_s_borda`.
    fn naive(p: &PreferenceProfile, k: usize, s: usize) -> Vec<usize> {
        let mut picked: Vec<usize> = Vec::new();
        for _ in 0..k {
            let mut best: Option<(BigRational, usize)> = None;
            for c in (0..p.m()).filter(|c| !picked.contains(c)) {
                let mut t = picked.clone();
                t.push(c);
                // pad by scoring with min(s, |t|) and adding the missing slots at m + 1
                let ss = s.min(t.len());
                let base = score_s_borda(p, &Committee::new(t, p.m()).unwrap(), ss).unwrap();
                let v = base.exact().unwrap() + BigRational::from_integer(((s - ss) * (p.m() + 1)).into());
                if best.as_ref().map_or(true, |(b, _)| &v < b) {
                    best = Some((v, c));
                }
            }
            picked.push(best.unwrap().1);
        }
        picked
    }

    #[test]
    fn matches_naive_greedy() {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let m = 7;
            let orders: Vec<Vec<usize>> = (0..5)
                .map(|_| {
                    let mut o: Vec<usize> = (0..m).collect();
                    o.shuffle(&mut rng);
                    o
                })
                .collect();
            let p = PreferenceProfile::from_orders(m, &orders).unwrap();
            for s in 1..=3 {
                let (_, trace) = greedy(&p, 5, s).unwrap();
                assert_eq!(trace.candidates(), naive(&p, 5, s));
                assert!(trace.is_non_increasing());
            }
        }
    }

    #[test]
    fn symmetric_matches_materialized_greedy() {
        let third = BigRational::new(1.into(), 3.into());
        let groups = vec![
            (third.clone(), BTreeMap::from([(0usize, 1u32), (1, 2)])),
            (third.clone(), BTreeMap::from([(0usize, 7u32), (1, 1)])),
            (third, BTreeMap::from([(0usize, 7u32), (1, 6)])),
        ];
        let sp = SymmetricProfile::new(7, vec![0, 1], groups).unwrap();
        let p = sp.materialize().unwrap();
        for s in 1..=2 {
            for k in s..=4 {
                let (ts, tr) = greedy(&sp, k, s).unwrap();
                let (te, _) = greedy(&p, k, s).unwrap();
                // Dummies are interchangeable, so compare scores and the critical part.
                let a = score_symmetric(&sp, &ts, s).unwrap();
                let b = score_s_borda(&p, &te, s).unwrap();
                assert_eq!(a, b, "k={k} s={s}");
                assert_eq!(tr.final_score().unwrap(), &a);
                let fl = greedy_with(&sp, k, s, Arithmetic::Float).unwrap();
                assert_eq!(fl.0, ts);
            }
        }
    }
}
