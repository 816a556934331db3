use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{check_ksm, Selection, SelectionTrace};
use crate::error::{arg, Result};
use crate::kernel::{sweep, sweep_multi, Kind, Walker};
use crate::profile::{Candidate, Committee, Electorate, PreferenceProfile, ProfileView, SymmetricProfile};
use crate::score::{binomial, binomial_u128, Arithmetic, Numeric, Score};
use crate::scoring::{rand_benchmark, weights_as};

/// Expected s-Borda score when the committee is `fixed` plus `k − |fixed|`
/// candidates drawn uniformly from the rest.
pub fn expected_completion_score<E: Electorate + ?Sized>(
    profile: &E,
    fixed: &[Candidate],
    k: usize,
    s: usize,
) -> Result<Score> {
    expected_completion_score_with(profile, fixed, k, s, Arithmetic::auto(profile.candidate_count()))
}

pub fn expected_completion_score_with<E: Electorate + ?Sized>(
    profile: &E,
    fixed: &[Candidate],
    k: usize,
    s: usize,
    mode: Arithmetic,
) -> Result<Score> {
    let m = profile.candidate_count();
    check_ksm(k, s, m)?;
    let fixed = Committee::new(fixed.iter().copied(), m)?;
    if fixed.k() > k {
        return arg(format!("{} fixed candidates exceed k={k}", fixed.k()));
    }
    Ok(match (profile.view(), mode) {
        (ProfileView::Explicit(p), Arithmetic::Exact) => completion_explicit::<BigInt>(p, &fixed, k, s),
        (ProfileView::Explicit(p), Arithmetic::Float) => completion_explicit::<f64>(p, &fixed, k, s),
        (ProfileView::Symmetric(p), mode) => {
            let (crit, d) = p.split(&fixed);
            let mut mask = vec![false; p.critical().len()];
            crit.iter().for_each(|&i| mask[i] = true);
            match mode {
                Arithmetic::Exact => completion_symmetric::<BigInt>(p, &mask, d, k - fixed.k(), s),
                Arithmetic::Float => completion_symmetric::<f64>(p, &mask, d, k - fixed.k(), s),
            }
        }
    })
}

fn completion_explicit<N: Numeric>(p: &PreferenceProfile, fixed: &Committee, k: usize, s: usize) -> Score {
    let m = p.m() as u32;
    let pool = (p.m() - fixed.k()) as u64;
    let draws = (k - fixed.k()) as u64;
    let mut num = N::zero();
    let mut scale = N::one();
    let mut marks = Vec::with_capacity(fixed.k());
    for (v, &w) in p.voters().iter().zip(p.weights()) {
        marks.clear();
        marks.extend(fixed.members().iter().map(|&c| (v.rank(c), Kind::Fixed)));
        marks.sort_unstable_by_key(|x| x.0);
        let sw = sweep::<N>(m, marks.iter().copied(), Kind::Pool, pool, draws, s as u32, false);
        num += &(sw.total * N::from_u64(w));
        scale = sw.scale;
    }
    N::to_score(&num, &(scale * N::from_u64(p.total_weight())))
}

/// Expected padded score on a symmetric profile: chosen criticals `mask`,
/// `dummies` chosen dummies, and `q` further candidates drawn uniformly from
/// the unchosen ones.
fn completion_symmetric<N: Numeric>(
    sp: &SymmetricProfile,
    mask: &[bool],
    dummies: usize,
    q: usize,
    s: usize,
) -> Score {
    let m = sp.m();
    let free = sp.free_count();
    let u = mask.iter().filter(|&&x| !x).count();
    let spare = free - dummies;
    let (weights, wden) = weights_as::<N>(sp);
    let all = binomial((u + spare) as u64, q as u64);
    let mut acc: Option<Score> = None;
    let jmin = q.saturating_sub(spare);
    let jmax = q.min(u);
    let mut class = vec![None; m + 1];
    for j in jmin..=jmax {
        let pj = BigRational::new(binomial(u as u64, j as u64) * binomial(spare as u64, (q - j) as u64), all.clone());
        let mut num = N::zero();
        let mut den = N::one();
        for (g, group) in sp.groups().iter().enumerate() {
            class.iter_mut().for_each(|c| *c = Some(Some(1)));
            class[0] = None;
            for &(r, ci) in group.marks() {
                class[r as usize] = Some(if mask[ci as usize] { None } else { Some(0) });
            }
            let (n, d) = sweep_multi::<N>(
                m as u32,
                &class,
                &[(u as u64, j as u64), (free as u64, (dummies + q - j) as u64)],
                s as u32,
            );
            num += &(n * &weights[g]);
            den = d;
        }
        let term = N::to_score(&num, &(den * &wden)).scale(&pj);
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    acc.expect("at least one feasible split")
}

/// At each step adds the candidate minimizing the expected score of a uniformly
/// random completion; ties go to the lowest id.
pub fn banzhaf<E: Electorate + ?Sized>(profile: &E, k: usize, s: usize) -> Result<Selection> {
    banzhaf_with(profile, k, s, Arithmetic::auto(profile.candidate_count()))
}

pub fn banzhaf_with<E: Electorate + ?Sized>(
    profile: &E,
    k: usize,
    s: usize,
    mode: Arithmetic,
) -> Result<Selection> {
    let m = profile.candidate_count();
    check_ksm(k, s, m)?;
    let start = rand_benchmark(m, k, s)?;
    Ok(match (profile.view(), mode) {
        (ProfileView::Explicit(p), Arithmetic::Exact) => {
            if fits_i128(p, k, s) {
                banzhaf_explicit::<i128>(p, k, s, start)
            } else {
                banzhaf_explicit::<BigInt>(p, k, s, start)
            }
        }
        (ProfileView::Explicit(p), Arithmetic::Float) => banzhaf_explicit::<f64>(p, k, s, start),
        (ProfileView::Symmetric(p), Arithmetic::Exact) => banzhaf_symmetric::<BigInt>(p, k, s, start),
        (ProfileView::Symmetric(p), Arithmetic::Float) => banzhaf_symmetric::<f64>(p, k, s, start),
    })
}

fn fits_i128(p: &PreferenceProfile, k: usize, s: usize) -> bool {
    let m = p.m() as u64;
    let Some(b) = (0..k as u64).filter_map(|j| binomial_u128(m - j - 1, k as u64 - j - 1)).max() else {
        return false;
    };
    let bound = (s as u128) * (m as u128 + 1) * (m as u128 + 1) * p.total_weight() as u128;
    b < 1 << 90 && bound < 1 << 30 && b.checked_mul(bound).is_some_and(|x| x < 1 << 125)
}

fn banzhaf_explicit<N: Numeric>(p: &PreferenceProfile, k: usize, s: usize, start: Score) -> Selection {
    let m = p.m();
    let si = s as i64;
    let mut chosen = vec![false; m];
    let mut trace = SelectionTrace::new("banzhaf", k, s);
    let mut prev = start;
    let mut num = vec![N::zero(); m];
    let mut a_pref = vec![N::zero(); m + 1];
    let mut b_val = vec![N::zero(); m + 2];
    for j in 0..k {
        let rest = (m - j) as u64;
        let q = (k - j - 1) as u64;
        num.iter_mut().for_each(|x| *x = N::zero());
        let mut scale = N::one();
        for (v, &w) in p.voters().iter().zip(p.weights()) {
            // A_t: candidate ranked at or below t; B_t: candidate ranked above t.
            let mut wa = Walker::<N>::new(rest - 1, q, s - 1);
            let mut wb = Walker::<N>::new(rest - 1, q, s - 1);
            scale = wa.scale().clone();
            let (mut f, mut pa) = (0i64, 0u64);
            let mut a_live = true;
            for t in 1..=m {
                let c = si - f;
                let at = if a_live && c > 0 { wa.e_term(c) } else { N::zero() };
                a_pref[t] = a_pref[t - 1].clone() + at;
                b_val[t] = if pa >= 1 && c > 1 { wb.e_term(c - 1) } else { N::zero() };
                if chosen[v.at(t as u32)] {
                    f += 1;
                } else {
                    if pa >= 1 {
                        wb.advance();
                    }
                    pa += 1;
                    if pa < rest {
                        wa.advance();
                    } else {
                        a_live = false;
                    }
                }
            }
            let wn = N::from_u64(w);
            let mut suf = N::zero();
            for t in (1..=m).rev() {
                let c = v.at(t as u32);
                if !chosen[c] {
                    num[c] += &((a_pref[t].clone() + suf.clone()) * &wn);
                }
                suf += &b_val[t];
            }
        }
        let mut best: Option<usize> = None;
        for c in (0..m).filter(|&c| !chosen[c]) {
            if best.map_or(true, |b| N::cmp_frac(&num[c], &scale, &num[b], &scale) == Ordering::Less) {
                best = Some(c);
            }
        }
        let best = best.expect("k ≤ m leaves a candidate");
        chosen[best] = true;
        let score = N::to_score(&num[best], &(scale * N::from_u64(p.total_weight())));
        trace.push(best, &prev, score.clone(), false);
        prev = score;
    }
    let members = (0..m).filter(|&c| chosen[c]).collect();
    (Committee::from_sorted_unchecked(members), trace)
}

fn banzhaf_symmetric<N: Numeric>(sp: &SymmetricProfile, k: usize, s: usize, start: Score) -> Selection {
    let mut mask = vec![false; sp.critical().len()];
    let mut dummies = 0usize;
    let mut trace = SelectionTrace::new("banzhaf", k, s);
    let mut prev = start;
    for j in 0..k {
        let q = k - j - 1;
        let mut best: Option<(Candidate, Score, bool)> = None;
        let mut consider = |id: Candidate, val: Score, dummy: bool| {
            if best.as_ref().map_or(true, |(bid, bv, _)| match val.cmp_tol(bv) {
                Ordering::Less => true,
                Ordering::Equal => id < *bid,
                Ordering::Greater => false,
            }) {
                best = Some((id, val, dummy));
            }
        };
        for (ci, &c) in sp.critical().iter().enumerate() {
            if !mask[ci] {
                mask[ci] = true;
                consider(c, completion_symmetric::<N>(sp, &mask, dummies, q, s), false);
                mask[ci] = false;
            }
        }
        if let Some(&rep) = sp.dummies().get(dummies) {
            consider(rep, completion_symmetric::<N>(sp, &mask, dummies + 1, q, s), true);
        }
        let (id, score, dummy) = best.expect("k ≤ m leaves a candidate");
        if dummy {
            dummies += 1;
        } else {
            mask[sp.critical_index(id).unwrap()] = true;
        }
        trace.push(id, &prev, score.clone(), dummy);
        prev = score;
    }
    let mut members: Vec<Candidate> = sp
        .critical()
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask[i])
        .map(|(_, &c)| c)
        .chain(sp.dummies()[..dummies].iter().copied())
        .collect();
    members.sort_unstable();
    (Committee::from_sorted_unchecked(members), trace)
}
