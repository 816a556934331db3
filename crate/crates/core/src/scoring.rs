//! s-Borda and satisfaction scores, the random-committee benchmark and the
//! order-statistic expectations built on the hypergeometric kernel.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{arg, Result};
use crate::kernel::{sweep, Kind};
use crate::profile::{Candidate, Committee, PreferenceProfile, SymmetricProfile};
use crate::score::{Arithmetic, Numeric, Score};

fn check_s(s: usize, k: usize) -> Result<()> {
    if s == 0 || s > k {
        return arg(format!("need 1 ≤ s ≤ k, got s={s}, k={k}"));
    }
    Ok(())
}

fn check_committee(m: usize, committee: &Committee) -> Result<()> {
    if committee.k() > m || committee.members().last().is_some_and(|&c| c >= m) {
        return arg("committee does not fit the profile");
    }
    Ok(())
}

/// Sum of the `s` smallest ranks of `committee` for one voter, padding with `m + 1`.
pub(crate) fn voter_cost(ranks: &[u32], committee: &[Candidate], s: usize, buf: &mut Vec<u32>) -> u64 {
    buf.clear();
    buf.extend(committee.iter().map(|&c| ranks[c]));
    let pad = ranks.len() as u64 + 1;
    if buf.len() > s {
        buf.select_nth_unstable(s - 1);
    }
    let taken: u64 = buf.iter().take(s).map(|&r| r as u64).sum();
    taken + pad * (s.saturating_sub(buf.len())) as u64
}

/// Weighted cost numerator `Σ_v w_v · cost_v(T)`; divide by the total weight for the score.
pub(crate) fn weighted_cost(profile: &PreferenceProfile, committee: &[Candidate], s: usize) -> u128 {
    let mut buf = Vec::with_capacity(committee.len());
    profile
        .voters()
        .iter()
        .zip(profile.weights())
        .map(|(v, &w)| w as u128 * voter_cost(v.ranks(), committee, s, &mut buf) as u128)
        .sum()
}

pub(crate) fn ratio_score(num: u128, den: u128) -> Score {
    Score::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// `(1/n) · Σ_v w_v · (sum of the s smallest ranks of the committee)`.
pub fn score_s_borda(profile: &PreferenceProfile, committee: &Committee, s: usize) -> Result<Score> {
    check_committee(profile.m(), committee)?;
    check_s(s, committee.k())?;
    Ok(ratio_score(
        weighted_cost(profile, committee.members(), s),
        profile.total_weight() as u128,
    ))
}

/// `s·(m+1) − score_s_borda`.
pub fn score_satisfaction(profile: &PreferenceProfile, committee: &Committee, s: usize) -> Result<Score> {
    let cost = score_s_borda(profile, committee, s)?;
    Ok(Score::from_int((s * (profile.m() + 1)) as i64) - cost)
}

/// `s(s+1)/2 · (m+1)/(k+1)`, the expected score of a uniformly random committee.
pub fn rand_benchmark(m: usize, k: usize, s: usize) -> Result<Score> {
    if k > m {
        return arg(format!("k={k} exceeds m={m}"));
    }
    check_s(s, k)?;
    Ok(Score::ratio((s * (s + 1) / 2 * (m + 1)) as i64, (k + 1) as i64))
}

/// `t·(m+1)/(k+1)`, the expected t-th smallest rank of a random k-subset of `1..=m`.
pub fn expected_order_stat(m: usize, k: usize, t: usize) -> Result<Score> {
    if t == 0 || t > k || k > m {
        return arg(format!("need 1 ≤ t ≤ k ≤ m, got t={t}, k={k}, m={m}"));
    }
    Ok(Score::ratio((t * (m + 1)) as i64, (k + 1) as i64))
}

/// Expected sum of the `s` smallest ranks of `fixed ∪ D`, with `D` a uniform
/// `draws`-subset of `pool`.
pub fn expected_order_stat_sum(fixed: &[u32], pool: &[u32], draws: usize, s: usize) -> Result<Score> {
    if draws > pool.len() {
        return arg(format!("draws={draws} exceeds pool size {}", pool.len()));
    }
    if s == 0 || fixed.len() + draws < s {
        return arg(format!("{} fixed + {draws} drawn ranks cannot supply s={s}", fixed.len()));
    }
    let mut marks: Vec<(u32, Kind)> = fixed
        .iter()
        .map(|&r| (r, Kind::Fixed))
        .chain(pool.iter().map(|&r| (r, Kind::Pool)))
        .collect();
    marks.sort_unstable_by_key(|x| x.0);
    if marks.first().is_some_and(|x| x.0 == 0) || marks.windows(2).any(|w| w[0].0 == w[1].0) {
        return arg("ranks must be positive and distinct across fixed and pool");
    }
    let m = marks.last().map_or(0, |x| x.0);
    let sw = sweep::<BigInt>(m, marks, Kind::Other, pool.len() as u64, draws as u64, s as u32, false);
    Ok(BigInt::to_score(&sw.total, &sw.scale))
}

/// Per-group padded expected sums over a shared denominator.
pub(crate) fn symmetric_total<N: Numeric>(
    sp: &SymmetricProfile,
    chosen: &[bool],
    dummies: usize,
    s: usize,
    weights: &[N],
    weight_den: &N,
) -> (N, N) {
    let m = sp.m() as u32;
    let pool = sp.free_count() as u64;
    let mut num = N::zero();
    let mut scale = N::one();
    for (g, group) in sp.groups().iter().enumerate() {
        let marks = group.marks().iter().map(|&(r, ci)| {
            (r, if chosen[ci as usize] { Kind::Fixed } else { Kind::Other })
        });
        let sw = sweep::<N>(m, marks, Kind::Pool, pool, dummies as u64, s as u32, false);
        num += &(sw.total * &weights[g]);
        scale = sw.scale;
    }
    (num, scale * weight_den)
}

pub(crate) fn weights_as<N: Numeric>(sp: &SymmetricProfile) -> (Vec<N>, N) {
    let (nums, den) = sp.integer_weights();
    (nums.iter().map(N::from_bigint).collect(), N::from_bigint(&den))
}

/// Exact expected s-Borda score of any committee made of `chosen` critical candidates
/// plus `dummy_count` dummies.
pub fn expected_score_symmetric(
    sp: &SymmetricProfile,
    chosen: &[Candidate],
    dummy_count: usize,
    s: usize,
) -> Result<Score> {
    expected_score_symmetric_with(sp, chosen, dummy_count, s, Arithmetic::auto(sp.m()))
}

pub fn expected_score_symmetric_with(
    sp: &SymmetricProfile,
    chosen: &[Candidate],
    dummy_count: usize,
    s: usize,
    mode: Arithmetic,
) -> Result<Score> {
    let mut mask = vec![false; sp.critical().len()];
    for &c in chosen {
        match sp.critical_index(c) {
            Some(i) if c < sp.m() => {
                if std::mem::replace(&mut mask[i], true) {
                    return arg(format!("candidate {c} listed twice"));
                }
            }
            _ => return arg(format!("candidate {c} is not critical")),
        }
    }
    if dummy_count > sp.free_count() {
        return arg(format!("dummy_count={dummy_count} exceeds {} dummies", sp.free_count()));
    }
    if s == 0 || chosen.len() + dummy_count < s {
        return arg(format!("committee of size {} cannot supply s={s}", chosen.len() + dummy_count));
    }
    Ok(match mode {
        Arithmetic::Exact => {
            let (w, d) = weights_as::<BigInt>(sp);
            let (n, d) = symmetric_total(sp, &mask, dummy_count, s, &w, &d);
            BigInt::to_score(&n, &d)
        }
        Arithmetic::Float => {
            let (w, d) = weights_as::<f64>(sp);
            let (n, d) = symmetric_total(sp, &mask, dummy_count, s, &w, &d);
            f64::to_score(&n, &d)
        }
    })
}

/// Score of a concrete committee on a symmetric profile.
pub fn score_symmetric(sp: &SymmetricProfile, committee: &Committee, s: usize) -> Result<Score> {
    check_committee(sp.m(), committee)?;
    check_s(s, committee.k())?;
    let (crit, dummies) = sp.split(committee);
    let chosen: Vec<Candidate> = crit.iter().map(|&i| sp.critical()[i]).collect();
    expected_score_symmetric(sp, &chosen, dummies, s)
}

/// Score of a committee on either profile representation.
pub fn score_committee<E: crate::profile::Electorate + ?Sized>(
    profile: &E,
    committee: &Committee,
    s: usize,
) -> Result<Score> {
    match profile.view() {
        crate::profile::ProfileView::Explicit(p) => score_s_borda(p, committee, s),
        crate::profile::ProfileView::Symmetric(p) => score_symmetric(p, committee, s),
    }
}
