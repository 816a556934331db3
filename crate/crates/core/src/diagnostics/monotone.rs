use serde::Serialize;

use super::report::{run_rule, Rule, RunOptions};
use crate::error::{arg, Result};
use crate::gen::{gen_monotonicity_gap, gen_random, MonotoneGap, DEFAULT_GAP_A, DEFAULT_GAP_B};
use crate::io::AnyProfile;
use crate::profile::{Committee, Electorate};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneChain {
    pub is_monotone: bool,
    /// First `k` whose committee does not contain the `(k−1)`-committee.
    pub first_violation: Option<usize>,
    pub committees: Vec<Committee>,
}

/// Runs `rule` for `k = max(s,1)..=k_max` and checks the committees are nested.
pub fn check_monotone_chain<E: Electorate + ?Sized>(
    rule: Rule,
    profile: &E,
    k_max: usize,
    s: usize,
    opts: &RunOptions,
) -> Result<MonotoneChain> {
    if k_max > profile.candidate_count() || k_max < s.max(1) {
        return arg(format!("need max(s,1) ≤ k_max ≤ m, got k_max={k_max}, s={s}"));
    }
    let mut committees: Vec<Committee> = Vec::new();
    let mut first_violation = None;
    for k in s.max(1)..=k_max {
        let t = run_rule(rule, profile, k, s, opts)?.committee;
        if first_violation.is_none() && committees.last().is_some_and(|prev| !prev.is_subset_of(&t)) {
            first_violation = Some(k);
        }
        committees.push(t);
    }
    Ok(MonotoneChain { is_monotone: first_violation.is_none(), first_violation, committees })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// One candidate from the outer block, `k = 1`.
    Y,
    /// Two inner-block candidates, `k = 2`.
    XX,
    /// One of each, `k = 2`.
    XY,
}

/// Large-m closed forms for the two-block instance, scaled by `(k+1)/(m+1)`;
/// returns their minimum and the branch attaining it.
pub fn eval_monotonicity_bound(a: f64, b: f64) -> Result<(f64, Branch)> {
    if !(0.0 < a && a < b && b < 1.0) {
        return arg(format!("need 0 < a < b < 1, got a={a}, b={b}"));
    }
    let outer = 1.0 - (b - a);
    let (p_low, p_high) = (a / outer, (1.0 - b) / outer);
    let y = 2.0 * (a / 2.0 * p_low + (1.0 + b) / 2.0 * p_high);
    let xx = 2.0 * a + b;
    let xy = 3.0 * (a / 2.0 * p_low + (a + b) / 2.0 * p_high);
    let mut best = (y, Branch::Y);
    for cand in [(xx, Branch::XX), (xy, Branch::XY)] {
        if cand.0 < best.0 {
            best = cand;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub profile: AnyProfile,
    pub s: usize,
    pub chain: MonotoneChain,
    pub source: String,
}

/// Bounded search for an instance where Banzhaf is not committee-monotone: first the
/// two-block family with an enumerable inner block, then small random profiles.
/// `None` means nothing was found within the budget, not that none exists.
pub fn find_banzhaf_witness(random_trials: usize, seed: u64) -> Result<Option<Witness>> {
    for m in 8..=40 {
        for (a, b) in [(DEFAULT_GAP_A, DEFAULT_GAP_B), (0.3, 0.45), (0.25, 0.4)] {
            let Ok(g) = gen_monotonicity_gap(m, a, b) else { continue };
            let Ok(sp) = g.profile.to_symmetric(MonotoneGap::X) else { continue };
            for s in 1..=2 {
                let chain = check_monotone_chain(Rule::Banzhaf, &sp, 4.min(m), s, &RunOptions::for_m(m))?;
                if !chain.is_monotone {
                    let source = format!("two-block m={m} a={a} b={b}");
                    return Ok(Some(Witness { profile: AnyProfile::Symmetric(sp), s, chain, source }));
                }
            }
        }
    }
    for t in 0..random_trials as u64 {
        let m = 4 + (t % 4) as usize;
        let n = 3 + (t % 7) as usize;
        let p = gen_random(m, n, seed.wrapping_add(t))?;
        for s in 1..=2 {
            let chain = check_monotone_chain(Rule::Banzhaf, &p, m - 1, s, &RunOptions::for_m(m))?;
            if !chain.is_monotone {
                let source = format!("random m={m} n={n} seed={}", seed.wrapping_add(t));
                return Ok(Some(Witness { profile: AnyProfile::Explicit { profile: p, s_default: Some(s) }, s, chain, source }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_core_counterexample, gen_sborda_bad};
    use crate::rules::banzhaf;

    #[test]
    fn bound_at_default_point() {
        let (v, br) = eval_monotonicity_bound(0.377, 0.552).unwrap();
        assert!(v > 1.015);
        assert_eq!(br, Branch::Y);
        // (a² + (1+b)(1−b)) / (1 − b + a) with a, b in thousandths
        assert!((v - 837_425.0 / 825_000.0).abs() < 1e-12);
        assert!(eval_monotonicity_bound(0.5, 0.5).is_err());
        // continuity as the inner block closes
        let (near, _) = eval_monotonicity_bound(0.4, 0.4 + 1e-6).unwrap();
        let (a, b): (f64, f64) = (0.4, 0.4);
        let limit = (a * a + (1.0 + b) * (1.0 - b)).min(2.0 * a + b).min(1.5 * (a * a + (a + b) * (1.0 - b)));
        assert!((near - limit).abs() < 1e-5);
    }

    #[test]
    fn greedy_chains_are_monotone() {
        let sp = gen_sborda_bad(20, 4, 2).unwrap();
        let c = check_monotone_chain(Rule::Greedy, &sp, 6, 2, &RunOptions::for_m(20)).unwrap();
        assert!(c.is_monotone && c.committees.len() == 5);
        let p = gen_random(7, 6, 2).unwrap();
        assert!(check_monotone_chain(Rule::Greedy, &p, 7, 1, &RunOptions::for_m(7)).unwrap().is_monotone);
        let one = check_monotone_chain(Rule::Banzhaf, &gen_core_counterexample(9).unwrap(), 1, 1, &RunOptions::for_m(9));
        assert!(one.unwrap().is_monotone);
    }

    #[test]
    fn banzhaf_witness_exists_and_replays() {
        let w = find_banzhaf_witness(2000, 1).unwrap().expect("witness");
        let k = w.chain.first_violation.unwrap();
        let (prev, cur) = match &w.profile {
            AnyProfile::Explicit { profile, .. } => (banzhaf(profile, k - 1, w.s).unwrap().0, banzhaf(profile, k, w.s).unwrap().0),
            AnyProfile::Symmetric(sp) => (banzhaf(sp, k - 1, w.s).unwrap().0, banzhaf(sp, k, w.s).unwrap().0),
            AnyProfile::Block(_) => unreachable!(),
        };
        assert!(!prev.is_subset_of(&cur), "{}", w.source);
    }
}
