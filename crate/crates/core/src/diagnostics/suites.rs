use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

use super::core::{core_blocking, min_core_alpha, verify_core_score_bound};
use super::monotone::{check_monotone_chain, eval_monotonicity_bound, find_banzhaf_witness};
use super::report::{Rule, RunOptions};
use crate::error::{Error, Result};
use crate::gen::{
    core_counterexample_k, gen_core_counterexample, gen_monotonicity_gap, gen_random, rng, DEFAULT_GAP_A,
    DEFAULT_GAP_B,
};
use crate::lp::{build_lp, dependent_round, solve_lp, AutoSolver};
use crate::profile::Committee;
use crate::rules::{banzhaf, brute_force_opt, greedy};
use crate::score::{binomial_u128, Score};
use crate::scoring::{expected_order_stat, rand_benchmark, score_committee, score_satisfaction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    GreedyBounds,
    BanzhafBounds,
    Core,
    Monotone,
    Lp,
    OrderStats,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::GreedyBounds, Suite::BanzhafBounds, Suite::Core, Suite::Monotone, Suite::Lp, Suite::OrderStats];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::GreedyBounds => "greedy-bounds",
            Suite::BanzhafBounds => "banzhaf-bounds",
            Suite::Core => "core",
            Suite::Monotone => "monotone",
            Suite::Lp => "lp",
            Suite::OrderStats => "order-stats",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub violations: usize,
    pub detail: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seeds: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Accumulates cases for one named property; keeps the first counterexample.
struct Tally {
    name: &'static str,
    cases: usize,
    violations: usize,
    first: Option<String>,
    note: String,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, cases: 0, violations: 0, first: None, note: String::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn done(self) -> Check {
        let detail = match self.first {
            Some(f) => format!("first violation: {f}"),
            None => self.note,
        };
        Check { name: self.name.into(), cases: self.cases, violations: self.violations, detail }
    }
}

/// Runs one battery. `seeds` random instances are drawn from `base_seed`, `base_seed + 1`, ...;
/// the exhaustive parts ignore it.
pub fn run_suite(suite: Suite, seeds: usize, base_seed: u64) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::GreedyBounds => greedy_bounds(seeds, base_seed)?,
        Suite::BanzhafBounds => banzhaf_bounds(seeds, base_seed)?,
        Suite::Core => core_suite(seeds, base_seed)?,
        Suite::Monotone => monotone_suite(seeds, base_seed)?,
        Suite::Lp => lp_suite(seeds, base_seed)?,
        Suite::OrderStats => order_stats()?,
    };
    Ok(SuiteReport { suite, seeds, checks })
}

/// `(m, n, k)` for sweep instance `i`: `m ∈ 5..=20`, `n ∈ 3..=40`, `k ∈ 1..=m`.
fn sweep_instance(seed: u64) -> (usize, usize, usize, u64) {
    let mut r = rng(seed ^ 0x5eed_5eed);
    let m = r.gen_range(5..=20);
    (m, r.gen_range(3..=40), r.gen_range(1..=m), seed)
}

fn q(n: usize, d: usize) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn greedy_bounds(seeds: usize, base: u64) -> Result<Vec<Check>> {
    let mut cc = Tally::new("greedy 1-Borda <= 2(m+1)/(k+1)");
    let mut sat = Tally::new("greedy satisfaction >= (m+1)(1-2/(k+1))");
    let mut sb = Tally::new("greedy s-Borda <= 2s^2(m+1)/(k+1), s<=3");
    let mut mono = Tally::new("greedy trace non-increasing");
    for i in 0..seeds as u64 {
        let (m, n, k, seed) = sweep_instance(base.wrapping_add(i));
        let p = gen_random(m, n, seed)?;
        for s in 1..=k.min(3) {
            let (t, trace) = greedy(&p, k, s)?;
            let score = score_committee(&p, &t, s)?;
            let bound = Score::Exact(q(2 * s * s * (m + 1), k + 1));
            let ok = score.cmp_tol(&bound).is_le();
            let what = || format!("m={m} n={n} k={k} s={s} seed={seed}: {score} > {bound}");
            if s == 1 {
                cc.record(ok, what);
                let floor = Score::Exact(q(m + 1, 1) * (BigRational::from_integer(1.into()) - q(2, k + 1)));
                let sv = score_satisfaction(&p, &t, 1)?;
                sat.record(sv.cmp_tol(&floor).is_ge(), || format!("m={m} k={k} seed={seed}: {sv} < {floor}"));
            } else {
                sb.record(ok, what);
            }
            mono.record(trace.is_non_increasing(), || format!("m={m} k={k} s={s} seed={seed}"));
        }
    }
    Ok(vec![cc.done(), sat.done(), sb.done(), mono.done()])
}

fn banzhaf_bounds(seeds: usize, base: u64) -> Result<Vec<Check>> {
    let mut cc = Tally::new("banzhaf 1-Borda <= (m+1)/(k+1)");
    let mut sb = Tally::new("banzhaf s-Borda <= s(s+1)/2 (m+1)/(k+1), s<=3");
    for i in 0..seeds as u64 {
        let (m, n, k, seed) = sweep_instance(base.wrapping_add(i));
        let p = gen_random(m, n, seed)?;
        for s in 1..=k.min(3) {
            let (t, _) = banzhaf(&p, k, s)?;
            let score = score_committee(&p, &t, s)?;
            let bound = rand_benchmark(m, k, s)?;
            let ok = score.cmp_tol(&bound).is_le();
            let what = || format!("m={m} n={n} k={k} s={s} seed={seed}: {score} > {bound}");
            if s == 1 {
                cc.record(ok, what);
            } else {
                sb.record(ok, what);
            }
        }
    }
    Ok(vec![cc.done(), sb.done()])
}

fn core_suite(seeds: usize, base: u64) -> Result<Vec<Check>> {
    let mut picks = Tally::new("core counterexample: opt, greedy, banzhaf pick {c2} + dummies");
    let mut block = Tally::new("core counterexample: c1 blocks with support 1/3");
    for m in [16, 25, 36] {
        let sp = gen_core_counterexample(m)?;
        let k = core_counterexample_k(m);
        let expect = |t: &Committee| t.contains(1) && !t.contains(0);
        let (opt, _) = brute_force_opt(&sp, k, 1)?;
        let (g, _) = greedy(&sp, k, 1)?;
        let (b, _) = banzhaf(&sp, k, 1)?;
        for (name, t) in [("opt", &opt), ("greedy", &g), ("banzhaf", &b)] {
            picks.record(expect(t), || format!("m={m}: {name} picked {:?}", t.members()));
        }
        let r = core_blocking(&sp, &opt, &q(k, 3))?;
        let ok = r.blocking.iter().any(|x| x.candidate == 0 && x.support == Score::ratio(1, 3));
        block.record(ok, || format!("m={m}: blocking set {:?}", r.blocking));
    }
    let mut bound = Tally::new("core score bound on certified committees, m<=8");
    for i in 0..seeds as u64 {
        let seed = base.wrapping_add(i);
        let mut r = rng(seed ^ 0xc0de);
        let m = r.gen_range(4..=8);
        let k = r.gen_range(2..m);
        let p = gen_random(m, r.gen_range(3..=12), seed)?;
        let floor = q(k, k + 1);
        for t in committees(m, k) {
            let t = Committee::new(t, m)?;
            // smallest α at which T is certified, nudged past the ≥ threshold
            let alpha = (min_core_alpha(&p, &t)? + q(1, 1000)).max(floor.clone());
            let ok = verify_core_score_bound(&p, &t, &alpha)?;
            bound.record(ok, || format!("m={m} k={k} seed={seed} T={:?} alpha={alpha}", t.members()));
        }
    }
    Ok(vec![picks.done(), block.done(), bound.done()])
}

fn monotone_suite(seeds: usize, base: u64) -> Result<Vec<Check>> {
    let (v, branch) = eval_monotonicity_bound(DEFAULT_GAP_A, DEFAULT_GAP_B)?;
    let mut bnd = Tally::new("monotonicity bound > 1.015");
    bnd.record(v > 1.015, || format!("{v:.6} via {branch:?}"));
    bnd.note = format!("bound {v:.4} ({v:.7}, branch {branch:?})");

    let m = 10_000;
    let g = gen_monotonicity_gap(m, DEFAULT_GAP_A, DEFAULT_GAP_B)?;
    let (a, b) = (DEFAULT_GAP_A, DEFAULT_GAP_B);
    let outer = 1.0 - (b - a);
    let y = (a * a / 2.0 + (1.0 - b) * (1.0 + b) / 2.0) / outer;
    let mut closed = Tally::new("two-block scores match closed forms at m=10^4 (rel 2e-3)");
    for (name, cx, cy, form) in [
        ("Y", 0, 1, y * m as f64),
        ("XX", 2, 0, (2.0 * a + b) / 3.0 * m as f64),
        ("XY", 1, 1, (a * a / 2.0 + (1.0 - b) * (a + b) / 2.0) / outer * m as f64),
    ] {
        let got = g.score(cx, cy, 1)?.to_f64();
        let rel = (got - form).abs() / form;
        closed.record(rel < 2e-3, || format!("{name}: {got} vs {form}"));
    }

    let mut chain = Tally::new("greedy committees nested for k = 1..6");
    for i in 0..seeds as u64 {
        let seed = base.wrapping_add(i);
        let p = gen_random(8, 9, seed)?;
        let c = check_monotone_chain(Rule::Greedy, &p, 6, 1, &RunOptions::for_m(8))?;
        chain.record(c.is_monotone, || format!("seed={seed} at k={:?}", c.first_violation));
    }

    let mut wit = Tally::new("banzhaf non-monotone witness found and replayed");
    let w = find_banzhaf_witness(seeds.max(50), base)?;
    match w {
        Some(w) => {
            let replay = match &w.profile {
                crate::io::AnyProfile::Explicit { profile, .. } => {
                    check_monotone_chain(Rule::Banzhaf, profile, w.chain.committees.len() + w.s - 1, w.s, &RunOptions::for_m(profile.m()))?
                }
                crate::io::AnyProfile::Symmetric(sp) => {
                    check_monotone_chain(Rule::Banzhaf, sp, w.chain.committees.len() + w.s - 1, w.s, &RunOptions::for_m(sp.m()))?
                }
                crate::io::AnyProfile::Block(_) => w.chain.clone(),
            };
            wit.record(!replay.is_monotone, || format!("{} did not replay", w.source));
            wit.note = w.source;
        }
        None => wit.record(false, || "no witness within the search budget".into()),
    }
    Ok(vec![bnd.done(), closed.done(), chain.done(), wit.done()])
}

fn lp_suite(seeds: usize, base: u64) -> Result<Vec<Check>> {
    let mut relax = Tally::new("LP objective <= brute-force opt, m<=8 (rel 1e-6)");
    for i in 0..seeds as u64 {
        let seed = base.wrapping_add(i);
        let mut r = rng(seed ^ 0x1b);
        let m = r.gen_range(3..=8);
        let k = r.gen_range(1..=m);
        let s = r.gen_range(1..=k.min(3));
        let p = gen_random(m, r.gen_range(2..=10), seed)?;
        let sol = solve_lp(&build_lp(&p, k, s)?, &AutoSolver)?;
        let opt = brute_force_opt(&p, k, s)?.1.to_f64();
        relax.record(sol.objective <= opt * (1.0 + 1e-6), || {
            format!("m={m} k={k} s={s} seed={seed}: lp {} > opt {opt}", sol.objective)
        });
    }
    let mut sum = Tally::new("dependent rounding keeps the total exactly");
    let mut r = rng(base ^ 0xd0d0);
    for _ in 0..seeds {
        let len = r.gen_range(2..=30);
        let total = r.gen_range(1..len);
        let mut y: Vec<f64> = (0..len).map(|_| r.gen::<f64>()).collect();
        // scale into [0,1] with the requested sum by water-filling
        let mut scale = total as f64 / y.iter().sum::<f64>();
        for _ in 0..60 {
            let s: f64 = y.iter().map(|v| (v * scale).min(1.0)).sum();
            scale *= total as f64 / s;
        }
        y.iter_mut().for_each(|v| *v = (*v * scale).min(1.0));
        let fix = total as f64 - y.iter().sum::<f64>();
        if fix.abs() > 1e-12 {
            continue;
        }
        let out = dependent_round(&y, &mut r)?;
        let got = out.iter().filter(|&&b| b).count();
        sum.record(got == total, || format!("len={len}: {got} != {total}"));
    }
    Ok(vec![relax.done(), sum.done()])
}

fn order_stats() -> Result<Vec<Check>> {
    let mut t = Tally::new("mean t-th smallest of a k-subset of 1..m = t(m+1)/(k+1), m<=8");
    for m in 1..=8usize {
        for k in 1..=m {
            let subsets = committees(m, k);
            debug_assert_eq!(subsets.len() as u128, binomial_u128(m as u64, k as u64).unwrap());
            for tt in 1..=k {
                let total: usize = subsets.iter().map(|s| s[tt - 1] + 1).sum();
                let mean = Score::Exact(q(total, subsets.len()));
                let want = expected_order_stat(m, k, tt)?;
                t.record(mean == want, || format!("m={m} k={k} t={tt}: {mean} vs {want}"));
            }
        }
    }
    Ok(vec![t.done()])
}

/// All `k`-subsets of `0..m` in lexicographic order.
fn committees(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < m - k + i) else { return out };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
    }

    #[test]
    fn subsets_enumerated() {
        assert_eq!(committees(5, 2).len(), 10);
        assert_eq!(committees(4, 4), vec![vec![0, 1, 2, 3]]);
        assert_eq!(committees(3, 1), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn small_runs_pass() {
        for s in Suite::ALL {
            let r = run_suite(s, 6, 11).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.checks);
            assert!(r.checks.iter().all(|c| c.cases > 0), "{s}: {:?}", r.checks);
        }
    }

    #[test]
    fn monotone_reports_rounded_bound() {
        let r = run_suite(Suite::Monotone, 2, 0).unwrap();
        assert!(r.checks[0].detail.starts_with("bound 1.0151"));
    }
}
