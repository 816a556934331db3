use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{build_lp, solve_lp, FractionalSolution, LpSolver};
use crate::error::{arg, Result};
use crate::gen::rng;
use crate::profile::{Candidate, Committee, Electorate};
use crate::rules::check_ksm;
use crate::score::Score;
use crate::scoring::score_committee;

const FRAC: f64 = 1e-12;

/// Pair rounding: repeatedly takes the two lowest-index fractional entries and moves
/// mass between them so that one becomes integral, preserving every marginal.
pub fn dependent_round<R: Rng + ?Sized>(y: &[f64], rng: &mut R) -> Result<Vec<bool>> {
    if let Some(v) = y.iter().find(|v| !(-FRAC..=1.0 + FRAC).contains(*v)) {
        return arg(format!("mass {v} outside [0, 1]"));
    }
    let sum: f64 = y.iter().sum();
    let target = sum.round();
    if (sum - target).abs() > 1e-9 {
        return arg(format!("masses sum to {sum}, not an integer"));
    }
    let mut y: Vec<f64> = y.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let is_frac = |v: f64| v > FRAC && v < 1.0 - FRAC;
    let mut a = 0;
    loop {
        while a < y.len() && !is_frac(y[a]) {
            a += 1;
        }
        let Some(b) = (a + 1..y.len()).find(|&j| is_frac(y[j])) else { break };
        let up = (1.0 - y[a]).min(y[b]);
        let down = y[a].min(1.0 - y[b]);
        if rng.gen::<f64>() * (up + down) < down {
            y[a] += up;
            y[b] -= up;
        } else {
            y[a] -= down;
            y[b] += down;
        }
    }
    let mut out: Vec<bool> = y.iter().map(|&v| v > 0.5).collect();
    // float drift can leave the count off by one; repair toward the target
    let mut count = out.iter().filter(|&&b| b).count() as i64;
    let target = target as i64;
    for j in 0..out.len() {
        if count == target {
            break;
        }
        if count < target && !out[j] && y[j] > FRAC {
            out[j] = true;
            count += 1;
        } else if count > target && out[j] && y[j] < 1.0 - FRAC {
            out[j] = false;
            count -= 1;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingOutcome {
    pub t1: Vec<Candidate>,
    pub t2: Vec<Candidate>,
    pub committee: Committee,
    pub seed: u64,
}

/// `⌊k(1 − 1/√s)⌋`, the number of candidates taken from the rounded LP.
pub fn t1_size(k: usize, s: usize) -> usize {
    (k as f64 * (1.0 - 1.0 / (s as f64).sqrt()) + 1e-9).floor() as usize
}

/// Solves the relaxation, rounds `t1_size` candidates from the rescaled masses and fills
/// the rest uniformly. `s = 1` is rejected: the rounded part would be empty.
pub fn lp_round_select<E: Electorate + ?Sized>(
    profile: &E,
    k: usize,
    s: usize,
    solver: &dyn LpSolver,
    seed: u64,
) -> Result<(Committee, RoundingOutcome, Score)> {
    check_ksm(k, s, profile.candidate_count())?;
    if s == 1 {
        return arg("lp rounding needs s ≥ 2; with s = 1 it reduces to a uniform committee");
    }
    let sol = solve_lp(&build_lp(profile, k, s)?, solver)?;
    round_solution(profile, &sol, k, s, seed)
}

/// The rounding half of [`lp_round_select`] for an already solved relaxation.
pub fn round_solution<E: Electorate + ?Sized>(
    profile: &E,
    sol: &FractionalSolution,
    k: usize,
    s: usize,
    seed: u64,
) -> Result<(Committee, RoundingOutcome, Score)> {
    let m = profile.candidate_count();
    check_ksm(k, s, m)?;
    if sol.y.len() != m {
        return arg("solution size does not match the profile");
    }
    let mut rng = rng(seed);
    let n1 = t1_size(k, s);
    let total: f64 = sol.y.iter().sum();
    let scaled: Vec<f64> = if n1 == 0 || total <= 0.0 {
        vec![0.0; m]
    } else {
        sol.y.iter().map(|v| (v * n1 as f64 / total).min(1.0)).collect()
    };
    let mut scaled = scaled;
    // clipping at 1 can only lower the sum; top it up on the unclipped entries
    let lost = n1 as f64 - scaled.iter().sum::<f64>();
    if lost > 1e-12 {
        let room: f64 = scaled.iter().map(|v| 1.0 - v).sum();
        scaled.iter_mut().for_each(|v| *v += (1.0 - *v) * lost / room);
    }
    let pick = dependent_round(&scaled, &mut rng)?;
    let t1: Vec<Candidate> = (0..m).filter(|&j| pick[j]).collect();
    let rest: Vec<Candidate> = (0..m).filter(|&j| !pick[j]).collect();
    let mut t2: Vec<Candidate> = sample(&mut rng, rest.len(), k - t1.len()).into_iter().map(|i| rest[i]).collect();
    t2.sort_unstable();
    let committee = Committee::new(t1.iter().chain(&t2).copied(), m)?;
    let score = score_committee(profile, &committee, s)?;
    Ok((committee.clone(), RoundingOutcome { t1, t2, committee, seed }, score))
}
