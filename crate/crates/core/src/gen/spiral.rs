use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{arg, Result};
use crate::profile::SymmetricProfile;

/// Discretized spiral. Turn `t` holds the criticals for `θ ∈ [t − 1, t)`; the rank of the
/// turn-`t` critical for voters in angular cell `i` is `round(a·β^{t−1+(i+½)/R}·m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpiralParams {
    pub layers: usize,
    pub a: f64,
    pub resolution: usize,
    pub m: usize,
    /// Geometric decay per turn; must stay below the golden-ratio conjugate for strict order.
    pub beta: f64,
    /// Window gain exceeds the best dummy gain by this factor.
    pub margin: f64,
}

impl SpiralParams {
    pub fn new(layers: usize, a: f64, resolution: usize, m: usize) -> Self {
        SpiralParams { layers, a, resolution, m, beta: 0.6, margin: 0.02 }
    }
}

#[derive(Clone, Debug)]
pub struct SpiralInstance {
    pub profile: SymmetricProfile,
    /// Number of critical candidates; greedy is meant to pick exactly these.
    pub k: usize,
    /// Turn of each critical id (0 for the special candidate). The sliver after the
    /// last window that would cross `θ = ℓ` stays uncovered.
    pub layer_of: Vec<usize>,
    /// Rank collisions resolved by moving to the next free rank.
    pub bumps: usize,
    /// `[start, end)` of each window in θ units; window `j` belongs to critical `j + 1`.
    pub windows: Vec<(u64, u64)>,
    pub units_per_turn: u64,
}

const UNITS_TARGET: u64 = 4_000_000;

pub fn gen_spiral(p: &SpiralParams) -> Result<SpiralInstance> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    if p.layers < 2 {
        return arg("spiral needs at least 2 layers");
    }
    if p.resolution < 100 {
        return arg("spiral resolution must be at least 100 cells per turn");
    }
    if !(p.beta > 0.0 && p.beta < phi) {
        return arg(format!("beta must lie in (0, {phi:.6}), got {}", p.beta));
    }
    if !(p.margin >= 0.0) || !(p.a > 0.0) {
        return arg("a must be positive and margin non-negative");
    }
    if p.a / p.beta >= 0.9 {
        return arg(format!("a={} leaves the top turn below rank m", p.a));
    }
    let (m, r_cells) = (p.m, p.resolution as u64);
    let q = (UNITS_TARGET / r_cells).max(1);
    let u = r_cells * q;
    let turns = p.layers + 1;
    let rank: Vec<Vec<u32>> = (0..turns)
        .map(|t| {
            (0..r_cells)
                .map(|c| {
                    let theta = t as f64 - 1.0 + (c as f64 + 0.5) / r_cells as f64;
                    (p.a * p.beta.powf(theta) * m as f64).round().max(1.0) as u32
                })
                .collect()
        })
        .collect();
    let f = |b: u32| b as f64 * (b as f64 - 1.0) / (2.0 * m as f64);

    let mut windows = Vec::new();
    let mut pos = 0u64;
    let end = p.layers as u64 * u;
    while pos < end {
        let t = (pos / u + 1) as usize;
        let u0 = pos % u;
        let mut dummy = 0.0;
        for c in 0..r_cells {
            let cov = u0.saturating_sub(c * q).min(q) as f64;
            dummy += cov * f(rank[t][c as usize]) + (q as f64 - cov) * f(rank[t - 1][c as usize]);
        }
        let need = (1.0 + p.margin) * dummy;
        let mut acc = 0.0;
        let mut at = pos;
        let mut fits = true;
        loop {
            if at >= end {
                fits = false;
                break;
            }
            let tt = (at / u + 1) as usize;
            let uu = at % u;
            let c = (uu / q) as usize;
            let avail = q - uu % q;
            let delta = rank[tt - 1][c] as f64 - rank[tt][c] as f64;
            if delta > 0.0 && acc + avail as f64 * delta >= need {
                at += (((need - acc) / delta).ceil() as u64).max(1);
                break;
            }
            acc += avail as f64 * delta;
            at += avail;
        }
        // a window crossing the last turn would undercut voters on earlier turns
        if !fits || at > end {
            break;
        }
        windows.push((pos, at));
        pos = at;
    }
    let k = windows.len() + 1;
    if k + 2 > m {
        return arg(format!("spiral needs {k} criticals, more than m={m} allows"));
    }
    let mut layer_of = vec![0];
    layer_of.extend(windows.iter().map(|w| (w.0 / u + 1) as usize));

    let last_end = windows.last().map_or(0, |w| w.1);
    let mut cuts: Vec<u64> = (0..r_cells)
        .map(|c| c * q)
        .chain(windows.iter().map(|w| w.0 % u))
        .chain([last_end % u])
        .collect();
    cuts.sort_unstable();
    cuts.dedup();
    let den = BigInt::from(u);
    let mut bumps = 0;
    let mut groups = Vec::with_capacity(cuts.len());
    for (i, &x) in cuts.iter().enumerate() {
        let len = cuts.get(i + 1).copied().unwrap_or(u) - x;
        let c = (x / q) as usize;
        let mut ranks = vec![0u32; k];
        let mut used = std::collections::BTreeSet::new();
        let mut place = |id: usize, mut r: u32, ranks: &mut Vec<u32>| {
            while !used.insert(r) {
                r += 1;
                bumps += 1;
            }
            ranks[id] = r;
        };
        place(0, rank[0][c], &mut ranks);
        for t in 1..turns {
            let theta = (t as u64 - 1) * u + x;
            if theta >= last_end {
                break;
            }
            let w = windows.partition_point(|w| w.0 <= theta) - 1;
            if theta < windows[w].1 {
                place(w + 1, rank[t][c], &mut ranks);
            }
        }
        let unplaced = ranks.iter().filter(|&&r| r == 0).count();
        let floor = (m - unplaced) as u32;
        if ranks.iter().any(|&r| r > floor) {
            return arg("spiral ranks reach the bottom block; lower a");
        }
        let mut next = floor + 1;
        for r in ranks.iter_mut().filter(|r| **r == 0) {
            *r = next;
            next += 1;
        }
        groups.push((BigRational::new(BigInt::from(len), den.clone()), ranks));
    }
    let profile = SymmetricProfile::from_rank_table(m, (0..k).collect(), groups)?;
    Ok(SpiralInstance { profile, k, layer_of, bumps, windows, units_per_turn: u })
}
