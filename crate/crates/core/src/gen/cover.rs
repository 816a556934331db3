use rand::seq::SliceRandom;

use super::rng;
use crate::error::{arg, Error, Result};
use crate::profile::{Candidate, PreferenceProfile, Ranking};

/// A regular max-k-cover instance: every set has exactly `n_u / k` elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverInstance {
    n_u: usize,
    sets: Vec<Vec<usize>>,
    k: usize,
}

impl CoverInstance {
    pub fn new(n_u: usize, sets: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        if k == 0 || n_u == 0 || n_u % k != 0 {
            return arg(format!("cover budget k={k} must divide n_u={n_u}"));
        }
        if sets.is_empty() {
            return arg("cover needs at least one set");
        }
        let size = n_u / k;
        let mut sets = sets;
        for (i, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.len() != size || set.last().is_some_and(|&e| e >= n_u) {
                return arg(format!("set {i} must hold {size} distinct elements below {n_u}"));
            }
        }
        Ok(CoverInstance { n_u, sets, k })
    }

    pub fn universe(&self) -> usize {
        self.n_u
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn z(&self) -> usize {
        self.sets.len()
    }

    pub fn covers(&self, set: usize, element: usize) -> bool {
        self.sets[set].binary_search(&element).is_ok()
    }

    /// Elements covered by the chosen sets.
    pub fn coverage(&self, chosen: &[usize]) -> usize {
        let mut hit = vec![false; self.n_u];
        for &i in chosen {
            for &e in &self.sets[i] {
                hit[e] = true;
            }
        }
        hit.iter().filter(|&&h| h).count()
    }
}

#[derive(Clone, Debug)]
pub struct CoverOptions {
    pub epsilon: f64,
    pub seed: u64,
    /// Distinct dummy shuffles per element; the remaining multiplicity goes into weights.
    pub max_copies: u64,
    /// Cap on `voters × m` rank entries.
    pub budget: u128,
}

impl CoverOptions {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        CoverOptions { epsilon, seed, max_copies: 16, budget: 50_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct CoverProfile {
    pub profile: PreferenceProfile,
    /// Candidate `j` stands for set `j`.
    pub critical: Vec<Candidate>,
    pub epsilon_prime: f64,
    /// Nominal copies per element before weighting.
    pub copies: u64,
}

/// Each element becomes a voter class. Set `j`'s candidate sits in the top `z` ranks
/// for elements it covers and in the bottom `z` ranks otherwise; dummies are shuffled
/// independently per copy.
pub fn gen_from_cover(cover: &CoverInstance, opts: &CoverOptions) -> Result<CoverProfile> {
    let eps = opts.epsilon;
    if !(eps > 0.0 && eps <= 0.1) {
        return arg(format!("epsilon must lie in (0, 0.1], got {eps}"));
    }
    let eps_p = 10.0 * eps;
    let (n_u, z, k) = (cover.universe(), cover.z(), cover.k());
    let m = (2.0 * (k * z) as f64 / eps_p).round() as usize;
    if m < 2 * z + 1 {
        return arg(format!("m={m} leaves no room for dummies"));
    }
    let r = (10.0 * (m * k * k) as f64 / (n_u as f64 * eps * eps)).ceil() as u64;
    let copies = r.min(opts.max_copies.max(1));
    let required = n_u as u128 * copies as u128 * m as u128;
    if required > opts.budget {
        return Err(Error::BudgetExceeded { required, budget: opts.budget });
    }
    let mut rng = rng(opts.seed);
    let dummies: Vec<Candidate> = (z..m).collect();
    let top: Vec<u32> = (1..=z as u32).collect();
    let bottom: Vec<u32> = ((m - z + 1) as u32..=m as u32).collect();
    let mut voters = Vec::with_capacity(n_u * copies as usize);
    let mut weights = Vec::with_capacity(voters.capacity());
    for e in 0..n_u {
        let (inside, outside): (Vec<usize>, Vec<usize>) = (0..z).partition(|&j| cover.covers(j, e));
        for c in 0..copies {
            let mut rank_of = vec![0u32; m];
            let mut t = top.clone();
            t.shuffle(&mut rng);
            for (&j, &r) in inside.iter().zip(&t) {
                rank_of[j] = r;
            }
            let mut b = bottom.clone();
            b.shuffle(&mut rng);
            for (&j, &r) in outside.iter().zip(&b) {
                rank_of[j] = r;
            }
            let mut free: Vec<u32> = t[inside.len()..].iter().chain(&b[outside.len()..]).copied().collect();
            free.extend(z as u32 + 1..=(m - z) as u32);
            free.shuffle(&mut rng);
            for (&d, &r) in dummies.iter().zip(&free) {
                rank_of[d] = r;
            }
            voters.push(Ranking::from_ranks(&rank_of)?);
            // split r copies as evenly as possible
            weights.push(r / copies + u64::from(c < r % copies));
        }
    }
    Ok(CoverProfile {
        profile: PreferenceProfile::new(m, voters, Some(weights))?,
        critical: (0..z).collect(),
        epsilon_prime: eps_p,
        copies: r,
    })
}
