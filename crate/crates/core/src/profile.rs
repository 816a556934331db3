//! Preference profiles, committees and the exchangeable-dummy representation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{arg, Error, Result};

pub type Candidate = usize;

/// A strict ranking: `order[i]` is the candidate at rank `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    order: Vec<u32>,
    rank_of: Vec<u32>,
}

impl Ranking {
    pub fn from_order(order: &[Candidate]) -> Result<Self> {
        let m = order.len();
        let mut rank_of = vec![0u32; m];
        for (i, &c) in order.iter().enumerate() {
            if c >= m {
                return Err(Error::InvalidProfile(format!("candidate {c} out of range 0..{m}")));
            }
            if rank_of[c] != 0 {
                return Err(Error::InvalidProfile(format!("candidate {c} ranked twice")));
            }
            rank_of[c] = i as u32 + 1;
        }
        Ok(Ranking { order: order.iter().map(|&c| c as u32).collect(), rank_of })
    }

    /// Build from `rank_of[c]` (1-based ranks).
    pub fn from_ranks(rank_of: &[u32]) -> Result<Self> {
        let m = rank_of.len();
        let mut order = vec![u32::MAX; m];
        for (c, &r) in rank_of.iter().enumerate() {
            if r == 0 || r as usize > m || order[r as usize - 1] != u32::MAX {
                return Err(Error::InvalidProfile(format!("rank {r} of candidate {c} is invalid")));
            }
            order[r as usize - 1] = c as u32;
        }
        Ok(Ranking { order, rank_of: rank_of.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 1-based rank of `c`.
    #[inline]
    pub fn rank(&self, c: Candidate) -> u32 {
        self.rank_of[c]
    }

    /// Candidate at 1-based rank `r`.
    #[inline]
    pub fn at(&self, r: u32) -> Candidate {
        self.order[r as usize - 1] as usize
    }

    pub fn top(&self) -> Candidate {
        self.at(1)
    }

    pub fn bottom(&self) -> Candidate {
        self.at(self.len() as u32)
    }

    pub fn order(&self) -> impl Iterator<Item = Candidate> + '_ {
        self.order.iter().map(|&c| c as usize)
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank_of
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceProfile {
    m: usize,
    voters: Vec<Ranking>,
    weights: Vec<u64>,
}

impl PreferenceProfile {
    pub fn new(m: usize, voters: Vec<Ranking>, weights: Option<Vec<u64>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidProfile("no candidates".into()));
        }
        if voters.is_empty() {
            return Err(Error::InvalidProfile("no voters".into()));
        }
        if let Some(v) = voters.iter().position(|r| r.len() != m) {
            return Err(Error::InvalidProfile(format!("voter {v} does not rank all {m} candidates")));
        }
        let weights = weights.unwrap_or_else(|| vec![1; voters.len()]);
        if weights.len() != voters.len() {
            return Err(Error::InvalidProfile("weights and voters differ in length".into()));
        }
        if weights.iter().any(|&w| w == 0) {
            return Err(Error::InvalidProfile("voter weights must be positive".into()));
        }
        Ok(PreferenceProfile { m, voters, weights })
    }

    pub fn from_orders(m: usize, orders: &[Vec<Candidate>]) -> Result<Self> {
        let voters = orders.iter().map(|o| Ranking::from_order(o)).collect::<Result<Vec<_>>>()?;
        Self::new(m, voters, None)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn voters(&self) -> &[Ranking] {
        &self.voters
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Number of voters counted with multiplicity.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    pub fn with_weights(&self, weights: Vec<u64>) -> Result<Self> {
        Self::new(self.m, self.voters.clone(), Some(weights))
    }
}

/// Serialized as the sorted member list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Vec<Candidate>", into = "Vec<Candidate>")]
pub struct Committee {
    members: Vec<Candidate>,
}

impl Committee {
    pub fn new(members: impl IntoIterator<Item = Candidate>, m: usize) -> Result<Self> {
        let mut members: Vec<_> = members.into_iter().collect();
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return arg("committee repeats a candidate");
        }
        if let Some(&c) = members.last() {
            if c >= m {
                return arg(format!("candidate {c} out of range 0..{m}"));
            }
        }
        Ok(Committee { members })
    }

    pub(crate) fn from_sorted_unchecked(members: Vec<Candidate>) -> Self {
        Committee { members }
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn contains(&self, c: Candidate) -> bool {
        self.members.binary_search(&c).is_ok()
    }

    pub fn is_subset_of(&self, other: &Committee) -> bool {
        self.members.iter().all(|&c| other.contains(c))
    }
}

impl TryFrom<Vec<Candidate>> for Committee {
    type Error = Error;

    fn try_from(v: Vec<Candidate>) -> Result<Self> {
        Committee::new(v, usize::MAX)
    }
}

impl From<Committee> for Vec<Candidate> {
    fn from(c: Committee) -> Self {
        c.members
    }
}

/// One voter group of a [`SymmetricProfile`].
#[derive(Clone, Debug)]
pub struct VoterGroup {
    weight: BigRational,
    /// Fixed rank of each critical candidate, indexed like `SymmetricProfile::critical`.
    ranks: Vec<u32>,
    /// `(rank, critical index)` sorted by rank.
    marks: Vec<(u32, u32)>,
}

impl VoterGroup {
    pub fn weight(&self) -> &BigRational {
        &self.weight
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub(crate) fn marks(&self) -> &[(u32, u32)] {
        &self.marks
    }
}

/// Voter groups that fix the ranks of the critical candidates and contain every
/// permutation of the remaining (dummy) candidates over the free ranks.
#[derive(Clone, Debug)]
pub struct SymmetricProfile {
    m: usize,
    critical: Vec<Candidate>,
    crit_index: Vec<Option<u32>>,
    dummies: Vec<Candidate>,
    groups: Vec<VoterGroup>,
}

impl SymmetricProfile {
    /// Groups are `(weight, placed)` with `placed` mapping each critical candidate to its rank.
    pub fn new(
        m: usize,
        critical: Vec<Candidate>,
        groups: Vec<(BigRational, BTreeMap<Candidate, u32>)>,
    ) -> Result<Self> {
        let mut critical = critical;
        critical.sort_unstable();
        let table = groups
            .into_iter()
            .enumerate()
            .map(|(g, (w, placed))| {
                if placed.len() != critical.len() {
                    return Err(Error::InvalidProfile(format!(
                        "group {g} places {} candidates, expected the {} critical ones",
                        placed.len(),
                        critical.len()
                    )));
                }
                let ranks = critical
                    .iter()
                    .map(|c| {
                        placed.get(c).copied().ok_or_else(|| {
                            Error::InvalidProfile(format!("group {g} does not place candidate {c}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((w, ranks))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rank_table(m, critical, table)
    }

    /// Like [`SymmetricProfile::new`] but with ranks given per group in the order of `critical`
    /// (which must already be sorted ascending).
    pub fn from_rank_table(
        m: usize,
        critical: Vec<Candidate>,
        groups: Vec<(BigRational, Vec<u32>)>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidProfile("no candidates".into()));
        }
        if critical.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidProfile("critical ids must be distinct and sorted".into()));
        }
        if critical.last().is_some_and(|&c| c >= m) {
            return Err(Error::InvalidProfile("critical id out of range".into()));
        }
        if groups.is_empty() {
            return Err(Error::InvalidProfile("no voter groups".into()));
        }
        let mut crit_index = vec![None; m];
        for (i, &c) in critical.iter().enumerate() {
            crit_index[c] = Some(i as u32);
        }
        let dummies = (0..m).filter(|&c| crit_index[c].is_none()).collect();
        let mut total = BigRational::zero();
        let mut built = Vec::with_capacity(groups.len());
        for (g, (weight, ranks)) in groups.into_iter().enumerate() {
            if !weight.is_positive() {
                return Err(Error::InvalidProfile(format!("group {g} has non-positive weight")));
            }
            if ranks.len() != critical.len() {
                return Err(Error::InvalidProfile(format!("group {g} has the wrong number of ranks")));
            }
            let mut marks: Vec<(u32, u32)> =
                ranks.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();
            marks.sort_unstable();
            if marks.iter().any(|&(r, _)| r == 0 || r as usize > m)
                || marks.windows(2).any(|w| w[0].0 == w[1].0)
            {
                return Err(Error::InvalidProfile(format!(
                    "group {g} places ranks outside 1..{m} or repeats a rank"
                )));
            }
            total += &weight;
            built.push(VoterGroup { weight, ranks, marks });
        }
        if !total.is_one() {
            return Err(Error::InvalidProfile(format!("group weights sum to {total}, not 1")));
        }
        Ok(SymmetricProfile { m, critical, crit_index, dummies, groups: built })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn critical(&self) -> &[Candidate] {
        &self.critical
    }

    pub fn dummies(&self) -> &[Candidate] {
        &self.dummies
    }

    pub fn groups(&self) -> &[VoterGroup] {
        &self.groups
    }

    pub fn is_critical(&self, c: Candidate) -> bool {
        self.crit_index[c].is_some()
    }

    pub(crate) fn critical_index(&self, c: Candidate) -> Option<usize> {
        self.crit_index[c].map(|i| i as usize)
    }

    /// Number of free ranks per group (= number of dummies).
    pub fn free_count(&self) -> usize {
        self.m - self.critical.len()
    }

    /// Group weights over a common denominator: `(numerators, denominator)`.
    pub(crate) fn integer_weights(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .groups
            .iter()
            .fold(BigInt::one(), |acc, g| acc.lcm(g.weight.denom()));
        let nums = self
            .groups
            .iter()
            .map(|g| g.weight.numer() * (&den / g.weight.denom()))
            .collect();
        (nums, den)
    }

    /// Splits a committee into (critical indices, dummy count).
    pub fn split(&self, committee: &Committee) -> (Vec<usize>, usize) {
        let mut crit = Vec::new();
        let mut dummies = 0;
        for &c in committee.members() {
            match self.crit_index[c] {
                Some(i) => crit.push(i as usize),
                None => dummies += 1,
            }
        }
        (crit, dummies)
    }

    /// Expands into an explicit profile with every dummy permutation (at most 6 dummies).
    pub fn materialize(&self) -> Result<PreferenceProfile> {
        let d = self.dummies.len();
        if d > 6 {
            return arg(format!("materialization needs {d}! permutations per group; limit is 6 dummies"));
        }
        let (nums, _) = self.integer_weights();
        let perms = permutations(d);
        let mut voters = Vec::new();
        let mut weights = Vec::new();
        for (g, group) in self.groups.iter().enumerate() {
            let mut fixed = vec![0u32; self.m];
            for (i, &c) in self.critical.iter().enumerate() {
                fixed[c] = group.ranks[i];
            }
            let free: Vec<u32> = {
                let mut used = vec![false; self.m + 1];
                for &r in &group.ranks {
                    used[r as usize] = true;
                }
                (1..=self.m as u32).filter(|&r| !used[r as usize]).collect()
            };
            let w: u64 = (&nums[g])
                .try_into()
                .map_err(|_| Error::InvalidArgument("group weight numerator too large".into()))?;
            for p in &perms {
                let mut ranks = fixed.clone();
                for (j, &dc) in self.dummies.iter().enumerate() {
                    ranks[dc] = free[p[j]];
                }
                voters.push(Ranking::from_ranks(&ranks)?);
                weights.push(w);
            }
        }
        PreferenceProfile::new(self.m, voters, Some(weights))
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// Candidates partitioned into exchangeable blocks, each block owning a fixed set
/// of rank slots shared by all voters; every voter ordering of each block is
/// present with equal weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockProfile {
    m: usize,
    blocks: Vec<Block>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub members: Vec<Candidate>,
    pub slots: Vec<u32>,
}

impl BlockProfile {
    pub fn new(m: usize, blocks: Vec<Block>) -> Result<Self> {
        let mut seen_c = vec![false; m];
        let mut seen_r = vec![false; m + 1];
        for b in &blocks {
            if b.members.len() != b.slots.len() {
                return Err(Error::InvalidProfile(format!("block {} has mismatched slots", b.name)));
            }
            for &c in &b.members {
                if c >= m || std::mem::replace(&mut seen_c[c], true) {
                    return Err(Error::InvalidProfile(format!("block {} repeats or misplaces {c}", b.name)));
                }
            }
            for &r in &b.slots {
                if r == 0 || r as usize > m || std::mem::replace(&mut seen_r[r as usize], true) {
                    return Err(Error::InvalidProfile(format!("block {} has bad slot {r}", b.name)));
                }
            }
        }
        if seen_c.iter().any(|&x| !x) {
            return Err(Error::InvalidProfile("blocks do not cover all candidates".into()));
        }
        let mut blocks = blocks;
        for b in &mut blocks {
            b.members.sort_unstable();
            b.slots.sort_unstable();
        }
        Ok(BlockProfile { m, blocks })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_of(&self, c: Candidate) -> Option<usize> {
        self.blocks.iter().position(|b| b.members.contains(&c))
    }

    /// Rewrites the profile with the given block made critical (all its orderings become
    /// groups); the remaining candidates must form a single block.
    pub fn to_symmetric(&self, critical_block: usize) -> Result<SymmetricProfile> {
        if self.blocks.len() != 2 || critical_block > 1 {
            return arg("conversion needs exactly two blocks");
        }
        let crit = &self.blocks[critical_block];
        if crit.members.len() > 6 {
            return arg("critical block too large to enumerate its orderings");
        }
        let perms = permutations(crit.members.len());
        let w = BigRational::new(BigInt::one(), BigInt::from(perms.len()));
        let groups = perms
            .iter()
            .map(|p| (w.clone(), p.iter().map(|&i| crit.slots[i]).collect()))
            .collect();
        SymmetricProfile::from_rank_table(self.m, crit.members.clone(), groups)
    }
}

/// Read-only access shared by the selection rules.
pub enum ProfileView<'a> {
    Explicit(&'a PreferenceProfile),
    Symmetric(&'a SymmetricProfile),
}

pub trait Electorate {
    fn view(&self) -> ProfileView<'_>;

    fn candidate_count(&self) -> usize {
        match self.view() {
            ProfileView::Explicit(p) => p.m(),
            ProfileView::Symmetric(p) => p.m(),
        }
    }
}

impl Electorate for PreferenceProfile {
    fn view(&self) -> ProfileView<'_> {
        ProfileView::Explicit(self)
    }
}

impl Electorate for SymmetricProfile {
    fn view(&self) -> ProfileView<'_> {
        ProfileView::Symmetric(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranking_round_trip() {
        let r = Ranking::from_order(&[2, 0, 1]).unwrap();
        assert_eq!(r.rank(2), 1);
        assert_eq!(r.rank(1), 3);
        assert_eq!(r.top(), 2);
        assert_eq!(r.bottom(), 1);
        assert_eq!(Ranking::from_ranks(r.ranks()).unwrap(), r);
    }

    #[test]
    fn ranking_rejects_repeats() {
        assert!(Ranking::from_order(&[0, 0, 1]).is_err());
        assert!(Ranking::from_order(&[0, 3, 1]).is_err());
        assert!(Ranking::from_ranks(&[1, 1, 2]).is_err());
    }

    #[test]
    fn committee_validation() {
        assert!(Committee::new([1, 1], 3).is_err());
        assert!(Committee::new([3], 3).is_err());
        let t = Committee::new([2, 0], 3).unwrap();
        assert_eq!(t.members(), &[0, 2]);
    }

    #[test]
    fn permutations_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(0).len(), 1);
        let p = permutations(3);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
    }

    #[test]
    fn symmetric_weights_must_sum_to_one() {
        let half = BigRational::new(1.into(), 2.into());
        let g = |r: u32| (half.clone(), BTreeMap::from([(0usize, r)]));
        assert!(SymmetricProfile::new(3, vec![0], vec![g(1), g(3)]).is_ok());
        assert!(SymmetricProfile::new(3, vec![0], vec![g(1)]).is_err());
        assert!(SymmetricProfile::new(3, vec![0], vec![g(1), g(4)]).is_err());
    }

    #[test]
    fn materialize_counts() {
        let one = BigRational::one();
        let sp = SymmetricProfile::new(4, vec![1], vec![(one, BTreeMap::from([(1usize, 2)]))]).unwrap();
        let p = sp.materialize().unwrap();
        assert_eq!(p.voters().len(), 6);
        assert!(p.voters().iter().all(|v| v.rank(1) == 2));
    }
}
