//! Committee selection rules.

mod banzhaf;
mod brute;
mod greedy;
mod random;

pub use banzhaf::{banzhaf, banzhaf_with, expected_completion_score, expected_completion_score_with};
pub use brute::{brute_force_opt, brute_force_opt_capped, DEFAULT_ENUMERATION_CAP};
pub use greedy::{greedy, greedy_with};
pub use random::{random_committee, RandomSummary};

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::profile::{Candidate, Committee};
use crate::score::Score;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pick {
    pub candidate: Candidate,
    /// Score after the pick. Greedy reports the s-Borda score (committees smaller
    /// than `s` padded with rank `m + 1`); Banzhaf reports its completion objective.
    pub score: Score,
    /// Decrease of the score relative to the previous step.
    pub marginal: Score,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dummy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub rule: String,
    pub k: usize,
    pub s: usize,
    pub picks: Vec<Pick>,
}

impl SelectionTrace {
    pub(crate) fn new(rule: &str, k: usize, s: usize) -> Self {
        SelectionTrace { rule: rule.to_string(), k, s, picks: Vec::with_capacity(k) }
    }

    pub(crate) fn push(&mut self, candidate: Candidate, prev: &Score, score: Score, dummy: bool) {
        let marginal = prev - &score;
        self.picks.push(Pick { candidate, score, marginal, dummy });
    }

    pub fn candidates(&self) -> Vec<Candidate> {
        self.picks.iter().map(|p| p.candidate).collect()
    }

    pub fn final_score(&self) -> Option<&Score> {
        self.picks.last().map(|p| &p.score)
    }

    pub fn is_non_increasing(&self) -> bool {
        self.picks.windows(2).all(|w| w[1].score.cmp_tol(&w[0].score).is_le())
    }
}

pub type Selection = (Committee, SelectionTrace);

pub(crate) fn check_ksm(k: usize, s: usize, m: usize) -> Result<()> {
    if k > m {
        return arg(format!("k={k} exceeds m={m}"));
    }
    if s == 0 || s > k {
        return arg(format!("need 1 ≤ s ≤ k, got s={s}, k={k}"));
    }
    Ok(())
}
