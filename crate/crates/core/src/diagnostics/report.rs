use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::lp::{lp_round_select, AutoSolver};
use crate::profile::{Committee, Electorate, ProfileView};
use crate::rules::{
    banzhaf_with, brute_force_opt_capped, greedy_with, random_committee, SelectionTrace, DEFAULT_ENUMERATION_CAP,
};
use crate::score::{Arithmetic, Score};
use crate::scoring::{rand_benchmark, score_committee};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Greedy,
    Banzhaf,
    Random,
    Opt,
    LpRound,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::Greedy, Rule::Banzhaf, Rule::Random, Rule::Opt, Rule::LpRound];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Greedy => "greedy",
            Rule::Banzhaf => "banzhaf",
            Rule::Random => "random",
            Rule::Opt => "opt",
            Rule::LpRound => "lp-round",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown rule {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub arithmetic: Arithmetic,
    pub enumeration_cap: u128,
}

impl RunOptions {
    pub fn for_m(m: usize) -> Self {
        RunOptions { seed: 0, arithmetic: Arithmetic::auto(m), enumeration_cap: DEFAULT_ENUMERATION_CAP }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub rule: Rule,
    pub committee: Committee,
    pub score: Score,
    pub trace: Option<SelectionTrace>,
}

/// Runs one rule. `random` draws a single seeded committee; `lp-round` uses the automatic solver.
pub fn run_rule<E: Electorate + ?Sized>(rule: Rule, profile: &E, k: usize, s: usize, opts: &RunOptions) -> Result<Outcome> {
    let (committee, trace) = match rule {
        Rule::Greedy => {
            let (t, tr) = greedy_with(profile, k, s, opts.arithmetic)?;
            (t, Some(tr))
        }
        Rule::Banzhaf => {
            let (t, tr) = banzhaf_with(profile, k, s, opts.arithmetic)?;
            (t, Some(tr))
        }
        Rule::Random => (random_committee(profile, k, s, opts.seed, 1)?.best, None),
        Rule::Opt => (brute_force_opt_capped(profile, k, s, opts.enumeration_cap)?.0, None),
        Rule::LpRound => (lp_round_select(profile, k, s, &AutoSolver, opts.seed)?.0, None),
    };
    let score = match (&trace, rule) {
        (Some(tr), Rule::Greedy) => tr.final_score().cloned().map_or_else(|| score_committee(profile, &committee, s), Ok)?,
        _ => score_committee(profile, &committee, s)?,
    };
    Ok(Outcome { rule, committee, score, trace })
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleRow {
    pub rule: Rule,
    pub committee: Committee,
    pub score: Score,
    pub ratio_vs_rand: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_vs_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<SelectionTrace>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub m: usize,
    /// Voters for explicit profiles, voter groups for symmetric ones.
    pub n: usize,
    pub k: usize,
    pub s: usize,
    /// `s(s+1)/2 · (m+1)/(k+1)`, the denominator of every `ratio_vs_rand`.
    pub rand: Score,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt: Option<Score>,
    pub rows: Vec<RuleRow>,
}

/// Runs each rule and fills the ratios. Opt is attached whenever enumeration fits the cap.
pub fn report<E: Electorate + ?Sized>(
    instance: &str,
    profile: &E,
    rules: &[Rule],
    k: usize,
    s: usize,
    opts: &RunOptions,
) -> Result<RunReport> {
    if rules.is_empty() {
        return arg("no rules requested");
    }
    let m = profile.candidate_count();
    let rand = rand_benchmark(m, k, s)?;
    let outcomes = rules.iter().map(|&r| run_rule(r, profile, k, s, opts)).collect::<Result<Vec<_>>>()?;
    let opt = match outcomes.iter().find(|o| o.rule == Rule::Opt) {
        Some(o) => Some(o.score.clone()),
        None => match brute_force_opt_capped(profile, k, s, opts.enumeration_cap) {
            Ok((_, sc)) => Some(sc),
            Err(Error::CapExceeded { .. }) => None,
            Err(e) => return Err(e),
        },
    };
    let rows = outcomes
        .into_iter()
        .map(|o| RuleRow {
            ratio_vs_rand: o.score.to_f64() / rand.to_f64(),
            ratio_vs_opt: opt.as_ref().map(|x| o.score.to_f64() / x.to_f64()),
            rule: o.rule,
            committee: o.committee,
            score: o.score,
            trace: o.trace,
        })
        .collect();
    let n = match profile.view() {
        ProfileView::Explicit(p) => p.voters().len(),
        ProfileView::Symmetric(sp) => sp.groups().len(),
    };
    Ok(RunReport { instance: instance.to_string(), m, n, k, s, rand, opt, rows })
}

/// Numerator and denominator columns; float scores are written with denominator 1.
fn split_score(s: &Score) -> (String, String) {
    match s {
        Score::Exact(r) => (r.numer().to_string(), r.denom().to_string()),
        Score::Approx(x) => (x.to_string(), "1".into()),
    }
}

impl RunReport {
    pub const CSV_HEADER: [&'static str; 10] =
        ["instance", "m", "n", "k", "s", "rule", "score_num", "score_den", "ratio_vs_rand", "ratio_vs_opt"];

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_csv<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> Result<()> {
        for row in &self.rows {
            let (num, den) = split_score(&row.score);
            w.write_record([
                self.instance.clone(),
                self.m.to_string(),
                self.n.to_string(),
                self.k.to_string(),
                self.s.to_string(),
                row.rule.to_string(),
                num,
                den,
                row.ratio_vs_rand.to_string(),
                row.ratio_vs_opt.map(|x| x.to_string()).unwrap_or_default(),
            ])
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::CSV_HEADER).expect("in-memory write");
        self.write_csv(&mut w).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::gen_random;

    #[test]
    fn rule_names_round_trip() {
        for r in Rule::ALL {
            assert_eq!(r.as_str().parse::<Rule>().unwrap(), r);
        }
        assert!("best".parse::<Rule>().is_err());
    }

    #[test]
    fn report_ratios() {
        let p = gen_random(7, 9, 4).unwrap();
        let rep = report("r4", &p, &[Rule::Greedy, Rule::Banzhaf, Rule::Opt], 3, 1, &RunOptions::for_m(7)).unwrap();
        assert_eq!(rep.rand, Score::from_int(2));
        for row in &rep.rows {
            assert!(row.ratio_vs_opt.unwrap() >= 1.0 - 1e-12);
            assert!(row.ratio_vs_rand <= 2.0);
        }
        assert!(rep.rows[1].ratio_vs_rand <= 1.0);
        let csv = rep.to_csv();
        assert!(csv.starts_with("instance,m,n,k,s,rule,score_num,score_den,ratio_vs_rand,ratio_vs_opt\n"));
        assert_eq!(csv.lines().count(), 4);
        assert!(rep.to_json().contains("\"rule\": \"banzhaf\""));
    }

    #[test]
    fn opt_dropped_past_cap() {
        let p = gen_random(7, 3, 1).unwrap();
        let opts = RunOptions { enumeration_cap: 5, ..RunOptions::for_m(7) };
        let rep = report("x", &p, &[Rule::Greedy], 3, 1, &opts).unwrap();
        assert!(rep.opt.is_none() && rep.rows[0].ratio_vs_opt.is_none());
    }
}
