use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use mwelect::diagnostics::{run_rule, Rule, RunOptions};
use mwelect::io;
use mwelect::{brute_force_opt_capped, rand_benchmark, Arithmetic, Error, Score, DEFAULT_ENUMERATION_CAP};
use rayon::prelude::*;
use serde::Deserialize;

use crate::instance::{generate, GenSpec, Runnable};

pub const SCHEMA: u32 = 1;

pub const CSV_HEADER: [&str; 14] = [
    "entry", "family", "rule", "m", "n", "k", "s", "seed", "score_num", "score_den", "score", "ratio_vs_rand",
    "ratio_vs_opt", "wall_ms",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema: u32,
    /// `true` forces exact arithmetic, `false` floats; absent means by size.
    #[serde(default)]
    pub exact: Option<bool>,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    #[serde(default)]
    pub name: Option<String>,
    /// Exactly one of `generator` and `file`.
    #[serde(default)]
    pub generator: Option<GenSpec>,
    #[serde(default)]
    pub file: Option<PathBuf>,
    pub rules: Vec<Rule>,
    /// Committee sizes; defaults to the size the generator was built for.
    #[serde(default)]
    pub k: Vec<usize>,
    #[serde(default)]
    pub s: Vec<usize>,
    /// Each seed drives both the generator and the randomized rules.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl Entry {
    fn family(&self) -> String {
        match (&self.generator, &self.file) {
            (Some(g), _) => g.kind.as_str().to_string(),
            (None, Some(f)) => f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "file".into()),
            (None, None) => "?".into(),
        }
    }
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mf: Manifest = serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("manifest: {e}")))?;
    if mf.schema != SCHEMA {
        bail!(Error::InvalidArgument(format!("manifest schema {} is not supported (expected {SCHEMA})", mf.schema)));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut mf = mf;
    for (i, e) in mf.entries.iter_mut().enumerate() {
        if e.generator.is_some() == e.file.is_some() {
            bail!(Error::InvalidArgument(format!("entry {i}: give exactly one of `generator` and `file`")));
        }
        if e.rules.is_empty() {
            bail!(Error::InvalidArgument(format!("entry {i}: no rules")));
        }
        if let Some(f) = e.file.as_mut().filter(|f| f.is_relative()) {
            *f = base.join(&*f);
        }
        if let Some(c) = e.generator.as_mut().and_then(|g| g.cover.as_mut()).filter(|c| c.is_relative()) {
            *c = base.join(&*c);
        }
    }
    Ok(mf)
}

#[derive(Clone, Debug)]
pub struct Row {
    pub entry: String,
    pub family: String,
    pub rule: Rule,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub seed: u64,
    pub score: Score,
    pub ratio_vs_rand: f64,
    pub ratio_vs_opt: Option<f64>,
    pub wall_ms: f64,
}

impl Row {
    fn record(&self) -> Vec<String> {
        let (num, den) = match &self.score {
            Score::Exact(r) => (r.numer().to_string(), r.denom().to_string()),
            Score::Approx(x) => (x.to_string(), "1".into()),
        };
        vec![
            self.entry.clone(),
            self.family.clone(),
            self.rule.to_string(),
            self.m.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.s.to_string(),
            self.seed.to_string(),
            num,
            den,
            format!("{:.12}", self.score.to_f64()),
            format!("{:.12}", self.ratio_vs_rand),
            self.ratio_vs_opt.map(|x| format!("{x:.12}")).unwrap_or_default(),
            format!("{:.3}", self.wall_ms),
        ]
    }
}

/// One (entry, seed) job: build the instance once, then run every (k, s, rule).
fn run_job(idx: usize, entry: &Entry, seed: u64, exact: Option<bool>) -> Result<Vec<Row>> {
    let (any, nat_k, nat_s) = match (&entry.generator, &entry.file) {
        (Some(g), _) => {
            let g2 = generate(g, seed)?;
            (g2.profile, g2.k, g2.s)
        }
        (None, Some(f)) => {
            let p = io::load(f).with_context(|| format!("loading {}", f.display()))?;
            let s = match &p {
                io::AnyProfile::Explicit { s_default, .. } => *s_default,
                _ => None,
            };
            (p, None, s)
        }
        (None, None) => unreachable!("validated on load"),
    };
    let ks = if entry.k.is_empty() { nat_k.into_iter().collect() } else { entry.k.clone() };
    let ss = if entry.s.is_empty() { vec![nat_s.unwrap_or(1)] } else { entry.s.clone() };
    if ks.is_empty() {
        bail!(Error::InvalidArgument(format!("entry {idx}: no `k` given and the instance has no natural size")));
    }
    let r = Runnable::from_any(any)?;
    let e = r.electorate();
    let m = e.candidate_count();
    let n = match &r {
        Runnable::Explicit(p) => p.voters().len(),
        Runnable::Symmetric(sp) => sp.groups().len(),
    };
    let arithmetic = match exact {
        Some(true) => Arithmetic::Exact,
        Some(false) => Arithmetic::Float,
        None => Arithmetic::auto(m),
    };
    let opts = RunOptions { seed, arithmetic, enumeration_cap: DEFAULT_ENUMERATION_CAP };
    let name = entry.name.clone().unwrap_or_else(|| format!("e{idx}"));
    let family = entry.family();
    let mut rows = Vec::new();
    for &k in &ks {
        for &s in &ss {
            let rand = rand_benchmark(m, k, s)?.to_f64();
            let opt = match brute_force_opt_capped(e, k, s, opts.enumeration_cap) {
                Ok((_, sc)) => Some(sc.to_f64()),
                Err(Error::CapExceeded { .. }) => None,
                Err(err) => return Err(err.into()),
            };
            for &rule in &entry.rules {
                let t0 = Instant::now();
                let out = run_rule(rule, e, k, s, &opts)?;
                let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
                let f = out.score.to_f64();
                rows.push(Row {
                    entry: name.clone(),
                    family: family.clone(),
                    rule,
                    m,
                    n,
                    k,
                    s,
                    seed,
                    ratio_vs_rand: f / rand,
                    ratio_vs_opt: opt.map(|o| f / o),
                    score: out.score,
                    wall_ms,
                });
            }
        }
    }
    Ok(rows)
}

/// Runs every (entry, seed) job on the rayon pool; rows come back in manifest order.
pub fn run(mf: &Manifest) -> Result<Vec<Row>> {
    let jobs: Vec<(usize, u64)> =
        mf.entries.iter().enumerate().flat_map(|(i, e)| e.seeds.iter().map(move |&s| (i, s))).collect();
    let chunks = jobs
        .par_iter()
        .map(|&(i, seed)| run_job(i, &mf.entries[i], seed, mf.exact))
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

pub fn to_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?)
}
