use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use mwelect::gen::{
    core_counterexample_k, gen_all_permutations, gen_core_counterexample, gen_from_cover, gen_monotonicity_gap,
    gen_random, gen_sborda_bad, gen_spiral, CoverOptions, SpiralParams, DEFAULT_GAP_A, DEFAULT_GAP_B,
};
use mwelect::io::{self, AnyProfile};
use mwelect::{Electorate, SymmetricProfile};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Random,
    Allperm,
    Spiral,
    MonotoneGap,
    CoreCex,
    SbordaBad,
    FromCover,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Random => "random",
            Kind::Allperm => "allperm",
            Kind::Spiral => "spiral",
            Kind::MonotoneGap => "monotone-gap",
            Kind::CoreCex => "core-cex",
            Kind::SbordaBad => "sborda-bad",
            Kind::FromCover => "from-cover",
        }
    }
}

/// Generator parameters; shared by `gen` flags and manifest entries.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    #[serde(default)]
    pub m: Option<usize>,
    /// Voters (random).
    #[arg(long)]
    #[serde(default)]
    pub n: Option<usize>,
    /// Committee size (sborda-bad).
    #[arg(long)]
    #[serde(default)]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub s: Option<usize>,
    /// Cover instance file (from-cover).
    #[arg(long)]
    #[serde(default)]
    pub cover: Option<PathBuf>,
    #[arg(long)]
    #[serde(default)]
    pub eps: Option<f64>,
    /// Spiral turns.
    #[arg(long)]
    #[serde(default)]
    pub layers: Option<usize>,
    /// Angular cells per spiral turn.
    #[arg(long)]
    #[serde(default)]
    pub resolution: Option<usize>,
    /// Spiral scale, or the lower edge of the inner block (monotone-gap).
    #[arg(long)]
    #[serde(default)]
    pub a: Option<f64>,
    /// Upper edge of the inner block (monotone-gap).
    #[arg(long)]
    #[serde(default)]
    pub b: Option<f64>,
}

pub struct Generated {
    pub profile: AnyProfile,
    /// Committee size the construction is built for, if any.
    pub k: Option<usize>,
    pub s: Option<usize>,
}

fn need<T>(v: Option<T>, flag: &str, kind: Kind) -> Result<T> {
    match v {
        Some(v) => Ok(v),
        None => bail!(mwelect::Error::InvalidArgument(format!("--{flag} is required for --kind {}", kind.as_str()))),
    }
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<Generated> {
    let kind = spec.kind;
    let g = match kind {
        Kind::Random => {
            let p = gen_random(need(spec.m, "m", kind)?, need(spec.n, "n", kind)?, seed)?;
            Generated { profile: AnyProfile::Explicit { profile: p, s_default: spec.s }, k: spec.k, s: spec.s }
        }
        Kind::Allperm => {
            let p = gen_all_permutations(need(spec.m, "m", kind)?)?;
            Generated { profile: AnyProfile::Explicit { profile: p, s_default: spec.s }, k: spec.k, s: spec.s }
        }
        Kind::Spiral => {
            let params = SpiralParams::new(
                spec.layers.unwrap_or(8),
                spec.a.unwrap_or(0.3),
                spec.resolution.unwrap_or(1000),
                spec.m.unwrap_or(100_000),
            );
            let inst = gen_spiral(&params)?;
            Generated { profile: AnyProfile::Symmetric(inst.profile), k: Some(inst.k), s: Some(1) }
        }
        Kind::MonotoneGap => {
            let g = gen_monotonicity_gap(
                need(spec.m, "m", kind)?,
                spec.a.unwrap_or(DEFAULT_GAP_A),
                spec.b.unwrap_or(DEFAULT_GAP_B),
            )?;
            Generated { profile: AnyProfile::Block(g.profile), k: spec.k, s: Some(1) }
        }
        Kind::CoreCex => {
            let m = need(spec.m, "m", kind)?;
            let sp = gen_core_counterexample(m)?;
            Generated { profile: AnyProfile::Symmetric(sp), k: Some(core_counterexample_k(m)), s: Some(1) }
        }
        Kind::SbordaBad => {
            let (k, s) = (need(spec.k, "k", kind)?, need(spec.s, "s", kind)?);
            let sp = gen_sborda_bad(need(spec.m, "m", kind)?, k, s)?;
            Generated { profile: AnyProfile::Symmetric(sp), k: Some(k), s: Some(s) }
        }
        Kind::FromCover => {
            let path = need(spec.cover.as_ref(), "cover", kind)?;
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cover = io::parse_cover(&text)?;
            let cp = gen_from_cover(&cover, &CoverOptions::new(need(spec.eps, "eps", kind)?, seed))?;
            Generated {
                profile: AnyProfile::Explicit { profile: cp.profile, s_default: Some(1) },
                k: Some(cover.k()),
                s: Some(1),
            }
        }
    };
    Ok(g)
}

/// Serialized form: JSON for symmetric and block profiles (and explicit ones bound for
/// a `.json` path), the text format otherwise.
pub fn render(p: &AnyProfile, json: bool) -> String {
    match p {
        AnyProfile::Explicit { profile, s_default } => {
            if json {
                io::to_json(profile)
            } else {
                io::to_text(profile, s_default.unwrap_or(1))
            }
        }
        AnyProfile::Symmetric(sp) => io::symmetric_to_json(sp),
        AnyProfile::Block(bp) => io::block_to_json(bp),
    }
}

/// Rules run on explicit and symmetric profiles; a block profile is rewritten with
/// whichever block is small enough to enumerate as the critical one.
pub enum Runnable {
    Explicit(mwelect::PreferenceProfile),
    Symmetric(SymmetricProfile),
}

impl Runnable {
    pub fn from_any(p: AnyProfile) -> Result<Self> {
        Ok(match p {
            AnyProfile::Explicit { profile, .. } => Runnable::Explicit(profile),
            AnyProfile::Symmetric(sp) => Runnable::Symmetric(sp),
            AnyProfile::Block(bp) => {
                let sp = bp.to_symmetric(0).or_else(|_| bp.to_symmetric(1))?;
                Runnable::Symmetric(sp)
            }
        })
    }

    pub fn electorate(&self) -> &dyn Electorate {
        match self {
            Runnable::Explicit(p) => p,
            Runnable::Symmetric(sp) => sp,
        }
    }
}
