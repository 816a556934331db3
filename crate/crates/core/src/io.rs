//! File formats: plain text and JSON profiles, PrefLib (read-only), symmetric and block
//! profiles, cover instances, and detection by extension and content.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen::CoverInstance;
use crate::profile::{Block, BlockProfile, Candidate, PreferenceProfile, Ranking, SymmetricProfile};
use crate::score::parse_ratio;

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

/// Non-empty lines with their 1-based line numbers, `#` comments stripped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse().or_else(|_| perr(line, format!("expected a number, found {tok:?}")))
}

/// `m n s_default`, then one ranking per line (candidate ids, best first), each
/// optionally prefixed by `w=<weight>`.
pub fn parse_text(text: &str) -> Result<(PreferenceProfile, usize)> {
    let mut it = lines(text);
    let Some((ln, head)) = it.next() else { return perr(1, "empty file") };
    let h: Vec<&str> = head.split_whitespace().collect();
    if h.len() != 3 {
        return perr(ln, "header must be `m n s`");
    }
    let (m, n, s): (usize, usize, usize) = (num(ln, h[0])?, num(ln, h[1])?, num(ln, h[2])?);
    let mut voters = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (ln, l) in it {
        if voters.len() == n {
            return perr(ln, format!("more than the declared {n} voters"));
        }
        let mut toks = l.split_whitespace().peekable();
        let w = match toks.peek().and_then(|t| t.strip_prefix("w=")) {
            Some(w) => {
                let w = num(ln, w)?;
                toks.next();
                w
            }
            None => 1,
        };
        let order = toks.map(|t| num(ln, t)).collect::<Result<Vec<Candidate>>>()?;
        if order.len() != m {
            return perr(ln, format!("ranking lists {} candidates, expected {m}", order.len()));
        }
        voters.push(Ranking::from_order(&order).or_else(|e| perr(ln, e.to_string()))?);
        weights.push(w);
    }
    if voters.len() != n {
        return perr(text.lines().count(), format!("found {} voters, header declares {n}", voters.len()));
    }
    Ok((PreferenceProfile::new(m, voters, Some(weights))?, s))
}

pub fn to_text(p: &PreferenceProfile, s_default: usize) -> String {
    let mut out = format!("{} {} {}\n", p.m(), p.voters().len(), s_default);
    let unweighted = p.is_unweighted();
    for (v, w) in p.voters().iter().zip(p.weights()) {
        let ids: Vec<String> = v.order().map(|c| c.to_string()).collect();
        if unweighted {
            out.push_str(&format!("{}\n", ids.join(" ")));
        } else {
            out.push_str(&format!("w={w} {}\n", ids.join(" ")));
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ExplicitJson {
    m: usize,
    voters: Vec<Vec<Candidate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<u64>>,
}

pub fn parse_json(text: &str) -> Result<PreferenceProfile> {
    let j: ExplicitJson = serde_json::from_str(text)?;
    let voters = j.voters.iter().map(|o| Ranking::from_order(o)).collect::<Result<Vec<_>>>()?;
    PreferenceProfile::new(j.m, voters, j.weights)
}

pub fn to_json(p: &PreferenceProfile) -> String {
    let j = ExplicitJson {
        m: p.m(),
        voters: p.voters().iter().map(|v| v.order().collect()).collect(),
        weights: Some(p.weights().to_vec()),
    };
    serde_json::to_string(&j).expect("plain data serializes")
}

/// PrefLib strict complete orders, in either the current `count: a,b,c` layout with
/// `#` metadata or the legacy layout with a candidate table. Ids are 1-based in the
/// file and become 0-based; counts become weights.
pub fn parse_preflib(text: &str) -> Result<PreferenceProfile> {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.trim_start().starts_with('#') {
        parse_preflib_current(text)
    } else {
        parse_preflib_legacy(text)
    }
}

fn parse_order(ln: usize, items: &[&str]) -> Result<Vec<Candidate>> {
    items
        .iter()
        .map(|t| {
            let t = t.trim();
            if t.contains('{') || t.contains('}') {
                return perr(ln, "ties are not supported");
            }
            let id: usize = num(ln, t)?;
            if id == 0 {
                return perr(ln, "PrefLib candidate ids start at 1");
            }
            Ok(id - 1)
        })
        .collect()
}

fn parse_preflib_current(text: &str) -> Result<PreferenceProfile> {
    let mut m = None;
    let mut orders = Vec::new();
    let mut weights = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(meta) = l.strip_prefix('#') {
            if let Some(v) = meta.trim().strip_prefix("NUMBER ALTERNATIVES:") {
                m = Some(num::<usize>(ln, v.trim())?);
            }
            continue;
        }
        let Some((count, rest)) = l.split_once(':') else { return perr(ln, "expected `count: ranking`") };
        let order = parse_order(ln, &rest.split(',').collect::<Vec<_>>())?;
        weights.push(num(ln, count.trim())?);
        orders.push((ln, order));
    }
    let m = match m {
        Some(m) => m,
        None => orders.first().map_or(0, |o| o.1.len()),
    };
    build_preflib(m, orders, weights)
}

fn parse_preflib_legacy(text: &str) -> Result<PreferenceProfile> {
    let mut it = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let Some((ln, head)) = it.next() else { return perr(1, "empty file") };
    let m: usize = num(ln, head)?;
    for _ in 0..m {
        if it.next().is_none() {
            return perr(ln, "candidate table is truncated");
        }
    }
    if it.next().is_none() {
        return perr(ln, "missing voter summary line");
    }
    let mut orders = Vec::new();
    let mut weights = Vec::new();
    for (ln, l) in it {
        let parts: Vec<&str> = l.split(',').collect();
        weights.push(num(ln, parts[0].trim())?);
        orders.push((ln, parse_order(ln, &parts[1..])?));
    }
    build_preflib(m, orders, weights)
}

fn build_preflib(m: usize, orders: Vec<(usize, Vec<Candidate>)>, weights: Vec<u64>) -> Result<PreferenceProfile> {
    let mut voters = Vec::with_capacity(orders.len());
    for (ln, o) in orders {
        if o.len() != m {
            return perr(ln, format!("ranking lists {} candidates, expected {m} (only complete orders)", o.len()));
        }
        voters.push(Ranking::from_order(&o).or_else(|e| perr(ln, e.to_string()))?);
    }
    PreferenceProfile::new(m, voters, Some(weights))
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    weight: String,
    placed: BTreeMap<Candidate, u32>,
}

#[derive(Serialize, Deserialize)]
struct SymmetricJson {
    m: usize,
    critical: Vec<Candidate>,
    groups: Vec<GroupJson>,
}

pub fn parse_symmetric_json(text: &str) -> Result<SymmetricProfile> {
    let j: SymmetricJson = serde_json::from_str(text)?;
    let groups = j
        .groups
        .into_iter()
        .map(|g| Ok((parse_ratio(&g.weight)?, g.placed)))
        .collect::<Result<Vec<(BigRational, _)>>>()?;
    SymmetricProfile::new(j.m, j.critical, groups)
}

pub fn symmetric_to_json(sp: &SymmetricProfile) -> String {
    let j = SymmetricJson {
        m: sp.m(),
        critical: sp.critical().to_vec(),
        groups: sp
            .groups()
            .iter()
            .map(|g| GroupJson {
                weight: format!("{}/{}", g.weight().numer(), g.weight().denom()),
                placed: sp.critical().iter().copied().zip(g.ranks().iter().copied()).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&j).expect("plain data serializes")
}

#[derive(Serialize, Deserialize)]
struct BlockJson {
    name: String,
    members: Vec<Candidate>,
    slots: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct BlocksJson {
    m: usize,
    blocks: Vec<BlockJson>,
}

pub fn parse_block_json(text: &str) -> Result<BlockProfile> {
    let j: BlocksJson = serde_json::from_str(text)?;
    let blocks = j.blocks.into_iter().map(|b| Block { name: b.name, members: b.members, slots: b.slots }).collect();
    BlockProfile::new(j.m, blocks)
}

pub fn block_to_json(bp: &BlockProfile) -> String {
    let j = BlocksJson {
        m: bp.m(),
        blocks: bp
            .blocks()
            .iter()
            .map(|b| BlockJson { name: b.name.clone(), members: b.members.clone(), slots: b.slots.clone() })
            .collect(),
    };
    serde_json::to_string(&j).expect("plain data serializes")
}

/// `n_u z k_c`, then one line of element ids per set.
pub fn parse_cover(text: &str) -> Result<CoverInstance> {
    let mut it = lines(text);
    let Some((ln, head)) = it.next() else { return perr(1, "empty file") };
    let h: Vec<&str> = head.split_whitespace().collect();
    if h.len() != 3 {
        return perr(ln, "header must be `n_u z k_c`");
    }
    let (n_u, z, k): (usize, usize, usize) = (num(ln, h[0])?, num(ln, h[1])?, num(ln, h[2])?);
    let mut sets = Vec::with_capacity(z);
    let mut last = ln;
    for (ln, l) in it {
        last = ln;
        sets.push(l.split_whitespace().map(|t| num(ln, t)).collect::<Result<Vec<usize>>>()?);
    }
    if sets.len() != z {
        return perr(last, format!("found {} sets, header declares {z}", sets.len()));
    }
    CoverInstance::new(n_u, sets, k)
}

pub fn cover_to_text(c: &CoverInstance) -> String {
    let mut out = format!("{} {} {}\n", c.universe(), c.z(), c.k());
    for s in c.sets() {
        let ids: Vec<String> = s.iter().map(|e| e.to_string()).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

/// Any profile the tools read.
#[derive(Clone, Debug)]
pub enum AnyProfile {
    Explicit { profile: PreferenceProfile, s_default: Option<usize> },
    Symmetric(SymmetricProfile),
    Block(BlockProfile),
}

impl AnyProfile {
    pub fn m(&self) -> usize {
        match self {
            AnyProfile::Explicit { profile, .. } => profile.m(),
            AnyProfile::Symmetric(sp) => sp.m(),
            AnyProfile::Block(bp) => bp.m(),
        }
    }
}

/// Picks the reader from the extension (`.json`, PrefLib `.soc`/`.toc`/`.soi`/`.toi`)
/// and, for JSON, from the top-level keys.
pub fn parse_any(name: &str, text: &str) -> Result<AnyProfile> {
    let ext = Path::new(name).extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    match ext.as_str() {
        "json" => {
            let v: serde_json::Value = serde_json::from_str(text)?;
            if v.get("groups").is_some() {
                Ok(AnyProfile::Symmetric(parse_symmetric_json(text)?))
            } else if v.get("blocks").is_some() {
                Ok(AnyProfile::Block(parse_block_json(text)?))
            } else {
                Ok(AnyProfile::Explicit { profile: parse_json(text)?, s_default: None })
            }
        }
        "soc" | "soi" | "toc" | "toi" => Ok(AnyProfile::Explicit { profile: parse_preflib(text)?, s_default: None }),
        _ => {
            let (profile, s) = parse_text(text)?;
            Ok(AnyProfile::Explicit { profile, s_default: Some(s) })
        }
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<AnyProfile> {
    let path = path.as_ref();
    parse_any(&path.to_string_lossy(), &fs::read_to_string(path)?)
}

/// Writes JSON for `.json` paths and the text format otherwise (explicit profiles only).
pub fn save(profile: &AnyProfile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = path.extension().is_some_and(|e| e == "json");
    let body = match profile {
        AnyProfile::Explicit { profile, s_default } => {
            if json {
                to_json(profile)
            } else {
                to_text(profile, s_default.unwrap_or(1))
            }
        }
        AnyProfile::Symmetric(sp) if json => symmetric_to_json(sp),
        AnyProfile::Block(bp) if json => block_to_json(bp),
        _ => return Err(Error::InvalidArgument("symmetric and block profiles are written as .json".into())),
    };
    write_atomic(path, body.as_bytes())
}

/// Writes to a sibling temporary file and renames it over `path`, so readers never
/// see a partial file.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let name = path.file_name().ok_or_else(|| Error::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    if let Err(e) = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path)) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_core_counterexample, gen_monotonicity_gap, gen_random};

    #[test]
    fn text_round_trip() {
        let p = gen_random(5, 4, 1).unwrap();
        let (q, s) = parse_text(&to_text(&p, 2)).unwrap();
        assert_eq!((p.clone(), 2), (q, s));
        let w = p.with_weights(vec![1, 3, 1, 2]).unwrap();
        let txt = to_text(&w, 1);
        assert!(txt.lines().nth(2).unwrap().starts_with("w=3 "));
        assert_eq!(parse_text(&txt).unwrap().0, w);
    }

    #[test]
    fn text_errors_carry_lines() {
        let e = parse_text("3 2 1\n0 1 2\n0 0 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_text("3 2 1\n0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_text("3 3 1\n0 1 2\n").is_err());
        assert!(parse_text("").is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = gen_random(6, 3, 2).unwrap().with_weights(vec![2, 1, 5]).unwrap();
        assert_eq!(parse_json(&to_json(&p)).unwrap(), p);
        let bare = parse_json(r#"{"m":2,"voters":[[1,0]]}"#).unwrap();
        assert!(bare.is_unweighted());
    }

    #[test]
    fn preflib_counts_become_weights() {
        let current = "# FILE NAME: x.soc\n# NUMBER ALTERNATIVES: 3\n4: 1,2,3\n2: 3,1,2\n";
        let p = parse_preflib(current).unwrap();
        assert_eq!(p.weights(), &[4, 2]);
        assert_eq!(p.voters()[1].top(), 2);
        let legacy = "3\n1,a\n2,b\n3,c\n6,6,2\n4,1,2,3\n2,3,1,2\n";
        assert_eq!(parse_preflib(legacy).unwrap(), p);
        assert!(parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,1,2\n").is_err());
        assert!(parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,{2,3}\n").is_err());
    }

    #[test]
    fn symmetric_and_block_round_trip() {
        let sp = gen_core_counterexample(16).unwrap();
        let txt = symmetric_to_json(&sp);
        assert!(txt.contains(r#""weight":"1/3""#));
        let back = parse_symmetric_json(&txt).unwrap();
        assert_eq!(symmetric_to_json(&back), txt);
        let bp = gen_monotonicity_gap(40, 0.377, 0.552).unwrap().profile;
        assert_eq!(parse_block_json(&block_to_json(&bp)).unwrap(), bp);
        assert!(matches!(parse_any("a.json", &txt).unwrap(), AnyProfile::Symmetric(_)));
        assert!(matches!(parse_any("a.json", &block_to_json(&bp)).unwrap(), AnyProfile::Block(_)));
    }

    #[test]
    fn cover_round_trip() {
        let c = CoverInstance::new(4, vec![vec![0, 1], vec![2, 3], vec![1, 2]], 2).unwrap();
        assert_eq!(parse_cover(&cover_to_text(&c)).unwrap(), c);
        assert!(parse_cover("4 2 2\n0 1\n").is_err());
    }

    #[test]
    fn save_and_load_files() {
        let dir = std::env::temp_dir().join(format!("mwelect-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = gen_random(4, 3, 3).unwrap();
        for name in ["p.txt", "p.json"] {
            let path = dir.join(name);
            save(&AnyProfile::Explicit { profile: p.clone(), s_default: Some(2) }, &path).unwrap();
            match load(&path).unwrap() {
                AnyProfile::Explicit { profile, .. } => assert_eq!(profile, p),
                other => panic!("{other:?}"),
            }
        }
        let sp = AnyProfile::Symmetric(gen_core_counterexample(9).unwrap());
        assert!(save(&sp, dir.join("s.txt")).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }
}
