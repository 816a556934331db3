use num_bigint::BigInt;

use crate::error::{arg, Result};
use crate::kernel::sweep_multi;
use crate::profile::{Block, BlockProfile};
use crate::score::{Arithmetic, Numeric, Score};

pub const DEFAULT_GAP_A: f64 = 0.377;
pub const DEFAULT_GAP_B: f64 = 0.552;

/// Two exchangeable blocks: `X` on ranks `⌈am⌉..=⌊bm⌋`, `Y` on the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneGap {
    pub profile: BlockProfile,
    pub a: f64,
    pub b: f64,
}

impl MonotoneGap {
    pub const X: usize = 0;
    pub const Y: usize = 1;

    /// Exact score of any committee with `x` members from `X` and `y` from `Y`.
    pub fn score(&self, x: usize, y: usize, s: usize) -> Result<Score> {
        score_blocks(&self.profile, &[x, y], s, Arithmetic::auto(self.profile.m()))
    }
}

/// X takes the lowest ids.
pub fn gen_monotonicity_gap(m: usize, a: f64, b: f64) -> Result<MonotoneGap> {
    if !(0.0 < a && a < b && b < 1.0) {
        return arg(format!("need 0 < a < b < 1, got a={a}, b={b}"));
    }
    let lo = ((a * m as f64).ceil() as u32).max(1);
    let hi = ((b * m as f64).floor() as u32).min(m as u32);
    if lo > hi || (hi - lo + 1) as usize == m {
        return arg(format!("m={m} too small to separate the blocks"));
    }
    let xs: Vec<u32> = (lo..=hi).collect();
    let ys: Vec<u32> = (1..=m as u32).filter(|r| *r < lo || *r > hi).collect();
    let nx = xs.len();
    let profile = BlockProfile::new(
        m,
        vec![
            Block { name: "X".into(), members: (0..nx).collect(), slots: xs },
            Block { name: "Y".into(), members: (nx..m).collect(), slots: ys },
        ],
    )?;
    Ok(MonotoneGap { profile, a, b })
}

/// Expected padded s-Borda score of a committee drawing `counts[i]` members from block `i`.
pub fn score_blocks(bp: &BlockProfile, counts: &[usize], s: usize, mode: Arithmetic) -> Result<Score> {
    if counts.len() != bp.blocks().len() {
        return arg("one count per block required");
    }
    let k: usize = counts.iter().sum();
    if s == 0 || k < s {
        return arg(format!("committee of size {k} cannot supply s={s}"));
    }
    let m = bp.m();
    let mut class = vec![None; m + 1];
    let mut pools = Vec::new();
    for (i, (blk, &c)) in bp.blocks().iter().zip(counts).enumerate() {
        if c > blk.members.len() {
            return arg(format!("block {} has only {} members", blk.name, blk.members.len()));
        }
        for &r in &blk.slots {
            class[r as usize] = Some(Some(i));
        }
        pools.push((blk.slots.len() as u64, c as u64));
    }
    Ok(match mode {
        Arithmetic::Exact => {
            let (n, d) = sweep_multi::<BigInt>(m as u32, &class, &pools, s as u32);
            BigInt::to_score(&n, &d)
        }
        Arithmetic::Float => {
            let (n, d) = sweep_multi::<f64>(m as u32, &class, &pools, s as u32);
            f64::to_score(&n, &d)
        }
    })
}
