//! Hypergeometric order-statistic sums.
//!
//! A committee's rank set for one voter is `fixed ∪ draw`, where `draw` is a
//! uniform `d`-subset of a pool of ranks. With `X_t` the number of committee
//! ranks below `t`, the (padded) sum of the `s` smallest ranks is
//! `Σ_{t=1}^{m+1} (s − X_t)^+`; missing slots count as rank `m + 1`.
//! Everything here returns numerators over the walker scale `C(|pool|, d)`
//! (exact path) or over 1 (float path).

use crate::score::Numeric;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Fixed,
    Pool,
    Other,
}

/// Weights `C(p,h)·C(P−p,d−h)` for `h = 0..=hcap`, advanced one pool success at a time.
#[derive(Clone, Debug)]
pub(crate) struct Walker<N> {
    pool: u64,
    draws: u64,
    p: u64,
    w: Vec<N>,
    scale: N,
}

impl<N: Numeric> Walker<N> {
    pub fn new(pool: u64, draws: u64, hcap: usize) -> Self {
        assert!(draws <= pool, "draws exceed pool");
        let scale = N::hypergeom_scale(pool, draws);
        let mut w = vec![N::zero(); hcap + 1];
        w[0] = scale.clone();
        Walker { pool, draws, p: 0, w, scale }
    }

    pub fn scale(&self) -> &N {
        &self.scale
    }

    pub fn weights(&self) -> &[N] {
        &self.w
    }

    pub fn advance(&mut self) {
        let rem = self.pool - self.p;
        assert!(rem > 0, "walker advanced past its pool");
        let d = self.draws as i64;
        let rem_n = N::from_u64(rem);
        for h in (0..self.w.len()).rev() {
            let hi = h as i64;
            let mut v = self.w[h].clone() * N::from_i64(rem as i64 - d + hi);
            if h > 0 {
                v += &(self.w[h - 1].clone() * N::from_i64(d - hi + 1));
            }
            self.w[h] = v.div_exact(&rem_n);
        }
        self.p += 1;
    }

    /// Advances `steps` times; constant-time for `d ≤ 1`.
    pub fn jump(&mut self, steps: u64) {
        if self.draws <= 1 {
            self.p += steps;
            if self.draws == 1 {
                let pn = N::from_u64(self.pool);
                self.w[0] = (self.scale.clone() * N::from_u64(self.pool - self.p)).div_exact(&pn);
                if self.w.len() > 1 {
                    self.w[1] = (self.scale.clone() * N::from_u64(self.p)).div_exact(&pn);
                }
            }
        } else {
            for _ in 0..steps {
                self.advance();
            }
        }
    }

    /// Numerator of `E[(c − H)^+]`.
    pub fn e_term(&self, c: i64) -> N {
        let mut acc = N::zero();
        for h in 0..(c.max(0) as usize).min(self.w.len()) {
            acc += &(self.w[h].clone() * N::from_i64(c - h as i64));
        }
        acc
    }

    /// Numerator of `Pr[H ≤ c − 1]`.
    pub fn p_term(&self, c: i64) -> N {
        let mut acc = N::zero();
        for h in 0..(c.max(0) as usize).min(self.w.len()) {
            acc += &self.w[h];
        }
        acc
    }

    /// Sums of `e_term(c)` and `p_term(c)` over the next `len` pool successes
    /// (evaluated before each advance), then advances by `len`.
    fn run(&mut self, len: u64, c: i64, e: &mut N, pr: &mut N) {
        if len == 0 {
            return;
        }
        if c <= 0 {
            self.jump(len);
            return;
        }
        match self.draws {
            0 => {
                let l = N::from_u64(len);
                *e += &(self.e_term(c) * &l);
                *pr += &(self.p_term(c) * &l);
            }
            1 => {
                // w0 = scale·(P−p)/P, w1 = scale·p/P along the run.
                let pool = self.pool as i64;
                let (l, p0) = (len as i64, self.p as i64);
                let tri = l * (l - 1) / 2;
                let pn = N::from_u64(self.pool);
                let s0 = (self.scale.clone() * N::from_i64(l * (pool - p0) - tri)).div_exact(&pn);
                let s1 = (self.scale.clone() * N::from_i64(l * p0 + tri)).div_exact(&pn);
                if c == 1 {
                    *e += &s0;
                    *pr += &s0;
                } else {
                    *e += &(s0.clone() * N::from_i64(c) + s1.clone() * N::from_i64(c - 1));
                    *pr += &(s0 + s1);
                }
                self.jump(len);
            }
            _ => {
                for _ in 0..len {
                    *e += &self.e_term(c);
                    *pr += &self.p_term(c);
                    self.advance();
                }
            }
        }
    }
}

/// Result of a sweep: `total` is the expected padded sum, `cum[i]` the running
/// sum of `Pr[X_t ≤ s − 1]` over `t ≤ marks[i].0` (only up to the stopping
/// mark). Both over `scale`.
#[derive(Clone, Debug)]
pub(crate) struct Sweep<N> {
    pub total: N,
    pub tail_total: N,
    pub cum: Vec<N>,
    pub scale: N,
}

impl<N: Numeric> Sweep<N> {
    /// Numerator of `Σ_{t > marks[i].0} Pr[X_t ≤ s − 1]`; zero past the point
    /// where `s` fixed ranks were seen.
    pub fn tail_after(&self, i: usize) -> N {
        match self.cum.get(i) {
            Some(c) => self.tail_total.clone() - c.clone(),
            None => N::zero(),
        }
    }
}

/// Sweeps `t = 1..=m+1`. Ranks listed in `marks` (sorted, distinct) have the
/// given kind; all other ranks in `1..=m` have kind `default`. `pool` must equal
/// the number of `Pool` ranks.
pub(crate) fn sweep<N: Numeric>(
    m: u32,
    marks: impl IntoIterator<Item = (u32, Kind)>,
    default: Kind,
    pool: u64,
    draws: u64,
    s: u32,
    want_cum: bool,
) -> Sweep<N> {
    let s = s as i64;
    let mut walker = Walker::<N>::new(pool, draws, s.max(1) as usize - 1);
    let mut total = N::zero();
    let mut tail = N::zero();
    let mut cum = Vec::new();
    let mut f: i64 = 0;
    let mut next_t: u32 = 1;
    let mut stopped = false;
    for (r, kind) in marks {
        if !stopped {
            let len = (r - next_t) as u64;
            run_default(&mut walker, default, len, s - f, &mut total, &mut tail);
            let c = s - f;
            total += &walker.e_term(c);
            tail += &walker.p_term(c);
            match kind {
                Kind::Fixed => f += 1,
                Kind::Pool => walker.advance(),
                Kind::Other => {}
            }
            next_t = r + 1;
            if f >= s {
                stopped = true;
            }
        }
        if want_cum {
            cum.push(tail.clone());
        }
        if stopped {
            break;
        }
    }
    if !stopped {
        let len = (m + 1 - next_t) as u64;
        run_default(&mut walker, default, len, s - f, &mut total, &mut tail);
        let c = s - f;
        total += &walker.e_term(c);
        tail += &walker.p_term(c);
    }
    Sweep { total, tail_total: tail, cum, scale: walker.scale().clone() }
}

fn run_default<N: Numeric>(w: &mut Walker<N>, default: Kind, len: u64, c: i64, e: &mut N, pr: &mut N) {
    match default {
        Kind::Pool => w.run(len, c, e, pr),
        Kind::Other | Kind::Fixed => {
            debug_assert!(default != Kind::Fixed);
            if c > 0 && len > 0 {
                let l = N::from_u64(len);
                *e += &(w.e_term(c) * &l);
                *pr += &(w.p_term(c) * &l);
            }
        }
    }
}

/// Several independent pools. `kind_of(r)` gives `None` for fixed ranks,
/// `Some(i)` for pool `i`, and ranks absent from every pool and from `fixed`
/// are ignored. Returns `(numerator, denominator)` of the padded expected sum.
pub(crate) fn sweep_multi<N: Numeric>(
    m: u32,
    class: &[Option<Option<usize>>],
    pools: &[(u64, u64)],
    s: u32,
) -> (N, N) {
    let s = s as i64;
    let hcap = s.max(1) as usize - 1;
    let mut walkers: Vec<Walker<N>> = pools.iter().map(|&(p, d)| Walker::new(p, d, hcap)).collect();
    let den = walkers.iter().fold(N::one(), |acc, w| acc * w.scale());
    let mut total = N::zero();
    let mut f: i64 = 0;
    for t in 1..=m + 1 {
        let c = s - f;
        if c <= 0 {
            break;
        }
        // Truncated convolution of the pool counts.
        let mut dist = vec![N::zero(); hcap + 1];
        dist[0] = N::one();
        for w in &walkers {
            let mut next = vec![N::zero(); hcap + 1];
            for (a, da) in dist.iter().enumerate() {
                for (b, wb) in w.weights().iter().enumerate() {
                    if a + b > hcap {
                        break;
                    }
                    next[a + b] += &(da.clone() * wb);
                }
            }
            dist = next;
        }
        for (h, v) in dist.iter().enumerate().take(c as usize) {
            total += &(v.clone() * N::from_i64(c - h as i64));
        }
        if t <= m {
            match class[t as usize] {
                Some(None) => f += 1,
                Some(Some(i)) => walkers[i].advance(),
                None => {}
            }
        }
    }
    (total, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn subsets(pool: &[u32], d: usize) -> Vec<Vec<u32>> {
        if d == 0 {
            return vec![vec![]];
        }
        if pool.len() < d {
            return vec![];
        }
        let mut out = subsets(&pool[1..], d);
        for mut rest in subsets(&pool[1..], d - 1) {
            rest.push(pool[0]);
            out.push(rest);
        }
        out
    }

    /// Padded sum oracle by enumeration.
    fn oracle(m: u32, fixed: &[u32], pool: &[u32], d: usize, s: usize) -> BigRational {
        let draws = subsets(pool, d);
        let mut acc = BigInt::from(0);
        for dr in &draws {
            let mut all: Vec<u32> = fixed.iter().chain(dr).copied().collect();
            all.sort_unstable();
            all.resize(all.len().max(s), m + 1);
            acc += all[..s].iter().map(|&r| r as u64).sum::<u64>();
        }
        BigRational::new(acc, BigInt::from(draws.len()))
    }

    fn layout(m: u32, fixed: &[u32], pool: &[u32]) -> Vec<(u32, Kind)> {
        let mut marks: Vec<(u32, Kind)> = fixed
            .iter()
            .map(|&r| (r, Kind::Fixed))
            .chain(pool.iter().map(|&r| (r, Kind::Pool)))
            .collect();
        marks.sort_unstable_by_key(|x| x.0);
        assert!(marks.last().map_or(true, |x| x.0 <= m));
        marks
    }

    #[test]
    fn sweep_matches_enumeration() {
        let m = 9u32;
        let cases: &[(&[u32], &[u32])] = &[
            (&[], &[1, 2, 3, 4, 5, 6, 7, 8, 9]),
            (&[3], &[1, 2, 4, 5]),
            (&[2, 7], &[1, 3, 4, 8, 9]),
            (&[5], &[1, 2, 3, 4, 6, 7, 8, 9]),
            (&[1, 2, 3], &[]),
        ];
        for &(fixed, pool) in cases {
            for d in 0..=pool.len() {
                for s in 1..=4usize {
                    let want = oracle(m, fixed, pool, d, s);
                    let marks = layout(m, fixed, pool);
                    let sw = sweep::<BigInt>(m, marks.iter().copied(), Kind::Other, pool.len() as u64, d as u64, s as u32, false);
                    assert_eq!(BigRational::new(sw.total, sw.scale), want, "{fixed:?} {pool:?} d={d} s={s}");
                    let fl = sweep::<f64>(m, marks.iter().copied(), Kind::Other, pool.len() as u64, d as u64, s as u32, false);
                    let w = crate::score::ratio_to_f64(&want);
                    assert!((fl.total / fl.scale - w).abs() < 1e-9 * w);
                }
            }
        }
    }

    #[test]
    fn complement_default_matches_explicit_pool() {
        // Fixed {4}, other {2, 9}, pool = everything else in 1..=10.
        let m = 10u32;
        let marks = vec![(2, Kind::Other), (4, Kind::Fixed), (9, Kind::Other)];
        let pool: Vec<u32> = (1..=m).filter(|r| ![2, 4, 9].contains(r)).collect();
        for d in 0..=pool.len() {
            for s in 1..=3usize {
                let want = oracle(m, &[4], &pool, d, s);
                let sw = sweep::<BigInt>(m, marks.iter().copied(), Kind::Pool, pool.len() as u64, d as u64, s as u32, true);
                assert_eq!(BigRational::new(sw.total, sw.scale), want, "d={d} s={s}");
                let mm = sweep_multi::<BigInt>(
                    m,
                    &(0..=m)
                        .map(|r| match r {
                            4 => Some(None),
                            2 | 9 | 0 => None,
                            _ => Some(Some(0)),
                        })
                        .collect::<Vec<_>>(),
                    &[(pool.len() as u64, d as u64)],
                    s as u32,
                );
                assert_eq!(BigRational::new(mm.0, mm.1), want);
            }
        }
    }

    #[test]
    fn tail_is_marginal_of_adding_a_rank() {
        // Adding rank 9 (an "other" mark) as fixed changes the padded sum by −tail.
        let m = 12u32;
        let marks = vec![(3, Kind::Fixed), (6, Kind::Other), (9, Kind::Other)];
        let pool: Vec<u32> = (1..=m).filter(|r| ![3, 6, 9].contains(r)).collect();
        for d in 0..4usize {
            for s in 1..=3usize {
                let sw = sweep::<BigInt>(m, marks.iter().copied(), Kind::Pool, pool.len() as u64, d as u64, s as u32, true);
                for (i, &(r, _)) in marks.iter().enumerate().skip(1) {
                    let before = oracle(m, &[3], &pool, d, s);
                    let after = oracle(m, &[3, r], &pool, d, s);
                    let tail = BigRational::new(sw.tail_after(i), sw.scale.clone());
                    assert_eq!(after, before - tail, "r={r} d={d} s={s}");
                }
            }
        }
    }

    #[test]
    fn two_pools_match_enumeration() {
        let m = 8u32;
        let a = [2u32, 6];
        let b = [1u32, 3, 5, 8];
        let fixed = [4u32];
        for da in 0..=2usize {
            for db in 0..=3usize {
                for s in 1..=3usize {
                    let mut acc = BigRational::from_integer(0.into());
                    let (sa, sb) = (subsets(&a, da), subsets(&b, db));
                    for x in &sa {
                        for y in &sb {
                            let mut fx: Vec<u32> = fixed.iter().chain(x).copied().collect();
                            fx.extend(y);
                            acc += oracle(m, &fx, &[], 0, s);
                        }
                    }
                    let want = acc / BigRational::from_integer(BigInt::from(sa.len() * sb.len()));
                    let mut class = vec![None; m as usize + 1];
                    class[4] = Some(None);
                    for &r in &a {
                        class[r as usize] = Some(Some(0));
                    }
                    for &r in &b {
                        class[r as usize] = Some(Some(1));
                    }
                    let (n, d) = sweep_multi::<BigInt>(m, &class, &[(2, da as u64), (4, db as u64)], s as u32);
                    assert_eq!(BigRational::new(n, d), want);
                }
            }
        }
    }
}
