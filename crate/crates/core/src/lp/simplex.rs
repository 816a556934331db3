use super::{Cmp, LinearProgram, LpSolution, LpSolver};
use crate::error::{Error, Result};

const EPS: f64 = 1e-9;

/// Two-phase dense tableau simplex. Dantzig pricing; after a run of degenerate pivots it
/// falls back to Bland's rule until the objective moves again. Upper bounds become rows.
#[derive(Clone, Copy, Debug)]
pub struct DenseSimplex {
    pub max_iter: usize,
    pub degenerate_run: usize,
}

impl Default for DenseSimplex {
    fn default() -> Self {
        DenseSimplex { max_iter: 200_000, degenerate_run: 50 }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let (prow, prhs) = (self.rows[r].clone(), self.rhs[r]);
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f.abs() > 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                self.rhs[i] -= f * prhs;
                self.rows[i][c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn reduced(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let mut d = cost.to_vec();
        let mut z = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(&self.rows[i]) {
                    *dj -= cb * a;
                }
                z += cb * self.rhs[i];
            }
        }
        (d, z)
    }

    /// Minimizes `cost` over the current basis; `allowed[j]` gates entering columns.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool], cfg: &DenseSimplex, iters: &mut usize) -> Result<()> {
        let (mut d, mut z) = self.reduced(cost);
        let mut stalled = 0usize;
        loop {
            let bland = stalled >= cfg.degenerate_run;
            let mut enter = None;
            let mut best = -EPS;
            for j in 0..self.cols {
                if allowed[j] && d[j] < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d[j];
                }
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > EPS {
                    let ratio = self.rhs[i].max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((l, lr)) => ratio < lr - EPS || (ratio <= lr + EPS && self.basis[i] < self.basis[l]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Solver("unbounded linear program".into()));
            };
            *iters += 1;
            if *iters > cfg.max_iter {
                return Err(Error::IterationLimit(cfg.max_iter));
            }
            self.pivot(r, c);
            let (nd, nz) = self.reduced(cost);
            stalled = if nz < z - EPS * z.abs().max(1.0) { 0 } else { stalled + 1 };
            d = nd;
            z = nz;
        }
    }
}

impl LpSolver for DenseSimplex {
    fn name(&self) -> &str {
        "dense"
    }

    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        let n = lp.var_count();
        let mut raw: Vec<(Vec<f64>, Cmp, f64)> = Vec::new();
        for c in &lp.constraints {
            let mut a = vec![0.0; n];
            for &(j, v) in &c.coeffs {
                a[j] += v;
            }
            raw.push((a, c.cmp, c.rhs));
        }
        for (j, &u) in lp.upper.iter().enumerate() {
            if u.is_finite() {
                let mut a = vec![0.0; n];
                a[j] = 1.0;
                raw.push((a, Cmp::Le, u));
            }
        }
        for (a, cmp, b) in raw.iter_mut() {
            if *b < 0.0 {
                a.iter_mut().for_each(|v| *v = -*v);
                *b = -*b;
                *cmp = match cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
        }
        let slacks = raw.iter().filter(|r| r.1 != Cmp::Eq).count();
        let arts = raw.iter().filter(|r| r.1 != Cmp::Le).count();
        let cols = n + slacks + arts;
        let mut t = Tableau { rows: Vec::new(), rhs: Vec::new(), basis: Vec::new(), cols };
        let (mut si, mut ai) = (n, n + slacks);
        for (a, cmp, b) in raw {
            let mut row = a;
            row.resize(cols, 0.0);
            match cmp {
                Cmp::Le => {
                    row[si] = 1.0;
                    t.basis.push(si);
                    si += 1;
                }
                Cmp::Ge => {
                    row[si] = -1.0;
                    si += 1;
                    row[ai] = 1.0;
                    t.basis.push(ai);
                    ai += 1;
                }
                Cmp::Eq => {
                    row[ai] = 1.0;
                    t.basis.push(ai);
                    ai += 1;
                }
            }
            t.rows.push(row);
            t.rhs.push(b);
        }
        let is_art = |j: usize| j >= n + slacks;
        let mut iters = 0;
        if arts > 0 {
            let cost1: Vec<f64> = (0..cols).map(|j| if is_art(j) { 1.0 } else { 0.0 }).collect();
            t.optimize(&cost1, &vec![true; cols], self, &mut iters)?;
            let infeas: f64 = t.basis.iter().zip(&t.rhs).filter(|(b, _)| is_art(**b)).map(|(_, v)| *v).sum();
            if infeas > 1e-7 {
                return Err(Error::Solver(format!("infeasible linear program (residual {infeas:e})")));
            }
            for r in 0..t.rows.len() {
                if is_art(t.basis[r]) {
                    if let Some(c) = (0..n + slacks).find(|&j| t.rows[r][j].abs() > 1e-7) {
                        t.pivot(r, c);
                    }
                }
            }
        }
        let mut cost2 = lp.objective.clone();
        cost2.resize(cols, 0.0);
        let allowed: Vec<bool> = (0..cols).map(|j| !is_art(j)).collect();
        t.optimize(&cost2, &allowed, self, &mut iters)?;
        let mut x = vec![0.0; n];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs[r].max(0.0);
            }
        }
        for (v, u) in x.iter_mut().zip(&lp.upper) {
            *v = v.min(*u);
        }
        Ok(LpSolution { objective: lp.value(&x), x })
    }
}

#[cfg(test)]
mod tests {
    use super::super::SparseSimplex;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::default();
        let x = lp.add_var("x", 1.0, 1.0);
        lp.add_constraint("c", vec![(x, 1.0)], Cmp::Ge, 2.0);
        assert!(matches!(DenseSimplex::default().solve(&lp), Err(Error::Solver(_))));
        let mut lp = LinearProgram::default();
        let x = lp.add_var("x", -1.0, f64::INFINITY);
        lp.add_constraint("c", vec![(x, 1.0)], Cmp::Ge, 0.0);
        assert!(DenseSimplex::default().solve(&lp).is_err());
    }

    #[test]
    fn iteration_limit_is_reported() {
        let lp = super::super::tests::tiny();
        let cfg = DenseSimplex { max_iter: 0, ..DenseSimplex::default() };
        assert!(matches!(cfg.solve(&lp), Err(Error::IterationLimit(0))));
    }

    #[test]
    fn matches_sparse_on_random_programs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let n = rng.gen_range(2..8);
            let mut lp = LinearProgram::default();
            for j in 0..n {
                lp.add_var(format!("x{j}"), rng.gen_range(-3.0..3.0), rng.gen_range(0.5..3.0));
            }
            for i in 0..rng.gen_range(1..6) {
                let coeffs = (0..n).map(|j| (j, rng.gen_range(-2.0..2.0))).collect();
                let cmp = [Cmp::Le, Cmp::Ge, Cmp::Eq][rng.gen_range(0..3)];
                lp.add_constraint(format!("c{i}"), coeffs, cmp, rng.gen_range(-1.0..1.0));
            }
            let a = DenseSimplex::default().solve(&lp);
            let b = SparseSimplex.solve(&lp);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    assert!((a.objective - b.objective).abs() <= 1e-6 * b.objective.abs().max(1.0));
                    assert!(lp.max_violation(&a.x) < 1e-7);
                }
                (Err(_), Err(_)) => {}
                (a, b) => panic!("disagree: {a:?} vs {b:?}"),
            }
        }
    }
}
