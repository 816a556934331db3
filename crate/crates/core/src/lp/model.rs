use serde::{Deserialize, Serialize};

use super::{Cmp, LinearProgram, LpSolver, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::profile::{Electorate, PreferenceProfile, ProfileView, SymmetricProfile};
use crate::rules::check_ksm;
use crate::score::ratio_to_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    /// One assignment variable per voter and candidate, with `Σ_j z_ij ≥ s`.
    Aggregated,
    /// `s` unit copies of every voter.
    Copies,
    /// Aggregated over voter groups, with one shared mass for all dummies.
    Symmetric,
}

/// The relaxation. The objective is normalized by total voter weight, so it is directly
/// comparable with committee scores.
#[derive(Clone, Debug)]
pub struct LpModel {
    pub lp: LinearProgram,
    pub m: usize,
    pub k: usize,
    pub s: usize,
    pub formulation: Formulation,
    y_var: Vec<usize>,
}

impl LpModel {
    pub fn variable_count(&self) -> usize {
        self.lp.var_count()
    }

    /// LP variable carrying candidate `c`'s mass.
    pub fn y_var(&self, c: usize) -> usize {
        self.y_var[c]
    }

    pub fn to_lp_format(&self) -> String {
        format!(
            "\\ s-Borda relaxation: m={} k={} s={} ({:?})\n{}",
            self.m,
            self.k,
            self.s,
            self.formulation,
            self.lp.to_lp_format()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalSolution {
    pub y: Vec<f64>,
    pub objective: f64,
}

/// Aggregated relaxation; symmetric profiles get one mass variable for the dummy class.
pub fn build_lp<E: Electorate + ?Sized>(profile: &E, k: usize, s: usize) -> Result<LpModel> {
    check_ksm(k, s, profile.candidate_count())?;
    match profile.view() {
        ProfileView::Explicit(p) => Ok(explicit(p, k, s, Formulation::Aggregated)),
        ProfileView::Symmetric(sp) => Ok(symmetric(sp, k, s)),
    }
}

/// The relaxation with `s` copies per voter: `m + n·m·s` variables.
pub fn build_lp_copies(profile: &PreferenceProfile, k: usize, s: usize) -> Result<LpModel> {
    check_ksm(k, s, profile.m())?;
    Ok(explicit(profile, k, s, Formulation::Copies))
}

fn size_row(lp: &mut LinearProgram, y: &[usize], mult: &[f64], k: usize) {
    let coeffs = y.iter().zip(mult).map(|(&v, &a)| (v, a)).collect();
    lp.add_constraint("size", coeffs, Cmp::Eq, k as f64);
}

fn explicit(p: &PreferenceProfile, k: usize, s: usize, form: Formulation) -> LpModel {
    let m = p.m();
    let total = p.total_weight() as f64;
    let mut lp = LinearProgram::default();
    let y: Vec<usize> = (0..m).map(|j| lp.add_var(format!("y{j}"), 0.0, 1.0)).collect();
    size_row(&mut lp, &y, &vec![1.0; m], k);
    let copies = if form == Formulation::Copies { s } else { 1 };
    for (i, (v, &w)) in p.voters().iter().zip(p.weights()).enumerate() {
        let w = w as f64 / total;
        let mut xs = vec![Vec::with_capacity(copies); m];
        for l in 0..copies {
            let mut cover = Vec::with_capacity(m);
            for j in 0..m {
                let name = if copies == 1 { format!("z{i}_{j}") } else { format!("x{i}_{j}_{l}") };
                let x = lp.add_var(name, w * v.rank(j) as f64, 1.0);
                xs[j].push((x, 1.0));
                cover.push((x, 1.0));
            }
            let (name, need) = if copies == 1 { (format!("cover{i}"), s) } else { (format!("cover{i}_{l}"), 1) };
            lp.add_constraint(name, cover, Cmp::Ge, need as f64);
        }
        for (j, mut row) in xs.into_iter().enumerate() {
            row.push((y[j], -1.0));
            lp.add_constraint(format!("link{i}_{j}"), row, Cmp::Le, 0.0);
        }
    }
    LpModel { lp, m, k, s, formulation: form, y_var: y }
}

fn symmetric(sp: &SymmetricProfile, k: usize, s: usize) -> LpModel {
    let m = sp.m();
    let mut lp = LinearProgram::default();
    let crit: Vec<usize> = sp.critical().iter().map(|c| lp.add_var(format!("y{c}"), 0.0, 1.0)).collect();
    let dummy = (sp.free_count() > 0).then(|| lp.add_var("ydummy", 0.0, 1.0));
    let mut vars = crit.clone();
    let mut mult = vec![1.0; crit.len()];
    if let Some(d) = dummy {
        vars.push(d);
        mult.push(sp.free_count() as f64);
    }
    size_row(&mut lp, &vars, &mult, k);
    for (g, group) in sp.groups().iter().enumerate() {
        let w = ratio_to_f64(group.weight());
        let mut taken = vec![false; m + 1];
        let mut cover = Vec::with_capacity(m);
        for (ci, &r) in group.ranks().iter().enumerate() {
            taken[r as usize] = true;
            let z = lp.add_var(format!("z{g}_c{}", sp.critical()[ci]), w * r as f64, 1.0);
            lp.add_constraint(format!("link{g}_c{}", sp.critical()[ci]), vec![(z, 1.0), (crit[ci], -1.0)], Cmp::Le, 0.0);
            cover.push((z, 1.0));
        }
        if let Some(d) = dummy {
            for r in (1..=m as u32).filter(|&r| !taken[r as usize]) {
                let z = lp.add_var(format!("z{g}_r{r}"), w * r as f64, 1.0);
                lp.add_constraint(format!("link{g}_r{r}"), vec![(z, 1.0), (d, -1.0)], Cmp::Le, 0.0);
                cover.push((z, 1.0));
            }
        }
        lp.add_constraint(format!("cover{g}"), cover, Cmp::Ge, s as f64);
    }
    let y_var = (0..m)
        .map(|c| match sp.critical_index(c) {
            Some(i) => crit[i],
            None => dummy.expect("dummy class present"),
        })
        .collect();
    LpModel { lp, m, k, s, formulation: Formulation::Symmetric, y_var }
}

/// Solves the model and reads back one mass per candidate.
pub fn solve_lp(model: &LpModel, solver: &dyn LpSolver) -> Result<FractionalSolution> {
    let sol = solver.solve(&model.lp)?;
    let viol = model.lp.max_violation(&sol.x);
    if viol > FEASIBILITY_TOL * 10.0 {
        return Err(Error::Solver(format!("{} returned a point violating constraints by {viol:e}", solver.name())));
    }
    let y = (0..model.m).map(|c| sol.x[model.y_var[c]].clamp(0.0, 1.0)).collect();
    Ok(FractionalSolution { y, objective: sol.objective })
}

/// Cheapest assignment of `s` units of mass to one voter given masses `y`: fill the
/// voter's ranking from the top, taking at most `y_j` from each candidate.
pub fn prefix_assignment_cost(y: &[f64], rank_of: &[u32], s: usize) -> f64 {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_unstable_by_key(|&j| rank_of[j]);
    let mut left = s as f64;
    let mut cost = 0.0;
    for j in order {
        if left <= 0.0 {
            break;
        }
        let take = y[j].min(left);
        cost += take * rank_of[j] as f64;
        left -= take;
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::super::{AutoSolver, DenseSimplex, SparseSimplex};
    use super::*;
    use crate::gen::{gen_random, gen_sborda_bad};
    use crate::rules::brute_force_opt;

    #[test]
    fn variable_counts() {
        let p = gen_random(5, 3, 1).unwrap();
        assert_eq!(build_lp_copies(&p, 3, 2).unwrap().variable_count(), 5 + 3 * 5 * 2);
        assert_eq!(build_lp(&p, 3, 2).unwrap().variable_count(), 5 + 3 * 5);
    }

    #[test]
    fn full_committee_objective() {
        let p = gen_random(5, 4, 2).unwrap();
        let sol = solve_lp(&build_lp(&p, 5, 3).unwrap(), &DenseSimplex::default()).unwrap();
        assert!((sol.objective - 6.0).abs() < 1e-9);
        assert!(sol.y.iter().all(|&v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn relaxation_below_opt_and_formulations_agree() {
        for seed in 0..15 {
            let p = gen_random(6, 4, seed).unwrap();
            for (k, s) in [(2, 1), (3, 2), (4, 2)] {
                let agg = solve_lp(&build_lp(&p, k, s).unwrap(), &DenseSimplex::default()).unwrap();
                let cop = solve_lp(&build_lp_copies(&p, k, s).unwrap(), &SparseSimplex).unwrap();
                assert!((agg.objective - cop.objective).abs() < 1e-6 * agg.objective);
                let (_, opt) = brute_force_opt(&p, k, s).unwrap();
                assert!(agg.objective <= opt.to_f64() * (1.0 + 1e-6));
                // prefix rule reproduces the objective from y alone
                let tot: f64 = p.voters().iter().map(|v| prefix_assignment_cost(&agg.y, v.ranks(), s)).sum();
                assert!((tot / 4.0 - agg.objective).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn weights_scale_out() {
        let p = gen_random(6, 3, 7).unwrap();
        let q = p.with_weights(vec![2, 2, 2]).unwrap();
        let a = solve_lp(&build_lp(&p, 3, 2).unwrap(), &DenseSimplex::default()).unwrap();
        let b = solve_lp(&build_lp(&q, 3, 2).unwrap(), &DenseSimplex::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn symmetric_model_matches_materialized() {
        let sp = gen_sborda_bad(8, 4, 2).unwrap();
        let p = sp.materialize().unwrap();
        let a = solve_lp(&build_lp(&sp, 4, 2).unwrap(), &AutoSolver).unwrap();
        let b = solve_lp(&build_lp(&p, 4, 2).unwrap(), &SparseSimplex).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-6);
        assert!((a.objective - 3.0).abs() < 1e-6);
        let (_, opt) = brute_force_opt(&sp, 4, 2).unwrap();
        assert!(a.objective <= opt.to_f64() + 1e-9);
    }

    #[test]
    fn export_names_every_row() {
        let p = gen_random(3, 2, 1).unwrap();
        let txt = build_lp(&p, 2, 1).unwrap().to_lp_format();
        assert!(txt.contains(" size: 1 y0 + 1 y1 + 1 y2 = 2\n"));
        assert!(txt.contains(" cover1:"));
        assert!(txt.contains(" link0_2: 1 z0_2 - 1 y2 <= 0\n"));
    }
}
