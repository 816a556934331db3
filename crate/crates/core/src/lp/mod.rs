//! LP relaxation of the s-Borda problem, a solver contract with two backends,
//! and the dependent-rounding selection.

mod model;
mod round;
mod simplex;

pub use model::{build_lp, build_lp_copies, prefix_assignment_cost, solve_lp, Formulation, FractionalSolution, LpModel};
pub use round::{dependent_round, lp_round_select, round_solution, t1_size, RoundingOutcome};
pub use simplex::DenseSimplex;

use crate::error::{Error, Result};

/// Feasibility tolerance promised by every solver.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Relative optimality tolerance promised by every solver.
pub const OPTIMALITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// `min c·x` subject to the constraints and `0 ≤ x_j ≤ upper_j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub objective: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn add_var(&mut self, name: impl Into<String>, cost: f64, upper: f64) -> usize {
        self.names.push(name.into());
        self.objective.push(cost);
        self.upper.push(upper);
        self.names.len() - 1
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, coeffs: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.constraints.push(Constraint { name: name.into(), coeffs, cmp, rhs });
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest absolute violation of any constraint or bound.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, u) in x.iter().zip(&self.upper) {
            worst = worst.max(-v).max(v - u);
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let gap = match c.cmp {
                Cmp::Le => lhs - c.rhs,
                Cmp::Ge => c.rhs - lhs,
                Cmp::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }

    /// CPLEX LP text.
    pub fn to_lp_format(&self) -> String {
        use std::fmt::Write;
        let term = |out: &mut String, first: bool, a: f64, name: &str| {
            let sign = if a < 0.0 { " -" } else if first { "" } else { " +" };
            let _ = write!(out, "{sign} {} {name}", a.abs());
        };
        let mut out = String::from("Minimize\n obj:");
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                term(&mut out, first, c, &self.names[j]);
                first = false;
            }
        }
        if first {
            out.push_str(" 0");
        }
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            for (i, &(j, a)) in c.coeffs.iter().enumerate() {
                term(&mut out, i == 0, a, &self.names[j]);
            }
            let op = match c.cmp {
                Cmp::Le => "<=",
                Cmp::Ge => ">=",
                Cmp::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", c.rhs);
        }
        out.push_str("Bounds\n");
        for (name, u) in self.names.iter().zip(&self.upper) {
            if u.is_finite() {
                let _ = writeln!(out, " 0 <= {name} <= {u}");
            }
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Contract: the returned point violates nothing by more than [`FEASIBILITY_TOL`]
/// and its value is within [`OPTIMALITY_TOL`] (relative) of the optimum. Solvers must
/// be deterministic.
pub trait LpSolver {
    fn name(&self) -> &str;
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution>;
}

/// Sparse revised simplex from the `minilp` crate.
#[derive(Clone, Copy, Debug, Default)]
pub struct SparseSimplex;

impl LpSolver for SparseSimplex {
    fn name(&self) -> &str {
        "sparse"
    }

    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        use minilp::{ComparisonOp, OptimizationDirection, Problem};
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = lp.objective.iter().zip(&lp.upper).map(|(&c, &u)| p.add_var(c, (0.0, u))).collect();
        for c in &lp.constraints {
            let expr: Vec<_> = c.coeffs.iter().map(|&(j, a)| (vars[j], a)).collect();
            let op = match c.cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Ge => ComparisonOp::Ge,
                Cmp::Eq => ComparisonOp::Eq,
            };
            p.add_constraint(expr.as_slice(), op, c.rhs);
        }
        let sol = p.solve().map_err(|e| Error::Solver(e.to_string()))?;
        let x: Vec<f64> = vars.iter().map(|v| *sol.var_value(*v)).collect();
        Ok(LpSolution { objective: lp.value(&x), x })
    }
}

/// Dense tableau for small programs, the sparse solver otherwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct AutoSolver;

impl AutoSolver {
    const DENSE_CELLS: usize = 4_000_000;
}

impl LpSolver for AutoSolver {
    fn name(&self) -> &str {
        "auto"
    }

    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        let bounded = lp.upper.iter().filter(|u| u.is_finite()).count();
        let rows = lp.constraints.len() + bounded;
        if rows * (lp.var_count() + 2 * rows) <= Self::DENSE_CELLS {
            DenseSimplex::default().solve(lp)
        } else {
            SparseSimplex.solve(lp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tiny() -> LinearProgram {
        // min -x - 2y st x + y <= 4, x - y >= -2, y <= 3 ; optimum x=1,y=3 -> -7
        let mut lp = LinearProgram::default();
        let x = lp.add_var("x", -1.0, f64::INFINITY);
        let y = lp.add_var("y", -2.0, 3.0);
        lp.add_constraint("a", vec![(x, 1.0), (y, 1.0)], Cmp::Le, 4.0);
        lp.add_constraint("b", vec![(x, 1.0), (y, -1.0)], Cmp::Ge, -2.0);
        lp
    }

    #[test]
    fn backends_agree_on_tiny() {
        let lp = tiny();
        for s in [&DenseSimplex::default() as &dyn LpSolver, &SparseSimplex, &AutoSolver] {
            let sol = s.solve(&lp).unwrap();
            assert!((sol.objective + 7.0).abs() < 1e-9, "{}", s.name());
            assert!(lp.max_violation(&sol.x) < FEASIBILITY_TOL);
        }
    }

    #[test]
    fn lp_text_has_sections() {
        let txt = tiny().to_lp_format();
        assert!(txt.starts_with("Minimize\n obj: - 1 x - 2 y\n"));
        assert!(txt.contains(" a: 1 x + 1 y <= 4\n"));
        assert!(txt.contains(" 0 <= y <= 3\n"));
        assert!(!txt.contains("<= inf"));
        assert!(txt.ends_with("End\n"));
    }
}
