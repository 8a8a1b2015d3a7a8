//! Small linear-programming facade over `microlp`.
//!
//! Callers build problems in terms of [`Var`] handles and get plain vectors
//! back, so the solver backend stays swappable.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    vars: Vec<(f64, f64, f64)>,
    rows: Vec<(Vec<(Var, f64)>, Cmp, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    values: Vec<f64>,
}

impl LpSolution {
    pub fn value(&self, var: Var) -> f64 {
        self.values[var.0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            vars: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Adds a continuous variable with objective coefficient `obj` and
    /// bounds `[lo, hi]` (either may be infinite).
    pub fn var(&mut self, obj: f64, lo: f64, hi: f64) -> Var {
        self.vars.push((obj, lo, hi));
        Var(self.vars.len() - 1)
    }

    pub fn set_bounds(&mut self, var: Var, lo: f64, hi: f64) {
        self.vars[var.0].1 = lo;
        self.vars[var.0].2 = hi;
    }

    pub fn set_objective(&mut self, var: Var, obj: f64) {
        self.vars[var.0].0 = obj;
    }

    pub fn set_sense(&mut self, sense: Sense) {
        self.sense = sense;
    }

    pub fn constraint(&mut self, terms: Vec<(Var, f64)>, cmp: Cmp, rhs: f64) {
        self.rows.push((terms, cmp, rhs));
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let direction = match self.sense {
            Sense::Minimize => OptimizationDirection::Minimize,
            Sense::Maximize => OptimizationDirection::Maximize,
        };
        let mut problem = Problem::new(direction);
        let handles: Vec<Variable> = self
            .vars
            .iter()
            .map(|&(obj, lo, hi)| problem.add_var(obj, (lo, hi)))
            .collect();
        for (terms, cmp, rhs) in &self.rows {
            let expr: Vec<(Variable, f64)> =
                terms.iter().map(|&(v, c)| (handles[v.0], c)).collect();
            let op = match cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Ge => ComparisonOp::Ge,
                Cmp::Eq => ComparisonOp::Eq,
            };
            problem.add_constraint(expr.as_slice(), op, *rhs);
        }
        let solution = problem
            .solve()
            .map_err(|e| Error::Lp(e.to_string()))?
            .into_solution()
            .map_err(|e| Error::Lp(format!("{:?}", e.termination_reason())))?;
        Ok(LpSolution {
            objective: solution.objective(),
            values: handles.iter().map(|&h| solution.var_value(h)).collect(),
        })
    }
}
