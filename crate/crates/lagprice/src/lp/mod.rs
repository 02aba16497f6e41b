//! General-form linear programs with exact rational data.
//!
//! Programs are stated over named variables that are either free or
//! non-negative, with `<=`, `=` or `>=` constraints. The solver reports
//! dual multipliers in the conventions below, which every consumer of
//! duals in this crate relies on.
//!
//! For a minimization problem the multiplier `y_i` of constraint `i`
//! satisfies `y_i >= 0` for `>=` rows, `y_i <= 0` for `<=` rows and is
//! free for `=` rows; for each non-negative variable `j` the reduced cost
//! `c_j - (A^T y)_j` is non-negative and it is zero for free variables.
//! For a maximization problem the signs flip: `y_i >= 0` for `<=` rows,
//! `y_i <= 0` for `>=` rows, and reduced costs `c_j - (A^T y)_j` are
//! non-positive for non-negative variables. In both cases `b . y = c . x`
//! at an optimum and complementary slackness holds pairwise.

mod certificates;
mod dualize;
mod oracle;
mod simplex;

pub use certificates::{check_certificates, CertificateReport};
pub use dualize::{dual_program, DualVariableMap};
pub use oracle::{enumerate_bases_oracle, OracleError};
pub use simplex::{solve, SolveError, SolveOptions};

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;

use crate::scalar::{format_scalar, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSign {
    Free,
    NonNegative,
}

/// Variable handle returned by [`LinearProgram::add_var`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone)]
pub struct VarDef {
    pub name: String,
    pub sign: VarSign,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub relation: Relation,
    /// Sparse row, indices into the variable table. Kept sorted and
    /// duplicate-free.
    pub coefficients: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

/// A general-form linear program.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    variables: Vec<VarDef>,
    var_index: HashMap<String, usize>,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    constraint_index: HashMap<String, usize>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            variables: Vec::new(),
            var_index: HashMap::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
            constraint_index: HashMap::new(),
        }
    }

    /// Declares a variable. Panics on duplicate names: variable names are
    /// produced by this crate's builders, so a clash is a builder bug.
    pub fn add_var(&mut self, name: impl Into<String>, sign: VarSign) -> VarId {
        let name = name.into();
        let idx = self.variables.len();
        let previous = self.var_index.insert(name.clone(), idx);
        assert!(previous.is_none(), "duplicate variable `{name}`");
        self.variables.push(VarDef { name, sign });
        self.objective.push(Rational::zero());
        VarId(idx)
    }

    pub fn set_objective_coefficient(&mut self, var: VarId, coefficient: Rational) {
        self.objective[var.0] = coefficient;
    }

    /// Adds a constraint from `(variable, coefficient)` terms. Terms with
    /// the same variable are summed; zero coefficients are dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) {
        let name = name.into();
        let idx = self.constraints.len();
        let previous = self.constraint_index.insert(name.clone(), idx);
        assert!(previous.is_none(), "duplicate constraint `{name}`");
        let mut dense: HashMap<usize, Rational> = HashMap::new();
        for (var, coefficient) in terms {
            assert!(var.0 < self.variables.len(), "unknown variable id");
            *dense.entry(var.0).or_insert_with(Rational::zero) += coefficient;
        }
        let mut coefficients: Vec<(usize, Rational)> = dense
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        coefficients.sort_by_key(|(idx, _)| *idx);
        self.constraints.push(Constraint {
            name,
            relation,
            coefficients,
            rhs,
        });
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn variables(&self) -> &[VarDef] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.var_index.get(name).copied().map(VarId)
    }

    pub fn constraint_id(&self, name: &str) -> Option<usize> {
        self.constraint_index.get(name).copied()
    }

    /// Objective value of a full assignment.
    pub fn objective_value<T: Scalar>(&self, point: &[T]) -> T {
        let mut total = T::zero();
        for (idx, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                total = total + T::from_rational(c) * point[idx].clone();
            }
        }
        total
    }

    /// Left-hand side of a constraint at a full assignment.
    pub fn row_value<T: Scalar>(&self, row: usize, point: &[T]) -> T {
        let mut total = T::zero();
        for (idx, c) in &self.constraints[row].coefficients {
            total = total + T::from_rational(c) * point[*idx].clone();
        }
        total
    }

    /// Plain-text dump, one constraint per line, for external cross
    /// checking.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        let _ = write!(out, "{sense}");
        for (idx, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                let _ = write!(out, " {}*{}", format_scalar(c), self.variables[idx].name);
            }
        }
        out.push('\n');
        for v in &self.variables {
            if v.sign == VarSign::NonNegative {
                let _ = writeln!(out, "{} >= 0", v.name);
            }
        }
        for c in &self.constraints {
            let _ = write!(out, "{}:", c.name);
            for (idx, coefficient) in &c.coefficients {
                let _ = write!(
                    out,
                    " {}*{}",
                    format_scalar(coefficient),
                    self.variables[*idx].name
                );
            }
            let _ = writeln!(out, " {} {}", c.relation, format_scalar(&c.rhs));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
        })
    }
}

/// Result of a solve. `primal`, `duals` and `objective` are populated only
/// for [`Status::Optimal`], aligned with the program's variable and
/// constraint order.
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub status: Status,
    pub primal: Vec<T>,
    pub duals: Vec<T>,
    pub objective: Option<T>,
}

impl<T: Scalar> Solution<T> {
    pub fn infeasible() -> Self {
        Solution {
            status: Status::Infeasible,
            primal: Vec::new(),
            duals: Vec::new(),
            objective: None,
        }
    }

    pub fn unbounded() -> Self {
        Solution {
            status: Status::Unbounded,
            primal: Vec::new(),
            duals: Vec::new(),
            objective: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Primal value of a named variable.
    pub fn value(&self, lp: &LinearProgram, name: &str) -> Option<&T> {
        lp.var_id(name).and_then(|VarId(idx)| self.primal.get(idx))
    }

    /// Dual multiplier of a named constraint.
    pub fn dual(&self, lp: &LinearProgram, name: &str) -> Option<&T> {
        lp.constraint_id(name).and_then(|idx| self.duals.get(idx))
    }

    /// The dual objective `b . y`.
    pub fn dual_objective(&self, lp: &LinearProgram) -> T {
        let mut total = T::zero();
        for (row, c) in lp.constraints().iter().enumerate() {
            total = total + T::from_rational(&c.rhs) * self.duals[row].clone();
        }
        total
    }
}
