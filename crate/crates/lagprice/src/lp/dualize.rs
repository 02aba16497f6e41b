//! Mechanical construction of the dual of a general-form program.
//!
//! One dual variable per primal constraint and one dual constraint per
//! primal variable, following the sign conventions documented on
//! [`super`]. Non-positive dual variables are represented as negated
//! non-negative ones; [`DualVariableMap`] records the orientation so
//! multiplier values can be read back in the original sign convention.

use num_traits::Zero;

use super::{LinearProgram, Relation, Sense, Solution, VarId, VarSign};
use crate::scalar::{Rational, Scalar};

/// Orientation bookkeeping between a primal program and its dual.
#[derive(Debug, Clone)]
pub struct DualVariableMap {
    /// For each primal constraint: the dual variable and its orientation
    /// (`false` means the stored variable is the negation of the
    /// multiplier).
    entries: Vec<(VarId, bool)>,
}

impl DualVariableMap {
    /// Multiplier of primal constraint `row` as seen in the solved dual.
    pub fn multiplier<T: Scalar>(&self, solution: &Solution<T>, row: usize) -> T {
        let (VarId(idx), positive) = self.entries[row];
        let value = solution.primal[idx].clone();
        if positive {
            value
        } else {
            -value
        }
    }
}

/// Builds the dual program. The optimal values of a primal/dual pair
/// coincide whenever either is optimal (LP strong duality); an unbounded
/// primal has an infeasible dual.
pub fn dual_program(primal: &LinearProgram) -> (LinearProgram, DualVariableMap) {
    let minimize = primal.sense == Sense::Minimize;
    let dual_sense = if minimize {
        Sense::Maximize
    } else {
        Sense::Minimize
    };
    let mut dual = LinearProgram::new(dual_sense);

    // Dual variables, one per primal constraint. A multiplier required to
    // be non-positive is stored negated so it fits the non-negative sign.
    let mut entries = Vec::with_capacity(primal.constraint_count());
    for constraint in primal.constraints() {
        let nonpositive = match (constraint.relation, minimize) {
            (Relation::Eq, _) => None,
            (Relation::Ge, true) | (Relation::Le, false) => Some(false),
            (Relation::Le, true) | (Relation::Ge, false) => Some(true),
        };
        let (sign, positive) = match nonpositive {
            None => (VarSign::Free, true),
            Some(false) => (VarSign::NonNegative, true),
            Some(true) => (VarSign::NonNegative, false),
        };
        let var = dual.add_var(format!("y:{}", constraint.name), sign);
        let coefficient = if positive {
            constraint.rhs.clone()
        } else {
            -constraint.rhs.clone()
        };
        dual.set_objective_coefficient(var, coefficient);
        entries.push((var, positive));
    }

    // Dual constraints, one per primal variable: A^T y vs c.
    let mut columns: Vec<Vec<(VarId, Rational)>> = vec![Vec::new(); primal.var_count()];
    for (row, constraint) in primal.constraints().iter().enumerate() {
        let (var, positive) = entries[row];
        for (col, coefficient) in &constraint.coefficients {
            let value = if positive {
                coefficient.clone()
            } else {
                -coefficient.clone()
            };
            columns[*col].push((var, value));
        }
    }
    for (idx, var) in primal.variables().iter().enumerate() {
        let relation = match (var.sign, minimize) {
            (VarSign::Free, _) => Relation::Eq,
            (VarSign::NonNegative, true) => Relation::Le,
            (VarSign::NonNegative, false) => Relation::Ge,
        };
        let rhs = primal.objective()[idx].clone();
        let terms = std::mem::take(&mut columns[idx]);
        if terms.is_empty() && rhs.is_zero() && relation != Relation::Eq {
            // Vacuous 0 <= 0 row; keep the program tidy.
            continue;
        }
        dual.add_constraint(format!("dc:{}", var.name), terms, relation, rhs);
    }

    (dual, DualVariableMap { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve, SolveOptions, Status};
    use crate::scalar::rat;

    fn sample() -> LinearProgram {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::NonNegative);
        let y = lp.add_var("y", VarSign::Free);
        lp.set_objective_coefficient(x, rat(2));
        lp.set_objective_coefficient(y, rat(1));
        lp.add_constraint("a", vec![(x, rat(1)), (y, rat(1))], Relation::Ge, rat(3));
        lp.add_constraint("b", vec![(x, rat(1)), (y, rat(-1))], Relation::Le, rat(1));
        lp.add_constraint("c", vec![(x, rat(2)), (y, rat(1))], Relation::Eq, rat(4));
        lp
    }

    #[test]
    fn dual_optimum_equals_primal_optimum() {
        let primal = sample();
        let (dual, _) = dual_program(&primal);
        let ps = solve(&primal, &SolveOptions::exact()).unwrap();
        let ds = solve(&dual, &SolveOptions::exact()).unwrap();
        assert_eq!(ps.status, Status::Optimal);
        assert_eq!(ds.status, Status::Optimal);
        assert_eq!(ps.objective, ds.objective);
    }

    #[test]
    fn dual_of_dual_recovers_the_optimum() {
        let primal = sample();
        let (dual, _) = dual_program(&primal);
        let (bidual, _) = dual_program(&dual);
        let ps = solve(&primal, &SolveOptions::exact()).unwrap();
        let bs = solve(&bidual, &SolveOptions::exact()).unwrap();
        assert_eq!(ps.objective, bs.objective);
    }

    #[test]
    fn dual_multipliers_match_solver_duals() {
        let primal = sample();
        let (dual, map) = dual_program(&primal);
        let ps = solve(&primal, &SolveOptions::exact()).unwrap();
        let ds = solve(&dual, &SolveOptions::exact()).unwrap();
        // Objectives agree, so the dual solution's multipliers reproduce
        // the primal bound b . y exactly.
        let recovered: Rational = primal
            .constraints()
            .iter()
            .enumerate()
            .map(|(row, c)| &c.rhs * &map.multiplier(&ds, row))
            .sum();
        assert_eq!(Some(recovered), ps.objective);
    }

    #[test]
    fn unbounded_primal_has_infeasible_dual() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::Free);
        lp.set_objective_coefficient(x, rat(1));
        lp.add_constraint("cap", vec![(x, rat(1))], Relation::Le, rat(5));
        let (dual, _) = dual_program(&lp);
        let ps = solve(&lp, &SolveOptions::exact()).unwrap();
        let ds = solve(&dual, &SolveOptions::exact()).unwrap();
        assert_eq!(ps.status, Status::Unbounded);
        assert_eq!(ds.status, Status::Infeasible);
    }
}
