//! Optimality certificates for LP solutions.
//!
//! Given a claimed optimal solution, this re-derives everything the
//! duality theorem promises and reports violations instead of panicking:
//! primal feasibility residuals, dual sign consistency, dual constraint
//! (reduced cost) feasibility, complementary slackness, and the gap
//! between the primal and dual objectives. In exact mode every figure in
//! a clean report is literally zero.

use std::cmp::Ordering;

use super::{LinearProgram, Relation, Sense, Solution, VarSign};
use crate::scalar::Scalar;

/// One named violation with its magnitude.
#[derive(Debug, Clone)]
pub struct Violation<T> {
    pub name: String,
    pub amount: T,
}

#[derive(Debug, Clone)]
pub struct CertificateReport<T> {
    /// Largest primal residual across constraints and variable signs.
    pub max_primal_residual: T,
    /// Constraints whose multiplier has the wrong sign.
    pub dual_sign_violations: Vec<Violation<T>>,
    /// Variables whose reduced cost violates dual feasibility.
    pub dual_feasibility_violations: Vec<Violation<T>>,
    /// Pairs with nonzero slack times nonzero multiplier.
    pub complementary_slackness_violations: Vec<Violation<T>>,
    /// Absolute difference between `c . x` and `b . y`.
    pub objective_gap: T,
}

impl<T: Scalar> CertificateReport<T> {
    pub fn is_clean(&self, tol: &T) -> bool {
        self.max_primal_residual.is_zero_within(tol)
            && self.dual_sign_violations.is_empty()
            && self.dual_feasibility_violations.is_empty()
            && self.complementary_slackness_violations.is_empty()
            && self.objective_gap.is_zero_within(tol)
    }
}

/// Audits an optimal solution against its program.
///
/// Panics if the solution is not optimal (there is nothing to certify for
/// infeasible or unbounded outcomes).
pub fn check_certificates<T: Scalar>(
    lp: &LinearProgram,
    solution: &Solution<T>,
    tol: &T,
) -> CertificateReport<T> {
    assert!(
        solution.is_optimal(),
        "certificates are defined for optimal solutions only"
    );
    let minimize = lp.sense == Sense::Minimize;

    let mut max_primal_residual = T::zero();
    let bump = |residual: T, current: &mut T| {
        if residual.partial_cmp(current) == Some(Ordering::Greater) {
            *current = residual;
        }
    };

    // Primal feasibility: constraint residuals and variable signs.
    let mut comp_slack = Vec::new();
    let mut dual_signs = Vec::new();
    for (row, constraint) in lp.constraints().iter().enumerate() {
        let lhs = lp.row_value(row, &solution.primal);
        let slack = T::from_rational(&constraint.rhs) - lhs;
        let residual = match constraint.relation {
            Relation::Le => (-slack.clone()).max_with_zero(),
            Relation::Ge => slack.clone().max_with_zero(),
            Relation::Eq => slack.abs(),
        };
        bump(residual, &mut max_primal_residual);

        let dual = solution.duals[row].clone();
        let sign_ok = match (constraint.relation, minimize) {
            (Relation::Eq, _) => true,
            (Relation::Ge, true) | (Relation::Le, false) => {
                !dual.is_negative_within(tol)
            }
            (Relation::Le, true) | (Relation::Ge, false) => {
                !dual.is_positive_within(tol)
            }
        };
        if !sign_ok {
            dual_signs.push(Violation {
                name: constraint.name.clone(),
                amount: dual.abs(),
            });
        }

        let product = (slack * dual).abs();
        if !product.is_zero_within(tol) {
            comp_slack.push(Violation {
                name: constraint.name.clone(),
                amount: product,
            });
        }
    }

    // Dual feasibility per variable: reduced cost sign, and reduced cost
    // complementarity with the primal value.
    let mut dual_feasibility = Vec::new();
    for (idx, var) in lp.variables().iter().enumerate() {
        let mut transposed = T::zero();
        for (row, constraint) in lp.constraints().iter().enumerate() {
            for (col, coefficient) in &constraint.coefficients {
                if *col == idx {
                    transposed = transposed
                        + T::from_rational(coefficient) * solution.duals[row].clone();
                }
            }
        }
        let reduced = T::from_rational(&lp.objective()[idx]) - transposed;
        let violation = match (var.sign, minimize) {
            // Free variables force the dual constraint to equality.
            (VarSign::Free, _) => reduced.abs(),
            (VarSign::NonNegative, true) => (-reduced.clone()).max_with_zero(),
            (VarSign::NonNegative, false) => reduced.clone().max_with_zero(),
        };
        if !violation.is_zero_within(tol) {
            dual_feasibility.push(Violation {
                name: var.name.clone(),
                amount: violation,
            });
        }
        if var.sign == VarSign::NonNegative {
            let value = solution.primal[idx].clone();
            bump((-value.clone()).max_with_zero(), &mut max_primal_residual);
            let product = (value * reduced).abs();
            if !product.is_zero_within(tol) {
                comp_slack.push(Violation {
                    name: var.name.clone(),
                    amount: product,
                });
            }
        }
    }

    let primal_objective = lp.objective_value(&solution.primal);
    let dual_objective = solution.dual_objective(lp);
    let objective_gap = (primal_objective - dual_objective).abs();

    CertificateReport {
        max_primal_residual,
        dual_sign_violations: dual_signs,
        dual_feasibility_violations: dual_feasibility,
        complementary_slackness_violations: comp_slack,
        objective_gap,
    }
}

trait MaxWithZero {
    fn max_with_zero(self) -> Self;
}

impl<T: Scalar> MaxWithZero for T {
    fn max_with_zero(self) -> Self {
        if self.partial_cmp(&T::zero()) == Some(Ordering::Greater) {
            self
        } else {
            T::zero()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve, LinearProgram, Relation, Sense, SolveOptions, VarSign};
    use crate::scalar::{rat, Rational};

    fn small_lp() -> LinearProgram {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::NonNegative);
        let y = lp.add_var("y", VarSign::NonNegative);
        lp.set_objective_coefficient(x, rat(2));
        lp.set_objective_coefficient(y, rat(3));
        lp.add_constraint(
            "demand",
            vec![(x, rat(1)), (y, rat(1))],
            Relation::Ge,
            rat(4),
        );
        lp.add_constraint(
            "spread",
            vec![(x, rat(1)), (y, rat(-1))],
            Relation::Le,
            rat(2),
        );
        lp
    }

    fn zero() -> Rational {
        num_traits::Zero::zero()
    }

    #[test]
    fn optimal_solution_certifies_clean() {
        let lp = small_lp();
        let solution = solve(&lp, &SolveOptions::exact()).unwrap();
        let report = check_certificates(&lp, &solution, &zero());
        assert!(report.is_clean(&zero()));
    }

    #[test]
    fn corrupted_primal_is_flagged() {
        let lp = small_lp();
        let mut solution = solve(&lp, &SolveOptions::exact()).unwrap();
        solution.primal[0] = rat(0);
        solution.primal[1] = rat(0);
        let report = check_certificates(&lp, &solution, &zero());
        assert!(report.max_primal_residual > rat(0));
        assert!(!report.is_clean(&zero()));
    }

    #[test]
    fn flipped_dual_sign_is_flagged() {
        let lp = small_lp();
        let mut solution = solve(&lp, &SolveOptions::exact()).unwrap();
        // The <= row in a min problem must carry a non-positive multiplier.
        let spread = lp.constraint_id("spread").unwrap();
        solution.duals[spread] = rat(1);
        let report = check_certificates(&lp, &solution, &zero());
        assert!(report
            .dual_sign_violations
            .iter()
            .any(|v| v.name == "spread"));
    }
}
