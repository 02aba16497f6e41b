//! Two-phase primal simplex on a dense tableau.
//!
//! Bland's rule (lowest index entering, lowest basic index leaving) is
//! used throughout, which guarantees termination and makes every solve
//! deterministic. Free variables are split into differences of
//! non-negative parts during standardization and the mapping is retained
//! so primal values and dual multipliers are reported in the original
//! coordinates. Dual multipliers are recovered at the optimum by solving
//! `B^T y = c_B` against a pristine copy of the standardized matrix.

use std::cmp::Ordering;
#[cfg(debug_assertions)]
use std::collections::HashSet;

use thiserror::Error;

use super::{LinearProgram, Relation, Sense, Solution, Status, VarSign};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Error)]
pub enum SolveError {
    /// The pivot budget was exhausted. With Bland's rule enabled this
    /// signals a solver bug, not bad input.
    #[error("pivot limit {limit} exceeded")]
    PivotLimitExceeded { limit: usize },
}

/// Solver knobs. `tol` is the magnitude below which a value is treated as
/// zero; it must be `0` for exact scalars.
#[derive(Debug, Clone)]
pub struct SolveOptions<T> {
    pub tol: T,
    /// Pivot budget across both phases; defaults to `10 * (rows + cols)`
    /// of the standardized program.
    pub max_pivots: Option<usize>,
}

impl SolveOptions<Rational> {
    /// Exact arithmetic, zero tolerance.
    pub fn exact() -> Self {
        SolveOptions {
            tol: num_traits::Zero::zero(),
            max_pivots: None,
        }
    }
}

impl Default for SolveOptions<Rational> {
    fn default() -> Self {
        SolveOptions::exact()
    }
}

impl SolveOptions<f64> {
    pub fn float(tol: f64) -> Self {
        SolveOptions {
            tol,
            max_pivots: None,
        }
    }
}

impl Default for SolveOptions<f64> {
    fn default() -> Self {
        SolveOptions::float(1e-9)
    }
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Direct(usize),
    Split { plus: usize, minus: usize },
}

struct Standardized<T> {
    /// Constraint matrix including slack columns, rows scaled so the
    /// right-hand side is non-negative.
    a: Vec<Vec<T>>,
    b: Vec<T>,
    c: Vec<T>,
    cols: usize,
    /// Whether row `i` was negated during standardization.
    row_flipped: Vec<bool>,
    var_map: Vec<VarMap>,
}

fn standardize<T: Scalar>(lp: &LinearProgram, tol: &T) -> Standardized<T> {
    let minimize = lp.sense == Sense::Minimize;

    let mut var_map = Vec::with_capacity(lp.var_count());
    let mut cols = 0usize;
    for var in lp.variables() {
        match var.sign {
            VarSign::NonNegative => {
                var_map.push(VarMap::Direct(cols));
                cols += 1;
            }
            VarSign::Free => {
                var_map.push(VarMap::Split {
                    plus: cols,
                    minus: cols + 1,
                });
                cols += 2;
            }
        }
    }
    let slack_start = cols;
    let slack_count = lp
        .constraints()
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    cols += slack_count;

    let mut c = vec![T::zero(); cols];
    for (idx, coefficient) in lp.objective().iter().enumerate() {
        let value = T::from_rational(coefficient);
        let value = if minimize { value } else { -value };
        match var_map[idx] {
            VarMap::Direct(col) => c[col] = value,
            VarMap::Split { plus, minus } => {
                c[plus] = value.clone();
                c[minus] = -value;
            }
        }
    }

    let mut a = Vec::with_capacity(lp.constraint_count());
    let mut b = Vec::with_capacity(lp.constraint_count());
    let mut row_flipped = Vec::with_capacity(lp.constraint_count());
    let mut next_slack = slack_start;
    for constraint in lp.constraints() {
        let mut row = vec![T::zero(); cols];
        for (idx, coefficient) in &constraint.coefficients {
            let value = T::from_rational(coefficient);
            match var_map[*idx] {
                VarMap::Direct(col) => row[col] = row[col].clone() + value,
                VarMap::Split { plus, minus } => {
                    row[plus] = row[plus].clone() + value.clone();
                    row[minus] = row[minus].clone() - value;
                }
            }
        }
        match constraint.relation {
            Relation::Le => {
                row[next_slack] = T::one();
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -T::one();
                next_slack += 1;
            }
            Relation::Eq => {}
        }
        let mut rhs = T::from_rational(&constraint.rhs);
        let flipped = rhs.sign_within(tol) == Ordering::Less;
        if flipped {
            for entry in row.iter_mut() {
                *entry = -entry.clone();
            }
            rhs = -rhs;
        }
        a.push(row);
        b.push(rhs);
        row_flipped.push(flipped);
    }

    Standardized {
        a,
        b,
        c,
        cols,
        row_flipped,
        var_map,
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    /// Original constraint index behind each tableau row; rows found to be
    /// redundant in phase 1 are removed.
    row_constraint: Vec<usize>,
    cost: Vec<T>,
    carried_cost: Vec<T>,
    pivots: usize,
    limit: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize, tol: &T) -> Result<(), SolveError> {
        if self.pivots >= self.limit {
            return Err(SolveError::PivotLimitExceeded { limit: self.limit });
        }
        self.pivots += 1;

        let pivot_value = self.rows[row][col].clone();
        for entry in self.rows[row].iter_mut() {
            *entry = entry.clone() / pivot_value.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / pivot_value;

        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero_within(tol) {
                continue;
            }
            for (entry, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                *entry = entry.clone() - factor.clone() * p.clone();
            }
            self.rhs[r] = self.rhs[r].clone() - factor * pivot_rhs.clone();
        }
        for costs in [&mut self.cost, &mut self.carried_cost] {
            let factor = costs[col].clone();
            if !factor.is_zero_within(tol) {
                for (entry, p) in costs.iter_mut().zip(&pivot_row) {
                    *entry = entry.clone() - factor.clone() * p.clone();
                }
            }
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Runs Bland's rule to optimality or unboundedness on the current
    /// cost row.
    fn run(&mut self, tol: &T) -> Result<PhaseOutcome, SolveError> {
        #[cfg(debug_assertions)]
        let mut seen_bases: HashSet<Vec<usize>> = HashSet::new();

        loop {
            #[cfg(debug_assertions)]
            {
                let mut key = self.basis.clone();
                key.sort_unstable();
                assert!(
                    seen_bases.insert(key),
                    "basis repeated under Bland's rule"
                );
            }

            let entering = (0..self.cost.len())
                .find(|&j| self.cost[j].is_negative_within(tol));
            let Some(col) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };

            let mut leaving: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][col].is_positive_within(tol) {
                    continue;
                }
                let ratio = self.rhs[r].clone() / self.rows[r][col].clone();
                let better = match &leaving {
                    None => true,
                    Some((best_row, best_ratio)) => match ratio.partial_cmp(best_ratio) {
                        Some(Ordering::Less) => true,
                        Some(Ordering::Equal) => self.basis[r] < self.basis[*best_row],
                        _ => false,
                    },
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(PhaseOutcome::Unbounded);
            };
            self.pivot(row, col, tol)?;
        }
    }
}

/// Solves a general-form linear program.
///
/// Returns the status plus, when optimal, a primal point, dual
/// multipliers in the conventions documented on [`super`], and the
/// objective value.
pub fn solve<T: Scalar>(
    lp: &LinearProgram,
    options: &SolveOptions<T>,
) -> Result<Solution<T>, SolveError> {
    let tol = &options.tol;
    let std = standardize(lp, tol);
    let m = std.a.len();
    let n = std.cols;
    let limit = options.max_pivots.unwrap_or(10 * (m + n + m));

    // Phase 1: artificial basis, minimize the sum of artificials.
    let mut rows = Vec::with_capacity(m);
    for (i, row) in std.a.iter().enumerate() {
        let mut extended = row.clone();
        extended.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        rows.push(extended);
    }
    let mut cost = vec![T::zero(); n + m];
    let mut carried_cost = vec![T::zero(); n + m];
    for j in 0..n {
        let mut column_sum = T::zero();
        for row in &rows {
            column_sum = column_sum + row[j].clone();
        }
        cost[j] = -column_sum;
        carried_cost[j] = std.c[j].clone();
    }

    let mut tableau = Tableau {
        rows,
        rhs: std.b.clone(),
        basis: (n..n + m).collect(),
        row_constraint: (0..m).collect(),
        cost,
        carried_cost,
        pivots: 0,
        limit,
    };

    match tableau.run(tol)? {
        PhaseOutcome::Unbounded => unreachable!("phase 1 objective is bounded below"),
        PhaseOutcome::Optimal => {}
    }
    let infeasibility: T = tableau
        .rhs
        .iter()
        .zip(&tableau.basis)
        .filter(|(_, &b)| b >= n)
        .fold(T::zero(), |acc, (v, _)| acc + v.clone());
    if !infeasibility.is_zero_within(tol) {
        return Ok(Solution::infeasible());
    }

    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant and dropped.
    let mut r = 0;
    while r < tableau.rows.len() {
        if tableau.basis[r] >= n {
            let col = (0..n).find(|&j| !tableau.rows[r][j].is_zero_within(tol));
            match col {
                Some(col) => tableau.pivot(r, col, tol)?,
                None => {
                    tableau.rows.remove(r);
                    tableau.rhs.remove(r);
                    tableau.basis.remove(r);
                    tableau.row_constraint.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2 on the real objective, artificial columns removed.
    for row in tableau.rows.iter_mut() {
        row.truncate(n);
    }
    tableau.cost = tableau.carried_cost[..n].to_vec();
    tableau.carried_cost = vec![T::zero(); n];

    match tableau.run(tol)? {
        PhaseOutcome::Unbounded => return Ok(Solution::unbounded()),
        PhaseOutcome::Optimal => {}
    }

    // Standardized primal point.
    let mut x_std = vec![T::zero(); n];
    for (r, &col) in tableau.basis.iter().enumerate() {
        x_std[col] = tableau.rhs[r].clone();
    }
    let mut primal = Vec::with_capacity(lp.var_count());
    for map in &std.var_map {
        let value = match *map {
            VarMap::Direct(col) => x_std[col].clone(),
            VarMap::Split { plus, minus } => x_std[plus].clone() - x_std[minus].clone(),
        };
        primal.push(value);
    }

    // Dual multipliers: solve B^T y = c_B on the kept rows of the pristine
    // standardized matrix, then undo the row and sense normalizations.
    let kept = &tableau.row_constraint;
    let k = kept.len();
    let mut bt = vec![vec![T::zero(); k + 1]; k];
    for (pos, &col) in tableau.basis.iter().enumerate() {
        for (row_pos, &constraint_row) in kept.iter().enumerate() {
            // Row `pos` of B^T is column `basis[pos]` of A over kept rows.
            bt[pos][row_pos] = std.a[constraint_row][col].clone();
        }
        bt[pos][k] = std.c[col].clone();
    }
    let y_kept = gaussian_solve(bt, tol);
    let mut duals = vec![T::zero(); lp.constraint_count()];
    let sense_flip = lp.sense == Sense::Maximize;
    for (row_pos, &constraint_row) in kept.iter().enumerate() {
        let mut value = y_kept[row_pos].clone();
        if std.row_flipped[constraint_row] {
            value = -value;
        }
        if sense_flip {
            value = -value;
        }
        duals[constraint_row] = value;
    }

    let objective = lp.objective_value(&primal);
    Ok(Solution {
        status: Status::Optimal,
        primal,
        duals,
        objective: Some(objective),
    })
}

/// Solves a square system given as `[M | rhs]` by Gaussian elimination
/// with largest-pivot selection. The matrix is invertible by construction
/// (its rows come from a simplex basis).
fn gaussian_solve<T: Scalar>(mut m: Vec<Vec<T>>, tol: &T) -> Vec<T> {
    let k = m.len();
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&a, &b| {
                m[a][col]
                    .abs()
                    .partial_cmp(&m[b][col].abs())
                    .unwrap_or(Ordering::Equal)
            })
            .expect("non-empty pivot range");
        m.swap(col, pivot_row);
        assert!(
            !m[col][col].is_zero_within(tol),
            "singular basis matrix in dual extraction"
        );
        let pivot = m[col][col].clone();
        for j in col..=k {
            m[col][j] = m[col][j].clone() / pivot.clone();
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let factor = m[r][col].clone();
            if factor.is_zero_within(tol) {
                continue;
            }
            for j in col..=k {
                m[r][j] = m[r][j].clone() - factor.clone() * m[col][j].clone();
            }
        }
    }
    (0..k).map(|r| m[r][k].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinearProgram, Sense, Status, VarSign};
    use crate::scalar::{rat, ratio};

    fn exact() -> SolveOptions<Rational> {
        SolveOptions::exact()
    }

    #[test]
    fn min_x_at_least_one() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::Free);
        lp.set_objective_coefficient(x, rat(1));
        lp.add_constraint("lower", vec![(x, rat(1))], Relation::Ge, rat(1));
        let solution = solve(&lp, &exact()).unwrap();
        assert_eq!(solution.status, Status::Optimal);
        assert_eq!(solution.objective, Some(rat(1)));
        assert_eq!(solution.primal[0], rat(1));
        assert_eq!(solution.duals[0], rat(1));
    }

    #[test]
    fn max_single_binding_constraint() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x", VarSign::NonNegative);
        let y = lp.add_var("y", VarSign::NonNegative);
        lp.set_objective_coefficient(x, rat(1));
        lp.set_objective_coefficient(y, rat(1));
        lp.add_constraint(
            "cap",
            vec![(x, rat(1)), (y, rat(1))],
            Relation::Le,
            rat(1),
        );
        let solution = solve(&lp, &exact()).unwrap();
        assert_eq!(solution.status, Status::Optimal);
        assert_eq!(solution.objective, Some(rat(1)));
        assert_eq!(solution.duals[0], rat(1));
    }

    #[test]
    fn detects_infeasible_system() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::Free);
        lp.set_objective_coefficient(x, rat(1));
        lp.add_constraint("upper", vec![(x, rat(1))], Relation::Le, rat(0));
        lp.add_constraint("lower", vec![(x, rat(1))], Relation::Ge, rat(1));
        let solution = solve(&lp, &exact()).unwrap();
        assert_eq!(solution.status, Status::Infeasible);
    }

    #[test]
    fn detects_unbounded_problem() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::Free);
        lp.set_objective_coefficient(x, rat(1));
        lp.add_constraint("upper", vec![(x, rat(1))], Relation::Le, rat(0));
        let solution = solve(&lp, &exact()).unwrap();
        assert_eq!(solution.status, Status::Unbounded);
    }

    #[test]
    fn strong_duality_on_a_small_lp() {
        // min 2x + 3y st x + y >= 4, x - y <= 2, x,y >= 0
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
        // Optimum at (3, 1): pushing weight onto x is capped by the
        // spread row, so the objective is 2*3 + 3*1 = 9.
        let solution = solve(&lp, &exact()).unwrap();
        assert_eq!(solution.status, Status::Optimal);
        assert_eq!(solution.objective, Some(rat(9)));
        assert_eq!(solution.primal, vec![rat(3), rat(1)]);
        assert_eq!(solution.dual_objective(&lp), rat(9));
        // Sign conventions: >= row non-negative, <= row non-positive.
        assert_eq!(solution.duals[0], ratio(5, 2));
        assert_eq!(solution.duals[1], ratio(-1, 2));
    }

    #[test]
    fn equality_constraints_and_free_variables() {
        // min x + y st x + 2y = 3, x - y = 0 with both free: x = y = 1.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::Free);
        let y = lp.add_var("y", VarSign::Free);
        lp.set_objective_coefficient(x, rat(1));
        lp.set_objective_coefficient(y, rat(1));
        lp.add_constraint(
            "sum",
            vec![(x, rat(1)), (y, rat(2))],
            Relation::Eq,
            rat(3),
        );
        lp.add_constraint(
            "balance",
            vec![(x, rat(1)), (y, rat(-1))],
            Relation::Eq,
            rat(0),
        );
        let solution = solve(&lp, &exact()).unwrap();
        assert_eq!(solution.status, Status::Optimal);
        assert_eq!(solution.objective, Some(rat(2)));
        assert_eq!(solution.primal, vec![rat(1), rat(1)]);
        assert_eq!(solution.dual_objective(&lp), rat(2));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::NonNegative);
        lp.set_objective_coefficient(x, rat(1));
        lp.add_constraint("a", vec![(x, rat(1))], Relation::Eq, rat(2));
        lp.add_constraint("b", vec![(x, rat(2))], Relation::Eq, rat(4));
        let solution = solve(&lp, &exact()).unwrap();
        assert_eq!(solution.status, Status::Optimal);
        assert_eq!(solution.objective, Some(rat(2)));
        assert_eq!(solution.dual_objective(&lp), rat(2));
    }

    #[test]
    fn fractional_data_round_trips_exactly() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x", VarSign::NonNegative);
        lp.set_objective_coefficient(x, ratio(7, 3));
        lp.add_constraint("cap", vec![(x, ratio(2, 5))], Relation::Le, ratio(3, 7));
        let solution = solve(&lp, &exact()).unwrap();
        // x = 15/14, objective = 7/3 * 15/14 = 5/2.
        assert_eq!(solution.objective, Some(ratio(5, 2)));
        assert_eq!(solution.dual_objective(&lp), ratio(5, 2));
    }

    #[test]
    fn float_mode_agrees_with_exact_mode() {
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
        let float = solve(&lp, &SolveOptions::<f64>::default()).unwrap();
        let exact = solve(&lp, &exact()).unwrap();
        let expected: f64 = Scalar::from_rational(&exact.objective.unwrap());
        assert!((float.objective.unwrap() - expected).abs() < 1e-9);
    }
}
