//! Brute-force LP oracle by exhaustive basis enumeration.
//!
//! This is the reference the simplex implementation is tested against, so
//! it deliberately shares none of the solver's machinery: it builds its
//! own standard form, selects an independent row subset by Gaussian
//! elimination, then tries every candidate basis. A feasible basis with an
//! improving recession direction certifies unboundedness; otherwise the
//! best basic feasible solution is optimal.

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{LinearProgram, Relation, Sense, Solution, Status, VarSign};
use crate::scalar::Rational;

/// Hard cap on standard-form columns; enumeration is factorial beyond
/// desk-size instances.
pub const MAX_ORACLE_COLUMNS: usize = 14;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("standard form has {columns} columns, oracle accepts at most {MAX_ORACLE_COLUMNS}")]
    TooLarge { columns: usize },
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Direct(usize),
    Split { plus: usize, minus: usize },
}

/// Solves a tiny LP by enumerating all bases of its standard form.
pub fn enumerate_bases_oracle(lp: &LinearProgram) -> Result<Solution<Rational>, OracleError> {
    let minimize = lp.sense == Sense::Minimize;

    // Standard form: min c.x, A x = b, x >= 0.
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
    cols += lp
        .constraints()
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    if cols > MAX_ORACLE_COLUMNS {
        return Err(OracleError::TooLarge { columns: cols });
    }

    let mut c = vec![Rational::zero(); cols];
    for (idx, coefficient) in lp.objective().iter().enumerate() {
        let value = if minimize {
            coefficient.clone()
        } else {
            -coefficient.clone()
        };
        match var_map[idx] {
            VarMap::Direct(col) => c[col] = value,
            VarMap::Split { plus, minus } => {
                c[plus] = value.clone();
                c[minus] = -value;
            }
        }
    }

    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(lp.constraint_count());
    let mut b: Vec<Rational> = Vec::with_capacity(lp.constraint_count());
    let mut next_slack = slack_start;
    for constraint in lp.constraints() {
        let mut row = vec![Rational::zero(); cols];
        for (idx, coefficient) in &constraint.coefficients {
            match var_map[*idx] {
                VarMap::Direct(col) => row[col] += coefficient,
                VarMap::Split { plus, minus } => {
                    row[plus] += coefficient;
                    row[minus] -= coefficient;
                }
            }
        }
        match constraint.relation {
            Relation::Le => {
                row[next_slack] = Rational::from_integer(1.into());
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = Rational::from_integer((-1).into());
                next_slack += 1;
            }
            Relation::Eq => {}
        }
        a.push(row);
        b.push(constraint.rhs.clone());
    }

    // Select a maximal independent subset of rows; a dependent row with an
    // inconsistent right-hand side makes the whole system infeasible.
    let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut kept_rows: Vec<usize> = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut work: Vec<Rational> = row.clone();
        work.push(b[i].clone());
        for (pivot_col, pivot_row) in &echelon {
            if !work[*pivot_col].is_zero() {
                let factor = work[*pivot_col].clone();
                for (w, p) in work.iter_mut().zip(pivot_row.iter()) {
                    *w -= &factor * p;
                }
            }
        }
        match (0..cols).find(|&j| !work[j].is_zero()) {
            Some(pivot_col) => {
                let pivot = work[pivot_col].clone();
                for w in work.iter_mut() {
                    *w /= &pivot;
                }
                echelon.push((pivot_col, work));
                kept_rows.push(i);
            }
            None => {
                if !work[cols].is_zero() {
                    return Ok(Solution::infeasible());
                }
            }
        }
    }

    let rank = kept_rows.len();
    let ak: Vec<&Vec<Rational>> = kept_rows.iter().map(|&i| &a[i]).collect();
    let bk: Vec<Rational> = kept_rows.iter().map(|&i| b[i].clone()).collect();

    let mut best: Option<(Rational, Vec<Rational>, Vec<usize>)> = None;
    let mut unbounded = false;
    for basis in subsets(cols, rank) {
        let Some(inverse) = invert(&ak, &basis) else {
            continue;
        };
        let x_basis = mat_vec(&inverse, &bk);
        if x_basis.iter().any(|v| v.is_negative()) {
            continue;
        }
        let mut x = vec![Rational::zero(); cols];
        for (pos, &col) in basis.iter().enumerate() {
            x[col] = x_basis[pos].clone();
        }
        let objective: Rational = c
            .iter()
            .zip(&x)
            .map(|(cj, xj)| cj * xj)
            .sum();

        // Multipliers for this basis: y solves B^T y = c_B.
        let y = transpose_solve(&ak, &basis, &c);
        for j in 0..cols {
            if basis.contains(&j) {
                continue;
            }
            let reduced = &c[j]
                - &ak
                    .iter()
                    .zip(&y)
                    .map(|(row, yi)| &row[j] * yi)
                    .sum::<Rational>();
            if reduced.is_negative() {
                let column: Vec<Rational> = ak.iter().map(|row| row[j].clone()).collect();
                let direction = mat_vec(&inverse, &column);
                if direction.iter().all(|d| !d.is_positive()) {
                    unbounded = true;
                }
            }
        }

        let better = match &best {
            None => true,
            Some((best_objective, _, _)) => objective < *best_objective,
        };
        if better {
            best = Some((objective, x, basis.clone()));
        }
    }

    if unbounded {
        return Ok(Solution::unbounded());
    }
    let Some((objective, x, basis)) = best else {
        return Ok(Solution::infeasible());
    };

    let mut primal = Vec::with_capacity(lp.var_count());
    for map in &var_map {
        let value = match *map {
            VarMap::Direct(col) => x[col].clone(),
            VarMap::Split { plus, minus } => &x[plus] - &x[minus],
        };
        primal.push(value);
    }
    let y = transpose_solve(&ak, &basis, &c);
    let mut duals = vec![Rational::zero(); lp.constraint_count()];
    for (pos, &row) in kept_rows.iter().enumerate() {
        duals[row] = if minimize {
            y[pos].clone()
        } else {
            -y[pos].clone()
        };
    }
    let objective = if minimize { objective } else { -objective };

    Ok(Solution {
        status: Status::Optimal,
        primal,
        duals,
        objective: Some(objective),
    })
}

/// All `k`-element subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for j in start..n {
            if n - j < k - current.len() {
                break;
            }
            current.push(j);
            recurse(n, k, j + 1, current, out);
            current.pop();
        }
    }
    recurse(n, k, 0, &mut current, &mut out);
    out
}

/// Inverse of the basis matrix `A[:, basis]`, or `None` if singular.
fn invert(a: &[&Vec<Rational>], basis: &[usize]) -> Option<Vec<Vec<Rational>>> {
    let k = basis.len();
    let mut work: Vec<Vec<Rational>> = (0..k)
        .map(|r| {
            let mut row: Vec<Rational> = basis.iter().map(|&col| a[r][col].clone()).collect();
            row.extend((0..k).map(|j| {
                if j == r {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..k {
        let pivot_row = (col..k).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot_row);
        let pivot = work[col][col].clone();
        for entry in work[col].iter_mut() {
            *entry /= &pivot;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let factor = work[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..2 * k {
                let delta = &factor * &work[col][j];
                work[r][j] -= delta;
            }
        }
    }
    Some(work.into_iter().map(|row| row[k..].to_vec()).collect())
}

fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Solves `B^T y = c_B` for the given basis.
fn transpose_solve(a: &[&Vec<Rational>], basis: &[usize], c: &[Rational]) -> Vec<Rational> {
    let k = basis.len();
    let mut work: Vec<Vec<Rational>> = (0..k)
        .map(|pos| {
            let mut row: Vec<Rational> = (0..k).map(|r| a[r][basis[pos]].clone()).collect();
            row.push(c[basis[pos]].clone());
            row
        })
        .collect();
    // Plain elimination; the basis is invertible so a pivot always exists.
    for col in 0..k {
        let pivot_row = (col..k)
            .find(|&r| !work[r][col].is_zero())
            .expect("basis matrix is invertible");
        work.swap(col, pivot_row);
        let pivot = work[col][col].clone();
        for entry in work[col].iter_mut() {
            *entry /= &pivot;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let factor = work[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..=k {
                let delta = &factor * &work[col][j];
                work[r][j] -= delta;
            }
        }
    }
    (0..k).map(|r| work[r][k].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve, LinearProgram, Relation, Sense, SolveOptions, VarSign};
    use crate::scalar::rat;

    #[test]
    fn matches_trivial_minimum() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::Free);
        lp.set_objective_coefficient(x, rat(1));
        lp.add_constraint("lower", vec![(x, rat(1))], Relation::Ge, rat(1));
        let solution = enumerate_bases_oracle(&lp).unwrap();
        assert_eq!(solution.status, Status::Optimal);
        assert_eq!(solution.objective, Some(rat(1)));
    }

    #[test]
    fn detects_infeasible_pair() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::Free);
        lp.set_objective_coefficient(x, rat(1));
        lp.add_constraint("upper", vec![(x, rat(1))], Relation::Le, rat(0));
        lp.add_constraint("lower", vec![(x, rat(1))], Relation::Ge, rat(1));
        let solution = enumerate_bases_oracle(&lp).unwrap();
        assert_eq!(solution.status, Status::Infeasible);
    }

    #[test]
    fn detects_unbounded_ray() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::Free);
        lp.set_objective_coefficient(x, rat(1));
        lp.add_constraint("upper", vec![(x, rat(1))], Relation::Le, rat(0));
        let solution = enumerate_bases_oracle(&lp).unwrap();
        assert_eq!(solution.status, Status::Unbounded);
    }

    #[test]
    fn refuses_oversized_programs() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        for i in 0..8 {
            // Each free variable costs two standard-form columns.
            lp.add_var(format!("x{i}"), VarSign::Free);
        }
        assert!(matches!(
            enumerate_bases_oracle(&lp),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn agrees_with_simplex_on_degenerate_lp() {
        // Degenerate vertex at the origin.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", VarSign::NonNegative);
        let y = lp.add_var("y", VarSign::NonNegative);
        lp.set_objective_coefficient(x, rat(-1));
        lp.set_objective_coefficient(y, rat(-1));
        lp.add_constraint("a", vec![(x, rat(1)), (y, rat(1))], Relation::Le, rat(1));
        lp.add_constraint("b", vec![(x, rat(1))], Relation::Le, rat(1));
        lp.add_constraint("c", vec![(x, rat(2)), (y, rat(1))], Relation::Le, rat(2));
        let oracle = enumerate_bases_oracle(&lp).unwrap();
        let simplex = solve(&lp, &SolveOptions::exact()).unwrap();
        assert_eq!(oracle.status, simplex.status);
        assert_eq!(oracle.objective, simplex.objective);
    }
}
