//! Dense two-phase simplex solver.
//!
//! Problems are stated as
//!
//! ```text
//! maximize    c·x
//! subject to  A_eq x  = b_eq
//!             A_ub x <= b_ub
//!             x >= l
//! ```
//!
//! Every LP in the crate (transport plans, ambiguity-set membership, the
//! inner worst-case problem) goes through [`solve_lp`]. Pivoting follows
//! Bland's rule so degenerate problems terminate, and the tableau is kept
//! dense and row-major: the problem sizes here are a few thousand columns at
//! most.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A linear program in maximization form.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<T> {
    pub objective: Vec<T>,
    pub eq_matrix: Vec<Vec<T>>,
    pub eq_rhs: Vec<T>,
    pub ub_matrix: Vec<Vec<T>>,
    pub ub_rhs: Vec<T>,
    pub lower_bounds: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`].
///
/// `value` is `-inf` for infeasible problems and `+inf` for unbounded ones;
/// `point` is empty unless the status is [`LpStatus::Optimal`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub value: T,
    pub point: Vec<T>,
    pub iterations: usize,
}

impl<T: Scalar> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl<T: Scalar> LpProblem<T> {
    /// An unconstrained problem over `x >= 0`.
    pub fn new(objective: Vec<T>) -> Self {
        let n = objective.len();
        Self {
            objective,
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
            ub_matrix: Vec::new(),
            ub_rhs: Vec::new(),
            lower_bounds: vec![T::zero(); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `row·x = rhs`.
    pub fn add_eq(&mut self, row: Vec<T>, rhs: T) -> &mut Self {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    /// Adds `row·x <= rhs`.
    pub fn add_ub(&mut self, row: Vec<T>, rhs: T) -> &mut Self {
        self.ub_matrix.push(row);
        self.ub_rhs.push(rhs);
        self
    }

    /// Adds `row·x >= rhs`, stored as `-row·x <= -rhs`.
    pub fn add_lb(&mut self, row: Vec<T>, rhs: T) -> &mut Self {
        self.add_ub(row.into_iter().map(|v| -v).collect(), -rhs)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if n == 0 {
            return Err(Error::MalformedProblem("no variables".into()));
        }
        if !self.objective.iter().all(|v| v.is_finite()) {
            return Err(Error::MalformedProblem("non-finite objective".into()));
        }
        if self.lower_bounds.len() != n {
            return Err(Error::MalformedProblem(format!(
                "{} lower bounds for {} variables",
                self.lower_bounds.len(),
                n
            )));
        }
        if !self.lower_bounds.iter().all(|v| v.is_finite()) {
            return Err(Error::MalformedProblem("non-finite lower bound".into()));
        }
        for (kind, matrix, rhs) in [
            ("equality", &self.eq_matrix, &self.eq_rhs),
            ("inequality", &self.ub_matrix, &self.ub_rhs),
        ] {
            if matrix.len() != rhs.len() {
                return Err(Error::MalformedProblem(format!(
                    "{} {kind} rows but {} right-hand sides",
                    matrix.len(),
                    rhs.len()
                )));
            }
            for (i, row) in matrix.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::MalformedProblem(format!(
                        "{kind} row {i} has {} columns, expected {n}",
                        row.len()
                    )));
                }
                if !row.iter().all(|v| v.is_finite()) || !rhs[i].is_finite() {
                    return Err(Error::MalformedProblem(format!("non-finite entry in {kind} row {i}")));
                }
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint (including bounds) at `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for (row, &b) in self.eq_matrix.iter().zip(&self.eq_rhs) {
            worst = worst.max((crate::scalar::dot(row, x) - b).abs());
        }
        for (row, &b) in self.ub_matrix.iter().zip(&self.ub_rhs) {
            worst = worst.max(crate::scalar::dot(row, x) - b);
        }
        for (&xi, &li) in x.iter().zip(&self.lower_bounds) {
            worst = worst.max(li - xi);
        }
        worst
    }
}

/// Dense simplex tableau: `rows` constraint rows followed by one objective
/// row, each `width` entries long with the right-hand side in the last slot.
struct Tableau<T> {
    data: Vec<T>,
    width: usize,
    rows: usize,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.width + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> T {
        self.data[i * self.width + self.width - 1]
    }

    fn objective_row(&self) -> usize {
        self.rows
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let p = self.at(r, e);
        for j in 0..w {
            self.data[r * w + j] /= p;
        }
        self.data[r * w + e] = T::one();
        let pivot_row: Vec<T> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + e];
            if f == T::zero() {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            row[e] = T::zero();
        }
        self.basis[r] = e;
    }

    /// Rewrites the objective row for costs `c` (one entry per column
    /// except the right-hand side) relative to the current basis.
    fn set_objective(&mut self, c: &[T]) {
        let w = self.width;
        let o = self.objective_row();
        for j in 0..w - 1 {
            self.data[o * w + j] = c[j];
        }
        self.data[o * w + w - 1] = T::zero();
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb == T::zero() {
                continue;
            }
            for j in 0..w {
                let v = self.data[i * w + j];
                self.data[o * w + j] -= cb * v;
            }
        }
    }

    /// Runs Bland-rule simplex iterations over columns `< allowed`.
    /// Returns `Ok(true)` at optimality and `Ok(false)` when unbounded.
    fn optimize(&mut self, allowed: usize, iterations: &mut usize, limit: usize) -> Result<bool> {
        let opt_tol = T::lp_tol();
        let piv_tol = T::pivot_tol();
        let o = self.objective_row();
        loop {
            let entering = (0..allowed).find(|&j| self.at(o, j) > opt_tol);
            let Some(e) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows {
                let a = self.at(i, e);
                if a <= piv_tol {
                    continue;
                }
                let ratio = self.rhs(i).max(T::zero()) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let slack = T::lit(1e-12) * (T::one() + br.abs());
                        if ratio < br - slack || ((ratio - br).abs() <= slack && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, e);
            *iterations += 1;
            if *iterations > limit {
                return Err(Error::IterationLimit(limit));
            }
        }
    }
}

/// Solves a linear program with the two-phase simplex method.
pub fn solve_lp<T: Scalar>(problem: &LpProblem<T>) -> Result<LpSolution<T>> {
    problem.validate()?;
    let n = problem.num_vars();
    let m_ub = problem.ub_matrix.len();
    let m_eq = problem.eq_matrix.len();
    let m = m_ub + m_eq;
    let lower = &problem.lower_bounds;

    // Shift x = y + l so every structural variable is y >= 0, and orient each
    // row so its right-hand side is nonnegative.
    struct Row<T> {
        coeffs: Vec<T>,
        rhs: T,
        slack: Option<(usize, T)>,
        needs_artificial: bool,
    }
    let mut rows: Vec<Row<T>> = Vec::with_capacity(m);
    for (i, (a, &b)) in problem.ub_matrix.iter().zip(&problem.ub_rhs).enumerate() {
        let rhs = b - crate::scalar::dot(a, lower);
        if rhs >= T::zero() {
            rows.push(Row {
                coeffs: a.clone(),
                rhs,
                slack: Some((n + i, T::one())),
                needs_artificial: false,
            });
        } else {
            rows.push(Row {
                coeffs: a.iter().map(|&v| -v).collect(),
                rhs: -rhs,
                slack: Some((n + i, -T::one())),
                needs_artificial: true,
            });
        }
    }
    for (a, &b) in problem.eq_matrix.iter().zip(&problem.eq_rhs) {
        let rhs = b - crate::scalar::dot(a, lower);
        let (coeffs, rhs) = if rhs >= T::zero() {
            (a.clone(), rhs)
        } else {
            (a.iter().map(|&v| -v).collect(), -rhs)
        };
        rows.push(Row {
            coeffs,
            rhs,
            slack: None,
            needs_artificial: true,
        });
    }

    let n_art = rows.iter().filter(|r| r.needs_artificial).count();
    let structural = n + m_ub;
    let width = structural + n_art + 1;
    let mut tab = Tableau {
        data: vec![T::zero(); (m + 1) * width],
        width,
        rows: m,
        basis: vec![0; m],
    };
    let mut next_art = structural;
    for (i, row) in rows.iter().enumerate() {
        let base = i * width;
        tab.data[base..base + n].copy_from_slice(&row.coeffs);
        if let Some((col, coef)) = row.slack {
            tab.data[base + col] = coef;
        }
        tab.data[base + width - 1] = row.rhs;
        if row.needs_artificial {
            tab.data[base + next_art] = T::one();
            tab.basis[i] = next_art;
            next_art += 1;
        } else {
            tab.basis[i] = row.slack.expect("inequality row has a slack").0;
        }
    }

    let limit = 1000 + 100 * (m + width);
    let mut iterations = 0usize;

    if n_art > 0 {
        let mut phase1 = vec![T::zero(); width - 1];
        for c in phase1.iter_mut().skip(structural) {
            *c = -T::one();
        }
        tab.set_objective(&phase1);
        tab.optimize(width - 1, &mut iterations, limit)?;
        let infeasibility: T = (0..m).filter(|&i| tab.basis[i] >= structural).map(|i| tab.rhs(i)).sum();
        if infeasibility > T::lp_tol() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: T::neg_infinity(),
                point: Vec::new(),
                iterations,
            });
        }
        // Drive remaining (zero-valued) artificials out of the basis; rows
        // where that is impossible are linearly dependent and are dropped.
        let mut redundant = Vec::new();
        for i in 0..m {
            if tab.basis[i] < structural {
                continue;
            }
            match (0..structural).find(|&j| tab.at(i, j).abs() > T::pivot_tol()) {
                Some(j) => tab.pivot(i, j),
                None => redundant.push(i),
            }
        }
        tab = compact(tab, structural, &redundant);
    }

    let mut costs = vec![T::zero(); structural];
    costs[..n].copy_from_slice(&problem.objective);
    tab.set_objective(&costs);
    let bounded = tab.optimize(structural, &mut iterations, limit)?;
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: T::infinity(),
            point: Vec::new(),
            iterations,
        });
    }

    let mut point = lower.clone();
    for i in 0..tab.rows {
        let j = tab.basis[i];
        if j < n {
            let v = tab.rhs(i);
            point[j] += if v < T::zero() && v > -T::lp_tol() {
                T::zero()
            } else {
                v
            };
        }
    }
    let value = crate::scalar::dot(&problem.objective, &point);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        point,
        iterations,
    })
}

/// Removes artificial columns and the listed redundant rows.
fn compact<T: Scalar>(tab: Tableau<T>, structural: usize, redundant: &[usize]) -> Tableau<T> {
    let keep: Vec<usize> = (0..tab.rows).filter(|i| !redundant.contains(i)).collect();
    let width = structural + 1;
    let mut data = Vec::with_capacity((keep.len() + 1) * width);
    let mut basis = Vec::with_capacity(keep.len());
    for &i in keep.iter().chain(std::iter::once(&tab.rows)) {
        data.extend_from_slice(&tab.data[i * tab.width..i * tab.width + structural]);
        data.push(tab.rhs(i));
        if i < tab.rows {
            basis.push(tab.basis[i]);
        }
    }
    Tableau {
        data,
        width,
        rows: keep.len(),
        basis,
    }
}
