//! Dense two-phase tableau simplex.
//!
//! Pivoting uses Dantzig's rule and switches to Bland's rule after a run of
//! degenerate pivots. In exact mode the `f64` simplex is run first and its
//! final basis is re-established in rational arithmetic; the exact phase 2
//! then continues from there, so the answer is exact and usually needs no
//! further pivots.

use std::fmt::Write as _;

use crate::num::{display, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub name: String,
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

/// `maximize objective · x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub var_names: Vec<String>,
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl std::fmt::Display for LpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::IterationLimit => "stopped at the iteration limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome<T> {
    pub status: LpStatus,
    pub objective: T,
    pub values: Vec<T>,
    /// Tableau column basic in each row (internal column numbering).
    pub basis: Vec<usize>,
    pub pivots: usize,
}

const MAX_PIVOTS: usize = 50_000;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 30;

impl<T: Scalar> LinearProgram<T> {
    pub fn new(var_names: Vec<String>) -> Self {
        let n = var_names.len();
        LinearProgram { var_names, objective: vec![T::zero(); n], constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn add(&mut self, name: impl Into<String>, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) {
        self.constraints.push(Constraint { name: name.into(), coeffs, relation, rhs });
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LinearProgram<U> {
        LinearProgram {
            var_names: self.var_names.clone(),
            objective: self.objective.iter().map(&f).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    name: c.name.clone(),
                    coeffs: c.coeffs.iter().map(|(i, v)| (*i, f(v))).collect(),
                    relation: c.relation,
                    rhs: f(&c.rhs),
                })
                .collect(),
        }
    }

    /// Value of the objective at `x`.
    pub fn evaluate(&self, x: &[T]) -> T {
        self.objective.iter().zip(x).map(|(c, v)| c.clone() * v.clone()).sum()
    }

    /// Names of constraints violated by `x` beyond the tolerance.
    pub fn violated(&self, x: &[T]) -> Vec<String> {
        let mut out = Vec::new();
        for (i, v) in x.iter().enumerate() {
            if v.is_neg() {
                out.push(format!("{} >= 0", self.var_names[i]));
            }
        }
        for c in &self.constraints {
            let lhs: T = c.coeffs.iter().map(|(i, a)| a.clone() * x[*i].clone()).sum();
            let ok = match c.relation {
                Relation::Le => lhs.le_tol(&c.rhs),
                Relation::Ge => c.rhs.le_tol(&lhs),
                Relation::Eq => lhs.near(&c.rhs),
            };
            if !ok {
                out.push(c.name.clone());
            }
        }
        out
    }

    /// CPLEX-style LP text. Non-integral exact coefficients are written as decimals.
    pub fn to_lp_text(&self) -> String {
        fn term<T: Scalar>(out: &mut String, first: &mut bool, coef: &T, name: &str) {
            let neg = coef.is_neg();
            let mag = coef.abs();
            let sign = match (neg, *first) {
                (true, _) => "- ",
                (false, true) => "",
                (false, false) => "+ ",
            };
            let value = if T::EXACT && mag.to_rational().is_integer() {
                display(&mag)
            } else {
                format!("{}", mag.to_f64())
            };
            let _ = write!(out, "{sign}{value} {name} ");
            *first = false;
        }
        let mut out = String::from("\\ shared-processor LP\nMaximize\n obj: ");
        let mut first = true;
        for (i, c) in self.objective.iter().enumerate() {
            if !c.near_zero() {
                term(&mut out, &mut first, c, &self.var_names[i]);
            }
        }
        if first {
            out.push_str("0 ");
            out.push_str(&self.var_names[0]);
        }
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}: ", c.name);
            let mut first = true;
            for (i, a) in &c.coeffs {
                term(&mut out, &mut first, a, &self.var_names[*i]);
            }
            if first {
                out.push_str("0 ");
                out.push_str(&self.var_names[0]);
                out.push(' ');
            }
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let rhs = if T::EXACT && c.rhs.to_rational().is_integer() {
                display(&c.rhs)
            } else {
                format!("{}", c.rhs.to_f64())
            };
            let _ = writeln!(out, "{rel} {rhs}");
        }
        out.push_str("Bounds\n");
        for name in &self.var_names {
            let _ = writeln!(out, " {name} >= 0");
        }
        out.push_str("End\n");
        out
    }
}

/// Column layout shared by the float and exact tableaus.
struct Layout {
    structural: usize,
    total: usize,
    /// First artificial column; artificials occupy `artificial_start..total`.
    artificial_start: usize,
    /// Initial basic column of each row.
    initial_basis: Vec<usize>,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    layout: Layout,
    pivots: usize,
}

fn build<T: Scalar>(lp: &LinearProgram<T>) -> Tableau<T> {
    let n = lp.num_vars();
    let r = lp.constraints.len();
    // normalized relation per row after making rhs non-negative
    let rels: Vec<(Relation, bool)> = lp
        .constraints
        .iter()
        .map(|c| {
            let flip = c.rhs.is_neg();
            let rel = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (rel, _) => rel,
            };
            (rel, flip)
        })
        .collect();
    let slack_count = rels.iter().filter(|(rel, _)| *rel != Relation::Eq).count();
    let art_count = rels.iter().filter(|(rel, _)| *rel != Relation::Le).count();
    let artificial_start = n + slack_count;
    let total = artificial_start + art_count;
    let mut rows = vec![vec![T::zero(); total + 1]; r];
    let mut initial_basis = vec![0; r];
    let mut slack = n;
    let mut art = artificial_start;
    for (i, c) in lp.constraints.iter().enumerate() {
        let (rel, flip) = rels[i];
        let sign = if flip { -T::one() } else { T::one() };
        for (j, a) in &c.coeffs {
            rows[i][*j] += sign.clone() * a.clone();
        }
        rows[i][total] = sign * c.rhs.clone();
        match rel {
            Relation::Le => {
                rows[i][slack] = T::one();
                initial_basis[i] = slack;
                slack += 1;
            }
            Relation::Ge => {
                rows[i][slack] = -T::one();
                slack += 1;
                rows[i][art] = T::one();
                initial_basis[i] = art;
                art += 1;
            }
            Relation::Eq => {
                rows[i][art] = T::one();
                initial_basis[i] = art;
                art += 1;
            }
        }
    }
    Tableau {
        rows,
        basis: initial_basis.clone(),
        layout: Layout { structural: n, total, artificial_start, initial_basis },
        pivots: 0,
    }
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.layout.total]
    }

    fn pivot(&mut self, row: usize, col: usize, objective: &mut [T]) {
        let piv = self.rows[row][col].clone();
        let width = self.layout.total + 1;
        if !piv.is_one_like() {
            for k in 0..width {
                if !self.rows[row][k].near_zero() {
                    let v = self.rows[row][k].clone() / piv.clone();
                    self.rows[row][k] = v;
                } else {
                    self.rows[row][k] = T::zero();
                }
            }
        }
        self.rows[row][col] = T::one();
        let pivot_row = self.rows[row].clone();
        let nz: Vec<usize> = (0..width).filter(|&k| !pivot_row[k].near_zero()).collect();
        for (i, other) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = other[col].clone();
            if factor.near_zero() {
                other[col] = T::zero();
                continue;
            }
            for &k in &nz {
                let v = other[k].clone() - factor.clone() * pivot_row[k].clone();
                other[k] = if T::EXACT { v } else { v.snap() };
            }
            other[col] = T::zero();
        }
        let factor = objective[col].clone();
        if !factor.near_zero() {
            for &k in &nz {
                let v = objective[k].clone() - factor.clone() * pivot_row[k].clone();
                objective[k] = if T::EXACT { v } else { v.snap() };
            }
        }
        objective[col] = T::zero();
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Reduced-cost row for maximizing `cost · x`: `d_j = c_j − c_B B⁻¹ A_j`,
    /// with the last entry holding `−z`.
    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let width = self.layout.total + 1;
        let mut d: Vec<T> = (0..width).map(|k| if k < cost.len() { cost[k].clone() } else { T::zero() }).collect();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = if b < cost.len() { cost[b].clone() } else { T::zero() };
            if cb.near_zero() {
                continue;
            }
            for k in 0..width {
                let a = &self.rows[i][k];
                if !a.near_zero() {
                    d[k] = d[k].clone() - cb.clone() * a.clone();
                }
            }
        }
        for &b in &self.basis {
            d[b] = T::zero();
        }
        d
    }

    /// Runs primal simplex iterations on `objective` (reduced-cost row).
    /// Columns `>= allowed_cols` may not enter.
    fn optimize(&mut self, objective: &mut [T], allowed_cols: usize) -> LpStatus {
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return LpStatus::IterationLimit;
            }
            let entering = if bland {
                (0..allowed_cols).find(|&j| objective[j].is_pos())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..allowed_cols {
                    if objective[j].is_pos() && best.is_none_or(|b| objective[j] > objective[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio.lt_tol(lr) || (ratio.near(lr) && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, ratio)) = leave else {
                return LpStatus::Unbounded;
            };
            if ratio.near_zero() {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_RUN_BEFORE_BLAND {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, col, objective);
        }
    }

    fn phase_one(&mut self) -> bool {
        let start = self.layout.artificial_start;
        if start == self.layout.total {
            return true;
        }
        // maximize −Σ artificials
        let cost: Vec<T> = (0..self.layout.total).map(|k| if k >= start { -T::one() } else { T::zero() }).collect();
        let mut obj = self.reduced_costs(&cost);
        let status = self.optimize(&mut obj, self.layout.total);
        if status != LpStatus::Optimal {
            return false;
        }
        let infeasibility: T = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= start)
            .map(|(i, _)| self.rhs(i).clone())
            .sum();
        if infeasibility.is_pos() {
            return false;
        }
        self.drive_out_artificials();
        true
    }

    fn drive_out_artificials(&mut self) {
        let start = self.layout.artificial_start;
        for i in 0..self.rows.len() {
            if self.basis[i] < start {
                continue;
            }
            if let Some(col) = (0..start).find(|&j| !self.rows[i][j].near_zero()) {
                let mut scratch = vec![T::zero(); self.layout.total + 1];
                self.pivot(i, col, &mut scratch);
            }
        }
    }

    fn phase_two(&mut self, cost: &[T]) -> LpStatus {
        let mut obj = self.reduced_costs(cost);
        self.optimize(&mut obj, self.layout.artificial_start)
    }

    fn values(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.layout.structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.layout.structural {
                x[b] = if T::EXACT { self.rhs(i).clone() } else { self.rhs(i).clone().snap() };
            }
        }
        x
    }

    /// Re-establishes `hint` as the basis by Gauss–Jordan pivots. Fails if a
    /// hinted column cannot be pivoted in or the basis is not primal feasible.
    fn install_basis(&mut self, hint: &[usize]) -> bool {
        let start = self.layout.artificial_start;
        let mut scratch = vec![T::zero(); self.layout.total + 1];
        let wanted: Vec<usize> = hint.iter().copied().filter(|&c| c < start).collect();
        let mut fixed = vec![false; self.rows.len()];
        for &col in &wanted {
            if let Some(i) = self.basis.iter().position(|&b| b == col) {
                fixed[i] = true;
                continue;
            }
            let candidate = (0..self.rows.len())
                .filter(|&i| !fixed[i] && !self.rows[i][col].near_zero())
                .min_by_key(|&i| (self.basis[i] < start, i));
            let Some(row) = candidate else {
                return false;
            };
            self.pivot(row, col, &mut scratch);
            fixed[row] = true;
        }
        for i in 0..self.rows.len() {
            let v = self.rhs(i);
            if v.is_neg() || (self.basis[i] >= start && !v.near_zero()) {
                return false;
            }
        }
        self.drive_out_artificials();
        true
    }
}

trait OneLike {
    fn is_one_like(&self) -> bool;
}

impl<T: Scalar> OneLike for T {
    fn is_one_like(&self) -> bool {
        (self.clone() - T::one()).near_zero()
    }
}

fn finish<T: Scalar>(lp: &LinearProgram<T>, tab: Tableau<T>, status: LpStatus) -> LpOutcome<T> {
    let values = if status == LpStatus::Optimal { tab.values() } else { vec![T::zero(); lp.num_vars()] };
    LpOutcome {
        status,
        objective: lp.evaluate(&values),
        values,
        basis: tab.basis,
        pivots: tab.pivots,
    }
}

/// Cold two-phase solve in the arithmetic of `T`.
pub fn solve_direct<T: Scalar>(lp: &LinearProgram<T>) -> LpOutcome<T> {
    let mut tab = build(lp);
    if !tab.phase_one() {
        return finish(lp, tab, LpStatus::Infeasible);
    }
    let status = tab.phase_two(&lp.objective);
    finish(lp, tab, status)
}

/// Solve starting from a basis proposed by another run (same column layout).
/// Falls back to a cold solve when the basis cannot be installed.
pub fn solve_from_basis<T: Scalar>(lp: &LinearProgram<T>, hint: &[usize]) -> LpOutcome<T> {
    let mut tab = build(lp);
    if tab.layout.initial_basis.len() != hint.len() || !tab.install_basis(hint) {
        return solve_direct(lp);
    }
    let status = tab.phase_two(&lp.objective);
    if status != LpStatus::Optimal {
        return solve_direct(lp);
    }
    finish(lp, tab, status)
}

/// Solves the program; exact arithmetic is seeded with the `f64` basis.
pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> LpOutcome<T> {
    if !T::EXACT {
        return solve_direct(lp);
    }
    let float = solve_direct(&lp.map(|v| v.to_f64()));
    if float.status != LpStatus::Optimal {
        return solve_direct(lp);
    }
    solve_from_basis(lp, &float.basis)
}
