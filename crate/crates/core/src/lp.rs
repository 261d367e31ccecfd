//! One linear program per job order, and exact search over all orders.
//!
//! For a fixed order of private completion times `t_1 ≤ … ≤ t_n` the program
//! chooses, for every job `j`, machine `i` and window `(t_{k−1}, t_k)` with
//! `k ≤ j`, how long `x_{jik}` the job runs there. Window capacities,
//! per-job processing time and the chain of completion times are linear, so
//! the best schedule compatible with the order is an LP optimum.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::{total_weighted_overlap, Instance, Piece, Schedule};
use crate::num::{display, Scalar};
use crate::simplex::{self, LinearProgram, LpStatus, Relation};

/// LP for a fixed order of private completion times.
#[derive(Debug, Clone)]
pub struct LpModel<T: Scalar> {
    permutation: Vec<usize>,
    m: usize,
    program: LinearProgram<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub objective: T,
    /// All variable values in model order.
    pub values: Vec<T>,
    pub(crate) basis: Vec<usize>,
}

/// The best order-compatible schedule found for some order.
#[derive(Debug, Clone)]
pub struct OrderSolution<T: Scalar> {
    pub permutation: Vec<usize>,
    pub solution: LpSolution<T>,
    pub schedule: Schedule<T>,
    pub objective: T,
}

/// Orders examined by [`solve_exact`] are `n!`; more jobs than this are refused.
pub const DEFAULT_EXACT_JOB_LIMIT: usize = 8;

/// Relative gap under which a float-screened order is re-solved exactly.
const SCREEN_GAP: f64 = 1e-7;

fn check_permutation(n: usize, permutation: &[usize]) -> Result<()> {
    if permutation.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "expected {n} jobs, got {}",
            permutation.len()
        )));
    }
    let mut seen = vec![false; n];
    for &j in permutation {
        if j >= n {
            return Err(Error::InvalidPermutation(format!("unknown job index {j}")));
        }
        if seen[j] {
            return Err(Error::InvalidPermutation(format!("job index {j} appears twice")));
        }
        seen[j] = true;
    }
    Ok(())
}

impl<T: Scalar> LpModel<T> {
    pub fn n(&self) -> usize {
        self.permutation.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn program(&self) -> &LinearProgram<T> {
        &self.program
    }

    pub fn num_vars(&self) -> usize {
        self.program.num_vars()
    }

    /// Completion time of the job at position `pos` of the order.
    pub fn t_var(&self, pos: usize) -> usize {
        pos
    }

    /// Time the job at position `pos` spends on machine `i` in window `k ≤ pos`.
    pub fn x_var(&self, pos: usize, machine: usize, window: usize) -> usize {
        debug_assert!(window <= pos && machine < self.m);
        self.n() + self.m * (pos * (pos + 1) / 2) + machine * (pos + 1) + window
    }

    /// LP text for external cross-checks.
    pub fn to_lp_text(&self) -> String {
        self.program.to_lp_text()
    }
}

/// Builds the LP whose feasible points are the schedules with private
/// completions ordered as `permutation` (first entry finishes first).
pub fn build_compatible_lp<T: Scalar>(instance: &Instance<T>, permutation: &[usize]) -> Result<LpModel<T>> {
    let n = instance.n();
    let m = instance.m();
    check_permutation(n, permutation)?;
    let mut names: Vec<String> = (0..n).map(|pos| format!("t_{}", pos + 1)).collect();
    for pos in 0..n {
        for i in 0..m {
            for k in 0..=pos {
                names.push(format!("x_{}_{}_{}", pos + 1, i + 1, k + 1));
            }
        }
    }
    let mut model = LpModel { permutation: permutation.to_vec(), m, program: LinearProgram::new(names) };
    for pos in 0..n {
        let job = permutation[pos];
        for i in 0..m {
            for k in 0..=pos {
                let v = model.x_var(pos, i, k);
                model.program.objective[v] = instance.job(job).w.clone() - instance.cost(i).clone();
            }
        }
    }
    for k in 1..n {
        model.program.add(
            format!("chain_{}", k + 1),
            vec![(k - 1, T::one()), (k, -T::one())],
            Relation::Le,
            T::zero(),
        );
    }
    for i in 0..m {
        for k in 0..n {
            let mut row: Vec<(usize, T)> = (k..n).map(|pos| (model.x_var(pos, i, k), T::one())).collect();
            row.push((k, -T::one()));
            if k > 0 {
                row.push((k - 1, T::one()));
            }
            model.program.add(format!("cap_{}_{}", i + 1, k + 1), row, Relation::Le, T::zero());
        }
    }
    for pos in 0..n {
        let mut row = vec![(pos, T::one())];
        for i in 0..m {
            for k in 0..=pos {
                row.push((model.x_var(pos, i, k), T::one()));
            }
        }
        model.program.add(
            format!("done_{}", pos + 1),
            row,
            Relation::Eq,
            instance.job(permutation[pos]).p.clone(),
        );
    }
    Ok(model)
}

fn wrap<T: Scalar>(out: simplex::LpOutcome<T>) -> LpSolution<T> {
    LpSolution { status: out.status, objective: out.objective, values: out.values, basis: out.basis }
}

/// Optimal basic solution of the model.
pub fn solve_lp<T: Scalar>(model: &LpModel<T>) -> LpSolution<T> {
    wrap(simplex::solve(&model.program))
}

fn require_optimal<T: Scalar>(solution: &LpSolution<T>) -> Result<()> {
    match solution.status {
        LpStatus::Optimal => Ok(()),
        // a long job cannot finish before a much shorter one
        LpStatus::Infeasible => Err(Error::LpStatus("infeasible: no schedule completes in this order".into())),
        // the objective is bounded by Σ p_j max(w_j, 0)
        status => Err(Error::Invariant(format!("order-compatible LP is {status}"))),
    }
}

/// Schedule of an optimal solution: `C = t`, and inside each window the
/// pieces on a machine are packed left to right in order position.
pub fn extract_schedule<T: Scalar>(solution: &LpSolution<T>, model: &LpModel<T>) -> Result<Schedule<T>> {
    if solution.status != LpStatus::Optimal {
        return Err(Error::LpStatus(solution.status.to_string()));
    }
    let n = model.n();
    let v = &solution.values;
    let mut completion = vec![T::zero(); n];
    for pos in 0..n {
        completion[model.permutation[pos]] = v[model.t_var(pos)].clone();
    }
    let mut pieces = Vec::new();
    for i in 0..model.m {
        for k in 0..n {
            let mut cursor = if k == 0 { T::zero() } else { v[model.t_var(k - 1)].clone() };
            for pos in k..n {
                let len = v[model.x_var(pos, i, k)].clone();
                if !len.is_pos() {
                    continue;
                }
                let end = cursor.clone() + len;
                pieces.push(Piece::new(model.permutation[pos], i, cursor.clone(), end.clone()));
                cursor = end;
            }
        }
    }
    Schedule::new(completion, pieces)
}

/// Encodes a schedule as a point of the model: `t` from private completions,
/// `x_{jik}` as the time job `j` spends on machine `i` inside window `k`.
/// Fails unless the schedule's private completions follow the model's order.
pub fn encode_schedule<T: Scalar>(schedule: &Schedule<T>, model: &LpModel<T>) -> Result<Vec<T>> {
    let n = model.n();
    let mut v = vec![T::zero(); model.num_vars()];
    for pos in 0..n {
        v[pos] = schedule.completion(model.permutation[pos]).clone();
        if pos > 0 && v[pos].lt_tol(&v[pos - 1]) {
            return Err(Error::Precondition("private completions do not follow the order".into()));
        }
    }
    let mut position = vec![0; n];
    for (pos, &j) in model.permutation.iter().enumerate() {
        position[j] = pos;
    }
    for piece in schedule.pieces() {
        let pos = position[piece.job];
        for k in 0..=pos {
            let lo = if k == 0 { T::zero() } else { v[k - 1].clone() };
            let hi = v[k].clone();
            let a = T::max_of(lo, piece.start.clone());
            let b = T::min_of(hi, piece.end.clone());
            if a < b {
                let idx = model.x_var(pos, piece.machine, k);
                v[idx] = v[idx].clone() + (b - a);
            }
        }
    }
    Ok(v)
}

/// Order of jobs by private completion time, ties by job index.
pub fn completion_order<T: Scalar>(schedule: &Schedule<T>) -> Vec<usize> {
    let c = schedule.private_completion();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[a].partial_cmp(&c[b]).expect("comparable").then(a.cmp(&b)));
    order
}

/// Solves the LP of one order and extracts its schedule.
pub fn solve_order<T: Scalar>(instance: &Instance<T>, permutation: &[usize]) -> Result<OrderSolution<T>> {
    let model = build_compatible_lp(instance, permutation)?;
    let solution = solve_lp(&model);
    finish_order(instance, model, solution)
}

fn finish_order<T: Scalar>(
    instance: &Instance<T>,
    model: LpModel<T>,
    solution: LpSolution<T>,
) -> Result<OrderSolution<T>> {
    require_optimal(&solution)?;
    let schedule = extract_schedule(&solution, &model)?;
    let objective = total_weighted_overlap(&schedule, instance)?.total_weighted;
    if !objective.near(&solution.objective) {
        return Err(Error::Invariant(format!(
            "extracted schedule has Ω = {} but the LP value is {}",
            display(&objective),
            display(&solution.objective)
        )));
    }
    Ok(OrderSolution { permutation: model.permutation, solution, schedule, objective })
}

/// Global optimum: the best order-compatible LP optimum over all `n!` orders.
/// Ties go to the lexicographically smallest order.
pub fn solve_exact<T: Scalar>(instance: &Instance<T>) -> Result<OrderSolution<T>> {
    solve_exact_with_limit(instance, DEFAULT_EXACT_JOB_LIMIT)
}

pub fn solve_exact_with_limit<T: Scalar>(instance: &Instance<T>, max_jobs: usize) -> Result<OrderSolution<T>> {
    let n = instance.n();
    if n > max_jobs {
        return Err(Error::Refused(format!(
            "exact search enumerates n! orders; n = {n} exceeds the limit of {max_jobs} jobs"
        )));
    }
    if !T::EXACT {
        let mut best: Option<(Vec<usize>, LpModel<T>, LpSolution<T>)> = None;
        for perm in (0..n).permutations(n) {
            let model = build_compatible_lp(instance, &perm)?;
            let sol = solve_lp(&model);
            if sol.status == LpStatus::Infeasible {
                continue;
            }
            require_optimal(&sol)?;
            if best.as_ref().is_none_or(|(_, _, b)| b.objective.lt_tol(&sol.objective)) {
                best = Some((perm, model, sol));
            }
        }
        let (_, model, sol) = best.expect("at least one order");
        return finish_order(instance, model, sol);
    }
    // Screen every order in f64, then settle the near-best ones exactly.
    let float_instance = instance.to_f64();
    let mut screened: Vec<(Vec<usize>, Option<(f64, Vec<usize>)>)> = Vec::new();
    let mut best_float = f64::NEG_INFINITY;
    for perm in (0..n).permutations(n) {
        let model = build_compatible_lp(&float_instance, &perm)?;
        let out = simplex::solve_direct(model.program());
        if out.status == LpStatus::Optimal {
            best_float = best_float.max(out.objective);
            screened.push((perm, Some((out.objective, out.basis))));
        } else {
            screened.push((perm, None));
        }
    }
    let threshold = best_float - SCREEN_GAP * best_float.abs().max(1.0);
    let mut best: Option<(LpModel<T>, LpSolution<T>)> = None;
    for (perm, screen) in screened {
        let model = build_compatible_lp(instance, &perm)?;
        let sol = match screen {
            Some((value, _)) if value < threshold => continue,
            Some((_, basis)) => wrap(simplex::solve_from_basis(model.program(), &basis)),
            None => solve_lp(&model),
        };
        if sol.status == LpStatus::Infeasible {
            continue;
        }
        require_optimal(&sol)?;
        if best.as_ref().is_none_or(|(_, b)| b.objective < sol.objective) {
            best = Some((model, sol));
        }
    }
    let (model, sol) = best.expect("the best screened order is always kept");
    finish_order(instance, model, sol)
}

/// Shorter processing time never comes with a smaller weight, over all pairs.
pub fn is_antithetical<T: Scalar>(instance: &Instance<T>) -> bool {
    let jobs = instance.jobs();
    jobs.iter().all(|a| jobs.iter().all(|b| !a.p.le_tol(&b.p) || b.w.le_tol(&a.w)))
}

/// Order by processing time ascending, then weight descending, then id.
pub fn processing_time_order<T: Scalar>(instance: &Instance<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by(|&a, &b| {
        let (ja, jb) = (instance.job(a), instance.job(b));
        ja.p.partial_cmp(&jb.p)
            .expect("comparable")
            .then(jb.w.partial_cmp(&ja.w).expect("comparable"))
            .then(ja.id.cmp(&jb.id))
    });
    order
}

/// Optimum of an antithetical instance with a single LP in processing-time order.
pub fn solve_antithetical<T: Scalar>(instance: &Instance<T>) -> Result<OrderSolution<T>> {
    if !is_antithetical(instance) {
        return Err(Error::Refused(
            "instance is not antithetical: some shorter job has a smaller weight".into(),
        ));
    }
    solve_order(instance, &processing_time_order(instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{one_machine_pair, two_machine_trio, instance, q, single_job};
    use crate::model::validate;

    #[test]
    fn impossible_orders_are_skipped() {
        let inst = instance(&[(1, 4), (19, 6)], &[3]);
        assert!(matches!(solve_order(&inst, &[1, 0]), Err(Error::LpStatus(_))));
        let best = solve_exact(&inst).unwrap();
        assert_eq!(best.permutation, vec![0, 1]);
        assert_eq!(best.objective, crate::fixtures::qr(57, 2));
    }

    #[test]
    fn smallest_model_shape() {
        let inst = single_job(12, 2, &[1]);
        let model = build_compatible_lp(&inst, &[0]).unwrap();
        assert_eq!(model.num_vars(), 2);
        assert_eq!(model.x_var(0, 0, 0), 1);
        // one capacity row and one completion row; no chain rows
        assert_eq!(model.program().constraints.len(), 2);
    }

    #[test]
    fn variable_count_matches_formula() {
        for (n, m) in [(1, 1), (2, 1), (3, 2), (4, 3)] {
            let jobs: Vec<(i64, i64)> = (0..n).map(|j| (j as i64 + 1, 2)).collect();
            let costs: Vec<i64> = (0..m).map(|i| i as i64).collect();
            let inst = instance(&jobs, &costs);
            let model = build_compatible_lp(&inst, &(0..n).collect::<Vec<_>>()).unwrap();
            assert_eq!(model.num_vars(), n + n * m * (n + 1) / 2);
            let caps = model.program().constraints.iter().filter(|c| c.name.starts_with("cap_")).count();
            assert_eq!(caps, n * m);
        }
    }

    #[test]
    fn bad_permutations_are_rejected() {
        let inst = one_machine_pair();
        assert!(matches!(build_compatible_lp(&inst, &[0, 0]), Err(Error::InvalidPermutation(_))));
        assert!(matches!(build_compatible_lp(&inst, &[0]), Err(Error::InvalidPermutation(_))));
        assert!(matches!(build_compatible_lp(&inst, &[0, 2]), Err(Error::InvalidPermutation(_))));
    }

    #[test]
    fn single_job_splits_in_half() {
        let inst = single_job(12, 2, &[1]);
        let model = build_compatible_lp(&inst, &[0]).unwrap();
        let sol = solve_lp(&model);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, q(6));
        assert_eq!(sol.values, vec![q(6), q(6)]);
        let s = extract_schedule(&sol, &model).unwrap();
        assert_eq!(s.completion(0), &q(6));
        assert_eq!(s.pieces(), &[Piece::new(0, 0, q(0), q(6))]);
    }

    #[test]
    fn unprofitable_jobs_stay_private() {
        let inst = instance(&[(5, 1), (3, 2)], &[2, 3]);
        let sol = solve_exact(&inst).unwrap();
        assert_eq!(sol.objective, q(0));
        assert!(sol.schedule.pieces().is_empty());
        assert!(sol.solution.values[2..].iter().all(|v| *v == q(0)));
    }

    #[test]
    fn one_machine_pair_orders() {
        let inst = one_machine_pair();
        assert_eq!(solve_order(&inst, &[0, 1]).unwrap().objective, q(7));
        assert_eq!(solve_order(&inst, &[1, 0]).unwrap().objective, q(4));
        let best = solve_exact(&inst).unwrap();
        assert_eq!(best.objective, q(7));
        assert_eq!(best.permutation, vec![0, 1]);
        assert!(validate(&best.schedule, &inst).unwrap().is_empty());
    }

    #[test]
    fn two_machine_trio_optimum() {
        let best = solve_exact(&two_machine_trio()).unwrap();
        assert_eq!(best.objective, q(37));
    }

    #[test]
    fn float_mode_agrees() {
        let inst = two_machine_trio().to_f64();
        let best = solve_exact(&inst).unwrap();
        assert!((best.objective - 37.0).abs() < 1e-6);
    }

    #[test]
    fn too_many_jobs_are_refused() {
        let jobs: Vec<(i64, i64)> = (0..9).map(|j| (j + 1, 3)).collect();
        let inst = instance(&jobs, &[1]);
        let err = solve_exact(&inst).unwrap_err();
        assert!(matches!(err, Error::Refused(ref msg) if msg.contains('8')));
    }

    #[test]
    fn encoding_an_extracted_schedule_is_feasible_with_same_value() {
        let inst = two_machine_trio();
        let sol = solve_order(&inst, &[2, 0, 1]).unwrap();
        let model = build_compatible_lp(&inst, &[2, 0, 1]).unwrap();
        let point = encode_schedule(&sol.schedule, &model).unwrap();
        assert!(model.program().violated(&point).is_empty());
        assert_eq!(model.program().evaluate(&point), sol.objective);
    }

    #[test]
    fn antithetical_detection() {
        assert!(is_antithetical(&one_machine_pair()));
        assert!(!is_antithetical(&two_machine_trio()));
        assert!(is_antithetical(&instance(&[(3, 2), (3, 2), (3, 2)], &[1])));
    }

    #[test]
    fn antithetical_solver() {
        let sol = solve_antithetical(&one_machine_pair()).unwrap();
        assert_eq!(sol.objective, q(7));
        for j in 0..2 {
            assert!(sol.schedule.shared_amount(j) > q(0));
        }
        assert_eq!(solve_antithetical(&single_job(12, 2, &[1])).unwrap().objective, q(6));
        assert!(matches!(solve_antithetical(&two_machine_trio()), Err(Error::Refused(_))));
        let twins = instance(&[(6, 3), (6, 3)], &[1]);
        assert_eq!(solve_order(&twins, &[0, 1]).unwrap().objective, solve_order(&twins, &[1, 0]).unwrap().objective);
    }

    #[test]
    fn lp_dump_names_every_family() {
        let model = build_compatible_lp(&one_machine_pair(), &[0, 1]).unwrap();
        let text = model.to_lp_text();
        for tag in ["chain_2", "cap_1_1", "cap_1_2", "done_1", "done_2"] {
            assert!(text.contains(tag), "{tag}");
        }
    }
}
