//! α-private schedules: every job keeps at least `α p_j` on its private
//! processor and uses shared processors only inside `(0, α p_j)`.
//!
//! With jobs sorted by processing time the shared windows are
//! `(α p_{k−1}, α p_k)`, which turns the best α-private schedule into one LP
//! (or, equivalently, one max-profit flow). Its payoff is at least `α` times
//! the optimum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{solve_max_profit_flow, FlowArc, FlowNetwork};
use crate::model::{total_weighted_overlap, Instance, Piece, Schedule, SynchronizedSchedule};
use crate::num::{display, Scalar};
use crate::simplex::{self, LinearProgram, LpStatus, Relation};

/// `α = (2m+3) / (4(m+1))`.
pub fn alpha_of<T: Scalar>(m: usize) -> Result<T> {
    if m < 1 {
        return Err(Error::InvalidInstance("α needs at least one shared processor".into()));
    }
    let m = m as i64;
    Ok(T::from_ratio(2 * m + 3, 4 * (m + 1)))
}

/// Capacity of the arcs that feed each job node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceCapacity {
    /// `α p_j − p_j/(2(m+1)) = (2m+1) p_j / (4(m+1))`, the full range of the remainder.
    Corrected,
    /// `m p_j / (2(m+1))`, below the remainder's upper bound.
    Narrow,
}

impl SourceCapacity {
    pub fn describe(self) -> &'static str {
        match self {
            SourceCapacity::Corrected => "corrected (2m+1)p/(4(m+1))",
            SourceCapacity::Narrow => "narrow mp/(2(m+1))",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaBackend {
    Lp,
    Flow(SourceCapacity),
}

/// The α-private program. Positions follow the processing-time order.
#[derive(Debug, Clone)]
pub struct LaModel<T: Scalar> {
    order: Vec<usize>,
    alpha: T,
    m: usize,
    /// `α p` of each position.
    breakpoints: Vec<T>,
    program: LinearProgram<T>,
}

impl<T: Scalar> LaModel<T> {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> &T {
        &self.alpha
    }

    /// Job index at each position (processing time ascending, ties by id).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn program(&self) -> &LinearProgram<T> {
        &self.program
    }

    /// Remainder variable of position `pos`.
    pub fn remainder_var(&self, pos: usize) -> usize {
        pos
    }

    pub fn x_var(&self, pos: usize, machine: usize, window: usize) -> usize {
        debug_assert!(window <= pos && machine < self.m);
        self.n() + self.m * (pos * (pos + 1) / 2) + machine * (pos + 1) + window
    }

    pub fn num_vars(&self) -> usize {
        self.program.num_vars()
    }

    /// Window `(α p_{k−1}, α p_k)`.
    pub fn window(&self, k: usize) -> (T, T) {
        let lo = if k == 0 { T::zero() } else { self.breakpoints[k - 1].clone() };
        (lo, self.breakpoints[k].clone())
    }
}

/// Jobs by processing time ascending, ties by id.
pub fn processing_order<T: Scalar>(instance: &Instance<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by(|&a, &b| {
        instance
            .job(a)
            .p
            .partial_cmp(&instance.job(b).p)
            .expect("comparable")
            .then_with(|| instance.job(a).id.cmp(&instance.job(b).id))
    });
    order
}

pub fn build_la<T: Scalar>(instance: &Instance<T>) -> LaModel<T> {
    let n = instance.n();
    let m = instance.m();
    let alpha: T = alpha_of(m).expect("instances have m ≥ 1");
    let order = processing_order(instance);
    let ps: Vec<T> = order.iter().map(|&j| instance.job(j).p.clone()).collect();
    let breakpoints: Vec<T> = ps.iter().map(|p| alpha.clone() * p.clone()).collect();
    let mut names: Vec<String> = (0..n).map(|pos| format!("r_{}", pos + 1)).collect();
    for pos in 0..n {
        for i in 0..m {
            for k in 0..=pos {
                names.push(format!("x_{}_{}_{}", pos + 1, i + 1, k + 1));
            }
        }
    }
    let mut model = LaModel { order, alpha, m, breakpoints, program: LinearProgram::new(names) };
    let low = T::from_int(2 * (m as i64 + 1));
    for pos in 0..n {
        let job = model.order[pos];
        for i in 0..m {
            for k in 0..=pos {
                let v = model.x_var(pos, i, k);
                model.program.objective[v] = instance.job(job).w.clone() - instance.cost(i).clone();
            }
        }
        model.program.add(format!("rmin_{}", pos + 1), vec![(pos, T::one())], Relation::Ge, ps[pos].clone() / low.clone());
        model.program.add(
            format!("rmax_{}", pos + 1),
            vec![(pos, T::one())],
            Relation::Le,
            model.breakpoints[pos].clone(),
        );
    }
    for i in 0..m {
        for k in 0..n {
            let row: Vec<(usize, T)> = (k..n).map(|pos| (model.x_var(pos, i, k), T::one())).collect();
            let (lo, hi) = model.window(k);
            model.program.add(format!("cap_{}_{}", i + 1, k + 1), row, Relation::Le, hi - lo);
        }
    }
    for pos in 0..n {
        let mut row = vec![(pos, T::one())];
        for i in 0..m {
            for k in 0..=pos {
                row.push((model.x_var(pos, i, k), T::one()));
            }
        }
        let rhs = model.breakpoints[pos].clone();
        model.program.add(format!("done_{}", pos + 1), row, Relation::Eq, rhs);
    }
    model
}

/// Flow network of the program with arc index bookkeeping.
#[derive(Debug, Clone)]
pub struct AlphaFlow<T> {
    pub network: FlowNetwork<T>,
    pub capacity: SourceCapacity,
    /// Arc `(s, u)` of each position.
    pub source_arcs: Vec<usize>,
    /// Arc `(u_pos, v_{ik})`, stored at index `x_var(pos, i, k) − n`.
    pub assign_arcs: Vec<usize>,
}

/// Nodes `s, u_1..u_n, (v_{ik}, v'_{ik}) per machine and window, t`.
pub fn build_flow<T: Scalar>(instance: &Instance<T>, capacity: SourceCapacity) -> AlphaFlow<T> {
    let model = build_la(instance);
    let n = model.n();
    let m = model.m();
    let mut names = vec!["s".to_string()];
    names.extend((0..n).map(|pos| format!("u_{}", pos + 1)));
    for i in 0..m {
        for k in 0..n {
            names.push(format!("v_{}_{}", i + 1, k + 1));
            names.push(format!("v'_{}_{}", i + 1, k + 1));
        }
    }
    names.push("t".to_string());
    let sink = names.len() - 1;
    let u = |pos: usize| 1 + pos;
    let v = |i: usize, k: usize| 1 + n + 2 * (i * n + k);
    let mf = m as i64;
    let factor = match capacity {
        SourceCapacity::Corrected => T::from_ratio(2 * mf + 1, 4 * (mf + 1)),
        SourceCapacity::Narrow => T::from_ratio(mf, 2 * (mf + 1)),
    };
    let mut arcs = Vec::new();
    let mut source_arcs = Vec::new();
    for pos in 0..n {
        source_arcs.push(arcs.len());
        arcs.push(FlowArc {
            tail: 0,
            head: u(pos),
            capacity: Some(factor.clone() * instance.job(model.order[pos]).p.clone()),
            profit: T::zero(),
        });
    }
    let mut assign_arcs = Vec::new();
    for pos in 0..n {
        let w = instance.job(model.order[pos]).w.clone();
        for i in 0..m {
            for k in 0..=pos {
                assign_arcs.push(arcs.len());
                arcs.push(FlowArc { tail: u(pos), head: v(i, k), capacity: None, profit: w.clone() - instance.cost(i).clone() });
            }
        }
    }
    for i in 0..m {
        for k in 0..n {
            let (lo, hi) = model.window(k);
            arcs.push(FlowArc { tail: v(i, k), head: v(i, k) + 1, capacity: Some(hi - lo), profit: T::zero() });
        }
    }
    for i in 0..m {
        for k in 0..n {
            arcs.push(FlowArc { tail: v(i, k) + 1, head: sink, capacity: None, profit: T::zero() });
        }
    }
    AlphaFlow {
        network: FlowNetwork { node_names: names, source: 0, sink, arcs },
        capacity,
        source_arcs,
        assign_arcs,
    }
}

/// Program point of a flow: `x = f(u, v)`, remainder `= α p − f(s, u)`.
pub fn flow_to_assignment<T: Scalar>(model: &LaModel<T>, flow: &AlphaFlow<T>, flows: &[T]) -> Vec<T> {
    let n = model.n();
    let mut values = vec![T::zero(); model.num_vars()];
    for pos in 0..n {
        values[pos] = model.breakpoints[pos].clone() - flows[flow.source_arcs[pos]].clone();
    }
    for (offset, &arc) in flow.assign_arcs.iter().enumerate() {
        values[n + offset] = flows[arc].clone();
    }
    values
}

/// Schedule of a program point: `C = (1 − α) p + remainder`, and pieces of
/// length `x_{jik}` packed in position order inside each window.
pub fn extract_alpha_private<T: Scalar>(values: &[T], model: &LaModel<T>, instance: &Instance<T>) -> Result<Schedule<T>> {
    let n = model.n();
    let mut completion = vec![T::zero(); n];
    for pos in 0..n {
        let job = model.order[pos];
        completion[job] = (T::one() - model.alpha.clone()) * instance.job(job).p.clone() + values[pos].clone();
    }
    let mut pieces = Vec::new();
    for i in 0..model.m {
        for k in 0..n {
            let (mut cursor, _) = model.window(k);
            for pos in k..n {
                let len = values[model.x_var(pos, i, k)].clone();
                if !len.is_pos() {
                    continue;
                }
                let end = cursor.clone() + len;
                pieces.push(Piece::new(model.order[pos], i, cursor.clone(), end.clone()));
                cursor = end;
            }
        }
    }
    Schedule::new(completion, pieces)
}

/// Private completion at least `α p` and every shared piece inside `(0, α p)`.
pub fn is_alpha_private<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>, alpha: &T) -> bool {
    (0..instance.n()).all(|j| (alpha.clone() * instance.job(j).p.clone()).le_tol(schedule.completion(j)))
        && schedule
            .pieces()
            .iter()
            .all(|p| p.end.le_tol(&(alpha.clone() * instance.job(p.job).p.clone())))
}

#[derive(Debug, Clone)]
pub struct AlphaSolution<T: Scalar> {
    pub alpha: T,
    pub backend: AlphaBackend,
    pub model: LaModel<T>,
    /// Program point (remainders then `x`).
    pub values: Vec<T>,
    pub model_objective: T,
    pub schedule: Schedule<T>,
    pub objective: T,
}

pub fn solve_alpha<T: Scalar>(instance: &Instance<T>, backend: AlphaBackend) -> Result<AlphaSolution<T>> {
    let model = build_la(instance);
    let (values, model_objective) = match backend {
        AlphaBackend::Lp => {
            let out = simplex::solve(model.program());
            if out.status != LpStatus::Optimal {
                return Err(Error::Invariant(format!("α-private program is {}", out.status)));
            }
            (out.values, out.objective)
        }
        AlphaBackend::Flow(capacity) => {
            let flow = build_flow(instance, capacity);
            let sol = solve_max_profit_flow(&flow.network)?;
            flow.network.check_flow(&sol.flows)?;
            (flow_to_assignment(&model, &flow, &sol.flows), sol.profit)
        }
    };
    let violated = model.program().violated(&values);
    if !violated.is_empty() {
        return Err(Error::Invariant(format!("α-private point violates {}", violated.join(", "))));
    }
    let schedule = extract_alpha_private(&values, &model, instance)?;
    let objective = total_weighted_overlap(&schedule, instance)?.total_weighted;
    if !objective.near(&model_objective) {
        return Err(Error::Invariant(format!(
            "α-private schedule has Ω = {} but the program value is {}",
            display(&objective),
            display(&model_objective)
        )));
    }
    let alpha = model.alpha.clone();
    Ok(AlphaSolution { alpha, backend, model, values, model_objective, schedule, objective })
}

/// Program point built from a synchronized schedule: with `y_{jik}` the time
/// job `j` spends on machine `i` inside `(p_{k−1}, p_k)`, take `x = α y` and
/// remainder `α (p_j − e_j)` where `e_j` is the job's total shared time.
/// Also returns every `e_j`.
pub fn scaled_witness<T: Scalar>(
    sync: &SynchronizedSchedule<T>,
    model: &LaModel<T>,
    instance: &Instance<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let n = model.n();
    let schedule = sync.expand(instance);
    let p = |pos: usize| instance.job(model.order[pos]).p.clone();
    let mut position = vec![0; n];
    for (pos, &j) in model.order.iter().enumerate() {
        position[j] = pos;
    }
    let mut values = vec![T::zero(); model.num_vars()];
    let mut shared = vec![T::zero(); n];
    for piece in schedule.pieces() {
        let pos = position[piece.job];
        shared[piece.job] = shared[piece.job].clone() + piece.len();
        let mut covered = T::zero();
        for k in 0..n {
            let lo = if k == 0 { T::zero() } else { p(k - 1) };
            let a = T::max_of(lo, piece.start.clone());
            let b = T::min_of(p(k), piece.end.clone());
            if a < b {
                if k > pos {
                    return Err(Error::Precondition(format!(
                        "job {} runs on a shared processor after its processing time",
                        piece.job
                    )));
                }
                let idx = model.x_var(pos, piece.machine, k);
                values[idx] = values[idx].clone() + (b.clone() - a.clone());
                covered += b - a;
            }
        }
        if !covered.near(&piece.len()) {
            return Err(Error::Precondition("shared piece extends beyond the last processing time".into()));
        }
    }
    for v in values.iter_mut().skip(n) {
        *v = model.alpha.clone() * v.clone();
    }
    for pos in 0..n {
        let j = model.order[pos];
        values[pos] = model.alpha.clone() * (p(pos) - shared[j].clone());
    }
    Ok((values, shared))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{one_machine_pair, two_machine_trio, instance, q, qr, single_job};
    use crate::model::validate;
    use crate::oracle::{oracle_optimum, EnumerationBudget};

    #[test]
    fn alpha_values() {
        assert_eq!(alpha_of::<crate::Rational>(1).unwrap(), qr(5, 8));
        assert_eq!(alpha_of::<crate::Rational>(3).unwrap(), qr(9, 16));
        assert!(alpha_of::<crate::Rational>(0).is_err());
        let seq: Vec<crate::Rational> = (1..20).map(|m| alpha_of(m).unwrap()).collect();
        assert!(seq.windows(2).all(|w| w[1] < w[0] && w[1] > qr(1, 2)));
    }

    #[test]
    fn single_job_program() {
        let inst = single_job(12, 2, &[1]);
        let model = build_la(&inst);
        let rows = &model.program().constraints;
        let find = |name: &str| rows.iter().find(|c| c.name == name).unwrap();
        assert_eq!(find("rmin_1").rhs, q(3));
        assert_eq!(find("rmax_1").rhs, qr(15, 2));
        assert_eq!(find("cap_1_1").rhs, qr(15, 2));
        assert_eq!(find("done_1").rhs, qr(15, 2));
    }

    #[test]
    fn trivial_point_is_feasible() {
        let inst = two_machine_trio();
        let model = build_la(&inst);
        let mut v = vec![q(0); model.num_vars()];
        for pos in 0..model.n() {
            v[pos] = model.breakpoints()[pos].clone();
        }
        assert!(model.program().violated(&v).is_empty());
    }

    #[test]
    fn equal_processing_times_give_empty_window() {
        let model = build_la(&instance(&[(4, 1), (4, 2)], &[0]));
        let cap = model.program().constraints.iter().find(|c| c.name == "cap_1_2").unwrap();
        assert_eq!(cap.rhs, q(0));
    }

    #[test]
    fn network_shape() {
        let inst = single_job(12, 2, &[1]);
        let flow = build_flow(&inst, SourceCapacity::Corrected);
        assert_eq!(flow.network.node_count(), 5);
        assert_eq!(flow.network.arc_count(), 4);
        assert_eq!(flow.network.arcs[0].capacity, Some(qr(9, 2)));
        let narrow = build_flow(&inst, SourceCapacity::Narrow);
        assert_eq!(narrow.network.arcs[0].capacity, Some(q(3)));

        let three = build_flow(&two_machine_trio(), SourceCapacity::Corrected);
        assert_eq!(three.network.node_count(), 2 + 3 + 2 * 3 * 2);
        // assignment arcs only reach windows k ≤ position
        for pos in 0..3 {
            let from = 1 + pos;
            let heads: Vec<usize> = three.network.arcs.iter().filter(|a| a.tail == from).map(|a| a.head).collect();
            assert_eq!(heads.len(), 2 * (pos + 1));
        }
    }

    #[test]
    fn single_job_backends() {
        let inst = single_job(12, 2, &[1]);
        let lp = solve_alpha(&inst, AlphaBackend::Lp).unwrap();
        assert_eq!(lp.objective, qr(9, 2));
        let flow = solve_alpha(&inst, AlphaBackend::Flow(SourceCapacity::Corrected)).unwrap();
        assert_eq!(flow.objective, qr(9, 2));
        assert_eq!(flow.values, vec![q(3), qr(9, 2)]);
        assert_eq!(flow.schedule.completion(0), &qr(15, 2));
        assert!(validate(&flow.schedule, &inst).unwrap().is_empty());
        let narrow = solve_alpha(&inst, AlphaBackend::Flow(SourceCapacity::Narrow)).unwrap();
        assert_eq!(narrow.objective, q(3));
    }

    #[test]
    fn unprofitable_instance_is_zero() {
        let inst = instance(&[(3, 1), (5, 1)], &[2, 4]);
        for backend in [AlphaBackend::Lp, AlphaBackend::Flow(SourceCapacity::Corrected)] {
            let sol = solve_alpha(&inst, backend).unwrap();
            assert_eq!(sol.objective, q(0));
            assert!(sol.schedule.pieces().is_empty());
        }
    }

    #[test]
    fn backends_agree_and_beat_alpha_times_optimum() {
        for inst in [one_machine_pair(), two_machine_trio(), instance(&[(3, 7), (5, 4), (5, 9), (8, 2)], &[1, 2, 6])] {
            let lp = solve_alpha(&inst, AlphaBackend::Lp).unwrap();
            let flow = solve_alpha(&inst, AlphaBackend::Flow(SourceCapacity::Corrected)).unwrap();
            assert_eq!(lp.objective, flow.objective);
            assert!(is_alpha_private(&flow.schedule, &inst, &flow.alpha));
            let opt = oracle_optimum(&inst, &EnumerationBudget::default()).unwrap();
            assert!(flow.objective >= flow.alpha.clone() * opt.objective.clone());
        }
    }

    #[test]
    fn witness_of_optimum_is_feasible() {
        let inst = two_machine_trio();
        let opt = oracle_optimum(&inst, &EnumerationBudget::default()).unwrap();
        let model = build_la(&inst);
        let (point, shared) = scaled_witness(&opt.schedule, &model, &inst).unwrap();
        assert!(model.program().violated(&point).is_empty());
        assert_eq!(model.program().evaluate(&point), model.alpha().clone() * opt.objective);
        let m = q(inst.m() as i64);
        for j in 0..inst.n() {
            assert!(shared[j] <= m.clone() * inst.job(j).p.clone() / (m.clone() + q(1)));
        }
    }

    #[test]
    fn float_backends() {
        let inst = two_machine_trio().to_f64();
        let a = solve_alpha(&inst, AlphaBackend::Lp).unwrap();
        let b = solve_alpha(&inst, AlphaBackend::Flow(SourceCapacity::Corrected)).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
    }
}
