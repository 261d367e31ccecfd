//! Instances, schedules, feasibility and the total weighted overlap.
//!
//! Jobs and machines are addressed by zero-based index inside the library.
//! Machine `0` is the cheapest shared processor; file formats use 1-based
//! machine numbers and string job ids (see [`crate::io`]).

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{display, Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Job<T = Rational> {
    pub id: String,
    /// Processing time.
    pub p: T,
    /// Payoff per unit of overlap.
    pub w: T,
}

impl<T: Scalar> Job<T> {
    pub fn new(id: impl Into<String>, p: T, w: T) -> Self {
        Job { id: id.into(), p, w }
    }
}

/// A set of jobs and the costs of the shared processors, cheapest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T = Rational> {
    jobs: Vec<Job<T>>,
    costs: Vec<T>,
}

impl<T: Scalar> Instance<T> {
    /// Builds an instance; costs must already be sorted ascending.
    pub fn new(jobs: Vec<Job<T>>, costs: Vec<T>) -> Result<Self> {
        if jobs.is_empty() {
            return Err(Error::InvalidInstance("at least one job is required".into()));
        }
        if costs.is_empty() {
            return Err(Error::InvalidInstance("at least one shared processor is required".into()));
        }
        let mut seen = HashSet::new();
        for job in &jobs {
            if !seen.insert(job.id.as_str()) {
                return Err(Error::InvalidInstance(format!("duplicate job id `{}`", job.id)));
            }
            if !job.p.is_pos() {
                return Err(Error::InvalidInstance(format!(
                    "job `{}` has non-positive processing time {}",
                    job.id,
                    display(&job.p)
                )));
            }
            if job.w.is_neg() {
                return Err(Error::InvalidInstance(format!(
                    "job `{}` has negative weight {}",
                    job.id,
                    display(&job.w)
                )));
            }
        }
        if let Some(c) = costs.iter().find(|c| c.is_neg()) {
            return Err(Error::InvalidInstance(format!("negative machine cost {}", display(c))));
        }
        if costs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInstance("machine costs must be sorted ascending".into()));
        }
        Ok(Instance { jobs, costs })
    }

    /// Builds an instance after sorting the costs; the flag reports whether
    /// the given order differed.
    pub fn with_sorted_costs(jobs: Vec<Job<T>>, mut costs: Vec<T>) -> Result<(Self, bool)> {
        let resorted = costs.windows(2).any(|w| w[1] < w[0]);
        costs.sort_by(|a, b| a.partial_cmp(b).expect("costs are comparable"));
        Ok((Instance::new(jobs, costs)?, resorted))
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn m(&self) -> usize {
        self.costs.len()
    }

    pub fn jobs(&self) -> &[Job<T>] {
        &self.jobs
    }

    pub fn job(&self, j: usize) -> &Job<T> {
        &self.jobs[j]
    }

    pub fn costs(&self) -> &[T] {
        &self.costs
    }

    pub fn cost(&self, i: usize) -> &T {
        &self.costs[i]
    }

    pub fn job_index(&self, id: &str) -> Option<usize> {
        self.jobs.iter().position(|j| j.id == id)
    }

    /// Total cost of the `width` cheapest machines.
    pub fn prefix_cost(&self, width: usize) -> T {
        self.costs[..width].iter().cloned().sum()
    }

    /// Payoff per unit time of running `job` on the `width` cheapest machines:
    /// `Σ_{z<width} (w_job − c_z)`.
    pub fn width_gain(&self, job: usize, width: usize) -> T {
        T::from_int(width as i64) * self.jobs[job].w.clone() - self.prefix_cost(width)
    }

    /// Converts every number with `f`.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Instance<U> {
        Instance {
            jobs: self
                .jobs
                .iter()
                .map(|j| Job { id: j.id.clone(), p: f(&j.p), w: f(&j.w) })
                .collect(),
            costs: self.costs.iter().map(&f).collect(),
        }
    }

    pub fn to_f64(&self) -> Instance<f64> {
        self.map(|v| v.to_f64())
    }

    /// Same instance with one more machine appended (its cost must be at
    /// least the current maximum).
    pub fn with_extra_machine(&self, cost: T) -> Result<Self> {
        let mut costs = self.costs.clone();
        costs.push(cost);
        Instance::new(self.jobs.clone(), costs)
    }
}

/// Execution of one job on one shared machine during `(start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece<T = Rational> {
    pub job: usize,
    pub machine: usize,
    pub start: T,
    pub end: T,
}

impl<T: Scalar> Piece<T> {
    pub fn new(job: usize, machine: usize, start: T, end: T) -> Self {
        Piece { job, machine, start, end }
    }

    pub fn len(&self) -> T {
        self.end.clone() - self.start.clone()
    }
}

/// Private completion times and shared-processor pieces.
///
/// Construction drops zero-length pieces, sorts pieces by machine and start
/// time, and merges touching pieces of the same job on the same machine.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule<T = Rational> {
    private_completion: Vec<T>,
    pieces: Vec<Piece<T>>,
}

impl<T: Scalar> Schedule<T> {
    pub fn new(private_completion: Vec<T>, pieces: Vec<Piece<T>>) -> Result<Self> {
        let mut kept = Vec::with_capacity(pieces.len());
        for piece in pieces {
            if piece.start.is_neg() {
                return Err(Error::Structural(format!(
                    "piece of job {} on machine {} starts before 0",
                    piece.job, piece.machine
                )));
            }
            let len = piece.len();
            if len.is_neg() {
                return Err(Error::Structural(format!(
                    "piece of job {} on machine {} ends before it starts",
                    piece.job, piece.machine
                )));
            }
            if len.is_pos() {
                kept.push(piece);
            }
        }
        kept.sort_by(|a, b| {
            (a.machine, &a.start, a.job)
                .partial_cmp(&(b.machine, &b.start, b.job))
                .expect("times are comparable")
        });
        let mut merged: Vec<Piece<T>> = Vec::with_capacity(kept.len());
        for piece in kept {
            if let Some(last) = merged.last_mut() {
                if last.machine == piece.machine && last.job == piece.job && last.end.near(&piece.start) {
                    last.end = piece.end;
                    continue;
                }
            }
            merged.push(piece);
        }
        Ok(Schedule { private_completion, pieces: merged })
    }

    /// Every job private-only: `C_j = p_j`, no pieces.
    pub fn private_only(instance: &Instance<T>) -> Self {
        Schedule {
            private_completion: instance.jobs().iter().map(|j| j.p.clone()).collect(),
            pieces: Vec::new(),
        }
    }

    pub fn private_completion(&self) -> &[T] {
        &self.private_completion
    }

    pub fn completion(&self, job: usize) -> &T {
        &self.private_completion[job]
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn pieces_on(&self, machine: usize) -> impl Iterator<Item = &Piece<T>> {
        self.pieces.iter().filter(move |p| p.machine == machine)
    }

    /// Total shared execution of `job`.
    pub fn shared_amount(&self, job: usize) -> T {
        self.pieces.iter().filter(|p| p.job == job).map(|p| p.len()).sum()
    }

    /// Latest end of any piece (0 for an all-private schedule).
    pub fn makespan(&self) -> T {
        self.pieces.iter().fold(T::zero(), |acc, p| T::max_of(acc, p.end.clone()))
    }

    /// Busy time of each machine.
    pub fn machine_loads(&self, m: usize) -> Vec<T> {
        let mut loads = vec![T::zero(); m];
        for p in &self.pieces {
            if p.machine < m {
                loads[p.machine] += p.len();
            }
        }
        loads
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Schedule<U> {
        Schedule {
            private_completion: self.private_completion.iter().map(&f).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { job: p.job, machine: p.machine, start: f(&p.start), end: f(&p.end) })
                .collect(),
        }
    }
}

/// A broken feasibility condition. Magnitudes are reported as `f64`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Private plus shared execution differs from the processing time.
    ProcessingTime { job: usize, expected: f64, actual: f64 },
    /// Private completion time is negative.
    NegativeCompletion { job: usize, completion: f64 },
    /// Two pieces overlap on one machine.
    MachineConflict { machine: usize, first: usize, second: usize, overlap: f64 },
    /// A piece ends after the private completion of its job.
    BeyondPrivate { job: usize, machine: usize, end: f64, completion: f64 },
}

impl Violation {
    /// Number of the feasibility condition that is broken: 1 (processing
    /// time), 2 (one job per machine at a time) or 3 (pieces inside the
    /// private interval).
    pub fn condition(&self) -> u8 {
        match self {
            Violation::ProcessingTime { .. } | Violation::NegativeCompletion { .. } => 1,
            Violation::MachineConflict { .. } => 2,
            Violation::BeyondPrivate { .. } => 3,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ProcessingTime { job, expected, actual } => write!(
                f,
                "(1) job {job}: total execution {actual} differs from processing time {expected} by {}",
                actual - expected
            ),
            Violation::NegativeCompletion { job, completion } => {
                write!(f, "(1) job {job}: negative private completion {completion}")
            }
            Violation::MachineConflict { machine, first, second, overlap } => write!(
                f,
                "(2) machine {}: jobs {first} and {second} overlap for {overlap}",
                machine + 1
            ),
            Violation::BeyondPrivate { job, machine, end, completion } => write!(
                f,
                "(3) job {job}: piece on machine {} ends at {end} after private completion {completion} (by {})",
                machine + 1,
                end - completion
            ),
        }
    }
}

fn check_structure<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>) -> Result<()> {
    if schedule.private_completion.len() != instance.n() {
        return Err(Error::Structural(format!(
            "{} private completion times for {} jobs",
            schedule.private_completion.len(),
            instance.n()
        )));
    }
    for p in &schedule.pieces {
        if p.job >= instance.n() {
            return Err(Error::Structural(format!("unknown job index {}", p.job)));
        }
        if p.machine >= instance.m() {
            return Err(Error::Structural(format!(
                "unknown machine {} (instance has {})",
                p.machine + 1,
                instance.m()
            )));
        }
    }
    Ok(())
}

/// Lists every broken feasibility condition; empty iff the schedule is feasible.
pub fn validate<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>) -> Result<Vec<Violation>> {
    check_structure(schedule, instance)?;
    let mut out = Vec::new();

    for (j, job) in instance.jobs().iter().enumerate() {
        let c = schedule.completion(j);
        if c.is_neg() {
            out.push(Violation::NegativeCompletion { job: j, completion: c.to_f64() });
        }
        let total = c.clone() + schedule.shared_amount(j);
        if !total.near(&job.p) {
            out.push(Violation::ProcessingTime { job: j, expected: job.p.to_f64(), actual: total.to_f64() });
        }
    }

    for machine in 0..instance.m() {
        // pieces are sorted by start within a machine
        let mut reach: Option<(usize, T)> = None;
        for p in schedule.pieces_on(machine) {
            if let Some((job, end)) = &reach {
                let overlap = end.clone() - p.start.clone();
                if overlap.is_pos() {
                    out.push(Violation::MachineConflict {
                        machine,
                        first: *job,
                        second: p.job,
                        overlap: T::min_of(overlap, p.len()).to_f64(),
                    });
                }
            }
            match &reach {
                Some((_, end)) if *end >= p.end => {}
                _ => reach = Some((p.job, p.end.clone())),
            }
        }
    }

    for p in &schedule.pieces {
        let c = schedule.completion(p.job);
        if p.end.le_tol(c) {
            continue;
        }
        out.push(Violation::BeyondPrivate {
            job: p.job,
            machine: p.machine,
            end: p.end.to_f64(),
            completion: c.to_f64(),
        });
    }
    Ok(out)
}

/// Per job and machine overlap totals and the weighted sum.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport<T = Rational> {
    /// `per_job_machine[j][i]` is the overlap of job `j` on machine `i`.
    pub per_job_machine: Vec<Vec<T>>,
    pub total_weighted: T,
}

impl<T: Scalar> OverlapReport<T> {
    pub fn total_overlap(&self) -> T {
        self.per_job_machine.iter().flatten().cloned().sum()
    }

    /// Contribution of one job to the weighted total.
    pub fn job_payoff(&self, instance: &Instance<T>, job: usize) -> T {
        self.per_job_machine[job]
            .iter()
            .enumerate()
            .map(|(i, o)| o.clone() * (instance.job(job).w.clone() - instance.cost(i).clone()))
            .sum()
    }
}

/// Overlap measured as the part of each piece inside `(0, C_j)`, without
/// checking feasibility.
pub fn overlap_unchecked<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>) -> OverlapReport<T> {
    let mut per = vec![vec![T::zero(); instance.m()]; instance.n()];
    for p in schedule.pieces() {
        let c = schedule.completion(p.job);
        let end = T::min_of(p.end.clone(), c.clone());
        let start = T::max_of(p.start.clone(), T::zero());
        if end > start {
            per[p.job][p.machine] += end - start;
        }
    }
    let mut total = T::zero();
    for (j, row) in per.iter().enumerate() {
        for (i, o) in row.iter().enumerate() {
            total += o.clone() * (instance.job(j).w.clone() - instance.cost(i).clone());
        }
    }
    OverlapReport { per_job_machine: per, total_weighted: total }
}

/// Total weighted overlap of a feasible schedule.
pub fn total_weighted_overlap<T: Scalar>(
    schedule: &Schedule<T>,
    instance: &Instance<T>,
) -> Result<OverlapReport<T>> {
    let violations = validate(schedule, instance)?;
    if !violations.is_empty() {
        return Err(Error::Infeasible(violations));
    }
    Ok(overlap_unchecked(schedule, instance))
}

/// One listed job of a synchronized schedule and the number of cheapest
/// machines it occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyncEntry {
    pub job: usize,
    pub width: usize,
}

/// Jobs run back to back on non-increasing prefixes of the cheapest
/// machines, each finishing on shared and private processors together.
#[derive(Debug, Clone, PartialEq)]
pub struct SynchronizedSchedule<T = Rational> {
    sequence: Vec<SyncEntry>,
    /// `t_1..t_k`; `t_0 = 0` is implicit.
    boundaries: Vec<T>,
}

fn check_sequence<T: Scalar>(instance: &Instance<T>, sequence: &[SyncEntry]) -> Result<()> {
    let mut seen = HashSet::new();
    let mut prev_width = instance.m();
    for e in sequence {
        if e.job >= instance.n() {
            return Err(Error::InvalidSynchronized(format!("unknown job index {}", e.job)));
        }
        if !seen.insert(e.job) {
            return Err(Error::InvalidSynchronized(format!("job {} listed twice", e.job)));
        }
        if e.width == 0 || e.width > prev_width {
            return Err(Error::InvalidSynchronized(format!(
                "width {} of job {} breaks m ≥ m_1 ≥ … ≥ m_k ≥ 1",
                e.width, e.job
            )));
        }
        prev_width = e.width;
    }
    Ok(())
}

impl<T: Scalar> SynchronizedSchedule<T> {
    /// Computes the boundaries from `t_i = (p_{j_i} + m_i t_{i−1}) / (1 + m_i)`.
    pub fn from_sequence(instance: &Instance<T>, sequence: Vec<SyncEntry>) -> Result<Self> {
        check_sequence(instance, &sequence)?;
        let mut boundaries = Vec::with_capacity(sequence.len());
        let mut prev = T::zero();
        for e in &sequence {
            let p = &instance.job(e.job).p;
            if p.lt_tol(&prev) {
                return Err(Error::InvalidSynchronized(format!(
                    "job {} has p = {} < t = {}, so its slot would have negative length",
                    e.job,
                    display(p),
                    display(&prev)
                )));
            }
            let m = T::from_int(e.width as i64);
            let t = (p.clone() + m.clone() * prev.clone()) / (T::one() + m);
            boundaries.push(t.clone());
            prev = t;
        }
        Ok(SynchronizedSchedule { sequence, boundaries })
    }

    /// Checks explicit boundaries against `t_i + m_i (t_i − t_{i−1}) = p_{j_i}`.
    pub fn new(instance: &Instance<T>, sequence: Vec<SyncEntry>, boundaries: Vec<T>) -> Result<Self> {
        check_sequence(instance, &sequence)?;
        if boundaries.len() != sequence.len() {
            return Err(Error::InvalidSynchronized("one boundary per listed job is required".into()));
        }
        let mut prev = T::zero();
        for (e, t) in sequence.iter().zip(&boundaries) {
            if t.lt_tol(&prev) {
                return Err(Error::InvalidSynchronized("boundaries must be non-decreasing".into()));
            }
            let lhs = t.clone() + T::from_int(e.width as i64) * (t.clone() - prev.clone());
            if !lhs.near(&instance.job(e.job).p) {
                return Err(Error::InvalidSynchronized(format!(
                    "job {}: t + m(t − t_prev) = {} but p = {}",
                    e.job,
                    display(&lhs),
                    display(&instance.job(e.job).p)
                )));
            }
            prev = t.clone();
        }
        Ok(SynchronizedSchedule { sequence, boundaries })
    }

    pub fn sequence(&self) -> &[SyncEntry] {
        &self.sequence
    }

    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Slot `(t_{i−1}, t_i)` of the `i`-th listed job.
    pub fn slot(&self, i: usize) -> (T, T) {
        let start = if i == 0 { T::zero() } else { self.boundaries[i - 1].clone() };
        (start, self.boundaries[i].clone())
    }

    /// Closed-form payoff `Σ (t_i − t_{i−1}) (m_i w_{j_i} − Σ_{l≤m_i} c_l)`.
    pub fn objective(&self, instance: &Instance<T>) -> T {
        (0..self.len())
            .map(|i| {
                let (s, e) = self.slot(i);
                let entry = self.sequence[i];
                (e - s) * instance.width_gain(entry.job, entry.width)
            })
            .sum()
    }

    /// Concrete schedule: listed jobs on machines `0..m_i` in their slot,
    /// unlisted jobs private-only.
    pub fn expand(&self, instance: &Instance<T>) -> Schedule<T> {
        let mut completion: Vec<T> = instance.jobs().iter().map(|j| j.p.clone()).collect();
        let mut pieces = Vec::new();
        for (i, entry) in self.sequence.iter().enumerate() {
            let (s, e) = self.slot(i);
            completion[entry.job] = e.clone();
            for machine in 0..entry.width {
                pieces.push(Piece::new(entry.job, machine, s.clone(), e.clone()));
            }
        }
        Schedule::new(completion, pieces).expect("synchronized slots are well-formed")
    }
}

/// See [`SynchronizedSchedule::expand`].
pub fn expand<T: Scalar>(sync: &SynchronizedSchedule<T>, instance: &Instance<T>) -> Schedule<T> {
    sync.expand(instance)
}

/// See [`SynchronizedSchedule::objective`].
pub fn synchronized_objective<T: Scalar>(sync: &SynchronizedSchedule<T>, instance: &Instance<T>) -> T {
    sync.objective(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{one_machine_pair, two_machine_trio, q, single_job};

    #[test]
    fn half_split_single_machine_is_feasible_with_overlap_six() {
        let inst = single_job(12, 2, &[1]);
        let s = Schedule::new(vec![q(6)], vec![Piece::new(0, 0, q(0), q(6))]).unwrap();
        assert!(validate(&s, &inst).unwrap().is_empty());
        let r = total_weighted_overlap(&s, &inst).unwrap();
        assert_eq!(r.total_overlap(), q(6));
        assert_eq!(r.total_weighted, q(6));
    }

    #[test]
    fn same_job_may_overlap_across_machines() {
        let inst = single_job(12, 1, &[0, 0, 0]);
        let s = Schedule::new(
            vec![q(4)],
            vec![
                Piece::new(0, 0, q(0), q(4)),
                Piece::new(0, 1, q(0), q(3)),
                Piece::new(0, 2, q(1), q(2)),
            ],
        )
        .unwrap();
        assert!(validate(&s, &inst).unwrap().is_empty());
        assert_eq!(total_weighted_overlap(&s, &inst).unwrap().total_overlap(), q(8));
    }

    #[test]
    fn private_only_has_zero_payoff() {
        let inst = single_job(5, 3, &[1]);
        let s = Schedule::private_only(&inst);
        assert!(validate(&s, &inst).unwrap().is_empty());
        assert_eq!(total_weighted_overlap(&s, &inst).unwrap().total_weighted, q(0));
    }

    #[test]
    fn overlapping_jobs_on_one_machine_violate_exclusivity() {
        let inst = Instance::new(
            vec![Job::new("a", q(5), q(2)), Job::new("b", q(5), q(2))],
            vec![q(1)],
        )
        .unwrap();
        let s = Schedule::new(
            vec![q(3), q(3)],
            vec![Piece::new(0, 0, q(0), q(2)), Piece::new(1, 0, q(1), q(3))],
        )
        .unwrap();
        let v = validate(&s, &inst).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].condition(), 2);
        assert!(matches!(total_weighted_overlap(&s, &inst), Err(Error::Infeasible(_))));
    }

    #[test]
    fn piece_after_private_completion_and_wrong_total_are_reported() {
        let inst = single_job(10, 2, &[1]);
        let s = Schedule::new(vec![q(4)], vec![Piece::new(0, 0, q(2), q(6))]).unwrap();
        let v = validate(&s, &inst).unwrap();
        let conds: Vec<u8> = v.iter().map(Violation::condition).collect();
        assert!(conds.contains(&1));
        assert!(conds.contains(&3));
    }

    #[test]
    fn unknown_machine_is_structural() {
        let inst = single_job(10, 2, &[1]);
        let s = Schedule::new(vec![q(5)], vec![Piece::new(0, 3, q(0), q(5))]).unwrap();
        assert!(matches!(validate(&s, &inst), Err(Error::Structural(_))));
        let s = Schedule::new(vec![q(5), q(1)], vec![]).unwrap();
        assert!(matches!(validate(&s, &inst), Err(Error::Structural(_))));
    }

    #[test]
    fn zero_length_pieces_are_dropped_and_touching_pieces_merged() {
        let s = Schedule::new(
            vec![q(6)],
            vec![
                Piece::new(0, 0, q(3), q(6)),
                Piece::new(0, 0, q(0), q(3)),
                Piece::new(0, 1, q(2), q(2)),
            ],
        )
        .unwrap();
        assert_eq!(s.pieces(), &[Piece::new(0, 0, q(0), q(6))]);
    }

    #[test]
    fn expand_single_job_widths() {
        let inst = single_job(12, 2, &[1]);
        let sync = SynchronizedSchedule::from_sequence(&inst, vec![SyncEntry { job: 0, width: 1 }]).unwrap();
        assert_eq!(sync.boundaries(), &[q(6)]);
        let s = sync.expand(&inst);
        assert_eq!(s.pieces(), &[Piece::new(0, 0, q(0), q(6))]);

        let inst3 = single_job(12, 1, &[0, 0, 0]);
        let sync = SynchronizedSchedule::from_sequence(&inst3, vec![SyncEntry { job: 0, width: 3 }]).unwrap();
        assert_eq!(sync.boundaries(), &[q(3)]);
    }

    #[test]
    fn empty_sequence_expands_to_private_only() {
        let inst = one_machine_pair();
        let sync = SynchronizedSchedule::from_sequence(&inst, vec![]).unwrap();
        assert_eq!(sync.expand(&inst), Schedule::private_only(&inst));
        assert_eq!(sync.objective(&inst), q(0));
    }

    #[test]
    fn one_machine_pair_pays_seven_in_index_order() {
        let inst = one_machine_pair();
        let sync = SynchronizedSchedule::from_sequence(
            &inst,
            vec![SyncEntry { job: 0, width: 1 }, SyncEntry { job: 1, width: 1 }],
        )
        .unwrap();
        assert_eq!(sync.boundaries(), &[q(2), q(5)]);
        assert_eq!(sync.objective(&inst), q(7));
        let s = sync.expand(&inst);
        assert_eq!(total_weighted_overlap(&s, &inst).unwrap().total_weighted, q(7));
    }

    #[test]
    fn zero_contribution_when_weight_matches_average_cost() {
        let inst = single_job(12, 3, &[2, 4]);
        let sync = SynchronizedSchedule::from_sequence(&inst, vec![SyncEntry { job: 0, width: 2 }]).unwrap();
        assert_eq!(sync.objective(&inst), q(0));
    }

    #[test]
    fn staircase_layout_implies_processing_times() {
        let widths = [4usize, 3, 3, 1, 1];
        let t = [q(1), q(2), Rational::from_ratio(7, 2), q(7), q(10)];
        let mut prev = q(0);
        let mut implied = Vec::new();
        for (w, ti) in widths.iter().zip(&t) {
            implied.push(ti.clone() + q(*w as i64) * (ti.clone() - prev.clone()));
            prev = ti.clone();
        }
        assert_eq!(implied, vec![q(5), q(5), q(8), Rational::from_ratio(21, 2), q(13)]);
        let jobs = implied
            .iter()
            .enumerate()
            .map(|(i, p)| Job::new(format!("j{}", i + 1), p.clone(), q(10)))
            .collect();
        let inst = Instance::new(jobs, vec![q(1), q(2), q(3), q(4)]).unwrap();
        let seq = widths.iter().enumerate().map(|(job, &width)| SyncEntry { job, width }).collect();
        let sync = SynchronizedSchedule::new(&inst, seq, t.to_vec()).unwrap();
        assert!(validate(&sync.expand(&inst), &inst).unwrap().is_empty());
    }

    #[test]
    fn increasing_widths_and_bad_recurrence_are_rejected() {
        let inst = two_machine_trio();
        let bad = vec![SyncEntry { job: 0, width: 1 }, SyncEntry { job: 1, width: 2 }];
        assert!(SynchronizedSchedule::from_sequence(&inst, bad).is_err());
        let seq = vec![SyncEntry { job: 0, width: 2 }];
        assert!(SynchronizedSchedule::new(&inst, seq, vec![q(4)]).is_err());
    }

    #[test]
    fn instance_rejects_bad_inputs() {
        assert!(Instance::<Rational>::new(vec![], vec![q(1)]).is_err());
        assert!(Instance::new(vec![Job::new("a", q(0), q(1))], vec![q(1)]).is_err());
        assert!(Instance::new(vec![Job::new("a", q(1), q(-1))], vec![q(1)]).is_err());
        assert!(Instance::new(vec![Job::new("a", q(1), q(1))], vec![q(2), q(1)]).is_err());
        let (inst, resorted) =
            Instance::with_sorted_costs(vec![Job::new("a", q(1), q(1))], vec![q(5), q(4)]).unwrap();
        assert!(resorted);
        assert_eq!(inst.costs(), &[q(4), q(5)]);
    }
}
