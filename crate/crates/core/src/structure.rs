//! Segments, sequential schedules and the shift calculus on them.
//!
//! A sequential, processor-descending schedule is stored as a list of
//! [`Block`]s tiling `(0, makespan)`: during a block one job runs on the
//! `width` cheapest machines, and widths never increase over time. All
//! transformations return new schedules and check their payoff identities,
//! failing with [`Error::Invariant`] when one breaks.

use std::ops::Range;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{overlap_unchecked, total_weighted_overlap, validate, Instance, Piece, Schedule, Violation};
use crate::num::{display, to_json_value, Scalar};

fn int<T: Scalar>(v: usize) -> T {
    T::from_int(v as i64)
}

fn cmp<T: Scalar>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).expect("times are comparable")
}

fn invariant(what: &str, lhs: impl AsRef<str>, rhs: impl AsRef<str>) -> Error {
    Error::Invariant(format!("{what}: {} != {}", lhs.as_ref(), rhs.as_ref()))
}

fn as_invariant(e: Error) -> Error {
    match e {
        Error::Infeasible(v) => Error::Invariant(format!(
            "transformation produced an infeasible schedule: {}",
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
        )),
        other => other,
    }
}

/// Maximal interval in which every machine is either idle throughout or
/// busy throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<T> {
    pub start: T,
    pub end: T,
    /// Busy machines, ascending.
    pub machines: Vec<usize>,
    /// Shared execution of each present job inside the segment, by job index.
    pub amounts: Vec<(usize, T)>,
}

impl<T: Scalar> Segment<T> {
    pub fn width(&self) -> usize {
        self.machines.len()
    }

    pub fn len(&self) -> T {
        self.end.clone() - self.start.clone()
    }
}

/// Consecutive breakpoint intervals with the job running on each machine.
fn elementary<T: Scalar>(schedule: &Schedule<T>, m: usize) -> Vec<(T, T, Vec<Option<usize>>)> {
    let mut points: Vec<T> = schedule.pieces().iter().flat_map(|p| [p.start.clone(), p.end.clone()]).collect();
    points.sort_by(cmp);
    points.dedup_by(|a, b| a.near(b));
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let mut jobs = vec![None; m];
        for p in schedule.pieces() {
            if p.start.le_tol(a) && b.le_tol(&p.end) && p.machine < m {
                jobs[p.machine] = Some(p.job);
            }
        }
        out.push((a.clone(), b.clone(), jobs));
    }
    out
}

fn machine_count<T: Scalar>(schedule: &Schedule<T>) -> usize {
    schedule.pieces().iter().map(|p| p.machine + 1).max().unwrap_or(0)
}

/// Segments of the busy time, in time order. Intervals where all machines
/// are idle belong to no segment.
pub fn find_segments<T: Scalar>(schedule: &Schedule<T>) -> Vec<Segment<T>> {
    let m = machine_count(schedule);
    let mut out: Vec<Segment<T>> = Vec::new();
    for (a, b, jobs) in elementary(schedule, m) {
        let machines: Vec<usize> = (0..m).filter(|&i| jobs[i].is_some()).collect();
        if machines.is_empty() {
            continue;
        }
        match out.last_mut() {
            Some(seg) if seg.machines == machines && seg.end.near(&a) => seg.end = b,
            _ => out.push(Segment { start: a, end: b, machines, amounts: Vec::new() }),
        }
    }
    for seg in &mut out {
        let mut amounts: Vec<(usize, T)> = Vec::new();
        for p in schedule.pieces() {
            let len = T::min_of(p.end.clone(), seg.end.clone()) - T::max_of(p.start.clone(), seg.start.clone());
            if !len.is_pos() {
                continue;
            }
            match amounts.iter_mut().find(|(j, _)| *j == p.job) {
                Some((_, a)) => *a += len,
                None => amounts.push((p.job, len)),
            }
        }
        amounts.sort_by_key(|(j, _)| *j);
        seg.amounts = amounts;
    }
    out
}

/// One job on machines `0..width` during `(start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block<T> {
    pub job: usize,
    pub width: usize,
    pub start: T,
    pub end: T,
}

impl<T: Scalar> Block<T> {
    pub fn len(&self) -> T {
        self.end.clone() - self.start.clone()
    }
}

/// Sequential, processor-descending schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialSchedule<T> {
    blocks: Vec<Block<T>>,
    completion: Vec<T>,
}

impl<T: Scalar> SequentialSchedule<T> {
    /// Drops empty blocks, merges touching blocks of one job and width, and
    /// checks that the blocks tile `(0, makespan)` with non-increasing widths
    /// and at most one block per job in each segment.
    pub fn new(blocks: Vec<Block<T>>, completion: Vec<T>) -> Result<Self> {
        let mut kept: Vec<Block<T>> = Vec::with_capacity(blocks.len());
        for b in blocks {
            if b.len().is_neg() {
                return Err(Error::Structural(format!("block of job {} ends before it starts", b.job)));
            }
            if b.len().near_zero() {
                continue;
            }
            if b.job >= completion.len() {
                return Err(Error::Structural(format!("unknown job index {}", b.job)));
            }
            if b.width == 0 {
                return Err(Error::Structural(format!("block of job {} uses no machine", b.job)));
            }
            match kept.last_mut() {
                Some(last) if last.job == b.job && last.width == b.width && last.end.near(&b.start) => last.end = b.end,
                _ => kept.push(b),
            }
        }
        let mut cursor = T::zero();
        for (k, b) in kept.iter().enumerate() {
            if !b.start.near(&cursor) {
                return Err(Error::Precondition(format!(
                    "blocks do not tile the busy time: gap or overlap at {}",
                    display(&cursor)
                )));
            }
            if k > 0 && kept[k - 1].width < b.width {
                return Err(Error::Precondition(format!(
                    "not processor-descending: width grows from {} to {} at {}",
                    kept[k - 1].width,
                    b.width,
                    display(&b.start)
                )));
            }
            cursor = b.end.clone();
        }
        let s = SequentialSchedule { blocks: kept, completion };
        for seg in s.segments() {
            for k in seg.clone() {
                if s.blocks[seg.start..k].iter().any(|b| b.job == s.blocks[k].job) {
                    return Err(Error::Precondition(format!(
                        "not sequential: job {} runs twice in the segment starting at {}",
                        s.blocks[k].job,
                        display(&s.blocks[seg.start].start)
                    )));
                }
            }
        }
        Ok(s)
    }

    /// Recognizes a sequential, processor-descending schedule.
    pub fn from_schedule(schedule: &Schedule<T>) -> Result<Self> {
        let m = machine_count(schedule);
        let mut blocks: Vec<Block<T>> = Vec::new();
        let mut cursor = T::zero();
        for (a, b, jobs) in elementary(schedule, m) {
            if !a.near(&cursor) {
                return Err(Error::Precondition(format!("shared machines idle before {}", display(&a))));
            }
            let width = jobs.iter().take_while(|j| j.is_some()).count();
            if width == 0 || jobs[width..].iter().any(Option::is_some) {
                return Err(Error::Precondition(format!(
                    "not processor-descending: busy machines during ({}, {}) are not the cheapest ones",
                    display(&a),
                    display(&b)
                )));
            }
            let job = jobs[0].expect("width > 0");
            if jobs[..width].iter().any(|j| *j != Some(job)) {
                return Err(Error::Precondition(format!(
                    "not sequential: several jobs run during ({}, {})",
                    display(&a),
                    display(&b)
                )));
            }
            match blocks.last_mut() {
                Some(last) if last.job == job && last.width == width => last.end = b.clone(),
                _ => blocks.push(Block { job, width, start: a, end: b.clone() }),
            }
            cursor = b;
        }
        SequentialSchedule::new(blocks, schedule.private_completion().to_vec())
    }

    pub fn blocks(&self) -> &[Block<T>] {
        &self.blocks
    }

    pub fn completion(&self) -> &[T] {
        &self.completion
    }

    pub fn makespan(&self) -> T {
        self.blocks.last().map_or_else(T::zero, |b| b.end.clone())
    }

    /// Block ranges of equal width.
    pub fn segments(&self) -> Vec<Range<usize>> {
        let mut out: Vec<Range<usize>> = Vec::new();
        for (k, b) in self.blocks.iter().enumerate() {
            match out.last_mut() {
                Some(r) if self.blocks[r.start].width == b.width => r.end = k + 1,
                _ => out.push(k..k + 1),
            }
        }
        out
    }

    pub fn segment_of(&self, block: usize) -> usize {
        (1..=block).filter(|&k| self.blocks[k].width != self.blocks[k - 1].width).count()
    }

    pub fn last_block_of(&self, job: usize) -> Option<usize> {
        self.blocks.iter().rposition(|b| b.job == job)
    }

    /// Present on the shared machines and finishing there exactly at `C_j`.
    pub fn is_synchronized(&self, job: usize) -> bool {
        self.last_block_of(job).is_some_and(|k| self.blocks[k].end.near(&self.completion[job]))
    }

    pub fn pieces(&self) -> Vec<Piece<T>> {
        self.blocks
            .iter()
            .flat_map(|b| (0..b.width).map(move |i| Piece::new(b.job, i, b.start.clone(), b.end.clone())))
            .collect()
    }

    pub fn to_schedule(&self) -> Schedule<T> {
        Schedule::new(self.completion.clone(), self.pieces()).expect("blocks have non-negative lengths")
    }

    /// Ω, failing when the schedule is infeasible.
    pub fn objective(&self, instance: &Instance<T>) -> Result<T> {
        Ok(total_weighted_overlap(&self.to_schedule(), instance)?.total_weighted)
    }

    /// `Σ |block| · Σ_{z ≤ width} (w − c_z)`; equals Ω when every block ends
    /// by its job's private completion.
    pub fn weighted_shared(&self, instance: &Instance<T>) -> T {
        self.blocks.iter().map(|b| b.len() * instance.width_gain(b.job, b.width)).sum()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "blocks": self.blocks.iter().map(|b| json!({
                "job": b.job,
                "width": b.width,
                "start": to_json_value(&b.start),
                "end": to_json_value(&b.end),
            })).collect::<Vec<_>>(),
            "private_completion": self.completion.iter().map(to_json_value).collect::<Vec<_>>(),
        })
    }
}

/// Result of [`make_sequential`].
#[derive(Debug, Clone)]
pub struct Sequentialized<T> {
    pub schedule: SequentialSchedule<T>,
    /// `machine_order[k]` is the input machine that became machine `k`.
    pub machine_order: Vec<usize>,
    /// Ω gained by moving the busiest machines to the cheapest positions;
    /// zero when the input loads are already cost-ordered.
    pub relabel_gain: T,
}

/// Compacts every machine to the left, orders machines by load (longest on
/// the cheapest), then lays out each segment's jobs one after another on all
/// of its machines in order of private completion.
pub fn make_sequential<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>) -> Result<Sequentialized<T>> {
    let before = total_weighted_overlap(schedule, instance)?.total_weighted;
    let m = instance.m();

    let mut compact: Vec<Vec<Piece<T>>> = vec![Vec::new(); m];
    for (i, row) in compact.iter_mut().enumerate() {
        let mut cursor = T::zero();
        for p in schedule.pieces_on(i) {
            let end = cursor.clone() + p.len();
            row.push(Piece::new(p.job, i, cursor, end.clone()));
            cursor = end;
        }
    }
    let loads: Vec<T> = compact.iter().map(|row| row.last().map_or_else(T::zero, |p| p.end.clone())).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| cmp(&loads[b], &loads[a]).then(a.cmp(&b)));
    let old_cost: T = (0..m).map(|i| instance.cost(i).clone() * loads[i].clone()).sum();
    let new_cost: T = (0..m).map(|k| instance.cost(k).clone() * loads[order[k]].clone()).sum();
    let relabel_gain = old_cost - new_cost;

    let pieces: Vec<Piece<T>> = order
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| compact[i].iter().map(move |p| Piece::new(p.job, k, p.start.clone(), p.end.clone())))
        .collect();
    let relabelled = Schedule::new(schedule.private_completion().to_vec(), pieces)?;

    let mut blocks = Vec::new();
    for seg in find_segments(&relabelled) {
        let width = seg.width();
        if seg.machines != (0..width).collect::<Vec<_>>() {
            return Err(Error::Invariant("compacted machines do not form a cheapest prefix".into()));
        }
        let mut jobs = seg.amounts.clone();
        jobs.sort_by(|(a, _), (b, _)| cmp(schedule.completion(*a), schedule.completion(*b)).then(a.cmp(b)));
        let mut cursor = seg.start.clone();
        let mw: T = int(width);
        for (k, (job, amount)) in jobs.iter().enumerate() {
            let end = if k + 1 == jobs.len() { seg.end.clone() } else { cursor.clone() + amount.clone() / mw.clone() };
            blocks.push(Block { job: *job, width, start: cursor, end: end.clone() });
            cursor = end;
        }
    }
    let out = SequentialSchedule::new(blocks, schedule.private_completion().to_vec())?;
    let after = out.objective(instance).map_err(as_invariant)?;
    let expected = before + relabel_gain.clone();
    if !after.near(&expected) {
        return Err(invariant("make_sequential payoff", display(&after), display(&expected)));
    }
    Ok(Sequentialized { schedule: out, machine_order: order, relabel_gain })
}

/// True iff every machine is busy on one interval starting at 0 and busy
/// lengths do not increase with the machine index.
pub fn is_processor_descending<T: Scalar>(schedule: &Schedule<T>, m: usize) -> bool {
    let mut prev: Option<T> = None;
    for i in 0..m {
        let mut cursor = T::zero();
        for p in schedule.pieces_on(i) {
            if !p.start.near(&cursor) {
                return false;
            }
            cursor = p.end.clone();
        }
        if prev.as_ref().is_some_and(|q| q.lt_tol(&cursor)) {
            return false;
        }
        prev = Some(cursor);
    }
    true
}

/// True iff in every segment each present job runs in a single interval on
/// all of the segment's machines.
pub fn is_sequential<T: Scalar>(schedule: &Schedule<T>) -> bool {
    let m = machine_count(schedule);
    let elem = elementary(schedule, m);
    for seg in find_segments(schedule) {
        let mut seen: Vec<usize> = Vec::new();
        let mut current: Option<usize> = None;
        for (a, b, jobs) in &elem {
            if a.lt_tol(&seg.start) || seg.end.lt_tol(b) {
                continue;
            }
            let first = jobs[seg.machines[0]];
            if seg.machines.iter().any(|&i| jobs[i] != first) {
                return false;
            }
            let job = first.expect("segment machines are busy");
            if current != Some(job) {
                if seen.contains(&job) {
                    return false;
                }
                seen.push(job);
                current = Some(job);
            }
        }
    }
    true
}

/// Shift parameters of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalDescriptor<T> {
    pub block: usize,
    pub job: usize,
    pub width: usize,
    pub start: T,
    pub end: T,
    /// `width + 1` when the block ends at the job's private completion,
    /// otherwise `width`.
    pub factor: usize,
    pub radius: T,
}

impl<T: Scalar> IntervalDescriptor<T> {
    pub fn synchronized(&self) -> bool {
        self.factor > self.width
    }
}

/// One descriptor per block, in time order.
pub fn describe_intervals<T: Scalar>(seq: &SequentialSchedule<T>, instance: &Instance<T>) -> Vec<IntervalDescriptor<T>> {
    seq.blocks
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let c = &seq.completion[b.job];
            let sync = b.end.near(c);
            let room = if sync { instance.job(b.job).p.clone() } else { c.clone() } - b.end.clone();
            IntervalDescriptor {
                block: k,
                job: b.job,
                width: b.width,
                start: b.start.clone(),
                end: b.end.clone(),
                factor: b.width + usize::from(sync),
                radius: T::min_of(b.len(), room),
            }
        })
        .collect()
}

/// [`describe_intervals`] for an arbitrary schedule; rejects schedules that
/// are not sequential and processor-descending.
pub fn describe_schedule<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>) -> Result<Vec<IntervalDescriptor<T>>> {
    Ok(describe_intervals(&SequentialSchedule::from_schedule(schedule)?, instance))
}

/// Block ends, the points where a shift may start.
pub fn end_points<T: Scalar>(seq: &SequentialSchedule<T>) -> Vec<T> {
    seq.blocks.iter().map(|b| b.end.clone()).collect()
}

pub fn block_ending_at<T: Scalar>(seq: &SequentialSchedule<T>, t: &T) -> Result<usize> {
    seq.blocks
        .iter()
        .position(|b| b.end.near(t))
        .ok_or_else(|| Error::Precondition(format!("{} is not the end of any block", display(t))))
}

fn rate_from<T: Scalar>(descs: &[IntervalDescriptor<T>], instance: &Instance<T>, b0: usize) -> T {
    let gain = |d: &IntervalDescriptor<T>| instance.width_gain(d.job, d.width);
    let mut prev_coef = T::one() / int(descs[b0].factor);
    let mut r = prev_coef.clone() * gain(&descs[b0]);
    let mut pi = T::one();
    for k in b0 + 1..descs.len() {
        pi = pi * int(descs[k].width) / int(descs[k - 1].factor);
        let coef = pi.clone() / int(descs[k].factor);
        r += (coef.clone() - prev_coef) * gain(&descs[k]);
        prev_coef = coef;
    }
    r
}

/// Payoff per unit of shift started at the end of block `b0`.
pub fn rate_at<T: Scalar>(seq: &SequentialSchedule<T>, instance: &Instance<T>, b0: usize) -> T {
    rate_from(&describe_intervals(seq, instance), instance, b0)
}

/// Payoff per unit of shift started at end point `t`.
pub fn rate<T: Scalar>(seq: &SequentialSchedule<T>, instance: &Instance<T>, t: &T) -> Result<T> {
    Ok(rate_at(seq, instance, block_ending_at(seq, t)?))
}

/// Half-open bound `min m_i r_i / 2` on |ε| over the blocks from `b0` on.
pub fn modification_bound<T: Scalar>(seq: &SequentialSchedule<T>, instance: &Instance<T>, b0: usize) -> T {
    describe_intervals(seq, instance)[b0..]
        .iter()
        .map(|d| int::<T>(d.width) * d.radius.clone())
        .reduce(T::min_of)
        .unwrap_or_else(T::zero)
        / int(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepCase {
    /// Last block: its end (and `C` when synchronized) moves.
    Base,
    /// Block ends before its job's private completion.
    #[serde(rename = "Main-I")]
    MainI,
    /// Block ends at its job's private completion, which moves along.
    #[serde(rename = "Main-II")]
    MainII,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModificationStep<T> {
    pub block: usize,
    pub job: usize,
    pub case: StepCase,
    pub width: usize,
    pub factor: usize,
    pub epsilon: T,
    /// `epsilon / factor`, the move of the block end.
    pub shift: T,
    pub radius: T,
    /// `factor · radius`, the largest doable |epsilon|.
    pub bound: T,
    pub end_before: T,
    pub end_after: T,
    pub payoff: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModificationTrace<T> {
    pub start_block: usize,
    pub start_time: T,
    pub job: usize,
    pub epsilon: T,
    pub steps: Vec<ModificationStep<T>>,
    pub rate: T,
    /// Sum of step payoffs.
    pub delta: T,
    pub epsilon_bound: T,
    /// The shifted schedule; its first job runs for `p + ε` in total.
    pub result: SequentialSchedule<T>,
}

impl<T: Scalar> ModificationTrace<T> {
    pub fn epsilons(&self) -> Vec<T> {
        self.steps.iter().map(|s| s.epsilon.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start_time": to_json_value(&self.start_time),
            "job": self.job,
            "epsilon": to_json_value(&self.epsilon),
            "rate": to_json_value(&self.rate),
            "delta": to_json_value(&self.delta),
            "epsilon_bound": to_json_value(&self.epsilon_bound),
            "steps": self.steps.iter().map(|s| json!({
                "block": s.block,
                "job": s.job,
                "case": s.case,
                "width": s.width,
                "factor": s.factor,
                "epsilon": to_json_value(&s.epsilon),
                "shift": to_json_value(&s.shift),
                "radius": to_json_value(&s.radius),
                "bound": to_json_value(&s.bound),
                "end_before": to_json_value(&s.end_before),
                "end_after": to_json_value(&s.end_after),
                "payoff": to_json_value(&s.payoff),
            })).collect::<Vec<_>>(),
            "result": self.result.to_json(),
        })
    }
}

/// Shifts the end of the block ending at `t` by `ε / m⁺` and propagates the
/// shift through every later block.
pub fn apply_modification<T: Scalar>(
    seq: &SequentialSchedule<T>,
    instance: &Instance<T>,
    t: &T,
    epsilon: T,
) -> Result<ModificationTrace<T>> {
    modify_from(seq, instance, block_ending_at(seq, t)?, epsilon)
}

fn modify_from<T: Scalar>(
    seq: &SequentialSchedule<T>,
    instance: &Instance<T>,
    b0: usize,
    epsilon: T,
) -> Result<ModificationTrace<T>> {
    if epsilon.near_zero() {
        return Err(Error::NotDoable("the shift ε must be non-zero".into()));
    }
    let descs = describe_intervals(seq, instance);
    let mut blocks = seq.blocks.clone();
    let mut completion = seq.completion.clone();
    let last = blocks.len() - 1;
    let mut e = epsilon.clone();
    let mut steps = Vec::new();
    for k in b0..=last {
        let d = &descs[k];
        let job = d.job;
        let sync = d.synchronized();
        let case = if k == last {
            StepCase::Base
        } else if sync {
            StepCase::MainII
        } else {
            StepCase::MainI
        };
        let b = &blocks[k];
        let room = if sync { instance.job(job).p.clone() } else { completion[job].clone() } - b.end.clone();
        let radius = T::min_of(b.len(), room);
        let bound = int::<T>(d.factor) * radius.clone();
        if bound.lt_tol(&e.abs()) {
            return Err(Error::NotDoable(format!(
                "step {} ({case:?}) at block {k}: |ε| = {} exceeds m⁺·r = {}",
                k - b0,
                display(&e.abs()),
                display(&bound)
            )));
        }
        let shift = e.clone() / int(d.factor);
        let end_before = b.end.clone();
        let end_after = end_before.clone() + shift.clone();
        blocks[k].end = end_after.clone();
        if sync {
            completion[job] += shift.clone();
        }
        let next_gain = if k < last {
            blocks[k + 1].start = end_after.clone();
            instance.width_gain(blocks[k + 1].job, blocks[k + 1].width)
        } else {
            T::zero()
        };
        let payoff = shift.clone() * (instance.width_gain(job, d.width) - next_gain);
        steps.push(ModificationStep {
            block: k,
            job,
            case,
            width: d.width,
            factor: d.factor,
            epsilon: e.clone(),
            shift,
            radius,
            bound,
            end_before,
            end_after,
            payoff,
        });
        if k < last {
            e = e * int(descs[k + 1].width) / int(d.factor);
        }
    }
    let delta = steps.iter().map(|s| s.payoff.clone()).sum();
    Ok(ModificationTrace {
        start_block: b0,
        start_time: seq.blocks[b0].end.clone(),
        job: seq.blocks[b0].job,
        epsilon,
        steps,
        rate: rate_from(&descs, instance, b0),
        delta,
        epsilon_bound: modification_bound(seq, instance, b0),
        result: SequentialSchedule { blocks, completion },
    })
}

/// Re-derives every identity a trace must satisfy: the shift product, the
/// total payoff `ε·R`, the change of weighted shared execution, validity of
/// the shifted schedule and the payoff of everything but the shifted job.
pub fn check_modification<T: Scalar>(
    trace: &ModificationTrace<T>,
    seq: &SequentialSchedule<T>,
    instance: &Instance<T>,
) -> Result<()> {
    let descs = describe_intervals(seq, instance);
    let b0 = trace.start_block;
    let mut expected = trace.epsilon.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        if i > 0 {
            let k = b0 + i;
            expected = expected * int(descs[k].width) / int(descs[k - 1].factor);
        }
        if !step.epsilon.near(&expected) {
            return Err(invariant(&format!("shift of step {i}"), display(&step.epsilon), display(&expected)));
        }
    }

    let product = trace.epsilon.clone() * trace.rate.clone();
    if !trace.delta.near(&product) {
        return Err(invariant("summed payoffs vs ε·R", display(&trace.delta), display(&product)));
    }
    let moved = trace.result.weighted_shared(instance) - seq.weighted_shared(instance);
    if !moved.near(&trace.delta) {
        return Err(invariant("weighted shared change vs summed payoffs", display(&moved), display(&trace.delta)));
    }

    let result = &trace.result;
    for b in &result.blocks {
        if result.completion[b.job].lt_tol(&b.end) {
            return Err(Error::Invariant(format!(
                "job {} ends on the shared machines at {} after its private completion {}",
                b.job,
                display(&b.end),
                display(&result.completion[b.job])
            )));
        }
        if b.len().is_neg() {
            return Err(Error::Invariant(format!("block of job {} has negative length", b.job)));
        }
    }
    let mut totals = result.completion.clone();
    for b in &result.blocks {
        totals[b.job] += b.len() * int(b.width);
    }
    for (j, total) in totals.iter().enumerate() {
        let mut want = instance.job(j).p.clone();
        if j == trace.job {
            want += trace.epsilon.clone();
        }
        if !total.near(&want) {
            return Err(invariant(&format!("total execution of job {j}"), display(total), display(&want)));
        }
    }
    let shifted = result.to_schedule();
    let conflicts = validate(&shifted, instance)?
        .into_iter()
        .filter(|v| matches!(v, Violation::MachineConflict { .. }))
        .count();
    if conflicts > 0 {
        return Err(Error::Invariant(format!("shifted schedule has {conflicts} machine conflicts")));
    }

    if seq.last_block_of(trace.job) == Some(b0) {
        let before = overlap_unchecked(&seq.to_schedule(), instance);
        let after = overlap_unchecked(&shifted, instance);
        let others: T = (0..instance.n()).filter(|&j| j != trace.job).map(|j| after.job_payoff(instance, j)).sum();
        let d0 = &descs[b0];
        let want = before.total_weighted.clone() + trace.delta.clone()
            - before.job_payoff(instance, trace.job)
            - trace.epsilon.clone() / int(d0.factor) * instance.width_gain(d0.job, d0.width);
        if !others.near(&want) {
            return Err(invariant("payoff without the shifted job", display(&others), display(&want)));
        }
    }
    Ok(())
}

/// A job with pieces in two segments: `first` and `second` are its blocks,
/// `second` being its last one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Split {
    pub job: usize,
    pub first: usize,
    pub second: usize,
}

/// Split of the job whose last block ends latest.
pub fn rightmost_split<T: Scalar>(seq: &SequentialSchedule<T>) -> Option<Split> {
    let mut seen: Vec<usize> = Vec::new();
    for k in (0..seq.blocks.len()).rev() {
        let job = seq.blocks[k].job;
        if seen.contains(&job) {
            continue;
        }
        seen.push(job);
        if let Some(first) = seq.blocks[..k].iter().rposition(|b| b.job == job) {
            return Some(Split { job, first, second: k });
        }
    }
    None
}

fn check_split<T: Scalar>(seq: &SequentialSchedule<T>, split: &Split) -> Result<()> {
    let ok = split.first < split.second
        && split.second < seq.blocks.len()
        && seq.blocks[split.first].job == split.job
        && seq.blocks[split.second].job == split.job
        && seq.last_block_of(split.job) == Some(split.second)
        && seq.segment_of(split.first) != seq.segment_of(split.second);
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "blocks {} and {} are not a split ending in the last block of job {}",
            split.first, split.second, split.job
        )))
    }
}

/// Half-open bound on |ε| for [`transfer`]:
/// `min(|I|, |I'| / (1 + 1/m⁺), min m_i r_i / 2)`.
pub fn transfer_bound<T: Scalar>(seq: &SequentialSchedule<T>, instance: &Instance<T>, split: &Split) -> Result<T> {
    check_split(seq, split)?;
    let descs = describe_intervals(seq, instance);
    let second = &descs[split.second];
    let f: T = int(second.factor);
    let shrink = (second.end.clone() - second.start.clone()) * f.clone() / (f + T::one());
    Ok(T::min_of(
        T::min_of(seq.blocks[split.first].len(), shrink),
        modification_bound(seq, instance, split.second),
    ))
}

/// Slack between the machine that gives up time for ε > 0 and the next
/// machine; a positive ε below it keeps the machine order.
pub fn transfer_order_margin<T: Scalar>(seq: &SequentialSchedule<T>, instance: &Instance<T>, split: &Split) -> Option<T> {
    let m0 = seq.blocks.get(split.second)?.width;
    if m0 + 1 >= instance.m() {
        return None;
    }
    let load = |i: usize| seq.blocks.iter().rev().find(|b| b.width > i).map_or_else(T::zero, |b| b.end.clone());
    Some(load(m0) - load(m0 + 1))
}

/// `R − w_j + c_{m0+1}`: the Ω change per unit of a transfer on `split`.
pub fn transfer_coefficient<T: Scalar>(seq: &SequentialSchedule<T>, instance: &Instance<T>, split: &Split) -> T {
    let m0 = seq.blocks[split.second].width;
    rate_at(seq, instance, split.second) - instance.job(split.job).w.clone() + instance.cost(m0).clone()
}

#[derive(Debug, Clone)]
pub struct TransferOutcome<T> {
    pub schedule: SequentialSchedule<T>,
    pub split: Split,
    pub epsilon: T,
    pub rate: T,
    /// `R − w_j + c_{m0+1}`.
    pub coefficient: T,
    pub objective_before: T,
    pub objective_after: T,
    pub relabel_gain: T,
    pub makespan_before: T,
    pub makespan_after: T,
    pub trace: ModificationTrace<T>,
}

/// Moves ε of the split job between its two blocks: shifts from the end of
/// the later block, compensates on machine `m0` in the earlier block (ε > 0)
/// or at the start of the later one (ε < 0), then re-sequentializes.
pub fn transfer<T: Scalar>(
    seq: &SequentialSchedule<T>,
    instance: &Instance<T>,
    split: &Split,
    epsilon: T,
) -> Result<TransferOutcome<T>> {
    let bound = transfer_bound(seq, instance, split)?;
    if epsilon.near_zero() || !epsilon.abs().lt_tol(&bound) {
        return Err(Error::NotDoable(format!(
            "transfer needs 0 < |ε| < {}, got {}",
            display(&bound),
            display(&epsilon)
        )));
    }
    let trace = modify_from(seq, instance, split.second, epsilon.clone())?;
    check_modification(&trace, seq, instance)?;

    let m0 = seq.blocks[split.second].width;
    let mut pieces = trace.result.pieces();
    if epsilon.is_pos() {
        let y = &seq.blocks[split.first].end;
        let piece = pieces
            .iter_mut()
            .find(|p| p.job == split.job && p.machine == m0 && p.end.near(y))
            .ok_or_else(|| Error::Invariant("earlier block has no piece on the donor machine".into()))?;
        piece.end = piece.end.clone() - epsilon.clone();
    } else {
        let s0 = seq.blocks[split.second].start.clone();
        pieces.push(Piece::new(split.job, m0, s0.clone(), s0 - epsilon.clone()));
    }
    let moved = Schedule::new(trace.result.completion.clone(), pieces)?;
    let seqd = make_sequential(&moved, instance).map_err(as_invariant)?;

    let objective_before = seq.objective(instance)?;
    let objective_after = seqd.schedule.objective(instance)?;
    let coefficient = transfer_coefficient(seq, instance, split);
    let predicted = objective_before.clone() + epsilon.clone() * coefficient.clone();
    let unrelabelled = objective_after.clone() - seqd.relabel_gain.clone();
    if !unrelabelled.near(&predicted) {
        return Err(invariant("transfer payoff", display(&unrelabelled), display(&predicted)));
    }
    let makespan_before = seq.makespan();
    let makespan_after = seqd.schedule.makespan();
    if epsilon.is_neg() && !makespan_after.lt_tol(&makespan_before) {
        return Err(invariant("makespan after a negative transfer", display(&makespan_after), "shorter"));
    }
    Ok(TransferOutcome {
        schedule: seqd.schedule,
        split: *split,
        epsilon,
        rate: trace.rate.clone(),
        coefficient,
        objective_before,
        objective_after,
        relabel_gain: seqd.relabel_gain,
        makespan_before,
        makespan_after,
        trace,
    })
}

/// Non-synchronized job with the latest shared completion.
pub fn last_unsynchronized_job<T: Scalar>(seq: &SequentialSchedule<T>) -> Option<usize> {
    let mut seen: Vec<usize> = Vec::new();
    for b in seq.blocks.iter().rev() {
        if seen.contains(&b.job) {
            continue;
        }
        seen.push(b.job);
        if !b.end.near(&seq.completion[b.job]) {
            return Some(b.job);
        }
    }
    None
}

fn sync_block<T: Scalar>(seq: &SequentialSchedule<T>, job: usize) -> Result<usize> {
    if let Some(split) = rightmost_split(seq) {
        return Err(Error::Precondition(format!("job {} is split", split.job)));
    }
    let b = seq
        .last_block_of(job)
        .ok_or_else(|| Error::Precondition(format!("job {job} does not use the shared machines")))?;
    if seq.is_synchronized(job) {
        return Err(Error::Precondition(format!("job {job} is already synchronized")));
    }
    match last_unsynchronized_job(seq) {
        Some(last) if last != job => {
            Err(Error::Precondition(format!("job {last} is a later non-synchronized job")))
        }
        _ => Ok(b),
    }
}

/// Half-open bound on |ε| for [`synchronize_job`]:
/// `min(m0 (e − s), m0/(m0+1) (C − e), min m_i r_i / 2)`.
pub fn synchronize_bound<T: Scalar>(seq: &SequentialSchedule<T>, instance: &Instance<T>, job: usize) -> Result<T> {
    let b = sync_block(seq, job)?;
    let block = &seq.blocks[b];
    let m0: T = int(block.width);
    let gap = seq.completion[job].clone() - block.end.clone();
    Ok(T::min_of(
        T::min_of(m0.clone() * block.len(), m0.clone() / (m0 + T::one()) * gap),
        modification_bound(seq, instance, b),
    ))
}

#[derive(Debug, Clone)]
pub struct SyncStep<T> {
    pub schedule: SequentialSchedule<T>,
    pub job: usize,
    pub epsilon: T,
    pub rate: T,
    pub objective_before: T,
    pub objective_after: T,
    pub trace: ModificationTrace<T>,
}

/// One step moving `job` towards synchronization: shift ε from the end of
/// its last block (sign of the rate there) and take ε off its private
/// processor. `magnitude` defaults to half the bound.
pub fn synchronize_job<T: Scalar>(
    seq: &SequentialSchedule<T>,
    instance: &Instance<T>,
    job: usize,
    magnitude: Option<T>,
) -> Result<SyncStep<T>> {
    let bound = synchronize_bound(seq, instance, job)?;
    let b = seq.last_block_of(job).expect("checked by the bound");
    let size = magnitude.unwrap_or_else(|| bound.clone() / int(2));
    if !size.is_pos() || !size.lt_tol(&bound) {
        return Err(Error::NotDoable(format!(
            "synchronization needs 0 < |ε| < {}, got {}",
            display(&bound),
            display(&size)
        )));
    }
    let r = rate_at(seq, instance, b);
    let epsilon = if r.is_pos() { size } else { -size };
    let trace = modify_from(seq, instance, b, epsilon.clone())?;
    check_modification(&trace, seq, instance)?;
    let mut completion = trace.result.completion.clone();
    completion[job] = completion[job].clone() - epsilon.clone();
    let schedule = SequentialSchedule::new(trace.result.blocks.clone(), completion)?;

    let objective_before = seq.objective(instance)?;
    let objective_after = schedule.objective(instance).map_err(as_invariant)?;
    let predicted = objective_before.clone() + epsilon.clone() * r.clone();
    if !objective_after.near(&predicted) {
        return Err(invariant("synchronization payoff", display(&objective_after), display(&predicted)));
    }
    Ok(SyncStep { schedule, job, epsilon, rate: r, objective_before, objective_after, trace })
}

/// First block of the longest suffix of synchronized blocks of distinct jobs
/// with non-decreasing processing times; `blocks().len()` when empty.
pub fn synchronized_suffix<T: Scalar>(seq: &SequentialSchedule<T>, instance: &Instance<T>) -> usize {
    let mut start = seq.blocks.len();
    let mut jobs: Vec<usize> = Vec::new();
    while start > 0 {
        let b = &seq.blocks[start - 1];
        let p = &instance.job(b.job).p;
        let ordered = jobs.last().is_none_or(|&next| p.le_tol(&instance.job(next).p));
        if !b.end.near(&seq.completion[b.job]) || jobs.contains(&b.job) || !ordered {
            break;
        }
        jobs.push(b.job);
        start -= 1;
    }
    start
}

#[derive(Debug, Clone)]
pub struct Filling<T> {
    pub schedule: SequentialSchedule<T>,
    pub job: usize,
    /// Job whose block head was handed over.
    pub displaced: usize,
    pub width: usize,
    /// Start of the displaced block.
    pub start: T,
    /// New end of `job` on the shared machines.
    pub end: T,
    /// Original end of the displaced block.
    pub target_end: T,
    pub gain: T,
    pub objective_before: T,
    pub objective_after: T,
}

impl<T: Scalar> Filling<T> {
    /// The displaced job left the shared machines entirely.
    pub fn displaced_removed(&self) -> bool {
        self.end.near(&self.target_end)
    }
}

fn filling_target<T: Scalar>(
    seq: &SequentialSchedule<T>,
    instance: &Instance<T>,
    job: usize,
    target: Option<usize>,
) -> Result<usize> {
    let suffix = synchronized_suffix(seq, instance);
    let n_blocks = seq.blocks.len();
    match seq.last_block_of(job) {
        Some(b) => {
            if seq.is_synchronized(job) {
                return Err(Error::Precondition(format!("job {job} is synchronized")));
            }
            if b + 1 >= n_blocks || suffix > b + 1 || target.is_some_and(|t| t != b + 1) {
                return Err(Error::Precondition(format!(
                    "job {job} is not directly followed by an ordered synchronized suffix"
                )));
            }
            Ok(b + 1)
        }
        None => {
            let p = &instance.job(job).p;
            let starts_before = |k: &usize| seq.blocks[*k].start.lt_tol(p);
            let pick = match target {
                Some(t) => Some(t).filter(|t| *t >= suffix && *t < n_blocks && starts_before(t)),
                None => (suffix..n_blocks)
                    .filter(starts_before)
                    .find(|&k| p.le_tol(&instance.job(seq.blocks[k].job).p))
                    .or_else(|| (suffix..n_blocks).filter(starts_before).last()),
            };
            pick.ok_or_else(|| {
                Error::Precondition(format!("no ordered synchronized suffix starts before p of job {job}"))
            })
        }
    }
}

/// Hands the head of a synchronized block over to `job`, moving the same
/// amount of the displaced job onto its private processor. Without `target`
/// a job off the shared machines takes the first suffix block whose job is
/// at least as long.
pub fn j_filling<T: Scalar>(
    seq: &SequentialSchedule<T>,
    instance: &Instance<T>,
    job: usize,
    target: Option<usize>,
) -> Result<Filling<T>> {
    let b1 = filling_target(seq, instance, job, target)?;
    let block = seq.blocks[b1].clone();
    let displaced = block.job;
    let mw: T = int(block.width);
    let balance = (seq.completion[job].clone() + mw.clone() * block.start.clone()) / (mw.clone() + T::one());
    let t = T::min_of(block.end.clone(), balance);
    let moved = mw * (t.clone() - block.start.clone());

    let mut blocks: Vec<Block<T>> = seq.blocks[..b1].to_vec();
    blocks.push(Block { job, width: block.width, start: block.start.clone(), end: t.clone() });
    blocks.push(Block { job: displaced, width: block.width, start: t.clone(), end: block.end.clone() });
    blocks.extend_from_slice(&seq.blocks[b1 + 1..]);
    let mut completion = seq.completion.clone();
    completion[job] = completion[job].clone() - moved.clone();
    completion[displaced] = completion[displaced].clone() + moved.clone();
    let schedule = SequentialSchedule::new(blocks, completion)?;

    let objective_before = seq.objective(instance)?;
    let objective_after = schedule.objective(instance).map_err(as_invariant)?;
    let gain = moved * (instance.job(job).w.clone() - instance.job(displaced).w.clone());
    let predicted = objective_before.clone() + gain.clone();
    if !objective_after.near(&predicted) {
        return Err(invariant("filling payoff", display(&objective_after), display(&predicted)));
    }
    Ok(Filling {
        schedule,
        job,
        displaced,
        width: block.width,
        start: block.start,
        end: t,
        target_end: block.end,
        gain,
        objective_before,
        objective_after,
    })
}

/// Repeats [`j_filling`] with each displaced job filling the next block,
/// until no block follows or the preconditions fail.
pub fn j_filling_chain<T: Scalar>(
    seq: &SequentialSchedule<T>,
    instance: &Instance<T>,
    job: usize,
    target: Option<usize>,
) -> Result<Vec<Filling<T>>> {
    let mut out = vec![j_filling(seq, instance, job, target)?];
    loop {
        let last = out.last().expect("non-empty");
        let cur = &last.schedule;
        let Some(next) = cur.blocks.iter().position(|b| b.start.near(&last.target_end)) else { break };
        match j_filling(cur, instance, last.displaced, Some(next)) {
            Ok(f) => out.push(f),
            Err(Error::Precondition(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub const DEFAULT_CANONICALIZE_ITERATIONS: usize = 200;

#[derive(Debug, Clone)]
pub struct Canonicalized<T> {
    pub schedule: SequentialSchedule<T>,
    /// Transfers and synchronization steps performed.
    pub iterations: usize,
    /// No split and every present job synchronized.
    pub converged: bool,
    pub transfers: usize,
    pub synchronizations: usize,
    pub objective_before: T,
    pub objective_after: T,
    pub relabel_gain: T,
}

/// Best-effort normal form: sequentialize, then repeatedly remove the
/// rightmost split by a transfer and synchronize the last non-synchronized
/// job, each with half its maximal shift and a sign that does not lower Ω.
pub fn canonicalize<T: Scalar>(
    schedule: &Schedule<T>,
    instance: &Instance<T>,
    max_iterations: usize,
) -> Result<Canonicalized<T>> {
    let objective_before = total_weighted_overlap(schedule, instance)?.total_weighted;
    let seqd = make_sequential(schedule, instance)?;
    let mut relabel_gain = seqd.relabel_gain;
    let mut cur = seqd.schedule;
    let (mut transfers, mut synchronizations) = (0, 0);
    let mut converged = false;
    for _ in 0..=max_iterations {
        if let Some(split) = rightmost_split(&cur) {
            if transfers + synchronizations == max_iterations {
                break;
            }
            let mut bound = transfer_bound(&cur, instance, &split)?;
            let positive = transfer_coefficient(&cur, instance, &split).is_pos();
            if positive {
                if let Some(margin) = transfer_order_margin(&cur, instance, &split).filter(T::is_pos) {
                    bound = T::min_of(bound, margin);
                }
            }
            let half = bound / int(2);
            let out = transfer(&cur, instance, &split, if positive { half } else { -half })?;
            relabel_gain += out.relabel_gain;
            cur = out.schedule;
            transfers += 1;
        } else if let Some(job) = last_unsynchronized_job(&cur) {
            if transfers + synchronizations == max_iterations {
                break;
            }
            cur = synchronize_job(&cur, instance, job, None)?.schedule;
            synchronizations += 1;
        } else {
            converged = true;
            break;
        }
    }
    let objective_after = cur.objective(instance)?;
    Ok(Canonicalized {
        schedule: cur,
        iterations: transfers + synchronizations,
        converged,
        transfers,
        synchronizations,
        objective_before,
        objective_after,
        relabel_gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{two_machine_trio, instance, q, qr, single_job};
    use crate::num::Rational;
    use crate::oracle::{oracle_optimum, EnumerationBudget};

    fn blocks(spec: &[(usize, usize, Rational, Rational)], completion: Vec<Rational>) -> SequentialSchedule<Rational> {
        SequentialSchedule::new(
            spec.iter().map(|(j, w, s, e)| Block { job: *j, width: *w, start: s.clone(), end: e.clone() }).collect(),
            completion,
        )
        .unwrap()
    }

    fn piece(job: usize, machine: usize, s: i64, e: i64) -> Piece<Rational> {
        Piece::new(job, machine, q(s), q(e))
    }

    #[test]
    fn idle_gap_splits_segments() {
        let s = Schedule::new(vec![q(3), q(6)], vec![piece(0, 0, 0, 3), piece(1, 0, 4, 5), piece(1, 1, 4, 5)]).unwrap();
        let segs = find_segments(&s);
        assert_eq!(segs.len(), 2);
        assert_eq!((segs[0].start.clone(), segs[0].end.clone()), (q(0), q(3)));
        assert_eq!((segs[1].start.clone(), segs[1].end.clone(), segs[1].width()), (q(4), q(5), 2));
    }

    #[test]
    fn busy_prefix_without_gaps_is_one_segment() {
        let s = Schedule::new(vec![q(2), q(9)], vec![piece(0, 0, 0, 2), piece(1, 0, 2, 5)]).unwrap();
        let segs = find_segments(&s);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].amounts, vec![(0, q(2)), (1, q(3))]);
    }

    #[test]
    fn split_layout_segments() {
        let inst = instance(&[(38, 1), (33, 1), (37, 1), (32, 1)], &[0, 0, 0]);
        let s = Schedule::new(
            vec![q(20), q(21), q(22), q(23)],
            vec![piece(0, 0, 0, 18), piece(1, 1, 0, 12), piece(3, 1, 12, 18), piece(2, 2, 0, 15), piece(3, 2, 15, 18)],
        )
        .unwrap();
        let amounts = &find_segments(&s)[0].amounts;
        assert_eq!(amounts, &vec![(0, q(18)), (1, q(12)), (2, q(15)), (3, q(9))]);
        let out = make_sequential(&s, &inst).unwrap();
        let lens: Vec<Rational> = out.schedule.blocks().iter().map(Block::len).collect();
        assert_eq!(lens, vec![q(6), q(4), q(5), q(3)]);
        assert!(out.schedule.blocks().iter().all(|b| b.width == 3));
        assert_eq!(out.relabel_gain, q(0));
        let back = out.schedule.to_schedule();
        assert!(is_sequential(&back) && is_processor_descending(&back, 3));
        assert!(!is_sequential(&s));
    }

    #[test]
    fn synchronized_schedule_is_a_fixed_point() {
        let inst = two_machine_trio();
        let opt = oracle_optimum(&inst, &EnumerationBudget::default()).unwrap();
        let s = opt.schedule.expand(&inst);
        let out = make_sequential(&s, &inst).unwrap();
        assert_eq!(out.schedule.to_schedule(), s);
        assert_eq!(out.schedule.objective(&inst).unwrap(), q(37));
        assert!(rightmost_split(&out.schedule).is_none());
        assert!(last_unsynchronized_job(&out.schedule).is_none());
    }

    #[test]
    fn relabel_moves_long_machine_to_cheapest() {
        let inst = instance(&[(10, 5)], &[1, 3]);
        let s = Schedule::new(vec![q(6)], vec![piece(0, 0, 0, 1), piece(0, 1, 0, 3)]).unwrap();
        let before = total_weighted_overlap(&s, &inst).unwrap().total_weighted;
        let out = make_sequential(&s, &inst).unwrap();
        assert_eq!(out.machine_order, vec![1, 0]);
        assert_eq!(out.relabel_gain, q(4));
        assert_eq!(out.schedule.objective(&inst).unwrap(), before + q(4));
    }

    #[test]
    fn rejects_non_sequential_descriptions() {
        let inst = instance(&[(10, 5), (10, 5)], &[1, 1]);
        let s = Schedule::new(vec![q(8), q(8)], vec![piece(0, 0, 0, 2), piece(1, 1, 0, 2)]).unwrap();
        assert!(matches!(describe_schedule(&s, &inst), Err(Error::Precondition(_))));
        let gap = Schedule::new(vec![q(8), q(8)], vec![piece(0, 0, 1, 3)]).unwrap();
        assert!(describe_schedule(&gap, &inst).is_err());
    }

    #[test]
    fn descriptor_of_single_job() {
        let inst = single_job(12, 2, &[1]);
        let s = blocks(&[(0, 1, q(0), q(6))], vec![q(6)]);
        let d = &describe_intervals(&s, &inst)[0];
        assert_eq!((d.factor, d.radius.clone()), (2, q(6)));
        assert!(d.synchronized());
        assert_eq!(rate(&s, &inst, &q(6)).unwrap(), qr(1, 2));
        assert!(rate(&s, &inst, &q(5)).is_err());

        let open = blocks(&[(0, 1, q(0), q(4))], vec![q(8)]);
        let d = &describe_intervals(&open, &inst)[0];
        assert_eq!((d.factor, d.radius.clone()), (1, q(4)));
    }

    #[test]
    fn zero_rate_at_break_even_weight() {
        let inst = instance(&[(9, 3)], &[1, 5]);
        let s = blocks(&[(0, 2, q(0), q(3))], vec![q(3)]);
        assert_eq!(rate(&s, &inst, &q(3)).unwrap(), q(0));
    }

    #[test]
    fn base_step_moves_end_and_private_completion() {
        let inst = single_job(12, 2, &[1]);
        let s = blocks(&[(0, 1, q(0), q(6))], vec![q(6)]);
        let trace = apply_modification(&s, &inst, &q(6), q(2)).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].case, StepCase::Base);
        assert_eq!(trace.result.blocks()[0].end, q(7));
        assert_eq!(trace.result.completion()[0], q(7));
        assert_eq!(trace.delta, q(1));
        check_modification(&trace, &s, &inst).unwrap();
        assert_eq!(trace.to_json()["steps"][0]["case"], "Base");
    }

    #[test]
    fn shifts_follow_the_product_formula() {
        let inst = instance(&[(20, 9), (12, 7), (7, 6)], &[1, 2, 3]);
        let s = blocks(
            &[(0, 3, q(0), q(2)), (1, 2, q(2), q(4)), (2, 1, q(4), q(5))],
            vec![q(14), q(8), q(5) + q(1)],
        );
        let eps = qr(1, 3);
        let trace = apply_modification(&s, &inst, &q(2), eps.clone()).unwrap();
        let cases: Vec<StepCase> = trace.steps.iter().map(|x| x.case).collect();
        assert_eq!(cases, vec![StepCase::MainI, StepCase::MainI, StepCase::Base]);
        assert_eq!(trace.epsilons(), vec![eps.clone(), eps.clone() * q(2) / q(3), eps.clone() * q(2) / q(3) / q(2)]);
        check_modification(&trace, &s, &inst).unwrap();
        assert_eq!(trace.delta, eps * trace.rate.clone());
    }

    #[test]
    fn oversized_shift_is_not_doable() {
        let inst = single_job(12, 2, &[1]);
        let s = blocks(&[(0, 1, q(0), q(6))], vec![q(6)]);
        assert!(matches!(apply_modification(&s, &inst, &q(6), q(13)), Err(Error::NotDoable(_))));
        assert!(matches!(apply_modification(&s, &inst, &q(6), q(0)), Err(Error::NotDoable(_))));
    }

    fn split_schedule() -> (Instance, SequentialSchedule<Rational>) {
        let inst = instance(&[(12, 5), (5, 4)], &[1, 2]);
        let s = blocks(&[(0, 2, q(0), q(2)), (1, 2, q(2), q(3)), (0, 1, q(3), q(5))], vec![q(6), q(3)]);
        (inst, s)
    }

    #[test]
    fn negative_transfer_shortens_schedule() {
        let (inst, s) = split_schedule();
        let split = rightmost_split(&s).unwrap();
        assert_eq!(split, Split { job: 0, first: 0, second: 2 });
        let bound = transfer_bound(&s, &inst, &split).unwrap();
        let eps = -bound.clone() / q(2);
        let out = transfer(&s, &inst, &split, eps.clone()).unwrap();
        assert!(out.makespan_after < out.makespan_before);
        assert_eq!(out.relabel_gain, q(0));
        assert_eq!(out.objective_after, out.objective_before.clone() + eps * out.coefficient.clone());
        assert!(matches!(transfer(&s, &inst, &split, bound), Err(Error::NotDoable(_))));
    }

    #[test]
    fn positive_transfer_within_margin() {
        let (inst, s) = split_schedule();
        let split = rightmost_split(&s).unwrap();
        let bound = transfer_bound(&s, &inst, &split).unwrap();
        assert_eq!(transfer_order_margin(&s, &inst, &split), None);
        let eps = bound / q(2);
        let out = transfer(&s, &inst, &split, eps.clone()).unwrap();
        assert_eq!(out.objective_after, out.objective_before.clone() + eps * out.coefficient.clone());
    }

    #[test]
    fn synchronizing_a_single_job() {
        let inst = single_job(12, 2, &[1]);
        let s = blocks(&[(0, 1, q(0), q(4))], vec![q(8)]);
        assert_eq!(synchronize_bound(&s, &inst, 0).unwrap(), q(2));
        let step = synchronize_job(&s, &inst, 0, None).unwrap();
        assert_eq!((step.rate.clone(), step.epsilon.clone()), (q(1), q(1)));
        assert_eq!(step.objective_before, q(4));
        assert_eq!(step.objective_after, q(5));
        assert_eq!(step.schedule.blocks()[0].end, q(5));
        assert_eq!(step.schedule.completion()[0], q(7));
    }

    #[test]
    fn zero_rate_leaves_objective_unchanged() {
        let inst = instance(&[(4, 3), (8, 1)], &[1]);
        let s = blocks(&[(0, 1, q(0), q(2)), (1, 1, q(2), q(3))], vec![q(2), q(7)]);
        assert_eq!(last_unsynchronized_job(&s), Some(1));
        let step = synchronize_job(&s, &inst, 1, None).unwrap();
        assert_eq!(step.rate, q(0));
        assert!(step.epsilon.is_neg());
        assert_eq!(step.objective_after, step.objective_before);
        assert!(matches!(synchronize_job(&s, &inst, 0, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn perturbed_optimum_climbs_back() {
        let inst = two_machine_trio();
        let opt = oracle_optimum(&inst, &EnumerationBudget::default()).unwrap();
        let s = make_sequential(&opt.schedule.expand(&inst), &inst).unwrap().schedule;
        let mut bl = s.blocks().to_vec();
        let mut comp = s.completion().to_vec();
        let last = bl.len() - 1;
        let job = bl[last].job;
        let delta = q(1);
        bl[last].end = bl[last].end.clone() - delta.clone() / q(bl[last].width as i64);
        comp[job] = comp[job].clone() + delta;
        let mut cur = SequentialSchedule::new(bl, comp).unwrap();
        let mut gap = opt.objective.clone() - cur.objective(&inst).unwrap();
        assert!(gap.is_pos());
        for _ in 0..6 {
            let step = synchronize_job(&cur, &inst, job, None).unwrap();
            assert!(step.epsilon.is_pos());
            let next_gap = opt.objective.clone() - step.objective_after.clone();
            assert_eq!(next_gap, gap / q(2));
            gap = next_gap;
            cur = step.schedule;
        }
    }

    #[test]
    fn filling_from_private_only_job() {
        let inst = instance(&[(4, 5), (6, 3)], &[1]);
        let s = blocks(&[(1, 1, q(0), q(3))], vec![q(4), q(3)]);
        assert_eq!(synchronized_suffix(&s, &inst), 0);
        let f = j_filling(&s, &inst, 0, None).unwrap();
        assert_eq!((f.displaced, f.end.clone()), (1, q(2)));
        assert_eq!(f.gain, q(4));
        assert_eq!((f.objective_before.clone(), f.objective_after.clone()), (q(6), q(10)));
        assert!(!f.displaced_removed());
        assert!(!f.schedule.is_synchronized(1));
    }

    #[test]
    fn filling_can_remove_the_displaced_job() {
        let inst = instance(&[(10, 5), (6, 3)], &[1]);
        let s = blocks(&[(1, 1, q(0), q(3))], vec![q(10), q(3)]);
        let f = j_filling(&s, &inst, 0, None).unwrap();
        assert!(f.displaced_removed());
        assert!(f.schedule.last_block_of(1).is_none());
        assert_eq!(f.schedule.completion()[1], q(6));
    }

    #[test]
    fn equal_weights_fill_without_gain() {
        let inst = instance(&[(4, 3), (6, 3)], &[1]);
        let s = blocks(&[(1, 1, q(0), q(3))], vec![q(4), q(3)]);
        let f = j_filling(&s, &inst, 0, None).unwrap();
        assert_eq!(f.objective_after, f.objective_before);
    }

    #[test]
    fn filling_chain_runs_through_the_suffix() {
        let inst = instance(&[(3, 9), (4, 6), (8, 4)], &[1]);
        // job 1 on (0, 2) synchronized, job 2 on (2, 5) synchronized; job 0 private only
        let s = blocks(&[(1, 1, q(0), q(2)), (2, 1, q(2), q(5))], vec![q(3), q(2), q(5)]);
        let chain = j_filling_chain(&s, &inst, 0, None).unwrap();
        assert!(chain.len() >= 2);
        let mut prev = s.objective(&inst).unwrap();
        for f in &chain {
            assert!(f.objective_after >= prev);
            prev = f.objective_after.clone();
        }
    }

    #[test]
    fn canonicalize_removes_splits() {
        let (inst, s) = split_schedule();
        let out = canonicalize(&s.to_schedule(), &inst, 50).unwrap();
        assert!(out.transfers >= 1);
        assert!(rightmost_split(&out.schedule).is_none() || !out.converged);
        assert!(out.iterations <= 50);
        out.schedule.objective(&inst).unwrap();
    }
}
