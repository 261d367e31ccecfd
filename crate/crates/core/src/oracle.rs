//! Exact optimum of small instances by enumerating synchronized schedules.
//!
//! Some optimal schedule is synchronized, so the best of all ordered job
//! subsets with non-increasing widths is the global optimum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Instance, SyncEntry, SynchronizedSchedule};
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumerationBudget {
    pub max_jobs: usize,
    pub max_machines: usize,
    pub max_candidates: u128,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_jobs: 6, max_machines: 4, max_candidates: 20_000_000 }
    }
}

/// `n (n−1) … (n−k+1)`.
fn ordered_subsets(n: usize, k: usize) -> u128 {
    (0..k).map(|i| (n - i) as u128).product()
}

/// Non-increasing sequences of length `k` over `{1..m}`: `C(m+k−1, k)`.
fn width_sequences(m: usize, k: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (m + i) as u128 / (i + 1) as u128;
    }
    c
}

/// Number of (ordered subset, width sequence) pairs, the empty one included.
pub fn candidate_count(n: usize, m: usize) -> u128 {
    (0..=n).map(|k| ordered_subsets(n, k) * width_sequences(m, k)).sum()
}

/// Counts of one full enumeration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    /// Feasible synchronized schedules visited.
    pub feasible: u128,
    /// Pairs skipped because some job would start after its own `p`,
    /// including every extension of such a prefix.
    pub skipped: u128,
}

fn check_budget<T: Scalar>(instance: &Instance<T>, budget: &EnumerationBudget) -> Result<()> {
    let (n, m) = (instance.n(), instance.m());
    if n > budget.max_jobs || m > budget.max_machines {
        return Err(Error::Refused(format!(
            "enumeration budget is {} jobs and {} machines; instance has {n} jobs and {m} machines",
            budget.max_jobs, budget.max_machines
        )));
    }
    let count = candidate_count(n, m);
    if count > budget.max_candidates {
        return Err(Error::Refused(format!(
            "{count} candidates exceed the budget of {}",
            budget.max_candidates
        )));
    }
    Ok(())
}

struct Walker<'a, T: Scalar, F> {
    instance: &'a Instance<T>,
    sequence: Vec<SyncEntry>,
    boundaries: Vec<T>,
    used: Vec<bool>,
    stats: EnumerationStats,
    visit: F,
}

impl<T: Scalar, F: FnMut(&[SyncEntry], &[T], &T)> Walker<'_, T, F> {
    fn run(&mut self, max_width: usize, t_prev: T, objective: T) {
        self.stats.feasible += 1;
        (self.visit)(&self.sequence, &self.boundaries, &objective);
        let n = self.instance.n();
        let remaining = n.saturating_sub(self.sequence.len() + 1);
        for j in 0..n {
            if self.used[j] {
                continue;
            }
            let p = self.instance.job(j).p.clone();
            if p.lt_tol(&t_prev) {
                let per_width: u128 = (1..=max_width).map(|w| subtree(remaining, w)).sum();
                self.stats.skipped += per_width;
                continue;
            }
            self.used[j] = true;
            for width in 1..=max_width {
                let mw = T::from_int(width as i64);
                let t = (p.clone() + mw.clone() * t_prev.clone()) / (T::one() + mw);
                let gain = (t.clone() - t_prev.clone()) * self.instance.width_gain(j, width);
                self.sequence.push(SyncEntry { job: j, width });
                self.boundaries.push(t.clone());
                self.run(width, t, objective.clone() + gain);
                self.sequence.pop();
                self.boundaries.pop();
            }
            self.used[j] = false;
        }
    }
}

/// Pairs in a subtree whose root has `remaining` unused jobs and width bound `w`.
fn subtree(remaining: usize, w: usize) -> u128 {
    candidate_count(remaining, w)
}

/// Visits every feasible synchronized schedule with its boundaries and
/// payoff, depth first; jobs in index order, widths ascending.
pub fn for_each_synchronized<T: Scalar>(
    instance: &Instance<T>,
    budget: &EnumerationBudget,
    visit: impl FnMut(&[SyncEntry], &[T], &T),
) -> Result<EnumerationStats> {
    check_budget(instance, budget)?;
    let mut walker = Walker {
        instance,
        sequence: Vec::new(),
        boundaries: Vec::new(),
        used: vec![false; instance.n()],
        stats: EnumerationStats::default(),
        visit,
    };
    walker.run(instance.m(), T::zero(), T::zero());
    Ok(walker.stats)
}

/// All feasible synchronized schedules (see [`for_each_synchronized`]).
pub fn enumerate_synchronized<T: Scalar>(
    instance: &Instance<T>,
    budget: &EnumerationBudget,
) -> Result<impl Iterator<Item = SynchronizedSchedule<T>>> {
    let mut all = Vec::new();
    for_each_synchronized(instance, budget, |seq, bounds, _| {
        all.push(
            SynchronizedSchedule::new(instance, seq.to_vec(), bounds.to_vec())
                .expect("enumerated boundaries satisfy the recurrence"),
        );
    })?;
    Ok(all.into_iter())
}

#[derive(Debug, Clone)]
pub struct OracleOptimum<T: Scalar> {
    pub schedule: SynchronizedSchedule<T>,
    pub objective: T,
    pub stats: EnumerationStats,
}

fn tie_key(seq: &[SyncEntry]) -> (usize, Vec<usize>, Vec<usize>) {
    (seq.len(), seq.iter().map(|e| e.job).collect(), seq.iter().map(|e| e.width).collect())
}

/// Best synchronized schedule. Ties: shortest sequence, then job indices
/// lexicographically, then smaller widths.
pub fn oracle_optimum<T: Scalar>(instance: &Instance<T>, budget: &EnumerationBudget) -> Result<OracleOptimum<T>> {
    let mut best: Option<(Vec<SyncEntry>, Vec<T>, T)> = None;
    let stats = for_each_synchronized(instance, budget, |seq, bounds, obj| {
        let better = match &best {
            None => true,
            Some((bs, _, bo)) => bo.lt_tol(obj) || (bo.near(obj) && tie_key(seq) < tie_key(bs)),
        };
        if better {
            best = Some((seq.to_vec(), bounds.to_vec(), obj.clone()));
        }
    })?;
    let (sequence, boundaries, objective) = best.expect("the empty schedule is always visited");
    let schedule = SynchronizedSchedule::new(instance, sequence, boundaries)?;
    Ok(OracleOptimum { schedule, objective, stats })
}
