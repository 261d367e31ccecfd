//! Seeded random instances and schedules for property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, Job, Piece, Schedule};
use crate::num::{Rational, Scalar};
use crate::structure::{Block, SequentialSchedule};

pub type FuzzRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FuzzRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k/d` with `d ∈ {1, 2, 3, 4}` and the value in `[lo, hi]`.
pub fn rational_in(rng: &mut FuzzRng, lo: i64, hi: i64) -> Rational {
    let d = rng.gen_range(1..=4);
    Rational::from_ratio(rng.gen_range(lo * d..=hi * d), d)
}

fn jobs_from(ps: Vec<Rational>, ws: Vec<Rational>) -> Vec<Job> {
    ps.into_iter()
        .zip(ws)
        .enumerate()
        .map(|(i, (p, w))| Job::new(format!("j{}", i + 1), p, w))
        .collect()
}

fn costs(rng: &mut FuzzRng, m: usize) -> Vec<Rational> {
    let mut c: Vec<Rational> = (0..m).map(|_| rational_in(rng, 0, 10)).collect();
    c.sort();
    c
}

/// `n` jobs with `p ∈ [1, 20]`, `w ∈ [0, 10]` and `m` costs in `[0, 10]`.
pub fn random_instance(rng: &mut FuzzRng, n: usize, m: usize) -> Instance {
    let ps = (0..n).map(|_| rational_in(rng, 1, 20)).collect();
    let ws = (0..n).map(|_| rational_in(rng, 0, 10)).collect();
    let c = costs(rng, m);
    Instance::new(jobs_from(ps, ws), c).expect("generated data is valid")
}

/// Like [`random_instance`] with `p` ascending and `w` descending.
pub fn random_antithetical_instance(rng: &mut FuzzRng, n: usize, m: usize) -> Instance {
    let mut ps: Vec<Rational> = (0..n).map(|_| rational_in(rng, 1, 20)).collect();
    let mut ws: Vec<Rational> = (0..n).map(|_| rational_in(rng, 0, 10)).collect();
    ps.sort();
    ws.sort_by(|a, b| b.cmp(a));
    for k in 1..n {
        if ps[k] == ps[k - 1] {
            ws[k] = ws[k - 1].clone();
        }
    }
    let c = costs(rng, m);
    Instance::new(jobs_from(ps, ws), c).expect("generated data is valid")
}

fn fraction(rng: &mut FuzzRng, lo: i64, hi: i64, den: i64) -> Rational {
    Rational::from_ratio(rng.gen_range(lo..=hi), den)
}

/// Feasible schedule with scattered pieces and idle gaps. Machines are
/// numbered by decreasing busy time, so the cheapest machine is the busiest.
pub fn random_feasible_schedule(rng: &mut FuzzRng, instance: &Instance) -> Schedule {
    let (n, m) = (instance.n(), instance.m());
    let mut rows: Vec<Vec<(Rational, Rational, usize)>> = vec![Vec::new(); m];
    let mut completion = vec![Rational::from_int(0); n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let lowest = (12 / (m as i64 + 1)).max(1);
    for j in order {
        let p = instance.job(j).p.clone();
        let window = p.clone() * fraction(rng, lowest, 12, 12);
        let mut remaining = p.clone() - window.clone();
        let mut placed = Rational::from_int(0);
        for _ in 0..2 * m + 2 {
            if !remaining.is_pos() {
                break;
            }
            let i = rng.gen_range(0..m);
            let row = &mut rows[i];
            row.sort();
            let mut gaps = Vec::new();
            let mut cursor = Rational::from_int(0);
            for (s, e, _) in row.iter() {
                if cursor < *s && cursor < window {
                    gaps.push((cursor.clone(), Rational::min_of(s.clone(), window.clone())));
                }
                cursor = Rational::max_of(cursor, e.clone());
            }
            if cursor < window {
                gaps.push((cursor, window.clone()));
            }
            let Some((gs, ge)) = gaps.choose(rng).cloned() else { continue };
            let room = ge - gs.clone();
            let len = Rational::min_of(room.clone(), remaining.clone()) * fraction(rng, 1, 4, 4);
            let start = gs + (room - len.clone()) * fraction(rng, 0, 4, 4);
            row.push((start.clone(), start + len.clone(), j));
            remaining -= len.clone();
            placed += len;
        }
        completion[j] = p - placed;
    }
    let loads: Vec<Rational> =
        rows.iter().map(|row| row.iter().map(|(s, e, _)| e.clone() - s.clone()).sum()).collect();
    let mut by_load: Vec<usize> = (0..m).collect();
    by_load.sort_by(|&a, &b| loads[b].cmp(&loads[a]).then(a.cmp(&b)));
    let pieces = by_load
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| rows[i].iter().map(move |(s, e, j)| Piece::new(*j, k, s.clone(), e.clone())))
        .collect();
    Schedule::new(completion, pieces).expect("generated pieces are well-formed")
}

/// Sequential, processor-descending schedule over `n` jobs and `m` machines
/// with its instance: processing times are derived from the blocks and the
/// private completions. With `split`, some job runs in two segments
/// (requires `m ≥ 2`).
pub fn random_sequential(rng: &mut FuzzRng, n: usize, m: usize, split: bool) -> (Instance, SequentialSchedule<Rational>) {
    assert!(n >= 1 && m >= 1 && (!split || m >= 2));
    let max_segments = m.min(3);
    let count = if split { rng.gen_range(2..=max_segments) } else { rng.gen_range(1..=max_segments) };
    let mut widths: Vec<usize> = (1..=m).collect();
    widths.shuffle(rng);
    widths.truncate(count);
    widths.sort_by(|a, b| b.cmp(a));

    let mut segments: Vec<Vec<usize>> = Vec::new();
    for _ in 0..count {
        let mut jobs: Vec<usize> = (0..n).collect();
        jobs.shuffle(rng);
        jobs.truncate(rng.gen_range(1..=n.min(3)));
        segments.push(jobs);
    }
    if split {
        let repeated = (0..n).any(|j| segments.iter().filter(|s| s.contains(&j)).count() > 1);
        if !repeated {
            let j = segments[0][0];
            let last = segments.last_mut().expect("at least two segments");
            if !last.contains(&j) {
                last.push(j);
            }
        }
    }

    let mut blocks = Vec::new();
    let mut cursor = Rational::from_int(0);
    for (jobs, &width) in segments.iter().zip(&widths) {
        for &job in jobs {
            let d = [1, 2, 4][rng.gen_range(0..3)];
            let end = cursor.clone() + Rational::from_ratio(rng.gen_range(1..=8 * d), d);
            blocks.push(Block { job, width, start: cursor, end: end.clone() });
            cursor = end;
        }
    }

    let mut completion = vec![Rational::from_int(0); n];
    let mut shared = vec![Rational::from_int(0); n];
    for b in &blocks {
        shared[b.job] += b.len() * Rational::from_int(b.width as i64);
    }
    for (j, c) in completion.iter_mut().enumerate() {
        *c = match blocks.iter().rev().find(|b| b.job == j) {
            Some(b) if rng.gen_bool(1.0 / 3.0) => b.end.clone(),
            Some(b) => b.end.clone() + fraction(rng, 1, 16, 2),
            None => rational_in(rng, 1, 20),
        };
    }
    let ps = (0..n).map(|j| completion[j].clone() + shared[j].clone()).collect();
    let ws = (0..n).map(|_| rational_in(rng, 0, 10)).collect();
    let c = costs(rng, m);
    let instance = Instance::new(jobs_from(ps, ws), c).expect("generated data is valid");
    let seq = SequentialSchedule::new(blocks, completion).expect("generated blocks are sequential");
    (instance, seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use crate::structure::rightmost_split;

    #[test]
    fn same_seed_same_output() {
        let a = random_instance(&mut rng(7), 4, 3);
        let b = random_instance(&mut rng(7), 4, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn generated_schedules_are_feasible() {
        let mut r = rng(1);
        for _ in 0..50 {
            let inst = random_instance(&mut r, 4, 3);
            let s = random_feasible_schedule(&mut r, &inst);
            assert!(validate(&s, &inst).unwrap().is_empty());
        }
    }

    #[test]
    fn split_generator_produces_splits() {
        let mut r = rng(2);
        for _ in 0..50 {
            let (inst, s) = random_sequential(&mut r, 3, 3, true);
            assert!(rightmost_split(&s).is_some());
            assert!(validate(&s.to_schedule(), &inst).unwrap().is_empty());
        }
    }

    #[test]
    fn antithetical_generator_orders_data() {
        let inst = random_antithetical_instance(&mut rng(3), 5, 2);
        assert!(crate::lp::is_antithetical(&inst));
    }
}
