//! Max-profit flow by successive shortest augmenting paths.
//!
//! Profits are negated into costs; each round finds a cheapest residual
//! `s`–`t` path with Bellman–Ford and augments along it while that path
//! still earns a positive profit.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::num::{display, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowArc<T> {
    pub tail: usize,
    pub head: usize,
    /// `None` is unbounded.
    pub capacity: Option<T>,
    /// Payoff per unit of flow.
    pub profit: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork<T> {
    pub node_names: Vec<String>,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<FlowArc<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution<T> {
    /// Flow on each arc, in network order.
    pub flows: Vec<T>,
    pub profit: T,
    pub augmentations: usize,
}

impl<T: Scalar> FlowNetwork<T> {
    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arc list: `node_count arc_count`, then `tail head capacity cost` per
    /// arc, with cost the negated profit and `inf` for unbounded capacity.
    pub fn to_dimacs_like(&self) -> String {
        let mut out = format!("{} {}\n", self.node_count(), self.arc_count());
        for a in &self.arcs {
            let cap = a.capacity.as_ref().map_or_else(|| "inf".to_string(), display);
            let _ = writeln!(out, "{} {} {} {}", a.tail, a.head, cap, display(&(-a.profit.clone())));
        }
        out
    }

    /// Flow conservation at inner nodes and `0 ≤ f ≤ capacity` on arcs.
    pub fn check_flow(&self, flows: &[T]) -> Result<()> {
        let mut balance = vec![T::zero(); self.node_count()];
        for (a, f) in self.arcs.iter().zip(flows) {
            if f.is_neg() || a.capacity.as_ref().is_some_and(|c| c.lt_tol(f)) {
                return Err(Error::Invariant(format!(
                    "flow {} on arc {}→{} is outside its capacity",
                    display(f),
                    a.tail,
                    a.head
                )));
            }
            balance[a.tail] = balance[a.tail].clone() - f.clone();
            balance[a.head] = balance[a.head].clone() + f.clone();
        }
        for (v, b) in balance.iter().enumerate() {
            if v != self.source && v != self.sink && !b.near_zero() {
                return Err(Error::Invariant(format!("flow is not conserved at {}", self.node_names[v])));
            }
        }
        Ok(())
    }
}

struct Residual {
    arc: usize,
    forward: bool,
}

/// Flow of maximum total profit (any flow value). Requires every `s`–`t`
/// path to cross a finite-capacity arc.
pub fn solve_max_profit_flow<T: Scalar>(network: &FlowNetwork<T>) -> Result<FlowSolution<T>> {
    let nodes = network.node_count();
    let mut flows = vec![T::zero(); network.arcs.len()];
    let mut augmentations = 0;
    loop {
        // cheapest residual path from the source
        let mut dist: Vec<Option<T>> = vec![None; nodes];
        let mut pred: Vec<Option<Residual>> = (0..nodes).map(|_| None).collect();
        dist[network.source] = Some(T::zero());
        for _ in 0..nodes {
            let mut changed = false;
            for (idx, a) in network.arcs.iter().enumerate() {
                let f = &flows[idx];
                let can_push = a.capacity.as_ref().is_none_or(|c| f.lt_tol(c));
                let can_pull = f.is_pos();
                for (forward, allowed, from, to, cost) in [
                    (true, can_push, a.tail, a.head, -a.profit.clone()),
                    (false, can_pull, a.head, a.tail, a.profit.clone()),
                ] {
                    if !allowed {
                        continue;
                    }
                    let Some(df) = dist[from].clone() else { continue };
                    let candidate = df + cost;
                    if dist[to].as_ref().is_none_or(|d| candidate.lt_tol(d)) {
                        dist[to] = Some(candidate);
                        pred[to] = Some(Residual { arc: idx, forward });
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let Some(cost) = dist[network.sink].clone() else { break };
        if !cost.is_neg() {
            break;
        }
        let mut path = Vec::new();
        let mut v = network.sink;
        while v != network.source {
            let r = pred[v].as_ref().expect("reached nodes have predecessors");
            let a = &network.arcs[r.arc];
            path.push((r.arc, r.forward));
            v = if r.forward { a.tail } else { a.head };
            if path.len() > network.arcs.len() {
                return Err(Error::Invariant("negative residual cycle in flow network".into()));
            }
        }
        let mut bottleneck: Option<T> = None;
        for &(idx, forward) in &path {
            let room = if forward {
                network.arcs[idx].capacity.as_ref().map(|c| c.clone() - flows[idx].clone())
            } else {
                Some(flows[idx].clone())
            };
            if let Some(room) = room {
                bottleneck = Some(match bottleneck {
                    None => room,
                    Some(b) => T::min_of(b, room),
                });
            }
        }
        let Some(delta) = bottleneck else {
            return Err(Error::Invariant("augmenting path of unbounded capacity".into()));
        };
        for &(idx, forward) in &path {
            let f = if forward { flows[idx].clone() + delta.clone() } else { flows[idx].clone() - delta.clone() };
            flows[idx] = if T::EXACT { f } else { f.snap() };
        }
        augmentations += 1;
    }
    let profit = network.arcs.iter().zip(&flows).map(|(a, f)| a.profit.clone() * f.clone()).sum();
    Ok(FlowSolution { flows, profit, augmentations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{q, qr};
    use crate::num::Rational;

    fn arc(tail: usize, head: usize, cap: Option<i64>, profit: i64) -> FlowArc<Rational> {
        FlowArc { tail, head, capacity: cap.map(q), profit: q(profit) }
    }

    #[test]
    fn picks_profitable_routes_only() {
        // s=0, a=1, b=2, t=3
        let net = FlowNetwork {
            node_names: vec!["s".into(), "a".into(), "b".into(), "t".into()],
            source: 0,
            sink: 3,
            arcs: vec![arc(0, 1, Some(3), 0), arc(0, 2, Some(5), 0), arc(1, 3, None, 2), arc(2, 3, None, -1)],
        };
        let sol = solve_max_profit_flow(&net).unwrap();
        assert_eq!(sol.flows, vec![q(3), q(0), q(3), q(0)]);
        assert_eq!(sol.profit, q(6));
        net.check_flow(&sol.flows).unwrap();
    }

    #[test]
    fn rerouting_through_reverse_arcs() {
        // Two sources compete for one bottleneck; the better one must win.
        let net = FlowNetwork {
            node_names: (0..5).map(|i| i.to_string()).collect(),
            source: 0,
            sink: 4,
            arcs: vec![
                arc(0, 1, Some(2), 0),
                arc(0, 2, Some(2), 0),
                arc(1, 3, None, 1),
                arc(2, 3, None, 3),
                FlowArc { tail: 3, head: 4, capacity: Some(qr(5, 2)), profit: q(0) },
            ],
        };
        let sol = solve_max_profit_flow(&net).unwrap();
        assert_eq!(sol.profit, q(6) + qr(1, 2));
        assert_eq!(sol.flows[1], q(2));
        assert_eq!(sol.flows[0], qr(1, 2));
    }

    #[test]
    fn dump_format() {
        let net = FlowNetwork {
            node_names: vec!["s".into(), "t".into()],
            source: 0,
            sink: 1,
            arcs: vec![FlowArc { tail: 0, head: 1, capacity: Some(qr(9, 2)), profit: q(2) }, arc(0, 1, None, 0)],
        };
        assert_eq!(net.to_dimacs_like(), "2 2\n0 1 9/2 -2\n0 1 inf 0\n");
    }
}
