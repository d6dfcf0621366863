//! Bounds on the size of the largest compatible event tuple.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use super::{budget_error, EngineConfig};
use super::direct::{for_each_bit, CompatGraph};
use crate::error::{Error, Result};
use crate::model::{binom_u64, ProblemSpec};

/// `max_i [ C(n, P_i) + sum_{j != i} sum_{v < r} C(P_i, v) C(n - P_i, P_j - v) ]`:
/// every member of a compatible tuple containing a given `P_i`-event is
/// either another `P_i`-event or a `P_j`-event meeting it in fewer than `r`
/// vertices.
pub fn kmax_upper_bound(spec: &ProblemSpec, n: usize) -> Result<u128> {
    let b = |a: usize, k: usize| -> Result<u128> {
        binom_u64(a as u64, k as u64)
            .map(u128::from)
            .ok_or(Error::Overflow("k_max bound"))
    };
    let mut best = 0u128;
    for (i, &pi) in spec.p().iter().enumerate() {
        let mut bound = b(n, pi)?;
        for (j, &pj) in spec.p().iter().enumerate() {
            if j == i {
                continue;
            }
            for v in 0..spec.r() {
                if v > pj || pi > n {
                    continue;
                }
                bound += b(pi, v)? * b(n - pi, pj - v)?;
            }
        }
        best = best.max(bound);
    }
    Ok(best)
}

/// The largest compatible tuple, by branch and bound over the
/// compatibility graph. The config's budget caps the search nodes.
pub fn max_compatible_tuple_size(spec: &ProblemSpec, n: usize, config: &EngineConfig) -> Result<usize> {
    let budget = config.budget;
    if n > 64 {
        return Err(Error::TooLarge(format!("n = {n} exceeds 64 vertices")));
    }
    let (graph, _) = CompatGraph::build(spec, n);
    if graph.len == 0 {
        return Ok(0);
    }
    // Same-box events are always compatible, so every box alone is a
    // compatible tuple.
    let floor = spec
        .p()
        .iter()
        .map(|&pi| binom_u64(n as u64, pi as u64).unwrap_or(0) as usize)
        .max()
        .unwrap_or(0);
    let nodes = AtomicU64::new(0);
    let abort = AtomicBool::new(false);

    struct Search<'a> {
        graph: &'a CompatGraph,
        best: usize,
        nodes: &'a AtomicU64,
        abort: &'a AtomicBool,
        budget: u64,
    }

    impl Search<'_> {
        fn grow(&mut self, size: usize, candidates: Vec<u64>) {
            if self.abort.load(Ordering::Relaxed) {
                return;
            }
            if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
                self.abort.store(true, Ordering::Relaxed);
                return;
            }
            self.best = self.best.max(size);
            let mut members = Vec::new();
            for_each_bit(&candidates, |b| members.push(b));
            for (idx, &b) in members.iter().enumerate() {
                if size + members.len() - idx <= self.best {
                    return;
                }
                let next: Vec<u64> = candidates
                    .iter()
                    .zip(self.graph.row(b))
                    .map(|(c, r)| c & r)
                    .collect();
                self.grow(size + 1, next);
            }
        }
    }

    let best = config.install(|| {
        (0..graph.len)
        .into_par_iter()
        .map(|first| {
            let mut search = Search {
                graph: &graph,
                best: floor.saturating_sub(1),
                nodes: &nodes,
                abort: &abort,
                budget,
            };
            search.grow(1, graph.row(first).to_vec());
            search.best
        })
        .max()
        .unwrap_or(0)
    })?
    .max(floor);
    if abort.load(Ordering::Relaxed) {
        return Err(budget_error(
            "kmax",
            format!("more than {budget} search nodes"),
            budget,
        ));
    }
    Ok(best)
}
