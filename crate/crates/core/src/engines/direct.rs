//! Inclusion-exclusion over every compatible event tuple.
//!
//! Tuples are grown in canonical order: a tuple is only extended by events
//! greater than its last member that are compatible with every member, so
//! incompatible branches are never entered. Each tuple's value is
//! `t^(C(n,r) - U)` with `U` the size of the union of its members' r-subset
//! families, maintained incrementally through per-r-subset cover counts.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;

use super::brute::rsubset_ranks;
use super::{budget_error, fold_terms, signed_total, EngineConfig, EngineId, EngineReport};
use crate::error::{Error, Result};
use crate::model::{binom_u64, enumerate_events, ProblemSpec};

const FLUSH_EVERY: u64 = 1 << 10;

/// Pairwise compatibility as bit rows: bit `b` of row `a` is set when
/// `b > a` and events `a`, `b` may hold together.
pub(crate) struct CompatGraph {
    pub(crate) words: usize,
    pub(crate) rows: Vec<u64>,
    pub(crate) len: usize,
}

impl CompatGraph {
    pub(crate) fn build(spec: &ProblemSpec, n: usize) -> (Self, Vec<Vec<u32>>) {
        let events = enumerate_events(spec, n);
        let families: Vec<Vec<u32>> = events
            .iter()
            .map(|e| rsubset_ranks(e.vertices(), n, spec.r()))
            .collect();
        let masks: Vec<u64> = events.iter().map(|e| e.vertices().mask()).collect();
        let len = events.len();
        let words = len.div_ceil(64).max(1);
        let mut rows = vec![0u64; len * words];
        for a in 0..len {
            for b in a + 1..len {
                let ok = events[a].box_index() == events[b].box_index()
                    || ((masks[a] & masks[b]).count_ones() as usize) < spec.r();
                if ok {
                    rows[a * words + b / 64] |= 1 << (b % 64);
                }
            }
        }
        (Self { words, rows, len }, families)
    }

    pub(crate) fn row(&self, a: usize) -> &[u64] {
        &self.rows[a * self.words..(a + 1) * self.words]
    }
}

pub(crate) fn for_each_bit(words: &[u64], mut f: impl FnMut(usize)) {
    for (w, &word) in words.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            f(w * 64 + bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
    }
}

/// Tuple counts indexed by `[k - 1][C(n,r) - U]`.
struct Tally {
    counts: Vec<Vec<u64>>,
    max_k: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            counts: Vec::new(),
            max_k: 0,
        }
    }

    fn record(&mut self, k: usize, free: usize, width: usize) {
        if self.counts.len() < k {
            self.counts.resize_with(k, || vec![0; width + 1]);
        }
        self.counts[k - 1][free] += 1;
        self.max_k = self.max_k.max(k);
    }

    fn merge(mut self, other: Tally) -> Tally {
        if self.counts.len() < other.counts.len() {
            return other.merge(self);
        }
        for (mine, theirs) in self.counts.iter_mut().zip(other.counts) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += b;
            }
        }
        self.max_k = self.max_k.max(other.max_k);
        self
    }
}

struct Walker<'a> {
    graph: &'a CompatGraph,
    families: &'a [Vec<u32>],
    width: usize,
    limit: usize,
    cover: Vec<u32>,
    union: usize,
    scratch: Vec<u64>,
    tally: Tally,
    local: u64,
    counter: &'a AtomicU64,
    abort: &'a AtomicBool,
    budget: u64,
}

impl Walker<'_> {
    fn add(&mut self, e: usize) {
        for &rank in &self.families[e] {
            let c = &mut self.cover[rank as usize];
            if *c == 0 {
                self.union += 1;
            }
            *c += 1;
        }
    }

    fn remove(&mut self, e: usize) {
        for &rank in &self.families[e] {
            let c = &mut self.cover[rank as usize];
            *c -= 1;
            if *c == 0 {
                self.union -= 1;
            }
        }
    }

    fn visit(&mut self, k: usize) -> bool {
        self.tally.record(k, self.width - self.union, self.width);
        self.local += 1;
        if self.local == FLUSH_EVERY {
            let seen = self.counter.fetch_add(self.local, Ordering::Relaxed) + self.local;
            self.local = 0;
            if seen > self.budget {
                self.abort.store(true, Ordering::Relaxed);
            }
        }
        !self.abort.load(Ordering::Relaxed)
    }

    /// Visits `tuple + e` and every extension of it. `depth` levels of
    /// `scratch` are in use by the caller.
    fn descend(&mut self, e: usize, k: usize, candidates_at: usize) -> bool {
        self.add(e);
        let mut alive = self.visit(k);
        if alive && k < self.limit {
            let w = self.graph.words;
            let next_at = candidates_at + w;
            if self.scratch.len() < next_at + w {
                self.scratch.resize(next_at + w, 0);
            }
            let mut any = false;
            for i in 0..w {
                let bits = self.scratch[candidates_at + i] & self.graph.row(e)[i];
                self.scratch[next_at + i] = bits;
                any |= bits != 0;
            }
            if any {
                let mut members = Vec::new();
                for_each_bit(&self.scratch[next_at..next_at + w], |b| members.push(b));
                for b in members {
                    // Each member sees only candidates after itself.
                    if !self.descend(b, k + 1, next_at) {
                        alive = false;
                        break;
                    }
                }
            }
        }
        self.remove(e);
        alive
    }
}

/// N(W) as the signed sum of tuple values over all compatible tuples.
pub fn direct_ie_nw(spec: &ProblemSpec, n: usize, config: &EngineConfig) -> Result<EngineReport> {
    let started = Instant::now();
    if n > 64 {
        return Err(Error::TooLarge(format!("n = {n} exceeds 64 vertices")));
    }
    let width = binom_u64(n as u64, spec.r() as u64).ok_or(Error::Overflow("C(n, r)"))? as usize;
    let total = spec.total_distributions(n);
    let events = spec.event_count(n);
    if events > BigUint::from(config.budget) {
        return Err(budget_error("direct", format!("at least {events} tuples"), config.budget));
    }
    let (graph, families) = CompatGraph::build(spec, n);
    let limit = config.k_cutoff.unwrap_or(usize::MAX);
    let counter = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let budget = config.budget;

    let tally = if limit == 0 {
        Tally::new()
    } else {
        config.install(|| {
            (0..graph.len)
                .into_par_iter()
                .map(|first| {
                    let mut walker = Walker {
                        graph: &graph,
                        families: &families,
                        width,
                        limit,
                        cover: vec![0; width],
                        union: 0,
                        // Level 0 admits every event; `descend` masks it
                        // with the first event's row.
                        scratch: vec![u64::MAX; graph.words],
                        tally: Tally::new(),
                        local: 0,
                        counter: &counter,
                        abort: &abort,
                        budget,
                    };
                    walker.descend(first, 1, 0);
                    let seen = counter.fetch_add(walker.local, Ordering::Relaxed) + walker.local;
                    if seen > budget {
                        abort.store(true, Ordering::Relaxed);
                    }
                    walker.tally
                })
                .reduce(Tally::new, Tally::merge)
        })?
    };
    let enumerated = counter.load(Ordering::Relaxed);
    if abort.load(Ordering::Relaxed) || enumerated > budget {
        return Err(budget_error(
            "direct",
            format!("more than {budget} tuples"),
            budget,
        ));
    }

    let counts: Vec<Vec<BigUint>> = tally
        .counts
        .iter()
        .map(|row| row.iter().map(|&c| BigUint::from(c)).collect())
        .collect();
    let per_k = fold_terms(spec.t(), &counts);
    let n_w = signed_total(&per_k)?;
    Ok(EngineReport {
        engine: EngineId::Direct,
        n,
        n_w,
        total,
        elapsed: started.elapsed(),
        enumerated,
        max_k: Some(tally.max_k),
        per_k,
        witness: None,
    })
}
