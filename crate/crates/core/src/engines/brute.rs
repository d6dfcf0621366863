//! Exhaustive enumeration of all `t^C(n,r)` distributions.

use std::time::Instant;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{budget_error, Coloring, EngineConfig, EngineId, EngineReport};
use crate::error::{Error, Result};
use crate::model::{binom_u64, enumerate_events, rank_rsubset, subsets, ProblemSpec, VertexSet};

const CHUNK: u64 = 1 << 12;

/// Ranks of every r-subset of `big`.
pub(crate) fn rsubset_ranks(big: &VertexSet, n: usize, r: usize) -> Vec<u32> {
    subsets(big.len(), r)
        .map(|local| {
            let actual = local
                .elements()
                .iter()
                .map(|&pos| big.elements()[pos as usize - 1])
                .collect();
            let s = VertexSet::new(actual).expect("subset of a sorted set is sorted");
            rank_rsubset(&s, n, r).expect("r-subset inside 1..=n") as u32
        })
        .collect()
}

struct Targets {
    /// Per box, the r-subset families of that box's events.
    by_box: Vec<Vec<FixedBitSet>>,
}

impl Targets {
    fn build(spec: &ProblemSpec, n: usize, width: usize) -> Self {
        let mut by_box = vec![Vec::new(); spec.t()];
        for event in enumerate_events(spec, n) {
            let mut family = FixedBitSet::with_capacity(width);
            for rank in rsubset_ranks(event.vertices(), n, spec.r()) {
                family.insert(rank as usize);
            }
            by_box[event.box_index() - 1].push(family);
        }
        Self { by_box }
    }

    fn holds(&self, boxes: &[FixedBitSet]) -> bool {
        self.by_box
            .iter()
            .zip(boxes)
            .any(|(families, held)| families.iter().any(|f| f.is_subset(held)))
    }
}

/// `(colorings with W, lowest index without W)` over `start..end`.
fn scan_chunk(
    targets: &Targets,
    t: usize,
    width: usize,
    start: u64,
    end: u64,
) -> (u64, Option<u64>) {
    let mut digits = vec![0usize; width];
    let mut boxes = vec![FixedBitSet::with_capacity(width); t];
    let mut rest = start;
    for (j, d) in digits.iter_mut().enumerate() {
        *d = (rest % t as u64) as usize;
        rest /= t as u64;
        boxes[*d].insert(j);
    }
    let mut hits = 0u64;
    let mut first_miss = None;
    let mut index = start;
    loop {
        if targets.holds(&boxes) {
            hits += 1;
        } else if first_miss.is_none() {
            first_miss = Some(index);
        }
        index += 1;
        if index >= end {
            break;
        }
        // Odometer step, rank 0 least significant.
        for (j, d) in digits.iter_mut().enumerate() {
            boxes[*d].set(j, false);
            *d += 1;
            if *d == t {
                *d = 0;
                boxes[0].insert(j);
            } else {
                boxes[*d].insert(j);
                break;
            }
        }
    }
    (hits, first_miss)
}

/// N(W) by checking every distribution.
pub fn brute_force_nw(spec: &ProblemSpec, n: usize, config: &EngineConfig) -> Result<EngineReport> {
    let started = Instant::now();
    let width = binom_u64(n as u64, spec.r() as u64).ok_or(Error::Overflow("C(n, r)"))?;
    let total = spec.total_distributions(n);
    let count = match total.to_u64() {
        Some(c) if c <= config.budget => c,
        _ => {
            return Err(budget_error(
                "brute",
                format!("{}^{width} = {total} colorings", spec.t()),
                config.budget,
            ))
        }
    };
    let width = width as usize;
    let targets = Targets::build(spec, n, width);
    let t = spec.t();
    let chunks = count.div_ceil(CHUNK);
    let (hits, first_miss) = config.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| scan_chunk(&targets, t, width, c * CHUNK, ((c + 1) * CHUNK).min(count)))
            .reduce(
                || (0, None),
                |(ha, ma), (hb, mb)| {
                    let miss = match (ma, mb) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    };
                    (ha + hb, miss)
                },
            )
    })?;
    Ok(EngineReport {
        engine: EngineId::Brute,
        n,
        n_w: BigUint::from(hits),
        total,
        elapsed: started.elapsed(),
        enumerated: count,
        max_k: None,
        per_k: Vec::new(),
        witness: first_miss.map(|i| Coloring::from_index(spec, n, i)),
    })
}
