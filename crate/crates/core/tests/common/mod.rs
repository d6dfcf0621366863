//! Independent reference computations shared by the integration tests.
//! Everything here works on plain bitmasks and avoids the library's
//! engines so it can serve as an oracle.

#![allow(dead_code)]

use ramsey_core::model::{enumerate_events, Event, EventTuple, ProblemSpec, VertexSet};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn spec(t: usize, r: usize, p: &[usize]) -> ProblemSpec {
    ProblemSpec::new(t, r, p.to_vec()).unwrap()
}

/// The oracle-scale instances: every `(spec, n)` the engines are checked on.
pub fn oracle_suite() -> Vec<(ProblemSpec, usize)> {
    let mut out = Vec::new();
    for n in 3..=5 {
        out.push((spec(2, 2, &[3, 3]), n));
    }
    for n in 1..=4 {
        out.push((spec(2, 1, &[2, 2]), n));
    }
    for n in 1..=5 {
        out.push((spec(2, 1, &[2, 3]), n));
    }
    for n in 1..=4 {
        out.push((spec(3, 1, &[2, 2, 2]), n));
    }
    for n in 1..=5 {
        out.push((spec(1, 2, &[3]), n));
    }
    out
}

/// All `size`-subsets of `0..n` as masks, any order.
pub fn masks_of_size(n: usize, size: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|m| m.count_ones() as usize == size).collect()
}

pub fn mask_to_set(mask: u64) -> VertexSet {
    let elements = (0..64u32).filter(|&b| mask & (1 << b) != 0).map(|b| b + 1).collect();
    VertexSet::new(elements).unwrap()
}

pub fn tuple_of(spec: &ProblemSpec, events: &[(usize, u64)]) -> EventTuple {
    let events = events
        .iter()
        .map(|&(b, m)| Event::new(spec, b, mask_to_set(m)).unwrap())
        .collect();
    EventTuple::from_unsorted(events).unwrap()
}

/// Cross-box pairs share fewer than `r` vertices.
pub fn compatible(spec: &ProblemSpec, events: &[(usize, u64)]) -> bool {
    events.iter().enumerate().all(|(i, &(a, x))| {
        events[i + 1..]
            .iter()
            .all(|&(b, y)| a == b || ((x & y).count_ones() as usize) < spec.r())
    })
}

/// Colorings of the r-subsets of `0..n` (boxes `0..t`) in which every
/// event's r-subsets all lie in the event's box.
pub fn colorings_satisfying(spec: &ProblemSpec, n: usize, events: &[(usize, u64)]) -> u64 {
    let rsets = masks_of_size(n, spec.r());
    let t = spec.t() as u64;
    let total = t.pow(rsets.len() as u32);
    // For each event the indices of the r-subsets it covers.
    let covered: Vec<(u8, Vec<usize>)> = events
        .iter()
        .map(|&(b, m)| {
            let idx = rsets.iter().enumerate().filter(|(_, &s)| s & m == s).map(|(i, _)| i).collect();
            ((b - 1) as u8, idx)
        })
        .collect();
    let mut colors = vec![0u8; rsets.len()];
    let mut count = 0;
    for mut code in 0..total {
        for c in colors.iter_mut() {
            *c = (code % t) as u8;
            code /= t;
        }
        if covered.iter().all(|(b, idx)| idx.iter().all(|&i| colors[i] == *b)) {
            count += 1;
        }
    }
    count
}

/// N(W) by direct enumeration of colorings.
pub fn nw_by_colorings(spec: &ProblemSpec, n: usize) -> u64 {
    let rsets = masks_of_size(n, spec.r());
    let t = spec.t() as u64;
    let total = t.pow(rsets.len() as u32);
    let targets: Vec<Vec<Vec<usize>>> = spec
        .p()
        .iter()
        .map(|&p| {
            masks_of_size(n, p)
                .into_iter()
                .map(|m| rsets.iter().enumerate().filter(|(_, &s)| s & m == s).map(|(i, _)| i).collect())
                .collect()
        })
        .collect();
    let mut colors = vec![0u8; rsets.len()];
    let mut count = 0;
    for mut code in 0..total {
        for c in colors.iter_mut() {
            *c = (code % t) as u8;
            code /= t;
        }
        let hit = targets.iter().enumerate().any(|(b, family)| {
            family.iter().any(|idx| idx.iter().all(|&i| colors[i] == b as u8))
        });
        if hit {
            count += 1;
        }
    }
    count
}

/// A random tuple of `k` distinct events.
pub fn random_tuple<R: Rng>(rng: &mut R, spec: &ProblemSpec, n: usize, k: usize) -> Option<Vec<(usize, u64)>> {
    let all: Vec<(usize, u64)> = enumerate_events(spec, n)
        .iter()
        .map(|e| (e.box_index(), e.vertices().mask()))
        .collect();
    if all.len() < k {
        return None;
    }
    Some(all.choose_multiple(rng, k).copied().collect())
}

/// Compatible unordered tuples of distinct events, counted per type, by
/// walking all combinations of up to `k_max` events.
pub fn count_tuples_by_type(spec: &ProblemSpec, n: usize, k_max: usize) -> std::collections::BTreeMap<Vec<usize>, u64> {
    let all: Vec<(usize, u64)> = enumerate_events(spec, n)
        .iter()
        .map(|e| (e.box_index(), e.vertices().mask()))
        .collect();
    let mut out = std::collections::BTreeMap::new();
    let mut chosen = Vec::new();
    fn walk(
        spec: &ProblemSpec,
        all: &[(usize, u64)],
        from: usize,
        k_max: usize,
        chosen: &mut Vec<(usize, u64)>,
        out: &mut std::collections::BTreeMap<Vec<usize>, u64>,
    ) {
        if !chosen.is_empty() {
            let mut counts = vec![0; spec.t()];
            for &(b, _) in chosen.iter() {
                counts[b - 1] += 1;
            }
            *out.entry(counts).or_insert(0) += 1;
        }
        if chosen.len() == k_max {
            return;
        }
        for i in from..all.len() {
            chosen.push(all[i]);
            if compatible(spec, chosen) {
                walk(spec, all, i + 1, k_max, chosen, out);
            }
            chosen.pop();
        }
    }
    walk(spec, &all, 0, k_max, &mut chosen, &mut out);
    out
}
