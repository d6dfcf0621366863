//! Problem instances, vertex subsets, events and their canonical order.
//!
//! Vertices are the integers `1..=n`. Subsets are ordered lexicographically
//! on their sorted element lists; events are ordered by box first and then
//! by vertex set; event tuples are ordered by length first and then
//! elementwise. Every enumeration in the crate follows these orders.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A Ramsey instance: `t` boxes, `r`-subsets being distributed, and the
/// target subset sizes `P_1 <= ... <= P_t` (all at least `r`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    t: usize,
    r: usize,
    p: Vec<usize>,
}

impl ProblemSpec {
    pub fn new(t: usize, r: usize, p: Vec<usize>) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidSpec("t must be at least 1".into()));
        }
        if r == 0 {
            return Err(Error::InvalidSpec("r must be at least 1".into()));
        }
        if p.len() != t {
            return Err(Error::InvalidSpec(format!(
                "expected {t} subset sizes, got {}",
                p.len()
            )));
        }
        if p.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSpec(format!(
                "subset sizes must be nondecreasing, got {p:?}"
            )));
        }
        if p[0] < r {
            return Err(Error::InvalidSpec(format!(
                "smallest subset size {} is below r = {r}",
                p[0]
            )));
        }
        Ok(Self { t, r, p })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn p(&self) -> &[usize] {
        &self.p
    }

    /// Target size of box `i` (1-based).
    pub fn p_of(&self, box_index: usize) -> usize {
        self.p[box_index - 1]
    }

    /// `t^C(n,r)`, the number of distributions.
    pub fn total_distributions(&self, n: usize) -> BigUint {
        let exponent = binom_u64(n as u64, self.r as u64)
            .expect("C(n, r) exceeds u64; instance far beyond enumerable scale");
        num_traits::pow::pow(BigUint::from(self.t), exponent as usize)
    }

    /// `S_n = sum_i C(n, P_i)`, the number of events.
    pub fn event_count(&self, n: usize) -> BigUint {
        self.p.iter().map(|&pi| binom(n as u64, pi as i64)).sum()
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.p.iter().map(|x| x.to_string()).collect();
        write!(f, "R({};{}) with t={}", p.join(","), self.r, self.t)
    }
}

/// `C(n, k)` as an exact integer; zero when `k < 0` or `k > n`.
pub fn binom(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` in machine arithmetic; `None` on overflow.
pub fn binom_u64(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// A strictly increasing list of vertices drawn from `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<u32>);

impl VertexSet {
    pub fn new(elements: Vec<u32>) -> Result<Self> {
        if elements.first() == Some(&0) {
            return Err(Error::InvalidArgument("vertices start at 1".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "vertex list must be strictly increasing, got {elements:?}"
            )));
        }
        Ok(Self(elements))
    }

    /// Builds a set from arbitrary distinct vertices, sorting them.
    pub fn from_unsorted(mut elements: Vec<u32>) -> Result<Self> {
        elements.sort_unstable();
        Self::new(elements)
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_element(&self) -> u32 {
        self.0.last().copied().unwrap_or(0)
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Bit `v - 1` set for every vertex `v`. Requires all vertices `<= 64`.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &v| m | (1u64 << (v - 1)))
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Subsets {
    Subsets {
        n: n as u32,
        current: if k <= n {
            Some((1..=k as u32).collect())
        } else {
            None
        },
    }
}

pub struct Subsets {
    n: u32,
    current: Option<Vec<u32>>,
}

impl Iterator for Subsets {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        let current = self.current.take()?;
        let k = current.len();
        let mut next = current.clone();
        // Rightmost position that can still be advanced.
        let mut i = k;
        while i > 0 && next[i - 1] == self.n - (k - i) as u32 {
            i -= 1;
        }
        if i > 0 {
            next[i - 1] += 1;
            for j in i..k {
                next[j] = next[j - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(VertexSet(current))
    }
}

/// Position of `s` among the `C(n, r)` r-subsets in lexicographic order.
pub fn rank_rsubset(s: &VertexSet, n: usize, r: usize) -> Result<u64> {
    if s.len() != r {
        return Err(Error::InvalidArgument(format!(
            "expected an {r}-subset, got {s}"
        )));
    }
    if s.max_element() as usize > n {
        return Err(Error::InvalidArgument(format!("{s} is not inside 1..={n}")));
    }
    let overflow = || Error::Overflow("r-subset rank");
    let mut rank = 0u64;
    let mut prev = 0u32;
    for (i, &v) in s.elements().iter().enumerate() {
        for skipped in prev + 1..v {
            let block = binom_u64((n - skipped as usize) as u64, (r - i - 1) as u64)
                .ok_or_else(overflow)?;
            rank = rank.checked_add(block).ok_or_else(overflow)?;
        }
        prev = v;
    }
    Ok(rank)
}

/// Inverse of [`rank_rsubset`].
pub fn unrank_rsubset(index: u64, n: usize, r: usize) -> Result<VertexSet> {
    let bound = binom_u64(n as u64, r as u64).ok_or(Error::Overflow("r-subset count"))?;
    if index >= bound {
        return Err(Error::RankOutOfRange { index, bound });
    }
    let mut rest = index;
    let mut out = Vec::with_capacity(r);
    let mut v = 1u32;
    for i in 0..r {
        loop {
            let block = binom_u64((n - v as usize) as u64, (r - i - 1) as u64)
                .ok_or(Error::Overflow("r-subset rank"))?;
            if rest < block {
                out.push(v);
                v += 1;
                break;
            }
            rest -= block;
            v += 1;
        }
    }
    Ok(VertexSet(out))
}

/// The event "every r-subset of `vertices` lies in box `box_index`".
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    // Field order matters: the derived order compares the box first.
    box_index: usize,
    vertices: VertexSet,
}

impl Event {
    pub fn new(spec: &ProblemSpec, box_index: usize, vertices: VertexSet) -> Result<Self> {
        if box_index == 0 || box_index > spec.t() {
            return Err(Error::InvalidArgument(format!(
                "box {box_index} outside 1..={}",
                spec.t()
            )));
        }
        if vertices.len() != spec.p_of(box_index) {
            return Err(Error::InvalidArgument(format!(
                "box {box_index} needs a {}-subset, got {vertices}",
                spec.p_of(box_index)
            )));
        }
        Ok(Self {
            box_index,
            vertices,
        })
    }

    pub fn box_index(&self) -> usize {
        self.box_index
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@box{}", self.vertices, self.box_index)
    }
}

pub fn compare_events(a: &Event, b: &Event) -> Ordering {
    a.cmp(b)
}

/// `k >= 1` distinct events held in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventTuple(Vec<Event>);

impl EventTuple {
    /// Requires the events to be strictly increasing already.
    pub fn new(events: Vec<Event>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::InvalidArgument("event tuple must be nonempty".into()));
        }
        if events.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "events must be distinct and strictly increasing".into(),
            ));
        }
        Ok(Self(events))
    }

    /// Sorts the events; duplicates are rejected.
    pub fn from_unsorted(mut events: Vec<Event>) -> Result<Self> {
        events.sort();
        Self::new(events)
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex_sets(&self) -> Vec<VertexSet> {
        self.0.iter().map(|e| e.vertices.clone()).collect()
    }
}

impl Ord for EventTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for EventTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn compare_tuples(a: &EventTuple, b: &EventTuple) -> Ordering {
    a.cmp(b)
}

/// All `S_n` events in increasing order: box 1's subsets first, each box's
/// subsets in lexicographic order.
pub fn enumerate_events(spec: &ProblemSpec, n: usize) -> Vec<Event> {
    (1..=spec.t())
        .flat_map(|i| {
            subsets(n, spec.p_of(i)).map(move |vertices| Event {
                box_index: i,
                vertices,
            })
        })
        .collect()
}
