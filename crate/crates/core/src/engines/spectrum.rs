//! Inclusion-exclusion grouped by tuple type and Venn spectrum.
//!
//! For a type `(k_1, ..., k_t)` the `k` positions are laid out box by box.
//! An assignment of every vertex to a Venn part determines an ordered list
//! of sets; `n! / prod Q_B!` assignments share one spectrum. Summing that
//! frequency over all admissible spectra of a type counts each unordered
//! tuple `k_1! ... k_t!` times (once per reordering within each box), so
//! each type's aggregate is divided by that product.
//!
//! Spectra are generated set by set. The vertices are kept as classes of
//! equal membership label; a new set chooses how many vertices of each
//! class it takes, which splits the classes and extends the spectrum by one
//! digit. Different choices give different spectra, so every admissible
//! spectrum is produced exactly once, and a spectrum of `m` sets is the
//! parent of its `m + 1`-set extensions. One walk therefore covers every
//! type: a node holding `k_1` box-1 sets, ..., `k_i` box-i sets is the
//! spectrum of type `(k_1, ..., k_i, 0, ..., 0)`.
//!
//! A new set must have its box's size, share at most `r - 1` vertices with
//! every set of another box, and differ from every set of its own box.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use super::{
    budget_error, fold_terms, kmax_upper_bound, signed_total, EngineConfig, EngineId,
    EngineReport,
};
use crate::error::{Error, Result};
use crate::model::{binom_u64, ProblemSpec};
use crate::venn::{TupleType, VennSpectrum};

/// Largest `n` whose factorial fits the frequency arithmetic.
const MAX_N: usize = 33;
/// Largest `k` whose labels fit a machine word.
const MAX_K: usize = 64;
const FLUSH_EVERY: u64 = 1 << 10;
/// Nodes expanded serially before the walk fans out across workers.
const FRONTIER: usize = 256;

/// Per-type totals from the spectrum walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeAggregate {
    pub ty: TupleType,
    /// Admissible spectra found.
    pub spectra: u64,
    /// Sum of `n! / prod Q_B!` over those spectra.
    pub frequency_sum: BigUint,
    /// `frequency_sum / prod k_i!`: compatible unordered tuples of this type.
    pub tuples: BigUint,
    /// Tuple counts by free exponent `C(n,r) - U`.
    pub by_free: Vec<BigUint>,
}

/// Vertices sharing one membership label. Bit `l` of `label` is set when
/// the class lies inside set `l` (0-based position).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Class {
    size: usize,
    label: u64,
}

#[derive(Debug, Clone)]
struct Node {
    classes: Vec<Class>,
    /// Box (1-based) of each set, in position order.
    row_box: Vec<usize>,
    counts: Vec<usize>,
}

impl Node {
    fn root(t: usize, n: usize) -> Self {
        let classes = if n == 0 {
            Vec::new()
        } else {
            vec![Class { size: n, label: 0 }]
        };
        Self {
            classes,
            row_box: Vec::new(),
            counts: vec![0; t],
        }
    }

    fn k(&self) -> usize {
        self.row_box.len()
    }

    fn last_box(&self) -> usize {
        self.row_box.last().copied().unwrap_or(1)
    }

    /// The Venn spectrum in the canonical label layout: set `l` is digit
    /// `l + 1`, stored at bit `k - 1 - l`.
    fn spectrum(&self) -> Result<VennSpectrum> {
        let k = self.k();
        let labels = self.classes.iter().flat_map(|c| {
            let label = (0..k)
                .filter(|&l| c.label & (1 << l) != 0)
                .fold(0usize, |acc, l| acc | 1 << (k - 1 - l));
            std::iter::repeat_n(label, c.size)
        });
        VennSpectrum::from_labels(k, labels)
    }
}

struct Context {
    n: usize,
    r: usize,
    p: Vec<usize>,
    width: usize,
    k_cap: usize,
    factorial: Vec<u128>,
    binom_r: Vec<u64>,
    /// Restrict the walk to one type's chain of prefixes.
    target: Option<Vec<usize>>,
}

impl Context {
    fn new(spec: &ProblemSpec, n: usize, k_cap: usize, target: Option<Vec<usize>>) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::TooLarge(format!(
                "n = {n} exceeds {MAX_N} for the spectrum engine"
            )));
        }
        let mut factorial = vec![1u128; n + 1];
        for i in 1..=n {
            factorial[i] = factorial[i - 1] * i as u128;
        }
        let binom_r = (0..=n as u64)
            .map(|c| binom_u64(c, spec.r() as u64).expect("n <= 33"))
            .collect();
        Ok(Self {
            n,
            r: spec.r(),
            p: spec.p().to_vec(),
            width: binom_u64(n as u64, spec.r() as u64).expect("n <= 33") as usize,
            k_cap: k_cap.min(MAX_K),
            factorial,
            binom_r,
            target,
        })
    }

    /// `n! / prod_B Q_B!`.
    fn frequency(&self, node: &Node) -> u128 {
        node.classes
            .iter()
            .fold(self.factorial[self.n], |acc, c| acc / self.factorial[c.size])
    }

    /// `C(n,r) - U`, with `U` the number of r-subsets some event claims:
    /// the sum over boxes of each box's union, each expanded by
    /// inclusion-exclusion over intersections read off the spectrum.
    fn free_exponent(&self, node: &Node) -> usize {
        // Lay the classes out as consecutive vertex blocks so that an
        // intersection's size is a popcount.
        let mut row_vertices = vec![0u64; node.k()];
        let mut offset = 0;
        for c in &node.classes {
            let block = if c.size == 64 { u64::MAX } else { ((1u64 << c.size) - 1) << offset };
            for (l, rv) in row_vertices.iter_mut().enumerate() {
                if c.label & (1 << l) != 0 {
                    *rv |= block;
                }
            }
            offset += c.size;
        }
        let mut covered = 0i64;
        let mut start = 0;
        for &count in &node.counts {
            covered += self.union_size(&row_vertices[start..start + count]);
            start += count;
        }
        (self.width as i64 - covered) as usize
    }

    fn union_size(&self, rows: &[u64]) -> i64 {
        fn walk(ctx: &Context, rows: &[u64], from: usize, common: u64, odd: bool) -> i64 {
            let mut total = 0;
            for i in from..rows.len() {
                let meet = common & rows[i];
                let size = meet.count_ones() as usize;
                // Intersections only shrink from here.
                if size < ctx.r {
                    continue;
                }
                let term = ctx.binom_r[size] as i64;
                total += if odd { term } else { -term };
                total += walk(ctx, rows, i + 1, meet, !odd);
            }
            total
        }
        walk(self, rows, 0, u64::MAX, true)
    }

    /// Boxes a child's new set may belong to.
    fn next_boxes(&self, node: &Node) -> Vec<usize> {
        if node.k() >= self.k_cap {
            return Vec::new();
        }
        let t = self.p.len();
        let last = node.last_box();
        match &self.target {
            None => (last..=t).collect(),
            Some(target) => {
                // Fill boxes in order: stay while the current box is short.
                let next = (last..=t).find(|&b| node.counts[b - 1] < target[b - 1]);
                next.into_iter().collect()
            }
        }
    }

    /// All admissible extensions of `node` by one set in box `b`.
    fn children(&self, node: &Node, b: usize, out: &mut Vec<Node>) {
        let size = self.p[b - 1];
        let classes = &node.classes;
        let mut suffix = vec![0usize; classes.len() + 1];
        for i in (0..classes.len()).rev() {
            suffix[i] = suffix[i + 1] + classes[i].size;
        }
        let cross: Vec<usize> = (0..node.k()).filter(|&l| node.row_box[l] != b).collect();
        let same: Vec<usize> = (0..node.k()).filter(|&l| node.row_box[l] == b).collect();
        let mut take = vec![0usize; classes.len()];
        let mut overlap = vec![0usize; cross.len()];
        self.compose(node, b, size, 0, &suffix, &cross, &same, &mut take, &mut overlap, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn compose(
        &self,
        node: &Node,
        b: usize,
        left: usize,
        i: usize,
        suffix: &[usize],
        cross: &[usize],
        same: &[usize],
        take: &mut [usize],
        overlap: &mut [usize],
        out: &mut Vec<Node>,
    ) {
        if i == node.classes.len() {
            if left == 0 && self.distinct(node, same, take) {
                out.push(self.split(node, b, take));
            }
            return;
        }
        let class = node.classes[i];
        let rest = suffix[i + 1];
        let lo = left.saturating_sub(rest);
        let hi = left.min(class.size);
        // Room left under each cross-box set containing this class.
        let mut cap = hi;
        for (j, &l) in cross.iter().enumerate() {
            if class.label & (1 << l) != 0 {
                cap = cap.min((self.r - 1).saturating_sub(overlap[j]));
            }
        }
        if lo > cap {
            return;
        }
        for c in lo..=cap {
            take[i] = c;
            for (j, &l) in cross.iter().enumerate() {
                if class.label & (1 << l) != 0 {
                    overlap[j] += c;
                }
            }
            self.compose(node, b, left - c, i + 1, suffix, cross, same, take, overlap, out);
            for (j, &l) in cross.iter().enumerate() {
                if class.label & (1 << l) != 0 {
                    overlap[j] -= c;
                }
            }
        }
        take[i] = 0;
    }

    /// The new set differs from every earlier set of its box.
    fn distinct(&self, node: &Node, same: &[usize], take: &[usize]) -> bool {
        same.iter().all(|&l| {
            node.classes.iter().zip(take).any(|(c, &x)| {
                let inside = c.label & (1 << l) != 0;
                x != if inside { c.size } else { 0 }
            })
        })
    }

    fn split(&self, node: &Node, b: usize, take: &[usize]) -> Node {
        let bit = 1u64 << node.k();
        let mut classes = Vec::with_capacity(node.classes.len() * 2);
        for (c, &x) in node.classes.iter().zip(take) {
            if x > 0 {
                classes.push(Class {
                    size: x,
                    label: c.label | bit,
                });
            }
            if c.size > x {
                classes.push(Class {
                    size: c.size - x,
                    label: c.label,
                });
            }
        }
        let mut row_box = node.row_box.clone();
        row_box.push(b);
        let mut counts = node.counts.clone();
        counts[b - 1] += 1;
        Node {
            classes,
            row_box,
            counts,
        }
    }

    fn expand(&self, node: &Node) -> Vec<Node> {
        let mut out = Vec::new();
        for b in self.next_boxes(node) {
            self.children(node, b, &mut out);
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
struct Acc {
    spectra: u64,
    frequency_sum: u128,
    by_free: Vec<u128>,
}

type Tally = BTreeMap<Vec<usize>, Acc>;

fn merge(mut a: Tally, b: Tally) -> Result<Tally> {
    for (ty, acc) in b {
        let slot = a.entry(ty).or_default();
        slot.spectra += acc.spectra;
        slot.frequency_sum = slot
            .frequency_sum
            .checked_add(acc.frequency_sum)
            .ok_or(Error::Overflow("spectrum frequency sum"))?;
        if slot.by_free.len() < acc.by_free.len() {
            slot.by_free.resize(acc.by_free.len(), 0);
        }
        for (x, y) in slot.by_free.iter_mut().zip(acc.by_free) {
            *x = x.checked_add(y).ok_or(Error::Overflow("spectrum frequency sum"))?;
        }
    }
    Ok(a)
}

struct Shared {
    counter: AtomicU64,
    abort: AtomicBool,
    limit: u64,
}

impl Shared {
    fn new(limit: u64) -> Self {
        Self {
            counter: AtomicU64::new(0),
            abort: AtomicBool::new(false),
            limit,
        }
    }

    fn add(&self, nodes: u64) -> bool {
        let seen = self.counter.fetch_add(nodes, Ordering::Relaxed) + nodes;
        if seen > self.limit {
            self.abort.store(true, Ordering::Relaxed);
        }
        !self.abort.load(Ordering::Relaxed)
    }

    fn exceeded(&self) -> bool {
        self.abort.load(Ordering::Relaxed) || self.counter.load(Ordering::Relaxed) > self.limit
    }

    fn error(&self) -> Error {
        budget_error(
            "spectrum",
            format!("more than {} spectrum nodes", self.limit),
            self.limit,
        )
    }
}

struct Walk<'a, F> {
    ctx: &'a Context,
    shared: &'a Shared,
    tally: Tally,
    local: u64,
    overflow: bool,
    on_spectrum: F,
}

impl<F: FnMut(&Node)> Walk<'_, F> {
    fn record(&mut self, node: &Node) {
        if node.k() == 0 {
            return;
        }
        if let Some(target) = &self.ctx.target {
            if &node.counts != target {
                return;
            }
        }
        let frequency = self.ctx.frequency(node);
        let free = self.ctx.free_exponent(node);
        let width = self.ctx.width;
        let acc = self.tally.entry(node.counts.clone()).or_insert_with(|| Acc {
            by_free: vec![0; width + 1],
            ..Acc::default()
        });
        match (
            acc.by_free[free].checked_add(frequency),
            acc.frequency_sum.checked_add(frequency),
        ) {
            (Some(x), Some(y)) => {
                acc.by_free[free] = x;
                acc.frequency_sum = y;
                acc.spectra += 1;
                (self.on_spectrum)(node);
            }
            _ => self.overflow = true,
        }
    }

    fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local == FLUSH_EVERY {
            let local = std::mem::take(&mut self.local);
            return self.shared.add(local);
        }
        !self.shared.abort.load(Ordering::Relaxed)
    }

    fn flush(&mut self) {
        let local = std::mem::take(&mut self.local);
        self.shared.add(local);
    }

    /// Records `node` and everything below it.
    fn descend(&mut self, node: &Node) -> bool {
        if !self.tick() {
            return false;
        }
        self.record(node);
        if self.overflow {
            return false;
        }
        for child in self.ctx.expand(node) {
            if !self.descend(&child) {
                return false;
            }
        }
        true
    }

    fn finish(mut self) -> Result<Tally> {
        self.flush();
        if self.overflow {
            return Err(Error::Overflow("spectrum frequency sum"));
        }
        Ok(self.tally)
    }
}

/// Walks every admissible spectrum reachable under `ctx`: the first few
/// levels serially, then each frontier subtree on its own worker.
fn walk_all(ctx: &Context, t: usize, shared: &Shared) -> Result<Tally> {
    let mut head = Walk {
        ctx,
        shared,
        tally: Tally::new(),
        local: 0,
        overflow: false,
        on_spectrum: |_: &Node| {},
    };
    let mut frontier = vec![Node::root(t, ctx.n)];
    while !frontier.is_empty() && frontier.len() < FRONTIER {
        let mut next = Vec::new();
        for node in &frontier {
            if !head.tick() {
                head.flush();
                return Err(shared.error());
            }
            head.record(node);
            next.extend(ctx.expand(node));
        }
        frontier = next;
    }
    let mut tally = head.finish()?;
    let parts: Vec<Result<Tally>> = frontier
        .par_iter()
        .map(|node| {
            let mut walk = Walk {
                ctx,
                shared,
                tally: Tally::new(),
                local: 0,
                overflow: false,
                on_spectrum: |_: &Node| {},
            };
            walk.descend(node);
            walk.finish()
        })
        .collect();
    for part in parts {
        tally = merge(tally, part?)?;
    }
    if shared.exceeded() {
        return Err(shared.error());
    }
    Ok(tally)
}

fn product_of_factorials(counts: &[usize]) -> BigUint {
    counts
        .iter()
        .flat_map(|&c| 1..=c)
        .fold(BigUint::from(1u32), |acc, i| acc * i)
}

fn finish_type(counts: &[usize], acc: &Acc) -> Result<TypeAggregate> {
    let symmetry = product_of_factorials(counts);
    let mut tuples = BigUint::zero();
    let mut by_free = Vec::with_capacity(acc.by_free.len());
    for (free, &sum) in acc.by_free.iter().enumerate() {
        let sum = BigUint::from(sum);
        if !(&sum % &symmetry).is_zero() {
            return Err(Error::Internal(format!(
                "type {counts:?}: frequency sum {sum} at free exponent {free} is not divisible by {symmetry}"
            )));
        }
        let count = sum / &symmetry;
        tuples += &count;
        by_free.push(count);
    }
    Ok(TypeAggregate {
        ty: TupleType::new(counts.to_vec()),
        spectra: acc.spectra,
        frequency_sum: BigUint::from(acc.frequency_sum),
        tuples,
        by_free,
    })
}

fn check_type(spec: &ProblemSpec, n: usize, ty: &TupleType) -> Result<()> {
    if !ty.fits(spec, n) {
        return Err(Error::InvalidArgument(format!(
            "type {:?} does not fit {spec} at n = {n}",
            ty.counts()
        )));
    }
    if ty.k() == 0 {
        return Err(Error::InvalidArgument("tuple type must have k >= 1".into()));
    }
    Ok(())
}

/// Spectrum totals for one tuple type.
pub fn type_aggregate(
    spec: &ProblemSpec,
    n: usize,
    ty: &TupleType,
    config: &EngineConfig,
) -> Result<TypeAggregate> {
    check_type(spec, n, ty)?;
    let ctx = Context::new(spec, n, usize::MAX, Some(ty.counts().to_vec()))?;
    let shared = Shared::new(config.budget);
    let tally = config.install(|| walk_all(&ctx, spec.t(), &shared))??;
    let empty = Acc {
        by_free: vec![0; ctx.width + 1],
        ..Acc::default()
    };
    finish_type(ty.counts(), tally.get(ty.counts()).unwrap_or(&empty))
}

/// Every admissible Venn spectrum of `ty`, in walk order.
pub fn enumerate_spectra(
    spec: &ProblemSpec,
    n: usize,
    ty: &TupleType,
    budget: u64,
) -> Result<Vec<VennSpectrum>> {
    check_type(spec, n, ty)?;
    let ctx = Context::new(spec, n, usize::MAX, Some(ty.counts().to_vec()))?;
    let shared = Shared::new(budget);
    let mut nodes = Vec::new();
    let mut walk = Walk {
        ctx: &ctx,
        shared: &shared,
        tally: Tally::new(),
        local: 0,
        overflow: false,
        on_spectrum: |node: &Node| nodes.push(node.clone()),
    };
    walk.descend(&Node::root(spec.t(), n));
    walk.finish()?;
    if shared.exceeded() {
        return Err(shared.error());
    }
    nodes.iter().map(Node::spectrum).collect()
}

/// Per-type aggregates for every nonempty type with `k <= k_cap`.
pub fn all_type_aggregates(
    spec: &ProblemSpec,
    n: usize,
    config: &EngineConfig,
) -> Result<(Vec<TypeAggregate>, u64)> {
    let bound = kmax_upper_bound(spec, n)?;
    let k_cap = config
        .k_cutoff
        .unwrap_or(usize::MAX)
        .min(usize::try_from(bound).unwrap_or(usize::MAX));
    let ctx = Context::new(spec, n, k_cap, None)?;
    let shared = Shared::new(config.budget);
    let tally = config.install(|| walk_all(&ctx, spec.t(), &shared))??;
    if let Some((counts, _)) = tally.iter().find(|(c, _)| c.iter().sum::<usize>() > MAX_K) {
        return Err(Error::TooLarge(format!("tuple type {counts:?} exceeds {MAX_K} sets")));
    }
    let aggregates = tally
        .iter()
        .map(|(counts, acc)| finish_type(counts, acc))
        .collect::<Result<Vec<_>>>()?;
    Ok((aggregates, shared.counter.load(Ordering::Relaxed)))
}

/// N(W) as the signed sum over tuple types and admissible Venn spectra.
pub fn spectrum_nw(spec: &ProblemSpec, n: usize, config: &EngineConfig) -> Result<EngineReport> {
    let started = Instant::now();
    let total = spec.total_distributions(n);
    let width = binom_u64(n as u64, spec.r() as u64).ok_or(Error::Overflow("C(n, r)"))? as usize;
    let (aggregates, nodes) = all_type_aggregates(spec, n, config)?;

    let mut counts_by_k: Vec<Vec<BigUint>> = Vec::new();
    let mut max_k = 0;
    for aggregate in &aggregates {
        let k = aggregate.ty.k();
        max_k = max_k.max(k);
        if counts_by_k.len() < k {
            counts_by_k.resize_with(k, || vec![BigUint::zero(); width + 1]);
        }
        for (slot, count) in counts_by_k[k - 1].iter_mut().zip(&aggregate.by_free) {
            *slot += count;
        }
    }
    let per_k = fold_terms(spec.t(), &counts_by_k);
    let n_w = signed_total(&per_k)?;
    Ok(EngineReport {
        engine: EngineId::Spectrum,
        n,
        n_w,
        total,
        elapsed: started.elapsed(),
        enumerated: nodes,
        max_k: Some(max_k),
        per_k,
        witness: None,
    })
}
