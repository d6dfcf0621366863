//! The three N(W) engines and the per-tuple quantities they share.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{binom_u64, rank_rsubset, subsets, EventTuple, ProblemSpec};
use crate::venn::{digit_bit, is_compatible, venn_spectrum_of, VennSpectrum};

mod brute;
mod direct;
mod kmax;
mod spectrum;

pub use brute::brute_force_nw;
pub use direct::direct_ie_nw;
pub use kmax::{kmax_upper_bound, max_compatible_tuple_size};
pub use spectrum::{all_type_aggregates, enumerate_spectra, spectrum_nw, type_aggregate, TypeAggregate};

pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngineId {
    Brute,
    Direct,
    Spectrum,
}

impl EngineId {
    pub const ALL: [EngineId; 3] = [EngineId::Brute, EngineId::Direct, EngineId::Spectrum];

    pub fn as_str(self) -> &'static str {
        match self {
            EngineId::Brute => "brute",
            EngineId::Direct => "direct",
            EngineId::Spectrum => "spectrum",
        }
    }
}

impl fmt::Display for EngineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EngineId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(EngineId::Brute),
            "direct" => Ok(EngineId::Direct),
            "spectrum" => Ok(EngineId::Spectrum),
            other => Err(Error::InvalidArgument(format!(
                "unknown engine {other:?} (expected brute, direct or spectrum)"
            ))),
        }
    }
}

/// Knobs shared by every engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Maximum number of enumerated objects (colorings, tuples or spectrum
    /// search nodes) before an engine gives up with `BudgetExceeded`.
    pub budget: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Only tuples with at most this many events contribute.
    pub k_cutoff: Option<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            workers: None,
            k_cutoff: None,
        }
    }
}

impl EngineConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_k_cutoff(mut self, k: usize) -> Self {
        self.k_cutoff = Some(k);
        self
    }

    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R> {
        match self.workers {
            None => Ok(f()),
            Some(w) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(w.max(1))
                    .build()
                    .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// One engine run at one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineReport {
    pub engine: EngineId,
    pub n: usize,
    pub n_w: BigUint,
    /// `t^C(n,r)`.
    pub total: BigUint,
    pub elapsed: Duration,
    /// Colorings, tuples or spectrum search nodes visited.
    pub enumerated: u64,
    /// Largest compatible tuple seen (direct and spectrum engines).
    pub max_k: Option<usize>,
    /// Signed contribution of all k-event tuples, indexed by `k - 1`.
    pub per_k: Vec<BigInt>,
    /// Lowest-index coloring without a monochromatic target (brute only).
    pub witness: Option<Coloring>,
}

impl EngineReport {
    /// Every distribution has the property.
    pub fn is_ramsey_witness(&self) -> bool {
        self.n_w == self.total
    }

    /// Running sums of `per_k`: the truncated inclusion-exclusion values.
    pub fn partial_sums(&self) -> Vec<BigInt> {
        self.per_k
            .iter()
            .scan(BigInt::zero(), |acc, term| {
                *acc += term;
                Some(acc.clone())
            })
            .collect()
    }
}

/// Runs the chosen engine.
pub fn run_engine(
    engine: EngineId,
    spec: &ProblemSpec,
    n: usize,
    config: &EngineConfig,
) -> Result<EngineReport> {
    match engine {
        EngineId::Brute => brute_force_nw(spec, n, config),
        EngineId::Direct => direct_ie_nw(spec, n, config),
        EngineId::Spectrum => spectrum_nw(spec, n, config),
    }
}

/// A distribution: entry `j` is the box (1-based) of the r-subset of
/// rank `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring(Vec<u8>);

impl Coloring {
    pub fn new(spec: &ProblemSpec, n: usize, boxes: Vec<u8>) -> Result<Self> {
        let expected = binom_u64(n as u64, spec.r() as u64).ok_or(Error::Overflow("C(n, r)"))?;
        if boxes.len() as u64 != expected {
            return Err(Error::InvalidArgument(format!(
                "coloring needs {expected} entries, got {}",
                boxes.len()
            )));
        }
        if let Some(&bad) = boxes.iter().find(|&&b| b == 0 || b as usize > spec.t()) {
            return Err(Error::InvalidArgument(format!(
                "box {bad} outside 1..={}",
                spec.t()
            )));
        }
        Ok(Self(boxes))
    }

    /// Coloring number `index` in base-`t` order, rank 0 least significant.
    pub fn from_index(spec: &ProblemSpec, n: usize, mut index: u64) -> Self {
        let c = binom_u64(n as u64, spec.r() as u64).unwrap_or(0) as usize;
        let t = spec.t() as u64;
        let boxes = (0..c)
            .map(|_| {
                let digit = index % t;
                index /= t;
                digit as u8 + 1
            })
            .collect();
        Self(boxes)
    }

    pub fn boxes(&self) -> &[u8] {
        &self.0
    }

    pub fn box_of(&self, rank: usize) -> u8 {
        self.0[rank]
    }
}

/// Some box `i` holds every r-subset of some `P_i`-subset.
pub fn w_holds(coloring: &Coloring, spec: &ProblemSpec, n: usize) -> bool {
    let r = spec.r();
    (1..=spec.t()).any(|i| {
        subsets(n, spec.p_of(i)).any(|big| {
            subsets(big.len(), r).all(|local| {
                let actual: Vec<u32> = local
                    .elements()
                    .iter()
                    .map(|&pos| big.elements()[pos as usize - 1])
                    .collect();
                let s = crate::model::VertexSet::new(actual).expect("sorted");
                let rank = rank_rsubset(&s, n, r).expect("valid r-subset");
                coloring.box_of(rank as usize) as usize == i
            })
        })
    })
}

/// Number of distributions making every event of `tuple` true at once:
/// zero for incompatible tuples, otherwise `t` raised to the number of
/// r-subsets outside every event's family. The union size is expanded by
/// inclusion-exclusion over intersections read off the Venn spectrum.
pub fn tuple_value(tuple: &EventTuple, spec: &ProblemSpec, n: usize) -> Result<BigUint> {
    if !is_compatible(tuple, spec) {
        return Ok(BigUint::zero());
    }
    let r = spec.r() as u64;
    let spectrum = venn_spectrum_of(&tuple.vertex_sets(), n)?;
    let k = spectrum.k();
    let mut union: i128 = 0;
    for mask in 1usize..1 << k {
        let positions: Vec<usize> = (1..=k).filter(|&m| mask & digit_bit(k, m) != 0).collect();
        let common = spectrum.p_from_q(&positions)?;
        let term = binom_u64(common, r).ok_or(Error::Overflow("C(P, r)"))? as i128;
        if positions.len() % 2 == 1 {
            union += term;
        } else {
            union -= term;
        }
    }
    let all = binom_u64(n as u64, r).ok_or(Error::Overflow("C(n, r)"))? as i128;
    let free = all - union;
    if free < 0 {
        return Err(Error::Internal(format!(
            "union of r-subset families ({union}) exceeds C(n, r) ({all})"
        )));
    }
    Ok(num_traits::pow::pow(BigUint::from(spec.t()), free as usize))
}

/// Number of ways to place `n = sum Q_B` labelled elements into the Venn
/// parts with the given cardinalities: `n! / prod_B Q_B!`.
pub fn frequency(spectrum: &VennSpectrum) -> BigUint {
    let mut acc = BigUint::one();
    let mut placed = 0u64;
    for &q in spectrum.q() {
        placed += q;
        acc *= crate::model::binom(placed, q as i64);
    }
    acc
}

pub(crate) fn to_signed(value: BigUint, negative: bool) -> BigInt {
    let sign = if value.is_zero() {
        Sign::NoSign
    } else if negative {
        Sign::Minus
    } else {
        Sign::Plus
    };
    BigInt::from_biguint(sign, value)
}

/// Folds per-`(k, free exponent)` tuple counts into signed per-k sums.
pub(crate) fn fold_terms(
    t: usize,
    counts_by_k: &[Vec<BigUint>],
) -> Vec<BigInt> {
    let t = BigUint::from(t);
    counts_by_k
        .iter()
        .enumerate()
        .map(|(ki, by_free)| {
            let mut sum = BigUint::zero();
            let mut power = BigUint::one();
            for count in by_free {
                if !count.is_zero() {
                    sum += count * &power;
                }
                power *= &t;
            }
            // k = ki + 1 events carry sign (-1)^(k-1).
            to_signed(sum, ki % 2 == 1)
        })
        .collect()
}

pub(crate) fn signed_total(per_k: &[BigInt]) -> Result<BigUint> {
    let total: BigInt = per_k.iter().sum();
    total
        .to_biguint()
        .ok_or_else(|| Error::Internal(format!("inclusion-exclusion sum is negative: {total}")))
}

pub(crate) fn budget_error(engine: &'static str, required: String, budget: u64) -> Error {
    Error::BudgetExceeded {
        engine,
        required,
        budget,
    }
}
