//! Ramsey number search and cross-engine validation.

use num_bigint::BigInt;

use crate::engines::{
    brute_force_nw, direct_ie_nw, kmax_upper_bound, run_engine, spectrum_nw, Coloring,
    EngineConfig, EngineId, EngineReport,
};
use crate::error::{Error, Result};
use crate::model::ProblemSpec;

/// Every distribution at `n` contains a monochromatic target set.
pub fn is_ramsey_witness(
    spec: &ProblemSpec,
    n: usize,
    engine: EngineId,
    config: &EngineConfig,
) -> Result<bool> {
    Ok(run_engine(engine, spec, n, config)?.is_ramsey_witness())
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Smallest witnessing `n`, if one was found up to `n_max`.
    pub ramsey_n: Option<usize>,
    /// One report per scanned `n`, starting at 1.
    pub reports: Vec<EngineReport>,
    /// A distribution at `ramsey_n - 1` without the property (brute force
    /// only).
    pub lower_witness: Option<(usize, Coloring)>,
}

#[derive(Debug, thiserror::Error)]
#[error("search failed at n = {n}: {source}")]
pub struct SearchError {
    pub n: usize,
    /// Reports for every `n` that finished before the failure.
    pub completed: Vec<EngineReport>,
    #[source]
    pub source: Error,
}

/// Scans `n = 1, 2, ..., n_max` and stops at the first witness.
pub fn ramsey_number(
    spec: &ProblemSpec,
    n_max: usize,
    engine: EngineId,
    config: &EngineConfig,
) -> std::result::Result<SearchResult, SearchError> {
    let mut reports: Vec<EngineReport> = Vec::new();
    for n in 1..=n_max {
        let report = match run_engine(engine, spec, n, config) {
            Ok(report) => report,
            Err(source) => {
                return Err(SearchError {
                    n,
                    completed: reports,
                    source,
                })
            }
        };
        let found = report.is_ramsey_witness();
        reports.push(report);
        if found {
            let lower_witness = reports
                .iter()
                .rev()
                .nth(1)
                .and_then(|prev| prev.witness.clone().map(|c| (prev.n, c)));
            return Ok(SearchResult {
                ramsey_n: Some(n),
                reports,
                lower_witness,
            });
        }
    }
    Ok(SearchResult {
        ramsey_n: None,
        reports,
        lower_witness: None,
    })
}

#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub n: usize,
    pub brute: std::result::Result<EngineReport, Error>,
    pub direct: std::result::Result<EngineReport, Error>,
    pub spectrum: std::result::Result<EngineReport, Error>,
    pub kmax_bound: Option<u128>,
}

impl CrossValidation {
    pub fn reports(&self) -> impl Iterator<Item = &EngineReport> {
        [&self.brute, &self.direct, &self.spectrum]
            .into_iter()
            .filter_map(|r| r.as_ref().ok())
    }

    /// All engines that finished report the same N(W).
    pub fn agree(&self) -> bool {
        let mut counts = self.reports().map(|r| &r.n_w);
        match counts.next() {
            None => true,
            Some(first) => counts.all(|c| c == first),
        }
    }

    /// Direct and spectrum per-k profiles coincide when both finished.
    pub fn profiles_agree(&self) -> bool {
        match (&self.direct, &self.spectrum) {
            (Ok(d), Ok(s)) => trim(&d.per_k) == trim(&s.per_k),
            _ => true,
        }
    }

    /// Largest compatible tuple actually seen by the direct engine.
    pub fn realized_kmax(&self) -> Option<usize> {
        self.direct.as_ref().ok().and_then(|r| r.max_k)
    }

    pub fn within_bound(&self) -> bool {
        match (self.realized_kmax(), self.kmax_bound) {
            (Some(k), Some(b)) => k as u128 <= b,
            _ => true,
        }
    }
}

fn trim(per_k: &[BigInt]) -> &[BigInt] {
    let end = per_k
        .iter()
        .rposition(|t| t != &BigInt::default())
        .map_or(0, |i| i + 1);
    &per_k[..end]
}

/// Runs all three engines at one `n`; a failing engine does not stop the
/// others.
pub fn cross_validate(spec: &ProblemSpec, n: usize, config: &EngineConfig) -> CrossValidation {
    CrossValidation {
        n,
        brute: brute_force_nw(spec, n, config),
        direct: direct_ie_nw(spec, n, config),
        spectrum: spectrum_nw(spec, n, config),
        kmax_bound: kmax_upper_bound(spec, n).ok(),
    }
}
