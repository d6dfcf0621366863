//! The four subcommands, independent of argument parsing.

use ramsey_core::engines::{kmax_upper_bound, max_compatible_tuple_size, run_engine};
use ramsey_core::search::{cross_validate, ramsey_number};
use ramsey_core::{EngineConfig, EngineId, Error};

use crate::problem::{ParseError, Resolved};
use crate::report::{InputEcho, KmaxRecord, ReportDocument, RunRecord, SearchSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;

/// Exit status, the document for standard output, and messages for
/// standard error.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub document: Option<ReportDocument>,
    pub messages: Vec<String>,
}

impl Outcome {
    fn done(document: ReportDocument) -> Self {
        Self {
            code: EXIT_OK,
            document: Some(document),
            messages: Vec::new(),
        }
    }

    fn failed(code: i32, document: Option<ReportDocument>, message: String) -> Self {
        Self {
            code,
            document,
            messages: vec![message],
        }
    }

    pub fn parse_error(err: &ParseError) -> Self {
        Self::failed(EXIT_PARSE, None, format!("error: {err}"))
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::InvalidSpec(_) | Error::InvalidArgument(_) => EXIT_PARSE,
        _ => EXIT_OTHER,
    }
}

fn config_of(resolved: &Resolved) -> EngineConfig {
    EngineConfig {
        budget: resolved.budget,
        workers: resolved.workers,
        k_cutoff: resolved.k_cutoff,
    }
}

fn require(value: Option<usize>, name: &'static str) -> Result<usize, ParseError> {
    value.ok_or(ParseError::Missing(name))
}

pub fn compute(resolved: &Resolved) -> Outcome {
    let n = match require(resolved.n, "n") {
        Ok(n) => n,
        Err(e) => return Outcome::parse_error(&e),
    };
    let engine = resolved.engine.unwrap_or(EngineId::Direct);
    let mut doc = ReportDocument::new("compute", InputEcho::from(resolved));
    doc.input.engine = Some(engine.to_string());
    match run_engine(engine, &resolved.spec, n, &config_of(resolved)) {
        Ok(report) => {
            doc.runs.push(RunRecord::from_report(&report));
            Outcome::done(doc)
        }
        Err(err) => {
            doc.runs.push(RunRecord::from_error(n, engine.as_str(), &err));
            Outcome::failed(exit_code_for(&err), Some(doc), format!("error: {err}"))
        }
    }
}

pub fn search(resolved: &Resolved) -> Outcome {
    let n_max = match require(resolved.n_max, "n_max") {
        Ok(n) => n,
        Err(e) => return Outcome::parse_error(&e),
    };
    let engine = resolved.engine.unwrap_or(EngineId::Direct);
    let mut doc = ReportDocument::new("search", InputEcho::from(resolved));
    doc.input.engine = Some(engine.to_string());
    match ramsey_number(&resolved.spec, n_max, engine, &config_of(resolved)) {
        Ok(result) => {
            for report in &result.reports {
                let mut run = RunRecord::from_report(report);
                if let Some((below, coloring)) = &result.lower_witness {
                    if *below == report.n {
                        run = run.with_coloring(coloring);
                    }
                }
                doc.runs.push(run);
            }
            doc.search = Some(SearchSummary {
                ramsey_n: result.ramsey_n,
                n_max,
                lower_witness_n: result.lower_witness.as_ref().map(|(n, _)| *n),
            });
            let mut outcome = Outcome::done(doc);
            if result.ramsey_n.is_none() {
                outcome.messages.push(format!("not found <= {n_max}"));
            }
            outcome
        }
        Err(err) => {
            doc.runs.extend(err.completed.iter().map(RunRecord::from_report));
            doc.runs.push(RunRecord::from_error(err.n, engine.as_str(), &err.source));
            doc.search = Some(SearchSummary {
                ramsey_n: None,
                n_max,
                lower_witness_n: None,
            });
            Outcome::failed(exit_code_for(&err.source), Some(doc), format!("error: {err}"))
        }
    }
}

pub fn validate(resolved: &Resolved) -> Outcome {
    let n = match require(resolved.n, "n") {
        Ok(n) => n,
        Err(e) => return Outcome::parse_error(&e),
    };
    let mut doc = ReportDocument::new("validate", InputEcho::from(resolved));
    doc.input.engine = None;
    let cv = cross_validate(&resolved.spec, n, &config_of(resolved));
    let mut messages = Vec::new();
    for (engine, result) in [
        (EngineId::Brute, &cv.brute),
        (EngineId::Direct, &cv.direct),
        (EngineId::Spectrum, &cv.spectrum),
    ] {
        match result {
            Ok(report) => doc.runs.push(RunRecord::from_report(report)),
            Err(err) => {
                messages.push(format!("{engine}: {err}"));
                doc.runs.push(RunRecord::from_error(n, engine.as_str(), err));
            }
        }
    }
    let agree = cv.agree() && cv.profiles_agree();
    doc.agreement = Some(agree);
    doc.kmax.push(KmaxRecord {
        n,
        bound: cv.kmax_bound.map(|b| b.to_string()).unwrap_or_default(),
        realized: cv.realized_kmax(),
        error: None,
    });
    if !agree {
        let values: Vec<String> = doc
            .runs
            .iter()
            .filter_map(|r| r.n_w.as_ref().map(|v| format!("{}={v}", r.engine)))
            .collect();
        messages.push(format!("engines disagree: {}", values.join(" ")));
        return Outcome {
            code: EXIT_DISAGREE,
            document: Some(doc),
            messages,
        };
    }
    Outcome {
        code: EXIT_OK,
        document: Some(doc),
        messages,
    }
}

pub fn kmax(resolved: &Resolved, realized: bool) -> Outcome {
    let n = match require(resolved.n, "n") {
        Ok(n) => n,
        Err(e) => return Outcome::parse_error(&e),
    };
    let mut doc = ReportDocument::new("kmax", InputEcho::from(resolved));
    let bound = match kmax_upper_bound(&resolved.spec, n) {
        Ok(b) => b,
        Err(err) => return Outcome::failed(exit_code_for(&err), None, format!("error: {err}")),
    };
    let mut record = KmaxRecord {
        n,
        bound: bound.to_string(),
        realized: None,
        error: None,
    };
    let mut outcome_code = EXIT_OK;
    let mut messages = Vec::new();
    if realized {
        match max_compatible_tuple_size(&resolved.spec, n, &config_of(resolved)) {
            Ok(k) => record.realized = Some(k),
            Err(err) => {
                outcome_code = exit_code_for(&err);
                messages.push(format!("error: {err}"));
                record.error = Some(err.to_string());
            }
        }
    }
    doc.kmax.push(record);
    Outcome {
        code: outcome_code,
        document: Some(doc),
        messages,
    }
}
