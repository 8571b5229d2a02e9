//! File handling, structured records and the batch runner behind the
//! `monpres` binary.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use monpres_core::error::ParseError;
use monpres_core::formula::{parse, parse_multi, Formula};
use monpres_core::power_solver::{Options, Verdict};
use monpres_core::solver::{solve, Report};

pub const EXIT_SAT: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    JsonLines,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub options: Options,
    pub format: Format,
    pub trace: bool,
    pub multi: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub disjunct: usize,
    pub cases: Vec<String>,
    pub witness: Option<String>,
    pub certified: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub parse: f64,
    pub solve: f64,
}

/// One line of `json-lines` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub file: String,
    /// Sentence index within the file.
    pub index: usize,
    /// `sat`, `unsat`, `unknown` or `error`.
    pub verdict: String,
    pub witness: Option<String>,
    pub counterexample: Option<String>,
    pub reason: Option<String>,
    pub bound: Option<u64>,
    pub case_trace: Vec<TraceRecord>,
    pub log: Vec<String>,
    pub error: Option<String>,
    pub timings_ms: Timings,
}

impl Record {
    pub fn exit_code(&self) -> i32 {
        match self.verdict.as_str() {
            "sat" => EXIT_SAT,
            "unsat" => EXIT_UNSAT,
            "unknown" => EXIT_UNKNOWN,
            _ => EXIT_INPUT,
        }
    }

    /// The line printed in human mode.
    pub fn summary(&self) -> String {
        match self.verdict.as_str() {
            "sat" => self.witness.as_ref().map_or("sat".into(), |w| format!("sat x={w}")),
            "unsat" => self.counterexample.as_ref().map_or("unsat".into(), |c| format!("unsat (counterexample x={c})")),
            "unknown" => format!("unknown ({}, bound={})", self.reason.as_deref().unwrap_or(""), self.bound.unwrap_or(0)),
            _ => format!("error: {}", self.error.as_deref().unwrap_or("")),
        }
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn line_col(text: &str, pos: usize) -> (usize, usize) {
    let before = &text[..pos.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// `path:line:col: message` when the error has a position.
pub fn describe(path: &str, text: &str, e: &ParseError) -> String {
    match e.pos() {
        Some(p) => {
            let (l, c) = line_col(text, p);
            format!("{path}:{l}:{c}: {e}")
        }
        None => format!("{path}: {e}"),
    }
}

fn error_record(file: &str, msg: String, t: Timings) -> Record {
    Record {
        file: file.into(),
        index: 0,
        verdict: "error".into(),
        witness: None,
        counterexample: None,
        reason: None,
        bound: None,
        case_trace: Vec::new(),
        log: Vec::new(),
        error: Some(msg),
        timings_ms: t,
    }
}

pub fn record_of(file: &str, index: usize, report: &Report, timings: Timings) -> Record {
    let (verdict, witness, counterexample, reason, bound) = match &report.verdict {
        Verdict::Sat { witness } => ("sat", witness.as_ref().map(ToString::to_string), None, None, None),
        Verdict::Unsat { counterexample } => ("unsat", None, counterexample.as_ref().map(ToString::to_string), None, None),
        Verdict::Unknown { reason, bound } => ("unknown", None, None, Some(reason.clone()), Some(*bound)),
    };
    Record {
        file: file.into(),
        index,
        verdict: verdict.into(),
        witness,
        counterexample,
        reason,
        bound,
        case_trace: report
            .trace
            .iter()
            .map(|t| TraceRecord { disjunct: t.disjunct, cases: t.cases.clone(), witness: t.witness.as_ref().map(ToString::to_string), certified: t.certified, note: t.note.clone() })
            .collect(),
        log: report.log.clone(),
        error: None,
        timings_ms: timings,
    }
}

/// Parses and decides every sentence of one input text.
pub fn process_text(file: &str, text: &str, options: &Options, multi: bool) -> Vec<Record> {
    let start = Instant::now();
    let parsed: Result<Vec<Formula>, ParseError> = if multi { parse_multi(text) } else { parse(text).map(|f| vec![f]) };
    let parse_ms = ms(start);
    let formulas = match parsed {
        Ok(fs) => fs,
        Err(e) => return vec![error_record(file, describe(file, text, &e), Timings { parse: parse_ms, solve: 0.0 })],
    };
    formulas
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let t = Instant::now();
            match solve(f, options) {
                Ok(report) => record_of(file, i, &report, Timings { parse: parse_ms, solve: ms(t) }),
                Err(e) => {
                    let mut r = error_record(file, describe(file, text, &e), Timings { parse: parse_ms, solve: ms(t) });
                    r.index = i;
                    r
                }
            }
        })
        .collect()
}

pub fn process_file(path: &Path, options: &Options, multi: bool) -> Vec<Record> {
    let name = path.display().to_string();
    match std::fs::read_to_string(path) {
        Ok(text) => process_text(&name, &text, options, multi),
        Err(e) => vec![error_record(&name, format!("{name}: {e}"), Timings { parse: 0.0, solve: 0.0 })],
    }
}

/// Decides all inputs on a small worker pool; records come back in input order.
pub fn process_all(cfg: &RunConfig) -> Vec<Vec<Record>> {
    let slots: Vec<Mutex<Option<Vec<Record>>>> = cfg.inputs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(cfg.inputs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = cfg.inputs.get(i) else { break };
                let recs = process_file(path, &cfg.options, cfg.multi);
                *slots[i].lock().unwrap() = Some(recs);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().unwrap_or_default()).collect()
}

/// Renders records; returns the text for stdout and for stderr.
pub fn render(cfg: &RunConfig, records: &[Record]) -> (String, String) {
    let mut out = String::new();
    let mut err = String::new();
    let prefix = cfg.inputs.len() > 1 || cfg.multi;
    for r in records {
        match cfg.format {
            Format::JsonLines => {
                out.push_str(&serde_json::to_string(r).expect("records serialize"));
                out.push('\n');
            }
            Format::Human => {
                if r.verdict == "error" {
                    err.push_str(&format!("error: {}\n", r.error.as_deref().unwrap_or("")));
                    continue;
                }
                if prefix {
                    out.push_str(&format!("{}#{}: ", r.file, r.index));
                }
                out.push_str(&r.summary());
                out.push('\n');
                if cfg.trace {
                    for l in &r.log {
                        out.push_str(&format!("  log {l}\n"));
                    }
                    for t in &r.case_trace {
                        let w = t.witness.as_deref().map(|w| format!(" x={w}")).unwrap_or_default();
                        let cert = if t.certified { "certified" } else { "uncertified" };
                        out.push_str(&format!("  #{} [{}] {cert}{w}: {}\n", t.disjunct, t.cases.join(", "), t.note));
                    }
                }
            }
        }
    }
    (out, err)
}

/// Worst exit status over all records.
pub fn exit_code(records: &[Record]) -> i32 {
    records.iter().map(Record::exit_code).max().unwrap_or(EXIT_INPUT)
}

/// Reads `json-lines` output back.
pub fn read_records(text: &str) -> serde_json::Result<Vec<Record>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}
