//! Top-level decision: normalize, decide each disjunct, combine.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::ParseError;
use crate::formula::{normalize_with, Disjunct, Formula, Quantifier};
use crate::poly_solver::decide_poly;
use crate::power_solver::{decide, Options, Verdict};

/// One decided disjunct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub disjunct: usize,
    /// Case labels such as "pell", "divisor" or "bounded enumeration".
    pub cases: Vec<String>,
    pub witness: Option<BigInt>,
    pub certified: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub verdict: Verdict,
    pub trace: Vec<TraceEntry>,
    pub log: Vec<String>,
}

fn order_key(x: &BigInt) -> (BigInt, BigInt) {
    (x.abs(), x.clone())
}

/// Decides the existential form of `f` (its negation for a universal one).
pub fn solve(f: &Formula, opts: &Options) -> Result<Report, ParseError> {
    let disjuncts = normalize_with(f, opts.inspect_cap)?;
    let mut trace = Vec::with_capacity(disjuncts.len());
    let mut log = Vec::new();
    for (i, d) in disjuncts.into_iter().enumerate() {
        let entry = match d {
            Disjunct::Resolved(r) => TraceEntry { disjunct: i, cases: Vec::from([String::from("resolved")]), witness: r.witness, certified: r.certified, note: r.note },
            Disjunct::System(sys) => {
                log.extend(sys.log.iter().map(|l| format!("#{i}: {l}")));
                let out = if sys.has_poly() { decide_poly(&sys, opts) } else { decide(&sys, opts) };
                TraceEntry { disjunct: i, cases: out.cases, witness: out.witness, certified: out.certified, note: out.note }
            }
        };
        trace.push(entry);
    }
    let witness = trace.iter().filter_map(|t| t.witness.clone()).min_by_key(order_key);
    let exists = match witness {
        Some(w) => Verdict::Sat { witness: Some(w) },
        None => match trace.iter().find(|t| !t.certified) {
            Some(t) => Verdict::Unknown { reason: t.note.clone(), bound: opts.bound },
            None => Verdict::Unsat { counterexample: None },
        },
    };
    let verdict = match f.quantifier {
        Quantifier::Exists => exists,
        Quantifier::Forall => match exists {
            Verdict::Sat { witness } => Verdict::Unsat { counterexample: witness },
            Verdict::Unsat { .. } => Verdict::Sat { witness: None },
            u => u,
        },
    };
    Ok(Report { verdict, trace, log })
}
