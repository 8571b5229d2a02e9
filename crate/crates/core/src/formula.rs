//! Single-variable sentences: AST, parser, printer and normalization.
//!
//! ```text
//! file      := decl* sentence
//! decl      := (declare-pred NAME (coeffs RAT+))
//! sentence  := (exists x BODY) | (forall x BODY)
//! BODY      := (and BODY+) | (or BODY+) | (not BODY) | atom
//! atom      := (= TERM TERM) | (< TERM TERM) | (> TERM TERM)
//!            | (mod TERM INT INT) | (pow INT TERM) | (pred NAME TERM)
//! TERM      := x | INT | (+ TERM+) | (- TERM TERM) | (- TERM) | (* INT TERM)
//! ```

mod normalize;

pub use normalize::{normalize, normalize_with, ConstraintSystem, Disjunct, Resolution};

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::ParseError;
use crate::poly::RatPoly;
use crate::sexpr::{read_all, syntax, SExpr};

/// A declared predicate: the value set of `f(u) = c_d u^d + ... + c_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PredicateDecl {
    pub name: String,
    /// `c_d, ..., c_0` as written.
    pub coeffs: Vec<BigRational>,
}

impl PredicateDecl {
    /// Validates degree, leading coefficient and integer-valuedness.
    pub fn new(name: &str, coeffs: Vec<BigRational>) -> Result<Self, ParseError> {
        let name = name.to_string();
        if coeffs.is_empty() {
            return Err(ParseError::ZeroLeading { name });
        }
        let degree = coeffs.len() - 1;
        if degree > 3 {
            return Err(ParseError::DegreeTooHigh { name, degree });
        }
        if degree > 0 && coeffs[0].is_zero() {
            return Err(ParseError::ZeroLeading { name });
        }
        let decl = PredicateDecl { name, coeffs };
        // values at d+1 consecutive integers decide integer-valuedness
        for u in 0..=degree as i64 {
            if !decl.eval(&BigInt::from(u)).is_integer() {
                return Err(ParseError::NotIntegerValued { name: decl.name.clone() });
            }
        }
        Ok(decl)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Lowest-degree-first polynomial.
    pub fn poly(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn eval(&self, u: &BigInt) -> BigRational {
        let u = BigRational::from_integer(u.clone());
        let mut acc = BigRational::zero();
        for c in &self.coeffs {
            acc = acc * &u + c;
        }
        acc
    }
}

/// `a x + b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Linear {
    pub a: BigInt,
    pub b: BigInt,
}

impl Linear {
    pub fn new(a: BigInt, b: BigInt) -> Self {
        Linear { a, b }
    }

    pub fn constant(b: BigInt) -> Self {
        Linear { a: BigInt::zero(), b }
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        &self.a * x + &self.b
    }

    fn add(&self, o: &Linear) -> Linear {
        Linear { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    fn neg(&self) -> Linear {
        Linear { a: -&self.a, b: -&self.b }
    }

    fn scale(&self, k: &BigInt) -> Linear {
        Linear { a: &self.a * k, b: &self.b * k }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        if self.a.is_zero() {
            return write!(f, "{}", self.b);
        }
        let base = if self.a.is_one() {
            var.to_string()
        } else if (-&self.a).is_one() {
            format!("(- {var})")
        } else {
            format!("(* {} {var})", self.a)
        };
        if self.b.is_zero() {
            write!(f, "{base}")
        } else {
            write!(f, "(+ {base} {})", self.b)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
    Gt,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Cmp { op: CmpOp, lhs: Linear, rhs: Linear },
    /// `term ≡ residue (mod modulus)`, residue reduced.
    Mod { term: Linear, modulus: BigInt, residue: BigInt },
    Pow { k: u32, term: Linear },
    Pred { name: String, term: Linear },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Body {
    And(Vec<Body>),
    Or(Vec<Body>),
    Not(Box<Body>),
    Atom(Atom),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    pub decls: Vec<PredicateDecl>,
    pub quantifier: Quantifier,
    pub var: String,
    pub body: Body,
}

impl Formula {
    pub fn decl(&self, name: &str) -> Option<&PredicateDecl> {
        self.decls.iter().find(|d| d.name == name)
    }
}

/// Parses a file holding declarations and exactly one sentence.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut all = parse_multi(text)?;
    match all.len() {
        0 => Err(syntax(text.len(), "expected a sentence")),
        1 => Ok(all.remove(0)),
        _ => {
            let pos = read_all(text)?.iter().filter(|e| matches!(e.head(), Some("exists" | "forall"))).nth(1).map_or(0, SExpr::pos);
            Err(syntax(pos, "more than one sentence (use multi-sentence mode)"))
        }
    }
}

/// Parses a file holding declarations interleaved with any number of
/// sentences; each sentence sees the declarations before it.
pub fn parse_multi(text: &str) -> Result<Vec<Formula>, ParseError> {
    let mut decls: Vec<PredicateDecl> = Vec::new();
    let mut out = Vec::new();
    for e in read_all(text)? {
        match e.head() {
            Some("declare-pred") => {
                let d = parse_decl(&e)?;
                if decls.iter().any(|x| x.name == d.name) {
                    return Err(ParseError::DuplicatePredicate { name: d.name, pos: e.pos() });
                }
                decls.push(d);
            }
            Some("exists" | "forall") => out.push(parse_sentence(&e, &decls)?),
            _ => return Err(syntax(e.pos(), "expected `declare-pred`, `exists` or `forall`")),
        }
    }
    Ok(out)
}

fn parse_int(e: &SExpr) -> Result<BigInt, ParseError> {
    let t = e.as_atom().ok_or_else(|| syntax(e.pos(), "expected an integer"))?;
    parse_int_text(t).ok_or_else(|| syntax(e.pos(), "expected an integer"))
}

fn parse_int_text(t: &str) -> Option<BigInt> {
    let digits = t.strip_prefix('-').or_else(|| t.strip_prefix('+')).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

fn parse_rat(e: &SExpr) -> Result<BigRational, ParseError> {
    let t = e.as_atom().ok_or_else(|| syntax(e.pos(), "expected a rational"))?;
    let bad = || syntax(e.pos(), "expected a rational `INT` or `INT/INT`");
    match t.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int_text(t).ok_or_else(bad)?)),
        Some((n, d)) => {
            let n = parse_int_text(n).ok_or_else(bad)?;
            let d = parse_int_text(d).ok_or_else(bad)?;
            if d.is_zero() {
                return Err(syntax(e.pos(), "zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

fn is_ident(t: &str) -> bool {
    let mut ch = t.chars();
    matches!(ch.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && ch.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '\'')
}

fn parse_decl(e: &SExpr) -> Result<PredicateDecl, ParseError> {
    let l = e.as_list().expect("list");
    if l.len() != 3 {
        return Err(syntax(e.pos(), "expected (declare-pred NAME (coeffs RAT+))"));
    }
    let name = l[1].as_atom().filter(|t| is_ident(t)).ok_or_else(|| syntax(l[1].pos(), "expected a predicate name"))?;
    let cl = l[2].as_list().filter(|_| l[2].head() == Some("coeffs")).ok_or_else(|| syntax(l[2].pos(), "expected (coeffs RAT+)"))?;
    if cl.len() < 2 {
        return Err(syntax(l[2].pos(), "expected at least one coefficient"));
    }
    let coeffs = cl[1..].iter().map(parse_rat).collect::<Result<Vec<_>, _>>()?;
    PredicateDecl::new(name, coeffs)
}

fn parse_sentence(e: &SExpr, decls: &[PredicateDecl]) -> Result<Formula, ParseError> {
    let l = e.as_list().expect("list");
    if l.len() != 3 {
        return Err(syntax(e.pos(), "expected (exists VAR BODY) or (forall VAR BODY)"));
    }
    let quantifier = if l[0].as_atom() == Some("exists") { Quantifier::Exists } else { Quantifier::Forall };
    let var = l[1].as_atom().filter(|t| is_ident(t)).ok_or_else(|| syntax(l[1].pos(), "expected a variable"))?;
    let p = Parser { var, decls };
    let body = p.body(&l[2])?;
    Ok(Formula { decls: decls.to_vec(), quantifier, var: var.to_string(), body })
}

struct Parser<'a> {
    var: &'a str,
    decls: &'a [PredicateDecl],
}

impl Parser<'_> {
    fn body(&self, e: &SExpr) -> Result<Body, ParseError> {
        let l = e.as_list().ok_or_else(|| syntax(e.pos(), "expected a formula"))?;
        let head = e.head().ok_or_else(|| syntax(e.pos(), "expected a connective or atom"))?;
        let args = &l[1..];
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(syntax(e.pos(), &format!("`{head}` takes {n} arguments")))
            }
        };
        match head {
            "and" | "or" => {
                if args.is_empty() {
                    return Err(syntax(e.pos(), &format!("`{head}` needs at least one argument")));
                }
                let parts = args.iter().map(|a| self.body(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(if head == "and" { Body::And(parts) } else { Body::Or(parts) })
            }
            "not" => {
                arity(1)?;
                Ok(Body::Not(Box::new(self.body(&args[0])?)))
            }
            "=" | "<" | ">" => {
                arity(2)?;
                let op = match head {
                    "=" => CmpOp::Eq,
                    "<" => CmpOp::Lt,
                    _ => CmpOp::Gt,
                };
                Ok(Body::Atom(Atom::Cmp { op, lhs: self.term(&args[0])?, rhs: self.term(&args[1])? }))
            }
            "mod" => {
                arity(3)?;
                let term = self.term(&args[0])?;
                let modulus = parse_int(&args[1])?;
                if modulus < BigInt::from(2) {
                    return Err(ParseError::BadModulus { pos: args[1].pos() });
                }
                let residue = parse_int(&args[2])?;
                let residue = ((residue % &modulus) + &modulus) % &modulus;
                Ok(Body::Atom(Atom::Mod { term, modulus, residue }))
            }
            "pow" => {
                arity(2)?;
                let k = parse_int(&args[0])?;
                let k = k.to_u32().filter(|&k| k >= 2).ok_or(ParseError::BadExponent { pos: args[0].pos() })?;
                Ok(Body::Atom(Atom::Pow { k, term: self.term(&args[1])? }))
            }
            "pred" => {
                arity(2)?;
                let name = args[0].as_atom().ok_or_else(|| syntax(args[0].pos(), "expected a predicate name"))?;
                if !self.decls.iter().any(|d| d.name == name) {
                    return Err(ParseError::UnknownPredicate { name: name.to_string(), pos: args[0].pos() });
                }
                Ok(Body::Atom(Atom::Pred { name: name.to_string(), term: self.term(&args[1])? }))
            }
            _ => Err(syntax(e.pos(), &format!("unknown form `{head}`"))),
        }
    }

    fn term(&self, e: &SExpr) -> Result<Linear, ParseError> {
        match e {
            SExpr::Atom { text, pos } => {
                if let Some(n) = parse_int_text(text) {
                    Ok(Linear::constant(n))
                } else if text == self.var {
                    Ok(Linear::new(BigInt::one(), BigInt::zero()))
                } else if is_ident(text) {
                    Err(ParseError::MultipleVariables { expected: self.var.to_string(), found: text.clone(), pos: *pos })
                } else {
                    Err(syntax(*pos, "expected a term"))
                }
            }
            SExpr::List { items, pos } => {
                let head = e.head().ok_or_else(|| syntax(*pos, "expected a term"))?;
                let args = &items[1..];
                match head {
                    "+" if !args.is_empty() => {
                        let mut acc = Linear::constant(BigInt::zero());
                        for a in args {
                            acc = acc.add(&self.term(a)?);
                        }
                        Ok(acc)
                    }
                    "-" if args.len() == 1 => Ok(self.term(&args[0])?.neg()),
                    "-" if args.len() == 2 => Ok(self.term(&args[0])?.add(&self.term(&args[1])?.neg())),
                    "*" if args.len() == 2 => {
                        let l = self.term(&args[0])?;
                        let r = self.term(&args[1])?;
                        if l.a.is_zero() {
                            Ok(r.scale(&l.b))
                        } else if r.a.is_zero() {
                            Ok(l.scale(&r.b))
                        } else {
                            Err(ParseError::NonLinear { pos: *pos })
                        }
                    }
                    _ => Err(syntax(*pos, &format!("malformed term `{head}`"))),
                }
            }
        }
    }
}

/// Writes `r` as `p` or `p/q`.
fn write_rat(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for PredicateDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(declare-pred {} (coeffs", self.name)?;
        for c in &self.coeffs {
            write!(f, " ")?;
            write_rat(f, c)?;
        }
        write!(f, "))")
    }
}

struct BodyDisplay<'a>(&'a Body, &'a str);

impl fmt::Display for BodyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.1;
        match self.0 {
            Body::And(parts) | Body::Or(parts) => {
                write!(f, "({}", if matches!(self.0, Body::And(_)) { "and" } else { "or" })?;
                for p in parts {
                    write!(f, " {}", BodyDisplay(p, var))?;
                }
                write!(f, ")")
            }
            Body::Not(b) => write!(f, "(not {})", BodyDisplay(b, var)),
            Body::Atom(Atom::Cmp { op, lhs, rhs }) => {
                let s = match op {
                    CmpOp::Eq => "=",
                    CmpOp::Lt => "<",
                    CmpOp::Gt => ">",
                };
                write!(f, "({s} ")?;
                lhs.write(f, var)?;
                write!(f, " ")?;
                rhs.write(f, var)?;
                write!(f, ")")
            }
            Body::Atom(Atom::Mod { term, modulus, residue }) => {
                write!(f, "(mod ")?;
                term.write(f, var)?;
                write!(f, " {modulus} {residue})")
            }
            Body::Atom(Atom::Pow { k, term }) => {
                write!(f, "(pow {k} ")?;
                term.write(f, var)?;
                write!(f, ")")
            }
            Body::Atom(Atom::Pred { name, term }) => {
                write!(f, "(pred {name} ")?;
                term.write(f, var)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        let q = match self.quantifier {
            Quantifier::Exists => "exists",
            Quantifier::Forall => "forall",
        };
        write!(f, "({q} {} {})", self.var, BodyDisplay(&self.body, &self.var))
    }
}

impl Body {
    /// Number of atoms, used to bound random generators in tests.
    pub fn size(&self) -> usize {
        match self {
            Body::And(p) | Body::Or(p) => p.iter().map(Body::size).sum(),
            Body::Not(b) => b.size(),
            Body::Atom(_) => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn parses_power_sentence() {
        let f = parse("(exists x (and (> x 8) (pow 2 x) (pow 3 (+ x 1))))").unwrap();
        let want = Body::And(vec![
            Body::Atom(Atom::Cmp { op: CmpOp::Gt, lhs: Linear::new(bi(1), bi(0)), rhs: Linear::constant(bi(8)) }),
            Body::Atom(Atom::Pow { k: 2, term: Linear::new(bi(1), bi(0)) }),
            Body::Atom(Atom::Pow { k: 3, term: Linear::new(bi(1), bi(1)) }),
        ]);
        assert_eq!(f.body, want);
    }

    #[test]
    fn parses_predicate_atom() {
        let f = parse("(declare-pred T (coeffs 1/2 1/2 0)) (exists x (pred T (+ (* 2 x) 1)))").unwrap();
        assert_eq!(f.body, Body::Atom(Atom::Pred { name: "T".into(), term: Linear::new(bi(2), bi(1)) }));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse("(exists x (pow 1 x))"), Err(ParseError::BadExponent { pos: 15 }));
        assert!(matches!(parse("(exists x (pred T x))"), Err(ParseError::UnknownPredicate { .. })));
        assert!(matches!(parse("(exists x (= x y))"), Err(ParseError::MultipleVariables { .. })));
        assert!(matches!(
            parse("(declare-pred H (coeffs 1/3 0 0)) (exists x (pred H x))"),
            Err(ParseError::NotIntegerValued { .. })
        ));
        assert!(matches!(parse("(declare-pred Q (coeffs 1 0 0 0 0)) (exists x (pred Q x))"), Err(ParseError::DegreeTooHigh { .. })));
        assert!(matches!(parse("(exists x (= (* x x) 4))"), Err(ParseError::NonLinear { .. })));
        assert!(matches!(parse("(exists x (mod x 1 0))"), Err(ParseError::BadModulus { .. })));
        assert!(matches!(parse("(exists x (and (> x 1)"), Err(ParseError::Syntax { pos: 10, .. })));
    }

    #[test]
    fn printer_round_trips() {
        let src = "(declare-pred T (coeffs 1/2 1/2 0))\n(forall y (or (not (pred T (- y 3))) (mod (* -4 y) 6 11) (< (- y) 7) (= (+ y y) (* 3 (+ y 2)))))";
        let f = parse(src).unwrap();
        let printed = format!("{f}");
        assert_eq!(parse(&printed).unwrap(), f);
    }
}
