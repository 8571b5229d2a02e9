//! Brute-force evaluator. Deliberately shares no arithmetic with the
//! solver: roots come from `num_integer::Roots`, polynomial preimages from
//! a local monotone-piece bisection.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::formula::{Atom, Body, CmpOp, Formula, Linear, PredicateDecl, Quantifier};

/// Result of evaluating the existential matrix over `|x| <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub bound: u64,
    /// Points where the existential form holds (counterexamples for a
    /// universal sentence), in increasing order.
    pub witnesses: Vec<BigInt>,
    /// False when the witness cap stopped the scan early.
    pub exhaustive: bool,
}

/// Integer polynomial `coeffs / den` with coefficients low-first.
#[derive(Clone, Debug)]
struct Scaled {
    coeffs: Vec<BigInt>,
    den: BigInt,
}

impl Scaled {
    fn of(decl: &PredicateDecl) -> Self {
        let den = decl.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let coeffs = decl.coeffs.iter().rev().map(|c| (c * num_rational::BigRational::from_integer(den.clone())).to_integer()).collect();
        Scaled { coeffs, den }
    }
}

fn horner(c: &[BigInt], u: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, k| acc * u + k)
}

/// Integer roots of a nonconstant polynomial of degree at most 3.
fn integer_roots(c: &[BigInt]) -> Vec<BigInt> {
    let mut c = c.to_vec();
    while c.len() > 1 && c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d].abs();
    let bound: BigInt = c[..d].iter().map(|x| x.abs()).max().unwrap_or_default() / &lead + 2;
    // critical points of c, bracketed by integers
    let mut cuts = alloc::vec![-&bound, bound.clone()];
    let deriv: Vec<BigInt> = (1..=d).map(|i| &c[i] * i).collect();
    match deriv.len() {
        2 => {
            let (p, q) = (&deriv[1], &deriv[0]);
            let r = (-q).div_floor(p);
            cuts.extend([r.clone(), r + 1]);
        }
        3 => {
            let (aa, bb, cc) = (&deriv[2], &deriv[1], &deriv[0]);
            let disc: BigInt = bb * bb - aa * cc * 4;
            if !disc.is_negative() {
                let s = disc.sqrt();
                for num in [-bb - &s - 1, -bb - &s, -bb + &s, -bb + &s + 1] {
                    let r = num.div_floor(&(aa * 2));
                    cuts.extend([&r - 1, r.clone(), r + 1]);
                }
            }
        }
        _ => {}
    }
    cuts.retain(|x| x.abs() <= bound);
    cuts.sort();
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if horner(&c, lo).is_zero() {
            out.push(lo.clone());
        }
        // strictly monotone on (lo, hi)
        let (mut l, mut h) = (lo + 1, hi - 1);
        if l > h {
            continue;
        }
        let rising = horner(&c, &h) >= horner(&c, &l);
        while l < h {
            let mid: BigInt = (&l + &h).div_floor(&BigInt::from(2));
            let v = horner(&c, &mid);
            if (v.is_negative() && rising) || (v.is_positive() && !rising) {
                l = mid + 1;
            } else {
                h = mid;
            }
        }
        if horner(&c, &l).is_zero() {
            out.push(l);
        }
    }
    if let Some(last) = cuts.last() {
        if horner(&c, last).is_zero() {
            out.push(last.clone());
        }
    }
    out.sort();
    out.dedup();
    out
}

fn kth_power(v: &BigInt, k: u32) -> bool {
    if v.is_negative() {
        return k % 2 == 1 && kth_power(&-v, k);
    }
    if let Some(s) = v.to_u128() {
        let r = s.nth_root(k);
        return r.checked_pow(k) == Some(s);
    }
    let r = v.nth_root(k);
    num_traits::pow(r, k as usize) == *v
}


/// Atom with machine-sized data, used when everything fits.
#[derive(Clone, Debug)]
enum Small {
    And(Vec<Small>),
    Or(Vec<Small>),
    Not(alloc::boxed::Box<Small>),
    Cmp(CmpOp, i128, i128),
    Mod(i128, i128, i128, i128),
    Pow(u32, i128, i128),
    Pred(usize, i128, i128),
}

fn small_lin(t: &Linear) -> Option<(i128, i128)> {
    let (a, b) = (t.a.to_i64()?, t.b.to_i64()?);
    Some((a as i128, b as i128))
}

fn compile(b: &Body, names: &[&str]) -> Option<Small> {
    let parts = |ps: &[Body]| ps.iter().map(|p| compile(p, names)).collect::<Option<Vec<_>>>();
    Some(match b {
        Body::And(ps) => Small::And(parts(ps)?),
        Body::Or(ps) => Small::Or(parts(ps)?),
        Body::Not(p) => Small::Not(alloc::boxed::Box::new(compile(p, names)?)),
        Body::Atom(Atom::Cmp { op, lhs, rhs }) => {
            let (a1, b1) = small_lin(lhs)?;
            let (a2, b2) = small_lin(rhs)?;
            Small::Cmp(*op, a1 - a2, b1 - b2)
        }
        Body::Atom(Atom::Mod { term, modulus, residue }) => {
            let (a, b) = small_lin(term)?;
            Small::Mod(a, b, modulus.to_i64()? as i128, residue.to_i64()? as i128)
        }
        Body::Atom(Atom::Pow { k, term }) => {
            let (a, b) = small_lin(term)?;
            Small::Pow(*k, a, b)
        }
        Body::Atom(Atom::Pred { name, term }) => {
            let (a, b) = small_lin(term)?;
            Small::Pred(names.iter().position(|n| n == name)?, a, b)
        }
    })
}

fn small_cost(b: &Small) -> u8 {
    match b {
        Small::Cmp(..) | Small::Mod(..) => 0,
        Small::Pow(..) => 1,
        _ => 2,
    }
}

fn kth_power_small(v: i128, k: u32) -> bool {
    if v < 0 {
        return k % 2 == 1 && kth_power_small(-v, k);
    }
    let r = (v as u128).nth_root(k);
    r.checked_pow(k) == Some(v as u128)
}

fn horner_small(c: &[i128], u: i128) -> Option<i128> {
    c.iter().rev().try_fold(0i128, |acc, k| acc.checked_mul(u)?.checked_add(*k))
}

/// Integer-root test on machine integers; `None` on overflow.
fn has_root_small(c: &[i128]) -> Option<bool> {
    let d = c.len() - 1;
    let lead = c[d].abs();
    let bound = c[..d].iter().map(|x| x.abs()).max().unwrap_or(0) / lead + 2;
    let mut cuts = alloc::vec![-bound, bound];
    match d {
        2 => {
            let r = (-c[1]).div_euclid(2 * c[2]);
            cuts.extend([r - 1, r, r + 1]);
        }
        3 => {
            let (aa, bb, cc) = (3 * c[3], 2 * c[2], c[1]);
            let disc = bb.checked_mul(bb)?.checked_sub(aa.checked_mul(cc)?.checked_mul(4)?)?;
            if disc >= 0 {
                let s = (disc as u128).sqrt() as i128;
                for num in [-bb - s - 1, -bb - s, -bb + s, -bb + s + 1] {
                    // within one of the true floor either way
                    let r = num.div_euclid(2 * aa);
                    cuts.extend([r - 2, r - 1, r, r + 1, r + 2]);
                }
            }
        }
        _ => return None,
    }
    cuts.retain(|x| x.abs() <= bound);
    cuts.sort_unstable();
    cuts.dedup();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if horner_small(c, lo)? == 0 || horner_small(c, hi)? == 0 {
            return Some(true);
        }
        let (mut l, mut h) = (lo + 1, hi - 1);
        if l > h {
            continue;
        }
        let rising = horner_small(c, h)? >= horner_small(c, l)?;
        while l < h {
            let mid = l + (h - l) / 2;
            let v = horner_small(c, mid)?;
            if (v < 0 && rising) || (v > 0 && !rising) {
                l = mid + 1;
            } else {
                h = mid;
            }
        }
        if horner_small(c, l)? == 0 {
            return Some(true);
        }
    }
    Some(false)
}

/// Evaluator for one formula, with predicate data prepared once.
pub struct Evaluator<'a> {
    f: &'a Formula,
    preds: BTreeMap<&'a str, Scaled>,
    small: Option<(Small, Vec<Vec<i128>>, Vec<i128>)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(f: &'a Formula) -> Self {
        let preds: BTreeMap<&str, Scaled> = f.decls.iter().map(|d| (d.name.as_str(), Scaled::of(d))).collect();
        let names: Vec<&str> = f.decls.iter().map(|d| d.name.as_str()).collect();
        let small = (|| {
            let tree = compile(&f.body, &names)?;
            let mut coeffs = Vec::new();
            let mut dens = Vec::new();
            for n in &names {
                let p = &preds[n];
                coeffs.push(p.coeffs.iter().map(|c| c.to_i64().map(i128::from)).collect::<Option<Vec<_>>>()?);
                dens.push(i128::from(p.den.to_i64()?));
            }
            Some((tree, coeffs, dens))
        })();
        Evaluator { f, preds, small }
    }

    fn term(t: &Linear, x: &BigInt) -> BigInt {
        &t.a * x + &t.b
    }

    /// Is `v` in the value set of the named predicate?
    pub fn in_image(&self, name: &str, v: &BigInt) -> bool {
        let p = &self.preds[name];
        let mut c = p.coeffs.clone();
        c[0] -= &p.den * v;
        if c.len() == 1 {
            return c[0].is_zero();
        }
        !integer_roots(&c).is_empty()
    }

    fn atom(&self, a: &Atom, x: &BigInt) -> bool {
        match a {
            Atom::Cmp { op, lhs, rhs } => {
                let (l, r) = (Self::term(lhs, x), Self::term(rhs, x));
                match op {
                    CmpOp::Eq => l == r,
                    CmpOp::Lt => l < r,
                    CmpOp::Gt => l > r,
                }
            }
            Atom::Mod { term, modulus, residue } => (Self::term(term, x) - residue).is_multiple_of(modulus),
            Atom::Pow { k, term } => kth_power(&Self::term(term, x), *k),
            Atom::Pred { name, term } => self.in_image(name, &Self::term(term, x)),
        }
    }

    fn cost(b: &Body) -> u8 {
        match b {
            Body::Atom(Atom::Cmp { .. } | Atom::Mod { .. }) => 0,
            Body::Atom(Atom::Pow { .. }) => 1,
            _ => 2,
        }
    }

    fn body(&self, b: &Body, x: &BigInt) -> bool {
        match b {
            Body::Atom(a) => self.atom(a, x),
            Body::Not(inner) => !self.body(inner, x),
            Body::And(parts) | Body::Or(parts) => {
                let want = matches!(b, Body::Or(_));
                // cheap atoms first; the result does not depend on order
                for pass in 0..=2 {
                    for p in parts.iter().filter(|p| Self::cost(p) == pass) {
                        if self.body(p, x) == want {
                            return want;
                        }
                    }
                }
                !want
            }
        }
    }

    fn small_body(&self, b: &Small, x: i128, data: &(Small, Vec<Vec<i128>>, Vec<i128>)) -> Option<bool> {
        Some(match b {
            Small::Cmp(op, a, c) => {
                let v = a * x + c;
                match op {
                    CmpOp::Eq => v == 0,
                    CmpOp::Lt => v < 0,
                    CmpOp::Gt => v > 0,
                }
            }
            Small::Mod(a, c, m, r) => (a * x + c - r).rem_euclid(*m) == 0,
            Small::Pow(k, a, c) => kth_power_small(a * x + c, *k),
            Small::Pred(i, a, c) => {
                let v = a * x + c;
                let mut co = data.1[*i].clone();
                if co.len() == 1 {
                    return Some(co[0] == data.2[*i] * v);
                }
                co[0] = co[0].checked_sub(data.2[*i].checked_mul(v)?)?;
                has_root_small(&co)?
            }
            Small::Not(p) => !self.small_body(p, x, data)?,
            Small::And(ps) | Small::Or(ps) => {
                let want = matches!(b, Small::Or(_));
                for pass in 0..=2 {
                    for p in ps.iter().filter(|p| small_cost(p) == pass) {
                        if self.small_body(p, x, data)? == want {
                            return Some(want);
                        }
                    }
                }
                !want
            }
        })
    }

    /// The body at a machine-sized `x`, without allocating when possible.
    pub fn holds_i64(&self, x: i64) -> bool {
        if let Some(data) = &self.small {
            if x.unsigned_abs() < 1 << 40 {
                if let Some(v) = self.small_body(&data.0, x as i128, data) {
                    return v;
                }
            }
        }
        self.holds(&BigInt::from(x))
    }

    /// Existential form at a machine-sized `x`.
    pub fn matrix_i64(&self, x: i64) -> bool {
        self.holds_i64(x) != (self.f.quantifier == Quantifier::Forall)
    }

    /// The body at `x`.
    pub fn holds(&self, x: &BigInt) -> bool {
        self.body(&self.f.body, x)
    }

    /// The existential form at `x`: the body, or its negation under `forall`.
    pub fn matrix(&self, x: &BigInt) -> bool {
        self.holds(x) != (self.f.quantifier == Quantifier::Forall)
    }
}

/// Direct semantics of the body at `x`.
pub fn eval_at(f: &Formula, x: &BigInt) -> bool {
    Evaluator::new(f).holds(x)
}

/// Evaluates every `|x| <= bound`.
pub fn scan(f: &Formula, bound: u64) -> ScanReport {
    scan_capped(f, bound, usize::MAX)
}

/// Like [`scan`] but stops after `cap` witnesses.
pub fn scan_capped(f: &Formula, bound: u64, cap: usize) -> ScanReport {
    let ev = Evaluator::new(f);
    let mut witnesses = Vec::new();
    let mut exhaustive = true;
    let b = bound as i64;
    for x in -b..=b {
        if ev.matrix_i64(x) {
            if witnesses.len() == cap {
                exhaustive = false;
                break;
            }
            witnesses.push(BigInt::from(x));
        }
    }
    ScanReport { bound, witnesses, exhaustive }
}
