//! Normalization of a sentence into disjuncts of constraint systems, each
//! of the form `z > c ∧ (atoms in z)` with `x = ±(M z + r)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Atom, Body, CmpOp, Formula, Linear, Quantifier};
use crate::atoms::{Constraint, PolyAtom, PowerAtom};
use crate::error::ParseError;
use crate::numtheory::{crt_extended, div_ceil, div_floor, is_kth_power, mod_inverse, ResidueClass};
use crate::poly::IntPoly;
use crate::poly_solver::{depress, simplify_polys};
use crate::power_solver::{simplify_powers, Simplified, DEFAULT_SCAN_CAP};

/// `z > lower` together with atoms in `z`, where the original variable is
/// `x = sign * modulus * z + residue`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub lower: BigInt,
    pub positives: Vec<Constraint>,
    pub negatives: Vec<Constraint>,
    /// Negated atoms that are only evaluated at candidate points.
    pub pointwise: Vec<Constraint>,
    pub modulus: BigInt,
    pub residue: BigInt,
    pub sign_flipped: bool,
    pub log: Vec<String>,
}

impl ConstraintSystem {
    pub fn to_original(&self, z: &BigInt) -> BigInt {
        let y = if self.sign_flipped { -z } else { z.clone() };
        &self.modulus * y + &self.residue
    }

    pub fn check(&self, z: &BigInt) -> bool {
        z > &self.lower && self.positives.iter().chain(&self.negatives).chain(&self.pointwise).all(|c| c.holds(z))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Constraint> {
        self.positives.iter().chain(&self.negatives).chain(&self.pointwise)
    }

    pub fn has_poly(&self) -> bool {
        self.atoms().any(|c| matches!(c, Constraint::Poly(_)))
    }
}

/// A disjunct settled during normalization (a point or a bounded interval).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    /// Witness in the original variable.
    pub witness: Option<BigInt>,
    /// A missing witness is a proof that the disjunct is empty.
    pub certified: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Disjunct {
    System(ConstraintSystem),
    Resolved(Resolution),
}

/// Normalizes with the default interval-inspection cap. For a universal
/// sentence the disjuncts describe its counterexamples.
pub fn normalize(f: &Formula) -> Result<Vec<Disjunct>, ParseError> {
    normalize_with(f, DEFAULT_SCAN_CAP)
}

/// Literal in negation normal form. Comparisons are `D op 0` with `D` linear.
#[derive(Clone, Debug)]
enum Lit {
    Cmp(CmpOp, Linear),
    Mod { term: Linear, modulus: BigInt, residue: BigInt, positive: bool },
    Pow { k: u32, term: Linear, positive: bool },
    Pred { name: String, term: Linear, positive: bool },
    Const(bool),
}

enum Nnf {
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    Lit(Lit),
}

fn diff(l: &Linear, r: &Linear) -> Linear {
    Linear::new(&l.a - &r.a, &l.b - &r.b)
}

fn shift(l: &Linear, k: i64) -> Linear {
    Linear::new(l.a.clone(), &l.b + k)
}

fn nnf(f: &Formula, body: &Body, positive: bool) -> Result<Nnf, ParseError> {
    Ok(match body {
        Body::Not(b) => nnf(f, b, !positive)?,
        Body::And(parts) | Body::Or(parts) => {
            let inner = parts.iter().map(|p| nnf(f, p, positive)).collect::<Result<Vec<_>, _>>()?;
            if matches!(body, Body::And(_)) == positive {
                Nnf::And(inner)
            } else {
                Nnf::Or(inner)
            }
        }
        Body::Atom(a) => atom_nnf(f, a, positive)?,
    })
}

fn cmp_nnf(op: CmpOp, d: Linear, positive: bool) -> Nnf {
    match (op, positive) {
        (op, true) => Nnf::Lit(Lit::Cmp(op, d)),
        (CmpOp::Eq, false) => Nnf::Or(vec![Nnf::Lit(Lit::Cmp(CmpOp::Lt, d.clone())), Nnf::Lit(Lit::Cmp(CmpOp::Gt, d))]),
        // not (D < 0)  <=>  D + 1 > 0
        (CmpOp::Lt, false) => Nnf::Lit(Lit::Cmp(CmpOp::Gt, shift(&d, 1))),
        // not (D > 0)  <=>  D - 1 < 0
        (CmpOp::Gt, false) => Nnf::Lit(Lit::Cmp(CmpOp::Lt, shift(&d, -1))),
    }
}

fn atom_nnf(f: &Formula, a: &Atom, positive: bool) -> Result<Nnf, ParseError> {
    Ok(match a {
        Atom::Cmp { op, lhs, rhs } => cmp_nnf(*op, diff(lhs, rhs), positive),
        Atom::Mod { term, modulus, residue } => Nnf::Lit(Lit::Mod { term: term.clone(), modulus: modulus.clone(), residue: residue.clone(), positive }),
        Atom::Pow { k, term } => Nnf::Lit(Lit::Pow { k: *k, term: term.clone(), positive }),
        Atom::Pred { name, term } => {
            let decl = f.decl(name).ok_or_else(|| ParseError::UnknownPredicate { name: name.clone(), pos: 0 })?;
            match decl.degree() {
                0 => {
                    let c = decl.eval(&BigInt::zero()).to_integer();
                    cmp_nnf(CmpOp::Eq, Linear::new(term.a.clone(), &term.b - c), positive)
                }
                1 => {
                    // value set c0 + c1 Z
                    let c0 = decl.eval(&BigInt::zero()).to_integer();
                    let c1 = (decl.eval(&BigInt::one()).to_integer() - &c0).abs();
                    if c1.is_one() {
                        Nnf::Lit(Lit::Const(positive))
                    } else {
                        let residue = c0.mod_floor(&c1);
                        Nnf::Lit(Lit::Mod { term: term.clone(), modulus: c1, residue, positive })
                    }
                }
                _ => Nnf::Lit(Lit::Pred { name: name.clone(), term: term.clone(), positive }),
            }
        }
    })
}

fn dnf(n: Nnf) -> Vec<Vec<Lit>> {
    match n {
        Nnf::Lit(l) => vec![vec![l]],
        Nnf::Or(parts) => parts.into_iter().flat_map(dnf).collect(),
        Nnf::And(parts) => {
            let mut acc: Vec<Vec<Lit>> = vec![Vec::new()];
            for p in parts {
                let d = dnf(p);
                let mut next = Vec::with_capacity(acc.len() * d.len());
                for a in &acc {
                    for c in &d {
                        let mut v = a.clone();
                        v.extend(c.iter().cloned());
                        next.push(v);
                    }
                }
                acc = next;
            }
            acc
        }
    }
}

/// A conjunction of literals rewritten over `x`.
#[derive(Default)]
struct Conj {
    conflict: bool,
    eq: Option<BigInt>,
    lows: Vec<BigInt>,
    highs: Vec<BigInt>,
    mods: Vec<(BigInt, BTreeSet<BigInt>)>,
    atoms: Vec<Constraint>,
}

fn rewrite(f: &Formula, lits: Vec<Lit>) -> Conj {
    let mut c = Conj::default();
    for lit in lits {
        if c.conflict {
            break;
        }
        match lit {
            Lit::Const(v) => c.conflict |= !v,
            Lit::Cmp(op, Linear { a, b }) => {
                if a.is_zero() {
                    let holds = match op {
                        CmpOp::Eq => b.is_zero(),
                        CmpOp::Lt => b.is_negative(),
                        CmpOp::Gt => b.is_positive(),
                    };
                    c.conflict |= !holds;
                    continue;
                }
                let nb = -&b;
                match op {
                    CmpOp::Eq => {
                        if !nb.is_multiple_of(&a) {
                            c.conflict = true;
                        } else {
                            let p = &nb / &a;
                            match &c.eq {
                                Some(e) if *e != p => c.conflict = true,
                                _ => c.eq = Some(p),
                            }
                        }
                    }
                    // a x + b < 0
                    CmpOp::Lt if a.is_positive() => c.highs.push(div_ceil(&nb, &a)),
                    CmpOp::Lt => c.lows.push(div_floor(&nb, &a)),
                    // a x + b > 0
                    CmpOp::Gt if a.is_positive() => c.lows.push(div_floor(&nb, &a)),
                    CmpOp::Gt => c.highs.push(div_ceil(&nb, &a)),
                }
            }
            Lit::Mod { term: Linear { a, b }, modulus: m, residue: r, positive } => {
                if a.is_zero() {
                    c.conflict |= (&b - &r).is_multiple_of(&m) != positive;
                    continue;
                }
                let g = a.gcd(&m);
                let rhs = &r - &b;
                if !rhs.is_multiple_of(&g) {
                    c.conflict |= positive;
                    continue;
                }
                let m2 = &m / &g;
                if m2.is_one() {
                    c.conflict |= !positive;
                    continue;
                }
                let inv = mod_inverse(&(&a / &g), &m2).expect("coprime");
                let x0 = (rhs / &g * inv).mod_floor(&m2);
                let set: BTreeSet<BigInt> = if positive {
                    [x0].into_iter().collect()
                } else {
                    let mut s = BTreeSet::new();
                    let mut t = BigInt::zero();
                    while t < m2 {
                        if t != x0 {
                            s.insert(t.clone());
                        }
                        t += 1;
                    }
                    s
                };
                c.mods.push((m2, set));
            }
            Lit::Pow { k, term: Linear { a, b }, positive } => {
                if a.is_zero() {
                    c.conflict |= is_kth_power(&b, k) != positive;
                } else {
                    c.atoms.push(Constraint::Power(PowerAtom::new(positive, k, a, b)));
                }
            }
            Lit::Pred { name, term: Linear { a, b }, positive } => {
                let decl = f.decl(&name).expect("checked in nnf");
                if a.is_zero() {
                    let unit = depress(decl, &BigInt::one(), &BigInt::zero()).expect("degree 2 or 3");
                    c.conflict |= unit.predicate_at(&b) != positive;
                } else {
                    let p = depress(decl, &a, &b).expect("degree 2 or 3");
                    c.atoms.push(Constraint::Poly(PolyAtom { positive, ..p }));
                }
            }
        }
    }
    c
}

/// Intersects residue sets: `x mod M` in the returned set.
fn coalesce_mods(mods: &[(BigInt, BTreeSet<BigInt>)]) -> (BigInt, Vec<BigInt>) {
    let mut modulus = BigInt::one();
    let mut set = vec![BigInt::zero()];
    for (m, s) in mods {
        let mut next = BTreeSet::new();
        let mut nm = modulus.clone();
        for r1 in &set {
            for r2 in s {
                if let Some(c) = crt_extended(&[ResidueClass::new(modulus.clone(), r1.clone()), ResidueClass::new(m.clone(), r2.clone())]) {
                    nm = c.modulus.clone();
                    next.insert(c.residue);
                }
            }
        }
        modulus = if next.is_empty() { modulus.lcm(m) } else { nm };
        set = next.into_iter().collect();
    }
    (modulus, set)
}

/// Checks atoms over an inclusive interval of `w`, where `x = step * w + r`,
/// in order of increasing `|x|`.
fn inspect(atoms: &[Constraint], lo: &BigInt, hi: &BigInt, step: &BigInt, r: &BigInt, cap: u64) -> Resolution {
    if lo > hi {
        return Resolution { witness: None, certified: true, note: "empty interval".into() };
    }
    let to_x = |w: &BigInt| step * w + r;
    let key = |w: &BigInt| {
        let x = to_x(w);
        (x.abs(), x)
    };
    let count: BigInt = hi - lo + 1;
    if count <= BigInt::from(cap) {
        let mut left = div_floor(&-r, step).clamp(lo.clone(), hi.clone());
        let mut right: BigInt = &left + 1;
        loop {
            let l_ok = &left >= lo;
            let r_ok = &right <= hi;
            let w = match (l_ok, r_ok) {
                (false, false) => break,
                (true, false) => left.clone(),
                (false, true) => right.clone(),
                (true, true) => {
                    if key(&left) <= key(&right) {
                        left.clone()
                    } else {
                        right.clone()
                    }
                }
            };
            if w == left {
                left -= 1;
            } else {
                right += 1;
            }
            if atoms.iter().all(|c| c.holds(&w)) {
                return Resolution { witness: Some(to_x(&w)), certified: true, note: format!("interval [{lo}, {hi}] inspected") };
            }
        }
        return Resolution { witness: None, certified: true, note: format!("interval [{lo}, {hi}] has no solution") };
    }
    // too wide: enumerate the members of the sparsest positive atom
    let mut best: Option<(BigInt, Vec<(BigInt, BigInt)>, &Constraint)> = None;
    for c in atoms.iter().filter(|c| c.positive()) {
        let (a, b) = c.coeffs();
        let (v1, v2) = (a * lo + b, a * hi + b);
        let (vlo, vhi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        let f = match c {
            Constraint::Power(p) => {
                let mut co = vec![BigInt::zero(); p.k as usize + 1];
                co[p.k as usize] = BigInt::one();
                IntPoly::new(co)
            }
            Constraint::Poly(p) => p.f(),
        };
        let Some(ivs) = f.solve_between(Some(&vlo), Some(&vhi)) else { continue };
        let n: BigInt = ivs.iter().map(|(s, t)| t - s + 1).sum();
        if best.as_ref().is_none_or(|(m, _, _)| n < *m) {
            best = Some((n, ivs, c));
        }
    }
    match best {
        Some((n, ivs, c)) if n <= BigInt::from(cap) => {
            let (a, b) = c.coeffs();
            let mut found: Option<BigInt> = None;
            for (s, t) in ivs {
                let mut u = s;
                while u <= t {
                    let v = match c {
                        Constraint::Power(p) => num_traits::pow(u.clone(), p.k as usize),
                        Constraint::Poly(p) => p.f_at(&u),
                    } - b;
                    if v.is_multiple_of(a) {
                        let w = v / a;
                        if &w >= lo && &w <= hi && atoms.iter().all(|c| c.holds(&w)) && found.as_ref().is_none_or(|f| key(&w) < key(f)) {
                            found = Some(w);
                        }
                    }
                    u += 1;
                }
            }
            let note = format!("interval [{lo}, {hi}] inspected through {n} atom parameters");
            Resolution { witness: found.map(|w| to_x(&w)), certified: true, note }
        }
        _ => Resolution { witness: None, certified: false, note: format!("interval [{lo}, {hi}] exceeds the inspection cap") },
    }
}

/// Removes duplicates; `Err` when an atom occurs with both signs.
fn dedup(atoms: Vec<Constraint>) -> Result<Vec<Constraint>, String> {
    let mut out: Vec<Constraint> = Vec::new();
    for c in atoms {
        if out.contains(&c) {
            continue;
        }
        if out.contains(&c.negated()) {
            return Err(format!("{c} occurs with both signs"));
        }
        out.push(c);
    }
    Ok(out)
}

struct Frame<'a> {
    step: BigInt,
    r: BigInt,
    flipped: bool,
    modulus: &'a BigInt,
    cap: u64,
}

/// Builds the disjuncts for `z > lower` with the given atoms in `z`.
fn half_line(atoms: Vec<Constraint>, lower: BigInt, fr: &Frame<'_>, out: &mut Vec<Disjunct>) {
    let mut atoms: Vec<Constraint> = atoms.into_iter().map(|c| if c.coeffs().0.is_negative() { c.flip_odd().unwrap_or(c) } else { c }).collect();
    // an even positive atom with a < 0 bounds z above
    let upper = atoms.iter().filter(|c| c.positive()).filter_map(Constraint::even_upper_bound).min();
    if let Some(u) = upper {
        out.push(Disjunct::Resolved(inspect(&atoms, &(&lower + 1), &u, &fr.step, &fr.r, fr.cap)));
        return;
    }
    // an even negative atom with a < 0 is true beyond its bound
    if let Some(u) = atoms.iter().filter(|c| !c.positive()).filter_map(Constraint::even_upper_bound).max() {
        if u > lower {
            out.push(Disjunct::Resolved(inspect(&atoms, &(&lower + 1), &u, &fr.step, &fr.r, fr.cap)));
        }
        atoms.retain(|c| c.positive() || c.even_upper_bound().is_none());
        let lower = lower.max(u);
        return half_line(atoms, lower, fr, out);
    }
    let atoms = match dedup(atoms) {
        Ok(a) => a,
        Err(msg) => {
            out.push(Disjunct::Resolved(Resolution { witness: None, certified: true, note: format!("forced contradiction: {msg}") }));
            return;
        }
    };
    let (positives, negatives): (Vec<Constraint>, Vec<Constraint>) = atoms.into_iter().partition(Constraint::positive);
    let mut sys = ConstraintSystem {
        lower,
        positives,
        negatives,
        pointwise: Vec::new(),
        modulus: fr.modulus.clone(),
        residue: fr.r.clone(),
        sign_flipped: fr.flipped,
        log: Vec::new(),
    };
    let original = sys.clone();
    let pin = |sys: &ConstraintSystem, p: Option<BigInt>| {
        let note = sys.log.join("; ");
        match p {
            Some(z) if original.check(&z) => Resolution { witness: Some(original.to_original(&z)), certified: true, note },
            _ => Resolution { witness: None, certified: true, note },
        }
    };
    match simplify_powers(&mut sys) {
        Simplified::Keep => {}
        Simplified::Pin(p) => {
            out.push(Disjunct::Resolved(pin(&sys, p)));
            return;
        }
        Simplified::Contradiction(msg) => {
            out.push(Disjunct::Resolved(Resolution { witness: None, certified: true, note: format!("forced contradiction: {msg}") }));
            return;
        }
    }
    if sys.has_poly() {
        for list in [&mut sys.positives, &mut sys.negatives, &mut sys.pointwise] {
            for c in list.iter_mut() {
                if let Constraint::Power(p) = c {
                    if p.k <= 3 {
                        *c = Constraint::Poly(PolyAtom::from_power(p));
                    }
                }
            }
        }
        let (res, extra) = simplify_polys(&mut sys);
        match res {
            Simplified::Keep => {}
            Simplified::Pin(p) => {
                out.push(Disjunct::Resolved(pin(&sys, p)));
                return;
            }
            Simplified::Contradiction(msg) => {
                out.push(Disjunct::Resolved(Resolution { witness: None, certified: true, note: format!("forced contradiction: {msg}") }));
                return;
            }
        }
        if let Some(z) = extra.iter().filter(|z| original.check(z)).min_by_key(|z| {
            let x = original.to_original(z);
            (x.abs(), x)
        }) {
            out.push(Disjunct::Resolved(Resolution { witness: Some(original.to_original(z)), certified: true, note: "extra curve point".into() }));
        }
    }
    out.push(Disjunct::System(sys));
}

pub fn normalize_with(f: &Formula, inspect_cap: u64) -> Result<Vec<Disjunct>, ParseError> {
    let positive = f.quantifier == Quantifier::Exists;
    let tree = nnf(f, &f.body, positive)?;
    let mut out = Vec::new();
    for lits in dnf(tree) {
        let c = rewrite(f, lits);
        if c.conflict {
            out.push(Disjunct::Resolved(Resolution { witness: None, certified: true, note: "conflicting literals".into() }));
            continue;
        }
        let (m, residues) = coalesce_mods(&c.mods);
        if let Some(e) = &c.eq {
            let ok = residues.contains(&e.mod_floor(&m)) && c.lows.iter().all(|l| e > l) && c.highs.iter().all(|h| e < h) && c.atoms.iter().all(|a| a.holds(e));
            out.push(Disjunct::Resolved(Resolution { witness: ok.then(|| e.clone()), certified: true, note: format!("point x={e}") }));
            continue;
        }
        if residues.is_empty() {
            out.push(Disjunct::Resolved(Resolution { witness: None, certified: true, note: "incompatible congruences".into() }));
            continue;
        }
        for r in residues {
            // x = M y + r
            let lo = c.lows.iter().map(|l| div_floor(&(l - &r), &m)).max();
            let hi = c.highs.iter().map(|h| div_ceil(&(h - &r), &m)).min();
            let atoms: Vec<Constraint> = c.atoms.iter().map(|a| a.substitute(&m, &r)).collect();
            let up = Frame { step: m.clone(), r: r.clone(), flipped: false, modulus: &m, cap: inspect_cap };
            let down = Frame { step: -&m, r: r.clone(), flipped: true, modulus: &m, cap: inspect_cap };
            let flip = |atoms: &[Constraint]| -> Vec<Constraint> { atoms.iter().map(|a| a.substitute(&-BigInt::one(), &BigInt::zero())).collect() };
            match (lo, hi) {
                (Some(lo), Some(hi)) => out.push(Disjunct::Resolved(inspect(&atoms, &(lo + 1), &(hi - 1), &m, &r, inspect_cap))),
                (Some(lo), None) => half_line(atoms, lo, &up, &mut out),
                (None, Some(hi)) => half_line(flip(&atoms), -hi, &down, &mut out),
                (None, None) => {
                    let zero = BigInt::zero();
                    let hit = atoms.iter().all(|a| a.holds(&zero));
                    out.push(Disjunct::Resolved(Resolution { witness: hit.then(|| r.clone()), certified: true, note: format!("point x={r}") }));
                    half_line(atoms.clone(), zero.clone(), &up, &mut out);
                    half_line(flip(&atoms), zero, &down, &mut out);
                }
            }
        }
    }
    Ok(out)
}
