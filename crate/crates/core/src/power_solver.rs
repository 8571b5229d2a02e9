//! Systems of perfect-power constraints `Z^k(a z + b)` over `z > c`.
//!
//! Positive atoms are solved symbolically into a [`SolutionSet`]; negative
//! atoms only ever remove a density-zero part of an infinite set, so the
//! witness search scans the set upward and checks every atom exactly.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::atoms::{Constraint, PolyAtom, PowerAtom};
use crate::formula::ConstraintSystem;
use crate::lrbs::{IndexSet, Lrbs};
use crate::numtheory::{crt_extended, divisor_pairs, factor, is_kth_power, kth_root, valuation, ResidueClass};
use crate::pell::solve_generalized;
use crate::poly::{IntPoly, RatPoly};

pub const DEFAULT_BOUND: u64 = 1_000_000;
pub const DEFAULT_SCAN_CAP: u64 = 1_000_000;

/// Residue tables are only built for moduli up to this size.
pub(crate) const TABLE_LIMIT: u64 = 1 << 21;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    /// Bound `H` on auxiliary unknowns in enumerations whose finiteness is
    /// only known through impractically large effective bounds.
    pub bound: u64,
    /// Candidates inspected by a witness search before giving up.
    pub scan_cap: u64,
    /// Largest bounded interval inspected point by point.
    pub inspect_cap: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { bound: DEFAULT_BOUND, scan_cap: DEFAULT_SCAN_CAP, inspect_cap: DEFAULT_SCAN_CAP }
    }
}

/// Result of deciding a sentence.
///
/// For an existential sentence `Sat` carries a witness. A universal sentence
/// is `Sat` when valid and `Unsat` with a counterexample otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat { witness: Option<BigInt> },
    Unsat { counterexample: Option<BigInt> },
    Unknown { reason: String, bound: u64 },
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Sat { .. } => 0,
            Verdict::Unsat { .. } => 1,
            Verdict::Unknown { .. } => 2,
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Verdict::Sat { witness: Some(x) } => write!(f, "sat x={x}"),
            Verdict::Sat { witness: None } => write!(f, "sat"),
            Verdict::Unsat { counterexample: Some(x) } => write!(f, "unsat (counterexample x={x})"),
            Verdict::Unsat { counterexample: None } => write!(f, "unsat"),
            Verdict::Unknown { reason, bound } => write!(f, "unknown ({reason}, bound={bound})"),
        }
    }
}

/// Truth of `c1 = Z^k(c x + d)` forced by `c2 = Z^j(a x + b)` holding, when
/// `c1` is redundant with respect to `c2` (`k | j` and `a d = b c`).
///
/// At the common zero `x = -b/a` both values are 0, so `c1` holds there
/// regardless of the returned value.
pub fn is_redundant(c1: &PowerAtom, c2: &PowerAtom) -> Option<bool> {
    if c2.k % c1.k != 0 || &c2.a * &c1.b != &c2.b * &c1.a {
        return None;
    }
    let t = &c2.a * num_traits::pow(c1.a.clone(), c1.k as usize - 1);
    Some(is_kth_power(&t, c1.k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coalesced {
    Atom(PowerAtom),
    /// The atoms hold simultaneously only where their common value is 0;
    /// `None` when that point is not an integer.
    OnlyPoint(Option<BigInt>),
}

/// Merges pairwise similar positive atoms into one `Z^K(A x + B)` with
/// `K = lcm(k_i)`.
pub fn coalesce_similar(atoms: &[PowerAtom]) -> Coalesced {
    assert!(!atoms.is_empty());
    if atoms.len() == 1 {
        return Coalesced::Atom(atoms[0].clone());
    }
    let first = &atoms[0];
    let g = first.a.gcd(&first.b);
    let (a0, b0) = (&first.a / &g, &first.b / &g);
    let lambdas: Vec<BigInt> = atoms.iter().map(|p| &p.a / &a0).collect();
    let big_k = atoms.iter().fold(BigInt::one(), |acc, p| acc.lcm(&BigInt::from(p.k)));
    let mut primes: BTreeSet<BigInt> = BTreeSet::new();
    for l in &lambdas {
        primes.extend(factor(l).expect("nonzero").primes().cloned());
    }
    let mut mult = BigInt::one();
    for p in &primes {
        let classes: Vec<ResidueClass> = atoms
            .iter()
            .zip(&lambdas)
            .map(|(at, l)| {
                let v = valuation(p, l).expect("nonzero");
                ResidueClass::new(BigInt::from(at.k), -BigInt::from(v))
            })
            .collect();
        match crt_extended(&classes) {
            Some(c) => {
                let r = (-c.residue).mod_floor(&big_k);
                mult *= num_traits::pow(p.clone(), r.to_usize().expect("small exponent"));
            }
            None => {
                let point = (-&b0).is_multiple_of(&a0).then(|| -&b0 / &a0);
                return Coalesced::OnlyPoint(point);
            }
        }
    }
    let k = big_k.to_u32().expect("small exponent");
    Coalesced::Atom(PowerAtom::new(true, k, &a0 * &mult, &b0 * &mult))
}

/// What preprocessing left of a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Simplified {
    Keep,
    /// Only this value of the system variable can satisfy the system.
    Pin(Option<BigInt>),
    Contradiction(String),
}

fn zero_point(a: &BigInt, b: &BigInt) -> Option<BigInt> {
    (-b).is_multiple_of(a).then(|| -b / a)
}

fn powers(list: &[Constraint]) -> Vec<(usize, PowerAtom)> {
    list.iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            Constraint::Power(p) => Some((i, p.clone())),
            Constraint::Poly(_) => None,
        })
        .collect()
}

fn discard_redundant(sys: &mut ConstraintSystem) -> Simplified {
    let mut i = 0;
    while i < sys.positives.len() {
        let Constraint::Power(p) = &sys.positives[i] else {
            i += 1;
            continue;
        };
        let hit = powers(&sys.positives).into_iter().find_map(|(j, q)| (j != i).then(|| is_redundant(p, &q).map(|v| (q, v))).flatten());
        match hit {
            Some((q, true)) => {
                sys.log.push(format!("redundant: {p} w.r.t. {q}, forced true; dropped"));
                sys.positives.remove(i);
            }
            Some((q, false)) => {
                sys.log.push(format!("redundant: {p} w.r.t. {q}, forced false; only the common zero remains"));
                return Simplified::Pin(zero_point(&q.a, &q.b));
            }
            None => i += 1,
        }
    }
    let mut i = 0;
    while i < sys.negatives.len() {
        let Constraint::Power(n) = &sys.negatives[i] else {
            i += 1;
            continue;
        };
        let hit = powers(&sys.positives).into_iter().find_map(|(_, q)| is_redundant(&PowerAtom { positive: true, ..n.clone() }, &q).map(|v| (q, v)));
        match hit {
            Some((q, true)) => {
                let msg = format!("redundant: {n} w.r.t. {q}, forced true; contradiction");
                sys.log.push(msg.clone());
                return Simplified::Contradiction(msg);
            }
            Some((q, false)) => {
                sys.log.push(format!("redundant: {n} w.r.t. {q}, forced false; checked pointwise"));
                let c = sys.negatives.remove(i);
                sys.pointwise.push(c);
            }
            None => i += 1,
        }
    }
    Simplified::Keep
}

fn coalesce_positives(sys: &mut ConstraintSystem) -> Simplified {
    let atoms = powers(&sys.positives);
    let mut used = vec![false; atoms.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..atoms.len() {
        if used[i] {
            continue;
        }
        let mut g = vec![i];
        for j in i + 1..atoms.len() {
            if !used[j] && atoms[i].1.similar(&atoms[j].1) {
                used[j] = true;
                g.push(j);
            }
        }
        groups.push(g);
    }
    let mut drop: BTreeSet<usize> = BTreeSet::new();
    let mut added = Vec::new();
    for g in groups.into_iter().filter(|g| g.len() > 1) {
        let members: Vec<PowerAtom> = g.iter().map(|&i| atoms[i].1.clone()).collect();
        let names: Vec<String> = members.iter().map(|m| format!("{m}")).collect();
        match coalesce_similar(&members) {
            Coalesced::Atom(c) => {
                sys.log.push(format!("coalesced {} into {c}", names.join(", ")));
                drop.extend(g.iter().map(|&i| atoms[i].0));
                added.push(Constraint::Power(c));
            }
            Coalesced::OnlyPoint(p) => {
                sys.log.push(format!("coalescing {} leaves only the common zero", names.join(", ")));
                return Simplified::Pin(p);
            }
        }
    }
    let mut kept: Vec<Constraint> = sys.positives.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, c)| c.clone()).collect();
    kept.extend(added);
    sys.positives = kept;
    Simplified::Keep
}

/// Discards redundant atoms, coalesces similar positives, then discards
/// redundant atoms again. Only power atoms take part.
pub fn simplify_powers(sys: &mut ConstraintSystem) -> Simplified {
    for step in [discard_redundant, coalesce_positives, discard_redundant] {
        let r = step(sys);
        if r != Simplified::Keep {
            return r;
        }
    }
    Simplified::Keep
}

/// One component of a solution set, in the system variable `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Part {
    /// Every integer.
    All,
    /// `{ poly(s) : s mod modulus in residues }`, integral values only.
    Images { poly: RatPoly, modulus: BigInt, residues: BTreeSet<BigInt> },
    /// `{ map(seq(n)) : n in indices }`, integral values only. `exact` is
    /// false when `indices` over-approximates the members.
    Lrbs { seq: Lrbs, map: RatPoly, indices: IndexSet, exact: bool },
    Points(BTreeSet<BigInt>),
}

impl Part {
    fn is_finite(&self) -> bool {
        match self {
            Part::All => false,
            Part::Images { residues, .. } => residues.is_empty(),
            Part::Lrbs { indices, .. } => indices.is_finite(),
            Part::Points(_) => true,
        }
    }
}

/// Values of `z` satisfying every positive atom (before the lower bound).
///
/// `complete` is false when a finite set came from a bounded enumeration,
/// in which case members may be missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub parts: Vec<Part>,
    pub complete: bool,
    pub cases: Vec<String>,
}

impl SolutionSet {
    pub fn all(case: &str) -> Self {
        SolutionSet { parts: vec![Part::All], complete: true, cases: vec![case.into()] }
    }

    pub fn empty(case: &str) -> Self {
        SolutionSet { parts: Vec::new(), complete: true, cases: vec![case.into()] }
    }

    pub fn points(pts: BTreeSet<BigInt>, complete: bool, case: &str) -> Self {
        SolutionSet { parts: vec![Part::Points(pts)], complete, cases: vec![case.into()] }
    }

    pub fn is_finite(&self) -> bool {
        self.parts.iter().all(Part::is_finite)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().all(|p| match p {
            Part::All => false,
            Part::Images { residues, .. } => residues.is_empty(),
            Part::Lrbs { indices, .. } => indices.is_empty(),
            Part::Points(p) => p.is_empty(),
        })
    }

    /// Members of a finite set.
    pub fn finite_members(&self) -> BTreeSet<BigInt> {
        let mut out = BTreeSet::new();
        for p in &self.parts {
            match p {
                Part::Points(pts) => out.extend(pts.iter().cloned()),
                Part::Lrbs { seq, map, indices, .. } => {
                    for &n in indices.finite_members().expect("finite") {
                        if let Some(z) = integral(&map.eval_int(&seq.eval(n))) {
                            out.insert(z);
                        }
                    }
                }
                Part::Images { .. } | Part::All => {}
            }
        }
        out
    }

    /// Members in `[lo, hi]`, counting inspected parameters in `work`.
    pub fn members_between(&self, lo: &BigInt, hi: &BigInt, work: &mut u64, cap: u64) -> BTreeSet<BigInt> {
        let mut out = BTreeSet::new();
        for p in &self.parts {
            collect(p, lo, hi, &mut out, work, cap);
        }
        out
    }
}

fn integral(r: &BigRational) -> Option<BigInt> {
    r.is_integer().then(|| r.to_integer())
}

fn collect(part: &Part, lo: &BigInt, hi: &BigInt, out: &mut BTreeSet<BigInt>, work: &mut u64, cap: u64) {
    match part {
        Part::All => {
            let mut z = lo.clone();
            while &z <= hi && *work < cap {
                out.insert(z.clone());
                z += 1;
                *work += 1;
            }
        }
        Part::Points(pts) => out.extend(pts.range(lo.clone()..=hi.clone()).cloned()),
        Part::Images { poly, modulus, residues } => {
            let (num, den) = poly.to_int_over();
            let Some(ivs) = num.solve_between(Some(&(lo * &den)), Some(&(hi * &den))) else { return };
            for (a, b) in ivs {
                for r in residues {
                    let mut s = &a + (r - &a).mod_floor(modulus);
                    while s <= b {
                        *work += 1;
                        if *work > cap {
                            return;
                        }
                        let v = num.eval(&s);
                        if v.is_multiple_of(&den) {
                            out.insert(v / &den);
                        }
                        s += modulus;
                    }
                }
            }
        }
        Part::Lrbs { seq, map, indices, .. } => {
            let (num, den) = map.to_int_over();
            let Some(ivs) = num.solve_between(Some(&(lo * &den)), Some(&(hi * &den))) else { return };
            if ivs.is_empty() {
                return;
            }
            let vmax = ivs.iter().map(|(a, b)| a.abs().max(b.abs())).max().expect("nonempty");
            let inside = |u: &BigInt| ivs.iter().any(|(a, b)| a <= u && u <= b);
            let growth = seq.growth_rank().ok();
            for forward in [true, false] {
                let from = growth.as_ref().and_then(|g| if forward { g.forward_from } else { g.backward_from });
                let start = if forward { 0 } else { -1 };
                for (n, u) in seq.walk(start, forward) {
                    *work += 1;
                    if *work > cap {
                        return;
                    }
                    if inside(&u) && indices.contains(n) {
                        let v = num.eval(&u);
                        if v.is_multiple_of(&den) {
                            out.insert(v / &den);
                        }
                    }
                    let past = match from {
                        Some(f) => (if forward { n >= f } else { n <= f }) && u.abs() > vmax,
                        None => n.abs() > 4096,
                    };
                    if past {
                        break;
                    }
                }
            }
        }
    }
}

/// Outcome of deciding one system, in original coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub witness: Option<BigInt>,
    /// A missing witness is a proof of emptiness.
    pub certified: bool,
    pub note: String,
    pub cases: Vec<String>,
}

/// Scans `set` upward from `sys.lower + 1` for a value satisfying every atom.
pub fn search(set: &SolutionSet, sys: &ConstraintSystem, opts: &Options) -> Outcome {
    let cases = set.cases.clone();
    let found = |z: &BigInt, cases: &[String]| Outcome { witness: Some(sys.to_original(z)), certified: true, note: format!("witness z={z}"), cases: cases.to_vec() };
    if set.is_finite() {
        for z in set.finite_members().range(&sys.lower + 1..) {
            if sys.check(z) {
                return found(z, &cases);
            }
        }
        return if set.complete {
            Outcome { witness: None, certified: true, note: "finite solution set has no survivor".into(), cases }
        } else {
            Outcome { witness: None, certified: false, note: "bounded enumeration found no survivor".into(), cases }
        };
    }
    let dense = set.parts.iter().any(|p| matches!(p, Part::All));
    let mut lo: BigInt = &sys.lower + 1;
    let mut width = BigInt::from(64);
    let max_width = BigInt::from(1u64 << 16);
    let mut work = 0u64;
    loop {
        let hi: BigInt = &lo + &width - 1;
        let cands = set.members_between(&lo, &hi, &mut work, opts.scan_cap + 1);
        for z in &cands {
            work += 1;
            if sys.check(z) {
                return found(z, &cases);
            }
        }
        work += 1;
        if work > opts.scan_cap {
            return Outcome { witness: None, certified: false, note: format!("witness scan cap reached below z={hi}"), cases };
        }
        lo = hi + 1;
        width *= 2;
        if dense && width > max_width {
            width = max_width.clone();
        }
    }
}

/// `t^2 = a z + b` with `t mod q` in `residues`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SquareAtom {
    pub a: BigInt,
    pub b: BigInt,
    pub q: BigInt,
    pub residues: BTreeSet<BigInt>,
}

impl SquareAtom {
    pub fn plain(a: &BigInt, b: &BigInt) -> Self {
        SquareAtom { a: a.clone(), b: b.clone(), q: BigInt::one(), residues: [BigInt::zero()].into_iter().collect() }
    }

    pub fn from_poly(p: &PolyAtom) -> Self {
        SquareAtom { a: p.a.clone(), b: p.b.clone(), q: p.q.clone(), residues: p.residues.clone() }
    }

    fn admits(&self, t: &BigInt) -> bool {
        self.residues.contains(&t.mod_floor(&self.q))
    }
}

/// `(u^2 - b) / a`.
fn square_map(a: &BigInt, b: &BigInt) -> RatPoly {
    let inv = BigRational::new(BigInt::one(), a.clone());
    RatPoly::new(vec![BigRational::from_integer(-b) * &inv, BigRational::zero(), inv])
}

fn small(m: &BigInt) -> bool {
    m.to_u64().is_some_and(|m| m <= TABLE_LIMIT)
}

/// Solution set of two non-similar square atoms. With `w = a2 t1` the pair
/// becomes `w^2 - a1 a2 t2^2 = a2 (a2 b1 - a1 b2)`.
pub(crate) fn square_pair(p1: &SquareAtom, p2: &SquareAtom) -> SolutionSet {
    let n = &p1.a * &p2.a;
    let nn = &p2.a * &p1.b - &p1.a * &p2.b;
    assert!(!nn.is_zero(), "square_pair needs non-similar atoms");
    let rhs = &p2.a * &nn;
    if let Some(s) = kth_root(&n, 2) {
        // (w - s t2)(w + s t2) = rhs
        let mut pts = BTreeSet::new();
        for (d, e) in divisor_pairs(&rhs).expect("nonzero") {
            let sum: BigInt = &d + &e;
            let diff: BigInt = &e - &d;
            if sum.is_odd() || !diff.is_multiple_of(&(&s * 2u32)) {
                continue;
            }
            let (w, t2) = (sum / 2u32, diff / (&s * 2u32));
            if !w.is_multiple_of(&p2.a) || !p1.admits(&(&w / &p2.a)) || !p2.admits(&t2) {
                continue;
            }
            let v: BigInt = &t2 * &t2 - &p2.b;
            if v.is_multiple_of(&p2.a) {
                pts.insert(v / &p2.a);
            }
        }
        return SolutionSet::points(pts, true, "square pair: difference of squares, divisor enumeration");
    }
    let sols = solve_generalized(&n, &rhs).expect("non-square radicand, nonzero rhs");
    let map = square_map(&p2.a, &p2.b);
    let mut parts = Vec::new();
    for class in &sols.classes {
        let (wseq, tseq) = (class.w_seq(), class.z_seq());
        let mut indices = IndexSet::all();
        let mut exact = true;
        let m1 = &p2.a * &p1.q;
        if small(&m1) {
            indices = indices.intersect(&wseq.filter_by(&m1, |w| w.is_multiple_of(&p2.a) && p1.residues.contains(&(w / &p2.a).mod_floor(&p1.q))));
        } else {
            exact = false;
        }
        let m2 = p2.q.lcm(&p2.a);
        if small(&m2) {
            indices = indices.intersect(&tseq.filter_by(&m2, |t| p2.admits(t) && (t * t - &p2.b).is_multiple_of(&p2.a)));
        } else {
            exact = false;
        }
        parts.push(Part::Lrbs { seq: tseq, map: map.clone(), indices, exact });
    }
    let case = format!("square pair: Pell classes of w^2 - {n} t^2 = {rhs}");
    SolutionSet { parts, complete: true, cases: vec![case] }
}

/// Residues `u mod a` with `u^k ≡ b (mod a)`; `None` when `a` is too large.
fn root_residues(k: u32, a: &BigInt, b: &BigInt) -> Option<BTreeSet<BigInt>> {
    if !small(a) {
        return None;
    }
    let m = a.to_u64().expect("small");
    let target = b.mod_floor(a).to_u64().expect("small");
    let mut out = BTreeSet::new();
    for u in 0..m {
        if pow_mod(u, k, m) == target {
            out.insert(BigInt::from(u));
        }
    }
    Some(out)
}

pub(crate) fn pow_mod(base: u64, e: u32, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut b = base as u128 % m128;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

/// Values modulo `m` that atom `c` can take at integer `z`, as a table of
/// flags; `None` when the table would be too large.
fn value_table(c: &Constraint, m: u64) -> Option<Vec<bool>> {
    let mut table = vec![false; m as usize];
    match c {
        Constraint::Power(p) => {
            for u in 0..m {
                table[pow_mod(u, p.k, m) as usize] = true;
            }
        }
        Constraint::Poly(p) => {
            let q = p.q.to_u64()?;
            let l = m.lcm(&q);
            if l > TABLE_LIMIT {
                return None;
            }
            let d = p.d.mod_floor(&BigInt::from(m)).to_u64().expect("small") as u128;
            let m128 = m as u128;
            for t in 0..l {
                if !p.residues.contains(&BigInt::from(t % q)) {
                    continue;
                }
                let tm = (t % m) as u128;
                let v = (pow_mod(t % m, p.degree, m) as u128 + d * tm) % m128;
                table[v as usize] = true;
            }
        }
    }
    Some(table)
}

/// A modulus `m` such that no `z` satisfies every positive atom modulo `m`.
pub(crate) fn residue_obstruction(positives: &[Constraint]) -> Option<u64> {
    'moduli: for m in [15120u64, 2431] {
        let mb = BigInt::from(m);
        let mut rows = Vec::new();
        for c in positives {
            let Some(t) = value_table(c, m) else { continue 'moduli };
            let (a, b) = c.coeffs();
            let a = a.mod_floor(&mb).to_u64().expect("small");
            let b = b.mod_floor(&mb).to_u64().expect("small");
            rows.push((t, a, b));
        }
        let ok = (0..m).any(|z| rows.iter().all(|(t, a, b)| t[((*a as u128 * z as u128 + *b as u128) % m as u128) as usize]));
        if !ok {
            return Some(m);
        }
    }
    None
}

fn power_images(p: &PowerAtom) -> SolutionSet {
    let poly = {
        let mut c = vec![BigRational::zero(); p.k as usize + 1];
        let inv = BigRational::new(BigInt::one(), p.a.clone());
        c[0] = BigRational::from_integer(-&p.b) * &inv;
        c[p.k as usize] = inv;
        RatPoly::new(c)
    };
    match root_residues(p.k, &p.a, &p.b) {
        Some(r) if r.is_empty() => SolutionSet::empty("one atom: no k-th root residue, empty"),
        Some(residues) => SolutionSet {
            parts: vec![Part::Images { poly, modulus: p.a.clone(), residues }],
            complete: true,
            cases: vec![format!("one atom: images of (y^{} - b)/a", p.k)],
        },
        None => SolutionSet {
            parts: vec![Part::Images { poly, modulus: BigInt::one(), residues: [BigInt::zero()].into_iter().collect() }],
            complete: true,
            cases: vec![format!("one atom: images of (y^{} - b)/a", p.k)],
        },
    }
}

/// A pair of even-exponent atoms whose square relaxation has only finitely
/// many solutions, giving a certified finite superset.
pub(crate) fn divisor_finite_pair(atoms: &[Constraint]) -> Option<SolutionSet> {
    let evens: Vec<SquareAtom> = atoms
        .iter()
        .filter_map(|c| match c {
            Constraint::Power(p) if p.k % 2 == 0 => Some(SquareAtom::plain(&p.a, &p.b)),
            Constraint::Poly(p) if p.is_quadratic() => Some(SquareAtom::from_poly(p)),
            _ => None,
        })
        .collect();
    for i in 0..evens.len() {
        for j in i + 1..evens.len() {
            let (x, y) = (&evens[i], &evens[j]);
            if &x.a * &y.b == &y.a * &x.b || !is_kth_power(&(&x.a * &y.a), 2) {
                continue;
            }
            let mut s = square_pair(x, y);
            s.cases.push("finite superset from a divisor-finite square pair".into());
            return Some(s);
        }
    }
    None
}

/// Bounded enumeration of `t` with `|t| <= H` for atom `c`, keeping values
/// `z > lower` that satisfy every atom in `others`.
pub(crate) fn bounded_enumeration(c: &Constraint, others: &[Constraint], lower: &BigInt, opts: &Options, case: &str) -> SolutionSet {
    let (a, b) = c.coeffs();
    let (f, q, residues) = match c {
        Constraint::Power(p) => {
            let mut co = vec![BigInt::zero(); p.k as usize + 1];
            co[p.k as usize] = BigInt::one();
            (IntPoly::new(co), BigInt::one(), [BigInt::zero()].into_iter().collect::<BTreeSet<_>>())
        }
        Constraint::Poly(p) => (p.f(), p.q.clone(), p.residues.clone()),
    };
    let l = q.lcm(a);
    let h = BigInt::from(opts.bound);
    let start = -&h;
    let mut pts = BTreeSet::new();
    let mut visit = |t: &BigInt| {
        let v = f.eval(t) - b;
        if v.is_multiple_of(a) {
            let z = v / a;
            if &z > lower && others.iter().all(|o| o.holds(&z)) {
                pts.insert(z);
            }
        }
    };
    if small(&l) {
        let lu = l.to_u64().expect("small");
        let mut admissible = Vec::new();
        for r in 0..lu {
            let rb = BigInt::from(r);
            if residues.contains(&rb.mod_floor(&q)) && (f.eval(&rb) - b).is_multiple_of(a) {
                admissible.push(rb);
            }
        }
        for r in &admissible {
            let mut t = &start + (r - &start).mod_floor(&l);
            while t <= h {
                visit(&t);
                t += &l;
            }
        }
    } else {
        let mut t = start;
        while t <= h {
            if residues.contains(&t.mod_floor(&q)) {
                visit(&t);
            }
            t += 1;
        }
    }
    SolutionSet::points(pts, false, &format!("{case}; bounded enumeration |t| <= {}", opts.bound))
}

/// Picks the atom whose parameter is sparsest for bounded enumeration.
pub(crate) fn sparsest(atoms: &[Constraint]) -> usize {
    (0..atoms.len()).max_by_key(|&i| (atoms[i].degree(), atoms[i].coeffs().0.clone())).expect("nonempty")
}

/// Solution set of positive power atoms, all with `a > 0`, pairwise
/// non-similar and non-redundant.
pub fn solve_positive(positives: &[PowerAtom], lower: &BigInt, opts: &Options) -> SolutionSet {
    let cs: Vec<Constraint> = positives.iter().cloned().map(Constraint::Power).collect();
    if cs.is_empty() {
        return SolutionSet::all("no positive atoms: all integers");
    }
    if let Some(m) = residue_obstruction(&cs) {
        return SolutionSet::empty(&format!("local obstruction modulo {m}"));
    }
    if cs.len() == 1 {
        return power_images(&positives[0]);
    }
    if let Some(s) = divisor_finite_pair(&cs) {
        return s;
    }
    if cs.len() == 2 && positives.iter().all(|p| p.k == 2) {
        return square_pair(&SquareAtom::plain(&positives[0].a, &positives[0].b), &SquareAtom::plain(&positives[1].a, &positives[1].b));
    }
    let i = sparsest(&cs);
    let others: Vec<Constraint> = cs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.clone()).collect();
    let case = if cs.len() == 2 { "two atoms, hyperelliptic" } else { "three or more atoms" };
    bounded_enumeration(&cs[i], &others, lower, opts, case)
}

/// Decides a normalized system of power atoms.
pub fn decide(sys: &ConstraintSystem, opts: &Options) -> Outcome {
    let positives: Vec<PowerAtom> = sys
        .positives
        .iter()
        .map(|c| match c {
            Constraint::Power(p) => p.clone(),
            Constraint::Poly(_) => panic!("decide handles power atoms only"),
        })
        .collect();
    let set = solve_positive(&positives, &sys.lower, opts);
    search(&set, sys, opts)
}
