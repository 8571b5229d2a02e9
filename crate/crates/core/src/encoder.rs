//! Encoding of `h(x1..xn) = 0` over `<Z; 0, 1, +, -, Z^2>` with at most four
//! existentially bound variables.
//!
//! Multiplication goes through `4xy = (x+y)^2 - (x-y)^2`, and `w = T^2` is
//! written as the chain `Z^2(w + 2iT + i^2)` for `i < M`. That last step is
//! sound for `M = 5` only under Büchi's conjecture (announced proved by
//! Xiao); `M` is a parameter so it can be raised.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;
use crate::sexpr::{read_all, syntax, SExpr};

pub const DEFAULT_CHAIN: u32 = 5;

/// Integer polynomial in `x1..xn`; exponent vectors map to coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MultiPoly {
    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = MultiPoly { nvars, terms: BTreeMap::new() };
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The variable `x{i}`, 1-based.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i - 1] = 1;
        let mut p = MultiPoly { nvars, terms: BTreeMap::new() };
        p.add_term(e, BigInt::one());
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        let slot = self.terms.entry(exps).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    fn widen(&self, n: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e.resize(n, 0);
                (e, c.clone())
            })
            .collect();
        MultiPoly { nvars: n, terms }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.nvars.max(o.nvars);
        let mut out = self.widen(n);
        for (e, c) in o.widen(n).terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.nvars.max(o.nvars);
        let (a, b) = (self.widen(n), o.widen(n));
        let mut out = MultiPoly { nvars: n, terms: BTreeMap::new() };
        for (e1, c1) in &a.terms {
            for (e2, c2) in &b.terms {
                out.add_term(e1.iter().zip(e2).map(|(x, y)| x + y).collect(), c1 * c2);
            }
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, xs: &[BigInt]) -> BigInt {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(xs).fold(c.clone(), |acc, (k, x)| acc * num_traits::pow(x.clone(), *k as usize)))
            .sum()
    }

    /// Monomials in graded-lexicographic order, largest first.
    pub fn monomials(&self) -> Vec<(Vec<u32>, BigInt)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        v.sort_by(|(e1, _), (e2, _)| {
            let d = |e: &Vec<u32>| e.iter().sum::<u32>();
            d(e2).cmp(&d(e1)).then_with(|| e2.cmp(e1))
        });
        v
    }
}

fn poly_of(e: &SExpr) -> Result<MultiPoly, ParseError> {
    match e {
        SExpr::Atom { text, pos } => {
            if let Some(idx) = text.strip_prefix('x') {
                let i: usize = idx.parse().map_err(|_| syntax(*pos, "expected x1, x2, ..."))?;
                if i == 0 {
                    return Err(syntax(*pos, "variables are numbered from 1"));
                }
                Ok(MultiPoly::var(i, i))
            } else {
                let c: BigInt = text.parse().map_err(|_| syntax(*pos, "expected an integer or a variable"))?;
                Ok(MultiPoly::constant(0, c))
            }
        }
        SExpr::List { items, pos } => {
            let head = items.first().and_then(SExpr::as_atom).ok_or_else(|| syntax(*pos, "expected an operator"))?;
            let args = items[1..].iter().map(poly_of).collect::<Result<Vec<_>, _>>()?;
            match (head, args.len()) {
                ("+", n) if n >= 1 => Ok(args.iter().skip(1).fold(args[0].clone(), |a, b| a.add(b))),
                ("-", 1) => Ok(args[0].neg()),
                ("-", 2) => Ok(args[0].add(&args[1].neg())),
                ("*", n) if n >= 1 => Ok(args.iter().skip(1).fold(args[0].clone(), |a, b| a.mul(b))),
                ("^", 2) => {
                    let k = items[2].as_atom().and_then(|t| t.parse::<u32>().ok()).ok_or_else(|| syntax(items[2].pos(), "expected a small exponent"))?;
                    Ok((0..k).fold(MultiPoly::constant(0, BigInt::one()), |a, _| a.mul(&args[0])))
                }
                _ => Err(syntax(*pos, "unknown operator or arity")),
            }
        }
    }
}

/// Reads a polynomial written with `+ - * ^`, integers and `x1..xn`.
pub fn parse_poly(text: &str) -> Result<MultiPoly, ParseError> {
    let es = read_all(text)?;
    match es.as_slice() {
        [e] => poly_of(e),
        _ => Err(syntax(0, "expected exactly one polynomial")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Free variable, 1-based.
    X(u32),
    /// Bound variable `t0..t3`.
    T(u8),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{i}"),
            Var::T(i) => write!(f, "t{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinTerm {
    pub coeffs: BTreeMap<Var, BigInt>,
    pub constant: BigInt,
}

impl LinTerm {
    pub fn var(v: Var) -> Self {
        Self::scaled(v, BigInt::one())
    }

    pub fn scaled(v: Var, c: BigInt) -> Self {
        let mut t = LinTerm::default();
        t.add_var(v, c);
        t
    }

    pub fn constant(c: BigInt) -> Self {
        LinTerm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn add_var(&mut self, v: Var, c: BigInt) {
        let slot = self.coeffs.entry(v).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn plus(&self, o: &LinTerm, k: i64) -> LinTerm {
        let mut out = self.clone();
        for (v, c) in &o.coeffs {
            out.add_var(*v, c * k);
        }
        out.constant += &o.constant * k;
        out
    }
}

impl fmt::Display for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.coeffs.iter().map(|(v, c)| if c.is_one() { format!("{v}") } else { format!("(* {c} {v})") }).collect();
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(format!("{}", self.constant));
        }
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "(+ {})", parts.join(" "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SquareFormula {
    Exists(Vec<Var>, alloc::boxed::Box<SquareFormula>),
    And(Vec<SquareFormula>),
    Eq(LinTerm, LinTerm),
    Square(LinTerm),
}

impl SquareFormula {
    pub fn bound_vars(&self) -> alloc::collections::BTreeSet<Var> {
        let mut out = alloc::collections::BTreeSet::new();
        self.walk(&mut |f| {
            if let SquareFormula::Exists(vs, _) = f {
                out.extend(vs.iter().copied());
            }
        });
        out
    }

    fn walk(&self, visit: &mut impl FnMut(&SquareFormula)) {
        visit(self);
        match self {
            SquareFormula::Exists(_, b) => b.walk(visit),
            SquareFormula::And(parts) => parts.iter().for_each(|p| p.walk(visit)),
            _ => {}
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

impl fmt::Display for SquareFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SquareFormula::Exists(vs, b) => {
                for v in vs {
                    write!(f, "(exists {v} ")?;
                }
                write!(f, "{b}")?;
                for _ in vs {
                    write!(f, ")")?;
                }
                Ok(())
            }
            SquareFormula::And(parts) => {
                write!(f, "(and")?;
                for p in parts {
                    write!(f, " {p}")?;
                }
                write!(f, ")")
            }
            SquareFormula::Eq(l, r) => write!(f, "(= {l} {r})"),
            SquareFormula::Square(t) => write!(f, "(pow 2 {t})"),
        }
    }
}

/// `coef * x_{vars[0]} * ... `, a monomial in the middle of being peeled.
#[derive(Clone, Debug)]
struct Mono {
    coef: BigInt,
    vars: Vec<u32>,
}

impl Mono {
    fn linear(&self) -> LinTerm {
        match self.vars.as_slice() {
            [] => LinTerm::constant(self.coef.clone()),
            [v] => LinTerm::scaled(Var::X(*v), self.coef.clone()),
            _ => unreachable!("not linear"),
        }
    }

    /// `4 x_j g'` split.
    fn peel(&self) -> (u32, Mono) {
        (self.vars[0], Mono { coef: &self.coef / 4, vars: self.vars[1..].to_vec() })
    }
}

struct Encoder {
    chain: u32,
}

impl Encoder {
    /// `w = T^2` as `Z^2(w + 2iT + i^2)`, `i < M`.
    fn chain(&self, w: Var, t: &LinTerm) -> SquareFormula {
        let w = LinTerm::var(w);
        SquareFormula::And(
            (0..self.chain as i64)
                .map(|i| {
                    let mut a = w.plus(t, 2 * i);
                    a.constant += i * i;
                    SquareFormula::Square(a)
                })
                .collect(),
        )
    }

    fn other_pair(w: Var) -> (Var, Var) {
        match w {
            Var::T(0) | Var::T(1) => (Var::T(2), Var::T(3)),
            _ => (Var::T(0), Var::T(1)),
        }
    }

    /// `w = (sign * x_j + g)^2`.
    fn square_rel(&self, w: Var, j: u32, sign: i64, g: &Mono) -> SquareFormula {
        let base = LinTerm::scaled(Var::X(j), BigInt::from(sign));
        if g.vars.len() <= 1 {
            return self.chain(w, &base.plus(&g.linear(), 1));
        }
        let (u, v) = Self::other_pair(w);
        let (j2, g2) = g.peel();
        let mut t = base;
        t.add_var(u, BigInt::one());
        t.add_var(v, -BigInt::one());
        SquareFormula::Exists(vec![u, v], alloc::boxed::Box::new(SquareFormula::And(vec![self.chain(w, &t), self.square_rel(u, j2, 1, &g2), self.square_rel(v, j2, -1, &g2)])))
    }

    /// `lhs = t + g` with `g` of degree at least 2.
    fn monomial_eq(&self, lhs: &LinTerm, t: Var, g: &Mono) -> SquareFormula {
        let (u, v) = (Var::T(2), Var::T(3));
        let (j, g2) = g.peel();
        let mut rhs = LinTerm::var(t);
        rhs.add_var(u, BigInt::one());
        rhs.add_var(v, -BigInt::one());
        SquareFormula::Exists(
            vec![u, v],
            alloc::boxed::Box::new(SquareFormula::And(vec![SquareFormula::Eq(lhs.clone(), rhs), self.square_rel(u, j, 1, &g2), self.square_rel(v, j, -1, &g2)])),
        )
    }

    /// `lhs = h_r`, where `h_r` is the sum of `monos[r..]` and `linear`.
    fn peel_sum(&self, lhs: LinTerm, monos: &[Mono], linear: &LinTerm) -> SquareFormula {
        let Some((m, rest)) = monos.split_first() else {
            return SquareFormula::Eq(lhs, linear.clone());
        };
        let t = if lhs.coeffs.contains_key(&Var::T(0)) { Var::T(1) } else { Var::T(0) };
        SquareFormula::Exists(
            vec![t],
            alloc::boxed::Box::new(SquareFormula::And(vec![self.monomial_eq(&lhs, t, m), self.peel_sum(LinTerm::var(t), rest, linear)])),
        )
    }
}

/// Encodes `h = 0` with the default chain length.
pub fn encode(h: &MultiPoly) -> SquareFormula {
    encode_with(h, DEFAULT_CHAIN)
}

pub fn encode_with(h: &MultiPoly, chain: u32) -> SquareFormula {
    let d = h.degree();
    // 4^(D-1) h keeps every peeled coefficient integral
    let scale = if d >= 2 { num_traits::pow(BigInt::from(4), d as usize - 1) } else { BigInt::one() };
    let mut linear = LinTerm::default();
    let mut monos = Vec::new();
    for (e, c) in h.monomials() {
        let c = c * &scale;
        let vars: Vec<u32> = e.iter().enumerate().flat_map(|(i, k)| core::iter::repeat_n(i as u32 + 1, *k as usize)).collect();
        match vars.as_slice() {
            [] => linear.constant += c,
            [v] => linear.add_var(Var::X(*v), c),
            _ => monos.push(Mono { coef: c, vars }),
        }
    }
    Encoder { chain }.peel_sum(LinTerm::default(), &monos, &linear)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivReport {
    Pass { checked: u64 },
    /// `h(point) = 0` disagrees with the formula.
    Counterexample { point: Vec<i64>, h_zero: bool },
    /// The evaluator could not decide the formula at this point.
    Inconclusive { point: Vec<i64> },
}

type Lin = (Vec<(usize, i128)>, i128);

/// A flattened conjunction: equations `sum = 0` and squares.
struct Flat {
    nbound: usize,
    eqs: Vec<Lin>,
    squares: Vec<Lin>,
    /// Chain heads `Z^2(w)` with the squares `Z^2(w + ...)` next to them.
    heads: Vec<(usize, Vec<usize>)>,
    /// Per variable slot: the equations and squares mentioning it.
    eq_of: Vec<Vec<usize>>,
    sq_of: Vec<Vec<usize>>,
}

/// Partial assignment with the number of unassigned variables per
/// equation and square. `assigned` and `settled` are undo trails.
struct State {
    vals: Vec<Option<i128>>,
    open_eq: Vec<u32>,
    open_sq: Vec<u32>,
    assigned: Vec<usize>,
    settled: Vec<usize>,
    queue: Vec<usize>,
}

fn flatten(f: &SquareFormula, nfree: usize) -> Option<Flat> {
    fn lin(t: &LinTerm, scope: &BTreeMap<Var, usize>) -> Option<Lin> {
        let mut v = Vec::new();
        for (var, c) in &t.coeffs {
            let slot = match var {
                Var::X(i) => *i as usize - 1,
                Var::T(_) => *scope.get(var)?,
            };
            v.push((slot, c.to_i128()?));
        }
        Some((v, t.constant.to_i128()?))
    }
    fn go(f: &SquareFormula, scope: &BTreeMap<Var, usize>, out: &mut Flat, nfree: usize) -> Option<()> {
        match f {
            SquareFormula::Exists(vs, b) => {
                let mut inner = scope.clone();
                for v in vs {
                    inner.insert(*v, nfree + out.nbound);
                    out.nbound += 1;
                }
                go(b, &inner, out, nfree)
            }
            SquareFormula::And(parts) => parts.iter().try_for_each(|p| go(p, scope, out, nfree)),
            SquareFormula::Eq(l, r) => {
                let d = l.plus(r, -1);
                out.eqs.push(lin(&d, scope)?);
                Some(())
            }
            SquareFormula::Square(t) => {
                out.squares.push(lin(t, scope)?);
                Some(())
            }
        }
    }
    let mut out = Flat { nbound: 0, eqs: Vec::new(), squares: Vec::new(), heads: Vec::new(), eq_of: Vec::new(), sq_of: Vec::new() };
    go(f, &BTreeMap::new(), &mut out, nfree)?;
    let slots = nfree + out.nbound;
    out.eq_of = vec![Vec::new(); slots];
    out.sq_of = vec![Vec::new(); slots];
    for (k, e) in out.eqs.iter().enumerate() {
        e.0.iter().for_each(|(i, _)| out.eq_of[*i].push(k));
    }
    for (k, q) in out.squares.iter().enumerate() {
        q.0.iter().for_each(|(i, _)| out.sq_of[*i].push(k));
    }
    for (hi, head) in out.squares.iter().enumerate() {
        let [(w, 1)] = head.0.as_slice() else { continue };
        if head.1 != 0 {
            continue;
        }
        let comps: Vec<usize> = out
            .squares
            .iter()
            .enumerate()
            .filter(|(si, s)| *si != hi && s.0.iter().any(|(i, _)| i == w) && s.0.iter().all(|(i, k)| i != w || *k == 1))
            .map(|(si, _)| si)
            .collect();
        if !comps.is_empty() {
            out.heads.push((*w, comps));
        }
    }
    Some(out)
}

fn is_square(v: i128) -> bool {
    if v < 0 {
        return false;
    }
    if let Ok(v) = i64::try_from(v) {
        let r = v.isqrt();
        return r * r == v;
    }
    let r = v.isqrt();
    r * r == v
}

enum Eval {
    True,
    False,
    Stuck,
}

/// Values of `w` in `w = s^2, w + n = s'^2`, from the divisor pairs of `n`.
fn chain_roots(n: i128, out: &mut Vec<i128>) {
    out.clear();
    let Ok(n) = i64::try_from(n) else { return };
    let m = n.unsigned_abs();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            let e = m / d;
            if (e - d) % 2 == 0 {
                out.push(if n > 0 { (e - d) / 2 } else { (e + d) / 2 } as i128);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out.dedup();
}

impl Flat {
    fn value(term: &Lin, vals: &[Option<i128>]) -> Option<i128> {
        term.0.iter().try_fold(term.1, |acc, (i, c)| vals[*i].map(|v| acc + c * v))
    }

    /// State with the free variables set to `point`, propagated.
    fn start(&self, point: &[i64]) -> Option<State> {
        let mut st = State {
            vals: vec![None; self.eq_of.len()],
            open_eq: self.eqs.iter().map(|e| e.0.len() as u32).collect(),
            open_sq: self.squares.iter().map(|q| q.0.len() as u32).collect(),
            assigned: Vec::new(),
            settled: Vec::new(),
            queue: Vec::new(),
        };
        if self.eqs.iter().any(|e| e.0.is_empty() && e.1 != 0) || self.squares.iter().any(|q| q.0.is_empty() && !is_square(q.1)) {
            return None;
        }
        for (i, &x) in point.iter().enumerate() {
            self.assign(&mut st, i, x as i128);
        }
        self.propagate(&mut st).then_some(st)
    }

    fn assign(&self, st: &mut State, v: usize, x: i128) {
        st.vals[v] = Some(x);
        st.assigned.push(v);
        st.queue.push(v);
    }

    /// Rolls the trails back to the given lengths.
    fn undo(&self, st: &mut State, assigned: usize, settled: usize) {
        for v in st.settled.drain(settled..) {
            self.eq_of[v].iter().for_each(|&k| st.open_eq[k] += 1);
            self.sq_of[v].iter().for_each(|&k| st.open_sq[k] += 1);
        }
        for v in st.assigned.drain(assigned..) {
            st.vals[v] = None;
        }
        st.queue.clear();
    }

    /// Settles the queued assignments: equations with one unknown left pin
    /// it, fully known atoms are checked.
    fn propagate(&self, st: &mut State) -> bool {
        while let Some(v) = st.queue.pop() {
            st.settled.push(v);
            self.eq_of[v].iter().for_each(|&k| st.open_eq[k] -= 1);
            self.sq_of[v].iter().for_each(|&k| st.open_sq[k] -= 1);
            for &k in &self.eq_of[v] {
                let e = &self.eqs[k];
                match st.open_eq[k] {
                    0 => {
                        if Self::value(e, &st.vals) != Some(0) {
                            return false;
                        }
                    }
                    1 => {
                        // the unknown may already be set and queued
                        let Some(&(i, c)) = e.0.iter().find(|(i, _)| st.vals[*i].is_none()) else { continue };
                        let acc = e.0.iter().filter(|(j, _)| *j != i).fold(e.1, |acc, (j, c)| acc + c * st.vals[*j].unwrap());
                        if acc % c != 0 {
                            return false;
                        }
                        self.assign(st, i, -acc / c);
                    }
                    _ => {}
                }
            }
            for &k in &self.sq_of[v] {
                if st.open_sq[k] == 0 && !is_square(Self::value(&self.squares[k], &st.vals).unwrap()) {
                    return false;
                }
            }
        }
        true
    }

    /// Exact search: equations pin variables, and a chain head `Z^2(w)`
    /// next to `Z^2(w + N)` with `N` known leaves the divisor pairs of `N`.
    fn solve(&self, st: &mut State) -> Eval {
        if st.vals.iter().all(Option::is_some) {
            return Eval::True;
        }
        for (w, comps) in &self.heads {
            if st.vals[*w].is_some() {
                continue;
            }
            // a companion Z^2(w + N) with N known
            for &si in comps {
                if st.open_sq[si] != 1 {
                    continue;
                }
                let s = &self.squares[si];
                let n = s.0.iter().filter(|(i, _)| i != w).fold(s.1, |acc, (i, c)| acc + c * st.vals[*i].unwrap());
                if n == 0 {
                    return Eval::Stuck;
                }
                let mut roots = Vec::new();
                chain_roots(n, &mut roots);
                if roots.is_empty() && i64::try_from(n).is_err() {
                    return Eval::Stuck;
                }
                let mut any_stuck = false;
                let (a, d) = (st.assigned.len(), st.settled.len());
                for r in roots {
                    self.assign(st, *w, r * r);
                    let out = if self.propagate(st) { self.solve(st) } else { Eval::False };
                    self.undo(st, a, d);
                    match out {
                        Eval::True => return Eval::True,
                        Eval::Stuck => any_stuck = true,
                        Eval::False => {}
                    }
                }
                return if any_stuck { Eval::Stuck } else { Eval::False };
            }
        }
        Eval::Stuck
    }
}

/// Compares `h = 0` with `f` on every point of `[-grid, grid]^n`.
pub fn check_equiv(h: &MultiPoly, f: &SquareFormula, grid: u32) -> EquivReport {
    let n = h.nvars.max(f.free_count());
    let Some(flat) = flatten(f, n) else {
        return EquivReport::Inconclusive { point: Vec::new() };
    };
    let terms: Option<Vec<(&Vec<u32>, i128)>> = h.terms.iter().map(|(e, c)| c.to_i128().map(|c| (e, c))).collect();
    let Some(terms) = terms else {
        return EquivReport::Inconclusive { point: Vec::new() };
    };
    let g = grid as i64;
    let mut point = vec![-g; n];
    let mut checked = 0u64;
    loop {
        let h_zero = terms.iter().map(|(e, c)| e.iter().zip(&point).fold(*c, |acc, (k, x)| acc * (*x as i128).pow(*k))).sum::<i128>() == 0;
        let verdict = match flat.start(&point) {
            Some(mut st) => flat.solve(&mut st),
            None => Eval::False,
        };
        match verdict {
            Eval::True if h_zero => {}
            Eval::False if !h_zero => {}
            Eval::Stuck => return EquivReport::Inconclusive { point },
            _ => return EquivReport::Counterexample { point, h_zero },
        }
        checked += 1;
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                return EquivReport::Pass { checked };
            }
            if point[i] < g {
                point[i] += 1;
                break;
            }
            point[i] = -g;
            i += 1;
        }
    }
}

impl SquareFormula {
    /// Largest free-variable index.
    pub fn free_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |f| {
            let terms: Vec<&LinTerm> = match f {
                SquareFormula::Eq(l, r) => vec![l, r],
                SquareFormula::Square(t) => vec![t],
                _ => vec![],
            };
            for t in terms {
                for v in t.coeffs.keys() {
                    if let Var::X(i) = v {
                        n = n.max(*i as usize);
                    }
                }
            }
        });
        n
    }
}

/// Is `w = T^2` equivalent to the chain at this point?
pub fn chain_holds(w: &BigInt, t: &BigInt, m: u32) -> bool {
    (0..m as i64).all(|i| {
        let v = w + t * (2 * i) + i * i;
        !v.is_negative() && {
            let r = v.sqrt();
            &r * &r == v
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> MultiPoly {
        parse_poly(text).unwrap()
    }

    #[test]
    fn linear_needs_no_variables() {
        let h = p("x1");
        let f = encode(&h);
        assert!(f.bound_vars().is_empty());
        assert_eq!(format!("{f}"), "(= 0 x1)");
        assert_eq!(check_equiv(&h, &f, 10), EquivReport::Pass { checked: 21 });
    }

    #[test]
    fn product_minus_six() {
        let h = p("(- (* x1 x2) 6)");
        let f = encode(&h);
        assert!(f.bound_vars().len() <= 4);
        assert_eq!(check_equiv(&h, &f, 20), EquivReport::Pass { checked: 41 * 41 });
        // x1 x2 = 6 has 8 solutions on the grid
        let sols = (-20i64..=20).flat_map(|a| (-20i64..=20).map(move |b| (a, b))).filter(|(a, b)| a * b == 6).count();
        assert_eq!(sols, 8);
    }

    #[test]
    fn circle() {
        let h = p("(- (+ (^ x1 2) (^ x2 2)) 25)");
        let f = encode(&h);
        assert!(f.bound_vars().len() <= 4);
        assert_eq!(check_equiv(&h, &f, 8), EquivReport::Pass { checked: 17 * 17 });
        assert!(h.eval(&[BigInt::from(3), BigInt::from(4)]).is_zero());
    }

    #[test]
    fn corrupted_formula_is_caught() {
        let h = p("(- (* x1 x2) 6)");
        let SquareFormula::Exists(vs, body) = encode(&h) else { panic!() };
        let SquareFormula::And(mut parts) = *body else { panic!() };
        parts[1] = SquareFormula::Eq(LinTerm::var(Var::T(0)), LinTerm::constant(BigInt::from(-28)));
        let bad = SquareFormula::Exists(vs, alloc::boxed::Box::new(SquareFormula::And(parts)));
        assert!(matches!(check_equiv(&h, &bad, 10), EquivReport::Counterexample { .. }));
    }

    #[test]
    fn cubic_monomial() {
        let h = p("(+ (* 2 x1 x2 x3) (- x1) 3)");
        let f = encode(&h);
        assert!(f.bound_vars().len() <= 4);
        assert_eq!(check_equiv(&h, &f, 4), EquivReport::Pass { checked: 9 * 9 * 9 });
    }

    #[test]
    fn graded_lex_order() {
        let h = p("(+ x1 (* x2 x2) (* x1 x2) (* x1 x1 x1))");
        let degs: Vec<u32> = h.monomials().iter().map(|(e, _)| e.iter().sum()).collect();
        assert_eq!(degs, [3, 2, 2, 1]);
        assert_eq!(h.monomials()[1].0, [1, 1]);
    }
}
