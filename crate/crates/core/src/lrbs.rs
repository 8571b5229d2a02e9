//! Simple reversible linear recurrence bi-sequences and index sets.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numtheory::{is_kth_power, square_part};
use crate::pell::QuadNum;
use crate::poly::IntPoly;

/// `u_{n+d} = a_1 u_{n+d-1} + ... + a_d u_n` with `a_d = ±1`, so the
/// sequence extends to all of Z.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lrbs {
    coeffs: Vec<BigInt>,
    init: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LrbsError {
    Empty,
    LengthMismatch,
    NotReversible,
    Unsupported(usize),
}

impl core::fmt::Display for LrbsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LrbsError::Empty => write!(f, "recurrence order must be at least 1"),
            LrbsError::LengthMismatch => write!(f, "initial window length differs from the order"),
            LrbsError::NotReversible => write!(f, "trailing coefficient must be 1 or -1"),
            LrbsError::Unsupported(d) => write!(f, "growth analysis supports order <= 2, got {d}"),
        }
    }
}

impl Lrbs {
    pub fn new(coeffs: Vec<BigInt>, init: Vec<BigInt>) -> Result<Self, LrbsError> {
        if coeffs.is_empty() {
            return Err(LrbsError::Empty);
        }
        if coeffs.len() != init.len() {
            return Err(LrbsError::LengthMismatch);
        }
        if !coeffs[coeffs.len() - 1].abs().is_one() {
            return Err(LrbsError::NotReversible);
        }
        Ok(Lrbs { coeffs, init })
    }

    /// `u_{m+2} = t u_{m+1} - u_m` with the given `u_0, u_1`.
    pub fn pell_type(w0: &BigInt, u0: BigInt, u1: BigInt) -> Self {
        Lrbs { coeffs: vec![w0 * 2u32, -BigInt::one()], init: vec![u0, u1] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn initial(&self) -> &[BigInt] {
        &self.init
    }

    fn step_forward(&self, window: &mut Vec<BigInt>) {
        let d = self.order();
        let mut next = BigInt::zero();
        for i in 0..d {
            next += &self.coeffs[i] * &window[d - 1 - i];
        }
        window.remove(0);
        window.push(next);
    }

    fn step_backward(&self, window: &mut Vec<BigInt>) {
        // u_n = (u_{n+d} - a_1 u_{n+d-1} - ... - a_{d-1} u_{n+1}) / a_d
        let d = self.order();
        let mut acc = window[d - 1].clone();
        for i in 0..d - 1 {
            acc -= &self.coeffs[i] * &window[d - 2 - i];
        }
        let ad = &self.coeffs[d - 1];
        let prev = if ad.is_negative() { -acc } else { acc };
        window.pop();
        window.insert(0, prev);
    }

    pub fn eval(&self, n: i64) -> BigInt {
        let d = self.order() as i64;
        if (0..d).contains(&n) {
            return self.init[n as usize].clone();
        }
        let mut w = self.init.clone();
        if n >= d {
            for _ in 0..(n - d + 1) {
                self.step_forward(&mut w);
            }
            w[self.order() - 1].clone()
        } else {
            for _ in 0..(-n) {
                self.step_backward(&mut w);
            }
            w[0].clone()
        }
    }

    /// `u_lo ..= u_hi`.
    pub fn eval_range(&self, lo: i64, hi: i64) -> Vec<BigInt> {
        if lo > hi {
            return Vec::new();
        }
        let d = self.order();
        let mut w: Vec<BigInt> = (0..d as i64).map(|i| self.eval(lo + i)).collect();
        let mut out = Vec::with_capacity((hi - lo + 1) as usize);
        for _ in lo..=hi {
            out.push(w[0].clone());
            self.step_forward(&mut w);
        }
        out
    }

    /// Characteristic polynomial `X^d - a_1 X^{d-1} - ... - a_d` is squarefree.
    pub fn is_simple(&self) -> bool {
        let d = self.order();
        let mut c = vec![BigInt::zero(); d + 1];
        c[d] = BigInt::one();
        for (i, a) in self.coeffs.iter().enumerate() {
            c[d - 1 - i] = -a;
        }
        let p = IntPoly::new(c).to_rat();
        p.gcd(&p.derivative()).degree() == 0
    }

    /// Minimal period of the sequence modulo `m` and the residues over one
    /// period, starting at index 0.
    pub fn period_mod(&self, m: &BigInt) -> (u64, Vec<BigInt>) {
        assert!(m.is_positive(), "modulus must be >= 1");
        let start: Vec<BigInt> = self.init.iter().map(|u| u.mod_floor(m)).collect();
        let mut w = start.clone();
        let mut table = Vec::new();
        loop {
            table.push(w[0].clone());
            self.step_forward(&mut w);
            for u in w.iter_mut() {
                *u = u.mod_floor(m);
            }
            // the state map is invertible, so the orbit is purely periodic
            if w == start {
                return (table.len() as u64, table);
            }
        }
    }

    /// Indices `n` with `u_n ≡ r (mod m)`.
    pub fn filter_congruence(&self, m: &BigInt, r: &BigInt) -> IndexSet {
        let (p, table) = self.period_mod(m);
        let r = r.mod_floor(m);
        let residues = table.iter().enumerate().filter(|(_, u)| **u == r).map(|(i, _)| i as u64).collect();
        IndexSet::from_residues(p, residues)
    }

    /// Indices `n` with `pred(u_n mod m)`.
    pub fn filter_by(&self, m: &BigInt, pred: impl Fn(&BigInt) -> bool) -> IndexSet {
        let (p, table) = self.period_mod(m);
        let residues = table.iter().enumerate().filter(|(_, u)| pred(u)).map(|(i, _)| i as u64).collect();
        IndexSet::from_residues(p, residues)
    }

    /// `(n, u_n)` for `n = start, start ± 1, ...` in the given direction.
    pub fn walk(&self, start: i64, forward: bool) -> Walk<'_> {
        let d = self.order() as i64;
        let window = if forward { (0..d).map(|i| self.eval(start + i)).collect() } else { (0..d).map(|i| self.eval(start - d + 1 + i)).collect() };
        Walk { seq: self, window, next: start, forward }
    }

    /// Dominant root and monotonicity indices for order <= 2.
    pub fn growth_rank(&self) -> Result<Growth, LrbsError> {
        match self.order() {
            1 => Ok(Growth { epsilon: None, degree: 1, growing: false, forward_from: None, backward_from: None }),
            2 => {
                let (a1, a2) = (&self.coeffs[0], &self.coeffs[1]);
                // roots of X^2 - a1 X - a2
                let disc: BigInt = a1 * a1 + a2 * 4u32;
                if !disc.is_positive() || is_kth_power(&disc, 2) {
                    return Ok(Growth { epsilon: None, degree: 2, growing: false, forward_from: None, backward_from: None });
                }
                // (|a1| + s sqrt(m)) / 2 with disc = s^2 m, m squarefree
                let (sq, m) = square_part(&disc).expect("positive");
                let eps = QuadNum::new(BigRational::new(a1.abs(), BigInt::from(2)), BigRational::new(sq, BigInt::from(2)), m);
                let forward_from = self.monotone_index(1);
                let backward_from = self.monotone_index(-1);
                Ok(Growth { epsilon: Some(eps), degree: 2, growing: true, forward_from, backward_from })
            }
            d => Err(LrbsError::Unsupported(d)),
        }
    }

    /// For order 2 with growing roots: an index from which `|u|` increases
    /// strictly in direction `dir`. Scans at most 4096 steps.
    fn monotone_index(&self, dir: i64) -> Option<i64> {
        let (a1, a2) = (&self.coeffs[0], &self.coeffs[1]);
        let big = a1.abs() >= BigInt::from(2);
        let mut m = 0i64;
        let mut cur = self.eval(m);
        let mut next = self.eval(m + dir);
        for _ in 0..4096 {
            if big && next.abs() > cur.abs() {
                return Some(m);
            }
            if !big && a2.is_one() {
                // a1 = ±1, a2 = 1: aligned signs going forward (alternating
                // going backward) make |u| grow from the next index on
                let prod = a1 * &cur * &next;
                if !cur.is_zero() && !next.is_zero() && if dir > 0 { prod.is_positive() } else { prod.is_negative() } {
                    return Some(m + dir);
                }
            }
            m += dir;
            cur = next;
            next = self.eval(m + dir);
        }
        None
    }
}

/// Iterator returned by [`Lrbs::walk`].
pub struct Walk<'a> {
    seq: &'a Lrbs,
    window: Vec<BigInt>,
    next: i64,
    forward: bool,
}

impl Iterator for Walk<'_> {
    type Item = (i64, BigInt);

    fn next(&mut self) -> Option<(i64, BigInt)> {
        let n = self.next;
        if self.forward {
            let u = self.window[0].clone();
            self.seq.step_forward(&mut self.window);
            self.next += 1;
            Some((n, u))
        } else {
            let u = self.window[self.window.len() - 1].clone();
            self.seq.step_backward(&mut self.window);
            self.next -= 1;
            Some((n, u))
        }
    }
}

/// Result of [`Lrbs::growth_rank`]. `forward_from = Some(n0)` means
/// `|u_{n+1}| > |u_n|` for every `n >= n0`; `backward_from = Some(n1)`
/// means `|u_{n-1}| > |u_n|` for every `n <= n1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Growth {
    pub epsilon: Option<QuadNum>,
    pub degree: usize,
    pub growing: bool,
    pub forward_from: Option<i64>,
    pub backward_from: Option<i64>,
}

/// A periodic set of integer indices, adjusted by finitely many points:
/// `{n : n mod modulus in residues} ∪ added \ removed`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    modulus: u64,
    residues: BTreeSet<u64>,
    added: BTreeSet<i64>,
    removed: BTreeSet<i64>,
}

impl IndexSet {
    pub fn all() -> Self {
        IndexSet::from_residues(1, [0].into_iter().collect())
    }

    pub fn empty() -> Self {
        IndexSet::from_residues(1, BTreeSet::new())
    }

    pub fn from_residues(modulus: u64, residues: BTreeSet<u64>) -> Self {
        assert!(modulus >= 1);
        let mut s = IndexSet { modulus, residues, added: BTreeSet::new(), removed: BTreeSet::new() };
        s.reduce();
        s
    }

    /// `{ offset + modulus * t }`.
    pub fn progression(modulus: u64, offset: i64) -> Self {
        let r = offset.rem_euclid(modulus as i64) as u64;
        IndexSet::from_residues(modulus, [r].into_iter().collect())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn periodic_part_contains(&self, n: i64) -> bool {
        self.residues.contains(&(n.rem_euclid(self.modulus as i64) as u64))
    }

    pub fn contains(&self, n: i64) -> bool {
        if self.added.contains(&n) {
            return true;
        }
        if self.removed.contains(&n) {
            return false;
        }
        self.periodic_part_contains(n)
    }

    /// True when the set has no members at all.
    pub fn is_empty(&self) -> bool {
        self.residues.is_empty() && self.added.is_empty()
    }

    /// True when only finitely many indices are members.
    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn finite_members(&self) -> Option<&BTreeSet<i64>> {
        self.is_finite().then_some(&self.added)
    }

    pub fn complement(&self) -> IndexSet {
        let residues = (0..self.modulus).filter(|r| !self.residues.contains(r)).collect();
        let mut s = IndexSet { modulus: self.modulus, residues, added: self.removed.clone(), removed: self.added.clone() };
        s.reduce();
        s
    }

    fn lift(&self, m: u64) -> BTreeSet<u64> {
        debug_assert_eq!(m % self.modulus, 0);
        (0..m).filter(|r| self.residues.contains(&(r % self.modulus))).collect()
    }

    pub fn intersect(&self, o: &IndexSet) -> IndexSet {
        let m = lcm_u64(self.modulus, o.modulus);
        let a = self.lift(m);
        let b = o.lift(m);
        let residues: BTreeSet<u64> = a.intersection(&b).copied().collect();
        let mut out = IndexSet { modulus: m, residues, added: BTreeSet::new(), removed: BTreeSet::new() };
        let pts: BTreeSet<i64> = self.added.iter().chain(&self.removed).chain(&o.added).chain(&o.removed).copied().collect();
        for p in pts {
            out.set(p, self.contains(p) && o.contains(p));
        }
        out.reduce();
        out
    }

    pub fn union(&self, o: &IndexSet) -> IndexSet {
        self.complement().intersect(&o.complement()).complement()
    }

    pub fn minus(&self, o: &IndexSet) -> IndexSet {
        self.intersect(&o.complement())
    }

    pub fn insert(&mut self, n: i64) {
        self.set(n, true);
        self.reduce();
    }

    pub fn remove(&mut self, n: i64) {
        self.set(n, false);
        self.reduce();
    }

    fn set(&mut self, n: i64, member: bool) {
        self.added.remove(&n);
        self.removed.remove(&n);
        if member != self.periodic_part_contains(n) {
            if member {
                self.added.insert(n);
            } else {
                self.removed.insert(n);
            }
        }
    }

    /// Shrinks the modulus to the minimal period of the residue pattern.
    fn reduce(&mut self) {
        let m = self.modulus;
        let mut best = m;
        for d in divisors_u64(m) {
            if d < best && self.residues.iter().all(|r| self.residues.contains(&((r + d) % m))) {
                best = d;
            }
        }
        if best != m {
            self.residues = self.residues.iter().filter(|&&r| r < best).copied().collect();
            self.modulus = best;
        }
        let added: BTreeSet<i64> = self.added.iter().filter(|&&n| !self.periodic_part_contains(n)).copied().collect();
        let removed: BTreeSet<i64> = self.removed.iter().filter(|&&n| self.periodic_part_contains(n)).copied().collect();
        self.added = added;
        self.removed = removed;
    }

    /// Members in `lo..=hi`, ascending.
    pub fn members_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).filter(|&n| self.contains(n)).collect()
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

fn divisors_u64(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            if d * d != m {
                out.push(m / d);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

/// Index of `n` as `i64` when it fits.
pub fn small_index(n: &BigInt) -> Option<i64> {
    n.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn seq(c: &[i64], u: &[i64]) -> Lrbs {
        Lrbs::new(c.iter().map(|&x| bi(x)).collect(), u.iter().map(|&x| bi(x)).collect()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let s = seq(&[6, -1], &[1, 3]);
        assert_eq!(s.eval(2), bi(17));
        assert_eq!(s.eval(0), bi(1));
        // u_{-1} = (u_1 - a_1 u_0) / a_2
        assert_eq!(s.eval(-1), (bi(3) - bi(6) * bi(1)) / bi(-1));
        assert!(Lrbs::new(vec![bi(2), bi(3)], vec![bi(0), bi(1)]).is_err());
    }

    #[test]
    fn period_examples() {
        assert_eq!(seq(&[1], &[7]).period_mod(&bi(5)).0, 1);
        assert_eq!(seq(&[1, 1], &[0, 1]).period_mod(&bi(10)).0, 60);
        let w = seq(&[6, -1], &[1, 3]);
        let (p, _) = w.period_mod(&bi(8));
        // brute force: smallest P with matching state
        let vals = w.eval_range(0, 200);
        let brute = (1..100).find(|&q| (0..100).all(|i| (&vals[i] - &vals[i + q]).mod_floor(&bi(8)).is_zero())).unwrap();
        assert_eq!(p, brute as u64);
    }

    #[test]
    fn filter_matches_scan() {
        let z = seq(&[6, -1], &[0, 2]);
        let set = z.filter_congruence(&bi(3), &bi(0));
        for n in -60..60 {
            assert_eq!(set.contains(n), z.eval(n).mod_floor(&bi(3)).is_zero(), "n={n}");
        }
        assert!(seq(&[1], &[1]).filter_congruence(&bi(4), &bi(2)).is_empty());
        assert_eq!(seq(&[1], &[2]).filter_congruence(&bi(4), &bi(2)), IndexSet::all());
    }

    #[test]
    fn growth_examples() {
        let g = seq(&[6, -1], &[1, 3]).growth_rank().unwrap();
        assert_eq!(g.epsilon.unwrap(), QuadNum::from_ints(bi(3), bi(2), bi(2)));
        // generic (2 w0, -1): eps = w0 + sqrt(w0^2 - 1)
        let g = seq(&[14, -1], &[0, 1]).growth_rank().unwrap();
        assert_eq!(g.epsilon.unwrap(), QuadNum::from_ints(bi(7), bi(4), bi(3)));
        assert!(!seq(&[1], &[4]).growth_rank().unwrap().growing);
        assert!(matches!(seq(&[0, 0, 1], &[1, 2, 3]).growth_rank(), Err(LrbsError::Unsupported(3))));
    }

    #[test]
    fn index_set_algebra() {
        let evens = IndexSet::progression(2, 0);
        let threes = IndexSet::progression(3, 0);
        let both = evens.intersect(&threes);
        assert_eq!(both, IndexSet::progression(6, 0));
        let mut odd = evens.complement();
        assert_eq!(odd, IndexSet::progression(2, 1));
        odd.insert(4);
        assert!(odd.contains(4) && !odd.contains(6));
        let rest = IndexSet::all().minus(&evens).minus(&IndexSet::progression(2, 1));
        assert!(rest.is_empty());
    }
}
