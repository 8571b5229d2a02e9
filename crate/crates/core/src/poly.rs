//! Univariate polynomials over Z and Q with exact integer root isolation.
//!
//! Coefficients are stored lowest degree first.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add_const(&self, k: &BigInt) -> IntPoly {
        let mut c = self.coeffs.clone();
        if c.is_empty() {
            c.push(BigInt::zero());
        }
        c[0] += k;
        IntPoly::new(c)
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Bound `B` such that every real root lies in `(-B, B)`.
    pub fn root_bound(&self) -> BigInt {
        let lead = self.leading().abs();
        if lead.is_zero() {
            return BigInt::one();
        }
        let mut m = BigInt::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let q = c.abs().div_ceil(&lead);
            if q > m {
                m = q;
            }
        }
        m + 1
    }

    /// Sorted integer breakpoints such that the polynomial is monotone on the
    /// integers of every closed interval between consecutive breakpoints and
    /// on both unbounded tails.
    pub fn breakpoints(&self) -> Vec<BigInt> {
        if self.degree() <= 1 {
            return Vec::new();
        }
        let dp = self.derivative();
        let inner = dp.breakpoints();
        let bound = dp.root_bound();
        let mut cuts: Vec<BigInt> = inner.clone();
        cuts.push(-&bound);
        cuts.push(bound);
        cuts.sort();
        cuts.dedup();
        let mut out = inner;
        for w in cuts.windows(2) {
            let (l, r) = (&w[0], &w[1]);
            let sl = dp.eval(l).signum();
            let sr = dp.eval(r).signum();
            if sl.is_zero() {
                out.push(l.clone());
            }
            if sr.is_zero() {
                out.push(r.clone());
            }
            if (&sl * &sr).is_negative() {
                // dp is monotone on [l, r]; find the last t keeping sign sl.
                let (mut lo, mut hi) = (l.clone(), r.clone());
                while &hi - &lo > BigInt::one() {
                    let mid: BigInt = (&lo + &hi) >> 1;
                    if dp.eval(&mid).signum() == sl {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(lo);
                out.push(hi);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Integer `t` with `lo <= p(t) <= hi`, as sorted disjoint inclusive
    /// intervals. Either bound may be absent. Returns `None` when the set is
    /// infinite. A constant polynomial yields `None` or the empty list.
    pub fn solve_between(&self, lo: Option<&BigInt>, hi: Option<&BigInt>) -> Option<Vec<(BigInt, BigInt)>> {
        let inside = |v: &BigInt| lo.is_none_or(|l| v >= l) && hi.is_none_or(|h| v <= h);
        if self.degree() == 0 {
            return if inside(&self.coeff(0)) { None } else { Some(Vec::new()) };
        }
        let mut bps = self.breakpoints();
        if bps.is_empty() {
            bps.push(BigInt::zero());
        }
        let mut out: Vec<(BigInt, BigInt)> = Vec::new();
        let push = |out: &mut Vec<(BigInt, BigInt)>, a: BigInt, b: BigInt| {
            if a <= b {
                out.push((a, b));
            }
        };
        // left tail (-inf, bps[0]]
        let first = bps[0].clone();
        let left_increasing = {
            // as t -> -inf, p(t) ~ lead * t^d
            let lead_pos = self.leading().is_positive();
            let even = self.degree() % 2 == 0;
            // increasing on the left tail means p -> -inf as t -> -inf
            lead_pos != even
        };
        let left_end = self.tail_extent(&first, -1, left_increasing, lo, hi)?;
        if let Some(end) = left_end {
            let (a, b) = self.monotone_window(&end, &first, lo, hi);
            if let (Some(a), Some(b)) = (a, b) {
                push(&mut out, a, b);
            }
        }
        for w in bps.windows(2) {
            let (a, b) = self.monotone_window(&w[0], &w[1], lo, hi);
            if let (Some(a), Some(b)) = (a, b) {
                push(&mut out, a, b);
            }
        }
        let last = bps[bps.len() - 1].clone();
        let right_increasing = self.leading().is_positive();
        let right_end = self.tail_extent(&last, 1, right_increasing, lo, hi)?;
        if let Some(end) = right_end {
            let (a, b) = self.monotone_window(&last, &end, lo, hi);
            if let (Some(a), Some(b)) = (a, b) {
                push(&mut out, a, b);
            }
        }
        out.sort();
        // merge overlaps (adjacent pieces share endpoints)
        let mut merged: Vec<(BigInt, BigInt)> = Vec::new();
        for (a, b) in out {
            match merged.last_mut() {
                Some((_, pb)) if a <= &*pb + 1 => {
                    if b > *pb {
                        *pb = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        Some(merged)
    }

    /// On a tail starting at `start` and moving in direction `dir`, find an
    /// end point past which no value lies in `[lo, hi]`. `Ok(None)` from the
    /// outer option means infinitely many solutions.
    fn tail_extent(
        &self,
        start: &BigInt,
        dir: i32,
        increasing_in_t: bool,
        lo: Option<&BigInt>,
        hi: Option<&BigInt>,
    ) -> Option<Option<BigInt>> {
        // Moving outward, values go to +inf when the tail is increasing in the
        // outward direction.
        let outward_up = if dir > 0 { increasing_in_t } else { !increasing_in_t };
        let escape = if outward_up { hi } else { lo };
        let escape = match escape {
            Some(e) => e.clone(),
            None => {
                // values run off to the unbounded side; infinite iff they enter the window
                return None;
            }
        };
        let step_dir = BigInt::from(dir);
        let mut step = BigInt::one();
        let mut t = start.clone();
        loop {
            let v = self.eval(&t);
            let escaped = if outward_up { v > escape } else { v < escape };
            if escaped {
                return Some(Some(t));
            }
            t = start + &step_dir * &step;
            step <<= 1;
        }
    }

    /// Values in `[lo, hi]` on a piece `[a, b]` (either order) where the
    /// polynomial is monotone.
    fn monotone_window(
        &self,
        a: &BigInt,
        b: &BigInt,
        lo: Option<&BigInt>,
        hi: Option<&BigInt>,
    ) -> (Option<BigInt>, Option<BigInt>) {
        let (a, b) = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        let pa = self.eval(&a);
        let pb = self.eval(&b);
        let increasing = pb >= pa;
        let ge_lo = |t: &BigInt| lo.is_none_or(|l| &self.eval(t) >= l);
        let le_hi = |t: &BigInt| hi.is_none_or(|h| &self.eval(t) <= h);
        if increasing {
            // first t with p(t) >= lo, last t with p(t) <= hi
            let start = first_true(&a, &b, &ge_lo);
            let end = last_true(&a, &b, &le_hi);
            match (start, end) {
                (Some(s), Some(e)) if s <= e => (Some(s), Some(e)),
                _ => (None, None),
            }
        } else {
            let start = first_true(&a, &b, &le_hi);
            let end = last_true(&a, &b, &ge_lo);
            match (start, end) {
                (Some(s), Some(e)) if s <= e => (Some(s), Some(e)),
                _ => (None, None),
            }
        }
    }

    /// Integer roots of the polynomial (empty for the zero polynomial).
    pub fn integer_roots(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let zero = BigInt::zero();
        let mut out = Vec::new();
        if let Some(iv) = self.solve_between(Some(&zero), Some(&zero)) {
            for (a, b) in iv {
                let mut t = a;
                while t <= b {
                    out.push(t.clone());
                    t += 1;
                }
            }
        }
        out
    }
}

/// First `t` in `[a, b]` where monotone predicate `pred` becomes true.
fn first_true(a: &BigInt, b: &BigInt, pred: &dyn Fn(&BigInt) -> bool) -> Option<BigInt> {
    if !pred(b) {
        return None;
    }
    if pred(a) {
        return Some(a.clone());
    }
    let (mut lo, mut hi) = (a.clone(), b.clone());
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if pred(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Last `t` in `[a, b]` where monotone predicate `pred` is still true.
fn last_true(a: &BigInt, b: &BigInt, pred: &dyn Fn(&BigInt) -> bool) -> Option<BigInt> {
    if !pred(a) {
        return None;
    }
    if pred(b) {
        return Some(b.clone());
    }
    let (mut lo, mut hi) = (a.clone(), b.clone());
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if pred(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Integer solutions `t` of `t^k + d t = v`, sorted.
pub fn depressed_roots(k: u32, d: &BigInt, v: &BigInt) -> Vec<BigInt> {
    use crate::numtheory::{floor_kth_root, kth_root};
    if d.is_zero() {
        return match kth_root(v, k) {
            Some(r) if r.is_zero() => alloc::vec![r],
            Some(r) if k % 2 == 0 => alloc::vec![-r.clone(), r],
            Some(r) => alloc::vec![r],
            None => Vec::new(),
        };
    }
    if k != 3 {
        let mut c = alloc::vec![BigInt::zero(); k as usize + 1];
        c[0] = -v;
        c[1] = d.clone();
        c[k as usize] = BigInt::one();
        return IntPoly::new(c).integer_roots();
    }
    // |t| >= 2 sqrt|d| and |t| >= 2 cbrt|v| force |t^3 + d t| > |v|
    let bound = core::cmp::max(floor_kth_root(&d.abs(), 2) * 2u32 + 2u32, floor_kth_root(&v.abs(), 3) * 2u32 + 2u32);
    let mut pieces: Vec<(BigInt, BigInt)> = Vec::new();
    if d.is_negative() {
        let c0 = floor_kth_root(&(-d / 3u32), 2);
        pieces.push((-&bound, -&c0 - 1u32));
        pieces.push((-&c0, c0.clone()));
        pieces.push((c0 + 1u32, bound.clone()));
    } else {
        pieces.push((-&bound, bound.clone()));
    }
    let small = bound.bits() <= 40 && d.bits() <= 40 && v.bits() <= 120;
    let mut out = Vec::new();
    if small {
        let (dd, vv) = (i128::try_from(d).unwrap(), i128::try_from(v).unwrap());
        let f = |t: i128| t * t * t + dd * t;
        for (lo, hi) in pieces {
            let (lo, hi) = (i128::try_from(&lo).unwrap(), i128::try_from(&hi).unwrap());
            if lo > hi {
                continue;
            }
            let inc = f(hi) >= f(lo);
            let (mut a, mut b) = (lo, hi);
            while a < b {
                let mid = a + (b - a) / 2;
                let below = if inc { f(mid) < vv } else { f(mid) > vv };
                if below {
                    a = mid + 1;
                } else {
                    b = mid;
                }
            }
            if f(a) == vv {
                out.push(BigInt::from(a));
            }
        }
    } else {
        let f = |t: &BigInt| t * t * t + d * t;
        for (lo, hi) in pieces {
            if lo > hi {
                continue;
            }
            let inc = f(&hi) >= f(&lo);
            let (mut a, mut b) = (lo, hi);
            while a < b {
                let mid: BigInt = (&a + &b).div_floor(&BigInt::from(2));
                let fm = f(&mid);
                let below = if inc { &fm < v } else { &fm > v };
                if below {
                    a = mid + 1u32;
                } else {
                    b = mid;
                }
            }
            if &f(&a) == v {
                out.push(a);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Polynomial over Q.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        RatPoly::new(vec![c])
    }

    /// `num / den` applied coefficientwise to an integer polynomial.
    pub fn from_int_over(p: &IntPoly, den: &BigInt) -> Self {
        RatPoly::new(p.coeffs().iter().map(|c| BigRational::new(c.clone(), den.clone())).collect())
    }

    pub fn monomial_x() -> Self {
        RatPoly::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_int(&self, t: &BigInt) -> BigRational {
        self.eval(&BigRational::from_integer(t.clone()))
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, k: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `self(inner(t))`.
    pub fn compose(&self, inner: &RatPoly) -> RatPoly {
        let mut acc = RatPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&RatPoly::constant(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Division with remainder.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = d.degree();
        let lead = d.leading();
        if self.is_zero() || self.degree() < dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); self.degree() - dd + 1];
        for i in (0..q.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        rem.truncate(dd);
        (RatPoly::new(q), RatPoly::new(rem))
    }

    /// Monic gcd over Q.
    pub fn gcd(&self, o: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let l = a.leading();
        a.scale(&(BigRational::one() / l))
    }

    /// Clears denominators: returns `(p, d)` with `self = p / d`, `d > 0`.
    pub fn to_int_over(&self) -> (IntPoly, BigInt) {
        let mut d = BigInt::one();
        for c in &self.coeffs {
            d = d.lcm(c.denom());
        }
        let p = IntPoly::new(self.coeffs.iter().map(|c| (c * BigRational::from_integer(d.clone())).to_integer()).collect());
        (p, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn brute(p: &IntPoly, lo: i64, hi: i64, range: i64) -> Vec<i64> {
        (-range..=range).filter(|&t| {
            let v = p.eval(&bi(t));
            v >= bi(lo) && v <= bi(hi)
        }).collect()
    }

    fn expand(iv: &[(BigInt, BigInt)]) -> Vec<i64> {
        let mut out = Vec::new();
        for (a, b) in iv {
            let mut t = a.clone();
            while &t <= b {
                out.push(i64::try_from(&t).unwrap());
                t += 1;
            }
        }
        out
    }

    #[test]
    fn solve_between_matches_scan() {
        let polys = [
            IntPoly::from_i64(&[0, 0, 1]),
            IntPoly::from_i64(&[5, -7, 0, 1]),
            IntPoly::from_i64(&[-3, 1, 2, -1]),
            IntPoly::from_i64(&[100, 0, -30, 0, 1]),
            IntPoly::from_i64(&[1, 0, 0, 0, 0, 0, -2]),
            IntPoly::from_i64(&[0, 3, 0, -4]),
        ];
        for p in &polys {
            for (lo, hi) in [(-50, 50), (0, 0), (7, 7), (-1000, 1000), (10, 200)] {
                let got = p.solve_between(Some(&bi(lo)), Some(&bi(hi))).unwrap();
                assert_eq!(expand(&got), brute(p, lo, hi, 200), "{p:?} in [{lo},{hi}]");
            }
        }
    }

    #[test]
    fn one_sided_bounds() {
        // -t^2 + 10 >= 0 only for |t| <= 3
        let p = IntPoly::from_i64(&[10, 0, -1]);
        let got = p.solve_between(Some(&bi(0)), None).unwrap();
        assert_eq!(expand(&got), vec![-3, -2, -1, 0, 1, 2, 3]);
        // t^2 >= 0 is infinite
        assert!(IntPoly::from_i64(&[0, 0, 1]).solve_between(Some(&bi(0)), None).is_none());
        // t^3 <= 8 is infinite (left tail)
        assert!(IntPoly::from_i64(&[0, 0, 0, 1]).solve_between(None, Some(&bi(8))).is_none());
    }

    #[test]
    fn integer_roots_of_cubic() {
        // (t-1)(t+2)(2t-3)
        let p = IntPoly::from_i64(&[6, -7, -1, 2]);
        assert_eq!(p.integer_roots(), vec![bi(-2), bi(1)]);
    }

    #[test]
    fn rational_gcd_finds_double_root() {
        // (t-1)^2 (t+2) = t^3 - 3t + 2
        let p = IntPoly::from_i64(&[2, -3, 0, 1]).to_rat();
        let g = p.gcd(&p.derivative());
        assert_eq!(g, IntPoly::from_i64(&[-1, 1]).to_rat());
    }

    #[test]
    fn compose_and_clear() {
        let p = RatPoly::new(vec![BigRational::new(bi(1), bi(2)), BigRational::zero(), BigRational::new(bi(3), bi(4))]);
        let inner = IntPoly::from_i64(&[1, 2]).to_rat();
        let c = p.compose(&inner);
        for t in -5..5 {
            let tt = BigRational::from_integer(bi(t));
            assert_eq!(c.eval(&tt), p.eval(&inner.eval(&tt)));
        }
        let (ip, d) = c.to_int_over();
        assert_eq!(d, bi(4));
        assert_eq!(RatPoly::from_int_over(&ip, &d), c);
    }

    #[test]
    fn depressed_roots_match_scan() {
        for d in [-40i64, -7, -3, 0, 2, 9] {
            for v in -3000i64..3000 {
                let got = depressed_roots(3, &bi(d), &bi(v));
                let want: Vec<BigInt> = (-100i64..=100).filter(|t| t * t * t + d * t == v).map(bi).collect();
                assert_eq!(got, want, "d={d} v={v}");
            }
        }
        assert_eq!(depressed_roots(2, &bi(0), &bi(49)), vec![bi(-7), bi(7)]);
        assert_eq!(depressed_roots(5, &bi(0), &bi(-32)), vec![bi(-2)]);
        let big = BigInt::from(10).pow(30u32);
        let v: BigInt = &big * &big * &big - &big * 5;
        assert_eq!(depressed_roots(3, &bi(-5), &v), vec![big]);
    }
}
