//! Exact integer kernels: extended CRT, p-adic valuations, k-th roots and
//! power residues, factorization and divisor enumeration.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::NumError;

/// A reduced residue class `r mod M` with `0 <= r < M`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResidueClass {
    pub modulus: BigInt,
    pub residue: BigInt,
}

impl ResidueClass {
    /// Builds the class, reducing `residue` into `[0, modulus)`.
    ///
    /// Panics if `modulus < 1`.
    pub fn new(modulus: BigInt, residue: BigInt) -> Self {
        assert!(modulus.is_positive(), "residue class modulus must be >= 1");
        let residue = residue.mod_floor(&modulus);
        ResidueClass { modulus, residue }
    }

    /// The class of all integers.
    pub fn all() -> Self {
        ResidueClass { modulus: BigInt::one(), residue: BigInt::zero() }
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        n.mod_floor(&self.modulus) == self.residue
    }
}

/// Extended Euclid: returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Inverse of `a` modulo `m` if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, s, _) = ext_gcd(&a.mod_floor(m), m);
    if g.is_one() {
        Some(s.mod_floor(m))
    } else {
        None
    }
}

/// Intersects residue classes with arbitrary (not necessarily coprime)
/// moduli. Returns the class modulo the lcm, or `None` when the
/// intersection is empty.
pub fn crt_extended(classes: &[ResidueClass]) -> Option<ResidueClass> {
    let mut acc = ResidueClass::all();
    for c in classes {
        acc = crt_pair(&acc, c)?;
    }
    Some(acc)
}

fn crt_pair(a: &ResidueClass, b: &ResidueClass) -> Option<ResidueClass> {
    let (g, s, _) = ext_gcd(&a.modulus, &b.modulus);
    let diff = &b.residue - &a.residue;
    if !diff.is_multiple_of(&g) {
        return None;
    }
    let lcm = &a.modulus / &g * &b.modulus;
    // x = ra + Ma * s * (diff / g)
    let step = (&diff / &g * s).mod_floor(&(&b.modulus / &g));
    let x = &a.residue + &a.modulus * step;
    Some(ResidueClass::new(lcm, x))
}

/// Largest `e` with `p^e | n`. Zero is rejected; callers branch on it first.
pub fn valuation(p: &BigInt, n: &BigInt) -> Result<u64, NumError> {
    if n.is_zero() {
        return Err(NumError::ZeroValuation);
    }
    if *p < BigInt::from(2) {
        return Err(NumError::NotPrime(p.clone()));
    }
    let mut n = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Ok(e);
        }
        n = q;
        e += 1;
    }
}

/// Exact k-th root: `Some(u)` with `u^k = n`, the nonnegative root for even k.
pub fn kth_root(n: &BigInt, k: u32) -> Option<BigInt> {
    assert!(k >= 1, "root degree must be positive");
    if n.is_zero() {
        return Some(BigInt::zero());
    }
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return kth_root(&-n, k).map(|u| -u);
    }
    if k == 1 {
        return Some(n.clone());
    }
    if let Some(small) = n.to_u128() {
        return small_kth_root(small, k).map(BigInt::from);
    }
    let u = n.nth_root(k);
    if num_traits::pow(u.clone(), k as usize) == *n {
        Some(u)
    } else {
        None
    }
}

/// Floor of the k-th root for nonnegative `n`.
pub fn floor_kth_root(n: &BigInt, k: u32) -> BigInt {
    assert!(!n.is_negative());
    if let Some(small) = n.to_u128() {
        return BigInt::from(small_floor_root(small, k));
    }
    n.nth_root(k)
}

fn small_floor_root(n: u128, k: u32) -> u128 {
    if n < 2 || k == 1 {
        return n;
    }
    // Binary search on [0, 2^(ceil(128/k))].
    let bits = 128 - n.leading_zeros();
    let mut hi: u128 = 1u128 << (bits / k + 1).min(127);
    let mut lo: u128 = 0;
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        if pow_le(mid, k, n) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

fn pow_le(base: u128, k: u32, limit: u128) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..k {
        match acc.checked_mul(base) {
            Some(v) if v <= limit => acc = v,
            _ => return false,
        }
    }
    true
}

fn small_kth_root(n: u128, k: u32) -> Option<u128> {
    let u = small_floor_root(n, k);
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(u)?;
    }
    (acc == n).then_some(u)
}

pub fn is_kth_power(n: &BigInt, k: u32) -> bool {
    kth_root(n, k).is_some()
}

/// `{ u^k mod m : 0 <= u < m }`.
pub fn kth_power_residues(k: u32, m: &BigInt) -> BTreeSet<BigInt> {
    assert!(m.is_positive());
    let mut out = BTreeSet::new();
    let mut u = BigInt::zero();
    while &u < m {
        out.insert(u.modpow(&BigInt::from(k), m));
        u += 1;
    }
    out
}

/// Signed prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub negative: bool,
    /// Strictly increasing primes with positive exponents.
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn product(&self) -> BigInt {
        let mut p = BigInt::one();
        for (q, e) in &self.factors {
            p *= num_traits::pow(q.clone(), *e as usize);
        }
        if self.negative {
            -p
        } else {
            p
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }
}

const SMALL_PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin with the first twelve prime bases; deterministic below
/// 3.3 * 10^24, which covers every input this crate factors in practice.
pub fn is_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigInt::from(p);
        if *n == p {
            return true;
        }
        if n.is_multiple_of(&p) {
            return false;
        }
    }
    let n_minus_one: BigInt = n - 1;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'bases: for &a in &SMALL_PRIMES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Complete factorization by trial division up to 10^4 followed by
/// Pollard-rho on the remaining cofactor.
pub fn factor(n: &BigInt) -> Result<Factorization, NumError> {
    if n.is_zero() {
        return Err(NumError::FactorZero);
    }
    let negative = n.is_negative();
    let mut rest = n.abs();
    let mut primes: Vec<BigInt> = Vec::new();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(10_000);
    while d <= limit && &d * &d <= rest {
        while rest.is_multiple_of(&d) {
            primes.push(d.clone());
            rest /= &d;
        }
        d += if d == BigInt::from(2) { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        if &d * &d > rest {
            primes.push(rest);
        } else {
            split_large(rest, &mut primes);
        }
    }
    primes.sort();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { negative, factors })
}

fn split_large(n: BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    if let Some(r) = kth_root(&n, 2) {
        split_large(r.clone(), out);
        split_large(r, out);
        return;
    }
    let mut c = BigInt::one();
    loop {
        if let Some(d) = pollard_brent(&n, &c) {
            split_large(d.clone(), out);
            split_large(&n / d, out);
            return;
        }
        c += 1;
    }
}

fn pollard_brent(n: &BigInt, c: &BigInt) -> Option<BigInt> {
    let f = |x: &BigInt| (x * x + c) % n;
    let mut y = BigInt::from(2);
    let mut r: u64 = 1;
    let m: u64 = 128;
    let mut g = BigInt::one();
    let mut q = BigInt::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > (1 << 24) {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

/// Positive divisors of `|n|`, sorted.
pub fn divisors(n: &BigInt) -> Result<Vec<BigInt>, NumError> {
    let f = factor(n)?;
    let mut divs = vec![BigInt::one()];
    for (p, e) in &f.factors {
        let mut next = Vec::with_capacity(divs.len() * (*e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=*e {
                next.push(d * &pk);
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

/// All ordered pairs `(d, N/d)` over signed divisors `d` of `N`.
pub fn divisor_pairs(n: &BigInt) -> Result<Vec<(BigInt, BigInt)>, NumError> {
    let divs = divisors(n)?;
    let mut out = Vec::with_capacity(divs.len() * 2);
    for d in divs {
        let e = n / &d;
        out.push((-&d, -&e));
        out.push((d, e));
    }
    out.sort();
    Ok(out)
}

/// Largest square dividing `n`, returned as `(s, m)` with `n = s^2 * m`
/// and `m` squarefree (sign carried by `m`).
pub fn square_part(n: &BigInt) -> Result<(BigInt, BigInt), NumError> {
    let f = factor(n)?;
    let mut s = BigInt::one();
    let mut m = if f.negative { -BigInt::one() } else { BigInt::one() };
    for (p, e) in &f.factors {
        s *= num_traits::pow(p.clone(), (*e / 2) as usize);
        if e % 2 == 1 {
            m *= p;
        }
    }
    Ok((s, m))
}

/// All `z` in `[0, m)` with `z^2 ≡ d (mod m)`, sorted.
pub fn sqrt_mod(d: &BigInt, m: &BigInt) -> Vec<BigInt> {
    assert!(m.is_positive());
    if m.is_one() {
        return vec![BigInt::zero()];
    }
    let f = factor(m).expect("modulus is nonzero");
    let mut acc: Vec<BigInt> = vec![BigInt::zero()];
    let mut acc_mod = BigInt::one();
    for (p, e) in &f.factors {
        let pe = num_traits::pow(p.clone(), *e as usize);
        let roots = sqrt_mod_prime_power(d, p, *e);
        if roots.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(acc.len() * roots.len());
        for a in &acc {
            for r in &roots {
                let c = crt_pair(&ResidueClass::new(acc_mod.clone(), a.clone()), &ResidueClass::new(pe.clone(), r.clone()))
                    .expect("coprime moduli");
                next.push(c.residue);
            }
        }
        acc = next;
        acc_mod *= pe;
    }
    acc.sort();
    acc
}

fn sqrt_mod_prime_power(d: &BigInt, p: &BigInt, e: u32) -> Vec<BigInt> {
    let pe = num_traits::pow(p.clone(), e as usize);
    let small = BigInt::from(1u32 << 16);
    if pe <= small {
        let target = d.mod_floor(&pe);
        let mut out = Vec::new();
        let mut z = BigInt::zero();
        while z < pe {
            if (&z * &z).mod_floor(&pe) == target {
                out.push(z.clone());
            }
            z += 1;
        }
        return out;
    }
    // roots mod p
    let mut roots: Vec<BigInt> = if p <= &small {
        sqrt_mod_prime_power(d, p, 1)
    } else {
        let dp = d.mod_floor(p);
        if dp.is_zero() {
            vec![BigInt::zero()]
        } else {
            match tonelli_shanks(&dp, p) {
                Some(r) => {
                    let s = p - &r;
                    if s == r { vec![r] } else { vec![r, s] }
                }
                None => Vec::new(),
            }
        }
    };
    let mut pk = p.clone();
    for _ in 1..e {
        let next_mod = &pk * p;
        let target = d.mod_floor(&next_mod);
        let mut next = Vec::new();
        for r in &roots {
            let two_r = (r * 2u32).mod_floor(p);
            if p != &BigInt::from(2) && !two_r.is_zero() {
                // Hensel: unique lift
                let inv = mod_inverse(&(r * 2u32), &next_mod).expect("unit");
                let lifted = (r - (r * r - d) * inv).mod_floor(&next_mod);
                if (&lifted * &lifted).mod_floor(&next_mod) == target {
                    next.push(lifted);
                }
            } else {
                let mut t = BigInt::zero();
                while &t < p {
                    let c = r + &t * &pk;
                    if (&c * &c).mod_floor(&next_mod) == target {
                        next.push(c);
                    }
                    t += 1;
                }
            }
        }
        next.sort();
        next.dedup();
        roots = next;
        pk = next_mod;
    }
    roots
}

/// Square root of a nonzero quadratic residue modulo an odd prime.
fn tonelli_shanks(n: &BigInt, p: &BigInt) -> Option<BigInt> {
    let one = BigInt::one();
    let pm1 = p - 1u32;
    if n.modpow(&(&pm1 >> 1), p) != one {
        return None;
    }
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while z.modpow(&(&pm1 >> 1), p) != pm1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = n.modpow(&q, p);
    let mut r = n.modpow(&((&q + 1u32) >> 1), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    Some(r)
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a / a.gcd(b) * b).abs()
}

/// Floor and ceiling of `a / b` for `b != 0`.
pub fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

pub fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn rc(m: i64, r: i64) -> ResidueClass {
        ResidueClass::new(bi(m), bi(r))
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_extended(&[rc(4, 1), rc(6, 5)]), Some(rc(12, 5)));
        assert_eq!(crt_extended(&[rc(4, 1), rc(6, 2)]), None);
        assert_eq!(crt_extended(&[rc(5, 3)]), Some(rc(5, 3)));
        assert_eq!(crt_extended(&[]), Some(rc(1, 0)));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&bi(2), &bi(20)).unwrap(), 2);
        assert_eq!(valuation(&bi(3), &bi(1)).unwrap(), 0);
        assert_eq!(valuation(&bi(5), &bi(-250)).unwrap(), 3);
        assert_eq!(valuation(&bi(5), &bi(0)), Err(NumError::ZeroValuation));
    }

    #[test]
    fn kth_root_examples() {
        assert_eq!(kth_root(&bi(16), 4), Some(bi(2)));
        assert_eq!(kth_root(&bi(-27), 3), Some(bi(-3)));
        assert_eq!(kth_root(&bi(2), 2), None);
        assert_eq!(kth_root(&bi(-4), 2), None);
        assert_eq!(kth_root(&bi(0), 5), Some(bi(0)));
        let big = num_traits::pow(BigInt::from(10u64).pow(20u32) + 7, 3);
        assert_eq!(kth_root(&big, 3), Some(BigInt::from(10u64).pow(20u32) + 7));
        assert_eq!(kth_root(&(big + 1), 3), None);
    }

    #[test]
    fn power_residue_examples() {
        let set = |v: &[i64]| v.iter().map(|&x| bi(x)).collect::<BTreeSet<_>>();
        assert_eq!(kth_power_residues(2, &bi(4)), set(&[0, 1]));
        assert_eq!(kth_power_residues(2, &bi(1)), set(&[0]));
        assert_eq!(kth_power_residues(3, &bi(9)), set(&[0, 1, 8]));
    }

    #[test]
    fn factor_examples() {
        let f = factor(&bi(500)).unwrap();
        assert_eq!(f.factors, vec![(bi(2), 2), (bi(5), 3)]);
        assert!(!f.negative);
        assert!(factor(&bi(1)).unwrap().factors.is_empty());
        let f = factor(&bi(-97)).unwrap();
        assert!(f.negative);
        assert_eq!(f.factors, vec![(bi(97), 1)]);
        assert_eq!(factor(&bi(0)), Err(NumError::FactorZero));
        // two primes above the trial-division limit
        let n = BigInt::from(1_000_003u64) * BigInt::from(999_983u64) * BigInt::from(1_000_003u64);
        let f = factor(&n).unwrap();
        assert_eq!(f.factors, vec![(BigInt::from(999_983u64), 1), (BigInt::from(1_000_003u64), 2)]);
    }

    #[test]
    fn divisor_pair_examples() {
        let pairs = divisor_pairs(&bi(4)).unwrap();
        let expect: Vec<(BigInt, BigInt)> =
            [(-4, -1), (-2, -2), (-1, -4), (1, 4), (2, 2), (4, 1)].iter().map(|&(a, b)| (bi(a), bi(b))).collect();
        assert_eq!(pairs, expect);
        assert_eq!(divisor_pairs(&bi(1)).unwrap(), vec![(bi(-1), bi(-1)), (bi(1), bi(1))]);
        assert_eq!(divisor_pairs(&bi(6)).unwrap().len(), 8);
        assert_eq!(divisor_pairs(&bi(-6)).unwrap().len(), 8);
        for (d, e) in divisor_pairs(&bi(-6)).unwrap() {
            assert_eq!(d * e, bi(-6));
        }
    }

    #[test]
    fn square_part_splits() {
        assert_eq!(square_part(&bi(72)).unwrap(), (bi(6), bi(2)));
        assert_eq!(square_part(&bi(-45)).unwrap(), (bi(3), bi(-5)));
    }

    #[test]
    fn sqrt_mod_matches_scan() {
        for m in [1i64, 2, 8, 9, 12, 45, 97, 360, 1024, 3 * 3 * 3 * 7] {
            for d in -20i64..20 {
                let got = sqrt_mod(&bi(d), &bi(m));
                let want: Vec<BigInt> = (0..m).filter(|z| (z * z - d).rem_euclid(m) == 0).map(bi).collect();
                assert_eq!(got, want, "d={d} m={m}");
            }
        }
        // large prime path
        let p = bi(1_000_003);
        let roots = sqrt_mod(&bi(2), &(&p * &p));
        for r in &roots {
            let sq: BigInt = r * r - 2;
            assert_eq!(sq.mod_floor(&(&p * &p)), bi(0));
        }
    }
}
