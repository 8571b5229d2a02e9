//! Normalized constraint atoms over the solver variable.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numtheory::kth_root;
use crate::poly::{depressed_roots, IntPoly};

/// `Z^k(a z + b)`, negated when `positive` is false.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PowerAtom {
    pub positive: bool,
    pub k: u32,
    pub a: BigInt,
    pub b: BigInt,
}

impl PowerAtom {
    pub fn new(positive: bool, k: u32, a: BigInt, b: BigInt) -> Self {
        PowerAtom { positive, k, a, b }
    }

    pub fn value(&self, z: &BigInt) -> BigInt {
        &self.a * z + &self.b
    }

    /// Truth of the underlying predicate, ignoring the sign.
    pub fn predicate_at(&self, z: &BigInt) -> bool {
        kth_root(&self.value(z), self.k).is_some()
    }

    pub fn holds(&self, z: &BigInt) -> bool {
        self.predicate_at(z) == self.positive
    }

    pub fn similar(&self, o: &PowerAtom) -> bool {
        &self.a * &o.b == &o.a * &self.b
    }
}

impl fmt::Display for PowerAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "not ")?;
        }
        write!(f, "Z^{}({})", self.k, affine(&self.a, &self.b))
    }
}

/// `∃t. t mod q ∈ residues ∧ t^degree + d t = a z + b`, negated when
/// `positive` is false. Produced by depression of a declared predicate
/// (degree 2 or 3) or from `Z^2`/`Z^3` atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyAtom {
    pub positive: bool,
    pub name: String,
    pub degree: u32,
    pub d: BigInt,
    pub q: BigInt,
    pub residues: BTreeSet<BigInt>,
    pub a: BigInt,
    pub b: BigInt,
}

impl PolyAtom {
    pub fn from_power(p: &PowerAtom) -> Self {
        PolyAtom {
            positive: p.positive,
            name: format!("Z^{}", p.k),
            degree: p.k,
            d: BigInt::zero(),
            q: BigInt::one(),
            residues: [BigInt::zero()].into_iter().collect(),
            a: p.a.clone(),
            b: p.b.clone(),
        }
    }

    /// `t^degree + d t`.
    pub fn f(&self) -> IntPoly {
        let mut c = alloc::vec![BigInt::zero(); self.degree as usize + 1];
        c[1] += &self.d;
        c[self.degree as usize] += BigInt::one();
        IntPoly::new(c)
    }

    pub fn f_at(&self, t: &BigInt) -> BigInt {
        num_traits::pow(t.clone(), self.degree as usize) + &self.d * t
    }

    pub fn value(&self, z: &BigInt) -> BigInt {
        &self.a * z + &self.b
    }

    pub fn admits(&self, t: &BigInt) -> bool {
        self.residues.contains(&t.mod_floor(&self.q))
    }

    /// Roots `t` of `f(t) = v` lying in the residue classes.
    pub fn roots_of(&self, v: &BigInt) -> alloc::vec::Vec<BigInt> {
        depressed_roots(self.degree, &self.d, v).into_iter().filter(|t| self.admits(t)).collect()
    }

    pub fn predicate_at(&self, z: &BigInt) -> bool {
        !self.roots_of(&self.value(z)).is_empty()
    }

    pub fn holds(&self, z: &BigInt) -> bool {
        self.predicate_at(z) == self.positive
    }

    /// Square-type atom: `t^2 = a z + b`.
    pub fn is_quadratic(&self) -> bool {
        self.degree == 2 && self.d.is_zero()
    }

    pub fn similar(&self, o: &PolyAtom) -> bool {
        &self.a * &o.b == &o.a * &self.b
    }

    /// Same predicate data, ignoring the sign.
    pub fn same_predicate(&self, o: &PolyAtom) -> bool {
        self.degree == o.degree && self.d == o.d && self.q == o.q && self.residues == o.residues && self.a == o.a && self.b == o.b
    }
}

impl fmt::Display for PolyAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "not ")?;
        }
        write!(f, "{}[t^{}", self.name, self.degree)?;
        if !self.d.is_zero() {
            write!(f, "{:+}t", self.d)?;
        }
        write!(f, " = {}", affine(&self.a, &self.b))?;
        if !self.q.is_one() {
            write!(f, ", t mod {} in {{", self.q)?;
            for (i, r) in self.residues.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{r}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "]")
    }
}

fn affine(a: &BigInt, b: &BigInt) -> String {
    if a.is_zero() {
        return format!("{b}");
    }
    let lead = if a.is_one() {
        String::from("z")
    } else if (-a).is_one() {
        String::from("-z")
    } else {
        format!("{a}z")
    };
    match b.sign() {
        num_bigint::Sign::NoSign => lead,
        num_bigint::Sign::Plus => format!("{lead}+{b}"),
        num_bigint::Sign::Minus => format!("{lead}{b}"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Power(PowerAtom),
    Poly(PolyAtom),
}

impl Constraint {
    pub fn positive(&self) -> bool {
        match self {
            Constraint::Power(p) => p.positive,
            Constraint::Poly(p) => p.positive,
        }
    }

    pub fn coeffs(&self) -> (&BigInt, &BigInt) {
        match self {
            Constraint::Power(p) => (&p.a, &p.b),
            Constraint::Poly(p) => (&p.a, &p.b),
        }
    }

    pub fn holds(&self, z: &BigInt) -> bool {
        match self {
            Constraint::Power(p) => p.holds(z),
            Constraint::Poly(p) => p.holds(z),
        }
    }

    pub fn predicate_at(&self, z: &BigInt) -> bool {
        match self {
            Constraint::Power(p) => p.predicate_at(z),
            Constraint::Poly(p) => p.predicate_at(z),
        }
    }

    /// Substitutes `z -> m z + r`.
    pub fn substitute(&self, m: &BigInt, r: &BigInt) -> Constraint {
        let map = |a: &BigInt, b: &BigInt| (a * m, a * r + b);
        match self {
            Constraint::Power(p) => {
                let (a, b) = map(&p.a, &p.b);
                Constraint::Power(PowerAtom { a, b, ..p.clone() })
            }
            Constraint::Poly(p) => {
                let (a, b) = map(&p.a, &p.b);
                Constraint::Poly(PolyAtom { a, b, ..p.clone() })
            }
        }
    }

    pub fn negated(&self) -> Constraint {
        match self {
            Constraint::Power(p) => Constraint::Power(PowerAtom { positive: !p.positive, ..p.clone() }),
            Constraint::Poly(p) => Constraint::Poly(PolyAtom { positive: !p.positive, ..p.clone() }),
        }
    }

    /// Exponent of the leading term; even exponents bound the value below.
    pub fn degree(&self) -> u32 {
        match self {
            Constraint::Power(p) => p.k,
            Constraint::Poly(p) => p.degree,
        }
    }

    /// Rewrites an atom with `a < 0` into one with `a > 0` when the
    /// predicate is odd (`f(-t) = -f(t)`); `None` for even ones.
    pub fn flip_odd(&self) -> Option<Constraint> {
        match self {
            Constraint::Power(p) if p.k % 2 == 1 => Some(Constraint::Power(PowerAtom { a: -&p.a, b: -&p.b, ..p.clone() })),
            Constraint::Poly(p) if p.degree % 2 == 1 => {
                let residues = p.residues.iter().map(|r| (-r).mod_floor(&p.q)).collect();
                Some(Constraint::Poly(PolyAtom { a: -&p.a, b: -&p.b, residues, ..p.clone() }))
            }
            _ => None,
        }
    }

    /// For even predicates the value is nonnegative; with `a < 0` this bounds
    /// `z <= floor(b / -a)`.
    pub fn even_upper_bound(&self) -> Option<BigInt> {
        let (a, b) = self.coeffs();
        if a.is_negative() && self.degree() % 2 == 0 {
            Some(b.div_floor(&-a))
        } else {
            None
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Power(p) => p.fmt(f),
            Constraint::Poly(p) => p.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn flip_preserves_truth() {
        let c = Constraint::Poly(PolyAtom {
            positive: true,
            name: "C".into(),
            degree: 3,
            d: bi(-3),
            q: bi(5),
            residues: [bi(1), bi(2)].into_iter().collect(),
            a: bi(-7),
            b: bi(4),
        });
        let f = c.flip_odd().unwrap();
        for z in -300..300 {
            assert_eq!(c.holds(&bi(z)), f.holds(&bi(z)), "z={z}");
        }
        let p = Constraint::Power(PowerAtom::new(false, 5, bi(-3), bi(1)));
        let g = p.flip_odd().unwrap();
        for z in -300..300 {
            assert_eq!(p.holds(&bi(z)), g.holds(&bi(z)));
        }
    }
}
