//! Systems mixing value sets of integer-valued polynomials of degree 2 and
//! 3 with perfect powers.
//!
//! Every predicate is depressed to `t^d + D t = a z + b` with a congruence
//! condition on `t`. Pairs of atoms are then curves in `(t1, t2)`; the
//! cases below follow their genus and the shape of their factorization.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::atoms::{Constraint, PolyAtom};
use crate::error::DepressError;
use crate::formula::{ConstraintSystem, PredicateDecl};
use crate::lrbs::IndexSet;
use crate::numtheory::{divisor_pairs, divisors, floor_kth_root, kth_root};
use crate::pell::solve_generalized;
use crate::poly::{IntPoly, RatPoly};
use crate::power_solver::{
    bounded_enumeration, divisor_finite_pair, residue_obstruction, search, sparsest, square_pair, Options, Outcome, Part, Simplified,
    SolutionSet, SquareAtom, TABLE_LIMIT,
};

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// Rewrites `f(u) = a x + b` as `t^d + D t = ã x + b̃` with `t mod q` in a
/// residue set.
pub fn depress(pred: &PredicateDecl, a: &BigInt, b: &BigInt) -> Result<PolyAtom, DepressError> {
    let d = pred.degree();
    if d != 2 && d != 3 {
        return Err(DepressError::Degree(d));
    }
    if a.is_zero() {
        return Err(DepressError::ZeroCoefficient);
    }
    // clear denominators: C_d u^d + ... + C_0 = L v with C_d > 0
    let den = pred.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut c: Vec<BigInt> = pred.coeffs.iter().rev().map(|x| (x * rat(den.clone())).to_integer()).collect();
    let mut l = den;
    if c[d].is_negative() {
        c.iter_mut().for_each(|x| *x = -&*x);
        l = -l;
    }
    let (q, r, lambda, mu, dd) = if d == 2 {
        let (c0, c1, c2) = (&c[0], &c[1], &c[2]);
        if c1.is_even() {
            let h: BigInt = c1 / 2;
            (c2.clone(), h.mod_floor(c2), c2 * &l, &h * &h - c2 * c0, BigInt::zero())
        } else {
            let q: BigInt = c2 * 2;
            (q.clone(), c1.mod_floor(&q), c2 * 4 * &l, c1 * c1 - c2 * c0 * 4, BigInt::zero())
        }
    } else {
        let (c0, c1, c2, c3) = (&c[0], &c[1], &c[2], &c[3]);
        let q: BigInt = c3 * 3;
        let lambda: BigInt = c3 * c3 * 27 * &l;
        let t0: BigInt = c0 * c3 * c3 * 27;
        let t1: BigInt = c1 * c2 * c3 * 9;
        let t2: BigInt = c2 * c2 * c2 * 2;
        let mu = t1 - t0 - t2;
        let e1: BigInt = c1 * c3 * 9;
        let e2: BigInt = c2 * c2 * 3;
        let dd = e1 - e2;
        (q.clone(), c2.mod_floor(&q), lambda, mu, dd)
    };
    // t = g t' when g divides the stride, the offset and the scaled data
    let mut best = BigInt::one();
    for g in divisors(&q.gcd(&r)).expect("nonzero").into_iter().rev() {
        let gd = num_traits::pow(g.clone(), d);
        if lambda.is_multiple_of(&gd) && mu.is_multiple_of(&gd) && dd.is_multiple_of(&(&g * &g)) {
            best = g;
            break;
        }
    }
    let g = best;
    let gd = num_traits::pow(g.clone(), d);
    let (q, r, lambda, mu, dd) = (&q / &g, &r / &g, &lambda / &gd, &mu / &gd, &dd / (&g * &g));
    let mut residues: BTreeSet<BigInt> = [r.clone()].into_iter().collect();
    if d == 2 {
        residues.insert((-&r).mod_floor(&q));
    }
    Ok(PolyAtom { positive: true, name: pred.name.clone(), degree: d as u32, d: dd, q, residues, a: &lambda * a, b: &lambda * b + mu })
}

/// How two similar predicates of the same degree interact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RedundancyData {
    /// Both predicates hold exactly when the second atom has a root in the
    /// given residue classes, or `z` is one of `extra`.
    Line { modulus: BigInt, residues: BTreeSet<BigInt>, extra: BTreeSet<BigInt> },
    /// Both hold only at the common zero (if integral).
    OnlyPoint(Option<BigInt>),
}

/// Rational `p/q` with `p^k / q^k = x`, if any.
fn rational_root(x: &BigRational, k: u32) -> Option<BigRational> {
    Some(BigRational::new(kth_root(x.numer(), k)?, kth_root(x.denom(), k)?))
}

/// Redundancy of similar depressed atoms of equal degree, by factoring
/// `t1^d + D1 t1 - λ (t2^d + D2 t2)` with `λ = a1/a2`.
pub fn poly_redundant(p1: &PolyAtom, p2: &PolyAtom) -> Option<RedundancyData> {
    if p1.degree != p2.degree || &p1.a * &p2.b != &p2.a * &p1.b {
        return None;
    }
    let lambda = BigRational::new(p1.a.clone(), p2.a.clone());
    let zero = (-&p1.b).is_multiple_of(&p1.a).then(|| -&p1.b / &p1.a);
    let mu = if p1.degree == 2 {
        match rational_root(&lambda, 2) {
            Some(m) => m,
            None => return Some(RedundancyData::OnlyPoint(zero)),
        }
    } else {
        match rational_root(&lambda, 3) {
            Some(m) if rat(p1.d.clone()) == &m * &m * rat(p2.d.clone()) => m,
            Some(_) => return None,
            None if p1.d.is_zero() && p2.d.is_zero() => return Some(RedundancyData::OnlyPoint(zero)),
            None => return None,
        }
    };
    // line t1 = ±(s/t) t2; quadratics have symmetric residue sets
    let (s, t) = (mu.numer().clone(), mu.denom().clone());
    let modulus = p2.q.lcm(&(&t * &p1.q));
    let mut residues = BTreeSet::new();
    let m = modulus.to_u64().filter(|&m| m <= TABLE_LIMIT)?;
    for rho in 0..m {
        let rho = BigInt::from(rho);
        if !p2.admits(&rho) || !rho.is_multiple_of(&t) {
            continue;
        }
        let t1 = &s * &rho / &t;
        if p1.admits(&t1) || (p1.degree == 2 && p1.admits(&-t1)) {
            residues.insert(rho);
        }
    }
    let mut extra = BTreeSet::new();
    if p1.degree == 3 && p1.d.is_negative() {
        extra = ellipse_points(p1, p2, &s, &t)?;
    }
    Some(RedundancyData::Line { modulus, residues, extra })
}

/// Values `z` from integer points of `t1^2 + μ t1 t2 + μ^2 t2^2 + D1 = 0`,
/// `μ = s/t`. In `X = t t1`, `Y = s t2`: `X^2 + XY + Y^2 = -t^2 D1`.
fn ellipse_points(p1: &PolyAtom, p2: &PolyAtom, s: &BigInt, t: &BigInt) -> Option<BTreeSet<BigInt>> {
    let k: BigInt = -(t * t * &p1.d);
    // X^2 + XY + Y^2 >= 3Y^2/4
    let ymax = floor_kth_root(&(&k * 4 / 3), 2) + 1;
    let t2max = &ymax / s.abs() + 1;
    if t2max > BigInt::from(10_000_000) {
        return None;
    }
    let mut out = BTreeSet::new();
    let mut t2 = -&t2max;
    while t2 <= t2max {
        let y = s * &t2;
        let disc: BigInt = &k * 4 - &y * &y * 3;
        if let Some(r) = (!disc.is_negative()).then(|| kth_root(&disc, 2)).flatten() {
            for sgn in [1, -1] {
                let x2: BigInt = -&y + &r * sgn;
                if x2.is_odd() {
                    continue;
                }
                let x: BigInt = x2 / 2;
                if !x.is_multiple_of(t) {
                    continue;
                }
                let t1 = &x / t;
                if p1.admits(&t1) && p2.admits(&t2) {
                    let v = p2.f_at(&t2) - &p2.b;
                    if v.is_multiple_of(&p2.a) {
                        out.insert(v / &p2.a);
                    }
                }
            }
        }
        t2 += 1;
    }
    Some(out)
}

/// Applies polynomial redundancy to similar pairs. Returns extra candidate
/// points (to be checked against the whole system) beside the outcome.
pub fn simplify_polys(sys: &mut ConstraintSystem) -> (Simplified, BTreeSet<BigInt>) {
    let mut extra = BTreeSet::new();
    // positive pairs
    'outer: loop {
        let n = sys.positives.len();
        for i in 0..n {
            for j in 0..n {
                let (Constraint::Poly(p1), Constraint::Poly(p2)) = (&sys.positives[i], &sys.positives[j]) else { continue };
                if i == j {
                    continue;
                }
                match poly_redundant(p1, p2) {
                    Some(RedundancyData::OnlyPoint(z)) => {
                        sys.log.push(format!("{p1} and {p2} meet only at their common zero"));
                        return (Simplified::Pin(z), extra);
                    }
                    Some(RedundancyData::Line { modulus, residues, extra: e }) => {
                        sys.log.push(format!("{p1} redundant w.r.t. {p2}: restricted to t mod {modulus}"));
                        let np = PolyAtom { q: modulus, residues, ..p2.clone() };
                        extra.extend(e);
                        sys.positives[j] = Constraint::Poly(np);
                        sys.positives.remove(i);
                        continue 'outer;
                    }
                    None => {}
                }
            }
        }
        break;
    }
    // negatives against positives
    let mut i = 0;
    while i < sys.negatives.len() {
        let Constraint::Poly(n) = sys.negatives[i].clone() else {
            i += 1;
            continue;
        };
        let npos = PolyAtom { positive: true, ..n.clone() };
        let mut handled = false;
        for j in 0..sys.positives.len() {
            let Constraint::Poly(p) = &sys.positives[j] else { continue };
            match poly_redundant(&npos, p) {
                Some(RedundancyData::OnlyPoint(_)) => {
                    sys.log.push(format!("{n} w.r.t. {p}: true away from the common zero; checked pointwise"));
                    handled = true;
                }
                Some(RedundancyData::Line { modulus, residues, extra: e }) if e.is_empty() && (p.degree == 2 || !p.d.is_negative()) => {
                    // unique root up to sign: complement the classes
                    let m = modulus.to_u64().expect("small");
                    let good: BTreeSet<BigInt> = (0..m).map(BigInt::from).filter(|r| p.admits(r) && !residues.contains(r)).collect();
                    sys.log.push(format!("{n} w.r.t. {p}: positive restricted to t mod {modulus}"));
                    let np = PolyAtom { q: modulus, residues: good, ..p.clone() };
                    sys.positives[j] = Constraint::Poly(np);
                    handled = true;
                }
                _ => {}
            }
            if handled {
                break;
            }
        }
        if handled {
            let c = sys.negatives.remove(i);
            sys.pointwise.push(c);
        } else {
            i += 1;
        }
    }
    (Simplified::Keep, extra)
}

/// Parametrization of a quadratic atom `A` and a cubic atom `B` whose curve
/// `a2 t1^2 = h(t2)`, `h = a1 f2 + a2 b1 - a1 b2`, has a rational double
/// root: `h = (α t + β)^2 (γ t + δ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveCaseData {
    pub alpha: BigInt,
    pub beta: BigInt,
    pub gamma: BigInt,
    pub delta: BigInt,
    /// `t2(v) = (v^2 - a2 δ) / (a2 γ)`.
    pub t2: RatPoly,
    /// `t1(v) = (α v^3 + a2 (βγ - αδ) v) / (a2^2 γ)`.
    pub t1: RatPoly,
    /// `z(v)`, degree 6.
    pub z: RatPoly,
    /// Admissible `v mod modulus`; `None` when too large to tabulate.
    pub classes: Option<(BigInt, BTreeSet<BigInt>)>,
    /// `z` at `α t2 + β = 0`, where `v` is undefined.
    pub extra: Option<BigInt>,
}

/// `a1 f2(t) + a2 b1 - a1 b2`.
pub fn curve_poly(qa: &PolyAtom, cb: &PolyAtom) -> IntPoly {
    cb.f().scale(&qa.a).add_const(&(&cb.a * &qa.b - &qa.a * &cb.b))
}

pub fn curve_case(qa: &PolyAtom, cb: &PolyAtom) -> Option<CurveCaseData> {
    let h = curve_poly(qa, cb);
    let hr = h.to_rat();
    let g = hr.gcd(&hr.derivative());
    let root = match g.degree() {
        0 => return None,
        1 => -g.coeff(0) / g.coeff(1),
        _ => -g.coeff(1) / (g.coeff(2) * rat(BigInt::from(2))),
    };
    let (alpha, beta) = (root.denom().clone(), -root.numer().clone());
    let lin = RatPoly::new(vec![rat(beta.clone()), rat(alpha.clone())]);
    let (quot, rem) = hr.div_rem(&lin.mul(&lin));
    if !rem.is_zero() || quot.degree() != 1 || !quot.coeff(0).is_integer() || !quot.coeff(1).is_integer() {
        return None;
    }
    let (gamma, delta) = (quot.coeff(1).to_integer(), quot.coeff(0).to_integer());
    let a2 = &cb.a;
    let inv = |x: BigInt| BigRational::new(BigInt::one(), x);
    let t2 = RatPoly::new(vec![rat(-(a2 * &delta)), BigRational::zero(), BigRational::one()]).scale(&inv(a2 * &gamma));
    let lin_c = a2 * (&beta * &gamma - &alpha * &delta);
    let t1 = RatPoly::new(vec![BigRational::zero(), rat(lin_c.clone()), BigRational::zero(), rat(alpha.clone())]).scale(&inv(a2 * a2 * &gamma));
    let z = t1.mul(&t1).sub(&RatPoly::constant(rat(qa.b.clone()))).scale(&inv(qa.a.clone()));
    // v classes: t2 integral and admissible, t1 integral and admissible, z integral
    let m2 = a2 * &gamma * &cb.q;
    let m1 = a2 * a2 * &gamma * qa.q.lcm(&qa.a);
    let modulus = m2.lcm(&m1);
    let classes = modulus.to_u64().filter(|&m| m <= TABLE_LIMIT).map(|m| {
        let mut set = BTreeSet::new();
        for v in 0..m {
            let v = BigInt::from(v);
            let n2: BigInt = (&v * &v - a2 * &delta).mod_floor(&m2);
            let d2 = a2 * &gamma;
            if !n2.is_multiple_of(&d2) || !cb.admits(&(&n2 / &d2)) {
                continue;
            }
            let n1: BigInt = (&alpha * &v * &v * &v + &lin_c * &v).mod_floor(&m1);
            let d1 = a2 * a2 * &gamma;
            if !n1.is_multiple_of(&d1) {
                continue;
            }
            let t1v = &n1 / &d1;
            if qa.admits(&t1v) && (&t1v * &t1v - &qa.b).is_multiple_of(&qa.a) {
                set.insert(v);
            }
        }
        (modulus.clone(), set)
    });
    let extra = (alpha.is_one() && cb.admits(&-&beta) && qa.admits(&BigInt::zero()) && (-&qa.b).is_multiple_of(&qa.a)).then(|| -&qa.b / &qa.a);
    Some(CurveCaseData { alpha, beta, gamma, delta, t2, t1, z, classes, extra })
}

fn images_of(data: &CurveCaseData) -> Part {
    let (modulus, residues) = data.classes.clone().unwrap_or_else(|| (BigInt::one(), [BigInt::zero()].into_iter().collect()));
    Part::Images { poly: data.z.clone(), modulus, residues }
}

fn poly_images(p: &PolyAtom) -> SolutionSet {
    let l = p.q.lcm(&p.a);
    let inv = BigRational::new(BigInt::one(), p.a.clone());
    let poly = p.f().to_rat().sub(&RatPoly::constant(rat(p.b.clone()))).scale(&inv);
    let case = format!("one atom: images of ({} - b)/a", p.f_label());
    match l.to_u64().filter(|&m| m <= TABLE_LIMIT) {
        Some(m) => {
            let residues: BTreeSet<BigInt> = (0..m).map(BigInt::from).filter(|t| p.admits(t) && (p.f_at(t) - &p.b).is_multiple_of(&p.a)).collect();
            if residues.is_empty() {
                return SolutionSet::empty("one atom: no admissible residue, empty");
            }
            SolutionSet { parts: vec![Part::Images { poly, modulus: l, residues }], complete: true, cases: vec![case] }
        }
        None => SolutionSet {
            parts: vec![Part::Images { poly, modulus: p.q.clone(), residues: p.residues.clone() }],
            complete: true,
            cases: vec![case],
        },
    }
}

/// Two quadratics and one cubic where both quadratic–cubic curves split:
/// `γ3 v1^2 - γ1 v3^2 = a2 (γ3 δ1 - γ1 δ3)`.
pub fn two_quadratics_one_cubic(q1: &PolyAtom, q3: &PolyAtom, cb: &PolyAtom) -> Option<SolutionSet> {
    let d1 = curve_case(q1, cb)?;
    let d3 = curve_case(q3, cb)?;
    let k = &cb.a * (&d3.gamma * &d1.delta - &d1.gamma * &d3.delta);
    if k.is_zero() {
        return None;
    }
    let n = &d1.gamma * &d3.gamma;
    let rhs = &d3.gamma * &k;
    let mut extra: BTreeSet<BigInt> = d1.extra.iter().chain(d3.extra.iter()).cloned().collect();
    let v1_ok = |v1: &BigInt| d1.classes.as_ref().is_none_or(|(m, r)| r.contains(&v1.mod_floor(m)));
    let v3_ok = |v3: &BigInt| d3.classes.as_ref().is_none_or(|(m, r)| r.contains(&v3.mod_floor(m)));
    if let Some(s) = kth_root(&n, 2) {
        // (W - s v3)(W + s v3) = γ3 K with W = γ3 v1
        for (d, e) in divisor_pairs(&rhs).expect("nonzero") {
            let sum: BigInt = &d + &e;
            let diff: BigInt = &e - &d;
            if sum.is_odd() || !diff.is_multiple_of(&(&s * 2u32)) {
                continue;
            }
            let (w, v3) = (sum / 2u32, diff / (&s * 2u32));
            if !w.is_multiple_of(&d3.gamma) {
                continue;
            }
            let v1 = &w / &d3.gamma;
            if v1_ok(&v1) && v3_ok(&v3) {
                if let Some(z) = d1.z.eval_int(&v1).is_integer().then(|| d1.z.eval_int(&v1).to_integer()) {
                    extra.insert(z);
                }
            }
        }
        return Some(SolutionSet::points(extra, true, "two quadratics and a cubic: split curves, divisor enumeration"));
    }
    let sols = solve_generalized(&n, &rhs).ok()?;
    let map = d1.z.compose(&RatPoly::new(vec![BigRational::zero(), BigRational::new(BigInt::one(), d3.gamma.clone())]));
    let mut parts = Vec::new();
    for class in &sols.classes {
        let (wseq, vseq) = (class.w_seq(), class.z_seq());
        let mut indices = IndexSet::all();
        let mut exact = true;
        match &d1.classes {
            Some((m, r)) if (m * &d3.gamma).to_u64().is_some_and(|x| x <= TABLE_LIMIT) => {
                let g = &d3.gamma;
                indices = indices.intersect(&wseq.filter_by(&(m * g), |w| w.is_multiple_of(g) && r.contains(&(w / g).mod_floor(m))));
            }
            _ => {
                exact = false;
                let g = &d3.gamma;
                if g.to_u64().is_some_and(|x| x <= TABLE_LIMIT) {
                    indices = indices.intersect(&wseq.filter_by(g, |w| w.is_zero()));
                }
            }
        }
        match &d3.classes {
            Some((m, r)) => indices = indices.intersect(&vseq.filter_by(m, |v| r.contains(v))),
            None => exact = false,
        }
        parts.push(Part::Lrbs { seq: wseq, map: map.clone(), indices, exact });
    }
    parts.push(Part::Points(extra));
    let case = format!("two quadratics and a cubic: Pell classes of W^2 - {n} v^2 = {rhs}");
    Some(SolutionSet { parts, complete: true, cases: vec![case] })
}

fn quad_cubic(qa: &PolyAtom, cb: &PolyAtom) -> Option<SolutionSet> {
    let data = curve_case(qa, cb)?;
    let mut parts = vec![images_of(&data)];
    parts.push(Part::Points(data.extra.iter().cloned().collect()));
    let case = format!("quadratic and cubic: split curve, z as a degree-6 polynomial in v (alpha={}, beta={}, gamma={}, delta={})", data.alpha, data.beta, data.gamma, data.delta);
    Some(SolutionSet { parts, complete: true, cases: vec![case] })
}

/// Solution set of positive atoms (poly atoms, possibly with powers of
/// exponent at least 4), all with `a > 0` and pairwise non-redundant.
pub fn solve_positive_poly(positives: &[Constraint], lower: &BigInt, opts: &Options) -> SolutionSet {
    let l = positives.len();
    if l == 0 {
        return SolutionSet::all("no positive atoms: all integers");
    }
    if let Some(m) = residue_obstruction(positives) {
        return SolutionSet::empty(&format!("local obstruction modulo {m}"));
    }
    let polys: Vec<&PolyAtom> = positives
        .iter()
        .filter_map(|c| match c {
            Constraint::Poly(p) => Some(p),
            Constraint::Power(_) => None,
        })
        .collect();
    let all_poly = polys.len() == l;
    if l == 1 {
        return match &positives[0] {
            Constraint::Poly(p) => poly_images(p),
            Constraint::Power(p) => crate::power_solver::solve_positive(core::slice::from_ref(p), lower, opts),
        };
    }
    if let Some(s) = divisor_finite_pair(positives) {
        return s;
    }
    let rest = |skip: &[usize]| -> Vec<Constraint> { positives.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, c)| c.clone()).collect() };
    if all_poly && l == 2 {
        let (p1, p2) = (polys[0], polys[1]);
        match (p1.is_quadratic(), p2.is_quadratic()) {
            (true, true) => return square_pair(&SquareAtom::from_poly(p1), &SquareAtom::from_poly(p2)),
            (true, false) | (false, true) => {
                let (qa, cb) = if p1.is_quadratic() { (p1, p2) } else { (p2, p1) };
                if let Some(s) = quad_cubic(qa, cb) {
                    return s;
                }
                let i = if p1.is_quadratic() { 1 } else { 0 };
                return bounded_enumeration(&positives[i], &rest(&[i]), lower, opts, "quadratic and cubic, squarefree curve");
            }
            (false, false) => {
                return bounded_enumeration(&positives[1], &rest(&[1]), lower, opts, "two cubics, plane cubic curve");
            }
        }
    }
    if all_poly && l == 3 {
        let quads: Vec<usize> = (0..3).filter(|&i| polys[i].is_quadratic()).collect();
        if quads.len() == 2 {
            let c = (0..3).find(|i| !quads.contains(i)).expect("one cubic");
            if let Some(s) = two_quadratics_one_cubic(polys[quads[0]], polys[quads[1]], polys[c]) {
                return s;
            }
        }
    }
    let i = sparsest(positives);
    bounded_enumeration(&positives[i], &rest(&[i]), lower, opts, "three or more atoms")
}

/// Indices of the square-pair set `S` (one part per Pell class) on which a
/// negated cubic atom certainly holds, subtracted from `S`.
///
/// For each Pell class of the two-quadratics-one-cubic set, its orbit is
/// mapped into `S`; when the image indices form an arithmetic progression
/// `s m + c`, those indices are discarded.
pub fn subtract_discarded(s: &SolutionSet, qa: &PolyAtom, qc: &PolyAtom, neg: &PolyAtom) -> Option<(SolutionSet, Vec<String>)> {
    let cubic = PolyAtom { positive: true, ..neg.clone() };
    let d1 = curve_case(qa, &cubic)?;
    let d3 = curve_case(qc, &cubic)?;
    let sq = square_pair(&SquareAtom::from_poly(qa), &SquareAtom::from_poly(qc));
    let n = &qa.a * &qc.a;
    let rhs = &qc.a * (&qc.a * &qa.b - &qa.a * &qc.b);
    let ssol = solve_generalized(&n, &rhs).ok()?;
    if sq.parts.len() != ssol.classes.len() || s.parts.len() != ssol.classes.len() {
        return None;
    }
    let prime = two_quadratics_one_cubic(qa, qc, &cubic)?;
    let k = &cubic.a * (&d3.gamma * &d1.delta - &d1.gamma * &d3.delta);
    let pn = &d1.gamma * &d3.gamma;
    let psol = solve_generalized(&pn, &(&d3.gamma * &k)).ok()?;
    let mut log = Vec::new();
    let mut discard: Vec<IndexSet> = vec![IndexSet::empty(); ssol.classes.len()];
    for (ci, class) in psol.classes.iter().enumerate() {
        let Some(Part::Lrbs { indices: iprime, exact: true, .. }) = prime.parts.get(ci) else { continue };
        // Φ: (W, v3) -> (w, t_C) = (a_C t_A(v1), t_C(v3))
        let phi = |m: i64| -> Option<(usize, i64)> {
            let (w, v3) = class.at(m);
            if !w.is_multiple_of(&d3.gamma) {
                return None;
            }
            let v1 = &w / &d3.gamma;
            let ta = d1.t1.eval_int(&v1);
            let tc = d3.t1.eval_int(&v3);
            if !ta.is_integer() || !tc.is_integer() {
                return None;
            }
            let ws = &qc.a * ta.to_integer();
            ssol.locate(&ws, &tc.to_integer())
        };
        // members of I' sit in residues mod its period; test each offset class
        let pm = iprime.modulus();
        for &res in iprime.residues() {
            let m0 = res as i64;
            let (Some((c0, k0)), Some((c1, k1))) = (phi(m0), phi(m0 + pm as i64)) else { continue };
            if c0 != c1 {
                continue;
            }
            let step = k1 - k0;
            if step == 0 {
                continue;
            }
            // each coordinate is a sum of at most nine exponentials in j
            // (cubic in the orbit unit, two terms on the S side), so nine
            // consecutive agreements force the identity for every j
            let verified = (2..=8).all(|j| phi(m0 + j * pm as i64) == Some((c0, k0 + j * step)));
            if !verified {
                continue;
            }
            let prog = IndexSet::progression(step.unsigned_abs(), k0);
            log.push(format!("discarded S class {c0} indices {k0} mod {}", step.unsigned_abs()));
            discard[c0] = discard[c0].union(&prog);
        }
    }
    let mut out = s.clone();
    for (i, part) in out.parts.iter_mut().enumerate() {
        if let Part::Lrbs { indices, .. } = part {
            *indices = indices.minus(&discard[i]);
        }
    }
    out.cases.push(format!("negated cubic {neg}: Pell indices subtracted"));
    Some((out, log))
}

/// Decides a normalized system containing poly atoms.
pub fn decide_poly(sys: &ConstraintSystem, opts: &Options) -> Outcome {
    let mut set = solve_positive_poly(&sys.positives, &sys.lower, opts);
    let quads: Vec<&PolyAtom> = sys
        .positives
        .iter()
        .filter_map(|c| match c {
            Constraint::Poly(p) if p.is_quadratic() => Some(p),
            _ => None,
        })
        .collect();
    if sys.positives.len() == 2 && quads.len() == 2 && !set.is_finite() {
        for n in &sys.negatives {
            let Constraint::Poly(neg) = n else { continue };
            if neg.degree != 3 {
                continue;
            }
            if let Some((s2, log)) = subtract_discarded(&set, quads[0], quads[1], neg) {
                set = s2;
                set.cases.extend(log);
            }
        }
        if set.is_empty() {
            return Outcome { witness: None, certified: true, note: "every Pell index discarded".into(), cases: set.cases };
        }
    }
    search(&set, sys, opts)
}

trait Label {
    fn f_label(&self) -> String;
}

impl Label for PolyAtom {
    fn f_label(&self) -> String {
        if self.d.is_zero() {
            format!("t^{}", self.degree)
        } else {
            format!("t^{}{:+}t", self.degree, self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use std::vec;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn decl(coeffs: &[(i64, i64)]) -> PredicateDecl {
        PredicateDecl::new("P", coeffs.iter().map(|&(n, d)| BigRational::new(bi(n), bi(d))).collect()).unwrap()
    }

    fn member(p: &PredicateDecl, v: &BigInt) -> bool {
        (-400..=400).any(|u| p.eval(&bi(u)) == rat(v.clone()))
    }

    #[test]
    fn depress_examples() {
        let t = depress(&decl(&[(1, 2), (1, 2), (0, 1)]), &bi(1), &bi(0)).unwrap();
        assert_eq!((t.degree, t.q.clone(), t.a.clone(), t.b.clone()), (2, bi(2), bi(8), bi(1)));
        assert_eq!(t.residues, [bi(1)].into_iter().collect());
        let c = depress(&decl(&[(1, 1), (3, 1), (3, 1), (1, 1)]), &bi(1), &bi(0)).unwrap();
        assert_eq!((c.degree, c.d.clone(), c.q.clone()), (3, bi(0), bi(1)));
    }

    #[test]
    fn depress_pointwise() {
        let preds = [decl(&[(1, 2), (1, 2), (0, 1)]), decl(&[(-3, 1), (5, 1), (1, 1)]), decl(&[(1, 6), (1, 2), (1, 3), (0, 1)]), decl(&[(-2, 1), (1, 1), (0, 1), (7, 1)])];
        for p in &preds {
            for (a, b) in [(1, 0), (3, -2), (-2, 5)] {
                let at = depress(p, &bi(a), &bi(b)).unwrap();
                for x in -50..=50 {
                    let v = bi(a * x + b);
                    assert_eq!(at.predicate_at(&bi(x)), member(p, &v), "{p:?} a={a} b={b} x={x}");
                }
            }
        }
    }

    #[test]
    fn redundancy_of_quadratics() {
        let sq = |a: i64| PolyAtom::from_power(&crate::atoms::PowerAtom::new(true, 2, bi(a), bi(0)));
        assert!(matches!(poly_redundant(&sq(1), &sq(4)), Some(RedundancyData::Line { .. })));
        assert_eq!(poly_redundant(&sq(1), &sq(2)), Some(RedundancyData::OnlyPoint(Some(bi(0)))));
    }

    #[test]
    fn triangular_images() {
        let f = parse("(declare-pred T (coeffs 1/2 1/2 0)) (exists x (pred T x))").unwrap();
        let t = depress(f.decl("T").unwrap(), &bi(1), &bi(0)).unwrap();
        let s = solve_positive_poly(&[Constraint::Poly(t)], &bi(-1), &Options::default());
        let mut work = 0;
        let got: Vec<BigInt> = s.members_between(&bi(0), &bi(30), &mut work, u64::MAX).into_iter().collect();
        assert_eq!(got, [0, 1, 3, 6, 10, 15, 21, 28].map(bi).to_vec());
    }

    #[test]
    fn square_and_cube_split() {
        let sq = PolyAtom::from_power(&crate::atoms::PowerAtom::new(true, 2, bi(1), bi(0)));
        let cu = PolyAtom::from_power(&crate::atoms::PowerAtom::new(true, 3, bi(1), bi(0)));
        let d = curve_case(&sq, &cu).unwrap();
        let h = curve_poly(&sq, &cu).to_rat();
        let lin = RatPoly::new(vec![rat(d.beta.clone()), rat(d.alpha.clone())]);
        let rebuilt = lin.mul(&lin).mul(&RatPoly::new(vec![rat(d.delta.clone()), rat(d.gamma.clone())]));
        assert_eq!(rebuilt, h);
        let s = solve_positive_poly(&[Constraint::Poly(sq), Constraint::Poly(cu)], &bi(0), &Options::default());
        let mut work = 0;
        let got = s.members_between(&bi(1), &bi(1_000_000), &mut work, u64::MAX);
        assert_eq!(got, (1..=10).map(|v: i64| bi(v.pow(6))).collect());
    }
}
