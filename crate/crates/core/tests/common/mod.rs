//! Random sentence generator shared by the property suites.
#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;

use monpres_core::formula::{ConstraintSystem, Disjunct};

pub const DECLS: &str = "(declare-pred T (coeffs 1/2 1/2 0))
(declare-pred S (coeffs 1 0 0))
(declare-pred C (coeffs 1 0 0 0))
(declare-pred P (coeffs 1 0 2 0))
(declare-pred Q (coeffs 2 3 1))
(declare-pred L (coeffs 3 1))
(declare-pred K (coeffs 5))
";

pub fn term(a: i64, b: i64) -> String {
    format!("(+ (* {a} x) {b})")
}

pub fn atom(with_preds: bool) -> BoxedStrategy<String> {
    let lin = (-4i64..=4, -20i64..=20);
    let cmp = (prop_oneof![Just("<"), Just(">"), Just("=")], lin.clone(), -20i64..=20)
        .prop_map(|(op, (a, b), c)| format!("({op} {} {c})", term(a, b)));
    let modulo = (lin.clone(), 2i64..=6, 0i64..6).prop_map(|((a, b), m, r)| format!("(mod {} {m} {})", term(a, b), r % m));
    let pow = (2u32..=4, lin.clone()).prop_map(|(k, (a, b))| format!("(pow {k} {})", term(a, b)));
    if with_preds {
        let pred = (prop_oneof![Just("T"), Just("S"), Just("C"), Just("P"), Just("Q"), Just("L"), Just("K")], lin)
            .prop_map(|(p, (a, b))| format!("(pred {p} {})", term(a, b)));
        prop_oneof![2 => cmp, 1 => modulo, 2 => pow, 2 => pred].boxed()
    } else {
        prop_oneof![2 => cmp, 1 => modulo, 3 => pow].boxed()
    }
}

pub fn body(with_preds: bool) -> BoxedStrategy<String> {
    atom(with_preds)
        .prop_recursive(2, 8, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..=3).prop_map(|v| format!("(and {})", v.join(" "))),
                prop::collection::vec(inner.clone(), 1..=3).prop_map(|v| format!("(or {})", v.join(" "))),
                inner.prop_map(|b| format!("(not {b})")),
            ]
        })
        .boxed()
}

pub fn sentence(with_preds: bool) -> BoxedStrategy<String> {
    (any::<bool>(), body(with_preds))
        .prop_map(move |(ex, b)| {
            let q = if ex { "exists" } else { "forall" };
            let decls = if with_preds { DECLS } else { "" };
            format!("{decls}({q} x {b})")
        })
        .boxed()
}

/// Does the system contain the original point `x`?
pub fn covers(sys: &ConstraintSystem, x: &BigInt) -> bool {
    let d = x - &sys.residue;
    if &d % &sys.modulus != BigInt::from(0) {
        return false;
    }
    let y = d / &sys.modulus;
    let z = if sys.sign_flipped { -y } else { y };
    sys.check(&z)
}

pub fn systems(ds: &[Disjunct]) -> impl Iterator<Item = &ConstraintSystem> {
    ds.iter().filter_map(|d| match d {
        Disjunct::System(s) => Some(s),
        Disjunct::Resolved(_) => None,
    })
}
