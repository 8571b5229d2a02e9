mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use monpres_core::atoms::Constraint;
use monpres_core::formula::{normalize, parse, Disjunct};
use monpres_core::oracle::Evaluator;

#[test]
fn congruences_coalesce() {
    let f = parse("(exists x (and (mod x 4 1) (mod x 6 5)))").unwrap();
    let ds = normalize(&f).unwrap();
    let sys: Vec<_> = common::systems(&ds).collect();
    assert!(!sys.is_empty());
    for s in &sys {
        assert_eq!(s.modulus, BigInt::from(12));
        assert_eq!(s.residue, BigInt::from(5));
        assert!(s.positives.is_empty() && s.negatives.is_empty());
    }
    // residue scan 0..11
    let hits: Vec<i64> = (0..12).filter(|x| x % 4 == 1 && x % 6 == 5).collect();
    assert_eq!(hits, [5]);
}

#[test]
fn bounded_interval_is_inspected() {
    let f = parse("(exists x (and (> x 0) (< x 5) (pow 2 x)))").unwrap();
    let ds = normalize(&f).unwrap();
    assert_eq!(ds.len(), 1);
    let Disjunct::Resolved(r) = &ds[0] else { panic!("expected a resolved disjunct") };
    assert!(r.certified);
    // squares in 1..4 are 1 and 4; the smallest comes first
    let squares: Vec<i64> = (1..5).filter(|x| (1..=2).any(|s| s * s == *x)).collect();
    assert_eq!(squares, [1, 4]);
    assert_eq!(r.witness, Some(BigInt::from(squares[0])));
}

#[test]
fn forall_negates() {
    let f = parse("(forall x (not (pow 2 x)))").unwrap();
    let g = parse("(exists x (pow 2 x))").unwrap();
    assert_eq!(normalize(&f).unwrap(), normalize(&g).unwrap());
}

#[test]
fn opposite_atoms_contradict() {
    let f = parse("(exists x (and (> x 3) (pow 2 x) (not (pow 2 x))))").unwrap();
    let ds = normalize(&f).unwrap();
    assert!(ds.iter().all(|d| matches!(d, Disjunct::Resolved(r) if r.witness.is_none() && r.certified)));
}

fn similar_pair(a: &Constraint, b: &Constraint) -> bool {
    match (a, b) {
        (Constraint::Power(p), Constraint::Power(q)) => &p.a * &q.b == &q.a * &p.b,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_parse_round_trip(text in common::sentence(true)) {
        let f = parse(&text).unwrap();
        let again = parse(&f.to_string()).unwrap();
        prop_assert_eq!(f, again);
    }

    #[test]
    fn normalization_preserves_meaning(text in common::sentence(true)) {
        let f = parse(&text).unwrap();
        let ds = normalize(&f).unwrap();
        let ev = Evaluator::new(&f);
        let resolved_hit = ds.iter().any(|d| matches!(d, Disjunct::Resolved(r) if r.witness.is_some() || !r.certified));
        for d in &ds {
            if let Disjunct::Resolved(r) = d {
                if let Some(w) = &r.witness {
                    prop_assert!(ev.matrix(w), "resolved witness {} fails", w);
                }
            }
        }
        for s in common::systems(&ds) {
            for (i, p) in s.positives.iter().enumerate() {
                for q in &s.positives[i + 1..] {
                    prop_assert!(!similar_pair(p, q), "similar positives survive: {} {}", p, q);
                }
            }
        }
        for x in -200i64..=200 {
            let x = BigInt::from(x);
            let truth = ev.matrix(&x);
            let covered = common::systems(&ds).any(|s| common::covers(s, &x));
            if covered {
                prop_assert!(truth, "x={} covered but false", x);
            } else if truth {
                prop_assert!(resolved_hit, "x={} true but no disjunct accounts for it", x);
            }
        }
    }
}
