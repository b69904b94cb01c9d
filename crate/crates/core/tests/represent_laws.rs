use std::collections::{BTreeMap, BTreeSet};

use formdiv::arith;
use formdiv::forms::{self, FormSpec, Sign};
use formdiv::represent::{self, MultiplierSearch, TwoCoefForm};

const BOUND: u64 = 100_000;

/// Primes up to `BOUND` hit by `a² + n·b²` with coprime `a, b`, by enumeration.
fn enumerated_primes(n: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut b = 0u64;
    while n * b * b <= BOUND {
        let mut a = 0u64;
        while a * a + n * b * b <= BOUND {
            let v = a * a + n * b * b;
            if arith::gcd_u64(a, b) == 1 && arith::is_prime(v) {
                out.insert(v);
            }
            a += 1;
        }
        b += 1;
    }
    out
}

#[test]
fn principal_forms_represent_exactly_the_admissible_primes() {
    for n in [1u64, 2, 3] {
        let f = FormSpec::plus(n).unwrap();
        let s = forms::divisor_classes(&f);
        let ff = TwoCoefForm::principal(&f);
        let hit = enumerated_primes(n);
        for p in arith::primes_up_to(BOUND) {
            if (4 * n) % p == 0 {
                continue;
            }
            let w = represent::represent(p, &ff, 10_000);
            assert_eq!(w.is_some(), hit.contains(&p), "n={n} p={p}");
            assert_eq!(w.is_some(), s.contains(p as i64), "n={n} p={p}");
            if let Some(w) = w {
                assert!(w.holds());
            }
        }
    }
}

#[test]
fn minus_witnesses_hold() {
    let f = TwoCoefForm::new(1, 2, Sign::Minus).unwrap();
    let s = forms::divisor_classes(&FormSpec::minus(2).unwrap());
    for p in arith::primes_up_to(5_000).into_iter().skip(1) {
        let w = represent::represent(p, &f, 10_000);
        if s.contains(p as i64) {
            assert!(w.expect("admissible prime").holds(), "p={p}");
        } else {
            assert!(w.is_none(), "p={p}");
        }
    }
}

#[test]
fn five_uses_one_and_two() {
    let f = FormSpec::plus(5).unwrap();
    let s = represent::class_multiplier_survey(&f, 20_000, &MultiplierSearch::UpTo(20)).unwrap();
    let want: BTreeMap<u64, Vec<u64>> =
        [(1, vec![1]), (3, vec![2]), (7, vec![2]), (9, vec![1])].into();
    assert_eq!(s.map(), want);
    assert!(s.classes.values().all(|c| c.unrepresented.is_empty()));
}

#[test]
fn multiplier_witnesses_are_genuine() {
    for n in [5u64, 6, 10, 11, 13, 14, 17] {
        let f = FormSpec::plus(n).unwrap();
        let ff = TwoCoefForm::principal(&f);
        let members = forms::divisor_classes(&f);
        for p in arith::primes_up_to(3_000) {
            if (4 * n) % p == 0 || !members.contains(p as i64) {
                continue;
            }
            let w = represent::smallest_multiplier(p, &ff, 4 * n)
                .unwrap()
                .expect("some k");
            assert!(w.holds());
            let v = w.multiplier * p;
            assert_eq!(v as u128, (w.a * w.a + n * w.b * w.b) as u128);
            for k in 1..w.multiplier {
                assert!(represent::represent_multiple(p, k, &ff, 10_000).is_none());
            }
        }
    }
}

#[test]
fn multiplier_rejects_bad_primes() {
    let ff = TwoCoefForm::new(1, 5, Sign::Plus).unwrap();
    assert!(represent::smallest_multiplier(5, &ff, 20).is_err());
    assert!(represent::smallest_multiplier(9, &ff, 20).is_err());
    assert!(represent::smallest_multiplier(2, &ff, 20).is_err());
}

fn forms_of(labels: &[&str]) -> Vec<TwoCoefForm> {
    labels
        .iter()
        .map(|l| TwoCoefForm::from_label(l).unwrap())
        .collect()
}

#[test]
fn one_class_per_genus_splits_are_exclusive() {
    let cases: [(u64, &[&str]); 4] = [
        (6, &["aa+6bb", "2aa+3bb"]),
        (10, &["aa+10bb", "2aa+5bb"]),
        (15, &["aa+15bb", "3aa+5bb"]),
        (30, &["aa+30bb", "2aa+15bb", "3aa+10bb", "5aa+6bb"]),
    ];
    for (n, labels) in cases {
        let s = represent::split_survey(n, &forms_of(labels), 20_000, 1).unwrap();
        assert!(s.all_exclusive(), "n={n}: {:?}", s.classes);
    }
}

#[test]
fn larger_class_groups_are_not_exclusive() {
    let s = represent::split_survey(14, &forms_of(&["aa+14bb", "2aa+7bb"]), 20_000, 1).unwrap();
    assert!(!s.all_exclusive());
    assert!(s
        .classes
        .values()
        .any(|c| c.mixed || !c.uncovered.is_empty()));
    let s = represent::split_survey(21, &forms_of(&["aa+21bb", "3aa+7bb"]), 20_000, 1).unwrap();
    assert!(!s.all_exclusive());
    assert!(s.classes.values().any(|c| !c.uncovered.is_empty()));
}

#[test]
fn companion_divisors_are_admissible() {
    for label in [
        "2aa+3bb", "2aa+5bb", "3aa+5bb", "2aa+7bb", "3aa+7bb", "5aa+6bb", "2aa-3bb", "3aa-bb",
    ] {
        let f = TwoCoefForm::from_label(label).unwrap();
        let r = represent::inclusion_check(&f, 60).unwrap();
        assert!(r.holds, "{label}: {:?}", r.outside);
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn found_witnesses_are_coprime_and_exact(m in 1u64..200_000, n in 1u64..60) {
            let ff = TwoCoefForm::principal(&FormSpec::plus(n).unwrap());
            if let Some(w) = represent::represent(m, &ff, 10_000) {
                prop_assert!(w.holds());
                prop_assert_eq!(arith::gcd_u64(w.a, w.b), 1);
            }
        }

        #[test]
        fn represented_primes_are_admissible(idx in 0usize..2000, n in 1u64..60) {
            let p = arith::primes_up_to(20_000)[idx];
            let f = FormSpec::plus(n).unwrap();
            if (4 * n) % p != 0 && represent::represent(p, &TwoCoefForm::principal(&f), 10_000).is_some() {
                prop_assert!(forms::divisor_classes(&f).contains(p as i64));
            }
        }
    }
}
