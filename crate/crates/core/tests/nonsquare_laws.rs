use formdiv::arith;
use formdiv::forms::{self, FormSpec};
use formdiv::nonsquare::{self, NonsquareFamily, Variant};

/// Direct evaluation of a two-variable family over `1..=bound`, kept apart
/// from the library scanner.
fn brute_squares(f: &NonsquareFamily, bound: i64) -> usize {
    let four_n = 4 * f.n as i64;
    let a = f.coefficient;
    let mut hits = 0;
    for m in 1..=bound {
        for n in 1..=bound {
            if arith::gcd(m, a) != 1 || arith::gcd(n, a) != 1 {
                continue;
            }
            let values: Vec<i64> = match f.variant {
                Variant::Sum => vec![four_n * m * n + a * (m + n)],
                Variant::Difference if m != n => f
                    .signs
                    .iter()
                    .map(|&s| four_n * m * n + s as i64 * a * (m - n))
                    .collect(),
                _ => vec![],
            };
            hits += values
                .into_iter()
                .filter(|&v| v >= 0 && arith::is_square(v))
                .count();
        }
    }
    hits
}

#[test]
fn generated_families_are_sound() {
    for n in 1..=30u64 {
        for form in [FormSpec::plus(n).unwrap(), FormSpec::minus(n).unwrap()] {
            for fam in nonsquare::generate_families(&form).unwrap() {
                fam.validate().unwrap();
                assert_eq!(brute_squares(&fam, 40), 0, "{fam}");
                assert!(
                    nonsquare::scan_family(&fam, 40).unwrap().is_clean(),
                    "{fam}"
                );
            }
        }
    }
}

#[test]
fn generated_families_for_small_n() {
    let labels = |form: FormSpec| -> Vec<String> {
        nonsquare::generate_families(&form)
            .unwrap()
            .iter()
            .map(NonsquareFamily::label)
            .collect()
    };
    assert_eq!(
        labels(FormSpec::plus(1).unwrap()),
        ["4mn-(m+n)", "4mn+3(m+n)"]
    );
    assert_eq!(
        labels(FormSpec::plus(2).unwrap()),
        ["8mn-(m+n)", "8mn+7(m+n)", "8mn-3(m+n)", "8mn+5(m+n)"]
    );
    assert_eq!(
        labels(FormSpec::minus(2).unwrap()),
        ["8mn±3(m-n)", "8mn±5(m-n)"]
    );
    assert_eq!(
        labels(FormSpec::minus(3).unwrap()),
        ["12mn±5(m-n)", "12mn±7(m-n)"]
    );
}

#[test]
fn family_count_matches_forbidden_classes() {
    for n in 1..=60u64 {
        let p = FormSpec::plus(n).unwrap();
        let m = FormSpec::minus(n).unwrap();
        assert_eq!(
            nonsquare::generate_families(&p).unwrap().len(),
            2 * forms::forbidden_classes(&p).len()
        );
        assert_eq!(
            nonsquare::generate_families(&m).unwrap().len(),
            forms::forbidden_classes(&m).len()
        );
    }
}

#[test]
fn small_families_clean_at_default_bound() {
    for n in 1..=7u64 {
        for form in [FormSpec::plus(n).unwrap(), FormSpec::minus(n).unwrap()] {
            for fam in nonsquare::generate_families(&form).unwrap() {
                let r = nonsquare::scan_family(&fam, nonsquare::DEFAULT_SCAN_BOUND).unwrap();
                assert!(r.is_clean(), "{fam}: {:?}", r.counterexamples.first());
            }
        }
    }
}

#[test]
fn shifted_families_stay_clean() {
    for n in 1..=5u64 {
        for fam in nonsquare::generate_families(&FormSpec::plus(n).unwrap()).unwrap() {
            for p in 1..=3 {
                for g in fam.shifted(p).unwrap() {
                    g.validate().unwrap();
                    assert!(nonsquare::scan_family(&g, 200).unwrap().is_clean(), "{g}");
                }
            }
        }
    }
}

#[test]
fn admissible_coefficients_produce_squares() {
    // An admissible A is a control: some cell must be a square.
    let f = NonsquareFamily::sum(1, 1).unwrap();
    assert!(f.validate().is_err());
    assert!(!nonsquare::scan_family(&f, 60).unwrap().is_clean());
    assert!(brute_squares(&f, 60) > 0);
}

#[test]
fn corollaries_clean() {
    for v in [
        Variant::Abc4,
        Variant::Abc2Minus,
        Variant::Abc2Mixed,
        Variant::Abc2Pm,
    ] {
        let r = nonsquare::scan_corollary(v, nonsquare::DEFAULT_COROLLARY_BOUND).unwrap();
        assert!(r.is_clean(), "{v:?}: {:?}", r.counterexamples.first());
        assert!(r.cells_scanned > 0);
    }
}
