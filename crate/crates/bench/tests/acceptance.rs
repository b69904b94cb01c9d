//! One line per acceptance criterion. Exits nonzero if any criterion is red.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use formdiv::arith;
use formdiv::catalog::{self, parse_item, CorrectedPart};
use formdiv::forms::{self, FormSpec, Sign};
use formdiv::nonsquare::{self, NonsquareFamily, Variant};
use formdiv::represent::{self, MultiplierSearch, TwoCoefForm};
use formdiv::{load_catalog, verify_all, AllReport, Payload, Status, TheoremRecord, VerifyOptions};

/// Classes paired with the multiplier data claimed for them.
type Groups<'a, K> = &'a [(&'a [u64], K)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn both(n: u64) -> [FormSpec; 2] {
    [FormSpec::plus(n).unwrap(), FormSpec::minus(n).unwrap()]
}

fn sign_name(f: &FormSpec) -> String {
    format!("{} n={}", f.sign(), f.n())
}

fn criterion_1(records: &[TheoremRecord]) -> (Outcome, AllReport) {
    let start = Instant::now();
    let all = verify_all(records, &VerifyOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let theorems = (1..=59)
        .filter(|i| records.iter().any(|r| r.id == format!("Th{i}")))
        .count();
    let pass = all.summary.failed == 0 && theorems == 59 && elapsed < Duration::from_secs(60);
    let detail = format!(
        "{} records ({theorems} of 59 theorems), {} verified, {} with errata, {} failed, {:.2} s (limit 60 s)",
        all.summary.total,
        all.summary.verified,
        all.summary.verified_with_errata,
        all.summary.failed,
        elapsed.as_secs_f64()
    );
    (outcome(pass, detail), all)
}

fn criterion_2(all: &AllReport) -> Outcome {
    let wanted = [
        ("Th10", "2m+1", "20m+1"),
        ("Th19", "3", "13"),
        ("Th22", "8m+31", "68m+31"),
        ("Th34", "25m+5", "56m+5"),
        ("Th51", "3", "5"),
        ("Scholion3", "28mn±8(m-n)", "28mn±13(m-n)"),
    ];
    let mut missing = Vec::new();
    for (id, printed, computed) in wanted {
        let found = all.errata.iter().any(|e| {
            e.theorem_id == id
                && e.status == Status::VerifiedWithErrata
                && e.printed.split(", ").any(|s| s == printed)
                && e.computed.split(", ").any(|s| s == computed)
        });
        if !found {
            missing.push(id);
        }
    }
    let pass = !all.errata.is_empty() && missing.is_empty();
    outcome(
        pass,
        format!("{} errata entries, missing {:?}", all.errata.len(), missing),
    )
}

fn totient_by_count(m: u64) -> u64 {
    (1..=m).filter(|&r| arith::gcd_u64(r, m) == 1).count() as u64
}

fn criterion_3() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in 1..=105u64 {
        if !arith::is_squarefree(n).unwrap() {
            continue;
        }
        for f in both(n) {
            if f.is_degenerate() {
                continue;
            }
            checked += 1;
            let want = totient_by_count(4 * n) / 2;
            let got = forms::divisor_classes(&f).len() as u64;
            if got != want || forms::note6_count(n).unwrap() != want {
                bad.push(sign_name(&f));
            }
        }
    }
    let n105: Vec<usize> = both(105)
        .iter()
        .map(|f| forms::divisor_classes(f).len())
        .collect();
    let pass = bad.is_empty() && n105 == [48, 48];
    outcome(
        pass,
        format!("{checked} forms checked, mismatches {bad:?}, |S| for n=105 = {n105:?}"),
    )
}

fn criterion_4() -> Outcome {
    let mut bad = Vec::new();
    let mut forms_checked = 0;
    for n in 1..=105u64 {
        let m = 4 * n;
        for f in both(n) {
            if f.is_degenerate() {
                continue;
            }
            forms_checked += 1;
            let s = forms::divisor_classes(&f);
            let members: BTreeSet<u64> = s.members().iter().copied().collect();
            let closed = members
                .iter()
                .all(|&a| members.iter().all(|&b| members.contains(&(a * b % m))));
            let mirrored = forms::odd_coprime_residues(m).into_iter().all(|r| {
                let (x, y) = (members.contains(&r), members.contains(&(m - r)));
                match f.sign() {
                    Sign::Plus => x != y,
                    Sign::Minus => x == y,
                }
            });
            let stable = members
                .iter()
                .all(|&r| members.contains(&((r + 2 * n) % m)));
            let reducible = forms::reduced_classes(&f).is_some();
            let dichotomy = match (f.sign(), n % 4) {
                (_, 0) => true,
                (Sign::Plus, 3) | (Sign::Minus, 1) => reducible,
                _ => !reducible,
            };
            if !closed || !mirrored || stable != reducible || !dichotomy {
                bad.push(format!(
                    "{} closed={closed} mirrored={mirrored} dichotomy={dichotomy}",
                    sign_name(&f)
                ));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{forms_checked} non-degenerate forms, exceptions {bad:?}"),
    )
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=30u64 {
        for f in both(n) {
            let oracle = forms::divisor_classes_oracle(&f, 60).unwrap();
            let fast = forms::divisor_classes(&f);
            if oracle != fast {
                let missing: Vec<u64> = fast
                    .members()
                    .iter()
                    .copied()
                    .filter(|&r| !oracle.contains(r as i64))
                    .collect();
                let tag = if f.is_degenerate() {
                    " (degenerate)"
                } else {
                    ""
                };
                bad.push(format!("{}{tag} harvest misses {missing:?}", sign_name(&f)));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("60 forms at harvest bound 60, disagreements {bad:?}"),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cases: [(u64, u64, &[u64]); 3] = [(1, 4, &[1]), (2, 8, &[1, 3]), (3, 6, &[1])];
    let mut misses = Vec::new();
    let mut counted = Vec::new();
    for (n, modulus, classes) in cases {
        let form = TwoCoefForm::principal(&FormSpec::plus(n).unwrap());
        let primes: Vec<u64> = arith::primes_up_to(100_000)
            .into_iter()
            .filter(|p| classes.contains(&(p % modulus)))
            .collect();
        counted.push(primes.len());
        for p in primes {
            match represent::represent(p, &form, 10_000) {
                Some(w) if w.a * w.a + n * w.b * w.b == p => {}
                _ => misses.push((n, p)),
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = misses.is_empty() && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "primes tested {counted:?} for n = 1, 2, 3; misses {misses:?}; {:.2} s (limit 30 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    const BOUND: u64 = 10_000;
    let mut problems = Vec::new();
    let mut notes = Vec::new();

    // Exact maps where every multiplier is allowed.
    let exact: [(u64, Groups<u64>); 2] = [
        (5, &[(&[1, 9], 1), (&[3, 7], 2)]),
        (
            13,
            &[(&[1, 49, 9, 25, 29, 17], 1), (&[7, 31, 11, 19, 47, 15], 2)],
        ),
    ];
    for (n, groups) in exact {
        let f = FormSpec::plus(n).unwrap();
        let survey =
            represent::class_multiplier_survey(&f, BOUND, &MultiplierSearch::UpTo(4 * n)).unwrap();
        let mut want = BTreeMap::new();
        for (classes, k) in groups {
            for &c in *classes {
                want.insert(c, vec![*k]);
            }
        }
        if survey.map() != want {
            problems.push(format!("n={n} map {:?}", survey.map()));
        }
    }

    // Disjunctive claims: the multiplier is drawn from the stated set.
    let claimed: [(u64, Groups<&[u64]>); 3] = [
        (
            17,
            &[
                (&[1, 9, 13, 49, 33, 25, 21, 53], &[1, 9]),
                (&[3, 27, 39, 11, 31, 7, 63, 23], &[3]),
            ],
        ),
        (11, &[(&[1, 3, 5, 9, 15, 23, 25, 27, 31, 37], &[1, 4])]),
        (
            19,
            &[(
                &[
                    1, 5, 7, 9, 11, 17, 23, 25, 35, 39, 43, 45, 47, 49, 55, 61, 63, 73,
                ],
                &[1, 4],
            )],
        ),
    ];
    for (n, groups) in claimed {
        let f = FormSpec::plus(n).unwrap();
        for (classes, ks) in groups {
            let search = MultiplierSearch::Among(ks.to_vec());
            let survey = represent::survey_classes(&f, classes, BOUND, &search).unwrap();
            for (c, cm) in &survey.classes {
                if !cm.unrepresented.is_empty() || cm.multipliers.iter().any(|k| !ks.contains(k)) {
                    problems.push(format!(
                        "n={n} class {c}: multipliers {:?}, no witness for {:?}",
                        cm.multipliers, cm.unrepresented
                    ));
                }
            }
        }
        let open =
            represent::class_multiplier_survey(&f, BOUND, &MultiplierSearch::UpTo(4 * n)).unwrap();
        let used: BTreeSet<u64> = open
            .classes
            .values()
            .flat_map(|c| c.multipliers.iter().copied())
            .collect();
        notes.push(format!("n={n} unrestricted smallest k {used:?}"));
    }
    outcome(
        problems.is_empty(),
        format!("violations {problems:?}; {}", notes.join("; ")),
    )
}

fn criterion_8() -> Outcome {
    const BOUND: u64 = 10_000;
    let cases: [(u64, &[&str], &str); 6] = [
        (6, &["aa+6bb", "2aa+3bb"], "Th29"),
        (10, &["aa+10bb", "2aa+5bb"], "Th32"),
        (14, &["aa+14bb", "2aa+7bb"], "Th35"),
        (15, &["aa+15bb", "3aa+5bb"], "Th37"),
        (21, &["aa+21bb", "3aa+7bb"], "Th38"),
        (30, &["aa+30bb", "2aa+15bb", "3aa+10bb", "5aa+6bb"], "Th40"),
    ];
    let records = load_catalog().unwrap();
    let mut problems = Vec::new();
    for (n, labels, id) in cases {
        let companions: Vec<TwoCoefForm> = labels
            .iter()
            .map(|l| TwoCoefForm::from_label(l).unwrap())
            .collect();
        let survey = represent::split_survey(n, &companions, BOUND, 1).unwrap();
        let mixed: Vec<u64> = survey
            .classes
            .iter()
            .filter(|(_, s)| s.mixed)
            .map(|(&c, _)| c)
            .collect();
        let uncovered: Vec<u64> = survey
            .classes
            .iter()
            .filter(|(_, s)| !s.uncovered.is_empty())
            .map(|(&c, _)| c)
            .collect();
        if !survey.all_exclusive() {
            problems.push(format!("n={n}: classes with several forms {mixed:?}, classes with unrepresented primes {uncovered:?}"));
        }
        let rec = catalog::find_record(&records, id).unwrap();
        for g in rec.groups.iter().flatten() {
            let Some(forms_named) = &g.forms else {
                continue;
            };
            if g.multiplier.is_some() || forms_named.len() != 1 {
                continue;
            }
            for c in &g.classes {
                let seen = survey
                    .classes
                    .get(c)
                    .map(|s| s.forms.clone())
                    .unwrap_or_default();
                if seen.iter().ne(forms_named.iter()) {
                    problems.push(format!(
                        "n={n} class {c}: {id} names {forms_named:?}, found {seen:?}"
                    ));
                }
            }
        }
    }
    outcome(problems.is_empty(), format!("failures {problems:?}"))
}

fn criterion_9(records: &[TheoremRecord]) -> Outcome {
    let mut problems = Vec::new();
    let mut scanned = 0;
    for id in ["Scholion2", "Scholion3"] {
        let rec = catalog::find_record(records, id).unwrap();
        let labels = match rec.corrected_part("families") {
            Some(CorrectedPart::Text(v)) => v.clone(),
            _ => rec.printed["families"].clone(),
        };
        for label in labels {
            let fam = NonsquareFamily::from_label(&label).unwrap();
            if fam.n > 7 {
                continue;
            }
            scanned += 1;
            let r = nonsquare::scan_family(&fam, 300).unwrap();
            if !r.is_clean() {
                problems.push(format!("{label}: {:?}", r.counterexamples.first()));
            }
        }
    }
    let corollaries = [
        Variant::Abc4,
        Variant::Abc2Minus,
        Variant::Abc2Mixed,
        Variant::Abc2Pm,
    ];
    for v in corollaries {
        let r = nonsquare::scan_corollary(v, 60).unwrap();
        if !r.is_clean() {
            problems.push(format!("{}: {:?}", r.label, r.counterexamples.first()));
        }
    }
    let printed = NonsquareFamily::from_label("28mn+8(m-n)").unwrap();
    let r = nonsquare::scan_family(&printed, 300).unwrap();
    let control = r
        .counterexamples
        .iter()
        .any(|c| c.assignment == [3, 1] && c.value == 100 && c.root == 10);
    if !control {
        problems.push("28mn+8(m-n) lacks (3, 1) -> 100".into());
    }
    outcome(
        problems.is_empty(),
        format!(
            "{scanned} families at 300x300, {} corollaries at 60^3, printed control hits (3, 1) = 100: {control}; failures {problems:?}",
            corollaries.len()
        ),
    )
}

/// Residues N mod P for which P divides `a² + sign·N·b²` with `P ∤ b`.
fn row_by_squares(p: u64, sign: Sign) -> BTreeSet<u64> {
    let squares: BTreeSet<u64> = (1..p).map(|t| t * t % p).collect();
    (1..p)
        .filter(|&n| {
            let target = match sign {
                Sign::Plus => p - n,
                Sign::Minus => n,
            };
            squares.contains(&target)
        })
        .collect()
}

fn criterion_10(records: &[TheoremRecord]) -> Outcome {
    let mut problems = Vec::new();
    let mut typos = Vec::new();
    let mut rows = 0;
    for (id, sign) in [("Note9", Sign::Plus), ("Note17", Sign::Minus)] {
        let rec = catalog::find_record(records, id).unwrap();
        for p in [3u64, 5, 7, 11, 13] {
            let admit = row_by_squares(p, sign);
            let reject: BTreeSet<u64> = (1..p).filter(|n| !admit.contains(n)).collect();
            let row = forms::character_row(p, sign).unwrap();
            if row.plus_classes.iter().copied().collect::<BTreeSet<_>>() != admit
                || row.minus_classes.iter().copied().collect::<BTreeSet<_>>() != reject
            {
                problems.push(format!(
                    "{id} P={p}: generated row differs from square test"
                ));
            }
            for (suffix, truth) in [("admit", &admit), ("reject", &reject)] {
                let part = format!("p{p}.{suffix}");
                let Some(items) = rec.printed.get(&part) else {
                    continue;
                };
                rows += 1;
                let printed: Option<BTreeSet<u64>> = items
                    .iter()
                    .map(|s| parse_item(s, 'n').and_then(|i| i.residues(p)))
                    .collect::<Option<Vec<_>>>()
                    .map(|v| v.into_iter().flatten().collect());
                let ok = printed.as_ref() == Some(truth) && items.len() == truth.len();
                let corrected = match rec.corrected_part(&part) {
                    Some(CorrectedPart::Numbers(v)) => {
                        Some(v.iter().copied().collect::<BTreeSet<u64>>())
                    }
                    _ => None,
                };
                match (ok, corrected) {
                    (true, None) => {}
                    (false, Some(c)) if &c == truth => typos.push(format!("{id} {part}")),
                    _ => problems.push(format!(
                        "{id} {part}: printed {items:?}, computed {truth:?}"
                    )),
                }
            }
        }
    }
    let flagged = typos.iter().any(|t| t == "Note9 p11.reject");
    let mut pairs = 0;
    let mut inconsistent = Vec::new();
    for p in arith::primes_up_to(37).into_iter().filter(|&p| p > 2) {
        for sign in [Sign::Plus, Sign::Minus] {
            let row = forms::character_row(p, sign).unwrap();
            for n in 1..=105u64 {
                if (4 * n) % p == 0 {
                    continue;
                }
                pairs += 1;
                let f = FormSpec::new(n, sign).unwrap();
                if forms::divisor_classes(&f).contains(p as i64)
                    != row.plus_classes.contains(&(n % p))
                {
                    inconsistent.push((p, sign_name(&f)));
                }
            }
        }
    }
    let pass = problems.is_empty() && flagged && inconsistent.is_empty();
    outcome(
        pass,
        format!(
            "{rows} printed rows; typos recorded {typos:?}; other mismatches {problems:?}; {pairs} consistency pairs, {} inconsistent",
            inconsistent.len()
        ),
    )
}

fn main() {
    let records = load_catalog().unwrap();
    let (c1, all) = criterion_1(&records);
    let printed = verify_all(
        &records,
        &VerifyOptions {
            payload: Payload::AsPrinted,
            ..VerifyOptions::default()
        },
    )
    .unwrap();
    let results = [
        ("catalog verification", c1),
        ("errata detection", criterion_2(&all)),
        ("half-count law", criterion_3()),
        ("structural laws", criterion_4()),
        ("oracle equivalence", criterion_5()),
        ("representation completeness", criterion_6()),
        ("multiplier maps", criterion_7()),
        ("two-form splits", criterion_8()),
        ("nonsquare scans", criterion_9(&records)),
        ("character tables", criterion_10(&records)),
    ];
    let mut red = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            red += 1;
        }
        println!("criterion {:>2} {tag} {name}: {}", i + 1, o.detail);
    }
    println!(
        "as-printed payload: {} of {} records fail",
        printed.summary.failed, printed.summary.total
    );
    println!("{} of {} criteria pass", results.len() - red, results.len());
    if red > 0 {
        std::process::exit(1);
    }
}
