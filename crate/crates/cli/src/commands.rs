use std::fmt::Write as _;

use formdiv::catalog::{self, parse_item, render, Op, Style};
use formdiv::forms::{self, FormSpec, Sign};
use formdiv::nonsquare::{self, NonsquareFamily, ScanReport};
use formdiv::represent::{self, TwoCoefForm};
use formdiv::{Error, Payload, Result, Status, VerificationReport, VerifyOptions};
use serde::Serialize;
use serde_json::Value;

use crate::Rendered;

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serializes")
}

#[derive(Serialize)]
struct ReducedPayload {
    modulus: u64,
    classes: Vec<u64>,
}

#[derive(Serialize)]
struct ClassesPayload {
    form: String,
    n: u64,
    sign: Sign,
    modulus: u64,
    degenerate: bool,
    classes: Vec<u64>,
    forbidden: Vec<u64>,
    count: usize,
    reduced: Option<ReducedPayload>,
}

pub fn classes(n: u64, sign: Sign) -> Result<Rendered> {
    let form = FormSpec::new(n, sign)?;
    let s = forms::divisor_classes(&form);
    let t = forms::forbidden_classes(&form);
    let reduced = forms::reduced_classes(&form);
    let mut text = String::new();
    writeln!(text, "{form}").unwrap();
    if form.is_degenerate() {
        writeln!(
            text,
            "degenerate: {n} is a square, so the form factors and every odd class coprime to {} is admissible",
            form.modulus()
        )
        .unwrap();
    }
    writeln!(text, "mod {}: {}", form.modulus(), join(s.members())).unwrap();
    if t.is_empty() {
        writeln!(text, "forbidden: none").unwrap();
    } else {
        writeln!(text, "forbidden: {}", join(t.members())).unwrap();
    }
    writeln!(text, "count: {}", s.len()).unwrap();
    match &reduced {
        Some(r) => writeln!(text, "reduced mod {}: {}", r.modulus(), join(r.members())).unwrap(),
        None => writeln!(text, "not reducible").unwrap(),
    }
    let payload = ClassesPayload {
        form: form.to_string(),
        n,
        sign,
        modulus: form.modulus(),
        degenerate: form.is_degenerate(),
        classes: s.members().to_vec(),
        forbidden: t.members().to_vec(),
        count: s.len(),
        reduced: reduced.map(|r| ReducedPayload {
            modulus: r.modulus(),
            classes: r.members().to_vec(),
        }),
    };
    Ok(Rendered {
        payload: to_value(&payload),
        text,
        ok: true,
    })
}

#[derive(Serialize)]
struct WitnessPayload {
    a: u64,
    b: u64,
    multiplier: u64,
    rendered: String,
}

#[derive(Serialize)]
struct RepresentPayload {
    value: u64,
    form: String,
    witness: Option<WitnessPayload>,
}

pub fn represent(
    value: u64,
    n: Option<u64>,
    pq: Option<(u64, u64)>,
    sign: Sign,
    search_bound: u64,
) -> Result<Rendered> {
    if value == 0 {
        return Err(Error::Domain("value must be at least 1".into()));
    }
    let form = match (pq, n) {
        (Some((p, q)), _) => TwoCoefForm::new(p, q, sign)?,
        (None, Some(n)) => TwoCoefForm::principal(&FormSpec::new(n, sign)?),
        (None, None) => return Err(Error::Domain("give --n or both --p and --q".into())),
    };
    let w = represent::represent(value, &form, search_bound);
    let text = match &w {
        Some(w) => format!("{}\n", w.render()),
        None => "none\n".to_string(),
    };
    let payload = RepresentPayload {
        value,
        form: form.label(),
        witness: w.map(|w| WitnessPayload {
            a: w.a,
            b: w.b,
            multiplier: w.multiplier,
            rendered: w.render(),
        }),
    };
    Ok(Rendered {
        payload: to_value(&payload),
        text,
        ok: true,
    })
}

fn normalize_id(raw: &str) -> String {
    if raw.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        format!("Th{raw}")
    } else {
        raw.to_string()
    }
}

fn render_report(text: &mut String, r: &VerificationReport) {
    writeln!(
        text,
        "{:<10} {:<18} {}",
        r.theorem_id,
        r.kind.as_str(),
        r.status.as_str()
    )
    .unwrap();
    for d in &r.diffs {
        writeln!(text, "    {}: {} → {}", d.part, d.printed, d.computed).unwrap();
    }
}

pub fn verify(
    theorem: Option<&str>,
    as_printed: bool,
    bounds: formdiv::Bounds,
    jobs: Option<usize>,
) -> Result<Rendered> {
    let records = formdiv::load_catalog()?;
    let options = VerifyOptions {
        bounds,
        payload: if as_printed {
            Payload::AsPrinted
        } else {
            Payload::Corrected
        },
        jobs,
    };
    let mut text = String::new();
    match theorem {
        Some(raw) => {
            let id = normalize_id(raw);
            let rec = catalog::find_record(&records, &id).ok_or_else(|| Error::Catalog {
                record: id.clone(),
                message: "no such record".into(),
            })?;
            let report = formdiv::verify_theorem(rec, &options)?;
            render_report(&mut text, &report);
            Ok(Rendered {
                ok: report.status != Status::Failed,
                payload: to_value(&report),
                text,
            })
        }
        None => {
            let all = formdiv::verify_all(&records, &options)?;
            for r in &all.reports {
                render_report(&mut text, r);
            }
            let s = &all.summary;
            writeln!(
                text,
                "\n{} records: {} verified, {} verified with errata, {} failed",
                s.total, s.verified, s.verified_with_errata, s.failed
            )
            .unwrap();
            Ok(Rendered {
                ok: s.failed == 0,
                payload: to_value(&all),
                text,
            })
        }
    }
}

pub fn errata(bounds: formdiv::Bounds, jobs: Option<usize>) -> Result<Rendered> {
    let records = formdiv::load_catalog()?;
    let options = VerifyOptions {
        bounds,
        jobs,
        ..VerifyOptions::default()
    };
    let all = formdiv::verify_all(&records, &options)?;
    let mut text = String::new();
    for e in &all.errata {
        writeln!(
            text,
            "{:<10} {:<14} {} → {}  ({})",
            e.theorem_id,
            e.part,
            e.printed,
            e.computed,
            e.status.as_str()
        )
        .unwrap();
    }
    writeln!(
        text,
        "{} errata in {} records",
        all.errata.len(),
        all.summary.verified_with_errata
    )
    .unwrap();
    Ok(Rendered {
        ok: all.summary.failed == 0,
        payload: serde_json::json!({ "summary": all.summary, "errata": all.errata }),
        text,
    })
}

#[derive(Serialize)]
struct RowSide {
    residues: Vec<u64>,
    text: Vec<String>,
    printed: Option<Vec<String>>,
    flagged: bool,
}

#[derive(Serialize)]
struct TableRow {
    prime: u64,
    admit: RowSide,
    reject: RowSide,
}

#[derive(Serialize)]
struct TablePayload {
    note: u32,
    sign: Sign,
    rows: Vec<TableRow>,
}

/// Keeps the printed wording where it is right and rewrites the rest.
fn side(p: u64, residues: &[u64], printed: Option<&Vec<String>>) -> RowSide {
    let Some(items) = printed else {
        return RowSide {
            residues: residues.to_vec(),
            text: render(residues, p, 'n', Style::Nearest),
            printed: None,
            flagged: false,
        };
    };
    let mut unused: Vec<u64> = residues.to_vec();
    let mut kept: Vec<Option<String>> = Vec::new();
    let mut styles = Vec::new();
    for s in items {
        let item = parse_item(s, 'n');
        styles.push(match item.as_ref().map(|i| i.op) {
            Some(Op::Minus) => Style::Minus,
            _ => Style::Plus,
        });
        let good = item
            .and_then(|i| i.residues(p))
            .filter(|rs| rs.iter().all(|r| unused.contains(r)));
        match good {
            Some(rs) => {
                unused.retain(|r| !rs.contains(r));
                kept.push(Some(s.clone()));
            }
            None => kept.push(None),
        }
    }
    let flagged = kept.iter().any(Option::is_none) || !unused.is_empty();
    let mut fill = unused.into_iter();
    let mut text: Vec<String> = kept
        .into_iter()
        .zip(styles)
        .filter_map(|(k, style)| {
            k.or_else(|| fill.next().map(|r| render(&[r], p, 'n', style).remove(0)))
        })
        .collect();
    text.extend(fill.map(|r| render(&[r], p, 'n', Style::Nearest).remove(0)));
    RowSide {
        residues: residues.to_vec(),
        text,
        printed: Some(items.clone()),
        flagged,
    }
}

pub fn tables(note: &str, prime_max: u64) -> Result<Rendered> {
    let (id, sign, number) = match note {
        "9" => ("Note9", Sign::Plus, 9),
        "17" => ("Note17", Sign::Minus, 17),
        other => return Err(Error::Domain(format!("no table for note {other}"))),
    };
    let records = formdiv::load_catalog()?;
    let rec = catalog::find_record(&records, id).ok_or_else(|| Error::Catalog {
        record: id.into(),
        message: "missing from catalog".into(),
    })?;
    let mut rows = Vec::new();
    for p in formdiv::arith::primes_up_to(prime_max)
        .into_iter()
        .filter(|&p| p > 2)
    {
        let row = forms::character_row(p, sign)?;
        rows.push(TableRow {
            prime: p,
            admit: side(
                p,
                &row.plus_classes,
                rec.printed.get(&format!("p{p}.admit")),
            ),
            reject: side(
                p,
                &row.minus_classes,
                rec.printed.get(&format!("p{p}.reject")),
            ),
        });
    }
    let (yes, no) = match sign {
        Sign::Plus => ("α = +", "α = -"),
        Sign::Minus => ("α = ", "α ≠ "),
    };
    let mut text = String::new();
    writeln!(text, "{:<10} if N is", "").unwrap();
    let mut flags = Vec::new();
    for r in &rows {
        for (label, s, part) in [(yes, &r.admit, "admit"), (no, &r.reject, "reject")] {
            let mark = if s.flagged { "  *" } else { "" };
            writeln!(
                text,
                "{:<10} {}{mark}",
                format!("{label}{}", r.prime),
                s.text.join(", ")
            )
            .unwrap();
            if s.flagged {
                flags.push(format!(
                    "* p{}.{part} printed: {}; computed: {}",
                    r.prime,
                    s.printed.as_ref().map(|v| v.join(", ")).unwrap_or_default(),
                    s.text.join(", ")
                ));
            }
        }
    }
    for f in flags {
        writeln!(text, "{f}").unwrap();
    }
    Ok(Rendered {
        payload: to_value(&TablePayload {
            note: number,
            sign,
            rows,
        }),
        text,
        ok: true,
    })
}

fn render_scan(r: &ScanReport) -> String {
    let mut text = String::new();
    writeln!(text, "family: {}", r.label).unwrap();
    writeln!(text, "bound: {}", r.bound).unwrap();
    writeln!(text, "cells scanned: {}", r.cells_scanned).unwrap();
    if r.negative_values > 0 {
        writeln!(text, "negative values skipped: {}", r.negative_values).unwrap();
    }
    if r.is_clean() {
        writeln!(text, "clean").unwrap();
        return text;
    }
    writeln!(text, "counterexamples: {}", r.counterexamples.len()).unwrap();
    for c in r.counterexamples.iter().take(20) {
        let args: Vec<String> = c.assignment.iter().map(i64::to_string).collect();
        let sign = match c.sign {
            Some(1) => " (+)",
            Some(-1) => " (-)",
            _ => "",
        };
        writeln!(
            text,
            "  ({}){sign} -> {} = {}²",
            args.join(", "),
            c.value,
            c.root
        )
        .unwrap();
    }
    if r.counterexamples.len() > 20 {
        writeln!(text, "  ...").unwrap();
    }
    text
}

pub fn scan(
    family: Option<&str>,
    corollary: Option<&str>,
    bound: Option<u64>,
    as_printed: bool,
    ignore_coprimality: bool,
    jobs: Option<usize>,
) -> Result<Rendered> {
    let label = family.or(corollary).unwrap_or_default();
    let mut fam = NonsquareFamily::from_label(label)?;
    if corollary.is_some() != fam.variant.is_corollary() {
        return Err(Error::Domain(format!(
            "{label} is not a {} family",
            if corollary.is_some() {
                "three-variable"
            } else {
                "two-variable"
            }
        )));
    }
    if !as_printed {
        fam.validate().map_err(|e| match e {
            Error::Domain(m) => Error::Domain(format!("{m}; pass --as-printed to scan it anyway")),
            other => other,
        })?;
    }
    if ignore_coprimality {
        fam = fam.without_coprimality();
    }
    let default = if fam.variant.is_corollary() {
        nonsquare::DEFAULT_COROLLARY_BOUND
    } else {
        nonsquare::DEFAULT_SCAN_BOUND
    };
    let bound = bound.unwrap_or(default);
    let scan = || nonsquare::scan_family(&fam, bound);
    let report = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(scan)?,
        None => scan()?,
    };
    Ok(Rendered {
        text: render_scan(&report),
        ok: report.is_clean(),
        payload: to_value(&report),
    })
}
