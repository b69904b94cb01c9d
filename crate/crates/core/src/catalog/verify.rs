use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::parse::{self, Style};
use super::{ClaimKind, CorrectedPart, RecordId, TheoremRecord};
use crate::arith::{self, SymbolValue};
use crate::error::{Error, Result};
use crate::forms::{self, FormSpec, ResidueClassSet, Sign};
use crate::nonsquare::{self, NonsquareFamily};
use crate::represent::{self, MultiplierSearch, TwoCoefForm};

/// Grid and sample sizes used by the verifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Primes sampled per class for the Euler-criterion check.
    pub samples: usize,
    /// Largest prime checked for representation completeness.
    pub prime_bound: u64,
    /// Largest prime in multiplier and split surveys.
    pub survey_bound: u64,
    pub harvest_bound: u64,
    pub scan_bound: u64,
    pub corollary_bound: u64,
    /// Largest `n` checked by the reduction and table consistency rules.
    pub reduction_max_n: u64,
    /// Largest `b` tried for minus-form witnesses.
    pub search_bound: u64,
    /// Largest prime searched when sampling a class.
    pub sample_bound: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            samples: 3,
            prime_bound: 100_000,
            survey_bound: 10_000,
            harvest_bound: 40,
            scan_bound: nonsquare::DEFAULT_SCAN_BOUND,
            corollary_bound: nonsquare::DEFAULT_COROLLARY_BOUND,
            reduction_max_n: 105,
            search_bound: represent::DEFAULT_SEARCH_BOUND,
            sample_bound: 10_000_000,
        }
    }
}

/// Which payload a record is judged by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Payload {
    /// Printed text, with recorded corrections allowed to explain diffs.
    #[default]
    Corrected,
    /// Printed text alone; any diff fails.
    AsPrinted,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub bounds: Bounds,
    pub payload: Payload,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    VerifiedWithErrata,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::VerifiedWithErrata => "verified-with-errata",
            Status::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diff {
    pub part: String,
    pub printed: String,
    pub computed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem_id: String,
    pub kind: ClaimKind,
    pub status: Status,
    pub computed: BTreeMap<String, Value>,
    pub diffs: Vec<Diff>,
    pub sample_sizes: BTreeMap<String, u64>,
    pub bounds: Bounds,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub theorem_id: String,
    pub part: String,
    pub printed: String,
    pub computed: String,
    pub status: Status,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub verified: usize,
    pub verified_with_errata: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllReport {
    pub summary: Summary,
    pub reports: Vec<VerificationReport>,
    pub errata: Vec<Erratum>,
}

/// `p11.admit` → `(11, true)`, `p5.reject` → `(5, false)`.
pub(crate) fn table_part(part: &str) -> Option<(u64, bool)> {
    let (p, side) = part.strip_prefix('p')?.split_once('.')?;
    let p: u64 = p.parse().ok()?;
    if p < 3 || !arith::is_prime(p) {
        return None;
    }
    match side {
        "admit" => Some((p, true)),
        "reject" => Some((p, false)),
        _ => None,
    }
}

/// Parts that carry wording rather than checkable values.
const INFORMATIONAL: [&str; 3] = ["phrase", "conditions", "claim"];

const DIFF_CAP: usize = 20;

struct PartResult {
    part: String,
    diffs: Vec<Diff>,
    /// Whether the recorded correction reproduces the computation.
    corrected: Option<bool>,
}

struct Ctx<'a> {
    rec: &'a TheoremRecord,
    bounds: &'a Bounds,
    computed: BTreeMap<String, Value>,
    samples: BTreeMap<String, u64>,
    parts: Vec<PartResult>,
    notes: Vec<String>,
}

fn diff(part: &str, printed: impl Into<String>, computed: impl Into<String>) -> Diff {
    Diff {
        part: part.to_string(),
        printed: printed.into(),
        computed: computed.into(),
    }
}

/// Pairs bad printed items with missing computed items, in order.
fn pair(part: &str, bad: Vec<String>, missing: Vec<String>) -> Vec<Diff> {
    let n = bad.len().max(missing.len());
    (0..n)
        .map(|i| {
            diff(
                part,
                bad.get(i).cloned().unwrap_or_else(|| "(absent)".into()),
                missing
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| "(no such class)".into()),
            )
        })
        .collect()
}

fn capped(part: &str, mut diffs: Vec<Diff>) -> Vec<Diff> {
    if diffs.len() > DIFF_CAP {
        let extra = diffs.len() - DIFF_CAP;
        diffs.truncate(DIFF_CAP);
        diffs.push(diff(part, "…", format!("{extra} more")));
    }
    diffs
}

impl<'a> Ctx<'a> {
    fn new(rec: &'a TheoremRecord, bounds: &'a Bounds) -> Self {
        Ctx {
            rec,
            bounds,
            computed: BTreeMap::new(),
            samples: BTreeMap::new(),
            parts: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, part: &str, diffs: Vec<Diff>, corrected: Option<bool>) {
        self.parts.push(PartResult {
            part: part.to_string(),
            diffs,
            corrected,
        });
    }

    fn corrected_numbers(
        &self,
        key: &str,
        modulus: Option<u64>,
        truth: &BTreeSet<u64>,
    ) -> Option<bool> {
        match self.rec.corrected_part(key)? {
            CorrectedPart::Numbers(v) => {
                let got: BTreeSet<u64> = v.iter().map(|&x| modulus.map_or(x, |m| x % m)).collect();
                Some(&got == truth)
            }
            CorrectedPart::Text(_) => Some(false),
        }
    }

    fn printed(&self, part: &str) -> &'a [String] {
        self.rec
            .printed
            .get(part)
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    /// Compares residue items against `truth` modulo `modulus`.
    fn judge_residues(&mut self, part: &str, modulus: u64, var: char, truth: &[u64], style: Style) {
        let items = self.printed(part);
        let truth_set: BTreeSet<u64> = truth.iter().copied().collect();
        let mut covered = BTreeSet::new();
        let mut bad = Vec::new();
        let mut minus_ops = 0;
        let mut good = 0;
        for item in items {
            let parsed = parse::parse_item(item, var);
            match parsed.as_ref().and_then(|i| i.residues(modulus)) {
                Some(rs) if rs.iter().all(|r| truth_set.contains(r)) => {
                    good += 1;
                    if parsed.map(|i| i.op) == Some(parse::Op::Minus) {
                        minus_ops += 1;
                    }
                    covered.extend(rs);
                }
                _ => bad.push(item.clone()),
            }
        }
        let style = if style == Style::Plus && good > 0 && minus_ops == good {
            Style::Minus
        } else {
            style
        };
        let missing: Vec<u64> = truth_set.difference(&covered).copied().collect();
        let diffs = pair(part, bad, parse::render(&missing, modulus, var, style));
        self.computed.insert(
            part.to_string(),
            json!({
                "modulus": modulus,
                "residues": truth,
                "typeset": parse::render(truth, modulus, var, style),
            }),
        );
        let corrected = self.corrected_numbers(part, Some(modulus), &truth_set);
        self.push(part, diffs, corrected);
    }

    fn judge_not_reducible(&mut self, part: &str) {
        let bad = self.printed(part).to_vec();
        let diffs = bad
            .into_iter()
            .map(|b| diff(part, b, "not reducible"))
            .collect();
        self.computed
            .insert(part.to_string(), json!("not reducible"));
        let corrected = self.rec.corrected_part(part).map(|_| false);
        self.push(part, diffs, corrected);
    }

    fn judge_primes(&mut self, form: &FormSpec) -> Result<()> {
        let h = forms::harvest(form, self.bounds.harvest_bound)?;
        let truth: BTreeSet<u64> = std::iter::once(2)
            .chain(h.exceptional_primes.iter().copied())
            .collect();
        let mut covered = BTreeSet::new();
        let mut bad = Vec::new();
        for item in self.printed("primes") {
            match item.trim().parse::<u64>() {
                Ok(p) if truth.contains(&p) => {
                    covered.insert(p);
                }
                _ => bad.push(item.clone()),
            }
        }
        let missing = truth.difference(&covered).map(u64::to_string).collect();
        self.computed.insert("primes".into(), json!(truth));
        let corrected = self.corrected_numbers("primes", None, &truth);
        self.push("primes", pair("primes", bad, missing), corrected);
        Ok(())
    }

    /// Why `label` is not a valid companion of `form`, if it is not.
    fn form_problem(&self, label: &str, form: &FormSpec) -> Result<Option<String>> {
        let f = match TwoCoefForm::from_label(label) {
            Ok(f) => f,
            Err(_) => return Ok(Some("not a form p·aa ± q·bb".into())),
        };
        if f.sign() != form.sign() || f.p() * f.q() != form.n() {
            return Ok(Some(format!(
                "coefficients do not multiply to {} with sign {}",
                form.n(),
                form.sign()
            )));
        }
        let inc = represent::inclusion_check(&f, self.bounds.harvest_bound)?;
        if !inc.holds {
            return Ok(Some(format!(
                "divides into classes {:?} outside the admissible set",
                inc.outside
            )));
        }
        Ok(None)
    }

    fn judge_forms(&mut self, form: &FormSpec) -> Result<Vec<TwoCoefForm>> {
        let mut bad = Vec::new();
        let mut good = Vec::new();
        let mut shown = Vec::new();
        for label in self.printed("forms") {
            match self.form_problem(label, form)? {
                Some(why) => {
                    let expected = expected_form_for(label, form);
                    bad.push(diff("forms", label.clone(), expected.unwrap_or(why)));
                }
                None => {
                    good.push(TwoCoefForm::from_label(label)?);
                    shown.push(label.clone());
                }
            }
        }
        let corrected = match self.rec.corrected_part("forms") {
            Some(CorrectedPart::Text(t)) => {
                let mut ok = true;
                for label in t {
                    ok &= self.form_problem(label, form)?.is_none();
                }
                Some(ok)
            }
            Some(CorrectedPart::Numbers(_)) => Some(false),
            None => None,
        };
        self.computed.insert("forms".into(), json!(shown));
        self.push("forms", bad, corrected);
        Ok(good)
    }

    /// Harvest must stay inside the admissible set, and each class must
    /// agree with the Euler criterion on its first sampled primes.
    fn oracle_checks(&mut self, form: &FormSpec, admissible: &ResidueClassSet) -> Result<()> {
        let h = forms::harvest(form, self.bounds.harvest_bound)?;
        let outside: Vec<u64> = h
            .classes
            .members()
            .iter()
            .copied()
            .filter(|&r| !admissible.contains(r as i64))
            .collect();
        let mut diffs: Vec<Diff> = outside
            .iter()
            .map(|r| {
                diff(
                    "oracle",
                    "(no divisor in this class)",
                    format!("harvest found a prime ≡ {r}"),
                )
            })
            .collect();
        self.samples.insert("harvest_pairs".into(), h.pairs);

        let m = form.modulus();
        let d = form.discriminant();
        let mut sampled = 0u64;
        for r in forms::odd_coprime_residues(m) {
            let expect = if admissible.contains(r as i64) {
                SymbolValue::PlusOne
            } else {
                SymbolValue::MinusOne
            };
            let primes =
                arith::primes_in_class(r as i64, m, self.bounds.samples, self.bounds.sample_bound)?;
            if primes.len() < self.bounds.samples {
                diffs.push(diff(
                    "oracle",
                    format!("class {r} mod {m}"),
                    format!(
                        "only {} primes ≤ {}",
                        primes.len(),
                        self.bounds.sample_bound
                    ),
                ));
            }
            for p in primes {
                sampled += 1;
                if arith::euler_criterion(d, p)? != expect {
                    diffs.push(diff(
                        "oracle",
                        format!("class {r} mod {m}"),
                        format!("Euler criterion disagrees at p = {p}"),
                    ));
                }
            }
        }
        self.samples.insert("euler_primes".into(), sampled);
        self.push("oracle", capped("oracle", diffs), None);
        Ok(())
    }

    fn finish(self, payload: Payload) -> VerificationReport {
        let mut status = Status::Verified;
        let mut diffs = Vec::new();
        for mut p in self.parts {
            let part_status = match (payload, p.diffs.is_empty(), p.corrected) {
                (_, true, None) => Status::Verified,
                (Payload::AsPrinted, true, Some(_)) => Status::Verified,
                (Payload::Corrected, true, Some(_)) => {
                    p.diffs.push(diff(
                        &p.part,
                        "(as printed)",
                        "print verifies; recorded correction is stale",
                    ));
                    Status::Failed
                }
                (Payload::Corrected, false, Some(true)) => Status::VerifiedWithErrata,
                _ => Status::Failed,
            };
            status = match (status, part_status) {
                (Status::Failed, _) | (_, Status::Failed) => Status::Failed,
                (Status::VerifiedWithErrata, _) | (_, Status::VerifiedWithErrata) => {
                    Status::VerifiedWithErrata
                }
                _ => Status::Verified,
            };
            diffs.extend(p.diffs);
        }
        VerificationReport {
            theorem_id: self.rec.id.clone(),
            kind: self.rec.kind,
            status,
            computed: self.computed,
            diffs,
            sample_sizes: self.samples,
            bounds: self.bounds.clone(),
            notes: self.notes,
        }
    }
}

/// Suggests the valid companion label closest to a malformed one.
fn expected_form_for(label: &str, form: &FormSpec) -> Option<String> {
    let norm = parse::normalize(label);
    let candidates = companion_labels(form);
    candidates.into_iter().find(|c| c.starts_with(&norm))
}

fn companion_labels(form: &FormSpec) -> Vec<String> {
    let n = form.n();
    (1..=n)
        .filter(|p| n.is_multiple_of(*p))
        .filter_map(|p| TwoCoefForm::new(p, n / p, form.sign()).ok())
        .map(|f| f.label())
        .collect()
}

fn unknown_part(rec: &TheoremRecord, part: &str) -> Error {
    Error::catalog(
        &rec.id,
        format!("no verifier for part {part:?} of a {:?} record", rec.kind),
    )
}

fn verify_classes(ctx: &mut Ctx, forbidden: bool) -> Result<()> {
    let form = ctx.rec.form()?;
    let admissible = forms::divisor_classes(&form);
    let truth = if forbidden {
        admissible.complement()
    } else {
        admissible.clone()
    };
    let style = Style::for_sign(form.sign());
    let rec = ctx.rec;
    for part in rec.printed.keys() {
        match part.as_str() {
            "classes" => ctx.judge_residues(part, truth.modulus(), 'm', truth.members(), style),
            "reduced" => match truth.halved() {
                Some(r) => ctx.judge_residues(part, r.modulus(), 'm', r.members(), style),
                None => ctx.judge_not_reducible(part),
            },
            "primes" => ctx.judge_primes(&form)?,
            "forms" => {
                ctx.judge_forms(&form)?;
            }
            other => return Err(unknown_part(ctx.rec, other)),
        }
    }
    ctx.computed.insert("count".into(), json!(truth.len()));
    if form.is_degenerate() {
        ctx.notes
            .push("degenerate form: every odd class coprime to 4n is admissible".into());
    }
    ctx.oracle_checks(&form, &admissible)
}

fn verify_representation(ctx: &mut Ctx) -> Result<()> {
    let form = ctx.rec.form()?;
    let admissible = forms::divisor_classes(&form);
    let style = Style::for_sign(form.sign());
    let mut companions = Vec::new();
    let rec = ctx.rec;
    for part in rec.printed.keys() {
        match part.as_str() {
            "classes" => {
                ctx.judge_residues(part, admissible.modulus(), 'm', admissible.members(), style)
            }
            "reduced" => match admissible.halved() {
                Some(r) => ctx.judge_residues(part, r.modulus(), 'm', r.members(), style),
                None => ctx.judge_not_reducible(part),
            },
            "forms" => companions = ctx.judge_forms(&form)?,
            other => return Err(unknown_part(ctx.rec, other)),
        }
    }
    if companions.is_empty() {
        companions.push(TwoCoefForm::principal(&form));
    }
    let m = form.modulus();
    let primes: Vec<u64> = arith::primes_up_to(ctx.bounds.prime_bound)
        .into_iter()
        .filter(|&p| m % p != 0 && admissible.contains(p as i64))
        .collect();
    let search = ctx.bounds.search_bound;
    let misses: Vec<u64> = primes
        .par_iter()
        .copied()
        .filter(|&p| {
            !companions
                .iter()
                .any(|f| represent::represent(p, f, search).is_some_and(|w| w.holds()))
        })
        .collect();
    ctx.samples
        .insert("primes_checked".into(), primes.len() as u64);
    ctx.computed.insert(
        "completeness".into(),
        json!({"primes_checked": primes.len(), "without_witness": misses}),
    );
    let diffs = misses
        .iter()
        .map(|p| diff("completeness", format!("{p} is represented"), "no witness"))
        .collect();
    ctx.push("completeness", capped("completeness", diffs), None);
    Ok(())
}

fn set_label(v: &[u64]) -> String {
    let body: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("{{{}}}", body.join(", "))
}

/// Group classes must together be exactly the admissible set.
fn check_group_cover(ctx: &mut Ctx, admissible: &ResidueClassSet, part: &str) -> Vec<Diff> {
    let groups = ctx.rec.groups.as_deref().unwrap_or_default();
    let m = admissible.modulus();
    let claimed: BTreeSet<u64> = groups
        .iter()
        .flat_map(|g| g.classes.iter().map(|c| c % m))
        .collect();
    let truth: BTreeSet<u64> = admissible.members().iter().copied().collect();
    let mut out = Vec::new();
    for c in claimed.difference(&truth) {
        out.push(diff(part, format!("class {c}"), "not admissible"));
    }
    for c in truth.difference(&claimed) {
        out.push(diff(
            part,
            "(absent)",
            format!("admissible class {c} is in no group"),
        ));
    }
    out
}

fn verify_multiplier(ctx: &mut Ctx) -> Result<()> {
    let form = ctx.rec.form()?;
    let admissible = forms::divisor_classes(&form);
    let m = form.modulus();
    let bound = ctx.bounds.survey_bound;
    let smallest =
        represent::class_multiplier_survey(&form, bound, &MultiplierSearch::UpTo(4 * form.n()))?;
    let smallest_map = smallest.map();
    ctx.computed
        .insert("smallest_multiplier".into(), json!(smallest_map));

    let rec = ctx.rec;
    for part in rec.printed.keys() {
        match part.as_str() {
            "classes" => ctx.judge_residues(part, m, 'm', admissible.members(), Style::Plus),
            "identities" => {
                let principal = TwoCoefForm::principal(&form).label();
                let mut diffs = Vec::new();
                for text in ctx.printed(part) {
                    let parsed = parse::parse_identity(text)
                        .and_then(|(k, item, f)| Some((k, item.residues(m)?, f)));
                    match parsed {
                        Some((k, rs, f)) if rs.len() == 1 && f == principal => {
                            let seen = smallest_map.get(&rs[0]).cloned().unwrap_or_default();
                            if seen != [k] {
                                diffs.push(diff(
                                    part,
                                    text.clone(),
                                    format!("observed k = {}", set_label(&seen)),
                                ));
                            }
                        }
                        _ => diffs.push(diff(part, text.clone(), "unreadable identity")),
                    }
                }
                let corrected = ctx.rec.corrected_part(part).map(|_| false);
                ctx.push(part, diffs, corrected);
            }
            p if INFORMATIONAL.contains(&p) => {}
            other => return Err(unknown_part(ctx.rec, other)),
        }
    }

    let mut diffs = check_group_cover(ctx, &admissible, "groups");
    let mut failures = BTreeSet::new();
    let mut group_out = Vec::new();
    let mut sampled = 0;
    for g in ctx.rec.groups.as_deref().unwrap_or_default() {
        let ks = g.multipliers.clone().unwrap_or_default();
        let s = represent::survey_classes(
            &form,
            &g.classes,
            bound,
            &MultiplierSearch::Among(ks.clone()),
        )?;
        for (class, c) in &s.classes {
            sampled += c.primes_sampled;
            for &p in &c.unrepresented {
                failures.insert(p);
                diffs.push(diff(
                    "groups",
                    format!("{p} ≡ {class}: k ∈ {}", set_label(&ks)),
                    format!("no coprime witness of k·{p} for k ∈ {}", set_label(&ks)),
                ));
            }
        }
        for w in &s.warnings {
            diffs.push(diff("groups", "(sampled class)", w.clone()));
        }
        group_out.push(json!({"multipliers": ks, "observed": s.map()}));
    }
    ctx.samples.insert("survey_primes".into(), sampled);
    ctx.computed.insert("groups".into(), json!(group_out));
    ctx.computed.insert("exceptions".into(), json!(failures));
    let corrected = ctx.corrected_numbers("exceptions", None, &failures);
    ctx.push("groups", diffs, corrected);
    Ok(())
}

fn verify_split(ctx: &mut Ctx) -> Result<()> {
    let form = ctx.rec.form()?;
    let admissible = forms::divisor_classes(&form);
    let m = form.modulus();
    let rec = ctx.rec;
    for part in rec.printed.keys() {
        if !INFORMATIONAL.contains(&part.as_str()) {
            return Err(unknown_part(ctx.rec, part));
        }
    }
    let groups = ctx.rec.groups.clone().unwrap_or_default();
    let mut all_forms: Vec<TwoCoefForm> = Vec::new();
    for label in groups.iter().flat_map(|g| g.forms.iter().flatten()) {
        let f = TwoCoefForm::from_label(label)
            .map_err(|e| Error::catalog(&ctx.rec.id, e.to_string()))?;
        if f.p() * f.q() != form.n() || f.sign() != Sign::Plus {
            return Err(Error::catalog(
                &ctx.rec.id,
                format!("{label} is not a companion of n = {}", form.n()),
            ));
        }
        if !all_forms.contains(&f) {
            all_forms.push(f);
        }
    }
    let mut diffs = check_group_cover(ctx, &admissible, "groups");
    let mut out = Vec::new();
    let mut sampled = 0;
    for g in &groups {
        let k = g.multiplier.unwrap_or(1);
        let allowed: BTreeSet<String> = g
            .forms
            .iter()
            .flatten()
            .map(|l| TwoCoefForm::from_label(l).map(|f| f.label()))
            .collect::<Result<_>>()?;
        let s =
            represent::split_classes(&form, &g.classes, &all_forms, ctx.bounds.survey_bound, k)?;
        for (class, c) in &s.classes {
            sampled += c.primes_sampled;
            let claim = format!(
                "{k}·p, p ≡ {class}: {}",
                allowed.iter().cloned().collect::<Vec<_>>().join(" or ")
            );
            for p in &c.uncovered {
                diffs.push(diff(
                    "groups",
                    claim.clone(),
                    format!("{k}·{p} is represented by none of the forms"),
                ));
            }
            let stray: Vec<&String> = c.forms.difference(&allowed).collect();
            if !stray.is_empty() {
                diffs.push(diff(
                    "groups",
                    claim.clone(),
                    format!("also represented by {stray:?}"),
                ));
            }
            if allowed.len() == 1 && c.mixed {
                diffs.push(diff("groups", claim.clone(), "class is mixed"));
            }
            if let Some(lands) = &g.lands_in {
                let target = (k * class) % m;
                if !lands.contains(&target) {
                    diffs.push(diff(
                        "groups",
                        claim.clone(),
                        format!("{k}·{class} ≡ {target} lies outside the target classes"),
                    ));
                }
            }
        }
        for w in &s.warnings {
            diffs.push(diff("groups", "(sampled class)", w.clone()));
        }
        let who: BTreeMap<u64, Vec<String>> = s
            .classes
            .iter()
            .map(|(c, v)| (*c, v.forms.iter().cloned().collect()))
            .collect();
        out.push(json!({"multiplier": k, "forms": allowed, "represented_by": who}));
    }
    ctx.samples.insert("survey_primes".into(), sampled);
    ctx.computed.insert("groups".into(), json!(out));
    let corrected = ctx.rec.corrected_part("groups").map(|_| false);
    ctx.push("groups", capped("groups", diffs), corrected);
    Ok(())
}

fn verify_reduction(ctx: &mut Ctx) -> Result<()> {
    let sign = ctx
        .rec
        .sign
        .ok_or_else(|| Error::catalog(&ctx.rec.id, "missing sign"))?;
    let residues: BTreeSet<u64> = ctx
        .printed("condition")
        .iter()
        .filter_map(|c| parse::parse_condition(c))
        .collect();
    let claim_reducible = ctx.printed("claim").first().map(String::as_str) == Some("reducible");
    let mut diffs = Vec::new();
    let mut checked = Vec::new();
    let mut four_always = true;
    for n in 1..=ctx.bounds.reduction_max_n {
        let form = FormSpec::new(n, sign)?;
        if form.is_degenerate() {
            continue;
        }
        let reducible = forms::reduced_classes(&form).is_some();
        if n % 4 == 0 {
            four_always &= reducible;
        }
        if !residues.contains(&(n % 4)) {
            continue;
        }
        checked.push(n);
        if reducible != claim_reducible {
            let word = |b: bool| if b { "reducible" } else { "not reducible" };
            diffs.push(diff(
                "claim",
                format!("n = {n}: {}", word(claim_reducible)),
                word(reducible),
            ));
        }
    }
    ctx.samples.insert("n_checked".into(), checked.len() as u64);
    ctx.computed.insert("checked".into(), json!(checked));
    ctx.computed
        .insert("multiples_of_four_reducible".into(), json!(four_always));
    let corrected = ctx.rec.corrected_part("claim").map(|_| false);
    ctx.push("claim", diffs, corrected);
    Ok(())
}

fn verify_table(ctx: &mut Ctx) -> Result<()> {
    let sign = ctx
        .rec
        .sign
        .ok_or_else(|| Error::catalog(&ctx.rec.id, "missing sign"))?;
    let mut primes = BTreeSet::new();
    let rec = ctx.rec;
    for part in rec.printed.keys() {
        let (p, admit) = table_part(part).ok_or_else(|| unknown_part(ctx.rec, part))?;
        let row = forms::character_row(p, sign)?;
        let truth = if admit {
            &row.plus_classes
        } else {
            &row.minus_classes
        };
        ctx.judge_residues(part, p, 'n', truth, Style::Nearest);
        primes.insert(p);
    }
    // P mod 4n admissible for x² ± n·y² exactly when n mod P is in the row
    let mut diffs = Vec::new();
    let mut pairs = 0;
    for &p in &primes {
        let row = forms::character_row(p, sign)?;
        for n in 1..=ctx.bounds.reduction_max_n {
            if (4 * n) % p == 0 {
                continue;
            }
            pairs += 1;
            let form = FormSpec::new(n, sign)?;
            let lhs = forms::divisor_classes(&form).contains(p as i64);
            let rhs = row.plus_classes.contains(&(n % p));
            if lhs != rhs {
                diffs.push(diff(
                    "consistency",
                    format!("P = {p}, n = {n}"),
                    format!("classes say {lhs}, row says {rhs}"),
                ));
            }
        }
    }
    ctx.samples.insert("consistency_pairs".into(), pairs);
    ctx.push("consistency", capped("consistency", diffs), None);
    Ok(())
}

const SAMPLE_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

fn combinations(k: usize) -> Vec<Vec<u64>> {
    fn go(start: usize, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for (i, &p) in SAMPLE_PRIMES.iter().enumerate().skip(start) {
            cur.push(p);
            go(i + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, &mut Vec::new(), &mut out);
    out
}

/// Whether a count row agrees with `φ(4N)/2` on sample instantiations.
fn count_row_holds(row: &parse::CountRow) -> Result<bool> {
    for ps in combinations(row.odd_primes) {
        let n = ps.iter().product::<u64>() * if row.factor_two { 2 } else { 1 };
        match row.evaluate(&ps) {
            Some(v) if v == forms::note6_count(n)? => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

fn verify_count(ctx: &mut Ctx) -> Result<()> {
    let rec = ctx.rec;
    for part in rec.printed.keys() {
        match part.as_str() {
            "rows" => {
                let mut diffs = Vec::new();
                let mut good = Vec::new();
                for text in ctx.printed(part) {
                    match parse::parse_count_row(text) {
                        Some(row) if count_row_holds(&row)? => good.push(text.clone()),
                        Some(row) => diffs.push(diff(
                            part,
                            text.clone(),
                            format!("N={}: {}", row.shape, row.canonical_formula()),
                        )),
                        None => diffs.push(diff(part, text.clone(), "unreadable row")),
                    }
                }
                let corrected = match ctx.rec.corrected_part(part) {
                    Some(CorrectedPart::Text(rows)) => {
                        let mut ok = true;
                        for r in rows {
                            ok &= match parse::parse_count_row(r) {
                                Some(row) => count_row_holds(&row)?,
                                None => false,
                            };
                        }
                        Some(ok)
                    }
                    Some(_) => Some(false),
                    None => None,
                };
                ctx.computed.insert(part.clone(), json!(good));
                ctx.push(part, diffs, corrected);
            }
            "count" | "formulas" => {
                let form = ctx.rec.form()?;
                let s = forms::divisor_classes(&form);
                let value = if part == "count" || form.sign() == Sign::Plus {
                    s.len()
                } else {
                    s.len() / 2
                };
                let mut diffs = Vec::new();
                for text in ctx.printed(part) {
                    if text.trim().parse::<usize>().ok() != Some(value) {
                        diffs.push(diff(part, text.clone(), value.to_string()));
                    }
                }
                ctx.computed.insert(part.clone(), json!(value));
                let corrected = ctx
                    .rec
                    .corrected_part(part)
                    .map(|c| c == &CorrectedPart::Numbers(vec![value as u64]));
                ctx.push(part, diffs, corrected);
            }
            other => return Err(unknown_part(ctx.rec, other)),
        }
    }
    Ok(())
}

/// Why a family label fails, if it does.
fn family_problem(label: &str, bounds: &Bounds, scans: &mut u64) -> Result<Option<String>> {
    let fam = match NonsquareFamily::from_label(label) {
        Ok(f) => f,
        Err(_) => return Ok(Some("unreadable family".into())),
    };
    if let Err(e) = fam.validate() {
        return Ok(Some(
            e.to_string()
                .trim_start_matches("domain error: ")
                .to_string(),
        ));
    }
    let bound = if fam.variant.is_corollary() {
        bounds.corollary_bound
    } else {
        bounds.scan_bound
    };
    let report = nonsquare::scan_family(&fam, bound)?;
    *scans += report.cells_scanned;
    Ok(report
        .counterexamples
        .first()
        .map(|c| format!("square {} = {}² at {:?}", c.value, c.root, c.assignment)))
}

fn verify_families(ctx: &mut Ctx) -> Result<()> {
    let mut cells = 0u64;
    let rec = ctx.rec;
    for part in rec.printed.keys() {
        match part.as_str() {
            "families" => {
                let mut bad = Vec::new();
                let mut clean = BTreeSet::new();
                let mut ns = BTreeSet::new();
                for label in ctx.printed(part) {
                    if let Ok(f) = NonsquareFamily::from_label(label) {
                        ns.insert(f.n);
                    }
                    match family_problem(label, ctx.bounds, &mut cells)? {
                        Some(why) => bad.push((label.clone(), why)),
                        None => {
                            clean.insert(NonsquareFamily::from_label(label)?.label());
                        }
                    }
                }
                let generated: Option<BTreeSet<String>> = match ctx.rec.sign {
                    Some(sign) => {
                        let mut g = BTreeSet::new();
                        for &n in &ns {
                            for f in nonsquare::generate_families(&FormSpec::new(n, sign)?)? {
                                g.insert(f.label());
                            }
                        }
                        Some(g)
                    }
                    None => None,
                };
                let mut diffs = Vec::new();
                match &generated {
                    Some(g) => {
                        let missing: Vec<String> = g.difference(&clean).cloned().collect();
                        let extra: Vec<String> = clean.difference(g).cloned().collect();
                        let mut bad_labels: Vec<String> = bad.iter().map(|b| b.0.clone()).collect();
                        bad_labels.extend(extra);
                        diffs.extend(pair(part, bad_labels, missing));
                        ctx.computed.insert(part.clone(), json!(g));
                    }
                    None => {
                        for (label, why) in &bad {
                            diffs.push(diff(part, label.clone(), why.clone()));
                        }
                        ctx.computed.insert(part.clone(), json!(clean));
                    }
                }
                let corrected = match ctx.rec.corrected_part(part) {
                    Some(CorrectedPart::Text(labels)) => {
                        let mut ok = true;
                        let mut set = BTreeSet::new();
                        for l in labels {
                            ok &= family_problem(l, ctx.bounds, &mut cells)?.is_none();
                            if let Ok(f) = NonsquareFamily::from_label(l) {
                                set.insert(f.label());
                            }
                        }
                        if let Some(g) = &generated {
                            ok &= &set == g;
                        }
                        Some(ok)
                    }
                    Some(_) => Some(false),
                    None => None,
                };
                ctx.push(part, diffs, corrected);
            }
            p if INFORMATIONAL.contains(&p) => {}
            other => return Err(unknown_part(ctx.rec, other)),
        }
    }
    ctx.samples.insert("cells_scanned".into(), cells);
    Ok(())
}

/// Recomputes one record and judges its printed and corrected payloads.
pub fn verify_theorem(
    record: &TheoremRecord,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let mut ctx = Ctx::new(record, &options.bounds);
    let run = match record.kind {
        ClaimKind::DivisorClasses => verify_classes(&mut ctx, false),
        ClaimKind::ForbiddenClasses => verify_classes(&mut ctx, true),
        ClaimKind::Representation => verify_representation(&mut ctx),
        ClaimKind::Multiplier => verify_multiplier(&mut ctx),
        ClaimKind::Split => verify_split(&mut ctx),
        ClaimKind::Reduction => verify_reduction(&mut ctx),
        ClaimKind::CharacterTable => verify_table(&mut ctx),
        ClaimKind::ClassCount => verify_count(&mut ctx),
        ClaimKind::NonsquareFamily => verify_families(&mut ctx),
    };
    match run {
        Ok(()) => Ok(ctx.finish(options.payload)),
        Err(e @ Error::Catalog { .. }) => Err(e),
        Err(e) => Err(Error::oracle(format!("verification of {}", record.id), e)),
    }
}

/// Verifies every record; reports come back in catalog order.
pub fn verify_all(records: &[TheoremRecord], options: &VerifyOptions) -> Result<AllReport> {
    let run = || -> Result<Vec<VerificationReport>> {
        records
            .par_iter()
            .map(|r| verify_theorem(r, options))
            .collect()
    };
    let reports = match options.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let mut summary = Summary {
        total: reports.len(),
        ..Summary::default()
    };
    for r in &reports {
        match r.status {
            Status::Verified => summary.verified += 1,
            Status::VerifiedWithErrata => summary.verified_with_errata += 1,
            Status::Failed => summary.failed += 1,
        }
    }
    let errata = errata_of(&reports)?;
    Ok(AllReport {
        summary,
        reports,
        errata,
    })
}

/// Every diff, ordered by record identifier.
pub fn errata_of(reports: &[VerificationReport]) -> Result<Vec<Erratum>> {
    let mut keyed: Vec<(RecordId, usize, Erratum)> = Vec::new();
    for r in reports {
        let id: RecordId = r.theorem_id.parse()?;
        for (i, d) in r.diffs.iter().enumerate() {
            keyed.push((
                id.clone(),
                i,
                Erratum {
                    theorem_id: r.theorem_id.clone(),
                    part: d.part.clone(),
                    printed: d.printed.clone(),
                    computed: d.computed.clone(),
                    status: r.status,
                },
            ));
        }
    }
    keyed.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    Ok(keyed.into_iter().map(|k| k.2).collect())
}
