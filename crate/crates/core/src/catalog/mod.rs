//! The theorem catalog: every record as printed and, where the print is
//! wrong, as corrected, plus the engine that recomputes each claim.

mod parse;
mod verify;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{FormSpec, Sign};

pub use parse::{parse_item, render, Item, Op, Style};
pub use verify::{
    errata_of, verify_all, verify_theorem, AllReport, Bounds, Diff, Erratum, Payload, Status,
    Summary, VerificationReport, VerifyOptions,
};

pub const SCHEMA_VERSION: u64 = 1;

const ASSET: &str = include_str!("../../data/catalog.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    DivisorClasses,
    ForbiddenClasses,
    Representation,
    Multiplier,
    Split,
    Reduction,
    NonsquareFamily,
    CharacterTable,
    ClassCount,
}

impl ClaimKind {
    pub const ALL: [ClaimKind; 9] = [
        ClaimKind::DivisorClasses,
        ClaimKind::ForbiddenClasses,
        ClaimKind::Representation,
        ClaimKind::Multiplier,
        ClaimKind::Split,
        ClaimKind::Reduction,
        ClaimKind::NonsquareFamily,
        ClaimKind::CharacterTable,
        ClaimKind::ClassCount,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimKind::DivisorClasses => "divisor-classes",
            ClaimKind::ForbiddenClasses => "forbidden-classes",
            ClaimKind::Representation => "representation",
            ClaimKind::Multiplier => "multiplier",
            ClaimKind::Split => "split",
            ClaimKind::Reduction => "reduction",
            ClaimKind::NonsquareFamily => "nonsquare-family",
            ClaimKind::CharacterTable => "character-table",
            ClaimKind::ClassCount => "class-count",
        }
    }

    fn needs_form(self) -> bool {
        matches!(
            self,
            ClaimKind::DivisorClasses
                | ClaimKind::ForbiddenClasses
                | ClaimKind::Representation
                | ClaimKind::Multiplier
                | ClaimKind::Split
        )
    }
}

/// A corrected part: residues or text, by part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorrectedPart {
    Numbers(Vec<u64>),
    Text(Vec<String>),
}

/// A column of classes with the multipliers or forms claimed for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub classes: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forms: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lands_in: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremRecord {
    pub id: String,
    pub kind: ClaimKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    /// Part name to items exactly as typeset.
    pub printed: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected: Option<BTreeMap<String, CorrectedPart>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Group>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl TheoremRecord {
    pub fn form(&self) -> Result<FormSpec> {
        match (self.n, self.sign) {
            (Some(n), Some(sign)) => FormSpec::new(n, sign),
            _ => Err(Error::catalog(&self.id, "record has no form")),
        }
    }

    pub fn record_id(&self) -> Result<RecordId> {
        self.id.parse()
    }

    pub fn corrected_part(&self, part: &str) -> Option<&CorrectedPart> {
        self.corrected.as_ref()?.get(part)
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::catalog(&self.id, m));
        self.record_id()?;
        if self.printed.is_empty() {
            return fail("printed payload is empty".into());
        }
        if self.kind.needs_form() {
            let form = self.form()?;
            if self.modulus != Some(form.modulus()) {
                return fail(format!("modulus must be 4n = {}", form.modulus()));
            }
        }
        for (part, value) in self.corrected.iter().flatten() {
            let base = part.split('.').next().unwrap_or(part);
            let printed = self.printed.get(part);
            match (printed, value) {
                (Some(p), CorrectedPart::Text(t)) if p == t => {
                    return fail(format!("corrected {part} repeats the printed text"));
                }
                (Some(p), CorrectedPart::Numbers(v)) if numbers_equal(p, v, self, part) => {
                    return fail(format!("corrected {part} equals the printed residues"));
                }
                (None, CorrectedPart::Numbers(v)) if v.is_empty() => {
                    return fail(format!("corrected {part} is empty"));
                }
                (None, _) if base != "exceptions" => {
                    return fail(format!("corrected {part} has no printed counterpart"));
                }
                _ => {}
            }
        }
        match self.kind {
            ClaimKind::Multiplier => {
                let groups = self.groups.as_deref().unwrap_or_default();
                if groups.is_empty() || groups.iter().any(|g| g.multipliers.is_none()) {
                    return fail("multiplier record needs groups with multipliers".into());
                }
            }
            ClaimKind::Split => {
                let groups = self.groups.as_deref().unwrap_or_default();
                if groups.is_empty() || groups.iter().any(|g| g.forms.is_none()) {
                    return fail("split record needs groups with forms".into());
                }
            }
            ClaimKind::Reduction => {
                if self.sign.is_none() {
                    return fail("reduction record needs a sign".into());
                }
                let conds = self
                    .printed
                    .get("condition")
                    .map(Vec::as_slice)
                    .unwrap_or_default();
                if conds.is_empty() || conds.iter().any(|c| parse::parse_condition(c).is_none()) {
                    return fail("unreadable reduction condition".into());
                }
                match self.printed.get("claim").map(Vec::as_slice) {
                    Some([c]) if c == "reducible" || c == "not reducible" => {}
                    _ => return fail("reduction claim must be reducible or not reducible".into()),
                }
            }
            ClaimKind::CharacterTable => {
                if self.sign.is_none() {
                    return fail("character table needs a sign".into());
                }
                for part in self.printed.keys() {
                    if verify::table_part(part).is_none() {
                        return fail(format!("table part {part:?} is not pP.admit or pP.reject"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Printed items read as numbers equal `v` (every item must parse).
fn numbers_equal(printed: &[String], v: &[u64], rec: &TheoremRecord, part: &str) -> bool {
    let want: BTreeSet<u64> = v.iter().copied().collect();
    if part == "primes" {
        let got: Option<BTreeSet<u64>> = printed.iter().map(|s| s.parse().ok()).collect();
        return got == Some(want);
    }
    let (modulus, var) = match (part, verify::table_part(part), rec.modulus) {
        (_, Some((p, _)), _) => (p, 'n'),
        ("classes", _, Some(m)) => (m, 'm'),
        ("reduced", _, Some(m)) => (m / 2, 'm'),
        _ => return false,
    };
    let mut got = BTreeSet::new();
    for item in printed {
        match parse::parse_item(item, var).and_then(|i| i.residues(modulus)) {
            Some(rs) => got.extend(rs),
            None => return false,
        }
    }
    got == want
}

/// Record identifiers ordered theorems, then notes, then scholia.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RecordId {
    section: u8,
    number: u32,
    suffix: String,
}

impl std::str::FromStr for RecordId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (section, rest) = if let Some(r) = s.strip_prefix("Th") {
            (0, r)
        } else if let Some(r) = s.strip_prefix("Note") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("Scholion") {
            (2, r)
        } else {
            return Err(Error::catalog(s, "unknown identifier prefix"));
        };
        let split = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        let number = rest[..split]
            .parse()
            .map_err(|_| Error::catalog(s, "identifier has no number"))?;
        Ok(RecordId {
            section,
            number,
            suffix: rest[split..].to_string(),
        })
    }
}

impl Ord for RecordId {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.section, self.number, &self.suffix).cmp(&(other.section, other.number, &other.suffix))
    }
}

impl PartialOrd for RecordId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["Th", "Note", "Scholion"][self.section as usize];
        write!(f, "{prefix}{}{}", self.number, self.suffix)
    }
}

#[derive(Deserialize)]
struct Asset {
    schema: u64,
    records: Vec<TheoremRecord>,
}

/// The embedded catalog.
pub fn load_catalog() -> Result<Vec<TheoremRecord>> {
    load_catalog_from_str(ASSET)
}

pub fn load_catalog_from_str(text: &str) -> Result<Vec<TheoremRecord>> {
    let asset: Asset = serde_json::from_str(text).map_err(|e| {
        // name the record being parsed when the error line allows it
        let record = locate_record(text, e.line()).unwrap_or_else(|| "<asset>".into());
        Error::catalog(record, e.to_string())
    })?;
    if asset.schema != SCHEMA_VERSION {
        return Err(Error::catalog(
            "<asset>",
            format!("schema {} is not {SCHEMA_VERSION}", asset.schema),
        ));
    }
    let mut seen = BTreeSet::new();
    for rec in &asset.records {
        rec.validate()?;
        if !seen.insert(rec.id.clone()) {
            return Err(Error::catalog(&rec.id, "duplicate identifier"));
        }
    }
    for t in 1..=59 {
        if !seen.contains(&format!("Th{t}")) {
            return Err(Error::catalog(
                format!("Th{t}"),
                "theorem missing from catalog",
            ));
        }
    }
    Ok(asset.records)
}

fn locate_record(text: &str, line: usize) -> Option<String> {
    text.lines()
        .take(line)
        .filter_map(|l| {
            let at = l.find("\"id\":")?;
            let rest = &l[at + 5..];
            let start = rest.find('"')? + 1;
            let end = rest[start..].find('"')? + start;
            Some(rest[start..end].to_string())
        })
        .last()
}

pub fn find_record<'a>(records: &'a [TheoremRecord], id: &str) -> Option<&'a TheoremRecord> {
    records.iter().find(|r| r.id == id)
}
