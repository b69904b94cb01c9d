//! Families of integers that are never perfect squares, and bounded scans
//! that test them.
//!
//! Two-variable families are `4N·mn + A(m+n)` (sum) and `4N·mn ± A(m−n)`
//! (difference). Three-variable families are the corollaries `4abc−b−c`,
//! `2abc−b−c`, `2abc−b+c` and `2abc±c+b`, each with its side conditions.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::forms::{self, FormSpec, Sign};

pub const DEFAULT_SCAN_BOUND: u64 = 300;
pub const DEFAULT_COROLLARY_BOUND: u64 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `4N·mn + A(m+n)`
    Sum,
    /// `4N·mn ± A(m−n)`
    Difference,
    /// `4abc − b − c`
    Abc4,
    /// `2abc − b − c`
    Abc2Minus,
    /// `2abc − b + c`
    Abc2Mixed,
    /// `2abc ± c + b`
    Abc2Pm,
}

impl Variant {
    pub fn arity(self) -> usize {
        match self {
            Variant::Sum | Variant::Difference => 2,
            _ => 3,
        }
    }

    pub fn is_corollary(self) -> bool {
        self.arity() == 3
    }
}

/// Side conditions on the scan variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// `gcd(m, A) = gcd(n, A) = 1`
    CoprimeToCoefficient,
    /// `m ≠ n`
    Distinct,
    /// `a` odd
    AOdd,
    /// `b ≡ 3` or `c ≡ 3 (mod 4)`
    BOrCThreeMod4,
    /// `b ≡ 1` or `b ≡ 2 (mod 4)`
    BOneOrTwoMod4,
    /// `b ≡ 2` or `b ≡ 3 (mod 4)`
    BTwoOrThreeMod4,
}

impl Condition {
    fn holds(self, v: &[i64], coefficient: i64) -> bool {
        match self {
            Condition::CoprimeToCoefficient => v.iter().all(|&x| arith::gcd(x, coefficient) == 1),
            Condition::Distinct => v[0] != v[1],
            Condition::AOdd => v[0] % 2 == 1,
            Condition::BOrCThreeMod4 => v[1] % 4 == 3 || v[2] % 4 == 3,
            Condition::BOneOrTwoMod4 => matches!(v[1] % 4, 1 | 2),
            Condition::BTwoOrThreeMod4 => matches!(v[1] % 4, 2 | 3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsquareFamily {
    /// `N`; zero for the three-variable corollaries.
    pub n: u64,
    /// `A`; signed for sum families, positive for difference families.
    pub coefficient: i64,
    pub variant: Variant,
    /// Signs applied to the `±` term, `[1]`, `[-1]` or `[1, -1]`.
    pub signs: Vec<i8>,
    pub conditions: Vec<Condition>,
}

impl NonsquareFamily {
    /// `4N·mn + A(m+n)`, with `m` and `n` coprime to `A`.
    pub fn sum(n: u64, coefficient: i64) -> Result<Self> {
        Self::two_variable(n, coefficient, Variant::Sum, vec![1])
    }

    /// `4N·mn ± A(m−n)` over the given signs, with `m ≠ n` and both coprime to `A`.
    pub fn difference(n: u64, coefficient: i64, signs: Vec<i8>) -> Result<Self> {
        Self::two_variable(n, coefficient, Variant::Difference, signs)
    }

    fn two_variable(n: u64, coefficient: i64, variant: Variant, signs: Vec<i8>) -> Result<Self> {
        if n == 0 || n > 1 << 30 {
            return Err(Error::domain(format!(
                "family needs 1 <= N <= 2^30, got {n}"
            )));
        }
        if coefficient == 0 {
            return Err(Error::domain("family coefficient must be nonzero"));
        }
        if signs.is_empty() || signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::domain("signs must be a nonempty list of ±1"));
        }
        let mut conditions = vec![Condition::CoprimeToCoefficient];
        if variant == Variant::Difference {
            conditions.push(Condition::Distinct);
        }
        Ok(NonsquareFamily {
            n,
            coefficient,
            variant,
            signs,
            conditions,
        })
    }

    /// One of the three-variable corollaries with its printed conditions.
    pub fn corollary(variant: Variant) -> Result<Self> {
        let (signs, conditions) = match variant {
            Variant::Abc4 => (vec![1], vec![]),
            Variant::Abc2Minus => (vec![1], vec![Condition::BOrCThreeMod4]),
            Variant::Abc2Mixed => (vec![1], vec![Condition::AOdd, Condition::BOneOrTwoMod4]),
            Variant::Abc2Pm => (
                vec![1, -1],
                vec![Condition::AOdd, Condition::BTwoOrThreeMod4],
            ),
            _ => return Err(Error::domain("not a three-variable corollary")),
        };
        Ok(NonsquareFamily {
            n: 0,
            coefficient: 1,
            variant,
            signs,
            conditions,
        })
    }

    /// The same family with the coprimality condition dropped.
    pub fn without_coprimality(mut self) -> Self {
        self.conditions
            .retain(|c| *c != Condition::CoprimeToCoefficient);
        self
    }

    /// Parses labels such as `4mn-(m+n)`, `28mn±13(m-n)`, `2abc±c+b`.
    pub fn from_label(label: &str) -> Result<Self> {
        let s: String = label
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == '−' { '-' } else { c })
            .collect();
        let corollary = match s.as_str() {
            "4abc-b-c" => Some(Variant::Abc4),
            "2abc-b-c" => Some(Variant::Abc2Minus),
            "2abc-b+c" => Some(Variant::Abc2Mixed),
            "2abc±c+b" => Some(Variant::Abc2Pm),
            _ => None,
        };
        if let Some(v) = corollary {
            return Self::corollary(v);
        }
        let bad = || Error::domain(format!("unrecognized family {label:?}"));
        let (head, rest) = s.split_once("mn").ok_or_else(bad)?;
        let four_n: u64 = head.parse().map_err(|_| bad())?;
        if four_n == 0 || !four_n.is_multiple_of(4) {
            return Err(bad());
        }
        let (variant, rest) = if let Some(r) = rest.strip_suffix("(m+n)") {
            (Variant::Sum, r)
        } else if let Some(r) = rest.strip_suffix("(m-n)") {
            (Variant::Difference, r)
        } else {
            return Err(bad());
        };
        let mut chars = rest.chars();
        let op = chars.next().ok_or_else(bad)?;
        let digits = chars.as_str();
        let magnitude: i64 = if digits.is_empty() {
            1
        } else if digits.bytes().all(|b| b.is_ascii_digit()) {
            digits.parse().map_err(|_| bad())?
        } else {
            return Err(bad());
        };
        let n = four_n / 4;
        match (variant, op) {
            (Variant::Sum, '+') => Self::sum(n, magnitude),
            (Variant::Sum, '-') => Self::sum(n, -magnitude),
            (Variant::Difference, '±') => Self::difference(n, magnitude, vec![1, -1]),
            (Variant::Difference, '+') => Self::difference(n, magnitude, vec![1]),
            (Variant::Difference, '-') => Self::difference(n, magnitude, vec![-1]),
            _ => Err(bad()),
        }
    }

    pub fn label(&self) -> String {
        let mag = |a: i64| {
            if a.abs() == 1 {
                String::new()
            } else {
                a.abs().to_string()
            }
        };
        match self.variant {
            Variant::Sum => {
                let op = if self.coefficient < 0 { '-' } else { '+' };
                format!("{}mn{op}{}(m+n)", 4 * self.n, mag(self.coefficient))
            }
            Variant::Difference => {
                let op = match self.signs.as_slice() {
                    [1] => "+",
                    [-1] => "-",
                    _ => "±",
                };
                format!("{}mn{op}{}(m-n)", 4 * self.n, mag(self.coefficient))
            }
            Variant::Abc4 => "4abc-b-c".into(),
            Variant::Abc2Minus => "2abc-b-c".into(),
            Variant::Abc2Mixed => "2abc-b+c".into(),
            Variant::Abc2Pm => "2abc±c+b".into(),
        }
    }

    /// The form whose forbidden classes justify this family.
    pub fn source_form(&self) -> Option<FormSpec> {
        let sign = match self.variant {
            Variant::Sum => Sign::Plus,
            Variant::Difference => Sign::Minus,
            _ => return None,
        };
        FormSpec::new(self.n, sign).ok()
    }

    /// Checks that `A` is odd, coprime to `N`, and lies in a forbidden class.
    pub fn validate(&self) -> Result<()> {
        let Some(form) = self.source_form() else {
            return Ok(());
        };
        let a = self.coefficient;
        if a % 2 == 0 {
            return Err(Error::domain(format!(
                "{}: coefficient {a} is even",
                self.label()
            )));
        }
        if arith::gcd(a, self.n as i64) != 1 {
            return Err(Error::domain(format!(
                "{}: coefficient {a} shares a factor with N = {}",
                self.label(),
                self.n
            )));
        }
        if !forms::forbidden_classes(&form).contains(a) {
            return Err(Error::domain(format!(
                "{}: {a} is not a forbidden class of {form}",
                self.label()
            )));
        }
        Ok(())
    }

    /// Families shifted by `±4N·p` in the coefficient.
    pub fn shifted(&self, p: u64) -> Result<[NonsquareFamily; 2]> {
        if self.variant != Variant::Sum {
            return Err(Error::domain("only sum families shift"));
        }
        let step = (4 * self.n as i64)
            .checked_mul(p as i64)
            .ok_or_else(|| Error::Overflow(format!("shift of {}", self.label())))?;
        Ok([
            Self::sum(self.n, self.coefficient + step)?,
            Self::sum(self.n, self.coefficient - step)?,
        ])
    }

    fn value(&self, v: &[i64], sign: i8) -> i128 {
        let s = sign as i128;
        let [x, y] = [v[0] as i128, v[1] as i128];
        match self.variant {
            Variant::Sum => 4 * self.n as i128 * x * y + self.coefficient as i128 * (x + y),
            Variant::Difference => {
                4 * self.n as i128 * x * y + s * self.coefficient as i128 * (x - y)
            }
            Variant::Abc4 => 4 * x * y * v[2] as i128 - y - v[2] as i128,
            Variant::Abc2Minus => 2 * x * y * v[2] as i128 - y - v[2] as i128,
            Variant::Abc2Mixed => 2 * x * y * v[2] as i128 - y + v[2] as i128,
            Variant::Abc2Pm => 2 * x * y * v[2] as i128 + s * v[2] as i128 + y,
        }
    }

    pub fn admits(&self, v: &[i64]) -> bool {
        self.conditions.iter().all(|c| c.holds(v, self.coefficient))
    }
}

impl fmt::Display for NonsquareFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Sum families for the plus form, difference families for the minus form.
///
/// A plus form gives two per forbidden class `r`: coefficients `r − 4N` and
/// `r`. A minus form gives one `±r` family per forbidden class `r`.
pub fn generate_families(form: &FormSpec) -> Result<Vec<NonsquareFamily>> {
    let forbidden = forms::forbidden_classes(form);
    let m = form.modulus() as i64;
    let mut out = Vec::new();
    match form.sign() {
        Sign::Plus => {
            for &r in forbidden.members().iter().rev() {
                out.push(NonsquareFamily::sum(form.n(), r as i64 - m)?);
                out.push(NonsquareFamily::sum(form.n(), r as i64)?);
            }
        }
        Sign::Minus => {
            for &r in forbidden.members() {
                out.push(NonsquareFamily::difference(
                    form.n(),
                    r as i64,
                    vec![1, -1],
                )?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub assignment: Vec<i64>,
    /// The `±` sign used, when the family has one.
    pub sign: Option<i8>,
    pub value: u64,
    pub root: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub label: String,
    pub family: NonsquareFamily,
    pub bound: u64,
    /// Evaluations made: admissible assignments times signs.
    pub cells_scanned: u64,
    pub negative_values: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl ScanReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Scans every assignment in `[1, bound]` that meets the family's conditions.
pub fn scan_family(family: &NonsquareFamily, bound: u64) -> Result<ScanReport> {
    if bound < 2 {
        return Err(Error::domain("scan bound must be at least 2"));
    }
    let limit = match family.variant.arity() {
        2 => 1 << 24,
        _ => 1 << 16,
    };
    if bound > limit {
        return Err(Error::Overflow(format!(
            "scan of {} at bound {bound} (limit {limit})",
            family.label()
        )));
    }
    let b = bound as i64;
    let partial: Vec<(u64, u64, Vec<Counterexample>)> = (1..=b)
        .into_par_iter()
        .map(|first| {
            let mut cells = 0u64;
            let mut negative = 0u64;
            let mut found = Vec::new();
            let mut visit = |v: &[i64]| -> Result<()> {
                if !family.admits(v) {
                    return Ok(());
                }
                for &s in &family.signs {
                    cells += 1;
                    let value = family.value(v, s);
                    if value < 0 {
                        negative += 1;
                        continue;
                    }
                    let value = i64::try_from(value)
                        .map_err(|_| Error::Overflow(format!("{} at {v:?}", family.label())))?;
                    if arith::is_square(value) {
                        let value = value as u64;
                        let root = arith::isqrt(value);
                        let c = Counterexample {
                            assignment: v.to_vec(),
                            sign: (family.signs.len() > 1).then_some(s),
                            value,
                            root,
                        };
                        debug_assert!(root * root == value && family.admits(&c.assignment));
                        found.push(c);
                    }
                }
                Ok(())
            };
            if family.variant.arity() == 2 {
                for second in 1..=b {
                    visit(&[first, second])?;
                }
            } else {
                for second in 1..=b {
                    for third in 1..=b {
                        visit(&[first, second, third])?;
                    }
                }
            }
            Ok((cells, negative, found))
        })
        .collect::<Result<_>>()?;

    let mut report = ScanReport {
        label: family.label(),
        family: family.clone(),
        bound,
        cells_scanned: 0,
        negative_values: 0,
        counterexamples: Vec::new(),
    };
    for (cells, negative, found) in partial {
        report.cells_scanned += cells;
        report.negative_values += negative;
        report.counterexamples.extend(found);
    }
    report
        .counterexamples
        .sort_by(|x, y| (&x.assignment, x.sign).cmp(&(&y.assignment, y.sign)));
    for c in &report.counterexamples {
        if c.root * c.root != c.value || !family.admits(&c.assignment) {
            return Err(Error::domain(format!(
                "counterexample {c:?} failed re-verification"
            )));
        }
    }
    Ok(report)
}

pub fn scan_corollary(variant: Variant, bound: u64) -> Result<ScanReport> {
    scan_family(&NonsquareFamily::corollary(variant)?, bound)
}
