//! Representation witnesses `k·M = p·a² ± q·b²` with coprime `a, b`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::forms::{self, FormSpec, ResidueClassSet, Sign};

pub const DEFAULT_SEARCH_BOUND: u64 = 10_000;

/// The form `p·a² ± q·b²`.
///
/// Plus forms are stored with `p ≤ q`. Minus forms keep the given order,
/// since swapping the coefficients negates every value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwoCoefForm {
    p: u64,
    q: u64,
    sign: Sign,
}

impl TwoCoefForm {
    pub fn new(p: u64, q: u64, sign: Sign) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::domain("form coefficients must be positive"));
        }
        if arith::gcd_u64(p, q) != 1 {
            return Err(Error::domain(format!(
                "coefficients {p} and {q} share a factor"
            )));
        }
        p.checked_mul(q)
            .filter(|&pq| pq <= FormSpec::MAX_N)
            .ok_or_else(|| Error::domain(format!("coefficients {p}·{q} too large")))?;
        let (p, q) = if sign == Sign::Plus && p > q {
            (q, p)
        } else {
            (p, q)
        };
        Ok(TwoCoefForm { p, q, sign })
    }

    pub fn principal(form: &FormSpec) -> Self {
        TwoCoefForm {
            p: 1,
            q: form.n(),
            sign: form.sign(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// The form `x² ± pq·y²` sharing this form's divisor classes.
    pub fn partner(&self) -> FormSpec {
        FormSpec::new(self.p * self.q, self.sign).expect("bounded at construction")
    }

    /// Parses the typeset notation `aa+bb`, `2aa+3bb`, `3aa-bb`.
    pub fn from_label(label: &str) -> Result<Self> {
        let s: String = label
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == '−' { '-' } else { c })
            .collect();
        let bad = || Error::domain(format!("unrecognized form {label:?}"));
        let (left, right, sign) = if let Some((l, r)) = s.split_once('+') {
            (l, r, Sign::Plus)
        } else if let Some((l, r)) = s.split_once('-') {
            (l, r, Sign::Minus)
        } else {
            return Err(bad());
        };
        let coef = |part: &str, var: &str| -> Option<u64> {
            let digits = part.strip_suffix(var)?;
            if digits.is_empty() {
                Some(1)
            } else if digits.bytes().all(|b| b.is_ascii_digit()) {
                digits.parse().ok()
            } else {
                None
            }
        };
        let p = coef(left, "aa").ok_or_else(bad)?;
        let q = coef(right, "bb").ok_or_else(bad)?;
        Self::new(p, q, sign)
    }

    pub fn label(&self) -> String {
        let c = |k: u64| if k == 1 { String::new() } else { k.to_string() };
        format!("{}aa{}{}bb", c(self.p), self.sign.symbol(), c(self.q))
    }

    pub fn value(&self, a: u64, b: u64) -> Option<i128> {
        let pa = (self.p as i128).checked_mul((a as i128).checked_mul(a as i128)?)?;
        let qb = (self.q as i128).checked_mul((b as i128).checked_mul(b as i128)?)?;
        Some(pa + self.sign.as_i64() as i128 * qb)
    }
}

impl fmt::Display for TwoCoefForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationWitness {
    pub value: u64,
    pub multiplier: u64,
    pub a: u64,
    pub b: u64,
    pub form: TwoCoefForm,
}

impl RepresentationWitness {
    /// Rechecks coprimality and the defining equation.
    pub fn holds(&self) -> bool {
        let target = (self.multiplier as i128) * (self.value as i128);
        arith::gcd_u64(self.a, self.b) == 1 && self.form.value(self.a, self.b) == Some(target)
    }

    /// `29 = 3² + 5·2²`, `2·23 = 1² + 5·3²`.
    pub fn render(&self) -> String {
        let lhs = if self.multiplier == 1 {
            self.value.to_string()
        } else {
            format!("{}·{}", self.multiplier, self.value)
        };
        let term = |c: u64, x: u64| {
            if c == 1 {
                format!("{x}²")
            } else {
                format!("{c}·{x}²")
            }
        };
        let op = match self.form.sign {
            Sign::Plus => '+',
            Sign::Minus => '−',
        };
        format!(
            "{lhs} = {} {op} {}",
            term(self.form.p, self.a),
            term(self.form.q, self.b)
        )
    }
}

/// Smallest-`b` witness of `M = p·a² ± q·b²`.
///
/// Plus forms stop once `q·b² > M`; minus forms try `b ≤ search_bound`.
pub fn represent(m: u64, form: &TwoCoefForm, search_bound: u64) -> Option<RepresentationWitness> {
    represent_multiple(m, 1, form, search_bound)
}

pub fn represent_multiple(
    m: u64,
    k: u64,
    form: &TwoCoefForm,
    search_bound: u64,
) -> Option<RepresentationWitness> {
    if m == 0 || k == 0 {
        return None;
    }
    let target = (m as u128).checked_mul(k as u128)?;
    let (p, q) = (form.p as u128, form.q as u128);
    let mut b: u128 = 0;
    loop {
        let qb = q.checked_mul(b * b)?;
        let rest = match form.sign {
            Sign::Plus => {
                if qb > target {
                    return None;
                }
                target - qb
            }
            Sign::Minus => {
                if b > search_bound as u128 {
                    return None;
                }
                target.checked_add(qb)?
            }
        };
        if rest % p == 0 {
            if let Ok(sq) = u64::try_from(rest / p) {
                if let Some(a) = arith::exact_sqrt(sq) {
                    let b64 = b as u64;
                    if arith::gcd_u64(a, b64) == 1 {
                        return Some(RepresentationWitness {
                            value: m,
                            multiplier: k,
                            a,
                            b: b64,
                            form: *form,
                        });
                    }
                }
            }
        }
        b += 1;
    }
}

fn check_multiplier_prime(prime: u64, form: &TwoCoefForm) -> Result<()> {
    if prime < 3
        || !arith::is_prime(prime)
        || form.p.is_multiple_of(prime)
        || form.q.is_multiple_of(prime)
    {
        return Err(Error::domain(format!(
            "{prime} is not an odd prime coprime to the coefficients of {form}"
        )));
    }
    Ok(())
}

/// Smallest `k ≤ cap` with `k·prime` representable.
pub fn smallest_multiplier(
    prime: u64,
    form: &TwoCoefForm,
    cap: u64,
) -> Result<Option<RepresentationWitness>> {
    check_multiplier_prime(prime, form)?;
    Ok((1..=cap).find_map(|k| represent_multiple(prime, k, form, DEFAULT_SEARCH_BOUND)))
}

/// Smallest `k` from `candidates` with `k·prime` representable.
pub fn smallest_multiplier_among(
    prime: u64,
    form: &TwoCoefForm,
    candidates: &[u64],
) -> Result<Option<RepresentationWitness>> {
    check_multiplier_prime(prime, form)?;
    let mut ks: Vec<u64> = candidates.to_vec();
    ks.sort_unstable();
    ks.dedup();
    Ok(ks
        .into_iter()
        .find_map(|k| represent_multiple(prime, k, form, DEFAULT_SEARCH_BOUND)))
}

/// Which multipliers a survey may use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiplierSearch {
    /// Every `k` from 1 to the cap.
    UpTo(u64),
    /// Only the listed `k`, smallest first.
    Among(Vec<u64>),
}

impl MultiplierSearch {
    fn find(&self, prime: u64, form: &TwoCoefForm) -> Result<Option<RepresentationWitness>> {
        match self {
            MultiplierSearch::UpTo(cap) => smallest_multiplier(prime, form, *cap),
            MultiplierSearch::Among(ks) => smallest_multiplier_among(prime, form, ks),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMultipliers {
    pub multipliers: BTreeSet<u64>,
    pub primes_sampled: u64,
    /// Primes for which no allowed multiplier worked.
    pub unrepresented: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierSurvey {
    pub n: u64,
    pub prime_bound: u64,
    pub search: MultiplierSearch,
    pub classes: BTreeMap<u64, ClassMultipliers>,
    pub warnings: Vec<String>,
}

impl MultiplierSurvey {
    /// Class to observed multiplier set.
    pub fn map(&self) -> BTreeMap<u64, Vec<u64>> {
        self.classes
            .iter()
            .map(|(&c, m)| (c, m.multipliers.iter().copied().collect()))
            .collect()
    }
}

/// Every admissible class of the plus form `x² + n·y²`.
pub fn class_multiplier_survey(
    form_n: &FormSpec,
    prime_bound: u64,
    search: &MultiplierSearch,
) -> Result<MultiplierSurvey> {
    let classes = forms::divisor_classes(form_n);
    survey_classes(form_n, classes.members(), prime_bound, search)
}

/// Survey restricted to the given classes mod `4n`.
pub fn survey_classes(
    form_n: &FormSpec,
    classes: &[u64],
    prime_bound: u64,
    search: &MultiplierSearch,
) -> Result<MultiplierSurvey> {
    if form_n.sign() != Sign::Plus {
        return Err(Error::domain(
            "multiplier surveys are defined for plus forms",
        ));
    }
    let m = form_n.modulus();
    let principal = TwoCoefForm::principal(form_n);
    let wanted: BTreeSet<u64> = classes.iter().map(|&c| c % m).collect();
    let primes: Vec<u64> = arith::primes_up_to(prime_bound)
        .into_iter()
        .filter(|p| !m.is_multiple_of(*p) && wanted.contains(&(p % m)))
        .collect();
    let found: Vec<(u64, Option<u64>)> = primes
        .par_iter()
        .map(|&p| Ok((p, search.find(p, &principal)?.map(|w| w.multiplier))))
        .collect::<Result<_>>()?;

    let mut out: BTreeMap<u64, ClassMultipliers> = wanted
        .iter()
        .map(|&c| (c, ClassMultipliers::default()))
        .collect();
    for (p, k) in found {
        let entry = out.get_mut(&(p % m)).expect("filtered to wanted classes");
        entry.primes_sampled += 1;
        match k {
            Some(k) => {
                entry.multipliers.insert(k);
            }
            None => entry.unrepresented.push(p),
        }
    }
    let warnings = out
        .iter()
        .filter(|(_, c)| c.primes_sampled == 0)
        .map(|(r, _)| format!("no primes ≤ {prime_bound} in class {r} mod {m}"))
        .collect();
    Ok(MultiplierSurvey {
        n: form_n.n(),
        prime_bound,
        search: search.clone(),
        classes: out,
        warnings,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSplit {
    /// Labels of every form that represented some sampled prime.
    pub forms: BTreeSet<String>,
    pub primes_sampled: u64,
    /// Primes represented by none of the forms.
    pub uncovered: Vec<u64>,
    /// Some prime had a different set of representing forms than another,
    /// or was represented by more than one form.
    pub mixed: bool,
}

impl ClassSplit {
    pub fn is_exclusive(&self) -> bool {
        self.primes_sampled > 0 && !self.mixed && self.uncovered.is_empty() && self.forms.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSurvey {
    pub n: u64,
    pub forms: Vec<String>,
    pub multiplier: u64,
    pub prime_bound: u64,
    pub classes: BTreeMap<u64, ClassSplit>,
    pub warnings: Vec<String>,
}

impl SplitSurvey {
    pub fn all_exclusive(&self) -> bool {
        self.classes.values().all(ClassSplit::is_exclusive)
    }
}

/// For each admissible class of `x² + n·y²`, which of `forms` represent
/// `multiplier·p` for the primes `p ≤ prime_bound` of that class.
pub fn split_survey(
    n: u64,
    companions: &[TwoCoefForm],
    prime_bound: u64,
    multiplier: u64,
) -> Result<SplitSurvey> {
    let form_n = FormSpec::plus(n)?;
    for c in companions {
        if c.sign != Sign::Plus || c.p * c.q != n {
            return Err(Error::domain(format!(
                "{c} is not a plus companion of n = {n}"
            )));
        }
    }
    let classes = forms::divisor_classes(&form_n);
    split_classes(
        &form_n,
        classes.members(),
        companions,
        prime_bound,
        multiplier,
    )
}

pub fn split_classes(
    form_n: &FormSpec,
    classes: &[u64],
    companions: &[TwoCoefForm],
    prime_bound: u64,
    multiplier: u64,
) -> Result<SplitSurvey> {
    if multiplier == 0 {
        return Err(Error::domain("multiplier must be positive"));
    }
    let m = form_n.modulus();
    let wanted: BTreeSet<u64> = classes.iter().map(|&c| c % m).collect();
    let primes: Vec<u64> = arith::primes_up_to(prime_bound)
        .into_iter()
        .filter(|p| !m.is_multiple_of(*p) && wanted.contains(&(p % m)))
        .collect();
    let hits: Vec<(u64, Vec<usize>)> = primes
        .par_iter()
        .map(|&p| {
            let which = companions
                .iter()
                .enumerate()
                .filter(|(_, f)| {
                    represent_multiple(p, multiplier, f, DEFAULT_SEARCH_BOUND).is_some()
                })
                .map(|(i, _)| i)
                .collect();
            (p, which)
        })
        .collect();

    let mut out: BTreeMap<u64, ClassSplit> =
        wanted.iter().map(|&c| (c, ClassSplit::default())).collect();
    let mut first_seen: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (p, which) in hits {
        let class = p % m;
        let entry = out.get_mut(&class).expect("filtered to wanted classes");
        entry.primes_sampled += 1;
        if which.is_empty() {
            entry.uncovered.push(p);
            continue;
        }
        if which.len() > 1 {
            entry.mixed = true;
        }
        let seen = first_seen.entry(class).or_insert_with(|| which.clone());
        if *seen != which {
            entry.mixed = true;
        }
        for i in which {
            entry.forms.insert(companions[i].label());
        }
    }
    let warnings = out
        .iter()
        .filter(|(_, c)| c.primes_sampled == 0)
        .map(|(r, _)| format!("no primes ≤ {prime_bound} in class {r} mod {m}"))
        .collect();
    Ok(SplitSurvey {
        n: form_n.n(),
        forms: companions.iter().map(TwoCoefForm::label).collect(),
        multiplier,
        prime_bound,
        classes: out,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub form: String,
    pub against: FormSpec,
    pub harvest_bound: u64,
    pub harvested: ResidueClassSet,
    /// Harvested classes outside `divisor_classes(against)`.
    pub outside: Vec<u64>,
    pub holds: bool,
}

/// Harvests odd prime divisors of `p·a² ± q·b²` coprime to `2pq` and checks
/// that their classes are admissible for `x² ± pq·y²`.
pub fn inclusion_check(companion: &TwoCoefForm, harvest_bound: u64) -> Result<InclusionReport> {
    if harvest_bound < 2 {
        return Err(Error::domain("harvest bound must be at least 2"));
    }
    let against = companion.partner();
    let m = against.modulus();
    let mut seen = BTreeSet::new();
    for a in 1..=harvest_bound {
        for b in 1..=harvest_bound {
            if arith::gcd_u64(a, b) != 1 {
                continue;
            }
            let v = companion
                .value(a, b)
                .and_then(|v| u64::try_from(v.abs()).ok())
                .ok_or_else(|| Error::Overflow(format!("{companion} at ({a}, {b})")))?;
            if v == 0 {
                continue;
            }
            let factors = arith::factorize(v)
                .map_err(|e| Error::oracle(format!("harvest of {companion} at ({a}, {b})"), e))?;
            for p in factors {
                if !m.is_multiple_of(p) {
                    seen.insert(p % m);
                }
            }
        }
    }
    let harvested = ResidueClassSet::new(m, seen)?;
    let admissible = forms::divisor_classes(&against);
    let outside: Vec<u64> = harvested
        .members()
        .iter()
        .copied()
        .filter(|&r| !admissible.contains(r as i64))
        .collect();
    Ok(InclusionReport {
        form: companion.label(),
        against,
        harvest_bound,
        harvested,
        holds: outside.is_empty(),
        outside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus(p: u64, q: u64) -> TwoCoefForm {
        TwoCoefForm::new(p, q, Sign::Plus).unwrap()
    }

    fn brute(m: u64, f: &TwoCoefForm, limit: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for b in 0..=limit {
            for a in 0..=limit {
                if arith::gcd_u64(a, b) == 1 && f.value(a, b) == Some(m as i128) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    #[test]
    fn represent_examples() {
        let f5 = plus(1, 5);
        assert_eq!(brute(29, &f5, 10), vec![(3, 2)]);
        let w = represent(29, &f5, 100).unwrap();
        assert_eq!((w.a, w.b), (3, 2));
        assert_eq!(w.render(), "29 = 3² + 5·2²");
        let w = represent(46, &f5, 100).unwrap();
        assert_eq!((w.a, w.b), (1, 3));
        assert!(represent(3, &plus(1, 1), 100).is_none());
        let pell = TwoCoefForm::new(1, 2, Sign::Minus).unwrap();
        let w = represent(7, &pell, 100).unwrap();
        assert_eq!((w.a, w.b), (3, 1));
        assert_eq!(w.render(), "7 = 3² − 2·1²");
    }

    #[test]
    fn smallest_multiplier_examples() {
        let w = smallest_multiplier(3, &plus(1, 11), 44).unwrap().unwrap();
        assert_eq!((w.multiplier, w.a, w.b), (4, 1, 1));
        let w = smallest_multiplier(7, &plus(1, 13), 52).unwrap().unwrap();
        assert_eq!((w.multiplier, w.a, w.b), (2, 1, 1));
        let w = smallest_multiplier(29, &plus(1, 1), 4).unwrap().unwrap();
        assert_eq!((w.multiplier, w.a, w.b), (1, 5, 2));
        // 2·13 = 3² + 17·1², so the unrestricted search stops at 2
        let w = smallest_multiplier(13, &plus(1, 17), 68).unwrap().unwrap();
        assert_eq!((w.multiplier, w.a, w.b), (2, 3, 1));
        let w = smallest_multiplier_among(13, &plus(1, 17), &[1, 9])
            .unwrap()
            .unwrap();
        assert_eq!((w.multiplier, w.a, w.b), (9, 10, 1));
        assert_eq!(100 + 17, 9 * 13);
        assert!(smallest_multiplier(17, &plus(1, 17), 68).is_err());
    }

    #[test]
    fn coprimality_is_enforced_for_multiples() {
        // 9 = 3² + 17·0² has gcd(3, 0) = 3
        assert!(represent_multiple(3, 3, &plus(1, 17), 100).is_none());
        assert!(smallest_multiplier_among(3, &plus(1, 17), &[3])
            .unwrap()
            .is_none());
    }

    #[test]
    fn labels_round_trip() {
        for l in ["aa+bb", "2aa+3bb", "aa-3bb", "3aa-bb", "5aa+6bb"] {
            assert_eq!(TwoCoefForm::from_label(l).unwrap().label(), l);
        }
        assert_eq!(TwoCoefForm::from_label("3bb+2aa").ok(), None);
        assert!(TwoCoefForm::from_label("2aa+5").is_err());
        assert!(TwoCoefForm::from_label("2aa+4bb").is_err());
        assert_eq!(plus(5, 3), plus(3, 5));
        assert_ne!(
            TwoCoefForm::new(3, 1, Sign::Minus).unwrap(),
            TwoCoefForm::new(1, 3, Sign::Minus).unwrap()
        );
    }

    #[test]
    fn survey_n5() {
        let s = class_multiplier_survey(
            &FormSpec::plus(5).unwrap(),
            10_000,
            &MultiplierSearch::UpTo(20),
        )
        .unwrap();
        let want: BTreeMap<u64, Vec<u64>> =
            [(1, vec![1]), (3, vec![2]), (7, vec![2]), (9, vec![1])]
                .into_iter()
                .collect();
        assert_eq!(s.map(), want);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn survey_warns_on_empty_class() {
        let s =
            class_multiplier_survey(&FormSpec::plus(5).unwrap(), 5, &MultiplierSearch::UpTo(20))
                .unwrap();
        assert_eq!(s.warnings.len(), 3);
        assert!(class_multiplier_survey(
            &FormSpec::minus(5).unwrap(),
            100,
            &MultiplierSearch::UpTo(4)
        )
        .is_err());
    }

    #[test]
    fn split_n6() {
        let s = split_survey(6, &[plus(1, 6), plus(2, 3)], 10_000, 1).unwrap();
        let who: BTreeMap<u64, Vec<String>> = s
            .classes
            .iter()
            .map(|(&c, v)| (c, v.forms.iter().cloned().collect()))
            .collect();
        assert_eq!(who[&1], vec!["aa+6bb"]);
        assert_eq!(who[&7], vec!["aa+6bb"]);
        assert_eq!(who[&5], vec!["2aa+3bb"]);
        assert_eq!(who[&11], vec!["2aa+3bb"]);
        assert!(s.all_exclusive());
    }

    #[test]
    fn inclusion_examples() {
        assert!(inclusion_check(&plus(2, 3), 40).unwrap().holds);
        assert!(inclusion_check(&plus(3, 5), 40).unwrap().holds);
        assert!(
            inclusion_check(&TwoCoefForm::new(5, 7, Sign::Minus).unwrap(), 40)
                .unwrap()
                .holds
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn witnesses_hold(m in 1u64..200_000, q in 1u64..40, k in 1u64..10) {
                let f = plus(1, q);
                if let Some(w) = represent_multiple(m, k, &f, DEFAULT_SEARCH_BOUND) {
                    prop_assert!(w.holds());
                }
                let g = TwoCoefForm::new(1, q, Sign::Minus).unwrap();
                if let Some(w) = represent_multiple(m, k, &g, 300) {
                    prop_assert!(w.holds());
                }
            }

            #[test]
            fn represent_finds_constructed_values(a in 0u64..300, b in 0u64..300, q in 1u64..50) {
                prop_assume!(arith::gcd_u64(a, b) == 1);
                let f = plus(1, q);
                let m = a * a + q * b * b;
                let w = represent(m, &f, 0).unwrap();
                prop_assert!(w.b <= b);
                prop_assert!(w.holds());
            }
        }
    }
}
