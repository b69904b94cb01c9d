//! Admissible residue classes of `x² ± N·y²` modulo `4N`.
//!
//! The fast path decides a class `r` by the Kronecker symbol `(D/r)` with
//! `D = -4N` for the plus form and `D = +4N` for the minus form. The divisor
//! harvest in [`divisor_classes_oracle`] is the independent brute-force check.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, SymbolValue};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::domain(format!("unknown sign {other:?}"))),
        }
    }
}

/// The form `x² + sign·n·y²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormSpec {
    n: u64,
    sign: Sign,
}

impl FormSpec {
    /// Largest `n` accepted; keeps `4n` and the harvest values well inside `u64`.
    pub const MAX_N: u64 = 1 << 40;

    pub fn new(n: u64, sign: Sign) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("form needs n >= 1"));
        }
        if n > Self::MAX_N {
            return Err(Error::domain(format!("n = {n} exceeds {}", Self::MAX_N)));
        }
        Ok(FormSpec { n, sign })
    }

    pub fn plus(n: u64) -> Result<Self> {
        Self::new(n, Sign::Plus)
    }

    pub fn minus(n: u64) -> Result<Self> {
        Self::new(n, Sign::Minus)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn modulus(&self) -> u64 {
        4 * self.n
    }

    /// `-4n` for the plus form, `+4n` for the minus form.
    pub fn discriminant(&self) -> i64 {
        -self.sign.as_i64() * 4 * self.n as i64
    }

    /// A minus form with square `n` factors over the integers.
    pub fn is_degenerate(&self) -> bool {
        self.sign == Sign::Minus && arith::is_square(self.n as i64)
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x² {} {}·y²", self.sign.symbol(), self.n)
    }
}

/// A sorted set of odd residues coprime to `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueClassSet {
    modulus: u64,
    members: Vec<u64>,
}

impl ResidueClassSet {
    pub fn new(modulus: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::domain("residue set with modulus 0"));
        }
        let members: BTreeSet<u64> = members.into_iter().collect();
        for &r in &members {
            if r >= modulus {
                return Err(Error::domain(format!("{r} is not reduced mod {modulus}")));
            }
            if r % 2 == 0 || arith::gcd_u64(r, modulus) != 1 {
                return Err(Error::domain(format!(
                    "{r} is not an odd residue coprime to {modulus}"
                )));
            }
        }
        Ok(ResidueClassSet {
            modulus,
            members: members.into_iter().collect(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, value: i64) -> bool {
        let r = (value as i128).rem_euclid(self.modulus as i128) as u64;
        self.members.binary_search(&r).is_ok()
    }

    pub fn is_subset(&self, other: &ResidueClassSet) -> bool {
        self.modulus == other.modulus && self.members.iter().all(|&r| other.contains(r as i64))
    }

    /// Residues in `[1, modulus)` that are odd, coprime and not in `self`.
    pub fn complement(&self) -> ResidueClassSet {
        let members = odd_coprime_residues(self.modulus)
            .into_iter()
            .filter(|r| self.members.binary_search(r).is_err())
            .collect();
        ResidueClassSet {
            modulus: self.modulus,
            members,
        }
    }

    /// The same classes read modulo `modulus / 2`, if every member `r` also
    /// has `r + modulus/2` in the set.
    pub fn halved(&self) -> Option<ResidueClassSet> {
        if !self.modulus.is_multiple_of(4) {
            return None;
        }
        let half = self.modulus / 2;
        let stable = self
            .members
            .iter()
            .all(|&r| self.contains((r + half) as i64));
        if !stable {
            return None;
        }
        let members: BTreeSet<u64> = self.members.iter().map(|&r| r % half).collect();
        Some(ResidueClassSet {
            modulus: half,
            members: members.into_iter().collect(),
        })
    }
}

impl fmt::Display for ResidueClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.members.iter().map(u64::to_string).collect();
        write!(f, "{{{}}} mod {}", body.join(", "), self.modulus)
    }
}

/// Odd residues in `[1, modulus)` coprime to `modulus`.
pub fn odd_coprime_residues(modulus: u64) -> Vec<u64> {
    (1..modulus)
        .step_by(2)
        .filter(|&r| arith::gcd_u64(r, modulus) == 1)
        .collect()
}

pub fn divisor_classes(form: &FormSpec) -> ResidueClassSet {
    let d = form.discriminant();
    let members = odd_coprime_residues(form.modulus())
        .into_iter()
        .filter(|&r| arith::kronecker(d, r).expect("odd positive r") == SymbolValue::PlusOne)
        .collect();
    ResidueClassSet {
        modulus: form.modulus(),
        members,
    }
}

pub fn forbidden_classes(form: &FormSpec) -> ResidueClassSet {
    divisor_classes(form).complement()
}

pub fn reduced_classes(form: &FormSpec) -> Option<ResidueClassSet> {
    divisor_classes(form).halved()
}

/// What a bounded divisor harvest found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Harvest {
    /// Residues mod `4n` of odd prime divisors not dividing `n`.
    pub classes: ResidueClassSet,
    /// Primes dividing `4n` that divide at least one harvested value.
    pub exceptional_primes: Vec<u64>,
    pub pairs: u64,
}

/// Factors `|a² ± n·b²|` over coprime `1 ≤ a, b ≤ bound`.
pub fn harvest(form: &FormSpec, bound: u64) -> Result<Harvest> {
    if bound < 2 {
        return Err(Error::domain("harvest bound must be at least 2"));
    }
    let modulus = form.modulus();
    let n_divisors = arith::prime_divisors(modulus)?;
    let mut classes = BTreeSet::new();
    let mut exceptional = BTreeSet::new();
    let mut pairs = 0u64;
    for a in 1..=bound {
        for b in 1..=bound {
            if arith::gcd_u64(a, b) != 1 {
                continue;
            }
            pairs += 1;
            let v = form_value(form, a, b)?;
            if v == 0 {
                continue;
            }
            let factors = arith::factorize(v)
                .map_err(|e| Error::oracle(format!("harvest of {form} at ({a}, {b})"), e))?;
            for p in factors {
                if n_divisors.contains(&p) {
                    exceptional.insert(p);
                } else {
                    classes.insert(p % modulus);
                }
            }
        }
    }
    Ok(Harvest {
        classes: ResidueClassSet::new(modulus, classes)?,
        exceptional_primes: exceptional.into_iter().collect(),
        pairs,
    })
}

fn form_value(form: &FormSpec, a: u64, b: u64) -> Result<u64> {
    let a2 = (a as i128) * (a as i128);
    let nb2 = (form.n() as i128) * (b as i128) * (b as i128);
    let v = match form.sign() {
        Sign::Plus => a2 + nb2,
        Sign::Minus => (a2 - nb2).abs(),
    };
    u64::try_from(v).map_err(|_| Error::Overflow(format!("{form} at ({a}, {b})")))
}

pub fn divisor_classes_oracle(form: &FormSpec, harvest_bound: u64) -> Result<ResidueClassSet> {
    Ok(harvest(form, harvest_bound)?.classes)
}

/// Predicted size of the admissible set, `φ(4n)/2`.
pub fn note6_count(n: u64) -> Result<u64> {
    if n == 0 || !arith::is_squarefree(n)? {
        return Err(Error::domain(format!(
            "count table needs squarefree n, got {n}"
        )));
    }
    Ok(arith::totient(4 * n)? / 2)
}

pub fn closure_holds(set: &ResidueClassSet) -> bool {
    let m = set.modulus();
    set.members().iter().all(|&x| {
        set.members()
            .iter()
            .all(|&y| set.contains(arith::mulmod(x, y, m) as i64))
    })
}

/// Residues of odd squares and of `a² ± n` (both `a² - n` and `n - a²` for
/// the minus form) that are odd and coprime to `4n`.
pub fn seed_classes(form: &FormSpec) -> ResidueClassSet {
    let m = form.modulus();
    let mi = m as i128;
    let n = form.n() as i128;
    let mut seeds = BTreeSet::new();
    for a in 0..m as i128 {
        let sq = a * a;
        let mut candidates = vec![sq];
        match form.sign() {
            Sign::Plus => candidates.push(sq + n),
            Sign::Minus => {
                candidates.push(sq - n);
                candidates.push(n - sq);
            }
        }
        for c in candidates {
            let r = c.rem_euclid(mi) as u64;
            if r % 2 == 1 && arith::gcd_u64(r, m) == 1 {
                seeds.insert(r);
            }
        }
    }
    ResidueClassSet {
        modulus: m,
        members: seeds.into_iter().collect(),
    }
}

/// For a prime `P`, the residues `N mod P` split by whether `+P` is an
/// admissible class of `x² ± N·y²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterRow {
    pub prime: u64,
    pub sign_of_form: Sign,
    pub plus_classes: Vec<u64>,
    pub minus_classes: Vec<u64>,
}

pub fn character_row(prime: u64, sign_of_form: Sign) -> Result<CharacterRow> {
    if prime < 3 || !arith::is_prime(prime) {
        return Err(Error::domain(format!(
            "character row needs an odd prime, got {prime}"
        )));
    }
    let flip = sign_of_form == Sign::Plus && prime % 4 == 3;
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for r in 1..prime {
        let qr = arith::jacobi(r as i64, prime)? == SymbolValue::PlusOne;
        if qr != flip {
            plus.push(r);
        } else {
            minus.push(r);
        }
    }
    Ok(CharacterRow {
        prime,
        sign_of_form,
        plus_classes: plus,
        minus_classes: minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: u64, v: &[u64]) -> ResidueClassSet {
        ResidueClassSet::new(m, v.iter().copied()).unwrap()
    }

    #[test]
    fn divisor_class_examples() {
        assert_eq!(
            divisor_classes(&FormSpec::plus(5).unwrap()),
            set(20, &[1, 3, 7, 9])
        );
        assert_eq!(divisor_classes(&FormSpec::plus(1).unwrap()), set(4, &[1]));
        assert_eq!(
            divisor_classes(&FormSpec::minus(5).unwrap()),
            set(20, &[1, 9, 11, 19])
        );
        assert_eq!(
            divisor_classes(&FormSpec::minus(2).unwrap()),
            set(8, &[1, 7])
        );
    }

    #[test]
    fn oracle_examples() {
        let h = |n, s, b| divisor_classes_oracle(&FormSpec::new(n, s).unwrap(), b).unwrap();
        assert_eq!(h(2, Sign::Plus, 20), set(8, &[1, 3]));
        assert_eq!(h(1, Sign::Plus, 20), set(4, &[1]));
        assert_eq!(h(6, Sign::Plus, 30), set(24, &[1, 5, 7, 11]));
        assert!(harvest(&FormSpec::plus(2).unwrap(), 1).is_err());
    }

    #[test]
    fn forbidden_examples() {
        assert_eq!(forbidden_classes(&FormSpec::plus(1).unwrap()), set(4, &[3]));
        assert_eq!(
            forbidden_classes(&FormSpec::plus(5).unwrap()),
            set(20, &[11, 13, 17, 19])
        );
        assert_eq!(
            forbidden_classes(&FormSpec::minus(7).unwrap()),
            set(28, &[5, 11, 13, 15, 17, 23])
        );
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(
            reduced_classes(&FormSpec::plus(3).unwrap()),
            Some(set(6, &[1]))
        );
        assert_eq!(
            reduced_classes(&FormSpec::plus(7).unwrap()),
            Some(set(14, &[1, 9, 11]))
        );
        assert_eq!(reduced_classes(&FormSpec::plus(5).unwrap()), None);
        assert_eq!(
            reduced_classes(&FormSpec::minus(13).unwrap()),
            Some(set(26, &[1, 3, 9, 17, 23, 25]))
        );
    }

    #[test]
    fn count_examples() {
        assert_eq!(note6_count(105).unwrap(), 48);
        assert_eq!(note6_count(5).unwrap(), 4);
        assert_eq!(note6_count(2).unwrap(), 2);
        assert!(note6_count(12).is_err());
    }

    #[test]
    fn closure_examples() {
        assert!(closure_holds(&set(20, &[1, 3, 7, 9])));
        assert!(closure_holds(&set(4, &[1])));
        assert!(!closure_holds(&set(20, &[11, 13, 17, 19])));
    }

    #[test]
    fn seed_examples() {
        assert_eq!(seed_classes(&FormSpec::plus(2).unwrap()), set(8, &[1, 3]));
        assert_eq!(seed_classes(&FormSpec::plus(5).unwrap()), set(20, &[1, 9]));
        assert_eq!(seed_classes(&FormSpec::plus(1).unwrap()), set(4, &[1]));
    }

    #[test]
    fn character_row_examples() {
        assert_eq!(character_row(3, Sign::Plus).unwrap().plus_classes, vec![2]);
        assert_eq!(
            character_row(11, Sign::Minus).unwrap().plus_classes,
            vec![1, 3, 4, 5, 9]
        );
        assert_eq!(
            character_row(13, Sign::Minus).unwrap().plus_classes,
            vec![1, 3, 4, 9, 10, 12]
        );
        assert!(character_row(2, Sign::Plus).is_err());
        assert!(character_row(9, Sign::Plus).is_err());
    }

    #[test]
    fn degenerate_flag() {
        assert!(FormSpec::minus(1).unwrap().is_degenerate());
        assert!(FormSpec::minus(9).unwrap().is_degenerate());
        assert!(!FormSpec::plus(9).unwrap().is_degenerate());
        assert!(!FormSpec::minus(2).unwrap().is_degenerate());
        assert!(FormSpec::plus(0).is_err());
    }

    #[test]
    fn residue_set_rejects_bad_members() {
        assert!(ResidueClassSet::new(20, [2]).is_err());
        assert!(ResidueClassSet::new(20, [5]).is_err());
        assert!(ResidueClassSet::new(20, [21]).is_err());
        assert_eq!(set(20, &[9, 1, 9]).members(), &[1, 9]);
    }
}
