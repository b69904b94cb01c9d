//! Exact integer kernel.
//!
//! Everything here works on 64-bit integers and widens to 128 bits for
//! intermediate products. Nothing wraps silently: operations that can leave
//! the 64-bit range return [`Error::Overflow`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default largest trial divisor tried by [`factorize`].
pub const DEFAULT_FACTOR_CEILING: u64 = 1_000_000;

/// Value of a Legendre, Jacobi or Kronecker symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolValue {
    MinusOne,
    Zero,
    PlusOne,
}

impl SymbolValue {
    pub fn as_i8(self) -> i8 {
        match self {
            SymbolValue::MinusOne => -1,
            SymbolValue::Zero => 0,
            SymbolValue::PlusOne => 1,
        }
    }

    /// Interprets a residue `v` mod `p` the way the Euler criterion produces it.
    pub fn from_euler_residue(v: u64, p: u64) -> Option<Self> {
        match v {
            0 => Some(SymbolValue::Zero),
            1 => Some(SymbolValue::PlusOne),
            _ if v == p - 1 => Some(SymbolValue::MinusOne),
            _ => None,
        }
    }

    fn negate(self) -> Self {
        match self {
            SymbolValue::MinusOne => SymbolValue::PlusOne,
            SymbolValue::Zero => SymbolValue::Zero,
            SymbolValue::PlusOne => SymbolValue::MinusOne,
        }
    }
}

impl std::ops::Mul for SymbolValue {
    type Output = SymbolValue;

    fn mul(self, rhs: SymbolValue) -> SymbolValue {
        match (self, rhs) {
            (SymbolValue::Zero, _) | (_, SymbolValue::Zero) => SymbolValue::Zero,
            (a, b) if a == b => SymbolValue::PlusOne,
            _ => SymbolValue::MinusOne,
        }
    }
}

/// Greatest common divisor of the absolute values; `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod modulus`, with the result in `[0, modulus)`.
pub fn modpow(base: i64, exp: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return Err(Error::domain("modpow with modulus 0"));
    }
    let base = (base as i128).rem_euclid(modulus as i128) as u64;
    Ok(modpow_u64(base, exp, modulus))
}

pub(crate) fn modpow_u64(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, modulus);
        }
        base = mulmod(base, base, modulus);
        exp >>= 1;
    }
    acc
}

/// Jacobi symbol `(a/n)` for odd `n ≥ 1`.
pub fn jacobi(a: i64, n: u64) -> Result<SymbolValue> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "jacobi symbol needs an odd positive modulus, got {n}"
        )));
    }
    let mut a = (a as i128).rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut result = SymbolValue::PlusOne;
    while a != 0 {
        let twos = a.trailing_zeros();
        a >>= twos;
        // (2/n) = -1 exactly when n ≡ 3, 5 (mod 8)
        if twos % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = result.negate();
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = result.negate();
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    Ok(if n == 1 { result } else { SymbolValue::Zero })
}

/// Kronecker symbol `(d/r)` for odd `r ≥ 1`.
///
/// Negative `d` is split as `(-1/r)·(|d|/r)` with `(-1/r) = (-1)^((r-1)/2)`.
pub fn kronecker(d: i64, r: u64) -> Result<SymbolValue> {
    if r == 0 || r.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "kronecker symbol needs an odd positive r, got {r}"
        )));
    }
    let magnitude = d.unsigned_abs();
    let abs_part = jacobi((magnitude % r) as i64, r)?;
    if d >= 0 {
        return Ok(abs_part);
    }
    let minus_one = if r % 4 == 1 {
        SymbolValue::PlusOne
    } else {
        SymbolValue::MinusOne
    };
    Ok(minus_one * abs_part)
}

/// `a^((p-1)/2) mod p` read as a symbol. `p` must be an odd prime.
pub fn euler_criterion(a: i64, p: u64) -> Result<SymbolValue> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::domain(format!(
            "euler criterion needs an odd prime, got {p}"
        )));
    }
    let v = modpow(a, (p - 1) / 2, p)?;
    SymbolValue::from_euler_residue(v, p)
        .ok_or_else(|| Error::domain(format!("{a}^((p-1)/2) mod {p} = {v} is not ±1 or 0")))
}

/// Deterministic primality for every `u64`.
pub fn is_prime(n: u64) -> bool {
    // The first twelve primes are a witness set valid far beyond 2^64.
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = modpow_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The first `count` primes `≡ r (mod modulus)` that do not exceed `bound`.
pub fn primes_in_class(r: i64, modulus: u64, count: usize, bound: u64) -> Result<Vec<u64>> {
    if modulus == 0 {
        return Err(Error::domain("primes_in_class with modulus 0"));
    }
    if gcd(r, modulus as i64) != 1 {
        return Err(Error::domain(format!(
            "class {r} mod {modulus} is not coprime to the modulus"
        )));
    }
    let mut out = Vec::with_capacity(count);
    let mut candidate = (r as i128).rem_euclid(modulus as i128) as u64;
    while out.len() < count && candidate <= bound {
        if is_prime(candidate) {
            out.push(candidate);
        }
        candidate = match candidate.checked_add(modulus) {
            Some(c) => c,
            None => break,
        };
    }
    Ok(out)
}

/// Every prime `≤ bound` in the class `r (mod modulus)`, ascending.
pub fn all_primes_in_class(r: u64, modulus: u64, bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut candidate = r % modulus;
    while candidate <= bound {
        if is_prime(candidate) {
            out.push(candidate);
        }
        candidate += modulus;
    }
    out
}

/// Primes in `[2, hi]` by a plain sieve of Eratosthenes.
pub fn primes_up_to(hi: u64) -> Vec<u64> {
    if hi < 2 {
        return Vec::new();
    }
    let hi = hi as usize;
    let mut composite = vec![false; hi + 1];
    let mut out = Vec::new();
    for i in 2..=hi {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= hi {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Prime factorization by trial division, ascending with multiplicity.
pub fn factorize(n: u64) -> Result<Vec<u64>> {
    factorize_with_ceiling(n, DEFAULT_FACTOR_CEILING)
}

pub fn factorize_with_ceiling(n: u64, ceiling: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::domain("factorize(0)"));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    while rest.is_multiple_of(2) {
        factors.push(2);
        rest /= 2;
    }
    let mut d = 3u64;
    while (d as u128) * (d as u128) <= rest as u128 {
        if d > ceiling {
            return Err(Error::FactorCeiling { value: n, ceiling });
        }
        while rest.is_multiple_of(d) {
            factors.push(d);
            rest /= d;
        }
        d += 2;
    }
    if rest > 1 {
        factors.push(rest);
    }
    Ok(factors)
}

/// Distinct prime factors, ascending.
pub fn prime_divisors(n: u64) -> Result<Vec<u64>> {
    let mut f = factorize(n)?;
    f.dedup();
    Ok(f)
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    let f = factorize(n)?;
    Ok(f.windows(2).all(|w| w[0] != w[1]))
}

/// The totient φ(n).
pub fn totient(n: u64) -> Result<u64> {
    let mut phi = n;
    for p in prime_divisors(n)? {
        phi = phi / p * (p - 1);
    }
    Ok(phi)
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    // the float estimate can be off by one in either direction near 2^64
    while (x as u128) * (x as u128) > n as u128 {
        x -= 1;
    }
    while ((x + 1) as u128) * ((x + 1) as u128) <= n as u128 {
        x += 1;
    }
    x
}

pub fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n as u64);
    r * r == n as u64
}

/// Square root of `n` when it is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = isqrt(n);
    (r as u128 * r as u128 == n as u128).then_some(r)
}
