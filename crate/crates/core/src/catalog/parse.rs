//! Readers for the typeset notation stored in the asset.

use crate::forms::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Plus,
    Minus,
    PlusMinus,
}

/// One item such as `68m+31`, `44m±5`, `3n-1`, or the malformed `12+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub step: u64,
    pub has_var: bool,
    pub op: Op,
    pub offset: u64,
}

impl Item {
    pub fn offsets(&self) -> Vec<i64> {
        let o = self.offset as i64;
        match self.op {
            Op::Plus => vec![o],
            Op::Minus => vec![-o],
            Op::PlusMinus => vec![o, -o],
        }
    }

    /// Residues mod `modulus`, if the item is well formed for that modulus.
    pub fn residues(&self, modulus: u64) -> Option<Vec<u64>> {
        if !self.has_var || self.step != modulus {
            return None;
        }
        Some(
            self.offsets()
                .into_iter()
                .map(|o| o.rem_euclid(modulus as i64) as u64)
                .collect(),
        )
    }
}

pub fn normalize(text: &str) -> String {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| if c == '−' { '-' } else { c })
        .collect()
}

pub fn parse_item(text: &str, var: char) -> Option<Item> {
    let s = normalize(text);
    let digits_end = s.find(|c: char| !c.is_ascii_digit())?;
    let step: u64 = s[..digits_end].parse().ok()?;
    let mut rest = &s[digits_end..];
    let has_var = rest.starts_with(var);
    if has_var {
        rest = &rest[var.len_utf8()..];
    }
    let mut chars = rest.chars();
    let op = match chars.next()? {
        '+' => Op::Plus,
        '-' => Op::Minus,
        '±' => Op::PlusMinus,
        _ => return None,
    };
    let tail = chars.as_str();
    if tail.is_empty() || !tail.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(Item {
        step,
        has_var,
        op,
        offset: tail.parse().ok()?,
    })
}

/// How computed residues are written back in the typeset style.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// `68m+31`
    Plus,
    /// `56m-5`
    Minus,
    /// `44m±5` for sets symmetric under `r ↦ M − r`
    Paired,
    /// `5n-2`: the offset of least magnitude
    Nearest,
}

impl Style {
    pub fn for_sign(sign: Sign) -> Self {
        match sign {
            Sign::Plus => Style::Plus,
            Sign::Minus => Style::Paired,
        }
    }
}

/// Renders `values` (residues mod `modulus`) as typeset items.
pub fn render(values: &[u64], modulus: u64, var: char, style: Style) -> Vec<String> {
    match style {
        Style::Plus => values
            .iter()
            .map(|r| format!("{modulus}{var}+{r}"))
            .collect(),
        Style::Minus => values
            .iter()
            .map(|r| format!("{modulus}{var}-{}", modulus - r))
            .collect(),
        Style::Nearest => values
            .iter()
            .map(|&r| {
                if 2 * r > modulus {
                    format!("{modulus}{var}-{}", modulus - r)
                } else {
                    format!("{modulus}{var}+{r}")
                }
            })
            .collect(),
        Style::Paired => {
            let mut out = Vec::new();
            let mut done = std::collections::BTreeSet::new();
            for &r in values {
                if done.contains(&r) {
                    continue;
                }
                let mate = (modulus - r) % modulus;
                let low = r.min(mate);
                if values.contains(&mate) {
                    done.insert(mate);
                    out.push(format!("{modulus}{var}±{low}"));
                } else {
                    out.push(format!("{modulus}{var}+{r}"));
                }
                done.insert(r);
            }
            out
        }
    }
}

/// Residues mod 4 named by a condition such as `4n-1` or `oddly even`.
pub fn parse_condition(text: &str) -> Option<u64> {
    match normalize(text).as_str() {
        "4n+1" => Some(1),
        "oddlyeven" => Some(2),
        "4n-1" => Some(3),
        _ => None,
    }
}

/// A count-table row `N=2pq: 2(p-1)(q-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRow {
    pub shape: String,
    pub factor_two: bool,
    pub odd_primes: usize,
    pub coefficient: u64,
    /// Variables `x` entering as `(x-1)`.
    pub factors: Vec<char>,
}

const VARS: [char; 3] = ['p', 'q', 'r'];

pub fn parse_count_row(text: &str) -> Option<CountRow> {
    let s = normalize(text);
    let (lhs, rhs) = s.split_once(':')?;
    let shape = lhs.strip_prefix("N=")?;
    let (factor_two, odd_primes) = match shape {
        "1" => (false, 0),
        "2" => (true, 0),
        _ => {
            let (two, letters) = match shape.strip_prefix('2') {
                Some(rest) => (true, rest),
                None => (false, shape),
            };
            let k = letters.len();
            if k == 0 || k > 3 || letters.chars().ne(VARS[..k].iter().copied()) {
                return None;
            }
            (two, k)
        }
    };
    let (coefficient, mut rest) = match rhs.find(|c: char| !c.is_ascii_digit()) {
        Some(0) => (1, rhs),
        Some(i) => (rhs[..i].parse().ok()?, &rhs[i..]),
        None => (rhs.parse().ok()?, ""),
    };
    let mut factors = Vec::new();
    while !rest.is_empty() {
        let (inner, next) = if let Some(r) = rest.strip_prefix('(') {
            let close = r.find(')')?;
            (&r[..close], &r[close + 1..])
        } else {
            (rest, "")
        };
        let mut cs = inner.chars();
        let v = cs.next()?;
        if !VARS.contains(&v) || cs.as_str() != "-1" {
            return None;
        }
        factors.push(v);
        rest = next;
    }
    Some(CountRow {
        shape: shape.to_string(),
        factor_two,
        odd_primes,
        coefficient,
        factors,
    })
}

impl CountRow {
    pub fn evaluate(&self, primes: &[u64]) -> Option<u64> {
        let mut v = self.coefficient;
        for f in &self.factors {
            let idx = VARS.iter().position(|c| c == f)?;
            v *= primes.get(idx)? - 1;
        }
        Some(v)
    }

    /// The closed form `φ(4N)/2` written for this shape.
    pub fn canonical_formula(&self) -> String {
        if self.odd_primes == 0 {
            return if self.factor_two { "2" } else { "1" }.to_string();
        }
        let body: String = VARS[..self.odd_primes]
            .iter()
            .map(|v| format!("({v}-1)"))
            .collect();
        let lead = if self.factor_two { "2" } else { "" };
        if !self.factor_two && self.odd_primes == 1 {
            return "p-1".to_string();
        }
        format!("{lead}{body}")
    }
}

/// `2(20m+3)=aa+5bb` read as multiplier, class item and form label.
pub fn parse_identity(text: &str) -> Option<(u64, Item, String)> {
    let s = normalize(text);
    let (lhs, form) = s.split_once('=')?;
    let (k, item) = match lhs.find('(') {
        Some(open) => {
            let k: u64 = lhs[..open].parse().ok()?;
            let inner = lhs[open + 1..].strip_suffix(')')?;
            (k, inner)
        }
        None => (1, lhs),
    };
    Some((k, parse_item(item, 'm')?, form.to_string()))
}
