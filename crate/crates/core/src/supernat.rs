//! Supernatural numbers: formal products `∏ p^e` with `e ∈ {1, 2, …} ∪ {∞}`.
//!
//! Each supernatural number `n` indexes the subgroup `ℚ_n ⊆ ℚ` containing 1.
//! The group itself is never materialized; it enters through associated
//! divisibility sequences `n₁ | n₂ | …` used to tensor diagrams.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent of a prime in a supernatural number. Never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exponent {
    Finite(u64),
    Infinite,
}

impl Exponent {
    fn add(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => {
                Exponent::Finite(a.checked_add(b).expect("exponent overflow"))
            }
            _ => Exponent::Infinite,
        }
    }

    /// `min(i, e)` as a plain integer.
    fn capped(self, cap: u64) -> u64 {
        match self {
            Exponent::Finite(e) => e.min(cap),
            Exponent::Infinite => cap,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(e) => write!(f, "{e}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SupernaturalNumber {
    factors: BTreeMap<u64, Exponent>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while (d as u128) * (d as u128) <= n as u128 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while (d as u128) * (d as u128) <= n as u128 {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl SupernaturalNumber {
    /// The empty product.
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_natural(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroNatural);
        }
        let factors = factorize(n)
            .into_iter()
            .map(|(p, e)| (p, Exponent::Finite(e)))
            .collect();
        Ok(Self { factors })
    }

    /// Builds from `(prime, exponent)` pairs; repeated primes multiply.
    pub fn from_factors<I: IntoIterator<Item = (u64, Exponent)>>(factors: I) -> Result<Self> {
        let mut out = Self::one();
        for (p, e) in factors {
            if !is_prime(p) {
                return Err(Error::BadSupernatural(format!("{p} is not prime")));
            }
            if e == Exponent::Finite(0) {
                return Err(Error::BadSupernatural(format!("zero exponent for {p}")));
            }
            out.insert(p, e);
        }
        Ok(out)
    }

    /// `p^∞` for every prime `p` dividing `n`.
    pub fn infinite_power_of(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroNatural);
        }
        let factors = factorize(n)
            .into_iter()
            .map(|(p, _)| (p, Exponent::Infinite))
            .collect();
        Ok(Self { factors })
    }

    fn insert(&mut self, p: u64, e: Exponent) {
        let entry = self.factors.entry(p).or_insert(Exponent::Finite(0));
        *entry = entry.add(e);
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.factors.values().all(|e| matches!(e, Exponent::Finite(_)))
    }

    pub fn exponent(&self, p: u64) -> Option<Exponent> {
        self.factors.get(&p).copied()
    }

    pub fn factors(&self) -> impl Iterator<Item = (u64, Exponent)> + '_ {
        self.factors.iter().map(|(&p, &e)| (p, e))
    }

    /// The value as an ordinary natural number, if every exponent is finite.
    pub fn to_natural(&self) -> Option<BigUint> {
        let mut acc = BigUint::one();
        for (&p, &e) in &self.factors {
            match e {
                Exponent::Finite(e) => acc *= BigUint::from(p).pow(e as u32),
                Exponent::Infinite => return None,
            }
        }
        Some(acc)
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&p, &e) in &other.factors {
            out.insert(p, e);
        }
        out
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.factors
            .iter()
            .all(|(p, e)| other.factors.get(p).is_some_and(|f| e <= f))
    }

    /// Canonical associated sequence `n₁ | n₂ | … | n_L`: step `i` takes the
    /// first `i` primes of `n` (ascending), each with exponent `min(i, e_p)`.
    pub fn associated_sequence(&self, length: usize) -> Vec<BigUint> {
        (1..=length)
            .map(|i| {
                self.factors
                    .iter()
                    .take(i)
                    .fold(BigUint::one(), |acc, (&p, &e)| {
                        acc * BigUint::from(p).pow(e.capped(i as u64) as u32)
                    })
            })
            .collect()
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (idx, (p, e)) in self.factors.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            match e {
                Exponent::Finite(1) => write!(f, "{p}")?,
                e => write!(f, "{p}^{e}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for SupernaturalNumber {
    type Err = Error;

    /// Parses `2^inf*3^2*5`. Composite bases are factored, so `12^inf`
    /// means `2^inf*3^inf`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::BadSupernatural(msg);
        let s = s.trim();
        if s.is_empty() {
            return Err(bad("empty literal".into()));
        }
        let mut out = Self::one();
        for token in s.split('*') {
            let token = token.trim();
            let (base, exp) = match token.split_once('^') {
                Some((b, e)) => (b.trim(), Some(e.trim())),
                None => (token, None),
            };
            let base: u64 = base
                .parse()
                .map_err(|_| bad(format!("invalid base `{base}`")))?;
            if base == 0 {
                return Err(bad("base 0 is not allowed".into()));
            }
            let exp = match exp {
                None => Exponent::Finite(1),
                Some("inf") => Exponent::Infinite,
                Some(e) => match e.parse::<u64>() {
                    Ok(0) | Err(_) => return Err(bad(format!("invalid exponent `{e}`"))),
                    Ok(e) => Exponent::Finite(e),
                },
            };
            for (p, k) in factorize(base) {
                let e = match exp {
                    Exponent::Finite(e) => Exponent::Finite(e * k),
                    Exponent::Infinite => Exponent::Infinite,
                };
                out.insert(p, e);
            }
        }
        Ok(out)
    }
}

impl Serialize for SupernaturalNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SupernaturalNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
