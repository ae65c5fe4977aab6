//! Simplicial groups `ℤ^r` with the coordinatewise cone, and positive
//! non-mixing homomorphisms between them.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of `ℤ^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        Self(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        Self(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        Self(vec![BigInt::zero(); rank])
    }

    pub fn ones(rank: usize) -> Self {
        Self(vec![BigInt::one(); rank])
    }

    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[i] = BigInt::one();
        v
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    /// Order-units of `ℤ^r` are exactly the vectors with all entries `≥ 1`.
    pub fn is_order_unit(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|x| x.is_positive())
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    pub fn check_rank(&self, expected: usize) -> Result<()> {
        if self.rank() != expected {
            return Err(Error::RankMismatch { expected, found: self.rank() });
        }
        Ok(())
    }

    /// Coordinatewise `self ≤ other`.
    pub fn le(&self, other: &Self) -> Result<bool> {
        other.check_rank(self.rank())?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self(self.0.iter().map(|x| x * k).collect())
    }

    pub fn restrict(&self, keep: &[usize]) -> Self {
        Self(keep.iter().map(|&i| self.0[i].clone()).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Decides `∀ n ≥ 1: n·x ≤ y` coordinatewise.
///
/// Per coordinate this holds iff `x_i < 0 ∧ x_i ≤ y_i` or `x_i = 0 ∧ y_i ≥ 0`.
pub fn forall_n_leq(x: &IntVector, y: &IntVector) -> Result<bool> {
    y.check_rank(x.rank())?;
    Ok(x.0.iter().zip(&y.0).all(|(xi, yi)| {
        if xi.is_negative() {
            xi <= yi
        } else if xi.is_zero() {
            !yi.is_negative()
        } else {
            false
        }
    }))
}

/// A positive non-mixing homomorphism `ℤ^r → ℤ^s`,
/// `x ↦ (k₁ x_{i₁}, …, k_s x_{i_s})`.
///
/// Parent indices are 0-based here; the text format uses 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NonMixingMap {
    source_rank: usize,
    parent: Vec<usize>,
    mult: Vec<BigUint>,
}

impl NonMixingMap {
    pub fn new(source_rank: usize, parent: Vec<usize>, mult: Vec<BigUint>) -> Result<Self> {
        if parent.len() != mult.len() {
            return Err(Error::RankMismatch { expected: parent.len(), found: mult.len() });
        }
        if source_rank == 0 || parent.is_empty() {
            return Err(Error::RankMismatch { expected: 1, found: 0 });
        }
        if let Some(&bad) = parent.iter().find(|&&p| p >= source_rank) {
            return Err(Error::RankMismatch { expected: source_rank, found: bad + 1 });
        }
        if let Some(row) = mult.iter().position(|k| k.is_zero()) {
            return Err(Error::NotNonMixing { row: row + 1, nonzero: 0 });
        }
        Ok(Self { source_rank, parent, mult })
    }

    pub fn from_u64s(source_rank: usize, parent: &[usize], mult: &[u64]) -> Result<Self> {
        Self::new(source_rank, parent.to_vec(), mult.iter().map(|&k| BigUint::from(k)).collect())
    }

    pub fn identity(rank: usize) -> Self {
        Self {
            source_rank: rank,
            parent: (0..rank).collect(),
            mult: vec![BigUint::one(); rank],
        }
    }

    /// `x ↦ k·x` on `ℤ¹`.
    pub fn scalar(k: u64) -> Self {
        Self::from_u64s(1, &[0], &[k]).expect("scalar must be positive")
    }

    /// Reads a matrix acting on column vectors: row `j` must have exactly one
    /// nonzero entry `k_j > 0`, at column `i_j`.
    pub fn from_matrix(rows: &[Vec<BigInt>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut parent = Vec::with_capacity(rows.len());
        let mut mult = Vec::with_capacity(rows.len());
        for (j, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::RankMismatch { expected: cols, found: row.len() });
            }
            let nonzero: Vec<usize> = (0..cols).filter(|&c| !row[c].is_zero()).collect();
            if nonzero.len() != 1 {
                return Err(Error::NotNonMixing { row: j + 1, nonzero: nonzero.len() });
            }
            let c = nonzero[0];
            if row[c].is_negative() {
                return Err(Error::NotPositive { row: j + 1, column: c + 1 });
            }
            parent.push(c);
            mult.push(row[c].magnitude().clone());
        }
        Self::new(cols, parent, mult)
    }

    pub fn from_i64_matrix(rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_matrix(&rows)
    }

    pub fn to_matrix(&self) -> Vec<Vec<BigInt>> {
        self.parent
            .iter()
            .zip(&self.mult)
            .map(|(&p, k)| {
                let mut row = vec![BigInt::zero(); self.source_rank];
                row[p] = BigInt::from(k.clone());
                row
            })
            .collect()
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self) -> &[usize] {
        &self.parent
    }

    pub fn mult(&self) -> &[BigUint] {
        &self.mult
    }

    pub fn apply(&self, x: &IntVector) -> Result<IntVector> {
        x.check_rank(self.source_rank)?;
        Ok(IntVector(
            self.parent
                .iter()
                .zip(&self.mult)
                .map(|(&p, k)| &x.0[p] * BigInt::from(k.clone()))
                .collect(),
        ))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &NonMixingMap) -> Result<NonMixingMap> {
        if inner.target_rank() != self.source_rank {
            return Err(Error::RankMismatch {
                expected: self.source_rank,
                found: inner.target_rank(),
            });
        }
        let parent = self.parent.iter().map(|&m| inner.parent[m]).collect();
        let mult = self
            .parent
            .iter()
            .zip(&self.mult)
            .map(|(&m, k)| k * &inner.mult[m])
            .collect();
        Ok(NonMixingMap { source_rank: inner.source_rank, parent, mult })
    }

    pub fn push_unit(&self, u: &IntVector) -> Result<IntVector> {
        u.check_rank(self.source_rank)?;
        if !u.is_order_unit() {
            return Err(Error::NotOrderUnit);
        }
        self.apply(u)
    }

    /// Injective iff every source coordinate is some target's parent.
    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.source_rank];
        for &p in &self.parent {
            hit[p] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// `k · self`.
    pub fn scaled(&self, k: &BigUint) -> NonMixingMap {
        assert!(!k.is_zero(), "scaling by zero leaves the positive maps");
        NonMixingMap {
            source_rank: self.source_rank,
            parent: self.parent.clone(),
            mult: self.mult.iter().map(|m| m * k).collect(),
        }
    }

    /// Kronecker product; pair `(j, j′)` sits at index `j·s′ + j′`.
    pub fn kron(&self, other: &NonMixingMap) -> NonMixingMap {
        let mut parent = Vec::with_capacity(self.target_rank() * other.target_rank());
        let mut mult = Vec::with_capacity(parent.capacity());
        for (&p, k) in self.parent.iter().zip(&self.mult) {
            for (&q, l) in other.parent.iter().zip(&other.mult) {
                parent.push(p * other.source_rank + q);
                mult.push(k * l);
            }
        }
        NonMixingMap { source_rank: self.source_rank * other.source_rank, parent, mult }
    }
}

/// Elementary tensor `x ⊗ y` under the row-major pairing convention.
pub fn kron_vec(x: &IntVector, y: &IntVector) -> IntVector {
    IntVector(x.0.iter().flat_map(|a| y.0.iter().map(move |b| a * b)).collect())
}
