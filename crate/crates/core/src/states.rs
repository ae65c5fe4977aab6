//! Finite-stage state spaces `S(ℤ^r, u)`, the dual maps `S(α)(s) = s ∘ α`,
//! and the finite-depth shadows of the trace simplex.
//!
//! A state on `⟨ℤ^r, u⟩` is stored by its values `p_i` on the standard
//! basis, so `p ≥ 0` and `Σ p_i·u_i = 1`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::diagram::BratteliSequence;
use crate::error::{Error, Result};
use crate::simplicial::{IntVector, NonMixingMap};
use crate::supernat::SupernaturalNumber;
use crate::tensor::tensor_qn;

pub type Rational = BigRational;

fn int(x: &BigInt) -> Rational {
    Rational::from_integer(x.clone())
}

/// A rational vector, written `(1/2, 0, 3)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// `⟨self, u⟩ = Σ p_i·u_i`.
    pub fn pair(&self, u: &IntVector) -> Result<Rational> {
        u.check_rank(self.rank())?;
        Ok(self.0.iter().zip(u.entries()).map(|(p, x)| p * int(x)).sum())
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.0.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl fmt::Display for RationalVector {
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

/// A state on `⟨ℤ^r, u⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateVector {
    p: RationalVector,
    unit: IntVector,
}

impl StateVector {
    pub fn new(p: Vec<Rational>, unit: IntVector) -> Result<Self> {
        let p = RationalVector(p);
        unit.check_rank(p.rank())?;
        if !unit.is_order_unit() {
            return Err(Error::NotOrderUnit);
        }
        if let Some(i) = p.0.iter().position(Signed::is_negative) {
            return Err(Error::NotPositive { row: 1, column: i + 1 });
        }
        if !p.pair(&unit)?.is_one() {
            return Err(Error::NotNormalized);
        }
        Ok(Self { p, unit })
    }

    pub fn values(&self) -> &RationalVector {
        &self.p
    }

    pub fn unit(&self) -> &IntVector {
        &self.unit
    }

    /// Evaluates the state on `x`.
    pub fn eval(&self, x: &IntVector) -> Result<Rational> {
        self.p.pair(x)
    }
}

/// The `r×s` matrix of `S(α)` for a normalized `α: ⟨ℤ^r,u⟩ → ⟨ℤ^s,v⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualMapMatrix {
    rows: Vec<Vec<Rational>>,
    cols: usize,
}

impl DualMapMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::RankMismatch { expected: cols, found: bad.len() });
        }
        Ok(Self { rows, cols })
    }

    pub fn identity(r: usize) -> Self {
        let rows = (0..r)
            .map(|i| (0..r).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Self { rows, cols: r }
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols)
    }

    pub fn apply(&self, t: &RationalVector) -> Result<RationalVector> {
        if t.rank() != self.cols {
            return Err(Error::RankMismatch { expected: self.cols, found: t.rank() });
        }
        Ok(RationalVector(
            self.rows
                .iter()
                .map(|row| row.iter().zip(&t.0).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    pub fn mul(&self, other: &DualMapMatrix) -> Result<DualMapMatrix> {
        if self.cols != other.rows.len() {
            return Err(Error::RankMismatch { expected: self.cols, found: other.rows.len() });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                (0..other.cols)
                    .map(|j| row.iter().zip(&other.rows).map(|(a, orow)| a * &orow[j]).sum())
                    .collect()
            })
            .collect();
        Ok(DualMapMatrix { rows, cols: other.cols })
    }

    pub fn scale(&self, c: &Rational) -> DualMapMatrix {
        DualMapMatrix {
            rows: self.rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect(),
            cols: self.cols,
        }
    }

    /// `Σ_i u_i·D[i][j] = v_j` for every column `j`.
    pub fn transports(&self, u: &IntVector, v: &IntVector) -> bool {
        u.rank() == self.rows.len()
            && v.rank() == self.cols
            && (0..self.cols).all(|j| {
                let s: Rational = self.rows.iter().zip(u.entries()).map(|(row, ui)| &row[j] * int(ui)).sum();
                s == int(&v.entries()[j])
            })
    }
}

/// `S(α)` as a matrix. Requires `α(u) = v`.
pub fn dual_map(alpha: &NonMixingMap, u: &IntVector, v: &IntVector) -> Result<DualMapMatrix> {
    if &alpha.push_unit(u)? != v {
        return Err(Error::NotNormalized);
    }
    let mut rows = vec![vec![Rational::zero(); alpha.target_rank()]; alpha.source_rank()];
    for (j, (&i, k)) in alpha.parent().iter().zip(alpha.mult()).enumerate() {
        rows[i][j] = Rational::from_integer(BigInt::from(k.clone()));
    }
    let d = DualMapMatrix { rows, cols: alpha.target_rank() };
    debug_assert!(d.transports(u, v));
    Ok(d)
}

/// Vertex `i` is `e_i / u_i`.
pub fn simplex_vertices(u: &IntVector) -> Result<Vec<StateVector>> {
    if !u.is_order_unit() {
        return Err(Error::NotOrderUnit);
    }
    (0..u.rank())
        .map(|i| {
            let mut p = vec![Rational::zero(); u.rank()];
            p[i] = Rational::new(BigInt::one(), u.entries()[i].clone());
            StateVector::new(p, u.clone())
        })
        .collect()
}

/// Images at level `base` of the state-simplex vertices of level `depth`,
/// one per vertex (with repetition).
pub fn depth_image_vertices(seq: &BratteliSequence, base: usize, depth: usize) -> Result<Vec<RationalVector>> {
    if base > depth {
        return Err(Error::NonAscending);
    }
    seq.check_level(depth)?;
    let units = seq.units_upto(depth)?;
    let maps = seq.maps_upto(depth)?;
    let mut dual = DualMapMatrix::identity(units[base - 1].rank());
    for i in base - 1..depth - 1 {
        dual = dual.mul(&dual_map(&maps[i], &units[i], &units[i + 1])?)?;
    }
    simplex_vertices(&units[depth - 1])?
        .iter()
        .map(|v| dual.apply(v.values()))
        .collect()
}

/// The distinct images, sorted.
pub fn distinct_image_vertices(seq: &BratteliSequence, base: usize, depth: usize) -> Result<Vec<RationalVector>> {
    let set: BTreeSet<RationalVector> = depth_image_vertices(seq, base, depth)?.into_iter().collect();
    Ok(set.into_iter().collect())
}

/// `φ(s) = s / s(u₂)`.
pub fn restate_unit(p: &StateVector, u2: &IntVector) -> Result<StateVector> {
    let s = p.values().pair(u2)?;
    let q = p.values().0.iter().map(|x| x / &s).collect();
    StateVector::new(q, u2.clone())
}

/// Compares the dual maps of `A ⊗ ℚ_n` with those of `A` conjugated by the
/// scalings `n_i`: `D′_i = (1/n_i)·D_i·n_{i+1}`.
pub fn verify_state_invariance(seq: &BratteliSequence, n: &SupernaturalNumber, depth: usize) -> Result<bool> {
    let tensored = tensor_qn(seq, n, depth)?;
    let ns = n.associated_sequence(depth);
    let units = seq.units_upto(depth)?;
    let units_t = tensored.units_upto(depth)?;
    let maps = seq.maps_upto(depth)?;
    for i in 0..depth - 1 {
        let d = dual_map(&maps[i], &units[i], &units[i + 1])?;
        let dt = dual_map(&tensored.maps()[i], &units_t[i], &units_t[i + 1])?;
        let ratio = Rational::new(BigInt::from(ns[i + 1].clone()), BigInt::from(ns[i].clone()));
        if dt != d.scale(&ratio) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `point` lies in the convex hull of `vertices`, decided by an
/// exact phase-one simplex.
pub fn hull_contains(vertices: &[RationalVector], point: &RationalVector) -> bool {
    if vertices.is_empty() {
        return false;
    }
    let dim = point.rank();
    if vertices.iter().any(|v| v.rank() != dim) {
        return false;
    }
    // Σ λ_k v_k = point, Σ λ_k = 1, λ ≥ 0
    let mut a: Vec<Vec<Rational>> = (0..dim)
        .map(|d| vertices.iter().map(|v| v.0[d].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); vertices.len()]);
    let mut b: Vec<Rational> = point.0.clone();
    b.push(Rational::one());
    feasible(a, b)
}

/// Feasibility of `A x = b, x ≥ 0` via phase one with Bland's rule.
fn feasible(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> bool {
    let m = a.len();
    let n = a[0].len();
    for i in 0..m {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            for x in &mut a[i] {
                *x = -x.clone();
            }
        }
    }
    // tableau columns: n originals, m artificials, then rhs
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs of the objective Σ artificials
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for (c, x) in cost.iter_mut().zip(row) {
            *c -= x;
        }
    }
    for k in n..n + m {
        cost[k] = Rational::zero();
    }
    loop {
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        let piv = t[r][enter].clone();
        for x in &mut t[r] {
            *x /= &piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        let f = cost[enter].clone();
        for (c, p) in cost.iter_mut().zip(&pivot_row) {
            *c -= &f * p;
        }
        basis[r] = enter;
    }
    // objective value is minus the rhs entry of the cost row
    cost[width - 1].is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rv(x: &[(i64, i64)]) -> RationalVector {
        RationalVector(x.iter().map(|&(n, d)| q(n, d)).collect())
    }

    fn v(x: &[i64]) -> IntVector {
        IntVector::from_i64s(x)
    }

    #[test]
    fn dual_map_examples() {
        let f = NonMixingMap::from_u64s(2, &[0, 0, 1], &[2, 3, 1]).unwrap();
        let d = dual_map(&f, &v(&[1, 1]), &v(&[2, 3, 1])).unwrap();
        let p = d.apply(&rv(&[(1, 2), (0, 1), (0, 1)])).unwrap();
        assert_eq!(p, rv(&[(1, 1), (0, 1)]));
        assert!(StateVector::new(p.0, v(&[1, 1])).is_ok());
        let id = dual_map(&NonMixingMap::identity(2), &v(&[2, 5]), &v(&[2, 5])).unwrap();
        assert_eq!(id, DualMapMatrix::identity(2));
        let d = dual_map(&NonMixingMap::scalar(2), &v(&[1]), &v(&[2])).unwrap();
        assert_eq!(d.apply(&rv(&[(1, 2)])).unwrap(), rv(&[(1, 1)]));
        assert_eq!(dual_map(&NonMixingMap::scalar(2), &v(&[1]), &v(&[3])), Err(Error::NotNormalized));
    }

    #[test]
    fn simplex_vertex_examples() {
        let vs = |u: &[i64]| -> Vec<RationalVector> {
            simplex_vertices(&v(u)).unwrap().into_iter().map(|s| s.values().clone()).collect()
        };
        assert_eq!(vs(&[1]), vec![rv(&[(1, 1)])]);
        assert_eq!(vs(&[1, 1]), vec![rv(&[(1, 1), (0, 1)]), rv(&[(0, 1), (1, 1)])]);
        assert_eq!(vs(&[2, 3]), vec![rv(&[(1, 2), (0, 1)]), rv(&[(0, 1), (1, 3)])]);
        assert_eq!(simplex_vertices(&v(&[1, 0])).err(), Some(Error::NotOrderUnit));
    }

    #[test]
    fn depth_images() {
        let uhf = BratteliSequence::uhf(2);
        assert_eq!(distinct_image_vertices(&uhf, 1, 5).unwrap(), vec![rv(&[(1, 1)])]);
        let paths = BratteliSequence::with_repeat(v(&[1, 1]), vec![NonMixingMap::identity(2)], 1).unwrap();
        assert_eq!(
            depth_image_vertices(&paths, 1, 4).unwrap(),
            vec![rv(&[(1, 1), (0, 1)]), rv(&[(0, 1), (1, 1)])]
        );
        let bin = BratteliSequence::with_repeat(v(&[1]), vec![NonMixingMap::from_u64s(1, &[0, 0], &[1, 1]).unwrap()], 1)
            .unwrap();
        let imgs = depth_image_vertices(&bin, 1, 4).unwrap();
        assert_eq!(imgs.len(), 8);
        assert!(imgs.iter().all(|x| *x == rv(&[(1, 1)])));
    }

    #[test]
    fn restate_examples() {
        let p = StateVector::new(vec![q(1, 3), q(1, 3), q(1, 3)], v(&[1, 1, 1])).unwrap();
        assert_eq!(restate_unit(&p, &v(&[1, 1, 1])).unwrap(), p);
        let p = StateVector::new(vec![q(1, 1), q(0, 1)], v(&[1, 1])).unwrap();
        assert_eq!(restate_unit(&p, &v(&[2, 5])).unwrap().values(), &rv(&[(1, 2), (0, 1)]));
        let p = StateVector::new(vec![q(1, 4)], v(&[4])).unwrap();
        assert_eq!(restate_unit(&p, &v(&[7])).unwrap().values(), &rv(&[(1, 7)]));
        assert!(restate_unit(&p, &v(&[7, 1])).is_err());
    }

    #[test]
    fn invariance_examples() {
        let uhf = BratteliSequence::uhf(2);
        assert!(verify_state_invariance(&uhf, &SupernaturalNumber::one(), 4).unwrap());
        assert!(verify_state_invariance(&uhf, &"3^inf".parse().unwrap(), 4).unwrap());
        let tree = BratteliSequence::with_repeat(v(&[1]), vec![NonMixingMap::from_u64s(1, &[0, 0], &[2, 3]).unwrap()], 1)
            .unwrap();
        assert!(verify_state_invariance(&tree, &"2^inf*5^2".parse().unwrap(), 5).unwrap());
    }

    #[test]
    fn hull_membership() {
        let square = [rv(&[(0, 1), (0, 1)]), rv(&[(1, 1), (0, 1)]), rv(&[(0, 1), (1, 1)])];
        assert!(hull_contains(&square, &rv(&[(1, 3), (1, 3)])));
        assert!(hull_contains(&square, &rv(&[(1, 1), (0, 1)])));
        assert!(!hull_contains(&square, &rv(&[(2, 3), (2, 3)])));
        assert!(!hull_contains(&square, &rv(&[(-1, 10), (1, 2)])));
        assert!(!hull_contains(&[], &rv(&[(0, 1)])));
    }
}
