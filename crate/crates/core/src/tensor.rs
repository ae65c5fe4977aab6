//! Tensor products of sequences, and tensoring with `ℚ_n` through an
//! associated divisibility sequence.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;

use crate::diagram::{BratteliSequence, PeriodicTail};
use crate::error::Result;
use crate::simplicial::{kron_vec, NonMixingMap};
use crate::supernat::SupernaturalNumber;

// how far past the natural start the aligned tail is searched for
const TAIL_SEARCH: usize = 8;

/// `A ⊗ B`, levelwise Kronecker products. Coordinate `(j, j′)` sits at
/// `j·s + j′` where `s` is the rank of `B`.
///
/// A finite factor truncates the result to the shorter presentation. Two
/// periodic factors give a periodic result whose block is the lcm of the two
/// periods, starting where both tails are running.
pub fn tensor_seq(a: &BratteliSequence, b: &BratteliSequence) -> Result<BratteliSequence> {
    let unit = kron_vec(a.base_unit(), b.base_unit());
    if let (Some(ta), Some(tb)) = (a.tail(), b.tail()) {
        let pa = a.len() - ta.start;
        let pb = b.len() - tb.start;
        let period = pa.lcm(&pb);
        let start = ta.start.max(tb.start) - 1;
        if let Some((s, len, types)) = aligned_tail(a, b, start, period) {
            let maps = kron_maps(a, b, s + len + 1)?;
            let tail = PeriodicTail { start: s + 1, types };
            return BratteliSequence::new(unit, maps, Some(tail));
        }
        let maps = kron_maps(a, b, start + period + 1)?;
        return BratteliSequence::new(unit, maps, None);
    }
    let levels = match (a.available_levels(), b.available_levels()) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => unreachable!(),
    };
    BratteliSequence::new(unit, kron_maps(a, b, levels)?, None)
}

fn kron_maps(a: &BratteliSequence, b: &BratteliSequence, levels: usize) -> Result<Vec<NonMixingMap>> {
    let ma = a.maps_upto(levels)?;
    let mb = b.maps_upto(levels)?;
    Ok(ma.iter().zip(&mb).map(|(f, g)| f.kron(g)).collect())
}

/// Finds 0-based `s ≥ start` and a multiple `len` of `period` such that every
/// node at level `s + len` of both factors copies a block node that some node
/// at level `s` also copies. Returns the output types for level `s + len`.
fn aligned_tail(
    a: &BratteliSequence,
    b: &BratteliSequence,
    start: usize,
    period: usize,
) -> Option<(usize, usize, Vec<usize>)> {
    for s in start..start + TAIL_SEARCH * period {
        for k in 1..=TAIL_SEARCH {
            let len = k * period;
            let (Some(fa), Some(fb)) = (representatives(a, s, s + len), representatives(b, s, s + len))
            else {
                continue;
            };
            let rank_b = b.rank_at(s + 1).ok()?;
            let types = fa
                .iter()
                .flat_map(|&x| fb.iter().map(move |&y| x * rank_b + y))
                .collect();
            return Some((s, len, types));
        }
    }
    None
}

/// For each node of 0-based level `to`, a node of level `from` with the same
/// block copy, if every such copy occurs at `from`.
fn representatives(seq: &BratteliSequence, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut u = seq.unroller();
    while u.level() < from {
        u.step();
    }
    let (base_from, copy_from) = u.phase()?;
    while u.level() < to {
        u.step();
    }
    let (base_to, copy_to) = u.phase()?;
    if base_from != base_to {
        return None;
    }
    copy_to
        .iter()
        .map(|c| copy_from.iter().position(|d| d == c))
        .collect()
}

/// `A ⊗ ℚ_n` presented on levels `1..=depth`: map `i` is scaled by
/// `n_{i+1}/n_i` and the unit becomes `n₁·u₁`.
pub fn tensor_qn(a: &BratteliSequence, n: &SupernaturalNumber, depth: usize) -> Result<BratteliSequence> {
    let maps = a.maps_upto(depth)?;
    let ns = n.associated_sequence(depth);
    let scaled = maps
        .iter()
        .enumerate()
        .map(|(i, m)| m.scaled(&(&ns[i + 1] / &ns[i])))
        .collect();
    let unit = a.base_unit().scale(&BigInt::from(ns[0].clone()));
    BratteliSequence::new(unit, scaled, None)
}

/// Ratios `n_{i+1}/n_i` of the associated sequence.
pub fn step_ratios(n: &SupernaturalNumber, depth: usize) -> Vec<BigUint> {
    let ns = n.associated_sequence(depth);
    ns.windows(2).map(|w| &w[1] / &w[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::IntVector;

    fn uhf(k: u64) -> BratteliSequence {
        BratteliSequence::uhf(k)
    }

    #[test]
    fn uhf_times_uhf() {
        let t = tensor_seq(&uhf(2), &uhf(2)).unwrap();
        assert!(t.is_periodic());
        assert_eq!(t.map_at(5).unwrap(), NonMixingMap::scalar(4));
        assert_eq!(t.unit_at(3).unwrap(), IntVector::from_i64s(&[16]));
    }

    #[test]
    fn trivial_factor_is_neutral() {
        let a = BratteliSequence::new(
            IntVector::ones(1),
            vec![NonMixingMap::from_u64s(1, &[0, 0], &[2, 3]).unwrap()],
            None,
        )
        .unwrap();
        let t = tensor_seq(&a, &uhf(1)).unwrap();
        assert_eq!(t, a);
    }

    #[test]
    fn kronecker_by_hand() {
        let a = BratteliSequence::new(
            IntVector::ones(1),
            vec![NonMixingMap::from_u64s(1, &[0, 0], &[2, 3]).unwrap()],
            None,
        )
        .unwrap();
        let b = BratteliSequence::new(IntVector::ones(1), vec![NonMixingMap::scalar(5)], None).unwrap();
        let t = tensor_seq(&a, &b).unwrap();
        assert_eq!(t.ranks(), &[1, 2]);
        assert_eq!(t.maps()[0], NonMixingMap::from_u64s(1, &[0, 0], &[10, 15]).unwrap());
    }

    #[test]
    fn mixed_periods_use_lcm() {
        let a = BratteliSequence::with_repeat(
            IntVector::ones(1),
            vec![NonMixingMap::scalar(2), NonMixingMap::scalar(3)],
            1,
        )
        .unwrap();
        let t = tensor_seq(&a, &uhf(5)).unwrap();
        let tail = t.tail().unwrap();
        assert_eq!(t.len() - tail.start, 2);
        for level in 1..8 {
            let expect = if level % 2 == 1 { 10 } else { 15 };
            assert_eq!(t.map_at(level).unwrap(), NonMixingMap::scalar(expect));
        }
    }

    #[test]
    fn tensor_of_growing_trees_counts_nodes() {
        let bin = BratteliSequence::with_repeat(
            IntVector::ones(1),
            vec![NonMixingMap::from_u64s(1, &[0, 0], &[1, 1]).unwrap()],
            1,
        )
        .unwrap();
        let t = tensor_seq(&bin, &bin).unwrap();
        for level in 1..6 {
            assert_eq!(t.rank_at(level).unwrap(), 1 << (2 * (level - 1)));
        }
    }

    #[test]
    fn tensor_qn_examples() {
        let a = uhf(2);
        assert_eq!(tensor_qn(&a, &SupernaturalNumber::one(), 4).unwrap(), a.unroll(4).unwrap());
        let t = tensor_qn(&a, &"3^inf".parse().unwrap(), 4).unwrap();
        assert!(t.maps().iter().all(|m| *m == NonMixingMap::scalar(6)));
        assert_eq!(t.base_unit(), &IntVector::from_i64s(&[3]));
        let t = tensor_qn(&a, &"2^inf".parse().unwrap(), 2).unwrap();
        assert_eq!(t.base_unit(), &IntVector::from_i64s(&[2]));
    }
}
