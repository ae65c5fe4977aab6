//! Random instances for property checks, benches and `arch-check`.

use num_bigint::{BigInt, BigUint};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{BratteliSequence, LimitElement, PeriodicTail};
use crate::intertwine::DiagonalMap;
use crate::simplicial::{IntVector, NonMixingMap};
use crate::supernat::{Exponent, SupernaturalNumber};

/// Shape bounds for [`sequence`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_levels: usize,
    pub max_rank: usize,
    pub max_mult: u64,
    pub max_unit: i64,
}

impl Default for Shape {
    fn default() -> Self {
        Self { max_levels: 4, max_rank: 3, max_mult: 4, max_unit: 5 }
    }
}

pub fn map<R: Rng + ?Sized>(rng: &mut R, source: usize, target: usize, max_mult: u64) -> NonMixingMap {
    let parent = (0..target).map(|_| rng.gen_range(0..source)).collect::<Vec<_>>();
    let mult = (0..target).map(|_| rng.gen_range(1..=max_mult)).collect::<Vec<_>>();
    NonMixingMap::from_u64s(source, &parent, &mult).expect("parents in range")
}

/// A surjective map: every source node has at least one child.
pub fn surjective_map<R: Rng + ?Sized>(rng: &mut R, source: usize, target: usize, max_mult: u64) -> NonMixingMap {
    assert!(target >= source);
    let mut parent: Vec<usize> = (0..source).chain((source..target).map(|_| rng.gen_range(0..source))).collect();
    parent.shuffle(rng);
    let mult = (0..target).map(|_| rng.gen_range(1..=max_mult)).collect::<Vec<_>>();
    NonMixingMap::from_u64s(source, &parent, &mult).expect("parents in range")
}

pub fn diagonal<R: Rng + ?Sized>(rng: &mut R, rank: usize, max: u64) -> DiagonalMap {
    let entries: Vec<BigUint> = (0..rank).map(|_| BigUint::from(rng.gen_range(1..=max))).collect();
    DiagonalMap::new(entries).expect("positive entries")
}

pub fn order_unit<R: Rng + ?Sized>(rng: &mut R, rank: usize, max: i64) -> IntVector {
    IntVector::new((0..rank).map(|_| BigInt::from(rng.gen_range(1..=max))).collect())
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, rank: usize, bound: i64) -> IntVector {
    IntVector::new((0..rank).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
}

/// An eventually periodic sequence with random node types in its tail.
/// Draws again when the tail dies out.
pub fn sequence<R: Rng + ?Sized>(rng: &mut R, shape: Shape) -> BratteliSequence {
    loop {
        if let Some(seq) = try_sequence(rng, shape) {
            return seq;
        }
    }
}

fn try_sequence<R: Rng + ?Sized>(rng: &mut R, shape: Shape) -> Option<BratteliSequence> {
    let levels = rng.gen_range(2..=shape.max_levels.max(2));
    let ranks: Vec<usize> = (0..levels).map(|_| rng.gen_range(1..=shape.max_rank)).collect();
    let maps = ranks.windows(2).map(|w| map(rng, w[0], w[1], shape.max_mult)).collect();
    let start = rng.gen_range(1..levels);
    let types = (0..ranks[levels - 1]).map(|_| rng.gen_range(0..ranks[start - 1])).collect();
    let unit = order_unit(rng, ranks[0], shape.max_unit);
    BratteliSequence::new(unit, maps, Some(PeriodicTail { start, types })).ok()
}

/// Like [`sequence`] but with surjective maps and a tail whose types hit
/// every node, so the sequence is injective.
pub fn injective_sequence<R: Rng + ?Sized>(rng: &mut R, shape: Shape) -> BratteliSequence {
    let levels = rng.gen_range(2..=shape.max_levels.max(2));
    let mut ranks = vec![rng.gen_range(1..=shape.max_rank)];
    for _ in 1..levels {
        let prev = *ranks.last().unwrap();
        ranks.push(rng.gen_range(prev..=shape.max_rank.max(prev)));
    }
    let maps = ranks.windows(2).map(|w| surjective_map(rng, w[0], w[1], shape.max_mult)).collect();
    let start = rng.gen_range(1..levels);
    let r = ranks[start - 1];
    let mut types: Vec<usize> = (0..r).chain((r..ranks[levels - 1]).map(|_| rng.gen_range(0..r))).collect();
    types.shuffle(rng);
    let unit = order_unit(rng, ranks[0], shape.max_unit);
    BratteliSequence::new(unit, maps, Some(PeriodicTail { start, types })).expect("consistent shape")
}

/// Products of small primes, some with infinite exponent.
pub fn supernatural<R: Rng + ?Sized>(rng: &mut R) -> SupernaturalNumber {
    let factors = [2u64, 3, 5].into_iter().filter_map(|p| match rng.gen_range(0..4) {
        0 => None,
        1 => Some((p, Exponent::Infinite)),
        e => Some((p, Exponent::Finite(e as u64 - 1))),
    });
    SupernaturalNumber::from_factors(factors.collect::<Vec<_>>()).expect("primes")
}

pub fn element<R: Rng + ?Sized>(rng: &mut R, seq: &BratteliSequence, max_level: usize, bound: i64) -> LimitElement {
    let level = rng.gen_range(1..=max_level);
    let rank = seq.rank_at(level).expect("level in range");
    LimitElement::new(level, vector(rng, rank, bound))
}
