//! Finitely presented Bratteli sequences of simplicial groups with
//! non-mixing connecting maps, and the limit group they present.
//!
//! Levels are numbered from 1. A sequence presents levels `1..=L` with maps
//! `α_i: ℤ^{r_i} → ℤ^{r_{i+1}}`; an optional periodic tail repeats the maps
//! of levels `p..L` forever (see [`PeriodicTail`]), making every later level
//! available by lazy unrolling.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::simplicial::{forall_n_leq, IntVector, NonMixingMap};
use crate::tail::{self, Tail, Unroller};

/// Repetition data: maps `start..L` repeat forever. Node `j` of the last
/// presented level is treated as a copy of node `types[j]` of level `start`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicTail {
    /// 1-based level at which the repeating block begins.
    pub start: usize,
    /// 0-based node of level `start` for every node of the last level.
    pub types: Vec<usize>,
}

impl PeriodicTail {
    /// Default types: identity when ranks close up, constant when the block
    /// starts from a single node.
    pub fn default_types(start_rank: usize, last_rank: usize) -> Option<Vec<usize>> {
        if start_rank == last_rank {
            Some((0..last_rank).collect())
        } else if start_rank == 1 {
            Some(vec![0; last_rank])
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BratteliSequence {
    ranks: Vec<usize>,
    maps: Vec<NonMixingMap>,
    parents: Vec<Vec<usize>>,
    base_unit: IntVector,
    tail: Option<PeriodicTail>,
}

/// An element of the limit group, represented at a level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LimitElement {
    pub level: usize,
    pub vec: IntVector,
}

impl LimitElement {
    pub fn new(level: usize, vec: IntVector) -> Self {
        Self { level, vec }
    }
}

impl BratteliSequence {
    pub fn new(base_unit: IntVector, maps: Vec<NonMixingMap>, tail: Option<PeriodicTail>) -> Result<Self> {
        if !base_unit.is_order_unit() {
            return Err(Error::NotOrderUnit);
        }
        let mut ranks = vec![base_unit.rank()];
        for map in &maps {
            let r = *ranks.last().unwrap();
            if map.source_rank() != r {
                return Err(Error::RankMismatch { expected: r, found: map.source_rank() });
            }
            ranks.push(map.target_rank());
        }
        if let Some(t) = &tail {
            let last = ranks.len();
            if t.start < 1 || t.start >= last {
                return Err(Error::BadRepeat(format!(
                    "repeat level {} must lie in 1..{}",
                    t.start,
                    last.saturating_sub(1)
                )));
            }
            if t.types.len() != ranks[last - 1] {
                return Err(Error::BadRepeat(format!(
                    "{} types given for {} nodes of level {last}",
                    t.types.len(),
                    ranks[last - 1]
                )));
            }
            if t.types.iter().any(|&x| x >= ranks[t.start - 1]) {
                return Err(Error::BadRepeat(format!(
                    "types must name nodes of level {}",
                    t.start
                )));
            }
        }
        let parents = maps.iter().map(|m| m.parent().to_vec()).collect();
        let seq = Self { ranks, maps, parents, base_unit, tail };
        // a tail can die out, leaving empty levels and a zero limit
        if seq.tail.is_some() && !tail::surviving(&seq.ranks, &seq.parents, seq.tail_ref())[0].contains(&true) {
            return Err(Error::EmptyLevel { level: 1 });
        }
        Ok(seq)
    }

    /// Tail with [`PeriodicTail::default_types`].
    pub fn with_repeat(base_unit: IntVector, maps: Vec<NonMixingMap>, start: usize) -> Result<Self> {
        let seq = Self::new(base_unit.clone(), maps.clone(), None)?;
        if start < 1 || start >= seq.len() {
            return Err(Error::BadRepeat(format!("repeat level {start} out of range")));
        }
        let types = PeriodicTail::default_types(seq.ranks[start - 1], seq.ranks[seq.len() - 1])
            .ok_or_else(|| Error::BadRepeat("ranks do not close up; node types are required".into()))?;
        Self::new(base_unit, maps, Some(PeriodicTail { start, types }))
    }

    /// `ℤ --×k--> ℤ --×k--> …` with unit 1.
    pub fn uhf(k: u64) -> Self {
        Self::with_repeat(IntVector::ones(1), vec![NonMixingMap::scalar(k)], 1).unwrap()
    }

    /// Number of presented levels `L`.
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn maps(&self) -> &[NonMixingMap] {
        &self.maps
    }

    pub fn base_unit(&self) -> &IntVector {
        &self.base_unit
    }

    pub fn tail(&self) -> Option<&PeriodicTail> {
        self.tail.as_ref()
    }

    pub fn is_periodic(&self) -> bool {
        self.tail.is_some()
    }

    /// `None` when every level is available.
    pub fn available_levels(&self) -> Option<usize> {
        if self.is_periodic() {
            None
        } else {
            Some(self.len())
        }
    }

    pub(crate) fn parents(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub(crate) fn tail_ref(&self) -> Option<Tail<'_>> {
        self.tail.as_ref().map(|t| Tail { start: t.start - 1, types: &t.types })
    }

    pub(crate) fn unroller(&self) -> Unroller<'_> {
        Unroller::new(&self.ranks, &self.parents, self.tail_ref())
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        let ok = level >= 1 && (self.is_periodic() || level <= self.len());
        if ok {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange { level, available: self.len() })
        }
    }

    /// Connecting maps `α_1, …, α_{n-1}` (unrolled as needed).
    pub fn maps_upto(&self, n: usize) -> Result<Vec<NonMixingMap>> {
        self.check_level(n)?;
        let mut out = Vec::with_capacity(n.saturating_sub(1));
        let mut walk = self.walk();
        while out.len() + 1 < n {
            out.push(walk.advance().expect("level checked"));
        }
        Ok(out)
    }

    pub fn walk(&self) -> Walk<'_> {
        Walk { seq: self, u: self.unroller() }
    }

    fn materialize(&self, source: usize, step: tail::Step) -> NonMixingMap {
        let mult = step.origin.iter().map(|&(m, j)| self.maps[m].mult()[j].clone()).collect();
        NonMixingMap::new(source, step.parents, mult).expect("unrolled map is valid")
    }

    /// `α_level: ℤ^{r_level} → ℤ^{r_{level+1}}`.
    pub fn map_at(&self, level: usize) -> Result<NonMixingMap> {
        self.check_level(level + 1)?;
        Ok(self.maps_upto(level + 1)?.pop().expect("level ≥ 1"))
    }

    pub fn rank_at(&self, level: usize) -> Result<usize> {
        self.check_level(level)?;
        let mut u = self.unroller();
        while u.level() + 1 < level {
            u.step();
        }
        Ok(u.size())
    }

    pub fn ranks_upto(&self, n: usize) -> Result<Vec<usize>> {
        self.check_level(n)?;
        let mut u = self.unroller();
        let mut out = vec![u.size()];
        while out.len() < n {
            u.step();
            out.push(u.size());
        }
        Ok(out)
    }

    /// `α_from^to`; the identity when `from == to`.
    pub fn compose_between(&self, from: usize, to: usize) -> Result<NonMixingMap> {
        if from > to {
            return Err(Error::NonAscending);
        }
        self.check_level(from)?;
        let maps = self.maps_upto(to)?;
        let mut acc = NonMixingMap::identity(self.rank_at(from)?);
        for m in &maps[from - 1..] {
            acc = m.compose(&acc)?;
        }
        Ok(acc)
    }

    pub fn push(&self, x: &IntVector, from: usize, to: usize) -> Result<IntVector> {
        self.compose_between(from, to)?.apply(x)
    }

    /// `u_i = α_1^i(u_1)`.
    pub fn unit_at(&self, level: usize) -> Result<IntVector> {
        self.push(&self.base_unit, 1, level)
    }

    pub fn units_upto(&self, n: usize) -> Result<Vec<IntVector>> {
        let maps = self.maps_upto(n)?;
        let mut out = vec![self.base_unit.clone()];
        for m in &maps {
            let next = m.apply(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }

    /// The first `n` levels as a finite presentation.
    pub fn unroll(&self, n: usize) -> Result<BratteliSequence> {
        let maps = self.maps_upto(n)?;
        BratteliSequence::new(self.base_unit.clone(), maps, None)
    }

    /// Same maps and tail, different order-unit at level 1.
    pub fn with_base_unit(&self, unit: IntVector) -> Result<BratteliSequence> {
        unit.check_rank(self.ranks[0])?;
        BratteliSequence::new(unit, self.maps.clone(), self.tail.clone())
    }

    /// All connecting maps injective. Presented maps suffice: unrolled maps
    /// give every copy the children of the block node it copies.
    pub fn is_injective(&self) -> bool {
        self.maps.iter().all(NonMixingMap::is_injective)
    }

    /// Cofinal subsequence of levels. The result keeps a periodic tail when
    /// the last kept level is phase-aligned with an earlier kept level inside
    /// the presented block; the kept pattern then repeats.
    pub fn telescope(&self, keep: &[usize]) -> Result<BratteliSequence> {
        if keep.first() != Some(&1) || keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonAscending);
        }
        let last_kept = *keep.last().unwrap();
        self.check_level(last_kept)?;
        let maps = self.maps_upto(last_kept)?;
        let mut out_maps = Vec::with_capacity(keep.len() - 1);
        for w in keep.windows(2) {
            let mut acc = NonMixingMap::identity(maps_source_rank(&maps, &self.ranks, w[0]));
            for m in &maps[w[0] - 1..w[1] - 1] {
                acc = m.compose(&acc)?;
            }
            out_maps.push(acc);
        }
        let tail = self.telescoped_tail(keep)?;
        BratteliSequence::new(self.base_unit.clone(), out_maps, tail)
    }

    fn telescoped_tail(&self, keep: &[usize]) -> Result<Option<PeriodicTail>> {
        let Some(t) = &self.tail else { return Ok(None) };
        let last = self.len();
        let period = last - t.start;
        let k_last = *keep.last().unwrap();
        if k_last < last || keep.len() < 2 {
            return Ok(None);
        }
        let Some(s) = (0..keep.len() - 1)
            .rev()
            .find(|&s| keep[s] >= t.start && keep[s] < last && (k_last - keep[s]).is_multiple_of(period))
        else {
            return Ok(None);
        };
        let mut u = self.unroller();
        while u.level() + 1 < k_last {
            u.step();
        }
        let (_, copy) = u.phase().expect("inside the tail");
        Ok(Some(PeriodicTail { start: s + 1, types: copy }))
    }

    /// Deletes coordinates that die in the limit, so every connecting map
    /// becomes injective.
    pub fn injectivize(&self) -> Result<Injectivized> {
        let alive = tail::surviving(&self.ranks, &self.parents, self.tail_ref());
        let mut index: Vec<Vec<Option<usize>>> = Vec::with_capacity(alive.len());
        for (lvl, flags) in alive.iter().enumerate() {
            let mut next = 0;
            let idx: Vec<Option<usize>> = flags
                .iter()
                .map(|&a| {
                    a.then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect();
            if next == 0 {
                return Err(Error::EmptyLevel { level: lvl + 1 });
            }
            index.push(idx);
        }
        let keep0: Vec<usize> = (0..self.ranks[0]).filter(|&i| alive[0][i]).collect();
        let unit = self.base_unit.restrict(&keep0);
        let mut maps = Vec::with_capacity(self.maps.len());
        for (m, map) in self.maps.iter().enumerate() {
            let mut parent = Vec::new();
            let mut mult = Vec::new();
            for (j, &p) in map.parent().iter().enumerate() {
                if let Some(_nj) = index[m + 1][j] {
                    parent.push(index[m][p].expect("parent of a surviving node survives"));
                    mult.push(map.mult()[j].clone());
                }
            }
            let source = index[m].iter().flatten().count();
            maps.push(NonMixingMap::new(source, parent, mult)?);
        }
        let tail = self.tail.as_ref().map(|t| PeriodicTail {
            start: t.start,
            types: t
                .types
                .iter()
                .zip(&alive[self.len() - 1])
                .filter(|(_, &a)| a)
                .map(|(&ty, _)| index[t.start - 1][ty].expect("surviving type"))
                .collect(),
        });
        let seq = BratteliSequence::new(unit, maps, tail)?;
        Ok(Injectivized { seq, inclusions: index, alive })
    }

    /// Survival flags of the coordinates of `level`.
    pub fn surviving_at(&self, level: usize) -> Result<Vec<bool>> {
        self.check_level(level)?;
        let presented = tail::surviving(&self.ranks, &self.parents, self.tail_ref());
        Ok(tail::surviving_at(&self.ranks, &self.parents, self.tail_ref(), &presented, level - 1)
            .expect("level checked"))
    }
}

fn maps_source_rank(maps: &[NonMixingMap], ranks: &[usize], level: usize) -> usize {
    if level == 1 {
        ranks[0]
    } else {
        maps[level - 2].target_rank()
    }
}

/// Level-by-level traversal that unrolls the tail as it goes.
pub struct Walk<'a> {
    seq: &'a BratteliSequence,
    u: Unroller<'a>,
}

impl Walk<'_> {
    /// Current 1-based level.
    pub fn level(&self) -> usize {
        self.u.level() + 1
    }

    pub fn rank(&self) -> usize {
        self.u.size()
    }

    /// Block level and block node copied by each node of the current level,
    /// once the tail is running.
    pub fn phase(&self) -> Option<(usize, Vec<usize>)> {
        self.u.phase()
    }

    /// The map out of the current level; moves to the next level.
    pub fn advance(&mut self) -> Option<NonMixingMap> {
        let source = self.u.size();
        let step = self.u.step()?;
        Some(self.seq.materialize(source, step))
    }
}

/// Output of [`BratteliSequence::injectivize`].
#[derive(Debug, Clone)]
pub struct Injectivized {
    pub seq: BratteliSequence,
    /// Per presented level, the new index of each old coordinate.
    pub inclusions: Vec<Vec<Option<usize>>>,
    alive: Vec<Vec<bool>>,
}

impl Injectivized {
    /// Image of an element of the original limit in the injectivized one.
    pub fn project(&self, original: &BratteliSequence, x: &LimitElement) -> Result<LimitElement> {
        let flags = tail::surviving_at(
            original.ranks(),
            original.parents(),
            original.tail_ref(),
            &self.alive,
            x.level - 1,
        )
        .ok_or(Error::LevelOutOfRange { level: x.level, available: original.len() })?;
        x.vec.check_rank(flags.len())?;
        let keep: Vec<usize> = (0..flags.len()).filter(|&i| flags[i]).collect();
        Ok(LimitElement::new(x.level, x.vec.restrict(&keep)))
    }
}

/// Order and equality in the limit group.
///
/// The auto mode compares only surviving coordinates, which is the same as
/// injectivizing first; the strict mode refuses non-injective sequences.
pub struct LimitContext<'a> {
    seq: &'a BratteliSequence,
    presented_alive: Option<Vec<Vec<bool>>>,
}

impl<'a> LimitContext<'a> {
    pub fn new(seq: &'a BratteliSequence) -> Self {
        let presented_alive = if seq.is_injective() {
            None
        } else {
            Some(tail::surviving(&seq.ranks, &seq.parents, seq.tail_ref()))
        };
        Self { seq, presented_alive }
    }

    pub fn strict(seq: &'a BratteliSequence) -> Result<Self> {
        if !seq.is_injective() {
            return Err(Error::NotInjective);
        }
        Ok(Self { seq, presented_alive: None })
    }

    /// Both elements pushed to their common level, restricted to the
    /// surviving coordinates there.
    fn common(&self, a: &LimitElement, b: &LimitElement) -> Result<(IntVector, IntVector)> {
        let level = a.level.max(b.level);
        self.seq.check_level(level)?;
        let pa = self.seq.push(&a.vec, a.level, level)?;
        let pb = self.seq.push(&b.vec, b.level, level)?;
        match &self.presented_alive {
            None => Ok((pa, pb)),
            Some(presented) => {
                let flags = tail::surviving_at(
                    &self.seq.ranks,
                    &self.seq.parents,
                    self.seq.tail_ref(),
                    presented,
                    level - 1,
                )
                .expect("level checked");
                let keep: Vec<usize> = (0..flags.len()).filter(|&i| flags[i]).collect();
                Ok((pa.restrict(&keep), pb.restrict(&keep)))
            }
        }
    }

    pub fn eq(&self, a: &LimitElement, b: &LimitElement) -> Result<bool> {
        let (x, y) = self.common(a, b)?;
        Ok(x == y)
    }

    pub fn leq(&self, a: &LimitElement, b: &LimitElement) -> Result<bool> {
        let (x, y) = self.common(a, b)?;
        x.le(&y)
    }

    /// `∀ n ≥ 1: n·x ≤ y` in the limit.
    pub fn forall_n_leq(&self, x: &LimitElement, y: &LimitElement) -> Result<bool> {
        let (x, y) = self.common(x, y)?;
        forall_n_leq(&x, &y)
    }

    pub fn zero_at(&self, level: usize) -> Result<LimitElement> {
        Ok(LimitElement::new(level, IntVector::zero(self.seq.rank_at(level)?)))
    }
}

pub fn limit_eq(seq: &BratteliSequence, a: &LimitElement, b: &LimitElement) -> Result<bool> {
    LimitContext::new(seq).eq(a, b)
}

pub fn limit_leq(seq: &BratteliSequence, a: &LimitElement, b: &LimitElement) -> Result<bool> {
    LimitContext::new(seq).leq(a, b)
}

pub fn forall_n_leq_limit(seq: &BratteliSequence, x: &LimitElement, y: &LimitElement) -> Result<bool> {
    LimitContext::new(seq).forall_n_leq(x, y)
}

impl fmt::Display for LimitElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.vec, self.level)
    }
}

/// Element `x` at `level` scaled by an integer.
pub fn scale_element(x: &LimitElement, k: &BigInt) -> LimitElement {
    LimitElement::new(x.level, x.vec.scale(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> IntVector {
        IntVector::from_i64s(x)
    }

    fn map(r: usize, parent: &[usize], mult: &[u64]) -> NonMixingMap {
        NonMixingMap::from_u64s(r, parent, mult).unwrap()
    }

    fn el(level: usize, x: &[i64]) -> LimitElement {
        LimitElement::new(level, v(x))
    }

    fn tree() -> BratteliSequence {
        BratteliSequence::new(v(&[1]), vec![map(1, &[0, 0], &[2, 3])], None).unwrap()
    }

    #[test]
    fn unit_at_examples() {
        let uhf = BratteliSequence::uhf(2);
        assert_eq!(uhf.unit_at(3).unwrap(), v(&[4]));
        assert_eq!(uhf.unit_at(1).unwrap(), v(&[1]));
        assert_eq!(tree().unit_at(2).unwrap(), v(&[2, 3]));
        assert_eq!(tree().unit_at(3), Err(Error::LevelOutOfRange { level: 3, available: 2 }));
    }

    #[test]
    fn dying_tail_is_rejected() {
        // the repeated node has no child in the block
        let maps = vec![map(1, &[0, 0], &[1, 1]), map(2, &[0], &[1])];
        let tail = PeriodicTail { start: 2, types: vec![1] };
        assert_eq!(BratteliSequence::new(v(&[1]), maps, Some(tail)), Err(Error::EmptyLevel { level: 1 }));
    }

    #[test]
    fn telescope_examples() {
        let t = tree();
        assert_eq!(t.telescope(&[1, 2]).unwrap(), t);
        let uhf = BratteliSequence::uhf(2);
        let tel = uhf.telescope(&[1, 3, 5]).unwrap();
        assert_eq!(tel.maps(), &[NonMixingMap::scalar(4), NonMixingMap::scalar(4)]);
        // tail realigns: the telescoped sequence keeps multiplying by 4
        assert!(tel.is_periodic());
        assert_eq!(tel.map_at(7).unwrap(), NonMixingMap::scalar(4));
        let two = BratteliSequence::new(v(&[1]), vec![map(1, &[0, 0], &[2, 3]), map(2, &[1, 0, 1], &[1, 2, 5])], None)
            .unwrap();
        let tel = two.telescope(&[1, 3]).unwrap();
        for i in 0..1 {
            let e = IntVector::basis(1, i);
            assert_eq!(tel.maps()[0].apply(&e).unwrap(), two.push(&e, 1, 3).unwrap());
        }
        assert_eq!(two.telescope(&[1, 4]), Err(Error::LevelOutOfRange { level: 4, available: 3 }));
        assert_eq!(two.telescope(&[2, 3]), Err(Error::NonAscending));
        assert_eq!(two.telescope(&[1, 3, 3]), Err(Error::NonAscending));
    }

    #[test]
    fn injectivize_examples() {
        let t = tree();
        assert_eq!(t.injectivize().unwrap().seq, t);
        let s = BratteliSequence::new(v(&[1, 1]), vec![map(2, &[0], &[1])], None).unwrap();
        let inj = s.injectivize().unwrap();
        assert_eq!(inj.seq.ranks(), &[1, 1]);
        assert_eq!(inj.inclusions[0], vec![Some(0), None]);
        let s = BratteliSequence::new(v(&[1, 1, 1]), vec![map(3, &[0, 0], &[1, 1]), map(2, &[0, 1], &[1, 1])], None)
            .unwrap();
        let inj = s.injectivize().unwrap();
        assert_eq!(inj.inclusions[0], vec![Some(0), None, None]);
        assert!(inj.seq.is_injective());
    }

    #[test]
    fn injectivize_keeps_periodic_tail() {
        // node 2 of level 1 feeds nothing; both level-2 nodes copy node 1
        let tail = PeriodicTail { start: 1, types: vec![0, 0] };
        let s = BratteliSequence::new(v(&[1, 1]), vec![map(2, &[0, 0], &[1, 2])], Some(tail)).unwrap();
        let inj = s.injectivize().unwrap();
        assert_eq!(inj.seq.ranks(), &[1, 2]);
        assert!(inj.seq.is_periodic());
        assert_eq!(inj.seq.tail().unwrap().types, vec![0, 0]);
        assert_eq!(inj.seq.rank_at(4).unwrap(), 8);
        // identity types: the dead node stays dead forever
        let s = BratteliSequence::with_repeat(v(&[1, 1]), vec![map(2, &[0, 0], &[1, 2])], 1).unwrap();
        let inj = s.injectivize().unwrap();
        assert_eq!(inj.seq.ranks(), &[1, 1]);
        assert_eq!(inj.seq.map_at(5).unwrap(), NonMixingMap::scalar(1));
    }

    #[test]
    fn limit_eq_examples() {
        let uhf = BratteliSequence::uhf(2);
        assert!(limit_eq(&uhf, &el(1, &[1]), &el(2, &[2])).unwrap());
        assert!(!limit_eq(&uhf, &el(1, &[1]), &el(1, &[2])).unwrap());
        let t = tree();
        let pushed = t.push(&v(&[1]), 1, 2).unwrap();
        assert!(limit_eq(&t, &el(1, &[1]), &LimitElement::new(2, pushed)).unwrap());
        assert!(limit_eq(&t, &el(1, &[1]), &el(3, &[1])).is_err());
    }

    #[test]
    fn limit_eq_ignores_dying_coordinates() {
        let s = BratteliSequence::new(v(&[1, 1]), vec![map(2, &[0], &[1])], None).unwrap();
        assert!(limit_eq(&s, &el(1, &[1, 0]), &el(1, &[1, 7])).unwrap());
        assert_eq!(LimitContext::strict(&s).err(), Some(Error::NotInjective));
    }

    #[test]
    fn limit_leq_examples() {
        let uhf = BratteliSequence::uhf(2);
        assert!(limit_leq(&uhf, &el(1, &[3]), &el(1, &[3])).unwrap());
        assert!(limit_leq(&uhf, &el(1, &[-1]), &el(1, &[0])).unwrap());
        let s = BratteliSequence::new(v(&[1, 1]), vec![NonMixingMap::identity(2)], None).unwrap();
        assert!(!limit_leq(&s, &el(1, &[1, -1]), &el(1, &[0, 0])).unwrap());
    }

    #[test]
    fn forall_n_leq_limit_examples() {
        let uhf = BratteliSequence::uhf(2);
        assert!(forall_n_leq_limit(&uhf, &el(1, &[0]), &el(1, &[0])).unwrap());
        assert!(!forall_n_leq_limit(&uhf, &el(1, &[1]), &el(1, &[1000])).unwrap());
        let s = BratteliSequence::new(v(&[1, 1]), vec![NonMixingMap::identity(2)], None).unwrap();
        assert!(forall_n_leq_limit(&s, &el(1, &[-2, 0]), &el(1, &[-2, 5])).unwrap());
    }

    #[test]
    fn bad_repeats_are_rejected() {
        let r = BratteliSequence::with_repeat(v(&[1, 1]), vec![map(2, &[0, 0, 1], &[1, 1, 1])], 1);
        assert!(matches!(r, Err(Error::BadRepeat(_))));
        let r = BratteliSequence::new(v(&[1]), vec![NonMixingMap::scalar(2)], Some(PeriodicTail { start: 2, types: vec![0] }));
        assert!(matches!(r, Err(Error::BadRepeat(_))));
    }
}
