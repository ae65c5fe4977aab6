//! Deciding `⟨G,u⟩ ⊗ ℚ ≅ ⟨H,v⟩ ⊗ ℚ` at desk scale.
//!
//! After `⊗ℚ` every connecting map is conjugate, by the diagonals
//! `diag(1/u_i)`, to the pure index map `x ↦ (x_{σ(1)}, …)`, so only the
//! parent functions matter: the question becomes whether the inverse limits
//! of the two index systems are homeomorphic.
//!
//! Equivalence is witnessed by a finite system of claims about subtrees.
//! Subtrees are named by *classes*: a bisimulation over the nodes of the
//! repeating block (levels `p..L-1`) of both systems at once. A claim says a
//! disjoint union of A-subtrees is homeomorphic to a disjoint union of
//! B-subtrees, with one side a single class. Each claim is split into
//! smaller claims after expanding one or both sides by some levels; claims
//! may refer to each other cyclically, which is sound because every cycle
//! expands both sides.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::diagram::{BratteliSequence, PeriodicTail};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::states::Rational;
use crate::tail::{self, Tail, Unroller};

/// Default number of claim-proof attempts before giving up.
pub const DEFAULT_BUDGET: usize = 200_000;

/// Sizes and parent functions of an inverse system of finite sets,
/// optionally with a periodic tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSystem {
    sizes: Vec<usize>,
    parents: Vec<Vec<usize>>,
    tail: Option<PeriodicTail>,
}

impl IndexSystem {
    pub fn new(sizes: Vec<usize>, parents: Vec<Vec<usize>>, tail: Option<PeriodicTail>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::EmptyLevel { level: sizes.iter().position(|&s| s == 0).map_or(1, |i| i + 1) });
        }
        if parents.len() + 1 != sizes.len() {
            return Err(Error::RankMismatch { expected: sizes.len() - 1, found: parents.len() });
        }
        for (m, ps) in parents.iter().enumerate() {
            if ps.len() != sizes[m + 1] {
                return Err(Error::RankMismatch { expected: sizes[m + 1], found: ps.len() });
            }
            if ps.iter().any(|&p| p >= sizes[m]) {
                return Err(Error::RankMismatch { expected: sizes[m], found: ps.iter().max().unwrap() + 1 });
            }
        }
        if let Some(t) = &tail {
            let last = sizes.len();
            if t.start < 1 || t.start >= last || t.types.len() != sizes[last - 1] || t.types.iter().any(|&x| x >= sizes[t.start - 1]) {
                return Err(Error::BadRepeat("tail does not fit the index system".into()));
            }
        }
        Ok(Self { sizes, parents, tail })
    }

    /// Parent functions of a sequence; multiplicities and units are dropped.
    pub fn from_sequence(seq: &BratteliSequence) -> Self {
        Self {
            sizes: seq.ranks().to_vec(),
            parents: seq.maps().iter().map(|m| m.parent().to_vec()).collect(),
            tail: seq.tail().cloned(),
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn parents(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub fn tail(&self) -> Option<&PeriodicTail> {
        self.tail.as_ref()
    }

    pub fn is_surjective(&self) -> bool {
        self.parents.iter().enumerate().all(|(m, ps)| {
            let mut hit = vec![false; self.sizes[m]];
            for &p in ps {
                hit[p] = true;
            }
            hit.into_iter().all(|h| h)
        })
    }

    fn tail_ref(&self) -> Option<Tail<'_>> {
        self.tail.as_ref().map(|t| Tail { start: t.start - 1, types: &t.types })
    }

    /// Number of level-`p` nodes, if there is a tail.
    pub fn type_count(&self) -> Option<usize> {
        self.tail.as_ref().map(|t| self.sizes[t.start - 1])
    }

    /// Nodes of the repeating block, levels `p..L-1`, numbered level by
    /// level; the level-`p` nodes come first.
    pub fn block_size(&self) -> Option<usize> {
        let t = self.tail.as_ref()?;
        Some(self.sizes[t.start - 1..self.sizes.len() - 1].iter().sum())
    }

    /// Children one level down of every block node, as block nodes. Nodes
    /// of the last level are replaced by their types.
    fn block_children(&self) -> Vec<Vec<usize>> {
        let t = self.tail.as_ref().expect("tail");
        let start = t.start - 1;
        let last = self.sizes.len() - 1;
        let mut offset = vec![0; last + 1];
        for m in start + 1..=last {
            offset[m] = offset[m - 1] + self.sizes[m - 1];
        }
        let mut children = vec![Vec::new(); offset[last]];
        for m in start..last {
            for (y, &p) in self.parents[m].iter().enumerate() {
                let child = if m + 1 == last { t.types[y] } else { offset[m + 1] + y };
                children[offset[m] + p].push(child);
            }
        }
        children
    }
}

/// The index system of a sequence with the diagonals `diag(1/u_i)` that
/// conjugate each `⊗ℚ` connecting map to its pure index map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonicalization {
    pub index: IndexSystem,
    pub diagonals: Vec<Vec<Rational>>,
}

pub fn canonicalize_q(seq: &BratteliSequence) -> Result<Canonicalization> {
    let units = seq.units_upto(seq.len())?;
    let diagonals = units
        .iter()
        .map(|u| u.entries().iter().map(|x| Rational::new(BigInt::one(), x.clone())).collect())
        .collect();
    let canon = Canonicalization { index: IndexSystem::from_sequence(seq), diagonals };
    if !conjugates_to_index_maps(seq, &canon) {
        return Err(Error::NotNormalized);
    }
    Ok(canon)
}

/// `φ_{i+1} ∘ α_i ∘ φ_i⁻¹` has entry 1 at `(j, σ_i(j))` and 0 elsewhere.
pub fn conjugates_to_index_maps(seq: &BratteliSequence, canon: &Canonicalization) -> bool {
    if canon.diagonals.len() != seq.len() || canon.index != IndexSystem::from_sequence(seq) {
        return false;
    }
    let ranks_ok = canon.diagonals.iter().zip(seq.ranks()).all(|(d, &r)| d.len() == r);
    let positive = canon.diagonals.iter().flatten().all(|x| x > &Rational::zero());
    ranks_ok
        && positive
        && seq.maps().iter().enumerate().all(|(i, alpha)| {
            alpha.parent().iter().zip(alpha.mult()).enumerate().all(|(j, (&p, k))| {
                let k = Rational::from_integer(BigInt::from(k.clone()));
                &canon.diagonals[i + 1][j] * k / &canon.diagonals[i][p] == Rational::one()
            })
        })
}

/// Keeps the nodes with descendants at every later level.
pub fn surjectivize(idx: &IndexSystem) -> IndexSystem {
    let alive = tail::surviving(&idx.sizes, &idx.parents, idx.tail_ref());
    let index: Vec<Vec<Option<usize>>> = alive
        .iter()
        .map(|flags| {
            let mut next = 0;
            flags
                .iter()
                .map(|&a| {
                    a.then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        })
        .collect();
    let sizes = alive.iter().map(|f| f.iter().filter(|&&a| a).count()).collect();
    let parents = idx
        .parents
        .iter()
        .enumerate()
        .map(|(m, ps)| {
            ps.iter()
                .enumerate()
                .filter(|&(y, _)| alive[m + 1][y])
                .map(|(_, &p)| index[m][p].expect("parent of a live node is live"))
                .collect()
        })
        .collect();
    let last = idx.sizes.len() - 1;
    let tail = idx.tail.as_ref().map(|t| PeriodicTail {
        start: t.start,
        types: t
            .types
            .iter()
            .enumerate()
            .filter(|&(y, _)| alive[last][y])
            .map(|(_, &ty)| index[t.start - 1][ty].expect("live type"))
            .collect(),
    });
    IndexSystem { sizes, parents, tail }
}

/// Cardinality of the inverse limit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cardinality {
    Finite(BigUint),
    Infinite,
    /// Finite presentations only bound the count from below.
    LowerBound(usize),
}

impl Cardinality {
    pub fn is_determined(&self) -> bool {
        !matches!(self, Cardinality::LowerBound(_))
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => f.write_str("infinite"),
            Cardinality::LowerBound(n) => write!(f, "at least {n}"),
        }
    }
}

/// Expects a surjectivized system.
pub fn limit_cardinality(idx: &IndexSystem) -> Cardinality {
    if idx.tail.is_none() {
        return Cardinality::LowerBound(*idx.sizes.last().unwrap());
    }
    let children = idx.block_children();
    let n = children.len();
    // v lies on a cycle iff it reaches itself
    let on_cycle = |v: usize| {
        let mut seen = vec![false; n];
        let mut stack = children[v].clone();
        while let Some(w) = stack.pop() {
            if w == v {
                return true;
            }
            if !seen[w] {
                seen[w] = true;
                stack.extend(&children[w]);
            }
        }
        false
    };
    if (0..n).any(|v| children[v].len() >= 2 && on_cycle(v)) {
        return Cardinality::Infinite;
    }
    let mut paths = vec![BigUint::one(); n];
    for _ in 0..n {
        paths = children.iter().map(|c| c.iter().map(|&w| &paths[w]).sum()).collect();
    }
    let roots = idx.type_count().unwrap();
    Cardinality::Finite(paths.into_iter().take(roots).sum())
}

/// Joint bisimulation classes of the block nodes of `a` followed by those
/// of `b`, with the one-level children of each class.
fn joint_classes(a: &IndexSystem, b: &IndexSystem) -> (Vec<usize>, Vec<Vec<usize>>) {
    let ca = a.block_children();
    let na = ca.len();
    let children: Vec<Vec<usize>> =
        ca.into_iter().chain(b.block_children().into_iter().map(|c| c.into_iter().map(|w| w + na).collect())).collect();
    let total = children.len();
    let mut class = vec![0usize; total];
    let mut count = 1;
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0usize; total];
        for t in 0..total {
            let mut sig: Vec<usize> = children[t].iter().map(|&c| class[c]).collect();
            sig.sort_unstable();
            let len = ids.len();
            next[t] = *ids.entry((class[t], sig)).or_insert(len);
        }
        let new_count = ids.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    // children of each class one level down, as classes
    let mut class_children = vec![Vec::new(); count];
    let mut done = vec![false; count];
    for t in 0..total {
        if !done[class[t]] {
            done[class[t]] = true;
            let mut kids: Vec<usize> = children[t].iter().map(|&c| class[c]).collect();
            kids.sort_unstable();
            class_children[class[t]] = kids;
        }
    }
    (class, class_children)
}

/// `a` (A-side classes) ≅ `b` (B-side classes); both sorted, one of length 1
/// except at the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Claim {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Claim {
    fn new(mut a: Vec<usize>, mut b: Vec<usize>) -> Self {
        a.sort_unstable();
        b.sort_unstable();
        Self { a, b }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// The same class on both sides.
    Bisimilar,
    /// Expand each side by the given number of levels, then split into the
    /// listed claims.
    Split { expand_a: usize, expand_b: usize, pieces: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimRecord {
    pub claim: Claim,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceCertificate {
    pub a: BratteliSequence,
    pub b: BratteliSequence,
    pub canon_a: Canonicalization,
    pub canon_b: Canonicalization,
    /// Class of every type of the surjectivized A system, then of B.
    pub classes_a: Vec<usize>,
    pub classes_b: Vec<usize>,
    /// Split of all A types against all B types, without expansion.
    pub root: Vec<usize>,
    pub claims: Vec<ClaimRecord>,
}

impl EquivalenceCertificate {
    /// The same certificate read from B to A.
    pub fn mirrored(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
            canon_a: self.canon_b.clone(),
            canon_b: self.canon_a.clone(),
            classes_a: self.classes_b.clone(),
            classes_b: self.classes_a.clone(),
            root: self.root.clone(),
            claims: self
                .claims
                .iter()
                .map(|r| ClaimRecord {
                    claim: Claim { a: r.claim.b.clone(), b: r.claim.a.clone() },
                    justification: match &r.justification {
                        Justification::Bisimilar => Justification::Bisimilar,
                        Justification::Split { expand_a, expand_b, pieces } => Justification::Split {
                            expand_a: *expand_b,
                            expand_b: *expand_a,
                            pieces: pieces.clone(),
                        },
                    },
                })
                .collect(),
        }
    }
}

/// Evidence for a negative verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardinalityWitness {
    pub a: Cardinality,
    pub b: Cardinality,
}

impl fmt::Display for CardinalityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "limit cardinalities differ: {} vs {}", self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivVerdict {
    Equivalent(Box<EquivalenceCertificate>),
    NotEquivalent(CardinalityWitness),
    Unknown { depth: usize },
}

impl EquivVerdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            EquivVerdict::Equivalent(_) => 0,
            EquivVerdict::NotEquivalent(_) => 1,
            EquivVerdict::Unknown { .. } => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EquivVerdict::Equivalent(_) => "equivalent",
            EquivVerdict::NotEquivalent(_) => "not-equivalent",
            EquivVerdict::Unknown { .. } => "unknown",
        }
    }
}

/// Search bounds: claim sides hold at most `depth + 1` classes and each side
/// is expanded by at most `depth` levels at a time.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub depth: usize,
    pub budget: usize,
}

impl SearchLimits {
    pub fn new(depth: usize) -> Self {
        Self { depth, budget: DEFAULT_BUDGET }
    }
}

struct Search<'a> {
    children: &'a [Vec<usize>],
    in_a: Vec<bool>,
    in_b: Vec<bool>,
    limits: SearchLimits,
    steps: usize,
    records: Vec<Option<ClaimRecord>>,
    index: HashMap<Claim, usize>,
    expansions: HashMap<(usize, usize), Option<Vec<usize>>>,
}

struct Option_ {
    expand_a: usize,
    expand_b: usize,
    pieces: Vec<Claim>,
}

impl<'a> Search<'a> {
    /// Classes `levels` levels below `class`; `None` when there are more
    /// than any split within the bounds can use.
    fn expand(&mut self, class: usize, levels: usize) -> Option<Vec<usize>> {
        if let Some(e) = self.expansions.get(&(class, levels)) {
            return e.clone();
        }
        let cap = self.limits.depth + 1;
        let mut cur = Some(vec![class]);
        for _ in 0..levels {
            let next: Vec<usize> = cur.iter().flatten().flat_map(|&c| self.children[c].iter().copied()).collect();
            cur = (next.len() <= cap * cap).then_some(next);
        }
        if let Some(v) = cur.as_mut() {
            v.sort_unstable();
        }
        self.expansions.insert((class, levels), cur.clone());
        cur
    }

    fn options(&mut self, claim: &Claim) -> Vec<Option_> {
        let cap = self.limits.depth + 1;
        let max_e = self.limits.depth;
        let mut out = Vec::new();
        match (claim.a.len(), claim.b.len()) {
            (1, 1) => {
                let mut pairs: Vec<(usize, usize)> = (1..=max_e).flat_map(|x| (1..=max_e).map(move |y| (x, y))).collect();
                pairs.sort_by_key(|&(x, y)| (x + y, x));
                for (ea, eb) in pairs {
                    let (Some(xa), Some(xb)) = (self.expand(claim.a[0], ea), self.expand(claim.b[0], eb)) else {
                        continue;
                    };
                    for split in splits(&xa, &xb, cap) {
                        out.push(Option_ { expand_a: ea, expand_b: eb, pieces: split });
                    }
                }
            }
            (1, _) => {
                for e in 1..=max_e {
                    let Some(xa) = self.expand(claim.a[0], e) else { break };
                    if xa.len() < claim.b.len() {
                        continue;
                    }
                    for split in distribute(&xa, &claim.b, cap) {
                        let pieces = split.into_iter().map(|(g, s)| Claim::new(g, vec![s])).collect();
                        out.push(Option_ { expand_a: e, expand_b: 0, pieces });
                    }
                }
            }
            (_, 1) => {
                for e in 1..=max_e {
                    let Some(xb) = self.expand(claim.b[0], e) else { break };
                    if xb.len() < claim.a.len() {
                        continue;
                    }
                    for split in distribute(&xb, &claim.a, cap) {
                        let pieces = split.into_iter().map(|(g, s)| Claim::new(vec![s], g)).collect();
                        out.push(Option_ { expand_a: 0, expand_b: e, pieces });
                    }
                }
            }
            _ => {}
        }
        out
    }

    fn prove(&mut self, claim: &Claim) -> bool {
        if self.index.contains_key(claim) {
            return true;
        }
        let valid_sides = claim.a.iter().all(|&c| self.in_a[c]) && claim.b.iter().all(|&c| self.in_b[c]);
        if !valid_sides {
            return false;
        }
        if claim.a.len() == 1 && claim.a == claim.b {
            self.push(claim.clone(), Some(Justification::Bisimilar));
            return true;
        }
        if self.steps >= self.limits.budget {
            return false;
        }
        self.steps += 1;
        let mark = self.records.len();
        let me = self.push(claim.clone(), None);
        for opt in self.options(claim) {
            let inner = self.records.len();
            if opt.pieces.iter().all(|p| self.prove(p)) {
                let pieces = opt.pieces.iter().map(|p| self.index[p]).collect();
                self.records[me] = Some(ClaimRecord {
                    claim: claim.clone(),
                    justification: Justification::Split { expand_a: opt.expand_a, expand_b: opt.expand_b, pieces },
                });
                return true;
            }
            self.rollback(inner);
        }
        self.rollback(mark);
        false
    }

    fn push(&mut self, claim: Claim, j: Option<Justification>) -> usize {
        let i = self.records.len();
        self.records.push(j.map(|justification| ClaimRecord { claim: claim.clone(), justification }));
        self.index.insert(claim, i);
        i
    }

    fn rollback(&mut self, len: usize) {
        self.index.retain(|_, &mut i| i < len);
        self.records.truncate(len);
    }
}

/// All ways to split `xa` against `xb` with one side single, the larger
/// list distributed onto the smaller.
fn splits(xa: &[usize], xb: &[usize], cap: usize) -> Vec<Vec<Claim>> {
    if xa.len() <= xb.len() {
        distribute(xb, xa, cap)
            .into_iter()
            .map(|s| s.into_iter().map(|(g, t)| Claim::new(vec![t], g)).collect())
            .collect()
    } else {
        distribute(xa, xb, cap)
            .into_iter()
            .map(|s| s.into_iter().map(|(g, t)| Claim::new(g, vec![t])).collect())
            .collect()
    }
}

/// Partitions of the multiset `items` into one nonempty group of size at
/// most `cap` per slot. Slots holding the same class get groups in
/// non-decreasing order, so each partition appears once. Groups are tried
/// smallest first, then lexicographically.
fn distribute(items: &[usize], slots: &[usize], cap: usize) -> Vec<Vec<(Vec<usize>, usize)>> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in items {
        *counts.entry(x).or_default() += 1;
    }
    let kinds: Vec<usize> = counts.keys().copied().collect();
    let remaining: Vec<usize> = counts.values().copied().collect();
    let mut slots = slots.to_vec();
    slots.sort_unstable();
    let mut out = Vec::new();
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    distribute_rec(&kinds, remaining, &slots, cap, &mut chosen, &mut out);
    out
}

fn distribute_rec(
    kinds: &[usize],
    remaining: Vec<usize>,
    slots: &[usize],
    cap: usize,
    chosen: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<(Vec<usize>, usize)>>,
) {
    const MAX_SPLITS: usize = 4096;
    if out.len() >= MAX_SPLITS {
        return;
    }
    let k = chosen.len();
    let left: usize = remaining.iter().sum();
    let slots_left = slots.len() - k;
    if slots_left == 0 {
        if left == 0 {
            out.push(chosen.iter().zip(slots).map(|(g, &s)| (as_list(kinds, g), s)).collect());
        }
        return;
    }
    if left < slots_left || left > cap * slots_left {
        return;
    }
    let mut options = sub_multisets(&remaining, cap);
    options.retain(|g| {
        let size: usize = g.iter().sum();
        let rest = left - size;
        size >= 1 && rest >= slots_left - 1 && rest <= cap * (slots_left - 1)
    });
    options.sort_by_key(|x| order_key(kinds, x));
    for g in options {
        if k > 0 && slots[k] == slots[k - 1] && order_key(kinds, &g) < order_key(kinds, &chosen[k - 1]) {
            continue;
        }
        let rest: Vec<usize> = remaining.iter().zip(&g).map(|(r, x)| r - x).collect();
        chosen.push(g);
        distribute_rec(kinds, rest, slots, cap, chosen, out);
        chosen.pop();
    }
}

fn sub_multisets(remaining: &[usize], cap: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &r in remaining {
        let mut next = Vec::new();
        for prefix in &out {
            let used: usize = prefix.iter().sum();
            for x in 0..=r.min(cap - used.min(cap)) {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn order_key(kinds: &[usize], g: &[usize]) -> (usize, Vec<usize>) {
    (g.iter().sum(), as_list(kinds, g))
}

fn as_list(kinds: &[usize], g: &[usize]) -> Vec<usize> {
    kinds
        .iter()
        .zip(g)
        .flat_map(|(&k, &n)| std::iter::repeat_n(k, n))
        .collect()
}

/// Canonical data, surjectivized systems and cardinalities of both inputs.
struct Prepared {
    canon_a: Canonicalization,
    canon_b: Canonicalization,
    sa: IndexSystem,
    sb: IndexSystem,
}

fn prepare(a: &BratteliSequence, b: &BratteliSequence) -> Result<Prepared> {
    let canon_a = canonicalize_q(a)?;
    let canon_b = canonicalize_q(b)?;
    let sa = surjectivize(&canon_a.index);
    let sb = surjectivize(&canon_b.index);
    Ok(Prepared { canon_a, canon_b, sa, sb })
}

/// Searches for a certificate of `A ⊗ ℚ ≅ B ⊗ ℚ`.
pub fn equivalent_q(a: &BratteliSequence, b: &BratteliSequence, depth: usize, exec: Execution) -> Result<EquivVerdict> {
    equivalent_q_with(a, b, SearchLimits::new(depth), exec)
}

pub fn equivalent_q_with(a: &BratteliSequence, b: &BratteliSequence, limits: SearchLimits, exec: Execution) -> Result<EquivVerdict> {
    let prep = prepare(a, b)?;
    let ca = limit_cardinality(&prep.sa);
    let cb = limit_cardinality(&prep.sb);
    if ca.is_determined() && cb.is_determined() && ca != cb {
        return Ok(EquivVerdict::NotEquivalent(CardinalityWitness { a: ca, b: cb }));
    }
    if !ca.is_determined() || !cb.is_determined() {
        return Ok(EquivVerdict::Unknown { depth: limits.depth });
    }
    if let Some(cert) = find_intertwining(a, b, &prep, limits, exec) {
        return Ok(EquivVerdict::Equivalent(Box::new(cert)));
    }
    let swapped = Prepared {
        canon_a: prep.canon_b.clone(),
        canon_b: prep.canon_a.clone(),
        sa: prep.sb.clone(),
        sb: prep.sa.clone(),
    };
    if let Some(cert) = find_intertwining(b, a, &swapped, limits, exec) {
        return Ok(EquivVerdict::Equivalent(Box::new(cert.mirrored())));
    }
    Ok(EquivVerdict::Unknown { depth: limits.depth })
}

fn find_intertwining(
    a: &BratteliSequence,
    b: &BratteliSequence,
    prep: &Prepared,
    limits: SearchLimits,
    exec: Execution,
) -> Option<EquivalenceCertificate> {
    let (class, children) = joint_classes(&prep.sa, &prep.sb);
    let na = prep.sa.block_size()?;
    let classes_a = class[..na].to_vec();
    let classes_b = class[na..].to_vec();
    let mut in_a = vec![false; children.len()];
    let mut in_b = vec![false; children.len()];
    for &c in &classes_a {
        in_a[c] = true;
    }
    for &c in &classes_b {
        in_b[c] = true;
    }
    let cap = limits.depth + 1;
    let root_a = Claim::new(classes_a[..prep.sa.type_count()?].to_vec(), Vec::new()).a;
    let root_b = Claim::new(classes_b[..prep.sb.type_count()?].to_vec(), Vec::new()).a;
    let mut root_options = splits(&root_a, &root_b, cap.max(root_a.len().max(root_b.len())));
    if root_options.is_empty() {
        return None;
    }
    root_options.truncate(1024);
    let found = exec.find_first(&root_options, |pieces| {
        let mut search = Search {
            children: &children,
            in_a: in_a.clone(),
            in_b: in_b.clone(),
            limits,
            steps: 0,
            records: Vec::new(),
            index: HashMap::new(),
            expansions: HashMap::new(),
        };
        if pieces.iter().all(|p| search.prove(p)) {
            let root = pieces.iter().map(|p| search.index[p]).collect();
            let claims: Vec<ClaimRecord> = search.records.into_iter().map(|r| r.expect("proved")).collect();
            Some((root, claims))
        } else {
            None
        }
    })?;
    Some(EquivalenceCertificate {
        a: a.clone(),
        b: b.clone(),
        canon_a: prep.canon_a.clone(),
        canon_b: prep.canon_b.clone(),
        classes_a,
        classes_b,
        root: found.0,
        claims: found.1,
    })
}

/// Checks a negative verdict by recomputing both cardinalities.
pub fn verify_witness(a: &BratteliSequence, b: &BratteliSequence, w: &CardinalityWitness) -> bool {
    let Ok(prep) = prepare(a, b) else { return false };
    let ca = limit_cardinality(&prep.sa);
    let cb = limit_cardinality(&prep.sb);
    ca == w.a && cb == w.b && ca.is_determined() && cb.is_determined() && ca != cb
}

/// Independent check of a certificate. Expansions are recomputed by
/// unrolling the index functions, not from the class table.
pub fn verify_equivalence(cert: &EquivalenceCertificate) -> std::result::Result<(), String> {
    for (seq, canon, side) in [(&cert.a, &cert.canon_a, "A"), (&cert.b, &cert.canon_b, "B")] {
        if !conjugates_to_index_maps(seq, canon) {
            return Err(format!("{side}: canonicalization does not conjugate to index maps"));
        }
        let fresh = canonicalize_q(seq).map_err(|e| e.to_string())?;
        if &fresh != canon {
            return Err(format!("{side}: canonicalization differs from a fresh computation"));
        }
    }
    let sa = surjectivize(&cert.canon_a.index);
    let sb = surjectivize(&cert.canon_b.index);
    let na = sa.block_size().ok_or("A has no periodic tail")?;
    let nb = sb.block_size().ok_or("B has no periodic tail")?;
    if cert.classes_a.len() != na || cert.classes_b.len() != nb {
        return Err("class maps do not cover the block nodes".into());
    }
    let root_a = &cert.classes_a[..sa.type_count().unwrap()];
    let root_b = &cert.classes_b[..sb.type_count().unwrap()];
    let max_e = cert
        .claims
        .iter()
        .filter_map(|r| match &r.justification {
            Justification::Split { expand_a, expand_b, .. } => Some((*expand_a).max(*expand_b)),
            Justification::Bisimilar => None,
        })
        .max()
        .unwrap_or(0)
        .max(1);
    let ea = unrolled_expansions(&sa, max_e);
    let eb = unrolled_expansions(&sb, max_e);
    // the class maps must form a bisimulation over both systems together
    let mut signature: HashMap<usize, Vec<usize>> = HashMap::new();
    for (classes, exp) in [(&cert.classes_a, &ea), (&cert.classes_b, &eb)] {
        for (t, &c) in classes.iter().enumerate() {
            let mut kids: Vec<usize> = exp[0][t].iter().map(|&s| classes[s]).collect();
            kids.sort_unstable();
            match signature.get(&c) {
                Some(prev) if prev != &kids => return Err(format!("class {c} is not a bisimulation class")),
                Some(_) => {}
                None => {
                    signature.insert(c, kids);
                }
            }
        }
    }
    let rep = |classes: &[usize], c: usize| classes.iter().position(|&x| x == c);
    let expansion = |classes: &[usize], exp: &[Vec<Vec<usize>>], c: usize, e: usize| -> Option<Vec<usize>> {
        let t = rep(classes, c)?;
        let mut v: Vec<usize> = exp[e - 1][t].iter().map(|&s| classes[s]).collect();
        v.sort_unstable();
        Some(v)
    };
    let sorted = |v: &[usize]| {
        let mut v = v.to_vec();
        v.sort_unstable();
        v
    };
    let n = cert.claims.len();
    let check_split = |target_a: &[usize], target_b: &[usize], pieces: &[usize]| -> std::result::Result<(), String> {
        let mut got_a = Vec::new();
        let mut got_b = Vec::new();
        for &p in pieces {
            let piece = cert.claims.get(p).ok_or(format!("piece {p} is not in the table"))?;
            got_a.extend(&piece.claim.a);
            got_b.extend(&piece.claim.b);
        }
        if sorted(&got_a) != sorted(target_a) || sorted(&got_b) != sorted(target_b) {
            return Err("pieces do not add up to the expansion".into());
        }
        Ok(())
    };
    for (i, r) in cert.claims.iter().enumerate() {
        let Claim { a, b } = &r.claim;
        if a.is_empty() || b.is_empty() || (a.len() > 1 && b.len() > 1) {
            return Err(format!("claim {i} has an invalid shape"));
        }
        if a.iter().any(|&c| rep(&cert.classes_a, c).is_none()) || b.iter().any(|&c| rep(&cert.classes_b, c).is_none()) {
            return Err(format!("claim {i} names a class absent from its side"));
        }
        match &r.justification {
            Justification::Bisimilar => {
                if a.len() != 1 || a != b {
                    return Err(format!("claim {i} is not a bisimilar pair"));
                }
            }
            Justification::Split { expand_a, expand_b, pieces } => {
                let target_a = if *expand_a > 0 {
                    if a.len() != 1 {
                        return Err(format!("claim {i} expands a union"));
                    }
                    expansion(&cert.classes_a, &ea, a[0], *expand_a).unwrap()
                } else {
                    a.clone()
                };
                let target_b = if *expand_b > 0 {
                    if b.len() != 1 {
                        return Err(format!("claim {i} expands a union"));
                    }
                    expansion(&cert.classes_b, &eb, b[0], *expand_b).unwrap()
                } else {
                    b.clone()
                };
                check_split(&target_a, &target_b, pieces).map_err(|e| format!("claim {i}: {e}"))?;
            }
        }
    }
    check_split(root_a, root_b, &cert.root).map_err(|e| format!("root: {e}"))?;
    // every cycle must expand both sides
    for side in 0..2 {
        let edges: Vec<Vec<usize>> = cert
            .claims
            .iter()
            .map(|r| match &r.justification {
                Justification::Split { expand_a, expand_b, pieces } if [*expand_a, *expand_b][side] == 0 => pieces.clone(),
                _ => Vec::new(),
            })
            .collect();
        if has_cycle(n, &edges) {
            return Err(format!("a cycle never expands side {}", ["A", "B"][side]));
        }
    }
    Ok(())
}

fn has_cycle(n: usize, edges: &[Vec<usize>]) -> bool {
    // 0 unvisited, 1 on stack, 2 finished
    let mut state = vec![0u8; n];
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        state[s] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < edges[v].len() {
                let w = edges[v][*i];
                *i += 1;
                match state[w] {
                    1 => return true,
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    false
}

/// `out[e-1][v]`: block nodes copied by the descendants of block node `v`
/// after `e` levels, found by unrolling the whole system from `v`'s level
/// and tracking ancestors.
fn unrolled_expansions(idx: &IndexSystem, max_e: usize) -> Vec<Vec<Vec<usize>>> {
    let start = idx.tail.as_ref().expect("tail").start - 1;
    let last = idx.sizes.len() - 1;
    let mut offset = vec![0; last + 1];
    for m in start + 1..=last {
        offset[m] = offset[m - 1] + idx.sizes[m - 1];
    }
    let mut out = vec![vec![Vec::new(); offset[last]]; max_e];
    for m in start..last {
        let mut u = Unroller::new(&idx.sizes, &idx.parents, idx.tail_ref());
        while u.level() < m {
            u.step();
        }
        let mut ancestor: Vec<usize> = (0..u.size()).collect();
        for per_node in out.iter_mut() {
            let step = u.step().expect("tail never ends");
            ancestor = step.parents.iter().map(|&p| ancestor[p]).collect();
            let (base, copy) = u.phase().expect("inside the tail");
            for (x, &anc) in ancestor.iter().enumerate() {
                per_node[offset[m] + anc].push(offset[base] + copy[x]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{IntVector, NonMixingMap};

    fn v(x: &[i64]) -> IntVector {
        IntVector::from_i64s(x)
    }

    fn tree(k: usize) -> BratteliSequence {
        BratteliSequence::with_repeat(v(&[1]), vec![NonMixingMap::from_u64s(1, &vec![0; k], &vec![1; k]).unwrap()], 1)
            .unwrap()
    }

    fn paths(m: [u64; 2]) -> BratteliSequence {
        BratteliSequence::with_repeat(v(&[1, 1]), vec![NonMixingMap::from_u64s(2, &[0, 1], &m).unwrap()], 1).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize_q(&BratteliSequence::uhf(2).unroll(3).unwrap()).unwrap();
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(c.diagonals, vec![vec![Rational::one()], vec![half.clone()], vec![&half * &half]]);
        assert_eq!(c.index.sizes(), &[1, 1, 1]);
        let c3 = canonicalize_q(&BratteliSequence::uhf(3)).unwrap();
        assert_eq!(c3.index, canonicalize_q(&BratteliSequence::uhf(2)).unwrap().index);
        let c = canonicalize_q(&paths([2, 7])).unwrap();
        assert_eq!(c.index.parents(), &[vec![0, 1]]);
    }

    #[test]
    fn surjectivize_examples() {
        let idx = IndexSystem::from_sequence(&paths([1, 1]));
        assert_eq!(surjectivize(&idx), idx);
        let idx = IndexSystem::new(vec![2, 1], vec![vec![0]], None).unwrap();
        assert_eq!(surjectivize(&idx).sizes(), &[1, 1]);
        // types cycle 0 → 1 → 0; node 2 is hit by nothing
        let idx = IndexSystem::new(vec![3, 2], vec![vec![0, 1]], Some(PeriodicTail { start: 1, types: vec![1, 0] })).unwrap();
        let s = surjectivize(&idx);
        assert_eq!(s.sizes(), &[2, 2]);
        assert!(s.is_surjective());
    }

    #[test]
    fn cardinality_examples() {
        let card = |s: &BratteliSequence| limit_cardinality(&surjectivize(&IndexSystem::from_sequence(s)));
        assert_eq!(card(&BratteliSequence::uhf(2)), Cardinality::Finite(BigUint::one()));
        assert_eq!(card(&paths([1, 1])), Cardinality::Finite(BigUint::from(2u32)));
        assert_eq!(card(&tree(2)), Cardinality::Infinite);
        assert_eq!(card(&BratteliSequence::uhf(2).unroll(3).unwrap()), Cardinality::LowerBound(1));
        // a single split after which both branches are paths: three points
        let tail = PeriodicTail { start: 2, types: vec![0, 1, 2] };
        let s = BratteliSequence::new(
            v(&[1]),
            vec![NonMixingMap::from_u64s(1, &[0, 0, 0], &[1, 1, 1]).unwrap(), NonMixingMap::identity(3)],
            Some(tail),
        )
        .unwrap();
        assert_eq!(card(&s), Cardinality::Finite(BigUint::from(3u32)));
    }

    fn assert_equivalent(a: &BratteliSequence, b: &BratteliSequence, depth: usize) {
        match equivalent_q(a, b, depth, Execution::Parallel).unwrap() {
            EquivVerdict::Equivalent(cert) => {
                assert_eq!(verify_equivalence(&cert), Ok(()));
                assert_eq!(verify_equivalence(&cert.mirrored()), Ok(()));
            }
            other => panic!("expected equivalent, got {other:?}"),
        }
    }

    #[test]
    fn verdict_examples() {
        assert_equivalent(&BratteliSequence::uhf(2), &BratteliSequence::uhf(3), 1);
        assert_equivalent(&paths([2, 7]), &paths([3, 5]), 1);
        assert_equivalent(&tree(2), &tree(3), 1);
        assert_equivalent(&tree(2), &tree(2), 1);
        let verdict = equivalent_q(&BratteliSequence::uhf(2), &paths([1, 1]), 3, Execution::Sequential).unwrap();
        match verdict {
            EquivVerdict::NotEquivalent(w) => {
                assert_eq!(w.to_string(), "limit cardinalities differ: 1 vs 2");
                assert!(verify_witness(&BratteliSequence::uhf(2), &paths([1, 1]), &w));
            }
            other => panic!("{other:?}"),
        }
        let finite = BratteliSequence::uhf(2).unroll(4).unwrap();
        assert_eq!(
            equivalent_q(&finite, &BratteliSequence::uhf(2), 3, Execution::Sequential).unwrap(),
            EquivVerdict::Unknown { depth: 3 }
        );
    }

    #[test]
    fn tampered_certificates_fail() {
        let EquivVerdict::Equivalent(cert) = equivalent_q(&tree(2), &tree(3), 2, Execution::Sequential).unwrap() else {
            panic!()
        };
        let mut bad = (*cert).clone();
        for r in &mut bad.claims {
            if let Justification::Split { expand_a, .. } = &mut r.justification {
                *expand_a += 1;
                break;
            }
        }
        assert!(verify_equivalence(&bad).is_err());
        let mut bad = (*cert).clone();
        bad.classes_b = vec![bad.classes_a[0] + 7; bad.classes_b.len()];
        assert!(verify_equivalence(&bad).is_err());
    }

    #[test]
    fn distribute_breaks_symmetry() {
        // three equal items onto two equal slots: {x},{x,x} only
        let d = distribute(&[4, 4, 4], &[1, 1], 3);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0], vec![(vec![4], 1), (vec![4, 4], 1)]);
        let d = distribute(&[1, 2], &[0, 5], 2);
        assert_eq!(d.len(), 2);
    }
}
