//! Rescaling diagonals through non-mixing maps, and the two-row ladder that
//! changes the order-unit of a sequence up to tensoring with `ℚ_n`, `ℚ_m`.
//!
//! The ladder alternates diagonals `δ_1, δ_2, …` where `δ_i` goes from the
//! top row to the bottom row at odd `i` and back up at even `i`. Rung `i`
//! is the identity `δ_{i+1} ∘ α_i ∘ δ_i = c_i·α_i`; odd rungs scale the top
//! row and even rungs scale the bottom row.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::diagram::BratteliSequence;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::simplicial::{IntVector, NonMixingMap};
use crate::supernat::{factorize, Exponent, SupernaturalNumber};

// recurrence search stops at whichever limit is hit first
const RECURRENCE_LEVELS: usize = 256;
const RECURRENCE_RANK: usize = 4096;
const RECURRENCE_BITS: u64 = 1 << 16;

/// `x ↦ (l₁x₁, …, l_r x_r)` with every `l_i ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagonalMap {
    entries: Vec<BigUint>,
}

impl DiagonalMap {
    pub fn new(entries: Vec<BigUint>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::RankMismatch { expected: 1, found: 0 });
        }
        if let Some(row) = entries.iter().position(Zero::is_zero) {
            return Err(Error::NotNonMixing { row: row + 1, nonzero: 0 });
        }
        Ok(Self { entries })
    }

    pub fn from_u64s(entries: &[u64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| BigUint::from(x)).collect())
    }

    pub fn identity(rank: usize) -> Self {
        Self { entries: vec![BigUint::one(); rank] }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn apply(&self, x: &IntVector) -> Result<IntVector> {
        x.check_rank(self.rank())?;
        Ok(IntVector(
            x.0.iter()
                .zip(&self.entries)
                .map(|(a, l)| a * BigInt::from(l.clone()))
                .collect(),
        ))
    }

    pub fn as_map(&self) -> NonMixingMap {
        NonMixingMap::new(self.rank(), (0..self.rank()).collect(), self.entries.clone())
            .expect("diagonal entries are positive")
    }
}

impl fmt::Display for DiagonalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("diag(")?;
        for (i, l) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

/// How the scalar `n` of [`rescale_lemma`] is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// `n = lcm{l_{i_j}}`, the smallest valid choice.
    #[default]
    Minimal,
    /// `n = k₁⋯k_s·l_{i₁}⋯l_{i_s}`.
    Paper,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Minimal => "minimal",
            Strategy::Paper => "paper",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "minimal" => Ok(Strategy::Minimal),
            "paper" => Ok(Strategy::Paper),
            other => Err(format!("unknown strategy `{other}` (expected minimal or paper)")),
        }
    }
}

/// Finds `n` and a diagonal `η` with `η ∘ α ∘ γ = n·α`, namely
/// `η_j = n / l_{i_j}`.
pub fn rescale_lemma(alpha: &NonMixingMap, gamma: &DiagonalMap, strategy: Strategy) -> Result<(BigUint, DiagonalMap)> {
    if gamma.rank() != alpha.source_rank() {
        return Err(Error::RankMismatch { expected: alpha.source_rank(), found: gamma.rank() });
    }
    let pulled = alpha.parent().iter().map(|&p| &gamma.entries[p]);
    let n = match strategy {
        Strategy::Minimal => pulled.fold(BigUint::one(), |acc, l| acc.lcm(l)),
        Strategy::Paper => {
            let ks: BigUint = alpha.mult().iter().product();
            ks * pulled.product::<BigUint>()
        }
    };
    let eta = alpha
        .parent()
        .iter()
        .map(|&p| {
            let (q, r) = n.div_rem(&gamma.entries[p]);
            debug_assert!(r.is_zero());
            q
        })
        .collect();
    Ok((n, DiagonalMap::new(eta)?))
}

/// Checks `η ∘ α ∘ γ = n·α` entrywise.
pub fn rescale_holds(alpha: &NonMixingMap, gamma: &DiagonalMap, n: &BigUint, eta: &DiagonalMap) -> bool {
    gamma.rank() == alpha.source_rank()
        && eta.rank() == alpha.target_rank()
        && alpha
            .parent()
            .iter()
            .zip(alpha.mult())
            .zip(&eta.entries)
            .all(|((&p, k), e)| e * k * &gamma.entries[p] == n * k)
}

/// Which row of the ladder a rung rescales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Row {
    Top,
    Bottom,
}

impl Row {
    /// Rung `i` (1-based) scales the top row when `i` is odd.
    pub fn of_rung(i: usize) -> Row {
        if i % 2 == 1 {
            Row::Top
        } else {
            Row::Bottom
        }
    }
}

/// The ladder repeats from `from` on with period `period` (both in levels);
/// `scalars` lists `c_1, …, c_{from+period-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    pub from: usize,
    pub period: usize,
    pub scalars: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitChangeCertificate {
    /// The sequence with its original unit `u₁`.
    pub seq: BratteliSequence,
    pub w1: IntVector,
    pub strategy: Strategy,
    pub m1: BigUint,
    /// `δ_1, …, δ_{D+1}`.
    pub diagonals: Vec<DiagonalMap>,
    /// `c_1, …, c_D`.
    pub scalars: Vec<BigUint>,
    pub recurrence: Option<Recurrence>,
}

/// `n` and `m` of the ladder; exact when the ladder was seen to recur.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderSupernaturals {
    pub n: SupernaturalNumber,
    pub m: SupernaturalNumber,
    pub exact: bool,
}

/// A rung that fails its check; rung 0 is the first diagonal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("rung {rung}: {reason}")]
pub struct LadderFailure {
    pub rung: usize,
    pub reason: String,
}

impl LadderFailure {
    fn new(rung: usize, reason: impl Into<String>) -> Self {
        Self { rung, reason: reason.into() }
    }
}

impl UnitChangeCertificate {
    pub fn depth(&self) -> usize {
        self.scalars.len()
    }

    pub fn u1(&self) -> &IntVector {
        self.seq.base_unit()
    }

    /// `m₁·w₁`, the bottom unit at level 1.
    pub fn scaled_w1(&self) -> IntVector {
        self.w1.scale(&BigInt::from(self.m1.clone()))
    }

    /// Supernaturals of the cumulative products of the top scalars and of
    /// `m₁` followed by the bottom scalars. `None` if a scalar has a prime
    /// factor outside the data of the sequence and units.
    pub fn supernaturals(&self) -> Option<LadderSupernaturals> {
        let primes = prime_base(&self.seq, &self.w1);
        let (scalars, tail) = match &self.recurrence {
            Some(r) => (&r.scalars[..], Some(r.from - 1..r.from - 1 + r.period)),
            None => (&self.scalars[..], None),
        };
        let mut top = BTreeMap::new();
        let mut bottom = BTreeMap::new();
        add_factors(&mut bottom, &self.m1, &primes, false)?;
        for (idx, c) in scalars.iter().enumerate() {
            let infinite = tail.as_ref().is_some_and(|t| t.contains(&idx));
            let target = match Row::of_rung(idx + 1) {
                Row::Top => &mut top,
                Row::Bottom => &mut bottom,
            };
            add_factors(target, c, &primes, infinite)?;
        }
        let build = |f: BTreeMap<u64, Exponent>| SupernaturalNumber::from_factors(f).expect("primes");
        Some(LadderSupernaturals { n: build(top), m: build(bottom), exact: tail.is_some() })
    }
}

fn prime_base(seq: &BratteliSequence, w1: &IntVector) -> Vec<u64> {
    let mut primes = std::collections::BTreeSet::new();
    let mut add = |x: Option<u64>| {
        if let Some(x) = x {
            primes.extend(factorize(x).into_iter().map(|(p, _)| p));
        }
    };
    for x in seq.base_unit().entries().iter().chain(w1.entries()) {
        add(x.to_u64());
    }
    for m in seq.maps() {
        for k in m.mult() {
            add(k.to_u64());
        }
    }
    primes.into_iter().collect()
}

fn add_factors(acc: &mut BTreeMap<u64, Exponent>, x: &BigUint, primes: &[u64], infinite: bool) -> Option<()> {
    let mut rest = x.clone();
    for &p in primes {
        let bp = BigUint::from(p);
        let mut e = 0u64;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            let new = if infinite { Exponent::Infinite } else { Exponent::Finite(e) };
            let slot = acc.entry(p).or_insert(Exponent::Finite(0));
            *slot = match (*slot, new) {
                (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a + b),
                _ => Exponent::Infinite,
            };
        }
    }
    rest.is_one().then_some(())
}

/// State that determines the rest of the ladder: block position, rung
/// parity, and the diagonal as a function of the copied block node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct LadderState {
    base: usize,
    parity: usize,
    entries: Vec<(usize, BigUint, usize)>,
}

fn ladder_state(level: usize, phase: Option<(usize, Vec<usize>)>, delta: &DiagonalMap, strategy: Strategy) -> Option<LadderState> {
    let (base, copy) = phase?;
    let mut by_copy: BTreeMap<usize, (BigUint, usize)> = BTreeMap::new();
    for (c, l) in copy.iter().zip(&delta.entries) {
        match by_copy.get_mut(c) {
            Some((prev, count)) => {
                if prev != l {
                    return None;
                }
                *count += 1;
            }
            None => {
                by_copy.insert(*c, (l.clone(), 1));
            }
        }
    }
    // the minimal strategy only sees which values occur; the product
    // strategy also sees how often
    let entries = by_copy
        .into_iter()
        .map(|(c, (l, k))| (c, l, if strategy == Strategy::Paper { k } else { 0 }))
        .collect();
    Some(LadderState { base, parity: level % 2, entries })
}

/// First diagonal `γ₁`: entries `(m₁/u_{1i})·w_{1i}` with `m₁ = ∏ u_{1i}`.
pub fn first_diagonal(u1: &IntVector, w1: &IntVector) -> Result<(BigUint, DiagonalMap)> {
    if !u1.is_order_unit() || !w1.is_order_unit() {
        return Err(Error::NotOrderUnit);
    }
    w1.check_rank(u1.rank())?;
    let u: Vec<BigUint> = u1.entries().iter().map(|x| x.magnitude().clone()).collect();
    let m1: BigUint = u.iter().product();
    let entries = u
        .iter()
        .zip(w1.entries())
        .map(|(ui, wi)| &m1 / ui * wi.magnitude())
        .collect();
    Ok((m1, DiagonalMap::new(entries)?))
}

/// Builds the ladder to depth `D` (rungs `1..=D`). On a periodic sequence the
/// ladder is continued past `D` until its state recurs, which makes the
/// reported supernaturals exact.
pub fn unit_change(seq: &BratteliSequence, w1: &IntVector, depth: usize, strategy: Strategy) -> Result<UnitChangeCertificate> {
    let (m1, first) = first_diagonal(seq.base_unit(), w1)?;
    seq.check_level(depth + 1)?;
    let mut walk = seq.walk();
    let mut diagonals = vec![first];
    let mut scalars = Vec::new();
    let mut seen: HashMap<LadderState, usize> = HashMap::new();
    let mut recurrence = None;
    loop {
        let level = walk.level();
        let delta = diagonals.last().unwrap();
        if seq.is_periodic() && recurrence.is_none() {
            if let Some(state) = ladder_state(level, walk.phase(), delta, strategy) {
                if let Some(&from) = seen.get(&state) {
                    recurrence = Some((from, level - from));
                } else {
                    seen.insert(state, level);
                }
            }
        }
        let done = level > depth
            && (recurrence.is_some()
                || !seq.is_periodic()
                || level >= RECURRENCE_LEVELS
                || walk.rank() > RECURRENCE_RANK
                || delta.entries.iter().map(|l| l.bits()).sum::<u64>() > RECURRENCE_BITS);
        if done {
            break;
        }
        let alpha = walk.advance().expect("level checked");
        let (c, next) = rescale_lemma(&alpha, delta, strategy)?;
        scalars.push(c);
        diagonals.push(next);
    }
    let recurrence = recurrence.map(|(from, period)| Recurrence {
        from,
        period,
        scalars: scalars[..from + period - 1].to_vec(),
    });
    diagonals.truncate(depth + 1);
    scalars.truncate(depth);
    Ok(UnitChangeCertificate { seq: seq.clone(), w1: w1.clone(), strategy, m1, diagonals, scalars, recurrence })
}

/// Rechecks every rung by expansion, the unit images rung by rung, and any
/// recurrence claim. Reports the lowest failing rung.
pub fn verify_certificate(cert: &UnitChangeCertificate, exec: Execution) -> std::result::Result<(), LadderFailure> {
    let depth = cert.depth();
    if cert.diagonals.len() != depth + 1 {
        return Err(LadderFailure::new(0, "diagonal count does not match depth"));
    }
    let u1 = cert.u1();
    if !cert.w1.is_order_unit() || cert.w1.rank() != u1.rank() {
        return Err(LadderFailure::new(0, "w₁ is not an order-unit of the first level"));
    }
    let m1: BigUint = u1.entries().iter().map(|x| x.magnitude().clone()).product();
    if m1 != cert.m1 {
        return Err(LadderFailure::new(0, "m₁ is not the product of the entries of u₁"));
    }
    let maps = cert
        .seq
        .maps_upto(depth + 1)
        .map_err(|e| LadderFailure::new(depth, e.to_string()))?;
    // unit of each row at each level, top then bottom
    let mut top = vec![u1.clone()];
    let mut bottom = vec![cert.scaled_w1()];
    for (i, (alpha, c)) in maps.iter().zip(&cert.scalars).enumerate() {
        let c = BigInt::from(c.clone());
        let t = alpha.apply(&top[i]).map_err(|e| LadderFailure::new(i + 1, e.to_string()))?;
        let b = alpha.apply(&bottom[i]).map_err(|e| LadderFailure::new(i + 1, e.to_string()))?;
        match Row::of_rung(i + 1) {
            Row::Top => {
                top.push(t.scale(&c));
                bottom.push(b);
            }
            Row::Bottom => {
                top.push(t);
                bottom.push(b.scale(&c));
            }
        }
    }
    let check_unit = |i: usize| -> std::result::Result<(), String> {
        // δ_{i+1} runs down at odd levels
        let (from, to) = if i.is_multiple_of(2) { (&top[i], &bottom[i]) } else { (&bottom[i], &top[i]) };
        let image = cert.diagonals[i].apply(from).map_err(|e| e.to_string())?;
        if &image != to {
            return Err(format!("unit image {image} differs from {to}"));
        }
        Ok(())
    };
    check_unit(0).map_err(|r| LadderFailure::new(0, r))?;
    let rungs: Vec<usize> = (0..depth).collect();
    let failure = exec.first_failure(&rungs, |_, &i| {
        let alpha = &maps[i];
        if !rescale_holds(alpha, &cert.diagonals[i], &cert.scalars[i], &cert.diagonals[i + 1]) {
            return Err("the rescaling identity fails".to_string());
        }
        check_unit(i + 1)
    });
    if let Some((i, reason)) = failure {
        return Err(LadderFailure::new(i + 1, reason));
    }
    if let Some(r) = &cert.recurrence {
        let rebuilt = unit_change(&cert.seq, &cert.w1, depth, cert.strategy)
            .map_err(|e| LadderFailure::new(depth, e.to_string()))?;
        if rebuilt.recurrence.as_ref() != Some(r) {
            return Err(LadderFailure::new(r.from, "claimed recurrence does not reproduce"));
        }
    }
    Ok(())
}

/// Coordinate permutations `π_i` (level `i`, A index → B index) carrying one
/// presentation onto another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationIso {
    pub perms: Vec<Vec<usize>>,
}

impl PresentationIso {
    pub fn identity(ranks: &[usize]) -> Self {
        Self { perms: ranks.iter().map(|&r| (0..r).collect()).collect() }
    }

    pub fn apply(&self, level: usize, x: &IntVector) -> IntVector {
        let perm = &self.perms[level - 1];
        let mut out = x.clone();
        for (j, &pj) in perm.iter().enumerate() {
            out.0[pj] = x.0[j].clone();
        }
        out
    }

    /// Checks `β_i ∘ π_i = π_{i+1} ∘ α_i` on every covered level.
    pub fn check(&self, a: &BratteliSequence, b: &BratteliSequence) -> std::result::Result<(), String> {
        let levels = self.perms.len();
        let ma = a.maps_upto(levels).map_err(|e| e.to_string())?;
        let mb = b.maps_upto(levels).map_err(|e| e.to_string())?;
        for (i, perm) in self.perms.iter().enumerate() {
            let mut hit = vec![false; perm.len()];
            for &p in perm {
                if p >= hit.len() || hit[p] {
                    return Err(format!("level {} permutation is not a bijection", i + 1));
                }
                hit[p] = true;
            }
        }
        for (i, (fa, fb)) in ma.iter().zip(&mb).enumerate() {
            let (src, dst) = (&self.perms[i], &self.perms[i + 1]);
            if fa.source_rank() != src.len() || fb.target_rank() != dst.len() || fa.target_rank() != dst.len() {
                return Err(format!("level {} ranks differ", i + 1));
            }
            for (j, (&p, k)) in fa.parent().iter().zip(fa.mult()).enumerate() {
                let bj = dst[j];
                if fb.parent()[bj] != src[p] || &fb.mult()[bj] != k {
                    return Err(format!("map {} does not commute with the permutations", i + 1));
                }
            }
        }
        Ok(())
    }
}

/// `⟨A,u⟩ ∼ ⟨A,w⟩ ≅ ⟨B,z⟩ ∼ ⟨B,v⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateChain {
    /// `A` with unit `u`, changed to `w`.
    pub left: UnitChangeCertificate,
    /// `A` onto `B`.
    pub iso: PresentationIso,
    /// `B` with unit `z`, changed to `v`.
    pub right: UnitChangeCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainFailure {
    #[error("left ladder: {0}")]
    Left(LadderFailure),
    #[error("right ladder: {0}")]
    Right(LadderFailure),
    #[error("isomorphism: {0}")]
    Iso(String),
    #[error("the isomorphism does not carry w to z")]
    Glue,
}

pub fn verify_chain(chain: &CertificateChain, exec: Execution) -> std::result::Result<(), ChainFailure> {
    verify_certificate(&chain.left, exec).map_err(ChainFailure::Left)?;
    verify_certificate(&chain.right, exec).map_err(ChainFailure::Right)?;
    let needed = chain.left.depth().max(chain.right.depth()) + 1;
    if chain.iso.perms.len() < needed {
        return Err(ChainFailure::Iso(format!("covers {} levels, ladders need {needed}", chain.iso.perms.len())));
    }
    chain.iso.check(&chain.left.seq, &chain.right.seq).map_err(ChainFailure::Iso)?;
    if chain.iso.perms[0].len() != chain.left.w1.rank()
        || &chain.iso.apply(1, &chain.left.w1) != chain.right.u1()
    {
        return Err(ChainFailure::Glue);
    }
    Ok(())
}
