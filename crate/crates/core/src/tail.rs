//! Lazy unrolling of eventually-periodic forests.
//!
//! A presentation has levels `0..L` (0-based here) and parent functions
//! `parents[m]` from level `m + 1` to level `m`. A periodic tail starting at
//! level `s < L - 1` repeats the block of maps `s..L-1` forever. Every node
//! of the last presented level carries a *type*, a node of level `s`; in the
//! unrolled part each node is a copy of a block node and inherits that block
//! node's children. With identity types and `r_s = r_L` this is plain
//! repetition of the block matrices.
//!
//! Unrolled level `ℓ + 1` lists the pairs `(y, x)` with `x` at level `ℓ`
//! and `y` a block child of `x`'s copy, ordered by `y` first and `x` second.

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tail<'a> {
    pub start: usize,
    pub types: &'a [usize],
}

/// One unrolled connecting map: for each target node its parent and the
/// presented `(map, target)` it copies.
#[derive(Debug, Clone)]
pub(crate) struct Step {
    pub parents: Vec<usize>,
    pub origin: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub(crate) struct Unroller<'a> {
    sizes: &'a [usize],
    parents: &'a [Vec<usize>],
    tail: Option<Tail<'a>>,
    level: usize,
    // block node each node of `level` copies; only meaningful once `level >= L - 1`
    copy: Vec<usize>,
}

impl<'a> Unroller<'a> {
    pub fn new(sizes: &'a [usize], parents: &'a [Vec<usize>], tail: Option<Tail<'a>>) -> Self {
        debug_assert_eq!(sizes.len(), parents.len() + 1);
        Self { sizes, parents, tail, level: 0, copy: Vec::new() }
    }

    fn last(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn size(&self) -> usize {
        if self.level <= self.last() {
            self.sizes[self.level]
        } else {
            self.copy.len()
        }
    }

    /// Block position of the current level and the block node each of its
    /// nodes copies; `None` before the tail starts.
    pub fn phase(&self) -> Option<(usize, Vec<usize>)> {
        let tail = self.tail?;
        if self.level < tail.start {
            return None;
        }
        let period = self.last() - tail.start;
        let base = tail.start + (self.level - tail.start) % period;
        if self.level < self.last() {
            Some((base, (0..self.size()).collect()))
        } else {
            Some((base, self.copy.clone()))
        }
    }

    /// Advances one level, returning the connecting map just crossed.
    pub fn step(&mut self) -> Option<Step> {
        let last = self.last();
        if self.level < last {
            let m = self.level;
            let parents = self.parents[m].clone();
            let origin = (0..parents.len()).map(|j| (m, j)).collect();
            self.level += 1;
            if self.level == last {
                if let Some(tail) = self.tail {
                    self.copy = tail.types.to_vec();
                }
            }
            return Some(Step { parents, origin });
        }
        let tail = self.tail?;
        let period = last - tail.start;
        let base = tail.start + (self.level - tail.start) % period;
        let block = &self.parents[base];
        let mut by_copy: Vec<Vec<usize>> = vec![Vec::new(); self.sizes[base]];
        for (x, &c) in self.copy.iter().enumerate() {
            by_copy[c].push(x);
        }
        let mut parents = Vec::new();
        let mut origin = Vec::new();
        let mut copy = Vec::new();
        for (y, &c) in block.iter().enumerate() {
            let next_copy = if base + 1 < last { y } else { tail.types[y] };
            for &x in &by_copy[c] {
                parents.push(x);
                origin.push((base, y));
                copy.push(next_copy);
            }
        }
        self.copy = copy;
        self.level += 1;
        Some(Step { parents, origin })
    }
}

/// Per presented level, the nodes with descendants at every later level
/// (for finite presentations: at the last presented level).
///
/// On a tail the surviving types form the greatest fixed point of
/// "has a block descendant whose type survives", reached by iterating from
/// the full set.
pub(crate) fn surviving(sizes: &[usize], parents: &[Vec<usize>], tail: Option<Tail<'_>>) -> Vec<Vec<bool>> {
    let last = sizes.len() - 1;
    let back = |alive: &mut Vec<Vec<bool>>, from: usize, to: usize| {
        for m in (to..from).rev() {
            let mut hit = vec![false; sizes[m]];
            for (j, &p) in parents[m].iter().enumerate() {
                if alive[m + 1][j] {
                    hit[p] = true;
                }
            }
            alive[m] = hit;
        }
    };
    let mut alive: Vec<Vec<bool>> = sizes.iter().map(|&r| vec![true; r]).collect();
    match tail {
        None => back(&mut alive, last, 0),
        Some(Tail { start, types }) => {
            let mut types_alive = vec![true; sizes[start]];
            loop {
                alive[last] = types.iter().map(|&t| types_alive[t]).collect();
                back(&mut alive, last, start);
                if alive[start] == types_alive {
                    break;
                }
                types_alive = alive[start].clone();
            }
            back(&mut alive, start, 0);
        }
    }
    alive
}

/// Survival flags for an arbitrary (possibly unrolled) level.
pub(crate) fn surviving_at(
    sizes: &[usize],
    parents: &[Vec<usize>],
    tail: Option<Tail<'_>>,
    presented: &[Vec<bool>],
    level: usize,
) -> Option<Vec<bool>> {
    if level < sizes.len() {
        return Some(presented[level].clone());
    }
    let mut u = Unroller::new(sizes, parents, tail);
    while u.level() < level {
        u.step()?;
    }
    let (base, copy) = u.phase()?;
    Some(copy.iter().map(|&c| presented[base][c]).collect())
}
