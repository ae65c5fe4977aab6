#![allow(dead_code)]

use bratteli::diagram::BratteliSequence;
use bratteli::simplicial::{IntVector, NonMixingMap};

/// Full `k`-ary tree presented on `levels` levels, repeating from level 1.
pub fn tree(k: usize, levels: usize) -> BratteliSequence {
    let mut maps = Vec::new();
    let mut rank = 1;
    for _ in 1..levels {
        let parent: Vec<usize> = (0..rank * k).map(|j| j / k).collect();
        maps.push(NonMixingMap::from_u64s(rank, &parent, &vec![1; rank * k]).unwrap());
        rank *= k;
    }
    BratteliSequence::with_repeat(IntVector::ones(1), maps, 1).unwrap()
}

/// Two parallel paths with the given multiplicities.
pub fn paths(m: [u64; 2]) -> BratteliSequence {
    BratteliSequence::with_repeat(IntVector::ones(2), vec![NonMixingMap::from_u64s(2, &[0, 1], &m).unwrap()], 1).unwrap()
}

pub fn single_path() -> BratteliSequence {
    BratteliSequence::with_repeat(IntVector::ones(1), vec![NonMixingMap::scalar(1)], 1).unwrap()
}

/// `(name, text, valid)`.
pub fn corpus() -> Vec<(&'static str, String, bool)> {
    let ok = |name, text: &str| (name, text.to_string(), true);
    let bad = |name, text: &str| (name, text.to_string(), false);
    vec![
        ok("uhf2", "bratteli v1\nsizes: 1 1\nunit: 1\nmap 1: 1*2\nrepeat: 1\n"),
        ok("uhf6 comments", "# six\nbratteli v1   # header\n\nsizes: 1 1\nunit: 3\nmap 1: 1*6\nrepeat: 1\n"),
        ok("finite", "bratteli v1\nsizes: 1 2 2\nunit: 1\nmap 1: 1*1 1*2\nmap 2: 1*1 2*3\n"),
        ok("single level", "bratteli v1\nsizes: 3\nunit: 1 2 3\n"),
        ok("tree", "bratteli v1\nsizes: 1 2 4\nunit: 1\nmap 1: 1*1 1*1\nmap 2: 1*1 1*1 2*1 2*1\n"),
        ok("tree repeating", "bratteli v1\nsizes: 1 2\nunit: 1\nmap 1: 1*1 1*1\nrepeat: 1\n"),
        ok("two paths", "bratteli v1\nsizes: 2 2\nunit: 1 1\nmap 1: 1*2 2*7\nrepeat: 1\n"),
        ok("period two", "bratteli v1\nsizes: 1 1 1\nunit: 1\nmap 1: 1*2\nmap 2: 1*3\nrepeat: 1\n"),
        ok("late tail", "bratteli v1\nsizes: 1 2 2 2\nunit: 5\nmap 1: 1*1 1*1\nmap 2: 2*1 1*1\nmap 3: 1*2 2*2\nrepeat: 3\n"),
        ok("typed tail", "bratteli v1\nsizes: 2 3\nunit: 1 2\nmap 1: 1*1 1*2 2*3\nrepeat: 1 as 1 1 2\n"),
        ok("maps out of order", "bratteli v1\nsizes: 1 2 2\nunit: 1\nmap 2: 1*1 2*1\nmap 1: 1*1 1*1\nrepeat: 2\n"),
        ok("big numbers", "bratteli v1\nsizes: 1 1\nunit: 123456789012345678901234567890\nmap 1: 1*98765432109876543210\n"),
        ok("non-injective", "bratteli v1\nsizes: 3 1\nunit: 1 1 1\nmap 1: 2*4\nrepeat: 1 as 2\n"),
        bad("wrong header", "bratteli v2\nsizes: 1\nunit: 1\n"),
        bad("empty", ""),
        bad("parent out of range", "bratteli v1\nsizes: 1 2\nunit: 1\nmap 1: 1*1 3*2\n"),
        bad("too few tokens", "bratteli v1\nsizes: 1 2\nunit: 1\nmap 1: 1*1\n"),
        bad("zero multiplicity", "bratteli v1\nsizes: 1 1\nunit: 1\nmap 1: 1*0\n"),
        bad("zero unit", "bratteli v1\nsizes: 1 1\nunit: 0\nmap 1: 1*2\n"),
        bad("unit rank", "bratteli v1\nsizes: 2 1\nunit: 1\nmap 1: 1*1\n"),
        bad("missing map", "bratteli v1\nsizes: 1 1 1\nunit: 1\nmap 1: 1*2\n"),
        bad("duplicate sizes", "bratteli v1\nsizes: 1\nsizes: 1\nunit: 1\n"),
        bad("ranks do not close", "bratteli v1\nsizes: 2 3\nunit: 1 1\nmap 1: 1*1 1*1 2*1\nrepeat: 1\n"),
        bad("repeat out of range", "bratteli v1\nsizes: 1 1\nunit: 1\nmap 1: 1*2\nrepeat: 2\n"),
        bad("bad token", "bratteli v1\nsizes: 1 1\nunit: 1\nmap 1: 1x2\n"),
        bad("unknown key", "bratteli v1\nsizes: 1\nunit: 1\ncolour: blue\n"),
        bad("tail dies out", "bratteli v1\nsizes: 2 3 3 1\nunit: 1 4\nmap 1: 2*4 1*2 1*4\nmap 2: 1*4 1*4 3*1\nmap 3: 2*3\nrepeat: 2 as 3\n"),
        bad("zero size", "bratteli v1\nsizes: 1 0\nunit: 1\n"),
    ]
}
