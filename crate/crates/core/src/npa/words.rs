//! Words in the projectors `E_x^a` (Alice) and `F_y^b` (Bob).

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Party {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Letter {
    pub party: Party,
    pub setting: usize,
    pub outcome: usize,
}

impl Letter {
    pub fn alice(setting: usize, outcome: usize) -> Self {
        Self { party: Party::A, setting, outcome }
    }

    pub fn bob(setting: usize, outcome: usize) -> Self {
        Self { party: Party::B, setting, outcome }
    }
}

/// A reduced product of projectors with Alice's letters first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub alice: Vec<Letter>,
    pub bob: Vec<Letter>,
    pub is_zero: bool,
}

impl Word {
    pub fn identity() -> Self {
        Self { alice: vec![], bob: vec![], is_zero: false }
    }

    pub fn zero() -> Self {
        Self { alice: vec![], bob: vec![], is_zero: true }
    }

    pub fn len(&self) -> usize {
        self.alice.len() + self.bob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.alice.iter().chain(&self.bob).copied()
    }

    /// `W†`: each party's letters reversed.
    pub fn adjoint(&self) -> Self {
        let mut w = self.clone();
        w.alice.reverse();
        w.bob.reverse();
        w
    }

    /// Reduction of the product `self · other`.
    pub fn times(&self, other: &Word) -> Word {
        if self.is_zero || other.is_zero {
            return Word::zero();
        }
        let letters: Vec<Letter> = self.letters().chain(other.letters()).collect();
        reduce(&letters)
    }

    /// Representative of `{W, W†}`, which share the real part of their
    /// expectation in any state.
    pub fn symmetric_key(&self) -> Word {
        let adj = self.adjoint();
        if adj < *self {
            adj
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            return write!(f, "0");
        }
        if self.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters()
            .map(|l| format!("{}{}|{}", if l.party == Party::A { "A" } else { "B" }, l.setting, l.outcome))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn reduce_party(letters: impl Iterator<Item = Letter>) -> Option<Vec<Letter>> {
    let mut stack: Vec<Letter> = Vec::new();
    for l in letters {
        match stack.last() {
            Some(top) if top.setting == l.setting => {
                if top.outcome != l.outcome {
                    return None;
                }
            }
            _ => stack.push(l),
        }
    }
    Some(stack)
}

/// Applies `E_a E_a' = δ_aa' E_a` within each party and moves Alice's letters
/// in front of Bob's.
pub fn reduce(letters: &[Letter]) -> Word {
    let alice = reduce_party(letters.iter().copied().filter(|l| l.party == Party::A));
    let bob = reduce_party(letters.iter().copied().filter(|l| l.party == Party::B));
    match (alice, bob) {
        (Some(alice), Some(bob)) => Word { alice, bob, is_zero: false },
        _ => Word::zero(),
    }
}

/// Reduced nonzero single-party words of exactly `len` letters.
fn party_words(party: Party, m: usize, n: usize, len: usize) -> Vec<Vec<Letter>> {
    let gens: Vec<Letter> = (0..m)
        .flat_map(|x| (0..n - 1).map(move |a| Letter { party, setting: x, outcome: a }))
        .collect();
    let mut out: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for g in &gens {
                if w.last().is_none_or(|l| l.setting != g.setting) {
                    let mut v = w.clone();
                    v.push(*g);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

/// All reduced nonzero words of length at most `level`, ordered by length,
/// then by Alice's share (largest first), then lexicographically. Returns
/// `None` once the list would exceed `cap`.
pub fn sequence_set(m: usize, n: usize, level: usize, cap: usize) -> Option<Vec<Word>> {
    let mut words = vec![Word::identity()];
    if n < 2 {
        return Some(words);
    }
    for len in 1..=level {
        for i in (0..=len).rev() {
            let alice = party_words(Party::A, m, n, i);
            let bob = party_words(Party::B, m, n, len - i);
            if words.len() + alice.len() * bob.len() > cap {
                return None;
            }
            for a in &alice {
                for b in &bob {
                    words.push(Word { alice: a.clone(), bob: b.clone(), is_zero: false });
                }
            }
        }
    }
    Some(words)
}
