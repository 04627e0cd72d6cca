//! Words in the standard genus-g surface group presentation
//! ⟨a₁,b₁,…,a_g,b_g | [a₁,b₁]⋯[a_g,b_g]⟩ and the conjugacy canonical form.
//!
//! Letters are small integers: letter 2k is the k-th generator
//! (a₁,b₁,a₂,b₂,… in order), letter 2k+1 its inverse, so inversion is
//! `xor 1` and the numeric order realizes a₁ < a₁⁻¹ < b₁ < b₁⁻¹ < ….
//!
//! The presentation satisfies the metric small-cancellation condition
//! C'(1/8) (pieces have length 1), so Dehn's algorithm decides the word and
//! conjugacy problems: a cyclic word is geodesic once it contains no cyclic
//! subword longer than half of any relator rotation, and two geodesic cyclic
//! words represent conjugate elements exactly when they are connected by
//! rotations and half-relator swaps. The canonical class representative
//! implemented here is the lexicographic minimum over that closure.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// One letter: generator index and orientation packed in a byte.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u8) << 1 | inverse as u8)
    }

    pub fn generator(&self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(&self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(&self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

impl fmt::Display for Letter {
    /// Token form: `a1`, `b1`, `a2`, … with capitals for inverses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.generator();
        let c = if g % 2 == 0 { 'a' } else { 'b' };
        let c = if self.is_inverse() { c.to_ascii_uppercase() } else { c };
        write!(f, "{}{}", c, g / 2 + 1)
    }
}

/// A word over the presentation letters. Most constructors freely reduce.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    /// Freely reduced word from raw letters.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(it: I) -> Self {
        let mut w = Word::empty();
        for l in it {
            w.push(l);
        }
        w
    }

    pub(crate) fn from_raw(letters: Vec<u8>) -> Self {
        Word { letters: free_reduce(&letters) }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.letters.iter().map(|&l| Letter(l))
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.letters
    }

    /// Push one letter, cancelling against the tail.
    pub fn push(&mut self, l: Letter) {
        if self.letters.last() == Some(&(l.0 ^ 1)) {
            self.letters.pop();
        } else {
            self.letters.push(l.0);
        }
    }

    pub fn concat(&self, rhs: &Word) -> Word {
        let mut out = self.clone();
        for l in rhs.letters() {
            out.push(l);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|&l| l ^ 1).collect() }
    }

    pub fn pow(&self, k: usize) -> Word {
        let mut out = Word::empty();
        for _ in 0..k {
            out = out.concat(self);
        }
        out
    }

    /// Cyclically reduced core (conjugate to self).
    pub fn cyclic_reduced(&self) -> Word {
        let mut w = self.letters.clone();
        loop {
            w = free_reduce(&w);
            if w.len() >= 2 && w[0] == *w.last().unwrap() ^ 1 {
                w = w[1..w.len() - 1].to_vec();
            } else {
                break;
            }
        }
        Word { letters: w }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.letters.len() == 1 || f != l ^ 1,
            _ => true,
        }
    }

    /// Lexicographically minimal rotation (the word must be cyclic).
    pub fn min_rotation(&self) -> Word {
        Word { letters: min_rotation(&self.letters) }
    }

    /// Smallest cyclic period: returns (primitive?, k, root) with
    /// root^k = self as cyclic words.
    pub fn primitive_root(&self) -> (bool, usize, Word) {
        let n = self.letters.len();
        if n == 0 {
            return (true, 1, self.clone());
        }
        for p in 1..n {
            if n % p != 0 {
                continue;
            }
            if (p..n).all(|i| self.letters[i] == self.letters[i - p]) {
                return (false, n / p, Word { letters: self.letters[..p].to_vec() });
            }
        }
        (true, 1, self.clone())
    }

    /// Parse the token form produced by Display (`a1B2A1…`).
    pub fn parse(s: &str) -> Option<Word> {
        let bytes = s.as_bytes();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let inv = c.is_ascii_uppercase();
            let family = c.to_ascii_lowercase();
            if family != 'a' && family != 'b' {
                return None;
            }
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let idx: usize = s[start..i].parse().ok()?;
            if idx == 0 {
                return None;
            }
            let gen = (idx - 1) * 2 + if family == 'b' { 1 } else { 0 };
            letters.push(Letter::new(gen, inv).0);
        }
        Some(Word::from_raw(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

pub(crate) fn free_reduce(input: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::with_capacity(input.len());
    for &l in input {
        if out.last() == Some(&(l ^ 1)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub(crate) fn min_rotation(w: &[u8]) -> Vec<u8> {
    let n = w.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best = 0usize;
    for i in 1..n {
        for k in 0..n {
            let a = w[(i + k) % n];
            let b = w[(best + k) % n];
            if a != b {
                if a < b {
                    best = i;
                }
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&w[best..]);
    out.extend_from_slice(&w[..best]);
    out
}

/// Matching tables for one surface-group relator: every subword (length 2..=R)
/// of every cyclic rotation of r and r⁻¹, mapped to its complement. Because
/// pieces have length 1, a subword of length ≥ 2 determines its position.
#[derive(Clone, Debug)]
pub struct Relator {
    word: Vec<u8>,
    /// packed subword -> complement (u = complement⁻¹ in the group)
    table: alloc::collections::BTreeMap<u64, Vec<u8>>,
    /// O(1) membership for forbidden straight windows of length OVER_HALF
    forbidden: Vec<bool>,
    /// letters per relator (8 for genus 2)
    len: usize,
}

/// Window length whose presence certifies a word is not Dehn-reduced
/// (strictly more than half of the genus-2 relator).
pub const OVER_HALF: usize = 5;

fn pack(w: &[u8]) -> u64 {
    let mut key = w.len() as u64;
    for &l in w {
        key = key << 3 | l as u64;
    }
    key
}

impl Relator {
    pub fn new(relator: &Word) -> Self {
        let r = relator.raw().to_vec();
        let len = r.len();
        assert!(len == 8, "expected a genus-2 style length-8 relator");
        let mut table = alloc::collections::BTreeMap::new();
        let inv: Vec<u8> = r.iter().rev().map(|&l| l ^ 1).collect();
        for base in [&r, &inv] {
            for rot in 0..len {
                let mut cyc: Vec<u8> = Vec::with_capacity(len);
                cyc.extend_from_slice(&base[rot..]);
                cyc.extend_from_slice(&base[..rot]);
                for k in 2..=len {
                    let u = &cyc[..k];
                    let v = cyc[k..].to_vec();
                    table.insert(pack(u), v);
                }
            }
        }
        let mut forbidden = alloc::vec![false; 1 << (3 * OVER_HALF)];
        for (&key, _) in table.iter() {
            if key >> (3 * OVER_HALF) == OVER_HALF as u64 {
                let mask = (1u64 << (3 * OVER_HALF)) - 1;
                forbidden[(key & mask) as usize] = true;
            }
        }
        Relator { word: r, table, forbidden, len }
    }

    pub fn word(&self) -> Word {
        Word { letters: self.word.clone() }
    }

    /// True when the last OVER_HALF letters of `w` form more than half of a
    /// relator rotation; any extension of such a straight word stays
    /// non-canonical, so enumerations may prune there.
    #[inline]
    pub fn suffix_forbidden(&self, w: &[u8]) -> bool {
        if w.len() < OVER_HALF {
            return false;
        }
        let mut key = 0usize;
        for &l in &w[w.len() - OVER_HALF..] {
            key = key << 3 | l as usize;
        }
        self.forbidden[key]
    }

    fn complement(&self, sub: &[u8]) -> Option<&Vec<u8>> {
        self.table.get(&pack(sub))
    }

    /// One pass of cyclic Dehn shortening: replace a cyclic subword of
    /// length > R/2 matching a relator rotation by the inverse complement.
    fn shorten_once(&self, w: &[u8]) -> Option<Vec<u8>> {
        let n = w.len();
        if n < OVER_HALF {
            return None;
        }
        let mut doubled = Vec::with_capacity(2 * n);
        doubled.extend_from_slice(w);
        doubled.extend_from_slice(w);
        for k in (OVER_HALF..=self.len.min(n)).rev() {
            for i in 0..n {
                let sub = &doubled[i..i + k];
                if let Some(v) = self.complement(sub) {
                    let mut nw: Vec<u8> = v.iter().rev().map(|&l| l ^ 1).collect();
                    nw.extend_from_slice(&doubled[i + k..i + n]);
                    let red = Word::from_raw(nw).cyclic_reduced();
                    return Some(red.raw().to_vec());
                }
            }
        }
        None
    }

    /// Same-length neighbors under one half-relator swap (4 ↔ 4).
    fn half_swaps(&self, w: &[u8], out: &mut Vec<Vec<u8>>) {
        out.clear();
        let n = w.len();
        let half = self.len / 2;
        if n < half {
            return;
        }
        let mut doubled = Vec::with_capacity(2 * n);
        doubled.extend_from_slice(w);
        doubled.extend_from_slice(w);
        for i in 0..n {
            let sub = &doubled[i..i + half];
            if let Some(v) = self.complement(sub) {
                let mut nw: Vec<u8> = v.iter().rev().map(|&l| l ^ 1).collect();
                nw.extend_from_slice(&doubled[i + half..i + n]);
                let red = Word::from_raw(nw).cyclic_reduced();
                out.push(red.raw().to_vec());
            }
        }
    }

    /// Canonical representative of the conjugacy class of `w`: the
    /// lexicographically minimal cyclic word among everything reachable by
    /// cyclic reduction, Dehn shortening and half-relator swaps. The empty
    /// word is the identity class.
    pub fn canonical_class(&self, w: &Word) -> Word {
        let mut cur = w.cyclic_reduced().raw().to_vec();
        loop {
            while let Some(s) = self.shorten_once(&cur) {
                cur = s;
            }
            if cur.is_empty() {
                return Word::empty();
            }
            // closure over half swaps at this (minimal so far) length
            let start = min_rotation(&cur);
            let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
            seen.insert(start.clone());
            let mut stack = alloc::vec![start];
            let mut swaps: Vec<Vec<u8>> = Vec::new();
            let mut shorter: Option<Vec<u8>> = None;
            while let Some(state) = stack.pop() {
                self.half_swaps(&state, &mut swaps);
                for nb in swaps.drain(..) {
                    if nb.len() < state.len() {
                        shorter = Some(nb);
                        break;
                    }
                    let key = min_rotation(&nb);
                    if seen.insert(key.clone()) {
                        stack.push(key);
                    }
                }
                if shorter.is_some() {
                    break;
                }
                assert!(seen.len() <= 200_000, "half-swap closure blew up");
            }
            match shorter {
                Some(s) => cur = s,
                None => {
                    return Word { letters: seen.into_iter().next().unwrap() };
                }
            }
        }
    }
}

/// Dehn-twist substitution along the nonseparating curve a₂ on the shipped
/// genus-2 marking: b₂ ↦ b₂·a₂ᵏ (and b₂⁻¹ ↦ a₂⁻ᵏ·b₂⁻¹), other generators
/// fixed. This is an automorphism: the relator maps to itself.
pub fn twist_word(w: &Word, k: i64) -> Word {
    let a2 = Letter::new(2, false);
    let a2i = Letter::new(2, true);
    let b2 = Letter::new(3, false);
    let b2i = Letter::new(3, true);
    let mut out = Word::empty();
    for l in w.letters() {
        if l == b2 {
            out.push(b2);
            for _ in 0..k.unsigned_abs() {
                out.push(if k >= 0 { a2 } else { a2i });
            }
        } else if l == b2i {
            for _ in 0..k.unsigned_abs() {
                out.push(if k >= 0 { a2i } else { a2 });
            }
            out.push(b2i);
        } else {
            out.push(l);
        }
    }
    out
}

/// Canonical cyclic form in the free group only (cyclic reduction + minimal
/// rotation); class identity in the surface group needs `Relator::canonical_class`.
pub fn canonical_cyclic(w: &Word) -> Result<Word, Error> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(w.cyclic_reduced().min_rotation())
}
