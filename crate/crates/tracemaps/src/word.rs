//! Words of the free group on two generators, and substitution homomorphisms.
//!
//! A [`Word`] is a freely reduced word over `{a, b, a⁻¹, b⁻¹}`, stored as
//! run-length blocks `(generator, signed exponent)`. A [`Substitution`] is a
//! homomorphism of the free group, given by the images of the two generators.
//! Powercounting sends every substitution to its 2×2 integer substitution
//! matrix; automorphisms land in Gl(2,ℤ).

use num_bigint::BigInt;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// One of the two free generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    A,
    B,
}

impl Gen {
    /// Lowercase letter for the generator, uppercase for its inverse.
    pub fn symbol(self, inverse: bool) -> char {
        match (self, inverse) {
            (Gen::A, false) => 'a',
            (Gen::A, true) => 'A',
            (Gen::B, false) => 'b',
            (Gen::B, true) => 'B',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordParseError {
    #[error("BadLetter: unexpected character {0:?} in word (expected a, b, A, B)")]
    BadLetter(char),
    #[error("BadRule: substitution rule must be of the form \"a->...;b->...\", got {0:?}")]
    BadRule(String),
}

/// A freely reduced word in the free group on `a` and `b`.
///
/// Invariants: adjacent blocks carry distinct generators, no block has
/// exponent zero. The empty block list is the neutral element `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    blocks: Vec<(Gen, i64)>,
}

impl Word {
    /// The neutral element `e`.
    pub fn empty() -> Self {
        Word { blocks: Vec::new() }
    }

    /// Single generator as a word.
    pub fn gen(g: Gen) -> Self {
        Word {
            blocks: vec![(g, 1)],
        }
    }

    /// `g^e`, reduced (`e = 0` gives the empty word).
    pub fn power(g: Gen, e: i64) -> Self {
        if e == 0 {
            Word::empty()
        } else {
            Word {
                blocks: vec![(g, e)],
            }
        }
    }

    /// Free reduction of a raw block sequence. Idempotent; merging is
    /// confluent, so any cancellation order yields this result.
    pub fn reduce(raw: &[(Gen, i64)]) -> Self {
        let mut w = Word::empty();
        for &(g, e) in raw {
            w.push_block(g, e);
        }
        w
    }

    /// Append `g^e`, merging with the tail and cancelling zeros.
    fn push_block(&mut self, g: Gen, e: i64) {
        if e == 0 {
            return;
        }
        match self.blocks.last_mut() {
            Some((tg, te)) if *tg == g => {
                *te += e;
                if *te == 0 {
                    self.blocks.pop();
                }
            }
            _ => self.blocks.push((g, e)),
        }
    }

    /// Group product `self · other`, reduced.
    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.blocks {
            w.push_block(g, e);
        }
        w
    }

    /// Group inverse.
    pub fn invert(&self) -> Word {
        Word {
            blocks: self.blocks.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// `self^n` for any integer n.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut w = Word::empty();
        for _ in 0..n.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }

    /// Group commutator `u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.invert()).concat(&v.invert())
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of letters (exponents counted by absolute value).
    pub fn len(&self) -> usize {
        self.blocks
            .iter()
            .map(|&(_, e)| e.unsigned_abs() as usize)
            .sum()
    }

    /// True if every exponent is positive (no inverse letters).
    pub fn is_positive(&self) -> bool {
        self.blocks.iter().all(|&(_, e)| e > 0)
    }

    /// Signed exponent sum of one generator (powercounting).
    pub fn count_signed(&self, g: Gen) -> i64 {
        self.blocks
            .iter()
            .filter(|&&(bg, _)| bg == g)
            .map(|&(_, e)| e)
            .sum()
    }

    pub fn blocks(&self) -> &[(Gen, i64)] {
        &self.blocks
    }

    /// Expand into single signed letters, `+1` for a generator, `-1` for
    /// its inverse.
    pub fn letters(&self) -> Vec<(Gen, i8)> {
        let mut out = Vec::with_capacity(self.len());
        for &(g, e) in &self.blocks {
            let s = if e > 0 { 1 } else { -1 };
            for _ in 0..e.unsigned_abs() {
                out.push((g, s));
            }
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "e");
        }
        for (g, s) in self.letters() {
            write!(f, "{}", g.symbol(s < 0))?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() || t == "e" {
            return Ok(Word::empty());
        }
        let mut raw = Vec::new();
        for c in t.chars() {
            if c.is_whitespace() {
                continue;
            }
            let (g, e) = match c {
                'a' => (Gen::A, 1),
                'A' => (Gen::A, -1),
                'b' => (Gen::B, 1),
                'B' => (Gen::B, -1),
                other => return Err(WordParseError::BadLetter(other)),
            };
            raw.push((g, e));
        }
        Ok(Word::reduce(&raw))
    }
}

/// A homomorphism of the free group, specified by the images of `a` and `b`.
///
/// The product follows the substitution convention: `compose(r, s)` acts by
/// applying `r`'s rule first and then rewriting the result with `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Substitution {
    pub image_a: Word,
    pub image_b: Word,
}

impl Substitution {
    pub fn new(image_a: Word, image_b: Word) -> Self {
        Substitution { image_a, image_b }
    }

    /// The identity substitution, unit of the substitution monoid.
    pub fn identity() -> Self {
        Substitution::new(Word::gen(Gen::A), Word::gen(Gen::B))
    }

    /// Nielsen generator `U: a → ab, b → b`.
    pub fn generator_u() -> Self {
        Substitution::new(
            Word::gen(Gen::A).concat(&Word::gen(Gen::B)),
            Word::gen(Gen::B),
        )
    }

    /// Nielsen generator `σ: a → a⁻¹, b → b`.
    pub fn generator_sigma() -> Self {
        Substitution::new(Word::power(Gen::A, -1), Word::gen(Gen::B))
    }

    /// Letter swap `P: a → b, b → a`.
    pub fn generator_p() -> Self {
        Substitution::new(Word::gen(Gen::B), Word::gen(Gen::A))
    }

    /// The generalized Fibonacci rule `a → b, b → bᵉˡ aᵏ`.
    ///
    /// Negative `k` or `l` produce inverse-letter powers. `(1, 1)` is the
    /// classic Fibonacci rule `a → b, b → ba`.
    pub fn gen_fibonacci(k: i64, l: i64) -> Self {
        let image_b = Word::power(Gen::B, l).concat(&Word::power(Gen::A, k));
        Substitution::new(Word::gen(Gen::B), image_b)
    }

    pub fn image(&self, g: Gen) -> &Word {
        match g {
            Gen::A => &self.image_a,
            Gen::B => &self.image_b,
        }
    }

    /// Homomorphic image of a word: letters are replaced by their images,
    /// inverse letters by the inverted images, then reduced.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for &(g, e) in w.blocks() {
            out = out.concat(&self.image(g).pow(e));
        }
        out
    }

    /// Monoid product: apply `self`'s rule first, then `other`'s.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        Substitution::new(other.apply(&self.image_a), other.apply(&self.image_b))
    }

    /// Substitution matrix: signed letter counts of the images, rowwise.
    pub fn matrix(&self) -> IntMatrix2 {
        IntMatrix2::from_i64([
            [
                self.image_a.count_signed(Gen::A),
                self.image_a.count_signed(Gen::B),
            ],
            [
                self.image_b.count_signed(Gen::A),
                self.image_b.count_signed(Gen::B),
            ],
        ])
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a->{};b->{}", self.image_a, self.image_b)
    }
}

impl FromStr for Substitution {
    type Err = WordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut image_a = None;
        let mut image_b = None;
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (lhs, rhs) = part
                .split_once("->")
                .ok_or_else(|| WordParseError::BadRule(part.to_string()))?;
            let img: Word = rhs.parse()?;
            match lhs.trim() {
                "a" => image_a = Some(img),
                "b" => image_b = Some(img),
                _ => return Err(WordParseError::BadRule(part.to_string())),
            }
        }
        match (image_a, image_b) {
            (Some(a), Some(b)) => Ok(Substitution::new(a, b)),
            _ => Err(WordParseError::BadRule(s.to_string())),
        }
    }
}

/// 2×2 integer matrix with exact arithmetic; `det = ±1` characterizes
/// Gl(2,ℤ) membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix2 {
    pub entries: [[BigInt; 2]; 2],
}

impl IntMatrix2 {
    pub fn from_i64(m: [[i64; 2]; 2]) -> Self {
        IntMatrix2 {
            entries: m.map(|row| row.map(BigInt::from)),
        }
    }

    pub fn identity() -> Self {
        IntMatrix2::from_i64([[1, 0], [0, 1]])
    }

    pub fn mul(&self, other: &IntMatrix2) -> IntMatrix2 {
        let a = &self.entries;
        let b = &other.entries;
        let mut out = IntMatrix2::from_i64([[0, 0], [0, 0]]);
        for i in 0..2 {
            for j in 0..2 {
                out.entries[i][j] = &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
            }
        }
        out
    }

    pub fn det(&self) -> BigInt {
        let e = &self.entries;
        &e[0][0] * &e[1][1] - &e[0][1] * &e[1][0]
    }

    pub fn transpose(&self) -> IntMatrix2 {
        let e = &self.entries;
        IntMatrix2 {
            entries: [
                [e[0][0].clone(), e[1][0].clone()],
                [e[0][1].clone(), e[1][1].clone()],
            ],
        }
    }
}
