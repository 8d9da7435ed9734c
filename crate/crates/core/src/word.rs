//! Letters, freely reduced words and generator-permuting automorphisms of a
//! free group of finite rank.
//!
//! Words are written as whitespace-separated tokens: `x3` is the third
//! generator and `X3` its inverse. The empty string is the identity.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The generating set `x1..xn` of a free group of rank `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of letters, counting inverses.
    pub fn letter_count(&self) -> usize {
        2 * self.rank
    }

    /// All letters in shortlex order `x1 < X1 < x2 < X2 < ...`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.letter_count()).map(Letter::from_key)
    }

    pub fn check_letter(&self, letter: Letter) -> Result<()> {
        if letter.index() == 0 || letter.index() > self.rank {
            return Err(Error::AlphabetMismatch {
                index: letter.index(),
                rank: self.rank,
            });
        }
        Ok(())
    }

    pub fn check(&self, word: &Word) -> Result<()> {
        word.letters()
            .iter()
            .try_for_each(|&l| self.check_letter(l))
    }

    /// Parses and freely reduces a word, rejecting letters outside the alphabet.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let raw = parse_letters(text)?;
        self.reduce(raw)
    }

    pub fn reduce(&self, raw: impl IntoIterator<Item = Letter>) -> Result<Word> {
        let mut out: Vec<Letter> = Vec::new();
        for letter in raw {
            self.check_letter(letter)?;
            push_reducing(&mut out, letter);
        }
        Ok(Word(out))
    }
}

/// A generator or its inverse. Ordered `x1 < X1 < x2 < X2 < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    index: u32,
    inverse: bool,
}

impl Letter {
    pub fn new(index: usize, inverse: bool) -> Self {
        Letter {
            index: index as u32,
            inverse,
        }
    }

    pub fn gen(index: usize) -> Self {
        Letter::new(index, false)
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn inverse(self) -> Self {
        Letter {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    /// Dense key in `0..2*rank`, monotone in the letter order.
    pub fn key(self) -> usize {
        2 * (self.index as usize - 1) + self.inverse as usize
    }

    pub fn from_key(key: usize) -> Self {
        Letter {
            index: (key / 2 + 1) as u32,
            inverse: key % 2 == 1,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.inverse { 'X' } else { 'x' };
        write!(f, "{}{}", c, self.index)
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self> {
        let bad = || Error::BadToken(token.to_string());
        let mut chars = token.chars();
        let inverse = match chars.next() {
            Some('x') => false,
            Some('X') => true,
            _ => return Err(bad()),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index: usize = digits.parse().map_err(|_| bad())?;
        if index == 0 || index > u32::MAX as usize {
            return Err(bad());
        }
        Ok(Letter::new(index, inverse))
    }
}

fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    text.split_whitespace().map(str::parse).collect()
}

fn push_reducing(out: &mut Vec<Letter>, letter: Letter) {
    if out.last() == Some(&letter.inverse()) {
        out.pop();
    } else {
        out.push(letter);
    }
}

/// A freely reduced word. The empty word is the identity.
///
/// Words compare in shortlex order: shorter first, then lexicographically
/// by letter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces an arbitrary letter sequence. No alphabet check.
    pub fn reduced(raw: impl IntoIterator<Item = Letter>) -> Self {
        let mut out = Vec::new();
        for letter in raw {
            push_reducing(&mut out, letter);
        }
        Word(out)
    }

    pub fn letter(letter: Letter) -> Self {
        Word(vec![letter])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reducing(&mut out, l);
        }
        Word(out)
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `self^-1 * h * self`.
    pub fn conjugate(&self, h: &Word) -> Word {
        self.invert().multiply(h).multiply(self)
    }

    /// Splits the word as `conjugator * core * conjugator^-1` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut i = 0;
        while 2 * i + 1 < n && self.0[i] == self.0[n - 1 - i].inverse() {
            i += 1;
        }
        let core = Word(self.0[i..n - i].to_vec());
        let conjugator = Word(self.0[..i].to_vec());
        (core, conjugator)
    }

    /// Replaces every generator index `i` by `map(i)`, keeping signs.
    pub fn substitute(&self, map: impl Fn(usize) -> usize) -> Word {
        // A bijective substitution cannot create cancellation.
        Word(
            self.0
                .iter()
                .map(|l| Letter::new(map(l.index()), l.is_inverse()))
                .collect(),
        )
    }

    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.index()).max().unwrap_or(0)
    }
}

impl From<Letter> for Word {
    fn from(letter: Letter) -> Self {
        Word::letter(letter)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses and freely reduces, without an alphabet bound.
impl FromStr for Word {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        Ok(Word::reduced(parse_letters(text)?))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A permutation `σ` of the generator indices together with an order `m`
/// satisfying `σ^m = id`. It induces the automorphism `φ(x_i) = x_σ(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorPermutation {
    images: Vec<usize>,
    order: usize,
}

impl GeneratorPermutation {
    /// `images[i - 1]` is `σ(i)`, 1-based.
    pub fn new(images: Vec<usize>, order: usize) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if order == 0 {
            return Err(Error::InvalidPermutation("order must be positive".into()));
        }
        let mut seen = vec![false; n];
        for &img in &images {
            if img == 0 || img > n || seen[img - 1] {
                return Err(Error::InvalidPermutation("not a permutation".into()));
            }
            seen[img - 1] = true;
        }
        let returns = |i: usize| (0..order).fold(i, |j, _| images[j - 1]) == i;
        if !(1..=n).all(returns) {
            return Err(Error::InvalidPermutation(format!(
                "σ^{order} is not the identity"
            )));
        }
        Ok(GeneratorPermutation { images, order })
    }

    pub fn identity(rank: usize) -> Self {
        GeneratorPermutation {
            images: (1..=rank).collect(),
            order: 1,
        }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn normalize(&self, k: i64) -> usize {
        k.rem_euclid(self.order as i64) as usize
    }

    /// `σ^k(i)`.
    pub fn apply(&self, k: i64, i: usize) -> usize {
        let mut j = i;
        for _ in 0..self.normalize(k) {
            j = self.images[j - 1];
        }
        j
    }

    /// `φ^k(word)`.
    pub fn twist(&self, k: i64, word: &Word) -> Word {
        let k = self.normalize(k);
        if k == 0 {
            return word.clone();
        }
        let table: Vec<usize> = (1..=self.rank()).map(|i| self.apply(k as i64, i)).collect();
        word.substitute(|i| table[i - 1])
    }
}
