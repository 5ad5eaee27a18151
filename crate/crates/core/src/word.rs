//! Words over a finite alphabet and their free reduction.
//!
//! Generators are written as lowercase ASCII letters and their inverses as
//! the matching uppercase letter, so `xyXY` is the commutator of `x` and `y`.
//! The empty word is written `1`.

use std::fmt;
use std::ops::Deref;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabet symbol {0:?} is not a lowercase ASCII letter")]
    BadSymbol(char),
    #[error("alphabet symbol {0:?} declared twice")]
    DuplicateSymbol(char),
    #[error("unknown symbol {symbol:?} at column {column}")]
    UnknownSymbol { symbol: char, column: usize },
    #[error("empty word literal")]
    Empty,
}

/// The fixed generating set `X`, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(spec: &str) -> Result<Self, WordError> {
        let mut symbols = Vec::new();
        for c in spec.chars().filter(|c| !c.is_whitespace() && *c != ',') {
            if !c.is_ascii_lowercase() {
                return Err(WordError::BadSymbol(c));
            }
            if symbols.contains(&c) {
                return Err(WordError::DuplicateSymbol(c));
            }
            symbols.push(c);
        }
        if symbols.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        Ok(Alphabet { symbols })
    }

    /// Alphabet of the first `n` letters starting at `x` (`x`, `y`, `z`, then `a`, `b`, ...).
    pub fn standard(n: usize) -> Self {
        let order = "xyzabcdefghijklmnopqrstuvw";
        assert!((1..=26).contains(&n), "alphabet size out of range");
        Alphabet::new(&order[..n]).expect("standard alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> char {
        self.symbols[index]
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c)
    }

    pub fn letter_char(&self, l: Letter) -> char {
        let c = self.symbols[l.symbol];
        if l.inverted {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn parse_letter(&self, c: char) -> Option<Letter> {
        if let Some(i) = self.index_of(c) {
            return Some(Letter::pos(i));
        }
        if c.is_ascii_uppercase() {
            return self.index_of(c.to_ascii_lowercase()).map(Letter::neg);
        }
        None
    }

    /// Parses a word literal; `1` is the empty word. Columns in errors are 1-based.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(WordError::Empty);
        }
        if text == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::with_capacity(text.len());
        for (i, c) in text.chars().enumerate() {
            match self.parse_letter(c) {
                Some(l) => letters.push(l),
                None => {
                    return Err(WordError::UnknownSymbol {
                        symbol: c,
                        column: i + 1,
                    })
                }
            }
        }
        Ok(Word(letters))
    }

    pub fn format(&self, letters: &[Letter]) -> String {
        if letters.is_empty() {
            return "1".to_string();
        }
        letters.iter().map(|&l| self.letter_char(l)).collect()
    }

    pub fn display<'a>(&'a self, letters: &'a [Letter]) -> impl fmt::Display + 'a {
        WordDisplay {
            alphabet: self,
            letters,
        }
    }
}

struct WordDisplay<'a> {
    alphabet: &'a Alphabet,
    letters: &'a [Letter],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alphabet.format(self.letters))
    }
}

/// An element of `X ⊔ X⁻¹`. Ordering puts each generator right before its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub symbol: usize,
    pub inverted: bool,
}

impl Letter {
    pub const fn pos(symbol: usize) -> Self {
        Letter {
            symbol,
            inverted: false,
        }
    }

    pub const fn neg(symbol: usize) -> Self {
        Letter {
            symbol,
            inverted: true,
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            symbol: self.symbol,
            inverted: !self.inverted,
        }
    }

    pub fn is_positive(self) -> bool {
        !self.inverted
    }

    /// Dense index in `0..2|X|`: `2·symbol` for `x`, `2·symbol + 1` for `x⁻¹`.
    pub fn index(self) -> usize {
        2 * self.symbol + self.inverted as usize
    }

    pub fn from_index(i: usize) -> Self {
        Letter {
            symbol: i / 2,
            inverted: i % 2 == 1,
        }
    }

    /// All letters over an alphabet of `n` symbols, in letter order.
    pub fn all(n: usize) -> impl Iterator<Item = Letter> {
        (0..2 * n).map(Letter::from_index)
    }
}

/// A possibly unreduced word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        invert(&self.0)
    }

    pub fn reduce(&self) -> ReducedWord {
        free_reduce(&self.0)
    }

    pub fn max_symbol(&self) -> Option<usize> {
        self.0.iter().map(|l| l.symbol).max()
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<ReducedWord> for Word {
    fn from(r: ReducedWord) -> Self {
        Word(r.0)
    }
}

/// A word with no adjacent `x x⁻¹` or `x⁻¹ x`; the normal form of an element of `F`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord(Vec<Letter>);

impl ReducedWord {
    pub fn empty() -> Self {
        ReducedWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_word(self) -> Word {
        Word(self.0)
    }

    pub fn as_word(&self) -> Word {
        Word(self.0.clone())
    }

    /// Inverse of a reduced word is reduced.
    pub fn inverse(&self) -> ReducedWord {
        ReducedWord(invert(&self.0).0)
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &[Letter]) -> ReducedWord {
        let mut out = self.0.clone();
        push_reduced(&mut out, other);
        ReducedWord(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }
}

impl Deref for ReducedWord {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

fn push_reduced(stack: &mut Vec<Letter>, letters: &[Letter]) {
    for &l in letters {
        if stack.last() == Some(&l.inv()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
}

pub fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|p| p[1] != p[0].inv())
}

pub fn free_reduce(letters: &[Letter]) -> ReducedWord {
    let mut out = Vec::with_capacity(letters.len());
    push_reduced(&mut out, letters);
    ReducedWord(out)
}

/// Reduced form of a concatenation of several words.
pub fn reduce_product<'a, I>(parts: I) -> ReducedWord
where
    I: IntoIterator<Item = &'a [Letter]>,
{
    let mut out = Vec::new();
    for p in parts {
        push_reduced(&mut out, p);
    }
    ReducedWord(out)
}

pub fn invert(letters: &[Letter]) -> Word {
    Word(letters.iter().rev().map(|l| l.inv()).collect())
}
