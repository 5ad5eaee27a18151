//! Line-oriented text inputs: problem files and group specs.
//!
//! ```text
//! # comments run to the end of the line
//! alphabet: xy
//! H1: xyXY, yy
//! H2: xx
//! word: xyX
//! primes: 2
//! ```
//!
//! `gen: w` lines accumulate into a subgroup named `H`.

use std::fmt;

use thiserror::Error;

use crate::group::{Perm, XGroup};
use crate::word::{Alphabet, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl fmt::Display) -> Self {
        ParseError {
            line,
            column,
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub alphabet: Alphabet,
    pub subgroups: Vec<(String, Vec<Word>)>,
    pub word: Option<Word>,
    pub primes: Option<Vec<u32>>,
}

impl ProblemFile {
    pub fn generator_lists(&self) -> Vec<Vec<Word>> {
        self.subgroups.iter().map(|(_, g)| g.clone()).collect()
    }

    pub fn subgroup(&self, name: &str) -> Option<&[Word]> {
        self.subgroups.iter().find(|(n, _)| n == name).map(|(_, g)| g.as_slice())
    }
}

/// A content line split as `key: value`, with the 1-based column of the value.
pub(crate) struct Entry<'a> {
    pub line: usize,
    pub key: &'a str,
    pub value: &'a str,
    pub value_column: usize,
}

pub(crate) fn entries(text: &str) -> Result<Vec<Entry<'_>>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap();
        if content.trim().is_empty() {
            continue;
        }
        let colon = content
            .find(':')
            .ok_or_else(|| ParseError::new(line, 1, "expected `key: value`"))?;
        let key = content[..colon].trim();
        if key.is_empty() {
            return Err(ParseError::new(line, 1, "missing key"));
        }
        let rest = &content[colon + 1..];
        let lead = rest.len() - rest.trim_start().len();
        out.push(Entry {
            line,
            key,
            value: rest.trim(),
            value_column: colon + 2 + lead,
        });
    }
    Ok(out)
}

pub(crate) fn parse_word_at(alphabet: &Alphabet, text: &str, line: usize, column: usize) -> Result<Word, ParseError> {
    alphabet.parse_word(text).map_err(|e| match e {
        WordError::UnknownSymbol { symbol, column: c } => {
            ParseError::new(line, column + c - 1, format!("unknown symbol {symbol:?}"))
        }
        other => ParseError::new(line, column, other),
    })
}

/// Comma separated words; an empty list is allowed.
pub(crate) fn parse_word_list(
    alphabet: &Alphabet,
    text: &str,
    line: usize,
    column: usize,
) -> Result<Vec<Word>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        let lead = part.len() - part.trim_start().len();
        if !part.trim().is_empty() {
            out.push(parse_word_at(alphabet, part.trim(), line, column + offset + lead)?);
        } else if text.contains(',') {
            return Err(ParseError::new(line, column + offset, "empty word in list"));
        }
        offset += part.len() + 1;
    }
    Ok(out)
}

pub(crate) fn parse_primes(text: &str, line: usize, column: usize) -> Result<Vec<u32>, ParseError> {
    text.split(',')
        .map(|p| {
            let v: u32 = p
                .trim()
                .parse()
                .map_err(|_| ParseError::new(line, column, format!("bad prime {:?}", p.trim())))?;
            if crate::extension::is_prime(v) {
                Ok(v)
            } else {
                Err(ParseError::new(line, column, format!("{v} is not prime")))
            }
        })
        .collect()
}

pub fn parse_alphabet_at(text: &str, line: usize, column: usize) -> Result<Alphabet, ParseError> {
    Alphabet::new(text).map_err(|e| ParseError::new(line, column, e))
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut subgroups: Vec<(String, Vec<Word>)> = Vec::new();
    let mut word = None;
    let mut primes = None;
    let mut gen_line: Option<usize> = None;
    for e in entries(text)? {
        if e.key == "alphabet" {
            if alphabet.is_some() {
                return Err(ParseError::new(e.line, 1, "alphabet declared twice"));
            }
            alphabet = Some(parse_alphabet_at(e.value, e.line, e.value_column)?);
            continue;
        }
        let a = alphabet
            .as_ref()
            .ok_or_else(|| ParseError::new(e.line, 1, "alphabet must be declared first"))?;
        match e.key {
            "word" => {
                if word.is_some() {
                    return Err(ParseError::new(e.line, 1, "word given twice"));
                }
                word = Some(parse_word_at(a, e.value, e.line, e.value_column)?);
            }
            "primes" => primes = Some(parse_primes(e.value, e.line, e.value_column)?),
            "gen" => {
                let w = parse_word_at(a, e.value, e.line, e.value_column)?;
                match subgroups.iter_mut().find(|(n, _)| n == "H") {
                    Some((_, gens)) if gen_line.is_some() => gens.push(w),
                    Some(_) => return Err(ParseError::new(e.line, 1, "duplicate subgroup name \"H\"")),
                    None => {
                        gen_line = Some(e.line);
                        subgroups.push(("H".to_string(), vec![w]));
                    }
                }
            }
            name => {
                if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(ParseError::new(e.line, 1, format!("bad subgroup name {name:?}")));
                }
                if subgroups.iter().any(|(n, _)| n == name) {
                    return Err(ParseError::new(e.line, 1, format!("duplicate subgroup name {name:?}")));
                }
                let gens = parse_word_list(a, e.value, e.line, e.value_column)?;
                subgroups.push((name.to_string(), gens));
            }
        }
    }
    let alphabet = alphabet.ok_or_else(|| ParseError::new(1, 1, "missing alphabet"))?;
    Ok(ProblemFile {
        alphabet,
        subgroups,
        word,
        primes,
    })
}

/// `alphabet:`, `degree:`, then one `x: (cycles)` line per generator.
pub fn format_group_spec(alphabet: &Alphabet, g: &XGroup) -> String {
    let mut out = format!("alphabet: {}\ndegree: {}\n", alphabet.symbols().iter().collect::<String>(), g.degree());
    for (i, p) in g.generators().iter().enumerate() {
        out.push_str(&format!("{}: {}\n", alphabet.symbol(i), p.cycles()));
    }
    out
}

pub fn parse_group_spec(text: &str) -> Result<(Alphabet, XGroup), ParseError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut degree: Option<usize> = None;
    let mut perms: Vec<Option<Perm>> = Vec::new();
    let mut last_line = 1;
    for e in entries(text)? {
        last_line = e.line;
        match e.key {
            "alphabet" => {
                let a = parse_alphabet_at(e.value, e.line, e.value_column)?;
                perms = vec![None; a.len()];
                alphabet = Some(a);
            }
            "degree" => {
                degree = Some(
                    e.value
                        .parse()
                        .map_err(|_| ParseError::new(e.line, e.value_column, "bad degree"))?,
                )
            }
            key => {
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| ParseError::new(e.line, 1, "alphabet must be declared first"))?;
                let n = degree.ok_or_else(|| ParseError::new(e.line, 1, "degree must be declared first"))?;
                let mut chars = key.chars();
                let (Some(c), None) = (chars.next(), chars.next()) else {
                    return Err(ParseError::new(e.line, 1, format!("unknown key {key:?}")));
                };
                let i = a
                    .index_of(c)
                    .ok_or_else(|| ParseError::new(e.line, 1, format!("unknown generator {c:?}")))?;
                if perms[i].is_some() {
                    return Err(ParseError::new(e.line, 1, format!("generator {c:?} given twice")));
                }
                let p = Perm::parse_cycles(e.value, n).map_err(|err| ParseError::new(e.line, e.value_column, err))?;
                perms[i] = Some(p);
            }
        }
    }
    let alphabet = alphabet.ok_or_else(|| ParseError::new(1, 1, "missing alphabet"))?;
    let mut gens = Vec::new();
    for (i, p) in perms.into_iter().enumerate() {
        gens.push(p.ok_or_else(|| {
            ParseError::new(last_line, 1, format!("missing generator {:?}", alphabet.symbol(i)))
        })?);
    }
    let g = XGroup::new(gens).map_err(|e| ParseError::new(last_line, 1, e))?;
    Ok((alphabet, g))
}
