//! Plain-text certificates and their independent re-verification.
//!
//! Each certificate is a block of `key: value` lines starting with
//! `certificate: <kind>`. Verification rebuilds every claim from the words,
//! permutations and primes in the block.

use std::fmt::Write;

use crate::extension::ExtensionChain;
use crate::group::{FiniteGroup, Perm, XGroup};
use crate::problem::{entries, parse_alphabet_at, parse_primes, parse_word_at, parse_word_list, ParseError};
use crate::separate::{
    affine_image, affine_product_member, image_subgroup, Factorization, HallWitness, ProductWitness, SeparationStatus,
};
use crate::stallings::stallings_graph;
use crate::word::{free_reduce, reduce_product, Alphabet, ReducedWord, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallCertificate {
    pub alphabet: Alphabet,
    pub degree: usize,
    pub perms: Vec<Perm>,
    pub base: usize,
    pub generators: Vec<ReducedWord>,
    pub word: ReducedWord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCertificate {
    pub alphabet: Alphabet,
    pub degree: usize,
    /// Generators of the diagonal base group.
    pub perms: Vec<Perm>,
    pub primes: Vec<u32>,
    pub subgroups: Vec<Vec<ReducedWord>>,
    pub word: ReducedWord,
    pub status: SeparationStatus,
    pub word_image: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationCertificate {
    pub alphabet: Alphabet,
    pub subgroups: Vec<Vec<ReducedWord>>,
    pub word: ReducedWord,
    pub factors: Vec<ReducedWord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Hall(HallCertificate),
    Product(ProductCertificate),
    Factorization(FactorizationCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// Consistent but incomplete: the product image was not enumerated.
    Partial,
    Invalid(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl HallCertificate {
    pub fn from_witness(w: &HallWitness, alphabet: &Alphabet) -> Self {
        HallCertificate {
            alphabet: alphabet.clone(),
            degree: w.group.degree(),
            perms: w.group.generators().to_vec(),
            base: w.base(),
            generators: w.generators.clone(),
            word: w.word.clone(),
        }
    }
}

impl ProductCertificate {
    pub fn from_witness(w: &ProductWitness, alphabet: &Alphabet) -> Self {
        let depth = w.chain.depth();
        ProductCertificate {
            alphabet: alphabet.clone(),
            degree: w.setup.group.degree(),
            perms: w.setup.group.generators().to_vec(),
            primes: w.chain.primes().to_vec(),
            subgroups: w.setup.generators.clone(),
            word: w.setup.word.clone(),
            status: w.status,
            word_image: w.chain.format_element(depth, &w.word_image, alphabet),
        }
    }
}

impl FactorizationCertificate {
    pub fn new(alphabet: &Alphabet, subgroups: &[Vec<Word>], word: &Word, f: &Factorization) -> Self {
        FactorizationCertificate {
            alphabet: alphabet.clone(),
            subgroups: subgroups.iter().map(|g| g.iter().map(|w| w.reduce()).collect()).collect(),
            word: word.reduce(),
            factors: f.factors.clone(),
        }
    }
}

fn status_text(s: SeparationStatus) -> &'static str {
    match s {
        SeparationStatus::Separated => "separated",
        SeparationStatus::NotSeparated => "not-separated",
        SeparationStatus::Partial => "partial: product image not enumerated (cap)",
    }
}

fn word_list(a: &Alphabet, ws: &[ReducedWord]) -> String {
    ws.iter().map(|w| a.format(w)).collect::<Vec<_>>().join(", ")
}

fn header(out: &mut String, kind: &str, a: &Alphabet) {
    writeln!(out, "certificate: {kind}").unwrap();
    writeln!(out, "alphabet: {}", a.symbols().iter().collect::<String>()).unwrap();
}

fn perm_lines(out: &mut String, a: &Alphabet, degree: usize, perms: &[Perm]) {
    writeln!(out, "degree: {degree}").unwrap();
    for (i, p) in perms.iter().enumerate() {
        writeln!(out, "perm {}: {}", a.symbol(i), p.cycles()).unwrap();
    }
}

pub fn emit(c: &Certificate) -> String {
    let mut out = String::new();
    match c {
        Certificate::Hall(h) => {
            let a = &h.alphabet;
            header(&mut out, "hall", a);
            perm_lines(&mut out, a, h.degree, &h.perms);
            writeln!(out, "base: {}", h.base).unwrap();
            writeln!(out, "subgroup: {}", word_list(a, &h.generators)).unwrap();
            writeln!(out, "word: {}", a.format(&h.word)).unwrap();
        }
        Certificate::Product(p) => {
            let a = &p.alphabet;
            header(&mut out, "product", a);
            perm_lines(&mut out, a, p.degree, &p.perms);
            let primes: Vec<String> = p.primes.iter().map(|q| q.to_string()).collect();
            writeln!(out, "primes: {}", primes.join(", ")).unwrap();
            for s in &p.subgroups {
                writeln!(out, "subgroup: {}", word_list(a, s)).unwrap();
            }
            writeln!(out, "word: {}", a.format(&p.word)).unwrap();
            writeln!(out, "word-image: {}", p.word_image).unwrap();
            writeln!(out, "status: {}", status_text(p.status)).unwrap();
        }
        Certificate::Factorization(f) => {
            let a = &f.alphabet;
            header(&mut out, "factorization", a);
            for s in &f.subgroups {
                writeln!(out, "subgroup: {}", word_list(a, s)).unwrap();
            }
            writeln!(out, "word: {}", a.format(&f.word)).unwrap();
            for h in &f.factors {
                writeln!(out, "factor: {}", a.format(h)).unwrap();
            }
        }
    }
    out
}

fn missing(key: &str) -> ParseError {
    ParseError::new(1, 1, format!("missing {key:?}"))
}

pub fn parse(text: &str) -> Result<Certificate, ParseError> {
    let lines = entries(text)?;
    let mut kind = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut degree = None;
    let mut perms: Vec<(usize, usize, String)> = Vec::new();
    let mut base = None;
    let mut primes = None;
    let mut subgroups = Vec::new();
    let mut word = None;
    let mut word_image = None;
    let mut status = None;
    let mut factors = Vec::new();
    for e in &lines {
        if e.key == "certificate" {
            kind = Some(e.value.to_string());
            continue;
        }
        if e.key == "alphabet" {
            alphabet = Some(parse_alphabet_at(e.value, e.line, e.value_column)?);
            continue;
        }
        let a = alphabet
            .as_ref()
            .ok_or_else(|| ParseError::new(e.line, 1, "alphabet must be declared first"))?;
        let reduced = |w: Word| free_reduce(&w);
        match e.key {
            "degree" => {
                degree = Some(
                    e.value
                        .parse::<usize>()
                        .map_err(|_| ParseError::new(e.line, e.value_column, "bad degree"))?,
                )
            }
            "base" => {
                base = Some(
                    e.value
                        .parse::<usize>()
                        .map_err(|_| ParseError::new(e.line, e.value_column, "bad base"))?,
                )
            }
            "primes" => primes = Some(parse_primes(e.value, e.line, e.value_column)?),
            "subgroup" => subgroups.push(
                parse_word_list(a, e.value, e.line, e.value_column)?
                    .into_iter()
                    .map(reduced)
                    .collect::<Vec<_>>(),
            ),
            "word" => word = Some(reduced(parse_word_at(a, e.value, e.line, e.value_column)?)),
            "factor" => factors.push(reduced(parse_word_at(a, e.value, e.line, e.value_column)?)),
            "word-image" => word_image = Some(e.value.to_string()),
            "status" => {
                status = Some(match e.value {
                    "separated" => SeparationStatus::Separated,
                    "not-separated" => SeparationStatus::NotSeparated,
                    v if v.starts_with("partial") => SeparationStatus::Partial,
                    _ => return Err(ParseError::new(e.line, e.value_column, "unknown status")),
                })
            }
            key => {
                let Some(sym) = key.strip_prefix("perm ") else {
                    return Err(ParseError::new(e.line, 1, format!("unknown key {key:?}")));
                };
                let mut chars = sym.trim().chars();
                let i = match (chars.next(), chars.next()) {
                    (Some(c), None) => a.index_of(c),
                    _ => None,
                }
                .ok_or_else(|| ParseError::new(e.line, 1, format!("bad generator in {key:?}")))?;
                perms.push((i, e.line, e.value.to_string()));
            }
        }
    }
    let alphabet = alphabet.ok_or_else(|| missing("alphabet"))?;
    let word = word.ok_or_else(|| missing("word"))?;
    let read_perms = || -> Result<(usize, Vec<Perm>), ParseError> {
        let n = degree.ok_or_else(|| missing("degree"))?;
        let mut out: Vec<Option<Perm>> = vec![None; alphabet.len()];
        for (i, line, text) in &perms {
            let p = Perm::parse_cycles(text, n).map_err(|e| ParseError::new(*line, 1, e))?;
            if out[*i].replace(p).is_some() {
                return Err(ParseError::new(*line, 1, "generator given twice"));
            }
        }
        let perms = out
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| missing("perm"))?;
        Ok((n, perms))
    };
    match kind.as_deref() {
        Some("hall") => {
            let (degree, perms) = read_perms()?;
            if subgroups.len() != 1 {
                return Err(missing("subgroup"));
            }
            Ok(Certificate::Hall(HallCertificate {
                alphabet,
                degree,
                perms,
                base: base.ok_or_else(|| missing("base"))?,
                generators: subgroups.pop().unwrap(),
                word,
            }))
        }
        Some("product") => {
            let (degree, perms) = read_perms()?;
            Ok(Certificate::Product(ProductCertificate {
                alphabet,
                degree,
                perms,
                primes: primes.unwrap_or_default(),
                subgroups,
                word,
                status: status.ok_or_else(|| missing("status"))?,
                word_image: word_image.ok_or_else(|| missing("word-image"))?,
            }))
        }
        Some("factorization") => Ok(Certificate::Factorization(FactorizationCertificate {
            alphabet,
            subgroups,
            word,
            factors,
        })),
        Some(other) => Err(ParseError::new(1, 1, format!("unknown certificate kind {other:?}"))),
        None => Err(missing("certificate")),
    }
}

/// Re-checks every claim of a certificate. `cap` bounds the enumeration of
/// subgroup images for product certificates.
pub fn verify(c: &Certificate, cap: usize) -> Verdict {
    match c {
        Certificate::Hall(h) => {
            let Ok(k) = XGroup::new(h.perms.clone()) else {
                return Verdict::Invalid("generator permutations are inconsistent".into());
            };
            if h.base >= h.degree {
                return Verdict::Invalid("base point out of range".into());
            }
            for (i, g) in h.generators.iter().enumerate() {
                if k.evaluate(g).apply(h.base) != h.base {
                    return Verdict::Invalid(format!("generator {} moves the base point", i + 1));
                }
            }
            if k.evaluate(&h.word).apply(h.base) == h.base {
                return Verdict::Invalid("the word fixes the base point".into());
            }
            Verdict::Valid
        }
        Certificate::Product(p) => verify_product(p, cap),
        Certificate::Factorization(f) => {
            if f.factors.len() != f.subgroups.len() {
                return Verdict::Invalid("factor count differs from subgroup count".into());
            }
            let symbols = f.alphabet.len();
            for (i, (h, gens)) in f.factors.iter().zip(&f.subgroups).enumerate() {
                let gens: Vec<Word> = gens.iter().map(|g| g.as_word()).collect();
                if !stallings_graph(symbols, &gens).contains(h) {
                    return Verdict::Invalid(format!("factor {} is not in its subgroup", i + 1));
                }
            }
            if reduce_product(f.factors.iter().map(|h| h.letters())) != f.word {
                return Verdict::Invalid("factors do not multiply to the word".into());
            }
            Verdict::Valid
        }
    }
}

fn verify_product(p: &ProductCertificate, cap: usize) -> Verdict {
    let Ok(g) = XGroup::new(p.perms.clone()) else {
        return Verdict::Invalid("generator permutations are inconsistent".into());
    };
    if p.primes.len() + 1 != p.subgroups.len() {
        return Verdict::Invalid("prime count must be one less than the subgroup count".into());
    }
    let Ok(chain) = ExtensionChain::new(g, &p.primes) else {
        return Verdict::Invalid("bad prime list".into());
    };
    let k = chain.top();
    let image = k.evaluate(&p.word);
    match chain.parse_element(chain.depth(), &p.word_image, &p.alphabet) {
        Ok(claimed) if claimed == image => {}
        Ok(_) => return Verdict::Invalid("word image does not match".into()),
        Err(e) => return Verdict::Invalid(e.to_string()),
    }
    if p.status == SeparationStatus::Partial {
        return Verdict::Partial;
    }
    let settle = |separated: bool| {
        if separated == (p.status == SeparationStatus::Separated) {
            Verdict::Valid
        } else {
            Verdict::Invalid(format!("status {:?} does not match the recomputation", p.status))
        }
    };
    if p.subgroups.len() == 2 {
        let mut images = Vec::new();
        for gens in &p.subgroups {
            match affine_image(&chain, gens, (cap / crate::separate::SCHREIER_SHARE).max(1)) {
                Ok(a) => images.push(a),
                Err(_) => return Verdict::Partial,
            }
        }
        return settle(affine_product_member(&chain, &images[0], &images[1], &image).is_none());
    }
    let mut images = Vec::new();
    for gens in &p.subgroups {
        match image_subgroup(&k, gens, cap) {
            Ok(img) => images.push(img),
            Err(_) => return Verdict::Partial,
        }
    }
    match crate::separate::product_membership(&k, &images, &image, cap) {
        Ok((found, _)) => settle(found.is_none()),
        Err(_) => Verdict::Partial,
    }
}
