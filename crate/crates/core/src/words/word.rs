//! Reduced words over named generators, and the text syntax
//! `name | name^-1 | name^k` with whitespace-separated tokens.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A single signed letter: a generator name and an inversion flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: String,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: impl Into<String>, inv: bool) -> Self {
        Letter { gen: gen.into(), inv }
    }

    pub fn inverse(&self) -> Letter {
        Letter {
            gen: self.gen.clone(),
            inv: !self.inv,
        }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

/// A freely reduced word. The reduction invariant is maintained by every
/// constructor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// One-letter word for a generator.
    pub fn generator(name: impl Into<String>) -> Self {
        Word {
            letters: vec![Letter::new(name, false)],
        }
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(raw: impl IntoIterator<Item = Letter>) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in raw {
            if stack.last().is_some_and(|top| top.cancels(&l)) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { letters: stack }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::reduce(self.letters.iter().chain(other.letters.iter()).cloned())
    }

    /// Distinct generator names, sorted.
    pub fn generator_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.letters.iter().map(|l| l.gen.clone()).collect();
        names.sort();
        names.dedup();
        names
    }

    /// Parses the external word syntax. The empty string is the empty word.
    pub fn parse(text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (name, exp) = match token.split_once('^') {
                None => (token, 1i64),
                Some((name, exp)) => {
                    let exp: i64 = exp
                        .parse()
                        .map_err(|_| Error::ParseWord(format!("bad exponent in {token:?}")))?;
                    if exp == 0 {
                        return Err(Error::ParseWord(format!("zero exponent in {token:?}")));
                    }
                    (name, exp)
                }
            };
            if !is_valid_name(name) {
                return Err(Error::ParseWord(format!("bad generator name {name:?}")));
            }
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter::new(name, exp < 0));
            }
        }
        Ok(Word::reduce(letters))
    }

    /// Parses and rejects generators outside the declared set.
    pub fn parse_checked(text: &str, generators: &[String]) -> Result<Word> {
        let w = Word::parse(text)?;
        w.check_generators(generators)?;
        Ok(w)
    }

    pub fn check_generators(&self, generators: &[String]) -> Result<()> {
        for l in &self.letters {
            if !generators.contains(&l.gen) {
                return Err(Error::UnknownGenerator(l.gen.clone()));
            }
        }
        Ok(())
    }

    /// Cyclically reduced canonical form: conjugation is stripped and the
    /// lexicographically least rotation is returned, letters ordered by
    /// generator name with the positive letter before its inverse.
    pub fn cyclic_reduce(&self) -> Word {
        let mut letters = self.letters.clone();
        while letters.len() >= 2 && letters.first().unwrap().cancels(letters.last().unwrap()) {
            letters.pop();
            letters.remove(0);
        }
        if letters.len() <= 1 {
            return Word { letters };
        }
        let key = |l: &Letter| (l.gen.clone(), l.inv);
        let n = letters.len();
        let mut best = 0usize;
        for start in 1..n {
            for i in 0..n {
                let a = key(&letters[(start + i) % n]);
                let b = key(&letters[(best + i) % n]);
                match a.cmp(&b) {
                    std::cmp::Ordering::Less => {
                        best = start;
                        break;
                    }
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        let rotated: Vec<Letter> = (0..n).map(|i| letters[(best + i) % n].clone()).collect();
        Word { letters: rotated }
    }

    /// Replaces every letter by its image word, reducing the result. Errors
    /// when a generator has no image.
    pub fn substitute(&self, images: &BTreeMap<String, Word>) -> Result<Word> {
        let mut letters = Vec::new();
        for l in &self.letters {
            let image = images
                .get(&l.gen)
                .ok_or_else(|| Error::UnknownGenerator(l.gen.clone()))?;
            let image = if l.inv { image.inverse() } else { image.clone() };
            letters.extend(image.letters);
        }
        Ok(Word::reduce(letters))
    }
}

// names are [A-Za-z][A-Za-z0-9_]* with optional trailing apostrophes, the
// latter so that free-product clash renaming stays writable in word syntax
fn is_valid_name(name: &str) -> bool {
    let body = name.trim_end_matches('\'');
    if body.len() < name.len() && body.is_empty() {
        return false;
    }
    let mut chars = body.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if l.inv {
                write!(f, "{}^-1", l.gen)?;
            } else {
                write!(f, "{}", l.gen)?;
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Word::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// An ordered generator alphabet for free-group computations. Conversions
/// between named [`Word`]s and compact signed-index words (`+k`/`-k` for the
/// `k`-th generator, 1-based) go through here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !is_valid_name(n) {
                return Err(Error::ParseWord(format!("bad generator name {n:?}")));
            }
            if !seen.insert(n.clone()) {
                return Err(Error::InvalidPresentation(format!("duplicate generator {n:?}")));
            }
        }
        Ok(Alphabet { names })
    }

    /// Alphabet of the given rank covering all names used by `words`:
    /// the distinct names in sorted order, padded with fresh `g<k>` names.
    pub fn infer(words: &[Word], rank: usize) -> Result<Alphabet> {
        let mut names: Vec<String> = words
            .iter()
            .flat_map(|w| w.generator_names())
            .collect();
        names.sort();
        names.dedup();
        if names.len() > rank {
            return Err(Error::Bound(format!(
                "words use {} generators but rank is {rank}",
                names.len()
            )));
        }
        let mut k = 1usize;
        while names.len() < rank {
            let candidate = format!("g{k}");
            if !names.contains(&candidate) {
                names.push(candidate);
            }
            k += 1;
        }
        names.sort();
        Alphabet::new(names)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Signed-index form of a word; errors on names outside the alphabet.
    pub fn to_cword(&self, w: &Word) -> Result<Vec<i16>> {
        w.letters()
            .iter()
            .map(|l| {
                let idx = self
                    .index_of(&l.gen)
                    .ok_or_else(|| Error::UnknownGenerator(l.gen.clone()))?;
                let v = (idx + 1) as i16;
                Ok(if l.inv { -v } else { v })
            })
            .collect()
    }

    pub fn from_cword(&self, cw: &[i16]) -> Word {
        Word::reduce(cw.iter().map(|&v| {
            let idx = v.unsigned_abs() as usize - 1;
            Letter::new(self.names[idx].clone(), v < 0)
        }))
    }
}
