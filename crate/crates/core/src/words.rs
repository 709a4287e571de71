//! Finite and ultimately periodic words over a finite alphabet.
//!
//! Letters are dense integer ids; the [`Alphabet`] keeps the side table of
//! label names. An [`UpWord`] is a lasso `prefix · cycle^ω`. No canonical
//! form is maintained: two lassos are compared semantically by unrolling
//! both past the point where they must have become periodic together.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet must contain at least one letter")]
    EmptyAlphabet,
    #[error("duplicate label `{0}` in alphabet")]
    DuplicateLabel(String),
    #[error("label `{0}` must be non-empty and must not contain `.`, `(` or `)`")]
    BadLabel(String),
    #[error("letter id {id} out of range for alphabet of size {size}")]
    LetterOutOfRange { id: usize, size: usize },
    #[error("cycle of an ultimately periodic word must be non-empty")]
    EmptyCycle,
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("cannot parse word `{0}`: expected `u(v)`")]
    Syntax(String),
}

/// A letter id, valid for some ambient [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub usize);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Label names indexed by letter id. Cheap to clone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Arc<[String]>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains(['.', '(', ')']) {
                return Err(WordError::BadLabel(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(WordError::DuplicateLabel(n.clone()));
            }
        }
        Ok(Self { names: names.into() })
    }

    /// Alphabet `{"1", ..., "m"}`.
    pub fn numbered(m: usize) -> Self {
        Self::new((1..=m).map(|i| i.to_string())).expect("m >= 1 distinct labels")
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l.0]
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(Letter)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.size()).map(Letter)
    }

    pub fn check(&self, l: Letter) -> Result<(), WordError> {
        if l.0 < self.size() {
            Ok(())
        } else {
            Err(WordError::LetterOutOfRange { id: l.0, size: self.size() })
        }
    }

    fn single_char_labels(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Parses a finite word. Labels are separated by `.`; when every label
    /// is a single character the separators may be omitted.
    pub fn parse_finite(&self, s: &str) -> Result<FiniteWord, WordError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(FiniteWord::empty());
        }
        let lookup = |tok: &str| self.letter(tok).ok_or_else(|| WordError::UnknownLabel(tok.to_string()));
        let letters = if s.contains('.') {
            s.split('.').map(lookup).collect::<Result<Vec<_>, _>>()?
        } else if self.single_char_labels() {
            let mut buf = [0u8; 4];
            s.chars().map(|c| lookup(c.encode_utf8(&mut buf))).collect::<Result<Vec<_>, _>>()?
        } else {
            vec![lookup(s)?]
        };
        Ok(FiniteWord(letters))
    }

    /// Parses `u(v)`, denoting `u · v^ω`.
    pub fn parse_up(&self, s: &str) -> Result<UpWord, WordError> {
        let s = s.trim();
        let syntax = || WordError::Syntax(s.to_string());
        let open = s.find('(').ok_or_else(syntax)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(syntax)?;
        if inner.contains(['(', ')']) {
            return Err(syntax());
        }
        let prefix = self.parse_finite(&s[..open])?;
        let cycle = self.parse_finite(inner)?;
        UpWord::new(prefix, cycle)
    }

    pub fn format_finite(&self, w: &FiniteWord) -> String {
        let sep = if self.single_char_labels() { "" } else { "." };
        w.0.iter().map(|&l| self.name(l)).collect::<Vec<_>>().join(sep)
    }

    pub fn format_up(&self, w: &UpWord) -> String {
        format!("{}({})", self.format_finite(&w.prefix), self.format_finite(&w.cycle))
    }
}

/// A finite word; may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct FiniteWord(pub Vec<Letter>);

impl FiniteWord {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_ids(ids: &[usize]) -> Self {
        Self(ids.iter().copied().map(Letter).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FiniteWord(v)
    }

    /// `self^k`.
    pub fn repeat(&self, k: usize) -> FiniteWord {
        FiniteWord(self.0.repeat(k))
    }

    pub fn check(&self, alphabet: &Alphabet) -> Result<(), WordError> {
        self.0.iter().try_for_each(|&l| alphabet.check(l))
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", l.0 + 1)?;
        }
        Ok(())
    }
}

/// An ultimately periodic word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpWord {
    prefix: FiniteWord,
    cycle: FiniteWord,
}

impl UpWord {
    pub fn new(prefix: FiniteWord, cycle: FiniteWord) -> Result<Self, WordError> {
        if cycle.is_empty() {
            return Err(WordError::EmptyCycle);
        }
        Ok(Self { prefix, cycle })
    }

    /// Shorthand used heavily in tests: letter ids, not label names.
    pub fn from_ids(prefix: &[usize], cycle: &[usize]) -> Result<Self, WordError> {
        Self::new(FiniteWord::from_ids(prefix), FiniteWord::from_ids(cycle))
    }

    /// `v^ω`.
    pub fn periodic(cycle: FiniteWord) -> Result<Self, WordError> {
        Self::new(FiniteWord::empty(), cycle)
    }

    pub fn prefix(&self) -> &FiniteWord {
        &self.prefix
    }

    pub fn cycle(&self) -> &FiniteWord {
        &self.cycle
    }

    pub fn check(&self, alphabet: &Alphabet) -> Result<(), WordError> {
        self.prefix.check(alphabet)?;
        self.cycle.check(alphabet)
    }

    /// Letter at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> Letter {
        let p = self.prefix.len();
        if i < p {
            self.prefix.0[i]
        } else {
            self.cycle.0[(i - p) % self.cycle.len()]
        }
    }

    /// The first `n` letters.
    pub fn unroll(&self, n: usize) -> FiniteWord {
        FiniteWord((0..n).map(|i| self.at(i)).collect())
    }

    /// `u · self`.
    pub fn prepend(&self, u: &FiniteWord) -> UpWord {
        UpWord { prefix: u.concat(&self.prefix), cycle: self.cycle.clone() }
    }

    /// Length up to which two lassos must agree to be the same infinite word.
    pub fn equality_bound(&self, other: &UpWord) -> usize {
        self.prefix.len().max(other.prefix.len()) + lcm(self.cycle.len(), other.cycle.len())
    }

    /// Letter-wise equality of the infinite words.
    pub fn up_equal(&self, other: &UpWord) -> bool {
        let n = self.equality_bound(other);
        (0..n).all(|i| self.at(i) == other.at(i))
    }
}

impl fmt::Display for UpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.prefix, self.cycle)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Every word over `alphabet` of length at most `max_len`, shortest first,
/// then lexicographic in letter ids.
pub fn words_up_to(alphabet: &Alphabet, max_len: usize) -> Vec<FiniteWord> {
    let mut out = vec![FiniteWord::empty()];
    let mut layer = vec![FiniteWord::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.size());
        for w in &layer {
            for l in alphabet.letters() {
                let mut v = w.0.clone();
                v.push(l);
                next.push(FiniteWord(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every lasso with `|prefix| <= max_prefix` and `1 <= |cycle| <= max_cycle`.
/// Semantically equal lassos are kept only once (first occurrence).
pub fn up_words_up_to(alphabet: &Alphabet, max_prefix: usize, max_cycle: usize) -> Vec<UpWord> {
    let prefixes = words_up_to(alphabet, max_prefix);
    let cycles: Vec<_> = words_up_to(alphabet, max_cycle).into_iter().filter(|w| !w.is_empty()).collect();
    let mut out: Vec<UpWord> = Vec::new();
    for c in &cycles {
        for p in &prefixes {
            let w = UpWord { prefix: p.clone(), cycle: c.clone() };
            if !out.iter().any(|o| o.up_equal(&w)) {
                out.push(w);
            }
        }
    }
    out
}
