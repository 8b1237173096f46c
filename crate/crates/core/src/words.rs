//! Words in the free group and the free monoid on `x1, …, xk`.
//!
//! Commutators follow the convention `[a, b] = a⁻¹ b⁻¹ a b`. With it the
//! leading Magnus term of `[g, h]` is `μ(g)μ(h) − μ(h)μ(g)`; other texts use
//! `a b a⁻¹ b⁻¹`, which flips signs of individual coefficients.
//!
//! Textual syntax:
//!
//! ```text
//! word      := term ("*" term)*
//! term      := atom ("^" signed-int)?
//! atom      := generator | "[" word "," word "]" | "(" word ")"
//! generator := "x" positive-int
//! ```
//!
//! Whitespace is insignificant and the empty word is spelled `e`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A freely reduced element of the free group on `alphabet` generators.
///
/// Letters are signed 1-based generator indices: `2` is `x2`, `-2` is `x2⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupWord {
    alphabet: u32,
    letters: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("generator x{index} outside alphabet of size {alphabet}")]
    OutOfAlphabet { index: u64, alphabet: u32 },
    #[error("`{0}` is not a Lyndon word")]
    NotLyndon(Monomial),
}

impl GroupWord {
    pub fn identity(alphabet: u32) -> Self {
        GroupWord { alphabet, letters: Vec::new() }
    }

    pub fn generator(alphabet: u32, index: u32) -> Self {
        assert!(index >= 1 && index <= alphabet, "generator x{index} outside alphabet {alphabet}");
        GroupWord { alphabet, letters: vec![index as i32] }
    }

    /// Builds a word from signed letters, reducing freely.
    pub fn from_letters(alphabet: u32, letters: impl IntoIterator<Item = i32>) -> Result<Self, WordError> {
        let mut w = GroupWord::identity(alphabet);
        for l in letters {
            let idx = l.unsigned_abs();
            if l == 0 || idx > alphabet {
                return Err(WordError::OutOfAlphabet { index: idx as u64, alphabet });
            }
            w.push(l);
        }
        Ok(w)
    }

    fn push(&mut self, letter: i32) {
        if self.letters.last() == Some(&-letter) {
            self.letters.pop();
        } else {
            self.letters.push(letter);
        }
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    // emptiness is spelled is_identity for group words
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// The same word viewed over a larger alphabet.
    pub fn widen(&self, alphabet: u32) -> Self {
        assert!(alphabet >= self.alphabet);
        GroupWord { alphabet, letters: self.letters.clone() }
    }

    pub fn multiply(&self, other: &GroupWord) -> GroupWord {
        assert_eq!(self.alphabet, other.alphabet, "words over different alphabets");
        let mut out = self.clone();
        for &l in &other.letters {
            out.push(l);
        }
        out
    }

    pub fn invert(&self) -> GroupWord {
        GroupWord {
            alphabet: self.alphabet,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// `[self, other] = self⁻¹ other⁻¹ self other`.
    pub fn commutator(&self, other: &GroupWord) -> GroupWord {
        self.invert().multiply(&other.invert()).multiply(self).multiply(other)
    }

    /// `self^k`; negative exponents go through the inverse.
    pub fn power(&self, k: i64) -> GroupWord {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = GroupWord::identity(self.alphabet);
        // Square-and-multiply keeps intermediate reductions short for long powers.
        let mut acc = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = out.multiply(&acc);
            }
            e >>= 1;
            if e > 0 {
                acc = acc.multiply(&acc);
            }
        }
        out
    }

    /// `other⁻¹ self other`.
    pub fn conjugate_by(&self, other: &GroupWord) -> GroupWord {
        other.invert().multiply(self).multiply(other)
    }
}

impl fmt::Display for GroupWord {
    /// Runs of a letter are folded into powers, e.g. `x1^3*x2^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let exp = if l < 0 { -(run as i64) } else { run as i64 };
            if exp == 1 {
                write!(f, "x{}", l.unsigned_abs())?;
            } else {
                write!(f, "x{}^{}", l.unsigned_abs(), exp)?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Parses a group word over `alphabet` generators.
pub fn parse_word(text: &str, alphabet: u32) -> Result<GroupWord, WordError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, alphabet };
    p.skip_ws();
    let w = p.word()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(w)
}

/// Largest generator index mentioned in `text`, ignoring syntax errors.
/// Useful for picking a default alphabet.
pub fn max_generator_in(text: &str) -> u32 {
    let b = text.as_bytes();
    let mut best = 0u32;
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'x' {
            let start = i + 1;
            let mut j = start;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if let Ok(v) = text[start..j].parse::<u32>() {
                best = best.max(v);
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    best
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    alphabet: u32,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> WordError {
        WordError::Syntax { position: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), WordError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn word(&mut self) -> Result<GroupWord, WordError> {
        let mut w = self.term()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let t = self.term()?;
            w = w.multiply(&t);
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<GroupWord, WordError> {
        let a = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.signed_int()?;
            return Ok(a.power(k));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<GroupWord, WordError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                let idx = self.digits()?;
                if idx == 0 {
                    self.pos = start;
                    return Err(self.error("generator index must be positive"));
                }
                if idx > self.alphabet as u64 {
                    return Err(WordError::OutOfAlphabet { index: idx, alphabet: self.alphabet });
                }
                Ok(GroupWord::generator(self.alphabet, idx as u32))
            }
            Some(b'e') => {
                self.pos += 1;
                Ok(GroupWord::identity(self.alphabet))
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(b',')?;
                let b = self.word()?;
                self.expect(b']')?;
                Ok(a.commutator(&b))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(b')')?;
                Ok(a)
            }
            Some(_) => Err(self.error("expected generator, `e`, `[` or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Result<u64, WordError> {
        // no whitespace inside a number
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| WordError::Syntax { position: start, message: "number too large".into() })
    }

    fn signed_int(&mut self) -> Result<i64, WordError> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        self.skip_ws();
        let start = self.pos;
        let v = self.digits()?;
        let v = i64::try_from(v)
            .map_err(|_| WordError::Syntax { position: start, message: "exponent too large".into() })?;
        Ok(if neg { -v } else { v })
    }
}

/// A word in the free monoid; indexes power-series coefficients.
///
/// Ordered by length first, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn empty() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(letters: Vec<u32>) -> Self {
        assert!(letters.iter().all(|&l| l >= 1), "monomial letters are 1-based");
        Monomial(letters)
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Monomial(v)
    }

    /// Letters `start..end` (0-based, half open).
    pub fn subword(&self, start: usize, end: usize) -> Monomial {
        Monomial(self.0[start..end].to_vec())
    }

    pub fn max_letter(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Strictly smaller than each proper rotation.
    pub fn is_lyndon(&self) -> bool {
        let n = self.0.len();
        if n == 0 {
            return false;
        }
        (1..n).all(|k| {
            let rot = self.0[k..].iter().chain(&self.0[..k]);
            self.0.iter().cmp(rot) == Ordering::Less
        })
    }

    /// Parses `x1x2x1` (or `e` for the empty monomial).
    pub fn parse(text: &str, alphabet: u32) -> Result<Monomial, WordError> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "e" || t.is_empty() {
            return Ok(Monomial::empty());
        }
        let b = t.as_bytes();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < b.len() {
            if b[i] != b'x' {
                return Err(WordError::Syntax { position: i, message: "expected `x`".into() });
            }
            let start = i + 1;
            let mut j = start;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            let idx: u64 = t[start..j]
                .parse()
                .map_err(|_| WordError::Syntax { position: start, message: "expected digits".into() })?;
            if idx == 0 {
                return Err(WordError::Syntax { position: start, message: "generator index must be positive".into() });
            }
            if idx > alphabet as u64 {
                return Err(WordError::OutOfAlphabet { index: idx, alphabet });
            }
            letters.push(idx as u32);
            i = j;
        }
        Ok(Monomial(letters))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

impl From<Vec<u32>> for Monomial {
    fn from(v: Vec<u32>) -> Self {
        Monomial::new(v)
    }
}

/// Iterates all monomials of a fixed length in lexicographic order.
#[derive(Clone, Debug)]
pub struct Monomials {
    alphabet: u32,
    current: Option<Vec<u32>>,
}

impl Iterator for Monomials {
    type Item = Monomial;

    fn next(&mut self) -> Option<Monomial> {
        let cur = self.current.as_mut()?;
        let out = Monomial(cur.clone());
        // odometer increment from the right
        let mut k = cur.len();
        loop {
            if k == 0 {
                self.current = None;
                break;
            }
            k -= 1;
            if cur[k] < self.alphabet {
                cur[k] += 1;
                for c in &mut cur[k + 1..] {
                    *c = 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All `alphabet^length` monomials of the given length, lexicographically.
pub fn enumerate_monomials(alphabet: u32, length: usize) -> Monomials {
    Monomials {
        alphabet,
        current: if alphabet == 0 && length > 0 { None } else { Some(vec![1; length]) },
    }
}

/// Lyndon words of exactly `length` letters, in lexicographic order
/// (Duval's successor iteration).
pub fn lyndon_words(alphabet: u32, length: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    if alphabet == 0 || length == 0 {
        return out;
    }
    let mut w: Vec<u32> = vec![1];
    loop {
        if w.len() == length {
            out.push(Monomial(w.clone()));
        }
        // extend periodically to full length, then bump the last non-maximal letter
        let m = w.len();
        while w.len() < length {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&alphabet) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// Bracketing of a Lyndon word by its standard factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasicCommutator {
    Generator(u32),
    Bracket(Box<BasicCommutator>, Box<BasicCommutator>),
}

impl BasicCommutator {
    pub fn weight(&self) -> usize {
        match self {
            BasicCommutator::Generator(_) => 1,
            BasicCommutator::Bracket(a, b) => a.weight() + b.weight(),
        }
    }

    /// Leaf sequence; for brackets built by [`basic_commutator`] this is the Lyndon word.
    pub fn leaves(&self) -> Monomial {
        fn walk(c: &BasicCommutator, out: &mut Vec<u32>) {
            match c {
                BasicCommutator::Generator(g) => out.push(*g),
                BasicCommutator::Bracket(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut v = Vec::new();
        walk(self, &mut v);
        Monomial(v)
    }

    /// Group element obtained by reading leaves as generators and brackets as commutators.
    pub fn realize(&self, alphabet: u32) -> GroupWord {
        self.realize_with(&|g| GroupWord::generator(alphabet, g))
    }

    /// Like [`realize`](Self::realize) but with each leaf `xi` replaced by `leaf(i)`.
    /// Any substitution keeps the result in the same lower central term.
    pub fn realize_with(&self, leaf: &dyn Fn(u32) -> GroupWord) -> GroupWord {
        match self {
            BasicCommutator::Generator(g) => leaf(*g),
            BasicCommutator::Bracket(a, b) => a.realize_with(leaf).commutator(&b.realize_with(leaf)),
        }
    }
}

impl fmt::Display for BasicCommutator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicCommutator::Generator(g) => write!(f, "x{g}"),
            BasicCommutator::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// Standard bracketing: split `u = v w` at the longest proper Lyndon suffix `w`
/// and recurse on both halves.
pub fn basic_commutator(lyndon: &Monomial) -> Result<BasicCommutator, WordError> {
    if !lyndon.is_lyndon() {
        return Err(WordError::NotLyndon(lyndon.clone()));
    }
    Ok(bracket(lyndon.letters()))
}

fn bracket(w: &[u32]) -> BasicCommutator {
    if w.len() == 1 {
        return BasicCommutator::Generator(w[0]);
    }
    let split = (1..w.len())
        .find(|&i| Monomial(w[i..].to_vec()).is_lyndon())
        .expect("a Lyndon word of length >= 2 has a proper Lyndon suffix");
    BasicCommutator::Bracket(Box::new(bracket(&w[..split])), Box::new(bracket(&w[split..])))
}
