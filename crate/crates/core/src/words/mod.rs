//! Reduced words in free groups, monomials in two families of matrix units, and
//! their evaluation under a representation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{trace_of_product, Matrix};
use crate::scalar::{Real, C};

/// A generator of `F_d` or its inverse. `generator` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }

    /// Signed 1-based form used in word files: `a_j ↦ j`, `a_j⁻¹ ↦ -j`.
    pub fn signed(self) -> i64 {
        let j = self.generator as i64 + 1;
        if self.inverse {
            -j
        } else {
            j
        }
    }

    pub fn from_signed(s: i64) -> Result<Self> {
        if s == 0 {
            return Err(Error::Parse("generator index 0 (indices are 1-based)".into()));
        }
        Ok(Self { generator: (s.unsigned_abs() - 1) as usize, inverse: s < 0 })
    }
}

/// Letter ordering used by [`ball`]: `a1 < a1⁻¹ < a2 < a2⁻¹ < …`, which is the
/// derived `Ord` on `(generator, inverse)`.
fn letters_in_order(d: usize) -> Vec<Letter> {
    (0..d).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)]).collect()
}

/// A freely reduced word in the generators of a free group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        for (pos, w) in letters.windows(2).enumerate() {
            if w[1] == w[0].inv() {
                return Err(Error::NotReduced(pos));
            }
        }
        Ok(Self { letters })
    }

    pub fn from_signed(signed: &[i64]) -> Result<Self> {
        Self::new(signed.iter().map(|&s| Letter::from_signed(s)).collect::<Result<_>>()?)
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
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

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    /// Reduced form of `self · other`.
    pub fn concat(&self, other: &Self) -> Self {
        Self::reduce(self.letters.iter().chain(&other.letters).copied())
    }

    /// Largest generator index used, plus one.
    pub fn rank_needed(&self) -> usize {
        self.letters.iter().map(|l| l.generator + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("id");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| l.signed().to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "id" {
            return Ok(Self::identity());
        }
        let signed = s
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad letter '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        if signed.is_empty() {
            return Err(Error::Parse("empty word (write 'id' for the identity)".into()));
        }
        Self::from_signed(&signed)
    }
}

/// All reduced words of length at most `radius` over `d` generators, in
/// length-lexicographic order, starting with the identity.
pub fn ball(d: usize, radius: usize) -> Vec<GroupWord> {
    let alphabet = letters_in_order(d);
    let mut out = vec![GroupWord::identity()];
    let mut layer = vec![GroupWord::identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if w.letters.last() == Some(&l.inv()) {
                    continue;
                }
                let mut letters = w.letters.clone();
                letters.push(l);
                next.push(GroupWord { letters });
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// The two matrix-unit families of `M_n * M_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    E,
    F,
}

/// A matrix-unit symbol `e_ij` or `f_ij`, stored 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub family: Family,
    pub i: usize,
    pub j: usize,
}

impl Symbol {
    pub fn e(i: usize, j: usize) -> Self {
        Self { family: Family::E, i, j }
    }

    pub fn f(i: usize, j: usize) -> Self {
        Self { family: Family::F, i, j }
    }

    /// `x_ij* = x_ji`.
    pub fn adjoint(self) -> Self {
        Self { family: self.family, i: self.j, j: self.i }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::E => 'e',
            Family::F => 'f',
        };
        write!(f, "{fam}.{}.{}", self.i + 1, self.j + 1)
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad symbol '{s}' (expected e.i.j or f.i.j)"));
        let mut parts = s.trim().split('.');
        let family = match parts.next() {
            Some("e") => Family::E,
            Some("f") => Family::F,
            _ => return Err(bad()),
        };
        let mut index = || -> Result<usize> {
            let v: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if v == 0 {
                return Err(bad());
            }
            Ok(v - 1)
        };
        let (i, j) = (index()?, index()?);
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self { family, i, j })
    }
}

/// A product of matrix-unit symbols; the empty product is the unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StarMonomial {
    factors: Vec<Symbol>,
}

impl StarMonomial {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(factors: Vec<Symbol>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[Symbol] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The adjoint, written again as a plain monomial since `x_ij* = x_ji`.
    pub fn adjoint(&self) -> Self {
        Self { factors: self.factors.iter().rev().map(|s| s.adjoint()).collect() }
    }
}

impl fmt::Display for StarMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("id");
        }
        let parts: Vec<String> = self.factors.iter().map(Symbol::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for StarMonomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "id" {
            return Ok(Self::identity());
        }
        let factors = s.split_whitespace().map(str::parse).collect::<Result<Vec<Symbol>>>()?;
        if factors.is_empty() {
            return Err(Error::Parse("empty monomial (write 'id' for the unit)".into()));
        }
        Ok(Self { factors })
    }
}

/// Monomials of length at most `max_len` in the generators
/// `e_1j, e_j1, f_1j, f_j1` (`j = 2..n`), with no two adjacent letters from the
/// same family. Adjacent same-family letters multiply to a single unit or zero,
/// so these alternating words carry all mixed moments up to that length.
pub fn monomial_ball(n: usize, max_len: usize) -> Vec<StarMonomial> {
    let mut alphabet = Vec::new();
    for fam in [Family::E, Family::F] {
        for j in 1..n {
            alphabet.push(Symbol { family: fam, i: 0, j });
            alphabet.push(Symbol { family: fam, i: j, j: 0 });
        }
    }
    let mut out = vec![StarMonomial::identity()];
    let mut layer = vec![StarMonomial::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &s in &alphabet {
                if w.factors.last().is_some_and(|l| l.family == s.family) {
                    continue;
                }
                let mut factors = w.factors.clone();
                factors.push(s);
                next.push(StarMonomial { factors });
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Something that assigns a matrix to each letter of a word.
pub trait Representation<T: Real> {
    type Letter: Copy + Ord;

    fn dim(&self) -> usize;

    fn letter(&self, letter: &Self::Letter) -> Result<&Matrix<T>>;
}

/// A finite sequence of letters.
pub trait Word {
    type Letter: Copy + Ord;

    fn word_letters(&self) -> &[Self::Letter];
}

impl Word for GroupWord {
    type Letter = Letter;

    fn word_letters(&self) -> &[Letter] {
        &self.letters
    }
}

impl Word for StarMonomial {
    type Letter = Symbol;

    fn word_letters(&self) -> &[Symbol] {
        &self.factors
    }
}

/// Ordered product of the letter matrices; the empty word gives the identity.
pub fn evaluate<T, R, W>(word: &W, rep: &R) -> Result<Matrix<T>>
where
    T: Real,
    R: Representation<T>,
    W: Word<Letter = R::Letter>,
{
    let mut acc: Option<Matrix<T>> = None;
    for l in word.word_letters() {
        let m = rep.letter(l)?;
        acc = Some(match acc {
            None => m.clone(),
            Some(a) => a.matmul(m),
        });
    }
    Ok(acc.unwrap_or_else(|| Matrix::identity(rep.dim())))
}

/// Normalized traces of the evaluated words, in input order.
///
/// Products of shared prefixes are cached; the last letter only enters through
/// `tr(prefix · letter)`, so no full product of maximal length is formed.
pub fn moment_vector<T, R, W>(rep: &R, words: &[W]) -> Result<Vec<C<T>>>
where
    T: Real,
    R: Representation<T>,
    W: Word<Letter = R::Letter>,
{
    let k = T::from_usize_lossy(rep.dim());
    let mut cache: BTreeMap<Vec<R::Letter>, Matrix<T>> = BTreeMap::new();
    let mut out = Vec::with_capacity(words.len());
    for w in words {
        let letters = w.word_letters();
        let value = match letters.split_last() {
            None => C::new(T::one(), T::zero()),
            Some((last, prefix)) => {
                let last_m = rep.letter(last)?;
                if prefix.is_empty() {
                    last_m.trace() / k
                } else {
                    let p = prefix_product(rep, prefix, &mut cache)?;
                    trace_of_product(p, last_m) / k
                }
            }
        };
        out.push(value);
    }
    Ok(out)
}

fn prefix_product<'c, T, R>(
    rep: &R,
    prefix: &[R::Letter],
    cache: &'c mut BTreeMap<Vec<R::Letter>, Matrix<T>>,
) -> Result<&'c Matrix<T>>
where
    T: Real,
    R: Representation<T>,
{
    if !cache.contains_key(prefix) {
        let m = match prefix.split_last() {
            None => unreachable!("prefix is nonempty"),
            Some((last, rest)) if rest.is_empty() => rep.letter(last)?.clone(),
            Some((last, rest)) => {
                let head = prefix_product(rep, rest, cache)?.clone();
                head.matmul(rep.letter(last)?)
            }
        };
        cache.insert(prefix.to_vec(), m);
    }
    Ok(&cache[prefix])
}

/// Side-by-side moments of two traces over one word list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MomentReport<T: Real = f64> {
    pub words: Vec<String>,
    pub values_a: Vec<C<T>>,
    pub values_b: Vec<C<T>>,
    pub deltas: Vec<T>,
    pub sup_delta: T,
    pub generator_trace_distances: Vec<T>,
}

impl<T: Real> MomentReport<T> {
    pub fn new(
        words: Vec<String>,
        values_a: Vec<C<T>>,
        values_b: Vec<C<T>>,
        generator_trace_distances: Vec<T>,
    ) -> Result<Self> {
        if values_a.len() != words.len() || values_b.len() != words.len() {
            return Err(Error::DimensionMismatch { expected: words.len(), found: values_a.len().max(values_b.len()) });
        }
        let deltas: Vec<T> = values_a.iter().zip(&values_b).map(|(a, b)| (a - b).norm()).collect();
        let sup_delta = deltas.iter().copied().fold(T::zero(), T::max);
        Ok(Self { words, values_a, values_b, deltas, sup_delta, generator_trace_distances })
    }

    /// Compare two representations directly over `words`.
    pub fn compare<RA, RB, W>(a: &RA, b: &RB, words: &[W], generator_trace_distances: Vec<T>) -> Result<Self>
    where
        RA: Representation<T>,
        RB: Representation<T, Letter = RA::Letter>,
        W: Word<Letter = RA::Letter> + fmt::Display,
    {
        let va = moment_vector(a, words)?;
        let vb = moment_vector(b, words)?;
        Self::new(words.iter().map(W::to_string).collect(), va, vb, generator_trace_distances)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }
}

/// Parse a word file: one word per line, `#` comments and blank lines ignored.
pub fn parse_word_list<W: FromStr<Err = Error>>(text: &str) -> Result<Vec<W>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse)
        .collect()
}

pub fn format_word_list<W: fmt::Display>(words: &[W]) -> String {
    let mut s = String::new();
    for w in words {
        s.push_str(&w.to_string());
        s.push('\n');
    }
    s
}
