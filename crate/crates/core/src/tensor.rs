//! Words and tensors of T(L) for L free of finite rank.
//!
//! A [`Word`] is a pure tensor `e_{i1} ⊗ … ⊗ e_{ik}` of basis vectors, stored
//! as its 1-based letters. A [`Tensor`] is a finite linear combination of
//! words with nonzero coefficients, kept in canonical order: shorter words
//! first, then lexicographic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::scalars::{RingSpec, Scalar};

/// A word in the generators `1..=rank`; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>, rank: usize) -> Result<Word> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l as usize > rank) {
            return Err(Error::IndexOutOfRange { index: bad as i64, rank });
        }
        Ok(Word(letters))
    }

    /// Skips the range check; callers guarantee `1 <= letter <= rank`.
    pub(crate) fn from_letters(letters: Vec<u32>) -> Word {
        Word(letters)
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Position of this word among all words of its degree in lexicographic order.
    pub fn index(&self, rank: usize) -> usize {
        self.0
            .iter()
            .fold(0, |acc, &l| acc * rank + (l as usize - 1))
    }

    /// Inverse of [`Word::index`].
    pub fn from_index(mut index: usize, degree: usize, rank: usize) -> Word {
        let mut letters = vec![0u32; degree];
        for slot in letters.iter_mut().rev() {
            *slot = (index % rank) as u32 + 1;
            index /= rank;
        }
        Word(letters)
    }

    /// All words of a given degree, in lexicographic order.
    pub fn all(rank: usize, degree: usize) -> impl Iterator<Item = Word> {
        let count = rank.pow(degree as u32);
        (0..count).map(move |i| Word::from_index(i, degree, rank))
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
        f.write_str("[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

/// An element of T(L), L = k^rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    rank: usize,
    ring: RingSpec,
    terms: BTreeMap<Word, Scalar>,
}

impl Tensor {
    pub fn zero(rank: usize, ring: RingSpec) -> Tensor {
        Tensor { rank, ring, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize, ring: RingSpec) -> Tensor {
        Tensor::monomial(rank, ring, Word::empty(), ring.one())
    }

    /// The basis vector `e_i` of L (1-based).
    pub fn generator(rank: usize, ring: RingSpec, i: u32) -> Result<Tensor> {
        Tensor::word(rank, ring, &[i])
    }

    pub fn word(rank: usize, ring: RingSpec, letters: &[u32]) -> Result<Tensor> {
        let w = Word::new(letters.to_vec(), rank)?;
        Ok(Tensor::monomial(rank, ring, w, ring.one()))
    }

    fn monomial(rank: usize, ring: RingSpec, w: Word, c: Scalar) -> Tensor {
        let mut t = Tensor::zero(rank, ring);
        t.add_term(w, c);
        t
    }

    /// Builds a tensor from `(word, coefficient)` pairs, combining like terms.
    pub fn from_terms(
        rank: usize,
        ring: RingSpec,
        terms: impl IntoIterator<Item = (Word, Scalar)>,
    ) -> Result<Tensor> {
        let mut t = Tensor::zero(rank, ring);
        for (w, c) in terms {
            if c.ring() != ring {
                return Err(Error::RingMismatch(c.ring().to_string(), ring.to_string()));
            }
            let w = Word::new(w.0, rank)?;
            t.add_term(w, c);
        }
        Ok(t)
    }

    pub(crate) fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &*e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Degrees carrying at least one term, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut ds: Vec<usize> = self.terms.keys().map(Word::degree).collect();
        ds.dedup();
        ds
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::degree)
    }

    /// `Some(k)` when every term has degree k; the zero tensor is homogeneous of every degree
    /// and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    /// Sub-sum of the terms of degree `k`.
    pub fn graded_component(&self, k: usize) -> Tensor {
        Tensor {
            rank: self.rank,
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.degree() == k)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Homogeneous components, ascending by degree.
    pub fn components(&self) -> Vec<(usize, Tensor)> {
        self.degrees()
            .into_iter()
            .map(|d| (d, self.graded_component(d)))
            .collect()
    }

    fn check_compatible(&self, other: &Tensor) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Tensor) -> Result<Tensor> {
        self.try_add(&-other)
    }

    pub fn scale(&self, c: &Scalar) -> Tensor {
        let mut out = Tensor::zero(self.rank, self.ring);
        for (w, d) in &self.terms {
            out.add_term(w.clone(), c * d);
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> Tensor {
        self.scale(&Scalar::from_int(self.ring, c))
    }

    /// The concatenation product of T(L).
    pub fn tensor_product(&self, other: &Tensor) -> Result<Tensor> {
        self.check_compatible(other)?;
        let mut out = Tensor::zero(self.rank, self.ring);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Tensor {
        let mut acc = Tensor::one(self.rank, self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Applies a word-level linear map with integer coefficients.
    pub(crate) fn map_words<F>(&self, mut f: F) -> Tensor
    where
        F: FnMut(&Word, &mut dyn FnMut(Word, i64)),
    {
        let mut out = Tensor::zero(self.rank, self.ring);
        for (w, c) in &self.terms {
            f(w, &mut |image: Word, k: i64| {
                out.add_term(image, c * &Scalar::from_int(self.ring, k));
            });
        }
        out
    }

    /// Like [`Tensor::map_words`] but with ring-valued coefficients.
    pub(crate) fn map_words_scalar<F>(&self, mut f: F) -> Tensor
    where
        F: FnMut(&Word, &mut dyn FnMut(Word, Scalar)),
    {
        let mut out = Tensor::zero(self.rank, self.ring);
        for (w, c) in &self.terms {
            f(w, &mut |image: Word, k: Scalar| {
                out.add_term(image, c * &k);
            });
        }
        out
    }

    /// Coordinates of the degree-`d` component in lexicographic word order.
    pub fn coordinates(&self, d: usize) -> Vec<Scalar> {
        let mut v = vec![self.ring.zero(); self.rank.pow(d as u32)];
        for (w, c) in self.terms.iter().filter(|(w, _)| w.degree() == d) {
            v[w.index(self.rank)] = c.clone();
        }
        v
    }

    /// Homogeneous tensor of degree `d` from lexicographic coordinates.
    pub fn from_coordinates(rank: usize, ring: RingSpec, d: usize, coords: &[Scalar]) -> Tensor {
        let mut t = Tensor::zero(rank, ring);
        for (i, c) in coords.iter().enumerate() {
            t.add_term(Word::from_index(i, d, rank), c.clone());
        }
        t
    }

    pub fn parse(text: &str, rank: usize, ring: RingSpec) -> Result<Tensor> {
        parse_tensor(text, rank, ring)
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_tensor(self))
    }
}

// Operator impls panic on rank/ring mismatch; use the `try_*` methods or
// `tensor_product` to get an error instead.
impl Add<&Tensor> for &Tensor {
    type Output = Tensor;
    fn add(self, rhs: &Tensor) -> Tensor {
        self.try_add(rhs).expect("tensor addition")
    }
}

impl Sub<&Tensor> for &Tensor {
    type Output = Tensor;
    fn sub(self, rhs: &Tensor) -> Tensor {
        self.try_sub(rhs).expect("tensor subtraction")
    }
}

impl Mul<&Tensor> for &Tensor {
    type Output = Tensor;
    fn mul(self, rhs: &Tensor) -> Tensor {
        self.tensor_product(rhs).expect("tensor product")
    }
}

impl Neg for &Tensor {
    type Output = Tensor;
    fn neg(self) -> Tensor {
        Tensor {
            rank: self.rank,
            ring: self.ring,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

/// Canonical text form: `"0"` for zero, otherwise terms in word order with
/// the coefficient first, e.g. `[1,2] - 3/2*[2,1]`.
pub fn format_tensor(t: &Tensor) -> String {
    if t.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (w, c)) in t.terms.iter().enumerate() {
        let negative = c.is_negative();
        let magnitude = if negative { -c } else { c.clone() };
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !magnitude.is_one() {
            out.push_str(&magnitude.to_string());
            out.push('*');
        }
        out.push_str(&w.to_string());
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.pos, message: message.into() })
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{}`", b as char))
        }
    }

    fn digits(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn word(&mut self, rank: usize) -> Result<Word> {
        self.expect(b'[')?;
        let mut letters = Vec::new();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(Word::empty());
        }
        loop {
            let d: BigInt = self.digits()?.parse().expect("digits");
            let idx = i64::try_from(&d).unwrap_or(i64::MAX);
            if idx < 1 || idx as u128 > rank as u128 {
                return Err(Error::IndexOutOfRange { index: idx, rank });
            }
            letters.push(idx as u32);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {
                    self.pos += 1;
                    return Ok(Word(letters));
                }
                _ => return self.error("expected `,` or `]`"),
            }
        }
    }

    fn term(&mut self, rank: usize, ring: RingSpec) -> Result<(Word, Scalar)> {
        if self.peek() == Some(b'[') {
            return Ok((self.word(rank)?, ring.one()));
        }
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        if self.peek() == Some(b'[') {
            let w = self.word(rank)?;
            return Ok((w, Scalar::from_int(ring, -1)));
        }
        let num = self.digits()?.to_string();
        let den = if self.peek() == Some(b'/') {
            self.pos += 1;
            Some(self.digits()?.to_string())
        } else {
            None
        };
        let literal = match &den {
            Some(d) => format!("{num}/{d}"),
            None => num.clone(),
        };
        let num: BigInt = num.parse().expect("digits");
        let mut c = match den {
            None => Scalar::from_bigint(ring, &num),
            Some(d) => {
                let d: BigInt = d.parse().expect("digits");
                Scalar::from_fraction(ring, &num, &d)
                    .map_err(|_| Error::BadCoefficient(literal.clone()))?
            }
        };
        if negative {
            c = -c;
        }
        self.expect(b'*')?;
        Ok((self.word(rank)?, c))
    }
}

/// Parses the tensor grammar `expr := term (('+'|'-') term)*`,
/// `term := [coef '*'] word`, accepting `0` for the zero tensor and a
/// leading sign on the first term.
pub fn parse_tensor(text: &str, rank: usize, ring: RingSpec) -> Result<Tensor> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let mut t = Tensor::zero(rank, ring);
    if text.trim() == "0" {
        return Ok(t);
    }
    let mut sign_negative = match p.peek() {
        Some(b'+') => {
            p.pos += 1;
            false
        }
        _ => false,
    };
    loop {
        let (w, c) = p.term(rank, ring)?;
        t.add_term(w, if sign_negative { -c } else { c });
        match p.peek() {
            None => return Ok(t),
            Some(b'+') => sign_negative = false,
            Some(b'-') => sign_negative = true,
            Some(_) => return p.error("expected `+`, `-` or end of input"),
        }
        p.pos += 1;
    }
}
