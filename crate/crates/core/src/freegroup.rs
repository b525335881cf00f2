//! Reduced words in the free group `F_n`.
//!
//! A [`Word`] is always stored reduced, so equality of words is equality of
//! group elements. The integers are the rank-1 case, whose single generator
//! prints as `t`; higher ranks print generators as `a`, `b`, `c`, ...
//! Inverses carry a `-` suffix in the text format (`"a b- a"`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// A free generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    // Field order gives the derived ordering: all positive generators first.
    inverse: bool,
    index: usize,
}

impl Generator {
    pub const fn new(index: usize, inverse: bool) -> Self {
        Generator { inverse, index }
    }

    pub const fn positive(index: usize) -> Self {
        Generator::new(index, false)
    }

    pub const fn negative(index: usize) -> Self {
        Generator::new(index, true)
    }

    pub fn index(self) -> usize {
        self.index
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Generator::new(self.index, !self.inverse)
    }

    /// All signed generators of the given rank: positives in index order,
    /// then negatives in index order.
    pub fn all(rank: usize) -> impl Iterator<Item = Generator> {
        (0..rank)
            .map(Generator::positive)
            .chain((0..rank).map(Generator::negative))
    }

    pub fn name(self, rank: usize) -> String {
        let base = generator_name(rank, self.index);
        if self.inverse {
            format!("{base}-")
        } else {
            base
        }
    }
}

fn generator_name(rank: usize, index: usize) -> String {
    if rank == 1 {
        "t".to_string()
    } else if index < 26 {
        ((b'a' + index as u8) as char).to_string()
    } else {
        format!("g{index}")
    }
}

fn parse_generator_name(rank: usize, name: &str) -> Option<usize> {
    if rank == 1 && name == "t" {
        return Some(0);
    }
    let mut chars = name.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Some((c as u8 - b'a') as usize),
        _ => name.strip_prefix('g').and_then(|n| n.parse().ok()),
    }
    .filter(|&i| i < rank)
}

/// A reduced word over a free generating set and its inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<Generator>,
}

/// Freely reduces a sequence of signed generators.
///
/// Fails when a generator index is outside `0..rank`.
pub fn reduce(rank: usize, letters: &[Generator]) -> Result<Word> {
    if rank == 0 {
        return Err(Error::invalid("rank", "rank must be at least 1"));
    }
    let mut out: Vec<Generator> = Vec::with_capacity(letters.len());
    for &g in letters {
        if g.index >= rank {
            return Err(Error::invalid(
                "word",
                format!("generator index {} out of range for rank {rank}", g.index),
            ));
        }
        if out.last() == Some(&g.inverse()) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    Ok(Word { rank, letters: out })
}

/// Reduced product `u·v`; fails on rank mismatch.
pub fn concat(u: &Word, v: &Word) -> Result<Word> {
    if u.rank != v.rank {
        return Err(Error::invalid(
            "word",
            format!("rank mismatch: {} vs {}", u.rank, v.rank),
        ));
    }
    Ok(u.mul_unchecked(v))
}

/// All reduced words of length at most `radius`, in shortlex order.
///
/// Fails when the ball would contain more than `cap` elements.
pub fn ball(rank: usize, radius: usize, cap: usize) -> Result<Vec<Word>> {
    if rank == 0 {
        return Err(Error::invalid("rank", "rank must be at least 1"));
    }
    let size = ball_size(rank, radius);
    if size > cap as u128 {
        return Err(Error::cap("ball", cap as u64, size.min(u64::MAX as u128) as u64));
    }
    let mut all = vec![Word::identity(rank)];
    let mut start = 0;
    for _ in 0..radius {
        let end = all.len();
        for i in start..end {
            let last = all[i].letters.last().copied();
            for g in Generator::all(rank) {
                if Some(g.inverse()) != last {
                    let mut letters = all[i].letters.clone();
                    letters.push(g);
                    all.push(Word { rank, letters });
                }
            }
        }
        start = end;
    }
    Ok(all)
}

/// Number of reduced words of length at most `radius`.
pub fn ball_size(rank: usize, radius: usize) -> u128 {
    if rank == 1 {
        return 2 * radius as u128 + 1;
    }
    let branching = 2 * rank as u128 - 1;
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * rank as u128;
    for _ in 0..radius {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(branching);
    }
    total
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// Builds and reduces a word.
    pub fn new(rank: usize, letters: impl IntoIterator<Item = Generator>) -> Result<Self> {
        let letters: Vec<Generator> = letters.into_iter().collect();
        reduce(rank, &letters)
    }

    pub fn from_generator(rank: usize, g: Generator) -> Self {
        assert!(g.index < rank, "generator index out of range");
        Word {
            rank,
            letters: vec![g],
        }
    }

    /// The free generators `a, b, ...` of the given rank.
    pub fn free_generators(rank: usize) -> Vec<Word> {
        (0..rank)
            .map(|i| Word::from_generator(rank, Generator::positive(i)))
            .collect()
    }

    /// `g^exponent` for the signed generator `g`.
    pub fn power(rank: usize, g: Generator, exponent: i64) -> Self {
        assert!(g.index < rank, "generator index out of range");
        let g = if exponent < 0 { g.inverse() } else { g };
        Word {
            rank,
            letters: vec![g; exponent.unsigned_abs() as usize],
        }
    }

    /// `t^exponent` in the integers (rank 1).
    pub fn t_power(exponent: i64) -> Self {
        Word::power(1, Generator::positive(0), exponent)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Generator> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Generator> {
        self.letters.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// `self · g`, reduced.
    pub fn times(&self, g: Generator) -> Word {
        debug_assert!(g.index < self.rank);
        let mut letters = self.letters.clone();
        if letters.last() == Some(&g.inverse()) {
            letters.pop();
        } else {
            letters.push(g);
        }
        Word {
            rank: self.rank,
            letters,
        }
    }

    pub fn pow(&self, exponent: i64) -> Word {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..exponent.unsigned_abs() {
            out = out.mul_unchecked(&base);
        }
        out
    }

    /// Exponent sum; for rank 1 this is the integer the word represents.
    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|g| g.sign() as i64).sum()
    }

    /// Maps each free generator `i` to `images[i]` and reduces.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        let target = images
            .first()
            .map(|w| w.rank)
            .ok_or_else(|| Error::invalid("translation", "no generator images"))?;
        if images.len() != self.rank {
            return Err(Error::invalid(
                "translation",
                format!("expected {} generator images, got {}", self.rank, images.len()),
            ));
        }
        if images.iter().any(|w| w.rank != target) {
            return Err(Error::invalid("translation", "images have different ranks"));
        }
        let mut out = Word::identity(target);
        for g in &self.letters {
            let image = &images[g.index];
            out = if g.inverse {
                out.mul_unchecked(&image.inverse())
            } else {
                out.mul_unchecked(image)
            };
        }
        Ok(out)
    }

    /// Parses the text format: whitespace-separated generator names, a `-`
    /// suffix for inverses, and an optional `^k` exponent (`t^-3`). The
    /// empty string, `1` and `ε` denote the identity.
    pub fn parse(rank: usize, text: &str) -> Result<Word> {
        if rank == 0 {
            return Err(Error::invalid("rank", "rank must be at least 1"));
        }
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "1" || trimmed == "ε" {
            return Ok(Word::identity(rank));
        }
        let mut letters = Vec::new();
        for token in trimmed.split_whitespace() {
            let (name, exponent) = match token.split_once('^') {
                Some((name, exp)) => {
                    let exp: i64 = exp.parse().map_err(|_| {
                        Error::invalid("word", format!("bad exponent in `{token}`"))
                    })?;
                    (name, exp)
                }
                None => (token, 1),
            };
            let (name, exponent) = match name.strip_suffix('-') {
                Some(base) => (base, -exponent),
                None => (name, exponent),
            };
            let index = parse_generator_name(rank, name).ok_or_else(|| {
                Error::invalid(
                    "word",
                    format!("unknown generator `{name}` for rank {rank} in `{text}`"),
                )
            })?;
            let g = if exponent < 0 {
                Generator::negative(index)
            } else {
                Generator::positive(index)
            };
            letters.extend(std::iter::repeat_n(g, exponent.unsigned_abs() as usize));
        }
        reduce(rank, &letters)
    }

    pub(crate) fn mul_unchecked(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        for &g in &other.letters {
            if letters.last() == Some(&g.inverse()) {
                letters.pop();
            } else {
                letters.push(g);
            }
        }
        Word {
            rank: self.rank,
            letters,
        }
    }
}

impl Mul for &Word {
    type Output = Word;

    /// Reduced product. Panics on rank mismatch; use [`concat`] for a
    /// fallible version.
    fn mul(self, rhs: &Word) -> Word {
        assert_eq!(self.rank, rhs.rank, "rank mismatch in word product");
        self.mul_unchecked(rhs)
    }
}

/// Shortlex: shorter words first, then lexicographic in generator order.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then(self.letters.len().cmp(&other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for g in &self.letters {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str(&g.name(self.rank))?;
        }
        Ok(())
    }
}
