//! Word arithmetic in the free product of `k + 1` copies of Z/2 and finite
//! balls of the Cayley tree it is identified with.
//!
//! Generators are addressed by 1-based indices `1..=k+1` at every public
//! interface. A [`ReducedWord`] is the unique normal form of a group element:
//! a sequence of generator indices with no two adjacent letters equal. Since
//! every generator is an involution, the empty word is the identity and the
//! inverse of a word is its reversal.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on the number of vertices a ball enumeration may produce.
pub const DEFAULT_MAX_BALL: usize = 1_000_000;

/// The order `k` of the Cayley tree; every vertex has `k + 1` neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupParams {
    k: usize,
}

impl GroupParams {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidOrder);
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of generators, `k + 1`.
    pub fn generators(&self) -> usize {
        self.k + 1
    }

    pub fn identity(&self) -> ReducedWord {
        ReducedWord {
            k: self.k,
            letters: Vec::new(),
        }
    }

    /// The single-letter word `a_index`.
    pub fn generator(&self, index: usize) -> Result<ReducedWord> {
        self.check_index(index)?;
        Ok(ReducedWord {
            k: self.k,
            letters: vec![index as u32],
        })
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.generators() {
            return Err(Error::GeneratorOutOfRange {
                index,
                max: self.generators(),
            });
        }
        Ok(())
    }

    /// Reduces an arbitrary letter sequence to normal form by cancelling
    /// adjacent equal pairs.
    pub fn reduce(&self, letters: &[usize]) -> Result<ReducedWord> {
        let mut stack: Vec<u32> = Vec::with_capacity(letters.len());
        for &index in letters {
            self.check_index(index)?;
            let letter = index as u32;
            if stack.last() == Some(&letter) {
                stack.pop();
            } else {
                stack.push(letter);
            }
        }
        Ok(ReducedWord {
            k: self.k,
            letters: stack,
        })
    }

    /// Parses the dot-separated form `"1.2.3"`; `"e"` is the identity.
    /// The input must already be reduced.
    pub fn parse_word(&self, text: &str) -> Result<ReducedWord> {
        let text = text.trim();
        if text == "e" {
            return Ok(self.identity());
        }
        let mut letters = Vec::new();
        for part in text.split('.') {
            let index: usize = part.parse().map_err(|_| Error::MalformedWord(text.to_string()))?;
            letters.push(index);
        }
        let word = self.reduce(&letters)?;
        if word.len() != letters.len() {
            return Err(Error::MalformedWord(text.to_string()));
        }
        Ok(word)
    }

    /// Closed-form vertex count of the ball of radius `radius`, saturating
    /// at `u128::MAX`.
    pub fn ball_size(&self, radius: usize) -> u128 {
        let k = self.k as u128;
        if k == 1 {
            return 1 + 2 * radius as u128;
        }
        // 1 + (k+1) * (1 + k + ... + k^(R-1))
        let mut sum: u128 = 0;
        let mut power: u128 = 1;
        for _ in 0..radius {
            sum = match sum.checked_add(power) {
                Some(s) => s,
                None => return u128::MAX,
            };
            power = power.saturating_mul(k);
        }
        sum.checked_mul(k + 1)
            .and_then(|s| s.checked_add(1))
            .unwrap_or(u128::MAX)
    }
}

/// An element of the free product in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    k: usize,
    letters: Vec<u32>,
}

impl ReducedWord {
    pub fn params(&self) -> GroupParams {
        GroupParams { k: self.k }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Word length, equal to the tree distance from the identity.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters as 1-based generator indices.
    pub fn letters(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.letters.iter().map(|&l| l as usize)
    }

    pub fn last_letter(&self) -> Option<usize> {
        self.letters.last().map(|&l| l as usize)
    }

    fn check_same(&self, other: &ReducedWord) -> Result<()> {
        if self.k != other.k {
            return Err(Error::MismatchedOrder {
                left: self.k,
                right: other.k,
            });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &ReducedWord) -> Result<ReducedWord> {
        self.check_same(other)?;
        let mut letters = self.letters.clone();
        let mut rest = other.letters.as_slice();
        while let (Some(&a), Some(&b)) = (letters.last(), rest.first()) {
            if a != b {
                break;
            }
            letters.pop();
            rest = &rest[1..];
        }
        letters.extend_from_slice(rest);
        Ok(ReducedWord { k: self.k, letters })
    }

    /// Right multiplication by the generator `a_index`.
    pub fn times_generator(&self, index: usize) -> Result<ReducedWord> {
        self.params().check_index(index)?;
        let letter = index as u32;
        let mut letters = self.letters.clone();
        if letters.last() == Some(&letter) {
            letters.pop();
        } else {
            letters.push(letter);
        }
        Ok(ReducedWord { k: self.k, letters })
    }

    pub fn inverse(&self) -> ReducedWord {
        let mut letters = self.letters.clone();
        letters.reverse();
        ReducedWord { k: self.k, letters }
    }

    /// The `k + 1` tree neighbours `x a_1, ..., x a_{k+1}`, in generator order.
    pub fn neighbors(&self) -> Vec<ReducedWord> {
        (1..=self.k + 1)
            .map(|m| self.times_generator(m).expect("index in range"))
            .collect()
    }

    /// Number of occurrences of `a_index` in the word.
    pub fn omega_count(&self, index: usize) -> Result<usize> {
        self.params().check_index(index)?;
        Ok(self.letters.iter().filter(|&&l| l as usize == index).count())
    }

    /// Tree distance, the length of `x^-1 y`.
    pub fn distance(&self, other: &ReducedWord) -> Result<usize> {
        self.check_same(other)?;
        let common = self
            .letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count();
        Ok(self.letters.len() + other.letters.len() - 2 * common)
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// All words of length at most `radius`, breadth-first from the identity with
/// generators in ascending order.
pub fn enumerate_ball(params: GroupParams, radius: usize, cap: usize) -> Result<Vec<ReducedWord>> {
    let size = params.ball_size(radius);
    if size > cap as u128 {
        return Err(Error::BallTooLarge { radius, size, cap });
    }
    let mut words = Vec::with_capacity(size as usize);
    let mut queue = VecDeque::new();
    queue.push_back(params.identity());
    while let Some(word) = queue.pop_front() {
        if word.len() < radius {
            let last = word.last_letter();
            for m in 1..=params.generators() {
                if Some(m) != last {
                    let mut child = word.clone();
                    child.letters.push(m as u32);
                    queue.push_back(child);
                }
            }
        }
        words.push(word);
    }
    Ok(words)
}

/// A finite ball with an index for neighbour lookups.
#[derive(Debug, Clone)]
pub struct Ball {
    params: GroupParams,
    radius: usize,
    words: Vec<ReducedWord>,
    index: HashMap<ReducedWord, usize>,
}

impl Ball {
    pub fn new(params: GroupParams, radius: usize, cap: usize) -> Result<Self> {
        let words = enumerate_ball(params, radius, cap)?;
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(Self {
            params,
            radius,
            words,
            index,
        })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Vertices in breadth-first order.
    pub fn words(&self) -> &[ReducedWord] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn position(&self, word: &ReducedWord) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// A vertex is interior when all of its neighbours lie in the ball.
    pub fn is_interior(&self, position: usize) -> bool {
        self.words[position].len() < self.radius
    }
}
