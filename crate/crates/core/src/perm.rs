//! Permutations of `{1, ..., n}` in one-line notation.
//!
//! A [`Permutation`] stores its word `σ₁σ₂…σₙ` with 1-based values.
//! Composition follows the functional convention `(p ∘ q)(k) = p(q(k))`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest degree whose factorial fits in the `u64` rank space.
pub const MAX_RANKED_DEGREE: usize = 20;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity of the product of two permutations with these parities.
    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

impl Permutation {
    /// Builds a permutation from a 1-based word, checking bijectivity.
    pub fn from_word(word: Vec<u8>) -> Result<Self> {
        let n = word.len();
        if n == 0 || n > u8::MAX as usize {
            return Err(Error::NotAPermutation(format!("{word:?}")));
        }
        let mut seen = vec![false; n + 1];
        for &v in &word {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(Error::NotAPermutation(format!("{word:?}")));
            }
            seen[v] = true;
        }
        Ok(Permutation { word })
    }

    /// Caller guarantees the word is a bijection on `1..=len`.
    pub(crate) fn from_word_unchecked(word: Vec<u8>) -> Self {
        debug_assert!(Permutation::from_word(word.clone()).is_ok());
        Permutation { word }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            word: (1..=n as u8).collect(),
        }
    }

    /// The transposition exchanging `i` and `j` (1-based).
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut p = Permutation::identity(n);
        p.word.swap(i - 1, j - 1);
        p
    }

    pub fn degree(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> u8 {
        self.word[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(k, &v)| v as usize == k + 1)
    }

    /// `(self ∘ other)(k) = self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        let word = other.word.iter().map(|&k| self.word[k as usize - 1]).collect();
        Ok(Permutation { word })
    }

    pub fn invert(&self) -> Permutation {
        let mut word = vec![0u8; self.degree()];
        for (k, &v) in self.word.iter().enumerate() {
            word[v as usize - 1] = (k + 1) as u8;
        }
        Permutation { word }
    }

    /// Exchanges the contents of 1-based positions `i` and `j`, i.e. `self ∘ (i j)`.
    pub fn swap_positions(&self, i: usize, j: usize) -> Permutation {
        let mut word = self.word.clone();
        word.swap(i - 1, j - 1);
        Permutation { word }
    }

    pub fn parity(&self) -> Parity {
        // n minus the number of cycles
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.word[k] as usize - 1;
            }
        }
        if (n - cycles) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Position of this word in the lexicographic order of `S_n`, starting at 0.
    pub fn lex_rank(&self) -> u64 {
        let n = self.degree();
        assert!(n <= MAX_RANKED_DEGREE, "degree {n} too large to rank");
        let mut rank = 0u64;
        for i in 0..n {
            let smaller_later = self.word[i + 1..]
                .iter()
                .filter(|&&v| v < self.word[i])
                .count() as u64;
            rank = rank * (n - i) as u64 + smaller_later;
        }
        rank
    }

    pub fn lex_unrank(rank: u64, n: usize) -> Result<Permutation> {
        if n == 0 || n > MAX_RANKED_DEGREE || rank >= factorial(n) {
            return Err(Error::RankOutOfRange { rank, n });
        }
        let mut digits = vec![0usize; n];
        let mut rest = rank;
        for i in (0..n).rev() {
            let base = (n - i) as u64;
            digits[i] = (rest % base) as usize;
            rest /= base;
        }
        let mut pool: Vec<u8> = (1..=n as u8).collect();
        let word = digits.into_iter().map(|d| pool.remove(d)).collect();
        Ok(Permutation { word })
    }

    /// Every permutation of degree `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (0..factorial(n)).map(move |k| Permutation::lex_unrank(k, n).expect("rank in range"))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() <= 9 {
            for v in &self.word {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.word.iter().map(u8::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts a digit string (`"2134"`) or comma-separated integers (`"10,2,3,..."`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::NotAPermutation(s.to_string());
        let word: Vec<u8> = if s.contains(',') {
            s.split(',')
                .map(|part| part.trim().parse::<u8>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        Permutation::from_word(word)
    }
}

impl serde::Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
