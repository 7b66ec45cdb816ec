//! Small subsets of `{1, ..., 32}` as bitmasks.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A subset of `{1, ..., 32}`; bit `v - 1` marks membership of `v`.
///
/// Ordering is lexicographic on the ascending element lists, so `{1,2,4} < {1,3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        Subset(((1u64 << n) - 1) as u32)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, v: usize) -> bool {
        (1..=32).contains(&v) && self.0 & (1 << (v - 1)) != 0
    }

    pub fn with(self, v: usize) -> Self {
        Subset(self.0 | 1 << (v - 1))
    }

    pub fn without(self, v: usize) -> Self {
        Subset(self.0 & !(1 << (v - 1)))
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        Subset::full(n).difference(self)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Elements in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |b| self.0 & (1 << b) != 0).map(|b| b + 1)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// The only element of a singleton.
    pub fn single(self) -> Option<usize> {
        (self.len() == 1).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// All `k`-subsets of `{1, ..., n}` in lexicographic order.
    pub fn combinations(n: usize, k: usize) -> Vec<Subset> {
        fn go(start: usize, n: usize, k: usize, acc: Subset, out: &mut Vec<Subset>) {
            if k == 0 {
                out.push(acc);
                return;
            }
            for v in start..=n + 1 - k {
                go(v + 1, n, k - 1, acc.with(v), out);
            }
        }
        let mut out = Vec::new();
        if k <= n {
            go(1, n, k, Subset::EMPTY, &mut out);
        }
        out
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Subset::EMPTY, Subset::with)
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items = self.to_vec();
        if items.iter().all(|&v| v <= 9) {
            for v in items {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = items.iter().map(usize::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for Subset {
    type Err = Error;

    /// Parses `"1245"` or `"1,10,12"`. Repeated elements are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Johnson(format!("not a subset: {s:?}"));
        let values: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|p| p.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        let set: Subset = values.iter().copied().filter(|v| (1..=32).contains(v)).collect();
        if set.len() != values.len() {
            return Err(bad());
        }
        Ok(set)
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<usize>::deserialize(deserializer)?;
        let set: Subset = values.iter().copied().filter(|v| (1..=32).contains(v)).collect();
        if set.len() != values.len() {
            return Err(serde::de::Error::custom(format!("not a subset: {values:?}")));
        }
        Ok(set)
    }
}
