use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite, strictly increasing set of positive integers.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FinSet {
    elems: Vec<u64>,
}

impl FinSet {
    pub fn empty() -> Self {
        FinSet { elems: Vec::new() }
    }

    /// Validates that `elems` is strictly increasing and positive.
    pub fn new(elems: Vec<u64>) -> Result<Self> {
        if elems.first() == Some(&0) {
            return Err(Error::InvalidSet("elements must be positive".into()));
        }
        if elems.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSet(format!("{elems:?} is not strictly increasing")));
        }
        Ok(FinSet { elems })
    }

    /// Sorts and deduplicates arbitrary input.
    pub fn from_unsorted(mut elems: Vec<u64>) -> Result<Self> {
        elems.sort_unstable();
        elems.dedup();
        FinSet::new(elems)
    }

    /// `{lo, lo+1, …, hi}`; empty when `lo > hi`.
    pub fn range(lo: u64, hi: u64) -> Self {
        FinSet {
            elems: (lo.max(1)..=hi).collect(),
        }
    }

    /// The subset of `ground` selected by the bits of `mask` (bit `i` ↔ `ground[i]`).
    pub fn from_mask(ground: &[u64], mask: u64) -> Self {
        FinSet {
            elems: ground
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(elems: Vec<u64>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        FinSet { elems }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.elems
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = u64> + ExactSizeIterator + '_ {
        self.elems.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn min(&self) -> Option<u64> {
        self.elems.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.elems.last().copied()
    }

    pub fn sum(&self) -> u64 {
        self.elems.iter().sum()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// The first `k` elements.
    pub fn prefix(&self, k: usize) -> FinSet {
        FinSet {
            elems: self.elems[..k.min(self.elems.len())].to_vec(),
        }
    }

    /// Elements after the first `k`.
    pub fn suffix(&self, k: usize) -> FinSet {
        FinSet {
            elems: self.elems[k.min(self.elems.len())..].to_vec(),
        }
    }

    /// Elements strictly greater than `x`.
    pub fn above(&self, x: u64) -> FinSet {
        let i = self.elems.partition_point(|&e| e <= x);
        FinSet {
            elems: self.elems[i..].to_vec(),
        }
    }

    pub fn with(&self, x: u64) -> FinSet {
        match self.elems.binary_search(&x) {
            Ok(_) => self.clone(),
            Err(i) => {
                let mut elems = self.elems.clone();
                elems.insert(i, x);
                FinSet { elems }
            }
        }
    }

    pub fn without(&self, x: u64) -> FinSet {
        FinSet {
            elems: self.elems.iter().copied().filter(|&e| e != x).collect(),
        }
    }

    pub fn union(&self, other: &FinSet) -> FinSet {
        let mut elems: Vec<u64> = self.elems.iter().chain(&other.elems).copied().collect();
        elems.sort_unstable();
        elems.dedup();
        FinSet { elems }
    }

    /// Appends `x`, which must exceed the current maximum.
    pub fn push(&mut self, x: u64) {
        assert!(
            self.max().map_or(x >= 1, |m| x > m),
            "push must keep the set increasing"
        );
        self.elems.push(x);
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }

    pub fn is_initial_segment_of(&self, other: &FinSet) -> bool {
        other.elems.starts_with(&self.elems)
    }

    /// `self < other` in the block order: every element of `self` is below every element of `other`.
    pub fn precedes(&self, other: &FinSet) -> bool {
        match (self.max(), other.min()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        }
    }

    /// All subsets, in mask order. Intended for small sets.
    pub fn subsets(&self) -> impl Iterator<Item = FinSet> + '_ {
        assert!(self.len() < 32, "subset enumeration limited to 31 elements");
        (0u64..1 << self.len()).map(move |m| FinSet::from_mask(&self.elems, m))
    }

    /// 1-based positions of the elements of `self` inside `ground`, if all are present.
    pub fn positions_in(&self, ground: &[u64]) -> Option<FinSet> {
        let mut out = Vec::with_capacity(self.len());
        let mut i = 0;
        for &x in &self.elems {
            while i < ground.len() && ground[i] < x {
                i += 1;
            }
            if ground.get(i) != Some(&x) {
                return None;
            }
            out.push(i as u64 + 1);
        }
        Some(FinSet { elems: out })
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for FinSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::syntax(0, format!("expected a braced set, got `{t}`")))?;
        if inner.trim().is_empty() {
            return Ok(FinSet::empty());
        }
        let mut elems = Vec::new();
        let mut offset = 1;
        for piece in inner.split(',') {
            let n = piece
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::syntax(offset, format!("`{}` is not a natural number", piece.trim())))?;
            elems.push(n);
            offset += piece.len() + 1;
        }
        FinSet::new(elems)
    }
}

impl From<FinSet> for Vec<u64> {
    fn from(s: FinSet) -> Self {
        s.elems
    }
}

impl TryFrom<Vec<u64>> for FinSet {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        FinSet::new(v)
    }
}

impl Serialize for FinSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FinSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u64>::deserialize(deserializer)?;
        FinSet::new(v).map_err(serde::de::Error::custom)
    }
}

/// Shorthand for building a set in tests and examples; panics on invalid input.
#[macro_export]
macro_rules! finset {
    () => { $crate::FinSet::empty() };
    ($($x:expr),+ $(,)?) => { $crate::FinSet::new(vec![$($x),+]).expect("valid finite set") };
}
