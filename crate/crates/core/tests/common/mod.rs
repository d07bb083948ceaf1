#![allow(dead_code)]

use schreier::{FinSet, Ordinal};

pub const LADDER_TEXT: [&str; 13] = [
    "1", "2", "3", "4", "w", "w+1", "w+3", "w*2", "w*2+1", "w^2", "w^2+w", "w^2*2", "w^w",
];

pub fn ladder() -> Vec<Ordinal> {
    LADDER_TEXT.iter().map(|t| t.parse().unwrap()).collect()
}

pub fn o(text: &str) -> Ordinal {
    text.parse().unwrap()
}

/// Every subset of `{1..n}`.
pub fn all_subsets(n: u64) -> impl Iterator<Item = FinSet> {
    let ground: Vec<u64> = (1..=n).collect();
    (0u64..1 << n).map(move |m| FinSet::from_mask(&ground, m))
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
