//! Membership in `A_ξ` straight from the recursive block definition.
//!
//! This never calls [`super::step`]; it splits sets into consecutive blocks
//! and recurses on the block families, memoizing `(ξ, s) ↦ bool`. It is slow
//! by design and exists to cross-check the peeling algorithm.

use std::collections::HashMap;

use super::Classification;
use crate::finset::FinSet;
use crate::ordinal::{Ordinal, OrdinalKind};

#[derive(Default)]
pub struct StructuralOracle {
    memo: HashMap<(Ordinal, Vec<u64>), bool>,
}

impl StructuralOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_member(&mut self, xi: &Ordinal, s: &[u64]) -> bool {
        if let Some(&v) = self.memo.get(&(xi.clone(), s.to_vec())) {
            return v;
        }
        let v = self.compute(xi, s);
        self.memo.insert((xi.clone(), s.to_vec()), v);
        v
    }

    fn compute(&mut self, xi: &Ordinal, s: &[u64]) -> bool {
        let kind = xi.kind();
        if kind == OrdinalKind::Zero {
            return s.is_empty();
        }
        let Some(&n) = s.first() else {
            return false;
        };
        if let OrdinalKind::Successor(zeta) = kind {
            return self.is_member(&zeta, &s[1..]);
        }
        let terms = xi.terms();
        if terms.len() == 1 && terms[0].coefficient == 1 {
            let alpha = &terms[0].exponent;
            return match alpha.kind() {
                OrdinalKind::Successor(beta) => {
                    let blocks = vec![Ordinal::omega_pow(beta); n as usize];
                    self.splits(&blocks, s)
                }
                OrdinalKind::Limit => {
                    let target = Ordinal::omega_pow(alpha.sfund(n).expect("limit exponent"));
                    self.is_member(&target, s)
                }
                OrdinalKind::Zero => unreachable!(),
            };
        }
        // Smallest-exponent blocks occupy the smallest elements.
        let blocks: Vec<Ordinal> = terms
            .iter()
            .rev()
            .flat_map(|t| std::iter::repeat_n(Ordinal::omega_pow(t.exponent.clone()), t.coefficient as usize))
            .collect();
        self.splits(&blocks, s)
    }

    /// Whether `s` is `b₁ ∪ … ∪ b_k`, consecutive and nonempty, with `b_i ∈ A_{families[i]}`.
    fn splits(&mut self, families: &[Ordinal], s: &[u64]) -> bool {
        match families.split_first() {
            None => s.is_empty(),
            Some((first, rest)) => {
                if s.len() < families.len() {
                    return false;
                }
                (1..=s.len() - rest.len()).any(|k| self.is_member(first, &s[..k]) && self.splits(rest, &s[k..]))
            }
        }
    }

    pub fn classify(&mut self, xi: &Ordinal, s: &FinSet) -> Classification {
        let e = s.as_slice();
        if self.is_member(xi, e) {
            return Classification::Member;
        }
        match (0..e.len()).find(|&k| self.is_member(xi, &e[..k])) {
            Some(k) => Classification::ExtendsMember(k),
            None => Classification::ProperInitial,
        }
    }
}

/// One-shot structural classification with a fresh memo table.
pub fn classify_structural(xi: &Ordinal, s: &FinSet) -> Classification {
    StructuralOracle::new().classify(xi, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn structural_examples() {
        assert_eq!(
            classify_structural(&o("w*2"), &finset![2, 3, 4, 5, 6, 7]),
            Classification::Member
        );
        assert_eq!(
            classify_structural(&o("w+1"), &finset![1, 3, 4, 5]),
            Classification::Member
        );
        assert_eq!(classify_structural(&o("w^2"), &finset![1]), Classification::Member);
        assert_eq!(
            classify_structural(&o("w"), &finset![2, 5, 7]),
            Classification::ExtendsMember(2)
        );
        assert_eq!(
            classify_structural(&o("w"), &finset![3, 5]),
            Classification::ProperInitial
        );
    }
}
