//! Generalized Schreier families `F_α`.
//!
//! `F_0` is singletons and `∅`. `F_{α+1}` holds unions of at most `min F`
//! consecutive `F_α` blocks. For limit `α`, `F ∈ F_α` when `F ∈ F_{fund(α,k)}`
//! for some `k ≤ min F`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::finset::FinSet;
use crate::ordinal::{Ordinal, OrdinalKind};

type Memo = Arc<Mutex<HashMap<(Ordinal, Vec<u64>), bool>>>;

#[derive(Clone, Default)]
pub struct GeneralizedSchreier {
    memo: Memo,
}

impl GeneralizedSchreier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, alpha: &Ordinal, s: &FinSet) -> bool {
        self.member(alpha, s.as_slice())
    }

    fn member(&self, alpha: &Ordinal, s: &[u64]) -> bool {
        if s.len() <= 1 {
            return true;
        }
        let key = (alpha.clone(), s.to_vec());
        if let Some(&v) = self.memo.lock().unwrap().get(&key) {
            return v;
        }
        let v = match alpha.kind() {
            OrdinalKind::Zero => false,
            OrdinalKind::Successor(pred) => self.min_blocks(&pred, s).is_some_and(|k| k as u64 <= s[0]),
            OrdinalKind::Limit => (1..=s[0]).any(|k| {
                let approx = alpha.fund(k).expect("limit ordinal");
                self.member(&approx, s)
            }),
        };
        self.memo.lock().unwrap().insert(key, v);
        v
    }

    /// Fewest consecutive nonempty `F_α` blocks covering `s`.
    fn min_blocks(&self, alpha: &Ordinal, s: &[u64]) -> Option<usize> {
        let mut best = vec![None; s.len() + 1];
        best[0] = Some(0usize);
        for end in 1..=s.len() {
            best[end] = (0..end)
                .filter_map(|start| {
                    let prev = best[start]?;
                    self.member(alpha, &s[start..end]).then_some(prev + 1)
                })
                .min();
        }
        best[s.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset;

    #[test]
    fn first_level_is_classical() {
        let g = GeneralizedSchreier::new();
        let one = Ordinal::one();
        assert!(g.contains(&one, &finset![3, 7, 9]));
        assert!(!g.contains(&one, &finset![2, 5, 8]));
        assert!(g.contains(&one, &finset![]));
        assert!(!g.contains(&Ordinal::zero(), &finset![1, 2]));
        assert!(g.contains(&Ordinal::zero(), &finset![5]));
    }

    #[test]
    fn second_level() {
        let g = GeneralizedSchreier::new();
        let two = Ordinal::finite(2);
        // {2,3} ∪ {4,5,6,7}: two F_1 blocks, 2 ≤ min.
        assert!(g.contains(&two, &finset![2, 3, 4, 5, 6, 7]));
        assert!(!g.contains(&two, &finset![2, 3, 4, 5, 6, 7, 8]));
        let w = Ordinal::omega();
        // F_ω at min 2 may use F_2.
        assert!(g.contains(&w, &finset![2, 3, 4, 5, 6, 7]));
        assert!(!g.contains(&w, &finset![1, 2]));
    }
}
