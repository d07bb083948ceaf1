//! The complete thin Schreier system `(A_ξ)`.
//!
//! Membership is decided by peeling: reading `s` from its minimum upward,
//! the accumulator starts at `ξ` and each element `n` replaces it by
//! [`step`]`(acc, n)`. `s ∈ A_ξ` exactly when the accumulator reaches `0` on
//! the last element. An independent implementation following the recursive
//! block definition lives in [`structural`] and serves as a cross-check.

pub mod structural;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finset::FinSet;
use crate::ordinal::{Ordinal, OrdinalKind};
use crate::stream::Stream;

pub use structural::{classify_structural, StructuralOracle};

/// The ordinal `ξ_n` with `A_ξ(n) = A_{ξ_n} ∩ [(n,∞)]^{<ω}`.
///
/// * `ζ+1 ↦ ζ`
/// * `ω^{β+1} ↦ ω^β·(n−1) + step(ω^β, n)`
/// * `ω^λ ↦ step(ω^{sfund(λ,n)}, n)` for limit `λ`
/// * `γ + ω^α·p ↦ γ + ω^α·(p−1) + step(ω^α, n)` otherwise
pub fn step(xi: &Ordinal, n: u64) -> Result<Ordinal> {
    if n == 0 {
        return Err(Error::Invalid("set elements start at 1".into()));
    }
    match xi.kind() {
        OrdinalKind::Zero => Err(Error::ZeroOrdinal("step")),
        OrdinalKind::Successor(pred) => Ok(pred),
        OrdinalKind::Limit => {
            let (head, alpha, p) = xi.last_term_split()?;
            if !head.is_zero() || p > 1 {
                let base = head.add(&Ordinal::omega_pow_times(alpha.clone(), p - 1));
                return Ok(base.add(&step(&Ordinal::omega_pow(alpha), n)?));
            }
            match alpha.kind() {
                OrdinalKind::Successor(beta) => {
                    let lead = Ordinal::omega_pow_times(beta.clone(), n - 1);
                    Ok(lead.add(&step(&Ordinal::omega_pow(beta), n)?))
                }
                OrdinalKind::Limit => step(&Ordinal::omega_pow(alpha.sfund(n)?), n),
                OrdinalKind::Zero => unreachable!("ω^0 = 1 is a successor"),
            }
        }
    }
}

/// Per-invocation memo table for [`step`]; results are identical to the
/// direct computation.
#[derive(Default)]
pub struct StepMemo {
    table: HashMap<(Ordinal, u64), Ordinal>,
}

impl StepMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn step(&mut self, xi: &Ordinal, n: u64) -> Result<Ordinal> {
        if let Some(v) = self.table.get(&(xi.clone(), n)) {
            return Ok(v.clone());
        }
        let v = step(xi, n)?;
        self.table.insert((xi.clone(), n), v.clone());
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Outcome of the trichotomy on a finite set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "member_prefix_length")]
pub enum Classification {
    /// `s ∈ A_ξ`.
    Member,
    /// `s` is a proper initial segment of a member (for `ξ ≥ 1` this includes `∅`).
    ProperInitial,
    /// The first `k` elements of `s` form a member and `k < |s|`. When
    /// `ξ = 0` the member is `∅` and `k = 0`.
    ExtendsMember(usize),
}

impl Classification {
    pub fn tag(&self) -> &'static str {
        match self {
            Classification::Member => "Member",
            Classification::ProperInitial => "ProperInitial",
            Classification::ExtendsMember(_) => "ExtendsMember",
        }
    }

    pub fn in_tree_closure(&self) -> bool {
        !matches!(self, Classification::ExtendsMember(_))
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::ExtendsMember(k) => write!(f, "ExtendsMember({k})"),
            other => f.write_str(other.tag()),
        }
    }
}

/// The classification together with the accumulator after each consumed element
/// (starting with `ξ`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeelTrace {
    pub classification: Classification,
    pub accumulators: Vec<Ordinal>,
}

pub fn peel_trace(xi: &Ordinal, s: &FinSet) -> PeelTrace {
    let mut acc = xi.clone();
    let mut accumulators = vec![acc.clone()];
    for (i, e) in s.iter().enumerate() {
        if acc.is_zero() {
            return PeelTrace {
                classification: Classification::ExtendsMember(i),
                accumulators,
            };
        }
        acc = step(&acc, e).expect("nonzero accumulator and positive element");
        accumulators.push(acc.clone());
    }
    let classification = if acc.is_zero() {
        Classification::Member
    } else {
        Classification::ProperInitial
    };
    PeelTrace {
        classification,
        accumulators,
    }
}

pub fn classify_peel(xi: &Ordinal, s: &FinSet) -> Classification {
    peel_trace(xi, s).classification
}

pub fn is_member(xi: &Ordinal, s: &FinSet) -> bool {
    classify_peel(xi, s) == Classification::Member
}

/// Decomposition of a finite set into consecutive `A_ξ` blocks plus a
/// trailing proper initial segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalRep {
    pub blocks: Vec<FinSet>,
    pub trailing: FinSet,
    pub type_count: usize,
}

impl fmt::Display for CanonicalRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "] trailing {} type {}", self.trailing, self.type_count)
    }
}

pub fn canonical_rep(xi: &Ordinal, s: &FinSet) -> Result<CanonicalRep> {
    if xi.is_zero() {
        return Err(Error::ZeroOrdinal("canonical_rep"));
    }
    let mut blocks = Vec::new();
    let mut current = Vec::new();
    let mut acc = xi.clone();
    for e in s.iter() {
        current.push(e);
        acc = step(&acc, e)?;
        if acc.is_zero() {
            blocks.push(FinSet::from_sorted_unchecked(std::mem::take(&mut current)));
            acc = xi.clone();
        }
    }
    Ok(CanonicalRep {
        type_count: blocks.len(),
        blocks,
        trailing: FinSet::from_sorted_unchecked(current),
    })
}

/// Lazily yields the canonical blocks of an infinite stream.
pub struct CanonicalBlocks<'a> {
    xi: Ordinal,
    source: Box<dyn Iterator<Item = u64> + 'a>,
}

impl Iterator for CanonicalBlocks<'_> {
    type Item = FinSet;

    fn next(&mut self) -> Option<FinSet> {
        let mut acc = self.xi.clone();
        let mut block = Vec::new();
        while !acc.is_zero() {
            let e = self.source.next()?;
            acc = step(&acc, e).expect("nonzero accumulator");
            block.push(e);
        }
        Some(FinSet::from_sorted_unchecked(block))
    }
}

/// The blocks `s₁ < s₂ < …` of `A_ξ` whose union is the stream. A filtered
/// stream that ends at its horizon ends the iteration before an incomplete block.
pub fn canonical_rep_stream<'a>(xi: &Ordinal, stream: &'a Stream) -> Result<CanonicalBlocks<'a>> {
    if xi.is_zero() {
        return Err(Error::ZeroOrdinal("canonical_rep_stream"));
    }
    Ok(CanonicalBlocks {
        xi: xi.clone(),
        source: stream.iter(),
    })
}

/// The unique initial segment of the stream lying in `A_ξ`; `∅` for `ξ = 0`.
pub fn initial_segment(xi: &Ordinal, stream: &Stream) -> Result<FinSet> {
    if xi.is_zero() {
        return Ok(FinSet::empty());
    }
    canonical_rep_stream(xi, stream)?
        .next()
        .ok_or_else(|| Error::StreamExhausted(format!("a complete A_{xi} block of {stream}")))
}

/// All members of `A_ξ` contained in `ground`, in lexicographic order.
pub fn enumerate(xi: &Ordinal, ground: &FinSet, budget: usize) -> Result<Vec<FinSet>> {
    let mut out = Vec::new();
    let mut memo = StepMemo::new();
    let mut prefix = Vec::new();
    enumerate_rec(xi, ground.as_slice(), &mut prefix, &mut out, budget, &mut memo)?;
    Ok(out)
}

fn enumerate_rec(
    xi: &Ordinal,
    rest: &[u64],
    prefix: &mut Vec<u64>,
    out: &mut Vec<FinSet>,
    budget: usize,
    memo: &mut StepMemo,
) -> Result<()> {
    if xi.is_zero() {
        if out.len() >= budget {
            return Err(Error::BudgetExceeded {
                budget,
                count: out.len(),
            });
        }
        out.push(FinSet::from_sorted_unchecked(prefix.clone()));
        return Ok(());
    }
    for (i, &n) in rest.iter().enumerate() {
        let next = memo.step(xi, n)?;
        prefix.push(n);
        let r = enumerate_rec(&next, &rest[i + 1..], prefix, out, budget, memo);
        prefix.pop();
        r?;
    }
    Ok(())
}

/// Whether some member of `A_ξ` lies inside `ground`.
pub fn has_member_within(xi: &Ordinal, ground: &[u64]) -> bool {
    let mut failed = HashSet::new();
    let mut memo = StepMemo::new();
    exists_rec(xi, ground, 0, &mut failed, &mut memo)
}

fn exists_rec(
    xi: &Ordinal,
    ground: &[u64],
    from: usize,
    failed: &mut HashSet<(Ordinal, usize)>,
    memo: &mut StepMemo,
) -> bool {
    if xi.is_zero() {
        return true;
    }
    if failed.contains(&(xi.clone(), from)) {
        return false;
    }
    for i in from..ground.len() {
        let next = memo.step(xi, ground[i]).expect("nonzero accumulator");
        if exists_rec(&next, ground, i + 1, failed, memo) {
            return true;
        }
    }
    failed.insert((xi.clone(), from));
    false
}

/// Membership in the tree closure `(A_ξ)*` and the hereditary closure `(A_ξ)⋆`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarMembership {
    InStar,
    InSubstar,
    InBoth,
    Neither,
}

impl StarMembership {
    fn from_flags(star: bool, substar: bool) -> Self {
        match (star, substar) {
            (true, true) => StarMembership::InBoth,
            (true, false) => StarMembership::InStar,
            (false, true) => StarMembership::InSubstar,
            (false, false) => StarMembership::Neither,
        }
    }

    pub fn in_star(self) -> bool {
        matches!(self, StarMembership::InStar | StarMembership::InBoth)
    }

    pub fn in_substar(self) -> bool {
        matches!(self, StarMembership::InSubstar | StarMembership::InBoth)
    }
}

pub fn in_tree_closure(xi: &Ordinal, s: &FinSet) -> bool {
    classify_peel(xi, s).in_tree_closure()
}

pub fn star_membership(xi: &Ordinal, s: &FinSet) -> Result<StarMembership> {
    if xi.is_zero() {
        return Err(Error::ZeroOrdinal("star_membership"));
    }
    let star = in_tree_closure(xi, s);
    let substar = star || in_substar(xi, s, None);
    Ok(StarMembership::from_flags(star, substar))
}

/// Decides `s ∈ (A_ξ ∩ [G]^{<ω})⋆` where `G` is `ground` (all of ℕ when `None`).
pub fn in_substar(xi: &Ordinal, s: &FinSet, ground: Option<&Stream>) -> bool {
    match ground {
        None => in_substar_with(xi, s, None),
        Some(g) => in_substar_with(xi, s, Some(&|x| g.contains(x))),
    }
}

/// [`in_substar`] with the ground set given as a predicate on integers; the
/// ground is assumed infinite.
///
/// `s` lies in the hereditary closure iff some `u` below `max s` makes
/// `s ∪ u` an initial segment of a member: any member `t ⊇ s` cut at `max s`
/// gives such a `u`, and conversely `s ∪ u` can be completed by ground
/// elements above `max s` because peeling always terminates. The search over
/// `u` is exact and memoized on (position, accumulator).
pub fn in_substar_with(xi: &Ordinal, s: &FinSet, allowed: Option<&(dyn Fn(u64) -> bool + Sync)>) -> bool {
    let Some(top) = s.max() else {
        return true;
    };
    if xi.is_zero() {
        return false;
    }
    if let Some(a) = allowed {
        if !s.iter().all(a) {
            return false;
        }
    }
    if in_tree_closure(xi, s) {
        return true;
    }
    let candidates: Vec<u64> = match allowed {
        None => (1..=top).collect(),
        Some(a) => (1..=top).filter(|&x| a(x)).collect(),
    };
    let mut failed = HashSet::new();
    let mut memo = StepMemo::new();
    substar_rec(xi.clone(), &candidates, 0, s, &mut failed, &mut memo)
}

fn substar_rec(
    acc: Ordinal,
    candidates: &[u64],
    i: usize,
    s: &FinSet,
    failed: &mut HashSet<(usize, Ordinal)>,
    memo: &mut StepMemo,
) -> bool {
    if i == candidates.len() {
        return true;
    }
    if failed.contains(&(i, acc.clone())) {
        return false;
    }
    let c = candidates[i];
    let ok = if s.contains(c) {
        !acc.is_zero() && substar_rec(memo.step(&acc, c).unwrap(), candidates, i + 1, s, failed, memo)
    } else {
        (!acc.is_zero() && substar_rec(memo.step(&acc, c).unwrap(), candidates, i + 1, s, failed, memo))
            || substar_rec(acc.clone(), candidates, i + 1, s, failed, memo)
    };
    if !ok {
        failed.insert((i, acc));
    }
    ok
}

/// Extends a set in the tree closure to a member by appending consecutive
/// integers, giving up after `horizon` additions. Returns the member, or the
/// accumulator still outstanding when the horizon is hit.
pub fn complete_consecutively(xi: &Ordinal, s: &FinSet, horizon: usize) -> std::result::Result<FinSet, Ordinal> {
    let mut acc = xi.clone();
    for e in s.iter() {
        assert!(!acc.is_zero(), "input must lie in the tree closure");
        acc = step(&acc, e).unwrap();
    }
    let mut t = s.clone();
    let first = s.max().unwrap_or(0) + 1;
    for next in first..first + horizon as u64 {
        if acc.is_zero() {
            return Ok(t);
        }
        acc = step(&acc, next).unwrap();
        t.push(next);
    }
    if acc.is_zero() {
        Ok(t)
    } else {
        Err(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(step(&o("5"), 3).unwrap(), o("4"));
        assert_eq!(step(&o("w"), 4).unwrap(), o("3"));
        assert_eq!(step(&o("w^2"), 3).unwrap(), o("w*2+2"));
        assert_eq!(step(&o("w^2+w"), 3).unwrap(), o("w^2+2"));
        assert_eq!(step(&o("w^w"), 2).unwrap(), o("w^2+w+1"));
        assert!(step(&Ordinal::zero(), 1).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_peel(&o("w"), &finset![3, 5, 9]), Classification::Member);
        assert_eq!(classify_peel(&o("w"), &finset![3, 5]), Classification::ProperInitial);
        assert_eq!(
            classify_peel(&o("w"), &finset![2, 5, 7]),
            Classification::ExtendsMember(2)
        );
        assert_eq!(classify_peel(&o("3"), &finset![1, 2, 3]), Classification::Member);
        assert_eq!(classify_peel(&Ordinal::zero(), &finset![]), Classification::Member);
        assert_eq!(classify_peel(&o("w"), &finset![]), Classification::ProperInitial);
        assert_eq!(
            classify_peel(&Ordinal::zero(), &finset![4]),
            Classification::ExtendsMember(0)
        );
    }

    #[test]
    fn canonical_examples() {
        let r = canonical_rep(&o("w"), &finset![1, 2, 3, 4, 5]).unwrap();
        assert_eq!(r.to_string(), "[{1},{2,3}] trailing {4,5} type 2");
        let r = canonical_rep(&o("w"), &finset![3, 5, 9]).unwrap();
        assert_eq!(
            (r.blocks, r.trailing, r.type_count),
            (vec![finset![3, 5, 9]], finset![], 1)
        );
        let r = canonical_rep(&o("2"), &finset![7, 8, 9]).unwrap();
        assert_eq!(
            (r.blocks, r.trailing, r.type_count),
            (vec![finset![7, 8]], finset![9], 1)
        );
        assert_eq!(canonical_rep(&o("w"), &finset![]).unwrap().type_count, 0);
    }

    #[test]
    fn stream_blocks() {
        let evens = Stream::evens();
        let b: Vec<_> = canonical_rep_stream(&o("w"), &evens).unwrap().take(2).collect();
        assert_eq!(b, vec![finset![2, 4], finset![6, 8, 10, 12, 14, 16]]);
        let all = Stream::all();
        let b: Vec<_> = canonical_rep_stream(&o("w"), &all).unwrap().take(3).collect();
        assert_eq!(b, vec![finset![1], finset![2, 3], finset![4, 5, 6, 7]]);
        let b: Vec<_> = canonical_rep_stream(&o("1"), &all).unwrap().take(3).collect();
        assert_eq!(b, vec![finset![1], finset![2], finset![3]]);
    }

    #[test]
    fn initial_segments() {
        assert_eq!(initial_segment(&Ordinal::zero(), &Stream::evens()).unwrap(), finset![]);
        assert_eq!(initial_segment(&o("w"), &Stream::evens()).unwrap(), finset![2, 4]);
        assert_eq!(
            initial_segment(&o("3"), &Stream::arithmetic(5, 2)).unwrap(),
            finset![5, 7, 9]
        );
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate(&o("3"), &FinSet::range(1, 8), 1000).unwrap().len(), 56);
        let w = enumerate(&o("w"), &FinSet::range(1, 6), 1000).unwrap();
        assert_eq!(w.len(), 8);
        assert_eq!(
            enumerate(&o("1"), &finset![2, 4], 10).unwrap(),
            vec![finset![2], finset![4]]
        );
        assert_eq!(
            enumerate(&Ordinal::zero(), &finset![2, 4], 10).unwrap(),
            vec![finset![]]
        );
        assert!(matches!(
            enumerate(&o("2"), &FinSet::range(1, 10), 5),
            Err(Error::BudgetExceeded { budget: 5, count: 5 })
        ));
    }

    #[test]
    fn star_examples() {
        assert_eq!(
            star_membership(&o("w"), &finset![3, 5]).unwrap(),
            StarMembership::InBoth
        );
        assert_eq!(
            star_membership(&o("w"), &finset![2, 5, 7]).unwrap(),
            StarMembership::Neither
        );
        assert_eq!(star_membership(&o("w"), &finset![]).unwrap(), StarMembership::InBoth);
    }

    #[test]
    fn substar_with_ground() {
        // {4} needs three more evens after it inside evens; fine. {3} is not even.
        let evens = Stream::evens();
        assert!(in_substar(&o("w"), &finset![4, 10], Some(&evens)));
        assert!(!in_substar(&o("w"), &finset![3], Some(&evens)));
        // Above 5 only: {7} ∈ A_ω ∩ [(5,∞)] needs 7 elements, fine; {2} is excluded.
        let above5 = Stream::arithmetic(6, 1);
        assert!(in_substar(&o("w"), &finset![7, 9], Some(&above5)));
        assert!(!in_substar(&o("w"), &finset![2], Some(&above5)));
    }

    #[test]
    fn existence() {
        assert!(has_member_within(&o("w"), &[3, 4, 5]));
        assert!(!has_member_within(&o("w"), &[4, 5, 6]));
        assert!(has_member_within(&Ordinal::zero(), &[]));
    }

    #[test]
    fn consecutive_completion() {
        assert_eq!(complete_consecutively(&o("w"), &finset![3], 5), Ok(finset![3, 4, 5]));
        assert!(complete_consecutively(&o("w^2"), &finset![12], 30).is_err());
    }
}
