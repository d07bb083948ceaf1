//! Families of finite sets and the closure operations on them.
//!
//! A [`Family`] is a decidable predicate plus metadata: whether it claims to
//! be hereditary or a tree, an optional tail oracle used by strong
//! Cantor-Bendixson derivatives, and optional exact procedures for its
//! hereditary and tree closures. Closures of families without such
//! procedures fall back to bounded brute force, and every truncated search is
//! counted and logged.

pub mod card;
pub mod expr;
pub mod gschreier;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde::Serialize;

use crate::finset::FinSet;
use crate::ordinal::Ordinal;
use crate::schreier;
use crate::stream::Stream;

pub use card::CardRule;
pub use expr::{parse_family, Corpus};
pub use gschreier::GeneralizedSchreier;

type Pred = Arc<dyn Fn(&FinSet) -> bool + Send + Sync>;

/// Integers allowed as elements; used to restrict closure searches.
pub type Allowed<'a> = &'a (dyn Fn(u64) -> bool + Sync);

/// Exact closure decision relative to a set of allowed elements.
pub type ClosureHint = Arc<dyn Fn(&FinSet, Allowed) -> Option<bool> + Send + Sync>;

/// Default number of nodes a brute-force closure search may visit.
pub const CLOSURE_BUDGET: usize = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tail {
    EventuallyIn,
    EventuallyOut,
}

pub type TailVerdict = Arc<dyn Fn(&FinSet, &Stream) -> Tail + Send + Sync>;

/// Decides whether `s ∪ {m}` is a member for all but finitely many `m ∈ M`.
#[derive(Clone)]
pub enum TailOracle {
    /// Membership of `s ∪ {m}` is the same for every `m ≥ threshold(s)`, so a
    /// single probe beyond the threshold decides it. This also holds for
    /// every derivative stage of the family.
    Threshold(Arc<dyn Fn(&FinSet) -> u64 + Send + Sync>),
    /// A direct verdict for the family itself; not inherited by derivatives.
    Verdict(TailVerdict),
}

impl TailOracle {
    /// Threshold `max s + 1`: membership of `s ∪ {m}` does not depend on `m > max s`.
    pub fn past_max() -> Self {
        TailOracle::Threshold(Arc::new(|s: &FinSet| s.max().unwrap_or(0) + 1))
    }

    /// The same oracle with thresholds raised to at least `floor`.
    pub fn at_least(self, floor: u64) -> Self {
        match self {
            TailOracle::Threshold(f) => TailOracle::Threshold(Arc::new(move |s: &FinSet| f(s).max(floor))),
            v => v,
        }
    }
}

#[derive(Clone)]
pub struct Family {
    description: String,
    member: Pred,
    hereditary: bool,
    tree: bool,
    tail: Option<TailOracle>,
    substar_hint: Option<ClosureHint>,
    tree_hint: Option<ClosureHint>,
    closure_tail: Option<TailOracle>,
    truncations: Arc<AtomicUsize>,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Family")
            .field("description", &self.description)
            .field("hereditary", &self.hereditary)
            .field("tree", &self.tree)
            .field("tail_oracle", &self.tail.is_some())
            .finish()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

impl Family {
    pub fn new(description: impl Into<String>, member: impl Fn(&FinSet) -> bool + Send + Sync + 'static) -> Self {
        Family {
            description: description.into(),
            member: Arc::new(member),
            hereditary: false,
            tree: false,
            tail: None,
            substar_hint: None,
            tree_hint: None,
            closure_tail: None,
            truncations: Arc::new(AtomicUsize::new(0)),
        }
    }

    pub fn hereditary(mut self) -> Self {
        self.hereditary = true;
        self.tree = true;
        self
    }

    pub fn tree(mut self) -> Self {
        self.tree = true;
        self
    }

    pub fn with_tail(mut self, tail: TailOracle) -> Self {
        self.tail = Some(tail);
        self
    }

    /// Attaches exact closure procedures and the tail oracle that the
    /// closures inherit.
    pub fn with_closures(mut self, substar: ClosureHint, tree: ClosureHint, closure_tail: Option<TailOracle>) -> Self {
        self.substar_hint = Some(substar);
        self.tree_hint = Some(tree);
        self.closure_tail = closure_tail;
        self
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn contains(&self, s: &FinSet) -> bool {
        (self.member)(s)
    }

    pub fn claims_hereditary(&self) -> bool {
        self.hereditary
    }

    pub fn claims_tree(&self) -> bool {
        self.tree
    }

    pub fn tail_oracle(&self) -> Option<&TailOracle> {
        self.tail.as_ref()
    }

    /// Number of closure searches that hit their budget and answered "no".
    pub fn truncations(&self) -> usize {
        self.truncations.load(Ordering::Relaxed)
    }

    /// `A_ξ`.
    pub fn schreier(xi: &Ordinal) -> Self {
        let x = xi.clone();
        let (a, b) = (xi.clone(), xi.clone());
        Family::new(format!("A_{xi}"), move |s| schreier::is_member(&x, s)).with_closures(
            Arc::new(move |t, allowed| Some(schreier::in_substar_with(&a, t, Some(allowed)))),
            Arc::new(move |t, allowed| Some(t.iter().all(allowed) && schreier::in_tree_closure(&b, t))),
            Some(TailOracle::past_max()),
        )
    }

    /// The generalized Schreier family `F_α`.
    pub fn generalized_schreier(alpha: &Ordinal) -> Self {
        let g = GeneralizedSchreier::new();
        let a = alpha.clone();
        Family::new(format!("F_{alpha}"), move |s| g.contains(&a, s))
            .hereditary()
            .with_tail(TailOracle::past_max())
    }

    /// Nonempty sets satisfying a cardinality rule, optionally inside a stream.
    pub fn card(rule: CardRule, within: Option<Stream>, horizon: u64) -> Self {
        let desc = match &within {
            Some(w) => format!("card(\"{}\") within {w}", rule.text()),
            None => format!("card(\"{}\")", rule.text()),
        };
        let spreading = !rule.uses_max() && !rule.uses_sum();
        let within = within.map(Arc::new);
        let inside = {
            let w = within.clone();
            move |x: u64| w.as_ref().is_none_or(|w| w.contains(x))
        };
        let inside = Arc::new(inside);
        let (r0, r1, r2) = (rule.clone(), rule.clone(), rule);
        let (i0, i1, i2) = (inside.clone(), inside.clone(), inside);
        let fam = Family::new(desc, move |s| s.iter().all(|x| i0(x)) && r0.holds(s));
        fam.with_closures(
            Arc::new(move |t, allowed| {
                let both = |x: u64| i1(x) && allowed(x);
                card::superset_exists(&r1, t, &both, horizon)
            }),
            Arc::new(move |t, allowed| {
                let both = |x: u64| i2(x) && allowed(x);
                card::extension_exists(&r2, t, &both, horizon)
            }),
            spreading.then(TailOracle::past_max),
        )
    }

    /// Every finite set.
    pub fn all() -> Self {
        Family::new("all", |_| true)
            .hereditary()
            .with_tail(TailOracle::past_max())
    }

    /// `{∅}`.
    pub fn empty_only() -> Self {
        Family::new("empty", |s| s.is_empty())
            .hereditary()
            .with_tail(TailOracle::past_max())
    }

    /// A finite explicit list of sets.
    pub fn from_list(name: impl Into<String>, sets: Vec<FinSet>) -> Self {
        Family::new(name, move |s| sets.contains(s))
    }

    /// Checks the hereditary and tree claims on all subsets of `{1..n}`.
    pub fn check_claims(&self, n: u64) -> Result<(), String> {
        if !self.hereditary && !self.tree {
            return Ok(());
        }
        let ground = FinSet::range(1, n);
        for s in ground.subsets() {
            if !self.contains(&s) {
                continue;
            }
            for k in 0..s.len() {
                if !self.contains(&s.prefix(k)) {
                    return Err(format!(
                        "{}: {} is a member but its prefix {} is not",
                        self,
                        s,
                        s.prefix(k)
                    ));
                }
            }
            if self.hereditary {
                for x in s.iter() {
                    if !self.contains(&s.without(x)) {
                        return Err(format!("{}: {} is a member but {} is not", self, s, s.without(x)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Compares the tail oracle with direct evaluation at three large
    /// elements of `m` beyond the threshold. Returns `None` when there is
    /// no oracle.
    pub fn check_tail(&self, s: &FinSet, m: &Stream) -> Option<bool> {
        let floor = s.max().unwrap_or(0) + 1;
        match self.tail.as_ref()? {
            TailOracle::Threshold(th) => {
                let start = m.first_at_least(th(s).max(floor)).ok()?;
                let base = m.position(start)? - 1;
                let probes: Vec<bool> = [0, 9, 49]
                    .iter()
                    .filter_map(|&i| m.nth(base + i).ok())
                    .map(|x| self.contains(&s.with(x)))
                    .collect();
                Some(probes.windows(2).all(|w| w[0] == w[1]))
            }
            TailOracle::Verdict(v) => {
                let verdict = v(s, m);
                let start = m.first_at_least(floor + 100).ok()?;
                let base = m.position(start)? - 1;
                Some(
                    [0, 9, 49]
                        .iter()
                        .filter_map(|&i| m.nth(base + i).ok())
                        .all(|x| self.contains(&s.with(x)) == (verdict == Tail::EventuallyIn)),
                )
            }
        }
    }
}

/// `F ∩ [M]^{<ω}`.
pub fn restrict(f: &Family, m: &Stream) -> Family {
    let inner = f.clone();
    let ms = Arc::new(m.clone());
    let mut out = {
        let ms = ms.clone();
        Family::new(format!("{f}|{m}"), move |s| {
            s.iter().all(|x| ms.contains(x)) && inner.contains(s)
        })
    };
    out.hereditary = f.hereditary;
    out.tree = f.tree;
    let floor = m.tail_start();
    out.tail = f.tail.clone().map(|t| t.at_least(floor));
    out.closure_tail = f.closure_tail.clone().map(|t| t.at_least(floor));
    out.truncations = f.truncations.clone();
    if let Some(h) = f.substar_hint.clone() {
        let ms = ms.clone();
        out.substar_hint = Some(Arc::new(move |t, allowed| {
            let both = |x: u64| ms.contains(x) && allowed(x);
            h(t, &both)
        }));
    }
    if let Some(h) = f.tree_hint.clone() {
        out.tree_hint = Some(Arc::new(move |t, allowed| {
            let both = |x: u64| ms.contains(x) && allowed(x);
            h(t, &both)
        }));
    }
    out
}

/// The hereditary closure: `t` is in it iff `t ⊆ s` for some member `s`.
///
/// A family already declared hereditary is returned as is. Otherwise uses
/// the family's exact procedure when present, or searches supersets inside
/// `{1..max t + horizon}` with a node budget.
pub fn hereditary_closure(f: &Family, horizon: u64) -> Family {
    if f.hereditary {
        return f.clone();
    }
    let inner = f.clone();
    let truncations = f.truncations.clone();
    let member = move |t: &FinSet| -> bool {
        let any = |_: u64| true;
        if let Some(v) = inner.substar_hint.as_ref().and_then(|h| h(t, &any)) {
            return v;
        }
        if inner.contains(t) {
            return true;
        }
        let top = t.max().unwrap_or(0) + horizon;
        let free: Vec<u64> = (1..=top).filter(|&x| !t.contains(x)).collect();
        brute_force_extension(&inner, t, &free, &truncations)
    };
    let mut out = Family::new(format!("substar({f})"), member).hereditary();
    out.tail = f.closure_tail.clone();
    out.truncations = f.truncations.clone();
    out
}

/// The tree closure: `∅` together with initial segments of members. A family
/// already declared a tree (or hereditary) is returned as is.
pub fn tree_closure(f: &Family, horizon: u64) -> Family {
    if f.hereditary || f.tree {
        return f.clone();
    }
    let inner = f.clone();
    let truncations = f.truncations.clone();
    let member = move |t: &FinSet| -> bool {
        if t.is_empty() {
            return true;
        }
        let any = |_: u64| true;
        if let Some(v) = inner.tree_hint.as_ref().and_then(|h| h(t, &any)) {
            return v;
        }
        if inner.contains(t) {
            return true;
        }
        let hi = t.max().unwrap();
        let free: Vec<u64> = (hi + 1..=hi + horizon).collect();
        brute_force_extension(&inner, t, &free, &truncations)
    };
    let mut out = Family::new(format!("tree({f})"), member).tree();
    out.truncations = f.truncations.clone();
    out
}

fn brute_force_extension(f: &Family, t: &FinSet, free: &[u64], truncations: &AtomicUsize) -> bool {
    let mut budget = CLOSURE_BUDGET;
    fn go(f: &Family, cur: &FinSet, free: &[u64], budget: &mut usize) -> Option<bool> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        if f.contains(cur) {
            return Some(true);
        }
        let mut exhausted = false;
        for (i, &x) in free.iter().enumerate() {
            match go(f, &cur.with(x), &free[i + 1..], budget) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => exhausted = true,
            }
            if exhausted {
                return None;
            }
        }
        Some(false)
    }
    match go(f, t, free, &mut budget) {
        Some(v) => v,
        None => {
            truncations.fetch_add(1, Ordering::Relaxed);
            log::warn!("closure search for {t} in {f} truncated after {CLOSURE_BUDGET} nodes");
            false
        }
    }
}

/// `(F_h, F_t)`: the largest hereditary subfamily and the sets all of whose
/// nonempty initial segments are members (both together with `∅`).
pub fn tree_parts(f: &Family) -> (Family, Family) {
    let (a, b) = (f.clone(), f.clone());
    let fh = Family::new(format!("h({f})"), move |s| {
        s.subsets().all(|u| u.is_empty() || a.contains(&u))
    })
    .hereditary();
    let ft = Family::new(format!("t({f})"), move |s| {
        (1..=s.len()).all(|k| b.contains(&s.prefix(k)))
    })
    .tree();
    (fh, ft)
}

/// `F(L)`: sets of `L` whose index sets (positions in `L`) lie in `F`.
pub fn spread(f: &Family, l: &Stream) -> Family {
    let inner = f.clone();
    let ls = l.clone();
    Family::new(format!("spread({f},{l})"), move |t| {
        let Some(top) = t.max() else {
            return inner.contains(t);
        };
        let prefix = ls.up_to(top);
        t.positions_in(prefix.as_slice())
            .is_some_and(|idx| inner.contains(&idx))
    })
}

/// `𝓛(n) = {s : n < s, {n} ∪ s ∈ 𝓛}`.
pub fn section(f: &Family, n: u64) -> Family {
    let inner = f.clone();
    Family::new(format!("{f}({n})"), move |s| {
        s.min().is_none_or(|m| m > n) && inner.contains(&s.with(n))
    })
}

/// Result of searching for a chain of initial segments inside a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeResult {
    ChainFound(Vec<FinSet>),
    NoChainUpTo(usize),
}

/// Looks for the chain `{m₁} ≺ {m₁,m₂} ≺ … ≺ {m₁,…,m_d}` of initial
/// segments of `M` inside `F`. For a hereditary family this is the check
/// that the initial cube on the first `d` elements of `M` lies in `F`.
pub fn pointwise_closed_probe(f: &Family, m: &Stream, depth: usize) -> ProbeResult {
    let Ok(cube) = m.take(depth) else {
        return ProbeResult::NoChainUpTo(depth);
    };
    let chain: Vec<FinSet> = (1..=depth).map(|k| cube.prefix(k)).collect();
    if chain.iter().all(|s| f.contains(s)) {
        ProbeResult::ChainFound(chain)
    } else {
        ProbeResult::NoChainUpTo(depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset;

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    #[test]
    fn card_closure_examples() {
        let ex1 = Family::card(CardRule::parse("|s| == 2*min+1").unwrap(), None, 40);
        let star = hereditary_closure(&ex1, 40);
        assert!(star.contains(&finset![2, 5]));
        assert!(!star.contains(&finset![1, 2, 3, 4]));
        assert!(star.contains(&finset![]));
    }

    #[test]
    fn schreier_closure_is_classical() {
        let star = hereditary_closure(&Family::schreier(&w()), 40);
        for s in FinSet::range(1, 9).subsets() {
            assert_eq!(
                star.contains(&s),
                s.len() as u64 <= s.min().unwrap_or(0) || s.is_empty(),
                "{s}"
            );
        }
    }

    #[test]
    fn tree_parts_examples() {
        let f = Family::from_list("f", vec![finset![1], finset![1, 2], finset![2], finset![]]);
        let (fh, ft) = tree_parts(&f);
        for s in [finset![], finset![1], finset![2], finset![1, 2]] {
            assert!(fh.contains(&s));
            assert!(ft.contains(&s));
        }
        let g = Family::from_list("g", vec![finset![1, 2]]);
        let (_, gt) = tree_parts(&g);
        assert!(!gt.contains(&finset![1, 2]));
    }

    #[test]
    fn spread_examples() {
        let f = Family::from_list("f", vec![finset![1, 2]]);
        let s = spread(&f, &Stream::evens());
        assert!(s.contains(&finset![2, 4]));
        assert!(!s.contains(&finset![2, 6]));
        assert!(!s.contains(&finset![1, 2]));
        let a = spread(&Family::schreier(&w()), &Stream::arithmetic(3, 1));
        assert!(!a.contains(&finset![4, 6, 8]));
        assert!(a.contains(&finset![5, 6, 7]));
    }

    #[test]
    fn probe_examples() {
        let star = hereditary_closure(&Family::schreier(&w()), 40);
        assert_eq!(
            pointwise_closed_probe(&star, &Stream::all(), 6),
            ProbeResult::NoChainUpTo(6)
        );
        match pointwise_closed_probe(&Family::all(), &Stream::all(), 6) {
            ProbeResult::ChainFound(c) => assert_eq!(c.last().unwrap(), &FinSet::range(1, 6)),
            other => panic!("{other:?}"),
        }
        let evens = Family::new("evens", |s| s.iter().all(|x| x % 2 == 0)).hereditary();
        assert_eq!(
            pointwise_closed_probe(&evens, &Stream::odds(), 4),
            ProbeResult::NoChainUpTo(4)
        );
    }

    #[test]
    fn claims_hold_for_builtins() {
        for a in ["0", "1", "2", "w"] {
            let f = Family::generalized_schreier(&a.parse().unwrap());
            assert_eq!(f.check_claims(10), Ok(()));
        }
        assert!(Family::from_list("bad", vec![finset![1, 2]])
            .tree()
            .check_claims(4)
            .is_err());
    }

    #[test]
    fn tail_checks() {
        let star = hereditary_closure(&Family::schreier(&w()), 40);
        assert_eq!(star.check_tail(&finset![3, 5], &Stream::all()), Some(true));
        assert_eq!(
            Family::from_list("x", vec![]).check_tail(&finset![], &Stream::all()),
            None
        );
    }
}
