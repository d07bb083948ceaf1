//! Strong Cantor-Bendixson derivatives and index.
//!
//! For a family `F` and stream `M`, stage `0` is `F ∩ [M]^{<ω}`, stage
//! `β+1` keeps the sets `s` for which `s ∪ {m}` stays in stage `β` for all
//! but finitely many `m ∈ M`, and limit stages intersect. "All but finitely
//! many" is decided by a single probe `m` chosen past the family's tail
//! threshold. Limit stages are semi-decided through the fixed fundamental
//! sequence: a refutation at an approximant is final, while survival of
//! every approximant up to the window is reported as `Unresolved`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{hereditary_closure, restrict, Family, Tail, TailOracle};
use crate::finset::FinSet;
use crate::ordinal::{Ordinal, OrdinalKind};
use crate::schreier;
use crate::stream::Stream;

/// Three-valued stage membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    In,
    Out,
    Unresolved,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::In
        } else {
            Verdict::Out
        }
    }
}

impl Verdict {
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Out, _) | (_, Verdict::Out) => Verdict::Out,
            (Verdict::In, Verdict::In) => Verdict::In,
            _ => Verdict::Unresolved,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CbConfig {
    /// Probes are never smaller than this.
    pub tail_floor: u64,
    /// Probes for stage `β` are at least this multiple of `weight(β) + 1`.
    pub probe_factor: u64,
    /// Limit stages are examined at the approximant with this index.
    pub limit_window: u64,
    /// Window `{1..N}` for emptiness searches of non-hereditary stages and witnesses.
    pub window: u64,
    /// Node budget for emptiness searches of non-hereditary stages.
    pub budget: usize,
}

impl Default for CbConfig {
    fn default() -> Self {
        CbConfig {
            tail_floor: 40,
            probe_factor: 4,
            limit_window: 128,
            window: 40,
            budget: 100_000,
        }
    }
}

/// Sum of all coefficients at every nesting level; the probe for a stage is
/// kept above it so that stage-dependent stabilization is respected.
fn weight(x: &Ordinal) -> u64 {
    x.terms()
        .iter()
        .map(|t| t.coefficient + if t.exponent.is_zero() { 0 } else { weight(&t.exponent) })
        .sum()
}

type Cache = Arc<Mutex<HashMap<(FinSet, Ordinal), Verdict>>>;

/// A derivative stage `(F)^β_M`, evaluated lazily per set.
#[derive(Clone)]
pub struct DerivativeStage {
    base: Family,
    m: Stream,
    stage: Ordinal,
    cfg: CbConfig,
    cache: Cache,
}

impl fmt::Debug for DerivativeStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^{}_{}", self.base, self.stage, self.m)
    }
}

impl DerivativeStage {
    /// Stage `0`: `F ∩ [M]^{<ω}`.
    pub fn new(base: Family, m: Stream, cfg: CbConfig) -> Self {
        DerivativeStage {
            base,
            m,
            stage: Ordinal::zero(),
            cfg,
            cache: Arc::default(),
        }
    }

    /// Stage `ξ` of `F` on `M`.
    pub fn at(base: Family, m: Stream, xi: Ordinal, cfg: CbConfig) -> Result<Self> {
        let mut st = DerivativeStage::new(base, m, cfg);
        st.stage = xi;
        st.check_oracle()?;
        Ok(st)
    }

    fn check_oracle(&self) -> Result<()> {
        if self.stage.is_zero() {
            return Ok(());
        }
        match self.base.tail_oracle() {
            Some(TailOracle::Threshold(_)) => Ok(()),
            Some(TailOracle::Verdict(_)) if self.stage == Ordinal::one() => Ok(()),
            _ => Err(Error::MissingTailOracle(self.base.description().to_string())),
        }
    }

    /// The next stage.
    pub fn derivative(&self) -> Result<Self> {
        let next = DerivativeStage {
            stage: self.stage.successor(),
            ..self.clone()
        };
        next.check_oracle()?;
        Ok(next)
    }

    pub fn stage(&self) -> &Ordinal {
        &self.stage
    }

    pub fn base(&self) -> &Family {
        &self.base
    }

    pub fn stream(&self) -> &Stream {
        &self.m
    }

    pub fn member(&self, s: &FinSet) -> Verdict {
        self.eval(s, &self.stage)
    }

    fn probe(&self, s: &FinSet, stage: &Ordinal) -> Option<u64> {
        let th = match self.base.tail_oracle() {
            Some(TailOracle::Threshold(f)) => f(s),
            _ => 0,
        };
        let floor = th
            .max(s.max().unwrap_or(0) + 1)
            .max(self.cfg.tail_floor)
            .max(self.cfg.probe_factor.saturating_mul(weight(stage) + 1));
        self.m.first_at_least(floor).ok()
    }

    fn eval(&self, s: &FinSet, stage: &Ordinal) -> Verdict {
        if !s.iter().all(|x| self.m.contains(x)) {
            return Verdict::Out;
        }
        let key = (s.clone(), stage.clone());
        if let Some(&v) = self.cache.lock().unwrap().get(&key) {
            return v;
        }
        let v = self.compute(s, stage);
        self.cache.lock().unwrap().insert(key, v);
        v
    }

    fn compute(&self, s: &FinSet, stage: &Ordinal) -> Verdict {
        match stage.kind() {
            OrdinalKind::Zero => Verdict::from(self.base.contains(s)),
            OrdinalKind::Successor(prev) => {
                if let Some(TailOracle::Verdict(v)) = self.base.tail_oracle() {
                    let tail = Verdict::from(v(s, &self.m) == Tail::EventuallyIn);
                    return self.eval(s, &prev).and(tail);
                }
                let Some(p) = self.probe(s, stage) else {
                    return Verdict::Unresolved;
                };
                let extended = self.eval(&s.with(p), &prev);
                if self.base.claims_hereditary() {
                    // Stages of a hereditary family are hereditary, so s ∪ {p}
                    // surviving implies s survives.
                    extended
                } else {
                    self.eval(s, &prev).and(extended)
                }
            }
            OrdinalKind::Limit => {
                // Stages decrease, so the approximant at the window decides
                // every smaller one.
                let approx = stage.fund(self.cfg.limit_window).expect("limit stage");
                match self.eval(s, &approx) {
                    Verdict::Out => Verdict::Out,
                    _ => Verdict::Unresolved,
                }
            }
        }
    }

    /// Members among the subsets of `M ∩ {1..window}`, found by depth-first
    /// search in lexicographic order; stops after `limit` members or when the
    /// node budget runs out. The flag reports whether the search was complete.
    pub fn members_in_window(&self, limit: usize) -> (Vec<FinSet>, bool) {
        let ground = self.m.up_to(self.cfg.window);
        let mut out = Vec::new();
        let mut nodes = 0usize;
        let complete = self.collect(&FinSet::empty(), ground.as_slice(), limit, &mut nodes, &mut out);
        (out, complete)
    }

    fn collect(&self, cur: &FinSet, rest: &[u64], limit: usize, nodes: &mut usize, out: &mut Vec<FinSet>) -> bool {
        if out.len() >= limit || *nodes >= self.cfg.budget {
            return false;
        }
        *nodes += 1;
        let v = self.member(cur);
        if v == Verdict::In {
            out.push(cur.clone());
        }
        if v != Verdict::In && self.base.claims_hereditary() {
            return true;
        }
        let mut complete = true;
        for (i, &x) in rest.iter().enumerate() {
            let mut next = cur.clone();
            next.push(x);
            complete &= self.collect(&next, &rest[i + 1..], limit, nodes, out);
            if !complete {
                return false;
            }
        }
        complete
    }

    /// Whether the stage is empty. For hereditary families this is decided by
    /// `∅` alone; otherwise by a budgeted search of the window.
    pub fn emptiness(&self) -> Emptiness {
        if self.base.claims_hereditary() {
            return match self.member(&FinSet::empty()) {
                Verdict::In => Emptiness::Nonempty(self.greedy_witness()),
                Verdict::Out => Emptiness::Empty,
                Verdict::Unresolved => Emptiness::Unresolved,
            };
        }
        let (found, complete) = self.members_in_window(1);
        match (found.into_iter().next(), complete) {
            (Some(w), _) => Emptiness::Nonempty(w),
            (None, true) => Emptiness::Empty,
            (None, false) => Emptiness::Unresolved,
        }
    }

    fn greedy_witness(&self) -> FinSet {
        let mut w = FinSet::empty();
        for x in self.m.up_to(self.cfg.window).iter() {
            let next = w.with(x);
            if self.member(&next) == Verdict::In {
                w = next;
            }
        }
        w
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Emptiness {
    Empty,
    Nonempty(FinSet),
    Unresolved,
}

/// One evaluated stage, in the JSON report format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub family: String,
    #[serde(rename = "M")]
    pub m: String,
    pub stage: Ordinal,
    pub verdict: String,
    pub window: u64,
    pub witnesses: Vec<FinSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "ordinal")]
pub enum IndexVerdict {
    Exactly(Ordinal),
    AtLeast(Ordinal),
    Unresolved,
}

impl fmt::Display for IndexVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexVerdict::Exactly(x) => write!(f, "Exactly {x}"),
            IndexVerdict::AtLeast(x) => write!(f, "AtLeast {x}"),
            IndexVerdict::Unresolved => write!(f, "Unresolved"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub family: String,
    #[serde(rename = "M")]
    pub m: String,
    pub index: IndexVerdict,
    /// How the predecessor of an `Exactly` stage was shown nonempty:
    /// `finite` (directly) or `approximants` (every fundamental-sequence
    /// approximant up to the limit window).
    pub resolution: String,
    pub window: u64,
    pub stages: Vec<StageReport>,
}

fn report(st: &DerivativeStage, e: &Emptiness) -> StageReport {
    let (verdict, witnesses) = match e {
        Emptiness::Empty => ("empty", vec![]),
        Emptiness::Nonempty(w) => ("nonempty", vec![w.clone()]),
        Emptiness::Unresolved => ("unresolved", vec![]),
    };
    StageReport {
        family: st.base.description().to_string(),
        m: st.m.to_string(),
        stage: st.stage.clone(),
        verdict: verdict.to_string(),
        window: st.cfg.window,
        witnesses,
    }
}

/// The strong Cantor-Bendixson index of `F` on `M`, judged along an ascending ladder.
pub fn index(f: &Family, m: &Stream, ladder: &[Ordinal], cfg: CbConfig) -> Result<IndexReport> {
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("ladder must be strictly ascending".into()));
    }
    let base = DerivativeStage::new(f.clone(), m.clone(), cfg);
    let at = |xi: &Ordinal| -> Result<(DerivativeStage, Emptiness)> {
        let st = DerivativeStage {
            stage: xi.clone(),
            ..base.clone()
        };
        st.check_oracle()?;
        let e = st.emptiness();
        Ok((st, e))
    };
    let mut stages = Vec::new();
    let mut last: Option<(Ordinal, Emptiness)> = None;
    for xi in ladder {
        let (st, e) = at(xi)?;
        stages.push(report(&st, &e));
        if e == Emptiness::Empty {
            let (index, resolution) = locate(xi, &at, &mut stages)?;
            return Ok(IndexReport {
                family: f.description().to_string(),
                m: m.to_string(),
                index,
                resolution,
                window: cfg.window,
                stages,
            });
        }
        last = Some((xi.clone(), e));
    }
    let index = match last {
        Some((xi, Emptiness::Nonempty(_))) => IndexVerdict::AtLeast(xi.successor()),
        Some((xi, Emptiness::Unresolved)) if xi.is_limit() => IndexVerdict::AtLeast(xi),
        _ => IndexVerdict::Unresolved,
    };
    Ok(IndexReport {
        family: f.description().to_string(),
        m: m.to_string(),
        index,
        resolution: "none".into(),
        window: cfg.window,
        stages,
    })
}

/// Given that stage `xi` is empty, finds the least empty stage at or below it.
fn locate(
    xi: &Ordinal,
    at: &dyn Fn(&Ordinal) -> Result<(DerivativeStage, Emptiness)>,
    stages: &mut Vec<StageReport>,
) -> Result<(IndexVerdict, String)> {
    let mut cur = xi.clone();
    loop {
        match cur.kind() {
            OrdinalKind::Zero => return Ok((IndexVerdict::Exactly(cur), "finite".into())),
            OrdinalKind::Successor(prev) => {
                let (st, e) = at(&prev)?;
                if !stages.iter().any(|r| r.stage == prev) {
                    stages.push(report(&st, &e));
                }
                match e {
                    Emptiness::Nonempty(_) => return Ok((IndexVerdict::Exactly(cur), "finite".into())),
                    Emptiness::Empty => cur = prev,
                    Emptiness::Unresolved if prev.is_limit() => {
                        return Ok((IndexVerdict::Exactly(cur), "approximants".into()));
                    }
                    Emptiness::Unresolved => return Ok((IndexVerdict::Unresolved, "none".into())),
                }
            }
            OrdinalKind::Limit => {
                // Some approximant is already empty; find the first one.
                let w = at(&cur)?.0.cfg.limit_window;
                let mut lo = 1;
                let mut hi = w;
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if at(&cur.fund(mid)?)?.1 == Emptiness::Empty {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                cur = cur.fund(lo)?;
                let (st, e) = at(&cur)?;
                stages.push(report(&st, &e));
            }
        }
    }
}

/// Ascending ladder `1, 2, …, k` followed by `extra`.
pub fn finite_ladder(k: u64) -> Vec<Ordinal> {
    (1..=k).map(Ordinal::finite).collect()
}

/// `(A_ξ ∩ [G]^{<ω})⋆` for the ground stream `g`.
pub fn schreier_substar(xi: &Ordinal, g: Option<&Stream>) -> Family {
    let a = Family::schreier(xi);
    match g {
        Some(g) => hereditary_closure(&restrict(&a, g), 0),
        None => hereditary_closure(&a, 0),
    }
}

/// `𝓛(n)⋆` for `𝓛 = A_ξ`: the hereditary closure of `A_{ξ_n} ∩ [(n,∞)]`.
pub fn schreier_section_substar(xi: &Ordinal, n: u64) -> Result<Family> {
    let next = schreier::step(xi, n)?;
    Ok(schreier_substar(&next, Some(&Stream::arithmetic(n + 1, 1))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma28Report {
    pub family: String,
    pub n: u64,
    pub stage: Ordinal,
    pub window: u64,
    /// Sets `F` of the section stage checked for `{n} ∪ F`.
    pub checked_i: usize,
    pub failures_i: Vec<FinSet>,
    /// Nonempty sets of the full stage checked for a peel witness.
    pub checked_ii: usize,
    pub witnessed_ii: usize,
    pub unwitnessed_ii: Vec<FinSet>,
    /// Whether either enumeration stopped at its limit.
    pub truncated: bool,
    pub passed: bool,
}

/// Checks, on `L ∩ {1..window}`, that `F ∈ (𝓛(n)⋆)^ξ_L` implies
/// `{n} ∪ F ∈ (𝓛⋆)^ξ_L` for `𝓛 = A_lam`, and looks for peel witnesses
/// `l ≤ min F` with `F ∖ {l} ∈ (𝓛(l)⋆)^ξ_L` for nonempty `F ∈ (𝓛⋆)^ξ_L`.
pub fn lemma28_check(
    lam: &Ordinal,
    stage: &Ordinal,
    n: u64,
    l: &Stream,
    cfg: CbConfig,
    limit: usize,
) -> Result<Lemma28Report> {
    if !stage.is_finite() {
        return Err(Error::Invalid("lemma checks use finite stages".into()));
    }
    if !l.contains(n) {
        return Err(Error::Invalid(format!("{n} is not an element of {l}")));
    }
    let full = DerivativeStage::at(schreier_substar(lam, None), l.clone(), stage.clone(), cfg)?;
    let section = DerivativeStage::at(schreier_section_substar(lam, n)?, l.clone(), stage.clone(), cfg)?;

    let (sec_members, sec_complete) = section.members_in_window(limit);
    let failures_i: Vec<FinSet> = sec_members
        .iter()
        .filter(|f| full.member(&f.with(n)) != Verdict::In)
        .cloned()
        .collect();

    let (full_members, full_complete) = full.members_in_window(limit);
    let mut witnessed = 0;
    let mut unwitnessed = Vec::new();
    let mut checked_ii = 0;
    let mut sections: HashMap<u64, Option<DerivativeStage>> = HashMap::new();
    for f in full_members.iter().filter(|f| !f.is_empty()) {
        checked_ii += 1;
        // Try l = min F first; it is the natural witness.
        let found = (1..=f.min().unwrap()).rev().any(|l_el| {
            let st = sections.entry(l_el).or_insert_with(|| {
                schreier_section_substar(lam, l_el)
                    .and_then(|fam| DerivativeStage::at(fam, l.clone(), stage.clone(), cfg))
                    .ok()
            });
            st.as_ref().is_some_and(|st| st.member(&f.without(l_el)) == Verdict::In)
        });
        if found {
            witnessed += 1;
        } else {
            unwitnessed.push(f.clone());
        }
    }
    Ok(Lemma28Report {
        family: format!("A_{lam}"),
        n,
        stage: stage.clone(),
        window: cfg.window,
        checked_i: sec_members.len(),
        passed: failures_i.is_empty(),
        failures_i,
        checked_ii,
        witnessed_ii: witnessed,
        unwitnessed_ii: unwitnessed,
        truncated: !sec_complete || !full_complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn kleene_and() {
        assert_eq!(Verdict::In.and(Verdict::Unresolved), Verdict::Unresolved);
        assert_eq!(Verdict::Unresolved.and(Verdict::Out), Verdict::Out);
        assert_eq!(Verdict::In.and(Verdict::In), Verdict::In);
    }

    #[test]
    fn first_derivative_of_a2() {
        let f = schreier_substar(&o("2"), None);
        let d1 = DerivativeStage::at(f, Stream::all(), o("1"), CbConfig::default()).unwrap();
        assert_eq!(d1.member(&finset![]), Verdict::In);
        assert_eq!(d1.member(&finset![5]), Verdict::In);
        assert_eq!(d1.member(&finset![5, 6]), Verdict::Out);
        let d2 = d1.derivative().unwrap();
        assert_eq!(d2.member(&finset![]), Verdict::In);
        assert_eq!(d2.member(&finset![5]), Verdict::Out);
        assert_eq!(d2.derivative().unwrap().emptiness(), Emptiness::Empty);
    }

    #[test]
    fn schreier_omega_stages() {
        let f = schreier_substar(&o("w"), None);
        for k in 0..=6u64 {
            let st = DerivativeStage::at(f.clone(), Stream::all(), o(&k.to_string()), CbConfig::default()).unwrap();
            assert_eq!(st.member(&finset![]), Verdict::In, "stage {k}");
            // D^k = {s : |s| + k ≤ min s}
            assert_eq!(st.member(&finset![4, 5]), Verdict::from(2 + k <= 4), "stage {k}");
        }
        let w = DerivativeStage::at(f, Stream::all(), o("w"), CbConfig::default()).unwrap();
        assert_eq!(w.member(&finset![]), Verdict::Unresolved);
        assert_eq!(w.member(&finset![9]), Verdict::Out);
    }

    #[test]
    fn index_examples() {
        let cfg = CbConfig::default();
        for k in 1..=4u64 {
            let f = schreier_substar(&Ordinal::finite(k), None);
            let r = index(&f, &Stream::all(), &finite_ladder(k + 2), cfg).unwrap();
            assert_eq!(r.index, IndexVerdict::Exactly(Ordinal::finite(k + 1)));
        }
        let r = index(&Family::empty_only(), &Stream::all(), &finite_ladder(3), cfg).unwrap();
        assert_eq!(r.index, IndexVerdict::Exactly(o("1")));
        let f = schreier_substar(&o("w"), None);
        let r = index(&f, &Stream::all(), &finite_ladder(6), cfg).unwrap();
        assert_eq!(r.index, IndexVerdict::AtLeast(o("7")));
        let ladder = vec![o("1"), o("2"), o("w"), o("w+1"), o("w+2")];
        let r = index(&f, &Stream::all(), &ladder, cfg).unwrap();
        assert_eq!(r.index, IndexVerdict::Exactly(o("w+1")));
        assert_eq!(r.resolution, "approximants");
    }

    #[test]
    fn missing_oracle_is_an_error() {
        let f = Family::new("opaque", |s| s.len() <= 1).hereditary();
        assert!(DerivativeStage::at(f.clone(), Stream::all(), o("1"), CbConfig::default()).is_err());
        assert!(DerivativeStage::new(f, Stream::all(), CbConfig::default())
            .derivative()
            .is_err());
    }

    #[test]
    fn lemma_examples() {
        let cfg = CbConfig::default();
        let r = lemma28_check(&o("3"), &o("1"), 2, &Stream::all(), cfg, 10_000).unwrap();
        assert!(r.passed, "{r:?}");
        let sec = DerivativeStage::at(
            schreier_section_substar(&o("3"), 2).unwrap(),
            Stream::all(),
            o("1"),
            cfg,
        )
        .unwrap();
        assert_eq!(sec.member(&finset![5]), Verdict::In);
        let full = DerivativeStage::at(schreier_substar(&o("3"), None), Stream::all(), o("1"), cfg).unwrap();
        assert_eq!(full.member(&finset![2, 5]), Verdict::In);
    }
}
