//! Finite dichotomies for `A_ξ`: homogeneous-set search, partitions, trees,
//! the hereditary classifier, segment location and the spreading inclusions.
//!
//! Every statement here concerns a finite candidate pool `M ∩ {1..horizon}`.
//! A returned homogeneous set `L` is always re-checked by enumerating
//! `A_ξ ∩ [L]^{<ω}` with the peeling enumerator, which shares nothing with
//! the search.

use std::fmt;

use serde::Serialize;

use crate::cbindex::{self, CbConfig, IndexVerdict};
use crate::error::{Error, Result};
use crate::families::{pointwise_closed_probe, Family, GeneralizedSchreier, ProbeResult};
use crate::finset::FinSet;
use crate::ordinal::Ordinal;
use crate::schreier::{self, Classification, StepMemo};
use crate::stream::Stream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Horn {
    Inside,
    Outside,
}

impl fmt::Display for Horn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Horn::Inside => "Inside",
            Horn::Outside => "Outside",
        })
    }
}

/// Which side to keep when the search cannot tell which one is infinite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// The side with more surviving candidates; ties go to `Inside`.
    #[default]
    Majority,
    /// `Inside` whenever it reaches the target.
    PreferInside,
    /// `Outside` whenever it reaches the target.
    PreferOutside,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Majority => "majority",
            Policy::PreferInside => "prefer-inside",
            Policy::PreferOutside => "prefer-outside",
        })
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority" => Ok(Policy::Majority),
            "prefer-inside" => Ok(Policy::PreferInside),
            "prefer-outside" => Ok(Policy::PreferOutside),
            _ => Err(Error::Invalid(format!("unknown policy `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub horizon: u64,
    pub target: usize,
    /// Family evaluations allowed during the search, and sets enumerated
    /// during verification.
    pub budget: usize,
    pub policy: Policy,
    /// Highest escalation level for nested searches. Level 0 asks a nested
    /// search for as many candidates as the caller still needs, level 1 for
    /// enough to survive one even split, level 2 for twice that. Levels are
    /// tried in order until one succeeds; all share the budget.
    pub slack: u8,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            horizon: 40,
            target: 6,
            budget: 1_000_000,
            policy: Policy::Majority,
            slack: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DichotomyResult {
    pub horn: Horn,
    #[serde(rename = "L")]
    pub l: FinSet,
    /// Members of `A_ξ ∩ [L]^{<ω}` verified.
    pub checked: usize,
    pub horizon: u64,
    pub policy: Policy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchFailure {
    pub reason: String,
    /// Top-level candidates that ended on each side (vacuous ones count twice).
    pub inside: usize,
    pub outside: usize,
    pub evaluations: usize,
    pub horizon: u64,
    pub policy: Policy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum SearchOutcome {
    Found(DichotomyResult),
    Failure(SearchFailure),
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&DichotomyResult> {
        match self {
            SearchOutcome::Found(r) => Some(r),
            SearchOutcome::Failure(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Inclusion {
    Verified { checked: usize },
    Counterexample(FinSet),
}

/// Checks `A_ξ ∩ [L]^{<ω} ⊆ F` (`Inside`) or `⊆ complement` (`Outside`).
pub fn check_inclusion(xi: &Ordinal, l: &FinSet, f: &Family, horn: Horn, budget: usize) -> Result<Inclusion> {
    let members = schreier::enumerate(xi, l, budget)?;
    for s in &members {
        if f.contains(s) != (horn == Horn::Inside) {
            return Ok(Inclusion::Counterexample(s.clone()));
        }
    }
    Ok(Inclusion::Verified { checked: members.len() })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Colour {
    Inside,
    Outside,
    Either,
}

struct BudgetHit;

struct Searcher<'a> {
    f: &'a Family,
    cfg: SearchConfig,
    evals: usize,
    memo: StepMemo,
    pinned: Vec<u64>,
    level: u8,
}

impl Searcher<'_> {
    fn sub_need(&self, need: usize, processed: usize) -> usize {
        let split = (2 * need).saturating_sub(1 + processed);
        match self.level {
            0 => need.saturating_sub(processed),
            1 => split,
            _ => 2 * split,
        }
        .max(1)
    }

    /// Homogenizes the section family `{s : pinned ∪ s ∈ F}` for `A_ξ` on
    /// `pool`. The candidate `m = min pool` is peeled, the section at `m` is
    /// homogenized for `A_{step(ξ,m)}` on the rest, and the result becomes the
    /// new pool. `need` is the size the caller hopes for; with `early` the loop
    /// stops as soon as one side reaches it.
    fn run(
        &mut self,
        xi: &Ordinal,
        pool: &[u64],
        need: usize,
        early: bool,
    ) -> Result<(Horn, Vec<u64>, usize, usize), BudgetHit> {
        if xi.is_zero() {
            self.evals += 1;
            if self.evals > self.cfg.budget {
                return Err(BudgetHit);
            }
            let inside = self.f.contains(&FinSet::from_sorted_unchecked(self.pinned.clone()));
            let horn = if inside { Horn::Inside } else { Horn::Outside };
            return Ok((horn, pool.to_vec(), 0, 0));
        }
        let mut picks: Vec<(u64, Colour)> = Vec::new();
        let mut rest = pool.to_vec();
        let (mut ins, mut outs) = (0, 0);
        while let Some(&m) = rest.first() {
            let tail = rest[1..].to_vec();
            let next = self.memo.step(xi, m).expect("nonzero ordinal");
            let processed = picks.len() + 1;
            let sub_need = self.sub_need(need, processed);
            let (colour, l) = if !schreier::has_member_within(&next, &tail) {
                (Colour::Either, tail)
            } else {
                self.pinned.push(m);
                let r = self.run(&next, &tail, sub_need, true);
                self.pinned.pop();
                let (h, l, _, _) = r?;
                let c = match h {
                    Horn::Inside => Colour::Inside,
                    Horn::Outside => Colour::Outside,
                };
                (c, l)
            };
            if colour != Colour::Outside {
                ins += 1;
            }
            if colour != Colour::Inside {
                outs += 1;
            }
            picks.push((m, colour));
            rest = l;
            if early && (ins >= need || outs >= need) {
                break;
            }
        }
        let horn = choose(self.cfg.policy, ins, outs, need);
        let keep = picks
            .into_iter()
            .filter(|&(_, c)| c == Colour::Either || (c == Colour::Inside) == (horn == Horn::Inside))
            .map(|(m, _)| m)
            .collect();
        Ok((horn, keep, ins, outs))
    }
}

fn choose(policy: Policy, ins: usize, outs: usize, need: usize) -> Horn {
    let majority = if ins >= outs { Horn::Inside } else { Horn::Outside };
    match policy {
        Policy::Majority => majority,
        Policy::PreferInside if ins >= need => Horn::Inside,
        Policy::PreferOutside if outs >= need => Horn::Outside,
        _ if ins >= need.max(1) && outs < need => Horn::Inside,
        _ if outs >= need.max(1) && ins < need => Horn::Outside,
        _ => majority,
    }
}

/// Searches `M ∩ {1..horizon}` for `L` with `|L| ≥ target` homogeneous for
/// `A_ξ` and `F`. The returned `L` is the first `target` elements of the
/// chosen side and has been re-verified.
pub fn dichotomy_search(xi: &Ordinal, f: &Family, m: &Stream, cfg: SearchConfig) -> Result<SearchOutcome> {
    let pool = m.up_to(cfg.horizon);
    search_pool(xi, f, pool.as_slice(), cfg)
}

fn search_pool(xi: &Ordinal, f: &Family, pool: &[u64], cfg: SearchConfig) -> Result<SearchOutcome> {
    if cfg.target == 0 || (cfg.horizon as usize) < cfg.target {
        return Err(Error::Invalid(format!(
            "horizon {} must be at least the target {}",
            cfg.horizon, cfg.target
        )));
    }
    let (horn, keep, evals) = match escalate(xi, f, pool, cfg) {
        Ok(r) => r,
        Err(fail) => return Ok(SearchOutcome::Failure(fail)),
    };
    let failure = |reason: String| {
        SearchOutcome::Failure(SearchFailure {
            reason,
            inside: 0,
            outside: 0,
            evaluations: evals,
            horizon: cfg.horizon,
            policy: cfg.policy,
        })
    };
    let l = FinSet::from_sorted_unchecked(keep[..cfg.target].to_vec());
    match check_inclusion(xi, &l, f, horn, cfg.budget) {
        Ok(Inclusion::Verified { checked }) => Ok(SearchOutcome::Found(DichotomyResult {
            horn,
            l,
            checked,
            horizon: cfg.horizon,
            policy: cfg.policy,
        })),
        Ok(Inclusion::Counterexample(s)) => Ok(failure(format!("verification found {s} on the wrong side"))),
        Err(Error::BudgetExceeded { .. }) => Ok(failure("verification budget exhausted".into())),
        Err(e) => Err(e),
    }
}

/// Tests that `parts` cover `[M ∩ {1..n}]^{<ω}` with no overlaps.
pub fn check_partition(parts: &[Family], m: &Stream, n: u64) -> Result<()> {
    let ground = m.up_to(n);
    for s in ground.subsets() {
        let hits = parts.iter().filter(|p| p.contains(&s)).count();
        if hits != 1 {
            return Err(Error::NotAPartition(format!("{s} lies in {hits} parts")));
        }
    }
    Ok(())
}

/// Finds a part `P_i` and `L` with `A_ξ ∩ [L]^{<ω} ⊆ P_i`, by running the
/// dichotomy against each part in turn inside the previous `Outside` set.
pub fn partition_search(
    xi: &Ordinal,
    parts: &[Family],
    m: &Stream,
    cfg: SearchConfig,
) -> Result<std::result::Result<(usize, DichotomyResult), SearchFailure>> {
    if parts.is_empty() {
        return Err(Error::NotAPartition("no parts".into()));
    }
    check_partition(parts, m, cfg.horizon.min(12))?;
    let mut pool = m.up_to(cfg.horizon);
    for (i, part) in parts.iter().enumerate() {
        if i + 1 == parts.len() {
            let horn = Horn::Inside;
            return match check_inclusion(xi, &pool, part, horn, cfg.budget)? {
                Inclusion::Verified { checked } if pool.len() >= cfg.target => Ok(Ok((
                    i,
                    DichotomyResult {
                        horn,
                        l: pool.prefix(cfg.target),
                        checked,
                        horizon: cfg.horizon,
                        policy: cfg.policy,
                    },
                ))),
                other => Ok(Err(SearchFailure {
                    reason: format!("last part not homogeneous: {other:?}"),
                    inside: 0,
                    outside: 0,
                    evaluations: 0,
                    horizon: cfg.horizon,
                    policy: cfg.policy,
                })),
            };
        }
        // Keep the whole homogeneous side so later parts have room.
        let outcome = search_wide(xi, part, pool.as_slice(), cfg)?;
        match outcome {
            Err(fail) => return Ok(Err(fail)),
            Ok((Horn::Inside, l)) => {
                let l = l.prefix(cfg.target);
                return match check_inclusion(xi, &l, part, Horn::Inside, cfg.budget)? {
                    Inclusion::Verified { checked } => Ok(Ok((
                        i,
                        DichotomyResult {
                            horn: Horn::Inside,
                            l,
                            checked,
                            horizon: cfg.horizon,
                            policy: cfg.policy,
                        },
                    ))),
                    Inclusion::Counterexample(s) => Err(Error::Invalid(format!("unsound search: {s}"))),
                };
            }
            Ok((Horn::Outside, l)) => pool = l,
        }
    }
    unreachable!("the last part returns")
}

/// The untruncated homogeneous side of a search on `pool`, trying each
/// escalation level in turn.
fn escalate(
    xi: &Ordinal,
    f: &Family,
    pool: &[u64],
    cfg: SearchConfig,
) -> std::result::Result<(Horn, Vec<u64>, usize), SearchFailure> {
    let mut searcher = Searcher {
        f,
        cfg,
        evals: 0,
        memo: StepMemo::new(),
        pinned: Vec::new(),
        level: 0,
    };
    let mut last = None;
    for level in 0..=cfg.slack {
        searcher.level = level;
        match searcher.run(xi, pool, cfg.target, false) {
            Ok((horn, keep, _, _)) if keep.len() >= cfg.target => return Ok((horn, keep, searcher.evals)),
            Ok((horn, keep, ins, outs)) => {
                last = Some(SearchFailure {
                    reason: format!("{horn} side holds {} < {} candidates", keep.len(), cfg.target),
                    inside: ins,
                    outside: outs,
                    evaluations: searcher.evals,
                    horizon: cfg.horizon,
                    policy: cfg.policy,
                })
            }
            Err(BudgetHit) => {
                return Err(SearchFailure {
                    reason: format!("budget of {} evaluations exhausted", cfg.budget),
                    inside: 0,
                    outside: 0,
                    evaluations: searcher.evals,
                    horizon: cfg.horizon,
                    policy: cfg.policy,
                })
            }
        }
    }
    Err(last.expect("at least one level"))
}

fn search_wide(
    xi: &Ordinal,
    f: &Family,
    pool: &[u64],
    cfg: SearchConfig,
) -> Result<std::result::Result<(Horn, FinSet), SearchFailure>> {
    Ok(escalate(xi, f, pool, cfg).map(|(h, keep, _)| (h, FinSet::from_sorted_unchecked(keep))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeDichotomy {
    pub result: DichotomyResult,
    /// For `Outside`: members of `F ∩ [L]^{<ω}` confirmed to be proper
    /// initial segments of `A_ξ` members.
    pub tree_form_checked: usize,
}

/// Dichotomy for a tree `F`, with the `Outside` horn also checked in the form
/// `F ∩ [L]^{<ω} ⊆ (A_ξ)* ∖ A_ξ`.
pub fn tree_dichotomy(
    xi: &Ordinal,
    f: &Family,
    m: &Stream,
    cfg: SearchConfig,
) -> Result<std::result::Result<TreeDichotomy, SearchFailure>> {
    if !f.claims_tree() {
        return Err(Error::Invalid(format!("{f} is not declared a tree")));
    }
    let result = match dichotomy_search(xi, f, m, cfg)? {
        SearchOutcome::Found(r) => r,
        SearchOutcome::Failure(fail) => return Ok(Err(fail)),
    };
    let mut tree_form_checked = 0;
    if result.horn == Horn::Outside {
        let mut stack = vec![FinSet::empty()];
        while let Some(s) = stack.pop() {
            if !f.contains(&s) {
                continue;
            }
            tree_form_checked += 1;
            if tree_form_checked > cfg.budget {
                return Err(Error::BudgetExceeded {
                    budget: cfg.budget,
                    count: tree_form_checked,
                });
            }
            if schreier::classify_peel(xi, &s) != Classification::ProperInitial {
                return Ok(Err(SearchFailure {
                    reason: format!("{s} ∈ F ∩ [L] is not a proper initial segment of an A_{xi} member"),
                    inside: 0,
                    outside: 0,
                    evaluations: 0,
                    horizon: cfg.horizon,
                    policy: cfg.policy,
                }));
            }
            for x in result.l.above(s.max().unwrap_or(0)).iter() {
                stack.push(s.with(x));
            }
        }
    }
    Ok(Ok(TreeDichotomy {
        result,
        tree_form_checked,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    Case1,
    Case2i,
    Case2ii,
    Case2iii,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::Case1 => "Case1",
            CaseTag::Case2i => "Case2i",
            CaseTag::Case2ii => "Case2ii",
            CaseTag::Case2iii => "Case2iii",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Witness {
    /// `[L]^{<ω} ⊆ F` on the probed cube; the chain of its initial segments.
    Cube(Vec<FinSet>),
    /// One dichotomy per probed stream.
    Dichotomies(Vec<DichotomyResult>),
    Failure(SearchFailure),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifierVerdict {
    pub case_tag: CaseTag,
    pub target_xi: Ordinal,
    /// Strong index of `F` on `M`, a lower bound for the supremum over `L ⊆ M`.
    pub xi_estimate: IndexVerdict,
    pub resolution: String,
    pub witness: Witness,
    /// Whether every witness horn agrees with the case.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyConfig {
    pub search: SearchConfig,
    pub cb: CbConfig,
    pub ladder: Vec<Ordinal>,
    pub probe_depth: usize,
}

impl ClassifyConfig {
    pub fn for_target(target_xi: &Ordinal) -> Self {
        ClassifyConfig {
            search: SearchConfig::default(),
            cb: CbConfig::default(),
            ladder: default_ladder(target_xi),
            probe_depth: 12,
        }
    }
}

/// `1..=6`, extended by `ξ, ξ+1, ξ+2` around the target.
pub fn default_ladder(target_xi: &Ordinal) -> Vec<Ordinal> {
    let mut v: Vec<Ordinal> = (1..=6).map(Ordinal::finite).collect();
    let mut x = target_xi.clone();
    for _ in 0..3 {
        v.push(x.clone());
        x = x.successor();
    }
    v.sort();
    v.dedup();
    v.retain(|o| !o.is_zero());
    v
}

/// Places a hereditary `F` on `M` into the cases of the hereditary
/// Nash-Williams dichotomy for `A_{target_xi}` and produces a witness.
pub fn classify_hereditary(
    f: &Family,
    m: &Stream,
    target_xi: &Ordinal,
    cfg: &ClassifyConfig,
) -> Result<ClassifierVerdict> {
    if !f.claims_hereditary() {
        return Err(Error::Invalid(format!("{f} is not declared hereditary")));
    }
    if let ProbeResult::ChainFound(chain) = pointwise_closed_probe(f, m, cfg.probe_depth) {
        return Ok(ClassifierVerdict {
            case_tag: CaseTag::Case1,
            target_xi: target_xi.clone(),
            xi_estimate: IndexVerdict::Unresolved,
            resolution: format!("cube of depth {}", cfg.probe_depth),
            witness: Witness::Cube(chain),
            consistent: true,
        });
    }
    let report = cbindex::index(f, m, &cfg.ladder, cfg.cb)?;
    let bar = target_xi.successor();
    let (case_tag, resolution) = match &report.index {
        IndexVerdict::Exactly(e) if *e > bar => (CaseTag::Case2i, report.resolution.clone()),
        IndexVerdict::Exactly(e) if *e < bar => (CaseTag::Case2ii, report.resolution.clone()),
        IndexVerdict::Exactly(_) => (CaseTag::Case2iii, report.resolution.clone()),
        IndexVerdict::AtLeast(e) if *e > bar => (CaseTag::Case2i, "lower bound".to_string()),
        IndexVerdict::AtLeast(_) => (CaseTag::Case2iii, "lower bound only; plain dichotomy".to_string()),
        IndexVerdict::Unresolved => (CaseTag::Case2iii, "unresolved; plain dichotomy".to_string()),
    };
    let (policy, streams, expect) = match case_tag {
        CaseTag::Case2i => (Policy::PreferInside, vec![m.clone()], Some(Horn::Inside)),
        CaseTag::Case2ii => (
            Policy::PreferOutside,
            vec![m.clone(), m.clone().drop_first(1), m.clone().drop_first(3)],
            Some(Horn::Outside),
        ),
        _ => (cfg.search.policy, vec![m.clone()], None),
    };
    let search = SearchConfig { policy, ..cfg.search };
    let mut found = Vec::new();
    for i in &streams {
        match dichotomy_search(target_xi, f, i, search)? {
            SearchOutcome::Found(r) => found.push(r),
            SearchOutcome::Failure(fail) => {
                return Ok(ClassifierVerdict {
                    case_tag,
                    target_xi: target_xi.clone(),
                    xi_estimate: report.index,
                    resolution,
                    witness: Witness::Failure(fail),
                    consistent: false,
                })
            }
        }
    }
    let consistent = expect.is_none_or(|h| found.iter().all(|r| r.horn == h));
    Ok(ClassifierVerdict {
        case_tag,
        target_xi: target_xi.clone(),
        xi_estimate: report.index,
        resolution,
        witness: Witness::Dichotomies(found),
        consistent,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentReport {
    pub segment: FinSet,
    pub in_family: bool,
    pub verified: bool,
}

/// The unique initial segment of `I` in `A_{ξ0}`, checked to lie outside `F`.
pub fn locate_segment(f: &Family, xi0: &Ordinal, i: &Stream) -> Result<SegmentReport> {
    if xi0.is_zero() {
        return Err(Error::ZeroOrdinal("locate_segment"));
    }
    let segment = schreier::initial_segment(xi0, i)?;
    let in_family = f.contains(&segment);
    Ok(SegmentReport {
        segment,
        in_family,
        verified: !in_family,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpreadingReport {
    pub alpha: Ordinal,
    #[serde(rename = "L")]
    pub l: String,
    pub window: u64,
    /// Members of `F_α(L)` checked against `(A_{ω^α})*`.
    pub checked_first: usize,
    pub failures_first: Vec<FinSet>,
    /// Members of `(A_{ω^α})*` checked against `F_α`.
    pub checked_second: usize,
    pub failures_second: Vec<FinSet>,
    pub passed: bool,
}

/// Checks `F_α(L) ⊆ (A_{ω^α})* ⊆ F_α` on `{1..window}`.
pub fn spreading_inclusion_check(alpha: &Ordinal, l: &Stream, window: u64) -> Result<SpreadingReport> {
    let b = Ordinal::omega_pow(alpha.clone());
    let g = GeneralizedSchreier::new();
    let ground = l.up_to(window);

    // F_α(L) is hereditary, so prune at the first non-member.
    let mut checked_first = 0;
    let mut failures_first = Vec::new();
    let mut stack = vec![(FinSet::empty(), FinSet::empty())];
    while let Some((t, idx)) = stack.pop() {
        if !g.contains(alpha, &idx) {
            continue;
        }
        checked_first += 1;
        if !schreier::in_tree_closure(&b, &t) {
            failures_first.push(t.clone());
        }
        let start = idx.max().unwrap_or(0) as usize;
        for (p, x) in ground.iter().enumerate().skip(start) {
            stack.push((t.with(x), idx.with(p as u64 + 1)));
        }
    }

    // (A_{ω^α})* is a tree, so prune at the first non-member.
    let mut checked_second = 0;
    let mut failures_second = Vec::new();
    let mut stack = vec![FinSet::empty()];
    while let Some(s) = stack.pop() {
        if !schreier::in_tree_closure(&b, &s) {
            continue;
        }
        checked_second += 1;
        if !g.contains(alpha, &s) {
            failures_second.push(s.clone());
        }
        for x in s.max().unwrap_or(0) + 1..=window {
            stack.push(s.with(x));
        }
    }
    failures_first.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
    failures_second.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
    Ok(SpreadingReport {
        alpha: alpha.clone(),
        l: l.to_string(),
        window,
        checked_first,
        passed: failures_first.is_empty() && failures_second.is_empty(),
        failures_first,
        checked_second,
        failures_second,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocatedSegment {
    #[serde(rename = "I")]
    pub i: FinSet,
    pub segment: FinSet,
    pub avoids: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "horn")]
pub enum NashWilliamsReport {
    /// `[L]^{<ω} ⊆ F`: every stem extends into the family.
    Cube { chain: Vec<FinSet> },
    /// The first ladder ordinal whose dichotomy came out `Outside`, with the
    /// segments located in sampled subsets of `L`.
    Segments {
        xi: Ordinal,
        #[serde(rename = "L")]
        l: FinSet,
        segments: Vec<LocatedSegment>,
        verified: bool,
    },
    /// No ladder ordinal gave `Outside` within the horizon.
    Undecided { tried: Vec<(Ordinal, String)> },
}

/// Builds the tree `F = {s : [s,ℕ] ∩ U ≠ ∅}` from the stem predicate and
/// looks, along the ladder, for `ξ` and `L` such that the `A_ξ` segment of
/// every sampled `I ⊆ L` has `[s_{ξ,I}, ℕ] ∩ U = ∅`.
pub fn nash_williams_probe(
    stem: Family,
    m: &Stream,
    ladder: &[Ordinal],
    cfg: SearchConfig,
    samples: usize,
) -> Result<NashWilliamsReport> {
    let f = stem.tree();
    if let ProbeResult::ChainFound(chain) = pointwise_closed_probe(&f, m, 12) {
        return Ok(NashWilliamsReport::Cube { chain });
    }
    let mut tried = Vec::new();
    for xi in ladder {
        match tree_dichotomy(xi, &f, m, cfg)? {
            Ok(td) if td.result.horn == Horn::Outside => {
                let l = td.result.l;
                let mut segments = Vec::new();
                for k in 0..samples.min(l.len()) {
                    // I = L without its k-th element (0 keeps L whole).
                    let i = if k == 0 {
                        l.clone()
                    } else {
                        l.without(l.as_slice()[k - 1])
                    };
                    if let Some(seg) = (1..=i.len()).map(|j| i.prefix(j)).find(|p| schreier::is_member(xi, p)) {
                        segments.push(LocatedSegment {
                            avoids: !f.contains(&seg),
                            i,
                            segment: seg,
                        });
                    }
                }
                let verified = !segments.is_empty() && segments.iter().all(|s| s.avoids);
                return Ok(NashWilliamsReport::Segments {
                    xi: xi.clone(),
                    l,
                    segments,
                    verified,
                });
            }
            Ok(td) => tried.push((xi.clone(), td.result.horn.to_string())),
            Err(fail) => tried.push((xi.clone(), format!("Failure: {}", fail.reason))),
        }
    }
    Ok(NashWilliamsReport::Undecided { tried })
}
