//! Infinite strictly increasing sets of positive integers, given lazily.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finset::FinSet;

type Pred = Arc<dyn Fn(u64) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Stream {
    /// `start, start+step, start+2·step, …`
    Arithmetic { start: u64, step: u64 },
    /// The finite `prefix`, then `start, start+step, …` (all of which must exceed the prefix).
    PrefixThenArithmetic { prefix: FinSet, start: u64, step: u64 },
    /// Elements of `base` satisfying `pred`. The stream ends at `horizon`, so
    /// requests past it fail instead of looping.
    Filtered {
        base: Box<Stream>,
        pred: Pred,
        label: String,
        horizon: u64,
    },
    /// `base` without its first `count` elements.
    Drop { base: Box<Stream>, count: usize },
}

impl Stream {
    pub fn all() -> Self {
        Stream::arithmetic(1, 1)
    }

    pub fn evens() -> Self {
        Stream::arithmetic(2, 2)
    }

    pub fn odds() -> Self {
        Stream::arithmetic(1, 2)
    }

    pub fn arithmetic(start: u64, step: u64) -> Self {
        assert!(
            start >= 1 && step >= 1,
            "arithmetic streams need positive start and step"
        );
        Stream::Arithmetic { start, step }
    }

    pub fn prefix_then_arithmetic(prefix: FinSet, start: u64, step: u64) -> Result<Self> {
        if start == 0 || step == 0 {
            return Err(Error::Invalid("arithmetic tail needs positive start and step".into()));
        }
        if prefix.max().is_some_and(|m| m >= start) {
            return Err(Error::Invalid(format!("prefix {prefix} must lie below {start}")));
        }
        Ok(Stream::PrefixThenArithmetic { prefix, start, step })
    }

    pub fn filtered(
        base: Stream,
        label: impl Into<String>,
        horizon: u64,
        pred: impl Fn(u64) -> bool + Send + Sync + 'static,
    ) -> Self {
        Stream::Filtered {
            base: Box::new(base),
            pred: Arc::new(pred),
            label: label.into(),
            horizon,
        }
    }

    pub fn drop_first(self, count: usize) -> Self {
        Stream::Drop {
            base: Box::new(self),
            count,
        }
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match self {
            Stream::Arithmetic { start, step } => Box::new((0..).map(move |i| start + i * step)),
            Stream::PrefixThenArithmetic { prefix, start, step } => {
                Box::new(prefix.iter().chain((0..).map(move |i| start + i * step)))
            }
            Stream::Filtered {
                base, pred, horizon, ..
            } => Box::new(
                base.iter()
                    .take_while(move |&x| x <= *horizon)
                    .filter(move |&x| pred(x)),
            ),
            Stream::Drop { base, count } => Box::new(base.iter().skip(*count)),
        }
    }

    /// The `i`-th element, 0-based.
    pub fn nth(&self, i: usize) -> Result<u64> {
        self.iter()
            .nth(i)
            .ok_or_else(|| Error::StreamExhausted(format!("element {} of {self}", i + 1)))
    }

    /// The first `n` elements.
    pub fn take(&self, n: usize) -> Result<FinSet> {
        let v: Vec<u64> = self.iter().take(n).collect();
        if v.len() < n {
            return Err(Error::StreamExhausted(format!("{n} elements of {self}")));
        }
        Ok(FinSet::from_sorted_unchecked(v))
    }

    /// Elements `≤ bound`.
    pub fn up_to(&self, bound: u64) -> FinSet {
        FinSet::from_sorted_unchecked(self.iter().take_while(|&x| x <= bound).collect())
    }

    /// First element `≥ x`.
    pub fn first_at_least(&self, x: u64) -> Result<u64> {
        self.iter()
            .find(|&e| e >= x)
            .ok_or_else(|| Error::StreamExhausted(format!("an element of {self} at least {x}")))
    }

    /// A point past which the stream's membership follows its periodic tail.
    pub fn tail_start(&self) -> u64 {
        match self {
            Stream::Arithmetic { start, .. } | Stream::PrefixThenArithmetic { start, .. } => *start,
            Stream::Filtered { base, .. } => base.tail_start(),
            Stream::Drop { base, count } => base.nth(*count).unwrap_or_else(|_| base.tail_start()),
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        match self {
            Stream::Arithmetic { start, step } => x >= *start && (x - start).is_multiple_of(*step),
            Stream::PrefixThenArithmetic { prefix, start, step } => {
                prefix.contains(x) || (x >= *start && (x - start).is_multiple_of(*step))
            }
            _ => self.iter().take_while(|&e| e <= x).any(|e| e == x),
        }
    }

    /// 1-based position of `x` in the stream.
    pub fn position(&self, x: u64) -> Option<usize> {
        self.iter().take_while(|&e| e <= x).position(|e| e == x).map(|i| i + 1)
    }

    /// Whether every element of `other` up to `bound` also belongs to `self`.
    pub fn contains_up_to(&self, other: &Stream, bound: u64) -> bool {
        other.up_to(bound).is_subset(&self.up_to(bound))
    }
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stream::Arithmetic { start: 1, step: 1 } => write!(f, "all"),
            Stream::Arithmetic { start: 2, step: 2 } => write!(f, "evens"),
            Stream::Arithmetic { start: 1, step: 2 } => write!(f, "odds"),
            Stream::Arithmetic { start, step } => write!(f, "arith:{start}:{step}"),
            Stream::PrefixThenArithmetic { prefix, start, step } => {
                write!(f, "prefix:{prefix}:arith:{start}:{step}")
            }
            Stream::Filtered { base, label, .. } => write!(f, "filter:{label}:{base}"),
            Stream::Drop { base, count } => write!(f, "drop:{count}:{base}"),
        }
    }
}

impl fmt::Debug for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Stream({self})")
    }
}

impl std::str::FromStr for Stream {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        match t {
            "all" => return Ok(Stream::all()),
            "evens" => return Ok(Stream::evens()),
            "odds" => return Ok(Stream::odds()),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("arith:") {
            let (a, d) = parse_arith(rest, 6)?;
            return Ok(Stream::arithmetic(a, d));
        }
        if let Some(rest) = t.strip_prefix("prefix:") {
            let close = rest
                .find('}')
                .ok_or_else(|| Error::syntax(7, "expected a braced prefix"))?;
            let prefix: FinSet = rest[..=close].parse()?;
            let tail = rest[close + 1..]
                .strip_prefix(":arith:")
                .ok_or_else(|| Error::syntax(8 + close, "expected `:arith:a:d` after the prefix"))?;
            let (a, d) = parse_arith(tail, 15 + close)?;
            return Stream::prefix_then_arithmetic(prefix, a, d);
        }
        if let Some(rest) = t.strip_prefix("drop:") {
            let (k, base) = rest
                .split_once(':')
                .ok_or_else(|| Error::syntax(5, "expected `drop:k:<stream>`"))?;
            let count = k
                .parse()
                .map_err(|_| Error::syntax(5, format!("`{k}` is not a count")))?;
            return Ok(base.parse::<Stream>()?.drop_first(count));
        }
        Err(Error::syntax(0, format!("unknown stream `{t}`")))
    }
}

fn parse_arith(text: &str, offset: usize) -> Result<(u64, u64)> {
    let (a, d) = text
        .split_once(':')
        .ok_or_else(|| Error::syntax(offset, "expected `a:d`"))?;
    let a: u64 = a
        .parse()
        .map_err(|_| Error::syntax(offset, format!("`{a}` is not a natural number")))?;
    let d: u64 = d.parse().map_err(|_| {
        Error::syntax(
            offset + a.to_string().len() + 1,
            format!("`{d}` is not a natural number"),
        )
    })?;
    if a == 0 || d == 0 {
        return Err(Error::syntax(offset, "start and step must be positive"));
    }
    Ok((a, d))
}
