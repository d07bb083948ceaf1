//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `ω^e₁·c₁ + … + ω^eₖ·cₖ` with strictly
//! decreasing exponents (themselves ordinals) and positive coefficients.
//! The empty sum is `0`. Values are always kept normalized, so structural
//! equality coincides with ordinal equality.
//!
//! Besides comparison and addition this module fixes the fundamental
//! sequences used throughout the crate: [`Ordinal::fund`] is the standard
//! CNF choice and [`Ordinal::sfund`] is its successor-valued variant.

mod parse;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A single Cantor-normal-form term `ω^exponent · coefficient`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: u64,
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

/// The zero / successor / limit trichotomy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrdinalKind {
    Zero,
    Successor(Ordinal),
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::finite(1)
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal::omega_pow_times(Ordinal::zero(), n)
        }
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `ω^exponent`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Ordinal::omega_pow_times(exponent, 1)
    }

    /// `ω^exponent · coefficient`; a zero coefficient gives `0`.
    pub fn omega_pow_times(exponent: Ordinal, coefficient: u64) -> Self {
        if coefficient == 0 {
            return Ordinal::zero();
        }
        Ordinal {
            terms: vec![Term { exponent, coefficient }],
        }
    }

    /// Builds an ordinal from arbitrary terms, normalizing by left-to-right
    /// ordinal addition (so absorbed terms disappear).
    pub fn from_terms(terms: impl IntoIterator<Item = (Ordinal, u64)>) -> Self {
        terms
            .into_iter()
            .fold(Ordinal::zero(), |acc, (e, c)| acc.add(&Ordinal::omega_pow_times(e, c)))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.as_finite().is_some()
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => Some(t.coefficient),
            _ => None,
        }
    }

    /// Largest exponent, or `None` for zero.
    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exponent)
    }

    /// Total order agreeing with the ordinal order.
    pub fn compare(&self, other: &Ordinal) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            match a.exponent.compare(&b.exponent) {
                Ordering::Equal => {}
                ord => return ord,
            }
            match a.coefficient.cmp(&b.coefficient) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }

    /// Ordinal sum `self + other`.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent.compare(&lead.exponent) != Ordering::Less)
            .cloned()
            .collect();
        let mut rest = other.terms.iter();
        if let Some(last) = terms.last_mut() {
            if last.exponent == lead.exponent {
                last.coefficient = last
                    .coefficient
                    .checked_add(lead.coefficient)
                    .expect("ordinal coefficient overflow");
                rest.next();
            }
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    pub fn successor(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    pub fn kind(&self) -> OrdinalKind {
        match self.terms.last() {
            None => OrdinalKind::Zero,
            Some(t) if t.exponent.is_zero() => {
                let mut pred = self.clone();
                let last = pred.terms.last_mut().unwrap();
                if last.coefficient == 1 {
                    pred.terms.pop();
                } else {
                    last.coefficient -= 1;
                }
                OrdinalKind::Successor(pred)
            }
            Some(_) => OrdinalKind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.kind(), OrdinalKind::Limit)
    }

    /// Splits off the smallest-exponent term: `self = head + ω^exponent·coefficient`
    /// where every exponent of `head` exceeds `exponent`.
    pub fn last_term_split(&self) -> Result<(Ordinal, Ordinal, u64)> {
        let (last, init) = self.terms.split_last().ok_or(Error::ZeroOrdinal("last_term_split"))?;
        Ok((
            Ordinal { terms: init.to_vec() },
            last.exponent.clone(),
            last.coefficient,
        ))
    }

    /// The `n`-th element (`n ≥ 1`) of the fixed fundamental sequence of a
    /// limit ordinal.
    ///
    /// With `λ = γ + ω^α·c`:
    /// `c > 1` gives `γ + ω^α·(c−1) + fund(ω^α, n)`; `α = β+1` gives
    /// `γ + ω^β·n`; `α` limit gives `γ + ω^fund(α, n)`.
    pub fn fund(&self, n: u64) -> Result<Ordinal> {
        if !self.is_limit() {
            return Err(Error::NotLimit(self.clone()));
        }
        if n == 0 {
            return Err(Error::Invalid("fundamental sequences are indexed from 1".into()));
        }
        let (head, exponent, coefficient) = self.last_term_split()?;
        if coefficient > 1 {
            let base = head.add(&Ordinal::omega_pow_times(exponent.clone(), coefficient - 1));
            return Ok(base.add(&Ordinal::omega_pow(exponent).fund(n)?));
        }
        let tail = match exponent.kind() {
            OrdinalKind::Successor(beta) => Ordinal::omega_pow_times(beta, n),
            OrdinalKind::Limit => Ordinal::omega_pow(exponent.fund(n)?),
            OrdinalKind::Zero => unreachable!("ω^0 is a successor"),
        };
        Ok(head.add(&tail))
    }

    /// `fund(λ, n) + 1`: a strictly increasing sequence of successors with
    /// supremum `λ`.
    pub fn sfund(&self, n: u64) -> Result<Ordinal> {
        Ok(self.fund(n)?.successor())
    }

    /// Number of nested term levels; used to bound work in tests.
    pub fn height(&self) -> usize {
        self.terms.iter().map(|t| 1 + t.exponent.height()).max().unwrap_or(0)
    }

    /// Finite part contributed by the trailing `ω^0` term.
    pub fn finite_tail(&self) -> u64 {
        match self.terms.last() {
            Some(t) if t.exponent.is_zero() => t.coefficient,
            _ => 0,
        }
    }

    fn fmt_exponent(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() || *self == Ordinal::omega() {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            write!(f, "w")?;
            if t.exponent != Ordinal::one() {
                write!(f, "^")?;
                t.exponent.fmt_exponent(f)?;
            }
            if t.coefficient > 1 {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl std::str::FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse::parse_ordinal(s)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

pub use parse::parse_ordinal;

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(o("w").compare(&o("w")), Ordering::Equal);
        assert_eq!(o("w").compare(&o("w^2")), Ordering::Less);
        assert_eq!(o("w*2+1").compare(&o("w*2")), Ordering::Greater);
        assert!(o("w^w") > o("w^5*100+w"));
        assert!(o("w^(w+1)") > o("w^w*7"));
    }

    #[test]
    fn add_examples() {
        assert_eq!(o("w").add(&o("w^2")), o("w^2"));
        assert_eq!(o("w^2").add(&o("w")), o("w^2+w"));
        assert_eq!(o("w*2+3").add(&o("1")), o("w*2+4"));
        assert_eq!(o("w^2+w*3+5").add(&o("w*2+1")), o("w^2+w*5+1"));
        assert_eq!(Ordinal::zero().add(&o("w")), o("w"));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(Ordinal::zero().kind(), OrdinalKind::Zero);
        assert_eq!(o("w+3").kind(), OrdinalKind::Successor(o("w+2")));
        assert_eq!(o("w^2+w").kind(), OrdinalKind::Limit);
        assert_eq!(o("1").kind(), OrdinalKind::Successor(Ordinal::zero()));
    }

    #[test]
    fn last_term_split_examples() {
        assert_eq!(o("w^2+w*2").last_term_split().unwrap(), (o("w^2"), o("1"), 2));
        assert_eq!(o("w^w").last_term_split().unwrap(), (Ordinal::zero(), o("w"), 1));
        assert_eq!(o("5").last_term_split().unwrap(), (Ordinal::zero(), Ordinal::zero(), 5));
        assert!(Ordinal::zero().last_term_split().is_err());
    }

    #[test]
    fn fund_examples() {
        assert_eq!(o("w").fund(4).unwrap(), o("4"));
        assert_eq!(o("w^2").fund(3).unwrap(), o("w*3"));
        assert_eq!(o("w^w").fund(2).unwrap(), o("w^2"));
        assert_eq!(o("w*3").fund(2).unwrap(), o("w*2+2"));
        assert_eq!(o("w^(w*2)").fund(3).unwrap(), o("w^(w+3)"));
        assert!(o("w+1").fund(1).is_err());
        assert!(o("w").fund(0).is_err());
    }

    #[test]
    fn sfund_examples() {
        assert_eq!(o("w").sfund(4).unwrap(), o("5"));
        assert_eq!(o("w^2").sfund(3).unwrap(), o("w*3+1"));
        assert_eq!(o("w^w").sfund(2).unwrap(), o("w^2+1"));
    }

    #[test]
    fn display_forms() {
        assert_eq!(o("w^2*3+w+5").to_string(), "w^2*3+w+5");
        assert_eq!(o("w^(w)").to_string(), "w^w");
        assert_eq!(o("w^(w+1)").to_string(), "w^(w+1)");
        assert_eq!(o("w^1*2").to_string(), "w*2");
        assert_eq!(Ordinal::zero().to_string(), "0");
    }
}
