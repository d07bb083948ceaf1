//! Textual family expressions and the named-family corpus.
//!
//! ```text
//! fam := "A_" ord | "A(" ord ")" | "F_" ord | "F(" ord ")"
//!      | "substar(" fam ["," stream] ")" | "tree(" fam ")"
//!      | "h(" fam ")" | "t(" fam ")" | "spread(" fam "," stream ")"
//!      | "card(" quoted-rule ["," stream] ")" | "all" | "empty" | corpus-name
//! ```
//!
//! Corpus files hold one family per line:
//!
//! ```text
//! ex1 card "|s| == 2*min+1"
//! ex2 card "|s| == min/2" within evens
//! b2  schreier w^2
//! f1  gschreier 1
//! few list {1} {1,2} {}
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;

use super::{hereditary_closure, restrict, spread, tree_closure, tree_parts, CardRule, Family};
use crate::error::{Error, Result};
use crate::finset::FinSet;
use crate::ordinal::Ordinal;
use crate::stream::Stream;

pub const DEFAULT_CORPUS: &str = r#"# Examples of hereditary closures with strong index w+1.
ex1 card "|s| == 2*min+1"
ex2 card "|s| == min/2" within evens
"#;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Entry {
    Schreier(Ordinal),
    Gschreier(Ordinal),
    Card(String, Option<String>),
    List(Vec<FinSet>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    entries: BTreeMap<String, Entry>,
}

impl Default for Corpus {
    fn default() -> Self {
        Corpus::parse(DEFAULT_CORPUS).expect("default corpus parses")
    }
}

impl Corpus {
    pub fn empty() -> Self {
        Corpus {
            entries: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Invalid(format!("corpus line {}: {msg}", lineno + 1));
            let (name, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| bad("expected `name kind ...`"))?;
            let rest = rest.trim();
            let (kind, args) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            let args = args.trim();
            let entry = match kind {
                "schreier" => Entry::Schreier(args.parse()?),
                "gschreier" => Entry::Gschreier(args.parse()?),
                "card" => {
                    let (rule, after) = take_quoted(args).ok_or_else(|| bad("expected a quoted rule"))?;
                    CardRule::parse(&rule)?;
                    let after = after.trim();
                    let within = match after.strip_prefix("within") {
                        Some(s) => {
                            let s = s.trim();
                            s.parse::<Stream>()?;
                            Some(s.to_string())
                        }
                        None if after.is_empty() => None,
                        None => return Err(bad("expected `within <stream>`")),
                    };
                    Entry::Card(rule, within)
                }
                "list" => Entry::List(
                    split_sets(args)
                        .iter()
                        .map(|s| s.parse())
                        .collect::<Result<Vec<FinSet>>>()?,
                ),
                other => return Err(bad(&format!("unknown kind `{other}`"))),
            };
            entries.insert(name.to_string(), entry);
        }
        Ok(Corpus { entries })
    }

    /// Adds the entries of `other`, replacing same-named ones.
    pub fn extend(&mut self, other: Corpus) {
        self.entries.extend(other.entries);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str, horizon: u64) -> Option<Family> {
        let entry = self.entries.get(name)?;
        let f = match entry {
            Entry::Schreier(x) => Family::schreier(x),
            Entry::Gschreier(a) => Family::generalized_schreier(a),
            Entry::Card(rule, within) => Family::card(
                CardRule::parse(rule).expect("validated"),
                within.as_ref().map(|w| w.parse().expect("validated")),
                horizon,
            ),
            Entry::List(sets) => Family::from_list(name, sets.clone()),
        };
        Some(rename(f, name))
    }
}

fn rename(mut f: Family, name: &str) -> Family {
    f.description = name.to_string();
    f
}

fn take_quoted(s: &str) -> Option<(String, &str)> {
    let rest = s.trim_start().strip_prefix('"')?;
    let end = rest.find('"')?;
    Some((rest[..end].to_string(), &rest[end + 1..]))
}

fn split_sets(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if c.is_whitespace() && cur.is_empty() {
            continue;
        }
        cur.push(c);
        if c == '}' {
            out.push(std::mem::take(&mut cur));
        }
    }
    out
}

/// Splits at top-level commas, respecting parentheses, braces and quotes.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut quoted, mut start) = (0i32, false, 0);
    for (i, c) in s.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '(' | '{' if !quoted => depth += 1,
            ')' | '}' if !quoted => depth -= 1,
            ',' if !quoted && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// Parses a family expression, resolving names against `corpus`.
pub fn parse_family(text: &str, corpus: &Corpus, horizon: u64) -> Result<Family> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::syntax(0, "empty family expression"));
    }
    match t {
        "all" => return Ok(Family::all()),
        "empty" => return Ok(Family::empty_only()),
        _ => {}
    }
    if let Some(f) = corpus.get(t, horizon) {
        return Ok(f);
    }
    if let Some(ord) = t.strip_prefix("A_") {
        return Ok(Family::schreier(&ord.parse()?));
    }
    if let Some(ord) = t.strip_prefix("F_") {
        return Ok(Family::generalized_schreier(&ord.parse()?));
    }
    let open = t.find('(').ok_or_else(|| Error::UnknownFamily(t.to_string()))?;
    if !t.ends_with(')') {
        return Err(Error::syntax(t.len(), "expected `)`"));
    }
    let head = &t[..open];
    let args = split_args(&t[open + 1..t.len() - 1]);
    let arity = |lo: usize, hi: usize| -> Result<()> {
        if args.len() < lo || args.len() > hi {
            Err(Error::Invalid(format!(
                "`{head}` takes {lo}..={hi} arguments, got {}",
                args.len()
            )))
        } else {
            Ok(())
        }
    };
    let sub = |i: usize| parse_family(args[i], corpus, horizon);
    match head {
        "A" => {
            arity(1, 1)?;
            Ok(Family::schreier(&args[0].parse()?))
        }
        "F" => {
            arity(1, 1)?;
            Ok(Family::generalized_schreier(&args[0].parse()?))
        }
        "substar" => {
            arity(1, 2)?;
            let inner = sub(0)?;
            let inner = match args.get(1) {
                Some(m) => restrict(&inner, &m.parse()?),
                None => inner,
            };
            Ok(hereditary_closure(&inner, horizon))
        }
        "tree" => {
            arity(1, 1)?;
            Ok(tree_closure(&sub(0)?, horizon))
        }
        "h" => {
            arity(1, 1)?;
            Ok(tree_parts(&sub(0)?).0)
        }
        "t" => {
            arity(1, 1)?;
            Ok(tree_parts(&sub(0)?).1)
        }
        "spread" => {
            arity(2, 2)?;
            Ok(spread(&sub(0)?, &args[1].parse()?))
        }
        "card" => {
            arity(1, 2)?;
            let (rule, rest) = take_quoted(args[0]).ok_or_else(|| Error::syntax(open + 1, "expected a quoted rule"))?;
            if !rest.trim().is_empty() {
                return Err(Error::syntax(open + 1, "unexpected text after the rule"));
            }
            let within = args.get(1).map(|s| s.parse()).transpose()?;
            Ok(Family::card(CardRule::parse(&rule)?, within, horizon))
        }
        _ => Err(Error::UnknownFamily(head.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset;

    #[test]
    fn parses_expressions() {
        let c = Corpus::default();
        let f = parse_family("substar(A_3)", &c, 40).unwrap();
        assert!(f.claims_hereditary());
        assert!(f.contains(&finset![4, 9]));
        assert!(!f.contains(&finset![1, 2, 3, 4]));
        let g = parse_family("substar(A(w), prefix:{1,4}:arith:7:2)", &c, 40).unwrap();
        assert!(g.contains(&finset![4, 7]));
        assert!(!g.contains(&finset![2]));
        let e = parse_family("ex2", &c, 40).unwrap();
        assert!(e.contains(&finset![4, 6]));
        assert!(!e.contains(&finset![4, 5]));
        let card = parse_family("card(\"|s| <= min\", evens)", &c, 40).unwrap();
        assert!(card.contains(&finset![2, 4]));
        assert!(parse_family("bogus", &c, 40).is_err());
        assert!(parse_family("substar(A_w", &c, 40).is_err());
        assert!(parse_family("spread(all)", &c, 40).is_err());
    }

    #[test]
    fn corpus_file_format() {
        let c = Corpus::parse("b2 schreier w^2\nf1 gschreier 1\n# comment\nfew list {1} {1,2} {}\n").unwrap();
        let few = c.get("few", 40).unwrap();
        assert!(few.contains(&finset![1, 2]));
        assert!(few.contains(&finset![]));
        assert!(!few.contains(&finset![2]));
        assert!(c.get("f1", 40).unwrap().contains(&finset![3, 4, 5]));
        assert!(Corpus::parse("x mystery 3").is_err());
        assert_eq!(Corpus::default().names().collect::<Vec<_>>(), vec!["ex1", "ex2"]);
    }
}
