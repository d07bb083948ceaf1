//! Cardinality rules: predicates on `|s|`, `min s`, `max s` and `Σ s`.
//!
//! ```text
//! rule := conj ("||" conj)*
//! conj := cmp ("&&" cmp)*
//! cmp  := sum (("=="|"!="|"<="|"<"|">="|">") sum)?
//! sum  := prod (("+"|"-") prod)*
//! prod := unary (("*"|"/"|"%") unary)*
//! unary:= "-" unary | atom
//! atom := int | "|s|" | "min" | "max" | "sum" | "(" rule ")"
//! ```
//!
//! Arithmetic is exact over the rationals; division by zero makes the rule false.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub};

use crate::error::{Error, Result};
use crate::finset::FinSet;

type Q = Ratio<i64>;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Int(i64),
    Size,
    Min,
    Max,
    Sum,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Cmp(&'static str, Box<Node>, Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Value {
    Num(Q),
    Bool(bool),
}

/// The quantities a rule can mention.
#[derive(Clone, Copy, Debug)]
pub struct Stats {
    pub size: u64,
    pub min: u64,
    pub max: u64,
    pub sum: u64,
}

impl Stats {
    pub fn of(s: &FinSet) -> Option<Stats> {
        Some(Stats {
            size: s.len() as u64,
            min: s.min()?,
            max: s.max()?,
            sum: s.sum(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct CardRule {
    text: String,
    root: Node,
}

impl CardRule {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let root = p.rule()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(Error::syntax(p.pos, format!("unexpected `{}`", &text[p.pos..])));
        }
        if !matches!(root, Node::Cmp(..) | Node::And(..) | Node::Or(..)) {
            return Err(Error::syntax(0, "a rule must be a comparison"));
        }
        Ok(CardRule {
            text: text.to_string(),
            root,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn uses_max(&self) -> bool {
        mentions(&self.root, &|n| matches!(n, Node::Max))
    }

    pub fn uses_sum(&self) -> bool {
        mentions(&self.root, &|n| matches!(n, Node::Sum))
    }

    pub fn eval(&self, stats: Stats) -> bool {
        matches!(eval(&self.root, &stats), Some(Value::Bool(true)))
    }

    /// Whether the nonempty set `s` satisfies the rule.
    pub fn holds(&self, s: &FinSet) -> bool {
        Stats::of(s).is_some_and(|st| self.eval(st))
    }
}

fn mentions(n: &Node, f: &dyn Fn(&Node) -> bool) -> bool {
    if f(n) {
        return true;
    }
    match n {
        Node::Neg(a) => mentions(a, f),
        Node::Bin(_, a, b) | Node::Cmp(_, a, b) | Node::And(a, b) | Node::Or(a, b) => mentions(a, f) || mentions(b, f),
        _ => false,
    }
}

fn eval(n: &Node, st: &Stats) -> Option<Value> {
    use Value::*;
    let num = |x: u64| Some(Num(Q::from_integer(x as i64)));
    match n {
        Node::Int(v) => Some(Num(Q::from_integer(*v))),
        Node::Size => num(st.size),
        Node::Min => num(st.min),
        Node::Max => num(st.max),
        Node::Sum => num(st.sum),
        Node::Neg(a) => match eval(a, st)? {
            Num(x) => Some(Num(-x)),
            Bool(_) => None,
        },
        Node::Bin(op, a, b) => {
            let (Num(x), Num(y)) = (eval(a, st)?, eval(b, st)?) else {
                return None;
            };
            match op {
                '+' => x.checked_add(&y).map(Num),
                '-' => x.checked_sub(&y).map(Num),
                '*' => x.checked_mul(&y).map(Num),
                '/' if *y.numer() == 0 => None,
                '/' => x.checked_div(&y).map(Num),
                '%' if !x.is_integer() || !y.is_integer() || *y.numer() == 0 => None,
                '%' => Some(Num(Q::from_integer(x.to_integer().rem_euclid(y.to_integer())))),
                _ => None,
            }
        }
        Node::Cmp(op, a, b) => {
            let (Num(x), Num(y)) = (eval(a, st)?, eval(b, st)?) else {
                return None;
            };
            Some(Bool(match *op {
                "==" => x == y,
                "!=" => x != y,
                "<=" => x <= y,
                "<" => x < y,
                ">=" => x >= y,
                ">" => x > y,
                _ => unreachable!(),
            }))
        }
        Node::And(a, b) => match (eval(a, st)?, eval(b, st)?) {
            (Bool(x), Bool(y)) => Some(Bool(x && y)),
            _ => None,
        },
        Node::Or(a, b) => match (eval(a, st), eval(b, st)) {
            (Some(Bool(true)), _) | (_, Some(Bool(true))) => Some(Bool(true)),
            (Some(Bool(false)), Some(Bool(false))) => Some(Bool(false)),
            _ => None,
        },
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn rule(&mut self) -> Result<Node> {
        let mut acc = self.conj()?;
        while self.eat("||") {
            acc = Node::Or(Box::new(acc), Box::new(self.conj()?));
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Node> {
        let mut acc = self.cmp()?;
        while self.eat("&&") {
            acc = Node::And(Box::new(acc), Box::new(self.cmp()?));
        }
        Ok(acc)
    }

    fn cmp(&mut self) -> Result<Node> {
        let lhs = self.sum()?;
        for op in ["==", "!=", "<=", ">=", "<", ">"] {
            if self.eat(op) {
                return Ok(Node::Cmp(op, Box::new(lhs), Box::new(self.sum()?)));
            }
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Node> {
        let mut acc = self.prod()?;
        loop {
            if self.eat("+") {
                acc = Node::Bin('+', Box::new(acc), Box::new(self.prod()?));
            } else if self.eat("-") {
                acc = Node::Bin('-', Box::new(acc), Box::new(self.prod()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn prod(&mut self) -> Result<Node> {
        let mut acc = self.unary()?;
        loop {
            let op = ['*', '/', '%'].into_iter().find(|c| self.eat(&c.to_string()));
            match op {
                Some(c) => acc = Node::Bin(c, Box::new(acc), Box::new(self.unary()?)),
                None => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat("-") {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node> {
        self.skip_ws();
        let start = self.pos;
        if self.eat("|s|") {
            return Ok(Node::Size);
        }
        for (kw, node) in [("min", Node::Min), ("max", Node::Max), ("sum", Node::Sum)] {
            if self.eat(kw) {
                return Ok(node);
            }
        }
        if self.eat("(") {
            let inner = self.rule()?;
            if !self.eat(")") {
                return Err(Error::syntax(self.pos, "expected `)`"));
            }
            return Ok(inner);
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::syntax(
                start,
                "expected a number, `|s|`, `min`, `max`, `sum` or `(`",
            ));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map(Node::Int)
            .map_err(|_| Error::syntax(start, "number out of range"))
    }
}

/// Elements allowed in members, as a membership test on integers.
pub type Allowed<'a> = &'a (dyn Fn(u64) -> bool + Sync);

fn count_allowed(allowed: Allowed, lo: u64, hi: u64) -> u64 {
    if lo > hi {
        0
    } else {
        (lo..=hi).filter(|&x| allowed(x)).count() as u64
    }
}

/// Whether some member `s ⊇ t` exists, with all elements allowed and, when the
/// rule mentions `max`, `max s ≤ max t + horizon`. Rules mentioning `sum`
/// are not handled here (returns `None`).
pub fn superset_exists(rule: &CardRule, t: &FinSet, allowed: Allowed, horizon: u64) -> Option<bool> {
    if rule.uses_sum() {
        return None;
    }
    if !t.iter().all(allowed) {
        return Some(false);
    }
    let (lo, hi) = match (t.min(), t.max()) {
        (Some(a), Some(b)) => (a, b),
        _ => (u64::MAX, 0),
    };
    let bound = hi.max(1) + horizon;
    for m in (1..=lo.min(bound)).filter(|&m| allowed(m)) {
        let base = t.with(m);
        let top_range: Vec<u64> = if rule.uses_max() {
            (base.max().unwrap()..=bound).filter(|&x| allowed(x)).collect()
        } else {
            vec![u64::MAX]
        };
        for top in top_range {
            let with_top = if top == u64::MAX { base.clone() } else { base.with(top) };
            let room = if top == u64::MAX {
                bound
            } else {
                count_allowed(allowed, m, top)
            };
            for k in with_top.len() as u64..=room.min(bound) {
                let st = Stats {
                    size: k,
                    min: m,
                    max: if top == u64::MAX { bound } else { top },
                    sum: 0,
                };
                if rule.eval(st) {
                    return Some(true);
                }
            }
        }
    }
    Some(false)
}

/// Whether `t` is an initial segment of a member: some member keeps `min t`
/// and only adds allowed elements above `max t` (within `max t + horizon`).
pub fn extension_exists(rule: &CardRule, t: &FinSet, allowed: Allowed, horizon: u64) -> Option<bool> {
    if rule.uses_sum() {
        return None;
    }
    let (Some(m), Some(hi)) = (t.min(), t.max()) else {
        return Some(true);
    };
    if !t.iter().all(allowed) {
        return Some(false);
    }
    let bound = hi + horizon;
    if !rule.uses_max() {
        let fits = (0..=horizon).any(|extra| {
            rule.eval(Stats {
                size: t.len() as u64 + extra,
                min: m,
                max: hi,
                sum: 0,
            })
        });
        return Some(fits);
    }
    for top in std::iter::once(hi).chain((hi + 1..=bound).filter(|&x| allowed(x))) {
        let (extra_min, extra_max) = if top == hi {
            (0, 0)
        } else {
            (1, count_allowed(allowed, hi + 1, top))
        };
        for extra in extra_min..=extra_max {
            let st = Stats {
                size: t.len() as u64 + extra,
                min: m,
                max: top,
                sum: 0,
            };
            if rule.eval(st) {
                return Some(true);
            }
        }
    }
    Some(false)
}
