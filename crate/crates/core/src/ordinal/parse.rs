use super::Ordinal;
use crate::error::{Error, Result};

/// Parses the textual ordinal grammar:
///
/// ```text
/// ord  := term ("+" term)*
/// term := nat | "w" ("^" atom)? ("*" nat)?
/// atom := nat | "w" | "(" ord ")"
/// ```
///
/// Whitespace is ignored. The sum is normalized, so `"w+w^2"` parses to `w^2`.
pub fn parse_ordinal(text: &str) -> Result<Ordinal> {
    let mut p = Parser {
        chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
        pos: 0,
        len: text.len(),
    };
    if p.chars.is_empty() {
        return Err(Error::syntax(0, "empty ordinal"));
    }
    let value = p.ord()?;
    if let Some(&(at, c)) = p.chars.get(p.pos) {
        return Err(Error::syntax(at, format!("unexpected `{c}`")));
    }
    Ok(value)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ord(&mut self) -> Result<Ordinal> {
        let mut acc = self.term()?;
        while self.eat('+') {
            acc = acc.add(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::finite(self.nat()?)),
            Some('w') | Some('ω') => {
                self.pos += 1;
                let exponent = if self.eat('^') { self.atom()? } else { Ordinal::one() };
                let coefficient = if self.eat('*') {
                    let at = self.offset();
                    let n = self.nat()?;
                    if n == 0 {
                        return Err(Error::syntax(at, "coefficient must be positive"));
                    }
                    n
                } else {
                    1
                };
                Ok(Ordinal::omega_pow_times(exponent, coefficient))
            }
            Some(c) => Err(Error::syntax(self.offset(), format!("unexpected `{c}`"))),
            None => Err(Error::syntax(self.offset(), "unexpected end of input")),
        }
    }

    fn atom(&mut self) -> Result<Ordinal> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::finite(self.nat()?)),
            Some('w') | Some('ω') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.ord()?;
                if !self.eat(')') {
                    return Err(Error::syntax(self.offset(), "expected `)`"));
                }
                Ok(inner)
            }
            Some(c) => Err(Error::syntax(self.offset(), format!("unexpected `{c}`"))),
            None => Err(Error::syntax(self.offset(), "unexpected end of input")),
        }
    }

    fn nat(&mut self) -> Result<u64> {
        let start = self.offset();
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.pos += 1;
        }
        if digits.is_empty() {
            return Err(Error::syntax(start, "expected a natural number"));
        }
        digits.parse().map_err(|_| Error::syntax(start, "number out of range"))
    }
}
