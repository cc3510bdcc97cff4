//! Text syntax for formulas.
//!
//! ```text
//! implies  := or ( "->" implies )?
//! or       := and ( "|" and )*
//! and      := temporal ( "&" temporal )*
//! temporal := unary ( ("U" | "W" | "R") temporal )?
//! unary    := ("!" | "X" | "G" | "F") unary | atom
//! atom     := "true" | "false" | IDENT | "\"" QUOTED "\"" | "(" implies ")"
//! ```
//!
//! `->`, `U`, `W` and `R` associate to the right; `&` and `|` to the left.

use std::str::FromStr;

use thiserror::Error;

use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula syntax error at offset {offset}: {message}")]
pub struct FormulaParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    LParen,
    RParen,
    Not,
    And,
    Or,
    Arrow,
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, FormulaParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '!' => out.push((start, Tok::Not)),
            '&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    i += 1;
                }
                out.push((start, Tok::And));
            }
            '|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    i += 1;
                }
                out.push((start, Tok::Or));
            }
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                out.push((start, Tok::Arrow));
            }
            '"' => {
                let mut name = String::new();
                i += 1;
                loop {
                    match input[i..].chars().next() {
                        None => {
                            return Err(FormulaParseError {
                                offset: start,
                                message: "unterminated quoted proposition".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\\') => {
                            let escaped = input[i + 1..].chars().next().ok_or(FormulaParseError {
                                offset: i,
                                message: "dangling escape".into(),
                            })?;
                            name.push(escaped);
                            i += 1 + escaped.len_utf8();
                        }
                        Some(ch) => {
                            name.push(ch);
                            i += ch.len_utf8();
                        }
                    }
                }
                out.push((start, Tok::Quoted(name)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'.')
                {
                    j += 1;
                }
                out.push((start, Tok::Ident(input[i..j].to_string())));
                i = j;
                continue;
            }
            other => {
                return Err(FormulaParseError {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> FormulaParseError {
        FormulaParseError {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn implies(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.temporal()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.temporal()?);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.unary()?;
        for (kw, build) in [
            ("U", Formula::until as fn(Formula, Formula) -> Formula),
            ("W", Formula::weak_until),
            ("R", Formula::release),
        ] {
            if self.peek_keyword(kw) {
                self.pos += 1;
                let rhs = self.temporal()?;
                return Ok(build(lhs, rhs));
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaParseError> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(Formula::not(self.unary()?));
        }
        for (kw, build) in [
            ("X", Formula::next as fn(Formula) -> Formula),
            ("G", Formula::globally),
            ("F", Formula::finally),
        ] {
            if self.peek_keyword(kw) {
                self.pos += 1;
                return Ok(build(self.unary()?));
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, FormulaParseError> {
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.implies()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Tok::Quoted(name)) => {
                self.pos += 1;
                Ok(Formula::Prop(name))
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => {
                    self.pos += 1;
                    Ok(Formula::True)
                }
                "false" => {
                    self.pos += 1;
                    Ok(Formula::False)
                }
                "U" | "W" | "R" => Err(self.error(format!("binary operator `{name}` needs a left operand"))),
                _ => {
                    self.pos += 1;
                    Ok(Formula::Prop(name))
                }
            },
            Some(other) => Err(self.error(format!("unexpected token {other:?}"))),
            None => Err(self.error("unexpected end of formula")),
        }
    }
}

impl FromStr for Formula {
    type Err = FormulaParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser {
            toks: lex(s)?,
            pos: 0,
            end: s.len(),
        };
        let f = parser.implies()?;
        if parser.pos != parser.toks.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("a | b & c"),
            Formula::or(Formula::prop("a"), Formula::and(Formula::prop("b"), Formula::prop("c")))
        );
        assert_eq!(
            parse("a -> b -> c"),
            Formula::implies(
                Formula::prop("a"),
                Formula::implies(Formula::prop("b"), Formula::prop("c"))
            )
        );
        assert_eq!(
            parse("a U b U c"),
            Formula::until(
                Formula::prop("a"),
                Formula::until(Formula::prop("b"), Formula::prop("c"))
            )
        );
        assert_eq!(
            parse("G F p & q"),
            Formula::and(
                Formula::globally(Formula::finally(Formula::prop("p"))),
                Formula::prop("q")
            )
        );
    }

    #[test]
    fn display_reparses() {
        for s in [
            "G (a1 & a2 -> a3)",
            "G (c -> (r & s) W stop)",
            "!(p U q) R X \"G\"",
            "(a -> b) -> c",
            "a & (b & c)",
            "(a U b) U c",
        ] {
            let f = parse(s);
            assert_eq!(parse(&f.to_string()), f, "{s}");
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!("G (a".parse::<Formula>().is_err());
        assert!("a b".parse::<Formula>().is_err());
        assert!("U a".parse::<Formula>().is_err());
        assert!("a $ b".parse::<Formula>().is_err());
    }
}
