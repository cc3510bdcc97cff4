use std::fmt;

use thiserror::Error;

use super::ast::*;
use super::lexer::{lex, Tok, Token};

/// Leading words of FRET scope clauses, which this subset rejects.
const SCOPE_WORDS: &[&str] = &["in", "during", "before", "after", "only", "notin", "upon", "while"];

/// FRET timing words other than `until`.
const TIMING_WORDS: &[&str] = &[
    "within",
    "for",
    "after",
    "before",
    "eventually",
    "always",
    "never",
    "immediately",
    "at",
    "next",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// Tokens that would have been accepted here, if known.
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek() {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error(format!("unexpected {}", self.peek()), expected)
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ParseError> {
        if self.peek_word() == Some(word) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("'{word}'")]))
        }
    }

    fn requirement(&mut self) -> Result<Requirement, ParseError> {
        if let Some(w) = self.peek_word() {
            if SCOPE_WORDS.contains(&w) {
                return Err(self.error(format!("scope clause '{w}' is not supported"), &[]));
            }
        }
        let mut clauses = Vec::new();
        while matches!(self.peek_word(), Some("when" | "if")) {
            if clauses.len() == 2 {
                return Err(self.error("at most two condition clauses are allowed", &["component name"]));
            }
            self.bump();
            clauses.push(self.expr()?);
        }
        let component = match self.peek() {
            Tok::Ident(s) if s != "shall" => s.clone(),
            _ => return Err(self.unexpected(&["component name", "'when'", "'if'"])),
        };
        self.bump();
        self.expect_word("shall")?;
        let timing = match self.peek_word() {
            Some("until") => {
                self.bump();
                Some(Timing::Until(self.expr()?))
            }
            Some(w) if TIMING_WORDS.contains(&w) => {
                return Err(self.error(format!("timing '{w}' is not supported; only 'until' is"), &[]))
            }
            _ => None,
        };
        if *self.peek() == Tok::Eof {
            return Err(self.error("empty response", &["expression"]));
        }
        let response = self.expr()?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected(&["operator", "end of input"]));
        }
        let mut condition = Condition::default();
        let mut clauses = clauses.into_iter();
        match (clauses.next(), clauses.next()) {
            (Some(only), None) => condition.if_clause = Some(only),
            (Some(first), Some(second)) => {
                condition.when_clause = Some(first);
                condition.if_clause = Some(second);
            }
            _ => {}
        }
        Ok(Requirement {
            id: String::new(),
            parents: Vec::new(),
            depends: Vec::new(),
            condition,
            component,
            timing,
            response,
            rationale: String::new(),
        })
    }

    /// `=>` binds loosest and associates to the right.
    fn expr(&mut self) -> Result<BoolExpr, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::FatArrow {
            self.bump();
            let rhs = self.expr()?;
            return Ok(BoolExpr::or(BoolExpr::not(lhs), rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<BoolExpr, ParseError> {
        let mut e = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            e = BoolExpr::or(e, self.conjunction()?);
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> Result<BoolExpr, ParseError> {
        let mut e = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            e = BoolExpr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<BoolExpr, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(BoolExpr::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<BoolExpr, ParseError> {
        let save = self.pos;
        if let Ok(lhs) = self.arith() {
            if let Some(op) = self.cmp_op() {
                self.bump();
                let rhs = self.arith()?;
                return Ok(BoolExpr::Atom(Atom::Comparison { lhs, op, rhs }));
            }
        }
        self.pos = save;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                match self.peek() {
                    Tok::RParen => {
                        self.bump();
                        Ok(e)
                    }
                    Tok::Eof => Err(self.error("unbalanced parentheses", &["')'"])),
                    _ => Err(self.unexpected(&["')'", "operator"])),
                }
            }
            Tok::Ident(name) => {
                if name == "true" || name == "false" {
                    return Err(self.error(
                        format!("'{name}' may only appear as a comparison operand"),
                        &[],
                    ));
                }
                if matches!(name.as_str(), "when" | "if" | "shall" | "until" | "null") {
                    return Err(self.unexpected(&["expression"]));
                }
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.pos -= 1;
                    return Err(self.error(
                        format!("function application '{name}(...)' must be compared"),
                        &["comparison operator"],
                    ));
                }
                Ok(BoolExpr::Atom(if is_reference_name(&name) {
                    Atom::Reference(name)
                } else {
                    Atom::BooleanVar(name)
                }))
            }
            Tok::RParen => Err(self.error("unbalanced parentheses", &["expression"])),
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        Some(match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            _ => return None,
        })
    }

    fn arith(&mut self) -> Result<ArithExpr, ParseError> {
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            e = ArithExpr::Bin(op, Box::new(e), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<ArithExpr, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(ArithExpr::Num(n))
            }
            Tok::Minus => {
                self.bump();
                match self.bump() {
                    Tok::Num(n) => Ok(ArithExpr::Num(format!("-{n}"))),
                    _ => Err(self.error("'-' must precede a number here", &["number"])),
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.arith()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["')'"]));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "null" => return Ok(ArithExpr::Null),
                    "true" => return Ok(ArithExpr::Bool(true)),
                    "false" => return Ok(ArithExpr::Bool(false)),
                    _ => {}
                }
                if *self.peek() != Tok::LParen {
                    return Ok(ArithExpr::Var(name));
                }
                self.bump();
                let mut args = vec![self.arith()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.arith()?);
                }
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["','", "')'"]));
                }
                self.bump();
                Ok(ArithExpr::Call(name, args))
            }
            _ => Err(self.unexpected(&["arithmetic operand"])),
        }
    }
}

/// Parses one requirement: `[when E] [if E] COMPONENT shall [until E] RESPONSE`.
///
/// `when` and `if` are interchangeable. A lone clause is stored as the if
/// clause; with two clauses the first is the when clause. The returned
/// requirement has an empty id and no links.
pub fn parse_requirement(text: &str) -> Result<Requirement, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    p.requirement()
}

/// Parses a standalone boolean expression.
pub fn parse_expr(text: &str) -> Result<BoolExpr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}
