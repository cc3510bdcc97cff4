use std::fmt;

use serde::Serialize;

/// Arithmetic operand of a comparison. Function symbols are uninterpreted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum ArithExpr {
    /// Numeric literal, kept verbatim so rendering is lossless.
    Num(String),
    Null,
    /// `true`/`false` as a comparison operand (`birdStrike = true`).
    Bool(bool),
    Var(String),
    Call(String, Vec<ArithExpr>),
    Bin(ArithOp, Box<ArithExpr>, Box<ArithExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ArithOp {
    Add,
    Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Atom {
    BooleanVar(String),
    Comparison {
        lhs: ArithExpr,
        op: CmpOp,
        rhs: ArithExpr,
    },
    /// Another requirement, named by its all-caps id.
    Reference(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum BoolExpr {
    Atom(Atom),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(name: impl Into<String>) -> Self {
        BoolExpr::Atom(Atom::BooleanVar(name.into()))
    }

    pub fn reference(id: impl Into<String>) -> Self {
        BoolExpr::Atom(Atom::Reference(id.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn and_all<I: IntoIterator<Item = BoolExpr>>(parts: I) -> Option<Self> {
        parts.into_iter().reduce(BoolExpr::and)
    }

    pub fn size(&self) -> usize {
        match self {
            BoolExpr::Atom(_) => 1,
            BoolExpr::Not(a) => 1 + a.size(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Subtree at `path`, where each step picks child 0 (left/only) or 1.
    pub fn at(&self, path: &[usize]) -> Option<&BoolExpr> {
        let Some((&step, rest)) = path.split_first() else {
            return Some(self);
        };
        match (self, step) {
            (BoolExpr::Not(a), 0) | (BoolExpr::And(a, _), 0) | (BoolExpr::Or(a, _), 0) => a.at(rest),
            (BoolExpr::And(_, b), 1) | (BoolExpr::Or(_, b), 1) => b.at(rest),
            _ => None,
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut BoolExpr> {
        let Some((&step, rest)) = path.split_first() else {
            return Some(self);
        };
        match (self, step) {
            (BoolExpr::Not(a), 0) | (BoolExpr::And(a, _), 0) | (BoolExpr::Or(a, _), 0) => {
                a.at_mut(rest)
            }
            (BoolExpr::And(_, b), 1) | (BoolExpr::Or(_, b), 1) => b.at_mut(rest),
            _ => None,
        }
    }

    /// Pre-order visit of every subtree with its path.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&[usize], &'a BoolExpr)) {
        fn go<'a>(
            e: &'a BoolExpr,
            path: &mut Vec<usize>,
            f: &mut impl FnMut(&[usize], &'a BoolExpr),
        ) {
            f(path, e);
            match e {
                BoolExpr::Atom(_) => {}
                BoolExpr::Not(a) => {
                    path.push(0);
                    go(a, path, f);
                    path.pop();
                }
                BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                    path.push(0);
                    go(a, path, f);
                    path.pop();
                    path.push(1);
                    go(b, path, f);
                    path.pop();
                }
            }
        }
        go(self, &mut Vec::new(), f)
    }

    /// Bottom-up rewrite of atoms.
    pub fn map_atoms<E>(
        &self,
        f: &mut impl FnMut(&Atom) -> Result<BoolExpr, E>,
    ) -> Result<BoolExpr, E> {
        Ok(match self {
            BoolExpr::Atom(a) => f(a)?,
            BoolExpr::Not(a) => BoolExpr::not(a.map_atoms(f)?),
            BoolExpr::And(a, b) => BoolExpr::and(a.map_atoms(f)?, b.map_atoms(f)?),
            BoolExpr::Or(a, b) => BoolExpr::or(a.map_atoms(f)?, b.map_atoms(f)?),
        })
    }

    /// Ids of every Reference atom, in left-to-right order, with repeats.
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |_, e| {
            if let BoolExpr::Atom(Atom::Reference(id)) = e {
                out.push(id.as_str());
            }
        });
        out
    }

    /// The conjuncts of a (possibly nested) conjunction, left to right.
    pub fn conjuncts(&self) -> Vec<&BoolExpr> {
        match self {
            BoolExpr::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            e => vec![e],
        }
    }
}

/// Stop condition of a timing clause. Only `until` is supported.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Timing {
    Until(BoolExpr),
}

impl Timing {
    pub fn stop(&self) -> &BoolExpr {
        match self {
            Timing::Until(e) => e,
        }
    }

    pub fn stop_mut(&mut self) -> &mut BoolExpr {
        match self {
            Timing::Until(e) => e,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Condition {
    pub when_clause: Option<BoolExpr>,
    pub if_clause: Option<BoolExpr>,
}

impl Condition {
    pub fn is_empty(&self) -> bool {
        self.when_clause.is_none() && self.if_clause.is_none()
    }

    /// `when ∧ if`, whichever are present.
    pub fn conjoined(&self) -> Option<BoolExpr> {
        BoolExpr::and_all(self.when_clause.iter().chain(&self.if_clause).cloned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Requirement {
    pub id: String,
    pub parents: Vec<String>,
    pub depends: Vec<String>,
    pub condition: Condition,
    pub component: String,
    pub timing: Option<Timing>,
    pub response: BoolExpr,
    pub rationale: String,
}

/// A requirement field that holds a boolean expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Field {
    WhenClause,
    IfClause,
    Timing,
    Response,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::WhenClause, Field::IfClause, Field::Timing, Field::Response];

    pub fn name(self) -> &'static str {
        match self {
            Field::WhenClause => "when",
            Field::IfClause => "if",
            Field::Timing => "until",
            Field::Response => "response",
        }
    }

    pub fn from_name(s: &str) -> Option<Field> {
        match s {
            "when" => Some(Field::WhenClause),
            "if" => Some(Field::IfClause),
            "until" | "timing" => Some(Field::Timing),
            "response" => Some(Field::Response),
            _ => None,
        }
    }

    pub fn is_condition(self) -> bool {
        matches!(self, Field::WhenClause | Field::IfClause)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Requirement {
    /// A requirement with only a response, for building sets in code.
    pub fn new(id: impl Into<String>, component: impl Into<String>, response: BoolExpr) -> Self {
        Requirement {
            id: id.into(),
            parents: Vec::new(),
            depends: Vec::new(),
            condition: Condition::default(),
            component: component.into(),
            timing: None,
            response,
            rationale: String::new(),
        }
    }

    pub fn field(&self, field: Field) -> Option<&BoolExpr> {
        match field {
            Field::WhenClause => self.condition.when_clause.as_ref(),
            Field::IfClause => self.condition.if_clause.as_ref(),
            Field::Timing => self.timing.as_ref().map(Timing::stop),
            Field::Response => Some(&self.response),
        }
    }

    pub fn field_mut(&mut self, field: Field) -> Option<&mut BoolExpr> {
        match field {
            Field::WhenClause => self.condition.when_clause.as_mut(),
            Field::IfClause => self.condition.if_clause.as_mut(),
            Field::Timing => self.timing.as_mut().map(Timing::stop_mut),
            Field::Response => Some(&mut self.response),
        }
    }

    /// Present expression fields in text order.
    pub fn fields(&self) -> impl Iterator<Item = (Field, &BoolExpr)> {
        Field::ALL
            .into_iter()
            .filter_map(move |f| self.field(f).map(|e| (f, e)))
    }

    pub fn fields_mut(&mut self) -> Vec<(Field, &mut BoolExpr)> {
        let mut out = Vec::new();
        if let Some(e) = self.condition.when_clause.as_mut() {
            out.push((Field::WhenClause, e));
        }
        if let Some(e) = self.condition.if_clause.as_mut() {
            out.push((Field::IfClause, e));
        }
        if let Some(t) = self.timing.as_mut() {
            out.push((Field::Timing, t.stop_mut()));
        }
        out.push((Field::Response, &mut self.response));
        out
    }

    /// Every Reference id in the requirement body, deduplicated, in order.
    pub fn references(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (_, e) in self.fields() {
            for r in e.references() {
                if !out.iter().any(|o| o == r) {
                    out.push(r.to_string());
                }
            }
        }
        out
    }

    /// Whether the body (condition, component, timing, response) matches.
    pub fn same_body(&self, other: &Requirement) -> bool {
        self.condition == other.condition
            && self.component == other.component
            && self.timing == other.timing
            && self.response == other.response
    }
}

/// All-caps identifiers (letters, digits, underscores, at least one letter)
/// name other requirements.
pub fn is_reference_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && s.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}
