use std::collections::BTreeSet;
use std::fmt;

/// A future-time LTL formula.
///
/// `WeakUntil`, `Globally` and `Finally` are first-class so that translated
/// requirements print the way they were written; [`crate::nnf::to_core`]
/// rewrites them into the `Until`/`Release` core used by the tableau.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    WeakUntil(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Globally(Box<Formula>),
    Finally(Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn weak_until(a: Formula, b: Formula) -> Self {
        Formula::WeakUntil(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn finally(f: Formula) -> Self {
        Formula::Finally(Box::new(f))
    }

    /// Left-nested conjunction of `parts`; `true` when empty.
    pub fn and_all<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => 1,
            Formula::Not(a) | Formula::Next(a) | Formula::Globally(a) | Formula::Finally(a) => {
                1 + a.size()
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::WeakUntil(a, b)
            | Formula::Release(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Prop(p) => {
                out.insert(p.clone());
            }
            Formula::Not(a) | Formula::Next(a) | Formula::Globally(a) | Formula::Finally(a) => {
                a.collect_props(out)
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::WeakUntil(a, b)
            | Formula::Release(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }

    /// Replaces every proposition `p` with `f(p)`.
    pub fn map_props(&self, f: &impl Fn(&str) -> Formula) -> Formula {
        let un = |a: &Formula| Box::new(a.map_props(f));
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Prop(p) => f(p),
            Formula::Not(a) => Formula::Not(un(a)),
            Formula::Next(a) => Formula::Next(un(a)),
            Formula::Globally(a) => Formula::Globally(un(a)),
            Formula::Finally(a) => Formula::Finally(un(a)),
            Formula::And(a, b) => Formula::And(un(a), un(b)),
            Formula::Or(a, b) => Formula::Or(un(a), un(b)),
            Formula::Implies(a, b) => Formula::Implies(un(a), un(b)),
            Formula::Until(a, b) => Formula::Until(un(a), un(b)),
            Formula::WeakUntil(a, b) => Formula::WeakUntil(un(a), un(b)),
            Formula::Release(a, b) => Formula::Release(un(a), un(b)),
        }
    }

    /// Renames propositions, leaving the structure untouched.
    pub fn rename_props(&self, rename: &impl Fn(&str) -> String) -> Formula {
        self.map_props(&|p| Formula::Prop(rename(p)))
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Until(..) | Formula::WeakUntil(..) | Formula::Release(..) => 4,
            Formula::Not(_) | Formula::Next(_) | Formula::Globally(_) | Formula::Finally(_) => 5,
            Formula::True | Formula::False | Formula::Prop(_) => 6,
        }
    }
}

const KEYWORDS: [&str; 8] = ["true", "false", "X", "G", "F", "U", "W", "R"];

/// Whether `name` can be written bare in the text syntax.
pub(crate) fn is_plain_prop(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
        && !KEYWORDS.contains(&name)
}

fn write_prop(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_plain_prop(name) {
        f.write_str(name)
    } else {
        write!(f, "\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, sub: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({sub})")
    } else {
        write!(f, "{sub}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Prop(p) => write_prop(f, p),
            Formula::Not(a) => {
                f.write_str("!")?;
                write_operand(f, a, a.precedence() < prec)
            }
            Formula::Next(a) | Formula::Globally(a) | Formula::Finally(a) => {
                let op = match self {
                    Formula::Next(_) => "X",
                    Formula::Globally(_) => "G",
                    _ => "F",
                };
                write!(f, "{op} ")?;
                write_operand(f, a, a.precedence() < prec)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let op = if matches!(self, Formula::And(..)) { "&" } else { "|" };
                write_operand(f, a, a.precedence() < prec)?;
                write!(f, " {op} ")?;
                write_operand(f, b, b.precedence() <= prec)
            }
            Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::WeakUntil(a, b)
            | Formula::Release(a, b) => {
                let op = match self {
                    Formula::Implies(..) => "->",
                    Formula::Until(..) => "U",
                    Formula::WeakUntil(..) => "W",
                    _ => "R",
                };
                // right-associative
                write_operand(f, a, a.precedence() <= prec)?;
                write!(f, " {op} ")?;
                write_operand(f, b, b.precedence() < prec)
            }
        }
    }
}
