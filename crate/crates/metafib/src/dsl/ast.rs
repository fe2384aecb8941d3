//! Syntax tree for recurrence definitions.

use std::fmt;

/// An index expression: the argument language of a recurrence rule.
///
/// `Call` is a self-call of the sequence being defined (there is exactly one
/// sequence per spec, so the callee needs no name here).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IndexExpr {
    /// The free index variable `n`.
    N,
    /// Nonnegative integer literal.
    Int(u64),
    /// The golden ratio φ = (1+√5)/2.
    Phi,
    Add(Box<IndexExpr>, Box<IndexExpr>),
    Sub(Box<IndexExpr>, Box<IndexExpr>),
    Mul(Box<IndexExpr>, Box<IndexExpr>),
    /// `floor(a / b)`.
    FloorDiv(Box<IndexExpr>, Box<IndexExpr>),
    /// `ceil(a / b)`.
    CeilDiv(Box<IndexExpr>, Box<IndexExpr>),
    /// `floor(a)`.
    Floor(Box<IndexExpr>),
    /// `ceil(a)`.
    Ceil(Box<IndexExpr>),
    /// Self-call `A(a)`.
    Call(Box<IndexExpr>),
}

// The builder names mirror the expression grammar (`add`, `sub`, `mul` next
// to `floor_div`, `ceil`, `call`); they are not meant as the std operator
// traits, which could cover only three of the eight forms.
#[allow(clippy::should_implement_trait)]
impl IndexExpr {
    pub fn n() -> IndexExpr {
        IndexExpr::N
    }

    pub fn int(v: u64) -> IndexExpr {
        IndexExpr::Int(v)
    }

    pub fn phi() -> IndexExpr {
        IndexExpr::Phi
    }

    pub fn add(self, rhs: IndexExpr) -> IndexExpr {
        IndexExpr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: IndexExpr) -> IndexExpr {
        IndexExpr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: IndexExpr) -> IndexExpr {
        IndexExpr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn floor_div(self, rhs: IndexExpr) -> IndexExpr {
        IndexExpr::FloorDiv(Box::new(self), Box::new(rhs))
    }

    pub fn ceil_div(self, rhs: IndexExpr) -> IndexExpr {
        IndexExpr::CeilDiv(Box::new(self), Box::new(rhs))
    }

    pub fn floor(self) -> IndexExpr {
        IndexExpr::Floor(Box::new(self))
    }

    pub fn ceil(self) -> IndexExpr {
        IndexExpr::Ceil(Box::new(self))
    }

    /// Wraps the expression in a self-call: `A(self)`.
    pub fn call(self) -> IndexExpr {
        IndexExpr::Call(Box::new(self))
    }

    /// Visits every node of the tree, outermost first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a IndexExpr)) {
        f(self);
        match self {
            IndexExpr::N | IndexExpr::Int(_) | IndexExpr::Phi => {}
            IndexExpr::Add(a, b)
            | IndexExpr::Sub(a, b)
            | IndexExpr::Mul(a, b)
            | IndexExpr::FloorDiv(a, b)
            | IndexExpr::CeilDiv(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            IndexExpr::Floor(a) | IndexExpr::Ceil(a) | IndexExpr::Call(a) => a.walk(f),
        }
    }

    /// True if any self-call appears in the tree.
    pub fn contains_call(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if matches!(e, IndexExpr::Call(_)) {
                found = true;
            }
        });
        found
    }

    fn precedence(&self) -> u8 {
        match self {
            IndexExpr::Add(..) | IndexExpr::Sub(..) => 1,
            IndexExpr::Mul(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            IndexExpr::N => write!(f, "n")?,
            IndexExpr::Int(v) => write!(f, "{v}")?,
            IndexExpr::Phi => write!(f, "phi")?,
            IndexExpr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, "+")?;
                // right operand needs extra binding so a-(b+c) round-trips
                b.fmt_prec(f, 2)?;
            }
            IndexExpr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, "-")?;
                b.fmt_prec(f, 2)?;
            }
            IndexExpr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            IndexExpr::FloorDiv(a, b) => {
                write!(f, "floor(")?;
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
                write!(f, ")")?;
            }
            IndexExpr::CeilDiv(a, b) => {
                write!(f, "ceil(")?;
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
                write!(f, ")")?;
            }
            IndexExpr::Floor(a) => {
                write!(f, "floor(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            IndexExpr::Ceil(a) => {
                write!(f, "ceil(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            IndexExpr::Call(a) => {
                write!(f, "A(")?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Sign of one right-hand-side summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One summand `± A(argument)` of a recurrence right-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Summand {
    pub sign: Sign,
    pub argument: IndexExpr,
}

/// Initial-condition pattern: either a closed form in `n` (no self-calls)
/// or an explicit list of values for indices `1..=start_after`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitPattern {
    ClosedForm(IndexExpr),
    List(Vec<u64>),
}

/// A parsed (not yet validated) recurrence definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceSpec {
    /// Sequence name as written; normalized to `"A"` on validation.
    pub name: String,
    /// Right-hand-side summands, in source order. Never empty.
    pub summands: Vec<Summand>,
    pub init: InitPattern,
    /// The recurrence applies for `n > start_after`.
    pub start_after: u64,
}

impl fmt::Display for RecurrenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n)=", self.name)?;
        for (i, s) in self.summands.iter().enumerate() {
            match (i, s.sign) {
                (0, Sign::Plus) => {}
                (0, Sign::Minus) => write!(f, "-")?,
                (_, Sign::Plus) => write!(f, "+")?,
                (_, Sign::Minus) => write!(f, "-")?,
            }
            write!(f, "{}(", self.name)?;
            s.argument.fmt_prec(f, 0)?;
            write!(f, ")")?;
        }
        write!(f, "; init ")?;
        match &self.init {
            InitPattern::ClosedForm(e) => write!(f, "{e}")?,
            InitPattern::List(vs) => {
                write!(f, "list ")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
            }
        }
        write!(f, "; start {}", self.start_after)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_uses_minimal_parens() {
        let e = IndexExpr::n().sub(IndexExpr::n().sub(IndexExpr::int(1)).call());
        assert_eq!(e.to_string(), "n-A(n-1)");

        // right-nested subtraction needs parens to survive a round trip
        let e = IndexExpr::n().sub(IndexExpr::int(1).add(IndexExpr::int(2)));
        assert_eq!(e.to_string(), "n-(1+2)");

        let e = IndexExpr::int(2).mul(IndexExpr::n().add(IndexExpr::int(1)));
        assert_eq!(e.to_string(), "2*(n+1)");
    }

    #[test]
    fn display_floor_div_parenthesizes_additive_operands() {
        let e = IndexExpr::n()
            .add(IndexExpr::int(2))
            .floor_div(IndexExpr::int(1).add(IndexExpr::phi()));
        assert_eq!(e.to_string(), "floor((n+2)/(1+phi))");

        let e = IndexExpr::n().ceil_div(IndexExpr::int(2));
        assert_eq!(e.to_string(), "ceil(n/2)");
    }

    #[test]
    fn spec_display_is_one_line() {
        let spec = RecurrenceSpec {
            name: "A".into(),
            summands: vec![
                Summand {
                    sign: Sign::Plus,
                    argument: IndexExpr::n().sub(IndexExpr::n().sub(IndexExpr::int(1)).call()),
                },
                Summand {
                    sign: Sign::Plus,
                    argument: IndexExpr::n().sub(IndexExpr::n().sub(IndexExpr::int(2)).call()),
                },
            ],
            init: InitPattern::ClosedForm(IndexExpr::n().ceil_div(IndexExpr::int(2))),
            start_after: 2,
        };
        assert_eq!(
            spec.to_string(),
            "A(n)=A(n-A(n-1))+A(n-A(n-2)); init ceil(n/2); start 2"
        );
    }
}
