//! Recursive-descent parser for the rule language.
//!
//! Grammar (whitespace-insensitive; `INT` is a nonnegative decimal):
//!
//! ```text
//! spec  := rule ";" "init" init ";" "start" INT
//! rule  := NAME "(" "n" ")" "=" ["+"|"-"] call { ("+"|"-") call }
//! call  := NAME "(" expr ")"
//! expr  := term { ("+"|"-") term }
//! term  := atom { "*" atom }
//! atom  := "n" | INT | "phi" | call | "(" expr ")"
//!        | ("floor"|"ceil") "(" expr [ "/" expr ] ")"
//! init  := "list" INT { "," INT } | expr        -- no calls inside
//! ```
//!
//! Grouping parentheses and the one-argument floor/ceil forms are accepted so
//! that every tree expressible through [`IndexExpr`]'s builder methods has a
//! parseable rendering; the canonical printer only emits them where needed.

use std::fmt;

use super::ast::{IndexExpr, InitPattern, RecurrenceSpec, Sign, Summand};

/// Identifiers with fixed meaning; a sequence may not be named after them.
const RESERVED: [&str; 7] = ["n", "phi", "floor", "ceil", "init", "start", "list"];

/// A syntax error, pointing at the byte offset where parsing failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Eq,
    Semi,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(v) => format!("'{v}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eq => "'='".into(),
            Tok::Semi => "';'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = pos;
            while let Some(&(p, d)) = it.peek() {
                if d.is_ascii_digit() {
                    end = p + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            let text = &src[pos..end];
            let v: u64 = text
                .parse()
                .map_err(|_| ParseError::new(pos, format!("integer literal '{text}' too large")))?;
            out.push(Token {
                tok: Tok::Int(v),
                pos,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = pos;
            while let Some(&(p, d)) = it.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    end = p + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(src[pos..end].to_string()),
                pos,
            });
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' => Tok::Eq,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            other => {
                return Err(ParseError::new(
                    pos,
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        it.next();
        out.push(Token { tok, pos });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    /// Byte length of the source; errors at end-of-input point here.
    end: usize,
    /// Sequence name from the rule head; self-calls must use it.
    name: String,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.pos)
    }

    fn err_expected(&self, what: &str) -> ParseError {
        let found = match self.peek() {
            Some(t) => t.describe(),
            None => "end of input".into(),
        };
        ParseError::new(self.pos(), format!("expected {what}, found {found}"))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err_expected(what))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.i += 1;
                Ok(())
            }
            _ => Err(self.err_expected(&format!("'{kw}'"))),
        }
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn expect_int(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek() {
            Some(&Tok::Int(v)) => {
                self.i += 1;
                Ok(v)
            }
            _ => Err(self.err_expected(what)),
        }
    }

    fn eat_sign(&mut self) -> Option<Sign> {
        match self.peek() {
            Some(Tok::Plus) => {
                self.i += 1;
                Some(Sign::Plus)
            }
            Some(Tok::Minus) => {
                self.i += 1;
                Some(Sign::Minus)
            }
            _ => None,
        }
    }

    /// `NAME "(" expr ")"`, returning the inner argument.
    fn call_argument(&mut self) -> Result<IndexExpr, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == self.name => {
                self.i += 1;
            }
            Some(Tok::Ident(s)) => {
                return Err(ParseError::new(
                    pos,
                    format!("unknown sequence name '{s}' (rule defines '{}')", self.name),
                ))
            }
            _ => return Err(self.err_expected(&format!("'{}'", self.name))),
        }
        self.expect(Tok::LParen, "'('")?;
        let arg = self.expr(true)?;
        self.expect(Tok::RParen, "')'")?;
        Ok(arg)
    }

    fn expr(&mut self, allow_call: bool) -> Result<IndexExpr, ParseError> {
        let mut e = self.term(allow_call)?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.i += 1;
                    e = e.add(self.term(allow_call)?);
                }
                Some(Tok::Minus) => {
                    self.i += 1;
                    e = e.sub(self.term(allow_call)?);
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self, allow_call: bool) -> Result<IndexExpr, ParseError> {
        let mut e = self.atom(allow_call)?;
        while self.peek() == Some(&Tok::Star) {
            self.i += 1;
            e = e.mul(self.atom(allow_call)?);
        }
        Ok(e)
    }

    fn atom(&mut self, allow_call: bool) -> Result<IndexExpr, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.i += 1;
                Ok(IndexExpr::Int(v))
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let e = self.expr(allow_call)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(s)) => match s.as_str() {
                "n" => {
                    self.i += 1;
                    Ok(IndexExpr::N)
                }
                "phi" => {
                    self.i += 1;
                    Ok(IndexExpr::Phi)
                }
                "floor" | "ceil" => {
                    self.i += 1;
                    self.expect(Tok::LParen, "'('")?;
                    let a = self.expr(allow_call)?;
                    let e = if self.peek() == Some(&Tok::Slash) {
                        self.i += 1;
                        let b = self.expr(allow_call)?;
                        if s == "floor" {
                            a.floor_div(b)
                        } else {
                            a.ceil_div(b)
                        }
                    } else if s == "floor" {
                        a.floor()
                    } else {
                        a.ceil()
                    };
                    self.expect(Tok::RParen, "')'")?;
                    Ok(e)
                }
                name if name == self.name => {
                    if !allow_call {
                        return Err(ParseError::new(
                            pos,
                            "self-call not allowed in an initial-condition expression",
                        ));
                    }
                    Ok(IndexExpr::Call(Box::new(self.call_argument()?)))
                }
                other => Err(ParseError::new(
                    pos,
                    format!("unknown identifier '{other}'"),
                )),
            },
            _ => Err(self.err_expected("an index expression")),
        }
    }
}

/// Parses one recurrence definition.
///
/// Returns a purely syntactic [`RecurrenceSpec`]; semantic checks (init
/// materialization, offset guards, φ placement) happen in
/// [`validate`](super::validate::validate).
///
/// # Examples
///
/// ```
/// use metafib::dsl::parse;
///
/// let spec = parse("A(n)=A(n-A(n-1))+A(n-A(n-2)); init ceil(n/2); start 2").unwrap();
/// assert_eq!(spec.summands.len(), 2);
/// assert_eq!(spec.start_after, 2);
/// ```
pub fn parse(source: &str) -> Result<RecurrenceSpec, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: source.len(),
        name: String::new(),
    };

    let name_pos = p.pos();
    let name = match p.peek().cloned() {
        Some(Tok::Ident(s)) if !RESERVED.contains(&s.as_str()) => {
            p.i += 1;
            s
        }
        Some(Tok::Ident(s)) => {
            return Err(ParseError::new(
                name_pos,
                format!("'{s}' is reserved and cannot name a sequence"),
            ))
        }
        _ => return Err(p.err_expected("a sequence name")),
    };
    p.expect(Tok::LParen, "'('")?;
    p.expect_keyword("n")?;
    p.expect(Tok::RParen, "')'")?;
    p.expect(Tok::Eq, "'='")?;
    p.name = name;

    let mut summands = Vec::new();
    let mut sign = p.eat_sign().unwrap_or(Sign::Plus);
    loop {
        let argument = p.call_argument()?;
        summands.push(Summand { sign, argument });
        match p.eat_sign() {
            Some(s) => sign = s,
            None => break,
        }
    }

    p.expect(Tok::Semi, "';'")?;
    p.expect_keyword("init")?;
    let init = if p.peek_keyword("list") {
        p.i += 1;
        let mut values = vec![p.expect_int("an init value")?];
        while p.peek() == Some(&Tok::Comma) {
            p.i += 1;
            values.push(p.expect_int("an init value")?);
        }
        InitPattern::List(values)
    } else {
        InitPattern::ClosedForm(p.expr(false)?)
    };

    p.expect(Tok::Semi, "';'")?;
    p.expect_keyword("start")?;
    let start_pos = p.pos();
    let start_after = p.expect_int("a threshold")?;
    if start_after == 0 {
        return Err(ParseError::new(start_pos, "threshold must be positive"));
    }
    if let InitPattern::List(values) = &init {
        if values.len() as u64 != start_after {
            return Err(ParseError::new(
                start_pos,
                format!(
                    "init list has {} value(s) but threshold is {start_after}",
                    values.len()
                ),
            ));
        }
    }
    if p.peek().is_some() {
        return Err(p.err_expected("end of input"));
    }

    Ok(RecurrenceSpec {
        name: p.name,
        summands,
        init,
        start_after,
    })
}
