//! Concrete syntax for rules.
//!
//! ```text
//! rule    := formula "->" formula
//! formula := conj ("||" conj)*
//! conj    := unary ("&&" unary)*
//! unary   := "!" unary | "(" formula ")" | term ("=" | "!=") term
//! term    := "0" | "1" | "<" iri ">" | "$" name
//!          | ("val" | "subj" | "prop") "(" "$" name ")"
//! ```
//!
//! `#` starts a comment that runs to the end of the line (outside IRIs).

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use super::ast::{Atom, Formula, Rule, RuleError, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax { pos, msg: msg.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Var(String),
    Iri(String),
    Val,
    Subj,
    Prop,
    Zero,
    One,
    LParen,
    RParen,
    Eq,
    Neq,
    Bang,
    And,
    Or,
    Arrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Var(v) => alloc::format!("variable ${v}"),
            Tok::Iri(u) => alloc::format!("IRI <{u}>"),
            Tok::Val => "`val`".into(),
            Tok::Subj => "`subj`".into(),
            Tok::Prop => "`prop`".into(),
            Tok::Zero => "`0`".into(),
            Tok::One => "`1`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Bang => "`!`".into(),
            Tok::And => "`&&`".into(),
            Tok::Or => "`||`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_name_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            b'=' => {
                out.push((Tok::Eq, start));
                i += 1;
            }
            b'!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    out.push((Tok::Neq, start));
                    i += 2;
                } else {
                    out.push((Tok::Bang, start));
                    i += 1;
                }
            }
            b'&' => {
                if bytes.get(i + 1) != Some(&b'&') {
                    return err(start, "expected `&&`");
                }
                out.push((Tok::And, start));
                i += 2;
            }
            b'|' => {
                if bytes.get(i + 1) != Some(&b'|') {
                    return err(start, "expected `||`");
                }
                out.push((Tok::Or, start));
                i += 2;
            }
            b'-' => {
                if bytes.get(i + 1) != Some(&b'>') {
                    return err(start, "expected `->`");
                }
                out.push((Tok::Arrow, start));
                i += 2;
            }
            b'<' => {
                let close = match src[i + 1..].find('>') {
                    Some(off) => i + 1 + off,
                    None => return err(start, "unterminated IRI"),
                };
                let iri = &src[i + 1..close];
                if iri.is_empty() {
                    return err(start, "empty IRI");
                }
                if iri.chars().any(|c| c.is_whitespace() || c == '<') {
                    return err(start, "IRI contains whitespace or `<`");
                }
                out.push((Tok::Iri(iri.to_string()), start));
                i = close + 1;
            }
            b'$' => {
                i += 1;
                while i < bytes.len() && is_name_byte(bytes[i]) {
                    i += 1;
                }
                if i == start + 1 {
                    return err(start, "expected a variable name after `$`");
                }
                out.push((Tok::Var(src[start + 1..i].to_string()), start));
            }
            _ if is_name_byte(b) => {
                while i < bytes.len() && is_name_byte(bytes[i]) {
                    i += 1;
                }
                let tok = match &src[start..i] {
                    "val" => Tok::Val,
                    "subj" => Tok::Subj,
                    "prop" => Tok::Prop,
                    "0" => Tok::Zero,
                    "1" => Tok::One,
                    word => return err(start, alloc::format!("unexpected word `{word}`")),
                };
                out.push((tok, start));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return err(start, alloc::format!("unexpected character `{ch}`"));
            }
        }
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            err(self.pos(), alloc::format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos();
        let lhs = self.term()?;
        let negated = match self.bump() {
            Tok::Eq => false,
            Tok::Neq => true,
            other => {
                return err(
                    self.toks[self.at.saturating_sub(1)].1,
                    alloc::format!("expected `=` or `!=`, found {}", other.describe()),
                )
            }
        };
        let rhs = self.term()?;
        let atom = Atom::from_terms(lhs, rhs).or_else(|e| err(start, alloc::format!("{e}")))?;
        let f = Formula::atom(atom);
        Ok(if negated { Formula::not(f) } else { f })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Zero => Ok(Term::Zero),
            Tok::One => Ok(Term::One),
            Tok::Iri(u) => Ok(Term::Iri(u)),
            Tok::Var(v) => Ok(Term::Var(Var(v))),
            kw @ (Tok::Val | Tok::Subj | Tok::Prop) => {
                self.expect(Tok::LParen)?;
                let vpos = self.pos();
                let v = match self.bump() {
                    Tok::Var(v) => Var(v),
                    other => return err(vpos, alloc::format!("expected a variable, found {}", other.describe())),
                };
                self.expect(Tok::RParen)?;
                Ok(match kw {
                    Tok::Val => Term::Val(v),
                    Tok::Subj => Term::Subj(v),
                    _ => Term::Prop(v),
                })
            }
            other => err(pos, alloc::format!("expected a term, found {}", other.describe())),
        }
    }
}

/// Parses a single formula (no `->`).
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let f = p.formula()?;
    p.expect(Tok::Eof)?;
    Ok(f)
}

/// Parses `antecedent -> consequent` and checks that the consequent only
/// uses antecedent variables. The rule is named `"rule"`.
pub fn parse_rule(text: &str) -> Result<Rule, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let antecedent = p.formula()?;
    p.expect(Tok::Arrow)?;
    let consequent = p.formula()?;
    p.expect(Tok::Eof)?;
    Ok(Rule::new("rule", antecedent, consequent)?)
}
