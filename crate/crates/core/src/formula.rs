//! Propositional formulas over a [`Language`].
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" or)*
//! or      := and ("|" and)*
//! and     := not ("&" not)*
//! not     := "~" not | atom | "true" | "false" | "(" formula ")"
//! ```
//!
//! Precedence is `~ > & > | > -> > <->`. `&` and `|` associate to the left,
//! `->` and `<->` to the right. Whitespace is insignificant.

use std::fmt;

use crate::error::{Error, Result};
use crate::lang::{Language, ModelSet, Valuation};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// Index into the language's atom list.
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn negation(f: Formula) -> Self {
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

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Classical truth value under a single valuation of an `n`-atom language.
    pub fn eval(&self, v: Valuation, n: usize) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(i) => v.get(*i, n),
            Formula::Not(f) => !f.eval(v, n),
            Formula::And(a, b) => a.eval(v, n) && b.eval(v, n),
            Formula::Or(a, b) => a.eval(v, n) || b.eval(v, n),
            Formula::Implies(a, b) => !a.eval(v, n) || b.eval(v, n),
            Formula::Iff(a, b) => a.eval(v, n) == b.eval(v, n),
        }
    }

    fn max_atom(&self) -> Option<usize> {
        match self {
            Formula::True | Formula::False => None,
            Formula::Atom(i) => Some(*i),
            Formula::Not(f) => f.max_atom(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.max_atom().max(b.max_atom()),
        }
    }

    /// Renders the formula with the minimal parentheses that reparse to the same tree.
    pub fn display<'a>(&'a self, lang: &'a Language) -> impl fmt::Display + 'a {
        Printer { f: self, lang }
    }
}

/// The set of valuations satisfying `f`.
pub fn models(f: &Formula, lang: &Language) -> ModelSet {
    let n = lang.num_atoms();
    debug_assert!(f.max_atom().is_none_or(|i| i < n));
    match f {
        Formula::True => lang.top(),
        Formula::False => lang.bottom(),
        Formula::Atom(i) => {
            ModelSet::from_valuations(n, lang.valuations().filter(|v| v.get(*i, n)))
        }
        Formula::Not(g) => models(g, lang).complement(),
        Formula::And(a, b) => models(a, lang).intersection(&models(b, lang)),
        Formula::Or(a, b) => models(a, lang).union(&models(b, lang)),
        Formula::Implies(a, b) => models(a, lang).complement().union(&models(b, lang)),
        Formula::Iff(a, b) => {
            let (ma, mb) = (models(a, lang), models(b, lang));
            ma.intersection(&mb)
                .union(&ma.complement().intersection(&mb.complement()))
        }
    }
}

/// Parses `text` and returns its model set.
pub fn models_of(text: &str, lang: &Language) -> Result<ModelSet> {
    Ok(models(&parse(text, lang)?, lang))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok<'s> {
    Ident(&'s str),
    Not,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
    End,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok<'_>)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'~' => {
                i += 1;
                Tok::Not
            }
            b'&' => {
                i += 1;
                Tok::And
            }
            b'|' => {
                i += 1;
                Tok::Or
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Imp
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 3;
                Tok::Iff
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(&text[start..i])
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'s, 'l> {
    toks: Vec<(usize, Tok<'s>)>,
    pos: usize,
    lang: &'l Language,
}

impl<'s> Parser<'s, '_> {
    fn peek(&self) -> Tok<'s> {
        self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok<'s> {
        let t = self.peek();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            message: format!("expected {wanted}, found {}", self.peek().describe()),
        })
    }

    fn iff(&mut self) -> Result<Formula> {
        let lhs = self.imp()?;
        if self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::negation(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                if self.peek() != Tok::RParen {
                    return self.unexpected("`)`");
                }
                self.bump();
                Ok(f)
            }
            Tok::Ident("true") => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident("false") => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => match self.lang.atom_index(name) {
                Some(i) => {
                    self.bump();
                    Ok(Formula::Atom(i))
                }
                None => Err(Error::UnknownAtom(name.to_string())),
            },
            _ => self.unexpected("a formula"),
        }
    }
}

/// Parses a formula over `lang`.
pub fn parse(text: &str, lang: &Language) -> Result<Formula> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, lang };
    if p.peek() == Tok::End {
        return p.unexpected("a formula");
    }
    let f = p.iff()?;
    if p.peek() != Tok::End {
        return p.unexpected("an operator or end of input");
    }
    Ok(f)
}

// Binding strength, tighter is larger.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(_) => 5,
        _ => 6,
    }
}

struct Printer<'a> {
    f: &'a Formula,
    lang: &'a Language,
}

impl Printer<'_> {
    fn child(&self, f: &Formula, paren: bool, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = Printer { f, lang: self.lang };
        if paren {
            write!(out, "({p})")
        } else {
            write!(out, "{p}")
        }
    }

    fn binary(
        &self,
        a: &Formula,
        b: &Formula,
        sym: &str,
        right_assoc: bool,
        out: &mut fmt::Formatter<'_>,
    ) -> fmt::Result {
        let me = prec(self.f);
        let (lp, rp) = if right_assoc {
            (prec(a) <= me, prec(b) < me)
        } else {
            (prec(a) < me, prec(b) <= me)
        };
        self.child(a, lp, out)?;
        write!(out, " {sym} ")?;
        self.child(b, rp, out)
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.f {
            Formula::True => out.write_str("true"),
            Formula::False => out.write_str("false"),
            Formula::Atom(i) => out.write_str(&self.lang.atoms()[*i]),
            Formula::Not(g) => {
                out.write_str("~")?;
                self.child(g, prec(g) < 5, out)
            }
            Formula::And(a, b) => self.binary(a, b, "&", false, out),
            Formula::Or(a, b) => self.binary(a, b, "|", false, out),
            Formula::Implies(a, b) => self.binary(a, b, "->", true, out),
            Formula::Iff(a, b) => self.binary(a, b, "<->", true, out),
        }
    }
}
