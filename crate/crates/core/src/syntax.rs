//! Linear text form for DRSs, lambda terms and semantic types.
//!
//! ```text
//! drs([x:1,e:2],[pred(bar,[x:1]), eq(x:1,x:3), alpha(drs([x:3],[]))])
//! lam(P1:e->t, oplus(drs([x:1],[]), app(P1,x:1)))
//! ```
//!
//! Whitespace is insignificant. Markers print as `sort:index`, with `x`
//! for entities and `e` for events.

use std::fmt;

use thiserror::Error;

use crate::drs::{Condition, Drs, Marker, QualiaRole, Sort};
use crate::term::{Binder, FunVar, SemType, Term, TermCondition, TermDrs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Pred { name, args } => write!(f, "pred({name},[{}])", join(args, ",")),
            Condition::Eq(a, b) => write!(f, "eq({a},{b})"),
            Condition::Impl(a, b) => write!(f, "impl({a},{b})"),
            Condition::Neg(a) => write!(f, "not({a})"),
            Condition::Disj(a, b) => write!(f, "or({a},{b})"),
            Condition::Alpha(a) => write!(f, "alpha({a})"),
            Condition::Qualia(r, a) => write!(f, "qualia({r},{a})"),
        }
    }
}

impl fmt::Display for Drs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let universe: Vec<Marker> = self.universe().iter().copied().collect();
        write!(f, "drs([{}],[{}])", join(&universe, ","), join(self.conditions(), ", "))
    }
}

impl fmt::Display for TermCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermCondition::Pred { name, args } => write!(f, "pred({name},[{}])", join(args, ",")),
            TermCondition::Eq(a, b) => write!(f, "eq({a},{b})"),
            TermCondition::Impl(a, b) => write!(f, "impl({a},{b})"),
            TermCondition::Neg(a) => write!(f, "not({a})"),
            TermCondition::Disj(a, b) => write!(f, "or({a},{b})"),
            TermCondition::Alpha(a) => write!(f, "alpha({a})"),
            TermCondition::Qualia(r, a) => write!(f, "qualia({r},{a})"),
        }
    }
}

impl fmt::Display for TermDrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "drs([{}],[{}])", join(&self.universe, ","), join(&self.conditions, ", "))
    }
}

impl fmt::Display for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binder::Marker(m) => write!(f, "{m}:e"),
            Binder::Fun(v, ty) => write!(f, "{v}:{ty}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Box(d) => write!(f, "{d}"),
            Term::Marker(m) => write!(f, "{m}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Lam(b, body) => write!(f, "lam({b}, {body})"),
            Term::App(a, b) => write!(f, "app({a},{b})"),
            Term::Merge(a, b) => write!(f, "oplus({a},{b})"),
        }
    }
}

/// Character cursor shared by the DRS, term, lexicon and model parsers.
/// `#` starts a comment running to the end of the line.
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                let skip = trimmed.find('\n').unwrap_or(trimmed.len());
                self.pos += skip;
            } else {
                break;
            }
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub(crate) fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    /// Like `eat`, but the token must not run on into an identifier.
    pub(crate) fn eat_keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with(word) && !rest[word.len()..].starts_with(is_ident_char) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, token: &str) -> Result<(), SyntaxError> {
        if self.eat(token) {
            Ok(())
        } else {
            let found: String = self.rest().chars().take(12).collect();
            Err(self.error(format!("expected `{token}`, found `{found}`")))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        let len: usize = self.rest().chars().take_while(|c| is_ident_char(*c)).map(char::len_utf8).sum();
        if len == 0 {
            return Err(self.error("expected an identifier".into()));
        }
        let s = self.rest()[..len].to_string();
        self.pos += len;
        Ok(s)
    }

    pub(crate) fn number(&mut self) -> Result<u32, SyntaxError> {
        self.skip_ws();
        let len = self.rest().chars().take_while(|c| c.is_ascii_digit()).count();
        if len == 0 {
            return Err(self.error("expected a number".into()));
        }
        let n = self.rest()[..len].parse().map_err(|_| self.error("number out of range".into()))?;
        self.pos += len;
        Ok(n)
    }

    pub(crate) fn quoted(&mut self) -> Result<String, SyntaxError> {
        self.expect("\"")?;
        let end = self.rest().find('"').ok_or_else(|| self.error("unterminated string".into()))?;
        let s = self.rest()[..end].to_string();
        self.pos += end + 1;
        Ok(s)
    }

    pub(crate) fn location(&self) -> (usize, usize) {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
        (line, column)
    }

    pub(crate) fn error(&self, message: String) -> SyntaxError {
        let (line, column) = self.location();
        SyntaxError { line, column, message }
    }

    pub(crate) fn finish(&mut self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("trailing input".into()))
        }
    }

    /// `x:3` or `e:3`, when the input starts with one.
    pub(crate) fn try_marker(&mut self) -> Result<Option<Marker>, SyntaxError> {
        self.skip_ws();
        let mut chars = self.rest().chars();
        let sort = match (chars.next().and_then(Sort::from_tag), chars.next()) {
            (Some(sort), Some(':')) => sort,
            _ => return Ok(None),
        };
        if !chars.next().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            return Ok(None);
        }
        self.pos += 2;
        let index = self.number()?;
        Ok(Some(Marker { index, sort }))
    }

    pub(crate) fn marker(&mut self) -> Result<Marker, SyntaxError> {
        self.try_marker()?.ok_or_else(|| self.error("expected a marker such as `x:1`".into()))
    }

    pub(crate) fn marker_list(&mut self) -> Result<Vec<Marker>, SyntaxError> {
        self.expect("[")?;
        let mut out = Vec::new();
        if self.eat("]") {
            return Ok(out);
        }
        loop {
            out.push(self.marker()?);
            if self.eat("]") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    /// Uppercase tag followed by optional digits, e.g. `P1`, `E`.
    pub(crate) fn try_fun_var(&mut self) -> Result<Option<FunVar>, SyntaxError> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.chars();
        let Some(tag) = chars.next().filter(|c| c.is_ascii_uppercase()) else {
            return Ok(None);
        };
        let digits: String = chars.clone().take_while(|c| c.is_ascii_digit()).collect();
        let after = rest[1 + digits.len()..].chars().next();
        if after.map(is_ident_char).unwrap_or(false) {
            return Ok(None);
        }
        self.pos += 1 + digits.len();
        let index = if digits.is_empty() {
            0
        } else {
            digits.parse().map_err(|_| self.error("variable index out of range".into()))?
        };
        Ok(Some(FunVar { tag, index }))
    }

    pub(crate) fn sem_type(&mut self) -> Result<SemType, SyntaxError> {
        let atom = if self.eat("(") {
            let t = self.sem_type()?;
            self.expect(")")?;
            t
        } else if self.eat_type_atom('e') {
            SemType::E
        } else if self.eat_type_atom('t') {
            SemType::T
        } else {
            return Err(self.error("expected a type (`e`, `t` or `(a->b)`)".into()));
        };
        if self.eat("->") {
            Ok(SemType::fun(atom, self.sem_type()?))
        } else {
            Ok(atom)
        }
    }

    fn eat_type_atom(&mut self, c: char) -> bool {
        self.skip_ws();
        let mut chars = self.rest().chars();
        if chars.next() != Some(c) {
            return false;
        }
        let next = chars.as_str();
        let ends = match next.chars().next() {
            None => true,
            Some(n) => !(n.is_alphanumeric() || n == '_') && (n != '-' || next.starts_with("->")),
        };
        if ends {
            self.pos += 1;
        }
        ends
    }

    pub(crate) fn term(&mut self) -> Result<Term, SyntaxError> {
        if self.eat_keyword("drs") {
            return Ok(Term::Box(self.term_box_body()?));
        }
        if self.eat_keyword("lam") {
            self.expect("(")?;
            let binder = if let Some(m) = self.try_marker()? {
                self.expect(":")?;
                let ty = self.sem_type()?;
                if ty != SemType::E {
                    return Err(self.error(format!("marker {m} abstracted at type {ty}")));
                }
                Binder::Marker(m)
            } else if let Some(v) = self.try_fun_var()? {
                self.expect(":")?;
                Binder::Fun(v, self.sem_type()?)
            } else {
                return Err(self.error("expected a binder".into()));
            };
            self.expect(",")?;
            let body = self.term()?;
            self.expect(")")?;
            return Ok(Term::Lam(binder, Box::new(body)));
        }
        for (kw, merge) in [("app", false), ("oplus", true)] {
            if self.eat_keyword(kw) {
                self.expect("(")?;
                let a = self.term()?;
                self.expect(",")?;
                let b = self.term()?;
                self.expect(")")?;
                return Ok(if merge { Term::merge(a, b) } else { Term::app(a, b) });
            }
        }
        if let Some(m) = self.try_marker()? {
            return Ok(Term::Marker(m));
        }
        if let Some(v) = self.try_fun_var()? {
            return Ok(Term::Var(v));
        }
        Err(self.error("expected a term".into()))
    }

    fn term_box_body(&mut self) -> Result<TermDrs, SyntaxError> {
        self.expect("(")?;
        let universe = self.marker_list()?;
        self.expect(",")?;
        self.expect("[")?;
        let mut conditions = Vec::new();
        if !self.eat("]") {
            loop {
                conditions.push(self.term_condition()?);
                if self.eat("]") {
                    break;
                }
                self.expect(",")?;
            }
        }
        self.expect(")")?;
        Ok(TermDrs::new(universe, conditions))
    }

    fn term_condition(&mut self) -> Result<TermCondition, SyntaxError> {
        let kw = self.ident()?;
        self.expect("(")?;
        let cond = match kw.as_str() {
            "pred" => {
                let name = self.ident()?;
                self.expect(",")?;
                TermCondition::Pred { name, args: self.marker_list()? }
            }
            "eq" => {
                let a = self.marker()?;
                self.expect(",")?;
                TermCondition::Eq(a, self.marker()?)
            }
            "impl" | "or" => {
                let a = self.term()?;
                self.expect(",")?;
                let b = self.term()?;
                if kw == "impl" {
                    TermCondition::Impl(a, b)
                } else {
                    TermCondition::Disj(a, b)
                }
            }
            "not" => TermCondition::Neg(self.term()?),
            "alpha" => TermCondition::Alpha(self.term()?),
            "qualia" => {
                let role: QualiaRole = self.ident()?.parse().map_err(|e: String| self.error(e))?;
                self.expect(",")?;
                TermCondition::Qualia(role, self.term()?)
            }
            other => return Err(self.error(format!("unknown condition `{other}`"))),
        };
        self.expect(")")?;
        Ok(cond)
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    let mut cur = Cursor::new(src);
    let t = cur.term()?;
    cur.finish()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<SemType, SyntaxError> {
    let mut cur = Cursor::new(src);
    let t = cur.sem_type()?;
    cur.finish()?;
    Ok(t)
}

/// Parse the linear form of a lambda-free DRS.
pub fn parse_drs(src: &str) -> Result<Drs, SyntaxError> {
    let t = parse_term(src)?;
    t.to_drs().map_err(|e| SyntaxError { line: 1, column: 1, message: e.to_string() })
}

impl std::str::FromStr for Drs {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_drs(s)
    }
}
