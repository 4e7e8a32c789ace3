//! Negation-normal-form formulas of the multi-agent STIT language.
//!
//! Negation is only ever applied to atoms. The parser removes every other
//! negation eagerly through [`negate`], so no general negation node exists.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Agent identifier, always in `1..=m`.
pub type Agent = u32;

/// Atom name reserved for the desugaring of `true` and `false`.
pub const RESERVED_ATOM: &str = "_top";

/// Number of agents `m = |Ag|`, at least one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentCount(u32);

impl AgentCount {
    pub const ONE: AgentCount = AgentCount(1);

    pub fn new(m: u32) -> Option<Self> {
        (m >= 1).then_some(AgentCount(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn contains(self, agent: Agent) -> bool {
        (1..=self.0).contains(&agent)
    }

    pub fn agents(self) -> impl Iterator<Item = Agent> {
        1..=self.0
    }
}

impl fmt::Display for AgentCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Arc<str>),
    NegAtom(Arc<str>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    /// Settledness, true at every world of the moment.
    Box(Arc<Formula>),
    Dia(Arc<Formula>),
    /// `[i]`: agent `i` sees to it that.
    AgBox(Agent, Arc<Formula>),
    AgDia(Agent, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    pub fn neg_atom(name: &str) -> Formula {
        Formula::NegAtom(Arc::from(name))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn boxed(body: Formula) -> Formula {
        Formula::Box(Arc::new(body))
    }

    pub fn dia(body: Formula) -> Formula {
        Formula::Dia(Arc::new(body))
    }

    pub fn ag_box(agent: Agent, body: Formula) -> Formula {
        Formula::AgBox(agent, Arc::new(body))
    }

    pub fn ag_dia(agent: Agent, body: Formula) -> Formula {
        Formula::AgDia(agent, Arc::new(body))
    }

    /// `p₀ ∨ p̄₀` over the reserved atom.
    pub fn top() -> Formula {
        Formula::or(Formula::atom(RESERVED_ATOM), Formula::neg_atom(RESERVED_ATOM))
    }

    /// `p₀ ∧ p̄₀` over the reserved atom.
    pub fn bottom() -> Formula {
        Formula::and(Formula::atom(RESERVED_ATOM), Formula::neg_atom(RESERVED_ATOM))
    }

    /// `¬a ∨ b`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(negate(&a), b)
    }

    /// `(a → b) ∧ (b → a)`.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn negate(&self) -> Formula {
        negate(self)
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::Atom(_) | Formula::NegAtom(_))
    }

    /// Number of connectives (every non-leaf node counts once).
    pub fn connectives(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => 0,
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.connectives() + r.connectives(),
            Formula::Box(b) | Formula::Dia(b) | Formula::AgBox(_, b) | Formula::AgDia(_, b) => {
                1 + b.connectives()
            }
        }
    }

    /// Atom names occurring positively or negatively, sorted and deduplicated.
    pub fn atoms(&self) -> Vec<Arc<str>> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) | Formula::NegAtom(p) = f {
                out.push(p.clone());
            }
        });
        out.sort();
        out.dedup();
        out
    }

    /// Largest agent index occurring in the formula, 0 when there is none.
    pub fn max_agent(&self) -> Agent {
        let mut max = 0;
        self.visit(&mut |f| {
            if let Formula::AgBox(i, _) | Formula::AgDia(i, _) = f {
                max = max.max(*i);
            }
        });
        max
    }

    /// Pre-order traversal over every subformula occurrence.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => {}
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Formula::Box(b) | Formula::Dia(b) | Formula::AgBox(_, b) | Formula::AgDia(_, b) => {
                b.visit(f)
            }
        }
    }
}

/// The dual formula: every connective replaced by its dual and every
/// literal flipped.
pub fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Atom(p) => Formula::NegAtom(p.clone()),
        Formula::NegAtom(p) => Formula::Atom(p.clone()),
        Formula::And(l, r) => Formula::or(negate(l), negate(r)),
        Formula::Or(l, r) => Formula::and(negate(l), negate(r)),
        Formula::Box(b) => Formula::dia(negate(b)),
        Formula::Dia(b) => Formula::boxed(negate(b)),
        Formula::AgBox(i, b) => Formula::ag_dia(*i, negate(b)),
        Formula::AgDia(i, b) => Formula::ag_box(*i, negate(b)),
    }
}

/// Multiset of all subformula occurrences of `f`, `f` included, in pre-order.
pub fn subformulae(f: &Formula) -> Vec<&Formula> {
    let mut out = Vec::new();
    f.visit(&mut |g| out.push(g));
    out
}

/// Number of `□` and `[i]` occurrences among the subformulae of `f`.
pub fn box_occurrences(f: &Formula) -> (usize, usize) {
    let mut boxes = 0;
    let mut ag_boxes = 0;
    f.visit(&mut |g| match g {
        Formula::Box(_) => boxes += 1,
        Formula::AgBox(..) => ag_boxes += 1,
        _ => {}
    });
    (boxes, ag_boxes)
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Or,
    And,
    Unary,
}

fn is_reserved_pair(l: &Formula, r: &Formula) -> bool {
    matches!((l, r), (Formula::Atom(a), Formula::NegAtom(b)) if &**a == RESERVED_ATOM && &**b == RESERVED_ATOM)
}

fn prec(f: &Formula) -> Prec {
    match f {
        Formula::Or(l, r) | Formula::And(l, r) if is_reserved_pair(l, r) => Prec::Unary,
        Formula::Or(..) => Prec::Or,
        Formula::And(..) => Prec::And,
        _ => Prec::Unary,
    }
}

fn write_at(out: &mut String, f: &Formula, min: Prec) {
    if prec(f) < min {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    } else {
        write_formula(out, f);
    }
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::NegAtom(p) => {
            out.push('~');
            out.push_str(p);
        }
        Formula::Or(l, r) if is_reserved_pair(l, r) => out.push_str("true"),
        Formula::And(l, r) if is_reserved_pair(l, r) => out.push_str("false"),
        // Binary chains parse left-associatively, so only the right operand
        // needs the stricter context.
        Formula::Or(l, r) => {
            write_at(out, l, Prec::Or);
            out.push_str(" | ");
            write_at(out, r, Prec::And);
        }
        Formula::And(l, r) => {
            write_at(out, l, Prec::And);
            out.push_str(" & ");
            write_at(out, r, Prec::Unary);
        }
        Formula::Box(b) => {
            out.push_str("box ");
            write_at(out, b, Prec::Unary);
        }
        Formula::Dia(b) => {
            out.push_str("dia ");
            write_at(out, b, Prec::Unary);
        }
        Formula::AgBox(i, b) => {
            out.push_str(&format!("[{i}] "));
            write_at(out, b, Prec::Unary);
        }
        Formula::AgDia(i, b) => {
            out.push_str(&format!("<{i}> "));
            write_at(out, b, Prec::Unary);
        }
    }
}

/// Render `f` in the concrete syntax accepted by [`parse`].
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("agent index {agent} at position {pos} is out of range 1..={m}")]
    AgentOutOfRange { pos: usize, agent: u64, m: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    And,
    Or,
    Imp,
    Iff,
    Bang,
    Tilde,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Int(u64),
    Ident(String),
    KwBox,
    KwDia,
    KwTrue,
    KwFalse,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Imp => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LAngle => f.write_str("`<`"),
            Tok::RAngle => f.write_str("`>`"),
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::KwBox => f.write_str("`box`"),
            Tok::KwDia => f.write_str("`dia`"),
            Tok::KwTrue => f.write_str("`true`"),
            Tok::KwFalse => f.write_str("`false`"),
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'!' => Tok::Bang,
            b'~' => Tok::Tilde,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b'>' => Tok::RAngle,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    Tok::Imp
                } else {
                    return Err(syntax(i, "expected `->`"));
                }
            }
            b'<' => {
                if bytes[i..].starts_with(b"<->") {
                    i += 2;
                    Tok::Iff
                } else {
                    Tok::LAngle
                }
            }
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..=i];
                let n = digits
                    .parse::<u64>()
                    .map_err(|_| syntax(start, format!("integer `{digits}` is too large")))?;
                Tok::Int(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_' || bytes[i + 1] == b'\'')
                {
                    i += 1;
                }
                match &text[start..=i] {
                    "box" => Tok::KwBox,
                    "dia" => Tok::KwDia,
                    "true" => Tok::KwTrue,
                    "false" => Tok::KwFalse,
                    id => Tok::Ident(id.to_string()),
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character `{ch}`")));
            }
        };
        toks.push((start, tok));
        i += 1;
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    m: AgentCount,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {tok}")))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        match self.peek() {
            Some(t) => syntax(self.pos(), format!("{what}, found {t}")),
            None => syntax(self.pos(), format!("{what}, found end of input")),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Imp) {
            let rhs = self.imp()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn agent(&mut self) -> Result<Agent, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                if n >= 1 && n <= u64::from(self.m.get()) {
                    Ok(n as Agent)
                } else {
                    Err(ParseError::AgentOutOfRange { pos, agent: n, m: self.m.get() })
                }
            }
            _ => Err(self.unexpected("expected agent index")),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.unexpected("expected formula"));
        };
        self.at += 1;
        match tok {
            Tok::Bang => Ok(negate(&self.unary()?)),
            Tok::KwBox => Ok(Formula::boxed(self.unary()?)),
            Tok::KwDia => Ok(Formula::dia(self.unary()?)),
            Tok::LBracket => {
                let i = self.agent()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::ag_box(i, self.unary()?))
            }
            Tok::LAngle => {
                let i = self.agent()?;
                self.expect(Tok::RAngle)?;
                Ok(Formula::ag_dia(i, self.unary()?))
            }
            Tok::Tilde => match self.peek().cloned() {
                Some(Tok::Ident(name)) => {
                    self.at += 1;
                    Ok(Formula::neg_atom(&name))
                }
                _ => Err(self.unexpected("expected atom after `~`")),
            },
            Tok::Ident(name) => Ok(Formula::atom(&name)),
            Tok::KwTrue => Ok(Formula::top()),
            Tok::KwFalse => Ok(Formula::bottom()),
            Tok::LParen => {
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => {
                self.at -= 1;
                Err(self.unexpected("expected formula"))
            }
        }
    }
}

/// Parse `text` into an NNF formula whose agents lie in `1..=m`.
///
/// `->`, `<->`, `!`, `true` and `false` are desugared on the fly.
pub fn parse(text: &str, m: AgentCount) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), m };
    let f = p.iff()?;
    if p.at < p.toks.len() {
        return Err(p.unexpected("expected end of input"));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    /// Parses with the agent bound set to `u32::MAX`; use [`parse`] to
    /// enforce a session agent count.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s, AgentCount(u32::MAX))
    }
}
