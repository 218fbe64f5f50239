//! Text formats: timed words, guards, automata, registries and prefix
//! s-expression formulas. Every format accepts `#` comments, and the
//! printers here produce text the parsers read back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ltl::{Mitl, Tltl};
use crate::mso::Mso;
use crate::omega::BuchiAutomaton;
use crate::operators::{OperatorBinding, OperatorKind, Param};
use crate::recursive::{Definition, FloatingAutomaton, RecursiveAutomaton, Registry};
use crate::symbolic::{Guard, Idta, SymbolicLetter};
use crate::time::{fmt_rational, parse_rational, Action, FloatingLasso, Interval, PositionSet, Rational, TimedLasso};

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize, col: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
            col,
            _src: src,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.ws();
        self.peek().is_none()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col, msg)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.ws();
        match self.peek() {
            Some(d) if d == c => {
                self.bump();
                Ok(())
            }
            Some(d) => Err(self.err(format!("expected '{c}', found '{d}'"))),
            None => Err(self.err(format!("expected '{c}', found end of input"))),
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.ws();
        let n = s.chars().count();
        let here: String = self.chars[self.pos..(self.pos + n).min(self.chars.len())].iter().collect();
        if here == s {
            let after = self.peek_at(n);
            let word_like = s.chars().all(|c| c.is_alphanumeric());
            if word_like && after.is_some_and(|c| c.is_alphanumeric() || c == '_') {
                return false;
            }
            for _ in 0..n {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn starts_interval(&self) -> bool {
        matches!(self.peek(), Some('[') | Some('('))
            && self.peek_at(1).is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '.')
    }

    fn number(&mut self) -> Result<Rational> {
        self.ws();
        let (line, col) = (self.line, self.col);
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == '/' || c == '.' || c == '-' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        parse_rational(&s).ok_or_else(|| Error::parse(line, col, format!("bad number '{s}'")))
    }

    fn interval(&mut self) -> Result<Interval> {
        self.ws();
        let (line, col) = (self.line, self.col);
        let lo_closed = match self.bump() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(Error::parse(line, col, "expected an interval")),
        };
        let lo = self.number()?;
        self.expect(',')?;
        self.ws();
        let hi = if self.eat_str("inf") { None } else { Some(self.number()?) };
        self.ws();
        let hi_closed = match self.bump() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(self.err("expected ']' or ')'")),
        };
        if hi.is_none() && hi_closed {
            return Err(Error::parse(line, col, "an unbounded interval must be right-open"));
        }
        Interval::new(lo, lo_closed, hi, hi_closed).map_err(|e| Error::parse(line, col, e.to_string()))
    }

    /// A bare token: stops at whitespace and, outside braces, at brackets and guard connectives.
    fn token(&mut self) -> Result<(String, usize, usize)> {
        self.ws();
        let (line, col) = (self.line, self.col);
        let mut s = String::new();
        let mut depth = 0usize;
        while let Some(c) = self.peek() {
            if depth == 0 && (c.is_whitespace() || "()[]&|!:#,".contains(c)) {
                break;
            }
            if c == '{' {
                depth += 1;
            } else if c == '}' {
                if depth == 0 {
                    break;
                }
                depth -= 1;
            }
            s.push(c);
            self.bump();
        }
        if depth > 0 {
            return Err(Error::parse(line, col, "unbalanced '{'"));
        }
        if s.is_empty() {
            return Err(match self.peek() {
                Some(c) => self.err(format!("unexpected '{c}'")),
                None => self.err("unexpected end of input"),
            });
        }
        Ok((s, line, col))
    }

    fn ident(&mut self) -> Result<String> {
        let (s, line, col) = self.token()?;
        if !is_ident(&s) {
            return Err(Error::parse(line, col, format!("'{s}' is not an identifier")));
        }
        Ok(s)
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '+' || c == '-')
}

// ---- bindings ----

/// Parses `last_a`, `F{B}`, `P{(and (atom b) (prev (atom a)))}`, `lift_last_a{B}`.
pub fn parse_binding(s: &str) -> Result<OperatorBinding> {
    binding_at(s, 1, 1)
}

fn binding_at(s: &str, line: usize, col: usize) -> Result<OperatorBinding> {
    let (head, param) = match s.find('{') {
        Some(k) => {
            if !s.ends_with('}') {
                return Err(Error::parse(line, col, format!("binding '{s}' lacks a closing '}}'")));
            }
            (&s[..k], Some((&s[k + 1..s.len() - 1], col + k + 1)))
        }
        None => (s, None),
    };
    let kind = kind_at(head, line, col)?;
    match (kind.is_recursive(), param) {
        (false, None) => Ok(OperatorBinding::plain(kind)),
        (true, Some((p, pc))) => Ok(OperatorBinding::recursive(kind, param_at(p, line, pc)?)),
        (false, Some(_)) => Err(Error::parse(line, col, format!("operator {head} takes no parameter"))),
        (true, None) => Err(Error::parse(line, col, format!("operator {head} needs a parameter in braces"))),
    }
}

fn kind_at(head: &str, line: usize, col: usize) -> Result<OperatorKind> {
    let plain = |prefix: &str| head.strip_prefix(prefix).filter(|a| is_ident(a)).map(|a| a.to_string());
    if head == "F" {
        return Ok(OperatorKind::RecFuture);
    }
    if head == "P" {
        return Ok(OperatorKind::RecPast);
    }
    if let Some(inner) = head.strip_prefix("lift_") {
        let k = kind_at(inner, line, col + 5)?;
        if k.is_recursive() {
            return Err(Error::parse(line, col, "only catalogue operators can be lifted"));
        }
        return Ok(OperatorKind::Lifted(Box::new(k)));
    }
    if let Some(a) = plain("last_") {
        return Ok(OperatorKind::LastDist(a));
    }
    if let Some(a) = plain("next_") {
        return Ok(OperatorKind::NextDist(a));
    }
    if let Some(a) = plain("fut_") {
        return Ok(OperatorKind::FutureDist(a));
    }
    if let Some(a) = plain("past_") {
        return Ok(OperatorKind::PastDist(a));
    }
    Err(Error::parse(line, col, format!("unknown operator '{head}'")))
}

fn param_at(p: &str, line: usize, col: usize) -> Result<Param> {
    let t = p.trim();
    let col = col + (p.len() - p.trim_start().len());
    if t.starts_with("(fn ") || t.starts_with("(fn\t") {
        let mut c = Cursor::new(t, line, col);
        c.expect('(')?;
        c.eat_str("fn");
        let var = c.ident()?;
        let body = mso_expr(&mut c, &SetDecl::Convention)?;
        c.expect(')')?;
        if !c.at_end() {
            return Err(c.err("trailing input in parameter"));
        }
        return Ok(Param::Mso { var, body: Box::new(body) });
    }
    if t.starts_with('<') && t.ends_with('>') {
        return Ok(Param::Positions(positions_at(&t[1..t.len() - 1], line, col + 1)?));
    }
    if t.starts_with('(') || t == "true" {
        let mut c = Cursor::new(t, line, col);
        let f = tltl_expr(&mut c)?;
        if !c.at_end() {
            return Err(c.err("trailing input in parameter"));
        }
        return Ok(Param::Ltl(Box::new(f)));
    }
    if is_ident(t) {
        return Ok(Param::Floating(t.to_string()));
    }
    Err(Error::parse(line, col, format!("bad parameter '{t}'")))
}

/// `{2} + {0,1} mod 3 from 4`, the display form of a position set.
fn positions_at(s: &str, line: usize, col: usize) -> Result<PositionSet> {
    let bad = || Error::parse(line, col, format!("bad position set '{s}'"));
    let list = |t: &str| -> Result<Vec<usize>> {
        let t = t.trim();
        let inner = t.strip_prefix('{').and_then(|t| t.strip_suffix('}')).ok_or_else(bad)?;
        inner
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse().map_err(|_| bad()))
            .collect()
    };
    let (stem, rest) = s.split_once('+').ok_or_else(bad)?;
    let (per, rest) = rest.split_once("mod").ok_or_else(bad)?;
    let (period, from) = rest.split_once("from").ok_or_else(bad)?;
    let period: usize = period.trim().parse().map_err(|_| bad())?;
    let from: usize = from.trim().parse().map_err(|_| bad())?;
    let (stem, per) = (list(stem)?, list(per)?);
    if period == 0 || stem.iter().any(|&i| i >= from) || per.iter().any(|&i| i >= period) {
        return Err(bad());
    }
    Ok(PositionSet::new(&stem, &per, from, period))
}

// ---- guards ----

pub fn parse_guard(s: &str) -> Result<Guard> {
    let mut c = Cursor::new(s, 1, 1);
    let g = guard_or(&mut c)?;
    if !c.at_end() {
        return Err(c.err("trailing input after guard"));
    }
    Ok(g)
}

fn guard_or(c: &mut Cursor<'_>) -> Result<Guard> {
    let mut g = guard_and(c)?;
    while c.eat_str("|") {
        g = g.or(guard_and(c)?);
    }
    Ok(g)
}

fn guard_and(c: &mut Cursor<'_>) -> Result<Guard> {
    let mut g = guard_unary(c)?;
    while c.eat_str("&") {
        g = g.and(guard_unary(c)?);
    }
    Ok(g)
}

fn guard_unary(c: &mut Cursor<'_>) -> Result<Guard> {
    c.ws();
    if c.eat_str("!") {
        return Ok(guard_unary(c)?.negate());
    }
    if c.starts_interval() {
        let i = c.interval()?;
        if !c.eat_str("in") {
            return Err(c.err("expected 'in' after interval"));
        }
        let (b, line, col) = c.token()?;
        return Ok(Guard::atom(i, binding_at(&b, line, col)?));
    }
    if c.eat_str("(") {
        let g = guard_or(c)?;
        c.expect(')')?;
        return Ok(g);
    }
    if c.eat_str("true") {
        return Ok(Guard::True);
    }
    if c.eat_str("false") {
        return Ok(Guard::True.negate());
    }
    Err(c.err("expected a guard"))
}

// ---- s-expressions ----

fn open(c: &mut Cursor<'_>) -> Result<String> {
    c.expect('(')?;
    let (h, line, col) = c.token()?;
    if h.is_empty() {
        return Err(Error::parse(line, col, "empty list"));
    }
    Ok(h)
}

fn binding_arg(c: &mut Cursor<'_>) -> Result<OperatorBinding> {
    c.ws();
    if c.peek() == Some('(') && !c.starts_interval() {
        // list form `(F θ)` / `(P θ)`
        c.bump();
        let (h, line, col) = c.token()?;
        let kind = match h.as_str() {
            "F" => OperatorKind::RecFuture,
            "P" => OperatorKind::RecPast,
            _ => return Err(Error::parse(line, col, format!("expected F or P, found '{h}'"))),
        };
        let f = tltl_expr(c)?;
        c.expect(')')?;
        return Ok(OperatorBinding::recursive(kind, Param::Ltl(Box::new(f))));
    }
    let (b, line, col) = c.token()?;
    binding_at(&b, line, col)
}

fn fold<T>(
    c: &mut Cursor<'_>,
    item: &mut dyn FnMut(&mut Cursor<'_>) -> Result<T>,
    join: fn(T, T) -> T,
) -> Result<T> {
    let mut acc = item(c)?;
    loop {
        c.ws();
        if c.peek() == Some(')') || c.peek().is_none() {
            return Ok(acc);
        }
        acc = join(acc, item(c)?);
    }
}

pub fn parse_tltl(s: &str) -> Result<Tltl<Action>> {
    let mut c = Cursor::new(s, 1, 1);
    let f = tltl_expr(&mut c)?;
    if !c.at_end() {
        return Err(c.err("trailing input after formula"));
    }
    Ok(f)
}

fn tltl_expr(c: &mut Cursor<'_>) -> Result<Tltl<Action>> {
    c.ws();
    if c.peek() != Some('(') {
        let (t, line, col) = c.token()?;
        return match t.as_str() {
            "true" => Ok(Tltl::True),
            "false" => Ok(Tltl::True.negate()),
            _ => Err(Error::parse(line, col, format!("expected a formula, found '{t}'"))),
        };
    }
    let (line, col) = (c.line, c.col);
    let head = open(c)?;
    let f = match head.as_str() {
        "atom" => Tltl::letter(c.ident()?),
        "in" => {
            let i = c.interval()?;
            Tltl::atom(i, binding_arg(c)?)
        }
        "not" => tltl_expr(c)?.negate(),
        "next" => tltl_expr(c)?.next(),
        "prev" => tltl_expr(c)?.prev(),
        "or" => fold(c, &mut tltl_expr, Tltl::or)?,
        "and" => fold(c, &mut tltl_expr, Tltl::and)?,
        "U" => tltl_expr(c)?.until(tltl_expr(c)?),
        "S" => tltl_expr(c)?.since(tltl_expr(c)?),
        "true" => Tltl::True,
        _ => return Err(Error::parse(line, col, format!("unknown temporal operator '{head}'"))),
    };
    c.expect(')')?;
    Ok(f)
}

pub fn parse_mitl(s: &str) -> Result<Mitl> {
    let mut c = Cursor::new(s, 1, 1);
    let f = mitl_expr(&mut c)?;
    if !c.at_end() {
        return Err(c.err("trailing input after formula"));
    }
    Ok(f)
}

fn mitl_expr(c: &mut Cursor<'_>) -> Result<Mitl> {
    c.ws();
    if c.peek() != Some('(') {
        let (t, line, col) = c.token()?;
        return match t.as_str() {
            "true" => Ok(Mitl::True),
            "false" => Ok(Mitl::True.negate()),
            _ => Err(Error::parse(line, col, format!("expected a formula, found '{t}'"))),
        };
    }
    let (line, col) = (c.line, c.col);
    let head = open(c)?;
    let f = match head.as_str() {
        "atom" => Mitl::Act(c.ident()?),
        "not" => mitl_expr(c)?.negate(),
        "next" => mitl_expr(c)?.next(),
        "prev" => mitl_expr(c)?.prev(),
        "or" => fold(c, &mut mitl_expr, Mitl::or)?,
        "and" => fold(c, &mut mitl_expr, Mitl::and)?,
        "U" => mitl_expr(c)?.until(mitl_expr(c)?),
        "S" => mitl_expr(c)?.since(mitl_expr(c)?),
        "UI" => {
            let i = c.interval()?;
            let t = mitl_expr(c)?;
            t.until_in(i, mitl_expr(c)?)
        }
        "SI" => {
            let i = c.interval()?;
            let t = mitl_expr(c)?;
            t.since_in(i, mitl_expr(c)?)
        }
        "FI" => {
            let i = c.interval()?;
            Mitl::eventually(i, mitl_expr(c)?)
        }
        "PI" => {
            let i = c.interval()?;
            Mitl::once(i, mitl_expr(c)?)
        }
        "GI" => {
            let i = c.interval()?;
            Mitl::always(i, mitl_expr(c)?)
        }
        "HI" => {
            let i = c.interval()?;
            Mitl::historically(i, mitl_expr(c)?)
        }
        "true" => Mitl::True,
        _ => return Err(Error::parse(line, col, format!("unknown metric operator '{head}'"))),
    };
    c.expect(')')?;
    Ok(f)
}

/// How set variables are recognised.
enum SetDecl {
    /// Uppercase initial letter.
    Convention,
    Declared(BTreeSet<String>),
}

impl SetDecl {
    fn check(&self, name: &str, line: usize, col: usize) -> Result<()> {
        let ok = match self {
            SetDecl::Convention => name.chars().next().is_some_and(char::is_uppercase),
            SetDecl::Declared(s) => s.contains(name),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::parse(line, col, format!("'{name}' is not a declared set variable")))
        }
    }

    fn check_fo(&self, name: &str, line: usize, col: usize) -> Result<()> {
        let clash = match self {
            SetDecl::Convention => name.chars().next().is_some_and(char::is_uppercase),
            SetDecl::Declared(s) => s.contains(name),
        };
        if clash {
            Err(Error::parse(line, col, format!("'{name}' is a set variable, not a position")))
        } else {
            Ok(())
        }
    }
}

/// Parses a monadic formula; an optional first line `sets: X Y` declares the set variables.
pub fn parse_mso(s: &str) -> Result<Mso<Action>> {
    let mut decl = SetDecl::Convention;
    let mut body = s;
    let mut line = 1;
    let first = s.lines().position(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    if let Some(k) = first {
        let l = s.lines().nth(k).unwrap_or("");
        if let Some(rest) = l.trim_start().strip_prefix("sets:") {
            decl = SetDecl::Declared(rest.split_whitespace().map(String::from).collect());
            let offset: usize = s.lines().take(k + 1).map(|l| l.len() + 1).sum();
            body = &s[offset.min(s.len())..];
            line = k + 2;
        }
    }
    let mut c = Cursor::new(body, line, 1);
    let f = mso_expr(&mut c, &decl)?;
    if !c.at_end() {
        return Err(c.err("trailing input after formula"));
    }
    Ok(f)
}

fn fo_var(c: &mut Cursor<'_>, decl: &SetDecl) -> Result<String> {
    c.ws();
    let (line, col) = (c.line, c.col);
    let v = c.ident()?;
    decl.check_fo(&v, line, col)?;
    Ok(v)
}

fn set_var(c: &mut Cursor<'_>, decl: &SetDecl) -> Result<String> {
    c.ws();
    let (line, col) = (c.line, c.col);
    let v = c.ident()?;
    decl.check(&v, line, col)?;
    Ok(v)
}

fn mso_expr(c: &mut Cursor<'_>, decl: &SetDecl) -> Result<Mso<Action>> {
    c.ws();
    if c.peek() != Some('(') {
        let (t, line, col) = c.token()?;
        return match t.as_str() {
            "true" => Ok(Mso::True),
            "false" => Ok(Mso::False),
            _ => Err(Error::parse(line, col, format!("expected a formula, found '{t}'"))),
        };
    }
    let (line, col) = (c.line, c.col);
    let head = open(c)?;
    let mut sub = |c: &mut Cursor<'_>| mso_expr(c, decl);
    let f = match head.as_str() {
        "Q" => {
            let a = c.ident()?;
            Mso::letter(a, &fo_var(c, decl)?)
        }
        "in" => {
            let i = c.interval()?;
            let (b, bl, bc) = c.token()?;
            let b = binding_at(&b, bl, bc)?;
            Mso::atom(i, b, &fo_var(c, decl)?)
        }
        "mem" => {
            let x = fo_var(c, decl)?;
            Mso::member(&x, &set_var(c, decl)?)
        }
        "lt" => {
            let x = fo_var(c, decl)?;
            Mso::less(&x, &fo_var(c, decl)?)
        }
        "le" => {
            let x = fo_var(c, decl)?;
            Mso::le(&x, &fo_var(c, decl)?)
        }
        "eq" => {
            let x = fo_var(c, decl)?;
            Mso::eq(&x, &fo_var(c, decl)?)
        }
        "succ" => {
            let x = fo_var(c, decl)?;
            Mso::succ(&x, &fo_var(c, decl)?)
        }
        "zero" => Mso::zero(&fo_var(c, decl)?),
        "not" => sub(c)?.negate(),
        "or" => fold(c, &mut sub, Mso::or)?,
        "and" => fold(c, &mut sub, Mso::and)?,
        "implies" => {
            let a = sub(c)?;
            a.implies(sub(c)?)
        }
        "exists" => {
            let x = fo_var(c, decl)?;
            Mso::exists(&x, sub(c)?)
        }
        "forall" => {
            let x = fo_var(c, decl)?;
            Mso::forall(&x, sub(c)?)
        }
        "exists-set" => {
            let x = set_var(c, decl)?;
            Mso::exists_set(&x, sub(c)?)
        }
        "forall-set" => {
            let x = set_var(c, decl)?;
            Mso::forall_set(&x, sub(c)?)
        }
        "true" => Mso::True,
        "false" => Mso::False,
        _ => return Err(Error::parse(line, col, format!("unknown monadic operator '{head}'"))),
    };
    c.expect(')')?;
    Ok(f)
}

// ---- timed words ----

/// Reads `stem:`, `period:` and `shift:` lines, plus an optional `mark:` line.
pub fn parse_timed_word(s: &str) -> Result<TimedLasso> {
    let (w, mark) = parse_word_lines(s)?;
    if mark.is_some() {
        return Err(Error::parse(1, 1, "a plain timed word has no mark"));
    }
    Ok(w)
}

pub fn parse_floating_word(s: &str) -> Result<FloatingLasso> {
    let (w, mark) = parse_word_lines(s)?;
    let mark = mark.ok_or_else(|| Error::parse(1, 1, "missing 'mark:' line"))?;
    Ok(FloatingLasso::new(w, mark))
}

fn parse_word_lines(s: &str) -> Result<(TimedLasso, Option<usize>)> {
    let mut stem = None;
    let mut period = None;
    let mut shift = None;
    let mut mark = None;
    for (k, raw) in s.lines().enumerate() {
        let line = k + 1;
        let l = raw.split('#').next().unwrap_or("");
        if l.trim().is_empty() {
            continue;
        }
        let Some((key, val)) = l.split_once(':') else {
            return Err(Error::parse(line, 1, "expected 'key: value'"));
        };
        let col = key.len() + 2;
        match key.trim() {
            "stem" => stem = Some(events(val, line, col)?),
            "period" => period = Some(events(val, line, col)?),
            "shift" => {
                shift = Some(parse_rational(val).ok_or_else(|| Error::parse(line, col, "bad shift"))?)
            }
            "mark" => mark = Some(val.trim().parse().map_err(|_| Error::parse(line, col, "bad mark"))?),
            other => return Err(Error::parse(line, 1, format!("unknown key '{other}'"))),
        }
    }
    let period = period.ok_or_else(|| Error::parse(1, 1, "missing 'period:' line"))?;
    let shift = shift.ok_or_else(|| Error::parse(1, 1, "missing 'shift:' line"))?;
    let w = TimedLasso::new(stem.unwrap_or_default(), period, shift)?;
    Ok((w, mark))
}

fn events(s: &str, line: usize, col: usize) -> Result<Vec<(Action, Rational)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for tok in s.split_whitespace() {
        let at = s[offset..].find(tok).map_or(offset, |k| offset + k);
        offset = at + tok.len();
        let c = col + at;
        let (a, t) = tok
            .split_once('@')
            .ok_or_else(|| Error::parse(line, c, format!("expected action@time, found '{tok}'")))?;
        if !is_ident(a) {
            return Err(Error::parse(line, c, format!("bad action '{a}'")));
        }
        let t = parse_rational(t).ok_or_else(|| Error::parse(line, c, format!("bad time '{t}'")))?;
        out.push((a.to_string(), t));
    }
    Ok(out)
}

pub fn fmt_timed_word(w: &TimedLasso) -> String {
    w.to_string()
}

pub fn fmt_floating_word(w: &FloatingLasso) -> String {
    format!("{}mark: {}\n", w.word(), w.mark())
}

// ---- automata ----

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
}

impl<'a> Lines<'a> {
    fn new(s: &'a str, first: usize) -> Self {
        Lines {
            items: s
                .lines()
                .enumerate()
                .map(|(k, l)| (k + first, l))
                .filter(|(_, l)| {
                    let t = l.trim();
                    !t.is_empty() && !t.starts_with('#')
                })
                .collect(),
        }
    }
}

/// Parses a plain automaton.
pub fn parse_idta(s: &str) -> Result<Idta> {
    let r = parse_recursive(s)?;
    if let Some(name) = r.registry.entries.keys().next() {
        return Err(Error::parse(1, 1, format!("unexpected registry block '{name}' in a plain automaton")));
    }
    Ok(r.base)
}

/// Parses a recursive automaton: registry blocks followed by (or mixed with) the main automaton.
pub fn parse_recursive(s: &str) -> Result<RecursiveAutomaton> {
    let lines = Lines::new(s, 1).items;
    let mut registry = Registry::new();
    let mut main: Vec<(usize, &str)> = Vec::new();
    let mut k = 0;
    while k < lines.len() {
        let (line, l) = lines[k];
        let t = l.trim();
        let block = ["floating ", "formula "].iter().find(|p| t.starts_with(**p));
        let Some(kw) = block else {
            main.push((line, l));
            k += 1;
            continue;
        };
        let rest = &t[kw.len()..];
        let Some(brace) = rest.find('{') else {
            return Err(Error::parse(line, 1, "expected '{' after block name"));
        };
        let name = rest[..brace].trim().to_string();
        if !is_ident(&name) {
            return Err(Error::parse(line, kw.len() + 1, format!("bad block name '{name}'")));
        }
        if registry.entries.contains_key(&name) {
            return Err(Error::parse(line, 1, format!("block '{name}' defined twice")));
        }
        // collect the body up to the matching brace
        let mut depth = 1i64;
        let mut body: Vec<(usize, String)> = Vec::new();
        let mut chunk = String::new();
        let mut cur = (line, rest[brace + 1..].to_string());
        loop {
            for ch in cur.1.chars() {
                match ch {
                    '{' => depth += 1,
                    '}' => depth -= 1,
                    _ => {}
                }
                if depth == 0 {
                    break;
                }
                chunk.push(ch);
            }
            body.push((cur.0, std::mem::take(&mut chunk)));
            if depth == 0 {
                break;
            }
            k += 1;
            if k >= lines.len() {
                return Err(Error::parse(line, 1, format!("block '{name}' is not closed")));
            }
            cur = (lines[k].0, lines[k].1.to_string());
        }
        k += 1;
        let first = body.first().map_or(line, |b| b.0);
        let text: String = body.iter().map(|(_, s)| format!("{s}\n")).collect();
        let def = if *kw == "floating " {
            let refs: Vec<(usize, &str)> = body.iter().map(|(n, s)| (*n, s.as_str())).collect();
            Definition::Floating(FloatingAutomaton::new(automaton_from_lines(&refs)?))
        } else {
            formula_def(&text, first)?
        };
        registry.insert(&name, def);
    }
    let base = automaton_from_lines(&main)?;
    Ok(RecursiveAutomaton { base, registry })
}

fn formula_def(text: &str, line: usize) -> Result<Definition> {
    let t = text.trim();
    let relocate = |e: Error| match e {
        Error::Parse { line: l, col, msg } => Error::Parse { line: l + line - 1, col, msg },
        other => other,
    };
    if t.starts_with("(fn ") {
        match param_at(t, line, 1)? {
            Param::Mso { var, body } => Ok(Definition::Mso { var, body: *body }),
            _ => unreachable!("fn parameter"),
        }
    } else {
        Ok(Definition::Ltl(parse_tltl(t).map_err(relocate)?))
    }
}

fn automaton_from_lines(lines: &[(usize, &str)]) -> Result<Idta> {
    let mut sigma: Option<Vec<Action>> = None;
    let mut ops = Vec::new();
    let mut states: Vec<String> = Vec::new();
    let mut init: Option<(usize, String)> = None;
    let mut accepting: Vec<(usize, String)> = Vec::new();
    let mut trans: Vec<(usize, String, String, SymbolicLetter)> = Vec::new();
    for &(line, l) in lines {
        let l = l.split('#').next().unwrap_or("");
        let mut c = Cursor::new(l, line, 1);
        if c.at_end() {
            continue;
        }
        let key = c.ident()?;
        match key.as_str() {
            "alphabet" => {
                let mut v = Vec::new();
                while !c.at_end() {
                    v.push(c.ident()?);
                }
                sigma = Some(v);
            }
            "operators" => {
                while !c.at_end() {
                    let (b, bl, bc) = c.token()?;
                    ops.push(binding_at(&b, bl, bc)?);
                }
            }
            "states" => {
                while !c.at_end() {
                    let s = c.ident()?;
                    if states.contains(&s) {
                        return Err(c.err(format!("state '{s}' declared twice")));
                    }
                    states.push(s);
                }
            }
            "init" => {
                let s = c.ident()?;
                init = Some((line, s));
            }
            "accepting" => {
                while !c.at_end() {
                    accepting.push((line, c.ident()?));
                }
            }
            "trans" => {
                let from = c.ident()?;
                if !c.eat_str("->") {
                    return Err(c.err("expected '->'"));
                }
                let to = c.ident()?;
                c.expect(':')?;
                c.ws();
                let (action, mark) = if c.peek() == Some('(') {
                    c.bump();
                    let a = c.ident()?;
                    c.expect(',')?;
                    c.ws();
                    let m = match c.bump() {
                        Some('0') => false,
                        Some('1') => true,
                        _ => return Err(c.err("mark must be 0 or 1")),
                    };
                    c.expect(')')?;
                    (a, Some(m))
                } else {
                    (c.ident()?, None)
                };
                let guard = if c.eat_str("[") {
                    let g = guard_or(&mut c)?;
                    c.expect(']')?;
                    g
                } else {
                    Guard::True
                };
                if !c.at_end() {
                    return Err(c.err("trailing input after transition"));
                }
                trans.push((line, from, to, SymbolicLetter { action, mark, guard }));
            }
            other => return Err(Error::parse(line, 1, format!("unknown directive '{other}'"))),
        }
    }
    let first_line = lines.first().map_or(1, |l| l.0);
    let sigma = sigma.ok_or_else(|| Error::parse(first_line, 1, "missing 'alphabet' line"))?;
    if states.is_empty() {
        return Err(Error::parse(first_line, 1, "missing 'states' line"));
    }
    let index = |line: usize, s: &str| {
        states
            .iter()
            .position(|t| t == s)
            .ok_or_else(|| Error::parse(line, 1, format!("undeclared state '{s}'")))
    };
    let mut letters: Vec<SymbolicLetter> = trans.iter().map(|t| t.3.clone()).collect();
    letters.sort();
    letters.dedup();
    let mut a = BuchiAutomaton::new(letters);
    a.set_name(0, &states[0]);
    for s in &states[1..] {
        a.add_named_state(s, false);
    }
    match &init {
        Some((line, s)) => a.set_initial(index(*line, s)?),
        None => a.set_initial(0),
    }
    for (line, s) in &accepting {
        a.set_accepting(index(*line, s)?, true);
    }
    for (line, from, to, l) in &trans {
        if !sigma.contains(&l.action) {
            return Err(Error::parse(*line, 1, format!("action '{}' is not in the alphabet", l.action)));
        }
        let (p, q) = (index(*line, from)?, index(*line, to)?);
        a.add_transition(p, l, q)?;
    }
    Ok(Idta::new(sigma, ops, a))
}

fn state_names<L: Clone + Ord>(a: &BuchiAutomaton<L>) -> Vec<String> {
    let names: Vec<String> = (0..a.num_states()).map(|q| a.name(q).to_string()).collect();
    let distinct: BTreeSet<&String> = names.iter().collect();
    if distinct.len() == names.len() && names.iter().all(|n| is_ident(n)) {
        names
    } else {
        (0..a.num_states()).map(|q| format!("q{q}")).collect()
    }
}

fn write_automaton(out: &mut String, a: &Idta, indent: &str) {
    let aut = &a.automaton;
    let names = state_names(aut);
    let _ = writeln!(out, "{indent}alphabet {}", a.sigma.join(" "));
    if !a.ops.is_empty() {
        let ops: Vec<String> = a.ops.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(out, "{indent}operators {}", ops.join(" "));
    }
    let _ = writeln!(out, "{indent}states {}", names.join(" "));
    let _ = writeln!(out, "{indent}init {}", names[aut.initial()]);
    let acc: Vec<&str> = aut.accepting_states().iter().map(|&q| names[q].as_str()).collect();
    if !acc.is_empty() {
        let _ = writeln!(out, "{indent}accepting {}", acc.join(" "));
    }
    for (p, l, q) in aut.transitions() {
        let _ = writeln!(out, "{indent}trans {} -> {} : {l}", names[p], names[q]);
    }
}

pub fn fmt_idta(a: &Idta) -> String {
    let mut out = String::new();
    write_automaton(&mut out, a, "");
    out
}

pub fn fmt_recursive(r: &RecursiveAutomaton) -> String {
    let mut out = String::new();
    for (name, d) in &r.registry.entries {
        match d {
            Definition::Floating(b) => {
                let _ = writeln!(out, "floating {name} {{");
                write_automaton(&mut out, b.idta(), "  ");
                let _ = writeln!(out, "}}");
            }
            Definition::Ltl(t) => {
                let _ = writeln!(out, "formula {name} {{ {t} }}");
            }
            Definition::Mso { var, body } => {
                let _ = writeln!(out, "formula {name} {{ (fn {var} {body}) }}");
            }
        }
    }
    write_automaton(&mut out, &r.base, "");
    out
}

/// Named registry entries collected from a file holding only blocks.
pub fn parse_registry(s: &str) -> Result<Registry> {
    let text = format!("{s}\nalphabet\nstates q\n");
    Ok(parse_recursive(&text)?.registry)
}

/// Displays a rational the way the word format reads it.
pub fn fmt_time(q: &Rational) -> String {
    fmt_rational(q)
}

/// Each registry name with the names it references, for diagnostics.
pub fn references(r: &Registry) -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    for (name, d) in &r.entries {
        let mut refs = Vec::new();
        let mut note = |b: &OperatorBinding| {
            if let Some(Param::Floating(n)) = &b.param {
                if !refs.contains(n) {
                    refs.push(n.clone());
                }
            }
        };
        match d {
            Definition::Floating(b) => b.idta().ops.iter().for_each(&mut note),
            Definition::Ltl(t) => t.atoms().iter().for_each(|(_, b)| note(b)),
            Definition::Mso { body, .. } => body.atoms().iter().for_each(|(_, b)| note(b)),
        }
        out.insert(name.clone(), refs);
    }
    out
}
