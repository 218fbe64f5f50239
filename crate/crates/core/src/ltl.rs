//! Temporal logics: TLTL with input-determined atoms, its translation to
//! first-order logic, and the metric logic MITL with its rewriting into the
//! fragment of plain untils, sinces and interval eventualities.
//!
//! All evaluation goes through position sets: each subformula denotes the
//! eventually periodic set of positions where it holds.

use std::fmt;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::mso::Mso;
use crate::operators::{atom_signal, tabulate, OperatorBinding, OperatorKind, Param, Resolver};
use crate::symbolic::{Guard, ProperAlphabet, ProperLetter};
use crate::time::{common_shape, Action, Interval, Lasso, PositionSet, TimedLasso};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tltl<P> {
    True,
    Letter(P),
    Atom(Interval, OperatorBinding),
    Not(Box<Tltl<P>>),
    Or(Box<Tltl<P>>, Box<Tltl<P>>),
    And(Box<Tltl<P>>, Box<Tltl<P>>),
    Next(Box<Tltl<P>>),
    Prev(Box<Tltl<P>>),
    /// `θ U η`: η now or later, θ at every position before it.
    Until(Box<Tltl<P>>, Box<Tltl<P>>),
    /// `θ S η`: η strictly earlier, θ at every later position up to now.
    Since(Box<Tltl<P>>, Box<Tltl<P>>),
}

impl<P: Clone> Tltl<P> {
    pub fn letter(p: P) -> Self {
        Tltl::Letter(p)
    }

    pub fn atom(i: Interval, b: OperatorBinding) -> Self {
        Tltl::Atom(i, b)
    }

    pub fn negate(self) -> Self {
        Tltl::Not(Box::new(self))
    }

    pub fn or(self, o: Self) -> Self {
        Tltl::Or(Box::new(self), Box::new(o))
    }

    pub fn and(self, o: Self) -> Self {
        Tltl::And(Box::new(self), Box::new(o))
    }

    pub fn next(self) -> Self {
        Tltl::Next(Box::new(self))
    }

    pub fn prev(self) -> Self {
        Tltl::Prev(Box::new(self))
    }

    pub fn until(self, o: Self) -> Self {
        Tltl::Until(Box::new(self), Box::new(o))
    }

    pub fn since(self, o: Self) -> Self {
        Tltl::Since(Box::new(self), Box::new(o))
    }

    pub fn all(fs: impl IntoIterator<Item = Self>) -> Self {
        fs.into_iter().reduce(Self::and).unwrap_or(Tltl::True)
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Tltl<P>)) {
        f(self);
        match self {
            Tltl::Not(g) | Tltl::Next(g) | Tltl::Prev(g) => g.visit(f),
            Tltl::Or(g, h) | Tltl::And(g, h) | Tltl::Until(g, h) | Tltl::Since(g, h) => {
                g.visit(f);
                h.visit(f);
            }
            _ => {}
        }
    }

    pub fn atoms(&self) -> Vec<(Interval, OperatorBinding)> {
        let mut out = Vec::new();
        self.visit(&mut |g| {
            if let Tltl::Atom(i, b) = g {
                if !out.contains(&(i.clone(), b.clone())) {
                    out.push((i.clone(), b.clone()));
                }
            }
        });
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Tltl::True | Tltl::Letter(_) | Tltl::Atom(..) => 0,
            Tltl::Not(g) | Tltl::Next(g) | Tltl::Prev(g) => 1 + g.depth(),
            Tltl::Or(g, h) | Tltl::And(g, h) | Tltl::Until(g, h) | Tltl::Since(g, h) => 1 + g.depth().max(h.depth()),
        }
    }
}

impl<P: fmt::Display> fmt::Display for Tltl<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tltl::True => write!(f, "true"),
            Tltl::Letter(p) => write!(f, "(atom {p})"),
            Tltl::Atom(i, b) => write!(f, "(in {i} {b})"),
            Tltl::Not(g) => write!(f, "(not {g})"),
            Tltl::Or(g, h) => write!(f, "(or {g} {h})"),
            Tltl::And(g, h) => write!(f, "(and {g} {h})"),
            Tltl::Next(g) => write!(f, "(next {g})"),
            Tltl::Prev(g) => write!(f, "(prev {g})"),
            Tltl::Until(g, h) => write!(f, "(U {g} {h})"),
            Tltl::Since(g, h) => write!(f, "(S {g} {h})"),
        }
    }
}

/// Positions where the successor belongs to `s`.
pub fn shift_next(s: &PositionSet) -> PositionSet {
    let l = s.lasso();
    if l.stem.is_empty() {
        let mut c = l.cycle.clone();
        c.rotate_left(1);
        PositionSet::from_lasso(Lasso::new(vec![], c))
    } else {
        PositionSet::from_lasso(Lasso::new(l.stem[1..].to_vec(), l.cycle.clone()))
    }
}

/// Positions whose predecessor belongs to `s`; never position 0.
pub fn shift_prev(s: &PositionSet) -> PositionSet {
    let l = s.lasso();
    let mut stem = vec![false];
    stem.extend(l.stem.iter().copied());
    PositionSet::from_lasso(Lasso::new(stem, l.cycle.clone()))
}

/// `θ U η` with `k ≥ i`.
pub fn until(theta: &PositionSet, eta: &PositionSet) -> PositionSet {
    let (s, c) = common_shape(&[
        (theta.stem_len(), theta.period()),
        (eta.stem_len(), eta.period()),
    ]);
    let t = theta.lasso().reshape(s, c);
    let e = eta.lasso().reshape(s, c);
    // two backward sweeps over the cycle settle every cycle position
    let mut cyc = vec![false; c];
    let mut next = false;
    for _ in 0..2 {
        for j in (0..c).rev() {
            next = e.cycle[j] || (t.cycle[j] && next);
            cyc[j] = next;
        }
    }
    let mut stem = vec![false; s];
    let mut next = cyc.first().copied().unwrap_or(false);
    for j in (0..s).rev() {
        next = e.stem[j] || (t.stem[j] && next);
        stem[j] = next;
    }
    PositionSet::from_lasso(Lasso::new(stem, cyc))
}

/// `θ S η` with `k < i`.
pub fn since(theta: &PositionSet, eta: &PositionSet) -> PositionSet {
    let (s, c) = common_shape(&[
        (theta.stem_len(), theta.period()),
        (eta.stem_len(), eta.period()),
    ]);
    let t = theta.lasso().reshape(s, c);
    let e = eta.lasso().reshape(s, c);
    let mut vals = Vec::new();
    // carried: (S at previous position, η at previous position)
    let mut carry = (false, false);
    let mut first = true;
    for i in 0..s {
        let v = !first && t.stem[i] && (carry.1 || carry.0);
        first = false;
        vals.push(v);
        carry = (v, e.stem[i]);
    }
    let mut starts: Vec<(bool, bool, bool)> = Vec::new();
    loop {
        let key = (first, carry.0, carry.1);
        if let Some(b) = starts.iter().position(|k| *k == key) {
            let start = s + b * c;
            let cycle = vals[start..start + c].to_vec();
            vals.truncate(start);
            return PositionSet::from_lasso(Lasso::new(vals, cycle));
        }
        starts.push(key);
        for j in 0..c {
            let v = !first && t.cycle[j] && (carry.1 || carry.0);
            first = false;
            vals.push(v);
            carry = (v, e.cycle[j]);
        }
    }
}

/// Positions where `θ` holds, with letters and atoms supplied by the callers.
pub fn tltl_signal<P: Clone>(
    f: &Tltl<P>,
    letter: &mut dyn FnMut(&P) -> Result<PositionSet>,
    atom: &mut dyn FnMut(&Interval, &OperatorBinding) -> Result<PositionSet>,
) -> Result<PositionSet> {
    Ok(match f {
        Tltl::True => PositionSet::all(),
        Tltl::Letter(p) => letter(p)?,
        Tltl::Atom(i, b) => atom(i, b)?,
        Tltl::Not(g) => tltl_signal(g, letter, atom)?.not(),
        Tltl::Or(g, h) => tltl_signal(g, letter, atom)?.or(&tltl_signal(h, letter, atom)?),
        Tltl::And(g, h) => tltl_signal(g, letter, atom)?.and(&tltl_signal(h, letter, atom)?),
        Tltl::Next(g) => shift_next(&tltl_signal(g, letter, atom)?),
        Tltl::Prev(g) => shift_prev(&tltl_signal(g, letter, atom)?),
        Tltl::Until(g, h) => until(&tltl_signal(g, letter, atom)?, &tltl_signal(h, letter, atom)?),
        Tltl::Since(g, h) => since(&tltl_signal(g, letter, atom)?, &tltl_signal(h, letter, atom)?),
    })
}

/// Positions of `word` labelled `a`.
pub fn action_positions(word: &TimedLasso, a: &str) -> PositionSet {
    PositionSet::from_lasso(word.actions().map(|b| b == a))
}

/// Positions of `word` satisfying `f`.
pub fn tltl_positions(f: &Tltl<Action>, word: &TimedLasso, env: &dyn Resolver, cfg: &Config) -> Result<PositionSet> {
    tltl_signal(
        f,
        &mut |a| Ok(action_positions(word, a)),
        &mut |i, b| atom_signal(b, i, word, env, cfg),
    )
}

/// Decides `σ, i ⊨ θ`.
pub fn tltl_eval(f: &Tltl<Action>, word: &TimedLasso, i: usize, env: &dyn Resolver, cfg: &Config) -> Result<bool> {
    Ok(tltl_positions(f, word, env, cfg)?.member(i))
}

/// Satisfaction of a letter formula on a symbolic word.
pub fn symbolic_positions<P: Clone + PartialEq>(f: &Tltl<P>, w: &Lasso<P>) -> Result<PositionSet> {
    tltl_signal(
        f,
        &mut |p| Ok(PositionSet::from_lasso(w.map(|q| q == p))),
        &mut |i, b| Err(Error::Unsupported(format!("operator atom {i} in {b} on a symbolic word"))),
    )
}

/// Guard as a formula about the current position.
pub fn guard_formula(g: &Guard) -> Tltl<Action> {
    match g {
        Guard::True => Tltl::True,
        Guard::Atom(i, b) => Tltl::atom(i.clone(), b.clone()),
        Guard::Not(h) => guard_formula(h).negate(),
        Guard::Or(a, b) => guard_formula(a).or(guard_formula(b)),
        Guard::And(a, b) => guard_formula(a).and(guard_formula(b)),
    }
}

/// Replaces each proper letter by its action and exact interval constraints.
pub fn stot(f: &Tltl<ProperLetter>, ab: &ProperAlphabet) -> Tltl<Action> {
    match f {
        Tltl::True => Tltl::True,
        Tltl::Letter(l) => {
            let g = l.to_guard(ab);
            let a = Tltl::letter(l.action.clone());
            if g.is_true() {
                a
            } else {
                a.and(guard_formula(&g))
            }
        }
        Tltl::Atom(i, b) => Tltl::atom(i.clone(), b.clone()),
        Tltl::Not(g) => stot(g, ab).negate(),
        Tltl::Or(g, h) => stot(g, ab).or(stot(h, ab)),
        Tltl::And(g, h) => stot(g, ab).and(stot(h, ab)),
        Tltl::Next(g) => stot(g, ab).next(),
        Tltl::Prev(g) => stot(g, ab).prev(),
        Tltl::Until(g, h) => stot(g, ab).until(stot(h, ab)),
        Tltl::Since(g, h) => stot(g, ab).since(stot(h, ab)),
    }
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn others(v: &str) -> (&'static str, &'static str) {
    let mut o = VARS.iter().copied().filter(|w| *w != v);
    (o.next().expect("second variable"), o.next().expect("third variable"))
}

/// First-order formula with free variable `x` holding exactly where `f` holds.
///
/// Only the variables `x`, `y`, `z` are used (plus the fresh names inside the
/// successor shorthand). Formula parameters of recursive operators are
/// translated too, each with its own free variable `x`.
pub fn tltl_to_tfo(f: &Tltl<Action>) -> Mso<Action> {
    fo_at(f, "x")
}

/// The sentence `∀x (zero(x) → φ)` asserting `f` at the first position.
pub fn tltl_to_tfo_sentence(f: &Tltl<Action>) -> Mso<Action> {
    Mso::forall("x", Mso::zero("x").implies(tltl_to_tfo(f)))
}

fn fo_binding(b: &OperatorBinding) -> OperatorBinding {
    match &b.param {
        Some(Param::Ltl(t)) => OperatorBinding {
            kind: b.kind.clone(),
            param: Some(Param::Mso {
                var: "x".into(),
                body: Box::new(tltl_to_tfo(t)),
            }),
        },
        _ => b.clone(),
    }
}

fn fo_at(f: &Tltl<Action>, v: &str) -> Mso<Action> {
    let (u, w) = others(v);
    match f {
        Tltl::True => Mso::True,
        Tltl::Letter(a) => Mso::letter(a.clone(), v),
        Tltl::Atom(i, b) => Mso::atom(i.clone(), fo_binding(b), v),
        Tltl::Not(g) => fo_at(g, v).negate(),
        Tltl::Or(g, h) => fo_at(g, v).or(fo_at(h, v)),
        Tltl::And(g, h) => fo_at(g, v).and(fo_at(h, v)),
        Tltl::Next(g) => Mso::exists(u, Mso::succ(v, u).and(fo_at(g, u))),
        Tltl::Prev(g) => Mso::exists(u, Mso::succ(u, v).and(fo_at(g, u))),
        Tltl::Until(g, h) => Mso::exists(
            u,
            Mso::le(v, u)
                .and(fo_at(h, u))
                .and(Mso::forall(w, Mso::le(v, w).and(Mso::less(w, u)).implies(fo_at(g, w)))),
        ),
        Tltl::Since(g, h) => Mso::exists(
            u,
            Mso::less(u, v)
                .and(fo_at(h, u))
                .and(Mso::forall(w, Mso::less(u, w).and(Mso::le(w, v)).implies(fo_at(g, w)))),
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mitl {
    True,
    Act(Action),
    Not(Box<Mitl>),
    Or(Box<Mitl>, Box<Mitl>),
    And(Box<Mitl>, Box<Mitl>),
    Next(Box<Mitl>),
    Prev(Box<Mitl>),
    Until(Box<Mitl>, Box<Mitl>),
    Since(Box<Mitl>, Box<Mitl>),
    /// `θ U_I η`: η at some `k ≥ i` at a distance in `I`, θ on `[i, k)`.
    UntilIn(Interval, Box<Mitl>, Box<Mitl>),
    /// `θ S_I η`: η at some `k ≤ i` at a distance in `I`, θ on `(k, i]`.
    SinceIn(Interval, Box<Mitl>, Box<Mitl>),
    /// `true U_I θ`.
    Eventually(Interval, Box<Mitl>),
    /// `true S_I θ`.
    Once(Interval, Box<Mitl>),
    /// `¬ Eventually_I ¬θ`.
    Always(Interval, Box<Mitl>),
    /// `¬ Once_I ¬θ`.
    Historically(Interval, Box<Mitl>),
}

impl Mitl {
    pub fn act(a: &str) -> Self {
        Mitl::Act(a.into())
    }

    pub fn negate(self) -> Self {
        Mitl::Not(Box::new(self))
    }

    pub fn or(self, o: Self) -> Self {
        Mitl::Or(Box::new(self), Box::new(o))
    }

    pub fn and(self, o: Self) -> Self {
        Mitl::And(Box::new(self), Box::new(o))
    }

    pub fn next(self) -> Self {
        Mitl::Next(Box::new(self))
    }

    pub fn prev(self) -> Self {
        Mitl::Prev(Box::new(self))
    }

    pub fn until(self, o: Self) -> Self {
        Mitl::Until(Box::new(self), Box::new(o))
    }

    pub fn since(self, o: Self) -> Self {
        Mitl::Since(Box::new(self), Box::new(o))
    }

    pub fn until_in(self, i: Interval, o: Self) -> Self {
        Mitl::UntilIn(i, Box::new(self), Box::new(o))
    }

    pub fn since_in(self, i: Interval, o: Self) -> Self {
        Mitl::SinceIn(i, Box::new(self), Box::new(o))
    }

    pub fn eventually(i: Interval, f: Self) -> Self {
        Mitl::Eventually(i, Box::new(f))
    }

    pub fn once(i: Interval, f: Self) -> Self {
        Mitl::Once(i, Box::new(f))
    }

    pub fn always(i: Interval, f: Self) -> Self {
        Mitl::Always(i, Box::new(f))
    }

    pub fn historically(i: Interval, f: Self) -> Self {
        Mitl::Historically(i, Box::new(f))
    }

    pub fn intervals(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        self.visit(&mut |f| match f {
            Mitl::UntilIn(i, ..)
            | Mitl::SinceIn(i, ..)
            | Mitl::Eventually(i, _)
            | Mitl::Once(i, _)
            | Mitl::Always(i, _)
            | Mitl::Historically(i, _) => out.push(i.clone()),
            _ => {}
        });
        out
    }

    /// Every interval is non-singular.
    pub fn is_non_singular(&self) -> bool {
        self.intervals().iter().all(|i| !i.is_singular())
    }

    /// Uses only plain until/since and interval eventualities.
    pub fn is_diamond_fragment(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |f| {
            if matches!(f, Mitl::UntilIn(..) | Mitl::SinceIn(..)) {
                ok = false;
            }
        });
        ok
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Mitl)) {
        f(self);
        match self {
            Mitl::Not(g)
            | Mitl::Next(g)
            | Mitl::Prev(g)
            | Mitl::Eventually(_, g)
            | Mitl::Once(_, g)
            | Mitl::Always(_, g)
            | Mitl::Historically(_, g) => g.visit(f),
            Mitl::Or(g, h)
            | Mitl::And(g, h)
            | Mitl::Until(g, h)
            | Mitl::Since(g, h)
            | Mitl::UntilIn(_, g, h)
            | Mitl::SinceIn(_, g, h) => {
                g.visit(f);
                h.visit(f);
            }
            _ => {}
        }
    }
}

impl fmt::Display for Mitl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mitl::True => write!(f, "true"),
            Mitl::Act(a) => write!(f, "(atom {a})"),
            Mitl::Not(g) => write!(f, "(not {g})"),
            Mitl::Or(g, h) => write!(f, "(or {g} {h})"),
            Mitl::And(g, h) => write!(f, "(and {g} {h})"),
            Mitl::Next(g) => write!(f, "(next {g})"),
            Mitl::Prev(g) => write!(f, "(prev {g})"),
            Mitl::Until(g, h) => write!(f, "(U {g} {h})"),
            Mitl::Since(g, h) => write!(f, "(S {g} {h})"),
            Mitl::UntilIn(i, g, h) => write!(f, "(UI {i} {g} {h})"),
            Mitl::SinceIn(i, g, h) => write!(f, "(SI {i} {g} {h})"),
            Mitl::Eventually(i, g) => write!(f, "(FI {i} {g})"),
            Mitl::Once(i, g) => write!(f, "(PI {i} {g})"),
            Mitl::Always(i, g) => write!(f, "(GI {i} {g})"),
            Mitl::Historically(i, g) => write!(f, "(HI {i} {g})"),
        }
    }
}

/// Forward scan for `θ U_I η` at `i`.
fn until_in_at(word: &TimedLasso, interval: &Interval, theta: &PositionSet, eta: &PositionSet, i: usize) -> bool {
    let periodic_from = i.max(theta.stem_len()).max(eta.stem_len()).max(word.stem_len());
    let unit = common_shape(&[(0, theta.period()), (0, eta.period()), (0, word.period_len())]).1;
    let mut k = i;
    let mut settled: Option<usize> = None;
    loop {
        let d = word.dist(i, k);
        if interval.exceeded_by(d) {
            return false;
        }
        if eta.member(k) && interval.contains(d) {
            return true;
        }
        if !theta.member(k) {
            return false;
        }
        if !interval.is_bounded() && interval.contains(d) {
            // a full period inside the window without η means η never comes
            let start = *settled.get_or_insert(k.max(periodic_from));
            if k + 1 >= start + unit {
                return false;
            }
        }
        k += 1;
    }
}

/// Backward scan for `θ S_I η` at `i`.
fn since_in_at(word: &TimedLasso, interval: &Interval, theta: &PositionSet, eta: &PositionSet, i: usize) -> bool {
    let mut k = i;
    loop {
        let d = word.dist(k, i);
        if interval.exceeded_by(d) {
            return false;
        }
        if eta.member(k) && interval.contains(d) {
            return true;
        }
        if k == 0 || !theta.member(k) {
            return false;
        }
        k -= 1;
    }
}

fn mitl_positions(f: &Mitl, word: &TimedLasso, cfg: &Config) -> Result<PositionSet> {
    let rec = |g: &Mitl| mitl_positions(g, word, cfg);
    let shape = |s: &PositionSet| (s.stem_len(), s.period());
    Ok(match f {
        Mitl::True => PositionSet::all(),
        Mitl::Act(a) => action_positions(word, a),
        Mitl::Not(g) => rec(g)?.not(),
        Mitl::Or(g, h) => rec(g)?.or(&rec(h)?),
        Mitl::And(g, h) => rec(g)?.and(&rec(h)?),
        Mitl::Next(g) => shift_next(&rec(g)?),
        Mitl::Prev(g) => shift_prev(&rec(g)?),
        Mitl::Until(g, h) => until(&rec(g)?, &rec(h)?),
        Mitl::Since(g, h) => since(&rec(g)?, &rec(h)?),
        Mitl::UntilIn(i, g, h) => {
            let (t, e) = (rec(g)?, rec(h)?);
            tabulate(word, &[shape(&t), shape(&e)], None, cfg, &|| f.to_string(), |k| {
                Ok(until_in_at(word, i, &t, &e, k))
            })?
        }
        Mitl::SinceIn(i, g, h) => {
            let (t, e) = (rec(g)?, rec(h)?);
            tabulate(word, &[shape(&t), shape(&e)], Some(i.reach()), cfg, &|| f.to_string(), |k| {
                Ok(since_in_at(word, i, &t, &e, k))
            })?
        }
        Mitl::Eventually(i, g) => rec(&Mitl::True.until_in(i.clone(), (**g).clone()))?,
        Mitl::Once(i, g) => rec(&Mitl::True.since_in(i.clone(), (**g).clone()))?,
        Mitl::Always(i, g) => rec(&Mitl::eventually(i.clone(), g.as_ref().clone().negate()))?.not(),
        Mitl::Historically(i, g) => rec(&Mitl::once(i.clone(), g.as_ref().clone().negate()))?.not(),
    })
}

/// Pointwise satisfaction `σ, i ⊨ θ`.
pub fn mitl_eval(f: &Mitl, word: &TimedLasso, i: usize, cfg: &Config) -> Result<bool> {
    Ok(mitl_positions(f, word, cfg)?.member(i))
}

pub fn mitl_positions_of(f: &Mitl, word: &TimedLasso, cfg: &Config) -> Result<PositionSet> {
    mitl_positions(f, word, cfg)
}

/// Interval `[0, a)` or `[0, a]`, the window before the left end of `i`.
fn window_before(i: &Interval) -> Interval {
    Interval::new(num_traits::Zero::zero(), true, Some(i.lo()), !i.lo_closed()).expect("window below a positive left end")
}

/// Rewrites interval untils and sinces into the fragment of plain
/// until/since and interval eventualities.
pub fn mitl_to_diamond(f: &Mitl) -> Mitl {
    let r = |g: &Mitl| Box::new(mitl_to_diamond(g));
    match f {
        Mitl::True | Mitl::Act(_) => f.clone(),
        Mitl::Not(g) => Mitl::Not(r(g)),
        Mitl::Or(g, h) => Mitl::Or(r(g), r(h)),
        Mitl::And(g, h) => Mitl::And(r(g), r(h)),
        Mitl::Next(g) => Mitl::Next(r(g)),
        Mitl::Prev(g) => Mitl::Prev(r(g)),
        Mitl::Until(g, h) => Mitl::Until(r(g), r(h)),
        Mitl::Since(g, h) => Mitl::Since(r(g), r(h)),
        Mitl::Eventually(i, g) => Mitl::Eventually(i.clone(), r(g)),
        Mitl::Once(i, g) => Mitl::Once(i.clone(), r(g)),
        Mitl::Always(i, g) => Mitl::Always(i.clone(), r(g)),
        Mitl::Historically(i, g) => Mitl::Historically(i.clone(), r(g)),
        Mitl::UntilIn(i, g, h) => {
            let (t, e) = (mitl_to_diamond(g), mitl_to_diamond(h));
            let reach = Mitl::eventually(i.clone(), e.clone());
            let zero = i.lo() == num_traits::Zero::zero();
            let tail = if zero && i.lo_closed() {
                t.until(e)
            } else {
                t.clone().until(t.and(e.next()))
            };
            if zero {
                reach.and(tail)
            } else {
                reach.and(Mitl::always(window_before(i), tail))
            }
        }
        Mitl::SinceIn(i, g, h) => {
            let (t, e) = (mitl_to_diamond(g), mitl_to_diamond(h));
            let reach = Mitl::once(i.clone(), e.clone());
            let zero = i.lo() == num_traits::Zero::zero();
            let tail = if zero && i.lo_closed() {
                e.clone().or(t.since(e))
            } else {
                t.since(e)
            };
            if zero {
                reach.and(tail)
            } else {
                reach.and(Mitl::historically(window_before(i), tail))
            }
        }
    }
}

/// Reads a fragment formula as a recursive temporal formula over the
/// future and past interval operators.
pub fn diamond_to_rtltl(f: &Mitl) -> Result<Tltl<Action>> {
    let fut = |i: &Interval, g: Tltl<Action>| {
        Tltl::atom(
            i.clone(),
            OperatorBinding::recursive(OperatorKind::RecFuture, Param::Ltl(Box::new(g))),
        )
    };
    let past = |i: &Interval, g: Tltl<Action>| {
        Tltl::atom(
            i.clone(),
            OperatorBinding::recursive(OperatorKind::RecPast, Param::Ltl(Box::new(g))),
        )
    };
    Ok(match f {
        Mitl::True => Tltl::True,
        Mitl::Act(a) => Tltl::letter(a.clone()),
        Mitl::Not(g) => diamond_to_rtltl(g)?.negate(),
        Mitl::Or(g, h) => diamond_to_rtltl(g)?.or(diamond_to_rtltl(h)?),
        Mitl::And(g, h) => diamond_to_rtltl(g)?.and(diamond_to_rtltl(h)?),
        Mitl::Next(g) => diamond_to_rtltl(g)?.next(),
        Mitl::Prev(g) => diamond_to_rtltl(g)?.prev(),
        Mitl::Until(g, h) => diamond_to_rtltl(g)?.until(diamond_to_rtltl(h)?),
        Mitl::Since(g, h) => diamond_to_rtltl(g)?.since(diamond_to_rtltl(h)?),
        Mitl::Eventually(i, g) => fut(i, diamond_to_rtltl(g)?),
        Mitl::Once(i, g) => past(i, diamond_to_rtltl(g)?),
        Mitl::Always(i, g) => fut(i, diamond_to_rtltl(g)?.negate()).negate(),
        Mitl::Historically(i, g) => past(i, diamond_to_rtltl(g)?.negate()).negate(),
        Mitl::UntilIn(..) | Mitl::SinceIn(..) => {
            return Err(Error::Unsupported(format!("{f} is outside the eventuality fragment")))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::NoResolver;
    use crate::time::{int, rat};

    fn sigma1() -> TimedLasso {
        TimedLasso::new(
            vec![("a".into(), int(0)), ("b".into(), int(1))],
            vec![("a".into(), int(2)), ("b".into(), int(3))],
            int(2),
        )
        .unwrap()
    }

    fn a() -> Tltl<Action> {
        Tltl::letter("a".into())
    }

    fn b() -> Tltl<Action> {
        Tltl::letter("b".into())
    }

    #[test]
    fn basic_temporal() {
        let w = sigma1();
        let cfg = Config::default();
        assert!(tltl_eval(&a(), &w, 0, &NoResolver, &cfg).unwrap());
        assert!(!tltl_eval(&b().prev(), &w, 0, &NoResolver, &cfg).unwrap());
        assert!(tltl_eval(&a().until(b()), &w, 0, &NoResolver, &cfg).unwrap());
        let la = Tltl::atom(Interval::point(int(1)), OperatorBinding::last("a"));
        assert!(tltl_eval(&la, &w, 1, &NoResolver, &cfg).unwrap());
        // strict since: a S b needs a b strictly before
        assert!(!tltl_eval(&a().since(b()), &w, 1, &NoResolver, &cfg).unwrap());
        assert!(tltl_eval(&a().since(b()), &w, 2, &NoResolver, &cfg).unwrap());
    }

    #[test]
    fn until_on_cycle() {
        let t = PositionSet::new(&[], &[0, 1], 0, 3);
        let e = PositionSet::new(&[], &[2], 0, 3);
        let u = until(&t, &e);
        assert_eq!(u, PositionSet::all());
        let never = until(&PositionSet::all(), &PositionSet::empty());
        assert_eq!(never, PositionSet::empty());
    }

    #[test]
    fn since_carries_through_cycles() {
        let e = PositionSet::new(&[0], &[], 1, 1);
        let s = since(&PositionSet::all(), &e);
        assert!(!s.member(0));
        for i in 1..10 {
            assert!(s.member(i));
        }
    }

    #[test]
    fn fo_translation_shape() {
        let f = tltl_to_tfo(&a().until(b()));
        let want = Mso::exists(
            "y",
            Mso::le("x", "y").and(Mso::letter("b".to_string(), "y")).and(Mso::forall(
                "z",
                Mso::le("x", "z").and(Mso::less("z", "y")).implies(Mso::letter("a".to_string(), "z")),
            )),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn metric_until() {
        let w = sigma1();
        let cfg = Config::default();
        let i12 = Interval::closed(int(1), int(2));
        let oc12 = Interval::new(int(1), false, Some(int(2)), true).unwrap();
        assert!(mitl_eval(&Mitl::act("a").until_in(i12, Mitl::act("b")), &w, 0, &cfg).unwrap());
        assert!(!mitl_eval(&Mitl::act("a").until_in(oc12, Mitl::act("b")), &w, 0, &cfg).unwrap());
        assert!(mitl_eval(&Mitl::eventually(Interval::point(int(0)), Mitl::act("a")), &w, 0, &cfg).unwrap());
    }

    #[test]
    fn rewrite_rows() {
        let t = Mitl::act("a");
        let e = Mitl::act("b");
        let i23 = Interval::closed(int(2), int(3));
        let r = mitl_to_diamond(&t.clone().until_in(i23.clone(), e.clone()));
        let want = Mitl::eventually(i23, e.clone()).and(Mitl::always(
            Interval::new(int(0), true, Some(int(2)), false).unwrap(),
            t.clone().until(t.clone().and(e.clone().next())),
        ));
        assert_eq!(r, want);
        let oc = Interval::new(int(0), false, Some(int(5)), true).unwrap();
        let r = mitl_to_diamond(&t.clone().until_in(oc.clone(), e.clone()));
        assert_eq!(r, Mitl::eventually(oc, e.clone()).and(t.clone().until(t.clone().and(e.clone().next()))));
        let co = Interval::new(int(0), true, Some(int(5)), false).unwrap();
        let r = mitl_to_diamond(&t.clone().until_in(co.clone(), e.clone()));
        assert_eq!(r, Mitl::eventually(co, e.clone()).and(t.until(e)));
    }

    #[test]
    fn zero_left_open_row_needs_distinct_times() {
        // c@0 b@0 b@1/2: the b at distance 1/2 is blocked by the simultaneous b
        let w = TimedLasso::new(
            vec![("c".into(), int(0)), ("b".into(), int(0))],
            vec![("b".into(), rat(1, 2))],
            int(1),
        )
        .unwrap();
        let cfg = Config::default();
        let oc = Interval::new(int(0), false, Some(int(1)), true).unwrap();
        let f = Mitl::act("c").until_in(oc, Mitl::act("b"));
        assert!(!mitl_eval(&f, &w, 0, &cfg).unwrap());
        assert!(mitl_eval(&mitl_to_diamond(&f), &w, 0, &cfg).unwrap());
    }

    #[test]
    fn diamond_reading() {
        let f = Mitl::always(Interval::new(int(0), true, Some(int(2)), false).unwrap(), Mitl::act("a"));
        let t = diamond_to_rtltl(&f).unwrap();
        match t {
            Tltl::Not(inner) => assert!(matches!(*inner, Tltl::Atom(..))),
            other => panic!("unexpected {other}"),
        }
        assert!(diamond_to_rtltl(&Mitl::act("a").until_in(Interval::point(int(1)), Mitl::act("b"))).is_err());
    }
}
