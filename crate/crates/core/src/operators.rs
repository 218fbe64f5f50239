//! Input-determined operators and their recursive forms.
//!
//! Every atomic guard `I ∈ Δ` is decided exactly at a single position by a
//! bounded scan of the word. [`atom_signal`] turns the per-position answers
//! into an eventually periodic [`PositionSet`], using a horizon derived from
//! the interval so that the periodic part is read off soundly.

use std::fmt;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::ltl::Tltl;
use crate::mso::Mso;
use crate::time::{common_shape, Action, Interval, Lasso, PositionSet, Rational, TimedLasso};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperatorKind {
    /// Distance to the last earlier `a`.
    LastDist(Action),
    /// Distance to the next later `a`.
    NextDist(Action),
    /// Some `a` at or after the position at a distance in the interval.
    FutureDist(Action),
    /// Some `a` at or before the position at a distance in the interval.
    PastDist(Action),
    RecFuture,
    RecPast,
    /// A plain operator viewed as recursive; the position-set argument is ignored.
    Lifted(Box<OperatorKind>),
}

impl OperatorKind {
    pub fn is_recursive(&self) -> bool {
        matches!(self, OperatorKind::RecFuture | OperatorKind::RecPast | OperatorKind::Lifted(_))
    }

    fn looks_back(&self) -> bool {
        match self {
            OperatorKind::LastDist(_) | OperatorKind::PastDist(_) | OperatorKind::RecPast => true,
            OperatorKind::Lifted(k) => k.looks_back(),
            _ => false,
        }
    }

    pub fn action(&self) -> Option<&Action> {
        match self {
            OperatorKind::LastDist(a)
            | OperatorKind::NextDist(a)
            | OperatorKind::FutureDist(a)
            | OperatorKind::PastDist(a) => Some(a),
            OperatorKind::Lifted(k) => k.action(),
            _ => None,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorKind::LastDist(a) => write!(f, "last_{a}"),
            OperatorKind::NextDist(a) => write!(f, "next_{a}"),
            OperatorKind::FutureDist(a) => write!(f, "fut_{a}"),
            OperatorKind::PastDist(a) => write!(f, "past_{a}"),
            OperatorKind::RecFuture => write!(f, "F"),
            OperatorKind::RecPast => write!(f, "P"),
            OperatorKind::Lifted(k) => write!(f, "lift_{k}"),
        }
    }
}

/// Argument of a recursive operator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    /// Floating automaton declared in a registry.
    Floating(String),
    /// Temporal formula; positions where it holds.
    Ltl(Box<Tltl<Action>>),
    /// Monadic formula with one free first-order variable.
    Mso { var: String, body: Box<Mso<Action>> },
    Positions(PositionSet),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Floating(n) => write!(f, "{n}"),
            Param::Ltl(t) => write!(f, "{t}"),
            Param::Mso { var, body } => write!(f, "(fn {var} {body})"),
            Param::Positions(x) => write!(f, "<{x}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperatorBinding {
    pub kind: OperatorKind,
    pub param: Option<Param>,
}

impl OperatorBinding {
    pub fn plain(kind: OperatorKind) -> Self {
        assert!(!kind.is_recursive());
        OperatorBinding { kind, param: None }
    }

    pub fn recursive(kind: OperatorKind, param: Param) -> Self {
        assert!(kind.is_recursive());
        OperatorBinding {
            kind,
            param: Some(param),
        }
    }

    pub fn last(a: &str) -> Self {
        Self::plain(OperatorKind::LastDist(a.into()))
    }

    pub fn next(a: &str) -> Self {
        Self::plain(OperatorKind::NextDist(a.into()))
    }

    pub fn fut(a: &str) -> Self {
        Self::plain(OperatorKind::FutureDist(a.into()))
    }

    pub fn past(a: &str) -> Self {
        Self::plain(OperatorKind::PastDist(a.into()))
    }

    pub fn is_well_formed(&self) -> bool {
        self.kind.is_recursive() == self.param.is_some()
    }
}

impl fmt::Display for OperatorBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.param {
            None => write!(f, "{}", self.kind),
            Some(p) => write!(f, "{}{{{}}}", self.kind, p),
        }
    }
}

/// Supplies the position sets denoted by recursive parameters.
pub trait Resolver {
    fn positions(&self, param: &Param, word: &TimedLasso) -> Result<PositionSet>;
}

/// Resolves only explicit position sets.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoResolver;

impl Resolver for NoResolver {
    fn positions(&self, param: &Param, _word: &TimedLasso) -> Result<PositionSet> {
        match param {
            Param::Positions(x) => Ok(x.clone()),
            other => Err(Error::UnresolvedBinding(other.to_string())),
        }
    }
}

/// Decides `I ∈ ⟦Δ⟧(σ, i)` for a non-recursive operator.
pub fn eval_operator_guard(kind: &OperatorKind, interval: &Interval, word: &TimedLasso, i: usize) -> bool {
    match kind {
        OperatorKind::LastDist(a) => (0..i)
            .rev()
            .find(|&j| word.action(j) == a)
            .is_some_and(|j| interval.contains(word.dist(j, i))),
        OperatorKind::NextDist(a) => {
            let limit = (i + 1).max(word.stem_len()) + word.period_len();
            (i + 1..limit)
                .find(|&j| word.action(j) == a)
                .is_some_and(|j| interval.contains(word.dist(i, j)))
        }
        OperatorKind::FutureDist(a) => {
            let periodic = word.period().iter().any(|(b, _)| b == a);
            scan_future(word, interval, i, periodic, word.stem_len(), |j| word.action(j) == a)
        }
        OperatorKind::PastDist(a) => scan_past(word, interval, i, |j| word.action(j) == a),
        OperatorKind::Lifted(k) => eval_operator_guard(k, interval, word, i),
        OperatorKind::RecFuture | OperatorKind::RecPast => {
            panic!("recursive operator {kind} evaluated without a position set")
        }
    }
}

/// Decides `I ∈ ⟦Δ⟧(X, σ, i)` for a recursive operator.
pub fn eval_recursive_operator(
    kind: &OperatorKind,
    set: &PositionSet,
    interval: &Interval,
    word: &TimedLasso,
    i: usize,
) -> bool {
    match kind {
        OperatorKind::RecFuture => scan_future(
            word,
            interval,
            i,
            set.has_periodic_members(),
            set.stem_len(),
            |j| set.member(j),
        ),
        OperatorKind::RecPast => scan_past(word, interval, i, |j| set.member(j)),
        OperatorKind::Lifted(k) => eval_operator_guard(k, interval, word, i),
        other => eval_operator_guard(other, interval, word, i),
    }
}

/// ∃ j ≥ i with `hit(j)` and τ_j − τ_i ∈ I. `periodic` says hits recur
/// forever; every other hit lies below `finite_below`.
fn scan_future(
    word: &TimedLasso,
    interval: &Interval,
    i: usize,
    periodic: bool,
    finite_below: usize,
    hit: impl Fn(usize) -> bool,
) -> bool {
    if !interval.is_bounded() {
        if periodic {
            return true;
        }
        return (i..finite_below).any(|j| hit(j) && interval.contains(word.dist(i, j)));
    }
    let mut j = i;
    loop {
        let d = word.dist(i, j);
        if interval.exceeded_by(d) {
            return false;
        }
        if hit(j) && interval.contains(d) {
            return true;
        }
        j += 1;
    }
}

fn scan_past(word: &TimedLasso, interval: &Interval, i: usize, hit: impl Fn(usize) -> bool) -> bool {
    for j in (0..=i).rev() {
        let d = word.dist(j, i);
        if interval.exceeded_by(d) {
            return false;
        }
        if hit(j) && interval.contains(d) {
            return true;
        }
    }
    false
}

/// Decides an atomic guard, resolving a recursive parameter through `env`.
pub fn eval_atom(
    binding: &OperatorBinding,
    interval: &Interval,
    word: &TimedLasso,
    i: usize,
    env: &dyn Resolver,
) -> Result<bool> {
    match &binding.param {
        None => Ok(eval_operator_guard(&binding.kind, interval, word, i)),
        Some(p) => {
            let set = env.positions(p, word)?;
            Ok(eval_recursive_operator(&binding.kind, &set, interval, word, i))
        }
    }
}

/// Tabulates an eventually periodic boolean sequence over `word`.
///
/// `deps` are the shapes of the sequences `value` reads; when `reach` is set
/// the value at a position also looks back over distances up to `reach`.
/// The sequence is computed over enough blocks that the window no longer
/// touches the non-periodic prefix, then the last block is checked against
/// the one after it.
pub(crate) fn tabulate(
    word: &TimedLasso,
    deps: &[(usize, usize)],
    reach: Option<Rational>,
    cfg: &Config,
    what: &dyn Fn() -> String,
    mut value: impl FnMut(usize) -> Result<bool>,
) -> Result<PositionSet> {
    let mut shapes = deps.to_vec();
    shapes.push((word.stem_len(), word.period_len()));
    let (base, unit0) = common_shape(&shapes);
    let unit = unit0.lcm(&word.period_len());
    let block_shift = word.shift() * Rational::from_integer((unit / word.period_len()) as i64);
    let extra = match reach {
        None => 0,
        Some(m) => (m / block_shift).ceil().to_usize().unwrap_or(usize::MAX / 4) + 2,
    };
    let blocks = cfg.stabilize_k.max(extra);
    let stem_len = base + blocks * unit;
    let mut vals = Vec::with_capacity(stem_len + 2 * unit);
    for i in 0..stem_len + 2 * unit {
        vals.push(value(i)?);
    }
    if vals[stem_len..stem_len + unit] != vals[stem_len + unit..] {
        return Err(Error::PeriodicityNotDetected(what()));
    }
    let cycle = vals[stem_len..stem_len + unit].to_vec();
    vals.truncate(stem_len);
    Ok(PositionSet::from_lasso(Lasso::new(vals, cycle)))
}

/// Positions where `I ∈ Δ` holds.
pub fn atom_signal(
    binding: &OperatorBinding,
    interval: &Interval,
    word: &TimedLasso,
    env: &dyn Resolver,
    cfg: &Config,
) -> Result<PositionSet> {
    let reach = binding.kind.looks_back().then(|| interval.reach());
    let what = || format!("{interval} in {binding}");
    match &binding.param {
        None => tabulate(word, &[], reach, cfg, &what, |i| {
            Ok(eval_operator_guard(&binding.kind, interval, word, i))
        }),
        Some(p) => {
            let set = env.positions(p, word)?;
            tabulate(word, &[(set.stem_len(), set.period())], reach, cfg, &what, |i| {
                Ok(eval_recursive_operator(&binding.kind, &set, interval, word, i))
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{int, rat};

    fn sigma1() -> TimedLasso {
        TimedLasso::new(
            vec![("a".into(), int(0)), ("b".into(), int(1))],
            vec![("a".into(), int(2)), ("b".into(), int(3))],
            int(2),
        )
        .unwrap()
    }

    fn la() -> OperatorKind {
        OperatorKind::LastDist("a".into())
    }

    #[test]
    fn last_distance() {
        let w = sigma1();
        assert!(eval_operator_guard(&la(), &Interval::point(int(1)), &w, 1));
        assert!(!eval_operator_guard(&la(), &Interval::at_least(int(0)), &w, 0));
        // at an a-position the last a is the previous one
        assert!(eval_operator_guard(&la(), &Interval::point(int(2)), &w, 2));
    }

    #[test]
    fn future_distance() {
        let w = sigma1();
        let fa = OperatorKind::FutureDist("a".into());
        assert!(eval_operator_guard(&fa, &Interval::point(int(0)), &w, 0));
        assert!(eval_operator_guard(&fa, &Interval::point(int(1)), &w, 1));
        assert!(!eval_operator_guard(&fa, &Interval::point(int(1)), &w, 0));
        assert!(eval_operator_guard(&fa, &Interval::at_least(int(100)), &w, 3));
        let na = OperatorKind::NextDist("a".into());
        assert!(eval_operator_guard(&na, &Interval::point(int(2)), &w, 0));
        let past = OperatorKind::PastDist("b".into());
        assert!(!eval_operator_guard(&past, &Interval::at_least(int(0)), &w, 0));
        assert!(eval_operator_guard(&past, &Interval::closed(int(2), int(2)), &w, 3));
    }

    #[test]
    fn no_future_a_when_period_lacks_it() {
        let w = TimedLasso::new(vec![("a".into(), int(0))], vec![("b".into(), int(1))], int(1)).unwrap();
        let fa = OperatorKind::FutureDist("a".into());
        assert!(!eval_operator_guard(&fa, &Interval::at_least(int(0)), &w, 1));
        assert!(eval_operator_guard(&fa, &Interval::at_least(int(0)), &w, 0));
        let na = OperatorKind::NextDist("a".into());
        assert!(!eval_operator_guard(&na, &Interval::at_least(int(0)), &w, 0));
    }

    #[test]
    fn recursive_operators_on_odd_positions() {
        let w = sigma1();
        let odd = PositionSet::new(&[], &[0], 1, 2);
        let f = OperatorKind::RecFuture;
        assert!(eval_recursive_operator(&f, &odd, &Interval::point(int(1)), &w, 0));
        assert!(!eval_recursive_operator(
            &OperatorKind::RecPast,
            &odd,
            &Interval::at_least(int(0)),
            &w,
            0
        ));
        assert!(eval_recursive_operator(&f, &odd, &Interval::at_least(int(10)), &w, 0));
    }

    #[test]
    fn recursive_future_over_a_positions_is_future_a() {
        let w = sigma1();
        let a_pos = PositionSet::new(&[], &[0], 0, 2);
        let fa = OperatorKind::FutureDist("a".into());
        for iv in [
            Interval::point(int(1)),
            Interval::point(int(2)),
            Interval::new(int(0), false, Some(int(2)), false).unwrap(),
            Interval::at_least(int(3)),
        ] {
            for i in 0..10 {
                assert_eq!(
                    eval_recursive_operator(&OperatorKind::RecFuture, &a_pos, &iv, &w, i),
                    eval_operator_guard(&fa, &iv, &w, i)
                );
            }
        }
    }

    #[test]
    fn last_distance_is_functional() {
        let w = TimedLasso::new(vec![("a".into(), int(0))], vec![("b".into(), rat(1, 2))], rat(1, 2)).unwrap();
        // distance to the last a at position 3 is 3/2: exactly the intervals containing it hold
        assert!(eval_operator_guard(&la(), &Interval::point(rat(3, 2)), &w, 3));
        assert!(!eval_operator_guard(&la(), &Interval::point(int(1)), &w, 3));
        assert!(eval_operator_guard(&la(), &Interval::closed(int(1), int(2)), &w, 3));
    }

    #[test]
    fn signal_for_receding_last_a() {
        // the only a is at time 0; [5,5] holds only at time 5, deep in the period
        let w = TimedLasso::new(vec![("a".into(), int(0))], vec![("b".into(), int(1))], int(1)).unwrap();
        let b = OperatorBinding::last("a");
        let s = atom_signal(&b, &Interval::point(int(5)), &w, &NoResolver, &Config::default()).unwrap();
        for i in 0..20 {
            assert_eq!(s.member(i), i == 5, "position {i}");
        }
    }

    #[test]
    fn unresolved_binding() {
        let w = sigma1();
        let b = OperatorBinding::recursive(OperatorKind::RecFuture, Param::Floating("B".into()));
        assert!(matches!(
            eval_atom(&b, &Interval::point(int(1)), &w, 0, &NoResolver),
            Err(Error::UnresolvedBinding(_))
        ));
    }
}
