//! Reference oracles and seeded random generators for the property suites.

use std::collections::{BTreeMap, HashMap};

use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ltl::{Mitl, Tltl};
use crate::mso::Mso;
use crate::omega::BuchiAutomaton;
use crate::operators::{OperatorBinding, OperatorKind};
use crate::symbolic::{Guard, Idta, SymbolicLetter};
use crate::time::{int, rat, Action, Interval, Rational, TimedLasso};

/// Shape bounds and vocabularies for random instances.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub max_states: usize,
    pub max_formula_depth: usize,
    pub intervals: Vec<Interval>,
    pub actions: Vec<Action>,
    pub max_stem: usize,
    pub max_period: usize,
    /// Operators available to guards and atoms.
    pub ops: Vec<OperatorBinding>,
    /// Generate strictly increasing timestamps.
    pub strict_time: bool,
}

/// `[0,1)`, `[1,1]`, `[1,2]`, `(0,1)`, `[2,∞)`.
pub fn default_intervals() -> Vec<Interval> {
    vec![
        Interval::new(int(0), true, Some(int(1)), false).expect("valid"),
        Interval::point(int(1)),
        Interval::closed(int(1), int(2)),
        Interval::new(int(0), false, Some(int(1)), false).expect("valid"),
        Interval::at_least(int(2)),
    ]
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_states: 4,
            max_formula_depth: 3,
            intervals: default_intervals(),
            actions: vec!["a".into(), "b".into()],
            max_stem: 4,
            max_period: 4,
            ops: vec![OperatorBinding::last("a"), OperatorBinding::next("a")],
            strict_time: false,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Unsupported(format!("generator config: {what}")));
        if self.max_states == 0 || self.max_period == 0 {
            return bad("state and period bounds must be positive");
        }
        if self.intervals.is_empty() || self.actions.is_empty() {
            return bad("interval pool and action alphabet must be non-empty");
        }
        if self.ops.iter().any(|b| b.param.is_some()) {
            return bad("generated operators must be non-recursive");
        }
        Ok(())
    }
}

/// Generator for case `index` of a suite; a pure function of both.
pub fn rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Lasso,
    Idta,
    Formula,
}

#[derive(Debug, Clone)]
pub enum Instance {
    Lasso(TimedLasso),
    Idta(Idta),
    Formula(Tltl<Action>),
}

pub fn random_instance(kind: InstanceKind, cfg: &GenConfig, index: u64) -> Instance {
    let mut r = rng(cfg.seed, index);
    match kind {
        InstanceKind::Lasso => Instance::Lasso(random_lasso(&mut r, cfg)),
        InstanceKind::Idta => Instance::Idta(random_idta(&mut r, cfg)),
        InstanceKind::Formula => Instance::Formula(random_tltl(&mut r, cfg, cfg.max_formula_depth)),
    }
}

fn step(r: &mut impl Rng, strict: bool) -> Rational {
    let choices: &[(i64, i64)] = if strict {
        &[(1, 2), (1, 1), (3, 2), (7, 10)]
    } else {
        &[(0, 1), (1, 2), (1, 1), (3, 2), (7, 10)]
    };
    let (n, d) = *choices.choose(r).expect("non-empty");
    rat(n, d)
}

/// Word with `|stem| ≤ max_stem`, `1 ≤ |period| ≤ max_period` and small time steps.
pub fn random_lasso(r: &mut impl Rng, cfg: &GenConfig) -> TimedLasso {
    let s = r.gen_range(0..=cfg.max_stem);
    let p = r.gen_range(1..=cfg.max_period);
    let mut t = if r.gen_bool(0.5) { Rational::zero() } else { step(r, cfg.strict_time) };
    let mut ev = Vec::with_capacity(s + p);
    for k in 0..s + p {
        if k > 0 {
            t += step(r, cfg.strict_time);
        }
        ev.push((cfg.actions.choose(r).expect("actions").clone(), t));
    }
    let period = ev.split_off(s);
    let span = period[p - 1].1 - period[0].1;
    let mut gap = step(r, true);
    if r.gen_bool(0.3) {
        gap = rat(1, 2);
    }
    TimedLasso::new(ev, period, span + gap).expect("generated words are valid")
}

/// Word in which the action at each position is drawn from `actions`.
pub fn random_lasso_over(r: &mut impl Rng, cfg: &GenConfig, actions: &[Action]) -> TimedLasso {
    let c = GenConfig {
        actions: actions.to_vec(),
        ..cfg.clone()
    };
    random_lasso(r, &c)
}

pub fn random_interval(r: &mut impl Rng, cfg: &GenConfig) -> Interval {
    cfg.intervals.choose(r).expect("interval pool").clone()
}

fn random_atom(r: &mut impl Rng, cfg: &GenConfig) -> Guard {
    let b = cfg.ops.choose(r).expect("operators").clone();
    Guard::atom(random_interval(r, cfg), b)
}

/// Guard with at most two atoms.
pub fn random_guard(r: &mut impl Rng, cfg: &GenConfig) -> Guard {
    if cfg.ops.is_empty() {
        return Guard::True;
    }
    match r.gen_range(0..6) {
        0 | 1 => Guard::True,
        2 => random_atom(r, cfg),
        3 => random_atom(r, cfg).negate(),
        4 => random_atom(r, cfg).and(random_atom(r, cfg).negate()),
        _ => random_atom(r, cfg).or(random_atom(r, cfg)),
    }
}

/// Automaton with up to `max_states` states and up to two guarded
/// transitions per state and action.
pub fn random_idta(r: &mut impl Rng, cfg: &GenConfig) -> Idta {
    let n = r.gen_range(1..=cfg.max_states);
    let mut trans = Vec::new();
    for q in 0..n {
        for a in &cfg.actions {
            for _ in 0..r.gen_range(0..=2) {
                let l = SymbolicLetter::new(a, random_guard(r, cfg));
                trans.push((q, l, r.gen_range(0..n)));
            }
        }
    }
    let mut letters: Vec<SymbolicLetter> = trans.iter().map(|t| t.1.clone()).collect();
    letters.sort();
    letters.dedup();
    let mut aut = BuchiAutomaton::new(letters);
    for _ in 1..n {
        aut.add_state(false);
    }
    for q in 0..n {
        aut.set_accepting(q, r.gen_bool(0.5));
    }
    for (p, l, q) in &trans {
        aut.add_transition(*p, l, *q).expect("own letter");
    }
    Idta::new(cfg.actions.clone(), cfg.ops.clone(), aut)
}

/// Temporal formula of nesting depth at most `depth`.
pub fn random_tltl(r: &mut impl Rng, cfg: &GenConfig, depth: usize) -> Tltl<Action> {
    if depth == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..5) {
            0 if !cfg.ops.is_empty() => {
                let b = cfg.ops.choose(r).expect("operators").clone();
                Tltl::atom(random_interval(r, cfg), b)
            }
            1 => Tltl::True,
            _ => Tltl::letter(cfg.actions.choose(r).expect("actions").clone()),
        };
    }
    let d = depth - 1;
    match r.gen_range(0..7) {
        0 => random_tltl(r, cfg, d).negate(),
        1 => random_tltl(r, cfg, d).or(random_tltl(r, cfg, d)),
        2 => random_tltl(r, cfg, d).and(random_tltl(r, cfg, d)),
        3 => random_tltl(r, cfg, d).next(),
        4 => random_tltl(r, cfg, d).prev(),
        5 => random_tltl(r, cfg, d).until(random_tltl(r, cfg, d)),
        _ => random_tltl(r, cfg, d).since(random_tltl(r, cfg, d)),
    }
}

/// First-order sentence of quantifier depth at most `depth` over variables `x`, `y`, `z`.
pub fn random_fo_sentence(r: &mut impl Rng, cfg: &GenConfig, depth: usize) -> Mso<Action> {
    let depth = depth.clamp(1, 3);
    fo_rec(r, cfg, depth, &[], 3)
}

const FO_VARS: [&str; 3] = ["x", "y", "z"];

fn fo_rec(r: &mut impl Rng, cfg: &GenConfig, qdepth: usize, bound: &[&'static str], size: usize) -> Mso<Action> {
    let quantify = |r: &mut dyn rand::RngCore, bound: &[&'static str]| -> (bool, &'static str) {
        let v = FO_VARS[bound.len().min(2)];
        (r.gen_bool(0.5), v)
    };
    if bound.is_empty() || (qdepth > 0 && r.gen_bool(0.45)) {
        if qdepth == 0 {
            return Mso::True;
        }
        let (universal, v) = quantify(r, bound);
        let mut inner: Vec<&'static str> = bound.to_vec();
        if !inner.contains(&v) {
            inner.push(v);
        }
        let body = fo_rec(r, cfg, qdepth - 1, &inner, size);
        return if universal { Mso::forall(v, body) } else { Mso::exists(v, body) };
    }
    if size == 0 || r.gen_bool(0.35) {
        let v = *bound.choose(r).expect("bound variable");
        return match r.gen_range(0..4) {
            0 if !cfg.ops.is_empty() => {
                let b = cfg.ops.choose(r).expect("operators").clone();
                Mso::atom(random_interval(r, cfg), b, v)
            }
            1 if bound.len() > 1 => {
                let w = *bound.iter().find(|w| **w != v).expect("second variable");
                Mso::less(v, w)
            }
            _ => Mso::letter(cfg.actions.choose(r).expect("actions").clone(), v),
        };
    }
    match r.gen_range(0..3) {
        0 => fo_rec(r, cfg, qdepth, bound, size - 1).negate(),
        1 => fo_rec(r, cfg, qdepth, bound, size - 1).or(fo_rec(r, cfg, qdepth, bound, size - 1)),
        _ => fo_rec(r, cfg, qdepth, bound, size - 1).and(fo_rec(r, cfg, qdepth, bound, size - 1)),
    }
}

/// Metric formula over the non-singular part of the interval pool.
pub fn random_mitl(r: &mut impl Rng, cfg: &GenConfig, depth: usize) -> Mitl {
    let pool: Vec<Interval> = cfg.intervals.iter().filter(|i| !i.is_singular()).cloned().collect();
    mitl_rec(r, cfg, &pool, depth)
}

fn mitl_rec(r: &mut impl Rng, cfg: &GenConfig, pool: &[Interval], depth: usize) -> Mitl {
    if depth == 0 || r.gen_bool(0.25) {
        return if r.gen_bool(0.1) {
            Mitl::True
        } else {
            Mitl::Act(cfg.actions.choose(r).expect("actions").clone())
        };
    }
    let d = depth - 1;
    let i = pool.choose(r).expect("non-singular interval").clone();
    match r.gen_range(0..12) {
        0 => mitl_rec(r, cfg, pool, d).negate(),
        1 => mitl_rec(r, cfg, pool, d).or(mitl_rec(r, cfg, pool, d)),
        2 => mitl_rec(r, cfg, pool, d).and(mitl_rec(r, cfg, pool, d)),
        3 => mitl_rec(r, cfg, pool, d).next(),
        4 => mitl_rec(r, cfg, pool, d).prev(),
        5 => mitl_rec(r, cfg, pool, d).until(mitl_rec(r, cfg, pool, d)),
        6 => mitl_rec(r, cfg, pool, d).since(mitl_rec(r, cfg, pool, d)),
        7 => mitl_rec(r, cfg, pool, d).until_in(i, mitl_rec(r, cfg, pool, d)),
        8 => mitl_rec(r, cfg, pool, d).since_in(i, mitl_rec(r, cfg, pool, d)),
        9 => Mitl::eventually(i, mitl_rec(r, cfg, pool, d)),
        10 => Mitl::always(i, mitl_rec(r, cfg, pool, d)),
        _ => Mitl::historically(i, mitl_rec(r, cfg, pool, d)),
    }
}

/// Positions `j` with `τ_j ≤ bound`, in order; the word's times are unbounded so this is finite.
fn positions_until(word: &TimedLasso, bound: Rational) -> impl Iterator<Item = usize> + '_ {
    (0..).take_while(move |&j| word.time(j) <= bound)
}

/// Literal scan of the operator definitions over a bounded horizon: up to
/// the right end of `I` past the later of `τ_i` and the end of the stem, plus
/// one period (one period past the left end when `I` is unbounded).
pub fn brute_force_guard(kind: &OperatorKind, interval: &Interval, word: &TimedLasso, i: usize) -> bool {
    let ti = word.time(i);
    let stem_end = word.time(word.stem_len());
    let horizon = ti.max(stem_end) + interval.reach() + word.shift();
    let at = |j: usize, a: &str| word.action(j) == a;
    match kind {
        OperatorKind::LastDist(a) => {
            // j < i with σ(j) = a and no a strictly between
            (0..i).any(|j| at(j, a) && (j + 1..i).all(|k| !at(k, a)) && interval.contains(ti - word.time(j)))
        }
        OperatorKind::NextDist(a) => positions_until(word, horizon)
            .filter(|&j| j > i)
            .any(|j| at(j, a) && (i + 1..j).all(|k| !at(k, a)) && interval.contains(word.time(j) - ti)),
        OperatorKind::FutureDist(a) => positions_until(word, horizon)
            .filter(|&j| j >= i)
            .any(|j| at(j, a) && interval.contains(word.time(j) - ti)),
        OperatorKind::PastDist(a) => (0..=i).any(|j| at(j, a) && interval.contains(ti - word.time(j))),
        OperatorKind::Lifted(k) => brute_force_guard(k, interval, word, i),
        OperatorKind::RecFuture | OperatorKind::RecPast => false,
    }
}

/// Direct evaluation of a first-order formula with non-recursive atoms,
/// quantifying over a bounded prefix.
///
/// Beyond `s'` (the stem plus enough periods for every atom's window) the
/// labelled word is purely periodic, so a quantifier of remaining rank `r`
/// only needs to look `2^r + 2` periods past the first block start after
/// every assigned position.
pub fn fo_eval_direct(f: &Mso<Action>, word: &TimedLasso, assignment: &BTreeMap<String, usize>) -> Result<bool> {
    let mut reach = Rational::zero();
    for (i, _) in f.atoms() {
        reach = reach.max(i.reach());
    }
    for (_, b) in f.atoms() {
        if b.param.is_some() {
            return Err(Error::Unsupported(format!("recursive atom {b} in the direct evaluator")));
        }
    }
    let p = word.period_len();
    let blocks = (reach / word.shift()).ceil().to_usize().unwrap_or(0) + 2;
    let settled = word.stem_len() + blocks * p;
    let mut ev = DirectFo {
        word,
        settled,
        cache: HashMap::new(),
    };
    let mut env = assignment.clone();
    ev.eval(f, &mut env)
}

struct DirectFo<'a> {
    word: &'a TimedLasso,
    settled: usize,
    cache: HashMap<(Interval, OperatorKind, usize), bool>,
}

impl DirectFo<'_> {
    fn limit(&self, env: &BTreeMap<String, usize>, rank: usize) -> usize {
        let p = self.word.period_len();
        let s = self.word.stem_len();
        let floor = self.settled.max(env.values().map(|v| v + 1).max().unwrap_or(0));
        let c = s + (floor.saturating_sub(s)).div_ceil(p) * p;
        c + ((1usize << rank.min(20)) + 2) * p
    }

    fn var(env: &BTreeMap<String, usize>, x: &str) -> Result<usize> {
        env.get(x).copied().ok_or_else(|| Error::FreeVariable(x.to_string()))
    }

    fn eval(&mut self, f: &Mso<Action>, env: &mut BTreeMap<String, usize>) -> Result<bool> {
        Ok(match f {
            Mso::True => true,
            Mso::False => false,
            Mso::Letter(a, x) => self.word.action(Self::var(env, x)?) == a,
            Mso::Atom(i, b, x) => {
                let pos = Self::var(env, x)?;
                let key = (i.clone(), b.kind.clone(), pos);
                match self.cache.get(&key) {
                    Some(&v) => v,
                    None => {
                        let v = brute_force_guard(&b.kind, i, self.word, pos);
                        self.cache.insert(key, v);
                        v
                    }
                }
            }
            Mso::Less(x, y) => Self::var(env, x)? < Self::var(env, y)?,
            Mso::Not(g) => !self.eval(g, env)?,
            Mso::Or(g, h) => self.eval(g, env)? || self.eval(h, env)?,
            Mso::And(g, h) => self.eval(g, env)? && self.eval(h, env)?,
            Mso::Exists(x, g) => {
                let rank = f.quantifier_depth();
                let saved = env.remove(x);
                let limit = self.limit(env, rank);
                let mut found = false;
                for j in 0..limit {
                    env.insert(x.clone(), j);
                    if self.eval(g, env)? {
                        found = true;
                        break;
                    }
                }
                env.remove(x);
                if let Some(v) = saved {
                    env.insert(x.clone(), v);
                }
                found
            }
            Mso::In(..) | Mso::ExistsSet(..) => {
                return Err(Error::Unsupported("set variables in the direct first-order evaluator".into()))
            }
        })
    }
}

/// Temporal formula over arbitrary letters, without atoms.
pub fn random_tltl_over<P: Clone>(r: &mut impl Rng, leaves: &[P], depth: usize) -> Tltl<P> {
    if depth == 0 || r.gen_bool(0.2) {
        return if r.gen_bool(0.1) {
            Tltl::True
        } else {
            Tltl::Letter(leaves.choose(r).expect("leaves").clone())
        };
    }
    let d = depth - 1;
    match r.gen_range(0..7) {
        0 => random_tltl_over(r, leaves, d).negate(),
        1 => random_tltl_over(r, leaves, d).or(random_tltl_over(r, leaves, d)),
        2 => random_tltl_over(r, leaves, d).and(random_tltl_over(r, leaves, d)),
        3 => random_tltl_over(r, leaves, d).next(),
        4 => random_tltl_over(r, leaves, d).prev(),
        5 => random_tltl_over(r, leaves, d).until(random_tltl_over(r, leaves, d)),
        _ => random_tltl_over(r, leaves, d).since(random_tltl_over(r, leaves, d)),
    }
}

/// Fixed words and automata of the running example.
pub mod fixtures {
    use super::*;
    use crate::operators::Param;
    use crate::recursive::{Definition, FloatingAutomaton, RecursiveAutomaton, Registry};

    /// `a@0 b@1 a@2 b@3 …`
    pub fn sigma1() -> TimedLasso {
        TimedLasso::new(
            vec![("a".into(), int(0)), ("b".into(), int(1))],
            vec![("a".into(), int(2)), ("b".into(), int(3))],
            int(2),
        )
        .expect("valid word")
    }

    /// `a@0 a@1/2 b@1 a@3/2 (b@2 a@5/2)^ω` with shift 2.
    pub fn sigma2() -> TimedLasso {
        TimedLasso::new(
            vec![
                ("a".into(), int(0)),
                ("a".into(), rat(1, 2)),
                ("b".into(), int(1)),
                ("a".into(), rat(3, 2)),
            ],
            vec![("b".into(), int(2)), ("a".into(), rat(5, 2))],
            int(2),
        )
        .expect("valid word")
    }

    /// Accepts `(σ, i)` iff position `i` is a `b` with an `a` on each side.
    pub fn b_between_a() -> FloatingAutomaton {
        let letters = vec![
            SymbolicLetter::marked("a", false, Guard::True),
            SymbolicLetter::marked("b", false, Guard::True),
            SymbolicLetter::marked("b", true, Guard::True),
        ];
        let mut m = BuchiAutomaton::new(letters.clone());
        let before = m.add_state(false);
        let at = m.add_state(false);
        let done = m.add_state(true);
        let add = |m: &mut BuchiAutomaton<SymbolicLetter>, p, l: &SymbolicLetter, q| m.add_transition(p, l, q).expect("own letter");
        add(&mut m, 0, &letters[0], 0);
        add(&mut m, 0, &letters[1], 0);
        add(&mut m, 0, &letters[0], before);
        add(&mut m, before, &letters[2], at);
        add(&mut m, at, &letters[0], done);
        add(&mut m, done, &letters[0], done);
        add(&mut m, done, &letters[1], done);
        FloatingAutomaton::new(Idta::new(vec!["a".into(), "b".into()], vec![], m))
    }

    /// Words that start with `a` and have a `b` between two `a`s exactly one time unit later.
    pub fn example_ridta() -> RecursiveAutomaton {
        let fb = OperatorBinding::recursive(OperatorKind::RecFuture, Param::Floating("B".into()));
        let first = SymbolicLetter::new("a", Guard::atom(Interval::point(int(1)), fb.clone()));
        let any_a = SymbolicLetter::new("a", Guard::True);
        let any_b = SymbolicLetter::new("b", Guard::True);
        let mut m = BuchiAutomaton::new(vec![first.clone(), any_a.clone(), any_b.clone()]);
        let rest = m.add_state(true);
        m.add_transition(0, &first, rest).expect("own letter");
        m.add_transition(rest, &any_a, rest).expect("own letter");
        m.add_transition(rest, &any_b, rest).expect("own letter");
        let mut reg = Registry::new();
        reg.insert("B", Definition::Floating(b_between_a()));
        RecursiveAutomaton::new(Idta::new(vec!["a".into(), "b".into()], vec![fb], m), reg)
    }

    /// `Q_b(z) ∧ Q_a(z-1) ∧ Q_a(z+1)`
    pub fn b_between_a_formula() -> Mso<Action> {
        let a = |v: &str| Mso::letter("a".to_string(), v);
        Mso::letter("b".to_string(), "z")
            .and(Mso::exists("y", Mso::succ("y", "z").and(a("y"))))
            .and(Mso::exists("y", Mso::succ("z", "y").and(a("y"))))
    }

    /// `∀x (zero(x) → Q_a(x) ∧ [1,1] ∈ F_ψ(x))` with `ψ` the formula above.
    pub fn example_sentence() -> Mso<Action> {
        let fb = OperatorBinding::recursive(
            OperatorKind::RecFuture,
            Param::Mso {
                var: "z".into(),
                body: Box::new(b_between_a_formula()),
            },
        );
        Mso::forall(
            "x",
            Mso::zero("x").implies(Mso::letter("a".to_string(), "x").and(Mso::atom(Interval::point(int(1)), fb, "x"))),
        )
    }

    /// `a ∧ ([1,1] ∈ F_θ')` with `θ' = b ∧ ⊖a ∧ ○a`.
    pub fn example_formula() -> Tltl<Action> {
        let a = || Tltl::letter("a".to_string());
        let inner = Tltl::letter("b".to_string()).and(a().prev()).and(a().next());
        a().and(Tltl::atom(
            Interval::point(int(1)),
            OperatorBinding::recursive(OperatorKind::RecFuture, Param::Ltl(Box::new(inner))),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::sigma1;
    use super::*;
    use crate::operators::eval_operator_guard;

    #[test]
    fn oracle_examples() {
        let w = sigma1();
        let last_a = OperatorKind::LastDist("a".into());
        assert!(brute_force_guard(&last_a, &Interval::point(int(1)), &w, 1));
        assert!(!brute_force_guard(&last_a, &Interval::at_least(int(0)), &w, 0));
        assert!(brute_force_guard(&OperatorKind::FutureDist("a".into()), &Interval::point(int(0)), &w, 0));
    }

    #[test]
    fn generation_is_reproducible() {
        let cfg = GenConfig::default();
        let a = random_lasso(&mut rng(0, 7), &cfg);
        let b = random_lasso(&mut rng(0, 7), &cfg);
        assert_eq!(a, b);
        let one = GenConfig { max_states: 1, ..cfg.clone() };
        for k in 0..20 {
            match random_instance(InstanceKind::Idta, &one, k) {
                Instance::Idta(a) => assert_eq!(a.automaton.num_states(), 1),
                _ => unreachable!(),
            }
        }
        let flat = GenConfig { max_formula_depth: 0, ..cfg };
        for k in 0..20 {
            match random_instance(InstanceKind::Formula, &flat, k) {
                Instance::Formula(f) => assert_eq!(f.depth(), 0),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn direct_fo_on_small_sentences() {
        let w = sigma1();
        let none = BTreeMap::new();
        let every_a_then_b = Mso::forall(
            "x",
            Mso::letter("a".to_string(), "x")
                .implies(Mso::exists("y", Mso::less("x", "y").and(Mso::letter("b".to_string(), "y")))),
        );
        assert!(fo_eval_direct(&every_a_then_b, &w, &none).unwrap());
        let some_b_first = Mso::exists("x", Mso::zero("x").and(Mso::letter("b".to_string(), "x")));
        assert!(!fo_eval_direct(&some_b_first, &w, &none).unwrap());
    }

    #[test]
    fn oracle_matches_engine_on_random_cases() {
        let cfg = GenConfig {
            ops: vec![
                OperatorBinding::last("a"),
                OperatorBinding::next("b"),
                OperatorBinding::fut("a"),
                OperatorBinding::past("b"),
            ],
            ..GenConfig::default()
        };
        for k in 0..200 {
            let mut r = rng(3, k);
            let w = random_lasso(&mut r, &cfg);
            let b = cfg.ops.choose(&mut r).unwrap();
            let i = random_interval(&mut r, &cfg);
            let pos = r.gen_range(0..w.stem_len() + 3 * w.period_len());
            assert_eq!(
                brute_force_guard(&b.kind, &i, &w, pos),
                eval_operator_guard(&b.kind, &i, &w, pos),
                "{b} {i} at {pos} on {w}"
            );
        }
    }
}
