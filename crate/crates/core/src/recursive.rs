//! Recursive automata and logics: operators whose parameter is the set of
//! positions accepted by a floating automaton or satisfying a formula.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::ltl::{tltl_positions, tltl_to_tfo, Tltl};
use crate::mso::{automaton_to_sentence, floating_automaton_to_formula, mso_to_buchi, tmso_positions, tmso_to_idta, ttos_over, vocabulary, Mso};
use crate::omega::{marked_positions, BoolOp};
use crate::operators::{OperatorBinding, Param, Resolver};
use crate::symbolic::{combine_idta, from_proper, timed_membership, Idta, ProperIdta, ProperLetter};
use crate::time::{Action, PositionSet, TimedLasso};

/// Automaton over `Σ × {0,1}` read with exactly one marked position.
#[derive(Debug, Clone)]
pub struct FloatingAutomaton(Idta);

impl FloatingAutomaton {
    /// Letters without a mark component match both marked and unmarked positions.
    pub fn new(a: Idta) -> Self {
        FloatingAutomaton(a)
    }

    pub fn idta(&self) -> &Idta {
        &self.0
    }
}

/// A named registry entry; names are the unit of recursion.
#[derive(Debug, Clone)]
pub enum Definition {
    Floating(FloatingAutomaton),
    Ltl(Tltl<Action>),
    Mso { var: String, body: Mso<Action> },
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    pub entries: BTreeMap<String, Definition>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, d: Definition) {
        self.entries.insert(name.to_string(), d);
    }

    pub fn get(&self, name: &str) -> Result<&Definition> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::UnresolvedBinding(format!("no registry entry named {name}")))
    }

    /// Entries of both registries; a name defined twice must not be used with two meanings.
    pub fn merge(&self, o: &Registry) -> Result<Registry> {
        let mut out = self.clone();
        for (k, v) in &o.entries {
            if let Some(old) = out.entries.get(k) {
                if !same_definition(old, v) {
                    return Err(Error::VocabularyMismatch(format!("registry entry {k} defined twice")));
                }
            }
            out.entries.insert(k.clone(), v.clone());
        }
        Ok(out)
    }
}

fn same_definition(a: &Definition, b: &Definition) -> bool {
    match (a, b) {
        (Definition::Floating(x), Definition::Floating(y)) => {
            let (x, y) = (x.idta(), y.idta());
            let (m, n) = (&x.automaton, &y.automaton);
            x.sigma == y.sigma
                && x.ops == y.ops
                && m.initial() == n.initial()
                && m.accepting_states() == n.accepting_states()
                && m.transitions() == n.transitions()
        }
        (Definition::Ltl(x), Definition::Ltl(y)) => x == y,
        (Definition::Mso { var: v, body: f }, Definition::Mso { var: w, body: g }) => v == w && f == g,
        _ => false,
    }
}

/// Automaton whose recursive bindings may name registry entries.
#[derive(Debug, Clone)]
pub struct RecursiveAutomaton {
    pub base: Idta,
    pub registry: Registry,
}

impl RecursiveAutomaton {
    pub fn new(base: Idta, registry: Registry) -> Self {
        RecursiveAutomaton { base, registry }
    }

    pub fn plain(base: Idta) -> Self {
        RecursiveAutomaton {
            base,
            registry: Registry::new(),
        }
    }
}

/// Anything a level can be computed for.
#[derive(Debug, Clone, Copy)]
pub enum Item<'a> {
    Automaton(&'a Idta),
    Tltl(&'a Tltl<Action>),
    Mso(&'a Mso<Action>),
    Param(&'a Param),
    Named(&'a str),
}

/// Nesting depth of recursive parameters.
pub fn level_of(x: Item<'_>, reg: &Registry) -> Result<usize> {
    level_in(x, reg, &mut Vec::new())
}

fn level_in(x: Item<'_>, reg: &Registry, active: &mut Vec<String>) -> Result<usize> {
    let atoms: Vec<OperatorBinding> = match x {
        Item::Automaton(a) => a
            .used_letters()
            .iter()
            .flat_map(|l| l.guard.atoms().into_iter().map(|(_, b)| b))
            .collect(),
        Item::Tltl(t) => t.atoms().into_iter().map(|(_, b)| b).collect(),
        Item::Mso(f) => f.atoms().into_iter().map(|(_, b)| b).collect(),
        Item::Param(p) => {
            return match p {
                Param::Positions(_) => Ok(0),
                Param::Floating(n) => level_in(Item::Named(n), reg, active),
                Param::Ltl(t) => level_in(Item::Tltl(t), reg, active),
                Param::Mso { body, .. } => level_in(Item::Mso(body), reg, active),
            }
        }
        Item::Named(n) => {
            if active.iter().any(|m| m == n) {
                return Err(Error::CyclicReference(n.to_string()));
            }
            active.push(n.to_string());
            let l = match reg.get(n)? {
                Definition::Floating(b) => level_in(Item::Automaton(b.idta()), reg, active),
                Definition::Ltl(t) => level_in(Item::Tltl(t), reg, active),
                Definition::Mso { body, .. } => level_in(Item::Mso(body), reg, active),
            };
            active.pop();
            return l;
        }
    };
    let mut level = 0;
    for b in atoms {
        let l = match &b.param {
            None => 1,
            Some(p) => 1 + level_in(Item::Param(p), reg, active)?,
        };
        level = level.max(l);
    }
    Ok(level)
}

/// Evaluation context resolving recursive parameters, memoizing each
/// parameter's position set per word.
pub struct Session<'a> {
    registry: &'a Registry,
    cfg: Config,
    memo: RefCell<HashMap<(Param, TimedLasso), PositionSet>>,
    active: RefCell<Vec<String>>,
    memoize: bool,
}

impl<'a> Session<'a> {
    pub fn new(registry: &'a Registry, cfg: &Config) -> Self {
        Session {
            registry,
            cfg: *cfg,
            memo: RefCell::new(HashMap::new()),
            active: RefCell::new(Vec::new()),
            memoize: true,
        }
    }

    /// A session that recomputes every position set.
    pub fn unmemoized(registry: &'a Registry, cfg: &Config) -> Self {
        Session {
            memoize: false,
            ..Self::new(registry, cfg)
        }
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    /// Number of memoized position sets.
    pub fn memo_len(&self) -> usize {
        self.memo.borrow().len()
    }

    fn compute(&self, param: &Param, word: &TimedLasso) -> Result<PositionSet> {
        match param {
            Param::Positions(x) => Ok(x.clone()),
            Param::Ltl(t) => tltl_positions(t, word, self, &self.cfg),
            Param::Mso { var, body } => tmso_positions(body, var, word, self, &self.cfg),
            Param::Floating(n) => {
                if self.active.borrow().iter().any(|m| m == n) {
                    return Err(Error::CyclicReference(n.clone()));
                }
                self.active.borrow_mut().push(n.clone());
                let r = match self.registry.get(n) {
                    Ok(Definition::Floating(b)) => pos_set(b, word, self),
                    Ok(Definition::Ltl(t)) => tltl_positions(t, word, self, &self.cfg),
                    Ok(Definition::Mso { var, body }) => tmso_positions(body, var, word, self, &self.cfg),
                    Err(e) => Err(e),
                };
                self.active.borrow_mut().pop();
                r
            }
        }
    }
}

impl Resolver for Session<'_> {
    fn positions(&self, param: &Param, word: &TimedLasso) -> Result<PositionSet> {
        if let Param::Positions(x) = param {
            return Ok(x.clone());
        }
        let key = (param.clone(), word.clone());
        if self.memoize {
            if let Some(s) = self.memo.borrow().get(&key) {
                return Ok(s.clone());
            }
        }
        let s = self.compute(param, word)?;
        if self.memoize {
            self.memo.borrow_mut().insert(key, s.clone());
        }
        Ok(s)
    }
}

/// Decides `(σ, i) ∈ L^f(B)`.
pub fn floating_membership(b: &FloatingAutomaton, word: &TimedLasso, i: usize, env: &dyn Resolver, cfg: &Config) -> Result<bool> {
    let sets = b.idta().enabled_letters(word, Some(i), env, cfg)?;
    Ok(b.idta().automaton.accepts_letter_sets(&sets))
}

/// The positions `i` with `(σ, i) ∈ L^f(B)`, as an eventually periodic set.
pub fn pos_set(b: &FloatingAutomaton, word: &TimedLasso, env: &Session<'_>) -> Result<PositionSet> {
    let a = b.idta();
    let unmarked = a.enabled_uniform(word, false, env, env.config())?;
    let marked = a.enabled_uniform(word, true, env, env.config())?;
    marked_positions(&a.automaton, &unmarked, &marked, env.config().state_cap)
}

/// Decides `σ, i ⊨ θ` with every recursive parameter resolved in `session`.
pub fn rtltl_eval(f: &Tltl<Action>, word: &TimedLasso, i: usize, session: &Session<'_>) -> Result<bool> {
    Ok(tltl_positions(f, word, session, session.config())?.member(i))
}

pub fn ridta_membership(a: &RecursiveAutomaton, word: &TimedLasso, cfg: &Config) -> Result<bool> {
    level_of(Item::Automaton(&a.base), &a.registry)?;
    let session = Session::new(&a.registry, cfg);
    timed_membership(&a.base, word, &session, cfg)
}

/// Boolean combination of two recursive automata sharing one registry.
pub fn ridta_combine(op: BoolOp, a: &RecursiveAutomaton, b: &RecursiveAutomaton, cfg: &Config) -> Result<RecursiveAutomaton> {
    let registry = a.registry.merge(&b.registry)?;
    let base = combine_idta(op, &a.base, &b.base, cfg)?;
    Ok(RecursiveAutomaton { base, registry })
}

fn map_mso_bindings(f: &Mso<Action>, g: &mut dyn FnMut(&OperatorBinding) -> Result<OperatorBinding>) -> Result<Mso<Action>> {
    f.map_leaves(&mut |p, x| Ok(Mso::letter(p.clone(), x)), &mut |i, b, x| {
        Ok(Mso::atom(i.clone(), g(b)?, x))
    })
}

/// Replaces every named or temporal parameter by a monadic formula.
fn to_mso_param(p: &Param, reg: &Registry, memo: &mut BTreeMap<String, Param>, active: &mut Vec<String>) -> Result<Param> {
    Ok(match p {
        Param::Positions(_) => p.clone(),
        Param::Ltl(t) => {
            let body = map_mso_bindings(&tltl_to_tfo(t), &mut |b| to_mso_binding(b, reg, memo, active))?;
            Param::Mso { var: "x".into(), body: Box::new(body) }
        }
        Param::Mso { var, body } => Param::Mso {
            var: var.clone(),
            body: Box::new(map_mso_bindings(body, &mut |b| to_mso_binding(b, reg, memo, active))?),
        },
        Param::Floating(n) => {
            if let Some(done) = memo.get(n) {
                return Ok(done.clone());
            }
            if active.contains(n) {
                return Err(Error::CyclicReference(n.clone()));
            }
            active.push(n.clone());
            let out = match reg.get(n)? {
                Definition::Floating(b) => {
                    let z = "z";
                    let body = floating_automaton_to_formula(b.idta(), z);
                    let body = map_mso_bindings(&body, &mut |b| to_mso_binding(b, reg, memo, active))?;
                    Param::Mso { var: z.into(), body: Box::new(body) }
                }
                Definition::Ltl(t) => to_mso_param(&Param::Ltl(Box::new(t.clone())), reg, memo, active)?,
                Definition::Mso { var, body } => to_mso_param(
                    &Param::Mso { var: var.clone(), body: Box::new(body.clone()) },
                    reg,
                    memo,
                    active,
                )?,
            };
            active.pop();
            memo.insert(n.clone(), out.clone());
            out
        }
    })
}

fn to_mso_binding(b: &OperatorBinding, reg: &Registry, memo: &mut BTreeMap<String, Param>, active: &mut Vec<String>) -> Result<OperatorBinding> {
    Ok(match &b.param {
        None => b.clone(),
        Some(p) => OperatorBinding {
            kind: b.kind.clone(),
            param: Some(to_mso_param(p, reg, memo, active)?),
        },
    })
}

/// Sentence defining the language of a recursive automaton; every named
/// floating automaton becomes the formula describing its runs, level by level.
pub fn ridta_to_rtmso(a: &RecursiveAutomaton) -> Result<Mso<Action>> {
    let mut memo = BTreeMap::new();
    let s = automaton_to_sentence(&a.base);
    map_mso_bindings(&s, &mut |b| to_mso_binding(b, &a.registry, &mut memo, &mut Vec::new()))
}

/// Recursive automaton for a sentence; each formula parameter becomes a
/// registered floating automaton, innermost first.
pub fn rtmso_to_ridta(f: &Mso<Action>, sigma: &[Action], cfg: &Config) -> Result<RecursiveAutomaton> {
    let mut reg = Registry::new();
    let mut names: BTreeMap<Param, String> = BTreeMap::new();
    let top = map_mso_bindings(f, &mut |b| floating_binding(b, sigma, cfg, &mut reg, &mut names))?;
    let p = tmso_to_idta(&top, sigma, cfg)?;
    Ok(RecursiveAutomaton {
        base: from_proper(&p),
        registry: reg,
    })
}

fn floating_binding(
    b: &OperatorBinding,
    sigma: &[Action],
    cfg: &Config,
    reg: &mut Registry,
    names: &mut BTreeMap<Param, String>,
) -> Result<OperatorBinding> {
    let Some(p) = &b.param else { return Ok(b.clone()) };
    let p = match p {
        Param::Ltl(t) => Param::Mso { var: "x".into(), body: Box::new(tltl_to_tfo(t)) },
        other => other.clone(),
    };
    let Param::Mso { var, body } = &p else {
        return Ok(OperatorBinding { kind: b.kind.clone(), param: Some(p) });
    };
    let name = match names.get(&p) {
        Some(n) => n.clone(),
        None => {
            let inner = map_mso_bindings(body, &mut |c| floating_binding(c, sigma, cfg, reg, names))?;
            let automaton = formula_to_floating(&inner, var, sigma, cfg)?;
            let n = format!("B{}", names.len());
            reg.insert(&n, Definition::Floating(automaton));
            names.insert(p.clone(), n.clone());
            n
        }
    };
    Ok(OperatorBinding {
        kind: b.kind.clone(),
        param: Some(Param::Floating(name)),
    })
}

/// Floating automaton accepting `(σ, i)` iff `σ, [i/x] ⊨ f`.
pub fn formula_to_floating(f: &Mso<Action>, x: &str, sigma: &[Action], cfg: &Config) -> Result<FloatingAutomaton> {
    let (fo, so) = f.free_vars();
    if let Some(v) = fo.iter().chain(&so).find(|v| *v != x) {
        return Err(Error::FreeVariable(v.clone()));
    }
    let ab = vocabulary(f, sigma);
    let letters = ab.letters()?;
    let hat = ttos_over(f, &ab, &letters)?;
    let c = mso_to_buchi(&hat, &letters, &[x.to_string()], cfg)?;
    let automaton = c.automaton.project(|&(b, bits)| ProperLetter {
        mark: Some(bits & 1 == 1),
        ..c.base[b].clone()
    });
    let alphabet = ab.with_marks(true);
    let marked = alphabet.letters()?;
    let automaton = automaton.reduce().extend_alphabet(&marked)?;
    Ok(FloatingAutomaton(from_proper(&ProperIdta { alphabet, automaton })))
}

/// First-order formula with free variable `x`; recursive parameters are translated the same way.
pub fn rtltl_to_rtfo(f: &Tltl<Action>) -> Mso<Action> {
    tltl_to_tfo(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::SymbolicLetter;
    use crate::ltl::tltl_eval;
    use crate::omega::BuchiAutomaton;
    use crate::operators::{OperatorKind, NoResolver};
    use crate::symbolic::Guard;
    use crate::time::{int, rat, Interval};

    fn sigma2() -> TimedLasso {
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
        .unwrap()
    }

    /// Marked `b` whose neighbours are both `a`.
    fn b_with_a_neighbours() -> FloatingAutomaton {
        let letters = vec![
            SymbolicLetter::marked("a", false, Guard::True),
            SymbolicLetter::marked("b", false, Guard::True),
            SymbolicLetter::marked("b", true, Guard::True),
        ];
        let mut m = BuchiAutomaton::new(letters.clone());
        let before = m.add_state(false);
        let at = m.add_state(false);
        let done = m.add_state(true);
        // state 0 reads any prefix ending just before the a preceding the mark
        m.add_transition(0, &letters[0], 0).unwrap();
        m.add_transition(0, &letters[1], 0).unwrap();
        m.add_transition(0, &letters[0], before).unwrap();
        m.add_transition(before, &letters[2], at).unwrap();
        m.add_transition(at, &letters[0], done).unwrap();
        m.add_transition(done, &letters[0], done).unwrap();
        m.add_transition(done, &letters[1], done).unwrap();
        FloatingAutomaton::new(Idta::new(vec!["a".into(), "b".into()], vec![], m))
    }

    #[test]
    fn floating_example_positions() {
        let reg = Registry::new();
        let cfg = Config::default();
        let s = Session::new(&reg, &cfg);
        let b = b_with_a_neighbours();
        let w = sigma2();
        assert!(floating_membership(&b, &w, 2, &NoResolver, &cfg).unwrap());
        assert!(!floating_membership(&b, &w, 0, &NoResolver, &cfg).unwrap());
        assert!(floating_membership(&b, &w, 4, &NoResolver, &cfg).unwrap());
        let p = pos_set(&b, &w, &s).unwrap();
        assert_eq!(p, PositionSet::new(&[2], &[0], 4, 2));
    }

    #[test]
    fn levels() {
        let mut reg = Registry::new();
        reg.insert("B", Definition::Floating(b_with_a_neighbours()));
        assert_eq!(level_of(Item::Named("B"), &reg).unwrap(), 0);
        let fb = OperatorBinding::recursive(OperatorKind::RecFuture, Param::Floating("B".into()));
        let t = Tltl::atom(Interval::point(int(1)), fb.clone());
        assert_eq!(level_of(Item::Tltl(&t), &reg).unwrap(), 1);
        let nested = Tltl::atom(
            Interval::point(int(1)),
            OperatorBinding::recursive(OperatorKind::RecPast, Param::Ltl(Box::new(t))),
        );
        assert_eq!(level_of(Item::Tltl(&nested), &reg).unwrap(), 2);
        reg.insert("C", Definition::Ltl(Tltl::atom(
            Interval::point(int(1)),
            OperatorBinding::recursive(OperatorKind::RecFuture, Param::Floating("C".into())),
        )));
        assert!(matches!(level_of(Item::Named("C"), &reg), Err(Error::CyclicReference(_))));
    }

    fn theta_ex() -> Tltl<Action> {
        let a = || Tltl::letter("a".to_string());
        let inner = Tltl::letter("b".to_string()).and(a().prev()).and(a().next());
        a().and(Tltl::atom(
            Interval::point(int(1)),
            OperatorBinding::recursive(OperatorKind::RecFuture, Param::Ltl(Box::new(inner))),
        ))
    }

    #[test]
    fn recursive_temporal_example() {
        let reg = Registry::new();
        let cfg = Config::default();
        let s = Session::new(&reg, &cfg);
        assert!(rtltl_eval(&theta_ex(), &sigma2(), 0, &s).unwrap());
        assert_eq!(s.memo_len(), 1);
        let bad = TimedLasso::new(vec![("b".into(), int(0))], vec![("a".into(), int(1))], int(1)).unwrap();
        assert!(!rtltl_eval(&theta_ex(), &bad, 0, &s).unwrap());
        // level 0 agrees with the plain evaluator
        let plain = Tltl::letter("a".to_string()).until(Tltl::letter("b".to_string()));
        assert_eq!(
            rtltl_eval(&plain, &sigma2(), 0, &s).unwrap(),
            tltl_eval(&plain, &sigma2(), 0, &NoResolver, &cfg).unwrap()
        );
    }

    #[test]
    fn floating_from_formula_matches_temporal_positions() {
        let cfg = Config::default();
        let a = || Tltl::letter("a".to_string());
        let inner = Tltl::letter("b".to_string()).and(a().prev()).and(a().next());
        let fb = formula_to_floating(&tltl_to_tfo(&inner), "x", &["a".into(), "b".into()], &cfg).unwrap();
        let reg = Registry::new();
        let s = Session::new(&reg, &cfg);
        let w = sigma2();
        assert_eq!(pos_set(&fb, &w, &s).unwrap(), tltl_positions(&inner, &w, &NoResolver, &cfg).unwrap());
    }
}
