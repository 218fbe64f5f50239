//! Guards, symbolic and proper alphabets, and input-determined automata.
//!
//! A symbolic letter pairs an action with a guard over atoms `I ∈ Δ`. A
//! proper letter instead fixes, for every operator of a finite vocabulary,
//! exactly which intervals of the vocabulary hold, so every timed word has a
//! unique proper symbolic word describing it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::omega::{bool_combine, complement, BoolOp, BuchiAutomaton};
use crate::operators::{atom_signal, eval_atom, OperatorBinding, Resolver};
use crate::time::{common_shape, Action, Interval, Lasso, PositionSet, TimedLasso};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    True,
    Atom(Interval, OperatorBinding),
    Not(Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
    And(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn atom(i: Interval, b: OperatorBinding) -> Self {
        Guard::Atom(i, b)
    }

    pub fn negate(self) -> Self {
        Guard::Not(Box::new(self))
    }

    pub fn and(self, o: Guard) -> Self {
        Guard::And(Box::new(self), Box::new(o))
    }

    pub fn or(self, o: Guard) -> Self {
        Guard::Or(Box::new(self), Box::new(o))
    }

    /// Conjunction of all guards, `true` when empty.
    pub fn all(gs: impl IntoIterator<Item = Guard>) -> Self {
        gs.into_iter().reduce(Guard::and).unwrap_or(Guard::True)
    }

    /// Disjunction of all guards, `false` when empty.
    pub fn any(gs: impl IntoIterator<Item = Guard>) -> Self {
        gs.into_iter().reduce(Guard::or).unwrap_or(Guard::True.negate())
    }

    pub fn atoms(&self) -> BTreeSet<(Interval, OperatorBinding)> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<(Interval, OperatorBinding)>) {
        match self {
            Guard::True => {}
            Guard::Atom(i, b) => {
                out.insert((i.clone(), b.clone()));
            }
            Guard::Not(g) => g.collect_atoms(out),
            Guard::Or(g, h) | Guard::And(g, h) => {
                g.collect_atoms(out);
                h.collect_atoms(out);
            }
        }
    }

    pub fn intervals(&self) -> BTreeSet<Interval> {
        self.atoms().into_iter().map(|a| a.0).collect()
    }

    pub fn bindings(&self) -> BTreeSet<OperatorBinding> {
        self.atoms().into_iter().map(|a| a.1).collect()
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Guard::True)
    }

    /// Evaluates with atom truth supplied by `val`.
    pub fn eval_with(&self, val: &mut dyn FnMut(&Interval, &OperatorBinding) -> Result<bool>) -> Result<bool> {
        match self {
            Guard::True => Ok(true),
            Guard::Atom(i, b) => val(i, b),
            Guard::Not(g) => Ok(!g.eval_with(val)?),
            Guard::Or(g, h) => Ok(g.eval_with(val)? || h.eval_with(val)?),
            Guard::And(g, h) => Ok(g.eval_with(val)? && h.eval_with(val)?),
        }
    }

    pub fn map_bindings(&self, f: &dyn Fn(&OperatorBinding) -> OperatorBinding) -> Guard {
        match self {
            Guard::True => Guard::True,
            Guard::Atom(i, b) => Guard::Atom(i.clone(), f(b)),
            Guard::Not(g) => Guard::Not(Box::new(g.map_bindings(f))),
            Guard::Or(g, h) => Guard::Or(Box::new(g.map_bindings(f)), Box::new(h.map_bindings(f))),
            Guard::And(g, h) => Guard::And(Box::new(g.map_bindings(f)), Box::new(h.map_bindings(f))),
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::True => write!(f, "true"),
            Guard::Atom(i, b) => write!(f, "{i} in {b}"),
            Guard::Not(g) => match **g {
                Guard::True | Guard::Atom(..) | Guard::Not(_) => write!(f, "!{g}"),
                _ => write!(f, "!({g})"),
            },
            Guard::Or(g, h) => write!(f, "({g} | {h})"),
            Guard::And(g, h) => write!(f, "({g} & {h})"),
        }
    }
}

/// A literal of a normalised guard: the atom and its polarity.
pub type Clause = BTreeMap<(Interval, OperatorBinding), bool>;

/// Disjunctive normal form; contradictory clauses are dropped, duplicates
/// collapse, the empty clause is `true` and the empty list is `false`.
pub fn dnf(g: &Guard, cap: usize) -> Result<Vec<Clause>> {
    fn go(g: &Guard, pos: bool, cap: usize) -> Result<Vec<Clause>> {
        match (g, pos) {
            (Guard::True, true) => Ok(vec![Clause::new()]),
            (Guard::True, false) => Ok(vec![]),
            (Guard::Atom(i, b), p) => Ok(vec![Clause::from([((i.clone(), b.clone()), p)])]),
            (Guard::Not(h), p) => go(h, !p, cap),
            (Guard::Or(a, b), true) | (Guard::And(a, b), false) => {
                let mut l = go(a, pos, cap)?;
                for c in go(b, pos, cap)? {
                    if !l.contains(&c) {
                        l.push(c);
                    }
                }
                if l.len() > cap {
                    return Err(Error::DnfCapExceeded(cap));
                }
                Ok(l)
            }
            (Guard::And(a, b), true) | (Guard::Or(a, b), false) => {
                let l = go(a, pos, cap)?;
                let r = go(b, pos, cap)?;
                let mut out: Vec<Clause> = Vec::new();
                for x in &l {
                    'pair: for y in &r {
                        let mut c = x.clone();
                        for (k, v) in y {
                            match c.get(k) {
                                Some(w) if w != v => continue 'pair,
                                _ => {
                                    c.insert(k.clone(), *v);
                                }
                            }
                        }
                        if !out.contains(&c) {
                            out.push(c);
                            if out.len() > cap {
                                return Err(Error::DnfCapExceeded(cap));
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }
    go(g, true, cap)
}

/// Decides `σ, i ⊨ g`.
pub fn guard_sat(g: &Guard, word: &TimedLasso, i: usize, env: &dyn Resolver) -> Result<bool> {
    g.eval_with(&mut |iv, b| eval_atom(b, iv, word, i, env))
}

/// Positions of `word` at which `g` holds.
pub fn guard_signal(g: &Guard, word: &TimedLasso, env: &dyn Resolver, cfg: &Config) -> Result<PositionSet> {
    let mut cache = HashMap::new();
    guard_signal_cached(g, word, env, cfg, &mut cache)
}

pub(crate) type SignalCache = HashMap<(Interval, OperatorBinding), PositionSet>;

pub(crate) fn guard_signal_cached(
    g: &Guard,
    word: &TimedLasso,
    env: &dyn Resolver,
    cfg: &Config,
    cache: &mut SignalCache,
) -> Result<PositionSet> {
    Ok(match g {
        Guard::True => PositionSet::all(),
        Guard::Atom(i, b) => {
            let key = (i.clone(), b.clone());
            if let Some(s) = cache.get(&key) {
                s.clone()
            } else {
                let s = atom_signal(b, i, word, env, cfg)?;
                cache.insert(key, s.clone());
                s
            }
        }
        Guard::Not(h) => guard_signal_cached(h, word, env, cfg, cache)?.not(),
        Guard::Or(a, b) => {
            guard_signal_cached(a, word, env, cfg, cache)?.or(&guard_signal_cached(b, word, env, cfg, cache)?)
        }
        Guard::And(a, b) => {
            guard_signal_cached(a, word, env, cfg, cache)?.and(&guard_signal_cached(b, word, env, cfg, cache)?)
        }
    })
}

/// Transition label of an input-determined automaton. `mark` is set for
/// floating automata, whose letters carry a {0,1} component.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolicLetter {
    pub action: Action,
    pub mark: Option<bool>,
    pub guard: Guard,
}

impl SymbolicLetter {
    pub fn new(action: &str, guard: Guard) -> Self {
        SymbolicLetter {
            action: action.into(),
            mark: None,
            guard,
        }
    }

    pub fn marked(action: &str, mark: bool, guard: Guard) -> Self {
        SymbolicLetter {
            action: action.into(),
            mark: Some(mark),
            guard,
        }
    }
}

impl fmt::Display for SymbolicLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mark {
            None => write!(f, "{} [ {} ]", self.action, self.guard),
            Some(m) => write!(f, "({},{}) [ {} ]", self.action, m as u8, self.guard),
        }
    }
}

/// Letter of a proper alphabet: an action and, per operator, the exact set
/// of vocabulary intervals that hold.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProperLetter {
    pub action: Action,
    pub mark: Option<bool>,
    pub h: BTreeMap<OperatorBinding, BTreeSet<Interval>>,
}

impl ProperLetter {
    pub fn holds(&self, b: &OperatorBinding, i: &Interval) -> bool {
        self.h.get(b).is_some_and(|s| s.contains(i))
    }

    /// Guard true exactly where this letter's interval sets are the satisfied ones.
    pub fn to_guard(&self, ab: &ProperAlphabet) -> Guard {
        let mut parts = Vec::new();
        for b in &ab.ops {
            for i in &ab.intervals {
                if self.holds(b, i) {
                    parts.push(Guard::Atom(i.clone(), b.clone()));
                }
            }
            for i in &ab.intervals {
                if !self.holds(b, i) {
                    parts.push(Guard::Atom(i.clone(), b.clone()).negate());
                }
            }
        }
        Guard::all(parts)
    }

    /// Whether this letter satisfies every literal of the clause.
    pub fn satisfies(&self, c: &Clause) -> bool {
        c.iter().all(|((i, b), pos)| self.holds(b, i) == *pos)
    }
}

impl fmt::Display for ProperLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mark {
            None => write!(f, "({}", self.action)?,
            Some(m) => write!(f, "({},{}", self.action, m as u8)?,
        }
        for (b, s) in &self.h {
            let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
            write!(f, " {b}:{{{}}}", items.join(" "))?;
        }
        write!(f, ")")
    }
}

/// Finite vocabulary fixing a proper alphabet: actions, operators and intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProperAlphabet {
    pub actions: Vec<Action>,
    pub floating: bool,
    pub ops: Vec<OperatorBinding>,
    pub intervals: Vec<Interval>,
}

/// Letter alphabets beyond this size are refused.
const MAX_PROPER_BITS: usize = 16;

impl ProperAlphabet {
    pub fn new(
        actions: impl IntoIterator<Item = Action>,
        ops: impl IntoIterator<Item = OperatorBinding>,
        intervals: impl IntoIterator<Item = Interval>,
    ) -> Self {
        let mut actions: Vec<Action> = actions.into_iter().collect();
        actions.sort();
        actions.dedup();
        let mut ops: Vec<OperatorBinding> = ops.into_iter().collect();
        ops.sort();
        ops.dedup();
        let mut intervals: Vec<Interval> = intervals.into_iter().collect();
        intervals.sort();
        intervals.dedup();
        ProperAlphabet {
            actions,
            floating: false,
            ops,
            intervals,
        }
    }

    pub fn with_marks(mut self, floating: bool) -> Self {
        self.floating = floating;
        self
    }

    /// Smallest alphabet containing both vocabularies.
    pub fn merge(&self, o: &ProperAlphabet) -> Result<ProperAlphabet> {
        if self.floating != o.floating {
            return Err(Error::VocabularyMismatch("floating and plain alphabets".into()));
        }
        Ok(ProperAlphabet::new(
            self.actions.iter().chain(&o.actions).cloned(),
            self.ops.iter().chain(&o.ops).cloned(),
            self.intervals.iter().chain(&o.intervals).cloned(),
        )
        .with_marks(self.floating))
    }

    pub fn contains_vocabulary(&self, o: &ProperAlphabet) -> bool {
        o.actions.iter().all(|a| self.actions.contains(a))
            && o.ops.iter().all(|b| self.ops.contains(b))
            && o.intervals.iter().all(|i| self.intervals.contains(i))
    }

    fn bits(&self) -> usize {
        self.ops.len() * self.intervals.len()
    }

    pub fn letter_count(&self) -> usize {
        let marks = if self.floating { 2 } else { 1 };
        (self.actions.len() * marks) << self.bits()
    }

    fn letter_from_bits(&self, action: &Action, mark: Option<bool>, bits: usize) -> ProperLetter {
        let mut h = BTreeMap::new();
        let k = self.intervals.len();
        for (oi, b) in self.ops.iter().enumerate() {
            let s: BTreeSet<Interval> = (0..k)
                .filter(|ii| bits >> (oi * k + ii) & 1 == 1)
                .map(|ii| self.intervals[ii].clone())
                .collect();
            h.insert(b.clone(), s);
        }
        ProperLetter {
            action: action.clone(),
            mark,
            h,
        }
    }

    /// Every letter, in sorted order.
    pub fn letters(&self) -> Result<Vec<ProperLetter>> {
        if self.bits() > MAX_PROPER_BITS {
            return Err(Error::Unsupported(format!(
                "proper alphabet with {} operator-interval pairs",
                self.bits()
            )));
        }
        let marks: Vec<Option<bool>> = if self.floating {
            vec![Some(false), Some(true)]
        } else {
            vec![None]
        };
        let mut out = Vec::with_capacity(self.letter_count());
        for a in &self.actions {
            for &m in &marks {
                for bits in 0..1usize << self.bits() {
                    out.push(self.letter_from_bits(a, m, bits));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// The letter describing position `i`, given the per-atom signals.
    fn letter_at(
        &self,
        word: &TimedLasso,
        mark: Option<usize>,
        signals: &[PositionSet],
        i: usize,
    ) -> Result<ProperLetter> {
        let a = word.action(i);
        if !self.actions.contains(a) {
            return Err(Error::NoProperLetter {
                action: a.clone(),
                position: i,
            });
        }
        let mut bits = 0usize;
        for (k, s) in signals.iter().enumerate() {
            if s.member(i) {
                bits |= 1 << k;
            }
        }
        let m = if self.floating { Some(mark == Some(i)) } else { None };
        Ok(self.letter_from_bits(a, m, bits))
    }

    /// Atom signals in bit order: operator-major, interval-minor.
    fn signals(&self, word: &TimedLasso, env: &dyn Resolver, cfg: &Config) -> Result<Vec<PositionSet>> {
        let mut out = Vec::with_capacity(self.bits());
        for b in &self.ops {
            for i in &self.intervals {
                out.push(atom_signal(b, i, word, env, cfg)?);
            }
        }
        Ok(out)
    }
}

/// The unique proper symbolic word that `word` satisfies letter by letter.
pub fn canonical_word(
    ab: &ProperAlphabet,
    word: &TimedLasso,
    env: &dyn Resolver,
    cfg: &Config,
) -> Result<Lasso<ProperLetter>> {
    if ab.floating {
        return Err(Error::VocabularyMismatch("floating alphabet needs a marked word".into()));
    }
    canonical_marked_word(ab, word, None, env, cfg)
}

/// Canonical word of a word with an optional marked position; the mark must lie in the stem.
pub fn canonical_marked_word(
    ab: &ProperAlphabet,
    word: &TimedLasso,
    mark: Option<usize>,
    env: &dyn Resolver,
    cfg: &Config,
) -> Result<Lasso<ProperLetter>> {
    let signals = ab.signals(word, env, cfg)?;
    let mut shapes: Vec<(usize, usize)> = signals.iter().map(|s| (s.stem_len(), s.period())).collect();
    shapes.push((word.stem_len(), word.period_len()));
    if let Some(m) = mark {
        shapes.push((m + 1, 1));
    }
    let (s, c) = common_shape(&shapes);
    let stem = (0..s)
        .map(|i| ab.letter_at(word, mark, &signals, i))
        .collect::<Result<Vec<_>>>()?;
    let cycle = (s..s + c)
        .map(|i| ab.letter_at(word, mark, &signals, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Lasso::new(stem, cycle).canonical())
}

/// Decides whether `word` belongs to `tw(γ)` for a word over plain symbolic letters.
pub fn in_symbolic_word(
    gamma: &Lasso<SymbolicLetter>,
    word: &TimedLasso,
    env: &dyn Resolver,
    cfg: &Config,
) -> Result<bool> {
    let mut cache = SignalCache::new();
    let mut sigs: BTreeMap<&Guard, PositionSet> = BTreeMap::new();
    for l in gamma.stem.iter().chain(&gamma.cycle) {
        if !sigs.contains_key(&l.guard) {
            let s = guard_signal_cached(&l.guard, word, env, cfg, &mut cache)?;
            sigs.insert(&l.guard, s);
        }
    }
    let mut shapes: Vec<(usize, usize)> = sigs.values().map(|s| (s.stem_len(), s.period())).collect();
    shapes.push(gamma.shape());
    shapes.push((word.stem_len(), word.period_len()));
    let (s, c) = common_shape(&shapes);
    Ok((0..s + c).all(|i| {
        let l = gamma.get(i);
        l.action == *word.action(i) && sigs[&l.guard].member(i)
    }))
}

/// Decides whether `word` belongs to `tw_Γ(γ)`; for proper alphabets this is
/// equality with the canonical word.
pub fn in_proper_word(
    ab: &ProperAlphabet,
    gamma: &Lasso<ProperLetter>,
    word: &TimedLasso,
    env: &dyn Resolver,
    cfg: &Config,
) -> Result<bool> {
    match canonical_word(ab, word, env, cfg) {
        Ok(c) => Ok(c.same_sequence(gamma)),
        Err(Error::NoProperLetter { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Input-determined timed automaton over symbolic letters.
///
/// `sigma` and `ops` are the declared action alphabet and operator set; the
/// automaton's letters may only use these.
#[derive(Debug, Clone)]
pub struct Idta {
    pub sigma: Vec<Action>,
    pub ops: Vec<OperatorBinding>,
    pub automaton: BuchiAutomaton<SymbolicLetter>,
}

impl Idta {
    pub fn new(sigma: Vec<Action>, ops: Vec<OperatorBinding>, automaton: BuchiAutomaton<SymbolicLetter>) -> Self {
        let mut sigma = sigma;
        sigma.sort();
        sigma.dedup();
        let mut ops = ops;
        for l in automaton.alphabet() {
            ops.extend(l.guard.bindings());
        }
        ops.sort();
        ops.dedup();
        Idta { sigma, ops, automaton }
    }

    pub fn is_floating(&self) -> bool {
        self.automaton.alphabet().iter().any(|l| l.mark.is_some())
    }

    /// Letters that label at least one transition.
    pub fn used_letters(&self) -> Vec<&SymbolicLetter> {
        let mut used = self.automaton.empty_set();
        for q in 0..self.automaton.num_states() {
            for e in self.automaton.edges(q) {
                used.union_with(&e.letters);
            }
        }
        used.ones().map(|i| &self.automaton.alphabet()[i]).collect()
    }

    /// Intervals occurring in the guards of used letters.
    pub fn ivoc(&self) -> BTreeSet<Interval> {
        self.used_letters().iter().flat_map(|l| l.guard.intervals()).collect()
    }

    /// Vocabulary of this automaton as a proper alphabet.
    pub fn vocabulary(&self) -> ProperAlphabet {
        ProperAlphabet::new(self.sigma.iter().cloned(), self.ops.iter().cloned(), self.ivoc())
            .with_marks(self.is_floating())
    }

    /// Per position class of `word`, the set of letters enabled there;
    /// `mark` is the marked position for floating automata.
    pub(crate) fn enabled_letters(
        &self,
        word: &TimedLasso,
        mark: Option<usize>,
        env: &dyn Resolver,
        cfg: &Config,
    ) -> Result<Lasso<FixedBitSet>> {
        let extra = mark.map(|m| (m + 1, 1));
        self.enabled_by(word, &|i| mark == Some(i), extra, env, cfg)
    }

    /// Letters enabled at each position if every position, or none, were marked.
    pub(crate) fn enabled_uniform(
        &self,
        word: &TimedLasso,
        marked: bool,
        env: &dyn Resolver,
        cfg: &Config,
    ) -> Result<Lasso<FixedBitSet>> {
        self.enabled_by(word, &|_| marked, None, env, cfg)
    }

    fn enabled_by(
        &self,
        word: &TimedLasso,
        is_marked: &dyn Fn(usize) -> bool,
        extra: Option<(usize, usize)>,
        env: &dyn Resolver,
        cfg: &Config,
    ) -> Result<Lasso<FixedBitSet>> {
        let alpha = self.automaton.alphabet();
        let mut cache = SignalCache::new();
        let mut guards: BTreeMap<&Guard, PositionSet> = BTreeMap::new();
        for l in alpha {
            if !guards.contains_key(&l.guard) {
                let s = guard_signal_cached(&l.guard, word, env, cfg, &mut cache)?;
                guards.insert(&l.guard, s);
            }
        }
        let mut shapes: Vec<(usize, usize)> = guards.values().map(|s| (s.stem_len(), s.period())).collect();
        shapes.push((word.stem_len(), word.period_len()));
        shapes.extend(extra);
        let (s, c) = common_shape(&shapes);
        let at = |i: usize| {
            let mut set = self.automaton.empty_set();
            for (k, l) in alpha.iter().enumerate() {
                let mark_ok = l.mark.is_none_or(|b| b == is_marked(i));
                if mark_ok && l.action == *word.action(i) && guards[&l.guard].member(i) {
                    set.insert(k);
                }
            }
            set
        };
        Ok(Lasso::new((0..s).map(at).collect(), (s..s + c).map(at).collect()))
    }
}

/// Decides `word ∈ L(a)` by running the automaton over the letters enabled at each position.
pub fn timed_membership(a: &Idta, word: &TimedLasso, env: &dyn Resolver, cfg: &Config) -> Result<bool> {
    let sets = a.enabled_letters(word, None, env, cfg)?;
    Ok(a.automaton.accepts_letter_sets(&sets))
}

/// Membership for a proper automaton, via the canonical word.
pub fn proper_membership(p: &ProperIdta, word: &TimedLasso, env: &dyn Resolver, cfg: &Config) -> Result<bool> {
    match canonical_word(&p.alphabet, word, env, cfg) {
        Ok(c) => p.automaton.accepts_lasso(&c),
        Err(Error::NoProperLetter { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Symbolic emptiness of the underlying Büchi automaton, with an accepted symbolic lasso.
pub fn is_empty_symbolic(a: &Idta) -> (bool, Option<Lasso<SymbolicLetter>>) {
    let w = a.automaton.accepting_witness();
    (w.is_none(), w)
}

/// Input-determined automaton over a proper alphabet.
#[derive(Debug, Clone)]
pub struct ProperIdta {
    pub alphabet: ProperAlphabet,
    pub automaton: BuchiAutomaton<ProperLetter>,
}

/// Equivalent automaton over the proper alphabet of the automaton's own vocabulary.
pub fn to_proper(a: &Idta, cfg: &Config) -> Result<ProperIdta> {
    to_proper_over(a, &a.vocabulary(), cfg)
}

/// Equivalent automaton over a given proper alphabet containing the automaton's vocabulary.
pub fn to_proper_over(a: &Idta, ab: &ProperAlphabet, cfg: &Config) -> Result<ProperIdta> {
    if !ab.contains_vocabulary(&a.vocabulary()) {
        return Err(Error::VocabularyMismatch(
            "target alphabet lacks part of the automaton's vocabulary".into(),
        ));
    }
    let letters = ab.letters()?;
    let src = &a.automaton;
    let mut out = BuchiAutomaton::new(letters.clone());
    for q in 1..src.num_states() {
        out.add_named_state(src.name(q), src.is_accepting(q));
    }
    out.set_name(0, src.name(0));
    out.set_accepting(0, src.is_accepting(0));
    out.set_initial(src.initial());
    // all letters of one symbolic label share its DNF
    let mut by_label: Vec<Option<FixedBitSet>> = vec![None; src.alphabet().len()];
    for q in 0..src.num_states() {
        for e in src.edges(q) {
            let mut set = out.empty_set();
            for li in e.letters.ones() {
                if by_label[li].is_none() {
                    let l = &src.alphabet()[li];
                    let clauses = dnf(&l.guard, cfg.dnf_cap)?;
                    let mut s = out.empty_set();
                    for (k, p) in letters.iter().enumerate() {
                        if p.action == l.action && p.mark == l.mark && clauses.iter().any(|c| p.satisfies(c)) {
                            s.insert(k);
                        }
                    }
                    by_label[li] = Some(s);
                }
                set.union_with(by_label[li].as_ref().expect("label letters"));
            }
            out.add_edge(q, set, e.target);
        }
    }
    Ok(ProperIdta {
        alphabet: ab.clone(),
        automaton: out,
    })
}

/// Reads a proper automaton as a symbolic one, each letter becoming its exact guard.
pub fn from_proper(p: &ProperIdta) -> Idta {
    let src = &p.automaton;
    let labels: Vec<SymbolicLetter> = src
        .alphabet()
        .iter()
        .map(|l| SymbolicLetter {
            action: l.action.clone(),
            mark: l.mark,
            guard: l.to_guard(&p.alphabet),
        })
        .collect();
    let mut out = BuchiAutomaton::new(labels.clone());
    for q in 1..src.num_states() {
        out.add_named_state(src.name(q), src.is_accepting(q));
    }
    out.set_name(0, src.name(0));
    out.set_accepting(0, src.is_accepting(0));
    out.set_initial(src.initial());
    let map: Vec<usize> = labels
        .iter()
        .map(|l| out.letter_index(l).expect("own label"))
        .collect();
    for q in 0..src.num_states() {
        for e in src.edges(q) {
            let mut s = out.empty_set();
            for li in e.letters.ones() {
                s.insert(map[li]);
            }
            out.add_edge(q, s, e.target);
        }
    }
    Idta::new(p.alphabet.actions.clone(), p.alphabet.ops.clone(), out)
}

/// Automaton accepting the timed words over its actions that `a` rejects.
pub fn complement_idta(a: &Idta, cfg: &Config) -> Result<Idta> {
    let p = to_proper(a, cfg)?;
    let automaton = complement(&p.automaton, cfg.state_cap)?;
    Ok(from_proper(&ProperIdta {
        alphabet: p.alphabet,
        automaton,
    }))
}

/// Union, intersection or difference, computed over the merged proper alphabet.
pub fn combine_idta(op: BoolOp, a: &Idta, b: &Idta, cfg: &Config) -> Result<Idta> {
    let ab = a.vocabulary().merge(&b.vocabulary())?;
    let pa = to_proper_over(a, &ab, cfg)?;
    let pb = to_proper_over(b, &ab, cfg)?;
    let automaton = bool_combine(op, &pa.automaton, &pb.automaton, cfg.state_cap)?.reduce();
    Ok(from_proper(&ProperIdta { alphabet: ab, automaton }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::NoResolver;
    use crate::time::int;

    fn sigma1() -> TimedLasso {
        TimedLasso::new(
            vec![("a".into(), int(0)), ("b".into(), int(1))],
            vec![("a".into(), int(2)), ("b".into(), int(3))],
            int(2),
        )
        .unwrap()
    }

    fn i11() -> Interval {
        Interval::point(int(1))
    }

    fn la() -> OperatorBinding {
        OperatorBinding::last("a")
    }

    #[test]
    fn dnf_keeps_clause_order() {
        let i12 = Interval::closed(int(1), int(2));
        let g = Guard::atom(i11(), la())
            .negate()
            .and(Guard::atom(i12.clone(), la()).or(Guard::True));
        let d = dnf(&g, 100).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].len(), 2);
        assert_eq!(d[1], Clause::from([((i11(), la()), false)]));
        assert!(dnf(&Guard::True.negate(), 10).unwrap().is_empty());
        let contra = Guard::atom(i11(), la()).and(Guard::atom(i11(), la()).negate());
        assert!(dnf(&contra, 10).unwrap().is_empty());
    }

    #[test]
    fn dnf_cap() {
        let atoms: Vec<Guard> = (0..6)
            .map(|k| Guard::atom(Interval::point(int(k)), la()).or(Guard::atom(Interval::point(int(k)), la()).negate()))
            .collect();
        assert!(matches!(dnf(&Guard::all(atoms), 8), Err(Error::DnfCapExceeded(8))));
    }

    #[test]
    fn guard_truth() {
        let w = sigma1();
        let g = Guard::atom(i11(), la());
        assert!(guard_sat(&g, &w, 1, &NoResolver).unwrap());
        assert!(!guard_sat(&g, &w, 0, &NoResolver).unwrap());
        assert!(guard_sat(&g.clone().negate(), &w, 0, &NoResolver).unwrap());
        let s = guard_signal(&g, &w, &NoResolver, &Config::default()).unwrap();
        for i in 0..10 {
            assert_eq!(s.member(i), i % 2 == 1);
        }
    }

    #[test]
    fn canonical_word_is_unique_member() {
        let ab = ProperAlphabet::new(["a".to_string(), "b".to_string()], [la()], [i11()]);
        assert_eq!(ab.letter_count(), 4);
        let w = sigma1();
        let c = canonical_word(&ab, &w, &NoResolver, &Config::default()).unwrap();
        assert!(in_proper_word(&ab, &c, &w, &NoResolver, &Config::default()).unwrap());
        assert!(c.get(1).holds(&la(), &i11()));
        assert!(!c.get(0).holds(&la(), &i11()));
        let mut bad = c.reshape(2, 2);
        bad.stem[0].h.get_mut(&la()).unwrap().insert(i11());
        assert!(!in_proper_word(&ab, &bad, &w, &NoResolver, &Config::default()).unwrap());
    }

    #[test]
    fn proper_letter_guard() {
        let i = Interval::closed(int(1), int(2));
        let j = Interval::new(int(0), false, Some(int(1)), false).unwrap();
        let ab = ProperAlphabet::new(["a".to_string()], [la()], [i.clone(), j.clone()]);
        let l = ProperLetter {
            action: "a".into(),
            mark: None,
            h: BTreeMap::from([(la(), BTreeSet::from([i.clone()]))]),
        };
        assert_eq!(
            l.to_guard(&ab),
            Guard::atom(i, la()).and(Guard::atom(j, la()).negate())
        );
    }

    #[test]
    fn symbolic_word_membership() {
        let w = sigma1();
        let g = Guard::atom(i11(), la());
        let gamma = Lasso::new(vec![], vec![SymbolicLetter::new("a", Guard::True), SymbolicLetter::new("b", g)]);
        assert!(in_symbolic_word(&gamma, &w, &NoResolver, &Config::default()).unwrap());
        let wrong = Lasso::new(vec![], vec![SymbolicLetter::new("b", Guard::True)]);
        assert!(!in_symbolic_word(&wrong, &w, &NoResolver, &Config::default()).unwrap());
    }
}
