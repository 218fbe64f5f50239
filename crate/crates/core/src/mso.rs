//! Monadic second-order logic over timed and symbolic words.
//!
//! [`Mso<P>`] is generic in the letter type: `Mso<Action>` is the timed logic
//! whose formulas may also contain operator atoms `I ∈ Δ(x)`, and
//! `Mso<ProperLetter>` is plain MSO over a proper alphabet. Plain formulas
//! compile to Büchi automata over the alphabet extended with one bit track
//! per free variable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::omega::{complement, marked_positions, BuchiAutomaton};
use crate::operators::{OperatorBinding, Resolver};
use crate::symbolic::{canonical_word, Guard, Idta, ProperAlphabet, ProperIdta, ProperLetter};
use crate::time::{common_shape, Action, Interval, Lasso, PositionSet, TimedLasso};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mso<P> {
    True,
    False,
    /// The letter at `x` is `P`.
    Letter(P, String),
    /// `I ∈ Δ(x)`.
    Atom(Interval, OperatorBinding, String),
    /// `x ∈ X`.
    In(String, String),
    /// `x < y`.
    Less(String, String),
    Not(Box<Mso<P>>),
    Or(Box<Mso<P>>, Box<Mso<P>>),
    And(Box<Mso<P>>, Box<Mso<P>>),
    Exists(String, Box<Mso<P>>),
    ExistsSet(String, Box<Mso<P>>),
}

/// Rewrites an operator atom at a variable into a formula over the target letters.
type AtomRewrite<'a, Q> = dyn FnMut(&Interval, &OperatorBinding, &str) -> Result<Mso<Q>> + 'a;

impl<P: Clone> Mso<P> {
    pub fn letter(p: P, x: &str) -> Self {
        Mso::Letter(p, x.into())
    }

    pub fn atom(i: Interval, b: OperatorBinding, x: &str) -> Self {
        Mso::Atom(i, b, x.into())
    }

    pub fn member(x: &str, set: &str) -> Self {
        Mso::In(x.into(), set.into())
    }

    pub fn less(x: &str, y: &str) -> Self {
        Mso::Less(x.into(), y.into())
    }

    pub fn negate(self) -> Self {
        Mso::Not(Box::new(self))
    }

    pub fn or(self, o: Self) -> Self {
        Mso::Or(Box::new(self), Box::new(o))
    }

    pub fn and(self, o: Self) -> Self {
        Mso::And(Box::new(self), Box::new(o))
    }

    pub fn implies(self, o: Self) -> Self {
        self.negate().or(o)
    }

    pub fn exists(x: &str, body: Self) -> Self {
        Mso::Exists(x.into(), Box::new(body))
    }

    pub fn exists_set(x: &str, body: Self) -> Self {
        Mso::ExistsSet(x.into(), Box::new(body))
    }

    pub fn forall(x: &str, body: Self) -> Self {
        Self::exists(x, body.negate()).negate()
    }

    pub fn forall_set(x: &str, body: Self) -> Self {
        Self::exists_set(x, body.negate()).negate()
    }

    pub fn all(fs: impl IntoIterator<Item = Self>) -> Self {
        fs.into_iter().reduce(Self::and).unwrap_or(Mso::True)
    }

    pub fn any(fs: impl IntoIterator<Item = Self>) -> Self {
        fs.into_iter().reduce(Self::or).unwrap_or(Mso::False)
    }

    /// `x` is the first position: `¬∃y (y < x)`.
    pub fn zero(x: &str) -> Self {
        let y = format!("{x}'");
        Self::exists(&y, Self::less(&y, x)).negate()
    }

    /// `y` is the position right after `x`.
    pub fn succ(x: &str, y: &str) -> Self {
        let z = format!("{x}{y}'");
        Self::less(x, y).and(Self::exists(&z, Self::less(x, &z).and(Self::less(&z, y))).negate())
    }

    /// `x ≤ y` as `¬(y < x)`.
    pub fn le(x: &str, y: &str) -> Self {
        Self::less(y, x).negate()
    }

    /// `x = y` as mutual `≤`.
    pub fn eq(x: &str, y: &str) -> Self {
        Self::le(x, y).and(Self::le(y, x))
    }

    /// `x + 1 ∈ X` as `∀y (succ_x(y) → y ∈ X)`.
    pub fn next_in(x: &str, set: &str) -> Self {
        let y = format!("{x}+");
        Self::forall(&y, Self::succ(x, &y).implies(Self::member(&y, set)))
    }

    /// Free first-order and set variables.
    pub fn free_vars(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut fo = BTreeSet::new();
        let mut so = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut fo, &mut so);
        (fo, so)
    }

    fn collect_free(&self, bound: &mut Vec<String>, fo: &mut BTreeSet<String>, so: &mut BTreeSet<String>) {
        let note = |v: &String, set: &mut BTreeSet<String>, bound: &Vec<String>| {
            if !bound.contains(v) {
                set.insert(v.clone());
            }
        };
        match self {
            Mso::True | Mso::False => {}
            Mso::Letter(_, x) | Mso::Atom(_, _, x) => note(x, fo, bound),
            Mso::In(x, s) => {
                note(x, fo, bound);
                note(s, so, bound);
            }
            Mso::Less(x, y) => {
                note(x, fo, bound);
                note(y, fo, bound);
            }
            Mso::Not(f) => f.collect_free(bound, fo, so),
            Mso::Or(f, g) | Mso::And(f, g) => {
                f.collect_free(bound, fo, so);
                g.collect_free(bound, fo, so);
            }
            Mso::Exists(x, f) | Mso::ExistsSet(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, fo, so);
                bound.pop();
            }
        }
    }

    pub fn is_first_order(&self) -> bool {
        match self {
            Mso::ExistsSet(..) | Mso::In(..) => false,
            Mso::Not(f) | Mso::Exists(_, f) => f.is_first_order(),
            Mso::Or(f, g) | Mso::And(f, g) => f.is_first_order() && g.is_first_order(),
            _ => true,
        }
    }

    pub fn has_set_quantifier(&self) -> bool {
        match self {
            Mso::ExistsSet(..) => true,
            Mso::Not(f) | Mso::Exists(_, f) => f.has_set_quantifier(),
            Mso::Or(f, g) | Mso::And(f, g) => f.has_set_quantifier() || g.has_set_quantifier(),
            _ => false,
        }
    }

    /// Nesting depth of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Mso::Exists(_, f) | Mso::ExistsSet(_, f) => 1 + f.quantifier_depth(),
            Mso::Not(f) => f.quantifier_depth(),
            Mso::Or(f, g) | Mso::And(f, g) => f.quantifier_depth().max(g.quantifier_depth()),
            _ => 0,
        }
    }

    pub fn atoms(&self) -> BTreeSet<(Interval, OperatorBinding)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Mso::Atom(i, b, _) = f {
                out.insert((i.clone(), b.clone()));
            }
        });
        out
    }

    pub fn letters(&self) -> Vec<P>
    where
        P: Ord,
    {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Mso::Letter(p, _) = f {
                out.insert(p.clone());
            }
        });
        out.into_iter().collect()
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Mso<P>)) {
        f(self);
        match self {
            Mso::Not(g) | Mso::Exists(_, g) | Mso::ExistsSet(_, g) => g.visit(f),
            Mso::Or(g, h) | Mso::And(g, h) => {
                g.visit(f);
                h.visit(f);
            }
            _ => {}
        }
    }

    /// Rebuilds the formula, replacing letter and atom leaves.
    pub fn map_leaves<Q: Clone>(
        &self,
        letter: &mut dyn FnMut(&P, &str) -> Result<Mso<Q>>,
        atom: &mut AtomRewrite<'_, Q>,
    ) -> Result<Mso<Q>> {
        Ok(match self {
            Mso::True => Mso::True,
            Mso::False => Mso::False,
            Mso::Letter(p, x) => letter(p, x)?,
            Mso::Atom(i, b, x) => atom(i, b, x)?,
            Mso::In(x, s) => Mso::In(x.clone(), s.clone()),
            Mso::Less(x, y) => Mso::Less(x.clone(), y.clone()),
            Mso::Not(f) => Mso::Not(Box::new(f.map_leaves(letter, atom)?)),
            Mso::Or(f, g) => Mso::Or(Box::new(f.map_leaves(letter, atom)?), Box::new(g.map_leaves(letter, atom)?)),
            Mso::And(f, g) => Mso::And(Box::new(f.map_leaves(letter, atom)?), Box::new(g.map_leaves(letter, atom)?)),
            Mso::Exists(x, f) => Mso::Exists(x.clone(), Box::new(f.map_leaves(letter, atom)?)),
            Mso::ExistsSet(x, f) => Mso::ExistsSet(x.clone(), Box::new(f.map_leaves(letter, atom)?)),
        })
    }
}

impl<P: fmt::Display> fmt::Display for Mso<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mso::True => write!(f, "true"),
            Mso::False => write!(f, "false"),
            Mso::Letter(p, x) => write!(f, "(Q {p} {x})"),
            Mso::Atom(i, b, x) => write!(f, "(in {i} {b} {x})"),
            Mso::In(x, s) => write!(f, "(mem {x} {s})"),
            Mso::Less(x, y) => write!(f, "(lt {x} {y})"),
            Mso::Not(g) => write!(f, "(not {g})"),
            Mso::Or(g, h) => write!(f, "(or {g} {h})"),
            Mso::And(g, h) => write!(f, "(and {g} {h})"),
            Mso::Exists(x, g) => write!(f, "(exists {x} {g})"),
            Mso::ExistsSet(x, g) => write!(f, "(exists-set {x} {g})"),
        }
    }
}

/// Values of free variables: positions for first-order, position sets for set variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    pub fo: BTreeMap<String, usize>,
    pub so: BTreeMap<String, PositionSet>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, x: &str, i: usize) -> Self {
        self.fo.insert(x.into(), i);
        self
    }

    pub fn with_set(mut self, x: &str, s: PositionSet) -> Self {
        self.so.insert(x.into(), s);
        self
    }

    fn covers<P: Clone>(&self, f: &Mso<P>) -> Result<()> {
        let (fo, so) = f.free_vars();
        let missing: Vec<String> = fo
            .iter()
            .filter(|x| !self.fo.contains_key(*x))
            .chain(so.iter().filter(|x| !self.so.contains_key(*x)))
            .cloned()
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::FreeVariable(missing.join(", ")))
        }
    }
}

/// Guard `g` read at position `x`.
pub fn guard_at(g: &Guard, x: &str) -> Mso<Action> {
    match g {
        Guard::True => Mso::True,
        Guard::Atom(i, b) => Mso::atom(i.clone(), b.clone(), x),
        Guard::Not(h) => guard_at(h, x).negate(),
        Guard::Or(a, b) => guard_at(a, x).or(guard_at(b, x)),
        Guard::And(a, b) => guard_at(a, x).and(guard_at(b, x)),
    }
}

/// Vocabulary of a timed formula, with the given extra actions.
pub fn vocabulary(f: &Mso<Action>, extra_actions: &[Action]) -> ProperAlphabet {
    let atoms = f.atoms();
    ProperAlphabet::new(
        f.letters().into_iter().chain(extra_actions.iter().cloned()),
        atoms.iter().map(|a| a.1.clone()),
        atoms.iter().map(|a| a.0.clone()),
    )
}

/// Replaces `Q_a(x)` and `I ∈ Δ(x)` by disjunctions of proper letter predicates.
pub fn ttos(f: &Mso<Action>, ab: &ProperAlphabet) -> Result<Mso<ProperLetter>> {
    ttos_over(f, ab, &ab.letters()?)
}

/// As [`ttos`], with the disjunctions restricted to `letters`.
pub fn ttos_over(f: &Mso<Action>, ab: &ProperAlphabet, letters: &[ProperLetter]) -> Result<Mso<ProperLetter>> {
    f.map_leaves(
        &mut |a, x| {
            Ok(Mso::any(
                letters
                    .iter()
                    .filter(|l| l.action == *a)
                    .map(|l| Mso::letter(l.clone(), x)),
            ))
        },
        &mut |i, b, x| {
            if !ab.ops.contains(b) || !ab.intervals.contains(i) {
                return Err(Error::VocabularyMismatch(format!("{i} in {b} is outside the alphabet")));
            }
            Ok(Mso::any(
                letters.iter().filter(|l| l.holds(b, i)).map(|l| Mso::letter(l.clone(), x)),
            ))
        },
    )
}

/// Sentence defining the language of an automaton: a run is a partition of
/// the positions into one set per state.
pub fn automaton_to_sentence(a: &Idta) -> Mso<Action> {
    run_formula(a, None)
}

/// Formula with free variable `z` defining the floating language of `b`.
pub fn floating_automaton_to_formula(b: &Idta, z: &str) -> Mso<Action> {
    run_formula(b, Some(z))
}

fn run_formula(a: &Idta, mark: Option<&str>) -> Mso<Action> {
    let aut = &a.automaton;
    let n = aut.num_states();
    let (x, y) = match mark {
        Some(z) if z == "x" || z == "y" => ("u", "v"),
        _ => ("x", "y"),
    };
    let set = |q: usize| format!("X{q}");
    let cover = Mso::forall(x, Mso::any((0..n).map(|q| Mso::member(x, &set(q)))));
    let disjoint = Mso::all((0..n).flat_map(|p| {
        (p + 1..n).map(move |q| Mso::forall(x, Mso::member(x, &set(p)).and(Mso::member(x, &set(q))).negate()))
    }));
    let init = Mso::forall(x, Mso::zero(x).implies(Mso::member(x, &set(aut.initial()))));
    let steps = aut.transitions().into_iter().map(|(p, l, q)| {
        let mut parts = vec![
            Mso::member(x, &set(p)),
            Mso::letter(l.action.clone(), x),
            guard_at(&l.guard, x),
        ];
        if let (Some(z), Some(m)) = (mark, l.mark) {
            let same = Mso::eq(x, z);
            parts.push(if m { same } else { same.negate() });
        }
        parts.push(Mso::next_in(x, &set(q)));
        Mso::all(parts.into_iter().filter(|f| *f != Mso::True))
    });
    let trans = Mso::forall(x, Mso::any(steps));
    let accept = Mso::any(
        aut.accepting_states()
            .into_iter()
            .map(|q| Mso::forall(x, Mso::exists(y, Mso::less(x, y).and(Mso::member(y, &set(q)))))),
    );
    let body = Mso::all([cover, disjoint, init, trans, accept].into_iter().filter(|f| *f != Mso::True));
    (0..n).rev().fold(body, |f, q| Mso::exists_set(&set(q), f))
}

/// Büchi automaton for a formula over a finite alphabet, reading one extra
/// bit per variable of `vars`.
///
/// Letters are pairs `(index into base, track bits)`, bit `j` belonging to
/// `vars[j]`. Accepted words are exactly the models: first-order tracks
/// carry a single 1.
#[derive(Debug, Clone)]
pub struct CompiledFormula<P> {
    pub base: Vec<P>,
    pub vars: Vec<String>,
    pub automaton: BuchiAutomaton<(usize, u32)>,
}

impl<P: Clone + Ord + fmt::Debug> CompiledFormula<P> {
    /// Whether `(w, v)` is a model.
    pub fn accepts(&self, w: &Lasso<P>, v: &Valuation) -> Result<bool> {
        let mut shapes = vec![w.shape()];
        for x in &self.vars {
            if let Some(&i) = v.fo.get(x) {
                shapes.push((i + 1, 1));
            } else if let Some(s) = v.so.get(x) {
                shapes.push((s.stem_len(), s.period()));
            } else {
                return Err(Error::FreeVariable(x.clone()));
            }
        }
        let (s, c) = common_shape(&shapes);
        let k = self.vars.len();
        let at = |i: usize| -> Result<(usize, u32)> {
            let b = self
                .base
                .binary_search(w.get(i))
                .map_err(|_| Error::AlphabetMismatch(format!("{:?} is not a base letter", w.get(i))))?;
            let mut bits = 0u32;
            for (j, x) in self.vars.iter().enumerate() {
                let on = match v.fo.get(x) {
                    Some(&p) => p == i,
                    None => v.so[x].member(i),
                };
                if on {
                    bits |= 1 << j;
                }
            }
            debug_assert!(bits < 1 << k);
            Ok((b, bits))
        };
        let word = Lasso::new(
            (0..s).map(at).collect::<Result<Vec<_>>>()?,
            (s..s + c).map(at).collect::<Result<Vec<_>>>()?,
        );
        self.automaton.accepts_lasso(&word)
    }
}

/// Compiles a formula over the letters `base`; `vars` must include every free variable.
pub fn mso_to_buchi<P: Clone + Ord + fmt::Debug>(
    f: &Mso<P>,
    base: &[P],
    vars: &[String],
    cfg: &Config,
) -> Result<CompiledFormula<P>> {
    let mut base = base.to_vec();
    base.sort();
    base.dedup();
    let (fo, so) = f.free_vars();
    let missing: Vec<&String> = fo.iter().chain(&so).filter(|x| !vars.contains(x)).collect();
    if !missing.is_empty() {
        return Err(Error::FreeVariable(
            missing.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
        ));
    }
    let c = Compiler {
        base: &base,
        cap: cfg.state_cap,
    };
    let node = c.compile(f)?;
    let mut target: Vec<Track> = node.tracks.clone();
    for x in vars {
        if !target.iter().any(|t| t.name == *x) {
            target.push(Track {
                name: x.clone(),
                set: !fo.contains(x) && x.chars().next().is_some_and(char::is_uppercase),
            });
        }
    }
    // keep the caller's order
    target.sort_by_key(|t| vars.iter().position(|v| *v == t.name));
    let node = c.cylindrify(&node, &target);
    let node = c.valid(node)?;
    Ok(CompiledFormula {
        base,
        vars: node.tracks.iter().map(|t| t.name.clone()).collect(),
        automaton: node.aut,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Track {
    name: String,
    set: bool,
}

#[derive(Debug, Clone)]
struct Node {
    tracks: Vec<Track>,
    aut: BuchiAutomaton<(usize, u32)>,
}

struct Compiler<'a, P> {
    base: &'a [P],
    cap: usize,
}

impl<P: Clone + Ord + fmt::Debug> Compiler<'_, P> {
    fn alphabet(&self, k: usize) -> Vec<(usize, u32)> {
        (0..self.base.len())
            .flat_map(|b| (0..1u32 << k).map(move |bits| (b, bits)))
            .collect()
    }

    fn index(k: usize, b: usize, bits: u32) -> usize {
        (b << k) | bits as usize
    }

    fn letters_where(&self, k: usize, pred: impl Fn(usize, u32) -> bool) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.base.len() << k);
        for b in 0..self.base.len() {
            for bits in 0..1u32 << k {
                if pred(b, bits) {
                    s.insert(Self::index(k, b, bits));
                }
            }
        }
        s
    }

    /// Two states: before and after the single position where the first track is set.
    fn at_one_position(&self, tracks: Vec<Track>, pred: impl Fn(usize, u32) -> bool) -> Node {
        let k = tracks.len();
        let mut aut = BuchiAutomaton::new(self.alphabet(k));
        let done = aut.add_state(true);
        let idle = self.letters_where(k, |_, bits| bits & 1 == 0);
        let fire = self.letters_where(k, |b, bits| bits & 1 == 1 && pred(b, bits));
        aut.add_edge(0, idle.clone(), 0);
        aut.add_edge(0, fire, done);
        aut.add_edge(done, idle, done);
        Node { tracks, aut }
    }

    fn constant(&self, v: bool) -> Node {
        let alpha = self.alphabet(0);
        let aut = if v {
            BuchiAutomaton::universal(alpha)
        } else {
            BuchiAutomaton::new(alpha)
        };
        Node { tracks: vec![], aut }
    }

    fn compile(&self, f: &Mso<P>) -> Result<Node> {
        if let Some(n) = self.single_position(f) {
            return Ok(n);
        }
        match f {
            Mso::True => Ok(self.constant(true)),
            Mso::False => Ok(self.constant(false)),
            Mso::Atom(i, b, _) => Err(Error::Unsupported(format!(
                "operator atom {i} in {b} must be translated to letters before compiling"
            ))),
            Mso::Letter(..) | Mso::In(..) => unreachable!("single-position leaves"),
            Mso::Less(x, y) if x == y => Ok(self.constant(false)),
            Mso::Less(x, y) => {
                let mut tracks = vec![
                    Track { name: x.clone(), set: false },
                    Track { name: y.clone(), set: false },
                ];
                tracks.sort_by(|a, b| a.name.cmp(&b.name));
                let (bx, by) = if tracks[0].name == *x { (1u32, 2u32) } else { (2, 1) };
                let mut aut = BuchiAutomaton::new(self.alphabet(2));
                let mid = aut.add_state(false);
                let done = aut.add_state(true);
                let none = self.letters_where(2, |_, bits| bits == 0);
                aut.add_edge(0, none.clone(), 0);
                aut.add_edge(0, self.letters_where(2, |_, bits| bits == bx), mid);
                aut.add_edge(mid, none.clone(), mid);
                aut.add_edge(mid, self.letters_where(2, |_, bits| bits == by), done);
                aut.add_edge(done, none, done);
                Ok(Node { tracks, aut })
            }
            Mso::Not(g) => {
                let n = self.compile(g)?;
                let c = complement(&n.aut, self.cap)?;
                self.valid(Node { tracks: n.tracks, aut: c })
            }
            Mso::Or(g, h) | Mso::And(g, h) => {
                let a = self.compile(g)?;
                let b = self.compile(h)?;
                let mut tracks = a.tracks.clone();
                for t in &b.tracks {
                    if !tracks.iter().any(|s| s.name == t.name) {
                        tracks.push(t.clone());
                    }
                }
                tracks.sort_by(|a, b| a.name.cmp(&b.name));
                let a = self.cylindrify(&a, &tracks);
                let b = self.cylindrify(&b, &tracks);
                let aut = if matches!(f, Mso::Or(..)) {
                    a.aut.union(&b.aut)?
                } else {
                    a.aut.intersect(&b.aut, self.cap)?
                };
                Ok(Node { tracks, aut: aut.reduce() })
            }
            Mso::Exists(x, g) | Mso::ExistsSet(x, g) => {
                let n = self.compile(g)?;
                let Some(j) = n.tracks.iter().position(|t| t.name == *x) else {
                    return Ok(n);
                };
                let n = if n.tracks[j].set { n } else { self.valid_track(n, j)? };
                let k = n.tracks.len();
                let low = (1u32 << j) - 1;
                let aut = n
                    .aut
                    .project(|&(b, bits)| (b, (bits & low) | ((bits >> (j + 1)) << j)));
                debug_assert_eq!(aut.alphabet().len(), self.base.len() << (k - 1));
                let mut tracks = n.tracks;
                tracks.remove(j);
                Ok(Node { tracks, aut: aut.reduce() })
            }
        }
    }

    /// Quantifier-free formulas about a single first-order variable compile
    /// directly to a letter predicate at that position.
    fn single_position(&self, f: &Mso<P>) -> Option<Node> {
        let mut fo = BTreeSet::new();
        let mut sets = BTreeSet::new();
        let mut ok = true;
        f.visit(&mut |g| match g {
            Mso::Letter(_, x) => {
                fo.insert(x.clone());
            }
            Mso::In(x, s) => {
                fo.insert(x.clone());
                sets.insert(s.clone());
            }
            Mso::Less(x, y) => {
                fo.insert(x.clone());
                fo.insert(y.clone());
            }
            Mso::Exists(..) | Mso::ExistsSet(..) | Mso::Atom(..) => ok = false,
            _ => {}
        });
        if !ok || fo.len() != 1 {
            return None;
        }
        let x = fo.into_iter().next().expect("one variable");
        let mut tracks = vec![Track { name: x, set: false }];
        tracks.extend(sets.into_iter().map(|s| Track { name: s, set: true }));
        let names: Vec<String> = tracks.iter().map(|t| t.name.clone()).collect();
        Some(self.at_one_position(tracks, |b, bits| eval_at(f, &self.base[b], bits, &names)))
    }

    /// Same language over a superset of tracks; new tracks are unconstrained.
    fn cylindrify(&self, n: &Node, target: &[Track]) -> Node {
        if n.tracks == target {
            return n.clone();
        }
        let k_old = n.tracks.len();
        let pos: Vec<usize> = n
            .tracks
            .iter()
            .map(|t| target.iter().position(|s| s.name == t.name).expect("track kept"))
            .collect();
        let alphabet = self.alphabet(target.len());
        let aut = n.aut.pullback(alphabet, |&(b, bits)| {
            let mut old = 0u32;
            for (j, &p) in pos.iter().enumerate() {
                if bits >> p & 1 == 1 {
                    old |= 1 << j;
                }
            }
            Some(Self::index(k_old, b, old))
        });
        Node {
            tracks: target.to_vec(),
            aut,
        }
    }

    /// Restricts every first-order track to a single 1.
    fn valid(&self, n: Node) -> Result<Node> {
        let fo: Vec<usize> = (0..n.tracks.len()).filter(|&j| !n.tracks[j].set).collect();
        self.restrict_tracks(n, &fo)
    }

    fn valid_track(&self, n: Node, j: usize) -> Result<Node> {
        self.restrict_tracks(n, &[j])
    }

    fn restrict_tracks(&self, n: Node, which: &[usize]) -> Result<Node> {
        if which.is_empty() {
            return Ok(n);
        }
        let k = n.tracks.len();
        let mask: u32 = which.iter().map(|&j| 1u32 << j).sum();
        let mut v = BuchiAutomaton::new(self.alphabet(k));
        // state s records which tracks have been seen; only the full set accepts
        let mut ids = BTreeMap::from([(0u32, 0usize)]);
        let mut subsets: Vec<u32> = (0..=mask).filter(|s| s & !mask == 0).collect();
        subsets.sort_by_key(|s| s.count_ones());
        for &s in &subsets[1..] {
            ids.insert(s, v.add_state(false));
        }
        v.set_accepting(ids[&mask], true);
        for &s in &subsets {
            for (&t, &tid) in &ids {
                if t & s != s {
                    continue;
                }
                let fresh = t ^ s;
                let l = self.letters_where(k, |_, bits| bits & mask == fresh);
                v.add_edge(ids[&s], l, tid);
            }
        }
        let aut = n.aut.intersect(&v, self.cap)?.reduce();
        Ok(Node { tracks: n.tracks, aut })
    }
}

fn eval_at<P: PartialEq>(f: &Mso<P>, letter: &P, bits: u32, names: &[String]) -> bool {
    let bit = |v: &String| names.iter().position(|n| n == v).is_some_and(|j| bits >> j & 1 == 1);
    match f {
        Mso::True => true,
        Mso::False => false,
        Mso::Letter(p, _) => p == letter,
        Mso::In(_, s) => bit(s),
        Mso::Less(..) => false,
        Mso::Not(g) => !eval_at(g, letter, bits, names),
        Mso::Or(g, h) => eval_at(g, letter, bits, names) || eval_at(h, letter, bits, names),
        Mso::And(g, h) => eval_at(g, letter, bits, names) && eval_at(h, letter, bits, names),
        Mso::Atom(..) | Mso::Exists(..) | Mso::ExistsSet(..) => unreachable!("quantifier-free"),
    }
}

/// The proper alphabet and the canonical word used to evaluate `f` on `word`.
fn prepared(
    f: &Mso<Action>,
    word: &TimedLasso,
    env: &dyn Resolver,
    cfg: &Config,
) -> Result<(Lasso<ProperLetter>, Mso<ProperLetter>, Vec<ProperLetter>)> {
    let ab = vocabulary(f, &word.alphabet());
    let gamma = canonical_word(&ab, word, env, cfg)?;
    let mut base: Vec<ProperLetter> = gamma.stem.iter().chain(&gamma.cycle).cloned().collect();
    base.sort();
    base.dedup();
    let hat = ttos_over(f, &ab, &base)?;
    Ok((gamma, hat, base))
}

/// Decides `σ, v ⊨ f` by compiling the letter translation of `f` and running it on the canonical word.
pub fn tmso_eval(f: &Mso<Action>, word: &TimedLasso, v: &Valuation, env: &dyn Resolver, cfg: &Config) -> Result<bool> {
    v.covers(f)?;
    let (gamma, hat, base) = prepared(f, word, env, cfg)?;
    let (fo, so) = f.free_vars();
    let vars: Vec<String> = fo.into_iter().chain(so).collect();
    let c = mso_to_buchi(&hat, &base, &vars, cfg)?;
    c.accepts(&gamma, v)
}

/// Positions `i` with `σ, [i/x] ⊨ f`, for a formula whose only free variable is `x`.
pub fn tmso_positions(f: &Mso<Action>, x: &str, word: &TimedLasso, env: &dyn Resolver, cfg: &Config) -> Result<PositionSet> {
    let (fo, so) = f.free_vars();
    if let Some(v) = fo.iter().chain(&so).find(|v| *v != x) {
        return Err(Error::FreeVariable(v.clone()));
    }
    let (gamma, hat, base) = prepared(f, word, env, cfg)?;
    let c = mso_to_buchi(&hat, &base, &[x.to_string()], cfg)?;
    let sets = |mark: u32| {
        gamma.map(|l| {
            let b = c.base.binary_search(l).expect("base letter");
            let mut s = c.automaton.empty_set();
            if let Some(i) = c.automaton.letter_index(&(b, mark)) {
                s.insert(i);
            }
            s
        })
    };
    marked_positions(&c.automaton, &sets(0), &sets(1), cfg.state_cap)
}

/// Automaton over the proper alphabet of the sentence's vocabulary accepting its models.
pub fn tmso_to_idta(f: &Mso<Action>, sigma: &[Action], cfg: &Config) -> Result<ProperIdta> {
    let (fo, so) = f.free_vars();
    if let Some(v) = fo.iter().chain(&so).next() {
        return Err(Error::FreeVariable(v.clone()));
    }
    let ab = vocabulary(f, sigma);
    let letters = ab.letters()?;
    let hat = ttos_over(f, &ab, &letters)?;
    let c = mso_to_buchi(&hat, &letters, &[], cfg)?;
    let automaton = c.automaton.project(|&(b, _)| c.base[b].clone()).reduce();
    // the compiled alphabet already holds every letter; keep the full proper alphabet
    let automaton = automaton.extend_alphabet(&letters)?;
    Ok(ProperIdta { alphabet: ab, automaton })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::NoResolver;
    use crate::symbolic::SymbolicLetter;
    use crate::time::int;

    fn ab_word(stem: &str, cyc: &str) -> Lasso<char> {
        Lasso::new(stem.chars().collect(), cyc.chars().collect())
    }

    fn sigma1() -> TimedLasso {
        TimedLasso::new(
            vec![("a".into(), int(0)), ("b".into(), int(1))],
            vec![("a".into(), int(2)), ("b".into(), int(3))],
            int(2),
        )
        .unwrap()
    }

    fn compile(f: &Mso<char>) -> CompiledFormula<char> {
        mso_to_buchi(f, &['a', 'b'], &[], &Config::default()).unwrap()
    }

    #[test]
    fn exists_a() {
        let c = compile(&Mso::exists("x", Mso::letter('a', "x")));
        let v = Valuation::new();
        assert!(c.accepts(&ab_word("a", "b"), &v).unwrap());
        assert!(!c.accepts(&ab_word("", "b"), &v).unwrap());
    }

    #[test]
    fn validity_sentence_is_universal() {
        let c = compile(&Mso::exists("x", Mso::less("x", "x")).negate());
        assert!(c.accepts(&ab_word("", "b"), &Valuation::new()).unwrap());
        assert!(c.accepts(&ab_word("ab", "a"), &Valuation::new()).unwrap());
    }

    #[test]
    fn every_a_followed_by_b() {
        let f = Mso::forall(
            "x",
            Mso::letter('a', "x").implies(Mso::exists("y", Mso::less("x", "y").and(Mso::letter('b', "y")))),
        );
        let c = compile(&f);
        let v = Valuation::new();
        assert!(c.accepts(&ab_word("", "ab"), &v).unwrap());
        assert!(!c.accepts(&ab_word("b", "a"), &v).unwrap());
        assert!(c.accepts(&ab_word("", "b"), &v).unwrap());
    }

    #[test]
    fn sugar_predicates() {
        let w = ab_word("ab", "a");
        let cases: Vec<(Mso<char>, usize, usize, bool)> = vec![
            (Mso::succ("x", "y"), 1, 2, true),
            (Mso::succ("x", "y"), 1, 3, false),
            (Mso::le("x", "y"), 2, 2, true),
            (Mso::eq("x", "y"), 2, 3, false),
            (Mso::zero("x").and(Mso::le("x", "y")), 0, 5, true),
        ];
        for (f, i, j, want) in cases {
            let c = mso_to_buchi(&f, &['a', 'b'], &["x".into(), "y".into()], &Config::default()).unwrap();
            let v = Valuation::new().with("x", i).with("y", j);
            assert_eq!(c.accepts(&w, &v).unwrap(), want, "{f}");
        }
    }

    #[test]
    fn set_successor() {
        // the set of even positions is closed under x ↦ x + 2
        let f = Mso::forall(
            "x",
            Mso::member("x", "X").implies(Mso::exists(
                "y",
                Mso::succ("x", "y").and(Mso::next_in("y", "X")),
            )),
        );
        let c = mso_to_buchi(&f, &['a'], &["X".into()], &Config::default()).unwrap();
        let w = ab_word("", "a");
        let even = PositionSet::new(&[], &[0], 0, 2);
        let one = PositionSet::new(&[0], &[], 1, 1);
        assert!(c.accepts(&w, &Valuation::new().with_set("X", even)).unwrap());
        assert!(!c.accepts(&w, &Valuation::new().with_set("X", one)).unwrap());
    }

    #[test]
    fn letter_translation() {
        let la = OperatorBinding::last("a");
        let i11 = Interval::point(int(1));
        let ab = ProperAlphabet::new(["a".to_string()], [la.clone()], [i11.clone()]);
        let letters = ab.letters().unwrap();
        let t = ttos(&Mso::letter("a".to_string(), "x"), &ab).unwrap();
        assert_eq!(t, Mso::letter(letters[0].clone(), "x").or(Mso::letter(letters[1].clone(), "x")));
        let t = ttos(&Mso::atom(i11.clone(), la.clone(), "x"), &ab).unwrap();
        assert_eq!(t, Mso::letter(letters[1].clone(), "x"));
        assert!(letters[1].holds(&la, &i11));
        let bad = Mso::atom(Interval::point(int(2)), la, "x");
        assert!(matches!(ttos(&bad, &ab), Err(Error::VocabularyMismatch(_))));
    }

    #[test]
    fn timed_evaluation() {
        let w = sigma1();
        let cfg = Config::default();
        let qa = Mso::letter("a".to_string(), "x");
        assert!(tmso_eval(&qa, &w, &Valuation::new().with("x", 0), &NoResolver, &cfg).unwrap());
        assert!(!tmso_eval(&qa, &w, &Valuation::new().with("x", 1), &NoResolver, &cfg).unwrap());
        let f = Mso::exists("x", Mso::atom(Interval::point(int(1)), OperatorBinding::last("a"), "x"));
        assert!(tmso_eval(&f, &w, &Valuation::new(), &NoResolver, &cfg).unwrap());
        assert!(matches!(
            tmso_eval(&qa, &w, &Valuation::new(), &NoResolver, &cfg),
            Err(Error::FreeVariable(_))
        ));
        let p = tmso_positions(&qa, "x", &w, &NoResolver, &cfg).unwrap();
        for i in 0..8 {
            assert_eq!(p.member(i), i % 2 == 0);
        }
    }

    fn all_a() -> Idta {
        let mut a = BuchiAutomaton::new(vec![SymbolicLetter::new("a", Guard::True)]);
        a.set_accepting(0, true);
        a.add_transition(0, &SymbolicLetter::new("a", Guard::True), 0).unwrap();
        Idta::new(vec!["a".into(), "b".into()], vec![], a)
    }

    #[test]
    fn sentence_of_all_a_automaton() {
        let s = automaton_to_sentence(&all_a());
        let cfg = Config::default();
        let aw = TimedLasso::new(vec![], vec![("a".into(), int(0))], int(1)).unwrap();
        let abw = TimedLasso::new(vec![], vec![("a".into(), int(0)), ("b".into(), int(1))], int(2)).unwrap();
        assert!(tmso_eval(&s, &aw, &Valuation::new(), &NoResolver, &cfg).unwrap());
        assert!(!tmso_eval(&s, &abw, &Valuation::new(), &NoResolver, &cfg).unwrap());
        let back = tmso_to_idta(&s, &["a".into(), "b".into()], &cfg).unwrap();
        assert!(crate::symbolic::proper_membership(&back, &aw, &NoResolver, &cfg).unwrap());
        assert!(!crate::symbolic::proper_membership(&back, &abw, &NoResolver, &cfg).unwrap());
    }

    #[test]
    fn unsatisfiable_sentence_is_empty() {
        let f: Mso<Action> = Mso::exists("x", Mso::less("x", "x"));
        let p = tmso_to_idta(&f, &["a".into()], &Config::default()).unwrap();
        assert!(p.automaton.is_empty());
    }

    #[test]
    fn first_orderness() {
        let f: Mso<Action> = Mso::exists("x", Mso::letter("a".into(), "x"));
        assert!(f.is_first_order());
        assert!(!automaton_to_sentence(&all_a()).is_first_order());
    }
}
