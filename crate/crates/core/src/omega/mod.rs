//! Explicit Büchi automata over finite alphabets.
//!
//! Transitions are stored per state as `(letter set, target)` pairs so that
//! automata over large product alphabets stay compact. Acceptance of an
//! ultimately periodic word, emptiness with a witness, boolean closure,
//! projection and quotient reduction all work on this representation.

mod complement;
pub(crate) mod graph;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::time::{Lasso, PositionSet};

pub use complement::complement;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub letters: FixedBitSet,
    pub target: usize,
}

#[derive(Debug, Clone)]
pub struct BuchiAutomaton<L> {
    alphabet: Vec<L>,
    initial: usize,
    accepting: Vec<bool>,
    edges: Vec<Vec<Edge>>,
    names: Vec<String>,
}

impl<L: Clone + Ord> BuchiAutomaton<L> {
    /// Automaton with a single non-accepting initial state and no transitions.
    pub fn new(mut alphabet: Vec<L>) -> Self {
        alphabet.sort();
        alphabet.dedup();
        let mut a = BuchiAutomaton {
            alphabet,
            initial: 0,
            accepting: Vec::new(),
            edges: Vec::new(),
            names: Vec::new(),
        };
        a.add_state(false);
        a
    }

    /// Automaton accepting every word over `alphabet`.
    pub fn universal(alphabet: Vec<L>) -> Self {
        let mut a = Self::new(alphabet);
        a.set_accepting(0, true);
        let all = a.full_set();
        a.add_edge(0, all, 0);
        a
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        let id = self.accepting.len();
        self.accepting.push(accepting);
        self.edges.push(Vec::new());
        self.names.push(format!("q{id}"));
        id
    }

    pub fn add_named_state(&mut self, name: &str, accepting: bool) -> usize {
        let id = self.add_state(accepting);
        self.names[id] = name.to_string();
        id
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn set_initial(&mut self, q: usize) {
        assert!(q < self.num_states());
        self.initial = q;
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn set_accepting(&mut self, q: usize, acc: bool) {
        self.accepting[q] = acc;
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.accepting[q]).collect()
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn set_name(&mut self, q: usize, name: &str) {
        self.names[q] = name.to_string();
    }

    pub fn state_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn alphabet(&self) -> &[L] {
        &self.alphabet
    }

    pub fn letter_index(&self, l: &L) -> Option<usize> {
        self.alphabet.binary_search(l).ok()
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.alphabet.len())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn edges(&self, q: usize) -> &[Edge] {
        &self.edges[q]
    }

    /// Adds letters to the edge `from → to`, creating it if needed.
    pub fn add_edge(&mut self, from: usize, letters: FixedBitSet, to: usize) {
        if letters.is_clear() {
            return;
        }
        if let Some(e) = self.edges[from].iter_mut().find(|e| e.target == to) {
            e.letters.union_with(&letters);
        } else {
            self.edges[from].push(Edge { letters, target: to });
        }
    }

    pub fn add_transition(&mut self, from: usize, letter: &L, to: usize) -> Result<()>
    where
        L: std::fmt::Debug,
    {
        let i = self
            .letter_index(letter)
            .ok_or_else(|| Error::AlphabetMismatch(format!("{letter:?} is not in the alphabet")))?;
        let mut s = self.empty_set();
        s.insert(i);
        self.add_edge(from, s, to);
        Ok(())
    }

    /// All transitions as `(source, letter, target)`, in state and letter order.
    pub fn transitions(&self) -> Vec<(usize, &L, usize)> {
        let mut out = Vec::new();
        for q in 0..self.num_states() {
            let mut es: Vec<&Edge> = self.edges[q].iter().collect();
            es.sort_by_key(|e| e.target);
            for li in 0..self.alphabet.len() {
                for e in &es {
                    if e.letters.contains(li) {
                        out.push((q, &self.alphabet[li], e.target));
                    }
                }
            }
        }
        out
    }

    pub fn num_transitions(&self) -> usize {
        self.edges
            .iter()
            .flat_map(|es| es.iter())
            .map(|e| e.letters.count_ones(..))
            .sum()
    }

    pub fn successors(&self, q: usize, letter: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges[q]
            .iter()
            .filter(move |e| e.letters.contains(letter))
            .map(|e| e.target)
    }

    pub fn has_transition(&self, from: usize, letter: usize, to: usize) -> bool {
        self.edges[from]
            .iter()
            .any(|e| e.target == to && e.letters.contains(letter))
    }

    /// Each state has at most one successor per letter.
    pub fn is_deterministic(&self) -> bool {
        self.edges.iter().all(|es| {
            let mut seen = self.empty_set();
            for e in es {
                if !seen.is_disjoint(&e.letters) {
                    return false;
                }
                seen.union_with(&e.letters);
            }
            true
        })
    }

    fn state_graph(&self) -> Vec<Vec<usize>> {
        self.edges
            .iter()
            .map(|es| es.iter().map(|e| e.target).collect())
            .collect()
    }

    /// Every strongly connected component is uniformly accepting or rejecting.
    pub fn is_weak(&self) -> bool {
        let adj = self.state_graph();
        let (comps, _, cyclic) = graph::components(&adj);
        comps.iter().zip(cyclic).all(|(c, cyc)| {
            !cyc || c.iter().all(|&q| self.accepting[q]) || c.iter().all(|&q| !self.accepting[q])
        })
    }

    /// Acceptance of a lasso when each position offers a set of letters.
    pub fn accepts_letter_sets(&self, w: &Lasso<FixedBitSet>) -> bool {
        let span = w.span();
        let mut index = vec![usize::MAX; self.num_states() * span];
        let mut nodes = vec![(self.initial, 0)];
        let mut adj: Vec<Vec<usize>> = Vec::new();
        index[self.initial * span] = 0;
        let mut k = 0;
        while k < nodes.len() {
            let (q, c) = nodes[k];
            let present = w.get(c);
            let nc = w.next_class(c);
            let mut out = Vec::new();
            for e in &self.edges[q] {
                if !e.letters.is_disjoint(present) {
                    let id = e.target * span + nc;
                    if index[id] == usize::MAX {
                        index[id] = nodes.len();
                        nodes.push((e.target, nc));
                    }
                    out.push(index[id]);
                }
            }
            adj.push(out);
            k += 1;
        }
        let good = graph::reaches_accepting_cycle(&adj, &|node| self.accepting[nodes[node].0]);
        good[0]
    }

    pub fn accepts_lasso(&self, w: &Lasso<L>) -> Result<bool>
    where
        L: std::fmt::Debug,
    {
        let sets = self.letter_set_word(w)?;
        Ok(self.accepts_letter_sets(&sets))
    }

    fn letter_set_word(&self, w: &Lasso<L>) -> Result<Lasso<FixedBitSet>>
    where
        L: std::fmt::Debug,
    {
        let conv = |l: &L| -> Result<FixedBitSet> {
            let mut s = self.empty_set();
            if let Some(i) = self.letter_index(l) {
                s.insert(i);
                Ok(s)
            } else {
                Err(Error::AlphabetMismatch(format!("{l:?} is not in the alphabet")))
            }
        };
        Ok(Lasso::new(
            w.stem.iter().map(conv).collect::<Result<_>>()?,
            w.cycle.iter().map(conv).collect::<Result<_>>()?,
        ))
    }

    pub fn is_empty(&self) -> bool {
        self.accepting_witness().is_none()
    }

    /// A shortest accepted lasso, preferring lower state and letter ids on ties.
    pub fn accepting_witness(&self) -> Option<Lasso<L>> {
        let adj = self.state_graph();
        let (_, comp_of, cyclic) = graph::components(&adj);
        let on_cycle = |q: usize| self.accepting[q] && cyclic[comp_of[q]];
        let (mut prev, order) = self.bfs_from(self.initial, &|_| true);
        let f = order.into_iter().find(|&q| on_cycle(q))?;
        let stem = self.path_letters(&prev, self.initial, f);
        // shortest cycle through f, staying inside its component
        let comp = comp_of[f];
        let mut best: Option<(usize, usize)> = None;
        for e in &self.edges[f] {
            if comp_of[e.target] != comp {
                continue;
            }
            let (p, _) = self.bfs_from(e.target, &|q| comp_of[q] == comp);
            if let Some(len) = path_len(&p, e.target, f) {
                if best.is_none_or(|(bl, bt)| len < bl || (len == bl && e.target < bt)) {
                    best = Some((len, e.target));
                }
            }
        }
        let (_, t) = best?;
        let first = self.edges[f].iter().find(|e| e.target == t)?.letters.ones().next()?;
        prev = self.bfs_from(t, &|q| comp_of[q] == comp).0;
        let mut cycle = vec![self.alphabet[first].clone()];
        cycle.extend(self.path_letters(&prev, t, f));
        Some(Lasso::new(stem, cycle))
    }

    fn bfs_from(&self, start: usize, keep: &dyn Fn(usize) -> bool) -> (Vec<Option<(usize, usize)>>, Vec<usize>) {
        let n = self.num_states();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = vec![start];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            let mut es: Vec<&Edge> = self.edges[u].iter().collect();
            es.sort_by_key(|e| e.target);
            for e in es {
                let v = e.target;
                if !seen[v] && keep(v) {
                    seen[v] = true;
                    prev[v] = Some((u, e.letters.ones().next().unwrap_or(0)));
                    order.push(v);
                    queue.push_back(v);
                }
            }
        }
        (prev, order)
    }

    fn path_letters(&self, prev: &[Option<(usize, usize)>], from: usize, to: usize) -> Vec<L> {
        let mut out = Vec::new();
        let mut v = to;
        while v != from {
            let (u, l) = prev[v].expect("bfs path");
            out.push(self.alphabet[l].clone());
            v = u;
        }
        out.reverse();
        out
    }

    /// Keeps states that are reachable and can reach an accepting cycle.
    pub fn trim(&self) -> Self {
        let adj = self.state_graph();
        let reach = graph::reachable(&adj, self.initial);
        let good = graph::reaches_accepting_cycle(&adj, &|q| self.accepting[q]);
        let keep: Vec<bool> = (0..self.num_states())
            .map(|q| q == self.initial || (reach[q] && good[q]))
            .collect();
        let mut map = vec![usize::MAX; self.num_states()];
        let mut out = BuchiAutomaton {
            alphabet: self.alphabet.clone(),
            initial: 0,
            accepting: Vec::new(),
            edges: Vec::new(),
            names: Vec::new(),
        };
        for q in 0..self.num_states() {
            if keep[q] {
                map[q] = out.add_named_state(&self.names[q], self.accepting[q]);
            }
        }
        out.initial = map[self.initial];
        for q in 0..self.num_states() {
            if !keep[q] || !good[q] {
                continue;
            }
            for e in &self.edges[q] {
                if keep[e.target] && good[e.target] {
                    out.add_edge(map[q], e.letters.clone(), map[e.target]);
                }
            }
        }
        out
    }

    /// Trims, then merges bisimilar states.
    pub fn reduce(&self) -> Self {
        let a = self.trim();
        let n = a.num_states();
        let mut block: Vec<usize> = (0..n).map(|q| a.accepting[q] as usize).collect();
        let mut count = block.iter().collect::<BTreeSet<_>>().len();
        loop {
            let mut ids: HashMap<(usize, Vec<(usize, FixedBitSet)>), usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in 0..n {
                let mut by_block: BTreeMap<usize, FixedBitSet> = BTreeMap::new();
                for e in &a.edges[q] {
                    by_block
                        .entry(block[e.target])
                        .or_insert_with(|| a.empty_set())
                        .union_with(&e.letters);
                }
                let sig = (block[q], by_block.into_iter().collect());
                let fresh = ids.len();
                next[q] = *ids.entry(sig).or_insert(fresh);
            }
            let c = ids.len();
            block = next;
            if c == count {
                break;
            }
            count = c;
        }
        let mut rep = vec![usize::MAX; count];
        let mut order = Vec::new();
        for q in 0..n {
            if rep[block[q]] == usize::MAX {
                rep[block[q]] = q;
                order.push(block[q]);
            }
        }
        // renumber blocks by first member so the initial state stays small
        let mut renum = vec![0; count];
        for (i, &b) in order.iter().enumerate() {
            renum[b] = i;
        }
        let mut out = BuchiAutomaton {
            alphabet: a.alphabet.clone(),
            initial: 0,
            accepting: Vec::new(),
            edges: Vec::new(),
            names: Vec::new(),
        };
        for &b in &order {
            let q = rep[b];
            out.add_named_state(&a.names[q], a.accepting[q]);
        }
        out.initial = renum[block[a.initial]];
        for &b in &order {
            let q = rep[b];
            for e in &a.edges[q] {
                out.add_edge(renum[b], e.letters.clone(), renum[block[e.target]]);
            }
        }
        out
    }

    /// Same language over a larger alphabet that contains the current one.
    pub fn extend_alphabet(&self, alphabet: &[L]) -> Result<Self>
    where
        L: std::fmt::Debug,
    {
        let mut bigger: Vec<L> = alphabet.to_vec();
        bigger.sort();
        bigger.dedup();
        let mut map = Vec::with_capacity(self.alphabet.len());
        for l in &self.alphabet {
            map.push(
                bigger
                    .binary_search(l)
                    .map_err(|_| Error::AlphabetMismatch(format!("{l:?} missing from the extended alphabet")))?,
            );
        }
        let len = bigger.len();
        Ok(self.remap_letters(bigger, |s| {
            let mut t = FixedBitSet::with_capacity(len);
            for i in s.ones() {
                t.insert(map[i]);
            }
            t
        }))
    }

    fn remap_letters<M>(&self, alphabet: Vec<M>, f: impl Fn(&FixedBitSet) -> FixedBitSet) -> BuchiAutomaton<M> {
        BuchiAutomaton {
            alphabet,
            initial: self.initial,
            accepting: self.accepting.clone(),
            edges: self
                .edges
                .iter()
                .map(|es| {
                    es.iter()
                        .map(|e| Edge {
                            letters: f(&e.letters),
                            target: e.target,
                        })
                        .filter(|e| !e.letters.is_clear())
                        .collect()
                })
                .collect(),
            names: self.names.clone(),
        }
    }

    /// Image under a letter-to-letter map.
    pub fn project<M: Clone + Ord>(&self, f: impl Fn(&L) -> M) -> BuchiAutomaton<M> {
        let images: Vec<M> = self.alphabet.iter().map(&f).collect();
        let mut alphabet = images.clone();
        alphabet.sort();
        alphabet.dedup();
        let map: Vec<usize> = images
            .iter()
            .map(|m| alphabet.binary_search(m).expect("image letter"))
            .collect();
        let len = alphabet.len();
        self.remap_letters(alphabet, |s| {
            let mut t = FixedBitSet::with_capacity(len);
            for i in s.ones() {
                t.insert(map[i]);
            }
            t
        })
    }

    /// Inverse image: a letter of `alphabet` is read wherever `f` of it would be.
    pub fn pullback<M: Clone + Ord>(&self, alphabet: Vec<M>, f: impl Fn(&M) -> Option<usize>) -> BuchiAutomaton<M> {
        let pre: Vec<Option<usize>> = alphabet.iter().map(&f).collect();
        let len = alphabet.len();
        self.remap_letters(alphabet, |s| {
            let mut t = FixedBitSet::with_capacity(len);
            for (j, p) in pre.iter().enumerate() {
                if p.is_some_and(|i| s.contains(i)) {
                    t.insert(j);
                }
            }
            t
        })
    }

    /// Restricts every transition to the given letters.
    pub fn restrict(&self, allowed: &FixedBitSet) -> Self {
        self.remap_letters(self.alphabet.clone(), |s| {
            let mut t = s.clone();
            t.intersect_with(allowed);
            t
        })
    }

    /// Language union; alphabets are merged.
    pub fn union(&self, other: &Self) -> Result<Self>
    where
        L: std::fmt::Debug,
    {
        let mut alpha = self.alphabet.clone();
        alpha.extend(other.alphabet.iter().cloned());
        alpha.sort();
        alpha.dedup();
        let a = self.extend_alphabet(&alpha)?;
        let b = other.extend_alphabet(&alpha)?;
        let mut out = BuchiAutomaton {
            alphabet: alpha,
            initial: 0,
            accepting: Vec::new(),
            edges: Vec::new(),
            names: Vec::new(),
        };
        let init = out.add_named_state("init", false);
        let off_a = out.num_states();
        for q in 0..a.num_states() {
            out.add_named_state(&format!("l.{}", a.names[q]), a.accepting[q]);
        }
        let off_b = out.num_states();
        for q in 0..b.num_states() {
            out.add_named_state(&format!("r.{}", b.names[q]), b.accepting[q]);
        }
        for (src, off) in [(&a, off_a), (&b, off_b)] {
            for q in 0..src.num_states() {
                for e in &src.edges[q] {
                    out.add_edge(off + q, e.letters.clone(), off + e.target);
                }
            }
            for e in &src.edges[src.initial] {
                out.add_edge(init, e.letters.clone(), off + e.target);
            }
        }
        out.initial = init;
        Ok(out)
    }

    /// Language intersection by the product with a phase bit.
    pub fn intersect(&self, other: &Self, cap: usize) -> Result<Self>
    where
        L: std::fmt::Debug,
    {
        let mut alpha = self.alphabet.clone();
        alpha.extend(other.alphabet.iter().cloned());
        alpha.sort();
        alpha.dedup();
        let a = self.extend_alphabet(&alpha)?.trim();
        let b = other.extend_alphabet(&alpha)?.trim();
        let mut out = BuchiAutomaton {
            alphabet: alpha,
            initial: 0,
            accepting: Vec::new(),
            edges: Vec::new(),
            names: Vec::new(),
        };
        // weak factors need no phase: a run accepts in both iff it ends in accepting components of both
        let plain = a.is_weak() && b.is_weak();
        let mut ids: HashMap<(usize, usize, bool), usize> = HashMap::new();
        let mut work: VecDeque<((usize, usize, bool), usize)> = VecDeque::new();
        let mut intern = |out: &mut Self,
                          work: &mut VecDeque<((usize, usize, bool), usize)>,
                          s: (usize, usize, bool)|
         -> Result<usize> {
            if let Some(&id) = ids.get(&s) {
                return Ok(id);
            }
            if out.num_states() >= cap {
                return Err(Error::StateCapExceeded(cap));
            }
            let id = out.add_named_state(
                &format!("{}x{}{}", a.names[s.0], b.names[s.1], if s.2 { "'" } else { "" }),
                if plain { a.accepting[s.0] && b.accepting[s.1] } else { s.2 && b.accepting[s.1] },
            );
            ids.insert(s, id);
            work.push_back((s, id));
            Ok(id)
        };
        out.initial = intern(&mut out, &mut work, (a.initial, b.initial, false))?;
        while let Some(((p, q, phase), src)) = work.pop_front() {
            // phase 0 waits for an accepting state of the left, phase 1 for the right
            let next_phase = if plain {
                false
            } else if !phase {
                a.accepting[p]
            } else {
                !b.accepting[q]
            };
            for ea in &a.edges[p] {
                for eb in &b.edges[q] {
                    let mut l = ea.letters.clone();
                    l.intersect_with(&eb.letters);
                    if l.is_clear() {
                        continue;
                    }
                    let t = intern(&mut out, &mut work, (ea.target, eb.target, next_phase))?;
                    out.add_edge(src, l, t);
                }
            }
        }
        Ok(out)
    }
}

fn path_len(prev: &[Option<(usize, usize)>], from: usize, to: usize) -> Option<usize> {
    let mut v = to;
    let mut n = 0;
    while v != from {
        v = prev[v]?.0;
        n += 1;
    }
    Some(n)
}

/// Boolean combination selector for [`bool_combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersection,
    Difference,
}

pub fn bool_combine<L: Clone + Ord + std::fmt::Debug>(
    op: BoolOp,
    a: &BuchiAutomaton<L>,
    b: &BuchiAutomaton<L>,
    cap: usize,
) -> Result<BuchiAutomaton<L>> {
    match op {
        BoolOp::Union => a.union(b),
        BoolOp::Intersection => a.intersect(b, cap),
        BoolOp::Difference => {
            let mut alpha = a.alphabet().to_vec();
            alpha.extend(b.alphabet().iter().cloned());
            let nb = complement(&b.extend_alphabet(&alpha)?, cap)?;
            a.intersect(&nb, cap)
        }
    }
}

/// Positions `i` at which some accepting run reads a marked letter at `i`
/// and unmarked letters everywhere else.
///
/// `unmarked` and `marked` give, per position class, the letters usable at
/// that position in either role. The forward sets of states reachable on
/// unmarked prefixes eventually repeat at block starts, which bounds the scan.
pub(crate) fn marked_positions<L: Clone + Ord>(
    a: &BuchiAutomaton<L>,
    unmarked: &Lasso<FixedBitSet>,
    marked: &Lasso<FixedBitSet>,
    cap: usize,
) -> Result<PositionSet> {
    let (s, c) = crate::time::common_shape(&[unmarked.shape(), marked.shape()]);
    let unmarked = unmarked.reshape(s, c);
    let marked = marked.reshape(s, c);
    let span = s + c;
    let n = a.num_states();
    let mut adj = vec![Vec::new(); n * span];
    for q in 0..n {
        for cl in 0..span {
            let nc = unmarked.next_class(cl);
            for e in &a.edges[q] {
                if !e.letters.is_disjoint(unmarked.get(cl)) {
                    adj[q * span + cl].push(e.target * span + nc);
                }
            }
        }
    }
    let good = graph::reaches_accepting_cycle(&adj, &|node| a.accepting[node / span]);
    let mut current = FixedBitSet::with_capacity(n);
    current.insert(a.initial);
    let mut members = Vec::new();
    let mut seen: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut i = 0usize;
    loop {
        if i >= s && (i - s).is_multiple_of(c) {
            if let Some(&j) = seen.get(&current) {
                let stem = members[..j].to_vec();
                let cycle = members[j..i].to_vec();
                return Ok(PositionSet::from_lasso(Lasso::new(stem, cycle)));
            }
            if seen.len() >= cap {
                return Err(Error::StateCapExceeded(cap));
            }
            seen.insert(current.clone(), i);
        }
        let cl = unmarked.class_of(i);
        let nc = unmarked.next_class(cl);
        let hit = current.ones().any(|q| {
            a.edges[q]
                .iter()
                .any(|e| !e.letters.is_disjoint(marked.get(cl)) && good[e.target * span + nc])
        });
        members.push(hit);
        let mut next = FixedBitSet::with_capacity(n);
        for q in current.ones() {
            for e in &a.edges[q] {
                if !e.letters.is_disjoint(unmarked.get(cl)) {
                    next.insert(e.target);
                }
            }
        }
        current = next;
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_splits_all_accepting_states() {
        let mut a = BuchiAutomaton::new(vec!['a', 'b']);
        let q1 = a.add_state(true);
        let q2 = a.add_state(true);
        a.set_accepting(0, true);
        a.add_transition(0, &'a', q1).unwrap();
        a.add_transition(q1, &'a', q2).unwrap();
        a.add_transition(q1, &'b', 0).unwrap();
        a.add_transition(q2, &'a', q2).unwrap();
        a.add_transition(q2, &'b', q2).unwrap();
        let r = a.reduce();
        assert_eq!(r.num_states(), 3);
        let w = Lasso::new(vec!['a', 'a'], vec!['b']);
        assert!(r.accepts_lasso(&w).unwrap());
        assert!(!r.accepts_lasso(&Lasso::new(vec!['a', 'b'], vec!['b'])).unwrap());
    }

    /// Words over {a, b} with infinitely many b.
    fn inf_b() -> BuchiAutomaton<char> {
        let mut a = BuchiAutomaton::new(vec!['a', 'b']);
        let q1 = a.add_state(true);
        a.add_transition(0, &'a', 0).unwrap();
        a.add_transition(0, &'b', q1).unwrap();
        a.add_transition(q1, &'a', 0).unwrap();
        a.add_transition(q1, &'b', q1).unwrap();
        a
    }

    /// Words with finitely many b (non-deterministic).
    fn fin_b() -> BuchiAutomaton<char> {
        let mut a = BuchiAutomaton::new(vec!['a', 'b']);
        let q1 = a.add_state(true);
        a.add_transition(0, &'a', 0).unwrap();
        a.add_transition(0, &'b', 0).unwrap();
        a.add_transition(0, &'a', q1).unwrap();
        a.add_transition(q1, &'a', q1).unwrap();
        a
    }

    fn w(stem: &str, cyc: &str) -> Lasso<char> {
        Lasso::new(stem.chars().collect(), cyc.chars().collect())
    }

    #[test]
    fn lasso_acceptance() {
        let a = inf_b();
        assert!(a.accepts_lasso(&w("aaa", "ab")).unwrap());
        assert!(!a.accepts_lasso(&w("bbb", "a")).unwrap());
        let f = fin_b();
        assert!(f.accepts_lasso(&w("bbb", "a")).unwrap());
        assert!(!f.accepts_lasso(&w("", "ab")).unwrap());
        assert!(a.accepts_lasso(&w("", "c")).is_err());
    }

    #[test]
    fn witness_is_accepted() {
        let a = inf_b();
        let wit = a.accepting_witness().unwrap();
        assert!(a.accepts_lasso(&wit).unwrap());
        assert_eq!(wit, w("b", "b"));
        let mut e = BuchiAutomaton::new(vec!['a']);
        e.set_accepting(0, true);
        assert!(e.is_empty());
    }

    #[test]
    fn products() {
        let a = inf_b();
        let f = fin_b();
        let i = a.intersect(&f, 1000).unwrap();
        assert!(i.is_empty());
        let u = a.union(&f).unwrap();
        for (s, c) in [("ab", "a"), ("", "ab"), ("b", "b")] {
            assert!(u.accepts_lasso(&w(s, c)).unwrap());
        }
    }

    #[test]
    fn reduction_keeps_language() {
        let u = inf_b().union(&inf_b()).unwrap();
        let r = u.reduce();
        assert!(r.num_states() <= 2);
        for (s, c) in [("ab", "a"), ("", "ab"), ("b", "b"), ("bb", "aa")] {
            assert_eq!(r.accepts_lasso(&w(s, c)).unwrap(), u.accepts_lasso(&w(s, c)).unwrap());
        }
    }

    #[test]
    fn projection_and_pullback() {
        let a = inf_b();
        let p = a.project(|_| 'x');
        assert!(p.accepts_lasso(&w("", "x")).unwrap());
        let back = p.pullback(vec!['a', 'b'], |_| Some(0));
        assert!(back.accepts_lasso(&w("", "a")).unwrap());
    }

    #[test]
    fn marked_position_scan() {
        // exactly one marked letter, which must be a `b` at an even position
        let mut a = BuchiAutomaton::new(vec![0, 1]);
        let odd = a.add_state(false);
        let done = a.add_state(true);
        let mut u = a.empty_set();
        u.insert(0);
        let mut m = a.empty_set();
        m.insert(1);
        a.add_edge(0, u.clone(), odd);
        a.add_edge(odd, u.clone(), 0);
        a.add_edge(0, m.clone(), done);
        a.add_edge(done, u.clone(), done);
        // word b a b a ...: marked letter usable only at b positions
        let um = Lasso::new(vec![], vec![u.clone(), u.clone()]);
        let mk = Lasso::new(vec![], vec![m.clone(), a.empty_set()]);
        let x = marked_positions(&a, &um, &mk, 100).unwrap();
        for i in 0..12 {
            assert_eq!(x.member(i), i % 2 == 0);
        }
    }
}
