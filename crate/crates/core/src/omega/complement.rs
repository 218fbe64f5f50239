//! Büchi complementation.
//!
//! Deterministic inputs use the two-copy construction, weak inputs the
//! breakpoint construction, semi-deterministic inputs the NCSB construction,
//! and everything else the rank-based construction over tight rankings. All of them range over letter classes: maximal sets
//! of letters that no transition distinguishes.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use fixedbitset::FixedBitSet;

use super::BuchiAutomaton;
use crate::error::{Error, Result};

/// Automaton accepting exactly the words over the same alphabet that `a` rejects.
pub fn complement<L: Clone + Ord>(a: &BuchiAutomaton<L>, cap: usize) -> Result<BuchiAutomaton<L>> {
    let a = a.reduce();
    let classes = letter_classes(&a);
    let delta = Delta::new(&a, &classes);
    let out = if a.is_deterministic() {
        build(&a, &classes, cap, |&(q, phase): &(usize, bool), c, out: &mut Vec<(usize, bool)>| {
            // q == n is the rejecting sink of the completed automaton
            let t = if q == delta.n { delta.n } else { delta.det(q, c) };
            let t_acc = t < delta.n && a.is_accepting(t);
            if !phase {
                out.push((t, false));
            }
            if !t_acc {
                out.push((t, true));
            }
        }, (a.initial(), false), |s| s.1)?
    } else if a.is_weak() {
        build(&a, &classes, cap, |(s, o): &(FixedBitSet, FixedBitSet), c, out: &mut Vec<_>| {
            let s2 = delta.post(s, c);
            let mut o2 = if o.is_clear() { s2.clone() } else { delta.post(o, c) };
            o2.intersect_with(&delta.accepting);
            out.push((s2, o2));
        }, (delta.singleton(a.initial()), FixedBitSet::with_capacity(delta.n)), |s| s.1.is_clear())?
    } else if let Some(det_part) = delta.semi_deterministic_part() {
        ncsb(&a, &classes, &delta, &det_part, cap)?
    } else {
        rank_based(&a, &classes, &delta, cap)?
    };
    Ok(out.reduce())
}

/// Coarsest partition of the alphabet respected by every edge.
fn letter_classes<L: Clone + Ord>(a: &BuchiAutomaton<L>) -> Vec<FixedBitSet> {
    let mut classes = vec![a.full_set()];
    if a.alphabet().is_empty() {
        return Vec::new();
    }
    let mut distinct: Vec<&FixedBitSet> = (0..a.num_states())
        .flat_map(|q| a.edges(q).iter().map(|e| &e.letters))
        .collect();
    distinct.sort();
    distinct.dedup();
    for l in distinct {
        let mut next = Vec::with_capacity(classes.len() + 1);
        for c in classes {
            let mut inside = c.clone();
            inside.intersect_with(l);
            if inside.is_clear() || inside == c {
                next.push(c);
                continue;
            }
            let mut outside = c;
            outside.difference_with(l);
            next.push(inside);
            next.push(outside);
        }
        classes = next;
    }
    classes
}

struct Delta {
    n: usize,
    // succ[q][c]: targets of q on letter class c
    succ: Vec<Vec<Vec<usize>>>,
    accepting: FixedBitSet,
}

impl Delta {
    fn new<L: Clone + Ord>(a: &BuchiAutomaton<L>, classes: &[FixedBitSet]) -> Self {
        let n = a.num_states();
        let succ = (0..n)
            .map(|q| {
                classes
                    .iter()
                    .map(|c| {
                        let rep = c.ones().next().expect("non-empty class");
                        let mut t: Vec<usize> = a.successors(q, rep).collect();
                        t.sort_unstable();
                        t
                    })
                    .collect()
            })
            .collect();
        let mut accepting = FixedBitSet::with_capacity(n);
        for q in a.accepting_states() {
            accepting.insert(q);
        }
        Delta { n, succ, accepting }
    }

    fn det(&self, q: usize, c: usize) -> usize {
        self.succ[q][c].first().copied().unwrap_or(self.n)
    }

    fn post(&self, s: &FixedBitSet, c: usize) -> FixedBitSet {
        let mut t = FixedBitSet::with_capacity(self.n);
        for q in s.ones() {
            for &r in &self.succ[q][c] {
                t.insert(r);
            }
        }
        t
    }

    /// States reachable from an accepting state, if all of them are deterministic.
    fn semi_deterministic_part(&self) -> Option<FixedBitSet> {
        let mut part = self.accepting.clone();
        let mut stack: Vec<usize> = part.ones().collect();
        while let Some(q) = stack.pop() {
            for targets in &self.succ[q] {
                if targets.len() > 1 {
                    return None;
                }
                for &r in targets {
                    if !part.put(r) {
                        stack.push(r);
                    }
                }
            }
        }
        Some(part)
    }

    fn singleton(&self, q: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        s.insert(q);
        s
    }
}

/// Explores macrostates from `init`, producing one edge per letter class and successor.
fn build<L: Clone + Ord, S: Clone + Eq + Hash>(
    a: &BuchiAutomaton<L>,
    classes: &[FixedBitSet],
    cap: usize,
    step: impl Fn(&S, usize, &mut Vec<S>),
    init: S,
    accepting: impl Fn(&S) -> bool,
) -> Result<BuchiAutomaton<L>> {
    let mut out = BuchiAutomaton::new(a.alphabet().to_vec());
    out.set_accepting(0, accepting(&init));
    let mut ids: HashMap<S, usize> = HashMap::from([(init.clone(), 0)]);
    let mut work = VecDeque::from([(init, 0usize)]);
    let mut buf = Vec::new();
    while let Some((s, id)) = work.pop_front() {
        for (ci, class) in classes.iter().enumerate() {
            buf.clear();
            step(&s, ci, &mut buf);
            for t in buf.drain(..) {
                let tid = match ids.get(&t) {
                    Some(&x) => x,
                    None => {
                        if out.num_states() >= cap {
                            return Err(Error::StateCapExceeded(cap));
                        }
                        let x = out.add_state(accepting(&t));
                        ids.insert(t.clone(), x);
                        work.push_back((t, x));
                        x
                    }
                };
                out.add_edge(id, class.clone(), tid);
            }
        }
    }
    Ok(out)
}

/// Macrostates `(N, C, S, B)`: `N` tracks the nondeterministic part, `C`
/// deterministic runs that may still accept, `S` runs guessed never to accept
/// again, and `B ⊆ C` the runs owed since the last breakpoint.
fn ncsb<L: Clone + Ord>(
    a: &BuchiAutomaton<L>,
    classes: &[FixedBitSet],
    delta: &Delta,
    det: &FixedBitSet,
    cap: usize,
) -> Result<BuchiAutomaton<L>> {
    type Macro = (FixedBitSet, FixedBitSet, FixedBitSet, FixedBitSet);
    let n = delta.n;
    let empty = FixedBitSet::with_capacity(n);
    let q0 = delta.singleton(a.initial());
    let init: Macro = if det.contains(a.initial()) {
        (empty.clone(), q0.clone(), empty.clone(), q0)
    } else {
        (q0, empty.clone(), empty.clone(), empty.clone())
    };
    build(a, classes, cap, |(nn, cc, ss, bb): &Macro, c, out: &mut Vec<Macro>| {
        let from_n = delta.post(nn, c);
        let mut n2 = from_n.clone();
        n2.difference_with(det);
        let must_s = delta.post(ss, c);
        if !must_s.is_disjoint(&delta.accepting) {
            return;
        }
        let mut c_live = cc.clone();
        c_live.difference_with(&delta.accepting);
        let must_c = delta.post(&c_live, c);
        if !must_c.is_disjoint(&must_s) {
            return;
        }
        let mut all = from_n;
        all.intersect_with(det);
        all.union_with(&delta.post(cc, c));
        all.union_with(&must_s);
        let mut free = all;
        free.difference_with(&must_s);
        free.difference_with(&must_c);
        let free: Vec<usize> = free.ones().collect();
        let movable: Vec<usize> = free.iter().copied().filter(|&q| !delta.accepting.contains(q)).collect();
        let b_post = delta.post(bb, c);
        for mask in 0..1u64 << movable.len() {
            let mut s2 = must_s.clone();
            for (j, &q) in movable.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    s2.insert(q);
                }
            }
            let mut c2 = must_c.clone();
            for &q in &free {
                if !s2.contains(q) {
                    c2.insert(q);
                }
            }
            let b2 = if bb.is_clear() {
                c2.clone()
            } else {
                let mut b = b_post.clone();
                b.intersect_with(&c2);
                b
            };
            out.push((n2.clone(), c2, s2, b2));
        }
    }, init, |s| s.3.is_clear())
}

const NO_RANK: u8 = u8::MAX;
const UNRANKED: u8 = u8::MAX - 1;

/// Tight level rankings with an obligation set, preceded by a subset phase.
/// Subset macrostates mark members with `UNRANKED` and may jump to any tight
/// ranking of their successor. Ranks never increase along runs, accepting
/// states carry even ranks, and the obligation set empties infinitely often
/// exactly when every run eventually rests on an odd rank.
fn rank_based<L: Clone + Ord>(
    a: &BuchiAutomaton<L>,
    classes: &[FixedBitSet],
    delta: &Delta,
    cap: usize,
) -> Result<BuchiAutomaton<L>> {
    let n = delta.n;
    if 2 * n >= UNRANKED as usize {
        return Err(Error::StateCapExceeded(cap));
    }
    let mut init = vec![NO_RANK; n];
    init[a.initial()] = UNRANKED;
    let init = (init, FixedBitSet::with_capacity(n), false);
    build(a, classes, cap, |(f, o, ranked): &(Vec<u8>, FixedBitSet, bool), c, out: &mut Vec<_>| {
        let mut bound = vec![NO_RANK; n];
        for (q, &fq) in f.iter().enumerate() {
            if fq == NO_RANK {
                continue;
            }
            for &r in &delta.succ[q][c] {
                bound[r] = if bound[r] == NO_RANK { fq } else { bound[r].min(fq) };
            }
        }
        let targets: Vec<usize> = (0..n).filter(|&r| bound[r] != NO_RANK).collect();
        if !ranked {
            let mut subset = vec![NO_RANK; n];
            for &r in &targets {
                subset[r] = UNRANKED;
            }
            out.push((subset, FixedBitSet::with_capacity(n), false));
            let top = (2 * targets.len()).saturating_sub(1) as u8;
            for &r in &targets {
                bound[r] = top;
            }
        }
        let mut choice = vec![NO_RANK; n];
        let o_post = if !ranked || o.is_clear() { None } else { Some(delta.post(o, c)) };
        enumerate(&targets, 0, &bound, delta, &mut choice, &mut |g: &[u8]| {
            if !is_tight(&targets, g) {
                return;
            }
            let mut o2 = FixedBitSet::with_capacity(n);
            for &r in &targets {
                let even = g[r].is_multiple_of(2);
                let tracked = o_post.as_ref().is_none_or(|p| p.contains(r));
                if even && tracked {
                    o2.insert(r);
                }
            }
            out.push((g.to_vec(), o2, true));
        });
    }, init, |s| s.2 && s.1.is_clear())
}

/// The maximal rank is odd and every odd rank below it occurs.
fn is_tight(targets: &[usize], g: &[u8]) -> bool {
    let Some(max) = targets.iter().map(|&r| g[r]).max() else {
        return true;
    };
    if max % 2 == 0 {
        return false;
    }
    let mut seen = 0u128;
    for &r in targets {
        if g[r] % 2 == 1 {
            seen |= 1 << (g[r] / 2);
        }
    }
    seen.count_ones() as u8 == max / 2 + 1
}

fn enumerate(
    targets: &[usize],
    k: usize,
    bound: &[u8],
    delta: &Delta,
    choice: &mut Vec<u8>,
    emit: &mut dyn FnMut(&[u8]),
) {
    if k == targets.len() {
        emit(choice);
        return;
    }
    let r = targets[k];
    let acc = delta.accepting.contains(r);
    for v in 0..=bound[r] {
        if acc && v % 2 == 1 {
            continue;
        }
        choice[r] = v;
        enumerate(targets, k + 1, bound, delta, choice, emit);
    }
    choice[r] = NO_RANK;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Lasso;

    fn words() -> Vec<Lasso<char>> {
        let mut out = Vec::new();
        let ab = ['a', 'b'];
        for sl in 0..3usize {
            for cl in 1..4usize {
                for bits in 0..(1u32 << (sl + cl)) {
                    let l: Vec<char> = (0..sl + cl).map(|i| ab[((bits >> i) & 1) as usize]).collect();
                    out.push(Lasso::new(l[..sl].to_vec(), l[sl..].to_vec()));
                }
            }
        }
        out
    }

    fn check(a: &BuchiAutomaton<char>) {
        let c = complement(a, 20_000).unwrap();
        for w in words() {
            assert_ne!(a.accepts_lasso(&w).unwrap(), c.accepts_lasso(&w).unwrap(), "{w:?}");
        }
    }

    #[test]
    fn deterministic_infinitely_many_b() {
        let mut a = BuchiAutomaton::new(vec!['a', 'b']);
        let q1 = a.add_state(true);
        a.add_transition(0, &'a', 0).unwrap();
        a.add_transition(0, &'b', q1).unwrap();
        a.add_transition(q1, &'a', 0).unwrap();
        a.add_transition(q1, &'b', q1).unwrap();
        check(&a);
    }

    #[test]
    fn weak_finitely_many_b() {
        let mut a = BuchiAutomaton::new(vec!['a', 'b']);
        let q1 = a.add_state(true);
        a.add_transition(0, &'a', 0).unwrap();
        a.add_transition(0, &'b', 0).unwrap();
        a.add_transition(0, &'a', q1).unwrap();
        a.add_transition(q1, &'a', q1).unwrap();
        assert!(a.is_weak());
        check(&a);
    }

    #[test]
    fn general_nondeterministic() {
        // infinitely many `ab` factors or eventually only b, mixed in one component
        let mut a = BuchiAutomaton::new(vec!['a', 'b']);
        let q1 = a.add_state(false);
        let q2 = a.add_state(true);
        a.add_transition(0, &'a', 0).unwrap();
        a.add_transition(0, &'b', 0).unwrap();
        a.add_transition(0, &'a', q1).unwrap();
        a.add_transition(q1, &'b', q2).unwrap();
        a.add_transition(q2, &'a', q1).unwrap();
        a.add_transition(q2, &'b', 0).unwrap();
        a.add_transition(q2, &'a', 0).unwrap();
        assert!(!a.is_weak());
        assert!(!a.is_deterministic());
        check(&a);
    }

    #[test]
    fn semi_deterministic_eventually_ab_forever() {
        // guess a point after which the word is (ab)^ω
        let mut a = BuchiAutomaton::new(vec!['a', 'b']);
        let q1 = a.add_state(true);
        let q2 = a.add_state(false);
        a.add_transition(0, &'a', 0).unwrap();
        a.add_transition(0, &'b', 0).unwrap();
        a.add_transition(0, &'a', q1).unwrap();
        a.add_transition(q1, &'b', q2).unwrap();
        a.add_transition(q2, &'a', q1).unwrap();
        let d = Delta::new(&a, &letter_classes(&a));
        assert!(d.semi_deterministic_part().is_some());
        check(&a);
    }

    #[test]
    fn rank_based_directly() {
        let mut a = BuchiAutomaton::new(vec!['a', 'b']);
        let q1 = a.add_state(true);
        a.add_transition(0, &'a', 0).unwrap();
        a.add_transition(0, &'b', 0).unwrap();
        a.add_transition(0, &'b', q1).unwrap();
        a.add_transition(q1, &'b', q1).unwrap();
        a.add_transition(q1, &'a', 0).unwrap();
        a.add_transition(q1, &'b', 0).unwrap();
        let a = a.reduce();
        let classes = letter_classes(&a);
        let d = Delta::new(&a, &classes);
        let c = rank_based(&a, &classes, &d, 20_000).unwrap();
        for w in words() {
            assert_ne!(a.accepts_lasso(&w).unwrap(), c.accepts_lasso(&w).unwrap(), "{w:?}");
        }
    }

    #[test]
    fn rank_based_on_random_automata() {
        use rand::Rng;
        for seed in 0..300u64 {
            let mut r = crate::testkit::rng(seed, 0);
            let n = r.gen_range(1..=4);
            let mut a = BuchiAutomaton::new(vec!['a', 'b']);
            for _ in 1..n {
                a.add_state(false);
            }
            for q in 0..n {
                a.set_accepting(q, r.gen_bool(0.4));
                for l in ['a', 'b'] {
                    for _ in 0..r.gen_range(0..=2) {
                        a.add_transition(q, &l, r.gen_range(0..n)).unwrap();
                    }
                }
            }
            let a = a.reduce();
            let classes = letter_classes(&a);
            let d = Delta::new(&a, &classes);
            let c = rank_based(&a, &classes, &d, 20_000).unwrap();
            for w in words() {
                assert_ne!(a.accepts_lasso(&w).unwrap(), c.accepts_lasso(&w).unwrap(), "seed {seed} {w:?}");
            }
        }
    }

    #[test]
    fn empty_and_universal() {
        let e: BuchiAutomaton<char> = BuchiAutomaton::new(vec!['a', 'b']);
        let u = complement(&e, 100).unwrap();
        assert!(u.accepts_lasso(&Lasso::new(vec![], vec!['a'])).unwrap());
        check(&e);
        check(&BuchiAutomaton::universal(vec!['a', 'b']));
    }
}
