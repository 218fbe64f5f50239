use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use idta::ltl::{action_positions, tltl_positions, Mitl, Tltl};
use idta::mso::{tmso_positions, ttos, vocabulary};
use idta::omega::{complement, BoolOp, BuchiAutomaton};
use idta::operators::{eval_operator_guard, eval_recursive_operator, NoResolver, OperatorBinding, OperatorKind, Param};
use idta::recursive::{
    level_of, pos_set, ridta_combine, ridta_membership, rtltl_eval, Definition, Item, RecursiveAutomaton, Registry,
    Session,
};
use idta::symbolic::{
    canonical_word, dnf, guard_sat, is_empty_symbolic, proper_membership, timed_membership, to_proper, Guard,
};
use idta::testkit::{self, fixtures, GenConfig};
use idta::time::{int, rat, Interval, Lasso};
use idta::{Config, TimedLasso};

fn config() -> GenConfig {
    GenConfig {
        ops: vec![
            OperatorBinding::last("a"),
            OperatorBinding::next("a"),
            OperatorBinding::fut("b"),
            OperatorBinding::past("b"),
        ],
        ..GenConfig::default()
    }
}

fn word(seed: u64) -> TimedLasso {
    testkit::random_lasso(&mut testkit::rng(seed, 0), &config())
}

/// Plain Büchi automaton over `{0, 1}` with up to four states.
fn random_buchi(r: &mut impl Rng) -> BuchiAutomaton<u8> {
    let n = r.gen_range(1..=4);
    let mut a = BuchiAutomaton::new(vec![0u8, 1]);
    for _ in 1..n {
        a.add_state(false);
    }
    for q in 0..n {
        a.set_accepting(q, r.gen_bool(0.4));
        for l in [0u8, 1] {
            for _ in 0..r.gen_range(0..=2) {
                a.add_transition(q, &l, r.gen_range(0..n)).unwrap();
            }
        }
    }
    a
}

fn random_letters(r: &mut impl Rng) -> Lasso<u8> {
    let s = r.gen_range(0..=3);
    let c = r.gen_range(1..=3);
    Lasso::new((0..s).map(|_| r.gen_range(0..2)).collect(), (0..c).map(|_| r.gen_range(0..2)).collect())
}

/// Lasso acceptance by explicit search: some accepting node of the product
/// is reachable from the start and lies on a cycle.
fn accepts_oracle(a: &BuchiAutomaton<u8>, w: &Lasso<u8>) -> bool {
    let span = w.span();
    let succ = |(q, c): (usize, usize)| -> Vec<(usize, usize)> {
        let l = a.letter_index(w.get(c)).unwrap();
        a.successors(q, l).map(|t| (t, w.next_class(c))).collect()
    };
    let reach_from = |s: (usize, usize)| -> BTreeSet<(usize, usize)> {
        let mut seen = BTreeSet::new();
        let mut stack = succ(s);
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend(succ(v));
            }
        }
        seen
    };
    let mut from_start = reach_from((a.initial(), 0));
    from_start.insert((a.initial(), 0));
    (0..a.num_states())
        .flat_map(|q| (0..span).map(move |c| (q, c)))
        .any(|v| a.is_accepting(v.0) && from_start.contains(&v) && reach_from(v).contains(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn times_are_monotone_and_unbounded(seed in any::<u64>(), t in 0i64..40) {
        let w = word(seed);
        prop_assert!(w.validate().is_ok());
        for i in 0..w.stem_len() + 3 * w.period_len() {
            prop_assert!(w.time(i) <= w.time(i + 1));
        }
        let t = rat(t, 3);
        prop_assert!(w.time(w.position_after(t)) > t);
    }

    #[test]
    fn position_sets_are_periodic(seed in any::<u64>()) {
        let w = word(seed);
        let s = action_positions(&w, "a");
        for i in s.stem_len()..s.stem_len() + 3 * s.period() {
            prop_assert_eq!(s.member(i), s.member(i + s.period()));
        }
    }

    #[test]
    fn last_and_next_are_functional(seed in any::<u64>(), k in 0usize..12) {
        let w = word(seed);
        let i = k % (w.stem_len() + 2 * w.period_len());
        let last = (0..i).rev().find(|&j| w.action(j) == "a").map(|j| w.time(i) - w.time(j));
        let next = (i + 1..i + 1 + w.stem_len() + 2 * w.period_len()).find(|&j| w.action(j) == "a").map(|j| w.time(j) - w.time(i));
        for iv in testkit::default_intervals() {
            let want = last.is_some_and(|d| iv.contains(d));
            prop_assert_eq!(eval_operator_guard(&OperatorKind::LastDist("a".into()), &iv, &w, i), want);
            let want = next.is_some_and(|d| iv.contains(d));
            prop_assert_eq!(eval_operator_guard(&OperatorKind::NextDist("a".into()), &iv, &w, i), want);
        }
    }

    #[test]
    fn recursive_future_on_labelled_positions_is_future_distance(seed in any::<u64>(), k in 0usize..12) {
        let w = word(seed);
        let x = action_positions(&w, "a");
        for iv in testkit::default_intervals() {
            prop_assert_eq!(
                eval_recursive_operator(&OperatorKind::RecFuture, &x, &iv, &w, k),
                eval_operator_guard(&OperatorKind::FutureDist("a".into()), &iv, &w, k)
            );
        }
    }

    #[test]
    fn dnf_is_equivalent(seed in any::<u64>()) {
        let mut r = testkit::rng(seed, 1);
        let g = Guard::any((0..3).map(|_| testkit::random_guard(&mut r, &config()).negate()));
        let w = word(seed);
        let clauses = dnf(&g, 4096).unwrap();
        for i in 0..w.stem_len() + 2 * w.period_len() {
            let d = clauses.iter().any(|c| c.iter().all(|((iv, b), pos)| {
                eval_operator_guard(&b.kind, iv, &w, i) == *pos
            }));
            prop_assert_eq!(d, guard_sat(&g, &w, i, &NoResolver).unwrap());
        }
    }

    #[test]
    fn proper_conversion_keeps_vocabulary_and_language(seed in any::<u64>()) {
        let mut r = testkit::rng(seed, 2);
        let g = GenConfig { ops: vec![OperatorBinding::last("a"), OperatorBinding::fut("b")], ..config() };
        let a = testkit::random_idta(&mut r, &g);
        let cfg = Config::default();
        let p = to_proper(&a, &cfg).unwrap();
        let ivoc: BTreeSet<Interval> = p.alphabet.intervals.iter().cloned().collect();
        prop_assert_eq!(ivoc, a.ivoc());
        for _ in 0..5 {
            let w = testkit::random_lasso(&mut r, &g);
            let gamma = canonical_word(&p.alphabet, &w, &NoResolver, &cfg).unwrap();
            let want = timed_membership(&a, &w, &NoResolver, &cfg).unwrap();
            prop_assert_eq!(p.automaton.accepts_lasso(&gamma).unwrap(), want);
            prop_assert_eq!(proper_membership(&p, &w, &NoResolver, &cfg).unwrap(), want);
        }
    }

    #[test]
    fn buchi_acceptance_matches_explicit_search(seed in any::<u64>()) {
        let mut r = testkit::rng(seed, 3);
        let a = random_buchi(&mut r);
        for _ in 0..8 {
            let w = random_letters(&mut r);
            prop_assert_eq!(a.accepts_lasso(&w).unwrap(), accepts_oracle(&a, &w));
        }
    }

    #[test]
    fn complement_partitions_lassos(seed in any::<u64>()) {
        let mut r = testkit::rng(seed, 4);
        let a = random_buchi(&mut r);
        let b = random_buchi(&mut r);
        let c = complement(&a, 20_000).unwrap();
        let u = a.union(&b).unwrap();
        let i = a.intersect(&b, 20_000).unwrap();
        let d = idta::omega::bool_combine(BoolOp::Difference, &a, &b, 20_000).unwrap();
        for _ in 0..8 {
            let w = random_letters(&mut r);
            let (ma, mb) = (accepts_oracle(&a, &w), accepts_oracle(&b, &w));
            prop_assert_eq!(c.accepts_lasso(&w).unwrap(), !ma);
            prop_assert_eq!(u.accepts_lasso(&w).unwrap(), ma || mb);
            prop_assert_eq!(i.accepts_lasso(&w).unwrap(), ma && mb);
            prop_assert_eq!(d.accepts_lasso(&w).unwrap(), ma && !mb);
        }
    }

    #[test]
    fn emptiness_witness_is_accepted(seed in any::<u64>()) {
        let mut r = testkit::rng(seed, 5);
        let a = testkit::random_idta(&mut r, &config());
        let (empty, witness) = is_empty_symbolic(&a);
        prop_assert_eq!(empty, witness.is_none());
        if let Some(w) = witness {
            prop_assert!(a.automaton.accepts_lasso(&w).unwrap());
        }
    }

    #[test]
    fn ttos_preserves_first_orderness(seed in any::<u64>()) {
        let mut r = testkit::rng(seed, 6);
        let f = testkit::random_fo_sentence(&mut r, &config(), 3);
        let ab = vocabulary(&f, &["a".into(), "b".into()]);
        if ab.letters().is_ok() {
            let hat = ttos(&f, &ab).unwrap();
            prop_assert_eq!(hat.has_set_quantifier(), f.has_set_quantifier());
        }
    }

    #[test]
    fn rewrite_keeps_non_singular_intervals(seed in any::<u64>()) {
        let mut r = testkit::rng(seed, 7);
        let f: Mitl = testkit::random_mitl(&mut r, &config(), 4);
        prop_assert!(f.is_non_singular());
        let d = idta::ltl::mitl_to_diamond(&f);
        prop_assert!(d.is_non_singular());
        prop_assert!(d.is_diamond_fragment());
    }

    #[test]
    fn generated_instances_validate(seed in any::<u64>(), index in 0u64..1000) {
        let g = config();
        for kind in [testkit::InstanceKind::Lasso, testkit::InstanceKind::Idta, testkit::InstanceKind::Formula] {
            match testkit::random_instance(kind, &GenConfig { seed, ..g.clone() }, index) {
                testkit::Instance::Lasso(w) => prop_assert!(w.validate().is_ok()),
                testkit::Instance::Idta(a) => {
                    prop_assert!(a.automaton.num_states() <= g.max_states);
                    for l in a.used_letters() {
                        prop_assert!(a.sigma.contains(&l.action));
                        prop_assert!(l.guard.bindings().iter().all(|b| a.ops.contains(b)));
                    }
                }
                testkit::Instance::Formula(f) => prop_assert!(f.depth() <= g.max_formula_depth),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn memoized_sessions_agree_with_fresh_ones(seed in any::<u64>()) {
        let mut r = testkit::rng(seed, 8);
        let inner = testkit::random_tltl(&mut r, &config(), 2);
        let op = if r.gen_bool(0.5) { OperatorKind::RecFuture } else { OperatorKind::RecPast };
        let b = OperatorBinding::recursive(op, Param::Ltl(Box::new(inner)));
        let iv = testkit::random_interval(&mut r, &config());
        let f = Tltl::atom(iv, b).or(testkit::random_tltl(&mut r, &config(), 1));
        let w = word(seed);
        let reg = Registry::new();
        let cfg = Config::default();
        let memo = Session::new(&reg, &cfg);
        let plain = Session::unmemoized(&reg, &cfg);
        for i in 0..w.stem_len() + 2 * w.period_len() {
            prop_assert_eq!(rtltl_eval(&f, &w, i, &memo).unwrap(), rtltl_eval(&f, &w, i, &plain).unwrap());
        }
    }

    #[test]
    fn floating_automaton_and_formula_define_the_same_positions(seed in any::<u64>()) {
        let w = word(seed);
        let reg = Registry::new();
        let cfg = Config::default();
        let s = Session::new(&reg, &cfg);
        let by_automaton = pos_set(&fixtures::b_between_a(), &w, &s).unwrap();
        let by_formula = tmso_positions(&fixtures::b_between_a_formula(), "z", &w, &NoResolver, &cfg).unwrap();
        for i in 0..w.stem_len() + 3 * w.period_len() {
            prop_assert_eq!(by_automaton.member(i), by_formula.member(i));
        }
    }

    #[test]
    fn plain_operator_embeds_as_recursive(seed in any::<u64>()) {
        let mut r = testkit::rng(seed, 9);
        let g = GenConfig { ops: vec![OperatorBinding::fut("a")], ..config() };
        let a = testkit::random_idta(&mut r, &g);
        let lifted = OperatorBinding::recursive(
            OperatorKind::RecFuture,
            Param::Ltl(Box::new(Tltl::letter("a".to_string()))),
        );
        let mut wrapped = a.clone();
        let mut letters = a.automaton.alphabet().to_vec();
        for l in &mut letters {
            l.guard = l.guard.map_bindings(&|_| lifted.clone());
        }
        let mut m = BuchiAutomaton::new(letters.clone());
        for _ in 1..a.automaton.num_states() {
            m.add_state(false);
        }
        for q in 0..a.automaton.num_states() {
            m.set_accepting(q, a.automaton.is_accepting(q));
        }
        for (p, l, q) in a.automaton.transitions() {
            let k = a.automaton.letter_index(l).unwrap();
            m.add_transition(p, &letters[k], q).unwrap();
        }
        wrapped.automaton = m;
        wrapped.ops = vec![lifted];
        let ra = RecursiveAutomaton::plain(wrapped);
        prop_assert!(level_of(Item::Automaton(&ra.base), &ra.registry).unwrap() <= 1);
        let cfg = Config::default();
        for _ in 0..5 {
            let w = testkit::random_lasso(&mut r, &g);
            prop_assert_eq!(
                ridta_membership(&ra, &w, &cfg).unwrap(),
                timed_membership(&a, &w, &NoResolver, &cfg).unwrap()
            );
        }
    }

    #[test]
    fn recursive_boolean_closure(seed in any::<u64>()) {
        let cfg = Config::default();
        let a = fixtures::example_ridta();
        let mut r = testkit::rng(seed, 10);
        let inner = testkit::random_tltl(&mut r, &GenConfig { ops: vec![], ..config() }, 2);
        let b_param = OperatorBinding::recursive(OperatorKind::RecPast, Param::Floating("C".into()));
        let mut reg = Registry::new();
        reg.insert("C", Definition::Ltl(inner));
        let g = GenConfig { ops: vec![b_param], ..config() };
        let b = RecursiveAutomaton::new(testkit::random_idta(&mut r, &g), reg);
        let level = level_of(Item::Automaton(&a.base), &a.registry).unwrap()
            .max(level_of(Item::Automaton(&b.base), &b.registry).unwrap());
        for (op, f) in [
            (BoolOp::Union, (|x, y| x || y) as fn(bool, bool) -> bool),
            (BoolOp::Intersection, |x, y| x && y),
        ] {
            let c = ridta_combine(op, &a, &b, &cfg).unwrap();
            prop_assert!(level_of(Item::Automaton(&c.base), &c.registry).unwrap() <= level);
            for _ in 0..4 {
                let w = testkit::random_lasso(&mut r, &config());
                let (ma, mb) = (ridta_membership(&a, &w, &cfg).unwrap(), ridta_membership(&b, &w, &cfg).unwrap());
                prop_assert_eq!(ridta_membership(&c, &w, &cfg).unwrap(), f(ma, mb));
            }
        }
    }
}

#[test]
fn worked_example_values() {
    let cfg = Config::default();
    let reg = Registry::new();
    let s = Session::new(&reg, &cfg);
    let b = fixtures::b_between_a();
    let w = fixtures::sigma2();
    assert_eq!(
        pos_set(&b, &w, &s).unwrap(),
        idta::PositionSet::new(&[2], &[0], 4, 2)
    );
    assert!(ridta_membership(&fixtures::example_ridta(), &w, &cfg).unwrap());
    assert!(rtltl_eval(&fixtures::example_formula(), &fixtures::sigma1(), 0, &s).unwrap());
    let theta = Tltl::letter("b".to_string()).and(Tltl::letter("a".to_string()).prev());
    let p = tltl_positions(&theta, &fixtures::sigma1(), &NoResolver, &cfg).unwrap();
    assert!(p.member(1) && p.member(3) && !p.member(0));
    let la = Interval::point(int(1));
    assert!(eval_operator_guard(&OperatorKind::LastDist("a".into()), &la, &fixtures::sigma1(), 1));
}

#[test]
fn choose_is_seeded() {
    let pool = testkit::default_intervals();
    let a = pool.choose(&mut testkit::rng(1, 2)).cloned();
    let b = pool.choose(&mut testkit::rng(1, 2)).cloned();
    assert_eq!(a, b);
}
