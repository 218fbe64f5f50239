//! Seeded acceptance suite: eleven property checks, each reported as one line.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::ltl::{
    diamond_to_rtltl, mitl_eval, mitl_to_diamond, stot, symbolic_positions, tltl_eval, tltl_to_tfo, Mitl,
};
use crate::mso::{automaton_to_sentence, tmso_eval, tmso_to_idta, Valuation};
use crate::omega::{BoolOp, BuchiAutomaton};
use crate::operators::{eval_operator_guard, NoResolver, OperatorBinding, OperatorKind};
use crate::parse::fmt_idta;
use crate::recursive::{ridta_membership, ridta_to_rtmso, rtltl_eval, rtmso_to_ridta, Session};
use crate::symbolic::{
    canonical_word, combine_idta, complement_idta, from_proper, in_proper_word, proper_membership, timed_membership,
    to_proper, Guard, Idta, ProperAlphabet, ProperLetter, SymbolicLetter,
};
use crate::testkit::{self, fixtures, GenConfig};
use crate::time::{int, rat, Interval, Lasso, Rational, TimedLasso};

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub cases: usize,
    pub passed: usize,
    /// First few failing cases.
    pub failures: Vec<String>,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl CriterionReport {
    pub fn within_limit(&self) -> bool {
        self.limit.is_none_or(|l| self.elapsed <= l)
    }

    pub fn ok(&self) -> bool {
        self.cases > 0 && self.passed == self.cases && self.within_limit()
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok() { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{verdict}] {:>2} {}: {}/{} cases in {:.2}s",
            self.id,
            self.name,
            self.passed,
            self.cases,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(l) = self.limit {
            write!(f, " (limit {}s)", l.as_secs())?;
        }
        Ok(())
    }
}

/// Identifier, name and time limit in seconds of every criterion.
pub const CRITERIA: [(usize, &str, Option<u64>); 11] = [
    (1, "canonical word uniqueness", Some(60)),
    (2, "boolean closure", Some(300)),
    (3, "proper round trip", None),
    (4, "automaton to sentence to automaton", Some(600)),
    (5, "compiled vs direct first-order evaluation", None),
    (6, "temporal to first-order and proper transfer", None),
    (7, "interval until/since rewrite", None),
    (8, "metric to recursive temporal pipeline", None),
    (9, "recursive example agreement", None),
    (10, "no two a's one unit apart", None),
    (11, "operator oracle", Some(30)),
];

const MAX_FAILURES: usize = 5;

struct Tally {
    cases: usize,
    passed: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            passed: 0,
            failures: Vec::new(),
        }
    }

    /// Records a case; `Ok(None)` passes, `Ok(Some(msg))` and errors fail.
    fn record(&mut self, label: impl FnOnce() -> String, outcome: Result<Option<String>>) {
        self.cases += 1;
        let msg = match outcome {
            Ok(None) => {
                self.passed += 1;
                return;
            }
            Ok(Some(m)) => m,
            Err(e) => format!("{}: {e}", e.kind()),
        };
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(format!("{}: {msg}", label()));
        }
    }
}

fn mismatch(what: &str, got: bool, want: bool) -> Option<String> {
    (got != want).then(|| format!("{what} gave {got}, expected {want}"))
}

/// Runs criterion `id` with generator seed `seed`.
pub fn run_criterion(id: usize, seed: u64, cfg: &Config) -> Result<CriterionReport> {
    let &(_, name, limit) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Unsupported(format!("no acceptance criterion {id}")))?;
    let start = Instant::now();
    let mut t = Tally::new();
    match id {
        1 => canonical_uniqueness(seed, cfg, &mut t),
        2 => boolean_closure(seed, cfg, &mut t),
        3 => proper_round_trip(seed, cfg, &mut t),
        4 => sentence_round_trip(seed, cfg, &mut t),
        5 => first_order_direct(seed, cfg, &mut t),
        6 => temporal_translations(seed, cfg, &mut t),
        7 => interval_rewrite(seed, cfg, &mut t),
        8 => metric_pipeline(seed, cfg, &mut t),
        9 => recursive_example(seed, cfg, &mut t),
        10 => unit_distance_language(cfg, &mut t),
        _ => operator_oracle(seed, &mut t),
    }
    Ok(CriterionReport {
        id,
        name,
        cases: t.cases,
        passed: t.passed,
        failures: t.failures,
        elapsed: start.elapsed(),
        limit: limit.map(Duration::from_secs),
    })
}

pub fn run_all(seed: u64, cfg: &Config) -> Vec<CriterionReport> {
    CRITERIA
        .iter()
        .map(|c| run_criterion(c.0, seed, cfg).expect("known criterion"))
        .collect()
}

fn operator_catalogue() -> Vec<OperatorBinding> {
    let mut out = Vec::new();
    for a in ["a", "b"] {
        out.push(OperatorBinding::last(a));
        out.push(OperatorBinding::next(a));
        out.push(OperatorBinding::fut(a));
        out.push(OperatorBinding::past(a));
    }
    out
}

fn pick<T: Clone>(r: &mut impl Rng, pool: &[T], lo: usize, hi: usize) -> Vec<T> {
    let k = r.gen_range(lo..=hi.min(pool.len()));
    pool.choose_multiple(r, k).cloned().collect()
}

/// Positions after which every signal of non-recursive atoms with the given
/// reach is periodic.
fn settled(word: &TimedLasso, reach: Rational) -> usize {
    let blocks = (reach / word.shift()).ceil().to_usize().unwrap_or(0) + 2;
    word.stem_len() + blocks * word.period_len()
}

/// Positions to compare two ultimately periodic position sets on.
fn horizon(word: &TimedLasso) -> usize {
    word.stem_len() + 3 * word.period_len()
}

/// Letter-by-letter check of `σ ∈ tw_Γ(γ)` against the brute-force operator scan.
fn proper_member_oracle(ab: &ProperAlphabet, gamma: &Lasso<ProperLetter>, word: &TimedLasso) -> bool {
    let reach = ab.intervals.iter().map(|i| i.reach()).max().unwrap_or(int(0));
    let n = gamma.stem_len().max(settled(word, reach)) + gamma.cycle_len().lcm(&word.period_len());
    (0..n).all(|i| {
        let l = gamma.get(i);
        l.action == *word.action(i)
            && ab.ops.iter().all(|b| {
                ab.intervals
                    .iter()
                    .all(|iv| l.holds(b, iv) == testkit::brute_force_guard(&b.kind, iv, word, i))
            })
    })
}

fn canonical_uniqueness(seed: u64, cfg: &Config, t: &mut Tally) {
    let g = GenConfig::default();
    let catalogue = operator_catalogue();
    for k in 0..200 {
        let mut r = testkit::rng(seed ^ 0x01, k);
        let ops = pick(&mut r, &catalogue, 1, 2);
        let ivs = pick(&mut r, &g.intervals, 0, 2);
        let ab = ProperAlphabet::new(g.actions.clone(), ops, ivs);
        let word = testkit::random_lasso(&mut r, &g);
        let outcome = (|| -> Result<Option<String>> {
            let gamma = canonical_word(&ab, &word, &NoResolver, cfg)?;
            if !in_proper_word(&ab, &gamma, &word, &NoResolver, cfg)? {
                return Ok(Some("canonical word is not a member".into()));
            }
            if !proper_member_oracle(&ab, &gamma, &word) {
                return Ok(Some("canonical word disagrees with the operator scan".into()));
            }
            let letters = ab.letters()?;
            let (s, c) = gamma.shape();
            let wide = gamma.reshape(s + c, c);
            for pos in 0..s + 2 * c {
                for l in &letters {
                    if l == wide.get(pos) {
                        continue;
                    }
                    let mut m = wide.clone();
                    if pos < s + c {
                        m.stem[pos] = l.clone();
                    } else {
                        m.cycle[pos - s - c] = l.clone();
                    }
                    if in_proper_word(&ab, &m, &word, &NoResolver, cfg)? {
                        return Ok(Some(format!("mutation at {pos} to {l} is a member")));
                    }
                }
            }
            Ok(None)
        })();
        t.record(|| format!("case {k} on {word}"), outcome);
    }
}

fn closure_config() -> GenConfig {
    GenConfig {
        max_states: 4,
        ops: vec![OperatorBinding::last("a"), OperatorBinding::next("a")],
        ..GenConfig::default()
    }
}

fn boolean_closure(seed: u64, cfg: &Config, t: &mut Tally) {
    let g = closure_config();
    for k in 0..50 {
        let mut r = testkit::rng(seed ^ 0x02, k);
        let a = testkit::random_idta(&mut r, &g);
        let b = testkit::random_idta(&mut r, &g);
        let built = (|| -> Result<(Idta, Idta, Idta)> {
            Ok((
                complement_idta(&a, cfg)?,
                combine_idta(BoolOp::Union, &a, &b, cfg)?,
                combine_idta(BoolOp::Intersection, &a, &b, cfg)?,
            ))
        })();
        let words: Vec<TimedLasso> = (0..100).map(|_| testkit::random_lasso(&mut r, &g)).collect();
        for (w, word) in words.iter().enumerate() {
            let outcome = match &built {
                Err(e) => Err(e.clone()),
                Ok((c, u, i)) => (|| -> Result<Option<String>> {
                    let m = |x: &Idta| timed_membership(x, word, &NoResolver, cfg);
                    let (ma, mb, mc) = (m(&a)?, m(&b)?, m(c)?);
                    Ok(mismatch("complement", mc, !ma)
                        .or_else(|| mismatch("union", m(u).unwrap_or(!(ma || mb)), ma || mb))
                        .or_else(|| mismatch("intersection", m(i).unwrap_or(!(ma && mb)), ma && mb)))
                })(),
            };
            t.record(|| format!("automaton {k} word {w} {word}\n{}", fmt_idta(&a)), outcome);
        }
    }
}

fn proper_round_trip(seed: u64, cfg: &Config, t: &mut Tally) {
    let g = closure_config();
    for k in 0..30 {
        let mut r = testkit::rng(seed ^ 0x03, k);
        let a = testkit::random_idta(&mut r, &g);
        let built = to_proper(&a, cfg).map(|p| (from_proper(&p), p));
        for w in 0..100 {
            let word = testkit::random_lasso(&mut r, &g);
            let outcome = match &built {
                Err(e) => Err(e.clone()),
                Ok((back, p)) => (|| -> Result<Option<String>> {
                    let want = timed_membership(&a, &word, &NoResolver, cfg)?;
                    Ok(mismatch("round trip", timed_membership(back, &word, &NoResolver, cfg)?, want)
                        .or(mismatch("proper", proper_membership(p, &word, &NoResolver, cfg)?, want)))
                })(),
            };
            t.record(|| format!("automaton {k} word {w} {word}"), outcome);
        }
    }
}

fn sentence_round_trip(seed: u64, cfg: &Config, t: &mut Tally) {
    let g = GenConfig {
        max_states: 3,
        ..closure_config()
    };
    for k in 0..20 {
        let mut r = testkit::rng(seed ^ 0x04, k);
        let a = testkit::random_idta(&mut r, &g);
        let built = tmso_to_idta(&automaton_to_sentence(&a), &a.sigma, cfg);
        for w in 0..100 {
            let word = testkit::random_lasso(&mut r, &g);
            let outcome = match &built {
                Err(e) => Err(e.clone()),
                Ok(p) => (|| -> Result<Option<String>> {
                    let want = timed_membership(&a, &word, &NoResolver, cfg)?;
                    Ok(mismatch("sentence automaton", proper_membership(p, &word, &NoResolver, cfg)?, want))
                })(),
            };
            t.record(|| format!("automaton {k} word {w} {word}\n{}", fmt_idta(&a)), outcome);
        }
    }
}

fn first_order_direct(seed: u64, cfg: &Config, t: &mut Tally) {
    let g = GenConfig {
        ops: operator_catalogue(),
        ..GenConfig::default()
    };
    for k in 0..100 {
        let mut r = testkit::rng(seed ^ 0x05, k);
        let f = testkit::random_fo_sentence(&mut r, &g, 3);
        let words: Vec<TimedLasso> = (0..3).map(|_| testkit::random_lasso(&mut r, &g)).collect();
        let outcome = (|| -> Result<Option<String>> {
            for word in &words {
                let got = tmso_eval(&f, word, &Valuation::new(), &NoResolver, cfg)?;
                let want = testkit::fo_eval_direct(&f, word, &BTreeMap::new())?;
                if got != want {
                    return Ok(Some(format!("on {word} compiled {got}, direct {want}")));
                }
            }
            Ok(None)
        })();
        t.record(|| format!("sentence {k} {f}"), outcome);
    }
}

fn temporal_translations(seed: u64, cfg: &Config, t: &mut Tally) {
    let g = GenConfig {
        ops: operator_catalogue(),
        ..GenConfig::default()
    };
    for k in 0..100 {
        let mut r = testkit::rng(seed ^ 0x06, k);
        let f = testkit::random_tltl(&mut r, &g, 3);
        let word = testkit::random_lasso(&mut r, &g);
        let outcome = (|| -> Result<Option<String>> {
            let fo = tltl_to_tfo(&f);
            for i in 0..horizon(&word) {
                let want = tltl_eval(&f, &word, i, &NoResolver, cfg)?;
                let got = tmso_eval(&fo, &word, &Valuation::new().with("x", i), &NoResolver, cfg)?;
                if got != want {
                    return Ok(Some(format!("at {i} first-order {got}, temporal {want}")));
                }
            }
            Ok(None)
        })();
        t.record(|| format!("formula {k} {f} on {word}"), outcome);
    }
    let catalogue = operator_catalogue();
    for k in 0..100 {
        let mut r = testkit::rng(seed ^ 0x16, k);
        let ab = ProperAlphabet::new(g.actions.clone(), pick(&mut r, &catalogue, 1, 2), pick(&mut r, &g.intervals, 1, 2));
        let word = testkit::random_lasso(&mut r, &g);
        let outcome = (|| -> Result<Option<String>> {
            let gamma = canonical_word(&ab, &word, &NoResolver, cfg)?;
            let mut leaves: Vec<ProperLetter> = gamma.stem.iter().chain(&gamma.cycle).cloned().collect();
            leaves.extend(ab.letters()?.choose_multiple(&mut r, 2).cloned());
            let f = testkit::random_tltl_over(&mut r, &leaves, 3);
            let onword = stot(&f, &ab);
            let symbolic = symbolic_positions(&f, &gamma)?;
            for i in 0..horizon(&word).max(gamma.span() + gamma.cycle_len()) {
                let got = tltl_eval(&onword, &word, i, &NoResolver, cfg)?;
                if got != symbolic.member(i) {
                    return Ok(Some(format!("{f} at {i}: timed {got}, symbolic {}", symbolic.member(i))));
                }
            }
            Ok(None)
        })();
        t.record(|| format!("proper case {k} on {word}"), outcome);
    }
}

fn iv(lo: Rational, lo_closed: bool, hi: Option<Rational>, hi_closed: bool) -> Interval {
    Interval::new(lo, lo_closed, hi, hi_closed).expect("valid interval")
}

/// Intervals for each rewrite branch: left end zero closed, zero open,
/// positive closed, positive open.
fn branch_intervals() -> [Vec<Interval>; 4] {
    [
        vec![iv(int(0), true, Some(int(1)), false), iv(int(0), true, Some(int(2)), true), Interval::at_least(int(0))],
        vec![iv(int(0), false, Some(int(1)), false), iv(int(0), false, Some(int(2)), true), iv(int(0), false, None, false)],
        vec![Interval::closed(int(1), int(2)), Interval::at_least(int(1)), iv(rat(1, 2), true, Some(rat(3, 2)), false)],
        vec![iv(int(1), false, Some(int(2)), false), iv(int(1), false, None, false), iv(rat(1, 2), false, Some(int(2)), true)],
    ]
}

fn strict_config() -> GenConfig {
    GenConfig {
        strict_time: true,
        ..GenConfig::default()
    }
}

fn interval_rewrite(seed: u64, cfg: &Config, t: &mut Tally) {
    let g = strict_config();
    let branches = branch_intervals();
    for k in 0..200u64 {
        let mut r = testkit::rng(seed ^ 0x07, k);
        let i = branches[(k % 4) as usize].choose(&mut r).expect("interval").clone();
        let theta = testkit::random_mitl(&mut r, &g, 2);
        let eta = testkit::random_mitl(&mut r, &g, 2);
        let f = if (k / 4) % 2 == 0 {
            theta.until_in(i, eta)
        } else {
            theta.since_in(i, eta)
        };
        let word = testkit::random_lasso(&mut r, &g);
        let outcome = (|| -> Result<Option<String>> {
            let rw = mitl_to_diamond(&f);
            if !rw.is_non_singular() || !rw.is_diamond_fragment() {
                return Ok(Some(format!("rewrite {rw} left the non-singular eventuality fragment")));
            }
            for p in 0..horizon(&word) {
                let (want, got) = (mitl_eval(&f, &word, p, cfg)?, mitl_eval(&rw, &word, p, cfg)?);
                if got != want {
                    return Ok(Some(format!("at {p} rewrite {rw} gave {got}, expected {want}")));
                }
            }
            Ok(None)
        })();
        t.record(|| format!("case {k} {f} on {word}"), outcome);
    }
}

fn metric_pipeline(seed: u64, cfg: &Config, t: &mut Tally) {
    let mut g = strict_config();
    g.intervals.extend(branch_intervals().into_iter().flatten());
    let reg = crate::recursive::Registry::new();
    for k in 0..200 {
        let mut r = testkit::rng(seed ^ 0x08, k);
        let f: Mitl = testkit::random_mitl(&mut r, &g, 3);
        let word = testkit::random_lasso(&mut r, &g);
        let outcome = (|| -> Result<Option<String>> {
            let rt = diamond_to_rtltl(&mitl_to_diamond(&f))?;
            let session = Session::new(&reg, cfg);
            for p in 0..horizon(&word) {
                let (want, got) = (mitl_eval(&f, &word, p, cfg)?, rtltl_eval(&rt, &word, p, &session)?);
                if got != want {
                    return Ok(Some(format!("at {p} recursive formula {rt} gave {got}, expected {want}")));
                }
            }
            Ok(None)
        })();
        t.record(|| format!("case {k} {f} on {word}"), outcome);
    }
}

/// Begins with `a` and has a `b` between two `a`s exactly one time unit after the start.
fn example_oracle(word: &TimedLasso) -> bool {
    let t0 = word.time(0);
    word.action(0) == "a"
        && (1..)
            .take_while(|&j| word.time(j) <= t0 + int(1))
            .any(|j| word.time(j) - t0 == int(1) && word.action(j) == "b" && word.action(j - 1) == "a" && word.action(j + 1) == "a")
}

fn recursive_example(seed: u64, cfg: &Config, t: &mut Tally) {
    let g = GenConfig {
        max_stem: 5,
        ..GenConfig::default()
    };
    let ridta = fixtures::example_ridta();
    let sentence = fixtures::example_sentence();
    let formula = fixtures::example_formula();
    let translated = (|| -> Result<_> {
        Ok((
            ridta_to_rtmso(&ridta)?,
            rtmso_to_ridta(&sentence, &["a".into(), "b".into()], cfg)?,
        ))
    })();
    let reject = TimedLasso::new(vec![("b".into(), int(0))], vec![("a".into(), int(1))], int(1)).expect("valid word");
    let mut words = vec![(fixtures::sigma2(), Some(true)), (reject, Some(false))];
    for k in 0..50 {
        let mut r = testkit::rng(seed ^ 0x09, k);
        words.push((testkit::random_lasso(&mut r, &g), None));
    }
    for (k, (word, expected)) in words.iter().enumerate() {
        let outcome = match &translated {
            Err(e) => Err(e.clone()),
            Ok((as_sentence, as_automaton)) => (|| -> Result<Option<String>> {
                let want = example_oracle(word);
                if let Some(e) = expected {
                    if want != *e {
                        return Ok(Some(format!("oracle gave {want}, expected {e}")));
                    }
                }
                let session = Session::new(&ridta.registry, cfg);
                let results = [
                    ("automaton", ridta_membership(&ridta, word, cfg)?),
                    ("sentence", tmso_eval(&sentence, word, &Valuation::new(), &session, cfg)?),
                    ("formula", rtltl_eval(&formula, word, 0, &session)?),
                    ("automaton as sentence", tmso_eval(as_sentence, word, &Valuation::new(), &session, cfg)?),
                    ("sentence as automaton", ridta_membership(as_automaton, word, cfg)?),
                ];
                Ok(results.iter().find_map(|(what, got)| mismatch(what, *got, want)))
            })(),
        };
        t.record(|| format!("word {k} {word}"), outcome);
    }
}

/// No two `a`s exactly one time unit apart, by pairwise scan over one period past the stem.
fn unit_distance_oracle(word: &TimedLasso) -> bool {
    let first = word.stem_len() + word.period_len();
    !(0..first).any(|i| {
        word.action(i) == "a"
            && (i + 1..)
                .take_while(|&j| word.time(j) <= word.time(i) + int(1))
                .any(|j| word.action(j) == "a" && word.time(j) - word.time(i) == int(1))
    })
}

fn unit_distance_automaton() -> Idta {
    let fa = OperatorBinding::fut("a");
    let la = SymbolicLetter::new("a", Guard::atom(Interval::point(int(1)), fa.clone()).negate());
    let lb = SymbolicLetter::new("b", Guard::True);
    let mut m = BuchiAutomaton::new(vec![la.clone(), lb.clone()]);
    m.set_accepting(0, true);
    m.add_transition(0, &la, 0).expect("own letter");
    m.add_transition(0, &lb, 0).expect("own letter");
    Idta::new(vec!["a".into(), "b".into()], vec![fa], m)
}

/// Ten words with some `a`s at unit spacing and ten whose `a`s are 7/10 apart.
fn unit_distance_words() -> Vec<(TimedLasso, bool)> {
    let ev = |a: &str, t: Rational| (a.to_string(), t);
    let mut out = Vec::new();
    for k in 0..10i64 {
        let stem: Vec<_> = (0..k % 3).map(|j| ev("a", int(j))).collect();
        let base = int(k % 3);
        let period = if k % 2 == 0 {
            vec![ev("a", base)]
        } else {
            vec![ev("a", base), ev("b", base + rat(1, 2 + k % 3))]
        };
        let w = TimedLasso::new(stem, period, int(1)).expect("valid word");
        out.push((w, false));
    }
    let step = rat(7, 10);
    for k in 0..10i64 {
        let stem: Vec<_> = (0..k % 4).map(|j| ev("a", step * int(j))).collect();
        let base = step * int(k % 4);
        let period = match k % 3 {
            0 => vec![ev("a", base)],
            1 => vec![ev("a", base), ev("b", base + rat(3, 10))],
            _ => vec![ev("b", base), ev("a", base + rat(1, 10))],
        };
        let w = TimedLasso::new(stem, period, step).expect("valid word");
        out.push((w, true));
    }
    out
}

fn unit_distance_language(cfg: &Config, t: &mut Tally) {
    let a = unit_distance_automaton();
    for (k, (word, expected)) in unit_distance_words().into_iter().enumerate() {
        let outcome = (|| -> Result<Option<String>> {
            let oracle = unit_distance_oracle(&word);
            if oracle != expected {
                return Ok(Some(format!("oracle gave {oracle}, expected {expected}")));
            }
            Ok(mismatch("automaton", timed_membership(&a, &word, &NoResolver, cfg)?, expected))
        })();
        t.record(|| format!("word {k} {word}"), outcome);
    }
}

fn operator_oracle(seed: u64, t: &mut Tally) {
    let mut g = GenConfig::default();
    g.intervals.extend(branch_intervals().into_iter().flatten());
    g.intervals.push(Interval::closed(int(0), int(3)));
    g.intervals.push(Interval::at_least(int(3)));
    let kinds: Vec<OperatorKind> = operator_catalogue().into_iter().map(|b| b.kind).collect();
    for k in 0..1000 {
        let mut r = testkit::rng(seed ^ 0x0b, k);
        let word = testkit::random_lasso(&mut r, &g);
        let kind = kinds.choose(&mut r).expect("kinds").clone();
        let i = testkit::random_interval(&mut r, &g);
        let pos = r.gen_range(0..horizon(&word));
        let got = eval_operator_guard(&kind, &i, &word, pos);
        let want = testkit::brute_force_guard(&kind, &i, &word, pos);
        t.record(|| format!("case {k} {kind:?} {i} at {pos} on {word}"), Ok(mismatch("operator", got, want)));
    }
}
