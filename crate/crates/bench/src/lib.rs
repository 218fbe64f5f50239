//! Seeded inputs shared by the benchmarks.

use idta::ltl::Tltl;
use idta::symbolic::{to_proper, Idta, ProperIdta};
use idta::testkit::{self, GenConfig};
use idta::{Action, Config, TimedLasso};

/// Inputs drawn from one seed, sized for repeated timing.
pub struct Workload {
    pub automata: Vec<Idta>,
    pub proper: Vec<ProperIdta>,
    pub words: Vec<TimedLasso>,
    pub formulas: Vec<Tltl<Action>>,
}

/// Generator bounds used by every benchmark.
pub fn generator() -> GenConfig {
    GenConfig {
        max_states: 3,
        ..GenConfig::default()
    }
}

impl Workload {
    pub fn new(seed: u64, size: usize) -> Self {
        let g = generator();
        let cfg = Config::default();
        let mut automata = Vec::with_capacity(size);
        let mut proper = Vec::with_capacity(size);
        let mut words = Vec::with_capacity(size);
        let mut formulas = Vec::with_capacity(size);
        for k in 0..size as u64 {
            let mut r = testkit::rng(seed, k);
            let a = testkit::random_idta(&mut r, &g);
            if let Ok(p) = to_proper(&a, &cfg) {
                proper.push(p);
            }
            automata.push(a);
            words.push(testkit::random_lasso(&mut r, &g));
            formulas.push(testkit::random_tltl(&mut r, &g, g.max_formula_depth));
        }
        Workload { automata, proper, words, formulas }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workload_is_seeded() {
        let a = Workload::new(3, 4);
        let b = Workload::new(3, 4);
        assert_eq!(a.words, b.words);
        assert_eq!(a.formulas, b.formulas);
        assert_eq!(a.automata.len(), 4);
        assert!(!a.proper.is_empty());
    }
}
