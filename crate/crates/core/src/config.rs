/// Knobs shared by every construction that unrolls words or builds automata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    /// Minimum number of period blocks tabulated before a periodic pattern is read off.
    pub stabilize_k: usize,
    /// Upper bound on the number of states any single construction may create.
    pub state_cap: usize,
    /// Upper bound on the number of clauses produced by guard normalisation.
    pub dnf_cap: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            stabilize_k: 3,
            state_cap: 20_000,
            dnf_cap: 4096,
        }
    }
}
