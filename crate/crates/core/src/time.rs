//! Exact time values, intervals, ultimately periodic timed words and
//! eventually periodic sequences.
//!
//! Every timestamp is a non-negative rational. A [`TimedLasso`] is a finite
//! stem followed by a period repeated forever, each repetition shifted in
//! time by a fixed positive amount, so the word is always progressive.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub type Action = String;

pub fn rat(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Ratio::from_integer(n)
}

/// Parses `3`, `1/2`, `0.25` or `-1.5` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches('-');
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
            return None;
        }
        let w: i64 = if whole_abs.is_empty() { 0 } else { whole_abs.parse().ok()? };
        let f: i64 = frac.parse().ok()?;
        let den = 10i64.checked_pow(frac.len() as u32)?;
        let v = Ratio::new(w.checked_mul(den)?.checked_add(f)?, den);
        return Some(if neg { -v } else { v });
    }
    s.parse::<i64>().ok().map(Ratio::from_integer)
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A rational-bounded interval of non-negative reals; `hi == None` is `∞`
/// and is always open.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    lo: Rational,
    lo_closed: bool,
    hi: Option<Rational>,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, lo_closed: bool, hi: Option<Rational>, hi_closed: bool) -> Result<Self> {
        if lo.is_negative() {
            return Err(Error::InvalidInterval("negative left end".into()));
        }
        match hi {
            None if hi_closed => Err(Error::InvalidInterval("infinite right end must be open".into())),
            Some(h) if h < lo => Err(Error::InvalidInterval("right end below left end".into())),
            Some(h) if h == lo && !(lo_closed && hi_closed) => {
                Err(Error::InvalidInterval("empty interval".into()))
            }
            _ => Ok(Interval {
                lo,
                lo_closed,
                hi,
                hi_closed,
            }),
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, true, Some(hi), true).expect("closed interval")
    }

    pub fn point(r: Rational) -> Self {
        Self::closed(r, r)
    }

    pub fn at_least(lo: Rational) -> Self {
        Self::new(lo, true, None, false).expect("left-closed ray")
    }

    pub fn lo(&self) -> Rational {
        self.lo
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi(&self) -> Option<Rational> {
        self.hi
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_singular(&self) -> bool {
        self.hi == Some(self.lo)
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_some()
    }

    pub fn contains(&self, q: Rational) -> bool {
        let above = if self.lo_closed { q >= self.lo } else { q > self.lo };
        let below = match self.hi {
            None => true,
            Some(h) if self.hi_closed => q <= h,
            Some(h) => q < h,
        };
        above && below
    }

    /// True when every distance beyond `q` lies outside on the right.
    pub fn exceeded_by(&self, q: Rational) -> bool {
        match self.hi {
            None => false,
            Some(h) => q > h || (q == h && !self.hi_closed),
        }
    }

    /// The largest finite endpoint; distances beyond it all behave alike.
    pub fn reach(&self) -> Rational {
        self.hi.unwrap_or(self.lo)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        match self.hi {
            None => write!(f, "{l}{},inf)", fmt_rational(&self.lo)),
            Some(h) => {
                let r = if self.hi_closed { ']' } else { ')' };
                write!(f, "{l}{},{}{r}", fmt_rational(&self.lo), fmt_rational(&h))
            }
        }
    }
}

/// Ultimately periodic sequence: `stem` followed by `cycle` forever.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lasso<T> {
    pub stem: Vec<T>,
    pub cycle: Vec<T>,
}

impl<T: Clone> Lasso<T> {
    pub fn new(stem: Vec<T>, cycle: Vec<T>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be non-empty");
        Lasso { stem, cycle }
    }

    pub fn constant(v: T) -> Self {
        Lasso::new(Vec::new(), vec![v])
    }

    pub fn stem_len(&self) -> usize {
        self.stem.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Number of distinct position classes (stem positions plus one cycle).
    pub fn span(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn get(&self, i: usize) -> &T {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Position class of `i` in `0..span()`.
    pub fn class_of(&self, i: usize) -> usize {
        if i < self.stem.len() {
            i
        } else {
            self.stem.len() + (i - self.stem.len()) % self.cycle.len()
        }
    }

    /// Successor of a position class.
    pub fn next_class(&self, c: usize) -> usize {
        if c + 1 < self.span() {
            c + 1
        } else {
            self.stem.len()
        }
    }

    /// Same sequence with a longer stem and a cycle whose length is a multiple of the current one.
    pub fn reshape(&self, stem_len: usize, cycle_len: usize) -> Self {
        assert!(stem_len >= self.stem.len());
        assert!(cycle_len.is_multiple_of(self.cycle.len()));
        let stem = (0..stem_len).map(|i| self.get(i).clone()).collect();
        let cycle = (stem_len..stem_len + cycle_len).map(|i| self.get(i).clone()).collect();
        Lasso { stem, cycle }
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(&T) -> U) -> Lasso<U> {
        Lasso {
            stem: self.stem.iter().map(&mut f).collect(),
            cycle: self.cycle.iter().map(&mut f).collect(),
        }
    }

    pub fn zip_with<U: Clone, V: Clone>(&self, other: &Lasso<U>, mut f: impl FnMut(&T, &U) -> V) -> Lasso<V> {
        let (s, c) = common_shape(&[self.shape(), other.shape()]);
        let a = self.reshape(s, c);
        let b = other.reshape(s, c);
        Lasso {
            stem: a.stem.iter().zip(&b.stem).map(|(x, y)| f(x, y)).collect(),
            cycle: a.cycle.iter().zip(&b.cycle).map(|(x, y)| f(x, y)).collect(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.stem.len(), self.cycle.len())
    }
}

impl<T: Clone + PartialEq> Lasso<T> {
    /// Shortest representation of the same infinite sequence.
    pub fn canonical(&self) -> Self {
        let n = self.cycle.len();
        let mut q = n;
        for d in 1..=n {
            if n.is_multiple_of(d) && (0..n).all(|i| self.cycle[i] == self.cycle[i % d]) {
                q = d;
                break;
            }
        }
        let mut stem = self.stem.clone();
        let mut cycle: Vec<T> = self.cycle[..q].to_vec();
        while let Some(last) = stem.last() {
            if *last == cycle[q - 1] {
                stem.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        Lasso { stem, cycle }
    }

    /// Equality of the denoted infinite sequences.
    pub fn same_sequence(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

pub fn common_shape(shapes: &[(usize, usize)]) -> (usize, usize) {
    let s = shapes.iter().map(|x| x.0).max().unwrap_or(0);
    let c = shapes.iter().map(|x| x.1).fold(1, |a, b| a.lcm(&b));
    (s, c)
}

/// Eventually periodic set of positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PositionSet(Lasso<bool>);

impl PositionSet {
    /// `stem_members` are indices below `stem_len`; `period_members` are
    /// offsets in `0..period` counted from `stem_len`.
    pub fn new(stem_members: &[usize], period_members: &[usize], stem_len: usize, period: usize) -> Self {
        assert!(period > 0);
        let mut stem = vec![false; stem_len];
        for &i in stem_members {
            assert!(i < stem_len, "stem member {i} past stem");
            stem[i] = true;
        }
        let mut cycle = vec![false; period];
        for &o in period_members {
            cycle[o % period] = true;
        }
        PositionSet(Lasso { stem, cycle }.canonical())
    }

    pub fn from_lasso(l: Lasso<bool>) -> Self {
        PositionSet(l.canonical())
    }

    pub fn empty() -> Self {
        PositionSet(Lasso::constant(false))
    }

    pub fn all() -> Self {
        PositionSet(Lasso::constant(true))
    }

    pub fn member(&self, i: usize) -> bool {
        *self.0.get(i)
    }

    pub fn lasso(&self) -> &Lasso<bool> {
        &self.0
    }

    pub fn stem_len(&self) -> usize {
        self.0.stem_len()
    }

    pub fn period(&self) -> usize {
        self.0.cycle_len()
    }

    /// True when infinitely many positions are members.
    pub fn has_periodic_members(&self) -> bool {
        self.0.cycle.iter().any(|&b| b)
    }

    pub fn stem_members(&self) -> Vec<usize> {
        (0..self.stem_len()).filter(|&i| self.0.stem[i]).collect()
    }

    pub fn period_members(&self) -> Vec<usize> {
        (0..self.period()).filter(|&o| self.0.cycle[o]).collect()
    }

    pub fn not(&self) -> Self {
        PositionSet(self.0.map(|b| !b).canonical())
    }

    pub fn and(&self, o: &Self) -> Self {
        PositionSet(self.0.zip_with(&o.0, |a, b| *a && *b).canonical())
    }

    pub fn or(&self, o: &Self) -> Self {
        PositionSet(self.0.zip_with(&o.0, |a, b| *a || *b).canonical())
    }
}

impl fmt::Display for PositionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stem: Vec<String> = self.stem_members().iter().map(|i| i.to_string()).collect();
        let per: Vec<String> = self.period_members().iter().map(|i| i.to_string()).collect();
        write!(
            f,
            "{{{}}} + {{{}}} mod {} from {}",
            stem.join(","),
            per.join(","),
            self.period(),
            self.stem_len()
        )
    }
}

/// Ultimately periodic timed word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimedLasso {
    stem: Vec<(Action, Rational)>,
    period: Vec<(Action, Rational)>,
    shift: Rational,
}

impl TimedLasso {
    pub fn new(stem: Vec<(Action, Rational)>, period: Vec<(Action, Rational)>, shift: Rational) -> Result<Self> {
        let w = TimedLasso { stem, period, shift };
        w.validate()?;
        Ok(w)
    }

    /// Builds without validation; use [`TimedLasso::validate`] to check.
    pub fn new_unchecked(stem: Vec<(Action, Rational)>, period: Vec<(Action, Rational)>, shift: Rational) -> Self {
        TimedLasso { stem, period, shift }
    }

    /// Checks monotonicity across stem, period and the wrap, non-negativity and progressiveness.
    pub fn validate(&self) -> Result<()> {
        let bad = |first, second, reason: &str| Error::InvalidLasso {
            first,
            second,
            reason: reason.into(),
        };
        if self.period.is_empty() {
            return Err(bad(self.stem.len(), self.stem.len(), "empty period"));
        }
        if self.shift <= Rational::zero() {
            return Err(bad(self.stem.len(), self.stem.len(), "period shift must be positive"));
        }
        let all: Vec<&(Action, Rational)> = self.stem.iter().chain(&self.period).collect();
        if all[0].1.is_negative() {
            return Err(bad(0, 0, "negative time"));
        }
        for i in 1..all.len() {
            if all[i].1 < all[i - 1].1 {
                return Err(bad(i - 1, i, "decreasing time"));
            }
        }
        let s = self.stem.len();
        let p = self.period.len();
        if self.period[0].1 + self.shift < self.period[p - 1].1 {
            return Err(bad(s + p - 1, s + p, "decreasing time across period wrap"));
        }
        Ok(())
    }

    pub fn stem(&self) -> &[(Action, Rational)] {
        &self.stem
    }

    pub fn period(&self) -> &[(Action, Rational)] {
        &self.period
    }

    pub fn shift(&self) -> Rational {
        self.shift
    }

    pub fn stem_len(&self) -> usize {
        self.stem.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn action(&self, i: usize) -> &Action {
        if i < self.stem.len() {
            &self.stem[i].0
        } else {
            &self.period[(i - self.stem.len()) % self.period.len()].0
        }
    }

    pub fn time(&self, i: usize) -> Rational {
        if i < self.stem.len() {
            self.stem[i].1
        } else {
            let k = (i - self.stem.len()) / self.period.len();
            let r = (i - self.stem.len()) % self.period.len();
            self.period[r].1 + self.shift * Rational::from_integer(k as i64)
        }
    }

    /// τ(j) − τ(i) for `i <= j`.
    pub fn dist(&self, i: usize, j: usize) -> Rational {
        self.time(j) - self.time(i)
    }

    /// Index of a position strictly later than `t` (progressiveness witness).
    pub fn position_after(&self, t: Rational) -> usize {
        let s = self.stem.len();
        if let Some(i) = self.stem.iter().position(|(_, u)| *u > t) {
            return i;
        }
        let base = self.period[0].1;
        let k = if t < base {
            0
        } else {
            ((t - base) / self.shift).to_integer() as usize + 1
        };
        s + k * self.period.len()
    }

    pub fn actions(&self) -> Lasso<Action> {
        Lasso::new(
            self.stem.iter().map(|x| x.0.clone()).collect(),
            self.period.iter().map(|x| x.0.clone()).collect(),
        )
    }

    pub fn alphabet(&self) -> Vec<Action> {
        let mut v: Vec<Action> = self.stem.iter().chain(&self.period).map(|x| x.0.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn is_strictly_monotone(&self) -> bool {
        let all: Vec<Rational> = (0..self.stem.len() + 2 * self.period.len()).map(|i| self.time(i)).collect();
        all.windows(2).all(|w| w[0] < w[1])
    }

    /// Same word with `copies` repetitions of the period moved into the stem.
    pub fn unroll(&self, copies: usize) -> Self {
        let n = self.stem.len() + copies * self.period.len();
        let stem = (0..n).map(|i| (self.action(i).clone(), self.time(i))).collect();
        let period = (n..n + self.period.len()).map(|i| (self.action(i).clone(), self.time(i))).collect();
        TimedLasso {
            stem,
            period,
            shift: self.shift,
        }
    }
}

impl fmt::Display for TimedLasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[(Action, Rational)]| {
            v.iter()
                .map(|(a, t)| format!("{a}@{}", fmt_rational(t)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "stem: {}", show(&self.stem))?;
        writeln!(f, "period: {}", show(&self.period))?;
        writeln!(f, "shift: {}", fmt_rational(&self.shift))
    }
}

/// Timed word with exactly one marked position, kept inside the stem.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FloatingLasso {
    word: TimedLasso,
    mark: usize,
}

impl FloatingLasso {
    pub fn new(word: TimedLasso, mark: usize) -> Self {
        let word = if mark >= word.stem_len() {
            let copies = (mark - word.stem_len()) / word.period_len() + 1;
            word.unroll(copies)
        } else {
            word
        };
        FloatingLasso { word, mark }
    }

    pub fn word(&self) -> &TimedLasso {
        &self.word
    }

    pub fn mark(&self) -> usize {
        self.mark
    }

    /// Letter of Σ×{0,1} at position `i`.
    pub fn letter(&self, i: usize) -> (&Action, bool) {
        (self.word.action(i), i == self.mark)
    }
}
