//! Step functions `[0,1) → L` and exact integration of pair functions along
//! two of them.
//!
//! The integral `∫₀¹ q(f(t), g(t)) dt` of a pair function `q` along step
//! functions `f` and `g` is computed on the common refinement of their
//! breakpoints, so it is exact up to floating-point summation.

use std::collections::BTreeSet;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// A value of a step function: either a point of the subset `X` or an element
/// of the level-`n` mesh cover.
///
/// Cover elements at different levels never compare equal, since they belong
/// to disjoint alphabets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    XPoint(usize),
    CoverElement { level: u32, index: usize },
}

impl Label {
    pub fn is_point(&self) -> bool {
        matches!(self, Label::XPoint(_))
    }
}

/// A piecewise constant function on `[0,1)` in canonical form.
///
/// Breakpoints satisfy `0 = t₀ < t₁ < … < t_k = 1` and interval `[tᵢ₋₁, tᵢ)`
/// carries `values[i-1]`. Adjacent intervals never carry equal values.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<S, L = Label> {
    breakpoints: Vec<S>,
    values: Vec<L>,
}

impl<S: Scalar, L: Clone + PartialEq> StepFunction<S, L> {
    pub fn constant(value: L) -> Self {
        Self {
            breakpoints: vec![S::zero(), S::one()],
            values: vec![value],
        }
    }

    /// Builds a canonical step function, dropping zero-width intervals and
    /// merging equal neighbours.
    pub fn new(breakpoints: Vec<S>, values: Vec<L>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidStepFunction(format!(
                "need at least two breakpoints, got {}",
                breakpoints.len()
            )));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidStepFunction(format!(
                "{} breakpoints require {} values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        if breakpoints.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidStepFunction("non-finite breakpoint".into()));
        }
        if breakpoints[0] != S::zero() {
            return Err(Error::InvalidStepFunction(format!(
                "first breakpoint is {}, expected 0",
                breakpoints[0]
            )));
        }
        if *breakpoints.last().unwrap() != S::one() {
            return Err(Error::InvalidStepFunction(format!(
                "last breakpoint is {}, expected 1",
                breakpoints.last().unwrap()
            )));
        }
        if let Some(i) = breakpoints.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidStepFunction(format!(
                "breakpoints decrease at position {}",
                i + 1
            )));
        }
        Ok(Self::canonicalize(breakpoints, values))
    }

    /// Builds a step function from consecutive `(width, value)` pieces.
    ///
    /// Widths must be nonnegative and sum to one up to rounding; the last
    /// breakpoint is pinned to exactly one and intermediate breakpoints are
    /// clamped into `[0,1]`.
    pub fn from_pieces<I>(pieces: I) -> Self
    where
        I: IntoIterator<Item = (S, L)>,
    {
        let mut breakpoints = vec![S::zero()];
        let mut values = Vec::new();
        let mut t = S::zero();
        for (width, value) in pieces {
            debug_assert!(width >= S::zero());
            t = (t + width).min(S::one());
            breakpoints.push(t);
            values.push(value);
        }
        assert!(!values.is_empty(), "step function needs at least one piece");
        *breakpoints.last_mut().unwrap() = S::one();
        Self::canonicalize(breakpoints, values)
    }

    fn canonicalize(breakpoints: Vec<S>, values: Vec<L>) -> Self {
        let mut bps = vec![S::zero()];
        let mut vals: Vec<L> = Vec::with_capacity(values.len());
        for (i, value) in values.into_iter().enumerate() {
            let (lo, hi) = (breakpoints[i], breakpoints[i + 1]);
            if hi <= lo {
                continue;
            }
            match vals.last() {
                Some(last) if *last == value => *bps.last_mut().unwrap() = hi,
                _ => {
                    bps.push(hi);
                    vals.push(value);
                }
            }
        }
        Self {
            breakpoints: bps,
            values: vals,
        }
    }

    /// Places `first` on `[0, s)` and `second` on `[s, 1)`, both linearly
    /// rescaled in time. `s ≤ 0` yields `second`, `s ≥ 1` yields `first`.
    pub fn splice(first: &Self, second: &Self, s: S) -> Self {
        if s <= S::zero() {
            return second.clone();
        }
        if s >= S::one() {
            return first.clone();
        }
        let rest = S::one() - s;
        let mut breakpoints = Vec::with_capacity(first.breakpoints.len() + second.breakpoints.len());
        breakpoints.extend(first.breakpoints[..first.breakpoints.len() - 1].iter().map(|&t| t * s));
        breakpoints.push(s);
        breakpoints.extend(second.breakpoints[1..].iter().map(|&t| s + t * rest));
        *breakpoints.last_mut().unwrap() = S::one();
        // s + t(1-s) can round below the spliced point for tiny t
        for i in 1..breakpoints.len() {
            if breakpoints[i] < breakpoints[i - 1] {
                breakpoints[i] = breakpoints[i - 1];
            }
        }
        let values = first.values.iter().chain(second.values.iter()).cloned().collect();
        Self::canonicalize(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[L] {
        &self.values
    }

    /// Number of constant pieces.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    /// `(width, value)` for every piece, in order.
    pub fn pieces(&self) -> impl Iterator<Item = (S, &L)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.iter())
            .map(|(w, v)| (w[1] - w[0], v))
    }

    /// Value at `t ∈ [0,1)`.
    pub fn eval(&self, t: S) -> &L {
        let idx = self.breakpoints[1..].partition_point(|&b| b <= t);
        &self.values[idx.min(self.values.len() - 1)]
    }

    /// The set of values taken, `f([0,1))`.
    pub fn support(&self) -> BTreeSet<L>
    where
        L: Ord,
    {
        self.values.iter().cloned().collect()
    }
}

/// Iterator over the common refinement of two step functions.
pub struct Refinement<'a, S, L> {
    f: &'a StepFunction<S, L>,
    g: &'a StepFunction<S, L>,
    i: usize,
    j: usize,
    t: S,
}

impl<'a, S: Scalar, L> Iterator for Refinement<'a, S, L> {
    type Item = (S, &'a L, &'a L);

    fn next(&mut self) -> Option<Self::Item> {
        while self.i < self.f.values.len() && self.j < self.g.values.len() {
            let end_f = self.f.breakpoints[self.i + 1];
            let end_g = self.g.breakpoints[self.j + 1];
            let end = end_f.min(end_g);
            let width = end - self.t;
            let item = (width, &self.f.values[self.i], &self.g.values[self.j]);
            if end_f <= end_g {
                self.i += 1;
            }
            if end_g <= end_f {
                self.j += 1;
            }
            self.t = end;
            if width > S::zero() {
                return Some(item);
            }
        }
        None
    }
}

/// Lazily walks the common refinement of `f` and `g`.
pub fn refinement<'a, S: Scalar, L>(
    f: &'a StepFunction<S, L>,
    g: &'a StepFunction<S, L>,
) -> Refinement<'a, S, L> {
    Refinement {
        f,
        g,
        i: 0,
        j: 0,
        t: S::zero(),
    }
}

/// Common refinement as `(width, value of f, value of g)` triples.
pub fn refine_pair<S: Scalar, L: Clone>(
    f: &StepFunction<S, L>,
    g: &StepFunction<S, L>,
) -> Vec<(S, L, L)> {
    refinement(f, g)
        .map(|(w, a, b)| (w, a.clone(), b.clone()))
        .collect()
}

/// `∫₀¹ q(f(t), g(t)) dt` for a partial pair function `q`.
pub fn integrate_pair<S, L, Q>(mut q: Q, f: &StepFunction<S, L>, g: &StepFunction<S, L>) -> Result<S>
where
    S: Scalar,
    L: Debug,
    Q: FnMut(&L, &L) -> Option<S>,
{
    let mut total = S::zero();
    for (width, a, b) in refinement(f, g) {
        let value = q(a, b).ok_or_else(|| Error::UndefinedPair {
            left: format!("{a:?}"),
            right: format!("{b:?}"),
        })?;
        total = total + width * value;
    }
    Ok(total)
}

/// [`integrate_pair`] for a total pair function.
pub fn integrate_total<S, L, Q>(mut q: Q, f: &StepFunction<S, L>, g: &StepFunction<S, L>) -> S
where
    S: Scalar,
    Q: FnMut(&L, &L) -> S,
{
    refinement(f, g).fold(S::zero(), |acc, (width, a, b)| acc + width * q(a, b))
}
