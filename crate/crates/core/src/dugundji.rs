//! Ball covers with hat-function partitions of unity, and the Dugundji-style
//! inner cover of `Y ∖ X` that defines the maps `u: Y → finite subsets of X`
//! and `h: Y → HM(X)`.

use std::collections::BTreeSet;

use crate::hm::{Label, StepFunction};
use crate::space::{FiniteMetricSpace, Instance};
use crate::Scalar;

/// An open ball used as a cover element.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverBall<S> {
    pub center: usize,
    pub radius: S,
    /// Eligible points strictly inside the ball, ascending.
    pub members: Vec<usize>,
}

/// Cover elements ordered by center id, with a partition of unity.
///
/// `weights_at(y)` lists `(element index, weight)` with every weight positive,
/// only on elements whose member set contains `y`, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCover<S> {
    elements: Vec<CoverBall<S>>,
    weights: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> WeightedCover<S> {
    /// One ball per `(center, radius)`; a point belongs to a ball when it is
    /// `eligible` and strictly closer than the radius. Weights are the hat
    /// values `max(0, 1 - d/r)` normalized per point.
    pub fn from_balls(
        space: &FiniteMetricSpace<S>,
        mut balls: Vec<(usize, S)>,
        eligible: impl Fn(usize) -> bool,
    ) -> Self {
        balls.sort_by_key(|b| b.0);
        let n = space.len();
        let elements: Vec<CoverBall<S>> = balls
            .into_iter()
            .map(|(center, radius)| CoverBall {
                center,
                radius,
                members: (0..n)
                    .filter(|&z| eligible(z) && space.d(z, center) < radius)
                    .collect(),
            })
            .collect();

        let mut weights: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
        for (index, e) in elements.iter().enumerate() {
            for &z in &e.members {
                let hat = S::one() - space.d(z, e.center) / e.radius;
                if hat > S::zero() {
                    weights[z].push((index, hat));
                }
            }
        }
        for w in weights.iter_mut() {
            let total = w.iter().fold(S::zero(), |acc, &(_, v)| acc + v);
            for entry in w.iter_mut() {
                entry.1 = entry.1 / total;
            }
        }
        Self { elements, weights }
    }

    /// Cover of `n` points by their own singleton balls, each with weight 1.
    pub fn singletons(n: usize, radius: S) -> Self {
        Self {
            elements: (0..n)
                .map(|center| CoverBall {
                    center,
                    radius,
                    members: vec![center],
                })
                .collect(),
            weights: (0..n).map(|i| vec![(i, S::one())]).collect(),
        }
    }

    pub fn elements(&self) -> &[CoverBall<S>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Sparse partition-of-unity weights at point `y`, in element order.
    pub fn weights_at(&self, y: usize) -> &[(usize, S)] {
        &self.weights[y]
    }

    pub fn covers(&self, y: usize) -> bool {
        !self.weights[y].is_empty()
    }

    /// Largest pairwise distance inside any element.
    pub fn max_element_diameter(&self, space: &FiniteMetricSpace<S>) -> S {
        self.elements
            .iter()
            .flat_map(|e| {
                e.members
                    .iter()
                    .flat_map(move |&i| e.members.iter().map(move |&j| (i, j)))
            })
            .fold(S::zero(), |m, (i, j)| m.max(space.d(i, j)))
    }

    /// Step function whose pieces have widths `λ_U(y)` in element order.
    pub(crate) fn step_at<L: Clone + PartialEq>(&self, y: usize, label: impl Fn(usize) -> L) -> StepFunction<S, L> {
        StepFunction::from_pieces(self.weights[y].iter().map(|&(idx, w)| (w, label(idx))))
    }
}

/// The inner cover of `Y ∖ X` together with `α: cover elements → X`.
#[derive(Debug, Clone)]
pub struct InnerCover<S> {
    cover: WeightedCover<S>,
    alpha: Vec<usize>,
}

/// Radius of the inner-cover ball around `y ∉ X`, as a fraction of `d(y, X)`.
pub const INNER_RADIUS_FRACTION: f64 = 0.25;

/// One ball of radius `d(y,X)/4` around every `y ∉ X`, restricted to `Y ∖ X`;
/// `α` sends each ball to the subset point nearest its center.
pub fn build_inner_cover<S: Scalar>(inst: &Instance<S>) -> InnerCover<S> {
    let fraction = S::lit(INNER_RADIUS_FRACTION);
    let balls = inst
        .outside()
        .map(|y| (y, inst.dist_to_subset(y) * fraction))
        .collect();
    let cover = WeightedCover::from_balls(inst.space(), balls, |z| !inst.in_subset(z));
    let alpha = cover
        .elements()
        .iter()
        .map(|e| inst.nearest_in_subset(e.center))
        .collect();
    InnerCover { cover, alpha }
}

impl<S: Scalar> InnerCover<S> {
    pub fn cover(&self) -> &WeightedCover<S> {
        &self.cover
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    /// `u(y)`: `{y}` on `X`; otherwise `α(U)` for every ball whose closure
    /// (`d ≤ r`) contains `y`.
    pub fn map_u(&self, inst: &Instance<S>, y: usize) -> BTreeSet<usize> {
        if inst.in_subset(y) {
            return BTreeSet::from([y]);
        }
        self.cover
            .elements()
            .iter()
            .zip(&self.alpha)
            .filter(|(e, _)| inst.d(y, e.center) <= e.radius)
            .map(|(_, &x)| x)
            .collect()
    }

    /// `h(y)`: the constant `y` on `X`; otherwise the step function taking
    /// value `α(U)` on a piece of width `λ_U(y)`, in element order.
    pub fn map_h(&self, inst: &Instance<S>, y: usize) -> StepFunction<S> {
        if inst.in_subset(y) {
            return StepFunction::constant(Label::XPoint(y));
        }
        self.cover.step_at(y, |idx| Label::XPoint(self.alpha[idx]))
    }
}
