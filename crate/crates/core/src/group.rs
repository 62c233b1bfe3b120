//! Finite permutation groups acting on `Y`, the averaging operator
//! `A f(y,y') = (1/|G|) Σ_g f(gy, gy')`, and the invariant extension
//! `I = A ∘ T`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::operators::{DiagVariant, ExtensionResult, Extender, OperatorKind};
use crate::pair::{Domain, PairFunction};
use crate::space::Instance;
use crate::Scalar;

/// Tolerance for invariance of inputs to `I`.
pub const INVARIANCE_TOLERANCE: f64 = 1e-12;

/// A validated finite group of permutations; `element[i]` is the image of
/// point `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    elements: Vec<Vec<usize>>,
}

/// Non-fatal finding from [`validate_group`].
#[derive(Debug, Clone, PartialEq)]
pub enum GroupWarning {
    /// The element does not preserve the base metric at the given pair.
    NotAnIsometry { element: usize, y: usize, y2: usize },
}

impl std::fmt::Display for GroupWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupWarning::NotAnIsometry { element, y, y2 } => write!(
                f,
                "group element {element} is not an isometry of the base metric (pair {y},{y2})"
            ),
        }
    }
}

/// Checks bijectivity, identity, invariance of `X`, closure and inverses.
pub fn validate_group<S: Scalar>(
    perms: Vec<Vec<usize>>,
    inst: &Instance<S>,
) -> Result<(GroupAction, Vec<GroupWarning>)> {
    let n = inst.len();
    let mut seen = HashSet::with_capacity(perms.len());
    for (element, g) in perms.iter().enumerate() {
        let mut hit = vec![false; n];
        if g.len() != n || g.iter().any(|&i| i >= n || std::mem::replace(&mut hit[i], true)) {
            return Err(Error::NotAPermutation { element, n });
        }
        if !seen.insert(g.as_slice()) {
            return Err(Error::DuplicateGroupElement { element });
        }
    }
    let identity: Vec<usize> = (0..n).collect();
    if !seen.contains(identity.as_slice()) {
        return Err(Error::IdentityMissing);
    }
    for (element, g) in perms.iter().enumerate() {
        if let Some(&point) = inst.subset().members().iter().find(|&&x| !inst.in_subset(g[x])) {
            return Err(Error::SubsetNotInvariant { element, point });
        }
    }
    for (left, g) in perms.iter().enumerate() {
        for (right, h) in perms.iter().enumerate() {
            let gh: Vec<usize> = h.iter().map(|&i| g[i]).collect();
            if !seen.contains(gh.as_slice()) {
                return Err(Error::NotClosed { left, right });
            }
        }
        let mut inv = vec![0; n];
        for (i, &gi) in g.iter().enumerate() {
            inv[gi] = i;
        }
        if !seen.contains(inv.as_slice()) {
            return Err(Error::InverseMissing { element: left });
        }
    }
    let tol = S::lit(1e-9);
    let mut warnings = Vec::new();
    'elements: for (element, g) in perms.iter().enumerate() {
        for y in 0..n {
            for y2 in (y + 1)..n {
                if (inst.d(g[y], g[y2]) - inst.d(y, y2)).abs() > tol {
                    warnings.push(GroupWarning::NotAnIsometry { element, y, y2 });
                    continue 'elements;
                }
            }
        }
    }
    Ok((GroupAction { elements: perms }, warnings))
}

impl GroupAction {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    /// First `(g, y, y')` with `|f(gy,gy') − f(y,y')| > tol`, for `f` over `Y`.
    pub fn invariance_violation<S: Scalar>(&self, f: &PairFunction<S>, tol: S) -> Option<(usize, usize, usize)> {
        let n = f.size();
        for (gi, g) in self.elements.iter().enumerate() {
            for y in 0..n {
                for y2 in 0..n {
                    if (f.get(g[y], g[y2]) - f.get(y, y2)).abs() > tol {
                        return Some((gi, y, y2));
                    }
                }
            }
        }
        None
    }

    /// Same as [`GroupAction::invariance_violation`] for `p` over `X`; the
    /// witness uses point ids.
    pub fn subset_invariance_violation<S: Scalar>(
        &self,
        p: &PairFunction<S>,
        inst: &Instance<S>,
        tol: S,
    ) -> Option<(usize, usize, usize)> {
        let members = inst.subset().members();
        let pos = |x: usize| inst.position(x).expect("X is invariant");
        for (gi, g) in self.elements.iter().enumerate() {
            for (i, &x) in members.iter().enumerate() {
                for (j, &x2) in members.iter().enumerate() {
                    if (p.get(pos(g[x]), pos(g[x2])) - p.get(i, j)).abs() > tol {
                        return Some((gi, x, x2));
                    }
                }
            }
        }
        None
    }
}

/// Mean of `value(g)` over the group, written as `v₀ + mean(v_g − v₀)` so a
/// constant family averages to itself exactly.
fn mean_over<S: Scalar>(group: &GroupAction, reference: S, value: impl Fn(&[usize]) -> S) -> S {
    let sum = group
        .elements
        .iter()
        .fold(S::zero(), |acc, g| acc + (value(g) - reference));
    reference + sum / S::from_usize_lossy(group.order())
}

/// `A f(y,y') = (1/|G|) Σ_g f(gy, gy')` for `f` over `Y`.
pub fn average_a<S: Scalar>(f: &PairFunction<S>, group: &GroupAction) -> PairFunction<S> {
    PairFunction::from_fn(f.domain(), f.size(), |y, y2| {
        mean_over(group, f.get(y, y2), |g| f.get(g[y], g[y2]))
    })
}

/// The averaging operator restricted to functions over `X`.
pub fn average_on_subset<S: Scalar>(p: &PairFunction<S>, inst: &Instance<S>, group: &GroupAction) -> PairFunction<S> {
    let members = inst.subset().members();
    let pos = |x: usize| inst.position(x).expect("X is invariant");
    PairFunction::from_fn(Domain::OverX, p.size(), |i, j| {
        let (x, x2) = (members[i], members[j]);
        mean_over(group, p.get(i, j), |g| p.get(pos(g[x]), pos(g[x2])))
    })
}

/// `I(p) = A(T(p))` for a `G`-invariant `p` over `X`.
pub fn extend_invariant_i<S: Scalar>(
    ext: &Extender<'_, S>,
    p: &PairFunction<S>,
    group: &GroupAction,
    variant: DiagVariant,
) -> Result<ExtensionResult<S>> {
    let inst = ext.instance();
    p.expect_shape(Domain::OverX, inst.subset().len())?;
    if let Some((element, x, x2)) = group.subset_invariance_violation(p, inst, S::lit(INVARIANCE_TOLERANCE)) {
        return Err(Error::NotInvariant { element, x, x2 });
    }
    let t = ext.extend_t(p, variant)?;
    Ok(ExtensionResult {
        output: average_a(&t.output, group),
        operator: OperatorKind::I,
        ..t
    })
}
