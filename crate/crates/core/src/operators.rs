//! The extension operators.
//!
//! `T = Σₙ 2⁻ⁿ Tₙ` where `Tₙ(p)(y,y') = ∫₀¹ E(p)(fₙ(y)(t), fₙ(y')(t)) dt`.
//! On a finite instance every `Tₙ(p)(y,y')` is constant from the
//! stabilization level `N` on, so the series is summed exactly as
//! `Σ_{n≤N} 2⁻ⁿ Tₙ + 2⁻ᴺ·tail`, evaluated in Horner form from the tail down.
//!
//! `S(p)(y,y') = ∫₀¹ p(h(y)(t), h(y')(t)) dt`, `S₁ = S + p(a,b)·d*` and
//! `S₂ = S + (p(a,b) − p(a,a))·d*`, with `d*(y,y') = min(d(y,y'), d(y,X) + d(y',X))`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covers::{self, MeshCoverFamily};
use crate::dugundji::{build_inner_cover, InnerCover, WeightedCover};
use crate::error::{Error, Result};
use crate::group::{self, GroupAction};
use crate::hm::{integrate_total, Label, StepFunction};
use crate::pair::{Domain, PairFunction};
use crate::space::Instance;
use crate::Scalar;

/// Value of `E(p)` on a pair of equal cover elements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagVariant {
    /// Equal cover elements map to `0`.
    PaperZero,
    /// Equal cover elements map to `p(a,a)`.
    #[default]
    BaseDiagonal,
}

impl fmt::Display for DiagVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagVariant::PaperZero => "paper-zero",
            DiagVariant::BaseDiagonal => "base-diagonal",
        })
    }
}

impl FromStr for DiagVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-zero" => Ok(DiagVariant::PaperZero),
            "base-diagonal" => Ok(DiagVariant::BaseDiagonal),
            other => Err(Error::InvalidParameter(format!("unknown diagonal variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    T,
    S,
    S1,
    S2,
    I,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 5] = [
        OperatorKind::T,
        OperatorKind::S,
        OperatorKind::S1,
        OperatorKind::S2,
        OperatorKind::I,
    ];

    pub fn s_family(self) -> Option<SFamily> {
        match self {
            OperatorKind::S => Some(SFamily::S),
            OperatorKind::S1 => Some(SFamily::S1),
            OperatorKind::S2 => Some(SFamily::S2),
            _ => None,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::T => "T",
            OperatorKind::S => "S",
            OperatorKind::S1 => "S1",
            OperatorKind::S2 => "S2",
            OperatorKind::I => "I",
        })
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T" => Ok(OperatorKind::T),
            "S" => Ok(OperatorKind::S),
            "S1" => Ok(OperatorKind::S1),
            "S2" => Ok(OperatorKind::S2),
            "I" => Ok(OperatorKind::I),
            _ => Err(Error::InvalidParameter(format!("unknown operator `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SFamily {
    S,
    S1,
    S2,
}

impl From<SFamily> for OperatorKind {
    fn from(which: SFamily) -> Self {
        match which {
            SFamily::S => OperatorKind::S,
            SFamily::S1 => OperatorKind::S1,
            SFamily::S2 => OperatorKind::S2,
        }
    }
}

/// An extended pair function over `Y` with the data needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionResult<S> {
    pub output: PairFunction<S>,
    pub operator: OperatorKind,
    /// Stabilization level `N` of the instance.
    pub stabilization_level: u32,
    /// Per-pair tail values (series operators only).
    pub tails: Option<PairFunction<S>>,
    pub variant: DiagVariant,
    pub scale: S,
}

/// `E(p)` on `X ⊔ 𝒰`, with the per-point sums it needs precomputed.
///
/// Clauses are tried in order: both points, point/element, element/point,
/// distinct elements, equal elements.
pub struct ExtendedPair<'a, S> {
    inst: &'a Instance<S>,
    p: &'a PairFunction<S>,
    variant: DiagVariant,
    pab: S,
    paa: S,
    /// `½p(x,a) + ½p(x,b)` by subset position.
    row_mean: Vec<S>,
    /// `½p(a,x) + ½p(b,x)` by subset position.
    col_mean: Vec<S>,
}

impl<'a, S: Scalar> ExtendedPair<'a, S> {
    pub fn new(inst: &'a Instance<S>, p: &'a PairFunction<S>, variant: DiagVariant) -> Self {
        let a = inst.position(inst.base_a()).expect("base point a in subset");
        let b = inst.position(inst.base_b()).expect("base point b in subset");
        let half = S::half();
        let m = p.size();
        Self {
            inst,
            p,
            variant,
            pab: p.get(a, b),
            paa: p.get(a, a),
            row_mean: (0..m).map(|x| half * p.get(x, a) + half * p.get(x, b)).collect(),
            col_mean: (0..m).map(|x| half * p.get(a, x) + half * p.get(b, x)).collect(),
        }
    }

    #[inline]
    fn pos(&self, x: usize) -> usize {
        self.inst
            .position(x)
            .unwrap_or_else(|| panic!("label refers to point {x} outside the subset"))
    }

    #[inline]
    pub fn value(&self, l1: &Label, l2: &Label) -> S {
        match (l1, l2) {
            (Label::XPoint(x), Label::XPoint(y)) => self.p.get(self.pos(*x), self.pos(*y)),
            (Label::XPoint(x), Label::CoverElement { .. }) => self.row_mean[self.pos(*x)],
            (Label::CoverElement { .. }, Label::XPoint(y)) => self.col_mean[self.pos(*y)],
            (u, v) if u != v => self.pab,
            _ => match self.variant {
                DiagVariant::PaperZero => S::zero(),
                DiagVariant::BaseDiagonal => self.paa,
            },
        }
    }
}

/// `E(p)(l1, l2)`.
pub fn eval_e<S: Scalar>(
    inst: &Instance<S>,
    p: &PairFunction<S>,
    l1: &Label,
    l2: &Label,
    variant: DiagVariant,
) -> S {
    ExtendedPair::new(inst, p, variant).value(l1, l2)
}

/// Smallest `N` such that for every `n ≥ N`: `n·d(y,X) ≥ 1` for all `y ∉ X`,
/// and `2⁻ⁿ` is below every distance between two points not both in `X`.
pub fn stabilization_index<S: Scalar>(inst: &Instance<S>) -> u32 {
    let min_out = inst
        .outside()
        .map(|y| inst.dist_to_subset(y))
        .fold(S::infinity(), S::min);
    if !min_out.is_finite() {
        return 1;
    }
    let reaches = |n: u32| S::from_u32(n).expect("level fits scalar") * min_out >= S::one();
    let mut n_split = (S::one() / min_out).ceil().to_u32().unwrap_or(u32::MAX).max(1);
    while !reaches(n_split) {
        n_split += 1;
    }
    while n_split > 1 && reaches(n_split - 1) {
        n_split -= 1;
    }

    let mut sep = S::infinity();
    for i in 0..inst.len() {
        for j in (i + 1)..inst.len() {
            if !(inst.in_subset(i) && inst.in_subset(j)) {
                sep = sep.min(inst.d(i, j));
            }
        }
    }
    let mut n_mesh = 1;
    while S::pow2_neg(n_mesh) >= sep {
        n_mesh += 1;
    }
    n_split.max(n_mesh)
}

/// `d*(y,y') = min(d(y,y'), d(y,X) + d(y',X))`.
pub fn dstar<S: Scalar>(inst: &Instance<S>, y: usize, y2: usize) -> S {
    inst.d(y, y2)
        .min(inst.dist_to_subset(y) + inst.dist_to_subset(y2))
}

/// Evaluates the operators on one instance, caching covers.
///
/// Mesh covers are built before any parallel pair evaluation starts.
pub struct Extender<'a, S> {
    inst: &'a Instance<S>,
    inner: InnerCover<S>,
    mesh: MeshCoverFamily<S>,
    stabilization: u32,
    point_levels: Vec<u32>,
}

/// Per point, the first level from which `fₙ(y)` is a single cover element
/// (or, on `X`, the point itself), capped at the global index.
fn point_levels<S: Scalar>(inst: &Instance<S>, global: u32) -> Vec<u32> {
    (0..inst.len())
        .map(|y| {
            if inst.in_subset(y) {
                return 1;
            }
            let nearest_other = (0..inst.len())
                .filter(|&z| z != y)
                .map(|z| inst.d(y, z))
                .fold(S::infinity(), S::min);
            (1..global)
                .find(|&n| {
                    covers::splice_point(inst, y, n) >= S::one() && covers::mesh_radius::<S>(n) <= nearest_other
                })
                .unwrap_or(global)
        })
        .collect()
}

impl<'a, S: Scalar> Extender<'a, S> {
    pub fn new(inst: &'a Instance<S>) -> Self {
        let stabilization = stabilization_index(inst);
        Self {
            inst,
            inner: build_inner_cover(inst),
            mesh: MeshCoverFamily::new(),
            stabilization,
            point_levels: point_levels(inst, stabilization),
        }
    }

    pub fn instance(&self) -> &'a Instance<S> {
        self.inst
    }

    pub fn inner_cover(&self) -> &InnerCover<S> {
        &self.inner
    }

    pub fn stabilization_level(&self) -> u32 {
        self.stabilization
    }

    /// Level `K ≤ N` from which `Tₙ(p)(y, y')` equals the tail value for
    /// every `p`; the series for this entry is summed from `K` down.
    pub fn pair_stabilization_level(&self, y: usize, y2: usize) -> u32 {
        self.point_levels[y].max(self.point_levels[y2])
    }

    pub fn mesh_cover(&self, level: u32) -> Arc<WeightedCover<S>> {
        self.mesh.level(self.inst.space(), level)
    }

    pub fn mesh_family(&self) -> &MeshCoverFamily<S> {
        &self.mesh
    }

    pub fn map_u(&self, y: usize) -> BTreeSet<usize> {
        self.inner.map_u(self.inst, y)
    }

    pub fn map_h(&self, y: usize) -> StepFunction<S> {
        self.inner.map_h(self.inst, y)
    }

    pub fn map_hn(&self, y: usize, level: u32) -> StepFunction<S> {
        covers::map_hn(&self.mesh_cover(level), y, level)
    }

    pub fn map_fn(&self, y: usize, level: u32) -> StepFunction<S> {
        covers::map_fn(self.inst, &self.inner, &self.mesh_cover(level), y, level)
    }

    fn all_fn(&self, level: u32) -> Vec<StepFunction<S>> {
        let cover = self.mesh_cover(level);
        (0..self.inst.len())
            .into_par_iter()
            .map(|y| covers::map_fn(self.inst, &self.inner, &cover, y, level))
            .collect()
    }

    fn check_input(&self, p: &PairFunction<S>) -> Result<()> {
        p.expect_shape(Domain::OverX, self.inst.subset().len())
    }

    pub fn eval_e(&self, p: &PairFunction<S>, l1: &Label, l2: &Label, variant: DiagVariant) -> S {
        eval_e(self.inst, p, l1, l2, variant)
    }

    /// `Tₙ(p)(y, y')`.
    pub fn compute_tn(&self, p: &PairFunction<S>, y: usize, y2: usize, level: u32, variant: DiagVariant) -> S {
        let e = ExtendedPair::new(self.inst, p, variant);
        integrate_total(|l1, l2| e.value(l1, l2), &self.map_fn(y, level), &self.map_fn(y2, level))
    }

    fn tail_label(&self, y: usize) -> Label {
        if self.inst.in_subset(y) {
            Label::XPoint(y)
        } else {
            Label::CoverElement {
                level: self.stabilization,
                index: y,
            }
        }
    }

    /// The constant value of `Tₙ(p)(y, y')` for `n ≥ N`.
    pub fn tail_value(&self, p: &PairFunction<S>, y: usize, y2: usize, variant: DiagVariant) -> S {
        ExtendedPair::new(self.inst, p, variant).value(&self.tail_label(y), &self.tail_label(y2))
    }

    /// `T(p)`, summed exactly.
    pub fn extend_t(&self, p: &PairFunction<S>, variant: DiagVariant) -> Result<ExtensionResult<S>> {
        self.check_input(p)?;
        let n = self.inst.len();
        let e = ExtendedPair::new(self.inst, p, variant);
        let tails = PairFunction::from_fn(Domain::OverY, n, |y, y2| {
            e.value(&self.tail_label(y), &self.tail_label(y2))
        });
        let symmetric = p.is_symmetric();
        let half = S::half();
        let mut acc = tails.as_slice().to_vec();
        let deepest = self.point_levels.iter().copied().max().unwrap_or(1);
        for level in (1..=deepest).rev() {
            let fs = self.all_fn(level);
            acc.par_chunks_mut(n.max(1)).enumerate().for_each(|(y, row)| {
                let start = if symmetric { y } else { 0 };
                for y2 in start..n {
                    if self.pair_stabilization_level(y, y2) >= level {
                        let tn = integrate_total(|l1, l2| e.value(l1, l2), &fs[y], &fs[y2]);
                        row[y2] = (tn + row[y2]) * half;
                    }
                }
            });
        }
        if symmetric {
            for y in 0..n {
                for y2 in 0..y {
                    acc[y * n + y2] = acc[y2 * n + y];
                }
            }
        }
        Ok(ExtensionResult {
            output: PairFunction::new(Domain::OverY, n, acc)?,
            operator: OperatorKind::T,
            stabilization_level: self.stabilization,
            tails: Some(tails),
            variant,
            scale: self.inst.space().scale(),
        })
    }

    /// One entry of `T(p)`, computed with the same arithmetic as
    /// [`Extender::extend_t`].
    pub fn t_entry(&self, p: &PairFunction<S>, y: usize, y2: usize, variant: DiagVariant) -> S {
        let e = ExtendedPair::new(self.inst, p, variant);
        let half = S::half();
        let mut acc = e.value(&self.tail_label(y), &self.tail_label(y2));
        for level in (1..=self.pair_stabilization_level(y, y2)).rev() {
            let tn = integrate_total(|l1, l2| e.value(l1, l2), &self.map_fn(y, level), &self.map_fn(y2, level));
            acc = (tn + acc) * half;
        }
        acc
    }

    /// For `M = 1..=depth`: `Σ_{n≤M} 2⁻ⁿ Tₙ(p)(y,y') + 2⁻ᴹ·tail`, with the
    /// `Tₙ` evaluated directly at every level (no stabilization shortcut).
    pub fn partial_sums(
        &self,
        p: &PairFunction<S>,
        y: usize,
        y2: usize,
        depth: u32,
        variant: DiagVariant,
    ) -> Vec<S> {
        let e = ExtendedPair::new(self.inst, p, variant);
        let tail = e.value(&self.tail_label(y), &self.tail_label(y2));
        let mut sum = S::zero();
        (1..=depth)
            .map(|level| {
                let tn = integrate_total(|l1, l2| e.value(l1, l2), &self.map_fn(y, level), &self.map_fn(y2, level));
                sum = sum + S::pow2_neg(level) * tn;
                sum + S::pow2_neg(level) * tail
            })
            .collect()
    }

    /// Matrix of `Σ_{n≤depth} 2⁻ⁿ Tₙ(p) + 2⁻ᵈᵉᵖᵗʰ·tail`, for diagnostics.
    pub fn partial_sum_matrix(&self, p: &PairFunction<S>, depth: u32, variant: DiagVariant) -> Result<PairFunction<S>> {
        Ok(self.partial_sum_range(p, depth, depth, variant)?.pop().expect("one depth"))
    }

    /// [`Extender::partial_sum_matrix`] for every depth in `from..=to`, in one
    /// pass over the levels. Every `Tₙ` is evaluated directly.
    pub fn partial_sum_range(
        &self,
        p: &PairFunction<S>,
        from: u32,
        to: u32,
        variant: DiagVariant,
    ) -> Result<Vec<PairFunction<S>>> {
        self.check_input(p)?;
        if from == 0 || from > to {
            return Err(Error::InvalidParameter(format!("depth range {from}..={to} must start at 1 or more")));
        }
        let n = self.inst.len();
        let e = ExtendedPair::new(self.inst, p, variant);
        let tails: Vec<S> = (0..n * n)
            .map(|k| e.value(&self.tail_label(k / n), &self.tail_label(k % n)))
            .collect();
        let mut sum = vec![S::zero(); n * n];
        let mut out = Vec::new();
        for level in 1..=to {
            let fs = self.all_fn(level);
            let w = S::pow2_neg(level);
            sum.par_chunks_mut(n.max(1)).enumerate().for_each(|(y, row)| {
                for y2 in 0..n {
                    row[y2] = row[y2] + w * integrate_total(|l1, l2| e.value(l1, l2), &fs[y], &fs[y2]);
                }
            });
            if level >= from {
                let values = sum.iter().zip(&tails).map(|(&s, &t)| s + w * t).collect();
                out.push(PairFunction::new(Domain::OverY, n, values)?);
            }
        }
        Ok(out)
    }

    pub fn dstar(&self, y: usize, y2: usize) -> S {
        dstar(self.inst, y, y2)
    }

    /// `S(p)`, `S₁(p)` or `S₂(p)`.
    pub fn extend_s_family(&self, p: &PairFunction<S>, which: SFamily) -> Result<ExtensionResult<S>> {
        self.check_input(p)?;
        let n = self.inst.len();
        let hs: Vec<StepFunction<S>> = (0..n).map(|y| self.map_h(y)).collect();
        let pos = |l: &Label| match l {
            Label::XPoint(x) => self.inst.position(*x).expect("h takes values in X"),
            Label::CoverElement { .. } => unreachable!("h takes values in X"),
        };
        let a = self.inst.position(self.inst.base_a()).expect("a in subset");
        let b = self.inst.position(self.inst.base_b()).expect("b in subset");
        let coeff = match which {
            SFamily::S => None,
            SFamily::S1 => Some(p.get(a, b)),
            SFamily::S2 => Some(p.get(a, b) - p.get(a, a)),
        };
        let output = PairFunction::from_fn(Domain::OverY, n, |y, y2| {
            let s = integrate_total(|l1, l2| p.get(pos(l1), pos(l2)), &hs[y], &hs[y2]);
            match coeff {
                None => s,
                Some(c) => s + c * self.dstar(y, y2),
            }
        });
        Ok(ExtensionResult {
            output,
            operator: which.into(),
            stabilization_level: self.stabilization,
            tails: None,
            variant: DiagVariant::default(),
            scale: self.inst.space().scale(),
        })
    }

    /// `{a, b} ∪ supp h(y) ∪ supp h(y')`: the subset points whose mutual
    /// values of `p` can influence the `(y, y')` entry.
    pub fn locality_set(&self, y: usize, y2: usize) -> BTreeSet<usize> {
        let mut set = BTreeSet::from([self.inst.base_a(), self.inst.base_b()]);
        for z in [y, y2] {
            for label in self.map_h(z).support() {
                if let Label::XPoint(x) = label {
                    set.insert(x);
                }
            }
        }
        set
    }

    /// Applies the named operator. `I` requires a group.
    pub fn extend(
        &self,
        op: OperatorKind,
        p: &PairFunction<S>,
        variant: DiagVariant,
        group: Option<&GroupAction>,
    ) -> Result<ExtensionResult<S>> {
        match op {
            OperatorKind::T => self.extend_t(p, variant),
            OperatorKind::I => {
                let g = group.ok_or(Error::GroupRequired)?;
                group::extend_invariant_i(self, p, g, variant)
            }
            other => self.extend_s_family(p, other.s_family().expect("S-family operator")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{load_space, SpaceSource};

    fn i1() -> Instance<f64> {
        let pts = vec![vec![0.0], vec![1.0], vec![0.4], vec![0.6]];
        load_space(&SpaceSource::Points(pts), vec![0, 1], 0, 1).unwrap()
    }

    /// `p(0,1) = p(1,0) = 1`, zero diagonal.
    fn unit_metric() -> PairFunction<f64> {
        PairFunction::from_rows(Domain::OverX, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    const COVER: Label = Label::CoverElement { level: 1, index: 2 };
    const COVER2: Label = Label::CoverElement { level: 1, index: 3 };

    #[test]
    fn e_clauses() {
        let inst = i1();
        let p = unit_metric();
        let v = DiagVariant::BaseDiagonal;
        assert_eq!(eval_e(&inst, &p, &Label::XPoint(0), &COVER, v), 0.5);
        assert_eq!(eval_e(&inst, &p, &COVER, &Label::XPoint(1), v), 0.5);
        assert_eq!(eval_e(&inst, &p, &COVER, &COVER2, v), 1.0);
        assert_eq!(eval_e(&inst, &p, &Label::XPoint(0), &Label::XPoint(1), v), 1.0);
        assert_eq!(eval_e(&inst, &p, &COVER, &COVER, v), 0.0);
        // different levels are different elements
        let other_level = Label::CoverElement { level: 2, index: 2 };
        assert_eq!(eval_e(&inst, &p, &COVER, &other_level, v), 1.0);

        let mut p5 = p.clone();
        p5.set(0, 0, 5.0);
        assert_eq!(eval_e(&inst, &p5, &COVER, &COVER, DiagVariant::BaseDiagonal), 5.0);
        assert_eq!(eval_e(&inst, &p5, &COVER, &COVER, DiagVariant::PaperZero), 0.0);
        // the point clause wins on the X diagonal
        assert_eq!(eval_e(&inst, &p5, &Label::XPoint(0), &Label::XPoint(0), DiagVariant::PaperZero), 5.0);
    }

    #[test]
    fn stabilization_on_i1_and_degenerate_cases() {
        assert_eq!(stabilization_index(&i1()), 3);
        let pts = vec![vec![0.0], vec![1.0]];
        let inst = load_space(&SpaceSource::Points(pts), vec![0, 1], 0, 1).unwrap();
        assert_eq!(stabilization_index(&inst), 1);
        let pts = vec![vec![0.0], vec![1.0], vec![0.95]];
        let inst = load_space(&SpaceSource::Points(pts), vec![0, 1], 0, 1).unwrap();
        assert!(stabilization_index(&inst) >= 20);
    }

    #[test]
    fn pair_levels_never_exceed_global() {
        let inst = i1();
        let ext = Extender::new(&inst);
        assert_eq!(ext.pair_stabilization_level(0, 1), 1);
        assert_eq!(ext.pair_stabilization_level(0, 2), 3);
        // one point very close to X: only its pairs need the deep levels
        let pts = vec![vec![0.0], vec![1.0], vec![0.5], vec![0.999]];
        let inst = load_space(&SpaceSource::Points(pts), vec![0, 1], 0, 1).unwrap();
        let ext = Extender::new(&inst);
        let big_n = ext.stabilization_level();
        assert!(big_n >= 1000);
        assert_eq!(ext.pair_stabilization_level(3, 0), big_n);
        assert!(ext.pair_stabilization_level(2, 0) < 10);
        let p: PairFunction<f64> = PairFunction::from_rows(Domain::OverX, &[vec![0.3, -1.0], vec![2.0, 0.1]]).unwrap();
        let v = DiagVariant::BaseDiagonal;
        let t = ext.extend_t(&p, v).unwrap().output;
        let full = ext.partial_sum_matrix(&p, big_n, v).unwrap();
        for y in 0..4 {
            for y2 in 0..4 {
                assert!((t.get(y, y2) - full.get(y, y2)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tn_on_i1() {
        let inst = i1();
        let ext = Extender::new(&inst);
        let p = unit_metric();
        let v = DiagVariant::BaseDiagonal;
        for level in 1..6 {
            assert_eq!(ext.compute_tn(&p, 0, 1, level, v), 1.0);
        }
        assert_eq!(ext.compute_tn(&p, 0, 3, 3, v), 0.5);
        assert_eq!(ext.compute_tn(&p, 2, 3, 3, v), 1.0);
    }

    #[test]
    fn tails_on_i1() {
        let inst = i1();
        let ext = Extender::new(&inst);
        let mut p = unit_metric();
        let v = DiagVariant::BaseDiagonal;
        assert_eq!(ext.tail_value(&p, 2, 3, v), 1.0);
        assert_eq!(ext.tail_value(&p, 0, 3, v), 0.5);
        assert_eq!(ext.tail_value(&p, 3, 0, v), 0.5);
        assert_eq!(ext.tail_value(&p, 2, 2, v), 0.0);
        p.set(0, 0, 0.25);
        assert_eq!(ext.tail_value(&p, 2, 2, v), 0.25);
        assert_eq!(ext.tail_value(&p, 2, 2, DiagVariant::PaperZero), 0.0);
    }

    #[test]
    fn t_on_i1() {
        let inst = i1();
        let ext = Extender::new(&inst);
        let p = unit_metric();
        let t = ext.extend_t(&p, DiagVariant::BaseDiagonal).unwrap();
        assert_eq!(t.stabilization_level, 3);
        assert_eq!(t.output.get(0, 1), 1.0);
        assert_eq!(t.output.get(1, 0), 1.0);
        for y in 0..4 {
            assert_eq!(t.output.get(y, y), 0.0);
        }
        for y in 0..4 {
            for y2 in 0..4 {
                assert_eq!(t.output.get(y, y2), ext.t_entry(&p, y, y2, DiagVariant::BaseDiagonal));
            }
        }
    }

    #[test]
    fn dstar_on_i1() {
        let inst = i1();
        assert!((dstar(&inst, 2, 3) - 0.2).abs() < 1e-15);
        assert_eq!(dstar(&inst, 0, 1), 0.0);
        assert!((dstar(&inst, 0, 2) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn s_family_witnesses_on_i1() {
        let inst = i1();
        let ext = Extender::new(&inst);
        let p = unit_metric();
        let s = ext.extend_s_family(&p, SFamily::S).unwrap().output;
        assert_eq!(s.get(2, 0), 0.0);
        let s1 = ext.extend_s_family(&p, SFamily::S1).unwrap().output;
        assert!((s1.get(2, 0) - 0.4).abs() < 1e-15);
        let c = PairFunction::constant(Domain::OverX, 2, 3.0);
        let s1c = ext.extend_s_family(&c, SFamily::S1).unwrap().output;
        assert!((s1c.get(0, 2) - 3.0 * 1.4).abs() < 1e-12);
        let s2c = ext.extend_s_family(&c, SFamily::S2).unwrap().output;
        assert!(s2c.as_slice().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn wrong_shape_rejected() {
        let inst = i1();
        let ext = Extender::new(&inst);
        let p = PairFunction::constant(Domain::OverX, 3, 1.0);
        assert!(matches!(ext.extend_t(&p, DiagVariant::BaseDiagonal), Err(Error::ShapeMismatch { .. })));
        let p = PairFunction::constant(Domain::OverY, 2, 1.0);
        assert!(ext.extend_s_family(&p, SFamily::S).is_err());
        assert_eq!(
            ext.extend(OperatorKind::I, &unit_metric(), DiagVariant::BaseDiagonal, None),
            Err(Error::GroupRequired)
        );
    }

    #[test]
    fn parse_names() {
        assert_eq!("s1".parse::<OperatorKind>().unwrap(), OperatorKind::S1);
        assert_eq!("paper-zero".parse::<DiagVariant>().unwrap(), DiagVariant::PaperZero);
        assert!("X".parse::<OperatorKind>().is_err());
        assert_eq!(DiagVariant::default().to_string(), "base-diagonal");
    }
}
