//! Finite metric spaces normalized to diameter at most one, and the subset
//! `X ⊆ Y` the operators extend from.

use crate::error::{Error, Result};
use crate::Scalar;

/// Relative slack admitted in the triangle inequality of input metrics.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

/// A finite metric space with all distances in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<S> {
    n: usize,
    dist: Vec<S>,
    coords: Option<Vec<Vec<S>>>,
    scale: S,
}

impl<S: Scalar> FiniteMetricSpace<S> {
    /// Validates a distance matrix and rescales it by its diameter when the
    /// diameter exceeds one.
    pub fn from_distances(rows: &[Vec<S>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() || v < S::zero() {
                    return Err(Error::InvalidDistance { i, j });
                }
            }
            if rows[i][i] != S::zero() {
                return Err(Error::NonZeroDiagonal { i });
            }
        }
        let tol = S::lit(TRIANGLE_TOLERANCE);
        for i in 0..n {
            for j in 0..i {
                let (x, y) = (rows[i][j], rows[j][i]);
                if (x - y).abs() > tol * x.max(y) {
                    return Err(Error::Asymmetric { i: j, j: i });
                }
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // symmetrize within tolerance
                dist.push(if i <= j { rows[i][j] } else { rows[j][i] });
            }
        }
        Self::finish(n, dist, None)
    }

    /// Builds the Euclidean distance matrix of a point cloud.
    pub fn from_points(points: &[Vec<S>]) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let dim = points[0].len();
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::RaggedPoints {
                    index,
                    len: p.len(),
                    expected: dim,
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidDistance { i: index, j: index });
            }
        }
        let mut dist = vec![S::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = points[i]
                    .iter()
                    .zip(&points[j])
                    .fold(S::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
                    .sqrt();
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self::finish(n, dist, Some(points.to_vec()))
    }

    fn finish(n: usize, mut dist: Vec<S>, coords: Option<Vec<Vec<S>>>) -> Result<Self> {
        for i in 0..n {
            for j in (i + 1)..n {
                if dist[i * n + j] <= S::zero() {
                    return Err(Error::DuplicatePoints { i, j });
                }
            }
        }
        let slack = S::one() + S::lit(TRIANGLE_TOLERANCE);
        for i in 0..n {
            for j in 0..n {
                let dij = dist[i * n + j];
                for k in 0..n {
                    if dist[i * n + k] > (dij + dist[j * n + k]) * slack {
                        return Err(Error::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        let diameter = dist.iter().copied().fold(S::zero(), S::max);
        let scale = if diameter > S::one() {
            for d in dist.iter_mut() {
                *d = *d / diameter;
            }
            diameter
        } else {
            S::one()
        };
        Ok(Self {
            n,
            dist,
            coords,
            scale,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Normalized distance.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> S {
        self.dist[i * self.n + j]
    }

    /// Divisor applied to the raw input distances (one if none was needed).
    pub fn scale(&self) -> S {
        self.scale
    }

    /// Raw input coordinates, if the space was built from a point cloud.
    pub fn coords(&self) -> Option<&[Vec<S>]> {
        self.coords.as_deref()
    }

    pub fn diameter(&self) -> S {
        self.dist.iter().copied().fold(S::zero(), S::max)
    }
}

/// The subset `X` with its two distinguished points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSpec {
    members: Vec<usize>,
    base_a: usize,
    base_b: usize,
}

impl SubsetSpec {
    /// Members may be listed in any order; they are stored sorted.
    pub fn new(mut members: Vec<usize>, base_a: usize, base_b: usize, n: usize) -> Result<Self> {
        if let Some(&id) = members.iter().find(|&&id| id >= n) {
            return Err(Error::PointOutOfRange { id, n });
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMember { id: w[0] });
        }
        if members.len() < 2 {
            return Err(Error::SubsetTooSmall { len: members.len() });
        }
        for id in [base_a, base_b] {
            if members.binary_search(&id).is_err() {
                return Err(Error::BaseNotInSubset { id });
            }
        }
        if base_a == base_b {
            return Err(Error::BasePointsEqual { id: base_a });
        }
        Ok(Self {
            members,
            base_a,
            base_b,
        })
    }

    /// Sorted member ids.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn base_a(&self) -> usize {
        self.base_a
    }

    pub fn base_b(&self) -> usize {
        self.base_b
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A space together with a subset, plus the per-point data every operator
/// needs: position in the subset, distance to the subset and nearest member.
#[derive(Debug, Clone)]
pub struct Instance<S> {
    space: FiniteMetricSpace<S>,
    subset: SubsetSpec,
    position: Vec<Option<usize>>,
    dist_to_subset: Vec<S>,
    nearest: Vec<usize>,
}

impl<S: Scalar> Instance<S> {
    pub fn new(space: FiniteMetricSpace<S>, subset: SubsetSpec) -> Result<Self> {
        let n = space.len();
        if let Some(&id) = subset.members().iter().find(|&&id| id >= n) {
            return Err(Error::PointOutOfRange { id, n });
        }
        let mut position = vec![None; n];
        for (pos, &id) in subset.members().iter().enumerate() {
            position[id] = Some(pos);
        }
        let mut dist_to_subset = Vec::with_capacity(n);
        let mut nearest = Vec::with_capacity(n);
        for y in 0..n {
            // members are ascending, so strict `<` keeps the lowest id on ties
            let mut best = subset.members()[0];
            let mut best_d = space.d(y, best);
            for &x in &subset.members()[1..] {
                let d = space.d(y, x);
                if d < best_d {
                    best = x;
                    best_d = d;
                }
            }
            dist_to_subset.push(best_d);
            nearest.push(best);
        }
        for y in 0..n {
            assert_eq!(
                position[y].is_some(),
                dist_to_subset[y] == S::zero(),
                "d(y,X) > 0 must hold exactly off the subset"
            );
        }
        Ok(Self {
            space,
            subset,
            position,
            dist_to_subset,
            nearest,
        })
    }

    pub fn space(&self) -> &FiniteMetricSpace<S> {
        &self.space
    }

    pub fn subset(&self) -> &SubsetSpec {
        &self.subset
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> S {
        self.space.d(i, j)
    }

    pub fn base_a(&self) -> usize {
        self.subset.base_a()
    }

    pub fn base_b(&self) -> usize {
        self.subset.base_b()
    }

    #[inline]
    pub fn in_subset(&self, y: usize) -> bool {
        self.position[y].is_some()
    }

    /// Index of `y` in the sorted subset list.
    #[inline]
    pub fn position(&self, y: usize) -> Option<usize> {
        self.position[y]
    }

    /// `d(y, X) = min over x ∈ X of d(y, x)`.
    #[inline]
    pub fn dist_to_subset(&self, y: usize) -> S {
        self.dist_to_subset[y]
    }

    /// The member minimizing `d(y, ·)`, lowest id on ties.
    #[inline]
    pub fn nearest_in_subset(&self, y: usize) -> usize {
        self.nearest[y]
    }

    /// Points of `Y ∖ X`, ascending.
    pub fn outside(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&y| !self.in_subset(y))
    }

    pub fn outside_count(&self) -> usize {
        self.len() - self.subset.len()
    }
}

/// Raw geometry accepted by [`load_space`].
#[derive(Debug, Clone)]
pub enum SpaceSource<S> {
    Points(Vec<Vec<S>>),
    Distances(Vec<Vec<S>>),
}

/// Validates geometry and subset and assembles an [`Instance`].
pub fn load_space<S: Scalar>(
    source: &SpaceSource<S>,
    members: Vec<usize>,
    base_a: usize,
    base_b: usize,
) -> Result<Instance<S>> {
    let space = match source {
        SpaceSource::Points(p) => FiniteMetricSpace::from_points(p)?,
        SpaceSource::Distances(d) => FiniteMetricSpace::from_distances(d)?,
    };
    let subset = SubsetSpec::new(members, base_a, base_b, space.len())?;
    Instance::new(space, subset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_i1() -> Instance<f64> {
        let pts = vec![vec![0.0], vec![1.0], vec![0.4], vec![0.6]];
        load_space(&SpaceSource::Points(pts), vec![0, 1], 0, 1).unwrap()
    }

    #[test]
    fn i1_loads_unscaled() {
        let inst = line_i1();
        assert_eq!(inst.space().scale(), 1.0);
        assert_eq!(inst.space().diameter(), 1.0);
    }

    #[test]
    fn wide_points_are_normalized() {
        let s = FiniteMetricSpace::from_points(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(s.scale(), 2.0);
        assert_eq!(s.d(0, 1), 1.0);
    }

    #[test]
    fn triangle_violation_has_witness() {
        let rows = vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        assert_eq!(
            FiniteMetricSpace::from_distances(&rows).unwrap_err(),
            Error::TriangleViolation { i: 0, j: 1, k: 2 }
        );
    }

    #[test]
    fn rejects_malformed_matrices() {
        let dup = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert_eq!(
            FiniteMetricSpace::from_distances(&dup).unwrap_err(),
            Error::DuplicatePoints { i: 0, j: 1 }
        );
        let asym = vec![vec![0.0, 0.5], vec![0.6, 0.0]];
        assert!(matches!(
            FiniteMetricSpace::from_distances(&asym).unwrap_err(),
            Error::Asymmetric { .. }
        ));
        let diag = vec![vec![0.1, 0.5], vec![0.5, 0.0]];
        assert_eq!(
            FiniteMetricSpace::from_distances(&diag).unwrap_err(),
            Error::NonZeroDiagonal { i: 0 }
        );
        let neg = vec![vec![0.0, -0.5], vec![-0.5, 0.0]];
        assert!(FiniteMetricSpace::from_distances(&neg).is_err());
        let ragged = vec![vec![0.0, 0.5], vec![0.5]];
        assert!(matches!(
            FiniteMetricSpace::from_distances(&ragged).unwrap_err(),
            Error::NotSquare { .. }
        ));
        assert_eq!(
            FiniteMetricSpace::<f64>::from_points(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap_err(),
            Error::DuplicatePoints { i: 0, j: 1 }
        );
    }

    #[test]
    fn subset_validation() {
        assert_eq!(
            SubsetSpec::new(vec![0], 0, 0, 3).unwrap_err(),
            Error::SubsetTooSmall { len: 1 }
        );
        assert_eq!(
            SubsetSpec::new(vec![0, 1], 1, 1, 3).unwrap_err(),
            Error::BasePointsEqual { id: 1 }
        );
        assert_eq!(
            SubsetSpec::new(vec![0, 1], 0, 2, 3).unwrap_err(),
            Error::BaseNotInSubset { id: 2 }
        );
        assert_eq!(
            SubsetSpec::new(vec![0, 5], 0, 5, 3).unwrap_err(),
            Error::PointOutOfRange { id: 5, n: 3 }
        );
        assert_eq!(
            SubsetSpec::new(vec![1, 0, 1], 0, 1, 3).unwrap_err(),
            Error::DuplicateMember { id: 1 }
        );
        let s = SubsetSpec::new(vec![2, 0], 2, 0, 3).unwrap();
        assert_eq!(s.members(), &[0, 2]);
    }

    #[test]
    fn distance_to_subset_on_i1() {
        let inst = line_i1();
        assert!((inst.dist_to_subset(2) - 0.4).abs() < 1e-15);
        assert_eq!(inst.dist_to_subset(0), 0.0);
        assert!((inst.dist_to_subset(3) - 0.4).abs() < 1e-15);
        assert_eq!(inst.nearest_in_subset(2), 0);
        assert_eq!(inst.nearest_in_subset(3), 1);
        assert_eq!(inst.position(1), Some(1));
        assert_eq!(inst.outside().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn nearest_ties_go_to_lowest_id() {
        let pts = vec![vec![0.0], vec![1.0], vec![0.5]];
        let inst = load_space(&SpaceSource::Points(pts), vec![1, 0], 1, 0).unwrap();
        assert_eq!(inst.nearest_in_subset(2), 0);
        assert_eq!(inst.dist_to_subset(2), 0.5);
    }

    #[test]
    fn nearest_realizes_distance() {
        let inst = line_i1();
        for y in 0..inst.len() {
            for &x in inst.subset().members() {
                assert!(inst.dist_to_subset(y) <= inst.d(y, x));
            }
            assert_eq!(inst.dist_to_subset(y), inst.d(y, inst.nearest_in_subset(y)));
        }
    }

    #[test]
    fn generic_over_f32() {
        let pts = vec![vec![0.0f32], vec![1.0], vec![0.4], vec![0.6]];
        let inst = load_space(&SpaceSource::Points(pts), vec![0, 1], 0, 1).unwrap();
        assert!((inst.dist_to_subset(3) - 0.4).abs() < 1e-6);
    }
}
