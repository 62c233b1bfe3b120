//! Seeded generators for test inputs and instances.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::instance_file::InstanceFile;
use crate::pair::{Domain, PairFunction};
use crate::Scalar;

/// Replaces every entry by the shortest-path distance through the matrix
/// (Floyd–Warshall).
pub fn shortest_path_closure(m: &mut [Vec<f64>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = m[i][k] + m[k][j];
                if through < m[i][j] {
                    m[i][j] = through;
                }
            }
        }
    }
}

fn symmetric_matrix<R: Rng>(rng: &mut R, size: usize, mut entry: impl FnMut(&mut R) -> f64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in (i + 1)..size {
            let v = entry(rng);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// Random metric with values in `[0.1, 1]` before closure.
pub fn random_metric_rows<R: Rng>(rng: &mut R, size: usize) -> Vec<Vec<f64>> {
    let mut m = symmetric_matrix(rng, size, |r| r.gen_range(0.1..=1.0));
    shortest_path_closure(&mut m);
    m
}

/// Random pseudometric: nonnegative symmetric entries, a fraction of them
/// zero, closed under shortest paths.
pub fn random_pseudometric_rows<R: Rng>(rng: &mut R, size: usize, zero_fraction: f64) -> Vec<Vec<f64>> {
    let mut m = symmetric_matrix(rng, size, |r| {
        if r.gen_bool(zero_fraction) {
            0.0
        } else {
            r.gen_range(0.0..=1.0)
        }
    });
    shortest_path_closure(&mut m);
    m
}

fn to_pair<S: Scalar>(domain: Domain, rows: &[Vec<f64>]) -> PairFunction<S> {
    PairFunction::from_fn(domain, rows.len(), |i, j| S::lit(rows[i][j]))
}

pub fn random_metric<S: Scalar, R: Rng>(rng: &mut R, domain: Domain, size: usize) -> PairFunction<S> {
    to_pair(domain, &random_metric_rows(rng, size))
}

pub fn random_pseudometric<S: Scalar, R: Rng>(rng: &mut R, domain: Domain, size: usize) -> PairFunction<S> {
    to_pair(domain, &random_pseudometric_rows(rng, size, 0.25))
}

/// Independent uniform entries in `[lo, hi)`; no symmetry.
pub fn random_pair_function<S: Scalar, R: Rng>(
    rng: &mut R,
    domain: Domain,
    size: usize,
    lo: f64,
    hi: f64,
) -> PairFunction<S> {
    PairFunction::from_fn(domain, size, |_, _| S::lit(rng.gen_range(lo..hi)))
}

/// Geometry of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Uniform points in the unit cube of the given dimension.
    Points { dim: usize },
    /// A random metric closed under shortest paths.
    Matrix,
}

/// Random instance with a random subset of `subset_size` points; `a`, `b`
/// are the two smallest members and `p` is a random metric over the subset.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, subset_size: usize, mode: GenMode) -> Result<InstanceFile> {
    if subset_size < 2 || subset_size > n {
        return Err(Error::InvalidParameter(format!(
            "subset size must satisfy 2 <= |X| <= n, got |X| = {subset_size}, n = {n}"
        )));
    }
    let (points, distances) = match mode {
        GenMode::Points { dim } => {
            if dim == 0 {
                return Err(Error::InvalidParameter("dimension must be positive".into()));
            }
            let pts = (0..n)
                .map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect())
                .collect();
            (Some(pts), None)
        }
        GenMode::Matrix => (None, Some(random_metric_rows(rng, n))),
    };
    let mut subset = sample(rng, n, subset_size).into_vec();
    subset.sort_unstable();
    let p = random_metric_rows(rng, subset_size);
    Ok(InstanceFile {
        points,
        distances,
        a: subset[0],
        b: subset[1],
        subset,
        group: None,
        p: Some(p),
    })
}

/// Kind of planar symmetry group for [`random_symmetric_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    Cyclic,
    Dihedral,
}

fn rotate(p: [f64; 2], angle: f64, reflect: bool) -> [f64; 2] {
    let (x, y) = if reflect { (p[0], -p[1]) } else { (p[0], p[1]) };
    let (s, c) = angle.sin_cos();
    [c * x - s * y, s * x + c * y]
}

/// Planar point cloud invariant under the cyclic or dihedral group of order
/// `k` or `2k`: `X` is a regular `k`-gon on the unit circle, the remaining
/// points are generic orbits inside it (and possibly the center). The group is
/// listed element by element and `p` is a random metric on `X` averaged over
/// the group.
pub fn random_symmetric_instance<R: Rng>(rng: &mut R, k: usize, kind: SymmetryKind, extra_orbits: usize) -> InstanceFile {
    assert!(k >= 2);
    let step = 2.0 * PI / k as f64;
    let mut points: Vec<[f64; 2]> = (0..k).map(|j| rotate([1.0, 0.0], step * j as f64, false)).collect();
    let mut radii = Vec::new();
    for _ in 0..extra_orbits {
        // distinct radii keep orbits apart
        let r = loop {
            let r: f64 = rng.gen_range(0.2..0.85);
            if radii.iter().all(|&q: &f64| (q - r).abs() > 0.05) {
                break r;
            }
        };
        radii.push(r);
        let phi = rng.gen_range(0.15..0.85) * step / 2.0;
        let seed = [r * phi.cos(), r * phi.sin()];
        for j in 0..k {
            points.push(rotate(seed, step * j as f64, false));
        }
        if kind == SymmetryKind::Dihedral {
            for j in 0..k {
                points.push(rotate(seed, step * j as f64, true));
            }
        }
    }
    if rng.gen_bool(0.5) {
        points.push([0.0, 0.0]);
    }

    let mut transforms = Vec::new();
    for j in 0..k {
        transforms.push((step * j as f64, false));
        if kind == SymmetryKind::Dihedral {
            transforms.push((step * j as f64, true));
        }
    }
    let group: Vec<Vec<usize>> = transforms
        .iter()
        .map(|&(angle, reflect)| {
            points
                .iter()
                .map(|&pt| {
                    let img = rotate(pt, angle, reflect);
                    points
                        .iter()
                        .position(|q| (q[0] - img[0]).hypot(q[1] - img[1]) < 1e-9)
                        .expect("point cloud is invariant")
                })
                .collect()
        })
        .collect();

    let q = random_metric_rows(rng, k);
    let order = group.len() as f64;
    let p: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| group.iter().map(|g| q[g[i]][g[j]]).sum::<f64>() / order)
                .collect()
        })
        .collect();

    InstanceFile {
        points: Some(points.iter().map(|p| p.to_vec()).collect()),
        distances: None,
        subset: (0..k).collect(),
        a: 0,
        b: 1,
        group: Some(group),
        p: Some(p),
    }
}

/// Random symmetric instance with `k ∈ 3..=6`, random kind and one or two
/// extra orbits, at most 30 points.
pub fn random_group_instance<R: Rng>(rng: &mut R) -> InstanceFile {
    let k = rng.gen_range(3..=6);
    let kind = if rng.gen_bool(0.5) {
        SymmetryKind::Cyclic
    } else {
        SymmetryKind::Dihedral
    };
    let per_orbit = if kind == SymmetryKind::Dihedral { 2 * k } else { k };
    // keep n <= 30 including the optional center
    let max_extra = ((29 - k) / per_orbit).clamp(1, 2);
    let extra = rng.gen_range(1..=max_extra);
    random_symmetric_instance(rng, k, kind, extra)
}
