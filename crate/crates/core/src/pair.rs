use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// Which product a pair function lives on.
///
/// Functions over `X` are indexed by position in the sorted subset list;
/// functions over `Y` by point id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    OverX,
    OverY,
}

/// A real-valued function on a finite product `Z × Z`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFunction<S> {
    domain: Domain,
    size: usize,
    values: Vec<S>,
}

impl<S: Scalar> PairFunction<S> {
    pub fn new(domain: Domain, size: usize, values: Vec<S>) -> Result<Self> {
        if values.len() != size * size {
            return Err(Error::ShapeMismatch {
                expected: format!("{size}x{size}"),
                found: format!("{} entries", values.len()),
            });
        }
        Ok(Self {
            domain,
            size,
            values,
        })
    }

    pub fn from_rows(domain: Domain, rows: &[Vec<S>]) -> Result<Self> {
        let size = rows.len();
        if let Some(row) = rows.iter().find(|r| r.len() != size) {
            return Err(Error::ShapeMismatch {
                expected: format!("{size}x{size}"),
                found: format!("a row of length {}", row.len()),
            });
        }
        Self::new(domain, size, rows.iter().flatten().copied().collect())
    }

    pub fn from_fn(domain: Domain, size: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut values = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                values.push(f(i, j));
            }
        }
        Self {
            domain,
            size,
            values,
        }
    }

    pub fn constant(domain: Domain, size: usize, c: S) -> Self {
        Self {
            domain,
            size,
            values: vec![c; size * size],
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.values[i * self.size + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.values[i * self.size + j] = value;
    }

    pub fn as_slice(&self) -> &[S] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.values.chunks(self.size.max(1)).map(<[S]>::to_vec).collect()
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            domain: self.domain,
            size: self.size,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `alpha·self + beta·other`, entrywise.
    pub fn combine(&self, alpha: S, other: &Self, beta: S) -> Result<Self> {
        self.expect_same_shape(other)?;
        Ok(Self {
            domain: self.domain,
            size: self.size,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| alpha * x + beta * y)
                .collect(),
        })
    }

    pub fn expect_shape(&self, domain: Domain, size: usize) -> Result<()> {
        if self.domain != domain || self.size != size {
            return Err(Error::ShapeMismatch {
                expected: format!("{domain:?} {size}x{size}"),
                found: format!("{:?} {}x{}", self.domain, self.size, self.size),
            });
        }
        Ok(())
    }

    fn expect_same_shape(&self, other: &Self) -> Result<()> {
        other.expect_shape(self.domain, self.size)
    }

    pub fn max_abs(&self) -> S {
        self.values.iter().fold(S::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> Option<S> {
        self.values.iter().copied().reduce(S::min)
    }

    pub fn max_value(&self) -> Option<S> {
        self.values.iter().copied().reduce(S::max)
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<S> {
        self.expect_same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(S::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }

    pub fn frobenius_diff(&self, other: &Self) -> Result<S> {
        self.expect_same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(S::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt())
    }

    /// Exact (bitwise) symmetry.
    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_f64(&self) -> PairFunction<f64> {
        PairFunction {
            domain: self.domain,
            size: self.size,
            values: self.values.iter().map(|v| v.as_f64()).collect(),
        }
    }
}
