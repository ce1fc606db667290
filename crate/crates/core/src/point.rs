use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of the ambient inner-product space, stored as coordinates.
///
/// Symmetric matrices are carried in their isometric vectorization (see
/// [`crate::linalg::SymMat::to_point`]), so the plain dot product here is the
/// Frobenius inner product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Point(coords))
    }

    /// Caller guarantees finiteness.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        dot(&self.0, &self.0).sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    pub fn scaled(&self, s: f64) -> Point {
        Point(self.0.iter().map(|c| c * s).collect())
    }

    /// `self + s * other`; panics on dimension mismatch.
    pub fn axpy(&self, s: f64, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim(), "axpy dimension mismatch");
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    pub fn add(&self, other: &Point) -> Point {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.axpy(-1.0, other)
    }

    pub fn normalized(&self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(1.0 / n))
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.sub(other).norm()
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// Euclidean inner product of coordinates.
pub fn inner(a: &Point, b: &Point) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(dot(&a.0, &b.0))
}

/// Sums in index order so that `dot(a, b)` and `dot(b, a)` agree bit for bit.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}
