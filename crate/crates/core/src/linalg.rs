//! Small dense symmetric linear algebra: the isometric vectorization of
//! symmetric matrices and a cyclic Jacobi eigensolver. Matrices in scope are
//! at most 8x8.

use std::f64::consts::SQRT_2;

use rand::Rng;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::rng::gaussian_vec;

const JACOBI_MAX_SWEEPS: usize = 50;
const JACOBI_OFF_TOL: f64 = 1e-12;

/// Square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        Mat { n, a }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            a.extend_from_slice(r);
        }
        Ok(Mat { n, a })
    }

    pub fn from_cols(cols: &[Vec<f64>]) -> Result<Self> {
        let t = Mat::from_rows(cols)?;
        let n = t.n;
        let mut m = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, t.get(j, i));
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.a[i * self.n..(i + 1) * self.n].to_vec()
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// max |Q^T Q - I|
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| self.get(k, i) * self.get(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Haar-ish random orthogonal matrix: Gram-Schmidt (twice) on a Gaussian matrix.
    pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
        loop {
            let mut cols: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vec(rng, n)).collect();
            let mut ok = true;
            for j in 0..n {
                for _ in 0..2 {
                    for k in 0..j {
                        let proj: f64 = (0..n).map(|i| cols[j][i] * cols[k][i]).sum();
                        for i in 0..n {
                            cols[j][i] -= proj * cols[k][i];
                        }
                    }
                }
                let norm = cols[j].iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-8 {
                    ok = false;
                    break;
                }
                cols[j].iter_mut().for_each(|x| *x /= norm);
            }
            if ok {
                let mut m = Mat::identity(n);
                for (j, c) in cols.iter().enumerate() {
                    for (i, &v) in c.iter().enumerate() {
                        m.set(i, j, v);
                    }
                }
                return m;
            }
        }
    }
}

/// Symmetric matrix with full row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMat {
    n: usize,
    a: Vec<f64>,
}

/// Eigenvalues ascending; `vectors` holds the matching unit eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.col(k)
    }

    /// `Q diag(values) Q^T` with the values replaced by `g(value)`.
    pub fn recompose_with(&self, g: impl Fn(f64) -> f64) -> SymMat {
        let lams: Vec<f64> = self.values.iter().map(|&l| g(l)).collect();
        self.recompose(&lams)
    }

    /// `Q diag(lams) Q^T` for caller-supplied eigenvalues.
    pub fn recompose(&self, lams: &[f64]) -> SymMat {
        let n = self.values.len();
        assert_eq!(lams.len(), n);
        let mut out = SymMat::zeros(n);
        for k in 0..n {
            let lam = lams[k];
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = self.vectors.get(i, k);
                for j in i..n {
                    let v = out.get(i, j) + lam * qi * self.vectors.get(j, k);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Rejects matrices that are not symmetric to 1e-12.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = Mat::from_rows(rows)?;
        let n = m.n;
        for i in 0..n {
            for j in 0..i {
                if (m.get(i, j) - m.get(j, i)).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(SymMat { n, a: m.a })
    }

    /// `v v^T`
    pub fn outer(v: &[f64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, v[i] * v[j]);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Writes both (i,j) and (j,i).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `x^T A x`
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let av = self.matvec(v);
        av.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `Q^T A Q`
    pub fn congruence_t(&self, q: &Mat) -> SymMat {
        let n = self.n;
        let mut out = SymMat::zeros(n);
        let cols: Vec<Vec<f64>> = (0..n).map(|j| q.col(j)).collect();
        for i in 0..n {
            let aqi = self.matvec(&cols[i]);
            for j in i..n {
                out.set(i, j, aqi.iter().zip(&cols[j]).map(|(a, b)| a * b).sum());
            }
        }
        out
    }

    /// `Q A Q^T`
    pub fn congruence(&self, q: &Mat) -> SymMat {
        let n = self.n;
        let mut qt = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                qt.set(i, j, q.get(j, i));
            }
        }
        self.congruence_t(&qt)
    }

    pub fn vec_dim(n: usize) -> usize {
        n * (n + 1) / 2
    }

    /// Inverse of [`SymMat::vec_dim`].
    pub fn order_from_vec_dim(len: usize) -> Option<usize> {
        let n = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
        (Self::vec_dim(n) == len).then_some(n)
    }

    /// Diagonal first, then the strictly-upper entries (row-major) times sqrt(2).
    pub fn to_vec(&self) -> Vec<f64> {
        let n = self.n;
        let mut v = Vec::with_capacity(Self::vec_dim(n));
        for i in 0..n {
            v.push(self.get(i, i));
        }
        for i in 0..n {
            for j in i + 1..n {
                v.push(SQRT_2 * self.get(i, j));
            }
        }
        v
    }

    pub fn to_point(&self) -> Point {
        Point::from_vec_unchecked(self.to_vec())
    }

    pub fn from_slice(n: usize, v: &[f64]) -> Result<Self> {
        if v.len() != Self::vec_dim(n) {
            return Err(Error::DimensionMismatch {
                expected: Self::vec_dim(n),
                got: v.len(),
            });
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, v[i]);
        }
        let mut k = n;
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, v[k] / SQRT_2);
                k += 1;
            }
        }
        Ok(m)
    }

    pub fn from_point(n: usize, p: &Point) -> Result<Self> {
        Self::from_slice(n, p.coords())
    }

    fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    }

    /// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops to
    /// 1e-12 (relative to max(1, |A|_F)) or 50 sweeps have run.
    pub fn eigh(&self) -> Eigen {
        let n = self.n;
        let mut a = self.a.clone();
        let mut v = Mat::identity(n);
        let tol = JACOBI_OFF_TOL * self.frobenius_norm().max(1.0);
        let mut polish = false;
        for _ in 0..JACOBI_MAX_SWEEPS {
            if Self::off_diagonal_norm(&a, n) <= tol {
                // one extra sweep: convergence is quadratic, so this lands at roundoff
                if polish {
                    break;
                }
                polish = true;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = if theta.is_finite() {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    } else {
                        0.0
                    };
                    if t == 0.0 {
                        a[p * n + q] = 0.0;
                        a[q * n + p] = 0.0;
                        continue;
                    }
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    // exact zero by construction
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
        let values: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
        let mut vectors = Mat::identity(n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = v.col(src);
            // deterministic sign: largest-magnitude entry positive
            let (imax, _) = col.iter().enumerate().fold((0, -1.0), |(bi, bv), (i, &x)| {
                if x.abs() > bv + 1e-14 {
                    (i, x.abs())
                } else {
                    (bi, bv)
                }
            });
            if col[imax] < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            for i in 0..n {
                vectors.set(i, dst, col[i]);
            }
        }
        Eigen { values, vectors }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match self.n {
            0 => 0.0,
            1 => self.get(0, 0),
            2 => {
                let (a, b, c) = (self.get(0, 0), self.get(0, 1), self.get(1, 1));
                let mean = 0.5 * (a + c);
                let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                mean - rad
            }
            _ => self.eigh().values[0],
        }
    }

    /// Nearest PSD matrix in Frobenius norm: clamp eigenvalues at zero.
    pub fn project_psd(&self) -> SymMat {
        self.eigh().recompose_with(|l| l.max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;

    fn sym(rows: &[&[f64]]) -> SymMat {
        SymMat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn eigen_of_2x2_by_hand() {
        let m = sym(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let e = m.eigh();
        assert!((e.values[0] + 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
        assert!((m.min_eigenvalue() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_random_matrices() {
        let mut rng = RngSeed(3).rng();
        for n in 1..=8 {
            for _ in 0..20 {
                let g = gaussian_vec(&mut rng, n * n);
                let mut m = SymMat::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        m.set(i, j, g[i * n + j]);
                    }
                }
                let e = m.eigh();
                assert!(e.vectors.orthonormality_defect() < 1e-12);
                let back = e.recompose_with(|l| l);
                for (x, y) in back.a.iter().zip(&m.a) {
                    assert!((x - y).abs() < 1e-11, "n={n}");
                }
                assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
                assert!((m.min_eigenvalue() - e.values[0]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn identity_eigenvectors_are_identity() {
        let e = SymMat::diag(&[1.0, 0.0]).eigh();
        assert_eq!(e.values, vec![0.0, 1.0]);
        assert_eq!(e.vector(1), vec![1.0, 0.0]);
        assert_eq!(e.vector(0), vec![0.0, 1.0]);
    }

    #[test]
    fn vectorization_is_an_isometry() {
        let mut rng = RngSeed(11).rng();
        for _ in 0..100 {
            let n = 3;
            let mut x = SymMat::zeros(n);
            let mut y = SymMat::zeros(n);
            let gx = gaussian_vec(&mut rng, 9);
            let gy = gaussian_vec(&mut rng, 9);
            for i in 0..n {
                for j in i..n {
                    x.set(i, j, gx[i * n + j]);
                    y.set(i, j, gy[i * n + j]);
                }
            }
            let mut tr = 0.0;
            for i in 0..n {
                for k in 0..n {
                    tr += x.get(i, k) * y.get(k, i);
                }
            }
            let ip = crate::point::inner(&x.to_point(), &y.to_point()).unwrap();
            assert!((ip - tr).abs() <= 1e-12);
            let back = SymMat::from_point(n, &x.to_point()).unwrap();
            for (a, b) in back.a.iter().zip(&x.a) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn vec_dim_inverse() {
        for n in 1..10 {
            assert_eq!(SymMat::order_from_vec_dim(SymMat::vec_dim(n)), Some(n));
        }
        assert_eq!(SymMat::order_from_vec_dim(4), None);
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = RngSeed(5).rng();
        for n in 1..=6 {
            let q = Mat::random_orthogonal(n, &mut rng);
            assert!(q.orthonormality_defect() < 1e-12);
        }
    }

    #[test]
    fn projection_clamps_negative_eigenvalues() {
        let p = SymMat::diag(&[1.0, -1.0]).project_psd();
        assert_eq!(p.to_vec(), vec![1.0, 0.0, 0.0]);
    }
}
