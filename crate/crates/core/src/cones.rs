//! The three concrete self-dual cones: the nonnegative orthant, the PSD
//! matrices (vectorized), and the Lorentz (circular) cone.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMat;
use crate::point::{dot, Point};
use crate::rng::{gaussian_vec, RngSeed};

/// Default absolute membership tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Pairings below this count as self-duality violations.
pub const DUALITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cone {
    /// `[0, inf)^d`
    Orthant(usize),
    /// `n x n` positive semidefinite matrices, ambient dimension `n(n+1)/2`.
    Psd(usize),
    /// `{x in R^{d+1} : x_0 >= |x_{>=1}|}`; coordinate 0 is the axis.
    Lorentz(usize),
}

impl Cone {
    pub fn orthant(d: usize) -> Result<Cone> {
        Self::checked(Cone::Orthant(d))
    }

    pub fn psd(n: usize) -> Result<Cone> {
        Self::checked(Cone::Psd(n))
    }

    pub fn lorentz(d: usize) -> Result<Cone> {
        Self::checked(Cone::Lorentz(d))
    }

    fn checked(c: Cone) -> Result<Cone> {
        let k = match c {
            Cone::Orthant(k) | Cone::Psd(k) | Cone::Lorentz(k) => k,
        };
        if k == 0 {
            return Err(Error::InvalidParameter(format!(
                "{c}: dimension must be positive"
            )));
        }
        Ok(c)
    }

    pub fn ambient_dim(&self) -> usize {
        match *self {
            Cone::Orthant(d) => d,
            Cone::Psd(n) => SymMat::vec_dim(n),
            Cone::Lorentz(d) => d + 1,
        }
    }

    pub(crate) fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        self.check_dim(x.coords())?;
        Ok(self.contains_slice(x.coords(), tol))
    }

    pub(crate) fn contains_slice(&self, x: &[f64], tol: f64) -> bool {
        match *self {
            Cone::Orthant(_) => x.iter().all(|&c| c >= -tol),
            Cone::Psd(n) => {
                // nonnegative diagonal is necessary; skips most eigen solves on grids
                if x[..n].iter().any(|&c| c < -tol) {
                    return false;
                }
                psd_of(n, x).min_eigenvalue() >= -tol
            }
            Cone::Lorentz(_) => x[0] >= -tol && tail_norm(x) <= x[0] + tol,
        }
    }

    pub fn interior_contains(&self, x: &Point, tol: f64) -> Result<bool> {
        self.check_dim(x.coords())?;
        Ok(self.interior_contains_slice(x.coords(), tol))
    }

    pub(crate) fn interior_contains_slice(&self, x: &[f64], tol: f64) -> bool {
        match *self {
            Cone::Orthant(_) => x.iter().all(|&c| c > tol),
            Cone::Psd(n) => psd_of(n, x).min_eigenvalue() > tol,
            Cone::Lorentz(_) => x[0] > tol && tail_norm(x) < x[0] - tol,
        }
    }

    /// `x ⪯ y` iff `y - x` lies in the cone.
    pub fn order_leq(&self, x: &Point, y: &Point, tol: f64) -> Result<bool> {
        self.check_dim(x.coords())?;
        self.check_dim(y.coords())?;
        let diff: Vec<f64> = y
            .coords()
            .iter()
            .zip(x.coords())
            .map(|(b, a)| b - a)
            .collect();
        Ok(self.contains_slice(&diff, tol))
    }

    /// Euclidean projection onto the cone.
    pub fn project(&self, x: &Point) -> Result<Point> {
        self.check_dim(x.coords())?;
        Ok(Point::from_vec_unchecked(self.project_slice(x.coords())))
    }

    pub(crate) fn project_slice(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            Cone::Orthant(_) => x.iter().map(|&c| c.max(0.0)).collect(),
            Cone::Psd(n) => psd_of(n, x).project_psd().to_vec(),
            Cone::Lorentz(_) => {
                let s = tail_norm(x);
                let x0 = x[0];
                if s <= x0 {
                    x.to_vec()
                } else if s <= -x0 {
                    vec![0.0; x.len()]
                } else {
                    let alpha = 0.5 * (x0 + s);
                    let mut out = Vec::with_capacity(x.len());
                    out.push(alpha);
                    out.extend(x[1..].iter().map(|&c| alpha * c / s));
                    out
                }
            }
        }
    }

    /// A canonical interior point: all-ones, the identity, or the axis `e_0`.
    pub fn unit_element(&self) -> Point {
        let v = match *self {
            Cone::Orthant(d) => vec![1.0; d],
            Cone::Psd(n) => SymMat::identity(n).to_vec(),
            Cone::Lorentz(d) => {
                let mut v = vec![0.0; d + 1];
                v[0] = 1.0;
                v
            }
        };
        Point::from_vec_unchecked(v)
    }

    /// For `x` outside the cone, an explicit member `y` with `<x, y> < 0`;
    /// `None` when `x` is a member.
    pub fn duality_witness(&self, x: &Point) -> Result<Option<Point>> {
        self.check_dim(x.coords())?;
        let xs = x.coords();
        if self.contains_slice(xs, 0.0) {
            return Ok(None);
        }
        let y = match *self {
            Cone::Orthant(d) => {
                let i = (0..d)
                    .min_by(|&a, &b| xs[a].total_cmp(&xs[b]))
                    .expect("nonempty");
                Point::basis(d, i)
            }
            Cone::Psd(n) => {
                let e = psd_of(n, xs).eigh();
                SymMat::outer(&e.vector(0)).to_point()
            }
            Cone::Lorentz(d) => {
                let s = tail_norm(xs);
                let mut v = vec![0.0; d + 1];
                v[0] = 1.0;
                if s > 0.0 {
                    for i in 1..=d {
                        v[i] = -xs[i] / s;
                    }
                }
                Point::from_vec_unchecked(v)
            }
        };
        Ok(Some(y))
    }

    /// Projection of a Gaussian direction scaled into the unit ball.
    pub fn sample_member<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let g = scaled_gaussian(rng, self.ambient_dim());
        Point::from_vec_unchecked(self.project_slice(&g))
    }

    /// Member plus a fixed fraction of the unit element; always interior.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let m = self.sample_member(rng);
        let e = self.unit_element();
        let en = e.norm();
        m.scaled(0.8).axpy(0.2 / en, &e)
    }

    /// A member that fails the interior test.
    pub fn sample_boundary<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match *self {
            Cone::Orthant(d) => {
                let mut x = self.sample_interior(rng).into_coords();
                let forced = rng.random_range(0..d);
                for (i, c) in x.iter_mut().enumerate() {
                    if i == forced || rng.random_bool(0.5) {
                        *c = 0.0;
                    }
                }
                Point::from_vec_unchecked(x)
            }
            Cone::Psd(n) => {
                let m = self.sample_interior(rng);
                let e = psd_of(n, m.coords()).eigh();
                let forced = rng.random_range(0..n);
                let lams: Vec<f64> = (0..n)
                    .map(|k| {
                        if k != forced && rng.random_bool(0.5) {
                            e.values[k]
                        } else {
                            0.0
                        }
                    })
                    .collect();
                e.recompose(&lams).to_point()
            }
            Cone::Lorentz(d) => {
                let g = gaussian_vec(rng, d);
                let s = g.iter().map(|c| c * c).sum::<f64>().sqrt();
                let r: f64 = rng.random_range(0.05..1.0) / (s * std::f64::consts::SQRT_2);
                let mut v = Vec::with_capacity(d + 1);
                let tail: Vec<f64> = g.iter().map(|c| c * r).collect();
                v.push(tail.iter().map(|c| c * c).sum::<f64>().sqrt());
                v.extend(tail);
                Point::from_vec_unchecked(v)
            }
        }
    }

    pub fn sample_member_seeded(&self, seed: RngSeed) -> Point {
        self.sample_member(&mut seed.rng())
    }

    pub fn sample_boundary_seeded(&self, seed: RngSeed) -> Point {
        self.sample_boundary(&mut seed.rng())
    }

    /// Samples member pairs and non-members to check `C = C^dual` both ways.
    pub fn self_duality_audit(&self, n_samples: usize, seed: RngSeed) -> SelfDualityReport {
        let mut rng = seed.rng();
        let n_samples = n_samples.max(1);
        let mut min_inner = f64::INFINITY;
        let mut violations = 0;
        for _ in 0..n_samples {
            let x = self.sample_member(&mut rng);
            let y = self.sample_member(&mut rng);
            let ip = dot(x.coords(), y.coords());
            min_inner = min_inner.min(ip);
            if ip < -DUALITY_TOL {
                violations += 1;
            }
        }

        // converse direction on random non-members
        let converse_target = n_samples.min(1000);
        let pool: Vec<Point> = (0..64).map(|_| self.sample_member(&mut rng)).collect();
        let mut converse_trials = 0;
        let mut converse_failures = 0;
        let mut sampled_hits = 0;
        let mut max_witness_inner = f64::NEG_INFINITY;
        let mut attempts = 0;
        while converse_trials < converse_target && attempts < 50 * converse_target {
            attempts += 1;
            let x = Point::from_vec_unchecked(scaled_gaussian(&mut rng, self.ambient_dim()));
            let Some(w) = self.duality_witness(&x).expect("dimension matches") else {
                continue;
            };
            converse_trials += 1;
            let ip = dot(x.coords(), w.coords());
            max_witness_inner = max_witness_inner.max(ip);
            if !(ip < 0.0) || !self.contains_slice(w.coords(), DEFAULT_TOL) {
                converse_failures += 1;
            }
            if pool.iter().any(|y| dot(x.coords(), y.coords()) < 0.0) {
                sampled_hits += 1;
            }
        }

        SelfDualityReport {
            cone: self.to_string(),
            pairs: n_samples,
            min_inner,
            violations,
            converse_trials,
            converse_failures,
            max_witness_inner,
            sampled_witness_hits: sampled_hits,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SelfDualityReport {
    pub cone: String,
    pub pairs: usize,
    pub min_inner: f64,
    /// pairs of members with inner product below -1e-9
    pub violations: usize,
    pub converse_trials: usize,
    /// non-members whose analytic witness failed to pair negatively
    pub converse_failures: usize,
    pub max_witness_inner: f64,
    /// non-members for which a plain sampled member already pairs negatively
    pub sampled_witness_hits: usize,
}

impl SelfDualityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.converse_failures == 0
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cone::Orthant(d) => write!(f, "orthant:{d}"),
            Cone::Psd(n) => write!(f, "psd:{n}"),
            Cone::Lorentz(d) => write!(f, "lorentz:{d}"),
        }
    }
}

impl FromStr for Cone {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, dim) = s.split_once(':').ok_or_else(|| {
            Error::parse(
                s,
                "cone spec must look like `orthant:d`, `psd:n` or `lorentz:d`",
            )
        })?;
        let k: usize = dim
            .parse()
            .map_err(|_| Error::parse(dim, "cone dimension must be a positive integer"))?;
        if k == 0 {
            return Err(Error::parse(
                dim,
                "cone dimension must be a positive integer",
            ));
        }
        match kind {
            "orthant" => Ok(Cone::Orthant(k)),
            "psd" => Ok(Cone::Psd(k)),
            "lorentz" => Ok(Cone::Lorentz(k)),
            other => Err(Error::parse(other, "unknown cone kind")),
        }
    }
}

impl Serialize for Cone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Cone {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[inline]
pub(crate) fn tail_norm(x: &[f64]) -> f64 {
    dot(&x[1..], &x[1..]).sqrt()
}

#[inline]
pub(crate) fn psd_of(n: usize, x: &[f64]) -> SymMat {
    SymMat::from_slice(n, x).expect("length checked by caller")
}

fn scaled_gaussian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let g = gaussian_vec(rng, d);
    let norm = dot(&g, &g).sqrt().max(1e-300);
    let r: f64 = rng.random_range(0.0..1.0);
    g.into_iter().map(|c| c * r / norm).collect()
}
