//! Faces of the three cones, represented by kind and parameters rather than
//! as point sets, together with the face axiom check, generated faces,
//! separating vectors, and the perfectness audit.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{tail_norm, Cone, SelfDualityReport, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{Mat, SymMat};
use crate::point::{dot, Point};
use crate::rng::{gaussian_vec, RngSeed};

/// Relative eigenvalue threshold for rank decisions in [`generated_face`].
pub const RANK_TOL: f64 = 1e-7;

/// Random rotations per block size in the PSD perfectness audit.
pub const PSD_ROTATIONS: usize = 20;

/// Random boundary rays in the Lorentz perfectness audit.
pub const LORENTZ_RAYS: usize = 20;

/// Orthant dimension up to which the audit enumerates every coordinate face.
pub const ORTHANT_ENUM_MAX: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum FaceKind {
    WholeCone,
    Zero,
    /// `{x in C : x_i = 0 for i not in support}`; support sorted, proper and nonempty.
    OrthantCoords {
        support: Vec<usize>,
    },
    /// Matrices `Q diag(Y, 0) Q^T` with `Y` in `S^m_+`, `0 < m < n`.
    PsdBlock {
        m: usize,
        rotation: Mat,
    },
    /// `{t g : t >= 0}` for a boundary point `g`.
    LorentzRay {
        generator: Point,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    parent: Cone,
    kind: FaceKind,
    basis: Vec<Point>,
}

impl Face {
    pub fn whole(parent: Cone) -> Face {
        let d = parent.ambient_dim();
        Face {
            parent,
            kind: FaceKind::WholeCone,
            basis: (0..d).map(|i| Point::basis(d, i)).collect(),
        }
    }

    pub fn zero(parent: Cone) -> Face {
        Face {
            parent,
            kind: FaceKind::Zero,
            basis: Vec::new(),
        }
    }

    pub fn parent(&self) -> Cone {
        self.parent
    }

    pub fn kind(&self) -> &FaceKind {
        &self.kind
    }

    /// Orthonormal basis of the linear span of the face.
    pub fn span_basis(&self) -> &[Point] {
        &self.basis
    }

    pub fn span_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_whole(&self) -> bool {
        self.kind == FaceKind::WholeCone
    }

    /// The face expressed in span-basis coordinates; `None` for the zero face.
    pub fn reduced_cone(&self) -> Option<Cone> {
        match &self.kind {
            FaceKind::WholeCone => Some(self.parent),
            FaceKind::Zero => None,
            FaceKind::OrthantCoords { support } => Some(Cone::Orthant(support.len())),
            FaceKind::PsdBlock { m, .. } => Some(Cone::Psd(*m)),
            FaceKind::LorentzRay { .. } => Some(Cone::Orthant(1)),
        }
    }

    /// Span-basis coordinates of `x` (orthogonal projection onto the span).
    pub fn reduce(&self, x: &Point) -> Result<Vec<f64>> {
        self.parent.check_dim(x.coords())?;
        Ok(self
            .basis
            .iter()
            .map(|b| dot(b.coords(), x.coords()))
            .collect())
    }

    pub fn lift(&self, r: &[f64]) -> Result<Point> {
        if r.len() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                got: r.len(),
            });
        }
        let mut x = vec![0.0; self.parent.ambient_dim()];
        for (b, &c) in self.basis.iter().zip(r) {
            for (xi, bi) in x.iter_mut().zip(b.coords()) {
                *xi += c * bi;
            }
        }
        Ok(Point::from_vec_unchecked(x))
    }

    pub fn member(&self, x: &Point, tol: f64) -> Result<bool> {
        self.parent.check_dim(x.coords())?;
        let xs = x.coords();
        Ok(match &self.kind {
            FaceKind::WholeCone => self.parent.contains_slice(xs, tol),
            FaceKind::Zero => x.norm() <= tol,
            FaceKind::OrthantCoords { support } => {
                self.parent.contains_slice(xs, tol)
                    && xs
                        .iter()
                        .enumerate()
                        .all(|(i, &c)| support.binary_search(&i).is_ok() || c.abs() <= tol)
            }
            FaceKind::PsdBlock { m, rotation } => {
                let n = rotation.order();
                let y = SymMat::from_slice(n, xs)?.congruence_t(rotation);
                let off_ok = (0..n).all(|i| (i.max(*m)..n).all(|j| y.get(i, j).abs() <= tol));
                let mut block = SymMat::zeros(*m);
                for i in 0..*m {
                    for j in i..*m {
                        block.set(i, j, y.get(i, j));
                    }
                }
                off_ok && block.min_eigenvalue() >= -tol
            }
            FaceKind::LorentzRay { .. } => {
                let u = &self.basis[0];
                let lam = dot(u.coords(), xs);
                let resid: f64 = xs
                    .iter()
                    .zip(u.coords())
                    .map(|(a, b)| (a - lam * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                lam >= -tol && resid <= tol
            }
        })
    }

    /// A member of the face, drawn through the reduced cone.
    pub fn sample_member<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self.reduced_cone() {
            None => Point::zeros(self.parent.ambient_dim()),
            Some(rc) => self
                .lift(rc.sample_member(rng).coords())
                .expect("reduced dims agree"),
        }
    }

    /// A point of the relative interior (the origin for the zero face).
    pub fn sample_relint<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self.reduced_cone() {
            None => Point::zeros(self.parent.ambient_dim()),
            Some(rc) => self
                .lift(rc.sample_interior(rng).coords())
                .expect("reduced dims agree"),
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FaceKind::WholeCone => write!(f, "whole:{}", self.parent),
            FaceKind::Zero => write!(f, "zero:{}", self.parent),
            FaceKind::OrthantCoords { support } => {
                let s: Vec<String> = support.iter().map(|i| i.to_string()).collect();
                write!(
                    f,
                    "orthant-face:{}:{}",
                    self.parent.ambient_dim(),
                    s.join(",")
                )
            }
            FaceKind::PsdBlock { m, rotation } => write!(f, "psd-block:{}:{}", rotation.order(), m),
            FaceKind::LorentzRay { generator } => {
                let g: Vec<String> = generator
                    .coords()
                    .iter()
                    .map(|c| format!("{c:.6}"))
                    .collect();
                write!(f, "lorentz-ray:{}:({})", generator.dim() - 1, g.join(","))
            }
        }
    }
}

/// The face of `orthant(d)` where only the coordinates in `support` may be positive.
pub fn orthant_face(d: usize, support: &[usize]) -> Result<Face> {
    let parent = Cone::orthant(d)?;
    let mut s = support.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&i| i >= d) {
        return Err(Error::InvalidParameter(format!(
            "coordinate {bad} out of range for orthant:{d}"
        )));
    }
    Ok(match s.len() {
        0 => Face::zero(parent),
        k if k == d => Face::whole(parent),
        _ => Face {
            parent,
            basis: s.iter().map(|&i| Point::basis(d, i)).collect(),
            kind: FaceKind::OrthantCoords { support: s },
        },
    })
}

/// Block face of `psd(n)`: matrices that are `diag(Y, 0)` with `Y` in `S^m_+`
/// in the basis given by the columns of `rotation`.
pub fn psd_block_face(n: usize, m: usize, rotation: &Mat) -> Result<Face> {
    let parent = Cone::psd(n)?;
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "block size {m} must lie in 1..={n}"
        )));
    }
    if rotation.order() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rotation.order(),
        });
    }
    let defect = rotation.orthonormality_defect();
    if defect > 1e-9 {
        return Err(Error::NotOrthonormal(defect));
    }
    if m == n {
        return Ok(Face::whole(parent));
    }
    let q: Vec<Vec<f64>> = (0..m).map(|i| rotation.col(i)).collect();
    let mut basis = Vec::with_capacity(SymMat::vec_dim(m));
    for qi in &q {
        basis.push(SymMat::outer(qi).to_point());
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..m {
        for j in i + 1..m {
            let mut b = SymMat::zeros(n);
            for r in 0..n {
                for c in r..n {
                    b.set(r, c, s * (q[i][r] * q[j][c] + q[j][r] * q[i][c]));
                }
            }
            basis.push(b.to_point());
        }
    }
    Ok(Face {
        parent,
        kind: FaceKind::PsdBlock {
            m,
            rotation: rotation.clone(),
        },
        basis,
    })
}

/// The ray through a nonzero boundary point of `lorentz(d)`.
pub fn lorentz_ray_face(d: usize, generator: &Point) -> Result<Face> {
    let parent = Cone::lorentz(d)?;
    parent.check_dim(generator.coords())?;
    let g = generator.coords();
    if !(g[0] > DEFAULT_TOL && (tail_norm(g) - g[0]).abs() <= DEFAULT_TOL) {
        return Err(Error::BadGenerator);
    }
    Ok(Face {
        parent,
        basis: vec![generator.normalized().expect("nonzero generator")],
        kind: FaceKind::LorentzRay {
            generator: generator.clone(),
        },
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FaceAxiomReport {
    pub face: String,
    pub samples: usize,
    /// `(x, y)` pairs with `0 ⪯ x ⪯ y` that were tested.
    pub pairs: usize,
    pub violations: usize,
}

/// Samples `y` in the face and `x` in the order interval `[0, y]` of the
/// parent cone, and counts `x` that fall outside the face.
pub fn face_axiom_check(face: &Face, n_samples: usize, seed: RngSeed) -> FaceAxiomReport {
    let mut rng = seed.rng();
    let c = face.parent();
    let n_samples = n_samples.max(1);
    let mut pairs = 0;
    let mut violations = 0;
    for _ in 0..n_samples {
        let y = face.sample_member(&mut rng);
        let tol = DEFAULT_TOL * y.norm().max(1.0);
        // exact filtering for Lorentz: its membership slack admits sqrt(tol)-sized drift
        let slack = match c {
            Cone::Lorentz(_) => 0.0,
            _ => 1e-12 * y.norm().max(1.0),
        };
        for x in interval_candidates(c, &y, &mut rng) {
            let lower = c.contains_slice(x.coords(), slack);
            let upper = c.contains_slice(y.sub(&x).coords(), slack);
            if !(lower && upper) {
                continue;
            }
            pairs += 1;
            if !face.member(&x, tol).expect("dims agree") {
                violations += 1;
            }
        }
    }
    FaceAxiomReport {
        face: face.to_string(),
        samples: n_samples,
        pairs,
        violations,
    }
}

/// Candidate points of `[0, y]`: one from a cone-specific interval sampler,
/// a scaling of `y`, and a projected tiny perturbation of that scaling.
fn interval_candidates<R: Rng + ?Sized>(c: Cone, y: &Point, rng: &mut R) -> Vec<Point> {
    let t: f64 = rng.random_range(0.0..=1.0);
    let ty = y.scaled(t);
    let mut out = Vec::with_capacity(3);
    let inside = match c {
        Cone::Orthant(_) => Point::from_vec_unchecked(
            y.coords()
                .iter()
                .map(|&v| v * rng.random_range(0.0..=1.0))
                .collect(),
        ),
        Cone::Psd(n) => {
            let root = psd_sqrt(&SymMat::from_slice(n, y.coords()).expect("dims agree"));
            let q = Mat::random_orthogonal(n, rng);
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
            let a = SymMat::diag(&u).congruence(&q);
            a.congruence(&sym_as_mat(&root)).to_point()
        }
        Cone::Lorentz(_) => {
            let margin = |z: &Point| {
                (z.coords()[0] - tail_norm(z.coords())).max(0.0) / std::f64::consts::SQRT_2
            };
            let room = margin(&ty).min(margin(&y.scaled(1.0 - t)));
            let w = gaussian_vec(rng, y.dim());
            let wn = dot(&w, &w).sqrt().max(1e-300);
            let s = rng.random_range(0.0..=1.0) * room / wn;
            ty.axpy(s, &Point::from_vec_unchecked(w))
        }
    };
    out.push(inside);
    let eps = 1e-10 * y.norm().max(1e-300);
    let w = Point::from_vec_unchecked(gaussian_vec(rng, y.dim()));
    out.push(c.project(&ty.axpy(eps, &w)).expect("dims agree"));
    out.push(ty);
    out
}

fn psd_sqrt(y: &SymMat) -> SymMat {
    let e = y.eigh();
    let top = e.values.last().copied().unwrap_or(0.0).max(0.0);
    e.recompose_with(|l| if l <= 1e-12 * top { 0.0 } else { l.sqrt() })
}

fn sym_as_mat(s: &SymMat) -> Mat {
    let n = s.order();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| s.get(i, j)).collect())
        .collect();
    Mat::from_rows(&rows).expect("square")
}

/// The smallest face containing every sample.
pub fn generated_face(c: Cone, omega_samples: &[Point]) -> Result<Face> {
    if omega_samples.is_empty() {
        return Err(Error::Empty("omega samples"));
    }
    for x in omega_samples {
        if !c.contains(x, DEFAULT_TOL)? {
            return Err(Error::NotInCone(c.to_string()));
        }
    }
    match c {
        Cone::Orthant(d) => {
            let support: Vec<usize> = (0..d)
                .filter(|&i| omega_samples.iter().any(|x| x.coords()[i] > DEFAULT_TOL))
                .collect();
            orthant_face(d, &support)
        }
        Cone::Psd(n) => {
            let mut sum = vec![0.0; c.ambient_dim()];
            for x in omega_samples {
                for (s, v) in sum.iter_mut().zip(x.coords()) {
                    *s += v;
                }
            }
            let e = SymMat::from_slice(n, &sum)?.eigh();
            let top = e.values[n - 1];
            let thr = RANK_TOL * top.max(1.0);
            let m = e.values.iter().filter(|&&l| l > thr).count();
            if m == 0 {
                return Ok(Face::zero(c));
            }
            // eigenvectors in descending eigenvalue order
            let cols: Vec<Vec<f64>> = (0..n).rev().map(|k| e.vector(k)).collect();
            psd_block_face(n, m, &Mat::from_cols(&cols)?)
        }
        Cone::Lorentz(d) => {
            if omega_samples
                .iter()
                .any(|x| c.interior_contains_slice(x.coords(), DEFAULT_TOL))
            {
                return Ok(Face::whole(c));
            }
            let mut dir: Option<Vec<f64>> = None;
            for x in omega_samples {
                let xs = x.coords();
                if x.norm() <= DEFAULT_TOL {
                    continue;
                }
                let s = tail_norm(xs);
                if s <= DEFAULT_TOL {
                    // only the origin has zero tail on the boundary
                    continue;
                }
                let u: Vec<f64> = std::iter::once(1.0)
                    .chain(xs[1..].iter().map(|v| v / s))
                    .collect();
                match &dir {
                    None => dir = Some(u),
                    Some(prev) => {
                        let diff = prev
                            .iter()
                            .zip(&u)
                            .map(|(a, b)| (a - b).abs())
                            .fold(0.0, f64::max);
                        if diff > RANK_TOL {
                            return Ok(Face::whole(c));
                        }
                    }
                }
            }
            match dir {
                None => Ok(Face::zero(c)),
                Some(u) => lorentz_ray_face(d, &Point::new(u)?),
            }
        }
    }
}

/// A member `v` of the parent cone orthogonal to the face with `<v, x> > 0`.
pub fn separating_vector(face: &Face, x: &Point) -> Result<Point> {
    let c = face.parent();
    if !c.contains(x, DEFAULT_TOL)? {
        return Err(Error::NotInCone(c.to_string()));
    }
    if face.member(x, DEFAULT_TOL)? {
        return Err(Error::InFace);
    }
    let v = match face.kind() {
        FaceKind::WholeCone => return Err(Error::InFace),
        FaceKind::Zero => x.clone(),
        FaceKind::OrthantCoords { support } => Point::from_vec_unchecked(
            x.coords()
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if support.binary_search(&i).is_err() && v > DEFAULT_TOL {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect(),
        ),
        FaceKind::PsdBlock { m, rotation } => {
            let n = rotation.order();
            let d: Vec<f64> = (0..n).map(|i| if i < *m { 0.0 } else { 1.0 }).collect();
            SymMat::diag(&d).congruence(rotation).to_point()
        }
        FaceKind::LorentzRay { generator } => {
            let g = generator.coords();
            let v: Vec<f64> = std::iter::once(g[0])
                .chain(g[1..].iter().map(|c| -c))
                .collect();
            Point::from_vec_unchecked(v)
                .normalized()
                .expect("nonzero generator")
        }
    };
    Ok(v)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FaceAudit {
    pub face: String,
    pub span_dim: usize,
    pub reduced_cone: Option<String>,
    pub axiom: FaceAxiomReport,
    /// Points of the span where face membership and reduced-cone membership disagree.
    pub membership_mismatches: usize,
    /// Self-duality of the face within its span, tested on lifted samples.
    pub reduced_pairs: usize,
    pub reduced_min_inner: f64,
    pub reduced_violations: usize,
    pub reduced_converse_trials: usize,
    pub reduced_converse_failures: usize,
    /// Audit of the standard cone the face reduces to.
    pub reduced_audit: Option<SelfDualityReport>,
    /// Reduced coordinates of a relative-interior point.
    pub relint_point: Option<Vec<f64>>,
    pub relint_ok: bool,
    /// Face samples that passed the parent's interior test (must be 0 unless whole).
    pub interior_hits: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PerfectnessReport {
    pub cone: String,
    pub faces: Vec<FaceAudit>,
    pub passed: bool,
}

/// Representative faces of `c`: every coordinate face of a small orthant,
/// block faces over random rotations for PSD, and random rays for Lorentz,
/// always including the zero face and the whole cone.
pub fn representative_faces(c: Cone, seed: RngSeed) -> Vec<Face> {
    let mut rng = seed.rng();
    match c {
        Cone::Orthant(d) => {
            if d <= ORTHANT_ENUM_MAX {
                (0u32..1 << d)
                    .map(|mask| {
                        let s: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).collect();
                        orthant_face(d, &s).expect("valid support")
                    })
                    .collect()
            } else {
                let mut faces = vec![Face::zero(c), Face::whole(c)];
                for _ in 0..64 {
                    let s: Vec<usize> = (0..d).filter(|_| rng.random_bool(0.5)).collect();
                    faces.push(orthant_face(d, &s).expect("valid support"));
                }
                faces
            }
        }
        Cone::Psd(n) => {
            let mut faces = vec![Face::zero(c)];
            for m in 1..n {
                for _ in 0..PSD_ROTATIONS {
                    let q = Mat::random_orthogonal(n, &mut rng);
                    faces.push(psd_block_face(n, m, &q).expect("orthonormal rotation"));
                }
            }
            faces.push(Face::whole(c));
            faces
        }
        Cone::Lorentz(d) => {
            let mut faces = vec![Face::zero(c), Face::whole(c)];
            for _ in 0..LORENTZ_RAYS {
                let g = c.sample_boundary(&mut rng);
                faces.push(lorentz_ray_face(d, &g).expect("boundary sample"));
            }
            faces
        }
    }
}

pub fn perfectness_audit(c: Cone, n_face_samples: usize, seed: RngSeed) -> PerfectnessReport {
    use rayon::prelude::*;
    let faces = representative_faces(c, seed);
    let audits: Vec<FaceAudit> = faces
        .par_iter()
        .enumerate()
        .map(|(k, f)| audit_face(f, n_face_samples, seed.derive(k as u64 + 1)))
        .collect();
    let passed = audits.iter().all(|a| a.passed);
    PerfectnessReport {
        cone: c.to_string(),
        faces: audits,
        passed,
    }
}

pub fn audit_face(face: &Face, n_samples: usize, seed: RngSeed) -> FaceAudit {
    let n = n_samples.max(1);
    let axiom = face_axiom_check(face, n, seed.derive(0));
    let mut rng = seed.derive(1).rng();
    let c = face.parent();
    let reduced = face.reduced_cone();

    let mut mismatches = 0;
    let mut pairs = 0;
    let mut min_inner = f64::INFINITY;
    let mut violations = 0;
    let mut converse_trials = 0;
    let mut converse_failures = 0;
    let relint_point;
    let relint_ok;
    let mut reduced_audit = None;

    match reduced {
        None => {
            // zero face: span {0}, relative interior {0}
            relint_ok = face
                .member(&Point::zeros(c.ambient_dim()), DEFAULT_TOL)
                .unwrap_or(false);
            relint_point = Some(Vec::new());
        }
        Some(rc) => {
            for _ in 0..n {
                // membership consistency on random points of the span
                let r = gaussian_vec(&mut rng, face.span_dim());
                let x = face.lift(&r).expect("dims agree");
                let rr = face.reduce(&x).expect("dims agree");
                if face.member(&x, DEFAULT_TOL).unwrap() != rc.contains_slice(&rr, DEFAULT_TOL) {
                    mismatches += 1;
                }

                // forward self-duality of face members in reduced coordinates
                let a = face.reduce(&face.sample_member(&mut rng)).unwrap();
                let b = face.reduce(&face.sample_member(&mut rng)).unwrap();
                let ip = dot(&a, &b);
                pairs += 1;
                min_inner = min_inner.min(ip);
                if ip < -crate::cones::DUALITY_TOL {
                    violations += 1;
                }

                // converse: a span point outside the face pairs negatively with a face member
                if !rc.contains_slice(&rr, 0.0) {
                    converse_trials += 1;
                    let w = rc
                        .duality_witness(&Point::from_vec_unchecked(rr.clone()))
                        .unwrap()
                        .expect("non-member has a witness");
                    let lw = face.lift(w.coords()).unwrap();
                    let ok = face.member(&lw, DEFAULT_TOL).unwrap()
                        && dot(lw.coords(), x.coords()) < 0.0;
                    if !ok {
                        converse_failures += 1;
                    }
                }
            }
            let p = face.sample_relint(&mut rng);
            let rp = face.reduce(&p).unwrap();
            relint_ok = face.member(&p, DEFAULT_TOL).unwrap()
                && rc.interior_contains_slice(&rp, DEFAULT_TOL);
            relint_point = Some(rp);
            reduced_audit = Some(rc.self_duality_audit(n, seed.derive(2)));
        }
    }

    let mut interior_hits = 0;
    if !face.is_whole() {
        let mut rng = seed.derive(3).rng();
        for _ in 0..n {
            let x = face.sample_member(&mut rng);
            if c.interior_contains_slice(x.coords(), DEFAULT_TOL) {
                interior_hits += 1;
            }
        }
    }

    let passed = axiom.violations == 0
        && mismatches == 0
        && violations == 0
        && converse_failures == 0
        && reduced_audit.as_ref().is_none_or(|r| r.passed())
        && relint_ok
        && interior_hits == 0;
    FaceAudit {
        face: face.to_string(),
        span_dim: face.span_dim(),
        reduced_cone: reduced.map(|r| r.to_string()),
        axiom,
        membership_mismatches: mismatches,
        reduced_pairs: pairs,
        reduced_min_inner: if pairs == 0 { 0.0 } else { min_inner },
        reduced_violations: violations,
        reduced_converse_trials: converse_trials,
        reduced_converse_failures: converse_failures,
        reduced_audit,
        relint_point,
        relint_ok,
        interior_hits,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn psd_block_examples() {
        let f = psd_block_face(2, 1, &Mat::identity(2)).unwrap();
        assert!(f
            .member(&SymMat::diag(&[3.0, 0.0]).to_point(), 1e-9)
            .unwrap());
        assert!(!f
            .member(&SymMat::diag(&[0.0, 1.0]).to_point(), 1e-9)
            .unwrap());
        let ones = SymMat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(!f.member(&ones.to_point(), 1e-9).unwrap());
        assert!(psd_block_face(2, 2, &Mat::identity(2)).unwrap().is_whole());
        let skew = Mat::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            psd_block_face(2, 1, &skew),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn lorentz_ray_examples() {
        let f = lorentz_ray_face(1, &p(&[1.0, 1.0])).unwrap();
        assert!(f.member(&p(&[2.0, 2.0]), 1e-9).unwrap());
        assert!(!f.member(&p(&[1.0, -1.0]), 1e-9).unwrap());
        assert!(f.member(&p(&[0.0, 0.0]), 1e-9).unwrap());
        assert_eq!(
            lorentz_ray_face(1, &p(&[1.0, 0.5])),
            Err(Error::BadGenerator)
        );
        assert_eq!(
            lorentz_ray_face(1, &p(&[0.0, 0.0])),
            Err(Error::BadGenerator)
        );
    }

    #[test]
    fn axiom_examples() {
        let mut rng = RngSeed(5).rng();
        let q = Mat::random_orthogonal(3, &mut rng);
        let f = psd_block_face(3, 2, &q).unwrap();
        let r = face_axiom_check(&f, 1000, RngSeed(1));
        assert_eq!(r.violations, 0);
        assert!(r.pairs >= 1000);
        let g = Cone::Lorentz(2).sample_boundary(&mut rng);
        let f = lorentz_ray_face(2, &g).unwrap();
        assert_eq!(face_axiom_check(&f, 1000, RngSeed(2)).violations, 0);
        let f = Face::whole(Cone::Orthant(2));
        assert_eq!(face_axiom_check(&f, 1000, RngSeed(3)).violations, 0);
        let f = Face::zero(Cone::Lorentz(2));
        assert_eq!(face_axiom_check(&f, 10, RngSeed(3)).violations, 0);
    }

    #[test]
    fn axiom_check_catches_a_non_face() {
        // the ray through an interior point is a subcone but not a face
        let c = Cone::Lorentz(1);
        let fake = Face {
            parent: c,
            kind: FaceKind::LorentzRay {
                generator: p(&[1.0, 0.0]),
            },
            basis: vec![p(&[1.0, 0.0])],
        };
        assert!(face_axiom_check(&fake, 200, RngSeed(4)).violations > 0);
    }

    #[test]
    fn generated_face_examples() {
        let f = generated_face(
            Cone::Orthant(3),
            &[p(&[1.0, 0.0, 0.0]), p(&[0.0, 2.0, 0.0])],
        )
        .unwrap();
        assert_eq!(
            f.kind(),
            &FaceKind::OrthantCoords {
                support: vec![0, 1]
            }
        );
        let f = generated_face(Cone::Psd(2), &[SymMat::diag(&[1.0, 0.0]).to_point()]).unwrap();
        assert_eq!(
            f.kind(),
            &FaceKind::PsdBlock {
                m: 1,
                rotation: Mat::identity(2)
            }
        );
        let f = generated_face(
            Cone::Lorentz(2),
            &[p(&[1.0, 1.0, 0.0]), p(&[1.0, 0.0, 1.0])],
        )
        .unwrap();
        assert!(f.is_whole());
        let f = generated_face(
            Cone::Lorentz(2),
            &[p(&[1.0, 1.0, 0.0]), p(&[3.0, 3.0, 0.0])],
        )
        .unwrap();
        assert!(matches!(f.kind(), FaceKind::LorentzRay { .. }));
        let f = generated_face(Cone::Lorentz(2), &[p(&[0.0, 0.0, 0.0])]).unwrap();
        assert_eq!(f.kind(), &FaceKind::Zero);
        assert!(generated_face(Cone::Orthant(2), &[p(&[-1.0, 0.0])]).is_err());
        assert!(generated_face(Cone::Orthant(2), &[]).is_err());
    }

    #[test]
    fn generated_face_is_minimal_on_orthant() {
        let samples = [p(&[0.5, 0.0, 0.0, 0.2]), p(&[0.0, 0.0, 0.0, 1.0])];
        let f = generated_face(Cone::Orthant(4), &samples).unwrap();
        let FaceKind::OrthantCoords { support } = f.kind().clone() else {
            panic!("expected coordinate face")
        };
        for x in &samples {
            assert!(f.member(x, 1e-9).unwrap());
        }
        for drop in 0..support.len() {
            let mut s = support.clone();
            s.remove(drop);
            let smaller = orthant_face(4, &s).unwrap();
            assert!(samples.iter().any(|x| !smaller.member(x, 1e-9).unwrap()));
        }
    }

    #[test]
    fn separating_examples() {
        let f = psd_block_face(2, 1, &Mat::identity(2)).unwrap();
        let v = separating_vector(&f, &SymMat::identity(2).to_point()).unwrap();
        assert!(v.dist(&SymMat::diag(&[0.0, 1.0]).to_point()) < 1e-15);
        assert_eq!(
            dot(v.coords(), SymMat::identity(2).to_point().coords()),
            1.0
        );
        assert_eq!(
            dot(v.coords(), SymMat::diag(&[5.0, 0.0]).to_point().coords()),
            0.0
        );

        let f = lorentz_ray_face(1, &p(&[1.0, 1.0])).unwrap();
        let v = separating_vector(&f, &p(&[1.0, 0.0])).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(v.dist(&p(&[s, -s])) < 1e-15);
        assert!(dot(v.coords(), &[1.0, 1.0]).abs() < 1e-15);

        let f = orthant_face(2, &[0]).unwrap();
        assert_eq!(
            separating_vector(&f, &p(&[1.0, 1.0])).unwrap(),
            p(&[0.0, 1.0])
        );
        assert_eq!(separating_vector(&f, &p(&[1.0, 0.0])), Err(Error::InFace));
        assert!(matches!(
            separating_vector(&f, &p(&[-1.0, 1.0])),
            Err(Error::NotInCone(_))
        ));
    }

    #[test]
    fn reduced_psd_membership_matches_psd_m() {
        let mut rng = RngSeed(8).rng();
        let q = Mat::random_orthogonal(4, &mut rng);
        let f = psd_block_face(4, 2, &q).unwrap();
        for _ in 0..1000 {
            let r = gaussian_vec(&mut rng, 3);
            let x = f.lift(&r).unwrap();
            assert_eq!(
                f.member(&x, 1e-9).unwrap(),
                Cone::Psd(2).contains_slice(&f.reduce(&x).unwrap(), 1e-9)
            );
        }
    }

    #[test]
    fn perfectness_examples() {
        let r = perfectness_audit(Cone::Orthant(3), 200, RngSeed(1));
        assert!(r.passed, "{r:?}");
        assert_eq!(r.faces.len(), 8);
        let r = perfectness_audit(Cone::Lorentz(2), 200, RngSeed(1));
        assert!(r.passed);
        let r = perfectness_audit(Cone::Psd(2), 200, RngSeed(1));
        assert!(r.passed);
    }
}
