use serde::Serialize;

use crate::cones::{Cone, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::point::{dot, Point};
use crate::rng::RngSeed;

#[derive(Clone, Debug)]
pub struct NormalConeConfig {
    pub max_iters: usize,
    pub restarts: usize,
    /// Allowed value of `max <z, w - y>` over the set.
    pub tol: f64,
    pub seed: RngSeed,
}

impl Default for NormalConeConfig {
    fn default() -> Self {
        NormalConeConfig {
            max_iters: 10_000,
            restarts: 5,
            tol: 1e-7,
            seed: RngSeed(0),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NormalWitnessCheck {
    /// `max over w in omega of <z, w - y>`
    pub max_violation: f64,
    pub in_cone: bool,
    /// `<z, y>`
    pub pairing: f64,
    pub passed: bool,
}

/// Checks the three defining inequalities of a witness over the whole set.
pub fn check_normal_witness(c: Cone, omega: &[Point], y: &Point, z: &Point) -> NormalWitnessCheck {
    let zy = dot(z.coords(), y.coords());
    let max_violation = omega
        .iter()
        .map(|w| dot(z.coords(), w.coords()) - zy)
        .fold(f64::NEG_INFINITY, f64::max);
    let in_cone = c.contains_slice(z.coords(), DEFAULT_TOL);
    NormalWitnessCheck {
        max_violation,
        in_cone,
        pairing: zy,
        passed: max_violation <= NormalConeConfig::default().tol && in_cone && zy > 0.0,
    }
}

/// Searches for `z` in the cone with `<z, w - y> <= tol` for every `w` in
/// `omega` and `<z, y> > 0`, by projected subgradient steps on the worst
/// violator with normalization and restarts.
pub fn normal_cone_witness(
    omega: &[Point],
    y: &Point,
    c: Cone,
    cfg: &NormalConeConfig,
) -> Result<Point> {
    if omega.is_empty() {
        return Err(Error::Empty("omega"));
    }
    c.check_dim(y.coords())?;
    for w in omega {
        c.check_dim(w.coords())?;
        if !c.contains_slice(w.coords(), DEFAULT_TOL) {
            return Err(Error::NotInCone(c.to_string()));
        }
    }
    if !omega.iter().any(|w| w.dist(y) <= DEFAULT_TOL) {
        return Err(Error::InvalidParameter("y is not a point of omega".into()));
    }
    let yy = dot(y.coords(), y.coords());
    if yy <= DEFAULT_TOL * DEFAULT_TOL {
        return Err(Error::Hypothesis(
            "y = 0: every scaling of y lies in omega".into(),
        ));
    }
    for w in omega {
        let lam = dot(w.coords(), y.coords()) / yy;
        if lam > 1.0 + DEFAULT_TOL && w.dist(&y.scaled(lam)) <= DEFAULT_TOL * w.norm().max(1.0) {
            return Err(Error::Hypothesis(format!("omega contains {lam} * y")));
        }
    }

    let mut rng = cfg.seed.rng();
    let mut best = f64::INFINITY;
    for r in 0..cfg.restarts.max(1) {
        let start = if r == 0 {
            y.clone()
        } else {
            c.sample_interior(&mut rng)
        };
        let Some(mut z) = start.normalized() else {
            continue;
        };
        for k in 1..=cfg.max_iters {
            let zy = dot(z.coords(), y.coords());
            let (worst, arg) = omega
                .iter()
                .enumerate()
                .map(|(i, w)| (dot(z.coords(), w.coords()) - zy, i))
                .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a });
            if zy > 0.0 {
                best = best.min(worst);
            }
            if worst <= cfg.tol && zy > DEFAULT_TOL && check_normal_witness(c, omega, y, &z).passed
            {
                return Ok(z);
            }
            let eta = 0.1 / (k as f64).sqrt();
            let step = if worst <= cfg.tol {
                // feasible but not pairing positively with y: lean toward y
                z.axpy(eta, y)
            } else {
                z.axpy(-eta, &omega[arg].sub(y))
            };
            match c.project(&step)?.normalized() {
                Some(next) => z = next,
                None => break,
            }
        }
    }
    Err(Error::SearchFailed {
        restarts: cfg.restarts.max(1),
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    fn omega_orthant_simplex(h: f64) -> Vec<Point> {
        let g = build_grid(Cone::Orthant(2), 1.0, h).unwrap();
        (0..g.len())
            .map(|i| g.point(i))
            .filter(|p| p.coords()[0] + p.coords()[1] <= 1.0 + 1e-9)
            .collect()
    }

    #[test]
    fn orthant_simplex_corner() {
        let omega = omega_orthant_simplex(0.05);
        let y = Point::new(vec![1.0, 0.0]).unwrap();
        let z = normal_cone_witness(&omega, &y, Cone::Orthant(2), &NormalConeConfig::default())
            .unwrap();
        assert!(check_normal_witness(Cone::Orthant(2), &omega, &y, &z).passed);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let diag = Point::new(vec![s, s]).unwrap();
        assert!(check_normal_witness(Cone::Orthant(2), &omega, &y, &diag).passed);
    }

    #[test]
    fn lorentz_truncated() {
        let g = build_grid(Cone::Lorentz(1), 1.5, 0.05).unwrap();
        let omega: Vec<Point> = (0..g.len())
            .map(|i| g.point(i))
            .filter(|p| p.coords()[0] <= 1.0 + 1e-9)
            .collect();
        let y = Point::new(vec![1.0, 1.0]).unwrap();
        let z = normal_cone_witness(&omega, &y, Cone::Lorentz(1), &NormalConeConfig::default())
            .unwrap();
        let chk = check_normal_witness(Cone::Lorentz(1), &omega, &y, &z);
        assert!(chk.passed);
        assert!((chk.pairing - std::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn interior_point_fails() {
        let omega = omega_orthant_simplex(0.1);
        // no larger multiple of y lies on the grid
        let y = Point::new(vec![0.3, 0.4]).unwrap();
        let cfg = NormalConeConfig {
            max_iters: 500,
            ..Default::default()
        };
        assert!(matches!(
            normal_cone_witness(&omega, &y, Cone::Orthant(2), &cfg),
            Err(Error::SearchFailed { .. })
        ));
    }

    #[test]
    fn hypothesis_violation() {
        let omega = omega_orthant_simplex(0.1);
        let y = Point::new(vec![0.5, 0.0]).unwrap();
        assert!(matches!(
            normal_cone_witness(&omega, &y, Cone::Orthant(2), &NormalConeConfig::default()),
            Err(Error::Hypothesis(_))
        ));
    }
}
