//! Sampled audit of properness, convexity and monotonicity of a grid function.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::conjugate::GridFn;
use crate::rng::RngSeed;
use crate::value::ExtReal;

pub const GAMMA_TOL: f64 = 1e-9;

/// Lower semicontinuity cannot be observed on a finite grid and is not checked.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GammaAudit {
    pub proper: bool,
    pub convexity_pairs: usize,
    pub convexity_violations: usize,
    pub worst_convexity_gap: f64,
    pub monotonicity_pairs: usize,
    pub monotonicity_violations: usize,
    pub worst_monotonicity_gap: f64,
    pub lsc_checked: bool,
}

impl GammaAudit {
    pub fn certified(&self) -> bool {
        self.proper && self.convexity_violations == 0 && self.monotonicity_violations == 0
    }
}

/// Convexity on node pairs whose midpoint is a node; monotonicity on pairs
/// `x = y + z` with `z` a node (hence in the cone), plus every pair `(x, 0)`.
pub fn gamma_audit(f: &GridFn, n_pairs: usize, seed: RngSeed) -> GammaAudit {
    let g = f.grid();
    let n = g.len();
    let mut rng = seed.rng();

    let mut cpairs = 0;
    let mut cviol = 0;
    let mut cworst = f64::NEG_INFINITY;
    let mut mpairs = 0;
    let mut mviol = 0;
    let mut mworst = f64::NEG_INFINITY;

    let mut mono = |big: usize, small: usize, mpairs: &mut usize| {
        *mpairs += 1;
        // violated when f(big) < f(small); +inf at big never violates
        let gap = match (f.value(big), f.value(small)) {
            (ExtReal::PosInf, _) => f64::NEG_INFINITY,
            (ExtReal::Finite(_), ExtReal::PosInf) => f64::INFINITY,
            (ExtReal::Finite(b), ExtReal::Finite(s)) => s - b,
        };
        if gap > mworst {
            mworst = gap;
        }
        if gap > GAMMA_TOL {
            mviol += 1;
        }
    };

    let origin = g.origin_index();
    for i in 0..n {
        mono(i, origin, &mut mpairs);
    }
    for _ in 0..n_pairs {
        let i = rng.random_range(0..n);
        let z = rng.random_range(0..n);
        if let Some(j) = g.sum_index(i, z) {
            mono(j, i, &mut mpairs);
        }
    }

    for _ in 0..n_pairs {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        // nudge j toward i until the lattice parities match
        let ki = g.lattice_index(i);
        let kj: Vec<i32> = g
            .lattice_index(j)
            .iter()
            .zip(ki)
            .map(|(&b, &a)| {
                if (a - b) % 2 == 0 {
                    b
                } else if b > a {
                    b - 1
                } else {
                    b + 1
                }
            })
            .collect();
        let Some(j) = g.lookup(&kj) else { continue };
        let Some(m) = g.midpoint_index(i, j) else {
            continue;
        };
        let (Some(fi), Some(fj)) = (f.value(i).value(), f.value(j).value()) else {
            continue;
        };
        cpairs += 1;
        let gap = f.value(m).to_f64() - 0.5 * (fi + fj);
        if gap > cworst {
            cworst = gap;
        }
        if gap > GAMMA_TOL {
            cviol += 1;
        }
    }

    GammaAudit {
        proper: f.values().iter().any(|v| v.is_finite()),
        convexity_pairs: cpairs,
        convexity_violations: cviol,
        worst_convexity_gap: if cpairs == 0 { 0.0 } else { cworst },
        monotonicity_pairs: mpairs,
        monotonicity_violations: mviol,
        worst_monotonicity_gap: if mpairs == 0 { 0.0 } else { mworst },
        lsc_checked: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Cone;
    use crate::grid::build_grid;
    use std::sync::Arc;

    fn gf(c: Cone, f: impl Fn(&[f64]) -> ExtReal + Sync) -> GridFn {
        GridFn::from_fn(Arc::new(build_grid(c, 2.0, 0.05).unwrap()), f).unwrap()
    }

    #[test]
    fn examples() {
        let a = gamma_audit(
            &gf(Cone::Orthant(1), |x| ExtReal::finite(x[0] * x[0])),
            2000,
            RngSeed(1),
        );
        assert!(a.certified());
        assert!(a.convexity_pairs > 100);

        let a = gamma_audit(
            &gf(Cone::Orthant(1), |x| ExtReal::finite((x[0] - 1.0).powi(2))),
            2000,
            RngSeed(1),
        );
        assert!(a.monotonicity_violations > 0);
        assert_eq!(a.convexity_violations, 0);

        let a = gamma_audit(
            &gf(Cone::Orthant(1), |x| ExtReal::finite(-x[0])),
            2000,
            RngSeed(1),
        );
        assert!(a.monotonicity_violations > 0);
        assert_eq!(a.convexity_violations, 0);
        assert!(!a.lsc_checked);
    }

    #[test]
    fn concave_is_caught() {
        let a = gamma_audit(
            &gf(Cone::Orthant(2), |x| ExtReal::finite(x[0].sqrt())),
            2000,
            RngSeed(3),
        );
        assert!(a.convexity_violations > 0);
        assert_eq!(a.monotonicity_violations, 0);
    }

    #[test]
    fn infinite_values() {
        let ind = |x: &[f64]| {
            if x.iter().all(|&c| c == 0.0) {
                ExtReal::ZERO
            } else {
                ExtReal::PosInf
            }
        };
        let a = gamma_audit(&gf(Cone::Lorentz(2), ind), 2000, RngSeed(1));
        assert!(a.certified());
        // +inf at the origin only: finite values above it are decreasing
        let bad = |x: &[f64]| {
            if x.iter().all(|&c| c == 0.0) {
                ExtReal::PosInf
            } else {
                ExtReal::ZERO
            }
        };
        let a = gamma_audit(&gf(Cone::Orthant(1), bad), 200, RngSeed(1));
        assert!(a.monotonicity_violations > 0);
    }
}
