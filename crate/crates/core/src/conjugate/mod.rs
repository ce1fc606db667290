//! Discrete monotone conjugation and biconjugation on cone grids.
//!
//! `f*(y) = max_z <z, y> - f(z)` over primal nodes with finite `f`, evaluated
//! at every dual node; `f**` applies the same transform back onto the primal
//! grid. Ties in the max go to the smallest node index.

mod fast;

use std::sync::Arc;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::grid::{build_grid, Grid};
use crate::point::{dot, Point};
use crate::rng::RngSeed;
use crate::value::ExtReal;

pub(crate) use fast::conjugate_box;
pub use fast::{fast_conjugate_orthant, fast_conjugate_orthant_onto};

/// Slack allowed for `f** <= f` and for Fenchel–Young gaps.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Cone-membership tolerance for discrete subgradients.
pub const SUBGRADIENT_TOL: f64 = 1e-6;

/// Dual radius as a multiple of the primal radius when none is given.
pub const DEFAULT_DUAL_FACTOR: f64 = 2.0;

/// An extended-real function sampled on the nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    grid: Arc<Grid>,
    values: Vec<ExtReal>,
}

impl GridFn {
    /// Fails with [`Error::Improper`] if every value is `+inf`.
    pub fn new(grid: Arc<Grid>, values: Vec<ExtReal>) -> Result<GridFn> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::Improper);
        }
        Ok(GridFn { grid, values })
    }

    pub fn from_fn<F>(grid: Arc<Grid>, f: F) -> Result<GridFn>
    where
        F: Fn(&[f64]) -> ExtReal + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.node(i)))
            .collect();
        GridFn::new(grid, values)
    }

    pub(crate) fn from_f64(grid: Arc<Grid>, values: &[f64]) -> Result<GridFn> {
        let v = values
            .iter()
            .map(|&x| ExtReal::from_f64(x))
            .collect::<Result<_>>()?;
        GridFn::new(grid, v)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn cone(&self) -> Cone {
        self.grid.cone()
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, i: usize) -> ExtReal {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of nodes with finite value.
    pub fn dom(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.values[i].is_finite())
            .collect()
    }

    pub fn has_infinite_values(&self) -> bool {
        self.values.iter().any(|v| v.is_inf())
    }

    /// Values with `+inf` mapped to the host infinity.
    pub(crate) fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64()).collect()
    }
}

/// `x -> <slope, x> + offset` with the slope in the cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMinorant {
    pub slope: Point,
    pub offset: f64,
}

impl AffineMinorant {
    pub fn new(cone: Cone, slope: Point, offset: f64) -> Result<Self> {
        if !cone.contains(&slope, crate::cones::DEFAULT_TOL)? {
            return Err(Error::NotInCone(cone.to_string()));
        }
        if !offset.is_finite() {
            return Err(Error::NonFinite(offset));
        }
        Ok(AffineMinorant { slope, offset })
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        Ok(crate::point::inner(&self.slope, x)? + self.offset)
    }
}

/// Pointwise max of affine minorants at `x`.
pub fn envelope_from_minorants(minorants: &[AffineMinorant], x: &Point) -> Result<ExtReal> {
    if minorants.is_empty() {
        return Err(Error::Empty("minorant collection"));
    }
    let mut best = f64::NEG_INFINITY;
    for m in minorants {
        best = best.max(m.eval(x)?);
    }
    Ok(ExtReal::finite(best))
}

/// Which transform implementation a biconjugate run used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Naive,
    Fast,
    /// Fast when both grids are full orthant boxes of equal spacing, naive otherwise.
    Auto,
}

#[derive(Clone, Debug)]
pub struct ConjugateReport {
    pub f: GridFn,
    /// On the dual grid.
    pub fstar: GridFn,
    /// Back on the primal grid.
    pub fstarstar: GridFn,
    /// `max (f - f**)` over nodes where `f` is finite.
    pub max_gap_on_dom: f64,
    /// Node attaining `max_gap_on_dom`.
    pub gap_argmax: usize,
    /// `max (f** - f, 0)` over nodes where `f` is finite.
    pub max_violation: f64,
    /// For each dual node, the primal node attaining `f*`.
    pub argmax_star: Vec<usize>,
    /// For each primal node, the dual node attaining `f**`.
    pub argmax_starstar: Vec<usize>,
    pub method: Method,
}

impl ConjugateReport {
    /// The minorants `<y, .> - f*(y)` that make up `f**`, one per dual node.
    pub fn minorants(&self) -> Vec<AffineMinorant> {
        let g = self.fstar.grid();
        (0..g.len())
            .map(|j| AffineMinorant {
                slope: g.point(j),
                offset: -self.fstar.value(j).to_f64(),
            })
            .collect()
    }

    pub fn gap_at(&self, i: usize) -> Option<f64> {
        let f = self.f.value(i).value()?;
        Some(f - self.fstarstar.value(i).to_f64())
    }
}

fn check_same_cone(a: &Grid, b: &Grid) -> Result<()> {
    if a.cone() != b.cone() {
        return Err(Error::ConeMismatch(
            a.cone().to_string(),
            b.cone().to_string(),
        ));
    }
    Ok(())
}

/// `max_j <s_j, t> + off_j` for every target `t`; returns values and the
/// winning slope positions (first winner on ties).
pub(crate) fn max_affine(
    slopes: &Grid,
    slope_idx: &[usize],
    offsets: &[f64],
    targets: &[f64],
) -> (Vec<f64>, Vec<usize>) {
    let d = slopes.dim();
    let sc: Vec<f64> = slope_idx
        .iter()
        .flat_map(|&j| slopes.node(j).iter().copied())
        .collect();
    targets
        .par_chunks_exact(d)
        .map(|y| {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for (k, (s, off)) in sc.chunks_exact(d).zip(offsets).enumerate() {
                let v = dot(s, y) + off;
                if v > best {
                    best = v;
                    arg = k;
                }
            }
            (best, slope_idx[arg])
        })
        .unzip()
}

/// Naive conjugate of `f` onto `dual_grid`, with per-dual-node maximizers.
pub fn monotone_conjugate_with_argmax(
    f: &GridFn,
    dual_grid: &Arc<Grid>,
) -> Result<(GridFn, Vec<usize>)> {
    check_same_cone(f.grid(), dual_grid)?;
    let dom = f.dom();
    if dom.is_empty() {
        return Err(Error::Improper);
    }
    let offsets: Vec<f64> = dom.iter().map(|&i| -f.value(i).to_f64()).collect();
    let (vals, arg) = max_affine(f.grid(), &dom, &offsets, dual_grid.flat_coords());
    Ok((GridFn::from_f64(dual_grid.clone(), &vals)?, arg))
}

/// Naive O(N·M) conjugate of `f` onto `dual_grid`.
pub fn monotone_conjugate(f: &GridFn, dual_grid: &Arc<Grid>) -> Result<GridFn> {
    monotone_conjugate_with_argmax(f, dual_grid).map(|(g, _)| g)
}

/// Dual grid with the default radius factor and the same spacing as `g`.
pub fn default_dual_grid(g: &Grid) -> Result<Arc<Grid>> {
    build_grid(g.cone(), DEFAULT_DUAL_FACTOR * g.radius(), g.spacing()).map(Arc::new)
}

pub fn biconjugate(f: &GridFn, dual_grid: &Arc<Grid>) -> Result<ConjugateReport> {
    biconjugate_with(f, dual_grid, Method::Naive)
}

pub(crate) fn fast_applicable(primal: &Grid, dual: &Grid) -> bool {
    matches!(primal.cone(), Cone::Orthant(_))
        && primal.box_side().is_some()
        && dual.box_side().is_some()
        && primal.spacing() == dual.spacing()
}

pub fn biconjugate_with(
    f: &GridFn,
    dual_grid: &Arc<Grid>,
    method: Method,
) -> Result<ConjugateReport> {
    check_same_cone(f.grid(), dual_grid)?;
    let use_fast = match method {
        Method::Naive => false,
        Method::Fast => true,
        Method::Auto => fast_applicable(f.grid(), dual_grid),
    };
    let (fstar, argmax_star, fstarstar, argmax_starstar) = if use_fast {
        let (fs, a1) = fast::conjugate_box(f, dual_grid)?;
        let (fss, a2) = fast::conjugate_box(&fs, f.grid())?;
        (fs, a1, fss, a2)
    } else {
        let (fs, a1) = monotone_conjugate_with_argmax(f, dual_grid)?;
        let (fss, a2) = monotone_conjugate_with_argmax(&fs, f.grid())?;
        (fs, a1, fss, a2)
    };

    let mut max_gap = f64::NEG_INFINITY;
    let mut gap_argmax = 0;
    let mut max_violation: f64 = 0.0;
    for i in 0..f.len() {
        if let Some(v) = f.value(i).value() {
            let g = v - fstarstar.value(i).to_f64();
            if g > max_gap {
                max_gap = g;
                gap_argmax = i;
            }
            max_violation = max_violation.max(-g);
        }
    }
    Ok(ConjugateReport {
        f: f.clone(),
        fstar,
        fstarstar,
        max_gap_on_dom: max_gap,
        gap_argmax,
        max_violation,
        argmax_star,
        argmax_starstar,
        method: if use_fast {
            Method::Fast
        } else {
            Method::Naive
        },
    })
}

/// `f(x) + f*(u) - <x, u>` for primal node `x_index` and dual node `u_index`.
pub fn fenchel_young_gap(
    f: &GridFn,
    fstar: &GridFn,
    x_index: usize,
    u_index: usize,
) -> Result<f64> {
    check_same_cone(f.grid(), fstar.grid())?;
    let fx = f.value(x_index).value().ok_or(Error::InfiniteAt(x_index))?;
    let fu = fstar
        .value(u_index)
        .value()
        .ok_or(Error::InfiniteAt(u_index))?;
    Ok(fx + fu - dot(f.grid().node(x_index), fstar.grid().node(u_index)))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SubgradientReport {
    pub probes: usize,
    /// Central-difference slopes outside the cone (tolerance 1e-6).
    pub violations: usize,
    /// Most negative cone-membership margin seen among the slopes.
    pub worst_slope: Option<Vec<f64>>,
    /// Supporting slopes from the biconjugate argmax that left the cone.
    pub support_violations: usize,
    /// Largest `f(x) + f*(u) - <x, u>` at the supporting slope `u`.
    pub max_support_gap: f64,
}

/// Probes nodes whose axis neighbors (both directions) all carry finite values,
/// estimates a subgradient there by central differences, and checks it lies in
/// the cone. Also checks the supporting slope from the biconjugate argmax.
pub fn subgradient_in_cone_check(
    f: &GridFn,
    n_probes: usize,
    seed: RngSeed,
) -> Result<SubgradientReport> {
    let grid = f.grid();
    let d = grid.dim();
    let h = grid.spacing();
    let interior: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            f.value(i).is_finite()
                && (0..d).all(|a| {
                    [-1, 1].iter().all(|&s| {
                        grid.neighbor(i, a, s)
                            .is_some_and(|j| f.value(j).is_finite())
                    })
                })
        })
        .collect();
    if interior.is_empty() {
        return Err(Error::NoInteriorProbes);
    }
    let mut rng = seed.rng();
    let n = n_probes.min(interior.len()).max(1);
    let mut chosen: Vec<usize> = sample(&mut rng, interior.len(), n)
        .into_iter()
        .map(|k| interior[k])
        .collect();
    chosen.sort_unstable();

    let cone = f.cone();
    let mut violations = 0;
    let mut worst: Option<(f64, Vec<f64>)> = None;
    for &i in &chosen {
        let u: Vec<f64> = (0..d)
            .map(|a| {
                let up = f.value(grid.neighbor(i, a, 1).unwrap()).to_f64();
                let dn = f.value(grid.neighbor(i, a, -1).unwrap()).to_f64();
                (up - dn) / (2.0 * h)
            })
            .collect();
        let pu = cone.project_slice(&u);
        let miss: f64 = u
            .iter()
            .zip(&pu)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if !cone.contains_slice(&u, SUBGRADIENT_TOL) {
            violations += 1;
        }
        if worst.as_ref().is_none_or(|(m, _)| miss > *m) {
            worst = Some((miss, u));
        }
    }

    let dual = default_dual_grid(grid)?;
    let rep = biconjugate_with(f, &dual, Method::Auto)?;
    let mut support_violations = 0;
    let mut max_support_gap = f64::NEG_INFINITY;
    for &i in &chosen {
        let j = rep.argmax_starstar[i];
        if !cone.contains_slice(dual.node(j), SUBGRADIENT_TOL) {
            support_violations += 1;
        }
        max_support_gap = max_support_gap.max(fenchel_young_gap(f, &rep.fstar, i, j)?);
    }

    Ok(SubgradientReport {
        probes: chosen.len(),
        violations,
        worst_slope: worst.filter(|(m, _)| *m > 0.0).map(|(_, u)| u),
        support_violations,
        max_support_gap,
    })
}
