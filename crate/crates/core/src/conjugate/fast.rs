//! Dimension-factored conjugate for full orthant box grids.
//!
//! On a box the sup over `z` splits into one 1-D discrete Legendre transform
//! per axis. Each 1-D transform takes the lower convex hull of the line and
//! walks a pointer along it: the maximizer never moves left as the slope grows.

use std::sync::Arc;

use rayon::prelude::*;

use super::GridFn;
use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::grid::Grid;

const NO_ARG: u32 = u32::MAX;

/// `f*` on the same grid as `f` (the grid doubles as the dual grid).
pub fn fast_conjugate_orthant(f: &GridFn) -> Result<GridFn> {
    let g = f.grid().clone();
    conjugate_box(f, &g).map(|(v, _)| v)
}

/// `f*` on a box dual grid of the same spacing and possibly different radius.
pub fn fast_conjugate_orthant_onto(f: &GridFn, dual_grid: &Arc<Grid>) -> Result<GridFn> {
    conjugate_box(f, dual_grid).map(|(v, _)| v)
}

pub(crate) fn conjugate_box(f: &GridFn, out: &Arc<Grid>) -> Result<(GridFn, Vec<usize>)> {
    let g = f.grid();
    if !matches!(g.cone(), Cone::Orthant(_)) {
        return Err(Error::FastTransform(format!(
            "needs an orthant grid, got {}",
            g.cone()
        )));
    }
    if g.cone() != out.cone() {
        return Err(Error::ConeMismatch(
            g.cone().to_string(),
            out.cone().to_string(),
        ));
    }
    let (Some(n_in), Some(n_out)) = (g.box_side(), out.box_side()) else {
        return Err(Error::FastTransform(
            "grid is not a full box lattice".into(),
        ));
    };
    if g.spacing() != out.spacing() {
        return Err(Error::FastTransform(format!(
            "primal spacing {} differs from dual spacing {}",
            g.spacing(),
            out.spacing()
        )));
    }
    let d = g.dim();
    let h = g.spacing();
    let zs: Vec<f64> = (0..n_in).map(|k| k as f64 * h).collect();
    let ys: Vec<f64> = (0..n_out).map(|k| k as f64 * h).collect();

    let mut cur = f.as_f64();
    let mut choices: Vec<Vec<u32>> = vec![Vec::new(); d];
    for a in (0..d).rev() {
        let outer = n_in.pow(a as u32);
        let inner = n_out.pow((d - 1 - a) as u32);
        let negate = a != d - 1;
        let lines: Vec<(Vec<f64>, Vec<u32>)> = (0..outer * inner)
            .into_par_iter()
            .map(|l| {
                let (o, r) = (l / inner, l % inner);
                let phi: Vec<f64> = (0..n_in)
                    .map(|k| {
                        let v = cur[(o * n_in + k) * inner + r];
                        if negate {
                            -v
                        } else {
                            v
                        }
                    })
                    .collect();
                legendre_1d(&zs, &phi, &ys)
            })
            .collect::<Result<_>>()?;
        let mut next = vec![0.0; outer * n_out * inner];
        let mut choice = vec![NO_ARG; outer * n_out * inner];
        for (l, (vals, args)) in lines.into_iter().enumerate() {
            let (o, r) = (l / inner, l % inner);
            for j in 0..n_out {
                next[(o * n_out + j) * inner + r] = vals[j];
                choice[(o * n_out + j) * inner + r] = args[j];
            }
        }
        cur = next;
        choices[a] = choice;
    }

    // trace each dual node back to its primal maximizer
    let argmax: Vec<usize> = (0..out.len())
        .into_par_iter()
        .map(|t| {
            let mut key: Vec<usize> = out.lattice_index(t).iter().map(|&k| k as usize).collect();
            for a in 0..d {
                let mut flat = 0;
                for (b, &k) in key.iter().enumerate() {
                    flat = flat * if b < a { n_in } else { n_out } + k;
                }
                let z = choices[a][flat];
                if z == NO_ARG {
                    return usize::MAX;
                }
                key[a] = z as usize;
            }
            key.iter().fold(0, |acc, &k| acc * n_in + k)
        })
        .collect();

    Ok((GridFn::from_f64(out.clone(), &cur)?, argmax))
}

/// `out[j] = max_k zs[k]*ys[j] - phi[k]` over finite `phi`, with maximizer indices.
/// Entries are `-inf` when the line carries no finite value.
fn legendre_1d(zs: &[f64], phi: &[f64], ys: &[f64]) -> Result<(Vec<f64>, Vec<u32>)> {
    let mut hull: Vec<usize> = Vec::with_capacity(phi.len());
    for (c, &pc) in phi.iter().enumerate() {
        if !pc.is_finite() {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (phi[b] - phi[a]) * (zs[c] - zs[b]) >= (pc - phi[b]) * (zs[b] - zs[a]) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(c);
    }
    if hull.is_empty() {
        return Ok((vec![f64::NEG_INFINITY; ys.len()], vec![NO_ARG; ys.len()]));
    }

    let val = |k: usize, y: f64| zs[k] * y - phi[k];
    let mut vals = Vec::with_capacity(ys.len());
    let mut args = Vec::with_capacity(ys.len());
    let mut p = 0;
    for &y in ys {
        while p + 1 < hull.len() && val(hull[p + 1], y) > val(hull[p], y) {
            p += 1;
        }
        vals.push(val(hull[p], y));
        args.push(hull[p] as u32);
    }
    if args.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::FastTransform(
            "argmax sequence decreased along a line".into(),
        ));
    }
    Ok((vals, args))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugate::{biconjugate_with, monotone_conjugate, Method};
    use crate::grid::build_grid;
    use crate::value::ExtReal;

    fn max_diff(a: &GridFn, b: &GridFn) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x.to_f64() - y.to_f64()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn one_dimensional_quad() {
        let g = Arc::new(build_grid(Cone::Orthant(1), 2.0, 0.01).unwrap());
        let f = GridFn::from_fn(g.clone(), |x| ExtReal::finite(x[0] * x[0])).unwrap();
        let fast = fast_conjugate_orthant(&f).unwrap();
        let naive = monotone_conjugate(&f, &g).unwrap();
        assert!(max_diff(&fast, &naive) <= 1e-12);
    }

    #[test]
    fn two_dimensional_cross_term() {
        let g = Arc::new(build_grid(Cone::Orthant(2), 1.0, 1.0 / 63.0).unwrap());
        assert_eq!(g.len(), 64 * 64);
        let f = GridFn::from_fn(g.clone(), |x| {
            ExtReal::finite(x[0] * x[0] + x[0] * x[1] + x[1] * x[1])
        })
        .unwrap();
        let fast = fast_conjugate_orthant(&f).unwrap();
        let naive = monotone_conjugate(&f, &g).unwrap();
        assert!(max_diff(&fast, &naive) <= 1e-12);
    }

    #[test]
    fn indicator_and_wider_dual() {
        let g = Arc::new(build_grid(Cone::Orthant(3), 1.0, 0.25).unwrap());
        let dual = Arc::new(build_grid(Cone::Orthant(3), 2.0, 0.25).unwrap());
        let f = GridFn::from_fn(g.clone(), |x| {
            if x.iter().all(|&c| c == 0.0) {
                ExtReal::ZERO
            } else {
                ExtReal::PosInf
            }
        })
        .unwrap();
        let fast = fast_conjugate_orthant_onto(&f, &dual).unwrap();
        assert!(fast.values().iter().all(|v| *v == ExtReal::ZERO));

        let f = GridFn::from_fn(g.clone(), |x| {
            if x[1] > 0.6 {
                ExtReal::PosInf
            } else {
                ExtReal::finite((x[0] - 0.5).powi(2) + x[2])
            }
        })
        .unwrap();
        let a = biconjugate_with(&f, &dual, Method::Fast).unwrap();
        let b = biconjugate_with(&f, &dual, Method::Naive).unwrap();
        assert!(max_diff(&a.fstar, &b.fstar) <= 1e-12);
        assert!(max_diff(&a.fstarstar, &b.fstarstar) <= 1e-12);
        // traced maximizers attain the same values
        for j in 0..dual.len() {
            let i = a.argmax_star[j];
            let v = crate::point::dot(g.node(i), dual.node(j)) - f.value(i).to_f64();
            assert!((v - a.fstar.value(j).to_f64()).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_non_box() {
        let g = Arc::new(build_grid(Cone::Lorentz(1), 1.0, 0.5).unwrap());
        let f = GridFn::from_fn(g, |_| ExtReal::ZERO).unwrap();
        assert!(matches!(
            fast_conjugate_orthant(&f),
            Err(Error::FastTransform(_))
        ));
    }

    #[test]
    fn hull_walk_matches_brute_force() {
        let zs: Vec<f64> = (0..7).map(|k| k as f64 * 0.5).collect();
        let phi = [1.0, 0.2, f64::INFINITY, 0.2, 0.9, 0.9, 3.0];
        let ys: Vec<f64> = (0..9).map(|k| k as f64 * 0.5).collect();
        let (vals, args) = legendre_1d(&zs, &phi, &ys).unwrap();
        for (j, &y) in ys.iter().enumerate() {
            let mut best = (f64::NEG_INFINITY, 0);
            for k in 0..7 {
                if phi[k].is_finite() && zs[k] * y - phi[k] > best.0 {
                    best = (zs[k] * y - phi[k], k);
                }
            }
            assert_eq!(vals[j], best.0);
            assert_eq!(args[j] as usize, best.1);
        }
    }
}
