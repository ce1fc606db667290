use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::gamma::{gamma_audit, GammaAudit};
use super::FnSource;
use crate::cones::{Cone, DEFAULT_TOL};
use crate::conjugate::{
    biconjugate_with, conjugate_box, fast_applicable, max_affine, monotone_conjugate,
    ConjugateReport, GridFn, Method, DEFAULT_DUAL_FACTOR,
};
use crate::error::{Error, Result};
use crate::faces::Face;
use crate::grid::{build_grid, Grid};
use crate::point::Point;
use crate::rng::RngSeed;

/// Dual radius multiple used by the divergence probe.
pub const PROBE_FACTOR: f64 = 1.5;

/// Relative growth above which a node's biconjugate counts as diverging.
pub const PROBE_REL_GROWTH: f64 = 0.1;

/// Slack allowed between successive refinement gaps.
pub const TREND_TOL: f64 = 1e-9;

/// Acceptable final gap for a certified function: `5 * h * dual_radius`.
pub fn gap_threshold(h: f64, dual_radius: f64) -> f64 {
    5.0 * h * dual_radius
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub cone: Cone,
    pub radius: f64,
    /// Coarsest spacing; each further level halves it.
    pub spacing: f64,
    pub levels: usize,
    /// Defaults to twice the primal radius.
    pub dual_radius: Option<f64>,
    pub seed: RngSeed,
    pub gamma_pairs: usize,
    pub method: Method,
}

impl VerifyConfig {
    pub fn new(cone: Cone, radius: f64, spacing: f64) -> Self {
        VerifyConfig {
            cone,
            radius,
            spacing,
            levels: 1,
            dual_radius: None,
            seed: RngSeed(0),
            gamma_pairs: 2000,
            method: Method::Auto,
        }
    }

    pub fn levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }

    pub fn dual_radius(mut self, r: f64) -> Self {
        self.dual_radius = Some(r);
        self
    }

    pub fn seed(mut self, seed: RngSeed) -> Self {
        self.seed = seed;
        self
    }

    pub fn method(mut self, m: Method) -> Self {
        self.method = m;
        self
    }

    pub fn resolved_dual_radius(&self) -> f64 {
        self.dual_radius
            .unwrap_or(DEFAULT_DUAL_FACTOR * self.radius)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    IdentityHolds,
    /// The function passed the hypothesis audit but the discrete identity did not meet its bound.
    InconclusiveDiscretization,
    /// The function failed the hypothesis audit.
    HypothesisFailed,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub h: f64,
    pub nodes: usize,
    pub dual_nodes: usize,
    pub finite_nodes: usize,
    pub max_gap_on_dom: f64,
    pub gap_location: Vec<f64>,
    pub max_violation: f64,
    pub gap_at_origin: Option<f64>,
    /// Nodes where `f = +inf`.
    pub infinite_nodes: usize,
    /// Of those, nodes whose biconjugate grew with the dual radius.
    pub divergent_nodes: usize,
    pub gamma: GammaAudit,
    pub method: Method,
    pub primal_grid_sha256: String,
    pub dual_grid_sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelTiming {
    pub h: f64,
    pub transform_seconds: f64,
    pub probe_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FMVerdict {
    pub function: String,
    pub cone: String,
    pub radius: f64,
    pub dual_radius: f64,
    /// Analytic hypothesis status of the input family, when known.
    pub declared_gamma: Option<bool>,
    /// Audit at the finest level.
    pub gamma: GammaAudit,
    pub gamma_certified: bool,
    pub levels: Vec<LevelReport>,
    pub refinement_trend: Vec<(f64, f64)>,
    pub gap_threshold: f64,
    pub gaps_nonincreasing: bool,
    pub infinite_nodes_divergent: bool,
    pub identity_holds: bool,
    pub status: Status,
    /// Transform outputs at the finest level.
    #[serde(skip)]
    pub report: Option<ConjugateReport>,
    #[serde(skip)]
    pub timings: Vec<LevelTiming>,
}

impl FMVerdict {
    pub fn final_level(&self) -> &LevelReport {
        self.levels.last().expect("at least one level")
    }

    /// Refinement trend as `h,max_gap` CSV.
    pub fn trend_csv(&self) -> String {
        let mut s = String::from("h,max_gap\n");
        for (h, g) in &self.refinement_trend {
            s.push_str(&format!("{h},{g}\n"));
        }
        s
    }
}

struct LevelOutcome {
    level: LevelReport,
    timing: LevelTiming,
    report: ConjugateReport,
    divergent: Vec<bool>,
}

fn run_level(
    f: &GridFn,
    dual_radius: f64,
    method: Method,
    gamma_pairs: usize,
    seed: RngSeed,
) -> Result<LevelOutcome> {
    let grid = f.grid();
    let h = grid.spacing();
    let dual = Arc::new(build_grid(grid.cone(), dual_radius, h)?);
    let gamma = gamma_audit(f, gamma_pairs, seed);

    let t0 = Instant::now();
    let report = biconjugate_with(f, &dual, method)?;
    let transform_seconds = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let divergent = divergence_probe(f, &report, dual_radius)?;
    let probe_seconds = t1.elapsed().as_secs_f64();

    let origin = grid.origin_index();
    let infinite_nodes = f.values().iter().filter(|v| v.is_inf()).count();
    let level = LevelReport {
        h,
        nodes: grid.len(),
        dual_nodes: dual.len(),
        finite_nodes: grid.len() - infinite_nodes,
        max_gap_on_dom: report.max_gap_on_dom,
        gap_location: grid.node(report.gap_argmax).to_vec(),
        max_violation: report.max_violation,
        gap_at_origin: report.gap_at(origin),
        infinite_nodes,
        divergent_nodes: divergent.iter().filter(|&&d| d).count(),
        gamma,
        method: report.method,
        primal_grid_sha256: grid.hash_hex(),
        dual_grid_sha256: dual.hash_hex(),
    };
    Ok(LevelOutcome {
        level,
        timing: LevelTiming {
            h,
            transform_seconds,
            probe_seconds,
        },
        report,
        divergent,
    })
}

/// Recomputes `f**` at the `+inf` nodes of `f` with the dual radius scaled by
/// 1.5 and flags nodes whose value grew by more than 10% (or, near zero, by
/// more than a tenth of the growth a unit-slope direction would show).
fn divergence_probe(f: &GridFn, report: &ConjugateReport, dual_radius: f64) -> Result<Vec<bool>> {
    let grid = f.grid();
    let inf_nodes: Vec<usize> = (0..grid.len()).filter(|&i| f.value(i).is_inf()).collect();
    if inf_nodes.is_empty() {
        return Ok(Vec::new());
    }
    let h = grid.spacing();
    let big_r = PROBE_FACTOR * dual_radius;
    let big = Arc::new(build_grid(grid.cone(), big_r, h)?);
    let big_vals: Vec<f64> = if fast_applicable(grid, &big) {
        let (fs, _) = conjugate_box(f, &big)?;
        let (fss, _) = conjugate_box(&fs, grid)?;
        inf_nodes.iter().map(|&i| fss.value(i).to_f64()).collect()
    } else {
        let fs = monotone_conjugate(f, &big)?;
        let idx: Vec<usize> = (0..big.len()).collect();
        let offsets: Vec<f64> = fs.values().iter().map(|v| -v.to_f64()).collect();
        let targets: Vec<f64> = inf_nodes
            .iter()
            .flat_map(|&i| grid.node(i).iter().copied())
            .collect();
        max_affine(&big, &idx, &offsets, &targets).0
    };
    let floor = PROBE_REL_GROWTH * (big_r - dual_radius) * h;
    Ok(inf_nodes
        .iter()
        .zip(big_vals)
        .map(|(&i, b)| {
            let base = report.fstarstar.value(i).to_f64();
            let growth = b - base;
            growth > PROBE_REL_GROWTH * base.abs() || growth > floor
        })
        .collect())
}

fn assemble(
    function: String,
    declared_gamma: Option<bool>,
    cone: Cone,
    radius: f64,
    dual_radius: f64,
    outcomes: Vec<LevelOutcome>,
) -> FMVerdict {
    let gamma_certified = outcomes.iter().all(|o| o.level.gamma.certified());
    let trend: Vec<(f64, f64)> = outcomes
        .iter()
        .map(|o| (o.level.h, o.level.max_gap_on_dom))
        .collect();
    let gaps_nonincreasing = trend.windows(2).all(|w| w[1].1 <= w[0].1 + TREND_TOL);
    let h_final = trend.last().expect("at least one level").0;
    let threshold = gap_threshold(h_final, dual_radius);
    let final_ok = trend.last().unwrap().1 <= threshold;
    let infinite_nodes_divergent = outcomes.iter().all(|o| o.divergent.iter().all(|&d| d));
    let identity_holds =
        gamma_certified && gaps_nonincreasing && final_ok && infinite_nodes_divergent;
    let status = if identity_holds {
        Status::IdentityHolds
    } else if gamma_certified {
        Status::InconclusiveDiscretization
    } else {
        Status::HypothesisFailed
    };
    let mut levels = Vec::with_capacity(outcomes.len());
    let mut timings = Vec::with_capacity(outcomes.len());
    let mut report = None;
    for o in outcomes {
        levels.push(o.level);
        timings.push(o.timing);
        report = Some(o.report);
    }
    FMVerdict {
        function,
        cone: cone.to_string(),
        radius,
        dual_radius,
        declared_gamma,
        gamma: levels.last().unwrap().gamma.clone(),
        gamma_certified,
        levels,
        refinement_trend: trend,
        gap_threshold: threshold,
        gaps_nonincreasing,
        infinite_nodes_divergent,
        identity_holds,
        status,
        report,
        timings,
    }
}

/// Samples `src` on grids of spacing `h, h/2, ...`, audits the hypotheses and
/// compares `f**` with `f` at every level.
pub fn verify_fenchel_moreau(src: &dyn FnSource, cfg: &VerifyConfig) -> Result<FMVerdict> {
    if cfg.levels == 0 {
        return Err(Error::InvalidParameter(
            "at least one refinement level is required".into(),
        ));
    }
    let dual_radius = cfg.resolved_dual_radius();
    if !(dual_radius.is_finite() && dual_radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dual radius must be positive, got {dual_radius}"
        )));
    }
    // fail on the finest grid before doing any work
    let finest = cfg.spacing / 2f64.powi(cfg.levels as i32 - 1);
    let mut outcomes = Vec::with_capacity(cfg.levels);
    for l in 0..cfg.levels {
        let h = cfg.spacing / 2f64.powi(l as i32);
        let grid = Arc::new(build_grid(cfg.cone, cfg.radius, h)?);
        if l == 0 && cfg.levels > 1 {
            build_grid(cfg.cone, dual_radius, finest)?;
        }
        let f = GridFn::from_fn(grid, |x| src.eval(x))?;
        outcomes.push(run_level(
            &f,
            dual_radius,
            cfg.method,
            cfg.gamma_pairs,
            cfg.seed.derive(l as u64),
        )?);
    }
    Ok(assemble(
        src.describe(),
        src.gamma_flag(),
        cfg.cone,
        cfg.radius,
        dual_radius,
        outcomes,
    ))
}

/// Single-level verification of an already sampled function.
pub fn verify_gridfn(f: &GridFn, dual_radius: Option<f64>, seed: RngSeed) -> Result<FMVerdict> {
    let g = f.grid();
    let dual_radius = dual_radius.unwrap_or(DEFAULT_DUAL_FACTOR * g.radius());
    let o = run_level(f, dual_radius, Method::Auto, 2000, seed)?;
    Ok(assemble(
        "grid-function".into(),
        None,
        g.cone(),
        g.radius(),
        dual_radius,
        vec![o],
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryVerdict {
    pub face: String,
    pub ambient: FMVerdict,
    /// Verification of the same function in span-basis coordinates; absent for the zero face.
    pub reduced: Option<FMVerdict>,
    pub face_nodes: usize,
    /// `max |ambient f** - reduced f**|` over face nodes where `f` is finite.
    pub max_face_mismatch: f64,
    pub mismatch_tolerance: f64,
    pub off_face_nodes: usize,
    pub off_face_divergent: usize,
    pub holds: bool,
}

/// Verifies a function whose domain lies in a face (so the ambient interior of
/// the domain is empty), once on the ambient grid and once on the face's own
/// coordinates, and compares the two biconjugates on the face.
pub fn boundary_domain_probe(
    face: &Face,
    f_on_face: &GridFn,
    seed: RngSeed,
) -> Result<BoundaryVerdict> {
    let grid = f_on_face.grid();
    if grid.cone() != face.parent() {
        return Err(Error::ConeMismatch(
            grid.cone().to_string(),
            face.parent().to_string(),
        ));
    }
    let on_face: Vec<bool> = (0..grid.len())
        .map(|i| face.member(&grid.point(i), DEFAULT_TOL))
        .collect::<Result<_>>()?;
    if (0..grid.len()).any(|i| !on_face[i] && f_on_face.value(i).is_finite()) {
        return Err(Error::InvalidParameter(
            "function is finite off the face".into(),
        ));
    }
    let ambient = verify_gridfn(f_on_face, None, seed)?;
    let face_idx: Vec<usize> = (0..grid.len()).filter(|&i| on_face[i]).collect();
    let off_face_nodes = grid.len() - face_idx.len();
    let off_face_divergent = {
        let lvl = ambient.final_level();
        // off-face nodes are exactly the +inf nodes outside the face
        let inf_on_face = face_idx
            .iter()
            .filter(|&&i| f_on_face.value(i).is_inf())
            .count();
        lvl.divergent_nodes
            .saturating_sub(inf_on_face)
            .min(off_face_nodes)
    };
    let single_tol = ambient.gap_threshold;

    let Some(rc) = face.reduced_cone() else {
        let holds = ambient.identity_holds;
        return Ok(BoundaryVerdict {
            face: face.to_string(),
            ambient,
            reduced: None,
            face_nodes: face_idx.len(),
            max_face_mismatch: 0.0,
            mismatch_tolerance: 2.0 * single_tol,
            off_face_nodes,
            off_face_divergent,
            holds,
        });
    };

    let reduced_pts: Vec<Point> = face_idx
        .iter()
        .map(|&i| face.reduce(&grid.point(i)).map(Point::from_vec_unchecked))
        .collect::<Result<_>>()?;
    let h_red = reduced_pts
        .iter()
        .flat_map(|p| p.coords().iter().map(|c| c.abs()))
        .filter(|&c| c > 1e-12)
        .fold(f64::INFINITY, f64::min);
    if !h_red.is_finite() {
        return Err(Error::InvalidParameter(
            "face carries only the origin".into(),
        ));
    }
    let rgrid = Arc::new(Grid::from_nodes(rc, h_red, &reduced_pts)?);
    let rvals = face_idx.iter().map(|&i| f_on_face.value(i)).collect();
    let rf = GridFn::new(rgrid.clone(), rvals)?;
    let reduced = verify_gridfn(&rf, Some(DEFAULT_DUAL_FACTOR * rgrid.radius()), seed)?;

    let amb = ambient.report.as_ref().expect("report kept");
    let red = reduced.report.as_ref().expect("report kept");
    let mut mismatch: f64 = 0.0;
    for (k, &i) in face_idx.iter().enumerate() {
        if f_on_face.value(i).is_finite() {
            let d = (amb.fstarstar.value(i).to_f64() - red.fstarstar.value(k).to_f64()).abs();
            mismatch = mismatch.max(d);
        }
    }
    let tol = 2.0 * single_tol;
    let holds = ambient.identity_holds
        && reduced.identity_holds
        && mismatch <= tol
        && off_face_divergent == off_face_nodes;
    Ok(BoundaryVerdict {
        face: face.to_string(),
        ambient,
        reduced: Some(reduced),
        face_nodes: face_idx.len(),
        max_face_mismatch: mismatch,
        mismatch_tolerance: tol,
        off_face_nodes,
        off_face_divergent,
        holds,
    })
}
