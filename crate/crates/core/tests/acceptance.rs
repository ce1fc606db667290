//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line; the
//! target exits nonzero if any criterion fails.

use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use conecal::analysis::{
    boundary_domain_probe, check_normal_witness, gamma_audit, normal_cone_witness,
    verify_fenchel_moreau, CatalogFn, NormalConeConfig, VerifyConfig,
};
use conecal::cones::DEFAULT_TOL;
use conecal::conjugate::{
    default_dual_grid, fast_conjugate_orthant, fenchel_young_gap, monotone_conjugate,
    subgradient_in_cone_check,
};
use conecal::faces::{
    face_axiom_check, lorentz_ray_face, orthant_face, perfectness_audit, psd_block_face,
    separating_vector, Face,
};
use conecal::linalg::Mat;
use conecal::{build_grid, inner, Cone, Error, ExtReal, GridFn, Point, RngSeed};
use rand::Rng;
use rand_distr::StandardNormal;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn gaussian<R: Rng>(rng: &mut R, d: usize) -> Point {
    Point::new(
        (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )
    .unwrap()
}

fn sampled(f: &CatalogFn, cone: Cone, radius: f64, h: f64) -> GridFn {
    let b = f.bind(cone).unwrap();
    let g = Arc::new(build_grid(cone, radius, h).unwrap());
    GridFn::from_fn(g, |x| b.eval(x)).unwrap()
}

fn masked(
    face: &Face,
    cone: Cone,
    radius: f64,
    h: f64,
    f: impl Fn(&[f64]) -> f64 + Sync,
) -> GridFn {
    let g = Arc::new(build_grid(cone, radius, h).unwrap());
    GridFn::from_fn(g, |x| {
        if face
            .member(&Point::new(x.to_vec()).unwrap(), DEFAULT_TOL)
            .unwrap()
        {
            ExtReal::finite(f(x))
        } else {
            ExtReal::PosInf
        }
    })
    .unwrap()
}

fn fm_positive_suite() -> Outcome {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut runs = 0;
    let mut quad_final = f64::NAN;
    let plans = [
        (Cone::Orthant(1), 0.04),
        (Cone::Orthant(2), 0.04),
        (Cone::Lorentz(2), 0.5),
        (Cone::Psd(2), 0.5),
    ];
    for (cone, h0) in plans {
        for cf in CatalogFn::all_defaults() {
            let Ok(b) = cf.bind(cone) else { continue };
            if !b.in_gamma() {
                continue;
            }
            runs += 1;
            let v = verify_fenchel_moreau(
                &b,
                &VerifyConfig::new(cone, 2.0, h0).levels(3).seed(RngSeed(1)),
            )
            .unwrap();
            if cone == Cone::Orthant(1) && cf == CatalogFn::Quad {
                quad_final = v.final_level().max_gap_on_dom;
            }
            if !(v.identity_holds && v.gaps_nonincreasing) {
                failures.push(format!("{cf} on {cone}: {:?}", v.status));
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let passed = failures.is_empty() && quad_final <= 1e-2 && secs <= 60.0;
    outcome(
        passed,
        format!(
            "{runs} runs, 1-D quad final gap {quad_final:.2e}, {secs:.1}s, failures {failures:?}"
        ),
    )
}

fn counterexample_suite() -> Outcome {
    let cf: CatalogFn = "shifted-quad:1".parse().unwrap();
    let b = cf.bind(Cone::Orthant(1)).unwrap();
    let v = verify_fenchel_moreau(
        &b,
        &VerifyConfig::new(Cone::Orthant(1), 2.0, 0.04).levels(3),
    )
    .unwrap();
    let origin_gaps: Vec<f64> = v.levels.iter().map(|l| l.gap_at_origin.unwrap()).collect();
    let report = v.report.as_ref().unwrap();
    let g = report.f.grid();
    let mut err: f64 = 0.0;
    for i in 0..g.len() {
        let x = g.node(i)[0];
        let closed = (x - 1.0).max(0.0).powi(2);
        err = err.max((report.fstarstar.value(i).to_f64() - closed).abs());
    }
    let passed = v.gamma.monotonicity_violations > 0
        && origin_gaps.iter().all(|g| (g - 1.0).abs() <= 0.05)
        && err <= 1e-2
        && !v.identity_holds;
    outcome(
        passed,
        format!(
            "monotonicity violations {}, gap at 0 per level {origin_gaps:?}, closed-form error {err:.2e} at h=0.01",
            v.gamma.monotonicity_violations
        ),
    )
}

fn fast_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut mismatch = Vec::new();
    let mut speedup = 0.0;
    let grids = [(1, 2.0, 0.001), (2, 1.0, 1.0 / 63.0), (3, 1.0, 1.0 / 15.0)];
    for (d, r, h) in grids {
        let cone = Cone::Orthant(d);
        for cf in CatalogFn::all_defaults() {
            if !cf.applies_to(cone) {
                continue;
            }
            let f = sampled(&cf, cone, r, h);
            let t = Instant::now();
            let naive = monotone_conjugate(&f, f.grid()).unwrap();
            let t_naive = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let fast = fast_conjugate_orthant(&f).unwrap();
            let t_fast = t.elapsed().as_secs_f64();
            for (a, b) in naive.values().iter().zip(fast.values()) {
                let e = match (a, b) {
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs(),
                    (ExtReal::PosInf, ExtReal::PosInf) => 0.0,
                    _ => f64::INFINITY,
                };
                worst = worst.max(e);
            }
            if worst > 1e-12 {
                mismatch.push(format!("{cf} on {cone}"));
            }
            if d == 2 && cf == CatalogFn::Quad {
                assert_eq!(f.len(), 64 * 64);
                speedup = t_naive / t_fast.max(1e-9);
            }
        }
    }
    outcome(
        mismatch.is_empty() && speedup >= 10.0,
        format!("max |fast - naive| {worst:.1e}, speedup at 64x64 {speedup:.0}x, mismatches {mismatch:?}"),
    )
}

fn geometry_suite() -> Outcome {
    let mut cones: Vec<Cone> = (1..=6).map(Cone::Orthant).collect();
    cones.extend((1..=4).map(Cone::Psd));
    cones.extend((1..=6).map(Cone::Lorentz));
    let mut problems = Vec::new();
    let mut min_inner = f64::INFINITY;
    for (k, &c) in cones.iter().enumerate() {
        let rep = c.self_duality_audit(10_000, RngSeed(100 + k as u64));
        min_inner = min_inner.min(rep.min_inner);
        if !rep.passed() || rep.violations != 0 {
            problems.push(format!("{c} self-duality"));
        }
        let mut rng = RngSeed(200 + k as u64).rng();
        let d = c.ambient_dim();
        for _ in 0..1000 {
            let x = gaussian(&mut rng, d).scaled(3.0);
            let p = c.project(&x).unwrap();
            let pp = c.project(&p).unwrap();
            if p.dist(&pp) > 1e-12 * p.norm().max(1.0) || !c.contains(&p, DEFAULT_TOL).unwrap() {
                problems.push(format!("{c} idempotence"));
                break;
            }
        }
        let members: Vec<Point> = (0..100)
            .map(|_| c.sample_member(&mut rng).scaled(3.0))
            .collect();
        'opt: for _ in 0..100 {
            let x = gaussian(&mut rng, d).scaled(3.0);
            let dp = x.dist(&c.project(&x).unwrap());
            for z in &members {
                if dp > x.dist(z) + 1e-9 {
                    problems.push(format!("{c} optimality"));
                    break 'opt;
                }
            }
        }
        let mut found = 0;
        while found < 100 {
            let x = gaussian(&mut rng, d);
            if let Some(w) = c.duality_witness(&x).unwrap() {
                found += 1;
                if !(c.contains(&w, DEFAULT_TOL).unwrap() && inner(&x, &w).unwrap() < 0.0) {
                    problems.push(format!("{c} witness"));
                    break;
                }
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "{} cones, min member pairing {min_inner:.2e}, problems {problems:?}",
            cones.len()
        ),
    )
}

fn interior_hits(face: &Face, n: usize, seed: RngSeed) -> usize {
    let mut rng = seed.rng();
    let c = face.parent();
    (0..n)
        .filter(|_| {
            c.interior_contains(&face.sample_member(&mut rng), DEFAULT_TOL)
                .unwrap()
        })
        .count()
}

fn separation_pairs(faces: &[Face], seed: RngSeed) -> usize {
    let mut rng = seed.rng();
    let mut bad = 0;
    let mut pairs = 0;
    while pairs < 100 {
        let face = &faces[rng.random_range(0..faces.len())];
        let c = face.parent();
        let x = c.sample_member(&mut rng);
        if face.member(&x, DEFAULT_TOL).unwrap() {
            continue;
        }
        pairs += 1;
        let v = separating_vector(face, &x).unwrap();
        let on_face = (0..50)
            .map(|_| inner(&v, &face.sample_member(&mut rng)).unwrap().abs())
            .fold(0.0, f64::max);
        if !(c.contains(&v, DEFAULT_TOL).unwrap()
            && on_face <= 1e-9
            && inner(&v, &x).unwrap() >= 1e-9)
        {
            bad += 1;
        }
    }
    bad
}

fn face_suite() -> Outcome {
    let mut rng = RngSeed(5).rng();
    let mut psd_faces = Vec::new();
    for n in 1..=4 {
        psd_faces.push(Face::zero(Cone::Psd(n)));
        for _ in 0..20 {
            let q = Mat::random_orthogonal(n, &mut rng);
            for m in 1..=n {
                psd_faces.push(psd_block_face(n, m, &q).unwrap());
            }
        }
    }
    let mut lorentz_faces = Vec::new();
    for d in 1..=4 {
        let c = Cone::Lorentz(d);
        for _ in 0..20 {
            lorentz_faces.push(lorentz_ray_face(d, &c.sample_boundary(&mut rng)).unwrap());
        }
    }
    let mut orthant_faces = Vec::new();
    for d in 1..=4usize {
        for mask in 0u32..1 << d {
            let s: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).collect();
            orthant_faces.push(orthant_face(d, &s).unwrap());
        }
    }
    let mut violations = 0;
    let mut hits = 0;
    let mut checked = 0;
    for (k, face) in psd_faces
        .iter()
        .chain(&lorentz_faces)
        .chain(&orthant_faces)
        .enumerate()
    {
        let r = face_axiom_check(face, 1000, RngSeed(1000 + k as u64));
        violations += r.violations;
        if !face.is_whole() {
            hits += interior_hits(face, 1000, RngSeed(5000 + k as u64));
        }
        checked += 1;
    }
    let sep_bad: usize = [&psd_faces, &lorentz_faces, &orthant_faces]
        .iter()
        .enumerate()
        .map(|(k, fs)| {
            let proper: Vec<Face> = fs.iter().filter(|f| !f.is_whole()).cloned().collect();
            separation_pairs(&proper, RngSeed(9000 + k as u64))
        })
        .sum();
    outcome(
        violations == 0 && hits == 0 && sep_bad == 0,
        format!("{checked} faces, axiom violations {violations}, interior hits {hits}, separation failures {sep_bad}/300"),
    )
}

fn perfectness_suite() -> Outcome {
    let t0 = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for (k, c) in [Cone::Orthant(4), Cone::Psd(3), Cone::Lorentz(4)]
        .into_iter()
        .enumerate()
    {
        let r = perfectness_audit(c, 1000, RngSeed(40 + k as u64));
        let all_relint = r.faces.iter().all(|f| f.relint_ok);
        let reduced_clean = r.faces.iter().all(|f| f.reduced_violations == 0);
        ok &= r.passed && all_relint && reduced_clean;
        notes.push(format!(
            "{c}: {} faces {}",
            r.faces.len(),
            if r.passed { "ok" } else { "failed" }
        ));
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        ok && secs <= 120.0,
        format!("{}; {secs:.1}s", notes.join(", ")),
    )
}

fn boundary_suite() -> Outcome {
    let cases = [
        (
            psd_block_face(2, 1, &Mat::identity(2)).unwrap(),
            masked(
                &psd_block_face(2, 1, &Mat::identity(2)).unwrap(),
                Cone::Psd(2),
                2.0,
                0.125,
                |x| x[0] * x[0],
            ),
        ),
        (
            lorentz_ray_face(2, &Point::new(vec![1.0, 1.0, 0.0]).unwrap()).unwrap(),
            masked(
                &lorentz_ray_face(2, &Point::new(vec![1.0, 1.0, 0.0]).unwrap()).unwrap(),
                Cone::Lorentz(2),
                2.0,
                0.125,
                |x| x[0],
            ),
        ),
        (
            orthant_face(2, &[0]).unwrap(),
            masked(
                &orthant_face(2, &[0]).unwrap(),
                Cone::Orthant(2),
                2.0,
                0.02,
                |x| x[0] * x[0],
            ),
        ),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, (face, f)) in cases.iter().enumerate() {
        let v = boundary_domain_probe(face, f, RngSeed(70 + k as u64)).unwrap();
        ok &= v.holds
            && v.max_face_mismatch <= v.mismatch_tolerance
            && v.off_face_divergent == v.off_face_nodes;
        notes.push(format!(
            "{}: mismatch {:.1e}/{:.1e}, divergent off-face {}/{}",
            v.face,
            v.max_face_mismatch,
            v.mismatch_tolerance,
            v.off_face_divergent,
            v.off_face_nodes
        ));
    }
    outcome(ok, notes.join("; "))
}

fn fenchel_young_suite() -> Outcome {
    let plans = [
        (Cone::Orthant(1), 0.02),
        (Cone::Orthant(2), 0.1),
        (Cone::Lorentz(2), 0.25),
        (Cone::Psd(2), 0.25),
    ];
    let mut min_gap = f64::INFINITY;
    let mut sub_bad = Vec::new();
    let mut vacuous = Vec::new();
    let mut pairs = 0;
    for (k, (cone, h)) in plans.into_iter().enumerate() {
        for cf in CatalogFn::all_defaults() {
            let Ok(b) = cf.bind(cone) else { continue };
            let f = sampled(&cf, cone, 2.0, h);
            let dual = default_dual_grid(f.grid()).unwrap();
            let fs = monotone_conjugate(&f, &dual).unwrap();
            let dom = f.dom();
            let mut rng = RngSeed(300 + k as u64).rng();
            for _ in 0..10_000 {
                let xi = dom[rng.random_range(0..dom.len())];
                let ui = rng.random_range(0..dual.len());
                min_gap = min_gap.min(fenchel_young_gap(&f, &fs, xi, ui).unwrap());
                pairs += 1;
            }
            if b.in_gamma() && gamma_audit(&f, 2000, RngSeed(1)).certified() {
                match subgradient_in_cone_check(&f, 500, RngSeed(400 + k as u64)) {
                    Ok(r) if r.violations == 0 && r.support_violations == 0 => {}
                    Ok(_) => sub_bad.push(format!("{cf} on {cone}")),
                    Err(Error::NoInteriorProbes) => vacuous.push(format!("{cf} on {cone}")),
                    Err(e) => sub_bad.push(format!("{cf} on {cone}: {e}")),
                }
            }
        }
    }
    outcome(
        min_gap >= -1e-9 && sub_bad.is_empty(),
        format!(
            "{pairs} pairs, min gap {min_gap:.1e}, subgradient failures {sub_bad:?}, no interior probes (vacuous) {}",
            vacuous.len()
        ),
    )
}

fn normal_cone_suite() -> Outcome {
    let cfg = NormalConeConfig::default();
    let g = build_grid(Cone::Orthant(2), 1.0, 0.05).unwrap();
    let simplex: Vec<Point> = (0..g.len())
        .map(|i| g.point(i))
        .filter(|p| p.coords()[0] + p.coords()[1] <= 1.0 + 1e-9)
        .collect();
    let y = Point::new(vec![1.0, 0.0]).unwrap();
    let z1 = normal_cone_witness(&simplex, &y, Cone::Orthant(2), &cfg).unwrap();
    let c1 = check_normal_witness(Cone::Orthant(2), &simplex, &y, &z1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let diag = check_normal_witness(
        Cone::Orthant(2),
        &simplex,
        &y,
        &Point::new(vec![s, s]).unwrap(),
    );

    let g = build_grid(Cone::Lorentz(1), 1.5, 0.05).unwrap();
    let truncated: Vec<Point> = (0..g.len())
        .map(|i| g.point(i))
        .filter(|p| p.coords()[0] <= 1.0 + 1e-9)
        .collect();
    let y2 = Point::new(vec![1.0, 1.0]).unwrap();
    let z2 = normal_cone_witness(&truncated, &y2, Cone::Lorentz(1), &cfg).unwrap();
    let c2 = check_normal_witness(Cone::Lorentz(1), &truncated, &y2, &z2);

    // (0.3, 0.4) is inside the simplex and no larger multiple of it is a node
    let inside = Point::new(vec![0.3, 0.4]).unwrap();
    let interior = normal_cone_witness(&simplex, &inside, Cone::Orthant(2), &cfg);
    let fails_cleanly = matches!(interior, Err(Error::SearchFailed { .. }));
    outcome(
        c1.passed && diag.passed && c2.passed && fails_cleanly,
        format!(
            "simplex z={:?} violation {:.1e}; lorentz z={:?} pairing {:.4}; interior probe: {}",
            z1.coords(),
            c1.max_violation,
            z2.coords(),
            c2.pairing,
            match interior {
                Err(e) => e.to_string(),
                Ok(z) => format!("unexpected witness {:?}", z.coords()),
            }
        ),
    )
}

fn determinism_suite() -> Outcome {
    let runs: [&[&str]; 4] = [
        &[
            "verify",
            "--cone",
            "orthant:1",
            "--fn",
            "catalog:shifted-quad:1",
            "--radius",
            "2",
            "--h",
            "0.02",
            "--seed",
            "7",
        ],
        &[
            "verify",
            "--cone",
            "psd:2",
            "--fn",
            "catalog:trace",
            "--radius",
            "2",
            "--h",
            "0.5",
            "--levels",
            "2",
            "--seed",
            "7",
        ],
        &[
            "audit-cone",
            "--cone",
            "lorentz:3",
            "--samples",
            "2000",
            "--seed",
            "7",
        ],
        &[
            "faces",
            "--cone",
            "psd:2",
            "--samples",
            "200",
            "--seed",
            "7",
        ],
    ];
    let mut diffs = Vec::new();
    for args in runs {
        let go = |threads: &str| {
            let o = Command::new(env!("CARGO_BIN_EXE_conecal"))
                .args(args)
                .env("CONECAL_THREADS", threads)
                .output()
                .expect("binary runs");
            let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("JSON report");
            v.as_object_mut().unwrap().remove("timings");
            (o.status.code(), serde_json::to_string(&v).unwrap())
        };
        let a = go("1");
        let b = go("1");
        let c = go("0");
        if a != b || a != c {
            diffs.push(args[0..3].join(" "));
        }
    }
    outcome(
        diffs.is_empty(),
        format!("{} commands x 3 runs, differing {diffs:?}", runs.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 Fenchel-Moreau positive suite", fm_positive_suite),
        ("2 counterexample suite", counterexample_suite),
        ("3 fast vs naive conjugate", fast_equivalence),
        ("4 cone geometry", geometry_suite),
        ("5 faces", face_suite),
        ("6 perfectness audit", perfectness_suite),
        ("7 boundary-supported domains", boundary_suite),
        ("8 Fenchel-Young and subgradients", fenchel_young_suite),
        ("9 normal-cone witnesses", normal_cone_suite),
        ("10 CLI determinism", determinism_suite),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let t = Instant::now();
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {name}: {tag} ({:.1}s) {}",
            t.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.passed {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
