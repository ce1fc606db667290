//! Functions whose domain lies in a proper face: the ambient interior of the
//! domain is empty, yet f = f** still holds, and the biconjugate matches the
//! one computed inside the face's own coordinates.

use std::sync::Arc;

use conecal::analysis::boundary_domain_probe;
use conecal::cones::DEFAULT_TOL;
use conecal::faces::{lorentz_ray_face, orthant_face, psd_block_face, Face};
use conecal::linalg::Mat;
use conecal::{build_grid, Cone, ExtReal, GridFn, Point, RngSeed};

fn on_face(face: &Face, h: f64, f: impl Fn(&[f64]) -> f64 + Sync) -> conecal::Result<GridFn> {
    let g = Arc::new(build_grid(face.parent(), 2.0, h)?);
    GridFn::from_fn(g, |x| {
        match face.member(&Point::new(x.to_vec()).unwrap(), DEFAULT_TOL) {
            Ok(true) => ExtReal::finite(f(x)),
            _ => ExtReal::PosInf,
        }
    })
}

fn main() -> conecal::Result<()> {
    let cases = vec![
        (
            psd_block_face(2, 1, &Mat::identity(2))?,
            0.25,
            Box::new(|x: &[f64]| x[0] * x[0]) as Box<dyn Fn(&[f64]) -> f64 + Sync>,
        ),
        (
            lorentz_ray_face(2, &Point::new(vec![1.0, 1.0, 0.0])?)?,
            0.25,
            Box::new(|x: &[f64]| x[0]),
        ),
        (
            orthant_face(2, &[0])?,
            0.05,
            Box::new(|x: &[f64]| x[0] * x[0]),
        ),
    ];
    for (face, h, f) in cases {
        let gf = on_face(&face, h, |x| f(x))?;
        let v = boundary_domain_probe(&face, &gf, RngSeed(2))?;
        println!(
            "{} in {}: holds {}, face nodes {}, ambient vs reduced f** mismatch {:.1e}, off-face nodes diverging {}/{}",
            v.face,
            Cone::to_string(&face.parent()),
            v.holds,
            v.face_nodes,
            v.max_face_mismatch,
            v.off_face_divergent,
            v.off_face_nodes
        );
    }
    Ok(())
}
