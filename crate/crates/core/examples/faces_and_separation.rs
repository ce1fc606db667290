//! Faces from samples, the face axiom, and separating vectors.

use conecal::cones::DEFAULT_TOL;
use conecal::faces::{face_axiom_check, generated_face, psd_block_face, separating_vector};
use conecal::linalg::{Mat, SymMat};
use conecal::{inner, Cone, Point, RngSeed};

fn main() -> conecal::Result<()> {
    let samples = [
        Point::new(vec![1.0, 0.0, 0.0])?,
        Point::new(vec![0.0, 2.0, 0.0])?,
    ];
    let f = generated_face(Cone::Orthant(3), &samples)?;
    println!("orthant samples generate {f} (span dim {})", f.span_dim());

    let rank_one = SymMat::diag(&[1.0, 0.0]).to_point();
    let f = generated_face(Cone::Psd(2), &[rank_one])?;
    println!("diag(1,0) generates {f}");

    let ray = generated_face(Cone::Lorentz(2), &[Point::new(vec![1.0, 1.0, 0.0])?])?;
    let whole = generated_face(
        Cone::Lorentz(2),
        &[
            Point::new(vec![1.0, 1.0, 0.0])?,
            Point::new(vec![1.0, 0.0, 1.0])?,
        ],
    )?;
    println!("one boundary ray: {ray}; two distinct rays: {whole}");

    let mut rng = RngSeed(3).rng();
    let q = Mat::random_orthogonal(3, &mut rng);
    let face = psd_block_face(3, 2, &q)?;
    let rep = face_axiom_check(&face, 1000, RngSeed(4));
    println!(
        "{face}: {} order-interval pairs, {} leave the face",
        rep.pairs, rep.violations
    );

    let x = Cone::Psd(3).sample_interior(&mut rng);
    let v = separating_vector(&face, &x)?;
    let y = face.sample_member(&mut rng);
    println!(
        "separator: in cone {}, <v, y> = {:.1e} on the face, <v, x> = {:.4}",
        Cone::Psd(3).contains(&v, DEFAULT_TOL)?,
        inner(&v, &y)?,
        inner(&v, &x)?
    );
    Ok(())
}
