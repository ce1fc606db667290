//! Membership, projection and sampled self-duality for the three cones.

use conecal::{inner, Cone, Point, RngSeed};

fn main() -> conecal::Result<()> {
    let cones = [Cone::Orthant(3), Cone::Psd(2), Cone::Lorentz(2)];
    let x = Point::new(vec![1.0, -2.0, 0.5])?;

    for c in cones {
        let p = c.project(&x)?;
        println!(
            "{c}: x in cone? {}  projection {:?}",
            c.contains(&x, 1e-9)?,
            p.coords()
        );
        if let Some(w) = c.duality_witness(&x)? {
            println!("  witness w in {c} with <x, w> = {:.4}", inner(&x, &w)?);
        }
        let rep = c.self_duality_audit(5_000, RngSeed(1));
        println!(
            "  self-duality: {} pairs, min <a, b> = {:.2e}, violations {}, converse failures {}",
            rep.pairs, rep.min_inner, rep.violations, rep.converse_failures
        );
    }

    // the partial order induced by the Lorentz cone
    let l = Cone::Lorentz(2);
    let a = Point::new(vec![1.0, 0.5, 0.0])?;
    let b = Point::new(vec![3.0, 1.0, 1.0])?;
    println!("{a:?} <= {b:?} in {l}: {}", l.order_leq(&a, &b, 1e-9)?);
    Ok(())
}
