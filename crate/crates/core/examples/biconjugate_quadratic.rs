//! Refinement study for f(x) = |x|^2 on several cones: the biconjugate
//! reproduces f and the gap shrinks (or stays at rounding level) as h halves.

use conecal::analysis::{verify_fenchel_moreau, CatalogFn, VerifyConfig};
use conecal::Cone;

fn main() -> conecal::Result<()> {
    for (cone, h) in [
        (Cone::Orthant(1), 0.04),
        (Cone::Orthant(2), 0.04),
        (Cone::Psd(2), 0.5),
        (Cone::Lorentz(2), 0.5),
    ] {
        let f = CatalogFn::Quad.bind(cone)?;
        let v = verify_fenchel_moreau(&f, &VerifyConfig::new(cone, 2.0, h).levels(3))?;
        println!("{cone}: status {:?}", v.status);
        for l in &v.levels {
            println!(
                "  h = {:<7} nodes {:>6}  max gap {:.2e}  method {:?}",
                l.h, l.nodes, l.max_gap_on_dom, l.method
            );
        }
    }

    // trace on psd(2): f*(y) vanishes on y <= I and the sup recovers tr(x)
    let f = CatalogFn::Trace.bind(Cone::Psd(2))?;
    let v = verify_fenchel_moreau(&f, &VerifyConfig::new(Cone::Psd(2), 2.0, 0.25))?;
    println!("trace on psd:2 -> identity holds: {}", v.identity_holds);
    print!("{}", v.trend_csv());
    Ok(())
}
