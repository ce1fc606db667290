//! f(x) = (x - 1)^2 on [0, inf) is convex but not nondecreasing. Its monotone
//! biconjugate is ((x - 1)_+)^2, so the identity fails at x = 0 by exactly 1.

use conecal::analysis::{verify_fenchel_moreau, CatalogFn, VerifyConfig};
use conecal::Cone;

fn main() -> conecal::Result<()> {
    let f: CatalogFn = "shifted-quad:1".parse()?;
    let f = f.bind(Cone::Orthant(1))?;
    let v = verify_fenchel_moreau(
        &f,
        &VerifyConfig::new(Cone::Orthant(1), 2.0, 0.04).levels(3),
    )?;

    println!(
        "status {:?}, monotonicity violations {} (worst {:.3})",
        v.status, v.gamma.monotonicity_violations, v.gamma.worst_monotonicity_gap
    );
    for l in &v.levels {
        println!(
            "h = {:<5} gap at 0 = {:.6}",
            l.h,
            l.gap_at_origin.unwrap_or(f64::NAN)
        );
    }

    let r = v.report.as_ref().expect("finest level report");
    let g = r.f.grid();
    println!("     x       f(x)     f**(x)  ((x-1)+)^2");
    for i in (0..g.len()).step_by(25) {
        let x = g.node(i)[0];
        println!(
            "{x:6.2} {:10.4} {:10.4} {:11.4}",
            r.f.value(i).to_f64(),
            r.fstarstar.value(i).to_f64(),
            (x - 1.0).max(0.0).powi(2)
        );
    }
    Ok(())
}
