//! Perfectness audit: every audited face is self-dual inside its own span and
//! has a relative interior point.

use conecal::faces::perfectness_audit;
use conecal::{Cone, RngSeed};

fn main() {
    for c in [Cone::Orthant(3), Cone::Psd(3), Cone::Lorentz(3)] {
        let r = perfectness_audit(c, 500, RngSeed(9));
        println!("{c}: {} faces audited, passed {}", r.faces.len(), r.passed);
        for f in r.faces.iter().take(4) {
            println!(
                "  {:<28} reduced {:<12} min <a,b> {:>9.2e}  relint {:?}",
                f.face,
                f.reduced_cone.clone().unwrap_or_else(|| "-".into()),
                f.reduced_min_inner,
                f.relint_point.as_ref().map(|p| p
                    .iter()
                    .map(|v| (v * 1e3).round() / 1e3)
                    .collect::<Vec<_>>())
            );
        }
    }
}
