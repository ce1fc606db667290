//! Separable conjugate on orthant boxes versus the all-pairs maximum.

use std::sync::Arc;
use std::time::Instant;

use conecal::conjugate::{fast_conjugate_orthant, monotone_conjugate};
use conecal::{build_grid, Cone, ExtReal, GridFn};

fn main() -> conecal::Result<()> {
    println!(
        "{:>8} {:>7} {:>11} {:>11} {:>8} {:>10}",
        "cone", "nodes", "naive s", "fast s", "speedup", "max diff"
    );
    for (d, h) in [
        (1, 0.001),
        (2, 1.0 / 31.0),
        (2, 1.0 / 63.0),
        (3, 1.0 / 15.0),
    ] {
        let cone = Cone::Orthant(d);
        let g = Arc::new(build_grid(cone, 1.0, h)?);
        // a cross term makes the function non-separable
        let f = GridFn::from_fn(g.clone(), |x| {
            let s: f64 = x.iter().map(|v| v * v).sum();
            let cross: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
            ExtReal::finite(s + 0.5 * cross)
        })?;

        let t = Instant::now();
        let naive = monotone_conjugate(&f, &g)?;
        let tn = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let fast = fast_conjugate_orthant(&f)?;
        let tf = t.elapsed().as_secs_f64();

        let diff = naive
            .values()
            .iter()
            .zip(fast.values())
            .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
            .fold(0.0, f64::max);
        println!(
            "{:>8} {:>7} {tn:>11.4} {tf:>11.4} {:>7.0}x {diff:>10.1e}",
            cone.to_string(),
            g.len(),
            tn / tf.max(1e-9)
        );
    }
    Ok(())
}
