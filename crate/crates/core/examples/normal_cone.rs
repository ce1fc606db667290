//! Outer normals in the cone at boundary points of a convex set, found by
//! projected ascent and checked over the whole set.

use conecal::analysis::{check_normal_witness, normal_cone_witness, NormalConeConfig};
use conecal::{build_grid, Cone, Point};

fn main() -> conecal::Result<()> {
    let cfg = NormalConeConfig::default();

    let g = build_grid(Cone::Orthant(2), 1.0, 0.05)?;
    let simplex: Vec<Point> = g
        .nodes()
        .filter(|x| x[0] + x[1] <= 1.0 + 1e-9)
        .map(|x| Point::new(x.to_vec()).unwrap())
        .collect();
    for y in [vec![1.0, 0.0], vec![0.5, 0.5], vec![0.3, 0.4]] {
        let y = Point::new(y)?;
        match normal_cone_witness(&simplex, &y, Cone::Orthant(2), &cfg) {
            Ok(z) => {
                let chk = check_normal_witness(Cone::Orthant(2), &simplex, &y, &z);
                println!(
                    "simplex, y = {:?}: z = {:?}, max <z, w - y> = {:.1e}, <z, y> = {:.3}",
                    y.coords(),
                    z.coords(),
                    chk.max_violation,
                    chk.pairing
                );
            }
            Err(e) => println!("simplex, y = {:?}: {e}", y.coords()),
        }
    }

    let g = build_grid(Cone::Lorentz(1), 1.5, 0.05)?;
    let cap: Vec<Point> = g
        .nodes()
        .filter(|x| x[0] <= 1.0 + 1e-9)
        .map(|x| Point::new(x.to_vec()).unwrap())
        .collect();
    let y = Point::new(vec![1.0, 1.0])?;
    let z = normal_cone_witness(&cap, &y, Cone::Lorentz(1), &cfg)?;
    println!("truncated lorentz:1, y = (1, 1): z = {:?}", z.coords());

    // y on the segment towards a farther point of the set: the hypothesis fails
    let y = Point::new(vec![0.5, 0.0])?;
    println!(
        "y = (0.5, 0): {}",
        normal_cone_witness(&simplex, &y, Cone::Orthant(2), &cfg).unwrap_err()
    );
    Ok(())
}
