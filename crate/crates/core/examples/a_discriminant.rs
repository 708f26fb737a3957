//! Closed-form discriminants of small configurations.

use mixdisc::adisc::{a_discriminant, DiscMethod, Hints};
use mixdisc::lattice::{LatticeConfig, Polygon};

fn main() -> mixdisc::Result<()> {
    let configs = [
        ("unit square", Polygon::unit_square().lattice_points()),
        ("trapezoid", Polygon::f1_trapezoid().lattice_points()),
        ("binary quadratic", LatticeConfig::dilated_simplex(1, 2)),
        ("ternary quadric", LatticeConfig::dilated_simplex(2, 2)),
        ("triangle", LatticeConfig::dilated_simplex(2, 1)),
    ];
    for (name, config) in configs {
        let d = a_discriminant(&config, DiscMethod::Auto, &Hints::default())?;
        println!("{name:<18} {:?} defective={} D = {}", d.method, d.defective, d.poly);
    }
    Ok(())
}
