//! Monte-Carlo dual defect estimates.

use mixdisc::adisc::katz_corank_probe;
use mixdisc::lattice::{LatticeConfig, Polygon};

fn main() -> mixdisc::Result<()> {
    let configs = [
        ("2Δ_2", LatticeConfig::dilated_simplex(2, 2)),
        ("unit square", Polygon::unit_square().lattice_points()),
        ("Δ_2", LatticeConfig::dilated_simplex(2, 1)),
        ("Δ_3", LatticeConfig::dilated_simplex(3, 1)),
    ];
    for (name, c) in configs {
        println!("{name:<12} corank {}", katz_corank_probe(&c, 20, 0)?);
    }
    Ok(())
}
