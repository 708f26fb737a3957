//! Iterated discriminant of two bilinear polynomials, which equals the
//! 2x2x2 hyperdeterminant.

use mixdisc::adisc::closed_form;
use mixdisc::lattice::Polygon;
use mixdisc::schlaefli::{iterated_discriminant, mixed_discriminant, MixedMethod, SystemSpec, DEFAULT_SYMBOLIC_CAP};

fn main() -> mixdisc::Result<()> {
    let config = Polygon::unit_square().lattice_points();
    let da = closed_form(&config)?.expect("closed form");
    let id = iterated_discriminant(&SystemSpec::symbolic(&config, 1), &da, DEFAULT_SYMBOLIC_CAP)?;
    let md = mixed_discriminant(&config, 1, MixedMethod::Closed, None, &Default::default())?;
    println!("ID ({} terms) = {}", id.poly.len(), id.poly);
    println!("ID == hyperdeterminant: {}", id.poly == md.poly);
    Ok(())
}
