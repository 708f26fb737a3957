//! Recover a discriminant from singular sections by exact interpolation and
//! compare it with the closed form.

use mixdisc::adisc::{a_discriminant, closed_form, DiscMethod, Hints};
use mixdisc::lattice::Polygon;

fn main() -> mixdisc::Result<()> {
    let config = Polygon::f1_trapezoid().lattice_points();
    let hints = Hints { degree: Some(3), ..Hints::default() };
    let interpolated = a_discriminant(&config, DiscMethod::Interpolate, &hints)?;
    let closed = closed_form(&config)?.expect("two-row configuration");
    println!("interpolated: {}", interpolated.poly);
    println!("closed form:  {}", closed.poly);
    println!("agree: {}", interpolated.poly == closed.poly);
    Ok(())
}
