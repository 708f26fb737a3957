//! Divide the iterated discriminant of two trapezoid polynomials by their
//! interpolated mixed discriminant and identify the quotient.

use mixdisc::adisc::{a_discriminant, DiscMethod, Hints};
use mixdisc::lattice::Polygon;
use mixdisc::poly::SparsePoly;
use mixdisc::schlaefli::{
    factor_report, iterated_discriminant, mixed_discriminant, MixedMethod, SystemSpec, DEFAULT_SYMBOLIC_CAP,
};

fn main() -> mixdisc::Result<()> {
    let config = Polygon::f1_trapezoid().lattice_points();
    let da = a_discriminant(&config, DiscMethod::Auto, &Hints::default())?;
    let id = iterated_discriminant(&SystemSpec::symbolic(&config, 1), &da, DEFAULT_SYMBOLIC_CAP)?;
    let md = mixed_discriminant(&config, 1, MixedMethod::Auto, None, &Default::default())?;
    // points (0,1) and (1,1) carry indices 2 and 4
    let chow = SparsePoly::parse(id.poly.vars(), "c_{1,2}*c_{0,4} - c_{1,4}*c_{0,2}")?;
    let rep = factor_report(&id.poly, &md.poly, Some(&chow), 2)?;
    println!("{}", rep.to_json_string());
    Ok(())
}
