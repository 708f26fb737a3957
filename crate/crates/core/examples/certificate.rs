//! Evaluation-mode certificates and multiple-root classification for pairs
//! of hyperbolas.

use mixdisc::adisc::{closed_form, rational_string};
use mixdisc::lattice::Polygon;
use mixdisc::schlaefli::{multiple_root_classify, smoothness_certificate, Certificate, SystemSpec};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> mixdisc::Result<()> {
    let config = Polygon::unit_square().lattice_points();
    let da = closed_form(&config)?.expect("closed form");
    let tangent = SystemSpec::from_integers(&config, &[vec![1, 1, -2, -1], vec![1, 1, -3, -2]])?;
    let transverse = SystemSpec::from_integers(&config, &[vec![3, -1, 4, 1], vec![-5, 9, 2, 6]])?;
    for (name, spec) in [("tangent pair", &tangent), ("transverse pair", &transverse)] {
        match smoothness_certificate(spec, &da)? {
            Certificate::Smooth(v) => println!("{name:<16} smooth, ID = {}", rational_string(&v)),
            Certificate::Inconclusive => println!("{name:<16} inconclusive, ID = 0"),
        }
    }
    let x = [BigRational::from_integer(BigInt::from(-1)), BigRational::from_integer(BigInt::from(0))];
    println!("{:<16} {:?}", "root (-1, 0)", multiple_root_classify(&tangent, &x, None)?);
    Ok(())
}
