//! Two quadric surfaces in evaluation mode: the symbolic expansion is out of
//! reach, but concrete pairs are cheap.

use mixdisc::adisc::closed_form;
use mixdisc::lattice::LatticeConfig;
use mixdisc::schlaefli::{iterated_discriminant, iterated_discriminant_at, SystemSpec, DEFAULT_SYMBOLIC_CAP};

fn main() -> mixdisc::Result<()> {
    let config = LatticeConfig::dilated_simplex(3, 2);
    let da = closed_form(&config)?.expect("closed form");
    println!("D_A has degree {:?}", da.degree());
    match iterated_discriminant(&SystemSpec::symbolic(&config, 1), &da, DEFAULT_SYMBOLIC_CAP) {
        Ok(_) => println!("symbolic expansion finished"),
        Err(e) => println!("symbolic expansion refused: {e}"),
    }
    let spec = SystemSpec::from_integers(&config, &[vec![1, 0, 2, -1, 1, 3, 0, 1, -2, 1], vec![2, 1, 0, 1, -1, 0, 1, 2, 1, -3]])?;
    println!("ID at a concrete pair = {}", iterated_discriminant_at(&spec, &da)?);
    Ok(())
}
