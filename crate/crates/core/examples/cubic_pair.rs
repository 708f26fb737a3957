//! Two binary cubics: the iterated discriminant is the resultant times the
//! cube of the triple-root Chow form.

use mixdisc::adisc::closed_form;
use mixdisc::lattice::LatticeConfig;
use mixdisc::schlaefli::{
    cusp_chow_oracle_cubic, factor_report, iterated_discriminant, mixed_discriminant, MixedMethod, SystemSpec,
    DEFAULT_SYMBOLIC_CAP,
};

fn main() -> mixdisc::Result<()> {
    let config = LatticeConfig::dilated_simplex(1, 3);
    let da = closed_form(&config)?.expect("closed form");
    let id = iterated_discriminant(&SystemSpec::symbolic(&config, 1), &da, DEFAULT_SYMBOLIC_CAP)?;
    let md = mixed_discriminant(&config, 1, MixedMethod::Resultant, None, &Default::default())?;
    let h = cusp_chow_oracle_cubic()?;
    let rep = factor_report(&id.poly, &md.poly, Some(&h), 3)?;
    println!("deg ID = {:?}, deg MD = {:?}, Chow form: {h}", id.degree(), md.degree());
    println!("verdict {:?}, multiplicity {:?}", rep.verdict, rep.multiplicity_probe);
    Ok(())
}
