//! Degree formulas for dilated simplices and products of simplices.

use mixdisc::degrees::{simplex_report, sv_report, DegreeReport, SVParams};

fn main() -> mixdisc::Result<()> {
    println!("{}", DegreeReport::table_header());
    for (n, d, r) in [(1, 2, 1), (1, 3, 1), (2, 2, 1), (3, 2, 1), (2, 3, 2)] {
        println!("{}", simplex_report(n, d, r).table_row());
    }
    for (d, k) in [(vec![1, 1], vec![1, 1]), (vec![1, 1, 1], vec![1, 1, 1]), (vec![2, 2], vec![1, 1])] {
        println!("{}", sv_report(&SVParams::new(1, d, k)?)?.table_row());
    }
    Ok(())
}
