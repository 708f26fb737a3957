//! Scan products of simplices for equal iterated and mixed degrees.

use mixdisc::degrees::{conjecture_scan, in_conjectured_family, Verdict};

fn main() -> mixdisc::Result<()> {
    let rows = conjecture_scan(2, 3, 3, 3)?;
    let excluded = rows.iter().filter(|(_, r)| r.verdict == Verdict::Excluded).count();
    println!("{} rows, {excluded} excluded by the defectivity guard", rows.len());
    for (p, _) in rows.iter().filter(|(_, r)| r.verdict == Verdict::Equal) {
        println!("equal: {p} (known family: {})", in_conjectured_family(p));
    }
    Ok(())
}
