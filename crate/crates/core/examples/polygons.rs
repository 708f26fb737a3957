//! Polygons without interior points whose planar degrees agree.

use mixdisc::degrees::{equal_degree_polygons, plane_report};

fn main() -> mixdisc::Result<()> {
    for p in equal_degree_polygons(10)? {
        let rep = plane_report(&p)?;
        println!("{:?}: delta {:?}, deg MD {}, deg ID {}", p.vertices(), rep.delta, rep.deg_md, rep.deg_id);
    }
    Ok(())
}
