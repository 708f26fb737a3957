//! Run the golden fixture suite from code.

use mixdisc::cli::{verify_fixtures, RunOptions};

fn main() -> mixdisc::Result<()> {
    for o in verify_fixtures(None, &RunOptions::default())? {
        println!("{:?} {} ({} ms): {}", o.status, o.name, o.millis, o.detail);
    }
    Ok(())
}
