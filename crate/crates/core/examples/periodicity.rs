//! Which tori pass the perfect-periodicity test, including the binary
//! floating-point boundary at 30 degrees.
//!
//! cargo run --example periodicity

use torusmis::FlatTorus;

fn main() -> torusmis::Result<()> {
    for (l1, l2, deg) in [
        (3.4, 3.4, 60.0),
        (3.331, 3.331, 60.0),
        (2.0, 2.0, 30.0),
        (2.0, 4.0, 30.0),
        (2.0, 4.2, 30.0),
        (4.5, 2.0, 45.0),
        (2.0, 2.0, 90.0),
    ] {
        let t = FlatTorus::from_degrees(l1, l2, deg)?;
        let s = t.alpha().sin();
        println!(
            "T({l1}, {l2}, {deg}) l1 sin a = {:<20} l2 sin a = {:<20} periodic: {}",
            l1 * s,
            l2 * s,
            t.is_perfectly_periodic()
        );
    }
    Ok(())
}
