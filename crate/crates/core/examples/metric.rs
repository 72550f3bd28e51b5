//! Torus distances on a few tori, checked against exhaustive search.
//!
//! cargo run --example metric

use std::f64::consts::PI;

use torusmis::{FlatTorus, TorusPoint};

fn main() -> torusmis::Result<()> {
    let cases = [
        (FlatTorus::new(2.0, 2.0, PI / 2.0)?, (0.0, 0.0), (0.5, 0.0)),
        (
            FlatTorus::new(3.331, 3.331, PI / 3.0)?,
            (0.0, 0.0),
            (0.5, 0.5),
        ),
        (
            FlatTorus::from_degrees(2.6, 5.2, 25.0)?,
            (0.1, 0.9),
            (0.8, 0.05),
        ),
        (
            FlatTorus::from_degrees(5.0, 2.5, 40.0)?,
            (0.13, 0.77),
            (0.91, 0.2),
        ),
    ];
    for (t, p, q) in cases {
        let (p, q) = (TorusPoint::new(p.0, p.1), TorusPoint::new(q.0, q.1));
        let fast = t.metric(p, q);
        let slow = t.metric_oracle(p, q, t.search_bound() as u32 + 5)?;
        println!(
            "T({}, {}, {:.1} deg)  k = {:2}  rho = {fast:.12}  exhaustive = {slow:.12}",
            t.l1(),
            t.l2(),
            t.alpha().to_degrees(),
            t.search_bound()
        );
    }
    Ok(())
}
