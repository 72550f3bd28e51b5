//! The tortoise construction: density across the admissible hexagon
//! heights and its maximum.
//!
//! cargo run --example croft

use std::f64::consts::PI;

use torusmis::croft::{self, CroftParams};

fn main() -> torusmis::Result<()> {
    for k in 1..10 {
        let x = croft::X_MIN + (1.0 - croft::X_MIN) * k as f64 / 10.0;
        let p = CroftParams::new(x)?;
        println!("x = {x:.5}  density = {:.7}", croft::croft_density(p));
    }
    let (x, d) = croft::croft_optimum();
    println!("optimum x* = {x:.7}, density = {d:.8}");
    println!("plain disc packing = {:.8}", PI / (8.0 * 3f64.sqrt()));
    Ok(())
}
