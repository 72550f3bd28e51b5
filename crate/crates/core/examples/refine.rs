//! Rebuilds the chain of ever finer datasets, each centred on the best
//! torus of the previous level, and compares it with the preset of the same
//! resolution.
//!
//! cargo run --example refine

use torusmis::sweep::{self, RefinementStep};

fn main() -> torusmis::Result<()> {
    let first = sweep::preset(1).expect("preset");
    let c = (3.4, 3.4, 60f64.to_radians());
    let second = sweep::refine(&first, &RefinementStep::towards_second_preset(c))?;
    let third = sweep::refine(
        &second,
        &RefinementStep {
            center: (3.34, 3.34, 60f64.to_radians()),
            l_range_div: 10.0,
            l_step_div: 5.0,
            alpha_range_div: 2.0,
            alpha_step_div: 5.0,
        },
    )?;
    let fourth = sweep::refine(
        &third,
        &RefinementStep {
            center: (3.332, 3.336, 60f64.to_radians()),
            l_range_div: 10.0 / 3.0,
            l_step_div: 4.0,
            alpha_range_div: 5.0,
            alpha_step_div: 2.0,
        },
    )?;
    for (k, ds) in [first, second, third, fourth].iter().enumerate() {
        let preset = sweep::generate_dataset(&sweep::preset(k + 1).expect("preset"))?.len();
        println!(
            "level {}: l in [{:.4}, {:.4}] step {:.4}, alpha in [{:.2}, {:.2}] step {:.2} deg, {} tori (preset {preset})",
            k + 1,
            ds.l_min,
            ds.l_max,
            ds.l_step,
            ds.alpha_min.to_degrees(),
            ds.alpha_max.to_degrees(),
            ds.alpha_step.to_degrees(),
            sweep::generate_dataset(ds)?.len()
        );
    }
    Ok(())
}
