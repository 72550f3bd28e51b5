//! Solves the equilateral 3.331 torus at a chosen resolution and prints the
//! certified density bound.
//!
//! cargo run --release --example solve -- [n] [time-limit-seconds] [seed]

use std::fs::File;
use std::io::BufWriter;

use torusmis::mis::{self, SolverConfig};
use torusmis::render::{self, RenderStyle};
use torusmis::{FlatTorus, GridSpec, TorusGraph};

fn main() -> torusmis::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(100, |a| a.parse().expect("grid size"));
    let time_limit: f64 = args.get(1).map_or(10.0, |a| a.parse().expect("seconds"));
    let seed: u64 = args.get(2).map_or(0, |a| a.parse().expect("seed"));

    let spec = GridSpec::new(FlatTorus::from_degrees(3.331, 3.331, 60.0)?, n, n)?;
    let g = TorusGraph::build(spec)?;
    let cfg = SolverConfig {
        seed,
        time_limit,
        ..SolverConfig::default()
    };
    let set = mis::solve(&g, &cfg)?;
    let bound = mis::certified_bound(&g, &set)?;
    println!(
        "n = {n}, degree {}, {} moves",
        g.regular_degree(),
        cfg.move_budget()
    );
    println!("|M| = {}, bound = {bound}", set.size());

    let path = format!("solve-{n}.svg");
    render::render_solution(
        &spec,
        &set,
        &RenderStyle::default(),
        &mut BufWriter::new(File::create(&path)?),
    )?;
    println!("wrote {path}");
    Ok(())
}
