//! Builds a grid graph and writes it in DIMACS format.
//!
//! cargo run --example build_graph -- [n] [out.dimacs]

use std::fs::File;
use std::io::BufWriter;

use torusmis::{FlatTorus, GridSpec, TorusGraph};

fn main() -> torusmis::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(30, |a| a.parse().expect("grid size"));
    let out = args.next().unwrap_or_else(|| "graph.dimacs".into());

    let spec = GridSpec::new(FlatTorus::from_degrees(3.331, 3.331, 60.0)?, n, n)?;
    let g = TorusGraph::build(spec)?;
    println!("vertices      {}", spec.vertex_count());
    println!("circumradius  {:.7}", g.circumradius());
    println!("degree        {}", g.regular_degree());
    println!("edges         {}", g.edge_count());
    println!(
        "edge band     [{:.6}, {:.6}]",
        1.0 - 2.0 * g.circumradius(),
        1.0 + 2.0 * g.circumradius()
    );

    g.export_dimacs(BufWriter::new(File::create(&out)?))?;
    println!("wrote {out}");
    Ok(())
}
