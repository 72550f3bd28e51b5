//! The 20-vertex instance solved exactly and drawn as an SVG.
//!
//! cargo run --example render_small -- [out.svg]

use std::fs::File;
use std::io::BufWriter;

use torusmis::mis;
use torusmis::render::{self, RenderStyle};
use torusmis::{FlatTorus, GridSpec, TorusGraph};

fn main() -> torusmis::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "small.svg".into());
    let spec = GridSpec::new(FlatTorus::from_degrees(3.331, 3.331, 60.0)?, 5, 4)?;
    let g = TorusGraph::build(spec)?;
    let set = mis::exact_mis(&g)?;
    println!(
        "degree {}, maximum independent set {} of 20",
        g.regular_degree(),
        set.size()
    );
    println!("bound {}", mis::certified_bound(&g, &set)?);
    set.write_solution(5, 4, std::io::stdout().lock())?;
    render::render_solution(
        &spec,
        &set,
        &RenderStyle::default(),
        &mut BufWriter::new(File::create(&out)?),
    )?;
    println!("wrote {out}");
    Ok(())
}
