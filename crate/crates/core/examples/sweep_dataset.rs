//! Counts the preset datasets, then solves a small grid of tori into a CSV
//! record store and prints the best one.
//!
//! cargo run --release --example sweep_dataset -- [store.csv]

use torusmis::mis::SolverConfig;
use torusmis::sweep::{self, DatasetSpec, RecordStore};

fn main() -> torusmis::Result<()> {
    for k in 1..=4 {
        let ds = sweep::preset(k).expect("preset");
        println!("dataset {k}: {} tori", sweep::generate_dataset(&ds)?.len());
    }

    let store = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "sweep-small.csv".into());
    let ds = DatasetSpec::from_degrees((3.2, 3.5, 0.1), (55.0, 65.0, 5.0), 40, 40);
    let triples = sweep::generate_dataset(&ds)?;
    let cfg = SolverConfig::with_seed(0).with_budget(5_000);
    let mut records = RecordStore::open(&store)?;
    let summary = sweep::run_sweep(&triples, ds.n, ds.m, &cfg, &mut records)?;
    println!(
        "solved {} tori at n = m = 40, mean |M| = {:.1}",
        summary.count, summary.mean_mis_size
    );
    if let Some(b) = summary.best {
        println!(
            "best T({}, {}, {} deg): |M| = {}, bound {}",
            b.l1, b.l2, b.alpha_deg, b.mis_size, b.bound
        );
    }
    println!("records in {store}");
    Ok(())
}
