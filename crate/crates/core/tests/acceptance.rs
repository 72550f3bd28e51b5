//! Acceptance checks, one report line per criterion. Runs without the
//! default test harness so the report is always printed.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torusmis::croft::{self, CroftParams};
use torusmis::grid_graph::{naive_adjacency, AdjacencyGraph};
use torusmis::mis::{self, SolverConfig};
use torusmis::render::{self, Layout, RenderStyle};
use torusmis::sweep;
use torusmis::{FlatTorus, Graph, GridSpec, TorusGraph, TorusPoint};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 9] = [
        ("metric matches exhaustive search", metric_oracle),
        ("dataset cardinalities", dataset_sizes),
        ("tortoise optimum", croft_optimum),
        (
            "offset construction equals all-pairs rule",
            graph_equivalence,
        ),
        ("density bound arithmetic", density_arithmetic),
        ("solver quality floor at n = 100", quality_floor),
        ("exact solver agrees with enumeration", exact_agreement),
        ("bounds do not drop as n grows", larger_n_trend),
        ("rendering of the 5 x 4 instance", rendering),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {secs:.1} s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({detail}; {secs:.1} s)", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn within_time(start: Instant, limit: f64, detail: String) -> Check {
    let secs = start.elapsed().as_secs_f64();
    if secs < limit {
        Ok(detail)
    } else {
        Err(format!("{detail}; took {secs:.1} s, limit {limit} s"))
    }
}

fn metric_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let t = FlatTorus::new(
            rng.gen_range(2.0..=6.0),
            rng.gen_range(2.0..=6.0),
            rng.gen_range(PI / 9.0..=PI / 2.0),
        )
        .unwrap();
        let p = TorusPoint::new(rng.gen(), rng.gen());
        let q = TorusPoint::new(rng.gen(), rng.gen());
        let slow = t.metric_oracle(p, q, 20).unwrap();
        worst = worst.max((t.metric(p, q) - slow).abs());
    }
    if worst > 1e-9 {
        return Err(format!("max deviation {worst:e}"));
    }
    within_time(
        start,
        30.0,
        format!("100000 cases, max deviation {worst:e}"),
    )
}

fn dataset_sizes() -> Check {
    let mut got = Vec::new();
    for (k, want) in [(1, 2986), (2, 1155), (3, 726), (4, 455)] {
        let start = Instant::now();
        let size = sweep::generate_dataset(&sweep::preset(k).unwrap())
            .map_err(|e| e.to_string())?
            .len();
        if size != want {
            return Err(format!("dataset {k}: {size}, expected {want}"));
        }
        within_time(start, 1.0, String::new())?;
        got.push(size.to_string());
    }
    Ok(got.join(" / "))
}

/// Fraction of the unit square around the origin inside both the disc of
/// radius 1/2 and the hexagon of apothem x/2.
fn monte_carlo_tortoise(x: f64, samples: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let normals: Vec<(f64, f64)> = (0..3)
        .map(|k| {
            let a = k as f64 * PI / 3.0;
            (a.cos(), a.sin())
        })
        .collect();
    let h = x / 2.0;
    let mut hits = 0usize;
    for _ in 0..samples {
        let px: f64 = rng.gen_range(-0.5..0.5);
        let py: f64 = rng.gen_range(-0.5..0.5);
        if px * px + py * py < 0.25 && normals.iter().all(|&(c, s)| (px * c + py * s).abs() < h) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (p, (p * (1.0 - p) / samples as f64).sqrt())
}

fn croft_optimum() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_z = 0.0f64;
    for _ in 0..20 {
        let x = rng.gen_range(croft::X_MIN + 1e-3..1.0 - 1e-3);
        let closed = CroftParams::new(x).unwrap().tortoise_area();
        let (est, se) = monte_carlo_tortoise(x, 10_000_000, &mut rng);
        let z = (est - closed).abs() / se;
        worst_z = worst_z.max(z);
        if z > 3.0 {
            return Err(format!(
                "closed form off by {z:.2} standard errors at x = {x}"
            ));
        }
    }
    let (x, d) = croft::croft_optimum();
    let disc = PI / (8.0 * 3f64.sqrt());
    if (x - 0.96533).abs() > 5e-4 || (d - 0.22936).abs() > 5e-5 || d <= disc {
        return Err(format!("x* = {x}, density* = {d}"));
    }
    within_time(
        start,
        60.0,
        format!("x* = {x:.6}, density* = {d:.7}, worst Monte-Carlo z = {worst_z:.2}"),
    )
}

fn random_valid_spec(rng: &mut ChaCha8Rng, max_cells: usize, l_max: f64) -> GridSpec {
    loop {
        let t = match FlatTorus::from_degrees(
            rng.gen_range(2.0..l_max),
            rng.gen_range(2.0..l_max),
            rng.gen_range(20.0..=90.0),
        ) {
            Ok(t) if t.is_perfectly_periodic() => t,
            _ => continue,
        };
        let n = rng.gen_range(1..=max_cells.min(40));
        let m = rng.gen_range(1..=(max_cells / n).max(1));
        let spec = GridSpec::new(t, n, m).unwrap();
        if n * m <= max_cells && 2.0 * spec.circumradius() < 1.0 {
            return spec;
        }
    }
}

fn graph_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let specs = 60;
    for _ in 0..specs {
        let spec = random_valid_spec(&mut rng, 400, 6.0);
        let g = TorusGraph::build(spec).map_err(|e| e.to_string())?;
        let adj = naive_adjacency(spec).map_err(|e| e.to_string())?;
        let (n, m) = (spec.n(), spec.m());
        for (v, want) in adj.iter().enumerate() {
            let mut got: Vec<usize> = g.neighbors(v).collect();
            got.sort_unstable();
            if &got != want {
                return Err(format!("neighbourhood of {v} differs on {spec:?}"));
            }
            if got.len() != g.regular_degree() {
                return Err(format!("vertex {v} has degree {} on {spec:?}", got.len()));
            }
        }
        for &(s, t) in g.offsets() {
            let neg = ((n - s) % n, (m - t) % m);
            if g.offsets().binary_search(&neg).is_err() {
                return Err(format!("offset ({s}, {t}) has no negative on {spec:?}"));
            }
        }
    }
    within_time(start, 60.0, format!("{specs} specs"))
}

fn density_arithmetic() -> Check {
    let a = mis::density_bound(4, 5, 4).map_err(|e| e.to_string())?;
    let b = mis::density_bound(2193, 100, 100).map_err(|e| e.to_string())?;
    if a == 0.2 && b == 0.2193 {
        Ok(format!("{a}, {b}"))
    } else {
        Err(format!("{a}, {b}"))
    }
}

fn reference_graph(n: usize) -> TorusGraph {
    let t = FlatTorus::new(3.331, 3.331, PI / 3.0).unwrap();
    TorusGraph::build(GridSpec::new(t, n, n).unwrap()).unwrap()
}

fn solve_bound(g: &TorusGraph, cfg: &SolverConfig) -> Result<f64, String> {
    let s = mis::solve(g, cfg).map_err(|e| e.to_string())?;
    if !mis::validate(g, &s).map_err(|e| e.to_string())? {
        return Err("solver returned a dependent set".into());
    }
    mis::certified_bound(g, &s).map_err(|e| e.to_string())
}

fn quality_floor() -> Check {
    let g = reference_graph(100);
    let cfg = SolverConfig {
        time_limit: 100.0,
        ..SolverConfig::default()
    };
    let bound = solve_bound(&g, &cfg)?;
    let detail = format!("bound {bound} with {} moves", cfg.move_budget());
    if (0.215..=mis::DENSITY_UPPER_BOUND).contains(&bound) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Largest independent set by Bron-Kerbosch enumeration of the maximal
/// independent sets (cliques of the complement), with pivoting.
fn enumerate_max_independent(g: &AdjacencyGraph) -> usize {
    let count = g.vertex_count();
    let non_adj: Vec<u64> = (0..count)
        .map(|v| {
            let adj = g.neighbors(v).fold(0u64, |a, w| a | 1 << w);
            let all = if count == 64 {
                u64::MAX
            } else {
                (1u64 << count) - 1
            };
            all & !adj & !(1 << v)
        })
        .collect();
    fn bk(r: usize, mut p: u64, mut x: u64, non_adj: &[u64], best: &mut usize) {
        if p == 0 {
            if x == 0 {
                *best = (*best).max(r);
            }
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut cand = p & !non_adj[pivot];
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            bk(r + 1, p & non_adj[v], x & non_adj[v], non_adj, best);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
    let mut best = 0;
    let all = if count == 64 {
        u64::MAX
    } else {
        (1u64 << count) - 1
    };
    bk(0, all, 0, &non_adj, &mut best);
    best
}

fn exact_agreement() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sizes = Vec::new();
    for k in 0..100 {
        let spec = random_valid_spec(&mut rng, 64, 4.0);
        let g = TorusGraph::build(spec).map_err(|e| e.to_string())?;
        let exact = mis::exact_mis(&g).map_err(|e| e.to_string())?;
        if !mis::validate(&g, &exact).map_err(|e| e.to_string())? {
            return Err(format!("exact set dependent on {spec:?}"));
        }
        let oracle = enumerate_max_independent(&AdjacencyGraph::from_graph(&g));
        if exact.size() != oracle {
            return Err(format!(
                "exact {} vs enumeration {oracle} on {spec:?}",
                exact.size()
            ));
        }
        let cfg = SolverConfig::with_seed(k).with_budget(2_000);
        let heuristic =
            mis::local_search(&g, &mis::greedy(&g, k), &cfg).map_err(|e| e.to_string())?;
        if heuristic.size() > exact.size() {
            return Err(format!("local search beat the exact solver on {spec:?}"));
        }
        sizes.push(exact.size());
    }
    let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
    within_time(start, 120.0, format!("100 specs, mean optimum {mean:.2}"))
}

fn larger_n_trend() -> Check {
    let mut bounds = Vec::new();
    for n in [50, 100, 150] {
        bounds.push(solve_bound(&reference_graph(n), &SolverConfig::default())?);
    }
    let detail = format!(
        "n = 50 / 100 / 150: {:.6} / {:.6} / {:.6}",
        bounds[0], bounds[1], bounds[2]
    );
    if bounds.windows(2).all(|w| w[1] >= w[0] - 0.002) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Total area of all subpaths of the `d` attributes, in canvas units.
fn path_area(d: &str) -> f64 {
    let mut total = 0.0;
    for sub in d.split('Z') {
        let nums: Vec<f64> = sub
            .split(|c: char| c == 'M' || c == 'L' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().unwrap())
            .collect();
        let pts: Vec<[f64; 2]> = nums.chunks(2).map(|c| [c[0], c[1]]).collect();
        total += render::polygon_area(&pts).abs();
    }
    total
}

fn rendering() -> Check {
    let t = FlatTorus::new(3.331, 3.331, PI / 3.0).unwrap();
    let spec = GridSpec::new(t, 5, 4).unwrap();
    let g = TorusGraph::build(spec).map_err(|e| e.to_string())?;
    let set = mis::exact_mis(&g).map_err(|e| e.to_string())?;
    let style = RenderStyle::default();
    let mut buf = Vec::new();
    render::render_solution(&spec, &set, &style, &mut buf).map_err(|e| e.to_string())?;
    let svg = String::from_utf8(buf).map_err(|e| e.to_string())?;

    let cells: Vec<&str> = svg
        .lines()
        .filter(|l| l.starts_with("<path class=\"cell"))
        .collect();
    let filled = cells
        .iter()
        .filter(|l| l.contains("class=\"cell in\""))
        .count();
    let area: f64 = cells
        .iter()
        .map(|l| {
            let d = l.split(" d=\"").nth(1).unwrap().trim_end_matches("\"/>");
            path_area(d)
        })
        .sum();
    let scale = Layout::new(&spec, &style).scale;
    let want = t.area() * scale * scale;
    let rel = (area - want).abs() / want;
    let detail = format!(
        "{} cells, {filled} filled of {}, area error {rel:.2e}",
        cells.len(),
        set.size()
    );
    if cells.len() == 20 && filled == set.size() && rel <= 1e-4 && svg.contains("viewBox") {
        Ok(detail)
    } else {
        Err(detail)
    }
}
