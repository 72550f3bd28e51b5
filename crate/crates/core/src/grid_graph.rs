//! Grid graphs on a flat torus.
//!
//! The torus is sampled at `n x m` grid points `v(i, j) = (i/n, j/m)`. These
//! points triangulate the parallelogram into congruent triangles with sides
//! `l1/n`, `l2/m` and angle `alpha`; every Voronoi cell of the grid lies inside
//! the circumdisk of radius `r` around its centre. Two vertices are joined
//! whenever their torus distance falls in `[1 - 2r, 1 + 2r]`, so any pair of
//! non-adjacent cells contains no two points at distance exactly 1.
//!
//! Distances only depend on the grid displacement, so the whole edge set is
//! described by the neighbour offsets of `v(0, 0)` and every vertex has the
//! same degree.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::torus::{FlatTorus, TorusPoint};

/// Read-only adjacency used by the independent-set solvers.
pub trait Graph: Sync {
    fn vertex_count(&self) -> usize;

    fn degree(&self, v: usize) -> usize;

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_;

    fn is_adjacent(&self, u: usize, v: usize) -> bool;
}

/// Torus and grid resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    torus: FlatTorus,
    n: usize,
    m: usize,
}

impl GridSpec {
    pub fn new(torus: FlatTorus, n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidGrid(format!(
                "grid sizes must be positive, got n = {n}, m = {m}"
            )));
        }
        Ok(GridSpec { torus, n, m })
    }

    pub fn torus(&self) -> &FlatTorus {
        &self.torus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertex_count(&self) -> usize {
        self.n * self.m
    }

    /// Circumradius of a triangulation triangle.
    pub fn circumradius(&self) -> f64 {
        let a = self.torus.l1() / self.n as f64;
        let b = self.torus.l2() / self.m as f64;
        let (sin, cos) = self.torus.alpha().sin_cos();
        (a * a + b * b - 2.0 * a * b * cos).sqrt() / (2.0 * sin)
    }

    pub fn point(&self, v: VertexId) -> TorusPoint {
        TorusPoint::new(v.i as f64 / self.n as f64, v.j as f64 / self.m as f64)
    }

    pub fn vertex(&self, index: usize) -> Result<VertexId> {
        VertexId::from_index(index, self.n, self.m)
    }

    fn check_hypotheses(&self) -> Result<f64> {
        if !self.torus.is_perfectly_periodic() {
            return Err(Error::NotPerfectlyPeriodic {
                l1: self.torus.l1(),
                l2: self.torus.l2(),
                alpha: self.torus.alpha(),
            });
        }
        let r = self.circumradius();
        if 2.0 * r >= 1.0 || r.is_nan() {
            return Err(Error::CircumradiusHypothesis { diameter: 2.0 * r });
        }
        Ok(r)
    }
}

/// Grid vertex `(i, j)`, linearised row-major as `i * m + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId {
    pub i: usize,
    pub j: usize,
}

impl VertexId {
    pub fn new(i: usize, j: usize) -> Self {
        VertexId { i, j }
    }

    pub fn index(&self, m: usize) -> usize {
        self.i * m + self.j
    }

    pub fn from_index(index: usize, n: usize, m: usize) -> Result<Self> {
        if index >= n * m {
            return Err(Error::VertexOutOfRange {
                index,
                count: n * m,
            });
        }
        Ok(VertexId {
            i: index / m,
            j: index % m,
        })
    }
}

/// The graph `G(n, m)` stored as the neighbour offsets of `v(0, 0)`.
#[derive(Debug, Clone)]
pub struct TorusGraph {
    spec: GridSpec,
    r: f64,
    offsets: Vec<(usize, usize)>,
    // offset_mask[s * m + t] <=> (s, t) is an offset
    offset_mask: Vec<bool>,
}

impl TorusGraph {
    /// Builds the graph from `n * m` distance evaluations out of `v(0, 0)`.
    ///
    /// Fails unless the torus is perfectly periodic and `2r < 1`.
    pub fn build(spec: GridSpec) -> Result<Self> {
        let r = spec.check_hypotheses()?;
        let (lo, hi) = (1.0 - 2.0 * r, 1.0 + 2.0 * r);
        let origin = TorusPoint::new(0.0, 0.0);
        let (n, m) = (spec.n, spec.m);

        let offsets: Vec<(usize, usize)> = (0..n * m)
            .into_par_iter()
            .filter_map(|idx| {
                let v = VertexId::new(idx / m, idx % m);
                if idx == 0 {
                    return None;
                }
                let d = spec.torus.metric(origin, spec.point(v));
                (lo <= d && d <= hi).then_some((v.i, v.j))
            })
            .collect();

        Ok(Self::from_offsets(spec, r, offsets))
    }

    /// All-pairs construction, evaluating the distance of every vertex pair.
    ///
    /// Reference implementation for [`TorusGraph::build`]; limited to
    /// `n * m <= 10^4`. The offsets are read off `v(0, 0)` and every other
    /// neighbourhood is checked to be their translate.
    pub fn naive_build(spec: GridSpec) -> Result<Self> {
        let adjacency = naive_adjacency(spec)?;
        let r = spec.circumradius();
        let (n, m) = (spec.n, spec.m);
        let offsets: Vec<(usize, usize)> = adjacency[0].iter().map(|&w| (w / m, w % m)).collect();
        let graph = Self::from_offsets(spec, r, offsets);

        for (u, list) in adjacency.iter().enumerate() {
            let mut expected: Vec<usize> = graph.neighbors(u).collect();
            expected.sort_unstable();
            if *list != expected {
                let v = VertexId::new(u / m, u % m);
                return Err(Error::InvalidGrid(format!(
                    "neighbourhood of ({}, {}) is not a translate of the origin's \
                     on a {n}x{m} grid",
                    v.i, v.j
                )));
            }
        }
        Ok(graph)
    }

    fn from_offsets(spec: GridSpec, r: f64, mut offsets: Vec<(usize, usize)>) -> Self {
        offsets.sort_unstable();
        let mut offset_mask = vec![false; spec.n * spec.m];
        for &(s, t) in &offsets {
            offset_mask[s * spec.m + t] = true;
        }
        TorusGraph {
            spec,
            r,
            offsets,
            offset_mask,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn circumradius(&self) -> f64 {
        self.r
    }

    /// Neighbour offsets of `v(0, 0)`, sorted.
    pub fn offsets(&self) -> &[(usize, usize)] {
        &self.offsets
    }

    /// Common degree of every vertex.
    pub fn regular_degree(&self) -> usize {
        self.offsets.len()
    }

    pub fn edge_count(&self) -> usize {
        self.spec.vertex_count() * self.offsets.len() / 2
    }

    /// Neighbours of `v`: the offsets translated by `v` modulo `(n, m)`.
    pub fn neighbors_of(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let (n, m) = (self.spec.n, self.spec.m);
        if v.i >= n || v.j >= m {
            return Err(Error::VertexOutOfRange {
                index: v.i * m + v.j,
                count: n * m,
            });
        }
        Ok(self
            .offsets
            .iter()
            .map(|&(s, t)| VertexId::new((s + v.i) % n, (t + v.j) % m))
            .collect())
    }

    /// Writes the graph in DIMACS `p edge` format with 1-based ids, one
    /// `e u v` line per edge (`u < v`), ascending by `u` then `v`.
    pub fn export_dimacs<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "p edge {} {}", self.vertex_count(), self.edge_count())?;
        self.for_each_edge(|u, v| writeln!(sink, "e {} {}", u + 1, v + 1))?;
        sink.flush()?;
        Ok(())
    }

    /// Writes `u v` (0-based, `u < v`) per edge in the same order as the
    /// DIMACS export.
    pub fn export_edge_list<W: Write>(&self, mut sink: W) -> Result<()> {
        self.for_each_edge(|u, v| writeln!(sink, "{u} {v}"))?;
        sink.flush()?;
        Ok(())
    }

    fn for_each_edge<F>(&self, mut f: F) -> std::io::Result<()>
    where
        F: FnMut(usize, usize) -> std::io::Result<()>,
    {
        let mut row = Vec::with_capacity(self.offsets.len());
        for u in 0..self.vertex_count() {
            row.clear();
            row.extend(self.neighbors(u).filter(|&v| v > u));
            row.sort_unstable();
            for &v in &row {
                f(u, v)?;
            }
        }
        Ok(())
    }
}

impl Graph for TorusGraph {
    fn vertex_count(&self) -> usize {
        self.spec.vertex_count()
    }

    fn degree(&self, _v: usize) -> usize {
        self.offsets.len()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (n, m) = (self.spec.n, self.spec.m);
        let (i, j) = (v / m, v % m);
        self.offsets.iter().map(move |&(s, t)| {
            let mut a = s + i;
            if a >= n {
                a -= n;
            }
            let mut b = t + j;
            if b >= m {
                b -= m;
            }
            a * m + b
        })
    }

    fn is_adjacent(&self, u: usize, v: usize) -> bool {
        let (n, m) = (self.spec.n, self.spec.m);
        let (ui, uj) = (u / m, u % m);
        let (vi, vj) = (v / m, v % m);
        let s = (vi + n - ui) % n;
        let t = (vj + m - uj) % m;
        self.offset_mask[s * m + t]
    }
}

/// Full adjacency lists (sorted) from all-pairs distance evaluation.
pub fn naive_adjacency(spec: GridSpec) -> Result<Vec<Vec<usize>>> {
    const LIMIT: usize = 10_000;
    if spec.vertex_count() > LIMIT {
        return Err(Error::SizeGuard {
            vertices: spec.vertex_count(),
            limit: LIMIT,
        });
    }
    let r = spec.check_hypotheses()?;
    let (lo, hi) = (1.0 - 2.0 * r, 1.0 + 2.0 * r);
    let count = spec.vertex_count();
    let points: Vec<TorusPoint> = (0..count)
        .map(|u| spec.point(VertexId::new(u / spec.m, u % spec.m)))
        .collect();

    let mut adjacency = vec![Vec::new(); count];
    for u in 0..count {
        for v in u + 1..count {
            let d = spec.torus.metric(points[u], points[v]);
            if lo <= d && d <= hi {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(adjacency)
}

/// Explicit adjacency-list graph, for small hand-built instances and for
/// graphs read back from DIMACS files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    adjacency: Vec<Vec<usize>>,
}

impl AdjacencyGraph {
    /// Undirected graph from an edge list; duplicates and self-loops are
    /// dropped.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        index: w,
                        count: vertex_count,
                    });
                }
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(AdjacencyGraph { adjacency })
    }

    pub fn edgeless(vertex_count: usize) -> Self {
        AdjacencyGraph {
            adjacency: vec![Vec::new(); vertex_count],
        }
    }

    pub fn complete(vertex_count: usize) -> Self {
        let adjacency = (0..vertex_count)
            .map(|u| (0..vertex_count).filter(|&v| v != u).collect())
            .collect();
        AdjacencyGraph { adjacency }
    }

    pub fn cycle(vertex_count: usize) -> Self {
        let edges: Vec<_> = (0..vertex_count)
            .map(|u| (u, (u + 1) % vertex_count))
            .collect();
        Self::from_edges(vertex_count, &edges).expect("cycle edges are in range")
    }

    /// Materialises any [`Graph`].
    pub fn from_graph<G: Graph>(g: &G) -> Self {
        let adjacency = (0..g.vertex_count())
            .map(|u| {
                let mut list: Vec<usize> = g.neighbors(u).collect();
                list.sort_unstable();
                list
            })
            .collect();
        AdjacencyGraph { adjacency }
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

impl Graph for AdjacencyGraph {
    fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied()
    }

    fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }
}

/// Reads a DIMACS `p edge` graph (1-based ids; `c` lines are comments).
pub fn read_dimacs<R: BufRead>(reader: R) -> Result<AdjacencyGraph> {
    let mut vertex_count = None;
    let mut declared_edges = 0usize;
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = lineno + 1;
        let parse_err = |msg: &str| Error::Parse {
            line: line_no,
            msg: msg.to_string(),
        };
        let mut fields = line.split_whitespace();
        match fields.next() {
            None | Some("c") => continue,
            Some("p") => {
                if fields.next() != Some("edge") {
                    return Err(parse_err("expected `p edge <vertices> <edges>`"));
                }
                let nv = fields.next().and_then(|s| s.parse().ok());
                let ne = fields.next().and_then(|s| s.parse().ok());
                match (nv, ne) {
                    (Some(nv), Some(ne)) => {
                        vertex_count = Some(nv);
                        declared_edges = ne;
                    }
                    _ => return Err(parse_err("malformed problem line")),
                }
            }
            Some("e") => {
                let u: Option<usize> = fields.next().and_then(|s| s.parse().ok());
                let v: Option<usize> = fields.next().and_then(|s| s.parse().ok());
                match (u, v) {
                    (Some(u), Some(v)) if u >= 1 && v >= 1 => edges.push((u - 1, v - 1)),
                    _ => return Err(parse_err("malformed edge line")),
                }
            }
            Some(_) => return Err(parse_err("unknown line type")),
        }
    }
    let vertex_count = vertex_count.ok_or(Error::Parse {
        line: 0,
        msg: "missing problem line".into(),
    })?;
    if edges.len() != declared_edges {
        return Err(Error::Parse {
            line: 0,
            msg: format!(
                "header declares {declared_edges} edges, found {}",
                edges.len()
            ),
        });
    }
    AdjacencyGraph::from_edges(vertex_count, &edges)
}
