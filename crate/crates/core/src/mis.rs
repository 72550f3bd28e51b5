//! Independent sets: validation, constructive heuristics, local search, an
//! exact solver for tiny graphs, and the density bound `|M| / (n m)`.

use std::cmp::Ordering;
use std::io::{BufRead, Write};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid_graph::{Graph, TorusGraph, VertexId};
use crate::torus::TorusPoint;

/// Best published upper bound on the density of 1-avoiding planar sets.
/// A certified bound above this value signals a construction bug.
pub const DENSITY_UPPER_BOUND: f64 = 0.2470;

/// Subset of the vertices of a graph, as a membership bit vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentSet {
    members: FixedBitSet,
    size: usize,
}

impl IndependentSet {
    pub fn empty(vertex_count: usize) -> Self {
        IndependentSet {
            members: FixedBitSet::with_capacity(vertex_count),
            size: 0,
        }
    }

    pub fn from_members<I>(vertex_count: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut set = Self::empty(vertex_count);
        for v in members {
            if v >= vertex_count {
                return Err(Error::VertexOutOfRange {
                    index: v,
                    count: vertex_count,
                });
            }
            set.members.insert(v);
        }
        set.size = set.members.count_ones(..);
        Ok(set)
    }

    fn from_flags(flags: &[bool]) -> Self {
        Self::from_members(flags.len(), (0..flags.len()).filter(|&v| flags[v]))
            .expect("indices are in range")
    }

    /// Length of the membership vector.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Number of members.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(v)
    }

    /// Member indices in increasing order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    /// Lexicographic order on the bit vectors, index 0 first.
    fn cmp_bits(&self, other: &Self) -> Ordering {
        let mut a = self.members.ones();
        let mut b = other.members.ones();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                // the set whose next member comes first has a 1 where the other has a 0
                (Some(x), Some(y)) if x != y => return y.cmp(&x),
                _ => {}
            }
        }
    }

    /// Writes the solution file: `<n> <m> <size>` then one `i j` line per
    /// member, sorted.
    pub fn write_solution<W: Write>(&self, n: usize, m: usize, mut sink: W) -> Result<()> {
        if self.len() != n * m {
            return Err(Error::LengthMismatch {
                expected: n * m,
                found: self.len(),
            });
        }
        writeln!(sink, "{n} {m} {}", self.size)?;
        for v in self.members() {
            writeln!(sink, "{} {}", v / m, v % m)?;
        }
        sink.flush()?;
        Ok(())
    }

    /// Parses a solution file, returning `(n, m, set)`.
    pub fn read_solution<R: BufRead>(reader: R) -> Result<(usize, usize, Self)> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, line)) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
                None => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: "empty solution file".into(),
                    })
                }
            }
        };
        let head: Vec<usize> = parse_fields(&header, 1)?;
        let [n, m, size] = head[..] else {
            return Err(Error::Parse {
                line: 1,
                msg: "header must be `<n> <m> <size>`".into(),
            });
        };
        let mut members = Vec::with_capacity(size);
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<usize> = parse_fields(&line, idx + 1)?;
            match f[..] {
                [i, j] if i < n && j < m => members.push(VertexId::new(i, j).index(m)),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("expected a vertex `i j` within {n}x{m}"),
                    })
                }
            }
        }
        let set = Self::from_members(n * m, members)?;
        if set.size != size {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {size} members, found {}", set.size),
            });
        }
        Ok((n, m, set))
    }
}

fn parse_fields(line: &str, line_no: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|s| {
            s.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("`{s}` is not a non-negative integer"),
            })
        })
        .collect()
}

/// True iff no edge has both endpoints in `s`.
pub fn validate<G: Graph>(g: &G, s: &IndependentSet) -> Result<bool> {
    if s.len() != g.vertex_count() {
        return Err(Error::LengthMismatch {
            expected: g.vertex_count(),
            found: s.len(),
        });
    }
    Ok(s.members().all(|u| g.neighbors(u).all(|v| !s.contains(v))))
}

/// Scans the vertices in a seed-determined random order, keeping each vertex
/// that has no kept neighbour. The result is maximal by inclusion.
pub fn greedy<G: Graph>(g: &G, seed: u64) -> IndependentSet {
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    greedy_in_order(g, order)
}

/// Greedy scan in order of torus distance from a seed-chosen point (ties by
/// index). Grows one disc-shaped cluster first and packs further clusters
/// around it, which random orders rarely do.
pub fn radial_greedy(g: &TorusGraph, seed: u64) -> IndependentSet {
    let spec = g.spec();
    let torus = spec.torus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centre = TorusPoint::new(rng.gen(), rng.gen());
    let mut keyed: Vec<(f64, usize)> = (0..spec.vertex_count())
        .map(|v| {
            let p = spec.point(VertexId::new(v / spec.m(), v % spec.m()));
            (torus.metric(centre, p), v)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    greedy_in_order(g, keyed.into_iter().map(|(_, v)| v))
}

/// Keeps each vertex of `order` that has no previously kept neighbour.
pub fn greedy_in_order<G, I>(g: &G, order: I) -> IndependentSet
where
    G: Graph,
    I: IntoIterator<Item = usize>,
{
    let count = g.vertex_count();
    let mut blocked = vec![false; count];
    let mut chosen = vec![false; count];
    for v in order {
        if blocked[v] {
            continue;
        }
        chosen[v] = true;
        blocked[v] = true;
        for w in g.neighbors(v) {
            blocked[w] = true;
        }
    }
    IndependentSet::from_flags(&chosen)
}

/// Local-search settings.
///
/// The wall-clock limit is never observed directly: it is turned into a
/// fixed number of perturbation moves so runs are bit-reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    /// Nominal time limit in seconds.
    pub time_limit: f64,
    pub restarts: usize,
    /// Consecutive moves without a new best before falling back to the best
    /// solution seen so far. Zero disables the fallback.
    pub plateau_moves: u64,
    /// Explicit move budget; overrides `time_limit` when set.
    pub budget: Option<u64>,
}

impl SolverConfig {
    /// Moves per second of the local search on `G(100, 100)` of the
    /// equilateral 3.331 torus, measured single-threaded.
    pub const MOVES_PER_SECOND: f64 = 20_000.0;

    pub fn with_seed(seed: u64) -> Self {
        SolverConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    /// Total number of perturbation moves across all restarts.
    pub fn move_budget(&self) -> u64 {
        self.budget
            .unwrap_or_else(|| (self.time_limit * Self::MOVES_PER_SECOND).ceil() as u64)
    }

    fn check(&self) -> Result<()> {
        if self.budget.is_none() && !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "time limit must be positive, got {}",
                self.time_limit
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be positive".into()));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            time_limit: 10.0,
            restarts: 1,
            plateau_moves: 20_000,
            budget: None,
        }
    }
}

/// Iterated local search from `start`.
///
/// Each move forces a random non-member into the set (evicting its member
/// neighbours) and then applies (1,2)-swaps, which replace one member by two
/// non-adjacent vertices whose only member neighbour it was, until none is
/// left. Moves that shrink the set are accepted with a probability that
/// decays with the loss. Restarts run independently with seeds
/// `seed + restart` and share the move budget; the largest result wins, ties
/// going to the lexicographically smallest bit vector.
pub fn local_search<G: Graph>(
    g: &G,
    start: &IndependentSet,
    cfg: &SolverConfig,
) -> Result<IndependentSet> {
    cfg.check()?;
    if !validate(g, start)? {
        return Err(Error::NotIndependent);
    }
    if g.vertex_count() == 0 {
        return Ok(start.clone());
    }
    let total = cfg.move_budget();
    let per_restart = total / cfg.restarts as u64;
    let extra = total % cfg.restarts as u64;

    let results: Vec<IndependentSet> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let budget = per_restart + u64::from((r as u64) < extra);
            let seed = cfg.seed.wrapping_add(r as u64);
            Search::new(g, start, seed).run(budget, cfg.plateau_moves)
        })
        .collect();

    Ok(results
        .into_iter()
        .reduce(|best, s| match s.size.cmp(&best.size) {
            Ordering::Greater => s,
            Ordering::Equal if s.cmp_bits(&best) == Ordering::Less => s,
            _ => best,
        })
        .expect("at least one restart"))
}

const PERTURB_SAMPLES: usize = 64;

/// Full solver used by the pipeline: local search from a random-order greedy
/// start and from a radial greedy start, half the move budget each, keeping
/// the larger result (the random-order one on ties).
///
/// The two starts tend to settle into different cluster arrangements, and
/// on some tori either one is clearly better.
pub fn solve(g: &TorusGraph, cfg: &SolverConfig) -> Result<IndependentSet> {
    cfg.check()?;
    let total = cfg.move_budget();
    let half = SolverConfig {
        budget: Some(total / 2),
        ..cfg.clone()
    };
    let rest = SolverConfig {
        budget: Some(total - total / 2),
        ..cfg.clone()
    };
    let (a, b) = rayon::join(
        || local_search(g, &greedy(g, cfg.seed), &half),
        || local_search(g, &radial_greedy(g, cfg.seed), &rest),
    );
    let (a, b) = (a?, b?);
    Ok(if b.size() > a.size() { b } else { a })
}

/// Set of vertex ids with O(1) insert, remove and uniform sampling.
struct IndexSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

impl IndexSet {
    const ABSENT: usize = usize::MAX;

    fn new(capacity: usize) -> Self {
        IndexSet {
            items: Vec::new(),
            pos: vec![Self::ABSENT; capacity],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != Self::ABSENT
    }

    fn insert(&mut self, v: usize) {
        if !self.contains(v) {
            self.pos[v] = self.items.len();
            self.items.push(v);
        }
    }

    fn remove(&mut self, v: usize) {
        let p = self.pos[v];
        if p == Self::ABSENT {
            return;
        }
        let last = self.items.pop().expect("non-empty");
        if last != v {
            self.items[p] = last;
            self.pos[last] = p;
        }
        self.pos[v] = Self::ABSENT;
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}

/// State of one local-search run.
struct Search<'g, G> {
    g: &'g G,
    rng: ChaCha8Rng,
    in_set: Vec<bool>,
    // number of member neighbours
    tight: Vec<u32>,
    // sum of member-neighbour ids; identifies the member when tight == 1
    owner_sum: Vec<usize>,
    // non-members with no member neighbour
    free: IndexSet,
    size: usize,
    age: Vec<u64>,
    clock: u64,
    queue: Vec<usize>,
    queued: Vec<bool>,
    undo: Vec<(usize, bool)>,
    logging: bool,
    one_tight: Vec<usize>,
}

impl<'g, G: Graph> Search<'g, G> {
    fn new(g: &'g G, start: &IndependentSet, seed: u64) -> Self {
        let count = g.vertex_count();
        let mut s = Search {
            g,
            rng: ChaCha8Rng::seed_from_u64(seed),
            in_set: vec![false; count],
            tight: vec![0; count],
            owner_sum: vec![0; count],
            free: IndexSet::new(count),
            size: 0,
            age: vec![0; count],
            clock: 0,
            queue: Vec::new(),
            queued: vec![false; count],
            undo: Vec::new(),
            logging: false,
            one_tight: Vec::new(),
        };
        s.load(start);
        s
    }

    fn load(&mut self, set: &IndependentSet) {
        self.in_set.fill(false);
        self.tight.fill(0);
        self.owner_sum.fill(0);
        self.size = 0;
        for v in set.members() {
            self.in_set[v] = true;
            self.size += 1;
            for w in self.g.neighbors(v) {
                self.tight[w] += 1;
                self.owner_sum[w] += v;
            }
        }
        self.free = IndexSet::new(self.in_set.len());
        for v in 0..self.in_set.len() {
            if !self.in_set[v] && self.tight[v] == 0 {
                self.free.insert(v);
            }
        }
    }

    fn snapshot(&self) -> IndependentSet {
        IndependentSet::from_flags(&self.in_set)
    }

    fn insert(&mut self, v: usize) {
        debug_assert!(!self.in_set[v] && self.tight[v] == 0);
        self.in_set[v] = true;
        self.size += 1;
        self.free.remove(v);
        self.age[v] = self.clock;
        for w in self.g.neighbors(v) {
            self.tight[w] += 1;
            self.owner_sum[w] += v;
            if self.tight[w] == 1 {
                self.free.remove(w);
            }
        }
        if self.logging {
            self.undo.push((v, true));
        }
    }

    fn remove(&mut self, v: usize) {
        debug_assert!(self.in_set[v]);
        self.in_set[v] = false;
        self.size -= 1;
        self.age[v] = self.clock;
        for w in self.g.neighbors(v) {
            self.tight[w] -= 1;
            self.owner_sum[w] -= v;
            match self.tight[w] {
                0 => self.free.insert(w),
                // w now hangs on a single member, which may gain a swap
                1 if !self.in_set[w] => self.enqueue(self.owner_sum[w]),
                _ => {}
            }
        }
        if self.tight[v] == 0 {
            self.free.insert(v);
        }
        if self.logging {
            self.undo.push((v, false));
        }
    }

    fn enqueue(&mut self, v: usize) {
        if !self.queued[v] {
            self.queued[v] = true;
            self.queue.push(v);
        }
    }

    /// Inserts free vertices in random order until none is left.
    fn fill_free(&mut self) {
        while self.free.len() > 0 {
            let v = self.free.items[self.rng.gen_range(0..self.free.len())];
            self.insert(v);
            self.enqueue(v);
        }
    }

    /// Applies (1,2)-swaps until no queued member admits one.
    fn descend(&mut self) {
        self.fill_free();
        while let Some(x) = self.queue.pop() {
            self.queued[x] = false;
            if !self.in_set[x] {
                continue;
            }
            let mut cands = std::mem::take(&mut self.one_tight);
            cands.clear();
            cands.extend(
                self.g
                    .neighbors(x)
                    .filter(|&w| self.tight[w] == 1 && !self.in_set[w]),
            );
            let pair = if cands.len() >= 2 {
                find_non_adjacent_pair(self.g, &cands, &mut self.rng)
            } else {
                None
            };
            self.one_tight = cands;
            if let Some((u, w)) = pair {
                self.remove(x);
                self.insert(u);
                self.insert(w);
                self.enqueue(u);
                self.enqueue(w);
                self.fill_free();
            }
        }
    }

    /// Forces a random non-member in, evicting its member neighbours.
    fn perturb(&mut self) {
        let count = self.in_set.len();
        if self.size == count {
            return;
        }
        // among a few random non-members, take the one with the fewest member
        // neighbours, then the one left alone longest
        let mut v = self.random_non_member();
        for _ in 1..PERTURB_SAMPLES {
            let alt = self.random_non_member();
            if (self.tight[alt], self.age[alt]) < (self.tight[v], self.age[v]) {
                v = alt;
            }
        }
        let evict: Vec<usize> = self.g.neighbors(v).filter(|&w| self.in_set[w]).collect();
        for w in evict {
            self.remove(w);
        }
        self.insert(v);
        self.enqueue(v);
    }

    fn random_non_member(&mut self) -> usize {
        let count = self.in_set.len();
        loop {
            let v = self.rng.gen_range(0..count);
            if !self.in_set[v] {
                return v;
            }
        }
    }

    fn rollback(&mut self) {
        self.logging = false;
        while let Some((v, inserted)) = self.undo.pop() {
            if inserted {
                self.remove(v);
            } else {
                self.insert(v);
            }
        }
        self.queue.clear();
        self.queued.fill(false);
    }

    fn run(mut self, budget: u64, plateau_moves: u64) -> IndependentSet {
        for v in 0..self.in_set.len() {
            if self.in_set[v] {
                self.enqueue(v);
            }
        }
        self.descend();
        let mut best = self.snapshot();
        let mut since_best = 0u64;

        for _ in 0..budget {
            self.clock += 1;
            let before = self.size;
            self.undo.clear();
            self.logging = true;
            self.perturb();
            self.descend();
            self.logging = false;

            if self.size > best.size() {
                best = self.snapshot();
                since_best = 0;
            } else {
                since_best += 1;
            }

            if self.size < before {
                // accept a loss of `d` with probability 1 / (1 + d * d_best)
                let d = (before - self.size) as f64;
                let d_best = (best.size() - self.size) as f64;
                if !self.rng.gen_bool(1.0 / (1.0 + d * d_best)) {
                    self.rollback();
                }
            }

            if plateau_moves > 0 && since_best >= plateau_moves {
                self.load(&best);
                since_best = 0;
            }
        }
        best
    }
}

fn find_non_adjacent_pair<G: Graph>(
    g: &G,
    cands: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<(usize, usize)> {
    let k = cands.len();
    let shift = rng.gen_range(0..k);
    for a in 0..k {
        let u = cands[(a + shift) % k];
        for b in a + 1..k {
            let w = cands[(b + shift) % k];
            if !g.is_adjacent(u, w) {
                return Some((u, w));
            }
        }
    }
    None
}

/// Maximum independent set by branch and bound.
///
/// Branches on a highest-degree remaining vertex (include / exclude), takes
/// vertices of degree at most one without branching, and prunes with a
/// greedy clique-cover bound. Limited to 100 vertices.
pub fn exact_mis<G: Graph>(g: &G) -> Result<IndependentSet> {
    const LIMIT: usize = 100;
    let count = g.vertex_count();
    if count > LIMIT {
        return Err(Error::SizeGuard {
            vertices: count,
            limit: LIMIT,
        });
    }
    let adj: Vec<u128> = (0..count)
        .map(|v| g.neighbors(v).fold(0u128, |acc, w| acc | (1u128 << w)))
        .collect();
    let all = if count == 128 {
        u128::MAX
    } else {
        (1u128 << count) - 1
    };
    let mut bnb = BranchAndBound {
        adj,
        best: 0,
        best_size: 0,
    };
    bnb.search(all, 0, 0);
    IndependentSet::from_members(count, mask_members(bnb.best))
}

struct BranchAndBound {
    adj: Vec<u128>,
    best: u128,
    best_size: u32,
}

impl BranchAndBound {
    fn search(&mut self, mut cand: u128, mut chosen: u128, mut size: u32) {
        // vertices with at most one remaining neighbour belong to some optimum
        loop {
            let mut changed = false;
            for v in mask_members(cand) {
                if cand & (1u128 << v) == 0 {
                    continue;
                }
                if (self.adj[v] & cand).count_ones() <= 1 {
                    chosen |= 1u128 << v;
                    size += 1;
                    cand &= !(self.adj[v] | (1u128 << v));
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if cand == 0 {
            if size > self.best_size {
                self.best_size = size;
                self.best = chosen;
            }
            return;
        }
        if size + self.clique_cover(cand) <= self.best_size {
            return;
        }
        let v = mask_members(cand)
            .max_by_key(|&v| ((self.adj[v] & cand).count_ones(), std::cmp::Reverse(v)))
            .expect("cand is non-empty");
        let bit = 1u128 << v;
        self.search(cand & !(self.adj[v] | bit), chosen | bit, size + 1);
        self.search(cand & !bit, chosen, size);
    }

    /// Number of cliques in a greedy clique cover of `cand`; an upper bound
    /// on its independence number.
    fn clique_cover(&self, cand: u128) -> u32 {
        let mut cliques: Vec<u128> = Vec::new();
        for v in mask_members(cand) {
            // a clique can take v if every member is adjacent to v
            match cliques.iter_mut().find(|c| **c & !self.adj[v] == 0) {
                Some(c) => *c |= 1u128 << v,
                None => cliques.push(1u128 << v),
            }
        }
        cliques.len() as u32
    }
}

fn mask_members(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let v = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(v)
    })
}

/// Density lower bound `set_size / (n m)`.
pub fn density_bound(set_size: usize, n: usize, m: usize) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidGrid(format!(
            "grid sizes must be positive, got n = {n}, m = {m}"
        )));
    }
    if set_size > n * m {
        return Err(Error::SetTooLarge {
            size: set_size,
            vertices: n * m,
        });
    }
    Ok(set_size as f64 / (n * m) as f64)
}

/// Validates `s` on a built torus graph and returns its density bound.
///
/// A built [`TorusGraph`] already satisfies perfect periodicity and
/// `2r < 1`. A result above [`DENSITY_UPPER_BOUND`] is reported as
/// [`Error::UpperBoundViolation`].
pub fn certified_bound(g: &TorusGraph, s: &IndependentSet) -> Result<f64> {
    if !validate(g, s)? {
        return Err(Error::NotIndependent);
    }
    let spec = g.spec();
    let bound = density_bound(s.size(), spec.n(), spec.m())?;
    if bound > DENSITY_UPPER_BOUND {
        return Err(Error::UpperBoundViolation { bound });
    }
    Ok(bound)
}
