//! Maximum families under a pair condition, as maximum independent sets of
//! the violation graph on `P[n]`.
//!
//! The solver is a bitset branch-and-bound in the MCQ/BBMC style: candidate
//! sets are greedily partitioned into cliques of the violation graph, and
//! since an independent set meets each clique at most once the number of
//! cliques bounds what a branch can still add.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::SetFamily;
use crate::lattice::{power_set, SubsetWord};
use crate::par::Exec;
use crate::restrictions::PairCondition;

/// Default largest `n` for which the adjacency matrix is materialized.
pub const DEFAULT_GRAPH_CAP: usize = 14;
/// Largest `n` the cap can be raised to.
pub const MAX_GRAPH_CAP: usize = 20;
const MAX_ADJACENCY_BYTES: u64 = 1 << 31;

/// Violation graph over a vertex list of subsets, stored as bit rows.
#[derive(Clone, Debug)]
pub struct ViolationGraph {
    n: usize,
    vertices: Vec<u64>,
    rows: Vec<Vec<u64>>,
}

impl ViolationGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Vertex masks in (layer, colex) order.
    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u][v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, u: usize) -> usize {
        self.rows[u].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.len()).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(SubsetWord, SubsetWord)> {
        let mut out = Vec::new();
        for u in 0..self.len() {
            for v in u + 1..self.len() {
                if self.adjacent(u, v) {
                    out.push((
                        SubsetWord::from_mask(self.n, self.vertices[u]),
                        SubsetWord::from_mask(self.n, self.vertices[v]),
                    ));
                }
            }
        }
        out
    }
}

pub fn build_violation_graph(cond: &PairCondition, n: usize) -> Result<ViolationGraph> {
    build_violation_graph_with(cond, n, DEFAULT_GRAPH_CAP, Exec::default())
}

/// `cap` bounds `n`; it may be raised up to [`MAX_GRAPH_CAP`], subject to the
/// adjacency matrix fitting in memory.
pub fn build_violation_graph_with(
    cond: &PairCondition,
    n: usize,
    cap: usize,
    exec: Exec,
) -> Result<ViolationGraph> {
    let cap = cap.min(MAX_GRAPH_CAP);
    if n > cap {
        return Err(Error::CapExceeded {
            what: format!("violation graph on P[{n}]"),
            cap: cap as u64,
        });
    }
    let count = 1u64 << n;
    let bytes = count * count.div_ceil(64) * 8;
    if bytes > MAX_ADJACENCY_BYTES {
        return Err(Error::CapExceeded {
            what: format!("adjacency matrix of {bytes} bytes"),
            cap: MAX_ADJACENCY_BYTES,
        });
    }
    let vertices: Vec<u64> = power_set(n).map(|s| s.to_mask()).collect();
    build_on(cond, n, vertices, exec)
}

/// Violation graph restricted to the given vertex masks.
pub fn build_on(
    cond: &PairCondition,
    n: usize,
    vertices: Vec<u64>,
    exec: Exec,
) -> Result<ViolationGraph> {
    let compiled = cond.compile(n)?;
    let words = vertices.len().div_ceil(64);
    let rows = exec.map_range(vertices.len(), |u| {
        let mut row = vec![0u64; words];
        let a = vertices[u];
        for (v, &b) in vertices.iter().enumerate() {
            if compiled.conflicts(a, b) {
                row[v / 64] |= 1 << (v % 64);
            }
        }
        row
    });
    Ok(ViolationGraph { n, vertices, rows })
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub time_limit: Option<Duration>,
    pub graph_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            time_limit: None,
            graph_cap: DEFAULT_GRAPH_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalResult {
    pub size: usize,
    #[serde(skip)]
    pub certificate: SetFamily,
    pub optimal: bool,
    pub nodes_explored: u64,
    pub elapsed_ms: u64,
}

pub fn max_family(cond: &PairCondition, n: usize, opts: &SearchOptions) -> Result<ExtremalResult> {
    let start = Instant::now();
    let graph = build_violation_graph_with(cond, n, opts.graph_cap, Exec::default())?;
    let deadline = opts.time_limit.map(|t| start + t);
    let (picked, nodes, optimal) = max_independent_set(&graph, deadline);
    let certificate = SetFamily::from_sets(
        n,
        picked
            .iter()
            .map(|&v| SubsetWord::from_mask(n, graph.vertices[v])),
    )?;
    Ok(ExtremalResult {
        size: certificate.len(),
        certificate,
        optimal,
        nodes_explored: nodes,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Returns (vertex indices, nodes explored, completed).
pub fn max_independent_set(
    graph: &ViolationGraph,
    deadline: Option<Instant>,
) -> (Vec<usize>, u64, bool) {
    let len = graph.len();
    if len == 0 {
        return (Vec::new(), 0, true);
    }
    // Fewest conflicts first; ties by canonical index.
    let mut order: Vec<usize> = (0..len).collect();
    let degrees: Vec<usize> = (0..len).map(|u| graph.degree(u)).collect();
    order.sort_by_key(|&u| (degrees[u], u));

    let words = len.div_ceil(64);
    let rows: Vec<Vec<u64>> = order
        .iter()
        .map(|&u| {
            let mut row = vec![0u64; words];
            for (new_v, &old_v) in order.iter().enumerate() {
                if graph.adjacent(u, old_v) {
                    row[new_v / 64] |= 1 << (new_v % 64);
                }
            }
            row
        })
        .collect();

    let mut solver = Bbmc {
        rows,
        best: Vec::new(),
        nodes: 0,
        deadline,
        timed_out: false,
    };
    solver.greedy(len);
    let mut all = vec![0u64; words];
    for v in 0..len {
        all[v / 64] |= 1 << (v % 64);
    }
    solver.expand(&mut Vec::new(), all);

    let mut picked: Vec<usize> = solver.best.iter().map(|&v| order[v]).collect();
    picked.sort_unstable();
    (picked, solver.nodes, !solver.timed_out)
}

struct Bbmc {
    rows: Vec<Vec<u64>>,
    best: Vec<usize>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

#[inline]
fn lowest(set: &[u64]) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

#[inline]
fn clear(set: &mut [u64], v: usize) {
    set[v / 64] &= !(1 << (v % 64));
}

impl Bbmc {
    fn greedy(&mut self, len: usize) {
        let mut blocked = vec![0u64; len.div_ceil(64)];
        for v in 0..len {
            if blocked[v / 64] >> (v % 64) & 1 == 0 {
                self.best.push(v);
                for (b, r) in blocked.iter_mut().zip(&self.rows[v]) {
                    *b |= r;
                }
            }
        }
    }

    /// Greedy clique partition of `p`; returns vertices with cumulative class numbers.
    fn color(&self, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut q = p.to_vec();
        let mut class = 0;
        while lowest(&q).is_some() {
            class += 1;
            let mut r = q.clone();
            while let Some(v) = lowest(&r) {
                clear(&mut r, v);
                clear(&mut q, v);
                order.push(v);
                colors.push(class);
                for (x, a) in r.iter_mut().zip(&self.rows[v]) {
                    *x &= a;
                }
            }
        }
        (order, colors)
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if self.nodes.is_multiple_of(256) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    fn expand(&mut self, current: &mut Vec<usize>, mut p: Vec<u64>) {
        self.nodes += 1;
        if self.out_of_time() {
            return;
        }
        let (order, colors) = self.color(&p);
        for idx in (0..order.len()).rev() {
            if current.len() + colors[idx] <= self.best.len() {
                return;
            }
            let v = order[idx];
            current.push(v);
            let mut next: Vec<u64> = p.iter().zip(&self.rows[v]).map(|(a, r)| a & !r).collect();
            clear(&mut next, v);
            if lowest(&next).is_none() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            clear(&mut p, v);
            if self.timed_out {
                return;
            }
        }
    }
}

/// Test oracle: scans all `2^(2^n)` families for `n <= 4` with the set-level predicate.
pub fn exhaustive_oracle(cond: &PairCondition, n: usize) -> Result<usize> {
    if n > 4 {
        return Err(Error::CapExceeded {
            what: format!("exhaustive family scan at n = {n}"),
            cap: 4,
        });
    }
    let sets: Vec<SubsetWord> = power_set(n).collect();
    let mut conflict = vec![0u32; sets.len()];
    for (u, a) in sets.iter().enumerate() {
        for (v, b) in sets.iter().enumerate() {
            if cond.violates(a, b)? || cond.violates(b, a)? {
                conflict[u] |= 1 << v;
            }
        }
    }
    let mut best = 0;
    for fam in 0u64..1 << sets.len() {
        let fam = fam as u32;
        let size = fam.count_ones();
        if size as usize <= best {
            continue;
        }
        if (0..sets.len()).all(|v| fam >> v & 1 == 0 || conflict[v] & fam == 0) {
            best = size as usize;
        }
    }
    Ok(best)
}
