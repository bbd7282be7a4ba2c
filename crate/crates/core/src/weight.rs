//! Maximum binomial mass `w(G)` over independent layer sets.
//!
//! Exact branch-and-bound over the `n + 1` layers. Vertices are branched in
//! ascending layer order with the include branch first, so among equal-mass
//! optima the first one reached is lexicographically smallest. A greedy pass
//! in descending-mass order seeds the incumbent.

use std::ops::Add;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{binomial_row, BigCount};
use crate::restrictions::RestrictionSystem;

/// Upper limit on `n`.
pub const MAX_WEIGHT_N: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightResult {
    pub w: BigCount,
    /// Certificate, ascending.
    pub layers: Vec<usize>,
}

pub fn weight(sys: &RestrictionSystem) -> Result<WeightResult> {
    sys.validate()
        .map_err(|v| Error::InvalidSystem(v.to_string()))?;
    if sys.n > MAX_WEIGHT_N {
        return Err(Error::CapExceeded {
            what: format!("weight ground size {}", sys.n),
            cap: MAX_WEIGHT_N as u64,
        });
    }
    let row = binomial_row(sys.n as u64);
    let layers = if sys.n <= 120 {
        let masses: Vec<u128> = row.iter().map(|c| c.to_u64_wide()).collect();
        Solver::new(sys, masses).run()
    } else {
        let masses: Vec<BigUint> = row.into_iter().map(|c| c.0).collect();
        Solver::new(sys, masses).run()
    };
    let w = layers
        .iter()
        .map(|&l| crate::lattice::binomial(sys.n as u64, l as i64))
        .sum();
    Ok(WeightResult { w, layers })
}

impl BigCount {
    fn to_u64_wide(&self) -> u128 {
        num_traits::ToPrimitive::to_u128(&self.0).expect("fits u128")
    }
}

/// Branch and bound over vertices relabelled by descending mass
/// (position `p` holds layer `label[p]`), include-first.
struct Solver<W> {
    masses: Vec<W>,
    label: Vec<usize>,
    adj: Vec<Vec<u64>>,
    best: W,
    best_layers: Vec<usize>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

fn bits(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let t = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(w * 64 + t)
        })
    })
}

impl<W> Solver<W>
where
    W: Clone + Ord + Zero + Add<Output = W>,
{
    fn new(sys: &RestrictionSystem, masses: Vec<W>) -> Self {
        let v = sys.n + 1;
        let mut label: Vec<usize> = (0..v).collect();
        label.sort_by(|&a, &b| masses[b].cmp(&masses[a]).then(a.cmp(&b)));
        let mut pos = vec![0; v];
        for (p, &l) in label.iter().enumerate() {
            pos[l] = p;
        }
        let mut adj = vec![vec![0u64; words_for(v)]; v];
        for e in &sys.edges {
            let (a, b) = (pos[e.i], pos[e.j]);
            adj[a][b / 64] |= 1 << (b % 64);
            adj[b][a / 64] |= 1 << (a % 64);
        }
        let masses = label.iter().map(|&l| masses[l].clone()).collect();
        Solver {
            masses,
            label,
            adj,
            best: W::zero(),
            best_layers: Vec::new(),
        }
    }

    fn mass_of(&self, positions: impl Iterator<Item = usize>) -> W {
        positions.fold(W::zero(), |acc, p| acc + self.masses[p].clone())
    }

    fn greedy(&mut self) {
        let mut chosen: Vec<usize> = Vec::new();
        for p in 0..self.masses.len() {
            if chosen.iter().all(|&c| !self.adjacent(c, p)) {
                chosen.push(p);
            }
        }
        let mass = self.mass_of(chosen.iter().copied());
        self.offer(&chosen, mass);
    }

    #[inline]
    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b / 64] >> (b % 64) & 1 == 1
    }

    /// Ties go to the lexicographically smallest ascending layer list.
    fn offer(&mut self, positions: &[usize], mass: W) {
        if mass < self.best {
            return;
        }
        let mut layers: Vec<usize> = positions.iter().map(|&p| self.label[p]).collect();
        layers.sort_unstable();
        if mass > self.best || self.best_layers.is_empty() || layers < self.best_layers {
            self.best = mass;
            self.best_layers = layers;
        }
    }

    fn run(mut self) -> Vec<usize> {
        self.greedy();
        let v = self.masses.len();
        let mut cand = vec![0u64; words_for(v)];
        for i in 0..v {
            cand[i / 64] |= 1 << (i % 64);
        }
        let mut chosen = Vec::new();
        self.expand(&mut chosen, W::zero(), cand);
        self.best_layers
    }

    fn expand(&mut self, chosen: &mut Vec<usize>, current: W, cand: Vec<u64>) {
        let Some(v) = bits(&cand).next() else {
            self.offer(chosen, current);
            return;
        };
        let bound = current.clone() + self.mass_of(bits(&cand));
        if bound < self.best {
            return;
        }
        if bound == self.best {
            // Only taking every candidate reaches the bound.
            let rest: Vec<usize> = bits(&cand).collect();
            let independent = rest
                .iter()
                .enumerate()
                .all(|(k, &a)| rest[k + 1..].iter().all(|&b| !self.adjacent(a, b)));
            if independent {
                let mut all = chosen.clone();
                all.extend(rest);
                self.offer(&all, bound);
            }
            return;
        }

        let mut without = cand;
        without[v / 64] &= !(1 << (v % 64));
        let with: Vec<u64> = without
            .iter()
            .zip(&self.adj[v])
            .map(|(c, a)| c & !a)
            .collect();
        chosen.push(v);
        let next = current.clone() + self.masses[v].clone();
        self.expand(chosen, next, with);
        chosen.pop();
        self.expand(chosen, current, without);
    }
}
