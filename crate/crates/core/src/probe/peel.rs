use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::SubsetWord;

/// Largest subfamily of `family` in which every member has at least
/// `threshold` neighbours (`|A △ B| = 2`) inside it, found by repeatedly
/// deleting members below the threshold. Returned in colex order.
///
/// All members must be `t/2`-subsets of the same ground set `[t]`, `t` even.
pub fn peel(family: &[SubsetWord], threshold: usize) -> Result<Vec<SubsetWord>> {
    let members = dedup_checked(family)?;
    let adj = neighbor_lists(&members);
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; members.len()];
    let mut queue: Vec<usize> = (0..members.len())
        .filter(|&v| degree[v] < threshold)
        .collect();
    for &v in &queue {
        removed[v] = true;
    }
    while let Some(v) = queue.pop() {
        for &u in &adj[v] {
            if removed[u] {
                continue;
            }
            degree[u] -= 1;
            if degree[u] < threshold {
                removed[u] = true;
                queue.push(u);
            }
        }
    }
    Ok(members
        .into_iter()
        .zip(removed)
        .filter(|(_, r)| !r)
        .map(|(s, _)| s)
        .collect())
}

/// Smallest neighbour count within the family; `None` when empty.
pub fn min_neighbor_degree(family: &[SubsetWord]) -> Result<Option<usize>> {
    let members = dedup_checked(family)?;
    Ok(neighbor_lists(&members).iter().map(Vec::len).min())
}

fn dedup_checked(family: &[SubsetWord]) -> Result<Vec<SubsetWord>> {
    let Some(first) = family.first() else {
        return Ok(Vec::new());
    };
    let t = first.n();
    if t % 2 != 0 {
        return Err(Error::Precondition(format!("ground size {t} must be even")));
    }
    for s in family {
        if s.n() != t {
            return Err(Error::GroundSetMismatch {
                left: t,
                right: s.n(),
            });
        }
        if s.len() != t / 2 {
            return Err(Error::Precondition(format!(
                "mixed sizes: {{{s}}} has {} elements, expected {}",
                s.len(),
                t / 2
            )));
        }
    }
    let mut members = family.to_vec();
    members.sort();
    members.dedup();
    Ok(members)
}

/// Neighbour lists via single-element swaps.
pub(crate) fn neighbor_lists(members: &[SubsetWord]) -> Vec<Vec<usize>> {
    let Some(first) = members.first() else {
        return Vec::new();
    };
    let t = first.n();
    if t <= 64 {
        let index: HashMap<u64, usize> = members
            .iter()
            .enumerate()
            .map(|(i, s)| (s.to_mask(), i))
            .collect();
        let full = if t == 64 { !0 } else { (1u64 << t) - 1 };
        members
            .iter()
            .map(|s| {
                let m = s.to_mask();
                let mut out = Vec::new();
                let mut ins = m;
                while ins != 0 {
                    let e = ins & ins.wrapping_neg();
                    ins ^= e;
                    let mut outs = full & !m;
                    while outs != 0 {
                        let f = outs & outs.wrapping_neg();
                        outs ^= f;
                        if let Some(&j) = index.get(&(m ^ e ^ f)) {
                            out.push(j);
                        }
                    }
                }
                out
            })
            .collect()
    } else {
        let index: HashMap<&SubsetWord, usize> =
            members.iter().enumerate().map(|(i, s)| (s, i)).collect();
        members
            .iter()
            .map(|s| {
                let mut out = Vec::new();
                let outside: Vec<usize> = (1..=t).filter(|&e| !s.contains(e)).collect();
                for e in s.elements() {
                    for &f in &outside {
                        let mut c = s.clone();
                        c.remove(e);
                        c.insert(f);
                        if let Some(&j) = index.get(&c) {
                            out.push(j);
                        }
                    }
                }
                out
            })
            .collect()
    }
}
