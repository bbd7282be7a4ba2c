use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::SubsetWord;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WalkOutcome {
    /// `D_0, ..., D_x`.
    Path { path: Vec<SubsetWord> },
    /// No eligible neighbour after `path.len() - 1` steps.
    Stuck { path: Vec<SubsetWord> },
}

impl WalkOutcome {
    pub fn path(&self) -> &[SubsetWord] {
        match self {
            WalkOutcome::Path { path } | WalkOutcome::Stuck { path } => path,
        }
    }

    pub fn succeeded(&self) -> bool {
        matches!(self, WalkOutcome::Path { .. })
    }
}

/// Walks `steps` times from `start` through `family`, each step swapping an
/// element of `start` out for an element outside `start`, so `|D_l \ D_0| = l`.
/// Among eligible neighbours the colex-first is taken.
pub fn neighbor_walk(
    family: &[SubsetWord],
    start: &SubsetWord,
    steps: usize,
) -> Result<WalkOutcome> {
    let t = start.n();
    if !t.is_multiple_of(2) || start.len() != t / 2 {
        return Err(Error::Precondition(format!(
            "start must be a {}-subset of [{t}]",
            t / 2
        )));
    }
    if steps > t / 2 {
        return Err(Error::Precondition(format!(
            "steps {steps} exceed t/2 = {}",
            t / 2
        )));
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
                "{{{s}}} is not a {}-set",
                t / 2
            )));
        }
    }
    let members: HashSet<&SubsetWord> = family.iter().collect();
    if !members.contains(start) {
        return Err(Error::Precondition(format!(
            "start {{{start}}} not in family"
        )));
    }

    let mut path = vec![start.clone()];
    for _ in 0..steps {
        let current = path.last().unwrap();
        let mut best: Option<SubsetWord> = None;
        for out in current.elements().filter(|&e| start.contains(e)) {
            for inn in (1..=t).filter(|&e| !start.contains(e) && !current.contains(e)) {
                let mut next = current.clone();
                next.remove(out);
                next.insert(inn);
                if members.contains(&next) && best.as_ref().is_none_or(|b| next < *b) {
                    best = Some(next);
                }
            }
        }
        match best {
            Some(next) => path.push(next),
            None => return Ok(WalkOutcome::Stuck { path }),
        }
    }
    Ok(WalkOutcome::Path { path })
}
