//! Set families bucketed by layer, the condition verifiers, the explicit
//! constructions, and the base-8 line machinery.

mod construct;
pub mod dhj;
mod io;
mod verify;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::SubsetWord;
use crate::restrictions::Edge;

pub use construct::{
    count_counterexample, counterexample_family, counterexample_pair_bound_holds,
    counterexample_threshold, layered_family, parse_beta, sample_counterexample_member, Beta,
    MATERIALIZE_CAP,
};
pub use io::{parse_family, serialize_family};
pub use verify::{
    verify, verify_gx, verify_gx_with, verify_ordered_tilted, verify_tilted, verify_tilted_with,
};

/// A family `A ⊆ P[n]`; bucket `i` holds the `i`-sets in colex order.
#[derive(Clone, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    buckets: Vec<Vec<SubsetWord>>,
}

impl SetFamily {
    pub fn new(n: usize) -> Self {
        SetFamily {
            n,
            buckets: vec![Vec::new(); n + 1],
        }
    }

    /// Rejects duplicates and sets on another ground set.
    pub fn from_sets<I: IntoIterator<Item = SubsetWord>>(n: usize, sets: I) -> Result<Self> {
        let mut fam = SetFamily::new(n);
        for s in sets {
            let text = s.to_string();
            if !fam.insert(s)? {
                return Err(Error::Parse(format!("duplicate set {{{text}}}")));
            }
        }
        Ok(fam)
    }

    /// Returns `false` if the set was already present.
    pub fn insert(&mut self, set: SubsetWord) -> Result<bool> {
        if set.n() != self.n {
            return Err(Error::GroundSetMismatch {
                left: self.n,
                right: set.n(),
            });
        }
        let bucket = &mut self.buckets[set.len()];
        match bucket.binary_search(&set) {
            Ok(_) => Ok(false),
            Err(pos) => {
                bucket.insert(pos, set);
                Ok(true)
            }
        }
    }

    pub(crate) fn push_sorted_unchecked(&mut self, set: SubsetWord) {
        let bucket = &mut self.buckets[set.len()];
        debug_assert!(bucket.last().is_none_or(|l| *l < set));
        bucket.push(set);
    }

    pub fn contains(&self, set: &SubsetWord) -> bool {
        set.n() == self.n && self.buckets[set.len()].binary_search(set).is_ok()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.iter().all(Vec::is_empty)
    }

    pub fn bucket(&self, layer: usize) -> &[SubsetWord] {
        self.buckets.get(layer).map_or(&[], Vec::as_slice)
    }

    /// Members in (layer, colex) order.
    pub fn iter(&self) -> impl Iterator<Item = &SubsetWord> {
        self.buckets.iter().flatten()
    }

    pub fn to_vec(&self) -> Vec<SubsetWord> {
        self.iter().cloned().collect()
    }

    /// Layers that have at least one member.
    pub fn occupied_layers(&self) -> Vec<usize> {
        (0..=self.n)
            .filter(|&i| !self.buckets[i].is_empty())
            .collect()
    }
}

impl std::fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SetFamily")
            .field("n", &self.n)
            .field(
                "members",
                &self.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// What a violating pair violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Edge(Edge),
    Ratio { p: u64, q: u64 },
    OrderedPattern,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Violation {
        a: SubsetWord,
        b: SubsetWord,
        witness: Witness,
    },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}
