//! Pairwise layer restrictions `(G, x)` and the named pair conditions.
//!
//! An edge `(i, j, x)` with `i < j` forbids a layer-`i` set `A` and a layer-`j`
//! set `B` with `|A \ B| = x`. Same-layer pairs cannot be restricted.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{diff_size, SubsetWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub x: usize,
}

impl Edge {
    pub fn new(i: usize, j: usize, x: usize) -> Self {
        Edge { i, j, x }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},x={})", self.i, self.j, self.x)
    }
}

/// The layer graph on `{0, ..., n}` with a forbidden difference size per edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionSystem {
    pub n: usize,
    pub edges: Vec<Edge>,
}

/// Why a system failed validation; names the first offending edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemViolation {
    NotIncreasing(Edge),
    LayerOutOfRange(Edge),
    Vacuous { edge: Edge, max: usize },
    Duplicate(Edge),
}

impl fmt::Display for SystemViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemViolation::NotIncreasing(e) => write!(f, "edge {e}: requires i < j"),
            SystemViolation::LayerOutOfRange(e) => write!(f, "edge {e}: layer index above n"),
            SystemViolation::Vacuous { edge, max } => {
                write!(f, "edge {edge}: x > min(i, n-j) = {max}")
            }
            SystemViolation::Duplicate(e) => {
                write!(f, "edge {e}: duplicate layer pair ({},{})", e.i, e.j)
            }
        }
    }
}

impl RestrictionSystem {
    pub fn new(n: usize, edges: Vec<Edge>) -> Self {
        RestrictionSystem { n, edges }
    }

    pub fn empty(n: usize) -> Self {
        RestrictionSystem {
            n,
            edges: Vec::new(),
        }
    }

    /// Constructs and validates.
    pub fn checked(n: usize, edges: Vec<Edge>) -> Result<Self> {
        let sys = RestrictionSystem { n, edges };
        sys.validate()
            .map_err(|v| Error::InvalidSystem(v.to_string()))?;
        Ok(sys)
    }

    pub fn validate(&self) -> std::result::Result<(), SystemViolation> {
        validate_system(self)
    }

    /// Same edges in ascending `(i, j)` order.
    pub fn canonical(&self) -> Self {
        let mut edges = self.edges.clone();
        edges.sort();
        RestrictionSystem { n: self.n, edges }
    }

    pub fn table(&self) -> LayerTable {
        LayerTable::new(self)
    }

    /// True when no edge has both endpoints in `layers`.
    pub fn is_independent(&self, layers: &[usize]) -> bool {
        let mut member = vec![false; self.n + 1];
        for &l in layers {
            if l <= self.n {
                member[l] = true;
            }
        }
        !self
            .edges
            .iter()
            .any(|e| e.j <= self.n && member[e.i] && member[e.j])
    }

    pub fn to_json(&self) -> String {
        serialize_system(self)
    }
}

/// Constant-time lookup of the forbidden value for a layer pair.
#[derive(Clone, Debug)]
pub struct LayerTable {
    map: HashMap<(usize, usize), usize>,
}

impl LayerTable {
    fn new(sys: &RestrictionSystem) -> Self {
        LayerTable {
            map: sys.edges.iter().map(|e| ((e.i, e.j), e.x)).collect(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.map.get(&(i, j)).copied()
    }
}

pub fn validate_system(sys: &RestrictionSystem) -> std::result::Result<(), SystemViolation> {
    let mut seen = std::collections::HashSet::new();
    for &e in &sys.edges {
        if e.i >= e.j {
            return Err(SystemViolation::NotIncreasing(e));
        }
        if e.j > sys.n {
            return Err(SystemViolation::LayerOutOfRange(e));
        }
        let max = e.i.min(sys.n - e.j);
        if e.x > max {
            return Err(SystemViolation::Vacuous { edge: e, max });
        }
        if !seen.insert((e.i, e.j)) {
            return Err(SystemViolation::Duplicate(e));
        }
    }
    Ok(())
}

/// The complete layer graph with all `x = 0`: ordinary Sperner families.
pub fn sperner_system(n: usize) -> RestrictionSystem {
    let edges = (0..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| Edge::new(i, j, 0)))
        .collect();
    RestrictionSystem { n, edges }
}

/// Restrictions equivalent to forbidding `q|A \ B| = p|B \ A|`.
///
/// For `|A| = i < j = |B|` we have `|B \ A| = |A \ B| + (j - i)`, so the
/// equation pins `|A \ B| = p(j - i)/(q - p)`. Pairs with `|A| >= |B|` can
/// never satisfy it when `q > p`.
pub fn tilted_system(n: usize, p: u64, q: u64) -> Result<RestrictionSystem> {
    check_ratio(p, q)?;
    let gap = q - p;
    let mut edges = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            let num = p * (j - i) as u64;
            if !num.is_multiple_of(gap) {
                continue;
            }
            let x = (num / gap) as usize;
            if x <= i.min(n - j) {
                edges.push(Edge::new(i, j, x));
            }
        }
    }
    Ok(RestrictionSystem { n, edges })
}

pub(crate) fn check_ratio(p: u64, q: u64) -> Result<()> {
    if p == q {
        return Err(Error::InvalidCondition(format!(
            "tilted ratio p = q = {p} forbids same-layer pairs and has no layer-restriction form"
        )));
    }
    if q < p {
        return Err(Error::InvalidCondition(format!(
            "tilted ratio needs q > p, got p={p} q={q}"
        )));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::InvalidCondition(format!(
            "tilted ratio needs gcd(p,q) = 1, got p={p} q={q}"
        )));
    }
    Ok(())
}

pub fn serialize_system(sys: &RestrictionSystem) -> String {
    serde_json::to_string(&sys.canonical()).expect("system serializes")
}

pub fn parse_system(text: &str) -> Result<RestrictionSystem> {
    let sys: RestrictionSystem = serde_json::from_str(text)?;
    sys.validate()
        .map_err(|v| Error::InvalidSystem(v.to_string()))?;
    Ok(sys)
}

/// A forbidden-pair condition on families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairCondition {
    Gx(RestrictionSystem),
    /// No distinct `A, B` with `q|A \ B| = p|B \ A|`.
    Tilted {
        p: u64,
        q: u64,
    },
    /// No `A, B` with `|B \ A| = 2|A \ B| >= 2` and `A \ B` entirely below `B \ A`.
    OrderedTilted,
}

impl PairCondition {
    pub fn tilted(p: u64, q: u64) -> Result<Self> {
        check_ratio(p, q)?;
        Ok(PairCondition::Tilted { p, q })
    }

    /// Parses the built-in shorthands: `sperner`, `empty`, `tilted:p:q`, `ordered-tilted`.
    pub fn from_shorthand(text: &str, n: usize) -> Result<Self> {
        match text {
            "sperner" => Ok(PairCondition::Gx(sperner_system(n))),
            "empty" | "none" => Ok(PairCondition::Gx(RestrictionSystem::empty(n))),
            "ordered-tilted" => Ok(PairCondition::OrderedTilted),
            _ => {
                let parts: Vec<&str> = text.split(':').collect();
                match parts.as_slice() {
                    ["tilted", p, q] => {
                        let p = p
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad p in {text:?}")))?;
                        let q = q
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad q in {text:?}")))?;
                        PairCondition::tilted(p, q)
                    }
                    _ => Err(Error::InvalidCondition(format!(
                        "unknown condition {text:?}"
                    ))),
                }
            }
        }
    }

    /// Label used in reports.
    pub fn label(&self) -> String {
        match self {
            PairCondition::Gx(sys) if *sys == sperner_system(sys.n) => "sperner".into(),
            PairCondition::Gx(sys) => format!("system[{} edges]", sys.edges.len()),
            PairCondition::Tilted { p, q } => format!("tilted:{p}:{q}"),
            PairCondition::OrderedTilted => "ordered-tilted".into(),
        }
    }

    /// Ground-set size the condition is tied to, if any.
    pub fn ground(&self) -> Option<usize> {
        match self {
            PairCondition::Gx(sys) => Some(sys.n),
            _ => None,
        }
    }

    /// Whether the ordered pair `(a, b)` is forbidden. `a == b` never is.
    pub fn violates(&self, a: &SubsetWord, b: &SubsetWord) -> Result<bool> {
        if a.n() != b.n() {
            return Err(Error::GroundSetMismatch {
                left: a.n(),
                right: b.n(),
            });
        }
        if a == b {
            return Ok(false);
        }
        Ok(match self {
            PairCondition::Gx(sys) => {
                let (i, j) = (a.len(), b.len());
                i < j
                    && sys
                        .edges
                        .iter()
                        .any(|e| e.i == i && e.j == j && diff_size(a, b).unwrap() == e.x)
            }
            PairCondition::Tilted { p, q } => {
                q * diff_size(a, b)? as u64 == p * diff_size(b, a)? as u64
            }
            PairCondition::OrderedTilted => {
                let ab = a.difference(b)?;
                let ba = b.difference(a)?;
                let d = ab.len();
                d >= 1 && ba.len() == 2 * d && ab.max_element().unwrap() < ba.min_element().unwrap()
            }
        })
    }

    /// Precomputes whatever the mask predicate needs for ground size `n <= 64`.
    pub fn compile(&self, n: usize) -> Result<CompiledCondition> {
        if n > 64 {
            return Err(Error::CapExceeded {
                what: format!("mask predicate ground size {n}"),
                cap: 64,
            });
        }
        if let Some(m) = self.ground() {
            if m != n {
                return Err(Error::GroundSetMismatch { left: m, right: n });
            }
        }
        let kind = match self {
            PairCondition::Gx(sys) => {
                let mut table = vec![u8::MAX; (n + 1) * (n + 1)];
                for e in &sys.edges {
                    table[e.i * (n + 1) + e.j] = e.x as u8;
                }
                Compiled::Table(table)
            }
            PairCondition::Tilted { p, q } => Compiled::Ratio(*p, *q),
            PairCondition::OrderedTilted => Compiled::Ordered,
        };
        Ok(CompiledCondition { n, kind })
    }
}

impl fmt::Display for PairCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Mask-level pair predicate for `n <= 64`.
#[derive(Clone, Debug)]
pub struct CompiledCondition {
    n: usize,
    kind: Compiled,
}

#[derive(Clone, Debug)]
enum Compiled {
    Table(Vec<u8>),
    Ratio(u64, u64),
    Ordered,
}

impl CompiledCondition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ordered-pair predicate on bitmasks (bit `e - 1` is element `e`).
    #[inline]
    pub fn violates(&self, a: u64, b: u64) -> bool {
        if a == b {
            return false;
        }
        let ab = a & !b;
        let ba = b & !a;
        match &self.kind {
            Compiled::Table(table) => {
                let (i, j) = (a.count_ones() as usize, b.count_ones() as usize);
                i < j && {
                    let x = table[i * (self.n + 1) + j];
                    x != u8::MAX && ab.count_ones() == x as u32
                }
            }
            Compiled::Ratio(p, q) => q * ab.count_ones() as u64 == p * ba.count_ones() as u64,
            Compiled::Ordered => {
                let d = ab.count_ones();
                d >= 1
                    && ba.count_ones() == 2 * d
                    && (63 - ab.leading_zeros()) < ba.trailing_zeros()
            }
        }
    }

    /// Either orientation.
    #[inline]
    pub fn conflicts(&self, a: u64, b: u64) -> bool {
        self.violates(a, b) || self.violates(b, a)
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_system() -> impl Strategy<Value = RestrictionSystem> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec((0..=n, 0..=n, 0..=n), 0..12).prop_map(move |raw| {
                let mut seen = std::collections::HashSet::new();
                let edges = raw
                    .into_iter()
                    .filter_map(|(a, b, x)| {
                        let (i, j) = (a.min(b), a.max(b));
                        (i < j && seen.insert((i, j))).then(|| Edge::new(i, j, x.min(i.min(n - j))))
                    })
                    .collect();
                RestrictionSystem::new(n, edges)
            })
        })
    }

    proptest! {
        #[test]
        fn json_roundtrip(sys in arb_system()) {
            let text = serialize_system(&sys);
            let back = parse_system(&text).unwrap();
            prop_assert_eq!(&back, &sys.canonical());
            prop_assert_eq!(serialize_system(&back), text);
        }
    }
}
