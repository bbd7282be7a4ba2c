use super::{SetFamily, Verdict, Witness};
use crate::error::{Error, Result};
use crate::lattice::{diff_size, SubsetWord};
use crate::par::Exec;
use crate::restrictions::{check_ratio, PairCondition, RestrictionSystem};

pub fn verify(family: &SetFamily, cond: &PairCondition) -> Result<Verdict> {
    match cond {
        PairCondition::Gx(sys) => verify_gx(family, sys),
        PairCondition::Tilted { p, q } => verify_tilted(family, *p, *q),
        PairCondition::OrderedTilted => verify_ordered_tilted(family),
    }
}

/// Checks every edge `(i, j, x)` against all `A` in layer `i`, `B` in layer `j`.
/// The reported pair is the first in (edge, colex `A`, colex `B`) order.
pub fn verify_gx(family: &SetFamily, sys: &RestrictionSystem) -> Result<Verdict> {
    verify_gx_with(family, sys, Exec::default())
}

pub fn verify_gx_with(family: &SetFamily, sys: &RestrictionSystem, exec: Exec) -> Result<Verdict> {
    if family.n() != sys.n {
        return Err(Error::GroundSetMismatch {
            left: family.n(),
            right: sys.n,
        });
    }
    sys.validate()
        .map_err(|v| Error::InvalidSystem(v.to_string()))?;
    for edge in sys.canonical().edges {
        let lower = family.bucket(edge.i);
        let upper = family.bucket(edge.j);
        if lower.is_empty() || upper.is_empty() {
            continue;
        }
        let hit = exec.find_first(lower.len(), |ai| {
            let a = &lower[ai];
            upper
                .iter()
                .find(|b| diff_size(a, b).unwrap() == edge.x)
                .map(|b| (a.clone(), b.clone()))
        });
        if let Some((a, b)) = hit {
            return Ok(Verdict::Violation {
                a,
                b,
                witness: Witness::Edge(edge),
            });
        }
    }
    Ok(Verdict::Pass)
}

/// No ordered pair of distinct members with `q|A \ B| = p|B \ A|`.
pub fn verify_tilted(family: &SetFamily, p: u64, q: u64) -> Result<Verdict> {
    verify_tilted_with(family, p, q, Exec::default())
}

pub fn verify_tilted_with(family: &SetFamily, p: u64, q: u64, exec: Exec) -> Result<Verdict> {
    check_ratio(p, q)?;
    Ok(scan_pairs(family, exec, Witness::Ratio { p, q }, |a, b| {
        q * diff_size(a, b).unwrap() as u64 == p * diff_size(b, a).unwrap() as u64
    }))
}

/// No `A, B` with `|B \ A| = 2|A \ B| >= 2` and every element of `A \ B`
/// below every element of `B \ A`.
pub fn verify_ordered_tilted(family: &SetFamily) -> Result<Verdict> {
    Ok(scan_pairs(
        family,
        Exec::default(),
        Witness::OrderedPattern,
        |a, b| {
            // |B| - |A| = |B\A| - |A\B| must equal d >= 1
            b.len() > a.len() && PairCondition::OrderedTilted.violates(a, b).unwrap()
        },
    ))
}

/// First violating ordered pair of distinct members in (layer, colex) order.
fn scan_pairs<F>(family: &SetFamily, exec: Exec, witness: Witness, bad: F) -> Verdict
where
    F: Fn(&SubsetWord, &SubsetWord) -> bool + Sync + Send,
{
    let members = family.to_vec();
    let hit = exec.find_first(members.len(), |ai| {
        let a = &members[ai];
        members
            .iter()
            .enumerate()
            .find(|&(bi, b)| bi != ai && bad(a, b))
            .map(|(_, b)| (a.clone(), b.clone()))
    });
    match hit {
        Some((a, b)) => Verdict::Violation { a, b, witness },
        None => Verdict::Pass,
    }
}
