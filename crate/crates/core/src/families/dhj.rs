//! Base-8 view of `P[3m]` and combinatorial line search.
//!
//! A set `x ⊆ [3m]` maps to the word `y` with `y_i = x_i + 2x_{i+m} + 4x_{i+2m}`.
//! On any combinatorial line over `{0..7}^m`, the points with wildcard value
//! 1 and 6 decode to an ordered-tilted forbidden pair.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::SubsetWord;
use crate::restrictions::PairCondition;

/// Largest template space the line finder will scan.
pub const TEMPLATE_CAP: u64 = 50_000_000;

pub type Word = Vec<u8>;

pub fn dhj_encode(x: &SubsetWord) -> Result<Word> {
    let n = x.n();
    if !n.is_multiple_of(3) {
        return Err(Error::Precondition(format!(
            "ground size {n} not divisible by 3"
        )));
    }
    let m = n / 3;
    Ok((1..=m)
        .map(|i| {
            x.contains(i) as u8
                | (x.contains(i + m) as u8) << 1
                | (x.contains(i + 2 * m) as u8) << 2
        })
        .collect())
}

pub fn dhj_decode(word: &[u8]) -> Result<SubsetWord> {
    let m = word.len();
    let mut x = SubsetWord::empty(3 * m);
    for (idx, &d) in word.iter().enumerate() {
        if d > 7 {
            return Err(Error::Precondition(format!("digit {d} outside 0..=7")));
        }
        let i = idx + 1;
        for (bit, offset) in [(1, 0), (2, m), (4, 2 * m)] {
            if d & bit != 0 {
                x.insert(i + offset);
            }
        }
    }
    Ok(x)
}

/// A line template over `{0..k-1}^m`: `None` cells are active (wildcard).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineTemplate {
    pub k: u8,
    pub cells: Vec<Option<u8>>,
}

impl LineTemplate {
    pub fn new(k: u8, cells: Vec<Option<u8>>) -> Result<Self> {
        if cells.iter().all(Option::is_some) {
            return Err(Error::Precondition(
                "line needs a nonempty active set".into(),
            ));
        }
        if let Some(d) = cells.iter().flatten().find(|&&d| d >= k) {
            return Err(Error::Precondition(format!(
                "fixed digit {d} outside 0..{k}"
            )));
        }
        Ok(LineTemplate { k, cells })
    }

    /// Parses `"*3"`-style templates: digits fix a coordinate, `*` is active.
    pub fn parse(k: u8, text: &str) -> Result<Self> {
        let cells = text
            .chars()
            .map(|c| match c {
                '*' => Ok(None),
                d if d.is_ascii_digit() => Ok(Some(d as u8 - b'0')),
                other => Err(Error::Parse(format!("bad template symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, cells)
    }

    pub fn m(&self) -> usize {
        self.cells.len()
    }

    /// 1-based active coordinates.
    pub fn active(&self) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// `L_value`: the point with every active coordinate set to `value`.
    pub fn point(&self, value: u8) -> Word {
        self.cells.iter().map(|c| c.unwrap_or(value)).collect()
    }

    pub fn points(&self) -> Vec<Word> {
        (0..self.k).map(|v| self.point(v)).collect()
    }
}

impl fmt::Display for LineTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            match c {
                Some(d) => write!(f, "{d}")?,
                None => f.write_str("*")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LineTemplate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// First template (symbols ordered `0 < 1 < ... < k-1 < *`, leftmost
/// coordinate most significant) whose `k` points all lie in `words`.
pub fn find_combinatorial_line(
    words: &HashSet<Word>,
    k: u8,
    m: usize,
) -> Result<Option<LineTemplate>> {
    if k == 0 {
        return Err(Error::Precondition("alphabet size must be positive".into()));
    }
    let radix = k as u64 + 1;
    let total = radix
        .checked_pow(m as u32)
        .filter(|&t| t <= TEMPLATE_CAP)
        .ok_or_else(|| Error::CapExceeded {
            what: format!("template space ({radix})^{m}"),
            cap: TEMPLATE_CAP,
        })?;
    let mut digits = vec![0u8; m];
    let mut point = vec![0u8; m];
    for code in 0..total {
        // leftmost coordinate is most significant
        let mut c = code;
        for slot in digits.iter_mut().rev() {
            *slot = (c % radix) as u8;
            c /= radix;
        }
        if !digits.contains(&k) {
            continue;
        }
        let hit = (0..k).all(|v| {
            for (p, &d) in point.iter_mut().zip(&digits) {
                *p = if d == k { v } else { d };
            }
            words.contains(&point)
        });
        if hit {
            let cells = digits.iter().map(|&d| (d != k).then_some(d)).collect();
            return Ok(Some(LineTemplate { k, cells }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForbiddenPair {
    pub a: SubsetWord,
    pub b: SubsetWord,
    pub check: bool,
}

/// Decodes `L_1` and `L_6` of an 8-letter line and checks they form an
/// ordered-tilted forbidden pair.
pub fn dhj_forbidden_pair(line: &LineTemplate) -> Result<ForbiddenPair> {
    if line.k != 8 {
        return Err(Error::Precondition(format!(
            "line must be over k = 8, got {}",
            line.k
        )));
    }
    let a = dhj_decode(&line.point(1))?;
    let b = dhj_decode(&line.point(6))?;
    let check = PairCondition::OrderedTilted.violates(&a, &b)?;
    Ok(ForbiddenPair { a, b, check })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_words(k: u8, m: usize) -> Vec<Word> {
        let mut out = vec![vec![]];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..k).map(move |d| {
                        let mut w = w.clone();
                        w.push(d);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn encode_examples() {
        assert_eq!(
            dhj_encode(&SubsetWord::parse(3, "1,3").unwrap()).unwrap(),
            vec![5]
        );
        assert_eq!(dhj_encode(&SubsetWord::empty(3)).unwrap(), vec![0]);
        assert!(dhj_encode(&SubsetWord::empty(4)).is_err());
        assert!(dhj_decode(&[8]).is_err());
    }

    #[test]
    fn encode_is_bijective_small() {
        for m in 1..=3 {
            let n = 3 * m;
            let mut seen = HashSet::new();
            for mask in 0u64..1 << n {
                let x = SubsetWord::from_mask(n, mask);
                let w = dhj_encode(&x).unwrap();
                assert_eq!(dhj_decode(&w).unwrap(), x);
                assert!(seen.insert(w));
            }
        }
    }

    #[test]
    fn line_examples() {
        let full: HashSet<Word> = all_words(8, 1).into_iter().collect();
        let line = find_combinatorial_line(&full, 8, 1).unwrap().unwrap();
        assert_eq!(line.active(), vec![1]);

        let mut missing = full.clone();
        missing.remove(&vec![4]);
        assert_eq!(find_combinatorial_line(&missing, 8, 1).unwrap(), None);

        let planted: HashSet<Word> = (0..8).map(|d| vec![d, 3]).collect();
        let line = find_combinatorial_line(&planted, 8, 2).unwrap().unwrap();
        assert_eq!(line.active(), vec![1]);
        assert_eq!(line.cells[1], Some(3));
        assert_eq!(line.to_string(), "*3");
    }

    #[test]
    fn scan_order_is_lexicographic() {
        let full: HashSet<Word> = all_words(3, 2).into_iter().collect();
        let line = find_combinatorial_line(&full, 3, 2).unwrap().unwrap();
        assert_eq!(line.to_string(), "0*");
    }

    #[test]
    fn template_cap() {
        assert!(find_combinatorial_line(&HashSet::new(), 8, 12).is_err());
    }

    #[test]
    fn forbidden_pair_examples() {
        let line = LineTemplate::parse(8, "*").unwrap();
        let pair = dhj_forbidden_pair(&line).unwrap();
        assert_eq!(pair.a.to_string(), "1");
        assert_eq!(pair.b.to_string(), "2,3");
        assert!(pair.check);

        let line = LineTemplate::parse(8, "0*").unwrap();
        let pair = dhj_forbidden_pair(&line).unwrap();
        assert_eq!(
            (pair.a.to_string(), pair.b.to_string()),
            ("2".into(), "4,6".into())
        );
        assert!(pair.check);
        assert!(dhj_forbidden_pair(&LineTemplate::parse(3, "*").unwrap()).is_err());
        assert!(LineTemplate::parse(8, "12").is_err());
    }

    #[test]
    fn every_line_gives_a_forbidden_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let m = rng.random_range(1..=5);
            let mut cells: Vec<Option<u8>> = (0..m)
                .map(|_| {
                    if rng.random_bool(0.4) {
                        None
                    } else {
                        Some(rng.random_range(0..8))
                    }
                })
                .collect();
            let forced = rng.random_range(0..m);
            cells[forced] = None;
            let line = LineTemplate::new(8, cells).unwrap();
            assert!(dhj_forbidden_pair(&line).unwrap().check, "{line}");
        }
    }
}
