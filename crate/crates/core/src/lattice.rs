//! Subsets of `[n] = {1, ..., n}` as packed bit vectors, layer enumeration in
//! colex order, and exact binomial counts.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A subset of the ground set `[n]`, elements labelled `1..=n`.
///
/// Element `e` lives at bit `e - 1`. Bits above `n` are always clear, so
/// equality and hashing are extensional.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetWord {
    n: usize,
    words: Vec<u64>,
}

impl SubsetWord {
    pub fn empty(n: usize) -> Self {
        SubsetWord {
            n,
            words: vec![0; n.div_ceil(WORD)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for (w, word) in s.words.iter_mut().enumerate() {
            let hi = ((w + 1) * WORD).min(n);
            let bits = hi - w * WORD;
            *word = if bits == WORD { !0 } else { (1u64 << bits) - 1 };
        }
        s
    }

    /// Builds a set from 1-based element labels.
    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elements: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for e in elements {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            s.insert(e);
        }
        Ok(s)
    }

    /// Interprets the low `n` bits of `mask` as a subset (`bit i` is element `i + 1`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut s = Self::empty(n);
        if n > 0 {
            let keep = if n >= WORD { !0 } else { (1u64 << n) - 1 };
            s.words[0] = mask & keep;
        }
        s
    }

    /// Low 64 bits of the membership vector. Only meaningful for `n <= 64`.
    pub fn to_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        e >= 1 && e <= self.n && (self.words[(e - 1) / WORD] >> ((e - 1) % WORD)) & 1 == 1
    }

    /// Panics if `e` is not in `1..=n`.
    #[inline]
    pub fn insert(&mut self, e: usize) {
        assert!(e >= 1 && e <= self.n, "element {e} outside [1, {}]", self.n);
        self.words[(e - 1) / WORD] |= 1u64 << ((e - 1) % WORD);
    }

    #[inline]
    pub fn remove(&mut self, e: usize) {
        if e >= 1 && e <= self.n {
            self.words[(e - 1) / WORD] &= !(1u64 << ((e - 1) % WORD));
        }
    }

    /// Cardinality.
    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Ascending element labels.
    pub fn elements(&self) -> Elements<'_> {
        Elements {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn min_element(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize + 1)
    }

    pub fn max_element(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize) + 1)
    }

    /// Number of members in the closed interval `[lo, hi]` of labels.
    pub fn count_in_range(&self, lo: usize, hi: usize) -> usize {
        let lo = lo.max(1);
        let hi = hi.min(self.n);
        if lo > hi {
            return 0;
        }
        let (a, b) = (lo - 1, hi); // bit range [a, b)
        let (wa, wb) = (a / WORD, (b - 1) / WORD);
        let mut total = 0;
        for w in wa..=wb {
            let mut word = self.words[w];
            if w == wa {
                word &= !0u64 << (a % WORD);
            }
            if w == wb && b % WORD != 0 {
                word &= (1u64 << (b % WORD)) - 1;
            }
            total += word.count_ones() as usize;
        }
        total
    }

    fn check_same_ground(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GroundSetMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn intersection_size(&self, other: &Self) -> Result<usize> {
        self.check_same_ground(other)?;
        Ok(zip_count(&self.words, &other.words, |a, b| a & b))
    }

    pub fn symmetric_difference_size(&self, other: &Self) -> Result<usize> {
        self.check_same_ground(other)?;
        Ok(zip_count(&self.words, &other.words, |a, b| a ^ b))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a & b)
    }

    /// `self \ other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.check_same_ground(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        self.check_same_ground(other)?;
        Ok(SubsetWord {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Parses the comma-separated form `"1,3,5"`; the empty string is `∅`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::empty(n));
        }
        let mut s = Self::empty(n);
        let mut prev = 0;
        for tok in text.split(',') {
            let tok = tok.trim();
            let e: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad element {tok:?}")))?;
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            if e <= prev {
                return Err(Error::Parse(format!(
                    "elements must be strictly ascending: {text:?}"
                )));
            }
            prev = e;
            s.insert(e);
        }
        Ok(s)
    }
}

#[inline]
fn zip_count(a: &[u64], b: &[u64], f: impl Fn(u64, u64) -> u64) -> usize {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| f(x, y).count_ones() as usize)
        .sum()
}

pub struct Elements<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Elements<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + tz + 1);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// Colex order: the set whose symmetric difference maximum lies in it is larger.
/// Sets on different ground sets are ordered by `n` first.
impl Ord for SubsetWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words).rev() {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for SubsetWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsetWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.elements() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl Serialize for SubsetWord {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Debug for SubsetWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}/{}", self.n)
    }
}

/// `|A \ B|`.
pub fn diff_size(a: &SubsetWord, b: &SubsetWord) -> Result<usize> {
    a.check_same_ground(b)?;
    Ok(zip_count(&a.words, &b.words, |x, y| x & !y))
}

/// `|A △ B| = 2`.
pub fn is_neighbor(a: &SubsetWord, b: &SubsetWord) -> Result<bool> {
    Ok(a.symmetric_difference_size(b)? == 2)
}

/// Exact non-negative integer, used for binomials and sums of binomials.
/// Serialized as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(pub BigUint);

impl Serialize for BigCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<BigUint>()
            .map(BigCount)
            .map_err(|_| serde::de::Error::custom(format!("not a non-negative integer: {text:?}")))
    }
}

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn from_u64(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        num_traits::ToPrimitive::to_u64(&self.0)
    }

    /// Natural log, exact to f64 precision even when the value overflows f64.
    pub fn ln(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.0.bits();
        if bits <= 1000 {
            return num_traits::ToPrimitive::to_f64(&self.0).unwrap().ln();
        }
        let shift = bits - 64;
        let top = num_traits::ToPrimitive::to_f64(&(&self.0 >> shift)).unwrap();
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }

    pub fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.0).unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::ops::Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl std::iter::Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> BigCount {
        BigCount(iter.map(|c| c.0).sum())
    }
}

/// Exact `binom(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> BigCount {
    if k < 0 || k as u64 > n {
        return BigCount::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    // acc * (n - i) is always divisible by (i + 1) after the multiply.
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    BigCount(acc)
}

/// Row `n` of Pascal's triangle, exact.
pub fn binomial_row(n: u64) -> Vec<BigCount> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut acc = BigUint::one();
    row.push(BigCount(acc.clone()));
    for i in 0..n {
        acc *= n - i;
        acc /= i + 1;
        row.push(BigCount(acc.clone()));
    }
    row
}

/// `ln binom(n, k)` via a short product; `-inf` outside the support.
pub fn ln_binomial(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return f64::NEG_INFINITY;
    }
    let k = (k as u64).min(n - k as u64);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// All `k`-subsets of `[n]` in colex order.
pub fn layer_iter(n: usize, k: i64) -> LayerIter {
    if k < 0 || k as usize > n {
        return LayerIter {
            n,
            combo: Vec::new(),
            done: true,
        };
    }
    LayerIter {
        n,
        combo: (0..k as usize).collect(),
        done: false,
    }
}

/// Colex enumeration over 0-based index combinations.
pub struct LayerIter {
    n: usize,
    combo: Vec<usize>,
    done: bool,
}

impl Iterator for LayerIter {
    type Item = SubsetWord;

    fn next(&mut self) -> Option<SubsetWord> {
        if self.done {
            return None;
        }
        let mut out = SubsetWord::empty(self.n);
        for &c in &self.combo {
            out.insert(c + 1);
        }
        // advance: bump the lowest position that can move, reset those below it
        let k = self.combo.len();
        let mut i = 0;
        loop {
            if i == k {
                self.done = true;
                break;
            }
            let limit = if i + 1 < k { self.combo[i + 1] } else { self.n };
            if self.combo[i] + 1 < limit {
                self.combo[i] += 1;
                for (j, c) in self.combo.iter_mut().enumerate().take(i) {
                    *c = j;
                }
                break;
            }
            i += 1;
        }
        Some(out)
    }
}

/// Every subset of `[n]` ordered by (layer, colex). Intended for `n <= 30`.
pub fn power_set(n: usize) -> impl Iterator<Item = SubsetWord> {
    (0..=n as i64).flat_map(move |k| layer_iter(n, k))
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_pair() -> impl Strategy<Value = (SubsetWord, SubsetWord)> {
        (1usize..150).prop_flat_map(|n| {
            let v = proptest::collection::vec(any::<bool>(), n);
            (v.clone(), v).prop_map(move |(a, b)| {
                let mk = |bits: Vec<bool>| {
                    SubsetWord::from_elements(
                        n,
                        bits.iter()
                            .enumerate()
                            .filter(|(_, &x)| x)
                            .map(|(i, _)| i + 1),
                    )
                    .unwrap()
                };
                (mk(a), mk(b))
            })
        })
    }

    proptest! {
        #[test]
        fn diff_plus_intersection_is_size((a, b) in arb_pair()) {
            prop_assert_eq!(diff_size(&a, &b).unwrap() + a.intersection_size(&b).unwrap(), a.len());
        }

        #[test]
        fn layer_difference_identity((a, b) in arb_pair()) {
            let d = diff_size(&a, &b).unwrap() as i64 - diff_size(&b, &a).unwrap() as i64;
            prop_assert_eq!(d, a.len() as i64 - b.len() as i64);
        }

        #[test]
        fn neighbor_iff_single_swap((a, b) in arb_pair()) {
            if a.len() == b.len() {
                prop_assert_eq!(is_neighbor(&a, &b).unwrap(), diff_size(&a, &b).unwrap() == 1);
            }
        }

        #[test]
        fn display_parse_roundtrip((a, _b) in arb_pair()) {
            let back = SubsetWord::parse(a.n(), &a.to_string()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
