use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::Zero;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::SetFamily;
use crate::error::{Error, Result};
use crate::lattice::{binomial, binomial_row, layer_iter, BigCount, SubsetWord};

/// Most sets a constructor will materialize.
pub const MATERIALIZE_CAP: u64 = 1 << 22;

/// Positive rational shift parameter of the counterexample family.
pub type Beta = Ratio<u64>;

/// Parses `"2"`, `"3/2"` or `"0.75"`.
pub fn parse_beta(text: &str) -> Result<Beta> {
    let text = text.trim();
    let bad = || Error::Parse(format!("bad beta {text:?}"));
    let beta = if let Some((num, den)) = text.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den: u64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Ratio::new(num, den)
    } else if let Some((int, frac)) = text.split_once('.') {
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        Ratio::new(int * den + frac, den)
    } else {
        Ratio::from_integer(text.parse().map_err(|_| bad())?)
    };
    if beta.is_zero() {
        return Err(Error::Precondition("beta must be positive".into()));
    }
    Ok(beta)
}

/// `a > n/4 + β√n/2`, i.e. `4a - n > 2β√n`, decided in integers.
fn above_threshold(a: u64, n: u64, beta: Beta) -> bool {
    if 4 * a <= n {
        return false;
    }
    let lhs = (4 * a - n) as u128;
    let (num, den) = (*beta.numer() as u128, *beta.denom() as u128);
    lhs * lhs * den * den > 4 * num * num * n as u128
}

/// Smallest `a <= n/2` with `a > n/4 + β√n/2`, if any.
pub fn counterexample_threshold(n: usize, beta: Beta) -> Option<usize> {
    (0..=n / 2).find(|&a| above_threshold(a as u64, n as u64, beta))
}

fn check_even(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("n must be even, got {n}")));
    }
    Ok(())
}

/// Union of full layers.
pub fn layered_family(n: usize, layers: &[usize]) -> Result<SetFamily> {
    let mut layers = layers.to_vec();
    layers.sort_unstable();
    layers.dedup();
    if let Some(&l) = layers.iter().find(|&&l| l > n) {
        return Err(Error::Precondition(format!("layer {l} above n = {n}")));
    }
    let size: BigCount = layers.iter().map(|&l| binomial(n as u64, l as i64)).sum();
    check_cap(&size)?;
    let mut fam = SetFamily::new(n);
    for l in layers {
        for s in layer_iter(n, l as i64) {
            fam.push_sorted_unchecked(s);
        }
    }
    Ok(fam)
}

fn check_cap(size: &BigCount) -> Result<()> {
    if size.to_u64().is_none_or(|s| s > MATERIALIZE_CAP) {
        return Err(Error::CapExceeded {
            what: format!("family of size {size}"),
            cap: MATERIALIZE_CAP,
        });
    }
    Ok(())
}

/// `{A : |A| <= n/2, |A ∩ [n/2]| > n/4 + β√n/2}` for even `n`.
pub fn counterexample_family(n: usize, beta: Beta) -> Result<SetFamily> {
    check_even(n)?;
    check_cap(&count_counterexample(n, beta)?)?;
    let h = n / 2;
    let mut sets = Vec::new();
    if let Some(a_min) = counterexample_threshold(n, beta) {
        for a in a_min..=h {
            let lefts: Vec<SubsetWord> = layer_iter(h, a as i64).collect();
            for b in 0..=h - a {
                for right in layer_iter(h, b as i64) {
                    for left in &lefts {
                        let mut s = SubsetWord::empty(n);
                        for e in left.elements() {
                            s.insert(e);
                        }
                        for e in right.elements() {
                            s.insert(e + h);
                        }
                        sets.push(s);
                    }
                }
            }
        }
    }
    sets.sort();
    let mut fam = SetFamily::new(n);
    for s in sets {
        fam.push_sorted_unchecked(s);
    }
    Ok(fam)
}

/// Exact size of [`counterexample_family`].
pub fn count_counterexample(n: usize, beta: Beta) -> Result<BigCount> {
    check_even(n)?;
    let h = n / 2;
    let Some(a_min) = counterexample_threshold(n, beta) else {
        return Ok(BigCount::zero());
    };
    let row = binomial_row(h as u64);
    // prefix[m] = sum_{b <= m} binom(h, b)
    let mut prefix = Vec::with_capacity(h + 1);
    let mut acc = BigUint::zero();
    for c in &row {
        acc += &c.0;
        prefix.push(acc.clone());
    }
    let total: BigUint = (a_min..=h).map(|a| &row[a].0 * &prefix[h - a]).sum();
    Ok(BigCount(total))
}

/// Whether `d <= n/2 - β√n`, decided in integers.
pub fn counterexample_pair_bound_holds(n: usize, beta: Beta, d: usize) -> bool {
    if 2 * d > n {
        return false;
    }
    let gap = (n - 2 * d) as u128;
    let (num, den) = (*beta.numer() as u128, *beta.denom() as u128);
    gap * gap * den * den >= 4 * num * num * n as u128
}

/// Uniform member of the counterexample family, `None` if it is empty.
pub fn sample_counterexample_member<R: Rng + ?Sized>(
    n: usize,
    beta: Beta,
    rng: &mut R,
) -> Result<Option<SubsetWord>> {
    check_even(n)?;
    let h = n / 2;
    let Some(a_min) = counterexample_threshold(n, beta) else {
        return Ok(None);
    };
    let ln_row: Vec<f64> = binomial_row(h as u64).iter().map(BigCount::ln).collect();
    let ln_prefix: Vec<f64> = {
        let mut out = Vec::with_capacity(h + 1);
        let mut acc = f64::NEG_INFINITY;
        for &l in &ln_row {
            acc = log_add(acc, l);
            out.push(acc);
        }
        out
    };
    let a_weights: Vec<f64> = (a_min..=h).map(|a| ln_row[a] + ln_prefix[h - a]).collect();
    let a = a_min + sample_log_weights(&a_weights, rng);
    let b_weights: Vec<f64> = ln_row[..=h - a].to_vec();
    let b = sample_log_weights(&b_weights, rng);

    let mut s = SubsetWord::empty(n);
    for e in rand::seq::index::sample(rng, h, a) {
        s.insert(e + 1);
    }
    for e in rand::seq::index::sample(rng, h, b) {
        s.insert(h + e + 1);
    }
    Ok(Some(s))
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn sample_log_weights<R: Rng + ?Sized>(ln_weights: &[f64], rng: &mut R) -> usize {
    let max = ln_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = ln_weights.iter().map(|l| (l - max).exp()).collect();
    WeightedIndex::new(&w)
        .expect("positive weights")
        .sample(rng)
}
