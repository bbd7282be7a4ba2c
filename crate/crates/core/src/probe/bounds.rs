use std::f64::consts::{LN_10, LN_2};

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{binomial, BigCount};
use crate::probe::chain::alpha_ln;

/// A positive real kept in log space, with an optional exact integer value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub ln: f64,
    pub log10: f64,
    /// `value = mantissa * 10^exponent`, `1 <= mantissa < 10`.
    pub mantissa: f64,
    pub exponent: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<BigCount>,
    /// The value is at least the trivial bound for the problem.
    pub vacuous: bool,
}

impl BoundValue {
    fn from_ln(ln: f64, exact: Option<BigCount>, vacuous: bool) -> Self {
        let log10 = ln / LN_10;
        let mut exponent = log10.floor();
        let mut mantissa = 10f64.powf(log10 - exponent);
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exponent += 1.0;
        }
        BoundValue {
            ln,
            log10,
            mantissa,
            exponent: exponent as i64,
            exact,
            vacuous,
        }
    }

    pub fn rendered(&self) -> String {
        format!("{:.6}e{}", self.mantissa, self.exponent)
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// `max{(1 - 1/1600)^t, e^{-l²/(16t)}} · 4^t`, for `0 <= l <= t/3`.
///
/// `vacuous` is set when the value reaches `4^t`, the total number of pairs.
pub fn fr_bound(t: u64, l: u64) -> Result<BoundValue> {
    if t == 0 || 3 * l > t {
        return Err(Error::NotApplicable(format!(
            "need t >= 1 and 0 <= l <= t/3, got t={t} l={l}"
        )));
    }
    let (tf, lf) = (t as f64, l as f64);
    let factor_ln = (tf * (-1.0f64 / 1600.0).ln_1p()).max(-lf * lf / (16.0 * tf));
    Ok(BoundValue::from_ln(
        tf * 4f64.ln() + factor_ln,
        None,
        factor_ln >= 0.0,
    ))
}

/// `fr_bound(t, l) / 4^t`.
pub fn fr_factor(t: u64, l: u64) -> Result<f64> {
    let v = fr_bound(t, l)?;
    Ok((v.ln - t as f64 * 4f64.ln()).exp())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrBrute {
    pub s: u32,
    pub l: u32,
    /// `max |A|·|B|`.
    pub value: u64,
    /// Optimal family `A` as subset masks of `[s]`.
    pub a: Vec<u64>,
    /// The largest `B` compatible with `A`.
    pub b: Vec<u64>,
}

/// Exact maximum of `|A|·|B|` over families `A, B ⊆ P([s])` with
/// `|a ∩ b| ≠ l` for all `a ∈ A`, `b ∈ B`, by trying every `A`.
pub fn fr_brute(s: u32, l: u32) -> Result<FrBrute> {
    if s > 4 {
        return Err(Error::Precondition(format!(
            "fr_brute needs s <= 4, got {s}"
        )));
    }
    let sets = 1usize << s;
    // bad[b]: the a with |a ∩ b| = l, as a mask over the 2^s subsets
    let bad: Vec<u64> = (0..sets)
        .map(|b| {
            (0..sets)
                .filter(|&a| (a & b).count_ones() == l)
                .fold(0u64, |m, a| m | (1 << a))
        })
        .collect();
    let mut best = (0u64, 0u64);
    let all: u64 = if sets == 64 { !0 } else { (1u64 << sets) - 1 };
    let mut fam = 0u64;
    loop {
        let allowed = bad.iter().filter(|&&m| m & fam == 0).count() as u64;
        let value = fam.count_ones() as u64 * allowed;
        if value > best.0 {
            best = (value, fam);
        }
        if fam == all {
            break;
        }
        fam += 1;
    }
    let members = |mask: u64| (0..sets as u64).filter(move |&x| mask >> x & 1 == 1);
    let a: Vec<u64> = members(best.1).collect();
    let b: Vec<u64> = (0..sets as u64)
        .filter(|&x| bad[x as usize] & best.1 == 0)
        .collect();
    Ok(FrBrute {
        s,
        l,
        value: best.0,
        a,
        b,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum BoundSelector {
    /// `(q - p) · C(n, ⌊n/2⌋)`.
    Thm1 { n: u64, p: u64, q: u64 },
    /// `w + 2^200 · 2^n / n^{2/3}`.
    Thm2 { n: u64, w: BigCount },
    /// `100 · α(n) · 2^n / √n`.
    Thm3 { n: u64 },
}

/// Right-hand sides of the three headline bounds. `vacuous` is set when the
/// value is at least `2^n`.
pub fn paper_bounds(selector: &BoundSelector) -> Result<BoundValue> {
    match selector {
        BoundSelector::Thm1 { n, p, q } => {
            if q <= p {
                return Err(Error::Precondition(format!("need q > p, got p={p} q={q}")));
            }
            let value = BigCount(binomial(*n, (*n / 2) as i64).0 * BigUint::from(q - p));
            let vacuous = value.0 >= BigUint::from(1u8) << *n;
            Ok(BoundValue::from_ln(value.ln(), Some(value), vacuous))
        }
        BoundSelector::Thm2 { n, w } => {
            if *n == 0 {
                return Err(Error::Precondition("n must be positive".into()));
            }
            let nf = *n as f64;
            // ln(2^200 / n^{2/3})
            let margin = 200.0 * LN_2 - 2.0 / 3.0 * nf.ln();
            let ln = ln_add(w.ln(), nf * LN_2 + margin);
            let vacuous = margin >= 0.0 || w.ln() >= nf * LN_2 + (-margin.exp()).ln_1p();
            Ok(BoundValue::from_ln(ln, None, vacuous))
        }
        BoundSelector::Thm3 { n } => {
            if *n < 2 {
                return Err(Error::Precondition("n must be at least 2".into()));
            }
            let nf = *n as f64;
            let ln = 100f64.ln() + alpha_ln(nf) + nf * LN_2 - 0.5 * nf.ln();
            Ok(BoundValue::from_ln(ln, None, thm3_vacuous_at(nf.ln())))
        }
    }
}

/// Whether `100 α(n) / √n >= 1`, given `ln n`; usable far beyond `u64`.
pub fn thm3_vacuous_at(ln_n: f64) -> bool {
    100f64.ln() + 120.0 * ln_n.sqrt() - 0.5 * ln_n >= 0.0
}
