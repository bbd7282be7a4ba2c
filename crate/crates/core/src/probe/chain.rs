//! The randomized chain process over `[n] = [n/3] ∪ [n/3+1, n]`.
//!
//! A draw picks an ordered `K`-tuple `U` from the left part, an ordered
//! `2K`-tuple `V` from the right part, and Bernoulli subsets `S1`, `S2` of
//! what remains on each side. For `k = 0..=K`
//!
//! ```text
//! C_k = (U \ {u_1..u_k}) ∪ S1 ∪ {v_{2K-2k+1}..v_{2K}} ∪ S2
//! ```
//!
//! so for `k < l`, `C_k \ C_l = {u_{k+1}..u_l}` lies entirely below
//! `C_l \ C_k`, which is twice as large: every pair of chain members is an
//! ordered-tilted forbidden pair.
//!
//! Logarithms are natural throughout.

use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{ln_binomial, SubsetWord};
use crate::par::Exec;

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `ln α(n) = 120 √(ln n)`.
pub fn alpha_ln(n: f64) -> f64 {
    120.0 * n.ln().sqrt()
}

/// Zone `[n]_{i,j}` of sets whose left/right excess lies in the `(i, j)` window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ZoneIndex {
    pub n: usize,
    pub i: i64,
    pub j: i64,
}

impl ZoneIndex {
    pub fn new(n: usize, i: i64, j: i64) -> Result<Self> {
        check_n(n)?;
        let bound = Self::max_index(n);
        if i.abs() > bound || j.abs() > bound {
            return Err(Error::Precondition(format!(
                "zone index ({i},{j}) outside |i|,|j| <= {bound} for n = {n}"
            )));
        }
        Ok(ZoneIndex { n, i, j })
    }

    /// `⌊√(ln n)/2⌋`.
    pub fn max_index(n: usize) -> i64 {
        ((n as f64).ln().sqrt() / 2.0).floor() as i64
    }

    /// `L = ⌊√n⌋`.
    pub fn width(&self) -> i64 {
        isqrt(self.n) as i64
    }

    /// Inclusive window `[2iL - L, 2iL + L - 1]` for `r` (left) and `s` (right).
    pub fn windows(&self) -> ((i64, i64), (i64, i64)) {
        let l = self.width();
        let w = |c: i64| (2 * c * l - l, 2 * c * l + l - 1);
        (w(self.i), w(self.j))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(6) {
        return Err(Error::Precondition(format!(
            "n = {n} must be a positive multiple of 6"
        )));
    }
    Ok(())
}

/// `(r_D, s_D) = (|D ∩ [n/3]| - n/6, |D ∩ [n/3+1, n]| - n/3)`.
pub fn zone_of(d: &SubsetWord, n: usize) -> Result<(i64, i64)> {
    check_n(n)?;
    if d.n() != n {
        return Err(Error::GroundSetMismatch {
            left: d.n(),
            right: n,
        });
    }
    let left = d.count_in_range(1, n / 3) as i64;
    let right = d.count_in_range(n / 3 + 1, n) as i64;
    Ok((left - (n / 6) as i64, right - (n / 3) as i64))
}

pub fn in_zone(d: &SubsetWord, zone: &ZoneIndex) -> Result<bool> {
    let (r, s) = zone_of(d, zone.n)?;
    Ok(in_windows(r, s, zone))
}

fn in_windows(r: i64, s: i64, zone: &ZoneIndex) -> bool {
    let ((r_lo, r_hi), (s_lo, s_hi)) = zone.windows();
    (r_lo..=r_hi).contains(&r) && (s_lo..=s_hi).contains(&s)
}

/// Shape of a chain process: left part `[1, left]`, right part
/// `[left+1, left+right]`, chain length `k_max`, inclusion probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainParams {
    pub left: usize,
    pub right: usize,
    pub k_max: usize,
    pub p1: f64,
    pub p2: f64,
}

impl ChainParams {
    pub fn new(left: usize, right: usize, k_max: usize, p1: f64, p2: f64) -> Result<Self> {
        if k_max > left || 2 * k_max > right {
            return Err(Error::Precondition(format!(
                "need K <= left and 2K <= right, got K={k_max} left={left} right={right}"
            )));
        }
        for p in [p1, p2] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Precondition(format!(
                    "probability {p} outside (0,1)"
                )));
            }
        }
        Ok(ChainParams {
            left,
            right,
            k_max,
            p1,
            p2,
        })
    }

    /// The full-scale process for a zone: `K = ⌊√n/12⌋`,
    /// `p1 = 1/2 + 6i/√n`, `p2 = 1/2 + 3j/√n`.
    pub fn for_zone(zone: &ZoneIndex) -> Result<Self> {
        let n = zone.n;
        let root = (n as f64).sqrt();
        Self::new(
            n / 3,
            n - n / 3,
            isqrt(n) / 12,
            0.5 + 6.0 * zone.i as f64 / root,
            0.5 + 3.0 * zone.j as f64 / root,
        )
    }

    pub fn ground(&self) -> usize {
        self.left + self.right
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainSample {
    pub params: ChainParams,
    /// `(u_1, ..., u_K)`.
    pub u: Vec<usize>,
    /// `(v_1, ..., v_2K)`.
    pub v: Vec<usize>,
    pub s1: SubsetWord,
    pub s2: SubsetWord,
    /// `C_0, ..., C_K`.
    pub chain: Vec<SubsetWord>,
    pub seed: u64,
    pub stream: u64,
}

fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One draw of the chain for zone `(i, j)`, reproducible from `seed`.
pub fn sample_chain(n: usize, i: i64, j: i64, seed: u64) -> Result<ChainSample> {
    let zone = ZoneIndex::new(n, i, j)?;
    let params = ChainParams::for_zone(&zone)?;
    Ok(sample_chain_with(&params, seed, 0))
}

/// One draw using substream `stream` of `seed`.
pub fn sample_chain_with(params: &ChainParams, seed: u64, stream: u64) -> ChainSample {
    let mut rng = substream(seed, stream);
    let (left, right, k) = (params.left, params.right, params.k_max);
    let n = params.ground();

    // uniformly random ordered tuples
    let u: Vec<usize> = rand::seq::index::sample(&mut rng, left, k)
        .into_iter()
        .map(|x| x + 1)
        .collect();
    let v: Vec<usize> = rand::seq::index::sample(&mut rng, right, 2 * k)
        .into_iter()
        .map(|x| left + x + 1)
        .collect();

    let mut in_u = vec![false; left + 1];
    for &x in &u {
        in_u[x] = true;
    }
    let mut in_v = vec![false; right + 1];
    for &x in &v {
        in_v[x - left] = true;
    }
    let b1 = Bernoulli::new(params.p1).expect("p1 in (0,1)");
    let b2 = Bernoulli::new(params.p2).expect("p2 in (0,1)");
    let mut s1 = SubsetWord::empty(n);
    for e in (1..=left).filter(|&e| !in_u[e]) {
        if b1.sample(&mut rng) {
            s1.insert(e);
        }
    }
    let mut s2 = SubsetWord::empty(n);
    for e in (left + 1..=n).filter(|&e| !in_v[e - left]) {
        if b2.sample(&mut rng) {
            s2.insert(e);
        }
    }

    let base = s1.union(&s2).expect("same ground");
    let chain = (0..=k)
        .map(|step| {
            let mut c = base.clone();
            for &x in &u[step..] {
                c.insert(x);
            }
            for &x in &v[2 * k - 2 * step..] {
                c.insert(x);
            }
            c
        })
        .collect();

    ChainSample {
        params: *params,
        u,
        v,
        s1,
        s2,
        chain,
        seed,
        stream,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZoneEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub trials: u64,
}

/// Monte Carlo estimate of `P(C_k ∈ [n]_{i,j})`.
pub fn estimate_zone_prob(
    zone: &ZoneIndex,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<ZoneEstimate> {
    estimate_zone_prob_with(zone, k, trials, seed, Exec::default())
}

/// Trial `r` draws from substream `r` of `seed`, so the estimate does not
/// depend on scheduling. Only `|S1|` and `|S2|` decide zone membership
/// (`|C_k ∩ left| = K - k + |S1|`, `|C_k ∩ right| = 2k + |S2|`), so each
/// trial draws those two binomial counts rather than the full sets.
pub fn estimate_zone_prob_with(
    zone: &ZoneIndex,
    k: usize,
    trials: u64,
    seed: u64,
    exec: Exec,
) -> Result<ZoneEstimate> {
    let params = ChainParams::for_zone(zone)?;
    if k > params.k_max {
        return Err(Error::Precondition(format!(
            "k = {k} exceeds K = {}",
            params.k_max
        )));
    }
    if trials == 0 {
        return Err(Error::Precondition("trials must be positive".into()));
    }
    let kk = params.k_max;
    let d1 = Binomial::new((params.left - kk) as u64, params.p1)
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let d2 = Binomial::new((params.right - 2 * kk) as u64, params.p2)
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let (n6, n3) = ((zone.n / 6) as i64, (zone.n / 3) as i64);
    let hits = exec.sum_u64(trials as usize, |r| {
        let mut rng = substream(seed, r as u64);
        let r_d = (kk - k) as i64 + d1.sample(&mut rng) as i64 - n6;
        let s_d = (2 * k) as i64 + d2.sample(&mut rng) as i64 - n3;
        in_windows(r_d, s_d, zone) as u64
    });
    let p = hits as f64 / trials as f64;
    Ok(ZoneEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        hits,
        trials,
    })
}

/// `ln P(C_k = A)`, `-inf` when `A` cannot occur.
///
/// `U` must put its `K - k` members of `A` last in the ordering and `V` its
/// `2k` members of `A` last; `S1`, `S2` must then match `A` exactly.
pub fn chain_point_probability(params: &ChainParams, a: &SubsetWord, k: usize) -> Result<f64> {
    if a.n() != params.ground() {
        return Err(Error::GroundSetMismatch {
            left: a.n(),
            right: params.ground(),
        });
    }
    if k > params.k_max {
        return Err(Error::Precondition(format!(
            "k = {k} exceeds K = {}",
            params.k_max
        )));
    }
    let (m1, m2, kk) = (params.left as i64, params.right as i64, params.k_max as i64);
    let k = k as i64;
    let a1 = a.count_in_range(1, params.left) as i64;
    let a2 = a.count_in_range(params.left + 1, params.ground()) as i64;

    let bern = |hits: i64, misses: i64, p: f64| -> f64 {
        if hits < 0 || misses < 0 {
            f64::NEG_INFINITY
        } else {
            hits as f64 * p.ln() + misses as f64 * (-p).ln_1p()
        }
    };
    let left = ln_binomial(a1 as u64, kk - k) + ln_binomial((m1 - a1) as u64, k)
        - ln_binomial(m1 as u64, kk)
        - ln_binomial(kk as u64, k)
        + bern(a1 - (kk - k), m1 - a1 - k, params.p1);
    let right = ln_binomial(a2 as u64, 2 * k) + ln_binomial((m2 - a2) as u64, 2 * kk - 2 * k)
        - ln_binomial(m2 as u64, 2 * kk)
        - ln_binomial(2 * kk as u64, 2 * k)
        + bern(a2 - 2 * k, m2 - a2 - 2 * kk + 2 * k, params.p2);
    let total = left + right;
    Ok(if total.is_nan() {
        f64::NEG_INFINITY
    } else {
        total
    })
}

/// Uniform random set with `|D ∩ left| = left_count`, `|D ∩ right| = right_count`.
pub fn random_set_with_counts<R: Rng + ?Sized>(
    params: &ChainParams,
    left_count: usize,
    right_count: usize,
    rng: &mut R,
) -> SubsetWord {
    let mut d = SubsetWord::empty(params.ground());
    for x in rand::seq::index::sample(rng, params.left, left_count) {
        d.insert(x + 1);
    }
    for x in rand::seq::index::sample(rng, params.right, right_count) {
        d.insert(params.left + x + 1);
    }
    d
}
