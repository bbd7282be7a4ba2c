//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion always prints one PASS/FAIL line; exits non-zero if any fail.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sperner_core::families::dhj::{
    dhj_decode, dhj_encode, dhj_forbidden_pair, find_combinatorial_line, LineTemplate,
};
use sperner_core::families::{
    count_counterexample, counterexample_family, counterexample_pair_bound_holds, layered_family,
    sample_counterexample_member, verify_gx, verify_ordered_tilted, verify_tilted,
};
use sperner_core::lattice::{binomial, layer_iter};
use sperner_core::probe::{
    alpha_ln, chain_point_probability, estimate_zone_prob, fr_brute, fr_factor,
    min_neighbor_degree, peel, random_set_with_counts, sample_chain, ChainParams, ZoneIndex,
};
use sperner_core::restrictions::{sperner_system, tilted_system};
use sperner_core::search::{exhaustive_oracle, max_family, SearchOptions};
use sperner_core::weight::weight;
use sperner_core::{diff_size, Edge, PairCondition, RestrictionSystem, SetFamily, SubsetWord};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_system(n: usize, rng: &mut impl Rng) -> RestrictionSystem {
    let density: f64 = rng.random_range(0.05..0.9);
    let mut edges = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            if rng.random_bool(density) {
                edges.push(Edge::new(i, j, rng.random_range(0..=i.min(n - j))));
            }
        }
    }
    RestrictionSystem::checked(n, edges).unwrap()
}

fn builtin_conditions(n: usize) -> Vec<PairCondition> {
    let mut out = vec![
        PairCondition::Gx(sperner_system(n)),
        PairCondition::Gx(RestrictionSystem::empty(n)),
        PairCondition::OrderedTilted,
    ];
    for (p, q) in [(0, 1), (1, 2), (1, 3), (2, 3)] {
        out.push(PairCondition::tilted(p, q).unwrap());
    }
    out
}

fn sperner_exactness() -> Result<String, String> {
    let mut sizes = Vec::new();
    for (n, want) in [(3, 3), (4, 6), (5, 10)] {
        let start = Instant::now();
        let r = max_family(
            &PairCondition::Gx(sperner_system(n)),
            n,
            &SearchOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        let took = start.elapsed();
        let binom = binomial(n as u64, (n / 2) as i64).to_u64().unwrap() as usize;
        ensure(r.size == want && r.size == binom && r.optimal, || {
            format!("n={n}: size {} optimal {}", r.size, r.optimal)
        })?;
        ensure(took < Duration::from_secs(1), || {
            format!("n={n} took {took:?}")
        })?;
        sizes.push(r.size);
    }
    Ok(format!("sizes {sizes:?}, all optimal"))
}

fn oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut cases = 0;
    for n in 1..=4 {
        let mut conds = builtin_conditions(n);
        conds.extend((0..20).map(|_| PairCondition::Gx(random_system(n, &mut rng))));
        for cond in conds {
            let fast =
                max_family(&cond, n, &SearchOptions::default()).map_err(|e| e.to_string())?;
            let slow = exhaustive_oracle(&cond, n).map_err(|e| e.to_string())?;
            ensure(fast.optimal && fast.size == slow, || {
                format!("n={n} {}: search {} oracle {slow}", cond.label(), fast.size)
            })?;
            cases += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("{cases} cases agree in {:.1}s", took.as_secs_f64()))
}

fn construction_anchor() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..50 {
        let n = rng.random_range(1..=6);
        let sys = random_system(n, &mut rng);
        let w = weight(&sys).map_err(|e| e.to_string())?;
        let best = max_family(
            &PairCondition::Gx(sys.clone()),
            n,
            &SearchOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        let w_val = w.w.to_u64().unwrap() as usize;
        ensure(best.optimal && best.size >= w_val, || {
            format!("trial {trial}: size {} < w {w_val}", best.size)
        })?;
        let fam = layered_family(n, &w.layers).map_err(|e| e.to_string())?;
        ensure(fam.len() == w_val, || {
            format!("trial {trial}: layered size mismatch")
        })?;
        ensure(
            verify_gx(&fam, &sys).map_err(|e| e.to_string())?.is_pass(),
            || format!("trial {trial}: layered family fails its own system"),
        )?;
    }
    Ok("50 systems: max >= w, layered certificates pass".into())
}

fn random_family(n: usize, rng: &mut impl Rng) -> SetFamily {
    // draw from a few layers so both verdicts are common
    let layers: Vec<usize> = (0..rng.random_range(1..=3))
        .map(|_| rng.random_range(0..=n))
        .collect();
    let target = rng.random_range(1..=12);
    let mut fam = SetFamily::new(n);
    for _ in 0..target {
        let k = layers[rng.random_range(0..layers.len())];
        let mut s = SubsetWord::empty(n);
        for x in rand::seq::index::sample(rng, n, k) {
            s.insert(x + 1);
        }
        fam.insert(s).unwrap();
    }
    fam
}

fn tilted_equivalence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut total, mut passes) = (0, 0);
    for n in 1..=14 {
        for (p, q) in [(0u64, 1u64), (1, 2), (1, 3), (2, 3)] {
            let sys = tilted_system(n, p, q).map_err(|e| e.to_string())?;
            for _ in 0..1000 {
                let fam = random_family(n, &mut rng);
                let direct = verify_tilted(&fam, p, q)
                    .map_err(|e| e.to_string())?
                    .is_pass();
                let via = verify_gx(&fam, &sys).map_err(|e| e.to_string())?.is_pass();
                ensure(direct == via, || {
                    format!("n={n} ({p},{q}) disagree on {fam:?}")
                })?;
                total += 1;
                passes += direct as usize;
            }
        }
    }
    Ok(format!(
        "{total} families, {passes} pass / {} violate, zero disagreements",
        total - passes
    ))
}

fn peeling() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..200 {
        let t = [8usize, 12, 16][trial % 3];
        let keep: f64 = rng.random_range(0.05..1.0);
        let b: Vec<SubsetWord> = layer_iter(t, t as i64 / 2)
            .filter(|_| rng.random_bool(keep))
            .collect();
        let alpha: f64 = rng.random_range(4.0 / t as f64..=1.0);
        let theta = (alpha * (t * t) as f64 / 32.0).ceil() as usize;
        let e = peel(&b, theta).map_err(|e| e.to_string())?;
        if let Some(d) = min_neighbor_degree(&e).map_err(|e| e.to_string())? {
            ensure(d >= theta, || {
                format!("trial {trial}: min degree {d} < {theta}")
            })?;
        }
        let layer = binomial(t as u64, t as i64 / 2).to_f64();
        ensure(e.len() as f64 > b.len() as f64 - alpha * layer, || {
            format!(
                "trial {trial}: |E| = {} too small (|B| = {}, alpha = {alpha})",
                e.len(),
                b.len()
            )
        })?;
    }
    Ok("200 instances".into())
}

fn chain_forbidden_pairs() -> Result<String, String> {
    let start = Instant::now();
    let mut checks = 0;
    for seed in 0..100u64 {
        let i = (seed % 3) as i64 - 1;
        let j = (seed / 3 % 3) as i64 - 1;
        let c = sample_chain(10002, i, j, seed).map_err(|e| e.to_string())?;
        let k = c.params.k_max;
        for a in 0..=k {
            for b in a + 1..=k {
                let pair =
                    SetFamily::from_sets(10002, [c.chain[a].clone(), c.chain[b].clone()]).unwrap();
                let verdict = verify_ordered_tilted(&pair).map_err(|e| e.to_string())?;
                ensure(!verdict.is_pass(), || {
                    format!("seed {seed}: C_{a}, C_{b} not forbidden")
                })?;
                checks += 1;
            }
        }
    }
    let took = start.elapsed();
    ensure(checks == 100 * 36, || format!("{checks} checks"))?;
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!(
        "{checks} pairs all forbidden in {:.1}s",
        took.as_secs_f64()
    ))
}

fn zone_probability() -> Result<String, String> {
    let n = 10002;
    let mut worst = f64::INFINITY;
    for i in -1..=1 {
        for j in -1..=1 {
            let zone = ZoneIndex::new(n, i, j).map_err(|e| e.to_string())?;
            let kk = ChainParams::for_zone(&zone).unwrap().k_max;
            for k in [0, kk / 2, kk] {
                let e = estimate_zone_prob(&zone, k, 20_000, 100 + k as u64)
                    .map_err(|e| e.to_string())?;
                ensure(e.estimate >= 0.12, || {
                    format!("({i},{j}) k={k}: {}", e.estimate)
                })?;
                worst = worst.min(e.estimate);
            }
        }
    }
    Ok(format!("27 estimates, minimum {worst:.4}"))
}

/// P(C_k = A) for every A over [m1 + m2] by enumerating every outcome.
fn micro_oracle(params: &ChainParams, k: usize) -> Vec<f64> {
    fn side(m: usize, take: usize, keep_from: usize, p: f64) -> Vec<f64> {
        let mut dist = vec![0.0; 1 << m];
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..take {
            let mut next = Vec::new();
            for t in &tuples {
                for x in (0..m).filter(|x| !t.contains(x)) {
                    let mut t = t.clone();
                    t.push(x);
                    next.push(t);
                }
            }
            tuples = next;
        }
        let weight = 1.0 / tuples.len() as f64;
        for t in &tuples {
            let used: u64 = t.iter().map(|&x| 1u64 << x).sum();
            let kept: u64 = t[keep_from..].iter().map(|&x| 1u64 << x).sum();
            let rest = !used & ((1u64 << m) - 1);
            let free = rest.count_ones() as i32;
            let mut s = rest;
            loop {
                let hits = s.count_ones() as i32;
                dist[(s | kept) as usize] += weight * p.powi(hits) * (1.0 - p).powi(free - hits);
                if s == 0 {
                    break;
                }
                s = (s - 1) & rest;
            }
        }
        dist
    }
    let kk = params.k_max;
    let left = side(params.left, kk, k, params.p1);
    let right = side(params.right, 2 * kk, 2 * kk - 2 * k, params.p2);
    right
        .iter()
        .flat_map(|r| left.iter().map(move |l| l * r))
        .collect()
}

fn probability_evaluator() -> Result<String, String> {
    let mut worst = 0.0f64;
    for (p1, p2) in [(0.5, 0.5), (0.3, 0.7)] {
        let params = ChainParams::new(6, 12, 2, p1, p2).unwrap();
        for k in 0..=2 {
            let exact = micro_oracle(&params, k);
            let mut total = 0.0;
            for (mask, want) in exact.iter().enumerate() {
                let a = SubsetWord::from_mask(18, mask as u64);
                let got = chain_point_probability(&params, &a, k)
                    .map_err(|e| e.to_string())?
                    .exp();
                worst = worst.max((got - want).abs());
                total += got;
            }
            ensure(worst <= 1e-12, || {
                format!("({p1},{p2}) k={k}: error {worst:e}")
            })?;
            ensure((total - 1.0).abs() <= 1e-9, || {
                format!("({p1},{p2}) k={k}: total {total}")
            })?;
        }
    }

    let n = 10002;
    let bound = alpha_ln(n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut max_ratio = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let zone = ZoneIndex::new(n, rng.random_range(-1..=1), rng.random_range(-1..=1)).unwrap();
        let params = ChainParams::for_zone(&zone).unwrap();
        let k = rng.random_range(0..=params.k_max);
        let ((r_lo, r_hi), (s_lo, s_hi)) = zone.windows();
        let draw = |rng: &mut ChaCha8Rng| {
            let a1 = (n / 6) as i64 + rng.random_range(r_lo..=r_hi);
            let a2 = (n / 3) as i64 + rng.random_range(s_lo..=s_hi);
            random_set_with_counts(&params, a1 as usize, a2 as usize, rng)
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let la = chain_point_probability(&params, &a, k).map_err(|e| e.to_string())?;
        let lb = chain_point_probability(&params, &b, k).map_err(|e| e.to_string())?;
        ensure(la.is_finite() && lb.is_finite(), || {
            "zero probability inside a zone".into()
        })?;
        max_ratio = max_ratio.max(la - lb);
    }
    ensure(max_ratio <= bound, || {
        format!("ln ratio {max_ratio} > ln alpha {bound}")
    })?;
    Ok(format!(
        "micro error {worst:.1e}; max ln ratio {max_ratio:.2} <= ln alpha(n) = {bound:.2}"
    ))
}

fn random_template(m: usize, rng: &mut impl Rng) -> LineTemplate {
    loop {
        let cells: Vec<Option<u8>> = (0..m)
            .map(|_| {
                if rng.random_bool(0.4) {
                    None
                } else {
                    Some(rng.random_range(0..8))
                }
            })
            .collect();
        if let Ok(t) = LineTemplate::new(8, cells) {
            return t;
        }
    }
}

fn dhj_machinery() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let m = rng.random_range(1..=8);
        let mut x = SubsetWord::empty(3 * m);
        for e in 1..=3 * m {
            if rng.random_bool(0.5) {
                x.insert(e);
            }
        }
        let w = dhj_encode(&x).map_err(|e| e.to_string())?;
        ensure(dhj_decode(&w).map_err(|e| e.to_string())? == x, || {
            format!("roundtrip failed for {x}")
        })?;
    }
    let mut exact_hits = 0;
    for trial in 0..100 {
        let m = rng.random_range(1..=4);
        let line = random_template(m, &mut rng);
        let mut words: HashSet<Vec<u8>> = line.points().into_iter().collect();
        let alone = find_combinatorial_line(&words, 8, m).map_err(|e| e.to_string())?;
        ensure(alone.as_ref() == Some(&line), || {
            format!("trial {trial}: planted {line} not found alone")
        })?;
        exact_hits += 1;
        for _ in 0..rng.random_range(0..200) {
            words.insert((0..m).map(|_| rng.random_range(0..8)).collect());
        }
        let found = find_combinatorial_line(&words, 8, m)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("trial {trial}: no line with {line} planted"))?;
        ensure(found.points().iter().all(|p| words.contains(p)), || {
            format!("trial {trial}: bogus line {found}")
        })?;
    }
    for trial in 0..100 {
        let line = random_template(rng.random_range(1..=5), &mut rng);
        let pair = dhj_forbidden_pair(&line).map_err(|e| e.to_string())?;
        ensure(pair.check, || {
            format!("trial {trial}: {line} gives no forbidden pair")
        })?;
    }
    Ok(format!(
        "1000 roundtrips, {exact_hits} planted lines recovered, 100 forbidden pairs"
    ))
}

fn counterexample_family_check() -> Result<String, String> {
    let one = sperner_core::families::parse_beta("1").unwrap();
    let count = count_counterexample(16, one)
        .map_err(|e| e.to_string())?
        .to_u64();
    let brute = (0u64..1 << 16)
        .filter(|&mask| {
            let a = (mask & 0xff).count_ones() as f64;
            mask.count_ones() <= 8 && a > 4.0 + 2.0
        })
        .count() as u64;
    ensure(count == Some(73) && brute == 73, || {
        format!("count {count:?}, brute {brute}")
    })?;

    let mut pairs = 0u64;
    for n in (2..=24).step_by(2) {
        for beta in ["1", "2"] {
            let beta = sperner_core::families::parse_beta(beta).unwrap();
            let members: Vec<u32> = counterexample_family(n, beta)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|s| s.to_mask() as u32)
                .collect();
            let mut worst = 0u32;
            for &a in &members {
                for &b in &members {
                    worst = worst.max((a & !b).count_ones());
                }
            }
            pairs += (members.len() * members.len()) as u64;
            ensure(
                members.is_empty() || counterexample_pair_bound_holds(n, beta, worst as usize),
                || format!("n={n} beta={beta}: diff size {worst}"),
            )?;
        }
    }

    let two = sperner_core::families::parse_beta("2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100_000 {
        let a = sample_counterexample_member(100, two, &mut rng)
            .map_err(|e| e.to_string())?
            .unwrap();
        let b = sample_counterexample_member(100, two, &mut rng)
            .map_err(|e| e.to_string())?
            .unwrap();
        let d = diff_size(&a, &b).unwrap();
        ensure(counterexample_pair_bound_holds(100, two, d), || {
            format!("n=100: diff size {d}")
        })?;
    }
    Ok(format!(
        "count 73; {pairs} exhaustive pairs at n <= 24; 1e5 sampled pairs at n = 100"
    ))
}

fn frankl_rodl() -> Result<String, String> {
    let r = fr_brute(3, 1).map_err(|e| e.to_string())?;
    ensure(r.value == 10, || format!("fr_brute(3,1) = {}", r.value))?;
    for s in 0..=4u32 {
        for l in s + 1..=s + 3 {
            let v = fr_brute(s, l).map_err(|e| e.to_string())?.value;
            ensure(v == 4u64.pow(s), || format!("fr_brute({s},{l}) = {v}"))?;
        }
    }
    // (1599/1600)^400 is the larger branch at (400, 100); evaluate it in integers
    let scale = BigUint::from(10u32).pow(30);
    let exact = BigUint::from(1599u32).pow(400) * &scale / BigUint::from(1600u32).pow(400);
    let exact = exact.to_string().parse::<f64>().unwrap() / 1e30;
    let got = fr_factor(400, 100).map_err(|e| e.to_string())?;
    let rel = (got - exact).abs() / exact;
    ensure(rel <= 1e-9, || {
        format!("fr_bound(400,100)/4^400 = {got}, exact {exact}")
    })?;
    Ok(format!(
        "fr_brute ok; fr_bound(400,100) = {got:.10} * 4^400, rel err {rel:.1e}"
    ))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sperner"))
        .args(args)
        .output()
        .expect("spawn sperner");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn results_body(stdout: &str) -> String {
    match serde_json::from_str::<serde_json::Value>(stdout) {
        Ok(v) if v.get("results").is_some() => v["results"].to_string(),
        _ => stdout.to_string(),
    }
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let recipe = dir.path().join("recipe.json");
    std::fs::write(
        &recipe,
        r#"{"cells": [{"condition": "sperner", "n_range": [1, 4]}, {"condition": "tilted:1:2", "n_range": [2, 5]}]}"#,
    )
    .unwrap();
    let family = dir.path().join("layer.txt");
    let (_, _) = run_cli(&[
        "construct",
        "layered",
        "--n",
        "6",
        "--layers",
        "3",
        "--out",
        family.to_str().unwrap(),
    ]);
    let commands: Vec<Vec<&str>> = vec![
        vec!["weight", "--system", "tilted:1:2", "--n", "6"],
        vec!["search", "--condition", "ordered-tilted", "--n", "4"],
        vec!["construct", "counterexample", "--n", "40", "--beta", "3/2"],
        vec!["probe", "chain", "--n", "576", "--seed", "42"],
        vec![
            "probe",
            "zone-prob",
            "--n",
            "10002",
            "--i",
            "1",
            "--j",
            "-1",
            "--k",
            "4",
            "--trials",
            "5000",
            "--seed",
            "7",
        ],
        vec![
            "probe",
            "peel",
            "--family",
            family.to_str().unwrap(),
            "--theta",
            "9",
        ],
        vec![
            "probe",
            "walk",
            "--family",
            family.to_str().unwrap(),
            "--start",
            "1,2,3",
            "--steps",
            "3",
        ],
        vec!["probe", "fr-brute", "--s", "3", "--l", "1"],
        vec!["probe", "bounds", "--theorem", "thm3", "--n", "1000"],
        vec!["experiment", "--recipe", recipe.to_str().unwrap()],
        vec![
            "experiment",
            "--recipe",
            recipe.to_str().unwrap(),
            "--format",
            "json",
            "--seed",
            "5",
        ],
    ];
    for args in &commands {
        let (c1, first) = run_cli(args);
        let (c2, second) = run_cli(args);
        ensure(c1 == 0 && c2 == 0, || format!("{args:?} exited {c1}/{c2}"))?;
        ensure(
            !first.is_empty() && results_body(&first) == results_body(&second),
            || format!("{args:?} differs between runs"),
        )?;
    }
    Ok(format!(
        "{} seeded commands reproduce byte-identical results",
        commands.len()
    ))
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("sperner exactness", sperner_exactness),
        ("oracle equivalence", oracle_equivalence),
        ("construction anchor", construction_anchor),
        ("tilted equivalence", tilted_equivalence),
        ("peeling bound", peeling),
        ("chain forbidden pairs", chain_forbidden_pairs),
        ("zone probability", zone_probability),
        ("probability evaluator", probability_evaluator),
        ("dhj machinery", dhj_machinery),
        ("counterexample family", counterexample_family_check),
        ("frankl-rodl plumbing", frankl_rodl),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS {name} ({secs:.1}s): {detail}",
                idx + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1}s): {why}", idx + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
