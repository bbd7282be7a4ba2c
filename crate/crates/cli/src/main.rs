use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sperner_core::families::dhj::{
    dhj_encode, dhj_forbidden_pair, find_combinatorial_line, LineTemplate,
};
use sperner_core::families::{
    count_counterexample, counterexample_family, layered_family, parse_beta, parse_family,
    serialize_family, verify,
};
use sperner_core::lattice::binomial;
use sperner_core::probe::{
    estimate_zone_prob, fr_bound, fr_brute, fr_factor, min_neighbor_degree, neighbor_walk,
    paper_bounds, peel, sample_chain, BoundSelector, ZoneIndex,
};
use sperner_core::restrictions::{parse_system, tilted_system};
use sperner_core::search::{max_family, SearchOptions, DEFAULT_GRAPH_CAP};
use sperner_core::weight::weight;
use sperner_core::{BigCount, PairCondition, RestrictionSystem, SubsetWord};

mod experiment;
mod report;

use report::{Inputs, Outcome, RunReport, Table};

#[derive(Parser)]
#[command(
    name = "sperner",
    version,
    about = "Forbidden-pair set families on the Boolean lattice"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Seed for every randomized step
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format (experiment defaults to csv, everything else to json)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Wall-clock budget for searches
    #[arg(long, global = true)]
    pub time_limit_ms: Option<u64>,
    /// Print only the results body
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check a family against a condition
    Verify {
        #[arg(long)]
        family: PathBuf,
        #[command(flatten)]
        cond: CondArgs,
    },
    /// Exact w(G): best union of whole layers
    Weight {
        /// `sperner`, `empty`, `tilted:p:q`, or a system JSON file
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Exact maximum family for small n
    Search {
        #[command(flatten)]
        cond: CondArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_GRAPH_CAP)]
        graph_cap: usize,
        /// Write the optimal family here
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Build one of the explicit families
    #[command(subcommand)]
    Construct(Construct),
    /// Procedures from the proofs
    #[command(subcommand)]
    Probe(Probe),
    /// Run a recipe of searches and print a table
    Experiment {
        #[arg(long)]
        recipe: PathBuf,
        /// Add the elapsed_ms column (not reproducible)
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Args)]
struct CondArgs {
    /// `sperner`, `empty`, `tilted:p:q`, `ordered-tilted`
    #[arg(long, conflicts_with = "system")]
    condition: Option<String>,
    /// Restriction system JSON file
    #[arg(long)]
    system: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Construct {
    /// Union of whole layers
    Layered {
        #[arg(long)]
        n: usize,
        /// Comma-separated layer list
        #[arg(long, value_delimiter = ',')]
        layers: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Large family with no tilted pair, n even
    Counterexample {
        #[arg(long)]
        n: usize,
        /// `2`, `3/2` or `0.75`
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a combinatorial line in the base-8 image of a family over [3m]
    DhjLine {
        #[arg(long, conflicts_with = "template")]
        family: Option<PathBuf>,
        /// Use this template (e.g. `0*1`) instead of searching
        #[arg(long)]
        template: Option<String>,
    },
}

#[derive(Subcommand)]
enum Probe {
    /// Minimum-neighbour-degree core of a middle-layer family
    Peel {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        theta: usize,
    },
    /// Greedy neighbour walk from a start set
    Walk {
        #[arg(long)]
        family: PathBuf,
        /// Comma list, e.g. `1,2`
        #[arg(long)]
        start: String,
        #[arg(long)]
        steps: usize,
    },
    /// One draw of the chain process
    Chain {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        i: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        j: i64,
    },
    /// Monte Carlo estimate of P(C_k in zone)
    ZoneProb {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        i: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        j: i64,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
    },
    /// max{(1-1/1600)^t, e^(-l^2/16t)} 4^t
    FrBound {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        l: u64,
    },
    /// Exact max |A||B| with no intersection of size l, s <= 4
    FrBrute {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        l: u32,
    },
    /// Right-hand sides of the headline bounds
    Bounds {
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// w(G) for thm2; computed from --system when omitted
        #[arg(long)]
        w: Option<String>,
        #[arg(long)]
        system: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Thm1,
    Thm2,
    Thm3,
}

/// Errors from bad arguments or inputs; everything else exits 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli, &argv[1..]) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    use sperner_core::Error as E;
    for cause in e.chain() {
        if cause.is::<Usage>() || cause.is::<std::io::Error>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<E>() {
            return match err {
                E::CapExceeded { .. } => 1,
                _ => 2,
            };
        }
    }
    1
}

fn run(cli: Cli, args: &[String]) -> Result<ExitCode> {
    let start = Instant::now();
    let mut inputs = Inputs::new(args);
    let g = cli.global.clone();
    let (outcome, default_format) = match cli.command {
        Command::Experiment { recipe, timings } => (
            experiment::run(&inputs.read(&recipe)?, timings, &g)?,
            Format::Csv,
        ),
        other => (dispatch(other, &g, &mut inputs)?, Format::Json),
    };
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let format = g.format.unwrap_or(default_format);

    match format {
        Format::Csv => {
            let table = outcome
                .table
                .unwrap_or_else(|| Table::from_object(&outcome.results));
            print!("{}", table.to_csv()?);
        }
        Format::Json if g.quiet => {
            println!("{}", serde_json::to_string_pretty(&outcome.results)?);
        }
        Format::Json => {
            let report = RunReport {
                command: args.to_vec(),
                inputs_digest: inputs.digest(),
                seed: g.seed,
                results: outcome.results,
                elapsed_ms,
                version: env!("CARGO_PKG_VERSION").to_string(),
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(ExitCode::from(if outcome.failed { 1 } else { 0 }))
}

fn condition(cond: &CondArgs, n: usize, inputs: &mut Inputs) -> Result<PairCondition> {
    match (&cond.condition, &cond.system) {
        (Some(text), None) => Ok(PairCondition::from_shorthand(text, n)?),
        (None, Some(path)) => {
            let sys = parse_system(&inputs.read(path)?)?;
            if sys.n != n {
                bail!(usage(format!(
                    "--system is over n = {}, expected {n}",
                    sys.n
                )));
            }
            Ok(PairCondition::Gx(sys))
        }
        _ => Err(usage("give exactly one of --condition or --system")),
    }
}

/// A shorthand (`sperner`, `empty`, `tilted:p:q`) or a system JSON file.
fn system_arg(text: &str, n: Option<usize>, inputs: &mut Inputs) -> Result<RestrictionSystem> {
    let shorthand =
        text == "sperner" || text == "empty" || text == "none" || text.starts_with("tilted:");
    if !shorthand {
        let sys = parse_system(&inputs.read(text.as_ref())?)?;
        if let Some(n) = n.filter(|&n| n != sys.n) {
            bail!(usage(format!(
                "--system is over n = {}, but --n is {n}",
                sys.n
            )));
        }
        return Ok(sys);
    }
    let n = n.ok_or_else(|| usage("--n is required with a shorthand --system"))?;
    match PairCondition::from_shorthand(text, n)? {
        PairCondition::Gx(sys) => Ok(sys),
        PairCondition::Tilted { p, q } => Ok(tilted_system(n, p, q)?),
        PairCondition::OrderedTilted => Err(usage("ordered-tilted is not a restriction system")),
    }
}

fn read_family(path: &Path, inputs: &mut Inputs) -> Result<sperner_core::SetFamily> {
    parse_family(&inputs.read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(path) = path {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn dispatch(command: Command, g: &Global, inputs: &mut Inputs) -> Result<Outcome> {
    match command {
        Command::Verify { family, cond } => {
            let fam = read_family(&family, inputs)?;
            let cond = condition(&cond, fam.n(), inputs)?;
            let verdict = verify(&fam, &cond)?;
            let pass = verdict.is_pass();
            let mut results = json!({ "n": fam.n(), "size": fam.len(), "condition": cond.label() });
            if let serde_json::Value::Object(v) = serde_json::to_value(&verdict)? {
                results.as_object_mut().unwrap().extend(v);
            }
            Ok(Outcome::ok(results).failed_if(!pass))
        }
        Command::Weight { system, n } => {
            let sys = system_arg(&system, n, inputs)?;
            let r = weight(&sys)?;
            Ok(Outcome::ok(json!({ "n": sys.n, "w": r.w, "I": r.layers })))
        }
        Command::Search {
            cond,
            n,
            graph_cap,
            certificate,
        } => {
            let cond = condition(&cond, n, inputs)?;
            let opts = SearchOptions {
                time_limit: g.time_limit_ms.map(Duration::from_millis),
                graph_cap,
            };
            let r = max_family(&cond, n, &opts)?;
            write_out(&certificate, &serialize_family(&r.certificate))?;
            Ok(Outcome::ok(json!({
                "n": n,
                "condition": cond.label(),
                "size": r.size,
                "optimal": r.optimal,
                "nodes": r.nodes_explored,
            })))
        }
        Command::Construct(c) => construct(c, inputs),
        Command::Probe(p) => probe(p, g, inputs),
        Command::Experiment { .. } => unreachable!("handled by run"),
    }
}

fn construct(c: Construct, inputs: &mut Inputs) -> Result<Outcome> {
    match c {
        Construct::Layered { n, layers, out } => {
            let size: BigCount = layers.iter().map(|&k| binomial(n as u64, k as i64)).sum();
            if out.is_some() {
                write_out(&out, &serialize_family(&layered_family(n, &layers)?))?;
            }
            Ok(Outcome::ok(
                json!({ "n": n, "layers": layers, "size": size }),
            ))
        }
        Construct::Counterexample { n, beta, out } => {
            let b = parse_beta(&beta)?;
            let size = count_counterexample(n, b)?;
            if out.is_some() {
                write_out(&out, &serialize_family(&counterexample_family(n, b)?))?;
            }
            Ok(Outcome::ok(
                json!({ "n": n, "beta": b.to_string(), "size": size }),
            ))
        }
        Construct::DhjLine { family, template } => {
            let line = match (family, template) {
                (_, Some(t)) => Some(LineTemplate::parse(8, &t)?),
                (Some(path), None) => {
                    let fam = read_family(&path, inputs)?;
                    if fam.n() % 3 != 0 {
                        bail!(usage(format!(
                            "family ground size {} is not a multiple of 3",
                            fam.n()
                        )));
                    }
                    let words: HashSet<_> = fam.iter().map(dhj_encode).collect::<Result<_, _>>()?;
                    find_combinatorial_line(&words, 8, fam.n() / 3)?
                }
                (None, None) => bail!(usage("give --family or --template")),
            };
            match line {
                Some(line) => {
                    let pair = dhj_forbidden_pair(&line)?;
                    Ok(Outcome::ok(json!({
                        "found": true,
                        "line": line,
                        "a": pair.a,
                        "b": pair.b,
                        "forbidden": pair.check,
                    })))
                }
                None => Ok(Outcome::ok(json!({ "found": false })).failed_if(true)),
            }
        }
    }
}

fn probe(p: Probe, g: &Global, inputs: &mut Inputs) -> Result<Outcome> {
    match p {
        Probe::Peel { family, theta } => {
            let fam = read_family(&family, inputs)?.to_vec();
            let core = peel(&fam, theta)?;
            Ok(Outcome::ok(json!({
                "input_size": fam.len(),
                "theta": theta,
                "size": core.len(),
                "min_degree": min_neighbor_degree(&core)?,
                "core": core,
            })))
        }
        Probe::Walk {
            family,
            start,
            steps,
        } => {
            let fam = read_family(&family, inputs)?;
            let d0 =
                SubsetWord::parse(fam.n(), &start).map_err(|e| usage(format!("--start: {e}")))?;
            let w = neighbor_walk(&fam.to_vec(), &d0, steps)?;
            let ok = w.succeeded();
            Ok(Outcome::ok(serde_json::to_value(&w)?).failed_if(!ok))
        }
        Probe::Chain { n, i, j } => {
            let c = sample_chain(n, i, j, g.seed)?;
            Ok(Outcome::ok(json!({
                "n": n,
                "i": i,
                "j": j,
                "K": c.params.k_max,
                "p1": c.params.p1,
                "p2": c.params.p2,
                "U": c.u,
                "V": c.v,
                "S1_size": c.s1.len(),
                "S2_size": c.s2.len(),
                "chain_sizes": c.chain.iter().map(|s| s.len()).collect::<Vec<_>>(),
                "chain_zones": c.chain.iter().map(|s| sperner_core::probe::zone_of(s, n)).collect::<Result<Vec<_>, _>>()?,
            })))
        }
        Probe::ZoneProb { n, i, j, k, trials } => {
            let zone = ZoneIndex::new(n, i, j)?;
            let e = estimate_zone_prob(&zone, k, trials, g.seed)?;
            Ok(Outcome::ok(json!({
                "n": n, "i": i, "j": j, "k": k,
                "estimate": e.estimate,
                "stderr": e.stderr,
                "hits": e.hits,
                "trials": e.trials,
            })))
        }
        Probe::FrBound { t, l } => {
            let v = fr_bound(t, l)?;
            Ok(Outcome::ok(json!({
                "t": t, "l": l,
                "ln": v.ln,
                "log10": v.log10,
                "value": v.rendered(),
                "factor_of_4_pow_t": fr_factor(t, l)?,
            })))
        }
        Probe::FrBrute { s, l } => {
            let r = fr_brute(s, l)?;
            let mut results = serde_json::to_value(&r)?;
            // informational: the asymptotic bound need not apply at this size
            if let Ok(b) = fr_bound(s as u64, l as u64) {
                results["fr_bound"] = json!(b.rendered());
            }
            Ok(Outcome::ok(results))
        }
        Probe::Bounds {
            theorem,
            n,
            p,
            q,
            w,
            system,
        } => {
            let selector = match theorem {
                Theorem::Thm1 => BoundSelector::Thm1 { n, p, q },
                Theorem::Thm3 => BoundSelector::Thm3 { n },
                Theorem::Thm2 => {
                    let w = match (w, system) {
                        (Some(w), _) => BigCount(
                            w.parse()
                                .map_err(|_| usage(format!("--w: not an integer: {w}")))?,
                        ),
                        (None, Some(sys)) => {
                            weight(&system_arg(&sys, Some(n as usize), inputs)?)?.w
                        }
                        (None, None) => bail!(usage("thm2 needs --w or --system")),
                    };
                    BoundSelector::Thm2 { n, w }
                }
            };
            let v = paper_bounds(&selector)?;
            let mut results = serde_json::to_value(&selector)?;
            let extra = json!({
                "ln": v.ln,
                "log10": v.log10,
                "value": v.rendered(),
                "exact": v.exact,
                "vacuous": v.vacuous,
            });
            results
                .as_object_mut()
                .unwrap()
                .extend(extra.as_object().unwrap().clone());
            Ok(Outcome::ok(results))
        }
    }
}
