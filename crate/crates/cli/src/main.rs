mod bounds_cmd;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use cayley_core::bounds::{cascade_audit, find_threshold, AuditInput, CascadeConstants, CascadeMode, Scale};
use cayley_core::decomposition::{energy_partition, FinderMode, DEFAULT_C1};
use cayley_core::deviation::{
    corollary15_pipeline, greedy_packing, lemma14_extract, random_subset, row_sigmas, sigma, split_blocks,
    PipelineOutcome,
};
use cayley_core::dissociation::{additive_dimension, is_dissociated, span, DimensionMode};
use cayley_core::harness::{self, ExperimentConfig, ExperimentKind};
use cayley_core::rational::{self, parse_rational, Rational};
use cayley_core::subset::{additive_energy, additive_energy_oracle, sumset};
use cayley_core::{Error, GroupSpec, GroupSubset};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use output::Format;

#[derive(Parser)]
#[command(name = "cayley", version, about = "Additive energy, dissociation and random Cayley sum graph experiments")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Group literal: moduli list "6,2", "z8", "z3^2" or "f2^4"
    #[arg(long, global = true)]
    group: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a group, optionally encoding or decoding one element
    Group {
        #[arg(long)]
        index: Option<usize>,
        /// Comma-separated coordinates
        #[arg(long)]
        element: Option<String>,
    },
    /// Additive energy, sumset and representation function of X and Y
    Energy {
        #[arg(long = "set-x")]
        set_x: String,
        #[arg(long = "set-y")]
        set_y: String,
        /// Also run the quartic enumeration and compare
        #[arg(long)]
        oracle: bool,
    },
    /// Dissociativity, span and additive dimension of a set
    Dim {
        #[arg(long)]
        set: String,
        #[arg(long, value_enum, default_value_t = DimMode::Exact)]
        mode: DimMode,
        #[arg(long)]
        span: bool,
    },
    /// Partition B into a structured part and a low-energy part
    Decompose {
        #[arg(long = "set-a")]
        set_a: String,
        #[arg(long = "set-b")]
        set_b: String,
        #[arg(long = "M")]
        m: String,
        #[arg(long, value_enum, default_value_t = Finder::Exhaustive)]
        mode: Finder,
        #[arg(long, default_value_t = DEFAULT_C1)]
        c1: f64,
    },
    /// Low-overlap packing of translates of X by elements of Y
    Pack {
        #[arg(long = "set-x")]
        set_x: String,
        #[arg(long = "set-y")]
        set_y: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        /// Run extraction then packing against this A (or a seeded random A with --random-a)
        #[arg(long = "set-a")]
        set_a: Option<String>,
        #[arg(long = "random-a")]
        random_a: bool,
    },
    /// Deviation of a random or given A on X x Y, with per-row deviations
    Scan {
        #[arg(long = "set-a")]
        set_a: Option<String>,
        #[arg(long = "set-x")]
        set_x: Option<String>,
        #[arg(long = "set-y")]
        set_y: Option<String>,
        /// Draw X and Y at random with these sizes, "nx,ny"
        #[arg(long = "random-sizes")]
        random_sizes: Option<String>,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        /// Also split Y into blocks with sizes in lo..=hi, "lo,hi"
        #[arg(long)]
        blocks: Option<String>,
    },
    /// Seeded Monte Carlo experiments
    Mc {
        #[arg(long, value_enum)]
        kind: McKind,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        epsilon: Option<String>,
        /// Comma-separated sizes; meaning depends on --kind
        #[arg(long)]
        sizes: Option<String>,
        /// Packing prefixes for lemma10, comma-separated
        #[arg(long)]
        ks: Option<String>,
    },
    /// Evaluate a closed-form bound
    Bounds {
        /// hoeffding, lemma10, cor11, cor12, prop8, cor9, prop16, lemma6, thm1, thm2, thm7
        #[arg(long)]
        name: String,
        /// key=val pairs, comma-separated or repeated
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Audit the proof-parameter cascade at a point, or search for its threshold
    Audit {
        #[arg(long, value_enum, default_value_t = AuditMode::General)]
        mode: AuditMode,
        #[arg(long = "logN")]
        log_n: Option<f64>,
        #[arg(long = "loglogN")]
        log_log_n: Option<f64>,
        /// Defaults to ln ln N
        #[arg(long)]
        w: Option<f64>,
        /// Deviation level in exponent2 mode (default 1/2)
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long = "Cprime", default_value_t = 1.0)]
        c_prime: f64,
        #[arg(long = "C1", default_value_t = 1.0)]
        c1: f64,
        #[arg(long = "find-threshold")]
        find_threshold: bool,
    },
    /// Exhaustive maximum of |sigma_A(X, Y)| over all X, Y in a group of order <= 16
    WorstCase {
        #[arg(long = "set-a")]
        set_a: Option<String>,
        #[arg(long, default_value_t = 1)]
        floor: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DimMode {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Finder {
    Exhaustive,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum McKind {
    Lemma10,
    SigmaTail,
    Restriction,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditMode {
    General,
    Exponent2,
}

/// How a command ended: `Ok` with a report, a property failure with a
/// report, or an error.
enum Outcome {
    Pass(Value),
    Fail(Value),
}

enum Failure {
    Usage(String),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantViolation(_) => Failure::Property(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn group(global: &Global) -> Result<GroupSpec, Failure> {
    let lit = global
        .group
        .as_deref()
        .ok_or_else(|| Failure::Usage("--group is required for this command".into()))?;
    Ok(GroupSpec::parse(lit)?)
}

fn parse_set(g: &GroupSpec, lit: &str) -> Result<GroupSubset, Failure> {
    Ok(GroupSubset::parse(g, lit)?)
}

fn parse_list(s: &str) -> Result<Vec<usize>, Failure> {
    s.trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("not a list of integers: {s:?}")))
        })
        .collect()
}

fn parse_eps(s: &str) -> Result<Rational, Failure> {
    Ok(parse_rational(s)?)
}

fn run(cli: &Cli) -> CmdResult {
    let gl = &cli.global;
    match &cli.command {
        Command::Group { index, element } => {
            let g = group(gl)?;
            let mut v = json!({
                "group": g,
                "order": g.order(),
                "rank": g.rank(),
                "exponent_two": g.is_exponent_two(),
            });
            if let Some(i) = index {
                v["element"] = to_value(&g.decode(*i)?);
                v["index"] = json!(i);
            }
            if let Some(e) = element {
                let coords = parse_list(e)?.into_iter().map(|c| c as u32).collect::<Vec<_>>();
                let el = cayley_core::Element::new(coords);
                v["index"] = json!(g.encode(&el)?);
                v["element"] = to_value(&el);
            }
            Ok(Outcome::Pass(v))
        }
        Command::Energy { set_x, set_y, oracle } => {
            let g = group(gl)?;
            let (x, y) = (parse_set(&g, set_x)?, parse_set(&g, set_y)?);
            let energy = additive_energy(&x, &y)?;
            let mut v = json!({
                "group": g,
                "x": x,
                "y": y,
                "energy": energy,
                "sumset": sumset(&x, &y)?,
            });
            if *oracle {
                let o = additive_energy_oracle(&x, &y)?;
                v["oracle_energy"] = to_value(&o);
                if o != energy {
                    return Ok(Outcome::Fail(v));
                }
            }
            Ok(Outcome::Pass(v))
        }
        Command::Dim { set, mode, span: with_span } => {
            let g = group(gl)?;
            let s = parse_set(&g, set)?;
            let mode = match mode {
                DimMode::Exact => DimensionMode::Exact,
                DimMode::Greedy => DimensionMode::Greedy,
            };
            let d = additive_dimension(&s, mode)?;
            let mut v = json!({
                "group": g,
                "set": s,
                "dissociated": is_dissociated(&s)?,
                "value": d.value,
                "witness": d.witness,
                "exact": d.exact,
            });
            if *with_span {
                let sp = span(&s)?;
                v["span_size"] = json!(sp.len());
                v["span"] = to_value(&sp);
            }
            Ok(Outcome::Pass(v))
        }
        Command::Decompose { set_a, set_b, m, mode, c1 } => {
            let g = group(gl)?;
            let (a, b) = (parse_set(&g, set_a)?, parse_set(&g, set_b)?);
            let mode = match mode {
                Finder::Exhaustive => FinderMode::Exhaustive,
                Finder::Greedy => FinderMode::Greedy,
            };
            let r = energy_partition(&a, &b, parse_rational(m)?, mode, *c1)?;
            let violations = r.check(&a, &b)?;
            let mut v = to_value(&r);
            v["violations"] = json!(violations);
            Ok(if violations.is_empty() { Outcome::Pass(v) } else { Outcome::Fail(v) })
        }
        Command::Pack { set_x, set_y, epsilon, set_a, random_a } => {
            let g = group(gl)?;
            let (x, y) = (parse_set(&g, set_x)?, parse_set(&g, set_y)?);
            let eps = parse_eps(epsilon)?;
            let a = match (set_a, random_a) {
                (Some(lit), _) => Some(parse_set(&g, lit)?),
                (None, true) => Some(random_subset(&g, gl.seed).a),
                (None, false) => None,
            };
            match a {
                None => {
                    let p = greedy_packing(&x, &y, eps)?;
                    let violations = p.check(&x, &y);
                    let mut v = to_value(&p);
                    v["violations"] = json!(violations);
                    Ok(if violations.is_empty() { Outcome::Pass(v) } else { Outcome::Fail(v) })
                }
                Some(a) => {
                    let out = corollary15_pipeline(&a, &x, &y, eps)?;
                    let mut v = json!({ "seed": gl.seed, "a": a, "result": out });
                    if let PipelineOutcome::Witnesses { y_prime, packing, .. } = &out {
                        let violations = packing.check(&x, y_prime);
                        v["violations"] = json!(violations);
                        if !violations.is_empty() {
                            return Ok(Outcome::Fail(v));
                        }
                    }
                    Ok(Outcome::Pass(v))
                }
            }
        }
        Command::Scan { set_a, set_x, set_y, random_sizes, epsilon, blocks } => scan(gl, set_a, set_x, set_y, random_sizes, epsilon, blocks),
        Command::Mc { kind, trials, epsilon, sizes, ks } => {
            let g = group(gl)?;
            let kind = match kind {
                McKind::Lemma10 => ExperimentKind::Lemma10,
                McKind::SigmaTail => ExperimentKind::SigmaTail,
                McKind::Restriction => ExperimentKind::Restriction,
            };
            let mut config = ExperimentConfig::new(g, kind);
            config.seed = gl.seed;
            if let Some(t) = trials {
                config.trials = *t;
            }
            if let Some(e) = epsilon {
                config.epsilon = parse_eps(e)?;
            }
            if let Some(s) = sizes {
                config.sizes = parse_list(s)?;
            }
            if let Some(k) = ks {
                config.ks = parse_list(k)?;
            }
            let report = harness::run(&config)?;
            let v = to_value(&report);
            Ok(if report.passed { Outcome::Pass(v) } else { Outcome::Fail(v) })
        }
        Command::Bounds { name, params } => Ok(Outcome::Pass(bounds_cmd::evaluate(name, params)?)),
        Command::Audit { mode, log_n, log_log_n, w, epsilon, c, c_prime, c1, find_threshold: search } => {
            let mode = match mode {
                AuditMode::General => CascadeMode::General,
                AuditMode::Exponent2 => CascadeMode::ExponentTwo,
            };
            let constants = CascadeConstants { c: *c, c_prime: *c_prime, c1: *c1 };
            if *search {
                let t = find_threshold(mode, *epsilon, constants)?;
                return Ok(Outcome::Pass(to_value(&t)));
            }
            let scale = match (log_n, log_log_n) {
                (Some(l), None) => Scale::LogN(*l),
                (None, Some(ll)) => Scale::LogLogN(*ll),
                _ => return Err(Failure::Usage("give exactly one of --logN and --loglogN".into())),
            };
            let input = AuditInput { mode, scale, w: *w, epsilon: *epsilon, constants };
            // failing rows are part of the report, not an error
            Ok(Outcome::Pass(to_value(&cascade_audit(&input)?)))
        }
        Command::WorstCase { set_a, floor } => {
            let g = group(gl)?;
            let mut config = ExperimentConfig::new(g.clone(), ExperimentKind::WorstCase);
            config.seed = gl.seed;
            config.sizes = vec![*floor];
            if let Some(lit) = set_a {
                config.a = Some(parse_set(&g, lit)?);
            }
            let report = harness::run(&config)?;
            let v = to_value(&report);
            Ok(if report.passed { Outcome::Pass(v) } else { Outcome::Fail(v) })
        }
    }
}

fn scan(
    gl: &Global,
    set_a: &Option<String>,
    set_x: &Option<String>,
    set_y: &Option<String>,
    random_sizes: &Option<String>,
    epsilon: &str,
    blocks: &Option<String>,
) -> CmdResult {
    use rand::seq::index;
    use rand::SeedableRng;

    let g = group(gl)?;
    let eps = parse_eps(epsilon)?;
    let a = match set_a {
        Some(lit) => parse_set(&g, lit)?,
        None => random_subset(&g, gl.seed).a,
    };
    let (x, y) = match (set_x, set_y, random_sizes) {
        (Some(x), Some(y), None) => (parse_set(&g, x)?, parse_set(&g, y)?),
        (None, None, Some(sizes)) => {
            let s = parse_list(sizes)?;
            let [nx, ny] = s[..] else {
                return Err(Failure::Usage("--random-sizes takes two sizes \"nx,ny\"".into()));
            };
            if nx == 0 || ny == 0 || nx > g.order() || ny > g.order() {
                return Err(Failure::Usage(format!("sizes must lie in 1..={}", g.order())));
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(harness::setup_seed(gl.seed));
            let x = GroupSubset::from_indices(&g, index::sample(&mut rng, g.order(), nx))?;
            let y = GroupSubset::from_indices(&g, index::sample(&mut rng, g.order(), ny))?;
            (x, y)
        }
        _ => return Err(Failure::Usage("give --set-x and --set-y, or --random-sizes".into())),
    };
    let whole = sigma(&a, &x, &y)?;
    let rows: Vec<Value> = row_sigmas(&a, &x, &y)?
        .into_iter()
        .map(|(yy, s)| json!({ "y": yy, "sigma": s.to_string() }))
        .collect();
    let mut v = json!({
        "seed": gl.seed,
        "group": g,
        "a": a,
        "x": x,
        "y": y,
        "deviation": whole,
        "epsilon": eps.to_string(),
        "rows": rows,
        "y_prime": lemma14_extract(&a, &x, &y, eps)?,
    });
    if let Some(b) = blocks {
        let lh = parse_list(b)?;
        let [lo, hi] = lh[..] else {
            return Err(Failure::Usage("--blocks takes \"lo,hi\"".into()));
        };
        let parts = split_blocks(&y, lo, hi)?;
        let block_sigmas = parts
            .iter()
            .map(|p| Ok(rational::to_f64(&sigma(&a, &x, p)?.sigma)))
            .collect::<Result<Vec<f64>, Error>>()?;
        v["blocks"] = to_value(&parts);
        v["block_sigmas"] = json!(block_sigmas);
    }
    Ok(Outcome::Pass(v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(&cli) {
        Ok(Outcome::Pass(v)) => (v, 0),
        Ok(Outcome::Fail(v)) => (v, 1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Property(msg)) => {
            eprintln!("property failure: {msg}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = output::write(&value, cli.global.format, cli.global.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
