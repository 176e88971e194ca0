//! `predim`: command-line front end.
//!
//! Every command prints one JSON document on stdout and logs to stderr.
//! Exit codes: 0 ok, 1 verification failed, 2 usage, 3 budget, 4 precision.

mod output;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use predim::closure;
use predim::constructions::{
    self, approach_zero, build_cn_with, dense_find, pairs_witness, find_seed, rank0_witness,
    BlockOptions, SearchBudget,
};
use predim::generic;
use predim::oracle;
use predim::rational;
use predim::sampler::{self, SampleSpec};
use predim::suites;
use predim::{AlphaSpec, ElemSet, Error, Predim, Structure};

use output::{cert_json, dim_value, elems, Failure, Outcome};

#[derive(Parser)]
#[command(name = "predim", version, about = "Exact predimension calculus for generic structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct AlphaArgs {
    /// Exact rational α, e.g. 5/11.
    #[arg(long, conflicts_with = "alpha_interval")]
    alpha: Option<String>,
    /// Irrational α known to lie in the open interval (LO, HI).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    alpha_interval: Option<Vec<String>>,
}

impl AlphaArgs {
    fn spec(&self) -> Result<AlphaSpec, Failure> {
        match (&self.alpha, &self.alpha_interval) {
            (Some(a), None) => Ok(AlphaSpec::parse_exact(a)?),
            (None, Some(v)) => Ok(AlphaSpec::irrational(rational::parse(&v[0])?, rational::parse(&v[1])?)?),
            _ => Err(Failure::usage("one of --alpha or --alpha-interval is required")),
        }
    }
}

#[derive(Args, Clone, Default)]
struct Outputs {
    /// Write the resulting structure as canonical JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the resulting structure in Graphviz format.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Largest structure the search may build.
    #[arg(long, default_value_t = SearchBudget::default().max_size)]
    budget: usize,
    /// Largest number of distinct values the search may settle.
    #[arg(long, default_value_t = SearchBudget::default().max_nodes)]
    max_nodes: usize,
}

impl SearchArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_size: self.budget,
            max_nodes: self.max_nodes,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// δ of a structure and d of a base set inside it.
    Dim {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated element ids (empty by default).
        #[arg(long, default_value = "")]
        base: String,
        /// Use the exhaustive reference implementation.
        #[arg(long)]
        oracle: bool,
        /// Also decide whether the extension base ≤ structure is primitive.
        #[arg(long)]
        primitive: bool,
    },
    /// Intrinsic closure of a base set.
    Icl {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "")]
        base: String,
        #[arg(long)]
        oracle: bool,
    },
    /// A verified member of the class 𝒜 for α.
    Seed {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Derived constructions.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Witness structures glued from blocks.
    Witness {
        #[command(subcommand)]
        what: Witness,
    },
    /// Finite approximation of the generic structure.
    Generic {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = generic::DEFAULT_MAX_EXT)]
        max_ext: usize,
        #[arg(long)]
        seed: u64,
        /// Pending obligations to probe and random subsets to close in the audit.
        #[arg(long, default_value_t = 50)]
        audit: usize,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Random graph G(n, c·n^-α) with an optional subgraph census.
    Sample {
        #[arg(long)]
        n: u32,
        /// Exponent α (exact rational).
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        coeff: String,
        #[arg(long)]
        seed: u64,
        /// Pattern name (vertex, edge, K3, K4, K5, C4, P3) or a structure file.
        #[arg(long)]
        census: Option<String>,
        /// Partial maps the census may explore.
        #[arg(long, default_value_t = 100_000_000)]
        census_budget: u64,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Randomized property suites.
    Check {
        suite: Suite,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Largest random structure (axioms and closure suites).
        #[arg(long, default_value_t = 12)]
        max_size: u32,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// A primitive block C over {x, y} with 0 ≤ δ(C/{x,y}) < 1/n.
    Cn {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        search: SearchArgs,
        /// Try a direct search over small graphs first.
        #[arg(long)]
        direct: bool,
        /// Prefer blocks with δ(C/{x,y}) > 0.
        #[arg(long)]
        positive: bool,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// An element of X in (-1/m, 0].
    ApproachZero {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        m: u64,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// An element of X strictly inside (LO, HI).
    DenseFind {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, allow_hyphen_values = true)]
        lo: String,
        #[arg(long, allow_hyphen_values = true)]
        hi: String,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        outputs: Outputs,
    },
}

#[derive(Subcommand)]
enum Witness {
    /// N blocks glued over {x, y, c}.
    Rank0 {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        blocks: u64,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// N blocks over disjoint pairs, sharing only c.
    Pairs {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        blocks: u64,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        outputs: Outputs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Axioms,
    Identities,
    Closure,
    Amalgamation,
}

fn read_structure(path: &PathBuf) -> Result<Structure, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(predim::io::from_json(&text)?)
}

fn parse_base(s: &str) -> Result<ElemSet, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::usage(format!("bad element id `{t}`"))))
        .collect()
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Dim {
            alpha,
            input,
            base,
            oracle: use_oracle,
            primitive,
        } => {
            let a = alpha.spec()?;
            let s = read_structure(&input)?;
            let base = parse_base(&base)?;
            let pd = Predim::new(a.clone());
            let (value, minimizer) = if use_oracle {
                let (v, mins) = oracle::d_in(&pd, &s, &base)?;
                let least = mins.iter().fold(s.elements().clone(), |acc, m| acc.intersection(m).copied().collect());
                (v, least)
            } else {
                let r = pd.d_in(&s, &base)?;
                (r.value, r.minimizer)
            };
            let mut payload = json!({
                "alpha": a.to_string(),
                "method": if use_oracle { "oracle" } else { "engine" },
                "delta": dim_value(&pd.delta(&s), &a),
                "delta_base": dim_value(&pd.delta_of(&s, &base)?, &a),
                "d": dim_value(&value, &a),
                "minimizer": elems(&minimizer),
                "strong": minimizer == base,
            });
            if primitive {
                let p = if use_oracle {
                    oracle::is_primitive(&pd, &base, &s)
                } else {
                    closure::is_primitive(&pd, &base, &s)
                };
                payload["primitive"] = match p {
                    Ok(b) => json!(b),
                    Err(Error::NotStrong) => json!(null),
                    Err(e) => return Err(e.into()),
                };
            }
            Ok(Outcome::ok(payload))
        }
        Command::Icl {
            alpha,
            input,
            base,
            oracle: use_oracle,
        } => {
            let a = alpha.spec()?;
            let s = read_structure(&input)?;
            let base = parse_base(&base)?;
            let pd = Predim::new(a.clone());
            let payload = if use_oracle {
                let c = oracle::icl(&pd, &s, &base)?;
                json!({"alpha": a.to_string(), "method": "oracle", "closure": elems(&c), "converged": true})
            } else {
                let r = closure::icl(&pd, &s, &base)?;
                let mut v = serde_json::to_value(&r).expect("serializable");
                v["alpha"] = json!(a.to_string());
                v["method"] = json!("engine");
                v
            };
            Ok(Outcome::ok(payload))
        }
        Command::Seed { alpha, outputs } => {
            let a = alpha.spec()?;
            let x = find_seed(&a)?;
            let report = constructions::verify::verify(&x.pointed, &a)?;
            let payload = json!({
                "alpha": a.to_string(),
                "certificate": cert_json(&x, &a),
                "report": report,
            });
            Outcome::with_structure(payload, &x.pointed.s, &outputs, report.member)
        }
        Command::Construct { what } => construct(what),
        Command::Witness { what } => witness(what),
        Command::Generic {
            alpha,
            steps,
            max_ext,
            seed,
            audit,
            outputs,
        } => {
            let a = alpha.spec()?;
            let g = generic::build(Predim::new(a), steps, max_ext, seed)?;
            let ext = generic::audit_extension(&g, audit)?;
            let cl = generic::audit_finite_closures(&g, audit, seed)?;
            let ok = ext.ok() && cl.ok();
            let payload = json!({
                "summary": g.summary(),
                "extension_audit": ext,
                "closure_audit": cl,
            });
            Outcome::with_structure(payload, &g.m, &outputs, ok)
        }
        Command::Sample {
            n,
            alpha,
            coeff,
            seed,
            census,
            census_budget,
            outputs,
        } => {
            let spec = SampleSpec {
                n,
                alpha: rational::parse(&alpha)?,
                coeff: rational::parse(&coeff)?,
                seed,
            };
            let p = spec.probability()?;
            let m = sampler::sample(&spec)?;
            let mut payload = json!({
                "spec": spec,
                "p": p,
                "edges": m.e_count(),
            });
            if let Some(name) = census {
                let h = match sampler::named_pattern(&name) {
                    Some(h) => h,
                    None => read_structure(&PathBuf::from(&name))?,
                };
                let count = sampler::census(&m, &h, census_budget)?;
                let expected = sampler::expected_count(&spec, &h)?;
                payload["pattern"] = json!(name);
                payload["count"] = json!(count);
                payload["expected"] = json!(expected);
            }
            Outcome::with_structure(payload, &m, &outputs, true)
        }
        Command::Check {
            suite,
            seed,
            trials,
            max_size,
        } => {
            let r = match suite {
                Suite::Axioms => suites::axiom_suite(trials, seed, max_size)?,
                Suite::Identities => suites::identity_suite(trials, seed)?,
                Suite::Closure => suites::closure_suite(trials, seed, max_size)?,
                Suite::Amalgamation => suites::amalgamation_suite(trials, seed)?,
            };
            let ok = r.ok();
            eprintln!("{}: {}/{} trials passed", r.suite, r.passed, r.trials);
            Ok(Outcome::new(serde_json::to_value(&r).expect("serializable"), ok))
        }
    }
}

fn construct(what: Construct) -> Result<Outcome, Failure> {
    match what {
        Construct::Cn {
            alpha,
            n,
            search,
            direct,
            positive,
            outputs,
        } => {
            let a = alpha.spec()?;
            let opts = BlockOptions {
                prefer_positive: positive,
                direct_search: direct,
            };
            let c = build_cn_with(&a, n, search.budget(), opts)?;
            let ok = c.ok();
            let mut payload = serde_json::to_value(&c).expect("serializable");
            payload["alpha"] = json!(a.to_string());
            payload["delta_value"] = dim_value(&c.delta, &a);
            Outcome::with_structure(payload, c.structure(), &outputs, ok)
        }
        Construct::ApproachZero {
            alpha,
            m,
            search,
            outputs,
        } => {
            let a = alpha.spec()?;
            let x = approach_zero(&a, m, search.budget())?;
            let payload = json!({"alpha": a.to_string(), "m": m, "certificate": cert_json(&x, &a)});
            Outcome::with_structure(payload, &x.pointed.s, &outputs, x.is_member())
        }
        Construct::DenseFind {
            alpha,
            lo,
            hi,
            search,
            outputs,
        } => {
            let a = alpha.spec()?;
            let x = dense_find(&a, &rational::parse(&lo)?, &rational::parse(&hi)?, search.budget())?;
            let payload = json!({"alpha": a.to_string(), "lo": lo, "hi": hi, "certificate": cert_json(&x, &a)});
            Outcome::with_structure(payload, &x.pointed.s, &outputs, x.is_member())
        }
    }
}

fn witness(what: Witness) -> Result<Outcome, Failure> {
    match what {
        Witness::Rank0 {
            alpha,
            blocks,
            search,
            outputs,
        } => {
            let a = alpha.spec()?;
            let r = rank0_witness(&a, blocks, search.budget())?;
            let mut payload = serde_json::to_value(&r).expect("serializable");
            payload["alpha"] = json!(a.to_string());
            payload["ok"] = json!(r.ok());
            for key in ["d_c_over_xy", "d_c_over_x", "d_c_over_y"] {
                let v: predim::DimValue = serde_json::from_value(payload[key].clone()).expect("dim value");
                payload[format!("{key}_value")] = dim_value(&v, &a);
            }
            Outcome::with_structure(payload, &r.structure, &outputs, r.ok())
        }
        Witness::Pairs {
            alpha,
            blocks,
            search,
            outputs,
        } => {
            let a = alpha.spec()?;
            let r = pairs_witness(&a, blocks, search.budget())?;
            let mut payload = serde_json::to_value(&r).expect("serializable");
            payload["alpha"] = json!(a.to_string());
            payload["ok"] = json!(r.ok());
            payload["d_all_value"] = dim_value(&r.d_all, &a);
            Outcome::with_structure(payload, &r.structure, &outputs, r.ok())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (payload, code): (Value, u8) = match run(cli) {
        Ok(o) => {
            if !o.ok {
                eprintln!("verification failed");
            }
            (o.payload, if o.ok { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            (json!({"error": {"kind": f.kind, "message": f.message}}), f.code)
        }
    };
    // a closed pipe on stdout is not an error of the command
    let _ = writeln!(std::io::stdout().lock(), "{}", output::with_schema(payload));
    ExitCode::from(code)
}
