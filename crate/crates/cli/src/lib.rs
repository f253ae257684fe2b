//! Argument handling and command execution for the `dyngraph` binary.
//!
//! Every written artifact starts with a comment header naming the tool
//! version and the full effective command line, with all defaults filled in.
//! Feeding that line back through [`RunConfig::parse_line`] and [`run`]
//! reproduces the artifact byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dyngraph::mapfamily::format_map_list;
use dyngraph::metrics::full_report_with;
use dyngraph::numtheory::factorize;
use dyngraph::survey::{self, FamilyTemplate};
use dyngraph::verify::{self, Verdict, CLAIM_IDS};
use dyngraph::{
    build_graph, parse_map_list, GraphSpec, MapFamily, NuEstimator, SpaceTemplate, StateSpace,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SCAN_KINDS: &[&str] = &[
    "locus",
    "ca-mandelbrot",
    "euler-seq",
    "perm-lambda",
    "artin-census",
];

#[derive(Debug, Parser)]
#[command(
    name = "dyngraph",
    version,
    about = "Graphs generated by maps on finite rings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph and write it as an edge list (.edges) or DOT (.dot).
    Gen(Opts),
    /// Build a graph and write its statistics as JSON.
    Stats(Opts),
    /// Check a claim over a parameter range.
    Verify {
        claim: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run a parameter sweep.
    Scan {
        kind: String,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Args)]
pub struct Opts {
    /// State space, e.g. `zn:31`, `poly:5:6`; a template such as `zn` for `scan locus`.
    #[arg(long)]
    pub space: Option<String>,
    /// Comma-separated map expressions.
    #[arg(long)]
    pub maps: Option<String>,
    /// Output file; repeatable for `gen`.
    #[arg(long)]
    pub out: Vec<PathBuf>,
    #[arg(long)]
    pub nmax: Option<u64>,
    #[arg(long)]
    pub pmax: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Clustering estimator feeding lambda: `local` or `transitivity`.
    #[arg(long)]
    pub nu: Option<NuEstimator>,
    /// First exponent for `verify power-pair`.
    #[arg(long)]
    pub a: Option<u32>,
    /// Second exponent for `verify power-pair`.
    #[arg(long)]
    pub b: Option<u32>,
    /// Comma-separated prime set for `verify power-pair`.
    #[arg(long)]
    pub primes: Option<String>,
    /// Extra moduli for `verify fermat`.
    #[arg(long)]
    pub extras: Option<String>,
    /// Bit-vector width for `scan ca-mandelbrot`.
    #[arg(long)]
    pub width: Option<u32>,
    /// Modulus for `scan perm-lambda`; prime count for `scan artin-census`.
    #[arg(long)]
    pub n: Option<u64>,
}

/// A fully resolved invocation. Only options used by the command are kept,
/// and each of them holds an explicit value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    /// `gen`, `stats`, `verify`, or `scan`.
    pub command: String,
    /// Claim id or scan kind.
    pub target: Option<String>,
    pub opts: Opts,
}

fn csv_u64(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .with_context(|| format!("bad integer `{s}`"))
        })
        .collect()
}

fn join_u64(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn canonical_space(spec: &str) -> Result<String> {
    let space: StateSpace = spec.parse()?;
    Ok(space.to_string())
}

fn canonical_maps(list: &str) -> Result<String> {
    Ok(format_map_list(&parse_map_list(list)?))
}

impl RunConfig {
    /// Validates names and fills in every default the command depends on.
    pub fn resolve(command: Command) -> Result<Self> {
        let (command, target, given) = match command {
            Command::Gen(o) => ("gen", None, o),
            Command::Stats(o) => ("stats", None, o),
            Command::Verify { claim, opts } => ("verify", Some(claim), opts),
            Command::Scan { kind, opts } => ("scan", Some(kind), opts),
        };
        let mut o = Opts::default();
        match (command, target.as_deref()) {
            ("gen" | "stats", _) => {
                let space = given.space.ok_or_else(|| anyhow!("--space is required"))?;
                let maps = given.maps.ok_or_else(|| anyhow!("--maps is required"))?;
                o.space = Some(canonical_space(&space)?);
                o.maps = Some(canonical_maps(&maps)?);
                if command == "stats" {
                    o.nu = Some(given.nu.unwrap_or_default());
                }
            }
            ("verify", Some(claim)) => match claim {
                "lemma1" => o.nmax = Some(given.nmax.unwrap_or(4096)),
                "artin" => o.pmax = Some(given.pmax.unwrap_or(2000)),
                "fermat" => {
                    o.nmax = Some(given.nmax.unwrap_or(1000));
                    let extras = match given.extras {
                        Some(e) => csv_u64(&e)?,
                        None => vec![65537],
                    };
                    o.extras = Some(join_u64(&extras));
                }
                "collatz-triangles" => o.pmax = Some(given.pmax.unwrap_or(499)),
                "pierpont" => o.nmax = Some(given.nmax.unwrap_or(600)),
                "power-pair" => {
                    let a = given.a.unwrap_or(2);
                    let b = given.b.unwrap_or(5);
                    let primes = match given.primes {
                        Some(p) => csv_u64(&p)?,
                        None => {
                            let mut p: Vec<u64> = factorize(a as u64)
                                .primes()
                                .chain(factorize(b as u64).primes())
                                .collect();
                            p.sort_unstable();
                            p.dedup();
                            p
                        }
                    };
                    o.a = Some(a);
                    o.b = Some(b);
                    o.primes = Some(join_u64(&primes));
                    o.nmax = Some(given.nmax.unwrap_or(101));
                }
                "affine-table" => o.nmax = Some(given.nmax.unwrap_or(200)),
                "collatz-connected" => o.nmax = Some(given.nmax.unwrap_or(20_000)),
                "matrix-example" => {}
                other => bail!(
                    "unknown claim `{other}`; expected one of {}",
                    CLAIM_IDS.join(", ")
                ),
            },
            ("scan", Some(kind)) => match kind {
                "locus" => {
                    let space = given.space.ok_or_else(|| anyhow!("--space is required"))?;
                    let maps = given.maps.ok_or_else(|| anyhow!("--maps is required"))?;
                    let template: SpaceTemplate = space.parse()?;
                    o.space = Some(template.to_string());
                    o.maps = Some(canonical_maps(&maps)?);
                    o.nmax = Some(given.nmax.unwrap_or(100));
                }
                "ca-mandelbrot" => o.width = Some(given.width.unwrap_or(9)),
                "euler-seq" => o.nmax = Some(given.nmax.unwrap_or(23)),
                "perm-lambda" => {
                    o.n = Some(given.n.unwrap_or(100));
                    o.trials = Some(given.trials.unwrap_or(50));
                    o.seed = Some(given.seed.unwrap_or(0));
                    o.nu = Some(given.nu.unwrap_or_default());
                }
                "artin-census" => o.n = Some(given.n.unwrap_or(10_000)),
                other => bail!(
                    "unknown scan `{other}`; expected one of {}",
                    SCAN_KINDS.join(", ")
                ),
            },
            _ => unreachable!("verify and scan carry a target"),
        }
        o.out = given.out;
        if command != "gen" && o.out.len() > 1 {
            bail!("{command} writes a single file");
        }
        Ok(RunConfig {
            command: command.to_string(),
            target,
            opts: o,
        })
    }

    /// Parses and resolves a command line, without the program name.
    pub fn parse_args<I, S>(args: I) -> Result<(Self, Option<usize>)>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let argv = std::iter::once("dyngraph".to_string()).chain(args.into_iter().map(Into::into));
        let cli = Cli::try_parse_from(argv)?;
        Ok((Self::resolve(cli.command)?, cli.workers))
    }

    /// Parses the textual form produced by [`RunConfig::to_line`].
    pub fn parse_line(line: &str) -> Result<Self> {
        Ok(Self::parse_args(split_line(line)?)?.0)
    }

    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![self.command.clone()];
        args.extend(self.target.clone());
        let o = &self.opts;
        let mut push = |flag: &str, value: Option<String>| {
            if let Some(v) = value {
                args.push(format!("--{flag}"));
                args.push(v);
            }
        };
        push("space", o.space.clone());
        push("maps", o.maps.clone());
        push("nmax", o.nmax.map(|v| v.to_string()));
        push("pmax", o.pmax.map(|v| v.to_string()));
        push("seed", o.seed.map(|v| v.to_string()));
        push("trials", o.trials.map(|v| v.to_string()));
        push("nu", o.nu.map(|v| v.to_string()));
        push("a", o.a.map(|v| v.to_string()));
        push("b", o.b.map(|v| v.to_string()));
        push("primes", o.primes.clone());
        push("extras", o.extras.clone());
        push("width", o.width.map(|v| v.to_string()));
        push("n", o.n.map(|v| v.to_string()));
        for p in &o.out {
            push("out", Some(p.display().to_string()));
        }
        args
    }

    /// Shell-style command line; arguments with unusual characters are
    /// single-quoted.
    pub fn to_line(&self) -> String {
        self.to_args()
            .iter()
            .map(|a| quote(a))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Header lines, without comment markers.
    pub fn header(&self) -> Vec<String> {
        vec![
            format!("dyngraph {VERSION}"),
            format!("config: {}", self.to_line()),
        ]
    }

    /// Recovers the configuration from an artifact's header.
    pub fn from_header(text: &str) -> Result<Self> {
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix("# config: "))
            .ok_or_else(|| anyhow!("no config line in header"))?;
        Self::parse_line(line)
    }
}

fn quote(arg: &str) -> String {
    let plain = !arg.is_empty()
        && arg
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "_-.,:/+=@%".contains(c));
    if plain {
        arg.to_string()
    } else {
        format!("'{}'", arg.replace('\'', r"'\''"))
    }
}

/// Splits a line produced by [`quote`]-joined arguments.
fn split_line(line: &str) -> Result<Vec<String>> {
    let mut args = Vec::new();
    let mut cur = String::new();
    let mut in_arg = false;
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        match c {
            '\'' => {
                in_arg = true;
                loop {
                    match chars.next() {
                        Some('\'') => break,
                        Some(ch) => cur.push(ch),
                        None => bail!("unterminated quote"),
                    }
                }
            }
            '\\' => {
                in_arg = true;
                cur.push(chars.next().ok_or_else(|| anyhow!("dangling escape"))?);
            }
            c if c.is_whitespace() => {
                if in_arg {
                    args.push(std::mem::take(&mut cur));
                    in_arg = false;
                }
            }
            c => {
                in_arg = true;
                cur.push(c);
            }
        }
    }
    if in_arg {
        args.push(cur);
    }
    Ok(args)
}

/// One artifact: its destination (`None` for standard output) and bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// False iff a verdict failed.
    pub passed: bool,
}

fn hash_comments(lines: &[String]) -> String {
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn single_output(config: &RunConfig, contents: String) -> Vec<Artifact> {
    vec![Artifact {
        path: config.opts.out.first().cloned(),
        contents,
    }]
}

fn family(config: &RunConfig) -> Result<MapFamily> {
    let space: StateSpace = config.opts.space.as_deref().unwrap().parse()?;
    Ok(MapFamily::parse(
        config.opts.maps.as_deref().unwrap(),
        space,
    )?)
}

/// Executes a resolved configuration without touching the file system.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    let header = config.header();
    let o = &config.opts;
    let mut passed = true;
    let artifacts = match config.command.as_str() {
        "gen" => {
            let spec = GraphSpec::new(family(config)?);
            let g = build_graph(&spec)?;
            if o.out.is_empty() {
                vec![Artifact {
                    path: None,
                    contents: hash_comments(&header) + &g.export_edge_list(),
                }]
            } else {
                o.out
                    .iter()
                    .map(|p| {
                        let body = match extension(p) {
                            "edges" => g.export_edge_list(),
                            "dot" => g.export_dot(Some(&spec.labels())),
                            other => bail!("unknown graph format `.{other}`; use .edges or .dot"),
                        };
                        Ok(Artifact {
                            path: Some(p.clone()),
                            contents: hash_comments(&header) + &body,
                        })
                    })
                    .collect::<Result<_>>()?
            }
        }
        "stats" => {
            let g = build_graph(&GraphSpec::new(family(config)?))?;
            let report = full_report_with(&g, o.nu.unwrap());
            single_output(config, hash_comments(&header) + &report.to_json() + "\n")
        }
        "verify" => {
            let v = run_verify(config)?;
            passed = v.passed;
            single_output(config, hash_comments(&header) + &v.to_string() + "\n")
        }
        "scan" => single_output(config, run_scan(config, &header)?),
        other => bail!("unknown command `{other}`"),
    };
    Ok(Outcome { artifacts, passed })
}

fn run_verify(config: &RunConfig) -> Result<Verdict> {
    let o = &config.opts;
    let v = match config.target.as_deref().unwrap() {
        "lemma1" => verify::verify_lemma1(o.nmax.unwrap())?,
        "artin" => verify::verify_artin(o.pmax.unwrap())?,
        "fermat" => {
            verify::verify_fermat(o.nmax.unwrap(), &csv_u64(o.extras.as_deref().unwrap())?)?
        }
        "collatz-triangles" => verify::verify_collatz_triangles(o.pmax.unwrap())?,
        "pierpont" => verify::verify_pierpont(o.nmax.unwrap())?,
        "power-pair" => verify::verify_power_pair(
            o.a.unwrap(),
            o.b.unwrap(),
            &csv_u64(o.primes.as_deref().unwrap())?,
            o.nmax.unwrap(),
        )?,
        "affine-table" => verify::verify_affine_table(o.nmax.unwrap())?,
        "collatz-connected" => verify::verify_collatz_connected(o.nmax.unwrap())?,
        "matrix-example" => verify::verify_matrix_example()?,
        other => bail!("unknown claim `{other}`"),
    };
    Ok(v)
}

fn run_scan(config: &RunConfig, header: &[String]) -> Result<String> {
    let o = &config.opts;
    let out = match config.target.as_deref().unwrap() {
        "locus" => {
            let space: SpaceTemplate = o.space.as_deref().unwrap().parse()?;
            let template = FamilyTemplate::new(space, parse_map_list(o.maps.as_deref().unwrap())?);
            let start = template
                .min_param()
                .ok_or_else(|| anyhow!("maps do not apply to any small `{space}` space"))?;
            survey::connectivity_locus(&template, start..=o.nmax.unwrap())?.to_csv(header)
        }
        "ca-mandelbrot" => {
            let grid = survey::ca_mandelbrot(o.width.unwrap())?;
            match o.out.first().map(|p| extension(p)) {
                Some("csv") => grid.to_csv(header),
                Some("pbm") | None => grid.to_pbm(header)?,
                Some(other) => bail!("unknown grid format `.{other}`; use .pbm or .csv"),
            }
        }
        "euler-seq" => {
            let seq = survey::euler_sequence(o.nmax.unwrap())?;
            let mut s = hash_comments(header);
            s.push_str("n,euler\n");
            for (i, chi) in seq.iter().enumerate() {
                writeln!(s, "{},{chi}", i + 1).unwrap();
            }
            s
        }
        "perm-lambda" => survey::permutation_lambda(
            o.n.unwrap(),
            o.trials.unwrap(),
            o.seed.unwrap(),
            o.nu.unwrap(),
        )?
        .to_csv(header),
        "artin-census" => {
            let count = usize::try_from(o.n.unwrap())?;
            let c = survey::artin_census(count)?;
            let mut s = hash_comments(header);
            s.push_str("odd_primes,primitive,fraction\n");
            writeln!(
                s,
                "{},{},{}",
                c.odd_primes,
                c.count,
                survey::sig9(c.fraction)
            )
            .unwrap();
            s
        }
        other => bail!("unknown scan `{other}`"),
    };
    Ok(out)
}

/// Runs on a pool of `workers` threads, writes artifacts, and reports whether
/// every verdict passed.
pub fn run(config: &RunConfig, workers: usize) -> Result<bool> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    let outcome = pool.install(|| execute(config))?;
    for a in &outcome.artifacts {
        match &a.path {
            Some(p) => std::fs::write(p, &a.contents)
                .with_context(|| format!("writing {}", p.display()))?,
            None => print!("{}", a.contents),
        }
    }
    if config.command == "verify" && !config.opts.out.is_empty() {
        // the verdict also goes to the terminal
        if let Some(line) = outcome.artifacts[0].contents.lines().last() {
            println!("{line}");
        }
    }
    Ok(outcome.passed)
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}
