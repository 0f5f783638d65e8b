//! `sumsets`: command-line front end for the lattice-sumsets library.
//!
//! Exit codes: 0 success, 1 a verifier or sweep reported a violation,
//! 2 input or usage error, 3 budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_sumsets::cover::{freiman_bilu_cover_bounding_box, verify_fibre_inequality};
use lattice_sumsets::oracles::{find_parallelepiped, lacunary_example, max_parallelepiped_dimension, min_doubling_search};
use lattice_sumsets::progression::{box_isomorphism, freiman_dimension, verify_freiman_hom};
use lattice_sumsets::report::parse_exact;
use lattice_sumsets::sets::{affine_dimension, doubling_constant, minkowski_sum_with, parse_point_list, project, Backend};
use lattice_sumsets::sweep::{run_sweep, summary_lines, SweepConfig, SWEEPS};
use lattice_sumsets::verify::{
    plunnecke_witness, verify_box_doubling, verify_compressed_sum_bound, verify_discrete_bm, verify_freiman_lemma,
    verify_parallelepiped_doubling,
};
use lattice_sumsets::{
    compress, cube_sum_identity, down_closure, freiman_bilu_cover, Budget, Correspondence, CoverOutcome, Error, GridBox,
    PointSet, Progression, Rational, VerificationReport,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "sumsets", version, about = "Exact sumset combinatorics on integer lattices")]
struct Cli {
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Largest enumeration (progression points, subsets, search steps).
    #[arg(long, global = true, value_name = "N")]
    max_enum: Option<u64>,
    /// Largest set whose subsets are enumerated exhaustively.
    #[arg(long, global = true, value_name = "N")]
    max_subset: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minkowski sum A + B.
    Sumset {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
    },
    /// Doubling constant |A+A|/|A|.
    Doubling { set: PathBuf },
    /// Zero every coordinate outside the given 1-based axes.
    Project {
        set: PathBuf,
        /// Comma-separated 1-based axes; empty keeps none.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        axes: String,
    },
    /// Compression along one 1-based axis.
    Compress {
        set: PathBuf,
        #[arg(long)]
        axis: usize,
    },
    /// Compress along every axis in turn.
    Downclose { set: PathBuf },
    /// Check |X + {0,1}^d| = sum of projection sizes for a down-set X.
    Identity { set: PathBuf },
    /// Whether a progression is t-proper.
    Proper {
        prog: PathBuf,
        #[arg(long, default_value_t = 1)]
        t: u64,
    },
    /// Coefficient image of A in a 2-proper progression.
    Phi {
        #[arg(long)]
        prog: PathBuf,
        #[arg(long)]
        set: PathBuf,
    },
    /// Freiman dimension of A.
    FreimanDim { set: PathBuf },
    /// Run one inequality checker.
    Verify {
        #[command(subcommand)]
        statement: Statement,
    },
    /// Cover A by translates of a low-dimensional progression.
    Cover {
        #[arg(long)]
        set: PathBuf,
        /// 2-proper progression containing A; defaults to the bounding box.
        #[arg(long)]
        prog: Option<PathBuf>,
        /// Rational in (0, 1], written p/q.
        #[arg(long)]
        epsilon: String,
    },
    /// Exhaustive searches.
    Search {
        #[command(subcommand)]
        search: Search,
    },
    /// Constructed example sets.
    Example {
        #[command(subcommand)]
        example: Example,
    },
    /// Run a named property sweep.
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum Statement {
    /// |A+A| >= 2^d|A| + prod(2L-1) - prod(2L) for A in a box.
    BoxDoubling {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_name = "L1,L2,...")]
        r#box: String,
    },
    /// |X+Y+{0,1}^d| >= 2^d min(|X|,|Y|).
    DiscreteBm {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        d: usize,
    },
    /// |A+B| >= 2^d min(|A|,|B|) - sum of proper projections of X+Y.
    CompressedSum {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// |A+A| >= (d+1)|A| - d(d+1)/2 with d the Freiman dimension.
    FreimanLemma {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value = "1")]
        epsilon: String,
    },
    /// |A+A|^2 >= 2^d |A|^2 for the largest parallelepiped dimension d.
    Parallelepiped {
        #[arg(long)]
        set: PathBuf,
    },
    /// Minimize |B+A+A|/|B| over subsets B and compare with sigma^2.
    Plunnecke {
        #[arg(long)]
        set: PathBuf,
    },
    /// Whether a pointwise correspondence preserves additive quadruples.
    FreimanHom {
        /// Source points, in correspondence order.
        #[arg(long)]
        from: PathBuf,
        /// Image points, line by line matching --from.
        #[arg(long)]
        to: PathBuf,
    },
    /// Fibre inequality for a set in a box with non-increasing sides.
    Fibre {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_name = "L1,L2,...")]
        r#box: String,
        #[arg(long)]
        l: usize,
    },
}

#[derive(Subcommand)]
enum Search {
    /// Lexicographically first non-degenerate parallelepiped, or the largest.
    Parallelepiped {
        #[arg(long)]
        set: PathBuf,
        /// Dimension to look for; omitted means the largest.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Size-n subset of a box with least doubling.
    MinDoubling {
        #[arg(long, value_name = "L1,L2,...")]
        r#box: String,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum Example {
    /// Union of K blocks x_i + {1..m} with lacunary x_i.
    Lacunary {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep id; omit with --list.
    id: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    max_size: Option<usize>,
    /// List sweep ids.
    #[arg(long)]
    list: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Sparse,
    Grid,
    Auto,
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_set(path: &Path) -> Result<PointSet, Failure> {
    read(path)?.parse::<PointSet>().map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_prog(path: &Path) -> Result<Progression, Failure> {
    Progression::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn rational(s: &str) -> Result<Rational, Failure> {
    parse_exact(s).ok_or_else(|| Failure::Usage(format!("expected an exact rational p/q, got {s:?}")))
}

fn grid_box(s: &str) -> Result<GridBox, Failure> {
    Ok(s.parse::<GridBox>()?)
}

struct Out {
    json: bool,
}

impl Out {
    fn set(&self, s: &PointSet) {
        if self.json {
            println!("{}", json!({ "points": s, "size": s.len() }));
        } else {
            print!("{s}");
        }
    }

    fn value(&self, v: Value, text: &str) {
        if self.json {
            println!("{v}");
        } else {
            println!("{text}");
        }
    }

    fn report(&self, r: &VerificationReport) -> bool {
        if self.json {
            println!("{}", r.to_json());
        } else {
            print!("{r}");
        }
        r.passed()
    }

    fn cover(&self, c: &CoverOutcome) -> bool {
        if self.json {
            println!("{}", c.to_json());
        } else {
            println!("base");
            print!("{}", c.cover.base);
            println!("count {}", c.cover.count());
            for o in &c.cover.offsets {
                println!("offset {o}");
            }
            for (k, v) in &c.parameters {
                println!("{k:<24}{v}");
            }
            for r in &c.checks {
                println!();
                print!("{r}");
            }
        }
        c.passed()
    }
}

fn parse_axes(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => Err(Failure::Usage(format!("bad axis {t:?}; axes are 1-based"))),
        })
        .collect()
}

fn one_based(axis: usize) -> Result<usize, Failure> {
    axis.checked_sub(1).ok_or_else(|| Failure::Usage("axes are 1-based".into()))
}

fn run(cli: Cli) -> Run {
    let mut budget = Budget::default();
    if let Some(n) = cli.max_enum {
        budget.max_enum = n;
    }
    if let Some(n) = cli.max_subset {
        budget.max_subset = n;
    }
    let out = Out { json: cli.json };
    match cli.command {
        Command::Sumset { a, b, backend } => {
            let backend = match backend {
                BackendArg::Sparse => Backend::Sparse,
                BackendArg::Grid => Backend::Grid,
                BackendArg::Auto => Backend::Auto,
            };
            out.set(&minkowski_sum_with(&read_set(&a)?, &read_set(&b)?, backend)?);
        }
        Command::Doubling { set } => {
            let a = read_set(&set)?;
            let k = doubling_constant(&a)?;
            let text = lattice_sumsets::report::format_exact(&k);
            out.value(json!({ "sigma": text, "|A|": a.len() }), &text);
        }
        Command::Project { set, axes } => out.set(&project(&read_set(&set)?, &parse_axes(&axes)?)?),
        Command::Compress { set, axis } => out.set(&compress(&read_set(&set)?, one_based(axis)?)?),
        Command::Downclose { set } => out.set(&down_closure(&read_set(&set)?)?),
        Command::Identity { set } => return Ok(out.report(&cube_sum_identity(&read_set(&set)?)?)),
        Command::Proper { prog, t } => {
            if t == 0 {
                return Err(Failure::Usage("t must be positive".into()));
            }
            let ok = read_prog(&prog)?.is_t_proper(t, &budget)?;
            out.value(json!({ "t": t, "proper": ok }), &ok.to_string());
        }
        Command::Phi { prog, set } => out.set(&box_isomorphism(&read_prog(&prog)?, &read_set(&set)?, &budget)?),
        Command::FreimanDim { set } => {
            let a = read_set(&set)?;
            let d = freiman_dimension(&a, &budget)?;
            let affine = affine_dimension(&a)?;
            out.value(json!({ "freiman_dimension": d, "affine_dimension": affine }), &d.to_string());
        }
        Command::Verify { statement } => return verify(statement, &out, &budget),
        Command::Cover { set, prog, epsilon } => {
            let a = read_set(&set)?;
            let eps = rational(&epsilon)?;
            let outcome = match prog {
                Some(p) => freiman_bilu_cover(&a, &read_prog(&p)?, &eps, &budget)?,
                None => freiman_bilu_cover_bounding_box(&a, &eps, &budget)?,
            };
            return Ok(out.cover(&outcome));
        }
        Command::Search { search } => match search {
            Search::Parallelepiped { set, d } => {
                let a = read_set(&set)?;
                let found = match d {
                    Some(d) => find_parallelepiped(&a, d, &budget)?.map(|w| (d, w)),
                    None => Some(max_parallelepiped_dimension(&a, &budget)?),
                };
                match found {
                    Some((d, w)) => {
                        let text = std::iter::once(format!("d {d}"))
                            .chain(std::iter::once(format!("v0 {}", w.v0)))
                            .chain(w.directions.iter().map(|v| format!("dir {v}")))
                            .collect::<Vec<_>>()
                            .join("\n");
                        out.value(json!({ "found": true, "d": d, "v0": w.v0, "directions": w.directions }), &text);
                    }
                    None => out.value(json!({ "found": false }), "none"),
                }
            }
            Search::MinDoubling { r#box, n } => {
                let (a, v) = min_doubling_search(&grid_box(&r#box)?, n, &budget)?;
                if out.json {
                    println!("{}", json!({ "points": a, "size": a.len(), "sumset_size": v }));
                } else {
                    println!("sumset_size {v}");
                    print!("{a}");
                }
            }
        },
        Command::Example { example } => match example {
            Example::Lacunary { k, m } => out.set(&lacunary_example(k, m)?),
        },
        Command::Sweep(args) => return sweep(args, &out, &budget),
    }
    Ok(true)
}

fn verify(statement: Statement, out: &Out, budget: &Budget) -> Run {
    let rep = match statement {
        Statement::BoxDoubling { set, r#box } => verify_box_doubling(&read_set(&set)?, &grid_box(&r#box)?)?,
        Statement::DiscreteBm { x, y, d } => verify_discrete_bm(&read_set(&x)?, &read_set(&y)?, d)?,
        Statement::CompressedSum { a, b, x, y } => {
            verify_compressed_sum_bound(&read_set(&a)?, &read_set(&b)?, &read_set(&x)?, &read_set(&y)?)?
        }
        Statement::FreimanLemma { set, epsilon } => verify_freiman_lemma(&read_set(&set)?, &rational(&epsilon)?, budget)?,
        Statement::Parallelepiped { set } => verify_parallelepiped_doubling(&read_set(&set)?, budget)?,
        Statement::Plunnecke { set } => plunnecke_witness(&read_set(&set)?, budget)?.2,
        Statement::FreimanHom { from, to } => {
            let parse = |p: &Path| -> Result<_, Failure> {
                parse_point_list(&read(p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
            };
            verify_freiman_hom(&Correspondence::zip(&parse(&from)?, &parse(&to)?)?)?
        }
        Statement::Fibre { set, r#box, l } => verify_fibre_inequality(&read_set(&set)?, &grid_box(&r#box)?, l)?,
    };
    Ok(out.report(&rep))
}

fn sweep(args: SweepArgs, out: &Out, budget: &Budget) -> Run {
    if args.list {
        for (id, about) in SWEEPS {
            println!("{id:<34}{about}");
        }
        return Ok(true);
    }
    let Some(id) = args.id else {
        return Err(Failure::Usage("sweep needs an id (see --list)".into()));
    };
    if !SWEEPS.iter().any(|(s, _)| *s == id) {
        return Err(Failure::Usage(format!("unknown sweep {id:?} (see --list)")));
    }
    let config = SweepConfig { seed: args.seed, trials: args.trials, max_size: args.max_size };
    let summary = run_sweep(&id, &config, budget)?;
    if out.json {
        println!("{}", summary.to_json());
    } else {
        for line in summary_lines(&summary) {
            println!("{line}");
        }
    }
    Ok(summary.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
    }
}
