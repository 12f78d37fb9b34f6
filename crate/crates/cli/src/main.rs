use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tetralab_core::codes::{
    coil_report, distance_two_code, reference_coil, BinaryWordCode, CycleInCube, REFERENCE_COIL,
};
use tetralab_core::fourcube::{star_table, AVariant, Side};
use tetralab_core::lattice::{z_edge, z_network, z_spin, BondConvention, EdgeMethod, TorusLattice};
use tetralab_core::recursion::phi;
use tetralab_core::report::{parse_dirs, run_check, CheckId, Options, PartitionMethod, Report};

#[derive(Parser)]
#[command(name = "tetralab", version, about = "Exact checks for simplex equations and the 3D Ising weight matrix")]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// `json` for standard output (default), otherwise a file to write the JSON to.
    #[arg(long, global = true, default_value = "json")]
    out: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one check, or `all`; one JSON report per line.
    Verify(VerifyArgs),
    /// Partition functions of a periodic lattice.
    Partition(PartitionArgs),
    /// Coil and code checks.
    #[command(subcommand)]
    Codes(CodesCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Star,
}

#[derive(Clone, Copy, ValueEnum)]
enum AChoice {
    Reversal,
    SwapWithinBlocks,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check id or `all`.
    check: String,
    /// Lattice size `L1xL2xL3`.
    #[arg(long, default_value = "2x2x2")]
    size: String,
    /// Direction triple of the weight matrix.
    #[arg(long, default_value = "1,2,3")]
    dirs: String,
    /// Partition method: spin, edge, network or all.
    #[arg(long, default_value = "all")]
    method: String,
    #[arg(long, value_enum, default_value = "json")]
    emit: Emit,
    /// Edge relabeling used for the twisted side.
    #[arg(long = "a", value_enum, default_value = "reversal")]
    a: AChoice,
    /// Skip the run with the other edge relabeling in `tte`.
    #[arg(long)]
    single_variant: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Spin,
    Edge,
    Network,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long, default_value = "2x2x2")]
    size: String,
    #[arg(long, value_enum, default_value = "spin")]
    method: Method,
    #[arg(long, default_value = "1,2,3")]
    dirs: String,
    /// Count each neighbour pair once instead of each axis edge.
    #[arg(long)]
    distinct_pairs: bool,
}

#[derive(Subcommand)]
enum CodesCommand {
    /// Induced-cycle and chain-code check.
    Coil {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Comma-separated vertex words; default is the reference 8-cycle.
        #[arg(long)]
        cycle: Option<String>,
    },
    /// Minimum distance of a word list (one word per line or comma-separated).
    Distance {
        #[arg(long)]
        words: Option<PathBuf>,
    },
}

fn writer(out: &str) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        "json" | "-" => Box::new(io::stdout().lock()),
        p => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {p}"))?)),
    })
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> anyhow::Result<bool> {
    let ids: Vec<CheckId> = if args.check == "all" {
        CheckId::ALL.to_vec()
    } else {
        vec![args.check.parse()?]
    };
    let opts = Options {
        lattice: TorusLattice::parse(&args.size)?,
        dirs: parse_dirs(&args.dirs)?,
        method: args.method.parse::<PartitionMethod>()?,
        variant: match args.a {
            AChoice::Reversal => AVariant::Reversal,
            AChoice::SwapWithinBlocks => AVariant::SwapWithinBlocks,
        },
        compare_variants: !args.single_variant,
    };
    let mut all_ok = true;
    for id in ids {
        let reports: Vec<Report> = run_check(id, &opts)?;
        for r in &reports {
            all_ok &= r.holds;
            eprintln!("{}", r.summary_line());
            match (args.emit, id) {
                (Emit::Star, CheckId::Tables) => {
                    for side in [Side::Left, Side::Right] {
                        writeln!(out, "{}\n", star_table(side))?;
                    }
                }
                _ => writeln!(out, "{}", r.to_json_line())?,
            }
        }
    }
    let failed = !all_ok;
    eprintln!("{}", if failed { "some checks failed" } else { "all selected checks hold" });
    Ok(all_ok)
}

fn partition(args: &PartitionArgs, out: &mut dyn Write) -> anyhow::Result<bool> {
    let lat = TorusLattice::parse(&args.size)?;
    let value = match args.method {
        Method::Spin => {
            let conv = if args.distinct_pairs { BondConvention::DistinctPairs } else { BondConvention::AxisEdges };
            json!({"method": "spin", "size": lat.sizes, "z": z_spin(&lat, conv)?.to_json()})
        }
        Method::Edge => {
            let ze = z_edge(&lat, EdgeMethod::Auto)?;
            let sectors: serde_json::Map<String, serde_json::Value> = ze
                .sectors
                .iter()
                .enumerate()
                .map(|(i, s)| (format!("{i:03b}"), s.to_json()))
                .collect();
            json!({"method": "edge", "size": lat.sizes, "admissible": ze.admissible, "z": ze.total().to_json(), "sectors": sectors})
        }
        Method::Network => {
            let zn = z_network(&lat, &phi()?, &parse_dirs(&args.dirs)?)?;
            json!({"method": "network", "size": lat.sizes, "dirs": zn.dirs, "z": zn.value.to_json(),
                   "support_checked": zn.support_checked, "extra_support": zn.extra_support,
                   "missing_support": zn.missing_support})
        }
    };
    writeln!(out, "{value}")?;
    Ok(true)
}

fn codes(cmd: &CodesCommand, out: &mut dyn Write) -> anyhow::Result<bool> {
    match cmd {
        CodesCommand::Coil { n, k, cycle } => {
            let c = match cycle {
                Some(s) => CycleInCube::parse(*n, &s.split(',').map(str::trim).collect::<Vec<_>>())?,
                None if *n == REFERENCE_COIL[0].len() => reference_coil(),
                None => bail!("the reference cycle lives in I^4; pass --cycle for n = {n}"),
            };
            let rep = coil_report(&c, *k);
            let ok = rep.induced && rep.chain_code.holds;
            writeln!(out, "{}", serde_json::to_string(&rep)?)?;
            eprintln!("induced: {}, ({n},{k}) chain code: {}", rep.induced, rep.chain_code.holds);
            Ok(ok)
        }
        CodesCommand::Distance { words } => {
            let code = match words {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    let ws: Vec<&str> = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|w| !w.is_empty()).collect();
                    BinaryWordCode::parse(&ws)?
                }
                None => distance_two_code(),
            };
            let d = code.min_distance()?;
            writeln!(
                out,
                "{}",
                json!({"words": code.rendered(), "min_distance": d, "complement_closed": code.is_complement_closed()})
            )?;
            eprintln!("minimum distance {d}");
            Ok(true)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let mut out = writer(&cli.out)?;
    let ok = match &cli.command {
        Command::Verify(a) => verify(a, &mut *out)?,
        Command::Partition(a) => partition(a, &mut *out)?,
        Command::Codes(c) => codes(c, &mut *out)?,
    };
    out.flush()?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
