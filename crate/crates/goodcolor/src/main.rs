//! Command-line front end: construct colorings, verify goodness, validate
//! splitting graphs, replay the witness-family argument, check the atom
//! property, and search cyclic shade splits.
//!
//! Exit codes: 0 = pass, 1 = verification failure, 2 = usage or I/O error.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use goodcolor::construct::{
    build_affine_coloring, build_cyclic_coloring, build_m2_coloring, EdgeColoring,
};
use goodcolor::format::{
    decode_coloring, encode_coloring, parse_mandate_spec, parse_splitting_spec,
};
use goodcolor::mandate::MandatorySet;
use goodcolor::points::intersection_size;
use goodcolor::replay::replay_all;
use goodcolor::search::{search_split, DifferenceSet, SplitSearchOutcome};
use goodcolor::splitgraph::{quadratic_residue_k17, SplittingGraph};
use goodcolor::verify::{check_atom_property, color_rows, verify_good, VerifyOptions};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "goodcolor",
    version,
    about = "Edge colorings of complete graphs in which every allowed triangle type is witnessed"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a coloring and write it as a binary coloring file
    Construct(ConstructArgs),
    /// Check the three goodness conditions against a mandatory set
    Verify(VerifyArgs),
    /// Check a splitting graph for monochromatic K4, K4,3, and K5,2
    CheckSplitting(CheckSplittingArgs),
    /// Re-derive condition (1) edge by edge from candidate witness families
    Replay(ReplayArgs),
    /// Check that the color relations compose as atoms
    Atoms(AtomsArgs),
    /// Search for a two-shade split of a sum-free cyclic blue class
    SearchCyclic(SearchCyclicArgs),
    /// Edge counts by label and, where available, by intersection size
    Stats(StatsArgs),
}

/// Where a coloring comes from: a file, or a family built on the fly.
#[derive(Args)]
struct SourceArgs {
    /// Read a coloring from a binary coloring file
    #[arg(long = "in", value_name = "FILE", conflicts_with = "family")]
    input: Option<PathBuf>,
    /// Build a coloring instead: m2, cyclic, or affine
    #[arg(long, value_name = "NAME")]
    family: Option<String>,
    /// Splitting-graph spec file for the m2 family (default: the
    /// quadratic-residue K17 with points 15,16,17 deleted)
    #[arg(long, value_name = "FILE")]
    splitting: Option<PathBuf>,
    /// Extra splitting-graph points to delete, comma separated
    #[arg(long, value_delimiter = ',', value_name = "P,..")]
    delete: Vec<u32>,
    /// Modulus for the cyclic family
    #[arg(long)]
    modulus: Option<u32>,
    /// Difference class for the cyclic family as NAME=D1,D2,... (repeatable)
    #[arg(long = "class", value_name = "NAME=D1,..")]
    classes: Vec<String>,
    /// Prime order for the affine family
    #[arg(long)]
    q: Option<u32>,
}

impl SourceArgs {
    fn load_splitting(&self) -> Result<SplittingGraph> {
        let graph = match &self.splitting {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                parse_splitting_spec(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
                    .build()?
            }
            None => quadratic_residue_k17().without_points(&[15, 16, 17])?,
        };
        if self.delete.is_empty() {
            Ok(graph)
        } else {
            Ok(graph.without_points(&self.delete)?)
        }
    }

    fn load(&self) -> Result<(EdgeColoring, Option<SplittingGraph>)> {
        if let Some(path) = &self.input {
            let file =
                File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let coloring = decode_coloring(BufReader::new(file))
                .with_context(|| format!("decoding {}", path.display()))?;
            return Ok((coloring, None));
        }
        match self.family.as_deref() {
            Some("m2") => {
                let g = self.load_splitting()?;
                let c = build_m2_coloring(&g)?;
                Ok((c, Some(g)))
            }
            Some("cyclic") => {
                let modulus = self.modulus.context("--family cyclic needs --modulus")?;
                if self.classes.is_empty() {
                    bail!("--family cyclic needs at least two --class NAME=D1,D2,...");
                }
                let classes = self
                    .classes
                    .iter()
                    .map(|s| parse_class(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok((build_cyclic_coloring(modulus, &classes)?, None))
            }
            Some("affine") => {
                let q = self.q.context("--family affine needs --q")?;
                Ok((build_affine_coloring(q)?, None))
            }
            Some(other) => bail!("unknown family {other:?} (expected m2, cyclic, or affine)"),
            None => bail!("either --in FILE or --family NAME is required"),
        }
    }
}

fn parse_class(text: &str) -> Result<(String, Vec<u32>)> {
    let (name, rest) = text
        .split_once('=')
        .with_context(|| format!("class {text:?} is not NAME=D1,D2,..."))?;
    let diffs = rest
        .split(',')
        .filter(|p| !p.is_empty())
        .map(|p| p.trim().parse::<u32>().with_context(|| format!("residue {p:?}")))
        .collect::<Result<Vec<u32>>>()?;
    Ok((name.to_string(), diffs))
}

/// Accepts m<N>, lyndon<L>, or a path to a mandatory-set JSON file.
fn load_mandate(spec: &str) -> Result<MandatorySet> {
    if let Some(rest) = spec.strip_prefix('m') {
        if let Ok(n) = rest.parse::<u32>() {
            return Ok(MandatorySet::mn(n)?);
        }
    }
    if let Some(rest) = spec.strip_prefix("lyndon") {
        if let Ok(l) = rest.parse::<u32>() {
            return Ok(MandatorySet::lyndon(l)?);
        }
    }
    let text =
        std::fs::read_to_string(spec).with_context(|| format!("reading mandate {spec:?}"))?;
    Ok(parse_mandate_spec(&text)
        .with_context(|| format!("parsing mandate {spec:?}"))?
        .build()?)
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    match path {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output coloring file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Mandatory set: m<N>, lyndon<L>, or a JSON file
    #[arg(long, value_name = "SPEC")]
    mandate: String,
    /// Write the report JSON here instead of stdout
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Worker threads (default: machine parallelism)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Stored failures per condition; verdicts stay exact
    #[arg(long, default_value_t = 100)]
    failure_cap: usize,
}

#[derive(Args)]
struct CheckSplittingArgs {
    /// Splitting-graph spec file
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    /// Extra points to delete, comma separated
    #[arg(long, value_delimiter = ',', value_name = "P,..")]
    delete: Vec<u32>,
    /// Write the report JSON here instead of stdout
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Splitting-graph spec file (default: the quadratic-residue K17 with
    /// points 15,16,17 deleted)
    #[arg(long, value_name = "FILE")]
    splitting: Option<PathBuf>,
    /// Extra splitting-graph points to delete, comma separated
    #[arg(long, value_delimiter = ',', value_name = "P,..")]
    delete: Vec<u32>,
    /// Write the report JSON here instead of stdout
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 100)]
    failure_cap: usize,
}

#[derive(Args)]
struct AtomsArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Write the report JSON here instead of stdout
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct SearchCyclicArgs {
    /// Modulus of the cyclic group
    #[arg(long)]
    modulus: u32,
    /// Blue difference class (must be sum-free and symmetric)
    #[arg(long, value_delimiter = ',', value_name = "D,..")]
    blue: Vec<u32>,
    /// Candidate evaluations before giving up
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSONL trace here instead of stdout
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Write the stats JSON here instead of stdout
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Serialize)]
struct StatsReport {
    vertex_count: usize,
    labels: Vec<String>,
    edge_counts_by_label: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_counts_by_intersection: Option<Vec<u64>>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct(args) => {
            let (coloring, _) = args.source.load()?;
            let file = File::create(&args.out)
                .with_context(|| format!("creating {}", args.out.display()))?;
            let mut sink = BufWriter::new(file);
            encode_coloring(&coloring, &mut sink)?;
            sink.flush()?;
            eprintln!(
                "wrote {} vertices, {} labels to {}",
                coloring.vertex_count(),
                coloring.labels().len(),
                args.out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let (coloring, _) = args.source.load()?;
            let mandate = load_mandate(&args.mandate)?;
            let opts = VerifyOptions {
                threads: args.threads,
                failure_cap: args.failure_cap,
            };
            let report = verify_good(&coloring, &mandate, &opts)?;
            write_json(&report, args.report.as_deref())?;
            eprintln!(
                "conditions: (1) {} (2) {} (3) {}  [{} ms]",
                pass_str(report.condition1.pass),
                pass_str(report.condition2.pass),
                pass_str(report.condition3.pass),
                report.stats.wall_ms
            );
            Ok(exit_for(report.pass()))
        }
        Command::CheckSplitting(args) => {
            let text = std::fs::read_to_string(&args.spec)
                .with_context(|| format!("reading {}", args.spec.display()))?;
            let mut graph = parse_splitting_spec(&text)
                .with_context(|| format!("parsing {}", args.spec.display()))?
                .build()?;
            if !args.delete.is_empty() {
                graph = graph.without_points(&args.delete)?;
            }
            let report = graph.validate();
            write_json(&report, args.report.as_deref())?;
            eprintln!(
                "splitting graph on {} points: {}",
                graph.point_count(),
                pass_str(report.pass)
            );
            Ok(exit_for(report.pass))
        }
        Command::Replay(args) => {
            let source = SourceArgs {
                input: None,
                family: Some("m2".into()),
                splitting: args.splitting.clone(),
                delete: args.delete.clone(),
                modulus: None,
                classes: Vec::new(),
                q: None,
            };
            let g = source.load_splitting()?;
            let coloring = build_m2_coloring(&g)?;
            let opts = VerifyOptions {
                threads: args.threads,
                failure_cap: args.failure_cap,
            };
            let report = replay_all(&coloring, &g, &opts)?;
            write_json(&report, args.report.as_deref())?;
            eprintln!(
                "replayed {} ordered pairs: {}  [{} ms]",
                report
                    .per_overlap
                    .iter()
                    .map(|s| s.ordered_pairs)
                    .sum::<u64>(),
                pass_str(report.pass),
                report.wall_ms
            );
            Ok(exit_for(report.pass))
        }
        Command::Atoms(args) => {
            let (coloring, _) = args.source.load()?;
            let opts = VerifyOptions {
                threads: args.threads,
                failure_cap: 100,
            };
            let report = check_atom_property(&coloring, &opts);
            write_json(&report, args.report.as_deref())?;
            eprintln!(
                "atom property over {} label triples: {}  [{} ms]",
                report.entries.len(),
                pass_str(report.pass),
                report.wall_ms
            );
            Ok(exit_for(report.pass))
        }
        Command::SearchCyclic(args) => {
            let m = args.modulus;
            let blue = DifferenceSet::new(m, &args.blue)?;
            let red_diffs: Vec<u32> =
                (1..m).filter(|d| !blue.diffs().contains(d)).collect();
            let red = DifferenceSet::new(m, &red_diffs)?;
            let result = search_split(&blue, &red, args.budget, args.seed)?;

            let mut sink: Box<dyn Write> = match &args.trace {
                Some(path) => Box::new(BufWriter::new(
                    File::create(path)
                        .with_context(|| format!("creating {}", path.display()))?,
                )),
                None => Box::new(std::io::stdout().lock()),
            };
            for step in &result.trace {
                serde_json::to_writer(&mut sink, step)?;
                writeln!(sink)?;
            }
            sink.flush()?;

            match &result.outcome {
                SplitSearchOutcome::NoSymmetricSplit => {
                    eprintln!("no symmetric split: the blue class has fewer than two negation orbits");
                    Ok(ExitCode::from(1))
                }
                SplitSearchOutcome::Found(c) => {
                    eprintln!(
                        "zero-deficiency split after {} evaluations: b0={:?} b1={:?}",
                        result.evaluations,
                        c.b0.diffs(),
                        c.b1.diffs()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                SplitSearchOutcome::Exhausted(c) => {
                    eprintln!(
                        "budget exhausted after {} evaluations; best deficiency {} with b0={:?} b1={:?}",
                        result.evaluations,
                        c.deficiency,
                        c.b0.diffs(),
                        c.b1.diffs()
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Stats(args) => {
            let (coloring, _) = args.source.load()?;
            let rows = color_rows(&coloring);
            let n = coloring.vertex_count();
            let mut by_label = BTreeMap::new();
            for (i, name) in coloring.labels().iter().enumerate() {
                let total: u64 = (0..n)
                    .map(|v| rows.degree(goodcolor::mandate::Label(i as u8), v) as u64)
                    .sum();
                by_label.insert(name.clone(), total / 2);
            }
            let by_intersection = coloring.vertex_sets().map(|sets| {
                let mut counts = vec![0u64; 8];
                for u in 0..n {
                    for v in (u + 1)..n {
                        counts[intersection_size(sets[u], sets[v]) as usize] += 1;
                    }
                }
                while counts.last() == Some(&0) {
                    counts.pop();
                }
                counts
            });
            let report = StatsReport {
                vertex_count: n,
                labels: coloring.labels().to_vec(),
                edge_counts_by_label: by_label,
                edge_counts_by_intersection: by_intersection,
            };
            write_json(&report, args.report.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn pass_str(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn exit_for(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
