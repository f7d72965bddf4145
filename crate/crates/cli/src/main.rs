use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use planar_distlabel::gadget::augment_with_gadgets;
use planar_distlabel::generate::Family;
use planar_distlabel::labels::{build_labels_with_report, LabelConfig, LabelSet, Scheme};
use planar_distlabel::planar::{load_graph, RotationGraph, UNREACHABLE};
use planar_distlabel::query::decode_distance;
use planar_distlabel::toolkit::{self, BENCH_HEADER};
use planar_distlabel::Error;

#[derive(Parser)]
#[command(
    name = "distlabel",
    version,
    about = "Exact distance labels for embedded planar graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph file.
    Gen {
        family: Family,
        /// Vertex count.
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the label file for a graph.
    Build {
        graph: PathBuf,
        #[command(flatten)]
        label: LabelArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the distance between two vertices, or INF.
    Query { labels: PathBuf, u: usize, v: usize },
    /// Compare all decoded pairs with BFS under both schemes.
    Check {
        graph: PathBuf,
        #[arg(long, default_value_t = 16)]
        base_threshold: usize,
        /// Also verify this label file against the graph.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Benchmark generator families and print CSV.
    Bench {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "grid,random-triangulation"
        )]
        families: Vec<Family>,
        #[arg(long, value_delimiter = ',', default_value = "1024,4096")]
        sizes: Vec<usize>,
        /// Number of seeds, starting at --seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        base_threshold: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the top-level separator with its certificates.
    DumpSeparator {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the gadget-augmented graph with a weight annotation line.
    DumpAugmented {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LabelArgs {
    #[arg(long, default_value = "improved")]
    scheme: Scheme,
    #[arg(long, default_value_t = 16)]
    base_threshold: usize,
}

/// Failures that should exit with status 1 rather than 2.
#[derive(Debug)]
struct VerificationFailure(String);

impl std::fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailure {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let verification = e.downcast_ref::<VerificationFailure>().is_some()
                || matches!(
                    e.downcast_ref::<Error>(),
                    Some(Error::Format(_) | Error::Codec { .. })
                );
            ExitCode::from(if verification { 1 } else { 2 })
        }
    }
}

fn read_graph(path: &Path) -> anyhow::Result<RotationGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(load_graph(&text)?)
}

fn read_labels(path: &Path) -> anyhow::Result<LabelSet> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(LabelSet::from_bytes(&bytes)?)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Gen {
            family,
            n,
            seed,
            out,
        } => emit(out.as_deref(), &family.generate(n, seed).to_string()),
        Command::Build { graph, label, out } => {
            let g = read_graph(&graph)?;
            let config = LabelConfig {
                scheme: label.scheme,
                base_threshold: label.base_threshold,
            };
            let (labels, report) = build_labels_with_report(&g, &config)?;
            fs::write(&out, labels.to_bytes())
                .with_context(|| format!("writing {}", out.display()))?;
            eprintln!(
                "n={} scheme={} max_bits={} mean_bits={:.2} levels={} separators={}",
                g.vertex_count(),
                config.scheme.name(),
                labels.max_bits(),
                labels.mean_bits(),
                report.max_levels,
                report.separators.len()
            );
            Ok(())
        }
        Command::Query { labels, u, v } => {
            let labels = read_labels(&labels)?;
            for x in [u, v] {
                if x >= labels.len() {
                    bail!("vertex {x} out of range for {} labels", labels.len());
                }
            }
            match decode_distance(labels.label(u), labels.label(v))? {
                UNREACHABLE => println!("INF"),
                d => println!("{d}"),
            }
            Ok(())
        }
        Command::Check {
            graph,
            base_threshold,
            labels,
        } => {
            let g = read_graph(&graph)?;
            if let Some(path) = labels {
                verify_label_file(&g, &read_labels(&path)?)?;
            }
            let report = toolkit::check(&g, base_threshold)?;
            if let Some(m) = report.mismatch {
                return Err(VerificationFailure(format!(
                    "FAIL {} scheme: d({}, {}) decoded {} expected {}",
                    m.scheme.name(),
                    m.u,
                    m.v,
                    fmt_distance(m.decoded),
                    fmt_distance(m.expected)
                ))
                .into());
            }
            println!(
                "PASS n={} pairs={} unreachable={} max_bits={} mean_bits={:.2} base_max_bits={}",
                report.vertex_count,
                report.pairs,
                report.unreachable_pairs,
                report.improved_max_bits,
                report.improved_mean_bits,
                report.baseline_max_bits
            );
            Ok(())
        }
        Command::Bench {
            families,
            sizes,
            seeds,
            seed,
            base_threshold,
            out,
        } => {
            let seeds: Vec<u64> = (seed..seed + seeds).collect();
            let rows = toolkit::bench(&families, &sizes, &seeds, base_threshold)?;
            let mut text = String::from(BENCH_HEADER);
            text.push('\n');
            for row in rows {
                text.push_str(&row.to_csv());
                text.push('\n');
            }
            emit(out.as_deref(), &text)
        }
        Command::DumpSeparator { graph, out } => {
            let g = read_graph(&graph)?;
            if g.vertex_count() < 3 {
                bail!("separators need a graph with at least 3 vertices");
            }
            emit(out.as_deref(), &toolkit::separator_csv(&g)?)
        }
        Command::DumpAugmented { graph, out } => {
            let g = read_graph(&graph)?;
            emit(
                out.as_deref(),
                &augment_with_gadgets(&g)?.to_annotated_text(),
            )
        }
    }
}

fn fmt_distance(d: u32) -> String {
    if d == UNREACHABLE {
        "INF".to_string()
    } else {
        d.to_string()
    }
}

fn verify_label_file(g: &RotationGraph, labels: &LabelSet) -> anyhow::Result<()> {
    let fingerprint = planar_distlabel::labels::graph_fingerprint(g);
    if labels.fingerprint != fingerprint || labels.len() != g.vertex_count() {
        return Err(
            VerificationFailure("label file was built for a different graph".into()).into(),
        );
    }
    for u in 0..g.vertex_count() {
        let truth = planar_distlabel::planar::bfs_distances(g, u).distances;
        for (v, &expected) in truth.iter().enumerate() {
            let decoded = decode_distance(labels.label(u), labels.label(v))?;
            if decoded != expected {
                return Err(VerificationFailure(format!(
                    "FAIL label file: d({u}, {v}) decoded {} expected {}",
                    fmt_distance(decoded),
                    fmt_distance(expected)
                ))
                .into());
            }
        }
    }
    Ok(())
}
