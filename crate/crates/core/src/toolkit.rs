//! Oracle checks, benchmarks and separator dumps behind the command line.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::generate::Family;
use crate::labels::{build_labels, build_labels_with_report, LabelConfig, LabelSet, Scheme};
use crate::planar::{bfs_distances, RotationGraph, UNREACHABLE};
use crate::query::decode_distance;
use crate::separator::find_separator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub scheme: Scheme,
    pub u: usize,
    pub v: usize,
    pub expected: u32,
    pub decoded: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub vertex_count: usize,
    /// Ordered pairs compared per scheme.
    pub pairs: u64,
    pub unreachable_pairs: u64,
    pub improved_max_bits: usize,
    pub improved_mean_bits: f64,
    pub baseline_max_bits: usize,
    pub mismatch: Option<Mismatch>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares every decoded pair against BFS under both schemes.
pub fn check(g: &RotationGraph, base_threshold: usize) -> Result<CheckReport> {
    let improved = build_labels(
        g,
        &LabelConfig {
            scheme: Scheme::Improved,
            base_threshold,
        },
    )?;
    let baseline = build_labels(
        g,
        &LabelConfig {
            scheme: Scheme::Baseline,
            base_threshold,
        },
    )?;
    let n = g.vertex_count();
    let rows: Vec<Result<(u64, Option<Mismatch>)>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let truth = bfs_distances(g, u).distances;
            let unreachable = truth.iter().filter(|&&d| d == UNREACHABLE).count() as u64;
            for labels in [&improved, &baseline] {
                if let Some(m) = first_mismatch(labels, u, &truth)? {
                    return Ok((unreachable, Some(m)));
                }
            }
            Ok((unreachable, None))
        })
        .collect();
    let mut unreachable_pairs = 0;
    let mut mismatch = None;
    for row in rows {
        let (unreachable, m) = row?;
        unreachable_pairs += unreachable;
        if mismatch.is_none() {
            mismatch = m;
        }
    }
    Ok(CheckReport {
        vertex_count: n,
        pairs: (n * n) as u64,
        unreachable_pairs,
        improved_max_bits: improved.max_bits(),
        improved_mean_bits: improved.mean_bits(),
        baseline_max_bits: baseline.max_bits(),
        mismatch,
    })
}

fn first_mismatch(labels: &LabelSet, u: usize, truth: &[u32]) -> Result<Option<Mismatch>> {
    for (v, &expected) in truth.iter().enumerate() {
        let decoded = decode_distance(labels.label(u), labels.label(v))?;
        if decoded != expected {
            return Ok(Some(Mismatch {
                scheme: labels.scheme,
                u,
                v,
                expected,
                decoded,
            }));
        }
    }
    Ok(None)
}

pub const BENCH_HEADER: &str =
    "family,n,seed,max_bits,mean_bits,base_max_bits,c,log_sum,build_ms,query_ns";

/// One benchmark cell. `c` and `log_sum` describe the top-level separator
/// and are zero when the graph is a single base case.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub max_bits: usize,
    pub mean_bits: f64,
    pub base_max_bits: usize,
    pub c: usize,
    pub log_sum: f64,
    pub build_ms: f64,
    pub query_ns: f64,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{:.2},{},{},{:.3},{:.1},{:.0}",
            self.family,
            self.n,
            self.seed,
            self.max_bits,
            self.mean_bits,
            self.base_max_bits,
            self.c,
            self.log_sum,
            self.build_ms,
            self.query_ns
        )
    }
}

const QUERY_SAMPLES: usize = 2000;

pub fn bench_cell(family: Family, n: usize, seed: u64, base_threshold: usize) -> Result<BenchRow> {
    let g = family.generate(n, seed);
    let start = Instant::now();
    let (labels, report) = build_labels_with_report(
        &g,
        &LabelConfig {
            scheme: Scheme::Improved,
            base_threshold,
        },
    )?;
    let build_ms = start.elapsed().as_secs_f64() * 1e3;
    let baseline = build_labels(
        &g,
        &LabelConfig {
            scheme: Scheme::Baseline,
            base_threshold,
        },
    )?;
    let (c, log_sum) = report
        .separators
        .first()
        .filter(|s| s.level == 0)
        .map_or((0, 0.0), |s| (s.c, s.log_sum));

    let mut query_ns = 0.0;
    if n > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(usize, usize)> = (0..QUERY_SAMPLES)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        let start = Instant::now();
        let mut sink = 0u64;
        for &(u, v) in &pairs {
            sink = sink.wrapping_add(decode_distance(labels.label(u), labels.label(v))? as u64);
        }
        std::hint::black_box(sink);
        query_ns = start.elapsed().as_nanos() as f64 / QUERY_SAMPLES as f64;
    }
    Ok(BenchRow {
        family,
        n,
        seed,
        max_bits: labels.max_bits(),
        mean_bits: labels.mean_bits(),
        base_max_bits: baseline.max_bits(),
        c,
        log_sum,
        build_ms,
        query_ns,
    })
}

/// Every (family, n, seed) cell, in that nesting order.
pub fn bench(
    families: &[Family],
    sizes: &[usize],
    seeds: &[u64],
    base_threshold: usize,
) -> Result<Vec<BenchRow>> {
    let mut cells = Vec::new();
    for &family in families {
        for &n in sizes {
            for &seed in seeds {
                cells.push((family, n, seed));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(family, n, seed)| bench_cell(family, n, seed, base_threshold))
        .collect()
}

/// Top-level separator as `#` certificate lines followed by
/// `position,vertex,gap` rows. The gap on row `i` bounds the distance to the
/// next row, cyclically.
pub fn separator_csv(g: &RotationGraph) -> Result<String> {
    let sep = find_separator(g)?;
    let r = &sep.result;
    let mut out = String::new();
    writeln!(
        out,
        "# n={} c={} log_sum={:.3}",
        g.vertex_count(),
        r.len(),
        r.log_sum
    )
    .unwrap();
    writeln!(
        out,
        "# max_component={} bound={}",
        r.max_component,
        r.balance_bound()
    )
    .unwrap();
    writeln!(
        out,
        "# augmented_vertices={} cycle_len={}",
        sep.augmented_vertices,
        sep.cycle.walk_len()
    )
    .unwrap();
    writeln!(out, "position,vertex,gap").unwrap();
    for (i, &v) in r.order.iter().enumerate() {
        let gap = r.gaps.get(i).copied().unwrap_or(0);
        writeln!(out, "{i},{v},{gap}").unwrap();
    }
    Ok(out)
}
