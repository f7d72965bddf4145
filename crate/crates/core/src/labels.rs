//! Distance labels built by recursive separation.
//!
//! Every label is a standalone bit stream made of level records. A record
//! starts with the gamma-coded id (plus one) of the component the vertex lies
//! in at that level: the connected component of the input at the top, the
//! component of the parent's remainder below it. Then:
//!
//! ```text
//! separator level: 1  gamma(c)  distances to u_1..u_c  member-bit
//! base level:      0  gamma(k)  gamma(index + 1)  distances to all k vertices
//! ```
//!
//! A separator level is followed by the next record unless the member bit is
//! set. With the improved scheme the separator distances are
//! `gamma(d_1 + 1)` followed by the signed differences `d_i - d_{i-1}`; the
//! baseline writes `gamma(w)` and then every distance in `w` bits. Base-level
//! distances are `gamma(d + 1)` (improved) or `gamma(w)` plus `w`-bit values
//! (baseline).

use std::collections::VecDeque;
use std::hash::Hasher;

use fnv::FnvHasher;
use rayon::prelude::*;

use crate::codec::{BitReader, BitStream};
use crate::error::{Error, Result};
use crate::planar::{bfs_into, split_components, RotationGraph, UNREACHABLE};
use crate::separator::{find_separator, SeparatorResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Gamma-coded first distance plus signed deltas along the separator.
    Improved,
    /// Fixed-width distances to every separator vertex.
    Baseline,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Improved => "improved",
            Scheme::Baseline => "baseline",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Scheme::Improved => 0,
            Scheme::Baseline => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Scheme::Improved),
            1 => Ok(Scheme::Baseline),
            other => Err(Error::format(format!("unknown scheme code {other}"))),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "improved" => Ok(Scheme::Improved),
            "baseline" => Ok(Scheme::Baseline),
            other => Err(format!("unknown scheme {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabelConfig {
    pub scheme: Scheme,
    /// Components with at most this many vertices store explicit distances.
    pub base_threshold: usize,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            scheme: Scheme::Improved,
            base_threshold: 16,
        }
    }
}

impl LabelConfig {
    pub fn baseline() -> Self {
        LabelConfig {
            scheme: Scheme::Baseline,
            ..Self::default()
        }
    }
}

/// One vertex's label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub scheme: Scheme,
    /// Fingerprint of the graph the label was built for.
    pub fingerprint: u64,
    pub bits: BitStream,
}

impl Label {
    pub fn bit_len(&self) -> usize {
        self.bits.len()
    }

    /// Parses the level records.
    pub fn levels(&self) -> Result<Vec<LevelRecord>> {
        let mut r = self.bits.reader();
        let mut levels = Vec::new();
        loop {
            let component = read_count(&mut r)? - 1;
            if r.read_bit()? {
                let c = read_count(&mut r)?;
                let distances = read_separator_row(&mut r, self.scheme, c)?;
                let in_separator = r.read_bit()?;
                levels.push(LevelRecord::Separator {
                    component,
                    in_separator,
                    distances,
                });
                if in_separator {
                    break;
                }
            } else {
                let k = read_count(&mut r)?;
                let index = read_count(&mut r)? - 1;
                let distances = read_base_row(&mut r, self.scheme, k)?;
                levels.push(LevelRecord::Base {
                    component,
                    index,
                    distances,
                });
                break;
            }
        }
        if r.remaining() != 0 {
            return Err(Error::format(format!("{} trailing bits", r.remaining())));
        }
        Ok(levels)
    }
}

/// Decoded view of one level of a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelRecord {
    Separator {
        component: usize,
        in_separator: bool,
        /// Distances to `u_1 .. u_c` within the level's component.
        distances: Vec<u32>,
    },
    Base {
        component: usize,
        index: usize,
        /// Distances to every vertex of the component, in id order.
        distances: Vec<u32>,
    },
}

impl LevelRecord {
    pub fn component(&self) -> usize {
        match self {
            LevelRecord::Separator { component, .. } | LevelRecord::Base { component, .. } => {
                *component
            }
        }
    }

    /// `d_{i+1} - d_i` along the separator; empty for base levels.
    pub fn deltas(&self) -> Vec<i64> {
        match self {
            LevelRecord::Separator { distances, .. } => distances
                .windows(2)
                .map(|w| w[1] as i64 - w[0] as i64)
                .collect(),
            LevelRecord::Base { .. } => Vec::new(),
        }
    }
}

pub(crate) fn read_count(r: &mut BitReader<'_>) -> Result<usize> {
    let v = r.read_gamma()?;
    usize::try_from(v).map_err(|_| Error::format(format!("count {v} out of range")))
}

fn read_distance(r: &mut BitReader<'_>) -> Result<u32> {
    let v = r.read_gamma()? - 1;
    u32::try_from(v).map_err(|_| Error::format(format!("distance {v} out of range")))
}

pub(crate) fn read_width(r: &mut BitReader<'_>) -> Result<u32> {
    let w = r.read_gamma()?;
    if w > 32 {
        return Err(Error::format(format!("distance width {w} exceeds 32")));
    }
    Ok(w as u32)
}

fn read_separator_row(r: &mut BitReader<'_>, scheme: Scheme, c: usize) -> Result<Vec<u32>> {
    let mut row = Vec::with_capacity(c);
    match scheme {
        Scheme::Improved => {
            let mut d = read_distance(r)? as i64;
            row.push(d as u32);
            for _ in 1..c {
                d += r.read_signed()?;
                if !(0..UNREACHABLE as i64).contains(&d) {
                    return Err(Error::format(format!("distance {d} out of range")));
                }
                row.push(d as u32);
            }
        }
        Scheme::Baseline => {
            let w = read_width(r)?;
            for _ in 0..c {
                row.push(r.read_bits(w)? as u32);
            }
        }
    }
    Ok(row)
}

fn read_base_row(r: &mut BitReader<'_>, scheme: Scheme, k: usize) -> Result<Vec<u32>> {
    match scheme {
        Scheme::Improved => (0..k).map(|_| read_distance(r)).collect(),
        Scheme::Baseline => {
            let w = read_width(r)?;
            (0..k).map(|_| Ok(r.read_bits(w)? as u32)).collect()
        }
    }
}

/// Bits needed for values `0..=max`, at least 1.
fn width_for(max: usize) -> u32 {
    (usize::BITS - max.leading_zeros()).max(1)
}

/// Statistics for one separator in the recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatorStats {
    /// Recursion level, 0 for the input's components.
    pub level: usize,
    pub component_size: usize,
    pub augmented_size: usize,
    pub c: usize,
    pub log_sum: f64,
    pub max_component: usize,
    /// Length of the separating walk in the augmented graph.
    pub walk_len: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildReport {
    /// Separators in pre-order.
    pub separators: Vec<SeparatorStats>,
    /// Largest number of level records in any label.
    pub max_levels: usize,
}

/// Labels for every vertex, in vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    pub scheme: Scheme,
    pub fingerprint: u64,
    pub labels: Vec<Label>,
}

impl LabelSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &Label {
        &self.labels[v]
    }

    pub fn max_bits(&self) -> usize {
        self.labels.iter().map(Label::bit_len).max().unwrap_or(0)
    }

    pub fn mean_bits(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        self.labels.iter().map(Label::bit_len).sum::<usize>() as f64 / self.labels.len() as f64
    }
}

/// FNV-1a over `n`, `m` and the rotation lists, all as little-endian u64.
pub fn graph_fingerprint(g: &RotationGraph) -> u64 {
    let mut h = FnvHasher::default();
    h.write(&(g.vertex_count() as u64).to_le_bytes());
    h.write(&(g.edge_count() as u64).to_le_bytes());
    for v in 0..g.vertex_count() {
        h.write(&(g.degree(v) as u64).to_le_bytes());
        for &w in g.neighbors(v) {
            h.write(&(w as u64).to_le_bytes());
        }
    }
    h.finish()
}

/// Exact distances from every vertex to `u_1 .. u_c`, one row per vertex.
pub fn separator_distances(g: &RotationGraph, sep: &SeparatorResult) -> Vec<Vec<u32>> {
    let mut rows = vec![Vec::with_capacity(sep.len()); g.vertex_count()];
    for_each_separator_row(g, &sep.order, |_, dist| {
        for (row, &d) in rows.iter_mut().zip(dist) {
            row.push(d);
        }
    });
    rows
}

fn for_each_separator_row(
    g: &RotationGraph,
    order: &[usize],
    mut visit: impl FnMut(usize, &[u32]),
) {
    let mut dist = vec![UNREACHABLE; g.vertex_count()];
    let mut queue = VecDeque::new();
    for (i, &u) in order.iter().enumerate() {
        dist.fill(UNREACHABLE);
        bfs_into(g, u, &mut dist, &mut queue);
        visit(i, &dist);
    }
}

struct Component {
    /// Label suffix per local vertex, starting at the tag bit.
    bits: Vec<BitStream>,
    separators: Vec<SeparatorStats>,
    levels: usize,
}

fn label_component(g: &RotationGraph, config: &LabelConfig, level: usize) -> Result<Component> {
    let n = g.vertex_count();
    if n <= config.base_threshold.max(2) {
        return Ok(base_case(g, config.scheme));
    }

    let sep = find_separator(g)?;
    let result = &sep.result;
    let c = result.len();
    let mut bits: Vec<BitStream> = (0..n)
        .map(|_| {
            let mut s = BitStream::new();
            s.write_bit(true);
            s.write_gamma(c as u64);
            s
        })
        .collect();
    match config.scheme {
        Scheme::Improved => {
            let mut prev = vec![0u32; n];
            for_each_separator_row(g, &result.order, |i, dist| {
                for v in 0..n {
                    if i == 0 {
                        bits[v].write_gamma(dist[v] as u64 + 1);
                    } else {
                        let delta = dist[v] as i64 - prev[v] as i64;
                        debug_assert!(delta.unsigned_abs() as usize <= result.gaps[i - 1]);
                        bits[v].write_signed(delta);
                    }
                }
                prev.copy_from_slice(dist);
            });
        }
        Scheme::Baseline => {
            let w = width_for(n - 1);
            for s in bits.iter_mut() {
                s.write_gamma(w as u64);
            }
            for_each_separator_row(g, &result.order, |_, dist| {
                for v in 0..n {
                    bits[v].write_bits(dist[v] as u64, w);
                }
            });
        }
    }
    let mut removed = vec![false; n];
    for &u in &result.order {
        removed[u] = true;
    }
    for v in 0..n {
        bits[v].write_bit(removed[v]);
    }

    let mut separators = vec![SeparatorStats {
        level,
        component_size: n,
        augmented_size: sep.augmented_vertices,
        c,
        log_sum: result.log_sum,
        max_component: result.max_component,
        walk_len: sep.cycle.walk_len(),
    }];
    let (_, subs) = split_components(g, &removed);
    let children = subs
        .par_iter()
        .map(|sub| label_component(&sub.graph, config, level + 1))
        .collect::<Result<Vec<_>>>()?;
    let mut levels = 1;
    for (id, (sub, child)) in subs.iter().zip(children).enumerate() {
        for (local, suffix) in child.bits.iter().enumerate() {
            let v = sub.to_parent[local];
            bits[v].write_gamma(id as u64 + 1);
            bits[v].append(suffix);
        }
        separators.extend(child.separators);
        levels = levels.max(child.levels + 1);
    }
    Ok(Component {
        bits,
        separators,
        levels,
    })
}

fn base_case(g: &RotationGraph, scheme: Scheme) -> Component {
    let k = g.vertex_count();
    let width = width_for(k.saturating_sub(1));
    let mut dist = vec![UNREACHABLE; k];
    let mut queue = VecDeque::new();
    let bits = (0..k)
        .map(|v| {
            dist.fill(UNREACHABLE);
            bfs_into(g, v, &mut dist, &mut queue);
            let mut s = BitStream::new();
            s.write_bit(false);
            s.write_gamma(k as u64);
            s.write_gamma(v as u64 + 1);
            match scheme {
                Scheme::Improved => {
                    for &d in &dist {
                        s.write_gamma(d as u64 + 1);
                    }
                }
                Scheme::Baseline => {
                    s.write_gamma(width as u64);
                    for &d in &dist {
                        s.write_bits(d as u64, width);
                    }
                }
            }
            s
        })
        .collect();
    Component {
        bits,
        separators: Vec::new(),
        levels: 1,
    }
}

/// Builds labels for every vertex of `g`.
pub fn build_labels_with_report(
    g: &RotationGraph,
    config: &LabelConfig,
) -> Result<(LabelSet, BuildReport)> {
    let fingerprint = graph_fingerprint(g);
    let (_, subs) = split_components(g, &vec![false; g.vertex_count()]);
    let parts = subs
        .par_iter()
        .map(|sub| label_component(&sub.graph, config, 0))
        .collect::<Result<Vec<_>>>()?;
    let mut streams = vec![BitStream::new(); g.vertex_count()];
    let mut report = BuildReport::default();
    for (id, (sub, part)) in subs.iter().zip(parts).enumerate() {
        for (local, suffix) in part.bits.iter().enumerate() {
            let s = &mut streams[sub.to_parent[local]];
            s.write_gamma(id as u64 + 1);
            s.append(suffix);
        }
        report.separators.extend(part.separators);
        report.max_levels = report.max_levels.max(part.levels);
    }
    let labels = streams
        .into_iter()
        .map(|bits| Label {
            scheme: config.scheme,
            fingerprint,
            bits,
        })
        .collect();
    Ok((
        LabelSet {
            scheme: config.scheme,
            fingerprint,
            labels,
        },
        report,
    ))
}

pub fn build_labels(g: &RotationGraph, config: &LabelConfig) -> Result<LabelSet> {
    build_labels_with_report(g, config).map(|(labels, _)| labels)
}

/// The fixed-width scheme with the same separators, for comparison.
pub fn build_labels_baseline(g: &RotationGraph, base_threshold: usize) -> Result<LabelSet> {
    build_labels(
        g,
        &LabelConfig {
            scheme: Scheme::Baseline,
            base_threshold,
        },
    )
}

/// `max(ceil(log_{3/2}(n / base)), 0) + 1`.
pub fn depth_bound(n: usize, base_threshold: usize) -> usize {
    let ratio = n as f64 / base_threshold.max(1) as f64;
    if ratio <= 1.0 {
        return 1;
    }
    (ratio.ln() / 1.5f64.ln()).ceil() as usize + 1
}

const MAGIC: &[u8; 4] = b"PDLB";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 8 + 8;

impl LabelSet {
    /// File form: header, offset and length tables, byte-aligned payloads,
    /// then a CRC-32 of everything before it. Integers are little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.labels.len();
        let payload: usize = self.labels.iter().map(|l| l.bits.as_bytes().len()).sum();
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * (n + 1) + 4 * n + payload + 4);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.scheme.code());
        out.push(0);
        out.extend_from_slice(&self.fingerprint.to_le_bytes());
        out.extend_from_slice(&(n as u64).to_le_bytes());
        let mut offset = 0u64;
        for label in &self.labels {
            out.extend_from_slice(&offset.to_le_bytes());
            offset += label.bits.as_bytes().len() as u64;
        }
        out.extend_from_slice(&offset.to_le_bytes());
        for label in &self.labels {
            out.extend_from_slice(&(label.bits.len() as u32).to_le_bytes());
        }
        for label in &self.labels {
            out.extend_from_slice(label.bits.as_bytes());
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<LabelSet> {
        if data.len() < HEADER_LEN + 8 + 4 {
            return Err(Error::format("file too short"));
        }
        let (body, crc) = data.split_at(data.len() - 4);
        let stored = u32::from_le_bytes(crc.try_into().unwrap());
        if crc32fast::hash(body) != stored {
            return Err(Error::format("checksum mismatch"));
        }
        if &body[..4] != MAGIC {
            return Err(Error::format("bad magic"));
        }
        let version = u16::from_le_bytes([body[4], body[5]]);
        if version != VERSION {
            return Err(Error::format(format!("unsupported version {version}")));
        }
        let scheme = Scheme::from_code(body[6])?;
        if body[7] != 0 {
            return Err(Error::format("reserved byte is not zero"));
        }
        let u64_at = |at: usize| u64::from_le_bytes(body[at..at + 8].try_into().unwrap());
        let fingerprint = u64_at(8);
        let n =
            usize::try_from(u64_at(16)).map_err(|_| Error::format("label count out of range"))?;
        let tables = n
            .checked_mul(12)
            .and_then(|t| t.checked_add(8 + HEADER_LEN))
            .filter(|&t| t <= body.len())
            .ok_or_else(|| Error::format("tables exceed file"))?;
        let offsets_at = HEADER_LEN;
        let lengths_at = offsets_at + 8 * (n + 1);
        let payload = &body[tables..];
        if u64_at(offsets_at + 8 * n) != payload.len() as u64 {
            return Err(Error::format("payload size disagrees with offset table"));
        }
        let mut labels = Vec::with_capacity(n);
        for v in 0..n {
            let start = u64_at(offsets_at + 8 * v);
            let end = u64_at(offsets_at + 8 * (v + 1));
            if start > end || end > payload.len() as u64 {
                return Err(Error::format(format!("bad offsets for label {v}")));
            }
            let at = lengths_at + 4 * v;
            let len = u32::from_le_bytes(body[at..at + 4].try_into().unwrap()) as usize;
            let bytes = payload[start as usize..end as usize].to_vec();
            let bits = BitStream::from_bytes(bytes, len)?;
            labels.push(Label {
                scheme,
                fingerprint,
                bits,
            });
        }
        Ok(LabelSet {
            scheme,
            fingerprint,
            labels,
        })
    }
}
