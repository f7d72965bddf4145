//! Embedded planar graphs given as rotation systems.
//!
//! A [`RotationGraph`] stores, for every vertex, the clockwise cyclic order of
//! its neighbours. Each undirected edge `{u, v}` is represented by two darts
//! (directed half-edges) `u -> v` and `v -> u`; dart ids are dense and grouped
//! by tail vertex, so the darts of `v` are `offsets[v]..offsets[v + 1]` in
//! rotation order.
//!
//! Faces are traced with the usual successor rule: after arriving at `v`
//! along `u -> v`, leave along `v -> w` where `w` follows `u` in the rotation
//! of `v`.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Distance sentinel for vertex pairs in different connected components.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    tails: Vec<usize>,
    twins: Vec<usize>,
}

impl RotationGraph {
    /// Builds a graph from per-vertex neighbour lists in cyclic order.
    ///
    /// Rejects self-loops, parallel edges and asymmetric lists. Planarity of
    /// the rotation system is checked separately by [`enumerate_faces`].
    pub fn from_rotations(rotations: Vec<Vec<usize>>) -> Result<Self> {
        let n = rotations.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(rotations.iter().map(Vec::len).sum());
        let mut tails = Vec::with_capacity(targets.capacity());
        offsets.push(0);
        for (v, rot) in rotations.into_iter().enumerate() {
            for w in rot {
                if w >= n {
                    return Err(Error::embedding(format!(
                        "vertex {v} lists neighbour {w}, but n = {n}"
                    )));
                }
                if w == v {
                    return Err(Error::embedding(format!("self-loop at vertex {v}")));
                }
                targets.push(w);
                tails.push(v);
            }
            offsets.push(targets.len());
        }

        let mut order: Vec<usize> = (0..targets.len()).collect();
        order.sort_unstable_by_key(|&d| (tails[d], targets[d]));
        for pair in order.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if tails[a] == tails[b] && targets[a] == targets[b] {
                return Err(Error::embedding(format!(
                    "parallel edge {} -- {}",
                    tails[a], targets[a]
                )));
            }
        }
        let mut twins = vec![0; targets.len()];
        for d in 0..targets.len() {
            let key = (targets[d], tails[d]);
            let found = order
                .binary_search_by_key(&key, |&e| (tails[e], targets[e]))
                .map_err(|_| {
                    Error::embedding(format!(
                        "asymmetric rotation: {} lists {} but not vice versa",
                        tails[d], targets[d]
                    ))
                })?;
            twins[d] = order[found];
        }

        Ok(RotationGraph {
            offsets,
            targets,
            tails,
            twins,
        })
    }

    pub fn empty(n: usize) -> Self {
        RotationGraph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            tails: Vec::new(),
            twins: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn dart_count(&self) -> usize {
        self.targets.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Neighbours of `v` in rotation order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn darts_of(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn tail(&self, dart: usize) -> usize {
        self.tails[dart]
    }

    pub fn head(&self, dart: usize) -> usize {
        self.targets[dart]
    }

    pub fn twin(&self, dart: usize) -> usize {
        self.twins[dart]
    }

    /// Index of `dart` within the rotation of its tail.
    pub fn position(&self, dart: usize) -> usize {
        dart - self.offsets[self.tails[dart]]
    }

    /// The dart following `dart` on its face.
    pub fn next_in_face(&self, dart: usize) -> usize {
        let back = self.twins[dart];
        let v = self.targets[dart];
        let start = self.offsets[v];
        let deg = self.offsets[v + 1] - start;
        start + (back - start + 1) % deg
    }

    pub fn rotations(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count())
            .map(|v| self.neighbors(v).to_vec())
            .collect()
    }

    /// Undirected edges as `(u, v)` with `u < v`, in dart order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dart_count())
            .filter(move |&d| self.tails[d] < self.targets[d])
            .map(move |d| (self.tails[d], self.targets[d]))
    }

    /// Copies the rotation system, inserting one extra neighbour in front of
    /// selected darts and appending `extra` vertices with the given rotations.
    ///
    /// `before[d] = Some(w)` places `w` in the rotation of `tail(d)` directly
    /// before the entry for dart `d`, i.e. inside the face corner that precedes
    /// `d`. The caller is responsible for the reverse entries.
    pub(crate) fn with_insertions(
        &self,
        before: &[Option<usize>],
        extra: Vec<Vec<usize>>,
    ) -> Result<RotationGraph> {
        let mut rotations = Vec::with_capacity(self.vertex_count() + extra.len());
        for v in 0..self.vertex_count() {
            let mut rot = Vec::with_capacity(self.degree(v) + 2);
            for d in self.darts_of(v) {
                if let Some(w) = before[d] {
                    rot.push(w);
                }
                rot.push(self.targets[d]);
            }
            rotations.push(rot);
        }
        rotations.extend(extra);
        RotationGraph::from_rotations(rotations)
    }

    /// Parses the line-oriented graph file format.
    ///
    /// Line 1 holds `n m`; the following `n` lines list the neighbours of
    /// vertices `0..n` in clockwise order. `#` starts a comment and lines that
    /// hold only a comment are skipped. An empty line is a vertex without
    /// neighbours.
    pub fn parse(text: &str) -> Result<RotationGraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim(), l))
            .filter(|(_, _, raw)| !raw.trim_start().starts_with('#'));

        let (header_line, header) = loop {
            match lines.next() {
                Some((no, content, _)) if !content.is_empty() => break (no, content),
                Some(_) => continue,
                None => return Err(Error::parse(0, "missing `n m` header")),
            }
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(header_line, "header must be `n m`"));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(header_line, format!("bad vertex count {:?}", fields[0])))?;
        let m: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(header_line, format!("bad edge count {:?}", fields[1])))?;

        let mut rotations = Vec::with_capacity(n);
        let mut last_line = header_line;
        for (no, content, _) in lines.by_ref() {
            if rotations.len() == n {
                if content.is_empty() {
                    continue;
                }
                return Err(Error::parse(no, format!("more than {n} vertex lines")));
            }
            let mut rot = Vec::new();
            for tok in content.split_whitespace() {
                let w: usize = tok
                    .parse()
                    .map_err(|_| Error::parse(no, format!("bad vertex id {tok:?}")))?;
                rot.push(w);
            }
            rotations.push(rot);
            last_line = no;
        }
        if rotations.len() != n {
            return Err(Error::parse(
                last_line,
                format!("expected {n} vertex lines, found {}", rotations.len()),
            ));
        }

        let g = RotationGraph::from_rotations(rotations)?;
        if g.edge_count() != m {
            return Err(Error::parse(
                header_line,
                format!(
                    "header declares {m} edges, rotations hold {}",
                    g.edge_count()
                ),
            ));
        }
        if n >= 3 && m > 3 * n - 6 {
            return Err(Error::embedding(format!(
                "{m} edges exceed the planar bound 3n - 6 = {}",
                3 * n - 6
            )));
        }
        enumerate_faces(&g)?;
        Ok(g)
    }
}

impl fmt::Display for RotationGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.vertex_count(), self.edge_count())?;
        for v in 0..self.vertex_count() {
            let mut first = true;
            for w in self.neighbors(v) {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{w}")?;
                first = false;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

/// Parses and validates a graph file.
pub fn load_graph(text: &str) -> Result<RotationGraph> {
    RotationGraph::parse(text)
}

/// All face walks of an embedding, stored contiguously.
#[derive(Clone, Debug)]
pub struct Faces {
    face_of: Vec<usize>,
    starts: Vec<usize>,
    darts: Vec<usize>,
}

/// One face walk: its darts in traversal order. Vertices may repeat.
#[derive(Clone, Copy, Debug)]
pub struct FaceWalk<'a> {
    pub id: usize,
    pub darts: &'a [usize],
}

impl FaceWalk<'_> {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// Vertex at each walk position (the tail of each dart).
    pub fn vertices(&self, g: &RotationGraph) -> Vec<usize> {
        self.darts.iter().map(|&d| g.tail(d)).collect()
    }
}

impl Faces {
    pub fn count(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn face_of(&self, dart: usize) -> usize {
        self.face_of[dart]
    }

    pub fn walk(&self, face: usize) -> FaceWalk<'_> {
        FaceWalk {
            id: face,
            darts: &self.darts[self.starts[face]..self.starts[face + 1]],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = FaceWalk<'_>> + '_ {
        (0..self.count()).map(move |f| self.walk(f))
    }
}

/// Traces every face of the embedding and checks Euler's formula per
/// connected component. An isolated vertex counts as one face.
pub fn enumerate_faces(g: &RotationGraph) -> Result<Faces> {
    let darts = g.dart_count();
    let mut face_of = vec![usize::MAX; darts];
    let mut starts = vec![0];
    let mut walk = Vec::with_capacity(darts);
    for d0 in 0..darts {
        if face_of[d0] != usize::MAX {
            continue;
        }
        let face = starts.len() - 1;
        let mut d = d0;
        loop {
            face_of[d] = face;
            walk.push(d);
            d = g.next_in_face(d);
            if d == d0 {
                break;
            }
            if face_of[d] != usize::MAX {
                return Err(Error::embedding(format!(
                    "face traversal from dart {d0} re-entered dart {d}"
                )));
            }
        }
        starts.push(walk.len());
    }
    let faces = Faces {
        face_of,
        starts,
        darts: walk,
    };

    let comps = connected_components(g);
    let mut vertices = vec![0i64; comps.count];
    let mut edges = vec![0i64; comps.count];
    let mut face_counts = vec![0i64; comps.count];
    for v in 0..g.vertex_count() {
        let c = comps.ids[v];
        vertices[c] += 1;
        edges[c] += g.degree(v) as i64;
        if g.degree(v) == 0 {
            face_counts[c] += 1;
        }
    }
    for f in faces.iter() {
        face_counts[comps.ids[g.tail(f.darts[0])]] += 1;
    }
    for c in 0..comps.count {
        let euler = vertices[c] - edges[c] / 2 + face_counts[c];
        if euler != 2 {
            return Err(Error::embedding(format!(
                "rotation system is not planar: component {c} has V - E + F = {euler}"
            )));
        }
    }
    Ok(faces)
}

/// Hop distances from one source vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceRow {
    pub source: usize,
    pub distances: Vec<u32>,
}

pub fn bfs_distances(g: &RotationGraph, source: usize) -> DistanceRow {
    let mut distances = vec![UNREACHABLE; g.vertex_count()];
    let mut queue = VecDeque::new();
    bfs_into(g, source, &mut distances, &mut queue);
    DistanceRow { source, distances }
}

/// BFS into caller-owned buffers; `dist` must already be `UNREACHABLE`
/// everywhere.
pub(crate) fn bfs_into(
    g: &RotationGraph,
    source: usize,
    dist: &mut [u32],
    queue: &mut VecDeque<usize>,
) {
    queue.clear();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let next = dist[v] + 1;
        for &w in g.neighbors(v) {
            if dist[w] == UNREACHABLE {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub ids: Vec<usize>,
    pub count: usize,
}

/// Component ids are assigned in order of each component's smallest vertex.
pub fn connected_components(g: &RotationGraph) -> Components {
    components_avoiding(g, &vec![false; g.vertex_count()])
}

/// Components of `g` with the `removed` vertices deleted. Removed vertices get
/// id `usize::MAX`.
pub fn components_avoiding(g: &RotationGraph, removed: &[bool]) -> Components {
    let n = g.vertex_count();
    let mut ids = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if removed[s] || ids[s] != usize::MAX {
            continue;
        }
        ids[s] = count;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if !removed[w] && ids[w] == usize::MAX {
                    ids[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    Components { ids, count }
}

/// An induced sub-embedding together with the ids its vertices had in the
/// parent graph.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: RotationGraph,
    pub to_parent: Vec<usize>,
}

/// Restricts `g` to `keep`, filtering each rotation to the kept neighbours.
/// New ids follow the order of `keep` after sorting. Returns the subgraph and
/// the old-to-new id map.
pub fn induced_subembedding(
    g: &RotationGraph,
    keep: &[usize],
) -> (RotationGraph, Vec<Option<usize>>) {
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut old_to_new = vec![None; g.vertex_count()];
    for (new, &old) in sorted.iter().enumerate() {
        old_to_new[old] = Some(new);
    }
    let rotations = sorted
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|&w| old_to_new[w])
                .collect()
        })
        .collect();
    let sub = RotationGraph::from_rotations(rotations)
        .expect("induced sub-embedding of a valid rotation system is valid");
    (sub, old_to_new)
}

/// Splits `g` minus `removed` into its connected components, each as an
/// induced sub-embedding, in component-id order.
pub fn split_components(g: &RotationGraph, removed: &[bool]) -> (Components, Vec<Subgraph>) {
    let comps = components_avoiding(g, removed);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); comps.count];
    let mut local = vec![usize::MAX; g.vertex_count()];
    for v in 0..g.vertex_count() {
        let c = comps.ids[v];
        if c != usize::MAX {
            local[v] = members[c].len();
            members[c].push(v);
        }
    }
    let subs = members
        .into_iter()
        .map(|to_parent| {
            let rotations = to_parent
                .iter()
                .map(|&v| {
                    g.neighbors(v)
                        .iter()
                        .filter(|&&w| !removed[w])
                        .map(|&w| local[w])
                        .collect()
                })
                .collect();
            let graph = RotationGraph::from_rotations(rotations)
                .expect("component of a valid rotation system is valid");
            Subgraph { graph, to_parent }
        })
        .collect();
    (comps, subs)
}

/// Vertices whose removal disconnects their component (iterative low-link).
pub fn articulation_points(g: &RotationGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut order = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut is_cut = vec![false; n];
    let mut counter = 0;
    // (vertex, parent dart, next dart index)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if order[root] != usize::MAX {
            continue;
        }
        order[root] = counter;
        low[root] = counter;
        counter += 1;
        let mut root_children = 0;
        stack.push((root, usize::MAX, g.offsets[root]));
        while let Some(&mut (v, parent_dart, ref mut next)) = stack.last_mut() {
            if *next < g.offsets[v + 1] {
                let d = *next;
                *next += 1;
                if parent_dart != usize::MAX && d == g.twin(parent_dart) {
                    continue;
                }
                let w = g.head(d);
                if order[w] == usize::MAX {
                    order[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, d, g.offsets[w]));
                } else {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if p != root && low[v] >= order[p] {
                        is_cut[p] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&v| is_cut[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> RotationGraph {
        load_graph("3 3\n1 2\n0 2\n0 1\n").unwrap()
    }

    fn grid(rows: usize, cols: usize) -> RotationGraph {
        crate::generate::grid(rows, cols)
    }

    #[test]
    fn loads_triangle_and_edge() {
        let g = triangle();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 3));
        let e = load_graph("2 1\n1\n0\n").unwrap();
        assert_eq!((e.vertex_count(), e.edge_count()), (2, 1));
    }

    #[test]
    fn rejects_k5_by_edge_bound() {
        let k5 = "5 10\n1 2 3 4\n0 2 3 4\n0 1 3 4\n0 1 2 4\n0 1 2 3\n";
        assert!(matches!(load_graph(k5), Err(Error::Embedding(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(load_graph("2 1\n1\n\n"), Err(Error::Embedding(_))));
        assert!(matches!(load_graph("2 1\n0\n\n"), Err(Error::Embedding(_))));
        assert!(matches!(
            load_graph("2 1\n1\nx\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load_graph("3 3\n1 2\n0 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load_graph("2 2\n1\n0\n"),
            Err(Error::Parse { .. })
        ));
        // K4 with one vertex's rotation reversed relative to a planar drawing.
        let twisted = "4 6\n1 2 3\n0 2 3\n0 1 3\n0 1 2\n";
        assert!(matches!(load_graph(twisted), Err(Error::Embedding(_))));
    }

    #[test]
    fn comments_and_isolated_vertices() {
        let g = load_graph("# isolated middle\n3 1 # header\n2\n\n0\n").unwrap();
        assert_eq!(g.degree(1), 0);
        assert_eq!(connected_components(&g).count, 2);
        let again = load_graph(&g.to_string()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn face_counts_match_euler() {
        let faces = enumerate_faces(&triangle()).unwrap();
        assert_eq!(faces.count(), 2);
        assert!(faces.iter().all(|f| f.len() == 3));

        let path = load_graph("2 1\n1\n0\n").unwrap();
        let faces = enumerate_faces(&path).unwrap();
        assert_eq!(faces.count(), 1);
        assert_eq!(faces.walk(0).len(), 2);

        let square = grid(2, 2);
        let faces = enumerate_faces(&square).unwrap();
        assert_eq!(faces.count(), 2);
        assert!(faces.iter().all(|f| f.len() == 4));
    }

    #[test]
    fn every_dart_in_exactly_one_face() {
        let g = grid(4, 5);
        let faces = enumerate_faces(&g).unwrap();
        let mut seen = vec![0; g.dart_count()];
        for f in faces.iter() {
            for &d in f.darts {
                seen[d] += 1;
                assert_eq!(faces.face_of(d), f.id);
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        let total: usize = faces.iter().map(|f| f.len()).sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn bfs_examples() {
        let p5 = crate::generate::path(5);
        assert_eq!(bfs_distances(&p5, 0).distances, vec![0, 1, 2, 3, 4]);
        assert_eq!(bfs_distances(&triangle(), 1).distances, vec![1, 0, 1]);
        let g = grid(3, 3);
        assert_eq!(bfs_distances(&g, 0).distances[8], 4);
    }

    #[test]
    fn component_examples() {
        let g = triangle();
        assert_eq!(connected_components(&g).ids, vec![0, 0, 0]);
        let two = load_graph("6 6\n1 2\n0 2\n0 1\n4 5\n3 5\n3 4\n").unwrap();
        assert_eq!(connected_components(&two).ids, vec![0, 0, 0, 1, 1, 1]);
        let c = connected_components(&RotationGraph::empty(3));
        assert_eq!(c.count, 3);
        assert_eq!(c.ids, vec![0, 1, 2]);
    }

    #[test]
    fn induced_examples() {
        let g = triangle();
        let (same, map) = induced_subembedding(&g, &[0, 1, 2]);
        assert_eq!(same, g);
        assert_eq!(map, vec![Some(0), Some(1), Some(2)]);

        let (edge, map) = induced_subembedding(&g, &[0, 2]);
        assert_eq!(edge.rotations(), vec![vec![1], vec![0]]);
        assert_eq!(map, vec![Some(0), None, Some(1)]);

        let g = grid(3, 3);
        let keep: Vec<usize> = (0..9).filter(|v| v % 3 != 1).collect();
        let (sub, _) = induced_subembedding(&g, &keep);
        let comps = connected_components(&sub);
        assert_eq!(comps.count, 2);
        assert_eq!(sub.edge_count(), 4);
        enumerate_faces(&sub).unwrap();
    }

    #[test]
    fn articulation_examples() {
        assert!(articulation_points(&triangle()).is_empty());
        assert_eq!(articulation_points(&crate::generate::path(4)), vec![1, 2]);
        assert!(articulation_points(&grid(3, 4)).is_empty());
    }
}
