//! Weighted cycle separators in the augmented graph and their projection to
//! ordered separators of the input graph.
//!
//! The cycle comes from a BFS spanning tree of the triangulated augmented
//! graph. Every non-tree edge closes a fundamental cycle, and the duals of the
//! non-tree edges form a spanning tree of the faces, so removing one dual edge
//! splits the faces into the two sides of its cycle. Face subtree sums then
//! give the weight strictly inside each cycle in O(log n) per edge.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::gadget::{augment_with_gadgets, cycle_distance, AugmentedGraph};
use crate::planar::{
    components_avoiding, connected_components, enumerate_faces, Faces, RotationGraph,
};

/// The augmented graph with one diagonal added to every square face.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub graph: RotationGraph,
    /// Diagonal `{p, r}` (key sorted) to its square's corners `[p, q, r, s]`
    /// in walk order.
    pub diagonals: HashMap<(usize, usize), [usize; 4]>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

pub fn triangulate_squares(ag: &AugmentedGraph) -> Result<Triangulation> {
    let g = &ag.graph;
    let faces = enumerate_faces(g)?;
    let mut before = vec![None; g.dart_count()];
    let mut diagonals = HashMap::new();
    let adjacent = |a: usize, b: usize, added: &HashMap<(usize, usize), [usize; 4]>| {
        let (lo, hi) = if g.degree(a) <= g.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        g.neighbors(lo).contains(&hi) || added.contains_key(&edge_key(a, b))
    };
    for face in faces.iter() {
        match face.len() {
            3 => continue,
            4 => {}
            s => {
                return Err(Error::embedding(format!(
                    "face {} of the augmented graph has size {s}",
                    face.id
                )))
            }
        }
        let d = face.darts;
        let [a, b, c, e] = [g.tail(d[0]), g.tail(d[1]), g.tail(d[2]), g.tail(d[3])];
        if a != c && !adjacent(a, c, &diagonals) {
            before[d[0]] = Some(c);
            before[d[2]] = Some(a);
            diagonals.insert(edge_key(a, c), [a, b, c, e]);
        } else if b != e && !adjacent(b, e, &diagonals) {
            before[d[1]] = Some(e);
            before[d[3]] = Some(b);
            diagonals.insert(edge_key(b, e), [b, c, e, a]);
        } else {
            return Err(Error::embedding(format!(
                "square face {} ({a} {b} {c} {e}) admits no diagonal",
                face.id
            )));
        }
    }
    let graph = g.with_insertions(&before, Vec::new())?;
    Ok(Triangulation { graph, diagonals })
}

/// A closed walk in the augmented graph whose vertex set is a weighted
/// separator.
#[derive(Clone, Debug)]
pub struct CycleSeparator {
    /// Consecutive vertices are adjacent in the augmented graph; the last
    /// vertex is adjacent to the first.
    pub walk: Vec<usize>,
    /// Distinct walk vertices, sorted.
    pub members: Vec<usize>,
    /// Largest weight of a component of the augmented graph minus `members`.
    pub max_component_weight: u64,
    pub total_weight: u64,
    /// Length of the fundamental cycle before diagonals were replaced by
    /// detours.
    pub fundamental_len: usize,
}

impl CycleSeparator {
    pub fn walk_len(&self) -> usize {
        self.walk.len()
    }

    /// `ceil(2/3 * total weight)`.
    pub fn balance_bound(&self) -> u64 {
        (2 * self.total_weight).div_ceil(3)
    }
}

/// Ancestor tables for a rooted BFS tree.
struct Lifting {
    depth: Vec<u32>,
    up: Vec<Vec<u32>>,
}

impl Lifting {
    fn new(parent: &[usize], depth: Vec<u32>) -> Self {
        let max_depth = depth.iter().copied().max().unwrap_or(0);
        let levels = (32 - max_depth.leading_zeros()).max(1) as usize;
        let mut up = Vec::with_capacity(levels);
        up.push(parent.iter().map(|&p| p as u32).collect::<Vec<u32>>());
        for k in 1..levels {
            let prev: &Vec<u32> = &up[k - 1];
            let next = prev.iter().map(|&p| prev[p as usize]).collect();
            up.push(next);
        }
        Lifting { depth, up }
    }

    fn ancestor_at(&self, mut v: usize, depth: u32) -> usize {
        let mut lift = self.depth[v] - depth;
        let mut k = 0;
        while lift > 0 {
            if lift & 1 == 1 {
                v = self.up[k][v] as usize;
            }
            lift >>= 1;
            k += 1;
        }
        v
    }

    fn lca(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = if self.depth[a] >= self.depth[b] {
            (a, b)
        } else {
            (b, a)
        };
        a = self.ancestor_at(a, self.depth[b]);
        if a == b {
            return a;
        }
        for k in (0..self.up.len()).rev() {
            let (pa, pb) = (self.up[k][a], self.up[k][b]);
            if pa != pb {
                a = pa as usize;
                b = pb as usize;
            }
        }
        self.up[0][a] as usize
    }
}

/// Inside/outside weights of one fundamental cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct CycleSides {
    /// Non-tree dart `x -> y` closing the cycle.
    pub dart: usize,
    pub lca: usize,
    pub len: usize,
    /// Weight strictly on the side of the dual subtree.
    pub inner: u64,
    pub outer: u64,
}

/// BFS tree of a triangulated graph plus the dual tree of its non-tree edges.
pub(crate) struct FundamentalCycles<'a> {
    g: &'a RotationGraph,
    weights: &'a [u64],
    parent: Vec<usize>,
    /// Dart `v -> parent(v)`.
    parent_dart: Vec<usize>,
    lifting: Lifting,
    /// Dart charged with each vertex's weight.
    assigned: Vec<usize>,
    /// Faces in dual BFS order, root face first.
    pub face_order: Vec<usize>,
    /// Dart of face `f` whose twin lies in the parent face.
    pub up_dart: Vec<usize>,
    /// Weight charged to the dual subtree of each face.
    subtree: Vec<u64>,
    path_weight: Vec<u64>,
    total: u64,
}

impl<'a> FundamentalCycles<'a> {
    pub fn new(
        g: &'a RotationGraph,
        faces: &Faces,
        weights: &'a [u64],
        root: usize,
    ) -> Result<Self> {
        let n = g.vertex_count();
        let mut parent = vec![usize::MAX; n];
        let mut parent_dart = vec![usize::MAX; n];
        let mut depth = vec![0u32; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        parent[root] = root;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for d in g.darts_of(v) {
                let w = g.head(d);
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    parent_dart[w] = g.twin(d);
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Separator("graph is disconnected".into()));
        }
        let is_tree = |d: usize| parent_dart[g.tail(d)] == d || parent_dart[g.head(d)] == g.twin(d);

        let face_count = faces.count();
        let mut up_dart = vec![usize::MAX; face_count];
        let mut face_order = Vec::with_capacity(face_count);
        let mut seen = vec![false; face_count];
        seen[0] = true;
        let mut fqueue = VecDeque::from([0usize]);
        while let Some(f) = fqueue.pop_front() {
            face_order.push(f);
            for &d in faces.walk(f).darts {
                if is_tree(d) {
                    continue;
                }
                let t = g.twin(d);
                let h = faces.face_of(t);
                if !seen[h] {
                    seen[h] = true;
                    up_dart[h] = t;
                    fqueue.push_back(h);
                }
            }
        }
        if face_order.len() != face_count {
            return Err(Error::Separator(
                "non-tree edges do not span the dual".into(),
            ));
        }

        // Each vertex's weight is charged to the face of its parent dart (the
        // root uses its first dart).
        let assigned: Vec<usize> = (0..n)
            .map(|v| {
                if v == root {
                    g.darts_of(v).start
                } else {
                    parent_dart[v]
                }
            })
            .collect();
        let mut subtree = vec![0u64; face_count];
        for v in 0..n {
            subtree[faces.face_of(assigned[v])] += weights[v];
        }
        for &f in face_order.iter().skip(1).rev() {
            let p = faces.face_of(g.twin(up_dart[f]));
            subtree[p] += subtree[f];
        }
        let mut path_weight = vec![0u64; n];
        for &v in &order {
            let above = if v == root { 0 } else { path_weight[parent[v]] };
            path_weight[v] = above + weights[v];
        }
        let lifting = Lifting::new(&parent, depth);
        Ok(FundamentalCycles {
            g,
            weights,
            parent,
            parent_dart,
            lifting,
            assigned,
            face_order,
            up_dart,
            subtree,
            path_weight,
            total: weights.iter().sum(),
        })
    }

    /// Weights on both sides of the cycle closed by the dual edge above
    /// non-root face `f`.
    pub fn evaluate(&self, f: usize) -> CycleSides {
        let g = self.g;
        // Orient the cycle as x -> y -> .. -> lca -> .. -> x so that the faces
        // of its darts lie on f's side. Parent darts on the y branch are cycle
        // darts (face on f's side); those on the x branch are reversed.
        let e = self.up_dart[f];
        let (x, y) = (g.tail(e), g.head(e));
        let lifting = &self.lifting;
        let lca = lifting.lca(x, y);
        let lca_depth = lifting.depth[lca];
        let into_lca = if y == lca {
            g.twin(e)
        } else {
            g.twin(self.parent_dart[lifting.ancestor_at(y, lca_depth + 1)])
        };
        let out_of_lca = if x == lca {
            e
        } else {
            g.twin(self.parent_dart[lifting.ancestor_at(x, lca_depth + 1)])
        };
        // f's side at the lca spans the corners from the incoming to the
        // outgoing cycle edge; the face of the dart at position j owns corner
        // j - 1.
        let deg = g.degree(lca);
        let (a, b) = (g.position(into_lca), g.position(out_of_lca));
        let corner = (g.position(self.assigned[lca]) + deg - 1) % deg;
        let lca_inside = (corner + deg - a) % deg < (b + deg - a) % deg;

        let y_branch = self.path_weight[y] - self.path_weight[lca];
        let x_branch = self.path_weight[x] - self.path_weight[lca];
        let lca_weight = self.weights[lca];
        let charged = y_branch + if lca_inside { lca_weight } else { 0 };
        debug_assert!(self.subtree[f] >= charged);
        let inner = self.subtree[f] - charged;
        let outer = self.total - x_branch - y_branch - lca_weight - inner;
        let len = (lifting.depth[x] + lifting.depth[y] - 2 * lca_depth) as usize + 1;
        CycleSides {
            dart: e,
            lca,
            len,
            inner,
            outer,
        }
    }

    /// Cycle vertices in orientation order, starting at `x`.
    pub fn cycle(&self, sides: &CycleSides) -> Vec<usize> {
        let (x, y) = (self.g.tail(sides.dart), self.g.head(sides.dart));
        let lca = sides.lca;
        let mut cycle = vec![x];
        let mut v = y;
        while v != lca {
            cycle.push(v);
            v = self.parent[v];
        }
        if lca != x {
            cycle.push(lca);
            let mut down = Vec::new();
            let mut v = self.parent[x];
            while v != lca {
                down.push(v);
                v = self.parent[v];
            }
            cycle.extend(down.into_iter().rev());
        }
        debug_assert_eq!(cycle.len(), sides.len);
        cycle
    }
}

/// Finds a balanced fundamental cycle of the triangulated augmented graph,
/// rooted at vertex 0, and maps it back to a walk in the augmented graph.
///
/// Among balanced cycles the shortest is taken, ties going to the earliest
/// face in dual BFS order.
pub fn weighted_cycle_separator(ag: &AugmentedGraph) -> Result<CycleSeparator> {
    let n = ag.vertex_count();
    if n < 3 {
        return Err(Error::Separator(format!(
            "augmented graph has {n} vertices, need at least 3"
        )));
    }
    if connected_components(&ag.graph).count != 1 {
        return Err(Error::Separator("augmented graph is disconnected".into()));
    }
    let tri = triangulate_squares(ag)?;
    let faces = enumerate_faces(&tri.graph)?;
    if let Some(f) = faces.iter().find(|f| f.len() != 3) {
        return Err(Error::Separator(format!(
            "face {} has size {} after triangulation",
            f.id,
            f.len()
        )));
    }
    let weights = ag.weights();
    let total = ag.total_weight();
    let search = FundamentalCycles::new(&tri.graph, &faces, &weights, 0)?;

    let mut best: Option<CycleSides> = None;
    for &f in search.face_order.iter().skip(1) {
        let sides = search.evaluate(f);
        if 3 * sides.inner.max(sides.outer) > 2 * total {
            continue;
        }
        if best.is_none_or(|b| sides.len < b.len) {
            best = Some(sides);
        }
    }
    let Some(best) = best else {
        return Err(Error::Separator(format!(
            "no balanced fundamental cycle among {} candidates",
            faces.count() - 1
        )));
    };
    let cycle = search.cycle(&best);

    let walk = replace_diagonals(&cycle, &tri, ag);
    let mut removed = vec![false; n];
    for &v in &walk {
        removed[v] = true;
    }
    let comps = components_avoiding(&ag.graph, &removed);
    let mut weights = vec![0u64; comps.count];
    for v in 0..n {
        if !removed[v] {
            weights[comps.ids[v]] += ag.weight(v);
        }
    }
    let max_component_weight = weights.into_iter().max().unwrap_or(0);
    let mut members: Vec<usize> = walk.clone();
    members.sort_unstable();
    members.dedup();
    let sep = CycleSeparator {
        walk,
        members,
        max_component_weight,
        total_weight: total,
        fundamental_len: best.len,
    };
    if sep.max_component_weight > sep.balance_bound() {
        return Err(Error::Separator(format!(
            "cycle leaves a component of weight {} > {}",
            sep.max_component_weight,
            sep.balance_bound()
        )));
    }
    Ok(sep)
}

/// Swaps each diagonal step `p -> r` of the cycle for a detour through one of
/// its square's other corners, preferring a corner not yet on the walk and
/// then an auxiliary one.
fn replace_diagonals(cycle: &[usize], tri: &Triangulation, ag: &AugmentedGraph) -> Vec<usize> {
    let on_walk: HashSet<usize> = cycle.iter().copied().collect();
    let mut walk = Vec::with_capacity(cycle.len() + 8);
    for (i, &a) in cycle.iter().enumerate() {
        walk.push(a);
        let b = cycle[(i + 1) % cycle.len()];
        if let Some(&[_, q, _, s]) = tri.diagonals.get(&edge_key(a, b)) {
            let rank = |v: usize| (on_walk.contains(&v), ag.is_original(v));
            let corner = if rank(s) < rank(q) { s } else { q };
            walk.push(corner);
        }
    }
    walk
}

/// Ordered separator of the input graph.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatorResult {
    /// `u_1 .. u_c`, distinct original vertices in cyclic walk order.
    pub order: Vec<usize>,
    /// `gaps[i]` bounds `dist(u_i, u_{i+1})`, cyclically; empty when `c = 1`.
    pub gaps: Vec<usize>,
    /// Sum of `log2(1 + gap)`.
    pub log_sum: f64,
    /// Largest component of the graph minus the separator.
    pub max_component: usize,
    pub vertex_count: usize,
}

impl SeparatorResult {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `ceil(2n / 3)`.
    pub fn balance_bound(&self) -> usize {
        (2 * self.vertex_count).div_ceil(3)
    }
}

/// Keeps the original vertices of the cycle walk and certifies the distance
/// between consecutive ones by their distance along the face walk whose
/// gadget the cycle crossed.
pub fn project_separator(
    cs: &CycleSeparator,
    ag: &AugmentedGraph,
    g: &RotationGraph,
) -> Result<SeparatorResult> {
    let walk = &cs.walk;
    let occurrences: Vec<usize> = (0..walk.len())
        .filter(|&i| ag.is_original(walk[i]))
        .collect();
    if occurrences.is_empty() {
        return Err(Error::Separator("cycle contains no original vertex".into()));
    }
    let k = occurrences.len();
    let mut segment_gaps = Vec::with_capacity(k);
    for i in 0..k {
        let from = occurrences[i];
        let to = occurrences[(i + 1) % k];
        let (o1, o2) = (walk[from], walk[to]);
        let first = (from + 1) % walk.len();
        if first == to && k > 1 {
            segment_gaps.push(1);
            continue;
        }
        let last = (to + walk.len() - 1) % walk.len();
        let (a1, a2) = (walk[first], walk[last]);
        let (f1, p1) = ag.spoke_position(o1, a1).ok_or_else(|| {
            Error::Separator(format!("walk step {o1} -> {a1} is not a gadget spoke"))
        })?;
        let (f2, p2) = ag.spoke_position(o2, a2).ok_or_else(|| {
            Error::Separator(format!("walk step {a2} -> {o2} is not a gadget spoke"))
        })?;
        if f1 != f2 {
            return Err(Error::Separator(format!(
                "walk crosses from gadget {f1} to gadget {f2} without an original vertex"
            )));
        }
        let s = ag.cycle_identification[f1].len();
        segment_gaps.push(cycle_distance(s, p1, p2));
    }

    let mut order = Vec::new();
    let mut gaps = Vec::new();
    let mut seen = vec![false; g.vertex_count()];
    let mut acc = 0;
    for i in 0..k {
        let v = walk[occurrences[i]];
        if !seen[v] {
            seen[v] = true;
            if !order.is_empty() {
                gaps.push(acc);
            }
            order.push(v);
            acc = 0;
        }
        acc += segment_gaps[i];
    }
    if order.len() >= 2 {
        gaps.push(acc);
    }
    let log_sum = gaps
        .iter()
        .fold(0.0, |acc, &gap| acc + (1.0 + gap as f64).log2());

    let mut removed = vec![false; g.vertex_count()];
    for &v in &order {
        removed[v] = true;
    }
    let comps = components_avoiding(g, &removed);
    let mut sizes = vec![0usize; comps.count];
    for v in 0..g.vertex_count() {
        if !removed[v] {
            sizes[comps.ids[v]] += 1;
        }
    }
    let result = SeparatorResult {
        order,
        gaps,
        log_sum,
        max_component: sizes.into_iter().max().unwrap_or(0),
        vertex_count: g.vertex_count(),
    };
    if result.max_component > result.balance_bound() {
        return Err(Error::Separator(format!(
            "projected separator leaves a component of {} > {} vertices",
            result.max_component,
            result.balance_bound()
        )));
    }
    Ok(result)
}

/// Separator of a connected graph with at least three vertices, together with
/// the intermediate cycle.
#[derive(Clone, Debug)]
pub struct Separation {
    pub result: SeparatorResult,
    pub cycle: CycleSeparator,
    pub augmented_vertices: usize,
}

pub fn find_separator(g: &RotationGraph) -> Result<Separation> {
    let ag = augment_with_gadgets(g)?;
    let cycle = weighted_cycle_separator(&ag)?;
    let result = project_separator(&cycle, &ag, g)?;
    Ok(Separation {
        result,
        cycle,
        augmented_vertices: ag.vertex_count(),
    })
}
