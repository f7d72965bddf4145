//! Subdivided-cycle gadgets and the augmented graph.
//!
//! A subdivided cycle `D_s` over the cycle `v_0 .. v_{s-1}` is empty for
//! `s <= 4`. For larger `s` it adds a ring of `t = ceil(s / 2)` auxiliary
//! vertices `u_0 .. u_{t-1}`, joins `v_k` to `u_{k / 2}`, and recurses on the
//! ring. Distances along the outer cycle shrink logarithmically through the
//! rings, which is what makes separator gaps cheap to encode.
//!
//! Augmenting a graph replaces every face walk of length `s` by `D_s` drawn
//! inside that face. Walk positions, not vertices, are identified with the
//! gadget cycle, so a vertex that occurs twice on a face gets two spokes.

use crate::error::{Error, Result};
use crate::planar::{bfs_distances, enumerate_faces, Faces, RotationGraph};

/// Number of auxiliary vertices of `D_s`.
pub fn aux_count(s: usize) -> usize {
    let mut total = 0;
    let mut s = s;
    while s > 4 {
        s = s.div_ceil(2);
        total += s;
    }
    total
}

/// Rings of one gadget, laid out so that it embeds inside a face whose walk
/// visits the outer positions in order.
struct Rings {
    /// Rotations of the auxiliary vertices, ids `first_id..`.
    rotations: Vec<Vec<usize>>,
    /// Ring depth (1 = adjacent to the outer cycle) per auxiliary vertex.
    level: Vec<u32>,
    /// Index within its ring per auxiliary vertex.
    ring_index: Vec<usize>,
    /// Auxiliary neighbour of each outer position, if any.
    outer_spokes: Vec<Option<usize>>,
}

/// Ring `u_0..u_{t-1}` inside a walk `w_0..w_{s-1}`: `u_j` has rotation
/// `[u_{j+1}, w_{2j+1}, w_{2j}, u_{j-1}]`, which closes triangles
/// `(w_{2j}, w_{2j+1}, u_j)` and squares `(w_{2j+1}, w_{2j+2}, u_{j+1}, u_j)`,
/// and leaves the corner between `u_{j-1}` and `u_{j+1}` for the next ring.
fn build_rings(outer: &[usize], first_id: usize) -> Rings {
    let mut rings = Rings {
        rotations: Vec::new(),
        level: Vec::new(),
        ring_index: Vec::new(),
        outer_spokes: vec![None; outer.len()],
    };
    let mut current = outer.to_vec();
    let mut level = 1;
    while current.len() > 4 {
        let s = current.len();
        let t = s.div_ceil(2);
        let base = first_id + rings.rotations.len();
        for j in 0..t {
            let mut rot = Vec::with_capacity(5);
            rot.push(base + (j + 1) % t);
            if 2 * j + 1 < s {
                rot.push(current[2 * j + 1]);
            }
            rot.push(current[2 * j]);
            rot.push(base + (j + t - 1) % t);
            rings.rotations.push(rot);
            rings.level.push(level);
            rings.ring_index.push(j);
        }
        for (k, &w) in current.iter().enumerate() {
            let spoke = base + k / 2;
            if level == 1 {
                rings.outer_spokes[k] = Some(spoke);
            } else {
                // The inner corner of a ring vertex is at the end of its
                // rotation.
                rings.rotations[w - first_id].push(spoke);
            }
        }
        current = (base..base + t).collect();
        level += 1;
    }
    rings
}

#[derive(Clone, Debug)]
pub struct SubdividedCycle {
    s: usize,
    graph: RotationGraph,
    /// 0 for cycle vertices, ring depth for auxiliary vertices.
    levels: Vec<u32>,
}

impl SubdividedCycle {
    pub fn cycle_len(&self) -> usize {
        self.s
    }

    pub fn aux_count(&self) -> usize {
        self.graph.vertex_count() - self.s
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `D_s` as an embedded graph: cycle vertices `0..s`, auxiliary `s..`.
    pub fn graph(&self) -> &RotationGraph {
        &self.graph
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges().collect()
    }

    /// Auxiliary vertices in the first ring.
    pub fn first_ring(&self) -> Vec<usize> {
        (self.s..self.vertex_count())
            .filter(|&v| self.levels[v] == 1)
            .collect()
    }
}

pub fn build_subdivided_cycle(s: usize) -> Result<SubdividedCycle> {
    if s < 3 {
        return Err(Error::Size(s));
    }
    let outer: Vec<usize> = (0..s).collect();
    let rings = build_rings(&outer, s);
    // Walk 0 -> 1 -> ... on the side where v_{k-1} precedes v_{k+1}; the
    // spoke of position k goes before the dart v_k -> v_{k+1}.
    let mut rotations: Vec<Vec<usize>> = (0..s)
        .map(|k| {
            let mut rot = vec![(k + s - 1) % s];
            if let Some(u) = rings.outer_spokes[k] {
                rot.push(u);
            }
            rot.push((k + 1) % s);
            rot
        })
        .collect();
    rotations.extend(rings.rotations);
    let graph = RotationGraph::from_rotations(rotations)?;
    let mut levels = vec![0; s];
    levels.extend(rings.level);
    Ok(SubdividedCycle { s, graph, levels })
}

/// Distance along the cycle `C_s` between positions `i` and `j`.
pub fn cycle_distance(s: usize, i: usize, j: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(s - d)
}

/// True iff every pair of cycle vertices of `D_s` is at least
/// `log2(1 + cycle distance)` hops apart in `D_s`.
pub fn gadget_distance_check(s: usize) -> bool {
    let Ok(gadget) = build_subdivided_cycle(s) else {
        return false;
    };
    (0..s).all(|u| {
        let row = bfs_distances(gadget.graph(), u);
        (0..s).all(|v| {
            let in_gadget = row.distances[v] as f64;
            let on_cycle = cycle_distance(s, u, v) as f64;
            in_gadget >= (1.0 + on_cycle).log2()
        })
    })
}

/// Where an auxiliary vertex of the augmented graph came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxOrigin {
    /// Face of the original graph whose gadget contains the vertex.
    pub face: usize,
    /// Ring depth, 1 for the ring attached to the face walk.
    pub level: u32,
    /// Index within the ring; a first-ring vertex with index `j` is joined to
    /// walk positions `2j` and `2j + 1`.
    pub ring_index: usize,
}

/// `G'`: the input with every face walk replaced by its subdivided cycle.
///
/// Original vertices keep their ids `0..n`; auxiliary vertices follow.
#[derive(Clone, Debug)]
pub struct AugmentedGraph {
    pub graph: RotationGraph,
    pub original_count: usize,
    /// Origin of each auxiliary vertex, indexed by `id - original_count`.
    pub aux_origin: Vec<AuxOrigin>,
    /// Per face of the original graph, the original vertex at each walk
    /// position.
    pub cycle_identification: Vec<Vec<usize>>,
}

impl AugmentedGraph {
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_original(&self, v: usize) -> bool {
        v < self.original_count
    }

    /// 1 for original vertices, 0 for auxiliary ones.
    pub fn weight(&self, v: usize) -> u64 {
        u64::from(self.is_original(v))
    }

    pub fn weights(&self) -> Vec<u64> {
        (0..self.vertex_count()).map(|v| self.weight(v)).collect()
    }

    pub fn total_weight(&self) -> u64 {
        self.original_count as u64
    }

    pub fn origin(&self, v: usize) -> Option<&AuxOrigin> {
        v.checked_sub(self.original_count)
            .map(|i| &self.aux_origin[i])
    }

    /// Walk position of the spoke between original vertex `orig` and
    /// first-ring auxiliary vertex `aux`.
    pub fn spoke_position(&self, orig: usize, aux: usize) -> Option<(usize, usize)> {
        let origin = self.origin(aux)?;
        if origin.level != 1 {
            return None;
        }
        let walk = &self.cycle_identification[origin.face];
        let j = origin.ring_index;
        [2 * j, 2 * j + 1]
            .into_iter()
            .find(|&k| k < walk.len() && walk[k] == orig)
            .map(|k| (origin.face, k))
    }

    /// Graph file text followed by a `# weights:` annotation line.
    pub fn to_annotated_text(&self) -> String {
        let mut text = self.graph.to_string();
        text.push_str("# weights:");
        for v in 0..self.vertex_count() {
            text.push(' ');
            text.push(if self.is_original(v) { '1' } else { '0' });
        }
        text.push('\n');
        text
    }
}

/// Replaces every face of `g` (outer face included) with a subdivided cycle.
pub fn augment_with_gadgets(g: &RotationGraph) -> Result<AugmentedGraph> {
    let faces = enumerate_faces(g)?;
    augment_with_faces(g, &faces)
}

pub(crate) fn augment_with_faces(g: &RotationGraph, faces: &Faces) -> Result<AugmentedGraph> {
    let n = g.vertex_count();
    let mut before = vec![None; g.dart_count()];
    let mut extra: Vec<Vec<usize>> = Vec::new();
    let mut aux_origin = Vec::new();
    let mut cycle_identification = Vec::with_capacity(faces.count());
    for face in faces.iter() {
        let walk = face.vertices(g);
        if walk.len() > 4 {
            let rings = build_rings(&walk, n + extra.len());
            for (k, spoke) in rings.outer_spokes.iter().enumerate() {
                before[face.darts[k]] = *spoke;
            }
            for i in 0..rings.rotations.len() {
                aux_origin.push(AuxOrigin {
                    face: face.id,
                    level: rings.level[i],
                    ring_index: rings.ring_index[i],
                });
            }
            extra.extend(rings.rotations);
        }
        cycle_identification.push(walk);
    }
    let graph = g.with_insertions(&before, extra)?;
    Ok(AugmentedGraph {
        graph,
        original_count: n,
        aux_origin,
        cycle_identification,
    })
}
