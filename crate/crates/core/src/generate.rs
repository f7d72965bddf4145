//! Deterministic generators for embedded planar test graphs.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::planar::RotationGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Grid,
    Cylinder,
    RandomTriangulation,
    BigFace,
    Tree,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Grid,
        Family::Cylinder,
        Family::RandomTriangulation,
        Family::BigFace,
        Family::Tree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Grid => "grid",
            Family::Cylinder => "cylinder",
            Family::RandomTriangulation => "random-triangulation",
            Family::BigFace => "big-face",
            Family::Tree => "tree",
        }
    }

    /// A graph of this family with exactly `n` vertices.
    ///
    /// Grid and cylinder pick the most square factorisation of `n`; big-face
    /// uses `n / 16` chords.
    pub fn generate(self, n: usize, seed: u64) -> RotationGraph {
        match self {
            Family::Grid => {
                let rows = squarest_divisor(n, 1);
                grid(rows, n / rows.max(1))
            }
            Family::Cylinder => {
                if n < 3 {
                    return path(n);
                }
                let rings = squarest_divisor(n, 3);
                cylinder(rings, n / rings)
            }
            Family::RandomTriangulation => random_triangulation(n, seed),
            Family::BigFace => big_face(n, n / 16, seed),
            Family::Tree => random_tree(n, seed),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

/// Largest divisor `r` of `n` with `r * r <= n` and `n / r >= min_other`.
fn squarest_divisor(n: usize, min_other: usize) -> usize {
    if n == 0 {
        return 0;
    }
    (1..=n)
        .take_while(|r| r * r <= n)
        .filter(|r| n.is_multiple_of(*r) && n / r >= min_other)
        .last()
        .unwrap_or(1)
}

fn build(rotations: Vec<Vec<usize>>) -> RotationGraph {
    RotationGraph::from_rotations(rotations).expect("generator emits a valid rotation system")
}

pub fn path(n: usize) -> RotationGraph {
    let rotations = (0..n)
        .map(|v| {
            let mut rot = Vec::new();
            if v > 0 {
                rot.push(v - 1);
            }
            if v + 1 < n {
                rot.push(v + 1);
            }
            rot
        })
        .collect();
    build(rotations)
}

pub fn cycle(n: usize) -> RotationGraph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    build((0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect())
}

/// `rows x cols` grid; vertex `(r, c)` has id `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> RotationGraph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut rotations = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            // up, right, down, left
            let mut rot = Vec::with_capacity(4);
            if r > 0 {
                rot.push(id(r - 1, c));
            }
            if c + 1 < cols {
                rot.push(id(r, c + 1));
            }
            if r + 1 < rows {
                rot.push(id(r + 1, c));
            }
            if c > 0 {
                rot.push(id(r, c - 1));
            }
            rotations.push(rot);
        }
    }
    build(rotations)
}

/// `rings` concentric cycles of length `ring_len >= 3` joined by radial edges;
/// vertex `(i, j)` has id `i * ring_len + j`, ring 0 innermost.
pub fn cylinder(rings: usize, ring_len: usize) -> RotationGraph {
    assert!(ring_len >= 3, "rings need at least 3 vertices");
    let k = ring_len;
    let id = |i: usize, j: usize| i * k + j;
    let mut rotations = Vec::with_capacity(rings * k);
    for i in 0..rings {
        for j in 0..k {
            // outward, forward along the ring, inward, backward
            let mut rot = Vec::with_capacity(4);
            if i + 1 < rings {
                rot.push(id(i + 1, j));
            }
            rot.push(id(i, (j + 1) % k));
            if i > 0 {
                rot.push(id(i - 1, j));
            }
            rot.push(id(i, (j + k - 1) % k));
            rotations.push(rot);
        }
    }
    build(rotations)
}

/// Maximal planar graph grown by inserting each new vertex into a uniformly
/// chosen face of the current triangulation (outer face included).
pub fn random_triangulation(n: usize, seed: u64) -> RotationGraph {
    if n < 3 {
        return path(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rotations: Vec<Vec<usize>> = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
    // Faces as vertex triples in traversal order.
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    for x in 3..n {
        let f = rng.gen_range(0..faces.len());
        let [a, b, c] = faces[f];
        // The corner of face (a, b, c) at b sits right after a in b's rotation.
        for (v, prev) in [(b, a), (c, b), (a, c)] {
            let rot = &mut rotations[v];
            let at = rot
                .iter()
                .position(|&w| w == prev)
                .expect("face corner exists");
            rot.insert(at + 1, x);
        }
        rotations.push(vec![a, c, b]);
        faces[f] = [a, b, x];
        faces.push([b, c, x]);
        faces.push([c, a, x]);
    }
    build(rotations)
}

/// Cycle `C_n` with up to `chords` random non-crossing chords.
pub fn big_face(n: usize, chords: usize, seed: u64) -> RotationGraph {
    if n < 3 {
        return path(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut neighbours: Vec<Vec<usize>> =
        (0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect();
    // Polygons still available for splitting, as vertex lists in cyclic order.
    let mut polygons: Vec<Vec<usize>> = vec![(0..n).collect()];
    for _ in 0..chords {
        let candidates: Vec<usize> = (0..polygons.len())
            .filter(|&p| polygons[p].len() >= 4)
            .collect();
        let Some(&p) = candidates.choose(&mut rng) else {
            break;
        };
        let poly = polygons.swap_remove(p);
        let k = poly.len();
        let i = rng.gen_range(0..k);
        let j = (i + rng.gen_range(2..k - 1)) % k;
        let (i, j) = (i.min(j), i.max(j));
        neighbours[poly[i]].push(poly[j]);
        neighbours[poly[j]].push(poly[i]);
        polygons.push(poly[i..=j].to_vec());
        let mut rest = poly[j..].to_vec();
        rest.extend_from_slice(&poly[..=i]);
        polygons.push(rest);
    }
    // Convex position: angular order around v follows (w - v) mod n.
    for (v, rot) in neighbours.iter_mut().enumerate() {
        rot.sort_by_key(|&w| (w + n - v) % n);
    }
    build(neighbours)
}

/// Random recursive tree: vertex `i` hangs off a uniform earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> RotationGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rotations: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 1..n {
        let p = rng.gen_range(0..v);
        rotations[p].push(v);
        rotations[v].push(p);
    }
    build(rotations)
}

/// Places the graphs side by side with shifted vertex ids.
pub fn disjoint_union(parts: &[RotationGraph]) -> RotationGraph {
    let mut rotations = Vec::new();
    for g in parts {
        let shift = rotations.len();
        for v in 0..g.vertex_count() {
            rotations.push(g.neighbors(v).iter().map(|w| w + shift).collect());
        }
    }
    build(rotations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::{connected_components, enumerate_faces};

    #[test]
    fn grid_counts() {
        let g = grid(3, 3);
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 12));
    }

    #[test]
    fn big_face_without_chords_is_a_cycle() {
        let g = big_face(10, 0, 1);
        let faces = enumerate_faces(&g).unwrap();
        assert_eq!(g.edge_count(), 10);
        assert_eq!(faces.count(), 2);
        assert!(faces.iter().all(|f| f.len() == 10));
    }

    #[test]
    fn random_triangulation_is_maximal() {
        let g = random_triangulation(100, 7);
        assert_eq!(g.edge_count(), 294);
        let faces = enumerate_faces(&g).unwrap();
        assert!(faces.iter().all(|f| f.len() == 3));
    }

    #[test]
    fn families_are_valid_and_deterministic() {
        for family in Family::ALL {
            for n in (0..60).chain([97, 128, 300]) {
                let g = family.generate(n, 3);
                assert_eq!(g.vertex_count(), n, "{family} n={n}");
                enumerate_faces(&g).unwrap_or_else(|e| panic!("{family} n={n}: {e}"));
                if n > 0 {
                    assert_eq!(connected_components(&g).count, 1, "{family} n={n}");
                }
                assert_eq!(g, family.generate(n, 3));
                assert_eq!(g.to_string(), family.generate(n, 3).to_string());
            }
        }
    }

    #[test]
    fn big_face_chords_do_not_cross() {
        for seed in 0..20 {
            let g = big_face(40, 12, seed);
            assert_eq!(g.edge_count(), 52);
            enumerate_faces(&g).unwrap();
        }
    }

    #[test]
    fn family_names_round_trip() {
        for family in Family::ALL {
            assert_eq!(family.name().parse::<Family>().unwrap(), family);
        }
        assert!("torus".parse::<Family>().is_err());
    }
}
