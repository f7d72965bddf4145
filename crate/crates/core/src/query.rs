//! Distance queries from two labels alone.

use crate::codec::BitReader;
use crate::error::{Error, Result};
use crate::labels::{read_count, read_width, Label, Scheme};
use crate::planar::UNREACHABLE;

/// Outcome of a query together with the number of label bits it read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub distance: u32,
    pub bits_read: usize,
}

/// Exact distance between the vertices owning `a` and `b`, or
/// [`UNREACHABLE`] when they lie in different components.
pub fn decode_distance(a: &Label, b: &Label) -> Result<u32> {
    decode_distance_traced(a, b).map(|d| d.distance)
}

pub fn decode_distance_traced(a: &Label, b: &Label) -> Result<Decoded> {
    if a.scheme != b.scheme {
        return Err(Error::format("labels use different schemes"));
    }
    if a.fingerprint != b.fingerprint {
        return Err(Error::format("labels come from different graphs"));
    }
    let mut ra = a.bits.reader();
    let mut rb = b.bits.reader();
    let distance = lockstep(&mut ra, &mut rb, a.scheme)?;
    Ok(Decoded {
        distance,
        bits_read: ra.position() + rb.position(),
    })
}

fn lockstep(ra: &mut BitReader<'_>, rb: &mut BitReader<'_>, scheme: Scheme) -> Result<u32> {
    let mut best = u64::from(UNREACHABLE);
    loop {
        if read_count(ra)? != read_count(rb)? {
            return Ok(best as u32);
        }
        let tag = ra.read_bit()?;
        if tag != rb.read_bit()? {
            return Err(Error::format("labels disagree on the level kind"));
        }
        if tag {
            let c = read_count(ra)?;
            if c != read_count(rb)? {
                return Err(Error::format("labels disagree on the separator size"));
            }
            best = best.min(separator_minimum(ra, rb, scheme, c)?);
            let a_member = ra.read_bit()?;
            let b_member = rb.read_bit()?;
            if a_member || b_member {
                return Ok(best as u32);
            }
        } else {
            let k = read_count(ra)?;
            if k != read_count(rb)? {
                return Err(Error::format("labels disagree on the component size"));
            }
            read_count(ra)?;
            let target = read_count(rb)? - 1;
            if target >= k {
                return Err(Error::format(format!(
                    "vertex index {target} outside component of {k}"
                )));
            }
            let direct = match scheme {
                Scheme::Improved => {
                    for _ in 0..target {
                        ra.read_gamma()?;
                    }
                    ra.read_gamma()? - 1
                }
                Scheme::Baseline => {
                    let w = read_width(ra)?;
                    skip(ra, w as usize * target)?;
                    ra.read_bits(w)?
                }
            };
            return Ok(best.min(direct) as u32);
        }
    }
}

fn skip(r: &mut BitReader<'_>, mut bits: usize) -> Result<()> {
    while bits > 0 {
        let step = bits.min(64);
        r.read_bits(step as u32)?;
        bits -= step;
    }
    Ok(())
}

fn separator_minimum(
    ra: &mut BitReader<'_>,
    rb: &mut BitReader<'_>,
    scheme: Scheme,
    c: usize,
) -> Result<u64> {
    match scheme {
        Scheme::Improved => {
            let mut da = ra.read_gamma()? as i64 - 1;
            let mut db = rb.read_gamma()? as i64 - 1;
            let mut best = da + db;
            for _ in 1..c {
                da += ra.read_signed()?;
                db += rb.read_signed()?;
                best = best.min(da + db);
            }
            if best < 0 {
                return Err(Error::format("negative reconstructed distance"));
            }
            Ok(best as u64)
        }
        Scheme::Baseline => {
            let wa = read_width(ra)?;
            let wb = read_width(rb)?;
            let mut best = u64::MAX;
            for _ in 0..c {
                best = best.min(ra.read_bits(wa)? + rb.read_bits(wb)?);
            }
            Ok(best)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{self, Family};
    use crate::labels::{build_labels, LabelConfig, LabelSet};
    use crate::planar::{bfs_distances, RotationGraph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_pairs_match(g: &RotationGraph, labels: &LabelSet) {
        for u in 0..g.vertex_count() {
            let truth = bfs_distances(g, u);
            for v in 0..g.vertex_count() {
                let d = decode_distance(labels.label(u), labels.label(v)).unwrap();
                assert_eq!(d, truth.distances[v], "pair ({u}, {v})");
            }
        }
    }

    #[test]
    fn self_distance_is_zero() {
        let g = generate::grid(6, 7);
        let labels = build_labels(&g, &LabelConfig::default()).unwrap();
        for v in 0..g.vertex_count() {
            assert_eq!(
                decode_distance(labels.label(v), labels.label(v)).unwrap(),
                0
            );
        }
    }

    #[test]
    fn tiny_graphs() {
        let labels = build_labels(&generate::path(2), &LabelConfig::default()).unwrap();
        assert_eq!(
            decode_distance(labels.label(0), labels.label(1)).unwrap(),
            1
        );
        let p5 = generate::path(5);
        let config = LabelConfig {
            base_threshold: 2,
            ..LabelConfig::default()
        };
        let labels = build_labels(&p5, &config).unwrap();
        assert_eq!(
            decode_distance(labels.label(0), labels.label(4)).unwrap(),
            4
        );
        let k3 = generate::cycle(3);
        let labels = build_labels(
            &k3,
            &LabelConfig {
                base_threshold: 0,
                ..config
            },
        )
        .unwrap();
        assert!(labels.max_bits() <= 64);
        all_pairs_match(&k3, &labels);
    }

    #[test]
    fn grid_all_pairs_both_schemes() {
        let g = generate::grid(3, 3);
        for scheme in [Scheme::Improved, Scheme::Baseline] {
            for base_threshold in [2, 16] {
                let labels = build_labels(
                    &g,
                    &LabelConfig {
                        scheme,
                        base_threshold,
                    },
                )
                .unwrap();
                all_pairs_match(&g, &labels);
            }
        }
    }

    #[test]
    fn families_all_pairs_small_threshold() {
        for family in Family::ALL {
            for n in [1, 2, 3, 7, 31, 90] {
                let g = family.generate(n, 11);
                for scheme in [Scheme::Improved, Scheme::Baseline] {
                    let labels = build_labels(
                        &g,
                        &LabelConfig {
                            scheme,
                            base_threshold: 2,
                        },
                    )
                    .unwrap();
                    all_pairs_match(&g, &labels);
                }
            }
        }
    }

    #[test]
    fn random_pairs_on_a_larger_grid() {
        let g = generate::grid(8, 8);
        let labels = build_labels(
            &g,
            &LabelConfig {
                base_threshold: 4,
                ..LabelConfig::default()
            },
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let u = rng.gen_range(0..64);
            let v = rng.gen_range(0..64);
            assert_eq!(
                decode_distance(labels.label(u), labels.label(v)).unwrap(),
                bfs_distances(&g, u).distances[v]
            );
        }
    }

    #[test]
    fn disconnected_pairs_are_unreachable() {
        let g = generate::disjoint_union(&[
            generate::grid(5, 5),
            generate::path(1),
            generate::cycle(40),
        ]);
        let labels = build_labels(
            &g,
            &LabelConfig {
                base_threshold: 4,
                ..LabelConfig::default()
            },
        )
        .unwrap();
        all_pairs_match(&g, &labels);
        assert_eq!(
            decode_distance(labels.label(0), labels.label(25)).unwrap(),
            UNREACHABLE
        );
    }

    #[test]
    fn queries_are_symmetric() {
        let g = generate::random_triangulation(150, 3);
        let labels = build_labels(&g, &LabelConfig::default()).unwrap();
        for u in (0..150).step_by(7) {
            for v in (0..150).step_by(5) {
                assert_eq!(
                    decode_distance(labels.label(u), labels.label(v)).unwrap(),
                    decode_distance(labels.label(v), labels.label(u)).unwrap()
                );
            }
        }
    }

    #[test]
    fn mismatched_labels_are_rejected() {
        let a = build_labels(&generate::path(3), &LabelConfig::default()).unwrap();
        let b = build_labels(&generate::cycle(3), &LabelConfig::default()).unwrap();
        let c = build_labels(&generate::path(3), &LabelConfig::baseline()).unwrap();
        assert!(decode_distance(a.label(0), b.label(1)).is_err());
        assert!(decode_distance(a.label(0), c.label(1)).is_err());
    }

    #[test]
    fn file_round_trip() {
        let g = generate::big_face(120, 7, 2);
        for config in [LabelConfig::default(), LabelConfig::baseline()] {
            let labels = build_labels(&g, &config).unwrap();
            let bytes = labels.to_bytes();
            let back = LabelSet::from_bytes(&bytes).unwrap();
            assert_eq!(back, labels);
            for i in [0, 5, 20, bytes.len() / 2, bytes.len() - 1] {
                let mut bad = bytes.clone();
                bad[i] ^= 0x10;
                assert!(LabelSet::from_bytes(&bad).is_err(), "flip at {i}");
            }
            assert!(LabelSet::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        }
        let empty = build_labels(&RotationGraph::empty(0), &LabelConfig::default()).unwrap();
        assert_eq!(LabelSet::from_bytes(&empty.to_bytes()).unwrap(), empty);
    }
}
