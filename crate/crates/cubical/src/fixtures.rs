//! Named fixtures: the standard small complexes, maps, and
//! decompositions used by tests and the command line.

use crate::cmap::{CellMap, CubicalMap};
use crate::complex::{Cube, CubeComplex, FaceRef};
use crate::io::{serialize_complex, serialize_map};
use crate::wallspace::Rank2Decomposition;
use crate::{Error, Result};

/// Theta graph: two branch vertices joined by three arcs of length 2.
pub fn theta() -> CubeComplex {
    let mut dims = vec![Vec::new(), Vec::new()];
    for v in 0..5u32 {
        dims[0].push(Cube { corners: vec![v], faces: Vec::new() });
    }
    let mut edge = |a: u32, b: u32| {
        dims[1].push(Cube {
            corners: vec![a, b],
            faces: vec![
                FaceRef { cube: a, corners: vec![0] },
                FaceRef { cube: b, corners: vec![1] },
            ],
        });
    };
    for mid in 2..5u32 {
        edge(0, mid);
        edge(mid, 1);
    }
    CubeComplex::new(dims)
}

/// Tripod: three edges meeting at a central vertex.
pub fn tripod() -> CubeComplex {
    let mut dims = vec![Vec::new(), Vec::new()];
    for v in 0..4u32 {
        dims[0].push(Cube { corners: vec![v], faces: Vec::new() });
    }
    for leaf in 1..4u32 {
        dims[1].push(Cube {
            corners: vec![0, leaf],
            faces: vec![
                FaceRef { cube: 0, corners: vec![0] },
                FaceRef { cube: leaf, corners: vec![1] },
            ],
        });
    }
    CubeComplex::new(dims)
}

/// The product fiber map B2 x {pt} -> B2 x B2: a local isometry whose
/// image is not superconvex (parallel strips of unbounded length).
pub fn nonexample_product_map() -> CubicalMap {
    let b2 = CubeComplex::bouquet(2);
    let bb = CubeComplex::product(&b2, &b2);
    let idx = CubeComplex::product_index(&b2, &b2);
    let assign = vec![
        vec![CellMap { image: 0, corners: vec![0] }],
        (0..2)
            .map(|e| CellMap {
                image: idx[&(1, 0, e, 0)],
                corners: vec![0, 1],
            })
            .collect(),
    ];
    CubicalMap { source: b2, target: bb, assign }
}

/// Two 8-cycles glued along one shared edge, as a rank-2 decomposition.
pub fn rank2_shared_edge() -> Rank2Decomposition {
    let mut dims = vec![Vec::new(), Vec::new()];
    for v in 0..14u32 {
        dims[0].push(Cube { corners: vec![v], faces: Vec::new() });
    }
    let mut edges: Vec<(u32, u32)> = vec![(0, 1)];
    for w in [1u32, 2, 3, 4, 5, 6, 7, 0].windows(2) {
        edges.push((w[0], w[1]));
    }
    for w in [1u32, 8, 9, 10, 11, 12, 13, 0].windows(2) {
        edges.push((w[0], w[1]));
    }
    for &(a, b) in &edges {
        dims[1].push(Cube {
            corners: vec![a, b],
            faces: vec![
                FaceRef { cube: a, corners: vec![0] },
                FaceRef { cube: b, corners: vec![1] },
            ],
        });
    }
    let yprime = CubeComplex::new(dims);
    Rank2Decomposition {
        yprime,
        z1: (0..8u32).map(|e| (e, 0)).collect(),
        z2: std::iter::once((0u32, 0u8))
            .chain((8..15).map(|e| (e, 0)))
            .collect(),
    }
}

/// Map sending a cycle to a bouquet along a word; inverse letters run
/// the edge backwards via the corner correspondence.
pub fn cycle_word_map(word: &[(u8, bool)], rank: usize) -> CubicalMap {
    let n = word.len() as u32;
    let cn = CubeComplex::cycle(n);
    let assign = vec![
        (0..n).map(|_| CellMap { image: 0, corners: vec![0] }).collect(),
        word.iter()
            .map(|&(l, inv)| CellMap {
                image: l as u32,
                corners: if inv { vec![1, 0] } else { vec![0, 1] },
            })
            .collect(),
    ];
    CubicalMap {
        source: cn,
        target: CubeComplex::bouquet(rank),
        assign,
    }
}

/// Files for a named fixture: (file name, contents) pairs in the
/// canonical serialization.
pub fn fixture_files(name: &str) -> Result<Vec<(String, String)>> {
    let complex = |n: &str, x: &CubeComplex| vec![(format!("{n}.ccx"), serialize_complex(x))];
    match name {
        "b2" => Ok(complex("b2", &CubeComplex::bouquet(2))),
        "b3" => Ok(complex("b3", &CubeComplex::bouquet(3))),
        "torus" => Ok(complex("torus", &CubeComplex::torus())),
        "sq" => Ok(complex("sq", &CubeComplex::single_square())),
        "theta" => Ok(complex("theta", &theta())),
        "tripod" => Ok(complex("tripod", &tripod())),
        "grid3x3" => Ok(complex("grid3x3", &CubeComplex::grid(3, 3))),
        "nonexample-product" => {
            let m = nonexample_product_map();
            let mut files = complex("b2xb2", &m.target);
            files.push(("fiber.cmap".into(), serialize_map(&m)));
            Ok(files)
        }
        "b2-id" => Ok(vec![(
            "b2-id.cmap".into(),
            serialize_map(&CubicalMap::identity(&CubeComplex::bouquet(2))),
        )]),
        "rank2" => {
            let dec = rank2_shared_edge();
            let mut files = complex("rank2", &dec.yprime);
            let cyc = |c: &[(u32, u8)]| {
                c.iter()
                    .map(|(e, end)| format!("{e}:{end}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            files.push((
                "rank2.cycles.txt".into(),
                format!("z1 {}\nz2 {}\n", cyc(&dec.z1), cyc(&dec.z2)),
            ));
            Ok(files)
        }
        other => {
            if let Some(n) = other.strip_prefix('c').and_then(|s| s.parse::<u32>().ok()) {
                if n >= 2 {
                    return Ok(complex(other, &CubeComplex::cycle(n)));
                }
            }
            Err(Error::UnknownFixture(other.into()))
        }
    }
}

/// All fixture names `fixture_files` accepts (cycles shown as `cN`).
pub const FIXTURE_NAMES: &[&str] = &[
    "b2",
    "b2-id",
    "b3",
    "torus",
    "sq",
    "theta",
    "tripod",
    "grid3x3",
    "nonexample-product",
    "rank2",
    "cN (any cycle length N >= 2)",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::Status;
    use crate::cmap::check_local_isometry;

    #[test]
    fn fixtures_produce_valid_files() {
        for name in ["b2", "b3", "torus", "sq", "theta", "tripod", "grid3x3", "c6", "c5"] {
            let files = fixture_files(name).unwrap();
            for (fname, contents) in files {
                assert!(fname.ends_with(".ccx"), "{fname}");
                let x = crate::io::parse_complex(&contents).unwrap();
                x.check_structure().unwrap();
            }
        }
        assert!(matches!(
            fixture_files("nope"),
            Err(Error::UnknownFixture(_))
        ));
    }

    #[test]
    fn nonexample_is_a_local_isometry() {
        let m = nonexample_product_map();
        m.check_structure().unwrap();
        assert_eq!(check_local_isometry(&m).unwrap().status, Status::Pass);
    }

    #[test]
    fn rank2_fixture_validates() {
        rank2_shared_edge().validate().unwrap();
    }
}
