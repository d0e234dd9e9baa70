//! Cubical maps between complexes, local-isometry certification, and
//! subcomplex extraction.

use crate::cert::{Certificate, Witness};
use crate::complex::{Cube, CubeComplex, FaceRef};
use crate::{Error, Result};
use std::collections::{BTreeSet, HashMap};

/// Where one source cube goes: a target cube of the same dimension and
/// the corner correspondence `source corner -> target corner` (a cube
/// isometry).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMap {
    pub image: u32,
    pub corners: Vec<u8>,
}

/// A combinatorial map of cube complexes, dimension-preserving and
/// commuting with all face maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicalMap {
    pub source: CubeComplex,
    pub target: CubeComplex,
    /// `assign[n][cube]` for every source n-cube.
    pub assign: Vec<Vec<CellMap>>,
}

impl CubicalMap {
    pub fn identity(x: &CubeComplex) -> CubicalMap {
        let assign = x
            .dims
            .iter()
            .enumerate()
            .map(|(n, layer)| {
                (0..layer.len() as u32)
                    .map(|c| CellMap {
                        image: c,
                        corners: (0..1u8 << n).collect(),
                    })
                    .collect()
            })
            .collect();
        CubicalMap {
            source: x.clone(),
            target: x.clone(),
            assign,
        }
    }

    pub fn vertex_image(&self, v: u32) -> u32 {
        self.assign[0][v as usize].image
    }

    /// `g` after `f`: both maps composable as `f: A -> B`, `g: B -> C`.
    pub fn compose(f: &CubicalMap, g: &CubicalMap) -> CubicalMap {
        let assign = f
            .assign
            .iter()
            .enumerate()
            .map(|(n, layer)| {
                layer
                    .iter()
                    .map(|cm| {
                        let gm = &g.assign[n][cm.image as usize];
                        CellMap {
                            image: gm.image,
                            corners: cm.corners.iter().map(|&k| gm.corners[k as usize]).collect(),
                        }
                    })
                    .collect()
            })
            .collect();
        CubicalMap {
            source: f.source.clone(),
            target: g.target.clone(),
            assign,
        }
    }

    /// Structural validation: shape, isometric correspondences, corner
    /// vertex consistency, and commutation with every face map.
    pub fn check_structure(&self) -> Result<()> {
        if self.assign.len() != self.source.dims.len() {
            return Err(Error::MalformedMap("assignment dimensions mismatch".into()));
        }
        for (n, layer) in self.assign.iter().enumerate() {
            if layer.len() != self.source.cubes(n).len() {
                return Err(Error::MalformedMap(format!(
                    "assignment for dimension {n} has {} entries, expected {}",
                    layer.len(),
                    self.source.cubes(n).len()
                )));
            }
            for (ci, cm) in layer.iter().enumerate() {
                if cm.image as usize >= self.target.cubes(n).len() {
                    return Err(Error::MalformedMap(format!(
                        "dimension {n} cube {ci}: image {} unresolved",
                        cm.image
                    )));
                }
                if cm.corners.len() != 1 << n {
                    return Err(Error::MalformedMap(format!(
                        "dimension {n} cube {ci}: correspondence size"
                    )));
                }
                let mut seen = vec![false; 1 << n];
                for &t in &cm.corners {
                    if t as usize >= 1 << n || seen[t as usize] {
                        return Err(Error::MalformedMap(format!(
                            "dimension {n} cube {ci}: correspondence not a bijection"
                        )));
                    }
                    seen[t as usize] = true;
                }
                for t in 0..n {
                    let d = cm.corners[1 << t] ^ cm.corners[0];
                    if d.count_ones() != 1 {
                        return Err(Error::MalformedMap(format!(
                            "dimension {n} cube {ci}: correspondence not an isometry"
                        )));
                    }
                    let p = d.trailing_zeros();
                    for k in 0..1u8 << n {
                        if cm.corners[(k ^ (1 << t)) as usize] != cm.corners[k as usize] ^ (1 << p) {
                            return Err(Error::MalformedMap(format!(
                                "dimension {n} cube {ci}: correspondence not affine"
                            )));
                        }
                    }
                }
                // vertex consistency
                let src = &self.source.dims[n][ci];
                let tgt = &self.target.dims[n][cm.image as usize];
                for k in 0..1usize << n {
                    let tv = tgt.corners[cm.corners[k] as usize];
                    if tv != self.vertex_image(src.corners[k]) {
                        return Err(Error::MalformedMap(format!(
                            "dimension {n} cube {ci}: corner {k} vertices disagree"
                        )));
                    }
                }
                // face commutation
                if n >= 1 {
                    for i in 0..n {
                        let pd = cm.corners[1 << i] ^ cm.corners[0];
                        let p = pd.trailing_zeros() as usize;
                        for s in 0..2u8 {
                            let fr = src.face(i, s);
                            let sub = &self.assign[n - 1][fr.cube as usize];
                            let sp = (cm.corners[(fr.corners[0]) as usize] >> p) & 1;
                            let tfr = tgt.face(p, sp);
                            if sub.image != tfr.cube {
                                return Err(Error::MalformedMap(format!(
                                    "dimension {n} cube {ci}: face ({i},{s}) image disagrees"
                                )));
                            }
                            for k in 0..1usize << n.saturating_sub(1) {
                                let via_parent = cm.corners[fr.corners[k] as usize];
                                let via_face = tfr.corners[sub.corners[k] as usize];
                                if via_parent != via_face {
                                    return Err(Error::MalformedMap(format!(
                                        "dimension {n} cube {ci}: face ({i},{s}) does not commute"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Image of a directed edge-end: `(edge, end)` in the source goes to
    /// this edge-end in the target.
    pub fn edge_end_image(&self, e: u32, end: u8) -> (u32, u8) {
        let cm = &self.assign[1][e as usize];
        (cm.image, cm.corners[end as usize])
    }
}

/// Pass iff every vertex link maps injectively and no simplex of the
/// target link spanned by image vertices is missing from the source
/// link (the no-missing-square condition and its higher analogues).
pub fn check_local_isometry(map: &CubicalMap) -> Result<Certificate> {
    map.check_structure()?;
    for v in 0..map.source.vertex_count() as u32 {
        let w = map.vertex_image(v);
        let src_link = map.source.vertex_link(v)?;
        let tgt_link = map.target.vertex_link(w)?;
        let tgt_index: HashMap<(u32, u8), usize> = tgt_link
            .vertices
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i))
            .collect();
        // link map on vertices, with injectivity
        let mut f = Vec::with_capacity(src_link.vertices.len());
        let mut hit: HashMap<usize, (u32, u8)> = HashMap::new();
        for &(e, end) in &src_link.vertices {
            let img = map.edge_end_image(e, end);
            let ti = tgt_index[&img];
            if let Some(&prev) = hit.get(&ti) {
                return Ok(Certificate::fail(
                    "local_isometry",
                    Witness::EdgePair { vertex: v, ends: [prev, (e, end)] },
                ));
            }
            hit.insert(ti, (e, end));
            f.push(ti);
        }
        let inv: HashMap<usize, usize> = f.iter().enumerate().map(|(s, &t)| (t, s)).collect();
        // fullness: target simplices over image vertices must be hit
        let mut src_sets: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        for layer in &src_link.simplices {
            src_sets.push(
                layer
                    .iter()
                    .map(|s| {
                        let mut vs: Vec<usize> = s.verts.iter().map(|&x| f[x]).collect();
                        vs.sort_unstable();
                        vs
                    })
                    .collect(),
            );
        }
        for (d, layer) in tgt_link.simplices.iter().enumerate() {
            for s in layer {
                if !s.verts.iter().all(|x| inv.contains_key(x)) {
                    continue;
                }
                let found = src_sets.get(d).map_or(false, |set| set.contains(&s.verts));
                if !found {
                    if d == 0 {
                        let a = src_link.vertices[inv[&s.verts[0]]];
                        let b = src_link.vertices[inv[&s.verts[1]]];
                        return Ok(Certificate::fail(
                            "local_isometry",
                            Witness::EdgePair { vertex: v, ends: [a, b] },
                        ));
                    }
                    return Ok(Certificate::fail(
                        "local_isometry",
                        Witness::LinkViolation {
                            vertex: v,
                            simplices: vec![(s.cube.0, s.cube.1, s.corner)],
                        },
                    ));
                }
            }
        }
    }
    Ok(Certificate::pass("local_isometry")
        .with_int("source_cells", map.source.cell_count() as i64)
        .with_int("target_cells", map.target.cell_count() as i64))
}

/// The smallest subcomplex containing `cells`, as a complex of its own
/// plus the inclusion map. Ids are reassigned densely in sorted order.
pub fn subcomplex(x: &CubeComplex, cells: &BTreeSet<(usize, u32)>) -> (CubeComplex, CubicalMap) {
    let mut closed: BTreeSet<(usize, u32)> = BTreeSet::new();
    let mut stack: Vec<(usize, u32)> = cells.iter().copied().collect();
    while let Some((n, ci)) = stack.pop() {
        if !closed.insert((n, ci)) {
            continue;
        }
        if n == 0 {
            continue;
        }
        let c = &x.dims[n][ci as usize];
        if n == 1 {
            for &v in &c.corners {
                stack.push((0, v));
            }
        } else {
            for fr in &c.faces {
                stack.push((n - 1, fr.cube));
            }
        }
    }
    let top = closed.iter().map(|&(n, _)| n).max().unwrap_or(0);
    let mut new_id: HashMap<(usize, u32), u32> = HashMap::new();
    let mut per_dim: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    for &(n, ci) in &closed {
        new_id.insert((n, ci), per_dim[n].len() as u32);
        per_dim[n].push(ci);
    }
    let mut dims: Vec<Vec<Cube>> = Vec::with_capacity(top + 1);
    for (n, olds) in per_dim.iter().enumerate() {
        let mut layer = Vec::with_capacity(olds.len());
        for &ci in olds {
            let c = &x.dims[n][ci as usize];
            let corners: Vec<u32> = c.corners.iter().map(|&v| new_id[&(0, v)]).collect();
            let faces: Vec<FaceRef> = if n == 1 {
                c.corners
                    .iter()
                    .enumerate()
                    .map(|(s, &v)| FaceRef { cube: new_id[&(0, v)], corners: vec![s as u8] })
                    .collect()
            } else {
                c.faces
                    .iter()
                    .map(|fr| FaceRef {
                        cube: new_id[&(n - 1, fr.cube)],
                        corners: fr.corners.clone(),
                    })
                    .collect()
            };
            layer.push(Cube { corners, faces });
        }
        dims.push(layer);
    }
    let sub = CubeComplex::new(dims);
    let assign: Vec<Vec<CellMap>> = per_dim
        .iter()
        .enumerate()
        .map(|(n, olds)| {
            olds.iter()
                .map(|&ci| CellMap {
                    image: ci,
                    corners: (0..1u8 << n).collect(),
                })
                .collect()
        })
        .collect();
    let incl = CubicalMap {
        source: sub.clone(),
        target: x.clone(),
        assign,
    };
    (sub, incl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Status;

    #[test]
    fn identity_is_local_isometry() {
        for x in [
            CubeComplex::bouquet(2),
            CubeComplex::single_square(),
            CubeComplex::torus(),
            CubeComplex::grid(2, 2),
        ] {
            let id = CubicalMap::identity(&x);
            let cert = check_local_isometry(&id).unwrap();
            assert_eq!(cert.status, Status::Pass);
        }
    }

    /// C4 -> B2 reading abab: each even edge to loop 0, each odd to loop 1,
    /// always traversed forward.
    fn c4_to_b2() -> CubicalMap {
        let c4 = CubeComplex::cycle(4);
        let b2 = CubeComplex::bouquet(2);
        let assign = vec![
            (0..4).map(|_| CellMap { image: 0, corners: vec![0] }).collect(),
            (0..4)
                .map(|e| CellMap { image: e % 2, corners: vec![0, 1] })
                .collect(),
        ];
        CubicalMap { source: c4, target: b2, assign }
    }

    #[test]
    fn cycle_word_immersion_passes() {
        let m = c4_to_b2();
        assert_eq!(check_local_isometry(&m).unwrap().status, Status::Pass);
    }

    #[test]
    fn folding_map_fails_injectivity() {
        // two edges from vertex 0 both mapped onto the same target edge
        let y = CubeComplex::tripod();
        let x = CubeComplex::path(1);
        let assign = vec![
            vec![
                CellMap { image: 0, corners: vec![0] },
                CellMap { image: 1, corners: vec![0] },
                CellMap { image: 1, corners: vec![0] },
                CellMap { image: 1, corners: vec![0] },
            ],
            vec![
                CellMap { image: 0, corners: vec![0, 1] },
                CellMap { image: 0, corners: vec![0, 1] },
                CellMap { image: 0, corners: vec![0, 1] },
            ],
        ];
        let m = CubicalMap { source: y, target: x, assign };
        let cert = check_local_isometry(&m).unwrap();
        assert_eq!(cert.status, Status::Fail);
        assert!(matches!(cert.witness, Some(Witness::EdgePair { vertex: 0, .. })));
    }

    #[test]
    fn missing_square_fails() {
        // two sides of a square meeting at a corner, included into SQ:
        // the target link has an edge between the two ends, the source
        // does not fill it
        let sq = CubeComplex::single_square();
        let y = CubeComplex::graph(3, &[(0, 1), (0, 2)]);
        // vertex 0 -> corner 0 of SQ; edges -> bottom (0) and left (2)
        let assign = vec![
            vec![
                CellMap { image: 0, corners: vec![0] },
                CellMap { image: 1, corners: vec![0] },
                CellMap { image: 2, corners: vec![0] },
            ],
            vec![
                CellMap { image: 0, corners: vec![0, 1] },
                CellMap { image: 2, corners: vec![0, 1] },
            ],
        ];
        let m = CubicalMap { source: y, target: sq, assign };
        let cert = check_local_isometry(&m).unwrap();
        assert_eq!(cert.status, Status::Fail);
        assert!(matches!(cert.witness, Some(Witness::EdgePair { vertex: 0, .. })));
    }

    #[test]
    fn subcomplex_of_grid() {
        use std::collections::BTreeSet;
        let g = CubeComplex::grid(2, 1);
        let mut want = BTreeSet::new();
        want.insert((2usize, 0u32));
        let (sub, incl) = subcomplex(&g, &want);
        assert_eq!(sub.vertex_count(), 4);
        assert_eq!(sub.cubes(1).len(), 4);
        assert_eq!(sub.cubes(2).len(), 1);
        sub.check_structure().unwrap();
        incl.check_structure().unwrap();
        assert_eq!(check_local_isometry(&incl).unwrap().status, Status::Pass);
    }

    #[test]
    fn composition_checks() {
        let m = c4_to_b2();
        let id = CubicalMap::identity(&m.target);
        let comp = CubicalMap::compose(&m, &id);
        comp.check_structure().unwrap();
        assert_eq!(comp.assign[1][2].image, 0);
    }
}
