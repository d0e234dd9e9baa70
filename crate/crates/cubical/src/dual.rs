//! Dual cube complexes of finite wallspaces, hemiwallspace
//! restriction, and the separation machinery: strong separation of
//! hyperplane pairs and facing-triple search in developed balls.

use crate::complex::{Cube, CubeComplex, FaceRef};
use crate::develop::DevelopedBall;
use crate::hyperplane::{hyperplanes, Hyperplane};
use crate::{Error, Result};
use std::collections::{BTreeSet, HashMap, VecDeque};

/// A finite set of points with walls given as bipartitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteWallspace {
    pub points: usize,
    /// Each wall is a pair of halfspaces (side 0, side 1).
    pub walls: Vec<[BTreeSet<u32>; 2]>,
}

impl FiniteWallspace {
    pub fn validate(&self) -> Result<()> {
        for (wi, [a, b]) in self.walls.iter().enumerate() {
            if a.is_empty() || b.is_empty() {
                return Err(Error::DecompositionInvalid(format!(
                    "wall {wi} has an empty halfspace"
                )));
            }
            if a.iter().chain(b.iter()).any(|&p| p as usize >= self.points) {
                return Err(Error::DecompositionInvalid(format!(
                    "wall {wi} mentions a point outside the ground set"
                )));
            }
            if !a.is_disjoint(b) || a.len() + b.len() != self.points {
                return Err(Error::DecompositionInvalid(format!(
                    "wall {wi} is not a bipartition of the ground set"
                )));
            }
        }
        Ok(())
    }

    /// The wallspace of a complex: its vertices, with one wall per
    /// hyperplane splitting the vertices by the hyperplane's dual
    /// edges. Requires every hyperplane to separate.
    pub fn of_complex(x: &CubeComplex) -> Result<FiniteWallspace> {
        let hps = hyperplanes(x);
        let nv = x.vertex_count();
        let mut walls = Vec::with_capacity(hps.len());
        for (hi, hp) in hps.iter().enumerate() {
            let cut: BTreeSet<u32> = hp.edges.iter().copied().collect();
            let mut side = vec![u8::MAX; nv];
            side[0] = 0;
            let mut q = VecDeque::new();
            q.push_back(0u32);
            while let Some(v) = q.pop_front() {
                for (ei, e) in x.cubes(1).iter().enumerate() {
                    for (s, t) in [(e.corners[0], e.corners[1]), (e.corners[1], e.corners[0])] {
                        if s == v && side[t as usize] == u8::MAX {
                            side[t as usize] = side[v as usize]
                                ^ if cut.contains(&(ei as u32)) { 1 } else { 0 };
                            q.push_back(t);
                        }
                    }
                }
            }
            // a non-separating hyperplane reaches some vertex on both
            // sides, which manifests as an inconsistency along an edge
            for (ei, e) in x.cubes(1).iter().enumerate() {
                let flip = if cut.contains(&(ei as u32)) { 1 } else { 0 };
                if side[e.corners[0] as usize] ^ flip != side[e.corners[1] as usize] {
                    return Err(Error::DecompositionInvalid(format!(
                        "hyperplane {hi} does not separate the complex"
                    )));
                }
            }
            let a: BTreeSet<u32> = (0..nv as u32).filter(|&v| side[v as usize] == 0).collect();
            let b: BTreeSet<u32> = (0..nv as u32).filter(|&v| side[v as usize] == 1).collect();
            walls.push([a, b]);
        }
        let ws = FiniteWallspace { points: nv, walls };
        ws.validate()?;
        Ok(ws)
    }
}

/// A subcollection of halfspaces keeping at least one side per wall.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hemiwallspace {
    /// For each wall: which sides are kept.
    pub kept: Vec<[bool; 2]>,
}

impl Hemiwallspace {
    pub fn validate(&self) -> Result<()> {
        if self.kept.iter().any(|k| !k[0] && !k[1]) {
            return Err(Error::DecompositionInvalid(
                "some wall keeps neither halfspace".into(),
            ));
        }
        Ok(())
    }
}

/// The cube complex dual to a finite wallspace: vertices are the
/// consistent orientations reachable from a principal one, edges flip
/// a single wall, and higher cubes are filled whenever their whole
/// corner set is present.
#[derive(Debug, Clone)]
pub struct DualComplex {
    pub complex: CubeComplex,
    /// Orientation per 0-cube: chosen side (0 or 1) per wall.
    pub orientations: Vec<Vec<u8>>,
    /// Wall index of each hyperplane of `complex`.
    pub wall_of_hyperplane: Vec<u32>,
}

/// Whether two chosen halfspaces can coexist in one orientation.
fn sides_compatible(ws: &FiniteWallspace, w1: usize, s1: u8, w2: usize, s2: u8) -> bool {
    !ws.walls[w1][s1 as usize].is_disjoint(&ws.walls[w2][s2 as usize])
}

fn orientation_consistent(ws: &FiniteWallspace, o: &[u8], forced: Option<&Hemiwallspace>) -> bool {
    if let Some(h) = forced {
        for (w, &s) in o.iter().enumerate() {
            if !h.kept[w][s as usize] {
                return false;
            }
        }
    }
    for w1 in 0..o.len() {
        for w2 in w1 + 1..o.len() {
            if !sides_compatible(ws, w1, o[w1], w2, o[w2]) {
                return false;
            }
        }
    }
    true
}

/// The orientation induced by a point: each wall chooses the side
/// containing it.
fn principal_orientation(ws: &FiniteWallspace, p: u32) -> Vec<u8> {
    ws.walls
        .iter()
        .map(|[a, _]| if a.contains(&p) { 0 } else { 1 })
        .collect()
}

pub fn dual_complex(ws: &FiniteWallspace) -> Result<DualComplex> {
    dual_complex_restricted(ws, None, None)
}

/// Core construction, optionally restricted to a hemiwallspace and a
/// custom principal base point.
fn dual_complex_restricted(
    ws: &FiniteWallspace,
    hemi: Option<&Hemiwallspace>,
    base_point: Option<u32>,
) -> Result<DualComplex> {
    ws.validate()?;
    if let Some(h) = hemi {
        h.validate()?;
    }
    if ws.points == 0 {
        return Err(Error::DecompositionInvalid("empty ground set".into()));
    }
    let nw = ws.walls.len();

    // vertices: flood fill by single flips from the principal
    // orientation
    let start = principal_orientation(ws, base_point.unwrap_or(0));
    if !orientation_consistent(ws, &start, hemi) {
        return Err(Error::DecompositionInvalid(
            "principal orientation violates the restriction".into(),
        ));
    }
    let mut index: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut verts: Vec<Vec<u8>> = Vec::new();
    index.insert(start.clone(), 0);
    verts.push(start.clone());
    let mut q = VecDeque::new();
    q.push_back(0u32);
    while let Some(v) = q.pop_front() {
        let o = verts[v as usize].clone();
        for w in 0..nw {
            let mut o2 = o.clone();
            o2[w] ^= 1;
            if index.contains_key(&o2) || !orientation_consistent(ws, &o2, hemi) {
                continue;
            }
            let id = verts.len() as u32;
            index.insert(o2.clone(), id);
            verts.push(o2);
            q.push_back(id);
        }
    }

    // canonical vertex order: sort orientations, rebuild the index
    let mut order: Vec<u32> = (0..verts.len() as u32).collect();
    order.sort_by(|&a, &b| verts[a as usize].cmp(&verts[b as usize]));
    let verts: Vec<Vec<u8>> = order.iter().map(|&i| verts[i as usize].clone()).collect();
    let index: HashMap<Vec<u8>, u32> = verts
        .iter()
        .enumerate()
        .map(|(i, o)| (o.clone(), i as u32))
        .collect();

    // flippable walls per vertex
    let flippable: Vec<Vec<usize>> = verts
        .iter()
        .map(|o| {
            (0..nw)
                .filter(|&w| {
                    let mut o2 = o.clone();
                    o2[w] ^= 1;
                    index.contains_key(&o2)
                })
                .collect()
        })
        .collect();

    // cubes of dimension n are wall sets S at a base vertex whose
    // whole 2^|S| corner family is present; the base is the corner
    // with all S-walls at side given by the lexicographically least
    // orientation, so each cube is found exactly once
    let mut dims: Vec<Vec<Cube>> = vec![Vec::new()];
    for (vi, o) in verts.iter().enumerate() {
        let _ = o;
        dims[0].push(Cube { corners: vec![vi as u32], faces: Vec::new() });
    }
    // ids[(sorted wall set, base vertex)] -> (dim, cube id)
    let mut ids: HashMap<(Vec<usize>, u32), u32> = HashMap::new();
    let mut at_dim: Vec<Vec<(Vec<usize>, u32)>> = vec![Vec::new()];
    // dimension 1 and up
    loop {
        let n = dims.len();
        let mut layer: Vec<Cube> = Vec::new();
        let mut keys: Vec<(Vec<usize>, u32)> = Vec::new();
        for (vi, o) in verts.iter().enumerate() {
            let vi = vi as u32;
            // candidate wall sets: extend cliques of flippable walls
            let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
            while let Some(s) = stack.pop() {
                if s.len() == n {
                    // base property: this corner is the least of the
                    // cube, so every wall in s flips away from o's side
                    // toward a lexicographically larger orientation
                    if !s
                        .iter()
                        .all(|&w| corner_exists(&index, o, &s, 1 << s.iter().position(|&x| x == w).unwrap()))
                    {
                        continue;
                    }
                    if !base_is_least(o, &s) {
                        continue;
                    }
                    if (0..1u32 << n).all(|mask| corner_exists(&index, o, &s, mask)) {
                        keys.push((s.clone(), vi));
                        layer.push(build_cube(&index, &ids, &at_dim, o, &s));
                    }
                    continue;
                }
                let last = s.last().copied();
                for &w in &flippable[vi as usize] {
                    if let Some(l) = last {
                        if w <= l {
                            continue;
                        }
                    }
                    let mut s2 = s.clone();
                    s2.push(w);
                    stack.push(s2);
                }
            }
        }
        if layer.is_empty() {
            break;
        }
        for (i, k) in keys.iter().enumerate() {
            ids.insert(k.clone(), i as u32);
        }
        at_dim.push(keys);
        dims.push(layer);
    }

    let complex = CubeComplex::new(dims);
    complex.check_structure()?;

    // hyperplane <-> wall correspondence via any dual edge
    let hps = hyperplanes(&complex);
    let mut wall_of_hyperplane = Vec::with_capacity(hps.len());
    for hp in &hps {
        let e = hp.edges[0];
        let c = &complex.cubes(1)[e as usize].corners;
        let (o1, o2) = (&verts[c[0] as usize], &verts[c[1] as usize]);
        let w = (0..nw).find(|&w| o1[w] != o2[w]).expect("edge flips one wall");
        wall_of_hyperplane.push(w as u32);
    }

    Ok(DualComplex {
        complex,
        orientations: verts,
        wall_of_hyperplane,
    })
}

fn corner_exists(index: &HashMap<Vec<u8>, u32>, base: &[u8], s: &[usize], mask: u32) -> bool {
    let mut o = base.to_vec();
    for (i, &w) in s.iter().enumerate() {
        if mask >> i & 1 == 1 {
            o[w] ^= 1;
        }
    }
    index.contains_key(&o)
}

/// The base corner of a cube is the corner whose orientation is
/// lexicographically least; flipping any single cube wall must
/// increase it.
fn base_is_least(base: &[u8], s: &[usize]) -> bool {
    for &w in s {
        let mut o = base.to_vec();
        o[w] ^= 1;
        if o.as_slice() < base {
            return false;
        }
    }
    true
}

fn build_cube(
    index: &HashMap<Vec<u8>, u32>,
    ids: &HashMap<(Vec<usize>, u32), u32>,
    at_dim: &[Vec<(Vec<usize>, u32)>],
    base: &[u8],
    s: &[usize],
) -> Cube {
    let n = s.len();
    let corner = |mask: u32| {
        let mut o = base.to_vec();
        for (i, &w) in s.iter().enumerate() {
            if mask >> i & 1 == 1 {
                o[w] ^= 1;
            }
        }
        index[&o]
    };
    let corners: Vec<u32> = (0..1u32 << n).map(corner).collect();
    let mut faces = Vec::with_capacity(2 * n);
    for coord in 0..n {
        for side in 0..2u32 {
            // face: drop wall s[coord], fix it at `side`
            let sub: Vec<usize> = s
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != coord)
                .map(|(_, &w)| w)
                .collect();
            // the face's corners in parent corner indices, in face
            // corner order relative to the face's own base corner
            let parent_corners: Vec<u32> = (0..1u32 << (n - 1))
                .map(|fm| {
                    let mut mask = side << coord;
                    for i in 0..n - 1 {
                        let bit = fm >> i & 1;
                        let pos = if i < coord { i } else { i + 1 };
                        mask |= bit << pos;
                    }
                    mask
                })
                .collect();
            if n == 1 {
                // faces of an edge are vertex cubes
                faces.push(FaceRef {
                    cube: corners[parent_corners[0] as usize],
                    corners: vec![parent_corners[0] as u8],
                });
                continue;
            }
            // find the face cube: its base corner is its least corner
            let face_corner_verts: Vec<u32> = parent_corners
                .iter()
                .map(|&m| corners[m as usize])
                .collect();
            // base orientation of the face
            let least = face_corner_verts
                .iter()
                .copied()
                .enumerate()
                .min_by_key(|&(_, v)| v)
                .unwrap();
            let _ = least;
            // identify via (sorted sub, base vertex): base vertex is
            // the corner of the face with least orientation
            let base_vert = *face_corner_verts.iter().min().unwrap();
            let fid = ids[&(sub.clone(), base_vert)];
            // corner correspondence: face corner order is relative to
            // the face's own base, which may differ from our fm = 0
            let (fdim, fkeys) = (n - 1, &at_dim[n - 1]);
            let _ = fdim;
            let _ = fkeys;
            let corners_map = face_corner_map(&face_corner_verts, base_vert, &sub, &parent_corners);
            faces.push(FaceRef { cube: fid, corners: corners_map });
        }
    }
    Cube { corners, faces }
}

/// Maps the face cube's own corner order onto parent corner indices.
/// Both orders enumerate sign vectors over the same wall set (sorted),
/// differing only in which corner is the origin; XOR with the origin's
/// sign vector converts between them.
fn face_corner_map(
    face_corner_verts: &[u32],
    base_vert: u32,
    sub: &[usize],
    parent_corners: &[u32],
) -> Vec<u8> {
    let k = sub.len();
    let origin = face_corner_verts
        .iter()
        .position(|&v| v == base_vert)
        .unwrap() as u32;
    (0..1u32 << k)
        .map(|fm| {
            let pm = fm ^ origin;
            parent_corners[pm as usize] as u8
        })
        .collect()
}

/// Builds the hemiwallspace of halfspaces meeting `s` and its dual.
pub fn hemi_restrict_dual(
    ws: &FiniteWallspace,
    s: &BTreeSet<u32>,
) -> Result<(Hemiwallspace, DualComplex)> {
    ws.validate()?;
    if s.is_empty() {
        return Err(Error::DecompositionInvalid("empty restriction set".into()));
    }
    let kept: Vec<[bool; 2]> = ws
        .walls
        .iter()
        .map(|[a, b]| [!a.is_disjoint(s), !b.is_disjoint(s)])
        .collect();
    let hemi = Hemiwallspace { kept };
    let base = *s.iter().next().unwrap();
    let dual = dual_complex_restricted(ws, Some(&hemi), Some(base))?;
    Ok((hemi, dual))
}

/// Separation verdict for a pair of disjoint hyperplanes in a ball.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparationVerdict {
    /// A hyperplane crossing both, by id.
    Crossed(u32),
    Separated,
    Inconclusive,
}

/// The two hyperplane ids crossing at each square.
fn square_directions(x: &CubeComplex, hps: &[Hyperplane]) -> Vec<(u32, u32)> {
    let mut hp_of_edge = vec![u32::MAX; x.cubes(1).len()];
    for (hi, hp) in hps.iter().enumerate() {
        for &e in &hp.edges {
            hp_of_edge[e as usize] = hi as u32;
        }
    }
    x.cubes(2)
        .iter()
        .map(|sq| {
            (
                hp_of_edge[sq.faces[0].cube as usize],
                hp_of_edge[sq.faces[2].cube as usize],
            )
        })
        .collect()
}

fn hyperplanes_cross(dirs: &[(u32, u32)], a: u32, b: u32) -> bool {
    dirs.iter()
        .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
}

fn carrier_vertex_set(x: &CubeComplex, hp: &Hyperplane) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for &(d, c) in &hp.carrier {
        out.extend(x.cubes(d)[c as usize].corners.iter().copied());
    }
    out
}

/// Strong-separation verdict for two disjoint hyperplanes of a
/// developed ball. Graphs are conclusive outright (nothing can cross);
/// in higher dimension a conclusive positive needs the quantitative
/// criterion: distance above the caller's constant, with that much
/// margin to the frontier.
pub fn strong_separation(
    ball: &DevelopedBall,
    u: u32,
    v: u32,
    constant_m: Option<u32>,
) -> Result<SeparationVerdict> {
    let x = &ball.complex;
    let hps = hyperplanes(x);
    if u == v || u as usize >= hps.len() || v as usize >= hps.len() {
        return Err(Error::NotDisjoint);
    }
    let dirs = square_directions(x, &hps);
    if hyperplanes_cross(&dirs, u, v) {
        return Err(Error::NotDisjoint);
    }
    for w in 0..hps.len() as u32 {
        if w != u && w != v && hyperplanes_cross(&dirs, w, u) && hyperplanes_cross(&dirs, w, v) {
            return Ok(SeparationVerdict::Crossed(w));
        }
    }
    if x.dim() <= 1 {
        return Ok(SeparationVerdict::Separated);
    }
    if let Some(m) = constant_m {
        let cu = carrier_vertex_set(x, &hps[u as usize]);
        let cv = carrier_vertex_set(x, &hps[v as usize]);
        let du = x.bfs_distances(&cu.iter().copied().collect::<Vec<_>>());
        let pair_dist = cv.iter().map(|&p| du[p as usize]).min().unwrap_or(u32::MAX);
        let frontier_margin = (0..x.vertex_count())
            .filter(|&p| ball.frontier[p])
            .map(|p| du[p])
            .min()
            .unwrap_or(u32::MAX);
        if pair_dist > m && frontier_margin > m {
            return Ok(SeparationVerdict::Separated);
        }
    }
    Ok(SeparationVerdict::Inconclusive)
}

/// Whether hyperplane `h` conclusively fails to separate `a` from `b`:
/// a path between their carriers avoiding `h`'s dual edges and the
/// frontier is an interior witness.
fn connects_avoiding(
    ball: &DevelopedBall,
    hps: &[Hyperplane],
    h: u32,
    a: u32,
    b: u32,
) -> bool {
    let x = &ball.complex;
    let cut: BTreeSet<u32> = hps[h as usize].edges.iter().copied().collect();
    let ca = carrier_vertex_set(x, &hps[a as usize]);
    let cb = carrier_vertex_set(x, &hps[b as usize]);
    let mut seen = vec![false; x.vertex_count()];
    let mut q = VecDeque::new();
    for &p in &ca {
        if !ball.frontier[p as usize] {
            seen[p as usize] = true;
            q.push_back(p);
        }
    }
    while let Some(p) = q.pop_front() {
        if cb.contains(&p) {
            return true;
        }
        for (ei, e) in x.cubes(1).iter().enumerate() {
            if cut.contains(&(ei as u32)) {
                continue;
            }
            for (s, t) in [(e.corners[0], e.corners[1]), (e.corners[1], e.corners[0])] {
                if s == p && !seen[t as usize] && !ball.frontier[t as usize] {
                    seen[t as usize] = true;
                    q.push_back(t);
                }
            }
        }
    }
    false
}

/// Finds the first (in canonical order) triple of pairwise disjoint
/// hyperplanes in which no member separates the other two, witnessed
/// by interior paths. With `want_strong`, pairs must additionally get
/// a Separated verdict.
pub fn facing_triple_search(
    ball: &DevelopedBall,
    want_strong: bool,
    constant_m: Option<u32>,
) -> Result<Option<(u32, u32, u32)>> {
    let x = &ball.complex;
    let hps = hyperplanes(x);
    let dirs = square_directions(x, &hps);
    let n = hps.len() as u32;
    for a in 0..n {
        for b in a + 1..n {
            if hyperplanes_cross(&dirs, a, b) {
                continue;
            }
            for c in b + 1..n {
                if hyperplanes_cross(&dirs, a, c) || hyperplanes_cross(&dirs, b, c) {
                    continue;
                }
                let facing = connects_avoiding(ball, &hps, a, b, c)
                    && connects_avoiding(ball, &hps, b, a, c)
                    && connects_avoiding(ball, &hps, c, a, b);
                if !facing {
                    continue;
                }
                if want_strong {
                    let ok = [(a, b), (a, c), (b, c)].into_iter().all(|(u, v)| {
                        matches!(
                            strong_separation(ball, u, v, constant_m),
                            Ok(SeparationVerdict::Separated)
                        )
                    });
                    if !ok {
                        continue;
                    }
                }
                return Ok(Some((a, b, c)));
            }
        }
    }
    Ok(None)
}
