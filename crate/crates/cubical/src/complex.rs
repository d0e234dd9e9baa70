//! Finite combinatorial cube complexes with explicit face maps.
//!
//! Cubes are encoded with explicit facet identifiers plus corner
//! correspondences rather than corner tables alone, so bouquets,
//! parallel edges and self-glued squares (the one-square torus) are all
//! representable. An `n`-cube has `2^n` corners indexed by bit strings
//! (bit `i` = coordinate `i`) and `2n` facets indexed by
//! `2*coordinate + side`.

use crate::cert::{Certificate, Value, Witness};
use crate::{Error, Result};
use std::collections::{BTreeSet, HashMap};

/// A face reference: the facet cube's id in the next dimension down,
/// plus the corner correspondence `facet corner -> parent corner`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FaceRef {
    pub cube: u32,
    pub corners: Vec<u8>,
}

/// One `n`-cube: corner table (corner index -> vertex id) and `2n`
/// face references, slot `2*coord + side`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cube {
    pub corners: Vec<u32>,
    pub faces: Vec<FaceRef>,
}

impl Cube {
    pub fn dim(&self) -> usize {
        self.corners.len().trailing_zeros() as usize
    }

    pub fn face(&self, coord: usize, side: u8) -> &FaceRef {
        &self.faces[2 * coord + side as usize]
    }
}

/// A finite cube complex: per-dimension cube tables with dense ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CubeComplex {
    /// `dims[n]` lists the `n`-cubes; the id of a cube is its index.
    pub dims: Vec<Vec<Cube>>,
}

/// A vertex link: one link-vertex per edge-end at the vertex, one
/// `k`-simplex per `(k+1)`-cube corner.
#[derive(Debug, Clone)]
pub struct Link {
    pub vertex: u32,
    /// Edge-ends `(edge id, end)` at the vertex, sorted.
    pub vertices: Vec<(u32, u8)>,
    /// `simplices[d]` holds the `(d+1)`-dimensional cube corners as
    /// `d`-simplices, `d >= 1`.
    pub simplices: Vec<Vec<LinkSimplex>>,
}

#[derive(Debug, Clone)]
pub struct LinkSimplex {
    /// Indices into `Link::vertices`, sorted.
    pub verts: Vec<usize>,
    /// Provenance: (dimension, cube id, corner index).
    pub cube: (usize, u32),
    pub corner: u32,
}

impl CubeComplex {
    pub fn new(dims: Vec<Vec<Cube>>) -> Self {
        let mut c = CubeComplex { dims };
        while c.dims.len() > 1 && c.dims.last().map_or(false, |d| d.is_empty()) {
            c.dims.pop();
        }
        c
    }

    /// Top dimension with any cube present.
    pub fn dim(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn cubes(&self, n: usize) -> &[Cube] {
        self.dims.get(n).map_or(&[], |v| v.as_slice())
    }

    pub fn vertex_count(&self) -> usize {
        self.cubes(0).len()
    }

    pub fn cell_count(&self) -> usize {
        self.dims.iter().map(|d| d.len()).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(n, d)| if n % 2 == 0 { d.len() as i64 } else { -(d.len() as i64) })
            .sum()
    }

    /// A graph: `nv` vertices and edges given by endpoint pairs.
    pub fn graph(nv: u32, edges: &[(u32, u32)]) -> Self {
        let verts: Vec<Cube> = (0..nv)
            .map(|v| Cube {
                corners: vec![v],
                faces: Vec::new(),
            })
            .collect();
        let es: Vec<Cube> = edges
            .iter()
            .map(|&(a, b)| Cube {
                corners: vec![a, b],
                faces: vec![
                    FaceRef { cube: a, corners: vec![0] },
                    FaceRef { cube: b, corners: vec![1] },
                ],
            })
            .collect();
        CubeComplex::new(vec![verts, es])
    }

    /// Bouquet of `rank` circles on one vertex.
    pub fn bouquet(rank: usize) -> Self {
        Self::graph(1, &vec![(0, 0); rank])
    }

    /// Cycle of length `n`.
    pub fn cycle(n: u32) -> Self {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::graph(n, &edges)
    }

    /// Path with `n` edges.
    pub fn path(n: u32) -> Self {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, i + 1)).collect();
        Self::graph(n + 1, &edges)
    }

    /// A single square with 4 distinct vertices.
    pub fn single_square() -> Self {
        let mut c = Self::graph(4, &[(0, 1), (2, 3), (0, 2), (1, 3)]);
        c.dims.push(vec![Cube {
            corners: vec![0, 1, 2, 3],
            faces: vec![
                FaceRef { cube: 2, corners: vec![0, 2] },
                FaceRef { cube: 3, corners: vec![1, 3] },
                FaceRef { cube: 0, corners: vec![0, 1] },
                FaceRef { cube: 1, corners: vec![2, 3] },
            ],
        }]);
        c
    }

    /// The one-square torus: a single vertex, edges `a`, `b`, and one
    /// square with boundary `a b a^-1 b^-1`.
    pub fn torus() -> Self {
        let mut c = Self::graph(1, &[(0, 0), (0, 0)]);
        c.dims.push(vec![Cube {
            corners: vec![0, 0, 0, 0],
            faces: vec![
                FaceRef { cube: 1, corners: vec![0, 2] },
                FaceRef { cube: 1, corners: vec![1, 3] },
                FaceRef { cube: 0, corners: vec![0, 1] },
                FaceRef { cube: 0, corners: vec![2, 3] },
            ],
        }]);
        c
    }

    /// A `w x h` grid of squares.
    pub fn grid(w: u32, h: u32) -> Self {
        let vid = |x: u32, y: u32| y * (w + 1) + x;
        let hedge = |x: u32, y: u32| y * w + x;
        let vedge = |x: u32, y: u32| w * (h + 1) + y * (w + 1) + x;
        let mut edges = Vec::new();
        for y in 0..=h {
            for x in 0..w {
                edges.push((vid(x, y), vid(x + 1, y)));
            }
        }
        for y in 0..h {
            for x in 0..=w {
                edges.push((vid(x, y), vid(x, y + 1)));
            }
        }
        let mut c = Self::graph((w + 1) * (h + 1), &edges);
        let mut squares = Vec::new();
        for y in 0..h {
            for x in 0..w {
                squares.push(Cube {
                    corners: vec![vid(x, y), vid(x + 1, y), vid(x, y + 1), vid(x + 1, y + 1)],
                    faces: vec![
                        FaceRef { cube: vedge(x, y), corners: vec![0, 2] },
                        FaceRef { cube: vedge(x + 1, y), corners: vec![1, 3] },
                        FaceRef { cube: hedge(x, y), corners: vec![0, 1] },
                        FaceRef { cube: hedge(x, y + 1), corners: vec![2, 3] },
                    ],
                });
            }
        }
        c.dims.push(squares);
        c
    }

    /// Theta graph: two vertices joined by three edges.
    pub fn theta() -> Self {
        Self::graph(2, &[(0, 1), (0, 1), (0, 1)])
    }

    /// Tripod: three edges sharing a central vertex.
    pub fn tripod() -> Self {
        Self::graph(4, &[(0, 1), (0, 2), (0, 3)])
    }

    /// For each coordinate of the facet at `face slot`, the parent
    /// coordinate it corresponds to and whether the bit is flipped.
    pub fn face_coordinate_map(&self, n: usize, cube: u32, face_idx: usize) -> Vec<(usize, bool)> {
        let fr = &self.dims[n][cube as usize].faces[face_idx];
        let phi = &fr.corners;
        let mut out = Vec::with_capacity(n - 1);
        for t in 0..n - 1 {
            let d = phi[1 << t] ^ phi[0];
            debug_assert_eq!(d.count_ones(), 1);
            let p = d.trailing_zeros() as usize;
            let flip = (phi[0] >> p) & 1 == 1;
            out.push((p, flip));
        }
        out
    }

    /// The edge of the complex sitting at `corner` of the given cube in
    /// direction `coord`, together with which end of the edge is at the
    /// corner.
    pub fn edge_at_corner(&self, n: usize, cube: u32, corner: u32, coord: usize) -> (u32, u8) {
        if n == 1 {
            return (cube, corner as u8);
        }
        // Descend along any coordinate other than `coord`.
        let u = if coord == n - 1 { n - 2 } else { n - 1 };
        let side = ((corner >> u) & 1) as u8;
        let slot = 2 * u + side as usize;
        let fr = &self.dims[n][cube as usize].faces[slot];
        let k = fr
            .corners
            .iter()
            .position(|&p| p as u32 == corner)
            .expect("corner lies on its own face");
        let cmap = self.face_coordinate_map(n, cube, slot);
        let t2 = cmap
            .iter()
            .position(|&(p, _)| p == coord)
            .expect("remaining coordinate survives in facet");
        self.edge_at_corner(n - 1, fr.cube, k as u32, t2)
    }

    /// Structural validation: corner/face table shapes, face resolution,
    /// correspondence isometry, vertex matching, and face commutation.
    pub fn check_structure(&self) -> Result<()> {
        for (n, cubes) in self.dims.iter().enumerate() {
            for (ci, c) in cubes.iter().enumerate() {
                let ci = ci as u32;
                if c.corners.len() != 1 << n {
                    return Err(Error::MalformedCube {
                        dim: n,
                        cube: ci,
                        reason: format!("corner table has {} entries", c.corners.len()),
                    });
                }
                for &v in &c.corners {
                    if v as usize >= self.cubes(0).len() {
                        return Err(Error::MalformedCube {
                            dim: n,
                            cube: ci,
                            reason: format!("corner vertex {v} unresolved"),
                        });
                    }
                }
                if n == 0 {
                    if c.corners[0] != ci {
                        return Err(Error::MalformedCube {
                            dim: 0,
                            cube: ci,
                            reason: "vertex corner must be itself".into(),
                        });
                    }
                    continue;
                }
                if c.faces.len() != 2 * n {
                    return Err(Error::MalformedCube {
                        dim: n,
                        cube: ci,
                        reason: format!("face table has {} entries", c.faces.len()),
                    });
                }
                for (slot, fr) in c.faces.iter().enumerate() {
                    let (i, s) = (slot / 2, (slot % 2) as u32);
                    if fr.cube as usize >= self.cubes(n - 1).len() {
                        return Err(Error::DanglingFace { dim: n, cube: ci, face: slot });
                    }
                    if fr.corners.len() != 1 << (n - 1) {
                        return Err(Error::MalformedCube {
                            dim: n,
                            cube: ci,
                            reason: format!("face {slot} correspondence has {} entries", fr.corners.len()),
                        });
                    }
                    let mut seen = vec![false; 1 << n];
                    for &p in &fr.corners {
                        let p = p as usize;
                        if p >= 1 << n || (p >> i) & 1 != s as usize || seen[p] {
                            return Err(Error::MalformedCube {
                                dim: n,
                                cube: ci,
                                reason: format!("face {slot} correspondence is not onto side corners"),
                            });
                        }
                        seen[p] = true;
                    }
                    // correspondence must be a cube isometry
                    let mut used = vec![false; n];
                    for t in 0..n - 1 {
                        let d = fr.corners[1 << t] ^ fr.corners[0];
                        if d.count_ones() != 1 {
                            return Err(Error::MalformedCube {
                                dim: n,
                                cube: ci,
                                reason: format!("face {slot} correspondence is not an isometry"),
                            });
                        }
                        let p = d.trailing_zeros() as usize;
                        if p == i || used[p] {
                            return Err(Error::MalformedCube {
                                dim: n,
                                cube: ci,
                                reason: format!("face {slot} correspondence collapses coordinates"),
                            });
                        }
                        used[p] = true;
                        for k in 0..1u8 << (n - 1) {
                            if fr.corners[(k ^ (1 << t)) as usize] != fr.corners[k as usize] ^ (1 << p) {
                                return Err(Error::MalformedCube {
                                    dim: n,
                                    cube: ci,
                                    reason: format!("face {slot} correspondence is not affine"),
                                });
                            }
                        }
                    }
                    // facet corner vertices must match the restriction
                    let facet = &self.dims[n - 1][fr.cube as usize];
                    for (k, &p) in fr.corners.iter().enumerate() {
                        if facet.corners[k] != c.corners[p as usize] {
                            return Err(Error::MalformedCube {
                                dim: n,
                                cube: ci,
                                reason: format!("face {slot} corner vertices disagree"),
                            });
                        }
                    }
                }
                // face commutation
                if n >= 2 {
                    for i in 0..n {
                        for j in i + 1..n {
                            for si in 0..2u8 {
                                for sj in 0..2u8 {
                                    let a = self.double_face(n, ci, i, si, j, sj);
                                    let b = self.double_face(n, ci, j, sj, i, si);
                                    if a != b {
                                        return Err(Error::IncompatibleFaces { dim: n, cube: ci, i, j });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Takes the `(i, si)` face then the `(j, sj)` face (parent
    /// coordinates), returning the (n-2)-cube and the composed corner
    /// correspondence into the parent.
    fn double_face(&self, n: usize, cube: u32, i: usize, si: u8, j: usize, sj: u8) -> (u32, Vec<u8>) {
        let slot1 = 2 * i + si as usize;
        let fr1 = &self.dims[n][cube as usize].faces[slot1];
        let cmap = self.face_coordinate_map(n, cube, slot1);
        let (t, flip) = cmap
            .iter()
            .enumerate()
            .find(|(_, &(p, _))| p == j)
            .map(|(t, &(_, f))| (t, f))
            .expect("coordinate j survives in facet");
        let side2 = sj ^ (flip as u8);
        let fr2 = &self.dims[n - 1][fr1.cube as usize].faces[2 * t + side2 as usize];
        let composed: Vec<u8> = fr2.corners.iter().map(|&k| fr1.corners[k as usize]).collect();
        (fr2.cube, composed)
    }

    /// Vertex adjacency through edges (parallel edges collapsed).
    pub fn vertex_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); self.vertex_count()];
        for e in self.cubes(1) {
            let (a, b) = (e.corners[0], e.corners[1]);
            if a != b {
                adj[a as usize].insert(b);
                adj[b as usize].insert(a);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// BFS distances in the edge metric on the 0-skeleton; unreachable
    /// vertices get `u32::MAX`.
    pub fn bfs_distances(&self, starts: &[u32]) -> Vec<u32> {
        let adj = self.vertex_adjacency();
        bfs(&adj, starts)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count() == 0 {
            return true;
        }
        let d = self.bfs_distances(&[0]);
        d.iter().all(|&x| x != u32::MAX)
    }

    /// Exact 0-skeleton diameter (assumes connected; `None` if not).
    pub fn diameter(&self) -> Option<u32> {
        let n = self.vertex_count();
        let adj = self.vertex_adjacency();
        let mut best = 0;
        for v in 0..n as u32 {
            let d = bfs(&adj, &[v]);
            for &x in &d {
                if x == u32::MAX {
                    return None;
                }
                best = best.max(x);
            }
        }
        Some(best)
    }

    /// The link of vertex `v`.
    pub fn vertex_link(&self, v: u32) -> Result<Link> {
        if v as usize >= self.vertex_count() {
            return Err(Error::UnknownVertex(v));
        }
        let mut verts: Vec<(u32, u8)> = Vec::new();
        for (ei, e) in self.cubes(1).iter().enumerate() {
            for end in 0..2u8 {
                if e.corners[end as usize] == v {
                    verts.push((ei as u32, end));
                }
            }
        }
        verts.sort_unstable();
        let index: HashMap<(u32, u8), usize> =
            verts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut simplices: Vec<Vec<LinkSimplex>> = Vec::new();
        for n in 2..self.dims.len() {
            let d = n - 1; // simplex dimension
            let mut layer = Vec::new();
            for (ci, c) in self.cubes(n).iter().enumerate() {
                for corner in 0..1u32 << n {
                    if c.corners[corner as usize] != v {
                        continue;
                    }
                    let mut vs: Vec<usize> = (0..n)
                        .map(|t| index[&self.edge_at_corner(n, ci as u32, corner, t)])
                        .collect();
                    vs.sort_unstable();
                    layer.push(LinkSimplex {
                        verts: vs,
                        cube: (n, ci as u32),
                        corner,
                    });
                }
            }
            while simplices.len() < d {
                simplices.push(Vec::new());
            }
            simplices[d - 1] = layer;
        }
        Ok(Link {
            vertex: v,
            vertices: verts,
            simplices,
        })
    }

    /// Checks that the link is simplicial (no repeated vertices in a
    /// simplex, no doubled simplices) and flag (every clique is filled).
    /// Returns offending simplices on failure.
    pub fn check_link(&self, link: &Link) -> std::result::Result<(), Witness> {
        // simplicial: distinct vertices per simplex
        for layer in &link.simplices {
            for s in layer {
                let mut vs = s.verts.clone();
                vs.dedup();
                if vs.len() != s.verts.len() {
                    return Err(Witness::LinkViolation {
                        vertex: link.vertex,
                        simplices: vec![(s.cube.0, s.cube.1, s.corner)],
                    });
                }
            }
        }
        // simplicial: no doubled simplices
        for layer in &link.simplices {
            let mut seen: HashMap<&[usize], &LinkSimplex> = HashMap::new();
            for s in layer {
                if let Some(prev) = seen.get(s.verts.as_slice()) {
                    return Err(Witness::LinkViolation {
                        vertex: link.vertex,
                        simplices: vec![
                            (prev.cube.0, prev.cube.1, prev.corner),
                            (s.cube.0, s.cube.1, s.corner),
                        ],
                    });
                }
                seen.insert(s.verts.as_slice(), s);
            }
        }
        // flag: every (k+1)-clique in the link graph spans a k-simplex
        let nv = link.vertices.len();
        let mut adj = vec![vec![false; nv]; nv];
        if let Some(edges) = link.simplices.first() {
            for s in edges {
                adj[s.verts[0]][s.verts[1]] = true;
                adj[s.verts[1]][s.verts[0]] = true;
            }
        }
        let mut present: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        for layer in &link.simplices {
            present.push(layer.iter().map(|s| s.verts.clone()).collect());
        }
        // enumerate cliques of size >= 3 by ordered extension
        let mut stack: Vec<Vec<usize>> = Vec::new();
        for a in 0..nv {
            for b in a + 1..nv {
                if adj[a][b] {
                    stack.push(vec![a, b]);
                }
            }
        }
        while let Some(clique) = stack.pop() {
            let last = *clique.last().unwrap();
            for c in last + 1..nv {
                if clique.iter().all(|&x| adj[x][c]) {
                    let mut bigger = clique.clone();
                    bigger.push(c);
                    let d = bigger.len() - 1; // simplex dim needed
                    let filled = present
                        .get(d - 1)
                        .map_or(false, |set| set.contains(&bigger));
                    if !filled {
                        return Err(Witness::LinkViolation {
                            vertex: link.vertex,
                            simplices: Vec::new(),
                        });
                    }
                    stack.push(bigger);
                }
            }
        }
        Ok(())
    }

    /// True when every vertex link is simplicial and flag.
    pub fn is_npc(&self) -> bool {
        (0..self.vertex_count() as u32).all(|v| {
            self.vertex_link(v)
                .map(|l| self.check_link(&l).is_ok())
                .unwrap_or(false)
        })
    }

    /// Full validation: structure errors are hard errors, curvature
    /// violations produce a fail certificate with a witness.
    pub fn validate(&self) -> Result<Certificate> {
        self.check_structure()?;
        let mut cert = Certificate::pass("validate");
        for v in 0..self.vertex_count() as u32 {
            let link = self.vertex_link(v)?;
            if let Err(w) = self.check_link(&link) {
                cert = Certificate::fail("validate", w);
                break;
            }
        }
        cert.push("dim", Value::Int(self.dim() as i64));
        for (n, d) in self.dims.iter().enumerate() {
            cert.push(&format!("cubes[{n}]"), Value::Int(d.len() as i64));
        }
        cert.push("euler", Value::Int(self.euler_characteristic()));
        cert.push(
            "connected",
            Value::Text(if self.is_connected() { "true" } else { "false" }.into()),
        );
        Ok(cert)
    }

    /// Cubical subdivision: every `n`-cube is replaced by `2^n` cubes.
    /// Cells of the result are indexed by (carrier cube, fixed
    /// coordinate set, corner values); vertices are barycenters.
    pub fn subdivide(&self) -> CubeComplex {
        // barycenter vertex ids: enumerate cells by (dim, id)
        let mut offset = vec![0u32; self.dims.len() + 1];
        for n in 0..self.dims.len() {
            offset[n + 1] = offset[n] + self.dims[n].len() as u32;
        }
        let vid = |cell: (usize, u32)| offset[cell.0] + cell.1;

        // enumerate cells of each dimension
        type Key = (usize, u32, u32, u32); // (m, cube, fixed mask, vals mask)
        let top = self.dim();
        let mut ids: HashMap<Key, u32> = HashMap::new();
        let mut cells: Vec<Vec<Key>> = vec![Vec::new(); top + 1];
        for k in 0..=top {
            for m in k..=top {
                for b in 0..self.cubes(m).len() as u32 {
                    for s_mask in 0..1u32 << m {
                        if s_mask.count_ones() as usize != k {
                            continue;
                        }
                        // iterate subsets of s_mask ascending
                        let mut subsets = Vec::new();
                        let mut cur = 0u32;
                        loop {
                            subsets.push(cur);
                            if cur == s_mask {
                                break;
                            }
                            cur = (cur.wrapping_sub(s_mask)) & s_mask;
                        }
                        subsets.sort_unstable();
                        for v in subsets {
                            let key = (m, b, s_mask, v);
                            ids.insert(key, cells[k].len() as u32);
                            cells[k].push(key);
                        }
                    }
                }
            }
        }

        let mut dims: Vec<Vec<Cube>> = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let mut layer = Vec::with_capacity(cells[k].len());
            for &(m, b, s_mask, vals) in &cells[k] {
                let coords: Vec<usize> =
                    (0..m).filter(|t| s_mask >> t & 1 == 1).collect();
                // corner j: bit l set -> coordinate coords[l] fixed at its val
                let mut corners = Vec::with_capacity(1 << k);
                for j in 0..1u32 << k {
                    let mut fixed = 0u32;
                    for (l, &t) in coords.iter().enumerate() {
                        if j >> l & 1 == 1 {
                            fixed |= 1 << t;
                        }
                    }
                    corners.push(vid(self.resolve_subface(m, b, fixed, vals & fixed)));
                }
                let mut faces = Vec::with_capacity(2 * k);
                for l in 0..k {
                    let t = coords[l];
                    // side 0: midpoint side, still carried by (m, b)
                    let s0_mask = s_mask & !(1 << t);
                    let f0 = ids[&(m, b, s0_mask, vals & s0_mask)];
                    let corr0: Vec<u8> = (0..1u8 << (k - 1))
                        .map(|jp| insert_bit(jp, l, 0))
                        .collect();
                    // side 1: original-corner side, descends into the facet
                    let val_t = (vals >> t & 1) as u8;
                    let fr = self.dims[m][b as usize].face(t, val_t);
                    let cmapv = self.face_coordinate_map(m, b, 2 * t + val_t as usize);
                    // remap remaining fixed coords into the facet
                    let mut s1_mask = 0u32;
                    let mut v1_mask = 0u32;
                    let mut fac_coords: Vec<(usize, usize)> = Vec::new(); // (facet coord, position l2 in S\{t})
                    for (l2, &t2) in coords.iter().enumerate() {
                        if t2 == t {
                            continue;
                        }
                        let tt = cmapv
                            .iter()
                            .position(|&(p, _)| p == t2)
                            .expect("coordinate survives in facet");
                        let flip = cmapv[tt].1;
                        s1_mask |= 1 << tt;
                        let val = ((vals >> t2 & 1) as u8) ^ (flip as u8);
                        if val == 1 {
                            v1_mask |= 1 << tt;
                        }
                        let pos = if l2 > l { l2 - 1 } else { l2 };
                        fac_coords.push((tt, pos));
                    }
                    fac_coords.sort_unstable();
                    let f1 = ids[&(m - 1, fr.cube, s1_mask, v1_mask)];
                    let corr1: Vec<u8> = (0..1u8 << (k - 1))
                        .map(|jf| {
                            // facet-cell corner bits (over sorted facet coords)
                            // map to parent-cell corner bits over S \ {t},
                            // then bit 1 is inserted at position l.
                            let mut jp: u8 = 0;
                            for (lf, &(_tt, pos)) in fac_coords.iter().enumerate() {
                                if jf >> lf & 1 == 1 {
                                    jp |= 1 << pos;
                                }
                            }
                            insert_bit(jp, l, 1)
                        })
                        .collect();
                    faces.push(FaceRef { cube: f0, corners: corr0 });
                    faces.push(FaceRef { cube: f1, corners: corr1 });
                }
                layer.push(Cube { corners, faces });
            }
            dims.push(layer);
        }
        CubeComplex::new(dims)
    }

    /// Resolves the abstract subface of a cube obtained by fixing the
    /// coordinates in `fixed` at the bits of `vals`, to an actual cell.
    pub fn resolve_subface(&self, m: usize, b: u32, fixed: u32, vals: u32) -> (usize, u32) {
        if fixed == 0 {
            return (m, b);
        }
        let t = 31 - fixed.leading_zeros() as usize;
        let side = (vals >> t & 1) as u8;
        let fr = self.dims[m][b as usize].face(t, side);
        let cmapv = self.face_coordinate_map(m, b, 2 * t + side as usize);
        let mut nf = 0u32;
        let mut nv = 0u32;
        for t2 in 0..m {
            if t2 == t || fixed >> t2 & 1 == 0 {
                continue;
            }
            let tt = cmapv
                .iter()
                .position(|&(p, _)| p == t2)
                .expect("coordinate survives in facet");
            let flip = cmapv[tt].1;
            nf |= 1 << tt;
            if ((vals >> t2 & 1) as u8) ^ (flip as u8) == 1 {
                nv |= 1 << tt;
            }
        }
        self.resolve_subface(m - 1, fr.cube, nf, nv)
    }

    /// Product complex. Vertex `(va, vb)` gets id `va * |V(b)| + vb`;
    /// an `n`-cube is a pair `(p-cube of a, q-cube of b)` with `p+q=n`,
    /// low `p` corner bits from the first factor.
    pub fn product(a: &CubeComplex, b: &CubeComplex) -> CubeComplex {
        let nbv = b.vertex_count() as u32;
        let top = a.dim() + b.dim();
        let mut ids: HashMap<(usize, usize, u32, u32), u32> = HashMap::new();
        let mut layers: Vec<Vec<(usize, u32, u32)>> = vec![Vec::new(); top + 1];
        for n in 0..=top {
            for p in 0..=n.min(a.dim()) {
                let q = n - p;
                if q > b.dim() {
                    continue;
                }
                for ca in 0..a.cubes(p).len() as u32 {
                    for cb in 0..b.cubes(q).len() as u32 {
                        ids.insert((p, q, ca, cb), layers[n].len() as u32);
                        layers[n].push((p, ca, cb));
                    }
                }
            }
        }
        let mut dims: Vec<Vec<Cube>> = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let mut layer = Vec::with_capacity(layers[n].len());
            for &(p, ca, cb) in &layers[n] {
                let q = n - p;
                let cua = &a.dims[p][ca as usize];
                let cub = &b.dims[q][cb as usize];
                let corners: Vec<u32> = (0..1u32 << n)
                    .map(|j| {
                        let ka = (j & ((1 << p) - 1)) as usize;
                        let kb = (j >> p) as usize;
                        cua.corners[ka] * nbv + cub.corners[kb]
                    })
                    .collect();
                let mut faces = Vec::with_capacity(2 * n);
                for i in 0..n {
                    for s in 0..2u8 {
                        if i < p {
                            let fr = cua.face(i, s);
                            let cube = ids[&(p - 1, q, fr.cube, cb)];
                            let corners = (0..1u8 << (n - 1))
                                .map(|j| {
                                    let ka = (j & ((1 << (p - 1)) - 1)) as usize;
                                    let kb = j >> (p - 1);
                                    fr.corners[ka] | (kb << p)
                                })
                                .collect();
                            faces.push(FaceRef { cube, corners });
                        } else {
                            let fr = cub.face(i - p, s);
                            let cube = ids[&(p, q - 1, ca, fr.cube)];
                            let corners = (0..1u8 << (n - 1))
                                .map(|j| {
                                    let ka = (j & ((1 << p) - 1)) as u8;
                                    let kb = (j >> p) as usize;
                                    ka | (fr.corners[kb] << p)
                                })
                                .collect();
                            faces.push(FaceRef { cube, corners });
                        }
                    }
                }
                layer.push(Cube { corners, faces });
            }
            dims.push(layer);
        }
        CubeComplex::new(dims)
    }

    /// Product cell lookup `(p, q, ca, cb) -> id in dimension p + q`.
    /// Recomputes the same enumeration as [`CubeComplex::product`].
    pub fn product_index(a: &CubeComplex, b: &CubeComplex) -> HashMap<(usize, usize, u32, u32), u32> {
        let top = a.dim() + b.dim();
        let mut ids = HashMap::new();
        for n in 0..=top {
            let mut next = 0u32;
            for p in 0..=n.min(a.dim()) {
                let q = n - p;
                if q > b.dim() {
                    continue;
                }
                for ca in 0..a.cubes(p).len() as u32 {
                    for cb in 0..b.cubes(q).len() as u32 {
                        ids.insert((p, q, ca, cb), next);
                        next += 1;
                    }
                }
            }
        }
        ids
    }
}

fn insert_bit(x: u8, pos: usize, bit: u8) -> u8 {
    let low = x & ((1 << pos) - 1);
    let high = x >> pos;
    low | (bit << pos) | (high << (pos + 1))
}

fn bfs(adj: &[Vec<u32>], starts: &[u32]) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    for &s in starts {
        if dist[s as usize] == u32::MAX {
            dist[s as usize] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v as usize] {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Status;

    #[test]
    fn square_validates_with_edge_links() {
        let sq = CubeComplex::single_square();
        let cert = sq.validate().unwrap();
        assert_eq!(cert.status, Status::Pass);
        for v in 0..4 {
            let link = sq.vertex_link(v).unwrap();
            assert_eq!(link.vertices.len(), 2);
            assert_eq!(link.simplices[0].len(), 1);
        }
    }

    #[test]
    fn torus_validates_with_four_cycle_link() {
        let t2 = CubeComplex::torus();
        let cert = t2.validate().unwrap();
        assert_eq!(cert.status, Status::Pass);
        let link = t2.vertex_link(0).unwrap();
        // a+, a-, b+, b- as four link vertices in a 4-cycle
        assert_eq!(link.vertices.len(), 4);
        assert_eq!(link.simplices[0].len(), 4);
        // brute-force flag check: each link vertex has degree 2, no triangles
        let mut deg = vec![0usize; 4];
        for s in &link.simplices[0] {
            deg[s.verts[0]] += 1;
            deg[s.verts[1]] += 1;
        }
        assert_eq!(deg, vec![2, 2, 2, 2]);
    }

    #[test]
    fn bouquet_link_is_isolated_points() {
        let b2 = CubeComplex::bouquet(2);
        let link = b2.vertex_link(0).unwrap();
        assert_eq!(link.vertices.len(), 4);
        assert!(link.simplices.is_empty() || link.simplices[0].is_empty());
    }

    #[test]
    fn doubled_square_fails_nonsimplicial() {
        // two squares glued along the same two consecutive edges
        let mut c = CubeComplex::single_square();
        let sq = c.dims[2][0].clone();
        c.dims[2].push(sq);
        let cert = c.validate().unwrap();
        assert_eq!(cert.status, Status::Fail);
        assert!(matches!(cert.witness, Some(Witness::LinkViolation { .. })));
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(CubeComplex::single_square().euler_characteristic(), 1);
        assert_eq!(CubeComplex::torus().euler_characteristic(), 0);
        assert_eq!(CubeComplex::bouquet(2).euler_characteristic(), -1);
        assert_eq!(CubeComplex::cycle(6).euler_characteristic(), 0);
    }

    #[test]
    fn subdivide_edge_and_cycle() {
        let e = CubeComplex::path(1);
        let sd = e.subdivide();
        assert_eq!(sd.vertex_count(), 3);
        assert_eq!(sd.cubes(1).len(), 2);
        sd.check_structure().unwrap();

        let c5 = CubeComplex::cycle(5);
        let sd = c5.subdivide();
        assert_eq!(sd.vertex_count(), 10);
        assert_eq!(sd.cubes(1).len(), 10);
        assert!(sd.is_connected());
        sd.check_structure().unwrap();
    }

    #[test]
    fn subdivide_square() {
        let sq = CubeComplex::single_square();
        let sd = sq.subdivide();
        assert_eq!(sd.vertex_count(), 9);
        assert_eq!(sd.cubes(1).len(), 12);
        assert_eq!(sd.cubes(2).len(), 4);
        assert_eq!(sd.validate().unwrap().status, Status::Pass);
    }

    #[test]
    fn subdivide_torus_validates() {
        let sd = CubeComplex::torus().subdivide();
        assert_eq!(sd.vertex_count(), 4);
        assert_eq!(sd.cubes(1).len(), 8);
        assert_eq!(sd.cubes(2).len(), 4);
        assert_eq!(sd.validate().unwrap().status, Status::Pass);
        assert_eq!(sd.euler_characteristic(), 0);
    }

    #[test]
    fn product_of_graphs() {
        let b2 = CubeComplex::bouquet(2);
        let prod = CubeComplex::product(&b2, &b2);
        assert_eq!(prod.vertex_count(), 1);
        assert_eq!(prod.cubes(1).len(), 4);
        assert_eq!(prod.cubes(2).len(), 4);
        assert_eq!(prod.validate().unwrap().status, Status::Pass);

        let c3 = CubeComplex::cycle(3);
        let c4 = CubeComplex::cycle(4);
        let prod = CubeComplex::product(&c3, &c4);
        assert_eq!(prod.vertex_count(), 12);
        assert_eq!(prod.cubes(1).len(), 3 * 4 + 4 * 3);
        assert_eq!(prod.cubes(2).len(), 12);
        assert_eq!(prod.validate().unwrap().status, Status::Pass);
    }

    #[test]
    fn grid_validates() {
        let g = CubeComplex::grid(3, 2);
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.cubes(2).len(), 6);
        assert_eq!(g.validate().unwrap().status, Status::Pass);
        assert_eq!(g.euler_characteristic(), 1);
    }

    #[test]
    fn edge_at_corner_on_grid() {
        let g = CubeComplex::grid(1, 1);
        // single square: corner 0 has the bottom h-edge in direction 0
        let (e, end) = g.edge_at_corner(2, 0, 0, 0);
        assert_eq!(g.cubes(1)[e as usize].corners[end as usize], 0);
        let (e2, _) = g.edge_at_corner(2, 0, 0, 1);
        assert_ne!(e, e2);
    }

    #[test]
    fn dangling_face_detected() {
        let mut c = CubeComplex::graph(2, &[(0, 1)]);
        c.dims[1][0].faces[1].cube = 9;
        assert!(matches!(c.check_structure(), Err(Error::DanglingFace { .. })));
    }
}
