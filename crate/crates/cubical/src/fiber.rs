//! Fiber products of cubical maps over a common target, component
//! analysis, and automorphism groups over the target.

use crate::cmap::{subcomplex, CellMap, CubicalMap};
use crate::complex::{Cube, CubeComplex, FaceRef};
use crate::develop::develop_ball;
use crate::unionfind::UnionFind;
use crate::{Error, Result};
use std::collections::{BTreeSet, HashMap, VecDeque};

/// The fiber product of `f: Y -> X` and `g: Z -> X`. Its n-cubes are
/// pairs of n-cubes with equal image, indexed by the corners of the
/// shared target cube. Components are kept as cell lists (most are
/// tiny) and extracted to complexes on demand.
#[derive(Debug, Clone)]
pub struct FiberProduct {
    pub complex: CubeComplex,
    /// Projection onto the source of the first factor.
    pub left: CubicalMap,
    /// Projection onto the source of the second factor.
    pub right: CubicalMap,
    /// Per-dimension list of cell pairs (first factor id, second factor id).
    pub pairs: Vec<Vec<(u32, u32)>>,
    /// Sorted vertex sets per connected component, ordered by least vertex.
    pub components: Vec<Vec<u32>>,
    /// All cells per component.
    pub component_cells: Vec<Vec<(usize, u32)>>,
    pub component_of_vertex: Vec<u32>,
    /// Component containing the diagonal, present iff the factors are
    /// the identical map.
    pub diagonal: Option<usize>,
}

fn maps_equal(f: &CubicalMap, g: &CubicalMap) -> bool {
    f.source == g.source && f.assign == g.assign
}

pub fn fiber_product(f: &CubicalMap, g: &CubicalMap) -> Result<FiberProduct> {
    if f.target != g.target {
        return Err(Error::TargetMismatch);
    }
    let x = &f.target;
    let y = &f.source;
    let z = &g.source;
    let top = y.dims.len().min(z.dims.len());

    // second-factor preimage lists per target cell
    let mut pre_g: Vec<Vec<Vec<u32>>> = Vec::new();
    for n in 0..top {
        let mut pg = vec![Vec::new(); x.cubes(n).len()];
        for (ci, cm) in g.assign[n].iter().enumerate() {
            pg[cm.image as usize].push(ci as u32);
        }
        pre_g.push(pg);
    }

    // enumerate pairs sorted by (first id, second id)
    let mut pairs: Vec<Vec<(u32, u32)>> = Vec::with_capacity(top);
    let mut ids: Vec<HashMap<(u32, u32), u32>> = Vec::with_capacity(top);
    for n in 0..top {
        let mut layer = Vec::new();
        for (cy, cm) in f.assign[n].iter().enumerate() {
            for &cz in &pre_g[n][cm.image as usize] {
                layer.push((cy as u32, cz));
            }
        }
        ids.push(
            layer
                .iter()
                .enumerate()
                .map(|(i, &p)| (p, i as u32))
                .collect(),
        );
        pairs.push(layer);
    }

    // inverse corner correspondences per factor cell
    let inv = |corners: &[u8]| -> Vec<u8> {
        let mut out = vec![0u8; corners.len()];
        for (k, &m) in corners.iter().enumerate() {
            out[m as usize] = k as u8;
        }
        out
    };

    let mut dims: Vec<Vec<Cube>> = Vec::with_capacity(top);
    let mut left_assign: Vec<Vec<CellMap>> = Vec::with_capacity(top);
    let mut right_assign: Vec<Vec<CellMap>> = Vec::with_capacity(top);
    for n in 0..top {
        let mut layer = Vec::with_capacity(pairs[n].len());
        let mut la = Vec::with_capacity(pairs[n].len());
        let mut ra = Vec::with_capacity(pairs[n].len());
        for &(cy, cz) in &pairs[n] {
            let fm = &f.assign[n][cy as usize];
            let gm = &g.assign[n][cz as usize];
            let cx = fm.image;
            let sinv = inv(&fm.corners);
            let tinv = inv(&gm.corners);
            // corner m of the pair cube sits over target corner m
            let corners: Vec<u32> = (0..1usize << n)
                .map(|m| {
                    let vy = y.dims[n][cy as usize].corners[sinv[m] as usize];
                    let vz = z.dims[n][cz as usize].corners[tinv[m] as usize];
                    ids[0][&(vy, vz)]
                })
                .collect();
            let faces: Vec<FaceRef> = if n == 0 {
                Vec::new()
            } else {
                let xc = &x.dims[n][cx as usize];
                let mut out = Vec::with_capacity(2 * n);
                for i in 0..n {
                    for s in 0..2u8 {
                        // locate the factor faces over target face (i, s)
                        let fy = factor_face(y, cy, &fm.corners, n, i, s);
                        let fz = factor_face(z, cz, &gm.corners, n, i, s);
                        let sub = ids[n - 1][&(fy, fz)];
                        out.push(FaceRef {
                            cube: sub,
                            corners: xc.face(i, s).corners.clone(),
                        });
                    }
                }
                out
            };
            layer.push(Cube { corners, faces });
            la.push(CellMap { image: cy, corners: sinv.clone() });
            ra.push(CellMap { image: cz, corners: tinv.clone() });
        }
        dims.push(layer);
        left_assign.push(la);
        right_assign.push(ra);
    }
    while dims.len() > 1 && dims.last().map_or(false, |l| l.is_empty()) {
        dims.pop();
        left_assign.pop();
        right_assign.pop();
        pairs.pop();
    }
    let complex = CubeComplex::new(dims);
    let left = CubicalMap {
        source: complex.clone(),
        target: y.clone(),
        assign: left_assign,
    };
    let right = CubicalMap {
        source: complex.clone(),
        target: z.clone(),
        assign: right_assign,
    };

    // connected components through edges
    let mut uf = UnionFind::new(complex.vertex_count());
    for e in complex.cubes(1) {
        uf.union(e.corners[0], e.corners[1]);
    }
    let mut comp_of_root: HashMap<u32, u32> = HashMap::new();
    let mut components: Vec<Vec<u32>> = Vec::new();
    let mut component_of_vertex = vec![0u32; complex.vertex_count()];
    for v in 0..complex.vertex_count() as u32 {
        let r = uf.find(v);
        let idx = *comp_of_root.entry(r).or_insert_with(|| {
            components.push(Vec::new());
            components.len() as u32 - 1
        });
        components[idx as usize].push(v);
        component_of_vertex[v as usize] = idx;
    }
    let mut component_cells: Vec<Vec<(usize, u32)>> = vec![Vec::new(); components.len()];
    for (n, layer) in complex.dims.iter().enumerate() {
        for (ci, c) in layer.iter().enumerate() {
            let idx = component_of_vertex[c.corners[0] as usize];
            component_cells[idx as usize].push((n, ci as u32));
        }
    }

    let diagonal = if maps_equal(f, g) {
        let dv = ids[0][&(0, 0)];
        Some(component_of_vertex[dv as usize] as usize)
    } else {
        None
    };

    Ok(FiberProduct {
        complex,
        left,
        right,
        pairs,
        components,
        component_cells,
        component_of_vertex,
        diagonal,
    })
}

/// Component summary of the fiber product of two maps with
/// one-dimensional sources, computed without materializing the pair
/// complex. Pair-vertex numbering, component numbering, and the
/// diagonal flag agree with [`fiber_product`]; only per-component
/// counts, representatives, and tree diameters are exposed. This keeps
/// memory linear in the number of vertex and edge pairs instead of
/// building millions of cube cells.
#[derive(Debug, Clone)]
pub struct GraphFiberSummary {
    /// First pair index per first-factor vertex, plus a final sentinel.
    base: Vec<u32>,
    /// Rank of each second-factor vertex within its image bucket.
    rank: Vec<u32>,
    /// Second-factor vertices per target vertex, in id order.
    buckets: Vec<Vec<u32>>,
    /// Target vertex image per first-factor vertex.
    img_y: Vec<u32>,
    /// Pair-edge endpoints, in the same order [`fiber_product`] uses.
    edges: Vec<(u32, u32)>,
    /// Edge indices grouped by component, with per-component offsets.
    edge_order: Vec<u32>,
    edge_start: Vec<u32>,
    pub component_of_vertex: Vec<u32>,
    /// (representative pair vertex, vertex count) per component.
    pub components: Vec<(u32, u32)>,
    /// Component containing the diagonal, present iff the factors are
    /// the identical map.
    pub diagonal: Option<usize>,
}

impl GraphFiberSummary {
    /// Pair index of `(vy, vz)`; the vertices must share an image.
    pub fn pair_index(&self, vy: u32, vz: u32) -> u32 {
        self.base[vy as usize] + self.rank[vz as usize]
    }

    /// The `(vy, vz)` pair at the given pair index.
    pub fn pair_of(&self, idx: u32) -> (u32, u32) {
        let vy = self.base.partition_point(|&b| b <= idx) - 1;
        let vz = self.buckets[self.img_y[vy] as usize][(idx - self.base[vy]) as usize];
        (vy as u32, vz)
    }

    /// Vertex plus edge cells of the component.
    pub fn cells(&self, comp: usize) -> u64 {
        let v = self.components[comp].1 as u64;
        let e = (self.edge_start[comp + 1] - self.edge_start[comp]) as u64;
        v + e
    }

    /// `Some(diameter)` when the component is a tree, `None` when it
    /// carries an essential loop.
    pub fn tree_diameter(&self, comp: usize) -> Option<u32> {
        let nv = self.components[comp].1 as usize;
        let es = &self.edge_order[self.edge_start[comp] as usize..self.edge_start[comp + 1] as usize];
        if es.len() + 1 != nv {
            return None;
        }
        if nv == 1 {
            return Some(0);
        }
        // local ids, then the tree diameter by a double sweep
        let mut local: HashMap<u32, u32> = HashMap::with_capacity(nv);
        let mut adj: Vec<Vec<u32>> = Vec::with_capacity(nv);
        let id = |v: u32, local: &mut HashMap<u32, u32>, adj: &mut Vec<Vec<u32>>| -> u32 {
            *local.entry(v).or_insert_with(|| {
                adj.push(Vec::new());
                adj.len() as u32 - 1
            })
        };
        for &ei in es {
            let (a, b) = self.edges[ei as usize];
            let la = id(a, &mut local, &mut adj);
            let lb = id(b, &mut local, &mut adj);
            if la == lb {
                return None; // a loop edge is an essential cycle
            }
            adj[la as usize].push(lb);
            adj[lb as usize].push(la);
        }
        if adj.len() != nv {
            return None; // disconnected edge set cannot arise in a component
        }
        let far = |start: u32, adj: &[Vec<u32>]| -> (u32, u32) {
            let mut dist = vec![u32::MAX; adj.len()];
            dist[start as usize] = 0;
            let mut q = VecDeque::from([start]);
            let mut best = (start, 0);
            while let Some(v) = q.pop_front() {
                for &w in &adj[v as usize] {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[v as usize] + 1;
                        if dist[w as usize] > best.1 {
                            best = (w, dist[w as usize]);
                        }
                        q.push_back(w);
                    }
                }
            }
            best
        };
        let (a, _) = far(0, &adj);
        let (_, d) = far(a, &adj);
        Some(d)
    }
}

/// Builds the [`GraphFiberSummary`] of `f` and `g`. Both sources must
/// be one-dimensional.
pub fn graph_fiber_summary(f: &CubicalMap, g: &CubicalMap) -> Result<GraphFiberSummary> {
    if f.target != g.target {
        return Err(Error::TargetMismatch);
    }
    if f.source.dim() > 1 || g.source.dim() > 1 {
        return Err(Error::Unsupported(
            "graph fiber summary needs one-dimensional sources".into(),
        ));
    }
    let x = &f.target;
    let y = &f.source;
    let z = &g.source;

    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); x.vertex_count()];
    let mut rank = vec![0u32; z.vertex_count()];
    for (vz, cm) in g.assign[0].iter().enumerate() {
        rank[vz] = buckets[cm.image as usize].len() as u32;
        buckets[cm.image as usize].push(vz as u32);
    }
    let img_y: Vec<u32> = f.assign[0].iter().map(|cm| cm.image).collect();
    let mut base = Vec::with_capacity(y.vertex_count() + 1);
    let mut acc = 0u32;
    for &iy in &img_y {
        base.push(acc);
        acc += buckets[iy as usize].len() as u32;
    }
    base.push(acc);
    let n_pairs = acc as usize;

    // edge-pair buckets of the second factor per target edge
    let mut ebuckets: Vec<Vec<u32>> = vec![Vec::new(); x.cubes(1).len()];
    if g.assign.len() > 1 {
        for (ez, cm) in g.assign[1].iter().enumerate() {
            ebuckets[cm.image as usize].push(ez as u32);
        }
    }

    let mut uf = UnionFind::new(n_pairs);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    if f.assign.len() > 1 {
        for (ey, fm) in f.assign[1].iter().enumerate() {
            let yc = &y.cubes(1)[ey].corners;
            for &ez in &ebuckets[fm.image as usize] {
                let gm = &g.assign[1][ez as usize];
                let zc = &z.cubes(1)[ez as usize].corners;
                // endpoint over target corner m; edge corner maps are
                // self-inverse transpositions
                let mut ends = [0u32; 2];
                for (m, end) in ends.iter_mut().enumerate() {
                    let vy = yc[fm.corners[m] as usize];
                    let vz = zc[gm.corners[m] as usize];
                    *end = base[vy as usize] + rank[vz as usize];
                }
                uf.union(ends[0], ends[1]);
                edges.push((ends[0], ends[1]));
            }
        }
    }

    // component numbering by first-vertex order, as in `fiber_product`
    let mut comp_of_root: HashMap<u32, u32> = HashMap::new();
    let mut components: Vec<(u32, u32)> = Vec::new();
    let mut component_of_vertex = vec![0u32; n_pairs];
    for v in 0..n_pairs as u32 {
        let r = uf.find(v);
        let idx = *comp_of_root.entry(r).or_insert_with(|| {
            components.push((v, 0));
            components.len() as u32 - 1
        });
        components[idx as usize].1 += 1;
        component_of_vertex[v as usize] = idx;
    }

    // group edges by component
    let mut edge_start = vec![0u32; components.len() + 1];
    for &(a, _) in &edges {
        edge_start[component_of_vertex[a as usize] as usize + 1] += 1;
    }
    for c in 0..components.len() {
        edge_start[c + 1] += edge_start[c];
    }
    let mut cursor = edge_start.clone();
    let mut edge_order = vec![0u32; edges.len()];
    for (ei, &(a, _)) in edges.iter().enumerate() {
        let c = component_of_vertex[a as usize] as usize;
        edge_order[cursor[c] as usize] = ei as u32;
        cursor[c] += 1;
    }

    let diagonal = if maps_equal(f, g) {
        let dv = base[0] + rank[0];
        Some(component_of_vertex[dv as usize] as usize)
    } else {
        None
    };

    Ok(GraphFiberSummary {
        base,
        rank,
        buckets,
        img_y,
        edges,
        edge_order,
        edge_start,
        component_of_vertex,
        components,
        diagonal,
    })
}

impl FiberProduct {
    /// The component as a standalone complex, plus the map back to the
    /// fiber product's cells (`local cell -> (dim, fiber cell)`).
    pub fn component_complex(&self, idx: usize) -> (CubeComplex, Vec<Vec<u32>>) {
        extract_cells(&self.complex, &self.component_cells[idx])
    }

    /// The component with a full inclusion map into the fiber product
    /// (clones the ambient complex; use for small selections only).
    pub fn component_subcomplex(&self, idx: usize) -> (CubeComplex, CubicalMap) {
        let cells: BTreeSet<(usize, u32)> =
            self.component_cells[idx].iter().copied().collect();
        subcomplex(&self.complex, &cells)
    }
}

/// Builds a standalone complex from a face-closed cell list without
/// cloning the ambient complex. Returns it with the per-dimension list
/// of original ids.
pub fn extract_cells(x: &CubeComplex, cells: &[(usize, u32)]) -> (CubeComplex, Vec<Vec<u32>>) {
    let top = cells.iter().map(|&(n, _)| n).max().unwrap_or(0);
    let mut olds: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    for &(n, ci) in cells {
        olds[n].push(ci);
    }
    for l in &mut olds {
        l.sort_unstable();
        l.dedup();
    }
    let mut new_id: Vec<HashMap<u32, u32>> = Vec::with_capacity(top + 1);
    for l in &olds {
        new_id.push(l.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect());
    }
    let mut dims: Vec<Vec<Cube>> = Vec::with_capacity(top + 1);
    for (n, l) in olds.iter().enumerate() {
        let mut layer = Vec::with_capacity(l.len());
        for &ci in l {
            let c = &x.dims[n][ci as usize];
            let corners: Vec<u32> = c.corners.iter().map(|&v| new_id[0][&v]).collect();
            let faces: Vec<FaceRef> = if n == 0 {
                Vec::new()
            } else if n == 1 {
                c.corners
                    .iter()
                    .enumerate()
                    .map(|(s, &v)| FaceRef { cube: new_id[0][&v], corners: vec![s as u8] })
                    .collect()
            } else {
                c.faces
                    .iter()
                    .map(|fr| FaceRef {
                        cube: new_id[n - 1][&fr.cube],
                        corners: fr.corners.clone(),
                    })
                    .collect()
            };
            layer.push(Cube { corners, faces });
        }
        dims.push(layer);
    }
    (CubeComplex::new(dims), olds)
}

/// The factor's face lying over the target face (i, s): translates the
/// target coordinate through the factor's corner correspondence.
fn factor_face(y: &CubeComplex, cy: u32, corners: &[u8], n: usize, i: usize, s: u8) -> u32 {
    // find the source coordinate t with sigma moving bit t to bit i
    for t in 0..n {
        let d = corners[1 << t] ^ corners[0];
        if d >> i & 1 == 1 {
            let side = if (corners[0] >> i) & 1 == s { 0 } else { 1 };
            return y.dims[n][cy as usize].face(t, side).cube;
        }
    }
    unreachable!("corner correspondence covers all coordinates")
}

/// Analysis verdict for one fiber-product component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentVerdict {
    /// Trivial fundamental group; payload is the exact 0-skeleton diameter.
    Contractible(u32),
    /// Carries a witness essential loop as (edge, entry end) pairs.
    Essential(Vec<(u32, u8)>),
    Inconclusive(u32),
}

#[derive(Debug, Clone)]
pub struct ComponentMetrics {
    pub component: usize,
    pub verdict: ComponentVerdict,
}

pub fn component_metrics(
    fp: &FiberProduct,
    component: usize,
    guard_radius: u32,
) -> ComponentMetrics {
    let (c, _) = fp.component_complex(component);
    ComponentMetrics {
        component,
        verdict: contractibility_verdict(&c, guard_radius),
    }
}

/// Second-lift contractibility analysis. Graphs are decided exactly by
/// the tree test; higher dimensions develop the universal cover from
/// vertex 0 with geometrically growing radius.
pub fn contractibility_verdict(c: &CubeComplex, guard_radius: u32) -> ComponentVerdict {
    if c.dim() <= 1 {
        return graph_verdict(c);
    }
    let mut r = 2u32.min(guard_radius.max(1));
    loop {
        let ball = match develop_ball(c, 0, r) {
            Ok(b) => b,
            Err(_) => return ComponentVerdict::Inconclusive(guard_radius),
        };
        for (dv, cm) in ball.projection.assign[0].iter().enumerate() {
            if dv as u32 != ball.base && cm.image == 0 {
                let witness = crate::develop::geodesic_to_base(&ball, dv as u32);
                return ComponentVerdict::Essential(witness);
            }
        }
        let max_dist = ball.dist.iter().copied().max().unwrap_or(0);
        if max_dist < r {
            // whole universal cover developed; no second lift of the base
            let diam = c.diameter().unwrap_or(0);
            return ComponentVerdict::Contractible(diam);
        }
        if r >= guard_radius {
            return ComponentVerdict::Inconclusive(guard_radius);
        }
        r = (r * 2).min(guard_radius);
    }
}

/// Exact graph case: a connected graph is contractible iff it is a
/// tree; otherwise a BFS tree plus any extra edge gives a witness loop.
fn graph_verdict(c: &CubeComplex) -> ComponentVerdict {
    let nv = c.vertex_count();
    let ne = c.cubes(1).len();
    let has_loop_edge = c.cubes(1).iter().position(|e| e.corners[0] == e.corners[1]);
    if let Some(e) = has_loop_edge {
        return ComponentVerdict::Essential(vec![(e as u32, 0)]);
    }
    if ne + 1 == nv {
        let diam = c.diameter().unwrap_or(0);
        return ComponentVerdict::Contractible(diam);
    }
    // find the extra edge: BFS tree from 0
    let mut parent: Vec<Option<(u32, u8)>> = vec![None; nv]; // (edge, entry end from parent)
    let mut seen = vec![false; nv];
    let mut tree_edge = vec![false; ne];
    seen[0] = true;
    let mut q = VecDeque::new();
    q.push_back(0u32);
    let mut ends: Vec<Vec<(u32, u8)>> = vec![Vec::new(); nv];
    for (ei, e) in c.cubes(1).iter().enumerate() {
        for end in 0..2u8 {
            ends[e.corners[end as usize] as usize].push((ei as u32, end));
        }
    }
    while let Some(v) = q.pop_front() {
        for &(e, end) in &ends[v as usize] {
            let w = c.cubes(1)[e as usize].corners[(end ^ 1) as usize];
            if !seen[w as usize] {
                seen[w as usize] = true;
                tree_edge[e as usize] = true;
                parent[w as usize] = Some((e, end));
                q.push_back(w);
            }
        }
    }
    let extra = (0..ne).find(|&e| !tree_edge[e]).expect("euler excess implies extra edge");
    let (a, b) = (c.cubes(1)[extra].corners[0], c.cubes(1)[extra].corners[1]);
    // loop: base -> a, extra edge, b -> base
    let path_to = |mut v: u32| -> Vec<(u32, u8)> {
        let mut steps = Vec::new();
        while let Some((e, end)) = parent[v as usize] {
            steps.push((e, end));
            v = c.cubes(1)[e as usize].corners[end as usize];
        }
        steps.reverse();
        steps
    };
    let mut witness = path_to(a);
    witness.push((extra as u32, 0));
    let back = path_to(b);
    for &(e, end) in back.iter().rev() {
        witness.push((e, end ^ 1));
    }
    ComponentVerdict::Essential(witness)
}

/// All automorphisms of the source commuting with `map`, as maps
/// `Y -> Y`, found by forced extension from each candidate image of
/// vertex 0. Always contains the identity; sorted by the image of
/// vertex 0.
pub fn aut_over_x(map: &CubicalMap) -> Vec<CubicalMap> {
    let y = &map.source;
    let mut out = Vec::new();
    let base_img = map.vertex_image(0);
    // directed edge-ends per vertex
    let mut ends: Vec<Vec<(u32, u8)>> = vec![Vec::new(); y.vertex_count()];
    for (ei, e) in y.cubes(1).iter().enumerate() {
        for end in 0..2u8 {
            ends[e.corners[end as usize] as usize].push((ei as u32, end));
        }
    }
    'cand: for u in 0..y.vertex_count() as u32 {
        if map.vertex_image(u) != base_img {
            continue;
        }
        // forced BFS extension of the vertex and edge maps
        let mut vmap: Vec<Option<u32>> = vec![None; y.vertex_count()];
        let mut emap: Vec<Option<(u32, u8)>> = vec![None; y.cubes(1).len()];
        vmap[0] = Some(u);
        let mut queue = VecDeque::new();
        queue.push_back(0u32);
        while let Some(v) = queue.pop_front() {
            let w = vmap[v as usize].unwrap();
            for &(e, end) in &ends[v as usize] {
                let target = map.edge_end_image(e, end);
                // the unique edge-end at w with the same image
                let mut found = None;
                for &(e2, end2) in &ends[w as usize] {
                    if map.edge_end_image(e2, end2) == target {
                        found = Some((e2, end2));
                        break;
                    }
                }
                let (e2, end2) = match found {
                    Some(p) => p,
                    None => continue 'cand,
                };
                let this = if end == 0 { (e2, end2) } else { (e2, end2 ^ 1) };
                match emap[e as usize] {
                    None => emap[e as usize] = Some(this),
                    Some(prev) => {
                        if prev != this {
                            continue 'cand;
                        }
                    }
                }
                let far = y.cubes(1)[e as usize].corners[(end ^ 1) as usize];
                let far_img = y.cubes(1)[e2 as usize].corners[(end2 ^ 1) as usize];
                match vmap[far as usize] {
                    None => {
                        vmap[far as usize] = Some(far_img);
                        queue.push_back(far);
                    }
                    Some(prev) => {
                        if prev != far_img {
                            continue 'cand;
                        }
                    }
                }
            }
        }
        if vmap.iter().any(|v| v.is_none()) {
            continue; // source not connected through vertex 0
        }
        // bijectivity on vertices
        let mut seen = vec![false; y.vertex_count()];
        for v in vmap.iter().flatten() {
            if seen[*v as usize] {
                continue 'cand;
            }
            seen[*v as usize] = true;
        }
        // assemble cell maps dimension by dimension
        let mut assign: Vec<Vec<CellMap>> = Vec::with_capacity(y.dims.len());
        assign.push(
            vmap.iter()
                .map(|v| CellMap { image: v.unwrap(), corners: vec![0] })
                .collect(),
        );
        if y.dims.len() > 1 {
            assign.push(
                emap.iter()
                    .map(|e| {
                        let (e2, end0) = e.expect("edges reached through endpoints");
                        CellMap { image: e2, corners: vec![end0, end0 ^ 1] }
                    })
                    .collect(),
            );
        }
        for n in 2..y.dims.len() {
            let mut layer = Vec::with_capacity(y.cubes(n).len());
            for (ci, c) in y.cubes(n).iter().enumerate() {
                // the image cube must match corner-vertex images and map
                // to the same target cube with the same correspondence
                let want: Vec<u32> = c
                    .corners
                    .iter()
                    .map(|&v| assign[0][v as usize].image)
                    .collect();
                let src_cm = &map.assign[n][ci];
                let mut found = None;
                'search: for (cj, c2) in y.cubes(n).iter().enumerate() {
                    let tgt_cm = &map.assign[n][cj];
                    if tgt_cm.image != src_cm.image {
                        continue;
                    }
                    // correspondence k -> k2 forced by the target corners
                    let mut inv2 = vec![0u8; 1 << n];
                    for (k2, &m) in tgt_cm.corners.iter().enumerate() {
                        inv2[m as usize] = k2 as u8;
                    }
                    let corr: Vec<u8> = src_cm
                        .corners
                        .iter()
                        .map(|&m| inv2[m as usize])
                        .collect();
                    for k in 0..1usize << n {
                        if c2.corners[corr[k] as usize] != want[k] {
                            continue 'search;
                        }
                    }
                    found = Some(CellMap { image: cj as u32, corners: corr });
                    break;
                }
                match found {
                    Some(cm) => layer.push(cm),
                    None => continue 'cand,
                }
            }
            // bijectivity per dimension
            let mut seen = vec![false; y.cubes(n).len()];
            for cm in &layer {
                if seen[cm.image as usize] {
                    continue 'cand;
                }
                seen[cm.image as usize] = true;
            }
            assign.push(layer);
        }
        let psi = CubicalMap {
            source: y.clone(),
            target: y.clone(),
            assign,
        };
        if psi.check_structure().is_ok() {
            out.push(psi);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmap::check_local_isometry;
    use crate::Status;

    fn cycle_over_loop(m: u32) -> CubicalMap {
        let cm = CubeComplex::cycle(m);
        let b1 = CubeComplex::bouquet(1);
        let assign = vec![
            (0..m).map(|_| CellMap { image: 0, corners: vec![0] }).collect(),
            (0..m)
                .map(|_| CellMap { image: 0, corners: vec![0, 1] })
                .collect(),
        ];
        CubicalMap { source: cm, target: b1, assign }
    }

    fn word_over_b2(word: &[usize]) -> CubicalMap {
        let n = word.len() as u32;
        let c = CubeComplex::cycle(n);
        let b2 = CubeComplex::bouquet(2);
        let assign = vec![
            (0..n).map(|_| CellMap { image: 0, corners: vec![0] }).collect(),
            word.iter()
                .map(|&l| CellMap { image: l as u32, corners: vec![0, 1] })
                .collect(),
        ];
        CubicalMap { source: c, target: b2, assign }
    }

    #[test]
    fn identity_fiber_is_diagonal_only() {
        let b2 = CubeComplex::bouquet(2);
        let id = CubicalMap::identity(&b2);
        let fp = fiber_product(&id, &id).unwrap();
        assert_eq!(fp.components.len(), 1);
        assert_eq!(fp.diagonal, Some(0));
        let (c, _) = fp.component_complex(0);
        assert_eq!(c.cubes(1).len(), 2);
    }

    #[test]
    fn abab_self_fiber() {
        let m = word_over_b2(&[0, 1, 0, 1]);
        assert_eq!(check_local_isometry(&m).unwrap().status, Status::Pass);
        let fp = fiber_product(&m, &m).unwrap();
        // diagonal C4 plus the shift-by-two C4; odd shifts leave
        // isolated vertex pairs
        let cycles: Vec<usize> = (0..fp.components.len())
            .filter(|&i| fp.components[i].len() == 4)
            .collect();
        assert_eq!(cycles.len(), 2);
        for &i in &cycles {
            let (c, _) = fp.component_complex(i);
            assert_eq!(c.cubes(1).len(), 4);
        }
        assert_eq!(fp.components.len(), 10);
        let d = fp.diagonal.unwrap();
        assert_eq!(fp.components[d].len(), 4);
    }

    #[test]
    fn cycle_fibers_over_loop() {
        for (m, n) in [(2u32, 3u32), (4, 6), (6, 9), (5, 7), (12, 8)] {
            let f = cycle_over_loop(m);
            let g = cycle_over_loop(n);
            let fp = fiber_product(&f, &g).unwrap();
            let gcd = {
                let (mut a, mut b) = (m, n);
                while b != 0 {
                    let t = a % b;
                    a = b;
                    b = t;
                }
                a
            };
            let lcm = m / gcd * n;
            assert_eq!(fp.components.len(), gcd as usize, "m={m} n={n}");
            for i in 0..fp.components.len() {
                let (c, _) = fp.component_complex(i);
                assert_eq!(c.vertex_count(), lcm as usize);
                assert_eq!(c.cubes(1).len(), lcm as usize);
            }
            assert!(fp.diagonal.is_none());
            // cell count identity
            assert_eq!(fp.complex.vertex_count(), (m * n) as usize);
            assert_eq!(fp.complex.cubes(1).len(), (m * n) as usize);
        }
    }

    #[test]
    fn graph_summary_matches_fiber_product() {
        let tree_oracle = |c: &CubeComplex| -> Option<u32> {
            let simple = c.cubes(1).iter().all(|e| e.corners[0] != e.corners[1]);
            if simple && c.cubes(1).len() + 1 == c.vertex_count() {
                Some(c.diameter().unwrap_or(0))
            } else {
                None
            }
        };
        let cases: Vec<(CubicalMap, CubicalMap)> = vec![
            (cycle_over_loop(4), cycle_over_loop(6)),
            (cycle_over_loop(5), cycle_over_loop(5)),
            (word_over_b2(&[0, 0, 1, 1]), word_over_b2(&[0, 0, 1, 0, 1, 1])),
            (
                word_over_b2(&[0, 1, 0, 0, 1, 1]),
                word_over_b2(&[0, 1, 0, 0, 1, 1]),
            ),
            (word_over_b2(&[0, 0, 0, 1]), word_over_b2(&[1, 1])),
        ];
        for (f, g) in cases {
            let fp = fiber_product(&f, &g).unwrap();
            let same = maps_equal(&f, &g);
            let fs = if same {
                graph_fiber_summary(&f, &f).unwrap()
            } else {
                graph_fiber_summary(&f, &g).unwrap()
            };
            assert_eq!(fs.component_of_vertex, fp.component_of_vertex);
            assert_eq!(fs.diagonal, fp.diagonal);
            assert_eq!(fs.components.len(), fp.components.len());
            for c in 0..fp.components.len() {
                assert_eq!(fs.components[c].0, fp.components[c][0]);
                assert_eq!(fs.cells(c), fp.component_cells[c].len() as u64);
                let (cc, _) = fp.component_complex(c);
                let oracle = tree_oracle(&cc);
                assert_eq!(fs.tree_diameter(c), oracle, "component {c}");
                let (u, v) = fs.pair_of(fs.components[c].0);
                assert_eq!(
                    fp.pairs[0][fp.components[c][0] as usize],
                    (u, v),
                    "pair_of roundtrip"
                );
            }
        }
    }

    #[test]
    fn component_metrics_verdicts() {
        let f = cycle_over_loop(4);
        let g = cycle_over_loop(6);
        let fp = fiber_product(&f, &g).unwrap();
        for i in 0..fp.components.len() {
            let m = component_metrics(&fp, i, 64);
            match m.verdict {
                ComponentVerdict::Essential(w) => {
                    assert_eq!(w.len() % 12, 0);
                }
                v => panic!("expected essential, got {v:?}"),
            }
        }
        // fibers of distinct-label words give contractible pieces
        let a = word_over_b2(&[0, 0, 1, 1]);
        let b = word_over_b2(&[0, 0, 1, 0, 1, 1]);
        let fp = fiber_product(&a, &b).unwrap();
        assert!(!fp.components.is_empty());
        for i in 0..fp.components.len() {
            let m = component_metrics(&fp, i, 64);
            match m.verdict {
                ComponentVerdict::Contractible(d) => {
                    let (c, _) = fp.component_complex(i);
                    assert_eq!(Some(d), c.diameter());
                }
                v => panic!("expected contractible piece, got {v:?}"),
            }
        }
    }

    #[test]
    fn essential_witness_lifts_open() {
        let f = cycle_over_loop(2);
        let g = cycle_over_loop(3);
        let fp = fiber_product(&f, &g).unwrap();
        let m = component_metrics(&fp, 0, 64);
        if let ComponentVerdict::Essential(w) = m.verdict {
            let (c, _) = fp.component_complex(0);
            let ball = develop_ball(&c, 0, w.len() as u32 + 1).unwrap();
            let end = ball.lift_path(ball.base, &w).unwrap();
            assert_ne!(end, ball.base);
        } else {
            panic!("expected essential");
        }
    }

    #[test]
    fn aut_of_cycle_cover() {
        let f = cycle_over_loop(6);
        let auts = aut_over_x(&f);
        assert_eq!(auts.len(), 6);
        for psi in &auts {
            psi.check_structure().unwrap();
            // commutes over the target
            let comp = CubicalMap::compose(psi, &f);
            assert_eq!(comp.assign, f.assign);
        }
    }

    #[test]
    fn aut_of_asymmetric_word_is_trivial() {
        let m = word_over_b2(&[0, 0, 1, 1]);
        assert_eq!(aut_over_x(&m).len(), 1);
    }

    #[test]
    fn aut_of_abab_is_rotation_by_two() {
        let m = word_over_b2(&[0, 1, 0, 1]);
        assert_eq!(aut_over_x(&m).len(), 2);
    }

    #[test]
    fn fiber_cell_count_identity() {
        let a = word_over_b2(&[0, 1, 0, 1]);
        let b = word_over_b2(&[0, 0, 1, 1]);
        let fp = fiber_product(&a, &b).unwrap();
        // vertices: 4*4 (single target vertex); edges: 2*2 + 2*2
        assert_eq!(fp.complex.vertex_count(), 16);
        assert_eq!(fp.complex.cubes(1).len(), 8);
        fp.complex.check_structure().unwrap();
        fp.left.check_structure().unwrap();
        fp.right.check_structure().unwrap();
        assert_eq!(check_local_isometry(&fp.left).unwrap().status, Status::Pass);
    }

    #[test]
    fn square_fiber_over_torus() {
        // identity fiber of the torus keeps the square; projections check out
        let t2 = CubeComplex::torus();
        let id = CubicalMap::identity(&t2);
        let fp = fiber_product(&id, &id).unwrap();
        let d = fp.diagonal.unwrap();
        let (c, _) = fp.component_complex(d);
        assert_eq!(c.cubes(2).len(), 1);
        fp.complex.check_structure().unwrap();
    }
}
