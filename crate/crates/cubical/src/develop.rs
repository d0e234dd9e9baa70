//! Developments of universal-cover balls, systole search, convex hulls,
//! and the superconvexity strip machine.

use crate::cert::{Certificate, Witness};
use crate::cmap::{subcomplex, CellMap, CubicalMap};
use crate::complex::{Cube, CubeComplex, FaceRef};
use crate::unionfind::UnionFind;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// A radius-r ball in the universal cover, developed around a base
/// vertex. Cells within distance 1 of the radius bound are marked as
/// frontier; the projection is a local isometry away from them.
#[derive(Debug, Clone)]
pub struct DevelopedBall {
    /// Base vertex id inside the ball (always 0 after sorting by distance).
    pub base: u32,
    /// The vertex of the base complex the ball is developed around.
    pub base_image: u32,
    pub radius: u32,
    pub complex: CubeComplex,
    pub projection: CubicalMap,
    /// Distance to the base per ball vertex.
    pub dist: Vec<u32>,
    /// Frontier marker per ball vertex (distance >= radius - 1).
    pub frontier: Vec<bool>,
    /// Unique edge lifts: (ball vertex, base edge, entry end) -> far vertex.
    steps: HashMap<(u32, u32, u8), u32>,
}

impl DevelopedBall {
    /// Follows the lift of a base edge from a ball vertex: traverses
    /// base edge `e` entering at `end` (so the vertex image must be
    /// `e.corners[end]`).
    pub fn step(&self, v: u32, e: u32, end: u8) -> Option<u32> {
        self.steps.get(&(v, e, end)).copied()
    }

    /// Lifts an edge path given as (base edge, entry end) pairs; returns
    /// the terminal ball vertex if the whole path stays inside the ball.
    pub fn lift_path(&self, start: u32, path: &[(u32, u8)]) -> Option<u32> {
        let mut v = start;
        for &(e, end) in path {
            v = self.step(v, e, end)?;
        }
        Some(v)
    }
}

/// Edge-ends at each vertex of a complex, sorted.
fn edge_ends(x: &CubeComplex) -> Vec<Vec<(u32, u8)>> {
    let mut out = vec![Vec::new(); x.vertex_count()];
    for (ei, e) in x.cubes(1).iter().enumerate() {
        for end in 0..2u8 {
            out[e.corners[end as usize] as usize].push((ei as u32, end));
        }
    }
    out
}

/// Square corners at each vertex: (square, corner).
fn square_corners(x: &CubeComplex) -> Vec<Vec<(u32, u32)>> {
    let mut out = vec![Vec::new(); x.vertex_count()];
    for (si, s) in x.cubes(2).iter().enumerate() {
        for k in 0..4u32 {
            out[s.corners[k as usize] as usize].push((si as u32, k));
        }
    }
    out
}

struct DevState<'a> {
    x: &'a CubeComplex,
    ends: Vec<Vec<(u32, u8)>>,
    squares: Vec<Vec<(u32, u32)>>,
    img: Vec<u32>,
    uf: UnionFind,
    /// Per live root: (base edge, entry end) -> dev target (maybe stale).
    adj: Vec<BTreeMap<(u32, u8), u32>>,
    dist: Vec<u32>,
}

impl<'a> DevState<'a> {
    fn new(x: &'a CubeComplex, base: u32) -> Self {
        DevState {
            x,
            ends: edge_ends(x),
            squares: square_corners(x),
            img: vec![base],
            uf: UnionFind::new(1),
            adj: vec![BTreeMap::new()],
            dist: vec![0],
        }
    }

    fn resolve(&mut self, v: u32, key: (u32, u8)) -> Option<u32> {
        let r = self.uf.find(v);
        let t = *self.adj[r as usize].get(&key)?;
        Some(self.uf.find(t))
    }

    /// Folds two dev vertices together, cascading identifications
    /// (unique edge lifts force further merges).
    fn merge(&mut self, a: u32, b: u32) {
        let mut queue = vec![(a, b)];
        while let Some((a, b)) = queue.pop() {
            let ra = self.uf.find(a);
            let rb = self.uf.find(b);
            if ra == rb {
                continue;
            }
            debug_assert_eq!(self.img[ra as usize], self.img[rb as usize]);
            self.uf.union(ra, rb);
            let lo = self.uf.find(ra);
            let hi = if lo == ra { rb } else { ra };
            self.dist[lo as usize] = self.dist[lo as usize].min(self.dist[hi as usize]);
            let moved = std::mem::take(&mut self.adj[hi as usize]);
            for (key, tgt) in moved {
                match self.adj[lo as usize].get(&key) {
                    Some(&existing) => {
                        let e = self.uf.find(existing);
                        let t = self.uf.find(tgt);
                        if e != t {
                            queue.push((e, t));
                        }
                    }
                    None => {
                        self.adj[lo as usize].insert(key, tgt);
                    }
                }
            }
        }
    }

    fn roots(&mut self) -> Vec<u32> {
        let n = self.adj.len() as u32;
        (0..n).filter(|&v| self.uf.find(v) == v).collect()
    }

    /// Recomputes distances from the base root by BFS over edge lifts.
    fn recompute_dist(&mut self) {
        for v in self.roots() {
            self.dist[v as usize] = u32::MAX;
        }
        let b = self.uf.find(0);
        self.dist[b as usize] = 0;
        let mut q = VecDeque::new();
        q.push_back(b);
        while let Some(v) = q.pop_front() {
            let keys: Vec<(u32, u8)> = self.adj[v as usize].keys().copied().collect();
            for key in keys {
                let w = self.resolve(v, key).unwrap();
                if self.dist[w as usize] == u32::MAX {
                    self.dist[w as usize] = self.dist[v as usize] + 1;
                    q.push_back(w);
                }
            }
        }
    }

    /// One expansion pass: attach every missing edge-end at vertices
    /// strictly inside the radius. Returns whether anything was added.
    fn expand(&mut self, radius: u32) -> bool {
        let mut changed = false;
        let mut order: Vec<u32> = self.roots();
        order.sort_by_key(|&v| (self.dist[v as usize], v));
        for v in order {
            if self.uf.find(v) != v || self.dist[v as usize] >= radius {
                continue;
            }
            let x = self.img[v as usize];
            let ends: Vec<(u32, u8)> = self.ends[x as usize].clone();
            for (e, end) in ends {
                if self.resolve(v, (e, end)).is_none() {
                    let far = self.x.cubes(1)[e as usize].corners[(end ^ 1) as usize];
                    let w = self.uf.push();
                    self.img.push(far);
                    self.adj.push(BTreeMap::new());
                    self.dist.push(self.dist[v as usize] + 1);
                    self.adj[self.uf.find(v) as usize].insert((e, end), w);
                    self.adj[w as usize].insert((e, end ^ 1), self.uf.find(v));
                    changed = true;
                }
            }
        }
        changed
    }

    /// One saturation pass: close squares around every developed corner,
    /// merging fourth corners or adding the missing closing edge.
    fn saturate(&mut self) -> bool {
        let mut changed = false;
        let mut v = 0u32;
        while (v as usize) < self.adj.len() {
            if self.uf.find(v) != v {
                v += 1;
                continue;
            }
            let x = self.img[v as usize];
            let sqs: Vec<(u32, u32)> = self.squares[x as usize].clone();
            for (s, k) in sqs {
                let e0 = self.x.edge_at_corner(2, s, k, 0);
                let e1 = self.x.edge_at_corner(2, s, k, 1);
                let v0 = self.resolve(v, e0);
                let v1 = self.resolve(v, e1);
                let (v0, v1) = match (v0, v1) {
                    (Some(a), Some(b)) => (a, b),
                    _ => continue,
                };
                let c0 = self.x.edge_at_corner(2, s, k ^ 1, 1); // up from v0
                let c1 = self.x.edge_at_corner(2, s, k ^ 2, 0); // across from v1
                let w0 = self.resolve(v0, c0);
                let w1 = self.resolve(v1, c1);
                match (w0, w1) {
                    (Some(a), Some(b)) => {
                        if a != b {
                            self.merge(a, b);
                            changed = true;
                        }
                    }
                    (Some(a), None) => {
                        self.adj[self.uf.find(v1) as usize].insert(c1, a);
                        self.adj[self.uf.find(a) as usize].insert((c1.0, c1.1 ^ 1), v1);
                        changed = true;
                    }
                    (None, Some(b)) => {
                        self.adj[self.uf.find(v0) as usize].insert(c0, b);
                        self.adj[self.uf.find(b) as usize].insert((c0.0, c0.1 ^ 1), v0);
                        changed = true;
                    }
                    (None, None) => {}
                }
            }
            v += 1;
        }
        changed
    }
}

/// Develops the radius-r ball of the universal cover around `base`.
/// The complex must be nonpositively curved (square saturation relies
/// on unique square closures).
pub fn develop_ball(x: &CubeComplex, base: u32, radius: u32) -> Result<DevelopedBall> {
    if base as usize >= x.vertex_count() {
        return Err(Error::UnknownVertex(base));
    }
    let mut st = DevState::new(x, base);
    loop {
        let grew = st.expand(radius);
        let mut folded = false;
        while st.saturate() {
            folded = true;
        }
        st.recompute_dist();
        if !grew && !folded {
            break;
        }
    }

    // canonical ids: sort live roots by (distance, discovery id)
    let mut roots = st.roots();
    roots.sort_by_key(|&v| (st.dist[v as usize], v));
    let new_id: HashMap<u32, u32> = roots
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();

    let verts: Vec<Cube> = roots
        .iter()
        .enumerate()
        .map(|(i, _)| Cube { corners: vec![i as u32], faces: Vec::new() })
        .collect();
    let vert_assign: Vec<CellMap> = roots
        .iter()
        .map(|&v| CellMap { image: st.img[v as usize], corners: vec![0] })
        .collect();

    // edges: one per unordered lift, sorted by (base edge, endpoints)
    let mut edge_set: BTreeSet<(u32, u32, u32)> = BTreeSet::new();
    let mut steps: HashMap<(u32, u32, u8), u32> = HashMap::new();
    for &v in &roots {
        let keys: Vec<(u32, u8)> = st.adj[v as usize].keys().copied().collect();
        for (e, end) in keys {
            let w = st.resolve(v, (e, end)).unwrap();
            let (dv, dw) = (new_id[&v], new_id[&w]);
            steps.insert((dv, e, end), dw);
            // endpoint at base-edge end 0 first
            let (a, b) = if end == 0 { (dv, dw) } else { (dw, dv) };
            edge_set.insert((e, a, b));
        }
    }
    let edge_list: Vec<(u32, u32, u32)> = edge_set.into_iter().collect();
    let edges: Vec<Cube> = edge_list
        .iter()
        .map(|&(_, a, b)| Cube {
            corners: vec![a, b],
            faces: vec![
                FaceRef { cube: a, corners: vec![0] },
                FaceRef { cube: b, corners: vec![1] },
            ],
        })
        .collect();
    let edge_assign: Vec<CellMap> = edge_list
        .iter()
        .map(|&(e, _, _)| CellMap { image: e, corners: vec![0, 1] })
        .collect();

    let mut dims = vec![verts, edges];
    let mut assign = vec![vert_assign, edge_assign];

    // lift cubes of dimension >= 2, keyed by (base cube, dev corner 0);
    // corners of a lift are indexed exactly like the base cube's
    let mut prev_ids: HashMap<(u32, u32), u32> = HashMap::new();
    for (i, &(e, a, _)) in edge_list.iter().enumerate() {
        prev_ids.insert((e, a), i as u32);
    }
    for n in 2..x.dims.len() {
        let mut layer: Vec<Cube> = Vec::new();
        let mut layer_assign: Vec<CellMap> = Vec::new();
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        for (ci, c) in x.cubes(n).iter().enumerate() {
            'vloop: for dv0 in 0..dims[0].len() as u32 {
                if assign[0][dv0 as usize].image != c.corners[0] {
                    continue;
                }
                // walk the corner graph; require total consistency
                let mut dev: Vec<Option<u32>> = vec![None; 1 << n];
                dev[0] = Some(dv0);
                for k in 1..1u32 << n {
                    let t = k.trailing_zeros() as usize;
                    let prev = k ^ (1 << t);
                    let pv = match dev[prev as usize] {
                        Some(p) => p,
                        None => continue 'vloop,
                    };
                    let (e, end) = x.edge_at_corner(n, ci as u32, prev, t);
                    let next = match steps.get(&(pv, e, end)) {
                        Some(&w) => w,
                        None => continue 'vloop,
                    };
                    match dev[k as usize] {
                        None => dev[k as usize] = Some(next),
                        Some(old) if old != next => continue 'vloop,
                        _ => {}
                    }
                }
                // cross-check every remaining corner edge
                for k in 0..1u32 << n {
                    for t in 0..n {
                        let other = k ^ (1 << t);
                        let (e, end) = x.edge_at_corner(n, ci as u32, k, t);
                        match steps.get(&(dev[k as usize].unwrap(), e, end)) {
                            Some(&w) if w == dev[other as usize].unwrap() => {}
                            _ => continue 'vloop,
                        }
                    }
                }
                let corners: Vec<u32> = dev.iter().map(|d| d.unwrap()).collect();
                let faces: Vec<FaceRef> = c
                    .faces
                    .iter()
                    .map(|fr| {
                        // facet lifts are keyed by (base facet, dev vertex at
                        // its corner 0) in every dimension, including edges
                        let anchor = corners[fr.corners[0] as usize];
                        FaceRef {
                            cube: prev_ids[&(fr.cube, anchor)],
                            corners: fr.corners.clone(),
                        }
                    })
                    .collect();
                ids.insert((ci as u32, dv0), layer.len() as u32);
                layer_assign.push(CellMap {
                    image: ci as u32,
                    corners: (0..1u8 << n).collect(),
                });
                layer.push(Cube { corners, faces });
            }
        }
        prev_ids = ids;
        dims.push(layer);
        assign.push(layer_assign);
    }
    while dims.len() > 1 && dims.last().map_or(false, |l| l.is_empty()) {
        dims.pop();
        assign.pop();
    }

    let complex = CubeComplex::new(dims);
    let dist: Vec<u32> = roots.iter().map(|&v| st.dist[v as usize]).collect();
    let frontier: Vec<bool> = dist
        .iter()
        .map(|&d| d + 1 >= radius.max(1))
        .collect();
    let projection = CubicalMap {
        source: complex.clone(),
        target: x.clone(),
        assign,
    };
    Ok(DevelopedBall {
        base: 0,
        base_image: base,
        radius,
        complex,
        projection,
        dist,
        frontier,
        steps,
    })
}

/// Systole outcome: exact with a witness loop, or a lower bound from an
/// exhausted guard radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystoleResult {
    /// Length, base vertex, and the witness essential loop given as
    /// (edge, entry end) pairs starting and ending at the base vertex.
    Exact {
        length: u32,
        base: u32,
        witness: Vec<(u32, u8)>,
    },
    AtLeast(u32),
}

impl SystoleResult {
    pub fn exact_length(&self) -> Option<u32> {
        match self {
            SystoleResult::Exact { length, .. } => Some(*length),
            SystoleResult::AtLeast(_) => None,
        }
    }
}

/// Shortest essential loop length by second-lift detection: around each
/// vertex, the distance to the nearest second lift in the developed
/// ball equals the shortest essential loop through that vertex.
pub fn systole(x: &CubeComplex, guard_radius: u32) -> Result<SystoleResult> {
    if !x.is_connected() {
        return Err(Error::NotConnected);
    }
    if x.dim() <= 1 {
        // in a graph the shortest essential loop is a shortest cycle,
        // found directly without developing balls
        return Ok(graph_systole(x, guard_radius));
    }
    let mut best: Option<(u32, u32, Vec<(u32, u8)>)> = None;
    for v in 0..x.vertex_count() as u32 {
        // only a strictly shorter loop than the current best matters
        let cap = match &best {
            Some((d, _, _)) => guard_radius.min(d.saturating_sub(1)),
            None => guard_radius,
        };
        if cap == 0 {
            break;
        }
        // grow the radius geometrically; a second lift at distance d is
        // found as soon as the radius reaches d
        let mut r = 2u32.min(cap);
        loop {
            let ball = develop_ball(x, v, r)?;
            let mut second: Option<u32> = None;
            for (dv, cm) in ball.projection.assign[0].iter().enumerate() {
                if dv as u32 != ball.base && cm.image == v {
                    match second {
                        Some(s) if ball.dist[s as usize] <= ball.dist[dv] => {}
                        _ => second = Some(dv as u32),
                    }
                }
            }
            if let Some(w) = second {
                let d = ball.dist[w as usize];
                let witness = path_to_base(&ball, w);
                if best.as_ref().map_or(true, |b| d < b.0) {
                    best = Some((d, v, witness));
                }
                break;
            }
            if r >= cap {
                break;
            }
            r = (r * 2).min(cap);
        }
    }
    Ok(match best {
        Some((length, base, witness)) => SystoleResult::Exact { length, base, witness },
        None => SystoleResult::AtLeast(guard_radius + 1),
    })
}

/// Shortest cycle in a graph with a closed-loop witness: self-loops
/// count 1; otherwise, for every edge, the endpoint distance with the
/// edge removed plus one. Deterministic: the least (length, base,
/// witness) candidate wins.
fn graph_systole(x: &CubeComplex, guard_radius: u32) -> SystoleResult {
    let edges = x.cubes(1);
    let nv = x.vertex_count();
    let mut adj: Vec<Vec<(u32, u8)>> = vec![Vec::new(); nv];
    for (ei, e) in edges.iter().enumerate() {
        for s in 0..2u8 {
            adj[e.corners[s as usize] as usize].push((ei as u32, s));
        }
    }
    let mut best: Option<(u32, u32, Vec<(u32, u8)>)> = None;
    let offer = |cand: (u32, u32, Vec<(u32, u8)>), best: &mut Option<_>| {
        if best.as_ref().map_or(true, |b: &(u32, u32, Vec<(u32, u8)>)| cand < *b) {
            *best = Some(cand);
        }
    };
    for (ei, e) in edges.iter().enumerate() {
        if e.corners[0] == e.corners[1] {
            offer((1, e.corners[0], vec![(ei as u32, 0)]), &mut best);
        }
    }
    for (skip, e) in edges.iter().enumerate() {
        let (u, v) = (e.corners[0], e.corners[1]);
        if u == v {
            continue;
        }
        if matches!(&best, Some((1, _, _))) {
            break; // a self-loop already wins
        }
        // BFS from u to v with the edge removed, tracking parent steps
        let mut prev: Vec<Option<(u32, u32, u8)>> = vec![None; nv];
        let mut dist = vec![u32::MAX; nv];
        dist[u as usize] = 0;
        let mut q = VecDeque::from([u]);
        'bfs: while let Some(w) = q.pop_front() {
            for &(f, s) in &adj[w as usize] {
                if f as usize == skip {
                    continue;
                }
                let t = edges[f as usize].corners[1 - s as usize];
                if dist[t as usize] == u32::MAX {
                    dist[t as usize] = dist[w as usize] + 1;
                    prev[t as usize] = Some((w, f, s));
                    if t == v {
                        break 'bfs;
                    }
                    q.push_back(t);
                }
            }
        }
        if dist[v as usize] == u32::MAX {
            continue;
        }
        // loop at u: the path to v, then back across the removed edge
        let mut path = Vec::new();
        let mut cur = v;
        while let Some((w, f, s)) = prev[cur as usize] {
            path.push((f, s));
            cur = w;
        }
        path.reverse();
        path.push((skip as u32, 1)); // enter at the v end (corners[1])
        offer((dist[v as usize] + 1, u, path), &mut best);
    }
    match best {
        Some((length, base, witness)) if length <= guard_radius => {
            SystoleResult::Exact { length, base, witness }
        }
        _ => SystoleResult::AtLeast(guard_radius + 1),
    }
}

/// A geodesic from the base to `v`, as (base edge, entry end) steps.
pub fn geodesic_to_base(ball: &DevelopedBall, v: u32) -> Vec<(u32, u8)> {
    path_to_base(ball, v)
}

fn path_to_base(ball: &DevelopedBall, v: u32) -> Vec<(u32, u8)> {
    let mut path = Vec::new();
    let mut cur = v;
    while cur != ball.base {
        let d = ball.dist[cur as usize];
        // find a neighbor strictly closer to the base
        let mut found = None;
        for (&(u, e, end), &w) in ball.steps.iter() {
            if w == cur && ball.dist[u as usize] + 1 == d {
                found = match found {
                    None => Some((u, e, end)),
                    Some(prev) if (u, e, end) < prev => Some((u, e, end)),
                    keep => keep,
                };
            }
        }
        let (u, e, end) = found.expect("ball distances are consistent");
        path.push((e, end));
        cur = u;
    }
    path.reverse();
    path
}

/// Combinatorial convex hull of a seed set inside a developed ball:
/// geodesic-interval closure on vertices, then the full subcomplex.
/// Errors with FrontierContamination when the hull reaches vertices
/// whose links may be incomplete.
pub fn convex_hull(
    ball: &DevelopedBall,
    seed: &[u32],
) -> Result<(CubeComplex, CubicalMap)> {
    let x = &ball.complex;
    let nv = x.vertex_count();
    for &v in seed {
        if v as usize >= nv {
            return Err(Error::UnknownVertex(v));
        }
    }
    let adj = x.vertex_adjacency();
    let mut in_hull = vec![false; nv];
    for &v in seed {
        in_hull[v as usize] = true;
    }
    let mut changed = true;
    while changed {
        changed = false;
        let members: Vec<u32> = (0..nv as u32).filter(|&v| in_hull[v as usize]).collect();
        for &u in &members {
            let du = bfs_from(&adj, u);
            for &w in &members {
                if w <= u {
                    continue;
                }
                let duw = du[w as usize];
                if duw == u32::MAX {
                    return Err(Error::NotConnected);
                }
                let dw = bfs_from(&adj, w);
                for v in 0..nv as u32 {
                    if !in_hull[v as usize]
                        && du[v as usize] != u32::MAX
                        && dw[v as usize] != u32::MAX
                        && du[v as usize] + dw[v as usize] == duw
                    {
                        in_hull[v as usize] = true;
                        changed = true;
                    }
                }
            }
        }
    }
    for v in 0..nv {
        if in_hull[v] && ball.frontier[v] {
            return Err(Error::FrontierContamination);
        }
    }
    // full subcomplex: every cell all of whose corners lie in the hull
    let mut cells: BTreeSet<(usize, u32)> = BTreeSet::new();
    for (n, layer) in x.dims.iter().enumerate() {
        for (ci, c) in layer.iter().enumerate() {
            if c.corners.iter().all(|&v| in_hull[v as usize]) {
                cells.insert((n, ci as u32));
            }
        }
    }
    Ok(subcomplex(x, &cells))
}

fn bfs_from(adj: &[Vec<u32>], start: u32) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[start as usize] = 0;
    let mut q = VecDeque::new();
    q.push_back(start);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v as usize] {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

/// Superconvexity certificate for a local isometry `y: Y -> X` via the
/// strip transition graph: nodes are square occurrences of X riding a
/// directed edge of Y without lifting into Y; an edge joins consecutive
/// occurrences sharing the vertical edge lift. A cycle yields strips of
/// every length (fail at the cutoff); a DAG yields the exact maximal
/// strip length L (pass).
pub fn superconvexity_check(map: &CubicalMap, strip_cutoff: u32) -> Result<Certificate> {
    let y = &map.source;
    let x = &map.target;
    // nodes: (directed Y edge = (edge, tail end), square, corner, coord)
    // with the square occurrence attached along the image edge and not
    // covered by a Y square
    let mut covered: BTreeSet<(u32, u8, u32, u32, usize)> = BTreeSet::new();
    for (ti, _t) in y.cubes(2).iter().enumerate() {
        let cm = &map.assign[2][ti];
        for k in 0..4u32 {
            for j in 0..2usize {
                let (ey, endy) = y.edge_at_corner(2, ti as u32, k, j);
                let sk = cm.corners[k as usize] as u32;
                let p = ((cm.corners[(k ^ (1 << j)) as usize] ^ cm.corners[k as usize])
                    .trailing_zeros()) as usize;
                covered.insert((ey, endy, cm.image, sk, p));
            }
        }
    }
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
    struct Node {
        dy: (u32, u8),
        s: u32,
        c: u32,
        i: usize,
    }
    let mut nodes: Vec<Node> = Vec::new();
    for (ei, _e) in y.cubes(1).iter().enumerate() {
        for end in 0..2u8 {
            let (ex, endx) = map.edge_end_image(ei as u32, end);
            for (si, sq) in x.cubes(2).iter().enumerate() {
                let _ = sq;
                for c in 0..4u32 {
                    for i in 0..2usize {
                        if x.edge_at_corner(2, si as u32, c, i) != (ex, endx) {
                            continue;
                        }
                        if covered.contains(&(ei as u32, end, si as u32, c, i)) {
                            continue;
                        }
                        nodes.push(Node { dy: (ei as u32, end), s: si as u32, c, i });
                    }
                }
            }
        }
    }
    nodes.sort_unstable();
    // transitions: consecutive directed Y edges (no backtracking) whose
    // shared vertical edge lifts agree
    let heads: Vec<u32> = nodes
        .iter()
        .map(|n| y.cubes(1)[n.dy.0 as usize].corners[(n.dy.1 ^ 1) as usize])
        .collect();
    let tails: Vec<u32> = nodes
        .iter()
        .map(|n| y.cubes(1)[n.dy.0 as usize].corners[n.dy.1 as usize])
        .collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (a, na) in nodes.iter().enumerate() {
        let right = x.edge_at_corner(2, na.s, na.c ^ (1 << na.i), 1 - na.i);
        for (b, nb) in nodes.iter().enumerate() {
            if heads[a] != tails[b] {
                continue;
            }
            if nb.dy.0 == na.dy.0 && nb.dy.1 == na.dy.1 ^ 1 {
                continue; // backtracking bottom path
            }
            let left = x.edge_at_corner(2, nb.s, nb.c, 1 - nb.i);
            if left == right {
                succ[a].push(b);
            }
        }
    }
    // longest path / cycle detection
    let mut state = vec![0u8; nodes.len()]; // 0 unseen, 1 open, 2 done
    let mut longest = vec![0u32; nodes.len()];
    let mut cyclic = false;
    fn dfs(
        v: usize,
        succ: &[Vec<usize>],
        state: &mut [u8],
        longest: &mut [u32],
        cyclic: &mut bool,
    ) -> u32 {
        if state[v] == 1 {
            *cyclic = true;
            return 0;
        }
        if state[v] == 2 {
            return longest[v];
        }
        state[v] = 1;
        let mut best = 0;
        for &w in &succ[v] {
            best = best.max(dfs(w, succ, state, longest, cyclic));
        }
        state[v] = 2;
        longest[v] = best + 1;
        longest[v]
    }
    let mut max_len = 0u32;
    for v in 0..nodes.len() {
        max_len = max_len.max(dfs(v, &succ, &mut state, &mut longest, &mut cyclic));
        if cyclic {
            break;
        }
    }
    if cyclic {
        return Ok(Certificate::fail(
            "superconvexity",
            Witness::Text(format!("NotSuperconvexUpTo({strip_cutoff})")),
        )
        .with_int("cutoff", strip_cutoff as i64));
    }
    Ok(Certificate::pass("superconvexity").with_int("L", max_len as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmap::check_local_isometry;
    use crate::Status;

    #[test]
    fn bouquet_balls_are_trees() {
        let b2 = CubeComplex::bouquet(2);
        for (r, want) in [(1u32, 5usize), (2, 17), (3, 53), (4, 161)] {
            let ball = develop_ball(&b2, 0, r).unwrap();
            assert_eq!(ball.complex.vertex_count(), want);
            assert_eq!(ball.complex.euler_characteristic(), 1);
            ball.complex.check_structure().unwrap();
            ball.projection.check_structure().unwrap();
        }
    }

    #[test]
    fn cycle_ball_is_a_path() {
        let c6 = CubeComplex::cycle(6);
        let ball = develop_ball(&c6, 0, 2).unwrap();
        assert_eq!(ball.complex.vertex_count(), 5);
        assert_eq!(ball.complex.cubes(1).len(), 4);
    }

    #[test]
    fn torus_balls_are_grid_balls() {
        let t2 = CubeComplex::torus();
        let b1 = develop_ball(&t2, 0, 1).unwrap();
        assert_eq!(b1.complex.vertex_count(), 5);
        assert_eq!(b1.complex.cubes(1).len(), 4);
        assert_eq!(b1.complex.cubes(2).len(), 0);
        let b2 = develop_ball(&t2, 0, 2).unwrap();
        // l1 ball of radius 2 in the grid: 13 vertices, squares fill
        // the radius-1 diamond corners
        assert_eq!(b2.complex.vertex_count(), 13);
        assert_eq!(b2.complex.cubes(2).len(), 4);
        b2.complex.check_structure().unwrap();
        b2.projection.check_structure().unwrap();
        assert_eq!(b2.complex.validate().unwrap().status, Status::Pass);
    }

    #[test]
    fn systole_examples() {
        assert_eq!(systole(&CubeComplex::cycle(6), 16).unwrap().exact_length(), Some(6));
        assert_eq!(systole(&CubeComplex::bouquet(2), 16).unwrap().exact_length(), Some(1));
        assert_eq!(systole(&CubeComplex::torus(), 16).unwrap().exact_length(), Some(1));
        assert_eq!(systole(&CubeComplex::theta(), 16).unwrap().exact_length(), Some(2));
        let sq = CubeComplex::single_square();
        assert_eq!(systole(&sq, 8).unwrap(), SystoleResult::AtLeast(9));
    }

    #[test]
    fn systole_witness_is_essential() {
        let c6 = CubeComplex::cycle(6);
        if let SystoleResult::Exact { length, base, witness } = systole(&c6, 16).unwrap() {
            assert_eq!(length, 6);
            assert_eq!(witness.len(), 6);
            // lifting the witness from the base must not return to it
            let ball = develop_ball(&c6, base, 8).unwrap();
            let endpoint = ball.lift_path(ball.base, &witness).unwrap();
            assert_ne!(endpoint, ball.base);
            assert_eq!(ball.projection.vertex_image(endpoint), base);
        } else {
            panic!("expected exact systole");
        }
    }

    #[test]
    fn hull_of_tree_pair_is_geodesic() {
        let b2 = CubeComplex::bouquet(2);
        let ball = develop_ball(&b2, 0, 4).unwrap();
        // pick two vertices at distance 2 on different branches
        let v = (0..ball.complex.vertex_count() as u32)
            .find(|&v| ball.dist[v as usize] == 2)
            .unwrap();
        let (hull, incl) = convex_hull(&ball, &[ball.base, v]).unwrap();
        assert_eq!(hull.vertex_count(), 3);
        assert_eq!(hull.cubes(1).len(), 2);
        incl.check_structure().unwrap();
    }

    #[test]
    fn hull_fills_squares() {
        let t2 = CubeComplex::torus();
        let ball = develop_ball(&t2, 0, 4).unwrap();
        // find a square and take two opposite corners
        let sq = &ball.complex.cubes(2)[0];
        let (a, b) = (sq.corners[0], sq.corners[3]);
        let (hull, _) = convex_hull(&ball, &[a, b]).unwrap();
        assert_eq!(hull.vertex_count(), 4);
        assert_eq!(hull.cubes(2).len(), 1);
    }

    #[test]
    fn hull_frontier_contamination() {
        let b2 = CubeComplex::bouquet(2);
        let ball = develop_ball(&b2, 0, 2).unwrap();
        let far = (0..ball.complex.vertex_count() as u32)
            .find(|&v| ball.dist[v as usize] == 2)
            .unwrap();
        assert!(matches!(
            convex_hull(&ball, &[ball.base, far]),
            Err(Error::FrontierContamination)
        ));
    }

    #[test]
    fn superconvexity_identity_and_graphs() {
        let t2 = CubeComplex::torus();
        let id = CubicalMap::identity(&t2);
        let cert = superconvexity_check(&id, 8).unwrap();
        assert_eq!(cert.status, Status::Pass);
        assert!(cert.report.iter().any(|(k, v)| k == "L" && *v == crate::cert::Value::Int(0)));
    }

    #[test]
    fn product_fiber_is_not_superconvex() {
        // B2 x {pt} inside B2 x B2
        let b2 = CubeComplex::bouquet(2);
        let bb = CubeComplex::product(&b2, &b2);
        let idx = CubeComplex::product_index(&b2, &b2);
        // vertices: single vertex each; edges of the fiber are the
        // first-factor edges (p=1, q=0)
        let assign = vec![
            vec![CellMap { image: 0, corners: vec![0] }],
            (0..2)
                .map(|e| CellMap {
                    image: idx[&(1, 0, e, 0)],
                    corners: vec![0, 1],
                })
                .collect(),
        ];
        let m = CubicalMap { source: b2.clone(), target: bb, assign };
        m.check_structure().unwrap();
        assert_eq!(check_local_isometry(&m).unwrap().status, Status::Pass);
        for cutoff in [1, 4, 16] {
            let cert = superconvexity_check(&m, cutoff).unwrap();
            assert_eq!(cert.status, Status::Fail);
        }
    }
}
