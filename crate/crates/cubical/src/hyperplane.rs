//! Hyperplanes: edge-parallelism classes, midcube complexes, carriers,
//! and the pseudograph certificate.

use crate::cert::{CellRef, Certificate, Value, Witness};
use crate::complex::{Cube, CubeComplex, FaceRef};
use crate::unionfind::{ParityUnionFind, UnionFind};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Contractibility is decided exactly for graph midcube complexes and
/// semi-decided (by elementary collapses) above that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct Hyperplane {
    /// Sorted edge ids of the parallelism class.
    pub edges: Vec<u32>,
    /// The midcube complex: one (n-1)-cube per dual n-cube, one vertex
    /// per edge of the class (vertex id = index into `edges`).
    pub midcube: CubeComplex,
    /// Provenance of each midcube cell: `cells[k][id] = (ambient cube, direction)`
    /// in ambient dimension k+1.
    pub midcube_cells: Vec<Vec<(u32, usize)>>,
    /// Closed carrier: all ambient cells of cubes meeting the class.
    pub carrier: Vec<CellRef>,
    pub embedded: bool,
    pub two_sided: bool,
    pub contractible: Tri,
}

/// All hyperplanes of a validated complex, sorted by least edge id.
pub fn hyperplanes(x: &CubeComplex) -> Vec<Hyperplane> {
    let ne = x.cubes(1).len();
    if ne == 0 {
        return Vec::new();
    }
    let mut uf = UnionFind::new(ne);
    let mut parity = ParityUnionFind::new(ne);
    let mut one_sided_roots: BTreeSet<u32> = BTreeSet::new();
    for sq in x.cubes(2) {
        // direction-0 edges fix coordinate 1; direction-1 edges fix coordinate 0
        for dir in 0..2usize {
            let fixed = 1 - dir;
            let fa = sq.face(fixed, 0);
            let fb = sq.face(fixed, 1);
            uf.union(fa.cube, fb.cube);
            let oa = (fa.corners[0] >> dir) & 1;
            let ob = (fb.corners[0] >> dir) & 1;
            if parity.union(fa.cube, fb.cube, oa ^ ob).is_err() {
                one_sided_roots.insert(uf.find(fa.cube));
            }
        }
    }
    // group edges by class representative
    let mut classes: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for e in 0..ne as u32 {
        classes.entry(uf.find(e)).or_default().push(e);
    }
    // re-resolve one-sided roots after all unions
    let one_sided: BTreeSet<u32> = one_sided_roots.iter().map(|&r| uf.find(r)).collect();

    classes
        .into_iter()
        .map(|(root, edges)| build_hyperplane(x, edges, !one_sided.contains(&root)))
        .collect()
}

fn build_hyperplane(x: &CubeComplex, edges: Vec<u32>, two_sided: bool) -> Hyperplane {
    let edge_index: HashMap<u32, u32> = edges
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i as u32))
        .collect();

    // collect dual cubes: (ambient dim, cube, direction) with direction-i
    // edges in the class; detect non-embeddedness on the way
    let mut embedded = true;
    let mut cells: Vec<Vec<(u32, usize)>> = Vec::new();
    let mut cell_ids: HashMap<(usize, u32, usize), u32> = HashMap::new();
    cells.push(edges.iter().map(|&e| (e, 0)).collect());
    for (i, &e) in edges.iter().enumerate() {
        cell_ids.insert((1, e, 0), i as u32);
    }
    for n in 2..x.dims.len() {
        let mut layer = Vec::new();
        for ci in 0..x.cubes(n).len() as u32 {
            let mut dirs = Vec::new();
            for i in 0..n {
                let (e, _) = x.edge_at_corner(n, ci, 0, i);
                if edge_index.contains_key(&e) {
                    dirs.push(i);
                }
            }
            if dirs.len() > 1 {
                embedded = false;
            }
            for i in dirs {
                cell_ids.insert((n, ci, i), layer.len() as u32);
                layer.push((ci, i));
            }
        }
        cells.push(layer);
    }
    while cells.len() > 1 && cells.last().map_or(false, |l| l.is_empty()) {
        cells.pop();
    }

    // assemble the midcube complex
    let mut dims: Vec<Vec<Cube>> = Vec::with_capacity(cells.len());
    dims.push(
        (0..edges.len() as u32)
            .map(|i| Cube { corners: vec![i], faces: Vec::new() })
            .collect(),
    );
    for k in 1..cells.len() {
        let n = k + 1; // ambient dimension
        let mut layer = Vec::with_capacity(cells[k].len());
        for &(ci, i) in &cells[k] {
            let coords: Vec<usize> = (0..n).filter(|&t| t != i).collect();
            let corners: Vec<u32> = (0..1u32 << k)
                .map(|j| {
                    let mut amb = 0u32;
                    for (l, &t) in coords.iter().enumerate() {
                        if j >> l & 1 == 1 {
                            amb |= 1 << t;
                        }
                    }
                    let (e, _) = x.edge_at_corner(n, ci, amb, i);
                    edge_index[&e]
                })
                .collect();
            let mut faces = Vec::with_capacity(2 * k);
            for &t in &coords {
                for s in 0..2u8 {
                    let slot = 2 * t + s as usize;
                    let fr = &x.dims[n][ci as usize].faces[slot];
                    let cmap = x.face_coordinate_map(n, ci, slot);
                    let ip = cmap
                        .iter()
                        .position(|&(p, _)| p == i)
                        .expect("dual direction survives in facet");
                    let sub = cell_ids[&(n - 1, fr.cube, ip)];
                    let fac_coords: Vec<usize> =
                        (0..n - 1).filter(|&tt| tt != ip).collect();
                    let corr: Vec<u8> = (0..1u32 << (k - 1))
                        .map(|jf| {
                            let mut kf = 0u32;
                            for (lf, &tt) in fac_coords.iter().enumerate() {
                                if jf >> lf & 1 == 1 {
                                    kf |= 1 << tt;
                                }
                            }
                            let p = fr.corners[kf as usize] as u32;
                            // drop coordinate i, compress remaining bits
                            let mut out = 0u8;
                            let mut l = 0;
                            for (lc, &tc) in coords.iter().enumerate() {
                                let _ = lc;
                                if p >> tc & 1 == 1 {
                                    out |= 1 << l;
                                }
                                l += 1;
                            }
                            out
                        })
                        .collect();
                    faces.push(FaceRef { cube: sub, corners: corr });
                }
            }
            layer.push(Cube { corners, faces });
        }
        dims.push(layer);
    }
    let midcube = CubeComplex::new(dims);

    // carrier: closure of the dual cubes under faces
    let mut carrier: BTreeSet<CellRef> = BTreeSet::new();
    let mut stack: Vec<CellRef> = Vec::new();
    for (k, layer) in cells.iter().enumerate() {
        for &(ci, _) in layer {
            stack.push((k + 1, ci));
        }
    }
    while let Some((n, ci)) = stack.pop() {
        if !carrier.insert((n, ci)) {
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

    let contractible = contractibility(&midcube);
    Hyperplane {
        edges,
        midcube,
        midcube_cells: cells,
        carrier: carrier.into_iter().collect(),
        embedded,
        two_sided,
        contractible,
    }
}

/// Exact tree test for graphs; greedy elementary-collapse search with a
/// step budget above dimension 1 (Unknown on exhaustion or stall).
pub fn contractibility(c: &CubeComplex) -> Tri {
    if c.dim() <= 1 {
        let is_tree = c.is_connected() && c.euler_characteristic() == 1 && {
            // a loop edge breaks treeness even though adjacency hides it
            c.cubes(1).iter().all(|e| e.corners[0] != e.corners[1])
        };
        return if is_tree { Tri::Yes } else { Tri::No };
    }
    if !c.is_connected() || c.euler_characteristic() != 1 {
        return Tri::No;
    }
    collapse_to_point(c, 100_000)
}

fn collapse_to_point(c: &CubeComplex, budget: usize) -> Tri {
    let mut alive: Vec<Vec<bool>> = c.dims.iter().map(|d| vec![true; d.len()]).collect();
    let mut remaining: usize = c.cell_count();
    let mut steps = 0usize;
    loop {
        if remaining == 1 {
            return Tri::Yes;
        }
        if steps >= budget {
            return Tri::Unknown;
        }
        // incidence counts of live cells in live parents
        let mut progress = false;
        'outer: for n in 1..c.dims.len() {
            let mut count: HashMap<u32, (usize, u32)> = HashMap::new();
            for (pi, p) in c.dims[n].iter().enumerate() {
                if !alive[n][pi] {
                    continue;
                }
                let subs: Vec<u32> = if n == 1 {
                    p.corners.clone()
                } else {
                    p.faces.iter().map(|f| f.cube).collect()
                };
                for f in subs {
                    let e = count.entry(f).or_insert((0, pi as u32));
                    e.0 += 1;
                    e.1 = pi as u32;
                }
            }
            for (f, (cnt, parent)) in count {
                if cnt == 1 && alive[n - 1][f as usize] {
                    alive[n - 1][f as usize] = false;
                    alive[n][parent as usize] = false;
                    remaining -= 2;
                    steps += 1;
                    progress = true;
                    break 'outer;
                }
            }
        }
        if !progress {
            return Tri::Unknown;
        }
    }
}

/// Pass iff every hyperplane is contractible; rank = 1 - Euler
/// characteristic (valid because such complexes deformation retract to
/// graphs).
pub fn pseudograph_certificate(x: &CubeComplex) -> Result<Certificate> {
    if !x.is_connected() {
        return Err(Error::NotConnected);
    }
    let hs = hyperplanes(x);
    let rank = 1 - x.euler_characteristic();
    let mut unknown = None;
    for (i, h) in hs.iter().enumerate() {
        match h.contractible {
            Tri::No => {
                return Ok(Certificate::fail("pseudograph", Witness::Hyperplane(i))
                    .with_int("hyperplanes", hs.len() as i64)
                    .with_int("rank", rank));
            }
            Tri::Unknown => {
                if unknown.is_none() {
                    unknown = Some(i);
                }
            }
            Tri::Yes => {}
        }
    }
    if let Some(i) = unknown {
        return Ok(Certificate::inconclusive("pseudograph", 100_000)
            .with_int("hyperplanes", hs.len() as i64)
            .with_int("undecided", i as i64)
            .with_int("rank", rank));
    }
    Ok(Certificate::pass("pseudograph")
        .with_int("hyperplanes", hs.len() as i64)
        .with_int("rank", rank))
}

/// A certificate listing per-hyperplane flags, for reporting.
pub fn hyperplane_certificate(x: &CubeComplex) -> Certificate {
    let hs = hyperplanes(x);
    let mut cert = Certificate::pass("hyperplanes").with_int("count", hs.len() as i64);
    for (i, h) in hs.iter().enumerate() {
        let mut part = Certificate::pass(&format!("hyperplane[{i}]"));
        part.push("edges", Value::Int(h.edges.len() as i64));
        part.push("midcube_dim", Value::Int(h.midcube.dim() as i64));
        part.push("embedded", Value::Text(h.embedded.to_string()));
        part.push("two_sided", Value::Text(h.two_sided.to_string()));
        part.push(
            "contractible",
            Value::Text(
                match h.contractible {
                    Tri::Yes => "yes",
                    Tri::No => "no",
                    Tri::Unknown => "unknown",
                }
                .to_string(),
            ),
        );
        cert.parts.push(part);
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Status;

    #[test]
    fn bouquet_hyperplanes_are_points() {
        let b2 = CubeComplex::bouquet(2);
        let hs = hyperplanes(&b2);
        assert_eq!(hs.len(), 2);
        for h in &hs {
            assert_eq!(h.edges.len(), 1);
            assert_eq!(h.midcube.cell_count(), 1);
            assert!(h.embedded && h.two_sided);
            assert_eq!(h.contractible, Tri::Yes);
        }
        let cert = pseudograph_certificate(&b2).unwrap();
        assert_eq!(cert.status, Status::Pass);
        assert!(cert.report.iter().any(|(k, v)| k == "rank" && *v == Value::Int(2)));
    }

    #[test]
    fn square_hyperplanes() {
        let sq = CubeComplex::single_square();
        let hs = hyperplanes(&sq);
        assert_eq!(hs.len(), 2);
        for h in &hs {
            assert_eq!(h.edges.len(), 2);
            assert_eq!(h.midcube.cubes(1).len(), 1);
            assert_eq!(h.contractible, Tri::Yes);
            h.midcube.check_structure().unwrap();
        }
        let cert = pseudograph_certificate(&sq).unwrap();
        assert_eq!(cert.status, Status::Pass);
        assert!(cert.report.iter().any(|(k, v)| k == "rank" && *v == Value::Int(0)));
    }

    #[test]
    fn torus_hyperplanes_are_circles() {
        let t2 = CubeComplex::torus();
        let hs = hyperplanes(&t2);
        assert_eq!(hs.len(), 2);
        for h in &hs {
            assert_eq!(h.edges.len(), 1);
            assert_eq!(h.midcube.cubes(0).len(), 1);
            assert_eq!(h.midcube.cubes(1).len(), 1);
            // the single midcube edge closes into a circle
            let e = &h.midcube.cubes(1)[0];
            assert_eq!(e.corners[0], e.corners[1]);
            assert_eq!(h.contractible, Tri::No);
            assert!(h.two_sided);
            h.midcube.check_structure().unwrap();
        }
        let cert = pseudograph_certificate(&t2).unwrap();
        assert_eq!(cert.status, Status::Fail);
        assert!(matches!(cert.witness, Some(Witness::Hyperplane(_))));
    }

    #[test]
    fn one_sided_square_detected() {
        // a square with its two vertical sides glued by the same edge
        // with a flip (an abstract Moebius-style self-gluing)
        let mut c = CubeComplex::graph(2, &[(0, 1), (1, 0), (0, 1)]);
        c.dims.push(vec![Cube {
            corners: vec![0, 1, 1, 0],
            faces: vec![
                FaceRef { cube: 2, corners: vec![0, 2] },
                FaceRef { cube: 2, corners: vec![3, 1] },
                FaceRef { cube: 0, corners: vec![0, 1] },
                FaceRef { cube: 1, corners: vec![2, 3] },
            ],
        }]);
        c.check_structure().unwrap();
        let hs = hyperplanes(&c);
        assert_eq!(hs.len(), 2);
        let side = hs.iter().find(|h| h.edges == vec![2]).unwrap();
        assert!(!side.two_sided);
        let horiz = hs.iter().find(|h| h.edges == vec![0, 1]).unwrap();
        assert!(horiz.two_sided);
        assert_eq!(horiz.contractible, Tri::Yes);
    }

    #[test]
    fn subdivided_graph_doubles_hyperplanes() {
        for g in [CubeComplex::bouquet(3), CubeComplex::theta(), CubeComplex::cycle(5)] {
            let ne = g.cubes(1).len();
            let sd = g.subdivide();
            assert_eq!(hyperplanes(&sd).len(), 2 * ne);
        }
    }

    #[test]
    fn product_hyperplane_count_is_additive() {
        let c3 = CubeComplex::cycle(3);
        let c4 = CubeComplex::cycle(4);
        let prod = CubeComplex::product(&c3, &c4);
        assert_eq!(
            hyperplanes(&prod).len(),
            hyperplanes(&c3).len() + hyperplanes(&c4).len()
        );
        let b2 = CubeComplex::bouquet(2);
        let bb = CubeComplex::product(&b2, &b2);
        assert_eq!(hyperplanes(&bb).len(), 4);
        for h in hyperplanes(&bb) {
            // each hyperplane of B2 x B2 is dual to one loop edge; its
            // midcube complex is a circle (one vertex, two squares... )
            h.midcube.check_structure().unwrap();
            assert_eq!(h.contractible, Tri::No);
        }
    }

    #[test]
    fn grid_hyperplanes() {
        let g = CubeComplex::grid(3, 2);
        let hs = hyperplanes(&g);
        assert_eq!(hs.len(), 3 + 2);
        for h in &hs {
            assert!(h.embedded && h.two_sided);
            assert_eq!(h.contractible, Tri::Yes);
            h.midcube.check_structure().unwrap();
        }
    }

    #[test]
    fn carrier_of_grid_hyperplane_is_a_band() {
        let g = CubeComplex::grid(2, 1);
        let hs = hyperplanes(&g);
        // a vertical hyperplane crossing one column of squares
        let v = hs
            .iter()
            .find(|h| h.midcube_cells.len() > 1 && h.midcube_cells[1].len() == 1)
            .unwrap();
        // carrier of one square: 1 square + 4 edges + 4 vertices
        assert_eq!(v.carrier.iter().filter(|c| c.0 == 2).count(), 1);
        assert_eq!(v.carrier.iter().filter(|c| c.0 == 1).count(), 4);
        assert_eq!(v.carrier.iter().filter(|c| c.0 == 0).count(), 4);
    }
}
