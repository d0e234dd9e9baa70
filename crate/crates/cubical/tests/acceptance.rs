//! Acceptance gate: twelve end-to-end criteria, one test (and one
//! pass/fail line) each. Every criterion checks library output against
//! an oracle implemented independently inside this file, or against a
//! fixed arithmetic threshold.

use cubical::cert::{Status, Value, Witness};
use cubical::cmap::{subcomplex, CellMap, CubicalMap};
use cubical::complex::{Cube, CubeComplex, FaceRef};
use cubical::develop::{superconvexity_check, systole};
use cubical::dual::{dual_complex, hemi_restrict_dual, FiniteWallspace};
use cubical::fiber::fiber_product;
use cubical::fixtures::{self, cycle_word_map};
use cubical::freegroup::{
    graphical_cprime, malnormality_certificate, malnormalize, parse_word, word_to_string,
};
use cubical::hyperplane::{hyperplanes, pseudograph_certificate};
use cubical::pipeline::{quotient_build, quotient_pair, QuotientPlan};
use cubical::smallcancel::{check_cprime, CubicalPresentation};
use cubical::wallspace::{
    antipodal_walls, check_b6, check_freeness_bounds, check_k_wall_convexity, B6Mode,
    Rank2Decomposition,
};
use num_rational::Rational64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

// ------------------------------------------------------------ shared helpers

fn int_report(cert: &cubical::cert::Certificate, key: &str) -> Option<i64> {
    cert.report.iter().find_map(|(k, v)| match (k == key, v) {
        (true, Value::Int(n)) => Some(*n),
        _ => None,
    })
}

fn ratio_report(cert: &cubical::cert::Certificate, key: &str) -> Option<Rational64> {
    cert.report.iter().find_map(|(k, v)| match (k == key, v) {
        (true, Value::Ratio(r)) => Some(*r),
        _ => None,
    })
}

fn text_report<'a>(cert: &'a cubical::cert::Certificate, key: &str) -> Option<&'a str> {
    cert.report.iter().find_map(|(k, v)| match (k == key, v) {
        (true, Value::Text(t)) => Some(t.as_str()),
        _ => None,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A cycle of length `word.len()` mapped to a bouquet along a word of
/// pairwise distinct generators (rank = length).
fn distinct_label_cycle(len: usize) -> CubicalMap {
    let word: Vec<(u8, bool)> = (0..len).map(|i| (i as u8, false)).collect();
    cycle_word_map(&word, len)
}

// -------------------------------------------------- random complex generator

fn random_graph(rng: &mut StdRng, nv_max: u32, ne_max: usize) -> CubeComplex {
    let nv = rng.gen_range(1..=nv_max);
    let ne = rng.gen_range(1..=ne_max);
    let edges: Vec<(u32, u32)> = (0..ne)
        .map(|_| (rng.gen_range(0..nv), rng.gen_range(0..nv)))
        .collect();
    CubeComplex::graph(nv, &edges)
}

/// Glues random squares onto a random graph along closed 4-paths found
/// by random walks. Produces both curvature-valid and curvature-broken
/// complexes.
fn random_square_complex(rng: &mut StdRng) -> CubeComplex {
    let g = random_graph(rng, 6, 9);
    let mut dims = vec![g.cubes(0).to_vec(), g.cubes(1).to_vec(), Vec::new()];
    let ends_at = |dims: &Vec<Vec<Cube>>, v: u32| -> Vec<(u32, u8)> {
        let mut out = Vec::new();
        for (ei, e) in dims[1].iter().enumerate() {
            for s in 0..2u8 {
                if e.corners[s as usize] == v {
                    out.push((ei as u32, s));
                }
            }
        }
        out
    };
    let attempts = rng.gen_range(0..8);
    for _ in 0..attempts {
        let v00 = rng.gen_range(0..dims[0].len() as u32);
        let pick = |rng: &mut StdRng, opts: &[(u32, u8)]| -> Option<(u32, u8)> {
            if opts.is_empty() {
                None
            } else {
                Some(opts[rng.gen_range(0..opts.len())])
            }
        };
        let at00 = ends_at(&dims, v00);
        let Some((eb, sb)) = pick(rng, &at00) else { continue };
        let Some((el, sl)) = pick(rng, &at00) else { continue };
        let v10 = dims[1][eb as usize].corners[1 - sb as usize];
        let v01 = dims[1][el as usize].corners[1 - sl as usize];
        let Some((et, st)) = pick(rng, &ends_at(&dims, v01)) else { continue };
        let Some((er, sr)) = pick(rng, &ends_at(&dims, v10)) else { continue };
        let v11 = dims[1][et as usize].corners[1 - st as usize];
        if dims[1][er as usize].corners[1 - sr as usize] != v11 {
            continue;
        }
        let side = |e: u32, s: u8, lo: u8, hi: u8| FaceRef {
            cube: e,
            corners: if s == 0 { vec![lo, hi] } else { vec![hi, lo] },
        };
        dims[2].push(Cube {
            corners: vec![v00, v10, v01, v11],
            faces: vec![
                side(el, sl, 0, 2),
                side(er, sr, 1, 3),
                side(eb, sb, 0, 1),
                side(et, st, 2, 3),
            ],
        });
        let candidate = CubeComplex::new(dims.clone());
        if candidate.check_structure().is_err() {
            dims[2].pop();
        }
    }
    CubeComplex::new(dims)
}

// ------------------------------------------------------- criterion 1 oracles

/// Curvature oracle for complexes of dimension <= 2: every vertex link
/// must be a simple graph without triangles.
fn oracle_npc(x: &CubeComplex) -> bool {
    assert!(x.dim() <= 2);
    for v in 0..x.vertex_count() as u32 {
        let mut link_verts: Vec<(u32, u8)> = Vec::new();
        for (ei, e) in x.cubes(1).iter().enumerate() {
            for s in 0..2u8 {
                if e.corners[s as usize] == v {
                    link_verts.push((ei as u32, s));
                }
            }
        }
        let idx: HashMap<(u32, u8), usize> = link_verts
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        let mut link_edges: Vec<(usize, usize)> = Vec::new();
        if x.dim() >= 2 {
            for sq in x.cubes(2) {
                for k in 0..4usize {
                    if sq.corners[k] != v {
                        continue;
                    }
                    let b0 = k & 1;
                    let b1 = (k >> 1) & 1;
                    let fv = &sq.faces[b0];
                    let fh = &sq.faces[2 + b1];
                    let jv = fv.corners.iter().position(|&c| c as usize == k).unwrap();
                    let jh = fh.corners.iter().position(|&c| c as usize == k).unwrap();
                    let a = idx[&(fv.cube, jv as u8)];
                    let b = idx[&(fh.cube, jh as u8)];
                    if a == b {
                        return false; // loop in the link
                    }
                    link_edges.push((a.min(b), a.max(b)));
                }
            }
        }
        link_edges.sort_unstable();
        if link_edges.windows(2).any(|w| w[0] == w[1]) {
            return false; // doubled edge in the link
        }
        let eset: HashSet<(usize, usize)> = link_edges.iter().copied().collect();
        for &(a, b) in &link_edges {
            for c in 0..link_verts.len() {
                if c != a
                    && c != b
                    && eset.contains(&(a.min(c), a.max(c)))
                    && eset.contains(&(b.min(c), b.max(c)))
                {
                    return false; // empty triangle in the link
                }
            }
        }
    }
    true
}

/// Edge partition oracle: transitive closure of "opposite sides of a
/// square".
fn oracle_hyperplane_partition(x: &CubeComplex) -> BTreeSet<Vec<u32>> {
    let ne = x.cubes(1).len();
    let mut parent: Vec<usize> = (0..ne).collect();
    fn find(p: &mut Vec<usize>, a: usize) -> usize {
        if p[a] != a {
            let r = find(p, p[a]);
            p[a] = r;
        }
        p[a]
    }
    if x.dim() >= 2 {
        for sq in x.cubes(2) {
            for pair in [(0, 1), (2, 3)] {
                let a = find(&mut parent, sq.faces[pair.0].cube as usize);
                let b = find(&mut parent, sq.faces[pair.1].cube as usize);
                parent[a] = b;
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for e in 0..ne {
        let r = find(&mut parent, e);
        classes.entry(r).or_default().push(e as u32);
    }
    classes.into_values().collect()
}

#[test]
fn c01_kernel_matches_brute_force_oracles() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut npc_count = 0;
    let mut non_npc_count = 0;
    for i in 0..220 {
        let x = if i % 3 == 0 {
            random_graph(&mut rng, 8, 12)
        } else {
            random_square_complex(&mut rng)
        };
        assert!(x.cell_count() <= 50, "generator exceeded the size budget");
        x.check_structure().unwrap();
        let expected = oracle_npc(&x);
        assert_eq!(x.is_npc(), expected, "curvature verdict mismatch on case {i}");
        if expected {
            npc_count += 1;
        } else {
            non_npc_count += 1;
        }
        let got: BTreeSet<Vec<u32>> = hyperplanes(&x)
            .iter()
            .map(|h| h.edges.clone())
            .collect();
        assert_eq!(
            got,
            oracle_hyperplane_partition(&x),
            "hyperplane partition mismatch on case {i}"
        );
    }
    assert!(npc_count >= 30, "generator produced too few valid complexes");
    assert!(non_npc_count >= 30, "generator produced too few violations");
}

#[test]
fn c02_pseudograph_rank_on_random_graphs() {
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..50 {
        let nv = rng.gen_range(2..=10u32);
        let mut edges: Vec<(u32, u32)> = (1..nv).map(|v| (rng.gen_range(0..v), v)).collect();
        for _ in 0..rng.gen_range(1..=5) {
            edges.push((rng.gen_range(0..nv), rng.gen_range(0..nv)));
        }
        let g = CubeComplex::graph(nv, &edges);
        let cert = pseudograph_certificate(&g).unwrap();
        assert_eq!(cert.status, Status::Pass);
        let rank = int_report(&cert, "rank").unwrap();
        assert_eq!(rank, edges.len() as i64 - nv as i64 + 1);
    }
    let torus = CubeComplex::torus();
    let cert = pseudograph_certificate(&torus).unwrap();
    assert_eq!(cert.status, Status::Fail);
    assert!(
        matches!(cert.witness, Some(Witness::Hyperplane(_))),
        "expected a circle-hyperplane witness"
    );
}

/// Shortest essential loop oracle on the 1-skeleton: self-loops count 1;
/// otherwise the shortest cycle through each edge, found by removing the
/// edge and measuring the endpoint distance.
fn oracle_shortest_loop(x: &CubeComplex) -> Option<u32> {
    let edges = x.cubes(1);
    let nv = x.vertex_count();
    let mut best: Option<u32> = None;
    let mut upd = |c: u32| {
        best = Some(best.map_or(c, |b: u32| b.min(c)));
    };
    for e in edges {
        if e.corners[0] == e.corners[1] {
            upd(1);
        }
    }
    for (skip, e) in edges.iter().enumerate() {
        let (u, v) = (e.corners[0], e.corners[1]);
        if u == v {
            continue;
        }
        let mut dist = vec![u32::MAX; nv];
        dist[u as usize] = 0;
        let mut q = VecDeque::from([u]);
        while let Some(w) = q.pop_front() {
            for (ei, f) in edges.iter().enumerate() {
                if ei == skip {
                    continue;
                }
                for (a, b) in [(f.corners[0], f.corners[1]), (f.corners[1], f.corners[0])] {
                    if a == w && dist[b as usize] == u32::MAX {
                        dist[b as usize] = dist[w as usize] + 1;
                        q.push_back(b);
                    }
                }
            }
        }
        if dist[v as usize] != u32::MAX {
            upd(dist[v as usize] + 1);
        }
    }
    best
}

#[test]
fn c03_systole_matches_exhaustive_loop_oracle() {
    let mut cases: Vec<CubeComplex> = (2..=12).map(CubeComplex::cycle).collect();
    cases.push(CubeComplex::theta());
    cases.push(fixtures::theta());
    cases.push(CubeComplex::torus());
    cases.push(CubeComplex::bouquet(1));
    cases.push(CubeComplex::bouquet(2));
    cases.push(CubeComplex::bouquet(3));
    cases.push(fixtures::rank2_shared_edge().yprime);
    cases.push(CubeComplex::cycle(5).subdivide());
    for (i, x) in cases.iter().enumerate() {
        let expected = oracle_shortest_loop(x).expect("every case has an essential loop");
        assert!(expected <= 12);
        let guard = x.cubes(1).len() as u32 + 2;
        let got = systole(x, guard).unwrap().exact_length().unwrap();
        assert_eq!(got, expected, "systole mismatch on case {i}");
    }
}

#[test]
fn c04_fiber_products_of_cycle_covers() {
    for m in 2..=12usize {
        for n in 2..=12usize {
            let f = cycle_word_map(&vec![(0u8, false); m], 1);
            let g = cycle_word_map(&vec![(0u8, false); n], 1);
            let fp = fiber_product(&f, &g).unwrap();
            let d = gcd(m, n);
            let lcm = m / d * n;
            assert_eq!(fp.components.len(), d, "components for ({m},{n})");
            for c in 0..d {
                let (cc, _) = fp.component_complex(c);
                assert_eq!(cc.vertex_count(), lcm);
                assert_eq!(cc.cubes(1).len(), lcm);
                assert!(cc.is_connected());
                let mut deg = vec![0usize; lcm];
                for e in cc.cubes(1) {
                    deg[e.corners[0] as usize] += 1;
                    deg[e.corners[1] as usize] += 1;
                }
                assert!(deg.iter().all(|&dg| dg == 2), "component is not a cycle");
            }
        }
    }
}

fn pipeline_plan() -> &'static QuotientPlan {
    static PLAN: OnceLock<QuotientPlan> = OnceLock::new();
    PLAN.get_or_init(|| {
        let y = CubicalMap::identity(&CubeComplex::bouquet(2));
        quotient_build(&y, Rational64::new(1, 16), 33, 10_000_000, &[]).unwrap()
    })
}

#[test]
fn c05_quotient_pipeline_end_to_end() {
    let plan = pipeline_plan();
    assert!(plan.certificates.iter().all(|c| c.status == Status::Pass));
    let pres = CubicalPresentation {
        x: plan.x.clone(),
        relators: plan.relators.clone(),
    };
    let alpha = Rational64::new(1, 16);
    let cert = check_cprime(&pres, alpha, None).unwrap();
    assert_eq!(cert.status, Status::Pass);
    for i in 0..pres.relators.len() {
        let ratio = ratio_report(&cert, &format!("relator{i}.ratio")).unwrap();
        assert!(ratio < alpha, "ratio {ratio} is not strictly below 1/16");
        let sys = int_report(&cert, &format!("relator{i}.systole")).unwrap();
        assert!(sys >= 33, "minimum systole was not respected");
    }
}

#[test]
fn c06_b6_thresholds() {
    // the pair pipeline: antipodal walls need cycle relators, so the two
    // search words become two relators instead of one wedge
    let y = CubicalMap::identity(&CubeComplex::bouquet(2));
    let plan = quotient_pair(&y, Rational64::new(1, 16), 33, 10_000_000).unwrap();
    assert!(plan.certificates.iter().all(|c| c.status == Status::Pass));
    let pres = CubicalPresentation {
        x: plan.x.clone(),
        relators: plan.relators.clone(),
    };
    let mut wss = Vec::new();
    for rel in &pres.relators {
        let src = &rel.source;
        let guard = src.cubes(1).len() as u32 + 2;
        let (yprime, ws) = antipodal_walls(src, guard).unwrap();
        assert_eq!(&yprime, src, "even systole must not trigger subdivision");
        wss.push(ws);
    }
    let cert = check_b6(&pres, &wss, B6Mode::Sufficient, 64).unwrap();
    assert_eq!(cert.status, Status::Pass);
    for item in ["item1", "item2"] {
        assert_eq!(text_report(&cert, item), Some("pass"));
    }

    // a deliberately short relator breaks item 1
    let rel = cycle_word_map(&parse_word("aabb", 2).unwrap(), 2);
    let pres2 = CubicalPresentation {
        x: rel.target.clone(),
        relators: vec![rel.clone()],
    };
    let (yp2, ws2) = antipodal_walls(&rel.source, 8).unwrap();
    assert_eq!(yp2, rel.source);
    let cert2 = check_b6(&pres2, &[ws2], B6Mode::Sufficient, 16).unwrap();
    assert_eq!(cert2.status, Status::Fail);
    assert_eq!(text_report(&cert2, "item1"), Some("fail"));
}

#[test]
fn c07_k_wall_alpha_arithmetic() {
    let rel = distinct_label_cycle(34);
    let pres = CubicalPresentation {
        x: rel.target.clone(),
        relators: vec![rel.clone()],
    };
    let (_, ws) = antipodal_walls(&rel.source, 40).unwrap();
    let k = 11u32;
    for q in 18..=30i64 {
        let alpha = Rational64::new(1, q);
        let cert = check_k_wall_convexity(&pres, &[ws.clone()], k, alpha, 64).unwrap();
        if alpha < Rational64::new(1, 22) {
            assert_eq!(cert.status, Status::Pass, "alpha 1/{q} should pass at k=11");
        } else {
            assert_eq!(
                cert.status,
                Status::Inconclusive,
                "alpha 1/{q} should be rejected at k=11"
            );
            assert!(text_report(&cert, "reason").unwrap().contains("1/(2k)"));
        }
    }
    // boundary case alpha = 1/22 explicitly
    let boundary = check_k_wall_convexity(&pres, &[ws], k, Rational64::new(1, 22), 64).unwrap();
    assert_ne!(boundary.status, Status::Pass);
}

/// Two cycles of the given lengths joined along one shared edge or one
/// shared vertex, with pairwise distinct edge labels over a bouquet.
fn two_cycle_relator(l1: usize, l2: usize, share_edge: bool) -> (CubicalMap, Rank2Decomposition) {
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let (z1, z2): (Vec<(u32, u8)>, Vec<(u32, u8)>);
    let nv;
    if share_edge {
        // vertices: 0, 1, then l1-2 on the first arc, l2-2 on the second
        nv = 2 + (l1 - 2) + (l2 - 2);
        edges.push((0, 1));
        let mut prev = 1u32;
        for i in 0..l1 - 2 {
            edges.push((prev, 2 + i as u32));
            prev = 2 + i as u32;
        }
        edges.push((prev, 0));
        let mut prev = 1u32;
        for i in 0..l2 - 2 {
            edges.push((prev, (l1 + i) as u32));
            prev = (l1 + i) as u32;
        }
        edges.push((prev, 0));
        z1 = (0..l1 as u32).map(|e| (e, 0)).collect();
        z2 = std::iter::once((0u32, 0u8))
            .chain((l1 as u32..(l1 + l2 - 1) as u32).map(|e| (e, 0)))
            .collect();
    } else {
        nv = l1 + l2 - 1;
        for i in 0..l1 as u32 {
            edges.push((i, (i + 1) % l1 as u32));
        }
        edges.push((0, l1 as u32));
        for i in 0..(l2 - 2) as u32 {
            edges.push((l1 as u32 + i, l1 as u32 + i + 1));
        }
        edges.push(((l1 + l2 - 2) as u32, 0));
        z1 = (0..l1 as u32).map(|e| (e, 0)).collect();
        z2 = (l1 as u32..(l1 + l2) as u32).map(|e| (e, 0)).collect();
    }
    let yprime = CubeComplex::graph(nv as u32, &edges);
    let ne = yprime.cubes(1).len();
    let assign = vec![
        (0..nv).map(|_| CellMap { image: 0, corners: vec![0] }).collect(),
        (0..ne as u32)
            .map(|e| CellMap { image: e, corners: vec![0, 1] })
            .collect(),
    ];
    let map = CubicalMap {
        source: yprime.clone(),
        target: CubeComplex::bouquet(ne),
        assign,
    };
    map.check_structure().unwrap();
    (map, Rank2Decomposition { yprime, z1, z2 })
}

#[test]
fn c08_freeness_bounds_are_strict() {
    let run = |l1, l2, share_edge| {
        let (rel, dec) = two_cycle_relator(l1, l2, share_edge);
        let pres = CubicalPresentation {
            x: rel.target.clone(),
            relators: vec![rel],
        };
        check_freeness_bounds(&pres, 0, &dec).unwrap()
    };

    // comfortable margins pass
    let ok = run(34, 34, false);
    assert_eq!(ok.status, Status::Pass, "{ok}");
    assert!(ratio_report(&ok, "alpha_plus_beta").unwrap() < Rational64::new(1, 8));

    // alpha + beta exactly 1/8 must fail with that inequality named
    let sum_boundary = run(16, 16, true);
    assert_eq!(
        ratio_report(&sum_boundary, "alpha_plus_beta").unwrap(),
        Rational64::new(1, 8)
    );
    assert_eq!(sum_boundary.status, Status::Fail);
    match &sum_boundary.witness {
        Some(Witness::Text(t)) => assert!(t.contains("alpha + beta"), "{t}"),
        w => panic!("expected a named inequality, got {w:?}"),
    }

    // systole exactly 16 * max{D, diam K} must fail with that inequality
    let sys_boundary = run(16, 16, false);
    assert_eq!(int_report(&sys_boundary, "systole_floor"), Some(16));
    assert_eq!(sys_boundary.status, Status::Fail);
    match &sys_boundary.witness {
        Some(Witness::Text(t)) => assert!(t.contains("16 max"), "{t}"),
        w => panic!("expected a named inequality, got {w:?}"),
    }
}

// ------------------------------------------------------- criterion 9 oracles

/// Canonical code of an unrooted tree (center rooting + sorted subtree
/// codes), for isomorphism comparison.
fn tree_code(x: &CubeComplex) -> String {
    let nv = x.vertex_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for e in x.cubes(1) {
        adj[e.corners[0] as usize].push(e.corners[1] as usize);
        adj[e.corners[1] as usize].push(e.corners[0] as usize);
    }
    // find the center(s) by peeling leaves
    let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut removed = vec![false; nv];
    let mut layer: Vec<usize> = (0..nv).filter(|&v| deg[v] <= 1).collect();
    let mut remaining = nv;
    while remaining > 2 {
        let mut next = Vec::new();
        for &v in &layer {
            removed[v] = true;
            remaining -= 1;
            for &w in &adj[v] {
                if !removed[w] {
                    deg[w] -= 1;
                    if deg[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    fn encode(adj: &[Vec<usize>], v: usize, parent: Option<usize>) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|&&w| Some(w) != parent)
            .map(|&w| encode(adj, w, Some(v)))
            .collect();
        kids.sort();
        format!("({})", kids.join(""))
    }
    let mut codes: Vec<String> = (0..nv)
        .filter(|&v| !removed[v])
        .map(|c| encode(&adj, c, None))
        .collect();
    codes.sort();
    codes.remove(0)
}

/// Number of orientations choosing one side per wall with all pairwise
/// chosen sides intersecting.
fn oracle_consistent_orientations(ws: &FiniteWallspace) -> usize {
    let w = ws.walls.len();
    assert!(w <= 20);
    (0..1u32 << w)
        .filter(|mask| {
            for i in 0..w {
                for j in i + 1..w {
                    let si = &ws.walls[i][((mask >> i) & 1) as usize];
                    let sj = &ws.walls[j][((mask >> j) & 1) as usize];
                    if si.is_disjoint(sj) {
                        return false;
                    }
                }
            }
            true
        })
        .count()
}

/// Convex hull of a vertex set in a graph: close under shortest-path
/// intervals until stable.
fn interval_hull(x: &CubeComplex, seed: &BTreeSet<u32>) -> BTreeSet<u32> {
    let nv = x.vertex_count();
    let dists: Vec<Vec<u32>> = (0..nv as u32)
        .map(|v| x.bfs_distances(&[v]))
        .collect();
    let mut hull = seed.clone();
    loop {
        let mut grew = false;
        let cur: Vec<u32> = hull.iter().copied().collect();
        for &u in &cur {
            for &v in &cur {
                for w in 0..nv as u32 {
                    if !hull.contains(&w)
                        && dists[u as usize][w as usize] + dists[w as usize][v as usize]
                            == dists[u as usize][v as usize]
                    {
                        hull.insert(w);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            return hull;
        }
    }
}

#[test]
fn c09_dual_reproduces_trees_octants_and_grids() {
    // random trees up to 15 edges
    let mut rng = StdRng::seed_from_u64(37);
    for _ in 0..25 {
        let nv = rng.gen_range(2..=16u32);
        let edges: Vec<(u32, u32)> = (1..nv).map(|v| (rng.gen_range(0..v), v)).collect();
        let tree = CubeComplex::graph(nv, &edges);
        let ws = FiniteWallspace::of_complex(&tree).unwrap();
        let dual = dual_complex(&ws).unwrap();
        assert_eq!(dual.complex.vertex_count(), nv as usize);
        assert_eq!(dual.complex.cubes(1).len(), nv as usize - 1);
        assert_eq!(tree_code(&dual.complex), tree_code(&tree));
        assert_eq!(
            dual.complex.vertex_count(),
            oracle_consistent_orientations(&ws)
        );
    }

    // three pairwise-crossing walls on 8 octant points give a 3-cube
    let octants = FiniteWallspace {
        points: 8,
        walls: (0..3)
            .map(|b| {
                let side = |want| (0..8u32).filter(|p| (p >> b) & 1 == want).collect();
                [side(0), side(1)]
            })
            .collect(),
    };
    let cube = dual_complex(&octants).unwrap();
    let counts: Vec<usize> = (0..=cube.complex.dim())
        .map(|d| cube.complex.cubes(d).len())
        .collect();
    assert_eq!(counts, vec![8, 12, 6, 1]);
    assert!(cube.complex.is_npc());

    // grids up to 4x4 round-trip with matching 0-cube counts
    for (w, h) in [(1, 1), (2, 2), (3, 2), (3, 3), (4, 3), (4, 4)] {
        let grid = CubeComplex::grid(w, h);
        let ws = FiniteWallspace::of_complex(&grid).unwrap();
        let dual = dual_complex(&ws).unwrap();
        for d in 0..=grid.dim() {
            assert_eq!(dual.complex.cubes(d).len(), grid.cubes(d).len(), "{w}x{h} dim {d}");
        }
        assert_eq!(
            dual.complex.vertex_count(),
            oracle_consistent_orientations(&ws),
            "0-cube count vs orientation oracle for {w}x{h}"
        );
    }

    // hemi restrictions embed convexly: the interval hull of the image
    // adds nothing
    let grid = CubeComplex::grid(3, 3);
    let ws = FiniteWallspace::of_complex(&grid).unwrap();
    let full = dual_complex(&ws).unwrap();
    let corner: BTreeSet<u32> = [0u32, 1, 4, 5, 8, 9].into_iter().collect();
    let (_, restricted) = hemi_restrict_dual(&ws, &corner).unwrap();
    let orient_index: HashMap<&Vec<u8>, u32> = full
        .orientations
        .iter()
        .enumerate()
        .map(|(i, o)| (o, i as u32))
        .collect();
    let image: BTreeSet<u32> = restricted
        .orientations
        .iter()
        .map(|o| orient_index[o])
        .collect();
    assert_eq!(image.len(), restricted.complex.vertex_count());
    assert_eq!(interval_hull(&full.complex, &image), image);
}

#[test]
fn c10_superconvexity_detects_the_product_strip()
{
    let m = fixtures::nonexample_product_map();
    for cutoff in [4u32, 8, 16] {
        let cert = superconvexity_check(&m, cutoff).unwrap();
        assert_eq!(cert.status, Status::Fail, "cutoff {cutoff}");
        match &cert.witness {
            Some(Witness::Text(t)) => {
                assert_eq!(t, &format!("NotSuperconvexUpTo({cutoff})"))
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    // locally convex subgraphs of graphs are superconvex with L = 0
    let theta = CubeComplex::theta();
    let one_arc: BTreeSet<(usize, u32)> =
        [(0usize, 0u32), (0, 1), (1, 0)].into_iter().collect();
    let (_, incl) = subcomplex(&theta, &one_arc);
    let cert = superconvexity_check(&incl, 8).unwrap();
    assert_eq!(cert.status, Status::Pass);
    assert_eq!(int_report(&cert, "L"), Some(0));

    let b3 = CubeComplex::bouquet(3);
    let one_loop: BTreeSet<(usize, u32)> = [(0usize, 0u32), (1, 0)].into_iter().collect();
    let (_, incl) = subcomplex(&b3, &one_loop);
    let cert = superconvexity_check(&incl, 8).unwrap();
    assert_eq!(cert.status, Status::Pass);
    assert_eq!(int_report(&cert, "L"), Some(0));
}

#[test]
fn c11_malnormalization_formula_and_minimal_n() {
    let u = parse_word("a", 2).unwrap();
    let v = parse_word("b", 2).unwrap();
    let mut minimal = None;
    for n in 1..=6 {
        let ((u2, v2), cert) = malnormalize(&u, &v, n).unwrap();
        let verified = malnormality_certificate(2, &[u2, v2], 64).unwrap();
        assert_eq!(cert.status, verified.status, "pipeline vs fiber test at n={n}");
        if verified.status == Status::Pass {
            minimal = Some(n);
            break;
        }
    }
    let nstar = minimal.expect("a verified n* exists within the sweep");
    assert!(nstar <= 6);

    // the emitted word follows the interleaving formula literally at n=3
    let ((u3, _), _) = malnormalize(&u, &v, 3).unwrap();
    assert_eq!(word_to_string(&u3), "ababbabbba");
}

#[test]
fn c12_reports_are_deterministic() {
    // fixture serializations
    assert_eq!(
        fixtures::fixture_files("torus").unwrap(),
        fixtures::fixture_files("torus").unwrap()
    );
    let grid = CubeComplex::grid(3, 2);
    assert_eq!(
        cubical::io::serialize_complex(&grid),
        cubical::io::serialize_complex(&grid)
    );

    // certificates with rational reports
    let rel = cycle_word_map(&parse_word("aabb", 2).unwrap(), 2);
    let pres = CubicalPresentation {
        x: rel.target.clone(),
        relators: vec![rel],
    };
    let a = format!("{}", check_cprime(&pres, Rational64::new(1, 6), None).unwrap());
    let b = format!("{}", check_cprime(&pres, Rational64::new(1, 6), None).unwrap());
    assert_eq!(a, b);

    // wallspace construction and separation report
    let c6 = CubeComplex::cycle(6);
    let mk = || {
        let (y, ws) = antipodal_walls(&c6, 8).unwrap();
        let cert = cubical::wallspace::check_wall_separation(&y, &ws).unwrap();
        format!("{ws:?}\n{cert}")
    };
    assert_eq!(mk(), mk());

    // string small-cancellation search
    let words = [
        parse_word("abaabaaab", 2).unwrap(),
        parse_word("babbabbba", 2).unwrap(),
    ];
    let g1 = format!(
        "{}",
        graphical_cprime(2, &words, Rational64::new(1, 6)).unwrap()
    );
    let g2 = format!(
        "{}",
        graphical_cprime(2, &words, Rational64::new(1, 6)).unwrap()
    );
    assert_eq!(g1, g2);

    // the pipeline certificate chain renders identically on repeat
    let plan = pipeline_plan();
    let chain: Vec<String> = plan.certificates.iter().map(|c| format!("{c}")).collect();
    let again: Vec<String> = plan.certificates.iter().map(|c| format!("{c}")).collect();
    assert_eq!(chain, again);
}
