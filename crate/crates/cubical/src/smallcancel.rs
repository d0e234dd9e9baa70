//! Piece enumeration and C'(α) certification for cubical presentations.
//!
//! A cubical presentation is a base complex together with relator maps,
//! each a local isometry from a compact connected complex. Cone pieces
//! come from fiber-product components between relators (excluding the
//! diagonal and automorphism translates); wall pieces come from
//! hyperplane carriers meeting an elevation the hyperplane misses.

use crate::cert::{Certificate, Value, Witness};
use crate::cmap::{check_local_isometry, CubicalMap};
use crate::complex::CubeComplex;
use crate::develop::{develop_ball, systole, SystoleResult};
use crate::fiber::{
    aut_over_x, component_metrics, fiber_product, graph_fiber_summary, ComponentVerdict,
    FiberProduct, GraphFiberSummary,
};
use crate::hyperplane::hyperplanes;
use crate::unionfind::UnionFind;
use crate::{Error, Result, Status};
use num_rational::Rational64;
use std::collections::HashMap;

/// A base complex with an ordered list of relator maps into it.
#[derive(Debug, Clone)]
pub struct CubicalPresentation {
    pub x: CubeComplex,
    pub relators: Vec<CubicalMap>,
}

impl CubicalPresentation {
    /// Structural validation: NPC base, relators are connected local
    /// isometries into the base.
    pub fn validate(&self) -> Result<()> {
        self.x.check_structure()?;
        if !self.x.is_npc() {
            return Err(Error::NotNpc);
        }
        for rel in &self.relators {
            if rel.target != self.x {
                return Err(Error::TargetMismatch);
            }
            rel.check_structure()?;
            if !rel.source.is_connected() {
                return Err(Error::NotConnected);
            }
            if check_local_isometry(rel)?.status != Status::Pass {
                return Err(Error::NotLocalIsometry);
            }
        }
        Ok(())
    }
}

/// Exact diameter, or a lower bound when analysis hit its guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterVerdict {
    Exact(u32),
    AtLeast(u32),
}

impl DiameterVerdict {
    pub fn value(&self) -> u32 {
        match self {
            DiameterVerdict::Exact(d) | DiameterVerdict::AtLeast(d) => *d,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, DiameterVerdict::Exact(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PieceKind {
    /// Overlap with relator `other`, as fiber-product component `component`.
    Cone { other: usize, component: usize },
    /// Carrier intersection with a hyperplane of the base, by its index.
    Wall { hyperplane: usize },
}

/// One piece of a relator, measured in the host relator's metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub host: usize,
    pub kind: PieceKind,
    pub diameter: DiameterVerdict,
}

/// The result of piece enumeration, with both raw and
/// automorphism-identified cone-component counts.
#[derive(Debug, Clone)]
pub struct PieceReport {
    pub pieces: Vec<Piece>,
    /// Order of the automorphism group of each relator over the base.
    pub aut_orders: Vec<usize>,
    /// Non-diagonal fiber components over all ordered relator pairs.
    pub raw_cone_components: usize,
    /// Components remaining after automorphism identification.
    pub identified_cone_components: usize,
}

impl PieceReport {
    /// Largest piece diameter hosted by the given relator.
    pub fn max_for_host(&self, host: usize) -> Option<&Piece> {
        self.pieces
            .iter()
            .filter(|p| p.host == host)
            .max_by_key(|p| (p.diameter.value(), !p.diameter.is_exact()))
    }
}

pub fn enumerate_pieces(pres: &CubicalPresentation, guard_radius: u32) -> Result<PieceReport> {
    pres.validate()?;
    let mut pieces = Vec::new();
    let aut_orders: Vec<usize> = Vec::new();
    let mut auts: Vec<Vec<CubicalMap>> = Vec::with_capacity(pres.relators.len());
    for rel in &pres.relators {
        auts.push(aut_over_x(rel));
    }
    let mut raw = 0usize;
    let mut identified = 0usize;

    // cone pieces over all ordered relator pairs
    for (i, ri) in pres.relators.iter().enumerate() {
        for (j, rj) in pres.relators.iter().enumerate() {
            if ri.source.dim() <= 1 && rj.source.dim() <= 1 {
                // graph relators: component summary without the pair complex
                let fs = graph_fiber_summary(ri, rj)?;
                let reps = identify_graph_components(&fs, &auts[j], i == j);
                for (comp, class) in reps {
                    if i == j && fs.diagonal == Some(comp) {
                        continue; // the trivial self-overlap is not a piece
                    }
                    raw += 1;
                    if class != CompClass::Keep {
                        continue; // automorphism translate of another component
                    }
                    identified += 1;
                    let diameter = if fs.cells(comp) == 1 {
                        DiameterVerdict::Exact(0)
                    } else {
                        match fs.tree_diameter(comp) {
                            Some(d) => DiameterVerdict::Exact(d),
                            // essential components lift to unbounded pieces
                            None => DiameterVerdict::AtLeast(guard_radius.max(1)),
                        }
                    };
                    pieces.push(Piece {
                        host: i,
                        kind: PieceKind::Cone { other: j, component: comp },
                        diameter,
                    });
                }
                continue;
            }
            let fp = fiber_product(ri, rj)?;
            // the trivial self-overlap only exists for a relator against
            // itself; duplicate relators at different indices genuinely
            // share their whole elevation
            let reps = identify_components(&fp, &auts[j], i == j);
            for (comp, class) in reps {
                if i == j && fp.diagonal == Some(comp) {
                    continue; // the trivial self-overlap is not a piece
                }
                raw += 1;
                if class != CompClass::Keep {
                    continue; // automorphism translate of another component
                }
                identified += 1;
                let diameter = cone_diameter(&fp, comp, guard_radius);
                pieces.push(Piece {
                    host: i,
                    kind: PieceKind::Cone { other: j, component: comp },
                    diameter,
                });
            }
        }
    }

    // wall pieces
    let hyps = hyperplanes(&pres.x);
    let mut edge_to_hyp = vec![usize::MAX; pres.x.cubes(1).len()];
    for (hi, h) in hyps.iter().enumerate() {
        for &e in &h.edges {
            edge_to_hyp[e as usize] = hi;
        }
    }
    for (i, rel) in pres.relators.iter().enumerate() {
        if pres.x.dim() <= 1 {
            graph_wall_pieces(pres, i, rel, &edge_to_hyp, &mut pieces);
        } else {
            developed_wall_pieces(pres, i, rel, guard_radius, &edge_to_hyp, &mut pieces)?;
        }
    }

    Ok(PieceReport {
        pieces,
        aut_orders: {
            let mut a = aut_orders;
            a.extend(auts.iter().map(|g| g.len()));
            a
        },
        raw_cone_components: raw,
        identified_cone_components: identified,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CompClass {
    Keep,
    Diagonal,
    Translate,
}

/// Classifies fiber components under the right-factor action of the
/// second relator's automorphism group: one representative per orbit
/// (the least component index), the diagonal's whole orbit marked.
fn identify_components(
    fp: &FiberProduct,
    auts: &[CubicalMap],
    exclude_diagonal: bool,
) -> Vec<(usize, CompClass)> {
    let n = fp.components.len();
    let mut uf = UnionFind::new(n);
    if auts.len() > 1 {
        let ids0: HashMap<(u32, u32), u32> = fp.pairs[0]
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        for psi in auts {
            for (c, verts) in fp.components.iter().enumerate() {
                let (u, v) = fp.pairs[0][verts[0] as usize];
                let img = ids0[&(u, psi.vertex_image(v))];
                let c2 = fp.component_of_vertex[img as usize];
                uf.union(c as u32, c2);
            }
        }
    }
    let diag_root = if exclude_diagonal {
        fp.diagonal.map(|d| uf.find(d as u32))
    } else {
        None
    };
    // smaller-id-wins union-find: the root is the canonical representative
    let mut out = Vec::new();
    for c in 0..n {
        let r = uf.find(c as u32);
        let class = if Some(r) == diag_root {
            CompClass::Diagonal
        } else if r as usize == c {
            CompClass::Keep
        } else {
            CompClass::Translate
        };
        out.push((c, class));
    }
    out
}

/// [`identify_components`] over a [`GraphFiberSummary`]: the same
/// right-factor automorphism orbits and diagonal handling.
fn identify_graph_components(
    fs: &GraphFiberSummary,
    auts: &[CubicalMap],
    exclude_diagonal: bool,
) -> Vec<(usize, CompClass)> {
    let n = fs.components.len();
    let mut uf = UnionFind::new(n);
    if auts.len() > 1 {
        for psi in auts {
            for (c, &(rep, _)) in fs.components.iter().enumerate() {
                let (u, v) = fs.pair_of(rep);
                let img = fs.pair_index(u, psi.vertex_image(v));
                let c2 = fs.component_of_vertex[img as usize];
                uf.union(c as u32, c2);
            }
        }
    }
    let diag_root = if exclude_diagonal {
        fs.diagonal.map(|d| uf.find(d as u32))
    } else {
        None
    };
    let mut out = Vec::new();
    for c in 0..n {
        let r = uf.find(c as u32);
        let class = if Some(r) == diag_root {
            CompClass::Diagonal
        } else if r as usize == c {
            CompClass::Keep
        } else {
            CompClass::Translate
        };
        out.push((c, class));
    }
    out
}

fn cone_diameter(fp: &FiberProduct, comp: usize, guard_radius: u32) -> DiameterVerdict {
    if fp.component_cells[comp].len() == 1 {
        return DiameterVerdict::Exact(0);
    }
    match component_metrics(fp, comp, guard_radius).verdict {
        ComponentVerdict::Contractible(d) => DiameterVerdict::Exact(d),
        // essential components lift to unbounded pieces
        ComponentVerdict::Essential(_) => DiameterVerdict::AtLeast(guard_radius.max(1)),
        ComponentVerdict::Inconclusive(g) => DiameterVerdict::AtLeast(g),
    }
}

/// Wall pieces over a 1-dimensional base: every hyperplane is a single
/// edge, carriers are edges, and every piece is a single vertex. A piece
/// exists at a relator vertex that maps to an endpoint of the edge
/// without an incident edge-end lying over that end.
fn graph_wall_pieces(
    pres: &CubicalPresentation,
    i: usize,
    rel: &CubicalMap,
    edge_to_hyp: &[usize],
    out: &mut Vec<Piece>,
) {
    let y = &rel.source;
    let mut covered: Vec<Vec<(u32, u8)>> = vec![Vec::new(); y.vertex_count()];
    for e in 0..y.cubes(1).len() as u32 {
        for end in 0..2u8 {
            let v = y.cubes(1)[e as usize].corners[end as usize];
            covered[v as usize].push(rel.edge_end_image(e, end));
        }
    }
    for (xe, xedge) in pres.x.cubes(1).iter().enumerate() {
        let mut found = false;
        'scan: for v in 0..y.vertex_count() as u32 {
            let img = rel.vertex_image(v);
            for s in 0..2u8 {
                if xedge.corners[s as usize] == img
                    && !covered[v as usize].contains(&(xe as u32, s))
                {
                    found = true;
                    break 'scan;
                }
            }
        }
        if found {
            out.push(Piece {
                host: i,
                kind: PieceKind::Wall { hyperplane: edge_to_hyp[xe] },
                diameter: DiameterVerdict::Exact(0),
            });
        }
    }
}

/// Wall pieces in dimension >= 2: develops a ball of the base's
/// universal cover around the relator's base point, recovers the
/// elevation as a fiber component of the ball projection, and measures
/// carrier intersections with hyperplanes disjoint from the elevation.
/// Pieces touching the frontier get AtLeast verdicts; lifted hyperplanes
/// are aggregated per base hyperplane by largest diameter.
fn developed_wall_pieces(
    pres: &CubicalPresentation,
    i: usize,
    rel: &CubicalMap,
    guard_radius: u32,
    edge_to_hyp: &[usize],
    out: &mut Vec<Piece>,
) -> Result<()> {
    let y = &rel.source;
    let diam_y = y.diameter().ok_or(Error::NotConnected)?;
    let r = guard_radius + diam_y + 2;
    let ball = develop_ball(&pres.x, rel.vertex_image(0), r)?;
    let fp = fiber_product(&ball.projection, rel)?;
    let v0 = fp.pairs[0]
        .iter()
        .position(|&p| p == (ball.base, 0))
        .expect("base pair present") as u32;
    let comp = fp.component_of_vertex[v0 as usize] as usize;
    let (cc, olds) = fp.component_complex(comp);

    let mut elev_vert = vec![false; ball.complex.vertex_count()];
    let mut elev_edge = vec![false; ball.complex.cubes(1).len()];
    let mut local_of: HashMap<u32, u32> = HashMap::new();
    for (li, &fi) in olds[0].iter().enumerate() {
        let (bv, _) = fp.pairs[0][fi as usize];
        elev_vert[bv as usize] = true;
        local_of.entry(bv).or_insert(li as u32);
    }
    if olds.len() > 1 {
        for &fi in &olds[1] {
            let (be, _) = fp.pairs[1][fi as usize];
            elev_edge[be as usize] = true;
        }
    }

    // (max diameter, frontier-truncated) per base hyperplane
    let mut agg: HashMap<usize, (u32, bool)> = HashMap::new();
    for h in hyperplanes(&ball.complex) {
        if h.edges.iter().any(|&e| elev_edge[e as usize]) {
            continue; // not disjoint from the elevation
        }
        let mut pverts: Vec<u32> = Vec::new();
        let mut truncated = false;
        for &(d, c) in &h.carrier {
            if d != 0 {
                continue;
            }
            if ball.frontier[c as usize] {
                truncated = true;
            }
            if elev_vert[c as usize] {
                pverts.push(local_of[&c]);
            }
        }
        if pverts.is_empty() {
            continue;
        }
        pverts.sort_unstable();
        pverts.dedup();
        let mut d_max = 0u32;
        for &p in &pverts {
            let dist = cc.bfs_distances(&[p]);
            for &q in &pverts {
                d_max = d_max.max(dist[q as usize]);
            }
        }
        let xe = ball.projection.assign[1][h.edges[0] as usize].image;
        let xh = edge_to_hyp[xe as usize];
        let entry = agg.entry(xh).or_insert((0, false));
        entry.0 = entry.0.max(d_max);
        entry.1 |= truncated;
    }
    let mut keys: Vec<usize> = agg.keys().copied().collect();
    keys.sort_unstable();
    for xh in keys {
        let (d, truncated) = agg[&xh];
        out.push(Piece {
            host: i,
            kind: PieceKind::Wall { hyperplane: xh },
            diameter: if truncated {
                DiameterVerdict::AtLeast(d)
            } else {
                DiameterVerdict::Exact(d)
            },
        });
    }
    Ok(())
}

/// C'(alpha) certificate: every piece hosted by relator i must have
/// diameter strictly below alpha times the relator's systole. Exact
/// rationals throughout; an AtLeast verdict at or above the threshold
/// fails, below it the check is inconclusive.
pub fn check_cprime(
    pres: &CubicalPresentation,
    alpha: Rational64,
    guard_radius: Option<u32>,
) -> Result<Certificate> {
    pres.validate()?;
    if alpha <= Rational64::from_integer(0) {
        return Err(Error::DegenerateParameters("alpha must be positive".into()));
    }
    let check = "cprime";

    // systoles first; graphs get a guard that always decides
    let mut systoles = Vec::with_capacity(pres.relators.len());
    let mut sys_bound: Option<u64> = None;
    for rel in &pres.relators {
        let y = &rel.source;
        let g = if y.dim() <= 1 {
            y.cubes(1).len() as u32 + 1
        } else {
            guard_radius.unwrap_or(64)
        };
        match systole(y, g)? {
            SystoleResult::Exact { length, .. } => systoles.push(Some(length)),
            SystoleResult::AtLeast(b) => {
                systoles.push(None);
                sys_bound = Some(sys_bound.unwrap_or(0).max(b as u64));
            }
        }
    }

    // default guard: ceil(alpha * sys) + 1 over all decided relators
    let guard = guard_radius.unwrap_or_else(|| {
        systoles
            .iter()
            .flatten()
            .map(|&s| {
                let t = alpha * Rational64::from_integer(s as i64);
                (t.ceil().to_integer() as u32) + 1
            })
            .max()
            .unwrap_or(2)
    });

    let report = enumerate_pieces(pres, guard)?;

    let mut cert = Certificate::pass(check);
    cert.push("alpha", Value::Ratio(alpha));
    cert.push("guard", Value::Int(guard as i64));
    cert.push("relators", Value::Int(pres.relators.len() as i64));
    cert.push(
        "cone_components.raw",
        Value::Int(report.raw_cone_components as i64),
    );
    cert.push(
        "cone_components.identified",
        Value::Int(report.identified_cone_components as i64),
    );
    cert.push("pieces.total", Value::Int(report.pieces.len() as i64));

    let mut offender: Option<Witness> = None;
    let mut unresolved: Option<u64> = sys_bound;
    for (i, rel) in pres.relators.iter().enumerate() {
        let _ = rel;
        let sys = systoles[i];
        let max_piece = report.max_for_host(i);
        let (max_d, max_exact) = max_piece
            .map(|p| (p.diameter.value(), p.diameter.is_exact()))
            .unwrap_or((0, true));
        cert.push(
            &format!("relator{i}.systole"),
            match sys {
                Some(s) => Value::Int(s as i64),
                None => Value::Text("inconclusive".into()),
            },
        );
        cert.push(
            &format!("relator{i}.max_piece"),
            if max_exact {
                Value::Int(max_d as i64)
            } else {
                Value::Text(format!(">= {max_d}"))
            },
        );
        cert.push(&format!("relator{i}.aut_order"), Value::Int(report.aut_orders[i] as i64));
        let s = match sys {
            Some(s) => s,
            None => continue, // already marked unresolved
        };
        let threshold = alpha * Rational64::from_integer(s as i64);
        cert.push(
            &format!("relator{i}.ratio"),
            Value::Ratio(Rational64::new(max_d as i64, s as i64)),
        );
        for p in report.pieces.iter().filter(|p| p.host == i) {
            let d = Rational64::from_integer(p.diameter.value() as i64);
            let bad = d >= threshold;
            match (p.diameter.is_exact(), bad) {
                (_, true) => {
                    if offender.is_none() {
                        offender = Some(piece_witness(p));
                    }
                }
                (false, false) => {
                    let b = p.diameter.value() as u64;
                    unresolved = Some(unresolved.unwrap_or(0).max(b.max(guard as u64)));
                }
                (true, false) => {}
            }
        }
    }

    if let Some(w) = offender {
        cert.status = Status::Fail;
        cert.witness = Some(w);
    } else if let Some(b) = unresolved {
        cert.status = Status::Inconclusive;
        cert.bound = Some(b);
    }
    Ok(cert)
}

fn piece_witness(p: &Piece) -> Witness {
    match &p.kind {
        PieceKind::Cone { other, component } => Witness::Piece {
            kind: "cone".into(),
            host: p.host,
            other: format!("relator {other} component {component}"),
            diameter: p.diameter.value() as u64,
        },
        PieceKind::Wall { hyperplane } => Witness::Piece {
            kind: "wall".into(),
            host: p.host,
            other: format!("hyperplane {hyperplane}"),
            diameter: p.diameter.value() as u64,
        },
    }
}

/// The presentation induced on a cover or subspace `e: E -> X`: each
/// relator is replaced by the components of its fiber product with `e`,
/// projected to `E`.
pub fn induced_presentation(
    e: &CubicalMap,
    pres: &CubicalPresentation,
) -> Result<CubicalPresentation> {
    if e.target != pres.x {
        return Err(Error::TargetMismatch);
    }
    let mut relators = Vec::new();
    for rel in &pres.relators {
        let fp = fiber_product(e, rel)?;
        for c in 0..fp.components.len() {
            let (_, incl) = fp.component_subcomplex(c);
            relators.push(CubicalMap::compose(&incl, &fp.left));
        }
    }
    Ok(CubicalPresentation {
        x: e.source.clone(),
        relators,
    })
}
