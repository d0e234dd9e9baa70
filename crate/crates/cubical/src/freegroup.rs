//! Stallings graphs over a bouquet: folding, constraint-avoiding word
//! construction, malnormalization, explicit small-cancellation word
//! families, and the classical graphical C'(α) check on cyclic words.

use crate::cert::{Certificate, Value, Witness};
use crate::cmap::{CellMap, CubicalMap};
use crate::complex::{Cube, CubeComplex, FaceRef};
use crate::fiber::{component_metrics, fiber_product, ComponentVerdict};
use crate::unionfind::UnionFind;
use crate::{Error, Result, Status};
use num_rational::Rational64;
use std::collections::HashMap;

/// A letter: generator index plus inversion flag.
pub type Letter = (u8, bool);

/// Parses a word over `a..z` with `A..Z` as inverses.
pub fn parse_word(s: &str, rank: usize) -> Result<Vec<Letter>> {
    let mut out = Vec::with_capacity(s.len());
    for ch in s.chars() {
        let letter = match ch {
            'a'..='z' => (ch as u8 - b'a', false),
            'A'..='Z' => (ch as u8 - b'A', true),
            c if c.is_whitespace() => continue,
            c => return Err(Error::Parse(format!("bad letter `{c}`"))),
        };
        if letter.0 as usize >= rank {
            return Err(Error::Parse(format!("letter `{ch}` exceeds rank {rank}")));
        }
        out.push(letter);
    }
    Ok(out)
}

pub fn word_to_string(w: &[Letter]) -> String {
    w.iter()
        .map(|&(l, inv)| {
            if inv {
                (b'A' + l) as char
            } else {
                (b'a' + l) as char
            }
        })
        .collect()
}

pub fn invert_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|&(l, inv)| (l, !inv)).collect()
}

/// True when no letter is followed (cyclically) by its inverse.
pub fn is_cyclically_reduced(w: &[Letter]) -> bool {
    if w.is_empty() {
        return false;
    }
    (0..w.len()).all(|i| {
        let (l1, s1) = w[i];
        let (l2, s2) = w[(i + 1) % w.len()];
        l1 != l2 || s1 == s2
    })
}

/// The least rotation over this orientation class, for canonical storage.
pub fn canonical_rotation(w: &[Letter]) -> Vec<Letter> {
    let mut best: Option<Vec<Letter>> = None;
    for cand in [w.to_vec(), invert_word(w)] {
        for r in 0..cand.len() {
            let rot: Vec<Letter> = cand[r..].iter().chain(&cand[..r]).copied().collect();
            let key: Vec<u8> = rot.iter().map(|&(l, i)| l * 2 + i as u8).collect();
            if best
                .as_ref()
                .map_or(true, |b| key < b.iter().map(|&(l, i)| l * 2 + i as u8).collect::<Vec<_>>())
            {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// A directed graph with generator-labeled edges, immersing into the
/// rank-`rank` bouquet exactly when folded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub rank: usize,
    pub verts: usize,
    /// (source, target, label)
    pub edges: Vec<(u32, u32, u32)>,
    pub base: Option<u32>,
    pub folded: bool,
}

impl LabeledGraph {
    /// A wedge of closed paths at a single base vertex, one petal per word.
    pub fn wedge(rank: usize, words: &[Vec<Letter>]) -> LabeledGraph {
        let mut g = LabeledGraph {
            rank,
            verts: 1,
            edges: Vec::new(),
            base: Some(0),
            folded: false,
        };
        for w in words {
            let mut at = 0u32;
            for (k, &(l, inv)) in w.iter().enumerate() {
                let next = if k + 1 == w.len() {
                    0
                } else {
                    g.verts += 1;
                    (g.verts - 1) as u32
                };
                if inv {
                    g.edges.push((next, at, l as u32));
                } else {
                    g.edges.push((at, next, l as u32));
                }
                at = next;
            }
        }
        g.folded = g.check_folded();
        g
    }

    fn check_folded(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for &(s, t, l) in &self.edges {
            if !seen.insert((s, l, 0u8)) || !seen.insert((t, l, 1u8)) {
                return false;
            }
        }
        true
    }

    /// Out-/in-edge by label at a vertex, if present (meaningful when folded).
    fn step(&self, v: u32, l: u32, inv: bool) -> Option<u32> {
        for &(s, t, lab) in &self.edges {
            if lab != l {
                continue;
            }
            if !inv && s == v {
                return Some(t);
            }
            if inv && t == v {
                return Some(s);
            }
        }
        None
    }

    /// Whether the based path of `w` lifts fully starting at `v`.
    pub fn lifts_at(&self, v: u32, w: &[Letter]) -> bool {
        let mut at = v;
        for &(l, inv) in w {
            match self.step(at, l as u32, inv) {
                Some(next) => at = next,
                None => return false,
            }
        }
        true
    }

    /// Whether the graph is a cover of the bouquet: every vertex has
    /// every direction.
    pub fn covers_bouquet(&self) -> bool {
        for v in 0..self.verts as u32 {
            for l in 0..self.rank as u32 {
                if self.step(v, l, false).is_none() || self.step(v, l, true).is_none() {
                    return false;
                }
            }
        }
        true
    }

    /// The underlying 1-complex together with its labeling map into the
    /// bouquet. Edge ids follow the graph's edge order.
    pub fn to_cubical_map(&self) -> CubicalMap {
        let b = CubeComplex::bouquet(self.rank);
        let mut dims = vec![Vec::new(), Vec::new()];
        for v in 0..self.verts as u32 {
            dims[0].push(Cube { corners: vec![v], faces: Vec::new() });
        }
        for &(s, t, _) in &self.edges {
            dims[1].push(Cube {
                corners: vec![s, t],
                faces: vec![
                    FaceRef { cube: s, corners: vec![0] },
                    FaceRef { cube: t, corners: vec![0] },
                ],
            });
        }
        let source = CubeComplex::new(dims);
        let assign = vec![
            (0..self.verts)
                .map(|_| CellMap { image: 0, corners: vec![0] })
                .collect(),
            self.edges
                .iter()
                .map(|&(_, _, l)| CellMap { image: l as u32, corners: vec![0, 1] })
                .collect(),
        ];
        CubicalMap { source, target: b, assign }
    }
}

/// Stallings folding: repeatedly merges endpoints of same-labeled,
/// same-directed edges until the graph immerses into the bouquet.
pub fn fold(g: &LabeledGraph) -> LabeledGraph {
    let mut uf = UnionFind::new(g.verts);
    loop {
        // same-label edges leaving (or entering) a common vertex force a merge
        let mut merged = false;
        let mut out_slot: HashMap<(u32, u32, u8), (u32, usize)> = HashMap::new();
        let mut dedup: std::collections::HashSet<(u32, u32, u32)> = Default::default();
        for (ei, &(s, t, l)) in g.edges.iter().enumerate() {
            let (s, t) = (uf.find(s), uf.find(t));
            if !dedup.insert((s, t, l)) {
                continue; // parallel duplicate, carries no new identification
            }
            for (key, far) in [((s, l, 0u8), t), ((t, l, 1u8), s)] {
                match out_slot.get(&key) {
                    None => {
                        out_slot.insert(key, (far, ei));
                    }
                    Some(&(other, _)) if uf.find(other) != uf.find(far) => {
                        uf.union(other, far);
                        merged = true;
                    }
                    Some(_) => {}
                }
            }
        }
        if !merged {
            break;
        }
    }
    // rebuild with dense ids sorted by class representative
    let mut reps: Vec<u32> = (0..g.verts as u32).map(|v| uf.find(v)).collect();
    let mut sorted: Vec<u32> = reps.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let new_id: HashMap<u32, u32> = sorted
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, i as u32))
        .collect();
    for r in &mut reps {
        *r = new_id[r];
    }
    let mut edges: Vec<(u32, u32, u32)> = g
        .edges
        .iter()
        .map(|&(s, t, l)| (reps[s as usize], reps[t as usize], l))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let mut out = LabeledGraph {
        rank: g.rank,
        verts: sorted.len(),
        edges,
        base: g.base.map(|b| reps[b as usize]),
        folded: true,
    };
    out.folded = out.check_folded();
    debug_assert!(out.folded, "folding reached a non-immersed fixpoint");
    out
}

/// Canonical form of a folded based graph: BFS renumbering from the
/// base with directions ordered by (label, orientation).
pub fn canonical_form(g: &LabeledGraph) -> LabeledGraph {
    let base = g.base.unwrap_or(0);
    let mut order: Vec<Option<u32>> = vec![None; g.verts];
    let mut next = 0u32;
    let mut queue = std::collections::VecDeque::new();
    order[base as usize] = Some(next);
    next += 1;
    queue.push_back(base);
    while let Some(v) = queue.pop_front() {
        for l in 0..g.rank as u32 {
            for inv in [false, true] {
                if let Some(w) = g.step(v, l, inv) {
                    if order[w as usize].is_none() {
                        order[w as usize] = Some(next);
                        next += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    // unreachable vertices keep relative order after the reachable ones
    for slot in order.iter_mut() {
        if slot.is_none() {
            *slot = Some(next);
            next += 1;
        }
    }
    let map = |v: u32| order[v as usize].unwrap();
    let mut edges: Vec<(u32, u32, u32)> = g
        .edges
        .iter()
        .map(|&(s, t, l)| (map(s), map(t), l))
        .collect();
    edges.sort_unstable();
    LabeledGraph {
        rank: g.rank,
        verts: g.verts,
        edges,
        base: g.base.map(map),
        folded: g.folded,
    }
}

/// Enumerates cyclically reduced words in length-lexicographic order and
/// returns the first whose based path lifts to no constraint graph at
/// any vertex, together with a second word forming an immersed wedge.
pub fn avoider(
    rank: usize,
    constraints: &[LabeledGraph],
) -> Result<(Vec<Letter>, (Vec<Letter>, Vec<Letter>))> {
    if rank < 2 {
        return Err(Error::RankTooLow);
    }
    for c in constraints {
        if !c.folded {
            return Err(Error::Parse("constraint graph is not folded".into()));
        }
        if c.covers_bouquet() {
            return Err(Error::FiniteIndexConstraint);
        }
    }
    let avoids = |w: &[Letter]| -> bool {
        constraints
            .iter()
            .all(|c| (0..c.verts as u32).all(|v| !c.lifts_at(v, w)))
    };
    let wedge_immersed = |u: &[Letter], v: &[Letter]| -> bool {
        // at the wedge point the four end directions must be distinct
        let dirs = [
            (u[0].0, u[0].1),
            (v[0].0, v[0].1),
            (u[u.len() - 1].0, !u[u.len() - 1].1),
            (v[v.len() - 1].0, !v[v.len() - 1].1),
        ];
        let mut seen = std::collections::HashSet::new();
        dirs.iter().all(|d| seen.insert(*d))
    };
    let mut first: Option<Vec<Letter>> = None;
    for len in 1..=16usize {
        let mut stack: Vec<Vec<Letter>> = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            if w.len() == len {
                if !is_cyclically_reduced(&w) || !avoids(&w) {
                    continue;
                }
                match &first {
                    None => first = Some(w),
                    Some(f) => {
                        if wedge_immersed(f, &w) {
                            return Ok((f.clone(), (f.clone(), w)));
                        }
                    }
                }
                continue;
            }
            // push in reverse so the stack pops in (label, sign) order
            for l in (0..rank as u8).rev() {
                for inv in [true, false] {
                    let mut w2 = w.clone();
                    w2.push((l, inv));
                    stack.push(w2);
                }
            }
        }
    }
    Err(Error::BudgetExhausted(16))
}

/// The interleaved pair `U' = U V U V² … U Vⁿ U`,
/// `V' = V U V U² … V Uⁿ V`, with a fiber-product malnormality report
/// for the subgroup they generate.
pub fn malnormalize(
    u: &[Letter],
    v: &[Letter],
    n: usize,
) -> Result<((Vec<Letter>, Vec<Letter>), Certificate)> {
    if u.is_empty() || v.is_empty() || n < 1 {
        return Err(Error::DegenerateParameters("need nonempty words, n >= 1".into()));
    }
    let rank = u
        .iter()
        .chain(v)
        .map(|&(l, _)| l as usize + 1)
        .max()
        .unwrap();
    let wedge = LabeledGraph::wedge(rank.max(2), &[u.to_vec(), v.to_vec()]);
    if !wedge.folded {
        return Err(Error::NotImmersedWedge);
    }
    let interleave = |x: &[Letter], y: &[Letter]| -> Vec<Letter> {
        let mut out: Vec<Letter> = x.to_vec();
        for k in 1..=n {
            for _ in 0..k {
                out.extend_from_slice(y);
            }
            out.extend_from_slice(x);
        }
        out
    };
    let up = interleave(u, v);
    let vp = interleave(v, u);
    let cert = malnormality_certificate(rank.max(2), &[up.clone(), vp.clone()], 64)?;
    Ok(((up, vp), cert))
}

/// Folds the wedge of the given words and checks, via the self fiber
/// product over the bouquet, that every non-diagonal component is a
/// tree; this is exactly malnormality of the subgroup in the free group.
pub fn malnormality_certificate(
    rank: usize,
    words: &[Vec<Letter>],
    guard: u32,
) -> Result<Certificate> {
    let folded = fold(&LabeledGraph::wedge(rank, words));
    let map = folded.to_cubical_map();
    let fp = fiber_product(&map, &map)?;
    let mut cert = Certificate::pass("malnormal");
    cert.push("components", Value::Int(fp.components.len() as i64));
    for c in 0..fp.components.len() {
        if Some(c) == fp.diagonal {
            continue;
        }
        match component_metrics(&fp, c, guard).verdict {
            ComponentVerdict::Contractible(_) => {}
            ComponentVerdict::Essential(w) => {
                cert.status = Status::Fail;
                cert.witness = Some(Witness::Loop(w));
                break;
            }
            ComponentVerdict::Inconclusive(g) => {
                cert.status = Status::Inconclusive;
                cert.bound = Some(g as u64);
            }
        }
    }
    Ok(cert)
}

/// The explicit word pair `(aba²b⋯aᵐb, bab²a⋯bⁿa)`.
pub fn sc_words(m: usize, n: usize) -> Result<(Vec<Letter>, Vec<Letter>)> {
    if m < 2 || n < 2 {
        return Err(Error::DegenerateParameters("need m, n >= 2".into()));
    }
    let block = |big: u8, sep: u8, count: usize| -> Vec<Letter> {
        let mut w = Vec::new();
        for k in 1..=count {
            for _ in 0..k {
                w.push((big, false));
            }
            w.push((sep, false));
        }
        w
    };
    Ok((block(0, 1, m), block(1, 0, n)))
}

/// Classical graphical C'(alpha) on a family of cyclic words: pieces are
/// maximal common cyclic factors between distinct relators, distinct
/// shifts of one relator, or a relator against any shift of an inverse.
/// Strict inequality against alpha times the shortest relator length.
pub fn graphical_cprime(
    rank: usize,
    words: &[Vec<Letter>],
    alpha: Rational64,
) -> Result<Certificate> {
    let _ = rank;
    let mut cert = Certificate::pass("gcprime");
    cert.push("alpha", Value::Ratio(alpha));
    cert.push("relators", Value::Int(words.len() as i64));
    if words.is_empty() {
        return Ok(cert);
    }
    for w in words {
        if !is_cyclically_reduced(w) {
            cert.status = Status::Fail;
            cert.witness = Some(Witness::Text(format!(
                "word {} is not cyclically reduced",
                word_to_string(w)
            )));
            return Ok(cert);
        }
    }
    let shortest = words.iter().map(|w| w.len()).min().unwrap();
    let (max_piece, at) = max_piece_length(words);
    cert.push("shortest", Value::Int(shortest as i64));
    cert.push("max_piece", Value::Int(max_piece as i64));
    let threshold = alpha * Rational64::from_integer(shortest as i64);
    if Rational64::from_integer(max_piece as i64) >= threshold {
        cert.status = Status::Fail;
        cert.witness = Some(Witness::Piece {
            kind: "graphical".into(),
            host: at.0,
            other: format!("relator {} (orientation {}, shift {})", at.1, at.2, at.3),
            diameter: max_piece as u64,
        });
    }
    Ok(cert)
}

/// The longest common cyclic factor over all distinct placements,
/// with the placement `(host, other, orientation, shift)` realizing it.
/// Dynamic programming over doubled words; runs keep constant alignment,
/// so the identity placement of a word against itself is excluded by
/// skipping its diagonal.
pub fn max_piece_length(words: &[Vec<Letter>]) -> (usize, (usize, usize, u8, usize)) {
    let oriented: Vec<Vec<Vec<Letter>>> = words
        .iter()
        .map(|w| vec![w.clone(), invert_word(w)])
        .collect();
    let mut best = 0usize;
    let mut at = (0usize, 0usize, 0u8, 0usize);
    for (i, oi) in oriented.iter().enumerate() {
        for (j, oj) in oriented.iter().enumerate() {
            for (o1, w1) in oi.iter().enumerate() {
                for (o2, w2) in oj.iter().enumerate() {
                    let n1 = w1.len();
                    let n2 = w2.len();
                    let cap = n1.min(n2);
                    let mut prev = vec![0usize; 2 * n2 + 1];
                    let mut cur = vec![0usize; 2 * n2 + 1];
                    for p in 0..2 * n1 {
                        cur[0] = 0;
                        for q in 0..2 * n2 {
                            let same_place =
                                i == j && o1 == o2 && n1 == n2 && p % n1 == q % n1;
                            cur[q + 1] = if !same_place && w1[p % n1] == w2[q % n2] {
                                (prev[q] + 1).min(cap)
                            } else {
                                0
                            };
                            if cur[q + 1] > best {
                                best = cur[q + 1];
                                at = (i, j, (o1 * 2 + o2) as u8, (q + n2 - p % n2) % n2);
                            }
                        }
                        std::mem::swap(&mut prev, &mut cur);
                    }
                }
            }
        }
    }
    (best, at)
}

/// Maximal cyclic letter runs of a word; the wrap-around run is merged.
fn cyclic_runs(w: &[Letter]) -> Vec<(Letter, usize)> {
    let mut runs: Vec<(Letter, usize)> = Vec::new();
    for &l in w {
        match runs.last_mut() {
            Some((p, c)) if *p == l => *c += 1,
            _ => runs.push((l, 1)),
        }
    }
    if runs.len() > 1 && runs[0].0 == runs[runs.len() - 1].0 {
        let (_, c) = runs.pop().unwrap();
        runs[0].1 += c;
    }
    runs
}

/// Longest piece between two cyclic words given as run lists. A common
/// factor either sits inside a single run, or ends a run on both sides,
/// continues through identical whole runs, and finishes with a partial
/// run. For `self_pair` (a word against itself) the constant-alignment
/// placement is excluded: equal run indices only contribute the in-run
/// shifted overlap of length `run − 1`.
fn rle_piece(
    r1: &[(Letter, usize)],
    n1: usize,
    r2: &[(Letter, usize)],
    n2: usize,
    self_pair: bool,
) -> usize {
    let cap = n1.min(n2);
    if r1.len() == 1 && r2.len() == 1 {
        let ((l1, c1), (l2, c2)) = (r1[0], r2[0]);
        if l1 != l2 {
            return 0;
        }
        // a power of a single letter overlaps itself fully at any
        // nonzero shift; a length-one word has no nonzero shift
        return if self_pair {
            if c1 >= 2 {
                cap
            } else {
                0
            }
        } else {
            c1.min(c2).min(cap)
        };
    }
    if r1.len() == 1 || r2.len() == 1 {
        let ((l, c), other) = if r1.len() == 1 {
            (r1[0], r2)
        } else {
            (r2[0], r1)
        };
        let m = other
            .iter()
            .filter(|(lo, _)| *lo == l)
            .map(|&(_, co)| co)
            .max()
            .unwrap_or(0);
        return m.min(c).min(cap);
    }
    let mut best = 0usize;
    for i in 0..r1.len() {
        for j in 0..r2.len() {
            if self_pair && i == j {
                if r1[i].1 >= 2 {
                    best = best.max(r1[i].1 - 1);
                }
                continue;
            }
            let (l1, c1) = r1[i];
            let (l2, c2) = r2[j];
            if l1 != l2 {
                continue;
            }
            // run-suffix start, then a chain of identical runs, then a
            // partial final run
            let mut total = c1.min(c2);
            best = best.max(total);
            let mut k = 1usize;
            loop {
                let a = r1[(i + k) % r1.len()];
                let b = r2[(j + k) % r2.len()];
                if a == b {
                    total += a.1;
                    if total >= cap {
                        break;
                    }
                    k += 1;
                } else {
                    if a.0 == b.0 {
                        total += a.1.min(b.1);
                    }
                    break;
                }
            }
            best = best.max(total);
        }
    }
    best.min(cap)
}

/// The length computed by [`max_piece_length`], via run-length
/// compression: cost scales with the number of letter runs instead of
/// word length, which matters for long words with few alternations.
pub fn max_piece_length_fast(words: &[Vec<Letter>]) -> usize {
    let oriented: Vec<(usize, Vec<(Letter, usize)>)> = words
        .iter()
        .flat_map(|w| [w.clone(), invert_word(w)])
        .map(|w| (w.len(), cyclic_runs(&w)))
        .collect();
    let mut best = 0;
    for (i, (n1, r1)) in oriented.iter().enumerate() {
        for (j, (n2, r2)) in oriented.iter().enumerate() {
            best = best.max(rle_piece(r1, *n1, r2, *n2, i == j));
        }
    }
    best
}

/// The cyclic word as a cycle mapping to the bouquet; inverse letters
/// traverse their edge backwards.
pub fn word_to_map(rank: usize, w: &[Letter]) -> Result<CubicalMap> {
    if w.is_empty() {
        return Err(Error::DegenerateParameters("empty word".into()));
    }
    let n = w.len() as u32;
    let c = CubeComplex::cycle(n);
    let b = CubeComplex::bouquet(rank);
    let assign = vec![
        (0..n).map(|_| CellMap { image: 0, corners: vec![0] }).collect(),
        w.iter()
            .map(|&(l, inv)| CellMap {
                image: l as u32,
                corners: if inv { vec![1, 0] } else { vec![0, 1] },
            })
            .collect(),
    ];
    Ok(CubicalMap { source: c, target: b, assign })
}
