//! Canonical text serialization: a line-based format for complexes and
//! maps that round-trips byte-exactly, and JSON documents (with file
//! references) for presentations and wall structures.

use crate::cmap::{CellMap, CubicalMap};
use crate::complex::{Cube, CubeComplex, FaceRef};
use crate::dual::FiniteWallspace;
use crate::smallcancel::CubicalPresentation;
use crate::wallspace::Wallspace;
use crate::{Error, Result};
use serde_json::{json, Value as Json};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse(format!("line {}: {msg}", line + 1))
}

/// Serializes a complex in the canonical line format. The writer is
/// deterministic, so equal complexes always produce identical bytes.
pub fn serialize_complex(x: &CubeComplex) -> String {
    let mut out = String::new();
    writeln!(out, "ccx 1").unwrap();
    writeln!(out, "dim {}", x.dim()).unwrap();
    for n in 0..=x.dim() {
        writeln!(out, "cubes {} {}", n, x.cubes(n).len()).unwrap();
        for (i, c) in x.cubes(n).iter().enumerate() {
            write!(out, "{i} corners").unwrap();
            for &v in &c.corners {
                write!(out, " {v}").unwrap();
            }
            write!(out, " faces").unwrap();
            for f in &c.faces {
                write!(out, " {}:", f.cube).unwrap();
                let parts: Vec<String> = f.corners.iter().map(|k| k.to_string()).collect();
                write!(out, "{}", parts.join(",")).unwrap();
            }
            writeln!(out).unwrap();
        }
    }
    out
}

/// Parses the canonical line format; accepts exactly what
/// `serialize_complex` emits.
pub fn parse_complex(text: &str) -> Result<CubeComplex> {
    let lines: Vec<&str> = text.lines().collect();
    let mut at = 0;
    parse_complex_lines(&lines, &mut at)
}

fn parse_complex_lines(lines: &[&str], at: &mut usize) -> Result<CubeComplex> {
    let expect = |at: &mut usize, prefix: &str| -> Result<Vec<String>> {
        let line = lines
            .get(*at)
            .ok_or_else(|| parse_err(*at, "unexpected end of input"))?;
        let mut words = line.split_whitespace();
        if words.next() != Some(prefix) {
            return Err(parse_err(*at, &format!("expected `{prefix}`")));
        }
        let rest = words.map(str::to_string).collect();
        *at += 1;
        Ok(rest)
    };
    let header = expect(at, "ccx")?;
    if header.as_slice() != ["1"] {
        return Err(parse_err(*at - 1, "unsupported complex format version"));
    }
    let dim_words = expect(at, "dim")?;
    let dim: usize = dim_words
        .first()
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| parse_err(*at - 1, "bad dimension"))?;
    let mut dims: Vec<Vec<Cube>> = Vec::with_capacity(dim + 1);
    for n in 0..=dim {
        let counts = expect(at, "cubes")?;
        if counts.first().map(String::as_str) != Some(&n.to_string()[..]) {
            return Err(parse_err(*at - 1, "cube blocks must appear in dimension order"));
        }
        let count: usize = counts
            .get(1)
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| parse_err(*at - 1, "bad cube count"))?;
        let mut layer = Vec::with_capacity(count);
        for i in 0..count {
            let line = lines
                .get(*at)
                .ok_or_else(|| parse_err(*at, "unexpected end of input"))?;
            let cube = parse_cube_line(line, i, *at)?;
            *at += 1;
            layer.push(cube);
        }
        dims.push(layer);
    }
    Ok(CubeComplex::new(dims))
}

fn parse_cube_line(line: &str, expect_id: usize, lineno: usize) -> Result<Cube> {
    let mut words = line.split_whitespace();
    let id: usize = words
        .next()
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| parse_err(lineno, "missing cube id"))?;
    if id != expect_id {
        return Err(parse_err(lineno, "cube ids must be consecutive from 0"));
    }
    if words.next() != Some("corners") {
        return Err(parse_err(lineno, "expected `corners`"));
    }
    let mut corners = Vec::new();
    let mut faces = Vec::new();
    let mut in_faces = false;
    for w in words {
        if w == "faces" {
            in_faces = true;
            continue;
        }
        if !in_faces {
            corners.push(
                w.parse()
                    .map_err(|_| parse_err(lineno, "bad corner vertex id"))?,
            );
        } else {
            let (cube, corr) = w
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, "face entries look like `cube:c0,c1`"))?;
            let cube = cube
                .parse()
                .map_err(|_| parse_err(lineno, "bad face cube id"))?;
            let corners: Vec<u8> = corr
                .split(',')
                .map(|c| c.parse().map_err(|_| parse_err(lineno, "bad face corner")))
                .collect::<Result<_>>()?;
            faces.push(FaceRef { cube, corners });
        }
    }
    if !in_faces {
        return Err(parse_err(lineno, "expected `faces`"));
    }
    Ok(Cube { corners, faces })
}

/// Serializes a map: both complexes inline, then the assignment table.
pub fn serialize_map(f: &CubicalMap) -> String {
    let mut out = String::new();
    writeln!(out, "cmap 1").unwrap();
    writeln!(out, "source").unwrap();
    out.push_str(&serialize_complex(&f.source));
    writeln!(out, "target").unwrap();
    out.push_str(&serialize_complex(&f.target));
    for n in 0..f.assign.len() {
        writeln!(out, "assign {} {}", n, f.assign[n].len()).unwrap();
        for (i, cm) in f.assign[n].iter().enumerate() {
            let parts: Vec<String> = cm.corners.iter().map(|k| k.to_string()).collect();
            writeln!(out, "{i} -> {} corners {}", cm.image, parts.join(",")).unwrap();
        }
    }
    out
}

pub fn parse_map(text: &str) -> Result<CubicalMap> {
    let lines: Vec<&str> = text.lines().collect();
    let mut at = 0;
    let need = |at: &mut usize, want: &str| -> Result<()> {
        if lines.get(*at).map(|l| l.trim()) != Some(want) {
            return Err(parse_err(*at, &format!("expected `{want}`")));
        }
        *at += 1;
        Ok(())
    };
    need(&mut at, "cmap 1")?;
    need(&mut at, "source")?;
    let source = parse_complex_lines(&lines, &mut at)?;
    need(&mut at, "target")?;
    let target = parse_complex_lines(&lines, &mut at)?;
    let mut assign = Vec::new();
    while at < lines.len() {
        let mut words = lines[at].split_whitespace();
        if words.next() != Some("assign") {
            return Err(parse_err(at, "expected `assign`"));
        }
        let n: usize = words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| parse_err(at, "bad assign dimension"))?;
        if n != assign.len() {
            return Err(parse_err(at, "assign blocks must appear in dimension order"));
        }
        let count: usize = words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| parse_err(at, "bad assign count"))?;
        at += 1;
        let mut layer = Vec::with_capacity(count);
        for i in 0..count {
            let line = lines
                .get(at)
                .ok_or_else(|| parse_err(at, "unexpected end of input"))?;
            let mut w = line.split_whitespace();
            let id: usize = w
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| parse_err(at, "missing cell id"))?;
            if id != i || w.next() != Some("->") {
                return Err(parse_err(at, "expected `<id> -> <image> corners <list>`"));
            }
            let image: u32 = w
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| parse_err(at, "bad image id"))?;
            if w.next() != Some("corners") {
                return Err(parse_err(at, "expected `corners`"));
            }
            let corners: Vec<u8> = w
                .next()
                .ok_or_else(|| parse_err(at, "missing corner list"))?
                .split(',')
                .map(|c| c.parse().map_err(|_| parse_err(at, "bad corner entry")))
                .collect::<Result<_>>()?;
            layer.push(CellMap { image, corners });
            at += 1;
        }
        assign.push(layer);
    }
    Ok(CubicalMap { source, target, assign })
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_complex(path: &Path) -> Result<CubeComplex> {
    parse_complex(&read_to_string(path)?)
}

pub fn load_map(path: &Path) -> Result<CubicalMap> {
    parse_map(&read_to_string(path)?)
}

pub fn save(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn json_of(path: &Path) -> Result<Json> {
    serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn sibling(base: &Path, rel: &str) -> PathBuf {
    base.parent().unwrap_or_else(|| Path::new(".")).join(rel)
}

/// Loads a presentation document: `{"x": "x.ccx", "relators":
/// ["r0.cmap", ...]}` with references resolved next to the document.
pub fn load_presentation(path: &Path) -> Result<CubicalPresentation> {
    let doc = json_of(path)?;
    let xref = doc
        .get("x")
        .and_then(Json::as_str)
        .ok_or_else(|| Error::Parse("presentation needs an `x` reference".into()))?;
    let x = load_complex(&sibling(path, xref))?;
    let rels = doc
        .get("relators")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Parse("presentation needs a `relators` array".into()))?;
    let mut relators = Vec::with_capacity(rels.len());
    for r in rels {
        let rref = r
            .as_str()
            .ok_or_else(|| Error::Parse("relator references must be strings".into()))?;
        relators.push(load_map(&sibling(path, rref))?);
    }
    Ok(CubicalPresentation { x, relators })
}

/// Writes a presentation as a document plus one file per component.
pub fn save_presentation(dir: &Path, name: &str, pres: &CubicalPresentation) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let xfile = format!("{name}.x.ccx");
    save(&dir.join(&xfile), &serialize_complex(&pres.x))?;
    let mut relrefs = Vec::new();
    for (i, r) in pres.relators.iter().enumerate() {
        let rfile = format!("{name}.r{i}.cmap");
        save(&dir.join(&rfile), &serialize_map(r))?;
        relrefs.push(Json::String(rfile));
    }
    let doc = json!({ "relators": relrefs, "x": xfile });
    let pfile = dir.join(format!("{name}.pres.json"));
    save(&pfile, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    Ok(pfile)
}

/// Wallspace document: `{"complex": ref, "walls": [[ids]], "sigma":
/// [[edge, end]]}`, with the complex reference resolved next to the
/// document.
pub fn load_wallspace(path: &Path) -> Result<(CubeComplex, Wallspace)> {
    let doc = json_of(path)?;
    let cref = doc
        .get("complex")
        .and_then(Json::as_str)
        .ok_or_else(|| Error::Parse("wallspace needs a `complex` reference".into()))?;
    let complex = load_complex(&sibling(path, cref))?;
    let walls = doc
        .get("walls")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Parse("wallspace needs a `walls` array".into()))?
        .iter()
        .map(|w| {
            w.as_array()
                .ok_or_else(|| Error::Parse("each wall is an id array".into()))?
                .iter()
                .map(|h| {
                    h.as_u64()
                        .map(|x| x as u32)
                        .ok_or_else(|| Error::Parse("wall ids are integers".into()))
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let sigma = match doc.get("sigma") {
        None | Some(Json::Null) => None,
        Some(s) => Some(
            s.as_array()
                .ok_or_else(|| Error::Parse("sigma is an array of [edge, end]".into()))?
                .iter()
                .map(|p| {
                    let pair = p.as_array().filter(|a| a.len() == 2);
                    match pair {
                        Some(a) => Ok((
                            a[0].as_u64().unwrap_or(u64::MAX) as u32,
                            a[1].as_u64().unwrap_or(u64::MAX) as u8,
                        )),
                        None => Err(Error::Parse("sigma entries are [edge, end]".into())),
                    }
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok((complex, Wallspace { walls, sigma }))
}

pub fn save_wallspace(
    dir: &Path,
    name: &str,
    complex: &CubeComplex,
    ws: &Wallspace,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let cfile = format!("{name}.ccx");
    save(&dir.join(&cfile), &serialize_complex(complex))?;
    let walls: Vec<Json> = ws
        .walls
        .iter()
        .map(|w| Json::Array(w.iter().map(|&h| json!(h)).collect()))
        .collect();
    let doc = match &ws.sigma {
        Some(sig) => {
            let sigma: Vec<Json> = sig.iter().map(|&(e, end)| json!([e, end])).collect();
            json!({ "complex": cfile, "sigma": sigma, "walls": walls })
        }
        None => json!({ "complex": cfile, "walls": walls }),
    };
    let wfile = dir.join(format!("{name}.walls.json"));
    save(&wfile, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    Ok(wfile)
}

/// Abstract ground-set wallspace: `{"points": n, "walls":
/// [[[side a], [side b]], ...]}`.
pub fn load_finite_wallspace(path: &Path) -> Result<FiniteWallspace> {
    let doc = json_of(path)?;
    let points = doc
        .get("points")
        .and_then(Json::as_u64)
        .ok_or_else(|| Error::Parse("finite wallspace needs `points`".into()))?
        as usize;
    let side = |v: &Json| -> Result<BTreeSet<u32>> {
        v.as_array()
            .ok_or_else(|| Error::Parse("halfspaces are arrays".into()))?
            .iter()
            .map(|p| {
                p.as_u64()
                    .map(|x| x as u32)
                    .ok_or_else(|| Error::Parse("points are integers".into()))
            })
            .collect()
    };
    let walls = doc
        .get("walls")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Parse("finite wallspace needs `walls`".into()))?
        .iter()
        .map(|w| {
            let pair = w
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Parse("each wall is a halfspace pair".into()))?;
            Ok([side(&pair[0])?, side(&pair[1])?])
        })
        .collect::<Result<Vec<_>>>()?;
    let ws = FiniteWallspace { points, walls };
    ws.validate()?;
    Ok(ws)
}

pub fn serialize_finite_wallspace(ws: &FiniteWallspace) -> String {
    let walls: Vec<Json> = ws
        .walls
        .iter()
        .map(|[a, b]| {
            json!([
                a.iter().copied().collect::<Vec<u32>>(),
                b.iter().copied().collect::<Vec<u32>>()
            ])
        })
        .collect();
    let doc = json!({ "points": ws.points, "walls": walls });
    format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip_is_byte_exact() {
        for x in [
            CubeComplex::bouquet(2),
            CubeComplex::cycle(6),
            CubeComplex::torus(),
            CubeComplex::grid(2, 3),
            CubeComplex::single_square(),
        ] {
            let text = serialize_complex(&x);
            let back = parse_complex(&text).unwrap();
            assert_eq!(back, x);
            assert_eq!(serialize_complex(&back), text);
        }
    }

    #[test]
    fn map_round_trip_is_byte_exact() {
        let id = CubicalMap::identity(&CubeComplex::torus());
        let text = serialize_map(&id);
        let back = parse_map(&text).unwrap();
        assert_eq!(back, id);
        assert_eq!(serialize_map(&back), text);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_complex("nonsense").is_err());
        assert!(parse_complex("ccx 2\ndim 0\ncubes 0 0\n").is_err());
        assert!(parse_complex("ccx 1\ndim 0\ncubes 0 1\n0 corners 0\n").is_err());
        assert!(parse_map("cmap 1\nsource\nccx 1\n").is_err());
    }

    #[test]
    fn presentation_files_round_trip() {
        let dir = std::env::temp_dir().join("cubical-io-test-pres");
        let x = CubeComplex::bouquet(2);
        let rel = CubicalMap::identity(&x);
        let pres = CubicalPresentation { x: x.clone(), relators: vec![rel] };
        let path = save_presentation(&dir, "t", &pres).unwrap();
        let back = load_presentation(&path).unwrap();
        assert_eq!(back.x, pres.x);
        assert_eq!(back.relators, pres.relators);
        // byte stability of the documents themselves
        let first = std::fs::read(&path).unwrap();
        save_presentation(&dir, "t", &pres).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
    }

    #[test]
    fn wallspace_files_round_trip() {
        let dir = std::env::temp_dir().join("cubical-io-test-walls");
        let c6 = CubeComplex::cycle(6);
        let (y, ws) = crate::wallspace::antipodal_walls(&c6, 10).unwrap();
        let path = save_wallspace(&dir, "c6", &y, &ws).unwrap();
        let (yback, wsback) = load_wallspace(&path).unwrap();
        assert_eq!(yback, y);
        assert_eq!(wsback, ws);
    }

    #[test]
    fn finite_wallspace_round_trip() {
        let ws = FiniteWallspace {
            points: 3,
            walls: vec![
                [BTreeSet::from([0]), BTreeSet::from([1, 2])],
                [BTreeSet::from([0, 1]), BTreeSet::from([2])],
            ],
        };
        let text = serialize_finite_wallspace(&ws);
        let dir = std::env::temp_dir().join("cubical-io-test-fws");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.json");
        std::fs::write(&path, &text).unwrap();
        let back = load_finite_wallspace(&path).unwrap();
        assert_eq!(back, ws);
        assert_eq!(serialize_finite_wallspace(&back), text);
    }
}
