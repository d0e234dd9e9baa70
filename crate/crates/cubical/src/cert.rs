//! Certificates: the universal output of every checker.
//!
//! A certificate is pass, fail with a structured witness, or inconclusive
//! with the exhausted resource bound, plus a named numeric report. All
//! numerics are exact (integers or rationals); reports render to stable,
//! diff-friendly text.

use num_rational::Rational64;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "pass"),
            Status::Fail => write!(f, "fail"),
            Status::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// A cell reference `(dimension, id)`.
pub type CellRef = (usize, u32);

/// Structured witness payloads, re-checkable by independent predicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A vertex whose link violates a condition, with the offending
    /// link simplices given by their defining (cube, corner) pairs.
    LinkViolation {
        vertex: u32,
        simplices: Vec<(usize, u32, u32)>,
    },
    /// A hyperplane index into the ambient complex's hyperplane list.
    Hyperplane(usize),
    /// A vertex together with a pair of edge-ends at it.
    EdgePair { vertex: u32, ends: [(u32, u8); 2] },
    /// A closed edge path, as (edge id, end entered) pairs in the base.
    Loop(Vec<(u32, u8)>),
    /// An offending piece: hosts, kind and measured diameter.
    Piece {
        kind: String,
        host: usize,
        other: String,
        diameter: u64,
    },
    /// A named inequality that failed, with its two exact sides.
    Inequality {
        name: String,
        lhs: Rational64,
        rhs: Rational64,
    },
    /// A wall index that fails separation or disjointness.
    Wall(usize),
    /// Free-form location data for anything else.
    Cells(Vec<CellRef>),
    Text(String),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::LinkViolation { vertex, simplices } => {
                write!(f, "vertex {vertex}, simplices {simplices:?}")
            }
            Witness::Hyperplane(h) => write!(f, "hyperplane {h}"),
            Witness::EdgePair { vertex, ends } => {
                write!(f, "vertex {vertex}, ends {ends:?}")
            }
            Witness::Loop(path) => write!(f, "loop {path:?}"),
            Witness::Piece {
                kind,
                host,
                other,
                diameter,
            } => write!(f, "{kind} piece in relator {host} vs {other}, diameter {diameter}"),
            Witness::Inequality { name, lhs, rhs } => {
                write!(f, "{name}: {} vs {}", ratio(lhs), ratio(rhs))
            }
            Witness::Wall(w) => write!(f, "wall {w}"),
            Witness::Cells(cells) => write!(f, "cells {cells:?}"),
            Witness::Text(t) => write!(f, "{t}"),
        }
    }
}

/// A named scalar in a report. Exact values only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Ratio(Rational64),
    Text(String),
}

fn ratio(r: &Rational64) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Ratio(r) => write!(f, "{}", ratio(r)),
            Value::Text(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub check: String,
    pub status: Status,
    pub witness: Option<Witness>,
    /// Exhausted resource bound, present on inconclusive results.
    pub bound: Option<u64>,
    pub report: Vec<(String, Value)>,
    /// Sub-certificates of composite checks (e.g. the B(6) items).
    pub parts: Vec<Certificate>,
}

impl Certificate {
    pub fn pass(check: &str) -> Self {
        Certificate {
            check: check.to_string(),
            status: Status::Pass,
            witness: None,
            bound: None,
            report: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn fail(check: &str, witness: Witness) -> Self {
        Certificate {
            check: check.to_string(),
            status: Status::Fail,
            witness: Some(witness),
            bound: None,
            report: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn inconclusive(check: &str, bound: u64) -> Self {
        Certificate {
            check: check.to_string(),
            status: Status::Inconclusive,
            witness: None,
            bound: Some(bound),
            report: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.report.push((key.to_string(), value));
        self
    }

    pub fn with_int(self, key: &str, n: i64) -> Self {
        self.with(key, Value::Int(n))
    }

    pub fn with_ratio(self, key: &str, r: Rational64) -> Self {
        self.with(key, Value::Ratio(r))
    }

    pub fn with_text(self, key: &str, t: &str) -> Self {
        self.with(key, Value::Text(t.to_string()))
    }

    pub fn push(&mut self, key: &str, value: Value) {
        self.report.push((key.to_string(), value));
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    /// Process exit code contract: 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    fn render(&self, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        out.push_str(&format!("{pad}check: {}\n", self.check));
        out.push_str(&format!("{pad}status: {}\n", self.status));
        if let Some(w) = &self.witness {
            out.push_str(&format!("{pad}witness: {w}\n"));
        }
        if let Some(b) = self.bound {
            out.push_str(&format!("{pad}bound: {b}\n"));
        }
        for (k, v) in &self.report {
            out.push_str(&format!("{pad}  {k}: {v}\n"));
        }
        for part in &self.parts {
            part.render(indent + 1, out);
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.render(0, &mut out);
        write!(f, "{}", out.trim_end_matches('\n'))
    }
}

/// Renders a rational as `p/q` (or `p` for integers).
pub fn display_ratio(r: Rational64) -> String {
    ratio(&r)
}
