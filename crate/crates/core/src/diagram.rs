//! Combinatorial surface link diagrams.
//!
//! A crossing has four slots in counterclockwise order; slots 0 and 2 carry
//! the under-strand. Each directed edge joins two slots (or none, for a
//! crossingless loop) and carries the homology label it contributes when
//! traversed forward. Labels are the signed intersection numbers of the
//! edge with a fixed system of cut arcs dual to the first-homology basis.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{OrientedClass, SurfaceSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRef {
    pub crossing: String,
    pub slot: u8,
}

impl SlotRef {
    pub fn new(crossing: impl Into<String>, slot: u8) -> Self {
        SlotRef { crossing: crossing.into(), slot }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub from: Option<SlotRef>,
    pub to: Option<SlotRef>,
    pub label: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub surface: SurfaceSpec,
    pub crossings: Vec<Crossing>,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossing_order: Option<Vec<String>>,
}

/// Which end of an edge sits at a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    Tail,
    Head,
}

/// Side of a directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Resolved integer indices for a structurally valid diagram.
#[derive(Debug, Clone)]
pub struct Topology {
    pub surface: SurfaceSpec,
    pub n_crossings: usize,
    /// `slots[c][s]` = edge end attached at slot `s` of crossing `c`.
    pub slots: Vec<[(usize, End); 4]>,
    /// `(tail, head)` slot positions per edge; `None` for crossingless loops.
    pub ends: Vec<Option<((usize, u8), (usize, u8))>>,
    pub labels: Vec<OrientedClass>,
    /// Position of each crossing in the sign ordering.
    pub order_rank: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    DuplicateId,
    UnknownCrossing,
    SlotOutOfRange,
    SlotReuse,
    DanglingSlot,
    HalfOpenEdge,
    LabelLength,
    CrossingOrder,
    /// Advisory only: a link strand whose total class is not that of a simple curve.
    StrandClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub kind: IssueKind,
    pub message: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.iter().all(|i| i.kind == IssueKind::StrandClass)
    }

    pub fn has(&self, kind: IssueKind) -> bool {
        self.issues.iter().any(|i| i.kind == kind)
    }

    fn push(&mut self, kind: IssueKind, message: String) {
        self.issues.push(Issue { kind, message });
    }
}

impl Diagram {
    pub fn from_json(text: &str) -> Result<Diagram> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("diagram serializes");
        s.push('\n');
        s
    }

    pub fn crossing_index(&self, id: &str) -> Option<usize> {
        self.crossings.iter().position(|c| c.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Crossing ids in sign order.
    pub fn ordered_crossings(&self) -> Vec<String> {
        match &self.crossing_order {
            Some(o) => o.clone(),
            None => self.crossings.iter().map(|c| c.id.clone()).collect(),
        }
    }

    pub fn fresh_edge_id(&self) -> String {
        fresh_id("e", self.edges.iter().map(|e| e.id.as_str()))
    }

    pub fn fresh_crossing_id(&self) -> String {
        fresh_id("c", self.crossings.iter().map(|c| c.id.as_str()))
    }

    pub fn topology(&self) -> Result<Topology> {
        let report = validate(self);
        if let Some(issue) = report.issues.iter().find(|i| i.kind != IssueKind::StrandClass) {
            return Err(Error::InvalidDiagram(issue.message.clone()));
        }
        Ok(self.topology_unchecked())
    }

    fn topology_unchecked(&self) -> Topology {
        let index: HashMap<&str, usize> =
            self.crossings.iter().enumerate().map(|(k, c)| (c.id.as_str(), k)).collect();
        let mut slots = vec![[(usize::MAX, End::Tail); 4]; self.crossings.len()];
        let mut ends = Vec::with_capacity(self.edges.len());
        for (e, edge) in self.edges.iter().enumerate() {
            match (&edge.from, &edge.to) {
                (Some(f), Some(t)) => {
                    let tail = (index[f.crossing.as_str()], f.slot);
                    let head = (index[t.crossing.as_str()], t.slot);
                    slots[tail.0][tail.1 as usize] = (e, End::Tail);
                    slots[head.0][head.1 as usize] = (e, End::Head);
                    ends.push(Some((tail, head)));
                }
                _ => ends.push(None),
            }
        }
        let mut order_rank = vec![0; self.crossings.len()];
        for (r, id) in self.ordered_crossings().iter().enumerate() {
            order_rank[index[id.as_str()]] = r;
        }
        Topology {
            surface: self.surface,
            n_crossings: self.crossings.len(),
            slots,
            ends,
            labels: self.edges.iter().map(|e| OrientedClass(e.label.clone())).collect(),
            order_rank,
        }
    }
}

fn fresh_id<'a>(prefix: &str, used: impl Iterator<Item = &'a str>) -> String {
    let used: HashSet<&str> = used.collect();
    (0..).map(|k| format!("{prefix}{k}")).find(|id| !used.contains(id.as_str())).unwrap()
}

/// Local-consistency check. Label data is trusted to be realizable.
pub fn validate(d: &Diagram) -> ValidationReport {
    let mut r = ValidationReport::default();
    let rank = d.surface.h1_rank();

    let mut index = HashMap::new();
    for (k, c) in d.crossings.iter().enumerate() {
        if index.insert(c.id.as_str(), k).is_some() {
            r.push(IssueKind::DuplicateId, format!("crossing id `{}` is repeated", c.id));
        }
    }
    let mut edge_ids = HashSet::new();
    let mut used: HashMap<(usize, u8), &str> = HashMap::new();
    for edge in &d.edges {
        if !edge_ids.insert(edge.id.as_str()) {
            r.push(IssueKind::DuplicateId, format!("edge id `{}` is repeated", edge.id));
        }
        if edge.label.len() != rank {
            r.push(
                IssueKind::LabelLength,
                format!("edge `{}` has label of length {}, surface rank is {rank}", edge.id, edge.label.len()),
            );
        }
        match (&edge.from, &edge.to) {
            (None, None) => {}
            (Some(_), None) | (None, Some(_)) => {
                r.push(IssueKind::HalfOpenEdge, format!("edge `{}` has exactly one endpoint", edge.id))
            }
            (Some(a), Some(b)) => {
                for s in [a, b] {
                    let Some(&c) = index.get(s.crossing.as_str()) else {
                        r.push(
                            IssueKind::UnknownCrossing,
                            format!("edge `{}` references unknown crossing `{}`", edge.id, s.crossing),
                        );
                        continue;
                    };
                    if s.slot > 3 {
                        r.push(
                            IssueKind::SlotOutOfRange,
                            format!("edge `{}` uses slot {} of `{}`", edge.id, s.slot, s.crossing),
                        );
                        continue;
                    }
                    if let Some(prev) = used.insert((c, s.slot), edge.id.as_str()) {
                        r.push(
                            IssueKind::SlotReuse,
                            format!(
                                "slot {} of crossing `{}` is used by `{prev}` and `{}`",
                                s.slot, s.crossing, edge.id
                            ),
                        );
                    }
                }
            }
        }
    }
    for (k, c) in d.crossings.iter().enumerate() {
        for s in 0..4u8 {
            if !used.contains_key(&(k, s)) {
                r.push(IssueKind::DanglingSlot, format!("slot {s} of crossing `{}` is unused", c.id));
            }
        }
    }
    if let Some(order) = &d.crossing_order {
        let set: HashSet<&str> = order.iter().map(String::as_str).collect();
        let ok = order.len() == d.crossings.len()
            && set.len() == order.len()
            && order.iter().all(|id| index.contains_key(id.as_str()));
        if !ok {
            r.push(IssueKind::CrossingOrder, "crossing_order is not a permutation of the crossings".into());
        }
    }

    if r.is_valid() && d.surface.is_planar() {
        let topo = d.topology_unchecked();
        for strand in strands(&topo) {
            let class = strand_class(&topo, &strand);
            if d.surface.check_simple_curve(&class.0).is_err() {
                r.push(
                    IssueKind::StrandClass,
                    format!("strand through edge `{}` has class {class}", d.edges[strand[0].0].id),
                );
            }
        }
    }
    r
}

/// Link components as cyclic lists of `(edge, direction)`; the strand passes
/// straight through each crossing (slot `s` to slot `s + 2`).
pub fn strands(t: &Topology) -> Vec<Vec<(usize, i8)>> {
    let n = t.labels.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut strand = Vec::new();
        let (mut e, mut dir) = (start, 1i8);
        loop {
            seen[e] = true;
            strand.push((e, dir));
            let Some((tail, head)) = t.ends[e] else { break };
            let (c, s) = if dir > 0 { head } else { tail };
            let (f, end) = t.slots[c][((s + 2) % 4) as usize];
            dir = if end == End::Tail { 1 } else { -1 };
            e = f;
            if e == start && dir == 1 {
                break;
            }
            if seen[e] && strand.iter().any(|&(x, _)| x == e) {
                break;
            }
        }
        out.push(strand);
    }
    out
}

pub fn strand_class(t: &Topology, strand: &[(usize, i8)]) -> OrientedClass {
    let mut c = OrientedClass::zero(t.surface.h1_rank());
    for &(e, dir) in strand {
        c.add_assign(&t.labels[e].scaled(dir as i64));
    }
    c
}

/// The boundary walk of the face lying on `side` of `edge`, as
/// `(edge, side)` pairs. A crossingless loop bounds its own two faces.
pub fn face_walk(t: &Topology, edge: usize, side: Side) -> Vec<(usize, Side)> {
    let mut walk = Vec::new();
    let (mut e, mut s) = (edge, side);
    loop {
        walk.push((e, s));
        let Some((tail, head)) = t.ends[e] else { break };
        // The face is on the left of the direction of travel.
        let (c, slot) = if s == Side::Left { head } else { tail };
        let (f, end) = t.slots[c][((slot + 3) % 4) as usize];
        s = if end == End::Tail { Side::Left } else { Side::Right };
        e = f;
        if (e, s) == (edge, side) {
            break;
        }
    }
    walk
}

/// All faces of the diagram's ribbon structure, each listed once.
pub fn faces(t: &Topology) -> Vec<Vec<(usize, Side)>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for e in 0..t.labels.len() {
        for side in [Side::Left, Side::Right] {
            if seen.contains(&(e, side)) {
                continue;
            }
            let w = face_walk(t, e, side);
            seen.extend(w.iter().copied());
            out.push(w);
        }
    }
    out
}
