//! Reidemeister moves on surface link diagrams.
//!
//! New crossings are appended to the end of the sign order. Edge labels
//! stay on the original edge ids; newly created segments carry zero labels,
//! so the total class of every strand is unchanged.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::diagram::{face_walk, faces, validate, Crossing, Diagram, Edge, Side, SlotRef};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistSign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

/// Where the bigon of a second move is formed: the new bigon lies on
/// `a_side` of edge `a` and on `b_side` of edge `b`. Edge `a` passes over `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct R2Sides {
    pub a_side: Side,
    pub b_side: Side,
}

impl Default for R2Sides {
    fn default() -> Self {
        R2Sides { a_side: Side::Left, b_side: Side::Right }
    }
}

/// A move with its arguments, as stored in corpus manifests and on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "lowercase")]
pub enum Move {
    R1 { edge: String, sign: TwistSign },
    R2 { a: String, b: String, #[serde(default = "left")] a_side: Side, #[serde(default = "right")] b_side: Side },
    R3 { crossings: [String; 3] },
}

fn left() -> Side {
    Side::Left
}

fn right() -> Side {
    Side::Right
}

impl Move {
    pub fn apply(&self, d: &Diagram) -> Result<Diagram> {
        match self {
            Move::R1 { edge, sign } => apply_r1(d, edge, *sign),
            Move::R2 { a, b, a_side, b_side } => apply_r2(d, a, b, R2Sides { a_side: *a_side, b_side: *b_side }),
            Move::R3 { crossings } => apply_r3(d, crossings),
        }
    }
}

fn require_valid(d: &Diagram) -> Result<()> {
    d.topology().map(|_| ())
}

fn push_crossing(d: &mut Diagram) -> String {
    let id = d.fresh_crossing_id();
    d.crossings.push(Crossing { id: id.clone() });
    if let Some(order) = &mut d.crossing_order {
        order.push(id.clone());
    }
    id
}

fn push_edge(d: &mut Diagram, from: SlotRef, to: SlotRef) -> String {
    let id = d.fresh_edge_id();
    let rank = d.surface.h1_rank();
    d.edges.push(Edge { id: id.clone(), from: Some(from), to: Some(to), label: vec![0; rank] });
    id
}

/// Adds a kink at the end of `edge`. In a positive kink the positive
/// smoothing splits off the small loop; in a negative kink the negative one does.
pub fn apply_r1(d: &Diagram, edge: &str, sign: TwistSign) -> Result<Diagram> {
    require_valid(d)?;
    let e = d.edge_index(edge).ok_or_else(|| Error::Lookup { kind: "edge", id: edge.into() })?;
    let mut out = d.clone();
    let c = push_crossing(&mut out);
    let (loop_from, loop_to, exit) = match sign {
        TwistSign::Positive => (2, 3, 1),
        TwistSign::Negative => (2, 1, 3),
    };
    let old_to = out.edges[e].to.clone();
    out.edges[e].to = Some(SlotRef::new(&c, 0));
    push_edge(&mut out, SlotRef::new(&c, loop_from), SlotRef::new(&c, loop_to));
    match old_to {
        Some(y) => {
            push_edge(&mut out, SlotRef::new(&c, exit), y);
        }
        None => out.edges[e].from = Some(SlotRef::new(&c, exit)),
    }
    Ok(out)
}

/// Splits edge `e` into three segments through the given (entry, exit)
/// slot pairs; the original id keeps the first segment and the label.
fn thread(out: &mut Diagram, e: usize, first: (SlotRef, SlotRef), second: (SlotRef, SlotRef)) {
    let old_to = out.edges[e].to.clone();
    let closed = old_to.is_none();
    out.edges[e].to = Some(first.0);
    push_edge(out, first.1, second.0);
    if closed {
        out.edges[e].from = Some(second.1);
    } else {
        push_edge(out, second.1, old_to.unwrap());
    }
}

/// Pushes a finger of edge `a` over edge `b`, creating a bigon.
pub fn apply_r2(d: &Diagram, a: &str, b: &str, sides: R2Sides) -> Result<Diagram> {
    require_valid(d)?;
    let ea = d.edge_index(a).ok_or_else(|| Error::Lookup { kind: "edge", id: a.into() })?;
    let eb = d.edge_index(b).ok_or_else(|| Error::Lookup { kind: "edge", id: b.into() })?;
    if ea == eb {
        return Err(Error::MoveNotApplicable("a second move needs two distinct edges".into()));
    }
    let t = d.topology()?;
    if t.ends[ea].is_some() && t.ends[eb].is_some() && !face_walk(&t, ea, sides.a_side).contains(&(eb, sides.b_side)) {
        return Err(Error::MoveNotApplicable(format!(
            "edges `{a}` and `{b}` do not share a face on the requested sides"
        )));
    }
    let mut out = d.clone();
    let c1 = push_crossing(&mut out);
    let c2 = push_crossing(&mut out);
    let s = |c: &str, k: u8| SlotRef::new(c, k);
    // Over-strand `a` uses slots 1 and 3 at both crossings.
    let (a_first, a_second) = match sides.a_side {
        Side::Left => ((s(&c1, 1), s(&c1, 3)), (s(&c2, 3), s(&c2, 1))),
        Side::Right => ((s(&c1, 3), s(&c1, 1)), (s(&c2, 1), s(&c2, 3))),
    };
    let parallel = sides.a_side != sides.b_side;
    let (b_first, b_second) = if parallel {
        ((s(&c1, 0), s(&c1, 2)), (s(&c2, 0), s(&c2, 2)))
    } else {
        ((s(&c2, 2), s(&c2, 0)), (s(&c1, 2), s(&c1, 0)))
    };
    thread(&mut out, ea, a_first, a_second);
    thread(&mut out, eb, b_first, b_second);
    Ok(out)
}

/// Slides a strand across the crossing of the other two strands of a triangular face.
pub fn apply_r3(d: &Diagram, triangle: &[String; 3]) -> Result<Diagram> {
    require_valid(d)?;
    let t = d.topology()?;
    let mut ids = [0usize; 3];
    for (k, id) in triangle.iter().enumerate() {
        ids[k] = d.crossing_index(id).ok_or_else(|| Error::Lookup { kind: "crossing", id: id.clone() })?;
    }
    if ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2] {
        return Err(Error::MoveNotApplicable("a third move needs three distinct crossings".into()));
    }
    let in_triangle = |c: usize| ids.contains(&c);
    let face = faces(&t).into_iter().find(|w| {
        if w.len() != 3 {
            return false;
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for &(e, _) in w {
            let Some(((tc, _), (hc, _))) = t.ends[e] else { return false };
            if tc == hc || !in_triangle(tc) || !in_triangle(hc) {
                return false;
            }
            pairs.push((tc.min(hc), tc.max(hc)));
        }
        pairs.sort();
        pairs.dedup();
        pairs.len() == 3
    });
    let Some(face) = face else {
        return Err(Error::MoveNotApplicable("the crossings do not bound a triangular face".into()));
    };
    let tri: Vec<usize> = face.iter().map(|&(e, _)| e).collect();

    // Each triangle edge is a piece of one strand; that strand is over at a
    // crossing when it occupies slots 1 and 3.
    let mut over_both = false;
    let mut under_both = false;
    let mut used_slots: HashMap<usize, Vec<u8>> = HashMap::new();
    for &e in &tri {
        let ((tc, ts), (hc, hs)) = t.ends[e].unwrap();
        let (o1, o2) = (ts % 2 == 1, hs % 2 == 1);
        over_both |= o1 && o2;
        under_both |= !o1 && !o2;
        used_slots.entry(tc).or_default().push(ts);
        used_slots.entry(hc).or_default().push(hs);
    }
    for slots in used_slots.values() {
        if slots.len() != 2 || (slots[0] + 2) % 4 == slots[1] {
            return Err(Error::MoveNotApplicable("triangle sides must lie on different strands".into()));
        }
    }
    if !(over_both && under_both) {
        return Err(Error::MoveNotApplicable("the over/under pattern around the triangle is cyclic".into()));
    }

    let cid = |c: usize| d.crossings[c].id.clone();
    // External edge ends move to the far crossing; triangle edges flip to the outer slots.
    let mut relocate: HashMap<(usize, u8), (usize, u8)> = HashMap::new();
    for &e in &tri {
        let ((tc, ts), (hc, hs)) = t.ends[e].unwrap();
        relocate.insert((tc, (ts + 2) % 4), (hc, hs));
        relocate.insert((hc, (hs + 2) % 4), (tc, ts));
    }
    let mut out = d.clone();
    for (k, edge) in out.edges.iter_mut().enumerate() {
        let Some(((tc, ts), (hc, hs))) = t.ends[k] else { continue };
        if tri.contains(&k) {
            edge.from = Some(SlotRef::new(cid(hc), (hs + 2) % 4));
            edge.to = Some(SlotRef::new(cid(tc), (ts + 2) % 4));
            continue;
        }
        if let Some(&(c, sl)) = relocate.get(&(tc, ts)) {
            edge.from = Some(SlotRef::new(cid(c), sl));
        }
        if let Some(&(c, sl)) = relocate.get(&(hc, hs)) {
            edge.to = Some(SlotRef::new(cid(c), sl));
        }
    }
    if !validate(&out).is_valid() {
        return Err(Error::Invariant("third move produced an invalid diagram".into()));
    }
    Ok(out)
}
