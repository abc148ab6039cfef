//! Kauffman bracket state sum in the skein module of the thickened surface.
//!
//! This module traces smoothings on the raw diagram records itself, so it
//! serves as an independent check on the chain-level machinery.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul};

use rayon::prelude::*;

use crate::complex::ChainComplex;
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::homology::Homology;
use crate::state::{check_cap, Smoothing};
use crate::surface::{canonicalize, OrientedClass, UnorientedClass};

/// Integer Laurent polynomial in `A`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct LaurentPoly(BTreeMap<i64, i64>);

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn monomial(coef: i64, exp: i64) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(exp, coef);
        p
    }

    /// `-A^2 - A^-2`.
    pub fn delta() -> Self {
        &LaurentPoly::monomial(-1, 2) + &LaurentPoly::monomial(-1, -2)
    }

    pub fn add_term(&mut self, exp: i64, coef: i64) {
        let c = self.0.entry(exp).or_insert(0);
        *c += coef;
        if *c == 0 {
            self.0.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.0.iter().map(|(&e, &c)| (e, c))
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(LaurentPoly::monomial(1, 0), |acc, _| &acc * self)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().rev().map(|(e, c)| format!("A^{e}*{c}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A combination of skein basis elements, keyed by sorted multisets of essential classes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SkeinElement(pub BTreeMap<Vec<UnorientedClass>, LaurentPoly>);

impl SkeinElement {
    pub fn add(&mut self, key: Vec<UnorientedClass>, p: &LaurentPoly) {
        let e = self.0.entry(key.clone()).or_default();
        *e = &*e + p;
        if e.is_zero() {
            self.0.remove(&key);
        }
    }

    pub fn scaled(&self, p: &LaurentPoly) -> SkeinElement {
        let mut out = SkeinElement::default();
        for (k, q) in &self.0 {
            out.add(k.clone(), &(q * p));
        }
        out
    }

    pub fn sum(&self, other: &SkeinElement) -> SkeinElement {
        let mut out = self.clone();
        for (k, q) in &other.0 {
            out.add(k.clone(), q);
        }
        out
    }

    pub fn coefficient(&self, key: &[UnorientedClass]) -> LaurentPoly {
        self.0.get(key).cloned().unwrap_or_default()
    }
}

impl fmt::Display for SkeinElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, p)) in self.0.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{} : {p}", crate::complex::multiset_label(k))?;
        }
        Ok(())
    }
}

/// Circles of one smoothing, traced directly on the diagram records:
/// returns `(trivial count, sorted essential classes)`.
fn trace(d: &Diagram, smoothing: &HashMap<&str, Smoothing>) -> Result<(usize, Vec<UnorientedClass>)> {
    let rank = d.surface.h1_rank();
    let mut at: HashMap<(&str, u8), (usize, bool)> = HashMap::new();
    for (k, e) in d.edges.iter().enumerate() {
        if let (Some(a), Some(b)) = (&e.from, &e.to) {
            at.insert((a.crossing.as_str(), a.slot), (k, false));
            at.insert((b.crossing.as_str(), b.slot), (k, true));
        }
    }
    let mut seen = vec![false; d.edges.len()];
    let mut trivial = 0;
    let mut essential = Vec::new();
    for start in 0..d.edges.len() {
        if seen[start] {
            continue;
        }
        let mut class = OrientedClass::zero(rank);
        let (mut e, mut forward) = (start, true);
        loop {
            seen[e] = true;
            let edge = &d.edges[e];
            let sign = if forward { 1 } else { -1 };
            class.add_assign(&OrientedClass(edge.label.iter().map(|x| x * sign).collect()));
            let exit = if forward { &edge.to } else { &edge.from };
            let Some(exit) = exit else { break };
            let sm = smoothing[exit.crossing.as_str()];
            let (next, at_head) = at[&(exit.crossing.as_str(), sm.partner(exit.slot))];
            // Entering through the head means walking the next edge backwards.
            e = next;
            forward = !at_head;
            if e == start && forward {
                break;
            }
            if seen[e] {
                return Err(Error::Invariant("inconsistent smoothing trace".into()));
            }
        }
        d.surface.check_simple_curve(&class.0)?;
        let c = canonicalize(&class);
        if c.is_zero() {
            trivial += 1;
        } else {
            essential.push(c);
        }
    }
    essential.sort();
    Ok((trivial, essential))
}

pub fn kauffman_bracket(d: &Diagram, cap: usize) -> Result<SkeinElement> {
    d.topology()?;
    let m = d.crossings.len();
    check_cap(m, cap)?;
    let ids: Vec<&str> = d.crossings.iter().map(|c| c.id.as_str()).collect();
    let terms: Vec<(Vec<UnorientedClass>, LaurentPoly)> = (0u32..1 << m)
        .into_par_iter()
        .map(|mask| {
            let smoothing: HashMap<&str, Smoothing> = ids
                .iter()
                .enumerate()
                .map(|(k, &id)| (id, if mask >> k & 1 == 1 { Smoothing::Negative } else { Smoothing::Positive }))
                .collect();
            let (trivial, essential) = trace(d, &smoothing)?;
            let n = mask.count_ones() as i64;
            let p = m as i64 - n;
            Ok((essential, &LaurentPoly::monomial(1, p - n) * &LaurentPoly::delta().pow(trivial)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SkeinElement::default();
    for (k, p) in terms {
        out.add(k, &p);
    }
    Ok(out)
}

/// Graded Euler characteristic of a simple-theory complex, at chain level.
pub fn euler_characteristic(c: &ChainComplex<Vec<UnorientedClass>>) -> SkeinElement {
    let mut out = SkeinElement::default();
    for b in &c.blocks {
        for (&i, gens) in &b.levels {
            let sign = if ((b.j - i) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
            out.add(b.s.clone(), &LaurentPoly::monomial(sign * gens.len() as i64, b.j));
        }
    }
    out
}

/// The same Euler characteristic computed from betti numbers.
pub fn euler_from_homology(h: &Homology<Vec<UnorientedClass>>) -> SkeinElement {
    let mut out = SkeinElement::default();
    for ((s, j, i), g) in &h.groups {
        let sign = if ((j - i) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
        out.add(s.clone(), &LaurentPoly::monomial(sign * g.betti as i64, *j));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerMismatch {
    pub sector: Vec<UnorientedClass>,
    pub euler: LaurentPoly,
    pub bracket: LaurentPoly,
}

/// Sectors where the Euler characteristic and the bracket disagree.
pub fn compare_euler(euler: &SkeinElement, bracket: &SkeinElement) -> Vec<EulerMismatch> {
    let mut keys: Vec<&Vec<UnorientedClass>> = euler.0.keys().chain(bracket.0.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter_map(|k| {
            let (e, b) = (euler.coefficient(k), bracket.coefficient(k));
            (e != b).then(|| EulerMismatch { sector: k.clone(), euler: e, bracket: b })
        })
        .collect()
}

/// Removes crossing `id` by smoothing it, joining the edge ends pairwise.
/// Edges may be reversed to keep them consistently directed.
pub fn smooth_crossing(d: &Diagram, id: &str, sm: Smoothing) -> Result<Diagram> {
    d.topology()?;
    if d.crossing_index(id).is_none() {
        return Err(Error::Lookup { kind: "crossing", id: id.into() });
    }
    let mut out = d.clone();
    let find = |out: &Diagram, slot: u8| -> (usize, bool) {
        for (k, e) in out.edges.iter().enumerate() {
            if e.to.as_ref().is_some_and(|s| s.crossing == id && s.slot == slot) {
                return (k, true);
            }
            if e.from.as_ref().is_some_and(|s| s.crossing == id && s.slot == slot) {
                return (k, false);
            }
        }
        unreachable!("slot {slot} of `{id}` is attached")
    };
    for (s1, s2) in sm.arcs() {
        let (e1, head1) = find(&out, s1);
        let (e2, head2) = find(&out, s2);
        if e1 == e2 {
            out.edges[e1].from = None;
            out.edges[e1].to = None;
            continue;
        }
        if !head1 {
            reverse(&mut out.edges[e1]);
        }
        if head2 {
            reverse(&mut out.edges[e2]);
        }
        let tail = out.edges.remove(e2);
        let e1 = if e2 < e1 { e1 - 1 } else { e1 };
        let first = &mut out.edges[e1];
        first.to = tail.to;
        for (x, y) in first.label.iter_mut().zip(&tail.label) {
            *x += y;
        }
    }
    out.crossings.retain(|c| c.id != id);
    if let Some(o) = &mut out.crossing_order {
        o.retain(|c| c != id);
    }
    Ok(out)
}

fn reverse(e: &mut crate::diagram::Edge) {
    std::mem::swap(&mut e.from, &mut e.to);
    for x in e.label.iter_mut() {
        *x = -*x;
    }
}
