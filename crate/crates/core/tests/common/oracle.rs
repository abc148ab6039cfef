//! Brute-force foam rewriting, kept apart from the library's bridge tables.
//!
//! A foam is a list of connected surfaces in F×I, each recorded by its top
//! circles, bottom curves, genus, dots and orientation data. A bridge glues
//! a band onto the tops; the result is rewritten with the local relations
//! until every surface is a disk or an incompressible essential piece.

use std::collections::{BTreeMap, BTreeSet};

use thickfoam::kfoam::{KGenerator, KValue, Piece};
use thickfoam::simple::{Decoration, SimpleGenerator};
use thickfoam::state::{Cube, Resolution, Smoothing, State};
use thickfoam::surface::{OrientedClass, SurfaceSpec, UnorientedClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theory {
    Simple,
    K(KValue),
}

#[derive(Debug, Clone)]
pub struct Surf {
    /// Top circles with the sign of the boundary orientation relative to
    /// the circle's traversal. On unoriented surfaces these are one of the
    /// two admissible choices.
    pub tops: Vec<(usize, i8)>,
    pub bottoms: Vec<OrientedClass>,
    pub genus: u32,
    pub dots: u32,
    pub orientable: bool,
    /// Whether the orientation is part of the data.
    pub oriented: bool,
}

impl Surf {
    fn disk(c: usize, dots: u32) -> Surf {
        Surf { tops: vec![(c, 1)], bottoms: vec![], genus: 0, dots, orientable: true, oriented: false }
    }

    fn flip(&mut self) {
        for t in self.tops.iter_mut() {
            t.1 = -t.1;
        }
    }
}

/// Signs `s` with `sum s_i * v_i == 0`, first coordinate positive.
fn null_signs(vs: &[OrientedClass]) -> Option<Vec<i8>> {
    let n = vs.len();
    if n == 0 {
        return Some(vec![]);
    }
    let rank = vs[0].0.len();
    (0u32..1 << (n - 1)).find_map(|bits| {
        let signs: Vec<i8> = (0..n).map(|i| if i > 0 && bits >> (i - 1) & 1 == 1 { -1 } else { 1 }).collect();
        let mut sum = vec![0i64; rank];
        for (v, &s) in vs.iter().zip(&signs) {
            for (a, x) in sum.iter_mut().zip(&v.0) {
                *a += s as i64 * x;
            }
        }
        sum.iter().all(|&x| x == 0).then_some(signs)
    })
}

/// Whether disjoint essential curves cobound a connected planar subsurface
/// of F that meets no puncture.
fn cobounds(classes: &[UnorientedClass], f: SurfaceSpec) -> bool {
    if classes.len() < 2 {
        return false;
    }
    if f.canonical() == SurfaceSpec::Torus {
        return classes.len() == 2 && classes[0] == classes[1];
    }
    let masks: Vec<u64> =
        classes.iter().map(|c| c.coords().iter().enumerate().fold(0, |m, (k, &x)| if x != 0 { m | 1 << k } else { m })).collect();
    (0..masks.len()).any(|outer| {
        let mut seen = 0u64;
        for (k, &m) in masks.iter().enumerate() {
            if k == outer {
                continue;
            }
            if seen & m != 0 {
                return false;
            }
            seen |= m;
        }
        seen == masks[outer]
    })
}

pub fn k_records(g: &KGenerator, res: &Resolution) -> Vec<Surf> {
    let mut out = Vec::new();
    for (c, d) in g.disks.iter().enumerate() {
        if let Some(dot) = d {
            out.push(Surf::disk(c, u32::from(*dot)));
        }
    }
    for piece in &g.pieces {
        let signs = match &piece.orientation {
            Some(o) => o.clone(),
            None => {
                let vs: Vec<OrientedClass> = piece.tops.iter().map(|&c| res.circles[c].trav_class.clone()).collect();
                null_signs(&vs).expect("unoriented piece has a boundary orientation")
            }
        };
        out.push(Surf {
            tops: piece.tops.iter().copied().zip(signs).collect(),
            bottoms: piece.bottoms.clone(),
            genus: 0,
            dots: 0,
            orientable: true,
            oriented: piece.orientation.is_some(),
        });
    }
    out
}

/// Simple generators as foams: disks, and vertical annuli whose bottom
/// orientation is irrelevant.
pub fn simple_records(g: &SimpleGenerator, res: &Resolution) -> Vec<Surf> {
    g.decorations
        .iter()
        .enumerate()
        .map(|(c, d)| match d {
            Some(dec) => Surf::disk(c, u32::from(*dec == Decoration::X)),
            None => Surf {
                tops: vec![(c, 1)],
                bottoms: vec![res.circles[c].class.as_oriented()],
                genus: 0,
                dots: 0,
                orientable: true,
                oriented: false,
            },
        })
        .collect()
}

fn edge_sets(res: &Resolution) -> Vec<BTreeSet<usize>> {
    let mut sets = vec![BTreeSet::new(); res.circles.len()];
    for (e, &c) in res.edge_circle.iter().enumerate() {
        sets[c].insert(e);
    }
    sets
}

/// Traversal agreement of `x` in `src` with `y` in `dst` along their shared edges.
fn rel(src: &Resolution, dst: &Resolution, x: usize, y: usize) -> i8 {
    let signs: BTreeSet<i8> = (0..src.edge_circle.len())
        .filter(|&e| src.edge_circle[e] == x && dst.edge_circle[e] == y)
        .map(|e| src.edge_dir[e] * dst.edge_dir[e])
        .collect();
    assert_eq!(signs.len(), 1, "circles {x} and {y} share no consistent edge");
    *signs.iter().next().unwrap()
}

/// Rewrites one surface into a sum of products of normal surfaces.
pub fn rewrite(z: Surf, dst: &Resolution, f: SurfaceSpec, theory: Theory) -> Vec<(i64, Vec<Surf>)> {
    if !z.orientable || z.dots >= 2 {
        return vec![];
    }
    if z.genus > 0 {
        // Compress a handle: both sides of the neck carry the dot.
        let mut w = z;
        w.genus -= 1;
        w.dots += 1;
        return rewrite(w, dst, f, theory).into_iter().map(|(c, p)| (2 * c, p)).collect();
    }
    if z.tops.is_empty() && z.bottoms.is_empty() {
        return if z.dots == 1 { vec![(1, vec![])] } else { vec![] };
    }
    if let Some(pos) = z.tops.iter().position(|&(c, _)| !dst.circles[c].essential) {
        if z.tops.len() == 1 && z.bottoms.is_empty() {
            return vec![(1, vec![z])];
        }
        let (c, _) = z.tops[pos];
        let mut rest = z.clone();
        rest.tops.remove(pos);
        let mut out = Vec::new();
        for (cap, extra) in [(1, 0), (0, 1)] {
            let mut r = rest.clone();
            r.dots += extra;
            for (k, mut parts) in rewrite(r, dst, f, theory) {
                parts.push(Surf::disk(c, cap));
                out.push((k, parts));
            }
        }
        return out;
    }
    if z.dots > 0 {
        return vec![];
    }
    let mut classes: Vec<UnorientedClass> = z.tops.iter().map(|&(c, _)| dst.circles[c].class.clone()).collect();
    classes.extend(z.bottoms.iter().map(OrientedClass::unoriented));
    if !cobounds(&classes, f) {
        return vec![];
    }
    let chi = 2 - classes.len() as i64;
    match theory {
        Theory::Simple => {
            if z.tops.len() != 1 || z.bottoms.len() != 1 {
                return vec![];
            }
        }
        Theory::K(k) => {
            if !k.admits(chi) {
                return vec![];
            }
            if z.oriented {
                let mut vs: Vec<OrientedClass> =
                    z.tops.iter().map(|&(c, s)| dst.circles[c].trav_class.scaled(s as i64)).collect();
                vs.extend(z.bottoms.iter().cloned());
                let rank = f.h1_rank();
                let total = vs.iter().fold(vec![0i64; rank], |mut acc, v| {
                    for (a, x) in acc.iter_mut().zip(&v.0) {
                        *a += x;
                    }
                    acc
                });
                if total.iter().any(|&x| x != 0) {
                    return vec![];
                }
            }
        }
    }
    vec![(1, vec![z])]
}

/// Attaches the band at crossing `p` to a foam on `state` and rewrites.
pub fn bridge(cube: &Cube, state: State, foam: &[Surf], p: usize, theory: Theory) -> Vec<(i64, Vec<Surf>)> {
    if state.smoothing(p) == Smoothing::Negative {
        return vec![];
    }
    let f = cube.topology.surface;
    let src = cube.resolution(state);
    let dst = cube.resolution(state.with(p, Smoothing::Negative));
    let (old, new) = (edge_sets(src), edge_sets(dst));
    let image: Vec<Option<usize>> = old.iter().map(|s| new.iter().position(|t| t == s)).collect();
    let touched_src: Vec<usize> = (0..old.len()).filter(|&x| image[x].is_none()).collect();
    let touched_dst: Vec<usize> = (0..new.len()).filter(|&y| !image.contains(&Some(y))).collect();

    let owner = |x: usize| foam.iter().position(|s| s.tops.iter().any(|&(c, _)| c == x)).expect("circle owned");
    let sign = |x: usize| foam[owner(x)].tops.iter().find(|&&(c, _)| c == x).unwrap().1;
    // Drops the circles the band touches and renames the others.
    let moved = |s: &Surf| -> Surf {
        let mut s = s.clone();
        s.tops = s.tops.iter().filter_map(|&(x, sg)| image[x].map(|y| (y, sg * rel(src, dst, x, y)))).collect();
        s
    };

    let mut involved: Vec<usize> = touched_src.iter().map(|&x| owner(x)).collect();
    involved.dedup();
    let raw = match (touched_src.as_slice(), touched_dst.as_slice()) {
        (&[x1, x2], &[y]) => {
            let (u1, u2) = (sign(x1) * rel(src, dst, x1, y), sign(x2) * rel(src, dst, x2, y));
            if involved.len() == 1 {
                let mut z = moved(&foam[involved[0]]);
                z.tops.push((y, u1));
                if u1 == u2 {
                    z.genus += 1;
                } else {
                    z.orientable = false;
                }
                z
            } else {
                let (mut a, mut b) = (moved(&foam[owner(x1)]), moved(&foam[owner(x2)]));
                let mut u = u1;
                if u1 != u2 {
                    match (a.oriented, b.oriented) {
                        (true, true) => return vec![],
                        (_, false) => b.flip(),
                        (false, true) => {
                            a.flip();
                            u = -u;
                        }
                    }
                }
                let mut tops = a.tops;
                tops.extend(b.tops);
                tops.push((y, u));
                let mut bottoms = a.bottoms;
                bottoms.extend(b.bottoms);
                Surf {
                    tops,
                    bottoms,
                    genus: a.genus + b.genus,
                    dots: a.dots + b.dots,
                    orientable: a.orientable && b.orientable,
                    oriented: a.oriented || b.oriented,
                }
            }
        }
        (&[x], &[y1, y2]) => {
            let s = sign(x);
            let mut z = moved(&foam[involved[0]]);
            z.tops.push((y1, s * rel(src, dst, x, y1)));
            z.tops.push((y2, s * rel(src, dst, x, y2)));
            z
        }
        // The band returns to the circle it left: a Möbius band.
        ([], []) => return vec![],
        other => panic!("unexpected band {other:?}"),
    };
    let rest: Vec<Surf> = (0..foam.len()).filter(|k| !involved.contains(k)).map(|k| moved(&foam[k])).collect();
    rewrite(raw, dst, f, theory)
        .into_iter()
        .map(|(c, mut parts)| {
            parts.extend(rest.iter().cloned());
            (c, parts)
        })
        .collect()
}

pub fn to_k(state: State, circles: usize, parts: &[Surf]) -> KGenerator {
    let mut disks = vec![None; circles];
    let mut pieces = Vec::new();
    for s in parts {
        // A normal surface with one top circle and nothing else is a disk.
        if s.bottoms.is_empty() && s.tops.len() == 1 {
            disks[s.tops[0].0] = Some(s.dots == 1);
            continue;
        }
        let mut tops = s.tops.clone();
        tops.sort();
        let mut bottoms = s.bottoms.clone();
        bottoms.sort();
        pieces.push(Piece {
            tops: tops.iter().map(|&(c, _)| c).collect(),
            bottoms,
            orientation: s.oriented.then(|| tops.iter().map(|&(_, x)| x).collect()),
        });
    }
    pieces.sort();
    KGenerator { state, disks, pieces }
}

pub fn to_simple(state: State, circles: usize, parts: &[Surf]) -> SimpleGenerator {
    let mut decorations = vec![None; circles];
    for s in parts {
        if s.bottoms.is_empty() {
            decorations[s.tops[0].0] = Some(if s.dots == 1 { Decoration::X } else { Decoration::One });
        }
    }
    SimpleGenerator { state, decorations }
}

/// Sums a combination, dropping zero coefficients.
pub fn collect<G: Ord>(terms: impl IntoIterator<Item = (i64, G)>) -> BTreeMap<G, i64> {
    let mut m = BTreeMap::new();
    for (c, g) in terms {
        *m.entry(g).or_insert(0) += c;
    }
    m.retain(|_, c| *c != 0);
    m
}

pub fn k_bridge(cube: &Cube, g: &KGenerator, p: usize, k: KValue) -> BTreeMap<KGenerator, i64> {
    let foam = k_records(g, cube.resolution(g.state));
    let target = g.state.with(p, Smoothing::Negative);
    let n = cube.resolution(target).circles.len();
    collect(bridge(cube, g.state, &foam, p, Theory::K(k)).into_iter().map(|(c, parts)| (c, to_k(target, n, &parts))))
}

pub fn simple_bridge(cube: &Cube, g: &SimpleGenerator, p: usize) -> BTreeMap<SimpleGenerator, i64> {
    let foam = simple_records(g, cube.resolution(g.state));
    let target = g.state.with(p, Smoothing::Negative);
    let n = cube.resolution(target).circles.len();
    collect(bridge(cube, g.state, &foam, p, Theory::Simple).into_iter().map(|(c, parts)| (c, to_simple(target, n, &parts))))
}
