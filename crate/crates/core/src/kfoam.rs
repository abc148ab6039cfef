//! The k-theories, one for each `k` in `{0, 1, 2, ...} ∪ {∞}`.
//!
//! Generators are F-oriented foams in normal form: every trivial top circle
//! is capped by a disk carrying at most one dot, and the remaining essential
//! curves (top circles and oriented bottom curves) are grouped into
//! incompressible genus-0 pieces: vertical annuli, turnback annuli with
//! both ends on top, floating annuli with both ends on the bottom, and
//! vertical pants-like pieces. A piece with `n` boundary curves has Euler
//! characteristic `2 - n` and must be parallel to a subsurface of the base.
//!
//! Orientation of a top circle is stored as a sign relative to the
//! circle's traversal direction. Bottom curves carry their oriented class.
//! All orientations are boundary orientations of the piece, so on an
//! oriented piece the classes of all boundary curves sum to zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simple::{Combination, Gradings};
use crate::state::{Cube, Resolution, Saddle, Smoothing, State};
use crate::surface::{OrientedClass, SurfaceSpec, UnorientedClass};

/// `None` is `k = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KValue(pub Option<u32>);

impl KValue {
    pub const INFINITY: KValue = KValue(None);

    pub fn finite(k: u32) -> KValue {
        KValue(Some(k))
    }

    /// Whether a connected incompressible piece of Euler characteristic `chi` survives.
    pub fn admits(self, chi: i64) -> bool {
        self.0.is_none_or(|k| chi >= -(k as i64))
    }
}

impl fmt::Display for KValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(k) => write!(f, "{k}"),
            None => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for KValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(KValue::INFINITY),
            _ => s.parse::<u32>().map(KValue::finite).map_err(|_| Error::Parse(format!("bad k value `{s}`"))),
        }
    }
}

/// Which orientation states of pieces without bottom curves are generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrientationVariants {
    /// Unoriented and both oriented states.
    #[default]
    All,
    /// Only the unoriented state; the differential never leaves this span.
    Reachable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KConfig {
    pub k: KValue,
    pub variants: OrientationVariants,
}

impl KConfig {
    pub fn new(k: KValue) -> Self {
        KConfig { k, variants: OrientationVariants::All }
    }
}

/// Bottom boundary data: a sorted multiset of oriented classes, each
/// `±` the positive orientation of its class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Sector(pub Vec<OrientedClass>);

impl Sector {
    pub fn new(mut v: Vec<OrientedClass>) -> Self {
        v.sort();
        Sector(v)
    }

    pub fn negated(&self) -> Sector {
        Sector::new(self.0.iter().map(OrientedClass::neg).collect())
    }

    /// The formal sum `Σ k_i γ_i`, parallel curves collected.
    pub fn k_value(&self) -> BTreeMap<UnorientedClass, i64> {
        let mut m = BTreeMap::new();
        for c in &self.0 {
            *m.entry(c.unoriented()).or_insert(0) += c.sign();
        }
        m
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            let sign = if c.sign() < 0 { '-' } else { '+' };
            write!(f, "{sign}{}", c.unoriented())?;
        }
        write!(f, "]")
    }
}

/// An incompressible genus-0 piece with only essential boundary curves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Piece {
    /// Top circles of the state, sorted.
    pub tops: Vec<usize>,
    pub bottoms: Vec<OrientedClass>,
    /// Traversal-relative sign of each top circle; `None` when unoriented,
    /// which is only possible without bottom curves.
    pub orientation: Option<Vec<i8>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PieceKind {
    VerticalAnnulus,
    TopTurnback,
    BottomAnnulus,
    VerticalTree,
}

impl Piece {
    pub fn boundary_count(&self) -> usize {
        self.tops.len() + self.bottoms.len()
    }

    pub fn chi(&self) -> i64 {
        2 - self.boundary_count() as i64
    }

    pub fn kind(&self) -> PieceKind {
        match (self.tops.len(), self.bottoms.len()) {
            (1, 1) => PieceKind::VerticalAnnulus,
            (2, 0) => PieceKind::TopTurnback,
            (0, 2) => PieceKind::BottomAnnulus,
            _ => PieceKind::VerticalTree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KGenerator {
    pub state: State,
    /// Per circle: `Some(dotted)` for the disk on a trivial circle.
    pub disks: Vec<Option<bool>>,
    pub pieces: Vec<Piece>,
}

impl KGenerator {
    pub fn dots(&self) -> i64 {
        self.disks.iter().filter(|d| **d == Some(true)).count() as i64
    }

    pub fn chi(&self) -> i64 {
        self.disks.iter().filter(|d| d.is_some()).count() as i64 + self.pieces.iter().map(Piece::chi).sum::<i64>()
    }

    pub fn sector(&self) -> Sector {
        Sector::new(self.pieces.iter().flat_map(|p| p.bottoms.iter().cloned()).collect())
    }

    pub fn gradings(&self) -> Gradings<Sector> {
        let i = self.state.i();
        Gradings { i, j: i + 2 * (2 * self.dots() - self.chi()), s: self.sector() }
    }
}

/// Decides whether essential curves cobound an incompressible genus-0
/// piece, returning the reference boundary orientation of each curve
/// (`+1` for the outer curve, `-1` for the inner ones) when they do.
pub fn region_shape(curves: &[UnorientedClass], f: SurfaceSpec) -> Result<Option<Vec<i8>>> {
    for c in curves {
        if !crate::surface::is_essential(c, f)? {
            return Err(Error::Domain(format!("class {c} is inessential")));
        }
    }
    if curves.len() < 2 {
        return Ok(None);
    }
    match f.canonical() {
        SurfaceSpec::Torus => {
            if curves.len() == 2 && curves[0] == curves[1] {
                Ok(Some(vec![1, -1]))
            } else {
                Ok(None)
            }
        }
        _ => {
            let rank = f.h1_rank();
            for outer in 0..curves.len() {
                let mut sum = vec![0i64; rank];
                for (k, c) in curves.iter().enumerate() {
                    if k != outer {
                        for (s, x) in sum.iter_mut().zip(c.coords()) {
                            *s += x;
                        }
                    }
                }
                if sum == curves[outer].coords() {
                    return Ok(Some((0..curves.len()).map(|k| if k == outer { 1 } else { -1 }).collect()));
                }
            }
            Ok(None)
        }
    }
}

pub fn region_valid(curves: &[UnorientedClass], f: SurfaceSpec) -> Result<bool> {
    Ok(region_shape(curves, f)?.is_some())
}

/// Largest number of boundary curves an incompressible piece can have.
fn max_piece_size(f: SurfaceSpec, k: KValue) -> usize {
    let geometric = match f.canonical() {
        SurfaceSpec::Torus => 2,
        _ => f.h1_rank() + 1,
    };
    match k.0 {
        Some(k) => geometric.min(k as usize + 2),
        None => geometric,
    }
}

/// Sectors worth computing for a diagram: every orientation assignment to
/// the essential circles of every state.
pub fn natural_sectors(cube: &Cube) -> Vec<Sector> {
    let mut out = BTreeSet::new();
    for res in &cube.resolutions {
        let classes = res.essential_classes();
        for bits in 0u32..1 << classes.len() {
            let v = classes
                .iter()
                .enumerate()
                .map(|(b, c)| {
                    let o = c.as_oriented();
                    if bits >> b & 1 == 1 {
                        o.neg()
                    } else {
                        o
                    }
                })
                .collect();
            out.insert(Sector::new(v));
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Item {
    Top(usize),
    Bottom(usize),
}

/// All generators of `state` in `sector`.
pub fn enumerate_k(cube: &Cube, state: State, sector: &Sector, cfg: KConfig) -> Result<Vec<KGenerator>> {
    let f = cube.topology.surface;
    let res = cube.resolution(state);
    let mut items: Vec<Item> = (0..res.circles.len()).filter(|&c| res.circles[c].essential).map(Item::Top).collect();
    items.extend((0..sector.0.len()).map(Item::Bottom));
    let class_of = |it: Item| match it {
        Item::Top(c) => res.circles[c].class.clone(),
        Item::Bottom(b) => sector.0[b].unoriented(),
    };

    // Candidate pieces as bitmasks over `items`.
    let n = items.len();
    let maxsize = max_piece_size(f, cfg.k);
    let mut groups: Vec<(u32, Piece)> = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size < 2 || size > maxsize {
            continue;
        }
        let members: Vec<Item> = (0..n).filter(|&b| mask >> b & 1 == 1).map(|b| items[b]).collect();
        let tops: Vec<usize> = members.iter().filter_map(|it| if let Item::Top(c) = it { Some(*c) } else { None }).collect();
        let bottoms: Vec<usize> =
            members.iter().filter_map(|it| if let Item::Bottom(b) = it { Some(*b) } else { None }).collect();
        if tops.is_empty() && size > 2 {
            continue;
        }
        let classes: Vec<UnorientedClass> = members.iter().map(|&it| class_of(it)).collect();
        let Some(shape) = region_shape(&classes, f)? else { continue };
        let top_sign = |eps: i8| -> Vec<i8> {
            members
                .iter()
                .zip(&shape)
                .filter_map(|(it, &r)| match it {
                    Item::Top(c) => Some(eps * r * res.circles[*c].trav_class.sign() as i8),
                    Item::Bottom(_) => None,
                })
                .collect()
        };
        let bottom_classes: Vec<OrientedClass> = bottoms.iter().map(|&b| sector.0[b].clone()).collect();
        let mut sorted_bottoms = bottom_classes.clone();
        sorted_bottoms.sort();
        if bottoms.is_empty() {
            groups.push((mask, Piece { tops: tops.clone(), bottoms: vec![], orientation: None }));
            if cfg.variants == OrientationVariants::All {
                for eps in [1, -1] {
                    groups.push((mask, Piece { tops: tops.clone(), bottoms: vec![], orientation: Some(top_sign(eps)) }));
                }
            }
        } else {
            // Every bottom curve must carry the boundary orientation for one global sign.
            let eps_of = |it_pos: usize| -> i8 {
                let Item::Bottom(b) = members[it_pos] else { unreachable!() };
                (sector.0[b].sign() as i8) * shape[it_pos]
            };
            let positions: Vec<usize> = (0..members.len()).filter(|&k| matches!(members[k], Item::Bottom(_))).collect();
            let eps = eps_of(positions[0]);
            if positions.iter().all(|&k| eps_of(k) == eps) {
                groups.push((mask, Piece { tops: tops.clone(), bottoms: sorted_bottoms, orientation: Some(top_sign(eps)) }));
            }
        }
    }

    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut partitions: Vec<Vec<Piece>> = Vec::new();
    let mut stack: Vec<Piece> = Vec::new();
    cover(0, full, &groups, &mut stack, &mut partitions);

    let trivial: Vec<usize> = (0..res.circles.len()).filter(|&c| !res.circles[c].essential).collect();
    let mut out = BTreeSet::new();
    for mut pieces in partitions {
        pieces.sort();
        for bits in 0u32..(1 << trivial.len()) {
            let mut disks = vec![None; res.circles.len()];
            for (b, &c) in trivial.iter().enumerate() {
                disks[c] = Some(bits >> b & 1 == 1);
            }
            out.insert(KGenerator { state, disks, pieces: pieces.clone() });
        }
    }
    Ok(out.into_iter().collect())
}

fn cover(covered: u32, full: u32, groups: &[(u32, Piece)], stack: &mut Vec<Piece>, out: &mut Vec<Vec<Piece>>) {
    if covered == full {
        out.push(stack.clone());
        return;
    }
    let first = (!covered & full).trailing_zeros();
    for (mask, piece) in groups {
        if mask >> first & 1 == 1 && mask & covered == 0 {
            stack.push(piece.clone());
            cover(covered | mask, full, groups, stack, out);
            stack.pop();
        }
    }
}

/// Why a bridge produced zero, or that it did not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum KBridgeCase {
    NegativeSmoothing,
    /// Orientations disagree across the bridge.
    OrientationConflict,
    /// Band meets a single circle from both sides: non-orientable result.
    SingleCycle,
    /// Two circles of one piece are joined into a compressible positive-genus
    /// component with an essential boundary curve.
    SameComponentMerge,
    /// Two circles of one piece are joined by a band that reverses orientation.
    NonOrientable,
    /// Both circles of a turnback are joined into a trivial circle: the
    /// compressible closed torus left after neck-cutting evaluates to 2.
    TorusCompression,
    /// Everything else: the bridged component went through normalization.
    Normalized,
}

/// A bridged component before normalization.
#[derive(Debug, Clone)]
pub struct RawComponent {
    /// `(circle of the target state, traversal-relative orientation sign)`.
    pub tops: Vec<(usize, i8)>,
    pub bottoms: Vec<OrientedClass>,
    pub dots: u32,
    pub oriented: bool,
}

/// Terms of a normalized raw component: disks on trivial circles, plus the
/// surviving incompressible piece if any.
pub type NormalTerm = (i64, Vec<(usize, bool)>, Option<Piece>);

/// Applies neck-cutting on trivial top circles, then the vanishing rules.
pub fn normalize(z: &RawComponent, res: &Resolution, f: SurfaceSpec, cfg: KConfig) -> Result<Vec<NormalTerm>> {
    if z.dots >= 2 {
        return Ok(vec![]);
    }
    let trivial = z.tops.iter().position(|&(c, _)| !res.circles[c].essential);
    if z.tops.is_empty() && z.bottoms.is_empty() {
        // A sphere: zero without a dot, one with.
        return Ok(if z.dots == 1 { vec![(1, vec![], None)] } else { vec![] });
    }
    if let Some(pos) = trivial {
        let c = z.tops[pos].0;
        if z.tops.len() == 1 && z.bottoms.is_empty() {
            return Ok(vec![(1, vec![(c, z.dots == 1)], None)]);
        }
        let mut rest = z.clone();
        rest.tops.remove(pos);
        let mut out = Vec::new();
        for (c_dot, rest_dots) in [(true, z.dots), (false, z.dots + 1)] {
            rest.dots = rest_dots;
            for (coef, mut disks, piece) in normalize(&rest, res, f, cfg)? {
                disks.push((c, c_dot));
                out.push((coef, disks, piece));
            }
        }
        return Ok(out);
    }
    if z.dots >= 1 {
        return Ok(vec![]);
    }
    let n = z.tops.len() + z.bottoms.len();
    if n < 2 {
        return Err(Error::Invariant("a single essential curve bounds a component".into()));
    }
    if !cfg.k.admits(2 - n as i64) {
        return Ok(vec![]);
    }
    let mut tops = z.tops.clone();
    tops.sort();
    let mut classes: Vec<UnorientedClass> = tops.iter().map(|&(c, _)| res.circles[c].class.clone()).collect();
    classes.extend(z.bottoms.iter().map(OrientedClass::unoriented));
    if region_shape(&classes, f)?.is_none() {
        return Ok(vec![]);
    }
    if !z.oriented && !z.bottoms.is_empty() {
        return Err(Error::Invariant("unoriented component with bottom curves".into()));
    }
    let mut bottoms = z.bottoms.clone();
    bottoms.sort();
    let orientation = z.oriented.then(|| tops.iter().map(|&(_, s)| s).collect());
    Ok(vec![(1, vec![], Some(Piece { tops: tops.iter().map(|&(c, _)| c).collect(), bottoms, orientation }))])
}

/// Orientation data of a source component during a bridge.
struct Member {
    /// Traversal-relative sign per source circle (a reference when `fixed` is false).
    signs: Vec<(usize, i8)>,
    bottoms: Vec<OrientedClass>,
    dots: u32,
    fixed: bool,
}

fn reference_signs(piece: &Piece, res: &Resolution, f: SurfaceSpec) -> Result<Vec<i8>> {
    if let Some(o) = &piece.orientation {
        return Ok(o.clone());
    }
    let classes: Vec<UnorientedClass> = piece.tops.iter().map(|&c| res.circles[c].class.clone()).collect();
    let shape = region_shape(&classes, f)?.ok_or_else(|| Error::Invariant("generator piece is not a region".into()))?;
    Ok(piece.tops.iter().zip(shape).map(|(&c, r)| r * res.circles[c].trav_class.sign() as i8).collect())
}

/// Sign relating the traversal of the target circle to the source traversal along shared edges.
fn relay(src: &Resolution, dst: &Resolution, from: usize, to: usize) -> Result<i8> {
    let mut rel = None;
    for &(e, d_old) in &src.circles[from].traversal {
        if dst.edge_circle[e] != to {
            continue;
        }
        let r = d_old * dst.edge_dir[e];
        match rel {
            None => rel = Some(r),
            Some(x) if x != r => return Err(Error::Invariant("circle traversal reverses along a band".into())),
            _ => {}
        }
    }
    rel.ok_or_else(|| Error::Invariant(format!("circle {from} does not reach circle {to}")))
}

#[derive(Debug, Clone)]
pub struct KBridgeOutcome {
    pub case: KBridgeCase,
    pub terms: Combination<KGenerator>,
}

/// The bridge at crossing `p`, with the reason when the result is zero.
pub fn bridge_k(cube: &Cube, g: &KGenerator, p: usize, cfg: KConfig) -> Result<KBridgeOutcome> {
    let done = |case, terms| Ok(KBridgeOutcome { case, terms });
    let f = cube.topology.surface;
    if g.state.smoothing(p) == Smoothing::Negative {
        return done(KBridgeCase::NegativeSmoothing, vec![]);
    }
    let target = g.state.with(p, Smoothing::Negative);
    let src = cube.resolution(g.state);
    let dst = cube.resolution(target);
    let tr = cube.transition(g.state, p);

    // Owner of each source circle: `Err(circle)` for a disk, `Ok(piece)` otherwise.
    let mut owner: Vec<std::result::Result<usize, usize>> = (0..src.circles.len()).map(Err).collect();
    for (k, piece) in g.pieces.iter().enumerate() {
        for &c in &piece.tops {
            owner[c] = Ok(k);
        }
    }
    let touched: Vec<usize> = match tr.saddle {
        Saddle::SingleCycle { .. } => return done(KBridgeCase::SingleCycle, vec![]),
        Saddle::Merge { from: (a, b), to } => {
            if owner[a] == owner[b] {
                let Ok(k) = owner[a] else { unreachable!("a disk has one circle") };
                let piece = &g.pieces[k];
                if piece.tops.len() != 2 || !piece.bottoms.is_empty() || dst.circles[to].essential {
                    return done(KBridgeCase::SameComponentMerge, vec![]);
                }
                let signs = reference_signs(piece, src, f)?;
                let ua = signs[0] * relay(src, dst, piece.tops[0], to)?;
                let ub = signs[1] * relay(src, dst, piece.tops[1], to)?;
                if ua != ub {
                    return done(KBridgeCase::NonOrientable, vec![]);
                }
                let (mut disks, mut pieces) = carry_rest(g, src, dst, &tr.carry, &owner, &[Ok(k)])?;
                disks[to] = Some(true);
                pieces.sort();
                return done(KBridgeCase::TorusCompression, vec![(2, KGenerator { state: target, disks, pieces })]);
            }
            vec![a, b]
        }
        Saddle::Split { from, .. } => vec![from],
    };
    let mut owners: Vec<std::result::Result<usize, usize>> = touched.iter().map(|&c| owner[c]).collect();
    owners.dedup();

    let member = |o: std::result::Result<usize, usize>| -> Result<Member> {
        Ok(match o {
            Err(c) => Member { signs: vec![(c, 1)], bottoms: vec![], dots: u32::from(g.disks[c] == Some(true)), fixed: false },
            Ok(k) => {
                let piece = &g.pieces[k];
                let signs = reference_signs(piece, src, f)?;
                Member {
                    signs: piece.tops.iter().copied().zip(signs).collect(),
                    bottoms: piece.bottoms.clone(),
                    dots: 0,
                    fixed: piece.orientation.is_some(),
                }
            }
        })
    };
    let mut members: Vec<Member> = owners.iter().map(|&o| member(o)).collect::<Result<_>>()?;
    let sign_in = |m: &Member, c: usize| m.signs.iter().find(|&&(x, _)| x == c).map(|&(_, s)| s).unwrap();

    // Align the orientations across the band.
    let mut new_circles: Vec<(usize, i8)> = Vec::new();
    match tr.saddle {
        Saddle::Merge { from: (a, b), to } => {
            let ua = sign_in(&members[0], a) * relay(src, dst, a, to)?;
            let ub = sign_in(&members[1], b) * relay(src, dst, b, to)?;
            let mut u = ua;
            if ua != ub {
                if members[0].fixed && members[1].fixed {
                    return done(KBridgeCase::OrientationConflict, vec![]);
                }
                // The free side follows the other one.
                let flip = if members[1].fixed { 0 } else { 1 };
                for s in members[flip].signs.iter_mut() {
                    s.1 = -s.1;
                }
                if flip == 0 {
                    u = ub;
                }
            }
            new_circles.push((to, u));
        }
        Saddle::Split { from, to: (c1, c2) } => {
            let s = sign_in(&members[0], from);
            new_circles.push((c1, s * relay(src, dst, from, c1)?));
            new_circles.push((c2, s * relay(src, dst, from, c2)?));
        }
        Saddle::SingleCycle { .. } => unreachable!(),
    }

    let oriented = members.iter().any(|m| m.fixed);
    let mut z = RawComponent { tops: new_circles, bottoms: vec![], dots: 0, oriented };
    for m in &members {
        z.bottoms.extend(m.bottoms.iter().cloned());
        z.dots += m.dots;
        for &(c, s) in &m.signs {
            if touched.contains(&c) {
                continue;
            }
            let to = tr.carry[c].unwrap();
            z.tops.push((to, s * relay(src, dst, c, to)?));
        }
    }
    // Boundary orientations of a surface sum to zero in homology.
    let mut total = OrientedClass::zero(f.h1_rank());
    for &(c, s) in &z.tops {
        total.add_assign(&dst.circles[c].trav_class.scaled(s as i64));
    }
    for b in &z.bottoms {
        total.add_assign(b);
    }
    if !total.is_zero() {
        return Err(Error::Invariant(format!("bridged component boundary sums to {total} at crossing {p}")));
    }

    let (disks, pieces) = carry_rest(g, src, dst, &tr.carry, &owner, &owners)?;

    let mut terms = Vec::new();
    for (coef, new_disks, piece) in normalize(&z, dst, f, cfg)? {
        let mut d = disks.clone();
        for (c, dot) in new_disks {
            d[c] = Some(dot);
        }
        let mut ps = pieces.clone();
        ps.extend(piece);
        ps.sort();
        terms.push((coef, KGenerator { state: target, disks: d, pieces: ps }));
    }
    done(KBridgeCase::Normalized, terms)
}

/// Disks and pieces untouched by the band, moved to the target state.
fn carry_rest(
    g: &KGenerator,
    src: &Resolution,
    dst: &Resolution,
    carry: &[Option<usize>],
    owner: &[std::result::Result<usize, usize>],
    skip: &[std::result::Result<usize, usize>],
) -> Result<(Vec<Option<bool>>, Vec<Piece>)> {
    let mut disks: Vec<Option<bool>> = vec![None; dst.circles.len()];
    for (c, img) in carry.iter().enumerate() {
        if let (Some(n), Err(_)) = (img, owner[c]) {
            disks[*n] = g.disks[c];
        }
    }
    let mut pieces: Vec<Piece> = Vec::new();
    for (k, piece) in g.pieces.iter().enumerate() {
        if skip.contains(&Ok(k)) {
            continue;
        }
        let mut moved: Vec<(usize, i8)> = Vec::with_capacity(piece.tops.len());
        for (idx, &c) in piece.tops.iter().enumerate() {
            let to = carry[c].ok_or_else(|| Error::Invariant(format!("circle {c} of an untouched piece vanished")))?;
            let s = match &piece.orientation {
                Some(o) => o[idx] * relay(src, dst, c, to)?,
                None => 0,
            };
            moved.push((to, s));
        }
        moved.sort();
        pieces.push(Piece {
            tops: moved.iter().map(|&(c, _)| c).collect(),
            bottoms: piece.bottoms.clone(),
            orientation: piece.orientation.as_ref().map(|_| moved.iter().map(|&(_, s)| s).collect()),
        });
    }
    Ok((disks, pieces))
}
