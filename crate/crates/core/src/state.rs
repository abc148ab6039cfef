//! Smoothing states and the closed curves they produce.

use serde::Serialize;

use crate::diagram::{End, Topology};
use crate::error::{Error, Result};
use crate::surface::{canonicalize, OrientedClass, UnorientedClass};

pub const DEFAULT_CROSSING_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothing {
    Positive,
    Negative,
}

impl Smoothing {
    /// Slot pairs joined by this smoothing.
    pub fn arcs(self) -> [(u8, u8); 2] {
        match self {
            Smoothing::Positive => [(0, 1), (2, 3)],
            Smoothing::Negative => [(1, 2), (3, 0)],
        }
    }

    pub fn partner(self, slot: u8) -> u8 {
        match (self, slot) {
            (Smoothing::Positive, s) => s ^ 1,
            (Smoothing::Negative, 0) => 3,
            (Smoothing::Negative, 3) => 0,
            (Smoothing::Negative, 1) => 2,
            (Smoothing::Negative, _) => 1,
        }
    }
}

/// A smoothing choice per crossing, packed as a bitmask (bit set = negative).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub mask: u32,
    pub m: usize,
}

impl State {
    pub fn all_positive(m: usize) -> State {
        State { mask: 0, m }
    }

    pub fn smoothing(&self, c: usize) -> Smoothing {
        if self.mask >> c & 1 == 1 {
            Smoothing::Negative
        } else {
            Smoothing::Positive
        }
    }

    pub fn with(&self, c: usize, s: Smoothing) -> State {
        let mask = match s {
            Smoothing::Positive => self.mask & !(1 << c),
            Smoothing::Negative => self.mask | (1 << c),
        };
        State { mask, m: self.m }
    }

    pub fn n(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn p(&self) -> usize {
        self.m - self.n()
    }

    /// `p - n`.
    pub fn i(&self) -> i64 {
        self.p() as i64 - self.n() as i64
    }

    pub fn assignment(&self) -> Vec<Smoothing> {
        (0..self.m).map(|c| self.smoothing(c)).collect()
    }
}

/// One closed curve of a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateCircle {
    /// Edges in traversal order with their direction (+1 forward).
    pub traversal: Vec<(usize, i8)>,
    /// Class of the curve in its traversal direction.
    pub trav_class: OrientedClass,
    pub class: UnorientedClass,
    pub essential: bool,
    /// Smoothing arcs on this circle, as `(crossing, slot, slot)`.
    pub arcs: Vec<(usize, u8, u8)>,
}

#[derive(Debug, Clone)]
pub struct Resolution {
    pub state: State,
    pub circles: Vec<StateCircle>,
    /// Circle containing each edge.
    pub edge_circle: Vec<usize>,
    /// Direction in which the circle traverses each edge.
    pub edge_dir: Vec<i8>,
}

impl Resolution {
    pub fn essential_classes(&self) -> Vec<UnorientedClass> {
        let mut v: Vec<_> = self.circles.iter().filter(|c| c.essential).map(|c| c.class.clone()).collect();
        v.sort();
        v
    }

    pub fn trivial_count(&self) -> usize {
        self.circles.iter().filter(|c| !c.essential).count()
    }

    /// Circle through slot `s` of crossing `c`.
    pub fn circle_at(&self, t: &Topology, c: usize, s: u8) -> usize {
        self.edge_circle[t.slots[c][s as usize].0]
    }
}

/// Traces the circles of `state`. Circle ids follow the lowest edge index on each circle.
pub fn resolve(t: &Topology, state: State) -> Result<Resolution> {
    let n = t.labels.len();
    let rank = t.surface.h1_rank();
    let mut edge_circle = vec![usize::MAX; n];
    let mut edge_dir = vec![0i8; n];
    let mut circles = Vec::new();
    for start in 0..n {
        if edge_circle[start] != usize::MAX {
            continue;
        }
        let id = circles.len();
        let mut traversal = Vec::new();
        let mut arcs = Vec::new();
        let mut cls = OrientedClass::zero(rank);
        let (mut e, mut dir) = (start, 1i8);
        loop {
            if edge_circle[e] != usize::MAX {
                return Err(Error::Invariant(format!("edge {e} visited twice while tracing")));
            }
            edge_circle[e] = id;
            edge_dir[e] = dir;
            traversal.push((e, dir));
            cls.add_assign(&t.labels[e].scaled(dir as i64));
            let Some((tail, head)) = t.ends[e] else { break };
            let (c, s) = if dir > 0 { head } else { tail };
            let partner = state.smoothing(c).partner(s);
            arcs.push((c, s.min(partner), s.max(partner)));
            let (f, end) = t.slots[c][partner as usize];
            dir = if end == End::Tail { 1 } else { -1 };
            e = f;
            if e == start {
                if dir != 1 {
                    return Err(Error::Invariant(format!("edge {e} traversed in both directions")));
                }
                break;
            }
        }
        t.surface.check_simple_curve(&cls.0)?;
        let class = canonicalize(&cls);
        arcs.sort();
        circles.push(StateCircle { traversal, essential: !class.is_zero(), trav_class: cls, class, arcs });
    }
    Ok(Resolution { state, circles, edge_circle, edge_dir })
}

pub fn check_cap(m: usize, cap: usize) -> Result<()> {
    if m > cap || m > 30 {
        return Err(Error::ResourceLimit(format!("{m} crossings exceeds the cap of {}", cap.min(30))));
    }
    Ok(())
}

/// All `2^m` states in lexicographic order of their assignments
/// (crossing 0 most significant, positive before negative).
pub fn enumerate_states(m: usize, cap: usize) -> Result<impl Iterator<Item = State>> {
    check_cap(m, cap)?;
    Ok((0u32..1 << m).map(move |k| {
        let mask = (0..m).fold(0u32, |acc, c| acc | ((k >> (m - 1 - c)) & 1) << c);
        State { mask, m }
    }))
}

/// How a bridge at a positively smoothed crossing changes the circles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Saddle {
    /// Two circles of the source become one circle of the target.
    Merge { from: (usize, usize), to: usize },
    /// One circle of the source becomes two circles of the target.
    Split { from: usize, to: (usize, usize) },
    /// One circle becomes one circle: the band meets the curve from both sides.
    SingleCycle { from: usize, to: usize },
}

/// Circle correspondence for changing crossing `c` from positive to negative.
#[derive(Debug, Clone)]
pub struct Transition {
    pub saddle: Saddle,
    /// Image of every source circle untouched by the band.
    pub carry: Vec<Option<usize>>,
}

pub fn transition(t: &Topology, src: &Resolution, dst: &Resolution, c: usize) -> Transition {
    let old: Vec<usize> = dedup([src.circle_at(t, c, 0), src.circle_at(t, c, 2)]);
    let new: Vec<usize> = dedup([dst.circle_at(t, c, 1), dst.circle_at(t, c, 3)]);
    let saddle = match (old.len(), new.len()) {
        (2, 1) => Saddle::Merge { from: (old[0], old[1]), to: new[0] },
        (1, 2) => Saddle::Split { from: old[0], to: (new[0], new[1]) },
        (1, 1) => Saddle::SingleCycle { from: old[0], to: new[0] },
        _ => unreachable!("a band changes at most two circles"),
    };
    let carry = (0..src.circles.len())
        .map(|k| {
            if old.contains(&k) {
                None
            } else {
                let e = src.circles[k].traversal[0].0;
                Some(dst.edge_circle[e])
            }
        })
        .collect();
    Transition { saddle, carry }
}

fn dedup(a: [usize; 2]) -> Vec<usize> {
    if a[0] == a[1] {
        vec![a[0]]
    } else {
        vec![a[0].min(a[1]), a[0].max(a[1])]
    }
}

/// All resolutions of a diagram, indexed by state mask.
#[derive(Debug, Clone)]
pub struct Cube {
    pub topology: Topology,
    pub resolutions: Vec<Resolution>,
}

impl Cube {
    pub fn new(t: Topology, cap: usize) -> Result<Cube> {
        let m = t.n_crossings;
        check_cap(m, cap)?;
        let resolutions = (0u32..1 << m)
            .map(|mask| resolve(&t, State { mask, m }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Cube { topology: t, resolutions })
    }

    pub fn m(&self) -> usize {
        self.topology.n_crossings
    }

    pub fn resolution(&self, s: State) -> &Resolution {
        &self.resolutions[s.mask as usize]
    }

    /// Transition for bridging crossing `c` in state `s` (which must smooth `c` positively).
    pub fn transition(&self, s: State, c: usize) -> Transition {
        debug_assert_eq!(s.smoothing(c), Smoothing::Positive);
        let dst = s.with(c, Smoothing::Negative);
        transition(&self.topology, self.resolution(s), self.resolution(dst), c)
    }

    /// Number of crossings after `c` in the sign order that `s` smooths negatively.
    pub fn sign_exponent(&self, s: State, c: usize) -> usize {
        let r = self.topology.order_rank[c];
        (0..self.m())
            .filter(|&q| self.topology.order_rank[q] > r && s.smoothing(q) == Smoothing::Negative)
            .count()
    }
}
