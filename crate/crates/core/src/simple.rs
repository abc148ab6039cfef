//! The simple theory: chain generators are states whose trivial circles
//! are capped by disks (with or without a dot) and whose essential circles
//! are tops of vertical annuli. The foam relations are folded into a
//! finite table of bridge cases.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{Cube, Saddle, Smoothing, State};
use crate::surface::UnorientedClass;

/// Cap on a trivial circle: `One` is an undotted disk, `X` a dotted one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Decoration {
    One,
    X,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleGenerator {
    pub state: State,
    /// One entry per circle of the state; `None` on essential circles.
    pub decorations: Vec<Option<Decoration>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Gradings<S> {
    pub i: i64,
    pub j: i64,
    pub s: S,
}

/// Which row of the bridge table fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BridgeCase {
    NegativeSmoothing,
    MergeTrivialTrivial,
    SplitTrivial,
    MergeTrivialEssential,
    SplitEssentialOffTrivial,
    MergeEssentialEssential,
    SplitEssentialEssential,
    SplitTrivialToEssentials,
    /// The band meets one circle from both sides; the bridged component is non-orientable.
    SingleCycle,
}

pub type Combination<G> = Vec<(i64, G)>;

impl SimpleGenerator {
    pub fn dots(&self) -> i64 {
        self.decorations.iter().filter(|d| **d == Some(Decoration::X)).count() as i64
    }

    /// Euler characteristic: disks count 1, vertical annuli 0.
    pub fn chi(&self) -> i64 {
        self.decorations.iter().filter(|d| d.is_some()).count() as i64
    }

    pub fn gradings(&self, cube: &Cube) -> Gradings<Vec<UnorientedClass>> {
        let i = self.state.i();
        Gradings { i, j: i + 2 * (2 * self.dots() - self.chi()), s: cube.resolution(self.state).essential_classes() }
    }
}

pub fn enumerate_simple(cube: &Cube, state: State) -> Vec<SimpleGenerator> {
    let res = cube.resolution(state);
    let trivial: Vec<usize> = (0..res.circles.len()).filter(|&k| !res.circles[k].essential).collect();
    (0u32..1 << trivial.len())
        .map(|bits| {
            let mut decorations = vec![None; res.circles.len()];
            for (b, &k) in trivial.iter().enumerate() {
                decorations[k] = Some(if bits >> b & 1 == 1 { Decoration::X } else { Decoration::One });
            }
            SimpleGenerator { state, decorations }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BridgeOutcome<G> {
    pub case: BridgeCase,
    pub terms: Combination<G>,
}

pub fn bridge_simple(cube: &Cube, g: &SimpleGenerator, p: usize) -> Result<BridgeOutcome<SimpleGenerator>> {
    use BridgeCase::*;
    use Decoration::*;
    let zero = |case| Ok(BridgeOutcome { case, terms: vec![] });
    if g.state.smoothing(p) == Smoothing::Negative {
        return zero(NegativeSmoothing);
    }
    let target = g.state.with(p, Smoothing::Negative);
    let src = cube.resolution(g.state);
    let dst = cube.resolution(target);
    let tr = cube.transition(g.state, p);
    let mut base: Vec<Option<Decoration>> = vec![None; dst.circles.len()];
    for (k, img) in tr.carry.iter().enumerate() {
        if let Some(n) = img {
            base[*n] = g.decorations[k];
        }
    }
    let make = |assign: &[(usize, Decoration)]| {
        let mut d = base.clone();
        for &(c, dec) in assign {
            d[c] = Some(dec);
        }
        SimpleGenerator { state: target, decorations: d }
    };
    let ess = |k: usize| src.circles[k].essential;
    let ess_dst = |k: usize| dst.circles[k].essential;
    let bad = |what: &str| Err(Error::Invariant(format!("{what} at crossing {p} in state {:?}", g.state)));

    let (case, terms) = match tr.saddle {
        Saddle::SingleCycle { .. } => (SingleCycle, vec![]),
        Saddle::Merge { from: (a, b), to } => match (ess(a), ess(b)) {
            (false, false) => {
                if ess_dst(to) {
                    return bad("two trivial circles merged into an essential one");
                }
                let terms = match (g.decorations[a].unwrap(), g.decorations[b].unwrap()) {
                    (One, One) => vec![(1, make(&[(to, One)]))],
                    (One, X) | (X, One) => vec![(1, make(&[(to, X)]))],
                    (X, X) => vec![],
                };
                (MergeTrivialTrivial, terms)
            }
            (true, true) => (MergeEssentialEssential, vec![]),
            _ => {
                let t = if ess(a) { b } else { a };
                if !ess_dst(to) {
                    return bad("trivial and essential circles merged into a trivial one");
                }
                let terms = match g.decorations[t].unwrap() {
                    One => vec![(1, make(&[]))],
                    X => vec![],
                };
                (MergeTrivialEssential, terms)
            }
        },
        Saddle::Split { from, to: (c1, c2) } => match (ess(from), ess_dst(c1), ess_dst(c2)) {
            (false, false, false) => {
                let terms = match g.decorations[from].unwrap() {
                    One => vec![(1, make(&[(c1, One), (c2, X)])), (1, make(&[(c1, X), (c2, One)]))],
                    X => vec![(1, make(&[(c1, X), (c2, X)]))],
                };
                (SplitTrivial, terms)
            }
            (false, true, true) => (SplitTrivialToEssentials, vec![]),
            (true, true, true) => (SplitEssentialEssential, vec![]),
            (true, e1, e2) if e1 != e2 => {
                let t = if e1 { c2 } else { c1 };
                (SplitEssentialOffTrivial, vec![(1, make(&[(t, X)]))])
            }
            _ => return bad("split violates class additivity"),
        },
    };
    Ok(BridgeOutcome { case, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Crossing, Diagram, Edge, SlotRef};
    use crate::surface::SurfaceSpec;

    fn kink_cube() -> Cube {
        let d = Diagram {
            surface: SurfaceSpec::Annulus,
            crossings: vec![Crossing { id: "c0".into() }],
            edges: vec![
                Edge { id: "e0".into(), from: Some(SlotRef::new("c0", 1)), to: Some(SlotRef::new("c0", 0)), label: vec![1] },
                Edge { id: "e1".into(), from: Some(SlotRef::new("c0", 2)), to: Some(SlotRef::new("c0", 3)), label: vec![0] },
            ],
            crossing_order: None,
        };
        Cube::new(d.topology().unwrap(), 16).unwrap()
    }

    #[test]
    fn kink_states() {
        let cube = kink_cube();
        let plus = cube.resolution(State::all_positive(1));
        assert_eq!(plus.circles.len(), 2);
        assert_eq!(plus.circles.iter().filter(|c| c.essential).count(), 1);
        let minus = cube.resolution(State { mask: 1, m: 1 });
        assert_eq!(minus.circles.len(), 1);
        assert!(minus.circles[0].essential);
    }

    #[test]
    fn enumeration_and_gradings() {
        let cube = kink_cube();
        let gens = enumerate_simple(&cube, State::all_positive(1));
        assert_eq!(gens.len(), 2);
        let js: Vec<i64> = gens.iter().map(|g| g.gradings(&cube).j).collect();
        assert_eq!(js, vec![1 - 2, 1 + 2]);
        let gens = enumerate_simple(&cube, State { mask: 1, m: 1 });
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].gradings(&cube).j, -1);
    }

    #[test]
    fn kink_bridge_merges_trivial_into_essential() {
        let cube = kink_cube();
        let gens = enumerate_simple(&cube, State::all_positive(1));
        for g in &gens {
            let out = bridge_simple(&cube, g, 0).unwrap();
            assert_eq!(out.case, BridgeCase::MergeTrivialEssential);
            let one = g.decorations.contains(&Some(Decoration::One));
            assert_eq!(out.terms.len(), usize::from(one));
            for (_, h) in &out.terms {
                assert_eq!(h.gradings(&cube).j, g.gradings(&cube).j);
                assert_eq!(h.state.i(), g.state.i() - 2);
            }
        }
        let neg = &enumerate_simple(&cube, State { mask: 1, m: 1 })[0];
        assert_eq!(bridge_simple(&cube, neg, 0).unwrap().case, BridgeCase::NegativeSmoothing);
    }
}
