//! Assembling the graded chain complex of a diagram.
//!
//! The differential of a generator is the signed sum of its bridges over
//! all positively smoothed crossings, with sign `(-1)^t` where `t` counts
//! the crossings later in the sign order that are smoothed negatively.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kfoam::{self, KConfig, KGenerator, Sector};
use crate::simple::{self, Combination, Decoration, Gradings, SimpleGenerator};
use crate::state::{enumerate_states, Cube, Smoothing, State};
use crate::surface::UnorientedClass;

/// A chain-level model: generators per state and the bridge rule.
pub trait Calculus: Sync {
    type Gen: Clone + Eq + Hash + Ord + Send + Sync;
    type Sector: Clone + Ord + Send + Sync;

    fn generators(&self, cube: &Cube, state: State) -> Result<Vec<Self::Gen>>;
    fn state_of(&self, g: &Self::Gen) -> State;
    fn gradings(&self, cube: &Cube, g: &Self::Gen) -> Gradings<Self::Sector>;
    fn bridge(&self, cube: &Cube, g: &Self::Gen, p: usize) -> Result<Combination<Self::Gen>>;
    fn describe(&self, cube: &Cube, g: &Self::Gen) -> String;
    fn sector_label(&self, s: &Self::Sector) -> String;
}

pub struct SimpleCalculus;

impl Calculus for SimpleCalculus {
    type Gen = SimpleGenerator;
    type Sector = Vec<UnorientedClass>;

    fn generators(&self, cube: &Cube, state: State) -> Result<Vec<SimpleGenerator>> {
        Ok(simple::enumerate_simple(cube, state))
    }

    fn state_of(&self, g: &SimpleGenerator) -> State {
        g.state
    }

    fn gradings(&self, cube: &Cube, g: &SimpleGenerator) -> Gradings<Vec<UnorientedClass>> {
        g.gradings(cube)
    }

    fn bridge(&self, cube: &Cube, g: &SimpleGenerator, p: usize) -> Result<Combination<SimpleGenerator>> {
        Ok(simple::bridge_simple(cube, g, p)?.terms)
    }

    fn describe(&self, cube: &Cube, g: &SimpleGenerator) -> String {
        let res = cube.resolution(g.state);
        let mut s = state_string(g.state);
        s.push_str(" [");
        for (k, (c, d)) in res.circles.iter().zip(&g.decorations).enumerate() {
            if k > 0 {
                s.push(' ');
            }
            match d {
                Some(Decoration::One) => write!(s, "{k}:1").unwrap(),
                Some(Decoration::X) => write!(s, "{k}:x").unwrap(),
                None => write!(s, "{k}:{}", c.class).unwrap(),
            }
        }
        s.push(']');
        s
    }

    fn sector_label(&self, s: &Vec<UnorientedClass>) -> String {
        multiset_label(s)
    }
}

pub fn multiset_label(s: &[UnorientedClass]) -> String {
    let parts: Vec<String> = s.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(","))
}

pub fn state_string(s: State) -> String {
    s.assignment()
        .iter()
        .map(|sm| match sm {
            Smoothing::Positive => '+',
            Smoothing::Negative => '-',
        })
        .collect()
}

pub struct KCalculus {
    pub sectors: Vec<Sector>,
    pub cfg: KConfig,
}

impl Calculus for KCalculus {
    type Gen = KGenerator;
    type Sector = Sector;

    fn generators(&self, cube: &Cube, state: State) -> Result<Vec<KGenerator>> {
        let mut out = Vec::new();
        for s in &self.sectors {
            out.extend(kfoam::enumerate_k(cube, state, s, self.cfg)?);
        }
        Ok(out)
    }

    fn state_of(&self, g: &KGenerator) -> State {
        g.state
    }

    fn gradings(&self, _cube: &Cube, g: &KGenerator) -> Gradings<Sector> {
        g.gradings()
    }

    fn bridge(&self, cube: &Cube, g: &KGenerator, p: usize) -> Result<Combination<KGenerator>> {
        Ok(kfoam::bridge_k(cube, g, p, self.cfg)?.terms)
    }

    fn describe(&self, cube: &Cube, g: &KGenerator) -> String {
        let res = cube.resolution(g.state);
        let mut s = state_string(g.state);
        s.push_str(" [");
        let mut first = true;
        for (k, d) in g.disks.iter().enumerate() {
            if let Some(dot) = d {
                if !first {
                    s.push(' ');
                }
                first = false;
                write!(s, "{k}:{}", if *dot { 'x' } else { '1' }).unwrap();
            }
        }
        for piece in &g.pieces {
            if !first {
                s.push(' ');
            }
            first = false;
            s.push('{');
            for (n, &c) in piece.tops.iter().enumerate() {
                if n > 0 {
                    s.push(',');
                }
                let sign = match &piece.orientation {
                    Some(o) if o[n] > 0 => "+",
                    Some(_) => "-",
                    None => "",
                };
                write!(s, "{sign}{c}{}", res.circles[c].class).unwrap();
            }
            if !piece.bottoms.is_empty() {
                write!(s, "|{}", Sector(piece.bottoms.clone())).unwrap();
            }
            s.push('}');
        }
        s.push(']');
        s
    }

    fn sector_label(&self, s: &Sector) -> String {
        s.to_string()
    }
}

/// Column-major sparse integer matrix: `cols[c]` lists `(row, value)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols.len()]; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                d[r][c] += v;
            }
        }
        d
    }

    /// `self * other`.
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for &(k, v) in col {
                    for &(r, w) in &self.cols[k] {
                        *acc.entry(r).or_insert(0) += v * w;
                    }
                }
                acc.into_iter().filter(|&(_, x)| x != 0).collect()
            })
            .collect();
        SparseMatrix { rows: self.rows, cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.iter().all(|&(_, v)| v == 0))
    }
}

/// The part of the complex in one quantum grading and one sector.
#[derive(Debug, Clone)]
pub struct Block<S> {
    pub s: S,
    pub j: i64,
    /// Generators at each homological grading, described for output.
    pub levels: BTreeMap<i64, Vec<String>>,
    /// `maps[i]` is the differential from level `i` to level `i - 2`.
    pub maps: BTreeMap<i64, SparseMatrix>,
}

impl<S> Block<S> {
    pub fn dim(&self, i: i64) -> usize {
        self.levels.get(&i).map_or(0, Vec::len)
    }

    /// The differential out of level `i`, empty when there is nothing to map.
    pub fn map(&self, i: i64) -> SparseMatrix {
        self.maps.get(&i).cloned().unwrap_or_else(|| SparseMatrix {
            rows: self.dim(i - 2),
            cols: vec![vec![]; self.dim(i)],
        })
    }
}

#[derive(Debug, Clone)]
pub struct ChainComplex<S> {
    pub m: usize,
    pub blocks: Vec<Block<S>>,
    pub sector_labels: Vec<String>,
}

/// Builds the complex of `cube` for a calculus.
pub fn build<C: Calculus>(cube: &Cube, calc: &C) -> Result<ChainComplex<C::Sector>> {
    let m = cube.m();
    let states: Vec<State> = enumerate_states(m, usize::MAX)?.collect();
    let per_state: Vec<Vec<C::Gen>> =
        states.par_iter().map(|&s| calc.generators(cube, s)).collect::<Result<Vec<_>>>()?;
    let gens: Vec<C::Gen> = per_state.into_iter().flatten().collect();
    let grads: Vec<Gradings<C::Sector>> = gens.par_iter().map(|g| calc.gradings(cube, g)).collect();

    // Place each generator in its block and level, sorted for determinism.
    let mut placement: BTreeMap<(C::Sector, i64), BTreeMap<i64, Vec<usize>>> = BTreeMap::new();
    for (k, gr) in grads.iter().enumerate() {
        placement.entry((gr.s.clone(), gr.j)).or_default().entry(gr.i).or_default().push(k);
    }
    let mut position: HashMap<&C::Gen, (usize, usize)> = HashMap::with_capacity(gens.len());
    for (b, levels) in placement.values_mut().enumerate() {
        for idx in levels.values_mut() {
            idx.sort_by(|&x, &y| gens[x].cmp(&gens[y]));
            for (pos, &k) in idx.iter().enumerate() {
                position.insert(&gens[k], (b, pos));
            }
        }
    }

    let images: Vec<Vec<(usize, i64)>> = gens
        .par_iter()
        .map(|g| -> Result<Vec<(usize, i64)>> {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            let state = calc.state_of(g);
            let gg = calc.gradings(cube, g);
            for p in 0..m {
                if state.smoothing(p) == Smoothing::Positive {
                    let sign = if cube.sign_exponent(state, p) % 2 == 0 { 1 } else { -1 };
                    for (coef, h) in calc.bridge(cube, g, p)? {
                        let Some(&(_, pos)) = position.get(&h) else {
                            return Err(Error::Invariant(format!(
                                "bridge of {} at crossing {p} left the basis: {}",
                                calc.describe(cube, g),
                                calc.describe(cube, &h)
                            )));
                        };
                        let hg = calc.gradings(cube, &h);
                        if hg.j != gg.j || hg.s != gg.s || hg.i != gg.i - 2 {
                            return Err(Error::Invariant(format!(
                                "differential of {} does not preserve gradings",
                                calc.describe(cube, g)
                            )));
                        }
                        *acc.entry(pos).or_insert(0) += sign * coef;
                    }
                }
            }
            Ok(acc.into_iter().filter(|&(_, v)| v != 0).collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut blocks = Vec::with_capacity(placement.len());
    let mut sector_labels = Vec::new();
    for ((s, j), levels) in placement {
        let mut maps = BTreeMap::new();
        let mut described = BTreeMap::new();
        for (&i, idx) in &levels {
            described.insert(i, idx.iter().map(|&k| calc.describe(cube, &gens[k])).collect());
            let rows = levels.get(&(i - 2)).map_or(0, Vec::len);
            let cols: Vec<Vec<(usize, i64)>> = idx.iter().map(|&k| images[k].clone()).collect();
            if rows > 0 || cols.iter().any(|c| !c.is_empty()) {
                maps.insert(i, SparseMatrix { rows, cols });
            }
        }
        let label = calc.sector_label(&s);
        if !sector_labels.contains(&label) {
            sector_labels.push(label);
        }
        blocks.push(Block { s, j, levels: described, maps });
    }
    Ok(ChainComplex { m, blocks, sector_labels })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DSquaredViolation {
    pub sector: String,
    pub j: i64,
    pub i: i64,
    pub source: String,
    pub target: String,
    pub coefficient: i64,
}

impl<S> ChainComplex<S> {
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.levels.values().map(Vec::len).sum::<usize>()).sum()
    }

    /// The first nonzero entry of `d ∘ d`, if any.
    pub fn d_squared_violation(&self, label: impl Fn(&S) -> String) -> Option<DSquaredViolation> {
        for b in &self.blocks {
            for &i in b.levels.keys() {
                let dd = b.map(i - 2).compose(&b.map(i));
                for (c, col) in dd.cols.iter().enumerate() {
                    if let Some(&(r, v)) = col.iter().find(|&&(_, v)| v != 0) {
                        return Some(DSquaredViolation {
                            sector: label(&b.s),
                            j: b.j,
                            i,
                            source: b.levels[&i][c].clone(),
                            target: b.levels[&(i - 4)][r].clone(),
                            coefficient: v,
                        });
                    }
                }
            }
        }
        None
    }

    pub fn check_d_squared(&self, label: impl Fn(&S) -> String) -> Result<()> {
        match self.d_squared_violation(label) {
            None => Ok(()),
            Some(v) => Err(Error::DSquaredNonzero(format!(
                "d∘d sends {} to {} times {} (sector {}, j = {}, i = {})",
                v.source, v.coefficient, v.target, v.sector, v.j, v.i
            ))),
        }
    }
}
