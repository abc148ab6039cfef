#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use serde::Deserialize;
use thickfoam::diagram::Diagram;
use thickfoam::moves::Move;

#[derive(Debug, Deserialize)]
struct Manifest {
    diagrams: Vec<ManifestEntry>,
}

#[derive(Debug, Deserialize)]
struct ManifestEntry {
    file: String,
    moves: Vec<Move>,
}

pub struct CorpusEntry {
    pub name: String,
    pub diagram: Diagram,
    /// R2/R3 moves that apply to this diagram.
    pub moves: Vec<Move>,
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load_corpus() -> Vec<CorpusEntry> {
    let dir = corpus_dir();
    let text = std::fs::read_to_string(dir.join("manifest.json")).expect("corpus manifest");
    let manifest: Manifest = serde_json::from_str(&text).expect("manifest parses");
    manifest
        .diagrams
        .into_iter()
        .map(|e| {
            let text = std::fs::read_to_string(dir.join(&e.file)).expect("corpus file");
            CorpusEntry {
                name: e.file.trim_end_matches(".json").to_string(),
                diagram: Diagram::from_json(&text).expect("corpus diagram parses"),
                moves: e.moves,
            }
        })
        .collect()
}

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use thickfoam::diagram::faces;
use thickfoam::kfoam::{enumerate_k, natural_sectors, KConfig, KValue};
use thickfoam::moves::TwistSign;
use thickfoam::simple::{bridge_simple, enumerate_simple};
use thickfoam::state::{enumerate_states, Cube, Smoothing};

pub const CAP: usize = 12;

/// R2 moves along faces with two distinct edges that both end at crossings.
pub fn face_r2_moves(d: &Diagram) -> Vec<Move> {
    let t = d.topology().expect("valid diagram");
    let mut out = Vec::new();
    for f in faces(&t) {
        for &(ea, sa) in &f {
            for &(eb, sb) in &f {
                let m = Move::R2 { a: d.edges[ea].id.clone(), b: d.edges[eb].id.clone(), a_side: sa, b_side: sb };
                if ea != eb && !out.contains(&m) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// A random diagram reached from `d` by kinks and finger moves, at most `max` crossings.
pub fn random_variant(d: &Diagram, rng: &mut StdRng, max: usize) -> Diagram {
    let mut d = d.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let room = max.saturating_sub(d.crossings.len());
        if room == 0 {
            break;
        }
        let next = if room >= 2 && rng.gen_bool(0.5) {
            face_r2_moves(&d).choose(rng).and_then(|m| m.apply(&d).ok())
        } else {
            let e = d.edges.choose(rng).unwrap().id.clone();
            let sign = if rng.gen_bool(0.5) { TwistSign::Positive } else { TwistSign::Negative };
            Move::R1 { edge: e, sign }.apply(&d).ok()
        };
        if let Some(n) = next {
            d = n;
        }
    }
    d
}

#[derive(Debug, Default)]
pub struct Sweep {
    pub cases: usize,
    pub mismatches: Vec<String>,
}

impl Sweep {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.mismatches.len() < 20 {
            self.mismatches.push(what());
        }
    }
}

/// Every (generator, positive crossing) pair of a diagram, simple theory
/// and the k-theory at each `k` over the natural sectors.
pub fn sweep_diagram(name: &str, d: &Diagram, ks: &[KValue], out: &mut Sweep) {
    let cube = Cube::new(d.topology().expect("valid"), CAP).expect("cube");
    let m = cube.m();
    let states: Vec<_> = enumerate_states(m, CAP).unwrap().collect();
    for &s in &states {
        for g in enumerate_simple(&cube, s) {
            for p in (0..m).filter(|&p| s.smoothing(p) == Smoothing::Positive) {
                let lib = bridge_simple(&cube, &g, p).map(|o| oracle::collect(o.terms));
                let want = oracle::simple_bridge(&cube, &g, p);
                record_pair(out, lib, want, || format!("{name}: simple {g:?} at {p}"));
            }
        }
    }
    let sectors = natural_sectors(&cube);
    for &k in ks {
        let cfg = KConfig::new(k);
        for sector in &sectors {
            for &s in &states {
                for g in enumerate_k(&cube, s, sector, cfg).expect("enumerate") {
                    for p in (0..m).filter(|&p| s.smoothing(p) == Smoothing::Positive) {
                        let lib = thickfoam::kfoam::bridge_k(&cube, &g, p, cfg).map(|o| oracle::collect(o.terms));
                        let want = oracle::k_bridge(&cube, &g, p, k);
                        record_pair(out, lib, want, || format!("{name}: k={k} {g:?} at {p}"));
                    }
                }
            }
        }
    }
}

fn record_pair<G: Ord + std::fmt::Debug>(
    out: &mut Sweep,
    lib: thickfoam::Result<std::collections::BTreeMap<G, i64>>,
    want: std::collections::BTreeMap<G, i64>,
    what: impl FnOnce() -> String,
) {
    match lib {
        Ok(got) => {
            let ok = got == want;
            out.record(ok, || format!("{}: library {got:?}, oracle {want:?}", what()));
        }
        Err(e) => out.record(false, || format!("{}: library error {e}, oracle {want:?}", what())),
    }
}

pub const ORACLE_KS: [KValue; 4] = [KValue(Some(0)), KValue(Some(1)), KValue(Some(2)), KValue(None)];

/// Corpus plus random variants until at least `min_cases` pairs were compared.
pub fn oracle_sweep(seed: u64, min_cases: usize) -> Sweep {
    use rand::SeedableRng;
    let mut out = Sweep::default();
    let corpus = load_corpus();
    for e in &corpus {
        sweep_diagram(&e.name, &e.diagram, &ORACLE_KS, &mut out);
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut round = 0;
    while (out.cases < min_cases || round < 40) && round < 500 {
        let base = &corpus.choose(&mut rng).unwrap().diagram;
        let v = random_variant(base, &mut rng, 6);
        sweep_diagram(&format!("random variant {round}"), &v, &ORACLE_KS, &mut out);
        round += 1;
    }
    out
}
