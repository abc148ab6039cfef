//! Entry points: complexes and homology of a diagram in either theory.

use crate::complex::{build, ChainComplex, KCalculus, SimpleCalculus};
use crate::diagram::Diagram;
use crate::error::Result;
use crate::homology::{homology, Homology};
use crate::kfoam::{natural_sectors, KConfig, Sector};
use crate::state::Cube;
use crate::surface::UnorientedClass;

pub fn cube(d: &Diagram, cap: usize) -> Result<Cube> {
    Cube::new(d.topology()?, cap)
}

pub fn simple_complex(d: &Diagram, cap: usize) -> Result<ChainComplex<Vec<UnorientedClass>>> {
    build(&cube(d, cap)?, &SimpleCalculus)
}

/// The k-complex restricted to `sectors`, or to every sector the diagram can reach.
pub fn k_complex(d: &Diagram, cfg: KConfig, sectors: Option<&[Sector]>, cap: usize) -> Result<ChainComplex<Sector>> {
    let cube = cube(d, cap)?;
    let sectors = match sectors {
        Some(s) => s.to_vec(),
        None => natural_sectors(&cube),
    };
    build(&cube, &KCalculus { sectors, cfg })
}

pub fn simple_homology(d: &Diagram, cap: usize) -> Result<Homology<Vec<UnorientedClass>>> {
    homology(&simple_complex(d, cap)?, |s| crate::complex::multiset_label(s), true)
}

pub fn k_homology(d: &Diagram, cfg: KConfig, sectors: Option<&[Sector]>, cap: usize) -> Result<Homology<Sector>> {
    homology(&k_complex(d, cfg, sectors, cap)?, |s| s.to_string(), true)
}

/// Union of the natural sectors of several diagrams, for comparing them.
pub fn joint_sectors(ds: &[&Diagram], cap: usize) -> Result<Vec<Sector>> {
    let mut all = Vec::new();
    for d in ds {
        all.extend(natural_sectors(&cube(d, cap)?));
    }
    all.sort();
    all.dedup();
    Ok(all)
}
