//! Foam-based homology for framed links in thickened surfaces.
//!
//! Diagrams live on a disk with punctures, an annulus, or a torus. The
//! chain complex of a diagram is spanned by foams in normal form over
//! the smoothings of its crossings; two families of theories are provided,
//! the simple theory and the k-theories.

pub mod complex;
pub mod diagram;
pub mod error;
pub mod homology;
pub mod kfoam;
pub mod moves;
pub mod simple;
pub mod skein;
pub mod state;
pub mod surface;
pub mod theory;

pub use error::{Error, Result};
