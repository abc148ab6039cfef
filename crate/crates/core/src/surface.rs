//! Base surfaces and first-homology curve classes.
//!
//! A planar surface with `n` punctures is a disk with `n` holes; the
//! coordinate `i` of a class is the winding number around puncture `i`.
//! On the torus the two coordinates are the usual `(a, b)` slope. On these
//! surfaces a simple closed curve bounds a disk exactly when its class
//! vanishes, so curve classification is integer arithmetic.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SurfaceSpec {
    Planar { punctures: usize },
    Annulus,
    Torus,
}

impl SurfaceSpec {
    /// Annulus and `planar(1)` are the same surface.
    pub fn canonical(self) -> SurfaceSpec {
        match self {
            SurfaceSpec::Annulus => SurfaceSpec::Planar { punctures: 1 },
            s => s,
        }
    }

    pub fn h1_rank(self) -> usize {
        match self.canonical() {
            SurfaceSpec::Planar { punctures } => punctures,
            SurfaceSpec::Torus => 2,
            SurfaceSpec::Annulus => unreachable!(),
        }
    }

    pub fn is_planar(self) -> bool {
        matches!(self.canonical(), SurfaceSpec::Planar { .. })
    }

    fn check_len(self, coords: &[i64]) -> Result<()> {
        if coords.len() != self.h1_rank() {
            return Err(Error::MalformedClass { expected: self.h1_rank(), got: coords.len() });
        }
        Ok(())
    }

    /// Checks that `coords` can be the class of a simple closed curve.
    pub fn check_simple_curve(self, coords: &[i64]) -> Result<()> {
        self.check_len(coords)?;
        match self.canonical() {
            SurfaceSpec::Planar { .. } => {
                if coords.iter().any(|c| c.abs() > 1) {
                    return Err(Error::UnrealizableEmbedding(format!(
                        "planar class {coords:?} has a winding number outside {{-1, 0, 1}}"
                    )));
                }
                let pos = coords.iter().any(|&c| c > 0);
                let neg = coords.iter().any(|&c| c < 0);
                if pos && neg {
                    return Err(Error::UnrealizableEmbedding(format!(
                        "planar class {coords:?} winds both ways"
                    )));
                }
                Ok(())
            }
            SurfaceSpec::Torus => {
                let (a, b) = (coords[0], coords[1]);
                if (a, b) != (0, 0) && a.gcd(&b) != 1 {
                    return Err(Error::UnrealizableEmbedding(format!(
                        "torus class ({a},{b}) is not primitive"
                    )));
                }
                Ok(())
            }
            SurfaceSpec::Annulus => unreachable!(),
        }
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceSpec::Planar { punctures } => write!(f, "planar({punctures})"),
            SurfaceSpec::Annulus => write!(f, "annulus"),
            SurfaceSpec::Torus => write!(f, "torus"),
        }
    }
}

fn fmt_coords(f: &mut fmt::Formatter<'_>, coords: &[i64]) -> fmt::Result {
    write!(f, "(")?;
    for (k, c) in coords.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{c}")?;
    }
    write!(f, ")")
}

/// An oriented first-homology class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrientedClass(pub Vec<i64>);

impl OrientedClass {
    pub fn zero(rank: usize) -> Self {
        OrientedClass(vec![0; rank])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        OrientedClass(self.0.iter().map(|c| -c).collect())
    }

    pub fn scaled(&self, s: i64) -> Self {
        OrientedClass(self.0.iter().map(|c| s * c).collect())
    }

    pub fn add_assign(&mut self, other: &OrientedClass) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// +1 if the first nonzero coordinate is positive, -1 if negative, 0 for the zero class.
    pub fn sign(&self) -> i64 {
        self.0.iter().find(|&&c| c != 0).map_or(0, |c| c.signum())
    }

    pub fn unoriented(&self) -> UnorientedClass {
        canonicalize(self)
    }
}

impl fmt::Display for OrientedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_coords(f, &self.0)
    }
}

/// Canonical representative of `{v, -v}`: first nonzero coordinate positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnorientedClass(Vec<i64>);

impl UnorientedClass {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// The canonical representative viewed as an oriented class.
    pub fn as_oriented(&self) -> OrientedClass {
        OrientedClass(self.0.clone())
    }
}

impl fmt::Display for UnorientedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_coords(f, &self.0)
    }
}

pub fn canonicalize(v: &OrientedClass) -> UnorientedClass {
    if v.sign() < 0 {
        UnorientedClass(v.neg().0)
    } else {
        UnorientedClass(v.0.clone())
    }
}

pub fn is_essential(c: &UnorientedClass, f: SurfaceSpec) -> Result<bool> {
    f.check_len(&c.0)?;
    Ok(!c.is_zero())
}

pub fn are_parallel(c1: &UnorientedClass, c2: &UnorientedClass, f: SurfaceSpec) -> Result<bool> {
    if !is_essential(c1, f)? || !is_essential(c2, f)? {
        return Err(Error::Domain("parallelism is only defined for essential classes".into()));
    }
    Ok(c1 == c2)
}

/// The chosen positive orientation of an essential curve class.
pub fn positive_orientation(c: &UnorientedClass) -> Result<OrientedClass> {
    if c.is_zero() {
        return Err(Error::Domain("the zero class has no positive orientation".into()));
    }
    Ok(c.as_oriented())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u(v: &[i64]) -> UnorientedClass {
        canonicalize(&OrientedClass(v.to_vec()))
    }

    const P2: SurfaceSpec = SurfaceSpec::Planar { punctures: 2 };

    #[test]
    fn essential_examples() {
        assert!(!is_essential(&u(&[0, 0]), P2).unwrap());
        assert!(is_essential(&u(&[1, 0]), P2).unwrap());
        assert!(is_essential(&u(&[1, 1]), SurfaceSpec::Torus).unwrap());
    }

    #[test]
    fn essential_length_mismatch() {
        let err = is_essential(&u(&[1]), P2).unwrap_err();
        assert_eq!(err, Error::MalformedClass { expected: 2, got: 1 });
    }

    #[test]
    fn parallel_examples() {
        assert!(are_parallel(&u(&[1, 0]), &u(&[1, 0]), P2).unwrap());
        assert!(!are_parallel(&u(&[1, 0]), &u(&[1, 1]), P2).unwrap());
        assert!(are_parallel(&u(&[1, 0]), &u(&[-1, 0]), SurfaceSpec::Torus).unwrap());
        assert!(are_parallel(&u(&[0, 0]), &u(&[1, 0]), P2).is_err());
    }

    #[test]
    fn positive_orientation_examples() {
        assert_eq!(positive_orientation(&u(&[0, -1, 0])).unwrap().0, vec![0, 1, 0]);
        assert_eq!(positive_orientation(&u(&[1, 1])).unwrap().0, vec![1, 1]);
        assert_eq!(positive_orientation(&u(&[-2, 1])).unwrap().0, vec![2, -1]);
        assert!(positive_orientation(&u(&[0, 0])).is_err());
    }

    #[test]
    fn annulus_is_planar_one() {
        assert_eq!(SurfaceSpec::Annulus.canonical(), SurfaceSpec::Planar { punctures: 1 });
        assert_eq!(SurfaceSpec::Annulus.h1_rank(), 1);
        assert_eq!(SurfaceSpec::Torus.h1_rank(), 2);
    }

    #[test]
    fn simple_curve_checks() {
        assert!(P2.check_simple_curve(&[1, 1]).is_ok());
        assert!(P2.check_simple_curve(&[2, 0]).is_err());
        assert!(P2.check_simple_curve(&[1, -1]).is_err());
        assert!(SurfaceSpec::Torus.check_simple_curve(&[2, 4]).is_err());
        assert!(SurfaceSpec::Torus.check_simple_curve(&[2, 3]).is_ok());
    }

    proptest! {
        #[test]
        fn canonicalize_ignores_sign(v in prop::collection::vec(-3i64..=3, 0..4)) {
            let o = OrientedClass(v);
            prop_assert_eq!(canonicalize(&o), canonicalize(&o.neg()));
            let f = SurfaceSpec::Planar { punctures: o.0.len() };
            prop_assert_eq!(is_essential(&canonicalize(&o), f).unwrap(), !o.is_zero());
        }

        #[test]
        fn positive_orientation_idempotent(v in prop::collection::vec(-3i64..=3, 1..4)) {
            let o = OrientedClass(v);
            prop_assume!(!o.is_zero());
            let p = positive_orientation(&canonicalize(&o)).unwrap();
            prop_assert_eq!(positive_orientation(&canonicalize(&p)).unwrap(), p.clone());
            prop_assert_eq!(positive_orientation(&canonicalize(&o.neg())).unwrap(), p);
        }

        #[test]
        fn parallel_is_equivalence(a in 1i64..3, b in -2i64..3, c in 1i64..3) {
            let f = SurfaceSpec::Torus;
            let x = u(&[a, b]);
            let y = u(&[-a, -b]);
            let z = u(&[c, b]);
            prop_assert!(are_parallel(&x, &x, f).unwrap());
            prop_assert_eq!(are_parallel(&x, &z, f).unwrap(), are_parallel(&z, &x, f).unwrap());
            if are_parallel(&x, &y, f).unwrap() && are_parallel(&y, &z, f).unwrap() {
                prop_assert!(are_parallel(&x, &z, f).unwrap());
            }
        }
    }
}
