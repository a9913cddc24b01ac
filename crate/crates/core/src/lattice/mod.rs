//! Integer lattices of curve and divisor classes, the pairing between them,
//! rational polyhedral cones, lattice-point enumeration and polytope volumes.

pub mod cone;
pub mod dd;
pub mod enumerate;
pub mod hilbert;
pub mod linalg;
pub mod polytope;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cone::{dual_cone, RationalPolyhedralCone};
pub use enumerate::enumerate_lattice_points;
pub use hilbert::hilbert_basis;
pub use polytope::{polytope_volume, RationalPolytope};

/// Which side of the intersection pairing a vector lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    /// Numerical classes of 1-cycles, N₁.
    CurveSpace,
    /// Numerical classes of divisors, N¹.
    DivisorSpace,
}

impl Space {
    pub fn dual(self) -> Space {
        match self {
            Space::CurveSpace => Space::DivisorSpace,
            Space::DivisorSpace => Space::CurveSpace,
        }
    }
}

/// Integer coordinate vector tagged with the space it lives in.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    space: Space,
    coords: Vec<i64>,
}

impl LatticeVector {
    pub fn new(space: Space, coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Input("lattice vector of rank 0".into()));
        }
        Ok(LatticeVector { space, coords })
    }

    pub fn curve(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "lattice vector of rank 0");
        LatticeVector { space: Space::CurveSpace, coords }
    }

    pub fn divisor(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "lattice vector of rank 0");
        LatticeVector { space: Space::DivisorSpace, coords }
    }

    pub fn zero(space: Space, rank: usize) -> Self {
        LatticeVector { space, coords: vec![0; rank] }
    }

    pub fn unit(space: Space, rank: usize, i: usize) -> Self {
        let mut coords = vec![0; rank];
        coords[i] = 1;
        LatticeVector { space, coords }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, k: i64) -> LatticeVector {
        LatticeVector { space: self.space, coords: self.coords.iter().map(|c| c * k).collect() }
    }

    /// Plain coordinate dot product (no pairing matrix involved).
    pub fn dot(&self, other: &[i64]) -> i64 {
        dot(&self.coords, other)
    }

    pub fn content(&self) -> i64 {
        content(&self.coords)
    }

    /// Divides out the gcd of the coordinates.
    pub fn primitive(&self) -> LatticeVector {
        LatticeVector { space: self.space, coords: primitive(&self.coords) }
    }

    pub(crate) fn check_compatible(&self, other: &LatticeVector) -> Result<()> {
        if self.space != other.space || self.rank() != other.rank() {
            return Err(Error::Input(format!(
                "incompatible vectors {:?} and {:?}",
                self, other
            )));
        }
        Ok(())
    }

    /// Sum of two vectors of the same space and rank.
    pub fn checked_add(&self, other: &LatticeVector) -> Result<LatticeVector> {
        self.check_compatible(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &LatticeVector) -> Result<LatticeVector> {
        self.check_compatible(other)?;
        Ok(self - other)
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.space {
            Space::CurveSpace => "N1",
            Space::DivisorSpace => "N^1",
        };
        write!(f, "{tag}{:?}", self.coords)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

// Vectors serialize as bare integer arrays; the space is implied by context.
impl Serialize for LatticeVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.rank(), rhs.rank());
        LatticeVector {
            space: self.space,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.rank(), rhs.rank());
        LatticeVector {
            space: self.space,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        self.scaled(-1)
    }
}

/// Nondegenerate integer pairing `N¹ × N₁ → ℤ`, `(D, C) ↦ Dᵀ·M·C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    matrix: Vec<Vec<i64>>,
}

impl Pairing {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Input("pairing matrix must be square and nonempty".into()));
        }
        if linalg::det_i64(&matrix).is_zero() {
            return Err(Error::Input("pairing matrix is degenerate".into()));
        }
        Ok(Pairing { matrix })
    }

    pub fn identity(rank: usize) -> Self {
        let matrix = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        Pairing { matrix }
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn is_identity(&self) -> bool {
        *self == Pairing::identity(self.rank())
    }

    /// Covector on curve coordinates representing `C ↦ D·C`.
    pub fn divisor_functional(&self, d: &[i64]) -> Vec<i64> {
        let n = self.rank();
        (0..n).map(|j| (0..n).map(|i| d[i] * self.matrix[i][j]).sum()).collect()
    }

    /// Covector on divisor coordinates representing `D ↦ D·C`.
    pub fn curve_functional(&self, c: &[i64]) -> Vec<i64> {
        self.matrix.iter().map(|row| dot(row, c)).collect()
    }

    /// Covector pairing against vectors of `space` given a vector of the dual space.
    pub fn functional_on(&self, space: Space, v: &[i64]) -> Vec<i64> {
        match space {
            Space::CurveSpace => self.divisor_functional(v),
            Space::DivisorSpace => self.curve_functional(v),
        }
    }
}

/// Intersection number `D·C`.
pub fn pair(d: &LatticeVector, c: &LatticeVector, p: &Pairing) -> Result<i64> {
    if d.space() != Space::DivisorSpace || c.space() != Space::CurveSpace {
        return Err(Error::Input("pair expects a divisor class and a curve class".into()));
    }
    if d.rank() != p.rank() || c.rank() != p.rank() {
        return Err(Error::Input(format!(
            "rank mismatch: divisor {}, curve {}, pairing {}",
            d.rank(),
            c.rank(),
            p.rank()
        )));
    }
    Ok(dot(&p.divisor_functional(d.coords()), c.coords()))
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &c| g.gcd(&c))
}

pub(crate) fn primitive(v: &[i64]) -> Vec<i64> {
    let g = content(v);
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|c| c / g).collect()
    }
}

pub(crate) fn floor_div(a: i64, b: i64) -> i64 {
    Integer::div_floor(&a, &b)
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    -Integer::div_floor(&-a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_examples() {
        let id3 = Pairing::identity(3);
        let e1 = LatticeVector::unit(Space::DivisorSpace, 3, 0);
        let c1 = LatticeVector::unit(Space::CurveSpace, 3, 0);
        assert_eq!(pair(&e1, &c1, &id3).unwrap(), 1);

        let anti = LatticeVector::divisor(vec![3, 1, 1]);
        let r1 = LatticeVector::curve(vec![0, 1, 1]);
        assert_eq!(pair(&anti, &r1, &id3).unwrap(), 2);

        let zero = LatticeVector::zero(Space::DivisorSpace, 3);
        assert_eq!(pair(&zero, &LatticeVector::curve(vec![5, -7, 2]), &id3).unwrap(), 0);
    }

    #[test]
    fn pair_rank_mismatch() {
        let p = Pairing::identity(2);
        let d = LatticeVector::divisor(vec![1, 0, 0]);
        let c = LatticeVector::curve(vec![1, 0, 0]);
        assert!(matches!(pair(&d, &c, &p), Err(Error::Input(_))));
        // swapped spaces
        let d2 = LatticeVector::curve(vec![1, 0]);
        let c2 = LatticeVector::curve(vec![1, 0]);
        assert!(pair(&d2, &c2, &p).is_err());
    }

    #[test]
    fn nonidentity_pairing() {
        let p = Pairing::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        let d = LatticeVector::divisor(vec![2, 3]);
        let c = LatticeVector::curve(vec![1, -1]);
        // [2 3]·[[1,1],[0,1]] = [2, 5]; ·(1,-1) = -3
        assert_eq!(pair(&d, &c, &p).unwrap(), -3);
        assert!(Pairing::new(vec![vec![1, 2], vec![2, 4]]).is_err());
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[4, -6, 0]), vec![2, -3, 0]);
        assert_eq!(primitive(&[0, 0]), vec![0, 0]);
    }
}
