use std::collections::HashSet;

use super::cone::RationalPolyhedralCone;
use super::enumerate::{enumerate_lattice_points, ray_degrees};
use super::LatticeVector;
use crate::error::{Error, Result};

/// Minimal generating set of the monoid `k ∩ ℤⁿ`, sorted by (degree, coordinates).
///
/// Candidates are the lattice points of degree at most the sum of the ray
/// degrees; every basis element sits in a half-open parallelepiped of some
/// simplicial subcone, so this bound is never exceeded. A point is dropped as
/// soon as subtracting an already-accepted basis element leaves a point of
/// the cone. Afterwards every lattice point of degree `≤ check_bound` is
/// decomposed over the result, and any leftover is reported as an error.
pub fn hilbert_basis(
    k: &RationalPolyhedralCone,
    degree: &LatticeVector,
    check_bound: i64,
) -> Result<Vec<LatticeVector>> {
    let ray_deg = ray_degrees(k, degree.coords())?;
    let bound: i64 = ray_deg.iter().sum();
    let candidates = enumerate_lattice_points(k, degree, bound.max(check_bound))?;

    let mut basis: Vec<LatticeVector> = Vec::new();
    for p in candidates.iter().filter(|p| p.dot(degree.coords()) <= bound) {
        let reducible = basis.iter().any(|h| {
            let rest = p - h;
            !rest.is_zero() && k.contains(&rest)
        });
        if !reducible {
            basis.push(p.clone());
        }
    }

    // Decomposition check: points are visited in increasing degree, so p - h is settled first.
    let deg = degree.coords();
    let mut decomposable: HashSet<Vec<i64>> = HashSet::new();
    for p in candidates.iter().filter(|p| p.dot(deg) <= check_bound) {
        let ok = basis.iter().any(|h| {
            let rest = p - h;
            rest.is_zero() || decomposable.contains(rest.coords())
        });
        if !ok {
            return Err(Error::Incomplete(format!(
                "lattice point {p} of degree {} is not a sum of basis elements",
                p.dot(deg)
            )));
        }
        decomposable.insert(p.coords().to_vec());
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Space;

    fn coords(v: &[LatticeVector]) -> Vec<Vec<i64>> {
        v.iter().map(|x| x.coords().to_vec()).collect()
    }

    #[test]
    fn non_unimodular_plane_cone() {
        let k = RationalPolyhedralCone::from_rays(Space::CurveSpace, vec![vec![1, 0], vec![1, 2]]).unwrap();
        let hb = hilbert_basis(&k, &LatticeVector::divisor(vec![1, 0]), 10).unwrap();
        assert_eq!(coords(&hb), vec![vec![1, 0], vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn orthant() {
        let k = RationalPolyhedralCone::from_rays(
            Space::CurveSpace,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        )
        .unwrap();
        let hb = hilbert_basis(&k, &LatticeVector::divisor(vec![1, 1, 1]), 6).unwrap();
        assert_eq!(coords(&hb), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn two_e5_nef_monoid() {
        let k = RationalPolyhedralCone::from_facets(
            Space::CurveSpace,
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![2, 1, -1], vec![2, -1, 1]],
        )
        .unwrap();
        let hb = hilbert_basis(&k, &LatticeVector::divisor(vec![3, 1, 1]), 20).unwrap();
        assert_eq!(
            coords(&hb),
            vec![
                vec![0, 1, 1],
                vec![1, 0, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![1, 0, 2],
                vec![1, 2, 0]
            ]
        );
    }

    #[test]
    fn high_index_simplicial_cone() {
        // cone over (1,0),(1,5): basis is (1,0),(1,1),...,(1,5)
        let k = RationalPolyhedralCone::from_rays(Space::CurveSpace, vec![vec![1, 0], vec![1, 5]]).unwrap();
        let hb = hilbert_basis(&k, &LatticeVector::divisor(vec![1, 0]), 12).unwrap();
        assert_eq!(hb.len(), 6);
        let k = RationalPolyhedralCone::from_rays(Space::CurveSpace, vec![vec![1, 0], vec![2, 5]]).unwrap();
        let hb = hilbert_basis(&k, &LatticeVector::divisor(vec![1, 1]), 20).unwrap();
        assert_eq!(coords(&hb), vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![2, 5]]);
    }
}
