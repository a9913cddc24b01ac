use serde::Serialize;

use super::dd::extreme_rays;
use super::linalg::{rank_i64, solve, to_rational};
use super::{dot, primitive, LatticeVector, Pairing, Space};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Pointed, full-dimensional rational polyhedral cone, stored with both its
/// primitive extreme rays and its primitive inward facet normals.
///
/// Facet normals are covectors in the dual coordinate space: `v` lies in the
/// cone iff `f·v ≥ 0` (plain dot product) for every facet `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalPolyhedralCone {
    space: Space,
    rank: usize,
    rays: Vec<LatticeVector>,
    facets: Vec<LatticeVector>,
}

fn check_vectors(vs: &[Vec<i64>], rank: usize, what: &str) -> Result<()> {
    if vs.is_empty() {
        return Err(Error::UnsupportedCone(format!("no {what} given")));
    }
    if let Some(v) = vs.iter().find(|v| v.len() != rank) {
        return Err(Error::Input(format!("{what} {v:?} does not have rank {rank}")));
    }
    if vs.iter().any(|v| v.iter().all(|&x| x == 0)) {
        return Err(Error::Input(format!("zero vector among {what}")));
    }
    Ok(())
}

/// Keeps only primitive, distinct generators that are extreme for `normals`.
fn extreme_subset(gens: &[Vec<i64>], normals: &[Vec<i64>], rank: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = gens
        .iter()
        .map(|g| primitive(g))
        .filter(|g| {
            let tight: Vec<Vec<i64>> = normals.iter().filter(|f| dot(f, g) == 0).cloned().collect();
            rank_i64(&tight) + 1 == rank
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

impl RationalPolyhedralCone {
    /// Builds the cone generated by `rays`; redundant or repeated generators are dropped.
    pub fn from_rays(space: Space, rays: Vec<Vec<i64>>) -> Result<Self> {
        let rank = rays.first().map_or(0, Vec::len);
        check_vectors(&rays, rank, "rays")?;
        if rank_i64(&rays) < rank {
            return Err(Error::UnsupportedCone("rays do not span the ambient space".into()));
        }
        let facets = extreme_rays(&rays, rank)?;
        if rank_i64(&facets) < rank {
            return Err(Error::UnsupportedCone("cone contains a line".into()));
        }
        let rays = extreme_subset(&rays, &facets, rank);
        Ok(Self::assemble(space, rank, rays, facets))
    }

    /// Builds the cone cut out by inward normals `facets`; redundant inequalities are dropped.
    pub fn from_facets(space: Space, facets: Vec<Vec<i64>>) -> Result<Self> {
        let rank = facets.first().map_or(0, Vec::len);
        check_vectors(&facets, rank, "facet normals")?;
        let rays = extreme_rays(&facets, rank)?;
        if rank_i64(&rays) < rank {
            return Err(Error::UnsupportedCone("cone is not full-dimensional".into()));
        }
        let facets = extreme_subset(&facets, &rays, rank);
        Ok(Self::assemble(space, rank, rays, facets))
    }

    fn assemble(space: Space, rank: usize, rays: Vec<Vec<i64>>, facets: Vec<Vec<i64>>) -> Self {
        let wrap = |s: Space, vs: Vec<Vec<i64>>| {
            vs.into_iter().map(|v| LatticeVector::new(s, v).expect("nonempty")).collect()
        };
        RationalPolyhedralCone {
            space,
            rank,
            rays: wrap(space, rays),
            facets: wrap(space.dual(), facets),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn facets(&self) -> &[LatticeVector] {
        &self.facets
    }

    pub fn ray_coords(&self) -> Vec<Vec<i64>> {
        self.rays.iter().map(|r| r.coords().to_vec()).collect()
    }

    pub fn facet_coords(&self) -> Vec<Vec<i64>> {
        self.facets.iter().map(|f| f.coords().to_vec()).collect()
    }

    pub fn contains_coords(&self, v: &[i64]) -> bool {
        self.facets.iter().all(|f| f.dot(v) >= 0)
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        v.space() == self.space && v.rank() == self.rank && self.contains_coords(v.coords())
    }

    /// Values of each facet normal on `v`, in facet order.
    pub fn facet_profile(&self, v: &[i64]) -> Vec<i64> {
        self.facets.iter().map(|f| f.dot(v)).collect()
    }

    /// Same cone as a set: equal ray sets (both are stored sorted and primitive).
    pub fn same_as(&self, other: &RationalPolyhedralCone) -> bool {
        self.space == other.space && self.rank == other.rank && self.rays == other.rays
    }

    /// Verifies the stored representation: rays inside, pointedness, every ray extreme.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let rays = self.ray_coords();
        let facets = self.facet_coords();
        for r in &rays {
            if facets.iter().any(|f| dot(f, r) < 0) {
                return Err(format!("ray {r:?} violates a facet inequality"));
            }
            let tight: Vec<Vec<i64>> = facets.iter().filter(|f| dot(f, r) == 0).cloned().collect();
            if rank_i64(&tight) + 1 != self.rank {
                return Err(format!("ray {r:?} is not extreme"));
            }
        }
        if rank_i64(&facets) != self.rank {
            return Err("facet normals do not span the dual space".into());
        }
        if rank_i64(&rays) != self.rank {
            return Err("rays do not span the space".into());
        }
        Ok(())
    }

    /// Nonnegative rational coefficients over the rays reproducing `v`, when `v` is in the cone.
    pub fn decompose(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if v.len() != self.rank {
            return None;
        }
        let nrays = self.rays.len();
        if v.iter().all(Rational::is_zero) {
            return Some(vec![Rational::zero(); nrays]);
        }
        // Carathéodory: some linearly independent subset of rays carries v.
        for size in 1..=self.rank.min(nrays) {
            for subset in combinations(nrays, size) {
                let cols: Vec<Vec<i64>> = subset.iter().map(|&i| self.rays[i].coords().to_vec()).collect();
                if rank_i64(&cols) != size {
                    continue;
                }
                let a = to_rational(&super::linalg::transpose(&cols));
                let Some(x) = solve(&a, v) else { continue };
                if x.iter().any(Rational::is_negative) {
                    continue;
                }
                let mut coeffs = vec![Rational::zero(); nrays];
                for (k, &i) in subset.iter().enumerate() {
                    coeffs[i] = x[k].clone();
                }
                return Some(coeffs);
            }
        }
        None
    }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The cone of vectors in the paired space that pair nonnegatively with all of `k`.
///
/// The rays of the result are recomputed from the inequalities by double
/// description, so `dual_cone(dual_cone(k))` is an honest round trip.
pub fn dual_cone(k: &RationalPolyhedralCone, p: &Pairing) -> Result<RationalPolyhedralCone> {
    if p.rank() != k.rank() {
        return Err(Error::Input(format!("pairing rank {} vs cone rank {}", p.rank(), k.rank())));
    }
    k.check_invariants().map_err(Error::UnsupportedCone)?;
    let target = k.space().dual();
    let inequalities: Vec<Vec<i64>> =
        k.rays().iter().map(|r| primitive(&p.functional_on(target, r.coords()))).collect();
    RationalPolyhedralCone::from_facets(target, inequalities)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_dual() {
        let k = RationalPolyhedralCone::from_rays(Space::DivisorSpace, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let d = dual_cone(&k, &Pairing::identity(2)).unwrap();
        assert_eq!(d.space(), Space::CurveSpace);
        assert_eq!(d.ray_coords(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn two_e5_dual() {
        let pseff = RationalPolyhedralCone::from_rays(
            Space::DivisorSpace,
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![2, 1, -1], vec![2, -1, 1]],
        )
        .unwrap();
        let nef = dual_cone(&pseff, &Pairing::identity(3)).unwrap();
        assert_eq!(
            nef.ray_coords(),
            vec![vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 2], vec![1, 2, 0]]
        );
        let back = dual_cone(&nef, &Pairing::identity(3)).unwrap();
        assert!(back.same_as(&pseff));
    }

    #[test]
    fn redundant_rays_dropped() {
        let k = RationalPolyhedralCone::from_rays(
            Space::CurveSpace,
            vec![vec![1, 0], vec![2, 0], vec![1, 1], vec![0, 1]],
        )
        .unwrap();
        assert_eq!(k.ray_coords(), vec![vec![0, 1], vec![1, 0]]);
        k.check_invariants().unwrap();
    }

    #[test]
    fn rejects_degenerate_cones() {
        // half-plane contains a line
        let half = RationalPolyhedralCone::from_rays(
            Space::CurveSpace,
            vec![vec![1, 0], vec![-1, 0], vec![0, 1]],
        );
        assert!(matches!(half, Err(Error::UnsupportedCone(_))));
        let flat = RationalPolyhedralCone::from_rays(Space::CurveSpace, vec![vec![1, 0, 0], vec![0, 1, 0]]);
        assert!(matches!(flat, Err(Error::UnsupportedCone(_))));
    }

    #[test]
    fn non_identity_pairing_dual() {
        let p = Pairing::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        let k = RationalPolyhedralCone::from_rays(Space::DivisorSpace, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let d = dual_cone(&k, &p).unwrap();
        for r in d.rays() {
            for g in k.rays() {
                assert!(super::super::pair(g, r, &p).unwrap() >= 0);
            }
        }
        let back = dual_cone(&d, &p).unwrap();
        assert!(back.same_as(&k));
    }

    #[test]
    fn decomposition_over_rays() {
        let k = RationalPolyhedralCone::from_rays(Space::DivisorSpace, vec![vec![1, 0], vec![1, 2]]).unwrap();
        let v = vec![Rational::integer(2), Rational::integer(1)];
        let c = k.decompose(&v).unwrap();
        // rays sorted: (1,0), (1,2)
        assert_eq!(c, vec![Rational::new(3, 2).unwrap(), Rational::new(1, 2).unwrap()]);
        assert!(k.decompose(&[Rational::integer(0), Rational::integer(1)]).is_none());
    }
}
