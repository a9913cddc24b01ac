use std::collections::BTreeSet;

use num::{BigInt, One};
use serde::Serialize;

use super::dd::extreme_rays;
use super::linalg::{self, Matrix};
use super::{dot, Space};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Convex hull of finitely many rational points, stored by its vertices only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalPolytope {
    space: Space,
    ambient: usize,
    vertices: Vec<Vec<Rational>>,
    /// Affine dimension of the hull.
    #[serde(skip)]
    dim: usize,
    /// Facets as sets of vertex indices; only filled for full-dimensional polytopes.
    #[serde(skip)]
    facets: Vec<BTreeSet<usize>>,
}

fn affine_rank(points: &[&Vec<Rational>]) -> usize {
    let Some((first, rest)) = points.split_first() else { return 0 };
    let diffs: Matrix = rest
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() {
        0
    } else {
        linalg::rank(&diffs)
    }
}

/// Homogenized primitive integer lift `(1, p)·lcm(denominators)`.
fn lift(p: &[Rational]) -> Result<Vec<i64>> {
    let lcm = p.iter().fold(BigInt::one(), |l, r| num::integer::lcm(l, r.denom().clone()));
    let mut v = Vec::with_capacity(p.len() + 1);
    let to_i64 = |b: BigInt| i64::try_from(b).map_err(|_| Error::Overflow("polytope lift"));
    v.push(to_i64(lcm.clone())?);
    for r in p {
        v.push(to_i64(r.numer() * (&lcm / r.denom()))?);
    }
    Ok(super::primitive(&v))
}

/// Extreme points and facets of a full-dimensional point configuration.
fn hull(points: &[Vec<Rational>]) -> Result<(Vec<usize>, Vec<BTreeSet<usize>>)> {
    let dim = points[0].len();
    let lifted: Vec<Vec<i64>> = points.iter().map(|p| lift(p)).collect::<Result<_>>()?;
    let normals = extreme_rays(&lifted, dim + 1)?;
    let incidence: Vec<BTreeSet<usize>> = normals
        .iter()
        .map(|f| (0..points.len()).filter(|&i| dot(f, &lifted[i]) == 0).collect())
        .collect();
    let mut keep = Vec::new();
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    for i in 0..points.len() {
        let tight: Vec<Vec<i64>> = normals.iter().filter(|f| dot(f, &lifted[i]) == 0).cloned().collect();
        if linalg::rank_i64(&tight) == dim && seen.insert(lifted[i].clone()) {
            keep.push(i);
        }
    }
    Ok((keep, incidence))
}

impl RationalPolytope {
    /// Builds the hull of `points`, dropping repeated points and non-vertices.
    pub fn new(space: Space, points: Vec<Vec<Rational>>) -> Result<Self> {
        let ambient = points.first().map_or(0, Vec::len);
        if ambient == 0 {
            return Err(Error::Input("polytope needs at least one point of positive rank".into()));
        }
        if points.iter().any(|p| p.len() != ambient) {
            return Err(Error::Input("polytope points of mixed rank".into()));
        }
        let refs: Vec<&Vec<Rational>> = points.iter().collect();
        let dim = affine_rank(&refs);
        if dim == 0 {
            return Ok(RationalPolytope { space, ambient, vertices: vec![points[0].clone()], dim, facets: vec![] });
        }
        if dim == ambient {
            let (keep, incidence) = hull(&points)?;
            let renumber = |old: usize| keep.iter().position(|&k| k == old);
            let facets = incidence
                .iter()
                .map(|f| f.iter().filter_map(|&i| renumber(i)).collect())
                .collect();
            let vertices = keep.iter().map(|&i| points[i].clone()).collect();
            return Ok(RationalPolytope { space, ambient, vertices, dim, facets });
        }
        // Lower-dimensional: project onto coordinates on which the affine hull maps injectively.
        let first = &points[0];
        let diffs: Vec<Vec<Rational>> =
            points.iter().map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect()).collect();
        let mut coords: Vec<usize> = Vec::new();
        for j in 0..ambient {
            let mut trial = coords.clone();
            trial.push(j);
            let cols: Matrix = diffs.iter().map(|d| trial.iter().map(|&c| d[c].clone()).collect()).collect();
            if linalg::rank(&cols) == trial.len() {
                coords = trial;
            }
        }
        let projected: Vec<Vec<Rational>> =
            points.iter().map(|p| coords.iter().map(|&c| p[c].clone()).collect()).collect();
        let (keep, _) = hull(&projected)?;
        let vertices = keep.iter().map(|&i| points[i].clone()).collect();
        Ok(RationalPolytope { space, ambient, vertices, dim, facets: vec![] })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.ambient
    }

    /// Index of the vertex equal to `p`, if any.
    pub fn vertex_index(&self, p: &[Rational]) -> Option<usize> {
        self.vertices.iter().position(|v| v.as_slice() == p)
    }

    fn face_dim(&self, face: &BTreeSet<usize>) -> usize {
        let pts: Vec<&Vec<Rational>> = face.iter().map(|&i| &self.vertices[i]).collect();
        affine_rank(&pts)
    }

    /// Facets of the face `face` (of affine dimension `dim`), as vertex sets.
    fn subfacets(&self, face: &BTreeSet<usize>, dim: usize) -> Vec<BTreeSet<usize>> {
        let mut out: Vec<BTreeSet<usize>> = Vec::new();
        for f in &self.facets {
            let meet: BTreeSet<usize> = face.intersection(f).copied().collect();
            if meet.len() >= dim && !out.contains(&meet) && self.face_dim(&meet) + 1 == dim {
                out.push(meet);
            }
        }
        out
    }

    /// Pulling triangulation of `face`: cone from `apex` over the facets not containing it.
    fn triangulate(&self, face: &BTreeSet<usize>, dim: usize, apex: usize, out: &mut Vec<Vec<usize>>) {
        if face.len() == dim + 1 {
            out.push(face.iter().copied().collect());
            return;
        }
        for sub in self.subfacets(face, dim) {
            if sub.contains(&apex) {
                continue;
            }
            let next_apex = *sub.iter().next().expect("nonempty facet");
            let mut simplices = Vec::new();
            self.triangulate(&sub, dim - 1, next_apex, &mut simplices);
            for mut s in simplices {
                s.push(apex);
                out.push(s);
            }
        }
    }

    /// Simplices (as vertex index lists) of the pulling triangulation from vertex `apex`.
    pub fn triangulation(&self, apex: usize) -> Result<Vec<Vec<usize>>> {
        if apex >= self.vertices.len() {
            return Err(Error::Input(format!("apex index {apex} out of range")));
        }
        if !self.is_full_dimensional() {
            return Ok(vec![]);
        }
        let all: BTreeSet<usize> = (0..self.vertices.len()).collect();
        let mut out = Vec::new();
        self.triangulate(&all, self.dim, apex, &mut out);
        Ok(out)
    }

    fn simplex_volume(&self, simplex: &[usize]) -> Rational {
        let base = &self.vertices[simplex[0]];
        let m: Matrix = simplex[1..]
            .iter()
            .map(|&i| self.vertices[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let fact: i64 = (1..=self.ambient as i64).product();
        linalg::det(&m).abs() * Rational::new(1, fact).expect("nonzero")
    }

    /// Volume via the pulling triangulation from vertex `apex`.
    pub fn volume_from(&self, apex: usize) -> Result<Rational> {
        Ok(self.triangulation(apex)?.iter().map(|s| self.simplex_volume(s)).sum())
    }

    pub fn volume(&self) -> Rational {
        self.volume_from(0).expect("vertex 0 exists")
    }
}

/// Lattice-normalized volume (the unit cube of ℤⁿ has volume 1); zero when flat.
pub fn polytope_volume(q: &RationalPolytope) -> Rational {
    q.volume()
}
