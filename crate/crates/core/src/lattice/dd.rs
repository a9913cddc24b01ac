//! Double description: extreme rays of `{ y : a·y ≥ 0 for every constraint a }`.
//!
//! Only pointed cones are handled, i.e. the constraints must span the ambient
//! space. The iteration starts from a simplicial cone cut out by `dim`
//! independent constraints and adds the remaining ones one at a time, joining
//! adjacent pairs of rays on opposite sides of each new hyperplane.

use std::collections::BTreeSet;

use super::linalg::{independent_subset, rank_i64, solve, to_rational};
use super::{dot, primitive};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug)]
struct Ray {
    v: Vec<i64>,
    /// Indices of processed constraints vanishing on `v`.
    zeros: BTreeSet<usize>,
}

fn to_primitive_i64(v: &[i128]) -> Result<Vec<i64>> {
    let g = v.iter().fold(0i128, |g, &x| num::integer::gcd(g, x));
    v.iter()
        .map(|&x| {
            let y = if g == 0 { x } else { x / g };
            i64::try_from(y).map_err(|_| Error::Overflow("double description"))
        })
        .collect()
}

/// Primitive integer generator of the ray `A0⁻¹·e_j`.
fn inverse_column(a0: &[Vec<i64>], j: usize) -> Result<Vec<i64>> {
    let n = a0.len();
    let mut e = vec![Rational::zero(); n];
    e[j] = Rational::one();
    let x = solve(&to_rational(a0), &e).ok_or_else(|| Error::UnsupportedCone("singular start".into()))?;
    let lcm = x.iter().fold(num::BigInt::from(1), |l, r| num::integer::lcm(l, r.denom().clone()));
    let scaled: Vec<i128> = x
        .iter()
        .map(|r| {
            let v = r.numer() * (&lcm / r.denom());
            i128::try_from(v).map_err(|_| Error::Overflow("double description"))
        })
        .collect::<Result<_>>()?;
    to_primitive_i64(&scaled)
}

/// Extreme rays of the pointed cone `{ y ∈ ℝ^dim : a·y ≥ 0 }`, as primitive
/// integer vectors sorted lexicographically.
pub fn extreme_rays(constraints: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>> {
    if constraints.iter().any(|a| a.len() != dim) {
        return Err(Error::Input("constraint of wrong length".into()));
    }
    let cons: Vec<Vec<i64>> = constraints.iter().filter(|a| a.iter().any(|&x| x != 0)).cloned().collect();
    let start = independent_subset(&cons);
    if start.len() < dim {
        return Err(Error::UnsupportedCone(format!(
            "constraints have rank {} < {dim}; the cone is not pointed",
            start.len()
        )));
    }
    let a0: Vec<Vec<i64>> = start.iter().map(|&i| cons[i].clone()).collect();
    let mut rays: Vec<Ray> = Vec::with_capacity(dim);
    for j in 0..dim {
        let v = inverse_column(&a0, j)?;
        let zeros = start.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &i)| i).collect();
        rays.push(Ray { v, zeros });
    }

    for (idx, a) in cons.iter().enumerate() {
        if start.contains(&idx) {
            continue;
        }
        let vals: Vec<i64> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (r, &s) in rays.iter().zip(&vals) {
            if s >= 0 {
                let mut r = r.clone();
                if s == 0 {
                    r.zeros.insert(idx);
                }
                next.push(r);
            }
        }
        for (p, &sp) in rays.iter().zip(&vals) {
            if sp <= 0 {
                continue;
            }
            for (n, &sn) in rays.iter().zip(&vals) {
                if sn >= 0 {
                    continue;
                }
                let common: BTreeSet<usize> = p.zeros.intersection(&n.zeros).copied().collect();
                if common.len() + 2 < dim {
                    continue;
                }
                let rows: Vec<Vec<i64>> = common.iter().map(|&k| cons[k].clone()).collect();
                if rank_i64(&rows) != dim - 2 {
                    continue;
                }
                let combo: Vec<i128> = p
                    .v
                    .iter()
                    .zip(&n.v)
                    .map(|(&x, &y)| i128::from(sp) * i128::from(y) - i128::from(sn) * i128::from(x))
                    .collect();
                let v = to_primitive_i64(&combo)?;
                let mut zeros = common;
                zeros.insert(idx);
                next.push(Ray { v, zeros });
            }
        }
        rays = next;
    }

    let mut out: Vec<Vec<i64>> = rays.into_iter().map(|r| primitive(&r.v)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}
