use super::cone::RationalPolyhedralCone;
use super::{ceil_div, dot, floor_div, LatticeVector};
use crate::error::{Error, Result};

/// Degrees of the rays under `degree`, failing unless all are strictly positive.
pub(crate) fn ray_degrees(k: &RationalPolyhedralCone, degree: &[i64]) -> Result<Vec<i64>> {
    if degree.len() != k.rank() {
        return Err(Error::Input(format!(
            "degree functional of rank {} for a cone of rank {}",
            degree.len(),
            k.rank()
        )));
    }
    k.rays()
        .iter()
        .map(|r| {
            let d = r.dot(degree);
            if d > 0 {
                Ok(d)
            } else {
                Err(Error::Grading(format!("degree functional is {d} on ray {r}")))
            }
        })
        .collect()
}

/// Visits every integral point `v ≠ 0` of `k` with `degree·v ≤ d_max`, in no particular order.
pub(crate) fn for_each_point<F: FnMut(&[i64])>(
    k: &RationalPolyhedralCone,
    degree: &[i64],
    d_max: i64,
    mut f: F,
) -> Result<()> {
    let ray_deg = ray_degrees(k, degree)?;
    if d_max <= 0 {
        return Ok(());
    }
    let n = k.rank();
    // The slice is conv(0, d_max·r/deg r), so its coordinates are bounded by those vertices.
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for (r, &dr) in k.rays().iter().zip(&ray_deg) {
        for j in 0..n {
            let num = d_max * r.coords()[j];
            lo[j] = lo[j].min(floor_div(num, dr));
            hi[j] = hi[j].max(ceil_div(num, dr));
        }
    }
    let mut constraints: Vec<Vec<i64>> = k.facet_coords();
    constraints.push(degree.iter().map(|d| -d).collect());
    let offsets: Vec<i64> = std::iter::repeat_n(0, constraints.len() - 1).chain([d_max]).collect();

    let mut point = vec![0i64; n];
    scan(0, &mut point, &lo, &hi, &constraints, &offsets, &mut f);
    Ok(())
}

/// Recursive box scan; the last coordinate's range is solved from the inequalities directly.
fn scan<F: FnMut(&[i64])>(
    depth: usize,
    point: &mut Vec<i64>,
    lo: &[i64],
    hi: &[i64],
    constraints: &[Vec<i64>],
    offsets: &[i64],
    f: &mut F,
) {
    let n = point.len();
    if depth + 1 < n {
        for x in lo[depth]..=hi[depth] {
            point[depth] = x;
            scan(depth + 1, point, lo, hi, constraints, offsets, f);
        }
        return;
    }
    // Each constraint reads c·point + offset ≥ 0.
    let last = n - 1;
    let (mut a, mut b) = (lo[last], hi[last]);
    for (c, &off) in constraints.iter().zip(offsets) {
        let partial: i64 = dot(&c[..last], &point[..last]) + off;
        let cl = c[last];
        if cl == 0 {
            if partial < 0 {
                return;
            }
        } else if cl > 0 {
            // x ≥ -partial / cl
            a = a.max(ceil_div(-partial, cl));
        } else {
            // x ≤ partial / |cl|
            b = b.min(floor_div(partial, -cl));
        }
        if a > b {
            return;
        }
    }
    for x in a..=b {
        point[last] = x;
        if x == 0 && point[..last].iter().all(|&y| y == 0) {
            continue;
        }
        f(point);
    }
}

/// All nonzero integral points of `k` with `degree·v ≤ d_max`, sorted by (degree, coordinates).
pub fn enumerate_lattice_points(
    k: &RationalPolyhedralCone,
    degree: &LatticeVector,
    d_max: i64,
) -> Result<Vec<LatticeVector>> {
    if degree.space() != k.space().dual() {
        return Err(Error::Input("degree functional must live in the dual space".into()));
    }
    let deg = degree.coords();
    let mut pts: Vec<Vec<i64>> = Vec::new();
    for_each_point(k, deg, d_max, |p| pts.push(p.to_vec()))?;
    pts.sort_by_cached_key(|p| (dot(deg, p), p.clone()));
    Ok(pts
        .into_iter()
        .map(|p| LatticeVector::new(k.space(), p).expect("rank > 0"))
        .collect())
}

/// Number of nonzero integral points of each degree `0..=d_max` (index = degree).
pub fn points_per_degree(k: &RationalPolyhedralCone, degree: &[i64], d_max: i64) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; usize::try_from(d_max.max(0)).unwrap_or(0) + 1];
    for_each_point(k, degree, d_max, |p| counts[dot(degree, p) as usize] += 1)?;
    Ok(counts)
}
