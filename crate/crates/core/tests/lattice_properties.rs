use std::collections::BTreeSet;

use manin_core::counting::alpha_slice;
use manin_core::lattice::linalg::rank_i64;
use manin_core::lattice::{dual_cone, enumerate_lattice_points, hilbert_basis, LatticeVector, Pairing, RationalPolyhedralCone, RationalPolytope, Space};
use manin_core::models::{builtin, builtin_models};
use manin_core::Rational;
use proptest::prelude::*;

fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..].iter().map(|row| [&row[..j], &row[j + 1..]].concat()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

/// Normal to the hyperplane through `n - 1` vectors, by cofactor expansion.
fn cofactor_normal(rows: &[&Vec<i64>], n: usize) -> Vec<i64> {
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = rows.iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * det(&minor)
        })
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Facet inequalities of a full-dimensional pointed cone, by brute force over subsets of generators.
fn brute_force_facets(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = gens[0].len();
    let mut out = BTreeSet::new();
    let idx: Vec<usize> = (0..gens.len()).collect();
    for subset in subsets(&idx, n - 1) {
        let rows: Vec<&Vec<i64>> = subset.iter().map(|&i| &gens[i]).collect();
        let mut normal = cofactor_normal(&rows, n);
        if normal.iter().all(|&x| x == 0) {
            continue;
        }
        let signs: Vec<i64> = gens.iter().map(|g| dot(&normal, g).signum()).collect();
        if signs.iter().all(|&s| s >= 0) || signs.iter().all(|&s| s <= 0) {
            if signs.iter().any(|&s| s < 0) {
                normal.iter_mut().for_each(|x| *x = -*x);
            }
            let g = normal.iter().fold(0i64, |a, &b| num_gcd(a, b.abs()));
            out.insert(normal.iter().map(|x| x / g).collect::<Vec<_>>());
        }
    }
    out.into_iter().collect()
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut with: Vec<Vec<usize>> = subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    with.extend(subsets(&items[1..], k));
    with
}

/// Random unimodular matrix as a product of elementary row operations.
fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0..n, 0..n, -2i64..=2), 0..6).prop_map(move |ops| {
        let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        for (i, j, k) in ops {
            if i != j {
                let row = m[j].clone();
                m[i].iter_mut().zip(row).for_each(|(a, b)| *a += k * b);
            }
        }
        m
    })
}

fn apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Generators of a full-dimensional pointed cone: perturbed unit vectors in the orthant, moved by a unimodular map.
fn pointed_cone(max_rank: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (2..=max_rank).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(0i64..=3, n), n..n + 3),
            unimodular(n),
        )
            .prop_map(move |(extra, u)| {
                let mut gens: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
                gens.extend(extra.into_iter().filter(|v| v.iter().any(|&x| x != 0)));
                gens.iter().map(|g| apply(&u, g)).collect()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dual_of_dual_is_identity(gens in pointed_cone(4)) {
        let k = RationalPolyhedralCone::from_rays(Space::CurveSpace, gens.clone()).unwrap();
        prop_assert!(k.check_invariants().is_ok());
        let p = Pairing::identity(k.rank());
        let back = dual_cone(&dual_cone(&k, &p).unwrap(), &p).unwrap();
        prop_assert!(back.same_as(&k));
        prop_assert_eq!(back.space(), Space::CurveSpace);

        let mut facets = k.facet_coords();
        facets.sort();
        prop_assert_eq!(facets, brute_force_facets(&gens));
    }

    #[test]
    fn enumeration_matches_box_oracle(gens in pointed_cone(3), d in 1i64..=12) {
        let k = RationalPolyhedralCone::from_rays(Space::CurveSpace, gens.clone()).unwrap();
        let facets = brute_force_facets(&gens);
        // the sum of facet normals is positive on every nonzero point of the cone
        let n = gens[0].len();
        let deg: Vec<i64> = (0..n).map(|j| facets.iter().map(|f| f[j]).sum()).collect();
        let rays = k.ray_coords();
        // every point of degree ≤ d is a convex combination of 0 and the rays scaled to degree d
        let bound: i64 = rays
            .iter()
            .map(|r| {
                let dr = dot(&deg, r);
                r.iter().map(|x| (x.abs() * d + dr - 1) / dr).max().unwrap()
            })
            .max()
            .unwrap();
        let mut want: Vec<Vec<i64>> = Vec::new();
        let mut p = vec![-bound; n];
        loop {
            let dp = dot(&deg, &p);
            if p.iter().any(|&x| x != 0) && dp <= d && facets.iter().all(|f| dot(f, &p) >= 0) {
                want.push(p.clone());
            }
            let mut i = 0;
            while i < n && p[i] == bound {
                p[i] = -bound;
                i += 1;
            }
            if i == n {
                break;
            }
            p[i] += 1;
        }
        want.sort_by_key(|v| (dot(&deg, v), v.clone()));
        let got: Vec<Vec<i64>> = enumerate_lattice_points(&k, &LatticeVector::divisor(deg.clone()), d)
            .unwrap()
            .into_iter()
            .map(|v| v.into_coords())
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn slice_volume_is_unimodular_invariant(u in unimodular(3)) {
        prop_assume!(det(&u).abs() == 1);
        let m = builtin("two_e5").unwrap();
        let slice = alpha_slice(&m).unwrap();
        let moved: Vec<Vec<Rational>> = slice
            .vertices()
            .iter()
            .map(|v| u.iter().map(|row| row.iter().zip(v).fold(Rational::zero(), |s, (a, x)| s + Rational::integer(*a) * x)).collect())
            .collect();
        let q = RationalPolytope::new(Space::CurveSpace, moved).unwrap();
        prop_assert_eq!(q.volume(), Rational::new(1, 45).unwrap());
    }
}

#[test]
fn twenty_unimodular_maps_preserve_volume() {
    // deterministic companion to the property above, with shears in every coordinate pair
    let m = builtin("two_e5").unwrap();
    let slice = alpha_slice(&m).unwrap();
    let mut count = 0;
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            for k in [-3i64, -1, 2, 5] {
                if count == 20 {
                    break;
                }
                let moved: Vec<Vec<Rational>> = slice
                    .vertices()
                    .iter()
                    .map(|v| {
                        let mut w = v.clone();
                        w[i] = &v[i] + &(Rational::integer(k) * &v[j]);
                        w
                    })
                    .collect();
                let q = RationalPolytope::new(Space::CurveSpace, moved).unwrap();
                assert_eq!(q.volume(), Rational::new(1, 45).unwrap());
                count += 1;
            }
        }
    }
    assert_eq!(count, 20);
}

#[test]
fn hilbert_basis_elements_are_irreducible() {
    for m in builtin_models() {
        let deg = LatticeVector::divisor(m.degree_functional());
        let basis = hilbert_basis(&m.nef_curve_cone, &deg, 12).unwrap();
        let top = basis.iter().map(|h| m.degree(h.coords())).max().unwrap();
        let points = enumerate_lattice_points(&m.nef_curve_cone, &deg, top).unwrap();
        for h in &basis {
            for p in &points {
                let rest = h - p;
                assert!(
                    rest.is_zero() || p.is_zero() || !m.nef_curve_cone.contains(&rest),
                    "{}: {h} = {p} + {rest}",
                    m.name
                );
            }
        }
        let coords: Vec<Vec<i64>> = basis.iter().map(|h| h.coords().to_vec()).collect();
        assert_eq!(rank_i64(&coords), m.rank);
    }
}
