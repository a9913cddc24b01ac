//! Exact linear algebra over the rationals.

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn to_rational(rows: &[Vec<i64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| Rational::integer(x)).collect()).collect()
}

/// Row-reduces in place and returns the pivot columns.
fn row_reduce(m: &mut Matrix) -> Vec<usize> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(p) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip().expect("nonzero pivot");
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..nrows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..ncols {
                    let delta = &f * &m[row][c];
                    m[r][c] -= &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &Matrix) -> usize {
    let mut m = rows.clone();
    row_reduce(&mut m).len()
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank(&to_rational(rows))
}

pub fn det(m: &Matrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        let inv = a[col][col].recip().expect("nonzero pivot");
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let delta = &f * &a[col][c];
                a[r][c] -= &delta;
            }
        }
    }
    det
}

pub fn det_i64(m: &[Vec<i64>]) -> Rational {
    det(&to_rational(m))
}

/// Some solution `x` of `A·x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][ncols].clone();
    }
    debug_assert!(nrows >= pivots.len());
    Some(x)
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_subset(rows: &[Vec<i64>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        basis.push(r.clone());
        if rank_i64(&basis) == basis.len() {
            chosen.push(i);
        } else {
            basis.pop();
        }
    }
    chosen
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let ncols = m.first().map_or(0, Vec::len);
    (0..ncols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn determinant() {
        assert_eq!(det_i64(&[vec![2, 1], vec![1, 3]]), Rational::integer(5));
        assert_eq!(det_i64(&[vec![0, 1], vec![1, 0]]), Rational::integer(-1));
        assert_eq!(det_i64(&[vec![1, 2], vec![2, 4]]), Rational::zero());
        assert_eq!(
            det_i64(&[vec![1, 0, 2], vec![1, 2, 0], vec![0, 1, 1]]),
            Rational::integer(4)
        );
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_i64(&[vec![1, 2, 3], vec![2, 4, 6]]), 1);
        assert_eq!(rank_i64(&[vec![1, 0], vec![0, 1], vec![1, 1]]), 2);
        assert_eq!(independent_subset(&[vec![1, 1], vec![2, 2], vec![0, 1]]), vec![0, 2]);
    }

    #[test]
    fn solving() {
        let a = to_rational(&[vec![2, 1], vec![1, 3]]);
        let x = solve(&a, &[Rational::integer(1), Rational::integer(2)]).unwrap();
        assert_eq!(x, vec![q(1, 5), q(3, 5)]);
        let sing = to_rational(&[vec![1, 1], vec![2, 2]]);
        assert!(solve(&sing, &[Rational::integer(1), Rational::integer(3)]).is_none());
        assert!(solve(&sing, &[Rational::integer(1), Rational::integer(2)]).is_some());
    }
}
