//! Dense Gaussian elimination over Q for small systems.

use num_traits::{One, Zero};

use super::Rational;

pub type QMatrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(a: &mut QMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    if !a[r][j].is_zero() {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &[Vec<Rational>]) -> usize {
    let mut m = a.to_vec();
    rref(&mut m).len()
}

pub fn det(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c].clone();
        d *= &piv;
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &piv;
                for j in c..n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    d
}

pub fn inverse(a: &[Vec<Rational>]) -> Option<QMatrix> {
    let n = a.len();
    let mut aug: QMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Some solution of `a x = b`, or `None` if the system is inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: QMatrix = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Basis of the right null space of `a`.
pub fn nullspace(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m = a.to_vec();
    let piv = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &c) in piv.iter().enumerate() {
                v[c] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Coordinates of `v` in the (linearly independent) family `basis`, if `v`
/// lies in its span.
pub fn coords_in(basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    let dim = v.len();
    let a: QMatrix = (0..dim)
        .map(|i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();
    let x = solve(&a, v)?;
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn m(rows: &[&[i64]]) -> QMatrix {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn det_of_permutation_and_singular() {
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), q(-1));
        assert_eq!(det(&m(&[&[1, 2], &[2, 4]])), q(0));
        assert_eq!(det(&m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]])), q(6));
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &a {
                let s: Rational = row.iter().zip(&v).map(|(x, y)| x * y).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn inconsistent_system() {
        let a = m(&[&[1, 1], &[1, 1]]);
        assert!(solve(&a, &[q(1), q(2)]).is_none());
        assert_eq!(solve(&a, &[q(1), q(1)]).unwrap(), vec![q(1), q(0)]);
    }
}
