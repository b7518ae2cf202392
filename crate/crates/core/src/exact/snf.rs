//! Smith normal form by row and column reduction with smallest-pivot
//! selection.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::IntegerMatrix;

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal with
/// non-negative entries `d₁ | d₂ | …`. The inverses of `u` and `v` are
/// tracked alongside.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithDecomposition {
    pub d: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v_inv: IntegerMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct Transforms {
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

struct Reducer {
    a: Vec<Vec<BigInt>>,
    rows: usize,
    cols: usize,
    t: Option<Transforms>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

// row_i -= q * row_t on every row-indexed array
fn row_axpy(m: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt) {
    let (src, dst) = if i < t {
        let (lo, hi) = m.split_at_mut(t);
        (&hi[0], &mut lo[i])
    } else {
        let (lo, hi) = m.split_at_mut(i);
        (&lo[t], &mut hi[0])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

// col_j -= q * col_t
fn col_axpy(m: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt) {
    for row in m.iter_mut() {
        if !row[t].is_zero() {
            let s = q * &row[t];
            row[j] -= s;
        }
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

impl Reducer {
    fn row_op(&mut self, i: usize, t: usize, q: &BigInt) {
        row_axpy(&mut self.a, i, t, q);
        if let Some(tr) = &mut self.t {
            row_axpy(&mut tr.u, i, t, q);
            // inverse: column t of u_inv += q * column i
            let neg = -q.clone();
            col_axpy(&mut tr.u_inv, t, i, &neg);
        }
    }

    fn col_op(&mut self, j: usize, t: usize, q: &BigInt) {
        col_axpy(&mut self.a, j, t, q);
        if let Some(tr) = &mut self.t {
            col_axpy(&mut tr.v, j, t, q);
            let neg = -q.clone();
            row_axpy(&mut tr.v_inv, t, j, &neg);
        }
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        self.a.swap(i, k);
        if let Some(tr) = &mut self.t {
            tr.u.swap(i, k);
            swap_cols(&mut tr.u_inv, i, k);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        swap_cols(&mut self.a, j, k);
        if let Some(tr) = &mut self.t {
            swap_cols(&mut tr.v, j, k);
            tr.v_inv.swap(j, k);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        if let Some(tr) = &mut self.t {
            for x in tr.u[i].iter_mut() {
                *x = -std::mem::take(x);
            }
            for row in tr.u_inv.iter_mut() {
                row[i] = -std::mem::take(&mut row[i]);
            }
        }
    }

    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        for c in t..self.cols {
            let best = (t..self.rows)
                .filter(|&r| !self.a[r][c].is_zero())
                .min_by(|&x, &y| self.a[x][c].magnitude().cmp(self.a[y][c].magnitude()));
            if let Some(r) = best {
                return Some((r, c));
            }
        }
        None
    }

    fn diagonalize(&mut self) -> usize {
        let mut t = 0;
        while t < self.rows.min(self.cols) {
            let Some((r, c)) = self.find_pivot(t) else {
                break;
            };
            self.swap_rows(t, r);
            self.swap_cols(t, c);
            loop {
                let mut clean = true;
                for i in t + 1..self.rows {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = self.a[i][t].div_floor(&self.a[t][t]);
                    self.row_op(i, t, &q);
                    if !self.a[i][t].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..self.cols {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = self.a[t][j].div_floor(&self.a[t][t]);
                    self.col_op(j, t, &q);
                    if !self.a[t][j].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
                // move the smallest remainder into the pivot position
                let mut best: Option<(bool, usize)> = None;
                let mut best_mag: Option<BigInt> = None;
                for i in t + 1..self.rows {
                    let x = &self.a[i][t];
                    if !x.is_zero() && best_mag.as_ref().is_none_or(|m| x.magnitude() < m.magnitude()) {
                        best = Some((true, i));
                        best_mag = Some(x.abs());
                    }
                }
                for j in t + 1..self.cols {
                    let x = &self.a[t][j];
                    if !x.is_zero() && best_mag.as_ref().is_none_or(|m| x.magnitude() < m.magnitude()) {
                        best = Some((false, j));
                        best_mag = Some(x.abs());
                    }
                }
                match best {
                    Some((true, i)) => self.swap_rows(t, i),
                    Some((false, j)) => self.swap_cols(t, j),
                    None => unreachable!("unclean pivot without remainder"),
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }

    /// Replaces diag(a, b) at positions i < j by diag(gcd, lcm).
    fn gcd_fix(&mut self, i: usize, j: usize) {
        let a = self.a[i][i].clone();
        let b = self.a[j][j].clone();
        let ext = a.extended_gcd(&b);
        let (g, x, y) = (ext.gcd, ext.x, ext.y);
        let ag = &a / &g;
        let bg = &b / &g;
        self.a[i][i] = g.clone();
        self.a[j][j] = &a * &bg;
        if let Some(tr) = &mut self.t {
            // rows: L = [[x, y], [-b/g, a/g]], L⁻¹ = [[a/g, -y], [b/g, x]]
            let (ui, uj) = (tr.u[i].clone(), tr.u[j].clone());
            for k in 0..ui.len() {
                tr.u[i][k] = &x * &ui[k] + &y * &uj[k];
                tr.u[j][k] = -(&bg * &ui[k]) + &ag * &uj[k];
            }
            for row in tr.u_inv.iter_mut() {
                let (ci, cj) = (row[i].clone(), row[j].clone());
                row[i] = &ci * &ag + &cj * &bg;
                row[j] = -(&ci * &y) + &cj * &x;
            }
            // cols: R = [[1, -y b/g], [1, x a/g]], R⁻¹ = [[x a/g, y b/g], [-1, 1]]
            let r12 = -(&y * &bg);
            let r22 = &x * &ag;
            for row in tr.v.iter_mut() {
                let (ci, cj) = (row[i].clone(), row[j].clone());
                row[i] = &ci + &cj;
                row[j] = &ci * &r12 + &cj * &r22;
            }
            let (vi, vj) = (tr.v_inv[i].clone(), tr.v_inv[j].clone());
            let s12 = &y * &bg;
            for k in 0..vi.len() {
                tr.v_inv[i][k] = &r22 * &vi[k] + &s12 * &vj[k];
                tr.v_inv[j][k] = -vi[k].clone() + &vj[k];
            }
        }
    }

    fn fix_divisibility(&mut self, rank: usize) {
        for i in 0..rank {
            for j in i + 1..rank {
                if !(&self.a[j][j] % &self.a[i][i]).is_zero() {
                    self.gcd_fix(i, j);
                }
            }
        }
    }
}

/// Full Smith decomposition with unimodular transforms.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithDecomposition {
    let (rows, cols) = (a.nrows(), a.ncols());
    let data = (0..rows).map(|i| a.row(i).to_vec()).collect();
    let mut r = Reducer {
        a: data,
        rows,
        cols,
        t: Some(Transforms {
            u: identity(rows),
            u_inv: identity(rows),
            v: identity(cols),
            v_inv: identity(cols),
        }),
    };
    let rank = r.diagonalize();
    r.fix_divisibility(rank);
    let tr = r.t.take().expect("transforms tracked");
    SmithDecomposition {
        d: IntegerMatrix::from_rows(r.a, cols),
        u: IntegerMatrix::from_rows(tr.u, rows),
        v: IntegerMatrix::from_rows(tr.v, cols),
        u_inv: IntegerMatrix::from_rows(tr.u_inv, rows),
        v_inv: IntegerMatrix::from_rows(tr.v_inv, cols),
        rank,
    }
}

/// Nonzero invariant factors `d₁ | d₂ | …` (the rank is their count),
/// without tracking transforms.
pub fn invariant_factors(a: &IntegerMatrix) -> Vec<BigInt> {
    let (rows, cols) = (a.nrows(), a.ncols());
    let data = (0..rows).map(|i| a.row(i).to_vec()).collect();
    let mut r = Reducer {
        a: data,
        rows,
        cols,
        t: None,
    };
    let rank = r.diagonalize();
    r.fix_divisibility(rank);
    (0..rank).map(|i| r.a[i][i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntegerMatrix) -> SmithDecomposition {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.u.mul(&s.u_inv) == IntegerMatrix::identity(a.nrows()));
        assert!(s.v.mul(&s.v_inv) == IntegerMatrix::identity(a.ncols()));
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                if i != j || i >= s.rank {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        s
    }

    #[test]
    fn zero_matrix() {
        let a = IntegerMatrix::zeros(3, 2);
        let s = check(&a);
        assert_eq!(s.rank, 0);
        assert_eq!(s.u, IntegerMatrix::identity(3));
        assert_eq!(s.v, IntegerMatrix::identity(2));
    }

    #[test]
    fn diag_two_three() {
        let a = IntegerMatrix::from_i64(&[vec![2, 0], vec![0, 3]], 2);
        let s = check(&a);
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn divisibility_chain_needs_fixing() {
        let a = IntegerMatrix::from_i64(&[vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 10]], 3);
        let s = check(&a);
        assert_eq!(
            s.diagonal(),
            vec![BigInt::from(2), BigInt::from(2), BigInt::from(60)]
        );
        assert_eq!(invariant_factors(&a), s.diagonal());
    }
}
