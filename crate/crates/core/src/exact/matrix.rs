use std::fmt;
use std::ops::Mul;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg;
use super::{q, Rational};
use crate::{Error, Result};

/// A vector of Minkowski 5-space.
pub type Vec5 = [Rational; 5];

/// Diagonal of the Lorentzian form of signature (4,1).
pub const LORENTZ_DIAG: [i64; 5] = [1, 1, 1, 1, -1];

/// Integer 5-vector as rationals.
pub fn vec5(xs: [i64; 5]) -> Vec5 {
    xs.map(q)
}

/// A 5×5 matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactMatrix {
    rows: [[Rational; 5]; 5],
}

impl ExactMatrix {
    pub fn zero() -> Self {
        ExactMatrix {
            rows: std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero())),
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..5 {
            m.rows[i][i] = Rational::one();
        }
        m
    }

    pub fn lorentz_form() -> Self {
        let mut m = Self::zero();
        for i in 0..5 {
            m.rows[i][i] = q(LORENTZ_DIAG[i]);
        }
        m
    }

    pub fn from_rows(rows: [[Rational; 5]; 5]) -> Self {
        ExactMatrix { rows }
    }

    pub fn from_i64(rows: [[i64; 5]; 5]) -> Self {
        ExactMatrix {
            rows: rows.map(|r| r.map(q)),
        }
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec5; 5]) -> Self {
        ExactMatrix {
            rows: std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone())),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        self.rows[i][j] = x;
    }

    pub fn rows(&self) -> &[[Rational; 5]; 5] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> Vec5 {
        std::array::from_fn(|i| self.rows[i][j].clone())
    }

    pub fn transpose(&self) -> Self {
        ExactMatrix {
            rows: std::array::from_fn(|i| std::array::from_fn(|j| self.rows[j][i].clone())),
        }
    }

    pub fn mul_ref(&self, other: &ExactMatrix) -> ExactMatrix {
        let mut out = ExactMatrix::zero();
        for i in 0..5 {
            for k in 0..5 {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..5 {
                    let b = &other.rows[k][j];
                    if !b.is_zero() {
                        out.rows[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &Vec5) -> Vec5 {
        std::array::from_fn(|i| {
            let mut acc = Rational::zero();
            for (a, x) in self.rows[i].iter().zip(v) {
                if !a.is_zero() && !x.is_zero() {
                    acc += a * x;
                }
            }
            acc
        })
    }

    pub fn pow(&self, mut e: u32) -> ExactMatrix {
        let mut base = self.clone();
        let mut acc = ExactMatrix::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        (0..5).all(|i| {
            (0..5).all(|j| {
                if i == j {
                    self.rows[i][j].is_one()
                } else {
                    self.rows[i][j].is_zero()
                }
            })
        })
    }

    pub fn det(&self) -> Rational {
        linalg::det(&self.to_vecs())
    }

    /// General inverse by Gaussian elimination over Q.
    pub fn inverse(&self) -> Option<ExactMatrix> {
        let inv = linalg::inverse(&self.to_vecs())?;
        Some(Self::from_vecs(&inv))
    }

    /// Inverse of a Lorentz matrix, `J gᵀ J`.
    pub fn lorentz_inverse(&self) -> ExactMatrix {
        ExactMatrix {
            rows: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let s = LORENTZ_DIAG[i] * LORENTZ_DIAG[j];
                    if s > 0 {
                        self.rows[j][i].clone()
                    } else {
                        -self.rows[j][i].clone()
                    }
                })
            }),
        }
    }

    pub fn to_vecs(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.to_vec()).collect()
    }

    pub fn from_vecs(v: &[Vec<Rational>]) -> ExactMatrix {
        assert_eq!(v.len(), 5);
        ExactMatrix {
            rows: std::array::from_fn(|i| std::array::from_fn(|j| v[i][j].clone())),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_integer())
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.mul_ref(rhs)
    }
}

impl Mul for ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: ExactMatrix) -> ExactMatrix {
        self.mul_ref(&rhs)
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// True iff `gᵀ J g = J` for `J = diag(1,1,1,1,-1)`.
pub fn lorentz_check(g: &ExactMatrix) -> bool {
    let j = ExactMatrix::lorentz_form();
    g.transpose().mul_ref(&j).mul_ref(g) == j
}

/// An element of SO⁺(4,1): preserves the Lorentz form, has determinant
/// one and keeps the upper sheet of the hyperboloid.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LorentzIsometry(ExactMatrix);

impl LorentzIsometry {
    pub fn new(m: ExactMatrix) -> Result<Self> {
        if !lorentz_check(&m) {
            return Err(Error::NotAnIsometry(0, "Gram condition fails".into()));
        }
        if !m.get(4, 4).is_positive() {
            return Err(Error::NotAnIsometry(0, "swaps the hyperboloid sheets".into()));
        }
        if !m.det().is_one() {
            return Err(Error::OrientationReversing(0));
        }
        Ok(LorentzIsometry(m))
    }

    pub fn identity() -> Self {
        LorentzIsometry(ExactMatrix::identity())
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ExactMatrix {
        self.0
    }

    pub fn compose(&self, other: &LorentzIsometry) -> LorentzIsometry {
        LorentzIsometry(self.0.mul_ref(&other.0))
    }

    pub fn inverse(&self) -> LorentzIsometry {
        LorentzIsometry(self.0.lorentz_inverse())
    }
}

impl fmt::Debug for LorentzIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> ExactMatrix {
        ExactMatrix::from_i64([
            [2, 1, 0, 0, -2],
            [-1, -2, 0, 0, 2],
            [0, 0, -1, 0, 0],
            [0, 0, 0, 1, 0],
            [-2, -2, 0, 0, 3],
        ])
    }

    #[test]
    fn identity_is_neutral() {
        assert_eq!(ExactMatrix::identity().mul_ref(&g1()), g1());
        assert_eq!(g1().mul_ref(&ExactMatrix::identity()), g1());
    }

    #[test]
    fn lorentz_membership() {
        assert!(lorentz_check(&g1()));
        assert!(lorentz_check(&ExactMatrix::identity()));
        let mut bad = g1();
        bad.set(0, 0, q(3));
        assert!(!lorentz_check(&bad));
    }

    #[test]
    fn fast_inverse_matches_gaussian_inverse() {
        let g = g1();
        let a = g.lorentz_inverse();
        let b = g.inverse().unwrap();
        assert_eq!(a, b);
        assert!(g.mul_ref(&a).is_identity());
    }

    #[test]
    fn isometry_rejects_reflection() {
        let mut r = ExactMatrix::identity();
        r.set(0, 0, q(-1));
        assert!(matches!(
            LorentzIsometry::new(r),
            Err(Error::OrientationReversing(_))
        ));
        assert!(LorentzIsometry::new(g1()).is_ok());
    }

    #[test]
    fn pow_agrees_with_repeated_product() {
        let g = g1();
        let mut acc = ExactMatrix::identity();
        for _ in 0..5 {
            acc = acc.mul_ref(&g);
        }
        assert_eq!(g.pow(5), acc);
    }
}
