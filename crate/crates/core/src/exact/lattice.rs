use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{smith_normal_form, IntegerMatrix};
use crate::{Error, Result};

/// The integer solutions of a linear system: `particular + span_Z(basis)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineLattice {
    pub particular: Vec<BigInt>,
    pub basis: Vec<Vec<BigInt>>,
    // rows of V⁻¹ that must vanish on (x - particular)
    constrained: Vec<Vec<BigInt>>,
}

impl AffineLattice {
    pub fn dim(&self) -> usize {
        self.particular.len()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        if x.len() != self.particular.len() {
            return false;
        }
        let diff: Vec<BigInt> = x.iter().zip(&self.particular).map(|(a, b)| a - b).collect();
        self.constrained.iter().all(|row| {
            row.iter()
                .zip(&diff)
                .map(|(a, b)| a * b)
                .sum::<BigInt>()
                .is_zero()
        })
    }

    /// `particular + Σ coeffs[i] · basis[i]`.
    pub fn point(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        let mut x = self.particular.clone();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    }
}

/// Integer solutions `x` of `a x = b`, where `b` is zero except at the
/// rows listed in `fixed`.
pub fn solve_hom_lattice(a: &IntegerMatrix, fixed: &[(usize, BigInt)]) -> Result<AffineLattice> {
    let mut b = vec![BigInt::zero(); a.nrows()];
    for (i, val) in fixed {
        if *i >= a.nrows() {
            return Err(Error::Inconsistent(format!("constraint row {i} out of range")));
        }
        b[*i] = val.clone();
    }
    let n = a.ncols();
    let s = smith_normal_form(a);
    let c = s.u.mul_vec(&b);
    let mut y = vec![BigInt::zero(); n];
    for (i, ci) in c.iter().enumerate() {
        if i < s.rank {
            let d = s.d.get(i, i);
            let (quot, rem) = ci.div_rem(d);
            if !rem.is_zero() {
                return Err(Error::NoSolution);
            }
            y[i] = quot;
        } else if !ci.is_zero() {
            return Err(Error::NoSolution);
        }
    }
    let particular = s.v.mul_vec(&y);
    let basis = (s.rank..n)
        .map(|j| (0..n).map(|i| s.v.get(i, j).clone()).collect())
        .collect();
    let constrained = (0..s.rank).map(|i| s.v_inv.row(i).to_vec()).collect();
    Ok(AffineLattice {
        particular,
        basis,
        constrained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_single_generator() {
        let a = IntegerMatrix::zeros(0, 1);
        let l = solve_hom_lattice(&a, &[]).unwrap();
        assert_eq!(l.basis.len(), 1);
        assert!(l.contains(&[BigInt::from(17)]));
        assert!(l.contains(&[BigInt::from(-3)]));
    }

    #[test]
    fn divisibility_obstruction() {
        // 2x = 1 has no integer solution
        let a = IntegerMatrix::from_i64(&[vec![2]], 1);
        assert_eq!(
            solve_hom_lattice(&a, &[(0, BigInt::from(1))]),
            Err(Error::NoSolution)
        );
        let l = solve_hom_lattice(&a, &[(0, BigInt::from(4))]).unwrap();
        assert_eq!(l.particular, vec![BigInt::from(2)]);
        assert!(l.basis.is_empty());
    }

    #[test]
    fn solutions_satisfy_system() {
        let a = IntegerMatrix::from_i64(&[vec![1, -1, 0], vec![0, 1, 1], vec![1, 0, 1]], 3);
        // row 3 = row 1 + row 2, so the right-hand side must add up too
        assert!(solve_hom_lattice(&a, &[(1, BigInt::from(3))]).is_err());
        let l = solve_hom_lattice(&a, &[(1, BigInt::from(3)), (2, BigInt::from(3))]).unwrap();
        for k in -3..=3 {
            let x = l.point(&vec![BigInt::from(k); l.basis.len()]);
            assert_eq!(
                a.mul_vec(&x),
                vec![BigInt::from(0), BigInt::from(3), BigInt::from(3)]
            );
            assert!(l.contains(&x));
        }
    }
}
