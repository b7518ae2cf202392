//! Pairing isometries from vertex correspondences.

use num_traits::{One, Signed, Zero};

use crate::exact::linalg;
use crate::exact::{rational_sqrt, ExactMatrix, LorentzIsometry, Rational, Vec5};
use crate::polytope::{lorentz_dot, Polytope24};
use crate::{Error, Result};

/// The Lorentz matrix `g` with `g v_a = λ_a v_b` (`λ_a > 0`) for every
/// pair `(a, b)` of `corr`, sending side `from` onto side `to` with the
/// polytope landing on the far side of `to`.
///
/// The scalars come from the Gram equations `λ_a λ_b ⟨w_a, w_b⟩ = ⟨v_a, v_b⟩`:
/// `λ` of the first vertex is fixed by one triangle of equations and the
/// rest are propagated, then every equation is re-checked. The linear map
/// is solved on four independent side vertices together with the
/// outward normal, which must go to the inward normal of `to`.
/// The result may reverse orientation; see [`derive_isometry`].
pub fn derive_map(p: &Polytope24, from: usize, to: usize, corr: &[(usize, usize)]) -> Result<ExactMatrix> {
    let fail = |msg: &str| Error::NotAnIsometry(from + 1, msg.to_string());
    let k = corr.len();
    if k < 3 {
        return Err(fail("too few vertices"));
    }
    let v = |i: usize| &p.vertices[corr[i].0];
    let w = |i: usize| &p.vertices[corr[i].1];

    let ratio = |a: usize, b: usize| -> Result<Rational> {
        let num = lorentz_dot(v(a), v(b));
        let den = lorentz_dot(w(a), w(b));
        if den.is_zero() || num.is_zero() {
            return Err(fail("degenerate Gram entry"));
        }
        Ok(num / den)
    };
    let r01 = ratio(0, 1)?;
    let r02 = ratio(0, 2)?;
    let r12 = ratio(1, 2)?;
    let l0sq = &r01 * &r02 / &r12;
    let l0 = rational_sqrt(&l0sq).ok_or_else(|| fail("scalar is not a rational square"))?;
    if !l0.is_positive() {
        return Err(fail("non-positive scalar"));
    }
    let mut lambda = vec![l0.clone()];
    for i in 1..k {
        lambda.push(ratio(0, i)? / &l0);
    }
    for a in 0..k {
        for b in a + 1..k {
            if &lambda[a] * &lambda[b] != ratio(a, b)? {
                return Err(fail("Gram equations inconsistent"));
            }
        }
        if !lambda[a].is_positive() {
            return Err(fail("non-positive scalar"));
        }
    }

    // four independent domain vertices plus the side normal
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..k {
        let mut rows: Vec<Vec<Rational>> = chosen.iter().map(|&j| v(j).to_vec()).collect();
        rows.push(v(i).to_vec());
        if linalg::rank(&rows) == rows.len() {
            chosen.push(i);
        }
    }
    if chosen.len() != 4 {
        return Err(fail("side vertices do not span a hyperplane"));
    }
    let mut src: Vec<Vec5> = chosen.iter().map(|&i| v(i).clone()).collect();
    let mut dst: Vec<Vec5> = chosen
        .iter()
        .map(|&i| std::array::from_fn(|c| &lambda[i] * &w(i)[c]))
        .collect();
    src.push(p.normals[from].clone());
    dst.push(std::array::from_fn(|c| -p.normals[to][c].clone()));
    let src_m = ExactMatrix::from_columns(&<[Vec5; 5]>::try_from(src).unwrap());
    let dst_m = ExactMatrix::from_columns(&<[Vec5; 5]>::try_from(dst).unwrap());
    let inv = src_m.inverse().ok_or_else(|| fail("singular frame"))?;
    let g = dst_m.mul_ref(&inv);

    for i in 0..k {
        let img = g.apply(v(i));
        let want: Vec5 = std::array::from_fn(|c| &lambda[i] * &w(i)[c]);
        if img != want {
            return Err(fail("vertex correspondence not affine"));
        }
    }
    if !crate::exact::lorentz_check(&g) {
        return Err(fail("Gram condition fails"));
    }
    if !g.get(4, 4).is_positive() {
        return Err(fail("swaps hyperboloid sheets"));
    }
    Ok(g)
}

/// Orientation-preserving pairing isometry for a side correspondence.
pub fn derive_isometry(
    p: &Polytope24,
    from: usize,
    to: usize,
    corr: &[(usize, usize)],
) -> Result<LorentzIsometry> {
    let g = derive_map(p, from, to, corr)?;
    if !g.det().is_one() {
        return Err(Error::OrientationReversing(from + 1));
    }
    LorentzIsometry::new(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qf;
    use crate::pairing::parse_pairing;
    use crate::polytope::polytope;
    use crate::BUNDLED_PAIRING;

    const GENERATORS: &str = include_str!("../../tests/data/m_generators.txt");

    fn published() -> Vec<(usize, ExactMatrix)> {
        GENERATORS
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| {
                let (name, body) = l.split_once(':').unwrap();
                let side: usize = name.trim().trim_start_matches('g').parse().unwrap();
                let rows: Vec<[i64; 5]> = body
                    .split('|')
                    .map(|r| {
                        let xs: Vec<i64> = r.split_whitespace().map(|x| x.parse().unwrap()).collect();
                        xs.try_into().unwrap()
                    })
                    .collect();
                (side - 1, ExactMatrix::from_i64(rows.try_into().unwrap()))
            })
            .collect()
    }

    #[test]
    fn reproduces_published_generators() {
        let sp = parse_pairing(BUNDLED_PAIRING).unwrap();
        let gens = published();
        assert_eq!(gens.len(), 12);
        for (side, g) in gens {
            let corr = sp.correspondence(side);
            let got = derive_isometry(polytope(), side, sp.partner(side), &corr).unwrap();
            assert_eq!(got.matrix(), &g, "side {}", side + 1);
        }
    }

    #[test]
    fn first_generator_on_vertex_13() {
        let sp = parse_pairing(BUNDLED_PAIRING).unwrap();
        let p = polytope();
        let img = sp.matrix(0).apply(&p.vertices[12]);
        let want = [qf(-1, 2), qf(1, 2), qf(1, 2), qf(-1, 2), qf(1, 1)];
        assert_eq!(img, want);
        assert_eq!(img, p.vertices[6]);
    }

    #[test]
    fn inverse_correspondence_gives_inverse() {
        let sp = parse_pairing(BUNDLED_PAIRING).unwrap();
        let p = polytope();
        for s in 0..24 {
            let t = sp.partner(s);
            let mut back: Vec<(usize, usize)> = sp.correspondence(s).iter().map(|&(a, b)| (b, a)).collect();
            back.sort_unstable();
            let g = derive_map(p, s, t, &sp.correspondence(s)).unwrap();
            let h = derive_map(p, t, s, &back).unwrap();
            assert!(g.mul_ref(&h).is_identity());
            assert_eq!(g.lorentz_inverse(), h);
        }
    }

    #[test]
    fn non_isometric_correspondence_rejected() {
        let sp = parse_pairing(BUNDLED_PAIRING).unwrap();
        let p = polytope();
        let mut corr = sp.correspondence(0);
        // swapping two images breaks the Gram pattern of the side
        let (i, j) = (0, 4);
        let tmp = corr[i].1;
        corr[i].1 = corr[j].1;
        corr[j].1 = tmp;
        assert!(matches!(derive_map(p, 0, 1, &corr), Err(Error::NotAnIsometry(1, _))));
    }
}
