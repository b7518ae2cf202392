//! Side pairings of the 24-cell: data model, `pairing-v1` text format,
//! pairing isometries and Poincaré polytope verification.

mod derive;
mod verify;

use std::fmt::Write as _;

use num_traits::One;

use crate::exact::ExactMatrix;
use crate::polytope::symmetry::reflection;
use crate::polytope::{polytope, symmetry_group, Polytope24};
use crate::{Error, Result};

pub use derive::{derive_isometry, derive_map};
pub use verify::{class_is_complete, ridge_cycles, verify_poincare, vertex_classes, CycleCheck, RidgeCycle, VerificationReport};

const NONE: usize = usize::MAX;

/// A gluing of indexed copies of the 24-cell along their sides. Side `s`
/// of copy `k` is glued to side `partner(s)` of copy
/// `neighbour_copy(k, s)` through the base vertex map of `s`.
pub trait SideGluing: Sync {
    fn base(&self) -> &SidePairing;
    fn copies(&self) -> usize;
    fn neighbour_copy(&self, copy: usize, side: usize) -> usize;
}

/// An involutive pairing of the 24 sides with per-side vertex
/// correspondences and pairing matrices `g_s` (`g_{σ(s)} = g_s⁻¹`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SidePairing {
    partner: [usize; 24],
    // vertex_map[s][v] = image of v under side s, NONE off the side
    vertex_map: Vec<[usize; 24]>,
    maps: Vec<ExactMatrix>,
    // symmetry of the polytope agreeing with the vertex map of each side
    symmetries: Vec<usize>,
}

impl SideGluing for SidePairing {
    fn base(&self) -> &SidePairing {
        self
    }
    fn copies(&self) -> usize {
        1
    }
    fn neighbour_copy(&self, _copy: usize, _side: usize) -> usize {
        0
    }
}

pub(crate) fn parse_line(line: &str, lineno: usize) -> Result<(usize, usize, Vec<(usize, usize)>)> {
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let rest = line
        .strip_prefix("side")
        .ok_or_else(|| err("expected `side`".into()))?;
    let (head, tail) = rest
        .split_once(':')
        .ok_or_else(|| err("missing `:`".into()))?;
    let (i, j) = head
        .split_once("->")
        .ok_or_else(|| err("missing `->`".into()))?;
    let num = |s: &str| -> Result<usize> {
        let n: usize = s.trim().parse().map_err(|_| err(format!("bad number `{}`", s.trim())))?;
        if !(1..=24).contains(&n) {
            return Err(err(format!("index {n} out of range")));
        }
        Ok(n - 1)
    };
    let (i, j) = (num(i)?, num(j)?);
    let mut corr = Vec::new();
    for tok in tail.split_whitespace() {
        let (a, b) = tok
            .split_once('>')
            .ok_or_else(|| err(format!("bad vertex pair `{tok}`")))?;
        corr.push((num(a)?, num(b)?));
    }
    if corr.len() != 6 {
        return Err(err(format!("expected 6 vertex pairs, found {}", corr.len())));
    }
    if corr.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(err("domain vertices must be ascending".into()));
    }
    Ok((i, j, corr))
}

/// Parses a `pairing-v1` document and derives the pairing isometries.
pub fn parse_pairing(text: &str) -> Result<SidePairing> {
    let p = polytope();
    let mut partner = [NONE; 24];
    let mut corrs: Vec<Option<Vec<(usize, usize)>>> = vec![None; 24];
    let mut data_lines = 0;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        data_lines += 1;
        let (i, j, corr) = parse_line(line, n + 1)?;
        if partner[i] != NONE {
            return Err(Error::Parse {
                line: n + 1,
                msg: format!("side {} listed twice", i + 1),
            });
        }
        partner[i] = j;
        corrs[i] = Some(corr);
    }
    if data_lines != 24 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected 24 data lines, found {data_lines}"),
        });
    }
    let corrs: Vec<Vec<(usize, usize)>> = corrs.into_iter().map(|c| c.unwrap()).collect();
    SidePairing::from_correspondences(p, partner, &corrs)
}

impl SidePairing {
    /// Validates an explicit pairing and derives its isometries.
    pub fn from_correspondences(
        p: &Polytope24,
        partner: [usize; 24],
        corrs: &[Vec<(usize, usize)>],
    ) -> Result<SidePairing> {
        let sym = symmetry_group();
        let mut vertex_map = vec![[NONE; 24]; 24];
        for s in 0..24 {
            let t = partner[s];
            if t == s {
                return Err(Error::FixedSide(s + 1));
            }
            if t >= 24 || partner[t] != s {
                return Err(Error::NotInvolutive(s + 1));
            }
            for &(a, b) in &corrs[s] {
                if !p.facet_contains(s, a) {
                    return Err(Error::VertexNotOnSide { side: s + 1, vertex: a + 1 });
                }
                if !p.facet_contains(t, b) {
                    return Err(Error::VertexNotOnSide { side: t + 1, vertex: b + 1 });
                }
                vertex_map[s][a] = b;
            }
            let mut img: Vec<usize> = corrs[s].iter().map(|x| x.1).collect();
            img.sort_unstable();
            let dom: Vec<usize> = corrs[s].iter().map(|x| x.0).collect();
            if dom != p.facets[s].to_vec() || img != p.facets[t].to_vec() {
                return Err(Error::NotAnIsometry(s + 1, "not a bijection between sides".into()));
            }
        }
        for s in 0..24 {
            let t = partner[s];
            for &a in &p.facets[s] {
                if vertex_map[t][vertex_map[s][a]] != a {
                    return Err(Error::NotInvolutive(s + 1));
                }
            }
        }
        let mut maps = Vec::with_capacity(24);
        let mut symmetries = Vec::with_capacity(24);
        for s in 0..24 {
            maps.push(derive_map(p, s, partner[s], &corrs[s])?);
            let pairs: Vec<(usize, usize)> = corrs[s].clone();
            let e = sym
                .extending(s, partner[s], &pairs)
                .ok_or_else(|| Error::NotAnIsometry(s + 1, "no polytope symmetry realises the map".into()))?;
            symmetries.push(e);
        }
        for s in 0..24 {
            if !maps[s].mul_ref(&maps[partner[s]]).is_identity() {
                return Err(Error::NotInvolutive(s + 1));
            }
        }
        Ok(SidePairing {
            partner,
            vertex_map,
            maps,
            symmetries,
        })
    }

    /// Builds a pairing from a choice, for each side `s`, of a polytope
    /// symmetry mapping `s` onto its partner; the pairing map is that
    /// symmetry followed by the reflection in the partner side.
    pub fn from_symmetries(partner: [usize; 24], elements: &[usize; 24]) -> Result<SidePairing> {
        let p = polytope();
        let sym = symmetry_group();
        let corrs: Vec<Vec<(usize, usize)>> = (0..24)
            .map(|s| {
                let perm = &sym.get(elements[s]).perm;
                p.facets[s].iter().map(|&v| (v, perm[v])).collect()
            })
            .collect();
        Self::from_correspondences(p, partner, &corrs)
    }

    pub fn partner(&self, side: usize) -> usize {
        self.partner[side]
    }

    pub fn partners(&self) -> &[usize; 24] {
        &self.partner
    }

    pub fn map_vertex(&self, side: usize, v: usize) -> Option<usize> {
        let w = self.vertex_map[side][v];
        (w != NONE).then_some(w)
    }

    /// `(vertex, image)` pairs of side `s`, ascending in the domain.
    pub fn correspondence(&self, side: usize) -> Vec<(usize, usize)> {
        polytope().facets[side]
            .iter()
            .map(|&v| (v, self.vertex_map[side][v]))
            .collect()
    }

    pub fn matrix(&self, side: usize) -> &ExactMatrix {
        &self.maps[side]
    }

    /// Index in [`symmetry_group`] of the symmetry inducing the vertex map
    /// of `side`.
    pub fn symmetry(&self, side: usize) -> usize {
        self.symmetries[side]
    }

    /// Sides carrying a generator: the lower-numbered side of each pair.
    pub fn free_sides(&self) -> Vec<usize> {
        (0..24).filter(|&s| s < self.partner[s]).collect()
    }

    pub fn is_orientation_preserving(&self, side: usize) -> bool {
        self.maps[side].det().is_one()
    }

    /// Conjugate pairing `k P k⁻¹` by a polytope symmetry.
    pub fn conjugate(&self, element: usize) -> Result<SidePairing> {
        let p = polytope();
        let sym = symmetry_group();
        let k = &sym.get(element);
        let kinv = &sym.get(sym.inverse(element));
        let mut partner = [NONE; 24];
        let mut corrs = vec![Vec::new(); 24];
        for s in 0..24 {
            let ks = k.facet_perm[s];
            partner[ks] = k.facet_perm[self.partner[s]];
            corrs[ks] = p.facets[ks]
                .iter()
                .map(|&v| (v, k.perm[self.vertex_map[s][kinv.perm[v]]]))
                .collect();
        }
        Self::from_correspondences(p, partner, &corrs)
    }

    /// The pairing-v1 encoding.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in 0..24 {
            let _ = write!(out, "side {} -> {} :", s + 1, self.partner[s] + 1);
            for (a, b) in self.correspondence(s) {
                let _ = write!(out, " {}>{}", a + 1, b + 1);
            }
            out.push('\n');
        }
        out
    }

    /// Pairing map of `side` as symmetry-then-reflection; an independent
    /// route to [`SidePairing::matrix`].
    pub fn matrix_via_symmetry(&self, side: usize) -> ExactMatrix {
        let p = polytope();
        let s = symmetry_group().get(self.symmetries[side]);
        reflection(&p.normals[self.partner[side]]).mul_ref(&s.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BUNDLED_PAIRING;

    #[test]
    fn bundled_pairing_parses() {
        let sp = parse_pairing(BUNDLED_PAIRING).unwrap();
        let free: Vec<usize> = sp.free_sides().iter().map(|s| s + 1).collect();
        assert_eq!(free, vec![1, 3, 5, 6, 7, 8, 9, 10, 11, 12, 21, 22]);
        assert_eq!(parse_pairing(&sp.to_text()).unwrap(), sp);
    }

    #[test]
    fn self_paired_side_rejected() {
        let text = BUNDLED_PAIRING.replacen("side 1 -> 2 :", "side 1 -> 1 :", 1);
        assert!(matches!(parse_pairing(&text), Err(Error::FixedSide(1))));
    }

    #[test]
    fn swapped_label_rejected() {
        // 13>7 becomes 13>9; vertex 9 is not on side 2
        let text = BUNDLED_PAIRING.replacen("13>7 14>8", "13>9 14>8", 1);
        assert!(matches!(
            parse_pairing(&text),
            Err(Error::VertexNotOnSide { side: 2, vertex: 9 })
        ));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_pairing("side 1 => 2 : 1>2"), Err(Error::Parse { .. })));
        let short = BUNDLED_PAIRING.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_pairing(&short), Err(Error::Parse { .. })));
    }

    #[test]
    fn symmetry_route_agrees() {
        let sp = parse_pairing(BUNDLED_PAIRING).unwrap();
        for s in 0..24 {
            assert_eq!(sp.matrix(s), &sp.matrix_via_symmetry(s), "side {}", s + 1);
        }
    }
}
