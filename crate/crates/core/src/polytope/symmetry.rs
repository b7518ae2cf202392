use std::collections::HashMap;
use std::sync::OnceLock;

use num_traits::{One, Signed};

use super::{lorentz_dot, polytope, Polytope24};
use crate::exact::linalg;
use crate::exact::{ExactMatrix, Rational, Vec5};

/// A symmetry of the 24-cell fixing its centre, stored as the induced
/// vertex permutation with one witness matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub perm: [usize; 24],
    pub facet_perm: [usize; 24],
    pub matrix: ExactMatrix,
    /// Determinant of the matrix, ±1.
    pub det: i32,
}

#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    pub elements: Vec<Symmetry>,
    index: HashMap<[usize; 24], usize>,
    // [f][g] -> elements mapping side f onto side g
    facet_maps: Vec<Vec<Vec<usize>>>,
    identity: usize,
}

/// Shared lazily built symmetry group of [`polytope()`].
pub fn symmetry_group() -> &'static SymmetryGroup {
    static G: OnceLock<SymmetryGroup> = OnceLock::new();
    G.get_or_init(|| SymmetryGroup::generate(polytope()))
}

fn independent_vertices(vertices: &[Vec5]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..vertices.len() {
        let mut rows: Vec<Vec<Rational>> = chosen.iter().map(|&j| vertices[j].to_vec()).collect();
        rows.push(vertices[i].to_vec());
        if linalg::rank(&rows) == rows.len() {
            chosen.push(i);
        }
        if chosen.len() == 5 {
            break;
        }
    }
    chosen
}

impl SymmetryGroup {
    /// Enumerates all Lorentz maps permuting the vertices: images of a
    /// vertex basis are chosen by backtracking under the Gram constraint,
    /// then the induced linear map is checked on every vertex.
    pub fn generate(p: &Polytope24) -> Self {
        let verts = &p.vertices;
        let n = verts.len();
        // Gram values replaced by small codes; only equality matters here
        let full = p.gram();
        let mut values: Vec<&Rational> = full.iter().flatten().collect();
        values.sort();
        values.dedup();
        let gram: Vec<Vec<u8>> = full
            .iter()
            .map(|row| row.iter().map(|x| values.binary_search(&x).expect("Gram value") as u8).collect())
            .collect();
        let basis = independent_vertices(verts);
        let basis_inv = {
            let cols: [Vec5; 5] = std::array::from_fn(|k| verts[basis[k]].clone());
            ExactMatrix::from_columns(&cols).inverse().expect("vertex basis")
        };

        let mut elements = Vec::new();
        let mut images: Vec<usize> = Vec::with_capacity(5);
        fn extend(
            depth: usize,
            images: &mut Vec<usize>,
            basis: &[usize],
            gram: &[Vec<u8>],
            n: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            if depth == basis.len() {
                out.push(images.clone());
                return;
            }
            for w in 0..n {
                if images.contains(&w) {
                    continue;
                }
                let ok = (0..depth).all(|j| gram[w][images[j]] == gram[basis[depth]][basis[j]]);
                if ok {
                    images.push(w);
                    extend(depth + 1, images, basis, gram, n, out);
                    images.pop();
                }
            }
        }
        let mut candidates = Vec::new();
        extend(0, &mut images, &basis, &gram, n, &mut candidates);

        // a vertex is pinned down by its Gram values against a basis, so the
        // permutation can be read off before any matrix is formed
        let profile = |k: usize, frame: &[usize]| -> Vec<u8> { frame.iter().map(|&b| gram[k][b]).collect() };
        let wanted: Vec<Vec<u8>> = (0..n).map(|k| profile(k, &basis)).collect();
        for cand in candidates {
            let seen: HashMap<Vec<u8>, usize> = (0..n).map(|w| (profile(w, &cand), w)).collect();
            let mut perm = [0usize; 24];
            let ok = (0..n).all(|k| match seen.get(&wanted[k]) {
                Some(&w) => {
                    perm[k] = w;
                    true
                }
                None => false,
            });
            if !ok {
                continue;
            }
            let cols: [Vec5; 5] = std::array::from_fn(|k| verts[cand[k]].clone());
            let m = ExactMatrix::from_columns(&cols).mul_ref(&basis_inv);
            let facet_perm = facet_permutation(p, &perm);
            let det = if m.det().is_one() { 1 } else { -1 };
            elements.push(Symmetry {
                perm,
                facet_perm,
                matrix: m,
                det,
            });
        }
        elements.sort_by(|a, b| a.perm.cmp(&b.perm));
        let index: HashMap<[usize; 24], usize> = elements.iter().enumerate().map(|(i, s)| (s.perm, i)).collect();
        let identity = index[&std::array::from_fn(|i| i)];
        let mut facet_maps = vec![vec![Vec::new(); 24]; 24];
        for (i, s) in elements.iter().enumerate() {
            for f in 0..24 {
                facet_maps[f][s.facet_perm[f]].push(i);
            }
        }
        SymmetryGroup {
            elements,
            index,
            facet_maps,
            identity,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn get(&self, i: usize) -> &Symmetry {
        &self.elements[i]
    }

    pub fn find(&self, perm: &[usize; 24]) -> Option<usize> {
        self.index.get(perm).copied()
    }

    /// Index of `a ∘ b` (apply `b` first).
    pub fn compose(&self, a: usize, b: usize) -> usize {
        let pa = &self.elements[a].perm;
        let pb = &self.elements[b].perm;
        let perm = std::array::from_fn(|v| pa[pb[v]]);
        self.index[&perm]
    }

    pub fn inverse(&self, a: usize) -> usize {
        let pa = &self.elements[a].perm;
        let mut inv = [0usize; 24];
        for (v, &w) in pa.iter().enumerate() {
            inv[w] = v;
        }
        self.index[&inv]
    }

    /// Elements mapping side `f` onto side `g`.
    pub fn facet_maps(&self, f: usize, g: usize) -> &[usize] {
        &self.facet_maps[f][g]
    }

    /// The unique element mapping side `f` onto side `g` with the given
    /// action on the vertices of `f` (pairs `(vertex of f, image)`).
    pub fn extending(&self, f: usize, g: usize, pairs: &[(usize, usize)]) -> Option<usize> {
        self.facet_maps[f][g]
            .iter()
            .copied()
            .find(|&i| pairs.iter().all(|&(a, b)| self.elements[i].perm[a] == b))
    }

    /// Checks that every element preserves the Lorentz form, the vertex set
    /// and the side set.
    pub fn is_consistent(&self, p: &Polytope24) -> bool {
        self.elements.iter().all(|s| {
            crate::exact::lorentz_check(&s.matrix)
                && s.matrix.get(4, 4).is_positive()
                && (0..24).all(|v| s.matrix.apply(&p.vertices[v]) == p.vertices[s.perm[v]])
                && (0..24).all(|f| {
                    let mut img: Vec<usize> = p.facets[f].iter().map(|&v| s.perm[v]).collect();
                    img.sort_unstable();
                    img == p.facets[s.facet_perm[f]].to_vec()
                })
        })
    }
}

fn facet_permutation(p: &Polytope24, perm: &[usize; 24]) -> [usize; 24] {
    std::array::from_fn(|f| {
        let mut img: Vec<usize> = p.facets[f].iter().map(|&v| perm[v]).collect();
        img.sort_unstable();
        p.facets
            .iter()
            .position(|s| s.as_slice() == img.as_slice())
            .expect("symmetry maps sides to sides")
    })
}

/// Lorentz reflection in the hyperplane orthogonal to a unit space-like
/// vector `n`: `x ↦ x - 2⟨x, n⟩ n`.
pub fn reflection(n: &Vec5) -> ExactMatrix {
    let cols: [Vec5; 5] = std::array::from_fn(|j| {
        let mut e: Vec5 = std::array::from_fn(|_| Rational::from_integer(0.into()));
        e[j] = Rational::one();
        let d = lorentz_dot(&e, n) * Rational::from_integer(2.into());
        std::array::from_fn(|i| &e[i] - &d * &n[i])
    });
    ExactMatrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_closure() {
        let g = symmetry_group();
        assert_eq!(g.order(), 1152);
        assert!(g.is_consistent(polytope()));
        let id = g.identity();
        assert!(g.get(id).matrix.is_identity());
        for a in (0..g.order()).step_by(97) {
            let inv = g.inverse(a);
            assert_eq!(g.compose(a, inv), id);
            for b in (0..g.order()).step_by(131) {
                let c = g.compose(a, b);
                assert_eq!(g.get(c).matrix, g.get(a).matrix.mul_ref(&g.get(b).matrix));
            }
        }
    }

    #[test]
    fn each_side_pair_has_48_maps() {
        let g = symmetry_group();
        for f in [0, 5, 23] {
            for h in [0, 1, 17] {
                assert_eq!(g.facet_maps(f, h).len(), 48);
            }
        }
    }

    #[test]
    fn reflection_is_involutive_lorentz() {
        let p = polytope();
        let r = reflection(&p.normals[3]);
        assert!(crate::exact::lorentz_check(&r));
        assert!(r.mul_ref(&r).is_identity());
        assert_eq!(r.det(), Rational::from_integer((-1).into()));
    }
}
