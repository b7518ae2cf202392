//! Oriented cell complexes glued from copies of one convex polytope.
//!
//! A [`Shape`] is a convex polytope with rational vertex coordinates whose
//! faces are listed by vertex sets. Each cell carries an orientation given
//! by an ordered frame of edge vectors between its vertices; incidence
//! numbers compare the induced boundary orientation with the face's own.
//! A [`GluedComplex`] takes several copies ("pieces") of a shape and
//! identifies facets by vertex maps, extending each identification to all
//! subcells and tracking orientation signs.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::linalg::{self, QMatrix};
use crate::exact::{invariant_factors, IntegerMatrix, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct ShapeCell {
    /// Sorted point ids.
    pub points: Vec<usize>,
    // (tail, head) point pairs spanning the cell's direction space
    frame: Vec<(usize, usize)>,
    center: Vec<Rational>,
}

/// A convex polytope described by its face lattice.
#[derive(Clone, Debug)]
pub struct Shape {
    pub points: Vec<Vec<Rational>>,
    cells: Vec<Vec<ShapeCell>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
    // faces[k][i] = codimension-one faces of cell i of dimension k, with signs
    faces: Vec<Vec<Vec<(usize, i32)>>>,
}

fn diff(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn sign_of(x: &Rational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl Shape {
    /// Builds a shape from point coordinates and, for each dimension
    /// `0..=top`, the vertex sets of its cells. Cells of dimension 0 must
    /// be the singletons of all points.
    pub fn new(points: Vec<Vec<Rational>>, cells_by_dim: Vec<Vec<Vec<usize>>>) -> Result<Shape> {
        let mut cells = Vec::with_capacity(cells_by_dim.len());
        let mut lookup = Vec::with_capacity(cells_by_dim.len());
        for (k, sets) in cells_by_dim.into_iter().enumerate() {
            let mut level = Vec::with_capacity(sets.len());
            let mut map = HashMap::new();
            for mut set in sets {
                set.sort_unstable();
                set.dedup();
                let frame = Self::frame_of(&points, &set);
                if frame.len() != k {
                    return Err(Error::Inconsistent(format!(
                        "cell {set:?} spans dimension {}, expected {k}",
                        frame.len()
                    )));
                }
                let mut center = vec![Rational::zero(); points[set[0]].len()];
                for &p in &set {
                    for (c, x) in center.iter_mut().zip(&points[p]) {
                        *c += x;
                    }
                }
                let n = Rational::from_integer(BigInt::from(set.len()));
                for c in center.iter_mut() {
                    *c /= &n;
                }
                if map.insert(set.clone(), level.len()).is_some() {
                    return Err(Error::Inconsistent(format!("cell {set:?} listed twice")));
                }
                level.push(ShapeCell {
                    points: set,
                    frame,
                    center,
                });
            }
            cells.push(level);
            lookup.push(map);
        }
        let mut shape = Shape {
            points,
            cells,
            lookup,
            faces: Vec::new(),
        };
        shape.faces = (0..shape.cells.len()).map(|k| shape.compute_faces(k)).collect();
        Ok(shape)
    }

    fn frame_of(points: &[Vec<Rational>], set: &[usize]) -> Vec<(usize, usize)> {
        let base = set[0];
        let mut rows: QMatrix = Vec::new();
        let mut frame = Vec::new();
        for &p in &set[1..] {
            rows.push(diff(&points[p], &points[base]));
            if linalg::rank(&rows) == rows.len() {
                frame.push((base, p));
            } else {
                rows.pop();
            }
        }
        frame
    }

    fn frame_vectors(&self, frame: &[(usize, usize)]) -> QMatrix {
        frame
            .iter()
            .map(|&(a, b)| diff(&self.points[b], &self.points[a]))
            .collect()
    }

    /// Determinant of `vs` written in the frame of cell `(k, i)`.
    fn det_in_frame(&self, k: usize, i: usize, vs: &[Vec<Rational>]) -> Rational {
        let basis = self.frame_vectors(&self.cells[k][i].frame);
        let m: QMatrix = vs
            .iter()
            .map(|v| linalg::coords_in(&basis, v).expect("vector in cell span"))
            .collect();
        linalg::det(&m)
    }

    fn compute_faces(&self, k: usize) -> Vec<Vec<(usize, i32)>> {
        if k == 0 {
            return vec![Vec::new(); self.cells[0].len()];
        }
        let mut out = vec![Vec::new(); self.cells[k].len()];
        for (i, sigma) in self.cells[k].iter().enumerate() {
            for (j, tau) in self.cells[k - 1].iter().enumerate() {
                if !tau.points.iter().all(|p| sigma.points.binary_search(p).is_ok()) {
                    continue;
                }
                // induced orientation: outward vector first, then tau's frame
                let mut vs = vec![diff(&tau.center, &sigma.center)];
                vs.extend(self.frame_vectors(&tau.frame));
                let s = sign_of(&self.det_in_frame(k, i, &vs));
                assert!(s != 0, "degenerate incidence");
                out[i].push((j, s));
            }
        }
        out
    }

    pub fn top_dim(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells[k].len()
    }

    pub fn cell(&self, k: usize, i: usize) -> &ShapeCell {
        &self.cells[k][i]
    }

    pub fn find(&self, k: usize, points: &[usize]) -> Option<usize> {
        let mut key = points.to_vec();
        key.sort_unstable();
        self.lookup[k].get(&key).copied()
    }

    /// Codimension-one faces of `(k, i)` with incidence numbers.
    pub fn faces(&self, k: usize, i: usize) -> &[(usize, i32)] {
        &self.faces[k][i]
    }

    /// All cells of dimension `<= k` contained in cell `(k, i)`.
    pub fn closure(&self, k: usize, i: usize) -> Vec<(usize, usize)> {
        let pts = &self.cells[k][i].points;
        let mut out = Vec::new();
        for d in 0..=k {
            for (j, c) in self.cells[d].iter().enumerate() {
                if c.points.iter().all(|p| pts.binary_search(p).is_ok()) {
                    out.push((d, j));
                }
            }
        }
        out
    }

    /// Sign comparing the frame of `(k, i)` pushed through `map` with the
    /// frame of the image cell `(k, j)`.
    fn transport_sign(&self, k: usize, i: usize, j: usize, map: &dyn Fn(usize) -> usize) -> i32 {
        if k == 0 {
            return 1;
        }
        let vs: QMatrix = self.cells[k][i]
            .frame
            .iter()
            .map(|&(a, b)| diff(&self.points[map(b)], &self.points[map(a)]))
            .collect();
        sign_of(&self.det_in_frame(k, j, &vs))
    }

    /// Checks `∂∂ = 0` on the shape itself.
    pub fn boundary_squares_to_zero(&self) -> bool {
        (2..=self.top_dim()).all(|k| {
            (0..self.count(k)).all(|i| {
                let mut acc: HashMap<usize, i32> = HashMap::new();
                for &(j, s) in self.faces(k, i) {
                    for &(l, t) in self.faces(k - 1, j) {
                        *acc.entry(l).or_default() += s * t;
                    }
                }
                acc.values().all(|&x| x == 0)
            })
        })
    }
}

/// Identification of facet `facet` of piece `piece` with a facet of piece
/// `target` through the point map `map` (defined on the facet's points).
#[derive(Clone, Debug)]
pub struct Gluing {
    pub piece: usize,
    pub facet: usize,
    pub target: usize,
    pub map: HashMap<usize, usize>,
}

/// Union-find with orientation parity.
struct SignedUnionFind {
    parent: Vec<usize>,
    // orientation of the element relative to its parent
    sign: Vec<i32>,
}

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        SignedUnionFind {
            parent: (0..n).collect(),
            sign: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, i32) {
        if self.parent[x] == x {
            return (x, 1);
        }
        let p = self.parent[x];
        let (r, s) = self.find(p);
        self.parent[x] = r;
        self.sign[x] *= s;
        (r, self.sign[x])
    }

    /// Records `x = s · y`; returns false on a parity conflict.
    fn union(&mut self, x: usize, y: usize, s: i32) -> bool {
        let (rx, sx) = self.find(x);
        let (ry, sy) = self.find(y);
        if rx == ry {
            return sx == s * sy;
        }
        self.parent[rx] = ry;
        self.sign[rx] = sx * s * sy;
        true
    }
}

/// The cellular chain complex of a quotient of pieces.
#[derive(Clone, Debug, Serialize)]
pub struct ChainComplex {
    /// Number of cells in each dimension.
    pub counts: Vec<usize>,
    /// `boundaries[k]`: `C_k → C_{k-1}` as a matrix with one column per
    /// `k`-cell (`boundaries[0]` is empty).
    #[serde(skip)]
    pub boundaries: Vec<IntegerMatrix>,
}

/// Free rank and torsion coefficients of one homology group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub dim: usize,
    pub rank: usize,
    #[serde(with = "crate::exact::json::big_ints")]
    pub torsion: Vec<BigInt>,
}

impl std::fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl ChainComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub fn boundary_squares_to_zero(&self) -> bool {
        (2..self.counts.len()).all(|k| self.boundaries[k - 1].mul(&self.boundaries[k]).is_zero())
    }

    /// Homology in every degree via Smith normal form.
    pub fn homology(&self) -> Vec<HomologyGroup> {
        let top = self.counts.len();
        let factors: Vec<Vec<BigInt>> = (0..=top)
            .map(|k| {
                if k == 0 || k >= top {
                    Vec::new()
                } else {
                    invariant_factors(&self.boundaries[k])
                }
            })
            .collect();
        (0..top)
            .map(|k| {
                let rank_out = factors[k].len();
                let incoming = &factors[k + 1];
                HomologyGroup {
                    dim: k,
                    rank: self.counts[k] - rank_out - incoming.len(),
                    torsion: incoming.iter().filter(|d| !d.is_one()).cloned().collect(),
                }
            })
            .collect()
    }
}

/// Copies of a shape with facet identifications.
pub struct GluedComplex<'a> {
    pub shape: &'a Shape,
    pub pieces: usize,
    classes: Vec<Vec<(usize, i32)>>,
    reps: Vec<Vec<usize>>,
}

impl<'a> GluedComplex<'a> {
    /// Applies every gluing to the closure of its facet. Fails when the
    /// induced orientation signs are inconsistent.
    pub fn new(shape: &'a Shape, pieces: usize, gluings: &[Gluing]) -> Result<Self> {
        let top = shape.top_dim();
        let mut uf: Vec<SignedUnionFind> = (0..=top)
            .map(|k| SignedUnionFind::new(pieces * shape.count(k)))
            .collect();
        let closures: Vec<Vec<(usize, usize)>> = (0..shape.count(top - 1))
            .map(|f| shape.closure(top - 1, f))
            .collect();
        for g in gluings {
            let map = |p: usize| g.map[&p];
            for &(k, i) in &closures[g.facet] {
                let img: Vec<usize> = shape.cell(k, i).points.iter().map(|&p| map(p)).collect();
                let j = shape.find(k, &img).ok_or_else(|| {
                    Error::Inconsistent(format!("gluing of facet {} does not map cells to cells", g.facet))
                })?;
                let s = shape.transport_sign(k, i, j, &map);
                let n = shape.count(k);
                if !uf[k].union(g.piece * n + i, g.target * n + j, s) {
                    return Err(Error::Inconsistent(format!(
                        "orientation conflict on a {k}-cell of piece {}",
                        g.piece
                    )));
                }
            }
        }
        let mut classes = Vec::with_capacity(top + 1);
        let mut reps = Vec::with_capacity(top + 1);
        for (k, u) in uf.iter_mut().enumerate() {
            let n = pieces * shape.count(k);
            let mut id: HashMap<usize, usize> = HashMap::new();
            let mut cls = Vec::with_capacity(n);
            let mut rep = Vec::new();
            for x in 0..n {
                let (r, s) = u.find(x);
                let next = id.len();
                let c = *id.entry(r).or_insert(next);
                if c == rep.len() {
                    rep.push(x);
                }
                cls.push((c, s));
            }
            // orient each class like its representative
            let rep_sign: Vec<i32> = rep.iter().map(|&r| cls[r].1).collect();
            for c in cls.iter_mut() {
                c.1 *= rep_sign[c.0];
            }
            classes.push(cls);
            reps.push(rep);
        }
        Ok(GluedComplex {
            shape,
            pieces,
            classes,
            reps,
        })
    }

    pub fn count(&self, k: usize) -> usize {
        self.reps[k].len()
    }

    /// Class of cell `i` of dimension `k` in `piece`, with its orientation
    /// relative to the class.
    pub fn class_of(&self, k: usize, piece: usize, i: usize) -> (usize, i32) {
        self.classes[k][piece * self.shape.count(k) + i]
    }

    /// Chain complex of the cells selected by `keep` (a subcomplex must be
    /// closed under faces), indexed by `(dim, piece, cell)` of a
    /// representative.
    pub fn chain_complex_where(&self, keep: impl Fn(usize, usize, usize) -> bool) -> ChainComplex {
        let top = self.shape.top_dim();
        let mut index: Vec<HashMap<usize, usize>> = Vec::new();
        for k in 0..=top {
            let n = self.shape.count(k);
            let mut m = HashMap::new();
            for (c, &x) in self.reps[k].iter().enumerate() {
                if keep(k, x / n, x % n) {
                    let next = m.len();
                    m.insert(c, next);
                }
            }
            index.push(m);
        }
        let counts: Vec<usize> = index.iter().map(|m| m.len()).collect();
        let mut boundaries = vec![IntegerMatrix::zeros(0, counts[0])];
        for k in 1..=top {
            let n = self.shape.count(k);
            let mut d = IntegerMatrix::zeros(counts[k - 1], counts[k]);
            for (&c, &col) in &index[k] {
                let x = self.reps[k][c];
                let (piece, i) = (x / n, x % n);
                for &(j, s) in self.shape.faces(k, i) {
                    let (cf, t) = self.class_of(k - 1, piece, j);
                    let row = index[k - 1][&cf];
                    let cur = d.get(row, col).clone();
                    d.set(row, col, cur + BigInt::from(s * t));
                }
            }
            boundaries.push(d);
        }
        ChainComplex { counts, boundaries }
    }

    pub fn chain_complex(&self) -> ChainComplex {
        self.chain_complex_where(|_, _, _| true)
    }
}

/// The unit cube `[0,1]³`; point `c` has coordinate `i` equal to bit `i`
/// of `c`, and the face `2 i + b` is `{x_i = b}`.
pub fn unit_cube() -> Shape {
    let points: Vec<Vec<Rational>> = (0..8u32)
        .map(|c| (0..3).map(|i| Rational::from_integer(BigInt::from((c >> i) & 1))).collect())
        .collect();
    let mut edges = Vec::new();
    for c in 0..8usize {
        for i in 0..3 {
            if c & (1 << i) == 0 {
                edges.push(vec![c, c | (1 << i)]);
            }
        }
    }
    let squares: Vec<Vec<usize>> = (0..6)
        .map(|f| crate::polytope::cube_face_corners(f).iter().map(|&c| c as usize).collect())
        .collect();
    Shape::new(
        points,
        vec![(0..8).map(|c| vec![c]).collect(), edges, squares, vec![(0..8).collect()]],
    )
    .expect("unit cube")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_boundary() {
        let c = unit_cube();
        assert!(c.boundary_squares_to_zero());
        assert_eq!(c.faces(3, 0).len(), 6);
        // opposite faces have opposite incidence under translation
        let g = GluedComplex::new(&c, 1, &[]).unwrap();
        let h = g.chain_complex().homology();
        assert_eq!(h.iter().map(|x| x.rank).collect::<Vec<_>>(), vec![1, 0, 0, 0]);
    }

    fn torus_gluings() -> Vec<Gluing> {
        (0..3)
            .map(|i| Gluing {
                piece: 0,
                facet: 2 * i,
                target: 0,
                map: crate::polytope::cube_face_corners(2 * i)
                    .iter()
                    .map(|&c| (c as usize, (c | (1 << i)) as usize))
                    .collect(),
            })
            .collect()
    }

    #[test]
    fn single_cube_three_torus() {
        let c = unit_cube();
        let g = GluedComplex::new(&c, 1, &torus_gluings()).unwrap();
        let cc = g.chain_complex();
        assert_eq!(cc.counts, vec![1, 3, 3, 1]);
        assert!(cc.boundary_squares_to_zero());
        let h = cc.homology();
        assert_eq!(h.iter().map(|x| x.rank).collect::<Vec<_>>(), vec![1, 3, 3, 1]);
        assert!(h.iter().all(|x| x.torsion.is_empty()));
        assert_eq!(cc.euler_characteristic(), 0);
    }

    #[test]
    fn half_turn_gluing_gives_torsion() {
        // x-faces by translation, y-faces by translation, z-faces with a
        // half turn about the z-axis: the flat manifold with holonomy Z/2
        let c = unit_cube();
        let mut gl = torus_gluings();
        gl[2].map = crate::polytope::cube_face_corners(4)
            .iter()
            .map(|&p| {
                let p = p as usize;
                (p, (p ^ 0b011) | 0b100)
            })
            .collect();
        let g = GluedComplex::new(&c, 1, &gl).unwrap();
        let h = g.chain_complex().homology();
        assert_eq!(h[1].rank, 1);
        assert_eq!(h[1].torsion, vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(h[3].rank, 1);
    }

    #[test]
    fn orientation_conflict_detected() {
        // gluing a square to itself by a reflection
        let c = unit_cube();
        let gl = vec![Gluing {
            piece: 0,
            facet: 0,
            target: 0,
            map: [(0, 2), (2, 0), (4, 4), (6, 6)].into_iter().collect(),
        }];
        assert!(GluedComplex::new(&c, 1, &gl).is_err());
    }
}
