//! The ideal regular right-angled 24-cell in the hyperboloid model.
//!
//! Vertices, sides and all derived combinatorics use 0-based indices
//! internally; vertex `k` here is the vertex numbered `k + 1` in the
//! canonical coordinate list, and side `s` is side `s + 1` of the pairing
//! files.

pub mod symmetry;

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::{qf, rational_sqrt, Rational, Vec5};
use crate::{Error, Result};

pub use crate::exact::LORENTZ_DIAG;
pub use symmetry::{reflection, symmetry_group, Symmetry, SymmetryGroup};

pub const NUM_VERTICES: usize = 24;
pub const NUM_FACETS: usize = 24;
pub const NUM_RIDGES: usize = 96;
pub const NUM_EDGES: usize = 96;

/// Lorentzian product of two vertices joined by an edge.
///
/// For light-like vertices normalised to last coordinate 1 the product is
/// `x·y - 1` with `x`, `y` unit vectors of R⁴. The vertex graph of the
/// 24-cell joins each vertex to its 8 nearest neighbours, at Euclidean
/// dot product 1/2, giving the value -1/2. The other values that occur
/// are -1, -3/2 and -2.
pub const EDGE_GRAM: (i64, i64) = (-1, 2);

/// Vertex sets of the 24 sides, 1-based, in side order. Side numbering
/// follows the domain columns of the bundled side pairing.
pub const SIDE_VERTEX_SETS: [[usize; 6]; 24] = [
    [13, 14, 15, 16, 17, 19],
    [5, 6, 7, 8, 18, 19],
    [9, 10, 11, 12, 17, 20],
    [1, 2, 3, 4, 18, 20],
    [11, 12, 15, 16, 17, 21],
    [3, 4, 7, 8, 18, 21],
    [9, 10, 13, 14, 17, 22],
    [1, 2, 5, 6, 18, 22],
    [7, 8, 15, 16, 19, 21],
    [3, 4, 11, 12, 20, 21],
    [5, 6, 13, 14, 19, 22],
    [1, 2, 9, 10, 20, 22],
    [10, 12, 14, 16, 17, 23],
    [2, 4, 6, 8, 18, 23],
    [9, 11, 13, 15, 17, 24],
    [1, 3, 5, 7, 18, 24],
    [6, 8, 14, 16, 19, 23],
    [2, 4, 10, 12, 20, 23],
    [5, 7, 13, 15, 19, 24],
    [1, 3, 9, 11, 20, 24],
    [4, 8, 12, 16, 21, 23],
    [2, 6, 10, 14, 22, 23],
    [3, 7, 11, 15, 21, 24],
    [1, 5, 9, 13, 22, 24],
];

/// Lorentzian inner product of signature (4,1).
pub fn lorentz_dot(x: &[Rational], y: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..5 {
        let t = &x[i] * &y[i];
        if LORENTZ_DIAG[i] > 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

/// The canonical vertex coordinates, in order.
pub fn canonical_vertices() -> Vec<Vec5> {
    let mut out = Vec::with_capacity(24);
    for bits in 0..16u32 {
        let mut v: Vec5 = std::array::from_fn(|_| Rational::zero());
        for (i, c) in v.iter_mut().take(4).enumerate() {
            let positive = bits & (1 << (3 - i)) != 0;
            *c = if positive { qf(1, 2) } else { qf(-1, 2) };
        }
        v[4] = qf(1, 1);
        out.push(v);
    }
    for axis in 0..4 {
        for s in [1, -1] {
            let mut v: Vec5 = std::array::from_fn(|_| Rational::zero());
            v[axis] = qf(s, 1);
            v[4] = qf(1, 1);
            out.push(v);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ridge {
    /// The two sides meeting at the ridge, ascending.
    pub facets: [usize; 2],
    /// Its three vertices, ascending.
    pub vertices: [usize; 3],
}

/// Link of an ideal vertex: a cube whose 8 corners are the edges at the
/// vertex and whose 6 faces are the incident sides.
///
/// Corners are labelled by 3-bit patterns; face `2 * axis + side` is the
/// set of corners whose bit `axis` equals `side`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexLink {
    /// Neighbouring vertex at each corner pattern.
    pub corners: [usize; 8],
    /// Side at each cube face.
    pub faces: [usize; 6],
}

impl VertexLink {
    pub fn corner_of(&self, neighbour: usize) -> Option<u8> {
        self.corners.iter().position(|&n| n == neighbour).map(|p| p as u8)
    }

    pub fn face_of(&self, facet: usize) -> Option<usize> {
        self.faces.iter().position(|&f| f == facet)
    }
}

/// Corners of cube face `face` in increasing pattern order.
pub fn cube_face_corners(face: usize) -> [u8; 4] {
    let (axis, side) = (face / 2, (face % 2) as u8);
    let mut out = [0u8; 4];
    let mut k = 0;
    for c in 0..8u8 {
        if (c >> axis) & 1 == side {
            out[k] = c;
            k += 1;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Polytope24 {
    pub vertices: Vec<Vec5>,
    /// Sorted vertex indices of each side.
    pub facets: Vec<[usize; 6]>,
    /// Outward normals, `⟨n, n⟩ = 1` and `⟨n, v⟩ ≤ 0` on every vertex.
    pub normals: Vec<Vec5>,
    pub ridges: Vec<Ridge>,
    pub edges: Vec<[usize; 2]>,
    pub vertex_links: Vec<VertexLink>,
    vertex_facets: Vec<Vec<usize>>,
    neighbours: Vec<Vec<usize>>,
    ridge_by_vertices: HashMap<[usize; 3], usize>,
    edge_by_vertices: HashMap<[usize; 2], usize>,
    facet_ridges: Vec<Vec<usize>>,
}

/// Shared lazily built instance.
pub fn polytope() -> &'static Polytope24 {
    static P: OnceLock<Polytope24> = OnceLock::new();
    P.get_or_init(|| build_24cell().expect("24-cell construction"))
}

fn gram(vertices: &[Vec5]) -> Vec<Vec<Rational>> {
    vertices
        .iter()
        .map(|a| vertices.iter().map(|b| lorentz_dot(a, b)).collect())
        .collect()
}

/// Supporting hyperplanes of the vertex set: every maximal vertex subset
/// orthogonal to a common space-like vector with all other vertices on one
/// side. Returns sorted vertex sets with outward normals.
fn derive_facets(vertices: &[Vec5]) -> Result<Vec<(Vec<usize>, Vec5)>> {
    let n = vertices.len();
    let mut found: Vec<(Vec<usize>, Vec5)> = Vec::new();
    let ints = integral_rows(vertices)?;
    // sign-twisted so that a Euclidean cross product is Lorentz-orthogonal
    let twisted: Vec<[i128; 5]> = ints
        .iter()
        .map(|v| std::array::from_fn(|i| if LORENTZ_DIAG[i] > 0 { v[i] } else { -v[i] }))
        .collect();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let quad = [a, b, c, d];
                    if found.iter().any(|(s, _)| quad.iter().all(|x| s.contains(x))) {
                        continue;
                    }
                    let normal = cross4([&twisted[a], &twisted[b], &twisted[c], &twisted[d]]);
                    if normal.iter().all(|x| *x == 0) {
                        continue;
                    }
                    let vals: Vec<i128> = twisted.iter().map(|v| (0..5).map(|i| normal[i] * v[i]).sum()).collect();
                    let pos = vals.iter().any(|x| *x > 0);
                    let neg = vals.iter().any(|x| *x < 0);
                    if pos && neg {
                        continue;
                    }
                    let sign = if pos { -1 } else { 1 };
                    let normal: Vec<Rational> = normal.iter().map(|&x| Rational::from_integer((sign * x).into())).collect();
                    let norm2 = lorentz_dot(&normal, &normal);
                    if !norm2.is_positive() {
                        continue;
                    }
                    let scale = rational_sqrt(&norm2).ok_or_else(|| {
                        Error::Inconsistent("facet normal length is irrational".into())
                    })?;
                    let normal: Vec5 = std::array::from_fn(|i| &normal[i] / &scale);
                    let set: Vec<usize> = (0..n).filter(|&i| vals[i] == 0).collect();
                    found.push((set, normal));
                }
            }
        }
    }
    Ok(found)
}

/// Coordinates scaled by a common denominator to small integers.
fn integral_rows(vertices: &[Vec5]) -> Result<Vec<[i128; 5]>> {
    let den = vertices
        .iter()
        .flat_map(|v| v.iter())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let overflow = || Error::Inconsistent("vertex coordinates too large".into());
    vertices
        .iter()
        .map(|v| {
            let mut row = [0i128; 5];
            for (r, x) in row.iter_mut().zip(v) {
                *r = (x.numer() * (&den / x.denom())).to_i128().ok_or_else(overflow)?;
            }
            Ok(row)
        })
        .collect()
}

/// Vector orthogonal to four rows in R⁵ (signed 4×4 minors); zero iff the
/// rows are dependent.
fn cross4(rows: [&[i128; 5]; 4]) -> [i128; 5] {
    std::array::from_fn(|skip| {
        let cols: Vec<usize> = (0..5).filter(|&j| j != skip).collect();
        let m: [[i128; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| rows[i][cols[j]]));
        let d = det4(&m);
        if skip % 2 == 0 {
            d
        } else {
            -d
        }
    })
}

fn det4(m: &[[i128; 4]; 4]) -> i128 {
    let det3 = |r: [usize; 3], c: [usize; 3]| -> i128 {
        m[r[0]][c[0]] * (m[r[1]][c[1]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[1]])
            - m[r[0]][c[1]] * (m[r[1]][c[0]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[0]])
            + m[r[0]][c[2]] * (m[r[1]][c[0]] * m[r[2]][c[1]] - m[r[1]][c[1]] * m[r[2]][c[0]])
    };
    (0..4)
        .map(|j| {
            let c: Vec<usize> = (0..4).filter(|&k| k != j).collect();
            let minor = m[0][j] * det3([1, 2, 3], [c[0], c[1], c[2]]);
            if j % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .sum()
}

/// Builds the 24-cell from its canonical vertex coordinates.
pub fn build_24cell() -> Result<Polytope24> {
    let vertices = canonical_vertices();
    for v in &vertices {
        if !lorentz_dot(v, v).is_zero() || v[4] != qf(1, 1) {
            return Err(Error::Inconsistent("vertex not light-like".into()));
        }
    }
    let g = gram(&vertices);

    // sides, renumbered by the frozen side table
    let derived = derive_facets(&vertices)?;
    if derived.len() != NUM_FACETS {
        return Err(Error::Inconsistent(format!("{} facets derived", derived.len())));
    }
    let mut facets = Vec::with_capacity(24);
    let mut normals = Vec::with_capacity(24);
    for side in SIDE_VERTEX_SETS.iter() {
        let want: Vec<usize> = side.iter().map(|x| x - 1).collect();
        let (set, normal) = derived
            .iter()
            .find(|(s, _)| *s == want)
            .ok_or_else(|| Error::Inconsistent(format!("side {side:?} not a facet")))?;
        facets.push(<[usize; 6]>::try_from(set.as_slice()).unwrap());
        normals.push(normal.clone());
    }

    let edge_value = qf(EDGE_GRAM.0, EDGE_GRAM.1);
    let mut edges = Vec::new();
    for a in 0..24 {
        for b in a + 1..24 {
            if g[a][b] == edge_value {
                edges.push([a, b]);
            }
        }
    }
    let mut neighbours = vec![Vec::new(); 24];
    for &[a, b] in &edges {
        neighbours[a].push(b);
        neighbours[b].push(a);
    }
    for ns in neighbours.iter_mut() {
        ns.sort_unstable();
    }

    let mut ridges = Vec::new();
    for f in 0..24 {
        for h in f + 1..24 {
            let common: Vec<usize> = facets[f].iter().copied().filter(|v| facets[h].contains(v)).collect();
            if common.len() == 3 {
                ridges.push(Ridge {
                    facets: [f, h],
                    vertices: [common[0], common[1], common[2]],
                });
            }
        }
    }

    let mut vertex_facets = vec![Vec::new(); 24];
    for (f, set) in facets.iter().enumerate() {
        for &v in set {
            vertex_facets[v].push(f);
        }
    }

    let ridge_by_vertices = ridges.iter().enumerate().map(|(i, r)| (r.vertices, i)).collect();
    let edge_by_vertices = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut facet_ridges = vec![Vec::new(); 24];
    for (i, r) in ridges.iter().enumerate() {
        facet_ridges[r.facets[0]].push(i);
        facet_ridges[r.facets[1]].push(i);
    }

    let mut p = Polytope24 {
        vertices,
        facets,
        normals,
        ridges,
        edges,
        vertex_links: Vec::new(),
        vertex_facets,
        neighbours,
        ridge_by_vertices,
        edge_by_vertices,
        facet_ridges,
    };
    p.vertex_links = (0..24).map(|v| p.build_link(v)).collect::<Result<_>>()?;
    p.check_counts()?;
    Ok(p)
}

impl Polytope24 {
    fn check_counts(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Inconsistent(format!("24-cell count invariant: {what}")));
        if self.facets.len() != NUM_FACETS || self.ridges.len() != NUM_RIDGES || self.edges.len() != NUM_EDGES {
            return bad("global counts");
        }
        if self.facet_ridges.iter().any(|r| r.len() != 8) {
            return bad("ridges per facet");
        }
        if self.vertex_facets.iter().any(|f| f.len() != 6) || self.neighbours.iter().any(|n| n.len() != 8) {
            return bad("vertex degrees");
        }
        Ok(())
    }

    /// Whether `a` and `b` span a cube edge in the link of `v`.
    fn link_adjacent(&self, v: usize, a: usize, b: usize) -> bool {
        let mut t = [v, a, b];
        t.sort_unstable();
        self.ridge_by_vertices.contains_key(&t)
    }

    fn build_link(&self, v: usize) -> Result<VertexLink> {
        let nb = &self.neighbours[v];
        let fail = || Error::Inconsistent(format!("vertex link of {} is not a cube", v + 1));
        let adj = |a: usize, b: usize| self.link_adjacent(v, a, b);
        let mut corners = [usize::MAX; 8];
        corners[0] = nb[0];
        let first: Vec<usize> = nb.iter().copied().filter(|&b| adj(nb[0], b)).collect();
        if first.len() != 3 {
            return Err(fail());
        }
        corners[1] = first[0];
        corners[2] = first[1];
        corners[4] = first[2];
        for (pat, x, y) in [(3usize, 1usize, 2usize), (5, 1, 4), (6, 2, 4)] {
            let common: Vec<usize> = nb
                .iter()
                .copied()
                .filter(|&b| b != corners[0] && adj(corners[x], b) && adj(corners[y], b))
                .collect();
            if common.len() != 1 {
                return Err(fail());
            }
            corners[pat] = common[0];
        }
        let rest: Vec<usize> = nb.iter().copied().filter(|b| !corners.contains(b)).collect();
        if rest.len() != 1 {
            return Err(fail());
        }
        corners[7] = rest[0];
        for p in 0..8usize {
            for q in p + 1..8usize {
                let one_bit = (p ^ q).count_ones() == 1;
                if one_bit != adj(corners[p], corners[q]) {
                    return Err(fail());
                }
            }
        }
        let mut faces = [usize::MAX; 6];
        for &f in &self.vertex_facets[v] {
            let mut pats: Vec<u8> = self.facets[f]
                .iter()
                .filter_map(|&u| corners.iter().position(|&c| c == u).map(|p| p as u8))
                .collect();
            pats.sort_unstable();
            let face = (0..6).find(|&k| cube_face_corners(k).to_vec() == pats).ok_or_else(fail)?;
            faces[face] = f;
        }
        if faces.contains(&usize::MAX) {
            return Err(fail());
        }
        Ok(VertexLink { corners, faces })
    }

    /// Sides containing vertex `v`, ascending.
    pub fn facets_at(&self, v: usize) -> &[usize] {
        &self.vertex_facets[v]
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.neighbours[v]
    }

    pub fn facet_contains(&self, f: usize, v: usize) -> bool {
        self.facets[f].binary_search(&v).is_ok()
    }

    pub fn ridge_index(&self, mut vertices: [usize; 3]) -> Option<usize> {
        vertices.sort_unstable();
        self.ridge_by_vertices.get(&vertices).copied()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edge_by_vertices.get(&key).copied()
    }

    /// Ridges lying in side `f`.
    pub fn ridges_of(&self, f: usize) -> &[usize] {
        &self.facet_ridges[f]
    }

    /// The other side through ridge `r`.
    pub fn across(&self, r: usize, f: usize) -> usize {
        let [a, b] = self.ridges[r].facets;
        if a == f {
            b
        } else {
            debug_assert_eq!(b, f);
            a
        }
    }

    /// Facet adjacency: sides sharing a ridge.
    pub fn facet_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.facets.len()];
        for r in &self.ridges {
            adj[r.facets[0]].push(r.facets[1]);
            adj[r.facets[1]].push(r.facets[0]);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        adj
    }

    pub fn facets_adjacent(&self, a: usize, b: usize) -> bool {
        let key = if a < b { [a, b] } else { [b, a] };
        self.ridges.iter().any(|r| r.facets == key)
    }

    /// Distinct values of the Lorentzian Gram matrix over vertex pairs.
    pub fn gram_values(&self) -> Vec<Rational> {
        let mut vals: Vec<Rational> = Vec::new();
        for a in 0..self.vertices.len() {
            for b in a + 1..self.vertices.len() {
                let x = lorentz_dot(&self.vertices[a], &self.vertices[b]);
                if !vals.contains(&x) {
                    vals.push(x);
                }
            }
        }
        vals.sort();
        vals
    }

    pub fn gram(&self) -> Vec<Vec<Rational>> {
        gram(&self.vertices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_vertex_sets() {
        let p = polytope();
        let one: Vec<usize> = p.facets[0].iter().map(|v| v + 1).collect();
        assert_eq!(one, vec![13, 14, 15, 16, 17, 19]);
        let two: Vec<usize> = p.facets[1].iter().map(|v| v + 1).collect();
        assert_eq!(two, vec![5, 6, 7, 8, 18, 19]);
    }

    #[test]
    fn face_counts() {
        let p = polytope();
        assert_eq!(p.ridges.len(), 96);
        assert_eq!(p.edges.len(), 96);
        // boundary complex Euler characteristic: V - E + F - C
        assert_eq!(24 - 96 + 96 - 24, 0);
        for r in &p.ridges {
            let [a, b, c] = r.vertices;
            assert!(p.edge_index(a, b).is_some() && p.edge_index(b, c).is_some() && p.edge_index(a, c).is_some());
        }
    }

    #[test]
    fn adjacency_of_first_sides() {
        let p = polytope();
        let adj = p.facet_adjacency();
        assert_eq!(adj[0].len(), 8);
        assert!(!p.facets_adjacent(0, 1));
        for (a, list) in adj.iter().enumerate() {
            for &b in list {
                assert!(adj[b].contains(&a));
            }
        }
    }

    #[test]
    fn gram_fingerprint() {
        let p = polytope();
        let vals = p.gram_values();
        assert_eq!(vals, vec![qf(-2, 1), qf(-3, 2), qf(-1, 1), qf(-1, 2)]);
    }

    #[test]
    fn normals_are_outward_and_unit() {
        let p = polytope();
        for (f, n) in p.normals.iter().enumerate() {
            assert_eq!(lorentz_dot(n, n), qf(1, 1));
            for (v, x) in p.vertices.iter().enumerate() {
                let d = lorentz_dot(n, x);
                assert_eq!(d.is_zero(), p.facet_contains(f, v));
                assert!(!d.is_positive());
            }
        }
    }

    #[test]
    fn vertex_links_follow_labels() {
        let p = polytope();
        for (v, link) in p.vertex_links.iter().enumerate() {
            let mut cs = link.corners.to_vec();
            cs.sort_unstable();
            assert_eq!(cs, p.neighbours(v).to_vec());
            for (k, &f) in link.faces.iter().enumerate() {
                for c in cube_face_corners(k) {
                    assert!(p.facet_contains(f, link.corners[c as usize]));
                }
            }
        }
    }
}
