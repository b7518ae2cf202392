//! Cusps: vertex cycles, the cube complexes tiling cusp cross-sections,
//! parabolic subgroups and the classification of the sections among the
//! six closed orientable flat 3-manifolds.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::linalg::{self, QMatrix};
use crate::exact::{q, rational_gcd, smith_normal_form, ExactMatrix, IntegerMatrix, Rational, Vec5};
use crate::group::{eval_word, Letter, Word};
use crate::pairing::{vertex_classes, SideGluing, SidePairing};
use crate::polytope::{cube_face_corners, lorentz_dot, polytope};
use crate::{Error, Result};

/// One orbit of ideal vertices under the side pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexCycle {
    /// 0-based vertices, ascending.
    pub vertices: Vec<usize>,
    /// `(vertex, side, image)`: the map of `side` carries `vertex` to
    /// `image`.
    pub transitions: Vec<(usize, usize, usize)>,
}

pub fn vertex_cycles(sp: &SidePairing) -> Vec<VertexCycle> {
    let p = polytope();
    vertex_classes(sp)
        .into_iter()
        .map(|vertices| {
            let transitions = vertices
                .iter()
                .flat_map(|&v| {
                    p.facets_at(v)
                        .iter()
                        .map(move |&s| (v, s, sp.map_vertex(s, v).unwrap()))
                })
                .collect();
            VertexCycle {
                vertices,
                transitions,
            }
        })
        .collect()
}

/// Where a cube face is glued. `corners[c]` is the corner of the target
/// cube matched with corner `c` (only the four corners on the face are
/// meaningful; the rest hold `u8::MAX`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceGluing {
    pub target: usize,
    pub target_face: usize,
    pub corners: [u8; 8],
    /// Side of the 24-cell whose pairing induces the gluing.
    pub side: Option<usize>,
}

/// A cube of a cusp complex: the link of `vertex` in copy `copy`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CuspCube {
    pub copy: usize,
    pub vertex: usize,
}

/// Closed 3-manifold tiled by unit cubes glued face to face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspComplex {
    pub cubes: Vec<CuspCube>,
    pub faces: Vec<[FaceGluing; 6]>,
}

impl CuspComplex {
    /// Validates that the face gluings are involutive isometries of squares.
    pub fn new(cubes: Vec<CuspCube>, faces: Vec<[FaceGluing; 6]>) -> Result<Self> {
        let bad = |msg: String| Err(Error::Inconsistent(msg));
        if cubes.len() != faces.len() {
            return bad("cube and face counts differ".into());
        }
        for (c, fs) in faces.iter().enumerate() {
            for (f, g) in fs.iter().enumerate() {
                let back = &faces[g.target][g.target_face];
                if back.target != c || back.target_face != f {
                    return bad(format!("face {f} of cube {c} is not glued back"));
                }
                let src = cube_face_corners(f);
                let dst = cube_face_corners(g.target_face);
                let mut img: Vec<u8> = src.iter().map(|&k| g.corners[k as usize]).collect();
                for &k in &src {
                    if back.corners[g.corners[k as usize] as usize] != k {
                        return bad(format!("corner maps of face {f} of cube {c} are not inverse"));
                    }
                }
                img.sort_unstable();
                if img != dst.to_vec() {
                    return bad(format!("face {f} of cube {c} is not mapped onto a face"));
                }
                // adjacency of corners on the square must be preserved
                for &a in &src {
                    for &b in &src {
                        let adj = (a ^ b).count_ones() == 1;
                        let adj2 = (g.corners[a as usize] ^ g.corners[b as usize]).count_ones() == 1;
                        if adj != adj2 {
                            return bad(format!("face {f} of cube {c} is not glued isometrically"));
                        }
                    }
                }
            }
        }
        Ok(CuspComplex { cubes, faces })
    }

    /// One cube with opposite faces glued by translation.
    pub fn cubical_torus() -> Self {
        let faces = [0, 1, 2, 3, 4, 5].map(|f| {
            let axis = f / 2;
            let mut corners = [u8::MAX; 8];
            for c in cube_face_corners(f) {
                corners[c as usize] = c ^ (1 << axis);
            }
            FaceGluing {
                target: 0,
                target_face: f ^ 1,
                corners,
                side: None,
            }
        });
        CuspComplex::new(vec![CuspCube { copy: 0, vertex: 0 }], vec![faces]).expect("torus gluing")
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Number of glued face pairs (three per cube).
    pub fn face_pairs(&self) -> usize {
        self.cubes.len() * 3
    }

    /// Breadth-first spanning tree from cube 0: `parent[c] = (cube, face)`
    /// through which `c` was reached. Face slots are scanned in order.
    pub fn spanning_tree(&self) -> Vec<Option<(usize, usize)>> {
        let mut parent = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for f in 0..6 {
                let t = self.faces[c][f].target;
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((c, f));
                    queue.push_back(t);
                }
            }
        }
        parent
    }

    fn is_tree_slot(&self, parent: &[Option<(usize, usize)>], c: usize, f: usize) -> bool {
        let g = &self.faces[c][f];
        parent[g.target] == Some((c, f)) || parent[c] == Some((g.target, g.target_face))
    }

    /// Face slots of the non-tree gluings, one per face pair.
    pub fn cotree_slots(&self) -> Vec<(usize, usize)> {
        let parent = self.spanning_tree();
        let mut out = Vec::new();
        for c in 0..self.len() {
            for f in 0..6 {
                let g = &self.faces[c][f];
                if (c, f) <= (g.target, g.target_face) && !self.is_tree_slot(&parent, c, f) {
                    out.push((c, f));
                }
            }
        }
        out
    }
}

/// The cube complexes of all cusps of a gluing, ordered by least vertex
/// and then least copy.
pub fn cusp_complexes<G: SideGluing + ?Sized>(g: &G) -> Result<Vec<CuspComplex>> {
    let p = polytope();
    let sp = g.base();
    let n = g.copies() * 24;
    let idx = |copy: usize, v: usize| copy * 24 + v;
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    // vertex-major order so that complexes come sorted by least vertex
    for v0 in 0..24 {
        for k0 in 0..g.copies() {
            if comp[idx(k0, v0)] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut cubes = vec![CuspCube { copy: k0, vertex: v0 }];
            let mut local: HashMap<usize, usize> = HashMap::from([(idx(k0, v0), 0)]);
            comp[idx(k0, v0)] = id;
            let mut faces: Vec<[FaceGluing; 6]> = Vec::new();
            let mut i = 0;
            while i < cubes.len() {
                let CuspCube { copy, vertex: a } = cubes[i];
                let link = &p.vertex_links[a];
                let mut slots = Vec::with_capacity(6);
                for f in 0..6 {
                    let side = link.faces[f];
                    let b = sp.map_vertex(side, a).expect("vertex on side");
                    let k2 = g.neighbour_copy(copy, side);
                    let key = idx(k2, b);
                    let t = *local.entry(key).or_insert_with(|| {
                        cubes.push(CuspCube { copy: k2, vertex: b });
                        comp[key] = id;
                        cubes.len() - 1
                    });
                    let tlink = &p.vertex_links[b];
                    let tf = tlink
                        .face_of(sp.partner(side))
                        .ok_or_else(|| Error::Inconsistent("partner side misses image vertex".into()))?;
                    let mut corners = [u8::MAX; 8];
                    for c in cube_face_corners(f) {
                        let nb = link.corners[c as usize];
                        let img = sp.map_vertex(side, nb).expect("corner on side");
                        corners[c as usize] = tlink
                            .corner_of(img)
                            .ok_or_else(|| Error::Inconsistent("edge not mapped to an edge".into()))?;
                    }
                    slots.push(FaceGluing {
                        target: t,
                        target_face: tf,
                        corners,
                        side: Some(side),
                    });
                }
                faces.push(slots.try_into().unwrap());
                i += 1;
            }
            out.push(CuspComplex::new(cubes, faces)?);
        }
    }
    Ok(out)
}

/// Cube complex of one vertex cycle of an uncovered pairing.
pub fn cusp_complex(cycle: &VertexCycle, sp: &SidePairing) -> Result<CuspComplex> {
    let all = cusp_complexes(sp)?;
    all.into_iter()
        .find(|c| c.cubes.iter().any(|k| k.vertex == cycle.vertices[0]))
        .ok_or_else(|| Error::UnknownCycle(cycle.vertices[0] + 1))
}

// ---------------------------------------------------------------------------
// Combinatorial holonomy in Z³

type IMat = [[i64; 3]; 3];
type IVec = [i64; 3];

const IDENTITY3: IMat = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

fn imul(a: &IMat, b: &IMat) -> IMat {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn iapply(a: &IMat, x: &IVec) -> IVec {
    std::array::from_fn(|i| (0..3).map(|k| a[i][k] * x[k]).sum())
}

fn itranspose(a: &IMat) -> IMat {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

fn idet(a: &IMat) -> i64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

fn corner_pos(c: u8) -> IVec {
    std::array::from_fn(|i| ((c >> i) & 1) as i64)
}

/// Affine isometry `x ↦ m x + t` of Z³ with `m` a signed permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct CubeMotion {
    m: IMat,
    t: IVec,
}

impl CubeMotion {
    const ID: CubeMotion = CubeMotion {
        m: IDENTITY3,
        t: [0, 0, 0],
    };

    fn then(&self, inner: &CubeMotion) -> CubeMotion {
        let mt = iapply(&self.m, &inner.t);
        CubeMotion {
            m: imul(&self.m, &inner.m),
            t: std::array::from_fn(|i| mt[i] + self.t[i]),
        }
    }

    fn inverse(&self) -> CubeMotion {
        let mi = itranspose(&self.m);
        let t = iapply(&mi, &self.t);
        CubeMotion {
            m: mi,
            t: t.map(|x| -x),
        }
    }
}

/// The motion placing the neighbour across face `f` in this cube's frame.
fn face_motion(f: usize, g: &FaceGluing) -> CubeMotion {
    let (axis, side) = (f / 2, f % 2);
    let (taxis, tside) = (g.target_face / 2, g.target_face % 2);
    let mut inv = [u8::MAX; 8];
    for c in cube_face_corners(f) {
        inv[g.corners[c as usize] as usize] = c;
    }
    let mut m = [[0i64; 3]; 3];
    for j in 0..3 {
        if j == taxis {
            let into = if tside == 0 { 1 } else { -1 };
            let out = if side == 0 { -1 } else { 1 };
            m[axis][j] = into * out;
            continue;
        }
        let q0 = cube_face_corners(g.target_face)
            .into_iter()
            .find(|&c| (c >> j) & 1 == 0)
            .unwrap();
        let q1 = q0 | (1 << j);
        let (p0, p1) = (corner_pos(inv[q0 as usize]), corner_pos(inv[q1 as usize]));
        for i in 0..3 {
            m[i][j] = p1[i] - p0[i];
        }
    }
    let q0 = cube_face_corners(g.target_face)[0];
    let p0 = corner_pos(inv[q0 as usize]);
    let mq = iapply(&m, &corner_pos(q0));
    CubeMotion {
        m,
        t: std::array::from_fn(|i| p0[i] - mq[i]),
    }
}

/// Point group and translation lattice of a cube complex, read off from
/// its development into the cubical tiling of R³.
#[derive(Clone, Debug)]
pub struct CubeHolonomy {
    pub point_group: Vec<IMat>,
    pub lattice: Vec<IVec>,
    pub covolume: i64,
    pub orientable: bool,
}

fn lattice_basis(vectors: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let a = IntegerMatrix::from_rows(vectors.to_vec(), dim);
    let s = smith_normal_form(&a);
    (0..s.rank)
        .map(|i| s.v_inv.row(i).iter().map(|x| x * s.d.get(i, i)).collect())
        .collect()
}

fn close_group<T: Clone + PartialEq>(gens: &[T], identity: T, mul: impl Fn(&T, &T) -> T) -> Vec<T> {
    let mut elems = vec![identity];
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let x = mul(&elems[i], g);
            if !elems.contains(&x) {
                elems.push(x);
            }
        }
        i += 1;
        assert!(elems.len() <= 4096, "point group is not finite");
    }
    elems
}

impl CuspComplex {
    fn development(&self) -> (Vec<CubeMotion>, Vec<CubeMotion>) {
        let parent = self.spanning_tree();
        let mut place = vec![None; self.len()];
        place[0] = Some(CubeMotion::ID);
        // BFS order guarantees parents are placed first
        let mut order: Vec<usize> = vec![0];
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for t in 0..self.len() {
                if let Some((pc, pf)) = parent[t] {
                    if pc == c && place[t].is_none() {
                        let mv = place[c].unwrap().then(&face_motion(pf, &self.faces[c][pf]));
                        place[t] = Some(mv);
                        order.push(t);
                    }
                }
            }
            i += 1;
        }
        let place: Vec<CubeMotion> = place.into_iter().map(|p| p.expect("connected complex")).collect();
        let gens = self
            .cotree_slots()
            .into_iter()
            .map(|(c, f)| {
                let g = &self.faces[c][f];
                place[c].then(&face_motion(f, g)).then(&place[g.target].inverse())
            })
            .collect();
        (place, gens)
    }

    pub fn holonomy(&self) -> CubeHolonomy {
        let (_, gens) = self.development();
        let rots: Vec<IMat> = gens.iter().map(|g| g.m).collect();
        let point_group = close_group(&rots, IDENTITY3, imul);
        // coset representatives, then Schreier generators of the translations
        let mut reps: Vec<CubeMotion> = vec![CubeMotion::ID];
        let mut i = 0;
        while i < reps.len() {
            for g in &gens {
                let x = reps[i].then(g);
                if !reps.iter().any(|r| r.m == x.m) {
                    reps.push(x);
                }
            }
            i += 1;
        }
        let mut translations: Vec<Vec<BigInt>> = Vec::new();
        for r in &reps {
            for g in &gens {
                let x = r.then(g);
                let rep = reps.iter().find(|y| y.m == x.m).unwrap();
                let tr = rep.inverse().then(&x);
                debug_assert_eq!(tr.m, IDENTITY3);
                if tr.t != [0, 0, 0] {
                    translations.push(tr.t.iter().map(|&v| BigInt::from(v)).collect());
                }
            }
        }
        let basis = lattice_basis(&translations, 3);
        let lattice: Vec<IVec> = basis
            .iter()
            .map(|b| std::array::from_fn(|i| b[i].to_i64().unwrap()))
            .collect();
        let covolume = if lattice.len() == 3 {
            idet(&[lattice[0], lattice[1], lattice[2]]).abs()
        } else {
            0
        };
        CubeHolonomy {
            orientable: point_group.iter().all(|m| idet(m) == 1),
            point_group,
            lattice,
            covolume,
        }
    }
}

// ---------------------------------------------------------------------------
// Flat types

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FlatLabel {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
}

impl FlatLabel {
    pub fn is_chiral(self) -> bool {
        matches!(self, FlatLabel::F3 | FlatLabel::F4 | FlatLabel::F5)
    }

    /// Order of the holonomy group.
    pub fn holonomy_order(self) -> usize {
        match self {
            FlatLabel::F1 => 1,
            FlatLabel::F2 => 2,
            FlatLabel::F3 => 3,
            FlatLabel::F4 => 4,
            FlatLabel::F5 => 6,
            FlatLabel::F6 => 4,
        }
    }

    /// From the first homology `Z^rank ⊕ ⊕ Z/torsion`.
    pub fn from_first_homology(rank: usize, torsion: &[u64]) -> Option<FlatLabel> {
        match (rank, torsion) {
            (3, []) => Some(FlatLabel::F1),
            (1, [2, 2]) => Some(FlatLabel::F2),
            (1, [3]) => Some(FlatLabel::F3),
            (1, [2]) => Some(FlatLabel::F4),
            (1, []) => Some(FlatLabel::F5),
            (0, [4, 4]) => Some(FlatLabel::F6),
            _ => None,
        }
    }

    /// From the order of the point group and whether it is cyclic.
    pub fn from_point_group(order: usize, cyclic: bool) -> Option<FlatLabel> {
        match (order, cyclic) {
            (1, _) => Some(FlatLabel::F1),
            (2, _) => Some(FlatLabel::F2),
            (3, _) => Some(FlatLabel::F3),
            (4, true) => Some(FlatLabel::F4),
            (4, false) => Some(FlatLabel::F6),
            (6, true) => Some(FlatLabel::F5),
            _ => None,
        }
    }
}

impl fmt::Display for FlatLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatType {
    pub label: FlatLabel,
    pub orientable: bool,
    pub handedness: Option<i32>,
}

fn element_order<T: PartialEq + Clone>(x: &T, identity: &T, mul: impl Fn(&T, &T) -> T) -> usize {
    let mut y = x.clone();
    let mut n = 1;
    while y != *identity {
        y = mul(&y, x);
        n += 1;
    }
    n
}

/// Label from the homology fingerprint of the cube complex.
pub fn label_by_homology(c: &CuspComplex) -> Result<FlatLabel> {
    let h = crate::homology::cusp_section_homology(c)?;
    let torsion: Vec<u64> = h[1].torsion.iter().map(|t| t.to_u64().unwrap_or(0)).collect();
    FlatLabel::from_first_homology(h[1].rank, &torsion)
        .ok_or_else(|| Error::Inconsistent(format!("H1 = {} is not that of an orientable flat manifold", h[1])))
}

/// Label from the combinatorial holonomy of the cube complex.
pub fn label_by_holonomy(c: &CuspComplex) -> Result<FlatLabel> {
    let hol = c.holonomy();
    if !hol.orientable {
        return Err(Error::Inconsistent("non-orientable cusp section".into()));
    }
    let n = hol.point_group.len();
    // the section is the torus R³/L divided by the point group
    if hol.covolume != (c.len() * n) as i64 {
        return Err(Error::Inconsistent(format!(
            "translation lattice covolume {} for {} cubes and holonomy of order {n}",
            hol.covolume,
            c.len()
        )));
    }
    let cyclic = hol
        .point_group
        .iter()
        .any(|m| element_order(m, &IDENTITY3, imul) == n);
    FlatLabel::from_point_group(n, cyclic)
        .ok_or_else(|| Error::Inconsistent(format!("point group of order {n} is not a flat holonomy")))
}

/// Classifies a cusp section two independent ways; disagreement is an
/// error. Handedness is left unset here (see [`handedness`]).
pub fn classify_flat(c: &CuspComplex) -> Result<FlatType> {
    let a = label_by_homology(c)?;
    let b = label_by_holonomy(c)?;
    if a != b {
        return Err(Error::Inconsistent(format!("homology says {a}, holonomy says {b}")));
    }
    Ok(FlatType {
        label: a,
        orientable: true,
        handedness: None,
    })
}

// ---------------------------------------------------------------------------
// Parabolic subgroups

/// Stabiliser of a cusp, generated by one word per non-tree face pair of
/// its cube complex.
#[derive(Clone, Debug, Serialize)]
pub struct ParabolicSubgroup {
    /// The ideal vertex fixed by every generator (that of cube 0).
    pub vertex: usize,
    pub words: Vec<Word>,
    #[serde(skip)]
    pub matrices: Vec<ExactMatrix>,
    pub face_pairs: usize,
    pub tree_edges: usize,
}

/// Develops the cube complex along its spanning tree: cube `c` gets the
/// word `D_c` with `D_c v_c = v_0`; every non-tree gluing `(c, F) → c'`
/// contributes `D_c g_F⁻¹ D_{c'}⁻¹`.
pub fn parabolic_generators(sp: &SidePairing, c: &CuspComplex) -> Result<ParabolicSubgroup> {
    let p = polytope();
    let parent = c.spanning_tree();
    let mut dev: Vec<Option<Word>> = vec![None; c.len()];
    dev[0] = Some(Word::empty());
    let letter = |cube: usize, f: usize| -> Result<Letter> {
        let side = c.faces[cube][f]
            .side
            .ok_or_else(|| Error::Inconsistent("abstract cube complex has no side labels".into()))?;
        Ok(Letter::of_side(sp, sp.partner(side)))
    };
    let mut changed = true;
    while changed {
        changed = false;
        for t in 0..c.len() {
            if dev[t].is_some() {
                continue;
            }
            if let Some((pc, pf)) = parent[t] {
                if let Some(w) = dev[pc].clone() {
                    dev[t] = Some(w.concat(&Word::new(vec![letter(pc, pf)?])));
                    changed = true;
                }
            }
        }
    }
    let dev: Vec<Word> = dev.into_iter().map(|w| w.expect("connected complex")).collect();
    let v0 = c.cubes[0].vertex;
    let mut words = Vec::new();
    let mut matrices = Vec::new();
    for (cube, f) in c.cotree_slots() {
        let t = c.faces[cube][f].target;
        let w = dev[cube]
            .concat(&Word::new(vec![letter(cube, f)?]))
            .concat(&dev[t].inverse())
            .free_reduce();
        let m = eval_word(&w, sp);
        if m.apply(&p.vertices[v0]) != p.vertices[v0] {
            return Err(Error::NotParabolic(words.len()));
        }
        words.push(w);
        matrices.push(m);
    }
    Ok(ParabolicSubgroup {
        vertex: v0,
        words,
        matrices,
        face_pairs: c.face_pairs(),
        tree_edges: c.len() - 1,
    })
}

// ---------------------------------------------------------------------------
// Euclidean parts on the horosphere

fn qmul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

fn qapply(a: &QMatrix, x: &[Rational]) -> Vec<Rational> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

fn qidentity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect())
        .collect()
}

/// Rotation and translation of a parabolic element in horosphere
/// coordinates: `y ↦ rotation · y + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EuclideanPart {
    pub rotation: QMatrix,
    pub translation: Vec<Rational>,
}

impl EuclideanPart {
    fn identity() -> Self {
        EuclideanPart {
            rotation: qidentity(3),
            translation: vec![q(0); 3],
        }
    }

    pub fn then(&self, inner: &EuclideanPart) -> EuclideanPart {
        let rt = qapply(&self.rotation, &inner.translation);
        EuclideanPart {
            rotation: qmul(&self.rotation, &inner.rotation),
            translation: rt.iter().zip(&self.translation).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn inverse(&self) -> EuclideanPart {
        let ri = linalg::inverse(&self.rotation).expect("rotation is invertible");
        let t = qapply(&ri, &self.translation);
        EuclideanPart {
            rotation: ri,
            translation: t.into_iter().map(|x| -x).collect(),
        }
    }

    pub fn rotation_order(&self) -> usize {
        element_order(&self.rotation, &qidentity(3), qmul)
    }
}

/// Horosphere frame at an ideal vertex `v = (x, 1)`: the light-like
/// `u = (-x, 1)/2` with `⟨u, v⟩ = -1`, and a basis of `E = v⊥ ∩ u⊥` made
/// of the projections of the lowest-index coordinate vectors that are
/// independent.
#[derive(Clone, Debug)]
pub struct HorosphereFrame {
    pub v: Vec5,
    pub u: Vec5,
    pub basis: Vec<Vec5>,
    pub gram: QMatrix,
}

impl HorosphereFrame {
    pub fn at_vertex(vertex: usize) -> Self {
        let v = polytope().vertices[vertex].clone();
        let half = Rational::new(1.into(), 2.into());
        let u: Vec5 = std::array::from_fn(|i| if i < 4 { -&v[i] * &half } else { half.clone() });
        let mut basis: Vec<Vec5> = Vec::new();
        for i in 0..4 {
            let mut e: Vec5 = std::array::from_fn(|_| q(0));
            e[i] = q(1);
            let pe = project(&v, &u, &e);
            let mut rows: QMatrix = basis.iter().map(|b| b.to_vec()).collect();
            rows.push(pe.to_vec());
            if linalg::rank(&rows) == rows.len() {
                basis.push(pe);
            }
            if basis.len() == 3 {
                break;
            }
        }
        let gram = basis
            .iter()
            .map(|a| basis.iter().map(|b| lorentz_dot(a, b)).collect())
            .collect();
        HorosphereFrame { v, u, basis, gram }
    }

    pub fn project(&self, y: &Vec5) -> Vec5 {
        project(&self.v, &self.u, y)
    }

    pub fn coords(&self, y: &Vec5) -> Vec<Rational> {
        let basis: QMatrix = self.basis.iter().map(|b| b.to_vec()).collect();
        linalg::coords_in(&basis, y).expect("vector in the horosphere plane")
    }

    pub fn vector(&self, coords: &[Rational]) -> Vec5 {
        std::array::from_fn(|i| coords.iter().zip(&self.basis).map(|(c, b)| c * &b[i]).sum())
    }

    /// Squared length of coordinate vectors.
    pub fn norm2(&self, x: &[Rational]) -> Rational {
        qapply(&self.gram, x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Position of an ideal point in horosphere coordinates.
    pub fn ideal_point(&self, w: &Vec5) -> Vec<Rational> {
        let s = -lorentz_dot(w, &self.v);
        let pe = self.project(w);
        self.coords(&pe).into_iter().map(|x| x / &s).collect()
    }

    /// Euclidean part of an isometry fixing `v` with scale 1.
    pub fn part(&self, g: &ExactMatrix) -> Result<EuclideanPart> {
        if g.apply(&self.v) != self.v {
            return Err(Error::NotParabolic(0));
        }
        let cols: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|b| self.coords(&self.project(&g.apply(b))))
            .collect();
        let rotation = (0..3).map(|i| (0..3).map(|j| cols[j][i].clone()).collect()).collect();
        let translation = self.coords(&self.project(&g.apply(&self.u)));
        Ok(EuclideanPart { rotation, translation })
    }
}

fn project(v: &Vec5, u: &Vec5, y: &Vec5) -> Vec5 {
    let a = lorentz_dot(y, v);
    let b = lorentz_dot(y, u);
    std::array::from_fn(|i| &y[i] + &a * &u[i] + &b * &v[i])
}

/// Euclidean structure of a cusp group: parts of the generators, point
/// group with coset representatives, and the translation lattice.
#[derive(Clone, Debug)]
pub struct CuspGeometry {
    pub frame: HorosphereFrame,
    pub parts: Vec<EuclideanPart>,
    /// One element of the group for each rotation of the point group.
    pub cosets: Vec<EuclideanPart>,
    /// Basis of the translation lattice, in frame coordinates.
    pub lattice: Vec<Vec<Rational>>,
    /// Squared covolume of the lattice.
    pub covolume2: Rational,
    /// Squared edge length of the link cube at the vertex.
    pub cube_edge2: Rational,
}

pub fn euclidean_parts(pg: &ParabolicSubgroup) -> Result<CuspGeometry> {
    let frame = HorosphereFrame::at_vertex(pg.vertex);
    let parts = pg
        .matrices
        .iter()
        .enumerate()
        .map(|(i, m)| frame.part(m).map_err(|_| Error::NotParabolic(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut cosets = vec![EuclideanPart::identity()];
    let mut i = 0;
    while i < cosets.len() {
        for g in &parts {
            let x = cosets[i].then(g);
            if !cosets.iter().any(|r| r.rotation == x.rotation) {
                cosets.push(x);
            }
        }
        i += 1;
        if cosets.len() > 48 {
            return Err(Error::Inconsistent("point group is not finite".into()));
        }
    }
    let mut translations: Vec<Vec<Rational>> = Vec::new();
    for r in &cosets {
        for g in &parts {
            let x = r.then(g);
            let rep = cosets.iter().find(|y| y.rotation == x.rotation).unwrap();
            let t = rep.inverse().then(&x);
            if t.translation.iter().any(|c| !c.is_zero()) {
                translations.push(t.translation);
            }
        }
    }
    let mut den = BigInt::one();
    for t in &translations {
        for c in t {
            den = den.lcm(c.denom());
        }
    }
    let ints: Vec<Vec<BigInt>> = translations
        .iter()
        .map(|t| t.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect())
        .collect();
    let lattice: Vec<Vec<Rational>> = lattice_basis(&ints, 3)
        .into_iter()
        .map(|b| b.into_iter().map(|x| Rational::new(x, den.clone())).collect())
        .collect();
    if lattice.len() != 3 {
        return Err(Error::Inconsistent(format!("translation lattice has rank {}", lattice.len())));
    }
    let b: QMatrix = lattice.clone();
    let bg = qmul(&b, &frame.gram);
    let bt: QMatrix = (0..3).map(|i| (0..3).map(|j| b[j][i].clone()).collect()).collect();
    let covolume2 = linalg::det(&qmul(&bg, &bt));
    let p = polytope();
    let link = &p.vertex_links[pg.vertex];
    let c0 = frame.ideal_point(&p.vertices[link.corners[0]]);
    let c1 = frame.ideal_point(&p.vertices[link.corners[1]]);
    let d: Vec<Rational> = c0.iter().zip(&c1).map(|(a, b)| a - b).collect();
    let cube_edge2 = frame.norm2(&d);
    Ok(CuspGeometry {
        frame,
        parts,
        cosets,
        lattice,
        covolume2,
        cube_edge2,
    })
}

impl CuspGeometry {
    pub fn point_group_order(&self) -> usize {
        self.cosets.len()
    }

    pub fn point_group_is_cyclic(&self) -> bool {
        let n = self.cosets.len();
        self.cosets.iter().any(|c| c.rotation_order() == n)
    }

    /// Label from the matrix point group.
    pub fn label(&self) -> Option<FlatLabel> {
        FlatLabel::from_point_group(self.point_group_order(), self.point_group_is_cyclic())
    }

    /// Covolume of the translation lattice measured in link cubes.
    pub fn covolume_in_cubes(&self) -> Option<Rational> {
        let e2 = &self.cube_edge2;
        let x = &self.covolume2 / (e2 * e2 * e2);
        crate::exact::rational_sqrt(&x)
    }

    /// Volume of the cusp section in link cubes.
    pub fn section_volume_in_cubes(&self) -> Option<Rational> {
        self.covolume_in_cubes()
            .map(|c| c / Rational::from_integer(BigInt::from(self.point_group_order())))
    }

    /// Whether an isometry lies in the group.
    pub fn contains(&self, g: &ExactMatrix) -> bool {
        let Ok(x) = self.frame.part(g) else {
            return false;
        };
        let Some(rep) = self.cosets.iter().find(|c| c.rotation == x.rotation) else {
            return false;
        };
        let t = rep.inverse().then(&x).translation;
        let basis: QMatrix = self.lattice.clone();
        match linalg::coords_in(&basis, &t) {
            Some(c) => c.iter().all(|x| x.is_integer()),
            None => false,
        }
    }
}

/// Screw motion generating the translations along the rotation axis.
#[derive(Clone, Debug)]
pub struct Screw {
    /// Rotation axis in frame coordinates.
    pub axis: Vec<Rational>,
    /// Exponents of the group generators whose product is the screw.
    pub exponents: Vec<BigInt>,
    pub part: EuclideanPart,
}

/// The primitive screw of a cusp group with cyclic point group of order
/// 3, 4 or 6: the element whose translation along the axis generates all
/// axial translations in the group.
pub fn primitive_screw(geom: &CuspGeometry) -> Option<Screw> {
    let n = geom.point_group_order();
    if !(n == 3 || n == 4 || n == 6) || !geom.point_group_is_cyclic() {
        return None;
    }
    let id = qidentity(3);
    let rot = geom.cosets.iter().find(|c| c.rotation != id)?.rotation.clone();
    let shifted: QMatrix = (0..3)
        .map(|i| (0..3).map(|j| &rot[i][j] - &id[i][j]).collect())
        .collect();
    let axis = linalg::nullspace(&shifted, 3).into_iter().next()?;
    let d = geom.frame.vector(&axis);
    // axial translation is a homomorphism since rotations fix the axis
    let phi: Vec<Rational> = geom
        .parts
        .iter()
        .map(|p| lorentz_dot(&d, &geom.frame.vector(&p.translation)))
        .collect();
    let tau = rational_gcd(&phi);
    if tau.is_zero() {
        return None;
    }
    // Bezout coefficients for tau = Σ n_i φ_i
    let ints: Vec<BigInt> = phi.iter().map(|x| (x / &tau).to_integer()).collect();
    let mut exponents = vec![BigInt::zero(); ints.len()];
    let mut g = BigInt::zero();
    for (i, x) in ints.iter().enumerate() {
        let e = g.extended_gcd(x);
        for c in exponents.iter_mut().take(i) {
            *c *= &e.x;
        }
        exponents[i] = e.y;
        g = e.gcd;
    }
    if g.is_negative() {
        exponents.iter_mut().for_each(|c| *c = -c.clone());
    }
    let mut part = EuclideanPart::identity();
    for (p, c) in geom.parts.iter().zip(&exponents) {
        let step = if c.is_negative() { p.inverse() } else { p.clone() };
        for _ in 0..c.abs().to_u64()? {
            part = part.then(&step);
        }
    }
    Some(Screw { axis, exponents, part })
}

/// Sign of the rotation of the primitive screw about its axis, oriented
/// by its translation, in the ambient orientation of the frame
/// `e₁, …, e₅`. `None` unless the point group is cyclic of order 3, 4 or 6.
pub fn handedness(geom: &CuspGeometry) -> Option<i32> {
    let screw = primitive_screw(geom)?;
    let rot = &screw.part.rotation;
    let d = geom.frame.vector(&screw.axis);
    let w_coords = (0..3)
        .map(|j| (0..3).map(|i| if i == j { q(1) } else { q(0) }).collect::<Vec<_>>())
        .find(|e| qapply(rot, e) != *e)?;
    let w = geom.frame.vector(&w_coords);
    let rw = geom.frame.vector(&qapply(rot, &w_coords));
    let cols = [d, w, rw, geom.frame.v.clone(), geom.frame.u.clone()];
    let det = ExactMatrix::from_columns(&cols).det();
    match crate::exact::sign(&det) {
        0 => None,
        s => Some(s),
    }
}

/// Summary line of one cusp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspRecord {
    /// 1-based vertices of the cycle (with copies for covers).
    pub cycle: Vec<usize>,
    pub copies: Vec<usize>,
    pub size: usize,
    #[serde(rename = "type")]
    pub flat: FlatLabel,
    pub handedness: Option<i32>,
}

/// Classifies every cusp of a gluing, cross-checking the homology and
/// holonomy labels against the matrix point group, and computing the
/// handedness of chiral cusps.
pub fn census<G: SideGluing + ?Sized>(g: &G) -> Result<Vec<CuspRecord>> {
    use rayon::prelude::*;
    let complexes = cusp_complexes(g)?;
    complexes
        .par_iter()
        .map(|c| {
            let ty = classify_flat(c)?;
            let pg = parabolic_generators(g.base(), c)?;
            let geom = euclidean_parts(&pg)?;
            if geom.label() != Some(ty.label) {
                return Err(Error::Inconsistent(format!(
                    "matrix point group disagrees with {}",
                    ty.label
                )));
            }
            let hand = if ty.label.is_chiral() {
                Some(handedness(&geom).ok_or_else(|| Error::Inconsistent("no screw axis".into()))?)
            } else {
                None
            };
            Ok(CuspRecord {
                cycle: c.cubes.iter().map(|k| k.vertex + 1).collect(),
                copies: c.cubes.iter().map(|k| k.copy).collect(),
                size: c.len(),
                flat: ty.label,
                handedness: hand,
            })
        })
        .collect()
}
