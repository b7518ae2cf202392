//! Integral homology of the compact core of a glued manifold (the 24-cell
//! with a small neighbourhood of every ideal vertex cut away) and of its
//! boundary, plus homology of cusp cube complexes.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cellular::{unit_cube, ChainComplex, GluedComplex, Gluing, HomologyGroup, Shape};
use crate::cusps::CuspComplex;
use crate::exact::{Rational, Vec5};
use crate::pairing::SideGluing;
use crate::polytope::{cube_face_corners, polytope};
use crate::Result;

/// Vertex-truncated 24-cell. Point `(a, b)` sits on the edge from `a`
/// towards `b`, a quarter of the way along.
pub struct TruncatedCell {
    pub shape: Shape,
    /// Point id of each directed edge.
    pub point: HashMap<(usize, usize), usize>,
    /// Vertex each point was cut from.
    pub origin: Vec<usize>,
}

/// 3-cells `0..24` are the truncated sides, `24..48` the link cubes.
pub fn truncated_cell() -> &'static TruncatedCell {
    static CELL: OnceLock<TruncatedCell> = OnceLock::new();
    CELL.get_or_init(build_truncated_cell)
}

fn klein(v: &Vec5) -> Vec<Rational> {
    (0..4).map(|i| &v[i] / &v[4]).collect()
}

fn build_truncated_cell() -> TruncatedCell {
    let p = polytope();
    let quarter = Rational::new(1.into(), 4.into());
    let mut point = HashMap::new();
    let mut origin = Vec::new();
    let mut coords = Vec::new();
    for e in &p.edges {
        for (a, b) in [(e[0], e[1]), (e[1], e[0])] {
            let (x, y) = (klein(&p.vertices[a]), klein(&p.vertices[b]));
            coords.push(x.iter().zip(&y).map(|(s, t)| s + (t - s) * &quarter).collect());
            point.insert((a, b), origin.len());
            origin.push(a);
        }
    }
    let pt = |a: usize, b: usize| point[&(a, b)];
    let adjacent = |a: usize, b: usize| p.edge_index(a, b).is_some();

    let vertices = (0..origin.len()).map(|i| vec![i]).collect();
    let mut edges: Vec<Vec<usize>> = p.edges.iter().map(|e| vec![pt(e[0], e[1]), pt(e[1], e[0])]).collect();
    let mut squares = Vec::new();
    let mut cubes = Vec::new();
    for (a, link) in p.vertex_links.iter().enumerate() {
        for c in 0..8u8 {
            for i in 0..3 {
                if c & (1 << i) == 0 {
                    let d = c | (1 << i);
                    edges.push(vec![pt(a, link.corners[c as usize]), pt(a, link.corners[d as usize])]);
                }
            }
        }
        for f in 0..6 {
            squares.push(
                cube_face_corners(f)
                    .iter()
                    .map(|&c| pt(a, link.corners[c as usize]))
                    .collect(),
            );
        }
        cubes.push(link.corners.iter().map(|&n| pt(a, n)).collect::<Vec<_>>());
    }
    let mut faces2: Vec<Vec<usize>> = p
        .ridges
        .iter()
        .map(|r| {
            let [x, y, z] = r.vertices;
            vec![pt(x, y), pt(y, x), pt(y, z), pt(z, y), pt(x, z), pt(z, x)]
        })
        .collect();
    faces2.extend(squares);
    let mut cells3: Vec<Vec<usize>> = p
        .facets
        .iter()
        .map(|f| {
            let mut v = Vec::new();
            for &x in f {
                for &y in f {
                    if x != y && adjacent(x, y) {
                        v.push(pt(x, y));
                    }
                }
            }
            v
        })
        .collect();
    cells3.extend(cubes);
    let all = vec![(0..origin.len()).collect()];
    let shape = Shape::new(coords, vec![vertices, edges, faces2, cells3, all]).expect("truncated 24-cell");
    TruncatedCell { shape, point, origin }
}

/// The quotient of copies of the truncated 24-cell under a gluing.
pub fn truncated_complex<G: SideGluing + ?Sized>(g: &G) -> Result<GluedComplex<'static>> {
    let t = truncated_cell();
    let p = polytope();
    let sp = g.base();
    let mut gluings = Vec::with_capacity(24 * g.copies());
    for k in 0..g.copies() {
        for side in 0..24 {
            let phi = |x: usize| sp.map_vertex(side, x).expect("vertex on side");
            let mut map = HashMap::new();
            for &x in &p.facets[side] {
                for &y in &p.facets[side] {
                    if let Some(&id) = t.point.get(&(x, y)) {
                        map.insert(id, t.point[&(phi(x), phi(y))]);
                    }
                }
            }
            gluings.push(Gluing {
                piece: k,
                facet: side,
                target: g.neighbour_copy(k, side),
                map,
            });
        }
    }
    GluedComplex::new(&t.shape, g.copies(), &gluings)
}

/// Homology of the compact core and of its boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub counts: Vec<usize>,
    pub euler_characteristic: i64,
    pub groups: Vec<HomologyGroup>,
    pub boundary_counts: Vec<usize>,
    pub boundary_euler_characteristic: i64,
    pub boundary_groups: Vec<HomologyGroup>,
}

/// Whether a cell of the truncated 24-cell lies in a link cube.
fn on_boundary(k: usize, i: usize) -> bool {
    let t = truncated_cell();
    let pts = &t.shape.cell(k, i).points;
    let a = t.origin[pts[0]];
    k < 4 && pts.iter().all(|&x| t.origin[x] == a)
}

pub fn boundary_chain_complex(gc: &GluedComplex<'_>) -> ChainComplex {
    gc.chain_complex_where(|k, _, i| on_boundary(k, i))
}

pub fn truncated_homology<G: SideGluing + ?Sized>(g: &G) -> Result<HomologyReport> {
    let gc = truncated_complex(g)?;
    let full = gc.chain_complex();
    if !full.boundary_squares_to_zero() {
        return Err(crate::Error::Inconsistent("boundary of a boundary is not zero".into()));
    }
    let mut bd = boundary_chain_complex(&gc);
    // the boundary is 3-dimensional
    bd.counts.truncate(4);
    bd.boundaries.truncate(4);
    Ok(HomologyReport {
        euler_characteristic: full.euler_characteristic(),
        groups: full.homology(),
        counts: full.counts,
        boundary_euler_characteristic: bd.euler_characteristic(),
        boundary_groups: bd.homology(),
        boundary_counts: bd.counts,
    })
}

/// Homology of a closed cube complex.
pub fn cusp_section_homology(c: &CuspComplex) -> Result<Vec<HomologyGroup>> {
    static CUBE: OnceLock<Shape> = OnceLock::new();
    let cube = CUBE.get_or_init(unit_cube);
    let gluings: Vec<Gluing> = c
        .faces
        .iter()
        .enumerate()
        .flat_map(|(k, fs)| {
            fs.iter().enumerate().map(move |(f, g)| Gluing {
                piece: k,
                facet: f,
                target: g.target,
                map: cube_face_corners(f)
                    .iter()
                    .map(|&x| (x as usize, g.corners[x as usize] as usize))
                    .collect(),
            })
        })
        .collect();
    let gc = GluedComplex::new(cube, c.len(), &gluings)?;
    Ok(gc.chain_complex().homology())
}
