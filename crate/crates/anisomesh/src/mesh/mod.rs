//! Conforming planar triangulations with tagged boundary segments.

mod locate;
mod medit;
mod transfer;

pub use locate::LocatedPoint;
pub use medit::{
    read_medit, read_sol_scalar, read_sol_tensor, write_medit, write_sol_scalar, write_sol_tensor,
};
pub use transfer::transfer_field;

use crate::geom::{self, Pt};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Relative tolerance under which a triangle counts as degenerate.
pub(crate) const DEGENERATE_REL: f64 = 1e-14;
/// Relative tolerance under which two vertices count as duplicates.
const DUPLICATE_REL: f64 = 1e-12;
/// Relative mismatch allowed between summed element areas and the domain area.
const AREA_REL: f64 = 1e-12;

/// Classification of a vertex by its position on the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Interior,
    /// On the boundary, interior to a single tagged segment.
    Boundary { tag: i32 },
    /// Junction of two boundary segments with distinct tags; never moved.
    Corner,
}

impl VertexKind {
    pub fn is_boundary(&self) -> bool {
        !matches!(self, VertexKind::Interior)
    }
}

/// Signed area and edge vectors of a triangle, with edge k opposite vertex k.
///
/// The edges are l0 = v2 - v1, l1 = v0 - v2, l2 = v1 - v0, so they sum to
/// zero and cross(l1, l2) = 2 area.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub area: f64,
    pub edges: [Pt; 3],
    pub edge_lengths: [f64; 3],
}

impl ElementGeometry {
    pub fn new(a: Pt, b: Pt, c: Pt) -> Self {
        let edges = [geom::sub(c, b), geom::sub(a, c), geom::sub(b, a)];
        Self {
            area: geom::signed_area(a, b, c),
            edges,
            edge_lengths: [
                geom::norm(edges[0]),
                geom::norm(edges[1]),
                geom::norm(edges[2]),
            ],
        }
    }

    pub fn diameter(&self) -> f64 {
        self.edge_lengths.iter().cloned().fold(0.0, f64::max)
    }
}

/// An immutable conforming triangulation.
///
/// All triangles are counterclockwise, every edge is shared by at most two
/// triangles, and the single-triangle edges are exactly the tagged boundary
/// edges, which form closed loops.
#[derive(Clone, Debug)]
pub struct TriMesh {
    vertices: Vec<Pt>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<([usize; 2], i32)>,
    vertex_kinds: Vec<VertexKind>,
    /// Neighbor across the edge opposite local vertex k, if any.
    adjacency: Vec<[Option<usize>; 3]>,
    diameter: f64,
    incidence: OnceLock<Vec<Vec<usize>>>,
}

impl TriMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Pt] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Pt {
        self.vertices[i]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, i: usize) -> [usize; 3] {
        self.triangles[i]
    }

    /// Boundary edges as (sorted vertex pair, tag).
    pub fn boundary_edges(&self) -> &[([usize; 2], i32)] {
        &self.boundary_edges
    }

    pub fn vertex_kinds(&self) -> &[VertexKind] {
        &self.vertex_kinds
    }

    pub fn vertex_kind(&self, i: usize) -> VertexKind {
        self.vertex_kinds[i]
    }

    /// Neighbor triangle across the edge opposite local vertex k.
    pub fn adjacency(&self) -> &[[Option<usize>; 3]] {
        &self.adjacency
    }

    /// Bounding-box diagonal, the length scale for all tolerances.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Triangle corner coordinates.
    pub fn triangle_points(&self, i: usize) -> [Pt; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn element_geometry(&self, i: usize) -> ElementGeometry {
        let [a, b, c] = self.triangle_points(i);
        ElementGeometry::new(a, b, c)
    }

    /// Triangles incident to each vertex, ascending, built once on demand.
    pub fn vertex_incidence(&self) -> &[Vec<usize>] {
        self.incidence.get_or_init(|| {
            let mut inc = vec![Vec::new(); self.vertices.len()];
            for (t, tri) in self.triangles.iter().enumerate() {
                for &v in tri {
                    inc[v].push(t);
                }
            }
            inc
        })
    }

    /// Unique undirected edges as sorted vertex pairs, ascending.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut set = std::collections::BTreeSet::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                set.insert([a.min(b), a.max(b)]);
            }
        }
        set.into_iter().collect()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.element_geometry(t).area)
            .sum()
    }

    /// Re-check every structural invariant; cheap enough to run after each
    /// remeshing pass when requested.
    pub fn validate(&self) -> Result<()> {
        validate_parts(
            &self.vertices,
            &self.triangles,
            &self.boundary_edges,
            false,
        )?;
        Ok(())
    }
}

/// Assemble and fully validate a mesh from raw arrays.
///
/// Triangle orientation is fixed up, the adjacency is derived, and vertex
/// kinds are classified from the tagged boundary edges. Boundary edge pairs
/// may be given in either vertex order.
pub fn build_mesh(
    vertices: Vec<Pt>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<([usize; 2], i32)>,
) -> Result<TriMesh> {
    let (triangles, parts) = validate_parts(&vertices, &triangles, &boundary_edges, true)?;
    let boundary_edges: Vec<([usize; 2], i32)> = boundary_edges
        .into_iter()
        .map(|([a, b], tag)| ([a.min(b), a.max(b)], tag))
        .collect();
    Ok(TriMesh {
        vertices,
        triangles,
        boundary_edges,
        vertex_kinds: parts.vertex_kinds,
        adjacency: parts.adjacency,
        diameter: parts.diameter,
        incidence: OnceLock::new(),
    })
}

struct ValidatedParts {
    vertex_kinds: Vec<VertexKind>,
    adjacency: Vec<[Option<usize>; 3]>,
    diameter: f64,
}

/// Shared checking machinery for `build_mesh` and `TriMesh::validate`.
///
/// With `fix_orientation` set, clockwise triangles are reordered instead of
/// rejected; the possibly reordered triangle list is returned.
fn validate_parts(
    vertices: &[Pt],
    triangles_in: &[[usize; 3]],
    boundary_edges: &[([usize; 2], i32)],
    fix_orientation: bool,
) -> Result<(Vec<[usize; 3]>, ValidatedParts)> {
    if vertices.len() < 3 {
        return Err(Error::InvalidMesh(format!(
            "need at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    if triangles_in.is_empty() {
        return Err(Error::InvalidMesh("mesh has no triangles".into()));
    }
    for p in vertices {
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
    }
    let n = vertices.len();
    for (t, tri) in triangles_in.iter().enumerate() {
        for &v in tri {
            if v >= n {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references vertex {v}, mesh has {n}"
                )));
            }
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(Error::InvalidMesh(format!(
                "triangle {t} repeats a vertex: {tri:?}"
            )));
        }
    }
    for &([a, b], _) in boundary_edges {
        if a >= n || b >= n {
            return Err(Error::InvalidMesh(format!(
                "boundary edge ({a}, {b}) out of range"
            )));
        }
        if a == b {
            return Err(Error::InvalidMesh(format!(
                "boundary edge ({a}, {b}) repeats a vertex"
            )));
        }
    }

    let diameter = bounding_diameter(vertices);
    if !(diameter > 0.0) {
        return Err(Error::InvalidMesh("all vertices coincide".into()));
    }

    // Orientation and degeneracy.
    let area_eps = DEGENERATE_REL * diameter * diameter;
    let mut triangles = triangles_in.to_vec();
    for (t, tri) in triangles.iter_mut().enumerate() {
        let area = geom::signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
        if area.abs() <= area_eps {
            return Err(Error::DegenerateTriangle { index: t, area });
        }
        if area < 0.0 {
            if !fix_orientation {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is clockwise (signed area {area:.3e})"
                )));
            }
            tri.swap(1, 2);
        }
    }

    // Duplicate vertices via a hash grid sized to the tolerance.
    let dup_tol = DUPLICATE_REL * diameter;
    {
        use std::collections::HashMap;
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        let cell = dup_tol.max(f64::MIN_POSITIVE);
        for (i, p) in vertices.iter().enumerate() {
            let key = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(bucket) = grid.get(&(key.0 + dx, key.1 + dy)) {
                        for &j in bucket {
                            if geom::dist(*p, vertices[j]) <= dup_tol {
                                return Err(Error::InvalidMesh(format!(
                                    "vertices {j} and {i} coincide within tolerance"
                                )));
                            }
                        }
                    }
                }
            }
            grid.entry(key).or_default().push(i);
        }
    }

    // Duplicate triangles.
    {
        let mut seen = std::collections::BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            let mut key = *tri;
            key.sort_unstable();
            if let Some(prev) = seen.insert(key, t) {
                return Err(Error::InvalidMesh(format!(
                    "triangles {prev} and {t} share all three vertices"
                )));
            }
        }
    }

    // Edge census: conformity, adjacency, boundary detection.
    let mut edge_map: BTreeMap<[usize; 2], Vec<(usize, usize)>> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            edge_map
                .entry([a.min(b), a.max(b)])
                .or_default()
                .push((t, k));
        }
    }
    let mut adjacency = vec![[None; 3]; triangles.len()];
    let mut topo_boundary: BTreeMap<[usize; 2], (usize, usize)> = BTreeMap::new();
    for (edge, owners) in &edge_map {
        match owners.as_slice() {
            [(t, k)] => {
                topo_boundary.insert(*edge, (*t, *k));
            }
            [(t1, k1), (t2, k2)] => {
                adjacency[*t1][*k1] = Some(*t2);
                adjacency[*t2][*k2] = Some(*t1);
            }
            many => {
                return Err(Error::NonConforming(format!(
                    "edge ({}, {}) is shared by {} triangles",
                    edge[0],
                    edge[1],
                    many.len()
                )));
            }
        }
    }

    // Dangling vertices.
    {
        let mut used = vec![false; n];
        for tri in &triangles {
            for &v in tri {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(Error::DanglingVertex(v));
        }
    }

    // The tagged boundary list must cover the topological boundary exactly.
    let mut tags: BTreeMap<[usize; 2], i32> = BTreeMap::new();
    for &([a, b], tag) in boundary_edges {
        let key = [a.min(b), a.max(b)];
        if tags.insert(key, tag).is_some() {
            return Err(Error::NonConforming(format!(
                "boundary edge ({}, {}) listed twice",
                key[0], key[1]
            )));
        }
    }
    for edge in tags.keys() {
        if !topo_boundary.contains_key(edge) {
            return Err(Error::NonConforming(format!(
                "listed boundary edge ({}, {}) is not on the mesh boundary",
                edge[0], edge[1]
            )));
        }
    }
    for edge in topo_boundary.keys() {
        if !tags.contains_key(edge) {
            return Err(Error::NonConforming(format!(
                "boundary edge ({}, {}) is missing from the boundary list",
                edge[0], edge[1]
            )));
        }
    }

    // Vertex classification; boundary loops are closed exactly when every
    // boundary vertex carries two boundary edges.
    let mut incident_tags: Vec<Vec<i32>> = vec![Vec::new(); n];
    for (&[a, b], &tag) in &tags {
        incident_tags[a].push(tag);
        incident_tags[b].push(tag);
    }
    let mut vertex_kinds = vec![VertexKind::Interior; n];
    for (v, t) in incident_tags.iter_mut().enumerate() {
        match t.len() {
            0 => {}
            2 => {
                t.sort_unstable();
                vertex_kinds[v] = if t[0] == t[1] {
                    VertexKind::Boundary { tag: t[0] }
                } else {
                    VertexKind::Corner
                };
            }
            k => {
                return Err(Error::NonConforming(format!(
                    "boundary vertex {v} has {k} boundary edges, loops must be closed"
                )));
            }
        }
    }

    // Element areas must tile the polygon traced by the oriented boundary.
    let mut boundary_area = 0.0;
    for (_, &(t, k)) in &topo_boundary {
        let tri = triangles[t];
        let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
        boundary_area += 0.5 * geom::cross(vertices[a], vertices[b]);
    }
    let element_area: f64 = triangles
        .iter()
        .map(|t| geom::signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]))
        .sum();
    if (element_area - boundary_area).abs() > AREA_REL * element_area.abs().max(boundary_area.abs())
    {
        return Err(Error::InvalidMesh(format!(
            "element areas sum to {element_area:.17}, boundary encloses {boundary_area:.17}"
        )));
    }

    Ok((
        triangles,
        ValidatedParts {
            vertex_kinds,
            adjacency,
            diameter,
        },
    ))
}

fn bounding_diameter(vertices: &[Pt]) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in vertices {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    geom::dist(lo, hi)
}

/// Regular triangulation of the unit square with n cells per side, each cell
/// split along its up-right diagonal. Boundary tags: 1 bottom, 2 right,
/// 3 top, 4 left.
pub fn structured_unit_square(n: usize) -> TriMesh {
    assert!(n >= 1, "need at least one cell per side");
    let step = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * step, j as f64 * step]);
        }
    }
    let at = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = at(i, j);
            let v10 = at(i + 1, j);
            let v01 = at(i, j + 1);
            let v11 = at(i + 1, j + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let mut boundary = Vec::with_capacity(4 * n);
    for i in 0..n {
        boundary.push(([at(i, 0), at(i + 1, 0)], 1));
        boundary.push(([at(n, i), at(n, i + 1)], 2));
        boundary.push(([at(i, n), at(i + 1, n)], 3));
        boundary.push(([at(0, i), at(0, i + 1)], 4));
    }
    build_mesh(vertices, triangles, boundary).expect("structured mesh is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn structured_square_counts_and_area() {
        for n in [1, 2, 4, 16] {
            let mesh = structured_unit_square(n);
            assert_eq!(mesh.n_vertices(), (n + 1) * (n + 1));
            assert_eq!(mesh.n_triangles(), 2 * n * n);
            assert_eq!(mesh.boundary_edges().len(), 4 * n);
            assert_relative_eq!(mesh.total_area(), 1.0, epsilon = 1e-14);
            mesh.validate().unwrap();
        }
    }

    #[test]
    fn structured_square_vertex_kinds() {
        let mesh = structured_unit_square(4);
        let corners = mesh
            .vertex_kinds()
            .iter()
            .filter(|k| matches!(k, VertexKind::Corner))
            .count();
        assert_eq!(corners, 4);
        let boundary = mesh
            .vertex_kinds()
            .iter()
            .filter(|k| matches!(k, VertexKind::Boundary { .. }))
            .count();
        assert_eq!(boundary, 4 * 3);
        assert_eq!(mesh.vertex_kind(0), VertexKind::Corner);
        assert_eq!(mesh.vertex_kind(2), VertexKind::Boundary { tag: 1 });
        let mid = 2 * 5 + 2;
        assert_eq!(mesh.vertex_kind(mid), VertexKind::Interior);
    }

    #[test]
    fn orientation_is_repaired() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let triangles = vec![[0, 2, 1]];
        let boundary = vec![([0, 1], 1), ([1, 2], 2), ([2, 0], 3)];
        let mesh = build_mesh(vertices, triangles, boundary).unwrap();
        assert!(mesh.element_geometry(0).area > 0.0);
    }

    #[test]
    fn rejects_degenerate_triangle() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.5, 1.0]];
        let triangles = vec![[0, 1, 2], [0, 2, 3]];
        let boundary = vec![([0, 1], 1), ([1, 2], 1), ([2, 3], 2), ([3, 0], 3)];
        match build_mesh(vertices, triangles, boundary) {
            Err(Error::DegenerateTriangle { index: 0, .. }) => {}
            other => panic!("expected degenerate triangle, got {other:?}"),
        }
    }

    #[test]
    fn rejects_nonconforming_edge() {
        // Three triangles stacked on the same edge (0, 1).
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0], [1.5, 1.0]];
        let triangles = vec![[0, 1, 2], [0, 3, 1], [0, 1, 4]];
        match build_mesh(vertices, triangles, vec![]) {
            Err(Error::NonConforming(msg)) => assert!(msg.contains("3 triangles")),
            other => panic!("expected nonconforming, got {other:?}"),
        }
    }

    #[test]
    fn rejects_dangling_vertex() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]];
        let triangles = vec![[0, 1, 2]];
        let boundary = vec![([0, 1], 1), ([1, 2], 1), ([2, 0], 1)];
        match build_mesh(vertices, triangles, boundary) {
            Err(Error::DanglingVertex(3)) => {}
            other => panic!("expected dangling vertex, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_vertices() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1e-15, 0.0]];
        let triangles = vec![[0, 1, 2], [3, 2, 1]];
        assert!(matches!(
            build_mesh(vertices, triangles, vec![]),
            Err(Error::InvalidMesh(_))
        ));
    }

    #[test]
    fn rejects_mismatched_boundary_list() {
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let triangles = vec![[0, 1, 2]];
        // Missing one boundary edge.
        let boundary = vec![([0, 1], 1), ([1, 2], 2)];
        assert!(matches!(
            build_mesh(vertices, triangles, boundary),
            Err(Error::NonConforming(_))
        ));
    }

    #[test]
    fn element_geometry_edge_convention() {
        let mesh = structured_unit_square(1);
        let geo = mesh.element_geometry(0);
        // Edges sum to zero and the area matches the closed form.
        for k in 0..2 {
            assert_relative_eq!(
                geo.edges[0][k] + geo.edges[1][k] + geo.edges[2][k],
                0.0,
                epsilon = 1e-15
            );
        }
        assert_relative_eq!(geo.area, 0.5);
        assert_relative_eq!(
            0.5 * crate::geom::cross(geo.edges[1], geo.edges[2]).abs(),
            geo.area
        );
    }

    #[test]
    fn adjacency_is_mutual() {
        let mesh = structured_unit_square(3);
        for (t, adj) in mesh.adjacency().iter().enumerate() {
            for n in adj.iter().flatten() {
                assert!(mesh.adjacency()[*n].iter().flatten().any(|&b| b == t));
            }
        }
    }

    #[test]
    fn incidence_covers_all_triangles() {
        let mesh = structured_unit_square(3);
        let inc = mesh.vertex_incidence();
        let total: usize = inc.iter().map(|v| v.len()).sum();
        assert_eq!(total, 3 * mesh.n_triangles());
        for (v, tris) in inc.iter().enumerate() {
            for &t in tris {
                assert!(mesh.triangle(t).contains(&v));
            }
        }
    }
}
