//! Local remeshing toward a unit mesh in a Riemannian metric.
//!
//! Four local operations drive the mesh: long edges split at their midpoint,
//! short edges collapse onto a kept endpoint, interior edges flip when the
//! metric Delaunay test prefers the other diagonal, and vertices relax toward
//! the metric-weighted average of their neighbors. Lengths use the endpoint
//! average of the nodal metrics, so every operation reads the same field the
//! normalization produced. Vertices created by splits inherit the averaged
//! metric of their parents, which keeps the field usable across sweeps
//! without re-interpolation.

use crate::fields::{TensorField, TensorRole};
use crate::geom::{self, Pt};
use crate::mesh::{build_mesh, TriMesh, VertexKind};
use crate::metric::edge_length_between;
use crate::tensor::SymTensor2;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

const SMOOTH_OMEGA: f64 = 0.5;
const FLIP_SWEEP_CAP: usize = 20;

/// Summary of metric edge lengths after a remeshing run.
#[derive(Debug, Clone, Copy)]
pub struct EdgeStats {
    pub count: usize,
    /// Fraction of edges with metric length inside the hysteresis band.
    pub unit_fraction: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Mutable mesh state shared by the remeshing passes. Vertices and triangles
/// are tombstoned rather than removed so indices stay stable within a run;
/// `into_mesh` compacts and revalidates.
pub(crate) struct RemeshMesh {
    points: Vec<Pt>,
    kinds: Vec<VertexKind>,
    metrics: Vec<SymTensor2>,
    vertex_alive: Vec<bool>,
    tris: Vec<[usize; 3]>,
    tri_alive: Vec<bool>,
    n_alive_tris: usize,
    /// Alive triangles incident to each vertex.
    stars: Vec<BTreeSet<usize>>,
    boundary_tags: BTreeMap<[usize; 2], i32>,
    scale: f64,
}

impl RemeshMesh {
    pub(crate) fn from_mesh(mesh: &TriMesh, metric: &TensorField) -> Result<Self> {
        metric.check_bound(mesh)?;
        for t in &metric.values {
            if !t.is_spd() {
                let (l1, l2, _) = t.eig();
                return Err(Error::NotSpd(l1, l2));
            }
        }
        let n = mesh.n_vertices();
        let mut stars = vec![BTreeSet::new(); n];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            for &v in tri {
                stars[v].insert(t);
            }
        }
        let boundary_tags = mesh
            .boundary_edges()
            .iter()
            .map(|&([a, b], tag)| (edge_key(a, b), tag))
            .collect();
        Ok(Self {
            points: mesh.vertices().to_vec(),
            kinds: mesh.vertex_kinds().to_vec(),
            metrics: metric.values.clone(),
            vertex_alive: vec![true; n],
            tris: mesh.triangles().to_vec(),
            tri_alive: vec![true; mesh.n_triangles()],
            n_alive_tris: mesh.n_triangles(),
            stars,
            boundary_tags,
            scale: mesh.diameter(),
        })
    }

    fn min_area(&self) -> f64 {
        1e-12 * self.scale * self.scale
    }

    fn area(&self, tri: [usize; 3]) -> f64 {
        geom::signed_area(self.points[tri[0]], self.points[tri[1]], self.points[tri[2]])
    }

    fn edge_length(&self, a: usize, b: usize) -> f64 {
        edge_length_between(&self.metrics[a], &self.metrics[b], self.points[a], self.points[b])
    }

    fn add_vertex(&mut self, p: Pt, kind: VertexKind, metric: SymTensor2) -> usize {
        self.points.push(p);
        self.kinds.push(kind);
        self.metrics.push(metric);
        self.vertex_alive.push(true);
        self.stars.push(BTreeSet::new());
        self.points.len() - 1
    }

    fn add_tri(&mut self, tri: [usize; 3]) -> usize {
        self.tris.push(tri);
        self.tri_alive.push(true);
        self.n_alive_tris += 1;
        let t = self.tris.len() - 1;
        for &v in &tri {
            self.stars[v].insert(t);
        }
        t
    }

    fn remove_tri(&mut self, t: usize) {
        self.tri_alive[t] = false;
        self.n_alive_tris -= 1;
        let tri = self.tris[t];
        for &v in &tri {
            self.stars[v].remove(&t);
        }
    }

    /// Alive triangles containing both endpoints: two for interior edges, one
    /// on the boundary.
    fn tris_of_edge(&self, a: usize, b: usize) -> Vec<usize> {
        let (small, other) = if self.stars[a].len() <= self.stars[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.stars[small]
            .iter()
            .copied()
            .filter(|t| self.stars[other].contains(t))
            .collect()
    }

    fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &t in &self.stars[v] {
            for &w in &self.tris[t] {
                if w != v {
                    out.insert(w);
                }
            }
        }
        out
    }

    pub(crate) fn edge_set(&self) -> BTreeSet<[usize; 2]> {
        let mut edges = BTreeSet::new();
        for (t, tri) in self.tris.iter().enumerate() {
            if !self.tri_alive[t] {
                continue;
            }
            for i in 0..3 {
                edges.insert(edge_key(tri[i], tri[(i + 1) % 3]));
            }
        }
        edges
    }

    /// Shape quality of a triangle under the element-average metric: 1 for a
    /// metric-equilateral element, approaching 0 with degeneracy.
    fn quality(&self, tri: [usize; 3]) -> f64 {
        let m = self.metrics[tri[0]]
            .add(&self.metrics[tri[1]])
            .add(&self.metrics[tri[2]])
            .scale(1.0 / 3.0);
        let area = self.area(tri);
        let det = m.det();
        if area <= 0.0 || det <= 0.0 {
            return 0.0;
        }
        let mut denom = 0.0;
        for i in 0..3 {
            let e = geom::sub(self.points[tri[(i + 1) % 3]], self.points[tri[i]]);
            denom += m.quad_form(e);
        }
        if denom <= 0.0 {
            return 0.0;
        }
        4.0 * 3.0_f64.sqrt() * area * det.sqrt() / denom
    }

    /// Split every edge whose metric length exceeds `threshold` at its
    /// Euclidean midpoint, using the standard 1/2/3-edge triangle templates.
    /// Returns the number of edges split.
    pub(crate) fn split_pass(&mut self, threshold: f64) -> usize {
        let mut midpoints: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        for [a, b] in self.edge_set() {
            if self.edge_length(a, b) > threshold {
                let p = geom::lerp(self.points[a], self.points[b], 0.5);
                let metric = self.metrics[a].add(&self.metrics[b]).scale(0.5);
                let kind = match self.boundary_tags.get(&[a, b]) {
                    Some(&tag) => VertexKind::Boundary { tag },
                    None => VertexKind::Interior,
                };
                let m = self.add_vertex(p, kind, metric);
                midpoints.insert([a, b], m);
            }
        }
        if midpoints.is_empty() {
            return 0;
        }
        for (&[a, b], &m) in &midpoints {
            if let Some(tag) = self.boundary_tags.remove(&[a, b]) {
                self.boundary_tags.insert(edge_key(a, m), tag);
                self.boundary_tags.insert(edge_key(m, b), tag);
            }
        }

        let snapshot: Vec<usize> = (0..self.tris.len()).filter(|&t| self.tri_alive[t]).collect();
        for t in snapshot {
            let [a, b, c] = self.tris[t];
            let mab = midpoints.get(&edge_key(a, b)).copied();
            let mbc = midpoints.get(&edge_key(b, c)).copied();
            let mca = midpoints.get(&edge_key(c, a)).copied();
            if mab.is_none() && mbc.is_none() && mca.is_none() {
                continue;
            }
            self.remove_tri(t);
            match (mab, mbc, mca) {
                (None, None, None) => unreachable!(),
                (Some(mab), None, None) => {
                    self.add_tri([a, mab, c]);
                    self.add_tri([mab, b, c]);
                }
                (None, Some(mbc), None) => {
                    self.add_tri([b, mbc, a]);
                    self.add_tri([mbc, c, a]);
                }
                (None, None, Some(mca)) => {
                    self.add_tri([c, mca, b]);
                    self.add_tri([mca, a, b]);
                }
                (Some(mab), Some(mbc), None) => self.split_two(b, mbc, mab, a, c),
                (None, Some(mbc), Some(mca)) => self.split_two(c, mca, mbc, b, a),
                (Some(mab), None, Some(mca)) => self.split_two(a, mab, mca, c, b),
                (Some(mab), Some(mbc), Some(mca)) => {
                    self.add_tri([a, mab, mca]);
                    self.add_tri([mab, b, mbc]);
                    self.add_tri([mca, mbc, c]);
                    self.add_tri([mab, mbc, mca]);
                }
            }
        }
        midpoints.len()
    }

    /// Two-edge template: corner `v` is cut off by midpoints `m_prev` (on the
    /// edge into v) and `m_next` (on the edge out of v); `q_far` and `q_near`
    /// are the remaining corners of the quad, in orientation order. The quad
    /// diagonal with the shorter metric length wins.
    fn split_two(&mut self, v: usize, m_next: usize, m_prev: usize, q_far: usize, q_near: usize) {
        self.add_tri([v, m_next, m_prev]);
        if self.edge_length(m_prev, q_near) <= self.edge_length(m_next, q_far) {
            self.add_tri([q_far, m_prev, q_near]);
            self.add_tri([m_prev, m_next, q_near]);
        } else {
            self.add_tri([q_far, m_prev, m_next]);
            self.add_tri([q_far, m_next, q_near]);
        }
    }

    /// Collapse edges shorter than `threshold`, shortest first. The kept
    /// endpoint never moves: corners outrank boundary vertices, which outrank
    /// interior ones; ties keep the lower index. A collapse is rejected when
    /// it would pinch the boundary, break the link condition, strand a
    /// vertex, or produce a degenerate or inverted triangle. Returns the
    /// number of collapses performed.
    pub(crate) fn collapse_pass(&mut self, threshold: f64) -> usize {
        let mut candidates: Vec<(f64, [usize; 2])> = self
            .edge_set()
            .into_iter()
            .map(|[a, b]| (self.edge_length(a, b), [a, b]))
            .filter(|&(len, _)| len < threshold)
            .collect();
        candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());

        let mut done = 0;
        for (_, [a, b]) in candidates {
            if !self.vertex_alive[a] || !self.vertex_alive[b] {
                continue;
            }
            let shared = self.tris_of_edge(a, b);
            if shared.is_empty() {
                continue;
            }
            if self.try_collapse(a, b, &shared) {
                done += 1;
            }
        }
        done
    }

    fn collapse_keep(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        let rank = |v: usize| match self.kinds[v] {
            VertexKind::Corner => 2,
            VertexKind::Boundary { .. } => 1,
            VertexKind::Interior => 0,
        };
        let (ra, rb) = (rank(a), rank(b));
        if ra == 2 && rb == 2 {
            return None;
        }
        // An interior chord between boundary vertices would pinch the domain
        // into two touching pieces.
        if ra > 0 && rb > 0 && !self.boundary_tags.contains_key(&edge_key(a, b)) {
            return None;
        }
        match ra.cmp(&rb) {
            std::cmp::Ordering::Greater => Some((a, b)),
            std::cmp::Ordering::Less => Some((b, a)),
            std::cmp::Ordering::Equal => {
                let [keep, gone] = edge_key(a, b);
                Some((keep, gone))
            }
        }
    }

    fn try_collapse(&mut self, a: usize, b: usize, shared: &[usize]) -> bool {
        let Some((keep, gone)) = self.collapse_keep(a, b) else {
            return false;
        };
        if self.n_alive_tris <= shared.len() {
            return false;
        }

        // Link condition: the only vertices adjacent to both endpoints are
        // the ones opposite the shared triangles.
        let common: Vec<usize> = self
            .neighbors(a)
            .intersection(&self.neighbors(b))
            .copied()
            .collect();
        if common.len() != shared.len() {
            return false;
        }
        // Every opposite vertex loses one triangle and must keep at least one.
        for &c in &common {
            if self.stars[c].len() <= 1 {
                return false;
            }
        }

        let min_area = self.min_area();
        for &t in &self.stars[gone] {
            if shared.contains(&t) {
                continue;
            }
            let mut tri = self.tris[t];
            for v in tri.iter_mut() {
                if *v == gone {
                    *v = keep;
                }
            }
            if self.area(tri) <= min_area {
                return false;
            }
        }

        for &t in shared {
            self.remove_tri(t);
        }
        let survivors: Vec<usize> = self.stars[gone].iter().copied().collect();
        for t in survivors {
            let mut tri = self.tris[t];
            for v in tri.iter_mut() {
                if *v == gone {
                    *v = keep;
                }
            }
            self.remove_tri(t);
            self.add_tri(tri);
        }
        self.vertex_alive[gone] = false;

        if self.kinds[gone].is_boundary() {
            self.boundary_tags.remove(&edge_key(gone, keep));
            let gone_edges: Vec<([usize; 2], i32)> = self
                .boundary_tags
                .iter()
                .filter(|(k, _)| k.contains(&gone))
                .map(|(&k, &t)| (k, t))
                .collect();
            for (k, tag) in gone_edges {
                self.boundary_tags.remove(&k);
                let other = if k[0] == gone { k[1] } else { k[0] };
                self.boundary_tags.insert(edge_key(keep, other), tag);
            }
        }
        true
    }

    /// One flip sweep over the interior edges: each is flipped when the
    /// opposite vertex of one side falls inside the circumcircle of the other
    /// side, measured after mapping the four vertices by the Cholesky factor
    /// of their average metric. Returns the number of flips.
    pub(crate) fn flip_pass(&mut self) -> usize {
        let mut flips = 0;
        for [a, b] in self.edge_set() {
            if self.boundary_tags.contains_key(&[a, b]) {
                continue;
            }
            let shared = self.tris_of_edge(a, b);
            if shared.len() != 2 {
                continue;
            }
            if self.try_flip(a, b, shared[0], shared[1]) {
                flips += 1;
            }
        }
        flips
    }

    fn try_flip(&mut self, a: usize, b: usize, t1: usize, t2: usize) -> bool {
        // Orient the shared edge the way t1 traverses it, so that the
        // opposite vertex c of t1 sits left of u→v and d of t2 sits right.
        let tri1 = self.tris[t1];
        let i = tri1.iter().position(|&v| v == a).unwrap();
        let (u, v) = if tri1[(i + 1) % 3] == b { (a, b) } else { (b, a) };
        let c = self.opposite(t1, u, v);
        let d = self.opposite(t2, u, v);
        if !self.tris_of_edge(c, d).is_empty() {
            return false;
        }

        let m = self.metrics[u]
            .add(&self.metrics[v])
            .add(&self.metrics[c])
            .add(&self.metrics[d])
            .scale(0.25);
        let Ok(l) = m.cholesky() else {
            return false;
        };
        let map = |p: Pt| -> Pt { [l[0][0] * p[0] + l[1][0] * p[1], l[1][1] * p[1]] };
        let (pu, pv, pc, pd) = (
            map(self.points[u]),
            map(self.points[v]),
            map(self.points[c]),
            map(self.points[d]),
        );
        let s = geom::dist(pu, pv)
            .max(geom::dist(pu, pc))
            .max(geom::dist(pu, pd))
            .powi(2);
        if incircle(pu, pv, pc, pd) <= 1e-10 * s * s {
            return false;
        }

        let min_area = self.min_area();
        let new1 = [u, d, c];
        let new2 = [v, c, d];
        if self.area(new1) <= min_area || self.area(new2) <= min_area {
            return false;
        }
        self.remove_tri(t1);
        self.remove_tri(t2);
        self.add_tri(new1);
        self.add_tri(new2);
        true
    }

    fn opposite(&self, t: usize, a: usize, b: usize) -> usize {
        *self.tris[t].iter().find(|&&v| v != a && v != b).unwrap()
    }

    /// One relaxation sweep: each non-corner vertex moves partway toward the
    /// metric-length weighted average of its neighbors (boundary vertices
    /// only along their boundary edges). Moves that shrink any incident
    /// triangle below 10% of its area, or lower the local quality sum, are
    /// rejected. Returns the number of vertices moved.
    pub(crate) fn smooth_pass(&mut self) -> usize {
        let min_area = self.min_area();
        let mut moved = 0;
        for v in 0..self.points.len() {
            if !self.vertex_alive[v] || self.stars[v].is_empty() {
                continue;
            }
            let partners: Vec<usize> = match self.kinds[v] {
                VertexKind::Corner => continue,
                VertexKind::Interior => self.neighbors(v).into_iter().collect(),
                VertexKind::Boundary { .. } => self
                    .boundary_tags
                    .keys()
                    .filter(|k| k.contains(&v))
                    .map(|k| if k[0] == v { k[1] } else { k[0] })
                    .collect(),
            };
            if partners.is_empty() || (self.kinds[v].is_boundary() && partners.len() != 2) {
                continue;
            }
            let mut target = [0.0, 0.0];
            let mut total = 0.0;
            for &w in &partners {
                let weight = self.edge_length(v, w);
                target = geom::add(target, geom::scale(self.points[w], weight));
                total += weight;
            }
            if total <= 0.0 {
                continue;
            }
            target = geom::scale(target, 1.0 / total);
            let mut candidate = geom::lerp(self.points[v], target, SMOOTH_OMEGA);
            if self.kinds[v].is_boundary() {
                // Keep the vertex on the boundary polyline through its two
                // boundary edges.
                let p1 = geom::project_to_segment(candidate, self.points[v], self.points[partners[0]]);
                let p2 = geom::project_to_segment(candidate, self.points[v], self.points[partners[1]]);
                candidate = if geom::dist(candidate, p1) <= geom::dist(candidate, p2) {
                    p1
                } else {
                    p2
                };
            }

            let mut ok = true;
            let mut quality_before = 0.0;
            let mut quality_after = 0.0;
            let old = self.points[v];
            for &t in &self.stars[v] {
                let tri = self.tris[t];
                let area_before = self.area(tri);
                quality_before += self.quality(tri);
                self.points[v] = candidate;
                let area_after = self.area(tri);
                quality_after += self.quality(tri);
                self.points[v] = old;
                if area_after <= min_area || area_after < 0.1 * area_before {
                    ok = false;
                    break;
                }
            }
            if ok && quality_after >= quality_before && candidate != old {
                self.points[v] = candidate;
                moved += 1;
            }
        }
        moved
    }

    /// Structural soundness of the tombstoned state: alive triangles
    /// reference alive vertices with positive area, every edge belongs to at
    /// most two triangles, and the tagged boundary equals the set of
    /// single-triangle edges.
    pub(crate) fn check_consistency(&self) -> Result<()> {
        let mut census: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        let degenerate = 1e-14 * self.scale * self.scale;
        for (t, tri) in self.tris.iter().enumerate() {
            if !self.tri_alive[t] {
                continue;
            }
            for &v in tri {
                if !self.vertex_alive[v] {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {t} references dead vertex {v}"
                    )));
                }
                if !self.stars[v].contains(&t) {
                    return Err(Error::InvalidMesh(format!(
                        "star of vertex {v} is missing triangle {t}"
                    )));
                }
            }
            if self.area(*tri) <= degenerate {
                return Err(Error::DegenerateTriangle {
                    index: t,
                    area: self.area(*tri),
                });
            }
            for i in 0..3 {
                *census.entry(edge_key(tri[i], tri[(i + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&edge, &count) in &census {
            if count > 2 {
                return Err(Error::NonConforming(format!(
                    "edge {edge:?} is shared by {count} triangles"
                )));
            }
            let tagged = self.boundary_tags.contains_key(&edge);
            if (count == 1) != tagged {
                return Err(Error::InvalidMesh(format!(
                    "edge {edge:?} has {count} owners but boundary tag presence {tagged}"
                )));
            }
        }
        Ok(())
    }

    /// Metric edge length summary; the unit band is `[lo, hi]`.
    pub(crate) fn edge_stats(&self, lo: f64, hi: f64) -> EdgeStats {
        let edges = self.edge_set();
        let mut stats = EdgeStats {
            count: edges.len(),
            unit_fraction: 0.0,
            min: f64::INFINITY,
            max: 0.0,
            mean: 0.0,
        };
        if edges.is_empty() {
            stats.min = 0.0;
            return stats;
        }
        let mut inside = 0usize;
        for [a, b] in &edges {
            let len = self.edge_length(*a, *b);
            if (lo..=hi).contains(&len) {
                inside += 1;
            }
            stats.min = stats.min.min(len);
            stats.max = stats.max.max(len);
            stats.mean += len;
        }
        stats.unit_fraction = inside as f64 / stats.count as f64;
        stats.mean /= stats.count as f64;
        stats
    }

    /// Compact the tombstoned state into a validated mesh plus the nodal
    /// metric carried along by the run.
    pub(crate) fn into_mesh(self) -> Result<(TriMesh, TensorField)> {
        let mut index = vec![usize::MAX; self.points.len()];
        let mut points = Vec::new();
        let mut metrics = Vec::new();
        for v in 0..self.points.len() {
            if self.vertex_alive[v] && !self.stars[v].is_empty() {
                index[v] = points.len();
                points.push(self.points[v]);
                metrics.push(self.metrics[v]);
            }
        }
        let triangles: Vec<[usize; 3]> = self
            .tris
            .iter()
            .zip(&self.tri_alive)
            .filter(|(_, &alive)| alive)
            .map(|(tri, _)| [index[tri[0]], index[tri[1]], index[tri[2]]])
            .collect();
        let boundary: Vec<([usize; 2], i32)> = self
            .boundary_tags
            .iter()
            .map(|(&[a, b], &tag)| ([index[a], index[b]], tag))
            .collect();
        let mesh = build_mesh(points, triangles, boundary)?;
        let field = TensorField {
            values: metrics,
            role: TensorRole::Metric,
        };
        Ok((mesh, field))
    }
}

/// Signed in-circle test: positive when `p` lies strictly inside the
/// circumcircle of the counterclockwise triangle (a, b, c).
fn incircle(a: Pt, b: Pt, c: Pt, p: Pt) -> f64 {
    let col = |q: Pt| {
        let dx = q[0] - p[0];
        let dy = q[1] - p[1];
        [dx, dy, dx * dx + dy * dy]
    };
    let (ra, rb, rc) = (col(a), col(b), col(c));
    ra[0] * (rb[1] * rc[2] - rb[2] * rc[1]) - ra[1] * (rb[0] * rc[2] - rb[2] * rc[0])
        + ra[2] * (rb[0] * rc[1] - rb[1] * rc[0])
}

#[cfg(debug_assertions)]
fn debug_check(rm: &RemeshMesh) {
    if let Err(e) = rm.check_consistency() {
        panic!("remesh pass left an inconsistent mesh: {e}");
    }
}

#[cfg(not(debug_assertions))]
fn debug_check(_rm: &RemeshMesh) {}

/// Split every edge with metric length above `threshold`; one pass.
pub fn split_long_edges(mesh: &TriMesh, metric: &TensorField, threshold: f64) -> Result<TriMesh> {
    let mut rm = RemeshMesh::from_mesh(mesh, metric)?;
    rm.split_pass(threshold);
    debug_check(&rm);
    Ok(rm.into_mesh()?.0)
}

/// Collapse every collapsible edge with metric length below `threshold`; one
/// pass, shortest edges first.
pub fn collapse_short_edges(mesh: &TriMesh, metric: &TensorField, threshold: f64) -> Result<TriMesh> {
    let mut rm = RemeshMesh::from_mesh(mesh, metric)?;
    rm.collapse_pass(threshold);
    debug_check(&rm);
    Ok(rm.into_mesh()?.0)
}

/// Flip interior edges to metric Delaunay; sweeps until no edge changes.
pub fn flip_edges(mesh: &TriMesh, metric: &TensorField) -> Result<TriMesh> {
    let mut rm = RemeshMesh::from_mesh(mesh, metric)?;
    for _ in 0..FLIP_SWEEP_CAP {
        let flips = rm.flip_pass();
        debug_check(&rm);
        if flips == 0 {
            break;
        }
    }
    Ok(rm.into_mesh()?.0)
}

/// Relax vertex positions for `passes` sweeps.
pub fn smooth_vertices(mesh: &TriMesh, metric: &TensorField, passes: usize) -> Result<TriMesh> {
    let mut rm = RemeshMesh::from_mesh(mesh, metric)?;
    for _ in 0..passes {
        rm.smooth_pass();
        debug_check(&rm);
    }
    Ok(rm.into_mesh()?.0)
}

pub(crate) struct RemeshOutcome {
    pub mesh: TriMesh,
    pub metric: TensorField,
    pub stats: EdgeStats,
}

/// Full remeshing driver: sweeps of split, collapse, flip, smooth until the
/// edge set settles (less than 1% of edges change) or the sweep cap is hit.
pub(crate) fn remesh(
    mesh: &TriMesh,
    metric: &TensorField,
    split_threshold: f64,
    collapse_threshold: f64,
    max_passes: usize,
    smoothing_passes: usize,
) -> Result<RemeshOutcome> {
    let mut rm = RemeshMesh::from_mesh(mesh, metric)?;
    for _ in 0..max_passes {
        let before = rm.edge_set();
        rm.split_pass(split_threshold);
        debug_check(&rm);
        rm.collapse_pass(collapse_threshold);
        debug_check(&rm);
        for _ in 0..3 {
            let flips = rm.flip_pass();
            debug_check(&rm);
            if flips == 0 {
                break;
            }
        }
        for _ in 0..smoothing_passes {
            rm.smooth_pass();
            debug_check(&rm);
        }
        let after = rm.edge_set();
        let changed = before.symmetric_difference(&after).count();
        if (changed as f64) < 0.01 * before.len().max(1) as f64 {
            break;
        }
    }
    let stats = rm.edge_stats(collapse_threshold, split_threshold);
    let (mesh, metric) = rm.into_mesh()?;
    Ok(RemeshOutcome { mesh, metric, stats })
}
