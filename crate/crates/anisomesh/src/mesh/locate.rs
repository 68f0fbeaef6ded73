//! Point location by barycentric walk with an exhaustive fallback.

use super::TriMesh;
use crate::geom::{self, Pt};
use crate::{Error, Result};

/// Barycentric slack accepted when testing containment.
pub(crate) const LOCATE_TOL: f64 = 1e-10;

/// A located point: the containing triangle and its barycentric coordinates.
#[derive(Clone, Copy, Debug)]
pub struct LocatedPoint {
    pub triangle: usize,
    pub barycentric: [f64; 3],
}

impl TriMesh {
    /// Find the triangle containing `p`, within a barycentric tolerance of
    /// 1e-10. Points on shared edges or vertices resolve to the lowest
    /// incident triangle index. The walk starts from `hint` when given and
    /// falls back to a full scan if it leaves the mesh.
    pub fn locate(&self, p: Pt, hint: Option<usize>) -> Result<LocatedPoint> {
        let start = hint.filter(|&t| t < self.n_triangles()).unwrap_or(0);
        let mut current = start;
        for _ in 0..=self.n_triangles() {
            let bary = self.barycentric_in(current, p);
            let (worst, &lowest) = bary
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("three coordinates");
            if lowest >= -LOCATE_TOL {
                return Ok(self.tie_break(current, bary, p));
            }
            match self.adjacency[current][worst] {
                Some(next) => current = next,
                None => break,
            }
        }
        self.locate_exhaustive(p)
    }

    fn barycentric_in(&self, t: usize, p: Pt) -> [f64; 3] {
        let [a, b, c] = self.triangle_points(t);
        geom::barycentric(p, a, b, c)
    }

    /// Scan every triangle in index order; the first hit is the lowest index.
    fn locate_exhaustive(&self, p: Pt) -> Result<LocatedPoint> {
        for t in 0..self.n_triangles() {
            let bary = self.barycentric_in(t, p);
            if bary.iter().all(|&l| l >= -LOCATE_TOL) {
                return Ok(LocatedPoint {
                    triangle: t,
                    barycentric: bary,
                });
            }
        }
        Err(Error::PointOutsideDomain(p[0], p[1]))
    }

    /// Resolve shared-edge and shared-vertex hits to the lowest triangle
    /// index among the containing triangles.
    fn tie_break(&self, t: usize, bary: [f64; 3], p: Pt) -> LocatedPoint {
        let near_zero: Vec<usize> = (0..3).filter(|&k| bary[k] <= LOCATE_TOL).collect();
        let mut best = LocatedPoint {
            triangle: t,
            barycentric: bary,
        };
        match near_zero.len() {
            // Interior hit.
            0 => {}
            // On the edge opposite local vertex k: at most one other owner.
            1 => {
                if let Some(other) = self.adjacency[t][near_zero[0]] {
                    if other < best.triangle {
                        let ob = self.barycentric_in(other, p);
                        if ob.iter().all(|&l| l >= -LOCATE_TOL) {
                            best = LocatedPoint {
                                triangle: other,
                                barycentric: ob,
                            };
                        }
                    }
                }
            }
            // At a vertex: scan its full star.
            _ => {
                let v = self.triangle(t)[(0..3)
                    .find(|k| !near_zero.contains(k))
                    .expect("one large coordinate")];
                for &other in &self.vertex_incidence()[v] {
                    if other < best.triangle {
                        let ob = self.barycentric_in(other, p);
                        if ob.iter().all(|&l| l >= -LOCATE_TOL) {
                            best = LocatedPoint {
                                triangle: other,
                                barycentric: ob,
                            };
                        }
                    }
                }
            }
        }
        best
    }
}
