use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

type V3 = [f64; 3];

#[inline]
fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn axpy(a: V3, s: f64, d: V3) -> V3 {
    [a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]]
}

/// Validated triangle mesh: indices in range, no zero-area faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    vertices: Vec<V3>,
    triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<V3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::invalid("mesh has non-finite vertex coordinates"));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::invalid(format!(
                    "triangle {t} references vertex {bad}, mesh has {}",
                    vertices.len()
                )));
            }
            let [a, b, c] = tri.map(|i| vertices[i]);
            let n = cross(sub(b, a), sub(c, a));
            if dot(n, n) == 0.0 {
                return Err(Error::invalid(format!("triangle {t} is degenerate")));
            }
        }
        Ok(Self { vertices, triangles })
    }

    pub fn vertices(&self) -> &[V3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, t: usize) -> [V3; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    /// Distance from `p` to the closest point on any triangle.
    pub fn distance(&self, p: V3) -> Result<f64> {
        if self.triangles.is_empty() {
            return Err(Error::invalid("mesh has no triangles"));
        }
        Ok(self
            .triangles
            .iter()
            .map(|tri| {
                let [a, b, c] = tri.map(|i| self.vertices[i]);
                point_triangle_distance(p, a, b, c)
            })
            .fold(f64::INFINITY, f64::min))
    }
}

/// Closest point to `p` on triangle `abc` (Voronoi-region walk over vertices,
/// edges and the face).
pub fn closest_point_on_triangle(p: V3, a: V3, b: V3, c: V3) -> V3 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return axpy(a, d1 / (d1 - d3), ab);
    }
    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return axpy(a, d2 / (d2 - d6), ac);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return axpy(b, (d4 - d3) / ((d4 - d3) + (d5 - d6)), sub(c, b));
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    axpy(axpy(a, v, ab), w, ac)
}

pub fn point_triangle_distance(p: V3, a: V3, b: V3, c: V3) -> f64 {
    let q = closest_point_on_triangle(p, a, b, c);
    let d = sub(p, q);
    dot(d, d).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: V3 = [0.0, 0.0, 0.0];
    const B: V3 = [1.0, 0.0, 0.0];
    const C: V3 = [0.0, 1.0, 0.0];

    /// Dense barycentric sampling of the triangle surface (about 10^4 samples).
    fn sampled_distance(p: V3, a: V3, b: V3, c: V3) -> f64 {
        let n = 140;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let u = i as f64 / n as f64;
                let v = j as f64 / n as f64;
                let q = axpy(axpy(a, u, sub(b, a)), v, sub(c, a));
                let d = sub(p, q);
                best = best.min(dot(d, d).sqrt());
            }
        }
        best
    }

    #[test]
    fn vertex_and_interior() {
        assert_eq!(point_triangle_distance(B, A, B, C), 0.0);
        let h = 0.37;
        let d = point_triangle_distance([0.2, 0.2, h], A, B, C);
        assert!((d - h).abs() < 1e-15);
    }

    #[test]
    fn beyond_edges_and_vertices_match_sampling() {
        let probes: [V3; 6] = [
            [0.5, -0.3, 0.2],
            [0.8, 0.8, -0.1],
            [-0.4, 0.5, 0.0],
            [1.5, -0.5, 0.3],
            [-0.2, -0.2, 1.0],
            [0.1, 2.0, 0.0],
        ];
        for p in probes {
            let exact = point_triangle_distance(p, A, B, C);
            let approx = sampled_distance(p, A, B, C);
            assert!(approx >= exact - 1e-12);
            assert!((approx - exact).abs() < 1e-3, "{p:?}: {exact} vs {approx}");
        }
        // Beyond edge AB: distance to that segment.
        let d = point_triangle_distance([0.5, -0.3, 0.4], A, B, C);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(TriangleMesh::new(vec![A, B, C], vec![[0, 1, 3]]).is_err());
        assert!(TriangleMesh::new(vec![A, B, [2.0, 0.0, 0.0]], vec![[0, 1, 2]]).is_err());
        let m = TriangleMesh::new(vec![A, B, C], vec![[0, 1, 2]]).unwrap();
        assert!((m.distance([0.2, 0.2, 0.5]).unwrap() - 0.5).abs() < 1e-15);
        let empty = TriangleMesh::new(vec![A], vec![]).unwrap();
        assert!(empty.distance(A).is_err());
    }
}
