//! Affine triangle geometry and the P1 / P2 Lagrange bases.
//!
//! P2 local node order: the three vertices, then the midpoints of the local
//! edges (0,1), (1,2), (2,0).

use crate::geometry::Point;

/// Local vertex pairs of the P2 edge nodes.
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

#[derive(Clone, Copy, Debug)]
pub struct TriangleGeometry {
    pub points: [Point; 3],
    pub area: f64,
    /// Constant gradients of the barycentric coordinates.
    pub grad_bary: [Point; 3],
}

impl TriangleGeometry {
    pub fn new(points: [Point; 3]) -> Self {
        let [p0, p1, p2] = points;
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let g = |a: Point, b: Point| [(a[1] - b[1]) / det, (b[0] - a[0]) / det];
        Self {
            points,
            area: 0.5 * det,
            grad_bary: [g(p1, p2), g(p2, p0), g(p0, p1)],
        }
    }

    pub fn map(&self, bary: [f64; 3]) -> Point {
        let [p0, p1, p2] = self.points;
        [
            bary[0] * p0[0] + bary[1] * p1[0] + bary[2] * p2[0],
            bary[0] * p0[1] + bary[1] * p1[1] + bary[2] * p2[1],
        ]
    }

    /// Barycentric coordinates of a physical point.
    pub fn bary_of(&self, x: Point) -> [f64; 3] {
        let p2 = self.points[2];
        let d = [x[0] - p2[0], x[1] - p2[1]];
        let l0 = self.grad_bary[0][0] * d[0] + self.grad_bary[0][1] * d[1];
        let l1 = self.grad_bary[1][0] * d[0] + self.grad_bary[1][1] * d[1];
        [l0, l1, 1.0 - l0 - l1]
    }

    /// P2 basis values at `bary`.
    pub fn p2_values(bary: [f64; 3]) -> [f64; 6] {
        let [a, b, c] = bary;
        [
            a * (2.0 * a - 1.0),
            b * (2.0 * b - 1.0),
            c * (2.0 * c - 1.0),
            4.0 * a * b,
            4.0 * b * c,
            4.0 * c * a,
        ]
    }

    /// Physical gradients of the P2 basis at `bary`.
    pub fn p2_gradients(&self, bary: [f64; 3]) -> [Point; 6] {
        let g = &self.grad_bary;
        let l = bary;
        let mut out = [[0.0; 2]; 6];
        for i in 0..3 {
            let s = 4.0 * l[i] - 1.0;
            out[i] = [s * g[i][0], s * g[i][1]];
        }
        for (k, [i, j]) in LOCAL_EDGES.iter().enumerate() {
            out[3 + k] = [
                4.0 * (l[*i] * g[*j][0] + l[*j] * g[*i][0]),
                4.0 * (l[*i] * g[*j][1] + l[*j] * g[*i][1]),
            ];
        }
        out
    }
}

/// One-dimensional P2 basis on an edge `a -> b` with midpoint `m`, at `s` in [0, 1]:
/// values for (a, b, m).
pub fn edge_p2_values(s: f64) -> [f64; 3] {
    [
        (1.0 - s) * (1.0 - 2.0 * s),
        s * (2.0 * s - 1.0),
        4.0 * s * (1.0 - s),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> TriangleGeometry {
        TriangleGeometry::new([[0.1, 0.2], [1.3, 0.4], [0.5, 1.1]])
    }

    #[test]
    fn partition_of_unity_and_nodal_property() {
        let nodes = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ];
        for (i, b) in nodes.iter().enumerate() {
            let v = TriangleGeometry::p2_values(*b);
            for (j, vj) in v.iter().enumerate() {
                assert!((vj - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let g = tri().p2_gradients([0.2, 0.3, 0.5]);
        let sx: f64 = g.iter().map(|d| d[0]).sum();
        let sy: f64 = g.iter().map(|d| d[1]).sum();
        assert!(sx.abs() < 1e-13 && sy.abs() < 1e-13);
    }

    #[test]
    fn gradients_reproduce_a_quadratic() {
        let t = tri();
        let f = |p: Point| {
            1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[0] + 3.0 * p[0] * p[1] - p[1] * p[1]
        };
        let df = |p: Point| [2.0 + p[0] + 3.0 * p[1], -1.0 + 3.0 * p[0] - 2.0 * p[1]];
        let nodes = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ];
        let coef: Vec<f64> = nodes.iter().map(|b| f(t.map(*b))).collect();
        let b = [0.15, 0.6, 0.25];
        let g = t.p2_gradients(b);
        let gx: f64 = (0..6).map(|k| coef[k] * g[k][0]).sum();
        let gy: f64 = (0..6).map(|k| coef[k] * g[k][1]).sum();
        let e = df(t.map(b));
        assert!((gx - e[0]).abs() < 1e-12 && (gy - e[1]).abs() < 1e-12);
        let x = t.map(b);
        let back = t.bary_of(x);
        for k in 0..3 {
            assert!((back[k] - b[k]).abs() < 1e-14);
        }
    }
}
