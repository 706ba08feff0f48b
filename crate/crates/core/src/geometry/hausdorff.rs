//! Exact Hausdorff distance between unions of closed polylines.
//!
//! The directed distance from a segment `a` to a polyline set `B` is the
//! maximum over `s` in [0, 1] of `min_j d(a(s), b_j)`. Each `d(a(s), b_j)` is
//! convex in `s`, so the lower envelope peaks either at an endpoint or where
//! two distance functions cross. Squared distances are piecewise quadratic
//! in `s`, which makes the crossings roots of quadratics.

use super::{dot, sub, Point};
use crate::error::{Error, Result};

#[derive(Clone, Copy)]
struct Segment {
    a: Point,
    b: Point,
}

fn segments(loops: &[Vec<Point>]) -> Vec<Segment> {
    loops
        .iter()
        .flat_map(|lp| {
            let n = lp.len();
            (0..n).map(move |i| Segment {
                a: lp[i],
                b: lp[(i + 1) % n],
            })
        })
        .collect()
}

fn point_segment_dist2(p: Point, s: &Segment) -> f64 {
    let d = sub(s.b, s.a);
    let l2 = dot(d, d);
    let u = if l2 > 0.0 {
        (dot(sub(p, s.a), d) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [s.a[0] + u * d[0] - p[0], s.a[1] + u * d[1] - p[1]];
    dot(q, q)
}

fn segment_segment_dist2(s: &Segment, t: &Segment) -> f64 {
    if super::polyline::segments_intersect(s.a, s.b, t.a, t.b) {
        return 0.0;
    }
    point_segment_dist2(s.a, t)
        .min(point_segment_dist2(s.b, t))
        .min(point_segment_dist2(t.a, s))
        .min(point_segment_dist2(t.b, s))
}

/// Squared distance from `x(s) = p + s q` to segment `t` as quadratic pieces
/// `(s_lo, s_hi, [c0, c1, c2])` covering [0, 1].
fn pieces(p: Point, q: Point, t: &Segment) -> Vec<(f64, f64, [f64; 3])> {
    let d = sub(t.b, t.a);
    let l2 = dot(d, d);
    let endpoint = |e: Point| {
        let w = sub(p, e);
        [dot(w, w), 2.0 * dot(w, q), dot(q, q)]
    };
    if l2 == 0.0 {
        return vec![(0.0, 1.0, endpoint(t.a))];
    }
    // projection parameter u(s) = u0 + u1 s onto the supporting line
    let u0 = dot(sub(p, t.a), d) / l2;
    let u1 = dot(q, d) / l2;
    let nrm = [-d[1], d[0]];
    let nl = l2.sqrt();
    let h0 = dot(sub(p, t.a), nrm) / nl;
    let h1 = dot(q, nrm) / nl;
    let line = [h0 * h0, 2.0 * h0 * h1, h1 * h1];
    let mut cuts = vec![0.0, 1.0];
    if u1 != 0.0 {
        for target in [0.0, 1.0] {
            let s = (target - u0) / u1;
            if s > 0.0 && s < 1.0 {
                cuts.push(s);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let u = u0 + u1 * mid;
            let c = if u < 0.0 {
                endpoint(t.a)
            } else if u > 1.0 {
                endpoint(t.b)
            } else {
                line
            };
            (w[0], w[1], c)
        })
        .collect()
}

fn quadratic_roots(c: [f64; 3], lo: f64, hi: f64, out: &mut Vec<f64>) {
    let [c0, c1, c2] = c;
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if scale == 0.0 {
        return;
    }
    let mut push = |r: f64| {
        if r >= lo && r <= hi {
            out.push(r);
        }
    };
    if c2.abs() <= 1e-14 * scale {
        if c1.abs() > 1e-14 * scale {
            push(-c0 / c1);
        }
        return;
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return;
    }
    let sq = disc.sqrt();
    let qv = -0.5 * (c1 + c1.signum() * sq);
    if qv != 0.0 {
        push(qv / c2);
        push(c0 / qv);
    } else {
        push(0.0);
    }
}

fn directed_segment(seg: &Segment, others: &[Segment]) -> f64 {
    let q = sub(seg.b, seg.a);
    let at = |s: f64| [seg.a[0] + s * q[0], seg.a[1] + s * q[1]];
    // upper bound on the envelope: some segment stays within it over [0, 1]
    let ub2 = others
        .iter()
        .map(|t| point_segment_dist2(seg.a, t).max(point_segment_dist2(seg.b, t)))
        .fold(f64::INFINITY, f64::min);
    let near: Vec<&Segment> = others
        .iter()
        .filter(|t| segment_segment_dist2(seg, t) <= ub2 * (1.0 + 1e-12) + 1e-300)
        .collect();
    let mut candidates = vec![0.0, 1.0];
    let pcs: Vec<Vec<(f64, f64, [f64; 3])>> = near.iter().map(|t| pieces(seg.a, q, t)).collect();
    for i in 0..pcs.len() {
        for j in (i + 1)..pcs.len() {
            for &(a0, a1, ca) in &pcs[i] {
                for &(b0, b1, cb) in &pcs[j] {
                    let (lo, hi) = (a0.max(b0), a1.min(b1));
                    if lo < hi {
                        let diff = [ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2]];
                        quadratic_roots(diff, lo, hi, &mut candidates);
                    }
                }
            }
        }
    }
    candidates
        .into_iter()
        .map(|s| {
            let p = at(s);
            near.iter()
                .map(|t| point_segment_dist2(p, t))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        .sqrt()
}

fn directed(a: &[Segment], b: &[Segment]) -> f64 {
    a.iter().map(|s| directed_segment(s, b)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two sets of closed polylines, taken
/// over all points on their segments.
pub fn hausdorff_distance(a: &[Vec<Point>], b: &[Vec<Point>]) -> Result<f64> {
    if a.iter().all(Vec::is_empty) || b.iter().all(Vec::is_empty) {
        return Err(Error::Argument(
            "Hausdorff distance of an empty polyline".into(),
        ));
    }
    let (sa, sb) = (segments(a), segments(b));
    Ok(directed(&sa, &sb).max(directed(&sb, &sa)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryCurve;

    fn circle(r: f64, n: usize) -> Vec<Point> {
        BoundaryCurve::circle([0.0, 0.0], r).sample(n).unwrap()
    }

    #[test]
    fn identical_is_zero() {
        let c = circle(0.5, 50);
        assert!(hausdorff_distance(&[c.clone()], &[c]).unwrap() < 1e-15);
    }

    #[test]
    fn concentric_circles() {
        let d = hausdorff_distance(&[circle(0.5, 2000)], &[circle(0.6, 2000)]).unwrap();
        assert!((d - 0.1).abs() < 1e-3, "{d}");
    }

    #[test]
    fn empty_is_error() {
        assert!(hausdorff_distance(&[vec![]], &[circle(0.5, 8)]).is_err());
    }

    #[test]
    fn interior_maximum_is_found() {
        // every vertex of the thin strip is close to the two end caps, but
        // the middle of its long sides is not
        let strip = vec![vec![[-1.0, 0.0], [1.0, 0.0], [1.0, 0.01], [-1.0, 0.01]]];
        let caps = vec![
            vec![[-1.0, 0.0], [-0.99, 0.0], [-1.0, 0.01]],
            vec![[1.0, 0.0], [1.0, 0.01], [0.99, 0.0]],
        ];
        let d = hausdorff_distance(&strip, &caps).unwrap();
        assert!((d - 0.99).abs() < 1e-3, "{d}");
    }
}
