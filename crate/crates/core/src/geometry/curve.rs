use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use super::polyline::{is_simple_loop, loop_signed_area, perimeter};
use super::{lerp, norm, sub, Point};
use crate::error::{Error, Result};

/// The four parametric test obstacles with concavities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogShape {
    /// `(0.195 + 0.4 (cos t + 0.65 cos 2t), 0.55 sin t)`
    PeanutC1,
    /// `(0.64 cos t, 0.48 sin t (1.8 + cos 2t))`
    BeanC2,
    /// kite-like curve with radius `(0.6 + 0.54 cos t + 0.06 sin 2t) / (1 + 0.75 cos t)`
    /// about `(-0.25, 0.05)`
    KiteC3,
    /// five-lobed star of radius `0.4 (1 + 0.75 cos(5t + pi))`
    StarC4,
}

impl CatalogShape {
    fn eval(self, t: f64) -> Point {
        let (s, c) = t.sin_cos();
        match self {
            CatalogShape::PeanutC1 => [0.195 + 0.4 * (c + 0.65 * (2.0 * t).cos()), 0.55 * s],
            CatalogShape::BeanC2 => [0.64 * c, 0.48 * s * (1.8 + (2.0 * t).cos())],
            CatalogShape::KiteC3 => {
                let r = (0.6 + 0.54 * c + 0.06 * (2.0 * t).sin()) / (1.0 + 0.75 * c);
                [-0.25 + r * c, 0.05 + r * s]
            }
            CatalogShape::StarC4 => {
                let r = 0.4 * (1.0 + 0.75 * (5.0 * t + PI).cos());
                [r * c, r * s]
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            CatalogShape::PeanutC1 => "peanut_c1",
            CatalogShape::BeanC2 => "bean_c2",
            CatalogShape::KiteC3 => "kite_c3",
            CatalogShape::StarC4 => "star_c4",
        }
    }
}

/// A closed obstacle boundary.
///
/// Smooth kinds are sampled at uniformly spaced parameter values. Polygonal
/// kinds (square, L-shape) are parametrized by arclength and always keep their
/// corners in the sampled polyline.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryCurve {
    Circle {
        center: Point,
        radius: f64,
    },
    Ellipse {
        center: Point,
        semi_axes: [f64; 2],
        rotation: f64,
    },
    /// Axis-aligned square.
    Square {
        center: Point,
        half_side: f64,
    },
    /// `[-1,1]^2` minus its upper-right quadrant, scaled by `half_size`.
    LShape {
        center: Point,
        half_size: f64,
    },
    /// A catalog curve translated by `center` and scaled about the origin of
    /// its own formula.
    Catalog {
        shape: CatalogShape,
        center: Point,
        scale: f64,
    },
    /// Explicit closed polyline (implicit closing segment).
    Polyline(Vec<Point>),
}

impl BoundaryCurve {
    pub fn circle(center: Point, radius: f64) -> Self {
        BoundaryCurve::Circle { center, radius }
    }

    pub fn catalog(shape: CatalogShape) -> Self {
        BoundaryCurve::Catalog {
            shape,
            center: [0.0, 0.0],
            scale: 1.0,
        }
    }

    fn corners(&self) -> Option<Vec<Point>> {
        match *self {
            BoundaryCurve::Square {
                center,
                half_side: h,
            } => Some(
                [[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]
                    .iter()
                    .map(|c| [center[0] + h * c[0], center[1] + h * c[1]])
                    .collect(),
            ),
            BoundaryCurve::LShape {
                center,
                half_size: h,
            } => Some(
                [
                    [-1.0, -1.0],
                    [1.0, -1.0],
                    [1.0, 0.0],
                    [0.0, 0.0],
                    [0.0, 1.0],
                    [-1.0, 1.0],
                ]
                .iter()
                .map(|c| [center[0] + h * c[0], center[1] + h * c[1]])
                .collect(),
            ),
            BoundaryCurve::Polyline(ref pts) => Some(pts.clone()),
            _ => None,
        }
    }

    /// Point at parameter `t`; 2π-periodic for every kind.
    pub fn point_at(&self, t: f64) -> Point {
        match *self {
            BoundaryCurve::Circle { center, radius } => {
                [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            }
            BoundaryCurve::Ellipse {
                center,
                semi_axes,
                rotation,
            } => {
                let (x, y) = (semi_axes[0] * t.cos(), semi_axes[1] * t.sin());
                let (s, c) = rotation.sin_cos();
                [center[0] + c * x - s * y, center[1] + s * x + c * y]
            }
            BoundaryCurve::Catalog {
                shape,
                center,
                scale,
            } => {
                let p = shape.eval(t);
                [center[0] + scale * p[0], center[1] + scale * p[1]]
            }
            _ => {
                let corners = self.corners().expect("polygonal kind");
                point_on_loop(&corners, t.rem_euclid(TAU) / TAU)
            }
        }
    }

    /// Samples `n` counterclockwise points on the curve.
    pub fn sample(&self, n: usize) -> Result<Vec<Point>> {
        if n < 3 {
            return Err(Error::Argument(format!("need at least 3 samples, got {n}")));
        }
        self.validate()?;
        let mut pts = match self.corners() {
            Some(corners) => sample_with_corners(&corners, n),
            None => (0..n)
                .map(|k| self.point_at(TAU * k as f64 / n as f64))
                .collect(),
        };
        if loop_signed_area(&pts) < 0.0 {
            pts[1..].reverse();
        }
        Ok(pts)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match self {
            BoundaryCurve::Circle { radius, .. } if !(*radius > 0.0) => {
                bad(format!("circle radius must be positive, got {radius}"))
            }
            BoundaryCurve::Ellipse { semi_axes, .. }
                if !(semi_axes[0] > 0.0 && semi_axes[1] > 0.0) =>
            {
                bad("ellipse semi-axes must be positive".into())
            }
            BoundaryCurve::Square { half_side, .. } if !(*half_side > 0.0) => {
                bad("square half side must be positive".into())
            }
            BoundaryCurve::LShape { half_size, .. } if !(*half_size > 0.0) => {
                bad("L-shape size must be positive".into())
            }
            BoundaryCurve::Catalog { scale, .. } if !(*scale > 0.0) => {
                bad("catalog scale must be positive".into())
            }
            BoundaryCurve::Polyline(pts) if !is_simple_loop(pts) => {
                bad("polyline must be a simple closed loop".into())
            }
            _ => Ok(()),
        }
    }
}

/// Point at arclength fraction `s` in [0, 1) along the closed loop.
fn point_on_loop(corners: &[Point], s: f64) -> Point {
    let total = perimeter(corners);
    let mut remaining = s * total;
    let n = corners.len();
    for i in 0..n {
        let (a, b) = (corners[i], corners[(i + 1) % n]);
        let len = norm(sub(b, a));
        if remaining <= len {
            return lerp(a, b, remaining / len);
        }
        remaining -= len;
    }
    corners[0]
}

/// Distributes `n` points over the sides proportionally to their length
/// (largest remainder), keeping every corner.
fn sample_with_corners(corners: &[Point], n: usize) -> Vec<Point> {
    let m = corners.len();
    if n <= m {
        return corners.to_vec();
    }
    let lens: Vec<f64> = (0..m)
        .map(|i| norm(sub(corners[(i + 1) % m], corners[i])))
        .collect();
    let total: f64 = lens.iter().sum();
    let ideal: Vec<f64> = lens.iter().map(|l| n as f64 * l / total).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| (x.floor() as usize).max(1)).collect();
    while counts.iter().sum::<usize>() < n {
        let i = (0..m)
            .max_by(|&a, &b| {
                (ideal[a] - counts[a] as f64).total_cmp(&(ideal[b] - counts[b] as f64))
            })
            .unwrap();
        counts[i] += 1;
    }
    while counts.iter().sum::<usize>() > n {
        let i = (0..m)
            .filter(|&i| counts[i] > 1)
            .min_by(|&a, &b| {
                (ideal[a] - counts[a] as f64).total_cmp(&(ideal[b] - counts[b] as f64))
            })
            .unwrap();
        counts[i] -= 1;
    }
    let mut pts = Vec::with_capacity(n);
    for i in 0..m {
        let (a, b) = (corners[i], corners[(i + 1) % m]);
        for j in 0..counts[i] {
            pts.push(lerp(a, b, j as f64 / counts[i] as f64));
        }
    }
    pts
}

impl FromStr for BoundaryCurve {
    type Err = Error;

    /// Parses `"<kind> <numbers...>"`, e.g. `"circle 0 0 0.5"`,
    /// `"ellipse 0 0 0.5 0.3 0.0"`, `"square 0 0 0.3"`, `"l_shape 0 0 0.4"`,
    /// `"star_c4"` or `"star_c4 0.1 0 0.8"` (center, scale),
    /// `"polyline x0 y0 x1 y1 ..."`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let kind = parts
            .next()
            .ok_or_else(|| Error::Config("empty curve description".into()))?;
        let nums: Vec<f64> = parts
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::Config(format!("curve '{s}': bad number '{p}'")))
            })
            .collect::<Result<_>>()?;
        let want = |k: &[usize]| -> Result<()> {
            if k.contains(&nums.len()) {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "curve '{s}': {kind} takes {k:?} numbers, got {}",
                    nums.len()
                )))
            }
        };
        let catalog = |shape| -> Result<BoundaryCurve> {
            want(&[0, 3])?;
            Ok(if nums.is_empty() {
                BoundaryCurve::catalog(shape)
            } else {
                BoundaryCurve::Catalog {
                    shape,
                    center: [nums[0], nums[1]],
                    scale: nums[2],
                }
            })
        };
        let curve = match kind {
            "circle" => {
                want(&[3])?;
                BoundaryCurve::Circle {
                    center: [nums[0], nums[1]],
                    radius: nums[2],
                }
            }
            "ellipse" => {
                want(&[4, 5])?;
                BoundaryCurve::Ellipse {
                    center: [nums[0], nums[1]],
                    semi_axes: [nums[2], nums[3]],
                    rotation: nums.get(4).copied().unwrap_or(0.0),
                }
            }
            "square" => {
                want(&[3])?;
                BoundaryCurve::Square {
                    center: [nums[0], nums[1]],
                    half_side: nums[2],
                }
            }
            "l_shape" => {
                want(&[3])?;
                BoundaryCurve::LShape {
                    center: [nums[0], nums[1]],
                    half_size: nums[2],
                }
            }
            "peanut_c1" => catalog(CatalogShape::PeanutC1)?,
            "bean_c2" => catalog(CatalogShape::BeanC2)?,
            "kite_c3" => catalog(CatalogShape::KiteC3)?,
            "star_c4" => catalog(CatalogShape::StarC4)?,
            "polyline" => {
                if nums.len() < 6 || nums.len() % 2 != 0 {
                    return Err(Error::Config(format!(
                        "curve '{s}': polyline needs an even count of at least 6 numbers"
                    )));
                }
                BoundaryCurve::Polyline(nums.chunks(2).map(|c| [c[0], c[1]]).collect())
            }
            other => return Err(Error::Config(format!("unknown curve kind '{other}'"))),
        };
        curve.validate()?;
        Ok(curve)
    }
}

impl fmt::Display for BoundaryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCurve::Circle { center, radius } => {
                write!(f, "circle {} {} {}", center[0], center[1], radius)
            }
            BoundaryCurve::Ellipse {
                center,
                semi_axes,
                rotation,
            } => write!(
                f,
                "ellipse {} {} {} {} {}",
                center[0], center[1], semi_axes[0], semi_axes[1], rotation
            ),
            BoundaryCurve::Square { center, half_side } => {
                write!(f, "square {} {} {}", center[0], center[1], half_side)
            }
            BoundaryCurve::LShape { center, half_size } => {
                write!(f, "l_shape {} {} {}", center[0], center[1], half_size)
            }
            BoundaryCurve::Catalog {
                shape,
                center,
                scale,
            } => write!(f, "{} {} {} {}", shape.name(), center[0], center[1], scale),
            BoundaryCurve::Polyline(pts) => {
                write!(f, "polyline")?;
                for p in pts {
                    write!(f, " {} {}", p[0], p[1])?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
    }

    #[test]
    fn circle_quarter_points() {
        let c = BoundaryCurve::circle([0.0, 0.0], 0.5);
        let expected = [[0.5, 0.0], [0.0, 0.5], [-0.5, 0.0], [0.0, -0.5]];
        for (k, e) in expected.iter().enumerate() {
            assert!(close(c.point_at(k as f64 * PI / 2.0), *e, 1e-15));
        }
    }

    #[test]
    fn catalog_values_at_zero() {
        let p = BoundaryCurve::catalog(CatalogShape::PeanutC1).point_at(0.0);
        assert!(close(p, [0.855, 0.0], 1e-14));
        let s = BoundaryCurve::catalog(CatalogShape::StarC4).point_at(0.0);
        assert!(close(s, [0.1, 0.0], 1e-14));
    }

    #[test]
    fn square_keeps_corners_for_odd_counts() {
        let sq: BoundaryCurve = "square 0 0 0.25".parse().unwrap();
        let pts = sq.sample(37).unwrap();
        assert_eq!(pts.len(), 37);
        for c in [[0.25, -0.25], [0.25, 0.25], [-0.25, 0.25], [-0.25, -0.25]] {
            assert!(pts.iter().any(|p| *p == c), "corner {c:?} missing");
        }
        assert!(loop_signed_area(&pts) > 0.0);
    }

    #[test]
    fn l_shape_area() {
        let l: BoundaryCurve = "l_shape 0 0 0.2".parse().unwrap();
        let pts = l.sample(60).unwrap();
        assert!((loop_signed_area(&pts) - 3.0 * 0.04).abs() < 1e-14);
    }

    #[test]
    fn unknown_kind_is_config_error() {
        let err = "blob 1 2 3".parse::<BoundaryCurve>().unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "circle 0.1 -0.2 0.3",
            "ellipse 0 0 0.5 0.3 0.2",
            "star_c4 0 0 1",
        ] {
            let c: BoundaryCurve = s.parse().unwrap();
            let back: BoundaryCurve = c.to_string().parse().unwrap();
            assert_eq!(c, back);
        }
    }

    #[test]
    fn clockwise_polyline_is_reoriented() {
        let cw = BoundaryCurve::Polyline(vec![[0.0, 0.0], [0.0, 0.2], [0.2, 0.2], [0.2, 0.0]]);
        let pts = cw.sample(4).unwrap();
        assert!(loop_signed_area(&pts) > 0.0);
    }
}
