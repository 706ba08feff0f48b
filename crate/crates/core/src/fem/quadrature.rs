//! Quadrature on the reference triangle and on straight edges.

/// A point in barycentric coordinates with a weight summing to one over the
/// rule (multiply by the triangle area).
#[derive(Clone, Copy, Debug)]
pub struct TriPoint {
    pub bary: [f64; 3],
    pub weight: f64,
}

const fn sym3(a: f64, b: f64, w: f64) -> [TriPoint; 3] {
    [
        TriPoint {
            bary: [a, b, b],
            weight: w,
        },
        TriPoint {
            bary: [b, a, b],
            weight: w,
        },
        TriPoint {
            bary: [b, b, a],
            weight: w,
        },
    ]
}

const fn concat2(x: [TriPoint; 3], y: [TriPoint; 3]) -> [TriPoint; 6] {
    [x[0], x[1], x[2], y[0], y[1], y[2]]
}

/// Six-point rule, exact for polynomials of degree 4.
pub const TRI_DEG4: [TriPoint; 6] = concat2(
    sym3(
        1.0 - 2.0 * 0.445_948_490_915_964_9,
        0.445_948_490_915_964_9,
        0.223_381_589_678_011_47,
    ),
    sym3(
        1.0 - 2.0 * 0.091_576_213_509_770_73,
        0.091_576_213_509_770_73,
        0.109_951_743_655_321_87,
    ),
);

/// Seven-point rule, exact for polynomials of degree 5.
pub const TRI_DEG5: [TriPoint; 7] = {
    let a = sym3(
        0.059_715_871_789_769_82,
        0.470_142_064_105_115_1,
        0.132_394_152_788_506_19,
    );
    let b = sym3(
        0.797_426_985_353_087_3,
        0.101_286_507_323_456_34,
        0.125_939_180_544_827_14,
    );
    [
        TriPoint {
            bary: [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            weight: 0.225,
        },
        a[0],
        a[1],
        a[2],
        b[0],
        b[1],
        b[2],
    ]
};

/// Three-point Gauss rule on [0, 1]: `(s, weight)`, weights sum to one.
pub const EDGE_GAUSS3: [(f64, f64); 3] = [
    (0.5 - 0.387_298_334_620_741_7, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.5 + 0.387_298_334_620_741_7, 5.0 / 18.0),
];
