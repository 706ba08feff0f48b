//! Finite-difference check of the shape gradient.

use rand::Rng;

use super::evaluate::{evaluate_cost, solve_state};
use crate::error::Result;
use crate::fem::{BoundaryTrace, StokesOperators};
use crate::geometry::{deform_mesh, DeformationField, TriangleMesh};
use crate::rng;

fn cost_on(
    mesh: &TriangleMesh,
    alpha: f64,
    f: &dyn BoundaryTrace,
    g: &dyn BoundaryTrace,
) -> Result<f64> {
    let ops = StokesOperators::new(mesh);
    let (state, _) = solve_state(mesh, &ops, alpha, f, g)?;
    Ok(evaluate_cost(&state, &ops).j)
}

/// Central difference `[J(Ω_t) − J(Ω_{−t})] / 2t` with `Ω_{±t} = (I ± tV)(Ω)`
/// and the same boundary data on both shapes. Fails with a step-too-large
/// error when either deformed mesh is invalid.
pub fn fd_directional_derivative(
    mesh: &TriangleMesh,
    alpha: f64,
    f: &dyn BoundaryTrace,
    g: &dyn BoundaryTrace,
    field: &DeformationField,
    t: f64,
) -> Result<f64> {
    if field.is_zero() {
        return Ok(0.0);
    }
    let plus = deform_mesh(mesh, field, t, 0.0)?;
    let minus = deform_mesh(mesh, &field.scaled(-1.0), t, 0.0)?;
    let (jp, jm) = join_pair(
        || cost_on(&plus, alpha, f, g),
        || cost_on(&minus, alpha, f, g),
    );
    Ok((jp? - jm?) / (2.0 * t))
}

fn join_pair<A, B>(a: impl FnOnce() -> A + Send, b: impl FnOnce() -> B + Send) -> (A, B)
where
    A: Send,
    B: Send,
{
    std::thread::scope(|s| {
        let hb = s.spawn(b);
        let ra = a();
        (ra, hb.join().expect("finite-difference worker panicked"))
    })
}

/// `count` smooth fields `V(x) = (1 − |x|²) P(x)` with `P` a random vector
/// polynomial of degree two, normalized to unit maximum norm. They vanish on
/// the outer circle.
pub fn random_smooth_fields(mesh: &TriangleMesh, seed: u64, count: usize) -> Vec<DeformationField> {
    let mut rng = rng::stream(seed, rng::FIELD_STREAM);
    (0..count)
        .map(|_| {
            let c: [[f64; 6]; 2] = [
                std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
                std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
            ];
            let v = DeformationField::from_fn(mesh, |p| {
                let [x, y] = p;
                let w = 1.0 - x * x - y * y;
                let mono = [1.0, x, y, x * x, x * y, y * y];
                let e = |k: usize| w * (0..6).map(|i| c[k][i] * mono[i]).sum::<f64>();
                [e(0), e(1)]
            });
            let s = v.max_norm();
            if s > 0.0 {
                v.scaled(1.0 / s)
            } else {
                v
            }
        })
        .collect()
}
