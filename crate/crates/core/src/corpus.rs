//! Named integrands. Each is described by the radial function ρ of its dual
//! boundary φ(Sⁿ) (so γ(θ) = 1/ρ(−θ)).

use crate::sphere_fn::SphereFunction;

fn build(dim: usize, terms: &[(&[u32], f64)], power: f64) -> SphereFunction {
    SphereFunction::from_terms(dim, terms, power).expect("corpus entries are valid")
}

/// γ ≡ 1: the dual body is the unit ball.
pub fn round(dim: usize) -> SphereFunction {
    SphereFunction::constant(dim, 1.0)
}

/// Gauge √(x²/a² + y²/b²): the dual boundary is the ellipse with semi-axes
/// `a` (x) and `b` (y).
pub fn ellipse_dual(a: f64, b: f64) -> SphereFunction {
    build(1, &[(&[2, 0], 1.0 / (a * a)), (&[0, 2], 1.0 / (b * b))], 0.5)
}

/// Gauge of the ellipsoid with semi-axes a, b, c.
pub fn ellipsoid_dual(a: f64, b: f64, c: f64) -> SphereFunction {
    build(
        2,
        &[
            (&[2, 0, 0], 1.0 / (a * a)),
            (&[0, 2, 0], 1.0 / (b * b)),
            (&[0, 0, 2], 1.0 / (c * c)),
        ],
        0.5,
    )
}

/// γ = 2 + x: ρ(θ) = 1/(2 − x), a conic with a focus at the origin.
pub fn conic(dim: usize) -> SphereFunction {
    let one = vec![0u32; dim + 1];
    let mut x = vec![0u32; dim + 1];
    x[0] = 1;
    build(dim, &[(&one, 2.0), (&x, 1.0)], 1.0)
}

/// ρ(t) = 1 + a·cos t (a limaçon, convex for a < 1/2), i.e. γ = 1/(1 − a·x).
pub fn limacon_dual(dim: usize, a: f64) -> SphereFunction {
    let one = vec![0u32; dim + 1];
    let mut x = vec![0u32; dim + 1];
    x[0] = 1;
    build(dim, &[(&one, 1.0), (&x, -a)], -1.0)
}

/// ρ(t) = 1 + ε·cos 3t, i.e. γ = 1/(1 − ε(4x³ − 3x)); convex iff ε ≤ 1/10.
pub fn trefoil_dual(eps: f64) -> SphereFunction {
    build(1, &[(&[0, 0], 1.0), (&[3, 0], -4.0 * eps), (&[1, 0], 3.0 * eps)], -1.0)
}

/// ρ(t) = 1 + ε·sin 3t, i.e. γ = 1/(1 − ε(3y − 4y³)).
pub fn trefoil_sin_dual(eps: f64) -> SphereFunction {
    build(1, &[(&[0, 0], 1.0), (&[0, 1], -3.0 * eps), (&[0, 3], 4.0 * eps)], -1.0)
}

/// ρ(t) = 1 − k·cos 2t, i.e. γ = 1/(1 − k(x² − y²)); non-convex for k > 1/5.
pub fn peanut_dual(k: f64) -> SphereFunction {
    build(1, &[(&[0, 0], 1.0), (&[2, 0], -k), (&[0, 2], k)], -1.0)
}

/// Convex integrands on S¹ used for identity and convexity checks.
pub fn positive_s1() -> Vec<(&'static str, SphereFunction)> {
    vec![
        ("round", round(1)),
        ("ellipse-2-1", ellipse_dual(2.0, 1.0)),
        ("conic", conic(1)),
        ("limacon-0.2", limacon_dual(1, 0.2)),
        ("trefoil-0.05", trefoil_dual(0.05)),
    ]
}

/// Convex integrands on S².
pub fn positive_s2() -> Vec<(&'static str, SphereFunction)> {
    vec![
        ("round", round(2)),
        ("ellipsoid-2-1.5-1", ellipsoid_dual(2.0, 1.5, 1.0)),
        ("conic", conic(2)),
    ]
}

/// Non-convex members of the ρ = 1 + ε·cos 3t family.
pub fn negative_s1() -> Vec<(&'static str, SphereFunction)> {
    vec![
        ("trefoil-0.6", trefoil_dual(0.6)),
        ("trefoil-sin-0.6", trefoil_sin_dual(0.6)),
        ("trefoil-0.3", trefoil_dual(0.3)),
    ]
}

/// Ellipse gauges used for continuity checks.
pub fn ellipses() -> Vec<(&'static str, SphereFunction)> {
    vec![
        ("ellipse-2-1", ellipse_dual(2.0, 1.0)),
        ("ellipse-1.5-1", ellipse_dual(1.5, 1.0)),
        ("ellipse-3-2", ellipse_dual(3.0, 2.0)),
    ]
}
