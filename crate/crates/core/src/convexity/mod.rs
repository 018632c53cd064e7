//! The dual body W = conv φ(Sⁿ), φ(θ) = θ/γ(−θ), and convex-integrand tests.
//!
//! γ is a convex integrand exactly when φ(Sⁿ) is the boundary of its own
//! convex hull. On a sample grid that is checked twice: combinatorially
//! (every sample is a hull vertex, up to `tol`) and differentially (the
//! boundary curves towards the origin everywhere).

mod dual;
pub mod hull;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::sphere_fn::{components, unit_direction, SampledFunction, SphereField};
use crate::tangent::{sphere_grid, Vec3};

pub use dual::{DualJet, DualMap, SurfaceFrame};
pub use hull::{Facet, Hull};

/// Grid sizes used by [`validate_positive`].
pub const POSITIVITY_GRID_S1: usize = 3600;
pub const POSITIVITY_GRID_S2: usize = 20000;

/// Default hull tolerance relative to the largest radius.
pub const HULL_REL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Indeterminate,
}

/// φ(θ) for a public caller.
pub fn dual_embedding<F: SphereField + ?Sized>(gamma: &F, theta: &[f64]) -> Result<Vec<f64>> {
    let dim = gamma.dimension();
    let t = unit_direction(dim, theta)?;
    let g = gamma.value(&(-t));
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::NotPositive {
            witness: components(dim, &(-t)),
            value: g,
        });
    }
    Ok(components(dim, &(t / g)))
}

/// The inversion (θ, r) ↦ (−θ, 1/r) on polar samples.
pub fn invert(samples: &[(Vec3, f64)]) -> Vec<(Vec3, f64)> {
    samples.iter().map(|(t, r)| (-t, 1.0 / r)).collect()
}

fn positivity_scan<F: SphereField + ?Sized>(gamma: &F, grid: &[Vec3]) -> Result<(f64, Vec3)> {
    let values = par::map(grid, |t| gamma.value(t));
    let mut best = (f64::INFINITY, grid[0]);
    for (t, v) in grid.iter().zip(values) {
        // NaN counts as a failure
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NotPositive {
                witness: components(gamma.dimension(), t),
                value: v,
            });
        }
        if v < best.0 {
            best = (v, *t);
        }
    }
    Ok(best)
}

/// Minimum of γ over the validation grid (3600 angles on S¹, 20000
/// Fibonacci points on S²) and where it is attained.
pub fn validate_positive<F: SphereField + ?Sized>(gamma: &F) -> Result<(f64, Vec3)> {
    let dim = gamma.dimension();
    let m = if dim == 1 { POSITIVITY_GRID_S1 } else { POSITIVITY_GRID_S2 };
    // report the smallest nonpositive witness rather than the first one found
    let grid = sphere_grid(dim, m);
    match positivity_scan(gamma, &grid) {
        Err(Error::NotPositive { .. }) => {
            let (t, v) = grid
                .iter()
                .map(|t| (t, gamma.value(t)))
                .min_by(|a, b| {
                    let key = |v: f64| if v.is_nan() { f64::NEG_INFINITY } else { v };
                    key(a.1).total_cmp(&key(b.1))
                })
                .unwrap();
            Err(Error::NotPositive {
                witness: components(dim, t),
                value: v,
            })
        }
        other => other,
    }
}

/// W sampled on a grid of source directions.
#[derive(Debug, Clone)]
pub struct DualBody {
    pub dimension: usize,
    pub thetas: Vec<Vec3>,
    /// φ(θᵢ).
    pub points: Vec<Vec3>,
    /// Inward unit normals of φ(Sⁿ) at φ(θᵢ).
    pub normals: Vec<Vec3>,
    pub hull: Hull,
    /// Distance of each sample from the hull boundary (0 for hull vertices).
    pub residuals: Vec<f64>,
    /// Lower bound for dist(0, ∂W): the smallest facet-plane distance.
    pub inradius: f64,
    pub max_radius: f64,
}

impl DualBody {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Whether `p` is inside the sampled hull with at least `margin` to spare.
    pub fn contains(&self, p: &Vec3, margin: f64) -> bool {
        self.hull.facets.iter().all(|f| f.depth(p) >= margin)
    }

    /// How far the true boundary bulges beyond the hull facets between
    /// samples: φ is evaluated at the normalized mean of each facet's source
    /// directions. O(M⁻²) on S¹ for smooth convex boundaries.
    pub fn sampling_gap<F: SphereField + ?Sized>(&self, gamma: &F) -> f64 {
        let map = DualMap::new(gamma);
        let k = if self.dimension == 1 { 2 } else { 3 };
        par::map(&self.hull.facets, |f| {
            let mid = f.vertices[..k]
                .iter()
                .fold(Vec3::zeros(), |acc, &i| acc + self.thetas[i])
                .normalize();
            (-f.depth(&map.point(&mid))).max(0.0)
        })
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Samples φ on the standard `m`-point grid and builds its hull.
pub fn build_dual_body<F: SphereField + ?Sized>(gamma: &F, m: usize) -> Result<DualBody> {
    let dim = gamma.dimension();
    build_dual_body_on(gamma, sphere_grid(dim, m))
}

/// As [`build_dual_body`] with explicit source directions.
pub fn build_dual_body_on<F: SphereField + ?Sized>(gamma: &F, thetas: Vec<Vec3>) -> Result<DualBody> {
    let dim = gamma.dimension();
    let flipped: Vec<Vec3> = thetas.iter().map(|t| -t).collect();
    positivity_scan(gamma, &flipped)?;
    let map = DualMap::new(gamma);
    let frames = par::map(&thetas, |t| {
        let f = map.frame(t);
        (f.point, f.normal)
    });
    let points: Vec<Vec3> = frames.iter().map(|f| f.0).collect();
    let normals: Vec<Vec3> = frames.iter().map(|f| f.1).collect();
    let hull = hull::hull(dim, &points)?;
    let residuals = par::map_range(points.len(), |i| if hull.is_vertex(i) { 0.0 } else { hull.depth(&points[i]) });
    let inradius = hull.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
    if !(inradius > 0.0) {
        return Err(Error::DegenerateHull("origin is not interior to the sampled hull".into()));
    }
    let max_radius = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    Ok(DualBody {
        dimension: dim,
        thetas,
        points,
        normals,
        hull,
        residuals,
        inradius,
        max_radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub verdict: Verdict,
    pub hull_verdict: Verdict,
    pub differential_verdict: Verdict,
    pub samples: usize,
    pub tol: f64,
    pub max_residual: f64,
    /// n=1: min of ρ² + 2ρ′² − ρρ″; n=2: min eigenvalue of the second
    /// fundamental form (towards the origin).
    pub min_curvature_numerator: f64,
    pub min_value: f64,
    /// Worst bulge of the boundary past the facets (see [`DualBody::sampling_gap`]).
    pub sampling_gap: f64,
    pub inradius: f64,
}

/// ρ² + 2ρ′² − ρρ″ for ρ(t) = 1/γ(−θ(t)), the sign of the curvature of the
/// polar curve t ↦ ρ(t)(cos t, sin t).
pub fn polar_curvature_numerator<F: SphereField + ?Sized>(gamma: &F, theta: &Vec3) -> f64 {
    // along the circle d/dt(−θ(t)) is the frame vector at −θ
    let jet = gamma.jet(&(-theta));
    let g = jet.value;
    let g1 = jet.basis.coords(&jet.gradient)[0];
    let g2 = jet.hessian.m[(0, 0)];
    let rho = 1.0 / g;
    let rho1 = -g1 / (g * g);
    let rho2 = -g2 / (g * g) + 2.0 * g1 * g1 / (g * g * g);
    rho * rho + 2.0 * rho1 * rho1 - rho * rho2
}

/// The convex-integrand test on `m` samples. `tol` defaults to
/// 1e−7 · (max radius of φ).
pub fn is_convex_integrand<F: SphereField + ?Sized>(gamma: &F, m: usize, tol: Option<f64>) -> Result<ConvexityReport> {
    let dim = gamma.dimension();
    let body = build_dual_body(gamma, m)?;
    let tol = tol.unwrap_or(HULL_REL_TOL * body.max_radius);
    let max_residual = body.max_residual();
    let hull_verdict = if max_residual <= tol { Verdict::Yes } else { Verdict::No };

    let map = DualMap::new(gamma);
    let numerators = par::map(&body.thetas, |t| {
        if dim == 1 {
            polar_curvature_numerator(gamma, t)
        } else {
            map.frame(t).second_form.eigenvalues()[0]
        }
    });
    let min_num = numerators.iter().copied().fold(f64::INFINITY, f64::min);
    let diff_tol = if dim == 1 { tol * body.max_radius } else { tol };
    let differential_verdict = if min_num >= -diff_tol { Verdict::Yes } else { Verdict::No };

    let verdict = if hull_verdict == differential_verdict {
        hull_verdict
    } else {
        Verdict::Indeterminate
    };
    let min_value = body
        .thetas
        .iter()
        .map(|t| gamma.value(&(-t)))
        .fold(f64::INFINITY, f64::min);
    Ok(ConvexityReport {
        verdict,
        hull_verdict,
        differential_verdict,
        samples: m,
        tol,
        max_residual,
        min_curvature_numerator: min_num,
        min_value,
        sampling_gap: body.sampling_gap(gamma),
        inradius: body.inradius,
    })
}

/// Hull-only verdict for a function known only at its samples. φ is taken
/// at the sample directions themselves, so no interpolation enters; there is
/// no differential test (`differential_verdict` is indeterminate and the
/// curvature numerator NaN).
pub fn is_convex_sampled(f: &SampledFunction, tol: Option<f64>) -> Result<ConvexityReport> {
    let dim = f.dimension();
    let (min_value, at) = f
        .samples()
        .iter()
        .map(|(t, v)| (*v, *t))
        .fold((f64::INFINITY, Vec3::zeros()), |a, b| if b.0 < a.0 { b } else { a });
    if !(min_value > 0.0) {
        return Err(Error::NotPositive {
            witness: components(dim, &at),
            value: min_value,
        });
    }
    let points: Vec<Vec3> = f.samples().iter().map(|(t, v)| -t / *v).collect();
    let h = hull::hull(dim, &points)?;
    let max_radius = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let tol = tol.unwrap_or(HULL_REL_TOL * max_radius);
    let max_residual = (0..points.len())
        .filter(|&i| !h.is_vertex(i))
        .map(|i| h.depth(&points[i]))
        .fold(0.0, f64::max);
    let inradius = h.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
    let hull_verdict = if max_residual <= tol { Verdict::Yes } else { Verdict::No };
    Ok(ConvexityReport {
        verdict: hull_verdict,
        hull_verdict,
        differential_verdict: Verdict::Indeterminate,
        samples: points.len(),
        tol,
        max_residual,
        min_curvature_numerator: f64::NAN,
        min_value,
        sampling_gap: f64::NAN,
        inradius,
    })
}
