//! Translating the dual body and rebuilding the integrand.
//!
//! For v in the interior of W = conv φ(Sⁿ):
//!
//! * h_v(θ) = (φ(θ) − v)/‖φ(θ) − v‖ is a diffeomorphism of Sⁿ;
//! * γ̃_v is the radial function of W − v, so (γ̃_v ∘ h_v)(θ) = ‖φ(θ) − v‖;
//! * γ_v(θ) = 1/γ̃_v(−θ) is again a convex integrand, and γ_0 = γ.
//!
//! γ̃_v is evaluated by inverting h_v with Newton's method. Its derivatives
//! come from the implicit equation G(y/λ + v) = 1, where G(x) = ‖x‖γ(−x/‖x‖)
//! is the gauge of W and λ = G_v(y) the gauge of W − v.

use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convexity::DualMap;
use crate::error::{Error, Result};
use crate::par;
use crate::sphere_fn::{components, unit_direction, AmbientJet, Jet, SampledFunction, SphereField};
use crate::stability::{is_stable, StabilityConfig, StabilityVerdict, Status};
use crate::tangent::{antipodal_grid, retract, sphere_grid, Mat3, TangentBasis, Vec3};

/// Default h_v table sizes.
pub const TABLE_S1: usize = 720;
pub const TABLE_S2: usize = 2000;

const NEWTON_MAX_ITER: usize = 40;
const NEWTON_MAX_STEP: f64 = 0.3;

/// Erases the concrete type of an integrand so translations can own it.
pub fn shared<F: SphereField + 'static>(f: F) -> Arc<dyn SphereField> {
    Arc::new(f)
}

fn vec_from(dim: usize, v: &[f64]) -> Result<Vec3> {
    if v.len() != dim + 1 {
        return Err(Error::DimensionMismatch {
            expected: dim + 1,
            got: v.len(),
        });
    }
    let mut out = Vec3::zeros();
    for (i, c) in v.iter().enumerate() {
        out[i] = *c;
    }
    Ok(out)
}

/// Gauge of W at a boundary point z = φ(θ): returns (∇G(z), ∇²G(z)).
fn gauge_derivatives(gamma: &dyn SphereField, theta: &Vec3, z: &Vec3) -> (Vec3, Mat3) {
    let dim = gamma.dimension();
    // q(w) = γ(−w)
    let amb = gamma.ambient_jet(&(-theta));
    let q = Jet::from_ambient(
        dim,
        theta,
        &AmbientJet {
            value: amb.value,
            gradient: -amb.gradient,
            hessian: amb.hessian,
        },
    );
    let grad = q.gradient + theta * q.value;
    let mut tangent = q.hessian;
    for i in 0..dim {
        tangent.m[(i, i)] += q.value;
    }
    let hess = q.basis.embed(&tangent) / z.norm();
    (grad, hess)
}

/// Gauge of W: G(x) = ‖x‖·γ(−x/‖x‖).
pub fn gauge(gamma: &dyn SphereField, x: &Vec3) -> f64 {
    let r = x.norm();
    if r == 0.0 {
        return 0.0;
    }
    r * gamma.value(&(-x / r))
}

/// The translation x ↦ x − v of the dual body, with a sampled h_v table.
pub struct Translation {
    gamma: Arc<dyn SphereField>,
    v: Vec3,
    dim: usize,
    table_theta: Vec<Vec3>,
    table_h: Vec<Vec3>,
    margin: f64,
    inradius: f64,
}

impl std::fmt::Debug for Translation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Translation")
            .field("v", &self.v)
            .field("margin", &self.margin)
            .field("table", &self.table_theta.len())
            .finish()
    }
}

impl Translation {
    pub fn new(gamma: Arc<dyn SphereField>, v: &[f64]) -> Result<Self> {
        let m = if gamma.dimension() == 1 { TABLE_S1 } else { TABLE_S2 };
        Self::with_table(gamma, v, m)
    }

    /// Fails with [`Error::OutOfInterior`] unless dist(v, ∂W) ≥
    /// max(1e−9, 1e−6·inradius).
    pub fn with_table(gamma: Arc<dyn SphereField>, v: &[f64], m: usize) -> Result<Self> {
        let dim = gamma.dimension();
        let v = vec_from(dim, v)?;
        let thetas = sphere_grid(dim, m);
        let points = {
            let map = DualMap::new(&*gamma);
            par::map(&thetas, |t| map.point(t))
        };
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::NotPositive {
                witness: Vec::new(),
                value: f64::NAN,
            });
        }
        let inradius = points.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
        let required = required_margin(inradius);
        if gauge(&*gamma, &v) >= 1.0 {
            let dist = points.iter().map(|p| (p - v).norm()).fold(f64::INFINITY, f64::min);
            return Err(Error::OutOfInterior {
                margin: -dist,
                required,
            });
        }
        let table_h: Vec<Vec3> = points.iter().map(|p| (p - v).normalize()).collect();
        let best = (0..points.len())
            .min_by(|&a, &b| (points[a] - v).norm().total_cmp(&(points[b] - v).norm()))
            .unwrap_or(0);
        let margin = min_distance(&*gamma, &v, &thetas[best]);
        if margin < required {
            return Err(Error::OutOfInterior { margin, required });
        }
        Ok(Self {
            gamma,
            v,
            dim,
            table_theta: thetas,
            table_h,
            margin,
            inradius,
        })
    }

    pub fn gamma(&self) -> &Arc<dyn SphereField> {
        &self.gamma
    }

    pub fn v(&self) -> Vec3 {
        self.v
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// dist(v, ∂W).
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// min ‖φ‖ over the table, an estimate of dist(0, ∂W).
    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn table(&self) -> impl Iterator<Item = (&Vec3, &Vec3)> {
        self.table_theta.iter().zip(&self.table_h)
    }

    pub fn h(&self, theta: &Vec3) -> Vec3 {
        let map = DualMap::new(&*self.gamma);
        (map.point(theta) - self.v).normalize()
    }

    /// θ with h_v(θ) = u, by Newton's method from the nearest table entry.
    pub fn h_inverse(&self, u: &Vec3) -> Result<Vec3> {
        let start = self
            .table_h
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.dot(u).total_cmp(&b.1.dot(u)))
            .map_or(0, |(i, _)| i);
        let map = DualMap::new(&*self.gamma);
        let eu = TangentBasis::at(self.dim, u);
        let mut theta = self.table_theta[start];
        let mut best = (f64::INFINITY, theta);
        for _ in 0..NEWTON_MAX_ITER {
            let jet = map.jet(&theta);
            let d = jet.point - self.v;
            let res = eu.coords(&d);
            let rel = res.norm() / d.norm();
            if d.dot(u) > 0.0 && rel < best.0 {
                best = (rel, theta);
            }
            if d.dot(u) > 0.0 && rel <= 1e-15 {
                break;
            }
            let et = TangentBasis::at(self.dim, &theta);
            let mut jac = Matrix2::identity();
            for i in 0..self.dim {
                for j in 0..self.dim {
                    jac[(i, j)] = eu.e[i].dot(&(jet.d * et.e[j]));
                }
            }
            let Some(mut step) = jac.lu().solve(&(-res)) else {
                break;
            };
            let len = step.norm();
            if !len.is_finite() {
                break;
            }
            if len > NEWTON_MAX_STEP {
                step *= NEWTON_MAX_STEP / len;
            }
            theta = retract(&theta, &et, &Vector2::new(step[0], step[1]));
        }
        if best.0 <= 1e-11 {
            Ok(best.1)
        } else {
            Err(Error::NoConvergence { residual: best.0 })
        }
    }

    /// γ̃_v(u) = ‖φ(h_v⁻¹(u)) − v‖.
    pub fn tilde_gamma(&self, u: &Vec3) -> Result<f64> {
        let theta = self.h_inverse(u)?;
        Ok((DualMap::new(&*self.gamma).point(&theta) - self.v).norm())
    }

    /// Gauge λ = G_v(y) of W − v at a unit y with its ambient derivatives.
    fn gauge_jet(&self, y: &Vec3) -> Result<AmbientJet> {
        let theta = self.h_inverse(y)?;
        let z = DualMap::new(&*self.gamma).point(&theta);
        let r = (z - self.v).norm();
        let lambda = 1.0 / r;
        let (a, m) = gauge_derivatives(&*self.gamma, &theta, &z);
        let d = 1.0 - a.dot(&self.v);
        let g = a / d;
        let left = Mat3::identity() / d + a * self.v.transpose() / (d * d);
        let right = Mat3::identity() - y * g.transpose() / lambda;
        let h = left * m * right / lambda;
        Ok(AmbientJet {
            value: lambda,
            gradient: g,
            hessian: (h + h.transpose()) * 0.5,
        })
    }

    pub fn distance_field(self: &Arc<Self>) -> DistanceField {
        DistanceField::new(self.gamma.clone(), self.v)
    }

    pub fn radius_field(self: &Arc<Self>) -> TranslatedRadius {
        TranslatedRadius(DistanceField::new(self.gamma.clone(), self.v))
    }
}

fn required_margin(inradius: f64) -> f64 {
    (1e-6 * inradius).max(1e-9)
}

/// min_θ ‖φ(θ) − v‖ by damped Newton descent on ½‖φ − v‖² from `start`.
fn min_distance(gamma: &dyn SphereField, v: &Vec3, start: &Vec3) -> f64 {
    let field = DistanceField::new_ref(gamma, *v);
    let mut theta = *start;
    let mut jet = field.jet(&theta);
    for _ in 0..NEWTON_MAX_ITER {
        let g = jet.basis.coords(&jet.gradient);
        if g.norm() <= 1e-15 * (1.0 + jet.value) {
            break;
        }
        let ev = jet.hessian.eigenvalues();
        let mut step = if ev[0] > 0.0 && (jet.basis.dim == 1 || ev[1] > 0.0) {
            jet.hessian.solve(&(-g)).unwrap_or(-g)
        } else {
            -g
        };
        if step.norm() > NEWTON_MAX_STEP {
            step *= NEWTON_MAX_STEP / step.norm();
        }
        let mut accepted = false;
        for _ in 0..30 {
            let cand = retract(&theta, &jet.basis, &step);
            let cj = field.jet(&cand);
            if cj.value < jet.value {
                theta = cand;
                jet = cj;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (2.0 * jet.value).sqrt()
}

/// Independent route to γ̃_v(u): bisection on G(v + r·u) = 1 along the ray.
pub fn tilde_gamma_ray(gamma: &dyn SphereField, v: &Vec3, u: &Vec3) -> f64 {
    let excess = |r: f64| gauge(gamma, &(v + u * r)) - 1.0;
    let mut hi = 1.0;
    while excess(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// F(v, θ) = ½‖φ(θ) − v‖², the distance-squared function of φ from v.
#[derive(Clone)]
pub struct DistanceField {
    gamma: Arc<dyn SphereField>,
    v: Vec3,
}

/// Borrowing variant used internally.
struct DistanceRef<'a> {
    gamma: &'a dyn SphereField,
    v: Vec3,
}

impl DistanceField {
    pub fn new(gamma: Arc<dyn SphereField>, v: Vec3) -> Self {
        Self { gamma, v }
    }

    fn new_ref(gamma: &dyn SphereField, v: Vec3) -> DistanceRef<'_> {
        DistanceRef { gamma, v }
    }

    pub fn v(&self) -> Vec3 {
        self.v
    }
}

fn distance_jet(gamma: &dyn SphereField, v: &Vec3, theta: &Vec3) -> AmbientJet {
    let jet = DualMap::new(gamma).jet(theta);
    let d = jet.point - v;
    let mut hessian = jet.d.transpose() * jet.d;
    for k in 0..3 {
        hessian += jet.d2[k] * d[k];
    }
    AmbientJet {
        value: 0.5 * d.norm_squared(),
        gradient: jet.d.transpose() * d,
        hessian,
    }
}

impl SphereField for DistanceField {
    fn dimension(&self) -> usize {
        self.gamma.dimension()
    }
    fn ambient_jet(&self, theta: &Vec3) -> AmbientJet {
        distance_jet(&*self.gamma, &self.v, theta)
    }
    fn value(&self, theta: &Vec3) -> f64 {
        0.5 * (DualMap::new(&*self.gamma).point(theta) - self.v).norm_squared()
    }
    fn seed_degree(&self) -> usize {
        self.gamma.seed_degree()
    }
}

impl SphereField for DistanceRef<'_> {
    fn dimension(&self) -> usize {
        self.gamma.dimension()
    }
    fn ambient_jet(&self, theta: &Vec3) -> AmbientJet {
        distance_jet(self.gamma, &self.v, theta)
    }
}

/// (γ̃_v ∘ h_v)(θ) = ‖φ(θ) − v‖, with exact jets.
#[derive(Clone)]
pub struct TranslatedRadius(DistanceField);

impl TranslatedRadius {
    pub fn new(gamma: Arc<dyn SphereField>, v: Vec3) -> Self {
        Self(DistanceField::new(gamma, v))
    }
}

impl SphereField for TranslatedRadius {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }
    fn ambient_jet(&self, theta: &Vec3) -> AmbientJet {
        let f = self.0.ambient_jet(theta);
        let r = (2.0 * f.value).sqrt();
        AmbientJet {
            value: r,
            gradient: f.gradient / r,
            hessian: f.hessian / r - f.gradient * f.gradient.transpose() / (r * r * r),
        }
    }
    fn value(&self, theta: &Vec3) -> f64 {
        (2.0 * self.0.value(theta)).sqrt()
    }
    fn seed_degree(&self) -> usize {
        self.0.seed_degree()
    }
}

/// γ̃_v as a field on Sⁿ. Evaluation failures give NaN.
#[derive(Clone)]
pub struct TildeGamma(pub Arc<Translation>);

impl SphereField for TildeGamma {
    fn dimension(&self) -> usize {
        self.0.dim
    }
    fn ambient_jet(&self, u: &Vec3) -> AmbientJet {
        match self.0.gauge_jet(u) {
            Ok(j) => {
                let l = j.value;
                AmbientJet {
                    value: 1.0 / l,
                    gradient: -j.gradient / (l * l),
                    hessian: -j.hessian / (l * l) + j.gradient * j.gradient.transpose() * (2.0 / (l * l * l)),
                }
            }
            Err(_) => nan_jet(),
        }
    }
    fn value(&self, u: &Vec3) -> f64 {
        self.0.tilde_gamma(u).unwrap_or(f64::NAN)
    }
    fn seed_degree(&self) -> usize {
        self.0.gamma.seed_degree()
    }
}

/// γ_v(θ) = 1/γ̃_v(−θ) as a field on Sⁿ.
#[derive(Clone)]
pub struct PerturbedIntegrand(pub Arc<Translation>);

impl SphereField for PerturbedIntegrand {
    fn dimension(&self) -> usize {
        self.0.dim
    }
    fn ambient_jet(&self, theta: &Vec3) -> AmbientJet {
        match self.0.gauge_jet(&(-theta)) {
            Ok(j) => AmbientJet {
                value: j.value,
                gradient: -j.gradient,
                hessian: j.hessian,
            },
            Err(_) => nan_jet(),
        }
    }
    fn value(&self, theta: &Vec3) -> f64 {
        self.0.tilde_gamma(&(-theta)).map_or(f64::NAN, |r| 1.0 / r)
    }
    fn seed_degree(&self) -> usize {
        self.0.gamma.seed_degree()
    }
}

fn nan_jet() -> AmbientJet {
    AmbientJet {
        value: f64::NAN,
        gradient: Vec3::repeat(f64::NAN),
        hessian: Mat3::repeat(f64::NAN),
    }
}

/// h_v(θ) for a public caller.
pub fn h_v(gamma: Arc<dyn SphereField>, v: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
    let dim = gamma.dimension();
    let t = unit_direction(dim, theta)?;
    let tr = Translation::new(gamma, v)?;
    Ok(components(dim, &tr.h(&t)))
}

/// γ̃_v(u) for a public caller.
pub fn tilde_gamma(gamma: Arc<dyn SphereField>, v: &[f64], u: &[f64]) -> Result<f64> {
    let dim = gamma.dimension();
    let u = unit_direction(dim, u)?;
    Translation::new(gamma, v)?.tilde_gamma(&u)
}

/// F(v, θ) = ½‖φ(θ) − v‖².
pub fn distance_sq(gamma: &dyn SphereField, v: &[f64], theta: &[f64]) -> Result<f64> {
    let dim = gamma.dimension();
    let t = unit_direction(dim, theta)?;
    let v = vec_from(dim, v)?;
    Ok(0.5 * (DualMap::new(gamma).point(&t) - v).norm_squared())
}

/// Outcome of translating the dual body by v.
#[derive(Debug, Clone)]
pub struct PerturbationResult {
    pub v: Vec3,
    pub dimension: usize,
    /// γ̃_v on the sample grid.
    pub tilde: SampledFunction,
    /// γ_v on the same grid; `gamma_v(θ)·tilde(−θ) = 1` up to one rounding.
    pub gamma_v: SampledFunction,
    /// (θᵢ, h_v(θᵢ)) on the sample grid.
    pub h_table: Vec<(Vec3, Vec3)>,
    /// Stability of γ̃_v ∘ h_v (of γ itself when v = 0).
    pub verdict: StabilityVerdict,
    /// max over the grid of |γ_v − γ|.
    pub sup_distance: f64,
    /// dist(v, ∂W).
    pub margin: f64,
}

impl PerturbationResult {
    pub fn is_stable(&self) -> bool {
        self.verdict.status == Status::Stable
    }
}

/// Builds γ̃_v and γ_v on an antipodal grid of `m` directions and decides the
/// stability of γ̃_v ∘ h_v. v = 0 returns γ itself.
pub fn perturb(gamma: Arc<dyn SphereField>, v: &[f64], m: usize, cfg: &StabilityConfig) -> Result<PerturbationResult> {
    let dim = gamma.dimension();
    let vv = vec_from(dim, v)?;
    let grid = antipodal_grid(dim, m);
    let half = grid.len() / 2;
    let opposite = |i: usize| (i + half) % grid.len();

    if vv == Vec3::zeros() {
        let map = DualMap::new(&*gamma);
        let values = par::map(&grid, |t| gamma.value(t));
        let tilde_values: Vec<f64> = (0..grid.len()).map(|i| 1.0 / values[opposite(i)]).collect();
        let inradius = grid.iter().map(|t| map.point(t).norm()).fold(f64::INFINITY, f64::min);
        return Ok(PerturbationResult {
            v: vv,
            dimension: dim,
            tilde: SampledFunction::new(dim, grid.iter().copied().zip(tilde_values).collect())?,
            gamma_v: SampledFunction::new(dim, grid.iter().copied().zip(values).collect())?.with_exact(gamma.clone()),
            h_table: grid.iter().map(|t| (*t, *t)).collect(),
            verdict: is_stable(&*gamma, cfg),
            sup_distance: 0.0,
            margin: inradius,
        });
    }

    let tr = Arc::new(Translation::new(gamma.clone(), v)?);
    let tilde_values = par::map(&grid, |u| tr.tilde_gamma(u));
    let tilde_values = tilde_values.into_iter().collect::<Result<Vec<f64>>>()?;
    let gamma_values: Vec<f64> = (0..grid.len()).map(|i| 1.0 / tilde_values[opposite(i)]).collect();
    let sup_distance = grid
        .iter()
        .zip(&gamma_values)
        .map(|(t, gv)| (gv - gamma.value(t)).abs())
        .fold(0.0, f64::max);
    let h_table = grid.iter().map(|t| (*t, tr.h(t))).collect();
    let verdict = is_stable(&tr.radius_field(), cfg);
    Ok(PerturbationResult {
        v: vv,
        dimension: dim,
        tilde: SampledFunction::new(dim, grid.iter().copied().zip(tilde_values).collect())?
            .with_exact(Arc::new(TildeGamma(tr.clone()))),
        gamma_v: SampledFunction::new(dim, grid.iter().copied().zip(gamma_values).collect())?
            .with_exact(Arc::new(PerturbedIntegrand(tr.clone()))),
        h_table,
        verdict,
        sup_distance,
        margin: tr.margin(),
    })
}

#[derive(Debug, Clone)]
pub struct Stabilized {
    pub result: PerturbationResult,
    /// Number of perturbations tried (interior rejections are not counted).
    pub tries: usize,
}

/// Draws v uniformly from B(0, ε) ∩ int(W) (ChaCha8 seeded by `seed`) until
/// γ̃_v ∘ h_v is stable.
pub fn stabilize(
    gamma: Arc<dyn SphereField>,
    epsilon: f64,
    seed: u64,
    max_tries: usize,
    m: usize,
    cfg: &StabilityConfig,
) -> Result<Stabilized> {
    let dim = gamma.dimension();
    if epsilon == 0.0 {
        let result = perturb(gamma, &vec![0.0; dim + 1], m, cfg)?;
        return Ok(Stabilized { result, tries: 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::from("no draw landed in the interior");
    let mut tries = 0;
    let mut rejections = 0;
    while tries < max_tries {
        let v: Vec<f64> = loop {
            let c: Vec<f64> = (0..=dim).map(|_| rng.random_range(-epsilon..epsilon)).collect();
            let r2: f64 = c.iter().map(|x| x * x).sum();
            if r2 < epsilon * epsilon {
                break c;
            }
        };
        let result = match perturb(gamma.clone(), &v, m, cfg) {
            Ok(r) => r,
            Err(Error::OutOfInterior { .. }) => {
                rejections += 1;
                if rejections > 10_000 {
                    return Err(Error::TriesExhausted {
                        tries,
                        diagnosis: "B(0, ε) ∩ int(W) looks empty".into(),
                    });
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        tries += 1;
        if result.is_stable() {
            return Ok(Stabilized { result, tries });
        }
        last = format!(
            "v = {v:?}: {:?} ({})",
            result.verdict.status,
            result.verdict.diagnosis.clone().unwrap_or_default()
        );
    }
    Err(Error::TriesExhausted { tries, diagnosis: last })
}
