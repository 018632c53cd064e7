//! Caustics, symmetry sets and wave fronts of the dual boundary φ(Sⁿ).
//!
//! With f_v(θ) = ½‖φ(θ) − v‖², the caustic is the set of v for which f_v has
//! a degenerate critical point (the focal set φ + n/κᵢ), and the symmetry set
//! the set of v for which two distinct critical points share a value (centres
//! of circles tangent to φ at two points). Wave fronts are the inward offsets
//! φ_t = φ + t·n.

use std::collections::{HashMap, HashSet};

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::convexity::hull::turn;
use crate::convexity::DualMap;
use crate::error::{Error, Result};
use crate::par;
use crate::perturbation::DistanceField;
use crate::sphere_fn::SphereField;
use crate::tangent::{circle_point, sphere_grid, Vec3};

/// Centres of curvature closer than this (relative to the size of φ) count
/// as a single point.
const DEGENERATE_REL: f64 = 1e-9;
/// |det Hess f_v| ≤ CERTIFY_REL · det(metric) certifies a caustic point.
pub const CERTIFY_REL: f64 = 1e-6;
/// |κ|·(max radius) below this puts the caustic point at infinity.
const FLAT_REL: f64 = 1e-9;

/// φ, inward normal and curvature data at one source direction.
#[derive(Debug, Clone, Copy)]
struct Sample {
    theta: Vec3,
    point: Vec3,
    normal: Vec3,
    /// dφ/dt along the circle (n=1 only).
    tangent: Vec3,
    curvatures: [f64; 2],
}

fn sample<F: SphereField + ?Sized>(map: &DualMap<'_, F>, theta: &Vec3) -> Sample {
    let f = map.frame(theta);
    let mut curvatures = [f64::NAN; 2];
    curvatures[..f.curvatures.len()].copy_from_slice(&f.curvatures);
    Sample {
        theta: *theta,
        point: f.point,
        normal: f.normal,
        tangent: f.tangents[0],
        curvatures,
    }
}

fn sample_at<F: SphereField + ?Sized>(map: &DualMap<'_, F>, angle: f64) -> Sample {
    sample(map, &circle_point(angle))
}

fn samples<F: SphereField + ?Sized>(gamma: &F, m: usize) -> Vec<Sample> {
    let map = DualMap::new(gamma);
    par::map(&sphere_grid(gamma.dimension(), m), |t| sample(&map, t))
}

fn angle_of(i: usize, m: usize) -> f64 {
    std::f64::consts::TAU * i as f64 / m as f64
}

/// The common centre of curvature when φ(Sⁿ) is a round sphere.
fn umbilic_centre(s: &[Sample], dim: usize) -> Option<Vec3> {
    let scale = s.iter().map(|p| p.point.norm()).fold(0.0, f64::max);
    let mut centres = Vec::with_capacity(s.len() * dim);
    for p in s {
        for k in 0..dim {
            let kappa = p.curvatures[k];
            if kappa.abs() * scale < FLAT_REL {
                return None;
            }
            centres.push(p.point + p.normal / kappa);
        }
    }
    let mean = centres.iter().fold(Vec3::zeros(), |a, c| a + c) / centres.len() as f64;
    centres
        .iter()
        .all(|c| (c - mean).norm() <= DEGENERATE_REL * scale.max(1.0))
        .then_some(mean)
}

fn require_circle(dim: usize, what: &str) -> Result<()> {
    if dim != 1 {
        return Err(Error::Unsupported(format!("{what} is only available on S¹")));
    }
    Ok(())
}

/// φ_t(θᵢ) = φ(θᵢ) + t·n(θᵢ) on the standard grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontSample {
    pub t: f64,
    pub points: Vec<Vec3>,
    pub thetas: Vec<Vec3>,
    /// Where the offset map drops rank (1 − t·κ crosses or touches 0).
    pub singular: Vec<bool>,
}

/// Inward wave front at offset `t` on `m` samples. On S¹ a sample is flagged
/// when 1 − tκ vanishes there (to 1e−12) or changes sign before the next sample; on S²
/// when |1 − tκᵢ| < 1e−3 for a principal curvature.
pub fn wave_front<F: SphereField + ?Sized>(gamma: &F, t: f64, m: usize) -> FrontSample {
    let dim = gamma.dimension();
    let s = samples(gamma, m);
    let n = s.len();
    let factor = |i: usize, k: usize| 1.0 - t * s[i].curvatures[k];
    let singular = (0..n)
        .map(|i| {
            if dim == 1 {
                let (a, b) = (factor(i, 0), factor((i + 1) % n, 0));
                a.abs() <= 1e-12 || (a > 0.0) != (b > 0.0) && b.abs() > 1e-12
            } else {
                (0..2).any(|k| factor(i, k).abs() < 1e-3)
            }
        })
        .collect();
    FrontSample {
        t,
        points: s.iter().map(|p| p.point + p.normal * t).collect(),
        thetas: s.iter().map(|p| p.theta).collect(),
        singular,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausticPoint {
    pub point: Vec3,
    pub theta: Vec3,
    /// Principal direction index (always 0 on S¹).
    pub sheet: usize,
    /// |det Hess f_v(θ)| / det(metric).
    pub det_ratio: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Caustic {
    pub dimension: usize,
    pub points: Vec<CausticPoint>,
    /// Directions where κ ≈ 0 (caustic point at infinity).
    pub skipped: Vec<Vec3>,
    pub rotationally_degenerate: bool,
    /// Cusps of the evolute (S¹ only): centres of curvature at extrema of 1/κ.
    pub cusps: Vec<Vec3>,
}

/// |det Hess f_v(θ)| / det(g) at a point v on the normal line of θ.
fn det_ratio<F: SphereField + ?Sized>(gamma: &F, theta: &Vec3, v: &Vec3) -> f64 {
    let map = DualMap::new(gamma);
    let frame = map.frame(theta);
    let field = DistanceRefField { gamma, v: *v };
    let jet = field.jet(theta);
    (jet.hessian.determinant() / frame.metric.determinant()).abs()
}

struct DistanceRefField<'a, F: ?Sized> {
    gamma: &'a F,
    v: Vec3,
}

impl<F: SphereField + ?Sized> SphereField for DistanceRefField<'_, F> {
    fn dimension(&self) -> usize {
        self.gamma.dimension()
    }
    fn ambient_jet(&self, theta: &Vec3) -> crate::sphere_fn::AmbientJet {
        let jet = DualMap::new(self.gamma).jet(theta);
        let d = jet.point - self.v;
        let mut hessian = jet.d.transpose() * jet.d;
        for k in 0..3 {
            hessian += jet.d2[k] * d[k];
        }
        crate::sphere_fn::AmbientJet {
            value: 0.5 * d.norm_squared(),
            gradient: jet.d.transpose() * d,
            hessian,
        }
    }
}

/// Focal set φ + n/κᵢ on `m` samples, each point certified against the
/// definition. A round φ(Sⁿ) yields its single centre, flagged.
pub fn caustic<F: SphereField + ?Sized>(gamma: &F, m: usize) -> Caustic {
    let dim = gamma.dimension();
    let s = samples(gamma, m);
    if let Some(c) = umbilic_centre(&s, dim) {
        return Caustic {
            dimension: dim,
            points: vec![CausticPoint {
                point: c,
                theta: s[0].theta,
                sheet: 0,
                det_ratio: det_ratio(gamma, &s[0].theta, &c),
                certified: true,
            }],
            skipped: Vec::new(),
            rotationally_degenerate: true,
            cusps: Vec::new(),
        };
    }
    let scale = s.iter().map(|p| p.point.norm()).fold(0.0, f64::max);
    let per_sample = par::map(&s, |p| {
        let mut out = Vec::new();
        let mut flat = false;
        for k in 0..dim {
            let kappa = p.curvatures[k];
            if kappa.abs() * scale < FLAT_REL {
                flat = true;
                continue;
            }
            let v = p.point + p.normal / kappa;
            let ratio = det_ratio(gamma, &p.theta, &v);
            out.push(CausticPoint {
                point: v,
                theta: p.theta,
                sheet: k,
                det_ratio: ratio,
                certified: ratio <= CERTIFY_REL,
            });
        }
        (out, flat.then_some(p.theta))
    });
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (pts, flat) in per_sample {
        points.extend(pts);
        skipped.extend(flat);
    }
    let cusps = if dim == 1 { cusps(gamma, &s) } else { Vec::new() };
    Caustic {
        dimension: dim,
        points,
        skipped,
        rotationally_degenerate: false,
        cusps,
    }
}

/// Extrema of the radius of curvature, refined by golden-section search.
fn cusps<F: SphereField + ?Sized>(gamma: &F, s: &[Sample]) -> Vec<Vec3> {
    let map = DualMap::new(gamma);
    let m = s.len();
    let radius = |a: f64| 1.0 / sample_at(&map, a).curvatures[0];
    let mut out = Vec::new();
    for i in 0..m {
        let r = |k: usize| 1.0 / s[(k + m) % m].curvatures[0];
        let (a, b, c) = (r(i + m - 1), r(i), r(i + 1));
        let sign = if b > a && b >= c {
            1.0
        } else if b < a && b <= c {
            -1.0
        } else {
            continue;
        };
        // maximize sign·radius on [t_{i−1}, t_{i+1}]
        let (mut lo, mut hi) = (angle_of(i, m) - angle_of(1, m), angle_of(i, m) + angle_of(1, m));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (sign * radius(x1), sign * radius(x2));
        for _ in 0..80 {
            if f1 > f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = sign * radius(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = sign * radius(x2);
            }
        }
        let p = sample_at(&map, 0.5 * (lo + hi));
        out.push(p.point + p.normal / p.curvatures[0]);
    }
    out
}

/// Same family: the tangent circle lies on the inward side at both points
/// (v = φ₁ + r·n₁ = φ₂ + r·n₂); opposite: v = φ₁ + r·n₁ = φ₂ − r·n₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Same,
    Opposite,
}

impl Family {
    fn sign(self) -> f64 {
        match self {
            Family::Same => 1.0,
            Family::Opposite => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymPair {
    pub theta1: Vec3,
    pub theta2: Vec3,
    pub center: Vec3,
    /// Signed offset along n(θ₁); the common distance is |radius|.
    pub radius: f64,
    pub family: Family,
    /// Distance of `center` from the normal line at θ₂.
    pub normal_residual: f64,
    /// | ‖center − φ(θ₁)‖ − ‖center − φ(θ₂)‖ |.
    pub distance_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetrySet {
    pub pairs: Vec<SymPair>,
    pub rotationally_degenerate: bool,
    /// The single centre when degenerate.
    pub centre: Option<Vec3>,
}

impl SymmetrySet {
    pub fn points(&self) -> Vec<Vec3> {
        match self.centre {
            Some(c) => vec![c],
            None => self.pairs.iter().map(|p| p.center).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymOptions {
    pub samples: usize,
    /// Certification tolerance on both defining equations (relative to the
    /// size of φ).
    pub tol: f64,
    /// Largest |radius| kept; defaults to 2·max(1/κ).
    pub r_max: Option<f64>,
    /// Target spacing between consecutive centres on a branch; defaults to
    /// the mean sample spacing of φ.
    pub spacing: Option<f64>,
}

impl Default for SymOptions {
    fn default() -> Self {
        Self {
            samples: 2000,
            tol: 1e-8,
            r_max: None,
            spacing: None,
        }
    }
}

fn cross2(a: &Vec3, b: &Vec3) -> f64 {
    a.x * b.y - a.y * b.x
}

fn cyclic_gap(i: usize, j: usize, m: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(m - d)
}

fn mean_spacing(s: &[Sample]) -> f64 {
    let m = s.len();
    (0..m).map(|i| (s[(i + 1) % m].point - s[i].point).norm()).sum::<f64>() / m as f64
}

fn max_radius_of_curvature(s: &[Sample]) -> f64 {
    s.iter().map(|p| 1.0 / p.curvatures[0].abs()).fold(0.0, f64::max)
}

/// Newton on P(t₁) + r·N(t₁) = P(t₂) + s·r·N(t₂) for (t₂, r) with t₁ fixed.
fn solve_pair<F: SphereField + ?Sized>(
    map: &DualMap<'_, F>,
    p1: &Sample,
    family: Family,
    mut t2: f64,
    mut r: f64,
    tol: f64,
) -> Option<(f64, f64, Sample)> {
    let sg = family.sign();
    for _ in 0..30 {
        let p2 = sample_at(map, t2);
        let e = p1.point + p1.normal * r - p2.point - p2.normal * (sg * r);
        if e.norm() <= tol {
            return Some((t2, r, p2));
        }
        let col_t = -p2.tangent * (1.0 - sg * r * p2.curvatures[0]);
        let col_r = p1.normal - p2.normal * sg;
        let jac = Matrix2::new(col_t.x, col_r.x, col_t.y, col_r.y);
        let step = jac.lu().solve(&Vector2::new(-e.x, -e.y))?;
        if !step.iter().all(|c| c.is_finite()) {
            return None;
        }
        t2 += step[0].clamp(-0.1, 0.1);
        r += step[1];
    }
    None
}

fn make_pair(p1: &Sample, p2: &Sample, r: f64, family: Family) -> SymPair {
    let center = p1.point + p1.normal * r;
    SymPair {
        theta1: p1.theta,
        theta2: p2.theta,
        center,
        radius: r,
        family,
        normal_residual: cross2(&(center - p2.point), &p2.normal).abs(),
        distance_residual: ((center - p1.point).norm() - (center - p2.point).norm()).abs(),
    }
}

/// Symmetry set of φ(S¹) with default options.
pub fn symmetry_set<F: SphereField + ?Sized>(gamma: &F, m: usize, tol: f64) -> Result<SymmetrySet> {
    symmetry_set_with(
        gamma,
        &SymOptions {
            samples: m,
            tol,
            ..SymOptions::default()
        },
    )
}

/// For every grid angle t₁, scans t₂ for zeros of cross(φ₁ − φ₂, s·n₂ − n₁),
/// refines them by bisection and Newton, and continues each branch to the
/// next grid angle so that consecutive centres are at most `spacing` apart.
pub fn symmetry_set_with<F: SphereField + ?Sized>(gamma: &F, opts: &SymOptions) -> Result<SymmetrySet> {
    require_circle(gamma.dimension(), "the symmetry set")?;
    let m = opts.samples;
    let s = samples(gamma, m);
    if let Some(c) = umbilic_centre(&s, 1) {
        return Ok(SymmetrySet {
            pairs: Vec::new(),
            rotationally_degenerate: true,
            centre: Some(c),
        });
    }
    let scale = s.iter().map(|p| p.point.norm()).fold(0.0, f64::max);
    let r_max = opts.r_max.unwrap_or(2.0 * max_radius_of_curvature(&s));
    let spacing = opts.spacing.unwrap_or_else(|| mean_spacing(&s));
    let tol = opts.tol * scale.max(1.0);
    let map = DualMap::new(gamma);

    let per_row = par::map_range(m, |i| {
        let p1 = s[i];
        let mut found = Vec::new();
        for family in [Family::Same, Family::Opposite] {
            let sg = family.sign();
            let c = |p2: &Sample| cross2(&(p1.point - p2.point), &(p2.normal * sg - p1.normal));
            let vals: Vec<f64> = s.iter().map(&c).collect();
            for j in 0..m {
                let k = (j + 1) % m;
                if cyclic_gap(i, j, m) <= 2 || cyclic_gap(i, k, m) <= 2 {
                    continue;
                }
                let (ca, cb) = (vals[j], vals[k]);
                // symmetric curves put exact zeros on grid nodes
                let t2 = if ca == 0.0 {
                    angle_of(j, m)
                } else if cb != 0.0 && (ca > 0.0) != (cb > 0.0) {
                    let (mut lo, mut hi) = (angle_of(j, m), angle_of(j, m) + angle_of(1, m));
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        let cm = c(&sample_at(&map, mid));
                        if (cm > 0.0) == (ca > 0.0) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    0.5 * (lo + hi)
                } else {
                    continue;
                };
                let p2 = sample_at(&map, t2);
                let delta = p2.normal * sg - p1.normal;
                if delta.norm() < 1e-12 {
                    continue;
                }
                let r = (p1.point - p2.point).dot(&delta) / delta.norm_squared();
                if let Some((t2, r, p2)) = solve_pair(&map, &p1, family, t2, r, 1e-13 * scale.max(1.0)) {
                    if r.abs() <= r_max && (p1.point - p2.point).norm() > 1e-9 * scale {
                        found.push((family, t2, r, p2));
                    }
                }
            }
        }
        // continue each branch towards t₁ of the next grid angle
        let mut out = Vec::new();
        for (family, t2, r, p2) in found {
            let pair = make_pair(&p1, &p2, r, family);
            let start = pair.center;
            out.push(pair);
            let t1 = angle_of(i, m);
            let step = angle_of(1, m);
            let next = sample_at(&map, t1 + step);
            let Some((_, r_next, p2_next)) = solve_pair(&map, &next, family, t2, r, 1e-13 * scale.max(1.0)) else {
                continue;
            };
            let end = next.point + next.normal * r_next;
            let gap = (end - start).norm();
            if gap <= spacing || gap > 20.0 * spacing.max(step * scale) || (p2_next.point - next.point).norm() < 1e-9 {
                continue;
            }
            let pieces = (gap / spacing).ceil() as usize;
            let (mut t2c, mut rc) = (t2, r);
            for q in 1..pieces {
                let p1q = sample_at(&map, t1 + step * q as f64 / pieces as f64);
                match solve_pair(&map, &p1q, family, t2c, rc, 1e-13 * scale.max(1.0)) {
                    Some((t2n, rn, p2n)) if rn.abs() <= r_max => {
                        out.push(make_pair(&p1q, &p2n, rn, family));
                        t2c = t2n;
                        rc = rn;
                    }
                    _ => break,
                }
            }
        }
        out
    });

    let mut pairs: Vec<SymPair> = per_row
        .into_iter()
        .flatten()
        .filter(|p| p.normal_residual <= tol && p.distance_residual <= tol)
        .collect();
    dedup_by_center(&mut pairs, 1e-12 * scale.max(1.0));
    Ok(SymmetrySet {
        pairs,
        rotationally_degenerate: false,
        centre: None,
    })
}

fn dedup_by_center(pairs: &mut Vec<SymPair>, tol: f64) {
    let key = |p: &Vec3| ((p.x / tol).round() as i64, (p.y / tol).round() as i64);
    let mut seen = HashSet::new();
    pairs.retain(|p| seen.insert(key(&p.center)));
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontCrossing {
    pub point: Vec3,
    pub t: f64,
    pub theta1: Vec3,
    pub theta2: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontSweep {
    pub crossings: Vec<FrontCrossing>,
    pub t_range: (f64, f64),
    /// Number of fronts examined, including adaptive refinements.
    pub fronts: usize,
    pub rotationally_degenerate: bool,
    pub centre: Option<Vec3>,
}

impl FrontSweep {
    pub fn points(&self) -> Vec<Vec3> {
        match self.centre {
            Some(c) => vec![c],
            None => self.crossings.iter().map(|c| c.point).collect(),
        }
    }
}

/// Default t-range [0, 2·max 1/κ] of the front sweep.
pub fn default_t_range<F: SphereField + ?Sized>(gamma: &F, m: usize) -> (f64, f64) {
    (0.0, 2.0 * max_radius_of_curvature(&samples(gamma, m)))
}

/// Proper crossings between non-adjacent segments of the closed polyline.
fn self_crossings(points: &[Vec3]) -> Vec<(usize, usize, f64, f64)> {
    let m = points.len();
    let seg_len = (0..m)
        .map(|i| (points[(i + 1) % m] - points[i]).norm())
        .fold(0.0, f64::max);
    if seg_len == 0.0 {
        return Vec::new();
    }
    let cell = 2.0 * seg_len;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for i in 0..m {
        let (a, b) = (points[i], points[(i + 1) % m]);
        let (x0, x1) = ((a.x.min(b.x) / cell).floor() as i64, (a.x.max(b.x) / cell).floor() as i64);
        let (y0, y1) = ((a.y.min(b.y) / cell).floor() as i64, (a.y.max(b.y) / cell).floor() as i64);
        for x in x0..=x1 {
            for y in y0..=y1 {
                grid.entry((x, y)).or_default().push(i);
            }
        }
    }
    let mut keys: Vec<_> = grid.keys().copied().collect();
    keys.sort_unstable();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for key in keys {
        let segs = &grid[&key];
        for (x, &i) in segs.iter().enumerate() {
            for &j in &segs[x + 1..] {
                if cyclic_gap(i, j, m) <= 2 || !seen.insert((i.min(j), i.max(j))) {
                    continue;
                }
                let (a, b) = (points[i], points[(i + 1) % m]);
                let (c, d) = (points[j], points[(j + 1) % m]);
                let (o1, o2) = (turn(&a, &b, &c), turn(&a, &b, &d));
                let (o3, o4) = (turn(&c, &d, &a), turn(&c, &d, &b));
                if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                    out.push((i.min(j), i.max(j), o3 / (o3 - o4), o1 / (o1 - o2)));
                }
            }
        }
    }
    out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    out
}

/// Newton on φ_t(a₁) = φ_t(a₂) in the two angles.
fn polish_crossing<F: SphereField + ?Sized>(
    map: &DualMap<'_, F>,
    t: f64,
    mut a1: f64,
    mut a2: f64,
    tol: f64,
) -> Option<(f64, f64, Vec3)> {
    for _ in 0..30 {
        let (p, q) = (sample_at(map, a1), sample_at(map, a2));
        let e = p.point + p.normal * t - q.point - q.normal * t;
        if e.norm() <= tol {
            return Some((a1, a2, p.point + p.normal * t));
        }
        let c1 = p.tangent * (1.0 - t * p.curvatures[0]);
        let c2 = -q.tangent * (1.0 - t * q.curvatures[0]);
        let jac = Matrix2::new(c1.x, c2.x, c1.y, c2.y);
        let step = jac.lu().solve(&Vector2::new(-e.x, -e.y))?;
        if !step.iter().all(|c| c.is_finite()) {
            return None;
        }
        a1 += step[0].clamp(-0.05, 0.05);
        a2 += step[1].clamp(-0.05, 0.05);
    }
    None
}

fn front_crossings<F: SphereField + ?Sized>(map: &DualMap<'_, F>, s: &[Sample], t: f64, scale: f64) -> Vec<FrontCrossing> {
    let m = s.len();
    let pts: Vec<Vec3> = s.iter().map(|p| p.point + p.normal * t).collect();
    let h = angle_of(1, m);
    self_crossings(&pts)
        .into_iter()
        .filter_map(|(i, j, si, sj)| {
            let (a1, a2) = (angle_of(i, m) + si * h, angle_of(j, m) + sj * h);
            let (b1, b2, point) = polish_crossing(map, t, a1, a2, 1e-12 * scale.max(1.0))?;
            let gap = (b1 - b2).rem_euclid(std::f64::consts::TAU);
            let gap = gap.min(std::f64::consts::TAU - gap);
            (gap > 2.5 * h).then(|| FrontCrossing {
                point,
                t,
                theta1: circle_point(b1),
                theta2: circle_point(b2),
            })
        })
        .collect()
}

fn set_distance(a: &[FrontCrossing], b: &[FrontCrossing]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let one_way = |x: &[FrontCrossing], y: &[FrontCrossing]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p.point - q.point).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Sym(φ) as the union over t of front self-intersections φ_t(θ₁) = φ_t(θ₂).
///
/// Fronts are swept over `t_range` with steps no larger than `step` (default:
/// the mean sample spacing); an interval is bisected (up to 24 levels) while
/// the crossing sets at its ends differ by more than that spacing.
pub fn sym_via_fronts<F: SphereField + ?Sized>(
    gamma: &F,
    t_range: (f64, f64),
    m: usize,
    step: Option<f64>,
) -> Result<FrontSweep> {
    require_circle(gamma.dimension(), "the front sweep")?;
    let s = samples(gamma, m);
    if let Some(c) = umbilic_centre(&s, 1) {
        return Ok(FrontSweep {
            crossings: Vec::new(),
            t_range,
            fronts: 0,
            rotationally_degenerate: true,
            centre: Some(c),
        });
    }
    let scale = s.iter().map(|p| p.point.norm()).fold(0.0, f64::max);
    let spacing = mean_spacing(&s);
    let dt = step.unwrap_or(spacing).min(spacing);
    let (a, b) = t_range;
    let n = (((b - a) / dt).ceil() as usize).max(1);
    let ts: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    let map = DualMap::new(gamma);
    let base = par::map(&ts, |&t| front_crossings(&map, &s, t, scale));

    let refined = par::map_range(n, |k| {
        let mut extra = Vec::new();
        let mut count = 0;
        let mut stack = vec![(ts[k], base[k].clone(), ts[k + 1], base[k + 1].clone(), 0)];
        while let Some((t0, c0, t1, c1, depth)) = stack.pop() {
            if depth >= 24 || set_distance(&c0, &c1) <= spacing {
                continue;
            }
            let tm = 0.5 * (t0 + t1);
            let cm = front_crossings(&map, &s, tm, scale);
            count += 1;
            extra.extend(cm.iter().cloned());
            stack.push((tm, cm.clone(), t1, c1, depth + 1));
            stack.push((t0, c0, tm, cm, depth + 1));
        }
        (extra, count)
    });

    let mut crossings: Vec<FrontCrossing> = base.into_iter().flatten().collect();
    let mut fronts = ts.len();
    for (extra, count) in refined {
        crossings.extend(extra);
        fronts += count;
    }
    Ok(FrontSweep {
        crossings,
        t_range,
        fronts,
        rotationally_degenerate: false,
        centre: None,
    })
}

/// Hausdorff distance between two finite point sets (∞ if exactly one is empty).
pub fn hausdorff(a: &[Vec3], b: &[Vec3]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one_way = |x: &[Vec3], y: &[Vec3]| {
        par::map(x, |p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .into_iter()
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Distance-squared field of φ from `v`, owned.
pub fn distance_field(gamma: std::sync::Arc<dyn SphereField>, v: Vec3) -> DistanceField {
    DistanceField::new(gamma, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::sphere_fn::{critical_points, SolverConfig};

    #[test]
    fn circle_fronts() {
        let g = corpus::round(1);
        let f = wave_front(&g, 1.0, 64);
        assert!(f.points.iter().all(|p| p.norm() < 1e-14));
        assert!(f.singular.iter().all(|s| *s));
        let f = wave_front(&g, 0.5, 64);
        assert!(f.points.iter().all(|p| (p.norm() - 0.5).abs() < 1e-15));
        assert!(f.singular.iter().all(|s| !*s));
    }

    #[test]
    fn ellipse_front_first_cusp_at_vertex() {
        let g = corpus::ellipse_dual(2.0, 1.0);
        // κ_max = a/b² = 2 at (±2, 0): the front first becomes singular at t = 1/2
        let before = wave_front(&g, 0.49, 400);
        assert!(before.singular.iter().all(|s| !*s));
        let at = wave_front(&g, 0.5, 400);
        let flagged: Vec<usize> = (0..400).filter(|&i| at.singular[i]).collect();
        assert!(flagged.iter().all(|&i| [0, 200, 399, 199].contains(&i)), "{flagged:?}");
        assert!(flagged.contains(&0) && (flagged.contains(&200) || flagged.contains(&199)));
    }

    #[test]
    fn circle_caustic_is_its_centre() {
        let c = caustic(&corpus::round(1), 100);
        assert!(c.rotationally_degenerate);
        assert_eq!(c.points.len(), 1);
        assert!(c.points[0].point.norm() < 1e-14);
        let c = caustic(&corpus::round(2), 200);
        assert!(c.rotationally_degenerate && c.points[0].point.norm() < 1e-14, "{:?}", &c.points[..2.min(c.points.len())]);
    }

    #[test]
    fn ellipse_evolute_and_cusps() {
        let c = caustic(&corpus::ellipse_dual(2.0, 1.0), 1000);
        assert!(c.points.iter().all(|p| p.certified));
        for p in &c.points {
            // evolute: (x/1.5)^{2/3} + (y/3)^{2/3} = 1
            let lhs = (p.point.x.abs() / 1.5).powf(2.0 / 3.0) + (p.point.y.abs() / 3.0).powf(2.0 / 3.0);
            assert!((lhs - 1.0).abs() < 1e-9);
        }
        assert_eq!(c.cusps.len(), 4);
        for want in [Vec3::new(1.5, 0.0, 0.0), Vec3::new(-1.5, 0.0, 0.0), Vec3::new(0.0, 3.0, 0.0), Vec3::new(0.0, -3.0, 0.0)] {
            assert!(c.cusps.iter().any(|q| (q - want).norm() < 1e-9), "{want}");
        }
    }

    #[test]
    fn caustic_points_are_degenerate_for_f_v() {
        for g in [corpus::ellipsoid_dual(2.0, 1.5, 1.0)] {
            let c = caustic(&g, 300);
            assert!(!c.rotationally_degenerate);
            assert_eq!(c.points.len(), 600);
            assert!(c.points.iter().all(|p| p.certified), "{:?}", c.points.iter().map(|p| p.det_ratio).fold(0.0, f64::max));
        }
    }

    #[test]
    fn ellipse_symmetry_set_lies_on_axes() {
        let sym = symmetry_set(&corpus::ellipse_dual(2.0, 1.0), 400, 1e-8).unwrap();
        assert!(!sym.pairs.is_empty());
        for p in &sym.pairs {
            let c = p.center;
            let on_major = c.y.abs() < 1e-9 && c.x.abs() < 1.5;
            let on_minor = c.x.abs() < 1e-9 && c.y.abs() < 3.0;
            assert!(on_major || on_minor, "{c}");
            assert_eq!(p.family, Family::Same);
        }
        let major = sym.pairs.iter().filter(|p| p.center.y.abs() < 1e-9).count();
        assert!(major > 0 && major < sym.pairs.len());
    }

    #[test]
    fn sym_pairs_are_equal_valued_critical_points() {
        let g = corpus::limacon_dual(1, 0.2);
        let sym = symmetry_set(&g, 300, 1e-8).unwrap();
        let gamma = crate::perturbation::shared(g);
        for p in sym.pairs.iter().step_by(37) {
            let f = distance_field(gamma.clone(), p.center);
            let (j1, j2) = (f.jet(&p.theta1), f.jet(&p.theta2));
            assert!(j1.gradient.norm() < 1e-8 && j2.gradient.norm() < 1e-8);
            assert!((j1.value - j2.value).abs() < 1e-8);
        }
    }

    #[test]
    fn limacon_symmetry_axis() {
        // ρ = 1 + 0.2 cos t is symmetric about the x-axis
        let sym = symmetry_set(&corpus::limacon_dual(1, 0.2), 400, 1e-8).unwrap();
        let on_axis = sym.pairs.iter().filter(|p| p.center.y.abs() < 1e-9).count();
        assert!(on_axis > 20);
    }

    #[test]
    fn fronts_of_circle_and_ellipse() {
        let s = sym_via_fronts(&corpus::round(1), (0.0, 2.0), 200, None).unwrap();
        assert!(s.rotationally_degenerate && s.points().len() == 1 && s.points()[0].norm() < 1e-14);
        let g = corpus::ellipse_dual(2.0, 1.0);
        let sweep = sym_via_fronts(&g, (0.0, 2.2), 400, None).unwrap();
        assert!(!sweep.crossings.is_empty());
        for c in &sweep.crossings {
            let on_axis = c.point.y.abs() < 1e-9 || c.point.x.abs() < 1e-9;
            assert!(on_axis, "{:?}", c.point);
        }
    }

    #[test]
    fn fronts_agree_with_pair_scan_on_ellipse() {
        let g = corpus::ellipse_dual(2.0, 1.0);
        let m = 600;
        let range = default_t_range(&g, m);
        assert!((range.1 - 8.0).abs() < 1e-9);
        let sym = symmetry_set(&g, m, 1e-8).unwrap();
        let sweep = sym_via_fronts(&g, range, m, None).unwrap();
        let d = hausdorff(&sym.points(), &sweep.points());
        let spacing = 2.0 * std::f64::consts::PI * 1.5 / m as f64;
        assert!(d <= 5.0 * spacing, "{d}");
    }

    #[test]
    fn stabilized_round_has_no_centre_at_origin() {
        let cfg = crate::stability::StabilityConfig::default();
        let r = crate::perturbation::stabilize(crate::perturbation::shared(corpus::round(1)), 0.1, 3, 3, 360, &cfg).unwrap();
        let sym = symmetry_set(&r.result.gamma_v, 200, 1e-8).unwrap();
        let pts = sym.points();
        assert!(pts.iter().all(|p| p.norm() > 1e-6));
        // φ_v is the unit circle centred at −v
        assert!(sym.rotationally_degenerate);
        assert!((pts[0] + r.result.v).norm() < 1e-9);
    }

    #[test]
    fn round_symmetry_set_inside_caustic() {
        let g = corpus::round(2);
        let c = caustic(&g, 100);
        let census = critical_points(&crate::perturbation::TranslatedRadius::new(crate::perturbation::shared(g), c.points[0].point + Vec3::new(0.1, 0.0, 0.0)), &SolverConfig::default()).unwrap();
        assert_eq!(census.len(), 2);
        let sym = symmetry_set(&corpus::round(1), 100, 1e-8).unwrap();
        let cc = caustic(&corpus::round(1), 100);
        assert_eq!(sym.points().len(), 1);
        assert!((sym.points()[0] - cc.points[0].point).norm() < 1e-12);
    }
}
