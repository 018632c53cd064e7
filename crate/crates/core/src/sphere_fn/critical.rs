use nalgebra::Vector2;

use super::{Jet, SphereField};
use crate::error::{Error, Result};
use crate::par;
use crate::tangent::{retract, sphere_grid, Vec3};

/// Newton solver and classification settings for [`critical_points`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Converged when ‖∇f‖ ≤ residual_tol·(1 + |f|).
    pub residual_tol: f64,
    /// Chordal distance under which two converged points are merged.
    pub merge_radius: f64,
    /// Degeneracy threshold on min |eigenvalue|, relative to the largest
    /// Hessian entry over the census.
    pub nd_rel_tol: f64,
    pub max_iter: usize,
    /// Largest tangent step per Newton iteration (radians).
    pub max_step: f64,
    /// Overrides the degree-based seed count.
    pub seeds: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            merge_radius: 1e-6,
            nd_rel_tol: 1e-8,
            max_iter: 100,
            max_step: 0.3,
            seeds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nondegeneracy {
    Nondegenerate,
    /// Margin within a factor 10 of the threshold.
    Indeterminate,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub theta: Vec3,
    pub value: f64,
    /// Number of negative eigenvalues of the intrinsic Hessian.
    pub index: usize,
    /// min |eigenvalue| of the intrinsic Hessian.
    pub margin: f64,
    /// ‖intrinsic gradient‖ at `theta`.
    pub residual: f64,
    pub class: Nondegeneracy,
    pub hessian_scale: f64,
}

/// χ(Sⁿ).
pub fn euler_characteristic(n: usize) -> i64 {
    if n % 2 == 0 {
        2
    } else {
        0
    }
}

/// Seed grid size for a field of the given degree.
pub fn seed_count(dim: usize, degree: usize) -> usize {
    let d2 = degree * degree;
    if dim == 1 {
        (8 * d2).max(64)
    } else {
        (32 * d2).max(512)
    }
}

fn newton<F: SphereField + ?Sized>(f: &F, seed: &Vec3, cfg: &SolverConfig) -> Option<(Vec3, Jet)> {
    let mut theta = *seed;
    for _ in 0..cfg.max_iter {
        let jet = f.jet(&theta);
        if !jet.value.is_finite() {
            return None;
        }
        if jet.gradient.norm() <= cfg.residual_tol * (1.0 + jet.value.abs()) {
            return Some((theta, jet));
        }
        let g = jet.basis.coords(&jet.gradient);
        let mut step = jet.hessian.solve(&(-g)).unwrap_or(-g);
        let len = step.norm();
        if !len.is_finite() {
            return None;
        }
        if len > cfg.max_step {
            step *= cfg.max_step / len;
        }
        theta = retract(&theta, &jet.basis, &Vector2::new(step[0], step[1]));
    }
    let jet = f.jet(&theta);
    (jet.gradient.norm() <= cfg.residual_tol * (1.0 + jet.value.abs())).then_some((theta, jet))
}

/// Critical-point census by Newton's method from a dense seed grid.
///
/// Seeds that do not converge are dropped. Returns
/// [`Error::IncompleteCensus`] when any point is degenerate or the Morse
/// counts violate Σ(−1)^λ C_λ = χ(Sⁿ).
pub fn critical_points<F: SphereField + ?Sized>(f: &F, cfg: &SolverConfig) -> Result<Vec<CriticalPoint>> {
    let dim = f.dimension();
    let n_seeds = cfg.seeds.unwrap_or_else(|| seed_count(dim, f.seed_degree()));
    let seeds = sphere_grid(dim, n_seeds);
    let solved = par::map(&seeds, |s| newton(f, s, cfg));

    let mut found: Vec<(Vec3, Jet)> = Vec::new();
    for (theta, jet) in solved.into_iter().flatten() {
        if found.iter().all(|(p, _)| (p - theta).norm() > cfg.merge_radius) {
            found.push((theta, jet));
        }
    }

    let scale = found
        .iter()
        .map(|(_, j)| j.hessian.max_abs_entry())
        .fold(0.0f64, f64::max);
    let threshold = cfg.nd_rel_tol * scale;
    let mut points: Vec<CriticalPoint> = found
        .into_iter()
        .map(|(theta, jet)| {
            let ev = jet.hessian.eigenvalues();
            let margin = ev.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
            let class = if margin <= threshold {
                Nondegeneracy::Degenerate
            } else if margin < 10.0 * threshold {
                Nondegeneracy::Indeterminate
            } else {
                Nondegeneracy::Nondegenerate
            };
            CriticalPoint {
                theta,
                value: jet.value,
                index: ev.iter().filter(|e| **e < 0.0).count(),
                margin,
                residual: jet.gradient.norm(),
                class,
                hessian_scale: scale,
            }
        })
        .collect();
    points.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.theta.x.total_cmp(&b.theta.x))
            .then(a.theta.y.total_cmp(&b.theta.y))
            .then(a.theta.z.total_cmp(&b.theta.z))
    });

    let degenerate = points
        .iter()
        .filter(|p| p.class == Nondegeneracy::Degenerate)
        .count();
    if points.is_empty() {
        return Err(Error::IncompleteCensus {
            reason: "no critical point converged".into(),
            partial: points,
        });
    }
    if degenerate > 0 {
        return Err(Error::IncompleteCensus {
            reason: format!("{degenerate} degenerate critical points"),
            partial: points,
        });
    }
    let euler: i64 = points
        .iter()
        .map(|p| if p.index % 2 == 0 { 1 } else { -1 })
        .sum();
    if euler != euler_characteristic(dim) {
        return Err(Error::IncompleteCensus {
            reason: format!(
                "euler check failed: alternating count {euler}, expected {}",
                euler_characteristic(dim)
            ),
            partial: points,
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_fn::SphereFunction;
    use crate::tangent::circle_point;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    /// Critical angles of t ↦ f(cos t, sin t) by sign changes of a central
    /// difference derivative on a uniform grid, refined by bisection.
    fn brute_force_circle(f: &SphereFunction, samples: usize) -> Vec<(f64, f64)> {
        let h = 1e-7;
        let d = |t: f64| f.value(&circle_point(t + h)) - f.value(&circle_point(t - h));
        let dt = TAU / samples as f64;
        let mut out = Vec::new();
        for i in 0..samples {
            let (mut a, mut b) = (i as f64 * dt - 0.5 * dt, (i as f64 + 0.5) * dt);
            let (mut da, db) = (d(a), d(b));
            if da == 0.0 || da.signum() == db.signum() {
                continue;
            }
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let dm = d(m);
                if dm.signum() == da.signum() {
                    a = m;
                    da = dm;
                } else {
                    b = m;
                }
            }
            let t = 0.5 * (a + b);
            out.push((t.rem_euclid(TAU), f.value(&circle_point(t))));
        }
        out
    }

    #[test]
    fn two_plus_x_has_two_points() {
        let f = SphereFunction::from_terms(1, &[(&[0, 0], 2.0), (&[1, 0], 1.0)], 1.0).unwrap();
        let oracle = brute_force_circle(&f, 1_000_000);
        assert_eq!(oracle.len(), 2);
        let cps = critical_points(&f, &SolverConfig::default()).unwrap();
        assert_eq!(cps.len(), 2);
        // sorted by value: minimum at (−1, 0), maximum at (1, 0)
        assert!((cps[0].theta - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-10);
        assert_eq!((cps[0].value, cps[0].index), (1.0, 0));
        assert!((cps[1].theta - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-10);
        assert_eq!((cps[1].value, cps[1].index), (3.0, 1));
        for (t, v) in oracle {
            assert!(cps.iter().any(|c| (c.theta - circle_point(t)).norm() < 1e-6 && (c.value - v).abs() < 1e-9));
        }
    }

    #[test]
    fn constant_is_incomplete() {
        let f = SphereFunction::constant(1, 1.0);
        match critical_points(&f, &SolverConfig::default()) {
            Err(Error::IncompleteCensus { partial, .. }) => {
                assert!(!partial.is_empty());
                assert!(partial.iter().all(|p| p.class == Nondegeneracy::Degenerate));
            }
            other => panic!("expected incomplete census, got {other:?}"),
        }
    }

    #[test]
    fn cos_two_t_has_four_points() {
        let f = SphereFunction::from_terms(1, &[(&[2, 0], 1.0), (&[0, 2], -1.0)], 1.0).unwrap();
        let cps = critical_points(&f, &SolverConfig::default()).unwrap();
        assert_eq!(cps.len(), 4);
        for (t, v, idx) in [(0.0, 1.0, 1), (FRAC_PI_2, -1.0, 0), (PI, 1.0, 1), (3.0 * FRAC_PI_2, -1.0, 0)] {
            let c = cps
                .iter()
                .find(|c| (c.theta - circle_point(t)).norm() < 1e-9)
                .expect("missing critical point");
            assert!((c.value - v).abs() < 1e-12);
            assert_eq!(c.index, idx);
        }
    }

    #[test]
    fn triaxial_gauge_on_s2() {
        let f = SphereFunction::from_terms(
            2,
            &[(&[2, 0, 0], 1.0 / 4.0), (&[0, 2, 0], 1.0 / 2.25), (&[0, 0, 2], 1.0)],
            0.5,
        )
        .unwrap();
        let cps = critical_points(&f, &SolverConfig::default()).unwrap();
        assert_eq!(cps.len(), 6);
        let mut idx: Vec<usize> = cps.iter().map(|c| c.index).collect();
        idx.sort();
        assert_eq!(idx, vec![0, 0, 1, 1, 2, 2]);
        assert!(cps.iter().all(|c| c.residual <= 1e-10 * (1.0 + c.value.abs())));
    }

    #[test]
    fn index_invariant_under_constant_shift() {
        let f = SphereFunction::from_terms(2, &[(&[1, 0, 0], 1.0), (&[0, 2, 0], 2.0), (&[0, 0, 2], 3.0)], 1.0).unwrap();
        let g = f.affine(1.0, 7.5).unwrap();
        let a = critical_points(&f, &SolverConfig::default()).unwrap();
        let b = critical_points(&g, &SolverConfig::default()).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert!((p.theta - q.theta).norm() < 1e-8);
            assert_eq!(p.index, q.index);
            assert!((q.value - p.value - 7.5).abs() < 1e-12);
        }
    }
}
