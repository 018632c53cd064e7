//! Acceptance suite: one PASS/FAIL line per criterion, then a determinism
//! rerun comparing the JSON reports byte for byte.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use wulffkit::caustic::{self, hausdorff};
use wulffkit::convexity::{is_convex_integrand, Verdict};
use wulffkit::corpus;
use wulffkit::perturbation::{self, gauge, shared, stabilize, tilde_gamma_ray, DistanceField, Translation};
use wulffkit::stability::{self, index_lemma_counts, is_stable, extremal_index_check, LemmaOutcome, MorseVector, StabilityConfig, Status};
use wulffkit::sphere_fn::components;
use wulffkit::tangent::{circle_point, sphere_grid, Vec3};
use wulffkit::{SphereField, SphereFunction};

struct Outcome {
    pass: bool,
    summary: String,
    report: Value,
}

fn all_s1_s2() -> Vec<(&'static str, SphereFunction)> {
    let mut c = corpus::positive_s1();
    c.extend(corpus::positive_s2());
    c
}

/// Uniform draw from the bounding cube of W, kept when strictly inside.
fn draw_interior(gamma: &dyn SphereField, rng: &mut ChaCha8Rng, shrink: f64) -> Vec3 {
    let dim = gamma.dimension();
    let r = sphere_grid(dim, 400)
        .iter()
        .map(|t| 1.0 / gamma.value(&(-t)))
        .fold(0.0, f64::max);
    loop {
        let mut v = Vec3::zeros();
        for k in 0..=dim {
            v[k] = rng.random_range(-r..r);
        }
        if gauge(gamma, &v) < shrink {
            return v;
        }
    }
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let corpus = all_s1_s2();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let (name, g) = &corpus[i % corpus.len()];
        let gamma = shared(g.clone());
        let dim = g.dimension();
        let v = draw_interior(&*gamma, &mut rng, 0.9);
        let tr = Translation::new(gamma.clone(), &components(dim, &v)).expect("drawn inside W");
        let grid = sphere_grid(g.dimension(), if g.dimension() == 1 { 720 } else { 2000 });
        let devs: Vec<(f64, f64)> = grid
            .par_iter()
            .map(|theta| {
                let f = perturbation::distance_sq(&*gamma, &components(dim, &v), &components(dim, theta)).unwrap();
                let u = tr.h(theta);
                let lib = tr.tilde_gamma(&u).unwrap();
                // independent route: bisect along the ray u from v for the gauge level set
                let ray = tilde_gamma_ray(&*gamma, &v, &u);
                ((f - 0.5 * lib * lib).abs(), (f - 0.5 * ray * ray).abs())
            })
            .collect();
        let lib = devs.iter().map(|d| d.0).fold(0.0, f64::max);
        let ray = devs.iter().map(|d| d.1).fold(0.0, f64::max);
        worst = worst.max(lib).max(ray);
        rows.push(json!({ "gamma": name, "v": components(dim, &v), "max_dev_newton": lib, "max_dev_ray": ray }));
    }
    let elapsed = started.elapsed();
    let pass = worst <= 1e-8 && elapsed <= Duration::from_secs(30);
    Outcome {
        pass,
        summary: format!("identity suite: max |F − H∘γ̃_v∘h_v| = {worst:.2e} (≤ 1e-8), {:.1}s (≤ 30s)", elapsed.as_secs_f64()),
        report: json!({ "pairs": rows, "max_deviation": worst }),
    }
}

fn criterion_2() -> Outcome {
    let cfg = StabilityConfig::default();
    let mut rows = Vec::new();
    let mut pass = true;
    let mut worst_sup: f64 = 0.0;
    let mut worst_tries = 0;
    for dim in [1, 2] {
        let m = if dim == 1 { perturbation::TABLE_S1 } else { perturbation::TABLE_S2 };
        for seed in 0..50u64 {
            let gamma = shared(corpus::round(dim));
            let row = match stabilize(gamma, 0.1, seed, 3, m, &cfg) {
                Ok(s) => {
                    let census = &s.result.verdict.census;
                    let distinct = census.len() == 2 && (census[0].value - census[1].value).abs() > 1e-8;
                    let ok = s.result.is_stable() && distinct && s.tries <= 3 && s.result.sup_distance <= 0.25;
                    pass &= ok;
                    worst_sup = worst_sup.max(s.result.sup_distance);
                    worst_tries = worst_tries.max(s.tries);
                    json!({ "dim": dim, "seed": seed, "tries": s.tries, "critical_points": census.len(),
                            "values": census.iter().map(|c| c.value).collect::<Vec<_>>(),
                            "sup_distance": s.result.sup_distance, "ok": ok })
                }
                Err(e) => {
                    pass = false;
                    json!({ "dim": dim, "seed": seed, "error": e.to_string() })
                }
            };
            rows.push(row);
        }
    }
    Outcome {
        pass,
        summary: format!(
            "stabilize round S¹/S², ε=0.1, 50 seeds each: max tries {worst_tries} (≤ 3), max ‖γ_v − γ‖∞ = {worst_sup:.4} (≤ 0.25)"
        ),
        report: json!({ "runs": rows }),
    }
}

fn criterion_3() -> Outcome {
    let cfg = StabilityConfig::default();
    let mut rows = Vec::new();
    let mut pass = true;
    let mut worst_ratio: f64 = 0.0;
    for (name, g) in corpus::ellipses() {
        let gamma = shared(g);
        for angle in [0.3, 1.1, 2.0, 4.0] {
            let dir = circle_point(angle);
            let sups: Vec<f64> = [0.2, 0.1, 0.05]
                .iter()
                .map(|&s| {
                    let r = perturbation::perturb(gamma.clone(), &components(1, &(dir * s)), 720, &cfg).unwrap();
                    worst_ratio = worst_ratio.max(r.sup_distance / s);
                    r.sup_distance
                })
                .collect();
            let ok = sups[0] > sups[1] && sups[1] > sups[2] && sups.iter().zip([0.2, 0.1, 0.05]).all(|(d, s)| *d <= 3.0 * s);
            pass &= ok;
            rows.push(json!({ "gamma": name, "direction": angle, "sup_distance": sups, "ok": ok }));
        }
    }
    Outcome {
        pass,
        summary: format!("continuity of Φ on ellipses: strictly decreasing, max ‖γ_v − γ‖∞/‖v‖ = {worst_ratio:.3} (≤ 3)"),
        report: json!({ "runs": rows, "lipschitz_estimate": worst_ratio }),
    }
}

/// Number of critical points of f_v, counted as sign changes of (φ − v)·φ′
/// around the circle.
fn count_critical(phi: &[Vec3], dphi: &[Vec3], v: &Vec3) -> usize {
    let n = phi.len();
    let g = |k: usize| (phi[k] - v).dot(&dphi[k]);
    let mut prev = g(n - 1) > 0.0;
    let mut count = 0;
    for k in 0..n {
        let cur = g(k) > 0.0;
        count += (cur != prev) as usize;
        prev = cur;
    }
    count
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let g = corpus::ellipse_dual(2.0, 1.0);
    // φ and φ′ from the definition alone, φ′ by central differences
    let phi_at = |t: f64| {
        let th = circle_point(t);
        th / g.value(&(-th))
    };
    let k = 4096;
    let h = 1e-6;
    let ts: Vec<f64> = (0..k).map(|i| std::f64::consts::TAU * i as f64 / k as f64).collect();
    let phi: Vec<Vec3> = ts.iter().map(|&t| phi_at(t)).collect();
    let dphi: Vec<Vec3> = ts.iter().map(|&t| (phi_at(t + h) - phi_at(t - h)) / (2.0 * h)).collect();

    let (nx, ny) = (401, 401);
    let (x0, x1, y0, y1) = (-1.55, 1.55, -3.05, 3.05);
    let at = |i: usize, j: usize| Vec3::new(x0 + (x1 - x0) * i as f64 / (nx - 1) as f64, y0 + (y1 - y0) * j as f64 / (ny - 1) as f64, 0.0);
    let counts: Vec<usize> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| count_critical(&phi, &dphi, &at(idx % nx, idx / nx)))
        .collect();
    let mut edges = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let c = counts[j * nx + i];
            if i + 1 < nx && counts[j * nx + i + 1] != c {
                edges.push((at(i, j), at(i + 1, j)));
            }
            if j + 1 < ny && counts[(j + 1) * nx + i] != c {
                edges.push((at(i, j), at(i, j + 1)));
            }
        }
    }
    let oracle: Vec<Vec3> = edges
        .par_iter()
        .map(|(a, b)| {
            let ca = count_critical(&phi, &dphi, a);
            let (mut lo, mut hi) = (*a, *b);
            for _ in 0..40 {
                let mid = (lo + hi) / 2.0;
                if count_critical(&phi, &dphi, &mid) == ca {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo + hi) / 2.0
        })
        .collect();

    let c = caustic::caustic(&g, 8000);
    let evolute: Vec<Vec3> = c.points.iter().map(|p| p.point).collect();
    let all_certified = c.points.iter().all(|p| p.certified);
    let d = hausdorff(&evolute, &oracle);
    let want = [Vec3::new(1.5, 0.0, 0.0), Vec3::new(-1.5, 0.0, 0.0), Vec3::new(0.0, 3.0, 0.0), Vec3::new(0.0, -3.0, 0.0)];
    let cusp_err = want
        .iter()
        .map(|w| c.cusps.iter().map(|q| (q - w).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let elapsed = started.elapsed();
    let pass = d <= 1e-2 && cusp_err <= 1e-3 && c.cusps.len() == 4 && all_certified && elapsed <= Duration::from_secs(120);
    Outcome {
        pass,
        summary: format!(
            "caustic vs 401² degenerate-Hessian scan: Hausdorff {d:.2e} (≤ 1e-2), cusp error {cusp_err:.1e} (≤ 1e-3), {:.1}s (≤ 120s)",
            elapsed.as_secs_f64()
        ),
        report: json!({
            "oracle_points": oracle.len(), "evolute_points": evolute.len(), "hausdorff": d,
            "cusps": c.cusps.iter().map(|q| [q.x, q.y]).collect::<Vec<_>>(), "cusp_error": cusp_err,
            "certified": all_certified,
        }),
    }
}

fn criterion_5() -> Outcome {
    let g = corpus::ellipse_dual(2.0, 1.0);
    let m = 2000;
    let sym = caustic::symmetry_set(&g, m, 1e-8).unwrap();
    let range = caustic::default_t_range(&g, m);
    let sweep = caustic::sym_via_fronts(&g, range, m, None).unwrap();
    let d = hausdorff(&sym.points(), &sweep.points());
    let certified = sym.pairs.iter().all(|p| p.normal_residual <= 1e-8 && p.distance_residual <= 1e-8);
    Outcome {
        pass: d <= 5e-3 && certified && !sym.pairs.is_empty(),
        summary: format!(
            "symmetry set vs front self-intersections (grid {m}): Hausdorff {d:.2e} (≤ 5e-3), {} pairs / {} crossings",
            sym.pairs.len(),
            sweep.crossings.len()
        ),
        report: json!({ "pairs": sym.pairs.len(), "crossings": sweep.crossings.len(), "fronts": sweep.fronts,
                        "t_range": [range.0, range.1], "hausdorff": d, "certified": certified }),
    }
}

fn criterion_6() -> Outcome {
    let gamma: Arc<dyn SphereField> = shared(corpus::ellipse_dual(2.0, 1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let vs: Vec<Vec3> = (0..1000).map(|_| draw_interior(&*gamma, &mut rng, 1.0)).collect();
    let cfg = StabilityConfig::default();
    let statuses: Vec<Status> = vs
        .par_iter()
        .map(|v| is_stable(&DistanceField::new(gamma.clone(), *v), &cfg).status)
        .collect();
    let stable = statuses.iter().filter(|s| **s == Status::Stable).count();
    let bad: Vec<Value> = vs
        .iter()
        .zip(&statuses)
        .filter(|(_, s)| **s != Status::Stable)
        .map(|(v, s)| json!({ "v": [v.x, v.y], "status": s }))
        .collect();
    Outcome {
        pass: stable >= 990,
        summary: format!("f_v stable for {stable}/1000 uniform v in int(W) (≥ 990)"),
        report: json!({ "stable": stable, "others": bad }),
    }
}

/// All vectors of length `len` with entries summing to at most `max`.
fn vectors(len: usize, max: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=max {
        for mut rest in vectors(len - 1, max - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    let mut lemma_passes = Vec::new();
    let mut lemma_mismatch = Vec::new();
    for n in 1..=3usize {
        let betti: Vec<i64> = (0..=n).map(|k| (k == 0 || k == n) as i64).collect();
        for c in vectors(n + 1, 6) {
            let report = stability::morse_inequalities(&MorseVector::new(n, c.clone()));
            // S_λ = Σ_{k≤λ} (−1)^{λ−k} R_k, likewise for C
            let alt = |xs: &[i64], l: usize| (0..=l).map(|k| if (l - k) % 2 == 0 { xs[k] } else { -xs[k] }).sum::<i64>();
            let ci: Vec<i64> = c.iter().map(|&x| x as i64).collect();
            let expect: Vec<bool> = (0..=n).map(|l| alt(&betti, l) <= alt(&ci, l)).collect();
            let euler = alt(&betti, n) == alt(&ci, n);
            let got: Vec<bool> = report.inequalities.iter().map(|i| i.holds).collect();
            if got != expect || report.euler_holds != euler {
                mismatches.push(json!({ "n": n, "C": c }));
            }
            checked += 1;

            if n >= 2 && c[1..n].iter().all(|&x| x == 0) {
                let want_pass = c[0] == 1 && c[n] == 1;
                let outcome = index_lemma_counts(&MorseVector::new(n, c.clone()));
                if outcome == LemmaOutcome::Pass {
                    lemma_passes.push(json!({ "n": n, "C": c }));
                }
                let ok = match outcome {
                    LemmaOutcome::Pass => want_pass,
                    LemmaOutcome::Fail => !want_pass,
                    LemmaOutcome::NotApplicable(_) => false,
                };
                if !ok {
                    lemma_mismatch.push(json!({ "n": n, "C": c }));
                }
            }
            if n >= 2 && c[1..n].iter().any(|&x| x > 0) {
                if !matches!(index_lemma_counts(&MorseVector::new(n, c.clone())), LemmaOutcome::NotApplicable(_)) {
                    lemma_mismatch.push(json!({ "n": n, "C": c, "expected": "not applicable" }));
                }
            }
        }
        if n == 1 && !matches!(index_lemma_counts(&MorseVector::new(1, vec![1, 1])), LemmaOutcome::NotApplicable(_)) {
            lemma_mismatch.push(json!({ "n": 1, "expected": "not applicable" }));
        }
    }
    Outcome {
        pass: mismatches.is_empty() && lemma_mismatch.is_empty() && lemma_passes.len() == 2,
        summary: format!(
            "Morse engine: {checked} C-vectors (n = 1..3, ΣC ≤ 6), {} inequality mismatches; lemma passes only (1,0,…,0,1): {}",
            mismatches.len(),
            lemma_mismatch.is_empty() && lemma_passes.len() == 2
        ),
        report: json!({ "checked": checked, "mismatches": mismatches, "lemma_passes": lemma_passes, "lemma_mismatches": lemma_mismatch }),
    }
}

fn criterion_8() -> Outcome {
    let cfg = StabilityConfig::default();
    let mut rows = Vec::new();
    let mut pass = true;
    for seed in 0..10u64 {
        let s = stabilize(shared(corpus::round(2)), 0.1, 100 + seed, 3, perturbation::TABLE_S2, &cfg).unwrap();
        let gamma_v = &s.result.gamma_v;
        let verdict = is_stable(gamma_v, &cfg);
        let ext = extremal_index_check(gamma_v, &cfg);
        let ok = verdict.status == Status::Stable && ext.applicable && ext.confirmed == Some(true);
        pass &= ok;
        rows.push(json!({ "seed": 100 + seed, "v": components(2, &s.result.v), "status": verdict.status,
                          "indices": verdict.census.iter().map(|c| c.index).collect::<Vec<_>>(), "extremal_index_confirmed": ext.confirmed }));
    }
    let ellipse = is_stable(&corpus::ellipse_dual(2.0, 1.0), &cfg);
    let ellipse_ok = ellipse.status == Status::Unstable && ellipse.census.len() == 4;
    pass &= ellipse_ok;
    Outcome {
        pass,
        summary: format!(
            "extremal-index case: 10 stabilized round S² integrands stable & confirmed; centred ellipse on S¹ {:?} with {} critical points",
            ellipse.status,
            ellipse.census.len()
        ),
        report: json!({ "round_s2": rows, "ellipse_s1": { "status": ellipse.status, "critical_points": ellipse.census.len(),
                        "values": ellipse.census.iter().map(|c| c.value).collect::<Vec<_>>() } }),
    }
}

fn criterion_9() -> Outcome {
    let mut rows = Vec::new();
    let mut pass = true;
    let cases: Vec<(&str, SphereFunction, Verdict)> = corpus::negative_s1()
        .into_iter()
        .map(|(n, g)| (n, g, Verdict::No))
        .chain(all_s1_s2().into_iter().map(|(n, g)| (n, g, Verdict::Yes)))
        .collect();
    for (name, g, want) in &cases {
        let verdicts: Vec<Verdict> = [360, 720, 1440]
            .iter()
            .map(|&m| is_convex_integrand(g, m, None).map(|r| r.verdict).unwrap_or(Verdict::No))
            .collect();
        let ok = verdicts.iter().all(|v| v == want);
        pass &= ok;
        rows.push(json!({ "gamma": name, "dimension": g.dimension(), "expected": want, "verdicts": verdicts }));
    }
    Outcome {
        pass,
        summary: format!("convexity verdicts on {} corpus members at M ∈ {{360, 720, 1440}}", cases.len()),
        report: json!({ "cases": rows }),
    }
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(usize, Criterion); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    let mut first = Vec::new();
    for (id, f) in criteria {
        let t = Instant::now();
        let o = f();
        println!(
            "criterion {id}: {} — {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.summary,
            t.elapsed().as_secs_f64()
        );
        failed += !o.pass as usize;
        first.push(serde_json::to_string_pretty(&o.report).unwrap());
    }
    let second: Vec<String> = criteria.iter().map(|(_, f)| serde_json::to_string_pretty(&f().report).unwrap()).collect();
    let differing: Vec<usize> = (0..9).filter(|&i| first[i] != second[i]).map(|i| i + 1).collect();
    let deterministic = differing.is_empty();
    println!(
        "criterion 10: {} — reports of criteria 1–9 byte-identical across two runs{}",
        if deterministic { "PASS" } else { "FAIL" },
        if deterministic { String::new() } else { format!(" (differ: {differing:?})") }
    );
    failed += !deterministic as usize;
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
