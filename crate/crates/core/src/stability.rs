//! Stability of functions on Sⁿ: Morse with pairwise distinct critical values.
//!
//! Also the Morse-inequality engine for critical counts on Sⁿ and the
//! two-point index lemma that follows from it when n ≥ 2.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::sphere_fn::{components, critical_points, CriticalPoint, Nondegeneracy, SolverConfig, SphereField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConfig {
    pub solver: SolverConfig,
    /// Minimum gap between critical values, relative to max |value|.
    pub val_rel_tol: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            val_rel_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Stable,
    Unstable,
    Indeterminate,
}

/// A critical point in report form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub theta: Vec<f64>,
    pub value: f64,
    pub index: usize,
    pub margin: f64,
    pub residual: f64,
    pub class: String,
}

impl CensusEntry {
    pub fn new(dim: usize, p: &CriticalPoint) -> Self {
        Self {
            theta: components(dim, &p.theta),
            value: p.value,
            index: p.index,
            margin: p.margin,
            residual: p.residual,
            class: match p.class {
                Nondegeneracy::Nondegenerate => "nondegenerate",
                Nondegeneracy::Indeterminate => "indeterminate",
                Nondegeneracy::Degenerate => "degenerate",
            }
            .into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A point whose Hessian margin is at or near the threshold.
    Degenerate { theta: Vec<f64>, margin: f64, threshold: f64 },
    /// Two critical points whose values are at or near the threshold apart.
    ValueCollision { first: Vec<f64>, second: Vec<f64>, gap: f64, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub status: Status,
    pub census: Vec<CensusEntry>,
    pub witness: Option<Witness>,
    /// Smallest min |Hessian eigenvalue| over the census.
    pub min_margin: Option<f64>,
    /// Smallest difference between two critical values.
    pub min_value_gap: Option<f64>,
    pub diagnosis: Option<String>,
    pub morse: MorseVector,
}

impl StabilityVerdict {
    pub fn critical_count(&self) -> usize {
        self.census.len()
    }
}

/// Critical counts C_λ and Betti numbers R_λ of Sⁿ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseVector {
    pub dimension: usize,
    pub counts: Vec<usize>,
    pub betti: Vec<usize>,
}

impl MorseVector {
    /// `counts` has n+1 entries.
    pub fn new(dimension: usize, counts: Vec<usize>) -> Self {
        assert_eq!(counts.len(), dimension + 1, "one count per index 0..=n");
        let mut betti = vec![0; dimension + 1];
        betti[0] = 1;
        betti[dimension] = 1;
        Self {
            dimension,
            counts,
            betti,
        }
    }

    pub fn from_census(dimension: usize, census: &[CriticalPoint]) -> Self {
        let mut counts = vec![0; dimension + 1];
        for p in census {
            counts[p.index.min(dimension)] += 1;
        }
        Self::new(dimension, counts)
    }

    /// S_λ = R_λ − R_{λ−1} + … ± R_0.
    pub fn partial_sums(&self) -> Vec<i64> {
        alternating(&self.betti)
    }

    /// C_λ − C_{λ−1} + … ± C_0.
    pub fn count_sums(&self) -> Vec<i64> {
        alternating(&self.counts)
    }
}

fn alternating(v: &[usize]) -> Vec<i64> {
    let mut out = Vec::with_capacity(v.len());
    let mut acc = 0i64;
    for &x in v {
        acc = x as i64 - acc;
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub lambda: usize,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseReport {
    pub inequalities: Vec<Inequality>,
    /// Σ(−1)^λ R_λ and Σ(−1)^λ C_λ.
    pub euler: (i64, i64),
    pub euler_holds: bool,
}

impl MorseReport {
    pub fn all_hold(&self) -> bool {
        self.euler_holds && self.inequalities.iter().all(|i| i.holds)
    }
}

/// Evaluates (i_λ): S_λ ≤ C_λ − C_{λ−1} + … ± C_0 for λ = 0..n, and the
/// alternating-sum equality.
pub fn morse_inequalities(mv: &MorseVector) -> MorseReport {
    let s = mv.partial_sums();
    let c = mv.count_sums();
    let inequalities = (0..=mv.dimension)
        .map(|l| Inequality {
            lambda: l,
            lhs: s[l],
            rhs: c[l],
            holds: s[l] <= c[l],
        })
        .collect();
    let sign = if mv.dimension % 2 == 0 { 1 } else { -1 };
    let euler = (sign * s[mv.dimension], sign * c[mv.dimension]);
    MorseReport {
        inequalities,
        euler,
        euler_holds: euler.0 == euler.1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "reason", rename_all = "snake_case")]
pub enum LemmaOutcome {
    Pass,
    Fail,
    NotApplicable(String),
}

/// The two-point index lemma on a census: for n ≥ 2, a nondegenerate census
/// with every index in {0, n} has exactly one point of each.
pub fn index_lemma_check(census: &[CriticalPoint], n: usize) -> LemmaOutcome {
    if census.iter().any(|p| p.class != Nondegeneracy::Nondegenerate) {
        return LemmaOutcome::NotApplicable("census has (possibly) degenerate points".into());
    }
    index_lemma_counts(&MorseVector::from_census(n, census))
}

/// [`index_lemma_check`] on counts alone.
pub fn index_lemma_counts(mv: &MorseVector) -> LemmaOutcome {
    let n = mv.dimension;
    if n < 2 {
        return LemmaOutcome::NotApplicable("the lemma needs n ≥ 2".into());
    }
    if mv.counts[1..n].iter().any(|&c| c > 0) {
        return LemmaOutcome::NotApplicable("some index is strictly between 0 and n".into());
    }
    if mv.counts[0] == 1 && mv.counts[n] == 1 {
        LemmaOutcome::Pass
    } else {
        LemmaOutcome::Fail
    }
}

/// Stability verdict for any smooth function on Sⁿ.
///
/// Stable iff the census is complete, every point is nondegenerate and all
/// critical values are pairwise at least `val_rel_tol · max|value|` apart.
/// Anything within a factor 10 of a threshold is indeterminate.
pub fn is_stable<F: SphereField + ?Sized>(f: &F, cfg: &StabilityConfig) -> StabilityVerdict {
    let dim = f.dimension();
    let (points, census_error) = match critical_points(f, &cfg.solver) {
        Ok(p) => (p, None),
        Err(Error::IncompleteCensus { reason, partial }) => (partial, Some(reason)),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let census: Vec<CensusEntry> = points.iter().map(|p| CensusEntry::new(dim, p)).collect();
    let morse = MorseVector::from_census(dim, &points);
    let min_margin = points.iter().map(|p| p.margin).min_by(f64::total_cmp);

    let nd_threshold = points.first().map_or(0.0, |p| cfg.solver.nd_rel_tol * p.hessian_scale);
    let worst = points
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin));
    let degenerate_witness = worst.map(|p| Witness::Degenerate {
        theta: components(dim, &p.theta),
        margin: p.margin,
        threshold: nd_threshold,
    });

    let value_scale = points.iter().map(|p| p.value.abs()).fold(0.0, f64::max);
    let val_threshold = cfg.val_rel_tol * value_scale.max(f64::MIN_POSITIVE);
    let mut by_value: Vec<&CriticalPoint> = points.iter().collect();
    by_value.sort_by(|a, b| a.value.total_cmp(&b.value));
    let closest = by_value
        .windows(2)
        .map(|w| (w[1].value - w[0].value, w[0], w[1]))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let min_value_gap = closest.map(|c| c.0);
    let gap = min_value_gap.unwrap_or(f64::INFINITY);
    let collision_witness = closest.map(|(gap, a, b)| Witness::ValueCollision {
        first: components(dim, &a.theta),
        second: components(dim, &b.theta),
        gap,
        threshold: val_threshold,
    });

    let verdict = |status, witness, diagnosis: Option<String>| StabilityVerdict {
        status,
        census: census.clone(),
        witness,
        min_margin,
        min_value_gap,
        diagnosis,
        morse: morse.clone(),
    };

    if let Some(reason) = census_error {
        if points.iter().any(|p| p.class == Nondegeneracy::Degenerate) {
            return verdict(
                Status::Unstable,
                degenerate_witness,
                Some(format!("degenerate critical set: {reason}")),
            );
        }
        return verdict(Status::Indeterminate, None, Some(reason));
    }
    if gap < val_threshold {
        return verdict(
            Status::Unstable,
            collision_witness,
            Some("two critical points share a value".into()),
        );
    }
    if points.iter().any(|p| p.class == Nondegeneracy::Indeterminate) {
        return verdict(
            Status::Indeterminate,
            degenerate_witness,
            Some("a Hessian margin is near the degeneracy threshold".into()),
        );
    }
    if gap < 10.0 * val_threshold {
        return verdict(
            Status::Indeterminate,
            collision_witness,
            Some("two critical values are near the collision threshold".into()),
        );
    }
    verdict(Status::Stable, None, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalIndexReport {
    pub applicable: bool,
    pub reason: Option<String>,
    pub verdict: Option<StabilityVerdict>,
    /// `Some(true)` when the hypotheses hold and the function is stable.
    pub confirmed: Option<bool>,
}

/// Executable form of: for n ≥ 2, a convex integrand whose critical points are
/// all nondegenerate with index 0 or n is stable.
pub fn extremal_index_check<F: SphereField + ?Sized>(gamma: &F, cfg: &StabilityConfig) -> ExtremalIndexReport {
    let n = gamma.dimension();
    let not_applicable = |reason: String| ExtremalIndexReport {
        applicable: false,
        reason: Some(reason),
        verdict: None,
        confirmed: None,
    };
    if n < 2 {
        return not_applicable("the statement fails for n = 1".into());
    }
    let census = match critical_points(gamma, &cfg.solver) {
        Ok(c) => c,
        Err(e) => return not_applicable(e.to_string()),
    };
    if census.iter().any(|p| p.class != Nondegeneracy::Nondegenerate) {
        return not_applicable("census has (possibly) degenerate points".into());
    }
    if census.iter().any(|p| p.index != 0 && p.index != n) {
        return not_applicable("some critical point has index strictly between 0 and n".into());
    }
    let verdict = is_stable(gamma, cfg);
    let confirmed = verdict.status == Status::Stable && index_lemma_check(&census, n) == LemmaOutcome::Pass;
    ExtremalIndexReport {
        applicable: true,
        reason: None,
        verdict: Some(verdict),
        confirmed: Some(confirmed),
    }
}
