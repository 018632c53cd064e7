use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{components, finite_difference_jet, unit_direction, AmbientJet, SphereField};
use crate::error::{Error, Result};
use crate::tangent::{circle_angle, Vec3};

/// How a [`SampledFunction`] is evaluated away from its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// Delegates to the attached exact evaluator.
    Exact,
    /// Piecewise linear in angle on S¹, nearest sample on S².
    Linear,
}

/// A function on Sⁿ known on a grid of directions, optionally backed by an
/// exact evaluator (e.g. the Newton inversion behind γ̃_v).
#[derive(Clone)]
pub struct SampledFunction {
    dimension: usize,
    samples: Vec<(Vec3, f64)>,
    interpolation: Interpolation,
    exact: Option<Arc<dyn SphereField>>,
    // S¹ only: sample indices sorted by angle
    order: Vec<usize>,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("dimension", &self.dimension)
            .field("samples", &self.samples.len())
            .field("interpolation", &self.interpolation)
            .finish()
    }
}

impl PartialEq for SampledFunction {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension && self.samples == other.samples
    }
}

#[derive(Serialize, Deserialize)]
struct SampleEntry {
    theta: Vec<f64>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct SampledFile {
    dimension: usize,
    samples: Vec<SampleEntry>,
}

impl SampledFunction {
    pub fn new(dimension: usize, samples: Vec<(Vec3, f64)>) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::InvalidFunction(format!("bad dimension {dimension}")));
        }
        if samples.is_empty() {
            return Err(Error::InvalidFunction("no samples".into()));
        }
        for (theta, value) in &samples {
            unit_direction(dimension, &components(dimension, theta))?;
            if dimension == 1 && theta.z != 0.0 {
                return Err(Error::InvalidFunction("S¹ sample with a z component".into()));
            }
            if !value.is_finite() {
                return Err(Error::InvalidFunction("non-finite sample value".into()));
            }
        }
        let mut order: Vec<usize> = (0..samples.len()).collect();
        if dimension == 1 {
            order.sort_by(|&a, &b| circle_angle(&samples[a].0).total_cmp(&circle_angle(&samples[b].0)));
            for w in order.windows(2) {
                if circle_angle(&samples[w[0]].0) == circle_angle(&samples[w[1]].0) {
                    return Err(Error::InvalidFunction("duplicate sample direction".into()));
                }
            }
        } else {
            let mut sorted = samples.iter().map(|s| s.0).collect::<Vec<_>>();
            sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(a.z.total_cmp(&b.z)));
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidFunction("duplicate sample direction".into()));
            }
        }
        Ok(Self {
            dimension,
            samples,
            interpolation: Interpolation::Linear,
            exact: None,
            order,
        })
    }

    /// Attaches an exact evaluator; sample values are kept as given.
    pub fn with_exact(mut self, exact: Arc<dyn SphereField>) -> Self {
        self.exact = Some(exact);
        self.interpolation = Interpolation::Exact;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn samples(&self) -> &[(Vec3, f64)] {
        &self.samples
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn exact(&self) -> Option<&Arc<dyn SphereField>> {
        self.exact.as_ref()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = SampledFile {
            dimension: self.dimension,
            samples: self
                .samples
                .iter()
                .map(|(t, v)| SampleEntry {
                    theta: components(self.dimension, t),
                    value: *v,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: SampledFile = serde_json::from_str(s)?;
        let samples = file
            .samples
            .into_iter()
            .map(|e| {
                if e.theta.len() != file.dimension + 1 {
                    return Err(Error::DimensionMismatch {
                        expected: file.dimension + 1,
                        got: e.theta.len(),
                    });
                }
                let mut t = Vec3::zeros();
                for (i, c) in e.theta.iter().enumerate() {
                    t[i] = *c;
                }
                Ok((t, e.value))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.dimension, samples)
    }

    fn interpolate(&self, theta: &Vec3) -> f64 {
        if self.dimension == 2 {
            return self
                .samples
                .iter()
                .max_by(|a, b| a.0.dot(theta).total_cmp(&b.0.dot(theta)))
                .map(|s| s.1)
                .unwrap_or(f64::NAN);
        }
        let t = circle_angle(theta);
        let n = self.order.len();
        let angle = |k: usize| circle_angle(&self.samples[self.order[k % n]].0);
        // first sample with angle > t
        let hi = self.order.partition_point(|&i| circle_angle(&self.samples[i].0) <= t);
        let lo = (hi + n - 1) % n;
        let (a0, mut a1) = (angle(lo), angle(hi % n));
        let mut tt = t;
        if a1 <= a0 {
            a1 += std::f64::consts::TAU;
            if tt < a0 {
                tt += std::f64::consts::TAU;
            }
        }
        let (v0, v1) = (self.samples[self.order[lo]].1, self.samples[self.order[hi % n]].1);
        if a1 == a0 {
            return v0;
        }
        let w = (tt - a0) / (a1 - a0);
        v0 * (1.0 - w) + v1 * w
    }

    /// Value at a unit direction.
    pub fn evaluate(&self, theta: &[f64]) -> Result<f64> {
        let t = unit_direction(self.dimension, theta)?;
        Ok(self.value(&t))
    }
}

impl SphereField for SampledFunction {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn ambient_jet(&self, theta: &Vec3) -> AmbientJet {
        match &self.exact {
            Some(f) => f.ambient_jet(theta),
            None => finite_difference_jet(self.dimension, theta, |p| self.interpolate(p)),
        }
    }

    fn value(&self, theta: &Vec3) -> f64 {
        match &self.exact {
            Some(f) => f.value(theta),
            None => self.interpolate(theta),
        }
    }

    fn seed_degree(&self) -> usize {
        self.exact.as_ref().map_or(2, |f| f.seed_degree())
    }
}
