//! Smooth real functions on S¹ and S² and their intrinsic calculus.
//!
//! A [`SphereFunction`] is the restriction to Sⁿ of `p(x)^α`, where `p` is an
//! ambient polynomial in the n+1 coordinates and `α` a real exponent (1 by
//! default). The exponent lets the usual Minkowski gauges (`√(x²/a² + y²/b²)`)
//! and reciprocal trigonometric integrands be represented exactly.
//!
//! Everything downstream works through the [`SphereField`] trait: any value
//! with an ambient 2-jet at unit vectors gets intrinsic gradients, Hessians and
//! a critical-point census for free.

mod critical;
mod sampled;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tangent::{geodesic, Mat3, TangentBasis, TangentForm, Vec3};

pub use critical::{critical_points, euler_characteristic, seed_count, CriticalPoint, Nondegeneracy, SolverConfig};
pub use sampled::{Interpolation, SampledFunction};

/// Tolerance on ‖θ‖ for public entry points.
pub const UNIT_TOL: f64 = 1e-9;

/// Value, ambient gradient and ambient Hessian of an extension of a function
/// on Sⁿ, evaluated at a unit vector.
#[derive(Debug, Clone, Copy)]
pub struct AmbientJet {
    pub value: f64,
    pub gradient: Vec3,
    pub hessian: Mat3,
}

/// Intrinsic 2-jet at θ: value, tangential gradient (ambient coordinates) and
/// the intrinsic Hessian in the frame `basis`.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec3,
    pub hessian: TangentForm,
    pub basis: TangentBasis,
}

impl Jet {
    /// Restriction formula P(∇²p)P − (θ·∇p)P, with P = I − θθᵀ.
    pub fn from_ambient(dim: usize, theta: &Vec3, amb: &AmbientJet) -> Self {
        let basis = TangentBasis::at(dim, theta);
        let normal = theta.dot(&amb.gradient);
        let gradient = amb.gradient - theta * normal;
        let mut hessian = basis.restrict(&amb.hessian);
        for i in 0..dim {
            hessian.m[(i, i)] -= normal;
        }
        Self {
            value: amb.value,
            gradient,
            hessian,
            basis,
        }
    }
}

/// A smooth function on Sⁿ, n ∈ {1, 2}, known through its 2-jets.
pub trait SphereField: Send + Sync {
    fn dimension(&self) -> usize;

    /// 2-jet of some smooth ambient extension at the unit vector θ.
    fn ambient_jet(&self, theta: &Vec3) -> AmbientJet;

    fn value(&self, theta: &Vec3) -> f64 {
        self.ambient_jet(theta).value
    }

    fn jet(&self, theta: &Vec3) -> Jet {
        Jet::from_ambient(self.dimension(), theta, &self.ambient_jet(theta))
    }

    /// Rough polynomial degree, used to size critical-point seed grids.
    fn seed_degree(&self) -> usize {
        2
    }
}

impl<T: SphereField + ?Sized> SphereField for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn ambient_jet(&self, theta: &Vec3) -> AmbientJet {
        (**self).ambient_jet(theta)
    }
    fn value(&self, theta: &Vec3) -> f64 {
        (**self).value(theta)
    }
    fn jet(&self, theta: &Vec3) -> Jet {
        (**self).jet(theta)
    }
    fn seed_degree(&self) -> usize {
        (**self).seed_degree()
    }
}

impl<T: SphereField + ?Sized> SphereField for std::sync::Arc<T> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn ambient_jet(&self, theta: &Vec3) -> AmbientJet {
        (**self).ambient_jet(theta)
    }
    fn value(&self, theta: &Vec3) -> f64 {
        (**self).value(theta)
    }
    fn jet(&self, theta: &Vec3) -> Jet {
        (**self).jet(theta)
    }
    fn seed_degree(&self) -> usize {
        (**self).seed_degree()
    }
}

/// Step sizes for [`finite_difference_jet`].
const FD_GRAD_STEP: f64 = 1e-6;
const FD_HESS_STEP: f64 = 1e-4;

/// Intrinsic 2-jet of a value-only function by central differences along
/// great circles, returned as an ambient jet with zero normal derivatives
/// (which reproduces the same intrinsic jet).
pub fn finite_difference_jet(dim: usize, theta: &Vec3, f: impl Fn(&Vec3) -> f64) -> AmbientJet {
    let basis = TangentBasis::at(dim, theta);
    let f0 = f(theta);
    let mut gradient = Vec3::zeros();
    let mut form = TangentForm::zero(dim);
    let along = |dir: &Vec3, s: f64| f(&geodesic(theta, dir, s));
    for i in 0..dim {
        let e = basis.e[i];
        let g = (along(&e, FD_GRAD_STEP) - along(&e, -FD_GRAD_STEP)) / (2.0 * FD_GRAD_STEP);
        gradient += e * g;
        let h = FD_HESS_STEP;
        form.m[(i, i)] = (along(&e, h) - 2.0 * f0 + along(&e, -h)) / (h * h);
    }
    if dim == 2 {
        let h = FD_HESS_STEP;
        let d = (basis.e[0] + basis.e[1]) / std::f64::consts::SQRT_2;
        let diag = (along(&d, h) - 2.0 * f0 + along(&d, -h)) / (h * h);
        let off = diag - 0.5 * (form.m[(0, 0)] + form.m[(1, 1)]);
        form.m[(0, 1)] = off;
        form.m[(1, 0)] = off;
    }
    AmbientJet {
        value: f0,
        gradient,
        hessian: basis.embed(&form),
    }
}

/// Checks a user-supplied direction and widens it to a 3-vector.
pub fn unit_direction(dim: usize, theta: &[f64]) -> Result<Vec3> {
    if theta.len() != dim + 1 {
        return Err(Error::DimensionMismatch {
            expected: dim + 1,
            got: theta.len(),
        });
    }
    let mut v = Vec3::zeros();
    for (i, c) in theta.iter().enumerate() {
        v[i] = *c;
    }
    let norm = v.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    Ok(v)
}

/// The first `dim + 1` components of a direction.
pub fn components(dim: usize, v: &Vec3) -> Vec<f64> {
    v.iter().take(dim + 1).copied().collect()
}

/// One monomial `coeff · Π xᵢ^eᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct FunctionFile {
    dimension: usize,
    terms: Vec<Term>,
    #[serde(default = "unit_power", skip_serializing_if = "is_unit_power")]
    power: f64,
}

fn unit_power() -> f64 {
    1.0
}

fn is_unit_power(p: &f64) -> bool {
    *p == 1.0
}

/// `p(x)^power` restricted to Sⁿ, with `p` an ambient polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionFile", into = "FunctionFile")]
pub struct SphereFunction {
    dimension: usize,
    terms: Vec<Term>,
    power: f64,
    degree: usize,
    // exponents padded to three coordinates
    packed: Vec<([u32; 3], f64)>,
}

impl TryFrom<FunctionFile> for SphereFunction {
    type Error = Error;
    fn try_from(f: FunctionFile) -> Result<Self> {
        SphereFunction::with_power(f.dimension, f.terms, f.power)
    }
}

impl From<SphereFunction> for FunctionFile {
    fn from(f: SphereFunction) -> Self {
        FunctionFile {
            dimension: f.dimension,
            terms: f.terms,
            power: f.power,
        }
    }
}

impl SphereFunction {
    pub fn new(dimension: usize, terms: Vec<Term>) -> Result<Self> {
        Self::with_power(dimension, terms, 1.0)
    }

    pub fn with_power(dimension: usize, terms: Vec<Term>, power: f64) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::InvalidFunction(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        if terms.is_empty() {
            return Err(Error::InvalidFunction("no terms".into()));
        }
        if !power.is_finite() || power == 0.0 {
            return Err(Error::InvalidFunction(format!("bad power {power}")));
        }
        let mut packed = Vec::with_capacity(terms.len());
        let mut degree = 0usize;
        for t in &terms {
            if t.exponents.len() != dimension + 1 {
                return Err(Error::InvalidFunction(format!(
                    "term {:?} needs {} exponents",
                    t.exponents,
                    dimension + 1
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidFunction("non-finite coefficient".into()));
            }
            let mut e = [0u32; 3];
            e[..t.exponents.len()].copy_from_slice(&t.exponents);
            degree = degree.max(e.iter().sum::<u32>() as usize);
            packed.push((e, t.coeff));
        }
        Ok(Self {
            dimension,
            terms,
            power,
            degree,
            packed,
        })
    }

    /// Builds from `(exponents, coeff)` pairs.
    pub fn from_terms(dimension: usize, terms: &[(&[u32], f64)], power: f64) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(e, c)| Term {
                exponents: e.to_vec(),
                coeff: *c,
            })
            .collect();
        Self::with_power(dimension, terms, power)
    }

    pub fn constant(dimension: usize, c: f64) -> Self {
        Self::new(
            dimension,
            vec![Term {
                exponents: vec![0; dimension + 1],
                coeff: c,
            }],
        )
        .expect("constant is valid")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        let t = unit_direction(self.dimension, theta)?;
        Ok(self.value(&t))
    }

    pub fn intrinsic_gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let t = unit_direction(self.dimension, theta)?;
        Ok(components(self.dimension, &self.jet(&t).gradient))
    }

    /// Intrinsic Hessian in the frame `TangentBasis::at(n, θ)`.
    pub fn intrinsic_hessian(&self, theta: &[f64]) -> Result<TangentForm> {
        let t = unit_direction(self.dimension, theta)?;
        Ok(self.jet(&t).hessian)
    }

    /// Value, gradient and Hessian of the polynomial part at any ambient point.
    pub fn polynomial_jet(&self, x: &Vec3) -> AmbientJet {
        const TABLE: usize = 24;
        let deg = self.degree.max(1);
        let tabulated = deg < TABLE;
        let mut pw = [[1.0f64; TABLE]; 3];
        if tabulated {
            for i in 0..3 {
                for k in 1..=deg {
                    pw[i][k] = pw[i][k - 1] * x[i];
                }
            }
        }
        let p = |i: usize, k: u32| -> f64 {
            if tabulated {
                pw[i][k as usize]
            } else {
                x[i].powi(k as i32)
            }
        };
        let mut value = 0.0;
        let mut gradient = Vec3::zeros();
        let mut hessian = Mat3::zeros();
        for (e, c) in &self.packed {
            let f = [p(0, e[0]), p(1, e[1]), p(2, e[2])];
            value += c * f[0] * f[1] * f[2];
            // d[i] = ∂/∂xᵢ of xᵢ^eᵢ, dd[i] its second derivative
            let mut d = [0.0; 3];
            let mut dd = [0.0; 3];
            for i in 0..3 {
                if e[i] >= 1 {
                    d[i] = e[i] as f64 * p(i, e[i] - 1);
                }
                if e[i] >= 2 {
                    dd[i] = (e[i] * (e[i] - 1)) as f64 * p(i, e[i] - 2);
                }
            }
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                gradient[i] += c * d[i] * f[j] * f[k];
                hessian[(i, i)] += c * dd[i] * f[j] * f[k];
                let off = c * d[i] * d[j] * f[k];
                hessian[(i, j)] += off;
                hessian[(j, i)] += off;
            }
        }
        AmbientJet {
            value,
            gradient,
            hessian,
        }
    }

    /// The function θ ↦ f(Mθ) for an orthogonal `m` (only the leading
    /// (n+1)×(n+1) block is used).
    pub fn compose_linear(&self, m: &Mat3) -> Self {
        let dim = self.dimension;
        let mut acc: BTreeMap<[u32; 3], f64> = BTreeMap::new();
        for (e, c) in &self.packed {
            let mut prod: BTreeMap<[u32; 3], f64> = BTreeMap::from([([0, 0, 0], *c)]);
            for i in 0..=dim {
                let mut lin: BTreeMap<[u32; 3], f64> = BTreeMap::new();
                for j in 0..=dim {
                    if m[(i, j)] != 0.0 {
                        let mut ej = [0u32; 3];
                        ej[j] = 1;
                        lin.insert(ej, m[(i, j)]);
                    }
                }
                for _ in 0..e[i] {
                    prod = poly_mul(&prod, &lin);
                }
            }
            for (k, v) in prod {
                *acc.entry(k).or_insert(0.0) += v;
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(e, c)| Term {
                exponents: e[..=dim].to_vec(),
                coeff: c,
            })
            .collect::<Vec<_>>();
        let terms = if terms.is_empty() {
            vec![Term {
                exponents: vec![0; dim + 1],
                coeff: 0.0,
            }]
        } else {
            terms
        };
        Self::with_power(dim, terms, self.power).expect("composition keeps validity")
    }

    /// `a·f + b`; only defined for plain polynomials (power 1).
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if self.power != 1.0 {
            return Err(Error::Unsupported(
                "affine maps of p^α are not representable for α ≠ 1".into(),
            ));
        }
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .map(|t| Term {
                exponents: t.exponents.clone(),
                coeff: a * t.coeff,
            })
            .collect();
        terms.push(Term {
            exponents: vec![0; self.dimension + 1],
            coeff: b,
        });
        Self::new(self.dimension, terms)
    }
}

fn poly_mul(a: &BTreeMap<[u32; 3], f64>, b: &BTreeMap<[u32; 3], f64>) -> BTreeMap<[u32; 3], f64> {
    let mut out = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            *out.entry(e).or_insert(0.0) += ca * cb;
        }
    }
    out
}

impl SphereField for SphereFunction {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn ambient_jet(&self, theta: &Vec3) -> AmbientJet {
        let pj = self.polynomial_jet(theta);
        let a = self.power;
        if a == 1.0 {
            return pj;
        }
        let p = pj.value;
        let d1 = a * p.powf(a - 1.0);
        let d2 = a * (a - 1.0) * p.powf(a - 2.0);
        AmbientJet {
            value: p.powf(a),
            gradient: pj.gradient * d1,
            hessian: pj.hessian * d1 + pj.gradient * pj.gradient.transpose() * d2,
        }
    }

    fn value(&self, theta: &Vec3) -> f64 {
        let p = self.polynomial_jet_value(theta);
        if self.power == 1.0 {
            p
        } else {
            p.powf(self.power)
        }
    }

    fn seed_degree(&self) -> usize {
        self.degree.max(2)
    }
}

impl SphereFunction {
    fn polynomial_jet_value(&self, x: &Vec3) -> f64 {
        self.packed
            .iter()
            .map(|(e, c)| c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32))
            .sum()
    }
}
