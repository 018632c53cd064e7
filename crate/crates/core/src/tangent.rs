//! Small fixed-size linear algebra on S¹ ⊂ ℝ² and S² ⊂ ℝ³.
//!
//! Directions are always carried as 3-vectors; on S¹ the third component is
//! identically zero. Tangent-space objects are expressed in the deterministic
//! orthonormal frame returned by [`TangentBasis::at`].

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Golden angle used by the Fibonacci lattice.
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Orthonormal frame of the tangent space T_θSⁿ, n ∈ {1, 2}.
#[derive(Debug, Clone, Copy)]
pub struct TangentBasis {
    pub dim: usize,
    pub e: [Vec3; 2],
}

impl TangentBasis {
    pub fn at(dim: usize, theta: &Vec3) -> Self {
        if dim == 1 {
            // counterclockwise unit tangent
            let e0 = Vec3::new(-theta.y, theta.x, 0.0);
            return Self {
                dim,
                e: [e0, Vec3::zeros()],
            };
        }
        let ax = theta.iamin();
        let mut a = Vec3::zeros();
        a[ax] = 1.0;
        let e0 = (a - theta * theta.dot(&a)).normalize();
        let e1 = theta.cross(&e0);
        Self { dim, e: [e0, e1] }
    }

    pub fn vectors(&self) -> &[Vec3] {
        &self.e[..self.dim]
    }

    /// Tangent coordinates of an ambient vector.
    pub fn coords(&self, w: &Vec3) -> Vector2<f64> {
        let mut c = Vector2::zeros();
        for (i, e) in self.vectors().iter().enumerate() {
            c[i] = e.dot(w);
        }
        c
    }

    /// Ambient vector with the given tangent coordinates.
    pub fn lift(&self, c: &Vector2<f64>) -> Vec3 {
        self.vectors()
            .iter()
            .enumerate()
            .fold(Vec3::zeros(), |acc, (i, e)| acc + e * c[i])
    }

    /// The bilinear form `m` restricted to this frame.
    pub fn restrict(&self, m: &Mat3) -> TangentForm {
        let mut out = Matrix2::zeros();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self.e[i].dot(&(m * self.e[j]));
            }
        }
        TangentForm {
            dim: self.dim,
            m: out,
        }
    }

    /// Ambient matrix B F Bᵀ of a tangent form (zero on the normal line).
    pub fn embed(&self, form: &TangentForm) -> Mat3 {
        let mut out = Mat3::zeros();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out += self.e[i] * self.e[j].transpose() * form.m[(i, j)];
            }
        }
        out
    }
}

/// Symmetric bilinear form on a tangent space of dimension 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentForm {
    pub dim: usize,
    pub m: Matrix2<f64>,
}

impl TangentForm {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            m: Matrix2::zeros(),
        }
    }

    /// Eigenvalues in ascending order (`dim` of them).
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim == 1 {
            return vec![self.m[(0, 0)]];
        }
        let (a, b, c) = (self.m[(0, 0)], 0.5 * (self.m[(0, 1)] + self.m[(1, 0)]), self.m[(1, 1)]);
        let mean = 0.5 * (a + c);
        let rad = (0.5 * (a - c)).hypot(b);
        vec![mean - rad, mean + rad]
    }

    pub fn determinant(&self) -> f64 {
        if self.dim == 1 {
            self.m[(0, 0)]
        } else {
            self.m.determinant()
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                best = best.max(self.m[(i, j)].abs());
            }
        }
        best
    }

    /// Solve `self · x = rhs` on the tangent coordinates, `None` if singular.
    pub fn solve(&self, rhs: &Vector2<f64>) -> Option<Vector2<f64>> {
        if self.dim == 1 {
            let a = self.m[(0, 0)];
            if a == 0.0 || !a.is_finite() {
                return None;
            }
            return Some(Vector2::new(rhs[0] / a, 0.0));
        }
        self.m.lu().solve(rhs).filter(|x| x.iter().all(|c| c.is_finite()))
    }
}

/// Point at angle `t` on S¹.
pub fn circle_point(t: f64) -> Vec3 {
    Vec3::new(t.cos(), t.sin(), 0.0)
}

/// Polar angle in [0, 2π) of a direction on S¹.
pub fn circle_angle(theta: &Vec3) -> f64 {
    let t = theta.y.atan2(theta.x);
    if t < 0.0 {
        t + std::f64::consts::TAU
    } else {
        t
    }
}

/// Uniform grid of `m` angles 2πi/m.
pub fn circle_grid(m: usize) -> Vec<Vec3> {
    (0..m)
        .map(|i| circle_point(std::f64::consts::TAU * i as f64 / m as f64))
        .collect()
}

/// Fibonacci lattice of `m` nearly uniform points on S².
pub fn fibonacci_grid(m: usize) -> Vec<Vec3> {
    (0..m)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = GOLDEN_ANGLE * i as f64;
            Vec3::new(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}

/// The standard sample grid: uniform on S¹, Fibonacci on S².
pub fn sphere_grid(dim: usize, m: usize) -> Vec<Vec3> {
    if dim == 1 {
        circle_grid(m)
    } else {
        fibonacci_grid(m)
    }
}

/// A grid closed under θ ↦ −θ, with `grid[i + m/2] == -grid[i]` (m rounded up to even).
pub fn antipodal_grid(dim: usize, m: usize) -> Vec<Vec3> {
    let half = m.div_ceil(2).max(1);
    let base = if dim == 1 {
        (0..half)
            .map(|i| circle_point(std::f64::consts::PI * i as f64 / half as f64))
            .collect::<Vec<_>>()
    } else {
        fibonacci_grid(half)
    };
    let mut out = base.clone();
    out.extend(base.iter().map(|p| -p));
    out
}

/// Retraction onto the sphere: normalize(θ + Bδ).
pub fn retract(theta: &Vec3, basis: &TangentBasis, step: &Vector2<f64>) -> Vec3 {
    (theta + basis.lift(step)).normalize()
}

/// Point at arc length `s` along the great circle through θ with unit tangent `dir`.
pub fn geodesic(theta: &Vec3, dir: &Vec3, s: f64) -> Vec3 {
    theta * s.cos() + dir * s.sin()
}

/// Eigenvalues of g⁻¹·b for symmetric 2×2 forms `b`, `g` with `g` positive definite.
pub fn generalized_eigenvalues(b: &TangentForm, g: &TangentForm) -> Vec<f64> {
    if b.dim == 1 {
        return vec![b.m[(0, 0)] / g.m[(0, 0)]];
    }
    // symmetric reduction L⁻¹BL⁻ᵀ keeps a double root accurate to rounding
    let Some(chol) = g.m.cholesky() else {
        return vec![f64::NAN; 2];
    };
    let li = chol.l().try_inverse().unwrap_or_else(Matrix2::zeros);
    let s = li * b.m * li.transpose();
    let mean = 0.5 * (s[(0, 0)] + s[(1, 1)]);
    let half = (0.5 * (s[(0, 0)] - s[(1, 1)])).hypot(0.5 * (s[(0, 1)] + s[(1, 0)]));
    vec![mean - half, mean + half]
}
