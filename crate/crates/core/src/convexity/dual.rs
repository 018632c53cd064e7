use crate::sphere_fn::SphereField;
use crate::tangent::{generalized_eigenvalues, Mat3, TangentBasis, TangentForm, Vec3};

/// The embedding φ(θ) = θ / γ(−θ) of Sⁿ onto the boundary of the dual body,
/// with exact first and second derivatives.
pub struct DualMap<'a, F: SphereField + ?Sized> {
    gamma: &'a F,
}

/// φ and its ambient derivatives at a unit vector.
#[derive(Debug, Clone, Copy)]
pub struct DualJet {
    pub point: Vec3,
    /// Dφ (columns are ∂φ/∂xⱼ).
    pub d: Mat3,
    /// Hessian of each component of φ.
    pub d2: [Mat3; 3],
}

/// Local differential geometry of φ(Sⁿ) at φ(θ).
#[derive(Debug, Clone)]
pub struct SurfaceFrame {
    pub point: Vec3,
    pub basis: TangentBasis,
    /// ∂(φ∘c)/∂aⱼ for the chart c(a) = normalize(θ + Σ aⱼeⱼ).
    pub tangents: [Vec3; 2],
    /// Unit normal pointing into the bounded component.
    pub normal: Vec3,
    pub metric: TangentForm,
    /// Second fundamental form with respect to `normal`.
    pub second_form: TangentForm,
    /// Principal curvatures, ascending; positive where the boundary bends
    /// towards the interior.
    pub curvatures: Vec<f64>,
}

impl<'a, F: SphereField + ?Sized> DualMap<'a, F> {
    pub fn new(gamma: &'a F) -> Self {
        Self { gamma }
    }

    pub fn dimension(&self) -> usize {
        self.gamma.dimension()
    }

    pub fn point(&self, theta: &Vec3) -> Vec3 {
        theta / self.gamma.value(&(-theta))
    }

    pub fn jet(&self, theta: &Vec3) -> DualJet {
        let amb = self.gamma.ambient_jet(&(-theta));
        // q(x) = γ(−x), s = 1/q
        let q = amb.value;
        let dq = -amb.gradient;
        let ddq = amb.hessian;
        let s = 1.0 / q;
        let ds = -dq / (q * q);
        let dds = -ddq / (q * q) + dq * dq.transpose() * (2.0 / (q * q * q));
        let d = Mat3::identity() * s + theta * ds.transpose();
        let mut d2 = [Mat3::zeros(); 3];
        for (k, m) in d2.iter_mut().enumerate() {
            let mut ek = Vec3::zeros();
            ek[k] = 1.0;
            *m = ek * ds.transpose() + ds * ek.transpose() + dds * theta[k];
        }
        DualJet {
            point: theta * s,
            d,
            d2,
        }
    }

    pub fn frame(&self, theta: &Vec3) -> SurfaceFrame {
        let dim = self.dimension();
        let jet = self.jet(theta);
        let basis = TangentBasis::at(dim, theta);
        let mut tangents = [Vec3::zeros(); 2];
        for j in 0..dim {
            tangents[j] = jet.d * basis.e[j];
        }
        let mut normal = if dim == 1 {
            Vec3::new(-tangents[0].y, tangents[0].x, 0.0).normalize()
        } else {
            tangents[0].cross(&tangents[1]).normalize()
        };
        if normal.dot(&jet.point) > 0.0 {
            normal = -normal;
        }
        let d_theta = jet.d * theta;
        let mut metric = TangentForm::zero(dim);
        let mut second_form = TangentForm::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                metric.m[(i, j)] = tangents[i].dot(&tangents[j]);
                let (ei, ej) = (basis.e[i], basis.e[j]);
                let mut dd = Vec3::new(
                    ei.dot(&(jet.d2[0] * ej)),
                    ei.dot(&(jet.d2[1] * ej)),
                    ei.dot(&(jet.d2[2] * ej)),
                );
                if i == j {
                    dd -= d_theta;
                }
                second_form.m[(i, j)] = normal.dot(&dd);
            }
        }
        let curvatures = generalized_eigenvalues(&second_form, &metric);
        SurfaceFrame {
            point: jet.point,
            basis,
            tangents,
            normal,
            metric,
            second_form,
            curvatures,
        }
    }
}
