use num_complex::Complex64;

use super::{DerivativeKind, MappingModel, Partials, PolarPoint};
use crate::error::{Error, Result};

/// Default central-difference steps `(h_r, h_θ)` at radius `r`.
pub fn default_steps(r: f64) -> (f64, f64) {
    (1e-5 * r.max(1e-3), 1e-5)
}

/// Central-difference estimates of `(f_r, f_θ)` for a value-only map.
///
/// The radial stencil `[r - h_r, r + h_r]` must stay inside `(0, 1)`.
pub fn finite_difference_partials<F>(
    f: F,
    z: PolarPoint,
    h_r: f64,
    h_theta: f64,
) -> Result<(Complex64, Complex64)>
where
    F: Fn(f64, f64) -> Complex64,
{
    let (r, t) = (z.r(), z.theta());
    if r - h_r <= 0.0 || r + h_r >= 1.0 {
        return Err(Error::StepTooLarge { r, h_r });
    }
    let f_r = (f(r + h_r, t) - f(r - h_r, t)) / (2.0 * h_r);
    let f_theta = (f(r, t + h_theta) - f(r, t - h_theta)) / (2.0 * h_theta);
    Ok((f_r, f_theta))
}

/// A map given only by its values; partials come from central differences.
///
/// On the outer circle, where the central stencil would leave the disc, the
/// radial derivative switches to the second-order backward formula.
pub struct FiniteDifferenceMap<F> {
    label: String,
    f: F,
}

impl<F> FiniteDifferenceMap<F>
where
    F: Fn(f64, f64) -> Complex64 + Send + Sync,
{
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self {
            label: label.into(),
            f,
        }
    }
}

impl<F> MappingModel for FiniteDifferenceMap<F>
where
    F: Fn(f64, f64) -> Complex64 + Send + Sync,
{
    fn label(&self) -> String {
        self.label.clone()
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::FiniteDifference
    }

    fn value(&self, z: PolarPoint) -> Complex64 {
        (self.f)(z.r(), z.theta())
    }

    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        let (h_r, h_theta) = default_steps(z.r());
        match finite_difference_partials(&self.f, z, h_r, h_theta) {
            Ok((f_r, f_theta)) => Ok(Partials { f_r, f_theta }),
            Err(Error::StepTooLarge { .. }) if z.r() - 2.0 * h_r > 0.0 => {
                let (r, t) = (z.r(), z.theta());
                let f = &self.f;
                let f_r = (3.0 * f(r, t) - 4.0 * f(r - h_r, t) + f(r - 2.0 * h_r, t)) / (2.0 * h_r);
                let f_theta = (f(r, t + h_theta) - f(r, t - h_theta)) / (2.0 * h_theta);
                Ok(Partials { f_r, f_theta })
            }
            Err(e) => Err(e),
        }
    }
}
