//! Maps of the unit disc in polar form.
//!
//! A map is anything implementing [`MappingModel`]: it returns `f(re^{iθ})`
//! together with the polar partials `f_r` and `f_θ`. The origin is never
//! evaluated; every routine works on the punctured disc.

mod catalog;
mod fd;
mod profile;

pub use catalog::{BeltramiExact, CatalogMap, Linear, LogSingular, RadialStretch};
pub use fd::{default_steps, finite_difference_partials, FiniteDifferenceMap};
pub use profile::{MonotoneCubic, ProfileSpec, RadialProfile, RadialProfileMap};

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::angles;

/// Values at or above this are treated as a negative Jacobian.
pub const JACOBIAN_TOLERANCE: f64 = 1e-12;

/// A point `re^{iθ}` of the punctured closed disc.
///
/// The outer circle `r = 1` is admitted so that radial integrals can reach
/// their upper limit; `θ` is normalised into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    r: f64,
    theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) || !theta.is_finite() {
            return Err(Error::InvalidRadius(r));
        }
        Ok(Self::unchecked(r, theta))
    }

    pub(crate) fn unchecked(r: f64, theta: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        Self { r, theta }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// Polar partial derivatives `(f_r, f_θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub f_r: Complex64,
    pub f_theta: Complex64,
}

impl Partials {
    pub fn is_finite(&self) -> bool {
        self.f_r.is_finite() && self.f_theta.is_finite()
    }

    /// Cartesian Wirtinger derivatives `(f_z, f_z̄)` at `z`.
    pub fn wirtinger(&self, z: PolarPoint) -> (Complex64, Complex64) {
        let e = Complex64::from_polar(1.0, z.theta);
        let rot = Complex64::i() / z.r * self.f_theta;
        let f_z = 0.5 * (self.f_r - rot) / e;
        let f_zbar = 0.5 * (self.f_r + rot) * e;
        (f_z, f_zbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeKind {
    Analytic,
    FiniteDifference,
}

/// A map of the unit disc evaluated in polar coordinates.
pub trait MappingModel: Send + Sync {
    fn label(&self) -> String;

    fn derivative_kind(&self) -> DerivativeKind;

    fn value(&self, z: PolarPoint) -> Complex64;

    fn partials(&self, z: PolarPoint) -> Result<Partials>;
}

impl<M: MappingModel + ?Sized> MappingModel for &M {
    fn label(&self) -> String {
        (**self).label()
    }
    fn derivative_kind(&self) -> DerivativeKind {
        (**self).derivative_kind()
    }
    fn value(&self, z: PolarPoint) -> Complex64 {
        (**self).value(z)
    }
    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        (**self).partials(z)
    }
}

impl<M: MappingModel + ?Sized> MappingModel for Box<M> {
    fn label(&self) -> String {
        (**self).label()
    }
    fn derivative_kind(&self) -> DerivativeKind {
        (**self).derivative_kind()
    }
    fn value(&self, z: PolarPoint) -> Complex64 {
        (**self).value(z)
    }
    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        (**self).partials(z)
    }
}

/// `J_f = (1/r)·Im(conj(f_r)·f_θ)` from already evaluated partials.
pub fn jacobian_from_partials(z: PolarPoint, d: &Partials) -> Result<f64> {
    if !d.is_finite() {
        return Err(Error::NonFiniteDerivative {
            r: z.r,
            theta: z.theta,
        });
    }
    let j = (d.f_r.conj() * d.f_theta).im / z.r;
    if j < -JACOBIAN_TOLERANCE {
        return Err(Error::DegenerateJacobian {
            r: z.r,
            theta: z.theta,
            value: j,
        });
    }
    Ok(j.max(0.0))
}

/// Jacobian of `map` at `z`. Values in `(-1e-12, 0]` are clamped to zero.
pub fn jacobian<M: MappingModel + ?Sized>(map: &M, z: PolarPoint) -> Result<f64> {
    let d = map.partials(z)?;
    jacobian_from_partials(z, &d)
}

/// `(min, max)` of `|f|` over `n_theta` equispaced points of the circle `|z| = r`.
pub fn min_max_modulus<M: MappingModel + ?Sized>(
    map: &M,
    r: f64,
    n_theta: usize,
) -> Result<(f64, f64)> {
    if n_theta < 8 {
        return Err(Error::InvalidConfig(format!(
            "n_theta must be at least 8, got {n_theta}"
        )));
    }
    PolarPoint::new(r, 0.0)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for theta in angles(n_theta) {
        let m = map.value(PolarPoint::unchecked(r, theta)).norm();
        lo = lo.min(m);
        hi = hi.max(m);
    }
    Ok((lo, hi))
}

/// Samples `map` on a polar grid and checks the regularity contract:
/// positive Jacobian everywhere and no jump between neighbouring samples
/// larger than ten times the first-order prediction from the partials.
pub fn check_regularity<M: MappingModel + ?Sized>(
    map: &M,
    radii: &[f64],
    n_theta: usize,
) -> Result<()> {
    let dtheta = TAU / n_theta as f64;
    let mut prev_ring: Option<(f64, Vec<(Complex64, Partials)>)> = None;
    for &r in radii {
        PolarPoint::new(r, 0.0)?;
        let ring: Vec<(Complex64, Partials)> = angles(n_theta)
            .map(|theta| {
                let z = PolarPoint::unchecked(r, theta);
                let d = map.partials(z)?;
                jacobian_from_partials(z, &d).and_then(|j| {
                    if j > 0.0 {
                        Ok((map.value(z), d))
                    } else {
                        Err(Error::DegenerateJacobian { r, theta, value: j })
                    }
                })
            })
            .collect::<Result<_>>()?;
        for k in 0..n_theta {
            let (v0, d0) = ring[k];
            let (v1, d1) = ring[(k + 1) % n_theta];
            let predicted = 0.5 * (d0.f_theta.norm() + d1.f_theta.norm()) * dtheta;
            let jump = (v1 - v0).norm();
            if jump > 10.0 * predicted + 1e-12 {
                return Err(Error::Discontinuity {
                    r,
                    theta: k as f64 * dtheta,
                    jump,
                });
            }
        }
        if let Some((r_prev, prev)) = &prev_ring {
            let dr = (r - r_prev).abs();
            for (k, ((v0, d0), (v1, d1))) in prev.iter().zip(&ring).enumerate() {
                let predicted = 0.5 * (d0.f_r.norm() + d1.f_r.norm()) * dr;
                let jump = (v1 - v0).norm();
                if jump > 10.0 * predicted + 1e-12 {
                    return Err(Error::Discontinuity {
                        r,
                        theta: k as f64 * dtheta,
                        jump,
                    });
                }
            }
        }
        prev_ring = Some((r, ring));
    }
    Ok(())
}

/// `g(z) = e^{iβ} f(e^{iγ} z)`.
pub struct Rotated<M> {
    pub inner: M,
    pub beta: f64,
    pub gamma: f64,
}

impl<M: MappingModel> MappingModel for Rotated<M> {
    fn label(&self) -> String {
        format!("rotated({})", self.inner.label())
    }

    fn derivative_kind(&self) -> DerivativeKind {
        self.inner.derivative_kind()
    }

    fn value(&self, z: PolarPoint) -> Complex64 {
        let w = PolarPoint::unchecked(z.r, z.theta + self.gamma);
        Complex64::from_polar(1.0, self.beta) * self.inner.value(w)
    }

    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        let w = PolarPoint::unchecked(z.r, z.theta + self.gamma);
        let e = Complex64::from_polar(1.0, self.beta);
        let d = self.inner.partials(w)?;
        Ok(Partials {
            f_r: e * d.f_r,
            f_theta: e * d.f_theta,
        })
    }
}
