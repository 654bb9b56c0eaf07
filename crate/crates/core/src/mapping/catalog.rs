//! Closed-form example maps.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{DerivativeKind, MappingModel, Partials, PolarPoint};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre8;

/// `f(z) = kz` with `0 < |k| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    k: Complex64,
}

impl Linear {
    pub fn new(k: Complex64) -> Result<Self> {
        let m = k.norm();
        if !(m > 0.0 && m <= 1.0) {
            return Err(Error::BadParameter(format!(
                "k: need 0 < |k| <= 1, got {m}"
            )));
        }
        Ok(Self { k })
    }

    pub fn identity() -> Self {
        Self {
            k: Complex64::new(1.0, 0.0),
        }
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }
}

impl MappingModel for Linear {
    fn label(&self) -> String {
        if self.k == Complex64::new(1.0, 0.0) {
            "identity".into()
        } else if self.k.im == 0.0 {
            format!("linear(k={})", self.k.re)
        } else {
            format!("linear(k={}{:+}i)", self.k.re, self.k.im)
        }
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }

    fn value(&self, z: PolarPoint) -> Complex64 {
        self.k * z.to_complex()
    }

    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        let e = Complex64::from_polar(1.0, z.theta());
        Ok(Partials {
            f_r: self.k * e,
            f_theta: self.k * Complex64::i() * z.r() * e,
        })
    }
}

/// Radial stretching `f(z) = z|z|^α`, `α > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialStretch {
    alpha: f64,
}

impl RadialStretch {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::BadParameter(format!(
                "alpha: need alpha > 0, got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl MappingModel for RadialStretch {
    fn label(&self) -> String {
        format!("radial_stretch(alpha={})", self.alpha)
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }

    fn value(&self, z: PolarPoint) -> Complex64 {
        Complex64::from_polar(z.r().powf(self.alpha + 1.0), z.theta())
    }

    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        let (r, a) = (z.r(), self.alpha);
        let e = Complex64::from_polar(1.0, z.theta());
        Ok(Partials {
            f_r: (a + 1.0) * r.powf(a) * e,
            f_theta: Complex64::i() * r.powf(a + 1.0) * e,
        })
    }
}

const LOG_PANEL: f64 = 0.05;
const LOG_TABLE_END: f64 = 480.0;

/// The automorphism `f(z) = I(|z|)^{1/(2-p)} z/|z|` with
/// `I(r) = 1 + (p-2)∫_r^1 dt / (t^{p-1} ln^{p-1}(e/t))`, `p > 2`.
///
/// Its `p`-angular dilatation is `ln^{p-1}(e/r)`, whose disc means blow up
/// at the origin.
///
/// `I` is evaluated in the variable `u = ln(e/t)`, where the integrand
/// becomes `e^{(2-p)(1-u)} u^{1-p}`. Cumulative Gauss–Legendre panel sums
/// are tabulated once, so each evaluation costs one partial panel.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSingular {
    p: f64,
    cumulative: Vec<f64>,
}

impl LogSingular {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 2.0 && p.is_finite()) {
            return Err(Error::BadParameter(format!("p: need p > 2, got {p}")));
        }
        let panels = ((LOG_TABLE_END - 1.0) / LOG_PANEL).ceil() as usize;
        let mut cumulative = Vec::with_capacity(panels + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for k in 0..panels {
            let a = 1.0 + k as f64 * LOG_PANEL;
            acc += gauss_legendre8(a, a + LOG_PANEL, |u| Self::integrand(p, u));
            cumulative.push(acc);
        }
        Ok(Self { p, cumulative })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn integrand(p: f64, u: f64) -> f64 {
        ((2.0 - p) * (1.0 - u)).exp() * u.powf(1.0 - p)
    }

    fn cumulative_at(&self, u: f64) -> f64 {
        let pos = ((u - 1.0) / LOG_PANEL).max(0.0);
        let k = pos.floor() as usize;
        let last = self.cumulative.len() - 1;
        let mut acc;
        if k <= last {
            acc = self.cumulative[k];
        } else {
            acc = self.cumulative[last];
            for j in last..k {
                let a = 1.0 + j as f64 * LOG_PANEL;
                acc += gauss_legendre8(a, a + LOG_PANEL, |v| Self::integrand(self.p, v));
            }
        }
        let a = 1.0 + k as f64 * LOG_PANEL;
        if u > a {
            acc += gauss_legendre8(a, u, |v| Self::integrand(self.p, v));
        }
        acc
    }

    /// `I(r)`.
    pub fn i_of(&self, r: f64) -> f64 {
        let u = 1.0 - r.ln();
        1.0 + (self.p - 2.0) * self.cumulative_at(u)
    }

    /// `R(r) = I(r)^{-1/(p-2)}`, `R(0) = 0`.
    pub fn profile(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        self.i_of(r).powf(-1.0 / (self.p - 2.0))
    }

    /// `R'(r) = R(r) r^{1-p} ln^{1-p}(e/r) / I(r)`.
    pub fn profile_derivative(&self, r: f64) -> f64 {
        let i = self.i_of(r);
        let big_r = i.powf(-1.0 / (self.p - 2.0));
        let u = 1.0 - r.ln();
        big_r * r.powf(1.0 - self.p) * u.powf(1.0 - self.p) / i
    }
}

impl MappingModel for LogSingular {
    fn label(&self) -> String {
        format!("log_singular(p={})", self.p)
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }

    fn value(&self, z: PolarPoint) -> Complex64 {
        Complex64::from_polar(self.profile(z.r()), z.theta())
    }

    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        let r = z.r();
        let i = self.i_of(r);
        let big_r = i.powf(-1.0 / (self.p - 2.0));
        let u = 1.0 - r.ln();
        let d = big_r * r.powf(1.0 - self.p) * u.powf(1.0 - self.p) / i;
        let e = Complex64::from_polar(1.0, z.theta());
        Ok(Partials {
            f_r: d * e,
            f_theta: Complex64::i() * big_r * e,
        })
    }
}

/// The exact radial solution `f = κ^{1/m} r e^{iθ}` of
/// `f_r = -i/(κ r^{m+1}) |f_θ|^m f_θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeltramiExact {
    m: f64,
    kappa: f64,
}

impl BeltramiExact {
    pub fn new(m: f64, kappa: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::BadParameter(format!("m: need m > 0, got {m}")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::BadParameter(format!(
                "kappa: need kappa > 0, got {kappa}"
            )));
        }
        Ok(Self { m, kappa })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `κ^{1/m}`, the limit of `|f(z)|/|z|`.
    pub fn scale(&self) -> f64 {
        self.kappa.powf(1.0 / self.m)
    }
}

impl MappingModel for BeltramiExact {
    fn label(&self) -> String {
        format!("beltrami_exact(m={},kappa={})", self.m, self.kappa)
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }

    fn value(&self, z: PolarPoint) -> Complex64 {
        Complex64::from_polar(self.scale() * z.r(), z.theta())
    }

    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        let c = self.scale();
        let e = Complex64::from_polar(1.0, z.theta());
        Ok(Partials {
            f_r: c * e,
            f_theta: Complex64::i() * c * z.r() * e,
        })
    }
}

/// The example families, selectable by name.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogMap {
    Linear(Linear),
    RadialStretch(RadialStretch),
    LogSingular(LogSingular),
    BeltramiExact(BeltramiExact),
}

impl CatalogMap {
    pub const NAMES: [&'static str; 5] = [
        "identity",
        "linear",
        "radial_stretch",
        "log_singular",
        "beltrami_exact",
    ];

    /// Builds a catalog map from its name and named parameters.
    ///
    /// `linear` takes `k` (and optionally `k_im`), `radial_stretch` takes
    /// `alpha`, `log_singular` takes `p`, `beltrami_exact` takes `m` and
    /// `kappa`.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str| {
            params
                .get(key)
                .copied()
                .ok_or_else(|| Error::BadParameter(key.to_string()))
        };
        match name {
            "identity" => Ok(Self::Linear(Linear::identity())),
            "linear" => {
                let k = Complex64::new(get("k")?, params.get("k_im").copied().unwrap_or(0.0));
                Ok(Self::Linear(Linear::new(k)?))
            }
            "radial_stretch" => Ok(Self::RadialStretch(RadialStretch::new(get("alpha")?)?)),
            "log_singular" => Ok(Self::LogSingular(LogSingular::new(get("p")?)?)),
            "beltrami_exact" => Ok(Self::BeltramiExact(BeltramiExact::new(
                get("m")?,
                get("kappa")?,
            )?)),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }

    /// One self-map of the disc per family: `k = 0.5`, `α = 1`, `p = 3`,
    /// and `(m, κ) = (2, 0.81)` so that `κ^{1/m} = 0.9 ≤ 1`.
    pub fn representatives() -> Vec<CatalogMap> {
        vec![
            Self::Linear(Linear::new(Complex64::new(0.5, 0.0)).unwrap()),
            Self::RadialStretch(RadialStretch::new(1.0).unwrap()),
            Self::LogSingular(LogSingular::new(3.0).unwrap()),
            Self::BeltramiExact(BeltramiExact::new(2.0, 0.81).unwrap()),
        ]
    }

    fn as_model(&self) -> &dyn MappingModel {
        match self {
            Self::Linear(m) => m,
            Self::RadialStretch(m) => m,
            Self::LogSingular(m) => m,
            Self::BeltramiExact(m) => m,
        }
    }

    /// Whether `|f| ≤ 1` on the disc.
    pub fn maps_into_disc(&self) -> bool {
        match self {
            Self::BeltramiExact(b) => b.scale() <= 1.0,
            _ => true,
        }
    }

    /// Radial profile `R(r) = |f(re^{iθ})|`; every catalog map is
    /// rotationally symmetric in modulus.
    pub fn modulus(&self, r: f64) -> f64 {
        match self {
            Self::Linear(m) => m.k.norm() * r,
            Self::RadialStretch(m) => r.powf(m.alpha + 1.0),
            Self::LogSingular(m) => m.profile(r),
            Self::BeltramiExact(m) => m.scale() * r,
        }
    }

    /// Closed-form `D_p` at radius `r` (independent of `θ`).
    pub fn dilatation(&self, r: f64, p: f64) -> f64 {
        match self {
            Self::Linear(m) => m.k.norm().powf(p - 2.0),
            Self::RadialStretch(m) => r.powf(m.alpha * (p - 2.0)) / (m.alpha + 1.0),
            Self::LogSingular(m) => {
                let i = m.i_of(r);
                let big_r = i.powf(-1.0 / (m.p - 2.0));
                let u = 1.0 - r.ln();
                big_r.powf(p - 2.0) * i * u.powf(m.p - 1.0) * r.powf(m.p - p)
            }
            Self::BeltramiExact(m) => m.scale().powf(p - 2.0),
        }
    }

    /// Closed-form circular mean `d_p(r)`; equal to `D_p` because `D_p` is
    /// constant on circles for every catalog map.
    pub fn circular_dilatation(&self, r: f64, p: f64) -> f64 {
        self.dilatation(r, p)
    }

    /// Closed-form area `S(r)` of the image of `B_r`.
    pub fn area(&self, r: f64) -> f64 {
        PI * self.modulus(r).powi(2)
    }

    /// Closed-form length of the image of `|z| = r`.
    pub fn length(&self, r: f64) -> f64 {
        2.0 * PI * self.modulus(r)
    }
}

impl MappingModel for CatalogMap {
    fn label(&self) -> String {
        self.as_model().label()
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }

    fn value(&self, z: PolarPoint) -> Complex64 {
        self.as_model().value(z)
    }

    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        self.as_model().partials(z)
    }
}
