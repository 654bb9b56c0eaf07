//! Rotationally symmetric maps `R(r) e^{iθ}` built from sampled profiles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DerivativeKind, MappingModel, Partials, PolarPoint};
use crate::error::{Error, Result};

/// Piecewise cubic Hermite interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// Fritsch–Carlson monotone interpolation (PCHIP slopes).
    pub fn pchip(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_nodes(&x, &y)?;
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    /// Cubic Hermite interpolation with prescribed node derivatives.
    pub fn hermite(x: Vec<f64>, y: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        check_nodes(&x, &y)?;
        if d.len() != x.len() {
            return Err(Error::InvalidProfile("derivative count mismatch".into()));
        }
        Ok(Self { x, y, d })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    /// `(value, derivative)` at `t`, or `None` outside the node range.
    pub fn eval(&self, t: f64) -> Option<(f64, f64)> {
        let (a, b) = self.domain();
        if !(t >= a && t <= b) {
            return None;
        }
        let i = match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = 6.0 * s2 - 6.0 * s;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = -6.0 * s2 + 6.0 * s;
        let dh11 = 3.0 * s2 - 2.0 * s;
        let deriv = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
        Some((value, deriv))
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 <= 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

fn check_nodes(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidProfile("length mismatch".into()));
    }
    if x.len() < 2 {
        return Err(Error::InvalidProfile("need at least two samples".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidProfile("non-finite sample".into()));
    }
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidProfile(
            "radii must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// A scalar profile `R(r)` with derivative, defined on a closed radius range.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    curve: MonotoneCubic,
}

impl RadialProfile {
    /// Monotone cubic interpolation of `(r, R)` samples.
    ///
    /// Radii must lie in `[0, 1]`, `R` must be strictly increasing with
    /// `0 ≤ R ≤ 1`.
    pub fn from_samples(samples: &[[f64; 2]]) -> Result<Self> {
        let x: Vec<f64> = samples.iter().map(|s| s[0]).collect();
        let y: Vec<f64> = samples.iter().map(|s| s[1]).collect();
        if x.first().is_some_and(|r| *r < 0.0) || x.last().is_some_and(|r| *r > 1.0) {
            return Err(Error::InvalidProfile("radii must lie in [0, 1]".into()));
        }
        if y.first().is_some_and(|v| *v < 0.0) || y.last().is_some_and(|v| *v > 1.0) {
            return Err(Error::InvalidProfile(
                "profile values must lie in [0, 1]".into(),
            ));
        }
        let profile = Self {
            curve: MonotoneCubic::pchip(x, y)?,
        };
        profile.check_increasing()?;
        Ok(profile)
    }

    /// Hermite interpolation of nodes with known derivatives, e.g. an ODE
    /// solution. Values are not required to stay below one.
    pub fn from_hermite(r: Vec<f64>, values: Vec<f64>, derivatives: Vec<f64>) -> Result<Self> {
        let profile = Self {
            curve: MonotoneCubic::hermite(r, values, derivatives)?,
        };
        profile.check_increasing()?;
        Ok(profile)
    }

    fn check_increasing(&self) -> Result<()> {
        let (_, y) = self.curve.nodes();
        if y.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile(
                "profile must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        self.curve.domain()
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        self.curve.nodes()
    }

    /// `R(r)`; `NaN` outside the sampled range.
    pub fn value(&self, r: f64) -> f64 {
        self.curve.eval(r).map_or(f64::NAN, |v| v.0)
    }

    /// `(R(r), R'(r))`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        self.curve.eval(r).ok_or(Error::OutsideProfile(r))
    }

    pub fn within_unit_disc(&self) -> bool {
        let (_, y) = self.curve.nodes();
        y.iter().all(|v| *v <= 1.0)
    }
}

/// The map `R(r) e^{iθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfileMap {
    label: String,
    profile: RadialProfile,
}

impl RadialProfileMap {
    pub fn new(label: impl Into<String>, profile: RadialProfile) -> Self {
        Self {
            label: label.into(),
            profile,
        }
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }
}

impl MappingModel for RadialProfileMap {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }

    fn value(&self, z: PolarPoint) -> Complex64 {
        Complex64::from_polar(self.profile.value(z.r()), z.theta())
    }

    fn partials(&self, z: PolarPoint) -> Result<Partials> {
        let (big_r, d) = self.profile.eval(z.r())?;
        let e = Complex64::from_polar(1.0, z.theta());
        Ok(Partials {
            f_r: d * e,
            f_theta: Complex64::i() * big_r * e,
        })
    }
}

/// JSON document describing a sampled radial map:
/// `{"type": "radial_profile", "samples": [[r, R], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    #[serde(rename = "type")]
    pub kind: String,
    pub samples: Vec<[f64; 2]>,
}

impl ProfileSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        if spec.kind != "radial_profile" {
            return Err(Error::UnknownModel(spec.kind));
        }
        Ok(spec)
    }

    pub fn build(&self) -> Result<RadialProfileMap> {
        Ok(RadialProfileMap::new(
            "radial_profile",
            RadialProfile::from_samples(&self.samples)?,
        ))
    }
}
