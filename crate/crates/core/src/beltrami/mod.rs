//! The nonlinear Beltrami equation `f_r = σ |f_θ|^m f_θ` with a radially
//! symmetric coefficient.
//!
//! For `f = R(r) e^{iθ}` the equation reduces to the real ODE
//! `R' = Im(σ̄(r)) R^{m+1}`, which [`solve_radial`] integrates from an
//! interior anchor.

mod cartesian;
mod solver;

pub use cartesian::{to_cartesian, CartesianEval};
pub use solver::{
    condition_sigma0, dilatation_from_sigma, residual_check, solve_radial, theorem_nb_bound,
    NbOutcome, RadialSolution, Sigma0,
};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::MonotoneCubic;

type SigmaFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Family {
    Power {
        kappa: f64,
    },
    Sampled {
        re: MonotoneCubic,
        im: MonotoneCubic,
    },
    Custom {
        label: String,
        f: SigmaFn,
    },
}

/// A radial coefficient `σ(r)` together with the exponent `m ≥ 0`.
#[derive(Clone)]
pub struct SigmaCoefficient {
    m: f64,
    family: Family,
}

impl fmt::Debug for SigmaCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigmaCoefficient")
            .field("m", &self.m)
            .field("family", &self.label())
            .finish()
    }
}

fn check_m(m: f64) -> Result<()> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::BadParameter(format!(
            "m: need a finite m >= 0, got {m}"
        )));
    }
    Ok(())
}

impl SigmaCoefficient {
    /// `σ(r) = -i / (κ r^{m+1})`, whose solutions include `κ^{1/m} z`.
    pub fn power(kappa: f64, m: f64) -> Result<Self> {
        check_m(m)?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::BadParameter(format!(
                "kappa: need kappa > 0, got {kappa}"
            )));
        }
        Ok(Self {
            m,
            family: Family::Power { kappa },
        })
    }

    /// Monotone cubic interpolation of `[r, Re σ, Im σ]` samples.
    pub fn from_samples(m: f64, samples: &[[f64; 3]]) -> Result<Self> {
        check_m(m)?;
        let r: Vec<f64> = samples.iter().map(|s| s[0]).collect();
        if r.first().is_some_and(|v| *v <= 0.0) || r.last().is_some_and(|v| *v > 1.0) {
            return Err(Error::InvalidProfile(
                "sample radii must lie in (0, 1]".into(),
            ));
        }
        let re = MonotoneCubic::pchip(r.clone(), samples.iter().map(|s| s[1]).collect())?;
        let im = MonotoneCubic::pchip(r, samples.iter().map(|s| s[2]).collect())?;
        Ok(Self {
            m,
            family: Family::Sampled { re, im },
        })
    }

    pub fn custom<F>(label: impl Into<String>, m: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        check_m(m)?;
        Ok(Self {
            m,
            family: Family::Custom {
                label: label.into(),
                f: Arc::new(f),
            },
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::Power { kappa } => format!("power(kappa={kappa}, m={})", self.m),
            Family::Sampled { .. } => format!("custom_radial(m={})", self.m),
            Family::Custom { label, .. } => label.clone(),
        }
    }

    /// `κ` of the power family.
    pub fn kappa(&self) -> Option<f64> {
        match self.family {
            Family::Power { kappa } => Some(kappa),
            _ => None,
        }
    }

    /// Radii where `σ` is defined, `None` meaning all of `(0, 1]`.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match &self.family {
            Family::Sampled { re, .. } => Some(re.domain()),
            _ => None,
        }
    }

    pub fn sigma(&self, r: f64) -> Result<Complex64> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidRadius(r));
        }
        Ok(match &self.family {
            Family::Power { kappa } => Complex64::new(0.0, -1.0 / (kappa * r.powf(self.m + 1.0))),
            Family::Sampled { re, im } => {
                let a = re.eval(r).ok_or(Error::OutsideProfile(r))?.0;
                let b = im.eval(r).ok_or(Error::OutsideProfile(r))?.0;
                Complex64::new(a, b)
            }
            Family::Custom { f, .. } => f(r),
        })
    }

    /// `Im(σ̄(r))`, required to be positive.
    pub fn im_conj(&self, r: f64) -> Result<f64> {
        let value = -self.sigma(r)?.im;
        if !(value > 0.0) {
            return Err(Error::NonPositiveImag { r, value });
        }
        Ok(value)
    }
}

/// JSON form of a coefficient:
/// `{"family": "power", "kappa": 2, "m": 1}` or
/// `{"family": "custom_radial", "m": 1, "samples": [[r, re, im], ...]}`.
/// `m` defaults to 1 for sampled coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoefficientSpec {
    Power {
        kappa: f64,
        m: f64,
    },
    CustomRadial {
        #[serde(default = "default_m")]
        m: f64,
        samples: Vec<[f64; 3]>,
    },
}

fn default_m() -> f64 {
    1.0
}

impl CoefficientSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<SigmaCoefficient> {
        match self {
            CoefficientSpec::Power { kappa, m } => SigmaCoefficient::power(*kappa, *m),
            CoefficientSpec::CustomRadial { m, samples } => {
                SigmaCoefficient::from_samples(*m, samples)
            }
        }
    }
}
