use num_complex::Complex64;
use serde::Serialize;

use super::SigmaCoefficient;
use crate::error::{Error, Result};
use crate::mapping::PolarPoint;

/// The Cartesian form `f_z̄ = ((A w^m - 1)/(A w^m + 1)) (z/z̄) f_z`,
/// `w = |z f_z - z̄ f_z̄|`, `A = σ |z| i`, evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CartesianEval {
    pub a: Complex64,
    /// Complex dilatation `(z/z̄)(A-1)/(A+1)`, only for `m = 0`.
    pub mu: Option<Complex64>,
    /// `(1+|μ|)/(1-|μ|)` where `|μ| < 1`.
    pub k_mu: Option<f64>,
    /// `f_z̄` predicted from `f_z`.
    pub predicted_fzbar: Complex64,
    /// `|f_z̄ - predicted|`.
    pub residual: f64,
}

pub fn to_cartesian(
    coef: &SigmaCoefficient,
    z: PolarPoint,
    f_z: Complex64,
    f_zbar: Complex64,
) -> Result<CartesianEval> {
    let zc = z.to_complex();
    let rot = zc / zc.conj();
    let a = coef.sigma(z.r())? * z.r() * Complex64::i();
    let m = coef.m();
    let w = (zc * f_z - zc.conj() * f_zbar).norm().powf(m);
    let den = a * w + 1.0;
    if den.norm() < 1e-14 {
        return Err(Error::DegenerateDenominator(den.norm()));
    }
    let predicted_fzbar = (a * w - 1.0) / den * rot * f_z;
    let (mu, k_mu) = if m == 0.0 {
        let mu = rot * (a - 1.0) / (a + 1.0);
        let k = (mu.norm() < 1.0).then(|| (1.0 + mu.norm()) / (1.0 - mu.norm()));
        (Some(mu), k)
    } else {
        (None, None)
    };
    Ok(CartesianEval {
        a,
        mu,
        k_mu,
        predicted_fzbar,
        residual: (f_zbar - predicted_fzbar).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beltrami::residual_check;
    use crate::mapping::{BeltramiExact, MappingModel};

    #[test]
    fn conformal_case() {
        let coef = SigmaCoefficient::power(1.0, 0.0).unwrap();
        let z = PolarPoint::new(0.4, 0.9).unwrap();
        let e = to_cartesian(&coef, z, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!((e.a - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(e.mu.unwrap().norm() < 1e-15);
        assert!((e.k_mu.unwrap() - 1.0).abs() < 1e-15);
        assert!(e.residual < 1e-15);
    }

    #[test]
    fn real_a_gives_k_equal_a() {
        for big_a in [1.5, 3.0, 10.0] {
            // σ = -i A / r makes A(z) = A.
            let coef =
                SigmaCoefficient::custom("real A", 0.0, move |r| Complex64::new(0.0, -big_a / r))
                    .unwrap();
            for j in 0..12 {
                let z = PolarPoint::new(0.05 + 0.07 * j as f64, 0.5 * j as f64).unwrap();
                let e = to_cartesian(&coef, z, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
                    .unwrap();
                let mu = e.mu.unwrap().norm();
                assert!((mu - (big_a - 1.0) / (big_a + 1.0)).abs() < 1e-14);
                assert!(mu < 1.0);
                assert!((e.k_mu.unwrap() - big_a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_denominator() {
        let coef =
            SigmaCoefficient::custom("minus one", 0.0, |r| Complex64::new(0.0, 1.0 / r)).unwrap();
        let z = PolarPoint::new(0.5, 0.0).unwrap();
        assert!(matches!(
            to_cartesian(&coef, z, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn polar_and_cartesian_forms_agree() {
        let coef = SigmaCoefficient::power(2.0, 1.0).unwrap();
        let exact = BeltramiExact::new(1.0, 2.0).unwrap();
        let pts: Vec<PolarPoint> = (1..25)
            .map(|j| PolarPoint::new(0.035 * j as f64, 0.6 * j as f64).unwrap())
            .collect();
        let polar = residual_check(&exact, &coef, &pts).unwrap();
        let mut cart: f64 = 0.0;
        for z in &pts {
            let (fz, fzb) = exact.partials(*z).unwrap().wirtinger(*z);
            cart = cart.max(to_cartesian(&coef, *z, fz, fzb).unwrap().residual);
        }
        assert!(cart <= 1e-10, "{cart}");
        assert!((polar - cart).abs() <= 1e-8);
    }
}
