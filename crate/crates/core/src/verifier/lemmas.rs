use std::f64::consts::PI;

use rayon::prelude::*;

use super::{BoundReport, Flag, RadiusLadder};
use crate::error::{Error, Result};
use crate::functionals::{
    angular_dilatation, area, area_rate, boundary_length, circular_dilatation, circular_mean,
    disc_integral, inner_integral, outer_integral, reciprocal_integral, DilatationOrder,
    QuadratureConfig,
};
use crate::mapping::{MappingModel, PolarPoint};
use crate::series::RadialSeries;

/// `x^{-a}` for the bounds below, with `0^{-a} = ∞` and `∞^{-a} = 0`.
fn inv_pow(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else if x == f64::INFINITY {
        0.0
    } else {
        x.powf(-a)
    }
}

fn over(num: f64, d: f64) -> f64 {
    if d == f64::INFINITY {
        0.0
    } else if d == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / d
    }
}

/// `S'(r) ≥ 2π^{(2-p)/2} r^{1-p} S(r)^{p/2} / d_p(r)` and the intermediate
/// `S'(r) ≥ L(r)^p / ((2πr)^{p-1} d_p(r))` on every rung.
pub fn check_lemma1<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    ladder.validate_against(cfg.r_min)?;
    let pv = p.get();
    let mut report = BoundReport::new("lemma1", pv);
    for r in ladder.rungs() {
        let s = area(map, r, cfg)?;
        let ds = area_rate(map, r, cfg)?;
        let d = circular_dilatation(map, r, p, cfg)?;
        let l = boundary_length(map, r, cfg)?;
        let area_bound = over(
            2.0 * PI.powf((2.0 - pv) / 2.0) * r.powf(1.0 - pv) * s.powf(pv / 2.0),
            d,
        );
        let length_bound = over(l.powf(pv) / (2.0 * PI * r).powf(pv - 1.0), d);
        report.relation(r, "area-rate", ds, area_bound);
        report.relation(r, "length-rate", ds, length_bound);
    }
    Ok(report.finish(true))
}

/// `∫_{r1}^{r2} L(r)^p / ((2πr)^{p-1} d_p(r)) dr ≤ S(r2) - S(r1)`.
pub fn check_length_area<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    r1: f64,
    r2: f64,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    if !(r1 > 0.0 && r2 > r1 && r2 <= 1.0) {
        return Err(Error::EmptyRange {
            lower: r1,
            upper: r2,
        });
    }
    let pv = p.get();
    let grid = cfg.radial_grid(r1, r2);
    let integrand: Vec<f64> = grid
        .par_iter()
        .map(|r| {
            let l = boundary_length(map, *r, cfg)?;
            let d = circular_dilatation(map, *r, p, cfg)?;
            Ok(over(l.powf(pv) / (2.0 * PI * r).powf(pv - 1.0), d))
        })
        .collect::<Result<_>>()?;
    let lhs = cfg.integrate(&grid, &integrand);
    let growth = area(map, r2, cfg)? - area(map, r1, cfg)?;
    let mut report = BoundReport::new("length-area", pv);
    report.relation(r1, "length-area", growth, lhs);
    report.radii.push(r2);
    Ok(report.finish(true))
}

/// `S(r) ≤ π (p-2)^{-2/(p-2)} (∫_r^1 dt/(t^{p-1} d_p))^{-2/(p-2)}`, `p > 2`.
pub fn check_lemma2<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    let p = p.require_above_two()?;
    ladder.validate_against(cfg.r_min)?;
    let pv = p.get();
    let e = 2.0 / (pv - 2.0);
    let mut report = BoundReport::new("lemma2", pv);
    for r in ladder.rungs() {
        let s = area(map, r, cfg)?;
        let integral = outer_integral(map, r, p, cfg)?;
        let bound = PI * (pv - 2.0).powf(-e) * inv_pow(integral, e);
        report.relation(r, "area-outer", bound, s);
    }
    Ok(report.finish(true))
}

/// Evaluates both sides of the circular versus disc mean comparison on
/// `[ε, 2ε]` for an arbitrary nonnegative field `Q`:
/// `(∫_ε^{2ε} dr/(r^{p-1} q_p))^{-1} ≤ 2^{p-1} ε^{p-2} ((1/4πε²) ∬_{B_{2ε}} Q^{1/(p-1)})^{p-1}`.
pub fn check_lemma3<Q>(
    q: Q,
    p: DilatationOrder,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<BoundReport>
where
    Q: Fn(PolarPoint) -> Result<f64> + Sync,
{
    let mut report = BoundReport::new("lemma3", p.get());
    lemma3_rung(&q, p, eps, cfg, &mut report)?;
    Ok(report.finish(true))
}

/// [`check_lemma3`] with `Q = D_p` of `map` at every rung `ε ≤ 1/2`.
pub fn check_lemma3_ladder<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    ladder.validate_against(cfg.r_min)?;
    let q = |z: PolarPoint| angular_dilatation(map, z, p);
    let mut report = BoundReport::new("lemma3", p.get());
    for eps in ladder.rungs() {
        lemma3_rung(&q, p, eps, cfg, &mut report)?;
    }
    Ok(report.finish(true))
}

fn lemma3_rung<Q>(
    q: &Q,
    p: DilatationOrder,
    eps: f64,
    cfg: &QuadratureConfig,
    report: &mut BoundReport,
) -> Result<()>
where
    Q: Fn(PolarPoint) -> Result<f64> + Sync,
{
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidRadius(eps));
    }
    let pv = p.get();
    let grid = cfg.radial_grid(eps, 2.0 * eps);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|t| circular_mean(q, *t, p, cfg))
        .collect::<Result<_>>()?;
    let series = RadialSeries::new(grid, values)?;
    let integral = reciprocal_integral(&series, 0, series.len() - 1, p);
    let lhs = inv_pow(integral, 1.0);
    let disc = disc_integral(q, 2.0 * eps, p, cfg)?;
    let rhs =
        2f64.powf(pv - 1.0) * eps.powf(pv - 2.0) * (disc / (4.0 * PI * eps * eps)).powf(pv - 1.0);
    report.relation(eps, "circle-disc", rhs, lhs);
    Ok(())
}

/// `S(r) ≥ π (2-p)^{2/(2-p)} (∫_0^r dt/(t^{p-1} d_p))^{2/(2-p)}`, `1 < p < 2`.
pub fn check_lemma4<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    let p = p.require_below_two()?;
    ladder.validate_against(cfg.r_min)?;
    let pv = p.get();
    let e = 2.0 / (2.0 - pv);
    let mut report = BoundReport::new("lemma4", pv);
    for r in ladder.rungs() {
        let s = area(map, r, cfg)?;
        let t = inner_integral(map, r, p, cfg)?;
        if !t.converged {
            report.flag(Flag::NonConvergent);
        }
        let bound = PI * (2.0 - pv).powf(e) * t.value.powf(e);
        report.relation(r, "area-inner", s, bound);
    }
    Ok(report.finish(true))
}

/// `∫_0^r dt/(t^{p-1} d_p) ≤ 1/(2-p)` for a self-map of the disc, at each
/// radius of `radii`.
pub fn check_convergence<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    let p = p.require_below_two()?;
    let pv = p.get();
    let mut report = BoundReport::new("lemma4-convergence", pv);
    for &r in radii {
        let t = inner_integral(map, r, p, cfg)?;
        if !t.converged {
            report.flag(Flag::NonConvergent);
        }
        report.relation(r, "inner-finite", 1.0 / (2.0 - pv), t.value);
    }
    Ok(report.finish(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{CatalogMap, Linear, LogSingular, RadialStretch};
    use num_complex::Complex64;

    fn ord(p: f64) -> DilatationOrder {
        DilatationOrder::new(p).unwrap()
    }

    fn coarse() -> QuadratureConfig {
        QuadratureConfig {
            n_theta: 64,
            n_r: 256,
            ..QuadratureConfig::default()
        }
    }

    fn short() -> RadiusLadder {
        RadiusLadder::new(0.5, 0.6, 6, 3).unwrap()
    }

    #[test]
    fn lemma1_is_tight_for_radial_maps() {
        let map = CatalogMap::Linear(Linear::identity());
        let rep = check_lemma1(&map, ord(3.0), &short(), &coarse()).unwrap();
        assert!(rep.holds);
        let first = rep.rungs.iter().find(|m| m.r == 0.5).unwrap();
        assert!((first.larger - PI).abs() < 1e-9);
        assert!((first.smaller - PI).abs() < 1e-9);
        for m in &rep.rungs {
            assert!(m.margin.abs() <= 1e-6 * m.larger, "{m:?}");
        }
    }

    #[test]
    fn lemma1_strict_for_affine_map() {
        let map = CatalogMap::Linear(Linear::new(Complex64::new(0.5, 0.2)).unwrap());
        let rep = check_lemma1(&map, ord(2.5), &short(), &coarse()).unwrap();
        assert!(rep.holds);
        assert!(rep.margin_min >= -1e-9);
    }

    #[test]
    fn lemma2_and_lemma4_on_catalog() {
        let cfg = coarse();
        for map in CatalogMap::representatives() {
            let rep = check_lemma2(&map, ord(3.0), &short(), &cfg).unwrap();
            assert!(rep.holds, "{}: {rep:?}", map.label());
        }
        let map = CatalogMap::RadialStretch(RadialStretch::new(0.5).unwrap());
        let rep = check_lemma4(&map, ord(1.5), &short(), &cfg).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!(check_lemma2(&map, ord(1.5), &short(), &cfg).is_err());
        assert!(check_lemma4(&map, ord(3.0), &short(), &cfg).is_err());
    }

    #[test]
    fn lemma3_for_constant_field_matches_closed_form() {
        // Q ≡ 1: the left side is (2-p)/((2ε)^{2-p} - ε^{2-p}) and the right
        // 2^{p-1} ε^{p-2}.
        let cfg = coarse();
        let p = 1.5;
        let eps = 0.1;
        let rep = check_lemma3(|_| Ok(1.0), ord(p), eps, &cfg).unwrap();
        let lhs = (2.0 - p) / ((2.0 * eps).powf(2.0 - p) - eps.powf(2.0 - p));
        let rhs = 2f64.powf(p - 1.0) * eps.powf(p - 2.0);
        let m = &rep.rungs[0];
        assert!((m.smaller - lhs).abs() < 1e-9 * lhs);
        assert!((m.larger - rhs).abs() < 1e-9 * rhs);
        assert!(rep.holds);
    }

    #[test]
    fn lemma3_on_map_ladder() {
        let map = CatalogMap::LogSingular(LogSingular::new(3.0).unwrap());
        let rep = check_lemma3_ladder(&map, ord(3.0), &short(), &coarse()).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!(check_lemma3(|_| Ok(1.0), ord(2.0), 0.7, &coarse()).is_err());
    }

    #[test]
    fn length_area_is_equality_for_identity() {
        let map = CatalogMap::Linear(Linear::identity());
        let rep = check_length_area(&map, ord(2.0), 0.1, 0.9, &coarse()).unwrap();
        let m = &rep.rungs[0];
        assert!((m.larger - PI * 0.8).abs() < 1e-9);
        assert!(m.margin.abs() < 1e-9);
        assert!(rep.holds);
        assert!(check_length_area(&map, ord(2.0), 0.5, 0.4, &coarse()).is_err());
    }

    #[test]
    fn convergence_bound() {
        let map = CatalogMap::RadialStretch(RadialStretch::new(1.0).unwrap());
        let rep = check_convergence(&map, ord(1.5), &[0.25, 0.5, 1.0], &coarse()).unwrap();
        assert!(rep.holds);
        let last = rep.rungs.last().unwrap();
        assert!((last.smaller - 2.0).abs() < 1e-6, "{last:?}");
    }

    #[test]
    fn infinite_dilatation_gives_zero_bound() {
        assert_eq!(over(3.0, f64::INFINITY), 0.0);
        assert_eq!(over(3.0, 0.0), f64::INFINITY);
        assert_eq!(inv_pow(0.0, 2.0), f64::INFINITY);
        assert_eq!(inv_pow(f64::INFINITY, 2.0), 0.0);
    }
}
