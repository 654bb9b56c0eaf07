//! Integral functionals of a map: `D_p`, the circular means `q_p`/`d_p`,
//! disc means, the area `S(r)`, its rate `S'(r)`, the boundary length
//! `L(r)`, and the radial integrals `∫ dt / (t^{p-1} d_p(t))`.
//!
//! Extended-real conventions: `+∞` is a legal value everywhere. In the
//! reciprocal integrals `d_p = +∞` contributes zero and `d_p = 0` makes the
//! integral `+∞`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{jacobian_from_partials, MappingModel, Partials, PolarPoint};
use crate::quadrature::{log_grid, periodic_mean, simpson, simpson_log, uniform_grid};
use crate::series::RadialSeries;

/// The exponent `p > 1` of the angular dilatation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct DilatationOrder(f64);

impl DilatationOrder {
    pub fn new(p: f64) -> Result<Self> {
        if p > 1.0 && p.is_finite() {
            Ok(Self(p))
        } else {
            Err(Error::InvalidOrder(p, "p > 1"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `p' = p/(p-1)`.
    pub fn conjugate(self) -> Self {
        Self(self.0 / (self.0 - 1.0))
    }

    pub fn require_above_two(self) -> Result<Self> {
        if self.0 > 2.0 {
            Ok(self)
        } else {
            Err(Error::InvalidOrder(self.0, "p > 2"))
        }
    }

    pub fn require_below_two(self) -> Result<Self> {
        if self.0 < 2.0 {
            Ok(self)
        } else {
            Err(Error::InvalidOrder(self.0, "1 < p < 2"))
        }
    }

    /// `1/(p-1)`, the power-mean exponent of the circular means.
    fn mean_exponent(self) -> f64 {
        1.0 / (self.0 - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Uniform,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub n_theta: usize,
    pub n_r: usize,
    pub grid_kind: GridKind,
    /// Inner truncation radius of the singular integrals `∫_0^r`.
    pub eps_trunc: f64,
    /// Inner truncation radius of the disc integrals.
    pub r_min: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n_theta: 512,
            n_r: 1024,
            grid_kind: GridKind::Log,
            eps_trunc: 1e-10,
            r_min: 1e-4,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 16 || !self.n_theta.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "n_theta must be even and at least 16, got {}",
                self.n_theta
            )));
        }
        if self.n_r < 16 {
            return Err(Error::InvalidConfig(format!(
                "n_r must be at least 16, got {}",
                self.n_r
            )));
        }
        if !(self.eps_trunc > 0.0 && self.eps_trunc < 1.0) {
            return Err(Error::InvalidConfig("eps_trunc must lie in (0, 1)".into()));
        }
        if !(self.r_min > 0.0 && self.r_min < 1.0) {
            return Err(Error::InvalidConfig("r_min must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn radial_grid(&self, a: f64, b: f64) -> Vec<f64> {
        match self.grid_kind {
            GridKind::Log => log_grid(a, b, self.n_r),
            GridKind::Uniform => uniform_grid(a, b, self.n_r),
        }
    }

    pub fn integrate(&self, t: &[f64], g: &[f64]) -> f64 {
        match self.grid_kind {
            GridKind::Log => simpson_log(t, g),
            GridKind::Uniform => simpson(t, g),
        }
    }
}

/// `|f_θ|^p / (r^p J_f)` from evaluated partials.
pub fn dilatation_from_partials(z: PolarPoint, d: &Partials, p: DilatationOrder) -> Result<f64> {
    let j = jacobian_from_partials(z, d)?;
    let p = p.get();
    let num = d.f_theta.norm().powf(p);
    if j == 0.0 {
        return Ok(if num > 0.0 { f64::INFINITY } else { 0.0 });
    }
    Ok(num / (z.r().powf(p) * j))
}

/// The `p`-angular dilatation `D_p(z) = |f_θ|^p / (r^p J_f)`.
pub fn angular_dilatation<M: MappingModel + ?Sized>(
    map: &M,
    z: PolarPoint,
    p: DilatationOrder,
) -> Result<f64> {
    dilatation_from_partials(z, &map.partials(z)?, p)
}

/// Periodic trapezoid mean of `Q^{1/(p-1)}` on the circle `|z| = r`.
fn circle_power_mean<Q>(q: &Q, r: f64, p: DilatationOrder, n_theta: usize) -> Result<f64>
where
    Q: Fn(PolarPoint) -> Result<f64> + ?Sized,
{
    let e = p.mean_exponent();
    let mut err = None;
    let m = periodic_mean(n_theta, |theta| {
        if err.is_some() {
            return 0.0;
        }
        match q(PolarPoint::unchecked(r, theta)) {
            Ok(v) => v.powf(e),
            Err(x) => {
                err = Some(x);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

/// `q_p(r) = ((1/2πr) ∫_{|z|=r} Q^{1/(p-1)} |dz|)^{p-1}`.
pub fn circular_mean<Q>(q: Q, r: f64, p: DilatationOrder, cfg: &QuadratureConfig) -> Result<f64>
where
    Q: Fn(PolarPoint) -> Result<f64>,
{
    PolarPoint::new(r, 0.0)?;
    let m = circle_power_mean(&q, r, p, cfg.n_theta)?;
    Ok(m.powf(p.get() - 1.0))
}

/// `d_p(r)`: the circular mean of `D_p`.
pub fn circular_dilatation<M: MappingModel + ?Sized>(
    map: &M,
    r: f64,
    p: DilatationOrder,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    circular_mean(|z| angular_dilatation(map, z, p), r, p, cfg)
}

/// A disc mean together with its sensitivity to the inner truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscMean {
    pub value: f64,
    /// Change of `value` when the truncation radius is halved.
    pub truncation_delta: f64,
    pub truncation_sensitive: bool,
}

fn disc_integral_with_delta<Q>(
    q: &Q,
    r: f64,
    p: DilatationOrder,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)>
where
    Q: Fn(PolarPoint) -> Result<f64> + Sync + ?Sized,
{
    PolarPoint::new(r, 0.0)?;
    let r_min = cfg.r_min;
    let ring = |t: f64| circle_power_mean(q, t, p, cfg.n_theta);
    if r <= r_min {
        let v = PI * r * r * ring(r)?;
        return Ok((v, 0.0));
    }
    let grid = cfg.radial_grid(r_min, r);
    let means: Vec<f64> = grid.par_iter().map(|t| ring(*t)).collect::<Result<_>>()?;
    let g: Vec<f64> = grid
        .iter()
        .zip(&means)
        .map(|(t, m)| 2.0 * PI * t * m)
        .collect();
    let core = PI * r_min * r_min * means[0];
    let main = cfg.integrate(&grid, &g);
    let value = main + core;

    // the same integral truncated at r_min/2
    let inner = log_grid(0.5 * r_min, r_min, 16);
    let inner_means: Vec<f64> = inner.iter().map(|t| ring(*t)).collect::<Result<_>>()?;
    let inner_g: Vec<f64> = inner
        .iter()
        .zip(&inner_means)
        .map(|(t, m)| 2.0 * PI * t * m)
        .collect();
    let finer = main + simpson_log(&inner, &inner_g) + 0.25 * PI * r_min * r_min * inner_means[0];
    Ok((value, finer - value))
}

/// `∬_{B_r} Q^{1/(p-1)} dx dy`, truncated at `cfg.r_min` and closed with
/// the ring mean at `r_min` over the inner disc.
pub fn disc_integral<Q>(q: Q, r: f64, p: DilatationOrder, cfg: &QuadratureConfig) -> Result<f64>
where
    Q: Fn(PolarPoint) -> Result<f64> + Sync,
{
    Ok(disc_integral_with_delta(&q, r, p, cfg)?.0)
}

/// `((1/πr²) ∬_{B_r} Q^{1/(p-1)} dx dy)^{p-1}` for an arbitrary field `Q`.
pub fn disc_power_mean<Q>(
    q: Q,
    r: f64,
    p: DilatationOrder,
    cfg: &QuadratureConfig,
) -> Result<DiscMean>
where
    Q: Fn(PolarPoint) -> Result<f64> + Sync,
{
    let (integral, delta) = disc_integral_with_delta(&q, r, p, cfg)?;
    let area = PI * r * r;
    let pw = p.get() - 1.0;
    let value = (integral / area).powf(pw);
    let finer = ((integral + delta) / area).powf(pw);
    let truncation_delta = finer - value;
    let truncation_sensitive =
        value.is_infinite() || !(truncation_delta.abs() <= 1e-12 + 1e-6 * value.abs());
    Ok(DiscMean {
        value,
        truncation_delta,
        truncation_sensitive,
    })
}

/// `((1/πr²) ∬_{B_r} D_p^{1/(p-1)} dx dy)^{p-1}`.
pub fn disc_mean<M: MappingModel + ?Sized>(
    map: &M,
    r: f64,
    p: DilatationOrder,
    cfg: &QuadratureConfig,
) -> Result<DiscMean> {
    disc_power_mean(|z| angular_dilatation(map, z, p), r, p, cfg)
}

fn ring_jacobian<M: MappingModel + ?Sized>(map: &M, t: f64, n_theta: usize) -> Result<f64> {
    let mut err = None;
    let m = periodic_mean(n_theta, |theta| {
        if err.is_some() {
            return 0.0;
        }
        let z = PolarPoint::unchecked(t, theta);
        match map.partials(z).and_then(|d| jacobian_from_partials(z, &d)) {
            Ok(j) => j,
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

/// `S(r) = ∬_{B_r} J_f dx dy` by nested quadrature from `cfg.r_min`, with
/// the disc inside `r_min` closed and refined as in [`integrate_to_origin`]
/// until successive levels agree to `1e-12` relative.
pub fn area<M: MappingModel + ?Sized>(map: &M, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    PolarPoint::new(r, 0.0)?;
    let r_min = cfg.r_min;
    if r <= r_min {
        return Ok(PI * r * r * ring_jacobian(map, r, cfg.n_theta)?);
    }
    let h = |t: f64| Ok(2.0 * PI * t * ring_jacobian(map, t, cfg.n_theta)?);
    let s = integrate_to_origin(&h, r_min, r, 1.0, cfg, |v, e| e <= 1e-300 + 1e-12 * v.abs())?;
    Ok(s.value)
}

/// `S'(r) = ∫_0^{2π} J_f(re^{iθ}) r dθ`.
pub fn area_rate<M: MappingModel + ?Sized>(map: &M, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    PolarPoint::new(r, 0.0)?;
    Ok(2.0 * PI * r * ring_jacobian(map, r, cfg.n_theta)?)
}

/// `L(r) = ∫_0^{2π} |f_θ(re^{iθ})| dθ`.
pub fn boundary_length<M: MappingModel + ?Sized>(
    map: &M,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    PolarPoint::new(r, 0.0)?;
    let mut err = None;
    let m = periodic_mean(cfg.n_theta, |theta| {
        if err.is_some() {
            return 0.0;
        }
        match map.partials(PolarPoint::unchecked(r, theta)) {
            Ok(d) => d.f_theta.norm(),
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(2.0 * PI * m),
    }
}

/// Samples `d_p` on the configured radial grid over `[a, b]`.
pub fn dp_series<M: MappingModel + ?Sized>(
    map: &M,
    a: f64,
    b: f64,
    p: DilatationOrder,
    cfg: &QuadratureConfig,
) -> Result<RadialSeries> {
    if !(a > 0.0 && b > a && b <= 1.0) {
        return Err(Error::EmptyRange { lower: a, upper: b });
    }
    let grid = cfg.radial_grid(a, b);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|t| circular_dilatation(map, *t, p, cfg))
        .collect::<Result<_>>()?;
    RadialSeries::new(grid, values)
}

fn reciprocal_integrand(t: f64, d: f64, p: f64) -> f64 {
    if d == f64::INFINITY {
        0.0
    } else if d == 0.0 {
        f64::INFINITY
    } else {
        t.powf(1.0 - p) / d
    }
}

/// `∫ dt / (t^{p-1} q(t))` between nodes `lo` and `hi` of `series`, by
/// Simpson in `ln t`.
pub fn reciprocal_integral(series: &RadialSeries, lo: usize, hi: usize, p: DilatationOrder) -> f64 {
    let t = &series.grid()[lo..=hi];
    let g: Vec<f64> = t
        .iter()
        .zip(&series.values()[lo..=hi])
        .map(|(t, d)| reciprocal_integrand(*t, *d, p.get()))
        .collect();
    simpson_log(t, &g)
}

/// `∫_r^1 dt / (t^{p-1} d_p(t))` from a series whose grid contains `r` and
/// ends at `1`.
pub fn radial_integral_outer(series: &RadialSeries, r: f64, p: DilatationOrder) -> Result<f64> {
    if r >= 1.0 {
        return Err(Error::EmptyRange {
            lower: r,
            upper: 1.0,
        });
    }
    let last = series.len().checked_sub(1).ok_or(Error::EmptyRange {
        lower: r,
        upper: 1.0,
    })?;
    if (series.grid()[last] - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidSeries(
            "outer integral needs a grid ending at r = 1".into(),
        ));
    }
    let i = series.node_index(r)?;
    Ok(reciprocal_integral(series, i, last, p))
}

/// `∫_0^r dt / (t^{p-1} d_p(t))`, `1 < p < 2`, from a series starting at
/// the truncation radius `a`. The piece `[0, a]` is closed by fitting the
/// integrand to `c t^β` between `a` and the last node below `2a`, which
/// gives `a g(a) / (β + 1)`; `β ≤ -1` makes the integral infinite. A
/// constant `d_p` gives `β = 1 - p`, the plain frozen-coefficient closure.
pub fn radial_integral_inner(series: &RadialSeries, r: f64, p: DilatationOrder) -> Result<f64> {
    let p = p.require_below_two()?;
    let j = series.node_index(r)?;
    Ok(reciprocal_integral(series, 0, j, p) + power_law_tail(series, p))
}

/// `∫_0^a h`, `a = grid[0]`, from the power law `c t^β` through the first
/// node and the last node below `2a`; `β ≤ -1` gives `+∞`.
fn tail_fit(grid: &[f64], h: &[f64], fallback_beta: f64) -> f64 {
    let a = grid[0];
    let h0 = h[0];
    if h0 == 0.0 {
        return 0.0;
    }
    let beta = match grid.iter().rposition(|t| *t <= 2.0 * a) {
        Some(k) if k > 0 => {
            let b = (h[k] / h0).ln() / (grid[k] / a).ln();
            if b.is_finite() {
                b
            } else {
                fallback_beta
            }
        }
        _ => fallback_beta,
    };
    if beta > -1.0 {
        a * h0 / (beta + 1.0)
    } else {
        f64::INFINITY
    }
}

fn power_law_tail(series: &RadialSeries, p: DilatationOrder) -> f64 {
    let g: Vec<f64> = series
        .grid()
        .iter()
        .zip(series.values())
        .map(|(t, d)| reciprocal_integrand(*t, *d, p.get()))
        .collect();
    tail_fit(series.grid(), &g, 1.0 - p.get())
}

/// Deepest truncation radius reached by [`integrate_to_origin`].
pub const TRUNCATION_FLOOR: f64 = 1e-200;

/// Factor by which the truncation radius is lowered on each refinement.
const REFINE_FACTOR: f64 = 1e-4;

/// Log-grid intervals per refinement segment; the integrands are smooth
/// in `ln t` there, and the log Simpson rule is sixth order.
const REFINE_INTERVALS: usize = 256;

/// `∫_0^b h` for an integrand that is only sampled on `(0, b]`.
///
/// The integral is truncated at `a` on the grid of `cfg` and closed with
/// [`tail_fit`]. The truncation radius is then lowered by factors of `1e4`
/// until `accept(value, change)` holds for the change between successive
/// levels, the radius passes [`TRUNCATION_FLOOR`], or `h` can no longer be
/// evaluated. The reported value and error estimate come from re-closing
/// the deepest level at half its radius.
fn integrate_to_origin<H, A>(
    h: &H,
    a: f64,
    b: f64,
    fallback_beta: f64,
    cfg: &QuadratureConfig,
    accept: A,
) -> Result<TruncatedIntegral>
where
    H: Fn(f64) -> Result<f64> + Sync,
    A: Fn(f64, f64) -> bool,
{
    let sample = |grid: Vec<f64>| -> Result<(Vec<f64>, Vec<f64>)> {
        let vals = grid
            .par_iter()
            .map(|t| h(*t))
            .collect::<Result<Vec<f64>>>()?;
        Ok((grid, vals))
    };
    let (grid, vals) = sample(cfg.radial_grid(a, b))?;
    let mut main = cfg.integrate(&grid, &vals);
    let mut value = main + tail_fit(&grid, &vals, fallback_beta);
    let mut lower = a;
    loop {
        let next = lower * REFINE_FACTOR;
        let stop = next < TRUNCATION_FLOOR || value.is_nan();
        let deeper = if stop {
            None
        } else {
            sample(log_grid(next, lower, REFINE_INTERVALS)).ok()
        };
        let Some((g, v)) = deeper else {
            return halve(&sample, main, value, lower, a, fallback_beta);
        };
        main += simpson_log(&g, &v);
        let refined = main + tail_fit(&g, &v, fallback_beta);
        let change = (refined - value).abs();
        value = refined;
        lower = next;
        if refined.is_finite() && accept(refined, change) {
            return halve(&sample, main, value, lower, a, fallback_beta);
        }
    }
}

/// Closes `main`, the integral down to `lower`, at `lower/2` and reports
/// the change against `value`, the closure at `lower`.
fn halve<S>(
    sample: &S,
    main: f64,
    value: f64,
    lower: f64,
    a: f64,
    fallback_beta: f64,
) -> Result<TruncatedIntegral>
where
    S: Fn(Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)>,
{
    match sample(log_grid(0.5 * lower, lower, 16)) {
        Ok((g, v)) => {
            let fine = main + simpson_log(&g, &v) + tail_fit(&g, &v, fallback_beta);
            Ok(TruncatedIntegral {
                value: fine,
                error_estimate: (fine - value).abs(),
                converged: true,
            })
        }
        // evaluation failed below a level that did work
        Err(_) if lower < a => Ok(TruncatedIntegral {
            value,
            error_estimate: f64::INFINITY,
            converged: false,
        }),
        Err(e) => Err(e),
    }
}

/// An integral truncated at the origin with its truncation error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedIntegral {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// `∫_0^r dt / (t^{p-1} d_p(t))` for a map, truncated at `cfg.eps_trunc`
/// and refined towards the origin (see [`integrate_to_origin`]) until
/// successive levels agree to `1e-12` relative. The bounds built from this
/// integral raise it to the power `2/(2-p)`, which is large as `p → 2`.
/// `error_estimate` is the change when the final truncation radius is
/// halved; `converged` reports whether it is within `1e-9 + 1e-6 |value|`.
pub fn inner_integral<M: MappingModel + ?Sized>(
    map: &M,
    r: f64,
    p: DilatationOrder,
    cfg: &QuadratureConfig,
) -> Result<TruncatedIntegral> {
    let p = p.require_below_two()?;
    let eps = cfg.eps_trunc;
    if r <= eps {
        return Err(Error::EmptyRange {
            lower: eps,
            upper: r,
        });
    }
    let h = |t: f64| {
        Ok(reciprocal_integrand(
            t,
            circular_dilatation(map, t, p, cfg)?,
            p.get(),
        ))
    };
    let mut t = integrate_to_origin(&h, eps, r, 1.0 - p.get(), cfg, |v, e| {
        e <= 1e-300 + 1e-12 * v.abs()
    })?;
    t.converged = t.value.is_finite() && t.error_estimate <= 1e-9 + 1e-6 * t.value.abs();
    Ok(t)
}

/// `∫_r^1 dt / (t^{p-1} d_p(t))` for a map.
pub fn outer_integral<M: MappingModel + ?Sized>(
    map: &M,
    r: f64,
    p: DilatationOrder,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if r >= 1.0 {
        return Err(Error::EmptyRange {
            lower: r,
            upper: 1.0,
        });
    }
    let series = dp_series(map, r, 1.0, p, cfg)?;
    radial_integral_outer(&series, r, p)
}
