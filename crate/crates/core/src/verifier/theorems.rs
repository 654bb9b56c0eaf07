use serde::{Deserialize, Serialize};

use super::{
    grows_inward, BoundReport, Flag, LimitProxy, RadiusLadder, AGREEMENT_TOL, SINGLE_LIMIT_SPREAD,
};
use crate::error::{Error, Result};
use crate::functionals::{
    area, disc_mean, inner_integral, outer_integral, DilatationOrder, QuadratureConfig,
};
use crate::mapping::{min_max_modulus, MappingModel};

/// Circle samples used for `l_f(r)` and `L_f(r)`.
pub const MODULUS_SAMPLES: usize = 2048;

/// `c_p = 2^{(p-1)/(p-2)} (p-2)^{-1/(p-2)}`.
pub fn theorem1_constant(p: f64) -> f64 {
    2f64.powf((p - 1.0) / (p - 2.0)) * (p - 2.0).powf(-1.0 / (p - 2.0))
}

/// Limit estimate of `|f(z)|/|z|` against the bound built from a limit
/// proxy of some dilatation average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremOutcome {
    /// Proxy of the dilatation quantity entering the bound.
    pub k: LimitProxy,
    pub bound: f64,
    /// Proxy of `l_f(r)/r` or `L_f(r)/r`, whichever the bound controls.
    pub attained: LimitProxy,
    pub report: BoundReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Outcome {
    pub c_p: f64,
    #[serde(flatten)]
    pub outcome: TheoremOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem6Outcome {
    pub k1: LimitProxy,
    pub k2: LimitProxy,
    pub lower: f64,
    pub upper: f64,
    /// Midpoint of the `l_f/r` and `L_f/r` proxies.
    pub a_proxy: f64,
    pub ratio_spread: f64,
    pub report: BoundReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem7Outcome {
    pub limit_lower: LimitProxy,
    pub limit_upper: LimitProxy,
    pub a: f64,
    /// Proxy of `S(r)/(πr²)` itself.
    pub area_ratio: LimitProxy,
    pub report: BoundReport,
}

fn ratios<M: MappingModel + ?Sized>(map: &M, r: f64) -> Result<(f64, f64)> {
    let (lo, hi) = min_max_modulus(map, r, MODULUS_SAMPLES)?;
    Ok((lo / r, hi / r))
}

/// `lim inf |f(z)|/|z| ≤ c_p k^{1/(p-2)}` with `k` the `lim inf` of the
/// disc means of `D_p` over `B_{2r}`, `p > 2`.
pub fn theorem1_bound<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<Theorem1Outcome> {
    let p = p.require_above_two()?;
    ladder.validate_against(cfg.r_min)?;
    if ladder.r_max > 0.5 {
        return Err(Error::InvalidConfig(
            "disc means over B_2r need r_max <= 0.5".into(),
        ));
    }
    let pv = p.get();
    let c_p = theorem1_constant(pv);
    let e = 1.0 / (pv - 2.0);
    let rungs = ladder.rungs();
    let mut report = BoundReport::new("theorem1", pv);
    let mut means = Vec::with_capacity(rungs.len());
    let mut lower = Vec::with_capacity(rungs.len());
    for &r in &rungs {
        let m = disc_mean(map, 2.0 * r, p, cfg)?;
        if m.truncation_sensitive {
            report.flag(Flag::TruncationSensitive);
        }
        let (l, _) = ratios(map, r)?;
        report.relation(r, "min-modulus", c_p * m.value.powf(e), l);
        means.push(m.value);
        lower.push(l);
    }
    let k = LimitProxy::liminf(ladder, &means);
    let attained = LimitProxy::liminf(ladder, &lower);
    let bound = c_p * k.value.powf(e);
    report.relation(ladder.deepest(), "limit", bound, attained.value);
    let divergent = grows_inward(ladder, &means);
    if divergent {
        report.flag(Flag::DivergentMean);
    }
    Ok(Theorem1Outcome {
        c_p,
        outcome: TheoremOutcome {
            k,
            bound,
            attained,
            report: report.finish(!divergent),
        },
    })
}

/// `lim inf |f(z)|/|z| ≤ (p-2)^{1/(2-p)} k_0^{1/(2-p)}` with `k_0` the
/// `lim sup` of `r^{p-2} ∫_r^1 dt/(t^{p-1} d_p)`, `p > 2`.
pub fn theorem3_bound<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<TheoremOutcome> {
    let p = p.require_above_two()?;
    ladder.validate_against(cfg.r_min)?;
    let pv = p.get();
    let f = |k: f64| ((pv - 2.0) * k).powf(1.0 / (2.0 - pv));
    let rungs = ladder.rungs();
    let mut report = BoundReport::new("theorem3", pv);
    let mut ks = Vec::with_capacity(rungs.len());
    let mut lower = Vec::with_capacity(rungs.len());
    for &r in &rungs {
        let k = r.powf(pv - 2.0) * outer_integral(map, r, p, cfg)?;
        let (l, _) = ratios(map, r)?;
        report.relation(r, "min-modulus", f(k), l);
        ks.push(k);
        lower.push(l);
    }
    let k = LimitProxy::limsup(ladder, &ks);
    let attained = LimitProxy::liminf(ladder, &lower);
    let bound = f(k.value);
    report.relation(ladder.deepest(), "limit", bound, attained.value);
    Ok(TheoremOutcome {
        k,
        bound,
        attained,
        report: report.finish(true),
    })
}

/// `lim sup |f(z)|/|z| ≥ (2-p)^{1/(2-p)} k_0^{1/(2-p)}` with `k_0` the
/// `lim sup` of `r^{p-2} ∫_0^r dt/(t^{p-1} d_p)`, `1 < p < 2`.
pub fn theorem5_bound<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<TheoremOutcome> {
    let p = p.require_below_two()?;
    ladder.validate_against(cfg.r_min)?;
    let pv = p.get();
    let f = |k: f64| ((2.0 - pv) * k).powf(1.0 / (2.0 - pv));
    let rungs = ladder.rungs();
    let mut report = BoundReport::new("theorem5", pv);
    let mut ks = Vec::with_capacity(rungs.len());
    let mut upper = Vec::with_capacity(rungs.len());
    for &r in &rungs {
        let t = inner_integral(map, r, p, cfg)?;
        if !t.converged {
            report.flag(Flag::NonConvergent);
        }
        let k = r.powf(pv - 2.0) * t.value;
        let (_, u) = ratios(map, r)?;
        report.relation(r, "max-modulus", u, f(k));
        ks.push(k);
        upper.push(u);
    }
    let k = LimitProxy::limsup(ladder, &ks);
    let attained = LimitProxy::limsup(ladder, &upper);
    let bound = f(k.value);
    report.relation(ladder.deepest(), "limit", attained.value, bound);
    Ok(TheoremOutcome {
        k,
        bound,
        attained,
        report: report.finish(true),
    })
}

/// Brackets `A = lim |f(z)|/|z|` between the bounds for `p` and the
/// conjugate exponent `p' = p/(p-1)`, `1 < p < 2`, and checks
/// `k_1 ≤ (p-1)^{p-1} / ((2-p)^p k_2^{p-1})`.
pub fn theorem6_bracket<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<Theorem6Outcome> {
    let p = p.require_below_two()?;
    let pv = p.get();
    let t5 = theorem5_bound(map, p, ladder, cfg)?;
    let t3 = theorem3_bound(map, p.conjugate(), ladder, cfg)?;

    let lo = t3.attained.value;
    let hi = t5.attained.value;
    let ratio_spread = hi - lo;
    let single = ratio_spread <= SINGLE_LIMIT_SPREAD;
    let a_proxy = 0.5 * (lo + hi);

    let mut report = BoundReport::new("theorem6", pv);
    report.merge(t5.report);
    report.merge(t3.report);
    if !single {
        report.flag(Flag::NoSingleLimit);
    }
    let r = ladder.deepest();
    report.conditional(r, "bracket", t3.bound, t5.bound);
    let k1 = t5.k;
    let k2 = t3.k;
    let k_gap = (pv - 1.0).powf(pv - 1.0) / ((2.0 - pv).powf(pv) * k2.value.powf(pv - 1.0));
    report.conditional(r, "k1-k2", k_gap, k1.value);
    Ok(Theorem6Outcome {
        k1,
        k2,
        lower: t5.bound,
        upper: t3.bound,
        a_proxy,
        ratio_spread,
        report: report.finish(single),
    })
}

/// `S(r)/(πr²)` squeezed between the inner-integral bound for `1 < p < 2`
/// and the outer-integral bound for `s > 2`; when both limits agree the
/// area ratio converges to the common value.
pub fn theorem7_area_derivative<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    s: DilatationOrder,
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<Theorem7Outcome> {
    let p = p.require_below_two()?;
    let s = s.require_above_two()?;
    ladder.validate_against(cfg.r_min)?;
    let pv = p.get();
    let sv = s.get();
    let rungs = ladder.rungs();
    let mut report = BoundReport::new("theorem7", pv);
    let (mut lows, mut ups, mut direct) = (Vec::new(), Vec::new(), Vec::new());
    for &r in &rungs {
        let t = inner_integral(map, r, p, cfg)?;
        if !t.converged {
            report.flag(Flag::NonConvergent);
        }
        let low = ((2.0 - pv) * r.powf(pv - 2.0) * t.value).powf(2.0 / (2.0 - pv));
        let i = outer_integral(map, r, s, cfg)?;
        let up = ((sv - 2.0) * r.powf(sv - 2.0) * i).powf(2.0 / (2.0 - sv));
        let ratio = area(map, r, cfg)? / (std::f64::consts::PI * r * r);
        report.relation(r, "upper", up, ratio);
        report.relation(r, "lower", ratio, low);
        lows.push(low);
        ups.push(up);
        direct.push(ratio);
    }
    let limit_lower = LimitProxy::liminf(ladder, &lows);
    let limit_upper = LimitProxy::liminf(ladder, &ups);
    let area_ratio = LimitProxy::liminf(ladder, &direct);
    let a = 0.5 * (limit_lower.value + limit_upper.value);

    let r = ladder.deepest();
    let slack = AGREEMENT_TOL + limit_lower.tail_spread + limit_upper.tail_spread;
    let gap = (limit_upper.value - limit_lower.value).abs();
    let agree = gap <= slack;
    if !agree {
        report.flag(Flag::LimitsDiffer);
    }
    report.conditional(r, "limits-agree", slack, gap);
    report.conditional(
        r,
        "area-ratio",
        slack + area_ratio.tail_spread,
        (area_ratio.value - a).abs(),
    );
    Ok(Theorem7Outcome {
        limit_lower,
        limit_upper,
        a,
        area_ratio,
        report: report.finish(agree),
    })
}
