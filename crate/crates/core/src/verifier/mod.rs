//! Numerical verification of the length-area inequalities.
//!
//! Limits `r → 0` are replaced by a geometric [`RadiusLadder`]: a `liminf`
//! is the minimum over the last `tail` rungs and a `limsup` the maximum.
//! Every check produces a [`BoundReport`] with one [`RungMargin`] per
//! evaluated relation.

mod lemmas;
mod matrix;
mod theorems;

pub use lemmas::{
    check_convergence, check_lemma1, check_lemma2, check_lemma3, check_lemma3_ladder, check_lemma4,
    check_length_area,
};
pub use matrix::{run_suite, write_margins, CheckId, MatrixEntry, VerificationMatrix};
pub use theorems::{
    theorem1_bound, theorem1_constant, theorem3_bound, theorem5_bound, theorem6_bracket,
    theorem7_area_derivative, Theorem1Outcome, Theorem6Outcome, Theorem7Outcome, TheoremOutcome,
    MODULUS_SAMPLES,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack of every inequality check.
pub const ABS_TOL: f64 = 1e-9;
/// Slack relative to the larger side of an inequality.
pub const REL_TOL: f64 = 1e-6;
/// Tail spread above which `|f(z)|/|z|` is not treated as having a single
/// limit point.
pub const SINGLE_LIMIT_SPREAD: f64 = 1e-3;
/// Agreement tolerance between limit proxies that should coincide.
pub const AGREEMENT_TOL: f64 = 1e-3;

/// Geometric radii `r_max ρ^j`, `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusLadder {
    pub r_max: f64,
    pub rho: f64,
    pub count: usize,
    pub tail: usize,
}

impl Default for RadiusLadder {
    fn default() -> Self {
        Self {
            r_max: 0.5,
            rho: 0.8,
            count: 20,
            tail: 5,
        }
    }
}

impl RadiusLadder {
    pub fn new(r_max: f64, rho: f64, count: usize, tail: usize) -> Result<Self> {
        let ladder = Self {
            r_max,
            rho,
            count,
            tail,
        };
        ladder.validate()?;
        Ok(ladder)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "ladder r_max must lie in (0, 1), got {}",
                self.r_max
            )));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "ladder rho must lie in (0, 1), got {}",
                self.rho
            )));
        }
        if self.tail < 3 || self.count < self.tail {
            return Err(Error::InvalidConfig(format!(
                "ladder needs count >= tail >= 3, got count={} tail={}",
                self.count, self.tail
            )));
        }
        Ok(())
    }

    /// Checks the ladder against the inner truncation radius.
    pub fn validate_against(&self, r_min: f64) -> Result<()> {
        self.validate()?;
        if self.deepest() < r_min {
            return Err(Error::InvalidConfig(format!(
                "deepest rung {} is below r_min {}",
                self.deepest(),
                r_min
            )));
        }
        Ok(())
    }

    pub fn deepest(&self) -> f64 {
        self.r_max * self.rho.powi(self.count as i32 - 1)
    }

    /// Rungs from the outermost inwards.
    pub fn rungs(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.r_max * self.rho.powi(j as i32))
            .collect()
    }

    pub fn tail_of<'a, T>(&self, values: &'a [T]) -> &'a [T] {
        &values[values.len().saturating_sub(self.tail)..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProxyKind {
    Liminf,
    Limsup,
}

/// Tail minimum or maximum standing in for a `liminf` or `limsup` at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitProxy {
    pub kind: ProxyKind,
    pub value: f64,
    pub tail_spread: f64,
}

impl LimitProxy {
    pub fn from_tail(kind: ProxyKind, tail: &[f64]) -> Self {
        let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tail_spread = if lo == hi { 0.0 } else { hi - lo };
        let value = match kind {
            ProxyKind::Liminf => lo,
            ProxyKind::Limsup => hi,
        };
        Self {
            kind,
            value,
            tail_spread,
        }
    }

    pub fn liminf(ladder: &RadiusLadder, values: &[f64]) -> Self {
        Self::from_tail(ProxyKind::Liminf, ladder.tail_of(values))
    }

    pub fn limsup(ladder: &RadiusLadder, values: &[f64]) -> Self {
        Self::from_tail(ProxyKind::Limsup, ladder.tail_of(values))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    /// Disc means grow monotonically towards the origin.
    DivergentMean,
    /// A disc mean moved noticeably when the truncation radius was halved.
    TruncationSensitive,
    /// A singular inner integral did not stabilise under truncation halving.
    NonConvergent,
    /// `|f(z)|/|z|` has visibly more than one limit point on the tail.
    NoSingleLimit,
    /// Limit proxies that the hypothesis requires to coincide do not.
    LimitsDiffer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Violated,
    /// A hypothesis of the statement is not met; only the unconditional
    /// relations were enforced.
    Vacuous,
}

/// One evaluated relation `larger ≥ smaller` at radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungMargin {
    pub r: f64,
    pub relation: String,
    pub larger: f64,
    pub smaller: f64,
    pub margin: f64,
    pub tolerance: f64,
    /// Relations that rely on a hypothesis which may fail (finite `k`,
    /// a single limit point); they do not count when it does.
    pub conditional: bool,
}

impl RungMargin {
    pub fn new(r: f64, relation: &str, larger: f64, smaller: f64, conditional: bool) -> Self {
        let margin = if larger == smaller {
            0.0
        } else {
            larger - smaller
        };
        let scale = larger.abs().max(smaller.abs());
        let tolerance = if scale.is_finite() {
            ABS_TOL + REL_TOL * scale
        } else {
            ABS_TOL
        };
        Self {
            r,
            relation: relation.to_string(),
            larger,
            smaller,
            margin,
            tolerance,
            conditional,
        }
    }

    pub fn holds(&self) -> bool {
        !self.margin.is_nan() && self.margin >= -self.tolerance
    }
}

/// Verdict of one check with its per-rung margins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub check_id: String,
    pub p: f64,
    pub status: Status,
    pub holds: bool,
    pub margin_min: f64,
    pub radii: Vec<f64>,
    pub rungs: Vec<RungMargin>,
    pub flags: Vec<Flag>,
}

impl BoundReport {
    pub fn new(check_id: &str, p: f64) -> Self {
        Self {
            check_id: check_id.to_string(),
            p,
            status: Status::Holds,
            holds: true,
            margin_min: f64::INFINITY,
            radii: Vec::new(),
            rungs: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn push(&mut self, rung: RungMargin) {
        if !self.radii.contains(&rung.r) {
            self.radii.push(rung.r);
        }
        self.rungs.push(rung);
    }

    pub fn relation(&mut self, r: f64, relation: &str, larger: f64, smaller: f64) {
        self.push(RungMargin::new(r, relation, larger, smaller, false));
    }

    pub fn conditional(&mut self, r: f64, relation: &str, larger: f64, smaller: f64) {
        self.push(RungMargin::new(r, relation, larger, smaller, true));
    }

    pub fn flag(&mut self, flag: Flag) {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
    }

    pub fn merge(&mut self, other: BoundReport) {
        for f in other.flags {
            self.flag(f);
        }
        for r in other.rungs {
            self.push(r);
        }
    }

    /// Settles the verdict. `hypothesis_met = false` makes conditional
    /// relations informational and the status at best vacuous.
    pub fn finish(mut self, hypothesis_met: bool) -> Self {
        let counted = |r: &&RungMargin| hypothesis_met || !r.conditional;
        self.margin_min = self
            .rungs
            .iter()
            .filter(counted)
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min);
        let ok = self.rungs.iter().filter(counted).all(RungMargin::holds);
        self.status = match (ok, hypothesis_met) {
            (false, _) => Status::Violated,
            (true, true) => Status::Holds,
            (true, false) => Status::Vacuous,
        };
        self.holds = ok;
        self
    }
}

/// True when `values` increase by more than `1e-3` relative at every step
/// of the tail, the signature of a disc mean tending to infinity.
pub(crate) fn grows_inward(ladder: &RadiusLadder, values: &[f64]) -> bool {
    let start = values.len().saturating_sub(ladder.tail + 1);
    let tail = &values[start..];
    tail.iter().any(|v| v.is_infinite()) || tail.windows(2).all(|w| w[1] > w[0] * (1.0 + 1e-3))
}
