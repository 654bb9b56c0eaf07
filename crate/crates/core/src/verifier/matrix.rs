use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    check_convergence, check_lemma1, check_lemma2, check_lemma3_ladder, check_lemma4,
    check_length_area, theorem1_bound, theorem3_bound, theorem5_bound, theorem6_bracket,
    theorem7_area_derivative, BoundReport, Flag, RadiusLadder, Status,
};
use crate::error::{Error, Result};
use crate::functionals::{DilatationOrder, QuadratureConfig};
use crate::mapping::MappingModel;
use crate::series::{format_number, serialize_extended};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    Lemma1,
    LengthArea,
    Lemma2,
    Lemma3,
    Lemma4,
    Convergence,
    Theorem1,
    Theorem3,
    Theorem5,
    Theorem6,
    Theorem7,
}

impl CheckId {
    pub const ALL: [CheckId; 11] = [
        CheckId::Lemma1,
        CheckId::LengthArea,
        CheckId::Lemma2,
        CheckId::Lemma3,
        CheckId::Lemma4,
        CheckId::Convergence,
        CheckId::Theorem1,
        CheckId::Theorem3,
        CheckId::Theorem5,
        CheckId::Theorem6,
        CheckId::Theorem7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Lemma1 => "lemma1",
            CheckId::LengthArea => "length-area",
            CheckId::Lemma2 => "lemma2",
            CheckId::Lemma3 => "lemma3",
            CheckId::Lemma4 => "lemma4",
            CheckId::Convergence => "convergence",
            CheckId::Theorem1 => "theorem1",
            CheckId::Theorem3 => "theorem3",
            CheckId::Theorem5 => "theorem5",
            CheckId::Theorem6 => "theorem6",
            CheckId::Theorem7 => "theorem7",
        }
    }

    /// Whether the check is defined for order `p`.
    pub fn applies_to(self, p: f64) -> bool {
        match self {
            CheckId::Lemma1 | CheckId::LengthArea | CheckId::Lemma3 => true,
            CheckId::Lemma2 | CheckId::Theorem1 | CheckId::Theorem3 => p > 2.0,
            CheckId::Lemma4
            | CheckId::Convergence
            | CheckId::Theorem5
            | CheckId::Theorem6
            | CheckId::Theorem7 => p < 2.0,
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown check `{s}`")))
    }
}

/// Runs the requested checks (all applicable ones when `checks` is empty)
/// for order `p`; `s > 2` is the companion order of the area-derivative
/// check and defaults to the conjugate of `p`.
pub fn run_suite<M: MappingModel + ?Sized>(
    map: &M,
    p: DilatationOrder,
    s: Option<DilatationOrder>,
    checks: &[CheckId],
    ladder: &RadiusLadder,
    cfg: &QuadratureConfig,
) -> Result<Vec<BoundReport>> {
    cfg.validate()?;
    ladder.validate_against(cfg.r_min)?;
    let pv = p.get();
    let selected: Vec<CheckId> = if checks.is_empty() {
        CheckId::ALL
            .into_iter()
            .filter(|c| c.applies_to(pv))
            .collect()
    } else {
        for c in checks {
            if !c.applies_to(pv) {
                return Err(Error::InvalidOrder(pv, c.name()));
            }
        }
        checks.to_vec()
    };
    let mut out = Vec::with_capacity(selected.len());
    for c in selected {
        let mut rep = match c {
            CheckId::Lemma1 => check_lemma1(map, p, ladder, cfg)?,
            CheckId::LengthArea => check_length_area(map, p, ladder.deepest(), ladder.r_max, cfg)?,
            CheckId::Lemma2 => check_lemma2(map, p, ladder, cfg)?,
            CheckId::Lemma3 => check_lemma3_ladder(map, p, ladder, cfg)?,
            CheckId::Lemma4 => check_lemma4(map, p, ladder, cfg)?,
            CheckId::Convergence => check_convergence(map, p, &ladder.rungs(), cfg)?,
            CheckId::Theorem1 => theorem1_bound(map, p, ladder, cfg)?.outcome.report,
            CheckId::Theorem3 => theorem3_bound(map, p, ladder, cfg)?.report,
            CheckId::Theorem5 => theorem5_bound(map, p, ladder, cfg)?.report,
            CheckId::Theorem6 => theorem6_bracket(map, p, ladder, cfg)?.report,
            CheckId::Theorem7 => {
                let s = s.unwrap_or_else(|| p.conjugate());
                theorem7_area_derivative(map, p, s, ladder, cfg)?.report
            }
        };
        rep.check_id = c.name().to_string();
        out.push(rep);
    }
    Ok(out)
}

/// One row of the verification matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixEntry {
    pub check_id: String,
    pub p: f64,
    pub holds: bool,
    pub status: Status,
    #[serde(serialize_with = "serialize_extended")]
    pub margin_min: f64,
    pub radii: Vec<f64>,
    pub flags: Vec<Flag>,
}

impl From<&BoundReport> for MatrixEntry {
    fn from(r: &BoundReport) -> Self {
        Self {
            check_id: r.check_id.clone(),
            p: r.p,
            holds: r.holds,
            status: r.status,
            margin_min: r.margin_min,
            radii: r.radii.clone(),
            flags: r.flags.clone(),
        }
    }
}

/// The machine-readable summary of a verification run. `config` is any
/// serialisable description of the inputs; nothing time dependent is
/// recorded, so identical runs give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationMatrix<C: Serialize> {
    pub tool_version: String,
    pub config: C,
    pub all_hold: bool,
    pub entries: Vec<MatrixEntry>,
}

impl<C: Serialize> VerificationMatrix<C> {
    pub fn new(config: C, reports: &[BoundReport]) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            all_hold: reports.iter().all(|r| r.holds),
            entries: reports.iter().map(MatrixEntry::from).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Per-rung margins of `reports` as CSV.
pub fn write_margins<W: Write>(out: W, reports: &[BoundReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "check_id",
        "p",
        "r",
        "relation",
        "larger",
        "smaller",
        "margin",
        "tolerance",
        "conditional",
        "holds",
    ])?;
    for rep in reports {
        for m in &rep.rungs {
            w.write_record([
                rep.check_id.clone(),
                format_number(rep.p),
                format_number(m.r),
                m.relation.clone(),
                format_number(m.larger),
                format_number(m.smaller),
                format_number(m.margin),
                format_number(m.tolerance),
                m.conditional.to_string(),
                m.holds().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
