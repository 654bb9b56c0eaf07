use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use dilatox_core::beltrami::CoefficientSpec;
use dilatox_core::mapping::{ProfileSpec, RadialProfileMap};
use dilatox_core::verifier::CheckId;
use dilatox_core::{
    CatalogMap, DilatationOrder, Error, GridKind, MappingModel, QuadratureConfig, RadiusLadder,
    Result,
};

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|e| format!("bad value for `{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_span(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected a,b, got `{s}`"))?;
    let a: f64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad span start: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad span end: {e}"))?;
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    Log,
    Uniform,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Catalog map: identity, linear, radial_stretch, log_singular, beltrami_exact.
    #[arg(long)]
    pub map: Option<String>,
    /// Map parameter, repeatable: k=, k_im=, alpha=, p=, m=, kappa=.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// JSON radial profile {"type": "radial_profile", "samples": [[r, R], ...]}.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LadderArgs {
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub tail: Option<usize>,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    #[arg(long)]
    pub ntheta: Option<usize>,
    #[arg(long)]
    pub nr: Option<usize>,
    /// Inner truncation radius of the disc integrals.
    #[arg(long)]
    pub rmin: Option<f64>,
    /// Inner truncation radius of the singular radial integrals.
    #[arg(long)]
    pub eps_trunc: Option<f64>,
    #[arg(long, value_enum)]
    pub grid: Option<Grid>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub p: f64,
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub p: f64,
    /// Companion order s > 2 of the area-derivative check.
    #[arg(long)]
    pub s: Option<f64>,
    /// Check to run, repeatable; all applicable checks when omitted.
    #[arg(long = "check")]
    pub checks: Vec<String>,
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct AsymArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub s: Option<f64>,
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BeltramiArgs {
    /// Coefficient family given by parameters; `custom_radial` needs --spec.
    #[arg(long, default_value = "power")]
    pub family: String,
    /// Coefficient parameter, repeatable: kappa=, m=.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// JSON coefficient {"family": "power" | "custom_radial", ...}.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Anchor radius.
    #[arg(long, default_value_t = 0.5)]
    pub r0: f64,
    /// Anchor value; defaults to the identity-slope point κ^{1/m} r0 for
    /// the power family.
    #[arg(long = "R0")]
    pub big_r0: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Solved radius span `a,b`.
    #[arg(long, value_parser = parse_span)]
    pub span: Option<(f64, f64)>,
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

/// The map as recorded in reports.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum MapConfig {
    Catalog {
        name: String,
        params: BTreeMap<String, f64>,
    },
    Profile(ProfileSpec),
}

pub enum SelectedMap {
    Catalog(CatalogMap),
    Profile(RadialProfileMap),
}

impl SelectedMap {
    pub fn model(&self) -> &dyn MappingModel {
        match self {
            SelectedMap::Catalog(m) => m,
            SelectedMap::Profile(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn collect_params(params: &[(String, f64)]) -> BTreeMap<String, f64> {
    params.iter().cloned().collect()
}

impl MapArgs {
    pub fn resolve(&self) -> Result<(SelectedMap, MapConfig)> {
        match (&self.spec, &self.map) {
            (Some(path), name) => {
                if name.as_deref().is_some_and(|n| n != "radial_profile") {
                    return Err(Error::InvalidConfig(
                        "--spec describes a radial profile; drop --map or use --map radial_profile"
                            .into(),
                    ));
                }
                let spec = ProfileSpec::from_json(&read(path)?)?;
                Ok((
                    SelectedMap::Profile(spec.build()?),
                    MapConfig::Profile(spec),
                ))
            }
            (None, Some(name)) => {
                let params = collect_params(&self.params);
                let map = CatalogMap::from_name(name, &params)?;
                Ok((
                    SelectedMap::Catalog(map),
                    MapConfig::Catalog {
                        name: name.clone(),
                        params,
                    },
                ))
            }
            (None, None) => Err(Error::InvalidConfig(
                "either --map or --spec is required".into(),
            )),
        }
    }
}

impl LadderArgs {
    pub fn is_default(&self) -> bool {
        self.rmax.is_none() && self.rho.is_none() && self.count.is_none() && self.tail.is_none()
    }

    pub fn resolve(&self, base: RadiusLadder) -> Result<RadiusLadder> {
        RadiusLadder::new(
            self.rmax.unwrap_or(base.r_max),
            self.rho.unwrap_or(base.rho),
            self.count.unwrap_or(base.count),
            self.tail.unwrap_or(base.tail),
        )
    }
}

impl QuadArgs {
    pub fn resolve(&self) -> Result<QuadratureConfig> {
        let d = QuadratureConfig::default();
        let cfg = QuadratureConfig {
            n_theta: self.ntheta.unwrap_or(d.n_theta),
            n_r: self.nr.unwrap_or(d.n_r),
            grid_kind: match self.grid {
                Some(Grid::Uniform) => GridKind::Uniform,
                Some(Grid::Log) | None => GridKind::Log,
            },
            eps_trunc: self.eps_trunc.unwrap_or(d.eps_trunc),
            r_min: self.rmin.unwrap_or(d.r_min),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl OutArgs {
    /// Creates the output directory and returns the chosen format.
    pub fn prepare(&self, default: Format) -> Result<Format> {
        fs::create_dir_all(&self.out)
            .map_err(|e| Error::Io(format!("{}: {e}", self.out.display())))?;
        Ok(self.format.unwrap_or(default))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

pub fn order(p: f64) -> Result<DilatationOrder> {
    DilatationOrder::new(p)
}

pub fn parse_checks(names: &[String]) -> Result<Vec<CheckId>> {
    names.iter().map(|n| n.parse()).collect()
}

impl BeltramiArgs {
    pub fn coefficient(&self) -> Result<CoefficientSpec> {
        if let Some(path) = &self.spec {
            return CoefficientSpec::from_json(&read(path)?);
        }
        let params = collect_params(&self.params);
        let get = |k: &str| {
            params
                .get(k)
                .copied()
                .ok_or_else(|| Error::BadParameter(k.to_string()))
        };
        match self.family.as_str() {
            "power" => Ok(CoefficientSpec::Power {
                kappa: get("kappa")?,
                m: get("m")?,
            }),
            "custom_radial" => Err(Error::InvalidConfig(
                "custom_radial coefficients are read from --spec".into(),
            )),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

/// The fully resolved inputs of a run, echoed into every report. The
/// output directory is left out so that reports do not depend on where
/// they are written.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<MapConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<CoefficientSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckId>,
    pub ladder: RadiusLadder,
    pub quadrature: QuadratureConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverConfig {
    pub r0: f64,
    #[serde(rename = "R0")]
    pub big_r0: f64,
    pub step: f64,
    pub span: (f64, f64),
}
