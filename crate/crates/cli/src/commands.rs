use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use dilatox_core::beltrami::{solve_radial, theorem_nb_bound, RadialSolution, SigmaCoefficient};
use dilatox_core::functionals::{area, boundary_length, circular_dilatation, disc_mean};
use dilatox_core::mapping::min_max_modulus;
use dilatox_core::series::{format_number, serialize_extended, write_columns};
use dilatox_core::verifier::{
    run_suite, theorem1_bound, theorem3_bound, theorem5_bound, theorem6_bracket,
    theorem7_area_derivative, write_margins, CheckId, MatrixEntry, VerificationMatrix,
    MODULUS_SAMPLES,
};
use dilatox_core::{
    BoundReport, DilatationOrder, Error, MappingModel, QuadratureConfig, RadiusLadder, Result,
};

use crate::config::{
    order, parse_checks, AsymArgs, BeltramiArgs, EvalArgs, Format, RunConfig, SolverConfig,
    VerifyArgs,
};
use crate::Verdict;

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A float that serialises `inf` and `nan` as strings.
#[derive(Debug, Clone, Copy)]
struct Num(f64);

impl Serialize for Num {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_extended(&self.0, s)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    Ok((serde_json::to_string_pretty(value)? + "\n").into_bytes())
}

fn write_key_values(path: &Path, rows: &[(String, f64)]) -> Result<()> {
    let mut text = String::from("quantity,value\n");
    for (k, v) in rows {
        text.push_str(&format!("{k},{}\n", format_number(*v)));
    }
    write_file(path, text.as_bytes())
}

fn verdict(reports: &[BoundReport]) -> Verdict {
    if reports.iter().all(|r| r.holds) {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

fn print_reports(reports: &[BoundReport]) {
    for r in reports {
        let flags: Vec<String> = r
            .flags
            .iter()
            .map(|f| {
                serde_json::to_value(f)
                    .map(|v| v.as_str().unwrap_or("").to_string())
                    .unwrap_or_default()
            })
            .collect();
        println!(
            "{:<14} p={:<6} {:<9} margin_min={}{}",
            r.check_id,
            format_number(r.p),
            if r.holds { "holds" } else { "VIOLATED" },
            format_number(r.margin_min),
            if flags.is_empty() {
                String::new()
            } else {
                format!(" flags={}", flags.join(","))
            }
        );
    }
}

#[derive(Serialize)]
struct EvalRow {
    r: Num,
    d_p: Num,
    disc_mean: Num,
    #[serde(rename = "S")]
    s: Num,
    #[serde(rename = "L")]
    l: Num,
    l_f: Num,
    #[serde(rename = "L_f")]
    big_l_f: Num,
    iso_defect: Num,
}

const EVAL_HEADER: [&str; 8] = [
    "r",
    "d_p",
    "disc_mean",
    "S",
    "L",
    "l_f",
    "L_f",
    "iso_defect",
];

fn eval_row(
    map: &dyn MappingModel,
    p: DilatationOrder,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<[f64; 8]> {
    let d_p = circular_dilatation(map, r, p, cfg)?;
    let mean = disc_mean(map, r, p, cfg)?.value;
    let s = area(map, r, cfg)?;
    let l = boundary_length(map, r, cfg)?;
    let (lo, hi) = min_max_modulus(map, r, MODULUS_SAMPLES)?;
    let iso = l * l - 4.0 * std::f64::consts::PI * s;
    Ok([r, d_p, mean, s, l, lo, hi, iso])
}

pub fn eval(a: EvalArgs) -> Result<Verdict> {
    let (selected, map_cfg) = a.map.resolve()?;
    let p = order(a.p)?;
    let cfg = a.quad.resolve()?;
    let ladder = a.ladder.resolve(RadiusLadder::default())?;
    ladder.validate_against(cfg.r_min)?;
    let format = a.out.prepare(Format::Csv)?;
    let map = selected.model();
    let rows: Vec<[f64; 8]> = ladder
        .rungs()
        .into_iter()
        .map(|r| eval_row(map, p, r, &cfg))
        .collect::<Result<_>>()?;
    let path = match format {
        Format::Csv => {
            let columns: Vec<Vec<f64>> = (0..8)
                .map(|j| rows.iter().map(|row| row[j]).collect())
                .collect();
            let refs: Vec<&[f64]> = columns.iter().map(|c| c.as_slice()).collect();
            let mut buf = Vec::new();
            write_columns(&mut buf, &EVAL_HEADER, &refs)?;
            let path = a.out.path("functionals.csv");
            write_file(&path, &buf)?;
            path
        }
        Format::Json => {
            #[derive(Serialize)]
            struct EvalReport {
                tool_version: &'static str,
                config: RunConfig,
                rows: Vec<EvalRow>,
            }
            let report = EvalReport {
                tool_version: TOOL_VERSION,
                config: RunConfig {
                    command: "eval",
                    map: Some(map_cfg),
                    coefficient: None,
                    p: Some(p.get()),
                    s: None,
                    checks: Vec::new(),
                    ladder,
                    quadrature: cfg,
                    solver: None,
                },
                rows: rows
                    .iter()
                    .map(|v| EvalRow {
                        r: Num(v[0]),
                        d_p: Num(v[1]),
                        disc_mean: Num(v[2]),
                        s: Num(v[3]),
                        l: Num(v[4]),
                        l_f: Num(v[5]),
                        big_l_f: Num(v[6]),
                        iso_defect: Num(v[7]),
                    })
                    .collect(),
            };
            let path = a.out.path("functionals.json");
            write_file(&path, &to_json(&report)?)?;
            path
        }
    };
    println!("eval: {} radii written to {}", rows.len(), path.display());
    Ok(Verdict::Holds)
}

fn companion(s: Option<f64>) -> Result<Option<DilatationOrder>> {
    s.map(|v| order(v)?.require_above_two()).transpose()
}

pub fn verify(a: VerifyArgs) -> Result<Verdict> {
    let (selected, map_cfg) = a.map.resolve()?;
    let p = order(a.p)?;
    let s = companion(a.s)?;
    let cfg = a.quad.resolve()?;
    let ladder = a.ladder.resolve(RadiusLadder::default())?;
    let mut checks = parse_checks(&a.checks)?;
    if checks.is_empty() {
        checks = CheckId::ALL
            .into_iter()
            .filter(|c| c.applies_to(p.get()))
            .collect();
    }
    let format = a.out.prepare(Format::Json)?;
    let reports = run_suite(selected.model(), p, s, &checks, &ladder, &cfg)?;
    let config = RunConfig {
        command: "verify",
        map: Some(map_cfg),
        coefficient: None,
        p: Some(p.get()),
        s: s.map(|v| v.get()),
        checks,
        ladder,
        quadrature: cfg,
        solver: None,
    };
    let matrix = VerificationMatrix::new(config, &reports);
    match format {
        Format::Json => write_file(&a.out.path("verify.json"), matrix.to_json()?.as_bytes())?,
        Format::Csv => {
            let mut text = String::from("check_id,p,holds,status,margin_min,flags\n");
            for e in &matrix.entries {
                let flags: Vec<String> = e
                    .flags
                    .iter()
                    .map(|f| {
                        serde_json::to_value(f)
                            .ok()
                            .and_then(|v| v.as_str().map(String::from))
                            .unwrap_or_default()
                    })
                    .collect();
                let status = serde_json::to_value(e.status)?;
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    e.check_id,
                    format_number(e.p),
                    e.holds,
                    status.as_str().unwrap_or(""),
                    format_number(e.margin_min),
                    flags.join(";")
                ));
            }
            write_file(&a.out.path("verify.csv"), text.as_bytes())?;
        }
    }
    let mut buf = Vec::new();
    write_margins(&mut buf, &reports)?;
    write_file(&a.out.path("margins.csv"), &buf)?;
    print_reports(&reports);
    Ok(verdict(&reports))
}

#[derive(Serialize)]
struct AsymReport {
    tool_version: &'static str,
    config: RunConfig,
    /// Proxy of `|f(z)|/|z|`.
    k: Num,
    k_0: Num,
    k_1: Option<Num>,
    k_2: Option<Num>,
    #[serde(rename = "A_proxy")]
    a_proxy: Option<Num>,
    bounds: BTreeMap<&'static str, Num>,
    tail_spreads: BTreeMap<&'static str, Num>,
    all_hold: bool,
    entries: Vec<MatrixEntry>,
}

pub fn asym(a: AsymArgs) -> Result<Verdict> {
    let (selected, map_cfg) = a.map.resolve()?;
    let p = order(a.p)?;
    let s = companion(a.s)?;
    let cfg = a.quad.resolve()?;
    let ladder = a.ladder.resolve(RadiusLadder::default())?;
    ladder.validate_against(cfg.r_min)?;
    let format = a.out.prepare(Format::Json)?;
    let map = selected.model();
    let mut bounds = BTreeMap::new();
    let mut spreads = BTreeMap::new();
    let mut reports = Vec::new();
    let (k, k_0, k_1, k_2, a_proxy);
    if p.get() > 2.0 {
        let t1 = theorem1_bound(map, p, &ladder, &cfg)?;
        let t3 = theorem3_bound(map, p, &ladder, &cfg)?;
        k = t3.attained.value;
        k_0 = t3.k.value;
        (k_1, k_2, a_proxy) = (None, None, None);
        bounds.insert("theorem1", Num(t1.outcome.bound));
        bounds.insert("theorem3", Num(t3.bound));
        spreads.insert("k", Num(t3.attained.tail_spread));
        spreads.insert("k_0", Num(t3.k.tail_spread));
        spreads.insert("disc_mean", Num(t1.outcome.k.tail_spread));
        reports.push(t1.outcome.report);
        reports.push(t3.report);
    } else if p.get() < 2.0 {
        let s = s.unwrap_or_else(|| p.conjugate());
        let t5 = theorem5_bound(map, p, &ladder, &cfg)?;
        let t6 = theorem6_bracket(map, p, &ladder, &cfg)?;
        let t7 = theorem7_area_derivative(map, p, s, &ladder, &cfg)?;
        k = t5.attained.value;
        k_0 = t5.k.value;
        k_1 = Some(Num(t6.k1.value));
        k_2 = Some(Num(t6.k2.value));
        a_proxy = Some(Num(t6.a_proxy));
        bounds.insert("theorem5", Num(t5.bound));
        bounds.insert("theorem6_lower", Num(t6.lower));
        bounds.insert("theorem6_upper", Num(t6.upper));
        bounds.insert("theorem7_lower", Num(t7.limit_lower.value));
        bounds.insert("theorem7_upper", Num(t7.limit_upper.value));
        bounds.insert("area_ratio", Num(t7.area_ratio.value));
        spreads.insert("k", Num(t5.attained.tail_spread));
        spreads.insert("k_0", Num(t5.k.tail_spread));
        spreads.insert("k_1", Num(t6.k1.tail_spread));
        spreads.insert("k_2", Num(t6.k2.tail_spread));
        spreads.insert("ratio", Num(t6.ratio_spread));
        spreads.insert("area_ratio", Num(t7.area_ratio.tail_spread));
        reports.push(t5.report);
        reports.push(t6.report);
        reports.push(t7.report);
    } else {
        return Err(Error::InvalidOrder(p.get(), "p != 2"));
    }
    let report = AsymReport {
        tool_version: TOOL_VERSION,
        config: RunConfig {
            command: "asym",
            map: Some(map_cfg),
            coefficient: None,
            p: Some(p.get()),
            s: if p.get() < 2.0 {
                Some(s.unwrap_or_else(|| p.conjugate()).get())
            } else {
                None
            },
            checks: Vec::new(),
            ladder,
            quadrature: cfg,
            solver: None,
        },
        k: Num(k),
        k_0: Num(k_0),
        k_1,
        k_2,
        a_proxy,
        bounds,
        tail_spreads: spreads,
        all_hold: reports.iter().all(|r| r.holds),
        entries: reports.iter().map(MatrixEntry::from).collect(),
    };
    match format {
        Format::Json => write_file(&a.out.path("asym.json"), &to_json(&report)?)?,
        Format::Csv => {
            let mut rows = vec![
                ("k".to_string(), report.k.0),
                ("k_0".to_string(), report.k_0.0),
            ];
            for (name, v) in [
                ("k_1", report.k_1),
                ("k_2", report.k_2),
                ("A_proxy", report.a_proxy),
            ] {
                if let Some(v) = v {
                    rows.push((name.to_string(), v.0));
                }
            }
            rows.extend(
                report
                    .bounds
                    .iter()
                    .map(|(k, v)| (format!("bound_{k}"), v.0)),
            );
            rows.extend(
                report
                    .tail_spreads
                    .iter()
                    .map(|(k, v)| (format!("spread_{k}"), v.0)),
            );
            write_key_values(&a.out.path("asym.csv"), &rows)?;
        }
    }
    println!("k = {}  k_0 = {}", format_number(k), format_number(k_0));
    if let (Some(k1), Some(k2), Some(a)) = (report.k_1, report.k_2, report.a_proxy) {
        println!(
            "k_1 = {}  k_2 = {}  A_proxy = {}",
            format_number(k1.0),
            format_number(k2.0),
            format_number(a.0)
        );
    }
    for (name, b) in &report.bounds {
        println!("{name} = {}", format_number(b.0));
    }
    print_reports(&reports);
    Ok(verdict(&reports))
}

/// Closed-form radial solution of the power family through the anchor.
fn power_solution(kappa: f64, m: f64, r0: f64, big_r0: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| {
        if m == 0.0 {
            big_r0 * (r / r0).powf(1.0 / kappa)
        } else {
            let c = big_r0.powf(-m) - r0.powf(-m) / kappa;
            (r.powf(-m) / kappa + c).powf(-1.0 / m)
        }
    }
}

fn max_rel_error(sol: &RadialSolution, exact: impl Fn(f64) -> f64) -> f64 {
    let (r, v) = sol.profile.nodes();
    r.iter()
        .zip(v)
        .map(|(r, v)| {
            let e = exact(*r);
            ((v - e) / e).abs()
        })
        .fold(0.0, f64::max)
}

/// Ladder fitted inside the solved span: `2 r_max ≤ b` and deepest rung
/// at least `max(r_min, 2a)`.
fn span_ladder(span: (f64, f64), r_min: f64) -> Result<RadiusLadder> {
    let base = RadiusLadder::default();
    let r_max = base.r_max.min(0.5 * span.1);
    let lo = r_min.max(2.0 * span.0);
    if !(lo < r_max) {
        return Err(Error::InvalidConfig(format!(
            "span [{}, {}] leaves no room for a radius ladder",
            span.0, span.1
        )));
    }
    let count = ((lo / r_max).ln() / base.rho.ln()).floor() as usize + 1;
    let count = count.min(base.count);
    RadiusLadder::new(r_max, base.rho, count, base.tail.min(count))
}

#[derive(Serialize)]
struct BeltramiReport {
    tool_version: &'static str,
    config: RunConfig,
    coefficient_label: String,
    m: f64,
    nodes: usize,
    residual_max: Num,
    exits_unit_disc: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_max_rel_error: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma0: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma0_tail_spread: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    attained: Option<Num>,
    all_hold: bool,
    entries: Vec<MatrixEntry>,
}

pub fn beltrami(a: BeltramiArgs) -> Result<Verdict> {
    let spec = a.coefficient()?;
    let coef: SigmaCoefficient = spec.build()?;
    let m = coef.m();
    let cfg = a.quad.resolve()?;
    let span = a.span.or(coef.domain()).unwrap_or((0.05, 0.95));
    let big_r0 = match (a.big_r0, coef.kappa()) {
        (Some(v), _) => v,
        (None, Some(kappa)) if m > 0.0 => kappa.powf(1.0 / m) * a.r0,
        (None, Some(_)) => a.r0,
        (None, None) => return Err(Error::BadParameter("R0".into())),
    };
    let ladder = if a.ladder.is_default() {
        span_ladder(span, cfg.r_min)?
    } else {
        a.ladder.resolve(RadiusLadder::default())?
    };
    let format = a.out.prepare(Format::Json)?;
    let sol = solve_radial(&coef, a.r0, big_r0, span, a.step)?;
    let exact = coef
        .kappa()
        .map(|kappa| max_rel_error(&sol, power_solution(kappa, m, a.r0, big_r0)));
    let nb = if m > 0.0 {
        Some(theorem_nb_bound(&coef, &sol, &ladder, &cfg)?)
    } else {
        None
    };
    let mut reports = Vec::new();
    if let Some(nb) = &nb {
        reports.push(nb.report.clone());
    }
    let (nodes, _) = sol.profile.nodes();
    let report = BeltramiReport {
        tool_version: TOOL_VERSION,
        config: RunConfig {
            command: "beltrami",
            map: None,
            coefficient: Some(spec),
            p: None,
            s: None,
            checks: Vec::new(),
            ladder,
            quadrature: cfg,
            solver: Some(SolverConfig {
                r0: a.r0,
                big_r0,
                step: a.step,
                span,
            }),
        },
        coefficient_label: coef.label(),
        m,
        nodes: nodes.len(),
        residual_max: Num(sol.residual_max),
        exits_unit_disc: sol.exits_unit_disc,
        exact_max_rel_error: exact.map(Num),
        sigma0: nb.as_ref().map(|n| Num(n.sigma0.value)),
        sigma0_tail_spread: nb.as_ref().map(|n| Num(n.sigma0.tail_spread)),
        constant: nb.as_ref().map(|n| Num(n.constant)),
        bound: nb.as_ref().map(|n| Num(n.bound)),
        attained: nb.as_ref().map(|n| Num(n.attained.value)),
        all_hold: reports.iter().all(|r| r.holds),
        entries: reports.iter().map(MatrixEntry::from).collect(),
    };
    let mut buf = Vec::new();
    sol.write_csv(&mut buf)?;
    write_file(&a.out.path("solution.csv"), &buf)?;
    match format {
        Format::Json => write_file(&a.out.path("beltrami.json"), &to_json(&report)?)?,
        Format::Csv => {
            let mut rows = vec![
                ("m".to_string(), m),
                ("residual_max".to_string(), sol.residual_max),
            ];
            let optional = [
                ("exact_max_rel_error", report.exact_max_rel_error),
                ("sigma0", report.sigma0),
                ("constant", report.constant),
                ("bound", report.bound),
                ("attained", report.attained),
            ];
            rows.extend(
                optional
                    .into_iter()
                    .filter_map(|(k, v)| v.map(|v| (k.to_string(), v.0))),
            );
            write_key_values(&a.out.path("beltrami.csv"), &rows)?;
        }
    }
    println!(
        "{}: {} nodes on [{}, {}], residual {}",
        report.coefficient_label,
        report.nodes,
        format_number(span.0),
        format_number(span.1),
        format_number(sol.residual_max)
    );
    if let Some(e) = exact {
        println!("max relative error vs closed form {}", format_number(e));
    }
    if sol.exits_unit_disc {
        println!("note: the solution leaves the unit disc on the span");
    }
    print_reports(&reports);
    Ok(verdict(&reports))
}
