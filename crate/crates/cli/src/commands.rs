//! One function per command, each producing a table and a verdict.

use hardy_core::aniso::{self, AnisoPsiSpec};
use hardy_core::norms::{self, PGrid};
use hardy_core::radialfn::FactorableFunction;
use hardy_core::verify::{self, BoundReport, Operator, SharpnessConfig};
use hardy_core::weights::{ThetaValue, WeightKind};
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::output::{json_float, Cell, Table};
use crate::{report, CliError};

/// Number of points of a default gls-check grid.
pub const CHECK_GRID_POINTS: usize = 33;

const THETA_HEADER: [&str; 5] = ["p", "value", "finite", "abs_err", "source"];
const BOUND_HEADER: [&str; 6] = ["p", "lhs", "rhs", "ratio", "margin", "pass"];
const SHARPNESS_HEADER: [&str; 4] = ["eps", "ratio", "theta_trunc_ratio", "abs_err"];

#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    /// Every embedded assertion held.
    pub pass: bool,
}

impl Outcome {
    fn info(table: Table) -> Self {
        Outcome { table, pass: true }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Theta => theta_table(cfg, false),
        Command::Zeta => theta_table(cfg, true),
        Command::Norm => norm_table(cfg),
        Command::Gls => gls_table(cfg),
        Command::VerifyBound => verify_bound(cfg),
        Command::Sharpness => sharpness(cfg),
        Command::GlsCheck => gls_check(cfg),
        Command::AnisoCheck => aniso_check(cfg),
        Command::Asymptotics => asymptotics(cfg),
        Command::ReportAll => report::report_all(),
    }
}

fn theta_row(p: f64, t: ThetaValue) -> Vec<Cell> {
    vec![Cell::Num(p), Cell::Num(t.value), Cell::Bool(t.finite), Cell::Num(t.abs_error), Cell::Text(t.source.as_str().into())]
}

fn theta_table(cfg: &RunConfig, zeta: bool) -> Result<Outcome, CliError> {
    let w = cfg.weight();
    let mut table = Table::new(&THETA_HEADER);
    for p in cfg.exponents.as_ref().expect("validated").points() {
        let t = if zeta { w.zeta(cfg.d, p)? } else { w.theta(cfg.d, p)? };
        table.push(theta_row(p, t));
    }
    Ok(Outcome::info(table))
}

fn norm_table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let f = cfg.function();
    let mut table = Table::new(&["p", "value", "finite", "abs_err"]);
    for p in cfg.exponents.as_ref().expect("validated").points() {
        let n = norms::lp_norm_radial(f, p)?;
        table.push(vec![Cell::Num(p), Cell::Num(n.value), Cell::Bool(n.is_finite()), Cell::Num(n.abs_error)]);
    }
    Ok(Outcome::info(table))
}

fn gls_table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (f, psi) = (cfg.function(), cfg.psi());
    let grid = cfg.grid_or_inset(psi.support(), norms::DEFAULT_GRID_POINTS)?;
    let sup = norms::gls_norm(norms::norm_curve(f), psi, &grid)?;
    let mut table = Table::new(&["p", "norm", "psi", "ratio", "abs_err"]);
    for &p in grid.points() {
        let n = norms::lp_norm_radial(f, p)?;
        let s = psi.eval(p)?;
        table.push(vec![Cell::Num(p), Cell::Num(n.value), Cell::Num(s), Cell::Num(n.value / s), Cell::Num(n.abs_error / s)]);
    }
    table.summarize(
        "gls_norm",
        json!({"value": json_float(sup.value), "argmax_p": json_float(sup.argmax_p), "abs_err": json_float(sup.abs_error)}),
    );
    Ok(Outcome::info(table))
}

fn bound_row(r: &BoundReport) -> Vec<Cell> {
    vec![
        Cell::Num(r.p),
        Cell::Num(r.lhs),
        Cell::Num(r.rhs),
        Cell::Num(r.ratio),
        Cell::Num(r.numerical_margin),
        Cell::Bool(r.pass),
    ]
}

fn verify_bound(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let f = cfg.function();
    let mut table = Table::new(&BOUND_HEADER);
    let mut pass = true;
    for p in cfg.exponents.as_ref().expect("validated").points() {
        let r = match cfg.operator {
            Operator::Average => verify::check_operator_bound(cfg.weight(), f, p)?,
            Operator::Conjugate => verify::check_conjugate_bound(cfg.weight(), f, p)?,
            Operator::Hardy => verify::check_hardy_multi(f, p)?,
        };
        pass &= r.pass;
        table.push(bound_row(&r));
    }
    Ok(Outcome { table, pass })
}

fn sharpness(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.exponents.as_ref().expect("validated").points()[0];
    let sc = SharpnessConfig::new(cfg.weight().clone(), cfg.d, p).with_schedule(cfg.eps.clone());
    let rep = verify::sharpness_sweep(&sc)?;
    if let Some(e) = rep.entries.iter().find_map(|e| e.failure.as_ref()) {
        return Err(CliError::Numeric(format!("sharpness entry failed: {e}")));
    }
    let mut table = Table::new(&SHARPNESS_HEADER);
    for e in &rep.entries {
        table.push(vec![Cell::Num(e.eps), Cell::Opt(e.ratio), Cell::Opt(e.theta_trunc_ratio), Cell::Num(e.abs_err)]);
    }
    table.summarize("p", json_float(rep.p));
    table.summarize("d", Value::from(rep.d));
    table.summarize("weight", Value::from(rep.weight.clone()));
    table.summarize("k_lower_bound", json_float(rep.k_lower_bound));
    table.summarize("extrapolated_limit", rep.extrapolated_limit.map_or(Value::Null, json_float));
    table.summarize("monotone", Value::Bool(rep.monotone));
    table.summarize("bounded", Value::Bool(rep.bounded()));
    Ok(Outcome { table, pass: rep.bounded() && rep.monotone })
}

fn gls_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (f, psi) = (cfg.function(), cfg.psi());
    let image_psi = match cfg.operator {
        Operator::Average => norms::psi_with_theta(psi, cfg.weight(), f.dimension())?,
        Operator::Conjugate => norms::psi_with_zeta(psi, cfg.weight(), f.dimension())?,
        Operator::Hardy => norms::psi_hardy(psi)?,
    };
    let grid = cfg.grid_or_inset(image_psi.support(), CHECK_GRID_POINTS)?;
    let r = match cfg.operator {
        Operator::Average => verify::gls_contraction_check(cfg.weight(), psi, f, &grid)?,
        Operator::Conjugate => verify::gls_conjugate_check(cfg.weight(), psi, f, &grid)?,
        Operator::Hardy => verify::gls_hardy_check(psi, f, &grid)?,
    };
    let mut table = Table::new(&BOUND_HEADER);
    table.push(bound_row(&r));
    Ok(Outcome { table, pass: r.pass })
}

fn aniso_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let f = FactorableFunction::new(cfg.functions.clone())?;
    let psi = AnisoPsiSpec::product_of_scalars(cfg.psi.clone())?;
    let psi_theta = psi.with_theta(cfg.weight(), &f.dimensions())?;
    let grids: Vec<PGrid> = match &cfg.grid_points {
        Some(n) => psi_theta
            .support_box()
            .iter()
            .map(|&s| PGrid::inset(s, *n, norms::Spacing::Log, cfg.grid_margin))
            .collect::<Result<_, _>>()?,
        None => aniso::default_axis_grids(&psi_theta)?,
    };
    let r = aniso::aniso_contraction_check(cfg.weight(), &f, &psi, &grids)?;
    let p = r.p.iter().map(|x| crate::output::fmt_float(*x)).collect::<Vec<_>>().join(";");
    let mut table = Table::new(&BOUND_HEADER);
    table.push(vec![
        Cell::Text(p),
        Cell::Num(r.lhs),
        Cell::Num(r.rhs),
        Cell::Num(r.ratio),
        Cell::Num(r.numerical_margin),
        Cell::Bool(r.pass),
    ]);
    Ok(Outcome { table, pass: r.pass })
}

fn asymptotics(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rep = match cfg.weight().kind() {
        WeightKind::Beta { alpha, beta } => verify::check_asymptotic_beta(*alpha, *beta, cfg.d)?,
        WeightKind::Log { gamma, l } => verify::check_asymptotic_log(*gamma, *l, cfg.d)?,
        _ => return Err(CliError::config("asymptotics needs a beta or log weight")),
    };
    let mut table = Table::new(&["k", "p", "theta", "ratio", "quadrature_ratio", "abs_err"]);
    for pt in &rep.points {
        table.push(vec![
            Cell::Int(pt.k as i64),
            Cell::Num(pt.p),
            Cell::Opt(pt.theta),
            Cell::Opt(pt.ratio),
            Cell::Opt(pt.quadrature_ratio),
            Cell::Num(pt.abs_err),
        ]);
    }
    table.summarize("label", Value::from(rep.label.clone()));
    table.summarize("final_ratio", rep.final_ratio.map_or(Value::Null, json_float));
    table.summarize("pass", Value::Bool(rep.pass));
    Ok(Outcome { table, pass: rep.pass })
}
