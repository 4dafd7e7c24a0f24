//! The fixed suite behind `report-all`: every identity, bound and limit the
//! library checks, as one flat table.

use hardy_core::aniso::{self, AnisoPsiSpec};
use hardy_core::norms::{self, PGrid, PsiSpec, Spacing};
use hardy_core::radialfn::{extremal_lp_norm_analytic, FactorableFunction, RadialFunction};
use hardy_core::specfun;
use hardy_core::verify::{self, SharpnessConfig};
use hardy_core::weights::{SlowlyVarying, WeightSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::commands::Outcome;
use crate::output::{Cell, Table};
use crate::CliError;

pub const REPORT_HEADER: [&str; 6] = ["section", "case", "value", "reference", "abs_err", "pass"];

pub const HARDY_IDENTITY_TOL: f64 = 1e-8;
pub const BETA_CLOSED_FORM_TOL: f64 = 1e-6;
pub const EXTREMAL_NORM_TOL: f64 = 1e-7;
pub const FACTORIZATION_TOL: f64 = 1e-7;
/// Lower bound for the last sharpness ratio (ε = 1e-4, const weight, d = 1,
/// p = 2), below the closed-form value 0.99990001.
pub const SHARPNESS_THRESHOLD: f64 = 0.9998;
pub const TRUNCATION_TOL: f64 = 1e-3;
pub const EXACT_ASYMPTOTIC_BETA_TOL: f64 = 1e-8;
pub const EXACT_ASYMPTOTIC_LOG_TOL: f64 = 1e-6;
pub const BETA_TUPLE_SEED: u64 = 0x5eed_be7a;
/// Grid size of the GLS sweep inside the report.
pub const REPORT_GLS_POINTS: usize = 9;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `n` log-spaced points from lo to hi inclusive.
pub fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Random admissible (α, β, d, p): α, β ∈ [0.2, 5], d ∈ {1, 2, 3}, p ∈ [1, 100]
/// with α - d/p ≥ 0.05, drawn from a seeded stream.
pub fn beta_tuples(n: usize, seed: u64) -> Vec<(f64, f64, usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let alpha = rng.gen_range(0.2..=5.0);
        let beta = rng.gen_range(0.2..=5.0);
        let d: usize = rng.gen_range(1..=3);
        let df = d as f64;
        // s = α - d/p, with p ≥ 1 and p ≤ 100
        let (s_lo, s_hi) = ((alpha - df).max(0.05), alpha - df / 100.0);
        if !(s_hi > s_lo) {
            continue;
        }
        let s = rng.gen_range(s_lo..s_hi);
        out.push((alpha, beta, d, df / (alpha - s)));
    }
    out
}

/// ψ support for the ψ(p) = |f|_p choice: where the catalog function's norm is finite.
pub fn norm_psi_support(f: &RadialFunction) -> (f64, f64) {
    let decay = f.exponent_at_infinity();
    let a = if decay.is_finite() { (f.dimension() as f64 / -decay).max(1.0) * 1.08 } else { 1.0 };
    (a, 12.0)
}

struct Report {
    table: Table,
    failures: usize,
}

impl Report {
    fn row(&mut self, section: &str, case: String, value: f64, reference: f64, abs_err: f64, pass: bool) {
        if !pass {
            self.failures += 1;
        }
        self.table.push(vec![
            Cell::Text(section.into()),
            Cell::Text(case),
            Cell::Num(value),
            Cell::Num(reference),
            Cell::Num(abs_err),
            Cell::Bool(pass),
        ]);
    }
}

pub fn report_all() -> Result<Outcome, CliError> {
    let mut r = Report { table: Table::new(&REPORT_HEADER), failures: 0 };
    hardy_identity(&mut r)?;
    beta_closed_form(&mut r)?;
    extremal_norms(&mut r)?;
    soundness(&mut r)?;
    sharpness(&mut r)?;
    gls(&mut r)?;
    anisotropic(&mut r)?;
    asymptotics(&mut r)?;
    let rows = r.table.rows.len();
    r.table.summarize("cases", Value::from(rows));
    r.table.summarize("failures", Value::from(r.failures));
    Ok(Outcome { table: r.table, pass: r.failures == 0 })
}

fn hardy_identity(r: &mut Report) -> Result<(), CliError> {
    let w = WeightSpec::constant(1.0)?;
    for p in log_points(1.1, 100.0, 50) {
        let t = w.theta_quadrature(1, p)?;
        let want = p / (p - 1.0);
        r.row("hardy-identity", format!("p={p}"), t.value, want, t.abs_error, rel(t.value, want) <= HARDY_IDENTITY_TOL);
    }
    Ok(())
}

fn beta_closed_form(r: &mut Report) -> Result<(), CliError> {
    for (alpha, beta, d, p) in beta_tuples(100, BETA_TUPLE_SEED) {
        let w = WeightSpec::beta(alpha, beta)?;
        let t = w.theta_quadrature(d, p)?;
        let want = specfun::beta(alpha - d as f64 / p, beta)?;
        r.row(
            "beta-closed-form",
            format!("alpha={alpha} beta={beta} d={d} p={p}"),
            t.value,
            want,
            t.abs_error,
            rel(t.value, want) <= BETA_CLOSED_FORM_TOL,
        );
    }
    Ok(())
}

fn extremal_norms(r: &mut Report) -> Result<(), CliError> {
    for d in 1..=3 {
        for p in [1.5, 2.0, 4.0] {
            for eps in [0.05, 0.1, 0.25] {
                let f = RadialFunction::extremal(d, p, eps)?;
                let n = norms::lp_norm_radial(&f, p)?;
                let want = extremal_lp_norm_analytic(d, p, eps)?;
                r.row(
                    "extremal-norm",
                    format!("d={d} p={p} eps={eps}"),
                    n.value,
                    want,
                    n.abs_error,
                    rel(n.value, want) <= EXTREMAL_NORM_TOL,
                );
            }
        }
    }
    Ok(())
}

fn soundness(r: &mut Report) -> Result<(), CliError> {
    for row in verify::soundness_sweep(&[1, 2, 3], &verify::SOUNDNESS_P)? {
        let b = row.report;
        r.row(
            "soundness",
            format!("{} {} {} d={} p={}", row.operator.as_str(), row.weight, row.function, row.d, b.p),
            b.ratio,
            1.0,
            b.numerical_margin,
            b.pass,
        );
    }
    Ok(())
}

fn sharpness(r: &mut Report) -> Result<(), CliError> {
    let w = WeightSpec::constant(1.0)?;
    let rep = verify::sharpness_sweep(&SharpnessConfig::new(w.clone(), 1, 2.0))?;
    for e in &rep.entries {
        let ratio = e.ratio.unwrap_or(f64::NAN);
        r.row("sharpness", format!("eps={}", e.eps), ratio, 1.0, e.numerical_margin, ratio <= 1.0 + e.numerical_margin);
    }
    let last = rep.entries.last().and_then(|e| e.ratio).unwrap_or(f64::NAN);
    r.row("sharpness", "monotone".into(), last, SHARPNESS_THRESHOLD, 0.0, rep.monotone && last >= SHARPNESS_THRESHOLD);
    let t = w.theta_truncated(1, 2.0, 1e-6)?;
    let full = w.theta(1, 2.0)?;
    let q = t.value / full.value;
    r.row("sharpness", "theta_trunc eps=1e-6".into(), q, 1.0, t.abs_error / full.value, (q - 1.0).abs() <= TRUNCATION_TOL);
    Ok(())
}

fn gls(r: &mut Report) -> Result<(), CliError> {
    for row in verify::gls_sweep(1, REPORT_GLS_POINTS)? {
        let b = row.report;
        r.row("gls", format!("{} {} {}", row.weight, row.psi, row.function), b.ratio, 1.0, b.numerical_margin, b.pass);
    }
    // ψ(p) = |f|_p: the right side is exactly 1
    for w in verify::catalog_weights() {
        for f in verify::catalog_functions(1)? {
            let (a, b) = norm_psi_support(&f);
            let psi = PsiSpec::from_norm_curve(&f, a, b)?;
            let psi_theta = norms::psi_with_theta(&psi, &w, 1)?;
            let grid = PGrid::inset(psi_theta.support(), REPORT_GLS_POINTS, Spacing::Log, norms::DEFAULT_GRID_MARGIN)?;
            let rep = verify::gls_contraction_check(&w, &psi, &f, &grid)?;
            r.row(
                "gls-norm-psi",
                format!("{} {}", w.label(), f.label()),
                rep.lhs,
                rep.rhs,
                rep.numerical_margin,
                rep.rhs == 1.0 && rep.lhs <= 1.0 + rep.numerical_margin,
            );
        }
    }
    Ok(())
}

fn anisotropic(r: &mut Report) -> Result<(), CliError> {
    let f = FactorableFunction::new(vec![RadialFunction::extremal(1, 2.0, 0.1)?, RadialFunction::extremal(1, 2.0, 0.1)?])?;
    for pv in [[2.0, 2.0], [2.0, 3.0], [4.0, 1.8]] {
        let mixed = aniso::mixed_norm(&f, &pv)?;
        let product: f64 = f.factors().iter().zip(pv).map(|(g, p)| norms::lp_norm_radial(g, p).map(|n| n.value)).product::<Result<f64, _>>()?;
        r.row(
            "aniso-factorization",
            format!("p=({},{})", pv[0], pv[1]),
            mixed.value,
            product,
            mixed.abs_error,
            rel(mixed.value, product) <= FACTORIZATION_TOL,
        );
    }
    for w in [WeightSpec::constant(1.0)?, WeightSpec::beta(2.0, 3.0)?] {
        let psi = AnisoPsiSpec::product_of_scalars(vec![PsiSpec::constant(1.0, 1.8, 12.0)?, PsiSpec::power(0.5, 1.8, 12.0)?])?;
        let psi_theta = psi.with_theta(&w, &f.dimensions())?;
        let grids: Vec<PGrid> = psi_theta
            .support_box()
            .iter()
            .map(|&s| PGrid::inset(s, REPORT_GLS_POINTS, Spacing::Log, norms::DEFAULT_GRID_MARGIN))
            .collect::<Result<_, _>>()?;
        let rep = aniso::aniso_contraction_check(&w, &f, &psi, &grids)?;
        r.row("aniso-contraction", w.label(), rep.ratio, 1.0, rep.numerical_margin, rep.pass);
    }
    Ok(())
}

fn asymptotics(r: &mut Report) -> Result<(), CliError> {
    let exact = [
        (verify::check_asymptotic_beta(1.0, 1.0, 1)?, EXACT_ASYMPTOTIC_BETA_TOL),
        (verify::check_asymptotic_log(0.0, SlowlyVarying::One, 1)?, EXACT_ASYMPTOTIC_LOG_TOL),
        (verify::check_asymptotic_log(1.0, SlowlyVarying::One, 1)?, EXACT_ASYMPTOTIC_LOG_TOL),
    ];
    for (rep, tol) in &exact {
        for pt in &rep.points {
            let v = pt.ratio.unwrap_or(f64::NAN);
            r.row("asymptotic-exact", format!("{} k={}", rep.label, pt.k), v, 1.0, pt.abs_err, (v - 1.0).abs() <= *tol);
        }
    }
    for rep in [
        verify::check_asymptotic_beta(2.0, 3.0, 1)?,
        verify::check_asymptotic_log(0.5, SlowlyVarying::LogShift, 1)?,
    ] {
        let v = rep.final_ratio.unwrap_or(f64::NAN);
        let err = rep.points.last().map_or(f64::NAN, |p| p.abs_err);
        r.row("asymptotic-limit", rep.label.clone(), v, 1.0, err, rep.pass);
    }
    Ok(())
}
