//! End-to-end acceptance criteria. Prints one line per criterion and exits
//! nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hardy_cli::report::{
    beta_tuples, log_points, norm_psi_support, BETA_CLOSED_FORM_TOL, BETA_TUPLE_SEED, EXACT_ASYMPTOTIC_BETA_TOL,
    EXACT_ASYMPTOTIC_LOG_TOL, EXTREMAL_NORM_TOL, FACTORIZATION_TOL, HARDY_IDENTITY_TOL, SHARPNESS_THRESHOLD,
    TRUNCATION_TOL,
};
use hardy_core::aniso::{self, AnisoPsiSpec};
use hardy_core::norms::{self, PGrid, PsiSpec, Spacing};
use hardy_core::radialfn::{extremal_lp_norm_analytic, FactorableFunction, RadialFunction};
use hardy_core::specfun;
use hardy_core::verify::{self, SharpnessConfig};
use hardy_core::weights::{SlowlyVarying, WeightSpec};

type Outcome = Result<String, String>;
/// Name, runtime budget in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

const SOUNDNESS_MARGIN_CAP: f64 = 1e-6;
const GLS_POINTS: usize = 17;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn e(x: hardy_core::Error) -> String {
    x.to_string()
}

fn verdict(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn hardy_identity() -> Outcome {
    let w = WeightSpec::constant(1.0).map_err(e)?;
    let mut worst: f64 = 0.0;
    for p in log_points(1.1, 100.0, 50) {
        let t = w.theta_quadrature(1, p).map_err(e)?;
        worst = worst.max(rel(t.value, p / (p - 1.0)));
    }
    verdict(worst <= HARDY_IDENTITY_TOL, format!("50 points, max rel err {worst:.2e}"))
}

fn beta_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for (alpha, beta, d, p) in beta_tuples(100, BETA_TUPLE_SEED) {
        let w = WeightSpec::beta(alpha, beta).map_err(e)?;
        let t = w.theta_quadrature(d, p).map_err(e)?;
        let want = specfun::beta(alpha - d as f64 / p, beta).map_err(e)?;
        worst = worst.max(rel(t.value, want));
    }
    verdict(worst <= BETA_CLOSED_FORM_TOL, format!("100 tuples, max rel err {worst:.2e}"))
}

fn extremal_norm() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 1..=3 {
        for p in [1.5, 2.0, 4.0] {
            for eps in [0.05, 0.1, 0.25] {
                let f = RadialFunction::extremal(d, p, eps).map_err(e)?;
                let n = norms::lp_norm_radial(&f, p).map_err(e)?;
                worst = worst.max(rel(n.value, extremal_lp_norm_analytic(d, p, eps).map_err(e)?));
            }
        }
    }
    verdict(worst <= EXTREMAL_NORM_TOL, format!("27 cases, max rel err {worst:.2e}"))
}

fn soundness() -> Outcome {
    let rows = verify::soundness_sweep(&[1, 2, 3], &verify::SOUNDNESS_P).map_err(e)?;
    let mut bad = Vec::new();
    let (mut max_ratio, mut max_margin) = (0.0f64, 0.0f64);
    for row in &rows {
        let b = &row.report;
        max_ratio = max_ratio.max(b.ratio);
        max_margin = max_margin.max(b.numerical_margin);
        if !b.pass || b.numerical_margin > SOUNDNESS_MARGIN_CAP {
            bad.push(format!("{} {} {} d={} p={}", row.operator.as_str(), row.weight, row.function, row.d, b.p));
        }
    }
    let mut msg = format!("{} combinations, max ratio {max_ratio:.9}, max margin {max_margin:.1e}", rows.len());
    if !bad.is_empty() {
        msg = format!("{msg}; failing: {}", bad.join(", "));
    }
    verdict(rows.len() >= 60 && bad.is_empty(), msg)
}

fn sharpness() -> Outcome {
    let w = WeightSpec::constant(1.0).map_err(e)?;
    let rep = verify::sharpness_sweep(&SharpnessConfig::new(w.clone(), 1, 2.0)).map_err(e)?;
    let ratios: Vec<f64> = rep.entries.iter().map(|x| x.ratio.unwrap_or(f64::NAN)).collect();
    let last = *ratios.last().expect("non-empty schedule");
    let trunc = w.theta_truncated(1, 2.0, 1e-6).map_err(e)?.value / w.theta(1, 2.0).map_err(e)?.value;
    let ok = rep.monotone && rep.bounded() && last >= SHARPNESS_THRESHOLD && (trunc - 1.0).abs() <= TRUNCATION_TOL;
    verdict(ok, format!("ratios {ratios:.6?}, final {last:.8} >= {SHARPNESS_THRESHOLD}, θ_ε/θ at ε=1e-6 is {trunc:.6}"))
}

fn gls_contraction() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0;
    for d in 1..=3 {
        for row in verify::gls_sweep(d, GLS_POINTS).map_err(e)? {
            checks += 1;
            if !row.report.pass {
                bad.push(format!("{} {} {} d={d}", row.weight, row.psi, row.function));
            }
        }
        // ψ(p) = |f|_p
        for w in verify::catalog_weights() {
            for f in verify::catalog_functions(d).map_err(e)? {
                let (a, b) = norm_psi_support(&f);
                let psi = PsiSpec::from_norm_curve(&f, a, b).map_err(e)?;
                let psi_theta = norms::psi_with_theta(&psi, &w, d).map_err(e)?;
                let grid =
                    PGrid::inset(psi_theta.support(), GLS_POINTS, Spacing::Log, norms::DEFAULT_GRID_MARGIN).map_err(e)?;
                let r = verify::gls_contraction_check(&w, &psi, &f, &grid).map_err(e)?;
                checks += 1;
                if r.rhs != 1.0 || r.lhs > 1.0 + r.numerical_margin {
                    bad.push(format!("norm-psi {} {} d={d}: lhs {} rhs {}", w.label(), f.label(), r.lhs, r.rhs));
                }
            }
        }
    }
    let mut msg = format!("{checks} checks over d = 1..3 on {GLS_POINTS}-point grids");
    if !bad.is_empty() {
        msg = format!("{msg}; failing: {}", bad.join(", "));
    }
    verdict(bad.is_empty(), msg)
}

fn anisotropic() -> Outcome {
    let ext = || RadialFunction::extremal(1, 2.0, 0.1).map_err(e);
    let f = FactorableFunction::new(vec![ext()?, ext()?]).map_err(e)?;
    let mut worst: f64 = 0.0;
    for pv in [[2.0, 2.0], [2.0, 3.0], [4.0, 1.8]] {
        let mixed = aniso::mixed_norm(&f, &pv).map_err(e)?;
        let mut product = 1.0;
        for (g, p) in f.factors().iter().zip(pv) {
            product *= norms::lp_norm_radial(g, p).map_err(e)?.value;
        }
        worst = worst.max(rel(mixed.value, product));
    }
    let psi = AnisoPsiSpec::product_of_scalars(vec![
        PsiSpec::constant(1.0, 1.8, 12.0).map_err(e)?,
        PsiSpec::power(0.5, 1.8, 12.0).map_err(e)?,
    ])
    .map_err(e)?;
    let mut ok = worst <= FACTORIZATION_TOL;
    let mut ratios = Vec::new();
    for w in [WeightSpec::constant(1.0).map_err(e)?, WeightSpec::beta(2.0, 3.0).map_err(e)?] {
        let psi_theta = psi.with_theta(&w, &f.dimensions()).map_err(e)?;
        let grids: Vec<PGrid> = psi_theta
            .support_box()
            .iter()
            .map(|&s| PGrid::inset(s, GLS_POINTS, Spacing::Log, norms::DEFAULT_GRID_MARGIN))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        let r = aniso::aniso_contraction_check(&w, &f, &psi, &grids).map_err(e)?;
        ok &= r.pass && r.ratio <= 1.0 + r.numerical_margin;
        ratios.push(r.ratio);
    }
    verdict(ok, format!("factorization max rel err {worst:.2e}, contraction ratios {ratios:.6?}"))
}

fn asymptotics() -> Outcome {
    let exact = [
        (verify::check_asymptotic_beta(1.0, 1.0, 1).map_err(e)?, EXACT_ASYMPTOTIC_BETA_TOL),
        (verify::check_asymptotic_log(0.0, SlowlyVarying::One, 1).map_err(e)?, EXACT_ASYMPTOTIC_LOG_TOL),
        (verify::check_asymptotic_log(1.0, SlowlyVarying::One, 1).map_err(e)?, EXACT_ASYMPTOTIC_LOG_TOL),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (rep, tol) in &exact {
        let dev = rep.points.iter().map(|p| p.ratio.map_or(f64::INFINITY, |r| (r - 1.0).abs())).fold(0.0, f64::max);
        ok &= dev <= *tol;
        parts.push(format!("{} max |ratio-1| {dev:.1e}", rep.label));
    }
    for rep in [
        verify::check_asymptotic_beta(2.0, 3.0, 1).map_err(e)?,
        verify::check_asymptotic_log(0.5, SlowlyVarying::LogShift, 1).map_err(e)?,
    ] {
        let v = rep.final_ratio.unwrap_or(f64::NAN);
        ok &= (0.95..=1.05).contains(&v);
        parts.push(format!("{} final {v:.6}", rep.label));
    }
    verdict(ok, parts.join("; "))
}

fn determinism() -> Outcome {
    let run = || -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_hardy")).arg("report-all").output().map_err(|x| x.to_string())?;
        if !out.status.success() {
            return Err(format!("report-all exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    let (a, b) = (run()?, run()?);
    verdict(a == b, format!("{} and {} bytes, identical: {}", a.len(), b.len(), a == b))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 hardy identity", Some(1), hardy_identity),
        ("2 beta closed form", Some(10), beta_closed_form),
        ("3 extremal norm", Some(5), extremal_norm),
        ("4 operator-norm soundness", None, soundness),
        ("5 sharpness", Some(30), sharpness),
        ("6 gls contraction", None, gls_contraction),
        ("7 anisotropic factorization", None, anisotropic),
        ("8 asymptotics", Some(30), asymptotics),
        ("9 determinism", None, determinism),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let mut result = check();
        let took = start.elapsed();
        if let (Ok(m), Some(l)) = (&result, limit.map(Duration::from_secs)) {
            if took > l {
                result = Err(format!("{m}; over the {}s budget", l.as_secs()));
            }
        }
        let (tag, msg) = match result {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("{tag}  {name} ({:.2}s): {msg}", took.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
