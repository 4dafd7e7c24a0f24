//! Numerical checks of the operator-norm identities: the L^p bounds for
//! U_φ, V_φ and H_d, the grand-Lebesgue contraction, sharpness of the
//! constant via the extremal family, and the near-threshold asymptotics of θ.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::norms::{self, GlsNorm, LpNorm, PGrid, PsiSpec};
use crate::operators;
use crate::radialfn::{extremal_lp_norm_analytic, RadialFunction};
use crate::specfun;
use crate::weights::{SlowlyVarying, ThetaValue, WeightKind, WeightSpec};

/// Absolute floor of every margin, on the ratio scale.
pub const MARGIN_FLOOR: f64 = 1e-9;
pub const DEFAULT_EPS_SCHEDULE: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const SOUNDNESS_P: [f64; 5] = [1.5, 2.0, 3.0, 5.0, 10.0];
/// Tolerance of the final asymptotic ratio.
/// Refinement tolerance in p of the sups in [`gls_sweep`].
pub const SWEEP_REFINE_TOL: f64 = 1e-4;
pub const ASYMPTOTIC_TOL: f64 = 0.05;

/// lhs ≤ rhs within error, in ratio form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub numerical_margin: f64,
    pub pass: bool,
}

/// (ratio, margin, pass) for lhs ≤ rhs.
///
/// The margin is three times the propagated error of lhs/rhs plus
/// [`MARGIN_FLOOR`]. 0 ≤ 0 passes with ratio 0. An infinite rhs makes the
/// bound vacuous (pass; ratio NaN when lhs is infinite too); an infinite lhs
/// against a finite rhs fails.
pub fn judge(lhs: f64, lhs_err: f64, rhs: f64, rhs_err: f64) -> (f64, f64, bool) {
    if lhs == 0.0 && rhs == 0.0 {
        return (0.0, MARGIN_FLOOR, true);
    }
    if rhs.is_infinite() {
        return (if lhs.is_finite() { 0.0 } else { f64::NAN }, MARGIN_FLOOR, true);
    }
    if lhs.is_infinite() {
        return (f64::INFINITY, MARGIN_FLOOR, false);
    }
    let ratio = lhs / rhs;
    let margin = 3.0 * (lhs_err / rhs + lhs * rhs_err / (rhs * rhs)) + MARGIN_FLOOR;
    (ratio, margin, ratio <= 1.0 + margin)
}

impl BoundReport {
    pub fn new(p: f64, lhs: LpNorm, rhs: LpNorm) -> Self {
        let (ratio, numerical_margin, pass) = judge(lhs.value, lhs.abs_error, rhs.value, rhs.abs_error);
        BoundReport { p, lhs: lhs.value, rhs: rhs.value, ratio, numerical_margin, pass }
    }
}

fn finite_norm(f: &RadialFunction, p: f64) -> Result<LpNorm> {
    let n = norms::lp_norm_radial(f, p)?;
    if !n.is_finite() {
        return Err(Error::Divergent(format!("|{}|_{p} is infinite", f.label())));
    }
    Ok(n)
}

fn times(k: f64, k_err: f64, n: LpNorm) -> LpNorm {
    LpNorm { value: k * n.value, abs_error: k_err * n.value + k * n.abs_error }
}

/// |U_φ f|_p ≤ θ(p)|f|_p.
pub fn check_operator_bound(w: &WeightSpec, f: &RadialFunction, p: f64) -> Result<BoundReport> {
    let th = w.theta(f.dimension(), p)?;
    if !th.finite {
        return Err(Error::InfiniteNorm { p });
    }
    let nf = finite_norm(f, p)?;
    if f.is_zero() {
        return Ok(BoundReport::new(p, LpNorm::ZERO, LpNorm::ZERO));
    }
    let image = operators::apply_hardy_avg(w, f)?;
    let lhs = norms::lp_norm_radial(&image, p)?;
    Ok(BoundReport::new(p, lhs, times(th.value, th.abs_error, nf)))
}

/// |V_φ f|_p ≤ ζ(p)|f|_p.
pub fn check_conjugate_bound(w: &WeightSpec, f: &RadialFunction, p: f64) -> Result<BoundReport> {
    let z = w.zeta(f.dimension(), p)?;
    if !z.finite {
        return Err(Error::InfiniteNorm { p });
    }
    let nf = finite_norm(f, p)?;
    if f.is_zero() {
        return Ok(BoundReport::new(p, LpNorm::ZERO, LpNorm::ZERO));
    }
    let image = operators::apply_conjugate(w, f)?;
    let lhs = norms::lp_norm_radial(&image, p)?;
    Ok(BoundReport::new(p, lhs, times(z.value, z.abs_error, nf)))
}

/// |H_d f|_p ≤ p/(p-1)|f|_p.
pub fn check_hardy_multi(f: &RadialFunction, p: f64) -> Result<BoundReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid(format!("the Hardy bound needs finite p > 1, got {p}")));
    }
    let nf = finite_norm(f, p)?;
    if f.is_zero() {
        return Ok(BoundReport::new(p, LpNorm::ZERO, LpNorm::ZERO));
    }
    let image = operators::apply_hardy_multi(f)?;
    let lhs = norms::lp_norm_radial(&image, p)?;
    let k = p / (p - 1.0);
    Ok(BoundReport::new(p, lhs, times(k, 4.0 * f64::EPSILON * k, nf)))
}

fn gls_bound(
    image: Option<&RadialFunction>,
    f: &RadialFunction,
    psi_image: &PsiSpec,
    psi: &PsiSpec,
    grid: &PGrid,
) -> Result<BoundReport> {
    let (a, b) = psi_image.support();
    if !(grid.lo() > a && grid.hi() < b) {
        return Err(Error::GridOutsideSupport { lo: grid.lo(), hi: grid.hi(), a, b });
    }
    let rhs = norms::gls_norm(norms::norm_curve(f), psi, grid)?;
    let Some(image) = image else {
        return Ok(BoundReport { p: grid.lo(), lhs: 0.0, rhs: rhs.value, ratio: 0.0, numerical_margin: MARGIN_FLOOR, pass: true });
    };
    let lhs: GlsNorm = norms::gls_norm(norms::norm_curve(image), psi_image, grid)?;
    // the sup on the right dominates the ratio at the left maximiser, which
    // refinement may have placed between grid points
    let mut rhs_val = rhs.value;
    let mut rhs_err = rhs.abs_error;
    if lhs.value.is_finite() {
        let at = norms::lp_norm_radial(f, lhs.argmax_p)?;
        let s = psi.eval(lhs.argmax_p)?;
        if at.value / s > rhs_val {
            rhs_val = at.value / s;
            rhs_err = at.abs_error / s;
        }
    }
    let (ratio, numerical_margin, pass) = judge(lhs.value, lhs.abs_error, rhs_val, rhs_err);
    Ok(BoundReport { p: lhs.argmax_p, lhs: lhs.value, rhs: rhs_val, ratio, numerical_margin, pass })
}

/// ‖U_φ f‖ in G(ψ_θ) against ‖f‖ in G(ψ), both as sups over `grid`.
pub fn gls_contraction_check(w: &WeightSpec, psi: &PsiSpec, f: &RadialFunction, grid: &PGrid) -> Result<BoundReport> {
    let psi_theta = norms::psi_with_theta(psi, w, f.dimension())?;
    let image = if f.is_zero() { None } else { Some(operators::apply_hardy_avg(w, f)?) };
    gls_bound(image.as_ref(), f, &psi_theta, psi, grid)
}

/// The same contraction for V_φ with ψ·ζ.
pub fn gls_conjugate_check(w: &WeightSpec, psi: &PsiSpec, f: &RadialFunction, grid: &PGrid) -> Result<BoundReport> {
    let psi_zeta = norms::psi_with_zeta(psi, w, f.dimension())?;
    let image = if f.is_zero() { None } else { Some(operators::apply_conjugate(w, f)?) };
    gls_bound(image.as_ref(), f, &psi_zeta, psi, grid)
}

/// The same contraction for H_d with ψ·p/(p-1).
pub fn gls_hardy_check(psi: &PsiSpec, f: &RadialFunction, grid: &PGrid) -> Result<BoundReport> {
    let psi_1 = norms::psi_hardy(psi)?;
    let image = if f.is_zero() { None } else { Some(operators::apply_hardy_multi(f)?) };
    gls_bound(image.as_ref(), f, &psi_1, psi, grid)
}

#[derive(Debug, Clone)]
pub struct SharpnessConfig {
    pub w: WeightSpec,
    pub d: usize,
    pub p: f64,
    pub eps_schedule: Vec<f64>,
}

impl SharpnessConfig {
    pub fn new(w: WeightSpec, d: usize, p: f64) -> Self {
        SharpnessConfig { w, d, p, eps_schedule: DEFAULT_EPS_SCHEDULE.to_vec() }
    }

    pub fn with_schedule(mut self, eps: Vec<f64>) -> Self {
        self.eps_schedule = eps;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.eps_schedule.is_empty() {
            return Err(invalid("empty eps schedule"));
        }
        for w in self.eps_schedule.windows(2) {
            if !(w[1] < w[0]) {
                return Err(invalid("eps schedule must be strictly decreasing"));
            }
        }
        if self.eps_schedule.iter().any(|e| !(*e > 0.0 && *e < 0.5)) {
            return Err(invalid("eps values must lie in (0, 1/2)"));
        }
        Ok(())
    }
}

/// One ε of a sharpness sweep. `ratio` is `None` when that entry failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessEntry {
    pub eps: f64,
    pub ratio: Option<f64>,
    /// θ_ε(p)/θ(p).
    pub theta_trunc_ratio: Option<f64>,
    pub abs_err: f64,
    pub numerical_margin: f64,
    /// |f_ε|_p by quadrature relative to the closed form, minus 1.
    pub norm_check: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessReport {
    pub p: f64,
    pub d: usize,
    pub weight: String,
    pub entries: Vec<SharpnessEntry>,
    /// Largest observed ratio: a lower bound of the best constant.
    pub k_lower_bound: f64,
    /// Limit of a fit ratio ≈ L - c ε^q through the last three good entries.
    pub extrapolated_limit: Option<f64>,
    /// Ratios non-decreasing as ε decreases, within margins.
    pub monotone: bool,
}

impl SharpnessReport {
    pub fn eps_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.eps).collect()
    }
    pub fn ratios(&self) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| e.ratio).collect()
    }
    /// Every successful ratio stays below 1 + margin.
    pub fn bounded(&self) -> bool {
        self.entries.iter().all(|e| e.ratio.is_none_or(|r| r <= 1.0 + e.numerical_margin))
    }
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.failure.is_some()).count()
    }
}

fn sharpness_entry(cfg: &SharpnessConfig, theta: f64, theta_err: f64, eps: f64) -> SharpnessEntry {
    let run = || -> Result<SharpnessEntry> {
        let f = RadialFunction::extremal(cfg.d, cfg.p, eps)?;
        let nf = finite_norm(&f, cfg.p)?;
        let analytic = extremal_lp_norm_analytic(cfg.d, cfg.p, eps)?;
        let image = operators::apply_hardy_avg_extremal(&cfg.w, cfg.d, cfg.p, eps)?;
        let lhs = norms::lp_norm_radial(&image, cfg.p)?;
        let rhs = times(theta, theta_err, nf);
        let (ratio, margin, _) = judge(lhs.value, lhs.abs_error, rhs.value, rhs.abs_error);
        let trunc = cfg.w.theta_truncated(cfg.d, cfg.p, eps)?;
        Ok(SharpnessEntry {
            eps,
            ratio: Some(ratio),
            theta_trunc_ratio: Some(trunc.value / theta),
            abs_err: (margin - MARGIN_FLOOR) / 3.0,
            numerical_margin: margin,
            norm_check: Some(nf.value / analytic - 1.0),
            failure: None,
        })
    };
    run().unwrap_or_else(|e| SharpnessEntry {
        eps,
        ratio: None,
        theta_trunc_ratio: None,
        abs_err: f64::NAN,
        numerical_margin: f64::NAN,
        norm_check: None,
        failure: Some(e.to_string()),
    })
}

/// ratio(ε) = |U_φ f_ε|_p / (θ(p)|f_ε|_p) along the schedule.
pub fn sharpness_sweep(cfg: &SharpnessConfig) -> Result<SharpnessReport> {
    cfg.validate()?;
    let th = cfg.w.theta(cfg.d, cfg.p)?;
    if !th.finite {
        return Err(Error::InfiniteNorm { p: cfg.p });
    }
    let entries: Vec<SharpnessEntry> =
        cfg.eps_schedule.par_iter().map(|&eps| sharpness_entry(cfg, th.value, th.abs_error, eps)).collect();
    let good: Vec<(f64, f64, f64)> =
        entries.iter().filter_map(|e| e.ratio.map(|r| (e.eps, r, e.numerical_margin))).collect();
    let k_lower_bound = good.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    let monotone = good.windows(2).all(|w| w[1].1 >= w[0].1 - (w[0].2 + w[1].2));
    let extrapolated_limit = if good.len() >= 3 {
        let n = good.len();
        extrapolate([good[n - 3], good[n - 2], good[n - 1]].map(|g| (g.0, g.1)))
    } else {
        None
    };
    Ok(SharpnessReport {
        p: cfg.p,
        d: cfg.d,
        weight: cfg.w.label(),
        entries,
        k_lower_bound,
        extrapolated_limit,
        monotone,
    })
}

/// Limit L of r(ε) = L - c ε^q through three points with decreasing ε.
fn extrapolate(pts: [(f64, f64); 3]) -> Option<f64> {
    let [(e1, r1), (e2, r2), (e3, r3)] = pts;
    let (d1, d2) = (r2 - r1, r3 - r2);
    if !(d1 > 0.0 && d2 > 0.0) {
        return Some(r3);
    }
    let target = d1 / d2;
    let g = |q: f64| (e1.powf(q) - e2.powf(q)) / (e2.powf(q) - e3.powf(q)) - target;
    let (mut lo, mut hi) = (1e-3, 10.0);
    if g(lo).signum() == g(hi).signum() {
        return Some(r3);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == g(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    let c = d1 / (e1.powf(q) - e2.powf(q));
    Some(r3 + c * e3.powf(q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticPoint {
    pub k: u32,
    pub p: f64,
    pub theta: Option<f64>,
    /// θ divided by its asymptotic form.
    pub ratio: Option<f64>,
    /// The same ratio with θ from quadrature (beta weights only).
    pub quadrature_ratio: Option<f64>,
    /// Error estimate of `ratio`.
    pub abs_err: f64,
    pub failure: Option<String>,
}

impl AsymptoticPoint {
    fn failed(k: u32, p: f64, e: Error) -> Self {
        AsymptoticPoint {
            k,
            p,
            theta: None,
            ratio: None,
            quadrature_ratio: None,
            abs_err: f64::NAN,
            failure: Some(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub label: String,
    pub points: Vec<AsymptoticPoint>,
    pub final_ratio: Option<f64>,
    /// Final ratio within [`ASYMPTOTIC_TOL`] of 1 and no point failed.
    pub pass: bool,
}

fn asymptotic_report(label: String, points: Vec<AsymptoticPoint>) -> AsymptoticReport {
    let final_ratio = points.last().and_then(|p| p.ratio);
    let pass = points.iter().all(|p| p.failure.is_none())
        && final_ratio.is_some_and(|r| (r - 1.0).abs() <= ASYMPTOTIC_TOL);
    AsymptoticReport { label, points, final_ratio, pass }
}

/// R(p) = θ(p)(αp - d)/p at p_k = (d/α)(1 + 10^{-k}), k = 1..5.
///
/// p_k may drop below 1 when α > d; θ is then evaluated as the moment
/// ∫ t^{-d/p} φ directly, outside the p ≥ 1 range of [`WeightSpec::theta`].
pub fn check_asymptotic_beta(alpha: f64, beta: f64, d: usize) -> Result<AsymptoticReport> {
    let w = WeightSpec::beta(alpha, beta)?;
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    let df = d as f64;
    let points = (1..=5u32)
        .into_par_iter()
        .map(|k| {
            let p = df / alpha * (1.0 + 10f64.powi(-(k as i32)));
            let s = df / p;
            let scale = (alpha * p - df) / p;
            let run = || -> Result<(f64, ThetaValue)> {
                let closed = specfun::beta(alpha - s, beta)?;
                let quad = w.moment(s, 0.0)?.ok_or(Error::InfiniteNorm { p })?;
                Ok((closed, quad))
            };
            match run() {
                Ok((closed, quad)) => AsymptoticPoint {
                    k,
                    p,
                    theta: Some(closed),
                    ratio: Some(closed * scale),
                    quadrature_ratio: Some(quad.value * scale),
                    // the closed form is checked against quadrature
                    abs_err: (closed - quad.value).abs().max(quad.abs_error) * scale,
                    failure: None,
                },
                Err(e) => AsymptoticPoint::failed(k, p, e),
            }
        })
        .collect();
    Ok(asymptotic_report(format!("beta(alpha={alpha},beta={beta}),d={d}"), points))
}

/// θ(p) / (Γ(γ+1) (p/(p-d))^{γ+1} L(p/(p-d))) at p_k = d(1 + 10^{-k}), k = 1..5.
pub fn check_asymptotic_log(gamma: f64, l: SlowlyVarying, d: usize) -> Result<AsymptoticReport> {
    let w = WeightSpec::log(gamma, l)?;
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    let df = d as f64;
    let g1 = specfun::gamma(gamma + 1.0)?;
    let points = (1..=5u32)
        .into_par_iter()
        .map(|k| {
            let p = df * (1.0 + 10f64.powi(-(k as i32)));
            let z = p / (p - df);
            let asym = g1 * z.powf(gamma + 1.0) * l.eval(z);
            match w.theta_quadrature(d, p) {
                Ok(th) => AsymptoticPoint {
                    k,
                    p,
                    theta: Some(th.value),
                    ratio: Some(th.value / asym),
                    quadrature_ratio: None,
                    abs_err: th.abs_error / asym,
                    failure: None,
                },
                Err(e) => AsymptoticPoint::failed(k, p, e),
            }
        })
        .collect();
    Ok(asymptotic_report(format!("log(gamma={gamma},L={l}),d={d}"), points))
}

/// The weights every sweep runs over.
pub fn catalog_weights() -> Vec<WeightSpec> {
    let ok = |w: Result<WeightSpec>| w.expect("catalog weight is valid");
    vec![
        ok(WeightSpec::constant(1.0)),
        ok(WeightSpec::beta(2.0, 1.0)),
        ok(WeightSpec::beta(2.0, 3.0)),
        ok(WeightSpec::beta(1.0, 0.5)),
        ok(WeightSpec::beta(3.0, 0.7)),
        ok(WeightSpec::log(1.0, SlowlyVarying::One)),
        ok(WeightSpec::log(0.5, SlowlyVarying::LogShift)),
        ok(WeightSpec::log(-0.5, SlowlyVarying::LogLog)),
    ]
}

/// Test functions every sweep runs over, in dimension d.
pub fn catalog_functions(d: usize) -> Result<Vec<RadialFunction>> {
    Ok(vec![
        RadialFunction::indicator_ball(d)?,
        RadialFunction::gaussian(d)?,
        RadialFunction::bump(d)?,
        RadialFunction::extremal(d, 2.0, 0.1)?,
    ])
}

/// The ψ functions of the GLS sweep, paired with the weights' θ supports by the caller.
pub fn catalog_psis() -> Result<Vec<PsiSpec>> {
    Ok(vec![
        PsiSpec::constant(1.0, 1.0, 12.0)?,
        PsiSpec::power(0.5, 1.0, 12.0)?,
        PsiSpec::power(-1.0, 1.0, 12.0)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Average,
    Conjugate,
    Hardy,
}

impl Operator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Operator::Average => "U",
            Operator::Conjugate => "V",
            Operator::Hardy => "H",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SoundnessRow {
    pub operator: Operator,
    pub weight: String,
    pub function: String,
    pub d: usize,
    pub report: BoundReport,
}

/// Every admissible (operator, weight, function, d, p) combination of the
/// catalog. Combinations with an infinite constant or an infinite |f|_p, or
/// where V_φ f is undefined, are skipped; any other error aborts.
pub fn soundness_sweep(dims: &[usize], ps: &[f64]) -> Result<Vec<SoundnessRow>> {
    let weights = catalog_weights();
    let mut jobs: Vec<(Operator, Option<WeightSpec>, RadialFunction, usize, f64)> = Vec::new();
    for &d in dims {
        for f in catalog_functions(d)? {
            for &p in ps {
                if !norms::lp_norm_radial(&f, p)?.is_finite() {
                    continue;
                }
                for w in &weights {
                    if w.theta(d, p)?.finite {
                        jobs.push((Operator::Average, Some(w.clone()), f.clone(), d, p));
                    }
                    if w.zeta(d, p)?.finite && operators::apply_conjugate(w, &f).is_ok() {
                        jobs.push((Operator::Conjugate, Some(w.clone()), f.clone(), d, p));
                    }
                }
                if p > 1.0 {
                    jobs.push((Operator::Hardy, None, f.clone(), d, p));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|(op, w, f, d, p)| {
            let report = match (op, w) {
                (Operator::Average, Some(w)) => check_operator_bound(w, f, *p)?,
                (Operator::Conjugate, Some(w)) => check_conjugate_bound(w, f, *p)?,
                _ => check_hardy_multi(f, *p)?,
            };
            Ok(SoundnessRow {
                operator: *op,
                weight: w.as_ref().map_or_else(|| "hardy".to_string(), |w| w.label()),
                function: f.label().to_string(),
                d: *d,
                report,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct GlsRow {
    pub weight: String,
    pub psi: String,
    pub function: String,
    pub d: usize,
    pub report: BoundReport,
}

/// [`gls_contraction_check`] over catalog weights × ψ × functions in
/// dimension d, each on an n-point log grid inset in the ψ_θ support.
/// Triples whose supports do not intersect are skipped.
pub fn gls_sweep(d: usize, n: usize) -> Result<Vec<GlsRow>> {
    let psis = catalog_psis()?;
    let mut jobs = Vec::new();
    for w in catalog_weights() {
        let mut targets = Vec::new();
        for psi in &psis {
            let psi_theta = match norms::psi_with_theta(psi, &w, d) {
                Ok(s) => s,
                Err(Error::EmptySupport { .. }) => continue,
                Err(e) => return Err(e),
            };
            let grid = PGrid::inset(psi_theta.support(), n, norms::Spacing::Log, norms::DEFAULT_GRID_MARGIN)?
                .with_refinement(true, SWEEP_REFINE_TOL);
            targets.push((psi.clone(), psi_theta, grid));
        }
        for f in catalog_functions(d)? {
            jobs.push((w.clone(), f, targets.clone()));
        }
    }
    // one image per (w, f), shared by every ψ so its profile cache is reused
    let groups: Vec<Vec<GlsRow>> = jobs
        .par_iter()
        .map(|(w, f, targets)| {
            let image = if f.is_zero() { None } else { Some(operators::apply_hardy_avg(w, f)?) };
            targets
                .iter()
                .map(|(psi, psi_theta, grid)| {
                    Ok(GlsRow {
                        weight: w.label(),
                        psi: psi.kind().to_string(),
                        function: f.label().to_string(),
                        d,
                        report: gls_bound(image.as_ref(), f, psi_theta, psi, grid)?,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(groups.into_iter().flatten().collect())
}

/// Whether a weight has an exact θ formula (used to pick cross-checks).
pub fn has_closed_form(w: &WeightSpec) -> bool {
    matches!(
        w.kind(),
        WeightKind::Constant { .. } | WeightKind::Beta { .. } | WeightKind::Log { l: SlowlyVarying::One, .. }
    )
}
