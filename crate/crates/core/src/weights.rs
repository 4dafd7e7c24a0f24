//! Weight functions φ on (0, 1) and the moments θ, θ_ε, ζ built from them.
//!
//! All three scalars are moments `∫_lo^1 t^{-s} φ(t) dt`:
//!
//! | scalar | s              | lo |
//! |--------|----------------|----|
//! | θ(p)   | d/p            | 0  |
//! | θ_ε(p) | d/p + ε        | ε  |
//! | ζ(p)   | d(1 - 1/p)     | 0  |
//!
//! Log weights, truncated moments of catalog weights and full moments close
//! to the finiteness threshold are integrated after substituting t = e^{-y},
//! which turns the algebraic singularity at 0 into exponential decay. The
//! rest, including custom weights, go through the plain (0, 1) rule with the
//! declared [`SingularityHint`].

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{self, DeOptions, Node, QuadResult, SingularityHint};
use crate::specfun;

/// Relative tolerance used for every moment quadrature.
pub const MOMENT_REL_TOL: f64 = 1e-12;
/// Below this decay rate of t^{-s}φ near 0 the moment is taken after t = e^{-y}.
const LOG_ROUTE_RATE: f64 = 0.25;
const VALIDATION_GRID: usize = 1024;

/// Positive, slowly varying factor L of a log-type weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlowlyVarying {
    /// L ≡ 1
    One,
    /// L(z) = log(e + z)
    LogShift,
    /// L(z) = log(e + log(e + z))
    LogLog,
}

impl SlowlyVarying {
    pub const ALL: [SlowlyVarying; 3] = [SlowlyVarying::One, SlowlyVarying::LogShift, SlowlyVarying::LogLog];

    pub fn id(&self) -> &'static str {
        match self {
            SlowlyVarying::One => "one",
            SlowlyVarying::LogShift => "log_shift",
            SlowlyVarying::LogLog => "loglog",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown slowly varying function `{s}` (one, log_shift, loglog)")))
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            SlowlyVarying::One => 1.0,
            SlowlyVarying::LogShift => (std::f64::consts::E + z).ln(),
            SlowlyVarying::LogLog => (std::f64::consts::E + (std::f64::consts::E + z).ln()).ln(),
        }
    }

    pub fn ln_eval(&self, z: f64) -> f64 {
        match self {
            SlowlyVarying::One => 0.0,
            _ => self.eval(z).ln(),
        }
    }
}

impl fmt::Display for SlowlyVarying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Evaluator of a user weight: receives `t` and `1 - t`, both exact.
pub type CustomWeightFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum WeightKind {
    /// φ ≡ c
    Constant { c: f64 },
    /// φ(t) = t^{α-1} (1-t)^{β-1}
    Beta { alpha: f64, beta: f64 },
    /// φ(t) = |log t|^γ L(|log t|)
    Log { gamma: f64, l: SlowlyVarying },
    Custom { label: String, eval: CustomWeightFn },
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Constant { c } => write!(f, "Constant {{ c: {c} }}"),
            WeightKind::Beta { alpha, beta } => write!(f, "Beta {{ alpha: {alpha}, beta: {beta} }}"),
            WeightKind::Log { gamma, l } => write!(f, "Log {{ gamma: {gamma}, l: {l:?} }}"),
            WeightKind::Custom { label, .. } => write!(f, "Custom {{ label: {label:?} }}"),
        }
    }
}

/// A validated weight together with its endpoint behaviour.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    kind: WeightKind,
    hint: Option<SingularityHint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaSource {
    Analytic,
    Quadrature,
}

impl ThetaSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThetaSource::Analytic => "analytic",
            ThetaSource::Quadrature => "quadrature",
        }
    }
}

/// θ, θ_ε or ζ at one p. `value` is +∞ when `finite` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub finite: bool,
    pub value: f64,
    pub abs_error: f64,
    pub source: ThetaSource,
}

impl ThetaValue {
    pub fn infinite() -> Self {
        ThetaValue { finite: false, value: f64::INFINITY, abs_error: 0.0, source: ThetaSource::Analytic }
    }

    fn analytic(value: f64) -> Self {
        ThetaValue { finite: true, value, abs_error: 8.0 * f64::EPSILON * value.abs(), source: ThetaSource::Analytic }
    }

    fn from_quad(q: QuadResult) -> Result<Self> {
        let q = q.require_converged()?;
        Ok(ThetaValue { finite: true, value: q.value, abs_error: q.abs_error_estimate, source: ThetaSource::Quadrature })
    }

    /// The value as an `Option`, `None` when infinite.
    pub fn finite_value(&self) -> Option<f64> {
        self.finite.then_some(self.value)
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

impl WeightSpec {
    pub fn constant(c: f64) -> Result<Self> {
        check_positive("c", c)?;
        Self::validated(WeightKind::Constant { c }, Some(SingularityHint::REGULAR))
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        let hint = SingularityHint::new(alpha - 1.0, beta - 1.0, 0.0)?;
        Self::validated(WeightKind::Beta { alpha, beta }, Some(hint))
    }

    pub fn log(gamma: f64, l: SlowlyVarying) -> Result<Self> {
        if !(gamma > -1.0) || !gamma.is_finite() {
            return Err(invalid(format!("gamma must be finite and > -1, got {gamma}")));
        }
        let hint = SingularityHint::new(0.0, gamma, gamma.max(0.0))?;
        Self::validated(WeightKind::Log { gamma, l }, Some(hint))
    }

    /// A user weight. Without a hint, θ/ζ finiteness cannot be decided and
    /// those operations fail with [`Error::UnknownExponent`].
    pub fn custom(label: impl Into<String>, eval: CustomWeightFn, hint: Option<SingularityHint>) -> Result<Self> {
        if let Some(h) = &hint {
            h.validate()?;
        }
        Self::validated(WeightKind::Custom { label: label.into(), eval }, hint)
    }

    fn validated(kind: WeightKind, hint: Option<SingularityHint>) -> Result<Self> {
        let w = WeightSpec { kind, hint };
        let mut any_positive = false;
        for i in 0..VALIDATION_GRID {
            let t = (i as f64 + 0.5) / VALIDATION_GRID as f64;
            let v = w.eval_c(t, 1.0 - t);
            if v.is_nan() || v < 0.0 {
                return Err(invalid(format!("weight `{}` is negative or NaN at t = {t}", w.label())));
            }
            any_positive |= v > 0.0;
        }
        if !any_positive {
            return Err(invalid(format!("weight `{}` vanishes on the validation grid", w.label())));
        }
        Ok(w)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn hint(&self) -> Result<SingularityHint> {
        self.hint.ok_or_else(|| Error::UnknownExponent(self.label()))
    }

    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Constant { c } => format!("const(c={c})"),
            WeightKind::Beta { alpha, beta } => format!("beta(alpha={alpha},beta={beta})"),
            WeightKind::Log { gamma, l } => format!("log(gamma={gamma},L={l})"),
            WeightKind::Custom { label, .. } => format!("custom({label})"),
        }
    }

    pub fn is_catalog(&self) -> bool {
        !matches!(self.kind, WeightKind::Custom { .. })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_c(t, 1.0 - t)
    }

    /// φ(t) given t and its exact complement `tc = 1 - t`.
    pub fn eval_c(&self, t: f64, tc: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant { c } => *c,
            WeightKind::Beta { alpha, beta } => t.powf(alpha - 1.0) * tc.powf(beta - 1.0),
            WeightKind::Log { gamma, l } => {
                let y = neg_ln(t, tc);
                y.powf(*gamma) * l.eval(y)
            }
            WeightKind::Custom { eval, .. } => eval(t, tc),
        }
    }

    /// t^e φ(t), free of intermediate overflow and underflow.
    pub(crate) fn power_weight(&self, e: f64, t: f64, tc: f64) -> f64 {
        match &self.kind {
            WeightKind::Beta { alpha, beta } => power_times(t, e + alpha - 1.0, tc.powf(beta - 1.0)),
            _ => power_times(t, e, self.eval_c(t, tc)),
        }
    }

    /// ln φ(e^{-y}) + a0·y for catalog weights: the part of φ left after
    /// removing the power at 0. `None` for custom weights.
    pub(crate) fn ln_regular(&self, y: f64) -> Option<f64> {
        match &self.kind {
            WeightKind::Constant { c } => Some(c.ln()),
            WeightKind::Beta { beta, .. } => Some((beta - 1.0) * (-(-y).exp_m1()).ln()),
            WeightKind::Log { gamma, l } => Some(gamma * y.ln() + l.ln_eval(y)),
            WeightKind::Custom { .. } => None,
        }
    }

    /// Raw threshold d/(a0+1): θ(p) < ∞ iff d/p < a0 + 1.
    fn raw_threshold(&self, d: usize) -> Result<f64> {
        Ok(d as f64 / (self.hint()?.algebraic_exponent_at_0 + 1.0))
    }

    /// p_min with θ(w, d, p) finite iff p > p_min, clamped to [1, ∞).
    pub fn finiteness_threshold(&self, d: usize) -> Result<f64> {
        check_dimension(d)?;
        Ok(self.raw_threshold(d)?.max(1.0))
    }

    /// ∫_lo^1 t^{-s} φ(t) dt, `None` when the integral diverges (lo = 0 and
    /// s ≥ a0 + 1). `s` may be any real, including values that correspond to
    /// p < 1.
    pub fn moment(&self, s: f64, lo: f64) -> Result<Option<ThetaValue>> {
        if !s.is_finite() || !(0.0..1.0).contains(&lo) {
            return Err(invalid(format!("moment needs finite s and lo in [0, 1), got s={s}, lo={lo}")));
        }
        let hint = self.hint()?;
        if lo == 0.0 && s >= hint.algebraic_exponent_at_0 + 1.0 {
            return Ok(None);
        }
        if self.is_catalog() {
            return self.moment_log_route(s, lo, hint.algebraic_exponent_at_0).map(Some);
        }
        if lo == 0.0 {
            self.moment_unit(s, &hint).map(Some)
        } else {
            let opts = DeOptions::new(MOMENT_REL_TOL);
            let q = quadrature::de_finite(lo, 1.0, |n: Node| Ok::<f64, Error>(power_times(n.x, -s, self.eval_c(n.x, n.from_hi))), &opts)?;
            ThetaValue::from_quad(q).map(Some)
        }
    }

    /// Moment by direct quadrature on (0, 1).
    fn moment_unit(&self, s: f64, hint: &SingularityHint) -> Result<ThetaValue> {
        let shifted = hint.shifted_at_zero(-s);
        let q = quadrature::integrate_unit_with(|t, tc| power_times(t, -s, self.eval_c(t, tc)), &shifted, MOMENT_REL_TOL)?;
        ThetaValue::from_quad(q)
    }

    /// Moment after t = e^{-y}: ∫_0^{Y} exp(-(1 + a0 - s) y + ln_regular(y)) dy, Y = -ln lo.
    fn moment_log_route(&self, s: f64, lo: f64, a0: f64) -> Result<ThetaValue> {
        let c = 1.0 + a0 - s;
        let opts = DeOptions::new(MOMENT_REL_TOL);
        let integrand = |y: f64| -> f64 {
            let lr = self.ln_regular(y).expect("catalog weight");
            (-c * y + lr).exp()
        };
        let q = if lo == 0.0 {
            // rescale so the exponential decay has unit rate
            let q = quadrature::de_tail(0.0, |n: Node| Ok::<f64, Error>(integrand(n.x / c)), &opts)?;
            q.scaled(1.0 / c)
        } else {
            quadrature::de_finite(0.0, -lo.ln(), |n: Node| Ok::<f64, Error>(integrand(n.x)), &opts)?
        };
        ThetaValue::from_quad(q)
    }

    /// ∫_0^1 φ(t) dt.
    pub fn integral(&self) -> Result<ThetaValue> {
        self.moment(0.0, 0.0)?.ok_or_else(|| invalid("weight is not integrable"))
    }

    /// Closed form of ∫_0^1 t^{-s} φ where one is known.
    fn closed_form(&self, s: f64) -> Result<Option<f64>> {
        Ok(match &self.kind {
            WeightKind::Constant { c } => Some(c / (1.0 - s)),
            WeightKind::Beta { alpha, beta } => Some(specfun::beta(alpha - s, *beta)?),
            WeightKind::Log { gamma, l: SlowlyVarying::One } => {
                Some(specfun::gamma(gamma + 1.0)? / (1.0 - s).powf(gamma + 1.0))
            }
            _ => None,
        })
    }

    fn full_moment(&self, s: f64, analytic: bool) -> Result<ThetaValue> {
        let hint = self.hint()?;
        if s >= hint.algebraic_exponent_at_0 + 1.0 {
            return Ok(ThetaValue::infinite());
        }
        if analytic {
            if let Some(v) = self.closed_form(s)? {
                return Ok(ThetaValue::analytic(v));
            }
        }
        let a0 = hint.algebraic_exponent_at_0;
        match &self.kind {
            WeightKind::Log { .. } => self.moment_log_route(s, 0.0, a0),
            WeightKind::Custom { .. } => self.moment_unit(s, &hint),
            _ if 1.0 + a0 - s < LOG_ROUTE_RATE => self.moment_log_route(s, 0.0, a0),
            _ => self.moment_unit(s, &hint),
        }
    }

    /// θ(p) = ∫_0^1 t^{-d/p} φ(t) dt; closed form when available.
    pub fn theta(&self, d: usize, p: f64) -> Result<ThetaValue> {
        self.full_moment(theta_exponent(d, p)?, true)
    }

    /// θ(p) by quadrature even when a closed form exists.
    pub fn theta_quadrature(&self, d: usize, p: f64) -> Result<ThetaValue> {
        self.full_moment(theta_exponent(d, p)?, false)
    }

    /// θ_ε(p) = ∫_ε^1 t^{-d/p-ε} φ(t) dt.
    pub fn theta_truncated(&self, d: usize, p: f64, eps: f64) -> Result<ThetaValue> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(invalid(format!("eps must lie in (0, 1/2), got {eps}")));
        }
        let s = theta_exponent(d, p)? + eps;
        Ok(self.moment(s, eps)?.expect("truncated moment is finite"))
    }

    /// ζ(p) = ∫_0^1 t^{-d(1-1/p)} φ(t) dt.
    pub fn zeta(&self, d: usize, p: f64) -> Result<ThetaValue> {
        check_dimension(d)?;
        check_p(p)?;
        let s = d as f64 * (1.0 - 1.0 / p);
        self.full_moment(s, true)
    }
}

/// t^e · v without spurious overflow when t^e alone is out of range.
pub(crate) fn power_times(t: f64, e: f64, v: f64) -> f64 {
    let pw = t.powf(e);
    if pw.is_finite() && pw > 0.0 {
        return pw * v;
    }
    if v == 0.0 {
        return 0.0;
    }
    v.signum() * (v.abs().ln() + e * t.ln()).exp()
}

/// -ln t, accurate near both ends.
pub(crate) fn neg_ln(t: f64, tc: f64) -> f64 {
    if t > 0.5 {
        -(-tc).ln_1p()
    } else {
        -t.ln()
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(invalid(format!("p must be >= 1, got {p}")));
    }
    Ok(())
}

/// d/p, with 0 at p = ∞.
fn theta_exponent(d: usize, p: f64) -> Result<f64> {
    check_dimension(d)?;
    check_p(p)?;
    Ok(if p.is_infinite() { 0.0 } else { d as f64 / p })
}
