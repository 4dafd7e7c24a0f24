//! Radial functions f(x) = g(|x|) on R^d, described by a profile evaluator
//! plus the metadata the integrators need: where g vanishes, where it has
//! kinks or jumps, and its power behaviour at 0 and at infinity.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::specfun;

pub type Profile = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Shape information attached to a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMeta {
    /// g = 0 for r < floor.
    pub support_floor: f64,
    /// g = 0 for r > ceiling; `INFINITY` for unbounded support.
    pub support_ceiling: f64,
    /// g(r) ~ r^s as r → ∞; `NEG_INFINITY` for compact support or faster-than-power decay.
    pub exponent_at_infinity: f64,
    /// g(r) ~ r^a as r → 0+ (meaningful when the floor is 0).
    pub exponent_at_zero: f64,
    /// Radii where g is not smooth, including any finite floor/ceiling.
    pub breakpoints: Vec<f64>,
}

impl RadialMeta {
    pub fn new(support_floor: f64, support_ceiling: f64, exponent_at_infinity: f64, exponent_at_zero: f64) -> Self {
        let mut m = RadialMeta {
            support_floor,
            support_ceiling,
            exponent_at_infinity,
            exponent_at_zero,
            breakpoints: Vec::new(),
        };
        m.normalize();
        m
    }

    pub fn with_breakpoints(mut self, extra: &[f64]) -> Self {
        self.breakpoints.extend_from_slice(extra);
        self.normalize();
        self
    }

    fn normalize(&mut self) {
        if self.support_floor > 0.0 {
            self.breakpoints.push(self.support_floor);
        }
        if self.support_ceiling.is_finite() {
            self.breakpoints.push(self.support_ceiling);
        }
        let (lo, hi) = (self.support_floor, self.support_ceiling);
        self.breakpoints.retain(|b| b.is_finite() && *b > 0.0 && *b >= lo && *b <= hi);
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
    }
}

/// Tail of a profile in log radius: g(R e^v) = (R e^v)^a H(v) for v ≥ 0,
/// R = `start`, with H slowly varying. Lets norms integrate tails that decay too slowly
/// to reach within the range of f64 radii.
#[derive(Clone)]
pub struct LogTail {
    pub start: f64,
    pub exponent: f64,
    pub eval: Profile,
}

#[derive(Clone)]
pub struct RadialFunction {
    dimension: usize,
    profile: Profile,
    meta: RadialMeta,
    label: String,
    zero: bool,
    /// Relative accuracy of profile values (nonzero for quadrature-backed profiles).
    profile_rel_error: f64,
    log_tail: Option<LogTail>,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("dimension", &self.dimension)
            .field("label", &self.label)
            .field("meta", &self.meta)
            .finish()
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    Ok(())
}

fn check_extremal_params(p: f64, eps: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("extremal family needs finite p >= 1, got {p}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(invalid(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    Ok(())
}

impl RadialFunction {
    /// A function from an arbitrary profile; the floor is checked on a few radii.
    pub fn new(dimension: usize, label: impl Into<String>, profile: Profile, meta: RadialMeta) -> Result<Self> {
        check_dimension(dimension)?;
        if !(meta.support_floor >= 0.0) || !(meta.support_ceiling > meta.support_floor) {
            return Err(invalid(format!(
                "bad support [{}, {}]",
                meta.support_floor, meta.support_ceiling
            )));
        }
        let f = RadialFunction { dimension, profile, meta, label: label.into(), zero: false, profile_rel_error: 0.0, log_tail: None };
        if f.meta.support_floor > 0.0 {
            for k in 1..=8 {
                let r = f.meta.support_floor * k as f64 / 9.0;
                if (f.profile)(r)? != 0.0 {
                    return Err(invalid(format!("`{}` is nonzero at r = {r} below its support floor", f.label)));
                }
            }
        }
        Ok(f)
    }

    fn closed(dimension: usize, label: String, meta: RadialMeta, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RadialFunction {
            dimension,
            profile: Arc::new(move |r| Ok(g(r))),
            meta,
            label,
            zero: false,
            profile_rel_error: 0.0,
            log_tail: None,
        }
    }

    pub fn zero(d: usize) -> Result<Self> {
        check_dimension(d)?;
        let mut f = Self::closed(d, "zero".into(), RadialMeta::new(0.0, f64::INFINITY, f64::NEG_INFINITY, 0.0), |_| 0.0);
        f.zero = true;
        Ok(f)
    }

    /// g ≡ c. Not in any L^p; useful for pointwise operator checks.
    pub fn constant(d: usize, c: f64) -> Result<Self> {
        check_dimension(d)?;
        if c == 0.0 {
            return Self::zero(d);
        }
        Ok(Self::closed(d, format!("const({c})"), RadialMeta::new(0.0, f64::INFINITY, 0.0, 0.0), move |_| c))
    }

    /// g = I(r ≤ 1).
    pub fn indicator_ball(d: usize) -> Result<Self> {
        check_dimension(d)?;
        Ok(Self::closed(d, "indicator".into(), RadialMeta::new(0.0, 1.0, f64::NEG_INFINITY, 0.0), |r| {
            if r <= 1.0 { 1.0 } else { 0.0 }
        }))
    }

    /// g = e^{-r²}.
    pub fn gaussian(d: usize) -> Result<Self> {
        check_dimension(d)?;
        let meta = RadialMeta::new(0.0, f64::INFINITY, f64::NEG_INFINITY, 0.0).with_breakpoints(&[1.0, 4.0]);
        Ok(Self::closed(d, "gaussian".into(), meta, |r| (-r * r).exp()))
    }

    /// g = exp(-1/(1 - r²)) for r < 1, else 0.
    pub fn bump(d: usize) -> Result<Self> {
        check_dimension(d)?;
        Ok(Self::closed(d, "bump".into(), RadialMeta::new(0.0, 1.0, f64::NEG_INFINITY, 0.0), |r| {
            if r < 1.0 {
                // 1 - r² = (1 - r)(1 + r) keeps precision next to r = 1
                (-1.0 / ((1.0 - r) * (1.0 + r))).exp()
            } else {
                0.0
            }
        }))
    }

    /// f_ε: g(r) = I(r ≥ 1) r^{-d/p - ε}.
    pub fn extremal(d: usize, p: f64, eps: f64) -> Result<Self> {
        check_dimension(d)?;
        check_extremal_params(p, eps)?;
        let s = -(d as f64) / p - eps;
        Ok(Self::closed(
            d,
            format!("extremal(p={p},eps={eps})"),
            RadialMeta::new(1.0, f64::INFINITY, s, 0.0),
            move |r| if r >= 1.0 { r.powf(s) } else { 0.0 },
        )
        .with_log_tail(LogTail { start: 1.0, exponent: s, eval: Arc::new(|_| Ok(1.0)) }))
    }

    /// g(r) = I(r ≥ 1) r^s.
    pub fn power_tail(d: usize, s: f64) -> Result<Self> {
        check_dimension(d)?;
        if !s.is_finite() {
            return Err(invalid(format!("power exponent must be finite, got {s}")));
        }
        Ok(Self::closed(
            d,
            format!("power(s={s})"),
            RadialMeta::new(1.0, f64::INFINITY, s, 0.0),
            move |r| if r >= 1.0 { r.powf(s) } else { 0.0 },
        )
        .with_log_tail(LogTail { start: 1.0, exponent: s, eval: Arc::new(|_| Ok(1.0)) }))
    }

    /// λ·f.
    pub fn scaled(&self, lambda: f64) -> Self {
        if lambda == 0.0 || self.zero {
            let mut z = Self::zero(self.dimension).expect("valid dimension");
            z.label = format!("0*{}", self.label);
            return z;
        }
        let inner = self.profile.clone();
        RadialFunction {
            dimension: self.dimension,
            profile: Arc::new(move |r| Ok(lambda * inner(r)?)),
            meta: self.meta.clone(),
            label: format!("{lambda}*{}", self.label),
            zero: false,
            profile_rel_error: self.profile_rel_error,
            log_tail: self.log_tail.as_ref().map(|t| {
                let h = t.eval.clone();
                LogTail { start: t.start, exponent: t.exponent, eval: Arc::new(move |u| Ok(lambda * h(u)?)) }
            }),
        }
    }

    /// f + g (same dimension).
    pub fn sum(&self, other: &RadialFunction) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(invalid("cannot add radial functions of different dimensions"));
        }
        if self.zero {
            return Ok(other.clone());
        }
        if other.zero {
            return Ok(self.clone());
        }
        let (a, b) = (self.profile.clone(), other.profile.clone());
        let (ma, mb) = (&self.meta, &other.meta);
        let mut breaks = ma.breakpoints.clone();
        breaks.extend_from_slice(&mb.breakpoints);
        let meta = RadialMeta::new(
            ma.support_floor.min(mb.support_floor),
            ma.support_ceiling.max(mb.support_ceiling),
            ma.exponent_at_infinity.max(mb.exponent_at_infinity),
            ma.exponent_at_zero.min(mb.exponent_at_zero),
        )
        .with_breakpoints(&breaks);
        Ok(RadialFunction {
            dimension: self.dimension,
            profile: Arc::new(move |r| Ok(a(r)? + b(r)?)),
            meta,
            label: format!("({}+{})", self.label, other.label),
            zero: false,
            profile_rel_error: self.profile_rel_error.max(other.profile_rel_error),
            log_tail: None,
        })
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if r < self.meta.support_floor || r > self.meta.support_ceiling {
            return Ok(0.0);
        }
        (self.profile)(r)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn meta(&self) -> &RadialMeta {
        &self.meta
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn is_zero(&self) -> bool {
        self.zero
    }
    pub fn support_floor(&self) -> f64 {
        self.meta.support_floor
    }
    pub fn support_ceiling(&self) -> f64 {
        self.meta.support_ceiling
    }
    pub fn exponent_at_infinity(&self) -> f64 {
        self.meta.exponent_at_infinity
    }
    pub fn exponent_at_zero(&self) -> f64 {
        self.meta.exponent_at_zero
    }
    pub fn breakpoints(&self) -> &[f64] {
        &self.meta.breakpoints
    }
    pub fn profile_rel_error(&self) -> f64 {
        self.profile_rel_error
    }
    pub(crate) fn with_profile_rel_error(mut self, e: f64) -> Self {
        self.profile_rel_error = e;
        self
    }
    pub fn log_tail(&self) -> Option<&LogTail> {
        self.log_tail.as_ref()
    }
    pub(crate) fn with_log_tail(mut self, tail: LogTail) -> Self {
        self.log_tail = Some(tail);
        self
    }
    pub(crate) fn profile(&self) -> Profile {
        self.profile.clone()
    }
}

/// |f_ε|_p = (c(d) / (p ε))^{1/p}.
///
/// The closed form holds for every ε > 0, so ε is not restricted to (0, 1/2) here.
pub fn extremal_lp_norm_analytic(d: usize, p: f64, eps: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() || !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!("need finite p >= 1 and eps > 0, got p={p}, eps={eps}")));
    }
    let c = specfun::dimension_constants(d)?;
    Ok(((c.ln_surface_constant - (p * eps).ln()) / p).exp())
}

/// f(x_1, ..., x_l) = ∏ f_k(|x_k|) with x_k ∈ R^{d_k}.
#[derive(Debug, Clone)]
pub struct FactorableFunction {
    factors: Vec<RadialFunction>,
}

impl FactorableFunction {
    pub fn new(factors: Vec<RadialFunction>) -> Result<Self> {
        if factors.is_empty() {
            return Err(invalid("a factorable function needs at least one factor"));
        }
        Ok(FactorableFunction { factors })
    }

    pub fn factors(&self) -> &[RadialFunction] {
        &self.factors
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dimension()).collect()
    }

    pub fn eval(&self, radii: &[f64]) -> Result<f64> {
        if radii.len() != self.factors.len() {
            return Err(invalid(format!("expected {} radii, got {}", self.factors.len(), radii.len())));
        }
        let mut v = 1.0;
        for (f, &r) in self.factors.iter().zip(radii) {
            v *= f.eval(r)?;
        }
        Ok(v)
    }
}
