//! Double-exponential quadrature.
//!
//! Finite intervals use the tanh-sinh map, half-lines the exp-sinh map. Both
//! refine by halving the step in t-space (reusing every previous node) and
//! stop once two successive levels agree to the requested relative
//! tolerance, or when the next level would exceed [`MAX_NODES`].
//!
//! Integrands receive a [`Node`] carrying the exact distance to each end of
//! the interval, so that factors like `(1 - t)^(β-1)` can be evaluated
//! without cancellation next to the endpoint.
//!
//! Endpoint behaviour close to non-integrable (exponent within
//! [`PRESPLIT_WINDOW`] of -1) is handled by subtracting the leading monomial,
//! integrating it in closed form, and integrating only the remainder.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::specfun;

/// Node budget per panel.
pub const MAX_NODES: usize = 1 << 12;
/// Distance from -1 below which an endpoint exponent triggers the pre-split.
pub const PRESPLIT_WINDOW: f64 = 0.05;
/// Coarsest level at which convergence may be declared (step 1/8).
const MIN_LEVEL: u32 = 3;
/// Relative agreement required between the two probes of a leading coefficient.
const PROBE_AGREEMENT: f64 = 1e-8;

/// Algebraic / logarithmic behaviour of an integrand at the ends of (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityHint {
    /// Integrand ~ t^a as t → 0+.
    pub algebraic_exponent_at_0: f64,
    /// Integrand ~ (1 - t)^b as t → 1-.
    pub algebraic_exponent_at_1: f64,
    /// Extra |log t|^γ factor at 0.
    pub log_power_at_0: f64,
}

impl SingularityHint {
    pub const REGULAR: SingularityHint = SingularityHint {
        algebraic_exponent_at_0: 0.0,
        algebraic_exponent_at_1: 0.0,
        log_power_at_0: 0.0,
    };

    pub fn new(at_0: f64, at_1: f64, log_power_at_0: f64) -> Result<Self> {
        let hint = SingularityHint {
            algebraic_exponent_at_0: at_0,
            algebraic_exponent_at_1: at_1,
            log_power_at_0,
        };
        hint.validate()?;
        Ok(hint)
    }

    pub fn at_zero(at_0: f64) -> Result<Self> {
        Self::new(at_0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.algebraic_exponent_at_0 > -1.0) || !(self.algebraic_exponent_at_1 > -1.0) {
            return Err(Error::Divergent(format!(
                "endpoint exponents must exceed -1, got ({}, {})",
                self.algebraic_exponent_at_0, self.algebraic_exponent_at_1
            )));
        }
        if !(self.log_power_at_0 >= 0.0) || !self.log_power_at_0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "log power must be finite and >= 0, got {}",
                self.log_power_at_0
            )));
        }
        Ok(())
    }

    /// Same hint with the exponent at 0 shifted by `delta` (multiplying by t^delta).
    pub fn shifted_at_zero(&self, delta: f64) -> SingularityHint {
        SingularityHint {
            algebraic_exponent_at_0: self.algebraic_exponent_at_0 + delta,
            ..*self
        }
    }
}

/// Outcome of one quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn exact(value: f64) -> Self {
        QuadResult { value, abs_error_estimate: 0.0, evaluations: 0, converged: true }
    }

    /// Turns a non-converged result into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged(self))
        }
    }

    pub fn scaled(self, k: f64) -> Self {
        QuadResult {
            value: self.value * k,
            abs_error_estimate: self.abs_error_estimate * k.abs(),
            ..self
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.abs_error_estimate == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.abs_error_estimate / self.value.abs()
        }
    }
}

/// An abscissa with its exact distances to the interval ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    pub from_lo: f64,
    /// `f64::INFINITY` on half-lines.
    pub from_hi: f64,
}

/// Knobs of a single double-exponential panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeOptions {
    pub rel_tol: f64,
    /// Converge also when the level difference drops below this.
    pub abs_tol: f64,
    /// Smallest distance to the lower end that still gets a node, relative to
    /// the width on finite panels and absolute on half-lines.
    pub lo_gap: f64,
    /// Smallest relative distance to the upper end (finite panels only).
    pub hi_gap: f64,
    /// Largest `x - a` sampled on half-lines.
    pub tail_max: f64,
}

impl DeOptions {
    pub fn new(rel_tol: f64) -> Self {
        DeOptions { rel_tol, abs_tol: 0.0, lo_gap: 1e-300, hi_gap: 1e-300, tail_max: 1e300 }
    }
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }
    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Map from t-space to an abscissa and its Jacobian.
trait DeMap {
    fn t_range(&self, opts: &DeOptions) -> (f64, f64);
    /// Returns `None` when the node degenerates (gap underflow).
    fn node(&self, t: f64) -> Option<(Node, f64)>;
}

struct TanhSinh {
    a: f64,
    b: f64,
}

impl DeMap for TanhSinh {
    fn t_range(&self, opts: &DeOptions) -> (f64, f64) {
        // relative gap ≈ exp(-π sinh|t|)
        let lo = (-opts.lo_gap.max(1e-300).ln() / std::f64::consts::PI).asinh();
        let hi = (-opts.hi_gap.max(1e-300).ln() / std::f64::consts::PI).asinh();
        (-lo, hi)
    }

    fn node(&self, t: f64) -> Option<(Node, f64)> {
        let width = self.b - self.a;
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        let gap = width * e / (1.0 + e);
        let w = width * FRAC_PI_2 * t.cosh() * 2.0 * e / ((1.0 + e) * (1.0 + e));
        if gap <= 0.0 || w <= 0.0 {
            return None;
        }
        let node = if t >= 0.0 {
            Node { x: self.b - gap, from_lo: width - gap, from_hi: gap }
        } else {
            Node { x: self.a + gap, from_lo: gap, from_hi: width - gap }
        };
        Some((node, w))
    }
}

struct ExpSinh {
    a: f64,
}

impl DeMap for ExpSinh {
    fn t_range(&self, opts: &DeOptions) -> (f64, f64) {
        let lo = opts.lo_gap.max(1e-300).ln() / FRAC_PI_2;
        let hi = opts.tail_max.min(1e300).ln() / FRAC_PI_2;
        (lo.asinh(), hi.asinh())
    }

    fn node(&self, t: f64) -> Option<(Node, f64)> {
        let u = FRAC_PI_2 * t.sinh();
        let gap = u.exp();
        let w = gap * FRAC_PI_2 * t.cosh();
        if gap <= 0.0 || !gap.is_finite() {
            return None;
        }
        Some((Node { x: self.a + gap, from_lo: gap, from_hi: f64::INFINITY }, w))
    }
}

fn run_de<M, F, E>(map: &M, mut f: F, opts: &DeOptions) -> std::result::Result<QuadResult, E>
where
    M: DeMap,
    F: FnMut(Node) -> std::result::Result<f64, E>,
    E: From<Error>,
{
    let (t_lo, t_hi) = map.t_range(opts);
    let mut sum = Sum::default();
    let mut evaluations = 0usize;
    let mut eval = |t: f64, sum: &mut Sum| -> std::result::Result<(), E> {
        if let Some((node, w)) = map.node(t) {
            let v = f(node)?;
            if v.is_nan() {
                return Err(Error::NanAt { x: node.x }.into());
            }
            let term = w * v;
            if !term.is_finite() {
                return Err(Error::NanAt { x: node.x }.into());
            }
            sum.add(term);
            evaluations += 1;
        }
        Ok(())
    };

    // level 0: integer t
    let mut h = 1.0;
    let k_lo = (t_lo / h).ceil() as i64;
    let k_hi = (t_hi / h).floor() as i64;
    for k in k_lo..=k_hi {
        eval(k as f64 * h, &mut sum)?;
    }
    let mut nodes = (k_hi - k_lo + 1).max(0) as usize;
    let mut prev = h * sum.value();
    let mut level = 0u32;
    let mut err = f64::INFINITY;
    loop {
        let next_h = h / 2.0;
        let added = ((t_hi - t_lo) / h).ceil() as usize + 1;
        if nodes + added > MAX_NODES {
            break;
        }
        // new nodes are the odd multiples of next_h
        let j_lo = ((t_lo / next_h - 1.0) / 2.0).ceil() as i64;
        let j_hi = ((t_hi / next_h - 1.0) / 2.0).floor() as i64;
        for j in j_lo..=j_hi {
            eval((2 * j + 1) as f64 * next_h, &mut sum)?;
        }
        nodes += (j_hi - j_lo + 1).max(0) as usize;
        h = next_h;
        level += 1;
        let cur = h * sum.value();
        err = (cur - prev).abs();
        prev = cur;
        if level >= MIN_LEVEL && (err <= opts.rel_tol * cur.abs() || err <= opts.abs_tol) {
            return Ok(QuadResult { value: cur, abs_error_estimate: err, evaluations, converged: true });
        }
    }
    Ok(QuadResult { value: prev, abs_error_estimate: err, evaluations, converged: false })
}

/// Tanh-sinh on the finite interval (a, b).
pub fn de_finite<F, E>(a: f64, b: f64, f: F, opts: &DeOptions) -> std::result::Result<QuadResult, E>
where
    F: FnMut(Node) -> std::result::Result<f64, E>,
    E: From<Error>,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("bad interval ({a}, {b})")).into());
    }
    run_de(&TanhSinh { a, b }, f, opts)
}

/// Exp-sinh on the half-line (a, ∞).
pub fn de_tail<F, E>(a: f64, f: F, opts: &DeOptions) -> std::result::Result<QuadResult, E>
where
    F: FnMut(Node) -> std::result::Result<f64, E>,
    E: From<Error>,
{
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("bad tail start {a}")).into());
    }
    run_de(&ExpSinh { a }, f, opts)
}

/// Adds independent panel results; converged when the summed error meets
/// the relative tolerance against the summed value.
pub fn combine(parts: &[QuadResult], rel_tol: f64) -> QuadResult {
    let mut value = Sum::default();
    let mut err = 0.0;
    let mut evaluations = 0;
    for p in parts {
        value.add(p.value);
        err += p.abs_error_estimate;
        evaluations += p.evaluations;
    }
    let v = value.value();
    let converged = parts.iter().all(|p| p.converged) || err <= rel_tol * v.abs();
    QuadResult { value: v, abs_error_estimate: err, evaluations, converged }
}

pub(crate) fn check_tolerance(rel_tol: f64) -> Result<()> {
    if !(1e-14..=1e-2).contains(&rel_tol) {
        return Err(Error::InvalidParameter(format!("rel_tol {rel_tol} outside [1e-14, 1e-2]")));
    }
    Ok(())
}

/// Estimates the coefficient C in `f ~ C · gap^a · |ln gap|^γ` by probing at
/// two tiny gaps; `None` when the probes disagree or f is not positive there.
fn probe_leading<F>(mut value_at_gap: F, exponent: f64, log_power: f64, gaps: [f64; 2]) -> Option<f64>
where
    F: FnMut(f64) -> Option<f64>,
{
    let mut est = [0.0; 2];
    for (slot, &g) in est.iter_mut().zip(gaps.iter()) {
        let v = value_at_gap(g)?;
        if !(v > 0.0) || !v.is_finite() {
            return None;
        }
        let ln_c = v.ln() - exponent * g.ln() - log_power * g.ln().abs().ln();
        *slot = ln_c.exp();
    }
    if !est[0].is_finite() || ((est[0] - est[1]) / est[0]).abs() > PROBE_AGREEMENT {
        return None;
    }
    Some(est[0])
}

/// ∫_0^1 f(t) dt for `f` given with its complement: `f(t, 1 - t)`.
///
/// Endpoint exponents within [`PRESPLIT_WINDOW`] of -1 trigger the
/// leading-monomial split at that end. The coefficient of the monomial is read
/// off `f` itself at two tiny gaps; if the probes disagree (the hint was
/// wrong, or a slowly varying factor is present) the plain rule is used and
/// any resulting inaccuracy shows up as non-convergence.
pub fn integrate_unit_with<F>(f: F, hint: &SingularityHint, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> f64,
{
    integrate_unit_try(|t, tc| Ok::<f64, Error>(f(t, tc)), hint, rel_tol)
}

/// [`integrate_unit_with`] for fallible integrands; the first error aborts.
pub fn integrate_unit_try<F, E>(mut f: F, hint: &SingularityHint, rel_tol: f64) -> std::result::Result<QuadResult, E>
where
    F: FnMut(f64, f64) -> std::result::Result<f64, E>,
    E: From<Error>,
{
    check_tolerance(rel_tol)?;
    hint.validate()?;
    let a0 = hint.algebraic_exponent_at_0;
    let a1 = hint.algebraic_exponent_at_1;
    let lp = hint.log_power_at_0;
    let gaps = [1e-250, 1e-280];

    let mut probe_err = None;
    let mut probe = |t: f64, tc: f64, f: &mut F| match f(t, tc) {
        Ok(v) => Some(v),
        Err(e) => {
            probe_err.get_or_insert(e);
            None
        }
    };
    let left = if a0 <= -1.0 + PRESPLIT_WINDOW {
        probe_leading(|g| probe(g, 1.0 - g, &mut f), a0, lp, gaps)
    } else {
        None
    };
    let right = if a1 <= -1.0 + PRESPLIT_WINDOW {
        probe_leading(|g| probe(1.0 - g, g, &mut f), a1, 0.0, gaps)
    } else {
        None
    };
    if let Some(e) = probe_err {
        return Err(e);
    }

    let mut closed_form = 0.0;
    if let Some(c) = left {
        closed_form += c * specfun::gamma(lp + 1.0)? / (a0 + 1.0).powf(lp + 1.0);
    }
    if let Some(c) = right {
        closed_form += c / (a1 + 1.0);
    }
    let opts = DeOptions::new(rel_tol);
    let mut rem = de_finite(
        0.0,
        1.0,
        |n: Node| -> std::result::Result<f64, E> {
            let t = n.from_lo;
            let tc = n.from_hi;
            let mut v = f(t, tc)?;
            if let Some(c) = left {
                v -= c * t.powf(a0) * t.ln().abs().powf(lp);
            }
            if let Some(c) = right {
                v -= c * tc.powf(a1);
            }
            Ok(v)
        },
        &opts,
    )?;
    if left.is_some() || right.is_some() {
        let value = closed_form + rem.value;
        let err = rem.abs_error_estimate + 4.0 * f64::EPSILON * closed_form.abs();
        rem = QuadResult {
            value,
            abs_error_estimate: err,
            evaluations: rem.evaluations + 4,
            converged: rem.converged || err <= rel_tol * value.abs(),
        };
    }
    Ok(rem)
}

/// ∫_0^1 f(t) dt.
///
/// `f` only sees t, so the upper endpoint is resolved down to gaps of about
/// one ulp of 1; use [`integrate_unit_with`] for integrands singular at 1.
pub fn integrate_unit<F>(f: F, hint: &SingularityHint, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_unit_with(
        |t, _| if t < 1.0 { f(t) } else { 0.0 },
        hint,
        rel_tol,
    )
}

/// ∫_a^∞ f(r) dr for `f = O(r^decay)`, decay < -1.
///
/// When `decay` is within [`PRESPLIT_WINDOW`] of -1 the tail `C r^decay` is
/// integrated in closed form with C probed at r = 1e200, 1e250.
pub fn integrate_tail<F, E>(a: f64, mut f: F, decay: f64, rel_tol: f64) -> std::result::Result<QuadResult, E>
where
    F: FnMut(f64) -> std::result::Result<f64, E>,
    E: From<Error>,
{
    if !(decay < -1.0) {
        return Err(Error::Divergent(format!("tail exponent {decay} is not below -1")).into());
    }
    let mut opts = DeOptions::new(rel_tol);
    if decay > -1.0 - PRESPLIT_WINDOW {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter("split tail needs a positive start".into()).into());
        }
        let mut probe_err = None;
        let c = probe_leading(
            |r| match f(r) {
                Ok(v) => Some(v),
                Err(e) => {
                    probe_err = Some(e);
                    None
                }
            },
            decay,
            0.0,
            [1e200, 1e250],
        );
        if let Some(e) = probe_err {
            return Err(e);
        }
        if let Some(c) = c {
            let closed = c * a.powf(decay + 1.0) / (-decay - 1.0);
            let rem = de_tail(a, |n: Node| Ok::<f64, E>(f(n.x)? - c * n.x.powf(decay)), &opts)?;
            let value = closed + rem.value;
            let err = rem.abs_error_estimate + 4.0 * f64::EPSILON * closed.abs();
            return Ok(QuadResult {
                value,
                abs_error_estimate: err,
                evaluations: rem.evaluations + 2,
                converged: rem.converged || err <= rel_tol * value.abs(),
            });
        }
    } else if decay.is_finite() {
        // beyond X the tail holds ~X^(decay+1) of the mass, with room for log factors
        let x = 10f64.powf(40.0 / (-decay - 1.0)) * a.abs().max(1.0);
        opts.tail_max = x.min(1e300);
    }
    de_tail(a, |n: Node| f(n.x), &opts)
}

/// ∫_0^∞ f(r) dr with f integrable at 0 and `O(r^decay)` at infinity.
pub fn integrate_semiinf<F>(f: F, decay_exponent: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_semiinf_piecewise(f, decay_exponent, &[], rel_tol)
}

/// [`integrate_semiinf`] with declared interior breakpoints (jumps or kinks).
pub fn integrate_semiinf_piecewise<F>(
    f: F,
    decay_exponent: f64,
    breakpoints: &[f64],
    rel_tol: f64,
) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    check_tolerance(rel_tol)?;
    if !(decay_exponent < -1.0) {
        return Err(Error::Divergent(format!(
            "decay exponent {decay_exponent} >= -1: integral over (0, ∞) diverges"
        )));
    }
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|b| *b > 0.0 && b.is_finite()).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if cuts.is_empty() && decay_exponent > -1.0 - PRESPLIT_WINDOW {
        cuts.push(1.0);
    }
    let opts = DeOptions::new(rel_tol);
    let mut parts = Vec::with_capacity(cuts.len() + 1);
    let mut lo = 0.0;
    for &c in &cuts {
        parts.push(de_finite(lo, c, |n: Node| Ok::<f64, Error>(f(n.x)), &opts)?);
        lo = c;
    }
    if lo == 0.0 {
        parts.push(de_tail(0.0, |n: Node| Ok::<f64, Error>(f(n.x)), &opts)?);
    } else {
        parts.push(integrate_tail(lo, |r| Ok::<f64, Error>(f(r)), decay_exponent, rel_tol)?);
    }
    Ok(combine(&parts, rel_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(r: &QuadResult, want: f64, tol: f64) {
        assert!(r.converged, "not converged: {r:?}");
        assert!(((r.value - want) / want).abs() <= tol, "got {} want {want} ({r:?})", r.value);
    }

    #[test]
    fn unit_inverse_sqrt() {
        let h = SingularityHint::at_zero(-0.5).unwrap();
        let r = integrate_unit(|t| t.powf(-0.5), &h, 1e-10).unwrap();
        close(&r, 2.0, 1e-10);
    }

    #[test]
    fn unit_constant() {
        let r = integrate_unit(|_| 1.0, &SingularityHint::REGULAR, 1e-12).unwrap();
        close(&r, 1.0, 1e-14);
    }

    #[test]
    fn unit_log_singularity() {
        // ∫|log t| dt = Γ(2) = 1
        let h = SingularityHint::new(0.0, 0.0, 1.0).unwrap();
        let r = integrate_unit(|t| t.ln().abs(), &h, 1e-10).unwrap();
        close(&r, 1.0, 1e-10);
    }

    #[test]
    fn unit_near_critical_exponent_uses_presplit() {
        // ∫ t^(-0.999) (1 + t) dt = 1/0.001 + 1/1.001
        let a = -0.999;
        let h = SingularityHint::at_zero(a).unwrap();
        let r = integrate_unit(|t| t.powf(a) * (1.0 + t), &h, 1e-10).unwrap();
        close(&r, 1000.0 + 1.0 / 1.001, 1e-10);
    }

    #[test]
    fn unit_right_end_singularity_with_complement() {
        // ∫ (1-t)^(-0.97) dt = 1/0.03
        let h = SingularityHint::new(0.0, -0.97, 0.0).unwrap();
        let r = integrate_unit_with(|_, tc| tc.powf(-0.97), &h, 1e-10).unwrap();
        close(&r, 1.0 / 0.03, 1e-10);
    }

    #[test]
    fn unit_rejects_bad_inputs() {
        assert!(integrate_unit(|_| 1.0, &SingularityHint::REGULAR, 1e-20).is_err());
        assert!(SingularityHint::at_zero(-1.0).is_err());
        let err = integrate_unit(|t| if t < 0.5 { f64::NAN } else { 1.0 }, &SingularityHint::REGULAR, 1e-8);
        assert!(matches!(err, Err(Error::NanAt { .. })));
    }

    #[test]
    fn nonconvergence_is_reported_not_hidden() {
        // wildly oscillating integrand cannot be resolved in the node budget
        let r = integrate_unit(|t| (1e6 * t).sin() + 1.0, &SingularityHint::REGULAR, 1e-12).unwrap();
        assert!(!r.converged);
        assert!(r.require_converged().is_err());
    }

    #[test]
    fn semiinf_examples() {
        let r = integrate_semiinf_piecewise(|x| if x >= 1.0 { x.powi(-2) } else { 0.0 }, -2.0, &[1.0], 1e-10)
            .unwrap();
        close(&r, 1.0, 1e-10);
        let r = integrate_semiinf(|x| (-x).exp(), f64::NEG_INFINITY, 1e-10).unwrap();
        close(&r, 1.0, 1e-10);
        let r = integrate_semiinf_piecewise(
            |x| if x >= 1.0 { x.powf(-1.2) } else { 0.0 },
            -1.2,
            &[1.0],
            1e-10,
        )
        .unwrap();
        close(&r, 5.0, 1e-10);
    }

    #[test]
    fn semiinf_heavy_tail_presplit() {
        // ∫_1^∞ r^(-1.0002)(1 + 1/r) dr = 1/0.0002 + 1/1.0002
        let r = integrate_semiinf_piecewise(
            |x| if x >= 1.0 { x.powf(-1.0002) * (1.0 + 1.0 / x) } else { 0.0 },
            -1.0002,
            &[1.0],
            1e-10,
        )
        .unwrap();
        close(&r, 5000.0 + 1.0 / 1.0002, 1e-10);
    }

    #[test]
    fn semiinf_rejects_divergent_decay() {
        assert!(matches!(integrate_semiinf(|x| 1.0 / (1.0 + x), -1.0, 1e-8), Err(Error::Divergent(_))));
    }

    #[test]
    fn determinism() {
        let h = SingularityHint::at_zero(-0.3).unwrap();
        let f = |t: f64| t.powf(-0.3) * (2.0 * t).cos();
        let a = integrate_unit(f, &h, 1e-12).unwrap();
        let b = integrate_unit(f, &h, 1e-12).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.abs_error_estimate.to_bits(), b.abs_error_estimate.to_bits());
    }

    #[test]
    fn substitution_consistency() {
        // ∫_0^1 t^-s φ(t) dt = ∫_0^∞ e^{-y(1-s)} φ(e^{-y}) dy
        for &s in &[0.0, 0.3, 0.6, 0.85] {
            let phi = |t: f64| 1.0 + t * t + (3.0 * t).sin();
            let h = SingularityHint::at_zero(-s).unwrap();
            let direct = integrate_unit(|t| t.powf(-s) * phi(t), &h, 1e-11).unwrap();
            let subst = integrate_semiinf(|y| (-y * (1.0 - s)).exp() * phi((-y).exp()), f64::NEG_INFINITY, 1e-11)
                .unwrap();
            let budget = direct.abs_error_estimate + subst.abs_error_estimate + 1e-12 * direct.value.abs();
            assert!((direct.value - subst.value).abs() <= budget.max(1e-10 * direct.value), "s={s}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn linearity(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, k1 in 0.1f64..4.0, k2 in 0.1f64..4.0) {
            let f = |t: f64| (k1 * t).exp();
            let g = |t: f64| 1.0 / (1.0 + k2 * t * t);
            let h = SingularityHint::REGULAR;
            let tol = 1e-11;
            let rf = integrate_unit(f, &h, tol).unwrap();
            let rg = integrate_unit(g, &h, tol).unwrap();
            let rc = integrate_unit(|t| alpha * f(t) + beta * g(t), &h, tol).unwrap();
            let combined = alpha * rf.value + beta * rg.value;
            let budget = 2.0 * (alpha.abs() * rf.abs_error_estimate + beta.abs() * rg.abs_error_estimate
                + rc.abs_error_estimate) + 1e-13 * (alpha.abs() * rf.value + beta.abs() * rg.value);
            prop_assert!((rc.value - combined).abs() <= budget);
        }
    }
}
