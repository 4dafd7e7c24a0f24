//! The averaging operator U_φ, its conjugate V_φ and the multivariate
//! Hardy operator H_d, acting on radial functions.
//!
//! Each output is a new [`RadialFunction`] whose profile runs an inner
//! quadrature in the scaling variable t ∈ (0, 1) per radius. The t-interval
//! is cut where the input profile has breakpoints, so jumps of g never sit
//! inside a panel. Evaluated radii are memoised per output.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::quadrature::{self, DeOptions, Node, QuadResult, SingularityHint};
use crate::radialfn::{LogTail, Profile, RadialFunction, RadialMeta};
use crate::weights::WeightSpec;

/// Relative tolerance of the inner t-integrals.
pub const INNER_REL_TOL: f64 = 1e-11;
const MEMO_CAPACITY: usize = 1 << 20;

/// Caches profile values by the bit pattern of r. Values are identical to
/// recomputation since every evaluation is deterministic.
struct Memo {
    inner: Profile,
    cache: Mutex<HashMap<u64, f64>>,
}

impl Memo {
    fn wrap(inner: Profile) -> Profile {
        let memo = Arc::new(Memo { inner, cache: Mutex::new(HashMap::new()) });
        Arc::new(move |r| memo.get(r))
    }

    fn get(&self, r: f64) -> Result<f64> {
        let key = r.to_bits();
        if let Some(v) = self.cache.lock().expect("memo lock").get(&key) {
            return Ok(*v);
        }
        let v = (self.inner)(r)?;
        let mut cache = self.cache.lock().expect("memo lock");
        if cache.len() < MEMO_CAPACITY {
            cache.insert(key, v);
        }
        Ok(v)
    }
}

/// ∫_lo^hi f(t, 1-t, 0) dt, split at `cuts`, with the weight's endpoint
/// behaviour passed on when the panel is all of (0, 1). Panels spanning many
/// decades run in u = ln t and call f(t, 1-t, 1), which must then return
/// t times the integrand.
const LOG_PANEL_SPAN: f64 = 1e3;

fn integrate_t<F>(lo: f64, hi: f64, cuts: &[f64], hint: &SingularityHint, mut f: F) -> Result<QuadResult>
where
    F: FnMut(f64, f64, f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Ok(QuadResult::exact(0.0));
    }
    let mut edges = vec![lo];
    edges.extend(cuts.iter().copied().filter(|c| *c > lo && *c < hi));
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    if edges.len() == 2 && lo == 0.0 && hi == 1.0 {
        return quadrature::integrate_unit_try(|t, tc| f(t, tc, 0.0), hint, INNER_REL_TOL);
    }
    let opts = DeOptions::new(INNER_REL_TOL);
    let mut parts = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a > 0.0 && b / a > LOG_PANEL_SPAN {
            let q = quadrature::de_finite(
                a.ln(),
                b.ln(),
                |n: Node| {
                    let t = n.x.exp();
                    let tc = if b == 1.0 { -(-n.from_hi).exp_m1() } else { -n.x.exp_m1() };
                    f(t, tc, 1.0)
                },
                &opts,
            )?;
            parts.push(q);
            continue;
        }
        let q = quadrature::de_finite(
            a,
            b,
            |n: Node| {
                let tc = if b == 1.0 { n.from_hi } else { (1.0 - b) + n.from_hi };
                let t = if a == 0.0 { n.from_lo } else { n.x };
                f(t, tc, 0.0)
            },
            &opts,
        )?;
        parts.push(q);
    }
    Ok(quadrature::combine(&parts, INNER_REL_TOL))
}

/// Accuracy claimed for every image profile value.
pub const PROFILE_REL_ERROR: f64 = 10.0 * INNER_REL_TOL;

/// Inner integrals aim at [`INNER_REL_TOL`] and are accepted up to the
/// claimed [`PROFILE_REL_ERROR`].
fn converged_value(q: QuadResult) -> Result<f64> {
    if q.converged || q.abs_error_estimate <= PROFILE_REL_ERROR * q.value.abs() {
        return Ok(q.value);
    }
    Err(Error::NotConverged(q))
}

fn finalize(d: usize, label: String, profile: Profile, meta: RadialMeta) -> Result<RadialFunction> {
    RadialFunction::new(d, label, Memo::wrap(profile), meta).map(|f| f.with_profile_rel_error(PROFILE_REL_ERROR))
}

/// U_φ f, with profile h(r) = ∫_0^1 g(t r) φ(t) dt.
pub fn apply_hardy_avg(w: &WeightSpec, f: &RadialFunction) -> Result<RadialFunction> {
    let d = f.dimension();
    if f.is_zero() {
        return RadialFunction::zero(d);
    }
    let hint = w.hint()?;
    let a0 = hint.algebraic_exponent_at_0;
    let m = f.meta().clone();
    if m.support_floor == 0.0 && m.exponent_at_zero + a0 <= -1.0 {
        return Err(Error::Divergent(format!(
            "∫ g(tr) φ(t) dt diverges at t = 0 (exponents {} + {a0})",
            m.exponent_at_zero
        )));
    }
    let g = f.profile();
    let (w2, m2) = (w.clone(), m.clone());
    let inner_hint = hint.shifted_at_zero(m.exponent_at_zero.min(0.0));
    let profile: Profile = Arc::new(move |r: f64| {
        if r < m2.support_floor || (r == 0.0 && m2.support_floor > 0.0) {
            return Ok(0.0);
        }
        if r == 0.0 {
            return Ok(g(0.0)? * w2.integral()?.value);
        }
        let lo = m2.support_floor / r;
        let hi = (m2.support_ceiling / r).min(1.0);
        let cuts: Vec<f64> = m2.breakpoints.iter().map(|b| b / r).collect();
        let q = integrate_t(lo, hi, &cuts, &inner_hint, |t, tc, m| {
            let v = g(t * r)?;
            Ok(if v == 0.0 { 0.0 } else { v * w2.power_weight(m, t, tc) })
        })?;
        converged_value(q)
    });
    let meta = RadialMeta::new(
        m.support_floor,
        f64::INFINITY,
        m.exponent_at_infinity.max(-1.0 - a0),
        m.exponent_at_zero,
    )
    .with_breakpoints(&m.breakpoints);
    let image = finalize(d, format!("U[{}]{}", w.label(), f.label()), profile, meta)?;
    Ok(match avg_log_tail(w, f, a0) {
        Some(tail) => image.with_log_tail(tail),
        None => image,
    })
}

/// Log-radius tail of U_φ f, with r = R e^v:
/// h(r) = r^{-1-a0} ∫_0^r g(s) s^{a0} φ̃(ln(r/s)) ds, φ̃(y) = φ(e^{-y}) e^{a0 y}.
/// The part s ≤ R is integrated in s; beyond R, where g(R e^z) = (R e^z)^{s_f} H_f(z),
/// in z with integrand R^κ e^{κ z} H_f(z) φ̃(v - z), κ = s_f + a0 + 1 < 0.
fn avg_log_tail(w: &WeightSpec, f: &RadialFunction, a0: f64) -> Option<LogTail> {
    w.ln_regular(1.0)?;
    let m = f.meta().clone();
    let (ceiling, outer) = match effective_ceiling(f) {
        Some(c) => (c, None),
        None => {
            let t = f.log_tail()?.clone();
            let kappa = t.exponent + a0 + 1.0;
            if !(kappa < 0.0) || t.start < m.support_floor {
                return None;
            }
            (t.start, Some((t, kappa)))
        }
    };
    let (g, w2) = (f.profile(), w.clone());
    let phi = move |y: f64| w2.ln_regular(y).expect("catalog weight").exp();
    let mut edges = vec![m.support_floor];
    edges.extend(m.breakpoints.iter().copied().filter(|b| *b > m.support_floor && *b < ceiling));
    edges.push(ceiling);
    let eval: Profile = Arc::new(move |v: f64| {
        let opts = DeOptions::new(INNER_REL_TOL);
        let mut parts = Vec::with_capacity(edges.len());
        for e in edges.windows(2).filter(|e| e[0] < e[1]) {
            let last = e[1] == ceiling;
            parts.push(quadrature::de_finite(
                e[0],
                e[1],
                |n: Node| {
                    let x = n.x;
                    let gx = g(x)?;
                    if gx == 0.0 {
                        return Ok(0.0);
                    }
                    let ln_ratio =
                        if last && n.from_hi < 0.5 * ceiling { -(-n.from_hi / ceiling).ln_1p() } else { (ceiling / x).ln() };
                    Ok::<f64, Error>(crate::weights::power_times(x, a0, gx * phi(v + ln_ratio)))
                },
                &opts,
            )?);
        }
        if let Some((t, kappa)) = &outer {
            let scale = crate::weights::power_times(ceiling, *kappa, 1.0);
            let term = |z: f64, y: f64| -> Result<f64> { Ok((kappa * z).exp() * (t.eval)(z)? * phi(y)) };
            let q = if v * -kappa > 750.0 {
                // e^{κ z} is below e^{-750} long before z reaches v
                quadrature::de_tail(0.0, |n: Node| if n.x < v { term(n.x, v - n.x) } else { Ok(0.0) }, &opts)?
            } else if v > 0.0 {
                quadrature::de_finite(
                    0.0,
                    v,
                    |n: Node| term(n.x, if n.x > 0.5 * v { n.from_hi } else { v - n.x }),
                    &opts,
                )?
            } else {
                QuadResult::exact(0.0)
            };
            parts.push(q.scaled(scale));
        }
        converged_value(quadrature::combine(&parts, INNER_REL_TOL))
    });
    Some(LogTail { start: ceiling, exponent: -1.0 - a0, eval })
}

/// Radius beyond which f vanishes: the support ceiling, or for profiles with
/// super-algebraic decay the first doubling of the last breakpoint where the
/// profile underflows to exactly 0.
fn effective_ceiling(f: &RadialFunction) -> Option<f64> {
    let m = f.meta();
    if m.support_ceiling.is_finite() {
        return Some(m.support_ceiling);
    }
    if m.exponent_at_infinity != f64::NEG_INFINITY {
        return None;
    }
    let mut r = m.breakpoints.last().copied().unwrap_or(1.0).max(m.support_floor).max(1.0);
    for _ in 0..64 {
        r *= 2.0;
        if f.eval(r).ok()? == 0.0 {
            return Some(r);
        }
    }
    None
}

/// r^{-d/p-ε} ∫_{1/r}^1 t^{-d/p-ε} φ(t) dt for r > 1, else 0: the image of
/// the extremal function under U_φ in closed form up to one moment.
pub fn extremal_image_profile(w: &WeightSpec, d: usize, p: f64, eps: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(crate::error::invalid(format!("radius must be positive, got {r}")));
    }
    // validates d, p, eps
    RadialFunction::extremal(d, p, eps)?;
    if r <= 1.0 {
        return Ok(0.0);
    }
    let s = d as f64 / p + eps;
    let lo = 1.0 / r;
    let inner = w.moment(s, lo)?.ok_or(Error::InfiniteNorm { p })?;
    Ok(crate::weights::power_times(r, -s, inner.value))
}

/// U_φ f_ε built on [`extremal_image_profile`].
pub fn apply_hardy_avg_extremal(w: &WeightSpec, d: usize, p: f64, eps: f64) -> Result<RadialFunction> {
    extremal_image_profile(w, d, p, eps, 2.0)?;
    let a0 = w.hint()?.algebraic_exponent_at_0;
    let s = d as f64 / p + eps;
    let w2 = w.clone();
    let profile: Profile = Arc::new(move |r| if r <= 1.0 { Ok(0.0) } else { extremal_image_profile(&w2, d, p, eps, r) });
    let meta = RadialMeta::new(1.0, f64::INFINITY, (-s).max(-1.0 - a0), 0.0);
    finalize(d, format!("U[{}]extremal(p={p},eps={eps})", w.label()), profile, meta)
}

/// V_φ f, with profile h(r) = ∫_0^1 g(r/t) t^{-d} φ(t) dt.
pub fn apply_conjugate(w: &WeightSpec, f: &RadialFunction) -> Result<RadialFunction> {
    let d = f.dimension();
    if f.is_zero() {
        return RadialFunction::zero(d);
    }
    let hint = w.hint()?;
    let a0 = hint.algebraic_exponent_at_0;
    let m = f.meta().clone();
    let df = d as f64;
    let s = m.exponent_at_infinity;
    if m.support_ceiling.is_infinite() && s >= a0 + 1.0 - df {
        return Err(Error::Divergent(format!(
            "∫ g(r/t) t^-d φ(t) dt diverges at t = 0: tail exponent {s} needs to be below {}",
            a0 + 1.0 - df
        )));
    }
    let g = f.profile();
    let (w2, m2) = (w.clone(), m.clone());
    let inner_hint = if s.is_finite() { hint.shifted_at_zero(-s - df) } else { hint };
    let profile: Profile = Arc::new(move |r: f64| {
        if r > m2.support_ceiling {
            return Ok(0.0);
        }
        if r == 0.0 {
            return Err(crate::error::invalid("V_φ profile is not evaluated at r = 0"));
        }
        // g(r/t) ≠ 0 needs floor ≤ r/t ≤ ceiling
        let lo = if m2.support_ceiling.is_finite() { r / m2.support_ceiling } else { 0.0 };
        let hi = if m2.support_floor > 0.0 { (r / m2.support_floor).min(1.0) } else { 1.0 };
        let cuts: Vec<f64> = m2.breakpoints.iter().map(|b| r / b).collect();
        // t^-d = c^-d (c/t)^d with c = min(r, 1) keeps the integrand bounded for small r
        let c = r.min(1.0);
        let q = integrate_t(lo, hi, &cuts, &inner_hint, |t, tc, m| {
            let v = g(r / t)?;
            Ok(if v == 0.0 { 0.0 } else { crate::weights::power_times(c / t, df, v) * w2.power_weight(m, t, tc) })
        })?;
        Ok(crate::weights::power_times(c, -df, converged_value(q)?))
    });
    let exp_inf = if m.support_ceiling.is_finite() { f64::NEG_INFINITY } else { s };
    let exp_zero = m.exponent_at_zero.min(1.0 - df + a0);
    let meta = RadialMeta::new(0.0, m.support_ceiling, exp_inf, exp_zero).with_breakpoints(&m.breakpoints);
    finalize(d, format!("V[{}]{}", w.label(), f.label()), profile, meta)
}

/// H_d f, the average of f over the ball of radius |x|:
/// h(r) = d ∫_0^1 g(t r) t^{d-1} dt.
pub fn apply_hardy_multi(f: &RadialFunction) -> Result<RadialFunction> {
    let d = f.dimension();
    if f.is_zero() {
        return RadialFunction::zero(d);
    }
    let m = f.meta().clone();
    let df = d as f64;
    if m.support_floor == 0.0 && m.exponent_at_zero + df - 1.0 <= -1.0 {
        return Err(Error::Divergent(format!(
            "g(ρ) ρ^(d-1) is not integrable at 0 (exponent {})",
            m.exponent_at_zero
        )));
    }
    let g = f.profile();
    let m2 = m.clone();
    let inner_hint = SingularityHint::at_zero((m.exponent_at_zero.min(0.0) + df - 1.0).max(-0.99))?;
    let profile: Profile = Arc::new(move |r: f64| {
        if r < m2.support_floor || (r == 0.0 && m2.support_floor > 0.0) {
            return Ok(0.0);
        }
        if r == 0.0 {
            return g(0.0);
        }
        let lo = m2.support_floor / r;
        let hi = (m2.support_ceiling / r).min(1.0);
        let cuts: Vec<f64> = m2.breakpoints.iter().map(|b| b / r).collect();
        let q = integrate_t(lo, hi, &cuts, &inner_hint, |t, _, m| {
            let v = g(t * r)?;
            Ok(if v == 0.0 { 0.0 } else { df * v * t.powf(df - 1.0 + m) })
        })?;
        converged_value(q)
    });
    let meta = RadialMeta::new(m.support_floor, f64::INFINITY, m.exponent_at_infinity.max(-df), m.exponent_at_zero)
        .with_breakpoints(&m.breakpoints);
    finalize(d, format!("H[{}]", f.label()), profile, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::SlowlyVarying;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn hardy_avg_of_constant() {
        let w = WeightSpec::beta(2.0, 3.0).unwrap();
        let f = RadialFunction::constant(2, 3.0).unwrap();
        let h = apply_hardy_avg(&w, &f).unwrap();
        for &r in &[0.0, 0.5, 7.0] {
            assert!(rel(h.eval(r).unwrap(), 3.0 / 12.0) < 1e-10);
        }
    }

    #[test]
    fn hardy_avg_of_indicator() {
        let w = WeightSpec::constant(1.0).unwrap();
        let h = apply_hardy_avg(&w, &RadialFunction::indicator_ball(1).unwrap()).unwrap();
        for &r in &[0.3, 1.0, 2.0, 17.5] {
            assert!(rel(h.eval(r).unwrap(), (1.0f64 / r).min(1.0)) < 1e-10, "r={r}");
        }
    }

    #[test]
    fn extremal_image_examples() {
        let w = WeightSpec::constant(1.0).unwrap();
        assert_eq!(extremal_image_profile(&w, 1, 2.0, 0.1, 0.5).unwrap(), 0.0);
        let v = extremal_image_profile(&w, 1, 2.0, 0.1, 2.0).unwrap();
        assert!(rel(v, 0.399_384_888_466_117_8) < 1e-12, "{v}");
        // r → ∞: inner integral tends to the full moment 1/(1 - 0.6)
        for (r, tol) in [(1e6, 5e-3), (1e12, 1e-3)] {
            let v = extremal_image_profile(&w, 1, 2.0, 0.1, r).unwrap();
            assert!(rel(v / r.powf(-0.6), 2.5) < tol);
        }
    }

    #[test]
    fn extremal_fast_path_matches_generic() {
        for w in [
            WeightSpec::constant(1.0).unwrap(),
            WeightSpec::beta(2.0, 3.0).unwrap(),
            WeightSpec::log(0.5, SlowlyVarying::LogShift).unwrap(),
        ] {
            let f = RadialFunction::extremal(2, 3.0, 0.1).unwrap();
            let generic = apply_hardy_avg(&w, &f).unwrap();
            let fast = apply_hardy_avg_extremal(&w, 2, 3.0, 0.1).unwrap();
            for &r in &[0.5, 1.5, 3.0, 1e3, 1e9] {
                let (a, b) = (generic.eval(r).unwrap(), fast.eval(r).unwrap());
                assert!((a - b).abs() <= 1e-9 * b.abs(), "{} r={r}: {a} vs {b}", w.label());
            }
        }
    }

    #[test]
    fn conjugate_examples() {
        let w = WeightSpec::constant(1.0).unwrap();
        let v = apply_conjugate(&w, &RadialFunction::indicator_ball(1).unwrap()).unwrap();
        assert!(rel(v.eval(0.5).unwrap(), 2f64.ln()) < 1e-10);
        assert_eq!(v.eval(1.5).unwrap(), 0.0);
        let v = apply_conjugate(&w, &RadialFunction::power_tail(1, -2.0).unwrap()).unwrap();
        for &r in &[1.0, 2.0, 10.0] {
            assert!(rel(v.eval(r).unwrap(), 0.5 / (r * r)) < 1e-10, "r={r}");
        }
        // too slow a tail is refused up front
        assert!(matches!(
            apply_conjugate(&w, &RadialFunction::power_tail(1, 0.2).unwrap()),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn conjugate_is_linear() {
        let w = WeightSpec::beta(3.0, 0.7).unwrap();
        let f = RadialFunction::gaussian(2).unwrap();
        let v1 = apply_conjugate(&w, &f).unwrap();
        let v2 = apply_conjugate(&w, &f.scaled(2.0)).unwrap();
        for &r in &[0.1, 0.7, 2.0] {
            assert!(rel(v2.eval(r).unwrap(), 2.0 * v1.eval(r).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn hardy_multi_examples() {
        let h = apply_hardy_multi(&RadialFunction::constant(3, 1.0).unwrap()).unwrap();
        assert!(rel(h.eval(4.0).unwrap(), 1.0) < 1e-12);
        let h = apply_hardy_multi(&RadialFunction::indicator_ball(1).unwrap()).unwrap();
        for &r in &[0.5, 2.0, 9.0] {
            assert!(rel(h.eval(r).unwrap(), (1.0f64 / r).min(1.0)) < 1e-10);
        }
        let lin: Profile = Arc::new(Ok);
        let f = RadialFunction::new(3, "rho", lin, RadialMeta::new(0.0, f64::INFINITY, 1.0, 1.0)).unwrap();
        let h = apply_hardy_multi(&f).unwrap();
        for &r in &[0.5, 2.0] {
            assert!(rel(h.eval(r).unwrap(), 0.75 * r) < 1e-10);
        }
    }

    #[test]
    fn hardy_multi_is_d_times_average_with_power_weight() {
        for d in 1..=3usize {
            let w = WeightSpec::beta(d as f64, 1.0).unwrap();
            for f in [RadialFunction::gaussian(d).unwrap(), RadialFunction::extremal(d, 2.0, 0.1).unwrap()] {
                let h = apply_hardy_multi(&f).unwrap();
                let u = apply_hardy_avg(&w, &f).unwrap();
                for &r in &[0.4, 1.3, 6.0] {
                    let (a, b) = (h.eval(r).unwrap(), d as f64 * u.eval(r).unwrap());
                    assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300), "d={d} r={r}");
                }
            }
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let w = WeightSpec::constant(1.0).unwrap();
        let z = RadialFunction::zero(2).unwrap();
        assert!(apply_hardy_avg(&w, &z).unwrap().is_zero());
        assert!(apply_conjugate(&w, &z).unwrap().is_zero());
        assert!(apply_hardy_multi(&z).unwrap().is_zero());
    }

    #[test]
    fn memo_returns_same_values_concurrently() {
        use rayon::prelude::*;
        let w = WeightSpec::beta(2.0, 1.0).unwrap();
        let h = apply_hardy_avg(&w, &RadialFunction::gaussian(2).unwrap()).unwrap();
        let radii: Vec<f64> = (1..200).map(|k| k as f64 * 0.05).collect();
        let first: Vec<u64> = radii.par_iter().map(|&r| h.eval(r).unwrap().to_bits()).collect();
        let second: Vec<u64> = radii.iter().map(|&r| h.eval(r).unwrap().to_bits()).collect();
        assert_eq!(first, second);
    }
}
