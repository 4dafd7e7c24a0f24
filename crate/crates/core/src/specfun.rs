//! Gamma, Beta and the dimensional constants of the unit ball.
//!
//! Gamma uses the Stirling series for arguments of at least 12 and the
//! recurrence Γ(x) = Γ(x + n) / (x (x+1) ... (x+n-1)) below that, with
//! reflection below 1/2. Relative accuracy is a few ulps up to x ≈ 171.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

/// Coefficients B_{2k} / (2k (2k-1)) of the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];
const STIRLING_MIN: f64 = 12.0;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest argument for which Γ(x) is finite in double precision.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

fn stirling_correction(y: f64) -> f64 {
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// Shifts x up to the Stirling range; returns (shifted x, product of the skipped factors).
fn shift_up(mut x: f64) -> (f64, f64) {
    let mut prod = 1.0;
    while x < STIRLING_MIN {
        prod *= x;
        x += 1.0;
    }
    (x, prod)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x) for real `x` that is not a non-positive integer.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidParameter("gamma(NaN)".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow(x));
    }
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx)
        let g1 = gamma(1.0 - x)?;
        return Ok(PI / ((PI * x).sin() * g1));
    }
    let (y, prod) = shift_up(x);
    // split (y/e)^y so it does not overflow before the division
    let half = (y / E).powf(y * 0.5);
    Ok((2.0 * PI / y).sqrt() * half * stirling_correction(y).exp() * half / prod)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::InvalidParameter(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok((PI / s).ln() - ln_gamma(1.0 - x)?);
    }
    let (y, prod) = shift_up(x);
    Ok(LN_SQRT_2PI + (y - 0.5) * y.ln() - y + stirling_correction(y) - prod.ln())
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
///
/// Switches to log space once `a + b > 30` so that large arguments do not
/// overflow the individual Gamma factors.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::BetaDomain { a, b });
    }
    if a + b > 30.0 {
        return Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp());
    }
    Ok(gamma(a)? * gamma(b)? / gamma(a + b)?)
}

/// ln B(a, b) for a, b > 0.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::BetaDomain { a, b });
    }
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// Measure-theoretic constants of the unit ball in R^d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionConstants {
    pub d: usize,
    /// c(d) = d π^{d/2} / Γ(1 + d/2), the area of the unit sphere.
    pub surface_constant: f64,
    /// Ω(d) = π^{d/2} / Γ(1 + d/2), the volume of the unit ball.
    pub ball_volume: f64,
    /// ln Ω(d); stays meaningful when `ball_volume` underflows (d ≳ 460).
    pub ln_ball_volume: f64,
    pub ln_surface_constant: f64,
}

/// Ω(d) and c(d) = d·Ω(d).
///
/// Γ(1 + d/2) is expanded as a finite product (m! for d = 2m, and
/// ∏(k + 1/2)·√π for d = 2m + 1) so that the low dimensions come out exact:
/// c(1) = 2, c(2) = 2π, c(3) = 4π up to rounding of π itself.
pub fn dimension_constants(d: usize) -> Result<DimensionConstants> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    let m = d / 2;
    let (mut vol, mut ln_vol) = if d.is_multiple_of(2) { (1.0, 0.0) } else { (2.0, 2f64.ln()) };
    let offset = if d.is_multiple_of(2) { 0.0 } else { 0.5 };
    for k in 1..=m {
        let factor = PI / (k as f64 + offset);
        vol *= factor;
        ln_vol += factor.ln();
    }
    let surface = d as f64 * vol;
    Ok(DimensionConstants {
        d,
        surface_constant: surface,
        ball_volume: vol,
        ln_ball_volume: ln_vol,
        ln_surface_constant: ln_vol + (d as f64).ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_examples() {
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-14);
        // Γ(2.5) = 1.5 · 0.5 · Γ(0.5)
        assert!(rel(gamma(2.5).unwrap(), 1.5 * 0.5 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma(2.5).unwrap(), 1.329_340_388_179_137) < 1e-14);
    }

    #[test]
    fn gamma_factorials_across_range() {
        let mut fact = 1.0f64;
        for n in 1..=170u32 {
            // fact = (n-1)!
            let g = gamma(n as f64).unwrap();
            assert!(rel(g, fact) < 1e-13, "n={n}: {g} vs {fact}");
            fact *= n as f64;
        }
    }

    #[test]
    fn gamma_half_integers() {
        // Γ(n + 1/2) = √π ∏_{k=0}^{n-1} (k + 1/2)
        let mut v = PI.sqrt();
        for n in 0..160u32 {
            let x = n as f64 + 0.5;
            assert!(rel(gamma(x).unwrap(), v) < 1e-13, "x={x}");
            v *= x;
        }
    }

    #[test]
    fn gamma_small_arguments_via_recurrence() {
        for &x in &[0.01, 0.05, 0.1, 0.25, 0.333, 0.49] {
            let lhs = gamma(x).unwrap();
            let rhs = gamma(x + 1.0).unwrap() / x;
            assert!(rel(lhs, rhs) < 1e-13, "x={x}");
        }
    }

    #[test]
    fn gamma_poles_and_overflow() {
        assert!(matches!(gamma(0.0), Err(Error::Pole(_))));
        assert!(matches!(gamma(-3.0), Err(Error::Pole(_))));
        assert!(matches!(gamma(172.0), Err(Error::Overflow(_))));
        // negative non-integers are fine: Γ(-1/2) = -2√π
        assert!(rel(gamma(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-14);
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.01, 0.3, 0.7, 1.5, 3.2, 10.0, 55.5, 150.0] {
            let a = ln_gamma(x).unwrap();
            let b = gamma(x).unwrap().ln();
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0), "x={x}: {a} vs {b}");
        }
        assert!(ln_gamma(0.0).is_err());
    }

    #[test]
    fn beta_examples() {
        assert!(rel(beta(1.0, 1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(beta(1.5, 1.0).unwrap(), 2.0 / 3.0) < 1e-14);
        assert!(rel(beta(2.0, 3.0).unwrap(), 1.0 / 12.0) < 1e-14);
        assert!(matches!(beta(0.0, 1.0), Err(Error::BetaDomain { .. })));
        assert!(matches!(beta(1.0, -2.0), Err(Error::BetaDomain { .. })));
    }

    #[test]
    fn beta_log_branch_agrees_with_direct() {
        // B(a, 1) = 1/a on both sides of the a + b = 30 switch
        for &a in &[28.0, 29.5, 30.5, 45.0] {
            assert!(rel(beta(a, 1.0).unwrap(), 1.0 / a) < 1e-12, "a={a}");
        }
        // B(20, 20) = 19!·19!/39!
        let f = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        assert!(rel(beta(20.0, 20.0).unwrap(), f(19) * f(19) / f(39)) < 1e-12);
    }

    #[test]
    fn dimension_constants_low_dims() {
        let c1 = dimension_constants(1).unwrap();
        assert_eq!(c1.surface_constant, 2.0);
        assert_eq!(c1.ball_volume, 2.0);
        let c2 = dimension_constants(2).unwrap();
        assert!(rel(c2.surface_constant, 2.0 * PI) < 1e-14);
        assert!(rel(c2.ball_volume, PI) < 1e-14);
        let c3 = dimension_constants(3).unwrap();
        assert!(rel(c3.surface_constant, 4.0 * PI) < 1e-14);
        assert!(rel(c3.ball_volume, 4.0 * PI / 3.0) < 1e-14);
        assert!(dimension_constants(0).is_err());
    }

    #[test]
    fn dimension_constants_match_gamma_formula() {
        for d in 1..=20usize {
            let c = dimension_constants(d).unwrap();
            let df = d as f64;
            let via_gamma = df * PI.powf(df / 2.0) / gamma(1.0 + df / 2.0).unwrap();
            assert!(rel(c.surface_constant, via_gamma) < 1e-13, "d={d}");
            assert_eq!(c.surface_constant, df * c.ball_volume);
            assert!((c.ln_ball_volume - c.ball_volume.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_constants_high_dims_stay_finite_in_log() {
        let c = dimension_constants(1000).unwrap();
        assert!(c.ln_ball_volume.is_finite());
        assert!(c.ln_ball_volume < -1000.0);
        assert!(c.ball_volume >= 0.0);
    }
}
