//! Mixed-norm (anisotropic) layer for factorable functions
//! f(x_1, ..., x_l) = ∏ f_k(|x_k|).
//!
//! On such functions the mixed norm factorizes, |f|_{p⃗} = ∏ |f_k|_{p_k}, so
//! every quantity here reduces to per-axis radial computations. The operator
//! acts block by block: each factor is averaged with its own scaling
//! parameter t_k, and the result is again factorable.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::norms::{self, AnisoPVector, LpNorm, PGrid, PsiSpec, Spacing};
use crate::operators;
use crate::radialfn::FactorableFunction;
use crate::weights::WeightSpec;

pub const DEFAULT_AXIS_POINTS: usize = 33;
pub const MAX_AXES: usize = 3;

pub type AnisoPsiFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
enum AnisoPsiKind {
    Product(Vec<PsiSpec>),
    Custom(String),
}

/// ψ(p⃗) on an axis-aligned box of exponents, +∞ outside the box.
#[derive(Clone)]
pub struct AnisoPsiSpec {
    boxes: Vec<(f64, f64)>,
    eval: AnisoPsiFn,
    kind: AnisoPsiKind,
}

impl fmt::Debug for AnisoPsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnisoPsiSpec {{ {}, box: {:?} }}", self.label(), self.boxes)
    }
}

impl AnisoPsiSpec {
    /// ψ(p⃗) = ∏ ψ_k(p_k).
    pub fn product_of_scalars(factors: Vec<PsiSpec>) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_AXES {
            return Err(invalid(format!("need 1..={MAX_AXES} scalar ψ factors, got {}", factors.len())));
        }
        let boxes = factors.iter().map(|p| p.support()).collect();
        let fs = factors.clone();
        let eval: AnisoPsiFn = Arc::new(move |pv: &[f64]| {
            let mut v = 1.0;
            for (psi, &p) in fs.iter().zip(pv) {
                v *= psi.eval(p)?;
            }
            Ok(v)
        });
        Ok(AnisoPsiSpec { boxes, eval, kind: AnisoPsiKind::Product(factors) })
    }

    pub fn custom(label: impl Into<String>, boxes: Vec<(f64, f64)>, eval: AnisoPsiFn) -> Result<Self> {
        if boxes.is_empty() || boxes.len() > MAX_AXES {
            return Err(invalid(format!("need 1..={MAX_AXES} axes, got {}", boxes.len())));
        }
        for &(a, b) in &boxes {
            if !(a >= 1.0 && b > a) {
                return Err(invalid(format!("bad axis interval ({a}, {b})")));
            }
        }
        Ok(AnisoPsiSpec { boxes, eval, kind: AnisoPsiKind::Custom(label.into()) })
    }

    pub fn axes(&self) -> usize {
        self.boxes.len()
    }

    pub fn support_box(&self) -> &[(f64, f64)] {
        &self.boxes
    }

    pub fn factors(&self) -> Option<&[PsiSpec]> {
        match &self.kind {
            AnisoPsiKind::Product(f) => Some(f),
            AnisoPsiKind::Custom(_) => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            AnisoPsiKind::Product(f) => f.iter().map(|p| p.kind().to_string()).collect::<Vec<_>>().join("⊗"),
            AnisoPsiKind::Custom(l) => format!("custom({l})"),
        }
    }

    pub fn contains(&self, pv: &[f64]) -> bool {
        pv.len() == self.boxes.len() && pv.iter().zip(&self.boxes).all(|(p, (a, b))| p > a && p < b)
    }

    pub fn eval(&self, pv: &[f64]) -> Result<f64> {
        if !self.contains(pv) {
            return Ok(f64::INFINITY);
        }
        (self.eval)(pv)
    }

    /// ψ_θ(p⃗) = ψ(p⃗)·∏ θ_{d_k}(p_k), on the box cut down to where every θ is finite.
    pub fn with_theta(&self, w: &WeightSpec, dims: &[usize]) -> Result<Self> {
        if dims.len() != self.axes() {
            return Err(invalid(format!("{} dimensions for {} axes", dims.len(), self.axes())));
        }
        if let AnisoPsiKind::Product(fs) = &self.kind {
            let scaled = fs.iter().zip(dims).map(|(psi, &d)| norms::psi_with_theta(psi, w, d)).collect::<Result<_>>()?;
            return Self::product_of_scalars(scaled);
        }
        let mut boxes = Vec::with_capacity(self.boxes.len());
        for (&(a, b), &d) in self.boxes.iter().zip(dims) {
            let (lo, hi) = norms::theta_support(w, d)?;
            let (na, nb) = (a.max(lo), b.min(hi));
            if !(na < nb) {
                return Err(Error::EmptySupport { a_lo: a, a_hi: b, b_lo: lo, b_hi: hi });
            }
            boxes.push((na, nb));
        }
        let (base, w2, ds) = (self.eval.clone(), w.clone(), dims.to_vec());
        let eval: AnisoPsiFn = Arc::new(move |pv: &[f64]| {
            let mut v = base(pv)?;
            for (&p, &d) in pv.iter().zip(&ds) {
                v *= w2.theta(d, p)?.value;
            }
            Ok(v)
        });
        Ok(AnisoPsiSpec { boxes, eval, kind: AnisoPsiKind::Custom(format!("{}*theta[{}]", self.label(), w.label())) })
    }
}

/// Per-axis grid spanning a ψ box with the default resolution.
pub fn default_axis_grids(psi: &AnisoPsiSpec) -> Result<Vec<PGrid>> {
    psi.support_box()
        .iter()
        .map(|&s| PGrid::inset(s, DEFAULT_AXIS_POINTS, Spacing::Log, norms::DEFAULT_GRID_MARGIN))
        .collect()
}

/// Block-wise U_φ on a factorable function: each factor is averaged on its own.
pub fn apply_hardy_avg_factorable(w: &WeightSpec, f: &FactorableFunction) -> Result<FactorableFunction> {
    let factors = f.factors().iter().map(|g| operators::apply_hardy_avg(w, g)).collect::<Result<Vec<_>>>()?;
    FactorableFunction::new(factors)
}

/// Mixed-norm evaluator for a factorable function that caches each factor's
/// norm per exponent, so a tensor grid costs Σ n_k radial norms instead of ∏ n_k.
pub struct FactorNormCache<'a> {
    f: &'a FactorableFunction,
    tables: Vec<HashMap<u64, LpNorm>>,
}

impl<'a> FactorNormCache<'a> {
    /// Precomputes every factor at every point of its grid.
    pub fn new(f: &'a FactorableFunction, grids: &[PGrid]) -> Result<Self> {
        if grids.len() != f.factors().len() {
            return Err(invalid(format!("{} grids for {} factors", grids.len(), f.factors().len())));
        }
        let tables = f
            .factors()
            .iter()
            .zip(grids)
            .map(|(g, grid)| {
                let vals: Vec<(u64, LpNorm)> = grid
                    .points()
                    .par_iter()
                    .map(|&p| Ok((p.to_bits(), norms::lp_norm_radial(g, p)?)))
                    .collect::<Result<_>>()?;
                Ok(vals.into_iter().collect())
            })
            .collect::<Result<_>>()?;
        Ok(FactorNormCache { f, tables })
    }

    pub fn norm(&self, pv: &[f64]) -> Result<LpNorm> {
        if pv.len() != self.tables.len() {
            return Err(invalid("exponent vector length mismatch"));
        }
        if self.f.factors().iter().any(|g| g.is_zero()) {
            return Ok(LpNorm::ZERO);
        }
        let mut value = 1.0;
        let mut rel = 0.0;
        for ((table, g), &p) in self.tables.iter().zip(self.f.factors()).zip(pv) {
            let n = match table.get(&p.to_bits()) {
                Some(n) => *n,
                None => norms::lp_norm_radial(g, p)?,
            };
            value *= n.value;
            rel += n.rel_error();
        }
        if !value.is_finite() {
            return Ok(LpNorm::INFINITE);
        }
        Ok(LpNorm { value, abs_error: value * rel })
    }
}

/// sup over a tensor grid of a mixed norm divided by ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisoGlsNorm {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub abs_error: f64,
}

fn check_grids(psi: &AnisoPsiSpec, grids: &[PGrid]) -> Result<()> {
    if grids.len() != psi.axes() {
        return Err(invalid(format!("{} grids for a {}-axis ψ", grids.len(), psi.axes())));
    }
    for (g, &(a, b)) in grids.iter().zip(psi.support_box()) {
        if !(g.lo() > a && g.hi() < b) {
            return Err(Error::GridOutsideSupport { lo: g.lo(), hi: g.hi(), a, b });
        }
    }
    Ok(())
}

/// sup_{p⃗ ∈ grid} |f|_{p⃗} / ψ(p⃗) over the tensor product of the axis grids.
pub fn aniso_gls_norm<F>(norm_fn: F, psi: &AnisoPsiSpec, grids: &[PGrid]) -> Result<AnisoGlsNorm>
where
    F: Fn(&[f64]) -> Result<LpNorm> + Sync,
{
    check_grids(psi, grids)?;
    let sizes: Vec<usize> = grids.iter().map(|g| g.points().len()).collect();
    let total: usize = sizes.iter().product();
    let point = |mut idx: usize| -> Vec<f64> {
        let mut pv = vec![0.0; sizes.len()];
        for k in (0..sizes.len()).rev() {
            pv[k] = grids[k].points()[idx % sizes[k]];
            idx /= sizes[k];
        }
        pv
    };
    let samples: Vec<(f64, f64)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let pv = point(i);
            let n = norm_fn(&pv)?;
            let s = psi.eval(&pv)?;
            Ok(if n.value.is_finite() { (n.value / s, n.abs_error / s) } else { (f64::INFINITY, 0.0) })
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, s) in samples.iter().enumerate() {
        if s.0 > samples[best].0 {
            best = i;
        }
    }
    Ok(AnisoGlsNorm { value: samples[best].0, argmax: point(best), abs_error: samples[best].1 })
}

/// Outcome of the anisotropic contraction check.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisoReport {
    pub p: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub numerical_margin: f64,
    pub pass: bool,
}

/// Compares sup |U f|_{p⃗}/ψ_θ(p⃗) against sup |f|_{p⃗}/ψ(p⃗) on the tensor grid.
pub fn aniso_contraction_check(
    w: &WeightSpec,
    f: &FactorableFunction,
    psi: &AnisoPsiSpec,
    grids: &[PGrid],
) -> Result<AnisoReport> {
    let dims = f.dimensions();
    let psi_theta = psi.with_theta(w, &dims)?;
    check_grids(&psi_theta, grids)?;
    if f.factors().iter().any(|g| g.is_zero()) {
        let p = grids.iter().map(|g| g.lo()).collect();
        return Ok(AnisoReport { p, lhs: 0.0, rhs: 0.0, ratio: 0.0, numerical_margin: 1e-9, pass: true });
    }
    let image = apply_hardy_avg_factorable(w, f)?;
    let img_cache = FactorNormCache::new(&image, grids)?;
    let f_cache = FactorNormCache::new(f, grids)?;
    let lhs = aniso_gls_norm(|pv: &[f64]| img_cache.norm(pv), &psi_theta, grids)?;
    let rhs = aniso_gls_norm(|pv: &[f64]| f_cache.norm(pv), psi, grids)?;
    let (ratio, margin, pass) = crate::verify::judge(lhs.value, lhs.abs_error, rhs.value, rhs.abs_error);
    Ok(AnisoReport { p: lhs.argmax, lhs: lhs.value, rhs: rhs.value, ratio, numerical_margin: margin, pass })
}

/// |f|_{p⃗} for a factorable function at an explicit exponent vector.
pub fn mixed_norm(f: &FactorableFunction, pv: &[f64]) -> Result<LpNorm> {
    norms::anisotropic_norm_factorable(f, &AnisoPVector::new(pv.to_vec())?)
}
