//! Integration over ℝ and ℝ₊ for rapidly decaying integrands.
//!
//! The infinite domain is truncated at a radius found by a geometric scan
//! for the point where the integrand drops below `abs_tol · 1e-3`, widened
//! by `truncation_safety`. The truncated integral is computed with composite
//! Gauss–Legendre panels, doubling the panel count until two successive
//! levels agree to within tolerance on two consecutive refinements.
//!
//! On a window symmetric about zero the nodes are generated and summed in
//! mirror pairs, so odd integrands integrate to exactly zero.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VfpError};

const GL_ORDER: usize = 12;
const MIN_LEVEL: u32 = 2;
const RADIUS_GROWTH: f64 = 1.1;
const MAX_RADIUS: f64 = 1e8;
const DECAY_SPAN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: u32,
    /// Multiplier on the auto-detected decay radius.
    pub truncation_safety: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_refinements: 20,
            truncation_safety: 1.5,
        }
    }
}

impl QuadratureSpec {
    /// Tolerances used when polishing roots of quadrature-defined functions.
    pub fn tight() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.max_refinements >= 1
            && self.truncation_safety >= 1.0
            && self.abs_tol.is_finite()
            && self.rel_tol.is_finite()
            && self.truncation_safety.is_finite();
        if ok {
            Ok(())
        } else {
            Err(VfpError::InvalidSpec(format!("{self:?}")))
        }
    }
}

/// Positive Gauss–Legendre nodes on [-1, 1] with their weights.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        (0..n / 2)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

/// Composite rule with `panels` equal panels on `[center - half, center + half]`.
fn composite<F>(f: &F, center: f64, half: f64, panels: usize, out: &mut [f64]) -> Result<()>
where
    F: Fn(f64, &mut [f64]),
{
    let dim = out.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    let hw = half / panels as f64;
    let p = panels as i64;
    let panel_center = |k: i64| center + half * (2 * k + 1 - p) as f64 / p as f64;
    let eval = |x: f64, buf: &mut [f64]| -> Result<()> {
        f(x, buf);
        if buf.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(VfpError::NonFinite { x })
        }
    };
    for k in 0..(p + 1) / 2 {
        let mirror = p - 1 - k;
        let (ck, cm) = (panel_center(k), panel_center(mirror));
        for &(t, w) in gauss_legendre() {
            let pairs: &[(f64, f64)] = if k == mirror {
                &[(ck + hw * t, cm - hw * t)]
            } else {
                &[(ck + hw * t, cm - hw * t), (ck - hw * t, cm + hw * t)]
            };
            for &(x1, x2) in pairs {
                eval(x1, &mut a)?;
                eval(x2, &mut b)?;
                for i in 0..dim {
                    out[i] += w * (a[i] + b[i]);
                }
            }
        }
    }
    out.iter_mut().for_each(|v| *v *= hw);
    Ok(())
}

/// Integrates a vector-valued `f` over a finite interval.
pub fn integrate_interval_vec<F>(
    f: F,
    lo: f64,
    hi: f64,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>>
where
    F: Fn(f64, &mut [f64]),
{
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(VfpError::InvalidParameter(format!("interval [{lo}, {hi}]")));
    }
    // keep the center exactly zero on symmetric windows
    let center = if lo == -hi { 0.0 } else { 0.5 * (lo + hi) };
    let half = 0.5 * (hi - lo);
    let mut prev = vec![0.0; dim];
    let mut cur = vec![0.0; dim];
    composite(&f, center, half, 1, &mut prev)?;
    let mut passes = 0;
    let mut worst = f64::INFINITY;
    for level in 1..=spec.max_refinements {
        composite(&f, center, half, 1usize << level, &mut cur)?;
        worst = cur
            .iter()
            .zip(&prev)
            .map(|(c, p)| (c - p).abs() / spec.abs_tol.max(spec.rel_tol * c.abs()))
            .fold(0.0, f64::max);
        if worst <= 1.0 && level >= MIN_LEVEL {
            passes += 1;
            if passes >= 2 {
                return Ok(cur);
            }
        } else {
            passes = 0;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Err(VfpError::NonConvergence {
        refinements: spec.max_refinements,
        estimate: prev.first().copied().unwrap_or(0.0),
        error: worst * spec.abs_tol,
    })
}

/// Smallest `R` on a geometric scan from 1 such that `|f| < abs_tol·1e-3` at
/// every scanned radius in `[R, 4R]`, times `truncation_safety`. With
/// `both_sides`, `f(-r)` must also be small.
pub fn truncation_radius<F>(
    f: &F,
    dim: usize,
    spec: &QuadratureSpec,
    both_sides: bool,
) -> Result<f64>
where
    F: Fn(f64, &mut [f64]),
{
    spec.validate()?;
    let threshold = spec.abs_tol * 1e-3;
    let mut buf = vec![0.0; dim];
    let mut mag = |x: f64| -> Result<f64> {
        f(x, &mut buf);
        let m = buf.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m.is_finite() {
            Ok(m)
        } else {
            Err(VfpError::NonFinite { x })
        }
    };
    let mut r = 1.0;
    let mut run_start: Option<f64> = None;
    while r <= MAX_RADIUS {
        let mut m = mag(r)?;
        if both_sides {
            m = m.max(mag(-r)?);
        }
        if m < threshold {
            let start = *run_start.get_or_insert(r);
            // the integrand must stay negligible over [R, 4R]; a single small
            // sample may be an interior zero or a tail on the far side of an off-center peak
            if r >= DECAY_SPAN * start {
                return Ok(start * spec.truncation_safety);
            }
        } else {
            run_start = None;
        }
        r *= RADIUS_GROWTH;
    }
    Err(VfpError::DivergentIntegrand(format!(
        "integrand does not decay below {threshold:e} within |x| <= {MAX_RADIUS:e}"
    )))
}

/// ∫ℝ f for vector-valued `f`; returns the integrals and the truncation radius used.
pub fn integrate_line_vec_windowed<F>(
    f: F,
    dim: usize,
    spec: &QuadratureSpec,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64, &mut [f64]),
{
    let r = truncation_radius(&f, dim, spec, true)?;
    Ok((integrate_interval_vec(f, -r, r, dim, spec)?, r))
}

pub fn integrate_line_vec<F>(f: F, dim: usize, spec: &QuadratureSpec) -> Result<Vec<f64>>
where
    F: Fn(f64, &mut [f64]),
{
    integrate_line_vec_windowed(f, dim, spec).map(|(v, _)| v)
}

pub fn integrate_halfline_vec<F>(f: F, dim: usize, spec: &QuadratureSpec) -> Result<Vec<f64>>
where
    F: Fn(f64, &mut [f64]),
{
    let r = truncation_radius(&f, dim, spec, false)?;
    integrate_interval_vec(f, 0.0, r, dim, spec)
}

/// ∫ℝ f.
pub fn integrate_line<F>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_line_vec(|x, out: &mut [f64]| out[0] = f(x), 1, spec).map(|v| v[0])
}

/// ∫₀^∞ f.
pub fn integrate_halfline<F>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_halfline_vec(|x, out: &mut [f64]| out[0] = f(x), 1, spec).map(|v| v[0])
}

/// ∫ₐᵇ f.
pub fn integrate_interval<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_interval_vec(|x, out: &mut [f64]| out[0] = f(x), lo, hi, 1, spec).map(|v| v[0])
}
