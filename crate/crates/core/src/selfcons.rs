//! Self-consistent Gibbs measures.
//!
//! A stationary position density has the form `ρ̂ ∝ exp(−(V + ψ∗ρ̂)/λ)`.
//! For quadratic `ψ = (α/2)x²` the convolution only depends on the mean `m`
//! of `ρ̂` (its variance contributes a constant that cancels in the
//! normalization), so invariant measures are the fixed points of the scalar
//! map `Φ_λ(m) = mean of exp(−W_m/λ)` with `W_m = V + (α/2)(x − m)²`.
//! For a general even polynomial `ψ` the convolution is a polynomial whose
//! coefficients are linear in the raw moments, and the solver iterates on
//! the moment vector instead.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VfpError};
use crate::model::{
    critical_points, effective_potential, validate_assumptions, ConfiningPotential,
    InteractionPotential,
};
use crate::poly::{binomial, Polynomial};
use crate::quad::{
    integrate_interval, integrate_line_vec, integrate_line_vec_windowed, truncation_radius,
    QuadratureSpec,
};
use crate::roots::newton_bisect;

/// Number of uniform scan nodes for sign changes of `Φ(m) − m`.
const SCAN_NODES: usize = 2000;
/// Residual every returned fixed point must meet.
const FIXED_POINT_RESIDUAL: f64 = 1e-9;
/// Default number of grid nodes for stationary densities.
pub const DEFAULT_GRID_NODES: usize = 401;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfConsistencyProblem {
    pub potential: ConfiningPotential,
    pub interaction: InteractionPotential,
    pub lambda: f64,
    /// Skips the structural assumptions (e.g. quadratic `V` for Gaussian checks).
    pub test_only: bool,
    pub quadrature: QuadratureSpec,
}

impl SelfConsistencyProblem {
    /// Builds a problem whose potentials pass every structural assumption.
    pub fn new(
        potential: ConfiningPotential,
        interaction: InteractionPotential,
        lambda: f64,
    ) -> Result<Self> {
        let report = validate_assumptions(&potential, &interaction);
        if !report.all_passed() {
            let failed: Vec<String> = report.failed().map(|c| c.assumption.to_string()).collect();
            return Err(VfpError::InvalidPotential(format!(
                "assumptions not satisfied: {}",
                failed.join(", ")
            )));
        }
        Self::build(potential, interaction, lambda, false)
    }

    /// Builds a problem that only needs `e^{-V/λ}` to be integrable.
    pub fn test_only(
        potential: ConfiningPotential,
        interaction: InteractionPotential,
        lambda: f64,
    ) -> Result<Self> {
        if !potential.is_confining() {
            return Err(VfpError::InvalidPotential(
                "potential must have even degree and positive leading coefficient".into(),
            ));
        }
        Self::build(potential, interaction, lambda, true)
    }

    fn build(
        potential: ConfiningPotential,
        interaction: InteractionPotential,
        lambda: f64,
        test_only: bool,
    ) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(VfpError::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            potential,
            interaction,
            lambda,
            test_only,
            quadrature: QuadratureSpec::default(),
        })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::build(
            self.potential.clone(),
            self.interaction.clone(),
            lambda,
            self.test_only,
        )
        .map(|p| p.with_quadrature(self.quadrature))
    }

    pub fn with_quadrature(mut self, spec: QuadratureSpec) -> Self {
        self.quadrature = spec;
        self
    }

    fn alpha(&self) -> Result<f64> {
        self.interaction.alpha().ok_or_else(|| {
            VfpError::InvalidParameter(
                "the scalar mean-field map needs a quadratic interaction".into(),
            )
        })
    }

    fn symmetric_at(&self, m: f64) -> bool {
        m == 0.0 && self.potential.is_even() && self.interaction.is_even()
    }
}

/// Gibbs density `exp(−W/λ)` for a polynomial `W`, shifted by `min W` so the
/// peak weight is 1 whatever the temperature.
pub(crate) struct Gibbs {
    w: Polynomial,
    lambda: f64,
    shift: f64,
    /// Expansion point for moments, the minimizer of `W` (zero for even `W`).
    center: f64,
}

pub(crate) struct GibbsMoments {
    /// Normalized moments about `center`, index = order.
    pub centered: Vec<f64>,
    pub center: f64,
    /// `∫ exp(−(W − shift)/λ)`.
    pub mass: f64,
}

impl GibbsMoments {
    pub fn mean(&self) -> f64 {
        self.center + self.centered[1]
    }

    pub fn variance(&self) -> f64 {
        self.centered[2] - self.centered[1] * self.centered[1]
    }

    /// Raw moments `M_0..M_order`.
    pub fn raw(&self) -> Vec<f64> {
        let c = self.center;
        (0..self.centered.len())
            .map(|k| {
                (0..=k)
                    .map(|j| binomial(k, j) * c.powi((k - j) as i32) * self.centered[j])
                    .sum()
            })
            .collect()
    }
}

impl Gibbs {
    pub(crate) fn new(w: Polynomial, lambda: f64) -> Result<Self> {
        let (xmin, wmin) = w.global_min()?.ok_or_else(|| {
            VfpError::DivergentIntegrand("effective potential is unbounded below".into())
        })?;
        let center = if w.is_even() { 0.0 } else { xmin };
        Ok(Self {
            w,
            lambda,
            shift: wmin,
            center,
        })
    }

    #[inline]
    pub(crate) fn weight(&self, x: f64) -> f64 {
        (-(self.w.eval(x) - self.shift) / self.lambda).exp()
    }

    pub(crate) fn moments(&self, order: usize, spec: &QuadratureSpec) -> Result<GibbsMoments> {
        let c = self.center;
        let v = integrate_line_vec(
            |x, out: &mut [f64]| {
                let w = self.weight(x);
                let d = x - c;
                let mut acc = w;
                for o in out.iter_mut() {
                    *o = acc;
                    acc *= d;
                }
            },
            order + 1,
            spec,
        )?;
        let mass = v[0];
        Ok(GibbsMoments {
            centered: v.iter().map(|x| x / mass).collect(),
            center: c,
            mass,
        })
    }
}

/// Position-space stationary density on a uniform grid, with its moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryMeasure {
    pub lambda: f64,
    pub mean: f64,
    /// Raw moments, index = order, `moments[0] = 1`.
    pub moments: Vec<f64>,
    pub nodes: Vec<f64>,
    pub density: Vec<f64>,
    pub symmetric: bool,
    /// `W` with density `∝ exp(−W/λ)`.
    pub effective_potential: Polynomial,
    energy_shift: f64,
    mass: f64,
}

impl StationaryMeasure {
    pub(crate) fn from_effective(
        w: Polynomial,
        lambda: f64,
        moment_order: usize,
        nodes: usize,
        symmetric: bool,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        if nodes < 3 {
            return Err(VfpError::InvalidParameter(format!(
                "grid needs at least 3 nodes, got {nodes}"
            )));
        }
        let gibbs = Gibbs::new(w, lambda)?;
        let mom = gibbs.moments(moment_order, spec)?;
        // grid spans the window where the weight itself is non-negligible
        let r = truncation_radius(
            &|x: f64, out: &mut [f64]| out[0] = gibbs.weight(x),
            1,
            spec,
            true,
        )? / spec.truncation_safety;
        let denom = (nodes - 1) as f64;
        let grid: Vec<f64> = (0..nodes)
            .map(|i| r * (2 * i as i64 - (nodes as i64 - 1)) as f64 / denom)
            .collect();
        let density = grid.iter().map(|&x| gibbs.weight(x) / mom.mass).collect();
        let mut moments = mom.raw();
        let mut mean = mom.mean();
        if symmetric {
            mean = 0.0;
            moments.iter_mut().skip(1).step_by(2).for_each(|m| *m = 0.0);
        }
        Ok(Self {
            lambda,
            mean,
            moments,
            nodes: grid,
            density,
            symmetric,
            effective_potential: gibbs.w,
            energy_shift: gibbs.shift,
            mass: mom.mass,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    pub fn variance(&self) -> f64 {
        self.moments[2] - self.mean * self.mean
    }

    /// Trapezoid integral of the grid density.
    pub fn trapezoid_mass(&self) -> f64 {
        let n = self.density.len();
        let inner: f64 = self.density[1..n - 1].iter().sum();
        self.spacing() * (inner + 0.5 * (self.density[0] + self.density[n - 1]))
    }

    /// Exact density at any point.
    pub fn density_at(&self, x: f64) -> f64 {
        (-(self.effective_potential.eval(x) - self.energy_shift) / self.lambda).exp() / self.mass
    }

    /// `∫ (x − center)^order ρ̂ dx` by quadrature.
    pub fn centered_moment(&self, center: f64, order: u32, spec: &QuadratureSpec) -> Result<f64> {
        let (v, _) = integrate_line_vec_windowed(
            |x, out: &mut [f64]| {
                let w = self.density_at(x);
                out[0] = w;
                out[1] = w * (x - center).powi(order as i32);
            },
            2,
            spec,
        )?;
        Ok(v[1] / v[0])
    }

    /// Cumulative distribution function, integrated from the left edge of the grid.
    pub fn cdf(&self, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        let lo = self.nodes[0];
        let hi = *self.nodes.last().expect("non-empty grid");
        if x <= lo {
            return Ok(0.0);
        }
        if x >= hi {
            return Ok(1.0);
        }
        integrate_interval(|t| self.density_at(t), lo, x, spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub m: f64,
    pub stability: Stability,
    /// `|Φ(m) − m|`.
    pub residual: f64,
    /// `Φ'(m)`.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    pub lambda: f64,
    /// Sorted ascending.
    pub points: Vec<FixedPoint>,
}

impl FixedPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.m).collect()
    }

    /// Largest fixed point.
    pub fn rightmost(&self) -> Option<&FixedPoint> {
        self.points.last()
    }
}

fn gibbs_for_mean(prob: &SelfConsistencyProblem, m: f64) -> Result<Gibbs> {
    let alpha = prob.alpha()?;
    Gibbs::new(effective_potential(&prob.potential, alpha, m), prob.lambda)
}

/// `Φ_λ(m)`, the mean of `exp(−W_m/λ)`.
pub fn mean_field_map(prob: &SelfConsistencyProblem, m: f64) -> Result<f64> {
    Ok(gibbs_for_mean(prob, m)?
        .moments(1, &prob.quadrature)?
        .mean())
}

/// `Φ_λ'(m) = (α/λ) Var_{μ_m}(x)`.
pub fn map_derivative(prob: &SelfConsistencyProblem, m: f64) -> Result<f64> {
    let alpha = prob.alpha()?;
    let mom = gibbs_for_mean(prob, m)?.moments(2, &prob.quadrature)?;
    Ok(alpha / prob.lambda * mom.variance())
}

/// `(Φ(m), Φ'(m))` using one quadrature.
fn map_with_slope(
    prob: &SelfConsistencyProblem,
    m: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let alpha = prob.alpha()?;
    let mom = gibbs_for_mean(prob, m)?.moments(2, spec)?;
    Ok((mom.mean(), alpha / prob.lambda * mom.variance()))
}

/// Half-width of the fixed-point scan window, `2(max |critical point| + 1)`.
pub fn scan_bracket(v: &ConfiningPotential) -> Result<f64> {
    Ok(2.0 * (critical_points(v)?.extent() + 1.0))
}

/// Every solution of `Φ_λ(m) = m` in the scan window, sorted ascending.
pub fn find_fixed_points(prob: &SelfConsistencyProblem) -> Result<FixedPointSet> {
    prob.alpha()?;
    let crit = critical_points(&prob.potential)?;
    let bracket = 2.0 * (crit.extent() + 1.0);
    let tight = QuadratureSpec::tight();
    let g = |m: f64| map_with_slope(prob, m, &tight).map(|(phi, dphi)| (phi - m, dphi - 1.0));

    let denom = (SCAN_NODES - 1) as f64;
    let scan: Vec<f64> = (0..SCAN_NODES)
        .map(|i| bracket * (2 * i as i64 - (SCAN_NODES as i64 - 1)) as f64 / denom)
        .collect();
    let values: Vec<f64> = scan
        .par_iter()
        .map(|&m| mean_field_map(prob, m).map(|phi| phi - m))
        .collect::<Result<_>>()?;

    let mut roots = Vec::new();
    for i in 0..SCAN_NODES {
        if values[i] == 0.0 {
            roots.push(scan[i]);
        } else if i + 1 < SCAN_NODES
            && values[i + 1] != 0.0
            && values[i].signum() != values[i + 1].signum()
        {
            roots.push(newton_bisect(g, scan[i], scan[i + 1], 1e-14)?);
        }
    }
    // eccentric branches sit near the wells of V
    for a0 in crit.minima() {
        if let Some(r) = newton_from(&g, a0, bracket) {
            roots.push(r);
        }
    }

    let mut points = Vec::with_capacity(roots.len());
    for m in roots {
        let (phi, slope) = map_with_slope(prob, m, &tight)?;
        let residual = (phi - m).abs();
        if residual >= FIXED_POINT_RESIDUAL {
            return Err(VfpError::RootFindingFailure(format!(
                "fixed point {m} has residual {residual:e}"
            )));
        }
        points.push(FixedPoint {
            m,
            stability: if slope < 1.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            },
            residual,
            slope,
        });
    }
    points.sort_by(|a, b| a.m.total_cmp(&b.m));
    points.dedup_by(|a, b| (a.m - b.m).abs() < 1e-7);
    if prob.potential.is_even() {
        points = symmetrize(points);
    }
    if points.is_empty() {
        return Err(VfpError::BracketExhausted {
            lambda: prob.lambda,
            bracket,
        });
    }
    Ok(FixedPointSet {
        lambda: prob.lambda,
        points,
    })
}

/// Exact mirror symmetry for even `V`: `Φ(0) = 0` and `Φ(−m) = −Φ(m)`.
fn symmetrize(points: Vec<FixedPoint>) -> Vec<FixedPoint> {
    let mut right: Vec<FixedPoint> = points.iter().copied().filter(|p| p.m > 1e-7).collect();
    if right.is_empty() {
        right = points
            .iter()
            .map(|p| FixedPoint { m: p.m.abs(), ..*p })
            .filter(|p| p.m > 1e-7)
            .collect();
    }
    let center = points
        .iter()
        .copied()
        .find(|p| p.m.abs() <= 1e-7)
        .map(|p| FixedPoint {
            m: 0.0,
            residual: 0.0,
            ..p
        });
    let mut out: Vec<FixedPoint> = right
        .iter()
        .rev()
        .map(|p| FixedPoint { m: -p.m, ..*p })
        .collect();
    out.extend(center);
    out.extend(right);
    out
}

fn newton_from<G>(g: &G, seed: f64, bracket: f64) -> Option<f64>
where
    G: Fn(f64) -> Result<(f64, f64)>,
{
    let mut m = seed;
    for _ in 0..60 {
        let (v, dv) = g(m).ok()?;
        if dv == 0.0 || !dv.is_finite() {
            return None;
        }
        let step = v / dv;
        m -= step;
        if !m.is_finite() || m.abs() > bracket {
            return None;
        }
        if step.abs() < 1e-14 * (1.0 + m.abs()) {
            return Some(m);
        }
    }
    None
}

/// Gibbs density for trial mean `m` on a uniform grid of [`DEFAULT_GRID_NODES`].
pub fn stationary_density(prob: &SelfConsistencyProblem, m: f64) -> Result<StationaryMeasure> {
    stationary_density_on(prob, m, DEFAULT_GRID_NODES)
}

/// Gibbs density for trial mean `m` on a uniform grid with `nodes` points.
pub fn stationary_density_on(
    prob: &SelfConsistencyProblem,
    m: f64,
    nodes: usize,
) -> Result<StationaryMeasure> {
    let alpha = prob.alpha()?;
    StationaryMeasure::from_effective(
        effective_potential(&prob.potential, alpha, m),
        prob.lambda,
        moment_order(&prob.interaction),
        nodes,
        prob.symmetric_at(m),
        &prob.quadrature,
    )
}

fn moment_order(psi: &InteractionPotential) -> usize {
    (2 * psi.half_degree()).max(4)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSeed {
    /// Moments of a Gaussian with variance `λ` centered here.
    Gaussian { center: f64 },
    /// Raw moments `M_1..M_{2n}`.
    Moments(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    /// `θ` in `x ← (1 − θ)x + θF(x)`.
    pub damping: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: MomentSeed,
    pub grid_nodes: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            max_iter: 500,
            tol: 1e-10,
            seed: MomentSeed::Gaussian { center: 0.0 },
            grid_nodes: DEFAULT_GRID_NODES,
        }
    }
}

/// Raw moments `M_0..M_order` of `N(center, var)`.
fn gaussian_raw_moments(center: f64, var: f64, order: usize) -> Vec<f64> {
    let sd = var.sqrt();
    // E[Z^j]: (j-1)!! for even j
    let mut z = vec![0.0; order + 1];
    z[0] = 1.0;
    for j in (2..=order).step_by(2) {
        z[j] = z[j - 2] * (j - 1) as f64;
    }
    (0..=order)
        .map(|k| {
            (0..=k)
                .map(|j| binomial(k, j) * center.powi((k - j) as i32) * sd.powi(j as i32) * z[j])
                .sum()
        })
        .collect()
}

/// `(ψ∗ρ)(q) = Σ_k g_k Σ_j C(k,j) q^j (−1)^{k−j} M_{k−j}` from raw moments `M_0..`.
pub fn convolution_polynomial(g: &Polynomial, raw_moments: &[f64]) -> Polynomial {
    let deg = g.degree().unwrap_or(0);
    let mut c = vec![0.0; deg + 1];
    for k in 0..=deg {
        let gk = g.coeff(k);
        if gk == 0.0 {
            continue;
        }
        for j in 0..=k {
            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            c[j] += gk * binomial(k, j) * sign * raw_moments[k - j];
        }
    }
    Polynomial::new(c)
}

/// Damped Picard iteration on the raw-moment vector for a general even-polynomial interaction.
pub fn solve_general_interaction(
    prob: &SelfConsistencyProblem,
    opts: &PicardOptions,
) -> Result<StationaryMeasure> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(VfpError::InvalidParameter(format!(
            "damping must lie in (0, 1], got {}",
            opts.damping
        )));
    }
    let g = prob.interaction.as_polynomial();
    let order = g.degree().unwrap_or(0).max(1);
    let mut x: Vec<f64> = match &opts.seed {
        MomentSeed::Gaussian { center } => gaussian_raw_moments(*center, prob.lambda, order),
        MomentSeed::Moments(m) => {
            if m.len() != order {
                return Err(VfpError::InvalidParameter(format!(
                    "expected {order} seed moments, got {}",
                    m.len()
                )));
            }
            std::iter::once(1.0).chain(m.iter().copied()).collect()
        }
    };
    let effective = |moments: &[f64]| {
        prob.potential
            .polynomial()
            .add(&convolution_polynomial(&g, moments))
    };

    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let next = Gibbs::new(effective(&x), prob.lambda)?
            .moments(order, &prob.quadrature)?
            .raw();
        residual = next
            .iter()
            .zip(&x)
            .skip(1)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual < opts.tol {
            let symmetric =
                prob.potential.is_even() && x.iter().skip(1).step_by(2).all(|&m| m == 0.0);
            return StationaryMeasure::from_effective(
                effective(&next),
                prob.lambda,
                moment_order(&prob.interaction),
                opts.grid_nodes,
                symmetric,
                &prob.quadrature,
            );
        }
        let theta = opts.damping;
        for (xi, ni) in x.iter_mut().zip(&next).skip(1) {
            *xi = (1.0 - theta) * *xi + theta * ni;
        }
    }
    Err(VfpError::NoConvergence {
        iterations: opts.max_iter,
        residual,
    })
}
