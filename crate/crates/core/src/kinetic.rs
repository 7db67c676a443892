//! Phase-space lift and kinetic stationarity diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VfpError};
use crate::model::{well_depth_margin, ConfiningPotential, InteractionPotential};
use crate::quad::QuadratureSpec;
use crate::selfcons::{convolution_polynomial, StationaryMeasure};

/// Fewest nodes per direction accepted by [`stationarity_residual`].
pub const MIN_RESIDUAL_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParameters {
    pub mass: f64,
    pub friction: f64,
    pub boltzmann: f64,
    pub temperature: f64,
    pub length: f64,
}

/// `(λ, τ)` with `τ = m/γ` and `λ = kTτ²/(mL²)`.
pub fn nondimensionalize(p: &PhysicalParameters) -> Result<(f64, f64)> {
    let named = [
        ("mass", p.mass),
        ("friction", p.friction),
        ("boltzmann", p.boltzmann),
        ("temperature", p.temperature),
        ("length", p.length),
    ];
    if let Some((name, value)) = named.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(VfpError::InvalidParameter(format!(
            "{name} must be positive, got {value}"
        )));
    }
    let tau = p.mass / p.friction;
    let lambda = p.boltzmann * p.temperature * tau * tau / (p.mass * p.length * p.length);
    Ok((lambda, tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub nodes: usize,
    /// Half-width in units of `√λ`.
    pub half_width: f64,
}

impl Default for MomentumGrid {
    fn default() -> Self {
        Self {
            nodes: 128,
            half_width: 8.0,
        }
    }
}

/// Tensor-grid density `ρ(q, p)`, stored row-major with `q` as the row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceMeasure {
    pub lambda: f64,
    pub q_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub q_marginal: Vec<f64>,
    pub p_marginal: Vec<f64>,
    pub density: Vec<f64>,
}

fn symmetric_grid(half_width: f64, nodes: usize) -> Vec<f64> {
    let denom = (nodes - 1) as f64;
    (0..nodes)
        .map(|i| half_width * (2 * i as i64 - (nodes as i64 - 1)) as f64 / denom)
        .collect()
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

impl PhaseSpaceMeasure {
    pub fn q_len(&self) -> usize {
        self.q_grid.len()
    }

    pub fn p_len(&self) -> usize {
        self.p_grid.len()
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.density[i * self.p_grid.len() + j]
    }

    pub fn q_spacing(&self) -> f64 {
        self.q_grid[1] - self.q_grid[0]
    }

    pub fn p_spacing(&self) -> f64 {
        self.p_grid[1] - self.p_grid[0]
    }

    /// 2-D trapezoid integral of the density.
    pub fn total_mass(&self) -> f64 {
        let rows: Vec<f64> = (0..self.q_len())
            .map(|i| {
                trapezoid(
                    &self.density[i * self.p_len()..(i + 1) * self.p_len()],
                    self.p_spacing(),
                )
            })
            .collect();
        trapezoid(&rows, self.q_spacing())
    }

    /// Trapezoid variance of the momentum marginal.
    pub fn p_variance(&self) -> f64 {
        let w: Vec<f64> = self
            .p_grid
            .iter()
            .zip(&self.p_marginal)
            .map(|(p, g)| p * p * g)
            .collect();
        trapezoid(&w, self.p_spacing()) / trapezoid(&self.p_marginal, self.p_spacing())
    }

    /// Largest deviation from `q_marginal ⊗ p_marginal`.
    pub fn factorization_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, &a) in self.q_marginal.iter().enumerate() {
            for (j, &b) in self.p_marginal.iter().enumerate() {
                worst = worst.max((self.at(i, j) - a * b).abs());
            }
        }
        worst
    }

    /// Raw position moments `∫∫ q^k ρ`, `k = 0..=order`, by trapezoid.
    pub fn grid_moments(&self, order: usize) -> Vec<f64> {
        let np = self.p_len();
        let rows: Vec<f64> = (0..self.q_len())
            .map(|i| trapezoid(&self.density[i * np..(i + 1) * np], self.p_spacing()))
            .collect();
        (0..=order)
            .map(|k| {
                let w: Vec<f64> = self
                    .q_grid
                    .iter()
                    .zip(&rows)
                    .map(|(q, r)| q.powi(k as i32) * r)
                    .collect();
                trapezoid(&w, self.q_spacing())
            })
            .collect()
    }
}

/// `ρ̂(q) g_λ(p)` with `g_λ` the centered Gaussian of variance `λ`.
pub fn lift_to_phase_space(
    rho: &StationaryMeasure,
    grid: &MomentumGrid,
) -> Result<PhaseSpaceMeasure> {
    lift_with_momentum_variance(rho, grid, rho.lambda)
}

/// Like [`lift_to_phase_space`], with the momentum variance chosen freely (for non-stationary probes).
pub fn lift_with_momentum_variance(
    rho: &StationaryMeasure,
    grid: &MomentumGrid,
    p_variance: f64,
) -> Result<PhaseSpaceMeasure> {
    if grid.nodes < 3 || !(grid.half_width > 0.0) {
        return Err(VfpError::InvalidParameter(format!(
            "momentum grid needs at least 3 nodes and positive half-width, got {grid:?}"
        )));
    }
    if !(p_variance > 0.0) {
        return Err(VfpError::InvalidParameter(format!(
            "momentum variance must be positive, got {p_variance}"
        )));
    }
    let p_grid = symmetric_grid(grid.half_width * rho.lambda.sqrt(), grid.nodes);
    let norm = 1.0 / (2.0 * std::f64::consts::PI * p_variance).sqrt();
    let p_marginal: Vec<f64> = p_grid
        .iter()
        .map(|p| norm * (-p * p / (2.0 * p_variance)).exp())
        .collect();
    let density = rho
        .density
        .iter()
        .flat_map(|&a| p_marginal.iter().map(move |&b| a * b))
        .collect();
    Ok(PhaseSpaceMeasure {
        lambda: rho.lambda,
        q_grid: rho.nodes.clone(),
        p_grid,
        q_marginal: rho.density.clone(),
        p_marginal,
        density,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub l2: f64,
    pub linf: f64,
    pub q_spacing: f64,
    pub p_spacing: f64,
}

fn is_uniform(grid: &[f64]) -> bool {
    let h = grid[1] - grid[0];
    h > 0.0
        && grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
}

/// Central-difference residual of `−∂_q(ρp) + ∂_p(ρ(V' + ψ'∗ρ + p)) + λ∂²_pρ` on interior nodes.
///
/// The convolution uses the grid moments of `frozen` when given, else of `mu` itself.
pub fn stationarity_residual(
    mu: &PhaseSpaceMeasure,
    v: &ConfiningPotential,
    psi: &InteractionPotential,
    frozen: Option<&PhaseSpaceMeasure>,
) -> Result<Residual> {
    let (nq, np) = (mu.q_len(), mu.p_len());
    let min = MIN_RESIDUAL_NODES;
    if nq.min(np) < min {
        return Err(VfpError::GridTooCoarse {
            nodes: nq.min(np),
            min,
        });
    }
    if !is_uniform(&mu.q_grid) || !is_uniform(&mu.p_grid) {
        return Err(VfpError::InvalidParameter(
            "residual needs uniform grids".into(),
        ));
    }
    let g = psi.as_polynomial();
    let source = frozen.unwrap_or(mu);
    let order = g.degree().unwrap_or(0);
    let conv = convolution_polynomial(&g, &source.grid_moments(order)).derivative();
    let (hq, hp) = (mu.q_spacing(), mu.p_spacing());
    let lambda = mu.lambda;

    // per-row partial sums, reduced in row order so the result is thread-independent
    let rows: Vec<(f64, f64)> = (1..nq - 1)
        .into_par_iter()
        .map(|i| {
            let q = mu.q_grid[i];
            let force = v.force(q) + conv.eval(q);
            let (mut sq, mut mx) = (0.0f64, 0.0f64);
            for j in 1..np - 1 {
                let p = mu.p_grid[j];
                let transport = -p * (mu.at(i + 1, j) - mu.at(i - 1, j)) / (2.0 * hq);
                let flux = |jj: usize| mu.at(i, jj) * (force + mu.p_grid[jj]);
                let drift = (flux(j + 1) - flux(j - 1)) / (2.0 * hp);
                let diffusion =
                    lambda * (mu.at(i, j + 1) - 2.0 * mu.at(i, j) + mu.at(i, j - 1)) / (hp * hp);
                let r = transport + drift + diffusion;
                sq += r * r;
                mx = mx.max(r.abs());
            }
            (sq, mx)
        })
        .collect();
    let (sq, linf) = rows
        .iter()
        .fold((0.0, 0.0f64), |(s, m), &(a, b)| (s + a, m.max(b)));
    Ok(Residual {
        l2: (sq * hq * hp).sqrt(),
        linf,
        q_spacing: hq,
        p_spacing: hp,
    })
}

/// Observed convergence order between two residuals at spacings `h1 > h2`.
pub fn observed_order(coarse: &Residual, fine: &Residual) -> f64 {
    (coarse.l2 / fine.l2).ln() / (coarse.q_spacing / fine.q_spacing).ln()
}

/// `∫ |q − a0|^{2n} ρ̂(q) dq` by quadrature.
pub fn moment_concentration_check(rho: &StationaryMeasure, a0: f64, n: u32) -> Result<f64> {
    rho.centered_moment(a0, 2 * n, &QuadratureSpec::tight())
}

/// First-order small-temperature mean `a0 − V'''(a0)/(4V''(a0)(α + V''(a0)))·λ`.
pub fn asymptotic_mean(v: &ConfiningPotential, alpha: f64, a0: f64, lambda: f64) -> Result<f64> {
    let v2 = v.derivative_at(2, a0);
    let v3 = v.derivative_at(3, a0);
    if !(alpha + v2 > 0.0) {
        return Err(VfpError::ConditionViolated(format!(
            "alpha + V''(a0) = {} is not positive",
            alpha + v2
        )));
    }
    let margin = well_depth_margin(v, a0)?;
    if !(alpha > margin) {
        return Err(VfpError::ConditionViolated(format!(
            "alpha = {alpha} does not exceed the well-depth margin {margin}"
        )));
    }
    Ok(a0 - v3 / (4.0 * v2 * (alpha + v2)) * lambda)
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
