//! Interacting particle simulations of the kinetic and overdamped dynamics.
//!
//! Every Gaussian increment is a pure function of `(seed, particle, step)`:
//! each particle owns a ChaCha8 stream selected by its index, and each step
//! consumes a fixed number of words from it. Results therefore do not depend
//! on the thread count, and any stream can be re-created at any step.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VfpError};
use crate::model::{ConfiningPotential, InteractionPotential};
use crate::poly::Polynomial;
use crate::selfcons::convolution_polynomial;

/// Positions beyond this magnitude abort the run.
pub const BLOW_UP_THRESHOLD: f64 = 1e6;
/// Fewest particles per parallel task.
const PARALLEL_CHUNK: usize = 1024;
/// Stream index offset reserved for initial conditions.
const INIT_STREAM: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Kinetic,
    Overdamped,
}

/// How the mean-field force `(1/N) Σ_j ∇ψ(q_i − q_j)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionEvaluation {
    /// `O(N·n)` through empirical moments (pairwise when `d > 1` and `ψ` is not quadratic).
    #[default]
    Moments,
    /// Direct `O(N²)` pair sum.
    Pairwise,
}

/// Standard normals from one ChaCha8 stream by Box–Muller.
///
/// Normal number `k` always comes from the word pair starting at `4⌊k/2⌋`.
#[derive(Debug, Clone)]
struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    /// Stream positioned just before normal number `index`.
    fn at(seed: u64, stream: u64, index: u64) -> Self {
        let mut s = Self::new(seed, stream);
        s.rng.set_word_pos(u128::from(index / 2) * 4);
        if index % 2 == 1 {
            s.next();
        }
        s
    }

    #[inline]
    fn uniform(&mut self) -> f64 {
        // (0, 1): never zero, so the logarithm is finite
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * self.uniform()).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// Every particle at `x` in each coordinate.
    Point(f64),
    /// Independent `N(mean, sd²)` coordinates.
    Normal { mean: f64, sd: f64 },
}

/// `N` particles in `d` dimensions, coordinates stored particle-major.
#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    n: usize,
    d: usize,
    seed: u64,
    pub q: Vec<f64>,
    /// Present in kinetic mode.
    pub p: Option<Vec<f64>>,
    step: u64,
    time: f64,
    streams: Vec<NormalStream>,
}

impl ParticleEnsemble {
    /// Positions from `init`; kinetic ensembles start with Maxwellian momenta of variance `lambda`.
    pub fn new(
        n: usize,
        d: usize,
        mode: Mode,
        init: InitialCondition,
        lambda: f64,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(VfpError::InvalidParameter(format!(
                "need n >= 1 and d >= 1, got n = {n}, d = {d}"
            )));
        }
        if !(lambda >= 0.0) {
            return Err(VfpError::InvalidParameter(format!(
                "lambda must be non-negative, got {lambda}"
            )));
        }
        let mut q = Vec::with_capacity(n * d);
        let mut p = Vec::with_capacity(if mode == Mode::Kinetic { n * d } else { 0 });
        for i in 0..n {
            let mut init_rng = NormalStream::new(seed, INIT_STREAM | i as u64);
            for _ in 0..d {
                q.push(match init {
                    InitialCondition::Point(x) => x,
                    InitialCondition::Normal { mean, sd } => mean + sd * init_rng.next(),
                });
            }
            if mode == Mode::Kinetic {
                for _ in 0..d {
                    p.push(lambda.sqrt() * init_rng.next());
                }
            }
        }
        Self::from_state(q, (mode == Mode::Kinetic).then_some(p), d, seed)
    }

    /// Ensemble with explicit coordinates.
    pub fn from_state(q: Vec<f64>, p: Option<Vec<f64>>, d: usize, seed: u64) -> Result<Self> {
        if d == 0 || q.is_empty() || !q.len().is_multiple_of(d) {
            return Err(VfpError::InvalidParameter(
                "position array does not match the dimension".into(),
            ));
        }
        if p.as_ref().is_some_and(|p| p.len() != q.len()) {
            return Err(VfpError::InvalidParameter(
                "momentum and position arrays differ in length".into(),
            ));
        }
        if q.iter().chain(p.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(VfpError::InvalidParameter(
                "non-finite initial coordinate".into(),
            ));
        }
        let n = q.len() / d;
        Ok(Self {
            n,
            d,
            seed,
            q,
            p,
            step: 0,
            time: 0.0,
            streams: (0..n).map(|i| NormalStream::new(seed, i as u64)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Per-coordinate ensemble mean, summed in particle order.
    pub fn mean(&self) -> Vec<f64> {
        column_means(&self.q, self.d)
    }

    /// First-coordinate ensemble variance.
    pub fn variance(&self) -> f64 {
        coordinate_variance(&self.q, self.d)
    }

    pub fn momentum_variance(&self) -> Option<f64> {
        self.p.as_ref().map(|p| coordinate_variance(p, self.d))
    }

    /// Normal increment that particle `i` draws for coordinate `k` at step `step`.
    pub fn noise_at(&self, particle: usize, step: u64, k: usize) -> f64 {
        NormalStream::at(self.seed, particle as u64, step * self.d as u64 + k as u64).next()
    }
}

fn column_means(x: &[f64], d: usize) -> Vec<f64> {
    let n = (x.len() / d) as f64;
    let mut m = vec![0.0; d];
    for row in x.chunks_exact(d) {
        for (acc, v) in m.iter_mut().zip(row) {
            *acc += v;
        }
    }
    m.iter_mut().for_each(|v| *v /= n);
    m
}

fn coordinate_variance(x: &[f64], d: usize) -> f64 {
    let n = (x.len() / d) as f64;
    let mean = x.iter().step_by(d).sum::<f64>() / n;
    x.iter().step_by(d).map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

/// Gradient of `V` at one particle; radial `V(|x|)` when `d > 1`.
#[inline]
fn confining_gradient(v: &ConfiningPotential, x: &[f64], out: &mut [f64]) {
    if x.len() == 1 {
        out[0] = v.force(x[0]);
        return;
    }
    let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let scale = if r > 0.0 { v.force(r) / r } else { 0.0 };
    out.iter_mut().zip(x).for_each(|(o, a)| *o = scale * a);
}

/// Precomputed data for the mean-field force of one step.
enum MeanField {
    None,
    /// `α(q_i − mean)`.
    Linear {
        alpha: f64,
        mean: Vec<f64>,
    },
    /// `d/dq (ψ∗ρ_N)(q)` for `d = 1`.
    Convolution(Polynomial),
    /// `G'` for the pair sum.
    Pairwise(Polynomial),
}

fn mean_field(
    ens: &ParticleEnsemble,
    psi: &InteractionPotential,
    eval: InteractionEvaluation,
) -> MeanField {
    let g = psi.as_polynomial();
    if g.degree().is_none_or(|deg| deg < 2) {
        return MeanField::None;
    }
    if eval == InteractionEvaluation::Pairwise {
        return MeanField::Pairwise(g.derivative());
    }
    match psi.alpha() {
        Some(alpha) => MeanField::Linear {
            alpha,
            mean: ens.mean(),
        },
        None if ens.d == 1 => {
            let deg = g.degree().unwrap_or(0);
            let n = ens.n as f64;
            let mut moments = vec![0.0; deg + 1];
            for &x in &ens.q {
                let mut pow = 1.0;
                for m in moments.iter_mut() {
                    *m += pow;
                    pow *= x;
                }
            }
            moments.iter_mut().for_each(|m| *m /= n);
            MeanField::Convolution(convolution_polynomial(&g, &moments).derivative())
        }
        None => MeanField::Pairwise(g.derivative()),
    }
}

impl MeanField {
    #[inline]
    fn add_force(&self, i: usize, q: &[f64], d: usize, out: &mut [f64]) {
        match self {
            MeanField::None => {}
            MeanField::Linear { alpha, mean } => {
                for k in 0..d {
                    out[k] += alpha * (q[i * d + k] - mean[k]);
                }
            }
            MeanField::Convolution(c) => out[0] += c.eval(q[i]),
            MeanField::Pairwise(dg) => {
                let n = q.len() / d;
                let xi = &q[i * d..(i + 1) * d];
                let mut acc = vec![0.0; d];
                for xj in q.chunks_exact(d) {
                    if d == 1 {
                        acc[0] += dg.eval(xi[0] - xj[0]);
                        continue;
                    }
                    let r = xi
                        .iter()
                        .zip(xj)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    if r > 0.0 {
                        let s = dg.eval(r) / r;
                        for k in 0..d {
                            acc[k] += s * (xi[k] - xj[k]);
                        }
                    }
                }
                for k in 0..d {
                    out[k] += acc[k] / n as f64;
                }
            }
        }
    }
}

/// Interaction force on every particle, for testing the mean-field identities.
pub fn interaction_forces(
    ens: &ParticleEnsemble,
    psi: &InteractionPotential,
    eval: InteractionEvaluation,
) -> Vec<f64> {
    let field = mean_field(ens, psi, eval);
    let d = ens.d;
    let mut out = vec![0.0; ens.q.len()];
    for (i, f) in out.chunks_exact_mut(d).enumerate() {
        field.add_force(i, &ens.q, d, f);
    }
    out
}

fn check_finite(ens: &ParticleEnsemble) -> Result<()> {
    let bad = ens
        .q
        .iter()
        .position(|x| !(x.abs() <= BLOW_UP_THRESHOLD))
        .or_else(|| {
            ens.p
                .as_ref()
                .and_then(|p| p.iter().position(|x| !x.is_finite()))
        });
    match bad {
        Some(idx) => Err(VfpError::BlowUp {
            step: ens.step,
            particle: idx / ens.d,
            value: ens.q[idx],
        }),
        None => Ok(()),
    }
}

/// Total force `∇V + ∇ψ∗μ_N` on particle `i`, written to `out`.
#[inline]
fn total_force(
    v: &ConfiningPotential,
    field: &MeanField,
    q: &[f64],
    i: usize,
    d: usize,
    out: &mut [f64],
) {
    confining_gradient(v, &q[i * d..(i + 1) * d], out);
    field.add_force(i, q, d, out);
}

/// Applies `update(i, force, q_i, p_i, rng)` to every particle, in parallel blocks.
fn advance<U>(ens: &mut ParticleEnsemble, v: &ConfiningPotential, field: &MeanField, update: U)
where
    U: Fn(&[f64], &mut [f64], Option<&mut [f64]>, &mut NormalStream) + Sync,
{
    let d = ens.d;
    let q_old = ens.q.clone();
    let kernel = |i: usize, q: &mut [f64], p: Option<&mut [f64]>, rng: &mut NormalStream| {
        let mut stack = [0.0f64; 4];
        let mut heap;
        let force: &mut [f64] = if d <= stack.len() {
            &mut stack[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        total_force(v, field, &q_old, i, d, force);
        update(force, q, p, rng);
    };
    let block = PARALLEL_CHUNK;
    match ens.p.as_mut() {
        Some(p) => ens
            .q
            .par_chunks_mut(block * d)
            .zip(p.par_chunks_mut(block * d))
            .zip(ens.streams.par_chunks_mut(block))
            .enumerate()
            .for_each(|(b, ((qs, ps), rs))| {
                for (j, ((q, p), rng)) in qs.chunks_mut(d).zip(ps.chunks_mut(d)).zip(rs).enumerate()
                {
                    kernel(b * block + j, q, Some(p), rng);
                }
            }),
        None => ens
            .q
            .par_chunks_mut(block * d)
            .zip(ens.streams.par_chunks_mut(block))
            .enumerate()
            .for_each(|(b, (qs, rs))| {
                for (j, (q, rng)) in qs.chunks_mut(d).zip(rs).enumerate() {
                    kernel(b * block + j, q, None, rng);
                }
            }),
    }
}

/// One Euler–Maruyama step of `dq = p dt`, `dp = −(∇V + ∇ψ∗μ_N + p) dt + √(2λ) dW`.
pub fn step_kinetic(
    ens: &mut ParticleEnsemble,
    v: &ConfiningPotential,
    psi: &InteractionPotential,
    lambda: f64,
    dt: f64,
    eval: InteractionEvaluation,
) -> Result<()> {
    if ens.p.is_none() {
        return Err(VfpError::InvalidParameter(
            "kinetic step needs momenta".into(),
        ));
    }
    let field = mean_field(ens, psi, eval);
    let noise = (2.0 * lambda * dt).sqrt();
    advance(ens, v, &field, |force, q, p, rng| {
        let p = p.expect("kinetic ensemble");
        for k in 0..q.len() {
            let p0 = p[k];
            q[k] += p0 * dt;
            p[k] = p0 - (force[k] + p0) * dt + noise * rng.next();
        }
    });
    ens.step += 1;
    ens.time = ens.step as f64 * dt;
    check_finite(ens)
}

/// One Euler–Maruyama step of `dx = −(∇V + ∇ψ∗μ_N) dt + √(2λ) dW`.
pub fn step_overdamped(
    ens: &mut ParticleEnsemble,
    v: &ConfiningPotential,
    psi: &InteractionPotential,
    lambda: f64,
    dt: f64,
    eval: InteractionEvaluation,
) -> Result<()> {
    let field = mean_field(ens, psi, eval);
    let noise = (2.0 * lambda * dt).sqrt();
    advance(ens, v, &field, |force, q, _, rng| {
        for k in 0..q.len() {
            q[k] -= force[k] * dt;
            q[k] += noise * rng.next();
        }
    });
    ens.step += 1;
    ens.time = ens.step as f64 * dt;
    check_finite(ens)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub steps: u64,
    pub burn_in_steps: u64,
    pub mode: Mode,
    pub lambda: f64,
    pub seed: u64,
    /// Statistics are sampled every this many steps after burn-in.
    #[serde(default = "default_record_every")]
    pub record_every: u64,
    #[serde(default)]
    pub interaction_evaluation: InteractionEvaluation,
}

fn default_record_every() -> u64 {
    100
}

impl SimConfig {
    /// Burn-in defaults to half the run.
    pub fn new(dt: f64, steps: u64, mode: Mode, lambda: f64, seed: u64) -> Self {
        Self {
            dt,
            steps,
            burn_in_steps: steps / 2,
            mode,
            lambda,
            seed,
            record_every: default_record_every(),
            interaction_evaluation: InteractionEvaluation::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(VfpError::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.burn_in_steps >= self.steps {
            return Err(VfpError::InvalidParameter(format!(
                "burn-in ({}) must be shorter than the run ({})",
                self.burn_in_steps, self.steps
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(VfpError::InvalidParameter(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        if self.record_every == 0 {
            return Err(VfpError::InvalidParameter(
                "record_every must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observers {
    pub histogram_range: (f64, f64),
    pub histogram_bins: usize,
    /// Centered moments of orders `2, 4, …, 2·max_half_order`.
    pub max_half_order: usize,
    /// Extra expansion point for `|q − a0|^{2k}` moments.
    pub anchor: Option<f64>,
}

impl Default for Observers {
    fn default() -> Self {
        Self {
            histogram_range: (-3.0, 3.0),
            histogram_bins: 1200,
            max_half_order: 2,
            anchor: None,
        }
    }
}

/// Counts of the first coordinate, pooled over all sampled steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
}

impl Histogram {
    fn new(lo: f64, hi: f64, bins: usize) -> Self {
        let width = (hi - lo) / bins as f64;
        Self {
            edges: (0..=bins).map(|i| lo + i as f64 * width).collect(),
            counts: vec![0; bins],
            below: 0,
            above: 0,
        }
    }

    #[inline]
    fn add(&mut self, x: f64) {
        let lo = self.edges[0];
        let hi = *self.edges.last().expect("edges");
        if x < lo {
            self.below += 1;
        } else if x >= hi {
            self.above += 1;
        } else {
            let bins = self.counts.len();
            let k = (((x - lo) / (hi - lo)) * bins as f64) as usize;
            self.counts[k.min(bins - 1)] += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.below + self.above + self.counts.iter().sum::<u64>()
    }

    /// Empirical CDF at every edge.
    pub fn cdf(&self) -> Vec<f64> {
        let total = self.total() as f64;
        let mut acc = self.below;
        let mut out = Vec::with_capacity(self.edges.len());
        out.push(acc as f64 / total);
        for &c in &self.counts {
            acc += c;
            out.push(acc as f64 / total);
        }
        out
    }

    /// Normalized density per bin.
    pub fn density(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(&c, e)| c as f64 / (total * (e[1] - e[0])))
            .collect()
    }
}

/// Largest gap between the histogram CDF and `cdf` over the bin edges.
pub fn ks_against_cdf<F: Fn(f64) -> Result<f64>>(h: &Histogram, cdf: F) -> Result<f64> {
    let mut worst = 0.0f64;
    for (edge, emp) in h.edges.iter().zip(h.cdf()) {
        worst = worst.max((emp - cdf(*edge)?).abs());
    }
    Ok(worst)
}

/// Largest gap between two histogram CDFs on identical edges.
pub fn ks_between(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.edges != b.edges {
        return Err(VfpError::InvalidParameter(
            "histograms have different edges".into(),
        ));
    }
    Ok(a.cdf()
        .iter()
        .zip(b.cdf())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub step: u64,
    pub time: f64,
    pub mean: f64,
    pub variance: f64,
    pub momentum_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub particles: usize,
    pub dimension: usize,
    /// Number of sampled snapshots after burn-in.
    pub samples: u64,
    pub series: Vec<SeriesPoint>,
    /// Time averages of the ensemble statistics over the sampled snapshots.
    pub mean: f64,
    pub variance: f64,
    pub momentum_variance: Option<f64>,
    /// `sqrt(variance / N)`: standard error of one snapshot's ensemble mean.
    pub standard_error: f64,
    /// `(order, value)` centered about each snapshot's ensemble mean.
    pub centered_moments: Vec<(u32, f64)>,
    /// `(order, value)` centered about the anchor.
    pub anchored_moments: Vec<(u32, f64)>,
    pub histogram: Histogram,
    pub warnings: Vec<String>,
}

/// Rough explicit-step stiffness `max |V''| + |α|` over the region the ensemble starts in.
fn stiffness(ens: &ParticleEnsemble, v: &ConfiningPotential, psi: &InteractionPotential) -> f64 {
    let reach = ens.q.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let v2 = v.polynomial().nth_derivative(2);
    let samples = 64;
    let vmax = (0..=samples)
        .map(|i| {
            v2.eval(-reach + 2.0 * reach * i as f64 / samples as f64)
                .abs()
        })
        .fold(0.0, f64::max);
    vmax + psi.alpha().map_or(0.0, f64::abs)
}

/// Integrates `cfg.steps` steps, sampling statistics after burn-in.
pub fn run(
    ens: &mut ParticleEnsemble,
    cfg: &SimConfig,
    v: &ConfiningPotential,
    psi: &InteractionPotential,
    observers: &Observers,
) -> Result<SimReport> {
    cfg.validate()?;
    if (cfg.mode == Mode::Kinetic) != ens.p.is_some() {
        return Err(VfpError::InvalidParameter(
            "ensemble does not match the simulation mode".into(),
        ));
    }
    let (lo, hi) = observers.histogram_range;
    if !(hi > lo) || observers.histogram_bins == 0 {
        return Err(VfpError::InvalidParameter(
            "histogram needs hi > lo and at least one bin".into(),
        ));
    }
    let mut warnings = Vec::new();
    let stiff = stiffness(ens, v, psi);
    if cfg.dt * stiff >= 0.5 {
        warnings.push(format!(
            "dt * stiffness = {:.3} >= 0.5; the explicit scheme may be unstable",
            cfg.dt * stiff
        ));
    }

    let orders: Vec<u32> = (1..=observers.max_half_order as u32)
        .map(|k| 2 * k)
        .collect();
    let mut hist = Histogram::new(lo, hi, observers.histogram_bins);
    let mut series = Vec::new();
    let (mut sum_mean, mut sum_var, mut sum_pvar) = (0.0, 0.0, 0.0);
    let mut sum_centered = vec![0.0; orders.len()];
    let mut sum_anchored = vec![0.0; orders.len()];
    let mut samples = 0u64;
    let d = ens.d;
    let n = ens.n as f64;

    for _ in 0..cfg.steps {
        match cfg.mode {
            Mode::Kinetic => {
                step_kinetic(ens, v, psi, cfg.lambda, cfg.dt, cfg.interaction_evaluation)?
            }
            Mode::Overdamped => {
                step_overdamped(ens, v, psi, cfg.lambda, cfg.dt, cfg.interaction_evaluation)?
            }
        }
        let step = ens.step;
        if step <= cfg.burn_in_steps || !(step - cfg.burn_in_steps).is_multiple_of(cfg.record_every)
        {
            continue;
        }
        let mean = ens.q.iter().step_by(d).sum::<f64>() / n;
        let mut var = 0.0;
        let mut centered = vec![0.0; orders.len()];
        let mut anchored = vec![0.0; orders.len()];
        for &x in ens.q.iter().step_by(d) {
            hist.add(x);
            let dx = x - mean;
            var += dx * dx;
            for (acc, &k) in centered.iter_mut().zip(&orders) {
                *acc += dx.powi(k as i32);
            }
            if let Some(a) = observers.anchor {
                for (acc, &k) in anchored.iter_mut().zip(&orders) {
                    *acc += (x - a).powi(k as i32);
                }
            }
        }
        var /= n;
        let pvar = ens.momentum_variance();
        samples += 1;
        sum_mean += mean;
        sum_var += var;
        sum_pvar += pvar.unwrap_or(0.0);
        sum_centered
            .iter_mut()
            .zip(&centered)
            .for_each(|(s, c)| *s += c / n);
        sum_anchored
            .iter_mut()
            .zip(&anchored)
            .for_each(|(s, c)| *s += c / n);
        series.push(SeriesPoint {
            step,
            time: ens.time,
            mean,
            variance: var,
            momentum_variance: pvar,
        });
    }

    let s = samples as f64;
    let variance = sum_var / s;
    Ok(SimReport {
        config: cfg.clone(),
        particles: ens.n,
        dimension: d,
        samples,
        series,
        mean: sum_mean / s,
        variance,
        momentum_variance: ens.p.as_ref().map(|_| sum_pvar / s),
        standard_error: (variance / n).sqrt(),
        centered_moments: orders
            .iter()
            .zip(&sum_centered)
            .map(|(&k, v)| (k, v / s))
            .collect(),
        anchored_moments: match observers.anchor {
            Some(_) => orders
                .iter()
                .zip(&sum_anchored)
                .map(|(&k, v)| (k, v / s))
                .collect(),
            None => Vec::new(),
        },
        histogram: hist,
        warnings,
    })
}
