//! One function per subcommand. Each writes its tables into the output directory
//! and prints a short summary to stdout.

use serde::Serialize;
use vfp_core::kinetic::{fitted_slope, lift_with_momentum_variance, observed_order};
use vfp_core::particles::{ks_against_cdf, ks_between, Histogram};
use vfp_core::selfcons::{stationary_density_on, MomentSeed};
use vfp_core::{
    asymptotic_mean, critical_points, find_fixed_points, lambda_c_report,
    moment_concentration_check, run, solve_general_interaction, stationarity_residual,
    stationary_density, sweep_branches, validate_assumptions, FixedPointSet, Mode, MomentumGrid,
    Observers, ParticleEnsemble, PicardOptions, SelfConsistencyProblem, SimConfig, SimReport,
    Stability, StationaryMeasure, VfpError,
};

use crate::config::{AsymptoticsBlock, ResidualBlock, RunConfig, SimBlock};
use crate::error::CliError;
use crate::output::{float, opt_float, OutputDir, Table};
use crate::svg::{Plot, Series};

const STABLE_COLOR: &str = "#1f4e9c";
const UNSTABLE_COLOR: &str = "#c0392b";
/// Picard fixed points closer than this are reported once.
const PICARD_DEDUP: f64 = 1e-6;
/// Largest jump in `m`, as a fraction of the plotted range, that still continues a branch.
const BRANCH_JOIN: f64 = 0.1;

pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let v = cfg.potential()?;
    let psi = cfg.interaction()?;
    let report = validate_assumptions(&v, &psi);
    println!("{:<11} {:<6} detail", "assumption", "status");
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        println!("{:<11} {status:<6} {}", c.assumption.to_string(), c.detail);
    }
    if let Some((c4, c2)) = report.quartic_bound {
        println!("quartic lower bound: V(x) >= {c4} x^4 - {c2} x^2");
    }
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<String> = report.failed().map(|c| c.assumption.to_string()).collect();
        Err(CliError::Domain(format!(
            "assumptions violated: {}",
            failed.join(", ")
        )))
    }
}

/// Fixed points of a general even-polynomial interaction, by Picard iteration
/// seeded at every local minimum of `V` and at zero. The zero seed keeps an even
/// problem symmetric, so these are not classified by stability.
fn picard_fixed_points(
    prob: &SelfConsistencyProblem,
    nodes: usize,
) -> Result<Vec<(StationaryMeasure, f64)>, CliError> {
    let mut seeds: Vec<f64> = critical_points(&prob.potential)?.minima().collect();
    seeds.push(0.0);
    let mut found: Vec<(StationaryMeasure, f64)> = Vec::new();
    for center in seeds {
        let opts = PicardOptions {
            seed: MomentSeed::Gaussian { center },
            grid_nodes: nodes,
            ..PicardOptions::default()
        };
        let mu = solve_general_interaction(prob, &opts)?;
        if found
            .iter()
            .any(|(f, _)| (f.mean - mu.mean).abs() < PICARD_DEDUP)
        {
            continue;
        }
        let residual = picard_residual(prob, &mu)?;
        found.push((mu, residual));
    }
    found.sort_by(|a, b| a.0.mean.total_cmp(&b.0.mean));
    Ok(found)
}

/// Largest raw-moment change under one undamped Picard step.
fn picard_residual(prob: &SelfConsistencyProblem, mu: &StationaryMeasure) -> Result<f64, CliError> {
    let order = prob
        .interaction
        .as_polynomial()
        .degree()
        .unwrap_or(0)
        .max(1);
    let current = mu.moments[1..=order].to_vec();
    let opts = PicardOptions {
        damping: 1.0,
        max_iter: 1,
        tol: f64::INFINITY,
        seed: MomentSeed::Moments(current.clone()),
        grid_nodes: mu.nodes.len(),
    };
    let next = solve_general_interaction(prob, &opts)?;
    Ok(next.moments[1..=order]
        .iter()
        .zip(&current)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

pub fn fixed_points(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let mut table = Table::new(&["lambda", "m", "stability", "residual"]);
    for lambda in cfg.lambdas()? {
        let prob = cfg.problem(lambda)?;
        if cfg.alpha().is_some() {
            let set = find_fixed_points(&prob)?;
            for fp in &set.points {
                table.push(vec![
                    float(lambda),
                    float(fp.m),
                    fp.stability.as_str().into(),
                    float(fp.residual),
                ]);
            }
            println!(
                "lambda = {lambda}: {} fixed point(s) {:?}",
                set.len(),
                set.means()
            );
        } else {
            let found = picard_fixed_points(&prob, PicardOptions::default().grid_nodes)?;
            for (mu, residual) in &found {
                table.push(vec![
                    float(lambda),
                    float(mu.mean),
                    "unclassified".into(),
                    float(*residual),
                ]);
            }
            let means: Vec<f64> = found.iter().map(|(mu, _)| mu.mean).collect();
            println!(
                "lambda = {lambda}: {} self-consistent measure(s) {means:?}",
                found.len()
            );
        }
    }
    let path = out.write_table("fixed_points.csv", &table)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn lambda_c(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let v = cfg.potential()?;
    let alphas = match &cfg.lambda_c {
        Some(block) if block.alphas.is_empty() => {
            return Err(CliError::Config("lambda_c.alphas is empty".into()))
        }
        Some(block) => block.alphas.clone(),
        None => vec![cfg.require_alpha("lambda-c")?],
    };
    if !cfg.test_only {
        cfg.problem(1.0)?;
    }
    let mut table = Table::new(&["alpha", "z_implicit", "lambda_oracle", "ratio", "status"]);
    for alpha in alphas {
        match lambda_c_report(&v, alpha) {
            Ok(r) => {
                println!(
                    "alpha = {alpha}: z_implicit = {:.10}, lambda_oracle = {:.10}, ratio = {:.6}",
                    r.z_implicit, r.lambda_oracle, r.ratio
                );
                table.push(vec![
                    float(alpha),
                    float(r.z_implicit),
                    float(r.lambda_oracle),
                    float(r.ratio),
                    "ok".into(),
                ]);
            }
            Err(VfpError::NoTransition { .. }) => {
                println!("alpha = {alpha}: NoTransition (the symmetric measure is unique)");
                table.push(vec![
                    float(alpha),
                    String::new(),
                    String::new(),
                    String::new(),
                    "no_transition".into(),
                ]);
            }
            Err(e) => return Err(e.into()),
        }
    }
    println!(
        "ratio = z_implicit / lambda_oracle; the implicit-equation root is reported unscaled, \
         lambda_oracle is where the map slope at zero crosses 1"
    );
    let path = out.write_table("lambda_c.csv", &table)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Polylines through consecutive sweep points. Branches continue by index while the
/// fixed-point count is unchanged; across a count change each point continues the nearest
/// unclaimed branch within `BRANCH_JOIN` of the mean range. A stability change starts a
/// new polyline from the last shared point.
fn branch_series(sets: &[FixedPointSet]) -> Vec<Series> {
    let means = || sets.iter().flat_map(|s| s.points.iter().map(|p| p.m));
    let range = means().fold(f64::NEG_INFINITY, f64::max) - means().fold(f64::INFINITY, f64::min);
    let join = BRANCH_JOIN * range.max(1e-12);
    let mut series: Vec<Series> = Vec::new();
    // (mean, series index) at the previous λ
    let mut prev: Vec<(f64, usize)> = Vec::new();
    for set in sets {
        let mut parent = vec![None; set.len()];
        if set.len() == prev.len() {
            parent = prev.iter().map(|&(_, i)| Some(i)).collect();
        } else {
            let mut pairs: Vec<(f64, usize, usize)> = set
                .points
                .iter()
                .enumerate()
                .flat_map(|(k, fp)| {
                    prev.iter()
                        .enumerate()
                        .map(move |(j, &(m, _))| ((fp.m - m).abs(), k, j))
                })
                .filter(|&(d, _, _)| d <= join)
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut taken = vec![false; prev.len()];
            for (_, k, j) in pairs {
                if parent[k].is_none() && !taken[j] {
                    parent[k] = Some(prev[j].1);
                    taken[j] = true;
                }
            }
        }
        let mut next = Vec::with_capacity(set.len());
        for (fp, parent) in set.points.iter().zip(parent) {
            let stable = fp.stability == Stability::Stable;
            let idx = match parent {
                Some(i) if series[i].dashed != stable => {
                    series[i].points.push((set.lambda, fp.m));
                    i
                }
                _ => {
                    let mut s = if stable {
                        Series::line("stable", Vec::new(), STABLE_COLOR)
                    } else {
                        Series::line("unstable", Vec::new(), UNSTABLE_COLOR).dashed()
                    };
                    if let Some(&last) = parent.and_then(|i| series[i].points.last()) {
                        s.points.push(last);
                    }
                    s.points.push((set.lambda, fp.m));
                    series.push(s);
                    series.len() - 1
                }
            };
            next.push((fp.m, idx));
        }
        prev = next;
    }
    series
}

pub fn bifurcation(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let alpha = cfg.require_alpha("bifurcation")?;
    let grid = cfg.lambdas()?;
    let v = cfg.potential()?;
    if !cfg.test_only {
        cfg.problem(grid[0])?;
    }
    let table = sweep_branches(&v, alpha, &grid)?;
    let mut csv = Table::new(&["lambda", "m", "stability", "residual"]);
    let mut sets = Vec::new();
    let mut failures = Vec::new();
    for point in &table.points {
        match &point.outcome {
            Ok(set) => {
                for fp in &set.points {
                    csv.push(vec![
                        float(point.lambda),
                        float(fp.m),
                        fp.stability.as_str().into(),
                        float(fp.residual),
                    ]);
                }
                sets.push(set.clone());
            }
            Err(e) => {
                eprintln!("lambda = {}: {e}", point.lambda);
                failures.push(point.lambda);
            }
        }
    }
    let plot = Plot {
        title: format!("Fixed-point means, alpha = {alpha}"),
        x_label: "lambda".into(),
        y_label: "m".into(),
        log_x: cfg.is_log_sweep(),
        log_y: false,
        series: branch_series(&sets),
    };
    let csv_path = out.write_table("bifurcation.csv", &csv)?;
    let svg_path = out.write_text("bifurcation.svg", &plot.render())?;
    for (a, b) in table.transitions() {
        println!("fixed-point count changes between lambda = {a} and {b}");
    }
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "fixed-point search failed at lambda = {failures:?}"
        )))
    }
}

#[derive(Debug, Serialize)]
struct ModeComparison {
    mode: Mode,
    mean: f64,
    variance: f64,
    /// KS distance between the two position histograms.
    ks_between: f64,
}

#[derive(Debug, Serialize)]
struct SimSummary {
    mode: Mode,
    particles: usize,
    steps: u64,
    samples: u64,
    mean: f64,
    variance: f64,
    momentum_variance: Option<f64>,
    standard_error: f64,
    centered_moments: Vec<(u32, f64)>,
    anchored_moments: Vec<(u32, f64)>,
    /// Mean of the stationary measure the histogram is compared to.
    quadrature_mean: Option<f64>,
    ks_vs_quadrature: Option<f64>,
    comparison: Option<ModeComparison>,
    warnings: Vec<String>,
}

fn simulate_once(
    cfg: &RunConfig,
    block: &SimBlock,
    mode: Mode,
    lambda: f64,
) -> Result<SimReport, CliError> {
    let v = cfg.potential()?.with_dimension(cfg.dimension)?;
    let psi = cfg.interaction()?;
    let steps = block.steps()?;
    let mut sim = SimConfig::new(block.dt, steps, mode, lambda, cfg.seed);
    if let Some(b) = block.burn_in_steps {
        sim.burn_in_steps = b;
    }
    if let Some(r) = block.record_every {
        sim.record_every = r;
    }
    sim.interaction_evaluation = block.interaction_evaluation;
    let defaults = Observers::default();
    let observers = Observers {
        histogram_range: block.histogram_range.unwrap_or(defaults.histogram_range),
        histogram_bins: block.histogram_bins.unwrap_or(defaults.histogram_bins),
        anchor: block.anchor,
        ..defaults
    };
    let mut ens = ParticleEnsemble::new(
        block.particles,
        cfg.dimension,
        mode,
        block.init,
        lambda,
        cfg.seed,
    )?;
    Ok(run(&mut ens, &sim, &v, &psi, &observers)?)
}

/// The stationary measure the run should sample: the stable fixed point nearest the empirical mean.
fn reference_measure(
    cfg: &RunConfig,
    lambda: f64,
    empirical_mean: f64,
) -> Result<StationaryMeasure, CliError> {
    let prob = cfg.problem(lambda)?;
    if cfg.alpha().is_some() {
        let set = find_fixed_points(&prob)?;
        let m = set
            .points
            .iter()
            .filter(|fp| fp.stability == Stability::Stable)
            .min_by(|a, b| {
                (a.m - empirical_mean)
                    .abs()
                    .total_cmp(&(b.m - empirical_mean).abs())
            })
            .map(|fp| fp.m)
            .unwrap_or(0.0);
        Ok(stationary_density(&prob, m)?)
    } else {
        let opts = PicardOptions {
            seed: MomentSeed::Gaussian {
                center: empirical_mean,
            },
            ..PicardOptions::default()
        };
        Ok(solve_general_interaction(&prob, &opts)?)
    }
}

fn histogram_table(h: &Histogram, reference: Option<&StationaryMeasure>) -> Table {
    let mut t = Table::new(&["lo", "hi", "count", "density", "reference_density"]);
    for ((w, &count), density) in h.edges.windows(2).zip(&h.counts).zip(h.density()) {
        let mid = 0.5 * (w[0] + w[1]);
        t.push(vec![
            float(w[0]),
            float(w[1]),
            count.to_string(),
            float(density),
            opt_float(reference.map(|r| r.density_at(mid))),
        ]);
    }
    t
}

pub fn simulate(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let block = cfg
        .sim
        .as_ref()
        .ok_or_else(|| CliError::Config("simulate needs a sim block".into()))?;
    let lambda = cfg.single_lambda("simulate")?;
    if !cfg.test_only {
        cfg.problem(lambda)?;
    }
    let report = simulate_once(cfg, block, block.mode, lambda)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    let reference = if cfg.dimension == 1 {
        Some(reference_measure(cfg, lambda, report.mean)?)
    } else {
        None
    };
    let ks = match &reference {
        Some(r) => Some(ks_against_cdf(&report.histogram, |x| {
            r.cdf(x, &cfg.quadrature)
        })?),
        None => None,
    };
    let comparison = if block.compare_modes {
        let other = match block.mode {
            Mode::Kinetic => Mode::Overdamped,
            Mode::Overdamped => Mode::Kinetic,
        };
        let r = simulate_once(cfg, block, other, lambda)?;
        Some(ModeComparison {
            mode: other,
            mean: r.mean,
            variance: r.variance,
            ks_between: ks_between(&report.histogram, &r.histogram)?,
        })
    } else {
        None
    };

    let mut series = Table::new(&["step", "time", "mean", "variance", "momentum_variance"]);
    for p in &report.series {
        series.push(vec![
            p.step.to_string(),
            float(p.time),
            float(p.mean),
            float(p.variance),
            opt_float(p.momentum_variance),
        ]);
    }
    out.write_table("timeseries.csv", &series)?;
    out.write_table(
        "histogram.csv",
        &histogram_table(&report.histogram, reference.as_ref()),
    )?;

    let centers: Vec<f64> = report
        .histogram
        .edges
        .windows(2)
        .map(|w| 0.5 * (w[0] + w[1]))
        .collect();
    let mut plot_series = vec![Series::line(
        "empirical",
        centers
            .iter()
            .copied()
            .zip(report.histogram.density())
            .collect(),
        STABLE_COLOR,
    )];
    if let Some(r) = &reference {
        plot_series.push(
            Series::line(
                "quadrature",
                centers.iter().map(|&x| (x, r.density_at(x))).collect(),
                UNSTABLE_COLOR,
            )
            .dashed(),
        );
    }
    let plot = Plot {
        title: format!("Position marginal, lambda = {lambda}"),
        x_label: "q".into(),
        y_label: "density".into(),
        series: plot_series,
        ..Default::default()
    };
    out.write_text("histogram.svg", &plot.render())?;

    let summary = SimSummary {
        mode: block.mode,
        particles: report.particles,
        steps: report.config.steps,
        samples: report.samples,
        mean: report.mean,
        variance: report.variance,
        momentum_variance: report.momentum_variance,
        standard_error: report.standard_error,
        centered_moments: report.centered_moments.clone(),
        anchored_moments: report.anchored_moments.clone(),
        quadrature_mean: reference.as_ref().map(|r| r.mean),
        ks_vs_quadrature: ks,
        comparison,
        warnings: report.warnings.clone(),
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Numerical(format!("serializing summary: {e}")))?;
    out.write_text("summary.json", &(json + "\n"))?;

    println!(
        "mean = {:.6} (SE {:.2e}), variance = {:.6}",
        report.mean, report.standard_error, report.variance
    );
    if let Some(p) = report.momentum_variance {
        println!("momentum variance = {p:.6} (lambda = {lambda})");
    }
    if let (Some(r), Some(ks)) = (&reference, ks) {
        println!("quadrature mean = {:.6}, KS distance = {ks:.4}", r.mean);
    }
    if let Some(c) = &summary.comparison {
        println!(
            "{:?} run: mean = {:.6}, KS between modes = {:.4}",
            c.mode, c.mean, c.ks_between
        );
    }
    Ok(())
}

pub fn residual(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let block = cfg.residual.clone().unwrap_or_default();
    let ResidualBlock {
        grids,
        momentum_half_width,
        p_variance_scale,
        mean,
    } = block;
    if grids.is_empty() {
        return Err(CliError::Config("residual.grids is empty".into()));
    }
    if !(p_variance_scale > 0.0) {
        return Err(CliError::Config(
            "residual.p_variance_scale must be positive".into(),
        ));
    }
    let lambda = cfg.single_lambda("residual")?;
    let prob = cfg.problem(lambda)?;
    let (v, psi) = (cfg.potential()?, cfg.interaction()?);

    let measure_on = |nodes: usize| -> Result<StationaryMeasure, CliError> {
        if cfg.alpha().is_some() {
            let m = match mean {
                Some(m) => m,
                None => find_fixed_points(&prob)?
                    .points
                    .iter()
                    .rev()
                    .find(|fp| fp.stability == Stability::Stable)
                    .map_or(0.0, |fp| fp.m),
            };
            Ok(stationary_density_on(&prob, m, nodes)?)
        } else {
            let opts = PicardOptions {
                seed: MomentSeed::Gaussian {
                    center: mean.unwrap_or(0.0),
                },
                grid_nodes: nodes,
                ..PicardOptions::default()
            };
            Ok(solve_general_interaction(&prob, &opts)?)
        }
    };

    let mut table = Table::new(&["nodes", "q_spacing", "p_spacing", "l2", "linf", "order"]);
    let mut prev = None;
    let mut points = Vec::new();
    for &nodes in &grids {
        let rho = measure_on(nodes)?;
        let grid = MomentumGrid {
            nodes,
            half_width: momentum_half_width,
        };
        let mu = lift_with_momentum_variance(&rho, &grid, p_variance_scale * lambda)?;
        let r = stationarity_residual(&mu, &v, &psi, None)?;
        let order = prev.map(|p| observed_order(&p, &r));
        println!(
            "{nodes:>5} nodes: l2 = {:.4e}, linf = {:.4e}{}",
            r.l2,
            r.linf,
            order
                .map(|o| format!(", order = {o:.3}"))
                .unwrap_or_default()
        );
        table.push(vec![
            nodes.to_string(),
            float(r.q_spacing),
            float(r.p_spacing),
            float(r.l2),
            float(r.linf),
            opt_float(order),
        ]);
        points.push((r.q_spacing, r.l2));
        prev = Some(r);
    }
    let plot = Plot {
        title: format!("Stationarity residual, lambda = {lambda}"),
        x_label: "q spacing".into(),
        y_label: "L2 residual".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series::line("l2", points.clone(), STABLE_COLOR),
            Series::line("", points, STABLE_COLOR).markers(),
        ],
    };
    out.write_table("residual.csv", &table)?;
    out.write_text("residual.svg", &plot.render())?;
    Ok(())
}

pub fn asymptotics(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let alpha = cfg.require_alpha("asymptotics")?;
    let AsymptoticsBlock {
        wells,
        lambdas,
        moment_order,
    } = cfg.asymptotics.clone().unwrap_or_default();
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(CliError::Config(
            "asymptotics.lambdas must be positive and non-empty".into(),
        ));
    }
    let v = cfg.potential()?;
    let wells = match wells {
        Some(w) => w,
        None => critical_points(&v)?.minima().collect(),
    };
    let sets = lambdas
        .iter()
        .map(|&l| Ok((l, find_fixed_points(&cfg.problem(l)?)?)))
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut rows = Table::new(&[
        "a0",
        "lambda",
        "m_fixed",
        "m_predicted",
        "difference",
        "centered_moment",
        "status",
    ]);
    let mut slopes = Table::new(&[
        "a0",
        "fitted_slope",
        "predicted_slope",
        "relative_error",
        "status",
    ]);
    let mut violated = 0;
    for &a0 in &wells {
        let mut fitted = Vec::new();
        let predicted_slope = asymptotic_mean(&v, alpha, a0, 1.0).map(|m1| m1 - a0);
        for (lambda, set) in &sets {
            let fp = set
                .points
                .iter()
                .filter(|fp| fp.stability == Stability::Stable)
                .min_by(|a, b| (a.m - a0).abs().total_cmp(&(b.m - a0).abs()));
            let Some(fp) = fp else { continue };
            let rho = stationary_density(&cfg.problem(*lambda)?, fp.m)?;
            let moment = moment_concentration_check(&rho, a0, moment_order)?;
            let (predicted, status) = match asymptotic_mean(&v, alpha, a0, *lambda) {
                Ok(p) => (Some(p), "ok".to_string()),
                Err(VfpError::ConditionViolated(msg)) => {
                    violated += 1;
                    (None, format!("condition_violated: {msg}"))
                }
                Err(e) => return Err(e.into()),
            };
            rows.push(vec![
                float(a0),
                float(*lambda),
                float(fp.m),
                opt_float(predicted),
                opt_float(predicted.map(|p| fp.m - p)),
                float(moment),
                status,
            ]);
            fitted.push((*lambda, fp.m));
        }
        let (x, y): (Vec<f64>, Vec<f64>) = fitted.into_iter().unzip();
        let slope = (x.len() >= 2).then(|| fitted_slope(&x, &y));
        let (pred, status) = match &predicted_slope {
            Ok(p) => (Some(*p), "ok".to_string()),
            Err(e) => (None, format!("{e}")),
        };
        let rel = slope.zip(pred).map(|(s, p)| ((s - p) / p).abs());
        println!(
            "a0 = {a0}: fitted slope = {}, predicted = {}",
            slope.map_or("n/a".into(), |s| format!("{s:.5}")),
            pred.map_or("n/a".into(), |p| format!("{p:.5}"))
        );
        slopes.push(vec![
            float(a0),
            opt_float(slope),
            opt_float(pred),
            opt_float(rel),
            status,
        ]);
    }
    out.write_table("asymptotics.csv", &rows)?;
    out.write_table("asymptotics_slope.csv", &slopes)?;
    if rows.len() > 0 && violated == rows.len() {
        return Err(CliError::Domain(
            "the small-temperature expansion's hypotheses fail for every row".into(),
        ));
    }
    Ok(())
}
