//! Phase-transition temperature and bifurcation data.
//!
//! Two independent routes to the critical temperature are kept side by side:
//! the root of an implicit integral equation in `z`, and the temperature at
//! which the symmetric fixed point loses stability, `Φ_λ'(0) = 1`. Their
//! ratio is reported rather than reconciled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VfpError};
use crate::model::{ConfiningPotential, InteractionPotential};
use crate::poly::Polynomial;
use crate::quad::{integrate_halfline_vec, QuadratureSpec};
use crate::roots::bisect;
use crate::selfcons::{
    find_fixed_points, map_derivative, FixedPointSet, SelfConsistencyProblem, Stability,
};

/// Bisection tolerance (relative) on `λ` and `z`.
pub const LAMBDA_TOL: f64 = 1e-8;
/// Search window for both critical-temperature routes.
pub const SEARCH_WINDOW: (f64, f64) = (1e-6, 1e3);

/// Requires `V = c₂x² + Σ_{p≥2} c_{2p}x^{2p}` with `c₂ ≤ 0`, `c_{2p} ≥ 0` and degree ≥ 4.
fn check_transition_class(v: &ConfiningPotential) -> Result<()> {
    let p = v.polynomial();
    let deg = v.degree();
    if !v.is_even() {
        return Err(VfpError::NotInPotentialClass(
            "potential must be even".into(),
        ));
    }
    if deg < 4 {
        return Err(VfpError::NotInPotentialClass(format!(
            "degree {deg} has no quartic or higher term"
        )));
    }
    if p.coeff(2) > 0.0 {
        return Err(VfpError::NotInPotentialClass(
            "quadratic coefficient must be non-positive".into(),
        ));
    }
    if (4..=deg).step_by(2).any(|k| p.coeff(k) < 0.0) {
        return Err(VfpError::NotInPotentialClass(
            "coefficients of order four and above must be non-negative".into(),
        ));
    }
    Ok(())
}

/// Exponent of the implicit-equation integrand as a polynomial in `y`, and its `z`-derivative.
fn implicit_exponent(z: f64, v: &ConfiningPotential, alpha: f64) -> (Polynomial, Polynomial) {
    let p = v.polynomial();
    let deg = v.degree();
    let curvature = p.coeff(2).abs() * 2.0;
    let mut e = vec![0.0; deg + 1];
    let mut de = vec![0.0; deg + 1];
    e[2] = (curvature - alpha) * 4.0;
    for k in (4..=deg).step_by(2) {
        let half = (k / 2) as i32;
        let c = p.coeff(k).abs() * 4f64.powi(half);
        e[k] = -2.0 * z.powi(half - 1) * c;
        de[k] = -2.0 * f64::from(half - 1) * z.powi(half - 2) * c;
    }
    (Polynomial::new(e), Polynomial::new(de))
}

/// `(e^{−s}F(z), e^{−s}F'(z), s)` with `s` the maximum of the exponent.
fn implicit_scaled(
    z: f64,
    v: &ConfiningPotential,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64, f64)> {
    check_transition_class(v)?;
    if !(alpha > 0.0) {
        return Err(VfpError::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(VfpError::DivergentIntegrand(format!(
            "z must be positive, got {z}"
        )));
    }
    let (e, de) = implicit_exponent(z, v, alpha);
    if e.leading() >= 0.0 {
        return Err(VfpError::DivergentIntegrand(
            "exponent does not decay".into(),
        ));
    }
    let shift = -e.scale(-1.0).global_min()?.map_or(0.0, |(_, v)| v);
    let inv = 1.0 / (2.0 * alpha);
    let out = integrate_halfline_vec(
        |y, out: &mut [f64]| {
            let w = (4.0 * y * y - inv) * (e.eval(y) - shift).exp();
            out[0] = w;
            out[1] = w * de.eval(y);
        },
        2,
        spec,
    )?;
    Ok((out[0], out[1], shift))
}

/// `F(z) = ∫₀^∞ (4y² − 1/(2α)) exp[(|V''(0)| − α)4y² − Σ_{p≥2} 2z^{p−1}|c_{2p}|4^p y^{2p}] dy`.
pub fn lambda_c_integrand_equation(z: f64, v: &ConfiningPotential, alpha: f64) -> Result<f64> {
    let (f, _, shift) = implicit_scaled(z, v, alpha, &QuadratureSpec::default())?;
    let value = f * shift.exp();
    if !value.is_finite() {
        return Err(VfpError::NonFinite { x: z });
    }
    Ok(value)
}

/// Root `z*` of the implicit equation.
pub fn solve_lambda_c_implicit(
    v: &ConfiningPotential,
    alpha: f64,
    bracket_hint: Option<(f64, f64)>,
) -> Result<f64> {
    let spec = QuadratureSpec::tight();
    let f = |z: f64| implicit_scaled(z, v, alpha, &spec).map(|(f, _, _)| f);
    let (lo, hi) = match bracket_hint {
        Some((a, b)) if a > 0.0 && b > a && f(a)? > 0.0 && f(b)? < 0.0 => (a, b),
        _ => expand_bracket(&f, 1.0)?,
    };
    let z = bisect(f, lo, hi, LAMBDA_TOL * lo)?;
    // Newton polish; the positive scale factor does not move the root
    let mut z_new = z;
    for _ in 0..4 {
        let (fz, dfz, _) = implicit_scaled(z_new, v, alpha, &spec)?;
        let step = fz / dfz;
        if !step.is_finite() || (z_new - step - z).abs() > LAMBDA_TOL * z {
            break;
        }
        z_new -= step;
        if step.abs() < 1e-15 * z_new {
            break;
        }
    }
    Ok(z_new)
}

/// Geometric expansion from `guess` until `f` changes from positive to negative.
fn expand_bracket<F: Fn(f64) -> Result<f64>>(f: &F, guess: f64) -> Result<(f64, f64)> {
    let (wlo, whi) = SEARCH_WINDOW;
    let fg = f(guess)?;
    let mut a = guess;
    let mut b = guess;
    if fg > 0.0 {
        while b < whi {
            a = b;
            b = (b * 2.0).min(whi);
            if f(b)? <= 0.0 {
                return Ok((a, b));
            }
        }
    } else {
        while a > wlo {
            b = a;
            a = (a / 2.0).max(wlo);
            if f(a)? > 0.0 {
                return Ok((a, b));
            }
        }
    }
    Err(VfpError::NoSignChange { lo: wlo, hi: whi })
}

fn symmetric_problem(v: &ConfiningPotential, alpha: f64) -> Result<SelfConsistencyProblem> {
    Ok(
        SelfConsistencyProblem::test_only(v.clone(), InteractionPotential::quadratic(alpha), 1.0)?
            .with_quadrature(QuadratureSpec::tight()),
    )
}

/// `λ` with `Φ_λ'(0) = 1`, by bisection on the monotone map `λ ↦ (α/λ)Var_{μ_0}`.
pub fn lambda_c_oracle(v: &ConfiningPotential, alpha: f64) -> Result<f64> {
    lambda_c_oracle_bracketed(v, alpha).map(|(l, _)| l)
}

fn lambda_c_oracle_bracketed(v: &ConfiningPotential, alpha: f64) -> Result<(f64, (f64, f64))> {
    check_transition_class(v)?;
    if !(alpha > 0.0) {
        return Err(VfpError::NoTransition { alpha });
    }
    let base = symmetric_problem(v, alpha)?;
    let h = |lambda: f64| map_derivative(&base.with_lambda(lambda)?, 0.0).map(|d| d - 1.0);
    let (wlo, whi) = SEARCH_WINDOW;
    if h(wlo)? <= 0.0 || h(whi)? >= 0.0 {
        return Err(VfpError::NoTransition { alpha });
    }
    let (lo, hi) = expand_bracket(&h, 1.0).map_err(|_| VfpError::NoTransition { alpha })?;
    let (mut a, mut b) = (lo, hi);
    while b - a > LAMBDA_TOL * a {
        let mid = 0.5 * (a + b);
        if h(mid)? > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((0.5 * (a + b), (lo, hi)))
}

/// Count-transition temperature by bisection on the number of fixed points.
///
/// Each step runs a full fixed-point scan; kept as a cross-check of the derivative route.
pub fn lambda_c_by_count(
    v: &ConfiningPotential,
    alpha: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let count = |lambda: f64| -> Result<usize> {
        let prob = SelfConsistencyProblem::test_only(
            v.clone(),
            InteractionPotential::quadratic(alpha),
            lambda,
        )?;
        Ok(find_fixed_points(&prob)?.len())
    };
    if count(lo)? < 3 || count(hi)? != 1 {
        return Err(VfpError::NoSignChange { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol * a {
        let mid = 0.5 * (a + b);
        if count(mid)? >= 3 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCReport {
    pub alpha: f64,
    /// Root of the implicit integral equation.
    pub z_implicit: f64,
    /// Temperature where `Φ_λ'(0)` crosses 1.
    pub lambda_oracle: f64,
    pub ratio: f64,
    /// Initial bracket of the oracle bisection.
    pub bracket: (f64, f64),
    pub tolerance: f64,
}

pub fn lambda_c_report(v: &ConfiningPotential, alpha: f64) -> Result<LambdaCReport> {
    let (lambda_oracle, bracket) = lambda_c_oracle_bracketed(v, alpha)?;
    let z_implicit = solve_lambda_c_implicit(v, alpha, None)?;
    Ok(LambdaCReport {
        alpha,
        z_implicit,
        lambda_oracle,
        ratio: z_implicit / lambda_oracle,
        bracket,
        tolerance: LAMBDA_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub lambda: f64,
    pub outcome: std::result::Result<FixedPointSet, String>,
}

/// One row per fixed point in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub lambda: f64,
    pub m: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchTable {
    pub alpha: f64,
    /// In ascending `λ` order.
    pub points: Vec<BranchPoint>,
}

impl BranchTable {
    pub fn rows(&self) -> Vec<BranchRow> {
        self.points
            .iter()
            .filter_map(|p| p.outcome.as_ref().ok().map(|set| (p.lambda, set)))
            .flat_map(|(lambda, set)| {
                set.points.iter().map(move |fp| BranchRow {
                    lambda,
                    m: fp.m,
                    stability: fp.stability,
                })
            })
            .collect()
    }

    /// Fixed-point count per grid temperature, `None` where the solve failed.
    pub fn counts(&self) -> Vec<(f64, Option<usize>)> {
        self.points
            .iter()
            .map(|p| (p.lambda, p.outcome.as_ref().ok().map(|s| s.len())))
            .collect()
    }

    /// Consecutive grid temperatures across which the count drops from 3 to 1.
    pub fn transitions(&self) -> Vec<(f64, f64)> {
        self.counts()
            .windows(2)
            .filter(|w| w[0].1 == Some(3) && w[1].1 == Some(1))
            .map(|w| (w[0].0, w[1].0))
            .collect()
    }

    pub fn errors(&self) -> impl Iterator<Item = (f64, &str)> {
        self.points
            .iter()
            .filter_map(|p| p.outcome.as_ref().err().map(|e| (p.lambda, e.as_str())))
    }
}

/// Fixed points at every grid temperature; individual failures are recorded, not raised.
pub fn sweep_branches(
    v: &ConfiningPotential,
    alpha: f64,
    lambda_grid: &[f64],
) -> Result<BranchTable> {
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) || lambda_grid.iter().any(|&l| !(l > 0.0)) {
        return Err(VfpError::InvalidParameter(
            "lambda grid must be strictly ascending and positive".into(),
        ));
    }
    let psi = InteractionPotential::quadratic(alpha);
    let points = lambda_grid
        .par_iter()
        .map(|&lambda| BranchPoint {
            lambda,
            outcome: SelfConsistencyProblem::test_only(v.clone(), psi.clone(), lambda)
                .and_then(|p| find_fixed_points(&p))
                .map_err(|e| e.to_string()),
        })
        .collect();
    Ok(BranchTable { alpha, points })
}

/// `n` log-spaced temperatures on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    fn gamma_ratio_sq() -> f64 {
        (gamma(0.75) / gamma(0.25)).powi(2)
    }

    #[test]
    fn canonical_implicit_root_closed_form() {
        let v = ConfiningPotential::double_well();
        let want = 8.0 * gamma_ratio_sq();
        assert!((want - 0.913_893_162_1).abs() < 1e-9);
        // F(z*) = 0: ∫4y² e^{−8zy⁴} = ½∫e^{−8zy⁴} ⟺ z = 8(Γ(3/4)/Γ(1/4))²
        assert!(lambda_c_integrand_equation(want, &v, 1.0).unwrap().abs() < 1e-10);
        let z = solve_lambda_c_implicit(&v, 1.0, None).unwrap();
        assert!((z - want).abs() < 1e-6, "{z}");
    }

    #[test]
    fn implicit_equation_sign_pattern() {
        let v = ConfiningPotential::double_well();
        assert!(lambda_c_integrand_equation(0.5, &v, 1.0).unwrap() > 0.0);
        assert!(lambda_c_integrand_equation(1.5, &v, 1.0).unwrap() < 0.0);
        // large α also narrows the Gaussian factor, so both terms vanish together
        for z in [0.1, 1.0, 10.0] {
            assert!(lambda_c_integrand_equation(z, &v, 1e9).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn implicit_root_regression_at_alpha_two() {
        let v = ConfiningPotential::double_well();
        let z = solve_lambda_c_implicit(&v, 2.0, None).unwrap();
        assert!(z > 0.0 && z < 10.0);
        // scipy brentq on the same integral
        assert!((z - 1.631_573_189_4).abs() < 1e-6, "{z}");
        let scan: Vec<f64> = log_grid(1e-3, 10.0, 60)
            .into_iter()
            .map(|z| lambda_c_integrand_equation(z, &v, 2.0).unwrap())
            .collect();
        let changes = scan
            .windows(2)
            .filter(|w| w[0].signum() != w[1].signum())
            .count();
        assert_eq!(changes, 1);
    }

    #[test]
    fn implicit_equation_rejects_bad_inputs() {
        let quadratic = ConfiningPotential::new(vec![0.0, 0.0, 0.5]).unwrap();
        assert!(matches!(
            lambda_c_integrand_equation(1.0, &quadratic, 1.0),
            Err(VfpError::NotInPotentialClass(_))
        ));
        assert!(matches!(
            solve_lambda_c_implicit(&quadratic, 1.0, None),
            Err(VfpError::NotInPotentialClass(_))
        ));
        let v = ConfiningPotential::double_well();
        assert!(matches!(
            lambda_c_integrand_equation(0.0, &v, 1.0),
            Err(VfpError::DivergentIntegrand(_))
        ));
        let odd = ConfiningPotential::new(vec![0.0, 0.1, -0.5, 0.0, 0.25]).unwrap();
        assert!(lambda_c_integrand_equation(1.0, &odd, 1.0).is_err());
    }

    #[test]
    fn oracle_matches_gamma_identity() {
        let v = ConfiningPotential::double_well();
        let lc = lambda_c_oracle(&v, 1.0).unwrap();
        // x = √(2λ)u: λ = Var_{e^{−x⁴/(4λ)}} = 2√λ Γ(3/4)/Γ(1/4)
        let want = 4.0 * gamma_ratio_sq();
        assert!((lc - want).abs() < 1e-7, "{lc} vs {want}");
    }

    #[test]
    fn oracle_without_interaction_has_no_transition() {
        let v = ConfiningPotential::double_well();
        assert!(matches!(
            lambda_c_oracle(&v, 0.0),
            Err(VfpError::NoTransition { .. })
        ));
    }

    #[test]
    fn count_straddles_oracle() {
        let v = ConfiningPotential::double_well();
        let count = |lambda| {
            find_fixed_points(
                &SelfConsistencyProblem::new(
                    v.clone(),
                    InteractionPotential::quadratic(1.0),
                    lambda,
                )
                .unwrap(),
            )
            .unwrap()
            .len()
        };
        assert_eq!(count(0.40), 3);
        assert_eq!(count(0.50), 1);
    }

    #[test]
    fn report_surfaces_factor_two() {
        let r = lambda_c_report(&ConfiningPotential::double_well(), 1.0).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-4, "{r:?}");
        assert!(r.bracket.0 < r.lambda_oracle && r.lambda_oracle < r.bracket.1);
    }

    #[test]
    fn sweep_transitions_once() {
        let v = ConfiningPotential::double_well();
        let table = sweep_branches(&v, 1.0, &log_grid(0.05, 2.0, 20)).unwrap();
        let counts: Vec<usize> = table
            .counts()
            .into_iter()
            .map(|(_, c)| c.unwrap())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]));
        assert!(counts.iter().all(|&c| c == 1 || c == 3));
        let t = table.transitions();
        assert_eq!(t.len(), 1);
        let lc = 4.0 * gamma_ratio_sq();
        assert!(t[0].0 < lc && lc < t[0].1);
        for (lambda, _) in table.counts() {
            assert!(table
                .rows()
                .iter()
                .any(|r| r.lambda == lambda && r.m == 0.0));
        }
    }

    #[test]
    fn high_temperature_sweep_is_unique() {
        let table = sweep_branches(&ConfiningPotential::double_well(), 1.0, &[5.0]).unwrap();
        assert_eq!(table.rows().len(), 1);
    }

    #[test]
    fn sweep_rejects_unsorted_grid() {
        assert!(sweep_branches(&ConfiningPotential::double_well(), 1.0, &[1.0, 0.5]).is_err());
    }
}
