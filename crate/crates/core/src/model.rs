//! Confining and interaction potentials, their structural checks, and the
//! geometric quantities the mean-field results depend on.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VfpError};
use crate::poly::Polynomial;

/// Tolerance below which a Hessian is treated as zero.
const HESSIAN_EPS: f64 = 1e-10;

/// Polynomial confining potential `V`.
///
/// In `dimension > 1` the potential is radial, `V(|x|)`; only the particle
/// simulator uses that extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfiningPotential {
    poly: Polynomial,
    dimension: usize,
}

impl ConfiningPotential {
    /// `coeffs[k]` multiplies `x^k`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let poly = Polynomial::new(coeffs);
        if !poly.is_finite() {
            return Err(VfpError::InvalidPotential("non-finite coefficient".into()));
        }
        if poly.is_zero() {
            return Err(VfpError::InvalidPotential("zero polynomial".into()));
        }
        Ok(Self { poly, dimension: 1 })
    }

    /// `x^4/4 - x^2/2`.
    pub fn double_well() -> Self {
        Self::new(vec![0.0, 0.0, -0.5, 0.0, 0.25]).expect("valid coefficients")
    }

    pub fn with_dimension(mut self, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(VfpError::InvalidPotential(
                "dimension must be at least 1".into(),
            ));
        }
        self.dimension = dimension;
        Ok(self)
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    pub fn is_even(&self) -> bool {
        self.poly.is_even()
    }

    /// Even degree ≥ 2 with positive leading coefficient, so `e^{-V/λ}` is integrable.
    pub fn is_confining(&self) -> bool {
        let d = self.degree();
        d >= 2 && d.is_multiple_of(2) && self.poly.leading() > 0.0
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.poly.eval(x)
    }

    /// `V'(x)`.
    #[inline]
    pub fn force(&self, x: f64) -> f64 {
        self.poly.eval_with_derivative(x).1
    }

    /// `k`-th derivative at `x`.
    pub fn derivative_at(&self, k: usize, x: f64) -> f64 {
        self.poly.nth_derivative(k).eval(x)
    }
}

/// Interaction potential `ψ(x) = G(|x|)` with `G` an even polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionPotential {
    /// `ψ(x) = (α/2) x²`.
    Quadratic { alpha: f64 },
    /// `G(r) = Σ g_k r^k`, odd coefficients zero.
    EvenPolynomial { g: Polynomial },
}

impl InteractionPotential {
    pub fn quadratic(alpha: f64) -> Self {
        Self::Quadratic { alpha }
    }

    /// Full coefficient vector of `G` in ascending powers of `r`.
    pub fn even_polynomial(coeffs: Vec<f64>) -> Result<Self> {
        let g = Polynomial::new(coeffs);
        if !g.is_finite() {
            return Err(VfpError::InvalidPotential(
                "non-finite interaction coefficient".into(),
            ));
        }
        Ok(Self::EvenPolynomial { g })
    }

    /// `G` as a polynomial in `r`.
    pub fn as_polynomial(&self) -> Polynomial {
        match self {
            Self::Quadratic { alpha } => Polynomial::new(vec![0.0, 0.0, alpha / 2.0]),
            Self::EvenPolynomial { g } => g.clone(),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Self::Quadratic { alpha } => Some(*alpha),
            Self::EvenPolynomial { .. } => None,
        }
    }

    /// `n` with `deg G = 2n`; the quadratic form counts as `n = 1` even for `α = 0`.
    pub fn half_degree(&self) -> usize {
        match self {
            Self::Quadratic { .. } => 1,
            Self::EvenPolynomial { g } => g.degree().unwrap_or(0).div_ceil(2),
        }
    }

    pub fn is_even(&self) -> bool {
        match self {
            Self::Quadratic { .. } => true,
            Self::EvenPolynomial { g } => g.is_even(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assumption {
    V1,
    V2,
    V3,
    V4,
    Psi1,
    Psi2,
    Psi3,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::V1 => "V1",
            Self::V2 => "V2",
            Self::V3 => "V3",
            Self::V4 => "V4",
            Self::Psi1 => "psi1",
            Self::Psi2 => "psi2",
            Self::Psi3 => "psi3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub passed: bool,
    pub detail: String,
    /// A point where the condition fails, when one exists.
    pub counterexample: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<AssumptionCheck>,
    /// `(C_4, C_2)` with `V(x) ≥ C_4 x⁴ − C_2 x²`.
    pub quartic_bound: Option<(f64, f64)>,
    /// Critical points with vanishing Hessian.
    pub degenerate_critical_points: Vec<f64>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, a: Assumption) -> &AssumptionCheck {
        self.checks
            .iter()
            .find(|c| c.assumption == a)
            .expect("every assumption is checked")
    }

    pub fn failed(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Min,
    Max,
    Inflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: f64,
    pub kind: CriticalKind,
    pub hessian: f64,
    /// `V''` vanishes here; kind decided by the first non-zero higher derivative.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub points: Vec<CriticalPoint>,
}

impl CriticalPointReport {
    pub fn minima(&self) -> impl Iterator<Item = f64> + '_ {
        self.points
            .iter()
            .filter(|p| p.kind == CriticalKind::Min)
            .map(|p| p.location)
    }

    /// Largest |critical point|, zero when there are none.
    pub fn extent(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.location.abs())
            .fold(0.0, f64::max)
    }
}

/// All real critical points of `V`, classified by the sign of `V''`.
pub fn critical_points(v: &ConfiningPotential) -> Result<CriticalPointReport> {
    let dv = v.polynomial().derivative();
    if dv.is_zero() {
        return Err(VfpError::RootFindingFailure(
            "constant potential: every point is critical".into(),
        ));
    }
    let derivs: Vec<Polynomial> = (2..=v.degree().max(2))
        .map(|k| v.polynomial().nth_derivative(k))
        .collect();
    let mut points = Vec::new();
    for x in dv.real_roots()? {
        let residual = dv.eval(x);
        if residual.abs() > 1e-10 * (1.0 + dv.coeffs().iter().map(|c| c.abs()).sum::<f64>()) {
            return Err(VfpError::RootFindingFailure(format!(
                "V' = {residual:e} at polished root {x}"
            )));
        }
        let hessian = derivs[0].eval(x);
        let degenerate = hessian.abs() <= HESSIAN_EPS;
        let kind = if !degenerate {
            if hessian > 0.0 {
                CriticalKind::Min
            } else {
                CriticalKind::Max
            }
        } else {
            // first non-vanishing derivative of order ≥ 3
            derivs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, p)| (i + 2, p.eval(x)))
                .find(|(_, d)| d.abs() > HESSIAN_EPS)
                .map(|(order, d)| match (order % 2 == 0, d > 0.0) {
                    (true, true) => CriticalKind::Min,
                    (true, false) => CriticalKind::Max,
                    (false, _) => CriticalKind::Inflection,
                })
                .unwrap_or(CriticalKind::Inflection)
        };
        points.push(CriticalPoint {
            location: x,
            kind,
            hessian,
            degenerate,
        });
    }
    Ok(CriticalPointReport { points })
}

/// Checks each structural hypothesis on `V` and `ψ`; failures are reported, never thrown.
pub fn validate_assumptions(
    v: &ConfiningPotential,
    psi: &InteractionPotential,
) -> ValidationReport {
    let mut checks = Vec::with_capacity(7);
    let poly = v.polynomial();
    let deg = v.degree();
    let lead = poly.leading();

    let v1 = deg >= 2 && deg.is_multiple_of(2) && lead > 0.0;
    checks.push(AssumptionCheck {
        assumption: Assumption::V1,
        passed: v1,
        detail: format!("degree {deg}, leading coefficient {lead}"),
        counterexample: None,
    });

    let crit = critical_points(v);
    let degenerate = crit
        .as_ref()
        .map(|r| {
            r.points
                .iter()
                .filter(|p| p.degenerate)
                .map(|p| p.location)
                .collect()
        })
        .unwrap_or_default();
    checks.push(match &crit {
        Ok(r) => AssumptionCheck {
            assumption: Assumption::V2,
            passed: true,
            detail: format!("{} critical point(s)", r.points.len()),
            counterexample: None,
        },
        Err(e) => AssumptionCheck {
            assumption: Assumption::V2,
            passed: false,
            detail: e.to_string(),
            counterexample: None,
        },
    });

    let (v3, quartic_bound) = quartic_lower_bound(poly);
    checks.push(v3);

    checks.push(check_v4(v, crit.as_ref().ok()));
    checks.extend(check_interaction(psi));

    ValidationReport {
        checks,
        quartic_bound,
        degenerate_critical_points: degenerate,
    }
}

/// Searches `C_4` candidates and doubling `C_2` for `V − C_4x⁴ + C_2x² ≥ 0`.
fn quartic_lower_bound(v: &Polynomial) -> (AssumptionCheck, Option<(f64, f64)>) {
    let deg = v.degree().unwrap_or(0);
    let lead = v.leading();
    let fail = |detail: String, at: Option<f64>| AssumptionCheck {
        assumption: Assumption::V3,
        passed: false,
        detail,
        counterexample: at,
    };
    if deg < 4 || deg % 2 == 1 || lead <= 0.0 {
        return (
            fail(format!("degree {deg} cannot dominate a quartic"), None),
            None,
        );
    }
    let c4_candidates: Vec<f64> = if deg == 4 {
        vec![lead, lead / 2.0]
    } else {
        vec![1.0]
    };
    let mut worst_point = None;
    for &c4 in &c4_candidates {
        let mut c2 = 2f64.powi(-10);
        for _ in 0..=30 {
            let h = v.add(&Polynomial::new(vec![0.0, 0.0, c2, 0.0, -c4]));
            match h.global_min() {
                Ok(Some((x, val))) => {
                    let scale = 1.0 + v.coeffs().iter().map(|c| c.abs()).sum::<f64>();
                    if val >= -1e-12 * scale {
                        return (
                            AssumptionCheck {
                                assumption: Assumption::V3,
                                passed: true,
                                detail: format!("V(x) >= {c4} x^4 - {c2} x^2"),
                                counterexample: None,
                            },
                            Some((c4, c2)),
                        );
                    }
                    worst_point = Some(x);
                }
                // leading term cancelled: larger C_2 may still rescue the quadratic part
                Ok(None) if h.degree() < Some(deg) => {}
                Ok(None) => break,
                Err(e) => return (fail(e.to_string(), None), None),
            }
            c2 *= 2.0;
        }
    }
    (fail("no (C_4, C_2) pair found".into(), worst_point), None)
}

/// Hessian tends to +∞ and is positive outside the hull of the critical points.
fn check_v4(v: &ConfiningPotential, crit: Option<&CriticalPointReport>) -> AssumptionCheck {
    let hess = v.polynomial().nth_derivative(2);
    let mut out = AssumptionCheck {
        assumption: Assumption::V4,
        passed: false,
        detail: String::new(),
        counterexample: None,
    };
    let grows = hess.degree().is_some_and(|d| d >= 1 && d % 2 == 0) && hess.leading() > 0.0;
    if !grows {
        out.detail = "Hess V does not tend to +infinity".into();
        return out;
    }
    let Some(crit) = crit.filter(|c| !c.points.is_empty()) else {
        out.detail = "no critical points".into();
        return out;
    };
    let lo = crit.points.first().map(|p| p.location).unwrap_or(0.0);
    let hi = crit.points.last().map(|p| p.location).unwrap_or(0.0);
    let roots = match hess.real_roots() {
        Ok(r) => r,
        Err(e) => {
            out.detail = e.to_string();
            return out;
        }
    };
    // Hess V > 0 beyond the outermost critical points iff no sign change of V'' lies outside
    // and the value just outside is positive
    let outside = roots
        .iter()
        .copied()
        .find(|&r| r > hi + 1e-9 || r < lo - 1e-9);
    let probe = [lo - 1e-6, hi + 1e-6];
    let bad_probe = probe.iter().copied().find(|&x| hess.eval(x) <= 0.0);
    match outside.or(bad_probe) {
        Some(x) => {
            out.detail = format!("Hess V <= 0 outside [{lo}, {hi}]");
            out.counterexample = Some(x);
        }
        None => {
            out.passed = true;
            out.detail = format!("Hess V > 0 outside [{lo}, {hi}]");
        }
    }
    out
}

fn check_interaction(psi: &InteractionPotential) -> Vec<AssumptionCheck> {
    let g = psi.as_polynomial();
    let (psi1, detail1) = match psi {
        InteractionPotential::Quadratic { .. } => (true, "quadratic, deg G = 2".to_string()),
        InteractionPotential::EvenPolynomial { g } => {
            let d = g.degree().unwrap_or(0);
            (
                g.is_even() && d >= 2,
                format!("deg G = {d}, even = {}", g.is_even()),
            )
        }
    };
    let nonneg = |p: &Polynomial| -> std::result::Result<(), Option<f64>> {
        if p.is_zero() {
            return Ok(());
        }
        match p.global_min() {
            Ok(Some((x, val)))
                if val < -1e-12 * (1.0 + p.coeffs().iter().map(|c| c.abs()).sum::<f64>()) =>
            {
                Err(Some(x))
            }
            Ok(Some(_)) => Ok(()),
            Ok(None) | Err(_) => Err(None),
        }
    };
    let convexity = nonneg(&g.nth_derivative(2)).and_then(|_| nonneg(&g.nth_derivative(4)));
    let psi2 = AssumptionCheck {
        assumption: Assumption::Psi2,
        passed: convexity.is_ok(),
        detail: if convexity.is_ok() {
            "G'' >= 0 and G'''' >= 0".into()
        } else {
            "G or G'' is not convex".into()
        },
        counterexample: convexity.err().flatten(),
    };
    vec![
        AssumptionCheck {
            assumption: Assumption::Psi1,
            passed: psi1,
            detail: detail1,
            counterexample: None,
        },
        psi2,
        AssumptionCheck {
            assumption: Assumption::Psi3,
            passed: g.coeff(0) == 0.0,
            detail: format!("G(0) = {}", g.coeff(0)),
            counterexample: (g.coeff(0) != 0.0).then_some(0.0),
        },
    ]
}

/// `sup_{x≠a0} 2(V(a0) − V(x))/(a0 − x)²`; an eccentric measure near `a0`
/// needs `α` above this value.
///
/// The ratio equals `−2 Q(x)` with `Q = (V(x) − V(a0))/(x − a0)²`, a
/// polynomial when `a0` is critical, so the supremum is `−2 min Q`.
pub fn well_depth_margin(v: &ConfiningPotential, a0: f64) -> Result<f64> {
    // V even: the margin at -a0 is the margin at a0
    let a0 = if v.is_even() { a0.abs() } else { a0 };
    let q = v.polynomial().deflate_double(a0);
    match q.global_min()? {
        Some((_, min)) => Ok(-2.0 * min),
        None => Err(VfpError::UnboundedSup { a0 }),
    }
}

/// `W_m(x) = V(x) + (α/2)(x − m)²`.
pub fn effective_potential(v: &ConfiningPotential, alpha: f64, m: f64) -> Polynomial {
    let half = alpha / 2.0;
    v.polynomial()
        .add(&Polynomial::new(vec![half * m * m, -alpha * m, half]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pot(c: &[f64]) -> ConfiningPotential {
        ConfiningPotential::new(c.to_vec()).unwrap()
    }

    /// Grid scan with the singular node filled by −V''(a0), then golden-section polish.
    fn well_depth_by_scan(v: &ConfiningPotential, a0: f64, half_width: f64) -> f64 {
        let ratio = |x: f64| {
            if (x - a0).abs() < 1e-9 {
                -v.derivative_at(2, a0)
            } else {
                2.0 * (v.value(a0) - v.value(x)) / (a0 - x).powi(2)
            }
        };
        let n = 10_000;
        let h = 2.0 * half_width / (n - 1) as f64;
        let (mut best_x, mut best) = (0.0, f64::NEG_INFINITY);
        for i in 0..n {
            let x = -half_width + i as f64 * h;
            if ratio(x) > best {
                best = ratio(x);
                best_x = x;
            }
        }
        let (mut a, mut b) = (best_x - h, best_x + h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if ratio(c) > ratio(d) {
                b = d;
            } else {
                a = c;
            }
        }
        best.max(ratio(0.5 * (a + b)))
    }

    #[test]
    fn double_well_passes_all_assumptions() {
        let v = ConfiningPotential::double_well();
        let r = validate_assumptions(&v, &InteractionPotential::quadratic(1.0));
        assert!(r.all_passed(), "{r:?}");
        let (c4, c2) = r.quartic_bound.unwrap();
        assert_eq!((c4, c2), (0.25, 0.5));
    }

    #[test]
    fn double_well_passes_for_every_nonnegative_alpha() {
        let v = ConfiningPotential::double_well();
        for alpha in [0.0, 0.1, 1.0, 7.5, 100.0] {
            assert!(validate_assumptions(&v, &InteractionPotential::quadratic(alpha)).all_passed());
        }
    }

    #[test]
    fn odd_degree_fails_v1_and_v3() {
        let r = validate_assumptions(
            &pot(&[0.0, 0.0, 0.0, 1.0]),
            &InteractionPotential::quadratic(1.0),
        );
        assert!(!r.check(Assumption::V1).passed);
        assert!(!r.check(Assumption::V3).passed);
    }

    #[test]
    fn nonconvex_interaction_fails_psi2() {
        // G(r) = r^4 - r^2, G''(0) = -2
        let psi = InteractionPotential::even_polynomial(vec![0.0, 0.0, -1.0, 0.0, 1.0]).unwrap();
        let r = validate_assumptions(&ConfiningPotential::double_well(), &psi);
        let c = r.check(Assumption::Psi2);
        assert!(!c.passed);
        assert!(c.counterexample.unwrap().abs() < 1e-12);
        assert!(r.check(Assumption::Psi1).passed && r.check(Assumption::Psi3).passed);
    }

    #[test]
    fn constant_term_in_g_fails_psi3() {
        let psi = InteractionPotential::even_polynomial(vec![1.0, 0.0, 1.0]).unwrap();
        let r = validate_assumptions(&ConfiningPotential::double_well(), &psi);
        assert!(!r.check(Assumption::Psi3).passed);
    }

    #[test]
    fn quadratic_potential_fails_v3_and_v4() {
        let r = validate_assumptions(
            &pot(&[0.0, 0.0, 0.5]),
            &InteractionPotential::quadratic(1.0),
        );
        assert!(r.check(Assumption::V1).passed);
        assert!(!r.check(Assumption::V3).passed);
        assert!(!r.check(Assumption::V4).passed);
    }

    #[test]
    fn negative_constant_breaks_quartic_bound() {
        let r = validate_assumptions(
            &pot(&[-1.0, 0.0, -0.5, 0.0, 0.25]),
            &InteractionPotential::quadratic(1.0),
        );
        assert!(!r.check(Assumption::V3).passed);
    }

    #[test]
    fn sextic_quartic_bound_uses_unit_c4() {
        let r = validate_assumptions(
            &pot(&[0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 1.0 / 6.0]),
            &InteractionPotential::quadratic(1.0),
        );
        assert!(r.all_passed(), "{r:?}");
        assert_eq!(r.quartic_bound.unwrap().0, 1.0);
    }

    #[test]
    fn double_well_critical_points() {
        let r = critical_points(&ConfiningPotential::double_well()).unwrap();
        let want = [
            (-1.0, CriticalKind::Min, 2.0),
            (0.0, CriticalKind::Max, -1.0),
            (1.0, CriticalKind::Min, 2.0),
        ];
        assert_eq!(r.points.len(), 3);
        for (p, (x, k, h)) in r.points.iter().zip(want) {
            assert!((p.location - x).abs() < 1e-12);
            assert_eq!(p.kind, k);
            assert!((p.hessian - h).abs() < 1e-10);
            assert!(!p.degenerate);
        }
    }

    #[test]
    fn pure_quartic_is_degenerate_minimum() {
        let r = critical_points(&pot(&[0.0, 0.0, 0.0, 0.0, 0.25])).unwrap();
        assert_eq!(r.points.len(), 1);
        let p = r.points[0];
        assert_eq!(p.location, 0.0);
        assert_eq!(p.kind, CriticalKind::Min);
        assert!(p.degenerate);
        let rep = validate_assumptions(
            &pot(&[0.0, 0.0, 0.0, 0.0, 0.25]),
            &InteractionPotential::quadratic(1.0),
        );
        assert_eq!(rep.degenerate_critical_points, vec![0.0]);
    }

    #[test]
    fn sextic_critical_points() {
        // V' = x^5 - x
        let r = critical_points(&pot(&[0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 1.0 / 6.0])).unwrap();
        let locs: Vec<f64> = r.points.iter().map(|p| p.location).collect();
        assert_eq!(locs.len(), 3);
        assert!(
            (locs[0] + 1.0).abs() < 1e-12 && locs[1].abs() < 1e-12 && (locs[2] - 1.0).abs() < 1e-12
        );
        assert_eq!(r.points[1].kind, CriticalKind::Max);
        assert_eq!(r.minima().count(), 2);
    }

    #[test]
    fn critical_points_satisfy_finite_difference_check() {
        for c in [
            vec![0.0, 0.3, -0.5, 0.1, 0.25],
            vec![1.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.5],
            vec![0.0, -1.0, 0.0, 0.0, 1.0],
        ] {
            let v = pot(&c);
            let r = critical_points(&v).unwrap();
            assert!(r.points.len() < v.degree());
            for p in &r.points {
                let h = 1e-6;
                let fd = (v.value(p.location + h) - v.value(p.location - h)) / (2.0 * h);
                assert!(fd.abs() < 1e-8, "{c:?} at {}: {fd}", p.location);
            }
        }
    }

    #[test]
    fn well_depth_of_double_well() {
        let v = ConfiningPotential::double_well();
        let s = well_depth_margin(&v, 1.0).unwrap();
        assert!(s.abs() < 1e-12, "{s}");
        assert!((well_depth_by_scan(&v, 1.0, 6.0) - s).abs() < 1e-8);
        assert_eq!(well_depth_margin(&v, -1.0).unwrap(), s);
    }

    #[test]
    fn well_depth_of_harmonic_is_minus_one() {
        let v = pot(&[0.0, 0.0, 0.5]);
        assert!((well_depth_margin(&v, 0.0).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn well_depth_matches_scan_on_asymmetric_well() {
        // tilted double well, left minimum is shallower
        let v = pot(&[0.0, 0.2, -0.5, 0.0, 0.25]);
        let crit = critical_points(&v).unwrap();
        for a0 in crit.minima() {
            let s = well_depth_margin(&v, a0).unwrap();
            let scan = well_depth_by_scan(&v, a0, 8.0);
            assert!((s - scan).abs() < 1e-6, "a0 {a0}: {s} vs {scan}");
        }
    }

    #[test]
    fn well_depth_symmetry_for_even_potentials() {
        for c in [
            vec![0.0, 0.0, -1.0, 0.0, 0.5],
            vec![0.0, 0.0, -0.5, 0.0, -0.1, 0.0, 0.3],
        ] {
            let v = pot(&c);
            for a0 in critical_points(&v).unwrap().minima() {
                assert_eq!(
                    well_depth_margin(&v, a0).unwrap(),
                    well_depth_margin(&v, -a0).unwrap()
                );
            }
        }
    }

    #[test]
    fn effective_potential_algebra() {
        let v = ConfiningPotential::double_well();
        let w = effective_potential(&v, 1.0, 1.0);
        // W' = x^3 - 1
        let dw = w.derivative();
        for &x in &[-2.0, -0.5, 0.0, 1.0, 3.0] {
            assert!((dw.eval(x) - (x * x * x - 1.0)).abs() < 1e-12);
        }
        assert!(effective_potential(&v, 2.5, 0.0).is_even());
        assert_eq!(effective_potential(&v, 0.0, 3.0), *v.polynomial());
    }
}
