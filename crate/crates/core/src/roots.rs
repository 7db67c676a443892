//! Scalar root finding on a bracket.

use crate::error::{Result, VfpError};

/// Safeguarded Newton iteration on a sign-changing bracket `[lo, hi]`.
///
/// `f` returns the value and derivative. A Newton step is taken whenever it
/// stays inside the current bracket and shrinks the residual fast enough;
/// otherwise the bracket is bisected.
pub fn newton_bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let (flo, _) = f(lo)?;
    let (fhi, _) = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(VfpError::NoSignChange { lo, hi });
    }
    // orient so that f(lo) < 0 < f(hi)
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x)?;
    for _ in 0..300 {
        if fx == 0.0 {
            return Ok(x);
        }
        let newton_ok = dfx != 0.0 && {
            let a = (x - hi) * dfx - fx;
            let b = (x - lo) * dfx - fx;
            a * b < 0.0 && (2.0 * fx).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if dx.abs() <= xtol * (1.0 + x.abs()) {
            return Ok(x);
        }
        let (nfx, ndfx) = f(x)?;
        fx = nfx;
        dfx = ndfx;
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= xtol * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    Err(VfpError::RootFindingFailure(format!(
        "safeguarded Newton did not settle on [{lo}, {hi}]"
    )))
}

/// Plain bisection until the bracket is narrower than `xtol`.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(VfpError::NoSignChange { lo, hi });
    }
    while (hi - lo).abs() > xtol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_bisect_finds_sqrt2() {
        let r = newton_bisect(|x| Ok((x * x - 2.0, 2.0 * x)), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_bisect_survives_zero_derivative() {
        // cube root of a flat-at-zero function
        let r = newton_bisect(|x| Ok((x * x * x, 3.0 * x * x)), -1.0, 0.5, 1e-14).unwrap();
        assert!(r.abs() < 1e-4);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        let err = bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, VfpError::NoSignChange { .. }));
    }
}
