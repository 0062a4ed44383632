//! Scalar root finding used by the geometric maps of general fluxes.

use crate::error::{Error, Result};

pub(crate) const TOL: f64 = 1e-12;
pub(crate) const MAX_ITER: usize = 100;

/// Grows `[anchor, anchor + dir * len]` until `g` changes sign across it.
/// `g(anchor)` must be non-zero.
pub(crate) fn expand_one_sided<G>(g: &G, anchor: f64, dir: f64, scale: f64, what: &'static str) -> Result<(f64, f64)>
where
    G: Fn(f64) -> f64,
{
    let g0 = g(anchor);
    let mut len = scale.max(1.0);
    for _ in 0..80 {
        let far = anchor + dir * len;
        let gf = g(far);
        if gf.is_finite() && gf.signum() != g0.signum() {
            return Ok(if far < anchor { (far, anchor) } else { (anchor, far) });
        }
        len *= 2.0;
    }
    Err(Error::NoConvergence { what, at: anchor })
}

/// Grows a symmetric bracket around `center` until `g` changes sign.
pub(crate) fn expand_symmetric<G>(g: &G, center: f64, scale: f64, what: &'static str) -> Result<(f64, f64)>
where
    G: Fn(f64) -> f64,
{
    let mut len = scale.max(1.0);
    for _ in 0..80 {
        let (lo, hi) = (center - len, center + len);
        let (gl, gh) = (g(lo), g(hi));
        if gl.is_finite() && gh.is_finite() && gl.signum() != gh.signum() {
            return Ok((lo, hi));
        }
        len *= 2.0;
    }
    Err(Error::NoConvergence { what, at: center })
}

/// Bisection safeguarded Newton iteration on a sign-changing bracket.
///
/// The derivative is taken by central differences; any Newton step that
/// leaves the current bracket falls back to bisection.
pub(crate) fn solve_bracketed<G>(g: &G, lo: f64, hi: f64, what: &'static str) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut ga = g(a);
    let gb = g(b);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if ga.signum() == gb.signum() {
        return Err(Error::NoConvergence { what, at: 0.5 * (a + b) });
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_ITER {
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if gx.signum() == ga.signum() {
            a = x;
            ga = gx;
        } else {
            b = x;
        }
        let h = 1e-7 * (1.0 + x.abs());
        let slope = (g(x + h) - g(x - h)) / (2.0 * h);
        let newton = x - gx / slope;
        let next = if slope.is_finite() && slope != 0.0 && newton > a.min(b) && newton < a.max(b) {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= TOL * (1.0 + x.abs()) || (b - a).abs() <= TOL * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence { what, at: x })
}
