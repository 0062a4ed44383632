//! Flux functions with a single inflection point at the origin, their
//! entropy pairs, and the chord/tangent constructions that drive both the
//! Riemann solver and the reconstruction scheme.
//!
//! The two cubic prototypes `u^3 + u` and `-u^3 - u` use closed forms for
//! every geometric map. General fluxes fall back to bracketed root finding,
//! which assumes the inflection is at `u = 0` and that `f'''` does not change
//! sign.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss5_composite;
use crate::roots::{expand_one_sided, expand_symmetric, solve_bracketed};
use crate::schemes::GridState;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convexity {
    /// `u f''(u) > 0`: concave for `u < 0`, convex for `u > 0`.
    ConcaveConvex,
    /// `u f''(u) < 0`.
    ConvexConcave,
    /// Linear advection; no geometric maps exist.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
}

impl Monotonicity {
    pub fn sign(self) -> f64 {
        match self {
            Monotonicity::NonDecreasing => 1.0,
            Monotonicity::NonIncreasing => -1.0,
        }
    }
}

#[derive(Clone)]
pub struct CustomFlux {
    pub name: String,
    f: ScalarFn,
    df: ScalarFn,
}

#[derive(Clone)]
pub enum FluxKind {
    /// `f(u) = u^3 + u`
    CubicPlus,
    /// `f(u) = -u^3 - u`
    CubicMinus,
    /// `f(u) = a u`
    Advection {
        speed: f64,
    },
    Custom(CustomFlux),
}

impl fmt::Debug for FluxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FluxKind::CubicPlus => write!(f, "CubicPlus"),
            FluxKind::CubicMinus => write!(f, "CubicMinus"),
            FluxKind::Advection { speed } => write!(f, "Advection({speed})"),
            FluxKind::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FluxSpec {
    kind: FluxKind,
    convexity: Convexity,
    monotonicity: Monotonicity,
}

impl FluxSpec {
    pub fn cubic_plus() -> Self {
        FluxSpec {
            kind: FluxKind::CubicPlus,
            convexity: Convexity::ConcaveConvex,
            monotonicity: Monotonicity::NonDecreasing,
        }
    }

    pub fn cubic_minus() -> Self {
        FluxSpec {
            kind: FluxKind::CubicMinus,
            convexity: Convexity::ConvexConcave,
            monotonicity: Monotonicity::NonIncreasing,
        }
    }

    pub fn advection(speed: f64) -> Result<Self> {
        if !speed.is_finite() || speed == 0.0 {
            return Err(Error::InvalidFlux(format!("advection speed must be finite and non-zero, got {speed}")));
        }
        let monotonicity = if speed > 0.0 { Monotonicity::NonDecreasing } else { Monotonicity::NonIncreasing };
        Ok(FluxSpec { kind: FluxKind::Advection { speed }, convexity: Convexity::Linear, monotonicity })
    }

    /// A user supplied flux with its derivative.
    ///
    /// The declared convexity and monotonicity are checked on 1001 samples
    /// of `[-10, 10]`; the scheme needs a sign-definite `f'`.
    pub fn custom<F, D>(name: &str, f: F, df: D, convexity: Convexity, monotonicity: Monotonicity) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if convexity == Convexity::Linear {
            return Err(Error::InvalidFlux("use FluxSpec::advection for linear fluxes".into()));
        }
        let want = match convexity {
            Convexity::ConcaveConvex => 1.0,
            _ => -1.0,
        };
        for k in 0..=1000 {
            let u = -10.0 + 0.02 * k as f64;
            let slope = df(u);
            if !slope.is_finite() || slope * monotonicity.sign() < 0.0 {
                return Err(Error::InvalidFlux(format!(
                    "{name}: f'({u}) = {slope} contradicts declared {monotonicity:?}"
                )));
            }
            if u.abs() > 1e-9 {
                let h = 1e-5 * (1.0 + u.abs());
                let curvature = (df(u + h) - df(u - h)) / (2.0 * h);
                if u * curvature * want <= 0.0 {
                    return Err(Error::InvalidFlux(format!("{name}: u f''(u) has the wrong sign at u = {u}")));
                }
            }
        }
        Ok(FluxSpec {
            kind: FluxKind::Custom(CustomFlux { name: name.to_string(), f: Arc::new(f), df: Arc::new(df) }),
            convexity,
            monotonicity,
        })
    }

    pub fn kind(&self) -> &FluxKind {
        &self.kind
    }

    pub fn convexity(&self) -> Convexity {
        self.convexity
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn name(&self) -> String {
        match &self.kind {
            FluxKind::CubicPlus => "cubic-plus".into(),
            FluxKind::CubicMinus => "cubic-minus".into(),
            FluxKind::Advection { speed } => format!("advection({speed})"),
            FluxKind::Custom(c) => c.name.clone(),
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match &self.kind {
            FluxKind::CubicPlus => u * u * u + u,
            FluxKind::CubicMinus => -(u * u * u + u),
            FluxKind::Advection { speed } => speed * u,
            FluxKind::Custom(c) => (c.f)(u),
        }
    }

    #[inline]
    pub fn eval_deriv(&self, u: f64) -> f64 {
        match &self.kind {
            FluxKind::CubicPlus => 3.0 * u * u + 1.0,
            FluxKind::CubicMinus => -(3.0 * u * u + 1.0),
            FluxKind::Advection { speed } => *speed,
            FluxKind::Custom(c) => (c.df)(u),
        }
    }

    /// Rankine-Hugoniot speed `(f(u+) - f(u-)) / (u+ - u-)`.
    pub fn shock_speed(&self, u_minus: f64, u_plus: f64) -> Result<f64> {
        if u_minus == u_plus {
            return Err(Error::EqualStates(u_minus));
        }
        Ok(self.chord_slope(u_minus, u_plus))
    }

    /// Rankine-Hugoniot speed extended by continuity: nearly equal states
    /// return `f'` at their midpoint.
    #[inline]
    pub fn chord_slope(&self, a: f64, b: f64) -> f64 {
        if let FluxKind::Advection { speed } = self.kind {
            return speed;
        }
        if (b - a).abs() < 1e-13 * (1.0 + a.abs().max(b.abs())) {
            return self.eval_deriv(0.5 * (a + b));
        }
        (self.eval(b) - self.eval(a)) / (b - a)
    }

    /// The tangent map: the point `w != u` where the chord from `u` touches
    /// the graph tangentially.
    pub fn tangent_map(&self, u: f64) -> Result<f64> {
        match &self.kind {
            FluxKind::CubicPlus | FluxKind::CubicMinus => Ok(-u / 2.0),
            FluxKind::Advection { .. } => Err(Error::Unsupported("tangent map of a linear flux")),
            FluxKind::Custom(_) => {
                if u == 0.0 {
                    return Ok(0.0);
                }
                let fu = self.eval(u);
                let residual = |w: f64| fu - self.eval(w) - self.eval_deriv(w) * (u - w);
                let (lo, hi) = expand_one_sided(&residual, 0.0, -u.signum(), u.abs(), "tangent map")?;
                solve_bracketed(&residual, lo, hi, "tangent map")
            }
        }
    }

    /// Inverse of [`FluxSpec::tangent_map`].
    pub fn inverse_tangent_map(&self, v: f64) -> Result<f64> {
        match &self.kind {
            FluxKind::CubicPlus | FluxKind::CubicMinus => Ok(-2.0 * v),
            FluxKind::Advection { .. } => Err(Error::Unsupported("tangent map of a linear flux")),
            FluxKind::Custom(_) => {
                if v == 0.0 {
                    return Ok(0.0);
                }
                let (fv, dv) = (self.eval(v), self.eval_deriv(v));
                let residual = |u: f64| self.eval(u) - fv - dv * (u - v);
                let (lo, hi) = expand_one_sided(&residual, 0.0, -v.signum(), v.abs(), "inverse tangent map")?;
                solve_bracketed(&residual, lo, hi, "inverse tangent map")
            }
        }
    }

    /// Third intersection of the chord through `(u, f(u))` and `(v, f(v))`
    /// with the graph, extended by continuity at `v = u` and at the tangent
    /// point.
    pub fn chord_third_root(&self, u: f64, v: f64) -> Result<f64> {
        match &self.kind {
            FluxKind::CubicPlus | FluxKind::CubicMinus => Ok(-(u + v)),
            FluxKind::Advection { .. } => Err(Error::Unsupported("chord root of a linear flux")),
            FluxKind::Custom(_) => {
                if u == v {
                    return self.inverse_tangent_map(u);
                }
                let s = self.chord_slope(u, v);
                // second divided difference f[u, v, w]; its zero is the third root
                let nudge = 1e-9 * (1.0 + u.abs());
                let dd = |w: f64| {
                    let w = if w == u { w + nudge } else { w };
                    (self.chord_slope(v, w) - s) / (w - u)
                };
                let scale = 1.0 + u.abs().max(v.abs());
                let (lo, hi) = expand_symmetric(&dd, 0.5 * (u + v), scale, "chord third root")?;
                solve_bracketed(&dd, lo, hi, "chord third root")
            }
        }
    }

    /// Lower admissibility bound for kinetic functions (zero entropy
    /// dissipation). Only known in closed form for the cubic prototypes.
    pub fn zero_dissipation_map(&self, u: f64) -> Option<f64> {
        match self.kind {
            FluxKind::CubicPlus | FluxKind::CubicMinus => Some(-u),
            _ => None,
        }
    }

    /// State on the rarefaction between `a` and `b` whose characteristic
    /// speed is `xi`, clamped to the rarefaction's state range.
    pub fn rarefaction_state(&self, xi: f64, a: f64, b: f64) -> f64 {
        let (lo, hi) = (a.min(b), a.max(b));
        let branch = if a + b >= 0.0 { 1.0 } else { -1.0 };
        let u = match &self.kind {
            FluxKind::CubicPlus => branch * ((xi - 1.0) / 3.0).max(0.0).sqrt(),
            FluxKind::CubicMinus => branch * ((-xi - 1.0) / 3.0).max(0.0).sqrt(),
            FluxKind::Advection { .. } => a,
            FluxKind::Custom(_) => {
                let g = |u: f64| self.eval_deriv(u) - xi;
                let (gl, gh) = (g(lo), g(hi));
                if gl == 0.0 {
                    lo
                } else if gh == 0.0 {
                    hi
                } else if gl.signum() == gh.signum() {
                    if gl.abs() < gh.abs() {
                        lo
                    } else {
                        hi
                    }
                } else {
                    solve_bracketed(&g, lo, hi, "rarefaction").unwrap_or(0.5 * (lo + hi))
                }
            }
        };
        u.clamp(lo, hi)
    }

    /// Antiderivative of the rarefaction profile in the similarity variable:
    /// `int u dxi = u f'(u) - f(u)` along `xi = f'(u)`.
    pub fn rarefaction_primitive(&self, u: f64) -> f64 {
        u * self.eval_deriv(u) - self.eval(u)
    }

    /// `max |f'|` over the interval `[lo, hi]`. With a single inflection at
    /// zero the extremes sit at the endpoints or at the origin.
    pub fn max_abs_speed(&self, lo: f64, hi: f64) -> f64 {
        let mut m = self.eval_deriv(lo).abs().max(self.eval_deriv(hi).abs());
        if lo < 0.0 && hi > 0.0 {
            m = m.max(self.eval_deriv(0.0).abs());
        }
        m
    }
}

/// Strictly convex entropy `U` with entropy flux `F`, `F' = U' f'`.
#[derive(Clone)]
pub struct EntropyPair {
    entropy: ScalarFn,
    entropy_flux: ScalarFn,
}

impl fmt::Debug for EntropyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EntropyPair").finish_non_exhaustive()
    }
}

impl EntropyPair {
    pub fn new<U, F>(entropy: U, entropy_flux: F) -> Self
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        EntropyPair { entropy: Arc::new(entropy), entropy_flux: Arc::new(entropy_flux) }
    }

    /// `U(u) = u^2` with its matching entropy flux.
    pub fn quadratic(fs: &FluxSpec) -> Self {
        let entropy_flux: ScalarFn = match fs.kind() {
            FluxKind::CubicPlus => Arc::new(|u: f64| 1.5 * u.powi(4) + u * u),
            FluxKind::CubicMinus => Arc::new(|u: f64| -(1.5 * u.powi(4) + u * u)),
            FluxKind::Advection { speed } => {
                let a = *speed;
                Arc::new(move |u: f64| a * u * u)
            }
            FluxKind::Custom(_) => {
                let fs = fs.clone();
                // F(u) = int_0^u 2 s f'(s) ds
                Arc::new(move |u: f64| gauss5_composite(|s| 2.0 * s * fs.eval_deriv(s), 0.0, u, 16))
            }
        };
        EntropyPair { entropy: Arc::new(|u: f64| u * u), entropy_flux }
    }

    pub fn entropy(&self, u: f64) -> f64 {
        (self.entropy)(u)
    }

    pub fn entropy_flux(&self, u: f64) -> f64 {
        (self.entropy_flux)(u)
    }
}

/// `dx * sum_j U(u_j)`.
pub fn entropy_total(ep: &EntropyPair, gs: &GridState) -> f64 {
    gs.dx() * gs.cells().iter().map(|&u| ep.entropy(u)).sum::<f64>()
}
