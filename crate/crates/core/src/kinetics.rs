//! Kinetic functions selecting the admissible nonclassical shocks.
//!
//! A kinetic function is always written in the frame of a concave-convex
//! flux: `u+ = phi(u-)` with `phi` decreasing. For a convex-concave flux the
//! relation is carried over by the mirror `f -> -f, x -> -x`, which swaps the
//! roles of `phi` and its inverse. [`Kinetics`] is that oriented view; the
//! solver and the schemes only ever use it.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flux::{Convexity, FluxSpec, ScalarFn};

/// Number of sample points used by [`KineticFunction::validate_default`].
pub const DEFAULT_VALIDATION_SAMPLES: usize = 1024;
/// Sample interval used by [`KineticFunction::validate_default`].
pub const DEFAULT_VALIDATION_RANGE: (f64, f64) = (-10.0, 10.0);

#[derive(Clone)]
pub enum KineticFunction {
    /// `phi(u) = -beta u`
    Linear { beta: f64 },
    /// User maps; both directions must be supplied.
    Custom { name: String, forward: ScalarFn, inverse: ScalarFn },
}

impl fmt::Debug for KineticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KineticFunction::Linear { beta } => write!(f, "Linear(beta = {beta})"),
            KineticFunction::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl KineticFunction {
    pub fn linear(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidKinetics(format!("linear kinetic function needs beta > 0, got {beta}")));
        }
        Ok(KineticFunction::Linear { beta })
    }

    pub fn custom<F, G>(name: &str, forward: F, inverse: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        KineticFunction::Custom { name: name.to_string(), forward: Arc::new(forward), inverse: Arc::new(inverse) }
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            KineticFunction::Linear { beta } => Some(*beta),
            KineticFunction::Custom { .. } => None,
        }
    }

    #[inline]
    pub fn kinetic(&self, u: f64) -> f64 {
        match self {
            KineticFunction::Linear { beta } => -beta * u,
            KineticFunction::Custom { forward, .. } => forward(u),
        }
    }

    #[inline]
    pub fn kinetic_inverse(&self, u: f64) -> f64 {
        match self {
            KineticFunction::Linear { beta } => -u / beta,
            KineticFunction::Custom { inverse, .. } => inverse(u),
        }
    }

    /// The relation as it applies to shocks of `fs`.
    pub fn oriented<'a>(&'a self, fs: &FluxSpec) -> Kinetics<'a> {
        Kinetics { kf: self, mirrored: fs.convexity() == Convexity::ConvexConcave }
    }

    /// Third intersection of the chord from `u` to its kinetic image.
    pub fn companion(&self, fs: &FluxSpec, u: f64) -> Result<f64> {
        self.oriented(fs).companion(fs, u)
    }

    pub fn validate_default(&self, fs: &FluxSpec) -> ValidationReport {
        self.validate(fs, DEFAULT_VALIDATION_RANGE, DEFAULT_VALIDATION_SAMPLES)
    }

    /// Samples `range` uniformly and checks monotonicity, the sign flip,
    /// both admissibility bounds and inverse consistency.
    pub fn validate(&self, fs: &FluxSpec, range: (f64, f64), samples: usize) -> ValidationReport {
        let samples = samples.max(2);
        let k = self.oriented(fs);
        let grid: Vec<f64> =
            (0..samples).map(|i| range.0 + (range.1 - range.0) * i as f64 / (samples - 1) as f64).collect();

        let mut monotone = BoundCheck::new("monotone decreasing");
        for w in grid.windows(2) {
            let (a, b) = (k.forward(w[0]), k.forward(w[1]));
            if w[0] < w[1] && a <= b {
                monotone.record(w[1], b - a);
            }
        }

        let mut sign_flip = BoundCheck::new("sign flip");
        let mut inverse = BoundCheck::new("inverse consistency");
        for &u in grid.iter().filter(|u| **u != 0.0) {
            let phi = k.forward(u);
            if u * phi >= 0.0 {
                sign_flip.record(u, (u * phi).abs());
            }
            let back = k.inverse(phi);
            let err = (back - u).abs();
            if err > 1e-12 * u.abs() {
                inverse.record(u, err);
            }
        }

        let orientation = match fs.convexity() {
            Convexity::ConcaveConvex => 1.0,
            Convexity::ConvexConcave => -1.0,
            Convexity::Linear => {
                let mut lower = BoundCheck::new("zero-dissipation bound");
                lower.status = CheckStatus::Skipped;
                let mut upper = BoundCheck::new("tangent bound");
                upper.status = CheckStatus::Skipped;
                return ValidationReport { checks: vec![monotone, sign_flip, lower, upper, inverse] };
            }
        };

        let mut lower = BoundCheck::new("zero-dissipation bound");
        if fs.zero_dissipation_map(1.0).is_none() {
            lower.status = CheckStatus::Skipped;
        }
        let mut upper = BoundCheck::new("tangent bound");
        for &u in grid.iter().filter(|u| **u != 0.0) {
            let phi = k.forward(u);
            let side = orientation * u.signum();
            if let Some(phi0) = fs.zero_dissipation_map(u) {
                // strict: the kinetic function must dissipate entropy
                let margin = side * (phi - phi0);
                if margin <= 0.0 {
                    lower.record(u, -margin);
                }
            }
            let tangent = match fs.convexity() {
                Convexity::ConcaveConvex => fs.tangent_map(u),
                _ => fs.inverse_tangent_map(u),
            };
            match tangent {
                Ok(t) => {
                    let margin = side * (t - phi);
                    if margin < -1e-12 * (1.0 + u.abs()) {
                        upper.record(u, -margin);
                    }
                }
                Err(_) => upper.record(u, f64::INFINITY),
            }
        }
        ValidationReport { checks: vec![monotone, sign_flip, lower, upper, inverse] }
    }
}

/// A kinetic function oriented for a particular flux.
#[derive(Debug, Clone, Copy)]
pub struct Kinetics<'a> {
    kf: &'a KineticFunction,
    mirrored: bool,
}

impl<'a> Kinetics<'a> {
    /// Right state of the admissible nonclassical shock with left state `u`.
    #[inline]
    pub fn forward(&self, u: f64) -> f64 {
        if self.mirrored {
            self.kf.kinetic_inverse(u)
        } else {
            self.kf.kinetic(u)
        }
    }

    /// Left state of the admissible nonclassical shock with right state `u`.
    #[inline]
    pub fn inverse(&self, u: f64) -> f64 {
        if self.mirrored {
            self.kf.kinetic(u)
        } else {
            self.kf.kinetic_inverse(u)
        }
    }

    pub fn companion(&self, fs: &FluxSpec, u: f64) -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        fs.chord_third_root(u, self.forward(u))
    }

    pub fn function(&self) -> &'a KineticFunction {
        self.kf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The bound is not available for this flux.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Sample with the largest violation and the size of that violation.
    pub worst: Option<(f64, f64)>,
}

impl BoundCheck {
    fn new(name: &'static str) -> Self {
        BoundCheck { name, status: CheckStatus::Pass, worst: None }
    }

    fn record(&mut self, u: f64, violation: f64) {
        self.status = CheckStatus::Fail;
        match self.worst {
            Some((_, v)) if v >= violation => {}
            _ => self.worst = Some((u, violation)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<BoundCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub(crate) fn into_result(self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        let msg = self
            .failures()
            .map(|c| match c.worst {
                Some((u, v)) => format!("{} (worst at u = {u}, violation {v:e})", c.name),
                None => c.name.to_string(),
            })
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::InvalidKinetics(msg))
    }
}
