//! Exact Riemann solvers for single-inflection fluxes.
//!
//! The nonclassical solver follows the four-case construction on each side
//! of the inflection for both convexity classes. The classical solver reuses
//! the same construction with the kinetic function replaced by the tangent
//! map, which collapses the two-shock case and reproduces the convex-hull
//! solution.

use arrayvec::ArrayVec;

use crate::error::{Error, Result};
use crate::flux::{Convexity, FluxSpec};
use crate::kinetics::{KineticFunction, Kinetics, DEFAULT_VALIDATION_RANGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum WaveKind {
    Rarefaction,
    ClassicalShock,
    NonclassicalShock,
    /// Linear advection discontinuity.
    Contact,
}

impl WaveKind {
    pub fn is_discontinuity(self) -> bool {
        !matches!(self, WaveKind::Rarefaction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Wave {
    pub kind: WaveKind,
    pub left_state: f64,
    pub right_state: f64,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

impl Wave {
    fn discontinuity(fs: &FluxSpec, kind: WaveKind, left: f64, right: f64) -> Self {
        let s = fs.chord_slope(left, right);
        Wave { kind, left_state: left, right_state: right, speed_lo: s, speed_hi: s }
    }

    fn rarefaction(fs: &FluxSpec, left: f64, right: f64) -> Self {
        Wave {
            kind: WaveKind::Rarefaction,
            left_state: left,
            right_state: right,
            speed_lo: fs.eval_deriv(left),
            speed_hi: fs.eval_deriv(right),
        }
    }
}

/// Self-similar solution `u(x, t) = W(x / t)` of a Riemann problem.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFan {
    pub left_state: f64,
    pub right_state: f64,
    pub waves: ArrayVec<Wave, 2>,
}

impl WaveFan {
    fn new(left_state: f64, right_state: f64) -> Self {
        WaveFan { left_state, right_state, waves: ArrayVec::new() }
    }

    fn push(&mut self, w: Wave) {
        // zero-strength waves are dropped
        if w.left_state != w.right_state {
            self.waves.push(w);
        }
    }

    pub fn kinds(&self) -> Vec<WaveKind> {
        self.waves.iter().map(|w| w.kind).collect()
    }

    /// Fastest signal speed in absolute value (zero for an empty fan).
    pub fn max_abs_speed(&self) -> f64 {
        self.waves.iter().fold(0.0, |m, w| m.max(w.speed_lo.abs()).max(w.speed_hi.abs()))
    }

    /// Value of the fan on the ray `x / t = xi`. A ray that coincides with a
    /// shock speed takes the state to the right of the shock.
    pub fn sample(&self, fs: &FluxSpec, xi: f64) -> f64 {
        for w in &self.waves {
            if xi < w.speed_lo {
                return w.left_state;
            }
            if w.kind == WaveKind::Rarefaction && xi <= w.speed_hi {
                return fs.rarefaction_state(xi, w.left_state, w.right_state);
            }
        }
        self.right_state
    }

    /// `int_a^b W(xi) dxi`, integrated piece by piece. Rarefactions use the
    /// primitive `u f'(u) - f(u)`.
    pub fn integral(&self, fs: &FluxSpec, a: f64, b: f64) -> f64 {
        fn overlap(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
            (b.min(hi) - a.max(lo)).max(0.0)
        }
        let mut total = 0.0;
        let mut cursor = f64::NEG_INFINITY;
        let mut state = self.left_state;
        for w in &self.waves {
            total += state * overlap(a, b, cursor, w.speed_lo);
            if w.kind == WaveKind::Rarefaction {
                let (lo, hi) = (a.max(w.speed_lo), b.min(w.speed_hi));
                if hi > lo {
                    let u_hi = fs.rarefaction_state(hi, w.left_state, w.right_state);
                    let u_lo = fs.rarefaction_state(lo, w.left_state, w.right_state);
                    total += fs.rarefaction_primitive(u_hi) - fs.rarefaction_primitive(u_lo);
                }
            }
            cursor = w.speed_hi;
            state = w.right_state;
        }
        total + state * overlap(a, b, cursor, f64::INFINITY)
    }

    /// Average of the solution centred at `x0` over `[xa, xb]` at time `t`.
    pub fn cell_average(&self, fs: &FluxSpec, x0: f64, xa: f64, xb: f64, t: f64) -> f64 {
        let len = xb - xa;
        if t <= 0.0 {
            let left = (x0.min(xb) - xa).max(0.0);
            return (self.left_state * left + self.right_state * (len - left)) / len;
        }
        t * self.integral(fs, (xa - x0) / t, (xb - x0) / t) / len
    }

    /// Image of the fan under `x -> -x` with `f -> -f`.
    pub fn mirrored(&self) -> WaveFan {
        let mut out = WaveFan::new(self.right_state, self.left_state);
        for w in self.waves.iter().rev() {
            out.waves.push(Wave {
                kind: w.kind,
                left_state: w.right_state,
                right_state: w.left_state,
                speed_lo: -w.speed_hi,
                speed_hi: -w.speed_lo,
            });
        }
        out
    }

    /// Structural invariants of a fan; `kinetics` enables the kinetic
    /// relation check on nonclassical shocks.
    pub fn check_invariants(&self, fs: &FluxSpec, kinetics: Option<Kinetics<'_>>) -> std::result::Result<(), String> {
        let Some(first) = self.waves.first() else {
            return if self.left_state == self.right_state {
                Ok(())
            } else {
                Err("empty fan with distinct end states".into())
            };
        };
        if first.left_state != self.left_state {
            return Err(format!("first wave starts at {} not {}", first.left_state, self.left_state));
        }
        let last = self.waves.last().unwrap();
        if last.right_state != self.right_state {
            return Err(format!("last wave ends at {} not {}", last.right_state, self.right_state));
        }
        for pair in self.waves.windows(2) {
            if pair[0].right_state != pair[1].left_state {
                return Err("adjacent waves do not share their connecting state".into());
            }
            if pair[0].speed_hi > pair[1].speed_lo + 1e-12 * (1.0 + pair[1].speed_lo.abs()) {
                return Err(format!("wave speeds decrease: {} then {}", pair[0].speed_hi, pair[1].speed_lo));
            }
        }
        for w in &self.waves {
            if w.kind.is_discontinuity() {
                let s = fs.chord_slope(w.left_state, w.right_state);
                if w.speed_lo != w.speed_hi || w.speed_lo != s {
                    return Err(format!("shock speed {} differs from Rankine-Hugoniot {}", w.speed_lo, s));
                }
            } else if !(w.speed_lo <= w.speed_hi) {
                return Err(format!("rarefaction speeds {} > {}", w.speed_lo, w.speed_hi));
            }
            if let (WaveKind::NonclassicalShock, Some(k)) = (w.kind, kinetics) {
                let want = k.forward(w.left_state);
                if (w.right_state - want).abs() > 1e-12 * want.abs().max(1e-300) {
                    return Err(format!(
                        "nonclassical shock {} -> {} violates the kinetic relation",
                        w.left_state, w.right_state
                    ));
                }
            }
        }
        Ok(())
    }
}

/// How the solver picks the undercompressive branch.
trait ShockSelection {
    fn forward(&self, u: f64) -> Result<f64>;
    fn inverse(&self, u: f64) -> Result<f64>;
    fn kind(&self) -> WaveKind;
}

struct KineticSelection<'a>(Kinetics<'a>);

impl ShockSelection for KineticSelection<'_> {
    fn forward(&self, u: f64) -> Result<f64> {
        Ok(self.0.forward(u))
    }
    fn inverse(&self, u: f64) -> Result<f64> {
        Ok(self.0.inverse(u))
    }
    fn kind(&self) -> WaveKind {
        WaveKind::NonclassicalShock
    }
}

struct TangentSelection<'a>(&'a FluxSpec);

impl ShockSelection for TangentSelection<'_> {
    fn forward(&self, u: f64) -> Result<f64> {
        match self.0.convexity() {
            Convexity::ConvexConcave => self.0.inverse_tangent_map(u),
            _ => self.0.tangent_map(u),
        }
    }
    fn inverse(&self, u: f64) -> Result<f64> {
        match self.0.convexity() {
            Convexity::ConvexConcave => self.0.tangent_map(u),
            _ => self.0.inverse_tangent_map(u),
        }
    }
    fn kind(&self) -> WaveKind {
        // sonic shocks of the classical solver
        WaveKind::ClassicalShock
    }
}

fn solve_concave_convex<S: ShockSelection>(fs: &FluxSpec, sel: &S, ul: f64, ur: f64) -> Result<WaveFan> {
    use WaveKind::ClassicalShock;
    let mut fan = WaveFan::new(ul, ur);
    if ul == ur {
        return Ok(fan);
    }
    let outward = if ul > 0.0 { ur >= ul } else { ur <= ul };
    if outward {
        fan.push(Wave::rarefaction(fs, ul, ur));
        return Ok(fan);
    }
    let phi = sel.forward(ul)?;
    let sharp = fs.chord_third_root(ul, phi)?;
    // orient so that `ur` decreases away from `ul`
    let s = if ul > 0.0 { 1.0 } else { -1.0 };
    if s * ur >= s * sharp {
        fan.push(Wave::discontinuity(fs, ClassicalShock, ul, ur));
    } else if s * ur > s * phi {
        fan.push(Wave::discontinuity(fs, sel.kind(), ul, phi));
        fan.push(Wave::discontinuity(fs, ClassicalShock, phi, ur));
    } else {
        fan.push(Wave::discontinuity(fs, sel.kind(), ul, phi));
        fan.push(Wave::rarefaction(fs, phi, ur));
    }
    Ok(fan)
}

fn solve_convex_concave<S: ShockSelection>(fs: &FluxSpec, sel: &S, ul: f64, ur: f64) -> Result<WaveFan> {
    use WaveKind::ClassicalShock;
    let mut fan = WaveFan::new(ul, ur);
    if ul == ur {
        return Ok(fan);
    }
    let s = if ul > 0.0 { 1.0 } else { -1.0 };
    if s * ur >= s * ul {
        fan.push(Wave::discontinuity(fs, ClassicalShock, ul, ur));
        return Ok(fan);
    }
    // the rarefaction branch is closed at 0 only on the u_l > 0 side
    let same_side = if ul > 0.0 { ur >= 0.0 } else { ur <= 0.0 };
    if same_side {
        fan.push(Wave::rarefaction(fs, ul, ur));
        return Ok(fan);
    }
    let phi = sel.forward(ul)?;
    let mid = sel.inverse(ur)?;
    if s * ur > s * phi {
        fan.push(Wave::rarefaction(fs, ul, mid));
        fan.push(Wave::discontinuity(fs, sel.kind(), mid, ur));
        return Ok(fan);
    }
    let rho = fs.chord_third_root(mid, ur)?;
    if s * ul > s * rho {
        fan.push(Wave::discontinuity(fs, ClassicalShock, ul, mid));
        fan.push(Wave::discontinuity(fs, sel.kind(), mid, ur));
    } else {
        fan.push(Wave::discontinuity(fs, ClassicalShock, ul, ur));
    }
    Ok(fan)
}

fn solve_linear(fs: &FluxSpec, ul: f64, ur: f64) -> WaveFan {
    let mut fan = WaveFan::new(ul, ur);
    fan.push(Wave::discontinuity(fs, WaveKind::Contact, ul, ur));
    fan
}

fn solve_with<S: ShockSelection>(fs: &FluxSpec, sel: &S, ul: f64, ur: f64) -> Result<WaveFan> {
    match fs.convexity() {
        Convexity::ConcaveConvex => solve_concave_convex(fs, sel, ul, ur),
        Convexity::ConvexConcave => solve_convex_concave(fs, sel, ul, ur),
        Convexity::Linear => Ok(solve_linear(fs, ul, ur)),
    }
}

/// A nonclassical (or classical) solver with its kinetic function checked
/// once over a state range, for repeated use in the random-choice scheme.
#[derive(Debug, Clone)]
pub struct RiemannSolver {
    fs: FluxSpec,
    kf: Option<KineticFunction>,
    validated: (f64, f64),
}

impl RiemannSolver {
    pub fn nonclassical(fs: &FluxSpec, kf: &KineticFunction) -> Result<Self> {
        let range = DEFAULT_VALIDATION_RANGE;
        if fs.convexity() != Convexity::Linear {
            kf.validate(fs, range, 1024).into_result()?;
        }
        Ok(RiemannSolver { fs: fs.clone(), kf: Some(kf.clone()), validated: range })
    }

    pub fn classical(fs: &FluxSpec) -> Self {
        RiemannSolver { fs: fs.clone(), kf: None, validated: (f64::NEG_INFINITY, f64::INFINITY) }
    }

    pub fn flux(&self) -> &FluxSpec {
        &self.fs
    }

    pub fn kinetics(&self) -> Option<Kinetics<'_>> {
        self.kf.as_ref().map(|kf| kf.oriented(&self.fs))
    }

    pub fn solve(&self, ul: f64, ur: f64) -> Result<WaveFan> {
        match &self.kf {
            None => solve_with(&self.fs, &TangentSelection(&self.fs), ul, ur),
            Some(kf) => {
                let (lo, hi) = self.validated;
                let (a, b) = (ul.min(ur), ul.max(ur));
                if a < lo || b > hi {
                    validate_on_data(&self.fs, kf, ul, ur)?;
                }
                solve_with(&self.fs, &KineticSelection(kf.oriented(&self.fs)), ul, ur)
            }
        }
    }
}

fn validate_on_data(fs: &FluxSpec, kf: &KineticFunction, ul: f64, ur: f64) -> Result<()> {
    if fs.convexity() == Convexity::Linear {
        return Ok(());
    }
    let k = kf.oriented(fs);
    let pts = [ul, ur, k.forward(ul), k.forward(ur), k.inverse(ul), k.inverse(ur)];
    let lo = pts.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = pts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(());
    }
    kf.validate(fs, (lo, hi), 257).into_result()
}

/// Nonclassical Riemann solution selected by `kf`.
pub fn solve_nonclassical(fs: &FluxSpec, kf: &KineticFunction, ul: f64, ur: f64) -> Result<WaveFan> {
    validate_on_data(fs, kf, ul, ur)?;
    solve_with(fs, &KineticSelection(kf.oriented(fs)), ul, ur)
}

/// Classical entropy solution (tangent map in place of the kinetic function).
pub fn solve_classical(fs: &FluxSpec, ul: f64, ur: f64) -> Result<WaveFan> {
    solve_with(fs, &TangentSelection(fs), ul, ur)
}

/// Exact solution of the Riemann problem with the jump at `x = 0`.
pub fn exact_riemann_solution(fs: &FluxSpec, kf: &KineticFunction, ul: f64, ur: f64, x: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Config(format!("negative time {t}")));
    }
    if t == 0.0 {
        return Ok(if x < 0.0 { ul } else { ur });
    }
    Ok(solve_nonclassical(fs, kf, ul, ur)?.sample(fs, x / t))
}
