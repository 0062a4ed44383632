//! Error norms, convergence fits, kinetic-relation extraction and simple
//! profile diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::FluxSpec;
use crate::kinetics::KineticFunction;
use crate::riemann::WaveFan;
use crate::schemes::{ActiveCell, Boundary, GridState, StepRecord};

/// Exact cell averages of a reference solution.
pub trait ExactAverages {
    fn cell_average(&self, a: f64, b: f64, t: f64) -> f64;
}

impl<F: Fn(f64, f64, f64) -> f64> ExactAverages for F {
    fn cell_average(&self, a: f64, b: f64, t: f64) -> f64 {
        self(a, b, t)
    }
}

/// A Riemann fan centred at `(x0, t0)`, integrated analytically.
#[derive(Debug, Clone)]
pub struct RiemannExact {
    pub flux: FluxSpec,
    pub fan: WaveFan,
    pub x0: f64,
    pub t0: f64,
}

impl RiemannExact {
    pub fn new(flux: FluxSpec, fan: WaveFan, x0: f64) -> Self {
        RiemannExact { flux, fan, x0, t0: 0.0 }
    }

    pub fn starting_at(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }
}

impl ExactAverages for RiemannExact {
    fn cell_average(&self, a: f64, b: f64, t: f64) -> f64 {
        self.fan.cell_average(&self.flux, self.x0, a, b, t - self.t0)
    }
}

/// `dx * sum_j |u_j - exact_j|` at the time of `gs`.
pub fn l1_error<E: ExactAverages + ?Sized>(gs: &GridState, exact: &E) -> f64 {
    let t = gs.t();
    gs.cells()
        .iter()
        .enumerate()
        .map(|(j, &u)| (u - exact.cell_average(gs.interface(j), gs.interface(j + 1), t)).abs())
        .sum::<f64>()
        * gs.dx()
}

/// `dx * sum_j |a_j - b_j|` for two states on the same mesh.
pub fn l1_distance(a: &GridState, b: &GridState) -> f64 {
    assert_eq!(a.len(), b.len(), "meshes differ");
    a.cells().iter().zip(b.cells()).map(|(x, y)| (x - y).abs()).sum::<f64>() * a.dx()
}

pub fn l1_norm(gs: &GridState) -> f64 {
    gs.cells().iter().map(|u| u.abs()).sum::<f64>() * gs.dx()
}

/// `sum |u_{j+1} - u_j|`, including the wrap-around jump on periodic meshes.
pub fn total_variation(gs: &GridState) -> f64 {
    let c = gs.cells();
    let inner: f64 = c.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    match gs.boundary() {
        Boundary::Periodic => inner + (c[0] - c[c.len() - 1]).abs(),
        Boundary::Outflow => inner,
    }
}

/// `dx * sum_j u_j`.
pub fn total_mass(gs: &GridState) -> f64 {
    gs.dx() * gs.cells().iter().sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Ordinary least squares through `(x, y)` points.
pub fn fit_line(points: &[(f64, f64)]) -> Result<LineFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} points", points.len())));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(LineFit { slope, intercept, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `(dx, l1_error)` per mesh.
    pub points: Vec<(f64, f64)>,
    pub fitted_order: f64,
    /// RMS residual of the fit in natural-log units.
    pub fit_residual: f64,
}

/// Least-squares slope of `log(error)` against `log(dx)`.
pub fn convergence_order(runs: &[(f64, f64)]) -> Result<ConvergenceReport> {
    if runs.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 meshes, got {}", runs.len())));
    }
    if let Some(&(dx, e)) = runs.iter().find(|(dx, e)| !(*e > 0.0) || !(*dx > 0.0)) {
        return Err(Error::DegenerateFit(format!(
            "non-positive entry (dx = {dx}, error = {e}); exact runs carry no rate"
        )));
    }
    let logs: Vec<(f64, f64)> = runs.iter().map(|(dx, e)| (dx.ln(), e.ln())).collect();
    let fit = fit_line(&logs)?;
    Ok(ConvergenceReport { points: runs.to_vec(), fitted_order: fit.slope, fit_residual: fit.residual })
}

/// Neighbour traces `(u_{j-1}, u_{j+1})` around reconstructed cells.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct KineticScatter {
    pub pairs: Vec<(f64, f64)>,
}

impl KineticScatter {
    /// Adds the pairs of one step: active cells whose neighbours lie on
    /// opposite sides of zero.
    pub fn push_step(&mut self, active: &[ActiveCell]) {
        self.pairs.extend(active.iter().filter(|a| a.u_prev * a.u_next < 0.0).map(|a| (a.u_prev, a.u_next)));
    }

    pub fn fit(&self) -> Result<LineFit> {
        fit_line(&self.pairs)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn extract_kinetic_pairs(history: &[StepRecord]) -> KineticScatter {
    let mut s = KineticScatter::default();
    for r in history {
        s.push_step(&r.active);
    }
    s
}

/// A sign-changing jump located in a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectedJump {
    pub position: f64,
    pub left: f64,
    pub right: f64,
    pub nonclassical: bool,
}

/// Jumps across `u = 0` with traces read one cell away from the crossing,
/// so a single smeared cell does not pollute them. Traces smaller than
/// `min_amplitude` are skipped. A jump is nonclassical when its right trace
/// overshoots the companion state of the left one.
pub fn detect_zero_crossings(
    gs: &GridState,
    fs: &FluxSpec,
    kf: &KineticFunction,
    min_amplitude: f64,
) -> Result<Vec<DetectedJump>> {
    let k = kf.oriented(fs);
    let ext = gs.extended(2);
    let n = gs.len();
    let last = match gs.boundary() {
        Boundary::Periodic => n,
        Boundary::Outflow => n - 1,
    };
    let mut out = vec![];
    for i in 0..last {
        // cells i and i+1 live at ext[i + 2], ext[i + 3]
        let (a, b) = (ext[i + 2], ext[i + 3]);
        if !(a * b < 0.0 || (a == 0.0) != (b == 0.0)) {
            continue;
        }
        let (left, right) = (ext[i + 1], ext[i + 4]);
        if left.abs() < min_amplitude || left * right >= 0.0 {
            continue;
        }
        let companion = k.companion(fs, left)?;
        out.push(DetectedJump {
            position: gs.interface(i + 1),
            left,
            right,
            nonclassical: right.abs() > companion.abs(),
        });
    }
    Ok(out)
}
