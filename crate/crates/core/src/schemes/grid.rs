use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Ghost cells copy the end values.
    Outflow,
    Periodic,
}

/// Cell averages on a uniform mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    x_left: f64,
    dx: f64,
    t: f64,
    cells: Vec<f64>,
    boundary: Boundary,
}

impl GridState {
    pub fn from_cells(cells: Vec<f64>, x_left: f64, dx: f64, boundary: Boundary) -> Result<Self> {
        if cells.is_empty() || !(dx > 0.0) || !dx.is_finite() || !x_left.is_finite() {
            return Err(Error::BadDomain { lo: x_left, hi: x_left + dx * cells.len() as f64, cells: cells.len() });
        }
        if let Some((j, &v)) = cells.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { cell: j, value: v, t: 0.0 });
        }
        Ok(GridState { x_left, dx, t: 0.0, cells, boundary })
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.interface(self.cells.len())
    }

    /// Position of interface `i` (left edge of cell `i`).
    pub fn interface(&self, i: usize) -> f64 {
        self.x_left + i as f64 * self.dx
    }

    pub fn center(&self, j: usize) -> f64 {
        self.x_left + (j as f64 + 0.5) * self.dx
    }

    /// Cells padded with `ghosts` values on each side by the boundary rule.
    pub(crate) fn extended(&self, ghosts: usize) -> Vec<f64> {
        let n = self.cells.len();
        let mut ext = Vec::with_capacity(n + 2 * ghosts);
        for g in (1..=ghosts).rev() {
            ext.push(match self.boundary {
                Boundary::Outflow => self.cells[0],
                Boundary::Periodic => self.cells[(n * ghosts - g) % n],
            });
        }
        ext.extend_from_slice(&self.cells);
        for g in 0..ghosts {
            ext.push(match self.boundary {
                Boundary::Outflow => self.cells[n - 1],
                Boundary::Periodic => self.cells[g % n],
            });
        }
        ext
    }

    pub(crate) fn advanced(&self, cells: Vec<f64>, t: f64) -> Self {
        GridState { x_left: self.x_left, dx: self.dx, t, cells, boundary: self.boundary }
    }
}

/// `intercept + slope * x` on one piece of piecewise-linear data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPiece {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearPiece {
    pub fn constant(v: f64) -> Self {
        LinearPiece { intercept: v, slope: 0.0 }
    }

    fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    fn integral(&self, lo: f64, hi: f64) -> f64 {
        if self.slope == 0.0 {
            self.intercept * (hi - lo)
        } else {
            (hi - lo) * self.eval(0.5 * (lo + hi))
        }
    }
}

#[derive(Clone)]
pub enum InitialData {
    /// `pieces[k]` holds on `(breakpoints[k-1], breakpoints[k])`.
    Piecewise { breakpoints: Vec<f64>, pieces: Vec<LinearPiece> },
    /// `amplitude * sin(wavenumber * x)`
    Sine { amplitude: f64, wavenumber: f64 },
    /// Anything else; averaged with five-point Gauss quadrature.
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::Piecewise { breakpoints, pieces } => {
                f.debug_struct("Piecewise").field("breakpoints", breakpoints).field("pieces", pieces).finish()
            }
            InitialData::Sine { amplitude, wavenumber } => {
                write!(f, "Sine {{ amplitude: {amplitude}, wavenumber: {wavenumber} }}")
            }
            InitialData::Function(_) => write!(f, "Function"),
        }
    }
}

impl InitialData {
    pub fn step(x0: f64, ul: f64, ur: f64) -> Self {
        InitialData::piecewise_constant(vec![x0], vec![ul, ur]).unwrap()
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let pieces = values.into_iter().map(LinearPiece::constant).collect();
        InitialData::piecewise(breakpoints, pieces)
    }

    pub fn piecewise(breakpoints: Vec<f64>, pieces: Vec<LinearPiece>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Config(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("breakpoints must be strictly increasing".into()));
        }
        Ok(InitialData::Piecewise { breakpoints, pieces })
    }

    pub fn function<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        InitialData::Function(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            InitialData::Piecewise { breakpoints, pieces } => {
                let k = breakpoints.partition_point(|&b| b <= x);
                pieces[k].eval(x)
            }
            InitialData::Sine { amplitude, wavenumber } => amplitude * (wavenumber * x).sin(),
            InitialData::Function(f) => f(x),
        }
    }

    /// Exact average over `[a, b]` for piecewise-linear and sine data.
    pub fn cell_average(&self, a: f64, b: f64) -> f64 {
        let len = b - a;
        match self {
            InitialData::Piecewise { breakpoints, pieces } => {
                let mut total = 0.0;
                for (k, piece) in pieces.iter().enumerate() {
                    let lo = if k == 0 { f64::NEG_INFINITY } else { breakpoints[k - 1] };
                    let hi = breakpoints.get(k).copied().unwrap_or(f64::INFINITY);
                    let (lo, hi) = (lo.max(a), hi.min(b));
                    if hi > lo {
                        total += piece.integral(lo, hi);
                    }
                }
                total / len
            }
            InitialData::Sine { amplitude, wavenumber } => {
                let half = 0.5 * wavenumber * len;
                let mid = 0.5 * wavenumber * (a + b);
                amplitude * mid.sin() * half.sin() / half
            }
            InitialData::Function(f) => gauss5(|x| f(x), a, b) / len,
        }
    }
}

/// Cell averages of `u0` on `n_cells` uniform cells of `domain`.
pub fn init_average(u0: &InitialData, domain: (f64, f64), n_cells: usize, boundary: Boundary) -> Result<GridState> {
    let (lo, hi) = domain;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || n_cells < 3 {
        return Err(Error::BadDomain { lo, hi, cells: n_cells });
    }
    let dx = (hi - lo) / n_cells as f64;
    let cells = (0..n_cells)
        .map(|j| {
            let a = lo + j as f64 * dx;
            u0.cell_average(a, a + dx)
        })
        .collect();
    GridState::from_cells(cells, lo, dx, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_step() {
        let gs = init_average(&InitialData::step(0.0, 4.0, -3.0), (-1.0, 1.0), 4, Boundary::Outflow).unwrap();
        assert_eq!(gs.cells(), &[4.0, 4.0, -3.0, -3.0]);
        assert_eq!(gs.dx(), 0.5);
    }

    #[test]
    fn step_inside_a_cell() {
        // cell [0, 1) with the jump at 0.25
        let gs = init_average(&InitialData::step(0.25, 4.0, -3.0), (-1.0, 2.0), 3, Boundary::Outflow).unwrap();
        assert!((gs.cells()[1] - (0.25 * 4.0 + 0.75 * -3.0)).abs() < 1e-15);
    }

    #[test]
    fn constant_data() {
        let gs = init_average(&InitialData::function(|_| 7.0), (0.0, 1.0), 10, Boundary::Periodic).unwrap();
        assert!(gs.cells().iter().all(|&u| (u - 7.0).abs() < 1e-14));
    }

    #[test]
    fn ramp_and_sine_averages_match_quadrature() {
        let ramp = InitialData::piecewise(
            vec![-0.5, -0.45],
            vec![
                LinearPiece::constant(0.0),
                LinearPiece { intercept: 10.0, slope: 20.0 },
                LinearPiece::constant(-0.75),
            ],
        )
        .unwrap();
        let sine = InitialData::Sine { amplitude: 1.0, wavenumber: 2.0 * std::f64::consts::PI };
        for data in [&ramp, &sine] {
            for k in 0..40 {
                let a = -0.6 + 0.0113 * k as f64;
                let b = a + 0.0113;
                let (panels, tol) =
                    if matches!(data, InitialData::Piecewise { .. }) { (20_000, 5e-4) } else { (64, 1e-12) };
                let q = crate::quadrature::gauss5_composite(|x| data.eval(x), a, b, panels) / (b - a);
                let got = data.cell_average(a, b);
                assert!((got - q).abs() < tol, "{data:?} [{a},{b}] {got} vs {q}");
            }
        }
        // the ramp is exact on cells that avoid the jump
        assert!((ramp.cell_average(-0.49, -0.47) - (10.0 + 20.0 * -0.48)).abs() < 1e-13);
    }

    #[test]
    fn bad_domains() {
        let u0 = InitialData::step(0.0, 1.0, 0.0);
        assert!(matches!(init_average(&u0, (1.0, 1.0), 10, Boundary::Outflow), Err(Error::BadDomain { .. })));
        assert!(init_average(&u0, (0.0, 1.0), 2, Boundary::Outflow).is_err());
        assert!(InitialData::piecewise_constant(vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn ghost_extension() {
        let gs = GridState::from_cells(vec![1.0, 2.0, 3.0], 0.0, 1.0, Boundary::Outflow).unwrap();
        assert_eq!(gs.extended(2), vec![1.0, 1.0, 1.0, 2.0, 3.0, 3.0, 3.0]);
        let gs = GridState::from_cells(vec![1.0, 2.0, 3.0], 0.0, 1.0, Boundary::Periodic).unwrap();
        assert_eq!(gs.extended(2), vec![2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0]);
    }
}
