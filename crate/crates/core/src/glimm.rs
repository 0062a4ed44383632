//! Random-choice scheme driven by the exact nonclassical Riemann solver.
//!
//! Each step solves the Riemann problem at every interface and samples one
//! point per cell, shared across the mesh, from the van der Corput sequence.

use crate::error::{Error, Result};
use crate::flux::{FluxSpec, Monotonicity};
use crate::kinetics::KineticFunction;
use crate::riemann::{RiemannSolver, WaveFan};
use crate::schemes::GridState;

/// Binary radical inverse of `n`; `n = 0` maps to 0.
pub fn van_der_corput(n: u64) -> f64 {
    let mut n = n;
    let mut scale = 0.5;
    let mut x = 0.0;
    while n > 0 {
        if n & 1 == 1 {
            x += scale;
        }
        scale *= 0.5;
        n >>= 1;
    }
    x
}

#[derive(Debug, Clone)]
pub struct GlimmConfig {
    pub cfl: f64,
    pub flux: FluxSpec,
    pub kinetics: KineticFunction,
    /// Step `k` (from 0) samples sequence element `sequence_offset + k + 1`.
    pub sequence_offset: u64,
}

impl GlimmConfig {
    pub const DEFAULT_CFL: f64 = 0.45;

    pub fn new(flux: FluxSpec, kinetics: KineticFunction) -> Self {
        GlimmConfig { cfl: Self::DEFAULT_CFL, flux, kinetics, sequence_offset: 0 }
    }

    pub fn with_cfl(mut self, cfl: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 0.5) {
            return Err(Error::Config(format!("random-choice cfl must lie in (0, 0.5], got {cfl}")));
        }
        self.cfl = cfl;
        Ok(self)
    }

    pub fn with_sequence_offset(mut self, n0: u64) -> Self {
        self.sequence_offset = n0;
        self
    }
}

/// A Glimm integrator with its solver built once.
#[derive(Debug, Clone)]
pub struct Glimm {
    cfg: GlimmConfig,
    solver: RiemannSolver,
    fans: Vec<Option<WaveFan>>,
    /// Last sequence element used.
    index: u64,
}

impl Glimm {
    pub fn new(cfg: GlimmConfig) -> Result<Self> {
        let solver = RiemannSolver::nonclassical(&cfg.flux, &cfg.kinetics)?;
        let index = cfg.sequence_offset;
        Ok(Glimm { cfg, solver, fans: vec![], index })
    }

    pub fn config(&self) -> &GlimmConfig {
        &self.cfg
    }

    /// Sequence element the next step of [`Glimm::run_with`] will use.
    pub fn next_index(&self) -> u64 {
        self.index + 1
    }

    /// Solves every interface problem; returns the largest wave speed.
    fn solve_interfaces(&mut self, ext: &[f64]) -> Result<f64> {
        self.fans.clear();
        let fs = self.solver.flux();
        let mut m: f64 = 0.0;
        for w in ext.windows(2) {
            if w[0] == w[1] {
                m = m.max(fs.eval_deriv(w[0]).abs());
                self.fans.push(None);
            } else {
                let fan = self.solver.solve(w[0], w[1])?;
                m = m.max(fan.max_abs_speed());
                self.fans.push(Some(fan));
            }
        }
        Ok(m)
    }

    fn sample(&self, ext: &[f64], j: usize, xi: f64) -> f64 {
        let fs = self.solver.flux();
        // interface between ext[i] and ext[i + 1] is fans[i]; cell j is ext[j + 1]
        let i = match fs.monotonicity() {
            Monotonicity::NonDecreasing => j,
            Monotonicity::NonIncreasing => j + 1,
        };
        match &self.fans[i] {
            None => ext[i],
            Some(fan) => fan.sample(fs, xi),
        }
    }

    /// One step with element `n` of the sequence and at most `max_dt`.
    pub fn step(&mut self, gs: &GridState, n: u64, max_dt: f64) -> Result<GridState> {
        let ext = gs.extended(1);
        let m = self.solve_interfaces(&ext)?;
        let dx = gs.dx();
        let mut dt = if m > 0.0 { self.cfg.cfl * dx / m } else { f64::INFINITY };
        let last = dt >= max_dt;
        if last {
            dt = max_dt;
        }
        let a = van_der_corput(n);
        let xi = match self.solver.flux().monotonicity() {
            Monotonicity::NonDecreasing => a * dx / dt,
            Monotonicity::NonIncreasing => (a - 1.0) * dx / dt,
        };
        let cells = (0..gs.len()).map(|j| self.sample(&ext, j, xi)).collect();
        let t = if last { gs.t() + max_dt } else { gs.t() + dt };
        let mut out = GridState::from_cells(cells, gs.x_left(), dx, gs.boundary())?;
        out = out.with_time(t);
        Ok(out)
    }

    /// Advances to `t_end`; `observe` sees each new state. Later calls
    /// continue the sequence where this one stopped.
    pub fn run_with<O: FnMut(&GridState)>(&mut self, gs: &GridState, t_end: f64, mut observe: O) -> Result<GridState> {
        if !(t_end >= gs.t()) {
            return Err(Error::Config(format!("t_end = {t_end} lies before the current time {}", gs.t())));
        }
        let mut state = gs.clone();
        while state.t() < t_end {
            self.index += 1;
            let remaining = t_end - state.t();
            let mut next = self.step(&state, self.index, remaining)?;
            if next.t() >= t_end {
                next = next.with_time(t_end);
            }
            observe(&next);
            state = next;
        }
        Ok(state)
    }

    pub fn run(&mut self, gs: &GridState, t_end: f64) -> Result<GridState> {
        self.run_with(gs, t_end, |_| {})
    }
}

/// One step with sequence element `n` (n >= 1).
pub fn glimm_step(cfg: &GlimmConfig, gs: &GridState, n: u64) -> Result<GridState> {
    Glimm::new(cfg.clone())?.step(gs, n, f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{init_average, Boundary, InitialData};

    fn cfg() -> GlimmConfig {
        GlimmConfig::new(FluxSpec::cubic_plus(), KineticFunction::linear(0.75).unwrap())
    }

    #[test]
    fn sequence_values() {
        assert_eq!(van_der_corput(1), 0.5);
        assert_eq!(van_der_corput(2), 0.25);
        assert_eq!(van_der_corput(3), 0.75);
        assert_eq!(van_der_corput(4), 0.125);
        assert_eq!(van_der_corput(6), 0.375);
        for n in 1..1000 {
            let a = van_der_corput(n);
            assert!(a > 0.0 && a < 1.0);
        }
    }

    #[test]
    fn constant_state_is_steady() {
        let gs = GridState::from_cells(vec![0.7; 10], 0.0, 0.1, Boundary::Periodic).unwrap();
        for n in 1..20 {
            assert_eq!(glimm_step(&cfg(), &gs, n).unwrap().cells(), gs.cells());
        }
    }

    #[test]
    fn isolated_shock_position() {
        let u0 = InitialData::step(0.0, 4.0, -3.0);
        let gs = init_average(&u0, (-1.0, 2.0), 300, Boundary::Outflow).unwrap();
        let mut g = Glimm::new(cfg()).unwrap();
        let out = g.run(&gs, 0.1).unwrap();
        assert!(out.cells().iter().all(|&u| u == 4.0 || u == -3.0));
        let k = out.cells().iter().position(|&u| u == -3.0).unwrap();
        let pos = out.interface(k);
        assert!((pos - 1.4).abs() <= 2.0 * gs.dx(), "shock at {pos}");
    }

    #[test]
    fn values_come_from_neighbouring_fans() {
        let u0 = InitialData::Sine { amplitude: 1.0, wavenumber: 2.0 * std::f64::consts::PI };
        let mut gs = init_average(&u0, (-0.5, 0.5), 64, Boundary::Periodic).unwrap();
        let mut g = Glimm::new(cfg()).unwrap();
        for n in 1..40 {
            let next = g.step(&gs, n, f64::INFINITY).unwrap();
            let ext = gs.extended(1);
            for (j, &u) in next.cells().iter().enumerate() {
                let (a, b) = (ext[j], ext[j + 1]);
                let fan = crate::riemann::solve_nonclassical(&g.cfg.flux, &g.cfg.kinetics, a, b).unwrap();
                let mut lo = a.min(b);
                let mut hi = a.max(b);
                for w in &fan.waves {
                    lo = lo.min(w.right_state);
                    hi = hi.max(w.right_state);
                }
                assert!(u >= lo && u <= hi);
            }
            gs = next;
        }
    }

    #[test]
    fn runs_are_reproducible_and_continue_the_sequence() {
        let u0 = InitialData::Sine { amplitude: 1.0, wavenumber: 2.0 * std::f64::consts::PI };
        let gs = init_average(&u0, (-0.5, 0.5), 50, Boundary::Periodic).unwrap();
        let mut a = Glimm::new(cfg().with_sequence_offset(7)).unwrap();
        let mut b = Glimm::new(cfg().with_sequence_offset(7)).unwrap();
        assert_eq!(a.next_index(), 8);
        let ra = a.run(&gs, 0.05).unwrap();
        assert_eq!(ra, b.run(&gs, 0.05).unwrap());
        assert!(a.next_index() > 8);
        let other = Glimm::new(cfg().with_sequence_offset(8)).unwrap().run(&gs, 0.05).unwrap();
        assert_ne!(ra, other);
    }

    #[test]
    fn mirrored_flux_runs_left() {
        let c = GlimmConfig::new(FluxSpec::cubic_minus(), KineticFunction::linear(0.75).unwrap());
        let gs = init_average(&InitialData::step(0.0, -3.0, 4.0), (-2.0, 1.0), 300, Boundary::Outflow).unwrap();
        let out = Glimm::new(c).unwrap().run(&gs, 0.1).unwrap();
        let k = out.cells().iter().position(|&u| u == 4.0).unwrap();
        assert!((out.interface(k) + 1.4).abs() <= 2.0 * gs.dx());
    }
}
