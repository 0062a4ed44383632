//! Conservative finite-volume schemes on a uniform mesh.
//!
//! Every interface flux is owned by its upwind cell: cell `j` produces the
//! flux at `j + 1/2` when `f` is non-decreasing and at `j - 1/2` when it is
//! non-increasing. An owner whose stencil admits a reconstructed
//! discontinuity splits the step at the moment that discontinuity reaches
//! the interface; all other owners fall back to upwinding.

mod grid;

pub use grid::{init_average, Boundary, GridState, InitialData, LinearPiece};

use serde::{Deserialize, Serialize};

use crate::analysis::{total_mass, total_variation};
use crate::error::{Error, Result};
use crate::flux::{entropy_total, EntropyPair, FluxSpec, Monotonicity};
use crate::kinetics::{KineticFunction, Kinetics};

const GHOSTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Upwind,
    /// Nonclassical reconstruction through the kinetic function.
    Reconstruction,
    /// Reconstruction with the upstream trace taken from the raw neighbour
    /// instead of the kinetic image. Known to oscillate.
    VariantTestG,
    /// Discontinuity reconstruction between the two neighbours, exact for
    /// linear advection.
    AdvectionReconstruction,
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub scheme: SchemeKind,
    pub cfl: f64,
    pub flux: FluxSpec,
    pub kinetics: KineticFunction,
    /// Overrides the per-step CFL time step.
    pub fixed_dt: Option<f64>,
}

impl SchemeConfig {
    pub const DEFAULT_CFL: f64 = 0.5;

    pub fn new(scheme: SchemeKind, flux: FluxSpec, kinetics: KineticFunction) -> Self {
        SchemeConfig { scheme, cfl: Self::DEFAULT_CFL, flux, kinetics, fixed_dt: None }
    }

    pub fn with_cfl(mut self, cfl: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {cfl}")));
        }
        self.cfl = cfl;
        Ok(self)
    }

    pub fn with_fixed_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("fixed time step must be positive, got {dt}")));
        }
        self.fixed_dt = Some(dt);
        Ok(self)
    }

    fn kinetics(&self) -> Kinetics<'_> {
        self.kinetics.oriented(&self.flux)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconstructionInfo {
    pub active: bool,
    pub u_left: f64,
    pub u_right: f64,
    /// Fraction of the cell held by `u_left`.
    pub d: f64,
    /// Position of the reconstructed discontinuity.
    pub xbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Recon {
    active: bool,
    u_left: f64,
    u_right: f64,
    d: f64,
}

impl Recon {
    fn inactive(u: f64) -> Self {
        Recon { active: false, u_left: u, u_right: u, d: 0.0 }
    }
}

fn reconstruct(scheme: SchemeKind, k: Kinetics<'_>, mono: Monotonicity, prev: f64, cur: f64, next: f64) -> Recon {
    let (ul, ur) = match scheme {
        SchemeKind::Upwind => return Recon::inactive(cur),
        SchemeKind::Reconstruction => (k.inverse(next), k.forward(prev)),
        SchemeKind::VariantTestG => match mono {
            Monotonicity::NonDecreasing => (prev, k.forward(prev)),
            Monotonicity::NonIncreasing => (k.inverse(next), next),
        },
        SchemeKind::AdvectionReconstruction => (prev, next),
    };
    let jump = ur - ul;
    let scale = 1.0 + ul.abs().max(ur.abs()).max(cur.abs());
    if !(jump.abs() >= 1e-13 * scale) {
        return Recon::inactive(cur);
    }
    let d = (ur - cur) / jump;
    if (0.0..=1.0).contains(&d) {
        Recon { active: true, u_left: ul, u_right: ur, d }
    } else {
        Recon::inactive(cur)
    }
}

/// Flux at the interface owned by a cell, averaged over a step of `dt`.
fn owned_flux(fs: &FluxSpec, rec: &Recon, cur: f64, dt: f64, dx: f64, cell: isize) -> Result<f64> {
    if !rec.active {
        return Ok(fs.eval(cur));
    }
    let sigma = fs.chord_slope(rec.u_left, rec.u_right);
    // `upstream` holds the interface until the discontinuity arrives, then `downstream`.
    let (t_arrive, upstream, downstream) = match fs.monotonicity() {
        Monotonicity::NonDecreasing => {
            if !(sigma > 0.0) {
                return Err(Error::DegenerateSpeed { cell, speed: sigma });
            }
            ((1.0 - rec.d) * dx / sigma, rec.u_right, rec.u_left)
        }
        Monotonicity::NonIncreasing => {
            if !(sigma < 0.0) {
                return Err(Error::DegenerateSpeed { cell, speed: sigma });
            }
            (rec.d * dx / -sigma, rec.u_left, rec.u_right)
        }
    };
    if t_arrive >= dt {
        Ok(fs.eval(upstream))
    } else {
        let w = t_arrive / dt;
        Ok(w * fs.eval(upstream) + (1.0 - w) * fs.eval(downstream))
    }
}

/// An active cell seen during a step, with its stencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActiveCell {
    pub index: usize,
    pub u_prev: f64,
    pub u_cur: f64,
    pub u_next: f64,
    pub info: ReconstructionInfo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub active: Vec<ActiveCell>,
    /// Flux through the left and right domain boundaries.
    pub boundary_fluxes: (f64, f64),
}

struct Prepared {
    ext: Vec<f64>,
    recs: Vec<Recon>,
}

fn prepare(cfg: &SchemeConfig, gs: &GridState) -> Prepared {
    let ext = gs.extended(GHOSTS);
    let k = cfg.kinetics();
    let mono = cfg.flux.monotonicity();
    let mut recs = Vec::with_capacity(ext.len());
    recs.push(Recon::inactive(ext[0]));
    for w in ext.windows(3) {
        recs.push(reconstruct(cfg.scheme, k, mono, w[0], w[1], w[2]));
    }
    recs.push(Recon::inactive(ext[ext.len() - 1]));
    Prepared { ext, recs }
}

fn hull_speed(fs: &FluxSpec, p: &Prepared) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (&u, r) in p.ext.iter().zip(&p.recs) {
        lo = lo.min(u);
        hi = hi.max(u);
        if r.active {
            lo = lo.min(r.u_left.min(r.u_right));
            hi = hi.max(r.u_left.max(r.u_right));
        }
    }
    fs.max_abs_speed(lo, hi)
}

fn dt_from_speed(cfl: f64, dx: f64, m: f64) -> f64 {
    if m > 0.0 {
        cfl * dx / m
    } else {
        f64::INFINITY
    }
}

/// CFL time step. The speed bound covers every cell value and every state
/// produced by an active reconstruction, ghosts included.
pub fn cfl_dt(cfg: &SchemeConfig, gs: &GridState) -> f64 {
    if let Some(dt) = cfg.fixed_dt {
        return dt;
    }
    dt_from_speed(cfg.cfl, gs.dx(), hull_speed(&cfg.flux, &prepare(cfg, gs)))
}

/// A time step that stays admissible for any later state bounded by the
/// hull of `gs` and its kinetic images. Used to freeze the step size.
pub fn conservative_dt(cfg: &SchemeConfig, gs: &GridState) -> f64 {
    let k = cfg.kinetics();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &u in gs.cells() {
        let mut bump = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        bump(u);
        if cfg.scheme != SchemeKind::Upwind && cfg.scheme != SchemeKind::AdvectionReconstruction {
            bump(k.forward(u));
            bump(k.inverse(u));
        }
    }
    dt_from_speed(cfg.cfl, gs.dx(), cfg.flux.max_abs_speed(lo, hi))
}

fn info_at(gs: &GridState, j: usize, r: &Recon) -> ReconstructionInfo {
    ReconstructionInfo {
        active: r.active,
        u_left: r.u_left,
        u_right: r.u_right,
        d: r.d,
        xbar: gs.interface(j) + r.d * gs.dx(),
    }
}

/// Reconstruction of cell `j`, with ghost neighbours at the domain ends.
pub fn reconstruct_cell(cfg: &SchemeConfig, gs: &GridState, j: usize) -> ReconstructionInfo {
    let ext = gs.extended(GHOSTS);
    let e = j + GHOSTS;
    let r = reconstruct(cfg.scheme, cfg.kinetics(), cfg.flux.monotonicity(), ext[e - 1], ext[e], ext[e + 1]);
    info_at(gs, j, &r)
}

/// Flux that cell `j` contributes over a step of `dt`: at its right
/// interface for non-decreasing fluxes, at its left one otherwise.
pub fn reconstruction_flux(cfg: &SchemeConfig, gs: &GridState, j: usize, dt: f64) -> Result<f64> {
    let ext = gs.extended(GHOSTS);
    let e = j + GHOSTS;
    let r = reconstruct(cfg.scheme, cfg.kinetics(), cfg.flux.monotonicity(), ext[e - 1], ext[e], ext[e + 1]);
    owned_flux(&cfg.flux, &r, ext[e], dt, gs.dx(), j as isize)
}

fn advance(cfg: &SchemeConfig, gs: &GridState, p: &Prepared, dt: f64) -> Result<(GridState, StepInfo)> {
    let n = gs.len();
    let dx = gs.dx();
    // Owner of interface i (between cells i-1 and i) in extended indexing.
    let shift = match cfg.flux.monotonicity() {
        Monotonicity::NonDecreasing => GHOSTS - 1,
        Monotonicity::NonIncreasing => GHOSTS,
    };
    let mut degenerate = vec![];
    let mut fluxes = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let e = i + shift;
        let cell = e as isize - GHOSTS as isize;
        let f = match owned_flux(&cfg.flux, &p.recs[e], p.ext[e], dt, dx, cell) {
            Ok(f) => f,
            Err(err) => {
                log::warn!("{err}; using the upwind flux");
                degenerate.push(e);
                cfg.flux.eval(p.ext[e])
            }
        };
        fluxes.push(f);
    }

    let nu = dt / dx;
    let t = gs.t() + dt;
    let mut cells = Vec::with_capacity(n);
    for j in 0..n {
        let u = p.ext[j + GHOSTS] - nu * (fluxes[j + 1] - fluxes[j]);
        if !u.is_finite() {
            return Err(Error::NonFinite { cell: j, value: u, t });
        }
        cells.push(u);
    }

    let active = (0..n)
        .filter_map(|j| {
            let e = j + GHOSTS;
            let r = &p.recs[e];
            (r.active && !degenerate.contains(&e)).then(|| ActiveCell {
                index: j,
                u_prev: p.ext[e - 1],
                u_cur: p.ext[e],
                u_next: p.ext[e + 1],
                info: info_at(gs, j, r),
            })
        })
        .collect();

    Ok((gs.advanced(cells, t), StepInfo { dt, active, boundary_fluxes: (fluxes[0], fluxes[n]) }))
}

/// One step with the CFL (or fixed) time step.
pub fn step(cfg: &SchemeConfig, gs: &GridState) -> Result<GridState> {
    step_detailed(cfg, gs).map(|(g, _)| g)
}

pub fn step_detailed(cfg: &SchemeConfig, gs: &GridState) -> Result<(GridState, StepInfo)> {
    let p = prepare(cfg, gs);
    let dt = match cfg.fixed_dt {
        Some(dt) => dt,
        None => dt_from_speed(cfg.cfl, gs.dx(), hull_speed(&cfg.flux, &p)),
    };
    advance(cfg, gs, &p, dt)
}

/// One step with a caller-chosen `dt`.
pub fn step_with_dt(cfg: &SchemeConfig, gs: &GridState, dt: f64) -> Result<(GridState, StepInfo)> {
    advance(cfg, gs, &prepare(cfg, gs), dt)
}

/// Advances to `t_end`, shortening the last step to land on it exactly.
/// `observe` sees every new state with the step that produced it.
pub fn run_with<O>(cfg: &SchemeConfig, gs: &GridState, t_end: f64, mut observe: O) -> Result<GridState>
where
    O: FnMut(&GridState, &StepInfo),
{
    if !(t_end >= gs.t()) {
        return Err(Error::Config(format!("t_end = {t_end} lies before the current time {}", gs.t())));
    }
    let mut state = gs.clone();
    while state.t() < t_end {
        let p = prepare(cfg, &state);
        let mut dt = match cfg.fixed_dt {
            Some(dt) => dt,
            None => dt_from_speed(cfg.cfl, state.dx(), hull_speed(&cfg.flux, &p)),
        };
        let last = state.t() + dt >= t_end;
        if last {
            dt = t_end - state.t();
        }
        let (mut next, info) = advance(cfg, &state, &p, dt)?;
        if last {
            next = next.with_time(t_end);
        }
        observe(&next, &info);
        state = next;
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub mass: f64,
    pub total_variation: f64,
    pub entropy: f64,
    pub active: Vec<ActiveCell>,
    pub boundary_fluxes: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: GridState,
    pub records: Vec<StepRecord>,
}

/// [`run_with`] that keeps per-step diagnostics.
pub fn run(cfg: &SchemeConfig, gs: &GridState, t_end: f64) -> Result<RunOutput> {
    let ep = EntropyPair::quadratic(&cfg.flux);
    let mut records = vec![];
    let state = run_with(cfg, gs, t_end, |g, info| {
        records.push(StepRecord {
            t: g.t(),
            dt: info.dt,
            mass: total_mass(g),
            total_variation: total_variation(g),
            entropy: entropy_total(&ep, g),
            active: info.active.clone(),
            boundary_fluxes: info.boundary_fluxes,
        })
    })?;
    Ok(RunOutput { state, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(scheme: SchemeKind) -> SchemeConfig {
        SchemeConfig::new(scheme, FluxSpec::cubic_plus(), KineticFunction::linear(0.75).unwrap())
    }

    fn grid(cells: &[f64], boundary: Boundary) -> GridState {
        GridState::from_cells(cells.to_vec(), 0.0, 0.1, boundary).unwrap()
    }

    fn shock_average(ul: f64, ur: f64, pos: f64, a: f64, b: f64) -> f64 {
        if pos <= a {
            ur
        } else if pos >= b {
            ul
        } else {
            ((pos - a) * ul + (b - pos) * ur) / (b - a)
        }
    }

    #[test]
    fn reconstruction_examples() {
        let c = cfg(SchemeKind::Reconstruction);
        let gs = grid(&[4.0, 0.5, -3.0], Boundary::Outflow);
        let r = reconstruct_cell(&c, &gs, 1);
        assert!(r.active);
        assert_eq!((r.u_left, r.u_right, r.d), (4.0, -3.0, 0.5));
        assert!((r.xbar - 0.15).abs() < 1e-15);

        let gs = grid(&[1.3, 1.3, 1.3], Boundary::Outflow);
        assert!(!reconstruct_cell(&c, &gs, 1).active);

        let gs = grid(&[4.0, -3.0, -3.0], Boundary::Outflow);
        let r = reconstruct_cell(&c, &gs, 1);
        assert!(r.active);
        assert_eq!(r.d, 0.0);
    }

    #[test]
    fn variant_uses_raw_upstream_neighbour() {
        let c = cfg(SchemeKind::VariantTestG);
        let gs = grid(&[4.0, 0.5, -1.0], Boundary::Outflow);
        let r = reconstruct_cell(&c, &gs, 1);
        assert_eq!((r.u_left, r.u_right), (4.0, -3.0));
    }

    #[test]
    fn flux_examples() {
        let c = cfg(SchemeKind::Reconstruction);
        let gs = grid(&[4.0, 0.5, -3.0], Boundary::Outflow);
        // half a cell from the interface at speed 14
        let dt = 0.5 * 0.1 / 14.0;
        assert_eq!(reconstruction_flux(&c, &gs, 1, dt).unwrap(), -30.0);
        assert_eq!(reconstruction_flux(&c, &gs, 1, 0.5 * dt).unwrap(), -30.0);

        let gs = grid(&[2.0, 2.0, 2.0], Boundary::Outflow);
        assert_eq!(reconstruction_flux(&c, &gs, 1, 1e-3).unwrap(), 10.0);

        // d = 1: the discontinuity sits on the outgoing interface
        let gs = grid(&[4.0, 4.0, -3.0], Boundary::Outflow);
        let r = reconstruct_cell(&c, &gs, 1);
        assert!(r.active && r.d == 1.0);
        assert_eq!(reconstruction_flux(&c, &gs, 1, 1e-3).unwrap(), 68.0);
    }

    #[test]
    fn cfl_examples() {
        let c = cfg(SchemeKind::Reconstruction);
        let gs = grid(&[4.0, 4.0, 0.5, -3.0, -3.0], Boundary::Outflow);
        assert!((cfl_dt(&c, &gs) - 0.5 * 0.1 / 49.0).abs() < 1e-18);

        let adv = SchemeConfig::new(
            SchemeKind::AdvectionReconstruction,
            FluxSpec::advection(1.0).unwrap(),
            KineticFunction::linear(0.75).unwrap(),
        );
        let gs = grid(&[1.0, 0.3, 0.0, 0.0], Boundary::Outflow);
        assert!((cfl_dt(&adv, &gs) - 0.05).abs() < 1e-18);

        let gs = grid(&[0.0; 5], Boundary::Outflow);
        assert!((cfl_dt(&c, &gs) - 0.05).abs() < 1e-18);

        assert!(SchemeConfig::new(SchemeKind::Upwind, FluxSpec::cubic_plus(), KineticFunction::linear(0.75).unwrap())
            .with_cfl(1.5)
            .is_err());
    }

    #[test]
    fn constant_state_is_steady() {
        for scheme in [SchemeKind::Upwind, SchemeKind::Reconstruction, SchemeKind::VariantTestG] {
            let gs = grid(&[-1.7; 8], Boundary::Periodic);
            let next = step(&cfg(scheme), &gs).unwrap();
            assert_eq!(next.cells(), gs.cells());
        }
    }

    #[test]
    fn single_shock_step_is_exact() {
        let c = cfg(SchemeKind::Reconstruction);
        let u0 = InitialData::step(0.0, 4.0, -3.0);
        let gs = init_average(&u0, (-1.0, 2.0), 60, Boundary::Outflow).unwrap();
        let mut state = gs.clone();
        for _ in 0..40 {
            state = step(&c, &state).unwrap();
            let pos = 14.0 * state.t();
            for (j, &u) in state.cells().iter().enumerate() {
                let exact = shock_average(4.0, -3.0, pos, state.interface(j), state.interface(j + 1));
                assert!((u - exact).abs() < 1e-10, "t = {} cell {j}: {u} vs {exact}", state.t());
            }
        }
    }

    #[test]
    fn run_lands_on_t_end_and_records() {
        let c = cfg(SchemeKind::Reconstruction);
        let gs = init_average(&InitialData::step(0.0, 4.0, -3.0), (-1.0, 2.0), 30, Boundary::Outflow).unwrap();
        let out = run(&c, &gs, 0.1).unwrap();
        assert_eq!(out.state.t(), 0.1);
        assert!(out.records.iter().all(|r| r.active.len() <= 2 && (r.total_variation - 7.0).abs() < 1e-9));
        let same = run(&c, &gs, 0.0).unwrap();
        assert_eq!(same.state, gs);
        assert!(same.records.is_empty());
        assert!(run(&c, &gs.clone().with_time(1.0), 0.5).is_err());
    }

    #[test]
    fn outflow_mass_balance() {
        let c = cfg(SchemeKind::Reconstruction);
        let gs = init_average(&InitialData::step(0.0, 4.0, -5.0), (-1.0, 1.0), 50, Boundary::Outflow).unwrap();
        let (next, info) = step_detailed(&c, &gs).unwrap();
        let (fin, fout) = info.boundary_fluxes;
        let before: f64 = gs.cells().iter().sum();
        let after: f64 = next.cells().iter().sum();
        let expected = info.dt / gs.dx() * (fin - fout);
        assert!((after - before - expected).abs() < 1e-12 * gs.cells().iter().map(|u| u.abs()).sum::<f64>());
    }

    #[test]
    fn advection_reconstruction_is_exact() {
        let fs = FluxSpec::advection(1.0).unwrap();
        let c =
            SchemeConfig::new(SchemeKind::AdvectionReconstruction, fs.clone(), KineticFunction::linear(0.75).unwrap());
        let gs = init_average(&InitialData::step(0.0, 1.0, 0.0), (-1.0, 1.0), 40, Boundary::Outflow).unwrap();
        let out = run(&c, &gs, 0.4).unwrap();
        let fan = crate::riemann::solve_classical(&fs, 1.0, 0.0).unwrap();
        for (j, &u) in out.state.cells().iter().enumerate() {
            let exact = fan.cell_average(&fs, 0.0, out.state.interface(j), out.state.interface(j + 1), 0.4);
            assert!((u - exact).abs() < 1e-12, "{j}: {u} vs {exact}");
        }
    }

    proptest! {
        #[test]
        fn flux_is_consistent_on_flat_stencils(u in prop_oneof![-10.0..-1e-3f64, 1e-3..10.0f64], dt in 1e-6..1e-3f64) {
            let c = cfg(SchemeKind::Reconstruction);
            let gs = grid(&[u, u, u], Boundary::Outflow);
            prop_assert_eq!(reconstruction_flux(&c, &gs, 1, dt).unwrap(), c.flux.eval(u));
        }

        #[test]
        fn periodic_runs_conserve_mass(cells in prop::collection::vec(-3.0..3.0f64, 5..40)) {
            for scheme in [SchemeKind::Reconstruction, SchemeKind::VariantTestG, SchemeKind::Upwind] {
                let mut gs = grid(&cells, Boundary::Periodic);
                let scale: f64 = cells.iter().map(|u| u.abs()).sum::<f64>().max(1.0);
                for _ in 0..20 {
                    let before: f64 = gs.cells().iter().sum();
                    gs = step(&cfg(scheme), &gs).unwrap();
                    let after: f64 = gs.cells().iter().sum();
                    prop_assert!((after - before).abs() <= 1e-12 * scale);
                }
            }
        }

        #[test]
        fn active_cells_satisfy_the_reconstruction_invariants(cells in prop::collection::vec(-4.0..4.0f64, 5..30)) {
            let c = cfg(SchemeKind::Reconstruction);
            let gs = grid(&cells, Boundary::Outflow);
            let out = run(&c, &gs, 0.01).unwrap();
            for rec in &out.records {
                for a in &rec.active {
                    let i = a.info;
                    prop_assert!((0.0..=1.0).contains(&i.d));
                    let recomposed = i.d * i.u_left + (1.0 - i.d) * i.u_right;
                    prop_assert!((recomposed - a.u_cur).abs() <= 1e-12 * (1.0 + a.u_cur.abs().max(i.u_left.abs()).max(i.u_right.abs())));
                }
            }
        }
    }
}
