use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sharpshock::analysis::{
    convergence_order, l1_error, total_mass, total_variation, ConvergenceReport, KineticScatter, LineFit, RiemannExact,
};
use sharpshock::glimm::{Glimm, GlimmConfig};
use sharpshock::presets::Preset;
use sharpshock::riemann::solve_nonclassical;
use sharpshock::schemes::{conservative_dt, init_average, run_with, GridState, SchemeConfig, SchemeKind};

use crate::config::{ExperimentSpec, RawConfig, SchemeChoice};
use crate::error::{CliError, Result};

/// Summary written to `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub preset: String,
    pub scheme: SchemeChoice,
    pub flux: String,
    pub beta: f64,
    pub cells: usize,
    pub dx: f64,
    pub domain: (f64, f64),
    pub t_end: f64,
    pub cfl: f64,
    pub fixed_dt: Option<f64>,
    pub sequence_offset: Option<u64>,
    pub config: RawConfig,
    pub notes: Vec<String>,
    pub steps: usize,
    pub initial_mass: f64,
    pub final_mass: f64,
    pub max_total_variation: f64,
    pub final_total_variation: f64,
    pub l1_error: Option<f64>,
    pub snapshots: Vec<String>,
    pub scatter_points: usize,
    pub scatter_fit: Option<LineFit>,
    pub convergence: Option<ConvergenceReport>,
    pub interaction: Option<InteractionCheck>,
}

/// Comparison with the single wave left after the two shocks of the
/// interaction problem merge.
#[derive(Debug, Clone, Serialize)]
pub struct InteractionCheck {
    pub collision_time: f64,
    pub collision_position: f64,
    pub l1_error: f64,
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e.into()))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::io(path, e.into()))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct SnapshotRow {
    t: f64,
    x: f64,
    u: f64,
}

#[derive(Serialize)]
struct ConvergenceRow {
    dx: f64,
    error: f64,
}

#[derive(Serialize)]
struct ScatterRow {
    #[serde(rename = "uL")]
    u_left: f64,
    #[serde(rename = "uR")]
    u_right: f64,
}

fn write_snapshot(dir: &Path, k: usize, gs: &GridState) -> Result<String> {
    let name = format!("snapshot_{k:03}.csv");
    let rows = gs.cells().iter().enumerate().map(|(j, &u)| SnapshotRow { t: gs.t(), x: gs.center(j), u });
    write_csv(&dir.join(&name), rows)?;
    Ok(name)
}

struct Trace {
    steps: usize,
    max_tv: f64,
    scatter: KineticScatter,
}

impl Trace {
    fn new(gs: &GridState) -> Self {
        Trace { steps: 0, max_tv: total_variation(gs), scatter: KineticScatter::default() }
    }

    fn record(&mut self, gs: &GridState) {
        self.steps += 1;
        self.max_tv = self.max_tv.max(total_variation(gs));
    }
}

fn scheme_config(spec: &ExperimentSpec, kind: SchemeKind, initial: &GridState) -> Result<SchemeConfig> {
    let p = &spec.problem;
    let kinetics = p.kinetics().map_err(|e| CliError::solver("beta", e))?;
    let mut cfg = SchemeConfig::new(kind, p.flux.clone(), kinetics);
    if let Some(cfl) = spec.cfl {
        cfg = cfg.with_cfl(cfl).map_err(|e| CliError::solver("cfl", e))?;
    }
    if spec.fixed_dt {
        let dt = conservative_dt(&cfg, initial);
        cfg = cfg.with_fixed_dt(dt).map_err(|e| CliError::solver("fixed time step", e))?;
    }
    Ok(cfg)
}

fn refinement_study(spec: &ExperimentSpec, kind: SchemeKind, exact: &RiemannExact) -> Result<ConvergenceReport> {
    let p = &spec.problem;
    let mut runs = vec![];
    for level in 0..=spec.refine {
        let cells = spec.cells << level;
        let ctx = format!("{} refinement level {level} ({cells} cells)", spec.name());
        let gs = init_average(&p.initial, p.domain, cells, p.boundary).map_err(|e| CliError::solver(&ctx, e))?;
        let cfg = scheme_config(spec, kind, &gs)?;
        let fin = run_with(&cfg, &gs, p.t_end, |_, _| {}).map_err(|e| CliError::solver(&ctx, e))?;
        runs.push((fin.dx(), l1_error(&fin, exact)));
    }
    convergence_order(&runs).map_err(|e| CliError::solver(format!("{} convergence fit", spec.name()), e))
}

fn interaction_check(spec: &ExperimentSpec, fin: &GridState) -> Result<Option<InteractionCheck>> {
    let p = &spec.problem;
    let solver_err = |e| CliError::solver("interaction check", e);
    let s1 = p.flux.shock_speed(4.0, -3.0).map_err(solver_err)?;
    let s2 = p.flux.shock_speed(-3.0, 2.25).map_err(solver_err)?;
    let collision_time = (0.2 - 0.1) / (s1 - s2);
    if fin.t() <= collision_time || p.beta != 0.75 {
        return Ok(None);
    }
    let collision_position = 0.1 + s1 * collision_time;
    let kinetics = p.kinetics().map_err(solver_err)?;
    let fan = solve_nonclassical(&p.flux, &kinetics, 4.0, 2.25).map_err(solver_err)?;
    let exact = RiemannExact::new(p.flux.clone(), fan, collision_position).starting_at(collision_time);
    Ok(Some(InteractionCheck { collision_time, collision_position, l1_error: l1_error(fin, &exact) }))
}

/// Runs an experiment and writes snapshots, tables and the manifest to
/// `spec.out`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let p = &spec.problem;
    let dir: PathBuf = spec.out.clone();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let ctx = format!("{} with {} cells", spec.name(), spec.cells);

    let initial = init_average(&p.initial, p.domain, spec.cells, p.boundary).map_err(|e| CliError::solver(&ctx, e))?;
    let mut trace = Trace::new(&initial);
    let mut snapshots = vec![];
    let mut state = initial.clone();
    let mut k = 0;
    if p.snapshots.first() == Some(&0.0) {
        snapshots.push(write_snapshot(&dir, k, &state)?);
        k += 1;
    }

    let (cfl, fixed_dt, sequence_offset) = match spec.scheme.scheme_kind() {
        Some(kind) => {
            let cfg = scheme_config(spec, kind, &initial)?;
            for &t in p.snapshots.iter().filter(|&&t| t > 0.0) {
                state = run_with(&cfg, &state, t, |g, info| {
                    trace.record(g);
                    trace.scatter.push_step(&info.active);
                })
                .map_err(|e| CliError::solver(&ctx, e))?;
                snapshots.push(write_snapshot(&dir, k, &state)?);
                k += 1;
            }
            (cfg.cfl, cfg.fixed_dt, None)
        }
        None => {
            let kinetics = p.kinetics().map_err(|e| CliError::solver("beta", e))?;
            let mut gcfg = GlimmConfig::new(p.flux.clone(), kinetics).with_sequence_offset(spec.seq_offset);
            if let Some(cfl) = spec.cfl {
                gcfg = gcfg.with_cfl(cfl).map_err(|e| CliError::solver("cfl", e))?;
            }
            let cfl = gcfg.cfl;
            let mut glimm = Glimm::new(gcfg).map_err(|e| CliError::solver(&ctx, e))?;
            for &t in p.snapshots.iter().filter(|&&t| t > 0.0) {
                state = glimm.run_with(&state, t, |g| trace.record(g)).map_err(|e| CliError::solver(&ctx, e))?;
                snapshots.push(write_snapshot(&dir, k, &state)?);
                k += 1;
            }
            (cfl, None, Some(spec.seq_offset))
        }
    };

    let exact = p.exact().map_err(|e| CliError::solver(&ctx, e))?;
    let l1 = exact.as_ref().map(|ex| l1_error(&state, ex));

    let convergence = match (&exact, spec.scheme.scheme_kind()) {
        (Some(ex), Some(kind)) if spec.refine > 0 => {
            let report = refinement_study(spec, kind, ex)?;
            let rows = report.points.iter().map(|&(dx, error)| ConvergenceRow { dx, error });
            write_csv(&dir.join("convergence.csv"), rows)?;
            Some(report)
        }
        _ => None,
    };

    let scatter_fit = trace.scatter.fit().ok();
    if spec.scheme.scheme_kind().is_some() {
        let rows = trace.scatter.pairs.iter().map(|&(u_left, u_right)| ScatterRow { u_left, u_right });
        write_csv(&dir.join("scatter.csv"), rows)?;
    }

    let interaction = if spec.preset == Some(Preset::TestD) { interaction_check(spec, &state)? } else { None };

    let report = ExperimentReport {
        preset: spec.name().to_string(),
        scheme: spec.scheme,
        flux: p.flux.name(),
        beta: p.beta,
        cells: spec.cells,
        dx: initial.dx(),
        domain: p.domain,
        t_end: p.t_end,
        cfl,
        fixed_dt,
        sequence_offset,
        config: spec.raw.clone(),
        notes: p.notes.clone(),
        steps: trace.steps,
        initial_mass: total_mass(&initial),
        final_mass: total_mass(&state),
        max_total_variation: trace.max_tv,
        final_total_variation: total_variation(&state),
        l1_error: l1,
        snapshots,
        scatter_points: trace.scatter.len(),
        scatter_fit,
        convergence,
        interaction,
    };
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(&path, json + "\n").map_err(|e| CliError::io(&path, e))?;
    log::info!("{} finished after {} steps; output in {}", spec.name(), trace.steps, dir.display());
    Ok(report)
}
