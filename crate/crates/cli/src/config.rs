//! Flat key/value experiment configuration.
//!
//! A TOML file supplies defaults, command-line flags override it, and the
//! preset fills in everything left unset.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sharpshock::presets::{Preset, PresetSpec};
use sharpshock::schemes::{Boundary, InitialData, SchemeKind};
use sharpshock::FluxSpec;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub preset: Option<String>,
    pub scheme: Option<String>,
    pub cells: Option<usize>,
    pub dx: Option<f64>,
    pub t_end: Option<f64>,
    pub beta: Option<f64>,
    pub cfl: Option<f64>,
    pub out: Option<PathBuf>,
    pub fixed_dt: Option<bool>,
    pub seq_offset: Option<u64>,
    pub snapshots: Option<Vec<f64>>,
    /// Number of mesh halvings for a convergence study.
    pub refine: Option<usize>,
    // custom problems only
    pub flux: Option<String>,
    pub speed: Option<f64>,
    pub breakpoints: Option<Vec<f64>>,
    pub values: Option<Vec<f64>>,
    pub amplitude: Option<f64>,
    pub wavenumber: Option<f64>,
    pub domain: Option<[f64; 2]>,
    pub boundary: Option<String>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: RawConfig) -> RawConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RawConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            preset,
            scheme,
            cells,
            dx,
            t_end,
            beta,
            cfl,
            out,
            fixed_dt,
            seq_offset,
            snapshots,
            refine,
            flux,
            speed,
            breakpoints,
            values,
            amplitude,
            wavenumber,
            domain,
            boundary
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeChoice {
    Upwind,
    Reconstruction,
    Variant,
    AdvectionReconstruction,
    Glimm,
}

impl SchemeChoice {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "upwind" => SchemeChoice::Upwind,
            "reconstruction" => SchemeChoice::Reconstruction,
            "variant" => SchemeChoice::Variant,
            "advection" | "advection-reconstruction" => SchemeChoice::AdvectionReconstruction,
            "glimm" => SchemeChoice::Glimm,
            _ => {
                return Err(CliError::Config(format!(
                    "scheme: unknown value '{s}' (upwind, reconstruction, variant, advection, glimm)"
                )))
            }
        })
    }

    pub fn scheme_kind(self) -> Option<SchemeKind> {
        match self {
            SchemeChoice::Upwind => Some(SchemeKind::Upwind),
            SchemeChoice::Reconstruction => Some(SchemeKind::Reconstruction),
            SchemeChoice::Variant => Some(SchemeKind::VariantTestG),
            SchemeChoice::AdvectionReconstruction => Some(SchemeKind::AdvectionReconstruction),
            SchemeChoice::Glimm => None,
        }
    }

    fn from_kind(kind: SchemeKind) -> Self {
        match kind {
            SchemeKind::Upwind => SchemeChoice::Upwind,
            SchemeKind::Reconstruction => SchemeChoice::Reconstruction,
            SchemeKind::VariantTestG => SchemeChoice::Variant,
            SchemeKind::AdvectionReconstruction => SchemeChoice::AdvectionReconstruction,
        }
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// `None` for custom problems.
    pub preset: Option<Preset>,
    pub problem: PresetSpec,
    pub scheme: SchemeChoice,
    pub cells: usize,
    pub refine: usize,
    pub cfl: Option<f64>,
    pub fixed_dt: bool,
    pub seq_offset: u64,
    pub out: PathBuf,
    /// The merged configuration, kept for the manifest.
    pub raw: RawConfig,
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn custom_problem(raw: &RawConfig) -> Result<PresetSpec> {
    let flux = match raw.flux.as_deref() {
        Some("cubic-plus") => FluxSpec::cubic_plus(),
        Some("cubic-minus") => FluxSpec::cubic_minus(),
        Some("advection") => FluxSpec::advection(raw.speed.unwrap_or(1.0)).map_err(|e| config_err("speed", e))?,
        Some(other) => {
            return Err(config_err("flux", format!("unknown flux '{other}' (cubic-plus, cubic-minus, advection)")))
        }
        None => return Err(config_err("flux", "required for a custom problem")),
    };
    let (initial, riemann_data) = match (&raw.breakpoints, &raw.values, raw.amplitude, raw.wavenumber) {
        (Some(b), Some(v), None, None) => {
            let data = InitialData::piecewise_constant(b.clone(), v.clone()).map_err(|e| config_err("values", e))?;
            let riemann = (b.len() == 1).then(|| (v[0], v[1]));
            (data, riemann)
        }
        (None, None, Some(amplitude), Some(wavenumber)) => (InitialData::Sine { amplitude, wavenumber }, None),
        _ => return Err(config_err("initial data", "give either breakpoints and values, or amplitude and wavenumber")),
    };
    let domain = raw.domain.ok_or_else(|| config_err("domain", "required for a custom problem"))?;
    let boundary = match raw.boundary.as_deref().unwrap_or("outflow") {
        "outflow" => Boundary::Outflow,
        "periodic" => Boundary::Periodic,
        other => return Err(config_err("boundary", format!("unknown value '{other}' (outflow, periodic)"))),
    };
    let t_end = raw.t_end.ok_or_else(|| config_err("t_end", "required for a custom problem"))?;
    let scheme = if flux.convexity() == sharpshock::Convexity::Linear {
        SchemeKind::AdvectionReconstruction
    } else {
        SchemeKind::Reconstruction
    };
    let riemann_data = riemann_data.filter(|_| boundary == Boundary::Outflow);
    Ok(PresetSpec {
        flux,
        beta: sharpshock::presets::DEFAULT_BETA,
        initial,
        riemann_data,
        domain: (domain[0], domain[1]),
        boundary,
        t_end,
        snapshots: vec![0.0, t_end],
        cells: 100,
        scheme,
        notes: vec![],
    })
}

const CUSTOM_ONLY: [&str; 8] =
    ["flux", "speed", "breakpoints", "values", "amplitude", "wavenumber", "domain", "boundary"];

impl ExperimentSpec {
    pub fn resolve(raw: RawConfig) -> Result<Self> {
        let name = raw.preset.clone().ok_or_else(|| config_err("preset", "missing (use --preset or a config file)"))?;
        let custom = name.eq_ignore_ascii_case("custom");
        let (preset, mut problem) = if custom {
            (None, custom_problem(&raw)?)
        } else {
            let p: Preset = name.parse().map_err(|e| config_err("preset", e))?;
            let set = [
                raw.flux.is_some(),
                raw.speed.is_some(),
                raw.breakpoints.is_some(),
                raw.values.is_some(),
                raw.amplitude.is_some(),
                raw.wavenumber.is_some(),
                raw.domain.is_some(),
                raw.boundary.is_some(),
            ];
            if let Some(i) = set.iter().position(|&s| s) {
                return Err(config_err(CUSTOM_ONLY[i], "only valid with preset = \"custom\""));
            }
            (Some(p), p.spec())
        };

        if let Some(beta) = raw.beta {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(config_err("beta", format!("must be positive, got {beta}")));
            }
            problem.beta = beta;
        }
        if let Some(t) = raw.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(config_err("t_end", format!("must be non-negative, got {t}")));
            }
            problem.t_end = t;
        }
        let cells = match (raw.cells, raw.dx) {
            (Some(_), Some(_)) => return Err(config_err("dx", "give either cells or dx, not both")),
            (Some(n), None) => n,
            (None, Some(dx)) => {
                if !(dx > 0.0 && dx.is_finite()) {
                    return Err(config_err("dx", format!("must be positive, got {dx}")));
                }
                problem.cells_for_dx(dx)
            }
            (None, None) => problem.cells,
        };
        if cells < 3 {
            return Err(config_err("cells", format!("need at least 3 cells, got {cells}")));
        }

        let mut snapshots: Vec<f64> = raw.snapshots.clone().unwrap_or_else(|| problem.snapshots.clone());
        if let Some(bad) = snapshots.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(config_err("snapshots", format!("invalid time {bad}")));
        }
        snapshots.retain(|&t| t <= problem.t_end);
        snapshots.push(problem.t_end);
        snapshots.sort_by(f64::total_cmp);
        snapshots.dedup();
        problem.snapshots = snapshots;

        let scheme = match &raw.scheme {
            Some(s) => SchemeChoice::parse(s)?,
            None => SchemeChoice::from_kind(problem.scheme),
        };
        if let Some(cfl) = raw.cfl {
            let max = if scheme == SchemeChoice::Glimm { 0.5 } else { 1.0 };
            if !(cfl > 0.0 && cfl <= max) {
                return Err(config_err("cfl", format!("must lie in (0, {max}], got {cfl}")));
            }
        }
        let default_refine = match preset {
            Some(Preset::TestB) | Some(Preset::TestC) => 4,
            _ => 0,
        };
        let refine = raw.refine.unwrap_or(default_refine);
        if refine > 0 {
            if refine < 2 {
                return Err(config_err("refine", "a convergence study needs at least 2 halvings (3 meshes)"));
            }
            if problem.riemann_data.is_none() {
                return Err(config_err("refine", "a convergence study needs a problem with a single initial jump"));
            }
            if scheme == SchemeChoice::Glimm {
                return Err(config_err("refine", "convergence studies use the finite-volume schemes"));
            }
        }
        let out = raw.out.clone().unwrap_or_else(|| PathBuf::from("out").join(preset.map_or("custom", |p| p.name())));

        Ok(ExperimentSpec {
            preset,
            problem,
            scheme,
            cells,
            refine,
            cfl: raw.cfl,
            fixed_dt: raw.fixed_dt.unwrap_or(false),
            seq_offset: raw.seq_offset.unwrap_or(0),
            out,
            raw,
        })
    }

    pub fn name(&self) -> &'static str {
        self.preset.map_or("custom", |p| p.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(preset: &str) -> RawConfig {
        RawConfig { preset: Some(preset.into()), ..RawConfig::default() }
    }

    #[test]
    fn preset_defaults() {
        let s = ExperimentSpec::resolve(raw("test-a")).unwrap();
        assert_eq!(s.cells, 30);
        assert_eq!(s.scheme, SchemeChoice::Reconstruction);
        assert_eq!(s.problem.snapshots, vec![0.0, 0.05, 0.1]);
        assert_eq!(ExperimentSpec::resolve(raw("test-b")).unwrap().refine, 4);
    }

    #[test]
    fn flags_override_file() {
        let file = RawConfig::from_toml("preset = \"test-a\"\ncells = 50\nbeta = 0.8\n").unwrap();
        let flags = RawConfig { cells: Some(80), ..RawConfig::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.cells, Some(80));
        assert_eq!(merged.beta, Some(0.8));
    }

    #[test]
    fn dx_sets_the_mesh() {
        let s = ExperimentSpec::resolve(RawConfig { dx: Some(0.005), ..raw("test-d") }).unwrap();
        assert_eq!(s.cells, 200);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            RawConfig { cells: Some(10), dx: Some(0.1), ..raw("test-a") },
            RawConfig { cells: Some(2), ..raw("test-a") },
            RawConfig { scheme: Some("spectral".into()), ..raw("test-a") },
            RawConfig { cfl: Some(0.9), scheme: Some("glimm".into()), ..raw("test-e") },
            RawConfig { refine: Some(3), ..raw("test-e") },
            RawConfig { domain: Some([0.0, 1.0]), ..raw("test-a") },
            raw("test-q"),
            RawConfig::default(),
        ];
        let fields = ["dx", "cells", "scheme", "cfl", "refine", "domain", "preset", "preset"];
        for (c, f) in cases.into_iter().zip(fields) {
            match ExperimentSpec::resolve(c) {
                Err(CliError::Config(msg)) => assert!(msg.starts_with(f), "{msg}"),
                other => panic!("expected a config error for {f}, got {other:?}"),
            }
        }
    }

    #[test]
    fn unknown_keys_and_bad_syntax_are_rejected() {
        let e = RawConfig::from_toml("preset = \"test-a\"\ncelss = 3\n").unwrap_err();
        assert!(e.to_string().contains("celss"), "{e}");
        let e = RawConfig::from_toml("preset = \n").unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
    }

    #[test]
    fn custom_problems() {
        let text = "preset = \"custom\"\nflux = \"cubic-plus\"\nbreakpoints = [0.0]\nvalues = [2.0, -1.5]\ndomain = [-1.0, 1.0]\nt_end = 0.02\ncells = 40\n";
        let s = ExperimentSpec::resolve(RawConfig::from_toml(text).unwrap()).unwrap();
        assert!(s.preset.is_none());
        assert_eq!(s.problem.riemann_data, Some((2.0, -1.5)));
        let missing = RawConfig { flux: None, ..RawConfig::from_toml(text).unwrap() };
        assert!(matches!(ExperimentSpec::resolve(missing), Err(CliError::Config(m)) if m.starts_with("flux")));
    }
}
