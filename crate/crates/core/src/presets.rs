//! Named benchmark problems.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::RiemannExact;
use crate::error::{Error, Result};
use crate::flux::FluxSpec;
use crate::kinetics::KineticFunction;
use crate::riemann::solve_nonclassical;
use crate::schemes::{Boundary, InitialData, LinearPiece, SchemeKind};

pub const DEFAULT_BETA: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Single nonclassical shock `(4, -3)`.
    TestA,
    /// Nonclassical shock followed by a rarefaction, `(4, -5)`.
    TestB,
    /// Nonclassical shock followed by a classical shock, `(4, -2)`.
    TestC,
    /// Two nonclassical shocks that collide.
    TestD,
    /// Periodic sine wave.
    TestE,
    /// Compressive ramp feeding a nonclassical shock.
    TestF,
    /// Test E data for the oscillating variant.
    TestG,
    /// `-u^3 - u` with data `(-4, 4)`.
    ConvexConcave1,
    /// `-u^3 - u` with data `(-2, 4)`.
    ConvexConcave2,
    /// Linear advection of a step.
    AdvectionDemo,
}

impl Preset {
    pub const ALL: [Preset; 10] = [
        Preset::TestA,
        Preset::TestB,
        Preset::TestC,
        Preset::TestD,
        Preset::TestE,
        Preset::TestF,
        Preset::TestG,
        Preset::ConvexConcave1,
        Preset::ConvexConcave2,
        Preset::AdvectionDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::TestA => "test-a",
            Preset::TestB => "test-b",
            Preset::TestC => "test-c",
            Preset::TestD => "test-d",
            Preset::TestE => "test-e",
            Preset::TestF => "test-f",
            Preset::TestG => "test-g",
            Preset::ConvexConcave1 => "convex-concave-1",
            Preset::ConvexConcave2 => "convex-concave-2",
            Preset::AdvectionDemo => "advection-demo",
        }
    }

    pub fn spec(self) -> PresetSpec {
        let beta = DEFAULT_BETA;
        let riemann = |ul: f64, ur: f64, t_end: f64, cells: usize| PresetSpec {
            flux: FluxSpec::cubic_plus(),
            beta,
            initial: InitialData::step(0.0, ul, ur),
            riemann_data: Some((ul, ur)),
            domain: (-1.0, 1.0),
            boundary: Boundary::Outflow,
            t_end,
            snapshots: vec![0.0, t_end],
            cells,
            scheme: SchemeKind::Reconstruction,
            notes: vec![],
        };
        let sine = |scheme, t_end| PresetSpec {
            flux: FluxSpec::cubic_plus(),
            beta,
            initial: InitialData::Sine { amplitude: 1.0, wavenumber: 2.0 * std::f64::consts::PI },
            riemann_data: None,
            domain: (-0.5, 0.5),
            boundary: Boundary::Periodic,
            t_end,
            snapshots: vec![0.0, 0.25, t_end],
            cells: 100,
            scheme,
            notes: vec![
                "initial data sin(2 pi x); sin(x / 2 pi) would have amplitude 0.08 and no sign-changing shocks".into(),
            ],
        };
        match self {
            Preset::TestA => {
                let mut s = riemann(4.0, -3.0, 0.1, 30);
                // the shock travels at speed 14
                s.domain = (-1.0, 2.0);
                s.snapshots = vec![0.0, 0.05, 0.1];
                s
            }
            Preset::TestB => riemann(4.0, -5.0, 0.01, 200),
            Preset::TestC => riemann(4.0, -2.0, 0.04, 200),
            Preset::TestD => PresetSpec {
                flux: FluxSpec::cubic_plus(),
                beta,
                initial: InitialData::piecewise_constant(vec![0.1, 0.2], vec![4.0, -3.0, 2.25]).unwrap(),
                riemann_data: None,
                domain: (0.0, 1.0),
                boundary: Boundary::Outflow,
                t_end: 0.025,
                snapshots: vec![0.0, 0.010, 0.017, 0.020, 0.025],
                cells: 200,
                scheme: SchemeKind::Reconstruction,
                notes: vec!["snapshot times chosen around the computed collision at t = 0.1 / 5.6875".into()],
            },
            Preset::TestE => sine(SchemeKind::Reconstruction, 0.5),
            Preset::TestF => PresetSpec {
                flux: FluxSpec::cubic_plus(),
                beta,
                initial: InitialData::piecewise(
                    vec![-0.5, -0.45],
                    vec![
                        LinearPiece::constant(0.0),
                        LinearPiece { intercept: 10.0, slope: 20.0 },
                        LinearPiece::constant(-0.75),
                    ],
                )
                .unwrap(),
                riemann_data: None,
                domain: (-1.0, 1.0),
                boundary: Boundary::Outflow,
                t_end: 0.3,
                snapshots: vec![0.0, 0.1, 0.3],
                cells: 1000,
                scheme: SchemeKind::Reconstruction,
                notes: vec!["ramp 1 + 20 (x + 0.45) on (-0.5, -0.45), 0 to its left, -0.75 to its right".into()],
            },
            Preset::TestG => {
                let mut s = sine(SchemeKind::VariantTestG, 0.25);
                s.snapshots = vec![0.0, 0.25];
                s
            }
            Preset::ConvexConcave1 | Preset::ConvexConcave2 => {
                let ul = if self == Preset::ConvexConcave1 { -4.0 } else { -2.0 };
                let mut s = riemann(ul, 4.0, 0.01, 200);
                s.flux = FluxSpec::cubic_minus();
                s
            }
            Preset::AdvectionDemo => PresetSpec {
                flux: FluxSpec::advection(1.0).unwrap(),
                beta,
                initial: InitialData::step(-0.5, 1.0, 0.0),
                riemann_data: Some((1.0, 0.0)),
                domain: (-1.0, 1.0),
                boundary: Boundary::Outflow,
                t_end: 0.5,
                snapshots: vec![0.0, 0.25, 0.5],
                cells: 40,
                scheme: SchemeKind::AdvectionReconstruction,
                notes: vec![],
            },
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.name() == key || p.name().replace('-', "") == key)
            .ok_or_else(|| Error::Config(format!("unknown preset '{s}'")))
    }
}

/// Everything needed to run a preset.
#[derive(Debug, Clone)]
pub struct PresetSpec {
    pub flux: FluxSpec,
    pub beta: f64,
    pub initial: InitialData,
    /// States of the single jump for Riemann-type presets.
    pub riemann_data: Option<(f64, f64)>,
    pub domain: (f64, f64),
    pub boundary: Boundary,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub cells: usize,
    pub scheme: SchemeKind,
    pub notes: Vec<String>,
}

impl PresetSpec {
    pub fn kinetics(&self) -> Result<KineticFunction> {
        KineticFunction::linear(self.beta)
    }

    /// Exact solution of Riemann-type presets.
    pub fn exact(&self) -> Result<Option<RiemannExact>> {
        let Some((ul, ur)) = self.riemann_data else {
            return Ok(None);
        };
        let x0 = match &self.initial {
            InitialData::Piecewise { breakpoints, .. } => breakpoints[0],
            _ => 0.0,
        };
        let fan = solve_nonclassical(&self.flux, &self.kinetics()?, ul, ur)?;
        Ok(Some(RiemannExact::new(self.flux.clone(), fan, x0)))
    }

    pub fn cells_for_dx(&self, dx: f64) -> usize {
        ((self.domain.1 - self.domain.0) / dx).round() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::WaveKind::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert_eq!("TestA".parse::<Preset>().unwrap(), Preset::TestA);
        assert!("test-z".parse::<Preset>().is_err());
    }

    #[test]
    fn riemann_presets_have_the_expected_structure() {
        let kinds = |p: Preset| p.spec().exact().unwrap().unwrap().fan.kinds();
        assert_eq!(kinds(Preset::TestA), vec![NonclassicalShock]);
        assert_eq!(kinds(Preset::TestB), vec![NonclassicalShock, Rarefaction]);
        assert_eq!(kinds(Preset::TestC), vec![NonclassicalShock, ClassicalShock]);
        assert_eq!(kinds(Preset::ConvexConcave1), vec![Rarefaction, NonclassicalShock]);
        assert_eq!(kinds(Preset::ConvexConcave2), vec![ClassicalShock, NonclassicalShock]);
        assert_eq!(kinds(Preset::AdvectionDemo), vec![Contact]);
    }

    #[test]
    fn waves_stay_inside_their_domains() {
        for p in Preset::ALL {
            let s = p.spec();
            if let Some(ex) = s.exact().unwrap() {
                let slowest = ex.fan.waves.iter().map(|w| w.speed_lo).fold(f64::INFINITY, f64::min);
                let fastest = ex.fan.waves.iter().map(|w| w.speed_hi).fold(f64::NEG_INFINITY, f64::max);
                assert!(ex.x0 + slowest.min(0.0) * s.t_end > s.domain.0, "{p}");
                assert!(ex.x0 + fastest.max(0.0) * s.t_end < s.domain.1, "{p}");
            }
        }
    }
}
