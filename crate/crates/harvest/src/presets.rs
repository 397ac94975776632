//! Named sweeps for the published curves.
//!
//! Every preset uses `T = 1`, so all lengths and gaps are in units of the
//! switching width.

use core::f64::consts::PI;

use crate::error::{CliError, CliResult};
use crate::scenario::{Params, Scenario};
use crate::sweep::{Axis, Overlay, SweepSpec};

/// What a preset varies, used by the curve-shape checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Gap axis with a separation overlay.
    GapWithSeparations,
    /// Width axis at fixed gap.
    Width,
    /// Orientation angle axis.
    Angle,
    /// Gap axis with a width overlay.
    GapWithWidths,
}

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub id: &'static str,
    pub description: &'static str,
    pub shape: Shape,
    build: fn() -> SweepSpec,
}

impl Preset {
    pub fn spec(&self) -> SweepSpec {
        (self.build)()
    }
}

const SEPARATIONS: [f64; 4] = [4.0, 6.0, 8.0, 10.0];

/// At gap 4.7 every coupling is still below its threshold at sep = 10, so
/// the width sweeps stop at 8.
const WIDTH_SEPARATIONS: [f64; 3] = [4.0, 6.0, 8.0];

fn fixed(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn spec(scenario: Scenario, fixed_values: &[(&str, f64)], axis: Axis, overlays: Vec<Overlay>) -> SweepSpec {
    SweepSpec { scenario, fixed: fixed(fixed_values), axis: Some(axis), overlays, rel_tol: 1e-8, audit: false }
}

fn separations() -> Vec<Overlay> {
    vec![Overlay { name: "sep".into(), values: SEPARATIONS.to_vec() }]
}

fn width_separations() -> Vec<Overlay> {
    vec![Overlay { name: "sep".into(), values: WIDTH_SEPARATIONS.to_vec() }]
}

fn gap_axis(count: usize) -> Axis {
    Axis::linear("omega", 0.0, 15.0, count)
}

fn width_axis() -> Axis {
    Axis::linear("sigma", 0.05, 0.5, 46)
}

fn angle_axis() -> Axis {
    Axis::linear("theta", 0.0, PI, 61)
}

pub const PRESETS: &[Preset] = &[
    Preset {
        id: "fig-gravity-gaussian-omega",
        description: "isotropic Gaussian, gravity: negativity vs gap, sigma = 0.2, sep in {4,6,8,10}",
        shape: Shape::GapWithSeparations,
        build: || spec(Scenario::GravityGaussian, &[("sigma", 0.2)], gap_axis(151), separations()),
    },
    Preset {
        id: "fig-gravity-gaussian-omega-sigma",
        description: "isotropic Gaussian, gravity: negativity vs gap at sep = 8 for several widths",
        shape: Shape::GapWithWidths,
        build: || {
            spec(
                Scenario::GravityGaussian,
                &[("sep", 8.0)],
                gap_axis(151),
                vec![Overlay { name: "sigma".into(), values: vec![0.1, 0.2, 0.3, 0.4] }],
            )
        },
    },
    Preset {
        id: "fig-gravity-gaussian-sigma",
        description: "isotropic Gaussian, gravity: negativity vs width at gap 4.7, sep in {4,6,8}",
        shape: Shape::Width,
        build: || spec(Scenario::GravityGaussian, &[("omega", 4.7)], width_axis(), width_separations()),
    },
    Preset {
        id: "fig-gravity-l2-omega",
        description: "l = 2 Gaussian, gravity: negativity vs gap, sigma = 0.2, aligned",
        shape: Shape::GapWithSeparations,
        build: || spec(Scenario::GravityL2, &[("sigma", 0.2)], gap_axis(151), separations()),
    },
    Preset {
        id: "fig-gravity-l2-sigma",
        description: "l = 2 Gaussian, gravity: negativity vs width at gap 4.7, aligned, sep in {4,6,8}",
        shape: Shape::Width,
        build: || spec(Scenario::GravityL2, &[("omega", 4.7)], width_axis(), width_separations()),
    },
    Preset {
        id: "fig-gravity-l2-angle",
        description: "l = 2 Gaussian, gravity: negativity vs relative angle, gap 6, sigma = 0.2",
        shape: Shape::Angle,
        build: || spec(Scenario::GravityL2, &[("omega", 6.0), ("sigma", 0.2)], angle_axis(), separations()),
    },
    Preset {
        id: "fig-scalar-omega",
        description: "isotropic Gaussian, scalar: negativity vs gap, sigma = 0.2",
        shape: Shape::GapWithSeparations,
        build: || spec(Scenario::Scalar, &[("sigma", 0.2)], gap_axis(151), separations()),
    },
    Preset {
        id: "fig-scalar-sigma",
        description: "isotropic Gaussian, scalar: negativity vs width at gap 4.7, sep in {4,6,8}",
        shape: Shape::Width,
        build: || spec(Scenario::Scalar, &[("omega", 4.7)], width_axis(), width_separations()),
    },
    Preset {
        id: "fig-qscalar-omega",
        description: "isotropic Gaussian, quadrupole scalar: negativity vs gap, sigma = 0.2",
        shape: Shape::GapWithSeparations,
        build: || spec(Scenario::QScalar, &[("sigma", 0.2)], gap_axis(151), separations()),
    },
    Preset {
        id: "fig-qscalar-sigma",
        description: "isotropic Gaussian, quadrupole scalar: negativity vs width at gap 4.7, sep in {4,6,8}",
        shape: Shape::Width,
        build: || spec(Scenario::QScalar, &[("omega", 4.7)], width_axis(), width_separations()),
    },
    Preset {
        id: "fig-qscalar-l2-omega",
        description: "l = 2 Gaussian, quadrupole scalar: negativity vs gap, sigma = 0.2, aligned",
        shape: Shape::GapWithSeparations,
        build: || spec(Scenario::QScalarL2, &[("sigma", 0.2)], gap_axis(151), separations()),
    },
    Preset {
        id: "fig-qscalar-l2-angle",
        description: "l = 2 Gaussian, quadrupole scalar: negativity vs relative angle, gap 6",
        shape: Shape::Angle,
        build: || spec(Scenario::QScalarL2, &[("omega", 6.0), ("sigma", 0.2)], angle_axis(), separations()),
    },
    Preset {
        id: "fig-hydrogen-320-omega",
        description: "hydrogen 1s -> 3d(m=0), gravity: negativity vs gap, a0 = alpha / (2 omega)",
        shape: Shape::GapWithSeparations,
        build: || spec(Scenario::Hydrogen320, &[], Axis::linear("omega", 0.5, 15.0, 146), separations()),
    },
    Preset {
        id: "fig-hydrogen-320-angle",
        description: "hydrogen 1s -> 3d(m=0), gravity: negativity vs relative angle at gap 7",
        shape: Shape::Angle,
        build: || spec(Scenario::Hydrogen320, &[("omega", 7.0)], angle_axis(), separations()),
    },
    Preset {
        id: "fig-hydrogen-200-omega",
        description: "hydrogen 1s -> 2s, gravity: negativity vs gap, a0 = alpha / (2 omega)",
        shape: Shape::GapWithSeparations,
        build: || spec(Scenario::Hydrogen200, &[], Axis::linear("omega", 0.5, 15.0, 30), separations()),
    },
    Preset {
        id: "fig-hydrogen-300-omega",
        description: "hydrogen 1s -> 3s, gravity: negativity vs gap, a0 = alpha / (2 omega)",
        shape: Shape::GapWithSeparations,
        build: || spec(Scenario::Hydrogen300, &[], Axis::linear("omega", 0.5, 15.0, 30), separations()),
    },
];

pub fn find(id: &str) -> CliResult<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id).ok_or_else(|| CliError::config(format!("unknown preset `{id}` (try `harvest preset --list`)")))
}
