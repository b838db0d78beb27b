//! Canned experiment definitions: seven trajectory presets and the
//! reference spectrum table.
//!
//! All presets share the symmetric top I1 = I2 = 1, I3 = 2, xi = 1. Time
//! horizons are chosen so the slow mode has decayed by several e-foldings
//! (or, for fig6, long enough to watch the escape); they are artifact
//! choices, not reference data.

use metriplectic::Complex64;

use crate::config::{
    GeneratorConfig, GeneratorKindConfig, IntegratorConfig, ModelKind, RunConfig,
};

pub struct Preset {
    pub id: &'static str,
    pub title: &'static str,
    /// Whether the run is expected to settle onto an aligned equilibrium.
    pub expect_relaxation: bool,
    /// Published relaxation target (l3, g3, tolerance), where one exists.
    pub reference_target: Option<(f64, f64, f64)>,
    pub config: RunConfig,
}

fn top_config(kind: GeneratorKindConfig, lambda: f64, z0: [f64; 6], t_final: f64) -> RunConfig {
    RunConfig {
        model: ModelKind::HeavyTop,
        generator: GeneratorConfig { kind, lambda },
        i1: 1.0,
        i3: 2.0,
        xi: 1.0,
        z0: z0.to_vec(),
        // The library's recording default (every 100 accepted steps) is
        // sized for fixed-step runs; adaptive steps here are ~0.05, so
        // record each accepted step but at most ten samples per time unit.
        integrator: IntegratorConfig {
            t_final,
            record_every: 1,
            record_dt: 0.1,
            ..IntegratorConfig::default()
        },
        equilibrium: None,
        out_prefix: None,
    }
}

/// Initial data L = (1, 0, 4.2), Gamma = (1, 0, 2.8): starts near the
/// stable branch.
const Z_NEAR_STABLE: [f64; 6] = [1.0, 0.0, 4.2, 1.0, 0.0, 2.8];
/// Initial data L = (0.5, 0, 5.2), Gamma = (0.3, 0, 3).
const Z_TALL_SPIN: [f64; 6] = [0.5, 0.0, 5.2, 0.3, 0.0, 3.0];
/// fig6 swaps the two vectors of `Z_NEAR_STABLE`, landing below the
/// stability boundary.
const Z_SWAPPED: [f64; 6] = [1.0, 0.0, 2.8, 1.0, 0.0, 4.2];

pub fn all() -> Vec<Preset> {
    vec![
        Preset {
            id: "fig1",
            title: "linear generator, weak damping",
            expect_relaxation: true,
            reference_target: None,
            config: top_config(GeneratorKindConfig::Linear, 0.1, Z_NEAR_STABLE, 60.0),
        },
        Preset {
            id: "fig2",
            title: "linear generator, strong damping",
            expect_relaxation: true,
            reference_target: None,
            config: top_config(GeneratorKindConfig::Linear, 1.0, Z_TALL_SPIN, 30.0),
        },
        Preset {
            id: "fig3",
            title: "log generator, strong damping",
            expect_relaxation: true,
            reference_target: Some((5.2, 3.0, 0.05)),
            config: top_config(GeneratorKindConfig::Log, 1.0, Z_TALL_SPIN, 60.0),
        },
        Preset {
            id: "fig4",
            title: "log generator, weak damping",
            expect_relaxation: true,
            reference_target: None,
            config: top_config(GeneratorKindConfig::Log, 0.1, Z_NEAR_STABLE, 400.0),
        },
        Preset {
            id: "fig5",
            title: "quadratic generator, weak damping",
            expect_relaxation: true,
            reference_target: None,
            config: top_config(GeneratorKindConfig::Quadratic, 0.1, Z_NEAR_STABLE, 80.0),
        },
        Preset {
            id: "fig6",
            title: "quadratic generator, unstable start",
            expect_relaxation: false,
            reference_target: None,
            config: top_config(GeneratorKindConfig::Quadratic, 0.1, Z_SWAPPED, 40.0),
        },
        Preset {
            id: "fig7",
            title: "quadratic generator, strong damping",
            expect_relaxation: true,
            reference_target: None,
            config: top_config(GeneratorKindConfig::Quadratic, 1.0, Z_TALL_SPIN, 300.0),
        },
    ]
}

pub fn by_id(id: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.id == id)
}

/// One row of the reference-spectrum comparison: linearize at the stated
/// aligned equilibrium and compare against the published eigenvalues,
/// each real and imaginary part to within `SPECTRUM_TOL`.
pub struct SpectrumRow {
    pub label: &'static str,
    pub kind: GeneratorKindConfig,
    pub lambda: f64,
    pub l3: f64,
    pub g3: f64,
    pub reference: [Complex64; 6],
}

pub const SPECTRUM_TOL: f64 = 0.02;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn spectrum_rows() -> Vec<SpectrumRow> {
    vec![
        SpectrumRow {
            label: "linear lambda=0.1 at (5, 3)",
            kind: GeneratorKindConfig::Linear,
            lambda: 0.1,
            l3: 5.0,
            g3: 3.0,
            reference: [
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-0.38, 1.76),
                c(-0.38, -1.76),
                c(-0.38, 1.76),
                c(-0.38, -1.76),
            ],
        },
        SpectrumRow {
            label: "linear lambda=1 at (5, 3)",
            kind: GeneratorKindConfig::Linear,
            lambda: 1.0,
            l3: 5.0,
            g3: 3.0,
            reference: [
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-7.03, 0.0),
                c(-7.03, 0.0),
                c(-0.46, 0.0),
                c(-0.46, 0.0),
            ],
        },
        SpectrumRow {
            label: "log lambda=1 at (5.2, 3)",
            kind: GeneratorKindConfig::Log,
            lambda: 1.0,
            l3: 5.2,
            g3: 3.0,
            reference: [
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-0.25, 2.0),
                c(-0.25, -2.0),
                c(-0.25, 2.0),
                c(-0.25, -2.0),
            ],
        },
        SpectrumRow {
            label: "log lambda=0.1 at (4.35, 3.0)",
            kind: GeneratorKindConfig::Log,
            lambda: 0.1,
            l3: 4.35,
            g3: 3.0,
            reference: [
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-0.025, 1.67),
                c(-0.025, -1.67),
                c(-0.025, 1.67),
                c(-0.025, -1.67),
            ],
        },
        SpectrumRow {
            label: "quadratic lambda=0.1 at (4.35, 3.0)",
            kind: GeneratorKindConfig::Quadratic,
            lambda: 0.1,
            l3: 4.35,
            g3: 3.0,
            reference: [
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-8.31, 0.0),
                c(-8.31, 0.0),
                c(-0.21, 0.0),
                c(-0.21, 0.0),
            ],
        },
        SpectrumRow {
            label: "quadratic lambda=1 at (5.2, 3)",
            kind: GeneratorKindConfig::Quadratic,
            lambda: 1.0,
            l3: 5.2,
            g3: 3.0,
            reference: [
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-11.85, 0.0),
                c(-11.85, 0.0),
                c(-0.317, 0.0),
                c(-0.317, 0.0),
            ],
        },
    ]
}
