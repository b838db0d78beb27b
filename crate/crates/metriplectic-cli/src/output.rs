//! Emission of trajectory CSVs, gnuplot scripts, and run summaries.

use std::fmt::Write as _;

use metriplectic::dynamics::{detect_relaxation, monitor_report, Trajectory};
use metriplectic::models::{Generator, TopParams};
use metriplectic::Complex64;

use crate::config::{ModelKind, RunConfig};

/// 17 significant digits: enough to round-trip an f64 exactly, so a
/// replayed run can be compared byte-for-byte.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn cnum(z: Complex64) -> String {
    if z.im >= 0.0 {
        format!("{:.9e} + {:.9e}i", z.re, z.im)
    } else {
        format!("{:.9e} - {:.9e}i", z.re, -z.im)
    }
}

pub const CSV_HEADER: &str = "t,L1,L2,L3,G1,G2,G3,H,S,GdotL,G2norm";

/// One row per recorded sample. For the free rigid body the Gamma columns
/// are written as zeros and the two casimir columns both carry |L|^2.
pub fn trajectory_csv(model: ModelKind, traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.times.len() * 200);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for ((t, z), obs) in traj
        .times
        .iter()
        .zip(&traj.states)
        .zip(&traj.observables)
    {
        let mut cols: Vec<String> = Vec::with_capacity(11);
        cols.push(num(*t));
        for i in 0..3 {
            cols.push(num(z[i]));
        }
        for i in 0..3 {
            cols.push(num(if model == ModelKind::HeavyTop {
                z[3 + i]
            } else {
                0.0
            }));
        }
        cols.push(num(obs.h));
        cols.push(num(obs.s));
        cols.push(num(obs.c1));
        cols.push(num(obs.c2));
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

/// Six-panel gnuplot script (L1..L3, Gamma1..Gamma3 against t) reading the
/// CSV that sits next to it.
pub fn plot_script(stem: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script; expects {stem}.csv alongside");
    let _ = writeln!(s, "set terminal pngcairo size 1350,800");
    let _ = writeln!(s, "set output '{stem}.png'");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set multiplot layout 2,3 title '{stem}'");
    let _ = writeln!(s, "set xlabel 't'");
    let panels = [
        ("L1", 2),
        ("L2", 3),
        ("L3", 4),
        ("Gamma1", 5),
        ("Gamma2", 6),
        ("Gamma3", 7),
    ];
    for (name, col) in panels {
        let _ = writeln!(s, "set title '{name}'");
        let _ = writeln!(
            s,
            "plot '{stem}.csv' skip 1 using 1:{col} with lines notitle"
        );
    }
    let _ = writeln!(s, "unset multiplot");
    s
}

/// Human-readable run report: configuration echo, conservation record,
/// relaxation verdict, and any domain-truncation events.
pub fn summary(config: &RunConfig, params: &TopParams, gen: &Generator, traj: &Trajectory) -> String {
    let report = monitor_report(traj);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "model: {}",
        match config.model {
            ModelKind::Frb => "frb",
            ModelKind::HeavyTop => "heavy-top",
        }
    );
    let _ = writeln!(
        s,
        "generator: {:?} with lambda = {}",
        gen.kind(),
        gen.lambda()
    );
    let _ = writeln!(
        s,
        "inertia: I1 = I2 = {}, I3 = {}, xi = {}",
        params.i1, params.i3, params.xi
    );
    let _ = writeln!(s, "z0: {:?}", config.z0);
    let (t0, t1) = (
        traj.times.first().copied().unwrap_or(0.0),
        traj.times.last().copied().unwrap_or(0.0),
    );
    let _ = writeln!(
        s,
        "samples: {} over t = {} .. {}",
        traj.times.len(),
        t0,
        t1
    );
    let _ = writeln!(s, "max relative H drift: {:.3e}", report.max_h_drift);
    let _ = writeln!(
        s,
        "max relative |Gamma|^2 drift: {:.3e}",
        report.max_c2_drift
    );
    let _ = writeln!(
        s,
        "min per-sample Delta S: {:+.3e} (monotone: {})",
        report.min_delta_s,
        if report.s_monotone { "yes" } else { "no" }
    );
    let _ = writeln!(
        s,
        "min per-sample Delta (Gamma . L): {:+.3e}",
        report.min_delta_c1
    );
    match detect_relaxation(traj, 1e-3) {
        Some(rel) => {
            let _ = writeln!(
                s,
                "relaxation: settled from t = {:.4}; L3* = {:.7}, Gamma3* = {:.7}",
                rel.t, rel.l3, rel.g3
            );
        }
        None => {
            let _ = writeln!(s, "relaxation: none detected at tolerance 1e-3");
        }
    }
    if traj.events.is_empty() {
        let _ = writeln!(s, "events: none");
    } else {
        for ev in &traj.events {
            let _ = writeln!(
                s,
                "events: generator domain boundary reached, trajectory truncated at t = {:.6}",
                ev.t
            );
        }
    }
    if let Some(z) = traj.states.last() {
        let _ = writeln!(s, "final state: {:?}", z);
    }
    s
}

/// Fixed-width check table used by `reproduce`; returns the rendered
/// table plus the overall verdict.
pub struct CheckTable {
    rows: Vec<(String, String, String, bool)>,
}

impl CheckTable {
    pub fn new() -> Self {
        CheckTable { rows: Vec::new() }
    }

    pub fn push(&mut self, check: &str, expected: String, observed: String, pass: bool) {
        self.rows.push((check.to_string(), expected, observed, pass));
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.3)
    }

    pub fn render(&self) -> String {
        let mut widths = [5usize, 8, 8];
        for (c, e, o, _) in &self.rows {
            widths[0] = widths[0].max(c.len());
            widths[1] = widths[1].max(e.len());
            widths[2] = widths[2].max(o.len());
        }
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<w0$}  {:<w1$}  {:<w2$}  verdict",
            "check",
            "expected",
            "observed",
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        );
        for (c, e, o, pass) in &self.rows {
            let _ = writeln!(
                s,
                "{:<w0$}  {:<w1$}  {:<w2$}  {}",
                c,
                e,
                o,
                if *pass { "pass" } else { "FAIL" },
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2]
            );
        }
        s
    }
}
