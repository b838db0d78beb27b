//! The four subcommands: simulate, linearize, verify-geometry, reproduce.

use std::fs;
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use metriplectic::algebra::StructureConstants;
use metriplectic::dynamics::{detect_relaxation, integrate, monitor_report, Trajectory};
use metriplectic::geometry::{connection_euclidean, curvature_constant_gamma, metriplectic_matrix};
use metriplectic::models::{hamiltonian, Generator, TopParams};
use metriplectic::stability::{classify, stability_boundary_l3, Equilibrium, StabilityClass};
use metriplectic::Complex64;

use crate::config::{GeneratorKindConfig, ModelKind, RunConfig};
use crate::error::{io_err, CliError};
use crate::output::{self, CheckTable};
use crate::presets::{self, SPECTRUM_TOL};

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| io_err(&format!("writing {}", path.display()), e))
}

fn run_trajectory(v: &crate::config::Validated) -> Result<Trajectory, CliError> {
    integrate(&v.params, &v.gen, &v.z0, &v.opts).map_err(|e| CliError::Numeric(e.to_string()))
}

pub fn cmd_simulate(config_path: &Path) -> Result<i32, CliError> {
    let config = RunConfig::load(config_path)?;
    let v = config.validate()?;
    let traj = run_trajectory(&v)?;

    let stem = config.out_prefix.clone().unwrap_or_else(|| {
        config_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_string())
    });
    let csv = output::trajectory_csv(config.model, &traj);
    write_file(&PathBuf::from(format!("{stem}.csv")), &csv)?;
    write_file(&PathBuf::from(format!("{stem}.gp")), &output::plot_script(&stem))?;
    let summary = output::summary(&config, &v.params, &v.gen, &traj);
    write_file(&PathBuf::from(format!("{stem}.summary.txt")), &summary)?;
    print!("{summary}");
    println!("wrote {stem}.csv, {stem}.gp, {stem}.summary.txt");
    Ok(0)
}

/// The aligned equilibrium to linearize at: taken from the config when
/// given, otherwise pinned by the conserved quantities of z0 (g3 = |Gamma|,
/// l3 from the energy after transverse motion has decayed).
fn equilibrium_for(config: &RunConfig, params: &TopParams) -> Result<Equilibrium, CliError> {
    if let Some(eq) = &config.equilibrium {
        return Equilibrium::new(eq.l3, eq.g3)
            .map_err(|e| CliError::Config(format!("equilibrium: {e}")));
    }
    let g3 = config.z0[3..].iter().map(|v| v * v).sum::<f64>().sqrt();
    let h0 = hamiltonian(params, &config.z0).map_err(|e| CliError::Numeric(e.to_string()))?;
    let l3sq = 2.0 * params.i3 * (h0 - params.xi * g3);
    if !(l3sq > 0.0) {
        return Err(CliError::Config(format!(
            "no aligned equilibrium is reachable from this z0: 2 I3 (H - xi |Gamma|) = {l3sq}"
        )));
    }
    Equilibrium::new(l3sq.sqrt(), g3).map_err(|e| CliError::Config(format!("equilibrium: {e}")))
}

pub fn cmd_linearize(config_path: &Path) -> Result<i32, CliError> {
    let config = RunConfig::load(config_path)?;
    if config.model != ModelKind::HeavyTop {
        return Err(CliError::Config(
            "linearize analyzes the heavy top; set \"model\": \"heavy-top\"".into(),
        ));
    }
    let v = config.validate()?;
    let eq = equilibrium_for(&config, &v.params)?;
    let report =
        classify(&v.params, &v.gen, &eq).map_err(|e| CliError::Numeric(e.to_string()))?;

    println!(
        "aligned equilibrium: L3* = {}, Gamma3* = {}",
        eq.l3(),
        eq.g3()
    );
    println!(
        "stability boundary for this Gamma3*: L3 = {:.7}",
        stability_boundary_l3(eq.g3(), v.params.i1, v.params.xi)
    );
    println!("jacobian (rows dL1..dGamma3):");
    for i in 0..6 {
        let row: Vec<String> = (0..6)
            .map(|j| format!("{:+.6e}", report.matrix[(i, j)]))
            .collect();
        println!("  [{}]", row.join(", "));
    }
    println!("spectrum:");
    for z in &report.spectrum {
        println!("  {}", output::cnum(*z));
    }
    println!(
        "classification: {}",
        match report.classification {
            StabilityClass::Stable => "stable",
            StabilityClass::Unstable => "unstable",
            StabilityClass::Marginal => "marginal",
        }
    );
    match report.closed_form {
        Some((a, b)) => {
            println!("closed-form roots (each doubled in the 6x6 spectrum):");
            println!("  A = {}", output::cnum(a));
            println!("  B = {}", output::cnum(b));
            let expected = [a, a.conj(), b, b.conj()];
            let mut worst = 0.0_f64;
            for w in expected {
                let best = report
                    .spectrum
                    .iter()
                    .map(|z| (z - w).norm())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(best);
            }
            println!("closed-form vs spectrum max deviation: {worst:.3e}");
        }
        None => {
            println!("closed-form roots: not available for this generator/inertia ratio");
        }
    }
    Ok(0)
}

struct GeometryCheck {
    name: &'static str,
    value: f64,
    bound: f64,
}

pub fn cmd_verify_geometry(algebra: &str, seed: u64) -> Result<i32, CliError> {
    let c = match algebra {
        "so3" => StructureConstants::so3(),
        "heavy-top" => StructureConstants::heavy_top(),
        other => {
            return Err(CliError::Config(format!(
                "unknown algebra {other:?}; expected so3 or heavy-top"
            )))
        }
    };
    let n = c.dim();
    let conn = connection_euclidean(&c);
    let r = curvature_constant_gamma(&c, &conn);

    println!("algebra: {algebra} (dimension {n})");
    println!("nonzero curvature entries R^(i j k l):");
    let entries = r.nonzero_entries(1e-14);
    for ((i, j, k, l), val) in &entries {
        println!("  R^({i} {j} {k} {l}) = {val:+.4}");
    }
    println!("  ({} entries in total)", entries.len());

    // Reference pattern: 1/4 (d^ik d^jl - d^il d^jk) restricted to the
    // rotational indices; for so3 that is every index, for the heavy top
    // the first three only (all entries touching a translation index
    // vanish).
    let rot = 3.min(n);
    let mut pattern_dev = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let rotational = i < rot && j < rot && k < rot && l < rot;
                    let expected = if rotational {
                        let dik = (i == k) as u8 as f64;
                        let djl = (j == l) as u8 as f64;
                        let dil = (i == l) as u8 as f64;
                        let djk = (j == k) as u8 as f64;
                        0.25 * (dik * djl - dil * djk)
                    } else {
                        0.0
                    };
                    pattern_dev = pattern_dev.max((r.get(i, j, k, l) - expected).abs());
                }
            }
        }
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let mut degeneracy = 0.0_f64;
    for _ in 0..100 {
        let dh: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let m = metriplectic_matrix(&r, &dh).map_err(|e| CliError::Numeric(e.to_string()))?;
        let mdh = m.matvec(&dh);
        degeneracy = degeneracy.max(mdh.iter().map(|v| v.abs()).fold(0.0_f64, f64::max));
    }

    let checks = [
        GeometryCheck {
            name: "reference pattern max deviation",
            value: pattern_dev,
            bound: 1e-12,
        },
        GeometryCheck {
            name: "torsion residual",
            value: conn.torsion_residual(&c),
            bound: 1e-12,
        },
        GeometryCheck {
            name: "metric compatibility residual",
            value: conn.compatibility_residual(),
            bound: 1e-12,
        },
        GeometryCheck {
            name: "pair-symmetry residual",
            value: r.symmetry_residual(),
            bound: 1e-12,
        },
        GeometryCheck {
            name: "first Bianchi residual",
            value: r.bianchi_residual(),
            bound: 1e-12,
        },
        GeometryCheck {
            name: "degeneracy max |M dH| over 100 random dH",
            value: degeneracy,
            bound: 1e-12,
        },
    ];
    let mut ok = true;
    for check in &checks {
        let pass = check.value <= check.bound;
        ok &= pass;
        println!(
            "{}: {:.3e} (bound {:.0e}) {}",
            check.name,
            check.value,
            check.bound,
            if pass { "ok" } else { "FAIL" }
        );
    }
    println!("verdict: {}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { 0 } else { 2 })
}

fn build_generator(kind: GeneratorKindConfig, lambda: f64) -> Result<Generator, CliError> {
    match kind {
        GeneratorKindConfig::Linear => Generator::linear(lambda),
        GeneratorKindConfig::Log => Generator::log(lambda),
        GeneratorKindConfig::Quadratic => Generator::quadratic(lambda),
    }
    .map_err(|e| CliError::Config(e.to_string()))
}

fn format_spectrum(eig: &[Complex64]) -> String {
    let mut sorted: Vec<Complex64> = eig.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let parts: Vec<String> = sorted
        .iter()
        .map(|z| format!("({:.4}, {:.4})", z.re, z.im))
        .collect();
    parts.join(" ")
}

/// Per-part greedy matching: each reference eigenvalue claims the nearest
/// unclaimed computed one; the row deviation is the worst matched
/// real-or-imaginary difference.
fn spectrum_deviation(computed: &[Complex64], reference: &[Complex64]) -> f64 {
    let mut taken = vec![false; computed.len()];
    let mut worst = 0.0_f64;
    for w in reference {
        let mut best: Option<(usize, f64)> = None;
        for (i, z) in computed.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let d = (z.re - w.re).abs().max((z.im - w.im).abs());
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (i, d) = best.expect("equal spectrum lengths");
        taken[i] = true;
        worst = worst.max(d);
    }
    worst
}

fn reproduce_spectra(out_dir: &Path) -> Result<i32, CliError> {
    let params = TopParams::symmetric(1.0, 2.0, 1.0)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let mut table = CheckTable::new();
    let mut lines = String::new();
    for row in presets::spectrum_rows() {
        let gen = build_generator(row.kind, row.lambda)?;
        let eq = Equilibrium::new(row.l3, row.g3)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let report =
            classify(&params, &gen, &eq).map_err(|e| CliError::Numeric(e.to_string()))?;
        let dev = spectrum_deviation(&report.spectrum, &row.reference);
        let pass = dev <= SPECTRUM_TOL;
        lines.push_str(&format!(
            "{}\n  reference: {}\n  computed:  {}\n  max part deviation: {:.4} (tolerance {}) -> {}\n",
            row.label,
            format_spectrum(&row.reference),
            format_spectrum(&report.spectrum),
            dev,
            SPECTRUM_TOL,
            if pass { "pass" } else { "FAIL" }
        ));
        table.push(
            row.label,
            format!("within {SPECTRUM_TOL}"),
            format!("{dev:.4}"),
            pass,
        );
    }
    print!("{lines}");
    print!("{}", table.render());
    fs::create_dir_all(out_dir)
        .map_err(|e| io_err(&format!("creating {}", out_dir.display()), e))?;
    let path = out_dir.join("spectra.txt");
    write_file(&path, &format!("{lines}\n{}", table.render()))?;
    println!("wrote {}", path.display());
    Ok(if table.all_pass() { 0 } else { 3 })
}

pub fn cmd_reproduce(id: &str, out_dir: &Path) -> Result<i32, CliError> {
    if id == "spectra" {
        return reproduce_spectra(out_dir);
    }
    let preset = presets::by_id(id).ok_or_else(|| {
        CliError::Config(format!(
            "unknown id {id:?}; expected fig1..fig7 or spectra"
        ))
    })?;
    let v = preset.config.validate()?;
    let traj = run_trajectory(&v)?;

    fs::create_dir_all(out_dir)
        .map_err(|e| io_err(&format!("creating {}", out_dir.display()), e))?;
    let csv = output::trajectory_csv(preset.config.model, &traj);
    write_file(&out_dir.join(format!("{id}.csv")), &csv)?;
    write_file(&out_dir.join(format!("{id}.gp")), &output::plot_script(id))?;
    let summary = output::summary(&preset.config, &v.params, &v.gen, &traj);
    write_file(&out_dir.join(format!("{id}.summary.txt")), &summary)?;
    let mut replay = preset.config.clone();
    replay.out_prefix = Some(format!("{id}-replay"));
    write_file(&out_dir.join(format!("{id}.config.json")), &replay.to_json())?;

    println!("{} ({})", preset.id, preset.title);
    let report = monitor_report(&traj);
    let mut table = CheckTable::new();
    table.push(
        "relative H drift",
        "< 1e-8".into(),
        format!("{:.3e}", report.max_h_drift),
        report.max_h_drift < 1e-8,
    );
    table.push(
        "relative |Gamma|^2 drift",
        "< 1e-8".into(),
        format!("{:.3e}", report.max_c2_drift),
        report.max_c2_drift < 1e-8,
    );
    table.push(
        "min per-sample Delta S",
        ">= -1e-9".into(),
        format!("{:+.3e}", report.min_delta_s),
        report.min_delta_s >= -1e-9,
    );

    let rel = detect_relaxation(&traj, 1e-3);
    table.push(
        "relaxation detected",
        if preset.expect_relaxation { "yes" } else { "no" }.into(),
        match &rel {
            Some(r) => format!("yes (t = {:.3})", r.t),
            None => "no".into(),
        },
        rel.is_some() == preset.expect_relaxation,
    );

    if preset.expect_relaxation {
        // Conservation pins the asymptotic equilibrium before the run:
        // g3 = |Gamma(0)| and l3 = sqrt(2 I3 (H0 - xi g3)).
        let g3t = preset.config.z0[3..].iter().map(|x| x * x).sum::<f64>().sqrt();
        let h0 = hamiltonian(&v.params, &v.z0).map_err(|e| CliError::Numeric(e.to_string()))?;
        let l3t = (2.0 * v.params.i3 * (h0 - v.params.xi * g3t)).sqrt();
        let (l3o, g3o) = rel.as_ref().map(|r| (r.l3, r.g3)).unwrap_or((f64::NAN, f64::NAN));
        table.push(
            "L3* vs conservation",
            format!("{l3t:.6} +- 0.01"),
            format!("{l3o:.6}"),
            (l3o - l3t).abs() < 0.01,
        );
        table.push(
            "Gamma3* vs conservation",
            format!("{g3t:.6} +- 0.01"),
            format!("{g3o:.6}"),
            (g3o - g3t).abs() < 0.01,
        );
        if let Some((l3r, g3r, tol)) = preset.reference_target {
            table.push(
                "L3* vs reference",
                format!("{l3r} +- {tol}"),
                format!("{l3o:.6}"),
                (l3o - l3r).abs() <= tol,
            );
            table.push(
                "Gamma3* vs reference",
                format!("{g3r} +- {tol}"),
                format!("{g3o:.6}"),
                (g3o - g3r).abs() <= tol,
            );
        }
    }

    print!("{}", table.render());
    println!(
        "wrote {id}.csv, {id}.gp, {id}.summary.txt, {id}.config.json in {}",
        out_dir.display()
    );
    Ok(if table.all_pass() { 0 } else { 3 })
}
