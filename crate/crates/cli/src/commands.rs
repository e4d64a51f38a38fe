//! Command bodies. Each writes its files through an [`OutputDir`] and
//! reports how many tasks failed.

use std::collections::HashMap;

use anyhow::Result;
use serde::Serialize;

use ntqpt::linalg::max_abs_commutator;
use ntqpt::models::{build_hamiltonian, build_order_parameter, build_parity};
use ntqpt::oracle::oracle_deviation;
use ntqpt::quench::QuenchResult;
use ntqpt::scaling::{extract_exponents, prepare_size, sweep_order_parameter, ExponentReport, SweepGrid};
use ntqpt::spectral::{detect_precursor, LevelId, Pairing, PrecursorEstimate, SpectrumCache};
use ntqpt::{ModelKind, ModelSpec};

use crate::config::{Command, ConfigSource, RunConfig};
use crate::output::{fmt_f64, sha256_hex, to_json, Csv, OutputDir, OutputFile};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub failures: usize,
    pub files: Vec<OutputFile>,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'static str,
    anchor: &'static str,
    code_version: &'static str,
    source: &'a str,
    source_name: &'a str,
    input_sha256: String,
    config: &'a RunConfig,
    failures: usize,
    outputs: Vec<OutputFile>,
}

/// Runs `config`, writes every artifact and finally `manifest.json`.
pub fn run(config: &RunConfig, source: &ConfigSource, cache: Option<&SpectrumCache>) -> Result<RunOutcome> {
    let mut out = OutputDir::create(&config.output)?;
    let (failures, summary) = match config.command {
        Command::Spectrum => spectrum(config, cache, &mut out)?,
        Command::Quench | Command::Sweep => sweep(config, cache, &mut out)?,
        Command::Exponents => exponents(config, cache, &mut out)?,
        Command::Validate => validate(config, &mut out)?,
    };
    let files = out.files();
    let manifest = Manifest {
        command: config.command.name(),
        anchor: config.command.anchor(),
        code_version: env!("CARGO_PKG_VERSION"),
        source: source.kind,
        source_name: &source.name,
        input_sha256: sha256_hex(source.text.as_bytes()),
        config,
        failures,
        outputs: files.clone(),
    };
    out.write("manifest.json", &to_json(&manifest)?)?;
    Ok(RunOutcome { failures, files, summary })
}

fn failures_csv(rows: &[(usize, String, String)]) -> Vec<u8> {
    let mut csv = Csv::new(&["N", "input", "error"]);
    for (n, input, error) in rows {
        csv.row([n.to_string(), input.clone(), error.clone()]);
    }
    csv.into_bytes()
}

#[derive(Serialize)]
struct PrecursorReport<'a> {
    model: ModelKind,
    n: usize,
    n_max: Option<usize>,
    lambda_f: f64,
    ground_energy: f64,
    width: f64,
    /// Semiclassical critical energy as an excitation energy.
    e_c: f64,
    precursor: Option<PrecursorEstimate>,
    precursor_error: Option<String>,
    pairing: &'a Pairing,
}

fn spectrum(config: &RunConfig, cache: Option<&SpectrumCache>, out: &mut OutputDir) -> Result<(usize, Vec<String>)> {
    let sw = config.sweep_spec();
    let model = config.model.name();
    let prepared: Vec<_> = {
        use rayon::prelude::*;
        config.sizes.par_iter().map(|&n| prepare_size(&sw, n, cache)).collect()
    };
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for (&n, p) in config.sizes.iter().zip(prepared) {
        let p = match p {
            Ok(p) => p,
            Err(e) => {
                failures.push((n, "spectrum".into(), e.to_string()));
                continue;
            }
        };
        let spectrum = p.context.spectrum();
        let mut doublets: HashMap<LevelId, (usize, f64)> = HashMap::new();
        for d in &spectrum.pairing.doublets {
            doublets.insert(LevelId { parity: 1, index: d.index_plus }, (d.id, d.splitting));
            doublets.insert(LevelId { parity: -1, index: d.index_minus }, (d.id, d.splitting));
        }
        let mut csv = Csv::new(&["index", "energy", "excitation_energy", "parity", "doublet_id", "splitting"]);
        for (k, level) in spectrum.levels().iter().enumerate() {
            let (id, split) = match doublets.get(&level.id) {
                Some(&(id, s)) => (id.to_string(), fmt_f64(s)),
                None => (String::new(), String::new()),
            };
            csv.row([
                k.to_string(),
                fmt_f64(level.energy),
                fmt_f64(level.energy - spectrum.ground_energy),
                level.id.parity.to_string(),
                id,
                split,
            ]);
        }
        out.write(&format!("spectrum_{model}_N{n}.csv"), &csv.into_bytes())?;
        let detected = detect_precursor(spectrum, config.detector, &config.detector_params);
        if let Err(e) = &detected {
            failures.push((n, "precursor".into(), e.to_string()));
        }
        let report = PrecursorReport {
            model: config.model,
            n,
            n_max: spectrum.spec.n_max,
            lambda_f: config.lambda_f,
            ground_energy: spectrum.ground_energy,
            width: spectrum.width(),
            e_c: p.context.critical_excitation(),
            precursor: detected.as_ref().ok().copied(),
            precursor_error: detected.as_ref().err().map(|e| e.to_string()),
            pairing: &spectrum.pairing,
        };
        out.write(&format!("precursor_{model}_N{n}.json"), &to_json(&report)?)?;
        summary.push(match detected {
            Ok(d) => format!(
                "N = {n}: {} levels, {} doublets, E_c^(N) = {} ({}), E_c = {}",
                spectrum.dim(),
                spectrum.pairing.doublets.len(),
                fmt_f64(d.energy),
                config.detector.name(),
                fmt_f64(p.context.critical_excitation())
            ),
            Err(e) => format!("N = {n}: {} levels, precursor failed: {e}", spectrum.dim()),
        });
    }
    out.write(&format!("failures_{model}.csv"), &failures_csv(&failures))?;
    Ok((failures.len(), summary))
}

pub const SWEEP_COLUMNS: [&str; 10] = [
    "model",
    "N",
    "lambda_i",
    "lambda_f",
    "E_f_excitation",
    "reduced_e",
    "order_param_intensive",
    "order_param_extensive",
    "work_per_particle",
    "trunc_deficit",
];

pub fn sweep_row(r: &QuenchResult) -> Vec<String> {
    vec![
        r.model.name().to_string(),
        r.n.to_string(),
        fmt_f64(r.lambda_i),
        fmt_f64(r.lambda_f),
        fmt_f64(r.e_f),
        fmt_f64(r.reduced_e),
        fmt_f64(r.order_parameter),
        fmt_f64(r.order_parameter_extensive),
        fmt_f64(r.work_per_particle),
        fmt_f64(r.trunc_deficit),
    ]
}

fn sweep(config: &RunConfig, cache: Option<&SpectrumCache>, out: &mut OutputDir) -> Result<(usize, Vec<String>)> {
    let sw = config.sweep_spec();
    let model = config.model.name();
    let sizes = sweep_order_parameter(&sw, cache)?;
    let mut csv = Csv::new(&SWEEP_COLUMNS);
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for s in &sizes {
        if let Some(e) = &s.error {
            failures.push((s.n, "size".into(), e.clone()));
        }
        let mut ok = 0;
        for p in &s.points {
            match (&p.result, &p.error) {
                (Some(r), _) => {
                    csv.row(sweep_row(r));
                    ok += 1;
                }
                (None, e) => failures.push((s.n, fmt_f64(p.input), e.clone().unwrap_or_default())),
            }
        }
        summary.push(format!("N = {}: {ok}/{} quenches", s.n, sw.grid.values().len()));
    }
    let stem = if config.command == Command::Quench { "quench" } else { "sweep" };
    out.write(&format!("{stem}_{model}.csv"), &csv.into_bytes())?;
    out.write(&format!("failures_{model}.csv"), &failures_csv(&failures))?;
    if let SweepGrid::TargetE(_) = sw.grid {
        summary.push("grid: reduced energies, λ_i tuned per point".into());
    }
    Ok((failures.len(), summary))
}

fn loglog_csv(report: &ExponentReport) -> Vec<u8> {
    let mut csv = Csv::new(&["series", "N", "ln_N", "ln_value"]);
    for (name, fit) in [("zeta", &report.zeta), ("zeta_extensive", &report.zeta_extensive), ("nu", &report.nu)] {
        for ((n, _), (x, y)) in fit.points.iter().zip(fit.log_points()) {
            csv.row([name.to_string(), (*n as usize).to_string(), fmt_f64(x), fmt_f64(y)]);
        }
    }
    csv.into_bytes()
}

fn exponents(config: &RunConfig, cache: Option<&SpectrumCache>, out: &mut OutputDir) -> Result<(usize, Vec<String>)> {
    let sw = config.sweep_spec();
    let model = config.model.name();
    match extract_exponents(&sw, cache) {
        Ok(report) => {
            out.write(&format!("exponents_{model}.json"), &to_json(&report)?)?;
            out.write(&format!("loglog_{model}.csv"), &loglog_csv(&report))?;
            let failures: Vec<_> = report.failures.iter().map(|(n, e)| (*n, "size".to_string(), e.clone())).collect();
            out.write(&format!("failures_{model}.csv"), &failures_csv(&failures))?;
            let summary = vec![
                format!(
                    "zeta = {:.4} ± {:.4} (r² {:.4})",
                    report.zeta.exponent, report.zeta.stderr_exponent, report.zeta.r_squared
                ),
                format!(
                    "nu   = {:.4} ± {:.4} (r² {:.4}, E_c convention {})",
                    report.nu.exponent, report.nu.stderr_exponent, report.nu.r_squared, report.convention
                ),
                format!("beta = {:.4} ± {:.4}", report.beta.value, report.beta.error),
                format!("quality: {}", report.quality),
            ];
            Ok((failures.len(), summary))
        }
        Err(e) => {
            out.write(&format!("failures_{model}.csv"), &failures_csv(&[(0, "fit".into(), e.to_string())]))?;
            Ok((1, vec![format!("exponent extraction failed: {e}")]))
        }
    }
}

pub const ORACLE_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const SYMMETRY_MAX_N: usize = 12;
const SYMMETRY_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: &'static str,
    pub model: ModelKind,
    pub n: usize,
    pub n_max: Option<usize>,
    pub lambda: f64,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation < self.tolerance
    }
}

fn oracle_specs(n: usize) -> Vec<ModelSpec> {
    vec![
        ModelSpec::bh(n, 2.3),
        ModelSpec::bh(n, -7.0),
        ModelSpec::lmg(n, 0.35),
        ModelSpec::lmg(n, 0.7),
        ModelSpec::dicke(n, 0.75, 3),
        ModelSpec::dicke(n, 1.2, 6),
    ]
}

/// Banded builders against the dense Fock reference.
pub fn oracle_checks(sizes: &[usize]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &n in sizes {
        for spec in oracle_specs(n) {
            let dev = oracle_deviation(&spec)?;
            checks.push(Check {
                check: "oracle",
                model: spec.model,
                n,
                n_max: spec.n_max,
                lambda: spec.lambda,
                deviation: dev.iter().copied().fold(0.0, f64::max),
                tolerance: ORACLE_TOL,
            });
        }
    }
    Ok(checks)
}

fn lambda_grid(model: ModelKind) -> Vec<f64> {
    let (lo, hi) = match model {
        ModelKind::Bh => (-10.0, 10.0),
        ModelKind::Lmg => (-1.0, 1.5),
        ModelKind::Dicke => (0.0, 1.5),
    };
    (0..SYMMETRY_POINTS)
        .map(|k| lo + (hi - lo) * k as f64 / (SYMMETRY_POINTS - 1) as f64)
        .collect()
}

/// `[H, S] = 0` and `{O, S} = 0` over a coupling grid.
pub fn symmetry_checks(n: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for model in [ModelKind::Bh, ModelKind::Lmg, ModelKind::Dicke] {
        for lambda in lambda_grid(model) {
            let spec = match model {
                ModelKind::Bh => ModelSpec::bh(n, lambda),
                ModelKind::Lmg => ModelSpec::lmg(n, lambda),
                ModelKind::Dicke => ModelSpec::dicke(n, lambda, 2 * n),
            };
            let s = build_parity(&spec)?;
            let h = build_hamiltonian(&spec)?;
            let o = build_order_parameter(&spec)?;
            for (check, deviation) in [
                ("commutator_HS", max_abs_commutator(&h, &s, false)),
                ("anticommutator_OS", max_abs_commutator(&o, &s, true)),
            ] {
                checks.push(Check {
                    check,
                    model,
                    n,
                    n_max: spec.n_max,
                    lambda,
                    deviation,
                    tolerance: SYMMETRY_TOL,
                });
            }
        }
    }
    Ok(checks)
}

fn validate(config: &RunConfig, out: &mut OutputDir) -> Result<(usize, Vec<String>)> {
    let mut checks = oracle_checks(&config.sizes)?;
    let mut sym_sizes: Vec<usize> = config.sizes.iter().copied().filter(|&n| n <= SYMMETRY_MAX_N).collect();
    sym_sizes.push(SYMMETRY_MAX_N);
    sym_sizes.sort_unstable();
    sym_sizes.dedup();
    let largest = *sym_sizes.last().unwrap_or(&SYMMETRY_MAX_N);
    checks.extend(symmetry_checks(largest)?);

    let mut csv = Csv::new(&["check", "model", "N", "n_max", "lambda", "deviation", "tolerance", "status"]);
    for c in &checks {
        csv.row([
            c.check.to_string(),
            c.model.name().to_string(),
            c.n.to_string(),
            c.n_max.map(|m| m.to_string()).unwrap_or_default(),
            fmt_f64(c.lambda),
            fmt_f64(c.deviation),
            fmt_f64(c.tolerance),
            if c.passed() { "PASS" } else { "FAIL" }.to_string(),
        ]);
    }
    out.write("validate.csv", &csv.into_bytes())?;

    let mut summary = vec![format!("{:<18} {:<6} {:>6} {:>10} {:>8}", "check", "model", "cases", "max dev", "status")];
    let mut failures = 0;
    let mut groups: Vec<(&str, ModelKind)> = Vec::new();
    for c in &checks {
        if !groups.contains(&(c.check, c.model)) {
            groups.push((c.check, c.model));
        }
    }
    for (check, model) in groups {
        let group: Vec<&Check> = checks.iter().filter(|c| c.check == check && c.model == model).collect();
        let worst = group.iter().map(|c| c.deviation).fold(0.0, f64::max);
        let failed = group.iter().filter(|c| !c.passed()).count();
        failures += failed;
        summary.push(format!(
            "{check:<18} {:<6} {:>6} {worst:>10.1e} {:>8}",
            model.name(),
            group.len(),
            if failed == 0 { "PASS" } else { "FAIL" }
        ));
    }
    Ok((failures, summary))
}
