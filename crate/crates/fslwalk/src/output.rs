//! Result files.
//!
//! Layout under the output directory:
//!
//! - `meta.json`: tool, version, config hash, resolved sizes, file list
//! - `summary.json`: per-step observables and fits for every case
//! - `<case>/distribution.csv`: `step, label..., probability` rows
//! - `<case>/*.svg` with `--plot`
//!
//! Nothing time- or host-dependent is written, so identical configs give
//! identical bytes. Every file is written to a temporary sibling and renamed.

use std::io::Write;
use std::path::{Path, PathBuf};

use fslwalk_core::algebra::{AlgebraKind, AlgebraParams, AlgebraRep};
use serde_json::{json, Value};

use crate::error::RunError;
use crate::plot;
use crate::run::{CaseResult, RunResult, TOOL, VERSION};

/// Column names for the stored label tuple of each algebra.
pub fn label_columns(kind: AlgebraKind) -> &'static [&'static str] {
    match kind {
        AlgebraKind::HeisenbergWeyl | AlgebraKind::Su11 => &["n"],
        AlgebraKind::Su2 => &["two_l"],
        AlgebraKind::Su3 => &["n1", "n2", "n3"],
        AlgebraKind::So5 => &["n_au", "n_ad", "n_bu", "n_bd"],
        AlgebraKind::Euclidean2 => &["j"],
    }
}

fn params_json(params: &AlgebraParams) -> Value {
    match *params {
        AlgebraParams::HeisenbergWeyl { n_max } => json!({ "n_max": n_max }),
        AlgebraParams::Su2 { two_s } => json!({ "two_s": two_s }),
        AlgebraParams::Su3 { n } | AlgebraParams::So5 { n } => json!({ "n": n }),
        AlgebraParams::Euclidean2 { window } => json!({ "window": window }),
        AlgebraParams::Su11 { sector, n_max } => json!({ "sector": sector.parity(), "n_max": n_max }),
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io = |source| RunError::Io { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn to_json_bytes(v: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("json serializes");
    bytes.push(b'\n');
    bytes
}

/// CSV of one case; rows below `floor` are skipped.
pub fn distribution_csv(result: &RunResult, case: &CaseResult, floor: f64) -> Result<Vec<u8>, RunError> {
    let mut out = format!("# {TOOL} {VERSION} config_sha256={}\n", result.config_hash).into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    let rep: &AlgebraRep = &case.rep;
    let cols = label_columns(rep.kind());
    let mut header = vec!["step"];
    header.extend_from_slice(cols);
    header.push("probability");
    let csv_err = |e: csv::Error| RunError::Invalid(format!("csv encoding failed: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for (step, probs) in &case.distributions {
        for (site, &p) in probs.iter().enumerate() {
            if p < floor || p == 0.0 {
                continue;
            }
            row.clear();
            row.push(step.to_string());
            row.extend(rep.label(site).iter().map(|v| v.to_string()));
            row.push(format!("{p:e}"));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    out.extend(w.into_inner().map_err(|e| RunError::Invalid(format!("csv encoding failed: {e}")))?);
    Ok(out)
}

pub fn summary_json(result: &RunResult) -> Value {
    let cases: Vec<Value> = result
        .cases
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "algebra": c.rep.kind().name(),
                "site_count": c.rep.site_count(),
                "steps": c.steps,
                "record_every": c.record_every,
                "epsilon": c.epsilon,
                "realizations": c.realizations,
                "max_leakage": c.max_leakage,
                "fit": c.fit,
                "snapshots": c.snapshots,
            })
        })
        .collect();
    json!({
        "tool": TOOL,
        "version": VERSION,
        "config_sha256": result.config_hash,
        "scenario": result.config.name,
        "cases": cases,
    })
}

pub fn meta_json(result: &RunResult, files: &[String]) -> Value {
    let cases: Vec<Value> = result
        .cases
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "algebra": c.rep.kind().name(),
                "params": params_json(&c.rep.params()),
                "auto_truncation": c.auto_truncation,
                "site_count": c.rep.site_count(),
                "coin_dim": c.rep.coin_dim(),
                "state_dim": c.rep.state_dim(),
                "label_columns": label_columns(c.rep.kind()),
            })
        })
        .collect();
    let mut config = result.config.clone();
    config.output = None;
    json!({
        "tool": TOOL,
        "version": VERSION,
        "config_sha256": result.config_hash,
        "scenario": result.config.name,
        "seed": result.config.seed,
        "probability_floor": result.config.probability_floor(),
        "config": config,
        "cases": cases,
        "files": files,
    })
}

/// Writes every output file and returns their paths relative to `dir`.
pub fn write_outputs(result: &RunResult, dir: &Path, with_plots: bool) -> Result<Vec<PathBuf>, RunError> {
    let floor = result.config.probability_floor();
    let mut files: Vec<PathBuf> = Vec::new();
    for case in &result.cases {
        let rel = PathBuf::from(&case.name).join("distribution.csv");
        write_atomic(&dir.join(&rel), &distribution_csv(result, case, floor)?)?;
        files.push(rel);
        if with_plots {
            for (name, svg) in plot::case_plots(case, &result.config_hash) {
                let rel = PathBuf::from(&case.name).join(name);
                write_atomic(&dir.join(&rel), svg.as_bytes())?;
                files.push(rel);
            }
        }
    }
    write_atomic(&dir.join("summary.json"), &to_json_bytes(&summary_json(result)))?;
    files.push(PathBuf::from("summary.json"));
    let names: Vec<String> = files.iter().map(|p| p.to_string_lossy().replace('\\', "/")).collect();
    write_atomic(&dir.join("meta.json"), &to_json_bytes(&meta_json(result, &names)))?;
    files.push(PathBuf::from("meta.json"));
    Ok(files)
}
