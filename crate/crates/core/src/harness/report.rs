//! CSV and JSON persistence of run reports and phase-space point clouds.

use super::run::{RunOutput, RunReport};
use crate::diagnostics::PhaseSet;
use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

const RECORD_HEADER: [&str; 19] = [
    "j",
    "t1",
    "t2",
    "n_t1",
    "n_t2",
    "ratio",
    "mu_c",
    "delta1",
    "delta2",
    "cross_l1",
    "norm_p",
    "norm_c",
    "d_ps_points",
    "d_ps_curve",
    "wf_point_hits",
    "wf_curve_hits",
    "residual_error",
    "wavelet_point",
    "curvelet_curve",
];

/// One row per scale.
pub fn write_records_csv(report: &RunReport, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(["schema_version", &report.schema_version.to_string()])
        .map_err(csv_err)?;
    w.write_record(RECORD_HEADER).map_err(csv_err)?;
    for r in &report.records {
        w.write_record([
            r.j.to_string(),
            r.t1.to_string(),
            r.t2.to_string(),
            r.n_t1.to_string(),
            r.n_t2.to_string(),
            r.ratio.to_string(),
            r.mu_c.to_string(),
            r.delta1.to_string(),
            r.delta2.to_string(),
            r.cross_l1.to_string(),
            r.norm_p.to_string(),
            r.norm_c.to_string(),
            opt(r.d_ps_points),
            opt(r.d_ps_curve),
            opt(r.wf_point_hits),
            opt(r.wf_curve_hits),
            r.residual_error.to_string(),
            opt(r.decay.wavelet_point),
            opt(r.decay.curvelet_curve),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `(j, b1, b2, theta, source)`; header only for an empty set.
pub fn write_phase_csv(set: &PhaseSet, j: Option<i32>, source: &str, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["j", "b1", "b2", "theta", "source"])
        .map_err(csv_err)?;
    let js = j.map(|j| j.to_string()).unwrap_or_default();
    for p in &set.points {
        w.write_record([
            js.clone(),
            p.b[0].to_string(),
            p.b[1].to_string(),
            p.theta.to_string(),
            source.into(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Point clouds of both wavefront sets and of the significant sets per
/// scale, plus the scale-vs-ratio table. Returns the files written.
pub fn emit_plot_data(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut put = |name: String, set: &PhaseSet, j: Option<i32>, tag: &str| -> Result<()> {
        let p = dir.join(name);
        write_phase_csv(set, j, tag, &p)?;
        files.push(p);
        Ok(())
    };
    put("wf_p.csv".into(), &out.wf_p, None, "wf_p")?;
    put("wf_c.csv".into(), &out.wf_c, None, "wf_c")?;
    for s in &out.phase {
        put(format!("t1_j{}.csv", s.j), &s.t1, Some(s.j), "t1")?;
        put(format!("t2_j{}.csv", s.j), &s.t2, Some(s.j), "t2")?;
    }
    let p = dir.join("ratio.csv");
    let mut w = csv::Writer::from_path(&p).map_err(csv_err)?;
    w.write_record(["j", "ratio"]).map_err(csv_err)?;
    for r in &out.report.records {
        w.write_record([r.j.to_string(), r.ratio.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    files.push(p);
    Ok(files)
}

/// `report.json`, `records.csv` and the plot data under `plot/`.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), out.report.to_json()?)?;
    write_records_csv(&out.report, &dir.join("records.csv"))?;
    emit_plot_data(out, &dir.join("plot"))?;
    Ok(())
}
