//! On-disk run artifacts: CSV/JSONL streams and a JSON manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::SimOutput;
use crate::error::{Error, Result};

pub const TRAJECTORIES: &str = "trajectories.csv";
pub const METRICS: &str = "metrics.csv";
pub const CELLS: &str = "cells.jsonl";
pub const TEAM_FITS: &str = "team_fits.csv";
pub const MANIFEST: &str = "manifest.json";

/// Final-over-initial `l2_final` ratio below which a run counts as a success.
pub const REPORT_PASS_RATIO: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub scenario: String,
    pub seed: u64,
    pub parallel: bool,
    /// `converged`, `step_limit` or `error`.
    pub status: String,
    pub steps: usize,
    pub final_time: f64,
    pub files: Vec<String>,
    /// Wall-clock start and end, seconds since the Unix epoch.
    pub started_at: f64,
    pub finished_at: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Seconds since the Unix epoch.
pub fn unix_now() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| io_err(&path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Create `dir` if needed and check it is writable.
pub fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let probe = dir.join(".oavc-write-probe");
    File::create(&probe).map_err(|e| io_err(dir, e))?;
    let _ = fs::remove_file(probe);
    Ok(())
}

/// Write the four data streams; returns their file names.
pub fn write_outputs(dir: &Path, out: &SimOutput) -> Result<Vec<String>> {
    write_file(dir, TRAJECTORIES, |w| {
        writeln!(w, "t,agent,x,y,ux,uy")?;
        for r in &out.trajectory {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                num(r.t),
                r.agent,
                num(r.position.x),
                num(r.position.y),
                num(r.velocity.x),
                num(r.velocity.y)
            )?;
        }
        Ok(())
    })?;
    write_file(dir, METRICS, |w| {
        writeln!(w, "t,H,l2_ref,l2_final,e_max,window_k")?;
        for m in &out.metrics {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                num(m.t),
                num(m.h),
                opt(m.l2_ref),
                opt(m.l2_final),
                num(m.e_max),
                m.window_k
            )?;
        }
        Ok(())
    })?;
    write_file(dir, CELLS, |w| {
        for c in &out.cells {
            let verts: Vec<[f64; 2]> = c.vertices.iter().map(|v| [v.x, v.y]).collect();
            let line = serde_json::json!({ "t": c.t, "agent": c.agent, "vertices": verts });
            writeln!(w, "{line}")?;
        }
        Ok(())
    })?;
    write_file(dir, TEAM_FITS, |w| {
        writeln!(w, "tau_k,component,weight,mux,muy,s11,s12,s22")?;
        for f in &out.team_fits {
            for (j, (g, wt)) in f
                .mixture
                .components()
                .iter()
                .zip(f.mixture.weights())
                .enumerate()
            {
                let (m, c) = (g.mean(), g.cov());
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    num(f.tau),
                    j,
                    num(*wt),
                    num(m.x),
                    num(m.y),
                    num(c.a11),
                    num(c.a12),
                    num(c.a22)
                )?;
            }
        }
        Ok(())
    })?;
    Ok([TRAJECTORIES, METRICS, CELLS, TEAM_FITS]
        .map(String::from)
        .to_vec())
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    write_file(dir, MANIFEST, |w| {
        serde_json::to_writer_pretty(&mut *w, manifest).map_err(std::io::Error::other)?;
        writeln!(w)
    })?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceReport {
    pub initial: f64,
    pub last: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Compare the first and last `l2_final` values of a metrics file.
pub fn distance_report(metrics_csv: &str) -> Result<DistanceReport> {
    let mut lines = metrics_csv.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("metrics file is empty".into()))?
        .split(',')
        .collect();
    let col = header
        .iter()
        .position(|h| *h == "l2_final")
        .ok_or_else(|| Error::InvalidInput("metrics file has no l2_final column".into()))?;
    let values = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let field = l.split(',').nth(col).unwrap_or("");
            field
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("l2_final `{field}`: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let (Some(&initial), Some(&last)) = (values.first(), values.last()) else {
        return Err(Error::InvalidInput("metrics file has no rows".into()));
    };
    let ratio = last / initial;
    Ok(DistanceReport {
        initial,
        last,
        ratio,
        pass: ratio < REPORT_PASS_RATIO,
    })
}
