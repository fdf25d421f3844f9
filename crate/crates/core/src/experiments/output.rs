use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::{ComparisonRow, RowStatus, SweepSpec};
use crate::model::SchemeKind;

pub const CSV_HEADER: [&str; 11] = [
    "scheme",
    "q",
    "ue_index",
    "p0",
    "attempts",
    "p_fail_analytic",
    "p_fail_emp",
    "ci_low",
    "ci_high",
    "frames",
    "seed",
];

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("cannot encode manifest {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("EmptySeries: no rows to write")]
    EmptySeries,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Six significant digits, `%g` style: `0.00990099`, `1e-08`, `0.5`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

/// Write rows as CSV. Rows of failed points are left out.
pub fn write_csv(rows: &[ComparisonRow], path: impl AsRef<Path>) -> Result<(), OutputError> {
    let path = path.as_ref();
    let rows: Vec<&ComparisonRow> = rows
        .iter()
        .filter(|r| !matches!(r.status, RowStatus::Failed(_)))
        .collect();
    if rows.is_empty() {
        return Err(OutputError::EmptySeries);
    }
    let csv_err = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scheme.as_str().to_string(),
            r.q.to_string(),
            r.ue_index.to_string(),
            format_real(r.p0),
            r.attempts.to_string(),
            format_real(r.p_fail_analytic),
            format_real(r.p_fail_emp),
            format_real(r.ci_low),
            format_real(r.ci_high),
            r.frames.to_string(),
            r.seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

struct SeriesPoint {
    x: usize,
    emp: f64,
    analytic: f64,
    ci_low: f64,
    ci_high: f64,
}

fn series_points(rows: &[&ComparisonRow]) -> Vec<SeriesPoint> {
    let pooled = rows.iter().all(|r| r.ue_index == 0);
    let single_q = rows.iter().all(|r| r.q == rows[0].q);
    let mut pts: Vec<SeriesPoint> = if pooled || single_q {
        // Transmitters that never give up have nothing to plot.
        rows.iter()
            .filter(|r| pooled || r.attempts.finite().is_some())
            .map(|r| SeriesPoint {
                x: if pooled { r.q } else { r.ue_index },
                emp: r.p_fail_emp,
                analytic: r.p_fail_analytic,
                ci_low: r.ci_low,
                ci_high: r.ci_high,
            })
            .collect()
    } else {
        // Per-transmitter rows over several system sizes: one point per size,
        // pooled over the transmitters with a finite attempt limit.
        let mut qs: Vec<usize> = rows.iter().map(|r| r.q).collect();
        qs.sort_unstable();
        qs.dedup();
        qs.into_iter()
            .filter_map(|q| {
                let at_q: Vec<&&ComparisonRow> = rows
                    .iter()
                    .filter(|r| r.q == q && r.attempts.finite().is_some())
                    .collect();
                if at_q.is_empty() {
                    return None;
                }
                let drops: u64 = at_q.iter().map(|r| r.drops).sum();
                let packets: u64 = at_q.iter().map(|r| r.packets).sum();
                let (ci_low, ci_high) = crate::stats::wilson_interval(drops, packets, crate::stats::Z_997);
                Some(SeriesPoint {
                    x: at_q.len(),
                    emp: if packets == 0 { 0.0 } else { drops as f64 / packets as f64 },
                    analytic: at_q.iter().map(|r| r.p_fail_analytic).sum::<f64>() / at_q.len() as f64,
                    ci_low,
                    ci_high,
                })
            })
            .collect()
    };
    pts.sort_by_key(|p| p.x);
    pts.dedup_by_key(|p| p.x);
    pts
}

/// Write one whitespace-separated series file per scheme and configuration
/// count (and per `p0` when a pair has several) into `dir`, named
/// `<tag>_<scheme>_<n>.csv`. Returns the paths written.
pub fn emit_plot_data(rows: &[ComparisonRow], dir: impl AsRef<Path>, tag: &str) -> Result<Vec<PathBuf>, OutputError> {
    let dir = dir.as_ref();
    // Rows of one point are contiguous and start at ue_index 0 or 1; the
    // first transmitter of a point decides its series.
    let mut points: Vec<Vec<&ComparisonRow>> = Vec::new();
    for r in rows.iter().filter(|r| !matches!(r.status, RowStatus::Failed(_))) {
        match points.last_mut() {
            Some(p) if r.ue_index > 1 => p.push(r),
            _ => points.push(vec![r]),
        }
    }
    if points.is_empty() {
        return Err(OutputError::EmptySeries);
    }
    let key = |p: &Vec<&ComparisonRow>| (p[0].scheme, p[0].n_configs);
    let mut keys: Vec<(SchemeKind, u32)> = Vec::new();
    for p in &points {
        if !keys.contains(&key(p)) {
            keys.push(key(p));
        }
    }
    let mut written = Vec::new();
    for (scheme, n) in keys {
        let group: Vec<&Vec<&ComparisonRow>> = points.iter().filter(|p| key(p) == (scheme, n)).collect();
        let mut p0s: Vec<f64> = Vec::new();
        for p in &group {
            if !p0s.contains(&p[0].p0) {
                p0s.push(p[0].p0);
            }
        }
        let split = p0s.len() > 1;
        for p0 in &p0s {
            let sub: Vec<&ComparisonRow> = group
                .iter()
                .filter(|p| p[0].p0 == *p0)
                .flat_map(|p| p.iter().copied())
                .collect();
            let pts = series_points(&sub);
            let mut name = format!("{tag}_{}_{n}", scheme.as_str());
            if split {
                name.push_str(&format!("_p0{}", format_real(*p0)));
            }
            name.push_str(".csv");
            let path = dir.join(name);
            let mut text = String::new();
            text.push_str(&format!("# {tag} scheme={} n={n} p0={}\n", scheme.as_str(), format_real(*p0)));
            text.push_str("# failure probabilities span decades: plot y on a log scale\n");
            text.push_str("# x p_fail_emp p_fail_analytic ci_low ci_high\n");
            for p in pts {
                text.push_str(&format!(
                    "{} {} {} {} {}\n",
                    p.x,
                    format_real(p.emp),
                    format_real(p.analytic),
                    format_real(p.ci_low),
                    format_real(p.ci_high)
                ));
            }
            let mut f = fs::File::create(&path).map_err(io_err(&path))?;
            f.write_all(text.as_bytes()).map_err(io_err(&path))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Everything needed to rerun a reproduction.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub preset: String,
    pub frames_per_point: u64,
    pub replications: u32,
    pub seed: u64,
    pub sweeps: Vec<SweepSpec>,
    pub files: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

pub fn write_manifest(manifest: &Manifest, path: impl AsRef<Path>) -> Result<(), OutputError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(manifest).map_err(|source| OutputError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, text + "\n").map_err(io_err(path))
}
