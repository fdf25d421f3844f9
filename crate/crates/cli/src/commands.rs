use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use fbe_core::analytic::transmission_probability;
use fbe_core::config::DEFAULT_SEED;
use fbe_core::experiments::{
    emit_plot_data, evaluate_point, format_real, reproduce as run_preset, run_sweep, write_csv,
    write_manifest, ComparisonRow, Manifest, Preset, RowStatus, SweepAxis, SweepSpec,
};
use fbe_core::{load_scenario, predict, validate_scenario, ScenarioSpec};

use crate::error::CliError;
use crate::{Axis, Common};

const DEFAULT_FRAMES: u64 = 10_000_000;
const DEFAULT_REPLICATIONS: u32 = 10;
const DEFAULT_OUT: &str = "results";

fn scenario(common: &Common) -> Result<ScenarioSpec, CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Validation("this command needs --config <path>".into()))?;
    let mut spec = load_scenario(path)?;
    if let Some(f) = common.frames {
        spec.horizon_frames = f;
    }
    if let Some(s) = common.seed {
        spec.seed = s;
    }
    Ok(spec)
}

fn progress(common: &Common, msg: &str) {
    if !common.quiet {
        eprintln!("{msg}");
    }
}

fn out_dir(common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn analytic(common: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    let v = validate_scenario(scenario(common)?)?;
    let a = predict(&v)?;
    writeln!(
        out,
        "scheme {}  q {}  period_us {}  cot_us {}",
        v.scheme(),
        v.q(),
        v.period().0,
        v.cot().0
    )?;
    writeln!(out, "{:>4} {:>8} {:>9} {:>12} {:>12} {:>12}", "ue", "p0", "attempts", "p_c", "P_trans", "P_failure")?;
    for (i, tx) in v.transmitters().iter().enumerate() {
        let pc = a.per_ue_pc[i];
        writeln!(
            out,
            "{:>4} {:>8} {:>9} {:>12} {:>12} {:>12}",
            i + 1,
            format_real(tx.p0),
            v.attempts(i).to_string(),
            format_real(pc),
            format_real(transmission_probability(tx.p0, pc, v.attempts(i))),
            format_real(a.per_ue_failure[i]),
        )?;
    }
    Ok(())
}

fn status_text(s: &RowStatus) -> String {
    match s {
        RowStatus::Agrees => "agrees".into(),
        RowStatus::InsufficientEvents => "insufficient_events".into(),
        RowStatus::ModelGap => "model_gap".into(),
        RowStatus::Failed(m) => format!("failed: {m}"),
    }
}

fn print_rows(rows: &[ComparisonRow], out: &mut dyn Write) -> io::Result<()> {
    writeln!(
        out,
        "{:<15} {:>3} {:>3} {:>8} {:>8} {:>12} {:>12} {:>12} {:>12} {:>10} {:>12}  status",
        "scheme", "q", "ue", "p0", "attempts", "analytic", "empirical", "ci_low", "ci_high", "drops", "packets"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<15} {:>3} {:>3} {:>8} {:>8} {:>12} {:>12} {:>12} {:>12} {:>10} {:>12}  {}",
            r.scheme.as_str(),
            r.q,
            r.ue_index,
            format_real(r.p0),
            r.attempts.to_string(),
            format_real(r.p_fail_analytic),
            format_real(r.p_fail_emp),
            format_real(r.ci_low),
            format_real(r.ci_high),
            r.drops,
            r.packets,
            status_text(&r.status),
        )?;
    }
    Ok(())
}

pub fn simulate(common: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = scenario(common)?;
    let v = validate_scenario(spec.clone())?;
    predict(&v)?;
    let reps = common.replications.unwrap_or(DEFAULT_REPLICATIONS);
    progress(
        common,
        &format!("simulating {} frames x {reps} replications, seed {}", spec.horizon_frames, spec.seed),
    );
    let rows = evaluate_point(&spec, reps);
    if let Some(RowStatus::Failed(m)) = rows.first().map(|r| &r.status) {
        return Err(CliError::Internal(m.clone()));
    }
    print_rows(&rows, out)?;
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir)?;
        let path = dir.join("simulate.csv");
        write_csv(&rows, &path)?;
        progress(common, &format!("wrote {}", path.display()));
    }
    Ok(())
}

fn parse_values<T: std::str::FromStr>(values: &[String], what: &str) -> Result<Vec<T>, CliError> {
    values
        .iter()
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("{what} value {v:?} is not a number")))
        })
        .collect()
}

pub fn sweep(common: &Common, axis: Axis, values: &[String], tag: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let mut base = scenario(common)?;
    let frames = common.frames.unwrap_or(base.horizon_frames);
    base.horizon_frames = frames;
    let reps = common.replications.unwrap_or(DEFAULT_REPLICATIONS);
    let axis = match axis {
        Axis::Q => SweepAxis::Q(parse_values(values, "q")?),
        Axis::N => SweepAxis::NConfigs(parse_values(values, "n")?),
        Axis::P0 => SweepAxis::P0(parse_values(values, "p0")?),
    };
    let seed = base.seed;
    let spec = SweepSpec::from_scenario(base, axis, frames, reps);
    progress(common, &format!("{tag}: {} points", spec.axis.len()));
    let rows = run_sweep(&spec);
    print_rows(&rows, out)?;
    if rows.iter().all(|r| matches!(r.status, RowStatus::Failed(_))) {
        return Err(CliError::Validation(format!(
            "every sweep point is invalid, first: {}",
            status_text(&rows[0].status)
        )));
    }
    let dir = out_dir(common).join(tag);
    fs::create_dir_all(&dir)?;
    let files = write_outputs(&rows, &dir, tag, frames, reps, seed, vec![spec])?;
    for f in files {
        progress(common, &format!("wrote {}", f.display()));
    }
    Ok(())
}

fn write_outputs(
    rows: &[ComparisonRow],
    dir: &Path,
    tag: &str,
    frames: u64,
    replications: u32,
    seed: u64,
    sweeps: Vec<SweepSpec>,
) -> Result<Vec<PathBuf>, CliError> {
    let table = dir.join(format!("{tag}.csv"));
    write_csv(rows, &table)?;
    let mut files = vec![table];
    files.extend(emit_plot_data(rows, dir, tag)?);
    let manifest = dir.join("manifest.json");
    write_manifest(
        &Manifest {
            preset: tag.to_string(),
            frames_per_point: frames,
            replications,
            seed,
            sweeps,
            files: files
                .iter()
                .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()))
                .collect(),
            rows: rows.to_vec(),
        },
        &manifest,
    )?;
    files.push(manifest);
    Ok(files)
}

pub fn reproduce(preset: Preset, common: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    if common.config.is_some() {
        return Err(CliError::Validation("reproduce takes its parameters from the preset, not --config".into()));
    }
    let frames = common.frames.unwrap_or(DEFAULT_FRAMES);
    let reps = common.replications.unwrap_or(DEFAULT_REPLICATIONS);
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    progress(
        common,
        &format!("{preset}: {}; {frames} frames x {reps} replications, seed {seed}", preset.description()),
    );
    let r = run_preset(preset, frames, reps, seed, out_dir(common))?;
    print_rows(&r.rows, out)?;
    for f in &r.files {
        progress(common, &format!("wrote {}", f.display()));
    }
    Ok(())
}
