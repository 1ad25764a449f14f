//! `experiment` command: sweep reconstruction error over index-set refinement
//! and emit one CSV row per (scheme, dimension, refinement) point.
//!
//! Points run in a worker pool. Every point derives its own seed from the
//! base seed and a stable textual key, so the CSV bytes are identical however
//! the pool schedules the work.

use crate::config::{ExperimentConfig, Family};
use crate::error::CliError;
use crate::setspec::resolve_cap;
use mlfft::analysis::{relative_errors, ErrorRecord, SchemeTag};
use mlfft::construct::{
    build_multiple_lattice, build_single_lattice_cbc, ConstructError, ConstructionParams,
};
use mlfft::derive_seed;
use mlfft::index_sets::{filter_even, generate_dyadic, generate_hc, FrequencyIndexSet};
use mlfft::lattice::MultipleLattice;
use mlfft::testfuncs::TensorTestFunction;
use mlfft::transform::approximate;
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Clone, Copy, Debug)]
struct Point {
    scheme: SchemeTag,
    d: usize,
    refinement: f64,
}

impl Point {
    /// Stable key naming the point; doubles as the seed-derivation label.
    fn key(&self, function: &str) -> String {
        format!("{function}:{}:d={}:N={}", self.scheme, self.d, self.refinement)
    }
}

struct Row {
    point: Point,
    record: ErrorRecord,
}

pub struct ExperimentOutcome {
    pub rows_written: usize,
    pub rows_failed: usize,
}

#[derive(Serialize)]
struct Metadata {
    timestamp_unix_s: u64,
    threads: usize,
    duration_ms: u128,
    rows_written: usize,
    rows_failed: usize,
}

fn realize_point_set(
    family: &Family,
    d: usize,
    refinement: f64,
    cap: usize,
) -> Result<FrequencyIndexSet, String> {
    let set = match family {
        Family::Hc { t, even } => {
            let set = generate_hc(d, refinement, *t, cap).map_err(|e| e.to_string())?;
            if *even {
                filter_even(&set)
            } else {
                set
            }
        }
        Family::Dyadic { even } => {
            let set = generate_dyadic(d, refinement as u32, cap).map_err(|e| e.to_string())?;
            if *even {
                filter_even(&set)
            } else {
                set
            }
        }
    };
    Ok(set)
}

fn run_point(cfg: &ExperimentConfig, cap: usize, point: &Point) -> Result<Row, String> {
    let seed = derive_seed(cfg.seed, &point.key(&cfg.function));
    let set = realize_point_set(&cfg.family, point.d, point.refinement, cap)?;
    if set.is_empty() {
        return Err("empty index set".into());
    }
    let f = TensorTestFunction::new(cfg.kind(), point.d).map_err(|e| e.to_string())?;

    let ml = match point.scheme {
        SchemeTag::Single => {
            let (lat, _) = build_single_lattice_cbc(&set, seed).map_err(|e| e.to_string())?;
            MultipleLattice::bind(vec![lat], &set).map_err(|e| e.to_string())?
        }
        SchemeTag::Multiple => {
            let mut found = None;
            let mut last_err = String::new();
            for attempt in 0..=cfg.retries {
                let params =
                    ConstructionParams::new(cfg.c, cfg.delta, seed.wrapping_add(u64::from(attempt)))
                        .map_err(|e| e.to_string())?;
                match build_multiple_lattice(&set, &params) {
                    Ok((ml, _)) => {
                        found = Some(ml);
                        break;
                    }
                    Err(err @ ConstructError::NotCovered(_)) => last_err = err.to_string(),
                    Err(other) => return Err(other.to_string()),
                }
            }
            found.ok_or(last_err)?
        }
    };

    if let Some(max) = cfg.max_samples {
        let total = ml.total_samples();
        if total > u128::from(max) {
            return Err(format!("sample count {total} above the cap {max}"));
        }
    }

    let (approx, m_total) = approximate(|x| f.eval(x), &set, &ml).map_err(|e| e.to_string())?;
    let (rel_a, rel_l2) = relative_errors(&f, &set, &approx);
    Ok(Row {
        point: *point,
        record: ErrorRecord {
            d: point.d,
            cardinality: set.len(),
            m: m_total,
            l: ml.components().len(),
            rel_err_a: rel_a,
            rel_err_l2: rel_l2,
            seed,
            scheme: point.scheme,
        },
    })
}

/// Shape-parameter column: empty for dyadic families, which have none.
fn t_column(family: &Family) -> String {
    match family {
        Family::Hc { t, .. } => {
            if *t == f64::NEG_INFINITY {
                "-inf".into()
            } else {
                format!("{t}")
            }
        }
        Family::Dyadic { .. } => String::new(),
    }
}

fn write_csv(path: &Path, family: &Family, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)
        .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    w.write_record([
        "scheme", "d", "T", "N", "card", "M", "L", "rel_err_A", "rel_err_L2", "seed",
    ])
    .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    let t = t_column(family);
    for row in rows {
        let r = &row.record;
        w.write_record([
            r.scheme.to_string(),
            r.d.to_string(),
            t.clone(),
            format!("{}", row.point.refinement),
            r.cardinality.to_string(),
            r.m.to_string(),
            r.l.to_string(),
            format!("{:.5e}", r.rel_err_a),
            format!("{:.5e}", r.rel_err_l2),
            r.seed.to_string(),
        ])
        .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<ExperimentOutcome, CliError> {
    cfg.validate()?;
    let cap = resolve_cap(cfg.max_card)?;
    let started = Instant::now();

    let mut points = Vec::new();
    for &scheme in cfg.scheme.tags() {
        for &d in &cfg.dims {
            for &refinement in &cfg.refinements {
                points.push(Point { scheme, d, refinement });
            }
        }
    }
    points.sort_by(|a, b| {
        (a.scheme.to_string(), a.d)
            .cmp(&(b.scheme.to_string(), b.d))
            .then(a.refinement.total_cmp(&b.refinement))
    });

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))?;
    let results: Vec<Result<Row, String>> =
        pool.install(|| points.par_iter().map(|p| run_point(cfg, cap, p)).collect());

    let mut rows = Vec::with_capacity(results.len());
    let mut failed = 0usize;
    for (point, result) in points.iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(msg) => {
                failed += 1;
                eprintln!("point {} failed: {msg}", point.key(&cfg.function));
            }
        }
    }

    std::fs::create_dir_all(out_dir)?;
    write_csv(&out_dir.join("results.csv"), &cfg.family, &rows)?;
    let mut echo = serde_json::to_string_pretty(cfg).expect("config serializes");
    echo.push('\n');
    std::fs::write(out_dir.join("config.json"), echo)?;
    let meta = Metadata {
        timestamp_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        threads: pool.current_num_threads(),
        duration_ms: started.elapsed().as_millis(),
        rows_written: rows.len(),
        rows_failed: failed,
    };
    let mut meta_text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    meta_text.push('\n');
    std::fs::write(out_dir.join("metadata.json"), meta_text)?;

    Ok(ExperimentOutcome { rows_written: rows.len(), rows_failed: failed })
}
