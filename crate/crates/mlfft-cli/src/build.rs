//! `build` command: construct a multiple lattice for one index set and write
//! the artifacts `index_set.txt`, `lattice.json`, and `report.json`.

use crate::error::CliError;
use crate::setspec::{resolve_cap, SetSpecArg};
use mlfft::construct::{
    build_multiple_lattice, ConstructError, ConstructionParams, ConstructionReport,
};
use mlfft::index_sets::FrequencyIndexSet;
use mlfft::lattice::{MultipleLattice, Rank1Lattice};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// On-disk form of a constructed lattice, bound to its index set by hash.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeFile {
    pub d: usize,
    pub index_set_hash: String,
    pub components: Vec<LatticeComponent>,
    /// Seed of the successful construction run (base seed plus retry offset).
    pub seed: u64,
    pub c: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeComponent {
    pub z: Vec<u64>,
    #[serde(rename = "M")]
    pub m: u64,
}

impl LatticeFile {
    pub fn from_lattice(ml: &MultipleLattice, set: &FrequencyIndexSet, seed: u64, c: f64, delta: f64) -> Self {
        LatticeFile {
            d: ml.dim(),
            index_set_hash: set.hash_hex(),
            components: ml
                .components()
                .iter()
                .map(|lat| LatticeComponent { z: lat.z().to_vec(), m: lat.m() })
                .collect(),
            seed,
            c,
            delta,
        }
    }

    pub fn to_components(&self) -> Result<Vec<Rank1Lattice>, CliError> {
        self.components
            .iter()
            .map(|c| Rank1Lattice::new(c.z.clone(), c.m).map_err(CliError::usage))
            .collect()
    }
}

pub struct BuildArgs<'a> {
    pub set: &'a str,
    pub c: f64,
    pub delta: f64,
    pub seed: u64,
    pub retries: u32,
    pub out: &'a Path,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable artifact");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn run_build(args: &BuildArgs) -> Result<(), CliError> {
    // Parse and enumerate before touching the filesystem, so a rejected spec
    // leaves no files behind.
    let spec = SetSpecArg::parse(args.set)?;
    let set = spec.realize(resolve_cap(None)?)?;

    std::fs::create_dir_all(args.out)?;
    std::fs::write(args.out.join("index_set.txt"), set.canonical_bytes())?;

    let mut last_report: Option<ConstructionReport> = None;
    for attempt in 0..=args.retries {
        let seed = args.seed.wrapping_add(u64::from(attempt));
        let params = ConstructionParams::new(args.c, args.delta, seed).map_err(CliError::usage)?;
        match build_multiple_lattice(&set, &params) {
            Ok((ml, report)) => {
                let file = LatticeFile::from_lattice(&ml, &set, seed, args.c, args.delta);
                write_json(&args.out.join("lattice.json"), &file)?;
                write_json(&args.out.join("report.json"), &report)?;
                println!(
                    "covered {} frequencies with L={} components, {} samples (attempt {attempt})",
                    set.len(),
                    report.l,
                    ml.total_samples()
                );
                return Ok(());
            }
            Err(ConstructError::NotCovered(report)) => last_report = Some(*report),
            Err(other) => return Err(CliError::usage(other)),
        }
    }

    let report = last_report.expect("at least one attempt ran");
    let uncovered = report.uncovered.len();
    write_json(&args.out.join("report.json"), &report)?;
    Err(CliError::NotCovered(format!(
        "{uncovered} frequencies uncovered after {} attempts",
        args.retries + 1
    )))
}
