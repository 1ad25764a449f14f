//! `verify` command: re-derive coverage of a stored lattice against a stored
//! index set and print a per-component report.

use crate::build::LatticeFile;
use crate::error::CliError;
use mlfft::index_sets::FrequencyIndexSet;
use mlfft::lattice::{coverage_check, MultipleLattice};
use std::collections::BTreeMap;
use std::path::Path;

const MAX_LISTED_UNCOVERED: usize = 20;

pub fn run_verify(lattice_path: &Path, set_path: &Path) -> Result<(), CliError> {
    let set_text = std::fs::read_to_string(set_path).map_err(|e| {
        CliError::Usage(format!("cannot read index set {}: {e}", set_path.display()))
    })?;
    let set = FrequencyIndexSet::parse(&set_text).map_err(CliError::usage)?;
    let lattice_text = std::fs::read_to_string(lattice_path).map_err(|e| {
        CliError::Usage(format!("cannot read lattice {}: {e}", lattice_path.display()))
    })?;
    let file: LatticeFile = serde_json::from_str(&lattice_text)
        .map_err(|e| CliError::Usage(format!("bad lattice {}: {e}", lattice_path.display())))?;

    let found = set.hash_hex();
    if file.index_set_hash != found {
        return Err(CliError::HashMismatch { expected: file.index_set_hash, found });
    }
    if file.d != set.dim() {
        return Err(CliError::Usage(format!(
            "lattice dimension {} does not match set dimension {}",
            file.d,
            set.dim()
        )));
    }

    let ml = MultipleLattice::bind(file.to_components()?, &set).map_err(CliError::usage)?;
    println!("index set: d={} |I|={} hash={}", set.dim(), set.len(), &found[..12]);
    for (i, lat) in ml.components().iter().enumerate() {
        println!(
            "component {i}: M={} z={:?} reconstructs {}",
            lat.m(),
            lat.z(),
            ml.aliasing_free(i).len()
        );
    }
    let mut histogram: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in ml.counters() {
        *histogram.entry(c).or_default() += 1;
    }
    let rendered: Vec<String> = histogram
        .iter()
        .map(|(count, freqs)| format!("{count}x{freqs}"))
        .collect();
    println!("coverage counter histogram: {}", rendered.join(" "));

    let (covered, missing) = coverage_check(&ml, &set);
    if covered {
        println!("coverage: COVERED");
        Ok(())
    } else {
        println!("coverage: UNCOVERED ({} frequencies)", missing.len());
        for k in missing.iter().take(MAX_LISTED_UNCOVERED) {
            println!("  uncovered: {k:?}");
        }
        if missing.len() > MAX_LISTED_UNCOVERED {
            println!("  ... and {} more", missing.len() - MAX_LISTED_UNCOVERED);
        }
        Err(CliError::NotCovered(format!(
            "{} frequencies uncovered",
            missing.len()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::{run_build, BuildArgs};

    fn built_dir() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        run_build(&BuildArgs {
            set: "hc:d=2,N=8,T=0",
            c: 2.0,
            delta: 0.5,
            seed: 5,
            retries: 3,
            out: dir.path(),
        })
        .unwrap();
        dir
    }

    #[test]
    fn fresh_build_verifies_covered() {
        let dir = built_dir();
        run_verify(&dir.path().join("lattice.json"), &dir.path().join("index_set.txt")).unwrap();
    }

    #[test]
    fn hash_mismatch_is_detected() {
        let dir = built_dir();
        let other = tempfile::tempdir().unwrap();
        run_build(&BuildArgs {
            set: "hc:d=2,N=4,T=0",
            c: 2.0,
            delta: 0.5,
            seed: 5,
            retries: 3,
            out: other.path(),
        })
        .unwrap();
        let err = run_verify(
            &dir.path().join("lattice.json"),
            &other.path().join("index_set.txt"),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_HASH_MISMATCH);
    }

    #[test]
    fn deleting_a_component_uncovers_frequencies() {
        let dir = tempfile::tempdir().unwrap();
        run_build(&BuildArgs {
            set: "hc:d=3,N=8,T=0",
            c: 2.0,
            delta: 0.5,
            seed: 5,
            retries: 3,
            out: dir.path(),
        })
        .unwrap();
        let path = dir.path().join("lattice.json");
        let mut file: LatticeFile =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        // Every component is kept only if it newly covers something, so the
        // frequencies first covered by the last one are covered by it alone
        // and deleting it must break coverage.
        assert!(file.components.len() >= 2, "construction kept a single component");
        file.components.pop();
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        let err = run_verify(&path, &dir.path().join("index_set.txt")).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_NOT_COVERED);
    }

    #[test]
    fn corrupt_lattice_json_is_a_usage_error() {
        let dir = built_dir();
        let path = dir.path().join("lattice.json");
        std::fs::write(&path, "{").unwrap();
        let err = run_verify(&path, &dir.path().join("index_set.txt")).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_USAGE);
    }
}
