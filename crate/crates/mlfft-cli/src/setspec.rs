//! Textual index-set specifications.
//!
//! Grammar: `hc:d=<int>,N=<real>,T=<real|-inf>` and `dyadic:d=<int>,n=<int>`,
//! each with an optional trailing `,even`, plus `file:<path>` for an explicit
//! set stored in the canonical text encoding.

use crate::error::CliError;
use mlfft::index_sets::{
    filter_even, generate_dyadic, generate_hc, FrequencyIndexSet, IndexSetError,
    DEFAULT_CARD_CAP,
};
use std::path::PathBuf;

#[derive(Clone, Debug, PartialEq)]
pub enum SetSpecArg {
    Hc { d: usize, n: f64, t: f64, even: bool },
    Dyadic { d: usize, n: u32, even: bool },
    File(PathBuf),
}

fn bad(spec: &str, what: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("bad set spec {spec:?}: {what}"))
}

/// Splits `body` into `key=value` pairs plus an optional lone `even` token.
fn fields<'a>(spec: &str, body: &'a str) -> Result<(Vec<(&'a str, &'a str)>, bool), CliError> {
    let mut kv = Vec::new();
    let mut even = false;
    for token in body.split(',') {
        if token == "even" {
            if even {
                return Err(bad(spec, "duplicate even flag"));
            }
            even = true;
            continue;
        }
        if even {
            return Err(bad(spec, "even must be the last token"));
        }
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| bad(spec, format!("expected key=value, got {token:?}")))?;
        if kv.iter().any(|&(seen, _)| seen == k) {
            return Err(bad(spec, format!("duplicate key {k:?}")));
        }
        kv.push((k, v));
    }
    Ok((kv, even))
}

fn take<'a>(
    spec: &str,
    kv: &mut Vec<(&'a str, &'a str)>,
    key: &str,
) -> Result<&'a str, CliError> {
    let i = kv
        .iter()
        .position(|&(k, _)| k == key)
        .ok_or_else(|| bad(spec, format!("missing key {key:?}")))?;
    Ok(kv.remove(i).1)
}

impl SetSpecArg {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let (family, body) = spec
            .split_once(':')
            .ok_or_else(|| bad(spec, "missing ':' after the family name"))?;
        match family {
            "file" => {
                if body.is_empty() {
                    return Err(bad(spec, "empty path"));
                }
                Ok(SetSpecArg::File(PathBuf::from(body)))
            }
            "hc" => {
                let (mut kv, even) = fields(spec, body)?;
                let d: usize = take(spec, &mut kv, "d")?
                    .parse()
                    .map_err(|e| bad(spec, format!("d: {e}")))?;
                let n: f64 = take(spec, &mut kv, "N")?
                    .parse()
                    .map_err(|e| bad(spec, format!("N: {e}")))?;
                let t_raw = take(spec, &mut kv, "T")?;
                let t: f64 = if t_raw == "-inf" {
                    f64::NEG_INFINITY
                } else {
                    t_raw.parse().map_err(|e| bad(spec, format!("T: {e}")))?
                };
                if let Some((k, _)) = kv.first() {
                    return Err(bad(spec, format!("unknown key {k:?}")));
                }
                Ok(SetSpecArg::Hc { d, n, t, even })
            }
            "dyadic" => {
                let (mut kv, even) = fields(spec, body)?;
                let d: usize = take(spec, &mut kv, "d")?
                    .parse()
                    .map_err(|e| bad(spec, format!("d: {e}")))?;
                let n: u32 = take(spec, &mut kv, "n")?
                    .parse()
                    .map_err(|e| bad(spec, format!("n: {e}")))?;
                if let Some((k, _)) = kv.first() {
                    return Err(bad(spec, format!("unknown key {k:?}")));
                }
                Ok(SetSpecArg::Dyadic { d, n, even })
            }
            other => Err(bad(spec, format!("unknown family {other:?}"))),
        }
    }

    /// Enumerates the set, applying the even filter last. Explicit files are
    /// checked against the cap after loading; generated families enforce it
    /// during enumeration.
    pub fn realize(&self, cap: usize) -> Result<FrequencyIndexSet, CliError> {
        let set = match self {
            SetSpecArg::Hc { d, n, t, even } => {
                let set = generate_hc(*d, *n, *t, cap).map_err(lift)?;
                if *even {
                    filter_even(&set)
                } else {
                    set
                }
            }
            SetSpecArg::Dyadic { d, n, even } => {
                let set = generate_dyadic(*d, *n, cap).map_err(lift)?;
                if *even {
                    filter_even(&set)
                } else {
                    set
                }
            }
            SetSpecArg::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read index set {}: {e}", path.display()))
                })?;
                let set = FrequencyIndexSet::parse(&text).map_err(lift)?;
                if set.len() > cap {
                    return Err(CliError::CapExceeded(format!(
                        "index set holds {} frequencies, cap is {cap}",
                        set.len()
                    )));
                }
                set
            }
        };
        Ok(set)
    }
}

fn lift(err: IndexSetError) -> CliError {
    match err {
        IndexSetError::CapExceeded { cap } => {
            CliError::CapExceeded(format!("cardinality cap {cap} exceeded"))
        }
        other => CliError::usage(other),
    }
}

/// Cardinality cap for set enumeration: the `MLFFT_MAX_CARD` environment
/// variable wins over a configured cap, which wins over the library default.
pub fn resolve_cap(configured: Option<usize>) -> Result<usize, CliError> {
    match std::env::var("MLFFT_MAX_CARD") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("MLFFT_MAX_CARD: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(configured.unwrap_or(DEFAULT_CARD_CAP)),
        Err(err) => Err(CliError::Usage(format!("MLFFT_MAX_CARD: {err}"))),
    }
}
