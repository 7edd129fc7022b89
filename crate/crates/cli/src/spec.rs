//! Parsing of target specifications: standard complex names (optionally
//! carrying their size as a suffix, `boundary2`), facet files, and domain
//! towers like `circle:3,6,12`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use contig_core::{ComplexData, SimplicialComplex, StandardComplex};

use crate::CliError;

/// `boundary2` -> (`boundary`, Some(2)); `torus_T` -> (`torus_T`, None).
fn split_trailing_digits(name: &str) -> (&str, Option<usize>) {
    let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
    if stem.len() == name.len() {
        (name, None)
    } else {
        (stem, name[stem.len()..].parse().ok())
    }
}

/// A standard complex from a name plus an optional size flag. The size may
/// come from either place but not both.
pub fn parse_standard(name: &str, k: Option<usize>) -> Result<StandardComplex, CliError> {
    let (stem, suffix) = split_trailing_digits(name);
    let size = match (suffix, k) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage(format!(
                "size of `{name}` given both in the name and with --k"
            )))
        }
        (s, k) => s.or(k),
    };
    match (stem, size) {
        ("point", None) => Ok(StandardComplex::Point),
        ("torus_T" | "torus_t" | "torus", None) => Ok(StandardComplex::TorusT),
        ("pinched_P" | "pinched_p" | "pinched", None) => Ok(StandardComplex::PinchedP),
        ("circle", Some(k)) => Ok(StandardComplex::Circle(k)),
        ("boundary", Some(d)) => Ok(StandardComplex::Boundary(d)),
        ("simplex", Some(d)) => Ok(StandardComplex::Simplex(d)),
        ("circle" | "boundary" | "simplex", None) => Err(CliError::usage(format!(
            "`{stem}` needs a size: write `{stem}3` or pass --k"
        ))),
        ("point" | "torus_T" | "torus_t" | "torus" | "pinched_P" | "pinched_p" | "pinched", _) => {
            Err(CliError::usage(format!("`{stem}` does not take a size")))
        }
        _ => Err(CliError::usage(format!(
            "unknown complex `{name}`; known: point, simplex<d>, boundary<d>, circle<k>, torus_T, pinched_P"
        ))),
    }
}

pub fn load_facets(path: &Path) -> Result<SimplicialComplex, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))?;
    let data: ComplexData = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    Ok(SimplicialComplex::from_data(&data)?)
}

/// A standard name, or a path to a facet file when the name is not known.
pub fn parse_target(spec: &str) -> Result<(Arc<SimplicialComplex>, String), CliError> {
    if let Ok(standard) = parse_standard(spec, None) {
        return Ok((Arc::new(standard.build()?), standard.name()));
    }
    let path = Path::new(spec);
    if path.exists() {
        let complex = load_facets(path)?;
        return Ok((Arc::new(complex), spec.to_string()));
    }
    Err(CliError::usage(format!(
        "`{spec}` is neither a standard complex nor an existing facet file"
    )))
}

/// Comma-separated sizes; empty or blank input means an empty list.
pub fn parse_usize_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::usage(format!("`{s}` is not a size")))
        })
        .collect()
}

pub fn parse_u64_list(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::usage(format!("`{s}` is not a seed")))
        })
        .collect()
}

/// Domain tower `family:k1,k2,...`, currently circles only.
pub struct Tower {
    pub ks: Vec<usize>,
}

pub fn parse_tower(text: &str) -> Result<Tower, CliError> {
    let (family, list) = text
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("`{text}` is not of the form circle:<k,...>")))?;
    if family != "circle" {
        return Err(CliError::usage(format!(
            "unsupported domain family `{family}`; only `circle` towers are implemented"
        )));
    }
    let ks = parse_usize_list(list)?;
    if ks.is_empty() {
        return Err(CliError::usage("domain tower needs at least one size".into()));
    }
    Ok(Tower { ks })
}
