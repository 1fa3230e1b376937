//! Group spec files: flat TOML documents with keys `blocks`, `m`, `b` and
//! an optional `u = "standard-m1"`.

use ccheis_core::{new_spec, GroupSpec};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
pub struct SpecFile {
    /// Spectral blocks as [a, k] pairs, a strictly increasing.
    pub blocks: Vec<(f64, usize)>,
    /// Center dimension.
    pub m: usize,
    /// Diagonal of A = B^T B (length m, nonnegative).
    pub b: Vec<f64>,
    /// Optional structure matrices; only "standard-m1" is recognized.
    pub u: Option<String>,
}

pub fn load(path: &std::path::Path) -> Result<GroupSpec, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read spec file {}: {e}", path.display()))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<GroupSpec, String> {
    let file: SpecFile = toml::from_str(text).map_err(|e| format!("spec parse error: {e}"))?;
    let spec = new_spec(&file.blocks, file.m, &file.b, None)
        .map_err(|e| format!("invalid spec: {e}"))?;
    match file.u.as_deref() {
        None => Ok(spec),
        Some("standard-m1") => spec
            .with_standard_u_m1()
            .map_err(|e| format!("invalid spec: {e}")),
        Some(other) => Err(format!(
            "unknown u = {other:?}; only \"standard-m1\" is supported"
        )),
    }
}

/// FNV-1a hash of the canonical spec text, used to key output rows.
pub fn spec_hash(spec: &GroupSpec) -> String {
    let mut canon = String::new();
    for blk in spec.blocks() {
        canon.push_str(&format!("({:e},{})", blk.a, blk.k));
    }
    canon.push_str(&format!(";m={}", spec.m()));
    for b in spec.b() {
        canon.push_str(&format!(";{b:e}"));
    }
    let mut h: u64 = 0xcbf29ce484222325;
    for byte in canon.as_bytes() {
        h ^= *byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}
