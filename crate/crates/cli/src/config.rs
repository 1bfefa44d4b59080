//! Input file formats.

use std::path::Path;

use num_rational::Ratio;
use puk_core::matrix::TracedAlgebraShape;
use puk_core::{AutomorphismKind, ComplexMatrix64};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Mixed,
    Puk,
}

/// Generators of the truncated masa pair built from the shift gadget.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncatedPair {
    pub n: usize,
    pub k: usize,
    #[serde(default = "theta")]
    pub kind: AutomorphismKind,
}

fn theta() -> AutomorphismKind {
    AutomorphismKind::Theta
}

/// Config of the `spectrum` subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default)]
    pub blocks: Option<Vec<usize>>,
    /// Trace weights as `"p/q"` strings; default proportional to block size.
    #[serde(default)]
    pub weights: Option<Vec<String>>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub a: Vec<ComplexMatrix64>,
    #[serde(default)]
    pub b: Vec<ComplexMatrix64>,
    #[serde(default)]
    pub truncated_pair: Option<TruncatedPair>,
    #[serde(default)]
    pub seed: u64,
}

impl SpectrumConfig {
    pub fn shape(&self, fallback_size: usize) -> Result<TracedAlgebraShape, CliError> {
        let blocks = self.blocks.clone().unwrap_or_else(|| vec![fallback_size]);
        match &self.weights {
            None => TracedAlgebraShape::standard(blocks).map_err(CliError::from),
            Some(ws) => {
                let weights = ws
                    .iter()
                    .map(|w| {
                        w.trim()
                            .parse::<Ratio<u64>>()
                            .map_err(|e| CliError::Input(format!("bad weight {w:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                TracedAlgebraShape::new(blocks, weights).map_err(CliError::from)
            }
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

/// Splits `--target` into one or more sets: `{2,3},{5},{7}` or `2,3;5;7`.
pub fn split_targets(text: &str) -> Result<Vec<puk_core::NSet>, CliError> {
    let t = text.trim();
    let parts: Vec<String> = if t.contains('{') {
        let mut out = Vec::new();
        let mut rest = t;
        while let Some(start) = rest.find('{') {
            if !rest[..start].trim().trim_matches(',').trim().is_empty() {
                return Err(CliError::Input(format!("unexpected text in target {text:?}")));
            }
            let end = rest[start..]
                .find('}')
                .ok_or_else(|| CliError::Input(format!("unbalanced braces in {text:?}")))?;
            out.push(rest[start + 1..start + end].to_string());
            rest = &rest[start + end + 1..];
        }
        if !rest.trim().is_empty() {
            return Err(CliError::Input(format!("unexpected text in target {text:?}")));
        }
        out
    } else {
        t.split(';').map(str::to_string).collect()
    };
    parts
        .iter()
        .map(|p| {
            let s: puk_core::NSet = p.parse().map_err(CliError::from)?;
            if s.is_empty() {
                Err(CliError::Input(format!("empty target set in {text:?}")))
            } else {
                Ok(s)
            }
        })
        .collect()
}
