use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LinearMap, NormKind, TripleSystem};
use crate::error::Result;

/// On-disk form of a [`TripleSystem`]. The tensor is flat, length `n⁴`, in
/// `(i,j,k,l)` row-major order; `complex_structure` is a flat `n²` array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub name: String,
    pub dim: usize,
    pub tensor: Vec<f64>,
    pub norm_kind: NormKind,
    pub rank_hint: Option<usize>,
    pub complex_structure: Option<Vec<f64>>,
    pub factor_kind: String,
}

impl From<&TripleSystem> for SystemFile {
    fn from(s: &TripleSystem) -> Self {
        Self {
            name: s.name().to_string(),
            dim: s.dim(),
            tensor: s.tensor().to_vec(),
            norm_kind: s.norm_kind(),
            rank_hint: s.rank_hint(),
            complex_structure: s.complex_structure().map(|j| j.entries().to_vec()),
            factor_kind: s.factor_kind().to_string(),
        }
    }
}

impl TryFrom<SystemFile> for TripleSystem {
    type Error = crate::error::TripleError;

    fn try_from(f: SystemFile) -> Result<Self> {
        let j = f
            .complex_structure
            .map(|e| LinearMap::new(f.dim, e))
            .transpose()?;
        TripleSystem::new(
            f.name,
            f.dim,
            f.tensor,
            f.norm_kind,
            f.rank_hint,
            j,
            f.factor_kind,
        )
    }
}

pub fn write_system(system: &TripleSystem, path: &Path) -> Result<()> {
    let json = serde_json::to_string(&SystemFile::from(system))?;
    fs::write(path, json)?;
    Ok(())
}

pub fn read_system(path: &Path) -> Result<TripleSystem> {
    let text = fs::read_to_string(path)?;
    let file: SystemFile = serde_json::from_str(&text)?;
    TripleSystem::try_from(file)
}
