//! Reading groups, matrices, models and chains from files or built-in names.

use std::path::Path;
use std::sync::Arc;

use atiyah_core::group_ring::{ElementWire, MatrixWire};
use atiyah_core::residual::{ChainSpec, SymbolicMatrixWire};
use atiyah_core::virtual_group::VirtualGroupSpec;
use atiyah_core::{FiniteGroup, GroupRingMatrix, GroupSpec, ResidualChain, SymbolicMatrix, VirtualGroup};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::config::SessionConfig;
use crate::CliError;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn builtin_group(name: &str) -> Option<FiniteGroup> {
    let (family, arg) = name.split_once(':').unwrap_or((name, ""));
    let n = arg.parse::<usize>().ok().filter(|&n| n >= 1);
    match (family, n) {
        ("cyclic", Some(n)) => Some(FiniteGroup::cyclic(n)),
        ("dihedral", Some(n)) => Some(FiniteGroup::dihedral(n)),
        ("symmetric", Some(n)) if n <= 6 => Some(FiniteGroup::symmetric(n)),
        ("alternating", Some(n)) if n <= 6 => Some(FiniteGroup::alternating(n)),
        ("quaternion", None) => Some(FiniteGroup::quaternion()),
        _ => None,
    }
}

/// A group JSON file, or a built-in such as `cyclic:4`, `dihedral:3`,
/// `symmetric:3`, `alternating:4` or `quaternion`.
pub fn group(arg: &str, cfg: &SessionConfig) -> Result<Arc<FiniteGroup>, CliError> {
    let path = Path::new(arg);
    let g = if path.exists() {
        let spec: GroupSpec = read_json(path)?;
        spec.build(cfg.caps.group_size)?
    } else {
        builtin_group(arg).ok_or_else(|| CliError::input(format!("{arg}: no such file or built-in group")))?
    };
    if g.size() > cfg.caps.group_size {
        return Err(CliError::input(format!("group of order {} exceeds the cap {}", g.size(), cfg.caps.group_size)));
    }
    Ok(Arc::new(g))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixOrElement {
    Matrix(MatrixWire),
    Element(ElementWire),
}

/// A matrix JSON file; a single element is read as a `1 × 1` matrix.
pub fn matrix(path: &Path, group: &Arc<FiniteGroup>, cfg: &SessionConfig) -> Result<GroupRingMatrix, CliError> {
    let m = match read_json::<MatrixOrElement>(path)? {
        MatrixOrElement::Matrix(w) => w.to_matrix(group)?,
        MatrixOrElement::Element(e) => GroupRingMatrix::scalar(e.to_element(group)?),
    };
    check_dims(m.rows(), m.cols(), cfg)?;
    Ok(m)
}

fn check_dims(rows: usize, cols: usize, cfg: &SessionConfig) -> Result<(), CliError> {
    if rows.max(cols) > cfg.caps.matrix_dim {
        return Err(CliError::input(format!("{rows}x{cols} matrix exceeds the dimension cap {}", cfg.caps.matrix_dim)));
    }
    Ok(())
}

pub fn symbolic_matrix(path: &Path, cfg: &SessionConfig) -> Result<SymbolicMatrix, CliError> {
    let wire: SymbolicMatrixWire = read_json(path)?;
    let m = wire.build()?;
    check_dims(m.rows(), m.cols(), cfg)?;
    Ok(m)
}

/// A model JSON file or one of the built-in model names.
pub fn model(arg: &str, cfg: &SessionConfig) -> Result<VirtualGroup, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let spec: VirtualGroupSpec = read_json(path)?;
        return Ok(spec.build(cfg.caps.group_size)?);
    }
    VirtualGroup::builtin(arg).ok_or_else(|| {
        CliError::input(format!(
            "{arg}: no such file or built-in model (torsion-free, infinite-dihedral, a3-in-s3, zK-times-z such as z3-times-z)"
        ))
    })
}

pub fn chain(path: &Path, cfg: &SessionConfig) -> Result<ResidualChain, CliError> {
    let spec: ChainSpec = read_json(path)?;
    let chain = spec.build(cfg.caps.group_size)?;
    if chain.len() > cfg.caps.chain_levels {
        return Err(CliError::input(format!("{} levels exceed the cap {}", chain.len(), cfg.caps.chain_levels)));
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_groups() {
        assert_eq!(builtin_group("cyclic:4").unwrap().size(), 4);
        assert_eq!(builtin_group("dihedral:4").unwrap().size(), 8);
        assert_eq!(builtin_group("quaternion").unwrap().size(), 8);
        assert!(builtin_group("cyclic").is_none());
        assert!(builtin_group("symmetric:9").is_none());
    }
}
