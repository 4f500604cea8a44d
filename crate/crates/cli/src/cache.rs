//! On-disk character-table cache keyed by the canonical group hash.
//!
//! Groups of order at most 8 are stored in their canonical labeling, so an
//! isomorphic group presented with shuffled indices hits the same entry.
//! Larger groups are stored as given and a hit requires the same table.

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use atiyah_core::characters::{compute_character_table, insert_cached};
use atiyah_core::{CharacterTable, FiniteGroup};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    /// Multiplication table the stored character table refers to.
    group: Vec<Vec<usize>>,
    table: CharacterTable,
}

pub struct TableCache {
    dir: PathBuf,
}

/// What happened when a table was requested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    /// The entry existed but could not be used; it was recomputed.
    Repaired(String),
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (a, &b) in perm.iter().enumerate() {
        inv[b] = a;
    }
    inv
}

impl TableCache {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::input(format!("cache dir {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Loads the table for `group` from disk, or computes and stores it.
    /// The table is also placed in the in-process cache.
    pub fn table(&self, group: &FiniteGroup) -> Result<(Arc<CharacterTable>, Lookup), CliError> {
        let form = group.canonical_form();
        let path = self.path(&form.key);
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(&path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        file.lock().map_err(|e| CliError::input(format!("locking {}: {e}", path.display())))?;
        let mut text = String::new();
        file.read_to_string(&mut text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;

        let lookup = if text.is_empty() {
            Lookup::Miss
        } else {
            match self.decode(&text, group, &form.key, form.relabeling.as_deref()) {
                Ok(Some(table)) => return Ok((insert_cached(group, table)?, Lookup::Hit)),
                Ok(None) => Lookup::Miss,
                Err(reason) => Lookup::Repaired(reason),
            }
        };
        let table = compute_character_table(group, usize::MAX)?;
        let entry = self.encode(group, &form.key, form.relabeling.as_deref(), &table)?;
        write_locked(&mut file, &entry).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Ok((insert_cached(group, table)?, lookup))
    }

    /// Stores an externally supplied table after checking it exactly.
    pub fn import(&self, group: &FiniteGroup, table: CharacterTable) -> Result<String, CliError> {
        table.verify(group)?;
        let form = group.canonical_form();
        let path = self.path(&form.key);
        let mut file = OpenOptions::new()
            .write(true)
            .create(true)
            .truncate(false)
            .open(&path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        file.lock().map_err(|e| CliError::input(format!("locking {}: {e}", path.display())))?;
        let entry = self.encode(group, &form.key, form.relabeling.as_deref(), &table)?;
        write_locked(&mut file, &entry).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        insert_cached(group, table)?;
        Ok(form.key)
    }

    fn encode(&self, group: &FiniteGroup, key: &str, relabeling: Option<&[usize]>, table: &CharacterTable) -> Result<String, CliError> {
        let (stored_group, stored_table) = match relabeling {
            Some(perm) => {
                let canonical = group.relabel(perm)?;
                let moved = table.relabeled(perm, &canonical)?;
                (canonical.table_rows(), moved)
            }
            None => (group.table_rows(), table.clone()),
        };
        let entry = Entry { key: key.to_string(), group: stored_group, table: stored_table };
        Ok(serde_json::to_string(&entry).expect("serializable") + "\n")
    }

    /// `Ok(None)` is a clean miss (a different group under an invariant
    /// hash); `Err` is a damaged entry.
    fn decode(&self, text: &str, group: &FiniteGroup, key: &str, relabeling: Option<&[usize]>) -> Result<Option<CharacterTable>, String> {
        let entry: Entry = serde_json::from_str(text).map_err(|e| format!("unreadable entry: {e}"))?;
        if entry.key != key {
            return Err("entry key does not match its file name".into());
        }
        let stored = FiniteGroup::from_table(entry.group).map_err(|e| e.to_string())?;
        match relabeling {
            Some(perm) => {
                let canonical = group.relabel(perm).map_err(|e| e.to_string())?;
                if canonical.table_rows() != stored.table_rows() {
                    return Err("stored group is not the canonical form".into());
                }
                entry.table.verify(&stored).map_err(|e| e.to_string())?;
                let back = entry.table.relabeled(&inverse(perm), group).map_err(|e| e.to_string())?;
                Ok(Some(back))
            }
            None => {
                if stored.table_rows() != group.table_rows() {
                    return Ok(None);
                }
                entry.table.verify(group).map_err(|e| e.to_string())?;
                Ok(Some(entry.table))
            }
        }
    }
}

fn write_locked(file: &mut File, contents: &str) -> std::io::Result<()> {
    file.set_len(0)?;
    file.seek(SeekFrom::Start(0))?;
    file.write_all(contents.as_bytes())?;
    file.sync_all()
}
