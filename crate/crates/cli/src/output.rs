use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

/// Writes `dir/name` through a temporary file in `dir`, renamed into place
/// once `fill` succeeds. Readers never observe a partial file.
pub fn write_atomic<F>(dir: &Path, name: &str, fill: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<&mut NamedTempFile>) -> dccm::Result<()>,
{
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(&mut tmp);
        fill(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush().with_context(|| format!("writing {}", path.display()))?;
    }
    tmp.persist(&path).with_context(|| format!("renaming into {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}
