//! Reading datasets and writing results.
//!
//! Tabular files hold one object per row; internally objects are columns.
//! Frame directories hold one grayscale PGM per object.

mod frames;
mod scores;
mod table;

use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub use frames::{load_frames, read_pgm, write_frames, write_pgm, FrameDataset};
pub use scores::{read_labels, read_scores, write_labels, write_scores, SCORES_HEADER};
pub use table::{load_csv, write_csv, CsvSchema, LabelColumn};

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed write leaves nothing at `path`.
pub fn write_atomically(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    {
        let mut out = BufWriter::new(tmp.as_file());
        body(&mut out).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
