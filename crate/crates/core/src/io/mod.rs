//! Dataset loading, synthetic cubes, and run artifacts.

pub mod envi;
pub mod labels;
pub mod report;
pub mod synth;

pub use envi::{load_envi, read_envi, save_envi, write_envi, EnviHeader, Interleave};
pub use labels::{load_labels, read_labels_csv};
pub use report::{Fixed6, Report};
pub use synth::{synth_cube, BandPlan, SynthSpec};

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(|e| Error::io(path, e))
}
