//! CSV emission. Every file starts with a comment line carrying the config
//! hash and seed, then a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub fn write_csv(
    path: &Path,
    comment: &str,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {comment}")?;
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()
}
