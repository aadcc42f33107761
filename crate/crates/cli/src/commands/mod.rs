pub mod experiment;
pub mod quantile;
pub mod stability;
pub mod stream;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::prepare_out_dir;
use crate::error::{output_error, CliResult};

pub(crate) fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub(crate) fn out_dir(
    flag: Option<PathBuf>,
    file: Option<PathBuf>,
    command: &str,
) -> CliResult<PathBuf> {
    let dir = flag
        .or(file)
        .unwrap_or_else(|| PathBuf::from("wrv-out").join(command));
    prepare_out_dir(&dir)?;
    Ok(dir)
}

/// Writes a file through `body`, mapping I/O failures to configuration errors.
pub(crate) fn write_file<F>(path: &Path, body: F) -> CliResult<()>
where
    F: FnOnce(&mut BufWriter<File>) -> CliResult<()>,
{
    let file = File::create(path).map_err(|e| output_error(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush().map_err(|e| output_error(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| output_error(path, e))
}
