use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Checks that an output file can be created, before any numeric work.
pub fn check_writable(path: &Path) -> Result<(), String> {
    if path.is_dir() {
        return Err(format!("output path {} is a directory", path.display()));
    }
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(format!("output directory {} does not exist", dir.display()))
        }
        _ => Ok(()),
    }
}

pub fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `<dir>/<stem>.<suffix>` beside the report, or in the working directory
/// with stem `calibration` when the report goes to standard output.
pub fn sibling(output: Option<&Path>, suffix: &str) -> PathBuf {
    let (dir, stem) = match output {
        Some(p) => (
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "calibration".into()),
        ),
        None => (PathBuf::new(), "calibration".into()),
    };
    dir.join(format!("{stem}.{suffix}"))
}
