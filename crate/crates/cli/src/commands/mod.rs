pub mod augment;
pub mod bank;
pub mod eval;
pub mod extract;

use std::path::Path;

use pgt_core::Error;

/// Fails with a format-class error naming the first missing input.
pub fn require_paths<'a>(paths: impl IntoIterator<Item = &'a Path>) -> anyhow::Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(Error::Io {
                path: p.to_path_buf(),
                source: std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    "no such file or directory",
                ),
            }
            .into());
        }
    }
    Ok(())
}

/// Run seed mixed with a stream index.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn emit_file(text: &str, path: &Path) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::Io {
            path: parent.to_path_buf(),
            source: e,
        })?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

/// Prints `text` and also writes it to `out` when given.
pub fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    print!("{text}");
    match out {
        Some(path) => emit_file(text, path),
        None => Ok(()),
    }
}
