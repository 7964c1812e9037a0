use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Content-addressed store of embedding vectors.
///
/// Each entry is a file named by the hex SHA-256 of `model ‖ 0x00 ‖ text`,
/// holding the vector as little-endian `f32`s. Writes go to a temporary file
/// in the same directory which is then renamed into place.
#[derive(Debug, Clone)]
pub struct EmbeddingCache {
    dir: PathBuf,
}

impl EmbeddingCache {
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(model: &str, text: &str) -> String {
        let mut hasher = Sha256::new();
        hasher.update(model.as_bytes());
        hasher.update([0u8]);
        hasher.update(text.as_bytes());
        hex::encode(hasher.finalize())
    }

    pub fn path_for(&self, model: &str, text: &str) -> PathBuf {
        self.dir.join(Self::key(model, text))
    }

    pub fn get(&self, model: &str, text: &str) -> std::io::Result<Option<Vec<f32>>> {
        let bytes = match fs::read(self.path_for(model, text)) {
            Ok(b) => b,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        if bytes.len() % 4 != 0 {
            return Err(std::io::Error::new(
                ErrorKind::InvalidData,
                format!("cache entry of {} bytes is not a whole number of f32s", bytes.len()),
            ));
        }
        Ok(Some(
            bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        ))
    }

    pub fn put(&self, model: &str, text: &str, values: &[f32]) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        let mut bytes = Vec::with_capacity(values.len() * 4);
        for v in values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        tmp.write_all(&bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_for(model, text)).map_err(|e| e.error)?;
        Ok(())
    }
}
