//! On-disk store: `index.json`, `records/<key>.json`, `images/<key>-*.ppm`.
//!
//! Every file is written to a temporary sibling and renamed into place, so concurrent
//! workers never expose partial files and a rerun that skips existing keys leaves the
//! store byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use super::{Analysis, CatalogError, CatalogRecord};

/// First 16 hex digits of the SHA-256 of the canonical code.
pub fn record_key(code: &str) -> String {
    let digest = Sha256::digest(code.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Store {
    root: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CatalogError + '_ {
    move |source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    }
}

impl Store {
    pub fn open(root: &Path) -> Result<Self, CatalogError> {
        for sub in ["records", "images"] {
            let dir = root.join(sub);
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        }
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn record_path(&self, code: &str) -> PathBuf {
        self.root.join("records").join(format!("{}.json", record_key(code)))
    }

    pub fn contains(&self, code: &str) -> bool {
        self.record_path(code).is_file()
    }

    fn write_atomic(&self, path: &Path, write: impl FnOnce(&mut NamedTempFile) -> std::io::Result<()>) -> Result<(), CatalogError> {
        let dir = path.parent().expect("store paths have a parent");
        let mut tmp = NamedTempFile::new_in(dir).map_err(io_err(dir))?;
        write(&mut tmp).map_err(io_err(path))?;
        tmp.persist(path).map_err(|e| CatalogError::Io {
            path: path.display().to_string(),
            source: e.error,
        })?;
        Ok(())
    }

    fn write_json<S: serde::Serialize>(&self, path: &Path, value: &S) -> Result<(), CatalogError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| CatalogError::Json {
            path: path.display().to_string(),
            source,
        })?;
        bytes.push(b'\n');
        self.write_atomic(path, |f| f.write_all(&bytes))
    }

    /// Writes the images first, then the record, so a present record implies its images.
    pub fn write_analysis(&self, analysis: &Analysis) -> Result<(), CatalogError> {
        for (rel, raster) in &analysis.images {
            let path = self.root.join(rel);
            self.write_atomic(&path, |f| raster.write_ppm(std::io::BufWriter::new(f)))?;
        }
        self.write_record(&analysis.record)
    }

    pub fn write_record(&self, record: &CatalogRecord) -> Result<(), CatalogError> {
        self.write_json(&self.record_path(&record.tree_code), record)
    }

    fn read_record(&self, path: &Path) -> Result<CatalogRecord, CatalogError> {
        let bytes = fs::read(path).map_err(io_err(path))?;
        let record: CatalogRecord = serde_json::from_slice(&bytes).map_err(|source| CatalogError::Json {
            path: path.display().to_string(),
            source,
        })?;
        record.validate()?;
        Ok(record)
    }

    /// Loads and re-validates the record for `code`.
    pub fn load(&self, code: &str) -> Result<CatalogRecord, CatalogError> {
        self.read_record(&self.record_path(code))
    }

    /// Every record in the store, sorted by tree code.
    pub fn load_all(&self) -> Result<Vec<CatalogRecord>, CatalogError> {
        let dir = self.root.join("records");
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(io_err(&dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut records = paths
            .iter()
            .map(|p| self.read_record(p))
            .collect::<Result<Vec<_>, _>>()?;
        records.sort_by(|a, b| a.tree_code.cmp(&b.tree_code));
        Ok(records)
    }

    /// Rewrites `index.json` (code to key) from the records on disk.
    pub fn refresh_index(&self) -> Result<BTreeMap<String, String>, CatalogError> {
        let index: BTreeMap<String, String> = self
            .load_all()?
            .into_iter()
            .map(|r| {
                let key = record_key(&r.tree_code);
                (r.tree_code, key)
            })
            .collect();
        self.write_json(&self.root.join("index.json"), &index)?;
        Ok(index)
    }
}
