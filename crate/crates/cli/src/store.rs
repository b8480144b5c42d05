//! Flat-file persistence: append-only JSON-lines logs, `GRLN1` learning
//! files replaced atomically, and cached `GRST1` strategy tables.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use ramsey_core::game::GameSpec;
use ramsey_core::player::{read_learning, write_learning, LearningTable};
use ramsey_core::solver::{read_table, solve, write_table, StrategyTable};
use ramsey_core::{Error, Result};

pub const DATA_DIR_ENV: &str = "RAMSEY_DATA_DIR";
pub const SESSIONS_LOG: &str = "sessions.jsonl";
pub const HALL_OF_FAME_LOG: &str = "halloffame.jsonl";

#[derive(Debug, Clone)]
pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("learning"))?;
        fs::create_dir_all(root.join("tables"))?;
        Ok(DataDir { root })
    }

    /// `$RAMSEY_DATA_DIR`, or `ramsey-data` in the working directory.
    pub fn from_env() -> Result<Self> {
        DataDir::open(std::env::var_os(DATA_DIR_ENV).map_or_else(|| PathBuf::from("ramsey-data"), PathBuf::from))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn append<T: Serialize>(&self, log: &str, record: &T) -> Result<()> {
        let mut line = serde_json::to_vec(record).map_err(|e| Error::Format(e.to_string()))?;
        line.push(b'\n');
        let mut f = OpenOptions::new().create(true).append(true).open(self.root.join(log))?;
        f.write_all(&line)?;
        f.flush()?;
        Ok(())
    }

    /// Every record of a log; a missing log is empty.
    pub fn read_log<T: DeserializeOwned>(&self, log: &str) -> Result<Vec<T>> {
        let f = match File::open(self.root.join(log)) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line).map_err(|e| Error::Format(format!("{log} line {}: {e}", i + 1)))?);
        }
        Ok(out)
    }

    fn learning_path(&self, fingerprint: &str) -> PathBuf {
        self.root.join("learning").join(format!("{fingerprint}.grln"))
    }

    fn table_path(&self, fingerprint: &str) -> PathBuf {
        self.root.join("tables").join(format!("{fingerprint}.grst"))
    }

    /// The stored learning table of a spec, or a fresh one.
    pub fn load_learning(&self, spec: &GameSpec) -> Result<LearningTable> {
        match File::open(self.learning_path(&spec.fingerprint())) {
            Ok(f) => {
                let t = read_learning(BufReader::new(f))?;
                if t.fingerprint() != spec.fingerprint() {
                    return Err(Error::FingerprintMismatch);
                }
                Ok(t)
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => LearningTable::new(spec),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save_learning(&self, table: &LearningTable) -> Result<()> {
        let mut bytes = Vec::new();
        write_learning(table, &mut bytes)?;
        write_atomic(&self.learning_path(table.fingerprint()), &bytes)
    }

    /// The cached strategy table of a spec, solving and caching it first if
    /// needed.
    pub fn load_or_solve(&self, spec: &GameSpec) -> Result<StrategyTable> {
        let path = self.table_path(&spec.fingerprint());
        if let Ok(f) = File::open(&path) {
            return read_table(spec, BufReader::new(f));
        }
        let table = solve(spec)?;
        let mut bytes = Vec::new();
        write_table(&table, &mut bytes)?;
        write_atomic(&path, &bytes)?;
        Ok(table)
    }
}

/// Writes to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        w.write_all(bytes)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
