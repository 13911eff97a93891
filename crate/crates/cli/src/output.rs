//! Output plumbing: config hashes, CSV with a provenance comment, JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Opens `path`, or stdout when no path is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// CSV writer that starts with `# config_hash=<hash> seed=<seed>` and a header row.
pub struct CsvOut {
    inner: csv::Writer<Box<dyn Write>>,
}

impl CsvOut {
    pub fn create(path: Option<&Path>, config_hash: &str, seed: Option<u64>, header: &[&str]) -> Result<Self> {
        let mut out = sink(path)?;
        let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(out, "# config_hash={config_hash} seed={seed}")?;
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(header)?;
        Ok(CsvOut { inner })
    }

    pub fn row(&mut self, record: impl Serialize) -> Result<()> {
        self.inner.serialize(record)?;
        Ok(())
    }

    /// Appends trailing comment lines and flushes.
    pub fn finish(self, comments: &[String]) -> Result<()> {
        let mut out = self.inner.into_inner().map_err(|e| anyhow::anyhow!("flushing CSV: {}", e.error()))?;
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
