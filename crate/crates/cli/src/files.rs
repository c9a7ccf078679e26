use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hypenet::corpus::{parse_conllu, Sentence};
use hypenet::embeddings::Embeddings;
use hypenet::FORMAT_VERSION;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Write through a temporary file in the target directory, then rename it
/// into place so readers never see a partial file.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
}

/// JSON file with a top-level `format_version`; other versions are refused.
pub fn read_versioned_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let value: serde_json::Value =
        serde_json::from_reader(open(path)?).with_context(|| format!("{} is not valid JSON", path.display()))?;
    let found = value.get("format_version").and_then(|v| v.as_u64());
    if found != Some(FORMAT_VERSION as u64) {
        bail!(
            "{}: unsupported format version {} (expected {FORMAT_VERSION})",
            path.display(),
            found.map_or("missing".to_string(), |v| v.to_string())
        );
    }
    serde_json::from_value(value).with_context(|| format!("{} has an unexpected layout", path.display()))
}

/// `dir/stem.suffix` next to `path`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn read_sentences(files: &[PathBuf]) -> Result<(Vec<Sentence>, usize)> {
    let mut sentences = Vec::new();
    let mut rejected = 0;
    for f in files {
        let c = parse_conllu(open(f)?).with_context(|| format!("parsing {}", f.display()))?;
        sentences.extend(c.sentences);
        rejected += c.rejected;
    }
    Ok((sentences, rejected))
}

/// One term per line; blank lines and `#` comments are skipped.
pub fn read_vocab(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_lowercase).collect())
}

pub fn read_embeddings(path: &Path) -> Result<Embeddings> {
    Embeddings::read(open(path)?).with_context(|| format!("reading embeddings {}", path.display()))
}
