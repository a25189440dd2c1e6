//! Run manifests: inputs, version, thread count, wall time and a SHA-256
//! entry for every artifact written by a command.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_SUFFIX: &str = ".manifest";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub threads: usize,
    pub wall_time: f64,
    pub inputs: Vec<(String, String)>,
    pub artifacts: Vec<ArtifactEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

impl Manifest {
    pub fn new(command: &str, threads: usize) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            threads,
            wall_time: 0.0,
            inputs: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "command = {}", self.command).unwrap();
        writeln!(s, "version = {}", self.version).unwrap();
        writeln!(s, "threads = {}", self.threads).unwrap();
        writeln!(s, "wall_time_s = {:.6}", self.wall_time).unwrap();
        for (k, v) in &self.inputs {
            writeln!(s, "input.{k} = {v}").unwrap();
        }
        for a in &self.artifacts {
            writeln!(s, "artifact = {} sha256={} bytes={}", a.file, a.sha256, a.bytes).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Manifest::new("", 0);
        m.version.clear();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let bad = |msg: String| Error::Parse { line, msg };
            let Some((k, v)) = raw.split_once(" = ") else {
                if raw.trim().is_empty() {
                    continue;
                }
                return Err(bad(format!("expected `key = value`, got `{raw}`")));
            };
            match k {
                "command" => m.command = v.into(),
                "version" => m.version = v.into(),
                "threads" => m.threads = v.parse().map_err(|_| bad(format!("bad thread count `{v}`")))?,
                "wall_time_s" => m.wall_time = v.parse().map_err(|_| bad(format!("bad wall time `{v}`")))?,
                "artifact" => {
                    let mut parts = v.split(' ');
                    let file = parts.next().unwrap_or("").to_string();
                    let sha = parts.next().and_then(|p| p.strip_prefix("sha256="));
                    let bytes = parts.next().and_then(|p| p.strip_prefix("bytes=")).and_then(|p| p.parse().ok());
                    match (sha, bytes) {
                        (Some(sha), Some(bytes)) if !file.is_empty() => {
                            m.artifacts.push(ArtifactEntry { file, sha256: sha.into(), bytes })
                        }
                        _ => return Err(bad(format!("malformed artifact entry `{v}`"))),
                    }
                }
                _ => match k.strip_prefix("input.") {
                    Some(key) => m.inputs.push((key.into(), v.into())),
                    None => return Err(bad(format!("unknown manifest key `{k}`"))),
                },
            }
        }
        Ok(m)
    }
}

/// Writes artifacts into one directory and records them for the manifest.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    pub manifest: Manifest,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, manifest: Manifest) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), manifest })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.manifest.artifacts.retain(|a| a.file != name);
        self.manifest.artifacts.push(ArtifactEntry { file: name.into(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(path)
    }

    /// Writes `<command>.manifest` and returns its path.
    pub fn finish(self) -> Result<PathBuf> {
        let path = self.dir.join(format!("{}{MANIFEST_SUFFIX}", self.manifest.command));
        fs::write(&path, self.manifest.to_text())?;
        Ok(path)
    }
}

/// Re-hashes every artifact listed in `manifest_path`; returns one message per mismatch.
pub fn check_manifest(manifest_path: &Path) -> Result<Vec<String>> {
    let m = Manifest::parse(&fs::read_to_string(manifest_path)?)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut problems = Vec::new();
    for a in &m.artifacts {
        match fs::read(dir.join(&a.file)) {
            Ok(bytes) if bytes.len() as u64 == a.bytes && sha256_hex(&bytes) == a.sha256 => {}
            Ok(_) => problems.push(format!("{}: content differs from manifest", a.file)),
            Err(e) => problems.push(format!("{}: {e}", a.file)),
        }
    }
    Ok(problems)
}

/// All manifests inside `dir` and its subdirectories, sorted by path.
pub fn manifests_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            out.extend(manifests_in(&path)?);
        } else if path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(MANIFEST_SUFFIX)) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_known_input() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn manifest_round_trips_and_detects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = Manifest::new("constants", 3);
        m.inputs.push(("q_list".into(), "2.2,2.1".into()));
        let mut w = ArtifactWriter::new(dir.path(), m).unwrap();
        w.write("a.csv", b"x,y\n1,2\n").unwrap();
        let path = w.finish().unwrap();
        let parsed = Manifest::parse(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(parsed.command, "constants");
        assert_eq!(parsed.threads, 3);
        assert_eq!(parsed.inputs, vec![("q_list".to_string(), "2.2,2.1".to_string())]);
        assert!(check_manifest(&path).unwrap().is_empty());
        fs::write(dir.path().join("a.csv"), b"x,y\n1,3\n").unwrap();
        assert_eq!(check_manifest(&path).unwrap().len(), 1);
        assert_eq!(manifests_in(dir.path()).unwrap(), vec![path.clone()]);
        let nested = ArtifactWriter::new(&dir.path().join("sub"), Manifest::new("sweep", 1)).unwrap().finish().unwrap();
        assert_eq!(manifests_in(dir.path()).unwrap(), vec![path, nested]);
    }
}
