//! Run manifests: the reproducibility record written after all data files.
//!
//! A manifest holds the code version, the seed-derivation rule, the verbatim
//! config text, wall-clock time and a sha256 digest per output file. A run
//! that died early leaves no manifest, so downstream tools can treat its
//! partial CSVs as garbage. `replay` re-runs the embedded config and compares
//! digests.

use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const MANIFEST_NAME: &str = "manifest.txt";

#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub seed_rule: String,
    pub master_seed: u64,
    pub workers: usize,
    pub wallclock_s: f64,
    pub unresolvable_rows: u64,
    pub config_text: String,
    /// (file name, sha256 hex) in write order.
    pub files: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        let _ = write!(s, "{b:02x}");
    }
    s
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("qasim-manifest 1\n");
        let _ = writeln!(out, "version = {}", self.version);
        let _ = writeln!(out, "seed_rule = {}", self.seed_rule);
        let _ = writeln!(out, "master_seed = {}", self.master_seed);
        let _ = writeln!(out, "workers = {}", self.workers);
        let _ = writeln!(out, "wallclock_s = {:.3}", self.wallclock_s);
        let _ = writeln!(out, "unresolvable_rows = {}", self.unresolvable_rows);
        out.push_str("begin-config\n");
        out.push_str(&self.config_text);
        if !self.config_text.ends_with('\n') {
            out.push('\n');
        }
        out.push_str("end-config\n");
        for (name, digest) in &self.files {
            let _ = writeln!(out, "file = {name} sha256 {digest}");
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_NAME);
        std::fs::write(&path, self.render())?;
        Ok(path)
    }

    pub fn parse(text: &str) -> Result<RunManifest> {
        let mut lines = text.lines().enumerate();
        let err = |ln: usize, msg: &str| Error::Parse { line: ln + 1, msg: msg.to_string() };
        match lines.next() {
            Some((_, "qasim-manifest 1")) => {}
            Some((ln, _)) => return Err(err(ln, "expected `qasim-manifest 1`")),
            None => return Err(err(0, "empty manifest")),
        }
        let mut m = RunManifest {
            version: String::new(),
            seed_rule: String::new(),
            master_seed: 0,
            workers: 0,
            wallclock_s: 0.0,
            unresolvable_rows: 0,
            config_text: String::new(),
            files: Vec::new(),
        };
        let mut in_config = false;
        for (ln, line) in lines {
            if in_config {
                if line == "end-config" {
                    in_config = false;
                } else {
                    m.config_text.push_str(line);
                    m.config_text.push('\n');
                }
                continue;
            }
            if line == "begin-config" {
                in_config = true;
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(ln, "expected key = value"));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "version" => m.version = value.into(),
                "seed_rule" => m.seed_rule = value.into(),
                "master_seed" => {
                    m.master_seed = value.parse().map_err(|_| err(ln, "bad master_seed"))?
                }
                "workers" => m.workers = value.parse().map_err(|_| err(ln, "bad workers"))?,
                "wallclock_s" => {
                    m.wallclock_s = value.parse().map_err(|_| err(ln, "bad wallclock"))?
                }
                "unresolvable_rows" => {
                    m.unresolvable_rows = value.parse().map_err(|_| err(ln, "bad count"))?
                }
                "file" => {
                    let toks: Vec<&str> = value.split_whitespace().collect();
                    match toks.as_slice() {
                        [name, "sha256", digest] => {
                            m.files.push((name.to_string(), digest.to_string()))
                        }
                        _ => return Err(err(ln, "bad file record")),
                    }
                }
                _ => return Err(err(ln, "unknown manifest key")),
            }
        }
        if in_config {
            return Err(err(text.lines().count(), "unterminated config block"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_roundtrip() {
        let m = RunManifest {
            version: "0.1.0".into(),
            seed_rule: crate::rng::SEED_RULE.into(),
            master_seed: 42,
            workers: 8,
            wallclock_s: 1.25,
            unresolvable_rows: 0,
            config_text: "model = qa_purification\nL = 8\n".into(),
            files: vec![("purification.csv".into(), "ab".repeat(32))],
        };
        let text = m.render();
        let back = RunManifest::parse(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"qasim"),
            "deb2915c4224bada08cf872b017751793dc3091c8c107feea6e2b375a08776e0"
        );
    }
}
