//! The corpus manifest (`corpus.toml`): shipped derivations, their
//! expected reports, and single-edit mutations with the error kind each
//! must produce.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "entry")]
    pub entries: Vec<CorpusEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub name: String,
    pub signature: Option<String>,
    pub theory: String,
    pub proof: String,
    /// `ACCEPT` or `REJECT`.
    pub verdict: String,
    /// Expected undischarged assumptions, in canonical print form.
    #[serde(default)]
    pub gamma: Vec<String>,
    pub end: String,
    /// Symbol-table documents giving readings of the proof.
    #[serde(default)]
    pub readings: Vec<String>,
    #[serde(default, rename = "mutation")]
    pub mutations: Vec<Mutation>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mutation {
    pub name: String,
    pub proof: String,
    /// Overrides the entry's theory.
    pub theory: Option<String>,
    /// Kind of the first diagnostic.
    pub kind: String,
    /// What was changed.
    pub edit: String,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

impl Mutation {
    pub fn theory_path<'a>(&'a self, entry: &'a CorpusEntry) -> &'a str {
        self.theory.as_deref().unwrap_or(&entry.theory)
    }
}

/// The `corpus/` directory at the workspace root.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}
