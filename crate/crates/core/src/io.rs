//! Triples files, checkpoints and atomic output writes.

use std::io::Write;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::{AnsatzSpec, ParamVector};
use crate::error::{Error, Result};
use crate::scoring::ScoreScheme;
use crate::training::{KnowledgeGraph, ParameterStore, TrainConfig};

pub const CHECKPOINT_VERSION: u32 = 1;

/// One `head<TAB>relation<TAB>tail` row with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedTriple {
    pub line: usize,
    pub head: String,
    pub relation: String,
    pub tail: String,
}

/// Parses tab-separated triples, skipping blank lines.
pub fn parse_named_triples(text: &str) -> Result<Vec<NamedTriple>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [head, relation, tail] = fields[..] else {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        };
        if [head, relation, tail].iter().any(|f| f.is_empty()) {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty field".into(),
            });
        }
        out.push(NamedTriple {
            line: i + 1,
            head: head.to_string(),
            relation: relation.to_string(),
            tail: tail.to_string(),
        });
    }
    Ok(out)
}

pub fn read_named_triples(path: &Path) -> Result<Vec<NamedTriple>> {
    parse_named_triples(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub kg: KnowledgeGraph,
    /// Repeated triples that were dropped.
    pub duplicates: usize,
}

/// Builds a graph with entity and relation dictionaries in first-appearance
/// order.
pub fn triples_to_graph(rows: &[NamedTriple]) -> Result<Ingested> {
    let mut kg = KnowledgeGraph::new();
    let mut duplicates = 0;
    for row in rows {
        if !kg.add_named(&row.head, &row.relation, &row.tail) {
            duplicates += 1;
        }
    }
    if kg.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(Ingested { kg, duplicates })
}

pub fn ingest_triples(path: &Path) -> Result<Ingested> {
    triples_to_graph(&read_named_triples(path)?)
}

/// Writes `bytes` to a temporary file beside `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Hash of the canonical JSON encoding of a training configuration.
pub fn config_hash(config: &TrainConfig) -> String {
    sha256_hex(
        serde_json::to_string(config)
            .expect("config serializes")
            .as_bytes(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub scheme: ScoreScheme,
    pub epochs: usize,
    pub final_loss: f64,
}

/// Trained parameters keyed by name. Floats use shortest round-trip decimal
/// notation, so `load(save(x)) == x` bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub ansatz: AnsatzSpec,
    pub entities: IndexMap<String, Vec<f64>>,
    pub relations: IndexMap<String, Vec<f64>>,
    pub provenance: Provenance,
}

impl Checkpoint {
    pub fn new(
        kg: &KnowledgeGraph,
        params: &ParameterStore,
        provenance: Provenance,
    ) -> Result<Self> {
        if kg.n_entities() != params.entities.len() || kg.n_relations() != params.relations.len() {
            return Err(Error::DimensionMismatch {
                expected: kg.n_entities() + kg.n_relations(),
                actual: params.entities.len() + params.relations.len(),
            });
        }
        let zip = |names: &indexmap::IndexSet<String>, vs: &[ParamVector]| {
            names
                .iter()
                .cloned()
                .zip(vs.iter().map(|v| v.0.clone()))
                .collect()
        };
        Ok(Checkpoint {
            format_version: CHECKPOINT_VERSION,
            ansatz: params.spec,
            entities: zip(kg.entities(), &params.entities),
            relations: zip(kg.relations(), &params.relations),
            provenance,
        })
    }

    pub fn params(&self) -> Result<ParameterStore> {
        let vecs =
            |m: &IndexMap<String, Vec<f64>>| m.values().map(|v| ParamVector(v.clone())).collect();
        ParameterStore::new(self.ansatz, vecs(&self.entities), vecs(&self.relations))
    }

    /// Name dictionaries, without triples.
    pub fn dictionary(&self) -> KnowledgeGraph {
        KnowledgeGraph::with_names(
            self.entities.keys().cloned(),
            self.relations.keys().cloned(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::InvalidConfig("checkpoint has no format_version".into()))?;
        if version != CHECKPOINT_VERSION as u64 {
            return Err(Error::UnsupportedVersion(version as u32));
        }
        let ckpt: Checkpoint = serde_json::from_value(value)?;
        ckpt.params()?;
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
