//! Dataset ingestion: line-delimited JSON records, precomputed retrieval
//! files, and candidate-step files, plus the synthetic corpus generator.

pub mod synth;

use crate::fact::{Fact, FactId};
use crate::linear::parse_linearized_proof;
use crate::tree::EntailmentTree;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use thiserror::Error;

/// Which task variant a problem belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    One,
    Two,
    Three,
}

impl Task {
    pub fn number(&self) -> u8 {
        match self {
            Task::One => 1,
            Task::Two => 2,
            Task::Three => 3,
        }
    }
}

/// One problem: hypothesis, provided facts, and the gold tree when known.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub id: String,
    pub hypothesis: Fact,
    pub facts: Vec<Fact>,
    pub gold: Option<EntailmentTree>,
    pub task: Task,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Invariant { line: usize, msg: String },
}

fn parse_err(line: usize, msg: impl Into<String>) -> LoadError {
    LoadError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Split a packed context string `"sent1: alpha sent2: beta"` into a map.
fn split_context(context: &str) -> BTreeMap<FactId, String> {
    let bytes = context.as_bytes();
    let mut markers: Vec<(usize, usize, FactId)> = Vec::new(); // (start, text_start, id)
    let mut i = 0;
    while i < bytes.len() {
        if context[i..].starts_with("sent")
            && (i == 0 || bytes[i - 1].is_ascii_whitespace())
        {
            let digits_start = i + 4;
            let mut j = digits_start;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > digits_start && j < bytes.len() && bytes[j] == b':' {
                markers.push((i, j + 1, FactId::new(&context[i..j])));
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    let mut out = BTreeMap::new();
    for (k, (_, text_start, id)) in markers.iter().enumerate() {
        let end = markers
            .get(k + 1)
            .map(|(s, _, _)| *s)
            .unwrap_or(context.len());
        out.insert(id.clone(), context[*text_start..end].trim().to_string());
    }
    out
}

/// Sentence map from a record, accepting the documented field aliases:
/// a `sentences` object, a packed `context` string, or `meta.triples`.
fn extract_sentences(record: &Value, line: usize) -> Result<BTreeMap<FactId, String>, LoadError> {
    if let Some(map) = record.get("sentences").and_then(Value::as_object) {
        return map
            .iter()
            .map(|(k, v)| {
                let text = v
                    .as_str()
                    .ok_or_else(|| parse_err(line, format!("sentence {k} is not a string")))?;
                Ok((FactId::new(k.as_str()), text.to_string()))
            })
            .collect();
    }
    if let Some(context) = record.get("context").and_then(Value::as_str) {
        let map = split_context(context);
        if map.is_empty() {
            return Err(parse_err(line, "context string contains no sentences"));
        }
        return Ok(map);
    }
    if let Some(map) = record
        .get("meta")
        .and_then(|m| m.get("triples"))
        .and_then(Value::as_object)
    {
        return map
            .iter()
            .map(|(k, v)| {
                let text = v
                    .as_str()
                    .ok_or_else(|| parse_err(line, format!("triple {k} is not a string")))?;
                Ok((FactId::new(k.as_str()), text.to_string()))
            })
            .collect();
    }
    Err(parse_err(
        line,
        "record carries none of: sentences, context, meta.triples",
    ))
}

fn extract_id(record: &Value, line: usize) -> String {
    record
        .get("id")
        .or_else(|| record.get("question_id"))
        .and_then(Value::as_str)
        .map(str::to_string)
        .unwrap_or_else(|| format!("line-{line}"))
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>, LoadError> {
    let file = File::open(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if !line.trim().is_empty() {
            out.push((idx + 1, line));
        }
    }
    Ok(out)
}

/// Load a line-delimited dataset of gold-annotated records.
pub fn load_dataset(path: &Path, task: Task) -> Result<Vec<ProblemInstance>, LoadError> {
    let mut out = Vec::new();
    for (line, raw) in read_lines(path)? {
        let record: Value =
            serde_json::from_str(&raw).map_err(|e| parse_err(line, e.to_string()))?;
        out.push(record_to_instance(&record, line, task)?);
    }
    Ok(out)
}

fn record_to_instance(
    record: &Value,
    line: usize,
    task: Task,
) -> Result<ProblemInstance, LoadError> {
    let id = extract_id(record, line);
    let hypothesis_text = record
        .get("hypothesis")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err(line, "missing hypothesis"))?;
    let sentences = extract_sentences(record, line)?;
    let proof = record
        .get("proof")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err(line, "missing proof"))?;

    let mut gold = parse_linearized_proof(proof, &sentences, hypothesis_text)
        .map_err(|e| LoadError::Invariant {
            line,
            msg: e.to_string(),
        })?;

    // Optional structured forms (emitted by the synthetic generator) keyed
    // by fact id in canonical notation.
    let mut syms: BTreeMap<FactId, crate::symbolic::SymbolicFact> = BTreeMap::new();
    if let Some(map) = record.get("syms").and_then(Value::as_object) {
        for (k, v) in map {
            let text = v
                .as_str()
                .ok_or_else(|| parse_err(line, format!("sym for {k} is not a string")))?;
            let sym = crate::symbolic::parse_canonical(text)
                .ok_or_else(|| parse_err(line, format!("unparseable sym for {k}")))?;
            syms.insert(FactId::new(k.as_str()), sym);
        }
    }

    let facts: Vec<Fact> = sentences
        .iter()
        .map(|(fid, text)| Fact::new(fid.clone(), text.clone(), syms.get(fid).cloned()))
        .collect();
    if !syms.is_empty() {
        gold = attach_syms(&gold, &syms);
    }

    let available: std::collections::BTreeSet<FactId> =
        facts.iter().map(|f| f.id().clone()).collect();
    let violations = gold.validate(&available);
    if !violations.is_empty() {
        return Err(LoadError::Invariant {
            line,
            msg: format!("gold tree invalid: {}", violations[0]),
        });
    }
    if task == Task::One && gold.leaf_ids() != available {
        return Err(LoadError::Invariant {
            line,
            msg: "task 1 record provides facts outside the gold leaves".to_string(),
        });
    }

    Ok(ProblemInstance {
        id,
        hypothesis: Fact::new(
            FactId::hypothesis(),
            hypothesis_text,
            syms.get(&FactId::hypothesis()).cloned(),
        ),
        facts,
        gold: Some(gold),
        task,
    })
}

/// Rebuild a tree with structured forms attached to its nodes.
fn attach_syms(
    tree: &EntailmentTree,
    syms: &BTreeMap<FactId, crate::symbolic::SymbolicFact>,
) -> EntailmentTree {
    let upgrade = |f: &Fact| match syms.get(f.id()) {
        Some(sym) => Fact::new(f.id().clone(), f.text(), Some(sym.clone())),
        None => f.clone(),
    };
    EntailmentTree::new(
        upgrade(tree.hypothesis()),
        tree.leaves().iter().map(&upgrade).collect(),
        tree.intermediates().iter().map(&upgrade).collect(),
        tree.steps().to_vec(),
    )
}

/// Load a precomputed retrieval file: one `{id, sentences: [...]}` record per
/// line, mapping a question id to its retrieved sentence texts.
pub fn load_retrieval(path: &Path) -> Result<BTreeMap<String, Vec<String>>, LoadError> {
    let mut out = BTreeMap::new();
    for (line, raw) in read_lines(path)? {
        let record: Value =
            serde_json::from_str(&raw).map_err(|e| parse_err(line, e.to_string()))?;
        let id = extract_id(&record, line);
        let sentences = record
            .get("sentences")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err(line, "missing sentences array"))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| parse_err(line, "sentence is not a string"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(id, sentences);
    }
    Ok(out)
}

/// Replace each instance's facts with its retrieved sentences, numbered
/// `sent1..sentN` in retrieval order. Retrieved sentences that exactly match
/// an existing fact keep its structured form, and gold-tree leaf references
/// are remapped onto the new ids by sentence text; gold leaves that were not
/// retrieved keep their old ids (and stay unavailable, as in real retrieval
/// misses).
pub fn apply_retrieval(
    instances: &mut [ProblemInstance],
    retrieval: &BTreeMap<String, Vec<String>>,
) {
    for inst in instances.iter_mut() {
        let Some(sentences) = retrieval.get(&inst.id) else {
            continue;
        };
        inst.task = Task::Three;
        let by_text: BTreeMap<&str, &Fact> =
            inst.facts.iter().map(|f| (f.text(), f)).collect();
        let mut id_map: BTreeMap<FactId, FactId> = BTreeMap::new();
        let facts: Vec<Fact> = sentences
            .iter()
            .enumerate()
            .map(|(k, text)| {
                let id = FactId::leaf(k + 1);
                match by_text.get(text.as_str()) {
                    Some(orig) => {
                        id_map.insert(orig.id().clone(), id.clone());
                        Fact::new(id, text.clone(), orig.sym().cloned())
                    }
                    None => Fact::new(id, text.clone(), None),
                }
            })
            .collect();
        if let Some(gold) = &inst.gold {
            inst.gold = Some(remap_leaves(gold, &id_map));
        }
        inst.facts = facts;
    }
}

fn remap_leaves(tree: &EntailmentTree, id_map: &BTreeMap<FactId, FactId>) -> EntailmentTree {
    let map_id = |id: &FactId| id_map.get(id).cloned().unwrap_or_else(|| id.clone());
    let leaves = tree
        .leaves()
        .iter()
        .map(|f| f.with_id(map_id(f.id())))
        .collect();
    let steps = tree
        .steps()
        .iter()
        .map(|s| crate::tree::Step {
            direction: s.direction,
            rtype: s.rtype,
            inputs: s.inputs.iter().map(&map_id).collect(),
            output: s.output.clone(),
        })
        .collect();
    EntailmentTree::new(
        tree.hypothesis().clone(),
        leaves,
        tree.intermediates().to_vec(),
        steps,
    )
}

/// One candidate one-step tree with its gold validity label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCandidate {
    pub premises: (FactId, FactId),
    pub label: bool,
}

/// A question with its candidate pool.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub id: String,
    pub hypothesis: Fact,
    pub facts: Vec<Fact>,
    pub candidates: Vec<LabeledCandidate>,
}

/// Result of loading a candidate file: usable pools plus the ids of
/// questions dropped because no candidate was valid.
#[derive(Debug)]
pub struct CandidateFile {
    pub sets: Vec<CandidateSet>,
    pub filtered_out: Vec<String>,
}

/// Load an eQASC-shaped candidate file: per line `{question_id, hypothesis,
/// facts: [text...], candidates: [{premises: [id, id], label: 0|1}]}`.
/// Facts are numbered `sent1..sentN` in array order. Questions whose
/// candidates are all invalid are filtered out (reported, not errors).
pub fn load_candidates(path: &Path) -> Result<CandidateFile, LoadError> {
    let mut sets = Vec::new();
    let mut filtered_out = Vec::new();
    for (line, raw) in read_lines(path)? {
        let record: Value =
            serde_json::from_str(&raw).map_err(|e| parse_err(line, e.to_string()))?;
        let id = extract_id(&record, line);
        let hypothesis_text = record
            .get("hypothesis")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err(line, "missing hypothesis"))?;
        let facts: Vec<Fact> = record
            .get("facts")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err(line, "missing facts array"))?
            .iter()
            .enumerate()
            .map(|(k, v)| {
                v.as_str()
                    .map(|text| Fact::new(FactId::leaf(k + 1), text, None))
                    .ok_or_else(|| parse_err(line, "fact is not a string"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let raw_candidates = record
            .get("candidates")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err(line, "missing candidates array"))?;
        if raw_candidates.is_empty() {
            return Err(parse_err(line, "empty candidate list"));
        }
        let mut candidates = Vec::new();
        for c in raw_candidates {
            let premises = c
                .get("premises")
                .and_then(Value::as_array)
                .filter(|p| p.len() == 2)
                .ok_or_else(|| parse_err(line, "candidate premises must be a pair"))?;
            let pick = |i: usize| -> Result<FactId, LoadError> {
                premises[i]
                    .as_str()
                    .map(FactId::new)
                    .ok_or_else(|| parse_err(line, "premise id is not a string"))
            };
            let label = match c.get("label") {
                Some(Value::Number(n)) => n.as_i64() == Some(1),
                Some(Value::Bool(b)) => *b,
                _ => return Err(parse_err(line, "candidate label must be 0 or 1")),
            };
            candidates.push(LabeledCandidate {
                premises: (pick(0)?, pick(1)?),
                label,
            });
        }
        if candidates.iter().all(|c| !c.label) {
            filtered_out.push(id);
            continue;
        }
        sets.push(CandidateSet {
            id,
            hypothesis: Fact::new(FactId::hypothesis(), hypothesis_text, None),
            facts,
            candidates,
        });
    }
    Ok(CandidateFile { sets, filtered_out })
}

/// Serialize an instance to the dataset record format (the generator's
/// output round-trips through [`load_dataset`]).
pub fn instance_record(instance: &ProblemInstance) -> Value {
    let sentences: serde_json::Map<String, Value> = instance
        .facts
        .iter()
        .map(|f| (f.id().to_string(), Value::String(f.text().to_string())))
        .collect();
    let mut record = serde_json::Map::new();
    record.insert("id".to_string(), Value::String(instance.id.clone()));
    record.insert(
        "task".to_string(),
        Value::Number(instance.task.number().into()),
    );
    record.insert(
        "hypothesis".to_string(),
        Value::String(instance.hypothesis.text().to_string()),
    );
    record.insert("sentences".to_string(), Value::Object(sentences));
    if let Some(gold) = &instance.gold {
        record.insert(
            "proof".to_string(),
            Value::String(crate::linear::serialize_tree(gold)),
        );
    }

    // Structured forms, when present, keyed by fact id in canonical notation.
    let mut syms = serde_json::Map::new();
    let mut push_sym = |f: &Fact| {
        if let Some(sym) = f.sym() {
            syms.insert(f.id().to_string(), Value::String(sym.to_string()));
        }
    };
    for f in &instance.facts {
        push_sym(f);
    }
    push_sym(&instance.hypothesis);
    if let Some(gold) = &instance.gold {
        for f in gold.intermediates() {
            push_sym(f);
        }
    }
    if !syms.is_empty() {
        record.insert("syms".to_string(), Value::Object(syms));
    }
    Value::Object(record)
}
