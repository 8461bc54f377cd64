//! The three inference rules and consistency checking.
//!
//! For every instance `x` with direct type `C`:
//!
//! - type rule: emit `(x, D)` for each `D` in the superclass closure of
//!   `C` that is not already a direct type of `x`;
//! - object rule: for each resource-valued restriction `(p, v)` effective
//!   on any direct or inferred type, emit `(x, p, v)`;
//! - literal rule: the same for literal-valued restrictions.
//!
//! Evaluation is per-instance: inferred property assertions never feed
//! back into the rules in this fragment, so no global fixpoint iteration
//! is needed. Instances are partitioned into fixed-size chunks processed
//! in parallel; chunk outputs are concatenated in partition order, which
//! makes results identical for any worker count. Output is sorted by
//! `(subject id, predicate id, object id)` by construction.

use crate::abox::ABox;
use crate::error::Result;
use crate::rdf::{NtWriter, Triple};
use crate::tbox::{unordered, RestrictionKind, TBoxIndex};
use crate::term::{Term, TermId, TermStore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

/// Instances per parallel work unit. Fixed (not derived from the worker
/// count) so that output order is reproducible across thread counts.
const CHUNK: usize = 4096;

/// Chunks per streaming wave; bounds retained memory in streaming mode.
const WAVE: usize = 64;

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq)]
pub struct MaterializationStats {
    pub n_transitive_types: u64,
    pub n_individual_assertions: u64,
    pub n_literal_assertions: u64,
    /// Wall-clock seconds spent loading the A-box.
    pub t_load_s: f64,
    /// Wall-clock seconds spent building the T-box index and closures.
    pub t_closure_s: f64,
    /// Wall-clock seconds spent applying the rules.
    pub t_materialize_s: f64,
}

/// All assertions the rules produce, duplicate-free and disjoint from the
/// input's direct type pairs.
#[derive(Debug, Default)]
pub struct InferenceResult {
    /// `(instance, class)` pairs, sorted.
    pub inferred_types: Vec<(TermId, TermId)>,
    /// `(instance, property, individual)` triples, sorted.
    pub inferred_object_assertions: Vec<Triple>,
    /// `(instance, property, literal)` triples, sorted.
    pub inferred_data_assertions: Vec<Triple>,
    pub stats: MaterializationStats,
}

/// Exact cardinalities with phase timings carried through.
pub fn count_stats(result: &InferenceResult) -> MaterializationStats {
    MaterializationStats {
        n_transitive_types: result.inferred_types.len() as u64,
        n_individual_assertions: result.inferred_object_assertions.len() as u64,
        n_literal_assertions: result.inferred_data_assertions.len() as u64,
        ..result.stats
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MaterializeOptions {
    /// Subtract assertions already present in the input (requires an
    /// A-box loaded with `track_input_assertions`).
    pub dedup_against_input: bool,
    /// Cooperative cancellation point for [`materialize_streaming`],
    /// checked between waves. The in-memory path runs to completion;
    /// callers enforce deadlines at its phase boundary.
    pub deadline: Option<std::time::Instant>,
}

/// Per-instance rule application. Returns sorted, deduplicated outputs.
fn infer_for_instance(
    x: TermId,
    abox: &ABox,
    index: &TBoxIndex,
    dedup: Option<&HashSet<Triple>>,
) -> (Vec<(TermId, TermId)>, Vec<Triple>, Vec<Triple>) {
    let direct = abox.direct_types(x);
    let named_individual = index.vocab().owl_named_individual;

    let mut inferred: Vec<TermId> = Vec::new();
    for &c in direct {
        inferred.extend_from_slice(index.superclass_closure(c));
    }
    inferred.sort();
    inferred.dedup();
    inferred.retain(|d| direct.binary_search(d).is_err() && *d != named_individual);

    let mut pairs: Vec<(TermId, TermId)> = inferred.iter().map(|&d| (x, d)).collect();
    pairs.sort();

    // effective restrictions over direct and inferred types
    let mut props: Vec<(TermId, TermId, RestrictionKind)> = Vec::new();
    for &c in direct.iter().chain(inferred.iter()) {
        for r in index.direct_restrictions(c) {
            props.push((r.property, r.value, r.kind));
        }
    }
    props.sort_by_key(|&(p, v, _)| (p, v));
    props.dedup_by_key(|&mut (p, v, _)| (p, v));

    let mut objects = Vec::new();
    let mut data = Vec::new();
    for (p, v, kind) in props {
        let triple = Triple::new(x, p, v);
        if let Some(input) = dedup {
            if input.contains(&triple) {
                continue;
            }
        }
        match kind {
            RestrictionKind::Object => objects.push(triple),
            RestrictionKind::Data => data.push(triple),
        }
    }
    (pairs, objects, data)
}

type ChunkOutput = (Vec<(TermId, TermId)>, Vec<Triple>, Vec<Triple>);

fn process_chunk(
    chunk: &[TermId],
    abox: &ABox,
    index: &TBoxIndex,
    dedup: Option<&HashSet<Triple>>,
) -> ChunkOutput {
    let mut pairs = Vec::new();
    let mut objects = Vec::new();
    let mut data = Vec::new();
    for &x in chunk {
        let (p, o, d) = infer_for_instance(x, abox, index, dedup);
        pairs.extend(p);
        objects.extend(o);
        data.extend(d);
    }
    (pairs, objects, data)
}

fn dedup_set<'a>(abox: &'a ABox, options: &MaterializeOptions) -> Option<&'a HashSet<Triple>> {
    if options.dedup_against_input {
        abox.input_assertions()
    } else {
        None
    }
}

/// Applies all three rules and collects the result in memory.
pub fn materialize(abox: &ABox, index: &TBoxIndex, options: &MaterializeOptions) -> InferenceResult {
    let started = Instant::now();
    let dedup = dedup_set(abox, options);
    let outputs: Vec<ChunkOutput> = abox
        .instances()
        .par_chunks(CHUNK)
        .map(|chunk| process_chunk(chunk, abox, index, dedup))
        .collect();

    let mut result = InferenceResult::default();
    for (pairs, objects, data) in outputs {
        result.inferred_types.extend(pairs);
        result.inferred_object_assertions.extend(objects);
        result.inferred_data_assertions.extend(data);
    }
    debug_assert!(result.inferred_types.windows(2).all(|w| w[0] < w[1]));
    result.stats = MaterializationStats {
        n_transitive_types: result.inferred_types.len() as u64,
        n_individual_assertions: result.inferred_object_assertions.len() as u64,
        n_literal_assertions: result.inferred_data_assertions.len() as u64,
        t_materialize_s: started.elapsed().as_secs_f64(),
        ..MaterializationStats::default()
    };
    // count consistency is part of the contract, checked on every run
    assert_eq!(
        result.stats.n_transitive_types as usize,
        result.inferred_types.len()
    );
    result
}

pub const TYPES_FILE: &str = "inferred_types.nt";
pub const RELATIONS_FILE: &str = "inferred_relations.nt";
pub const LITERALS_FILE: &str = "inferred_literals.nt";
pub const STATS_FILE: &str = "stats.json";

/// N-Triples sinks for streaming materialization.
pub struct AssertionSinks<'a> {
    pub types: &'a mut dyn Write,
    pub relations: &'a mut dyn Write,
    pub literals: &'a mut dyn Write,
}

/// Applies the rules and writes assertions as they are produced, keeping
/// only the counts. Output bytes are identical to writing an in-memory
/// [`InferenceResult`]: same order, same blank-node relabeling.
pub fn materialize_streaming(
    abox: &ABox,
    index: &TBoxIndex,
    options: &MaterializeOptions,
    store: &TermStore,
    sinks: AssertionSinks<'_>,
) -> Result<MaterializationStats> {
    let started = Instant::now();
    let dedup = dedup_set(abox, options);
    let rdf_type = index.vocab().rdf_type;

    let mut types_w = NtWriter::new(sinks.types);
    let mut rel_w = NtWriter::new(sinks.relations);
    let mut lit_w = NtWriter::new(sinks.literals);
    let mut stats = MaterializationStats::default();

    let chunks: Vec<&[TermId]> = abox.instances().chunks(CHUNK).collect();
    for wave in chunks.chunks(WAVE) {
        if let Some(deadline) = options.deadline {
            if Instant::now() >= deadline {
                return Err(crate::error::Error::Timeout {
                    phase: "materialize",
                    timeout_s: 0,
                });
            }
        }
        let outputs: Vec<ChunkOutput> = wave
            .par_iter()
            .map(|chunk| process_chunk(chunk, abox, index, dedup))
            .collect();
        for (pairs, objects, data) in outputs {
            for (x, d) in pairs {
                types_w.write_triple(store, &Triple::new(x, rdf_type, d))?;
                stats.n_transitive_types += 1;
            }
            for t in objects {
                rel_w.write_triple(store, &t)?;
                stats.n_individual_assertions += 1;
            }
            for t in data {
                lit_w.write_triple(store, &t)?;
                stats.n_literal_assertions += 1;
            }
        }
    }
    types_w.finish()?;
    rel_w.finish()?;
    lit_w.finish()?;
    stats.t_materialize_s = started.elapsed().as_secs_f64();
    Ok(stats)
}

/// Writes the three per-category N-Triples files plus `stats.json`.
pub fn write_inference_result(
    result: &InferenceResult,
    index: &TBoxIndex,
    store: &TermStore,
    dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let rdf_type = index.vocab().rdf_type;
    let open = |name: &str| -> Result<std::io::BufWriter<std::fs::File>> {
        let path = dir.join(name);
        Ok(std::io::BufWriter::new(
            std::fs::File::create(&path).map_err(|e| crate::error::Error::from_io(&path, e))?,
        ))
    };
    let mut w = NtWriter::new(open(TYPES_FILE)?);
    for &(x, d) in &result.inferred_types {
        w.write_triple(store, &Triple::new(x, rdf_type, d))?;
    }
    w.finish()?;
    let mut w = NtWriter::new(open(RELATIONS_FILE)?);
    for t in &result.inferred_object_assertions {
        w.write_triple(store, t)?;
    }
    w.finish()?;
    let mut w = NtWriter::new(open(LITERALS_FILE)?);
    for t in &result.inferred_data_assertions {
        w.write_triple(store, t)?;
    }
    w.finish()?;
    let stats = serde_json::to_string_pretty(&count_stats(result))?;
    std::fs::write(dir.join(STATS_FILE), stats)?;
    Ok(())
}

impl From<serde_json::Error> for crate::error::Error {
    fn from(e: serde_json::Error) -> Self {
        crate::error::Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}

/// Joint membership in a disjoint pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub instance: TermId,
    pub class_a: TermId,
    pub class_b: TermId,
}

/// One violation per instance whose total type set (direct and inferred)
/// contains both members of a disjoint pair. When several pairs are
/// violated by the same instance, the reported pair is the
/// lexicographically smallest by IRI, for deterministic output.
pub fn check_consistency(
    abox: &ABox,
    result: &InferenceResult,
    disjoint: &HashSet<(TermId, TermId)>,
    store: &TermStore,
) -> Vec<Violation> {
    if disjoint.is_empty() {
        return Vec::new();
    }
    let mut partners: HashMap<TermId, Vec<TermId>> = HashMap::new();
    for &(a, b) in disjoint {
        partners.entry(a).or_default().push(b);
        if a != b {
            partners.entry(b).or_default().push(a);
        }
    }

    let iri_of = |id: TermId| -> &str {
        match store.resolve(id) {
            Term::Iri(s) => s.as_str(),
            _ => "",
        }
    };

    let mut violations = Vec::new();
    let mut inferred_idx = 0usize;
    for &x in abox.instances() {
        // inferred_types is sorted by (instance, class); scan the run for x
        let run_start = inferred_idx;
        while inferred_idx < result.inferred_types.len()
            && result.inferred_types[inferred_idx].0 == x
        {
            inferred_idx += 1;
        }
        let inferred_run = &result.inferred_types[run_start..inferred_idx];

        let total: HashSet<TermId> = abox
            .direct_types(x)
            .iter()
            .copied()
            .chain(inferred_run.iter().map(|&(_, d)| d))
            .collect();
        if total.is_empty() {
            continue;
        }
        let mut violated: Vec<(TermId, TermId)> = Vec::new();
        for &t in &total {
            if let Some(ps) = partners.get(&t) {
                for &q in ps {
                    if total.contains(&q) {
                        violated.push(unordered(t, q));
                    }
                }
            }
        }
        violated.sort();
        violated.dedup();
        if let Some(&(a, b)) = violated.iter().min_by(|&&(a1, b1), &&(a2, b2)| {
            let k1 = {
                let (x, y) = (iri_of(a1), iri_of(b1));
                if x <= y { (x, y) } else { (y, x) }
            };
            let k2 = {
                let (x, y) = (iri_of(a2), iri_of(b2));
                if x <= y { (x, y) } else { (y, x) }
            };
            k1.cmp(&k2)
        }) {
            violations.push(Violation {
                instance: x,
                class_a: a,
                class_b: b,
            });
        }
    }
    violations
}
