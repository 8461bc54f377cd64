//! Deliberately naive fixpoint rule engine over raw triples; ground truth
//! for differential testing of the indexed materializer.
//!
//! Three rules are saturated until nothing new appears:
//!
//! (a) `x type C` and `C subClassOf D` with `D` named gives `x type D`;
//! (b) `C subClassOf R`, `R type owl:Restriction`, `R onProperty p`,
//!     `R hasValue v`, `x type C` gives `x p v`;
//! (c) `C subClassOf D` and `D subClassOf E`, all named, gives
//!     `C subClassOf E`.
//!
//! Cycles terminate naturally because saturation is set-based. No indexes
//! are kept across rounds and nothing is incremental.

use crate::error::{Error, Result};
use crate::rdf::Triple;
use crate::term::{TermId, TermStore};
use crate::vocab::VocabIds;
use std::collections::{HashMap, HashSet};

/// Inputs above this size are refused; the oracle optimizes for obviousness,
/// not throughput.
pub const GUARD_LIMIT: usize = 100_000;

/// Saturates the rules and returns the fixpoint minus the input, sorted.
pub fn naive_fixpoint(triples: &[Triple], store: &mut TermStore) -> Result<Vec<Triple>> {
    if triples.len() > GUARD_LIMIT {
        return Err(Error::OracleGuard {
            size: triples.len(),
            limit: GUARD_LIMIT,
        });
    }
    let vocab = VocabIds::intern(store);
    let input: HashSet<Triple> = triples.iter().copied().collect();
    let mut all = input.clone();

    loop {
        // rebuild the working views from scratch each round
        let mut sub_edges: Vec<(TermId, TermId)> = Vec::new();
        let mut types: Vec<(TermId, TermId)> = Vec::new();
        let mut restriction_nodes: HashSet<TermId> = HashSet::new();
        let mut on_property: HashMap<TermId, TermId> = HashMap::new();
        let mut has_value: HashMap<TermId, TermId> = HashMap::new();
        for t in &all {
            if t.predicate == vocab.rdfs_subclass_of {
                sub_edges.push((t.subject, t.object));
            } else if t.predicate == vocab.rdf_type {
                if t.object == vocab.owl_restriction {
                    restriction_nodes.insert(t.subject);
                }
                types.push((t.subject, t.object));
            } else if t.predicate == vocab.owl_on_property {
                on_property.insert(t.subject, t.object);
            } else if t.predicate == vocab.owl_has_value {
                has_value.insert(t.subject, t.object);
            }
        }
        let mut supers_of: HashMap<TermId, Vec<TermId>> = HashMap::new();
        for &(c, d) in &sub_edges {
            supers_of.entry(c).or_default().push(d);
        }
        let mut instances_of: HashMap<TermId, Vec<TermId>> = HashMap::new();
        for &(x, c) in &types {
            instances_of.entry(c).or_default().push(x);
        }

        let mut fresh: Vec<Triple> = Vec::new();

        // (a) type propagation along subclass edges to named classes
        for &(x, c) in &types {
            if let Some(ds) = supers_of.get(&c) {
                for &d in ds {
                    if store.resolve(d).is_iri() {
                        fresh.push(Triple::new(x, vocab.rdf_type, d));
                    }
                }
            }
        }

        // (b) hasValue materialization
        for &(c, r) in &sub_edges {
            if !restriction_nodes.contains(&r) {
                continue;
            }
            let (Some(&p), Some(&v)) = (on_property.get(&r), has_value.get(&r)) else {
                continue;
            };
            if let Some(xs) = instances_of.get(&c) {
                for &x in xs {
                    fresh.push(Triple::new(x, p, v));
                }
            }
        }

        // (c) subclass transitivity over named classes
        for &(c, d) in &sub_edges {
            if !store.resolve(c).is_iri() || !store.resolve(d).is_iri() {
                continue;
            }
            if let Some(es) = supers_of.get(&d) {
                for &e in es {
                    if store.resolve(e).is_iri() {
                        fresh.push(Triple::new(c, vocab.rdfs_subclass_of, e));
                    }
                }
            }
        }

        let before = all.len();
        all.extend(fresh);
        if all.len() == before {
            break;
        }
    }

    let mut new_triples: Vec<Triple> = all.difference(&input).copied().collect();
    new_triples.sort();
    Ok(new_triples)
}

/// Oracle output split by category, with the materializer's counting
/// convention applied to instance-level types (no `owl:NamedIndividual`,
/// no blank-node classes).
#[derive(Debug, Default)]
pub struct OracleBreakdown {
    pub type_assertions: Vec<(TermId, TermId)>,
    pub object_assertions: Vec<Triple>,
    pub data_assertions: Vec<Triple>,
    /// Rule (c) output: derived class-level subclass triples.
    pub class_closure_triples: Vec<Triple>,
}

pub fn split_output(
    new_triples: &[Triple],
    store: &TermStore,
    vocab: &VocabIds,
) -> OracleBreakdown {
    let mut out = OracleBreakdown::default();
    for &t in new_triples {
        if t.predicate == vocab.rdfs_subclass_of {
            out.class_closure_triples.push(t);
        } else if t.predicate == vocab.rdf_type {
            if t.object == vocab.owl_named_individual || store.resolve(t.object).is_blank() {
                continue;
            }
            out.type_assertions.push((t.subject, t.object));
        } else if store.resolve(t.object).is_literal() {
            out.data_assertions.push(t);
        } else {
            out.object_assertions.push(t);
        }
    }
    out
}

/// Differential run: oracle vs the indexed pipeline on the same triples.
#[derive(Debug, Default)]
pub struct Differential {
    /// Oracle-only / materializer-only type pairs.
    pub missing_types: Vec<(TermId, TermId)>,
    pub extra_types: Vec<(TermId, TermId)>,
    pub missing_objects: Vec<Triple>,
    pub extra_objects: Vec<Triple>,
    pub missing_data: Vec<Triple>,
    pub extra_data: Vec<Triple>,
    /// Classes whose index closure disagrees with saturated reachability.
    pub closure_mismatches: Vec<TermId>,
}

impl Differential {
    pub fn agrees(&self) -> bool {
        self.missing_types.is_empty()
            && self.extra_types.is_empty()
            && self.missing_objects.is_empty()
            && self.extra_objects.is_empty()
            && self.missing_data.is_empty()
            && self.extra_data.is_empty()
            && self.closure_mismatches.is_empty()
    }
}

fn diff<T: Ord + Copy>(oracle: &[T], engine: &[T]) -> (Vec<T>, Vec<T>) {
    let o: std::collections::BTreeSet<T> = oracle.iter().copied().collect();
    let e: std::collections::BTreeSet<T> = engine.iter().copied().collect();
    (
        o.difference(&e).copied().collect(),
        e.difference(&o).copied().collect(),
    )
}

/// Runs both the oracle and the indexed materializer and reports every
/// disagreement, including the class-level closure comparison.
pub fn differential(triples: &[Triple], store: &mut TermStore) -> Result<Differential> {
    let new_triples = naive_fixpoint(triples, store)?;
    let index = crate::tbox::build_tbox(triples, store)?;
    let oracle = split_output(&new_triples, store, index.vocab());

    let abox = crate::abox::load_abox(triples, &index, store)?;
    let result = crate::materialize::materialize(
        &abox,
        &index,
        &crate::materialize::MaterializeOptions::default(),
    );

    let mut d = Differential::default();
    (d.missing_types, d.extra_types) = diff(&oracle.type_assertions, &result.inferred_types);
    (d.missing_objects, d.extra_objects) = diff(
        &oracle.object_assertions,
        &result.inferred_object_assertions,
    );
    (d.missing_data, d.extra_data) =
        diff(&oracle.data_assertions, &result.inferred_data_assertions);

    // class-level closure agreement: saturated subclass reachability
    // (input plus rule-c output, named targets only) per class
    let vocab = *index.vocab();
    let mut reach: HashMap<TermId, HashSet<TermId>> = HashMap::new();
    for t in triples.iter().chain(new_triples.iter()) {
        if t.predicate == vocab.rdfs_subclass_of
            && store.resolve(t.subject).is_iri()
            && store.resolve(t.object).is_iri()
            && !index.is_restriction_anchor(t.object)
            && !index.is_restriction_anchor(t.subject)
        {
            reach.entry(t.subject).or_default().insert(t.object);
        }
    }
    let mut classes: Vec<TermId> = index.named_classes().iter().copied().collect();
    classes.sort();
    for c in classes {
        let expected = reach.get(&c).cloned().unwrap_or_default();
        let got: HashSet<TermId> = index.superclass_closure(c).iter().copied().collect();
        if expected != got {
            d.closure_mismatches.push(c);
        }
    }
    Ok(d)
}
