//! Deterministic, size-targeted subset extraction from a large dump.
//!
//! Subsets are seeded from leaf classes (strict descendants of a root
//! class with no declared subclasses) and collect, clause by clause:
//! every triple about a leaf or one of its transitive superclasses, the
//! constructed `owl:NamedIndividual` and leaf typings for individuals
//! directly typed by a leaf, the restriction anchors on any leaf's
//! superclass chain together with everything about their properties and
//! (when resource-valued) their values. Disjointness triples are dropped
//! unless asked for, since propagating them blows up sample sizes.
//!
//! Leaves are ordered lexicographically by IRI before truncation: a bare
//! `LIMIT` with no ordering would make subsets irreproducible.

use crate::error::{Error, Result};
use crate::rdf::{self, Triple};
use crate::tbox::{TBoxBuilder, TBoxIndex};
use crate::term::{Term, TermId, TermStore};
use crate::vocab::VOCAB_NAMESPACES;
use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct SampleSpec {
    pub root: TermId,
    pub leaf_limit: usize,
    pub drop_disjointness: bool,
}

impl SampleSpec {
    pub fn new(root: TermId, leaf_limit: usize) -> Self {
        SampleSpec {
            root,
            leaf_limit,
            drop_disjointness: true,
        }
    }
}

/// Strict descendants of `root` with no declared subclasses, sorted
/// lexicographically by IRI and truncated to `limit`. A root of
/// `owl:Thing` applies the no-subclass filter to the whole ontology.
/// Returns all leaves (with a warning) when fewer than `limit` exist.
pub fn find_leaves(
    index: &TBoxIndex,
    root: TermId,
    limit: usize,
    store: &TermStore,
) -> Result<Vec<TermId>> {
    let candidates: Vec<TermId> = if root == index.vocab().owl_thing {
        index.named_classes().iter().copied().collect()
    } else {
        if !index.is_named_class(root) {
            return Err(Error::UnknownRoot(format!(
                "{:?}",
                store.resolve(root)
            )));
        }
        index.descendants(root).into_iter().collect()
    };
    let mut leaves: Vec<TermId> = candidates
        .into_iter()
        .filter(|&c| index.direct_subclasses(c).is_empty())
        .collect();
    leaves.sort_by(|&a, &b| store.iri(a).cmp(store.iri(b)));
    if leaves.len() < limit {
        log::warn!(
            "requested {limit} leaf classes but only {} exist under the root",
            leaves.len()
        );
    }
    leaves.truncate(limit);
    Ok(leaves)
}

/// Membership filter mirroring the extraction clauses; shared by the
/// in-memory and two-pass streaming paths.
struct SubsetFilter {
    super_set: HashSet<TermId>,
    leaf_set: HashSet<TermId>,
    described_extras: HashSet<TermId>,
    drop_disjointness: bool,
    rdf_type: TermId,
    owl_named_individual: TermId,
    owl_disjoint_with: TermId,
}

impl SubsetFilter {
    fn new(index: &TBoxIndex, leaves: &[TermId], spec: &SampleSpec) -> Self {
        let mut super_set: HashSet<TermId> = HashSet::new();
        let mut described_extras: HashSet<TermId> = HashSet::new();
        for &leaf in leaves {
            super_set.insert(leaf);
            super_set.extend(index.superclass_closure(leaf).iter().copied());
        }
        // restriction anchors on the chains, plus their property and
        // (resource) value descriptions
        let chain: Vec<TermId> = super_set.iter().copied().collect();
        for c in chain {
            for r in index.direct_restrictions(c) {
                super_set.insert(r.anchor);
                described_extras.insert(r.property);
                if r.kind == crate::tbox::RestrictionKind::Object {
                    described_extras.insert(r.value);
                }
            }
        }
        SubsetFilter {
            super_set,
            leaf_set: leaves.iter().copied().collect(),
            described_extras,
            drop_disjointness: spec.drop_disjointness,
            rdf_type: index.vocab().rdf_type,
            owl_named_individual: index.vocab().owl_named_individual,
            owl_disjoint_with: index.vocab().owl_disjoint_with,
        }
    }

    fn offer(&self, t: Triple, out: &mut HashSet<Triple>) {
        if self.drop_disjointness && t.predicate == self.owl_disjoint_with {
            return;
        }
        if self.super_set.contains(&t.subject) || self.described_extras.contains(&t.subject) {
            out.insert(t);
        }
        if t.predicate == self.rdf_type && self.leaf_set.contains(&t.object) {
            out.insert(Triple::new(t.subject, self.rdf_type, self.owl_named_individual));
            out.insert(t);
        }
    }
}

/// Extracts the subset from in-memory triples. Output is sorted by
/// `(subject, predicate, object)` id and duplicate-free.
pub fn extract_subset(
    triples: &[Triple],
    index: &TBoxIndex,
    leaves: &[TermId],
    spec: &SampleSpec,
) -> Vec<Triple> {
    let filter = SubsetFilter::new(index, leaves, spec);
    let mut out = HashSet::new();
    for &t in triples {
        filter.offer(t, &mut out);
    }
    let mut sorted: Vec<Triple> = out.into_iter().collect();
    sorted.sort();
    sorted
}

#[derive(Debug)]
pub struct SampleSummary {
    pub n_leaves: usize,
    pub n_triples: usize,
}

/// Two-pass streaming extraction: pass 1 builds the T-box index, pass 2
/// matches triples against the filter and buffers only the subset.
/// Output is sorted N-Triples, byte-identical for identical inputs.
pub fn sample_file(
    dump: &Path,
    root_iri: &str,
    leaf_limit: usize,
    drop_disjointness: bool,
    out: &mut dyn Write,
) -> Result<SampleSummary> {
    let mut store = TermStore::new();
    let mut builder = TBoxBuilder::new(&mut store);
    rdf::stream_path(dump, &mut store, 0, |t, store| builder.add(t, store))?;
    let index = builder.finish(&store)?;

    let root = store
        .lookup(&Term::iri(root_iri))
        .ok_or_else(|| Error::UnknownRoot(format!("<{root_iri}>")))?;
    let leaves = find_leaves(&index, root, leaf_limit, &store)?;
    let spec = SampleSpec {
        root,
        leaf_limit,
        drop_disjointness,
    };
    let filter = SubsetFilter::new(&index, &leaves, &spec);

    let mut subset: HashSet<Triple> = HashSet::new();
    // same doc id as pass 1 so blank labels intern to the same terms
    rdf::stream_path(dump, &mut store, 0, |t, _| {
        filter.offer(t, &mut subset);
        Ok(())
    })?;

    let mut sorted: Vec<Triple> = subset.into_iter().collect();
    sorted.sort();
    let mut writer = rdf::NtWriter::new(out);
    for t in &sorted {
        writer.write_triple(&store, t)?;
    }
    writer.finish()?;
    Ok(SampleSummary {
        n_leaves: leaves.len(),
        n_triples: sorted.len(),
    })
}

fn is_vocab_iri(iri: &str) -> bool {
    VOCAB_NAMESPACES.iter().any(|ns| iri.starts_with(ns))
}

/// Dangling-reference validator: every class referenced by a subclass
/// edge, every restriction property, and every typed individual's class
/// must itself be described (appear as a subject), with RDF/RDFS/OWL
/// vocabulary terms such as `owl:Thing` exempt. Restriction values are
/// not required: their descriptions are optional in the extraction.
/// Returns one diagnostic per dangling reference.
pub fn validate_closedness(triples: &[Triple], store: &TermStore) -> Vec<String> {
    let vocab_probe = |id: TermId| match store.resolve(id) {
        Term::Iri(iri) => is_vocab_iri(iri),
        _ => false,
    };
    let subjects: HashSet<TermId> = triples.iter().map(|t| t.subject).collect();
    let rdf_type = store.lookup(&Term::iri(crate::vocab::RDF_TYPE));
    let subclass_of = store.lookup(&Term::iri(crate::vocab::RDFS_SUBCLASS_OF));
    let on_property = store.lookup(&Term::iri(crate::vocab::OWL_ON_PROPERTY));

    let mut missing: Vec<(TermId, &'static str)> = Vec::new();
    let mut seen: HashSet<TermId> = HashSet::new();
    for t in triples {
        let what = if Some(t.predicate) == subclass_of {
            "superclass"
        } else if Some(t.predicate) == on_property {
            "restriction property"
        } else if Some(t.predicate) == rdf_type {
            "type"
        } else {
            continue;
        };
        if store.resolve(t.object).is_literal() {
            continue;
        }
        if subjects.contains(&t.object) || vocab_probe(t.object) {
            continue;
        }
        if seen.insert(t.object) {
            missing.push((t.object, what));
        }
    }
    let mut out: Vec<String> = missing
        .into_iter()
        .map(|(id, what)| format!("dangling {what} reference: {:?}", store.resolve(id)))
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abox::load_abox;
    use crate::materialize::{materialize, MaterializeOptions};
    use crate::rdf::{parse_str, Format};
    use crate::tbox::build_tbox;

    const CLG_10: &str = include_str!("../../../data/clg_10.ttl");

    fn load(text: &str) -> (TermStore, Vec<Triple>, TBoxIndex) {
        let mut store = TermStore::new();
        let (triples, _) = parse_str(text, Format::Turtle, &mut store, 0).unwrap();
        let index = build_tbox(&triples, &mut store).unwrap();
        (store, triples, index)
    }

    fn clgo(store: &mut TermStore, local: &str) -> TermId {
        store
            .intern(Term::iri(format!("http://caligraph.org/ontology/{local}")))
            .unwrap()
    }

    #[test]
    fn sandbox_leaves_under_organization() {
        let (mut store, _, index) = load(CLG_10);
        let org = clgo(&mut store, "Organization");
        let leaves = find_leaves(&index, org, 10, &store).unwrap();
        let expected = vec![
            clgo(&mut store, "International_organization_based_in_China"),
            clgo(&mut store, "Military_unit_or_formation_disestablished_in_1939"),
        ];
        assert_eq!(leaves, expected);
    }

    #[test]
    fn leaf_limit_one_takes_lexicographic_first() {
        let (mut store, _, index) = load(CLG_10);
        let org = clgo(&mut store, "Organization");
        let leaves = find_leaves(&index, org, 1, &store).unwrap();
        assert_eq!(
            leaves,
            vec![clgo(&mut store, "International_organization_based_in_China")]
        );
    }

    #[test]
    fn root_without_descendants_yields_empty() {
        let (mut store, _, index) = load(CLG_10);
        let person = clgo(&mut store, "Person");
        let leaves = find_leaves(&index, person, 5, &store).unwrap();
        assert!(leaves.is_empty());
    }

    #[test]
    fn unknown_root_is_an_error() {
        let (mut store, _, index) = load(CLG_10);
        let ghost = store.intern(Term::iri("http://x.org/Ghost")).unwrap();
        assert!(matches!(
            find_leaves(&index, ghost, 5, &store),
            Err(Error::UnknownRoot(_))
        ));
    }

    #[test]
    fn owl_thing_root_applies_global_leaf_filter() {
        let (mut store, _, index) = load(CLG_10);
        let thing = store.intern(Term::iri(crate::vocab::OWL_THING)).unwrap();
        let leaves = find_leaves(&index, thing, 100, &store).unwrap();
        // leaves of the whole hierarchy: the two instance-bearing classes
        // plus Person (no subclasses either)
        let expected: HashSet<TermId> = [
            clgo(&mut store, "International_organization_based_in_China"),
            clgo(&mut store, "Military_unit_or_formation_disestablished_in_1939"),
            clgo(&mut store, "Person"),
        ]
        .into_iter()
        .collect();
        assert_eq!(leaves.iter().copied().collect::<HashSet<_>>(), expected);
    }

    #[test]
    fn sandbox_subset_drops_person_and_disjointness_only() {
        let (mut store, triples, index) = load(CLG_10);
        let org = clgo(&mut store, "Organization");
        let leaves = find_leaves(&index, org, 10, &store).unwrap();
        let spec = SampleSpec::new(org, 10);
        let subset = extract_subset(&triples, &index, &leaves, &spec);
        // everything except Person's three triples (one of which is the
        // disjointness assertion)
        assert_eq!(subset.len(), triples.len() - 3);
        let person = clgo(&mut store, "Person");
        assert!(subset.iter().all(|t| t.subject != person));
        let disjoint = store
            .intern(Term::iri(crate::vocab::OWL_DISJOINT_WITH))
            .unwrap();
        assert!(subset.iter().all(|t| t.predicate != disjoint));

        // the subset is closed and materializes to the same counts
        assert!(validate_closedness(&subset, &store).is_empty());
        let sub_index = build_tbox(&subset, &mut store).unwrap();
        let abox = load_abox(&subset, &sub_index, &store).unwrap();
        let result = materialize(&abox, &sub_index, &MaterializeOptions::default());
        assert_eq!(result.inferred_types.len(), 10);
        assert_eq!(result.inferred_object_assertions.len(), 1);
        assert_eq!(result.inferred_data_assertions.len(), 1);
    }

    #[test]
    fn keep_disjointness_keeps_the_axiom() {
        let (mut store, triples, index) = load(CLG_10);
        let org = clgo(&mut store, "Organization");
        let leaves = find_leaves(&index, org, 10, &store).unwrap();
        let mut spec = SampleSpec::new(org, 10);
        spec.drop_disjointness = false;
        let subset = extract_subset(&triples, &index, &leaves, &spec);
        // Person is still not a superclass of any leaf, so its
        // disjointness triple stays out; nothing else changes
        assert_eq!(subset.len(), triples.len() - 3);
    }

    #[test]
    fn empty_leaf_list_empty_subset() {
        let (mut store, triples, index) = load(CLG_10);
        let org = clgo(&mut store, "Organization");
        let spec = SampleSpec::new(org, 0);
        let subset = extract_subset(&triples, &index, &[], &spec);
        assert!(subset.is_empty());
    }

    #[test]
    fn leaf_without_instances_still_described() {
        let mut store = TermStore::new();
        let text = r#"
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix ex: <http://x.org/> .
ex:Root a owl:Class .
ex:Lonely a owl:Class; rdfs:subClassOf ex:Root .
"#;
        let (triples, _) = parse_str(text, Format::Turtle, &mut store, 0).unwrap();
        let index = build_tbox(&triples, &mut store).unwrap();
        let root = store.intern(Term::iri("http://x.org/Root")).unwrap();
        let leaves = find_leaves(&index, root, 10, &store).unwrap();
        assert_eq!(leaves.len(), 1);
        let spec = SampleSpec::new(root, 10);
        let subset = extract_subset(&triples, &index, &leaves, &spec);
        // class and superclass triples present, zero instance triples
        assert_eq!(subset.len(), 3);
        assert!(validate_closedness(&subset, &store).is_empty());
    }

    #[test]
    fn validator_reports_dangling_references() {
        let mut store = TermStore::new();
        let text = r#"
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix ex: <http://x.org/> .
ex:A rdfs:subClassOf ex:Missing .
"#;
        let (triples, _) = parse_str(text, Format::Turtle, &mut store, 0).unwrap();
        let diags = validate_closedness(&triples, &store);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("Missing"));
    }

    #[test]
    fn streamed_sample_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let dump = dir.path().join("dump.ttl");
        std::fs::write(&dump, CLG_10).unwrap();
        let mut out1 = Vec::new();
        let s1 = sample_file(
            &dump,
            "http://caligraph.org/ontology/Organization",
            10,
            true,
            &mut out1,
        )
        .unwrap();
        let mut out2 = Vec::new();
        let s2 = sample_file(
            &dump,
            "http://caligraph.org/ontology/Organization",
            10,
            true,
            &mut out2,
        )
        .unwrap();
        assert_eq!(out1, out2);
        assert_eq!(s1.n_triples, s2.n_triples);
        assert_eq!(s1.n_leaves, 2);
        assert_eq!(s1.n_triples, 32);

        // round-trip: the emitted N-Triples parse back to the same count
        let mut store = TermStore::new();
        let text = String::from_utf8(out1).unwrap();
        let (reparsed, _) = parse_str(&text, Format::NTriples, &mut store, 0).unwrap();
        assert_eq!(reparsed.len(), 32);
    }
}
