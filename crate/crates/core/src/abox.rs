//! Assertional component: the instance roster and per-instance direct
//! named types.

use crate::error::{Error, Result};
use crate::rdf::Triple;
use crate::tbox::TBoxIndex;
use crate::term::{Term, TermId, TermStore};
use std::collections::{HashMap, HashSet};

/// Direct type assertions plus the instance roster.
///
/// `owl:NamedIndividual` typings put an instance on the roster but are
/// never stored as direct types; declaration typings (`owl:Class`,
/// `owl:Restriction`, property declarations) are not instance typings
/// at all and are skipped here.
#[derive(Debug, Default)]
pub struct ABox {
    /// Sorted roster of every instance (typed or declared an individual).
    instances: Vec<TermId>,
    direct_types: HashMap<TermId, Vec<TermId>>,
    /// Non-`rdf:type` assertions from the input, kept only when the
    /// caller asks to deduplicate inferred assertions against the input.
    input_assertions: Option<HashSet<Triple>>,
    n_undeclared_class_warnings: u64,
}

impl ABox {
    pub fn instances(&self) -> &[TermId] {
        &self.instances
    }

    pub fn n_instances(&self) -> usize {
        self.instances.len()
    }

    /// Direct named types of an instance, sorted and deduplicated.
    pub fn direct_types(&self, instance: TermId) -> &[TermId] {
        self.direct_types
            .get(&instance)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn n_direct_type_assertions(&self) -> usize {
        self.direct_types.values().map(Vec::len).sum()
    }

    pub fn input_assertions(&self) -> Option<&HashSet<Triple>> {
        self.input_assertions.as_ref()
    }

    pub fn n_undeclared_class_warnings(&self) -> u64 {
        self.n_undeclared_class_warnings
    }
}

/// Loader options. `track_input_assertions` retains non-type input
/// triples so the materializer can subtract them from its output.
#[derive(Debug, Default, Clone, Copy)]
pub struct ABoxOptions {
    pub track_input_assertions: bool,
}

/// Incremental A-box loader; feed triples, then `finish`.
pub struct ABoxLoader<'a> {
    index: &'a TBoxIndex,
    roster: HashSet<TermId>,
    direct_types: HashMap<TermId, Vec<TermId>>,
    input_assertions: Option<HashSet<Triple>>,
    n_warnings: u64,
}

impl<'a> ABoxLoader<'a> {
    pub fn new(index: &'a TBoxIndex, options: ABoxOptions) -> Self {
        ABoxLoader {
            index,
            roster: HashSet::new(),
            direct_types: HashMap::new(),
            input_assertions: options.track_input_assertions.then(HashSet::new),
            n_warnings: 0,
        }
    }

    pub fn add(&mut self, t: Triple, store: &TermStore) -> Result<()> {
        let v = self.index.vocab();
        if t.predicate != v.rdf_type {
            if let Some(set) = self.input_assertions.as_mut() {
                set.insert(t);
            }
            return Ok(());
        }
        if t.object == v.owl_named_individual {
            self.roster.insert(t.subject);
            return Ok(());
        }
        if v.is_declaration_class(t.object) {
            return Ok(());
        }
        if self.index.is_restriction_anchor(t.object) {
            return Err(Error::AnchorTypeObject {
                instance: display(store, t.subject),
                class: display(store, t.object),
            });
        }
        match store.resolve(t.object) {
            Term::Blank(_) => {
                return Err(Error::BlankTypeObject {
                    instance: display(store, t.subject),
                    class: display(store, t.object),
                })
            }
            Term::Literal { .. } => {
                return Err(Error::MalformedTerm(format!(
                    "literal {} used as a type",
                    display(store, t.object)
                )))
            }
            Term::Iri(_) => {}
        }
        if !self.index.is_named_class(t.object) {
            self.n_warnings += 1;
            if self.n_warnings <= 10 {
                log::warn!(
                    "instance {} typed by undeclared class {}; accepting with empty closure",
                    display(store, t.subject),
                    display(store, t.object)
                );
            }
        }
        self.roster.insert(t.subject);
        self.direct_types.entry(t.subject).or_default().push(t.object);
        Ok(())
    }

    pub fn finish(self) -> ABox {
        let mut instances: Vec<TermId> = self.roster.into_iter().collect();
        instances.sort();
        let mut direct_types = self.direct_types;
        for v in direct_types.values_mut() {
            v.sort();
            v.dedup();
        }
        ABox {
            instances,
            direct_types,
            input_assertions: self.input_assertions,
            n_undeclared_class_warnings: self.n_warnings,
        }
    }
}

fn display(store: &TermStore, id: TermId) -> String {
    match store.resolve(id) {
        Term::Iri(iri) => format!("<{iri}>"),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal { lexical, .. } => format!("{lexical:?}"),
    }
}

/// Loads an A-box from an in-memory triple slice.
pub fn load_abox(triples: &[Triple], index: &TBoxIndex, store: &TermStore) -> Result<ABox> {
    load_abox_with(triples, index, store, ABoxOptions::default())
}

pub fn load_abox_with(
    triples: &[Triple],
    index: &TBoxIndex,
    store: &TermStore,
    options: ABoxOptions,
) -> Result<ABox> {
    let mut loader = ABoxLoader::new(index, options);
    for &t in triples {
        loader.add(t, store)?;
    }
    Ok(loader.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse_str, Format};
    use crate::tbox::build_tbox;

    const CLG_10: &str = include_str!("../../../data/clg_10.ttl");

    #[test]
    fn sandbox_abox_roster() {
        let mut store = TermStore::new();
        let (triples, _) = parse_str(CLG_10, Format::Turtle, &mut store, 0).unwrap();
        let index = build_tbox(&triples, &mut store).unwrap();
        let abox = load_abox(&triples, &index, &store).unwrap();
        assert_eq!(abox.n_instances(), 3);

        let china = store
            .intern(Term::iri("http://caligraph.org/resource/China"))
            .unwrap();
        let icshp = store
            .intern(Term::iri(
                "http://caligraph.org/resource/International_Center_on_Small_Hydro_Power",
            ))
            .unwrap();
        let brigade = store
            .intern(Term::iri("http://caligraph.org/resource/46th_Mixed_Brigade"))
            .unwrap();
        assert!(abox.instances().contains(&china));
        assert_eq!(abox.direct_types(china), &[]);
        assert_eq!(abox.direct_types(icshp).len(), 1);
        assert_eq!(abox.direct_types(brigade).len(), 1);
        assert_eq!(abox.n_undeclared_class_warnings(), 0);
    }

    #[test]
    fn empty_stream_empty_abox() {
        let mut store = TermStore::new();
        let index = build_tbox(&[], &mut store).unwrap();
        let abox = load_abox(&[], &index, &store).unwrap();
        assert_eq!(abox.n_instances(), 0);
        assert_eq!(abox.n_direct_type_assertions(), 0);
    }

    #[test]
    fn typing_by_blank_node_is_an_error() {
        let mut store = TermStore::new();
        let index = build_tbox(&[], &mut store).unwrap();
        let x = store.intern(Term::iri("http://x.org/i")).unwrap();
        let ty = store.intern(Term::iri(crate::vocab::RDF_TYPE)).unwrap();
        let b = store.intern(Term::blank("d0:b9")).unwrap();
        let err = load_abox(&[Triple::new(x, ty, b)], &index, &store).unwrap_err();
        assert!(matches!(err, Error::BlankTypeObject { .. }));
    }

    #[test]
    fn typing_by_restriction_anchor_is_an_error() {
        let mut store = TermStore::new();
        let text = r#"
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix ex: <http://x.org/> .
_:r a owl:Restriction; owl:onProperty ex:p; owl:hasValue ex:v .
"#;
        let (triples, _) = parse_str(text, Format::Turtle, &mut store, 0).unwrap();
        let index = build_tbox(&triples, &mut store).unwrap();
        let anchor = triples[0].subject;
        let x = store.intern(Term::iri("http://x.org/i")).unwrap();
        let ty = store.intern(Term::iri(crate::vocab::RDF_TYPE)).unwrap();
        let err = load_abox(&[Triple::new(x, ty, anchor)], &index, &store).unwrap_err();
        assert!(matches!(err, Error::AnchorTypeObject { .. }));
    }

    #[test]
    fn undeclared_class_accepted_with_warning() {
        let mut store = TermStore::new();
        let index = build_tbox(&[], &mut store).unwrap();
        let x = store.intern(Term::iri("http://x.org/i")).unwrap();
        let ty = store.intern(Term::iri(crate::vocab::RDF_TYPE)).unwrap();
        let c = store.intern(Term::iri("http://x.org/Mystery")).unwrap();
        let abox = load_abox(&[Triple::new(x, ty, c)], &index, &store).unwrap();
        assert_eq!(abox.n_instances(), 1);
        assert_eq!(abox.direct_types(x), &[c]);
        assert_eq!(abox.n_undeclared_class_warnings(), 1);
    }

    #[test]
    fn named_individual_is_roster_only() {
        let mut store = TermStore::new();
        let index = build_tbox(&[], &mut store).unwrap();
        let x = store.intern(Term::iri("http://x.org/i")).unwrap();
        let ty = store.intern(Term::iri(crate::vocab::RDF_TYPE)).unwrap();
        let ni = store
            .intern(Term::iri(crate::vocab::OWL_NAMED_INDIVIDUAL))
            .unwrap();
        let abox = load_abox(&[Triple::new(x, ty, ni)], &index, &store).unwrap();
        assert_eq!(abox.instances(), &[x]);
        assert!(abox.direct_types(x).is_empty());
    }
}
