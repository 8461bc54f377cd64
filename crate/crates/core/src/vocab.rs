//! RDF/RDFS/OWL vocabulary IRIs used by the supported ontology fragment.

use crate::term::{Term, TermId, TermStore};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";

pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub const OWL_THING: &str = "http://www.w3.org/2002/07/owl#Thing";
pub const OWL_RESTRICTION: &str = "http://www.w3.org/2002/07/owl#Restriction";
pub const OWL_ON_PROPERTY: &str = "http://www.w3.org/2002/07/owl#onProperty";
pub const OWL_HAS_VALUE: &str = "http://www.w3.org/2002/07/owl#hasValue";
pub const OWL_DISJOINT_WITH: &str = "http://www.w3.org/2002/07/owl#disjointWith";
pub const OWL_NAMED_INDIVIDUAL: &str = "http://www.w3.org/2002/07/owl#NamedIndividual";
pub const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
pub const OWL_DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";
pub const OWL_ANNOTATION_PROPERTY: &str = "http://www.w3.org/2002/07/owl#AnnotationProperty";
pub const OWL_ONTOLOGY: &str = "http://www.w3.org/2002/07/owl#Ontology";

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

/// Namespace prefixes exempt from the sampler's closedness validation:
/// vocabulary terms like `owl:Thing` need not be described by a subset.
pub const VOCAB_NAMESPACES: [&str; 3] = [
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "http://www.w3.org/2000/01/rdf-schema#",
    "http://www.w3.org/2002/07/owl#",
];

/// Interned ids of the vocabulary terms the engine matches on.
#[derive(Debug, Clone, Copy)]
pub struct VocabIds {
    pub rdf_type: TermId,
    pub rdfs_subclass_of: TermId,
    pub owl_class: TermId,
    pub owl_thing: TermId,
    pub owl_restriction: TermId,
    pub owl_on_property: TermId,
    pub owl_has_value: TermId,
    pub owl_disjoint_with: TermId,
    pub owl_named_individual: TermId,
    pub owl_object_property: TermId,
    pub owl_datatype_property: TermId,
    pub owl_annotation_property: TermId,
    pub owl_ontology: TermId,
}

impl VocabIds {
    pub fn intern(store: &mut TermStore) -> Self {
        let mut id = |iri: &str| {
            store
                .intern(Term::iri(iri))
                .expect("vocabulary IRIs are well-formed")
        };
        VocabIds {
            rdf_type: id(RDF_TYPE),
            rdfs_subclass_of: id(RDFS_SUBCLASS_OF),
            owl_class: id(OWL_CLASS),
            owl_thing: id(OWL_THING),
            owl_restriction: id(OWL_RESTRICTION),
            owl_on_property: id(OWL_ON_PROPERTY),
            owl_has_value: id(OWL_HAS_VALUE),
            owl_disjoint_with: id(OWL_DISJOINT_WITH),
            owl_named_individual: id(OWL_NAMED_INDIVIDUAL),
            owl_object_property: id(OWL_OBJECT_PROPERTY),
            owl_datatype_property: id(OWL_DATATYPE_PROPERTY),
            owl_annotation_property: id(OWL_ANNOTATION_PROPERTY),
            owl_ontology: id(OWL_ONTOLOGY),
        }
    }

    /// True for classes that mark a declaration rather than an instance
    /// typing when they appear as the object of `rdf:type`.
    pub fn is_declaration_class(&self, id: TermId) -> bool {
        id == self.owl_class
            || id == self.owl_restriction
            || id == self.owl_object_property
            || id == self.owl_datatype_property
            || id == self.owl_annotation_property
            || id == self.owl_ontology
    }
}
