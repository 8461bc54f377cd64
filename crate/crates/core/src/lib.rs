//! Forward-chaining materialization engine for ontologies built from large
//! subclass hierarchies and `owl:hasValue` restrictions, in the style of
//! Wikipedia-derived knowledge graphs such as CaLiGraph.
//!
//! The engine computes, for a T-box of `rdfs:subClassOf` axioms,
//! `owl:hasValue` restrictions, and `owl:disjointWith` pairs, and an A-box
//! of direct type assertions:
//!
//! - transitive type assertions (instance memberships in strict superclasses),
//! - object-property assertions entailed by resource-valued restrictions,
//! - data-property assertions entailed by literal-valued restrictions,
//! - consistency violations against subclass-propagated disjointness.
//!
//! Around the core sit a streaming Turtle/N-Triples reader and N-Triples
//! writer ([`rdf`]), a naive fixpoint oracle for differential testing
//! ([`oracle`]), a deterministic subtree sampler for carving benchmark
//! subsets out of big dumps ([`sampler`]), a synthetic dataset generator
//! ([`synth`]), and a benchmark runner with timeouts and expected-count
//! verification ([`bench`]).

pub mod abox;
pub mod bench;
pub mod error;
pub mod materialize;
pub mod oracle;
pub mod rdf;
pub mod sampler;
pub mod synth;
pub mod tbox;
pub mod term;
pub mod vocab;

pub use abox::ABox;
pub use error::{Error, Result};
pub use materialize::{InferenceResult, MaterializationStats, Violation};
pub use rdf::{Format, PrefixMap, Triple};
pub use tbox::{Restriction, RestrictionKind, TBoxIndex};
pub use term::{Term, TermId, TermStore};
