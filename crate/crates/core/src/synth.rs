//! Seeded synthetic ontology generation: small randomized ontologies for
//! differential testing against the fixpoint oracle, and a streaming
//! writer for multi-million-triple datasets used by scalability and
//! determinism runs. Identical seeds produce identical output.

use crate::error::Result;
use crate::rdf::Triple;
use crate::term::{Term, TermId, TermStore};
use crate::vocab;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;

const NS_CLASS: &str = "http://example.org/onto/";
const NS_RES: &str = "http://example.org/resource/";

#[derive(Debug, Clone)]
pub struct SmallOntologyParams {
    pub n_classes: usize,
    pub n_instances: usize,
    pub n_restrictions: usize,
    pub cycle_probability: f64,
    pub seed: u64,
}

impl Default for SmallOntologyParams {
    fn default() -> Self {
        SmallOntologyParams {
            n_classes: 100,
            n_instances: 50,
            n_restrictions: 20,
            cycle_probability: 0.1,
            seed: 0,
        }
    }
}

/// Generates a randomized ontology as triples: a mostly-DAG subclass
/// graph with occasional cycles, restriction anchors (some sharing a
/// `(property, value)` pair, some attached to several classes), property
/// and class declarations with deliberate gaps, and a type-only A-box.
pub fn small_ontology(params: &SmallOntologyParams, store: &mut TermStore) -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut triples = Vec::new();

    let rdf_type = store.intern(Term::iri(vocab::RDF_TYPE)).unwrap();
    let subclass_of = store.intern(Term::iri(vocab::RDFS_SUBCLASS_OF)).unwrap();
    let owl_class = store.intern(Term::iri(vocab::OWL_CLASS)).unwrap();
    let owl_thing = store.intern(Term::iri(vocab::OWL_THING)).unwrap();
    let owl_restriction = store.intern(Term::iri(vocab::OWL_RESTRICTION)).unwrap();
    let on_property = store.intern(Term::iri(vocab::OWL_ON_PROPERTY)).unwrap();
    let has_value = store.intern(Term::iri(vocab::OWL_HAS_VALUE)).unwrap();
    let named_individual = store.intern(Term::iri(vocab::OWL_NAMED_INDIVIDUAL)).unwrap();
    let object_property = store.intern(Term::iri(vocab::OWL_OBJECT_PROPERTY)).unwrap();
    let datatype_property = store.intern(Term::iri(vocab::OWL_DATATYPE_PROPERTY)).unwrap();

    let n = params.n_classes.max(1);
    let classes: Vec<TermId> = (0..n)
        .map(|i| store.intern(Term::iri(format!("{NS_CLASS}C{i}"))).unwrap())
        .collect();
    for &c in &classes {
        if rng.gen_bool(0.9) {
            triples.push(Triple::new(c, rdf_type, owl_class));
        }
    }
    // DAG edges point to lower indexes; occasional back edges close cycles
    for i in 1..n {
        for _ in 0..rng.gen_range(0..=2) {
            let parent = rng.gen_range(0..i);
            triples.push(Triple::new(classes[i], subclass_of, classes[parent]));
        }
        if rng.gen_bool(params.cycle_probability) {
            let j = rng.gen_range(i..n);
            triples.push(Triple::new(classes[rng.gen_range(0..i)], subclass_of, classes[j]));
        }
    }
    if n > 1 && rng.gen_bool(0.5) {
        triples.push(Triple::new(classes[0], subclass_of, owl_thing));
    }

    let n_props = (params.n_restrictions / 2).max(1);
    let obj_props: Vec<TermId> = (0..n_props)
        .map(|i| store.intern(Term::iri(format!("{NS_CLASS}op{i}"))).unwrap())
        .collect();
    let data_props: Vec<TermId> = (0..n_props)
        .map(|i| store.intern(Term::iri(format!("{NS_CLASS}dp{i}"))).unwrap())
        .collect();
    for &p in &obj_props {
        if rng.gen_bool(0.8) {
            triples.push(Triple::new(p, rdf_type, object_property));
        }
    }
    for &p in &data_props {
        if rng.gen_bool(0.8) {
            triples.push(Triple::new(p, rdf_type, datatype_property));
        }
    }
    let values: Vec<TermId> = (0..n_props.max(4))
        .map(|i| store.intern(Term::iri(format!("{NS_RES}V{i}"))).unwrap())
        .collect();
    for &v in &values {
        if rng.gen_bool(0.5) {
            triples.push(Triple::new(v, rdf_type, named_individual));
        }
    }

    for k in 0..params.n_restrictions {
        let anchor = store.intern(Term::blank(format!("s:r{k}"))).unwrap();
        triples.push(Triple::new(anchor, rdf_type, owl_restriction));
        // half resource-valued, half literal-valued; value pool is small
        // enough that distinct anchors repeat (property, value) pairs
        let (p, v) = if k % 2 == 0 {
            (
                obj_props[rng.gen_range(0..obj_props.len())],
                values[rng.gen_range(0..values.len())],
            )
        } else {
            let lit = match rng.gen_range(0..3) {
                0 => Term::typed_literal(rng.gen_range(1800..2100).to_string(), vocab::XSD_INTEGER),
                1 => Term::literal(format!("tag{}", rng.gen_range(0..6))),
                _ => Term::lang_literal(format!("namn{}", rng.gen_range(0..6)), "sv"),
            };
            (
                data_props[rng.gen_range(0..data_props.len())],
                store.intern(lit).unwrap(),
            )
        };
        triples.push(Triple::new(anchor, on_property, p));
        triples.push(Triple::new(anchor, has_value, v));
        // attach to one or two classes
        for _ in 0..rng.gen_range(1..=2) {
            let c = classes[rng.gen_range(0..n)];
            triples.push(Triple::new(c, subclass_of, anchor));
        }
    }

    for m in 0..params.n_instances {
        let inst = store.intern(Term::iri(format!("{NS_RES}I{m}"))).unwrap();
        if rng.gen_bool(0.8) {
            triples.push(Triple::new(inst, rdf_type, named_individual));
        }
        for _ in 0..rng.gen_range(0..=3) {
            let c = if rng.gen_bool(0.05) {
                // exercise typing by an undeclared class
                store
                    .intern(Term::iri(format!("{NS_CLASS}Undeclared{}", rng.gen_range(0..4))))
                    .unwrap()
            } else {
                classes[rng.gen_range(0..n)]
            };
            triples.push(Triple::new(inst, rdf_type, c));
        }
    }
    triples
}

/// Shape parameters for a streamed large dataset.
#[derive(Debug, Clone)]
pub struct ScaledProfile {
    pub n_classes: usize,
    pub n_restrictions: usize,
    pub n_instances: usize,
    pub n_properties: usize,
    pub seed: u64,
}

impl ScaledProfile {
    /// Roughly the shape of a 10^5-class benchmark subset: a few million
    /// triples, ~2M instances, ~12k restrictions.
    pub fn large() -> Self {
        ScaledProfile {
            n_classes: 100_000,
            n_restrictions: 12_000,
            n_instances: 1_970_000,
            n_properties: 300,
            seed: 42,
        }
    }

    /// A medium dataset for determinism and round-trip runs.
    pub fn medium() -> Self {
        ScaledProfile {
            n_classes: 2_000,
            n_restrictions: 300,
            n_instances: 20_000,
            n_properties: 40,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScaledSummary {
    pub n_triples: u64,
    pub n_classes: usize,
    pub n_instances: usize,
}

/// Streams a scaled N-Triples dataset to `out` without materializing it:
/// a forest-shaped class hierarchy with cross edges, declarations for
/// every class, restriction anchors attached to random classes, and a
/// type-only A-box whose instances are typed by deep classes.
pub fn write_scaled_dataset(out: &mut dyn Write, profile: &ScaledProfile) -> Result<ScaledSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let mut w = std::io::BufWriter::with_capacity(1 << 20, out);
    let mut n_triples = 0u64;

    macro_rules! line {
        ($($arg:tt)*) => {{
            writeln!(w, $($arg)*)?;
            n_triples += 1;
        }};
    }

    let n = profile.n_classes.max(2);
    // class c gets a primary parent among earlier classes, biased to form
    // trees roughly 6 levels deep, plus an occasional cross parent
    line!("<{NS_CLASS}C0> <{}> <{}> .", vocab::RDF_TYPE, vocab::OWL_CLASS);
    line!("<{NS_CLASS}C0> <{}> <{}> .", vocab::RDFS_SUBCLASS_OF, vocab::OWL_THING);
    for c in 1..n {
        line!("<{NS_CLASS}C{c}> <{}> <{}> .", vocab::RDF_TYPE, vocab::OWL_CLASS);
        let parent = if c < 16 { 0 } else { rng.gen_range(c / 16..c) };
        line!(
            "<{NS_CLASS}C{c}> <{}> <{NS_CLASS}C{parent}> .",
            vocab::RDFS_SUBCLASS_OF
        );
        if rng.gen_bool(0.3) {
            let cross = rng.gen_range(0..c);
            line!(
                "<{NS_CLASS}C{c}> <{}> <{NS_CLASS}C{cross}> .",
                vocab::RDFS_SUBCLASS_OF
            );
        }
    }

    let n_props = profile.n_properties.max(2);
    for p in 0..n_props {
        let kind = if p % 2 == 0 {
            vocab::OWL_OBJECT_PROPERTY
        } else {
            vocab::OWL_DATATYPE_PROPERTY
        };
        line!("<{NS_CLASS}p{p}> <{}> <{kind}> .", vocab::RDF_TYPE);
    }

    let n_values = 512.min(profile.n_instances.max(1));
    for v in 0..n_values {
        line!(
            "<{NS_RES}V{v}> <{}> <{}> .",
            vocab::RDF_TYPE,
            vocab::OWL_NAMED_INDIVIDUAL
        );
    }

    for r in 0..profile.n_restrictions {
        line!("_:r{r} <{}> <{}> .", vocab::RDF_TYPE, vocab::OWL_RESTRICTION);
        if r % 2 == 0 {
            let p = rng.gen_range(0..n_props / 2) * 2;
            let v = rng.gen_range(0..n_values);
            line!("_:r{r} <{}> <{NS_CLASS}p{p}> .", vocab::OWL_ON_PROPERTY);
            line!("_:r{r} <{}> <{NS_RES}V{v}> .", vocab::OWL_HAS_VALUE);
        } else {
            let p = rng.gen_range(0..n_props / 2) * 2 + 1;
            let year = rng.gen_range(1800..2100);
            line!("_:r{r} <{}> <{NS_CLASS}p{p}> .", vocab::OWL_ON_PROPERTY);
            line!(
                "_:r{r} <{}> \"{year}\"^^<{}> .",
                vocab::OWL_HAS_VALUE,
                vocab::XSD_INTEGER
            );
        }
        let c = rng.gen_range(0..n);
        line!("<{NS_CLASS}C{c}> <{}> _:r{r} .", vocab::RDFS_SUBCLASS_OF);
    }

    for i in 0..profile.n_instances {
        line!(
            "<{NS_RES}I{i}> <{}> <{}> .",
            vocab::RDF_TYPE,
            vocab::OWL_NAMED_INDIVIDUAL
        );
        // typed by classes from the deeper half of the hierarchy
        let c = rng.gen_range(n / 2..n);
        line!("<{NS_RES}I{i}> <{}> <{NS_CLASS}C{c}> .", vocab::RDF_TYPE);
        if rng.gen_bool(0.25) {
            let c2 = rng.gen_range(n / 2..n);
            line!("<{NS_RES}I{i}> <{}> <{NS_CLASS}C{c2}> .", vocab::RDF_TYPE);
        }
    }
    w.flush()?;
    Ok(ScaledSummary {
        n_triples,
        n_classes: n,
        n_instances: profile.n_instances,
    })
}

/// Writes a scaled dataset to a file path.
pub fn write_scaled_dataset_file(path: &Path, profile: &ScaledProfile) -> Result<ScaledSummary> {
    let mut f = std::fs::File::create(path).map_err(|e| crate::error::Error::from_io(path, e))?;
    write_scaled_dataset(&mut f, profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ontology_is_seed_deterministic() {
        let params = SmallOntologyParams {
            seed: 9,
            ..Default::default()
        };
        let mut s1 = TermStore::new();
        let t1 = small_ontology(&params, &mut s1);
        let mut s2 = TermStore::new();
        let t2 = small_ontology(&params, &mut s2);
        assert_eq!(t1, t2);
        assert!(!t1.is_empty());
    }

    #[test]
    fn scaled_writer_is_seed_deterministic() {
        let profile = ScaledProfile {
            n_classes: 50,
            n_restrictions: 10,
            n_instances: 100,
            n_properties: 6,
            seed: 3,
        };
        let mut a = Vec::new();
        let sum_a = write_scaled_dataset(&mut a, &profile).unwrap();
        let mut b = Vec::new();
        let sum_b = write_scaled_dataset(&mut b, &profile).unwrap();
        assert_eq!(a, b);
        assert_eq!(sum_a.n_triples, sum_b.n_triples);
        // and it parses as N-Triples to the advertised count
        let text = String::from_utf8(a).unwrap();
        let mut store = TermStore::new();
        let (triples, _) =
            crate::rdf::parse_str(&text, crate::rdf::Format::NTriples, &mut store, 0).unwrap();
        assert_eq!(triples.len() as u64, sum_a.n_triples);
    }
}
