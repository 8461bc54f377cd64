//! Immutable terminology index: subclass graph, `owl:hasValue`
//! restrictions, disjointness pairs, and precomputed superclass closures.
//!
//! Closures are per-class sorted id arrays computed bottom-up in reverse
//! topological order after collapsing strongly connected components, so a
//! cyclic subclass graph (which a heuristically built hierarchy cannot be
//! assumed to avoid) gets the standard equivalence-group semantics: every
//! member's closure contains the other members and the group's joint
//! superclasses.

use crate::error::{Error, Result};
use crate::rdf::Triple;
use crate::term::{Term, TermId, TermStore};
use crate::vocab::VocabIds;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RestrictionKind {
    /// `owl:hasValue` names a resource; materializes object-property assertions.
    Object,
    /// `owl:hasValue` names a literal; materializes data-property assertions.
    Data,
}

/// A well-formed `owl:hasValue` restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Restriction {
    /// The node carrying the `owl:Restriction` declaration.
    pub anchor: TermId,
    pub property: TermId,
    pub value: TermId,
    pub kind: RestrictionKind,
}

/// Normalized unordered pair of class ids.
pub fn unordered(a: TermId, b: TermId) -> (TermId, TermId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug)]
pub struct TBoxIndex {
    vocab: VocabIds,
    named_classes: HashSet<TermId>,
    /// Direct named superclasses, sorted and deduplicated.
    super_edges: HashMap<TermId, Vec<TermId>>,
    /// Reverse of `super_edges`: direct named subclasses.
    sub_edges: HashMap<TermId, Vec<TermId>>,
    restrictions: Vec<Restriction>,
    /// Class -> indexes into `restrictions`, direct attachments only.
    restrictions_of: HashMap<TermId, Vec<u32>>,
    anchors: HashSet<TermId>,
    disjoint_pairs: HashSet<(TermId, TermId)>,
    object_properties: HashSet<TermId>,
    datatype_properties: HashSet<TermId>,
    /// Strict named superclass closure, shared per SCC.
    closures: HashMap<TermId, Arc<[TermId]>>,
}

impl TBoxIndex {
    pub fn vocab(&self) -> &VocabIds {
        &self.vocab
    }

    pub fn named_classes(&self) -> &HashSet<TermId> {
        &self.named_classes
    }

    pub fn n_classes(&self) -> usize {
        self.named_classes.len()
    }

    pub fn is_named_class(&self, id: TermId) -> bool {
        self.named_classes.contains(&id)
    }

    pub fn is_restriction_anchor(&self, id: TermId) -> bool {
        self.anchors.contains(&id)
    }

    pub fn restrictions(&self) -> &[Restriction] {
        &self.restrictions
    }

    pub fn n_restrictions(&self) -> usize {
        self.restrictions.len()
    }

    /// Restrictions attached directly to `class` (no inheritance).
    pub fn direct_restrictions(&self, class: TermId) -> impl Iterator<Item = &Restriction> {
        self.restrictions_of
            .get(&class)
            .into_iter()
            .flatten()
            .map(|&i| &self.restrictions[i as usize])
    }

    /// Asserted disjointness pairs, normalized.
    pub fn disjoint_pairs(&self) -> &HashSet<(TermId, TermId)> {
        &self.disjoint_pairs
    }

    pub fn direct_superclasses(&self, class: TermId) -> &[TermId] {
        self.super_edges.get(&class).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn direct_subclasses(&self, class: TermId) -> &[TermId] {
        self.sub_edges.get(&class).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The set of named classes strictly above `class`, including
    /// `owl:Thing` when reachable via an explicit edge. A class unseen by
    /// the build has an empty closure. The slice is sorted by id.
    pub fn superclass_closure(&self, class: TermId) -> &[TermId] {
        self.closures.get(&class).map(|c| &c[..]).unwrap_or(&[])
    }

    /// Restrictions attached to `class` or to any member of its superclass
    /// closure, deduplicated by `(property, value)` and sorted by it.
    pub fn effective_restrictions(&self, class: TermId) -> Vec<Restriction> {
        let mut seen: HashSet<(TermId, TermId)> = HashSet::new();
        let mut out = Vec::new();
        let mut take = |r: &Restriction| {
            if seen.insert((r.property, r.value)) {
                out.push(*r);
            }
        };
        for r in self.direct_restrictions(class) {
            take(r);
        }
        for &sup in self.superclass_closure(class) {
            for r in self.direct_restrictions(sup) {
                take(r);
            }
        }
        out.sort_by_key(|r| (r.property, r.value));
        out
    }

    /// All classes reachable downward from `class` (strict descendants).
    pub fn descendants(&self, class: TermId) -> HashSet<TermId> {
        let mut seen = HashSet::new();
        let mut stack: Vec<TermId> = self.direct_subclasses(class).to_vec();
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend_from_slice(self.direct_subclasses(c));
            }
        }
        seen
    }

    /// Closes the asserted disjointness pairs under subclassing:
    /// `(C, D)` disjoint makes every pairing of `{C} U subclasses(C)` with
    /// `{D} U subclasses(D)` disjoint.
    pub fn propagate_disjointness(&self) -> HashSet<(TermId, TermId)> {
        let mut out = HashSet::new();
        for &(a, b) in &self.disjoint_pairs {
            let mut left: Vec<TermId> = self.descendants(a).into_iter().collect();
            left.push(a);
            let mut right: Vec<TermId> = self.descendants(b).into_iter().collect();
            right.push(b);
            for &l in &left {
                for &r in &right {
                    out.insert(unordered(l, r));
                }
            }
        }
        out
    }

    /// Closure sizes per named class as CSV (`class,closure_size`), for
    /// debugging hierarchy shape. Rows sorted by IRI.
    pub fn write_closure_sizes_csv<W: std::io::Write>(
        &self,
        store: &TermStore,
        mut out: W,
    ) -> Result<()> {
        let mut rows: Vec<(&str, usize)> = self
            .named_classes
            .iter()
            .map(|&c| {
                let iri = match store.resolve(c) {
                    Term::Iri(s) => s.as_str(),
                    _ => "",
                };
                (iri, self.superclass_closure(c).len())
            })
            .collect();
        rows.sort();
        writeln!(out, "class,closure_size")?;
        for (iri, n) in rows {
            writeln!(out, "{iri},{n}")?;
        }
        Ok(())
    }
}

/// Incremental T-box builder; feed triples in any order, then `finish`.
pub struct TBoxBuilder {
    vocab: VocabIds,
    declared_classes: HashSet<TermId>,
    declared_anchors: HashSet<TermId>,
    on_property: HashMap<TermId, TermId>,
    has_value: HashMap<TermId, TermId>,
    raw_sub_edges: Vec<(TermId, TermId)>,
    raw_disjoint: Vec<(TermId, TermId)>,
    object_properties: HashSet<TermId>,
    datatype_properties: HashSet<TermId>,
}

fn display_term(store: &TermStore, id: TermId) -> String {
    match store.resolve(id) {
        Term::Iri(iri) => format!("<{iri}>"),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal { lexical, .. } => format!("{lexical:?}"),
    }
}

impl TBoxBuilder {
    pub fn new(store: &mut TermStore) -> Self {
        TBoxBuilder {
            vocab: VocabIds::intern(store),
            declared_classes: HashSet::new(),
            declared_anchors: HashSet::new(),
            on_property: HashMap::new(),
            has_value: HashMap::new(),
            raw_sub_edges: Vec::new(),
            raw_disjoint: Vec::new(),
            object_properties: HashSet::new(),
            datatype_properties: HashSet::new(),
        }
    }

    pub fn vocab(&self) -> &VocabIds {
        &self.vocab
    }

    pub fn add(&mut self, t: Triple, store: &TermStore) -> Result<()> {
        let v = &self.vocab;
        if t.predicate == v.rdf_type {
            if t.object == v.owl_class {
                if store.resolve(t.subject).is_iri() {
                    self.declared_classes.insert(t.subject);
                }
            } else if t.object == v.owl_restriction {
                self.declared_anchors.insert(t.subject);
            } else if t.object == v.owl_object_property {
                self.object_properties.insert(t.subject);
            } else if t.object == v.owl_datatype_property {
                self.datatype_properties.insert(t.subject);
            }
            // instance typings (incl. owl:NamedIndividual) belong to the A-box
        } else if t.predicate == v.rdfs_subclass_of {
            if store.resolve(t.subject).is_literal() {
                return Err(Error::LiteralInSchema(
                    display_term(store, t.subject),
                    "a subclass subject",
                ));
            }
            if store.resolve(t.object).is_literal() {
                return Err(Error::LiteralInSchema(
                    display_term(store, t.object),
                    "a superclass",
                ));
            }
            self.raw_sub_edges.push((t.subject, t.object));
        } else if t.predicate == v.owl_disjoint_with {
            if store.resolve(t.subject).is_literal() || store.resolve(t.object).is_literal() {
                return Err(Error::LiteralInSchema(
                    display_term(store, t.subject),
                    "a disjointness operand",
                ));
            }
            self.raw_disjoint.push((t.subject, t.object));
        } else if t.predicate == v.owl_on_property {
            match self.on_property.insert(t.subject, t.object) {
                Some(prev) if prev != t.object => {
                    return Err(Error::ConflictingRestriction {
                        anchor: display_term(store, t.subject),
                        what: "owl:onProperty".into(),
                    })
                }
                _ => {}
            }
        } else if t.predicate == v.owl_has_value {
            match self.has_value.insert(t.subject, t.object) {
                Some(prev) if prev != t.object => {
                    return Err(Error::ConflictingRestriction {
                        anchor: display_term(store, t.subject),
                        what: "owl:hasValue".into(),
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn finish(self, store: &TermStore) -> Result<TBoxIndex> {
        // Restrictions: every declared anchor must carry both parts.
        let mut anchor_ids: Vec<TermId> = self.declared_anchors.iter().copied().collect();
        anchor_ids.sort();
        let mut restrictions = Vec::with_capacity(anchor_ids.len());
        let mut restriction_index: HashMap<TermId, u32> = HashMap::new();
        for anchor in anchor_ids {
            let property = *self.on_property.get(&anchor).ok_or_else(|| {
                Error::DanglingRestriction {
                    anchor: display_term(store, anchor),
                    missing: "owl:onProperty".into(),
                }
            })?;
            let value = *self.has_value.get(&anchor).ok_or_else(|| {
                Error::DanglingRestriction {
                    anchor: display_term(store, anchor),
                    missing: "owl:hasValue".into(),
                }
            })?;
            let kind = if store.resolve(value).is_literal() {
                RestrictionKind::Data
            } else {
                RestrictionKind::Object
            };
            restriction_index.insert(anchor, restrictions.len() as u32);
            restrictions.push(Restriction {
                anchor,
                property,
                value,
                kind,
            });
        }

        let mut named_classes: HashSet<TermId> = self
            .declared_classes
            .iter()
            .copied()
            .filter(|c| !self.declared_anchors.contains(c))
            .collect();

        let mut super_edges: HashMap<TermId, Vec<TermId>> = HashMap::new();
        let mut restrictions_of: HashMap<TermId, Vec<u32>> = HashMap::new();
        for &(sub, sup) in &self.raw_sub_edges {
            if self.declared_anchors.contains(&sub) || store.resolve(sub).is_blank() {
                log::warn!(
                    "ignoring subclass edge with anonymous subject {}",
                    display_term(store, sub)
                );
                continue;
            }
            named_classes.insert(sub);
            if let Some(&idx) = restriction_index.get(&sup) {
                restrictions_of.entry(sub).or_default().push(idx);
            } else if store.resolve(sup).is_blank() {
                return Err(Error::UndeclaredAnchor {
                    anchor: display_term(store, sup),
                });
            } else {
                super_edges.entry(sub).or_default().push(sup);
            }
        }
        for v in super_edges.values_mut() {
            v.sort();
            v.dedup();
        }
        for v in restrictions_of.values_mut() {
            v.sort();
            v.dedup();
        }

        let mut sub_edges: HashMap<TermId, Vec<TermId>> = HashMap::new();
        for (&sub, sups) in &super_edges {
            for &sup in sups {
                sub_edges.entry(sup).or_default().push(sub);
            }
        }
        for v in sub_edges.values_mut() {
            v.sort();
            v.dedup();
        }

        let mut disjoint_pairs = HashSet::new();
        for &(a, b) in &self.raw_disjoint {
            if store.resolve(a).is_blank() || store.resolve(b).is_blank() {
                log::warn!(
                    "ignoring disjointness between anonymous classes {} / {}",
                    display_term(store, a),
                    display_term(store, b)
                );
                continue;
            }
            disjoint_pairs.insert(unordered(a, b));
        }

        let closures = compute_closures(&super_edges);

        Ok(TBoxIndex {
            vocab: self.vocab,
            named_classes,
            super_edges,
            sub_edges,
            restrictions,
            restrictions_of,
            anchors: self.declared_anchors,
            disjoint_pairs,
            object_properties: self.object_properties,
            datatype_properties: self.datatype_properties,
            closures,
        })
    }
}

impl TBoxIndex {
    pub fn object_properties(&self) -> &HashSet<TermId> {
        &self.object_properties
    }

    pub fn datatype_properties(&self) -> &HashSet<TermId> {
        &self.datatype_properties
    }
}

/// Builds the index from an in-memory triple slice.
pub fn build_tbox(triples: &[Triple], store: &mut TermStore) -> Result<TBoxIndex> {
    let mut b = TBoxBuilder::new(store);
    for &t in triples {
        b.add(t, store)?;
    }
    b.finish(store)
}

/// Tarjan SCC over the superclass graph, iterative to survive
/// million-node hierarchies, followed by a bottom-up closure pass.
/// Tarjan emits components in reverse topological order, so every
/// component's successors are finished before it is.
fn compute_closures(super_edges: &HashMap<TermId, Vec<TermId>>) -> HashMap<TermId, Arc<[TermId]>> {
    // Dense node numbering over everything in the graph.
    let mut node_ids: Vec<TermId> = Vec::new();
    let mut node_of: HashMap<TermId, u32> = HashMap::new();
    let add_node = |id: TermId, node_ids: &mut Vec<TermId>, node_of: &mut HashMap<TermId, u32>| {
        *node_of.entry(id).or_insert_with(|| {
            node_ids.push(id);
            (node_ids.len() - 1) as u32
        })
    };
    let mut sources: Vec<TermId> = super_edges.keys().copied().collect();
    sources.sort();
    for &src in &sources {
        add_node(src, &mut node_ids, &mut node_of);
        for &dst in &super_edges[&src] {
            add_node(dst, &mut node_ids, &mut node_of);
        }
    }
    let n = node_ids.len();
    let adj: Vec<&[TermId]> = node_ids
        .iter()
        .map(|id| super_edges.get(id).map(Vec::as_slice).unwrap_or(&[]))
        .collect();

    const UNVISITED: u32 = u32::MAX;
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut scc_of = vec![UNVISITED; n];
    let mut sccs: Vec<Vec<u32>> = Vec::new();

    // (node, next edge offset)
    let mut call: Vec<(u32, usize)> = Vec::new();
    for start in 0..n as u32 {
        if index[start as usize] != UNVISITED {
            continue;
        }
        call.push((start, 0));
        index[start as usize] = next_index;
        lowlink[start as usize] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start as usize] = true;
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            let vu = v as usize;
            if *ei < adj[vu].len() {
                let w = node_of[&adj[vu][*ei]];
                *ei += 1;
                let wu = w as usize;
                if index[wu] == UNVISITED {
                    index[wu] = next_index;
                    lowlink[wu] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[wu] = true;
                    call.push((w, 0));
                } else if on_stack[wu] {
                    lowlink[vu] = lowlink[vu].min(index[wu]);
                }
            } else {
                call.pop();
                if let Some(&mut (parent, _)) = call.last_mut() {
                    let pu = parent as usize;
                    lowlink[pu] = lowlink[pu].min(lowlink[vu]);
                }
                if lowlink[vu] == index[vu] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        scc_of[w as usize] = sccs.len() as u32;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    sccs.push(comp);
                }
            }
        }
    }

    // Bottom-up closures in Tarjan emission order.
    let mut scc_closure: Vec<Arc<[TermId]>> = Vec::with_capacity(sccs.len());
    for (scc_idx, comp) in sccs.iter().enumerate() {
        let mut set: Vec<TermId> = Vec::new();
        let cyclic = comp.len() > 1
            || comp.iter().any(|&v| {
                adj[v as usize]
                    .iter()
                    .any(|t| node_of[t] == v)
            });
        if cyclic {
            set.extend(comp.iter().map(|&v| node_ids[v as usize]));
        }
        for &v in comp {
            for t in adj[v as usize] {
                let w = node_of[t];
                let w_scc = scc_of[w as usize] as usize;
                if w_scc != scc_idx {
                    debug_assert!(w_scc < scc_idx, "successor SCC not yet emitted");
                    set.push(node_ids[w as usize]);
                    set.extend_from_slice(&scc_closure[w_scc]);
                }
            }
        }
        set.sort();
        set.dedup();
        scc_closure.push(set.into());
    }

    let mut closures = HashMap::with_capacity(n);
    for v in 0..n {
        let arc = scc_closure[scc_of[v] as usize].clone();
        if !arc.is_empty() {
            closures.insert(node_ids[v], arc);
        }
    }
    closures
}
