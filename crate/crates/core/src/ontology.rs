//! Concept and predicate hierarchies with precomputed transitive closures.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Concept, ConceptId, Predicate, PredicateId};

/// Concepts arranged in a subconcept DAG.
#[derive(Clone, Debug, Default)]
pub struct ConceptOntology {
    concepts: BTreeMap<ConceptId, Concept>,
    children: BTreeMap<ConceptId, BTreeSet<ConceptId>>,
    ancestors: BTreeMap<ConceptId, BTreeSet<ConceptId>>,
}

impl ConceptOntology {
    /// Validates ids, labels, parent references and acyclicity, then closes
    /// the parent relation eagerly.
    pub fn new(concepts: impl IntoIterator<Item = Concept>) -> Result<Self> {
        let mut by_id = BTreeMap::new();
        for concept in concepts {
            if concept.preferred_label.trim().is_empty() {
                return Err(Error::Invalid(format!(
                    "concept `{}` has an empty preferred label",
                    concept.id
                )));
            }
            if concept.parents.contains(&concept.id) {
                return Err(Error::Cycle(concept.id.to_string()));
            }
            if by_id.contains_key(&concept.id) {
                return Err(Error::Duplicate(concept.id.to_string()));
            }
            by_id.insert(concept.id.clone(), concept);
        }

        let mut children: BTreeMap<ConceptId, BTreeSet<ConceptId>> = BTreeMap::new();
        for concept in by_id.values() {
            for parent in &concept.parents {
                if !by_id.contains_key(parent) {
                    return Err(Error::UnresolvedParent {
                        child: concept.id.to_string(),
                        parent: parent.to_string(),
                    });
                }
                children
                    .entry(parent.clone())
                    .or_default()
                    .insert(concept.id.clone());
            }
        }

        let ancestors = close_dag(&by_id)?;
        Ok(ConceptOntology {
            concepts: by_id,
            children,
            ancestors,
        })
    }

    pub fn get(&self, id: &ConceptId) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn contains(&self, id: &ConceptId) -> bool {
        self.concepts.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn children(&self, id: &ConceptId) -> impl Iterator<Item = &ConceptId> {
        self.children.get(id).into_iter().flatten()
    }

    /// Concepts without parents.
    pub fn roots(&self) -> impl Iterator<Item = &ConceptId> {
        self.concepts
            .values()
            .filter(|c| c.parents.is_empty())
            .map(|c| &c.id)
    }

    /// All transitive super-concepts of `id`, excluding `id` itself.
    pub fn concept_ancestors(&self, id: &ConceptId) -> Result<&BTreeSet<ConceptId>> {
        self.ancestors
            .get(id)
            .ok_or_else(|| Error::UnknownConcept(id.to_string()))
    }

    pub fn preferred_label(&self, id: &ConceptId) -> Option<&str> {
        self.concepts.get(id).map(|c| c.preferred_label.as_str())
    }
}

/// Memoized DFS over the parent links; reports a member of the first cycle found.
fn close_dag(concepts: &BTreeMap<ConceptId, Concept>) -> Result<BTreeMap<ConceptId, BTreeSet<ConceptId>>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }

    fn visit(
        id: &ConceptId,
        concepts: &BTreeMap<ConceptId, Concept>,
        marks: &mut BTreeMap<ConceptId, Mark>,
        closed: &mut BTreeMap<ConceptId, BTreeSet<ConceptId>>,
    ) -> Result<()> {
        match marks.get(id) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => return Err(Error::Cycle(id.to_string())),
            None => {}
        }
        marks.insert(id.clone(), Mark::Active);
        let mut set = BTreeSet::new();
        for parent in &concepts[id].parents {
            visit(parent, concepts, marks, closed)?;
            set.insert(parent.clone());
            set.extend(closed[parent].iter().cloned());
        }
        marks.insert(id.clone(), Mark::Done);
        closed.insert(id.clone(), set);
        Ok(())
    }

    let mut marks = BTreeMap::new();
    let mut closed = BTreeMap::new();
    for id in concepts.keys() {
        visit(id, concepts, &mut marks, &mut closed)?;
    }
    Ok(closed)
}

/// Predicates arranged in a specialization tree under a single most general
/// predicate. A flat predicate list (no parent links) is hierarchy-less.
#[derive(Clone, Debug, Default)]
pub struct PredicateHierarchy {
    predicates: BTreeMap<PredicateId, Predicate>,
    root: Option<PredicateId>,
    generalizations: BTreeMap<PredicateId, Vec<PredicateId>>,
}

impl PredicateHierarchy {
    pub fn new(predicates: impl IntoIterator<Item = Predicate>) -> Result<Self> {
        let mut by_id = BTreeMap::new();
        for predicate in predicates {
            if predicate.label.trim().is_empty() {
                return Err(Error::Invalid(format!(
                    "predicate `{}` has an empty label",
                    predicate.id
                )));
            }
            if by_id.contains_key(&predicate.id) {
                return Err(Error::Duplicate(predicate.id.to_string()));
            }
            by_id.insert(predicate.id.clone(), predicate);
        }

        for predicate in by_id.values() {
            if let Some(parent) = &predicate.parent {
                if !by_id.contains_key(parent) {
                    return Err(Error::UnknownPredicate(parent.to_string()));
                }
            }
        }

        // Walk each parent chain; a chain longer than the predicate count loops.
        let mut generalizations = BTreeMap::new();
        for id in by_id.keys() {
            let mut chain = Vec::new();
            let mut cursor = by_id[id].parent.as_ref();
            while let Some(parent) = cursor {
                if parent == id || chain.len() > by_id.len() {
                    return Err(Error::Cycle(id.to_string()));
                }
                chain.push(parent.clone());
                cursor = by_id[parent].parent.as_ref();
            }
            generalizations.insert(id.clone(), chain);
        }

        let has_links = by_id.values().any(|p| p.parent.is_some());
        let root = if has_links {
            let roots: Vec<&PredicateId> = by_id
                .values()
                .filter(|p| p.parent.is_none())
                .map(|p| &p.id)
                .collect();
            if roots.len() != 1 {
                return Err(Error::MultipleRoots(
                    roots.iter().map(|r| r.to_string()).collect(),
                ));
            }
            Some(roots[0].clone())
        } else {
            None
        };

        Ok(PredicateHierarchy {
            predicates: by_id,
            root,
            generalizations,
        })
    }

    /// The most general predicate, when the predicates form a hierarchy.
    pub fn root(&self) -> Option<&PredicateId> {
        self.root.as_ref()
    }

    pub fn has_hierarchy(&self) -> bool {
        self.root.is_some()
    }

    pub fn get(&self, id: &PredicateId) -> Option<&Predicate> {
        self.predicates.get(id)
    }

    pub fn contains(&self, id: &PredicateId) -> bool {
        self.predicates.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Predicate> {
        self.predicates.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &PredicateId> {
        self.predicates.keys()
    }

    /// Transitive parents of `id`, nearest first, excluding `id`.
    pub fn predicate_generalizations(&self, id: &PredicateId) -> Result<&[PredicateId]> {
        self.generalizations
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownPredicate(id.to_string()))
    }

    /// Length of the parent chain from `id` to the root; the root has depth 0.
    pub fn specificity_depth(&self, id: &PredicateId) -> Result<usize> {
        self.predicate_generalizations(id).map(<[PredicateId]>::len)
    }

    pub fn is_root(&self, id: &PredicateId) -> bool {
        self.root.as_ref() == Some(id)
    }
}
