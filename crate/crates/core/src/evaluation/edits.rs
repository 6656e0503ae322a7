use serde::{Deserialize, Serialize};

use crate::indexing::normalize_label;
use crate::model::{ConceptId, NarrativeQuery, Statement, Term};
use crate::ontology::ConceptOntology;

/// How a term and a concept must relate to count as the same keyword.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermConceptEdit {
    /// The term must equal one of the concept's labels after normalization.
    #[default]
    Strict,
    /// Any one concept against any one term.
    Loose,
}

/// True when `a` and `b` have the same statements and differ by at most one
/// keyword that is a concept in one query and a term in the other.
pub fn one_term_concept_edit(
    a: &NarrativeQuery,
    b: &NarrativeQuery,
    ontology: &ConceptOntology,
    mode: TermConceptEdit,
) -> bool {
    if a.statements() != b.statements() {
        return false;
    }
    if a.concepts() == b.concepts() && a.terms() == b.terms() {
        return true;
    }
    moved(a, b, ontology, mode) || moved(b, a, ontology, mode)
}

/// `x` has exactly one extra concept, `y` has exactly one extra term, and
/// everything else is shared.
fn moved(x: &NarrativeQuery, y: &NarrativeQuery, ontology: &ConceptOntology, mode: TermConceptEdit) -> bool {
    let extra_concepts: Vec<&ConceptId> = x.concepts().difference(y.concepts()).collect();
    let extra_terms: Vec<&Term> = y.terms().difference(x.terms()).collect();
    let ([concept], [term]) = (extra_concepts.as_slice(), extra_terms.as_slice()) else {
        return false;
    };
    if !y.concepts().is_subset(x.concepts()) || !x.terms().is_subset(y.terms()) {
        return false;
    }
    match mode {
        TermConceptEdit::Loose => true,
        TermConceptEdit::Strict => ontology
            .get(concept)
            .is_some_and(|c| c.labels().any(|l| normalize_label(l) == term.as_str())),
    }
}

/// True when `a` equals `b`, or when both share their concepts and their
/// statements are identical except for one predicate.
///
/// Terms may differ in the second case: the keyword of a predicate that one
/// query maps usually shows up as a term in the other.
pub fn one_predicate_edit(a: &NarrativeQuery, b: &NarrativeQuery) -> bool {
    if a.concepts() != b.concepts() {
        return false;
    }
    let only_a: Vec<&Statement> = a.statements().difference(b.statements()).collect();
    let only_b: Vec<&Statement> = b.statements().difference(a.statements()).collect();
    match (only_a.as_slice(), only_b.as_slice()) {
        ([], []) => a.terms() == b.terms(),
        ([x], [y]) => {
            // A query holds one predicate per ordered pair, so the pair must not
            // appear elsewhere in either query.
            let pair = (x.subject(), x.object());
            pair == (y.subject(), y.object())
                && pairs(a).filter(|p| *p == pair).count() == 1
                && pairs(b).filter(|p| *p == pair).count() == 1
        }
        _ => false,
    }
}

fn pairs(q: &NarrativeQuery) -> impl Iterator<Item = (&ConceptId, &ConceptId)> {
    q.statements().iter().map(|s| (s.subject(), s.object()))
}
