//! Seeded synthetic corpora shaped like an annotated biomedical collection:
//! a concept DAG with multi-word labels, a predicate tree, Zipf-ish words and
//! documents carrying a handful of concepts and statements.

use narrative_core::{
    Concept, ConceptId, ConceptOntology, Document, DocumentAnnotations, Engine, IndexOptions, Predicate,
    PredicateHierarchy, PredicateId, Statement,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub struct SyntheticSpec {
    pub concepts: usize,
    pub predicates: usize,
    pub docs: usize,
    pub vocabulary: usize,
    pub words_per_doc: usize,
    pub concepts_per_doc: usize,
    pub statements_per_doc: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            concepts: 500,
            predicates: 12,
            docs: 10_000,
            vocabulary: 2_000,
            words_per_doc: 40,
            concepts_per_doc: 6,
            statements_per_doc: 3,
            seed: 7,
        }
    }
}

pub struct Synthetic {
    pub concepts: Vec<Concept>,
    pub predicates: Vec<Predicate>,
    pub docs: Vec<(Document, DocumentAnnotations)>,
    pub vocabulary: Vec<String>,
}

fn word(i: usize) -> String {
    const SYLLABLES: [&str; 16] = [
        "ka", "lo", "mi", "ne", "su", "ta", "vo", "ri", "de", "po", "gu", "fa", "zi", "ba", "xo", "he",
    ];
    let mut w = String::new();
    let mut n = i + 16;
    while n > 0 {
        w.push_str(SYLLABLES[n % 16]);
        n /= 16;
    }
    w
}

/// Index drawn with probability roughly proportional to 1 / (rank + 1).
fn zipf(rng: &mut impl Rng, n: usize) -> usize {
    let u: f64 = rng.random();
    ((n as f64 + 1.0).powf(u) - 1.0) as usize % n
}

pub fn generate(spec: &SyntheticSpec) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vocabulary: Vec<String> = (0..spec.vocabulary).map(word).collect();

    let concepts: Vec<Concept> = (0..spec.concepts)
        .map(|i| {
            let parents = if i == 0 {
                vec![]
            } else {
                let k = rng.random_range(1..=2.min(i));
                (0..k).map(|_| cid(rng.random_range(0..i))).collect()
            };
            let words = rng.random_range(1..=3);
            let label: Vec<&str> = (0..words).map(|_| vocabulary.choose(&mut rng).unwrap().as_str()).collect();
            Concept {
                id: cid(i),
                preferred_label: label.join(" "),
                synonyms: vec![format!("{} {}", vocabulary[i % spec.vocabulary], i)],
                parents,
            }
        })
        .collect();
    let predicates: Vec<Predicate> = (0..spec.predicates)
        .map(|i| Predicate {
            id: pid(i),
            label: format!("rel{i}"),
            synonyms: vec![],
            parent: (i > 0).then(|| pid(rng.random_range(0..i))),
        })
        .collect();

    let docs = (0..spec.docs)
        .map(|d| {
            let words: Vec<&str> = (0..spec.words_per_doc)
                .map(|_| vocabulary[zipf(&mut rng, spec.vocabulary)].as_str())
                .collect();
            let mut detected: Vec<ConceptId> = (0..spec.concepts_per_doc)
                .map(|_| cid(zipf(&mut rng, spec.concepts)))
                .collect();
            detected.sort();
            detected.dedup();
            let mut statements = Vec::new();
            for _ in 0..spec.statements_per_doc {
                let (s, o) = (detected.choose(&mut rng).unwrap(), detected.choose(&mut rng).unwrap());
                if s != o {
                    let p = pid(rng.random_range(0..spec.predicates));
                    statements.push(Statement::new(s.clone(), p, o.clone()).unwrap());
                }
            }
            let doc = Document {
                doc_id: format!("doc{d:07}"),
                title: words[..words.len().min(8)].join(" "),
                abstract_text: words.join(" "),
                fulltext: None,
            };
            let ann = DocumentAnnotations::new(doc.doc_id.clone(), detected, statements).unwrap();
            (doc, ann)
        })
        .collect();
    Synthetic { concepts, predicates, docs, vocabulary }
}

impl Synthetic {
    pub fn engine(&self) -> Engine {
        Engine::build(
            ConceptOntology::new(self.concepts.clone()).unwrap(),
            PredicateHierarchy::new(self.predicates.clone()).unwrap(),
            self.docs.clone(),
            IndexOptions::default(),
        )
        .unwrap()
    }

    /// Keyword strings mixing concept labels, predicate labels and words.
    pub fn keyword_queries(&self, n: usize, seed: u64) -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let mut parts = vec![self.concepts[zipf(&mut rng, self.concepts.len())].preferred_label.clone()];
                if rng.random_bool(0.7) {
                    parts.push(self.predicates.choose(&mut rng).unwrap().label.clone());
                }
                parts.push(self.concepts[zipf(&mut rng, self.concepts.len())].preferred_label.clone());
                if rng.random_bool(0.5) {
                    parts.push(self.vocabulary[zipf(&mut rng, self.vocabulary.len())].clone());
                }
                parts.join(" ")
            })
            .collect()
    }
}

fn cid(i: usize) -> ConceptId {
    ConceptId::new(format!("C{i:05}")).unwrap()
}

fn pid(i: usize) -> PredicateId {
    PredicateId::new(format!("P{i:02}")).unwrap()
}
