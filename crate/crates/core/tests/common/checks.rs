//! Property checks shared by the property tests and the acceptance run.
//! Each returns a description of the first violation.

use std::collections::{BTreeMap, BTreeSet};

use narrative_core::indexing::IndexOptions;
use narrative_core::strategies::{select_mixed, select_most_supported, select_specific};
use narrative_core::translation::tokenize;
use narrative_core::{
    canonical_serialize, Concept, ConceptId, Document, DocumentAnnotations, Engine, NarrativeQuery, Predicate,
    PredicateId, Statement, TranslationOptions,
};
use rand::seq::IndexedRandom;
use rand::Rng;

use super::{reachable, Oracle, Triple, World};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn keys(engine: &Engine, keywords: &str, opts: &TranslationOptions) -> Result<BTreeSet<String>, String> {
    let t = engine.translate(keywords, opts).map_err(|e| e.to_string())?;
    ensure!(!t.truncated, "`{keywords}`: output truncated");
    Ok(t.queries.iter().map(|g| canonical_serialize(&g.query)).collect())
}

pub fn translation_matches_oracle(world: &World, keywords: &str, tau: usize, permutations: bool) -> Check {
    let engine = world.engine();
    let opts = TranslationOptions { tau, consider_permutations: permutations, ..Default::default() };
    let tokens = tokenize(keywords, engine.tokenizer());
    let actual = keys(&engine, keywords, &opts)?;
    let expected = Oracle::of(world).translate(&tokens, tau, permutations);
    ensure!(
        actual == expected,
        "`{keywords}` tau {tau} permutations {permutations}: extra {:?}, missing {:?}",
        actual.difference(&expected).collect::<Vec<_>>(),
        expected.difference(&actual).collect::<Vec<_>>()
    );
    Ok(())
}

/// Token conservation, the predicate filter, support above tau and presence
/// of the all-terms query.
pub fn generated_queries_are_sound(engine: &Engine, keywords: &str, tau: usize) -> Check {
    let t = engine
        .translate(keywords, &TranslationOptions { tau, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let tokens = t.tokens();
    let collection = engine.collection();
    for g in &t.queries {
        let key = canonical_serialize(&g.query);
        let mut uses = vec![0; tokens.len()];
        for (span, _) in &g.concept_spans {
            span.indices.iter().for_each(|&i| uses[i] += 1);
        }
        for (span, _) in &g.predicate_spans {
            span.indices.iter().for_each(|&i| uses[i] += 1);
        }
        g.term_tokens.iter().for_each(|&i| uses[i] += 1);
        g.excluded.iter().for_each(|&i| uses[i] += 1);
        ensure!(uses.iter().all(|&u| u == 1), "`{keywords}` {key}: token uses {uses:?}");
        let excluded: Vec<&str> = g.excluded.iter().map(|&i| tokens[i].as_str()).collect();
        ensure!(g.excluded_tokens == excluded, "`{keywords}` {key}: excluded token list");

        for (_, p) in &g.predicate_spans {
            ensure!(
                g.query.statements().iter().any(|s| s.predicate() == p),
                "`{keywords}` {key}: predicate `{p}` not reflected by a statement"
            );
        }
        ensure!(
            g.query.terms().iter().all(|x| collection.support_term(x.as_str()) > tau),
            "`{keywords}` {key}: term at or below tau"
        );
        ensure!(
            g.query.concepts().iter().all(|c| collection.support_concept(c) > tau),
            "`{keywords}` {key}: concept at or below tau"
        );
        ensure!(
            g.query.statements().iter().all(|s| collection.support_statement(s) > tau),
            "`{keywords}` {key}: statement at or below tau"
        );
        ensure!(
            g.excluded.iter().all(|&i| collection.support_term(&tokens[i]) <= tau),
            "`{keywords}` {key}: supported token excluded"
        );
    }

    let supported: BTreeSet<&str> = tokens
        .iter()
        .map(String::as_str)
        .filter(|x| collection.support_term(x) > tau)
        .collect();
    if !supported.is_empty() {
        let all_terms = t.queries.iter().any(|g| {
            g.query.statements().is_empty()
                && g.query.concepts().is_empty()
                && g.query.terms().iter().map(|x| x.as_str()).collect::<BTreeSet<_>>() == supported
        });
        ensure!(all_terms, "`{keywords}`: all-terms query missing");
    }
    Ok(())
}

/// The set emitted at `tau + 1` is a subset of the set emitted at `tau`.
pub fn tau_subset(engine: &Engine, keywords: &str, tau: usize) -> Check {
    let opts = TranslationOptions { tau, max_queries: 1_000_000, ..Default::default() };
    let low = keys(engine, keywords, &opts)?;
    let high = keys(engine, keywords, &TranslationOptions { tau: tau + 1, ..opts })?;
    let extra: Vec<&String> = high.difference(&low).collect();
    ensure!(
        extra.is_empty(),
        "`{keywords}`: tau {} emits {} (and {} more) absent at tau {tau}",
        tau + 1,
        extra[0],
        extra.len() - 1
    );
    Ok(())
}

/// Every query emitted at `tau + 1` is a query emitted at `tau` minus terms
/// whose support is exactly `tau + 1`.
pub fn tau_drops_boundary_terms(engine: &Engine, keywords: &str, tau: usize) -> Check {
    let opts = TranslationOptions { tau, max_queries: 1_000_000, ..Default::default() };
    let low = engine.translate(keywords, &opts).map_err(|e| e.to_string())?;
    let high = engine
        .translate(keywords, &TranslationOptions { tau: tau + 1, ..opts })
        .map_err(|e| e.to_string())?;
    ensure!(!low.truncated, "`{keywords}`: output truncated");
    let collection = engine.collection();
    for g in &high.queries {
        let q = &g.query;
        let found = low.queries.iter().any(|l| {
            let lq = &l.query;
            lq.statements() == q.statements()
                && lq.concepts() == q.concepts()
                && lq.terms().is_superset(q.terms())
                && lq
                    .terms()
                    .difference(q.terms())
                    .all(|x| collection.support_term(x.as_str()) == tau + 1)
        });
        ensure!(found, "`{keywords}` tau {tau}: {}", canonical_serialize(q));
    }
    Ok(())
}

pub fn retrieval_matches_scan(engine: &Engine, oracle: &Oracle, q: &NarrativeQuery) -> Check {
    let actual = engine.answers(q);
    let expected = oracle.answers(q);
    ensure!(actual == expected, "{}: got {actual:?}, expected {expected:?}", canonical_serialize(q));
    Ok(())
}

/// Concepts `N0..Nn` over a random DAG, five predicates in a random tree and
/// random annotations without text.
pub fn dag_world(rng: &mut impl Rng, nodes: usize, docs: usize) -> World {
    let dag = super::random_dag(rng, nodes, 0.15);
    let concepts: Vec<Concept> = (0..nodes)
        .map(|i| Concept {
            id: ConceptId::new(format!("N{i}")).unwrap(),
            preferred_label: format!("node {i}"),
            synonyms: vec![],
            parents: dag[i].iter().map(|p| ConceptId::new(format!("N{p}")).unwrap()).collect(),
        })
        .collect();
    let predicates: Vec<Predicate> = (0..5)
        .map(|i| Predicate {
            id: PredicateId::new(format!("P{i}")).unwrap(),
            label: format!("rel{i}"),
            synonyms: vec![],
            parent: (i > 0).then(|| PredicateId::new(format!("P{}", rng.random_range(0..i))).unwrap()),
        })
        .collect();
    let docs = (0..docs)
        .map(|d| {
            let detected: Vec<ConceptId> = concepts
                .iter()
                .filter(|_| rng.random_bool(0.1))
                .map(|c| c.id.clone())
                .collect();
            let mut statements = Vec::new();
            for _ in 0..rng.random_range(0..=3) {
                if let (Some(s), Some(o)) = (detected.choose(rng), detected.choose(rng)) {
                    if s != o {
                        let p = predicates.choose(rng).unwrap().id.clone();
                        statements.push(Statement::new(s.clone(), p, o.clone()).unwrap());
                    }
                }
            }
            let doc = Document {
                doc_id: format!("d{d}"),
                title: String::new(),
                abstract_text: String::new(),
                fulltext: None,
            };
            let ann = DocumentAnnotations::new(doc.doc_id.clone(), detected, statements).unwrap();
            (doc, ann)
        })
        .collect();
    World { concepts, predicates, docs }
}

/// Concept postings, statement postings and ancestor sets against graph search.
pub fn closure_matches_reachability(world: &World, excludes: &BTreeSet<String>) -> Check {
    let opts = IndexOptions {
        statement_closure_excludes: excludes.iter().map(|c| ConceptId::new(c.clone()).unwrap()).collect(),
        ..Default::default()
    };
    let engine = world.engine_with(opts);
    let oracle = Oracle::new(&world.concepts, &world.predicates, &world.docs, excludes);
    let collection = engine.collection();
    let name = |n: &u32| collection.doc_id(*n).to_string();

    let actual: BTreeMap<String, Vec<String>> = collection
        .concepts()
        .filter(|(_, docs)| !docs.is_empty())
        .map(|(c, docs)| (c.to_string(), docs.iter().map(name).collect()))
        .collect();
    let mut expected: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (i, view) in oracle.views.iter().enumerate() {
        for c in &view.concepts {
            expected.entry(c.clone()).or_default().push(oracle.doc_ids[i].clone());
        }
    }
    ensure!(actual == expected, "concept postings differ");

    let actual: BTreeMap<Triple, Vec<String>> = collection
        .statements()
        .filter(|(_, docs)| !docs.is_empty())
        .map(|(s, docs)| {
            (
                (s.subject().to_string(), s.predicate().to_string(), s.object().to_string()),
                docs.iter().map(name).collect(),
            )
        })
        .collect();
    let mut expected: BTreeMap<Triple, Vec<String>> = BTreeMap::new();
    for (i, view) in oracle.views.iter().enumerate() {
        for st in &view.statements {
            expected.entry(st.clone()).or_default().push(oracle.doc_ids[i].clone());
        }
    }
    ensure!(actual == expected, "statement postings differ");

    for c in &world.concepts {
        let ancestors: BTreeSet<String> = engine
            .ontology()
            .concept_ancestors(&c.id)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|a| a.to_string())
            .collect();
        let mut reach = reachable(&oracle.concept_parents, &c.id.to_string());
        reach.remove(c.id.as_str());
        ensure!(ancestors == reach, "ancestors of {}: {ancestors:?} vs {reach:?}", c.id);
    }
    Ok(())
}

/// Selection contracts on `world`, plus specific == mixed once the predicate
/// hierarchy is flattened.
pub fn strategy_contracts(world: &World, keywords: &str) -> Check {
    let engine = world.engine();
    let t = engine
        .translate(keywords, &TranslationOptions::default())
        .map_err(|e| e.to_string())?;
    let queries: Vec<&NarrativeQuery> = t.queries.iter().map(|g| &g.query).collect();
    let collection = engine.collection();
    let oracle = Oracle::of(world);
    let count = |q: &NarrativeQuery| oracle.answers(q).len();
    let counts: Vec<usize> = queries.iter().map(|q| count(q)).collect();

    match select_most_supported(&queries, collection) {
        Ok(best) => {
            let max = *counts.iter().max().unwrap();
            ensure!(count(best) == max, "`{keywords}`: most-supported is not the argmax");
            let first = queries
                .iter()
                .zip(&counts)
                .filter(|(_, &n)| n == max)
                .map(|(q, _)| canonical_serialize(q))
                .min();
            ensure!(Some(canonical_serialize(best)) == first, "`{keywords}`: tie not broken canonically");
        }
        Err(_) => ensure!(queries.is_empty(), "`{keywords}`: most-supported missing"),
    }
    let mixed = select_mixed(&queries, collection);
    let specific = select_specific(&queries, collection, engine.hierarchy());
    for q in mixed.iter().chain(specific.iter()) {
        ensure!(
            !q.statements().is_empty() && count(q) >= 1,
            "`{keywords}`: {} lacks a statement or a result",
            canonical_serialize(q)
        );
    }
    if let Some(q) = specific {
        ensure!(
            q.statements().iter().all(|s| !engine.hierarchy().is_root(s.predicate())),
            "`{keywords}`: specific uses the root predicate"
        );
    }

    let flat = world.flat().engine();
    let t = flat
        .translate(keywords, &TranslationOptions::default())
        .map_err(|e| e.to_string())?;
    let specific = select_specific(&t.queries, flat.collection(), flat.hierarchy()).map(|g| &g.query);
    let mixed = select_mixed(&t.queries, flat.collection()).map(|g| &g.query);
    ensure!(specific == mixed, "`{keywords}`: without a hierarchy specific differs from mixed");
    Ok(())
}
