//! Selection of the queries shown to the user.
//!
//! * most-supported: the query with the most results.
//! * mixed: among queries with at least one statement and one result, the
//!   one with the most results.
//! * specific: like mixed, but every statement must use a predicate below the
//!   hierarchy root.
//!
//! Ties are broken by ascending canonical form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexing::CollectionIndex;
use crate::model::{canonical_serialize, NarrativeQuery};
use crate::ontology::PredicateHierarchy;
use crate::retrieval::result_count;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Specific,
    Mixed,
    MostSupported,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Specific, Strategy::Mixed, Strategy::MostSupported];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Specific => "specific",
            Strategy::Mixed => "mixed",
            Strategy::MostSupported => "most-supported",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the statement strategies (mixed, specific) rank their survivors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankOrder {
    #[default]
    Descending,
    Ascending,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrategyOptions {
    pub statement_rank: RankOrder,
}

/// Result counts computed once for a candidate list.
pub struct Ranked<'q, Q> {
    queries: &'q [Q],
    counts: Vec<usize>,
}

impl<'q, Q: AsRef<NarrativeQuery>> Ranked<'q, Q> {
    pub fn new(queries: &'q [Q], index: &CollectionIndex) -> Self {
        let counts = queries.iter().map(|q| result_count(q.as_ref(), index)).collect();
        Ranked { queries, counts }
    }

    pub fn count(&self, i: usize) -> usize {
        self.counts[i]
    }

    fn best(&self, order: RankOrder, admit: impl Fn(&NarrativeQuery, usize) -> bool) -> Option<usize> {
        let mut best: Option<(usize, String)> = None;
        for (i, q) in self.queries.iter().enumerate() {
            let q = q.as_ref();
            if !admit(q, self.counts[i]) {
                continue;
            }
            let better = match &best {
                None => true,
                Some((j, key)) => {
                    let (a, b) = (self.counts[i], self.counts[*j]);
                    let strictly = match order {
                        RankOrder::Descending => a > b,
                        RankOrder::Ascending => a < b,
                    };
                    strictly || (a == b && canonical_serialize(q) < *key)
                }
            };
            if better {
                best = Some((i, canonical_serialize(q)));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn most_supported(&self) -> Option<usize> {
        self.best(RankOrder::Descending, |_, _| true)
    }

    pub fn mixed(&self, opts: &StrategyOptions) -> Option<usize> {
        self.best(opts.statement_rank, |q, n| q.has_statements() && n >= 1)
    }

    pub fn specific(&self, hierarchy: &PredicateHierarchy, opts: &StrategyOptions) -> Option<usize> {
        self.best(opts.statement_rank, |q, n| {
            q.has_statements() && n >= 1 && q.statements().iter().all(|s| !hierarchy.is_root(s.predicate()))
        })
    }

    pub fn select(&self, strategy: Strategy, hierarchy: &PredicateHierarchy, opts: &StrategyOptions) -> Option<usize> {
        match strategy {
            Strategy::Specific => self.specific(hierarchy, opts),
            Strategy::Mixed => self.mixed(opts),
            Strategy::MostSupported => self.most_supported(),
        }
    }
}

pub fn select_most_supported<'q, Q: AsRef<NarrativeQuery>>(queries: &'q [Q], index: &CollectionIndex) -> Result<&'q Q> {
    Ranked::new(queries, index)
        .most_supported()
        .map(|i| &queries[i])
        .ok_or(Error::EmptyInput)
}

pub fn select_mixed<'q, Q: AsRef<NarrativeQuery>>(queries: &'q [Q], index: &CollectionIndex) -> Option<&'q Q> {
    Ranked::new(queries, index)
        .mixed(&StrategyOptions::default())
        .map(|i| &queries[i])
}

pub fn select_specific<'q, Q: AsRef<NarrativeQuery>>(
    queries: &'q [Q],
    index: &CollectionIndex,
    hierarchy: &PredicateHierarchy,
) -> Option<&'q Q> {
    Ranked::new(queries, index)
        .specific(hierarchy, &StrategyOptions::default())
        .map(|i| &queries[i])
}

#[derive(Debug)]
pub struct Candidate<'q, Q> {
    pub strategy: Strategy,
    pub query: &'q Q,
    pub result_count: usize,
}

/// Up to three selections in the order specific, mixed, most-supported.
/// A strategy without a selection is omitted; a query chosen by several
/// strategies appears once under the first of them.
pub fn candidate_panel<'q, Q: AsRef<NarrativeQuery>>(
    queries: &'q [Q],
    index: &CollectionIndex,
    hierarchy: &PredicateHierarchy,
) -> Vec<Candidate<'q, Q>> {
    candidate_panel_with(queries, index, hierarchy, &StrategyOptions::default())
}

pub fn candidate_panel_with<'q, Q: AsRef<NarrativeQuery>>(
    queries: &'q [Q],
    index: &CollectionIndex,
    hierarchy: &PredicateHierarchy,
    opts: &StrategyOptions,
) -> Vec<Candidate<'q, Q>> {
    let ranked = Ranked::new(queries, index);
    let mut panel: Vec<Candidate<'q, Q>> = Vec::with_capacity(3);
    for strategy in Strategy::ALL {
        let Some(i) = ranked.select(strategy, hierarchy, opts) else {
            continue;
        };
        if panel.iter().any(|c| c.query.as_ref() == queries[i].as_ref()) {
            continue;
        }
        panel.push(Candidate {
            strategy,
            query: &queries[i],
            result_count: ranked.count(i),
        });
    }
    panel
}
