//! Simulated tripartite independent set (TIS) oracle with query accounting.

use std::cell::{Cell, RefCell};
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// The stage of an estimator a query is charged to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    ThresholdEstimate,
    ExactCount,
    ThresholdDecide,
    Coarse,
    PipelineMisc,
}

impl Phase {
    pub const ALL: [Phase; 5] = [
        Phase::ThresholdEstimate,
        Phase::ExactCount,
        Phase::ThresholdDecide,
        Phase::Coarse,
        Phase::PipelineMisc,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::ThresholdEstimate => "threshold-estimate",
            Phase::ExactCount => "exact-count",
            Phase::ThresholdDecide => "threshold-decide",
            Phase::Coarse => "coarse",
            Phase::PipelineMisc => "pipeline-misc",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Query counts, in total and per phase. Phases with no queries are absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    pub total: u64,
    pub per_phase: BTreeMap<Phase, u64>,
}

impl QueryLedger {
    pub fn get(&self, phase: Phase) -> u64 {
        self.per_phase.get(&phase).copied().unwrap_or(0)
    }

    /// Adds another ledger's counts into this one.
    pub fn merge(&mut self, other: &QueryLedger) {
        self.total += other.total;
        for (&p, &c) in &other.per_phase {
            *self.per_phase.entry(p).or_default() += c;
        }
    }

    /// Component-wise difference `self - earlier`.
    pub fn since(&self, earlier: &QueryLedger) -> QueryLedger {
        let mut per_phase = BTreeMap::new();
        for (&p, &c) in &self.per_phase {
            let d = c - earlier.get(p);
            if d > 0 {
                per_phase.insert(p, d);
            }
        }
        QueryLedger { total: self.total - earlier.total, per_phase }
    }

    pub fn is_consistent(&self) -> bool {
        self.per_phase.values().sum::<u64>() == self.total
    }
}

struct Scratch {
    stamp: Vec<u32>,
    part: Vec<u8>,
    gen: u32,
    nbr_stamp: Vec<u32>,
    nbr_gen: u32,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            stamp: vec![0; n],
            part: vec![0; n],
            gen: 0,
            nbr_stamp: vec![0; n],
            nbr_gen: 0,
        }
    }

    fn next_gen(&mut self) -> u32 {
        if self.gen == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.gen = 0;
        }
        self.gen += 1;
        self.gen
    }

    fn next_nbr_gen(&mut self) -> u32 {
        if self.nbr_gen == u32::MAX {
            self.nbr_stamp.iter_mut().for_each(|s| *s = 0);
            self.nbr_gen = 0;
        }
        self.nbr_gen += 1;
        self.nbr_gen
    }
}

/// Answers TIS queries about a hidden graph and counts every query.
///
/// Estimators must only use [`TisOracle::n`] and [`TisOracle::query`]; the
/// graph itself is reachable through [`TisOracle::ground_truth`] for audits.
///
/// The ledger uses interior mutability, so an oracle is `Send` but not
/// `Sync`. Use one oracle per thread.
pub struct TisOracle {
    graph: Graph,
    counts: [Cell<u64>; 5],
    scratch: RefCell<Scratch>,
}

impl TisOracle {
    pub fn new(graph: Graph) -> Self {
        let n = graph.n();
        TisOracle {
            graph,
            counts: Default::default(),
            scratch: RefCell::new(Scratch::new(n)),
        }
    }

    /// Number of vertices; the vertex set 0..n is public input.
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// The hidden graph. For ground-truth audits only.
    pub fn ground_truth(&self) -> &Graph {
        &self.graph
    }

    /// YES iff some triangle has one vertex in each of `a`, `b`, `c`.
    /// Charges exactly one query to `phase` when the sets are valid.
    pub fn query(&self, a: &VertexSet, b: &VertexSet, c: &VertexSet, phase: Phase) -> Result<bool> {
        if a.is_empty() || b.is_empty() || c.is_empty() {
            return Err(Error::Contract("TIS query sets must be non-empty".into()));
        }
        let mut s = self.scratch.borrow_mut();
        let gen = s.next_gen();
        let n = self.graph.n();

        // Smallest set drives the scan; the other two are labelled 1 and 2.
        let mut sets = [a, b, c];
        sets.sort_by_key(|s| s.len());
        for (label, set) in sets.iter().enumerate() {
            for v in set.iter() {
                let i = v as usize;
                if i >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if s.stamp[i] == gen {
                    return Err(Error::Contract("TIS query sets must be pairwise disjoint".into()));
                }
                s.stamp[i] = gen;
                s.part[i] = label as u8;
            }
        }
        self.counts[phase.index()].set(self.counts[phase.index()].get() + 1);

        let g = &self.graph;
        for x in sets[0].iter() {
            let nx = g.neighbors(x);
            let ng = s.next_nbr_gen();
            for &w in nx {
                s.nbr_stamp[w as usize] = ng;
            }
            for &y in nx {
                let yi = y as usize;
                if s.stamp[yi] != gen || s.part[yi] != 1 {
                    continue;
                }
                for &z in g.neighbors(y) {
                    let zi = z as usize;
                    if s.stamp[zi] == gen && s.part[zi] == 2 && s.nbr_stamp[zi] == ng {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    pub fn total_queries(&self) -> u64 {
        self.counts.iter().map(Cell::get).sum()
    }

    pub fn snapshot_ledger(&self) -> QueryLedger {
        let mut per_phase = BTreeMap::new();
        for p in Phase::ALL {
            let c = self.counts[p.index()].get();
            if c > 0 {
                per_phase.insert(p, c);
            }
        }
        QueryLedger { total: self.total_queries(), per_phase }
    }

    pub fn reset_ledger(&self) {
        for c in &self.counts {
            c.set(0);
        }
    }
}

impl fmt::Debug for TisOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TisOracle")
            .field("n", &self.n())
            .field("queries", &self.total_queries())
            .finish()
    }
}
