//! Bounded search for 2-cells between parallel paths.
//!
//! Paths are grouped into exchange classes (keyed by canonical form); a move
//! applies one named relation instance to any member of a class. Within a
//! class, members are connected by exchange cells.

use std::collections::HashMap;

use super::instance::{apply_cell, exchange_canonical, exchange_class, exchange_trace, named_applications};
use super::{CellStep, CellTrace, Path, Presentation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of named cells in the trace.
    pub max_named: usize,
    /// Maximum number of exchange classes visited on both sides together.
    pub max_classes: usize,
    /// Maximum number of members enumerated per class.
    pub class_cap: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_named: 12, max_classes: 20_000, class_cap: 5_000 }
    }
}

impl SearchLimits {
    pub fn depth(max_named: usize) -> Self {
        SearchLimits { max_named, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchResult {
    Found(CellTrace),
    /// `exhausted` is set when the class budget ran out before the depth bound.
    NotFound { exhausted: bool },
}

impl SearchResult {
    pub fn trace(self) -> Option<CellTrace> {
        match self {
            SearchResult::Found(t) => Some(t),
            SearchResult::NotFound { .. } => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchResult::Found(_))
    }
}

struct Node {
    /// The member through which the class was entered.
    rep: Path,
    /// Parent class, the member the move was applied to, and the move.
    parent: Option<(usize, Path, CellStep)>,
    depth: usize,
}

struct Side {
    nodes: Vec<Node>,
    index: HashMap<Path, usize>,
    frontier: Vec<usize>,
}

impl Side {
    fn new(root: Path, key: Path) -> Self {
        Side {
            nodes: vec![Node { rep: root, parent: None, depth: 0 }],
            index: HashMap::from([(key, 0)]),
            frontier: vec![0],
        }
    }
}

/// Trace from the root of `side` to `at`, which lies in class `node`.
fn chain_from_root(p: &Presentation, side: &Side, node: usize, at: &Path) -> CellTrace {
    let mut hops = Vec::new();
    let mut cur = node;
    while let Some((parent, before, cell)) = &side.nodes[cur].parent {
        hops.push((before.clone(), cell.clone(), side.nodes[cur].rep.clone()));
        cur = *parent;
    }
    hops.reverse();
    let mut trace = CellTrace::empty(side.nodes[0].rep.clone());
    let mut here = side.nodes[0].rep.clone();
    for (before, cell, after) in hops {
        let ex = exchange_trace(p, &here, &before).expect("members of one class are exchange-connected");
        trace.cells.extend(ex.cells);
        trace.cells.push(cell);
        here = after;
    }
    let ex = exchange_trace(p, &here, at).expect("members of one class are exchange-connected");
    trace.cells.extend(ex.cells);
    trace
}

/// Bidirectional breadth-first search for a trace from `from` to `to`.
pub fn find_trace(p: &Presentation, from: &Path, to: &Path, limits: SearchLimits) -> SearchResult {
    if from.source != to.source || from.target(p) != to.target(p) {
        return SearchResult::NotFound { exhausted: false };
    }
    if let Some(t) = exchange_trace(p, from, to) {
        return SearchResult::Found(t);
    }
    let mut sides = [
        Side::new(from.clone(), exchange_canonical(p, from)),
        Side::new(to.clone(), exchange_canonical(p, to)),
    ];
    let mut visited = 2;
    let mut reached = [0usize, 0usize];
    while reached[0] + reached[1] < limits.max_named {
        if sides[0].frontier.is_empty() && sides[1].frontier.is_empty() {
            return SearchResult::NotFound { exhausted: false };
        }
        let s = if sides[1].frontier.is_empty()
            || (!sides[0].frontier.is_empty() && sides[0].frontier.len() <= sides[1].frontier.len())
        {
            0
        } else {
            1
        };
        let o = 1 - s;
        let frontier = std::mem::take(&mut sides[s].frontier);
        let mut next_frontier = Vec::new();
        for ni in frontier {
            let rep = sides[s].nodes[ni].rep.clone();
            let depth = sides[s].nodes[ni].depth;
            for member in exchange_class(p, &rep, limits.class_cap) {
                for cell in named_applications(p, &member) {
                    let next = apply_cell(p, &member, &cell).expect("named applications match");
                    let key = exchange_canonical(p, &next);
                    if let Some(&oi) = sides[o].index.get(&key) {
                        // `member` lies in class `ni` of side `s`, `next` in class `oi` of side `o`.
                        let (fwd, bwd) = if s == 0 {
                            let f = chain_from_root(p, &sides[0], ni, &member);
                            let b = chain_from_root(p, &sides[1], oi, &next);
                            (f.then(CellTrace { source: member.clone(), cells: vec![cell] }), b)
                        } else {
                            let f = chain_from_root(p, &sides[0], oi, &next);
                            let b = chain_from_root(p, &sides[1], ni, &member);
                            let back = CellStep { pos: cell.pos, inst: cell.inst.inverse() };
                            (f.then(CellTrace { source: next.clone(), cells: vec![back] }), b)
                        };
                        let bwd = bwd.inverse(p).expect("search traces are well formed");
                        return SearchResult::Found(fwd.then(bwd));
                    }
                    if sides[s].index.contains_key(&key) {
                        continue;
                    }
                    if visited >= limits.max_classes {
                        return SearchResult::NotFound { exhausted: true };
                    }
                    visited += 1;
                    let id = sides[s].nodes.len();
                    sides[s].nodes.push(Node { rep: next, parent: Some((ni, member.clone(), cell)), depth: depth + 1 });
                    sides[s].index.insert(key, id);
                    next_frontier.push(id);
                }
            }
        }
        sides[s].frontier = next_frontier;
        reached[s] += 1;
    }
    SearchResult::NotFound { exhausted: false }
}

/// Whether `a` and `b` are related by a trace within `limits`.
pub fn cells_related(p: &Presentation, a: &Path, b: &Path, limits: SearchLimits) -> bool {
    find_trace(p, a, b, limits).is_found()
}
