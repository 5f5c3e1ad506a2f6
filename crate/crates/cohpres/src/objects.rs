//! The rewriting system on object words generated by the equational
//! generators: successors, termination, normal forms and the chosen
//! normalization paths.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::core::{Mode, ObjId, Path, Presentation, Step, Word};

pub use crate::core::transposition_count;

pub const DEFAULT_SEED_LENGTH: usize = 6;
pub const DEFAULT_NORMALIZE_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationResult {
    pub input: Word,
    pub normal: Word,
    pub path: Path,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TerminationStatus {
    Terminating,
    /// Words visited along the cycle, first word repeated at the end.
    Cycle { words: Vec<Word> },
    BudgetExhausted { bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TerminationVerdict {
    pub status: TerminationStatus,
    pub explored: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("no normal form reached from {word} within {budget} steps")]
    Budget { word: String, budget: usize },
}

/// Equational steps applicable to `w`, by offset then generator order.
pub fn equational_successors(p: &Presentation, w: &[ObjId]) -> Vec<Step> {
    p.steps_from(w).into_iter().filter(|s| p.is_equational_step(s)).collect()
}

/// Number of pairs `i < j` with `w[i] = b` and `w[j] = a`.
pub fn transposition_number(w: &[ObjId], b: ObjId, a: ObjId) -> u64 {
    transposition_count(w, b, a)
}

/// The chosen normalization path `u_w`: always take the first equational successor.
pub fn normalize_with_budget(p: &Presentation, w: &[ObjId], budget: usize) -> Result<NormalizationResult, NormalizeError> {
    let mut cur = w.to_vec();
    let mut steps = Vec::new();
    while let Some(s) = equational_successors(p, &cur).into_iter().next() {
        if steps.len() >= budget {
            return Err(NormalizeError::Budget { word: p.show_word(w), budget });
        }
        cur = p.step_target(&s);
        steps.push(s);
    }
    Ok(NormalizationResult { input: w.to_vec(), normal: cur, path: Path { source: w.to_vec(), steps } })
}

pub fn normalize(p: &Presentation, w: &[ObjId]) -> Result<NormalizationResult, NormalizeError> {
    normalize_with_budget(p, w, DEFAULT_NORMALIZE_BUDGET)
}

pub fn is_normal(p: &Presentation, w: &[ObjId]) -> bool {
    equational_successors(p, w).is_empty()
}

/// All words over the objects of length at most `max_len` (path mode: the objects themselves).
pub fn all_words(p: &Presentation, max_len: usize) -> Vec<Word> {
    if p.mode == Mode::Path {
        return (0..p.objects.len()).map(|i| vec![i as ObjId]).collect();
    }
    let k = p.objects.len() as ObjId;
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for c in 0..k {
                let mut v: Word = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
        if k == 0 {
            break;
        }
    }
    out
}

fn seed_words(p: &Presentation, seed_len: usize) -> Vec<Word> {
    let mut seeds: Vec<Word> = Vec::new();
    for g in &p.gens {
        seeds.push(g.source.clone());
        seeds.push(g.target.clone());
    }
    for r in &p.rels {
        seeds.push(r.lhs.source.clone());
        seeds.push(r.lhs.target(p));
    }
    seeds.extend(all_words(p, seed_len));
    let mut seen = HashSet::new();
    seeds.retain(|w| seen.insert(w.clone()));
    seeds
}

/// Explores the equational step graph from endpoint words and all words up
/// to length `seed_len`, looking for a cycle.
pub fn check_equational_termination_with(p: &Presentation, budget: usize, seed_len: usize) -> TerminationVerdict {
    #[derive(Clone, Copy, PartialEq, Eq)]
    enum Color {
        Grey,
        Black,
    }
    let mut color: HashMap<Word, Color> = HashMap::new();
    let mut explored = 0usize;
    for seed in seed_words(p, seed_len) {
        if color.contains_key(&seed) {
            continue;
        }
        // iterative depth-first search; each frame holds a word and its pending successors
        let mut stack: Vec<(Word, Vec<Word>)> = Vec::new();
        let succ = |w: &Word| -> Vec<Word> {
            let mut v: Vec<Word> = equational_successors(p, w).iter().map(|s| p.step_target(s)).collect();
            v.reverse();
            v
        };
        color.insert(seed.clone(), Color::Grey);
        explored += 1;
        stack.push((seed.clone(), succ(&seed)));
        while let Some((w, pending)) = stack.last_mut() {
            match pending.pop() {
                Some(next) => match color.get(&next) {
                    Some(Color::Grey) => {
                        let start = stack.iter().position(|(u, _)| *u == next).unwrap();
                        let mut words: Vec<Word> = stack[start..].iter().map(|(u, _)| u.clone()).collect();
                        words.push(next);
                        return TerminationVerdict { status: TerminationStatus::Cycle { words }, explored };
                    }
                    Some(Color::Black) => {}
                    None => {
                        if explored >= budget {
                            return TerminationVerdict {
                                status: TerminationStatus::BudgetExhausted { bound: budget },
                                explored,
                            };
                        }
                        explored += 1;
                        color.insert(next.clone(), Color::Grey);
                        let s = succ(&next);
                        stack.push((next, s));
                    }
                },
                None => {
                    color.insert(w.clone(), Color::Black);
                    stack.pop();
                }
            }
        }
    }
    TerminationVerdict { status: TerminationStatus::Terminating, explored }
}

pub fn check_equational_termination(p: &Presentation, budget: usize) -> TerminationVerdict {
    check_equational_termination_with(p, budget, DEFAULT_SEED_LENGTH)
}

pub fn show_words(p: &Presentation, words: &[Word]) -> String {
    let ws: Vec<String> = words.iter().map(|w| p.show_word(w)).collect();
    format!("[{}]", ws.join(", "))
}

/// Every normal form reachable from `w` by equational steps, with a cap on visited words.
pub fn reachable_normal_forms(p: &Presentation, w: &[ObjId], cap: usize) -> Option<HashSet<Word>> {
    let mut seen: HashSet<Word> = HashSet::from([w.to_vec()]);
    let mut stack = vec![w.to_vec()];
    let mut normals = HashSet::new();
    while let Some(u) = stack.pop() {
        let succ = equational_successors(p, &u);
        if succ.is_empty() {
            normals.insert(u);
            continue;
        }
        for s in succ {
            let v = p.step_target(&s);
            if seen.insert(v.clone()) {
                if seen.len() > cap {
                    return None;
                }
                stack.push(v);
            }
        }
    }
    Some(normals)
}
