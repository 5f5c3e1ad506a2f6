//! Weight evaluation and the checks that together make a presentation
//! modulo coherent: resolution and termination (A1), decreasing 1-weights
//! (A2), the cylinder property strictly (A3) or up to exchange (A3′), and
//! decreasing 2-weights (A4).

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::constructions::opposite;
use crate::core::search::SearchLimits;
use crate::core::{
    exchange_equal, transposition_count, CellTrace, Direction, ExchangeShape, Flavor, InstanceKind, Mode,
    ObjId, Order, Path, Presentation, Prim, RelationInstance, Step, WeightSpec, Word,
};
use crate::critical::{
    check_cylinder, enumerate_critical_cylinders, enumerate_critical_pairs, CriticalCylinder, CriticalPair,
    CylinderVerdict, TargetsEqual,
};
use crate::objects::{all_words, check_equational_termination, show_words, TerminationStatus};
use crate::residuation::{derive_residual_table, ResidualTable, Residuator};

pub const DEFAULT_TERMINATION_BUDGET: usize = 100_000;
/// Longest context used when sampling compatibility of weights with whiskering.
pub const CONTEXT_SAMPLE_LENGTH: usize = 3;
/// Longest middle word in the exchange residual samples.
pub const EXCHANGE_SAMPLE_MID: usize = 2;
/// Longest word on which exchange bases are sampled for the second condition of A3′.
pub const EXCHANGE_BASE_SAMPLE_WORD: usize = 5;
const MAX_WITNESSES: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("no weight entry for `{0}`")]
    Missing(String),
}

fn count(w: &[ObjId], s: ObjId) -> u64 {
    w.iter().filter(|&&c| c == s).count() as u64
}

fn eval_entry(spec: &WeightSpec, key: &str, left: &[ObjId], right: &[ObjId], word: &[ObjId]) -> Result<Vec<u64>, WeightError> {
    let terms = spec.entry(key).ok_or_else(|| WeightError::Missing(key.to_string()))?;
    let ctx: Word = left.iter().chain(right.iter()).copied().collect();
    Ok(terms
        .iter()
        .map(|t| {
            t.iter()
                .map(|prim| match *prim {
                    Prim::Const(n) => n,
                    Prim::CountL(s) => count(left, s),
                    Prim::CountR(s) => count(right, s),
                    Prim::CtxTransp(b, a) => transposition_count(&ctx, b, a),
                    Prim::Count(s) => count(word, s),
                    Prim::Transp(b, a) => transposition_count(word, b, a),
                })
                .sum()
        })
        .collect())
}

pub fn zero(spec: &WeightSpec) -> Vec<u64> {
    vec![0; spec.dim]
}

fn add(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

pub fn eval_step(spec: &WeightSpec, p: &Presentation, s: &Step) -> Result<Vec<u64>, WeightError> {
    eval_entry(spec, &p.gen(s.gen).name, &s.left, &s.right, &p.step_source(s))
}

/// Sum over the steps; zero on identities.
pub fn eval_path(spec: &WeightSpec, p: &Presentation, path: &Path) -> Result<Vec<u64>, WeightError> {
    let mut w = zero(spec);
    for s in &path.steps {
        add(&mut w, &eval_step(spec, p, s)?);
    }
    Ok(w)
}

/// Exchange instances use the `exch` entry. The direction does not matter.
pub fn eval_instance(spec: &WeightSpec, p: &Presentation, inst: &RelationInstance) -> Result<Vec<u64>, WeightError> {
    let key = match &inst.kind {
        InstanceKind::Named(r) => p.rels[*r].name.as_str(),
        InstanceKind::Exchange(_) => "exch",
    };
    eval_entry(spec, key, &inst.left, &inst.right, &inst.source_word(p))
}

pub fn eval_trace(spec: &WeightSpec, p: &Presentation, t: &CellTrace) -> Result<Vec<u64>, WeightError> {
    let mut w = zero(spec);
    for c in &t.cells {
        add(&mut w, &eval_instance(spec, p, &c.inst)?);
    }
    Ok(w)
}

/// Strict order on tuples.
pub fn less(order: Order, x: &[u64], y: &[u64]) -> bool {
    match order {
        Order::Lex => x < y,
        Order::Pointwise => x.iter().zip(y).all(|(a, b)| a <= b) && x != y,
    }
}

pub fn show_tuple(w: &[u64]) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub verdict: Status,
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Set when part of the verdict rests on sampled instances.
    pub sampled: bool,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { verdict: Status::Pass, witnesses: Vec::new(), reason: None, sampled: false }
    }

    pub fn inconclusive(reason: impl Into<String>) -> Self {
        Verdict { verdict: Status::Inconclusive, witnesses: Vec::new(), reason: Some(reason.into()), sampled: false }
    }

    fn from_witnesses(witnesses: Vec<String>) -> Self {
        if witnesses.is_empty() {
            Verdict::pass()
        } else {
            let mut w = witnesses;
            w.truncate(MAX_WITNESSES);
            Verdict { verdict: Status::Fail, witnesses: w, reason: None, sampled: false }
        }
    }

    pub fn is_pass(&self) -> bool {
        self.verdict == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.verdict == Status::Fail
    }

    fn sampled(mut self) -> Self {
        self.sampled = true;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum A3Mode {
    Strict,
    UpToExchange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub strong: bool,
    /// After a strict A3 failure, try A3′.
    pub fallback_a3x: bool,
    pub limits: SearchLimits,
    pub termination_budget: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            strong: false,
            fallback_a3x: true,
            limits: SearchLimits::default(),
            termination_budget: DEFAULT_TERMINATION_BUDGET,
        }
    }
}

/// All data shared by the checks on one presentation.
pub struct Analysis<'a> {
    pub p: &'a Presentation,
    pub table: ResidualTable,
    pub pairs: Vec<CriticalPair>,
    pub cylinders: Vec<CriticalCylinder>,
    pub verdicts: Vec<Result<CylinderVerdict, String>>,
}

impl<'a> Analysis<'a> {
    pub fn new(p: &'a Presentation, limits: SearchLimits) -> Self {
        let table = derive_residual_table(p);
        let pairs = enumerate_critical_pairs(p, &table);
        let cylinders = enumerate_critical_cylinders(p);
        let verdicts = cylinders
            .iter()
            .map(|c| check_cylinder(p, &table, c, limits).map_err(|e| e.to_string()))
            .collect();
        Analysis { p, table, pairs, cylinders, verdicts }
    }
}

pub fn check_a1(a: &Analysis, budget: usize) -> Verdict {
    let p = a.p;
    let mut witnesses = Vec::new();
    for c in &a.pairs {
        if c.resolved.is_none() {
            witnesses.push(format!("unresolved critical pair {}", c.show(p)));
        } else if a.table.is_ambiguous(&c.f, &c.g) {
            witnesses.push(format!("critical pair {} is resolved by several relations", c.show(p)));
        }
    }
    let term = check_equational_termination(p, budget);
    match term.status {
        TerminationStatus::Terminating => {}
        TerminationStatus::Cycle { words } => witnesses.push(format!("termination cycle {}", show_words(p, &words))),
        TerminationStatus::BudgetExhausted { bound } => {
            if witnesses.is_empty() {
                return Verdict::inconclusive(format!("termination undecided within {bound} words"));
            }
        }
    }
    Verdict::from_witnesses(witnesses)
}

fn decrease_witness(
    name: &str,
    spec: &WeightSpec,
    before_label: &str,
    before: &[u64],
    after_label: &str,
    after: &[u64],
    note: &str,
) -> Option<String> {
    if less(spec.order, after, before) {
        None
    } else {
        Some(format!(
            "{name}({before_label}) = {} ≯ {} = {name}({after_label}){note}",
            show_tuple(before),
            show_tuple(after)
        ))
    }
}

/// Pairs `(g, g/f)` whose weights must decrease.
fn a2_obligations(a: &Analysis) -> Vec<(Step, Path, String)> {
    let p = a.p;
    let mut out = Vec::new();
    for e in &a.table.entries {
        if p.is_equational_step(&e.f) && !p.is_equational_step(&e.g) {
            out.push((e.g.clone(), e.g_after_f.clone(), format!(" after {}", p.show_step(&e.f))));
        }
    }
    if p.mode == Mode::Monoidal {
        let mut r = Residuator::new(p, &a.table);
        for e in (0..p.gens.len()).filter(|&g| p.is_equational(g)) {
            for h in 0..p.gens.len() {
                for mid in all_words(p, EXCHANGE_SAMPLE_MID) {
                    let (se, sh) = (&p.gen(e).source, &p.gen(h).source);
                    let shapes = [
                        (concat_words(&[se, &mid, sh]), 0, se.len() + mid.len()),
                        (concat_words(&[sh, &mid, se]), sh.len() + mid.len(), 0),
                    ];
                    for (w, fo, ho) in shapes {
                        let (Some(f), Some(g)) = (p.step_at(&w, fo, e), p.step_at(&w, ho, h)) else { continue };
                        if p.span(&f).overlaps(&p.span(&g)) {
                            continue;
                        }
                        if let Ok((g_f, _)) = r.step_residual(&f, &g) {
                            out.push((g, g_f, format!(" after {}", p.show_step(&f))));
                        }
                    }
                }
            }
        }
    }
    out
}

fn concat_words(parts: &[&[ObjId]]) -> Word {
    parts.iter().flat_map(|w| w.iter().copied()).collect()
}

pub fn check_a2(a: &Analysis, spec: Option<&WeightSpec>) -> Verdict {
    let p = a.p;
    let obligations = a2_obligations(a);
    if obligations.is_empty() {
        return Verdict::pass();
    }
    let Some(spec) = spec else { return Verdict::inconclusive("no ω₁ weight given") };
    let contexts = if p.mode == Mode::Monoidal { all_words(p, CONTEXT_SAMPLE_LENGTH) } else { vec![Vec::new()] };
    let mut witnesses = Vec::new();
    for (g, g_f, note) in &obligations {
        for x in &contexts {
            for z in &contexts {
                let gw = g.whisker(x, z);
                let gfw = crate::core::whisker(g_f, x, z);
                let before = match eval_step(spec, p, &gw) {
                    Ok(w) => w,
                    Err(e) => return Verdict::inconclusive(e.to_string()),
                };
                let after = match eval_path(spec, p, &gfw) {
                    Ok(w) => w,
                    Err(e) => return Verdict::inconclusive(e.to_string()),
                };
                let xs = short_whisker_note(p, x, z);
                if let Some(w) = decrease_witness("ω₁", spec, &p.show_step(&gw), &before, &p.show_path(&gfw), &after, &format!("{note}{xs}")) {
                    if !witnesses.contains(&w) {
                        witnesses.push(w);
                    }
                }
            }
        }
    }
    let v = Verdict::from_witnesses(witnesses);
    if p.mode == Mode::Monoidal {
        v.sampled()
    } else {
        v
    }
}

fn short_whisker_note(p: &Presentation, x: &[ObjId], z: &[ObjId]) -> String {
    if x.is_empty() && z.is_empty() {
        String::new()
    } else {
        format!(" in context ({}, {})", p.show_word(x), p.show_word(z))
    }
}

/// Exchange bases on short words, against every coinitial vertical step of
/// the matching flavour that is not a critical cylinder.
fn exchange_base_samples(p: &Presentation) -> Vec<(Step, RelationInstance)> {
    let mut out = Vec::new();
    if p.mode == Mode::Path {
        return out;
    }
    for w in all_words(p, EXCHANGE_BASE_SAMPLE_WORD) {
        let steps = p.steps_from(&w);
        for s1 in &steps {
            for s2 in &steps {
                let (a, b) = (p.span(s1), p.span(s2));
                if a.is_empty() || b.is_empty() || a.end > b.start {
                    continue;
                }
                let left = w[..a.start].to_vec();
                let right = w[b.end..].to_vec();
                let mid = w[a.end..b.start].to_vec();
                let inst = RelationInstance {
                    kind: InstanceKind::Exchange(ExchangeShape { f: s1.gen, mid, g: s2.gen }),
                    left,
                    right,
                    dir: Direction::Forward,
                };
                let eq_base = p.is_equational(s1.gen) && p.is_equational(s2.gen);
                for f in &steps {
                    if f == s1 || f == s2 {
                        continue;
                    }
                    if p.is_equational_step(f) || eq_base {
                        out.push((f.clone(), inst.clone()));
                    }
                }
            }
        }
    }
    out
}

pub fn check_a3(a: &Analysis, mode: A3Mode, a1: &Verdict) -> Verdict {
    if !a1.is_pass() {
        return Verdict::inconclusive("A1 does not hold");
    }
    let p = a.p;
    let mut witnesses = Vec::new();
    let mut undecided = Vec::new();
    for (c, v) in a.cylinders.iter().zip(&a.verdicts) {
        let v = match v {
            Ok(v) => v,
            Err(e) => {
                undecided.push(format!("{}: {e}", c.show(p)));
                continue;
            }
        };
        let ok_targets = match mode {
            A3Mode::Strict => v.targets == TargetsEqual::Equal,
            A3Mode::UpToExchange => v.targets != TargetsEqual::Unequal,
        };
        if !ok_targets {
            witnesses.push(format!(
                "cylinder {}: {} != {}",
                c.show(p),
                p.show_path(&v.vertical_lhs),
                p.show_path(&v.vertical_rhs)
            ));
        } else if v.top.is_none() {
            undecided.push(format!("{}: {}", c.show(p), v.notes.join("; ")));
        }
    }
    let mut sampled = false;
    if mode == A3Mode::UpToExchange {
        sampled = true;
        let mut r = Residuator::new(p, &a.table);
        for (f, inst) in exchange_base_samples(p) {
            let fp = Path::single(p, f.clone());
            let (Ok((l, _)), Ok((rr, _))) = (r.residuals(&inst.lhs(p), &fp), r.residuals(&inst.rhs(p), &fp)) else { continue };
            if !exchange_equal(p, &l, &rr) {
                let w = format!(
                    "residuals of {} after {} are not exchange-equal: {} vs {}",
                    inst.show(p),
                    p.show_step(&f),
                    p.show_path(&l),
                    p.show_path(&rr)
                );
                witnesses.push(w);
            }
        }
    }
    if witnesses.is_empty() && !undecided.is_empty() {
        let mut v = Verdict::inconclusive("some cylinders could not be closed within the search budget");
        v.witnesses = undecided;
        v.sampled = sampled;
        return v;
    }
    let v = Verdict::from_witnesses(witnesses);
    if sampled {
        v.sampled()
    } else {
        v
    }
}

/// Non-critical cylinders whose vertical step is disjoint from an equational
/// base, used to test that ω₂ decreases when the base moves along.
fn trivial_base_samples(p: &Presentation) -> Vec<(Step, RelationInstance, RelationInstance)> {
    let mut out = Vec::new();
    if p.mode == Mode::Path {
        return out;
    }
    let mut bases: Vec<RelationInstance> = Vec::new();
    for f1 in (0..p.gens.len()).filter(|&g| p.is_equational(g)) {
        for f2 in (0..p.gens.len()).filter(|&g| p.is_equational(g)) {
            for mid in all_words(p, 1) {
                bases.push(RelationInstance {
                    kind: InstanceKind::Exchange(ExchangeShape { f: f1, mid, g: f2 }),
                    left: Vec::new(),
                    right: Vec::new(),
                    dir: Direction::Forward,
                });
            }
        }
    }
    for (r, _) in p.rels.iter().enumerate() {
        let inst = RelationInstance::named(r, Vec::new(), Vec::new(), Direction::Forward);
        if p.is_equational_path(&inst.lhs(p)) && p.is_equational_path(&inst.rhs(p)) {
            bases.push(inst);
        }
    }
    let mut contexts: Vec<(Word, Word)> = Vec::new();
    let words = all_words(p, CONTEXT_SAMPLE_LENGTH);
    for x in &words {
        for z in &words {
            if x.len() + z.len() <= CONTEXT_SAMPLE_LENGTH {
                contexts.push((x.clone(), z.clone()));
            }
        }
    }
    contexts.sort_by_key(|(x, z)| x.len() + z.len());
    for (x, z) in &contexts {
        for base in &bases {
            let inst = base.whisker(x, z);
            let w = inst.source_word(p);
            let win = inst.window(p);
            for f in p.steps_from(&w) {
                if p.is_equational_step(&f) {
                    continue;
                }
                let span = p.span(&f);
                let t = p.step_target(&f);
                let moved = if span.end <= win.start {
                    let cut = win.start - (span.end - span.start) + p.gen(f.gen).target.len();
                    RelationInstance { left: t[..cut].to_vec(), ..inst.clone() }
                } else if span.start >= win.end {
                    RelationInstance { right: t[win.end..].to_vec(), ..inst.clone() }
                } else {
                    continue;
                };
                out.push((f, inst.clone(), moved));
            }
        }
    }
    out
}

pub fn check_a4(a: &Analysis, o: &crate::core::WeightSet, strong: bool, a3: &Verdict) -> Verdict {
    if !a3.is_pass() {
        return Verdict::inconclusive("the cylinder property was not established");
    }
    let p = a.p;
    let mut witnesses = Vec::new();
    for (c, v) in a.cylinders.iter().zip(&a.verdicts) {
        let Ok(v) = v else { return Verdict::inconclusive(format!("cylinder {} has no verdict", c.show(p))) };
        if strong && v.vertical_is_step() {
            continue;
        }
        let Some(top) = &v.top else { return Verdict::inconclusive(format!("cylinder {} has no top trace", c.show(p))) };
        let Some(spec) = o.omega2_for(c.flavor) else { return Verdict::inconclusive("no ω₂ weight given") };
        let (base_w, top_w) = match (eval_instance(spec, p, &c.alpha), eval_trace(spec, p, top)) {
            (Ok(b), Ok(t)) => (b, t),
            (Err(e), _) | (_, Err(e)) => return Verdict::inconclusive(e.to_string()),
        };
        let note = format!(" against {}", p.show_step(&c.f));
        if let Some(w) = decrease_witness("ω₂", spec, &c.alpha.show(p), &base_w, &top.show(p), &top_w, &note) {
            witnesses.push(w);
        }
    }
    let mut sampled = false;
    if !strong {
        let samples = trivial_base_samples(p);
        if !samples.is_empty() {
            sampled = true;
            let Some(spec) = o.omega2_for(Flavor::EquationalBase) else { return Verdict::inconclusive("no ω₂ weight given") };
            let mut found = Vec::new();
            for (f, inst, moved) in samples {
                let (b, m) = match (eval_instance(spec, p, &inst), eval_instance(spec, p, &moved)) {
                    (Ok(b), Ok(m)) => (b, m),
                    (Err(e), _) | (_, Err(e)) => return Verdict::inconclusive(e.to_string()),
                };
                let note = format!(" after {}", p.show_step(&f));
                if let Some(w) = decrease_witness("ω₂", spec, &inst.label(p), &b, &moved.label(p), &m, &note) {
                    // Strict increases first, then smaller contexts, left contexts before right ones.
                    let key = (!less(spec.order, &b, &m), inst.left.len() + inst.right.len(), inst.right.len());
                    found.push((key, w));
                }
            }
            found.sort_by_key(|(k, _)| *k);
            witnesses.extend(found.into_iter().map(|(_, w)| w));
        }
    }
    let v = Verdict::from_witnesses(witnesses);
    if sampled {
        v.sampled()
    } else {
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assumptions {
    pub a1: Verdict,
    pub a2: Verdict,
    pub a3: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a3x: Option<Verdict>,
    pub a4: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairReport {
    pub word: String,
    pub f: String,
    pub g: String,
    pub resolved_by: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CylinderReport {
    pub vertical: String,
    pub base: String,
    pub flavor: Flavor,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_targets_equal: Option<TargetsEqual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_trace: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub mode: Mode,
    pub strong: bool,
    pub assumptions: Assumptions,
    pub critical_pairs: Vec<PairReport>,
    pub cylinders: Vec<CylinderReport>,
    pub diagnostics: Vec<String>,
    pub coherent: Status,
    pub faithful_embedding: Status,
}

/// A1 to A4 on one presentation with the given weights.
pub fn run_assumptions(a: &Analysis, weights: &crate::core::WeightSet, opts: CheckOptions) -> Assumptions {
    let a1 = check_a1(a, opts.termination_budget);
    let a2 = if a1.is_pass() { check_a2(a, weights.omega1.as_ref()) } else { Verdict::inconclusive("A1 does not hold") };
    let a3 = check_a3(a, A3Mode::Strict, &a1);
    let a3x = if opts.fallback_a3x && a3.is_fail() { Some(check_a3(a, A3Mode::UpToExchange, &a1)) } else { None };
    let cyl = a3x.as_ref().unwrap_or(&a3);
    let a4 = if a1.is_pass() { check_a4(a, weights, opts.strong, cyl) } else { Verdict::inconclusive("A1 does not hold") };
    Assumptions { a1, a2, a3, a3x, a4 }
}

pub fn coherent(s: &Assumptions) -> Status {
    let cyl = s.a3x.as_ref().unwrap_or(&s.a3);
    let all = [&s.a1, &s.a2, cyl, &s.a4];
    if all.iter().all(|v| v.is_pass()) {
        Status::Pass
    } else if all.iter().any(|v| v.is_fail()) {
        Status::Fail
    } else {
        Status::Inconclusive
    }
}

pub fn check_all(p: &Presentation, opts: CheckOptions) -> CheckReport {
    let a = Analysis::new(p, opts.limits);
    let assumptions = run_assumptions(&a, &p.weights.own, opts);
    let coh = coherent(&assumptions);
    let faithful = if coh == Status::Pass {
        let op = opposite(p);
        let ao = Analysis::new(&op, opts.limits);
        let so = run_assumptions(&ao, &op.weights.own, opts);
        if coherent(&so) == Status::Pass {
            Status::Pass
        } else {
            Status::Inconclusive
        }
    } else {
        Status::Inconclusive
    };
    let critical_pairs = a
        .pairs
        .iter()
        .map(|c| PairReport {
            word: p.show_word(&c.word),
            f: p.show_step(&c.f),
            g: p.show_step(&c.g),
            resolved_by: c.resolved.map(|i| p.rels[a.table.entries[i].relation].name.clone()),
        })
        .collect();
    let cylinders = a
        .cylinders
        .iter()
        .zip(&a.verdicts)
        .map(|(c, v)| match v {
            Ok(v) => CylinderReport {
                vertical: p.show_step(&c.f),
                base: c.alpha.show(p),
                flavor: c.flavor,
                residual_targets_equal: Some(v.targets),
                top_trace: v.top.as_ref().map(|t| t.show(p)),
                notes: v.notes.clone(),
            },
            Err(e) => CylinderReport {
                vertical: p.show_step(&c.f),
                base: c.alpha.show(p),
                flavor: c.flavor,
                residual_targets_equal: None,
                top_trace: None,
                notes: vec![e.clone()],
            },
        })
        .collect();
    CheckReport {
        mode: p.mode,
        strong: opts.strong,
        assumptions,
        critical_pairs,
        cylinders,
        diagnostics: a.table.diagnostics.iter().map(|d| d.message.clone()).collect(),
        coherent: coh,
        faithful_embedding: faithful,
    }
}
