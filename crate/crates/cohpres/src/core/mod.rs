//! Data model for presentations modulo: object words, rewriting steps, paths,
//! relation instances and 2-cell traces, plus the text format.

mod dsl;
mod instance;
pub mod search;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use dsl::{
    parse_path, parse_presentation, parse_step, parse_unchecked, parse_word, print_presentation, show_term,
    ParseError,
};
pub use instance::{
    apply_cell, exchange_applications, exchange_at, exchange_canonical, exchange_class, exchange_equal,
    exchange_instance, exchange_trace, named_applications, swap_steps, CellStep, CellTrace, Direction,
    ExchangeShape, InstanceKind, RelationInstance, TraceError,
};

pub type ObjId = u16;
pub type GenId = usize;
/// A word over object generators; the empty word is the monoidal unit.
pub type Word = Vec<ObjId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Path,
    Monoidal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorGen {
    pub name: String,
    pub source: Word,
    pub target: Word,
    pub equational: bool,
}

/// One generator applied in a context: `left · gen · right`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub left: Word,
    pub gen: GenId,
    pub right: Word,
}

impl Step {
    pub fn new(left: Word, gen: GenId, right: Word) -> Self {
        Step { left, gen, right }
    }

    pub fn offset(&self) -> usize {
        self.left.len()
    }

    pub fn whisker(&self, x: &[ObjId], z: &[ObjId]) -> Step {
        Step {
            left: concat(x, &self.left),
            gen: self.gen,
            right: concat(&self.right, z),
        }
    }
}

/// A composable sequence of steps, in application order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub source: Word,
    pub steps: Vec<Step>,
}

impl Path {
    pub fn id(source: Word) -> Self {
        Path { source, steps: Vec::new() }
    }

    pub fn single(p: &Presentation, step: Step) -> Self {
        Path { source: p.step_source(&step), steps: vec![step] }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn target(&self, p: &Presentation) -> Word {
        match self.steps.last() {
            Some(s) => p.step_target(s),
            None => self.source.clone(),
        }
    }

    /// Concatenation without a typing check; see [`compose`] for the checked version.
    pub fn then(&self, other: &Path) -> Path {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Path { source: self.source.clone(), steps }
    }

    pub fn prefix(&self, p: &Presentation, n: usize) -> Path {
        let _ = p;
        Path { source: self.source.clone(), steps: self.steps[..n].to_vec() }
    }

    pub fn suffix(&self, p: &Presentation, n: usize) -> Path {
        let source = if n == 0 { self.source.clone() } else { p.step_target(&self.steps[n - 1]) };
        Path { source, steps: self.steps[n..].to_vec() }
    }

    /// Word reached after the first `n` steps.
    pub fn word_at(&self, p: &Presentation, n: usize) -> Word {
        if n == 0 {
            self.source.clone()
        } else {
            p.step_target(&self.steps[n - 1])
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub lhs: Path,
    pub rhs: Path,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Lex,
    Pointwise,
}

/// Primitive weight terms. Contexts are the outer contexts of a step or of a
/// relation instance; the `source` primitives look at the whole source word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Prim {
    Const(u64),
    CountL(ObjId),
    CountR(ObjId),
    CtxTransp(ObjId, ObjId),
    Count(ObjId),
    Transp(ObjId, ObjId),
}

/// A sum of primitives.
pub type Term = Vec<Prim>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSpec {
    pub dim: usize,
    pub order: Order,
    pub entries: Vec<(String, Vec<Term>)>,
}

impl WeightSpec {
    pub fn entry(&self, key: &str) -> Option<&[Term]> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, t)| t.as_slice())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    EquationalVertical,
    EquationalBase,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightSet {
    pub omega1: Option<WeightSpec>,
    pub omega2: Option<WeightSpec>,
    pub omega2_vertical: Option<WeightSpec>,
    pub omega2_base: Option<WeightSpec>,
}

impl WeightSet {
    pub fn is_empty(&self) -> bool {
        self.omega1.is_none()
            && self.omega2.is_none()
            && self.omega2_vertical.is_none()
            && self.omega2_base.is_none()
    }

    /// The ω₂ to use for a cylinder flavour, falling back to the shared block.
    pub fn omega2_for(&self, flavor: Flavor) -> Option<&WeightSpec> {
        let specific = match flavor {
            Flavor::EquationalVertical => self.omega2_vertical.as_ref(),
            Flavor::EquationalBase => self.omega2_base.as_ref(),
        };
        specific.or(self.omega2.as_ref())
    }
}

/// Weights for the presentation itself and for its opposite.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Weights {
    pub own: WeightSet,
    pub opposite: WeightSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub mode: Mode,
    pub objects: Vec<String>,
    pub gens: Vec<MorGen>,
    pub equational: Vec<String>,
    pub rels: Vec<Relation>,
    pub weights: Weights,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("cannot compose: target {left} does not match source {right}")]
    Mismatch { left: String, right: String },
    #[error("tensoring with context is not available in path mode")]
    PathMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Half-open interval of letter positions; an empty span marks the gap at `start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// An empty span meets a nonempty one only when its gap lies strictly
    /// inside it; two empty spans meet when they mark the same gap.
    pub fn overlaps(&self, other: &Span) -> bool {
        match (self.is_empty(), other.is_empty()) {
            (false, false) => self.start < other.end && other.start < self.end,
            (true, false) => other.start < self.start && self.start < other.end,
            (false, true) => self.start < other.start && other.start < self.end,
            (true, true) => self.start == other.start,
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

pub fn concat(a: &[ObjId], b: &[ObjId]) -> Word {
    let mut w = Vec::with_capacity(a.len() + b.len());
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w
}

pub fn concat3(a: &[ObjId], b: &[ObjId], c: &[ObjId]) -> Word {
    let mut w = Vec::with_capacity(a.len() + b.len() + c.len());
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w.extend_from_slice(c);
    w
}

/// Checked composition in application order: `p1` then `p2`.
pub fn compose(p: &Presentation, p1: &Path, p2: &Path) -> Result<Path, CoreError> {
    let t = p1.target(p);
    if t != p2.source {
        return Err(CoreError::Mismatch { left: p.show_word(&t), right: p.show_word(&p2.source) });
    }
    Ok(p1.then(p2))
}

/// Whiskering `x · path · z`.
pub fn tensor_ctx(p: &Presentation, x: &[ObjId], path: &Path, z: &[ObjId]) -> Result<Path, CoreError> {
    if p.mode == Mode::Path && !(x.is_empty() && z.is_empty()) {
        return Err(CoreError::PathMode);
    }
    Ok(whisker(path, x, z))
}

pub fn whisker(path: &Path, x: &[ObjId], z: &[ObjId]) -> Path {
    Path {
        source: concat3(x, &path.source, z),
        steps: path.steps.iter().map(|s| s.whisker(x, z)).collect(),
    }
}

/// Occurrences of `needle` in `hay` as start offsets; the empty word occurs at every gap.
pub fn occurrences(hay: &[ObjId], needle: &[ObjId]) -> Vec<usize> {
    if needle.len() > hay.len() {
        return Vec::new();
    }
    (0..=hay.len() - needle.len()).filter(|&i| &hay[i..i + needle.len()] == needle).collect()
}

/// Number of pairs `i < j` with `w[i] = b` and `w[j] = a`.
pub fn transposition_count(w: &[ObjId], b: ObjId, a: ObjId) -> u64 {
    let mut seen_b = 0u64;
    let mut total = 0u64;
    for &c in w {
        if c == a {
            total += seen_b;
        }
        if c == b {
            seen_b += 1;
        }
    }
    total
}

impl Presentation {
    pub fn new(mode: Mode) -> Self {
        Presentation {
            mode,
            objects: Vec::new(),
            gens: Vec::new(),
            equational: Vec::new(),
            rels: Vec::new(),
            weights: Weights::default(),
        }
    }

    pub fn object_id(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name).map(|i| i as ObjId)
    }

    pub fn gen_id(&self, name: &str) -> Option<GenId> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn rel_id(&self, name: &str) -> Option<usize> {
        self.rels.iter().position(|r| r.name == name)
    }

    pub fn gen(&self, g: GenId) -> &MorGen {
        &self.gens[g]
    }

    pub fn is_equational(&self, g: GenId) -> bool {
        self.gens[g].equational
    }

    pub fn is_equational_step(&self, s: &Step) -> bool {
        self.gens[s.gen].equational
    }

    pub fn is_equational_path(&self, path: &Path) -> bool {
        path.steps.iter().all(|s| self.is_equational_step(s))
    }

    pub fn has_equational(&self) -> bool {
        self.gens.iter().any(|g| g.equational)
    }

    pub fn step_source(&self, s: &Step) -> Word {
        concat3(&s.left, &self.gens[s.gen].source, &s.right)
    }

    pub fn step_target(&self, s: &Step) -> Word {
        concat3(&s.left, &self.gens[s.gen].target, &s.right)
    }

    /// Span of the step's source factor in its source word.
    pub fn span(&self, s: &Step) -> Span {
        let start = s.left.len();
        Span { start, end: start + self.gens[s.gen].source.len() }
    }

    /// Span of the step's output factor in its target word.
    pub fn out_span(&self, s: &Step) -> Span {
        let start = s.left.len();
        Span { start, end: start + self.gens[s.gen].target.len() }
    }

    /// The step applying `gen` at `offset` of `word`, if the source matches there.
    pub fn step_at(&self, word: &[ObjId], offset: usize, gen: GenId) -> Option<Step> {
        let src = &self.gens[gen].source;
        if offset + src.len() > word.len() || &word[offset..offset + src.len()] != src.as_slice() {
            return None;
        }
        Some(Step {
            left: word[..offset].to_vec(),
            gen,
            right: word[offset + src.len()..].to_vec(),
        })
    }

    /// All steps applicable to `word`, ordered by offset then generator.
    pub fn steps_from(&self, word: &[ObjId]) -> Vec<Step> {
        let mut out = Vec::new();
        for off in 0..=word.len() {
            for g in 0..self.gens.len() {
                if self.mode == Mode::Path && (off > 0 || self.gens[g].source.len() != word.len()) {
                    continue;
                }
                if let Some(s) = self.step_at(word, off, g) {
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn relation_source(&self, r: usize) -> Word {
        self.rels[r].lhs.source.clone()
    }

    /// Checks that consecutive steps compose starting from the stored source.
    pub fn check_path(&self, path: &Path) -> Result<(), String> {
        let mut cur = path.source.clone();
        for (i, s) in path.steps.iter().enumerate() {
            if s.gen >= self.gens.len() {
                return Err(format!("step {} uses an unknown generator", i + 1));
            }
            let src = self.step_source(s);
            if src != cur {
                return Err(format!(
                    "step {} `{}` starts at {} but the path is at {}",
                    i + 1,
                    self.show_step(s),
                    self.show_word(&src),
                    self.show_word(&cur)
                ));
            }
            if self.mode == Mode::Path && !(s.left.is_empty() && s.right.is_empty()) {
                return Err(format!("step {} has a context in path mode", i + 1));
            }
            cur = self.step_target(s);
        }
        Ok(())
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut diag = |m: String| out.push(Diagnostic { message: m });
        for (i, o) in self.objects.iter().enumerate() {
            if self.objects[..i].contains(o) {
                diag(format!("duplicate object `{o}`"));
            }
        }
        for (i, g) in self.gens.iter().enumerate() {
            if self.gens[..i].iter().any(|h| h.name == g.name) {
                diag(format!("duplicate generator `{}`", g.name));
            }
            let n = self.objects.len() as ObjId;
            if g.source.iter().chain(g.target.iter()).any(|&c| c >= n) {
                diag(format!("generator `{}` uses an undeclared object", g.name));
            }
            if self.mode == Mode::Path && (g.source.len() != 1 || g.target.len() != 1) {
                diag(format!("generator `{}` must have single-object endpoints in path mode", g.name));
            }
            if g.equational != self.equational.contains(&g.name) {
                diag(format!("generator `{}` disagrees with the equational set", g.name));
            }
        }
        for e in &self.equational {
            if self.gen_id(e).is_none() {
                diag(format!("equational name `{e}` is not a declared generator"));
            }
        }
        for (i, r) in self.rels.iter().enumerate() {
            if self.rels[..i].iter().any(|q| q.name == r.name) {
                diag(format!("duplicate relation `{}`", r.name));
            }
            for (side, path) in [("left", &r.lhs), ("right", &r.rhs)] {
                if let Err(e) = self.check_path(path) {
                    diag(format!("relation `{}`, {side} side: {e}", r.name));
                }
            }
            if r.lhs.source != r.rhs.source {
                diag(format!("relation `{}`: sides have different sources", r.name));
            } else if self.check_path(&r.lhs).is_ok()
                && self.check_path(&r.rhs).is_ok()
                && r.lhs.target(self) != r.rhs.target(self)
            {
                diag(format!("relation `{}`: sides have different targets", r.name));
            }
        }
        out
    }

    /// Object names are juxtaposed when all are single characters.
    fn compact_words(&self) -> bool {
        self.objects.iter().all(|o| o.chars().count() == 1)
    }

    pub fn show_word(&self, w: &[ObjId]) -> String {
        if w.is_empty() {
            return "0".to_string();
        }
        self.show_ctx(w)
    }

    fn show_ctx(&self, w: &[ObjId]) -> String {
        let names = w.iter().map(|&c| self.objects[c as usize].as_str());
        if self.compact_words() {
            names.collect()
        } else {
            names.collect::<Vec<_>>().join(" ")
        }
    }

    pub fn show_step(&self, s: &Step) -> String {
        let sep = if self.compact_words() { "" } else { " " };
        let mut out = self.show_ctx(&s.left);
        if !s.left.is_empty() {
            out.push_str(sep);
        }
        out.push('[');
        out.push_str(&self.gens[s.gen].name);
        out.push(']');
        if !s.right.is_empty() {
            out.push_str(sep);
        }
        out.push_str(&self.show_ctx(&s.right));
        out
    }

    pub fn show_path(&self, path: &Path) -> String {
        if path.steps.is_empty() {
            return format!("id {}", self.show_word(&path.source));
        }
        path.steps.iter().map(|s| self.show_step(s)).collect::<Vec<_>>().join(" ; ")
    }
}
