//! Relation instances (named or exchange) in context, and 2-cell traces.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::{concat, concat3, occurrences, whisker, GenId, Mode, Path, Presentation, Span, Step, Word};

/// The exchange cell commuting `f` and `g` across `mid`, outer contexts excluded.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExchangeShape {
    pub f: GenId,
    pub mid: Word,
    pub g: GenId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InstanceKind {
    Named(usize),
    Exchange(ExchangeShape),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// A relation whiskered by `left` and `right`, used in one direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationInstance {
    pub kind: InstanceKind,
    pub left: Word,
    pub right: Word,
    pub dir: Direction,
}

impl RelationInstance {
    pub fn named(r: usize, left: Word, right: Word, dir: Direction) -> Self {
        RelationInstance { kind: InstanceKind::Named(r), left, right, dir }
    }

    pub fn is_exchange(&self) -> bool {
        matches!(self.kind, InstanceKind::Exchange(_))
    }

    /// The relation's left side `[f] mid src(g) ; tgt(f) mid [g]` for exchanges.
    pub fn lhs(&self, p: &Presentation) -> Path {
        match &self.kind {
            InstanceKind::Named(r) => whisker(&p.rels[*r].lhs, &self.left, &self.right),
            InstanceKind::Exchange(e) => {
                let (f, g) = (p.gen(e.f), p.gen(e.g));
                let s1 = Step::new(self.left.clone(), e.f, concat3(&e.mid, &g.source, &self.right));
                let s2 = Step::new(concat3(&self.left, &f.target, &e.mid), e.g, self.right.clone());
                Path { source: p.step_source(&s1), steps: vec![s1, s2] }
            }
        }
    }

    /// The relation's right side `src(f) mid [g] ; [f] mid tgt(g)` for exchanges.
    pub fn rhs(&self, p: &Presentation) -> Path {
        match &self.kind {
            InstanceKind::Named(r) => whisker(&p.rels[*r].rhs, &self.left, &self.right),
            InstanceKind::Exchange(e) => {
                let (f, g) = (p.gen(e.f), p.gen(e.g));
                let s1 = Step::new(concat3(&self.left, &f.source, &e.mid), e.g, self.right.clone());
                let s2 = Step::new(self.left.clone(), e.f, concat3(&e.mid, &g.target, &self.right));
                Path { source: p.step_source(&s1), steps: vec![s1, s2] }
            }
        }
    }

    /// The side this instance rewrites.
    pub fn from_side(&self, p: &Presentation) -> Path {
        match self.dir {
            Direction::Forward => self.lhs(p),
            Direction::Backward => self.rhs(p),
        }
    }

    /// The side this instance produces.
    pub fn to_side(&self, p: &Presentation) -> Path {
        match self.dir {
            Direction::Forward => self.rhs(p),
            Direction::Backward => self.lhs(p),
        }
    }

    pub fn inverse(&self) -> Self {
        RelationInstance { dir: self.dir.flip(), ..self.clone() }
    }

    pub fn oriented(&self, dir: Direction) -> Self {
        RelationInstance { dir, ..self.clone() }
    }

    pub fn whisker(&self, x: &[u16], z: &[u16]) -> Self {
        RelationInstance {
            kind: self.kind.clone(),
            left: concat(x, &self.left),
            right: concat(&self.right, z),
            dir: self.dir,
        }
    }

    pub fn source_word(&self, p: &Presentation) -> Word {
        self.lhs(p).source
    }

    /// The letters of the source word not covered by the outer contexts.
    pub fn window(&self, p: &Presentation) -> Span {
        let n = self.source_word(p).len();
        Span { start: self.left.len(), end: n - self.right.len() }
    }

    /// Name with contexts, e.g. `b·alpha` or `ab·χ(g,g)`.
    pub fn label(&self, p: &Presentation) -> String {
        let core = match &self.kind {
            InstanceKind::Named(r) => p.rels[*r].name.clone(),
            InstanceKind::Exchange(e) => {
                let mid = if e.mid.is_empty() { String::new() } else { p.show_word(&e.mid) };
                if mid.is_empty() {
                    format!("χ({},{})", p.gen(e.f).name, p.gen(e.g).name)
                } else {
                    format!("χ({},{},{})", p.gen(e.f).name, mid, p.gen(e.g).name)
                }
            }
        };
        let l = if self.left.is_empty() { String::new() } else { format!("{}·", p.show_word(&self.left)) };
        let r = if self.right.is_empty() { String::new() } else { format!("·{}", p.show_word(&self.right)) };
        format!("{l}{core}{r}")
    }

    pub fn show(&self, p: &Presentation) -> String {
        match self.dir {
            Direction::Forward => self.label(p),
            Direction::Backward => format!("{}⁻", self.label(p)),
        }
    }
}

/// One rewrite: at step position `pos` of the current path, the instance's
/// `from_side` is replaced by its `to_side`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellStep {
    pub pos: usize,
    pub inst: RelationInstance,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("cell {index}: {msg}")]
    Mismatch { index: usize, msg: String },
}

/// A 2-cell given as a sequence of single rewrites starting from `source`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellTrace {
    pub source: Path,
    pub cells: Vec<CellStep>,
}

/// Applies one rewrite to `path`, or explains why it does not match.
pub fn apply_cell(p: &Presentation, path: &Path, cell: &CellStep) -> Result<Path, String> {
    let from = cell.inst.from_side(p);
    let to = cell.inst.to_side(p);
    let k = from.steps.len();
    if cell.pos > path.steps.len() || cell.pos + k > path.steps.len() {
        return Err(format!("position {} is outside a path of length {}", cell.pos, path.steps.len()));
    }
    if path.word_at(p, cell.pos) != from.source {
        return Err(format!(
            "the path is at {} but {} starts at {}",
            p.show_word(&path.word_at(p, cell.pos)),
            cell.inst.show(p),
            p.show_word(&from.source)
        ));
    }
    if path.steps[cell.pos..cell.pos + k] != from.steps[..] {
        return Err(format!("{} does not match the path at position {}", cell.inst.show(p), cell.pos));
    }
    let mut steps = path.steps[..cell.pos].to_vec();
    steps.extend(to.steps);
    steps.extend_from_slice(&path.steps[cell.pos + k..]);
    Ok(Path { source: path.source.clone(), steps })
}

impl CellTrace {
    pub fn empty(source: Path) -> Self {
        CellTrace { source, cells: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// All intermediate paths, starting with the source.
    pub fn paths(&self, p: &Presentation) -> Result<Vec<Path>, TraceError> {
        let mut out = vec![self.source.clone()];
        for (index, c) in self.cells.iter().enumerate() {
            let next = apply_cell(p, out.last().unwrap(), c).map_err(|msg| TraceError::Mismatch { index, msg })?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn target(&self, p: &Presentation) -> Result<Path, TraceError> {
        Ok(self.paths(p)?.pop().unwrap())
    }

    pub fn validate(&self, p: &Presentation) -> Result<(), TraceError> {
        self.paths(p).map(|_| ())
    }

    pub fn named_count(&self) -> usize {
        self.cells.iter().filter(|c| !c.inst.is_exchange()).count()
    }

    pub fn is_exchange_only(&self) -> bool {
        self.cells.iter().all(|c| c.inst.is_exchange())
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn then(mut self, other: CellTrace) -> CellTrace {
        self.cells.extend(other.cells);
        self
    }

    pub fn inverse(&self, p: &Presentation) -> Result<CellTrace, TraceError> {
        let paths = self.paths(p)?;
        let cells = self
            .cells
            .iter()
            .rev()
            .map(|c| CellStep { pos: c.pos, inst: c.inst.inverse() })
            .collect();
        Ok(CellTrace { source: paths.last().unwrap().clone(), cells })
    }

    /// Runs the trace on the middle segment of `prefix ; source ; suffix`.
    pub fn lift(&self, prefix: &Path, suffix: &Path) -> CellTrace {
        let source = prefix.then(&self.source).then(suffix);
        let k = prefix.steps.len();
        let cells = self.cells.iter().map(|c| CellStep { pos: c.pos + k, inst: c.inst.clone() }).collect();
        CellTrace { source, cells }
    }

    pub fn whisker(&self, x: &[u16], z: &[u16]) -> CellTrace {
        CellTrace {
            source: whisker(&self.source, x, z),
            cells: self.cells.iter().map(|c| CellStep { pos: c.pos, inst: c.inst.whisker(x, z) }).collect(),
        }
    }

    pub fn show(&self, p: &Presentation) -> String {
        if self.cells.is_empty() {
            return "refl".into();
        }
        self.cells.iter().map(|c| c.inst.show(p)).collect::<Vec<_>>().join(" ; ")
    }
}

/// Every single named-relation rewrite applicable somewhere in `path`, in
/// either direction.
pub fn named_applications(p: &Presentation, path: &Path) -> Vec<CellStep> {
    let mut out = Vec::new();
    let n = path.steps.len();
    for pos in 0..=n {
        let here = path.word_at(p, pos);
        for (r, rel) in p.rels.iter().enumerate() {
            for (side, dir) in [(&rel.lhs, Direction::Forward), (&rel.rhs, Direction::Backward)] {
                let k = side.steps.len();
                if k == 0 {
                    for i in occurrences(&here, &side.source) {
                        let x = here[..i].to_vec();
                        let z = here[i + side.source.len()..].to_vec();
                        if p.mode == Mode::Path && !(x.is_empty() && z.is_empty()) {
                            continue;
                        }
                        out.push(CellStep { pos, inst: RelationInstance::named(r, x, z, dir) });
                    }
                    continue;
                }
                if pos + k > n {
                    continue;
                }
                let first = &path.steps[pos];
                let s0 = &side.steps[0];
                if first.gen != s0.gen
                    || !first.left.ends_with(&s0.left)
                    || !first.right.starts_with(&s0.right)
                {
                    continue;
                }
                let x = &first.left[..first.left.len() - s0.left.len()];
                let z = &first.right[s0.right.len()..];
                let w = whisker(side, x, z);
                if w.steps[..] == path.steps[pos..pos + k] {
                    out.push(CellStep { pos, inst: RelationInstance::named(r, x.to_vec(), z.to_vec(), dir) });
                }
            }
        }
    }
    out
}

/// If consecutive steps `s1 ; s2` act on disjoint factors, the exchange
/// instance whose `from_side` is exactly `s1 ; s2`.
pub fn exchange_instance(p: &Presentation, s1: &Step, s2: &Step) -> Option<RelationInstance> {
    if p.mode == Mode::Path {
        return None;
    }
    let w0 = p.step_source(s1);
    let (o1, a1, b1) = (s1.left.len(), p.gen(s1.gen).source.len(), p.gen(s1.gen).target.len());
    let (o2, a2) = (s2.left.len(), p.gen(s2.gen).source.len());
    let out1 = Span { start: o1, end: o1 + b1 };
    let in2 = Span { start: o2, end: o2 + a2 };
    if out1.overlaps(&in2) {
        return None;
    }
    let (inst, g_span) = if o2 >= o1 + b1 {
        // s2 acts to the right of s1's output
        let o2w = o2 - b1 + a1;
        let mid = w0[o1 + a1..o2w].to_vec();
        let inst = RelationInstance {
            kind: InstanceKind::Exchange(ExchangeShape { f: s1.gen, mid, g: s2.gen }),
            left: s1.left.clone(),
            right: w0[o2w + a2..].to_vec(),
            dir: Direction::Forward,
        };
        (inst, Span { start: o2w, end: o2w + a2 })
    } else if o2 + a2 <= o1 {
        let mid = w0[o2 + a2..o1].to_vec();
        let inst = RelationInstance {
            kind: InstanceKind::Exchange(ExchangeShape { f: s2.gen, mid, g: s1.gen }),
            left: w0[..o2].to_vec(),
            right: s1.right.clone(),
            dir: Direction::Backward,
        };
        (inst, Span { start: o2, end: o2 + a2 })
    } else {
        return None;
    };
    let span1 = Span { start: o1, end: o1 + a1 };
    if span1.overlaps(&g_span) {
        return None;
    }
    Some(inst)
}

/// The exchange rewrite swapping steps `pos` and `pos + 1`, if they commute.
pub fn exchange_at(p: &Presentation, path: &Path, pos: usize) -> Option<CellStep> {
    let (s1, s2) = (path.steps.get(pos)?, path.steps.get(pos + 1)?);
    exchange_instance(p, s1, s2).map(|inst| CellStep { pos, inst })
}

pub fn exchange_applications(p: &Presentation, path: &Path) -> Vec<CellStep> {
    (0..path.steps.len().saturating_sub(1)).filter_map(|i| exchange_at(p, path, i)).collect()
}

/// The two steps after commuting `s1 ; s2`.
pub fn swap_steps(p: &Presentation, s1: &Step, s2: &Step) -> Option<(Step, Step)> {
    let inst = exchange_instance(p, s1, s2)?;
    let mut to = inst.to_side(p).steps.into_iter();
    Some((to.next()?, to.next()?))
}

/// Canonical representative of the exchange class of `path`: repeatedly
/// bring to the front, among the steps that commute to the front, the one
/// starting leftmost (an empty-source step before a nonempty one at the
/// same position).
pub fn exchange_canonical(p: &Presentation, path: &Path) -> Path {
    if p.mode == Mode::Path {
        return path.clone();
    }
    let mut rest = path.steps.clone();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<((usize, bool), Vec<Step>)> = None;
        for j in 0..rest.len() {
            let mut seq = rest.clone();
            let mut ok = true;
            for k in (1..=j).rev() {
                match swap_steps(p, &seq[k - 1], &seq[k]) {
                    Some((a, b)) => {
                        seq[k - 1] = a;
                        seq[k] = b;
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let front = &seq[0];
            let key = (front.offset(), !p.gen(front.gen).source.is_empty());
            if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                best = Some((key, seq));
            }
        }
        let (_, mut seq) = best.expect("the first step always moves to the front");
        out.push(seq.remove(0));
        rest = seq;
    }
    Path { source: path.source.clone(), steps: out }
}

pub fn exchange_equal(p: &Presentation, a: &Path, b: &Path) -> bool {
    a.source == b.source && a.steps.len() == b.steps.len() && exchange_canonical(p, a) == exchange_canonical(p, b)
}

/// All paths reachable from `path` by exchanges, up to `cap` of them.
pub fn exchange_class(p: &Presentation, path: &Path, cap: usize) -> Vec<Path> {
    let mut seen = vec![path.clone()];
    let mut idx: HashMap<Path, usize> = HashMap::from([(path.clone(), 0)]);
    let mut i = 0;
    while i < seen.len() && seen.len() < cap {
        let cur = seen[i].clone();
        for c in exchange_applications(p, &cur) {
            let next = apply_cell(p, &cur, &c).expect("exchange applications match");
            if !idx.contains_key(&next) {
                idx.insert(next.clone(), seen.len());
                seen.push(next);
            }
        }
        i += 1;
    }
    seen
}

/// A trace made of exchange cells only, from `from` to `to`, if one exists.
pub fn exchange_trace(p: &Presentation, from: &Path, to: &Path) -> Option<CellTrace> {
    if from == to {
        return Some(CellTrace::empty(from.clone()));
    }
    if !exchange_equal(p, from, to) {
        return None;
    }
    let mut parent: HashMap<Path, Option<(Path, CellStep)>> = HashMap::from([(from.clone(), None)]);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(cur) = queue.pop_front() {
        for c in exchange_applications(p, &cur) {
            let next = apply_cell(p, &cur, &c).expect("exchange applications match");
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), Some((cur.clone(), c)));
            if &next == to {
                let mut cells = Vec::new();
                let mut at = next;
                while let Some(Some((prev, c))) = parent.get(&at) {
                    cells.push(c.clone());
                    at = prev.clone();
                }
                cells.reverse();
                return Some(CellTrace { source: from.clone(), cells });
            }
            queue.push_back(next);
        }
    }
    None
}
