//! Residuals: the local table read off the relations, residuals of steps
//! and of paths (by zig-zag rewriting), witness 2-cells, and residuals of
//! 2-cells along a vertical path.

use std::collections::HashMap;

use thiserror::Error;

use crate::core::search::{find_trace, SearchLimits, SearchResult};
use crate::core::{
    exchange_instance, whisker, CellStep, CellTrace, Diagnostic, Direction, Path,
    Presentation, RelationInstance, Span, Step, Word,
};

pub const DEFAULT_REWRITE_BUDGET: usize = 100_000;

/// One residuation square between an equational step `f` and a step `g`
/// on `word`, with contexts peeled off.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub word: Word,
    pub f: Step,
    pub g: Step,
    /// `g/f`
    pub g_after_f: Path,
    /// `f/g`; equational
    pub f_after_g: Path,
    pub relation: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResidualTable {
    pub entries: Vec<TableEntry>,
    index: HashMap<(Step, Step), usize>,
    /// Local pairs resolved by more than one relation.
    pub clashes: Vec<(Step, Step)>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ResidualTable {
    /// Entry for the local pair `(f, g)` with `f` equational.
    pub fn get(&self, f: &Step, g: &Step) -> Option<&TableEntry> {
        self.index.get(&(f.clone(), g.clone())).map(|&i| &self.entries[i])
    }

    pub fn is_ambiguous(&self, f: &Step, g: &Step) -> bool {
        self.clashes.iter().any(|(a, b)| (a == f && b == g) || (a == g && b == f))
    }

    pub fn show_entry(&self, p: &Presentation, e: &TableEntry) -> String {
        format!(
            "{} vs {} on {} ({}): g/f = {}, f/g = {}",
            p.show_step(&e.f),
            p.show_step(&e.g),
            p.show_word(&e.word),
            p.rels[e.relation].name,
            p.show_path(&e.g_after_f),
            p.show_path(&e.f_after_g)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ResidualError {
    #[error("residual undefined: neither {f} nor {g} is equational")]
    NotEquational { f: String, g: String },
    #[error("{f} and {g} are not coinitial")]
    NotCoinitial { f: String, g: String },
    #[error("no residuation square for {f} and {g} on {word}")]
    MissingEntry { f: String, g: String, word: String },
    #[error("rewrite budget of {0} exhausted")]
    Budget(usize),
    #[error("cylinder does not close: {0}")]
    Cylinder(String),
}

/// Smallest span covering both.
fn hull(a: Span, b: Span) -> Span {
    Span { start: a.start.min(b.start), end: a.end.max(b.end) }
}

/// Strips `x` and `z` from the contexts of every step, if possible.
fn peel_path(path: &Path, x: usize, z: usize) -> Option<Path> {
    let n = path.source.len();
    if x + z > n {
        return None;
    }
    let mut steps = Vec::with_capacity(path.steps.len());
    for s in &path.steps {
        if s.left.len() < x || s.right.len() < z || s.left[..x] != path.source[..x] || s.right[s.right.len() - z..] != path.source[n - z..] {
            return None;
        }
        steps.push(Step::new(s.left[x..].to_vec(), s.gen, s.right[..s.right.len() - z].to_vec()));
    }
    Some(Path { source: path.source[x..n - z].to_vec(), steps })
}

fn peel_step(s: &Step, x: usize, z: usize) -> Step {
    Step::new(s.left[x..].to_vec(), s.gen, s.right[..s.right.len() - z].to_vec())
}

/// Reads residuation squares off the relations.
pub fn derive_residual_table(p: &Presentation) -> ResidualTable {
    let mut table = ResidualTable::default();
    for (r, rel) in p.rels.iter().enumerate() {
        let mut found = None;
        for (a, b) in [(&rel.lhs, &rel.rhs), (&rel.rhs, &rel.lhs)] {
            let (Some(g0), Some(f0)) = (a.steps.first(), b.steps.first()) else { continue };
            if g0 == f0 || !p.is_equational_step(f0) {
                continue;
            }
            let rest_a = a.suffix(p, 1);
            if !p.is_equational_path(&rest_a) {
                continue;
            }
            let rest_b = b.suffix(p, 1);
            let w = hull(p.span(f0), p.span(g0));
            let n = a.source.len();
            let (x, z) = match (peel_path(a, w.start, n - w.end), peel_path(b, w.start, n - w.end)) {
                (Some(_), Some(_)) => (w.start, n - w.end),
                _ => (0, 0),
            };
            let word = a.source[x..n - z].to_vec();
            let entry = TableEntry {
                word,
                f: peel_step(f0, x, z),
                g: peel_step(g0, x, z),
                g_after_f: peel_path(&rest_b, x, z).expect("peeled with the side"),
                f_after_g: peel_path(&rest_a, x, z).expect("peeled with the side"),
                relation: r,
            };
            found = Some(entry);
            break;
        }
        match found {
            Some(e) => {
                let key = (e.f.clone(), e.g.clone());
                let rev = (e.g.clone(), e.f.clone());
                let clash = table.index.get(&key).or_else(|| table.index.get(&rev)).copied();
                if let Some(i) = clash {
                    table.clashes.push(key);
                    table.diagnostics.push(Diagnostic {
                        message: format!(
                            "relations `{}` and `{}` both resolve {} vs {} on {}; keeping `{}`",
                            p.rels[table.entries[i].relation].name,
                            rel.name,
                            p.show_step(&e.f),
                            p.show_step(&e.g),
                            p.show_word(&e.word),
                            p.rels[table.entries[i].relation].name
                        ),
                    });
                } else {
                    table.index.insert(key, table.entries.len());
                    table.entries.push(e);
                }
            }
            None => {
                let mentions_eq = rel.lhs.steps.iter().chain(rel.rhs.steps.iter()).any(|s| p.is_equational_step(s));
                if mentions_eq {
                    table.diagnostics.push(Diagnostic {
                        message: format!("relation `{}` involves equational steps but is not a residuation square", rel.name),
                    });
                }
            }
        }
    }
    table
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Item {
    Fwd(usize),
    Back(usize),
}

/// Computes residuals with memoization; one instance per presentation and table.
pub struct Residuator<'a> {
    pub p: &'a Presentation,
    pub table: &'a ResidualTable,
    pub budget: usize,
    step_memo: HashMap<(Step, Step), (Path, Path)>,
    path_memo: HashMap<(Path, Path), (Path, Path)>,
}

impl<'a> Residuator<'a> {
    pub fn new(p: &'a Presentation, table: &'a ResidualTable) -> Self {
        Residuator { p, table, budget: DEFAULT_REWRITE_BUDGET, step_memo: HashMap::new(), path_memo: HashMap::new() }
    }

    fn err_pair(&self, f: &Step, g: &Step) -> (String, String) {
        (self.p.show_step(f), self.p.show_step(g))
    }

    /// `(g/f, f/g)` for coinitial steps, one of them equational.
    pub fn step_residual(&mut self, f: &Step, g: &Step) -> Result<(Path, Path), ResidualError> {
        if let Some(r) = self.step_memo.get(&(f.clone(), g.clone())) {
            return Ok(r.clone());
        }
        let r = self.step_residual_uncached(f, g)?;
        self.step_memo.insert((f.clone(), g.clone()), r.clone());
        Ok(r)
    }

    fn step_residual_uncached(&self, f: &Step, g: &Step) -> Result<(Path, Path), ResidualError> {
        let p = self.p;
        let w = p.step_source(f);
        if w != p.step_source(g) {
            let (f, g) = self.err_pair(f, g);
            return Err(ResidualError::NotCoinitial { f, g });
        }
        if !p.is_equational_step(f) && !p.is_equational_step(g) {
            let (f, g) = self.err_pair(f, g);
            return Err(ResidualError::NotEquational { f, g });
        }
        let (tf, tg) = (p.step_target(f), p.step_target(g));
        if f == g {
            return Ok((Path::id(tf), Path::id(tg)));
        }
        let (sf, sg) = (p.span(f), p.span(g));
        if !sf.overlaps(&sg) {
            let (af, bf) = (p.gen(f.gen).source.len(), p.gen(f.gen).target.len());
            let (ag, bg) = (p.gen(g.gen).source.len(), p.gen(g.gen).target.len());
            let (g_off, f_off) = if sf.end <= sg.start {
                (sg.start - af + bf, sf.start)
            } else {
                (sg.start, sf.start - ag + bg)
            };
            let g2 = p.step_at(&tf, g_off, g.gen).expect("disjoint step survives");
            let f2 = p.step_at(&tg, f_off, f.gen).expect("disjoint step survives");
            return Ok((Path::single(p, g2), Path::single(p, f2)));
        }
        let win = hull(sf, sg);
        let (x, z) = (win.start, w.len() - win.end);
        let (fl, gl) = (peel_step(f, x, z), peel_step(g, x, z));
        let (xw, zw) = (&w[..x], &w[w.len() - z..]);
        if p.is_equational_step(f) {
            if let Some(e) = self.table.get(&fl, &gl) {
                return Ok((whisker(&e.g_after_f, xw, zw), whisker(&e.f_after_g, xw, zw)));
            }
        }
        if p.is_equational_step(g) {
            if let Some(e) = self.table.get(&gl, &fl) {
                return Ok((whisker(&e.f_after_g, xw, zw), whisker(&e.g_after_f, xw, zw)));
            }
        }
        let (fs, gs) = self.err_pair(&fl, &gl);
        Err(ResidualError::MissingEntry { f: fs, g: gs, word: p.show_word(&w[x..w.len() - z]) })
    }

    /// `(g/f, f/g)` for coinitial paths, one of them equational.
    pub fn residuals(&mut self, g: &Path, f: &Path) -> Result<(Path, Path), ResidualError> {
        let key = (g.clone(), f.clone());
        if let Some(r) = self.path_memo.get(&key) {
            return Ok(r.clone());
        }
        let r = self.residuals_with(g, f, |_| 0)?;
        self.path_memo.insert(key, r.clone());
        Ok(r)
    }

    pub fn path_residual(&mut self, g: &Path, f: &Path) -> Result<Path, ResidualError> {
        Ok(self.residuals(g, f)?.0)
    }

    /// Zig-zag rewriting of `f̄ ; g` to `(g/f) ; (f/g)̄`; `choose` picks
    /// which of the current redexes, listed left to right, to rewrite.
    pub fn residuals_with(
        &mut self,
        g: &Path,
        f: &Path,
        mut choose: impl FnMut(&[usize]) -> usize,
    ) -> Result<(Path, Path), ResidualError> {
        let p = self.p;
        if g.source != f.source {
            return Err(ResidualError::NotCoinitial { f: p.show_path(f), g: p.show_path(g) });
        }
        let (tf, tg) = (f.target(p), g.target(p));
        let mut steps: Vec<Step> = Vec::new();
        let mut items: Vec<Item> = Vec::new();
        for s in f.steps.iter().rev() {
            items.push(Item::Back(steps.len()));
            steps.push(s.clone());
        }
        for s in &g.steps {
            items.push(Item::Fwd(steps.len()));
            steps.push(s.clone());
        }
        let mut rewrites = 0;
        loop {
            let redexes: Vec<usize> = (0..items.len().saturating_sub(1))
                .filter(|&i| matches!((items[i], items[i + 1]), (Item::Back(_), Item::Fwd(_))))
                .collect();
            if redexes.is_empty() {
                break;
            }
            if rewrites >= self.budget {
                return Err(ResidualError::Budget(self.budget));
            }
            rewrites += 1;
            let i = redexes[choose(&redexes).min(redexes.len() - 1)];
            let (Item::Back(u), Item::Fwd(h)) = (items[i], items[i + 1]) else { unreachable!() };
            let (u, h) = (steps[u].clone(), steps[h].clone());
            let (h_u, u_h) = self.step_residual(&u, &h)?;
            let mut repl = Vec::new();
            for s in h_u.steps {
                repl.push(Item::Fwd(steps.len()));
                steps.push(s);
            }
            for s in u_h.steps.into_iter().rev() {
                repl.push(Item::Back(steps.len()));
                steps.push(s);
            }
            items.splice(i..i + 2, repl);
        }
        let fwd: Vec<Step> = items.iter().filter_map(|it| if let Item::Fwd(k) = it { Some(steps[*k].clone()) } else { None }).collect();
        let mut back: Vec<Step> = items.iter().filter_map(|it| if let Item::Back(k) = it { Some(steps[*k].clone()) } else { None }).collect();
        back.reverse();
        Ok((Path { source: tf, steps: fwd }, Path { source: tg, steps: back }))
    }

    /// The tile `u ; h/u ⇒ h ; u/h` for coinitial steps.
    fn tile(&mut self, h: &Step, u: &Step) -> Result<CellTrace, ResidualError> {
        let p = self.p;
        let (h_u, u_h) = self.step_residual(u, h)?;
        let from = Path::single(p, u.clone()).then(&h_u);
        let to = Path::single(p, h.clone()).then(&u_h);
        if from == to {
            return Ok(CellTrace::empty(from));
        }
        if let (Some(s2), true) = (h_u.steps.first(), h_u.len() == 1) {
            if let Some(inst) = exchange_instance(p, u, s2) {
                return Ok(CellTrace { source: from, cells: vec![CellStep { pos: 0, inst }] });
            }
        }
        let w = p.step_source(u);
        let win = hull(p.span(u), p.span(h));
        let (xw, zw) = (w[..win.start].to_vec(), w[win.end..].to_vec());
        let (fl, gl) = (peel_step(u, win.start, w.len() - win.end), peel_step(h, win.start, w.len() - win.end));
        let entry = self.table.get(&fl, &gl).or_else(|| self.table.get(&gl, &fl));
        if let Some(e) = entry {
            let inst = RelationInstance::named(e.relation, xw, zw, Direction::Forward);
            if inst.lhs(p) == from && inst.rhs(p) == to {
                return Ok(CellTrace { source: from, cells: vec![CellStep { pos: 0, inst }] });
            }
            let inst = inst.inverse();
            if inst.rhs(p) == from && inst.lhs(p) == to {
                return Ok(CellTrace { source: from, cells: vec![CellStep { pos: 0, inst }] });
            }
        }
        Err(ResidualError::MissingEntry { f: p.show_step(u), g: p.show_step(h), word: p.show_word(&w) })
    }

    /// A trace from `f ; g/f` to `g ; f/g`, one cell per tile.
    pub fn witness(&mut self, g: &Path, f: &Path) -> Result<CellTrace, ResidualError> {
        let p = self.p;
        if f.is_empty() {
            return Ok(CellTrace::empty(g.clone()));
        }
        if g.is_empty() {
            return Ok(CellTrace::empty(f.clone()));
        }
        if f.len() == 1 && g.len() == 1 {
            return self.tile(&g.steps[0], &f.steps[0]);
        }
        if f.len() > 1 {
            let f1 = f.prefix(p, 1);
            let rest = f.suffix(p, 1);
            let (a, _) = self.residuals(g, &f1)?;
            let inner = self.witness(&a, &rest)?;
            let (_, rest_after_a) = self.residuals(&a, &rest)?;
            let outer = self.witness(g, &f1)?;
            let t1 = inner.lift(&f1, &Path::id(rest.target(p)));
            let t2 = outer.lift(&Path::id(f.source.clone()), &rest_after_a);
            return Ok(t1.then(t2));
        }
        let g1 = g.prefix(p, 1);
        let rest = g.suffix(p, 1);
        let (_, d) = self.residuals(&g1, f)?;
        let (rest_after_d, _) = self.residuals(&rest, &d)?;
        let first = self.witness(&g1, f)?;
        let second = self.witness(&rest, &d)?;
        let t1 = first.lift(&Path::id(f.source.clone()), &rest_after_d);
        let t2 = second.lift(&g1, &Path::id(Vec::new()));
        Ok(t1.then(t2))
    }

    /// The residual of a 2-cell `alpha : g₁ ⇒* g₂` along a coinitial path
    /// `f`: a trace from `g₁/f` to `g₂/f`.
    pub fn cell_residual(&mut self, alpha: &CellTrace, f: &Path, limits: SearchLimits) -> Result<CellTrace, ResidualError> {
        let p = self.p;
        let target = alpha.target(p).map_err(|e| ResidualError::Cylinder(e.to_string()))?;
        let out = self.cell_residual_depth(alpha, f, limits, 0)?;
        let expected = self.path_residual(&target, f)?;
        match out.target(p) {
            Ok(t) if t == expected => Ok(out),
            Ok(t) => Err(ResidualError::Cylinder(format!(
                "residual trace ends at {} instead of {}",
                p.show_path(&t),
                p.show_path(&expected)
            ))),
            Err(e) => Err(ResidualError::Cylinder(e.to_string())),
        }
    }

    fn cell_residual_depth(&mut self, alpha: &CellTrace, f: &Path, limits: SearchLimits, depth: usize) -> Result<CellTrace, ResidualError> {
        if depth > 32 {
            return Err(ResidualError::Budget(32));
        }
        let mut cur = alpha.clone();
        for t in &f.steps {
            cur = self.cell_residual_step(&cur, t, limits, depth)?;
        }
        Ok(cur)
    }

    fn cell_residual_step(&mut self, alpha: &CellTrace, t: &Step, limits: SearchLimits, depth: usize) -> Result<CellTrace, ResidualError> {
        let p = self.p;
        let paths = alpha.paths(p).map_err(|e| ResidualError::Cylinder(e.to_string()))?;
        let tp = Path::single(p, t.clone());
        let start = self.path_residual(&alpha.source, &tp)?;
        let mut out = CellTrace::empty(start);
        for (i, cell) in alpha.cells.iter().enumerate() {
            let path = &paths[i];
            let from = cell.inst.from_side(p);
            let k = from.len();
            let prefix = path.prefix(p, cell.pos);
            let suffix = path.suffix(p, cell.pos + k);
            let (prefix_after, t_after_prefix) = self.residuals(&prefix, &tp)?;
            let local = self.instance_residual(&cell.inst, &t_after_prefix, limits, depth)?;
            let (_, v_after_from) = self.residuals(&from, &t_after_prefix)?;
            let suffix_after = self.path_residual(&suffix, &v_after_from)?;
            out.cells.extend(local.lift(&prefix_after, &suffix_after).cells);
        }
        Ok(out)
    }

    /// Residual of one instance `L ⇒ R` along a coinitial path `v`.
    fn instance_residual(&mut self, inst: &RelationInstance, v: &Path, limits: SearchLimits, depth: usize) -> Result<CellTrace, ResidualError> {
        let p = self.p;
        let l = inst.from_side(p);
        let single = CellTrace { source: l.clone(), cells: vec![CellStep { pos: 0, inst: inst.clone() }] };
        if v.is_empty() {
            return Ok(single);
        }
        let first = &v.steps[0];
        let rest = v.suffix(p, 1);
        let step_trace = self.instance_residual_step(inst, first, limits)?;
        self.cell_residual_depth(&step_trace, &rest, limits, depth + 1)
    }

    fn instance_residual_step(&mut self, inst: &RelationInstance, t: &Step, limits: SearchLimits) -> Result<CellTrace, ResidualError> {
        let p = self.p;
        let l = inst.from_side(p);
        let r = inst.to_side(p);
        let tp = Path::single(p, t.clone());
        let (l_t, t_l) = self.residuals(&l, &tp)?;
        let (r_t, t_r) = self.residuals(&r, &tp)?;
        if t_l != t_r {
            return Err(ResidualError::Cylinder(format!(
                "{} after the two sides of {}: {} vs {}",
                p.show_step(t),
                inst.show(p),
                p.show_path(&t_l),
                p.show_path(&t_r)
            )));
        }
        let win = inst.window(p);
        let span = p.span(t);
        if !win.is_empty() && !span.overlaps(&win) {
            let w = l.source.clone();
            let target = p.step_target(t);
            let shifted = if span.end <= win.start {
                let left = target[..inst.left.len() - (span.end - span.start) + p.gen(t.gen).target.len()].to_vec();
                RelationInstance { left, ..inst.clone() }
            } else {
                let keep = w.len() - inst.right.len();
                let right = target[keep..].to_vec();
                RelationInstance { right, ..inst.clone() }
            };
            if shifted.from_side(p) == l_t && shifted.to_side(p) == r_t {
                return Ok(CellTrace { source: l_t, cells: vec![CellStep { pos: 0, inst: shifted }] });
            }
        }
        match find_trace(p, &l_t, &r_t, limits) {
            SearchResult::Found(tr) => Ok(tr),
            SearchResult::NotFound { exhausted } => Err(ResidualError::Cylinder(format!(
                "no trace from {} to {} within {} named cells{}",
                p.show_path(&l_t),
                p.show_path(&r_t),
                limits.max_named,
                if exhausted { " (budget exhausted)" } else { "" }
            ))),
        }
    }
}

pub fn step_residual(p: &Presentation, table: &ResidualTable, f: &Step, g: &Step) -> Result<(Path, Path), ResidualError> {
    Residuator::new(p, table).step_residual(f, g)
}

/// `g/f`
pub fn path_residual(p: &Presentation, table: &ResidualTable, g: &Path, f: &Path) -> Result<Path, ResidualError> {
    Residuator::new(p, table).path_residual(g, f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualWitness {
    /// `f ; g/f`
    pub left: Path,
    /// `g ; f/g`
    pub right: Path,
    pub trace: CellTrace,
}

pub fn residual_witness(p: &Presentation, table: &ResidualTable, f: &Path, g: &Path) -> Result<ResidualWitness, ResidualError> {
    let mut r = Residuator::new(p, table);
    let (g_f, f_g) = r.residuals(g, f)?;
    let trace = r.witness(g, f)?;
    Ok(ResidualWitness { left: f.then(&g_f), right: g.then(&f_g), trace })
}

pub fn cell_residual(
    p: &Presentation,
    table: &ResidualTable,
    alpha: &CellTrace,
    f: &Path,
    limits: SearchLimits,
) -> Result<CellTrace, ResidualError> {
    Residuator::new(p, table).cell_residual(alpha, f, limits)
}
