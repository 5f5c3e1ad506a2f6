//! Critical pairs (two coinitial overlapping steps) and critical cylinders
//! (a step against a relation instance), found by overlapping source words.

use std::collections::HashSet;

use serde::Serialize;

use crate::core::search::{find_trace, SearchLimits, SearchResult};
use crate::core::{
    exchange_equal, CellStep, CellTrace, Direction, ExchangeShape, Flavor, GenId, InstanceKind, Mode, Path,
    Presentation, RelationInstance, Span, Step, Word,
};
use crate::residuation::{ResidualError, ResidualTable, Residuator};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPair {
    pub word: Word,
    /// Equational.
    pub f: Step,
    pub g: Step,
    /// Index into the table entries resolving the pair.
    pub resolved: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalCylinder {
    pub f: Step,
    pub alpha: RelationInstance,
    pub flavor: Flavor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetsEqual {
    Equal,
    ExchangeEqual,
    Unequal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderVerdict {
    pub targets: TargetsEqual,
    /// `f/g₁`
    pub vertical_lhs: Path,
    /// `f/g₂`
    pub vertical_rhs: Path,
    /// A trace from `g₁/f` to `g₂/f`.
    pub top: Option<CellTrace>,
    pub notes: Vec<String>,
}

impl CylinderVerdict {
    /// Whether both residuals of the vertical step are single steps or identities.
    pub fn vertical_is_step(&self) -> bool {
        self.vertical_lhs.len() <= 1 && self.vertical_rhs.len() <= 1
    }
}

impl CriticalPair {
    pub fn show(&self, p: &Presentation) -> String {
        format!("{} vs {} on {}", p.show_step(&self.f), p.show_step(&self.g), p.show_word(&self.word))
    }
}

impl CriticalCylinder {
    pub fn source(&self, p: &Presentation) -> Word {
        self.alpha.source_word(p)
    }

    pub fn show(&self, p: &Presentation) -> String {
        format!("{} against {} on {}", p.show_step(&self.f), self.alpha.show(p), p.show_word(&self.source(p)))
    }
}

/// A placement of a step's source relative to a base word: the merged word,
/// the step, and the base's contexts inside it.
struct Placement {
    word: Word,
    step: Step,
    left: Word,
    right: Word,
}

/// Places `e` (source of `gen`) at offset `d` relative to `base`, if the
/// letters agree on the overlap.
fn place(p: &Presentation, gen: GenId, base: &[u16], d: isize) -> Option<Placement> {
    let e = &p.gen(gen).source;
    let (el, bl) = (e.len() as isize, base.len() as isize);
    let start = d.min(0);
    let end = (d + el).max(bl);
    let mut word = Vec::with_capacity((end - start) as usize);
    for i in start..end {
        let from_e = if i >= d && i < d + el { Some(e[(i - d) as usize]) } else { None };
        let from_b = if i >= 0 && i < bl { Some(base[i as usize]) } else { None };
        match (from_e, from_b) {
            (Some(x), Some(y)) if x != y => return None,
            (Some(x), _) | (_, Some(x)) => word.push(x),
            (None, None) => unreachable!(),
        }
    }
    let off = (d - start) as usize;
    let bstart = (-start) as usize;
    let step = p.step_at(&word, off, gen)?;
    let left = word[..bstart].to_vec();
    let right = word[bstart + base.len()..].to_vec();
    Some(Placement { word, step, left, right })
}

fn offsets(p: &Presentation, gen: GenId, base_len: usize) -> impl Iterator<Item = isize> {
    let el = p.gen(gen).source.len() as isize;
    -el..=base_len as isize
}

/// Equational-involving critical pairs in generator order, then offset.
pub fn enumerate_critical_pairs(p: &Presentation, table: &ResidualTable) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    let mut seen: HashSet<(Word, Step, Step)> = HashSet::new();
    let resolve = |f: &Step, g: &Step| {
        table
            .entries
            .iter()
            .position(|e| (e.f == *f && e.g == *g) || (e.f == *g && e.g == *f))
    };
    for (e, _) in p.gens.iter().enumerate().filter(|(i, _)| p.is_equational(*i)) {
        for h in 0..p.gens.len() {
            if p.mode == Mode::Path {
                if h == e || p.gen(h).source != p.gen(e).source {
                    continue;
                }
                let word = p.gen(e).source.clone();
                let f = Step::new(Vec::new(), e, Vec::new());
                let g = Step::new(Vec::new(), h, Vec::new());
                let key = if p.is_equational(h) && h < e { (word.clone(), g.clone(), f.clone()) } else { (word.clone(), f.clone(), g.clone()) };
                if seen.insert(key) {
                    let resolved = resolve(&f, &g);
                    out.push(CriticalPair { word, f, g, resolved });
                }
                continue;
            }
            let base = p.gen(h).source.clone();
            for d in offsets(p, e, base.len()) {
                let Some(pl) = place(p, e, &base, d) else { continue };
                let g = Step::new(pl.left.clone(), h, pl.right.clone());
                let f = pl.step;
                if f == g || !p.span(&f).overlaps(&p.span(&g)) {
                    continue;
                }
                let key = if p.is_equational(h) && (h, g.offset()) < (e, f.offset()) {
                    (pl.word.clone(), g.clone(), f.clone())
                } else {
                    (pl.word.clone(), f.clone(), g.clone())
                };
                if seen.insert(key) {
                    let resolved = resolve(&f, &g);
                    out.push(CriticalPair { word: pl.word, f, g, resolved });
                }
            }
        }
    }
    out
}

/// Whether the base's sides share their first step, in which case every
/// vertical step completes the cylinder by residuating that common step.
fn shares_first_step(p: &Presentation, alpha: &RelationInstance) -> bool {
    let (l, r) = (alpha.lhs(p), alpha.rhs(p));
    matches!((l.steps.first(), r.steps.first()), (Some(a), Some(b)) if a == b)
}

fn first_steps(p: &Presentation, alpha: &RelationInstance) -> Vec<Step> {
    [alpha.lhs(p), alpha.rhs(p)].into_iter().filter_map(|s| s.steps.first().cloned()).collect()
}

fn all_equational(p: &Presentation, alpha: &RelationInstance) -> bool {
    p.is_equational_path(&alpha.lhs(p)) && p.is_equational_path(&alpha.rhs(p))
}

/// Critical cylinders of both flavours: an equational vertical step against
/// any base, and a non-equational vertical step against an equational base.
pub fn enumerate_critical_cylinders(p: &Presentation) -> Vec<CriticalCylinder> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |out: &mut Vec<CriticalCylinder>, c: CriticalCylinder| {
        if seen.insert((c.f.clone(), c.alpha.clone())) {
            out.push(c);
        }
    };
    for (r, rel) in p.rels.iter().enumerate() {
        let base = rel.lhs.source.clone();
        let proto = RelationInstance::named(r, Vec::new(), Vec::new(), Direction::Forward);
        let eq_base = all_equational(p, &proto);
        for e in 0..p.gens.len() {
            let flavor = match (p.is_equational(e), eq_base) {
                (true, _) => Flavor::EquationalVertical,
                (false, true) => Flavor::EquationalBase,
                (false, false) => continue,
            };
            if p.mode == Mode::Path {
                if p.gen(e).source != base {
                    continue;
                }
                let f = Step::new(Vec::new(), e, Vec::new());
                if shares_first_step(p, &proto) || first_steps(p, &proto).contains(&f) {
                    continue;
                }
                push(&mut out, CriticalCylinder { f, alpha: proto.clone(), flavor });
                continue;
            }
            for d in offsets(p, e, base.len()) {
                let Some(pl) = place(p, e, &base, d) else { continue };
                let alpha = RelationInstance::named(r, pl.left, pl.right, Direction::Forward);
                let window = alpha.window(p);
                if !p.span(&pl.step).overlaps(&window) {
                    continue;
                }
                if shares_first_step(p, &alpha) || first_steps(p, &alpha).contains(&pl.step) {
                    continue;
                }
                push(&mut out, CriticalCylinder { f: pl.step, alpha, flavor });
            }
        }
    }
    if p.mode == Mode::Monoidal {
        for f1 in 0..p.gens.len() {
            for f2 in 0..p.gens.len() {
                let eq_base = p.is_equational(f1) && p.is_equational(f2);
                for e in 0..p.gens.len() {
                    let flavor = match (p.is_equational(e), eq_base) {
                        (true, _) => Flavor::EquationalVertical,
                        (false, true) => Flavor::EquationalBase,
                        (false, false) => continue,
                    };
                    for c in exchange_cylinders(p, e, f1, f2) {
                        push(&mut out, CriticalCylinder { f: c.0, alpha: c.1, flavor });
                    }
                }
            }
        }
    }
    out
}

/// Placements of `e` straddling both factors of an exchange of `f1` and
/// `f2`, the middle word being the part of `e`'s source between them.
fn exchange_cylinders(p: &Presentation, e: GenId, f1: GenId, f2: GenId) -> Vec<(Step, RelationInstance)> {
    let src = &p.gen(e).source;
    let (s1, s2) = (&p.gen(f1).source, &p.gen(f2).source);
    let mut out = Vec::new();
    if s1.is_empty() || s2.is_empty() {
        return out;
    }
    for k in 0..=src.len().saturating_sub(2) {
        // `e` starts `j` letters before the middle word
        for j in 1..src.len() - k {
            let mid = src[j..j + k].to_vec();
            let mut base = s1.clone();
            base.extend_from_slice(&mid);
            base.extend_from_slice(s2);
            let d = s1.len() as isize - j as isize;
            let Some(pl) = place(p, e, &base, d) else { continue };
            let alpha = RelationInstance {
                kind: InstanceKind::Exchange(ExchangeShape { f: f1, mid, g: f2 }),
                left: pl.left,
                right: pl.right,
                dir: Direction::Forward,
            };
            let x = alpha.left.len();
            let f1_span = Span { start: x, end: x + s1.len() };
            let f2_span = Span { start: x + s1.len() + k, end: x + s1.len() + k + s2.len() };
            let fs = p.span(&pl.step);
            if !fs.overlaps(&f1_span) || !fs.overlaps(&f2_span) {
                continue;
            }
            if first_steps(p, &alpha).contains(&pl.step) {
                continue;
            }
            out.push((pl.step, alpha));
        }
    }
    out
}

/// Residuates both sides of the base along the vertical step and searches
/// for a trace closing the top face.
pub fn check_cylinder(
    p: &Presentation,
    table: &ResidualTable,
    c: &CriticalCylinder,
    limits: SearchLimits,
) -> Result<CylinderVerdict, ResidualError> {
    let mut r = Residuator::new(p, table);
    let f = Path::single(p, c.f.clone());
    let (g1, g2) = (c.alpha.lhs(p), c.alpha.rhs(p));
    let (g1_f, f_g1) = r.residuals(&g1, &f)?;
    let (g2_f, f_g2) = r.residuals(&g2, &f)?;
    let targets = if f_g1 == f_g2 {
        TargetsEqual::Equal
    } else if exchange_equal(p, &f_g1, &f_g2) {
        TargetsEqual::ExchangeEqual
    } else {
        TargetsEqual::Unequal
    };
    let mut notes = Vec::new();
    let top = if g1_f.target(p) != g2_f.target(p) {
        notes.push("the residuals of the two sides are not parallel".to_string());
        None
    } else {
        match find_trace(p, &g1_f, &g2_f, limits) {
            SearchResult::Found(t) => Some(t),
            SearchResult::NotFound { exhausted } => {
                notes.push(format!(
                    "no trace from {} to {} within {} named cells{}",
                    p.show_path(&g1_f),
                    p.show_path(&g2_f),
                    limits.max_named,
                    if exhausted { "; class budget exhausted" } else { "" }
                ));
                None
            }
        }
    };
    Ok(CylinderVerdict { targets, vertical_lhs: f_g1, vertical_rhs: f_g2, top, notes })
}

/// The single-cell trace of the base itself.
pub fn base_trace(p: &Presentation, c: &CriticalCylinder) -> CellTrace {
    CellTrace { source: c.alpha.lhs(p), cells: vec![CellStep { pos: 0, inst: c.alpha.clone() }] }
}
