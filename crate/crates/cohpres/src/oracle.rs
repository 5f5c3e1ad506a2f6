//! Brute-force ground truth at small sizes: hom-sets modulo relations by
//! union-find, bounded 2-cell equality, monotone surjection counts, residuals
//! by exhaustive tiling, and comparisons of the normal-form, quotient and
//! localization constructions.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::constructions::{
    fraction_equal, localize_equational, nf_with, object_classes, quotient_presentation, Fraction, FractionStrategy,
};
use crate::core::search::{find_trace, SearchLimits, SearchResult};
use crate::core::{
    apply_cell, exchange_applications, exchange_instance, named_applications, occurrences, CellTrace, Direction,
    Mode, ObjId, Path, Presentation, RelationInstance, Step, Word,
};
pub use crate::core::{exchange_canonical, exchange_class, exchange_equal};
use crate::objects::{all_words, is_normal};
use crate::residuation::{ResidualTable, Residuator};

pub const DEFAULT_PATH_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("more than {0} paths")]
    Explosion(usize),
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomClasses {
    pub source: Word,
    pub target: Word,
    pub bound: usize,
    pub classes: Vec<Vec<Path>>,
}

impl HomClasses {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, path: &Path) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(path))
    }
}

/// All paths from `src` with at most `bound` steps, shortest first.
pub fn paths_up_to(p: &Presentation, src: &[ObjId], bound: usize, cap: usize) -> Result<Vec<Path>, OracleError> {
    let mut out = vec![Path::id(src.to_vec())];
    let mut layer = vec![Path::id(src.to_vec())];
    for _ in 0..bound {
        let mut next = Vec::new();
        for path in &layer {
            for s in p.steps_from(&path.target(p)) {
                let mut q = path.clone();
                q.steps.push(s);
                next.push(q);
            }
        }
        if out.len() + next.len() > cap {
            return Err(OracleError::Explosion(cap));
        }
        out.extend(next.iter().cloned());
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    Ok(out)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let n = parent[c];
        parent[c] = r;
        c = n;
    }
    r
}

/// Paths `src → tgt` with at most `bound` steps, partitioned by single
/// relation and exchange rewrites that stay within the bound.
pub fn enumerate_hom_classes_capped(
    p: &Presentation,
    src: &[ObjId],
    tgt: &[ObjId],
    bound: usize,
    cap: usize,
) -> Result<HomClasses, OracleError> {
    let paths: Vec<Path> = paths_up_to(p, src, bound, cap)?.into_iter().filter(|q| q.target(p) == tgt).collect();
    let index: HashMap<&Path, usize> = paths.iter().enumerate().map(|(i, q)| (q, i)).collect();
    let mut parent: Vec<usize> = (0..paths.len()).collect();
    for (i, q) in paths.iter().enumerate() {
        for c in named_applications(p, q).into_iter().chain(exchange_applications(p, q)) {
            let Ok(next) = apply_cell(p, q, &c) else { continue };
            if let Some(&j) = index.get(&next) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut classes: Vec<Vec<Path>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (i, q) in paths.iter().enumerate() {
        let r = find(&mut parent, i);
        let k = *slot.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[k].push(q.clone());
    }
    Ok(HomClasses { source: src.to_vec(), target: tgt.to_vec(), bound, classes })
}

pub fn enumerate_hom_classes(p: &Presentation, src: &[ObjId], tgt: &[ObjId], bound: usize) -> Result<HomClasses, OracleError> {
    enumerate_hom_classes_capped(p, src, tgt, bound, DEFAULT_PATH_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellsEq {
    Equal(CellTrace),
    UnequalAtBudget,
}

impl CellsEq {
    pub fn is_equal(&self) -> bool {
        matches!(self, CellsEq::Equal(_))
    }
}

pub fn cells_equal(p: &Presentation, a: &Path, b: &Path, limits: SearchLimits) -> CellsEq {
    match find_trace(p, a, b, limits) {
        SearchResult::Found(t) => CellsEq::Equal(t),
        SearchResult::NotFound { .. } => CellsEq::UnequalAtBudget,
    }
}

/// Monotone surjections `{0..p} → {0..r}` counted by enumerating all
/// monotone maps.
pub fn monotone_surjections(p: usize, r: usize) -> u64 {
    fn go(i: usize, p: usize, r: usize, last: usize, hit: usize) -> u64 {
        if i == p {
            return u64::from(hit == r);
        }
        let mut n = 0;
        let start = if i == 0 { 0 } else { last };
        for v in start..r {
            let h = if i == 0 || v != last { hit + 1 } else { hit };
            n += go(i + 1, p, r, v, h);
        }
        n
    }
    if p == 0 {
        return u64::from(r == 0);
    }
    go(0, p, r, 0, 0)
}

pub fn surjection_count(pq: (usize, usize), rs: (usize, usize)) -> u64 {
    monotone_surjections(pq.0, rs.0) * monotone_surjections(pq.1, rs.1)
}

/// Tiles for coinitial steps found directly among relation instances on the
/// word: identical steps, exchanges of disjoint steps, and named instances
/// whose sides start with `u` and `h`, the residual of the equational one
/// being equational.
pub fn tiles(p: &Presentation, u: &Step, h: &Step) -> Vec<(Path, Path)> {
    let w = p.step_source(u);
    let mut out = Vec::new();
    if u == h {
        out.push((Path::id(p.step_target(u)), Path::id(p.step_target(h))));
        return out;
    }
    for t in p.steps_from(&p.step_target(u)) {
        if let Some(inst) = exchange_instance(p, u, &t) {
            let to = inst.to_side(p);
            if to.steps[0] == *h {
                out.push((Path::single(p, t.clone()), Path::single(p, to.steps[1].clone())));
            }
        }
    }
    let mut seen = BTreeSet::new();
    for (r, rel) in p.rels.iter().enumerate() {
        let src = &rel.lhs.source;
        for i in occurrences(&w, src) {
            let (x, z) = (w[..i].to_vec(), w[i + src.len()..].to_vec());
            if p.mode == Mode::Path && !(x.is_empty() && z.is_empty()) {
                continue;
            }
            for dir in [Direction::Forward, Direction::Backward] {
                let inst = RelationInstance::named(r, x.clone(), z.clone(), dir);
                let (from, to) = (inst.from_side(p), inst.to_side(p));
                if from.steps.first() != Some(u) || to.steps.first() != Some(h) {
                    continue;
                }
                let h_u = from.suffix(p, 1);
                let u_h = to.suffix(p, 1);
                let closes = (p.is_equational_step(u) && p.is_equational_path(&u_h))
                    || (p.is_equational_step(h) && p.is_equational_path(&h_u));
                if closes && seen.insert((h_u.steps.clone(), u_h.steps.clone())) {
                    out.push((h_u, u_h));
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Item {
    Fwd,
    Back,
}

/// Every result `(g/f, f/g)` reachable by rewriting the zig-zag `f̄ ; g` with
/// tiles in every order, with at most `depth` tiles along any branch.
pub fn tile_oracle_residuals(p: &Presentation, g: &Path, f: &Path, depth: usize) -> BTreeSet<(Vec<Step>, Vec<Step>)> {
    let mut start: Vec<(Item, Step)> = f.steps.iter().rev().map(|s| (Item::Back, s.clone())).collect();
    start.extend(g.steps.iter().map(|s| (Item::Fwd, s.clone())));
    let mut results = BTreeSet::new();
    let mut stack = vec![(start, 0usize)];
    let mut visited = BTreeSet::new();
    while let Some((word, used)) = stack.pop() {
        if !visited.insert((word.clone(), used)) {
            continue;
        }
        let redexes: Vec<usize> =
            (0..word.len().saturating_sub(1)).filter(|&i| word[i].0 == Item::Back && word[i + 1].0 == Item::Fwd).collect();
        if redexes.is_empty() {
            let fwd: Vec<Step> = word.iter().filter(|x| x.0 == Item::Fwd).map(|x| x.1.clone()).collect();
            let mut back: Vec<Step> = word.iter().filter(|x| x.0 == Item::Back).map(|x| x.1.clone()).collect();
            back.reverse();
            results.insert((fwd, back));
            continue;
        }
        if used >= depth {
            continue;
        }
        for i in redexes {
            let (u, h) = (&word[i].1, &word[i + 1].1);
            for (h_u, u_h) in tiles(p, u, h) {
                let mut next = word[..i].to_vec();
                next.extend(h_u.steps.iter().map(|s| (Item::Fwd, s.clone())));
                next.extend(u_h.steps.iter().rev().map(|s| (Item::Back, s.clone())));
                next.extend_from_slice(&word[i + 2..]);
                stack.push((next, used + 1));
            }
        }
    }
    results
}

/// `g/f` from the tile oracle when all orders agree.
pub fn tile_oracle_residual(p: &Presentation, g: &Path, f: &Path, depth: usize) -> Option<Path> {
    let rs = tile_oracle_residuals(p, g, f, depth);
    let mut it = rs.into_iter();
    let (fwd, _) = it.next()?;
    if it.next().is_some() {
        return None;
    }
    Some(Path { source: f.target(p), steps: fwd })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomRow {
    pub source: String,
    pub target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub localization: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surjections: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FractionSample {
    pub pairs: usize,
    pub agree: usize,
    /// Pairs found equal by both methods.
    pub equal: usize,
    pub disagreements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub rows: Vec<HomRow>,
    pub fractions: Option<FractionSample>,
    pub mismatches: Vec<String>,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// `a^p b^q` exponents, when the objects are `a` and `b` and the word is sorted.
pub fn ds2_shape(p: &Presentation, w: &[ObjId]) -> Option<(usize, usize)> {
    let (a, b) = (p.object_id("a")?, p.object_id("b")?);
    let pa = w.iter().take_while(|&&c| c == a).count();
    let rest = &w[pa..];
    if rest.iter().all(|&c| c == b) {
        Some((pa, rest.len()))
    } else {
        None
    }
}

/// Class counts of the constructions on all endpoint pairs in range.
///
/// Path mode compares the normal-form fragment (normal endpoints only), the
/// quotient presentation and the localization. Monoidal mode compares the
/// normal-form fragment with monotone surjection counts when `surjections`
/// is set, and samples fractions comparing mediating-path equality with
/// equality of normal-form images.
pub fn compare_constructions(
    p: &Presentation,
    table: &ResidualTable,
    max_word: usize,
    max_steps: usize,
    surjections: bool,
    limits: SearchLimits,
) -> Result<Comparison, OracleError> {
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    let loc = localize_equational(p);
    if p.mode == Mode::Path {
        let q = quotient_presentation(p).map_err(|e| OracleError::Other(e.to_string()))?;
        let classes = object_classes(p);
        let class = |o: ObjId| vec![classes[o as usize]];
        for s in 0..p.objects.len() as ObjId {
            for t in 0..p.objects.len() as ObjId {
                let (sw, tw) = (vec![s], vec![t]);
                let nf = if is_normal(p, &sw) && is_normal(p, &tw) {
                    Some(enumerate_hom_classes(p, &sw, &tw, max_steps)?.count())
                } else {
                    None
                };
                let quo = enumerate_hom_classes(&q, &class(s), &class(t), max_steps)?.count();
                let lc = enumerate_hom_classes(&loc, &sw, &tw, max_steps)?.count();
                if quo != lc {
                    mismatches.push(format!(
                        "hom({}, {}): quotient has {quo} classes, localization {lc}",
                        p.show_word(&sw),
                        p.show_word(&tw)
                    ));
                }
                if let Some(n) = nf {
                    if n != quo {
                        mismatches.push(format!(
                            "hom({}, {}): normal forms give {n} classes, quotient {quo}",
                            p.show_word(&sw),
                            p.show_word(&tw)
                        ));
                    }
                }
                rows.push(HomRow {
                    source: p.show_word(&sw),
                    target: p.show_word(&tw),
                    normal_form: nf,
                    quotient: Some(quo),
                    localization: Some(lc),
                    surjections: None,
                });
            }
        }
        return Ok(Comparison { rows, fractions: None, mismatches });
    }
    let normal: Vec<Word> = all_words(p, max_word).into_iter().filter(|w| is_normal(p, w)).collect();
    for s in &normal {
        for t in &normal {
            let nf = enumerate_hom_classes(p, s, t, max_steps)?.count();
            let sur = if surjections {
                match (ds2_shape(p, s), ds2_shape(p, t)) {
                    (Some(a), Some(b)) => Some(surjection_count(a, b)),
                    _ => None,
                }
            } else {
                None
            };
            if let Some(k) = sur {
                if k as usize != nf {
                    mismatches.push(format!(
                        "hom({}, {}): {nf} classes, {k} surjection pairs",
                        p.show_word(s),
                        p.show_word(t)
                    ));
                }
            }
            rows.push(HomRow {
                source: p.show_word(s),
                target: p.show_word(t),
                normal_form: Some(nf),
                quotient: None,
                localization: None,
                surjections: sur,
            });
        }
    }
    let fractions = sample_fractions(p, table, 4, 2, limits, 60);
    for d in &fractions.disagreements {
        mismatches.push(d.clone());
    }
    Ok(Comparison { rows, fractions: Some(fractions), mismatches })
}

/// Fractions `x → y` on words up to `max_word` letters with numerators and
/// denominators of at most `max_len` steps.
pub fn fractions_between(p: &Presentation, x: &[ObjId], y: &[ObjId], max_len: usize) -> Vec<Fraction> {
    let nums = paths_up_to(p, x, max_len, DEFAULT_PATH_CAP).unwrap_or_default();
    let dens: Vec<Path> = paths_up_to(p, y, max_len, DEFAULT_PATH_CAP)
        .unwrap_or_default()
        .into_iter()
        .filter(|d| p.is_equational_path(d))
        .collect();
    let mut out = Vec::new();
    for n in &nums {
        for d in &dens {
            if n.target(p) == d.target(p) {
                out.push(Fraction { num: n.clone(), den: d.clone() });
            }
        }
    }
    out
}

/// Compares mediating-path equality of fractions with equality of the
/// normal-form images of their numerators on up to `max_pairs` pairs.
pub fn sample_fractions(
    p: &Presentation,
    table: &ResidualTable,
    max_word: usize,
    max_len: usize,
    limits: SearchLimits,
    max_pairs: usize,
) -> FractionSample {
    let mut sample = FractionSample::default();
    let mut r = Residuator::new(p, table);
    let words: Vec<Word> = all_words(p, max_word).into_iter().filter(|w| !w.is_empty()).collect();
    'outer: for x in &words {
        for y in &words {
            let fs = fractions_between(p, x, y, max_len);
            for (i, a) in fs.iter().enumerate() {
                for b in fs.iter().skip(i + 1) {
                    if sample.pairs >= max_pairs {
                        break 'outer;
                    }
                    let (Ok(na), Ok(nb)) = (nf_with(&mut r, &a.num), nf_with(&mut r, &b.num)) else { continue };
                    let by_nf = na == nb || find_trace(p, &na, &nb, limits).is_found();
                    let Ok(med) = fraction_equal(p, table, a, b, FractionStrategy::Mediating, limits, 4) else { continue };
                    sample.pairs += 1;
                    if med.is_equal() == by_nf {
                        sample.agree += 1;
                        sample.equal += usize::from(by_nf);
                    } else {
                        sample.disagreements.push(format!(
                            "{} vs {}: mediating {}, normal forms {}",
                            a.show(p),
                            b.show(p),
                            if med.is_equal() { "equal" } else { "unequal at budget" },
                            if by_nf { "equal" } else { "unequal at budget" }
                        ));
                    }
                }
            }
        }
    }
    sample
}
