//! Presentation-level constructions: opposite, quotient, localization and
//! Tietze transformations; the normal-form functor and tensor; fractions.

use std::collections::HashSet;

use thiserror::Error;

use crate::core::search::{find_trace, SearchLimits, SearchResult};
use crate::core::{
    parse_path, parse_word, whisker, CellTrace, GenId, Mode, MorGen, ObjId, Path, Presentation, Relation, Step,
    Weights, Word,
};
use crate::objects::{equational_successors, normalize, NormalizeError};
use crate::residuation::{ResidualError, ResidualTable, Residuator};

pub const DEFAULT_TIETZE_BUDGET: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("the quotient presentation is only defined in path mode")]
    NotPathMode,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("name `{0}` is already in use")]
    Taken(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error(transparent)]
    Residual(#[from] ResidualError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

fn reverse_path(p: &Presentation, path: &Path) -> Path {
    Path { source: path.target(p), steps: path.steps.iter().rev().cloned().collect() }
}

/// Every generator reversed, every path read backwards; weights for the
/// opposite become the weights of the result and vice versa.
pub fn opposite(p: &Presentation) -> Presentation {
    let mut q = p.clone();
    for g in &mut q.gens {
        std::mem::swap(&mut g.source, &mut g.target);
    }
    for (r, rel) in q.rels.iter_mut().zip(&p.rels) {
        r.lhs = reverse_path(p, &rel.lhs);
        r.rhs = reverse_path(p, &rel.rhs);
    }
    q.weights = Weights { own: p.weights.opposite.clone(), opposite: p.weights.own.clone() };
    q
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

/// The quotient object of each object, named after its first member.
pub fn object_classes(p: &Presentation) -> Vec<ObjId> {
    classes_and_names(p).0
}

fn classes_and_names(p: &Presentation) -> (Vec<ObjId>, Vec<String>) {
    let n = p.objects.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for g in p.gens.iter().filter(|g| g.equational && g.source.len() == 1 && g.target.len() == 1) {
        let (a, b) = (find(&mut parent, g.source[0] as usize), find(&mut parent, g.target[0] as usize));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut class_of = vec![0 as ObjId; n];
    let mut objects = Vec::new();
    for (o, class) in class_of.iter_mut().enumerate() {
        if find(&mut parent, o) == o {
            *class = objects.len() as ObjId;
            objects.push(p.objects[o].clone());
        }
    }
    for o in 0..n {
        let r = find(&mut parent, o);
        class_of[o] = class_of[r];
    }
    (class_of, objects)
}

/// Objects identified along equational generators, each equational generator
/// related to an identity. The result has no equational generators.
pub fn quotient_presentation(p: &Presentation) -> Result<Presentation, ConstructionError> {
    if p.mode != Mode::Path {
        return Err(ConstructionError::NotPathMode);
    }
    let (class_of, objects) = classes_and_names(p);
    let map = |w: &[ObjId]| -> Word { w.iter().map(|&c| class_of[c as usize]).collect() };
    let mut q = Presentation::new(Mode::Path);
    q.objects = objects;
    q.gens = p
        .gens
        .iter()
        .map(|g| MorGen { name: g.name.clone(), source: map(&g.source), target: map(&g.target), equational: false })
        .collect();
    let map_path = |path: &Path| Path {
        source: map(&path.source),
        steps: path.steps.iter().map(|s| Step::new(Vec::new(), s.gen, Vec::new())).collect(),
    };
    q.rels = p
        .rels
        .iter()
        .map(|r| Relation { name: r.name.clone(), lhs: map_path(&r.lhs), rhs: map_path(&r.rhs) })
        .collect();
    for (i, g) in p.gens.iter().enumerate().filter(|(_, g)| g.equational) {
        let src = map(&g.source);
        q.rels.push(Relation {
            name: fresh_name(&q, &format!("{}_id", g.name)),
            lhs: Path { source: src.clone(), steps: vec![Step::new(Vec::new(), i, Vec::new())] },
            rhs: Path::id(src),
        });
    }
    Ok(q)
}

fn fresh_name(p: &Presentation, base: &str) -> String {
    let taken = |s: &str| p.gen_id(s).is_some() || p.rel_id(s).is_some();
    if !taken(base) {
        return base.to_string();
    }
    (2..).map(|i| format!("{base}{i}")).find(|s| !taken(s)).unwrap()
}

/// Adds an inverse for each generator of `sigma` with the two invertibility
/// relations. Inverses are not equational.
pub fn localization_presentation(p: &Presentation, sigma: &[GenId]) -> Presentation {
    let mut q = p.clone();
    for &f in sigma {
        let g = p.gen(f).clone();
        let inv = q.gens.len();
        let inv_name = fresh_name(&q, &format!("{}_inv", g.name));
        q.gens.push(MorGen { name: inv_name, source: g.target.clone(), target: g.source.clone(), equational: false });
        let step = Step::new(Vec::new(), f, Vec::new());
        let back = Step::new(Vec::new(), inv, Vec::new());
        let n1 = fresh_name(&q, &format!("{}_inv1", g.name));
        q.rels.push(Relation {
            name: n1,
            lhs: Path { source: g.source.clone(), steps: vec![step.clone(), back.clone()] },
            rhs: Path::id(g.source.clone()),
        });
        let n2 = fresh_name(&q, &format!("{}_inv2", g.name));
        q.rels.push(Relation {
            name: n2,
            lhs: Path { source: g.target.clone(), steps: vec![back, step] },
            rhs: Path::id(g.target.clone()),
        });
    }
    q
}

/// The localization at all equational generators.
pub fn localize_equational(p: &Presentation) -> Presentation {
    let sigma: Vec<GenId> = (0..p.gens.len()).filter(|&g| p.is_equational(g)).collect();
    localization_presentation(p, &sigma)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tietze {
    /// A new generator with the relation `[name] => definition`.
    AddGenerator { name: String, source: Word, target: Word, definition: Path },
    /// Remove a generator using a relation `[name] => path` with `path` avoiding it.
    RemoveGenerator { name: String },
    AddRelation { name: String, lhs: Path, rhs: Path },
    RemoveRelation { name: String },
}

fn uses_gen(path: &Path, g: GenId) -> bool {
    path.steps.iter().any(|s| s.gen == g)
}

fn derivable(p: &Presentation, lhs: &Path, rhs: &Path, budget: usize) -> bool {
    let limits = SearchLimits { max_classes: budget, ..SearchLimits::default() };
    find_trace(p, lhs, rhs, limits).is_found()
}

/// Replaces every step of `g` by `def` in context, then drops `g`.
fn substitute(path: &Path, g: GenId, def: &Path) -> Path {
    let mut steps = Vec::new();
    for s in &path.steps {
        if s.gen == g {
            steps.extend(whisker(def, &s.left, &s.right).steps);
        } else {
            let gen = if s.gen > g { s.gen - 1 } else { s.gen };
            steps.push(Step::new(s.left.clone(), gen, s.right.clone()));
        }
    }
    Path { source: path.source.clone(), steps }
}

pub fn tietze_apply(p: &Presentation, t: &Tietze, budget: usize) -> Result<Presentation, ConstructionError> {
    let mut q = p.clone();
    match t {
        Tietze::AddGenerator { name, source, target, definition } => {
            if p.gen_id(name).is_some() || p.rel_id(&format!("{name}_def")).is_some() {
                return Err(ConstructionError::Taken(name.clone()));
            }
            if definition.source != *source || definition.target(p) != *target {
                return Err(ConstructionError::Invalid(format!("the definition of `{name}` does not have the declared type")));
            }
            let g = q.gens.len();
            q.gens.push(MorGen { name: name.clone(), source: source.clone(), target: target.clone(), equational: false });
            q.rels.push(Relation {
                name: format!("{name}_def"),
                lhs: Path { source: source.clone(), steps: vec![Step::new(Vec::new(), g, Vec::new())] },
                rhs: definition.clone(),
            });
        }
        Tietze::RemoveGenerator { name } => {
            let g = p.gen_id(name).ok_or_else(|| ConstructionError::UnknownGenerator(name.clone()))?;
            let single = |path: &Path| path.len() == 1 && path.steps[0].gen == g && path.steps[0].left.is_empty() && path.steps[0].right.is_empty();
            let def = p.rels.iter().enumerate().find_map(|(i, r)| {
                if single(&r.lhs) && !uses_gen(&r.rhs, g) {
                    Some((i, r.rhs.clone()))
                } else if single(&r.rhs) && !uses_gen(&r.lhs, g) {
                    Some((i, r.lhs.clone()))
                } else {
                    None
                }
            });
            let Some((ri, def)) = def else {
                return Err(ConstructionError::Refused(format!("no relation defines `{name}` by a path avoiding it")));
            };
            // `def` avoids `g`, so this only renumbers
            let def = substitute(&def, g, &Path::id(Vec::new()));
            let mut rels = Vec::new();
            for (i, r) in p.rels.iter().enumerate() {
                if i == ri {
                    continue;
                }
                rels.push(Relation { name: r.name.clone(), lhs: substitute(&r.lhs, g, &def), rhs: substitute(&r.rhs, g, &def) });
            }
            q.gens.remove(g);
            q.equational.retain(|e| e != name);
            q.rels = rels;
        }
        Tietze::AddRelation { name, lhs, rhs } => {
            if p.rel_id(name).is_some() || p.gen_id(name).is_some() {
                return Err(ConstructionError::Taken(name.clone()));
            }
            if lhs.source != rhs.source || lhs.target(p) != rhs.target(p) {
                return Err(ConstructionError::Invalid(format!("the sides of `{name}` are not parallel")));
            }
            if !derivable(p, lhs, rhs, budget) {
                return Err(ConstructionError::Refused(format!("`{name}` is not derivable within the budget")));
            }
            q.rels.push(Relation { name: name.clone(), lhs: lhs.clone(), rhs: rhs.clone() });
        }
        Tietze::RemoveRelation { name } => {
            let r = p.rel_id(name).ok_or_else(|| ConstructionError::UnknownRelation(name.clone()))?;
            let rel = q.rels.remove(r);
            if !derivable(&q, &rel.lhs, &rel.rhs, budget) {
                return Err(ConstructionError::Refused(format!("`{name}` is not derivable from the other relations within the budget")));
            }
        }
    }
    let diags = q.validate();
    if let Some(d) = diags.first() {
        return Err(ConstructionError::Invalid(d.message.clone()));
    }
    Ok(q)
}

/// Parses one script line: `addgen NAME : W -> W := PATH`, `rmgen NAME`,
/// `addrel NAME : PATH => PATH`, `rmrel NAME`.
pub fn parse_tietze(p: &Presentation, line: &str) -> Result<Tietze, ConstructionError> {
    let err = |m: &str| ConstructionError::Parse(format!("{m}: `{line}`"));
    let line = line.trim();
    let (verb, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let rest = rest.trim();
    let perr = |e: crate::core::ParseError| ConstructionError::Parse(e.to_string());
    match verb {
        "addgen" => {
            let (name, rest) = rest.split_once(':').ok_or_else(|| err("expected `:`"))?;
            let (ty, def) = rest.split_once(":=").ok_or_else(|| err("expected `:=`"))?;
            let (s, t) = ty.split_once("->").ok_or_else(|| err("expected `->`"))?;
            let source = parse_word(p, s.trim()).map_err(perr)?;
            let target = parse_word(p, t.trim()).map_err(perr)?;
            let definition = parse_path(p, def.trim()).map_err(perr)?;
            Ok(Tietze::AddGenerator { name: name.trim().to_string(), source, target, definition })
        }
        "rmgen" if !rest.is_empty() => Ok(Tietze::RemoveGenerator { name: rest.to_string() }),
        "addrel" => {
            let (name, rest) = rest.split_once(':').ok_or_else(|| err("expected `:`"))?;
            let (l, r) = rest.split_once("=>").ok_or_else(|| err("expected `=>`"))?;
            let lhs = parse_path(p, l.trim()).map_err(perr)?;
            let rhs = parse_path(p, r.trim()).map_err(perr)?;
            Ok(Tietze::AddRelation { name: name.trim().to_string(), lhs, rhs })
        }
        "rmrel" if !rest.is_empty() => Ok(Tietze::RemoveRelation { name: rest.to_string() }),
        _ => Err(err("unknown transformation")),
    }
}

/// Runs a script, one transformation per nonempty line; `#` starts a comment.
pub fn tietze_script(p: &Presentation, script: &str, budget: usize) -> Result<Presentation, ConstructionError> {
    let mut cur = p.clone();
    for line in script.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let t = parse_tietze(&cur, line)?;
        cur = tietze_apply(&cur, &t, budget)?;
    }
    Ok(cur)
}

/// The normal form of `x y`.
pub fn nf_object(p: &Presentation, x: &[ObjId], y: &[ObjId]) -> Result<Word, ConstructionError> {
    let w: Word = x.iter().chain(y).copied().collect();
    Ok(normalize(p, &w)?.normal)
}

/// `N(f) = (f/u_x) ; u_y'` where `u` is the chosen normalization path.
pub fn nf_functor_apply(p: &Presentation, table: &ResidualTable, f: &Path) -> Result<Path, ConstructionError> {
    let mut r = Residuator::new(p, table);
    nf_with(&mut r, f)
}

pub fn nf_with(r: &mut Residuator, f: &Path) -> Result<Path, ConstructionError> {
    let p = r.p;
    let u = normalize(p, &f.source)?.path;
    let moved = r.path_residual(f, &u)?;
    let post = normalize(p, &moved.target(p))?.path;
    Ok(moved.then(&post))
}

/// `x̂ ⊗ f ⊗ ẑ` on normal forms.
pub fn nf_tensor(p: &Presentation, table: &ResidualTable, x: &[ObjId], f: &Path, z: &[ObjId]) -> Result<Path, ConstructionError> {
    nf_functor_apply(p, table, &whisker(f, x, z))
}

/// A morphism `x → y` of the localization: `num : x → i` followed by the
/// inverse of the equational `den : y → i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: Path,
    pub den: Path,
}

impl Fraction {
    pub fn new(p: &Presentation, num: Path, den: Path) -> Result<Self, ConstructionError> {
        if num.target(p) != den.target(p) {
            return Err(ConstructionError::Invalid("numerator and denominator are not cofinal".into()));
        }
        if !p.is_equational_path(&den) {
            return Err(ConstructionError::Invalid("the denominator is not equational".into()));
        }
        Ok(Fraction { num, den })
    }

    pub fn identity(w: Word) -> Self {
        Fraction { num: Path::id(w.clone()), den: Path::id(w) }
    }

    pub fn source(&self) -> &Word {
        &self.num.source
    }

    pub fn target(&self) -> &Word {
        &self.den.source
    }

    pub fn show(&self, p: &Presentation) -> String {
        format!("({}, {})", p.show_path(&self.num), p.show_path(&self.den))
    }
}

/// `φ₁` then `φ₂`, completed by residuation of `φ₂.num` after `φ₁.den`.
pub fn fraction_compose(p: &Presentation, table: &ResidualTable, a: &Fraction, b: &Fraction) -> Result<Fraction, ConstructionError> {
    if a.target() != b.source() {
        return Err(ConstructionError::Invalid("fractions are not composable".into()));
    }
    let mut r = Residuator::new(p, table);
    let (f2_u1, u1_f2) = r.residuals(&b.num, &a.den)?;
    Ok(Fraction { num: a.num.then(&f2_u1), den: b.den.then(&u1_f2) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FractionEq {
    /// With the two mediating equational paths.
    Equal { w1: Path, w2: Path },
    UnequalAtBudget,
}

impl FractionEq {
    pub fn is_equal(&self) -> bool {
        matches!(self, FractionEq::Equal { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FractionStrategy {
    /// Compare normal-form images; sound when the presentation is coherent.
    NormalForm,
    /// Search for mediating equational paths.
    Mediating,
}

/// Equational paths from `w` of length at most `max_len`, at most `cap` of them.
pub fn equational_paths(p: &Presentation, w: &[ObjId], max_len: usize, cap: usize) -> Vec<Path> {
    let mut out = vec![Path::id(w.to_vec())];
    let mut layer = vec![Path::id(w.to_vec())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for path in &layer {
            for s in equational_successors(p, &path.target(p)) {
                let mut q = path.clone();
                q.steps.push(s);
                next.push(q);
                if out.len() + next.len() >= cap {
                    out.extend(next);
                    return out;
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn related(p: &Presentation, a: &Path, b: &Path, limits: SearchLimits) -> Option<CellTrace> {
    match find_trace(p, a, b, limits) {
        SearchResult::Found(t) => Some(t),
        SearchResult::NotFound { .. } => None,
    }
}

pub fn fraction_equal(
    p: &Presentation,
    table: &ResidualTable,
    a: &Fraction,
    b: &Fraction,
    strategy: FractionStrategy,
    limits: SearchLimits,
    max_mediator: usize,
) -> Result<FractionEq, ConstructionError> {
    if a.source() != b.source() || a.target() != b.target() {
        return Err(ConstructionError::Invalid("fractions are not parallel".into()));
    }
    if a == b {
        let (w1, w2) = (Path::id(a.num.target(p)), Path::id(b.num.target(p)));
        return Ok(FractionEq::Equal { w1, w2 });
    }
    match strategy {
        FractionStrategy::NormalForm => {
            let mut r = Residuator::new(p, table);
            let (na, nb) = (nf_with(&mut r, &a.num)?, nf_with(&mut r, &b.num)?);
            if na == nb || related(p, &na, &nb, limits).is_some() {
                let w1 = normalize(p, &a.num.target(p))?.path;
                let w2 = normalize(p, &b.num.target(p))?.path;
                Ok(FractionEq::Equal { w1, w2 })
            } else {
                Ok(FractionEq::UnequalAtBudget)
            }
        }
        FractionStrategy::Mediating => {
            let (i1, i2) = (a.num.target(p), b.num.target(p));
            let mut c1 = equational_paths(p, &i1, max_mediator, 500);
            let mut c2 = equational_paths(p, &i2, max_mediator, 500);
            // try the normalization paths first
            for (c, i) in [(&mut c1, &i1), (&mut c2, &i2)] {
                if let Ok(n) = normalize(p, i) {
                    if let Some(k) = c.iter().position(|q| *q == n.path) {
                        let q = c.remove(k);
                        c.insert(0, q);
                    }
                }
            }
            let mut tried = HashSet::new();
            for w1 in &c1 {
                for w2 in &c2 {
                    if w1.target(p) != w2.target(p) {
                        continue;
                    }
                    let (d1, d2) = (a.den.then(w1), b.den.then(w2));
                    let (n1, n2) = (a.num.then(w1), b.num.then(w2));
                    if !tried.insert((n1.clone(), n2.clone(), d1.clone(), d2.clone())) {
                        continue;
                    }
                    if (d1 == d2 || related(p, &d1, &d2, limits).is_some()) && (n1 == n2 || related(p, &n1, &n2, limits).is_some()) {
                        return Ok(FractionEq::Equal { w1: w1.clone(), w2: w2.clone() });
                    }
                }
            }
            Ok(FractionEq::UnequalAtBudget)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftFractions {
    pub identities: bool,
    pub composition: bool,
    /// Failures of the square condition among the sampled pairs.
    pub square_failures: Vec<String>,
    pub squares_checked: usize,
    /// `None` when discharged by the equational paths being epimorphisms.
    pub cancellation_failures: Option<Vec<String>>,
}

impl LeftFractions {
    pub fn holds(&self) -> bool {
        self.identities
            && self.composition
            && self.square_failures.is_empty()
            && self.cancellation_failures.as_ref().is_none_or(|f| f.is_empty())
    }
}

fn paths_from(p: &Presentation, w: &[ObjId], max_len: usize, cap: usize) -> Vec<Path> {
    let mut out = vec![Path::id(w.to_vec())];
    let mut layer = vec![Path::id(w.to_vec())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for path in &layer {
            for s in p.steps_from(&path.target(p)) {
                let mut q = path.clone();
                q.steps.push(s);
                next.push(q);
            }
        }
        if out.len() + next.len() > cap {
            break;
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Checks the conditions for equational paths to admit a left calculus of
/// fractions: identities and composites are equational by construction; the
/// square condition is checked by residuation on coinitial pairs of length at
/// most `bound` from `words`; cancellation is checked on the same sample
/// unless `coherent` says every equational path is epi.
pub fn check_left_fractions(
    p: &Presentation,
    table: &ResidualTable,
    words: &[Word],
    bound: usize,
    coherent: bool,
    limits: SearchLimits,
) -> LeftFractions {
    let mut r = Residuator::new(p, table);
    let mut square_failures = Vec::new();
    let mut checked = 0;
    for w in words {
        let us = equational_paths(p, w, bound, 200);
        let fs = paths_from(p, w, bound, 200);
        for u in &us {
            for f in &fs {
                checked += 1;
                let (f_u, u_f) = match r.residuals(f, u) {
                    Ok(x) => x,
                    Err(e) => {
                        square_failures.push(format!("{} after {}: {e}", p.show_path(f), p.show_path(u)));
                        continue;
                    }
                };
                if !p.is_equational_path(&u_f) {
                    square_failures.push(format!("{} after {} is not equational", p.show_path(u), p.show_path(f)));
                    continue;
                }
                let ok = r.witness(f, u).ok().and_then(|t| t.target(p).ok()).is_some_and(|t| t == f.then(&u_f));
                if !ok {
                    square_failures.push(format!(
                        "no square {} ; {} ⇔ {} ; {}",
                        p.show_path(u),
                        p.show_path(&f_u),
                        p.show_path(f),
                        p.show_path(&u_f)
                    ));
                }
            }
        }
    }
    let cancellation_failures = if coherent {
        None
    } else {
        let mut fails = Vec::new();
        for w in words {
            for u in equational_paths(p, w, bound.min(2), 50).iter().filter(|u| !u.is_empty()) {
                let x = u.target(p);
                let fs = paths_from(p, &x, bound.min(2), 50);
                for (i, f) in fs.iter().enumerate() {
                    for g in fs.iter().skip(i + 1) {
                        if f.target(p) != g.target(p) {
                            continue;
                        }
                        if related(p, &u.then(f), &u.then(g), limits).is_none() {
                            continue;
                        }
                        let y = f.target(p);
                        let found = equational_paths(p, &y, bound.min(2), 50)
                            .iter()
                            .any(|v| related(p, &f.then(v), &g.then(v), limits).is_some());
                        if !found {
                            fails.push(format!(
                                "{} and {} agree after {} but no equational path equalizes them",
                                p.show_path(f),
                                p.show_path(g),
                                p.show_path(u)
                            ));
                        }
                    }
                }
            }
        }
        Some(fails)
    };
    LeftFractions { identities: true, composition: true, square_failures, squares_checked: checked, cancellation_failures }
}
