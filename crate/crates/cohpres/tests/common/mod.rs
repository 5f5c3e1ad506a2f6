#![allow(dead_code)]

use std::collections::BTreeSet;

use cohpres::coherence::{check_all, CheckOptions};
use cohpres::constructions::{equational_paths, nf_with};
use cohpres::core::search::{cells_related, SearchLimits};
use cohpres::core::*;
use cohpres::objects::{all_words, normalize, reachable_normal_forms};
use cohpres::oracle::{exchange_canonical, exchange_class, paths_up_to};
use cohpres::residuation::{derive_residual_table, Residuator};

pub fn corpus_path(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load(name: &str) -> Presentation {
    let src = std::fs::read_to_string(corpus_path(name)).unwrap();
    parse_presentation(&src).unwrap()
}

pub fn path(p: &Presentation, s: &str) -> Path {
    parse_path(p, s).unwrap()
}

pub fn word(p: &Presentation, s: &str) -> Word {
    parse_word(p, s).unwrap()
}

/// Monotone surjections `[n] -> [k]`, by listing every monotone map.
pub fn brute_surjections(n: usize, k: usize) -> u64 {
    fn go(i: usize, n: usize, k: usize, last: usize, hit: &mut Vec<bool>) -> u64 {
        if i == n {
            return u64::from(hit.iter().all(|&h| h));
        }
        let mut total = 0;
        for v in last..k {
            let was = hit[v];
            hit[v] = true;
            total += go(i + 1, n, k, v, hit);
            hit[v] = was;
        }
        total
    }
    if k == 0 {
        return u64::from(n == 0);
    }
    go(0, n, k, 0, &mut vec![false; k])
}

/// All paths with at most `len` steps starting from words of length at most `max_word`.
pub fn fragment(p: &Presentation, max_word: usize, len: usize) -> Vec<Path> {
    let mut out = Vec::new();
    for w in all_words(p, max_word) {
        out.extend(paths_up_to(p, &w, len, 100_000).unwrap());
    }
    out
}

fn related(p: &Presentation, a: &Path, b: &Path) -> bool {
    a == b || cells_related(p, a, b, SearchLimits::default())
}

/// Unit and pasting laws of residuation on coinitial pairs of the fragment.
pub fn residual_laws(p: &Presentation, max_word: usize, len: usize) -> Result<usize, String> {
    let table = derive_residual_table(p);
    let mut r = Residuator::new(p, &table);
    let mut checked = 0;
    for w in all_words(p, max_word) {
        let gs = paths_up_to(p, &w, len, 100_000).unwrap();
        let fs = equational_paths(p, &w, len, 100_000);
        for g in &gs {
            let id = Path::id(w.clone());
            let (g_id, id_g) = r.residuals(g, &id).map_err(|e| e.to_string())?;
            if &g_id != g || id_g != Path::id(g.target(p)) {
                return Err(format!("unit law fails for {}", p.show_path(g)));
            }
        }
        for f in &fs {
            let (ff, _) = r.residuals(f, f).map_err(|e| e.to_string())?;
            if !ff.is_empty() {
                return Err(format!("{0}/{0} = {1} is not an identity", p.show_path(f), p.show_path(&ff)));
            }
            for g in &gs {
                let (g_f, f_g) = r.residuals(g, f).map_err(|e| e.to_string())?;
                if g_f.source != f.target(p) || f_g.source != g.target(p) || g_f.target(p) != f_g.target(p) {
                    return Err(format!("residuals of {} after {} do not close a square", p.show_path(g), p.show_path(f)));
                }
                if !p.is_equational_path(&f_g) {
                    return Err(format!("{}/{} is not equational", p.show_path(f), p.show_path(g)));
                }
                // Pasting along f = f1 ; f2.
                for k in 1..f.len() {
                    let (f1, f2) = (f.prefix(p, k), f.suffix(p, k));
                    let (g1, _) = r.residuals(g, &f1).map_err(|e| e.to_string())?;
                    let (g12, _) = r.residuals(&g1, &f2).map_err(|e| e.to_string())?;
                    if g12 != g_f {
                        return Err(format!("pasting along {} fails for {}", p.show_path(f), p.show_path(g)));
                    }
                }
                // Pasting along g = g1 ; g2.
                for k in 1..g.len() {
                    let (g1, g2) = (g.prefix(p, k), g.suffix(p, k));
                    let (g1_f, f_g1) = r.residuals(&g1, f).map_err(|e| e.to_string())?;
                    let (g2_r, _) = r.residuals(&g2, &f_g1).map_err(|e| e.to_string())?;
                    if g1_f.then(&g2_r) != g_f {
                        return Err(format!("pasting along {} fails after {}", p.show_path(g), p.show_path(f)));
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// `N(f ; g)` and `N(f) ; N(g)` are related, and `N` kills equational paths.
pub fn nf_functoriality(p: &Presentation, max_word: usize, len: usize) -> Result<usize, String> {
    let table = derive_residual_table(p);
    let mut r = Residuator::new(p, &table);
    let mut checked = 0;
    for f in fragment(p, max_word, len) {
        let nf = nf_with(&mut r, &f).map_err(|e| e.to_string())?;
        if p.is_equational_path(&f) && !nf.is_empty() {
            return Err(format!("N({}) = {} is not an identity", p.show_path(&f), p.show_path(&nf)));
        }
        let rest = len - f.len();
        for g in paths_up_to(p, &f.target(p), rest, 100_000).unwrap() {
            let ng = nf_with(&mut r, &g).map_err(|e| e.to_string())?;
            let nfg = nf_with(&mut r, &f.then(&g)).map_err(|e| e.to_string())?;
            if !related(p, &nfg, &nf.then(&ng)) {
                return Err(format!(
                    "N({} ; {}) = {} is not related to {}",
                    p.show_path(&f),
                    p.show_path(&g),
                    p.show_path(&nfg),
                    p.show_path(&nf.then(&ng))
                ));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Canonical forms are idempotent and their fibers are the exchange classes.
pub fn exchange_fibers(p: &Presentation, max_word: usize, len: usize) -> Result<usize, String> {
    let paths = fragment(p, max_word, len);
    let mut checked = 0;
    for q in &paths {
        let c = exchange_canonical(p, q);
        if exchange_canonical(p, &c) != c {
            return Err(format!("canonical form of {} is not idempotent", p.show_path(q)));
        }
        // Exchange classes by a closure that does not use canonical forms.
        let class: BTreeSet<Path> = exchange_class(p, q, 100_000).into_iter().collect();
        let fiber: BTreeSet<Path> = paths
            .iter()
            .filter(|o| o.source == q.source && o.len() == q.len() && exchange_canonical(p, o) == c)
            .cloned()
            .collect();
        if class != fiber {
            return Err(format!("fiber of {} differs from its exchange class", p.show_path(q)));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Normalization is idempotent and every rewriting order reaches the same normal form.
pub fn normalize_laws(p: &Presentation, max_word: usize) -> Result<usize, String> {
    let mut checked = 0;
    for w in all_words(p, max_word) {
        let n = normalize(p, &w).map_err(|e| e.to_string())?;
        let again = normalize(p, &n.normal).map_err(|e| e.to_string())?;
        if again.normal != n.normal || !again.path.is_empty() {
            return Err(format!("normalizing {} twice moves it", p.show_word(&n.normal)));
        }
        if n.path.target(p) != n.normal || n.path.source != w {
            return Err(format!("normalization path of {} is not a path to its normal form", p.show_word(&w)));
        }
        let all = reachable_normal_forms(p, &w, 1_000_000).ok_or("reachable normal forms exceed the cap")?;
        if all.len() != 1 || !all.contains(&n.normal) {
            return Err(format!("{} has {} reachable normal forms", p.show_word(&w), all.len()));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Two runs of the full check give byte-identical reports.
pub fn report_determinism(names: &[&str]) -> Result<usize, String> {
    for name in names {
        let p = load(name);
        let a = serde_json::to_string(&check_all(&p, CheckOptions::default())).unwrap();
        let b = serde_json::to_string(&check_all(&load(name), CheckOptions::default())).unwrap();
        if a != b {
            return Err(format!("{name}: reports differ between runs"));
        }
    }
    Ok(names.len())
}
